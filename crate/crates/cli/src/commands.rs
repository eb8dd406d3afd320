use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use fliess_core::hankel::{hankel_rank_lower_bound, lie_rank_lower_bound};
use fliess_core::nulling::{
    arctanh_natural_series, exp_sin_coefficients, global_nulling_input, local_nulling_solve,
    natural_coefficients, natural_output_coefficients, relative_degree, verify_null_global,
    zero_dynamics, LocalNullingSolution, NullingError,
};
use fliess_core::scalar::parse_rational;
use fliess_core::series::ParseCoefficient;
use fliess_core::simulate::{convolve_kernel, evaluate_fliess_trajectory, kernel_profile, ltv_realize};
use fliess_core::specfun::{
    appendix_a_failures, appendix_a_full_sum_exact, appendix_a_limit,
    check_multiplication_identity, check_sine_neumann_identity,
};
use fliess_core::{Error, Kernel, KernelKind, MaximalKind, Rational, Scalar, Series};

use crate::input::load_input;
use crate::{ExampleArg, Grid, Growth, IdentityArg, KindArg, MethodArg};

fn lib<E: Into<Error>>(err: E) -> anyhow::Error {
    anyhow::Error::new(err.into())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_series<S: Scalar + ParseCoefficient>(path: &Path, deg: Option<usize>) -> Result<Series<S>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = Series::<S>::parse_text(&text, deg)
        .map_err(lib)
        .with_context(|| format!("series file {}", path.display()))?;
    for warning in &parsed.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(parsed.series)
}

fn rational(name: &str, text: &str) -> Result<Rational> {
    parse_rational(text).ok_or_else(|| anyhow!("--{name}: cannot parse {text:?} as a number"))
}

fn check_grid(grid: &Grid) -> Result<()> {
    if !(grid.dt > 0.0) || !(grid.t_end > 0.0) {
        bail!("--dt and --t-end must be positive (dt = {}, t-end = {})", grid.dt, grid.t_end);
    }
    Ok(())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn classify(path: &Path, deg: Option<usize>, exact: bool) -> Result<()> {
    if exact {
        print!("{}", classify_report(&load_series::<Rational>(path, deg)?)?);
    } else {
        print!("{}", classify_report(&load_series::<f64>(path, deg)?)?);
    }
    Ok(())
}

fn classify_report<S: Scalar>(c: &Series<S>) -> Result<String> {
    let class = c.palindrome_class();
    let mut out = String::new();
    writeln!(out, "alphabet size: {}", c.alphabet().size())?;
    writeln!(out, "truncation degree: {}", c.trunc_degree())?;
    writeln!(out, "support size: {}", c.support_len())?;
    writeln!(out, "coefficient reversible: {}", yes(c.is_coefficient_reversible()))?;
    writeln!(
        out,
        "palindromic: {} (even: {}, odd: {})",
        yes(class.palindromic),
        yes(class.even),
        yes(class.odd)
    )?;
    writeln!(out, "exchangeable: {}", yes(c.is_exchangeable()))?;
    writeln!(
        out,
        "palindromic-exchangeable form: {}",
        yes(c.is_palindromic_and_exchangeable_form())
    )?;
    if c.alphabet().size() == 2 {
        match relative_degree(c).map_err(lib)? {
            Some(r) => writeln!(out, "relative degree: {r}")?,
            None => writeln!(out, "relative degree: none")?,
        }
    }
    Ok(out)
}

fn palindromic_kind(kind: KindArg) -> MaximalKind {
    match kind {
        KindArg::Global => MaximalKind::PalindromicGlobal,
        KindArg::Local => MaximalKind::PalindromicLocal,
    }
}

pub fn rank(growth: &Growth, n_max: usize) -> Result<()> {
    let k = rational("K", &growth.k)?;
    let m = rational("M", &growth.m)?;
    let kind = palindromic_kind(growth.kind);
    for n in 0..=n_max {
        let h = hankel_rank_lower_bound(kind, &k, &m, n).map_err(lib)?;
        let l = lie_rank_lower_bound(kind, &k, &m, n).map_err(lib)?;
        println!("{n}, {h}, {l}");
    }
    Ok(())
}

fn kernel_from(growth: &Growth) -> Result<Kernel> {
    let k = rational("K", &growth.k)?.as_f64();
    let m = rational("M", &growth.m)?.as_f64();
    let kind = match growth.kind {
        KindArg::Global => KernelKind::Global,
        KindArg::Local => KernelKind::Local,
    };
    Kernel::new(kind, k, m).map_err(lib)
}

pub struct SimulateArgs<'a> {
    pub series: Option<&'a Path>,
    pub method: Option<MethodArg>,
    pub growth: &'a Growth,
    pub grid: &'a Grid,
    pub input: &'a str,
    pub n_max: usize,
    pub out: Option<&'a Path>,
}

pub fn simulate(args: SimulateArgs<'_>) -> Result<()> {
    check_grid(args.grid)?;
    let u = load_input(args.input, args.grid.dt, args.grid.t_end)?;
    let method = args.method.unwrap_or(if args.series.is_some() {
        MethodArg::Fliess
    } else {
        MethodArg::Kernel
    });
    let y = match method {
        MethodArg::Fliess => {
            let path = args
                .series
                .ok_or_else(|| anyhow!("--method fliess needs --series"))?;
            let c = load_series::<Rational>(path, None)?;
            evaluate_fliess_trajectory(&c, &u).map_err(lib)?
        }
        MethodArg::Kernel => {
            let kernel = kernel_from(args.growth)?;
            convolve_kernel(&kernel, &u, u.duration()).map_err(lib)?
        }
        MethodArg::Ltv => {
            let kernel = kernel_from(args.growth)?;
            kernel.check_horizon(u.duration()).map_err(lib)?;
            ltv_realize(&kernel, args.n_max, &u).map_err(lib)?.y
        }
    };
    emit(args.out, &y.to_csv("y"))
}

pub fn kernel(growth: &Growth, grid: &Grid, out: Option<&Path>) -> Result<()> {
    check_grid(grid)?;
    let kernel = kernel_from(growth)?;
    let intervals = (grid.t_end / grid.dt).round().max(1.0) as usize;
    let profile = kernel_profile(&kernel, grid.t_end, intervals).map_err(lib)?;
    emit(out, &profile.to_csv_with("tau", "value"))
}

pub struct NullGlobalArgs<'a> {
    pub series: &'a Path,
    pub k: f64,
    pub m: f64,
    pub grid: &'a Grid,
    pub out: Option<&'a Path>,
    pub u_out: Option<&'a Path>,
    pub z_out: Option<&'a Path>,
    pub n_max: usize,
}

pub fn null_global(args: NullGlobalArgs<'_>) -> Result<()> {
    check_grid(args.grid)?;
    let c = load_series::<Rational>(args.series, None)?;
    let natural: BTreeMap<usize, f64> = natural_coefficients(&c)
        .into_iter()
        .map(|(k, v)| (k, v.as_f64()))
        .collect();
    if natural.is_empty() {
        bail!("series {} has no natural part to null", args.series.display());
    }
    if let Some(v) = natural.get(&0) {
        return Err(lib(NullingError::ConstantTerm(v.to_string())));
    }
    let (t_end, dt) = (args.grid.t_end, args.grid.dt);
    let report = verify_null_global(&natural, args.k, args.m, t_end, dt).map_err(lib)?;
    println!("sup |y_N + y_F| on [0, {}]: {:e}", report.total.duration(), report.sup_abs);
    if let Some(path) = args.out {
        emit(Some(path), &report.total.to_csv("y_residual"))?;
    }
    if args.u_out.is_some() || args.z_out.is_some() {
        let u = global_nulling_input(&natural, args.k, args.m, dt, t_end).map_err(lib)?;
        if let Some(path) = args.u_out {
            emit(Some(path), &u.to_csv("u_star"))?;
        }
        if let Some(path) = args.z_out {
            let zd = zero_dynamics(&u, &natural, args.m, args.n_max).map_err(lib)?;
            emit(Some(path), &zd.to_csv())?;
        }
    }
    Ok(())
}

pub struct NullLocalArgs<'a> {
    pub series: Option<&'a Path>,
    pub example: Option<ExampleArg>,
    pub k: &'a str,
    pub m: &'a str,
    pub j: usize,
    pub grid: &'a Grid,
    pub exact: bool,
    pub out: Option<&'a Path>,
    pub plot_out: Option<&'a Path>,
}

/// The natural response to null: its power-series coefficients for the
/// solve, and a pointwise evaluator for the residual table.
enum Natural {
    Series(Series<Rational>),
    Example(ExampleArg),
}

impl Natural {
    fn coefficients(&self, m: &Rational, degree: usize) -> Result<Vec<Rational>> {
        let c = match self {
            Natural::Series(c) => c.clone(),
            Natural::Example(ExampleArg::Arctanh) => arctanh_natural_series(m, degree),
            Natural::Example(ExampleArg::ExpSin) => {
                bail!("the exp-sin example has irrational coefficients; use --float")
            }
        };
        Ok(natural_output_coefficients(&natural_coefficients(&c), degree))
    }

    fn coefficients_f64(&self, m: &Rational, degree: usize) -> Result<Vec<f64>> {
        match self {
            Natural::Example(ExampleArg::ExpSin) => Ok(exp_sin_coefficients(degree)),
            _ => Ok(self.coefficients(m, degree)?.iter().map(Scalar::as_f64).collect()),
        }
    }

    fn eval(&self, m: f64, t: f64) -> f64 {
        match self {
            Natural::Series(c) => {
                let coeffs = natural_output_coefficients(&natural_coefficients(c), c.trunc_degree());
                coeffs.iter().rev().fold(0.0, |acc, v| acc * t + v.as_f64())
            }
            Natural::Example(ExampleArg::Arctanh) => (m * t).atanh(),
            Natural::Example(ExampleArg::ExpSin) => {
                t.exp() * (2.0 * std::f64::consts::PI * t).sin()
            }
        }
    }
}

pub fn null_local(args: NullLocalArgs<'_>) -> Result<()> {
    check_grid(args.grid)?;
    let k = rational("K", args.k)?;
    let m = rational("M", args.m)?;
    let natural = match (args.series, args.example) {
        (Some(path), _) => Natural::Series(load_series::<Rational>(path, None)?),
        (None, Some(example)) => Natural::Example(example),
        (None, None) => bail!("null-local needs --series or --example"),
    };
    let (kf, mf) = (k.as_f64(), m.as_f64());
    if mf * args.grid.t_end >= 1.0 {
        return Err(lib(NullingError::OutsideConvergence(mf * args.grid.t_end)));
    }
    let degree = 2 * args.j + 1;
    let table = if args.exact {
        let y_n = natural.coefficients(&m, degree)?;
        let sol = local_nulling_solve(&y_n, &k, &m, args.j).map_err(lib)?;
        coefficient_table(&sol)
    } else {
        let y_n = natural.coefficients_f64(&m, degree)?;
        let sol = local_nulling_solve(&y_n, &kf, &mf, args.j).map_err(lib)?;
        coefficient_table(&sol)
    };
    print!("{}", table.text);

    let n = (args.grid.t_end / args.grid.dt).round() as usize;
    let mut residual = String::from("t,y_residual\n");
    let mut plot = String::from("t,y_natural,minus_y_forced\n");
    let mut sup: f64 = 0.0;
    for i in 0..=n {
        let t = i as f64 * args.grid.dt;
        let y_natural = natural.eval(mf, t);
        let y_forced = table.forced_output(kf, mf, t)?;
        let r = y_natural + y_forced;
        sup = sup.max(r.abs());
        writeln!(residual, "{t},{r}")?;
        writeln!(plot, "{t},{y_natural},{}", -y_forced)?;
    }
    eprintln!("sup |y_N + y_F| on [0, {}]: {sup:e}", n as f64 * args.grid.dt);
    if let Some(path) = args.out {
        emit(Some(path), &residual)?;
    }
    if let Some(path) = args.plot_out {
        emit(Some(path), &plot)?;
    }
    Ok(())
}

struct CoefficientTable {
    text: String,
    floats: LocalNullingSolution<f64>,
}

impl CoefficientTable {
    fn forced_output(&self, k: f64, m: f64, t: f64) -> Result<f64> {
        self.floats.forced_output(k, m, t).map_err(lib)
    }
}

fn coefficient_table<S: Scalar>(sol: &LocalNullingSolution<S>) -> CoefficientTable {
    let mut text = String::from("j,u_star_j\n");
    for (j, u) in sol.coefficients.iter().enumerate() {
        let _ = writeln!(text, "{j},{u}");
    }
    CoefficientTable {
        text,
        floats: LocalNullingSolution {
            coefficients: sol.coefficients.iter().map(Scalar::as_f64).collect(),
            residual: sol.residual.iter().map(Scalar::as_f64).collect(),
        },
    }
}

pub fn identity(which: IdentityArg, ell_max: usize, k_max: usize, terms: usize) -> Result<()> {
    match which {
        IdentityArg::AppendixA => {
            let total = ell_max * k_max;
            let failures = appendix_a_failures(ell_max, k_max);
            if failures.is_empty() {
                println!("all inner sums zero: {total}/{total}");
            } else {
                println!("inner sums zero: {}/{total}", total - failures.len());
                for (ell, k) in &failures {
                    println!("nonzero at ell = {ell}, k = {k}");
                }
            }
            println!("k, Mt, |S - 1/(k k!)|");
            for k in [1, 2, 5] {
                for mt in [0, 1, 2] {
                    let mt = Rational::from_integer(mt.into());
                    let s = appendix_a_full_sum_exact(k, &mt, terms);
                    let err = (s - appendix_a_limit(k)).as_f64().abs();
                    println!("{k}, {mt}, {err:e}");
                }
            }
            if !failures.is_empty() {
                bail!("specfun: {} inner sums are nonzero", failures.len());
            }
        }
        IdentityArg::Multiplication => {
            println!("lambda, z, residual");
            let mut worst: f64 = 0.0;
            for l in 0..=4 {
                for z in [0.5, 1.0, 2.0, 3.0] {
                    let lambda = l as f64 / 4.0;
                    let r = check_multiplication_identity(lambda, z, terms);
                    worst = worst.max(r);
                    println!("{lambda}, {z}, {r:e}");
                }
            }
            println!("max residual: {worst:e}");
        }
        IdentityArg::SineNeumann => {
            println!("z, residual");
            let mut worst: f64 = 0.0;
            for i in 0..=10 {
                let z = i as f64 * 0.5;
                let r = check_sine_neumann_identity(z, terms);
                worst = worst.max(r);
                println!("{z}, {r:e}");
            }
            println!("max residual: {worst:e}");
        }
    }
    Ok(())
}
