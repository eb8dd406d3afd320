//! Iterated integrals, Chen–Fliess evaluation, impulse-response kernels and
//! the truncated linear time-varying realization.
//!
//! Signals live on uniform grids starting at `t = 0`. Each input is
//! integrated with trapezoid increments (`u_0 ≡ 1` for the drift letter) and
//! nested integrals are accumulated segment by segment, innermost suffix
//! first, integrating the piecewise-linear path exactly. Single convolutions
//! use composite Simpson.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::scalar::{factorial_q, Scalar};
use crate::series::Series;
use crate::specfun::{bessel_i0, bessel_j_all, TOL};
use crate::words::Word;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulateError {
    #[error("a sampled signal needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("time {t} lies beyond the signal duration {duration}")]
    BeyondDuration { t: f64, duration: f64 },
    #[error("time {t} is not on the grid with step {dt}")]
    OffGrid { t: f64, dt: f64 },
    #[error("kernel constants must be positive (K = {k}, M = {m})")]
    NonPositiveGrowth { k: f64, m: f64 },
    #[error(
        "local kernel singular: M·t_end = {m_t_end} ≥ 1, singularities at τ- = {tau_minus}, τ+ = {tau_plus}"
    )]
    LocalKernelSingular {
        m_t_end: f64,
        tau_minus: f64,
        tau_plus: f64,
    },
    #[error("word uses x{letter} but only {available} inputs were supplied")]
    MissingInput { letter: u8, available: usize },
    #[error("input grids differ")]
    GridMismatch,
    #[error("bad signal data: {0}")]
    Parse(String),
}

/// Samples `u(i·dt) = values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    dt: f64,
    values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self, SimulateError> {
        if dt.is_nan() || dt <= 0.0 {
            return Err(SimulateError::NonPositiveStep(dt));
        }
        if values.len() < 2 {
            return Err(SimulateError::TooFewSamples(values.len()));
        }
        Ok(Self { dt, values })
    }

    /// Samples `f` on `0, dt, …, t_end`; `t_end` is rounded to the grid.
    pub fn from_fn(dt: f64, t_end: f64, f: impl Fn(f64) -> f64) -> Result<Self, SimulateError> {
        if dt.is_nan() || dt <= 0.0 {
            return Err(SimulateError::NonPositiveStep(dt));
        }
        let n = (t_end / dt).round().max(0.0) as usize;
        Self::new(dt, (0..=n).map(|i| f(i as f64 * dt)).collect())
    }

    pub fn constant(dt: f64, t_end: f64, c: f64) -> Result<Self, SimulateError> {
        Self::from_fn(dt, t_end, |_| c)
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            dt: self.dt,
            values: vec![0.0; self.values.len()],
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn duration(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| self.time(i))
    }

    /// Grid index of `t`; errors when `t` is past the end or off-grid.
    pub fn index_of(&self, t: f64) -> Result<usize, SimulateError> {
        let x = t / self.dt;
        let i = x.round();
        if (x - i).abs() > 1e-6 || i < 0.0 {
            return Err(SimulateError::OffGrid { t, dt: self.dt });
        }
        let i = i as usize;
        if i >= self.values.len() {
            return Err(SimulateError::BeyondDuration {
                t,
                duration: self.duration(),
            });
        }
        Ok(i)
    }

    /// The prefix on `[0, t]`.
    pub fn restrict(&self, t: f64) -> Result<Self, SimulateError> {
        let i = self.index_of(t)?;
        Self::new(self.dt, self.values[..=i].to_vec())
    }

    /// Pointwise map.
    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            dt: self.dt,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| f(self.time(i), v))
                .collect(),
        }
    }

    /// `t,<value_name>` CSV with one row per grid point.
    pub fn to_csv(&self, value_name: &str) -> String {
        self.to_csv_with("t", value_name)
    }

    pub fn to_csv_with(&self, time_name: &str, value_name: &str) -> String {
        let mut out = format!("{time_name},{value_name}\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.time(i), v));
        }
        out
    }

    /// Reads a two-column CSV (header optional) on a uniform grid from 0.
    pub fn from_csv(text: &str) -> Result<Self, SimulateError> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
                return Err(SimulateError::Parse(format!("line {}: expected two columns", n + 1)));
            };
            match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
                (Ok(t), Ok(v)) => {
                    times.push(t);
                    values.push(v);
                }
                _ if n == 0 => continue,
                _ => return Err(SimulateError::Parse(format!("line {}: not numeric", n + 1))),
            }
        }
        if times.len() < 2 {
            return Err(SimulateError::TooFewSamples(times.len()));
        }
        let dt = times[1] - times[0];
        let uniform = times
            .iter()
            .enumerate()
            .all(|(i, &t)| (t - i as f64 * dt).abs() <= 1e-9 * (1.0 + t.abs()));
        if times[0].abs() > 1e-12 || !uniform {
            return Err(SimulateError::Parse(
                "samples must start at t = 0 on a uniform grid".into(),
            ));
        }
        Self::new(dt, values)
    }
}

/// `u_t(τ) = u(t - τ)` on `[0, t]`.
pub fn time_reverse_input(u: &SampledSignal, t: f64) -> Result<SampledSignal, SimulateError> {
    let it = u.index_of(t)?;
    SampledSignal::new(u.dt, (0..=it).map(|i| u.values[it - i]).collect())
}

/// Cumulative trapezoid: `out[i] = ∫_0^{t_i} f`.
pub fn cumulative_trapezoid(f: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in f.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Composite Simpson over equally spaced samples. An odd number of
/// intervals closes with the 3/8 rule; a single interval uses the trapezoid.
pub fn simpson(f: &[f64], dt: f64) -> f64 {
    let n = f.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * dt * (f[0] + f[1]),
        _ => {
            let (even_part, tail) = if n % 2 == 0 { (n, 0) } else { (n - 3, 3) };
            let mut s = 0.0;
            if even_part > 0 {
                s += f[0] + f[even_part];
                for (i, v) in f.iter().enumerate().take(even_part).skip(1) {
                    s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
                }
                s *= dt / 3.0;
            }
            if tail == 3 {
                let b = even_part;
                s += 3.0 * dt / 8.0 * (f[b] + 3.0 * f[b + 1] + 3.0 * f[b + 2] + f[b + 3]);
            }
            s
        }
    }
}

/// Trajectories of every iterated integral needed for a set of words,
/// sharing inner suffixes.
struct IteratedIntegrals<'a> {
    inputs: &'a [SampledSignal],
    len: usize,
    dt: f64,
    cache: HashMap<Word, Vec<f64>>,
}

impl<'a> IteratedIntegrals<'a> {
    fn new(inputs: &'a [SampledSignal], len: usize, dt: f64) -> Self {
        Self {
            inputs,
            len,
            dt,
            cache: HashMap::new(),
        }
    }

    /// Input increments over `[t_n, t_{n+1}]` for letter `l`: `dt` for the
    /// drift letter, the trapezoid increment of `∫u_l` otherwise.
    fn increments(&self, l: u8) -> Result<Vec<f64>, SimulateError> {
        if l == 0 {
            return Ok(vec![self.dt; self.len.saturating_sub(1)]);
        }
        let u = self.inputs.get(l as usize - 1).ok_or(SimulateError::MissingInput {
            letter: l,
            available: self.inputs.len(),
        })?;
        Ok(u.values[..self.len]
            .windows(2)
            .map(|w| 0.5 * self.dt * (w[0] + w[1]))
            .collect())
    }

    /// Chen's identity over each grid segment: with the integrated inputs
    /// linear on `[t_n, t_{n+1}]`,
    /// `E_{a1..ak}(t_{n+1}) = Σ_j E_{a(j+1)..ak}(t_n) · Δ_{a1}⋯Δ_{aj} / j!`.
    /// Time reversal of the samples reverses the segment order, so the
    /// reversal identity holds to rounding.
    fn trajectory(&mut self, word: &Word) -> Result<&Vec<f64>, SimulateError> {
        if !self.cache.contains_key(word) {
            let letters = word.letters().to_vec();
            let traj = if letters.is_empty() {
                vec![1.0; self.len]
            } else {
                for j in 1..letters.len() {
                    self.trajectory(&Word::new(letters[j..].to_vec()))?;
                }
                let deltas = letters
                    .iter()
                    .map(|&l| self.increments(l))
                    .collect::<Result<Vec<_>, _>>()?;
                let ones = vec![1.0; self.len];
                let suffixes: Vec<&Vec<f64>> = (1..=letters.len())
                    .map(|j| {
                        if j == letters.len() {
                            &ones
                        } else {
                            &self.cache[&Word::new(letters[j..].to_vec())]
                        }
                    })
                    .collect();
                let mut traj = Vec::with_capacity(self.len);
                let mut acc = 0.0;
                traj.push(0.0);
                for n in 0..self.len.saturating_sub(1) {
                    let mut segment = 1.0;
                    let mut step = 0.0;
                    for (j, suffix) in suffixes.iter().enumerate() {
                        segment *= deltas[j][n] / (j + 1) as f64;
                        step += suffix[n] * segment;
                    }
                    acc += step;
                    traj.push(acc);
                }
                traj
            };
            self.cache.insert(word.clone(), traj);
        }
        Ok(&self.cache[word])
    }
}

fn common_grid(inputs: &[SampledSignal], t: f64) -> Result<(usize, f64), SimulateError> {
    let first = inputs.first().ok_or(SimulateError::MissingInput {
        letter: 1,
        available: 0,
    })?;
    if inputs
        .iter()
        .any(|u| u.dt != first.dt || u.values.len() != first.values.len())
    {
        return Err(SimulateError::GridMismatch);
    }
    Ok((first.index_of(t)? + 1, first.dt))
}

/// `E_η[u](t, 0)` for a multi-input path; `inputs[i-1]` drives `x_i`.
pub fn iterated_integral_path(
    word: &Word,
    inputs: &[SampledSignal],
    t: f64,
) -> Result<f64, SimulateError> {
    let (len, dt) = common_grid(inputs, t)?;
    let mut ii = IteratedIntegrals::new(inputs, len, dt);
    Ok(*ii.trajectory(word)?.last().unwrap_or(&1.0))
}

/// `E_η[u](t, 0)` for a single input `u` driving `x1`.
pub fn iterated_integral(word: &Word, u: &SampledSignal, t: f64) -> Result<f64, SimulateError> {
    iterated_integral_path(word, std::slice::from_ref(u), t)
}

/// `F_c[u](t) = Σ (c, η) E_η[u](t, 0)`, summed in graded-lex order.
pub fn evaluate_fliess_path<S: Scalar>(
    c: &Series<S>,
    inputs: &[SampledSignal],
    t: f64,
) -> Result<f64, SimulateError> {
    let (len, dt) = common_grid(inputs, t)?;
    let mut ii = IteratedIntegrals::new(inputs, len, dt);
    let mut y = 0.0;
    for (w, coeff) in c.terms() {
        y += coeff.as_f64() * ii.trajectory(w)?[len - 1];
    }
    Ok(y)
}

pub fn evaluate_fliess<S: Scalar>(
    c: &Series<S>,
    u: &SampledSignal,
    t: f64,
) -> Result<f64, SimulateError> {
    evaluate_fliess_path(c, std::slice::from_ref(u), t)
}

/// `F_c[u]` at every grid point of `u`.
pub fn evaluate_fliess_trajectory<S: Scalar>(
    c: &Series<S>,
    u: &SampledSignal,
) -> Result<SampledSignal, SimulateError> {
    let inputs = std::slice::from_ref(u);
    let mut ii = IteratedIntegrals::new(inputs, u.len(), u.dt);
    let mut y = vec![0.0; u.len()];
    for (w, coeff) in c.terms() {
        let a = coeff.as_f64();
        for (yi, e) in y.iter_mut().zip(ii.trajectory(w)?) {
            *yi += a * e;
        }
    }
    SampledSignal::new(u.dt, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `h(t, τ) = K I_0(2M √((t-τ)τ))`.
    Global,
    /// `h(t, τ) = K / √(1 - 4M²(t-τ)τ)`.
    Local,
}

/// Impulse response of the maximal palindromic linear series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub kind: KernelKind,
    pub k: f64,
    pub m: f64,
}

impl Kernel {
    pub fn new(kind: KernelKind, k: f64, m: f64) -> Result<Self, SimulateError> {
        if !(k > 0.0 && m > 0.0) {
            return Err(SimulateError::NonPositiveGrowth { k, m });
        }
        Ok(Self { kind, k, m })
    }

    /// `h(t, τ)`. The local kernel is infinite or NaN past its singularities.
    pub fn value(&self, t: f64, tau: f64) -> f64 {
        let s = ((t - tau) * tau).max(0.0);
        match self.kind {
            KernelKind::Global => self.k * bessel_i0(2.0 * self.m * s.sqrt(), TOL),
            KernelKind::Local => self.k / (1.0 - 4.0 * self.m * self.m * s).sqrt(),
        }
    }

    /// Real singularities `τ± = (t ± p)/2`, `p = √((Mt)² - 1)/M`, of the
    /// local kernel; `None` while `Mt < 1` or for the global kernel.
    pub fn singularities(&self, t: f64) -> Option<(f64, f64)> {
        let mt = self.m * t;
        if self.kind == KernelKind::Global || mt < 1.0 {
            return None;
        }
        let p = (mt * mt - 1.0).sqrt() / self.m;
        Some(((t - p) / 2.0, (t + p) / 2.0))
    }

    /// Truncated word-series form
    /// `K Σ_{n<n_terms} M^{2n} w_n (t-τ)^n τ^n / (n!)²`, `w_n = (2n)!` for the
    /// local kernel and 1 for the global one.
    pub fn word_series(&self, t: f64, tau: f64, n_terms: usize) -> f64 {
        let q = self.m * self.m * (t - tau) * tau;
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 0..n_terms {
            if n > 0 {
                let nf = n as f64;
                term *= q / (nf * nf);
                if self.kind == KernelKind::Local {
                    term *= (2.0 * nf - 1.0) * (2.0 * nf);
                }
            }
            sum += term;
        }
        self.k * sum
    }

    /// Truncated Bessel form
    /// `K Σ_{n<n_terms} w_n (M^a t)^n / n! J_n(2Mτ)` with `a = 1`, `w_n = 1`
    /// for the global kernel and `a = 2`, `w_n = (2n)!` for the local one.
    pub fn bessel_series(&self, t: f64, tau: f64, n_terms: usize) -> f64 {
        if n_terms == 0 {
            return 0.0;
        }
        let js = bessel_j_all(n_terms - 1, 2.0 * self.m * tau);
        let base = match self.kind {
            KernelKind::Global => self.m * t,
            KernelKind::Local => self.m * self.m * t,
        };
        let mut weight = 1.0;
        let mut sum = 0.0;
        for (n, jn) in js.iter().enumerate() {
            if n > 0 {
                let nf = n as f64;
                weight *= base / nf;
                if self.kind == KernelKind::Local {
                    weight *= (2.0 * nf - 1.0) * (2.0 * nf);
                }
            }
            sum += weight * jn;
        }
        self.k * sum
    }

    /// Refuses local kernels with `M t_end >= 1`, reporting `τ±`.
    pub fn check_horizon(&self, t_end: f64) -> Result<(), SimulateError> {
        if self.kind == KernelKind::Local && self.m * t_end >= 1.0 {
            let p = ((self.m * t_end).powi(2) - 1.0).max(0.0).sqrt() / self.m;
            return Err(SimulateError::LocalKernelSingular {
                m_t_end: self.m * t_end,
                tau_minus: (t_end - p) / 2.0,
                tau_plus: (t_end + p) / 2.0,
            });
        }
        Ok(())
    }
}

/// `y(t) = ∫_0^t h(t, τ) u(τ) dτ` on the grid of `u` up to `t_end`.
pub fn convolve_kernel(
    kernel: &Kernel,
    u: &SampledSignal,
    t_end: f64,
) -> Result<SampledSignal, SimulateError> {
    kernel.check_horizon(t_end)?;
    let last = u.index_of(t_end)?;
    let dt = u.dt;
    let y: Vec<f64> = (0..=last)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * dt;
            let f: Vec<f64> = (0..=i)
                .map(|j| kernel.value(t, j as f64 * dt) * u.values[j])
                .collect();
            simpson(&f, dt)
        })
        .collect();
    SampledSignal::new(dt, y)
}

/// `τ ↦ h(t, τ)` on `n_intervals + 1` equally spaced points of `[0, t]`.
pub fn kernel_profile(
    kernel: &Kernel,
    t: f64,
    n_intervals: usize,
) -> Result<SampledSignal, SimulateError> {
    kernel.check_horizon(t)?;
    let dt = t / n_intervals.max(1) as f64;
    SampledSignal::new(
        dt,
        (0..=n_intervals.max(1))
            .map(|i| kernel.value(t, i as f64 * dt))
            .collect(),
    )
}

/// Which truncated expansion [`kernel_series_equivalence`] compares against
/// the closed-form kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSeriesForm {
    Bessel,
    WordSeries,
}

/// `sup_τ |series(t, τ) - h(t, τ)|` over `n_grid + 1` equally spaced `τ` in
/// `[0, t]`.
pub fn kernel_series_equivalence(
    kernel: &Kernel,
    form: KernelSeriesForm,
    t: f64,
    n_terms: usize,
    n_grid: usize,
) -> f64 {
    (0..=n_grid)
        .map(|i| {
            let tau = t * i as f64 / n_grid.max(1) as f64;
            let series = match form {
                KernelSeriesForm::Bessel => kernel.bessel_series(t, tau, n_terms),
                KernelSeriesForm::WordSeries => kernel.word_series(t, tau, n_terms),
            };
            (series - kernel.value(t, tau)).abs()
        })
        .fold(0.0, f64::max)
}

/// Output weight `C_n(t)`: `K (Mt)^n / n!`, times `(2n)!` for the local kernel.
pub fn output_weights(kernel: &Kernel, n_max: usize, t: f64) -> Vec<f64> {
    let mt = kernel.m * t;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut w = kernel.k;
    for n in 0..=n_max {
        if n > 0 {
            w *= mt / n as f64;
        }
        let factor = match kernel.kind {
            KernelKind::Global => 1.0,
            KernelKind::Local => factorial_q(2 * n).as_f64(),
        };
        out.push(w * factor);
    }
    out
}

/// States `z_n(t) = ∫_0^t J_n(2Mτ) u(τ) dτ` and output `y = Σ C_n z_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LtvRun {
    pub z: Vec<SampledSignal>,
    pub y: SampledSignal,
}

/// Truncated time-varying realization driven by `u` from zero state.
pub fn ltv_realize(
    kernel: &Kernel,
    n_max: usize,
    u: &SampledSignal,
) -> Result<LtvRun, SimulateError> {
    let dt = u.dt;
    let bessel: Vec<Vec<f64>> = (0..u.len())
        .into_par_iter()
        .map(|i| bessel_j_all(n_max, 2.0 * kernel.m * i as f64 * dt))
        .collect();
    let z: Vec<SampledSignal> = (0..=n_max)
        .map(|n| {
            let f: Vec<f64> = bessel
                .iter()
                .zip(&u.values)
                .map(|(js, ui)| js[n] * ui)
                .collect();
            SampledSignal::new(dt, cumulative_trapezoid(&f, dt))
        })
        .collect::<Result<_, _>>()?;
    let y = (0..u.len())
        .map(|i| {
            output_weights(kernel, n_max, i as f64 * dt)
                .iter()
                .zip(&z)
                .map(|(c, zn)| c * zn.values[i])
                .sum()
        })
        .collect();
    Ok(LtvRun {
        z,
        y: SampledSignal::new(dt, y)?,
    })
}

/// `Σ_n C_n(t) J_n(2Mt)`, the coefficient of `u(t)` in `ẏ(t)`.
pub fn instantaneous_gain(kernel: &Kernel, n_max: usize, t: f64) -> f64 {
    let js = bessel_j_all(n_max, 2.0 * kernel.m * t);
    output_weights(kernel, n_max, t)
        .iter()
        .zip(&js)
        .map(|(c, j)| c * j)
        .sum()
}
