//! Input signals named on the command line: `const(c)`, `sin(w)`, `ramp(a)`,
//! `expsin(w)`, or a path to a `t,value` CSV file.

use std::path::Path;

use anyhow::{bail, Context, Result};
use fliess_core::SampledSignal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputSpec {
    /// `u(t) = c`
    Const(f64),
    /// `u(t) = sin(w t)`
    Sin(f64),
    /// `u(t) = a t`
    Ramp(f64),
    /// `u(t) = e^t sin(w t)`
    ExpSin(f64),
}

impl InputSpec {
    pub fn parse(text: &str) -> Result<Option<Self>> {
        let text = text.trim();
        let (name, arg) = match text.split_once('(') {
            Some((name, rest)) => {
                let Some(arg) = rest.strip_suffix(')') else {
                    bail!("input {text:?}: missing closing parenthesis");
                };
                let value: f64 = arg
                    .trim()
                    .parse()
                    .with_context(|| format!("input {text:?}: bad parameter {arg:?}"))?;
                (name.trim(), Some(value))
            }
            None => (text, None),
        };
        let spec = match name {
            "const" => Self::Const(arg.unwrap_or(1.0)),
            "sin" => Self::Sin(arg.unwrap_or(1.0)),
            "ramp" => Self::Ramp(arg.unwrap_or(1.0)),
            "expsin" => Self::ExpSin(arg.unwrap_or(2.0 * std::f64::consts::PI)),
            _ => return Ok(None),
        };
        Ok(Some(spec))
    }

    pub fn eval(self, t: f64) -> f64 {
        match self {
            Self::Const(c) => c,
            Self::Sin(w) => (w * t).sin(),
            Self::Ramp(a) => a * t,
            Self::ExpSin(w) => t.exp() * (w * t).sin(),
        }
    }
}

/// Resolves `--input`: a named signal sampled on `[0, t_end]`, or a CSV file
/// (which fixes its own grid).
pub fn load_input(spec: &str, dt: f64, t_end: f64) -> Result<SampledSignal> {
    if let Some(named) = InputSpec::parse(spec)? {
        return SampledSignal::from_fn(dt, t_end, |t| named.eval(t))
            .map_err(fliess_core::Error::from)
            .map_err(Into::into);
    }
    let path = Path::new(spec);
    if !path.exists() {
        bail!("input {spec:?} is neither const/sin/ramp/expsin(..) nor an existing file");
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
    SampledSignal::from_csv(&text)
        .map_err(fliess_core::Error::from)
        .with_context(|| format!("input file {spec}"))
}
