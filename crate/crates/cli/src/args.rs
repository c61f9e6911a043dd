//! Flag value parsers shared by the subcommands.

use clap::Args;
use compacton::dsl::{expand_alias, parse_equation, EquationAst};
use compacton::exec::Execution;
use compacton::similarity::Bindings;

use crate::error::Result;
use crate::output::Run;

/// `min:max:n`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Span {
    pub fn values(&self) -> Vec<f64> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n).map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

pub fn parse_span(s: &str) -> std::result::Result<Span, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || format!("expected min:max:n, got '{s}'");
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(min.is_finite() && max.is_finite()) || n == 0 {
        return Err(bad());
    }
    Ok(Span { min, max, n })
}

/// `a:b` with `a < b`.
pub fn parse_interval(s: &str) -> std::result::Result<(f64, f64), String> {
    let bad = || format!("expected a:b with a < b, got '{s}'");
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("'{v}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("parameter '{k}' must be finite"));
    }
    Ok((k.trim().to_string(), v))
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Bind a named equation parameter (repeatable).
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
}

impl ParamArgs {
    pub fn bindings(&self) -> Bindings {
        self.params.iter().cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct JobArgs {
    /// Worker threads; 1 runs sequentially. Results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl JobArgs {
    pub fn execution(&self) -> Execution {
        match self.jobs {
            Some(1) => Execution::Sequential,
            _ => Execution::Parallel,
        }
    }
}

/// Expand an alias, parse, and record the canonical text and bindings as
/// run inputs.
pub fn load_equation(run: &mut Run, text: &str, bindings: &Bindings) -> Result<(String, EquationAst)> {
    let equation = expand_alias(text)?;
    let ast = parse_equation(&equation)?;
    run.input("equation", equation.as_bytes());
    if !bindings.is_empty() {
        let b: Vec<String> = bindings.iter().map(|(k, v)| format!("{k}={v:e}")).collect();
        run.input("params", b.join(",").as_bytes());
    }
    Ok((equation, ast))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_values_include_both_ends() {
        let s = parse_span("0:5:11").unwrap();
        let v = s.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[10], 5.0);
        assert!(parse_span("0:5").is_err());
        assert!(parse_span("0:5:0").is_err());
    }

    #[test]
    fn params_and_intervals() {
        assert_eq!(parse_param("eps=0.1").unwrap(), ("eps".to_string(), 0.1));
        assert!(parse_param("eps").is_err());
        assert_eq!(parse_interval("-2:3").unwrap(), (-2.0, 3.0));
        assert!(parse_interval("3:-2").is_err());
    }
}
