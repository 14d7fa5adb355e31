//! Parsing of `--K` arguments.
//!
//! A value is either a polynomial in `x1..x{n+1}` or a path to a file. Files
//! ending in `.csv` hold a colatitude profile: one sample per line (or a
//! `theta,value` pair), uniform in `θ` from the north pole to the south pole.
//! Any other file holds a polynomial expression.

use std::path::Path;

use sigmak_core::numerics::Poly;
use sigmak_core::reduction::AxisymK;
use sigmak_core::{Error, Result};

/// Largest `j` with `xj` or `x_j` in the expression.
pub fn max_variable(src: &str) -> usize {
    let b = src.as_bytes();
    let mut best = 0;
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'x' {
            let mut j = i + 1;
            if j < b.len() && b[j] == b'_' {
                j += 1;
            }
            let start = j;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if let Ok(v) = src[start..j].parse::<usize>() {
                best = best.max(v);
            }
            i = j.max(i + 1);
        } else {
            i += 1;
        }
    }
    best
}

enum Source {
    Expr(String),
    Profile(Vec<f64>),
}

fn read(spec: &str) -> Result<Source> {
    let path = Path::new(spec);
    if !path.is_file() {
        return Ok(Source::Expr(spec.to_string()));
    }
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return parse_profile(&text).map(Source::Profile);
    }
    Ok(Source::Expr(text.trim().to_string()))
}

fn parse_profile(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            // a header line is allowed before the first sample
            Err(_) if out.is_empty() => continue,
            Err(_) => return Err(Error::Parse(format!("line {}: {line:?} is not a sample", no + 1))),
        }
    }
    Ok(out)
}

/// Dimension `n` of the sphere for a polynomial spec; `n` wins when given.
pub fn sphere_dim(src: &str, n: Option<usize>) -> Result<usize> {
    match n {
        Some(n) => Ok(n),
        None => match max_variable(src) {
            0 => Err(Error::Domain("cannot infer n from K; pass --n".into())),
            v => Ok(v - 1),
        },
    }
}

/// A polynomial `K` on `S^n`, read from the argument or a file.
pub fn poly(spec: &str, n: Option<usize>) -> Result<(Poly, usize)> {
    match read(spec)? {
        Source::Expr(src) => {
            let n = sphere_dim(&src, n)?;
            Ok((Poly::parse(&src, n + 1)?, n))
        }
        Source::Profile(_) => Err(Error::Domain("this command needs a polynomial K, not a profile".into())),
    }
}

/// An axisymmetric `K(θ)` on `S^n`.
pub fn axisym(spec: &str, n: usize) -> Result<AxisymK> {
    match read(spec)? {
        Source::Expr(src) => AxisymK::from_poly(&Poly::parse(&src, n + 1)?),
        Source::Profile(values) => AxisymK::from_profile(&values),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variables_and_profiles() {
        assert_eq!(max_variable("2 + x5"), 5);
        assert_eq!(max_variable("x_12^2 - 3*x2"), 12);
        assert_eq!(max_variable("3"), 0);
        assert_eq!(parse_profile("theta,K\n0,1.5\n1.57,1.4\n3.14,1.5\n").unwrap(), vec![1.5, 1.4, 1.5]);
        assert_eq!(parse_profile("# c\n1\n2\n").unwrap(), vec![1.0, 2.0]);
        assert!(parse_profile("1\nnope\n").is_err());
    }

    #[test]
    fn axisym_from_expression() {
        let k = axisym("1.5 + 0.1*x5^2", 4).unwrap();
        assert!((k.value(0.0) - 1.6).abs() < 1e-12);
        assert!(axisym("1 + x1", 4).is_err());
    }
}
