//! Multivariate polynomials with analytic derivatives, and a small parser.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/' number)? factor)*
//! factor := ('+' | '-') factor | atom ('^' uint)?
//! atom   := number | 'x' uint | 'x_' uint | '(' expr ')'
//! ```
//!
//! Variables are 1-based: `x1` is the first coordinate. Division is only by
//! numeric constants.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse polynomial in `dim` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub dim: usize,
    /// Exponent vector to coefficient, zero coefficients dropped.
    pub terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// The coordinate `x_{i+1}` (0-based index `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        let mut p = Self::zero(dim);
        p.add_term(e, 1.0);
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: f64) {
        assert_eq!(exps.len(), self.dim);
        let entry = self.terms.entry(exps.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.dim, 1.0), |acc, _| acc.mul(self))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Whether only the last variable appears.
    pub fn depends_only_on_last(&self) -> bool {
        self.terms.keys().all(|e| e[..self.dim - 1].iter().all(|&p| p == 0))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(e, c)| c * e.iter().zip(x).map(|(&p, &v)| v.powi(p as i32)).product::<f64>()).sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for (e, c) in &self.terms {
            for i in 0..self.dim {
                if e[i] == 0 {
                    continue;
                }
                let mut prod = c * e[i] as f64;
                for (j, (&p, &v)) in e.iter().zip(x).enumerate() {
                    let p = if j == i { p - 1 } else { p };
                    prod *= v.powi(p as i32);
                }
                g[i] += prod;
            }
        }
        g
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.dim;
        let mut h = DMatrix::zeros(d, d);
        for (e, c) in &self.terms {
            for i in 0..d {
                for j in i..d {
                    let mut pe = e.clone();
                    let mut coef = *c;
                    if pe[i] == 0 {
                        continue;
                    }
                    coef *= pe[i] as f64;
                    pe[i] -= 1;
                    if pe[j] == 0 {
                        continue;
                    }
                    coef *= pe[j] as f64;
                    pe[j] -= 1;
                    let v = coef * pe.iter().zip(x).map(|(&p, &v)| v.powi(p as i32)).product::<f64>();
                    h[(i, j)] += v;
                    if i != j {
                        h[(j, i)] += v;
                    }
                }
            }
        }
        h
    }

    /// Derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * e[i] as f64);
            }
        }
        out
    }

    /// Random polynomial of total degree at most `degree` with coefficients
    /// uniform in `[-scale, scale]`.
    pub fn random(dim: usize, degree: u32, scale: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Self::zero(dim);
        let mut exps = vec![0u32; dim];
        loop {
            if exps.iter().sum::<u32>() <= degree {
                out.add_term(exps.clone(), rng.gen_range(-scale..scale));
            }
            // odometer over [0, degree]^dim
            let mut i = 0;
            loop {
                if i == dim {
                    return out;
                }
                exps[i] += 1;
                if exps[i] <= degree {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }

    /// Parses an expression in the variables `x1..x{dim}`.
    pub fn parse(src: &str, dim: usize) -> Result<Self> {
        let mut p = Parser { s: src.as_bytes(), pos: 0, dim };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(Error::Parse(format!("unexpected input at byte {} of {src:?}", p.pos)));
        }
        Ok(out)
    }
}

/// Flattened form of a [`Poly`] for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    dim: usize,
    stride: usize,
    coefs: Vec<f64>,
    exps: Vec<u8>,
}

impl CompiledPoly {
    pub fn new(p: &Poly) -> Self {
        let stride = p.degree() as usize + 1;
        let mut coefs = Vec::with_capacity(p.terms.len());
        let mut exps = Vec::with_capacity(p.terms.len() * p.dim);
        for (e, c) in &p.terms {
            coefs.push(*c);
            exps.extend(e.iter().map(|&v| v as u8));
        }
        Self { dim: p.dim, stride, coefs, exps }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut stack = [0.0; 128];
        let mut heap;
        let need = self.dim * self.stride;
        let table: &mut [f64] = if need <= stack.len() {
            &mut stack[..need]
        } else {
            heap = vec![0.0; need];
            &mut heap
        };
        for (i, &xi) in x.iter().enumerate().take(self.dim) {
            let row = &mut table[i * self.stride..(i + 1) * self.stride];
            row[0] = 1.0;
            for p in 1..self.stride {
                row[p] = row[p - 1] * xi;
            }
        }
        let mut total = 0.0;
        for (t, c) in self.coefs.iter().enumerate() {
            let e = &self.exps[t * self.dim..(t + 1) * self.dim];
            let mut v = *c;
            for (i, &p) in e.iter().enumerate() {
                if p != 0 {
                    v *= table[i * self.stride + p as usize];
                }
            }
            total += v;
        }
        total
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?.scale(-1.0));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.factor()?;
                    if d.degree() != 0 {
                        return Err(Error::Parse("division by a non-constant".into()));
                    }
                    let c = d.eval(&vec![0.0; self.dim]);
                    if c == 0.0 {
                        return Err(Error::Parse("division by zero".into()));
                    }
                    acc = acc.scale(1.0 / c);
                }
                // implicit multiplication, e.g. "3x1" or "2(x1+1)"
                Some(c) if c == b'x' || c == b'(' || c.is_ascii_digit() || c == b'.' => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.scale(-1.0))
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            _ => {
                let base = self.atom()?;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let k = self.uint()?;
                    Ok(base.pow(k as u32))
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn uint(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii")
            .parse()
            .map_err(|_| Error::Parse(format!("expected an integer at byte {start}")))
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Parse(format!("missing ')' at byte {}", self.pos)));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                if self.s.get(self.pos) == Some(&b'_') {
                    self.pos += 1;
                }
                let i = self.uint()?;
                if i == 0 || i > self.dim {
                    return Err(Error::Parse(format!("variable x{i} outside x1..x{}", self.dim)));
                }
                Ok(Poly::var(self.dim, i - 1))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'.') {
                    self.pos += 1;
                }
                if self.pos < self.s.len() && (self.s[self.pos] == b'e' || self.s[self.pos] == b'E') {
                    self.pos += 1;
                    if self.pos < self.s.len() && (self.s[self.pos] == b'-' || self.s[self.pos] == b'+') {
                        self.pos += 1;
                    }
                    while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                }
                let t = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                let v: f64 = t.parse().map_err(|_| Error::Parse(format!("bad number {t:?}")))?;
                Ok(Poly::constant(self.dim, v))
            }
            other => Err(Error::Parse(format!("unexpected {:?} at byte {}", other.map(|c| c as char), self.pos))),
        }
    }
}
