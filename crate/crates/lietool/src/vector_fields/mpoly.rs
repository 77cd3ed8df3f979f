//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::VfError;
use crate::algebra_core::{parse_rational, Rational};

/// Map from exponent vectors (all of length `nvars`) to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

fn degree_of(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// x_i, 0-based.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        assert_eq!(e.len(), self.nvars, "exponent length");
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| degree_of(e)).max()
    }

    pub fn truncate(&self, max_degree: u32) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(e, _)| degree_of(e) <= max_degree).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> MPoly {
        if k.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    /// Product keeping only monomials of degree <= `max_degree`.
    pub fn mul_truncated(&self, o: &MPoly, max_degree: u32) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (a, x) in &self.terms {
            let da = degree_of(a);
            for (b, y) in &o.terms {
                if da + degree_of(b) > max_degree {
                    continue;
                }
                let e = a.iter().zip(b).map(|(i, j)| i + j).collect();
                out.add_term(e, x * y);
            }
        }
        out
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        self.mul_truncated(o, u32::MAX)
    }

    /// Partial derivative along x_i.
    pub fn diff(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            out.add_term(f, c * Rational::from_integer(e[i].into()));
        }
        out
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| crate::algebra_core::to_f64(c) * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Parses sums like "x3^2 - 2*x1^2*x4 + 1/2*x1" over variables x1..x_nvars.
    pub fn parse(nvars: usize, text: &str) -> Result<MPoly, VfError> {
        let bad = |m: &str| VfError::BadPolynomial(format!("{text}: {m}"));
        let mut out = MPoly::zero(nvars);
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() || s == "0" {
            return Ok(out);
        }
        let mut chunks = Vec::new();
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 {
                chunks.push(&s[start..i]);
                start = i;
            }
        }
        chunks.push(&s[start..]);
        for chunk in chunks {
            let (sign, body) = match chunk.as_bytes().first() {
                Some(b'-') => (-Rational::one(), &chunk[1..]),
                Some(b'+') => (Rational::one(), &chunk[1..]),
                _ => (Rational::one(), chunk),
            };
            if body.is_empty() {
                return Err(bad("empty term"));
            }
            let mut c = sign;
            let mut e = vec![0u32; nvars];
            for factor in body.split('*') {
                if let Some(v) = factor.strip_prefix('x') {
                    let (idx, pow) = match v.split_once('^') {
                        Some((i, p)) => (i, p.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                        None => (v, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| bad("bad variable index"))?;
                    if idx == 0 || idx > nvars {
                        return Err(bad("variable out of range"));
                    }
                    e[idx - 1] += pow;
                } else {
                    c *= parse_rational(factor).map_err(|_| bad("bad coefficient"))?;
                }
            }
            out.add_term(e, c);
        }
        Ok(out)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{k}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}
