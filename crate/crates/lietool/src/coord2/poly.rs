//! Exact piecewise polynomials on a partition of [0, t].

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra_core::{to_f64, Rational};

/// Dense coefficients c[i] of x^i; trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        Poly(vec![c]).trimmed()
    }

    pub fn from_coeffs(c: Vec<Rational>) -> Self {
        Poly(c).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let mut c = vec![Rational::zero(); n];
        for (i, x) in self.0.iter().enumerate() {
            c[i] += x;
        }
        for (i, x) in o.0.iter().enumerate() {
            c[i] += x;
        }
        Poly(c).trimmed()
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        Poly(self.0.iter().map(|x| x * k).collect()).trimmed()
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, x) in self.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.0.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        Poly(c).trimmed()
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Poly {
        let mut c = Vec::with_capacity(self.0.len() + 1);
        c.push(Rational::zero());
        for (i, x) in self.0.iter().enumerate() {
            c.push(x / Rational::from_integer((i as i64 + 1).into()));
        }
        Poly(c).trimmed()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }
}

/// Piece i lives on [breaks[i], breaks[i+1]] and is a polynomial in the local
/// variable s - breaks[i].
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePoly {
    breaks: Arc<Vec<Rational>>,
    pieces: Vec<Poly>,
}

impl PiecewisePoly {
    /// `breaks` must start at 0 and increase strictly; one piece per interval.
    pub fn new(breaks: Vec<Rational>, pieces: Vec<Poly>) -> Option<Self> {
        if breaks.len() < 2
            || pieces.len() + 1 != breaks.len()
            || !breaks[0].is_zero()
            || breaks.windows(2).any(|w| w[0] >= w[1])
        {
            return None;
        }
        Some(PiecewisePoly {
            breaks: Arc::new(breaks),
            pieces,
        })
    }

    pub fn constant_on(breaks: Arc<Vec<Rational>>, c: Rational) -> Self {
        let n = breaks.len() - 1;
        PiecewisePoly {
            breaks,
            pieces: vec![Poly::constant(c); n],
        }
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn shared_breaks(&self) -> Arc<Vec<Rational>> {
        self.breaks.clone()
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn horizon(&self) -> &Rational {
        self.breaks.last().expect("nonempty partition")
    }

    pub fn is_piecewise_constant(&self) -> bool {
        self.pieces.iter().all(|p| p.0.len() <= 1)
    }

    /// Value of piece i at the local coordinate x.
    fn piece_value(&self, i: usize, x: &Rational) -> Rational {
        self.pieces[i].eval(x)
    }

    fn piece_len(&self, i: usize) -> Rational {
        &self.breaks[i + 1] - &self.breaks[i]
    }

    /// Value at s (right-continuous at interior breakpoints, left limit at t).
    pub fn eval(&self, s: &Rational) -> Rational {
        let n = self.pieces.len();
        let i = (0..n).rfind(|&i| &self.breaks[i] <= s).unwrap_or(0);
        self.piece_value(i, &(s - &self.breaks[i]))
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        let n = self.pieces.len();
        let i = (0..n).rfind(|&i| to_f64(&self.breaks[i]) <= s).unwrap_or(0);
        self.pieces[i].eval_f64(s - to_f64(&self.breaks[i]))
    }

    /// Value at the horizon.
    pub fn end_value(&self) -> Rational {
        let last = self.pieces.len() - 1;
        self.piece_value(last, &self.piece_len(last))
    }

    /// Restates both functions on the union of their partitions.
    pub fn align(&self, o: &PiecewisePoly) -> (PiecewisePoly, PiecewisePoly) {
        if Arc::ptr_eq(&self.breaks, &o.breaks) || self.breaks == o.breaks {
            let shared = self.breaks.clone();
            return (
                self.clone(),
                PiecewisePoly {
                    breaks: shared,
                    pieces: o.pieces.clone(),
                },
            );
        }
        let mut all: Vec<Rational> = self.breaks.iter().chain(o.breaks.iter()).cloned().collect();
        all.sort();
        all.dedup();
        let end = self.horizon().min(o.horizon()).clone();
        all.retain(|b| *b <= end);
        let shared = Arc::new(all);
        (self.refine(&shared), o.refine(&shared))
    }

    fn refine(&self, breaks: &Arc<Vec<Rational>>) -> PiecewisePoly {
        let mut pieces = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let i = (0..self.pieces.len()).rfind(|&i| self.breaks[i] <= w[0]).unwrap_or(0);
            let shift = &w[0] - &self.breaks[i];
            pieces.push(taylor_shift(&self.pieces[i], &shift));
        }
        PiecewisePoly {
            breaks: breaks.clone(),
            pieces,
        }
    }

    pub fn mul(&self, o: &PiecewisePoly) -> PiecewisePoly {
        let (a, b) = self.align(o);
        let pieces = a.pieces.iter().zip(&b.pieces).map(|(p, q)| p.mul(q)).collect();
        PiecewisePoly {
            breaks: a.breaks,
            pieces,
        }
    }

    pub fn add(&self, o: &PiecewisePoly) -> PiecewisePoly {
        let (a, b) = self.align(o);
        let pieces = a.pieces.iter().zip(&b.pieces).map(|(p, q)| p.add(q)).collect();
        PiecewisePoly {
            breaks: a.breaks,
            pieces,
        }
    }

    pub fn scale(&self, k: &Rational) -> PiecewisePoly {
        PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(|p| p.scale(k)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> PiecewisePoly {
        let mut out = PiecewisePoly::constant_on(self.breaks.clone(), Rational::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// s -> integral of self over [0, s]; continuous.
    pub fn primitive(&self) -> PiecewisePoly {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut acc = Rational::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let q = p.antiderivative().add(&Poly::constant(acc.clone()));
            acc = q.eval(&self.piece_len(i));
            pieces.push(q);
        }
        PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces,
        }
    }

    /// Integral over [0, t].
    pub fn integral(&self) -> Rational {
        let mut acc = Rational::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            acc += p.antiderivative().eval(&self.piece_len(i));
        }
        acc
    }

    /// Piece index and local bounds, for numerical quadrature.
    pub fn intervals_f64(&self) -> Vec<(f64, f64)> {
        self.breaks.windows(2).map(|w| (to_f64(&w[0]), to_f64(&w[1]))).collect()
    }

    /// Samples on a uniform grid of n intervals (values at n+1 nodes).
    pub fn sample(&self, n: usize) -> Vec<f64> {
        let t = to_f64(self.horizon());
        (0..=n).map(|i| self.eval_f64(t * i as f64 / n as f64)).collect()
    }
}

/// p(x + a) as a polynomial in x.
fn taylor_shift(p: &Poly, a: &Rational) -> Poly {
    if a.is_zero() {
        return p.clone();
    }
    let mut out = Poly::zero();
    let base = Poly(vec![a.clone(), Rational::one()]);
    for c in p.0.iter().rev() {
        out = out.mul(&base).add(&Poly::constant(c.clone()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::{int, rat};

    fn unit_on(breaks: &[Rational], vals: &[i64]) -> PiecewisePoly {
        PiecewisePoly::new(breaks.to_vec(), vals.iter().map(|&v| Poly::constant(int(v))).collect()).unwrap()
    }

    #[test]
    fn primitives_of_constant() {
        let u = unit_on(&[int(0), int(1)], &[1]);
        let u1 = u.primitive();
        assert_eq!(u1.eval(&rat(1, 3)), rat(1, 3));
        assert_eq!(u1.primitive().end_value(), rat(1, 2));
    }

    #[test]
    fn symmetric_bang_bang_has_zero_primitive_at_end() {
        let u = unit_on(&[int(0), rat(1, 2), int(1)], &[1, -1]);
        assert_eq!(u.primitive().end_value(), int(0));
        assert_eq!(u.primitive().eval(&rat(1, 2)), rat(1, 2));
    }

    #[test]
    fn products_across_partitions() {
        let a = unit_on(&[int(0), rat(1, 2), int(1)], &[1, 2]);
        let b = unit_on(&[int(0), rat(1, 3), int(1)], &[3, 5]);
        let p = a.mul(&b);
        assert_eq!(p.breaks().len(), 4);
        assert_eq!(p.integral(), rat(1, 3) * int(3) + rat(1, 6) * int(5) + rat(1, 2) * int(10));
        let x = a.primitive();
        let (xr, _) = x.align(&b);
        assert_eq!(xr.eval(&rat(2, 5)), x.eval(&rat(2, 5)));
    }
}
