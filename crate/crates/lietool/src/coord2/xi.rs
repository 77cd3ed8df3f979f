//! Coordinates of the second kind and Chen coefficients.

use std::collections::HashMap;
use std::fmt;

use num_traits::One;

use super::poly::PiecewisePoly;
use super::signal::{ControlSignal, Sampled, Signal};
use super::Coord2Error;
use crate::algebra_core::{factorial, to_f64, BracketTree, Generator, Rational, Word};
use crate::hall_bstar::is_hall;

#[derive(Clone, Debug, PartialEq)]
pub enum XiValue {
    Exact(Rational),
    /// Trapezoid value with a Richardson error estimate.
    Approx { value: f64, error: f64 },
}

impl XiValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            XiValue::Exact(q) => to_f64(q),
            XiValue::Approx { value, .. } => *value,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            XiValue::Exact(q) => Some(q),
            XiValue::Approx { .. } => None,
        }
    }
}

impl fmt::Display for XiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XiValue::Exact(q) => write!(f, "{q}"),
            XiValue::Approx { value, error } => write!(f, "{value:.12e} +/- {error:.2e}"),
        }
    }
}

/// b = ad^m_{b1}(b2) with m maximal.
pub fn ad_factorization(b: &BracketTree) -> Option<(BracketTree, u32, BracketTree)> {
    let b1 = b.left()?.clone();
    let mut m = 0;
    let mut t = b.clone();
    while let Some((l, r)) = t.children() {
        if *l != b1 {
            break;
        }
        m += 1;
        t = r.clone();
    }
    Some((b1, m, t))
}

/// Memoized ξ_b(s) and its derivative, as functions of time, for one control.
pub struct XiEvaluator<S: Signal> {
    u: S,
    memo: HashMap<BracketTree, (S, S)>,
}

impl<S: Signal> XiEvaluator<S> {
    pub fn new(u: S) -> Self {
        XiEvaluator { u, memo: HashMap::new() }
    }

    pub fn control(&self) -> &S {
        &self.u
    }

    /// (ξ_b, dξ_b/ds) as signals; `b` must be in B*.
    pub fn functions(&mut self, b: &BracketTree) -> (S, S) {
        if let Some(v) = self.memo.get(b) {
            return v.clone();
        }
        let out = match b.generator() {
            Some(Generator::X0) => {
                let one = self.u.one_like();
                (one.primitive(), one)
            }
            Some(Generator::X1) => (self.u.primitive(), self.u.clone()),
            None => {
                let (b1, m, b2) = ad_factorization(b).expect("bracket");
                let (x1, _) = self.functions(&b1);
                let (_, d2) = self.functions(&b2);
                let mut dot = d2;
                for _ in 0..m {
                    dot = dot.mul(&x1);
                }
                let dot = dot.scale(&factorial(m).recip());
                (dot.primitive(), dot)
            }
        };
        self.memo.insert(b.clone(), out.clone());
        out
    }

    pub fn value(&mut self, b: &BracketTree) -> S::Value {
        self.functions(b).0.end_value()
    }
}

fn check_hall(b: &BracketTree) -> Result<(), Coord2Error> {
    if is_hall(b) {
        Ok(())
    } else {
        Err(Coord2Error::NotHall(b.canonical()))
    }
}

fn richardson(fine: f64, coarse: Option<f64>) -> XiValue {
    let error = coarse.map(|c| (fine - c).abs() / 3.0).unwrap_or(f64::NAN);
    XiValue::Approx { value: fine, error }
}

fn sampled_xi(b: &BracketTree, s: &Sampled) -> f64 {
    XiEvaluator::new(s.clone()).value(b)
}

/// ξ_b(t, u) by the defining recursion.
pub fn xi(b: &BracketTree, u: &ControlSignal) -> Result<XiValue, Coord2Error> {
    check_hall(b)?;
    Ok(match u {
        ControlSignal::PiecewisePoly(p) => XiValue::Exact(XiEvaluator::new(p.clone()).value(b)),
        ControlSignal::Sampled(s) => richardson(sampled_xi(b, s), s.coarsen().map(|c| sampled_xi(b, &c))),
    })
}

/// ξ_b(s, u) for s in [0, t], exact.
pub fn xi_function(b: &BracketTree, u: &PiecewisePoly) -> Result<PiecewisePoly, Coord2Error> {
    check_hall(b)?;
    Ok(XiEvaluator::new(u.clone()).functions(b).0)
}

fn chen_generic<S: Signal>(w: &Word, u: &S) -> S::Value {
    let mut c = u.one_like();
    for g in w.letters() {
        c = match g {
            Generator::X0 => c.primitive(),
            Generator::X1 => c.mul(u).primitive(),
        };
    }
    c.end_value()
}

/// Iterated integral attached to `w`; the last letter is the outermost integral.
pub fn chen_coefficient(w: &Word, u: &ControlSignal) -> XiValue {
    match u {
        ControlSignal::PiecewisePoly(p) => {
            if w.is_empty() {
                return XiValue::Exact(Rational::one());
            }
            XiValue::Exact(chen_generic(w, p))
        }
        ControlSignal::Sampled(s) => {
            if w.is_empty() {
                return XiValue::Approx { value: 1.0, error: 0.0 };
            }
            richardson(chen_generic(w, s), s.coarsen().map(|c| chen_generic(w, &c)))
        }
    }
}
