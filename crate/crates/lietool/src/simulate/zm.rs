//! Truncated representation Z_M(0) = sum eta_b f_b(0) and the pure variant with xi.

use num_traits::Zero;
use serde::Serialize;

use super::integrate::integrate;
use super::SimError;
use crate::algebra_core::{rat, rational_serde, to_f64, Rational};
use crate::conditions::WeightBound;
use crate::coord2::{xi, ControlSignal, PiecewisePoly, Poly};
use crate::expansions::{interaction_log, MAX_CUTOFF};
use crate::hall_bstar::{basis_layer, HallElement};
use crate::vector_fields::{zoo, Evaluator, SystemDef};

/// B* elements with n1 in 1..=m, length <= max_len and a nonzero value, with that value.
/// n0 is further limited by the weight bound when the drift admits one.
pub fn nonzero_values(ev: &Evaluator, m: u32, max_len: u32) -> Vec<(HallElement, Vec<Rational>)> {
    let bound = WeightBound::new(ev.system());
    let mut out = Vec::new();
    for n1 in 1..=m.min(max_len) {
        let mut top = i64::from(max_len - n1);
        if let Some(w) = &bound {
            top = top.min(w.n0_max(n1));
        }
        for n0 in 0..=top.max(-1) {
            for h in basis_layer(n1, n0 as u32).iter() {
                let v = ev.eval_bracket(h.tree());
                if v.iter().any(|x| !x.is_zero()) {
                    out.push((h.clone(), v));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ZmTerm {
    pub bracket: String,
    #[serde(with = "rational_serde")]
    pub eta: Rational,
    #[serde(with = "rational_serde::vec")]
    pub value: Vec<Rational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZmReport {
    pub m: u32,
    pub length_cutoff: usize,
    pub state: Vec<f64>,
    pub terms: Vec<ZmTerm>,
    /// Pieces of the piecewise-constant surrogate when the control was not piecewise constant.
    pub surrogate_pieces: Option<usize>,
    /// Change of the output at the last refinement.
    pub refinement_change: Option<f64>,
    /// Size of the outermost length shell, a proxy for the neglected tail.
    pub tail_estimate: f64,
}

fn z_exact(ev: &Evaluator, u: &ControlSignal, m: u32, cutoff: usize) -> Result<(Vec<Rational>, Vec<ZmTerm>, f64), SimError> {
    let d = ev.system().dim();
    let mut z = vec![Rational::zero(); d];
    let mut terms = Vec::new();
    let mut tail = 0.0;
    let values = nonzero_values(ev, m, cutoff as u32);
    if values.is_empty() {
        return Ok((z, terms, 0.0));
    }
    let eta = interaction_log(u, cutoff)?;
    for (h, v) in values {
        let e = eta.get_hall(&h);
        if e.is_zero() {
            continue;
        }
        for (zi, vi) in z.iter_mut().zip(&v) {
            *zi += &e * vi;
        }
        if h.tree().len() as usize == cutoff {
            tail += to_f64(&e).abs() * v.iter().map(|x| to_f64(x).abs()).fold(0.0, f64::max);
        }
        terms.push(ZmTerm {
            bracket: h.label(),
            eta: e,
            value: v,
        });
    }
    Ok((z, terms, tail))
}

/// Midpoint piecewise-constant surrogate with `n` equal pieces.
pub fn midpoint_surrogate(u: &ControlSignal, n: usize) -> ControlSignal {
    let t = u.horizon_f64();
    let tq = match u.as_exact() {
        Some(p) => p.horizon().clone(),
        None => Rational::from_float(t).expect("finite horizon"),
    };
    let breaks: Vec<Rational> = (0..=n).map(|i| &tq * rat(i as i64, n as i64)).collect();
    let values = breaks
        .windows(2)
        .map(|w| {
            let mid = to_f64(&((&w[0] + &w[1]) / rat(2, 1)));
            Rational::from_float(u.eval_f64(mid)).unwrap_or_else(Rational::zero)
        })
        .collect();
    ControlSignal::piecewise_constant(breaks, values).expect("valid partition")
}

const MAX_SURROGATE: usize = 256;

/// Z_M(t, f, u)(0) truncated to brackets of length <= `length_cutoff`.
pub fn zm_state(sys: &SystemDef, u: &ControlSignal, m: u32, length_cutoff: usize) -> Result<ZmReport, SimError> {
    if length_cutoff > MAX_CUTOFF {
        return Err(SimError::BadParameter(format!("length cutoff {length_cutoff} exceeds {MAX_CUTOFF}")));
    }
    let ev = Evaluator::new(std::sync::Arc::new(sys.clone()));
    let exact = matches!(u.as_exact(), Some(p) if p.is_piecewise_constant());
    if exact {
        let (z, terms, tail) = z_exact(&ev, u, m, length_cutoff)?;
        return Ok(ZmReport {
            m,
            length_cutoff,
            state: z.iter().map(to_f64).collect(),
            terms,
            surrogate_pieces: None,
            refinement_change: None,
            tail_estimate: tail,
        });
    }
    let mut n = 4;
    let mut prev: Option<Vec<f64>> = None;
    loop {
        let (z, terms, tail) = z_exact(&ev, &midpoint_surrogate(u, n), m, length_cutoff)?;
        let state: Vec<f64> = z.iter().map(to_f64).collect();
        let change = prev
            .as_ref()
            .map(|p| p.iter().zip(&state).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        if change.is_some_and(|c| c < 1e-9) || n >= MAX_SURROGATE {
            return Ok(ZmReport {
                m,
                length_cutoff,
                state,
                terms,
                surrogate_pieces: Some(n),
                refinement_change: change,
                tail_estimate: tail,
            });
        }
        prev = Some(state);
        n *= 2;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PureCheck {
    pub state: Vec<f64>,
    pub z_pure: Vec<f64>,
    pub discrepancy: Vec<f64>,
    /// (1/8) (int u1^2)^2 e3.
    pub predicted: Vec<f64>,
    /// -(1/2) u2(t) (u2(t) + int u1^2) e3, valid without the precondition.
    pub general: Vec<f64>,
    pub error: f64,
    pub tolerance: f64,
}

impl PureCheck {
    pub fn ok(&self) -> bool {
        self.error <= self.tolerance
    }
}

fn primitive_pp(u: &ControlSignal) -> Result<PiecewisePoly, SimError> {
    u.as_exact()
        .cloned()
        .ok_or_else(|| SimError::BadParameter("an exact piecewise-polynomial control is required".into()))
}

/// u2(t) and int u1^2 on [0, t], exactly.
pub fn moments(u: &PiecewisePoly) -> (Rational, Rational) {
    let u1 = u.primitive();
    (u1.primitive().end_value(), u1.pow(2).integral())
}

/// x(t;u), Z4_pure(0) and their difference for the pure counterexample system, without any precondition.
pub fn pure_discrepancy(u: &ControlSignal, step: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), SimError> {
    let sys = zoo("no_zm_pure")?;
    let ev = Evaluator::new(std::sync::Arc::new(sys.clone()));
    let mut z = vec![Rational::zero(); 3];
    for (h, v) in nonzero_values(&ev, 4, 12) {
        let xi = xi(h.tree(), u)?;
        let x = xi
            .exact()
            .ok_or_else(|| SimError::BadParameter("an exact piecewise-polynomial control is required".into()))?
            .clone();
        for (zi, vi) in z.iter_mut().zip(&v) {
            *zi += &x * vi;
        }
    }
    let state = integrate(&sys, u, step)?.final_state().to_vec();
    let z_pure: Vec<f64> = z.iter().map(to_f64).collect();
    let discrepancy = state.iter().zip(&z_pure).map(|(a, b)| a - b).collect();
    Ok((state, z_pure, discrepancy))
}

/// x(t;u) - Z4_pure(0) for the pure counterexample system, whose x2(t) must vanish.
pub fn pure_counterexample_check(u: &ControlSignal, step: f64) -> Result<PureCheck, SimError> {
    let p = primitive_pp(u)?;
    let (u2, i2) = moments(&p);
    let x2 = &u2 + &i2 / rat(2, 1);
    if !x2.is_zero() {
        return Err(SimError::Precondition(format!("x2(t;u) = u2(t) + (1/2) int u1^2 = {x2} must vanish")));
    }
    let (state, z_pure, discrepancy) = pure_discrepancy(u, step)?;
    let q = &i2 * &i2 / rat(8, 1);
    let g = -(&u2 * (&u2 + &i2)) / rat(2, 1);
    let predicted = vec![0.0, 0.0, to_f64(&q)];
    let general = vec![0.0, 0.0, to_f64(&g)];
    let error = discrepancy.iter().zip(&predicted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(PureCheck {
        state,
        z_pure,
        discrepancy,
        predicted,
        general,
        error,
        tolerance: 1e-7,
    })
}

/// Exact rescaling a v with x2(t; a v) = 0: a = -2 v2(t) / int v1^2.
pub fn rescale_to_precondition(v: &ControlSignal) -> Result<ControlSignal, SimError> {
    let p = primitive_pp(v)?;
    let (v2, iv) = moments(&p);
    if iv.is_zero() {
        return Ok(v.clone());
    }
    let a = -(rat(2, 1) * v2) / iv;
    Ok(ControlSignal::PiecewisePoly(p.scale(&a)))
}

/// lambda (w + c h) with c = -lambda A_w / 2 where A_w = int w1^2, given w2(t) = 0,
/// h2(t) = 1 and int w1 h1 = 0; x2(t) then vanishes up to O(lambda^3).
pub fn quartic_family(w: &PiecewisePoly, h: &PiecewisePoly, lambda: &Rational) -> ControlSignal {
    let a_w = w.primitive().pow(2).integral();
    let c = -(lambda * a_w) / rat(2, 1);
    ControlSignal::PiecewisePoly(w.add(&h.scale(&c)).scale(lambda))
}

/// Fixed pieces w, h on [0, 1] meeting the conditions of [`quartic_family`].
pub fn quartic_pair() -> (PiecewisePoly, PiecewisePoly) {
    let breaks: Vec<Rational> = (0..=4).map(|i| rat(i, 4)).collect();
    let pc = |v: [i64; 4]| PiecewisePoly::new(breaks.clone(), v.iter().map(|&c| Poly::constant(rat(c, 1))).collect()).expect("valid");
    // w = (1, -1, -1, 1): w1 is odd about 1/2, so w1(1) = 0 and w2(1) = 0.
    let w = pc([1, -1, -1, 1]);
    // h = (4, 4, -4, -4): h1 is even about 1/2 with integral 1, so w1 h1 integrates to 0.
    let h = pc([4, 4, -4, -4]);
    (w, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_pair_conditions() {
        let (w, h) = quartic_pair();
        let (w2, _) = moments(&w);
        assert!(w2.is_zero());
        assert_eq!(moments(&h).0, rat(1, 1));
        assert!(w.primitive().mul(&h.primitive()).integral().is_zero());
    }
}
