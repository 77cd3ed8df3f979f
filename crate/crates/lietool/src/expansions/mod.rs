//! Truncated solutions of the formal equation x' = x (X0 + u X1), the ordered product
//! over B*, the interaction-picture logarithm and its cross terms.

mod cbh;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub use cbh::{cbh_coefficient, lie_words, CbhCoefficient, RightNormedTerm};

use crate::algebra_core::{expand_to_words, rat, AlgebraError, BracketTree, Generator, Rational, TensorSeries, Word};
use crate::coord2::{random_piecewise_constant, ControlSignal, PiecewisePoly, XiEvaluator};
use crate::hall_bstar::{basis_up_to_length, decompose, decompose_series, HallElement, HallError, LieElement};

#[derive(Debug, Error)]
pub enum ExpansionError {
    #[error("control is not piecewise constant with rational data")]
    NotPiecewiseConstant,
    #[error("cutoff {0} is too large for exact expansion")]
    CutoffTooLarge(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Hall(#[from] HallError),
}

/// Largest cutoff accepted by the exact routines.
pub const MAX_CUTOFF: usize = 10;

fn exact_constant(u: &ControlSignal) -> Result<&PiecewisePoly, ExpansionError> {
    match u.as_exact() {
        Some(p) if p.is_piecewise_constant() => Ok(p),
        _ => Err(ExpansionError::NotPiecewiseConstant),
    }
}

fn check_cutoff(cutoff: usize) -> Result<(), ExpansionError> {
    if cutoff > MAX_CUTOFF {
        return Err(ExpansionError::CutoffTooLarge(cutoff));
    }
    Ok(())
}

fn piece_value(p: &crate::coord2::Poly) -> Rational {
    p.0.first().cloned().unwrap_or_else(Rational::zero)
}

/// The truncated state at the horizon, with its control.
#[derive(Clone, Debug)]
pub struct FormalState {
    pub series: TensorSeries,
    pub horizon: Rational,
    pub control: PiecewisePoly,
}

/// Product over pieces of exp(dt (X0 + c X1)).
pub fn formal_state(u: &ControlSignal, cutoff: usize) -> Result<FormalState, ExpansionError> {
    check_cutoff(cutoff)?;
    let p = exact_constant(u)?;
    let x0 = TensorSeries::generator(Generator::X0, cutoff);
    let x1 = TensorSeries::generator(Generator::X1, cutoff);
    let mut x = TensorSeries::one(cutoff);
    for (w, piece) in p.breaks().windows(2).zip(p.pieces()) {
        let dt = &w[1] - &w[0];
        let gen = x0.add(&x1.scale(&piece_value(piece)))?.scale(&dt);
        x = x.mul(&gen.exp()?)?;
    }
    Ok(FormalState {
        series: x,
        horizon: p.horizon().clone(),
        control: p.clone(),
    })
}

/// Sum over words of degree <= cutoff of their iterated integrals times the word.
pub fn chen_series(u: &ControlSignal, cutoff: usize) -> Result<TensorSeries, ExpansionError> {
    check_cutoff(cutoff)?;
    let p = u.as_exact().ok_or(ExpansionError::NotPiecewiseConstant)?;
    let mut out = TensorSeries::one(cutoff);
    let mut stack = vec![(Word::empty(), PiecewisePoly::constant_on(p.shared_breaks(), Rational::one()))];
    while let Some((w, c)) = stack.pop() {
        if w.len() == cutoff {
            continue;
        }
        for g in [Generator::X0, Generator::X1] {
            let next = match g {
                Generator::X0 => c.primitive(),
                Generator::X1 => c.mul(p).primitive(),
            };
            let wn = w.push(g);
            out.add_term(wn, next.end_value());
            stack.push((wn, next));
        }
    }
    Ok(out)
}

/// Product of exp(ξ_b E(b)) over b in B* with |b| <= cutoff, b decreasing left to right.
pub fn ordered_product(u: &ControlSignal, cutoff: usize) -> Result<TensorSeries, ExpansionError> {
    check_cutoff(cutoff)?;
    let p = u.as_exact().ok_or(ExpansionError::NotPiecewiseConstant)?;
    let mut ev = XiEvaluator::new(p.clone());
    let mut out = TensorSeries::one(cutoff);
    for h in basis_up_to_length(cutoff as u32).iter().rev() {
        let xi = ev.value(h.tree());
        if xi.is_zero() {
            continue;
        }
        let e = expand_to_words(h.tree(), cutoff)?.scale(&xi);
        out = out.mul(&e.exp()?)?;
    }
    Ok(out)
}

/// Coordinates η_b of the interaction-picture logarithm, for every b with |b| <= cutoff.
#[derive(Clone, Debug)]
pub struct EtaTable {
    pub cutoff: usize,
    pub values: BTreeMap<HallElement, Rational>,
}

impl EtaTable {
    pub fn get(&self, b: &BracketTree) -> Rational {
        self.values
            .iter()
            .find(|(h, _)| h.tree() == b)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn get_hall(&self, h: &HallElement) -> Rational {
        self.values.get(h).cloned().unwrap_or_else(Rational::zero)
    }
}

fn table_from(cutoff: usize, lie: &LieElement) -> EtaTable {
    let values = basis_up_to_length(cutoff as u32)
        .into_iter()
        .map(|h| {
            let c = lie.coeff(&h);
            (h, c)
        })
        .collect();
    EtaTable { cutoff, values }
}

/// log(exp(-t X0) x(t)) on E(B*); fails if some component is not a Lie polynomial.
pub fn interaction_log(u: &ControlSignal, cutoff: usize) -> Result<EtaTable, ExpansionError> {
    let x = formal_state(u, cutoff)?;
    let shift = TensorSeries::generator(Generator::X0, cutoff).scale(&-x.horizon.clone()).exp()?;
    let z = shift.mul(&x.series)?.log()?;
    Ok(table_from(cutoff, &decompose_series(&z)?))
}

/// Coordinates of the first kind: log x(t) on E(B*).
pub fn first_kind_log(u: &ControlSignal, cutoff: usize) -> Result<EtaTable, ExpansionError> {
    let x = formal_state(u, cutoff)?;
    Ok(table_from(cutoff, &decompose_series(&x.series.log()?)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossTermRow {
    pub bracket: String,
    #[serde(with = "crate::algebra_core::rational_serde")]
    pub eta: Rational,
    #[serde(with = "crate::algebra_core::rational_serde")]
    pub xi: Rational,
    /// Sum of products of ξ's against extracted CBH coefficients.
    #[serde(with = "crate::algebra_core::rational_serde")]
    pub predicted: Rational,
    pub ok: bool,
}

/// Comparison of an extracted CBH coefficient with a quoted closed form.
#[derive(Clone, Debug, Serialize)]
pub struct CbhAnchor {
    pub name: String,
    pub quoted: String,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossTermReport {
    pub rows: Vec<CrossTermRow>,
    pub anchors: Vec<CbhAnchor>,
}

impl CrossTermReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }

    pub fn mismatches(&self) -> Vec<&CrossTermRow> {
        self.rows.iter().filter(|r| !r.ok).collect()
    }
}

/// The three small CBH coefficients as they are usually quoted, against extraction.
pub fn cbh_anchors() -> Vec<CbhAnchor> {
    let quoted: [(&str, &[usize], Vec<RightNormedTerm>, &str); 3] = [
        ("F_2(1,1)", &[1, 1], vec![(rat(1, 2), vec![0, 1])], "1/2 [Y1,Y2]"),
        ("F_2(2,1)", &[2, 1], vec![(rat(1, 12), vec![0, 0, 1])], "1/12 [Y1,[Y1,Y2]]"),
        ("F_3(1,1,1)", &[1, 1, 1], vec![(rat(1, 4), vec![0, 1, 2])], "1/4 [Y1,[Y2,Y3]]"),
    ];
    quoted
        .into_iter()
        .map(|(name, h, terms, text)| CbhAnchor {
            name: name.into(),
            quoted: text.into(),
            agrees: cbh_coefficient(h).words() == lie_words(&terms),
        })
        .collect()
}

/// Strictly decreasing tuples of elements with multiplicities, total length <= budget.
fn tuples(elems: &[HallElement], budget: u32) -> Vec<(Vec<usize>, Vec<usize>)> {
    fn rec(elems: &[HallElement], start: usize, budget: u32, idx: &mut Vec<usize>, h: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Vec<usize>)>) {
        if idx.len() >= 2 {
            out.push((idx.clone(), h.clone()));
        }
        for i in start..elems.len() {
            let len = elems[i].tree().len();
            let mut mult = 1;
            while mult * len <= budget {
                idx.push(i);
                h.push(mult as usize);
                rec(elems, i + 1, budget - mult * len, idx, h, out);
                idx.pop();
                h.pop();
                mult += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(elems, 0, budget, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// Checks η_b - ξ_b against the cross-term sum for every b with |b| <= cutoff.
pub fn cross_term_check(u: &ControlSignal, cutoff: usize) -> Result<CrossTermReport, ExpansionError> {
    let eta = interaction_log(u, cutoff)?;
    let p = exact_constant(u)?;
    let mut ev = XiEvaluator::new(p.clone());
    // Largest first, so index order is the decreasing order of the product.
    let elems: Vec<HallElement> = basis_up_to_length(cutoff as u32)
        .into_iter()
        .rev()
        .filter(|h| !h.tree().is_x0())
        .collect();
    let xis: Vec<Rational> = elems.iter().map(|h| ev.value(h.tree())).collect();

    let mut predicted = LieElement::zero();
    for (idx, h) in tuples(&elems, cutoff as u32) {
        let mut weight = Rational::one();
        for (&i, &m) in idx.iter().zip(&h) {
            for _ in 0..m {
                weight *= &xis[i];
            }
        }
        if weight.is_zero() {
            continue;
        }
        let args: Vec<BracketTree> = idx.iter().map(|&i| elems[i].tree().clone()).collect();
        for (c, tree) in cbh_coefficient(&h).substitute(&args) {
            predicted = predicted.add(&decompose(&tree)?.scale(&(&c * &weight)));
        }
    }

    let rows = basis_up_to_length(cutoff as u32)
        .into_iter()
        .map(|h| {
            let e = eta.get_hall(&h);
            // X0 is not a factor of the interaction product.
            let x = if h.tree().is_x0() { Rational::zero() } else { ev.value(h.tree()) };
            let pr = predicted.coeff(&h);
            CrossTermRow {
                bracket: h.label(),
                ok: &e - &x == pr,
                eta: e,
                xi: x,
                predicted: pr,
            }
        })
        .collect();
    Ok(CrossTermReport {
        rows,
        anchors: cbh_anchors(),
    })
}

/// One identity checked over random controls.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub identity: String,
    pub trials: usize,
    pub passed: usize,
    pub detail: Option<String>,
}

impl IdentityResult {
    pub fn ok(&self) -> bool {
        self.passed == self.trials
    }
}

/// Random rational piecewise-constant control on a rational horizon in (0, 2].
pub fn random_control(rng: &mut ChaCha8Rng, pieces: usize) -> ControlSignal {
    use rand::Rng;
    let t = rat(rng.gen_range(1..=20), 10);
    let amp = rat(rng.gen_range(1..=3), 1);
    random_piecewise_constant(rng, pieces, &t, &amp)
}

struct Tally {
    name: &'static str,
    passed: usize,
    detail: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, passed: 0, detail: None }
    }

    fn record(&mut self, trial: usize, r: Result<bool, ExpansionError>) {
        match r {
            Ok(true) => self.passed += 1,
            Ok(false) => {
                self.detail.get_or_insert_with(|| format!("first failure at trial {trial}"));
            }
            Err(e) => {
                self.detail.get_or_insert_with(|| format!("trial {trial}: {e}"));
            }
        }
    }
}

/// Runs every expansion identity on `trials` seeded random 3-piece controls.
pub fn verify_expansions(degree: usize, trials: usize, seed: u64) -> Result<Vec<IdentityResult>, ExpansionError> {
    check_cutoff(degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let controls: Vec<ControlSignal> = (0..trials).map(|_| random_control(&mut rng, 3)).collect();
    let mut chen = Tally::new("formal_state = chen_series");
    let mut prod = Tally::new("formal_state = ordered_product");
    let mut eta = Tally::new("eta_X0 = 0, eta_X1 = u1(t)");
    let mut first = Tally::new("first kind: zeta_X0 = t, zeta_X1 = u1(t), exp(log x) = x");
    let mut cross = Tally::new("eta - xi = cross-term sum");
    let cross_cutoff = degree.min(4);
    for (i, u) in controls.iter().enumerate() {
        let x = formal_state(u, degree)?;
        chen.record(i, chen_series(u, degree).map(|c| c == x.series));
        prod.record(i, ordered_product(u, degree).map(|c| c == x.series));
        let u1 = x.control.primitive().end_value();
        eta.record(
            i,
            interaction_log(u, degree).map(|e| e.get(&BracketTree::x0()).is_zero() && e.get(&BracketTree::x1()) == u1),
        );
        first.record(
            i,
            (|| {
                let z = first_kind_log(u, degree)?;
                let back = x.series.log()?.exp()?;
                Ok(z.get(&BracketTree::x0()) == x.horizon && z.get(&BracketTree::x1()) == u1 && back == x.series)
            })(),
        );
        cross.record(i, cross_term_check(u, cross_cutoff).map(|r| r.all_ok()));
    }
    Ok([chen, prod, eta, first, cross]
        .into_iter()
        .map(|t| IdentityResult {
            identity: t.name.into(),
            trials,
            passed: t.passed,
            detail: t.detail,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::int;
    use crate::algebra_core::named::{m, w};
    use crate::coord2::chen_coefficient;

    fn two_piece() -> ControlSignal {
        ControlSignal::piecewise_constant(vec![int(0), rat(1, 3), int(1)], vec![int(2), rat(-1, 2)]).unwrap()
    }

    #[test]
    fn zero_control_is_drift_flow() {
        let u = ControlSignal::constant(rat(3, 2), int(0)).unwrap();
        let x = formal_state(&u, 4).unwrap();
        let expected = TensorSeries::generator(Generator::X0, 4).scale(&rat(3, 2)).exp().unwrap();
        assert_eq!(x.series, expected);
        assert_eq!(ordered_product(&u, 4).unwrap(), expected);
    }

    #[test]
    fn state_matches_chen_coefficients() {
        let u = two_piece();
        let x = formal_state(&u, 4).unwrap();
        for len in 0..=4 {
            for n1 in 0..=len {
                for wd in Word::all_with_bidegree(n1, len - n1) {
                    assert_eq!(chen_coefficient(&wd, &u).exact().unwrap(), &x.series.coeff(&wd), "{wd}");
                }
            }
        }
    }

    #[test]
    fn three_way_equality() {
        let u = two_piece();
        let x = formal_state(&u, 5).unwrap().series;
        assert_eq!(chen_series(&u, 5).unwrap(), x);
        assert_eq!(ordered_product(&u, 5).unwrap(), x);
    }

    #[test]
    fn eta_base_cases() {
        let u = two_piece();
        let e = interaction_log(&u, 4).unwrap();
        let p = u.as_exact().unwrap();
        assert!(e.get(&BracketTree::x0()).is_zero());
        assert_eq!(e.get(&BracketTree::x1()), p.primitive().end_value());
        assert_eq!(e.get(&m(1)), p.primitive().primitive().end_value());
    }

    #[test]
    fn cross_terms_on_two_piece_control() {
        let u = two_piece();
        let r = cross_term_check(&u, 4).unwrap();
        assert!(r.all_ok(), "{:?}", r.mismatches());
        let row = r.rows.iter().find(|r| r.bracket == w(1, 0).unwrap().canonical() || r.bracket == "W(1,0)").unwrap();
        assert!(!row.predicted.is_zero());
    }

    #[test]
    fn anchors_flag_three_factor_value() {
        let a = cbh_anchors();
        assert!(a[0].agrees && a[1].agrees);
        assert!(!a[2].agrees);
    }

    #[test]
    fn rejects_polynomial_controls() {
        let p = PiecewisePoly::new(vec![int(0), int(1)], vec![crate::coord2::Poly::from_coeffs(vec![int(0), int(1)])]).unwrap();
        let u = ControlSignal::PiecewisePoly(p);
        assert!(matches!(formal_state(&u, 3), Err(ExpansionError::NotPiecewiseConstant)));
    }

    #[test]
    fn verify_table_passes() {
        let rows = verify_expansions(4, 3, 7).unwrap();
        for r in rows {
            assert!(r.ok(), "{} {:?}", r.identity, r.detail);
        }
    }
}
