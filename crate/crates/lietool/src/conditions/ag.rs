//! Agrachev-Gamkrelidze weights and the screen built on them.
//!
//! Layers are found by greedy peeling: a bracket is in layer 1 when the predicate
//! accepts it, and (a, b) is in layer 1 + layer(b) when a is accepted (or 1 + layer(a)
//! when only b is). The predicate is trusted to describe free generators.

use std::collections::BTreeMap;

use serde::Serialize;

use super::family::{label, Caps, WeightBound};
use super::ConditionError;
use crate::algebra_core::named::m;
use crate::algebra_core::{rational_serde, BracketTree, Rational};
use crate::hall_bstar::basis_layer;
use crate::linalg::{dense_to_sparse, Echelon};
use crate::vector_fields::Evaluator;

/// Membership in the first layer of the filtration.
pub type Pi1 = dyn Fn(&BracketTree) -> bool + Sync;

/// ad^{i2}_{M2} ad^{i1}_{M1} ad^{i0}_{X1}(X0) with i0 != 1 and (i0, i1) != (0, 1).
pub fn pi1_w3(t: &BracketTree) -> bool {
    let (m1, m2) = (m(1), m(2));
    let mut cur = t;
    let mut i = [0u32; 3];
    for (slot, g) in [(2, &m2), (1, &m1), (0, &BracketTree::x1())] {
        while let Some((l, r)) = cur.children() {
            if l != g {
                break;
            }
            i[slot] += 1;
            cur = r;
        }
    }
    cur.is_x0() && i[0] != 1 && !(i[0] == 0 && i[1] == 1)
}

pub fn ag_layer(t: &BracketTree, pi1: &Pi1) -> Option<u32> {
    if pi1(t) {
        return Some(1);
    }
    let (a, b) = t.children()?;
    if pi1(a) {
        ag_layer(b, pi1).map(|k| k + 1)
    } else if pi1(b) {
        ag_layer(a, pi1).map(|k| k + 1)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgWeight {
    pub layer: u32,
    #[serde(with = "rational_serde")]
    pub omega: Rational,
}

/// omega = |t| - sigma * layer.
pub fn ag_weight(t: &BracketTree, pi1: &Pi1, sigma: &Rational) -> Result<AgWeight, ConditionError> {
    let layer = ag_layer(t, pi1).ok_or_else(|| ConditionError::LayerUndetermined(label(t)))?;
    let omega = Rational::from_integer(t.len().into()) - sigma * Rational::from_integer(layer.into());
    Ok(AgWeight { layer, omega })
}

#[derive(Clone, Debug, Serialize)]
pub struct AgEntry {
    pub bracket: String,
    pub n1: u32,
    pub n0: u32,
    pub layer: u32,
    #[serde(with = "rational_serde")]
    pub omega: Rational,
    #[serde(with = "rational_serde::vec")]
    pub value: Vec<Rational>,
    /// Type (even, odd) in an odd layer.
    pub needs_compensation: bool,
    /// Whether the value lies in the span of strictly lighter values.
    pub compensated: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AgReport {
    pub system: String,
    #[serde(with = "rational_serde")]
    pub sigma: Rational,
    #[serde(with = "rational_serde")]
    pub r: Rational,
    /// Brackets with omega <= r and a nonzero value, or needing compensation.
    pub entries: Vec<AgEntry>,
    /// Every bracket needing compensation is compensated.
    pub compensated: bool,
    /// S1 values plus values of weight <= r span the whole space.
    pub spanning: bool,
    pub stabilized: bool,
    pub caps: Caps,
    pub notes: Vec<String>,
}

impl AgReport {
    pub fn passed(&self) -> bool {
        self.compensated && self.spanning
    }
}

/// Screens B* elements of weight <= r; n1 <= r holds for such brackets whenever sigma <= 1.
pub fn ag_screen(ev: &Evaluator, pi1: &Pi1, sigma: &Rational, r: &Rational, caps: &Caps) -> Result<AgReport, ConditionError> {
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    if *sigma < zero || *sigma > one {
        return Err(ConditionError::BadCondition(format!("sigma = {sigma} not in [0, 1]")));
    }
    let sys = ev.system();
    let d = sys.dim();
    let bound = WeightBound::new(sys);
    let mut notes = Vec::new();
    let mut stabilized = true;
    let n1_max = r.floor().to_integer();
    let n1_max = u32::try_from(n1_max).unwrap_or(0).min(caps.cap_index);
    let mut rows: BTreeMap<Rational, Vec<AgEntry>> = BTreeMap::new();
    for n1 in 1..=n1_max {
        let top = match &bound {
            Some(w) => {
                let m = w.n0_max(n1);
                if m < 0 {
                    continue;
                }
                if m > i64::from(caps.cap_n0) {
                    stabilized = false;
                    notes.push(format!("n1 = {n1}: n0 cut at {}", caps.cap_n0));
                }
                (m as u32).min(caps.cap_n0)
            }
            None => {
                stabilized = false;
                caps.cap_n0
            }
        };
        for n0 in 0..=top {
            for h in basis_layer(n1, n0).iter() {
                let t = h.tree();
                let Some(layer) = ag_layer(t, pi1) else { continue };
                let omega = Rational::from_integer(t.len().into()) - sigma * Rational::from_integer(layer.into());
                if omega > *r {
                    continue;
                }
                let needs = n1 % 2 == 0 && n0 % 2 == 1 && layer % 2 == 1;
                rows.entry(omega.clone()).or_default().push(AgEntry {
                    bracket: label(t),
                    n1,
                    n0,
                    layer,
                    omega,
                    value: ev.eval_bracket(t),
                    needs_compensation: needs,
                    compensated: None,
                });
            }
        }
    }
    if bound.is_none() {
        notes.push("no weight bound; n0 limited by cap_n0".into());
    }
    let mut lighter = Echelon::new();
    let mut entries = Vec::new();
    let mut compensated = true;
    for (_, level) in rows {
        let mut level = level;
        for e in level.iter_mut().filter(|e| e.needs_compensation) {
            let ok = lighter.contains(&dense_to_sparse(&e.value));
            compensated &= ok;
            e.compensated = Some(ok);
        }
        for e in &level {
            lighter.insert(dense_to_sparse(&e.value));
        }
        entries.extend(level.into_iter().filter(|e| e.needs_compensation || e.value.iter().any(|x| *x != zero)));
    }
    let mut all = lighter;
    let h0 = sys.h0();
    let mut v = ev.eval_bracket(&BracketTree::x1());
    // S1 values f_{M_nu}(0) = H0^nu f1(0).
    for _ in 0..d {
        all.insert(dense_to_sparse(&v));
        v = h0.iter().map(|row| row.iter().zip(&v).fold(zero.clone(), |acc, (a, x)| acc + a * x)).collect();
    }
    Ok(AgReport {
        system: sys.name.clone(),
        sigma: sigma.clone(),
        r: r.clone(),
        entries,
        compensated,
        spanning: all.rank() == d,
        stabilized,
        caps: caps.clone(),
        notes,
    })
}
