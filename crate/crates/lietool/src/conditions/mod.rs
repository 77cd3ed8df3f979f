//! Span-membership tests f_b(0) in N(f)(0) for the necessary conditions on
//! small-time local controllability, plus Agrachev-Gamkrelidze weights.

mod ag;
mod family;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra_core::named::{d, p, q, qf, r, rs, w};
use crate::algebra_core::{rational_serde, AlgebraError, BracketTree, Rational};
use crate::linalg::{basic_solution, dot};
use crate::vector_fields::{Evaluator, SystemDef};

pub use ag::{ag_layer, ag_screen, ag_weight, pi1_w3, AgEntry, AgReport, AgWeight, Pi1};
pub use family::{label, neutral_span, Caps, FamilySpec, IndexedGen, Member, NeutralSpan, TruncationMode, WeightBound};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConditionError {
    #[error("bad condition: {0}")]
    BadCondition(String),
    #[error("{0} lies in the span; no component functional exists")]
    InSpan(String),
    #[error("{0}: layer undetermined under the greedy rule")]
    LayerUndetermined(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// The span-type conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Sussmann(u32),
    WkLoose { k: u32, m: i32 },
    WkScreen { k: u32, m: i32 },
    N2,
    N3,
    Sextic,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Sussmann(k) => write!(f, "sussmann:{k}"),
            Condition::WkLoose { k, m } => write!(f, "wk:{k},{m}"),
            Condition::WkScreen { k, m } => write!(f, "wk-screen:{k},{m}"),
            Condition::N2 => write!(f, "n2"),
            Condition::N3 => write!(f, "n3"),
            Condition::Sextic => write!(f, "sextic"),
        }
    }
}

impl FromStr for Condition {
    type Err = ConditionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConditionError::BadCondition(s.to_string());
        let (head, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<i64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',').map(|a| a.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
        };
        let k = |v: i64| u32::try_from(v).ok().filter(|&k| k >= 1).ok_or_else(bad);
        let m = |v: i64| i32::try_from(v).ok().filter(|&m| m >= -1).ok_or_else(bad);
        match (head, nums.as_slice()) {
            ("sussmann", [a]) => Ok(Condition::Sussmann(k(*a)?)),
            ("wk", [a, b]) => Ok(Condition::WkLoose { k: k(*a)?, m: m(*b)? }),
            ("wk-screen", [a, b]) => Ok(Condition::WkScreen { k: k(*a)?, m: m(*b)? }),
            ("n2", []) => Ok(Condition::N2),
            ("n3", []) => Ok(Condition::N3),
            ("sextic", []) => Ok(Condition::Sextic),
            _ => Err(bad()),
        }
    }
}

/// 1 + ceil((2k-2)/(m+1)) for m >= 0; None stands for infinity (m = -1, k >= 2).
pub fn pi(k: u32, m: i32) -> Option<u32> {
    assert!(k >= 1 && m >= -1, "pi needs k >= 1 and m >= -1");
    if m == -1 {
        return if k == 1 { Some(1) } else { None };
    }
    let (a, b) = (2 * k - 2, m as u32 + 1);
    Some(1 + a.div_ceil(b))
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanVector {
    pub bracket: String,
    #[serde(with = "rational_serde::vec")]
    pub value: Vec<Rational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Term {
    pub bracket: String,
    #[serde(with = "rational_serde")]
    pub coeff: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub system: String,
    pub verdict: Verdict,
    pub target: String,
    #[serde(with = "rational_serde::vec")]
    pub target_value: Vec<Rational>,
    pub family: String,
    pub span: Vec<SpanVector>,
    pub rank: usize,
    pub dim: usize,
    pub caps: Caps,
    pub mode: TruncationMode,
    pub stabilized: bool,
    pub evaluated: usize,
    /// P with P f_b(0) = 1 and P v = 0 on the span; present when violated.
    #[serde(with = "rational_serde::option_vec")]
    pub functional: Option<Vec<Rational>>,
    /// f_b(0) as a combination of span vectors; present when satisfied.
    pub combination: Option<Vec<Term>>,
    pub notes: Vec<String>,
}

/// Target bracket and neutralizing family for a condition.
pub fn condition_family(c: Condition) -> Result<(BracketTree, FamilySpec), ConditionError> {
    let x1 = BracketTree::x1();
    let layers = |lo: u32, hi: Option<u32>, skip: Vec<u32>| Member::Layers { n1_min: lo, n1_max: hi, skip };
    Ok(match c {
        Condition::Sussmann(k) => {
            let target = BracketTree::ad(&x1, 2 * k, &BracketTree::x0());
            (target, FamilySpec::new(&format!("n1 <= {}", 2 * k - 1)).with(layers(1, Some(2 * k - 1), vec![])))
        }
        Condition::WkLoose { k, m } => {
            let hi = pi(k, m);
            let name = match hi {
                Some(h) => format!("n1 in [1, {h}] minus 2"),
                None => "n1 != 2".into(),
            };
            (w(k, 0)?, FamilySpec::new(&name).with(layers(1, hi, vec![2])))
        }
        Condition::WkScreen { k, m } => {
            let hi = pi(k, m);
            let mut fam = FamilySpec::new("S1 + P_k + n1 in [4, pi]").with(Member::Zeros(x1.clone()));
            if k >= 2 {
                fam = fam.with(Member::Indexed {
                    name: format!("P(j,l,nu), j < {k}"),
                    arity: 2,
                    gen: IndexedGen::new(move |i| {
                        let (j, l) = (i[0] + 1, i[0] + 1 + i[1]);
                        if j >= k {
                            return None;
                        }
                        p(j, l, 0).ok()
                    }),
                    zeros: true,
                });
            }
            if hi.is_none_or(|h| h >= 4) {
                fam = fam.with(layers(4, hi, vec![]));
            }
            (w(k, 0)?, fam)
        }
        Condition::N2 => (
            w(2, 0)?,
            FamilySpec::new("N2").with(Member::Zeros(x1)).with(Member::Zeros(p(1, 1, 0)?)),
        ),
        Condition::N3 => {
            let fam = FamilySpec::new("N3")
                .with(Member::Zeros(x1))
                .with(Member::Indexed {
                    name: "P(1,l,nu)".into(),
                    arity: 1,
                    gen: IndexedGen::new(|i| p(1, i[0] + 1, 0).ok()),
                    zeros: true,
                })
                .with(Member::Tree(q(1, 1, 1, 0)?))
                .with(Member::Zeros(q(1, 1, 2, 0)?))
                .with(Member::Tree(qf(1, 0, 0)?))
                .with(Member::Tree(qf(1, 1, 0)?))
                .with(Member::Tree(qf(1, 2, 0)?))
                .with(Member::Zeros(r(1, 1, 1, 1, 0)?))
                .with(Member::Indexed {
                    name: "Rs(1,1,1,mu,nu)".into(),
                    arity: 1,
                    gen: IndexedGen::new(|i| rs(1, 1, 1, i[0], 0).ok()),
                    zeros: true,
                });
            (w(3, 0)?, fam)
        }
        Condition::Sextic => (d(), FamilySpec::new("n1 <= 7 minus D").with(layers(1, Some(7), vec![])).without(d())),
    })
}

/// P with P target = 1 and P v = 0 for each v: the basic solution of the stacked system.
fn functional(span: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let mut a: Vec<Vec<Rational>> = span.to_vec();
    a.push(target.to_vec());
    let mut rhs = vec![Rational::zero(); span.len()];
    rhs.push(Rational::one());
    let p = basic_solution(&a, &rhs)?;
    assert!(span.iter().all(|v| dot(&p, v).is_zero()) && dot(&p, target).is_one());
    Some(p)
}

/// Decides target in span(family) and packages the evidence.
pub fn check_span(ev: &Evaluator, condition: &str, target: &BracketTree, fam: &FamilySpec, caps: &Caps) -> ConditionReport {
    let value = ev.eval_bracket(target);
    let span = neutral_span(ev, fam, caps);
    let vectors: Vec<Vec<Rational>> = span.basis.iter().map(|(_, v)| v.clone()).collect();
    let combination = span.represent(&value);
    let verdict = match (&combination, span.stabilized) {
        (Some(_), _) => Verdict::Satisfied,
        (None, true) => Verdict::Violated,
        (None, false) => Verdict::Inconclusive,
    };
    let functional = match verdict {
        Verdict::Violated => Some(functional(&vectors, &value).expect("target outside the span")),
        _ => None,
    };
    ConditionReport {
        condition: condition.to_string(),
        system: ev.system().name.clone(),
        verdict,
        target: label(target),
        target_value: value,
        family: fam.name.clone(),
        span: span
            .basis
            .iter()
            .map(|(b, v)| SpanVector {
                bracket: b.clone(),
                value: v.clone(),
            })
            .collect(),
        rank: span.rank(),
        dim: span.dim,
        caps: caps.clone(),
        mode: span.mode,
        stabilized: span.stabilized,
        evaluated: span.evaluated,
        functional,
        combination: combination.map(|c| c.into_iter().map(|(bracket, coeff)| Term { bracket, coeff }).collect()),
        notes: span.notes,
    }
}

pub fn check_with(ev: &Evaluator, c: Condition, caps: &Caps) -> Result<ConditionReport, ConditionError> {
    let (target, fam) = condition_family(c)?;
    Ok(check_span(ev, &c.to_string(), &target, &fam, caps))
}

pub fn check(sys: &SystemDef, c: Condition, caps: &Caps) -> Result<ConditionReport, ConditionError> {
    check_with(&Evaluator::new(Arc::new(sys.clone())), c, caps)
}

pub fn check_sussmann_stefani(sys: &SystemDef, k: u32, caps: &Caps) -> Result<ConditionReport, ConditionError> {
    if k == 0 {
        return Err(ConditionError::BadCondition("sussmann needs k >= 1".into()));
    }
    check(sys, Condition::Sussmann(k), caps)
}

pub fn check_wk_loose(sys: &SystemDef, k: u32, m: i32, caps: &Caps) -> Result<ConditionReport, ConditionError> {
    check(sys, format!("wk:{k},{m}").parse()?, caps)
}

pub fn check_wk_cubic_screen(sys: &SystemDef, k: u32, m: i32, caps: &Caps) -> Result<ConditionReport, ConditionError> {
    check(sys, format!("wk-screen:{k},{m}").parse()?, caps)
}

pub fn check_n2(sys: &SystemDef, caps: &Caps) -> Result<ConditionReport, ConditionError> {
    check(sys, Condition::N2, caps)
}

pub fn check_n3(sys: &SystemDef, caps: &Caps) -> Result<ConditionReport, ConditionError> {
    check(sys, Condition::N3, caps)
}

pub fn check_sextic(sys: &SystemDef, caps: &Caps) -> Result<ConditionReport, ConditionError> {
    check(sys, Condition::Sextic, caps)
}

/// A functional P with P f_b(0) = 1 vanishing on the family's span.
pub fn component_functional(ev: &Evaluator, b: &BracketTree, fam: &FamilySpec, caps: &Caps) -> Result<Vec<Rational>, ConditionError> {
    let value = ev.eval_bracket(b);
    let span = neutral_span(ev, fam, caps);
    if span.contains(&value) {
        return Err(ConditionError::InSpan(label(b)));
    }
    let vectors: Vec<Vec<Rational>> = span.basis.iter().map(|(_, v)| v.clone()).collect();
    Ok(functional(&vectors, &value).expect("target outside the span"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::named::{m, p, q, rs, w};
    use crate::algebra_core::{int, rat};
    use crate::vector_fields::{zoo, PolyVectorField};

    fn ev(name: &str) -> Evaluator {
        Evaluator::new(Arc::new(zoo(name).unwrap()))
    }

    fn run(name: &str, c: &str) -> ConditionReport {
        check_with(&ev(name), c.parse().unwrap(), &Caps::default()).unwrap()
    }

    fn sound(r: &ConditionReport) {
        match r.verdict {
            Verdict::Violated => {
                let p = r.functional.as_ref().expect("functional");
                assert!(dot(p, &r.target_value).is_one());
                assert!(r.span.iter().all(|v| dot(p, &v.value).is_zero()));
            }
            Verdict::Satisfied => assert!(r.combination.is_some()),
            Verdict::Inconclusive => assert!(!r.stabilized),
        }
    }

    #[test]
    fn pi_table() {
        assert_eq!(pi(2, 0), Some(3));
        assert_eq!(pi(3, 0), Some(5));
        for mm in 0..5 {
            assert_eq!(pi(1, mm), Some(1));
        }
        for k in 2..8 {
            assert_eq!(pi(k, 0), Some(2 * k - 1));
            assert_eq!(pi(k, 2 * k as i32 - 3), Some(2));
        }
        assert_eq!(pi(1, -1), Some(1));
        assert_eq!(pi(2, -1), None);
    }

    #[test]
    fn condition_names_round_trip() {
        for s in ["sussmann:2", "wk:3,0", "wk-screen:2,-1", "n2", "n3", "sextic"] {
            assert_eq!(s.parse::<Condition>().unwrap().to_string(), s);
        }
        for s in ["sussmann:0", "wk:2", "wk:2,-2", "ag", "n4"] {
            assert!(s.parse::<Condition>().is_err(), "{s}");
        }
    }

    #[test]
    fn s1_span_of_easy() {
        let e = ev("easy");
        let s = neutral_span(&e, &FamilySpec::s1(), &Caps::default());
        assert_eq!(s.rank(), 2);
        assert!(s.stabilized);
        assert!(s.contains(&[int(3), int(-1), int(0)]));
        assert!(!s.contains(&[int(0), int(0), int(1)]));
        let empty = neutral_span(&e, &FamilySpec::new("empty"), &Caps::default());
        assert_eq!(empty.rank(), 0);
    }

    #[test]
    fn n2_span_of_jakubczyk_reaches_p11() {
        let (_, fam) = condition_family(Condition::N2).unwrap();
        let s = neutral_span(&ev("jakubczyk"), &fam, &Caps::default());
        assert!(s.contains(&[int(0), int(0), int(6)]));
        assert!(s.basis.iter().any(|(b, _)| b.starts_with('P')));
    }

    #[test]
    fn sussmann_on_easy() {
        let r = run("easy", "sussmann:1");
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.functional, Some(vec![int(0), int(0), rat(1, 2)]));
        sound(&r);
        assert_eq!(run("jakubczyk", "sussmann:1").verdict, Verdict::Satisfied);
    }

    #[test]
    fn linear_systems_satisfy_everything() {
        let f0 = PolyVectorField::parse(&["0", "x1", "x2"]).unwrap();
        let sys = SystemDef::new("lin", f0, PolyVectorField::unit(3, 0)).unwrap();
        for k in 1..4 {
            let r = check_sussmann_stefani(&sys, k, &Caps::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Satisfied);
            assert!(r.target_value.iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn wk_classification() {
        let r = run("w2_vs_q111", "wk:2,0");
        assert_eq!(r.verdict, Verdict::Violated);
        sound(&r);
        assert_eq!(run("jakubczyk", "wk:2,0").verdict, Verdict::Satisfied);
        for (spec, k) in [("wk_prototype:2,8", 2), ("wk_prototype:3,6", 3)] {
            let r = run(spec, &format!("wk:{k},0"));
            assert_eq!(r.verdict, Verdict::Violated, "{spec}");
            sound(&r);
        }
    }

    #[test]
    fn n2_and_n3() {
        let r = run("w2_vs_q111", "n2");
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.functional, Some(vec![int(0), int(0), rat(1, 2)]));
        assert_eq!(run("jakubczyk", "n2").verdict, Verdict::Satisfied);
        let r = run("w3_vs_q111", "n3");
        assert_eq!(r.verdict, Verdict::Satisfied);
        sound(&r);
        for spec in ["w3_vs_p1l:1,0", "w3_vs_p1l:2,1", "w3_vs_p1l:4,0", "w3_vs_rsharp:1,1", "w3_vs_r1111:1"] {
            assert_eq!(run(spec, "n3").verdict, Verdict::Satisfied, "{spec}");
        }
    }

    #[test]
    fn sextic_threshold() {
        let r7 = run("sextic:7", "sextic");
        assert_eq!(r7.verdict, Verdict::Satisfied);
        assert_eq!(r7.mode, TruncationMode::WeightBound);
        let r8 = run("sextic:8", "sextic");
        assert_eq!(r8.verdict, Verdict::Violated);
        sound(&r8);
    }

    #[test]
    fn component_functional_examples() {
        let e = ev("easy");
        let p1 = component_functional(&e, &w(1, 0).unwrap(), &FamilySpec::s1(), &Caps::default()).unwrap();
        assert_eq!(p1, vec![int(0), int(0), rat(1, 2)]);
        let e2 = ev("w2_vs_q111");
        let (_, n2) = condition_family(Condition::N2).unwrap();
        let p2 = component_functional(&e2, &w(2, 0).unwrap(), &n2, &Caps::default()).unwrap();
        assert_eq!(p2, vec![int(0), int(0), rat(1, 2)]);
        assert!(matches!(
            component_functional(&e, &m(1), &FamilySpec::s1(), &Caps::default()),
            Err(ConditionError::InSpan(_))
        ));
    }

    #[test]
    fn ag_weights_of_the_limiting_brackets() {
        let one = int(1);
        let wt = |t: BracketTree| ag_weight(&t, &pi1_w3, &one).unwrap().omega;
        assert_eq!(wt(w(3, 0).unwrap()), int(6));
        for nu in 0..4 {
            assert_eq!(wt(p(1, 1, nu).unwrap()), int(3));
            assert_eq!(wt(p(1, 2, nu).unwrap()), int(4));
            assert_eq!(wt(p(1, 3, nu).unwrap()), int(5));
            assert_eq!(wt(p(1, 5, nu).unwrap()), int(5));
            assert_eq!(wt(q(1, 1, 2, nu).unwrap()), int(5));
            assert_eq!(wt(crate::algebra_core::named::r(1, 1, 1, 1, nu).unwrap()), int(5));
            for mu in 0..3 {
                assert_eq!(wt(rs(1, 1, 1, mu, nu).unwrap()), int(5));
            }
        }
        assert!(matches!(ag_weight(&m(1), &pi1_w3, &one), Err(ConditionError::LayerUndetermined(_))));
    }

    #[test]
    fn ag_screen_passes_a_limiting_example() {
        let rep = ag_screen(&ev("w3_vs_p1l:1,0"), &pi1_w3, &int(1), &int(6), &Caps::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.entries.iter().any(|e| e.bracket.starts_with('W') && e.compensated == Some(true)));
    }

    #[test]
    fn heuristic_mode_on_cyclic_drift() {
        let r = run("qb12", "n3");
        assert_eq!(r.mode, TruncationMode::Heuristic);
        assert_eq!(r.verdict, Verdict::Satisfied);
    }
}
