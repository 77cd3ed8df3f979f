//! Example systems with their known bracket values at the origin.
//!
//! Every system has f1 = e1. Parametrised entries are addressed as `name:a,b`.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use super::field::{Evaluator, ExpectedValue, PolyVectorField, SystemDef};
use super::VfError;
use crate::algebra_core::named::{d, m, p, q, qf, r, rs, w};
use crate::algebra_core::{factorial, int, BracketTree, Rational};
use crate::hall_bstar::basis_up_to_length;

/// Length up to which exhaustive tables are verified.
pub const REGRESSION_LEN: u32 = 8;

const NAMES: &[(&str, &str, &str)] = &[
    ("easy", "", "x1' = u, x2' = x1, x3' = x1^2 - x2^2 - x1^3 - 4 x1 x2"),
    ("no_zm_pure", "", "pure truncated representation fails at order 4"),
    ("wk_prototype", "2,8", "k,p: integrator chain of length k with x_{k+1}' = x_k^2 - x1^p"),
    ("jakubczyk", "", "x3' = x2^2 + x1^3, compensated quadratic drift"),
    ("w2_vs_q111", "", "x3' = x2^2 - x1^4"),
    ("w3_vs_p1l", "1,0", "l,nu: W3 against P(1,l,nu)"),
    ("w3_vs_q112", "0", "nu: W3 against Q(1,1,2,nu)"),
    ("w3_vs_r1111", "0", "nu: W3 against R(1,1,1,1,nu)"),
    ("w3_vs_rsharp", "0,0", "mu,nu: W3 against Rs(1,1,1,mu,nu)"),
    ("w3_vs_q111", "", "x4' = x3^2 - x1^4"),
    ("w3_time", "", "W3 with a time-dependent component"),
    ("sextic", "8", "p: x4' = x3^2 - x2^p, D against ad^p_{M1}(X0)"),
    ("kawski_53", "", "x4' = x3^2 - x2^2 x1^4"),
    ("sextic_x3x1_4", "", "x4' = x3^2 + x3 x1^4"),
    ("qb10", "", "W3 against Qf(1,0,0)"),
    ("qb11", "", "W3 against Qf(1,1,0)"),
    ("qb12", "", "W3 against Qf(1,2,0), not nilpotent"),
    ("x22_x1k", "4", "k: x3' = x2^2 - x1^k"),
];

/// Entries used for the regression sweep.
pub const INSTANCES: &[&str] = &[
    "easy",
    "no_zm_pure",
    "wk_prototype:1,4",
    "wk_prototype:2,8",
    "wk_prototype:3,6",
    "jakubczyk",
    "w2_vs_q111",
    "w3_vs_p1l:1,0",
    "w3_vs_p1l:2,1",
    "w3_vs_p1l:3,0",
    "w3_vs_p1l:4,0",
    "w3_vs_p1l:5,1",
    "w3_vs_q112:0",
    "w3_vs_q112:1",
    "w3_vs_r1111:0",
    "w3_vs_r1111:1",
    "w3_vs_rsharp:0,0",
    "w3_vs_rsharp:1,0",
    "w3_vs_rsharp:1,1",
    "w3_vs_q111",
    "w3_time",
    "sextic:7",
    "sextic:8",
    "kawski_53",
    "sextic_x3x1_4",
    "qb10",
    "qb11",
    "qb12",
    "x22_x1k:3",
    "x22_x1k:4",
    "x22_x1k:5",
];

/// (name, default parameters, description) for every family.
pub fn zoo_list() -> Vec<(&'static str, &'static str, &'static str)> {
    NAMES.to_vec()
}

fn unit(dim: usize, i: usize, c: Rational) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[i - 1] = c;
    v
}

struct Builder {
    dim: usize,
    drift: Vec<String>,
    expected: Vec<ExpectedValue>,
}

impl Builder {
    fn new(drift: Vec<String>) -> Self {
        Builder {
            dim: drift.len(),
            drift,
            expected: Vec::new(),
        }
    }

    fn from(drift: &[&str]) -> Self {
        Self::new(drift.iter().map(|s| s.to_string()).collect())
    }

    fn value(mut self, b: BracketTree, i: usize, c: i64) -> Self {
        self.expected.push(ExpectedValue {
            bracket: b,
            value: unit(self.dim, i, int(c)),
            corrected: None,
        });
        self
    }

    fn value_q(mut self, b: BracketTree, i: usize, c: Rational) -> Self {
        self.expected.push(ExpectedValue {
            bracket: b,
            value: unit(self.dim, i, c),
            corrected: None,
        });
        self
    }

    /// Published value `c`, recomputed value `actual`.
    fn erratum(mut self, b: BracketTree, i: usize, c: i64, actual: i64) -> Self {
        self.expected.push(ExpectedValue {
            bracket: b,
            value: unit(self.dim, i, int(c)),
            corrected: Some(unit(self.dim, i, int(actual))),
        });
        self
    }

    /// f_{M(i-1)}(0) = e_i for i in 1..=n.
    fn chain(mut self, n: usize) -> Self {
        for i in 1..=n {
            self = self.value(m(i as u32 - 1), i, 1);
        }
        self
    }

    fn build(self, name: &str, description: &str, exhaustive_len: Option<u32>) -> Result<SystemDef, VfError> {
        let exprs: Vec<&str> = self.drift.iter().map(String::as_str).collect();
        let f0 = PolyVectorField::parse(&exprs)?;
        let f1 = PolyVectorField::unit(self.dim, 0);
        let mut sys = SystemDef::new(name, f0, f1)?;
        sys.description = description.into();
        sys.expected = self.expected;
        sys.exhaustive_len = exhaustive_len;
        Ok(sys)
    }
}

fn x(i: usize) -> String {
    format!("x{i}")
}

/// Chain x1..x_len, then `term` feeding a tail of length nu ending in x3^2.
fn w3_competitor(chain: usize, term: &str, nu: usize) -> Vec<String> {
    let mut v = vec!["0".to_string()];
    for i in 2..=chain {
        v.push(x(i - 1));
    }
    let base = chain + 1;
    if nu == 0 {
        v.push(format!("x3^2 + {term}"));
    } else {
        v.push(term.to_string());
        for mu in 1..nu {
            v.push(x(base + mu - 1));
        }
        v.push(format!("x3^2 + {}", x(base + nu - 1)));
    }
    v
}

fn params(name: &str, args: &str, n: usize) -> Result<Vec<u32>, VfError> {
    let v: Vec<u32> = args
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|_| VfError::BadParameters {
            name: name.into(),
            msg: format!("expected {n} non-negative integers, got '{args}'"),
        })?;
    if v.len() != n {
        return Err(VfError::BadParameters {
            name: name.into(),
            msg: format!("expected {n} parameters, got {}", v.len()),
        });
    }
    Ok(v)
}

fn bad(name: &str, msg: &str) -> VfError {
    VfError::BadParameters {
        name: name.into(),
        msg: msg.into(),
    }
}

fn ad_x1(p: u32) -> BracketTree {
    BracketTree::ad(&BracketTree::x1(), p, &BracketTree::x0())
}

/// Looks up a zoo system by `name` or `name:args`.
pub fn zoo(spec: &str) -> Result<SystemDef, VfError> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let Some(&(_, default, desc)) = NAMES.iter().find(|(n, _, _)| *n == name) else {
        return Err(VfError::UnknownSystem {
            name: spec.into(),
            available: NAMES.iter().map(|(n, _, _)| *n).collect::<Vec<_>>().join(", "),
        });
    };
    let args = if args.is_empty() { default } else { args };
    let full = if args.is_empty() { name.to_string() } else { format!("{name}:{args}") };
    let ex = Some(REGRESSION_LEN);
    let wv = |j, nu| w(j, nu).expect("valid");
    let pv = |j, k, nu| p(j, k, nu).expect("valid");
    match name {
        "easy" => Builder::from(&["0", "x1", "x1^2 - x2^2 - x1^3 - 4*x1*x2"])
            .value(m(0), 1, 1)
            .value(m(1), 2, 1)
            .value(wv(1, 0), 3, 2)
            .value(wv(2, 0), 3, -2)
            .value(pv(1, 1, 0), 3, -6)
            .build(&full, desc, ex),
        "no_zm_pure" => Builder::from(&["0", "x1 + 1/2*x1^2", "-x1*x2"])
            .value(m(0), 1, 1)
            .value(m(1), 2, 1)
            .value(wv(1, 0), 2, 1)
            .value(pv(1, 2, 0), 3, 1)
            .build(&full, desc, Some(4)),
        "wk_prototype" => {
            let v = params(name, args, 2)?;
            let (k, pw) = (v[0] as usize, v[1]);
            if k == 0 || pw < 3 {
                return Err(bad(name, "requires k >= 1 and p >= 3"));
            }
            let mut drift = vec!["0".to_string()];
            for i in 2..=k {
                drift.push(x(i - 1));
            }
            drift.push(format!("{}^2 - x1^{pw}", x(k)));
            Builder::new(drift)
                .chain(k)
                .value(wv(k as u32, 0), k + 1, 2)
                .value_q(ad_x1(pw), k + 1, -factorial(pw))
                .build(&full, desc, ex)
        }
        "jakubczyk" => Builder::from(&["0", "x1", "x2^2 + x1^3"])
            .chain(2)
            .value(pv(1, 1, 0), 3, 6)
            .value(wv(2, 0), 3, 2)
            .build(&full, desc, ex),
        "w2_vs_q111" => Builder::from(&["0", "x1", "x2^2 - x1^4"])
            .chain(2)
            .value(wv(2, 0), 3, 2)
            .value(q(1, 1, 1, 0).expect("valid"), 3, -24)
            .build(&full, desc, ex),
        "x22_x1k" => {
            let k = params(name, args, 1)?[0];
            if !(3..=5).contains(&k) {
                return Err(bad(name, "k must be 3, 4 or 5"));
            }
            Builder::new(vec!["0".into(), "x1".into(), format!("x2^2 - x1^{k}")])
                .chain(2)
                .value(wv(2, 0), 3, 2)
                .value_q(ad_x1(k), 3, -factorial(k))
                .build(&full, desc, ex)
        }
        "w3_vs_p1l" => {
            let v = params(name, args, 2)?;
            let (l, nu) = (v[0] as usize, v[1] as usize);
            if l == 0 {
                return Err(bad(name, "requires l >= 1"));
            }
            let chain = l.max(3);
            let base = chain + 1;
            let c = if l == 1 { 6 } else { 2 };
            let mut b = Builder::new(w3_competitor(chain, &format!("x1^2*{}", x(l)), nu)).chain(chain);
            for mu in 0..=nu {
                b = b.value(pv(1, l as u32, mu as u32), base + mu, c);
            }
            b.value(wv(3, 0), base + nu, 2).build(&full, desc, ex)
        }
        "w3_vs_q112" | "w3_vs_r1111" => {
            let nu = params(name, args, 1)?[0] as usize;
            let term = if name == "w3_vs_q112" { "x1^3*x2" } else { "x1^5" };
            let coeff = 120;
            let mut b = Builder::new(w3_competitor(3, term, nu)).chain(3);
            for mu in 0..=nu as u32 {
                b = if name == "w3_vs_q112" {
                    // d/dx2 (x1^3 x2) carries a factor 3! from x1^3, not 2!.
                    b.erratum(q(1, 1, 2, mu).expect("valid"), 4 + mu as usize, 2, 6)
                } else {
                    b.value(r(1, 1, 1, 1, mu).expect("valid"), 4 + mu as usize, coeff)
                };
            }
            b.value(wv(3, 0), 4 + nu, 2).build(&full, desc, ex)
        }
        "w3_vs_rsharp" => {
            let v = params(name, args, 2)?;
            let (mu, nu) = (v[0] as usize, v[1] as usize);
            let mut drift: Vec<String> = ["0", "x1", "x2", "x1^3"].iter().map(|s| s.to_string()).collect();
            for k in 1..=mu {
                drift.push(x(4 + k - 1));
            }
            let term = format!("x1^2*{}", x(4 + mu));
            if nu == 0 {
                drift.push(format!("x3^2 + {term}"));
            } else {
                drift.push(term);
                for k in 1..nu {
                    drift.push(x(5 + mu + k - 1));
                }
                drift.push(format!("x3^2 + {}", x(5 + mu + nu - 1)));
            }
            let sign = if mu % 2 == 0 { -12 } else { 12 };
            let mut b = Builder::new(drift).chain(3);
            for k in 0..=mu {
                b = b.value(pv(1, 1, k as u32), 4 + k, 6);
            }
            for k in 0..=nu {
                b = b.value(rs(1, 1, 1, mu as u32, k as u32).expect("valid"), 5 + mu + k, sign);
            }
            b.value(wv(3, 0), 5 + mu + nu, 2).build(&full, desc, ex)
        }
        "w3_vs_q111" => Builder::from(&["0", "x1", "x2", "x3^2 - x1^4"])
            .chain(3)
            .value(wv(3, 0), 4, 2)
            .value(q(1, 1, 1, 0).expect("valid"), 4, -24)
            .build(&full, desc, ex),
        "w3_time" => Builder::from(&["0", "x1", "x2", "x1^4 + x3^3", "x3^2 - x4"])
            .value(wv(3, 0), 5, 2)
            .build(&full, desc, None),
        "sextic" => {
            let pw = params(name, args, 1)?[0];
            if pw < 2 {
                return Err(bad(name, "requires p >= 2"));
            }
            Builder::new(vec!["0".into(), "x1".into(), "x1^3".into(), format!("x3^2 - x2^{pw}")])
                .chain(2)
                .value(pv(1, 1, 0), 3, 6)
                .value(d(), 4, 72)
                .value_q(BracketTree::ad(&m(1), pw, &BracketTree::x0()), 4, -factorial(pw))
                .build(&full, desc, ex)
        }
        "kawski_53" => Builder::from(&["0", "x1", "x1^3", "x3^2 - x2^2*x1^4"])
            .chain(2)
            .value(pv(1, 1, 0), 3, 6)
            .value(d(), 4, 72)
            .build(&full, desc, None),
        "sextic_x3x1_4" => Builder::from(&["0", "x1", "x1^3", "x3^2 + x3*x1^4"])
            .chain(2)
            .value(pv(1, 1, 0), 3, 6)
            .value(d(), 4, 72)
            .value(BracketTree::pair(&pv(1, 1, 0), &ad_x1(4)), 4, 144)
            .build(&full, desc, None),
        "qb10" => Builder::from(&["0", "x1", "x2 + x1^2", "x3", "x3^2 + 2*x1^2*x4"])
            .chain(4)
            .value(wv(1, 0), 3, 2)
            .value(wv(1, 1), 4, 2)
            .value(qf(1, 0, 0).expect("valid"), 5, -8)
            .value(wv(3, 0), 5, 2)
            .build(&full, desc, ex),
        "qb11" => {
            let mut b = Builder::from(&["0", "x1 + x1^2", "x2", "x3", "x4", "x3^2 - 2*x1^2*x5"]).chain(5);
            for nu in 0..=3 {
                b = b.value(wv(1, nu), 2 + nu as usize, 2);
            }
            b.value(qf(1, 1, 0).expect("valid"), 6, -8).value(wv(3, 0), 6, 2).build(&full, desc, ex)
        }
        "qb12" => Builder::from(&["x1^2", "x1", "x2", "x3", "x4", "x5", "x3^2 + 2*x1^2*x6"])
            .value(wv(3, 0), 7, 2)
            .value(qf(1, 2, 0).expect("valid"), 7, -8)
            .build(&full, desc, None),
        _ => unreachable!("name checked above"),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZooMismatch {
    pub bracket: String,
    pub expected: Vec<String>,
    pub found: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZooReport {
    pub system: String,
    pub listed: usize,
    /// Brackets checked to vanish.
    pub zeros_checked: usize,
    /// Disagreements with the recomputed table.
    pub mismatches: Vec<ZooMismatch>,
    /// Published values that differ from the evaluation (known errata).
    pub published_conflicts: Vec<ZooMismatch>,
}

impl ZooReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}

/// Compares listed values and, for exhaustive tables, the vanishing of every other
/// bracket of B* up to `max_len`.
pub fn check_zoo(sys: &SystemDef, max_len: u32) -> ZooReport {
    let ev = Evaluator::new(Arc::new(sys.clone()));
    let mut mismatches = Vec::new();
    let mut published_conflicts = Vec::new();
    for e in &sys.expected {
        let found = ev.eval_bracket(&e.bracket);
        let row = |want: &[Rational]| ZooMismatch {
            bracket: e.bracket.canonical(),
            expected: strings(want),
            found: strings(&found),
        };
        if found != e.actual() {
            mismatches.push(row(e.actual()));
        }
        if found != e.value {
            published_conflicts.push(row(&e.value));
        }
    }
    let mut zeros = 0;
    if let Some(l) = sys.exhaustive_len {
        let zero = vec![Rational::zero(); sys.dim()];
        for h in basis_up_to_length(l.min(max_len)) {
            if sys.expected.iter().any(|e| &e.bracket == h.tree()) {
                continue;
            }
            zeros += 1;
            let found = ev.eval_bracket(h.tree());
            if found != zero {
                mismatches.push(ZooMismatch {
                    bracket: h.label(),
                    expected: strings(&zero),
                    found: strings(&found),
                });
            }
        }
    }
    ZooReport {
        system: sys.name.clone(),
        listed: sys.expected.len(),
        zeros_checked: zeros,
        mismatches,
        published_conflicts,
    }
}
