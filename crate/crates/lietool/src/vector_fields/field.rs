//! Polynomial vector fields, their bracket, systems and the evaluation map f_b(0).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::mpoly::MPoly;
use super::VfError;
use crate::algebra_core::{parse_rational, BracketTree, Generator, Rational};
use crate::hall_bstar::LieElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    components: Vec<MPoly>,
}

impl PolyVectorField {
    pub fn new(components: Vec<MPoly>) -> Result<Self, VfError> {
        let d = components.len();
        if let Some(p) = components.iter().find(|p| p.nvars() != d) {
            return Err(VfError::DimensionMismatch { left: d, right: p.nvars() });
        }
        Ok(PolyVectorField { components })
    }

    pub fn zero(dim: usize) -> Self {
        PolyVectorField {
            components: vec![MPoly::zero(dim); dim],
        }
    }

    /// Constant field e_i, 0-based.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut f = Self::zero(dim);
        f.components[i] = MPoly::constant(dim, Rational::from_integer(1.into()));
        f
    }

    /// One polynomial expression per component.
    pub fn parse(exprs: &[&str]) -> Result<Self, VfError> {
        let d = exprs.len();
        Self::new(exprs.iter().map(|e| MPoly::parse(d, e)).collect::<Result<_, _>>()?)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[MPoly] {
        &self.components
    }

    pub fn at_zero(&self) -> Vec<Rational> {
        self.components.iter().map(MPoly::constant_term).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(MPoly::is_zero)
    }

    pub fn truncate(&self, max_degree: u32) -> Self {
        PolyVectorField {
            components: self.components.iter().map(|p| p.truncate(max_degree)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        PolyVectorField {
            components: self.components.iter().zip(&o.components).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        PolyVectorField {
            components: self.components.iter().map(|p| p.scale(k)).collect(),
        }
    }

    /// Jacobian at the origin, row i = d f_i / d x_j (0).
    pub fn jacobian_at_zero(&self) -> Vec<Vec<Rational>> {
        let d = self.dim();
        self.components
            .iter()
            .map(|p| (0..d).map(|j| p.diff(j).constant_term()).collect())
            .collect()
    }

    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval_f64(x)).collect()
    }
}

/// [f, g] = (Dg) f - (Df) g, keeping monomials of degree <= `max_degree`.
fn bracket_truncated(f: &PolyVectorField, g: &PolyVectorField, max_degree: u32) -> PolyVectorField {
    let d = f.dim();
    let components = (0..d)
        .map(|i| {
            let mut acc = MPoly::zero(d);
            for j in 0..d {
                if !f.components[j].is_zero() {
                    acc = acc.add(&g.components[i].diff(j).mul_truncated(&f.components[j], max_degree));
                }
                if !g.components[j].is_zero() {
                    acc = acc.sub(&f.components[i].diff(j).mul_truncated(&g.components[j], max_degree));
                }
            }
            acc
        })
        .collect();
    PolyVectorField { components }
}

pub fn vf_bracket(f: &PolyVectorField, g: &PolyVectorField) -> Result<PolyVectorField, VfError> {
    if f.dim() != g.dim() {
        return Err(VfError::DimensionMismatch {
            left: f.dim(),
            right: g.dim(),
        });
    }
    Ok(bracket_truncated(f, g, u32::MAX))
}

/// A listed value f_b(0) that a zoo system is known to have.
#[derive(Clone, Debug)]
pub struct ExpectedValue {
    pub bracket: BracketTree,
    /// The published value.
    pub value: Vec<Rational>,
    /// Independently recomputed value, when the published one is wrong.
    pub corrected: Option<Vec<Rational>>,
}

impl ExpectedValue {
    pub fn actual(&self) -> &[Rational] {
        self.corrected.as_deref().unwrap_or(&self.value)
    }
}

/// x' = f0(x) + u f1(x) with f0(0) = 0.
#[derive(Clone, Debug)]
pub struct SystemDef {
    pub name: String,
    pub description: String,
    f0: PolyVectorField,
    f1: PolyVectorField,
    /// Known nonzero values, empty for user systems.
    pub expected: Vec<ExpectedValue>,
    /// When set, every bracket of at most this length not in `expected` evaluates to 0.
    pub exhaustive_len: Option<u32>,
}

impl SystemDef {
    pub fn new(name: &str, f0: PolyVectorField, f1: PolyVectorField) -> Result<Self, VfError> {
        if f0.dim() != f1.dim() {
            return Err(VfError::DimensionMismatch {
                left: f0.dim(),
                right: f1.dim(),
            });
        }
        if let Some(i) = f0.at_zero().iter().position(|c| !c.is_zero()) {
            return Err(VfError::DriftNotZero(i + 1));
        }
        Ok(SystemDef {
            name: name.into(),
            description: String::new(),
            f0,
            f1,
            expected: Vec::new(),
            exhaustive_len: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.f0.dim()
    }

    pub fn f0(&self) -> &PolyVectorField {
        &self.f0
    }

    pub fn f1(&self) -> &PolyVectorField {
        &self.f1
    }

    /// H0 = D f0 (0).
    pub fn h0(&self) -> Vec<Vec<Rational>> {
        self.f0.jacobian_at_zero()
    }

    pub fn from_json(text: &str) -> Result<Self, VfError> {
        let file: SystemFile = serde_json::from_str(text).map_err(|e| VfError::Json(e.to_string()))?;
        let field = |comps: Vec<Vec<TermFile>>| -> Result<PolyVectorField, VfError> {
            if comps.len() != file.dim {
                return Err(VfError::DimensionMismatch {
                    left: file.dim,
                    right: comps.len(),
                });
            }
            let mut out = Vec::new();
            for terms in comps {
                let mut p = MPoly::zero(file.dim);
                for t in terms {
                    if t.powers.len() != file.dim {
                        return Err(VfError::DimensionMismatch {
                            left: file.dim,
                            right: t.powers.len(),
                        });
                    }
                    let c = parse_rational(&t.coeff).map_err(|_| VfError::BadPolynomial(t.coeff.clone()))?;
                    p.add_term(t.powers, c);
                }
                out.push(p);
            }
            PolyVectorField::new(out)
        };
        let f0 = field(file.f0)?;
        let f1 = field(file.f1)?;
        SystemDef::new(file.name.as_deref().unwrap_or("custom"), f0, f1)
    }

    pub fn to_json(&self) -> String {
        let field = |f: &PolyVectorField| -> Vec<Vec<TermFile>> {
            f.components()
                .iter()
                .map(|p| {
                    p.terms()
                        .map(|(e, c)| TermFile {
                            coeff: c.to_string(),
                            powers: e.clone(),
                        })
                        .collect()
                })
                .collect()
        };
        let file = SystemFile {
            dim: self.dim(),
            name: Some(self.name.clone()),
            f0: field(&self.f0),
            f1: field(&self.f1),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }
}

#[derive(Serialize, Deserialize)]
struct TermFile {
    coeff: String,
    powers: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct SystemFile {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    f0: Vec<Vec<TermFile>>,
    f1: Vec<Vec<TermFile>>,
}

/// Evaluates f_b(0), memoizing each subtree's field with the degree it is exact to.
///
/// The bracket at tree depth h only needs its subtrees' monomials of degree <= h,
/// so fields are truncated by depth and stay small even for non-nilpotent systems.
pub struct Evaluator {
    sys: Arc<SystemDef>,
    memo: Mutex<HashMap<BracketTree, (u32, Arc<PolyVectorField>)>>,
}

impl Evaluator {
    pub fn new(sys: Arc<SystemDef>) -> Self {
        Evaluator {
            sys,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn system(&self) -> &SystemDef {
        &self.sys
    }

    /// f_b exact up to degree `prec`.
    pub fn field(&self, b: &BracketTree, prec: u32) -> Arc<PolyVectorField> {
        if let Some((p, f)) = self.memo.lock().expect("memo lock").get(b) {
            if *p >= prec {
                return f.clone();
            }
        }
        let f = match (b.generator(), b.children()) {
            (Some(Generator::X0), _) => self.sys.f0.truncate(prec),
            (Some(Generator::X1), _) => self.sys.f1.truncate(prec),
            (None, Some((l, r))) => {
                let fl = self.field(l, prec + 1);
                let fr = self.field(r, prec + 1);
                bracket_truncated(&fl, &fr, prec)
            }
            _ => unreachable!("a tree is a leaf or a pair"),
        };
        let f = Arc::new(f);
        let mut memo = self.memo.lock().expect("memo lock");
        let slot = memo.entry(b.clone()).or_insert((prec, f.clone()));
        if slot.0 < prec {
            *slot = (prec, f.clone());
        }
        f
    }

    pub fn eval_bracket(&self, b: &BracketTree) -> Vec<Rational> {
        self.field(b, 0).at_zero()
    }

    pub fn eval_lie(&self, a: &LieElement) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.sys.dim()];
        for (h, c) in a.iter() {
            for (o, v) in out.iter_mut().zip(self.eval_bracket(h.tree())) {
                *o += c * v;
            }
        }
        out
    }
}

/// f_b(0) for one bracket.
pub fn eval_bracket(sys: &SystemDef, b: &BracketTree) -> Vec<Rational> {
    Evaluator::new(Arc::new(sys.clone())).eval_bracket(b)
}

pub fn eval_lie(sys: &SystemDef, a: &LieElement) -> Vec<Rational> {
    Evaluator::new(Arc::new(sys.clone())).eval_lie(a)
}
