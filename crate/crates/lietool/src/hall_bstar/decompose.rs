//! Coordinates of Lie elements on the basis E(B*), by word expansion and exact solve.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use num_traits::{One, Zero};

use super::basis::{basis_layer, HallElement};
use super::HallError;
use crate::algebra_core::{word_expansion, BracketTree, Rational, TensorSeries, Word};
use crate::linalg::{Echelon, SparseVec};

/// Longest bracket accepted by `decompose`.
pub const MAX_DECOMPOSE_LEN: u32 = 16;

/// A finite combination of Hall elements; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieElement {
    coeffs: BTreeMap<HallElement, Rational>,
}

impl LieElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(h: HallElement) -> Self {
        let mut e = Self::zero();
        e.add_term(h, Rational::one());
        e
    }

    pub fn add_term(&mut self, h: HallElement, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(h.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&h);
        }
    }

    pub fn coeff(&self, h: &HallElement) -> Rational {
        self.coeffs.get(h).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of the Hall element whose tree is `t` (zero if `t` is not in B*).
    pub fn coeff_of_tree(&self, t: &BracketTree) -> Rational {
        self.coeff(&HallElement::trusted(t.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Terms in ascending B* order.
    pub fn iter(&self) -> impl Iterator<Item = (&HallElement, &Rational)> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        for (h, c) in &other.coeffs {
            out.add_term(h.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> LieElement {
        let mut out = LieElement::zero();
        for (h, x) in &self.coeffs {
            out.add_term(h.clone(), x * c);
        }
        out
    }

    /// Word expansion of the represented Lie polynomial.
    pub fn to_series(&self, cutoff: usize) -> TensorSeries {
        let mut s = TensorSeries::zero(cutoff);
        for (h, c) in &self.coeffs {
            for (w, k) in word_expansion(h.tree()) {
                s.add_term(w, c * Rational::from_integer(k.into()));
            }
        }
        s
    }
}

impl fmt::Display for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (h, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*{h}")?;
        }
        Ok(())
    }
}

/// Elimination data for one bidegree: the Hall expansions in echelon form.
struct LayerSolver {
    hall: Arc<Vec<HallElement>>,
    echelon: Echelon<Word>,
}

static SOLVERS: LazyLock<RwLock<HashMap<(u32, u32), Arc<LayerSolver>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

fn solver(n1: u32, n0: u32) -> Result<Arc<LayerSolver>, HallError> {
    if let Some(s) = SOLVERS.read().expect("solver lock").get(&(n1, n0)) {
        return Ok(s.clone());
    }
    let hall = basis_layer(n1, n0);
    let mut echelon = Echelon::new();
    for h in hall.iter() {
        let v: SparseVec<Word> = word_expansion(h.tree())
            .into_iter()
            .map(|(w, c)| (w, Rational::from_integer(c.into())))
            .collect();
        if !echelon.insert(v) {
            return Err(HallError::Dependent { n1, n0 });
        }
    }
    let s = Arc::new(LayerSolver { hall, echelon });
    Ok(SOLVERS
        .write()
        .expect("solver lock")
        .entry((n1, n0))
        .or_insert(s)
        .clone())
}

/// Decomposes a homogeneous word polynomial of bidegree (n1, n0).
fn decompose_homogeneous(n1: u32, n0: u32, v: &SparseVec<Word>) -> Result<LieElement, HallError> {
    if v.is_empty() {
        return Ok(LieElement::zero());
    }
    if n1 + n0 > MAX_DECOMPOSE_LEN {
        return Err(HallError::TooLong {
            len: n1 + n0,
            max: MAX_DECOMPOSE_LEN,
        });
    }
    let s = solver(n1, n0)?;
    let c = s.echelon.represent(v).map_err(|r| HallError::Residual {
        n1,
        n0,
        nonzero_words: r.len(),
    })?;
    let mut out = LieElement::zero();
    for (i, x) in c {
        out.add_term(s.hall[i].clone(), x);
    }
    Ok(out)
}

/// Coordinates of E(b) on E(B*).
pub fn decompose(b: &BracketTree) -> Result<LieElement, HallError> {
    if b.len() > MAX_DECOMPOSE_LEN {
        return Err(HallError::TooLong {
            len: b.len(),
            max: MAX_DECOMPOSE_LEN,
        });
    }
    let v: SparseVec<Word> = word_expansion(b)
        .into_iter()
        .map(|(w, c)| (w, Rational::from_integer(c.into())))
        .collect();
    let (n1, n0) = b.bidegree();
    decompose_homogeneous(n1, n0, &v)
}

/// Decomposes every homogeneous component of a series with zero constant term;
/// fails when some component is not a Lie polynomial.
pub fn decompose_series(s: &TensorSeries) -> Result<LieElement, HallError> {
    let mut out = LieElement::zero();
    for (n1, n0) in s.bidegrees() {
        if n1 + n0 == 0 {
            return Err(HallError::Residual {
                n1: 0,
                n0: 0,
                nonzero_words: 1,
            });
        }
        let comp = s.component(n1, n0);
        let v: SparseVec<Word> = comp.iter().map(|(w, c)| (*w, c.clone())).collect();
        out = out.add(&decompose_homogeneous(n1 as u32, n0 as u32, &v)?);
    }
    Ok(out)
}

/// [a, b] re-expanded on E(B*).
pub fn lie_bracket(a: &LieElement, b: &LieElement) -> Result<LieElement, HallError> {
    let mut by_degree: BTreeMap<(u32, u32), SparseVec<Word>> = BTreeMap::new();
    for (ha, ca) in a.iter() {
        for (hb, cb) in b.iter() {
            let t = BracketTree::pair(ha.tree(), hb.tree());
            if t.len() > MAX_DECOMPOSE_LEN {
                return Err(HallError::TooLong {
                    len: t.len(),
                    max: MAX_DECOMPOSE_LEN,
                });
            }
            let c = ca * cb;
            let acc = by_degree.entry(t.bidegree()).or_default();
            for (w, k) in word_expansion(&t) {
                let x = &c * Rational::from_integer(k.into());
                let e = acc.entry(w).or_insert_with(Rational::zero);
                *e += x;
                if e.is_zero() {
                    acc.remove(&w);
                }
            }
        }
    }
    let mut out = LieElement::zero();
    for ((n1, n0), v) in by_degree {
        out = out.add(&decompose_homogeneous(n1, n0, &v)?);
    }
    Ok(out)
}
