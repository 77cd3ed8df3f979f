//! Neutralizing families and the span of their values at the origin.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra_core::{rat, BracketTree, NamedForm, Rational};
use crate::hall_bstar::basis_layer;
use crate::linalg::{dense_to_sparse, Echelon};
use crate::vector_fields::{Evaluator, SystemDef};

/// Truncation caps for infinite families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest n0 enumerated when a layer is scanned without an exact bound.
    pub cap_n0: u32,
    /// Largest value of an explicit family index (l, mu, ...) and of an open n1 range.
    pub cap_index: u32,
    /// Consecutive levels without rank growth accepted as stable; defaults to the dimension.
    pub window: Option<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            cap_n0: 12,
            cap_index: 12,
            window: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationMode {
    /// Degree weights give an exact n0 bound for every n1.
    WeightBound,
    /// Stability window under the caps.
    Heuristic,
}

/// Generator of an indexed family; returns None for index tuples outside the family.
#[derive(Clone)]
pub struct IndexedGen(pub Arc<dyn Fn(&[u32]) -> Option<BracketTree> + Send + Sync>);

impl IndexedGen {
    pub fn new(f: impl Fn(&[u32]) -> Option<BracketTree> + Send + Sync + 'static) -> Self {
        IndexedGen(Arc::new(f))
    }
}

impl fmt::Debug for IndexedGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("IndexedGen")
    }
}

#[derive(Clone, Debug)]
pub enum Member {
    /// A single bracket.
    Tree(BracketTree),
    /// {b 0^nu : nu >= 0}.
    Zeros(BracketTree),
    /// Every B* element whose n1 lies in the range and not in `skip` (any n0).
    Layers { n1_min: u32, n1_max: Option<u32>, skip: Vec<u32> },
    /// {gen(i) : i in N^arity}, each with all its trailing zeros when `zeros` is set.
    Indexed { name: String, arity: usize, gen: IndexedGen, zeros: bool },
}

#[derive(Clone, Debug, Default)]
pub struct FamilySpec {
    pub name: String,
    pub members: Vec<Member>,
    /// Brackets removed from every member.
    pub exclude: Vec<BracketTree>,
}

impl FamilySpec {
    pub fn new(name: &str) -> Self {
        FamilySpec {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn with(mut self, m: Member) -> Self {
        self.members.push(m);
        self
    }

    pub fn without(mut self, b: BracketTree) -> Self {
        self.exclude.push(b);
        self
    }

    /// B*_1 = {M_nu}.
    pub fn s1() -> Self {
        FamilySpec::new("S1").with(Member::Zeros(BracketTree::x1()))
    }
}

pub fn label(t: &BracketTree) -> String {
    match NamedForm::recognize(t) {
        Some(f) => f.to_string(),
        None => t.canonical(),
    }
}

/// Exact n0 bounds from degree weights.
///
/// With weights r_i on the coordinates, a monomial field x^m d_i has weight
/// sum_j m_j r_j - r_i, brackets add weights and a constant d_i has weight -r_i.
/// Choosing r_i >= 1 + w(m) for every drift monomial of component i puts the drift
/// at weight <= -1; the control then sits at weight <= delta1, so f_b(0)_i != 0
/// forces n0(b) <= n1(b) delta1 + r_i. Coordinates with a zero drift component
/// take a free weight a; several values of a are tried and the best bound kept.
#[derive(Clone, Debug)]
pub struct WeightBound {
    /// (r, delta1) per sampled a; delta1 is None when f1 vanishes identically.
    samples: Vec<(Vec<Rational>, Option<Rational>)>,
}

fn weight(m: &[u32], r: &[Rational]) -> Rational {
    m.iter().zip(r).fold(Rational::zero(), |acc, (&k, w)| acc + w * Rational::from_integer(k.into()))
}

impl WeightBound {
    /// None when the drift's dependency graph has a cycle (including x_i' depending on x_i).
    pub fn new(sys: &SystemDef) -> Option<Self> {
        let d = sys.dim();
        let deps: Vec<BTreeSet<usize>> = sys
            .f0()
            .components()
            .iter()
            .map(|p| p.terms().flat_map(|(e, _)| e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(j, _)| j)).collect())
            .collect();
        // Topological order by depth-first search; a grey node reached again is a cycle.
        let mut state = vec![0u8; d];
        let mut order = Vec::with_capacity(d);
        fn visit(i: usize, deps: &[BTreeSet<usize>], state: &mut [u8], order: &mut Vec<usize>) -> bool {
            match state[i] {
                1 => return false,
                2 => return true,
                _ => {}
            }
            state[i] = 1;
            for &j in &deps[i] {
                if !visit(j, deps, state, order) {
                    return false;
                }
            }
            state[i] = 2;
            order.push(i);
            true
        }
        for i in 0..d {
            if !visit(i, &deps, &mut state, &mut order) {
                return None;
            }
        }
        let mut samples = Vec::new();
        for (n, dd) in [(1, 8), (1, 4), (1, 2), (1, 1), (2, 1), (4, 1), (8, 1)] {
            let a = rat(n, dd);
            let mut r = vec![Rational::zero(); d];
            for &i in &order {
                let p = &sys.f0().components()[i];
                r[i] = if p.is_zero() {
                    a.clone()
                } else {
                    p.terms().map(|(e, _)| weight(e, &r)).max().expect("nonzero") + Rational::one()
                };
            }
            let delta1 = sys
                .f1()
                .components()
                .iter()
                .enumerate()
                .flat_map(|(i, p)| p.terms().map(|(e, _)| weight(e, &r) - &r[i]).collect::<Vec<_>>())
                .max();
            samples.push((r, delta1));
        }
        Some(WeightBound { samples })
    }

    fn component_bound(&self, i: usize, n1: u32) -> Rational {
        let n1q = Rational::from_integer(n1.into());
        self.samples
            .iter()
            .map(|(r, delta1)| match (n1, delta1) {
                (0, _) => r[i].clone(),
                (_, None) => Rational::from_integer((-1).into()),
                (_, Some(dl)) => &n1q * dl + &r[i],
            })
            .min()
            .expect("samples")
    }

    /// Largest n0 at which some bracket with this n1 can have f_b(0) != 0 (negative: none).
    pub fn n0_max(&self, n1: u32) -> i64 {
        let d = self.samples[0].0.len();
        (0..d)
            .map(|i| {
                let b = self.component_bound(i, n1).floor();
                i64::try_from(b.to_integer()).unwrap_or(i64::MAX)
            })
            .max()
            .unwrap_or(-1)
    }

    /// True when every n1' >= n1 has no nonzero bracket.
    pub fn exhausted_from(&self, n1: u32) -> bool {
        let n1q = Rational::from_integer(n1.max(1).into());
        let d = self.samples[0].0.len();
        (0..d).all(|i| {
            self.samples.iter().any(|(r, delta1)| match delta1 {
                None => true,
                Some(dl) => *dl < Rational::zero() && &n1q * dl + &r[i] < Rational::zero(),
            })
        })
    }
}

/// A span of values f_b(0) with the brackets that produced each basis vector.
#[derive(Clone, Debug)]
pub struct NeutralSpan {
    pub dim: usize,
    pub basis: Vec<(String, Vec<Rational>)>,
    echelon: Echelon<usize>,
    pub stabilized: bool,
    pub mode: TruncationMode,
    /// Number of family members whose value was computed.
    pub evaluated: usize,
    pub notes: Vec<String>,
}

impl NeutralSpan {
    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.echelon.contains(&dense_to_sparse(v))
    }

    /// Coefficients on the basis vectors reproducing v, re-verified.
    pub fn represent(&self, v: &[Rational]) -> Option<Vec<(String, Rational)>> {
        let c = self.echelon.represent(&dense_to_sparse(v)).ok()?;
        let mut check = vec![Rational::zero(); self.dim];
        let mut out = Vec::new();
        for (k, x) in c {
            let (name, g) = &self.basis[k];
            for (a, b) in check.iter_mut().zip(g) {
                *a += &x * b;
            }
            out.push((name.clone(), x));
        }
        assert_eq!(check, v, "span combination does not reproduce the vector");
        Some(out)
    }
}

struct Builder<'a> {
    ev: &'a Evaluator,
    bound: Option<WeightBound>,
    h0: Vec<Vec<Rational>>,
    exclude: &'a [BracketTree],
    caps: &'a Caps,
    window: usize,
    span: NeutralSpan,
}

impl Builder<'_> {
    fn full(&self) -> bool {
        self.span.rank() == self.span.dim
    }

    /// Adds a vector; true when the rank grew.
    fn push(&mut self, name: String, v: Vec<Rational>) -> bool {
        let s = dense_to_sparse(&v);
        if self.span.echelon.contains(&s) {
            return false;
        }
        self.span.echelon.insert(s);
        self.span.basis.push((name, v));
        true
    }

    /// False when the weights prove f_b(0) = 0.
    fn may_be_nonzero(&self, b: &BracketTree) -> bool {
        match &self.bound {
            Some(w) => i64::from(b.n0()) <= w.n0_max(b.n1()),
            None => true,
        }
    }

    fn eval(&mut self, b: &BracketTree) -> Vec<Rational> {
        self.span.evaluated += 1;
        self.ev.eval_bracket(b)
    }

    fn tree(&mut self, b: &BracketTree) -> bool {
        if self.exclude.contains(b) || !self.may_be_nonzero(b) {
            return false;
        }
        let v = self.eval(b);
        self.push(label(b), v)
    }

    /// b 0^nu for all nu through the Krylov chain H0^nu f_b(0), which is exact.
    fn zeros(&mut self, b: &BracketTree) -> bool {
        if !self.may_be_nonzero(b) {
            return false;
        }
        let mut v = self.eval(b);
        let mut chain = Echelon::new();
        let mut grew = false;
        for nu in 0.. {
            let s = dense_to_sparse(&v);
            if !chain.insert(s) {
                break;
            }
            let bn = b.zeros(nu);
            if !self.exclude.contains(&bn) {
                grew |= self.push(label(&bn), v.clone());
            }
            v = self
                .h0
                .iter()
                .map(|row| row.iter().zip(&v).fold(Rational::zero(), |acc, (a, x)| acc + a * x))
                .collect();
        }
        grew
    }

    fn layers(&mut self, n1_min: u32, n1_max: Option<u32>, skip: &[u32]) {
        let mut n1 = n1_min;
        loop {
            if self.full() {
                return;
            }
            if let Some(hi) = n1_max {
                if n1 > hi {
                    return;
                }
            }
            match (&self.bound, n1_max) {
                (Some(w), None) if w.exhausted_from(n1) => return,
                (_, None) if n1 > self.caps.cap_index => {
                    self.span.stabilized = false;
                    self.span.notes.push(format!("open n1 range cut at {}", self.caps.cap_index));
                    return;
                }
                _ => {}
            }
            if !skip.contains(&n1) {
                self.layer_n1(n1);
            }
            n1 += 1;
        }
    }

    fn layer_n1(&mut self, n1: u32) {
        let exact = self.bound.as_ref().map(|w| w.n0_max(n1));
        let top = match exact {
            Some(m) if m < 0 => return,
            Some(m) if m <= i64::from(self.caps.cap_n0) => m as u32,
            Some(m) => {
                self.span.stabilized = false;
                self.span.notes.push(format!("n1 = {n1}: bound n0 <= {m} exceeds cap_n0"));
                self.caps.cap_n0
            }
            None => self.caps.cap_n0,
        };
        let mut quiet = 0;
        for n0 in 0..=top {
            if self.full() {
                return;
            }
            let layer = basis_layer(n1, n0);
            if layer.is_empty() {
                continue;
            }
            let mut grew = false;
            for h in layer.iter() {
                grew |= self.tree(h.tree());
            }
            if exact.is_none() {
                quiet = if grew { 0 } else { quiet + 1 };
                if quiet >= self.window {
                    return;
                }
            }
        }
        if exact.is_none() {
            self.span.stabilized = false;
            self.span.notes.push(format!("n1 = {n1}: rank still moving at cap_n0"));
        }
    }

    fn indexed(&mut self, name: &str, arity: usize, gen: &IndexedGen, zeros: bool) {
        let cap = self.caps.cap_index;
        let mut quiet = 0;
        for level in 0..=(cap * arity as u32) {
            if self.full() {
                return;
            }
            let mut grew = false;
            let mut live = false;
            let mut any = false;
            for idx in tuples(arity, level, cap) {
                let Some(b) = (gen.0)(&idx) else { continue };
                any = true;
                if self.may_be_nonzero(&b) {
                    live = true;
                }
                grew |= if zeros { self.zeros(&b) } else { self.tree(&b) };
            }
            if !any {
                continue;
            }
            // Family indices only add X0 letters, so a level beyond the weight bound ends it.
            if self.bound.is_some() && !live {
                return;
            }
            if self.bound.is_none() {
                quiet = if grew { 0 } else { quiet + 1 };
                if quiet >= self.window {
                    return;
                }
            }
        }
        self.span.stabilized = false;
        self.span.notes.push(format!("{name}: index cap {cap} reached"));
    }
}

/// Index tuples of the given arity with entries <= cap summing to `level`.
fn tuples(arity: usize, level: u32, cap: u32) -> Vec<Vec<u32>> {
    if arity == 0 {
        return if level == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=level.min(cap) {
        for mut rest in tuples(arity - 1, level - first, cap) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Span of f_b(0) over the family, truncated as described on [`Caps`] and [`WeightBound`].
pub fn neutral_span(ev: &Evaluator, fam: &FamilySpec, caps: &Caps) -> NeutralSpan {
    let sys = ev.system();
    let dim = sys.dim();
    let bound = WeightBound::new(sys);
    let mode = if bound.is_some() {
        TruncationMode::WeightBound
    } else {
        TruncationMode::Heuristic
    };
    let mut b = Builder {
        ev,
        bound,
        h0: sys.h0(),
        exclude: &fam.exclude,
        caps,
        window: caps.window.unwrap_or(dim).max(1),
        span: NeutralSpan {
            dim,
            basis: Vec::new(),
            echelon: Echelon::new(),
            stabilized: true,
            mode,
            evaluated: 0,
            notes: Vec::new(),
        },
    };
    for m in &fam.members {
        if b.full() {
            break;
        }
        match m {
            Member::Tree(t) => {
                b.tree(t);
            }
            Member::Zeros(t) => {
                b.zeros(t);
            }
            Member::Layers { n1_min, n1_max, skip } => b.layers(*n1_min, *n1_max, skip),
            Member::Indexed { name, arity, gen, zeros } => b.indexed(name, *arity, gen, *zeros),
        }
    }
    let mut span = b.span;
    if span.rank() == dim && !span.stabilized {
        span.stabilized = true;
        span.notes.push("span is the whole space".into());
    }
    span
}
