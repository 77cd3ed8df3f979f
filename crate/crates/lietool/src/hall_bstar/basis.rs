//! Hall elements of B* and their enumeration by bidegree.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock, RwLock};

use super::order::{cmp_g, is_hall};
use super::HallError;
use crate::algebra_core::{BracketTree, NamedForm};

/// An element of B* with its germ factorization.
#[derive(Clone, Debug)]
pub struct HallElement {
    tree: BracketTree,
    germ: BracketTree,
    nu: u32,
}

impl HallElement {
    pub fn new(tree: BracketTree) -> Result<Self, HallError> {
        if !is_hall(&tree) {
            return Err(HallError::NotHall(tree.canonical()));
        }
        Ok(Self::trusted(tree))
    }

    pub(crate) fn trusted(tree: BracketTree) -> Self {
        let (germ, nu) = tree.germ();
        HallElement { tree, germ, nu }
    }

    pub fn x0() -> Self {
        Self::trusted(BracketTree::x0())
    }

    pub fn x1() -> Self {
        Self::trusted(BracketTree::x1())
    }

    pub fn tree(&self) -> &BracketTree {
        &self.tree
    }

    pub fn germ(&self) -> &BracketTree {
        &self.germ
    }

    pub fn trailing_zeros(&self) -> u32 {
        self.nu
    }

    pub fn named(&self) -> Option<NamedForm> {
        NamedForm::recognize(&self.tree)
    }

    /// Named form when one applies, canonical text otherwise.
    pub fn label(&self) -> String {
        match self.named() {
            Some(f) => f.to_string(),
            None => self.tree.canonical(),
        }
    }
}

impl PartialEq for HallElement {
    fn eq(&self, other: &Self) -> bool {
        self.tree == other.tree
    }
}

impl Eq for HallElement {}

impl Hash for HallElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.tree.hash(state)
    }
}

impl Ord for HallElement {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_g(&self.tree, &other.tree)
    }
}

impl PartialOrd for HallElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HallElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

type Layer = Arc<Vec<HallElement>>;

static LAYERS: LazyLock<RwLock<HashMap<(u32, u32), Layer>>> = LazyLock::new(|| RwLock::new(HashMap::new()));

/// All elements of B* with exact bidegree (n1, n0), sorted ascending.
pub fn basis_layer(n1: u32, n0: u32) -> Layer {
    if let Some(l) = LAYERS.read().expect("layer lock").get(&(n1, n0)) {
        return l.clone();
    }
    let layer: Vec<HallElement> = match (n1, n0) {
        (0, 0) => Vec::new(),
        (0, 1) => vec![HallElement::x0()],
        (1, 0) => vec![HallElement::x1()],
        (0, _) => Vec::new(),
        _ => {
            let mut out = Vec::new();
            for p1 in 0..=n1 {
                for q1 in 0..=n0 {
                    let (p2, q2) = (n1 - p1, n0 - q1);
                    if p1 + q1 == 0 || p2 + q2 == 0 {
                        continue;
                    }
                    let left = basis_layer(p1, q1);
                    if left.is_empty() {
                        continue;
                    }
                    let right = basis_layer(p2, q2);
                    for a in left.iter() {
                        for b in right.iter() {
                            if hall_pair(a, b) {
                                out.push(HallElement::trusted(BracketTree::pair(&a.tree, &b.tree)));
                            }
                        }
                    }
                }
            }
            out.sort();
            out
        }
    };
    let layer = Arc::new(layer);
    LAYERS
        .write()
        .expect("layer lock")
        .entry((n1, n0))
        .or_insert(layer)
        .clone()
}

/// Hall condition for (a, b) with a and b already in B*.
fn hall_pair(a: &HallElement, b: &HallElement) -> bool {
    cmp_g(&a.tree, &b.tree) == Ordering::Less
        && match b.tree.left() {
            None => true,
            Some(l) => cmp_g(l, &a.tree) != Ordering::Greater,
        }
}

/// Elements of B* with n1 <= n1_max and n0 <= n0_max, sorted ascending.
pub fn enumerate_basis(n1_max: u32, n0_max: u32) -> Vec<HallElement> {
    let mut out = Vec::new();
    for n1 in 0..=n1_max {
        for n0 in 0..=n0_max {
            out.extend(basis_layer(n1, n0).iter().cloned());
        }
    }
    out.sort();
    out
}

/// Elements of B* with total length at most `max_len`, sorted ascending.
pub fn basis_up_to_length(max_len: u32) -> Vec<HallElement> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for n1 in 0..=len {
            out.extend(basis_layer(n1, len - n1).iter().cloned());
        }
    }
    out.sort();
    out
}
