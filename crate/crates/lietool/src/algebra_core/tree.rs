//! Elements of the free magma Br(X) over the two indeterminates X0, X1.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    X0,
    X1,
}

impl Generator {
    pub fn index(self) -> usize {
        match self {
            Generator::X0 => 0,
            Generator::X1 => 1,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::X0 => f.write_str("X0"),
            Generator::X1 => f.write_str("X1"),
        }
    }
}

#[derive(Debug)]
enum Shape {
    Leaf(Generator),
    Pair(BracketTree, BracketTree),
}

#[derive(Debug)]
struct Node {
    shape: Shape,
    n0: u32,
    n1: u32,
    height: u32,
    in_g: bool,
    hash: u64,
}

/// An immutable binary bracket tree. Cloning is cheap (shared node).
#[derive(Clone, Debug)]
pub struct BracketTree(Arc<Node>);

fn mix(a: u64, b: u64) -> u64 {
    let mut h = a ^ b.rotate_left(29);
    h = h.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    h ^= h >> 31;
    h.wrapping_mul(0xBF58_476D_1CE4_E5B9) ^ (h >> 27)
}

impl BracketTree {
    pub fn leaf(g: Generator) -> Self {
        let (n0, n1) = match g {
            Generator::X0 => (1, 0),
            Generator::X1 => (0, 1),
        };
        BracketTree(Arc::new(Node {
            shape: Shape::Leaf(g),
            n0,
            n1,
            height: 0,
            in_g: true,
            hash: 0x51_7CC1_B727_220A ^ (g.index() as u64 + 1),
        }))
    }

    pub fn x0() -> Self {
        Self::leaf(Generator::X0)
    }

    pub fn x1() -> Self {
        Self::leaf(Generator::X1)
    }

    /// The formal bracket (a, b).
    pub fn pair(a: &BracketTree, b: &BracketTree) -> Self {
        let in_g = a.0.in_g && b.0.in_g && !a.is_x0();
        BracketTree(Arc::new(Node {
            n0: a.n0() + b.n0(),
            n1: a.n1() + b.n1(),
            height: 1 + a.height().max(b.height()),
            in_g,
            hash: mix(a.0.hash, mix(b.0.hash, 0xA5A5)),
            shape: Shape::Pair(a.clone(), b.clone()),
        }))
    }

    /// b 0^nu: right-bracket with X0, nu times.
    pub fn zeros(&self, nu: u32) -> Self {
        let x0 = Self::x0();
        let mut t = self.clone();
        for _ in 0..nu {
            t = Self::pair(&t, &x0);
        }
        t
    }

    /// ad_a^m(b) = (a, (a, ... (a, b))).
    pub fn ad(a: &BracketTree, m: u32, b: &BracketTree) -> Self {
        let mut t = b.clone();
        for _ in 0..m {
            t = Self::pair(a, &t);
        }
        t
    }

    pub fn n0(&self) -> u32 {
        self.0.n0
    }

    pub fn n1(&self) -> u32 {
        self.0.n1
    }

    pub fn len(&self) -> u32 {
        self.0.n0 + self.0.n1
    }

    /// Never true; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bidegree(&self) -> (u32, u32) {
        (self.0.n1, self.0.n0)
    }

    pub fn height(&self) -> u32 {
        self.0.height
    }

    /// Whether X0 is never a left factor in any sub-bracket (the set G).
    pub fn in_g(&self) -> bool {
        self.0.in_g
    }

    pub fn generator(&self) -> Option<Generator> {
        match &self.0.shape {
            Shape::Leaf(g) => Some(*g),
            Shape::Pair(..) => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.0.shape, Shape::Leaf(_))
    }

    pub fn is_x0(&self) -> bool {
        matches!(self.0.shape, Shape::Leaf(Generator::X0))
    }

    pub fn is_x1(&self) -> bool {
        matches!(self.0.shape, Shape::Leaf(Generator::X1))
    }

    pub fn children(&self) -> Option<(&BracketTree, &BracketTree)> {
        match &self.0.shape {
            Shape::Leaf(_) => None,
            Shape::Pair(a, b) => Some((a, b)),
        }
    }

    /// Left factor lambda(b).
    pub fn left(&self) -> Option<&BracketTree> {
        self.children().map(|(a, _)| a)
    }

    /// Right factor mu(b).
    pub fn right(&self) -> Option<&BracketTree> {
        self.children().map(|(_, b)| b)
    }

    /// Unique factorization b = germ 0^nu with a germ that is not of the form (., X0).
    /// X0 itself is returned unchanged with nu = 0.
    pub fn germ(&self) -> (BracketTree, u32) {
        let mut t = self.clone();
        let mut nu = 0;
        loop {
            let next = match t.children() {
                Some((a, b)) if b.is_x0() => a.clone(),
                _ => break,
            };
            t = next;
            nu += 1;
        }
        (t, nu)
    }

    pub fn ptr_eq(&self, other: &BracketTree) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    /// Canonical fully parenthesized text.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl PartialEq for BracketTree {
    fn eq(&self, other: &Self) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.0.hash != other.0.hash || self.0.n0 != other.0.n0 || self.0.n1 != other.0.n1 {
            return false;
        }
        match (&self.0.shape, &other.0.shape) {
            (Shape::Leaf(a), Shape::Leaf(b)) => a == b,
            (Shape::Pair(a1, b1), Shape::Pair(a2, b2)) => a1 == a2 && b1 == b2,
            _ => false,
        }
    }
}

impl Eq for BracketTree {}

impl Hash for BracketTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Display for BracketTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.shape {
            Shape::Leaf(g) => write!(f, "{g}"),
            Shape::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_text() {
        let m1 = BracketTree::pair(&BracketTree::x1(), &BracketTree::x0());
        let w = BracketTree::pair(&BracketTree::x1(), &m1);
        assert_eq!(w.bidegree(), (2, 1));
        assert_eq!(w.len(), 3);
        assert_eq!(w.to_string(), "(X1,(X1,X0))");
        assert_eq!(w.height(), 2);
    }

    #[test]
    fn germ_strips_trailing_zeros() {
        let w = BracketTree::pair(&BracketTree::x1(), &BracketTree::x1().zeros(1));
        let (g, nu) = w.zeros(3).germ();
        assert_eq!(g, w);
        assert_eq!(nu, 3);
        assert_eq!(BracketTree::x1().zeros(4).germ(), (BracketTree::x1(), 4));
    }

    #[test]
    fn membership_in_g() {
        let bad = BracketTree::pair(&BracketTree::x0(), &BracketTree::x1());
        assert!(!bad.in_g());
        assert!(!BracketTree::pair(&BracketTree::x1(), &bad).in_g());
        assert!(BracketTree::x1().zeros(2).in_g());
    }

    #[test]
    fn structural_equality_ignores_sharing() {
        let a = BracketTree::x1().zeros(2);
        let b = BracketTree::pair(&BracketTree::pair(&BracketTree::x1(), &BracketTree::x0()), &BracketTree::x0());
        assert_eq!(a, b);
        assert!(!a.ptr_eq(&b));
        assert_ne!(a, BracketTree::x1().zeros(3));
    }
}
