//! Constructors for the named bracket families M, W, P, Q, Qs, Qf, R, Rs and D.

use std::fmt;

use super::tree::BracketTree;
use super::AlgebraError;

/// A named element; indices follow the family definitions (j, k, l, m >= 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedForm {
    M { nu: u32 },
    W { j: u32, nu: u32 },
    P { j: u32, k: u32, nu: u32 },
    Q { j: u32, k: u32, l: u32, nu: u32 },
    Qs { j: u32, mu: u32, k: u32, nu: u32 },
    Qf { j: u32, mu: u32, nu: u32 },
    R { j: u32, k: u32, l: u32, m: u32, nu: u32 },
    Rs { j: u32, k: u32, l: u32, mu: u32, nu: u32 },
    D,
}

fn invalid(family: &str, msg: &str) -> AlgebraError {
    AlgebraError::InvalidIndex {
        family: family.to_string(),
        msg: msg.to_string(),
    }
}

fn positive(family: &str, idx: &[u32]) -> Result<(), AlgebraError> {
    if idx.contains(&0) {
        return Err(invalid(family, "indices j, k, l, m must be >= 1"));
    }
    Ok(())
}

pub fn m(nu: u32) -> BracketTree {
    BracketTree::x1().zeros(nu)
}

pub fn w(j: u32, nu: u32) -> Result<BracketTree, AlgebraError> {
    positive("W", &[j])?;
    Ok(BracketTree::pair(&m(j - 1), &m(j)).zeros(nu))
}

pub fn p(j: u32, k: u32, nu: u32) -> Result<BracketTree, AlgebraError> {
    positive("P", &[j, k])?;
    if j > k {
        return Err(invalid("P", "requires j <= k"));
    }
    Ok(BracketTree::pair(&m(k - 1), &w(j, 0)?).zeros(nu))
}

pub fn q(j: u32, k: u32, l: u32, nu: u32) -> Result<BracketTree, AlgebraError> {
    positive("Q", &[j, k, l])?;
    if !(j <= k && k <= l) {
        return Err(invalid("Q", "requires j <= k <= l"));
    }
    Ok(BracketTree::pair(&m(l - 1), &p(j, k, 0)?).zeros(nu))
}

pub fn qs(j: u32, mu: u32, k: u32, nu: u32) -> Result<BracketTree, AlgebraError> {
    positive("Qs", &[j, k])?;
    if j >= k {
        return Err(invalid("Qs", "requires j < k"));
    }
    Ok(BracketTree::pair(&w(j, mu)?, &w(k, 0)?).zeros(nu))
}

pub fn qf(j: u32, mu: u32, nu: u32) -> Result<BracketTree, AlgebraError> {
    positive("Qf", &[j])?;
    Ok(BracketTree::pair(&w(j, mu)?, &w(j, mu + 1)?).zeros(nu))
}

pub fn r(j: u32, k: u32, l: u32, mm: u32, nu: u32) -> Result<BracketTree, AlgebraError> {
    positive("R", &[j, k, l, mm])?;
    if !(j <= k && k <= l && l <= mm) {
        return Err(invalid("R", "requires j <= k <= l <= m"));
    }
    Ok(BracketTree::pair(&m(mm - 1), &q(j, k, l, 0)?).zeros(nu))
}

pub fn rs(j: u32, k: u32, l: u32, mu: u32, nu: u32) -> Result<BracketTree, AlgebraError> {
    positive("Rs", &[j, k, l])?;
    if j > k {
        return Err(invalid("Rs", "requires j <= k"));
    }
    Ok(BracketTree::pair(&w(l, mu)?, &p(j, k, 0)?).zeros(nu))
}

/// ad^2_{P(1,1,0)}(X0) = (P(1,1,0), P(1,1,1)).
pub fn d() -> BracketTree {
    let p11 = p(1, 1, 0).expect("valid indices");
    BracketTree::ad(&p11, 2, &BracketTree::x0())
}

impl NamedForm {
    pub fn tree(&self) -> Result<BracketTree, AlgebraError> {
        match *self {
            NamedForm::M { nu } => Ok(m(nu)),
            NamedForm::W { j, nu } => w(j, nu),
            NamedForm::P { j, k, nu } => p(j, k, nu),
            NamedForm::Q { j, k, l, nu } => q(j, k, l, nu),
            NamedForm::Qs { j, mu, k, nu } => qs(j, mu, k, nu),
            NamedForm::Qf { j, mu, nu } => qf(j, mu, nu),
            NamedForm::R { j, k, l, m, nu } => r(j, k, l, m, nu),
            NamedForm::Rs { j, k, l, mu, nu } => rs(j, k, l, mu, nu),
            NamedForm::D => Ok(d()),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            NamedForm::M { .. } => "M",
            NamedForm::W { .. } => "W",
            NamedForm::P { .. } => "P",
            NamedForm::Q { .. } => "Q",
            NamedForm::Qs { .. } => "Qs",
            NamedForm::Qf { .. } => "Qf",
            NamedForm::R { .. } => "R",
            NamedForm::Rs { .. } => "Rs",
            NamedForm::D => "D",
        }
    }

    /// Indices in grammar order.
    pub fn indices(&self) -> Vec<u32> {
        match *self {
            NamedForm::M { nu } => vec![nu],
            NamedForm::W { j, nu } => vec![j, nu],
            NamedForm::P { j, k, nu } => vec![j, k, nu],
            NamedForm::Q { j, k, l, nu } => vec![j, k, l, nu],
            NamedForm::Qs { j, mu, k, nu } => vec![j, mu, k, nu],
            NamedForm::Qf { j, mu, nu } => vec![j, mu, nu],
            NamedForm::R { j, k, l, m, nu } => vec![j, k, l, m, nu],
            NamedForm::Rs { j, k, l, mu, nu } => vec![j, k, l, mu, nu],
            NamedForm::D => vec![],
        }
    }

    /// Builds a form from a family name and its indices in grammar order.
    pub fn from_parts(family: &str, idx: &[u32]) -> Result<NamedForm, AlgebraError> {
        let want = match family {
            "M" => 1,
            "W" => 2,
            "P" | "Qf" => 3,
            "Q" | "Qs" => 4,
            "R" | "Rs" => 5,
            "D" => 0,
            _ => return Err(invalid(family, "unknown family")),
        };
        if idx.len() != want {
            return Err(invalid(family, &format!("expected {want} indices, got {}", idx.len())));
        }
        let f = match family {
            "M" => NamedForm::M { nu: idx[0] },
            "W" => NamedForm::W { j: idx[0], nu: idx[1] },
            "P" => NamedForm::P { j: idx[0], k: idx[1], nu: idx[2] },
            "Q" => NamedForm::Q { j: idx[0], k: idx[1], l: idx[2], nu: idx[3] },
            "Qs" => NamedForm::Qs { j: idx[0], mu: idx[1], k: idx[2], nu: idx[3] },
            "Qf" => NamedForm::Qf { j: idx[0], mu: idx[1], nu: idx[2] },
            "R" => NamedForm::R { j: idx[0], k: idx[1], l: idx[2], m: idx[3], nu: idx[4] },
            "Rs" => NamedForm::Rs { j: idx[0], k: idx[1], l: idx[2], mu: idx[3], nu: idx[4] },
            _ => NamedForm::D,
        };
        f.tree()?;
        Ok(f)
    }

    /// Recognizes a tree built by one of the constructors above.
    pub fn recognize(t: &BracketTree) -> Option<NamedForm> {
        if t.is_x0() {
            return None;
        }
        let (germ, nu) = t.germ();
        if germ.is_x1() {
            return Some(NamedForm::M { nu });
        }
        let (a, b) = germ.children()?;
        let fa = Self::recognize(a)?;
        let fb = Self::recognize(b)?;
        use NamedForm::*;
        let form = match (fa, fb) {
            (M { nu: i }, M { nu: k }) if k == i + 1 => W { j: k, nu },
            (M { nu: i }, W { j, nu: 0 }) if j <= i + 1 => P { j, k: i + 1, nu },
            (M { nu: i }, P { j, k, nu: 0 }) if k <= i + 1 => Q { j, k, l: i + 1, nu },
            (M { nu: i }, Q { j, k, l, nu: 0 }) if l <= i + 1 => R { j, k, l, m: i + 1, nu },
            (W { j, nu: mu }, W { j: k, nu: 0 }) if j < k => Qs { j, mu, k, nu },
            (W { j, nu: mu }, W { j: k, nu: mu2 }) if j == k && mu2 == mu + 1 => Qf { j, mu, nu },
            (P { j: 1, k: 1, nu: 0 }, P { j: 1, k: 1, nu: 1 }) if nu == 0 => D,
            (W { j: l, nu: mu }, P { j, k, nu: 0 }) => Rs { j, k, l, mu, nu },
            _ => return None,
        };
        Some(form)
    }

    pub fn n1(&self) -> u32 {
        match self {
            NamedForm::M { .. } => 1,
            NamedForm::W { .. } => 2,
            NamedForm::P { .. } => 3,
            NamedForm::Q { .. } | NamedForm::Qs { .. } | NamedForm::Qf { .. } => 4,
            NamedForm::R { .. } | NamedForm::Rs { .. } => 5,
            NamedForm::D => 6,
        }
    }
}

impl fmt::Display for NamedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let NamedForm::D = self {
            return f.write_str("D");
        }
        let idx: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "{}({})", self.family(), idx.join(","))
    }
}
