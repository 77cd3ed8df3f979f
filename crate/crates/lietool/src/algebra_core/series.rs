//! Truncated formal series in the free associative algebra over {X0, X1}.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use super::tree::{BracketTree, Generator};
use super::word::Word;
use super::{AlgebraError, Rational};

/// Words of degree at most `cutoff` with exact rational coefficients.
///
/// An optional `n1_cap` additionally drops words with more than `n1_cap` letters X1.
/// Both truncations are quotients by graded ideals, so products stay exact.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSeries {
    cutoff: usize,
    n1_cap: Option<usize>,
    coeffs: HashMap<Word, Rational>,
}

impl TensorSeries {
    pub fn zero(cutoff: usize) -> Self {
        TensorSeries {
            cutoff,
            n1_cap: None,
            coeffs: HashMap::new(),
        }
    }

    pub fn one(cutoff: usize) -> Self {
        Self::scalar(Rational::one(), cutoff)
    }

    pub fn scalar(c: Rational, cutoff: usize) -> Self {
        let mut s = Self::zero(cutoff);
        s.add_term(Word::empty(), c);
        s
    }

    pub fn generator(g: Generator, cutoff: usize) -> Self {
        let mut s = Self::zero(cutoff);
        s.add_term(Word::letter(g), Rational::one());
        s
    }

    pub fn with_n1_cap(mut self, cap: usize) -> Self {
        self.n1_cap = Some(cap);
        self.coeffs.retain(|w, _| w.n1() <= cap);
        self
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn n1_cap(&self) -> Option<usize> {
        self.n1_cap
    }

    fn keeps(&self, w: &Word) -> bool {
        w.len() <= self.cutoff && self.n1_cap.is_none_or(|c| w.n1() <= c)
    }

    /// Adds `c` to the coefficient of `w`; words beyond the truncation are ignored.
    pub fn add_term(&mut self, w: Word, c: Rational) {
        if c.is_zero() || !self.keeps(&w) {
            return;
        }
        let e = self.coeffs.entry(w).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&w);
        }
    }

    pub fn coeff(&self, w: &Word) -> Rational {
        self.coeffs.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Word::empty())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Terms sorted by word order.
    pub fn terms(&self) -> Vec<(Word, Rational)> {
        let mut v: Vec<_> = self.coeffs.iter().map(|(w, c)| (*w, c.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.coeffs.iter()
    }

    /// Homogeneous component of bidegree (n1, n0).
    pub fn component(&self, n1: usize, n0: usize) -> TensorSeries {
        let mut out = TensorSeries {
            cutoff: self.cutoff,
            n1_cap: self.n1_cap,
            coeffs: HashMap::new(),
        };
        for (w, c) in &self.coeffs {
            if w.bidegree() == (n1, n0) {
                out.coeffs.insert(*w, c.clone());
            }
        }
        out
    }

    /// Bidegrees (n1, n0) carrying at least one nonzero coefficient, sorted.
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.coeffs.keys().map(|w| w.bidegree()).collect();
        v.sort();
        v.dedup();
        v
    }

    fn check_compatible(&self, other: &TensorSeries) -> Result<(), AlgebraError> {
        if self.cutoff != other.cutoff {
            return Err(AlgebraError::CutoffMismatch {
                left: self.cutoff,
                right: other.cutoff,
            });
        }
        Ok(())
    }

    fn merged_cap(&self, other: &TensorSeries) -> Option<usize> {
        match (self.n1_cap, other.n1_cap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn add(&self, other: &TensorSeries) -> Result<TensorSeries, AlgebraError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.n1_cap = self.merged_cap(other);
        if let Some(cap) = out.n1_cap {
            out.coeffs.retain(|w, _| w.n1() <= cap);
        }
        for (w, c) in &other.coeffs {
            out.add_term(*w, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorSeries) -> Result<TensorSeries, AlgebraError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> TensorSeries {
        let mut out = TensorSeries {
            cutoff: self.cutoff,
            n1_cap: self.n1_cap,
            coeffs: HashMap::new(),
        };
        if c.is_zero() {
            return out;
        }
        for (w, v) in &self.coeffs {
            out.coeffs.insert(*w, v * c);
        }
        out
    }

    /// Concatenation product, truncated.
    pub fn mul(&self, other: &TensorSeries) -> Result<TensorSeries, AlgebraError> {
        self.check_compatible(other)?;
        let mut out = TensorSeries {
            cutoff: self.cutoff,
            n1_cap: self.merged_cap(other),
            coeffs: HashMap::new(),
        };
        let cap = out.n1_cap.unwrap_or(usize::MAX);
        for (wa, ca) in &self.coeffs {
            for (wb, cb) in &other.coeffs {
                if wa.len() + wb.len() > self.cutoff || wa.n1() + wb.n1() > cap {
                    continue;
                }
                out.add_term(wa.concat(*wb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Commutator ab - ba.
    pub fn commutator(&self, other: &TensorSeries) -> Result<TensorSeries, AlgebraError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    fn min_degree(&self) -> usize {
        self.coeffs.keys().map(|w| w.len()).min().unwrap_or(usize::MAX)
    }

    /// exp(a) for a with zero constant term.
    pub fn exp(&self) -> Result<TensorSeries, AlgebraError> {
        let c0 = self.constant_term();
        if !c0.is_zero() {
            return Err(AlgebraError::ConstantTerm {
                expected: "0".into(),
                found: c0.to_string(),
            });
        }
        let mut result = TensorSeries::one(self.cutoff);
        result.n1_cap = self.n1_cap;
        let mut power = result.clone();
        let max_k = if self.is_zero() { 0 } else { self.cutoff / self.min_degree() };
        for k in 1..=max_k {
            power = power.mul(self)?.scale(&Rational::new(1.into(), (k as i64).into()));
            if power.is_zero() {
                break;
            }
            result = result.add(&power)?;
        }
        Ok(result)
    }

    /// log(a) for a with constant term 1.
    pub fn log(&self) -> Result<TensorSeries, AlgebraError> {
        let c0 = self.constant_term();
        if !c0.is_one() {
            return Err(AlgebraError::ConstantTerm {
                expected: "1".into(),
                found: c0.to_string(),
            });
        }
        let mut x = self.clone();
        x.add_term(Word::empty(), -Rational::one());
        let mut result = TensorSeries::zero(self.cutoff);
        result.n1_cap = self.n1_cap;
        if x.is_zero() {
            return Ok(result);
        }
        let max_k = self.cutoff / x.min_degree();
        let mut power = TensorSeries::one(self.cutoff);
        power.n1_cap = self.n1_cap;
        for k in 1..=max_k {
            power = power.mul(&x)?;
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            result = result.add(&power.scale(&Rational::new(sign.into(), (k as i64).into())))?;
        }
        Ok(result)
    }
}

impl fmt::Display for TensorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*[{w}]")?;
        }
        Ok(())
    }
}

fn expand_rec(b: &BracketTree, memo: &mut HashMap<BracketTree, HashMap<Word, i64>>) -> HashMap<Word, i64> {
    if let Some(v) = memo.get(b) {
        return v.clone();
    }
    let out = match b.children() {
        None => {
            let mut m = HashMap::new();
            m.insert(Word::letter(b.generator().expect("leaf")), 1);
            m
        }
        Some((l, r)) => {
            let el = expand_rec(l, memo);
            let er = expand_rec(r, memo);
            let mut m: HashMap<Word, i64> = HashMap::with_capacity(2 * el.len() * er.len());
            for (wa, ca) in &el {
                for (wb, cb) in &er {
                    *m.entry(wa.concat(*wb)).or_insert(0) += ca * cb;
                    *m.entry(wb.concat(*wa)).or_insert(0) -= ca * cb;
                }
            }
            m.retain(|_, c| *c != 0);
            m
        }
    };
    memo.insert(b.clone(), out.clone());
    out
}

/// Integer word expansion of E(b), with [a,b] = ab - ba.
pub fn word_expansion(b: &BracketTree) -> HashMap<Word, i64> {
    assert!(b.len() as usize <= super::word::MAX_WORD_LEN, "tree too long for word expansion");
    let mut memo = HashMap::new();
    expand_rec(b, &mut memo)
}

/// Word expansion of E(b) as a series truncated at `cutoff`.
pub fn expand_to_words(b: &BracketTree, cutoff: usize) -> Result<TensorSeries, AlgebraError> {
    if b.len() as usize > cutoff {
        return Err(AlgebraError::CutoffExceeded {
            required: b.len() as usize,
            cutoff,
        });
    }
    let mut s = TensorSeries::zero(cutoff);
    for (w, c) in word_expansion(b) {
        s.add_term(w, Rational::from_integer(c.into()));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::rat;
    use Generator::*;

    fn letter(g: Generator, cutoff: usize) -> TensorSeries {
        TensorSeries::generator(g, cutoff)
    }

    #[test]
    fn product_examples() {
        let a = TensorSeries::one(2).add(&letter(X0, 2)).unwrap();
        let b = TensorSeries::one(2).add(&letter(X1, 2)).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.num_terms(), 4);
        assert_eq!(p.coeff(&Word::from_letters(&[X0, X1])), rat(1, 1));
        assert_eq!(p.coeff(&Word::from_letters(&[X1, X0])), rat(0, 1));
        assert_eq!(a.mul(&TensorSeries::one(2)).unwrap(), a);
        assert!(letter(X0, 1).mul(&letter(X0, 1)).unwrap().is_zero());
        assert!(matches!(a.mul(&TensorSeries::one(3)), Err(AlgebraError::CutoffMismatch { .. })));
    }

    #[test]
    fn exp_of_scalar_multiple() {
        let t = rat(3, 2);
        let e = letter(X0, 3).scale(&t).exp().unwrap();
        let x0 = Word::letter(X0);
        assert_eq!(e.coeff(&Word::empty()), rat(1, 1));
        assert_eq!(e.coeff(&x0), t.clone());
        assert_eq!(e.coeff(&x0.concat(x0)), &t * &t / rat(2, 1));
        assert_eq!(e.coeff(&x0.concat(x0).concat(x0)), &t * &t * &t / rat(6, 1));
        assert_eq!(TensorSeries::zero(4).exp().unwrap(), TensorSeries::one(4));
    }

    #[test]
    fn log_of_product_degree_two() {
        let p = letter(X0, 2).exp().unwrap().mul(&letter(X1, 2).exp().unwrap()).unwrap();
        let l = p.log().unwrap();
        let expected = letter(X0, 2)
            .add(&letter(X1, 2))
            .unwrap()
            .add(&letter(X0, 2).commutator(&letter(X1, 2)).unwrap().scale(&rat(1, 2)))
            .unwrap();
        assert_eq!(l, expected);
    }

    #[test]
    fn constant_term_preconditions() {
        assert!(TensorSeries::one(3).exp().is_err());
        assert!(letter(X0, 3).log().is_err());
    }

    #[test]
    fn expansion_of_small_brackets() {
        let m1 = BracketTree::pair(&BracketTree::x1(), &BracketTree::x0());
        let e = expand_to_words(&m1, 2).unwrap();
        assert_eq!(e.coeff(&Word::from_letters(&[X1, X0])), rat(1, 1));
        assert_eq!(e.coeff(&Word::from_letters(&[X0, X1])), rat(-1, 1));
        let w = BracketTree::pair(&BracketTree::x1(), &m1);
        let e = expand_to_words(&w, 3).unwrap();
        assert_eq!(e.num_terms(), 3);
        assert_eq!(e.coeff(&Word::from_letters(&[X1, X1, X0])), rat(1, 1));
        assert_eq!(e.coeff(&Word::from_letters(&[X1, X0, X1])), rat(-2, 1));
        assert_eq!(e.coeff(&Word::from_letters(&[X0, X1, X1])), rat(1, 1));
        assert!(matches!(expand_to_words(&w, 2), Err(AlgebraError::CutoffExceeded { required: 3, .. })));
    }

    #[test]
    fn n1_cap_drops_words() {
        let s = letter(X1, 4).with_n1_cap(1);
        assert!(s.mul(&s).unwrap().is_zero());
    }
}
