//! Multivariate CBH coefficients F_{q,h}, extracted from truncated logarithms in a
//! free algebra on q letters and rewritten as Lie polynomials.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use num_traits::{One, Zero};

use crate::algebra_core::{BracketTree, Rational};

/// Series over words in letters 0..q, truncated by total degree and by a per-letter cap.
#[derive(Clone, Debug, PartialEq)]
struct MultiSeries {
    caps: Vec<usize>,
    coeffs: HashMap<Vec<u8>, Rational>,
}

impl MultiSeries {
    fn zero(caps: &[usize]) -> Self {
        MultiSeries {
            caps: caps.to_vec(),
            coeffs: HashMap::new(),
        }
    }

    fn one(caps: &[usize]) -> Self {
        let mut s = Self::zero(caps);
        s.coeffs.insert(Vec::new(), Rational::one());
        s
    }

    fn within_caps(&self, w: &[u8]) -> bool {
        let mut counts = vec![0usize; self.caps.len()];
        for &l in w {
            counts[l as usize] += 1;
        }
        counts.iter().zip(&self.caps).all(|(c, cap)| c <= cap)
    }

    fn add_term(&mut self, w: Vec<u8>, c: Rational) {
        if c.is_zero() || !self.within_caps(&w) {
            return;
        }
        let e = self.coeffs.entry(w.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&w);
        }
    }

    fn mul(&self, o: &MultiSeries) -> MultiSeries {
        let mut out = MultiSeries::zero(&self.caps);
        for (a, x) in &self.coeffs {
            for (b, y) in &o.coeffs {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, x * y);
            }
        }
        out
    }

    fn scale(&self, k: &Rational) -> MultiSeries {
        let mut out = MultiSeries::zero(&self.caps);
        for (w, c) in &self.coeffs {
            out.add_term(w.clone(), c * k);
        }
        out
    }

    fn add(&self, o: &MultiSeries) -> MultiSeries {
        let mut out = self.clone();
        for (w, c) in &o.coeffs {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    fn max_degree(&self) -> usize {
        self.caps.iter().sum()
    }

    fn exp_letter(caps: &[usize], letter: u8) -> MultiSeries {
        let mut s = MultiSeries::zero(caps);
        let mut c = Rational::one();
        for k in 0..=caps[letter as usize] {
            if k > 0 {
                c /= Rational::from_integer((k as i64).into());
            }
            s.add_term(vec![letter; k], c.clone());
        }
        s
    }

    fn log(&self) -> MultiSeries {
        let mut x = self.clone();
        x.add_term(Vec::new(), -Rational::one());
        let mut out = MultiSeries::zero(&self.caps);
        let mut power = MultiSeries::one(&self.caps);
        for k in 1..=self.max_degree() {
            power = power.mul(&x);
            if power.coeffs.is_empty() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add(&power.scale(&Rational::new(sign.into(), (k as i64).into())));
        }
        out
    }
}

/// One term c * [Y_{w0}, [Y_{w1}, ... Y_{wn}]] of a Lie polynomial in the Y's.
pub type RightNormedTerm = (Rational, Vec<u8>);

/// F_{q,h} as a combination of right-normed brackets of Y_1..Y_q (letters 0..q-1).
#[derive(Clone, Debug)]
pub struct CbhCoefficient {
    pub h: Vec<usize>,
    pub terms: Vec<RightNormedTerm>,
}

fn counts_match(w: &[u8], h: &[usize]) -> bool {
    let mut counts = vec![0usize; h.len()];
    for &l in w {
        counts[l as usize] += 1;
    }
    counts == h
}

/// Word expansion of a right-normed bracket over letters.
fn right_normed_words(w: &[u8]) -> Vec<(Vec<u8>, i64)> {
    match w.split_first() {
        None => vec![(Vec::new(), 1)],
        Some((&a, [])) => vec![(vec![a], 1)],
        Some((&a, rest)) => {
            let inner = right_normed_words(rest);
            let mut out = Vec::with_capacity(2 * inner.len());
            for (v, c) in inner {
                let mut left = vec![a];
                left.extend_from_slice(&v);
                out.push((left, c));
                let mut right = v;
                right.push(a);
                out.push((right, -c));
            }
            out
        }
    }
}

static CACHE: LazyLock<RwLock<HashMap<Vec<usize>, Arc<CbhCoefficient>>>> = LazyLock::new(|| RwLock::new(HashMap::new()));

/// Extracts F_{q,h} with q = h.len(), every h_i >= 1.
pub fn cbh_coefficient(h: &[usize]) -> Arc<CbhCoefficient> {
    assert!(!h.is_empty() && h.iter().all(|&x| x >= 1), "multidegrees must be positive");
    if let Some(c) = CACHE.read().expect("cbh lock").get(h) {
        return c.clone();
    }
    let q = h.len();
    let mut prod = MultiSeries::one(h);
    for letter in 0..q {
        prod = prod.mul(&MultiSeries::exp_letter(h, letter as u8));
    }
    let log = prod.log();
    let n: usize = h.iter().sum();
    // Dynkin-Specht-Wever: a homogeneous Lie polynomial P of degree n equals
    // (1/n) * sum_w <P, w> [w] with right-normed brackets [w].
    let inv_n = Rational::new(1.into(), (n as i64).into());
    let mut words: Vec<_> = log
        .coeffs
        .iter()
        .filter(|(w, _)| counts_match(w, h))
        .map(|(w, c)| (c * &inv_n, w.clone()))
        .collect();
    words.sort_by(|a, b| a.1.cmp(&b.1));
    let coeff = Arc::new(CbhCoefficient { h: h.to_vec(), terms: words });
    CACHE
        .write()
        .expect("cbh lock")
        .entry(h.to_vec())
        .or_insert(coeff)
        .clone()
}

impl CbhCoefficient {
    /// Substitutes Y_i -> args[i]; returns bracket trees with coefficients.
    pub fn substitute(&self, args: &[BracketTree]) -> Vec<(Rational, BracketTree)> {
        self.terms
            .iter()
            .map(|(c, w)| {
                let mut t = args[*w.last().expect("nonempty word") as usize].clone();
                for &l in w[..w.len() - 1].iter().rev() {
                    t = BracketTree::pair(&args[l as usize], &t);
                }
                (c.clone(), t)
            })
            .collect()
    }

    /// Word expansion over the letters, for comparison with a reference.
    pub fn words(&self) -> HashMap<Vec<u8>, Rational> {
        let mut out: HashMap<Vec<u8>, Rational> = HashMap::new();
        for (c, w) in &self.terms {
            for (v, k) in right_normed_words(w) {
                *out.entry(v).or_insert_with(Rational::zero) += c * Rational::from_integer(k.into());
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Word expansion of the multihomogeneous log component itself.
    pub fn reference_words(&self) -> HashMap<Vec<u8>, Rational> {
        let mut prod = MultiSeries::one(&self.h);
        for letter in 0..self.h.len() {
            prod = prod.mul(&MultiSeries::exp_letter(&self.h, letter as u8));
        }
        prod.log().coeffs.into_iter().filter(|(w, _)| counts_match(w, &self.h)).collect()
    }
}

/// Word expansion of sum c * [w] for hand-written right-normed combinations.
pub fn lie_words(terms: &[RightNormedTerm]) -> HashMap<Vec<u8>, Rational> {
    CbhCoefficient {
        h: Vec::new(),
        terms: terms.to_vec(),
    }
    .words()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::rat;

    #[test]
    fn extracted_values_are_lie_polynomials() {
        for h in [vec![1, 1], vec![2, 1], vec![1, 2], vec![1, 1, 1], vec![2, 2], vec![1, 1, 2]] {
            let f = cbh_coefficient(&h);
            assert_eq!(f.words(), f.reference_words(), "h = {h:?}");
        }
    }

    #[test]
    fn two_factor_anchors() {
        assert_eq!(cbh_coefficient(&[1, 1]).words(), lie_words(&[(rat(1, 2), vec![0, 1])]));
        assert_eq!(cbh_coefficient(&[2, 1]).words(), lie_words(&[(rat(1, 12), vec![0, 0, 1])]));
        assert_eq!(cbh_coefficient(&[1, 2]).words(), lie_words(&[(rat(1, 12), vec![1, 1, 0])]));
    }

    #[test]
    fn three_factor_value() {
        let expected = lie_words(&[(rat(1, 3), vec![0, 1, 2]), (rat(-1, 6), vec![1, 0, 2])]);
        assert_eq!(cbh_coefficient(&[1, 1, 1]).words(), expected);
        // A single quarter-bracket does not reproduce the log component.
        assert_ne!(cbh_coefficient(&[1, 1, 1]).words(), lie_words(&[(rat(1, 4), vec![0, 1, 2])]));
    }
}
