//! Exact sparse linear algebra over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra_core::Rational;

pub type SparseVec<K> = BTreeMap<K, Rational>;

/// `v += c * w`, dropping zeros.
pub fn axpy<K: Ord + Clone>(v: &mut SparseVec<K>, c: &Rational, w: &SparseVec<K>) {
    if c.is_zero() {
        return;
    }
    for (k, x) in w {
        let e = v.entry(k.clone()).or_insert_with(Rational::zero);
        *e += c * x;
        if e.is_zero() {
            v.remove(k);
        }
    }
}

pub fn dense_to_sparse(v: &[Rational]) -> SparseVec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn sparse_to_dense(v: &SparseVec<usize>, dim: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); dim];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Incremental row echelon form that remembers how each stored row combines the
/// generators inserted so far.
///
/// Rows are normalized (pivot entry 1) and each new row is reduced against all
/// earlier ones, so reducing a vector row by row in insertion order clears every pivot.
#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone> {
    rows: Vec<(K, SparseVec<K>, SparseVec<usize>)>,
    generators: usize,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon {
            rows: Vec::new(),
            generators: 0,
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    fn reduce(&self, v: &mut SparseVec<K>, combo: &mut SparseVec<usize>, track: bool) {
        for (p, row, c) in &self.rows {
            if let Some(a) = v.get(p).cloned() {
                let na = -a;
                axpy(v, &na, row);
                if track {
                    axpy(combo, &na, c);
                }
            }
        }
    }

    /// Inserts generator number `generators()`; returns true when the rank grows.
    pub fn insert(&mut self, v: SparseVec<K>) -> bool {
        let index = self.generators;
        self.generators += 1;
        let mut v = v;
        let mut combo = SparseVec::new();
        combo.insert(index, Rational::one());
        self.reduce(&mut v, &mut combo, true);
        let Some((p, lead)) = v.iter().next().map(|(k, x)| (k.clone(), x.clone())) else {
            return false;
        };
        let inv = lead.recip();
        for x in v.values_mut() {
            *x *= &inv;
        }
        for x in combo.values_mut() {
            *x *= &inv;
        }
        self.rows.push((p, v, combo));
        true
    }

    /// The part of `v` left after removing its component in the span.
    pub fn residual(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut r = v.clone();
        let mut dummy = SparseVec::new();
        self.reduce(&mut r, &mut dummy, false);
        r
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.residual(v).is_empty()
    }

    /// Coefficients c with v = sum_k c_k g_k, or the nonzero residual.
    pub fn represent(&self, v: &SparseVec<K>) -> Result<SparseVec<usize>, SparseVec<K>> {
        let mut r = v.clone();
        let mut combo = SparseVec::new();
        self.reduce(&mut r, &mut combo, true);
        if r.is_empty() {
            // `reduce` subtracts, so the accumulated combination is the negated answer.
            for x in combo.values_mut() {
                *x = -x.clone();
            }
            Ok(combo)
        } else {
            Err(r)
        }
    }
}

/// A solution of A x = rhs obtained by reduced row elimination with every free
/// variable set to zero; None when the system is inconsistent.
pub fn basic_solution(a: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(a.len(), rhs.len());
    let ncols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(sel) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, sel);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=ncols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][ncols].clone();
    }
    Some(x)
}

pub fn rank(vectors: &[Vec<Rational>]) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(dense_to_sparse(v));
    }
    e.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::{int, rat};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn echelon_represents_combinations() {
        let mut e = Echelon::new();
        assert!(e.insert(dense_to_sparse(&v(&[1, 1, 0]))));
        assert!(e.insert(dense_to_sparse(&v(&[0, 1, 1]))));
        assert!(!e.insert(dense_to_sparse(&v(&[1, 2, 1]))));
        let c = e.represent(&dense_to_sparse(&v(&[2, 5, 3]))).unwrap();
        assert_eq!(c.get(&0), Some(&int(2)));
        assert_eq!(c.get(&1), Some(&int(3)));
        assert!(e.represent(&dense_to_sparse(&v(&[0, 0, 1]))).is_err());
    }

    #[test]
    fn basic_solution_sets_free_variables_to_zero() {
        let a = vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 2])];
        let x = basic_solution(&a, &v(&[0, 0, 1])).unwrap();
        assert_eq!(x, vec![int(0), int(0), rat(1, 2)]);
        let inconsistent = vec![v(&[1, 1]), v(&[2, 2])];
        assert!(basic_solution(&inconsistent, &v(&[1, 1])).is_none());
        assert_eq!(rank(&[v(&[1, 2]), v(&[2, 4])]), 1);
    }
}
