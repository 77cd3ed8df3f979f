//! Explicit integral formulas for the named families with n1 <= 5, and for D.

use num_traits::Zero;

use super::poly::PiecewisePoly;
use super::signal::{ControlSignal, Sampled, Signal};
use super::xi::XiValue;
use super::Coord2Error;
use crate::algebra_core::{rat, BracketTree, NamedForm, Rational};

fn d(cond: bool, v: Rational) -> Rational {
    if cond {
        v
    } else {
        Rational::zero()
    }
}

pub fn alpha(j: u32, k: u32) -> Rational {
    d(j < k, rat(1, 2)) + d(j == k, rat(1, 6))
}

pub fn beta(j: u32, k: u32, l: u32) -> Rational {
    alpha(j, k) * d(k < l, rat(1, 1)) + d(j < k && k == l, rat(1, 4)) + d(j == k && k == l, rat(1, 24))
}

pub fn gamma(j: u32, k: u32, l: u32, m: u32) -> Rational {
    beta(j, k, l) * d(l < m, rat(1, 1))
        + d(j == k && k == l && l == m, rat(1, 120))
        + d(j < k && k < l && l == m, rat(1, 4))
        + rat(1, 12) * (d(j < k && k == l && l == m, rat(1, 1)) + d(j == k && k < l && l == m, rat(1, 1)))
}

/// Iterated primitives u_0 .. u_n and helpers on one signal type.
struct Prims<S: Signal> {
    u: Vec<S>,
}

impl<S: Signal> Prims<S> {
    fn new(u: &S, n: u32) -> Self {
        let mut v = vec![u.clone()];
        for _ in 0..n {
            let next = v.last().expect("nonempty").primitive();
            v.push(next);
        }
        Prims { u: v }
    }

    fn get(&self, j: u32) -> &S {
        &self.u[j as usize]
    }

    /// s -> integral_0^s (s-r)^nu/nu! g(r) dr
    fn kernel(g: &S, nu: u32) -> S {
        let mut out = g.primitive();
        for _ in 0..nu {
            out = out.primitive();
        }
        out
    }

    fn product(&self, idx: &[u32]) -> S {
        let mut out = self.u[0].one_like();
        for &j in idx {
            out = out.mul(self.get(j));
        }
        out
    }
}

fn max_index(f: &NamedForm) -> u32 {
    f.indices().into_iter().max().unwrap_or(0).max(1)
}

/// The closed-form integrand machinery, generic over exact and sampled signals.
fn evaluate<S: Signal>(f: &NamedForm, u: &S) -> S::Value {
    let pr = Prims::new(u, max_index(f));
    let k = Prims::<S>::kernel;
    let g = match *f {
        NamedForm::M { nu } => k(&pr.u[0], nu),
        NamedForm::W { j, nu } => k(&pr.product(&[j, j]), nu).scale(&rat(1, 2)),
        NamedForm::P { j, k: kk, nu } => k(&pr.product(&[kk, j, j]), nu).scale(&alpha(j, kk)),
        NamedForm::Q { j, k: kk, l, nu } => k(&pr.product(&[l, kk, j, j]), nu).scale(&beta(j, kk, l)),
        NamedForm::Qf { j, mu, nu } => {
            let inner = k(&pr.product(&[j, j]), mu);
            k(&inner.mul(&inner), nu).scale(&rat(1, 8))
        }
        NamedForm::Qs { j, mu, k: kk, nu } => {
            let inner = k(&pr.product(&[j, j]), mu);
            k(&inner.mul(&pr.product(&[kk, kk])), nu).scale(&rat(1, 4))
        }
        NamedForm::R { j, k: kk, l, m, nu } => k(&pr.product(&[m, l, kk, j, j]), nu).scale(&gamma(j, kk, l, m)),
        NamedForm::Rs { j, k: kk, l, mu, nu } => {
            let inner = k(&pr.product(&[l, l]), mu);
            k(&inner.mul(&pr.product(&[kk, j, j])), nu).scale(&(alpha(j, kk) * rat(1, 2)))
        }
        NamedForm::D => {
            let inner = k(&pr.product(&[1, 1, 1]), 0);
            k(&inner.mul(&inner), 0).scale(&rat(1, 72))
        }
    };
    g.end_value()
}

/// ξ_b from the explicit formulas; b must be a named family member.
pub fn xi_closed_form(b: &BracketTree, u: &ControlSignal) -> Result<XiValue, Coord2Error> {
    let f = NamedForm::recognize(b).ok_or_else(|| Coord2Error::NoClosedForm(b.canonical()))?;
    Ok(match u {
        ControlSignal::PiecewisePoly(p) => XiValue::Exact(evaluate::<PiecewisePoly>(&f, p)),
        ControlSignal::Sampled(s) => {
            let fine = evaluate::<Sampled>(&f, s);
            let error = s.coarsen().map(|c| (fine - evaluate::<Sampled>(&f, &c)).abs() / 3.0).unwrap_or(f64::NAN);
            XiValue::Approx { value: fine, error }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::named;

    #[test]
    fn coefficient_tables() {
        assert_eq!(alpha(1, 1), rat(1, 6));
        assert_eq!(alpha(1, 2), rat(1, 2));
        assert_eq!(beta(1, 1, 1), rat(1, 24));
        assert_eq!(beta(1, 2, 2), rat(1, 4));
        assert_eq!(beta(1, 1, 2), rat(1, 6));
        assert_eq!(gamma(1, 1, 1, 1), rat(1, 120));
        assert_eq!(gamma(1, 1, 2, 2), rat(1, 12));
        assert_eq!(gamma(1, 2, 3, 3), rat(1, 4));
        assert_eq!(gamma(1, 1, 1, 2), rat(1, 24));
    }

    #[test]
    fn qflat_formula_on_constant_control() {
        let u = ControlSignal::constant(rat(1, 1), rat(1, 1)).unwrap();
        // (1/8) * integral of (s^3/3)^2 over [0,1]
        let v = xi_closed_form(&named::qf(1, 0, 0).unwrap(), &u).unwrap();
        assert_eq!(v, XiValue::Exact(rat(1, 8 * 9 * 7)));
        assert!(xi_closed_form(&BracketTree::x0(), &u).is_err());
    }
}
