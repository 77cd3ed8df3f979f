//! Numerical integration, truncated representation formulas and drift scans.

mod drift;
mod integrate;
mod zm;

use thiserror::Error;

pub use drift::{control_family, drift_family, drift_scan, DriftParams, DriftSample, DriftScanReport};
pub use integrate::{final_state, integrate, integrate_with_estimate, CompiledField, Dynamics, Trajectory, BLOW_UP};
pub use zm::{
    midpoint_surrogate, moments, nonzero_values, pure_counterexample_check, pure_discrepancy, quartic_family, quartic_pair, rescale_to_precondition, zm_state,
    PureCheck, ZmReport, ZmTerm,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("step must be positive, got {0}")]
    BadStep(f64),
    #[error("state norm {norm:e} exceeded the blow-up guard at t = {time}")]
    BlowUp { time: f64, norm: f64 },
    #[error("{0}")]
    BadParameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("scan refused: {0}")]
    Refused(String),
    #[error(transparent)]
    Condition(#[from] crate::conditions::ConditionError),
    #[error(transparent)]
    Expansion(#[from] crate::expansions::ExpansionError),
    #[error(transparent)]
    Coord2(#[from] crate::coord2::Coord2Error),
    #[error(transparent)]
    System(#[from] crate::vector_fields::VfError),
}

/// Worker pool sized by LIETOOL_THREADS when set.
pub fn worker_pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("LIETOOL_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0) {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::named::w;
    use crate::algebra_core::{rat, to_f64, Rational};
    use crate::conditions::{condition_family, Caps, Condition, FamilySpec};
    use crate::coord2::{random_piecewise_constant, random_piecewise_poly, ControlSignal, PiecewisePoly};
    use crate::vector_fields::{zoo, Evaluator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn exact(u: &ControlSignal) -> &PiecewisePoly {
        u.as_exact().unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zero_control_stays_at_origin() {
        let u = ControlSignal::constant(rat(1, 2), Rational::from_integer(0.into())).unwrap();
        for name in ["easy", "jakubczyk", "qb12", "sextic:8"] {
            let tr = integrate(&zoo(name).unwrap(), &u, 0.01).unwrap();
            assert!(tr.final_state().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn easy_closed_form() {
        let u = ControlSignal::constant(rat(1, 10), rat(1, 1)).unwrap();
        let p = exact(&u);
        let u1 = p.primitive();
        let u2 = u1.primitive();
        let x3 = u1.pow(2).integral() - u2.pow(2).integral() - u1.pow(3).integral() - rat(2, 1) * u2.end_value() * u2.end_value();
        let x = integrate(&zoo("easy").unwrap(), &u, 1e-3).unwrap();
        assert!(close(x.final_state()[2], to_f64(&x3), 1e-8));
    }

    #[test]
    fn closed_forms_on_random_controls() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let u = random_piecewise_poly(&mut rng, 3, 2, &rat(1, 2));
            let p = exact(&u);
            let (u1, u2) = (p.primitive(), p.primitive().primitive());
            let jak = integrate(&zoo("jakubczyk").unwrap(), &u, 1e-3).unwrap();
            assert!(close(jak.final_state()[0], to_f64(&u1.end_value()), 1e-10));
            assert!(close(jak.final_state()[1], to_f64(&u2.end_value()), 1e-10));
            for k in 3..=5u32 {
                let x3 = u2.pow(2).integral() - u1.pow(k).integral();
                let x = integrate(&zoo(&format!("x22_x1k:{k}")).unwrap(), &u, 1e-3).unwrap();
                assert!(close(x.final_state()[2], to_f64(&x3), 1e-7));
            }
            let half = rat(1, 2);
            let x2 = u2.end_value() + &half * u1.pow(2).integral();
            let x3 = -(u1.mul(&u2.add(&u1.pow(2).primitive().scale(&half)))).integral();
            let x = integrate(&zoo("no_zm_pure").unwrap(), &u, 1e-3).unwrap();
            assert!(close(x.final_state()[1], to_f64(&x2), 1e-7));
            assert!(close(x.final_state()[2], to_f64(&x3), 1e-7));
        }
    }

    #[test]
    fn rk4_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_piecewise_poly(&mut rng, 2, 2, &rat(1, 2));
        let sys = zoo("qb12").unwrap();
        let reference = integrate(&sys, &u, 1e-4).unwrap();
        let err = |h: f64| {
            let x = integrate(&sys, &u, h).unwrap();
            x.final_state().iter().zip(reference.final_state()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(0.05), err(0.025));
        assert!((e1 / e2).log2() >= 3.7, "observed order {}", (e1 / e2).log2());
    }

    #[test]
    fn blow_up_is_reported() {
        let f0 = crate::vector_fields::PolyVectorField::parse(&["x1^2"]).unwrap();
        let f1 = crate::vector_fields::PolyVectorField::unit(1, 0);
        let sys = crate::vector_fields::SystemDef::new("riccati", f0, f1).unwrap();
        let u = ControlSignal::constant(rat(3, 1), rat(1, 1)).unwrap();
        assert!(matches!(integrate(&sys, &u, 1e-3), Err(SimError::BlowUp { .. })));
        assert!(matches!(integrate(&sys, &u, 0.0), Err(SimError::BadStep(_))));
    }

    #[test]
    fn z1_of_easy() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_piecewise_constant(&mut rng, 3, &rat(1, 2), &rat(1, 1));
        let z = zm_state(&zoo("easy").unwrap(), &u, 1, 6).unwrap();
        let p = exact(&u);
        let (u1, u2) = (p.primitive(), p.primitive().primitive());
        assert!(close(z.state[0], to_f64(&u1.end_value()), 1e-12));
        assert!(close(z.state[1], to_f64(&u2.end_value()), 1e-12));
        assert_eq!(z.state[2], 0.0);
        let zero = ControlSignal::constant(rat(1, 2), rat(0, 1)).unwrap();
        assert!(zm_state(&zoo("easy").unwrap(), &zero, 2, 6).unwrap().state.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn smooth_controls_use_a_surrogate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_piecewise_poly(&mut rng, 1, 1, &rat(1, 4));
        let z = zm_state(&zoo("easy").unwrap(), &u, 1, 4).unwrap();
        assert!(z.surrogate_pieces.is_some());
        let u1 = exact(&u).primitive().end_value();
        assert!(close(z.state[0], to_f64(&u1), 1e-6));
    }

    #[test]
    fn pure_identity_and_precondition() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_piecewise_constant(&mut rng, 3, &rat(1, 2), &rat(1, 1));
        assert!(matches!(pure_counterexample_check(&v, 1e-3), Err(SimError::Precondition(_))));
        let u = rescale_to_precondition(&v).unwrap();
        let r = pure_counterexample_check(&u, 1e-3).unwrap();
        assert!(r.ok(), "{r:?}");
        assert!(close(r.general[2], r.predicted[2], 1e-15));
        let zero = ControlSignal::constant(rat(1, 2), rat(0, 1)).unwrap();
        let r0 = pure_counterexample_check(&zero, 1e-3).unwrap();
        assert_eq!(r0.error, 0.0);
    }

    #[test]
    fn drift_scan_refuses_satisfied_conditions() {
        let ev = Evaluator::new(Arc::new(zoo("jakubczyk").unwrap()));
        let (_, n2) = condition_family(Condition::N2).unwrap();
        let p = DriftParams { trials: 4, ..Default::default() };
        assert!(matches!(drift_scan(&ev, &w(2, 0).unwrap(), &n2, &Caps::default(), &p), Err(SimError::Refused(_))));
    }

    #[test]
    fn small_drift_scan_on_easy() {
        let ev = Evaluator::new(Arc::new(zoo("easy").unwrap()));
        let p = DriftParams { trials: 20, ..Default::default() };
        let r = drift_scan(&ev, &w(1, 0).unwrap(), &FamilySpec::s1(), &Caps::default(), &p).unwrap();
        assert!(r.pass, "min margin {}", r.min_margin);
        assert_eq!(r.samples.len(), 28);
        let again = drift_scan(&ev, &w(1, 0).unwrap(), &FamilySpec::s1(), &Caps::default(), &p).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    }
}
