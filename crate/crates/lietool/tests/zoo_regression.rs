use std::sync::Arc;

use lietool::algebra_core::{BracketTree, Rational};
use lietool::hall_bstar::{basis_up_to_length, decompose};
use lietool::vector_fields::{check_zoo, zoo, Evaluator, INSTANCES, REGRESSION_LEN};
use num_traits::Zero;

#[test]
fn every_zoo_table_matches_recomputed_values() {
    let mut failures = Vec::new();
    for name in INSTANCES {
        let r = check_zoo(&zoo(name).unwrap(), REGRESSION_LEN);
        if !r.ok() {
            failures.push(format!("{name}: {:?}", r.mismatches));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn only_the_q112_family_disagrees_with_published_values() {
    for name in INSTANCES {
        let r = check_zoo(&zoo(name).unwrap(), 4);
        if name.starts_with("w3_vs_q112") {
            assert!(!r.published_conflicts.is_empty());
            for c in &r.published_conflicts {
                assert!(c.found.iter().any(|v| v == "6"), "{c:?}");
            }
        } else {
            assert!(r.published_conflicts.is_empty(), "{name}: {:?}", r.published_conflicts);
        }
    }
}

fn mat_vec(m: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

#[test]
fn drift_jacobian_acts_on_trailing_zeros() {
    for name in ["easy", "qb10", "w3_vs_p1l:2,1", "sextic:7", "w3_vs_rsharp:1,1"] {
        let sys = Arc::new(zoo(name).unwrap());
        let h0 = sys.h0();
        let ev = Evaluator::new(sys);
        for h in basis_up_to_length(5) {
            let mut expected = ev.eval_bracket(h.tree());
            for nu in 1..=5 {
                expected = mat_vec(&h0, &expected);
                assert_eq!(ev.eval_bracket(&h.tree().zeros(nu)), expected, "{name} {} 0^{nu}", h.label());
            }
        }
    }
}

fn random_tree(seed: &mut u64, len: u32) -> BracketTree {
    if len == 1 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        return if (*seed >> 33) % 2 == 0 { BracketTree::x0() } else { BracketTree::x1() };
    }
    *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let left = 1 + ((*seed >> 33) as u32) % (len - 1);
    let a = random_tree(seed, left);
    let b = random_tree(seed, len - left);
    BracketTree::pair(&a, &b)
}

#[test]
fn evaluation_is_a_lie_homomorphism() {
    let mut seed = 17u64;
    for name in ["easy", "jakubczyk", "qb11", "w3_time", "no_zm_pure"] {
        let ev = Evaluator::new(Arc::new(zoo(name).unwrap()));
        for len in 2..=7 {
            for _ in 0..6 {
                let t = random_tree(&mut seed, len);
                assert_eq!(ev.eval_lie(&decompose(&t).unwrap()), ev.eval_bracket(&t), "{name} {t}");
            }
        }
    }
}
