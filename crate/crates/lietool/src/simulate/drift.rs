//! Empirical drift scans: P x(t;u) - (1-eps) xi_b(t,u) + C |x|^beta >= 0 over sampled controls.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::integrate::{final_state, Dynamics};
use super::{worker_pool, SimError};
use crate::algebra_core::named::w;
use crate::algebra_core::{rat, rational_serde, to_f64, BracketTree, Rational};
use crate::conditions::{component_functional, condition_family, label, Caps, Condition, ConditionError, FamilySpec};
use crate::coord2::{random_piecewise_constant, xi, ControlSignal};
use crate::vector_fields::Evaluator;

/// Neutralizing family by CLI name: s1, n2, n3, loose:k,m or sextic.
pub fn drift_family(name: &str) -> Result<FamilySpec, ConditionError> {
    let cond = match name {
        "s1" => return Ok(FamilySpec::s1()),
        "n2" => Condition::N2,
        "n3" => Condition::N3,
        "sextic" => Condition::Sextic,
        _ => match name.strip_prefix("loose:") {
            Some(args) => format!("wk:{args}").parse()?,
            None => return Err(ConditionError::BadCondition(format!("unknown family {name}"))),
        },
    };
    Ok(condition_family(cond)?.1)
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftParams {
    pub eps: f64,
    pub c: f64,
    pub beta: f64,
    #[serde(with = "rational_serde")]
    pub t_max: Rational,
    #[serde(with = "rational_serde")]
    pub rho: Rational,
    pub trials: usize,
    pub seed: u64,
    /// RK4 steps per unit of the horizon.
    pub steps: usize,
}

impl Default for DriftParams {
    fn default() -> Self {
        DriftParams {
            eps: 0.1,
            c: 10.0,
            beta: 1.5,
            t_max: rat(1, 10),
            rho: rat(1, 10),
            trials: 200,
            seed: 1,
            steps: 400,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftSample {
    pub kind: String,
    pub t: f64,
    pub xi: f64,
    pub px: f64,
    pub norm: f64,
    pub margin: f64,
    pub weak_margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftScanReport {
    pub system: String,
    pub bracket: String,
    pub family: String,
    #[serde(with = "rational_serde::vec")]
    pub functional: Vec<Rational>,
    pub params: DriftParams,
    pub samples: Vec<DriftSample>,
    pub min_margin: f64,
    pub min_weak_margin: f64,
    pub pass: bool,
    pub weak_pass: bool,
    /// Set for W3 targets, where only the weak variant is claimed.
    pub weak_variant_only: bool,
}

const PATTERNS: [&str; 8] = ["+", "-", "+-", "-+", "+-+", "-+-", "+--+", "-++-"];

fn bang_bang(pattern: &str, t: &Rational, rho: &Rational) -> ControlSignal {
    let n = pattern.len() as i64;
    let breaks = (0..=n).map(|i| t * rat(i, n)).collect();
    let values = pattern.chars().map(|c| if c == '+' { rho.clone() } else { -rho.clone() }).collect();
    ControlSignal::piecewise_constant(breaks, values).expect("valid pattern")
}

/// Seeded random controls followed by the fixed bang-bang patterns.
pub fn control_family(p: &DriftParams) -> Vec<(String, ControlSignal)> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut out = Vec::new();
    for i in 0..p.trials {
        let t = &p.t_max * rat(rng.gen_range(1..=20), 20);
        let pieces = rng.gen_range(1..=6);
        out.push((format!("random:{i}"), random_piecewise_constant(&mut rng, pieces, &t, &p.rho)));
    }
    for pat in PATTERNS {
        out.push((format!("bang-bang:{pat}"), bang_bang(pat, &p.t_max, &p.rho)));
    }
    out
}

pub fn drift_scan(ev: &Evaluator, b: &BracketTree, fam: &FamilySpec, caps: &Caps, p: &DriftParams) -> Result<DriftScanReport, SimError> {
    let functional = component_functional(ev, b, fam, caps).map_err(|e| match e {
        ConditionError::InSpan(s) => SimError::Refused(format!("{s} is neutralized by {}; the condition holds, so no drift is expected", fam.name)),
        other => SimError::Condition(other),
    })?;
    let pf: Vec<f64> = functional.iter().map(to_f64).collect();
    let dyn_ = Dynamics::new(ev.system());
    let controls = control_family(p);
    let run = |(kind, u): &(String, ControlSignal)| -> Result<DriftSample, SimError> {
        let t = u.horizon_f64();
        let step = t / p.steps as f64;
        let x = final_state(&dyn_, u, step)?;
        let xi = xi(b, u)?.to_f64();
        let px: f64 = pf.iter().zip(&x).map(|(a, b)| a * b).sum();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let margin = px - (1.0 - p.eps) * xi + p.c * norm.powf(p.beta);
        Ok(DriftSample {
            kind: kind.clone(),
            t,
            xi,
            px,
            norm,
            margin,
            weak_margin: margin + p.eps * norm,
        })
    };
    let samples = worker_pool().install(|| controls.par_iter().map(run).collect::<Result<Vec<_>, _>>())?;
    let min_margin = samples.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
    let min_weak_margin = samples.iter().map(|s| s.weak_margin).fold(f64::INFINITY, f64::min);
    Ok(DriftScanReport {
        system: ev.system().name.clone(),
        bracket: label(b),
        family: fam.name.clone(),
        functional,
        params: p.clone(),
        samples,
        min_margin,
        min_weak_margin,
        pass: min_margin >= 0.0,
        weak_pass: min_weak_margin >= 0.0,
        weak_variant_only: w(3, 0).is_ok_and(|w3| *b == w3),
    })
}
