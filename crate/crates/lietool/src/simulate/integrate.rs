//! Fixed-step RK4 for x' = f0(x) + u f1(x), x(0) = 0, aligned to control breakpoints.

use serde::Serialize;

use super::SimError;
use crate::algebra_core::to_f64;
use crate::coord2::ControlSignal;
use crate::vector_fields::{PolyVectorField, SystemDef};

pub const BLOW_UP: f64 = 1e6;

/// Monomials flattened to (coefficient, [(variable, power)]) for fast float evaluation.
#[derive(Clone, Debug)]
pub struct CompiledField {
    comps: Vec<Vec<(f64, Vec<(usize, i32)>)>>,
}

impl CompiledField {
    pub fn new(f: &PolyVectorField) -> Self {
        let comps = f
            .components()
            .iter()
            .map(|p| {
                p.terms()
                    .map(|(e, c)| {
                        let vars = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(j, &k)| (j, k as i32)).collect();
                        (to_f64(c), vars)
                    })
                    .collect()
            })
            .collect();
        CompiledField { comps }
    }

    pub fn eval_into(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        for (o, terms) in out.iter_mut().zip(&self.comps) {
            for (c, vars) in terms {
                *o += scale * c * vars.iter().map(|&(j, k)| x[j].powi(k)).product::<f64>();
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Dynamics {
    f0: CompiledField,
    f1: CompiledField,
    dim: usize,
}

impl Dynamics {
    pub fn new(sys: &SystemDef) -> Self {
        Dynamics {
            f0: CompiledField::new(sys.f0()),
            f1: CompiledField::new(sys.f1()),
            dim: sys.dim(),
        }
    }

    fn rhs(&self, x: &[f64], u: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.f0.eval_into(x, 1.0, &mut out);
        if u != 0.0 {
            self.f1.eval_into(x, u, &mut out);
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Largest step actually taken.
    pub step: f64,
    pub method: String,
    /// |x_h - x_{h/2}| / 15 at the horizon, when requested.
    pub error_estimate: Option<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("nonempty")
    }

    pub fn to_csv(&self) -> String {
        let d = self.states[0].len();
        let mut s = String::from("time");
        for i in 1..=d {
            s.push_str(&format!(",x{i}"));
        }
        s.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            s.push_str(&format!("{t:e}"));
            for v in x {
                s.push_str(&format!(",{v:e}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Control pieces as (start, end, u on the piece in the local variable s - start).
fn pieces(u: &ControlSignal) -> Vec<(f64, f64, Box<dyn Fn(f64) -> f64 + '_>)> {
    match u {
        ControlSignal::PiecewisePoly(p) => p
            .breaks()
            .windows(2)
            .zip(p.pieces())
            .map(|(w, q)| {
                let f: Box<dyn Fn(f64) -> f64> = Box::new(move |s| q.eval_f64(s));
                (to_f64(&w[0]), to_f64(&w[1]), f)
            })
            .collect(),
        ControlSignal::Sampled(g) => {
            let h = g.step();
            g.values
                .windows(2)
                .enumerate()
                .map(|(i, w)| {
                    let (a, b) = (w[0], w[1]);
                    let f: Box<dyn Fn(f64) -> f64> = Box::new(move |s| a + (b - a) * s / h);
                    (i as f64 * h, (i + 1) as f64 * h, f)
                })
                .collect()
        }
    }
}

fn axpy(x: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    x.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn run(dyn_: &Dynamics, u: &ControlSignal, step: f64) -> Result<Trajectory, SimError> {
    let mut x = vec![0.0; dyn_.dim];
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    let mut taken: f64 = 0.0;
    for (a, b, f) in pieces(u) {
        let len = b - a;
        if len <= 0.0 {
            continue;
        }
        let n = (len / step).ceil().max(1.0) as usize;
        let h = len / n as f64;
        taken = taken.max(h);
        for i in 0..n {
            let s = i as f64 * h;
            let (u0, um, u1) = (f(s), f(s + h / 2.0), f(s + h));
            let k1 = dyn_.rhs(&x, u0);
            let k2 = dyn_.rhs(&axpy(&x, h / 2.0, &k1), um);
            let k3 = dyn_.rhs(&axpy(&x, h / 2.0, &k2), um);
            let k4 = dyn_.rhs(&axpy(&x, h, &k3), u1);
            for j in 0..x.len() {
                x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
            let t = a + s + h;
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !norm.is_finite() || norm > BLOW_UP {
                return Err(SimError::BlowUp { time: t, norm });
            }
            times.push(t);
            states.push(x.clone());
        }
    }
    Ok(Trajectory {
        times,
        states,
        step: taken,
        method: "rk4".into(),
        error_estimate: None,
    })
}

pub fn integrate(sys: &SystemDef, u: &ControlSignal, step: f64) -> Result<Trajectory, SimError> {
    if !(step > 0.0) {
        return Err(SimError::BadStep(step));
    }
    run(&Dynamics::new(sys), u, step)
}

/// Integrates at `step` and `step / 2`; returns the finer run with the Richardson estimate.
pub fn integrate_with_estimate(sys: &SystemDef, u: &ControlSignal, step: f64) -> Result<Trajectory, SimError> {
    let coarse = integrate(sys, u, step)?;
    let mut fine = run(&Dynamics::new(sys), u, step / 2.0)?;
    let diff = coarse
        .final_state()
        .iter()
        .zip(fine.final_state())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    fine.error_estimate = Some(diff / 15.0);
    Ok(fine)
}

/// Final state only, reusing compiled dynamics.
pub fn final_state(dyn_: &Dynamics, u: &ControlSignal, step: f64) -> Result<Vec<f64>, SimError> {
    Ok(run(dyn_, u, step)?.final_state().to_vec())
}
