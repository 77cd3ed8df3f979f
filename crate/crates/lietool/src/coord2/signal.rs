//! Controls on [0, t]: exact piecewise polynomials or uniform samples.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::poly::{PiecewisePoly, Poly};
use super::Coord2Error;
use crate::algebra_core::{parse_rational, rat, to_f64, Rational};

/// Uniform samples u(i h), i = 0..=n, with h = t / n.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampled {
    pub t: f64,
    pub values: Vec<f64>,
}

impl Sampled {
    pub fn step(&self) -> f64 {
        self.t / (self.values.len() - 1) as f64
    }

    /// Every other node; None when the interval count is odd.
    pub fn coarsen(&self) -> Option<Sampled> {
        let n = self.values.len() - 1;
        if n < 2 || n % 2 == 1 {
            return None;
        }
        Some(Sampled {
            t: self.t,
            values: self.values.iter().step_by(2).cloned().collect(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ControlSignal {
    PiecewisePoly(PiecewisePoly),
    Sampled(Sampled),
}

impl ControlSignal {
    pub fn horizon_f64(&self) -> f64 {
        match self {
            ControlSignal::PiecewisePoly(p) => to_f64(p.horizon()),
            ControlSignal::Sampled(s) => s.t,
        }
    }

    pub fn as_exact(&self) -> Option<&PiecewisePoly> {
        match self {
            ControlSignal::PiecewisePoly(p) => Some(p),
            ControlSignal::Sampled(_) => None,
        }
    }

    /// Piecewise-constant control with the given breakpoints and values.
    pub fn piecewise_constant(breaks: Vec<Rational>, values: Vec<Rational>) -> Result<Self, Coord2Error> {
        let pieces = values.into_iter().map(Poly::constant).collect();
        PiecewisePoly::new(breaks, pieces)
            .map(ControlSignal::PiecewisePoly)
            .ok_or_else(|| Coord2Error::BadControl("breakpoints must start at 0 and increase; one value per piece".into()))
    }

    pub fn constant(t: Rational, c: Rational) -> Result<Self, Coord2Error> {
        Self::piecewise_constant(vec![Rational::zero(), t], vec![c])
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        match self {
            ControlSignal::PiecewisePoly(p) => p.eval_f64(s),
            ControlSignal::Sampled(g) => {
                let h = g.step();
                let x = (s / h).clamp(0.0, (g.values.len() - 1) as f64);
                let i = (x.floor() as usize).min(g.values.len() - 2);
                let f = x - i as f64;
                g.values[i] * (1.0 - f) + g.values[i + 1] * f
            }
        }
    }

    /// Control scaled by a rational factor (exact) or its float value (samples).
    pub fn scaled(&self, k: &Rational) -> ControlSignal {
        match self {
            ControlSignal::PiecewisePoly(p) => ControlSignal::PiecewisePoly(p.scale(k)),
            ControlSignal::Sampled(g) => ControlSignal::Sampled(Sampled {
                t: g.t,
                values: g.values.iter().map(|v| v * to_f64(k)).collect(),
            }),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ControlSignal::PiecewisePoly(p) => serde_json::json!({
                "type": "piecewise_poly",
                "t": p.horizon().to_string(),
                "breakpoints": p.breaks().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "pieces": p.pieces().iter()
                    .map(|q| q.0.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            }),
            ControlSignal::Sampled(s) => serde_json::json!({
                "type": "samples",
                "t": s.t,
                "values": s.values,
            }),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, Coord2Error> {
        let file: ControlFile = serde_json::from_str(text).map_err(|e| Coord2Error::BadControl(e.to_string()))?;
        file.into_signal()
    }
}

#[derive(Deserialize, Serialize)]
#[serde(tag = "type")]
enum ControlFile {
    #[serde(rename = "piecewise_poly")]
    PiecewisePoly {
        t: Option<String>,
        breakpoints: Vec<String>,
        pieces: Vec<Vec<String>>,
    },
    #[serde(rename = "samples")]
    Samples { t: f64, values: Vec<f64> },
}

impl ControlFile {
    fn into_signal(self) -> Result<ControlSignal, Coord2Error> {
        let bad = |m: String| Coord2Error::BadControl(m);
        match self {
            ControlFile::PiecewisePoly { t, breakpoints, pieces } => {
                let breaks = breakpoints
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| bad(e.to_string()))?;
                if let Some(t) = t {
                    let t = parse_rational(&t).map_err(|e| bad(e.to_string()))?;
                    if breaks.last() != Some(&t) {
                        return Err(bad("last breakpoint must equal t".into()));
                    }
                }
                let pieces = pieces
                    .iter()
                    .map(|c| c.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>().map(Poly::from_coeffs))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| bad(e.to_string()))?;
                PiecewisePoly::new(breaks, pieces)
                    .map(ControlSignal::PiecewisePoly)
                    .ok_or_else(|| bad("breakpoints must start at 0, increase strictly, and match the piece count".into()))
            }
            ControlFile::Samples { t, values } => {
                if !(t > 0.0) || values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
                    return Err(bad("samples need t > 0 and at least two finite values".into()));
                }
                Ok(ControlSignal::Sampled(Sampled { t, values }))
            }
        }
    }
}

/// Operations shared by exact and sampled signals, so that the coordinate
/// recursions are written once.
pub trait Signal: Clone {
    type Value;
    fn one_like(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, k: &Rational) -> Self;
    fn primitive(&self) -> Self;
    fn end_value(&self) -> Self::Value;
}

impl Signal for PiecewisePoly {
    type Value = Rational;

    fn one_like(&self) -> Self {
        PiecewisePoly::constant_on(self.shared_breaks(), Rational::one())
    }

    fn mul(&self, o: &Self) -> Self {
        PiecewisePoly::mul(self, o)
    }

    fn scale(&self, k: &Rational) -> Self {
        PiecewisePoly::scale(self, k)
    }

    fn primitive(&self) -> Self {
        PiecewisePoly::primitive(self)
    }

    fn end_value(&self) -> Rational {
        PiecewisePoly::end_value(self)
    }
}

impl Signal for Sampled {
    type Value = f64;

    fn one_like(&self) -> Self {
        Sampled {
            t: self.t,
            values: vec![1.0; self.values.len()],
        }
    }

    fn mul(&self, o: &Self) -> Self {
        Sampled {
            t: self.t,
            values: self.values.iter().zip(&o.values).map(|(a, b)| a * b).collect(),
        }
    }

    fn scale(&self, k: &Rational) -> Self {
        let k = to_f64(k);
        Sampled {
            t: self.t,
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    /// Cumulative trapezoid rule.
    fn primitive(&self) -> Self {
        let h = self.step();
        let mut out = Vec::with_capacity(self.values.len());
        let mut acc = 0.0;
        out.push(0.0);
        for w in self.values.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            out.push(acc);
        }
        Sampled { t: self.t, values: out }
    }

    fn end_value(&self) -> f64 {
        *self.values.last().expect("nonempty samples")
    }
}

/// The j-th iterated primitive u_j (u_0 = u).
pub fn primitive(u: &ControlSignal, j: usize) -> ControlSignal {
    match u {
        ControlSignal::PiecewisePoly(p) => {
            let mut q = p.clone();
            for _ in 0..j {
                q = q.primitive();
            }
            ControlSignal::PiecewisePoly(q)
        }
        ControlSignal::Sampled(s) => {
            let mut q = s.clone();
            for _ in 0..j {
                q = q.primitive();
            }
            ControlSignal::Sampled(q)
        }
    }
}

fn random_partition<R: Rng>(rng: &mut R, pieces: usize, t: &Rational) -> Vec<Rational> {
    // Distinct interior points on a 1/1000 grid of [0, t].
    let mut cuts: Vec<i64> = Vec::new();
    while cuts.len() + 1 < pieces {
        let c = rng.gen_range(1..1000);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort();
    let mut breaks = vec![Rational::zero()];
    breaks.extend(cuts.into_iter().map(|c| t * rat(c, 1000)));
    breaks.push(t.clone());
    breaks
}

/// Random piecewise-constant control: values are multiples of `amplitude`/1000 in
/// [-amplitude, amplitude].
pub fn random_piecewise_constant<R: Rng>(rng: &mut R, pieces: usize, t: &Rational, amplitude: &Rational) -> ControlSignal {
    let breaks = random_partition(rng, pieces.max(1), t);
    let values = (0..pieces.max(1))
        .map(|_| amplitude * rat(rng.gen_range(-1000..=1000), 1000))
        .collect();
    ControlSignal::piecewise_constant(breaks, values).expect("valid partition")
}

/// Random piecewise-polynomial control with small rational coefficients.
pub fn random_piecewise_poly<R: Rng>(rng: &mut R, pieces: usize, degree: usize, t: &Rational) -> ControlSignal {
    let breaks = random_partition(rng, pieces.max(1), t);
    let polys = (0..pieces.max(1))
        .map(|_| {
            let c = (0..=degree).map(|_| rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect();
            Poly::from_coeffs(c)
        })
        .collect();
    ControlSignal::PiecewisePoly(PiecewisePoly::new(breaks, polys).expect("valid partition"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::int;

    #[test]
    fn json_round_trip() {
        let text = r#"{"t": "1", "type": "piecewise_poly", "breakpoints": ["0","1/2","1"], "pieces": [["1"],["-1"]]}"#;
        let u = ControlSignal::from_json(text).unwrap();
        let back = ControlSignal::from_json(&u.to_json().to_string()).unwrap();
        assert_eq!(u, back);
        assert_eq!(primitive(&u, 1).as_exact().unwrap().end_value(), int(0));
        let s = ControlSignal::from_json(r#"{"type":"samples","t":1.0,"values":[1,1,1]}"#).unwrap();
        assert!(matches!(s, ControlSignal::Sampled(_)));
        assert!(ControlSignal::from_json(r#"{"type":"piecewise_poly","breakpoints":["0","1"],"pieces":[]}"#).is_err());
    }

    #[test]
    fn sampled_primitive_is_trapezoid() {
        let s = Sampled {
            t: 1.0,
            values: vec![0.0, 0.5, 1.0],
        };
        assert!((s.primitive().end_value() - 0.5).abs() < 1e-15);
    }
}
