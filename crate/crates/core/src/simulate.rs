//! Fixed-step RK4 integration of `ẋ = f(x)` with consensus detection.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::protocol::Protocol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("state has {found} entries, protocol has {expected} agents")]
    Dimension { expected: usize, found: usize },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dt: f64,
    pub t_end: f64,
    pub x0: Vec<f64>,
    /// Consensus is declared once `max xᵢ − min xᵢ` drops below this.
    pub spread_tol: f64,
    /// Integration aborts once some `|xᵢ|` exceeds this.
    pub divergence_bound: f64,
}

impl SimulationConfig {
    pub fn new(x0: Vec<f64>, dt: f64, t_end: f64) -> Self {
        SimulationConfig {
            dt,
            t_end,
            x0,
            spread_tol: 1e-6,
            divergence_bound: 1e9,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidConfig(m.to_string()));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt must be positive and finite");
        }
        if !(self.t_end.is_finite() && self.t_end > self.dt) {
            return bad("t_end must be finite and larger than dt");
        }
        if self.spread_tol.is_nan() || self.spread_tol <= 0.0 {
            return bad("spread tolerance must be positive");
        }
        if self.divergence_bound.is_nan() || self.divergence_bound <= 0.0 {
            return bad("divergence bound must be positive");
        }
        if self.x0.iter().any(|v| !v.is_finite()) {
            return bad("initial state must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Converged { t: f64, value: f64 },
    HorizonReached { t: f64 },
    Diverged { t: f64 },
}

impl Outcome {
    pub fn is_converged(&self) -> bool {
        matches!(self, Outcome::Converged { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Converged { .. } => "converged",
            Outcome::HorizonReached { .. } => "horizon_reached",
            Outcome::Diverged { .. } => "diverged",
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Converged { t, value } => write!(f, "converged t={t} value={value}"),
            Outcome::HorizonReached { t } => write!(f, "horizon_reached t={t}"),
            Outcome::Diverged { t } => write!(f, "diverged t={t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub names: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub outcome: Outcome,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds the initial state")
    }
}

type CompiledTerm = (f64, Vec<(usize, i32)>);

/// Protocol with coefficients rounded to `f64` once, as
/// `(coefficient, [(variable, exponent)])` terms per row.
#[derive(Debug, Clone)]
pub struct CompiledProtocol {
    rows: Vec<Vec<CompiledTerm>>,
}

impl CompiledProtocol {
    pub fn new(p: &Protocol) -> Self {
        let rows = p
            .polys()
            .iter()
            .map(|f| {
                f.terms()
                    .map(|(m, c)| {
                        let coeff = c.to_f64().unwrap_or(f64::NAN);
                        let factors = m
                            .exponents()
                            .iter()
                            .enumerate()
                            .filter(|(_, &e)| e > 0)
                            .map(|(v, &e)| (v, i32::try_from(e).unwrap_or(i32::MAX)))
                            .collect();
                        (coeff, factors)
                    })
                    .collect()
            })
            .collect();
        CompiledProtocol { rows }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row
                .iter()
                .map(|(c, factors)| factors.iter().fold(*c, |acc, &(v, e)| acc * x[v].powi(e)))
                .sum();
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, SimError> {
        if x.len() != self.n() {
            return Err(SimError::Dimension {
                expected: self.n(),
                found: x.len(),
            });
        }
        let mut out = vec![0.0; self.n()];
        self.eval_into(x, &mut out);
        Ok(out)
    }

    /// One classical Runge–Kutta step.
    pub fn rk4_step(&self, x: &[f64], dt: f64) -> Vec<f64> {
        let n = x.len();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        self.eval_into(x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        }
        self.eval_into(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        }
        self.eval_into(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + dt * k3[i];
        }
        self.eval_into(&tmp, &mut k4);
        (0..n)
            .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }
}

pub fn evaluate(p: &Protocol, x: &[f64]) -> Result<Vec<f64>, SimError> {
    CompiledProtocol::new(p).evaluate(x)
}

pub fn spread(x: &[f64]) -> f64 {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn integrate(p: &Protocol, cfg: &SimulationConfig) -> Result<Trajectory, SimError> {
    cfg.validate()?;
    if cfg.x0.len() != p.n() {
        return Err(SimError::Dimension {
            expected: p.n(),
            found: cfg.x0.len(),
        });
    }
    let compiled = CompiledProtocol::new(p);
    let steps = (cfg.t_end / cfg.dt).round() as usize;
    let mut times = vec![0.0];
    let mut states = vec![cfg.x0.clone()];
    let check = |x: &[f64], t: f64| -> Option<Outcome> {
        if x.iter().any(|v| !v.is_finite() || v.abs() > cfg.divergence_bound) {
            Some(Outcome::Diverged { t })
        } else if spread(x) < cfg.spread_tol {
            Some(Outcome::Converged { t, value: mean(x) })
        } else {
            None
        }
    };
    let mut outcome = check(&cfg.x0, 0.0);
    let mut k = 0;
    while outcome.is_none() && k < steps {
        k += 1;
        let t = k as f64 * cfg.dt;
        let next = compiled.rk4_step(states.last().expect("nonempty"), cfg.dt);
        outcome = check(&next, t);
        times.push(t);
        states.push(next);
    }
    Ok(Trajectory {
        names: p.ring().names().to_vec(),
        times,
        states,
        outcome: outcome.unwrap_or(Outcome::HorizonReached {
            t: steps as f64 * cfg.dt,
        }),
    })
}

/// Spread series and contraction statistics of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusMetrics {
    pub spread: Vec<f64>,
    pub final_spread: f64,
    /// Largest one-step increase of `max xᵢ` (≤ 0 when never increasing).
    pub max_rise: f64,
    /// Largest one-step decrease of `min xᵢ`.
    pub min_drop: f64,
    /// Steps after the first where the spread grew.
    pub spread_increases: usize,
    pub outcome: Outcome,
}

pub fn consensus_metrics(tr: &Trajectory) -> ConsensusMetrics {
    let spread_series: Vec<f64> = tr.states.iter().map(|x| spread(x)).collect();
    let maxes: Vec<f64> = tr
        .states
        .iter()
        .map(|x| x.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let mins: Vec<f64> = tr
        .states
        .iter()
        .map(|x| x.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let max_rise = maxes
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let min_drop = mins
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::NEG_INFINITY, f64::max);
    let spread_increases = spread_series
        .windows(2)
        .skip(1)
        .filter(|w| w[1] > w[0])
        .count();
    ConsensusMetrics {
        final_spread: *spread_series.last().expect("nonempty trajectory"),
        spread: spread_series,
        max_rise,
        min_drop,
        spread_increases,
        outcome: tr.outcome,
    }
}

/// `xᵢ(0) = i`, 1-based.
pub fn default_initial_state(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64).collect()
}

/// Uniform draw from `(0, 2]` per agent, reproducible for a given seed.
pub fn seeded_initial_state(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| 2.0 - rng.gen_range(0.0..2.0)).collect()
}
