//! Stationary process simulators with closed-form extremal index and marginal.
//!
//! Three families are available:
//!
//! - i.i.d. draws, θ = 1;
//! - the max-autoregressive process `X_t = max(α X_{t-1}, (1-α) Z_t)` with
//!   unit-Fréchet innovations, θ = 1 - α;
//! - moving maxima `X_t = max(Z_t, ..., Z_{t-m+1})`, θ = 1/m.
//!
//! Every path starts in the stationary law, so no burn-in is needed. The ARMAX
//! recursion preserves the unit-Fréchet law because
//! `P{α X ≤ x} · P{(1-α) Z ≤ x} = e^{-α/x} e^{-(1-α)/x} = e^{-1/x}`.

use std::collections::VecDeque;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Innovation distribution. For ARMAX a `Uniform` marginal is obtained by the
/// probability integral transform `e^{-1/X}` of the unit-Fréchet path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Marginal {
    #[default]
    UnitFrechet,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProcessKind {
    Iid,
    Armax { alpha: f64 },
    MovingMax { m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessModel {
    #[serde(flatten)]
    pub kind: ProcessKind,
    #[serde(default)]
    pub marginal: Marginal,
}

impl ProcessModel {
    pub fn iid(marginal: Marginal) -> Self {
        Self {
            kind: ProcessKind::Iid,
            marginal,
        }
    }

    pub fn armax(alpha: f64) -> Result<Self> {
        Self::armax_with_marginal(alpha, Marginal::UnitFrechet)
    }

    pub fn armax_with_marginal(alpha: f64, marginal: Marginal) -> Result<Self> {
        let model = Self {
            kind: ProcessKind::Armax { alpha },
            marginal,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn moving_max(m: usize, marginal: Marginal) -> Result<Self> {
        let model = Self {
            kind: ProcessKind::MovingMax { m },
            marginal,
        };
        model.validate()?;
        Ok(model)
    }

    /// Checks parameter ranges. Needed after deserialization, which bypasses
    /// the constructors.
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ProcessKind::Iid => Ok(()),
            ProcessKind::Armax { alpha } => {
                if (0.0..1.0).contains(&alpha) {
                    Ok(())
                } else {
                    Err(Error::param("alpha", format!("must lie in [0, 1), got {alpha}")))
                }
            }
            ProcessKind::MovingMax { m } => {
                if m >= 1 {
                    Ok(())
                } else {
                    Err(Error::param("m", "window length must be at least 1"))
                }
            }
        }
    }

    /// Extremal index of the process, always in (0, 1].
    pub fn true_theta(&self) -> f64 {
        match self.kind {
            ProcessKind::Iid => 1.0,
            ProcessKind::Armax { alpha } => 1.0 - alpha,
            ProcessKind::MovingMax { m } => 1.0 / m as f64,
        }
    }

    /// Number of innovations whose maximum forms one observation.
    fn window(&self) -> usize {
        match self.kind {
            ProcessKind::MovingMax { m } => m,
            _ => 1,
        }
    }

    /// Stationary marginal CDF of a single `X_t`.
    ///
    /// For moving maxima this is `G(x)^m`, with `G` the innovation CDF.
    pub fn marginal_cdf(&self, x: f64) -> f64 {
        let m = self.window() as f64;
        match self.marginal {
            Marginal::UnitFrechet => {
                if x > 0.0 {
                    (-m / x).exp()
                } else {
                    0.0
                }
            }
            Marginal::Uniform => {
                if x.is_nan() {
                    f64::NAN
                } else {
                    x.clamp(0.0, 1.0).powf(m)
                }
            }
        }
    }

    /// Inverse of [`marginal_cdf`](Self::marginal_cdf) on (0, 1).
    pub fn marginal_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {p}")));
        }
        let m = self.window() as f64;
        Ok(match self.marginal {
            Marginal::UnitFrechet => -m / p.ln(),
            Marginal::Uniform => {
                if m == 1.0 {
                    p
                } else {
                    (p.ln() / m).exp()
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub values: Vec<f64>,
    pub model: ProcessModel,
    pub seed: u64,
    pub replication_id: u64,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Random stream for one replication.
///
/// The master seed keys the generator and the replication id selects one of
/// its 2^64 independent streams, so replications can run in any order.
pub fn replication_rng(seed: u64, replication_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication_id);
    rng
}

/// Unit-Fréchet variate by inversion: `Z = -1 / ln U`.
#[inline]
fn unit_frechet<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    -1.0 / u.ln()
}

#[inline]
fn innovation<R: Rng + ?Sized>(rng: &mut R, marginal: Marginal) -> f64 {
    match marginal {
        Marginal::UnitFrechet => unit_frechet(rng),
        Marginal::Uniform => rng.sample(Open01),
    }
}

/// Draws a stationary path of length `n`.
pub fn simulate(model: ProcessModel, n: usize, seed: u64, replication_id: u64) -> Result<SamplePath> {
    if n == 0 {
        return Err(Error::param("n", "path length must be positive"));
    }
    model.validate()?;
    let mut rng = replication_rng(seed, replication_id);
    let values = match model.kind {
        ProcessKind::Iid => (0..n).map(|_| innovation(&mut rng, model.marginal)).collect(),
        ProcessKind::Armax { alpha } => armax_path(&mut rng, alpha, n, model.marginal),
        ProcessKind::MovingMax { m } => moving_max_path(&mut rng, m, n, model.marginal),
    };
    Ok(SamplePath {
        values,
        model,
        seed,
        replication_id,
    })
}

fn armax_path<R: Rng + ?Sized>(rng: &mut R, alpha: f64, n: usize, marginal: Marginal) -> Vec<f64> {
    // X_0 drawn from the unit-Fréchet stationary law.
    let mut x = unit_frechet(rng);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        x = (alpha * x).max((1.0 - alpha) * unit_frechet(rng));
        values.push(x);
    }
    if marginal == Marginal::Uniform {
        for v in &mut values {
            *v = (-1.0 / *v).exp();
        }
    }
    values
}

fn moving_max_path<R: Rng + ?Sized>(rng: &mut R, m: usize, n: usize, marginal: Marginal) -> Vec<f64> {
    // m - 1 pre-samples make X_1 a full window maximum.
    let total = n + m - 1;
    let innovations: Vec<f64> = (0..total).map(|_| innovation(rng, marginal)).collect();
    if m == 1 {
        return innovations;
    }
    // Monotone deque of indices whose innovations are decreasing.
    let mut window: VecDeque<usize> = VecDeque::with_capacity(m);
    let mut values = Vec::with_capacity(n);
    for (i, &z) in innovations.iter().enumerate() {
        while window.back().is_some_and(|&b| innovations[b] <= z) {
            window.pop_back();
        }
        window.push_back(i);
        if window.front().is_some_and(|&f| f + m <= i) {
            window.pop_front();
        }
        if i + 1 >= m {
            values.push(innovations[window[0]]);
        }
    }
    values
}
