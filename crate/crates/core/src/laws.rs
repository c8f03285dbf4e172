//! Closed-form hitting-time laws and the exact identities linking the
//! inter-exceedance gap `T_1` to the first hitting time `T*`.
//!
//! The asymptotic laws are pointwise equivalences, not proper distributions:
//!
//! | law | value at `j` | total mass |
//! |-----|--------------|------------|
//! | gap, raw | `ρ (1-ρ)^{(j-1)θ}` | `ρ/η ≈ 1/θ` |
//! | gap, normalized | `η (1-η)^{j-1}` | 1 |
//! | hitting time | `(ρ/θ)(1-θρ)^{j-1}` | `1/θ²` |
//! | hitting time, normalized | `θρ (1-θρ)^{j-1}` | 1 |
//!
//! with `1 - η = (1 - ρ)^θ`. Defective totals are kept as they are; callers
//! choose which variant to compare against data.
//!
//! Tabulated laws returned as [`DiscretePmf`] carry their exact remaining
//! mass (closed-form geometric tail) in the overflow bucket.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exceedance::DiscretePmf;

/// `(1 - x)^e` computed through `ln(1 - x)` to keep accuracy for small `x`.
#[inline]
fn pow_one_minus(x: f64, e: f64) -> f64 {
    (e * (-x).ln_1p()).exp()
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("theta must lie in (0, 1], got {theta}")))
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")))
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tau must be positive, got {tau}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawParams {
    rho: f64,
    theta: f64,
    tau: Option<f64>,
    n: Option<usize>,
}

impl LawParams {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        check_rho(rho)?;
        check_theta(theta)?;
        Ok(Self {
            rho,
            theta,
            tau: None,
            n: None,
        })
    }

    /// Parameters with `ρ = τ/n`.
    pub fn from_tau(tau: f64, n: usize, theta: f64) -> Result<Self> {
        check_tau(tau)?;
        if n == 0 {
            return Err(Error::Domain("n must be positive".into()));
        }
        let mut params = Self::new(tau / n as f64, theta)?;
        params.tau = Some(tau);
        params.n = Some(n);
        Ok(params)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn tau(&self) -> Option<f64> {
        self.tau
    }

    pub fn n(&self) -> Option<usize> {
        self.n
    }
}

/// Normalizing quantities of the gap law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationPair {
    /// `1 - (1 - ρ)^θ`.
    pub eta: f64,
    /// `η / (1 - (1 - η)^{1/θ})`, which equals `η/ρ`.
    pub c: f64,
    /// `(1 - q^θ)^{1/θ}`.
    pub rho_star: f64,
    pub q: f64,
    pub q_star: f64,
}

pub fn normalization(params: &LawParams) -> NormalizationPair {
    let LawParams { rho, theta, .. } = *params;
    let eta = -(theta * (-rho).ln_1p()).exp_m1();
    let c = eta / -((-eta).ln_1p() / theta).exp_m1();
    let rho_star = (eta.ln() / theta).exp();
    NormalizationPair {
        eta,
        c,
        rho_star,
        q: 1.0 - rho,
        q_star: 1.0 - rho_star,
    }
}

/// `ρ (1-ρ)^{(j-1)θ}`: the raw gap law, total mass `ρ/η ≈ 1/θ`.
pub fn t1_pmf_raw(params: &LawParams, j: usize) -> f64 {
    debug_assert!(j >= 1);
    params.rho * pow_one_minus(params.rho, (j as f64 - 1.0) * params.theta)
}

/// Closed-form total of [`t1_pmf_raw`] over `j ≥ 1`.
pub fn t1_raw_total(params: &LawParams) -> f64 {
    params.rho / normalization(params).eta
}

/// Proper geometric gap law `η (1-η)^{j-1}`.
pub fn t1_pmf_normalized(params: &LawParams, j: usize) -> f64 {
    debug_assert!(j >= 1);
    let eta = normalization(params).eta;
    eta * pow_one_minus(eta, j as f64 - 1.0)
}

/// `(ρ/θ)(1-θρ)^{j-1}`: asymptotic hitting-time law with total mass `1/θ²`.
pub fn tstar_pmf_asymptotic(params: &LawParams, j: usize) -> f64 {
    debug_assert!(j >= 1);
    let LawParams { rho, theta, .. } = *params;
    rho / theta * pow_one_minus(theta * rho, j as f64 - 1.0)
}

pub fn tstar_asymptotic_total(theta: f64) -> f64 {
    1.0 / (theta * theta)
}

/// Geometric(θρ) law: the hitting-time law rescaled to unit mass.
pub fn tstar_pmf_normalized(params: &LawParams, j: usize) -> f64 {
    debug_assert!(j >= 1);
    let p = params.theta * params.rho;
    p * pow_one_minus(p, j as f64 - 1.0)
}

fn limit_at_n_args(theta: f64, tau: f64, n: usize) -> Result<f64> {
    check_theta(theta)?;
    check_tau(tau)?;
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let rho = tau / n as f64;
    if theta * rho >= 1.0 {
        return Err(Error::Domain(format!(
            "theta * tau / n = {} must be below 1",
            theta * rho
        )));
    }
    Ok(rho)
}

/// `n · (ρ/θ)(1-θρ)^{n-1}` with `ρ = τ/n`.
///
/// Converges to `τ e^{-θτ}/θ`, which equals [`limit_at_n_target`] only when τ = 1.
pub fn tstar_pmf_limit_at_n(theta: f64, tau: f64, n: usize) -> Result<f64> {
    let rho = limit_at_n_args(theta, tau, n)?;
    Ok(n as f64 * rho / theta * pow_one_minus(theta * rho, n as f64 - 1.0))
}

/// `P{T* = n}/ρ = (1/θ)(1-θρ)^{n-1}`, which converges to `e^{-θτ}/θ` for every τ.
pub fn tstar_pmf_over_rho_at_n(theta: f64, tau: f64, n: usize) -> Result<f64> {
    let rho = limit_at_n_args(theta, tau, n)?;
    Ok(pow_one_minus(theta * rho, n as f64 - 1.0) / theta)
}

/// `e^{-θτ}/θ`, the target value of the two statistics at `j = n`.
pub fn limit_at_n_target(theta: f64, tau: f64) -> f64 {
    (-theta * tau).exp() / theta
}

/// Limit of `P{T*/n > x}`: `e^{-θx}` for `x ≥ 0`.
pub fn scaled_tail(theta: f64, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    (-theta * x).exp()
}

/// The two competing limits of `ρ · E T*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingMeanLimits {
    /// `1/θ³`, from the hitting-time law with mass `1/θ²`.
    pub inverse_theta_cubed: f64,
    /// `τ/θ`, from `E(T*/n) → 1/θ` combined with `ρ ~ τ/n`.
    pub tau_over_theta: f64,
}

pub fn expected_hitting_limits(theta: f64, tau: f64) -> Result<HittingMeanLimits> {
    check_theta(theta)?;
    check_tau(tau)?;
    Ok(HittingMeanLimits {
        inverse_theta_cubed: 1.0 / (theta * theta * theta),
        tau_over_theta: tau / theta,
    })
}

/// Exact renewal identity `P{T* = j} = ρ P{T_1 ≥ j}`.
///
/// The overflow bucket of `t1` is read as mass sitting at `J + 1`, so the
/// output overflow is `ρ` times it and nothing lies beyond `J + 1`. This keeps
/// the map exactly invertible by [`t1_pmf_from_tstar`].
pub fn tstar_pmf_from_t1(t1: &DiscretePmf, rho: f64) -> Result<DiscretePmf> {
    check_rho(rho)?;
    let total = t1.total();
    if total > 1.0 + 1e-9 {
        return Err(Error::Domain(format!(
            "gap pmf total {total} exceeds 1; P{{T* = 1}} would exceed rho"
        )));
    }
    let masses = t1.masses();
    let mut survival = vec![0.0; masses.len()];
    let mut acc = t1.tail_mass();
    for (s, &m) in survival.iter_mut().zip(masses).rev() {
        acc += m;
        *s = rho * acc;
    }
    DiscretePmf::new(survival, rho * t1.tail_mass())
}

/// Stationarity identity `P{T_1 = j} = (P{T* = j} - P{T* = j+1}) / ρ`.
///
/// The overflow bucket of `tstar` stands for `P{T* = J + 1}`. A hitting-time
/// pmf that increases anywhere cannot come from a stationary sequence and is
/// rejected.
pub fn t1_pmf_from_tstar(tstar: &DiscretePmf, rho: f64) -> Result<DiscretePmf> {
    check_rho(rho)?;
    let masses = tstar.masses();
    let overflow = tstar.tail_mass();
    let next = masses.iter().skip(1).chain(std::iter::once(&overflow));
    let mut out = Vec::with_capacity(masses.len());
    for (j, (&here, &after)) in masses.iter().zip(next).enumerate() {
        if after > here {
            return Err(Error::Consistency(format!(
                "hitting-time pmf increases from j = {} ({here}) to j = {} ({after})",
                j + 1,
                j + 2
            )));
        }
        out.push((here - after) / rho);
    }
    DiscretePmf::new(out, tstar.tail_mass() / rho)
}

/// Weights of the mixture `T_θ = χ` w.p. `1/θ²`, `0` w.p. `1 - 1/θ²`,
/// with `χ ~ geometric(θρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureWeights {
    pub geometric: f64,
    pub zero: f64,
    /// True when θ < 1: the weight at zero is negative.
    pub improper: bool,
}

pub fn t_theta_weights(theta: f64) -> Result<MixtureWeights> {
    check_theta(theta)?;
    let geometric = tstar_asymptotic_total(theta);
    let zero = 1.0 - geometric;
    Ok(MixtureWeights {
        geometric,
        zero,
        improper: zero < 0.0,
    })
}

/// Signed mass of `T_θ` at `j ≥ 0`. Negative at zero whenever θ < 1.
pub fn t_theta_mixture(params: &LawParams, j: usize) -> f64 {
    let theta = params.theta;
    if j == 0 {
        1.0 - tstar_asymptotic_total(theta)
    } else {
        tstar_asymptotic_total(theta) * tstar_pmf_normalized(params, j)
    }
}

/// Geometric law `p (1-p)^{j-1}` on `{1..J}` with its exact tail.
pub fn geometric_pmf(p: f64, support_max: usize) -> Result<DiscretePmf> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!(
            "geometric success probability must lie in (0, 1], got {p}"
        )));
    }
    DiscretePmf::from_fn(support_max, pow_one_minus(p, support_max as f64), |j| {
        p * pow_one_minus(p, j as f64 - 1.0)
    })
}

pub fn t1_raw_pmf(params: &LawParams, support_max: usize) -> Result<DiscretePmf> {
    let eta = normalization(params).eta;
    let tail = params.rho * pow_one_minus(eta, support_max as f64) / eta;
    DiscretePmf::from_fn(support_max, tail, |j| t1_pmf_raw(params, j))
}

pub fn t1_normalized_pmf(params: &LawParams, support_max: usize) -> Result<DiscretePmf> {
    geometric_pmf(normalization(params).eta, support_max)
}

pub fn tstar_asymptotic_pmf(params: &LawParams, support_max: usize) -> Result<DiscretePmf> {
    let p = params.theta * params.rho;
    let tail = pow_one_minus(p, support_max as f64) * tstar_asymptotic_total(params.theta);
    DiscretePmf::from_fn(support_max, tail, |j| tstar_pmf_asymptotic(params, j))
}

pub fn tstar_normalized_pmf(params: &LawParams, support_max: usize) -> Result<DiscretePmf> {
    geometric_pmf(params.theta * params.rho, support_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(rho: f64, theta: f64) -> LawParams {
        LawParams::new(rho, theta).unwrap()
    }

    #[test]
    fn param_validation() {
        assert!(LawParams::new(0.1, 0.0).is_err());
        assert!(LawParams::new(0.1, 1.5).is_err());
        assert!(LawParams::new(0.0, 0.5).is_err());
        assert!(LawParams::new(1.0, 0.5).is_err());
        let p = LawParams::from_tau(2.0, 100, 0.5).unwrap();
        assert_eq!(p.rho(), 0.02);
        assert_eq!(p.tau(), Some(2.0));
        assert_eq!(p.n(), Some(100));
        assert!(LawParams::from_tau(0.0, 100, 0.5).is_err());
    }

    #[test]
    fn normalization_collapses_at_theta_one() {
        let np = normalization(&params(0.1, 1.0));
        assert_relative_eq!(np.eta, 0.1, max_relative = 1e-15);
        assert_relative_eq!(np.c, 1.0, max_relative = 1e-14);
        assert_relative_eq!(np.rho_star, 0.1, max_relative = 1e-14);
        assert_relative_eq!(np.q, 0.9);
    }

    #[test]
    fn normalization_frozen_values() {
        // mpmath, 40 digits.
        let np = normalization(&params(0.01, 0.5));
        assert_relative_eq!(np.eta, 0.005012562893380045, max_relative = 1e-14);
        assert_relative_eq!(np.c, 0.5012562893380045, max_relative = 1e-14);
        assert_relative_eq!(np.rho_star, 2.512578676009053e-5, max_relative = 1e-12);
        assert_relative_eq!(np.q_star, 1.0 - 2.512578676009053e-5, max_relative = 1e-15);
        // ρ* written both ways.
        let direct = (1.0 - np.q.powf(0.5)).powf(2.0);
        assert_relative_eq!(np.rho_star, direct, max_relative = 1e-10);
        assert_relative_eq!(np.rho_star, np.eta * np.eta, max_relative = 1e-14);
    }

    #[test]
    fn t1_raw_examples() {
        assert_relative_eq!(t1_pmf_raw(&params(0.1, 1.0), 1), 0.1);
        assert_relative_eq!(t1_pmf_raw(&params(0.01, 0.5), 3), 0.0099, max_relative = 1e-14);
        let p = params(0.01, 0.5);
        assert_relative_eq!(t1_raw_total(&p), 1.99498743710662, max_relative = 1e-13);
        // Numeric summation against the closed form.
        let numeric: f64 = (1..200_000).map(|j| t1_pmf_raw(&p, j)).sum();
        assert_relative_eq!(numeric, t1_raw_total(&p), max_relative = 1e-12);
    }

    #[test]
    fn t1_normalized_examples() {
        let p = params(0.01, 0.5);
        assert_relative_eq!(t1_pmf_normalized(&p, 1), 0.005012562893380045, max_relative = 1e-14);
        let q = params(0.2, 1.0);
        for j in 1..50 {
            assert_relative_eq!(t1_pmf_normalized(&q, j), t1_pmf_raw(&q, j), max_relative = 1e-13);
        }
    }

    #[test]
    fn normalized_gap_over_c_is_raw_gap() {
        for rho in [1e-2, 1e-3, 1e-4] {
            for theta in [0.25, 0.5, 0.9] {
                let p = params(rho, theta);
                let c = normalization(&p).c;
                for j in [1, 2, 5, 20, 1000] {
                    let raw = t1_pmf_raw(&p, j);
                    assert_relative_eq!(t1_pmf_normalized(&p, j) / c, raw, max_relative = 1e-12);
                    // Multiplying by c instead gives c² ≈ θ², not 1.
                    assert_relative_eq!(c * t1_pmf_normalized(&p, j) / raw, c * c, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn tstar_examples() {
        assert_relative_eq!(tstar_pmf_asymptotic(&params(0.1, 1.0), 2), 0.09, max_relative = 1e-14);
        assert_relative_eq!(tstar_pmf_asymptotic(&params(0.01, 0.5), 1), 0.02, max_relative = 1e-14);
        assert_eq!(tstar_asymptotic_total(0.5), 4.0);
    }

    #[test]
    fn tstar_total_by_truncation_plus_closed_tail() {
        for (rho, theta) in [(0.01, 0.5), (0.1, 0.25), (0.003, 1.0)] {
            let p = params(rho, theta);
            let pmf = tstar_asymptotic_pmf(&p, 500).unwrap();
            assert!((pmf.total() - 1.0 / (theta * theta)).abs() < 1e-10);
        }
    }

    #[test]
    fn monotone_in_j() {
        let p = params(0.05, 0.4);
        for j in 1..200 {
            assert!(tstar_pmf_asymptotic(&p, j + 1) < tstar_pmf_asymptotic(&p, j));
            assert!(t1_pmf_raw(&p, j + 1) < t1_pmf_raw(&p, j));
        }
    }

    #[test]
    fn limit_at_n_examples() {
        assert_relative_eq!(limit_at_n_target(1.0, 1.0), 0.36787944117144233, max_relative = 1e-15);
        assert_relative_eq!(limit_at_n_target(0.5, 2.0), 0.7357588823428847, max_relative = 1e-15);
        let v = tstar_pmf_limit_at_n(1.0, 1.0, 1_000_000).unwrap();
        assert!((v - limit_at_n_target(1.0, 1.0)).abs() < 1e-6);
        // With τ ≠ 1 the n-scaled value tends to τ e^{-θτ}/θ.
        let v = tstar_pmf_limit_at_n(0.5, 2.0, 1_000_000).unwrap();
        assert!((v - 2.0 * limit_at_n_target(0.5, 2.0)).abs() < 1e-5);
        let v = tstar_pmf_over_rho_at_n(0.5, 2.0, 1_000_000).unwrap();
        assert!((v - limit_at_n_target(0.5, 2.0)).abs() < 1e-5);
        assert!(tstar_pmf_limit_at_n(0.0, 1.0, 10).is_err());
        assert!(tstar_pmf_limit_at_n(1.0, 20.0, 10).is_err());
    }

    #[test]
    fn scaled_tail_examples() {
        assert_eq!(scaled_tail(0.3, 0.0), 1.0);
        assert_relative_eq!(scaled_tail(1.0, 1.0), (-1.0f64).exp());
        assert_relative_eq!(scaled_tail(0.5, 2.0), (-1.0f64).exp());
    }

    #[test]
    fn hitting_mean_limits() {
        let l = expected_hitting_limits(1.0, 1.0).unwrap();
        assert_eq!((l.inverse_theta_cubed, l.tau_over_theta), (1.0, 1.0));
        let l = expected_hitting_limits(0.5, 1.0).unwrap();
        assert_eq!(l.inverse_theta_cubed, 8.0);
        assert_eq!(l.tau_over_theta, 2.0);
        assert!(expected_hitting_limits(0.0, 1.0).is_err());
    }

    #[test]
    fn renewal_identity_on_geometric_gaps() {
        let rho = 0.07;
        let t1 = geometric_pmf(rho, 60).unwrap();
        let tstar = tstar_pmf_from_t1(&t1, rho).unwrap();
        for j in 1..=60 {
            assert_relative_eq!(tstar.get(j), rho * (1.0 - rho).powi(j as i32 - 1), max_relative = 1e-12);
        }
    }

    #[test]
    fn renewal_identity_on_point_mass() {
        let t1 = DiscretePmf::new(vec![0.0, 0.0, 1.0, 0.0, 0.0], 0.0).unwrap();
        let tstar = tstar_pmf_from_t1(&t1, 0.1).unwrap();
        assert_eq!(tstar.masses(), &[0.1, 0.1, 0.1, 0.0, 0.0]);
        let back = t1_pmf_from_tstar(&tstar, 0.1).unwrap();
        for j in 1..=5 {
            assert!((back.get(j) - t1.get(j)).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_domain_errors() {
        let t1 = DiscretePmf::new(vec![0.5, 0.5], 0.0).unwrap();
        assert!(tstar_pmf_from_t1(&t1, 0.0).is_err());
        assert!(tstar_pmf_from_t1(&t1, 1.0).is_err());
        let heavy = DiscretePmf::new(vec![0.9, 0.9], 0.0).unwrap();
        assert!(tstar_pmf_from_t1(&heavy, 0.1).is_err());
        let increasing = DiscretePmf::new(vec![0.01, 0.02], 0.0).unwrap();
        assert!(matches!(
            t1_pmf_from_tstar(&increasing, 0.1),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn stationarity_identity_on_geometric_hitting_law() {
        let rho: f64 = 0.03;
        // Overflow bucket holds P{T* = 41}.
        let tstar =
            DiscretePmf::from_fn(40, rho * (1.0 - rho).powi(40), |j| rho * (1.0 - rho).powi(j as i32 - 1)).unwrap();
        let t1 = t1_pmf_from_tstar(&tstar, rho).unwrap();
        for j in 1..=40 {
            assert_relative_eq!(t1.get(j), rho * (1.0 - rho).powi(j as i32 - 1), max_relative = 1e-10);
        }
    }

    #[test]
    fn stationarity_identity_on_asymptotic_hitting_law() {
        // Substituting (ρ/θ)(1-θρ)^{j-1} gives ρ(1-θρ)^{j-1}, which agrees with
        // ρ(1-ρ)^{(j-1)θ} to first order in ρ.
        let rho = 1e-3;
        let theta = 0.5;
        let p = params(rho, theta);
        let support = 50;
        let tstar = DiscretePmf::from_fn(support, tstar_pmf_asymptotic(&p, support + 1), |j| {
            tstar_pmf_asymptotic(&p, j)
        })
        .unwrap();
        let t1 = t1_pmf_from_tstar(&tstar, rho).unwrap();
        for j in 1..=support {
            let expected = rho * (1.0 - theta * rho).powi(j as i32 - 1);
            assert_relative_eq!(t1.get(j), expected, max_relative = 1e-9);
            let rel = (t1.get(j) / t1_pmf_raw(&p, j) - 1.0).abs();
            // (1-θρ)/(1-ρ)^θ - 1 = O(ρ²) per step.
            assert!(rel < j as f64 * rho * rho, "j={j} rel={rel}");
        }
    }

    #[test]
    fn theta_one_collapse() {
        let rho = 0.013;
        let p = params(rho, 1.0);
        for j in 1..300 {
            let g = rho * (1.0 - rho).powi(j as i32 - 1);
            for v in [
                t1_pmf_raw(&p, j),
                t1_pmf_normalized(&p, j),
                tstar_pmf_asymptotic(&p, j),
                tstar_pmf_normalized(&p, j),
                t_theta_mixture(&p, j),
            ] {
                assert_relative_eq!(v, g, max_relative = 1e-12);
            }
        }
        assert_eq!(t_theta_mixture(&p, 0), 0.0);
    }

    #[test]
    fn mixture_matches_hitting_law_and_flags_negativity() {
        let p = params(0.02, 0.5);
        for j in 1..100 {
            assert_relative_eq!(
                t_theta_mixture(&p, j),
                tstar_pmf_asymptotic(&p, j),
                max_relative = 1e-14
            );
        }
        assert_eq!(t_theta_mixture(&p, 0), -3.0);
        let w = t_theta_weights(0.5).unwrap();
        assert_eq!((w.geometric, w.zero, w.improper), (4.0, -3.0, true));
        assert!(!t_theta_weights(1.0).unwrap().improper);
    }

    #[test]
    fn tabulated_laws_have_exact_totals() {
        let p = params(0.02, 0.4);
        assert!((t1_raw_pmf(&p, 100).unwrap().total() - t1_raw_total(&p)).abs() < 1e-12);
        assert!((t1_normalized_pmf(&p, 100).unwrap().total() - 1.0).abs() < 1e-12);
        assert!((tstar_normalized_pmf(&p, 100).unwrap().total() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn c_equals_eta_over_rho(rho in 1e-9f64..0.999, theta in 1e-3f64..=1.0) {
            let np = normalization(&params(rho, theta));
            prop_assert!((np.c - np.eta / rho).abs() <= 1e-12 * np.c);
            let one_minus_eta = (1.0 - rho).powf(theta);
            prop_assert!(((1.0 - np.eta) - one_minus_eta).abs() <= 1e-12);
        }

        #[test]
        fn identities_are_mutually_inverse(
            raw in prop::collection::vec(0.0f64..1.0, 1..=20),
            tail in 0.0f64..1.0,
            rho in 0.001f64..0.999,
        ) {
            let total: f64 = raw.iter().sum::<f64>() + tail;
            prop_assume!(total > 0.0);
            let t1 = DiscretePmf::new(raw.iter().map(|m| m / total).collect(), tail / total).unwrap();
            let tstar = tstar_pmf_from_t1(&t1, rho).unwrap();
            let back = t1_pmf_from_tstar(&tstar, rho).unwrap();
            for j in 1..=t1.support_max() {
                prop_assert!((back.get(j) - t1.get(j)).abs() < 1e-12);
            }
            prop_assert!((back.tail_mass() - t1.tail_mass()).abs() < 1e-12);
        }
    }
}
