//! Parameters, initial-superposition algebra, derived rate constants, and
//! threshold checks.
//!
//! Everything downstream is a function of five knobs: linear gain `A`,
//! cavity loss `kappa`, drive ratio `omega` (drive Rabi frequency over the
//! atomic decay rate), population parameter `eta`, and coherence phase
//! `theta`. Atoms enter the cavity in the superposition
//! `rho_aa = (1 - eta)/2`, `rho_cc = (1 + eta)/2`,
//! `rho_ac = sqrt(1 - eta^2)/2 * exp(i theta)`, so `eta = 1` means all atoms
//! start in the lower level and `eta = 0` means maximal initial coherence.

use num_complex::Complex64;

use crate::error::ModelError;

/// The five physical knobs. All rates are in units of the atomic decay
/// rate, so `omega` is the dimensionless drive ratio and times elsewhere
/// are in units of the atomic lifetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserParams {
    /// Linear gain coefficient A (injection rate times coupling squared).
    pub gain_a: f64,
    /// Cavity damping constant.
    pub kappa: f64,
    /// Drive ratio, real and nonnegative.
    pub omega: f64,
    /// Population parameter in [-1, 1].
    pub eta: f64,
    /// Phase of the initial atomic coherence, radians.
    pub theta: f64,
}

impl LaserParams {
    /// Parameters with a real initial coherence (`theta = 0`), the case all
    /// closed forms cover.
    pub fn new(gain_a: f64, kappa: f64, omega: f64, eta: f64) -> Result<Self, ModelError> {
        Self::with_theta(gain_a, kappa, omega, eta, 0.0)
    }

    pub fn with_theta(
        gain_a: f64,
        kappa: f64,
        omega: f64,
        eta: f64,
        theta: f64,
    ) -> Result<Self, ModelError> {
        let p = Self {
            gain_a,
            kappa,
            omega,
            eta,
            theta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |name: &'static str, value: f64, ok: bool, reason: &'static str| {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(ModelError::InvalidParam {
                    name,
                    reason,
                    value,
                })
            }
        };
        check("gain_a", self.gain_a, self.gain_a >= 0.0, "must be >= 0")?;
        check("kappa", self.kappa, self.kappa > 0.0, "must be > 0")?;
        check("omega", self.omega, self.omega >= 0.0, "must be >= 0")?;
        check(
            "eta",
            self.eta,
            (-1.0..=1.0).contains(&self.eta),
            "must lie in [-1, 1]",
        )?;
        check("theta", self.theta, true, "must be finite")?;
        Ok(())
    }
}

/// Initial atomic density-matrix elements in the {top, bottom} subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialAtomState {
    pub rho_aa: f64,
    pub rho_cc: f64,
    pub rho_ac: Complex64,
}

/// `sqrt(1 - eta^2) / 2`, the coherence magnitude. Factored form avoids the
/// cancellation in `1 - eta*eta` near the endpoints.
pub(crate) fn coherence_magnitude(eta: f64) -> f64 {
    0.5 * ((1.0 - eta) * (1.0 + eta)).sqrt()
}

/// Populations and coherence of the injected superposition.
pub fn derive_initial_state(eta: f64, theta: f64) -> Result<InitialAtomState, ModelError> {
    if !eta.is_finite() || !(-1.0..=1.0).contains(&eta) {
        return Err(ModelError::InvalidParam {
            name: "eta",
            reason: "must lie in [-1, 1]",
            value: eta,
        });
    }
    if !theta.is_finite() {
        return Err(ModelError::InvalidParam {
            name: "theta",
            reason: "must be finite",
            value: theta,
        });
    }
    Ok(InitialAtomState {
        rho_aa: 0.5 * (1.0 - eta),
        rho_cc: 0.5 * (1.0 + eta),
        rho_ac: Complex64::from_polar(coherence_magnitude(eta), theta),
    })
}

/// The derived algebra for a real initial coherence.
///
/// `b` normalizes everything; `c` and `d` weight the gain and absorption
/// channels; `c_e` and `c_f` are the anomalous (phase-sensitive) weights.
/// The conventional symbol `E` is written `c_e` here so it cannot be
/// confused with the noise force.
///
/// From these: drift `mu = (A/b)(d - c) + kappa`, anomalous coupling
/// `beta = (A/2b)(c_e - c_f)`, quadrature decay rates
/// `lambda_minus = mu - 2 beta` and `lambda_plus = mu + 2 beta`, and the
/// steady-state denominators `chi_plus`, `chi_minus`. The central
/// self-check of the whole model is the identity pair
/// `chi_plus = b * lambda_minus`, `chi_minus = b * lambda_plus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub c_e: f64,
    pub c_f: f64,
    pub mu: f64,
    pub beta: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub chi_plus: f64,
    pub chi_minus: f64,
}

/// Evaluates the coefficient algebra at `theta = 0`.
///
/// A nonzero phase is rejected: the closed forms take the coherence as
/// real, and their complex extension is a different derivation (the
/// Fock-basis generator handles that case).
pub fn compute_coefficients(params: &LaserParams) -> Result<CoefficientSet, ModelError> {
    params.validate()?;
    if params.theta != 0.0 {
        return Err(ModelError::UnsupportedPhase {
            theta: params.theta,
        });
    }

    let a = params.gain_a;
    let w = params.omega;
    let w2 = w * w;
    let rho_aa = 0.5 * (1.0 - params.eta);
    let rho_cc = 0.5 * (1.0 + params.eta);
    let r = coherence_magnitude(params.eta);

    // One factor per drive sideband: (1 + w^2) from the two-photon channel,
    // (1 + w^2/4) from the one-photon channel.
    let f1 = 1.0 + w2;
    let f4 = 1.0 + 0.25 * w2;
    let b = f1 * f4;

    let c = rho_aa * f4 - r * 1.5 * w + rho_cc * 0.75 * w2;
    let d = rho_aa * 0.75 * w2 + r * 1.5 * w + rho_cc * f4;
    let half_detuned = 1.0 - 0.5 * w2;
    let c_e = -rho_aa * 0.5 * w * half_detuned - r * half_detuned + rho_cc * w * f4;
    let c_f = -rho_aa * w * f4 - r * half_detuned + rho_cc * 0.5 * w * half_detuned;

    let mu = a / b * (d - c) + params.kappa;
    let beta = a / (2.0 * b) * (c_e - c_f);
    let lambda_minus = mu - 2.0 * beta;
    let lambda_plus = mu + 2.0 * beta;

    // Independent route to b*lambda_(-/+): same physics, different algebra.
    let drive_odd = 0.5 * w * f1;
    let common = params.eta * half_detuned + 2.0 * r * 1.5 * w;
    let chi_plus = params.kappa * b + a * (common - drive_odd);
    let chi_minus = params.kappa * b + a * (common + drive_odd);

    Ok(CoefficientSet {
        b,
        c,
        d,
        c_e,
        c_f,
        mu,
        beta,
        lambda_minus,
        lambda_plus,
        chi_plus,
        chi_minus,
    })
}

/// Outcome of the stability check. The mode settles only when both
/// quadrature decay rates are positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub below_threshold: bool,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    /// `min(lambda_minus, lambda_plus)`, the distance to threshold. Useful
    /// for pruning sweeps before evaluating observables.
    pub margin: f64,
}

pub fn check_threshold(coeffs: &CoefficientSet) -> StabilityReport {
    let margin = coeffs.lambda_minus.min(coeffs.lambda_plus);
    StabilityReport {
        below_threshold: coeffs.lambda_minus > 0.0 && coeffs.lambda_plus > 0.0,
        lambda_minus: coeffs.lambda_minus,
        lambda_plus: coeffs.lambda_plus,
        margin,
    }
}

/// Largest gain with a steady state at fixed (kappa, omega, eta), found by
/// bisection on `lambda_minus(A) = 0`. Returns `Ok(None)` when the mode is
/// stable at every gain (the slow quadrature's gain coefficient is
/// nonnegative, so loss always wins).
pub fn max_stable_gain(kappa: f64, omega: f64, eta: f64) -> Result<Option<f64>, ModelError> {
    let at = |a: f64| -> Result<f64, ModelError> {
        let p = LaserParams::new(a, kappa, omega, eta)?;
        Ok(compute_coefficients(&p)?.lambda_minus)
    };

    // lambda_minus is affine in A with intercept kappa > 0; if it has not
    // dropped below zero by this gain it never will.
    let mut hi = 1.0;
    let mut f_hi = at(hi)?;
    while f_hi > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Ok(None);
        }
        f_hi = at(hi)?;
    }
    if f_hi == 0.0 {
        return Ok(Some(hi));
    }

    let mut lo = 0.0;
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if at(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
