//! Closed-form quadrature statistics: steady-state and transient moments,
//! the three special-case reductions, and the mean photon number.
//!
//! Two independent algebraic routes are kept deliberately. The coefficient
//! route works from the raw coefficient set, `<alpha_pm^2> =
//! -2A(c_f -+ c) / (b lambda_(-/+))`. The eta route evaluates the same
//! moments re-parametrized in `(omega, eta)` over the denominators
//! `chi_pm`. They must agree to near machine precision; that agreement is
//! one of the main correctness gates of the crate.

use crate::error::ModelError;
use crate::model::{coherence_magnitude, compute_coefficients, CoefficientSet, LaserParams};

/// Which quadrature: `Plus` is the in-phase component (`a^dag + a`),
/// `Minus` the out-of-phase one (`i(a^dag - a)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Plus,
    Minus,
}

/// Second-order quadrature statistics at one parameter point.
///
/// `var_plus = 1 + alpha_sq_plus`, `var_minus = 1 - alpha_sq_minus`, and
/// `mean_photon = (alpha_sq_plus - alpha_sq_minus)/4` hold exactly as
/// stored; construct through [`QuadratureMoments::from_alpha_sq`] to keep
/// them that way. Squeezing in the minus quadrature means
/// `var_minus < 1`, i.e. `alpha_sq_minus > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub alpha_sq_plus: f64,
    pub alpha_sq_minus: f64,
    pub var_plus: f64,
    pub var_minus: f64,
    pub mean_photon: f64,
}

impl QuadratureMoments {
    pub fn from_alpha_sq(alpha_sq_plus: f64, alpha_sq_minus: f64) -> Self {
        QuadratureMoments {
            alpha_sq_plus,
            alpha_sq_minus,
            var_plus: 1.0 + alpha_sq_plus,
            var_minus: 1.0 - alpha_sq_minus,
            mean_photon: 0.25 * (alpha_sq_plus - alpha_sq_minus),
        }
    }
}

fn ensure_below_threshold(k: &CoefficientSet, gain_a: f64) -> Result<(), ModelError> {
    if k.lambda_minus <= 0.0 {
        return Err(ModelError::AboveThreshold {
            rate_name: "lambda_minus",
            rate: k.lambda_minus,
            gain_a,
        });
    }
    if k.lambda_plus <= 0.0 {
        return Err(ModelError::AboveThreshold {
            rate_name: "lambda_plus",
            rate: k.lambda_plus,
            gain_a,
        });
    }
    Ok(())
}

/// Steady `<alpha_pm^2>` from the coefficient set.
fn steady_alpha_sq(k: &CoefficientSet, gain_a: f64) -> (f64, f64) {
    let plus = -2.0 * gain_a * (k.c_f - k.c) / (k.b * k.lambda_minus);
    let minus = -2.0 * gain_a * (k.c_f + k.c) / (k.b * k.lambda_plus);
    (plus, minus)
}

/// Steady-state moments by the coefficient route. Errors above threshold:
/// with either decay rate nonpositive the full second-moment set never
/// settles.
pub fn steady_moments(params: &LaserParams) -> Result<QuadratureMoments, ModelError> {
    let k = compute_coefficients(params)?;
    ensure_below_threshold(&k, params.gain_a)?;
    let (plus, minus) = steady_alpha_sq(&k, params.gain_a);
    Ok(QuadratureMoments::from_alpha_sq(plus, minus))
}

/// The numerators of the eta-parametrized steady moments:
/// `<alpha_pm^2> = A (first +- second) / chi_pm`. `first` is `-2 c_f` and
/// `second` is `2 c` rewritten in `(omega, eta)`; keeping them textually
/// separate from the coefficient algebra is what makes the route
/// comparison meaningful.
fn steady_brackets(omega: f64, eta: f64) -> (f64, f64) {
    let s = 2.0 * coherence_magnitude(eta);
    let w2 = omega * omega;
    let first = 0.5 * omega * (1.0 - 3.0 * eta + w2) + s * (1.0 - 0.5 * w2);
    let second = (1.0 - eta) + 0.5 * w2 * (2.0 + eta) - s * 1.5 * omega;
    (first, second)
}

/// Steady-state moments by the eta route.
pub fn steady_moments_eta_form(params: &LaserParams) -> Result<QuadratureMoments, ModelError> {
    let k = compute_coefficients(params)?;
    ensure_below_threshold(&k, params.gain_a)?;
    let a = params.gain_a;
    let (first, second) = steady_brackets(params.omega, params.eta);
    let plus = a * (first + second) / k.chi_plus;
    let minus = a * (first - second) / k.chi_minus;
    Ok(QuadratureMoments::from_alpha_sq(plus, minus))
}

/// Steady mean photon number as the four-fraction eta form. Matches
/// `steady_moments(..).mean_photon` to near machine precision.
pub fn mean_photon_eta_form(params: &LaserParams) -> Result<f64, ModelError> {
    let k = compute_coefficients(params)?;
    ensure_below_threshold(&k, params.gain_a)?;
    let a = params.gain_a;
    let w = params.omega;
    let w2 = w * w;
    let s = 2.0 * coherence_magnitude(params.eta);
    let odd = 0.5 * w * (1.0 - 3.0 * params.eta) + 0.5 * w2 * w;
    let even = (1.0 - params.eta) + 0.5 * w2 * (2.0 + params.eta);
    Ok(-a * (odd - even) / (4.0 * k.chi_minus)
        + a * s * (0.5 * w2 - 1.0 - 1.5 * w) / (4.0 * k.chi_minus)
        + a * (odd + even) / (4.0 * k.chi_plus)
        - a * s * (0.5 * w2 - 1.0 + 1.5 * w) / (4.0 * k.chi_plus))
}

/// Steady variance of one quadrature, gated only on that quadrature's own
/// decay rate. The two quadrature processes are decoupled, so
/// `<alpha_-^2>` (which relaxes at `lambda_plus`) can be perfectly
/// well-defined while the plus quadrature is already unstable; this is
/// exactly the regime where the strongest driven-case squeezing lives.
pub fn steady_variance(params: &LaserParams, quadrature: Quadrature) -> Result<f64, ModelError> {
    let k = compute_coefficients(params)?;
    match quadrature {
        Quadrature::Plus => {
            if k.lambda_minus <= 0.0 {
                return Err(ModelError::AboveThreshold {
                    rate_name: "lambda_minus",
                    rate: k.lambda_minus,
                    gain_a: params.gain_a,
                });
            }
            let plus = -2.0 * params.gain_a * (k.c_f - k.c) / (k.b * k.lambda_minus);
            Ok(1.0 + plus)
        }
        Quadrature::Minus => {
            if k.lambda_plus <= 0.0 {
                return Err(ModelError::AboveThreshold {
                    rate_name: "lambda_plus",
                    rate: k.lambda_plus,
                    gain_a: params.gain_a,
                });
            }
            let minus = -2.0 * params.gain_a * (k.c_f + k.c) / (k.b * k.lambda_plus);
            Ok(1.0 - minus)
        }
    }
}

/// Moments at finite time, cavity starting in vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientMoments {
    pub moments: QuadratureMoments,
    /// False above threshold: the formula still evaluates but grows without
    /// bound instead of saturating.
    pub convergent: bool,
}

/// `(1 - exp(-lambda t)) / lambda`, continuous through `lambda = 0`.
fn growth_factor(lambda: f64, t: f64) -> f64 {
    if lambda == 0.0 {
        t
    } else {
        -f64::exp_m1(-lambda * t) / lambda
    }
}

/// Moments at time `t` from a vacuum start:
/// `<alpha_pm^2(t)> = -(2A/b)(c_f -+ c) * (1 - e^{-lambda_(-/+) t}) / lambda_(-/+)`.
/// At `t = 0` everything vanishes and both variances are exactly 1.
/// Above threshold the value is still returned, flagged non-convergent.
pub fn transient_moments(params: &LaserParams, t: f64) -> Result<TransientMoments, ModelError> {
    if !t.is_finite() || t < 0.0 {
        return Err(ModelError::InvalidParam {
            name: "t",
            reason: "must be a finite time >= 0",
            value: t,
        });
    }
    let k = compute_coefficients(params)?;
    let a = params.gain_a;
    let plus = -2.0 * a * (k.c_f - k.c) / k.b * growth_factor(k.lambda_minus, t);
    let minus = -2.0 * a * (k.c_f + k.c) / k.b * growth_factor(k.lambda_plus, t);
    Ok(TransientMoments {
        moments: QuadratureMoments::from_alpha_sq(plus, minus),
        convergent: k.lambda_minus > 0.0 && k.lambda_plus > 0.0,
    })
}

/// No drive, any superposition: `var_pm = (kappa + A(1 pm sqrt(1-eta^2))) / (A eta + kappa)`.
pub fn variance_undriven(gain_a: f64, kappa: f64, eta: f64) -> Result<(f64, f64), ModelError> {
    LaserParams::new(gain_a, kappa, 0.0, eta)?;
    let rate = gain_a * eta + kappa;
    if rate <= 0.0 {
        return Err(ModelError::AboveThreshold {
            rate_name: "lambda_minus",
            rate,
            gain_a,
        });
    }
    let s = 2.0 * coherence_magnitude(eta);
    Ok((
        (kappa + gain_a * (1.0 + s)) / rate,
        (kappa + gain_a * (1.0 - s)) / rate,
    ))
}

/// Denominators of the all-atoms-in-the-lower-level reduction (eta = 1).
fn ground_chi(gain_a: f64, kappa: f64, omega: f64) -> (f64, f64) {
    let w2 = omega * omega;
    let b = (1.0 + w2) * (1.0 + 0.25 * w2);
    let drive_odd = 0.5 * omega * (1.0 + w2);
    let even = 1.0 - 0.5 * w2;
    (
        kappa * b + gain_a * (even - drive_odd),
        kappa * b + gain_a * (even + drive_odd),
    )
}

/// All atoms initially in the lower level (eta = 1). Squeezing appears
/// only beyond the drive ratio `(3 + sqrt(17))/2 ~ 3.5616`, where the
/// cubic term in the numerator overtakes.
pub fn variance_ground(gain_a: f64, kappa: f64, omega: f64) -> Result<(f64, f64), ModelError> {
    LaserParams::new(gain_a, kappa, omega, 1.0)?;
    let (chi_p, chi_m) = ground_chi(gain_a, kappa, omega);
    if chi_p <= 0.0 {
        return Err(ModelError::AboveThreshold {
            rate_name: "chi_plus",
            rate: chi_p,
            gain_a,
        });
    }
    let w2 = omega * omega;
    let odd = omega - 0.5 * w2 * omega;
    let sq = 1.5 * w2;
    Ok((
        1.0 - gain_a * (odd - sq) / chi_p,
        1.0 + gain_a * (odd + sq) / chi_m,
    ))
}

fn balanced_chi(gain_a: f64, kappa: f64, omega: f64) -> (f64, f64) {
    let w2 = omega * omega;
    let b = (1.0 + w2) * (1.0 + 0.25 * w2);
    let drive_odd = 0.5 * omega * (1.0 + w2);
    (
        kappa * b + gain_a * (1.5 * omega - drive_odd),
        kappa * b + gain_a * (1.5 * omega + drive_odd),
    )
}

fn balanced_brackets(omega: f64) -> (f64, f64) {
    let w2 = omega * omega;
    (
        0.5 * omega * (1.0 + w2) + 1.0 - 0.5 * w2,
        1.0 + w2 - 1.5 * omega,
    )
}

/// Equal populations with maximal coherence (eta = 0). This evaluates the
/// general steady form at eta = 0; see [`variance_balanced_alt`] for the
/// alternate first-bracket transcription it supersedes.
pub fn variance_balanced(gain_a: f64, kappa: f64, omega: f64) -> Result<(f64, f64), ModelError> {
    LaserParams::new(gain_a, kappa, omega, 0.0)?;
    let (chi_p, chi_m) = balanced_chi(gain_a, kappa, omega);
    if chi_p <= 0.0 {
        return Err(ModelError::AboveThreshold {
            rate_name: "chi_plus",
            rate: chi_p,
            gain_a,
        });
    }
    let (first, second) = balanced_brackets(omega);
    Ok((
        1.0 + gain_a * (first + second) / chi_p,
        1.0 - gain_a * (first - second) / chi_m,
    ))
}

/// The alternate eta = 0 transcription whose first bracket reads
/// `(omega/2)(omega^2/2 - 2 - omega) + 1`. It contradicts the general form
/// (and the headline 98.3% squeezing number) and is kept only so the
/// discrepancy stays measured; do not use it for physics.
pub fn variance_balanced_alt(
    gain_a: f64,
    kappa: f64,
    omega: f64,
) -> Result<(f64, f64), ModelError> {
    LaserParams::new(gain_a, kappa, omega, 0.0)?;
    let (chi_p, chi_m) = balanced_chi(gain_a, kappa, omega);
    if chi_p <= 0.0 {
        return Err(ModelError::AboveThreshold {
            rate_name: "chi_plus",
            rate: chi_p,
            gain_a,
        });
    }
    let w2 = omega * omega;
    let first = 0.5 * omega * (0.5 * w2 - 2.0 - omega) + 1.0;
    let second = 1.0 + w2 - 1.5 * omega;
    Ok((
        1.0 + gain_a * first / chi_p + gain_a * second / chi_p,
        1.0 - gain_a * first / chi_m + gain_a * second / chi_m,
    ))
}

/// The three limits with dedicated closed forms for the photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpecialCase {
    /// No drive, any superposition.
    Undriven { eta: f64 },
    /// All atoms start in the bottom level (eta = 1).
    Ground { omega: f64 },
    /// Equal populations, maximal coherence (eta = 0).
    Balanced { omega: f64 },
}

/// Steady mean photon number in one of the special cases. Equals the
/// general steady value at the same point. The balanced branch evaluates
/// the general form at eta = 0: its printed reduction has a transcription
/// error (wrong value and sign at moderate drive) and is not kept.
pub fn mean_photon_special(gain_a: f64, kappa: f64, case: SpecialCase) -> Result<f64, ModelError> {
    match case {
        SpecialCase::Undriven { eta } => {
            LaserParams::new(gain_a, kappa, 0.0, eta)?;
            let rate = gain_a * eta + kappa;
            if rate <= 0.0 {
                return Err(ModelError::AboveThreshold {
                    rate_name: "lambda_minus",
                    rate,
                    gain_a,
                });
            }
            Ok(gain_a * (1.0 - eta) / (2.0 * rate))
        }
        SpecialCase::Ground { omega } => {
            LaserParams::new(gain_a, kappa, omega, 1.0)?;
            let (chi_p, chi_m) = ground_chi(gain_a, kappa, omega);
            if chi_p <= 0.0 {
                return Err(ModelError::AboveThreshold {
                    rate_name: "chi_plus",
                    rate: chi_p,
                    gain_a,
                });
            }
            let w2 = omega * omega;
            let odd = -omega + 0.5 * w2 * omega;
            let sq = 1.5 * w2;
            Ok(-gain_a * (odd - sq) / (4.0 * chi_m) + gain_a * (odd + sq) / (4.0 * chi_p))
        }
        SpecialCase::Balanced { omega } => {
            LaserParams::new(gain_a, kappa, omega, 0.0)?;
            let (chi_p, chi_m) = balanced_chi(gain_a, kappa, omega);
            if chi_p <= 0.0 {
                return Err(ModelError::AboveThreshold {
                    rate_name: "chi_plus",
                    rate: chi_p,
                    gain_a,
                });
            }
            let (first, second) = balanced_brackets(omega);
            Ok(gain_a * ((first + second) / chi_p - (first - second) / chi_m) / 4.0)
        }
    }
}

/// Squeezing relative to vacuum, in percent: 100 means perfectly squeezed,
/// 0 the vacuum limit, negative anti-squeezed.
pub fn squeezing_percent(var_minus: f64) -> f64 {
    (1.0 - var_minus) * 100.0
}
