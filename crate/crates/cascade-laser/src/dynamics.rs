//! Time-domain engines: a fixed-step RK4 integrator for the first and
//! second moment equations, and a stochastic trajectory sampler for the
//! decoupled quadrature Langevin processes.
//!
//! Both exist to cross-check the closed forms in [`crate::analytic`], so
//! neither is allowed to share algebra with that module beyond the raw
//! coefficient set.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::ModelError;
use crate::model::{compute_coefficients, CoefficientSet, LaserParams};

/// One snapshot of the moment hierarchy. From a vacuum start at theta = 0
/// everything is real and `mean_alpha` stays identically zero; the fields
/// are complex because the equations of motion are.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub t: f64,
    pub mean_alpha: Complex64,
    pub alpha_sq: Complex64,
    /// Normal-ordered intensity `<alpha* alpha>`; stays >= -1e-9 from vacuum.
    pub occupancy: f64,
}

impl MomentState {
    /// `(<alpha_+^2>, <alpha_-^2>) = (2 Re<alpha^2> + 2<alpha* alpha>, 2 Re<alpha^2> - 2<alpha* alpha>)`.
    pub fn quadrature_alpha_sq(&self) -> (f64, f64) {
        let re = self.alpha_sq.re;
        (2.0 * re + 2.0 * self.occupancy, 2.0 * re - 2.0 * self.occupancy)
    }
}

/// The linear drift system
///
/// ```text
/// d<alpha>/dt   = -(mu/2) <alpha> + beta <alpha*>
/// d<alpha^2>/dt = -mu <alpha^2>   + 2 beta <alpha* alpha> + source_alpha_sq
/// d<a* a>/dt    = -mu <alpha* alpha> + 2 beta Re<alpha^2> + source_occupancy
/// ```
///
/// separated from [`LaserParams`] so the sources can be manipulated
/// independently of the rates (the superposition checks rely on that).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentDrift {
    pub mu: f64,
    pub beta: f64,
    pub source_alpha_sq: f64,
    pub source_occupancy: f64,
}

impl MomentDrift {
    pub fn from_coefficients(k: &CoefficientSet, gain_a: f64) -> Self {
        MomentDrift {
            mu: k.mu,
            beta: k.beta,
            source_alpha_sq: -gain_a * k.c_f / k.b,
            source_occupancy: gain_a * k.c / k.b,
        }
    }

    // State layout: [Re<a>, Im<a>, Re<a^2>, Im<a^2>, <a* a>].
    fn derivative(&self, s: &[f64; 5]) -> [f64; 5] {
        [
            -0.5 * self.mu * s[0] + self.beta * s[0],
            -0.5 * self.mu * s[1] - self.beta * s[1],
            -self.mu * s[2] + 2.0 * self.beta * s[4] + self.source_alpha_sq,
            -self.mu * s[3],
            -self.mu * s[4] + 2.0 * self.beta * s[2] + self.source_occupancy,
        ]
    }

    fn rk4_step(&self, s: &[f64; 5], h: f64) -> [f64; 5] {
        let k1 = self.derivative(s);
        let k2 = self.derivative(&advance(s, &k1, 0.5 * h));
        let k3 = self.derivative(&advance(s, &k2, 0.5 * h));
        let k4 = self.derivative(&advance(s, &k3, h));
        let mut out = *s;
        for i in 0..5 {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }
}

fn advance(s: &[f64; 5], d: &[f64; 5], h: f64) -> [f64; 5] {
    let mut out = *s;
    for i in 0..5 {
        out[i] += h * d[i];
    }
    out
}

fn check_time_grid(t_final: f64, step: f64, stride: usize) -> Result<(), ModelError> {
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(ModelError::InvalidParam {
            name: "t_final",
            reason: "must be a finite time >= 0",
            value: t_final,
        });
    }
    if !step.is_finite() || step <= 0.0 {
        return Err(ModelError::InvalidParam {
            name: "step",
            reason: "must be a finite time > 0",
            value: step,
        });
    }
    if stride == 0 {
        return Err(ModelError::InvalidParam {
            name: "stride",
            reason: "must be >= 1",
            value: 0.0,
        });
    }
    Ok(())
}

fn check_stability(step: f64, lambda_minus: f64, lambda_plus: f64) -> Result<(), ModelError> {
    let rate = lambda_minus.abs().max(lambda_plus.abs());
    if rate > 0.0 {
        let limit = 1.0 / rate;
        if step > limit {
            return Err(ModelError::StepSize { step, limit });
        }
    }
    Ok(())
}

/// Integrate the moment equations from vacuum with the drift implied by
/// `params`. Snapshots are emitted at `t = 0`, every `stride` steps, and at
/// `t_final`. The requested `step` is shrunk slightly so the grid lands on
/// `t_final` exactly.
pub fn integrate_moments(
    params: &LaserParams,
    t_final: f64,
    step: f64,
    stride: usize,
) -> Result<Vec<MomentState>, ModelError> {
    let k = compute_coefficients(params)?;
    let drift = MomentDrift::from_coefficients(&k, params.gain_a);
    check_stability(step, k.lambda_minus, k.lambda_plus)?;
    integrate_drift(&drift, t_final, step, stride)
}

/// Integrate an explicitly supplied drift system from vacuum. Exposed so
/// callers can probe the linear structure (frozen rates, scaled sources)
/// without inventing parameter points that produce them.
pub fn integrate_drift(
    drift: &MomentDrift,
    t_final: f64,
    step: f64,
    stride: usize,
) -> Result<Vec<MomentState>, ModelError> {
    check_time_grid(t_final, step, stride)?;
    check_stability(
        step,
        drift.mu - 2.0 * drift.beta,
        drift.mu + 2.0 * drift.beta,
    )?;

    let n = (t_final / step).ceil() as usize;
    let h = if n == 0 { 0.0 } else { t_final / n as f64 };

    let mut series = Vec::with_capacity(2 + n / stride);
    let mut s = [0.0f64; 5];
    series.push(snapshot(0.0, &s));
    for i in 1..=n {
        s = drift.rk4_step(&s, h);
        if i % stride == 0 || i == n {
            let t = if i == n { t_final } else { i as f64 * h };
            series.push(snapshot(t, &s));
        }
    }
    Ok(series)
}

fn snapshot(t: f64, s: &[f64; 5]) -> MomentState {
    MomentState {
        t,
        mean_alpha: Complex64::new(s[0], s[1]),
        alpha_sq: Complex64::new(s[2], s[3]),
        occupancy: s[4],
    }
}

/// A scalar sample statistic: ensemble mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

/// Componentwise statistics of a complex-valued sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEstimate {
    pub re: Estimate,
    pub im: Estimate,
}

/// Ensemble summary of a trajectory run. `step` is the realized step after
/// rounding the grid onto `t_final`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStats {
    pub n_traj: usize,
    pub seed: u64,
    pub t_final: f64,
    pub step: f64,
    pub alpha_sq_plus: Estimate,
    pub alpha_sq_minus: Estimate,
    pub mean_plus: ComplexEstimate,
    pub mean_minus: ComplexEstimate,
}

fn noise_amplitude(s_sq: f64) -> Complex64 {
    // A negative per-quadrature noise variance is legitimate here (it is
    // what pushes a variance below vacuum); it is realized as a purely
    // imaginary amplitude so second moments come out right. The trajectory
    // is then bookkeeping, not a probability sample.
    if s_sq >= 0.0 {
        Complex64::new(s_sq.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-s_sq).sqrt())
    }
}

fn estimate(samples: &[f64]) -> Estimate {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Estimate {
        value: mean,
        std_err: (var / n).sqrt(),
    }
}

fn complex_estimate(samples: &[Complex64]) -> ComplexEstimate {
    let re: Vec<f64> = samples.iter().map(|z| z.re).collect();
    let im: Vec<f64> = samples.iter().map(|z| z.im).collect();
    ComplexEstimate {
        re: estimate(&re),
        im: estimate(&im),
    }
}

/// Euler-Maruyama ensemble for the decoupled quadrature processes
/// `d alpha_pm = -(lambda_(-/+)/2) alpha_pm dt + s_pm dW_pm` with
/// `s_pm^2 = -2A(c_f -+ c)/b`. Requires a point strictly below threshold.
///
/// Reproducibility contract: identical arguments give bit-identical output
/// regardless of how many worker threads run the ensemble. Each trajectory
/// draws from its own counter-derived stream of the seeded generator, two
/// normals per step in a fixed order.
pub fn sample_trajectories(
    params: &LaserParams,
    n_traj: usize,
    t_final: f64,
    step: f64,
    seed: u64,
) -> Result<EnsembleStats, ModelError> {
    if n_traj < 2 {
        return Err(ModelError::InvalidParam {
            name: "n_traj",
            reason: "need at least 2 trajectories for standard errors",
            value: n_traj as f64,
        });
    }
    check_time_grid(t_final, step, 1)?;
    let k = compute_coefficients(params)?;
    if k.lambda_minus <= 0.0 || k.lambda_plus <= 0.0 {
        return Err(ModelError::AboveThreshold {
            rate_name: if k.lambda_minus <= 0.0 {
                "lambda_minus"
            } else {
                "lambda_plus"
            },
            rate: k.lambda_minus.min(k.lambda_plus),
            gain_a: params.gain_a,
        });
    }
    check_stability(step, k.lambda_minus, k.lambda_plus)?;

    let n_steps = (t_final / step).ceil() as usize;
    let h = if n_steps == 0 {
        0.0
    } else {
        t_final / n_steps as f64
    };
    let a = params.gain_a;
    let amp_plus = noise_amplitude(-2.0 * a * (k.c_f - k.c) / k.b) * h.sqrt();
    let amp_minus = noise_amplitude(-2.0 * a * (k.c_f + k.c) / k.b) * h.sqrt();
    let decay_plus = 1.0 - 0.5 * k.lambda_minus * h;
    let decay_minus = 1.0 - 0.5 * k.lambda_plus * h;

    let terminal: Vec<(Complex64, Complex64)> = (0..n_traj as u64)
        .into_par_iter()
        .map(|traj| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(traj);
            let mut x_plus = Complex64::new(0.0, 0.0);
            let mut x_minus = Complex64::new(0.0, 0.0);
            for _ in 0..n_steps {
                let xi_plus: f64 = rng.sample(StandardNormal);
                let xi_minus: f64 = rng.sample(StandardNormal);
                x_plus = decay_plus * x_plus + amp_plus * xi_plus;
                x_minus = decay_minus * x_minus + amp_minus * xi_minus;
            }
            (x_plus, x_minus)
        })
        .collect();

    // Quadrature amplitudes are either purely real or purely imaginary, so
    // their squares are exactly real; reducing the real part loses nothing.
    let sq_plus: Vec<f64> = terminal.iter().map(|(p, _)| (p * p).re).collect();
    let sq_minus: Vec<f64> = terminal.iter().map(|(_, m)| (m * m).re).collect();
    let plus: Vec<Complex64> = terminal.iter().map(|(p, _)| *p).collect();
    let minus: Vec<Complex64> = terminal.iter().map(|(_, m)| *m).collect();

    Ok(EnsembleStats {
        n_traj,
        seed,
        t_final,
        step: h,
        alpha_sq_plus: estimate(&sq_plus),
        alpha_sq_minus: estimate(&sq_minus),
        mean_plus: complex_estimate(&plus),
        mean_minus: complex_estimate(&minus),
    })
}

/// The two envelope functions of the formal solution,
/// `a_pm(t) = (e^{-lambda_minus t/2} pm e^{-lambda_plus t/2}) / 2`.
pub fn decay_envelopes(k: &CoefficientSet, t: f64) -> (f64, f64) {
    let slow = (-0.5 * k.lambda_minus * t).exp();
    let fast = (-0.5 * k.lambda_plus * t).exp();
    (0.5 * (slow + fast), 0.5 * (slow - fast))
}
