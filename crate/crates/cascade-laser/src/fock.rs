//! Brute-force quantum oracle: the cavity master equation integrated in a
//! truncated photon-number basis.
//!
//! Nothing here reuses the linearized algebra beyond the raw coefficients,
//! so agreement between this module and [`crate::analytic`] validates the
//! whole c-number pipeline. This is also the only route that accepts a
//! nonzero coherence phase theta (experimental; no closed forms exist to
//! check it against).
//!
//! The generator is kept in the manifestly Hermiticity-preserving form
//! `d rho/dt = K[rho] + K[rho]^dag` with
//!
//! ```text
//! K = g_c (adag rho a - a adag rho) + g_d (a rho adag - adag a rho)
//!   + g_e (adag rho adag - rho adag^2) + g_f (adag rho adag - adag^2 rho)
//! ```
//!
//! which at theta = 0 reproduces the stated real-coefficient master
//! equation term for term. All operators are the truncated ones, which
//! makes the trace of the derivative vanish identically at any dimension
//! (every term telescopes), not just in the infinite-basis limit.

use ndarray::Array2;
use num_complex::Complex64;

use crate::analytic::QuadratureMoments;
use crate::error::ModelError;
use crate::model::{compute_coefficients, derive_initial_state, LaserParams};

/// The four complex rates of the generator written above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorCoefficients {
    pub g_c: Complex64,
    pub g_d: Complex64,
    pub g_e: Complex64,
    pub g_f: Complex64,
}

/// Generator rates from laser parameters. Valid for any coherence phase:
/// the complex initial coherence is inserted into the coefficient formulas
/// verbatim and Hermiticity is carried by the `K + K^dag` structure.
pub fn generator_coefficients(params: &LaserParams) -> Result<GeneratorCoefficients, ModelError> {
    params.validate()?;
    let atom = derive_initial_state(params.eta, params.theta)?;
    let a = params.gain_a;
    let w = params.omega;
    let w2 = w * w;
    let f1 = 1.0 + w2;
    let f4 = 1.0 + 0.25 * w2;
    let half_detuned = 1.0 - 0.5 * w2;
    let b = f1 * f4;

    let c = atom.rho_aa * f4 - atom.rho_ac * (1.5 * w) + atom.rho_cc * (0.75 * w2);
    let d = atom.rho_aa * (0.75 * w2) + atom.rho_ac * (1.5 * w) + atom.rho_cc * f4;
    let c_e = -atom.rho_aa * (0.5 * w) * half_detuned - atom.rho_ac * half_detuned
        + atom.rho_cc * w * f4;
    let c_f = -atom.rho_aa * w * f4 - atom.rho_ac * half_detuned
        + atom.rho_cc * (0.5 * w) * half_detuned;

    Ok(GeneratorCoefficients {
        g_c: a * c / (2.0 * b),
        g_d: (a * d / b + params.kappa) / 2.0,
        g_e: a * c_e / (2.0 * b),
        g_f: a * c_f / (2.0 * b),
    })
}

fn rate_scale(g: &GeneratorCoefficients, dim: usize) -> f64 {
    // Gershgorin-style bound on the generator norm; sets the step budget.
    let sum = g.g_c.norm() + g.g_d.norm() + g.g_e.norm() + g.g_f.norm();
    2.0 * sum * (dim + 2) as f64
}

/// Cavity state on Fock levels `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDensityMatrix {
    data: Array2<Complex64>,
    pub t: f64,
}

impl TruncatedDensityMatrix {
    pub fn vacuum(n_max: usize) -> Self {
        let mut data = Array2::zeros((n_max + 1, n_max + 1));
        data[[0, 0]] = Complex64::new(1.0, 0.0);
        TruncatedDensityMatrix { data, t: 0.0 }
    }

    /// Diagonal (number-basis mixed) state from the given populations.
    pub fn from_diagonal(populations: &[f64]) -> Self {
        let n = populations.len();
        assert!(n >= 1, "need at least one Fock level");
        let mut data = Array2::zeros((n, n));
        for (i, &p) in populations.iter().enumerate() {
            data[[i, i]] = Complex64::new(p, 0.0);
        }
        TruncatedDensityMatrix { data, t: 0.0 }
    }

    pub fn n_max(&self) -> usize {
        self.data.nrows() - 1
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.data.nrows()).map(|i| self.data[[i, i]].re).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.data.nrows();
        let mut worst = 0.0f64;
        for m in 0..n {
            for k in m..n {
                let d = (self.data[[m, k]] - self.data[[k, m]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Population in the top three Fock levels; the truncation health gauge.
    pub fn tail_population(&self) -> f64 {
        let n = self.data.nrows();
        (n.saturating_sub(3)..n).map(|i| self.data[[i, i]].re).sum()
    }

    pub fn mean_photon(&self) -> f64 {
        (0..self.data.nrows())
            .map(|i| i as f64 * self.data[[i, i]].re)
            .sum()
    }

    pub fn mean_a(&self) -> Complex64 {
        (1..self.data.nrows())
            .map(|m| (m as f64).sqrt() * self.data[[m, m - 1]])
            .sum()
    }

    pub fn mean_a_sq(&self) -> Complex64 {
        (2..self.data.nrows())
            .map(|m| ((m * (m - 1)) as f64).sqrt() * self.data[[m, m - 2]])
            .sum()
    }

    /// Smallest eigenvalue, via the real symmetric embedding
    /// `[[Re, -Im], [Im, Re]]` (its spectrum is the Hermitian spectrum,
    /// doubled).
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.data.nrows();
        let mut m = nalgebra::DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.data[[i, j]];
                m[(i, j)] = z.re;
                m[(i, j + n)] = -z.im;
                m[(i + n, j)] = z.im;
                m[(i + n, j + n)] = z.re;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(m);
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Quadrature observables of the state. The variances subtract the
    /// (normally zero) first moments, so they are true variances even for
    /// displaced states.
    pub fn observables(&self) -> QuadratureMoments {
        let n = self.mean_photon();
        let a = self.mean_a();
        let asq = self.mean_a_sq();
        let var_plus = 1.0 + 2.0 * n + 2.0 * asq.re - (2.0 * a.re) * (2.0 * a.re);
        let var_minus = 1.0 + 2.0 * n - 2.0 * asq.re - (2.0 * a.im) * (2.0 * a.im);
        QuadratureMoments::from_alpha_sq(var_plus - 1.0, 1.0 - var_minus)
    }
}

/// `d rho/dt` under the generator implied by `params`.
pub fn apply_liouvillian(
    params: &LaserParams,
    rho: &TruncatedDensityMatrix,
) -> Result<TruncatedDensityMatrix, ModelError> {
    let g = generator_coefficients(params)?;
    Ok(apply_generator(&g, rho))
}

/// `d rho/dt` under explicitly supplied rates. Useful for probing single
/// parts of the generator (e.g. the number-conserving sector alone).
pub fn apply_generator(
    g: &GeneratorCoefficients,
    rho: &TruncatedDensityMatrix,
) -> TruncatedDensityMatrix {
    let mut out = Array2::zeros(rho.data.raw_dim());
    derivative_into(g, &rho.data, &mut out);
    TruncatedDensityMatrix {
        data: out,
        t: rho.t,
    }
}

// Entrywise gathering form of K[rho] + K[rho]^dag with truncated ladder
// operators. `d_m` is the diagonal of the truncated a adag: m+1 below the
// top level, 0 at it. Every sqrt is taken from a precomputed table.
fn derivative_into(g: &GeneratorCoefficients, rho: &Array2<Complex64>, out: &mut Array2<Complex64>) {
    let n = rho.nrows();
    let sq: Vec<f64> = (0..n + 2).map(|i| (i as f64).sqrt()).collect();
    let d = |m: usize| if m + 1 < n { (m + 1) as f64 } else { 0.0 };
    let gain = g.g_c + g.g_c.conj();
    let loss = g.g_d + g.g_d.conj();
    let up = g.g_e + g.g_f;
    let down = up.conj();

    for m in 0..n {
        for k in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            if m >= 1 && k >= 1 {
                acc += gain * (sq[m] * sq[k]) * rho[[m - 1, k - 1]];
            }
            acc -= (g.g_c * d(m) + g.g_c.conj() * d(k)) * rho[[m, k]];
            if m + 1 < n && k + 1 < n {
                acc += loss * (sq[m + 1] * sq[k + 1]) * rho[[m + 1, k + 1]];
            }
            acc -= (g.g_d * m as f64 + g.g_d.conj() * k as f64) * rho[[m, k]];
            if m >= 1 && k + 1 < n {
                acc += up * (sq[m] * sq[k + 1]) * rho[[m - 1, k + 1]];
            }
            if m + 1 < n && k >= 1 {
                acc += down * (sq[m + 1] * sq[k]) * rho[[m + 1, k - 1]];
            }
            if k + 2 < n {
                acc -= g.g_e * (sq[k + 1] * sq[k + 2]) * rho[[m, k + 2]];
            }
            if m + 2 < n {
                acc -= g.g_e.conj() * (sq[m + 1] * sq[m + 2]) * rho[[m + 2, k]];
            }
            if m >= 2 {
                acc -= g.g_f * (sq[m] * sq[m - 1]) * rho[[m - 2, k]];
            }
            if k >= 2 {
                acc -= g.g_f.conj() * (sq[k] * sq[k - 1]) * rho[[m, k - 2]];
            }
            out[[m, k]] = acc;
        }
    }
}

struct Rk4Workspace {
    k1: Array2<Complex64>,
    k2: Array2<Complex64>,
    k3: Array2<Complex64>,
    k4: Array2<Complex64>,
    tmp: Array2<Complex64>,
}

impl Rk4Workspace {
    fn new(n: usize) -> Self {
        Rk4Workspace {
            k1: Array2::zeros((n, n)),
            k2: Array2::zeros((n, n)),
            k3: Array2::zeros((n, n)),
            k4: Array2::zeros((n, n)),
            tmp: Array2::zeros((n, n)),
        }
    }

    fn step(&mut self, g: &GeneratorCoefficients, rho: &mut Array2<Complex64>, h: f64) {
        derivative_into(g, rho, &mut self.k1);
        self.tmp.assign(rho);
        self.tmp.scaled_add(Complex64::new(0.5 * h, 0.0), &self.k1);
        derivative_into(g, &self.tmp, &mut self.k2);
        self.tmp.assign(rho);
        self.tmp.scaled_add(Complex64::new(0.5 * h, 0.0), &self.k2);
        derivative_into(g, &self.tmp, &mut self.k3);
        self.tmp.assign(rho);
        self.tmp.scaled_add(Complex64::new(h, 0.0), &self.k3);
        derivative_into(g, &self.tmp, &mut self.k4);
        let w1 = Complex64::new(h / 6.0, 0.0);
        let w2 = Complex64::new(h / 3.0, 0.0);
        rho.scaled_add(w1, &self.k1);
        rho.scaled_add(w2, &self.k2);
        rho.scaled_add(w2, &self.k3);
        rho.scaled_add(w1, &self.k4);
    }
}

/// Result of a finite-time evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveReport {
    pub rho: TruncatedDensityMatrix,
    /// Largest top-three-level population seen during the run.
    pub tail_population: f64,
    pub truncation_converged: bool,
}

const DEFAULT_TAIL_TOL: f64 = 1e-7;

/// Integrate `rho0` forward by `t_final`. The step must respect the
/// explicit-scheme stability budget `2 / rate_scale`; the tail population
/// is monitored along the way and compared against `tail_tol`.
pub fn evolve(
    params: &LaserParams,
    rho0: &TruncatedDensityMatrix,
    t_final: f64,
    step: f64,
    tail_tol: f64,
) -> Result<EvolveReport, ModelError> {
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(ModelError::InvalidParam {
            name: "t_final",
            reason: "must be a finite time >= 0",
            value: t_final,
        });
    }
    if !tail_tol.is_finite() || tail_tol <= 0.0 {
        return Err(ModelError::InvalidParam {
            name: "tail_tol",
            reason: "must be a finite tolerance > 0",
            value: tail_tol,
        });
    }
    let g = generator_coefficients(params)?;
    let dim = rho0.data.nrows();
    let limit = 2.0 / rate_scale(&g, dim);
    if !step.is_finite() || step <= 0.0 {
        return Err(ModelError::InvalidParam {
            name: "step",
            reason: "must be a finite time > 0",
            value: step,
        });
    }
    if step > limit {
        return Err(ModelError::StepSize { step, limit });
    }

    let n_steps = (t_final / step).ceil() as usize;
    let h = if n_steps == 0 {
        0.0
    } else {
        t_final / n_steps as f64
    };
    let mut rho = rho0.data.clone();
    let mut ws = Rk4Workspace::new(dim);
    let mut worst_tail = tail_of(&rho);
    for i in 1..=n_steps {
        ws.step(&g, &mut rho, h);
        if i % 32 == 0 || i == n_steps {
            worst_tail = worst_tail.max(tail_of(&rho));
        }
    }
    Ok(EvolveReport {
        rho: TruncatedDensityMatrix {
            data: rho,
            t: rho0.t + t_final,
        },
        tail_population: worst_tail,
        truncation_converged: worst_tail <= tail_tol,
    })
}

fn tail_of(rho: &Array2<Complex64>) -> f64 {
    let n = rho.nrows();
    (n.saturating_sub(3)..n).map(|i| rho[[i, i]].re).sum()
}

/// Converged long-time observables plus the diagnostics needed to decide
/// whether to believe them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub moments: QuadratureMoments,
    pub tail_population: f64,
    /// True when the truncation tail stayed within tolerance. Residual
    /// convergence in time is a hard error instead, not a flag.
    pub converged: bool,
    pub n_max: usize,
    pub t_reached: f64,
}

/// Steady state by long-time integration: advance in chunks until the
/// relative change of (n_bar, <a^2>) per unit time drops below `tol`.
///
/// At theta = 0 an above-threshold point is rejected immediately (the
/// master equation has no normalizable steady state there; the photon
/// number grows without bound at rate |lambda_minus|). For theta != 0 no
/// such analytic screen exists and a divergent run ends at the time
/// horizon with a convergence error.
pub fn steady_state(
    params: &LaserParams,
    n_max: usize,
    tol: f64,
) -> Result<OracleResult, ModelError> {
    steady_state_with_state(params, n_max, tol).map(|(result, _)| result)
}

/// [`steady_state`], also handing back the converged state itself so
/// callers can audit trace, Hermiticity and positivity directly.
pub fn steady_state_with_state(
    params: &LaserParams,
    n_max: usize,
    tol: f64,
) -> Result<(OracleResult, TruncatedDensityMatrix), ModelError> {
    if n_max < 3 {
        return Err(ModelError::InvalidParam {
            name: "n_max",
            reason: "need at least Fock levels 0..=3",
            value: n_max as f64,
        });
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(ModelError::InvalidParam {
            name: "tol",
            reason: "must be a finite tolerance > 0",
            value: tol,
        });
    }
    let g = generator_coefficients(params)?;

    let (chunk_t, horizon) = if params.theta == 0.0 {
        let k = compute_coefficients(params)?;
        if k.lambda_minus <= 0.0 {
            return Err(ModelError::AboveThreshold {
                rate_name: "lambda_minus",
                rate: k.lambda_minus,
                gain_a: params.gain_a,
            });
        }
        (5.0 / k.lambda_minus, 400.0 / k.lambda_minus)
    } else {
        (5.0 / params.kappa, 2000.0 / params.kappa)
    };

    let dim = n_max + 1;
    let step = 1.0 / rate_scale(&g, dim);
    let steps_per_chunk = (chunk_t / step).ceil() as usize;
    let h = chunk_t / steps_per_chunk as f64;

    let mut rho = TruncatedDensityMatrix::vacuum(n_max).data;
    let mut ws = Rk4Workspace::new(dim);
    let mut t = 0.0;
    let mut prev = observables_raw(&rho);
    let mut residual = f64::INFINITY;
    while t < horizon {
        for _ in 0..steps_per_chunk {
            ws.step(&g, &mut rho, h);
        }
        t += chunk_t;
        let cur = observables_raw(&rho);
        residual = chunk_residual(&prev, &cur) / chunk_t;
        prev = cur;
        if residual < tol {
            let state = TruncatedDensityMatrix { data: rho, t };
            let tail = state.tail_population();
            let result = OracleResult {
                moments: state.observables(),
                tail_population: tail,
                converged: tail <= DEFAULT_TAIL_TOL,
                n_max,
                t_reached: t,
            };
            return Ok((result, state));
        }
    }
    Err(ModelError::Unconverged {
        t_final: t,
        residual,
        tol,
    })
}

fn observables_raw(rho: &Array2<Complex64>) -> (f64, Complex64) {
    let n = rho.nrows();
    let nbar = (0..n).map(|i| i as f64 * rho[[i, i]].re).sum();
    let asq = (2..n)
        .map(|m| ((m * (m - 1)) as f64).sqrt() * rho[[m, m - 2]])
        .sum();
    (nbar, asq)
}

fn chunk_residual(prev: &(f64, Complex64), cur: &(f64, Complex64)) -> f64 {
    let dn = (cur.0 - prev.0).abs() / cur.0.abs().max(prev.0.abs()).max(1e-6);
    let dasq = (cur.1 - prev.1).norm() / cur.1.norm().max(prev.1.norm()).max(1e-6);
    dn.max(dasq)
}

/// [`steady_state`] with the truncation dimension chosen automatically:
/// start from the analytic photon-number estimate when one exists
/// (`ceil(10 + 8 n_bar)`, squeezed-thermal tails being wider than
/// Poissonian), else 40, then double until the tail tolerance passes.
pub fn steady_state_auto(params: &LaserParams, tol: f64) -> Result<OracleResult, ModelError> {
    let mut n_max = if params.theta == 0.0 {
        let m = crate::analytic::steady_moments(params)?;
        (10.0 + 8.0 * m.mean_photon).ceil() as usize
    } else {
        40
    };
    let mut last = steady_state(params, n_max, tol)?;
    for _ in 0..4 {
        if last.converged {
            return Ok(last);
        }
        n_max *= 2;
        last = steady_state(params, n_max, tol)?;
    }
    Ok(last)
}
