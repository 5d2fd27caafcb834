//! Parameter sweeps and optimum location over the analytic steady state.
//!
//! Sweeps never fail on physics: a grid point above threshold becomes a
//! mask bit (and the literal `ABOVE_THRESHOLD` token in CSV), so figure
//! grids always come out whole. The optimizer is derivative-free: a coarse
//! grid pass followed by golden-section refinement, which is what resolves
//! features narrower than any sane grid (the headline optimum sits at
//! drive values of order 1e-2 over a range of order 1e1).

use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic::{steady_moments, steady_variance, Quadrature};
use crate::error::ModelError;
use crate::model::{compute_coefficients, LaserParams};

/// The swept or searched parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamAxis {
    GainA,
    Kappa,
    Omega,
    Eta,
}

impl ParamAxis {
    pub fn name(self) -> &'static str {
        match self {
            ParamAxis::GainA => "A",
            ParamAxis::Kappa => "kappa",
            ParamAxis::Omega => "omega",
            ParamAxis::Eta => "eta",
        }
    }

    fn apply(self, params: &mut LaserParams, value: f64) {
        match self {
            ParamAxis::GainA => params.gain_a = value,
            ParamAxis::Kappa => params.kappa = value,
            ParamAxis::Omega => params.omega = value,
            ParamAxis::Eta => params.eta = value,
        }
    }

    fn check_range(self, min: f64, max: f64) -> Result<(), ModelError> {
        let ok = match self {
            ParamAxis::GainA => min >= 0.0,
            ParamAxis::Kappa => min > 0.0,
            ParamAxis::Omega => min >= 0.0,
            ParamAxis::Eta => min >= -1.0 && max <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(ModelError::InvalidSpec(format!(
                "axis {} range [{min}, {max}] leaves the parameter domain",
                self.name()
            )))
        }
    }
}

impl FromStr for ParamAxis {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s {
            "A" => Ok(ParamAxis::GainA),
            "kappa" => Ok(ParamAxis::Kappa),
            "omega" => Ok(ParamAxis::Omega),
            "eta" => Ok(ParamAxis::Eta),
            other => Err(ModelError::InvalidSpec(format!(
                "unknown axis parameter {other:?} (expected A, kappa, omega or eta)"
            ))),
        }
    }
}

/// One linearly spaced sweep axis. A single-point axis (count = 1) is
/// allowed only in the degenerate form min = max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub axis: ParamAxis,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(ModelError::InvalidSpec(format!(
                "axis {}: need finite min <= max, got [{}, {}]",
                self.axis.name(),
                self.min,
                self.max
            )));
        }
        match self.count {
            0 => {
                return Err(ModelError::InvalidSpec(format!(
                    "axis {}: need at least one point",
                    self.axis.name()
                )))
            }
            1 if self.min != self.max => {
                return Err(ModelError::InvalidSpec(format!(
                    "axis {}: a single-point axis needs min = max",
                    self.axis.name()
                )))
            }
            _ => {}
        }
        self.axis.check_range(self.min, self.max)
    }

    pub fn grid_values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.min + span * (i as f64 / last))
            .collect()
    }
}

impl FromStr for AxisSpec {
    type Err = ModelError;

    /// `name:min:max:count`, e.g. `omega:0:3:201`.
    fn from_str(s: &str) -> Result<Self, ModelError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(ModelError::InvalidSpec(format!(
                "axis spec {s:?} is not of the form name:min:max:count"
            )));
        }
        let bad = |what: &str| ModelError::InvalidSpec(format!("axis spec {s:?}: bad {what}"));
        Ok(AxisSpec {
            axis: parts[0].parse()?,
            min: parts[1].parse().map_err(|_| bad("min"))?,
            max: parts[2].parse().map_err(|_| bad("max"))?,
            count: parts[3].parse().map_err(|_| bad("count"))?,
        })
    }
}

/// What gets evaluated at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    VarMinus,
    VarPlus,
    MeanPhoton,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::VarMinus => "var_minus",
            Observable::VarPlus => "var_plus",
            Observable::MeanPhoton => "mean_photon",
        }
    }
}

impl FromStr for Observable {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s {
            "var_minus" => Ok(Observable::VarMinus),
            "var_plus" => Ok(Observable::VarPlus),
            "mean_photon" => Ok(Observable::MeanPhoton),
            other => Err(ModelError::InvalidSpec(format!(
                "unknown observable {other:?} (expected var_minus, var_plus or mean_photon)"
            ))),
        }
    }
}

/// A sweep request: base parameters, one or two axes, the observable.
/// `output` is carried for front ends that write files; the sweep itself
/// never touches the filesystem.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: LaserParams,
    pub axes: Vec<AxisSpec>,
    pub observable: Observable,
    pub output: Option<String>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.base.validate()?;
        if self.base.theta != 0.0 {
            return Err(ModelError::InvalidSpec(
                "sweeps evaluate closed forms, which require theta = 0".into(),
            ));
        }
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(ModelError::InvalidSpec(format!(
                "need one or two axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].axis == self.axes[1].axis {
            return Err(ModelError::InvalidSpec(format!(
                "both axes sweep {}",
                self.axes[0].axis.name()
            )));
        }
        for axis in &self.axes {
            axis.validate()?;
        }
        Ok(())
    }
}

/// Sweep output: one grid per axis and a row-major value table (first axis
/// outermost). `None` marks an above-threshold point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub base: LaserParams,
    pub axes: Vec<AxisSpec>,
    pub observable: Observable,
    pub grids: Vec<Vec<f64>>,
    pub values: Vec<Option<f64>>,
}

/// Lowercase scientific notation with 12 significant digits: below every
/// test tolerance in the crate and stable across platforms.
pub fn format_sig(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

impl SweepResult {
    /// Provenance lines, `key = value`. Fed back as a config file they
    /// reproduce this run exactly, which is the round-trip contract.
    pub fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("observable = {}", self.observable.name())];
        let on_axis = |axis: ParamAxis| self.axes.iter().any(|a| a.axis == axis);
        lines.push(format!("A = {}", format_sig(self.base.gain_a)));
        lines.push(format!("kappa = {}", format_sig(self.base.kappa)));
        if !on_axis(ParamAxis::Omega) {
            lines.push(format!("omega = {}", format_sig(self.base.omega)));
        }
        if !on_axis(ParamAxis::Eta) {
            lines.push(format!("eta = {}", format_sig(self.base.eta)));
        }
        for (i, axis) in self.axes.iter().enumerate() {
            lines.push(format!(
                "axis{} = {}:{}:{}:{}",
                i + 1,
                axis.axis.name(),
                format_sig(axis.min),
                format_sig(axis.max),
                axis.count
            ));
        }
        lines
    }

    pub fn column_names(&self) -> Vec<&'static str> {
        let mut cols: Vec<&'static str> = self.axes.iter().map(|a| a.axis.name()).collect();
        cols.push(self.observable.name());
        cols
    }
}

/// Evaluate the observable over the grid. Points with `lambda_minus <= 0`
/// are masked rather than reported as errors: the sweep's job is the map,
/// including the hole in it.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, ModelError> {
    spec.validate()?;
    let grids: Vec<Vec<f64>> = spec.axes.iter().map(AxisSpec::grid_values).collect();
    let inner = if grids.len() == 2 { grids[1].len() } else { 1 };
    let total = grids[0].len() * inner;

    let values: Vec<Option<f64>> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut p = spec.base;
            spec.axes[0].axis.apply(&mut p, grids[0][idx / inner]);
            if grids.len() == 2 {
                spec.axes[1].axis.apply(&mut p, grids[1][idx % inner]);
            }
            let k = compute_coefficients(&p).expect("validated domain");
            if k.lambda_minus <= 0.0 {
                return None;
            }
            let m = steady_moments(&p).expect("below threshold");
            Some(match spec.observable {
                Observable::VarMinus => m.var_minus,
                Observable::VarPlus => m.var_plus,
                Observable::MeanPhoton => m.mean_photon,
            })
        })
        .collect();

    Ok(SweepResult {
        base: spec.base,
        axes: spec.axes.clone(),
        observable: spec.observable,
        grids,
        values,
    })
}

/// Token emitted for masked grid points.
pub const MASK_TOKEN: &str = "ABOVE_THRESHOLD";

/// CSV rendering: `#`-prefixed provenance, a named column row, one data
/// row per grid point, masked points carrying [`MASK_TOKEN`].
pub fn write_csv<W: Write>(result: &SweepResult, out: &mut W) -> io::Result<()> {
    for line in result.header_lines() {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "{}", result.column_names().join(","))?;
    let inner = if result.grids.len() == 2 {
        result.grids[1].len()
    } else {
        1
    };
    for (idx, value) in result.values.iter().enumerate() {
        let mut fields = vec![format_sig(result.grids[0][idx / inner])];
        if result.grids.len() == 2 {
            fields.push(format_sig(result.grids[1][idx % inner]));
        }
        fields.push(match value {
            Some(v) => format_sig(*v),
            None => MASK_TOKEN.to_string(),
        });
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Optimization target. Minimizing `var_minus` needs only the minus
/// quadrature to settle (`lambda_plus > 0`); maximizing the photon number
/// needs the full joint steady state (`lambda_minus > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MinimizeVarMinus,
    MaximizeMeanPhoton,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::MinimizeVarMinus => "minimize_var_minus",
            Objective::MaximizeMeanPhoton => "maximize_mean_photon",
        }
    }

    // Cost to minimize; None where the objective is undefined.
    fn cost(self, params: &LaserParams) -> Option<f64> {
        match self {
            Objective::MinimizeVarMinus => steady_variance(params, Quadrature::Minus).ok(),
            Objective::MaximizeMeanPhoton => steady_moments(params).ok().map(|m| -m.mean_photon),
        }
    }

    fn value_from_cost(self, cost: f64) -> f64 {
        match self {
            Objective::MinimizeVarMinus => cost,
            Objective::MaximizeMeanPhoton => -cost,
        }
    }
}

impl FromStr for Objective {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s {
            "minimize_var_minus" => Ok(Objective::MinimizeVarMinus),
            "maximize_mean_photon" => Ok(Objective::MaximizeMeanPhoton),
            other => Err(ModelError::InvalidSpec(format!(
                "unknown objective {other:?} (expected minimize_var_minus or maximize_mean_photon)"
            ))),
        }
    }
}

/// A search interval for one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchAxis {
    pub axis: ParamAxis,
    pub min: f64,
    pub max: f64,
}

impl FromStr for SearchAxis {
    type Err = ModelError;

    /// `name:min:max`, e.g. `omega:3.6:20`.
    fn from_str(s: &str) -> Result<Self, ModelError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(ModelError::InvalidSpec(format!(
                "search axis {s:?} is not of the form name:min:max"
            )));
        }
        let bad = |what: &str| ModelError::InvalidSpec(format!("search axis {s:?}: bad {what}"));
        Ok(SearchAxis {
            axis: parts[0].parse()?,
            min: parts[1].parse().map_err(|_| bad("min"))?,
            max: parts[2].parse().map_err(|_| bad("max"))?,
        })
    }
}

/// Located optimum; `value` is recomputed from `params`, so it is exactly
/// reproducible by evaluating the objective there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub params: LaserParams,
    pub value: f64,
}

const COARSE_POINTS: usize = 201;
const REFINE_TOL: f64 = 1e-4;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > REFINE_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Coarse 201-point grid per axis, then golden-section refinement around
/// the best cell (coordinate descent when two axes are searched). Masked
/// regions carry infinite cost; if the whole grid is masked the feasible
/// region is declared empty.
pub fn find_optimum(
    objective: Objective,
    base: &LaserParams,
    axes: &[SearchAxis],
) -> Result<Optimum, ModelError> {
    base.validate()?;
    if base.theta != 0.0 {
        return Err(ModelError::InvalidSpec(
            "optimization evaluates closed forms, which require theta = 0".into(),
        ));
    }
    if axes.is_empty() || axes.len() > 2 {
        return Err(ModelError::InvalidSpec(format!(
            "need one or two search axes, got {}",
            axes.len()
        )));
    }
    if axes.len() == 2 && axes[0].axis == axes[1].axis {
        return Err(ModelError::InvalidSpec(format!(
            "both search axes vary {}",
            axes[0].axis.name()
        )));
    }
    for a in axes {
        AxisSpec {
            axis: a.axis,
            min: a.min,
            max: a.max,
            count: COARSE_POINTS,
        }
        .validate()?;
    }

    let eval = |coords: &[f64]| -> f64 {
        let mut p = *base;
        for (a, &x) in axes.iter().zip(coords) {
            a.axis.apply(&mut p, x);
        }
        objective.cost(&p).unwrap_or(f64::INFINITY)
    };

    let grids: Vec<Vec<f64>> = axes
        .iter()
        .map(|a| {
            AxisSpec {
                axis: a.axis,
                min: a.min,
                max: a.max,
                count: COARSE_POINTS,
            }
            .grid_values()
        })
        .collect();

    let inner = if grids.len() == 2 { grids[1].len() } else { 1 };
    let total = grids[0].len() * inner;
    let costs: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut coords = vec![grids[0][idx / inner]];
            if grids.len() == 2 {
                coords.push(grids[1][idx % inner]);
            }
            eval(&coords)
        })
        .collect();

    let (best_idx, &best_cost) = costs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid nonempty");
    if best_cost.is_infinite() {
        return Err(ModelError::EmptyFeasibleRegion {
            objective: objective.name(),
        });
    }

    let mut best_coords = vec![grids[0][best_idx / inner]];
    if grids.len() == 2 {
        best_coords.push(grids[1][best_idx % inner]);
    }
    let mut best = best_cost;

    let rounds = if axes.len() == 1 { 1 } else { 6 };
    for _ in 0..rounds {
        for ai in 0..axes.len() {
            let spacing = (axes[ai].max - axes[ai].min) / (COARSE_POINTS - 1) as f64;
            let lo = (best_coords[ai] - spacing).max(axes[ai].min);
            let hi = (best_coords[ai] + spacing).min(axes[ai].max);
            if hi <= lo {
                continue;
            }
            let mut trial = best_coords.clone();
            let (x, cost) = golden_min(
                |x| {
                    trial[ai] = x;
                    eval(&trial)
                },
                lo,
                hi,
            );
            if cost < best {
                best = cost;
                best_coords[ai] = x;
            }
        }
    }

    let mut params = *base;
    for (a, &x) in axes.iter().zip(&best_coords) {
        a.axis.apply(&mut params, x);
    }
    // Re-evaluate at the final coordinates so the reported value is the
    // one any caller recomputes from the returned params.
    let final_cost = eval(&best_coords);
    debug_assert!(final_cost <= best_cost);
    Ok(Optimum {
        params,
        value: objective.value_from_cost(final_cost),
    })
}
