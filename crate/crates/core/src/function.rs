//! Metrics on bounded integrable functions, realized on piecewise-constant
//! representatives.
//!
//! `D(f, g)` combines `∫(f-g)⁺` and `∫(f-g)⁻` with a p-norm and `D_N`
//! divides by `∫max(|f|, |g|, |f-g|)`. On step functions every integral is a
//! finite sum over breakpoint intervals, so no quadrature error enters.
//! At `p = 1` the normalized form is the Marczewski-Steinhaus distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::param::PParam;

/// Piecewise-constant function: `values[i]` on `[breakpoints[i], breakpoints[i+1])`,
/// zero outside `[breakpoints[0], breakpoints[n])`.
///
/// Serializes as `[[breakpoints...], [values...]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(Vec<f64>, Vec<f64>)", into = "(Vec<f64>, Vec<f64>)")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() && values.is_empty() {
            return Ok(Self::zero());
        }
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(Error::Domain(format!(
                "need n+1 breakpoints for n >= 1 values, got {} and {}",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::Domain("breakpoints and values must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("breakpoints must be strictly increasing".into()));
        }
        Ok(StepFunction { breakpoints, values })
    }

    pub fn zero() -> Self {
        StepFunction {
            breakpoints: Vec::new(),
            values: Vec::new(),
        }
    }

    /// `c` on `[a, b)`.
    pub fn constant_on(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![c])
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::constant_on(a, b, 1.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero_representation(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        // index of the first breakpoint strictly greater than x
        let k = self.breakpoints.partition_point(|&b| b <= x);
        if k == 0 || k == self.breakpoints.len() {
            0.0
        } else {
            self.values[k - 1]
        }
    }

    /// Same function on a finer grid; `extra` points outside the support
    /// extend it with zeros.
    pub fn refine(&self, extra: &[f64]) -> Result<Self> {
        let grid = merged_grid(&self.breakpoints, extra);
        if grid.len() < 2 {
            return Ok(self.clone());
        }
        let values = grid.windows(2).map(|w| self.eval(w[0])).collect();
        Self::new(grid, values)
    }

    /// Equality almost everywhere: equal aligned values on every interval.
    pub fn ae_eq(&self, other: &StepFunction) -> bool {
        let (f, g) = align(self, other);
        f.values == g.values
    }

    pub fn integral_abs(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (w[1] - w[0]) * v.abs())
            .sum()
    }
}

impl TryFrom<(Vec<f64>, Vec<f64>)> for StepFunction {
    type Error = Error;

    fn try_from((b, v): (Vec<f64>, Vec<f64>)) -> Result<Self> {
        StepFunction::new(b, v)
    }
}

impl From<StepFunction> for (Vec<f64>, Vec<f64>) {
    fn from(f: StepFunction) -> Self {
        (f.breakpoints, f.values)
    }
}

fn merged_grid(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = a.iter().chain(b).copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Re-expresses both functions on the sorted union of their breakpoints.
pub fn align(f: &StepFunction, g: &StepFunction) -> (StepFunction, StepFunction) {
    let grid = merged_grid(&f.breakpoints, &g.breakpoints);
    if grid.len() < 2 {
        return (StepFunction::zero(), StepFunction::zero());
    }
    let on_grid = |h: &StepFunction| StepFunction {
        values: grid.windows(2).map(|w| h.eval(w[0])).collect(),
        breakpoints: grid.clone(),
    };
    (on_grid(f), on_grid(g))
}

/// `∫(f-g)⁺`, `∫(f-g)⁻` and `∫max(|f|, |g|, |f-g|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrals {
    pub positive: f64,
    pub negative: f64,
    pub envelope: f64,
}

pub fn integrals(f: &StepFunction, g: &StepFunction) -> Integrals {
    let (fa, ga) = align(f, g);
    let mut out = Integrals {
        positive: 0.0,
        negative: 0.0,
        envelope: 0.0,
    };
    for ((w, &u), &v) in fa.breakpoints.windows(2).zip(&fa.values).zip(&ga.values) {
        let width = w[1] - w[0];
        let d = u - v;
        out.positive += d.max(0.0) * width;
        out.negative += (-d).max(0.0) * width;
        out.envelope += u.abs().max(v.abs()).max(d.abs()) * width;
    }
    out
}

pub fn function_distance(f: &StepFunction, g: &StepFunction, p: PParam) -> Result<f64> {
    let p = p.validate()?;
    let i = integrals(f, g);
    Ok(p.combine(i.positive, i.negative))
}

/// Normalized function distance in `[0, 1]`; zero when the envelope integral is zero.
pub fn function_distance_normalized(f: &StepFunction, g: &StepFunction, p: PParam) -> Result<f64> {
    let p = p.validate()?;
    let i = integrals(f, g);
    if i.envelope == 0.0 {
        return Ok(0.0);
    }
    Ok(p.combine(i.positive, i.negative) / i.envelope)
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

fn tolerance(xs: &[f64]) -> f64 {
    16.0 * f64::EPSILON * (1.0 + xs.iter().map(|x| x.abs()).sum::<f64>())
}

/// `f⁺ + g⁺ = min(|f|, |g|)·1{fg < 0} + (f + g)⁺`.
pub fn positive_part_split_holds(f: f64, g: f64) -> bool {
    let lhs = pos(f) + pos(g);
    let opposite = if f * g < 0.0 { f.abs().min(g.abs()) } else { 0.0 };
    (lhs - (opposite + pos(f + g))).abs() <= tolerance(&[f, g])
}

/// `(f-g)⁺ + (g-h)⁺ - {max(|g|, |f-g|, |g-h|) - max(|f|, |h|, |f-h|)}⁺ ≥ (f-h)⁺`.
pub fn envelope_gap_holds(f: f64, g: f64, h: f64) -> bool {
    let inner = g.abs().max((f - g).abs()).max((g - h).abs());
    let outer = f.abs().max(h.abs()).max((f - h).abs());
    let lhs = pos(f - g) + pos(g - h) - pos(inner - outer);
    lhs >= pos(f - h) - tolerance(&[f, g, h])
}

/// `max(f, g) = f + (g - f)⁺`.
pub fn max_identity_holds(f: f64, g: f64) -> bool {
    (f.max(g) - (f + pos(g - f))).abs() <= tolerance(&[f, g])
}

/// All three pointwise identities at `(f, g, h)`, up to a few ulps of rounding.
pub fn lemma_pointwise_checks(f: f64, g: f64, h: f64) -> Result<bool> {
    if !(f.is_finite() && g.is_finite() && h.is_finite()) {
        return Err(Error::Domain("lemma checks need finite inputs".into()));
    }
    Ok(positive_part_split_holds(f, g) && envelope_gap_holds(f, g, h) && max_identity_holds(f, g))
}
