//! Weight functions on the half line and empirical admissibility checks.
//!
//! A weight `ω > 0` defines the space through `‖f‖² = ∫|f|²ω²dx`. The
//! operators studied here stay bounded exactly when the translation ratios
//! `ω(x+t)/ω(x)` are bounded above and away from zero for each `t`; the
//! `ratio_bounds` scan measures those bounds on a grid and
//! `admissibility_check` watches them stabilize as the window grows.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Windows checked by `admissibility_check`, as multiples of the base extent.
const WINDOW_MULTIPLES: [usize; 3] = [1, 2, 4];
/// Relative stabilization tolerance across the two largest windows.
pub const STABILIZATION_TOL: f64 = 0.05;

#[derive(Clone)]
pub enum Weight {
    /// ω ≡ 1: the unweighted space.
    Constant,
    /// ω(x) = e^{a·x}.
    Exponential { rate: f64 },
    /// ω(x) = (1+x)^k.
    Polynomial { exponent: f64 },
    /// ω(x) = exp(γ·x·sin(ln(1+x)) / (1+ln(1+x))): bounded translation
    /// ratios but genuinely different growth orders on the two sides.
    Oscillatory { gamma: f64 },
    /// user-supplied positive weight; admissibility is checked, not assumed
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl Weight {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Weight::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// ω(x) for x ≥ 0. Negative arguments are rejected; non-finite or
    /// non-positive values surface as a range error so overflow in fast
    /// growing weights is reported instead of propagating NaNs.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "weight evaluated off the half line at x={x}"
            )));
        }
        let v = match self {
            Weight::Constant => 1.0,
            Weight::Exponential { rate } => (rate * x).exp(),
            Weight::Polynomial { exponent } => (1.0 + x).powf(*exponent),
            Weight::Oscillatory { gamma } => {
                let l = (1.0 + x).ln();
                (gamma * x * l.sin() / (1.0 + l)).exp()
            }
            Weight::Custom { f, .. } => f(x),
        };
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::WeightRange(format!(
                "{self} takes the non-admissible value {v} at x={x}"
            )));
        }
        Ok(v)
    }

    /// The reciprocal weight 1/ω; translation ratio bounds of the two are
    /// reciprocals of each other with sup and inf exchanged.
    pub fn inverted(&self) -> Weight {
        match self {
            Weight::Constant => Weight::Constant,
            Weight::Exponential { rate } => Weight::Exponential { rate: -rate },
            Weight::Polynomial { exponent } => Weight::Polynomial {
                exponent: -exponent,
            },
            Weight::Oscillatory { gamma } => Weight::Oscillatory { gamma: -gamma },
            Weight::Custom { name, f } => {
                let f = f.clone();
                Weight::Custom {
                    name: format!("inverse-{name}"),
                    f: Arc::new(move |x| 1.0 / f(x)),
                }
            }
        }
    }

    /// Exact exponential growth orders (right, left) where they are known in
    /// closed form; `None` for weights whose orders are only measurable.
    pub fn nominal_orders(&self) -> Option<(f64, f64)> {
        match self {
            Weight::Constant => Some((0.0, 0.0)),
            Weight::Exponential { rate } => Some((*rate, -rate)),
            Weight::Polynomial { .. } => Some((0.0, 0.0)),
            Weight::Oscillatory { .. } | Weight::Custom { .. } => None,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Constant => write!(f, "constant"),
            Weight::Exponential { rate } => write!(f, "exponential(rate={rate})"),
            Weight::Polynomial { exponent } => write!(f, "polynomial(exponent={exponent})"),
            Weight::Oscillatory { gamma } => write!(f, "oscillatory(gamma={gamma})"),
            Weight::Custom { name, .. } => write!(f, "custom({name})"),
        }
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Weight::Constant, Weight::Constant) => true,
            (Weight::Exponential { rate: a }, Weight::Exponential { rate: b }) => a == b,
            (Weight::Polynomial { exponent: a }, Weight::Polynomial { exponent: b }) => a == b,
            (Weight::Oscillatory { gamma: a }, Weight::Oscillatory { gamma: b }) => a == b,
            (Weight::Custom { name: a, .. }, Weight::Custom { name: b, .. }) => a == b,
            _ => false,
        }
    }
}

/// Extremes of the translation ratio ω(x+t)/ω(x) over grid nodes with
/// x + t ≤ X, together with the nodes attaining them.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RatioBounds {
    pub sup: f64,
    pub inf: f64,
    pub arg_sup: f64,
    pub arg_inf: f64,
}

pub fn ratio_bounds(w: &Weight, t: f64, grid: &Grid) -> Result<RatioBounds> {
    if !t.is_finite() || t <= 0.0 || t >= grid.extent() {
        return Err(Error::InvalidArgument(format!(
            "translation length {t} outside (0, {})",
            grid.extent()
        )));
    }
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    let mut arg_sup = f64::NAN;
    let mut arg_inf = f64::NAN;
    let mut seen = false;
    for x in grid.nodes() {
        if x + t > grid.extent() {
            break;
        }
        let r = w.evaluate(x + t)? / w.evaluate(x)?;
        if !r.is_finite() {
            return Err(Error::WeightRange(format!(
                "translation ratio of {w} over/underflows at x={x}, t={t}"
            )));
        }
        if r > sup {
            sup = r;
            arg_sup = x;
        }
        if r < inf {
            inf = r;
            arg_inf = x;
        }
        seen = true;
    }
    if !seen {
        return Err(Error::InvalidArgument(format!(
            "no grid node x satisfies x + {t} <= {}",
            grid.extent()
        )));
    }
    Ok(RatioBounds {
        sup,
        inf,
        arg_sup,
        arg_inf,
    })
}

/// Ratio extremes for one probe length on the three nested windows; `None`
/// marks a window where the weight or the ratio left the representable range.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeRecord {
    pub t: f64,
    pub sup: Vec<Option<f64>>,
    pub inf: Vec<Option<f64>>,
    /// relative change of sup/inf across the two largest windows
    pub sup_rel_change: Option<f64>,
    pub inf_rel_change: Option<f64>,
    pub overflow: bool,
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub weight: String,
    /// window extents, same spacing as the base grid
    pub windows: Vec<f64>,
    pub stabilization_tol: f64,
    pub probes: Vec<ProbeRecord>,
    pub admissible: bool,
    /// set when the ratio bounds keep growing with the window or overflow:
    /// the verdict is then a growth diagnosis, not a sampling artifact
    pub growth_flag: bool,
}

/// Empirical admissibility: scan ratio extremes for each probe length on the
/// windows (X, 2X, 4X) at fixed spacing and require the bounds to stabilize
/// within [`STABILIZATION_TOL`] across the two largest windows.
pub fn admissibility_check(w: &Weight, probes: &[f64], base: &Grid) -> Result<AdmissibilityReport> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("no probe lengths supplied".into()));
    }
    for &t in probes {
        if !t.is_finite() || t <= 0.0 || t >= base.extent() {
            return Err(Error::InvalidArgument(format!(
                "probe length {t} outside (0, {})",
                base.extent()
            )));
        }
    }
    let windows: Vec<Grid> = WINDOW_MULTIPLES
        .iter()
        .map(|&m| Grid::new(base.extent() * m as f64, base.count() * m))
        .collect::<Result<_>>()?;

    let rel = |a: f64, b: f64| (b - a).abs() / a.abs().max(f64::MIN_POSITIVE);
    let mut records = Vec::with_capacity(probes.len());
    let mut admissible = true;
    let mut growth_flag = false;

    for &t in probes {
        let mut sup = Vec::with_capacity(windows.len());
        let mut inf = Vec::with_capacity(windows.len());
        let mut overflow = false;
        for g in &windows {
            match ratio_bounds(w, t, g) {
                Ok(b) => {
                    sup.push(Some(b.sup));
                    inf.push(Some(b.inf));
                }
                Err(Error::WeightRange(_)) => {
                    sup.push(None);
                    inf.push(None);
                    overflow = true;
                }
                Err(e) => return Err(e),
            }
        }
        let sup_rel_change = match (sup[1], sup[2]) {
            (Some(a), Some(b)) => Some(rel(a, b)),
            _ => None,
        };
        let inf_rel_change = match (inf[1], inf[2]) {
            (Some(a), Some(b)) => Some(rel(a, b)),
            _ => None,
        };
        let stable = !overflow
            && sup_rel_change.is_some_and(|r| r <= STABILIZATION_TOL)
            && inf_rel_change.is_some_and(|r| r <= STABILIZATION_TOL);
        if !stable {
            admissible = false;
        }
        let growing = matches!(
            (sup[0], sup[1], sup[2]),
            (Some(a), Some(b), Some(c))
                if b > a * (1.0 + STABILIZATION_TOL) && c > b * (1.0 + STABILIZATION_TOL)
        );
        if overflow || growing {
            growth_flag = true;
        }
        records.push(ProbeRecord {
            t,
            sup,
            inf,
            sup_rel_change,
            inf_rel_change,
            overflow,
            stable,
        });
    }

    Ok(AdmissibilityReport {
        weight: w.to_string(),
        windows: windows.iter().map(Grid::extent).collect(),
        stabilization_tol: STABILIZATION_TOL,
        probes: records,
        admissible,
        growth_flag,
    })
}
