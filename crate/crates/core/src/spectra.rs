//! Growth orders, spectral-radius estimates, pseudospectra, and the
//! disk-spectrum verification scans.
//!
//! The truncated shift matrices are nilpotent, so finite-section
//! eigenvalues say nothing; spectrum membership is witnessed through the
//! resolvent instead: σ_min(zI − M_N) collapsing to 0 as the window grows
//! marks z as spectral for the full operator, while the Neumann bound
//! σ_min ≥ |z| − ‖M‖ certifies resolvent points outside.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg;
use crate::operators::{assemble_matrix, MatrixOperator, OperatorSpec};
use crate::weights::Weight;
use crate::C64;

/// Norm values this small mean a truncated power vanished identically.
const VANISHED: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// the forward translation semigroup S_t
    Right,
    /// the truncated backward semigroup P⁺S₋t
    Left,
}

impl Side {
    pub fn shift_spec(&self, t: f64) -> OperatorSpec {
        match self {
            Side::Right => OperatorSpec::RightShift { t },
            Side::Left => OperatorSpec::LeftShift { t },
        }
    }
}

/// Exact norm of the discretized shift: the extreme translation ratio.
pub fn exact_shift_norm(side: Side, w: &Weight, grid: &Grid, t: f64) -> Result<f64> {
    let k = grid.steps_for(t)?;
    let mut best = 0.0f64;
    for j in k..grid.count() {
        let num = w.evaluate(grid.node(j))?;
        let den = w.evaluate(grid.node(j - k))?;
        let r = match side {
            Side::Right => num / den,
            Side::Left => den / num,
        };
        if !r.is_finite() {
            return Err(Error::WeightRange(format!(
                "translation ratio of {w} overflows at node {j}"
            )));
        }
        best = best.max(r);
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthEstimate {
    pub side: Side,
    pub weight: String,
    /// least-squares slope of ln‖shift(t)‖ against t
    pub alpha_hat: f64,
    pub intercept: f64,
    pub ts: Vec<f64>,
    pub log_norms: Vec<f64>,
    /// max absolute deviation of the fit
    pub residual: f64,
    pub method: String,
    /// ρ(shift(t₀))^{1/t₀} from matrix powers, when requested
    pub gelfand_cross: Option<f64>,
}

fn least_squares(ts: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, y) in ts.iter().zip(ys) {
        num += (t - tm) * (y - ym);
        den += (t - tm) * (t - tm);
    }
    let slope = num / den;
    let intercept = ym - slope * tm;
    let residual = ts
        .iter()
        .zip(ys)
        .map(|(t, y)| (y - (slope * t + intercept)).abs())
        .fold(0.0, f64::max);
    (slope, intercept, residual)
}

/// Request an additional spectral-radius cross-check inside `growth_order`.
#[derive(Clone, Copy, Debug)]
pub struct GelfandRequest {
    pub t0: f64,
    pub n_max: usize,
}

/// Exponential growth order of the chosen shift semigroup: the slope of
/// ln‖shift(t)‖ over the supplied t list, with norms taken from the exact
/// ratio formula (no matrices needed).
pub fn growth_order(
    side: Side,
    w: &Weight,
    grid: &Grid,
    ts: &[f64],
    gelfand: Option<GelfandRequest>,
) -> Result<GrowthEstimate> {
    if ts.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "growth estimation needs at least 3 shift lengths, got {}",
            ts.len()
        )));
    }
    for &t in ts {
        grid.steps_for(t)?;
        if t > grid.extent() / 2.0 {
            return Err(Error::InvalidArgument(format!(
                "shift length {t} exceeds half the window {}; the estimate \
                 would be dominated by truncation",
                grid.extent()
            )));
        }
    }
    let log_norms: Vec<f64> = ts
        .iter()
        .map(|&t| exact_shift_norm(side, w, grid, t).map(f64::ln))
        .collect::<Result<_>>()?;
    let (alpha_hat, intercept, residual) = least_squares(ts, &log_norms);
    let gelfand_cross = match gelfand {
        None => None,
        Some(req) => {
            let m = assemble_matrix(&side.shift_spec(req.t0), grid, w, false)?;
            let est = gelfand_radius(&m, req.n_max)?;
            est.extrapolated.map(|rho| rho.powf(1.0 / req.t0))
        }
    };
    Ok(GrowthEstimate {
        side,
        weight: w.to_string(),
        alpha_hat,
        intercept,
        ts: ts.to_vec(),
        log_norms,
        residual,
        method: "norm-slope".into(),
        gelfand_cross,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GelfandEstimate {
    /// ‖Mⁿ‖ for n = 1..=n_max (stops early if a power vanishes)
    pub norms: Vec<f64>,
    /// ‖Mⁿ‖^{1/n}
    pub roots: Vec<f64>,
    /// exp of the last-three-point slope of ln‖Mⁿ‖ vs n
    pub extrapolated: Option<f64>,
    /// a power vanished: the nilpotent truncation dominates and no radius
    /// can be extracted at this window size
    pub truncation_dominated: bool,
}

pub fn gelfand_radius(m: &MatrixOperator, n_max: usize) -> Result<GelfandEstimate> {
    if n_max < 3 {
        return Err(Error::InvalidArgument(
            "spectral-radius extrapolation needs n_max >= 3".into(),
        ));
    }
    let mut norms = Vec::with_capacity(n_max);
    let mut power = m.matrix().clone();
    let mut truncated = false;
    for _ in 1..=n_max {
        let norm = linalg::operator_norm(&power)?;
        if norm <= VANISHED {
            truncated = true;
            break;
        }
        norms.push(norm);
        power *= m.matrix();
    }
    let roots = norms
        .iter()
        .enumerate()
        .map(|(i, &v)| v.powf(1.0 / (i as f64 + 1.0)))
        .collect();
    let extrapolated = if truncated || norms.len() < 3 {
        None
    } else {
        let k = norms.len();
        let ns: Vec<f64> = (k - 2..=k).map(|n| n as f64).collect();
        let ys: Vec<f64> = norms[k - 3..].iter().map(|v| v.ln()).collect();
        let (slope, _, _) = least_squares(&ns, &ys);
        Some(slope.exp())
    };
    Ok(GelfandEstimate {
        norms,
        roots,
        extrapolated,
        truncation_dominated: truncated,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudospectrumGrid {
    pub nodes: Vec<(f64, f64)>,
    /// σ_min(zI − M) per node; NaN where the solver failed
    pub sigma_min: Vec<f64>,
    pub failures: Vec<(usize, String)>,
    pub operator: String,
    pub n: usize,
    pub weight: String,
}

/// σ_min(zI − M) over a set of complex nodes. Node-level failures are
/// recorded and never abort the sweep.
pub fn pseudospectrum(m: &MatrixOperator, nodes: &[C64]) -> PseudospectrumGrid {
    let mut sigma_min = Vec::with_capacity(nodes.len());
    let mut failures = Vec::new();
    for (idx, &z) in nodes.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            failures.push((idx, format!("non-finite node {z}")));
            sigma_min.push(f64::NAN);
            continue;
        }
        match linalg::smallest_singular(&m.shifted(z)) {
            Ok(s) => sigma_min.push(s),
            Err(e) => {
                failures.push((idx, e.to_string()));
                sigma_min.push(f64::NAN);
            }
        }
    }
    PseudospectrumGrid {
        nodes: nodes.iter().map(|z| (z.re, z.im)).collect(),
        sigma_min,
        failures,
        operator: m.description().to_string(),
        n: m.grid().count(),
        weight: m.weight().to_string(),
    }
}

/// Rectangular node grid [re_lo, re_hi] × [im_lo, im_hi], row-major.
pub fn rectangular_nodes(
    re_range: (f64, f64),
    im_range: (f64, f64),
    per_side: usize,
) -> Vec<C64> {
    let step = |lo: f64, hi: f64, i: usize| {
        if per_side == 1 {
            (lo + hi) / 2.0
        } else {
            lo + (hi - lo) * i as f64 / (per_side - 1) as f64
        }
    };
    let mut nodes = Vec::with_capacity(per_side * per_side);
    for iy in 0..per_side {
        for ix in 0..per_side {
            nodes.push(C64::new(
                step(re_range.0, re_range.1, ix),
                step(im_range.0, im_range.1, iy),
            ));
        }
    }
    nodes
}

pub struct ApproxEigenpair {
    pub z: C64,
    /// unit weighted norm
    pub vector: crate::grid::GridFunction,
    /// ‖(M − z)v‖, equal to σ_min(z) by construction
    pub residual: f64,
}

pub fn approximate_eigenvector(m: &MatrixOperator, z: C64) -> Result<ApproxEigenpair> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite point {z}")));
    }
    let a = m.shifted(z);
    let (_, v) = linalg::smallest_singular_pair(&a)?;
    let residual = (&a * &v).norm();
    let iso = crate::grid::IsometricVector::new(
        m.grid().clone(),
        m.weight().clone(),
        v.iter().copied().collect(),
    )?;
    Ok(ApproxEigenpair {
        z,
        vector: iso.to_grid_function()?,
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointClass {
    Inside,
    Outside,
    /// within the band around the predicted circle where finite sections
    /// legitimately blur the answer
    Boundary,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiskScanPoint {
    pub z: (f64, f64),
    pub radius_rel: f64,
    /// σ_min across the window schedule
    pub sigmas: Vec<f64>,
    pub class: PointClass,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiskScanReport {
    pub side: Side,
    pub weight: String,
    pub t: f64,
    pub spacing: f64,
    pub n_schedule: Vec<usize>,
    pub alpha_hat: f64,
    pub predicted_radius: f64,
    pub points: Vec<DiskScanPoint>,
    pub inside_tol: f64,
    pub outside_factor: f64,
    pub boundary_band: f64,
    pub all_consistent: bool,
}

#[derive(Clone, Debug)]
pub struct DiskScanConfig {
    /// grid spacing held fixed while the window X = N·h grows
    pub h: f64,
    pub n_schedule: Vec<usize>,
    /// sample radii as fractions of the predicted radius
    pub radii_rel: Vec<f64>,
    pub angles: Vec<f64>,
    /// shift lengths for the growth measurement (on the largest window)
    pub growth_ts: Vec<f64>,
    pub inside_tol: f64,
    pub outside_factor: f64,
    pub boundary_band: f64,
    pub noise_floor: f64,
}

impl DiskScanConfig {
    /// Schedule used by the verification pipelines: h = 0.25 with windows
    /// X ∈ {25, 50, 100}, wide enough for interior points to fill in.
    pub fn standard(t: f64) -> Self {
        DiskScanConfig {
            h: 0.25,
            n_schedule: vec![100, 200, 400],
            radii_rel: vec![0.6, 0.75, 0.9, 1.2, 1.5],
            angles: vec![0.0, 1.0, 2.5, 4.0, 5.5],
            growth_ts: (1..=8).map(|k| k as f64 * t).collect(),
            inside_tol: 1e-4,
            outside_factor: 0.3,
            boundary_band: 0.1,
            noise_floor: 1e-12,
        }
    }
}

/// σ falls (or sits at the numeric floor) along the whole schedule.
fn filling_in(sigmas: &[f64], floor: f64) -> bool {
    sigmas
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12) || w[1] <= floor)
}

/// Finite-section witness for the disk spectrum of a shift semigroup:
/// sample the plane at fractions of the predicted radius e^{α̂t} and watch
/// σ_min(zI − M_N) collapse inside and stay Neumann-bounded outside as the
/// window grows at fixed spacing.
pub fn disk_spectrum_scan(
    side: Side,
    w: &Weight,
    t: f64,
    cfg: &DiskScanConfig,
) -> Result<DiskScanReport> {
    if cfg.n_schedule.len() < 2 || cfg.n_schedule.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidArgument(
            "window schedule must be increasing with at least 2 sizes".into(),
        ));
    }
    let largest = *cfg.n_schedule.last().unwrap();
    let big_grid = Grid::new(cfg.h * largest as f64, largest)?;
    let growth = growth_order(side, w, &big_grid, &cfg.growth_ts, None)?;
    let predicted_radius = (growth.alpha_hat * t).exp();

    let mut points: Vec<DiskScanPoint> = Vec::new();
    for &rel in &cfg.radii_rel {
        for &theta in &cfg.angles {
            points.push(DiskScanPoint {
                z: {
                    let z = C64::from_polar(rel * predicted_radius, theta);
                    (z.re, z.im)
                },
                radius_rel: rel,
                sigmas: Vec::new(),
                class: PointClass::Boundary,
                consistent: true,
            });
        }
    }

    for &n in &cfg.n_schedule {
        let grid = Grid::new(cfg.h * n as f64, n)?;
        let m = assemble_matrix(&side.shift_spec(t), &grid, w, false)?;
        for p in points.iter_mut() {
            let z = C64::new(p.z.0, p.z.1);
            p.sigmas.push(linalg::smallest_singular(&m.shifted(z))?);
        }
    }

    for p in points.iter_mut() {
        let gap = p.radius_rel - 1.0;
        if gap.abs() <= cfg.boundary_band {
            p.class = PointClass::Boundary;
            p.consistent = true; // reported, not classified
        } else if gap < 0.0 {
            p.class = PointClass::Inside;
            let last = *p.sigmas.last().unwrap();
            p.consistent = last <= cfg.inside_tol && filling_in(&p.sigmas, cfg.noise_floor);
        } else {
            p.class = PointClass::Outside;
            let dist = (p.radius_rel - 1.0) * predicted_radius;
            p.consistent = p.sigmas.iter().all(|&s| s >= cfg.outside_factor * dist);
        }
    }

    let all_consistent = points.iter().all(|p| p.consistent);
    Ok(DiskScanReport {
        side,
        weight: w.to_string(),
        t,
        spacing: cfg.h,
        n_schedule: cfg.n_schedule.clone(),
        alpha_hat: growth.alpha_hat,
        predicted_radius,
        points,
        inside_tol: cfg.inside_tol,
        outside_factor: cfg.outside_factor,
        boundary_band: cfg.boundary_band,
        all_consistent,
    })
}
