//! Uniform midpoint discretization of the half line and the weighted
//! function space living on it.
//!
//! A `Grid` samples `[0, X]` at the midpoints `x_j = (j + 1/2)·h`, `h = X/N`.
//! Midpoints keep shifts by integer multiples of `h` node-to-node exact and
//! avoid evaluating weights at the boundary `x = 0`. A `GridFunction` carries
//! complex samples together with its grid and weight; the inner product is
//! the midpoint rule for `∫ f·conj(g)·ω² dx`. `IsometricVector` is the
//! rescaling `u_j = f_j·ω(x_j)·√h` in which the weighted space becomes plain
//! `ℓ²` and shift operators become weighted shift matrices.

use crate::error::{Error, Result};
use crate::weights::Weight;
use crate::C64;

/// Relative slack when deciding whether a shift length is a node multiple.
const STEP_MATCH_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    extent: f64,
    count: usize,
}

impl Grid {
    pub fn new(extent: f64, count: usize) -> Result<Self> {
        if !extent.is_finite() || extent <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "grid extent must be positive, got {extent}"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 nodes, got {count}"
            )));
        }
        Ok(Grid { extent, count })
    }

    #[inline]
    pub fn extent(&self) -> f64 {
        self.extent
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.extent / self.count as f64
    }

    /// Midpoint node x_j = (j + 1/2)·h.
    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|j| self.node(j))
    }

    /// Number of grid steps in a shift length `t`, requiring `t = k·h`
    /// exactly (up to roundoff) with `k ≥ 1`.
    pub fn steps_for(&self, t: f64) -> Result<usize> {
        let h = self.spacing();
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::ShiftNotOnGrid { t, h });
        }
        let k = (t / h).round();
        if k < 1.0 || (t - k * h).abs() > STEP_MATCH_TOL * t.max(h) {
            return Err(Error::ShiftNotOnGrid { t, h });
        }
        Ok(k as usize)
    }
}

/// Complex samples on a grid, interpreted as an element of the ω-weighted
/// space over `[0, X]`.
#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Grid,
    weight: Weight,
    samples: Vec<C64>,
}

impl GridFunction {
    pub fn new(grid: Grid, weight: Weight, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.count() {
            return Err(Error::GridMismatch(format!(
                "{} samples on a grid of {} nodes",
                samples.len(),
                grid.count()
            )));
        }
        Ok(GridFunction {
            grid,
            weight,
            samples,
        })
    }

    pub fn from_fn(grid: Grid, weight: Weight, f: impl Fn(f64) -> C64) -> Self {
        let samples = grid.nodes().map(f).collect();
        GridFunction {
            grid,
            weight,
            samples,
        }
    }

    pub fn zeros(grid: Grid, weight: Weight) -> Self {
        let samples = vec![C64::new(0.0, 0.0); grid.count()];
        GridFunction {
            grid,
            weight,
            samples,
        }
    }

    /// Indicator of `[lo, hi]`, sampled at the nodes.
    pub fn indicator(grid: Grid, weight: Weight, lo: f64, hi: f64) -> Self {
        Self::from_fn(grid, weight, |x| {
            if x >= lo && x <= hi {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    #[inline]
    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    #[inline]
    pub fn samples_mut(&mut self) -> &mut [C64] {
        &mut self.samples
    }

    fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(
                "inner product of functions on different grids".into(),
            ));
        }
        if self.weight != other.weight {
            return Err(Error::GridMismatch(
                "inner product of functions under different weights".into(),
            ));
        }
        Ok(())
    }

    /// Midpoint rule for `∫ f·conj(g)·ω² dx`: `h·Σ f_j·conj(g_j)·ω(x_j)²`.
    pub fn weighted_inner(&self, other: &GridFunction) -> Result<C64> {
        self.check_compatible(other)?;
        let h = self.grid.spacing();
        let mut acc = C64::new(0.0, 0.0);
        for (j, (f, g)) in self.samples.iter().zip(&other.samples).enumerate() {
            let w = self.weight.evaluate(self.grid.node(j))?;
            acc += f * g.conj() * (w * w);
        }
        Ok(acc * h)
    }

    pub fn weighted_norm(&self) -> Result<f64> {
        Ok(self.weighted_inner(self)?.re.max(0.0).sqrt())
    }

    /// Plain (unweighted) squared L² mass `h·Σ|f_j|²`.
    pub fn unweighted_mass(&self) -> f64 {
        let h = self.grid.spacing();
        h * self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn to_isometric(&self) -> Result<IsometricVector> {
        let h = self.grid.spacing();
        let rh = h.sqrt();
        let mut values = Vec::with_capacity(self.samples.len());
        for (j, f) in self.samples.iter().enumerate() {
            let w = self.weight.evaluate(self.grid.node(j))?;
            values.push(f * (w * rh));
        }
        Ok(IsometricVector {
            grid: self.grid.clone(),
            weight: self.weight.clone(),
            values,
        })
    }

    /// Index of the last sample with a nonzero value, if any.
    pub fn support_end(&self) -> Option<usize> {
        self.samples
            .iter()
            .rposition(|v| v.re != 0.0 || v.im != 0.0)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_compatible(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridFunction {
            grid: self.grid.clone(),
            weight: self.weight.clone(),
            samples,
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_compatible(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Ok(GridFunction {
            grid: self.grid.clone(),
            weight: self.weight.clone(),
            samples,
        })
    }

    pub fn scaled(&self, c: C64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            weight: self.weight.clone(),
            samples: self.samples.iter().map(|v| v * c).collect(),
        }
    }
}

/// Samples in the coordinates `u_j = f_j·ω(x_j)·√h`, where the weighted norm
/// becomes the plain Euclidean one.
#[derive(Clone, Debug)]
pub struct IsometricVector {
    grid: Grid,
    weight: Weight,
    values: Vec<C64>,
}

impl IsometricVector {
    pub fn new(grid: Grid, weight: Weight, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::GridMismatch(format!(
                "{} values on a grid of {} nodes",
                values.len(),
                grid.count()
            )));
        }
        Ok(IsometricVector {
            grid,
            weight,
            values,
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_grid_function(&self) -> Result<GridFunction> {
        let h = self.grid.spacing();
        let rh = h.sqrt();
        let mut samples = Vec::with_capacity(self.values.len());
        for (j, u) in self.values.iter().enumerate() {
            let w = self.weight.evaluate(self.grid.node(j))?;
            samples.push(u / (w * rh));
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            weight: self.weight.clone(),
            samples,
        })
    }
}

/// Gaussian wave packet `g(x) = e^{-b²(x-t₀)²/2}·e^{i(x-t₀)η₀}`.
///
/// The packet must fit the window together with its cutoff: `t₀ > 1`,
/// `2t₀ < X`.
pub fn wave_packet(grid: &Grid, weight: &Weight, eta0: f64, b: f64, t0: f64) -> Result<GridFunction> {
    if !(b > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "packet bandwidth must be positive, got {b}"
        )));
    }
    if !(t0 > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "packet center must exceed 1, got {t0}"
        )));
    }
    if !(2.0 * t0 < grid.extent()) {
        return Err(Error::InvalidArgument(format!(
            "packet at t0={t0} escapes the window [0, {}]",
            grid.extent()
        )));
    }
    Ok(GridFunction::from_fn(grid.clone(), weight.clone(), |x| {
        let u = x - t0;
        let amp = (-b * b * u * u / 2.0).exp();
        C64::from_polar(amp, eta0 * u)
    }))
}

/// Quintic smoothstep: C² ramp from 0 at u=0 to 1 at u=1.
fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
}

/// C² cutoff window: identically 1 on `[1, 2t₀-1]`, identically 0 for
/// `t ≤ 1/2` and `t ≥ 2t₀-1/2`, with polynomial ramps of width 1/2.
pub fn cutoff_window(grid: &Grid, weight: &Weight, t0: f64) -> Result<GridFunction> {
    if !(t0 > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "cutoff center must exceed 1, got {t0}"
        )));
    }
    if !(2.0 * t0 - 0.5 < grid.extent()) {
        return Err(Error::InvalidArgument(format!(
            "cutoff support [0.5, {}] does not fit the window [0, {}]",
            2.0 * t0 - 0.5,
            grid.extent()
        )));
    }
    Ok(GridFunction::from_fn(grid.clone(), weight.clone(), |x| {
        let rise = smoothstep((x - 0.5) / 0.5);
        let fall = 1.0 - smoothstep((x - (2.0 * t0 - 1.0)) / 0.5);
        C64::new(rise * fall, 0.0)
    }))
}

/// Max absolute first and second divided differences of the samples,
/// used to report the realized smoothness constants of window functions.
pub fn divided_diff_bounds(f: &GridFunction) -> (f64, f64) {
    let h = f.grid().spacing();
    let s = f.samples();
    let mut d1_max: f64 = 0.0;
    let mut d2_max: f64 = 0.0;
    for j in 1..s.len() {
        d1_max = d1_max.max((s[j] - s[j - 1]).norm() / h);
    }
    for j in 1..s.len().saturating_sub(1) {
        d2_max = d2_max.max((s[j + 1] - s[j] * 2.0 + s[j - 1]).norm() / (h * h));
    }
    (d1_max, d2_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::Weight;
    use approx::assert_relative_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn builds_midpoint_grid() {
        let g = Grid::new(1.0, 2).unwrap();
        assert_eq!(g.spacing(), 0.5);
        let nodes: Vec<f64> = g.nodes().collect();
        assert_eq!(nodes, vec![0.25, 0.75]);

        let g = Grid::new(20.0, 400).unwrap();
        assert_eq!(g.spacing(), 0.05);
        assert_relative_eq!(g.node(0), 0.025);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid::new(0.0, 10).is_err());
        assert!(Grid::new(-1.0, 10).is_err());
        assert!(Grid::new(1.0, 1).is_err());
    }

    #[test]
    fn step_count_requires_node_multiples() {
        let g = Grid::new(20.0, 400).unwrap();
        assert_eq!(g.steps_for(1.0).unwrap(), 20);
        assert_eq!(g.steps_for(0.05).unwrap(), 1);
        assert!(g.steps_for(0.07).is_err());
        assert!(g.steps_for(0.0).is_err());
        assert!(g.steps_for(-1.0).is_err());
    }

    #[test]
    fn indicator_inner_product_is_exact_for_constant_weight() {
        let g = Grid::new(20.0, 400).unwrap();
        let f = GridFunction::indicator(g, Weight::Constant, 0.0, 1.0);
        let ip = f.weighted_inner(&f).unwrap();
        assert!((ip.re - 1.0).abs() <= 1e-12, "got {}", ip.re);
        assert_eq!(ip.im, 0.0);
    }

    #[test]
    fn indicator_inner_product_matches_exponential_closed_form() {
        // ∫₀¹ e^{2x} dx = (e²-1)/2, midpoint rule at h = 0.05
        let g = Grid::new(20.0, 400).unwrap();
        let w = Weight::Exponential { rate: 1.0 };
        let f = GridFunction::indicator(g, w, 0.0, 1.0);
        let ip = f.weighted_inner(&f).unwrap();
        let exact = (std::f64::consts::E.powi(2) - 1.0) / 2.0;
        // midpoint rule error (h²/24)·[f'(1)-f'(0)] ≈ 1.3e-3 at h = 0.05
        assert!((ip.re - exact).abs() <= 2e-3, "got {} want {}", ip.re, exact);
    }

    #[test]
    fn disjoint_supports_are_orthogonal() {
        let g = Grid::new(20.0, 400).unwrap();
        let f = GridFunction::indicator(g.clone(), Weight::Constant, 0.0, 1.0);
        let gfun = GridFunction::indicator(g, Weight::Constant, 2.0, 3.0);
        let ip = f.weighted_inner(&gfun).unwrap();
        assert_eq!(ip, C64::new(0.0, 0.0));
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let g = Grid::new(5.0, 50).unwrap();
        let w = Weight::Polynomial { exponent: 2.0 };
        let f = GridFunction::from_fn(g.clone(), w.clone(), |x| C64::new(x.sin(), x.cos()));
        let gg = GridFunction::from_fn(g, w, |x| C64::new(0.3 * x, -x * x));
        let a = f.weighted_inner(&gg).unwrap();
        let b = gg.weighted_inner(&f).unwrap();
        assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn mismatched_grids_rejected() {
        let f = GridFunction::indicator(Grid::new(20.0, 400).unwrap(), Weight::Constant, 0.0, 1.0);
        let g = GridFunction::indicator(Grid::new(20.0, 200).unwrap(), Weight::Constant, 0.0, 1.0);
        assert!(f.weighted_inner(&g).is_err());
    }

    #[test]
    fn midpoint_quadrature_is_second_order() {
        // smooth integrand: f = g = e^{-2x} under ω = e^x gives ∫ e^{-2x} dx
        let w = Weight::Exponential { rate: 1.0 };
        let exact = 0.5 * (1.0 - (-40.0f64).exp());
        let mut errs = Vec::new();
        for n in [400usize, 800] {
            let g = Grid::new(20.0, n).unwrap();
            let f = GridFunction::from_fn(g, w.clone(), |x| c((-2.0 * x).exp()));
            let ip = f.weighted_inner(&f).unwrap().re;
            errs.push((ip - exact).abs());
        }
        assert!(
            errs[0] / errs[1] >= 3.5,
            "halving h should cut the error ~4x, got {:?}",
            errs
        );
    }

    #[test]
    fn isometric_round_trip_and_norm() {
        let g = Grid::new(20.0, 400).unwrap();
        for w in [
            Weight::Constant,
            Weight::Exponential { rate: 1.0 },
            Weight::Exponential { rate: -1.0 },
            Weight::Polynomial { exponent: 2.0 },
            Weight::Oscillatory { gamma: 1.0 },
        ] {
            let f = GridFunction::from_fn(g.clone(), w, |x| C64::new((0.3 * x).sin(), (0.2 * x).cos()));
            let u = f.to_isometric().unwrap();
            assert_relative_eq!(
                u.euclidean_norm(),
                f.weighted_norm().unwrap(),
                max_relative = 1e-12
            );
            let back = u.to_grid_function().unwrap();
            let diff: f64 = f
                .samples()
                .iter()
                .zip(back.samples())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff <= 1e-14, "round trip drifted by {diff}");
        }
    }

    #[test]
    fn constant_weight_isometry_is_sqrt_h_scaling() {
        let g = Grid::new(1.0, 4).unwrap();
        let f = GridFunction::from_fn(g, Weight::Constant, |x| c(x));
        let u = f.to_isometric().unwrap();
        for (uj, fj) in u.values().iter().zip(f.samples()) {
            assert_relative_eq!(uj.re, fj.re * 0.5, max_relative = 1e-15);
        }
    }

    #[test]
    fn wave_packet_center_value_and_mass() {
        // t0 on a node so the peak sample is exactly 1
        let g = Grid::new(40.0, 800).unwrap();
        let t0 = g.node(320); // 16.025
        let b = 0.25;
        let p = wave_packet(&g, &Weight::Constant, 2.0, b, t0).unwrap();
        assert_eq!(p.samples()[320], C64::new(1.0, 0.0));
        // ∫ e^{-b²(x-t0)²} dx = √π / b
        let mass = p.unweighted_mass();
        let exact = std::f64::consts::PI.sqrt() / b;
        assert!(
            (mass - exact).abs() <= 1e-6,
            "mass {mass} vs {exact} ({:.2e})",
            (mass - exact).abs()
        );
    }

    #[test]
    fn wave_packet_is_real_for_zero_frequency() {
        let g = Grid::new(40.0, 800).unwrap();
        let p = wave_packet(&g, &Weight::Constant, 0.0, 0.25, 16.0).unwrap();
        assert!(p.samples().iter().all(|v| v.im == 0.0));
    }

    #[test]
    fn wave_packet_rejects_escaping_geometry() {
        let g = Grid::new(40.0, 800).unwrap();
        assert!(wave_packet(&g, &Weight::Constant, 0.0, 0.25, 20.0).is_err());
        assert!(wave_packet(&g, &Weight::Constant, 0.0, 0.25, 0.9).is_err());
        assert!(wave_packet(&g, &Weight::Constant, 0.0, -1.0, 10.0).is_err());
    }

    #[test]
    fn cutoff_window_plateau_and_supports() {
        let g = Grid::new(40.0, 800).unwrap();
        let t0 = 10.0;
        let phi = cutoff_window(&g, &Weight::Constant, t0).unwrap();
        let at = |x: f64| {
            let j = ((x / g.spacing()) - 0.5).round() as usize;
            phi.samples()[j].re
        };
        assert_eq!(at(10.025), 1.0);
        assert_eq!(at(1.525), 1.0); // inside [1, 2t0-1]
        assert_eq!(at(0.425), 0.0); // below 1/2
        assert_eq!(at(19.725), 0.0); // above 2t0 - 1/2
        assert!(phi
            .samples()
            .iter()
            .all(|v| v.im == 0.0 && v.re >= 0.0 && v.re <= 1.0));
    }

    #[test]
    fn cutoff_window_ramp_bounds() {
        // quintic ramp over width 1/2: |φ'| ≤ 3.75, |φ''| ≤ 23.1; the first
        // divided difference stays under 5, and both realized bounds are
        // reported rather than assumed.
        let g = Grid::new(40.0, 1600).unwrap();
        let phi = cutoff_window(&g, &Weight::Constant, 10.0).unwrap();
        let (d1, d2) = divided_diff_bounds(&phi);
        assert!(d1 <= 5.0, "first divided difference {d1}");
        assert!(d2 <= 24.0, "second divided difference {d2}");
        assert!(d1 >= 3.0 && d2 >= 15.0, "ramp should be genuinely steep: {d1} {d2}");
    }

    #[test]
    fn cutoff_window_rejects_bad_geometry() {
        let g = Grid::new(20.0, 400).unwrap();
        assert!(cutoff_window(&g, &Weight::Constant, 10.5).is_err());
        assert!(cutoff_window(&g, &Weight::Constant, 0.8).is_err());
    }
}
