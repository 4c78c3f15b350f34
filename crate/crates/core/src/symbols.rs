//! Symbols of shift and convolution operators on strips, the sup-norm
//! bound check against the operator norm, the wave-packet quasimode
//! witness, and the symbol-range inclusion scan.
//!
//! Transform convention, fixed once: transform(f)(ξ) = ∫ f(t)e^{−iξt} dt,
//! inverse carries 1/(2π). A tilt by a means f ↦ f·e^{at}, so the tilted
//! transform is evaluation at the complex point ξ + ia: the right shift by
//! t gets the symbol e^{−itz} and the truncated left shift gets e^{itz}.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{cutoff_window, divided_diff_bounds, wave_packet};
use crate::linalg;
use crate::operators::{assemble_matrix, operator_norm, Kernel, MatrixOperator, OperatorSpec};
use crate::spectra::Side;
use crate::weights::Weight;
use crate::C64;

/// Tilted kernel samples must have decayed to this fraction of their peak
/// at the support edges, or the truncated transform is untrustworthy.
const EDGE_DECAY_TOL: f64 = 1e-14;
/// Tolerance ring around a measured strip within which tilts are accepted.
const STRIP_MARGIN: f64 = 0.1;
/// Relative stabilization target for the adaptive ξ sweep.
const XI_STABLE_TOL: f64 = 0.01;
const XI_MAX_ROUNDS: usize = 6;
/// Multiplicative slack absorbing discretization in the sup-norm bound.
const BOUND_SLACK: f64 = 0.05;
/// Finite-difference step for the Cauchy–Riemann probe.
const CR_STEP: f64 = 1e-3;
const CR_TOL: f64 = 1e-4;
/// Half-width and resolution of the packet-transform ξ grid.
const XI_HALF_RANGE: f64 = 40.0;
/// Band half-widths tried by the adaptive quasimode bandwidth selection.
const DELTA_LADDER: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
const BAND_SAMPLES: usize = 401;

#[derive(Clone, Debug)]
pub enum SymbolFunction {
    /// e^{−itz} for the right shift, e^{itz} for the truncated left shift
    AnalyticShift { t: f64, side: Side },
    /// truncated transform of a sampled kernel
    KernelTransform { kernel: Kernel },
}

/// Kernel samples multiplied by e^{a·t}, with the edge-decay guard: the
/// tilt must not leave visible mass at the ends of the stored support.
fn tilted_samples(kernel: &Kernel, a: f64) -> Result<Vec<C64>> {
    let h = kernel.spacing();
    let tilted: Vec<C64> = kernel
        .samples()
        .iter()
        .enumerate()
        .map(|(m, &v)| v * ((kernel.start_step() + m as i64) as f64 * h * a).exp())
        .collect();
    if tilted.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::WeightRange(format!(
            "tilt a={a} overflows on the kernel support"
        )));
    }
    let peak = tilted.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = tilted[0].norm().max(tilted[tilted.len() - 1].norm());
    if edge > EDGE_DECAY_TOL * peak.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "tilted kernel has not decayed at its support edges for a={a} \
             (edge {edge:.3e} vs peak {peak:.3e})"
        )));
    }
    Ok(tilted)
}

impl SymbolFunction {
    /// Evaluate at a complex point z = ξ + ia; for kernels this is the
    /// lattice quadrature h·Σ φ(t_m)e^{−izt_m} over the stored support
    /// (the implicit zero samples beyond the ends make this the trapezoid
    /// value of the zero-extended kernel).
    pub fn eval(&self, z: C64) -> Result<C64> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite point {z}")));
        }
        match self {
            SymbolFunction::AnalyticShift { t, side } => {
                let arg = match side {
                    Side::Right => -C64::i() * t * z,
                    Side::Left => C64::i() * t * z,
                };
                Ok(arg.exp())
            }
            SymbolFunction::KernelTransform { kernel } => {
                let tilted = tilted_samples(kernel, z.im)?;
                let h = kernel.spacing();
                let mut acc = C64::new(0.0, 0.0);
                for (m, v) in tilted.iter().enumerate() {
                    let t = (kernel.start_step() + m as i64) as f64 * h;
                    acc += v * (-C64::i() * z.re * t).exp();
                }
                Ok(acc * h)
            }
        }
    }

    /// The a-tilted symbol on the real line: eval at ξ + ia.
    pub fn eval_tilted(&self, xi: f64, a: f64) -> Result<C64> {
        self.eval(C64::new(xi, a))
    }

    pub fn describe(&self) -> String {
        match self {
            SymbolFunction::AnalyticShift { t, side } => match side {
                Side::Right => format!("exp(-i*{t}*z)"),
                Side::Left => format!("exp(i*{t}*z)"),
            },
            SymbolFunction::KernelTransform { kernel } => {
                let (lo, hi) = kernel.support();
                format!("kernel-transform(support=[{lo},{hi}])")
            }
        }
    }
}

/// Tilted transform of a kernel on a ξ grid at a fixed tilt a.
pub fn convolution_symbol(kernel: &Kernel, a: f64, xis: &[f64]) -> Result<Vec<C64>> {
    let tilted = tilted_samples(kernel, a)?;
    let h = kernel.spacing();
    let ts: Vec<f64> = (0..tilted.len())
        .map(|m| (kernel.start_step() + m as i64) as f64 * h)
        .collect();
    Ok(xis
        .iter()
        .map(|&xi| {
            let mut acc = C64::new(0.0, 0.0);
            for (v, t) in tilted.iter().zip(&ts) {
                acc += v * (-C64::i() * xi * t).exp();
            }
            acc * h
        })
        .collect())
}

/// Horizontal strip {a_min ≤ Im z ≤ a_max} on which a symbol is used,
/// tied to the growth measurement that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct StripSpec {
    pub a_min: f64,
    pub a_max: f64,
    pub provenance: String,
}

impl StripSpec {
    pub fn new(a_min: f64, a_max: f64, provenance: impl Into<String>) -> Result<Self> {
        if a_min.is_nan() || a_max.is_nan() || a_min > a_max {
            return Err(Error::InvalidArgument(format!(
                "invalid strip bounds [{a_min}, {a_max}]"
            )));
        }
        Ok(StripSpec {
            a_min,
            a_max,
            provenance: provenance.into(),
        })
    }

    /// Strip [−α₁, α₀] from the two measured growth orders.
    pub fn from_orders(alpha0: f64, alpha1: f64, provenance: impl Into<String>) -> Result<Self> {
        Self::new(-alpha1, alpha0, provenance)
    }

    /// Membership with the standard tolerance ring.
    pub fn admits(&self, a: f64) -> bool {
        a >= self.a_min - STRIP_MARGIN && a <= self.a_max + STRIP_MARGIN
    }

    /// n tilts spanning the strip (the single midline when degenerate).
    pub fn sample_tilts(&self, n: usize) -> Vec<f64> {
        if !(self.a_min.is_finite() && self.a_max.is_finite()) || n == 0 {
            return vec![];
        }
        if self.a_max == self.a_min || n == 1 {
            return vec![(self.a_min + self.a_max) / 2.0];
        }
        (0..n)
            .map(|i| self.a_min + (self.a_max - self.a_min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVerdict {
    Holds,
    /// a ξ sweep failed to stabilize; no claim either way
    Inconclusive,
    Violated,
}

#[derive(Clone, Debug, Serialize)]
pub struct TiltSample {
    pub a: f64,
    pub max_abs: f64,
    pub argmax_xi: f64,
    pub rounds: usize,
    pub stabilized: bool,
    pub within_bound: bool,
    /// max_abs / operator norm
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrSample {
    pub xi: f64,
    pub a: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolBoundReport {
    pub operator: String,
    pub weight: String,
    pub strip: StripSpec,
    pub operator_norm: f64,
    pub slack: f64,
    pub samples: Vec<TiltSample>,
    pub verdict: BoundVerdict,
    pub cr_samples: Vec<CrSample>,
    pub cr_ok: bool,
}

/// Adaptive sup of |h_a| over ξ: widen the window (up to the lattice
/// Nyquist line π/h, beyond which the symbol repeats) and refine the grid
/// until the observed max moves less than 1%.
fn adaptive_sup(kernel: &Kernel, a: f64) -> Result<(f64, f64, usize, bool)> {
    let nyquist = std::f64::consts::PI / kernel.spacing();
    let mut prev: Option<f64> = None;
    let mut best = (0.0, 0.0);
    for round in 0..XI_MAX_ROUNDS {
        let half = (8.0 * (1 << round) as f64).min(nyquist);
        let dxi = 0.05 / (1 << round) as f64;
        let count = (2.0 * half / dxi).ceil() as usize + 1;
        let xis: Vec<f64> = (0..count).map(|i| -half + i as f64 * dxi).collect();
        let values = convolution_symbol(kernel, a, &xis)?;
        let (mut max_abs, mut argmax) = (0.0f64, 0.0f64);
        for (xi, v) in xis.iter().zip(&values) {
            if v.norm() > max_abs {
                max_abs = v.norm();
                argmax = *xi;
            }
        }
        best = (max_abs, argmax);
        if let Some(p) = prev {
            if (max_abs - p).abs() <= XI_STABLE_TOL * max_abs.max(f64::MIN_POSITIVE) {
                return Ok((best.0, best.1, round + 1, true));
            }
        }
        prev = Some(max_abs);
    }
    Ok((best.0, best.1, XI_MAX_ROUNDS, false))
}

/// |∂h/∂ξ + i·∂h/∂a| relative to the local scale of h and its derivative,
/// by central differences — the desk-scale holomorphy probe.
fn cr_residual(symbol: &SymbolFunction, xi: f64, a: f64) -> Result<f64> {
    let s = CR_STEP;
    let dx = (symbol.eval_tilted(xi + s, a)? - symbol.eval_tilted(xi - s, a)?) / (2.0 * s);
    let dy = (symbol.eval_tilted(xi, a + s)? - symbol.eval_tilted(xi, a - s)?) / (2.0 * s);
    let scale = dx
        .norm()
        .max(dy.norm())
        .max(symbol.eval_tilted(xi, a)?.norm())
        .max(f64::MIN_POSITIVE);
    Ok((dx + C64::i() * dy).norm() / scale)
}

/// Check max_ξ|h_a| ≤ (1+slack)·‖T‖ across tilts spanning the strip.
pub fn symbol_bound_check(
    t_op: &MatrixOperator,
    kernel: &Kernel,
    strip: &StripSpec,
    tilts: Option<&[f64]>,
) -> Result<SymbolBoundReport> {
    let tilts: Vec<f64> = match tilts {
        Some(ts) => ts.to_vec(),
        None => strip.sample_tilts(5),
    };
    if tilts.is_empty() {
        return Err(Error::InvalidArgument("no tilts to sample".into()));
    }
    for &a in &tilts {
        if !strip.admits(a) {
            return Err(Error::InvalidArgument(format!(
                "tilt a={a} lies outside the measured strip \
                 [{}, {}] (margin {STRIP_MARGIN})",
                strip.a_min, strip.a_max
            )));
        }
    }
    let norm = operator_norm(t_op)?;
    let bound = (1.0 + BOUND_SLACK) * norm;
    let mut samples = Vec::with_capacity(tilts.len());
    for &a in &tilts {
        let (max_abs, argmax_xi, rounds, stabilized) = adaptive_sup(kernel, a)?;
        samples.push(TiltSample {
            a,
            max_abs,
            argmax_xi,
            rounds,
            stabilized,
            within_bound: max_abs <= bound,
            ratio: max_abs / norm,
        });
    }
    let verdict = if samples.iter().any(|s| !s.within_bound) {
        BoundVerdict::Violated
    } else if samples.iter().any(|s| !s.stabilized) {
        BoundVerdict::Inconclusive
    } else {
        BoundVerdict::Holds
    };

    let symbol = SymbolFunction::KernelTransform {
        kernel: kernel.clone(),
    };
    let a_mid = (strip.a_min + strip.a_max) / 2.0;
    let mut cr_samples = Vec::new();
    for xi in [-1.3, 0.4, 2.1] {
        cr_samples.push(CrSample {
            xi,
            a: a_mid,
            residual: cr_residual(&symbol, xi, a_mid)?,
        });
    }
    let cr_ok = cr_samples.iter().all(|c| c.residual <= CR_TOL);

    Ok(SymbolBoundReport {
        operator: t_op.description().to_string(),
        weight: t_op.weight().to_string(),
        strip: strip.clone(),
        operator_norm: norm,
        slack: BOUND_SLACK,
        samples,
        verdict,
        cr_samples,
        cr_ok,
    })
}

#[derive(Clone, Debug)]
pub struct QuasimodeParams {
    /// tilt (must sit in the measured strip)
    pub a: f64,
    /// packet carrier frequency
    pub eta0: f64,
    /// packet bandwidth
    pub b: f64,
    /// packet center
    pub t0: f64,
    /// band-quality budget: the band must satisfy sup|μ_a−λ| ≤ √ε and the
    /// out-of-band mass fraction must stay below ε
    pub epsilon: f64,
    /// bypass the adaptive band-width selection
    pub delta_override: Option<f64>,
}

impl QuasimodeParams {
    pub fn new(a: f64, eta0: f64, b: f64, t0: f64) -> Self {
        QuasimodeParams {
            a,
            eta0,
            b,
            t0,
            epsilon: 0.08,
            delta_override: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasimodeReport {
    pub lambda: (f64, f64),
    pub a: f64,
    pub eta0: f64,
    pub b: f64,
    pub t0: f64,
    pub epsilon: f64,
    /// ‖(T−λ)f‖_ω / ‖f‖_ω
    pub residual_ratio: f64,
    /// chosen band half-width
    pub delta: f64,
    /// sup_{|ξ−η₀|≤δ} |μ_a(ξ) − λ|
    pub sup_band: f64,
    /// sup_band ≤ √ε held for the chosen δ
    pub band_ok: bool,
    /// fraction of ‖F̂‖² outside the band
    pub out_of_band_fraction: f64,
    pub mass_ok: bool,
    /// sup of |μ_a−λ| over the sampled out-of-band frequencies
    pub out_band_sup: f64,
    /// sup_band + out_band_sup·√(out-of-band fraction)
    pub witness_tolerance: f64,
    pub residual_ok: bool,
    pub passed: bool,
    /// relative defect of ‖F̂‖²/(2π) against ‖F‖² (transform sanity)
    pub parseval_defect: f64,
    /// first two divided-difference bounds of the cutoff actually used
    pub cutoff_diff_bounds: (f64, f64),
    pub xi_spacing: f64,
    pub xi_half_range: f64,
}

/// Wave-packet quasimode witness: drive T at the symbol value λ = μ_a(η₀)
/// with a tilted, cut-off Gaussian packet and report how small the
/// relative residual is against the band-plus-leakage tolerance.
pub fn quasimode_witness(
    t_op: &MatrixOperator,
    symbol: &SymbolFunction,
    strip: &StripSpec,
    p: &QuasimodeParams,
) -> Result<QuasimodeReport> {
    if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "band budget epsilon={} outside (0,1)",
            p.epsilon
        )));
    }
    if !strip.admits(p.a) {
        return Err(Error::InvalidArgument(format!(
            "tilt a={} lies outside the measured strip [{}, {}] (margin {STRIP_MARGIN})",
            p.a, strip.a_min, strip.a_max
        )));
    }
    let grid = t_op.grid();
    let weight = t_op.weight();
    let packet = wave_packet(grid, weight, p.eta0, p.b, p.t0)?;
    let window = cutoff_window(grid, weight, p.t0)?;
    let cutoff_diff_bounds = divided_diff_bounds(&window);
    let mut capital_f = packet.clone();
    for (v, w) in capital_f.samples_mut().iter_mut().zip(window.samples()) {
        *v *= w;
    }
    let mut f = capital_f.clone();
    for (j, v) in f.samples_mut().iter_mut().enumerate() {
        *v *= (-p.a * grid.node(j)).exp();
    }

    let lambda = symbol.eval_tilted(p.eta0, p.a)?;
    let tf = t_op.act(&f)?;
    let num = tf.sub(&f.scaled(lambda))?.weighted_norm()?;
    let den = f.weighted_norm()?;
    if den <= 0.0 {
        return Err(Error::InvalidArgument(
            "packet has zero norm on this grid".into(),
        ));
    }
    let residual_ratio = num / den;

    // transform of F on a grid centered at the carrier frequency
    let dxi = std::f64::consts::PI / (2.0 * grid.extent());
    let k_half = (XI_HALF_RANGE / dxi).round() as i64;
    let h = grid.spacing();
    let mut band_energy = vec![0.0f64; (2 * k_half + 1) as usize];
    let mut total = 0.0;
    let nodes: Vec<f64> = grid.nodes().collect();
    for (slot, k) in (-k_half..=k_half).enumerate() {
        let xi = p.eta0 + k as f64 * dxi;
        let mut acc = C64::new(0.0, 0.0);
        for (x, v) in nodes.iter().zip(capital_f.samples()) {
            acc += v * (-C64::i() * xi * x).exp();
        }
        let e = (acc * h).norm_sqr();
        band_energy[slot] = e;
        total += e;
    }
    let parseval_defect = {
        let lhs = dxi * total / (2.0 * std::f64::consts::PI);
        let rhs = capital_f.unweighted_mass();
        (lhs - rhs).abs() / rhs
    };

    let sup_on_band = |delta: f64| -> Result<f64> {
        let mut sup = 0.0f64;
        for i in 0..BAND_SAMPLES {
            let xi =
                p.eta0 - delta + 2.0 * delta * i as f64 / (BAND_SAMPLES - 1) as f64;
            sup = sup.max((symbol.eval_tilted(xi, p.a)? - lambda).norm());
        }
        Ok(sup)
    };

    let sqrt_eps = p.epsilon.sqrt();
    let (delta, sup_band, band_ok) = match p.delta_override {
        Some(d) => {
            let s = sup_on_band(d)?;
            (d, s, s <= sqrt_eps)
        }
        None => {
            let mut chosen = None;
            for d in DELTA_LADDER {
                let s = sup_on_band(d)?;
                if s <= sqrt_eps {
                    chosen = Some((d, s, true));
                    break;
                }
            }
            chosen.unwrap_or((
                *DELTA_LADDER.last().unwrap(),
                sup_on_band(*DELTA_LADDER.last().unwrap())?,
                false,
            ))
        }
    };

    let mut out_energy = 0.0;
    let mut out_band_sup = 0.0f64;
    for (slot, k) in (-k_half..=k_half).enumerate() {
        let xi_off = k as f64 * dxi;
        if xi_off.abs() > delta {
            out_energy += band_energy[slot];
            out_band_sup = out_band_sup
                .max((symbol.eval_tilted(p.eta0 + xi_off, p.a)? - lambda).norm());
        }
    }
    let out_of_band_fraction = out_energy / total;
    let witness_tolerance = sup_band + out_band_sup * out_of_band_fraction.sqrt();
    let mass_ok = out_of_band_fraction <= p.epsilon;
    let residual_ok = residual_ratio <= witness_tolerance;

    Ok(QuasimodeReport {
        lambda: (lambda.re, lambda.im),
        a: p.a,
        eta0: p.eta0,
        b: p.b,
        t0: p.t0,
        epsilon: p.epsilon,
        residual_ratio,
        delta,
        sup_band,
        band_ok,
        out_of_band_fraction,
        mass_ok,
        out_band_sup,
        witness_tolerance,
        residual_ok,
        passed: residual_ok && mass_ok && band_ok,
        parseval_defect,
        cutoff_diff_bounds,
        xi_spacing: dxi,
        xi_half_range: XI_HALF_RANGE,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleVerdict {
    /// resolvent collapse: σ_min falls with the window and ends ≤ tol
    ConsistentInclusion,
    /// Neumann-certified resolvent point: σ_min ≥ |λ| − ‖T‖ throughout
    OutsideConsistent,
    Inconsistent,
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionSample {
    pub lambda: (f64, f64),
    pub sigmas: Vec<f64>,
    pub verdict: SampleVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionReport {
    pub operator: String,
    pub weight: String,
    pub spacing: f64,
    pub n_schedule: Vec<usize>,
    pub tol: f64,
    /// operator norm at each window size
    pub norms: Vec<f64>,
    pub samples: Vec<InclusionSample>,
    /// fraction of samples consistent with spectrum membership
    pub consistent_fraction: f64,
    pub failures: Vec<(usize, String)>,
}

#[derive(Clone, Debug)]
pub struct InclusionScanConfig {
    pub h: f64,
    pub n_schedule: Vec<usize>,
    pub tol: f64,
    pub noise_floor: f64,
}

impl InclusionScanConfig {
    pub fn standard() -> Self {
        InclusionScanConfig {
            h: 0.25,
            n_schedule: vec![100, 200, 400],
            tol: 1e-3,
            noise_floor: 1e-12,
        }
    }
}

/// Deterministic sample points of the symbol image over a tilt × frequency
/// grid.
pub fn symbol_image_samples(
    symbol: &SymbolFunction,
    tilts: &[f64],
    xis: &[f64],
) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(tilts.len() * xis.len());
    for &a in tilts {
        for &xi in xis {
            out.push(symbol.eval_tilted(xi, a)?);
        }
    }
    Ok(out)
}

/// For each candidate spectrum point λ, track σ_min(λI − T_N) along an
/// increasing window schedule and classify the trend.
pub fn spectrum_inclusion_scan(
    spec: &OperatorSpec,
    w: &Weight,
    lambdas: &[C64],
    cfg: &InclusionScanConfig,
) -> Result<InclusionReport> {
    if cfg.n_schedule.len() < 2 || cfg.n_schedule.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidArgument(
            "window schedule must be increasing with at least 2 sizes".into(),
        ));
    }
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("no sample points".into()));
    }
    let mut norms = Vec::new();
    let mut sigma_table = vec![Vec::with_capacity(cfg.n_schedule.len()); lambdas.len()];
    let mut failures = Vec::new();
    for &n in &cfg.n_schedule {
        let grid = crate::grid::Grid::new(cfg.h * n as f64, n)?;
        let m = assemble_matrix(spec, &grid, w, false)?;
        norms.push(operator_norm(&m)?);
        for (i, &lam) in lambdas.iter().enumerate() {
            match linalg::smallest_singular(&m.shifted(lam)) {
                Ok(s) => sigma_table[i].push(s),
                Err(e) => {
                    failures.push((i, e.to_string()));
                    sigma_table[i].push(f64::NAN);
                }
            }
        }
    }

    let falling = |sig: &[f64]| {
        sig.windows(2)
            .all(|p| p[1] <= p[0] * (1.0 + 1e-12) || p[1] <= cfg.noise_floor)
    };
    let mut samples = Vec::with_capacity(lambdas.len());
    let mut consistent = 0usize;
    for (i, &lam) in lambdas.iter().enumerate() {
        let sig = &sigma_table[i];
        let verdict = if sig.iter().any(|s| s.is_nan()) {
            SampleVerdict::Inconsistent
        } else if *sig.last().unwrap() <= cfg.tol && falling(sig) {
            SampleVerdict::ConsistentInclusion
        } else if lam.norm() > *norms.last().unwrap()
            && sig
                .iter()
                .zip(&norms)
                .all(|(s, nr)| *s >= lam.norm() - nr - 1e-9)
        {
            SampleVerdict::OutsideConsistent
        } else {
            SampleVerdict::Inconsistent
        };
        if verdict == SampleVerdict::ConsistentInclusion {
            consistent += 1;
        }
        samples.push(InclusionSample {
            lambda: (lam.re, lam.im),
            sigmas: sig.clone(),
            verdict,
        });
    }

    Ok(InclusionReport {
        operator: spec.to_string(),
        weight: w.to_string(),
        spacing: cfg.h,
        n_schedule: cfg.n_schedule.clone(),
        tol: cfg.tol,
        norms,
        samples,
        consistent_fraction: consistent as f64 / lambdas.len() as f64,
        failures,
    })
}
