//! Shift and convolution operators on the weighted half-line grid.
//!
//! `OperatorSpec` describes an operator abstractly; `apply` realizes it as
//! an action on samples (weight-independent), and `assemble_matrix` realizes
//! it as a dense matrix in isometric coordinates, where the right shift
//! becomes a weighted subdiagonal, the left shift a weighted superdiagonal,
//! and convolution a weighted Toeplitz-type matrix. Defect functionals
//! measure how far an operator is from the shift-invariance identities that
//! characterize Wiener-Hopf operators.

use std::fmt;

use nalgebra::DMatrix;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::linalg;
use crate::weights::Weight;
use crate::C64;

/// Dense assembly guard: above this order an explicit override is required.
pub const MATRIX_GUARD: usize = 4000;
/// Kernels up to this many samples convolve by direct summation; longer
/// kernels take the FFT route. Both routes are public and must agree.
pub const DIRECT_CONV_MAX_KERNEL: usize = 256;
const SPACING_MATCH_TOL: f64 = 1e-9;

/// Convolution kernel sampled at integer multiples of a fixed spacing:
/// sample r sits at (start_step + r)·spacing.
#[derive(Clone, Debug)]
pub struct Kernel {
    start_step: i64,
    spacing: f64,
    samples: Vec<C64>,
}

impl Kernel {
    pub fn from_steps(start_step: i64, spacing: f64, samples: Vec<C64>) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "kernel spacing must be positive, got {spacing}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidArgument("kernel has no samples".into()));
        }
        Ok(Kernel {
            start_step,
            spacing,
            samples,
        })
    }

    /// Build from a support start position, which must itself sit on the
    /// spacing lattice.
    pub fn new(start: f64, spacing: f64, samples: Vec<C64>) -> Result<Self> {
        let m = (start / spacing).round();
        if (start - m * spacing).abs() > SPACING_MATCH_TOL * spacing {
            return Err(Error::InvalidArgument(format!(
                "kernel support start {start} is not a multiple of spacing {spacing}"
            )));
        }
        Self::from_steps(m as i64, spacing, samples)
    }

    /// Gaussian density exp(−(t−center)²/2σ²)/(σ√2π) sampled on [lo, hi].
    pub fn gaussian_bump(spacing: f64, center: f64, sigma: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(sigma > 0.0) || !(hi > lo) {
            return Err(Error::InvalidArgument(
                "gaussian bump needs sigma > 0 and hi > lo".into(),
            ));
        }
        let m0 = (lo / spacing).ceil() as i64;
        let m1 = (hi / spacing).floor() as i64;
        if m1 < m0 {
            return Err(Error::InvalidArgument(
                "gaussian bump support contains no lattice points".into(),
            ));
        }
        let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        let samples = (m0..=m1)
            .map(|m| {
                let t = m as f64 * spacing;
                let u = (t - center) / sigma;
                C64::new(norm * (-u * u / 2.0).exp(), 0.0)
            })
            .collect();
        Self::from_steps(m0, spacing, samples)
    }

    /// Single sample of unit mass (value 1/spacing) at step `at_step`:
    /// convolving with it is the shift by at_step·spacing. The explicit
    /// zero neighbours record that the mass sits strictly inside the
    /// stored support, so transform quadratures see decayed edges.
    pub fn delta(spacing: f64, at_step: i64) -> Self {
        Kernel {
            start_step: at_step - 1,
            spacing,
            samples: vec![
                C64::new(0.0, 0.0),
                C64::new(1.0 / spacing, 0.0),
                C64::new(0.0, 0.0),
            ],
        }
    }

    #[inline]
    pub fn start_step(&self) -> i64 {
        self.start_step
    }

    #[inline]
    pub fn end_step(&self) -> i64 {
        self.start_step + self.samples.len() as i64 - 1
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    #[inline]
    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    /// Support interval [start, end] in physical units.
    pub fn support(&self) -> (f64, f64) {
        (
            self.start_step as f64 * self.spacing,
            self.end_step() as f64 * self.spacing,
        )
    }

    /// Pointwise linear combination c1·k1 + c2·k2 on the merged support.
    pub fn linear_combo(c1: C64, k1: &Kernel, c2: C64, k2: &Kernel) -> Result<Kernel> {
        if (k1.spacing - k2.spacing).abs() > SPACING_MATCH_TOL * k1.spacing {
            return Err(Error::GridMismatch(format!(
                "kernel spacings differ: {} vs {}",
                k1.spacing, k2.spacing
            )));
        }
        let m0 = k1.start_step.min(k2.start_step);
        let m1 = k1.end_step().max(k2.end_step());
        let mut samples = vec![C64::new(0.0, 0.0); (m1 - m0 + 1) as usize];
        for (r, v) in k1.samples.iter().enumerate() {
            samples[(k1.start_step - m0) as usize + r] += c1 * v;
        }
        for (r, v) in k2.samples.iter().enumerate() {
            samples[(k2.start_step - m0) as usize + r] += c2 * v;
        }
        Kernel::from_steps(m0, k1.spacing, samples)
    }

    fn check_spacing(&self, grid: &Grid) -> Result<()> {
        let h = grid.spacing();
        if (self.spacing - h).abs() > SPACING_MATCH_TOL * h {
            return Err(Error::GridMismatch(format!(
                "kernel spacing {} does not match grid spacing {h}",
                self.spacing
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum OperatorSpec {
    /// (S_t f)(x) = f(x−t) with zero fill below t.
    RightShift { t: f64 },
    /// (P⁺S₋t f)(x) = f(x+t): pull toward 0, truncating what crosses it.
    LeftShift { t: f64 },
    /// f ↦ P⁺(φ∗f) restricted to the window.
    Convolution { kernel: Kernel },
    LinearCombo { terms: Vec<(C64, OperatorSpec)> },
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorSpec::RightShift { t } => write!(f, "right-shift(t={t})"),
            OperatorSpec::LeftShift { t } => write!(f, "left-shift(t={t})"),
            OperatorSpec::Convolution { kernel } => {
                let (lo, hi) = kernel.support();
                write!(f, "convolution(support=[{lo}, {hi}])")
            }
            OperatorSpec::LinearCombo { terms } => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|(c, s)| format!("({} + {}i)*{}", c.re, c.im, s))
                    .collect();
                write!(f, "combo[{}]", parts.join(" + "))
            }
        }
    }
}

impl OperatorSpec {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match self {
            OperatorSpec::RightShift { t } | OperatorSpec::LeftShift { t } => {
                grid.steps_for(*t).map(|_| ())
            }
            OperatorSpec::Convolution { kernel } => kernel.check_spacing(grid),
            OperatorSpec::LinearCombo { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidArgument(
                        "linear combination with no terms".into(),
                    ));
                }
                terms.iter().try_for_each(|(_, s)| s.validate(grid))
            }
        }
    }

    /// Furthest distance the operator can move support to the right; used
    /// by the defect functionals to keep identities clear of the window end.
    pub fn forward_reach(&self) -> f64 {
        match self {
            OperatorSpec::RightShift { t } => *t,
            OperatorSpec::LeftShift { .. } => 0.0,
            OperatorSpec::Convolution { kernel } => kernel.support().1.max(0.0),
            OperatorSpec::LinearCombo { terms } => terms
                .iter()
                .map(|(_, s)| s.forward_reach())
                .fold(0.0, f64::max),
        }
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.validate(f.grid())?;
        let n = f.grid().count();
        let out = match self {
            OperatorSpec::RightShift { t } => {
                let k = f.grid().steps_for(*t)?;
                let mut s = vec![C64::new(0.0, 0.0); n];
                for j in k..n {
                    s[j] = f.samples()[j - k];
                }
                s
            }
            OperatorSpec::LeftShift { t } => {
                let k = f.grid().steps_for(*t)?;
                let mut s = vec![C64::new(0.0, 0.0); n];
                for j in 0..n.saturating_sub(k) {
                    s[j] = f.samples()[j + k];
                }
                s
            }
            OperatorSpec::Convolution { kernel } => {
                if kernel.samples().len() <= DIRECT_CONV_MAX_KERNEL {
                    convolve_direct(kernel, f.samples(), f.grid().spacing(), n)
                } else {
                    convolve_fft(kernel, f.samples(), f.grid().spacing(), n)
                }
            }
            OperatorSpec::LinearCombo { terms } => {
                let mut acc = vec![C64::new(0.0, 0.0); n];
                for (c, s) in terms {
                    let part = s.apply(f)?;
                    for (a, b) in acc.iter_mut().zip(part.samples()) {
                        *a += c * b;
                    }
                }
                acc
            }
        };
        GridFunction::new(f.grid().clone(), f.weight().clone(), out)
    }

    /// Apply and also report the weighted mass pushed past the right window
    /// end (a finite-window artifact of the truncation; for linear
    /// combinations the reported value is the triangle-inequality bound).
    pub fn apply_with_spill(&self, f: &GridFunction) -> Result<(GridFunction, f64)> {
        self.validate(f.grid())?;
        let grid = f.grid();
        let (n, h) = (grid.count(), grid.spacing());
        let w = f.weight();
        let spill = match self {
            OperatorSpec::RightShift { t } => {
                let k = grid.steps_for(*t)?;
                let mut acc = 0.0;
                for j in n.saturating_sub(k)..n {
                    let x_out = grid.node(j) + *t;
                    let wv = w.evaluate(x_out)?;
                    acc += f.samples()[j].norm_sqr() * wv * wv;
                }
                (acc * h).sqrt()
            }
            OperatorSpec::LeftShift { .. } => 0.0,
            OperatorSpec::Convolution { kernel } => {
                let beyond = kernel.end_step().max(0) as usize;
                if beyond == 0 {
                    0.0
                } else {
                    let full = convolve_direct(kernel, f.samples(), h, n + beyond);
                    let mut acc = 0.0;
                    for (i, v) in full.iter().enumerate().skip(n) {
                        let x = (i as f64 + 0.5) * h;
                        let wv = w.evaluate(x)?;
                        acc += v.norm_sqr() * wv * wv;
                    }
                    (acc * h).sqrt()
                }
            }
            OperatorSpec::LinearCombo { terms } => {
                let mut acc = 0.0;
                for (c, s) in terms {
                    acc += c.norm() * s.apply_with_spill(f)?.1;
                }
                acc
            }
        };
        Ok((self.apply(f)?, spill))
    }
}

/// Direct O(n·K) linear convolution: out_i = h·Σ_j φ((i−j)h)·f_j.
pub fn convolve_direct(kernel: &Kernel, f: &[C64], h: f64, n_out: usize) -> Vec<C64> {
    let m0 = kernel.start_step();
    let n = f.len() as i64;
    let mut out = vec![C64::new(0.0, 0.0); n_out];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (r, phi) in kernel.samples().iter().enumerate() {
            let j = i as i64 - (m0 + r as i64);
            if j >= 0 && j < n {
                acc += phi * f[j as usize];
            }
        }
        *o = acc * h;
    }
    out
}

/// FFT route for the same linear convolution, zero-padded past n + K.
pub fn convolve_fft(kernel: &Kernel, f: &[C64], h: f64, n_out: usize) -> Vec<C64> {
    let k_len = kernel.samples().len();
    let m0 = kernel.start_step();
    let len = (n_out.max(f.len()) + k_len).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(len);
    let ifft = planner.plan_fft_inverse(len);

    let mut a = vec![C64::new(0.0, 0.0); len];
    a[..k_len].copy_from_slice(kernel.samples());
    let mut b = vec![C64::new(0.0, 0.0); len];
    b[..f.len()].copy_from_slice(f);
    fft.process(&mut a);
    fft.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    ifft.process(&mut a);
    let scale = h / len as f64;
    (0..n_out)
        .map(|i| {
            let idx = i as i64 - m0;
            if idx >= 0 && (idx as usize) < len {
                a[idx as usize] * scale
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// Dense realization in isometric coordinates, with provenance.
pub struct MatrixOperator {
    matrix: DMatrix<C64>,
    grid: Grid,
    weight: Weight,
    description: String,
    forward_reach: f64,
}

impl MatrixOperator {
    #[inline]
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
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
    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn act(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.grid() != &self.grid || f.weight() != &self.weight {
            return Err(Error::GridMismatch(
                "matrix applied to a function from a different grid or weight".into(),
            ));
        }
        let u = f.to_isometric()?;
        let v = &self.matrix * nalgebra::DVector::from_column_slice(u.values());
        let iso = crate::grid::IsometricVector::new(
            self.grid.clone(),
            self.weight.clone(),
            v.iter().copied().collect(),
        )?;
        iso.to_grid_function()
    }

    /// zI − M.
    pub fn shifted(&self, z: C64) -> DMatrix<C64> {
        let mut a = -self.matrix.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += z;
        }
        a
    }
}

/// Largest singular value of the assembled matrix.
pub fn operator_norm(m: &MatrixOperator) -> Result<f64> {
    linalg::operator_norm(&m.matrix)
}

pub fn assemble_matrix(
    spec: &OperatorSpec,
    grid: &Grid,
    weight: &Weight,
    override_guard: bool,
) -> Result<MatrixOperator> {
    spec.validate(grid)?;
    let n = grid.count();
    if n > MATRIX_GUARD && !override_guard {
        return Err(Error::MatrixGuard {
            n,
            limit: MATRIX_GUARD,
        });
    }
    let wv: Vec<f64> = grid
        .nodes()
        .map(|x| weight.evaluate(x))
        .collect::<Result<_>>()?;
    let matrix = assemble_rec(spec, grid, &wv)?;
    Ok(MatrixOperator {
        matrix,
        grid: grid.clone(),
        weight: weight.clone(),
        description: spec.to_string(),
        forward_reach: spec.forward_reach(),
    })
}

fn assemble_rec(spec: &OperatorSpec, grid: &Grid, wv: &[f64]) -> Result<DMatrix<C64>> {
    let n = grid.count();
    let h = grid.spacing();
    Ok(match spec {
        OperatorSpec::RightShift { t } => {
            let k = grid.steps_for(*t)?;
            let mut m = DMatrix::zeros(n, n);
            for j in k..n {
                m[(j, j - k)] = C64::new(wv[j] / wv[j - k], 0.0);
            }
            m
        }
        OperatorSpec::LeftShift { t } => {
            let k = grid.steps_for(*t)?;
            let mut m = DMatrix::zeros(n, n);
            for j in 0..n.saturating_sub(k) {
                m[(j, j + k)] = C64::new(wv[j] / wv[j + k], 0.0);
            }
            m
        }
        OperatorSpec::Convolution { kernel } => {
            let (m0, m1) = (kernel.start_step(), kernel.end_step());
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                let j_lo = (i as i64 - m1).max(0) as usize;
                let j_hi = (i as i64 - m0).min(n as i64 - 1);
                if j_hi < 0 {
                    continue;
                }
                for j in j_lo..=(j_hi as usize) {
                    let r = (i as i64 - j as i64 - m0) as usize;
                    m[(i, j)] = kernel.samples()[r] * (h * wv[i] / wv[j]);
                }
            }
            m
        }
        OperatorSpec::LinearCombo { terms } => {
            let mut acc = DMatrix::zeros(n, n);
            for (c, s) in terms {
                acc += assemble_rec(s, grid, wv)? * *c;
            }
            acc
        }
    })
}

/// Something that acts linearly on grid functions; implemented by specs,
/// assembled matrices, and ad-hoc test operators.
pub trait OperatorAction {
    fn act_on(&self, f: &GridFunction) -> Result<GridFunction>;
    /// furthest rightward support motion, for window-clearance checks
    fn forward_reach(&self) -> f64;
}

impl OperatorAction for OperatorSpec {
    fn act_on(&self, f: &GridFunction) -> Result<GridFunction> {
        self.apply(f)
    }
    fn forward_reach(&self) -> f64 {
        OperatorSpec::forward_reach(self)
    }
}

impl OperatorAction for MatrixOperator {
    fn act_on(&self, f: &GridFunction) -> Result<GridFunction> {
        self.act(f)
    }
    fn forward_reach(&self) -> f64 {
        self.forward_reach
    }
}

fn check_test_set(
    op: &dyn OperatorAction,
    t: f64,
    tests: &[GridFunction],
    include_shift_in_reach: bool,
) -> Result<()> {
    if tests.is_empty() {
        return Err(Error::InvalidArgument("empty defect test set".into()));
    }
    for f in tests {
        let grid = f.grid();
        grid.steps_for(t)?;
        let Some(end) = f.support_end() else {
            return Err(Error::InvalidArgument(
                "defect test function is identically zero".into(),
            ));
        };
        let x_end = grid.node(end);
        let reach = op.forward_reach() + if include_shift_in_reach { t } else { 0.0 };
        if x_end + reach > grid.extent() {
            return Err(Error::InvalidArgument(format!(
                "test function support reaches {x_end}, leaving no room for \
                 motion by {reach} inside [0, {}]",
                grid.extent()
            )));
        }
    }
    Ok(())
}

/// max over the test set of ‖P⁺S₋t T S_t f − T f‖_ω / ‖f‖_ω. Zero (to
/// roundoff) exactly for Wiener-Hopf operators, as long as every test
/// function stays clear of the right window end.
pub fn wiener_hopf_defect(
    op: &dyn OperatorAction,
    t: f64,
    tests: &[GridFunction],
) -> Result<f64> {
    check_test_set(op, t, tests, true)?;
    let mut worst = 0.0f64;
    for f in tests {
        let right = OperatorSpec::RightShift { t };
        let left = OperatorSpec::LeftShift { t };
        let shifted = right.apply(f)?;
        let moved = left.apply(&op.act_on(&shifted)?)?;
        let direct = op.act_on(f)?;
        let defect = moved.sub(&direct)?.weighted_norm()? / f.weighted_norm()?;
        worst = worst.max(defect);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftSide {
    /// commutation with S_t
    Right,
    /// commutation with P⁺S₋t
    Left,
}

/// max over the test set of ‖T Σf − Σ T f‖_ω/‖f‖_ω where Σ is S_t
/// (side = Right) or P⁺S₋t (side = Left).
pub fn commutator_defect(
    op: &dyn OperatorAction,
    t: f64,
    side: ShiftSide,
    tests: &[GridFunction],
) -> Result<f64> {
    check_test_set(op, t, tests, side == ShiftSide::Right)?;
    let sigma = match side {
        ShiftSide::Right => OperatorSpec::RightShift { t },
        ShiftSide::Left => OperatorSpec::LeftShift { t },
    };
    let mut worst = 0.0f64;
    for f in tests {
        let a = op.act_on(&sigma.apply(f)?)?;
        let b = sigma.apply(&op.act_on(f)?)?;
        let defect = a.sub(&b)?.weighted_norm()? / f.weighted_norm()?;
        worst = worst.max(defect);
    }
    Ok(worst)
}
