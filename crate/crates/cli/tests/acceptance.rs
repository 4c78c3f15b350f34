//! Acceptance gate: ten end-to-end criteria over the whole workspace, one
//! test and one printed verdict line each (run with `-- --nocapture` to see
//! the lines). Tolerances are pinned here, in code, not in configuration.

use std::f64::consts::PI;

use whlab_core::grid::{Grid, GridFunction};
use whlab_core::operators::{
    assemble_matrix, commutator_defect, operator_norm, wiener_hopf_defect, Kernel, OperatorSpec,
    ShiftSide,
};
use whlab_core::spectra::{
    disk_spectrum_scan, exact_shift_norm, growth_order, pseudospectrum, DiskScanConfig,
    DiskScanReport, Side,
};
use whlab_core::symbols::{
    quasimode_witness, spectrum_inclusion_scan, symbol_bound_check, symbol_image_samples,
    BoundVerdict, InclusionScanConfig, QuasimodeParams, QuasimodeReport, StripSpec, SymbolFunction,
};
use whlab_core::weights::Weight;
use whlab_core::C64;

fn verdict(id: &str, slug: &str, ok: bool, details: &str) {
    println!(
        "ACCEPTANCE {id} {slug}: {} ({details})",
        if ok { "pass" } else { "fail" }
    );
    assert!(ok, "{id} {slug}: {details}");
}

fn grid() -> Grid {
    Grid::new(20.0, 400).unwrap()
}

fn builtin_weights() -> Vec<Weight> {
    vec![
        Weight::Constant,
        Weight::Exponential { rate: 1.0 },
        Weight::Exponential { rate: -1.0 },
        Weight::Polynomial { exponent: 2.0 },
        Weight::Oscillatory { gamma: 1.0 },
    ]
}

fn smooth_interior(g: &Grid, w: &Weight, lo: f64, hi: f64) -> GridFunction {
    let mid = (lo + hi) / 2.0;
    let rad = (hi - lo) / 2.0;
    GridFunction::from_fn(g.clone(), w.clone(), move |x| {
        if x <= lo || x >= hi {
            C64::new(0.0, 0.0)
        } else {
            let u = (x - mid) / rad;
            C64::from_polar((-(u * u) / (1.0 - u * u).max(1e-12)).exp(), 0.7 * x)
        }
    })
}

#[test]
fn a01_exact_shift_norms_match_weight_ratios() {
    let g = grid();
    let ts = [g.spacing(), 1.0, 2.0];
    let mut worst = 0.0f64;
    let mut place = String::from("every case (all exact)");
    for w in builtin_weights() {
        for side in [Side::Right, Side::Left] {
            for &t in &ts {
                let exact = exact_shift_norm(side, &w, &g, t).unwrap();
                let m = assemble_matrix(&side.shift_spec(t), &g, &w, false).unwrap();
                let dense = operator_norm(&m).unwrap();
                let d = (dense - exact).abs();
                if d > worst {
                    worst = d;
                    place = format!("{w} {side:?} t={t}");
                }
            }
        }
    }
    verdict(
        "a01",
        "exact-shift-norms",
        worst <= 1e-10,
        &format!("worst |dense - exact| = {worst:.3e} at {place}; bound 1e-10"),
    );
}

#[test]
fn a02_growth_orders_recover_known_rates() {
    let g = grid();
    let ts: Vec<f64> = (1..=8).map(f64::from).collect();
    let mut ok = true;
    let mut notes = Vec::new();

    for rate in [1.0f64, -1.0] {
        let w = Weight::Exponential { rate };
        let r = growth_order(Side::Right, &w, &g, &ts, None).unwrap();
        let l = growth_order(Side::Left, &w, &g, &ts, None).unwrap();
        let e0 = (r.alpha_hat - rate).abs();
        let e1 = (l.alpha_hat + rate).abs();
        let mirror = (r.alpha_hat + l.alpha_hat).abs();
        ok &= e0 <= 1e-6 && e1 <= 1e-6 && mirror <= 1e-6;
        notes.push(format!(
            "rate {rate}: order errors {e0:.1e}/{e1:.1e}, |sum| {mirror:.1e}"
        ));
    }

    // polynomial weights only reveal their vanishing order on long windows
    let long_grid = Grid::new(200.0, 4000).unwrap();
    let long_ts: Vec<f64> = (5..=10).map(|k| 10.0 * k as f64).collect();
    let wp = Weight::Polynomial { exponent: 2.0 };
    let rp = growth_order(Side::Right, &wp, &long_grid, &long_ts, None).unwrap();
    let lp = growth_order(Side::Left, &wp, &long_grid, &long_ts, None).unwrap();
    ok &= rp.alpha_hat.abs() <= 0.05 && lp.alpha_hat.abs() <= 0.05;
    notes.push(format!(
        "polynomial long-window orders {:.3e}/{:.3e} (|.| <= 0.05)",
        rp.alpha_hat, lp.alpha_hat
    ));

    let mut min_sum = f64::INFINITY;
    for w in builtin_weights() {
        let r = growth_order(Side::Right, &w, &g, &ts, None).unwrap();
        let l = growth_order(Side::Left, &w, &g, &ts, None).unwrap();
        min_sum = min_sum.min(r.alpha_hat + l.alpha_hat);
    }
    ok &= min_sum >= -0.02;
    notes.push(format!("min order sum over built-ins {min_sum:.3e} >= -0.02"));

    verdict("a02", "shift-growth-orders", ok, &notes.join("; "));
}

fn scan_radii() -> Vec<f64> {
    vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.1, 1.2, 1.3, 1.5, 2.0]
}

/// interior points must collapse monotonically to <= 1e-4 at the largest
/// window; exterior points must respect sigma >= |z| - ||S|| - 1e-9
fn check_disk(rep: &DiskScanReport) -> (bool, String) {
    let mut collapse_ok = true;
    let mut outer_ok = true;
    for p in &rep.points {
        if p.radius_rel <= 0.9 {
            let monotone = p
                .sigmas
                .windows(2)
                .all(|q| q[1] <= q[0] * (1.0 + 1e-12) || q[1] <= 1e-12);
            collapse_ok &= monotone && *p.sigmas.last().unwrap() <= 1e-4;
        } else if p.radius_rel >= 1.1 {
            let z = C64::new(p.z.0, p.z.1);
            outer_ok &= p
                .sigmas
                .iter()
                .all(|s| *s >= z.norm() - rep.predicted_radius - 1e-9);
        }
    }
    let ok = rep.all_consistent && collapse_ok && outer_ok;
    (
        ok,
        format!(
            "radius {:.6}: interior collapse {collapse_ok}, outer bound {outer_ok}, \
             classifier consistent {}",
            rep.predicted_radius, rep.all_consistent
        ),
    )
}

#[test]
fn a03_right_shift_disk_fills_at_fixed_spacing() {
    let mut cfg = DiskScanConfig::standard(1.0);
    cfg.radii_rel = scan_radii();
    let unweighted = disk_spectrum_scan(Side::Right, &Weight::Constant, 1.0, &cfg).unwrap();
    let (ok_u, note_u) = check_disk(&unweighted);
    let radius_unit = (unweighted.predicted_radius - 1.0).abs() <= 1e-9;

    let weighted =
        disk_spectrum_scan(Side::Right, &Weight::Exponential { rate: 1.0 }, 1.0, &cfg).unwrap();
    let (ok_w, note_w) = check_disk(&weighted);
    let radius_e = (weighted.predicted_radius - 1.0f64.exp()).abs() <= 1e-6;

    verdict(
        "a03",
        "right-shift-disk-spectrum",
        ok_u && ok_w && radius_unit && radius_e,
        &format!("unweighted {note_u} | e^x {note_w}"),
    );
}

#[test]
fn a04_left_shift_disk_mirrors_with_inverted_weight() {
    let mut cfg = DiskScanConfig::standard(1.0);
    cfg.radii_rel = scan_radii();
    let rep =
        disk_spectrum_scan(Side::Left, &Weight::Exponential { rate: -1.0 }, 1.0, &cfg).unwrap();
    let (ok, note) = check_disk(&rep);
    let radius_e = (rep.predicted_radius - 1.0f64.exp()).abs() <= 1e-6;
    verdict("a04", "left-shift-disk-spectrum", ok && radius_e, &note);
}

#[test]
fn a05_shift_resolvent_is_circularly_symmetric() {
    let g = grid();
    let cases = [
        (Side::Right, Weight::Constant),
        (Side::Right, Weight::Exponential { rate: 1.0 }),
        (Side::Left, Weight::Exponential { rate: -1.0 }),
    ];
    let thetas = [PI / 7.0, 1.0, 2.5];
    let mut worst = 0.0f64;
    for (side, w) in cases {
        let m = assemble_matrix(&side.shift_spec(1.0), &g, &w, false).unwrap();
        for r in [0.5, 1.5] {
            let mut nodes = vec![C64::new(r, 0.0)];
            nodes.extend(thetas.iter().map(|&th| C64::from_polar(r, th)));
            let ps = pseudospectrum(&m, &nodes);
            assert!(ps.failures.is_empty());
            for k in 1..nodes.len() {
                worst = worst.max((ps.sigma_min[k] - ps.sigma_min[0]).abs());
            }
        }
    }
    verdict(
        "a05",
        "circular-pseudospectrum-symmetry",
        worst <= 1e-10,
        &format!("max angular deviation {worst:.3e} <= 1e-10"),
    );
}

#[test]
fn a06_shift_algebra_defects_and_commutator_table() {
    let g = grid();
    let t = 1.0;
    let mut ok = true;
    let mut notes = Vec::new();

    for w in [Weight::Constant, Weight::Oscillatory { gamma: 1.0 }] {
        let tests = vec![
            GridFunction::indicator(g.clone(), w.clone(), 0.0, 1.0),
            smooth_interior(&g, &w, 2.0, 16.0),
        ];
        let combo = OperatorSpec::LinearCombo {
            terms: vec![
                (C64::new(2.0, 0.0), OperatorSpec::LeftShift { t }),
                (C64::new(0.0, 3.0), OperatorSpec::RightShift { t }),
            ],
        };
        let wh = wiener_hopf_defect(&combo, t, &tests).unwrap();
        ok &= wh <= 1e-12;
        notes.push(format!("{w}: wiener-hopf defect {wh:.2e}"));
    }

    let w = Weight::Constant;
    let tests = vec![
        GridFunction::indicator(g.clone(), w.clone(), 0.0, 1.0),
        smooth_interior(&g, &w, 2.0, 14.0),
    ];
    let h = g.spacing();
    let plus = Kernel::gaussian_bump(h, 1.0, 1.0 / 17.2, 0.5, 1.5).unwrap();
    let minus = Kernel::gaussian_bump(h, -1.0, 1.0 / 17.2, -1.5, -0.5).unwrap();
    let table = [
        (plus, ShiftSide::Right, ShiftSide::Left, "right-supported"),
        (minus, ShiftSide::Left, ShiftSide::Right, "left-supported"),
    ];
    for (kernel, commuting, truncating, tag) in table {
        let op = OperatorSpec::Convolution { kernel };
        let small = commutator_defect(&op, t, commuting, &tests).unwrap();
        let big = commutator_defect(&op, t, truncating, &tests).unwrap();
        ok &= small <= 1e-10 && big >= 0.05;
        notes.push(format!(
            "{tag}: commuting side {small:.2e} <= 1e-10, truncating side {big:.2e} >= 0.05"
        ));
    }
    verdict(
        "a06",
        "wiener-hopf-and-commutator-defects",
        ok,
        &notes.join("; "),
    );
}

#[test]
fn a07_symbol_sup_bounded_by_operator_norm_on_the_strip() {
    let g = grid();
    let h = g.spacing();
    let w = Weight::Oscillatory { gamma: 1.0 };
    let ts: Vec<f64> = (1..=8).map(f64::from).collect();
    let r = growth_order(Side::Right, &w, &g, &ts, None).unwrap();
    let l = growth_order(Side::Left, &w, &g, &ts, None).unwrap();
    let strip =
        StripSpec::from_orders(r.alpha_hat, l.alpha_hat, "measured shift growth orders").unwrap();

    let wide = Kernel::gaussian_bump(h, 0.0, 1.0, -10.0, 10.0).unwrap();
    let moved = Kernel::gaussian_bump(h, 1.0, 1.0, -9.0, 11.0).unwrap();
    let mixed =
        Kernel::linear_combo(C64::new(1.0, 0.0), &wide, C64::new(-0.5, 0.0), &moved).unwrap();

    let mut ok = true;
    let mut notes = vec![format!("strip [{:.4}, {:.4}]", strip.a_min, strip.a_max)];
    for (kernel, tag) in [(wide, "centered"), (moved, "shifted"), (mixed, "difference")] {
        let t_op = assemble_matrix(
            &OperatorSpec::Convolution {
                kernel: kernel.clone(),
            },
            &g,
            &w,
            false,
        )
        .unwrap();
        let rep = symbol_bound_check(&t_op, &kernel, &strip, None).unwrap();
        let sup_ratio = rep.samples.iter().map(|s| s.ratio).fold(0.0f64, f64::max);
        ok &= rep.verdict == BoundVerdict::Holds && sup_ratio <= 1.05;
        notes.push(format!(
            "{tag}: worst sup/norm {sup_ratio:.6} ({:?})",
            rep.verdict
        ));
    }

    // transform convention: the lattice delta is exactly the shift symbol
    let delta = SymbolFunction::KernelTransform {
        kernel: Kernel::delta(h, 20),
    };
    let shift = SymbolFunction::AnalyticShift {
        t: 20.0 * h,
        side: Side::Right,
    };
    let mut lock = 0.0f64;
    for k in 0..5 {
        let xi = -3.0 + 1.5 * k as f64;
        for a in [-0.15, 0.0, 0.2] {
            lock = lock.max(
                (delta.eval_tilted(xi, a).unwrap() - shift.eval_tilted(xi, a).unwrap()).norm(),
            );
        }
    }
    ok &= lock <= 1e-12;
    notes.push(format!("delta convention gap {lock:.2e} <= 1e-12"));
    verdict("a07", "symbol-bound-on-measured-strip", ok, &notes.join("; "));
}

#[test]
fn a08_wave_packet_quasimodes_meet_the_budget() {
    let w = Weight::Constant;
    let g = grid();
    let ts: Vec<f64> = (1..=8).map(f64::from).collect();
    let r = growth_order(Side::Right, &w, &g, &ts, None).unwrap();
    let l = growth_order(Side::Left, &w, &g, &ts, None).unwrap();
    let strip =
        StripSpec::from_orders(r.alpha_hat, l.alpha_hat, "measured shift growth orders").unwrap();

    let coarse_grid = Grid::new(40.0, 800).unwrap();
    let fine_grid = Grid::new(80.0, 1600).unwrap();
    let hw = coarse_grid.spacing();
    let run = |spec: &OperatorSpec,
               symbol: &SymbolFunction,
               grid: &Grid,
               p: &QuasimodeParams|
     -> QuasimodeReport {
        let m = assemble_matrix(spec, grid, &w, false).unwrap();
        quasimode_witness(&m, symbol, &strip, p).unwrap()
    };

    let shift_spec = OperatorSpec::RightShift { t: 1.0 };
    let shift_symbol = SymbolFunction::AnalyticShift {
        t: 1.0,
        side: Side::Right,
    };
    let p_coarse = QuasimodeParams::new(0.0, PI, 0.25, 10.0);
    let mut p_fine = p_coarse.clone();
    p_fine.b = 0.125;
    p_fine.t0 = 20.0;
    let shift_coarse = run(&shift_spec, &shift_symbol, &coarse_grid, &p_coarse);
    let shift_fine = run(&shift_spec, &shift_symbol, &fine_grid, &p_fine);

    let kernel = Kernel::gaussian_bump(hw, 0.0, 2.0 / 17.2, -1.0, 1.0).unwrap();
    let conv_spec = OperatorSpec::Convolution {
        kernel: kernel.clone(),
    };
    let conv_symbol = SymbolFunction::KernelTransform { kernel };
    let q_coarse = QuasimodeParams::new(0.0, 0.0, 0.25, 10.0);
    let mut q_fine = q_coarse.clone();
    q_fine.b = 0.125;
    q_fine.t0 = 20.0;
    let conv_coarse = run(&conv_spec, &conv_symbol, &coarse_grid, &q_coarse);
    let conv_fine = run(&conv_spec, &conv_symbol, &fine_grid, &q_fine);

    let mut p_wide = p_coarse.clone();
    p_wide.delta_override = Some(1.0);
    let wide = run(&shift_spec, &shift_symbol, &coarse_grid, &p_wide);

    let shift_resid_ok = shift_coarse.residual_ratio <= 0.15;
    let conv_resid_ok = conv_coarse.residual_ratio <= 0.15;
    let schedule_ok = shift_fine.residual_ratio <= 1.1 * shift_coarse.residual_ratio
        && conv_fine.residual_ratio <= 1.1 * conv_coarse.residual_ratio;
    let mass_ok = wide.out_of_band_fraction <= 0.02;
    let ok = shift_resid_ok && conv_resid_ok && schedule_ok && mass_ok;
    verdict(
        "a08",
        "wave-packet-quasimode-residuals",
        ok,
        &format!(
            "shift residual {:.6e} (<= 1.5e-1: {shift_resid_ok}); kernel residual {:.6e} \
             (<= 1.5e-1: {conv_resid_ok}); refined residuals {:.6e}/{:.6e} within 10% of \
             coarse: {schedule_ok}; wide-band leakage {:.3e} (<= 2e-2: {mass_ok})",
            shift_coarse.residual_ratio,
            conv_coarse.residual_ratio,
            shift_fine.residual_ratio,
            conv_fine.residual_ratio,
            wide.out_of_band_fraction
        ),
    );
}

#[test]
fn a09_symbol_image_points_are_consistent_inclusions() {
    let g = grid();
    let ts: Vec<f64> = (1..=8).map(f64::from).collect();
    let cfg = InclusionScanConfig::standard();
    let rels: [f64; 5] = [0.5, 0.6, 0.7, 0.8, 0.9];
    let xis: Vec<f64> = (0..10).map(|m| m as f64 * 2.0 * PI / 10.0).collect();
    let cases = [
        (
            OperatorSpec::RightShift { t: 1.0 },
            Weight::Constant,
            Side::Right,
        ),
        (
            OperatorSpec::RightShift { t: 1.0 },
            Weight::Exponential { rate: 1.0 },
            Side::Right,
        ),
        (
            OperatorSpec::LeftShift { t: 1.0 },
            Weight::Exponential { rate: -1.0 },
            Side::Left,
        ),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (spec, w, side) in cases {
        let est = growth_order(side, &w, &g, &ts, None).unwrap();
        // moduli strictly inside the predicted radius e^alpha
        let tilts: Vec<f64> = match side {
            Side::Right => rels.iter().map(|r| est.alpha_hat + r.ln()).collect(),
            Side::Left => rels.iter().map(|r| -est.alpha_hat - r.ln()).collect(),
        };
        let symbol = match spec {
            OperatorSpec::RightShift { t } => SymbolFunction::AnalyticShift {
                t,
                side: Side::Right,
            },
            OperatorSpec::LeftShift { t } => SymbolFunction::AnalyticShift {
                t,
                side: Side::Left,
            },
            _ => unreachable!(),
        };
        let lambdas = symbol_image_samples(&symbol, &tilts, &xis).unwrap();
        let rep = spectrum_inclusion_scan(&spec, &w, &lambdas, &cfg).unwrap();
        ok &= rep.consistent_fraction >= 0.95;
        notes.push(format!(
            "{} on {w}: fraction {:.3} of {} samples",
            rep.operator,
            rep.consistent_fraction,
            rep.samples.len()
        ));
    }
    verdict("a09", "spectrum-inclusion-scan", ok, &notes.join("; "));
}

#[test]
fn a10_full_pipeline_passes_and_reruns_identically() {
    let run = |dir: &std::path::Path| {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_whlab"))
            .args(["verify-all", "--out", dir.to_str().unwrap()])
            .output()
            .expect("binary runs");
        let report = std::fs::read(dir.join("report.json")).unwrap_or_default();
        (out.status.code(), report)
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let (code1, rep1) = run(d1.path());
    let (code2, rep2) = run(d2.path());
    let parsed: serde_json::Value = serde_json::from_slice(&rep1).unwrap();
    let passes = parsed["counts"]["pass"].as_u64().unwrap_or(0);
    let identical = rep1 == rep2 && !rep1.is_empty();
    let ok = code1 == Some(0) && code2 == Some(0) && passes >= 10 && identical;
    verdict(
        "a10",
        "verify-all-reproducibility",
        ok,
        &format!(
            "exit codes {code1:?}/{code2:?}; {passes} passing records (>= 10); \
             reports byte-identical: {identical}"
        ),
    );
}
