//! Acceptance suite: one PASS/FAIL line per criterion, then a single assert.
//!
//! Run with `cargo test -p slicq --test acceptance -- --nocapture` to see the
//! report.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicq::bench::{run_approximation, run_scaling, ApproxConfig, ScalingConfig, Variant};
use slicq_core::processing::{transpose_coefficients, Transposition};
use slicq_core::{
    approximation_error, build_cq_system, canonical_dual, cq_layout, dual_slicing_window,
    frame_diagonal, is_painless_frame, make_slicing_window, residual_bound, CqDesign, CqParams,
    Filter, NsgSystem, NsgTransform, RaggedCoefficients, RustFftPlanner, Slicq, WINDOW_PRESETS,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_complex(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let base: f64 = b.iter().map(Complex64::norm_sqr).sum();
    (diff / base).sqrt()
}

fn cis(angle: f64) -> Complex64 {
    Complex64::new(angle.cos(), angle.sin())
}

/// Unitary DFT by direct summation.
fn naive_dft(f: &[Complex64], sign: f64) -> Vec<Complex64> {
    let len = f.len();
    let scale = 1.0 / (len as f64).sqrt();
    (0..len)
        .map(|j| {
            f.iter()
                .enumerate()
                .map(|(t, &x)| x * cis(sign * 2.0 * PI * ((j * t) % len) as f64 / len as f64))
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

/// Six Hann filters on 128 bins. Coefficient counts do not all divide the
/// length and the first filter wraps around bin 0.
fn toy_system() -> NsgSystem {
    let len = 128isize;
    let half = 22usize;
    let filters = [0isize, 21, 43, 64, 85, 107]
        .iter()
        .map(|&c| {
            let values = (0..=2 * half)
                .map(|i| {
                    (PI * (i as f64 - half as f64) / (2 * half + 2) as f64)
                        .cos()
                        .powi(2)
                })
                .collect();
            Filter::new(
                values,
                (c - half as isize).rem_euclid(len) as usize,
                c as usize,
            )
        })
        .collect();
    NsgSystem::new(128, filters, vec![45, 48, 64, 45, 48, 64]).unwrap()
}

/// Spectrum of atom `n` of channel `k`, the bin index running through the
/// center: `g_k[j] e^{-2 pi i j n / M_k}`.
fn atom_spectrum(system: &NsgSystem, k: usize, n: usize) -> Vec<Complex64> {
    let len = system.signal_len();
    let g = system.filter(k);
    let m = system.coef_counts()[k] as i64;
    let back = ((g.center_bin() + len - g.support_start()) % len) as i64;
    let mut spec = vec![Complex64::new(0.0, 0.0); len];
    for (i, &v) in g.values().iter().enumerate() {
        let j = g.center_bin() as i64 - back + i as i64;
        let phase = (j * n as i64).rem_euclid(m);
        spec[j.rem_euclid(len as i64) as usize] += v * cis(-2.0 * PI * phase as f64 / m as f64);
    }
    spec
}

fn atoms(system: &NsgSystem) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    for k in 0..system.channel_count() {
        for n in 0..system.coef_counts()[k] {
            out.push(naive_dft(&atom_spectrum(system, k, n), 1.0));
        }
    }
    out
}

/// `sum_i a_i b_i^*` as a row-major `L x L` matrix.
fn outer_sum(a: &[Vec<Complex64>], b: &[Vec<Complex64>], len: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); len * len];
    for (x, y) in a.iter().zip(b) {
        for t in 0..len {
            for u in 0..len {
                m[t * len + u] += x[t] * y[u].conj();
            }
        }
    }
    m
}

fn dominant_band(c: &RaggedCoefficients) -> usize {
    let bands = (c.channel_count() - 2) / 2;
    let energy = |k: usize| c.channel(k).iter().map(Complex64::norm_sqr).sum::<f64>();
    (1..=bands)
        .max_by(|&a, &b| energy(a).total_cmp(&energy(b)))
        .unwrap()
}

fn full_length_reconstruction() -> Outcome {
    let start = Instant::now();
    let params = CqParams::default();
    let mut planner = RustFftPlanner::new();
    let mut rng = rng(1);
    let mut worst = 0.0f64;
    for len in [1 << 10, 3 << 10, 1 << 14] {
        let nsgt = NsgTransform::new(
            build_cq_system(&params, len).map_err(|e| e.to_string())?,
            &mut planner,
        )
        .map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let f = random_complex(&mut rng, len);
            let g = nsgt.synthesize(&nsgt.analyze(&f).unwrap()).unwrap();
            worst = worst.max(rel_err(&g, &f));
        }
    }
    let elapsed = start.elapsed();
    ensure(
        worst <= 1e-10 && elapsed < Duration::from_secs(30),
        format!(
            "max relative error {worst:.2e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn sliced_reconstruction() -> Outcome {
    let start = Instant::now();
    let params = CqParams::default();
    let len = 1 << 16;
    let mut planner = RustFftPlanner::new();
    let mut rng = rng(2);
    let mut worst = 0.0f64;
    for slice_len in [4096, 16384] {
        let n = slice_len / 2;
        let system = CqDesign::new(&params, slice_len)
            .and_then(|d| d.system())
            .map_err(|e| e.to_string())?;
        let s = Slicq::new(make_slicing_window(n, n / 8).unwrap(), system, &mut planner)
            .map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let f = random_complex(&mut rng, len);
            let g = s.synthesize(&s.analyze(&f).unwrap()).unwrap();
            worst = worst.max(rel_err(&g, &f));
        }
    }
    let elapsed = start.elapsed();
    ensure(
        worst <= 1e-10 && elapsed < Duration::from_secs(60),
        format!(
            "max relative error {worst:.2e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn dual_frame_oracle() -> Outcome {
    let system = toy_system();
    let len = system.signal_len();
    if !is_painless_frame(&system).is_frame() {
        return Err("toy system is not a painless frame".into());
    }
    let frame_op = outer_sum(&atoms(&system), &atoms(&system), len);
    let diag = frame_diagonal(&system);
    let mut op_dev = 0.0f64;
    for t in 0..len {
        for u in 0..len {
            let expected: Complex64 = (0..len)
                .map(|j| {
                    diag.values()[j]
                        * cis(2.0 * PI * ((j * (t + len - u)) % len) as f64 / len as f64)
                })
                .sum::<Complex64>()
                / len as f64;
            op_dev = op_dev.max((frame_op[t * len + u] - expected).norm());
        }
    }
    let dual = canonical_dual(&system).map_err(|e| e.to_string())?;
    let identity = outer_sum(&atoms(&dual), &atoms(&system), len);
    let mut id_dev = 0.0f64;
    for t in 0..len {
        for u in 0..len {
            let e = if t == u { 1.0 } else { 0.0 };
            id_dev = id_dev.max((identity[t * len + u] - e).norm());
        }
    }
    ensure(
        op_dev <= 1e-10 * len as f64 && id_dev <= 1e-12,
        format!("frame operator deviation {op_dev:.2e}, dual identity deviation {id_dev:.2e}"),
    )
}

fn analysis_oracle() -> Outcome {
    let system = toy_system();
    let mut planner = RustFftPlanner::new();
    let nsgt = NsgTransform::new(system.clone(), &mut planner).map_err(|e| e.to_string())?;
    let f = random_complex(&mut rng(4), 128);
    let f_hat = naive_dft(&f, -1.0);
    let c = nsgt.analyze(&f).unwrap();
    let mut worst = 0.0f64;
    for k in 0..system.channel_count() {
        for n in 0..system.coef_counts()[k] {
            let atom = atom_spectrum(&system, k, n);
            let direct: Complex64 = f_hat.iter().zip(&atom).map(|(x, y)| x * y.conj()).sum();
            worst = worst.max((c.channel(k)[n] - direct).norm());
        }
    }
    ensure(worst <= 1e-10, format!("max deviation {worst:.2e}"))
}

fn residual_bound_holds() -> Outcome {
    let params = CqParams {
        min_freq: 200.0,
        max_freq: 2000.0,
        sample_rate: 8000.0,
        bins_per_octave: 12,
        min_filter_len: 4,
        ..Default::default()
    };
    let (n, m, len) = (128, 32, 1024);
    let design = CqDesign::new(&params, 2 * n).map_err(|e| e.to_string())?;
    let full = design.refined_system(len).map_err(|e| e.to_string())?;
    let mut planner = RustFftPlanner::new();
    let s = Slicq::new(
        make_slicing_window(n, m).unwrap(),
        design.system().unwrap(),
        &mut planner,
    )
    .unwrap();
    let nsgt = NsgTransform::new(full.clone(), &mut planner).map_err(|e| e.to_string())?;
    let bound = residual_bound(&full, s.window(), &mut planner).map_err(|e| e.to_string())?;
    let mut rng = rng(5);
    let (mut violations, mut checked) = (0usize, 0usize);
    for _ in 0..5 {
        let f = random_complex(&mut rng, len);
        let fnorm = f.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        let report =
            approximation_error(&nsgt.analyze(&f).unwrap(), &s.analyze(&f).unwrap()).unwrap();
        for (res, b) in report.residual.channels().iter().zip(&bound) {
            for (r, b) in res.iter().zip(b) {
                checked += 1;
                if r.norm() > fnorm * b * (1.0 + 1e-9) + 1e-12 * fnorm {
                    violations += 1;
                }
            }
        }
    }
    ensure(
        violations == 0,
        format!("{violations} violations in {checked} coefficients"),
    )
}

fn approximation_trend() -> Outcome {
    let config = ApproxConfig::default();
    let rows = run_approximation(&config).map_err(|e| e.to_string())?;
    let mut details = Vec::new();
    let mut ok = true;
    for &divisor in &config.transition_divisors {
        let transition = config.slice_lens[0] / 2 / divisor;
        let snr: Vec<(usize, f64)> = config
            .min_filter_lens
            .iter()
            .map(|&mfl| {
                let row = rows
                    .iter()
                    .find(|r| r.min_filter_len == mfl && r.transition_len == transition)
                    .unwrap();
                (mfl, row.snr_db)
            })
            .collect();
        let at = |mfl: usize| snr.iter().find(|p| p.0 == mfl).unwrap().1;
        let drops: Vec<f64> = snr
            .windows(2)
            .map(|w| w[0].1 - w[1].1)
            .filter(|&d| d > 0.0)
            .collect();
        ok &= at(16) > at(8) && drops.len() <= 1 && drops.iter().all(|&d| d <= 0.5);
        let listed: Vec<String> = snr.iter().map(|(m, s)| format!("{m}:{s:.1}")).collect();
        details.push(format!("transition {transition}: {} dB", listed.join(" ")));
    }
    ensure(
        ok,
        format!("{} signals, {}", config.signals, details.join("; ")),
    )
}

fn runtime_scaling() -> Outcome {
    let start = Instant::now();
    let config = ScalingConfig {
        lengths: (15..=21).map(|e| 1 << e).collect(),
        iters: 5,
        ..Default::default()
    };
    let result = run_scaling(&config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let sliced = result.slope(Variant::Slicq).unwrap();
    let full = result.slope(Variant::CqNsgt).unwrap();
    ensure(
        (0.85..=1.15).contains(&sliced)
            && full >= 0.95
            && full >= sliced - 0.05
            && elapsed < Duration::from_secs(300),
        format!(
            "sliCQ slope {sliced:.3}, CQ-NSGT slope {full:.3}, {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn transposition_semantics() -> Outcome {
    let params = CqParams::default();
    let len = 1 << 16;
    let mut planner = RustFftPlanner::new();
    let nsgt = NsgTransform::new(
        build_cq_system(&params, len).map_err(|e| e.to_string())?,
        &mut planner,
    )
    .map_err(|e| e.to_string())?;
    let bands = (nsgt.system().channel_count() - 2) / 2;
    let mut details = Vec::new();
    let mut ok = true;
    for k in [120, 200] {
        let bin = nsgt.system().filter(k).center_bin();
        let f: Vec<f64> = (0..len)
            .map(|l| (2.0 * PI * ((bin * l) % len) as f64 / len as f64).cos())
            .collect();
        let c = nsgt.real_analyze(&f).unwrap();
        ok &= dominant_band(&c) == k;
        for shift in [8i64, 48] {
            let t = Transposition::whole(shift, bands, true).map_err(|e| e.to_string())?;
            let moved = transpose_coefficients(nsgt.system(), &c, &t, &mut planner)
                .map_err(|e| e.to_string())?;
            let again = nsgt
                .real_analyze(&nsgt.real_synthesize(&moved).unwrap())
                .unwrap();
            let found = dominant_band(&again);
            ok &= found as i64 == k as i64 + shift;
            details.push(format!("{k}{shift:+} -> {found}"));
        }
    }
    ensure(ok, details.join(", "))
}

fn slicing_window_presets() -> Outcome {
    let mut worst = 0.0f64;
    for &(n, m) in WINDOW_PRESETS.iter() {
        let window = make_slicing_window(n, m).map_err(|e| e.to_string())?;
        let dual = dual_slicing_window(&window);
        for len in [2 * n, 8 * n] {
            worst = worst.max(window.partition_deviation(len).map_err(|e| e.to_string())?);
            worst = worst.max(
                window
                    .dual_deviation(&dual, len)
                    .map_err(|e| e.to_string())?,
            );
        }
    }
    ensure(
        worst <= 1e-12,
        format!(
            "{} presets, max deviation {worst:.2e}",
            WINDOW_PRESETS.len()
        ),
    )
}

fn constant_q_layout() -> Outcome {
    let params = CqParams {
        min_freq: 50.0,
        max_freq: 20_000.0,
        sample_rate: 44_100.0,
        bins_per_octave: 48,
        ..Default::default()
    };
    let layout = cq_layout(&params).map_err(|e| e.to_string())?;
    let q_direct = 1.0 / (2f64.powf(1.0 / 48.0) - 2f64.powf(-1.0 / 48.0));
    let k = layout.bands;
    let mirrored = (0..layout.channel_count()).all(|c| {
        let p = layout.mirror(c);
        layout.mirror(p) == c
            && layout.bandwidths[p] == layout.bandwidths[c]
            && (c == 0
                || c > k
                || layout.center_freqs[p] == params.sample_rate - layout.center_freqs[c])
    });
    ensure(
        k == 416
            && layout.channel_count() == 834
            && layout.center_freqs[0] == 0.0
            && layout.center_freqs[k + 1] == 22_050.0
            && mirrored
            && (q_direct - 34.62).abs() < 5e-3
            && (layout.q - q_direct).abs() <= 1e-9,
        format!(
            "K = {k}, {} channels, Q = {:.6}, mirror symmetric: {mirrored}",
            layout.channel_count(),
            layout.q
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        (
            "full-length perfect reconstruction",
            full_length_reconstruction,
        ),
        ("sliced perfect reconstruction", sliced_reconstruction),
        ("painless dual-frame oracle", dual_frame_oracle),
        ("analysis inner-product oracle", analysis_oracle),
        ("slicing residual bound", residual_bound_holds),
        (
            "approximation trend over min_filter_len",
            approximation_trend,
        ),
        ("runtime scaling", runtime_scaling),
        ("transposition semantics", transposition_semantics),
        ("slicing window partition and dual", slicing_window_presets),
        ("constant-Q layout", constant_q_layout),
    ];
    let mut failed = Vec::new();
    println!();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL {:>2} {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
