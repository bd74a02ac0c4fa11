//! Runtime scaling and slice approximation experiments.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicq_core::{
    approximation_error, build_cq_system, make_slicing_window, CqDesign, CqParams, NsgTransform,
    RustFftPlanner, Slicq,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Variant {
    CqNsgt,
    Slicq,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::CqNsgt => "cq-nsgt",
            Variant::Slicq => "slicq",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScalingConfig {
    pub variants: Vec<Variant>,
    pub lengths: Vec<usize>,
    pub iters: usize,
    /// Extra full-length run at a prime length, reported but not fitted.
    pub prime_len: Option<usize>,
    pub slice_len: usize,
    pub transition: usize,
    pub params: CqParams,
    pub seed: u64,
    /// Above 1, also time this many concurrent roundtrips per iteration.
    /// These throughput rows are reported separately and not fitted.
    pub threads: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            variants: vec![Variant::CqNsgt, Variant::Slicq],
            lengths: (14..=20).map(|e| 1 << e).collect(),
            iters: 50,
            prime_len: None,
            slice_len: 16384,
            transition: 1024,
            params: CqParams::default(),
            seed: 1,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub variant: Variant,
    pub len: usize,
    pub mean_seconds: f64,
    pub variance: f64,
    pub slice_len: Option<usize>,
    pub outlier: bool,
    /// Concurrent roundtrips per timed run; `mean_seconds` is wall time per
    /// roundtrip.
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingResult {
    pub rows: Vec<ScalingRow>,
}

impl ScalingResult {
    /// Least-squares slope of `log(time)` against `log(L)` over serial rows,
    /// outliers excluded.
    pub fn slope(&self, variant: Variant) -> Option<f64> {
        let points: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.variant == variant && !r.outlier && r.threads == 1)
            .map(|r| ((r.len as f64).ln(), r.mean_seconds.ln()))
            .collect();
        log_log_slope(&points)
    }

    /// `variant,length,mean_ms,variance,slice_len,outlier,threads`; variance
    /// in ms^2.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variant,length,mean_ms,variance,slice_len,outlier,threads\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{},{},{}",
                r.variant.name(),
                r.len,
                r.mean_seconds * 1e3,
                r.variance * 1e6,
                r.slice_len.map(|s| s.to_string()).unwrap_or_default(),
                r.outlier,
                r.threads
            );
        }
        out
    }
}

pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn random_signal(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Mean and variance of `iters` timed runs after one discarded warm-up run.
fn time_runs(iters: usize, mut run: impl FnMut() -> Result<()>) -> Result<(f64, f64)> {
    run()?;
    let mut times = Vec::with_capacity(iters);
    for _ in 0..iters.max(1) {
        let start = Instant::now();
        run()?;
        times.push(start.elapsed().as_secs_f64());
    }
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / times.len() as f64;
    Ok((mean, var))
}

/// Runs `roundtrip` on `threads` threads at once; the error of any thread
/// is returned.
fn run_concurrently(threads: usize, roundtrip: &(dyn Fn() -> Result<()> + Sync)) -> Result<()> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads).map(|_| scope.spawn(roundtrip)).collect();
        handles
            .into_iter()
            .try_for_each(|h| h.join().expect("benchmark thread panicked"))
    })
}

/// Times analysis plus synthesis. Filterbanks and duals are built before
/// the clock starts.
pub fn run_scaling(config: &ScalingConfig) -> Result<ScalingResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut planner = RustFftPlanner::new();
    let mut rows = Vec::new();
    let n = config.slice_len / 2;
    let threads = config.threads.max(1);
    for &variant in &config.variants {
        let mut lengths: Vec<(usize, bool)> = config.lengths.iter().map(|&l| (l, false)).collect();
        if variant == Variant::CqNsgt {
            lengths.extend(config.prime_len.map(|p| (p, true)));
        }
        for (len, outlier) in lengths {
            let f = random_signal(&mut rng, len);
            let roundtrip: Box<dyn Fn() -> Result<()> + Sync> = match variant {
                Variant::CqNsgt => {
                    let nsgt =
                        NsgTransform::new(build_cq_system(&config.params, len)?, &mut planner)?;
                    let f = f.clone();
                    Box::new(move || {
                        let c = nsgt.analyze(&f)?;
                        std::hint::black_box(nsgt.synthesize(&c)?);
                        Ok(())
                    })
                }
                Variant::Slicq => {
                    if len % config.slice_len != 0 {
                        return Err(CliError::Usage(format!(
                            "length {len} is not a multiple of the slice length {}",
                            config.slice_len
                        )));
                    }
                    let system = CqDesign::new(&config.params, config.slice_len)?.system()?;
                    let slicq = Slicq::new(
                        make_slicing_window(n, config.transition)?,
                        system,
                        &mut planner,
                    )?;
                    let f = f.clone();
                    Box::new(move || {
                        let s = slicq.analyze(&f)?;
                        std::hint::black_box(slicq.synthesize(&s)?);
                        Ok(())
                    })
                }
            };
            let slice_len = (variant == Variant::Slicq).then_some(config.slice_len);
            let (mean_seconds, variance) = time_runs(config.iters, &roundtrip)?;
            rows.push(ScalingRow {
                variant,
                len,
                mean_seconds,
                variance,
                slice_len,
                outlier,
                threads: 1,
            });
            if threads > 1 {
                let (mean, var) = time_runs(config.iters, || {
                    run_concurrently(threads, roundtrip.as_ref())
                })?;
                let per = threads as f64;
                rows.push(ScalingRow {
                    variant,
                    len,
                    mean_seconds: mean / per,
                    variance: var / (per * per),
                    slice_len,
                    outlier,
                    threads,
                });
            }
        }
    }
    Ok(ScalingResult { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SignalSet {
    /// Uniform random complex samples.
    Random,
    /// Real harmonic tones with decaying noise bursts.
    Synthetic,
}

#[derive(Debug, Clone)]
pub struct ApproxConfig {
    pub len: usize,
    pub signals: usize,
    pub set: SignalSet,
    pub slice_lens: Vec<usize>,
    /// The transition is `N / divisor` for each divisor.
    pub transition_divisors: Vec<usize>,
    pub min_filter_lens: Vec<usize>,
    pub params: CqParams,
    pub seed: u64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            len: 1 << 17,
            signals: 20,
            set: SignalSet::Random,
            slice_lens: vec![16384],
            transition_divisors: vec![4, 128],
            min_filter_lens: vec![4, 8, 16, 32, 64],
            params: CqParams::default(),
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxRow {
    pub min_filter_len: usize,
    pub slice_len: usize,
    pub transition_len: usize,
    /// Mean SNR over the signal set, in dB.
    pub snr_db: f64,
    pub snr_variance: f64,
}

pub fn approx_csv(rows: &[ApproxRow]) -> String {
    let mut out = String::from("min_filter_len,slice_len,transition_len,snr_db,snr_variance\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.4},{:.6}",
            r.min_filter_len, r.slice_len, r.transition_len, r.snr_db, r.snr_variance
        );
    }
    out
}

fn synthetic_signal(rng: &mut ChaCha8Rng, len: usize, rate: f64) -> Vec<Complex64> {
    let mut f = vec![0.0; len];
    let f0 = rng.gen_range(80.0..800.0);
    for h in 1..=12 {
        let freq = f0 * h as f64;
        if freq >= rate / 2.0 {
            break;
        }
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let amp = 1.0 / h as f64;
        for (t, v) in f.iter_mut().enumerate() {
            *v += amp * (std::f64::consts::TAU * freq * t as f64 / rate + phase).sin();
        }
    }
    for _ in 0..8 {
        let at = rng.gen_range(0..len);
        let decay = rng.gen_range(50.0..500.0);
        for (i, v) in f[at..(at + 4000).min(len)].iter_mut().enumerate() {
            *v += rng.gen_range(-2.0..2.0) * (-(i as f64) / decay).exp();
        }
    }
    f.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
}

/// Mean SNR between the full-length transform (with the slice filterbank
/// sampled on the fine grid) and the sliced transform.
pub fn run_approximation(config: &ApproxConfig) -> Result<Vec<ApproxRow>> {
    let mut planner = RustFftPlanner::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let signals: Vec<Vec<Complex64>> = (0..config.signals)
        .map(|_| match config.set {
            SignalSet::Random => random_signal(&mut rng, config.len),
            SignalSet::Synthetic => {
                synthetic_signal(&mut rng, config.len, config.params.sample_rate)
            }
        })
        .collect();
    let mut rows = Vec::new();
    for &slice_len in &config.slice_lens {
        let n = slice_len / 2;
        for &div in &config.transition_divisors {
            let transition = n / div;
            let window = make_slicing_window(n, transition)?;
            for &min_filter_len in &config.min_filter_lens {
                let params = CqParams {
                    min_filter_len,
                    ..config.params
                };
                let design = CqDesign::new(&params, slice_len)?;
                let full = NsgTransform::new(design.refined_system(config.len)?, &mut planner)?;
                let slicq = Slicq::new(window.clone(), design.system()?, &mut planner)?;
                let snrs = signals
                    .iter()
                    .map(|f| Ok(approximation_error(&full.analyze(f)?, &slicq.analyze(f)?)?.snr_db))
                    .collect::<Result<Vec<f64>>>()?;
                let mean = snrs.iter().sum::<f64>() / snrs.len() as f64;
                let var = snrs.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / snrs.len() as f64;
                rows.push(ApproxRow {
                    min_filter_len,
                    slice_len,
                    transition_len: transition,
                    snr_db: mean,
                    snr_variance: var,
                });
            }
        }
    }
    Ok(rows)
}
