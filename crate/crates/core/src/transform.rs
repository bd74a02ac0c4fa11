//! Full-length analysis and synthesis with a painless system.
//!
//! With the unitary DFT `f^ = F f`, channel `k` holds
//! `c_k[n] = sum_j f^[j] g_k[j] e^{2 pi i j n / M_k}`, the inner product of
//! `f^` with the modulated filter. Because the filter support fits into
//! `M_k` bins, the product is scattered modulo `M_k` and one inverse FFT of
//! length `M_k` yields the whole channel.
//!
//! The bin index `j` runs over the support as a contiguous signed range
//! around the center bin, so a support reaching below bin 0 continues with
//! `j < 0` and one reaching past `L` continues with `j >= L`. When `M_k`
//! divides `L` this is the same as reducing `j` modulo `L`; otherwise it
//! keeps the frame operator diagonal for every painless system and makes
//! refined systems sample the same atoms.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{Fft, FftPlanner};
use crate::frame::NsgSystem;
use crate::math::sqrt;

/// Per-channel coefficient vectors of differing lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct RaggedCoefficients {
    channels: Vec<Vec<Complex64>>,
    signal_len: usize,
}

impl RaggedCoefficients {
    pub fn new(channels: Vec<Vec<Complex64>>, signal_len: usize) -> Self {
        Self {
            channels,
            signal_len,
        }
    }

    pub fn zeros(lens: &[usize], signal_len: usize) -> Self {
        let channels = lens
            .iter()
            .map(|&m| vec![Complex64::new(0.0, 0.0); m])
            .collect();
        Self {
            channels,
            signal_len,
        }
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, k: usize) -> &[Complex64] {
        &self.channels[k]
    }

    pub fn channel_mut(&mut self, k: usize) -> &mut [Complex64] {
        &mut self.channels[k]
    }

    pub fn channels(&self) -> &[Vec<Complex64>] {
        &self.channels
    }

    pub fn channels_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<Complex64>> {
        self.channels
    }

    pub fn lens(&self) -> Vec<usize> {
        self.channels.iter().map(Vec::len).collect()
    }

    pub fn coef_total(&self) -> usize {
        self.channels.iter().map(Vec::len).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.channels
            .iter()
            .flatten()
            .map(Complex64::norm_sqr)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        sqrt(self.norm_sqr())
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.channels.len() == other.channels.len()
            && self
                .channels
                .iter()
                .zip(&other.channels)
                .all(|(a, b)| a.len() == b.len())
    }

    /// `||self - other||_2`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch("coefficient layouts differ".into()));
        }
        let sum: f64 = self
            .channels
            .iter()
            .flatten()
            .zip(other.channels.iter().flatten())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok(sqrt(sum))
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.channels
            .iter_mut()
            .flatten()
            .for_each(|c| *c *= factor);
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch("coefficient layouts differ".into()));
        }
        for (a, b) in self
            .channels
            .iter_mut()
            .flatten()
            .zip(other.channels.iter().flatten())
        {
            *a += b;
        }
        Ok(())
    }
}

/// Planned analysis/synthesis operator for one system and its dual.
#[derive(Clone)]
pub struct NsgTransform<F> {
    system: NsgSystem,
    dual: NsgSystem,
    full: F,
    plans: Vec<F>,
    channel_plan: Vec<usize>,
}

impl<F: Fft + Clone> NsgTransform<F> {
    /// Uses the canonical dual; fails with [`Error::NotAFrame`] otherwise.
    pub fn new<P: FftPlanner<Plan = F>>(system: NsgSystem, planner: &mut P) -> Result<Self> {
        let dual = system.canonical_dual()?;
        Self::with_dual(system, dual, planner)
    }

    pub fn with_dual<P: FftPlanner<Plan = F>>(
        system: NsgSystem,
        dual: NsgSystem,
        planner: &mut P,
    ) -> Result<Self> {
        if dual.signal_len() != system.signal_len() || dual.coef_counts() != system.coef_counts() {
            return Err(Error::ShapeMismatch(
                "dual system does not match the analysis system".into(),
            ));
        }
        let full = planner.plan(system.signal_len());
        let mut by_len = BTreeMap::new();
        let mut plans = Vec::new();
        let mut channel_plan = Vec::with_capacity(system.channel_count());
        for &m in system.coef_counts() {
            let idx = *by_len.entry(m).or_insert_with(|| {
                plans.push(planner.plan(m));
                plans.len() - 1
            });
            channel_plan.push(idx);
        }
        Ok(Self {
            system,
            dual,
            full,
            plans,
            channel_plan,
        })
    }

    pub fn system(&self) -> &NsgSystem {
        &self.system
    }

    pub fn dual(&self) -> &NsgSystem {
        &self.dual
    }

    pub fn signal_len(&self) -> usize {
        self.system.signal_len()
    }

    pub fn coef_counts(&self) -> &[usize] {
        self.system.coef_counts()
    }

    pub fn analyze(&self, f: &[Complex64]) -> Result<RaggedCoefficients> {
        let len = self.signal_len();
        if f.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                found: f.len(),
            });
        }
        let mut spec = f.to_vec();
        self.full.forward(&mut spec);
        let scale = 1.0 / sqrt(len as f64);
        spec.iter_mut().for_each(|v| *v *= scale);
        Ok(self.analyze_spectrum(&spec))
    }

    /// Analysis of an already transformed (unitary DFT) signal.
    pub fn analyze_spectrum(&self, spec: &[Complex64]) -> RaggedCoefficients {
        let len = self.signal_len();
        let channels = self
            .system
            .filters()
            .iter()
            .zip(self.system.coef_counts())
            .zip(&self.channel_plan)
            .map(|((g, &m), &p)| {
                let mut buf = vec![Complex64::new(0.0, 0.0); m];
                let mut slot = g.unwrapped_start(len).rem_euclid(m as i64) as usize;
                for (bin, v) in g.support(len) {
                    buf[slot] += spec[bin] * v;
                    slot += 1;
                    if slot == m {
                        slot = 0;
                    }
                }
                self.plans[p].inverse(&mut buf);
                buf
            })
            .collect();
        RaggedCoefficients::new(channels, len)
    }

    pub fn synthesize(&self, c: &RaggedCoefficients) -> Result<Vec<Complex64>> {
        let mut out = self.synthesize_spectrum(c)?;
        self.full.inverse(&mut out);
        let scale = 1.0 / sqrt(self.signal_len() as f64);
        out.iter_mut().for_each(|v| *v *= scale);
        Ok(out)
    }

    /// Synthesis up to, but excluding, the final inverse DFT.
    pub fn synthesize_spectrum(&self, c: &RaggedCoefficients) -> Result<Vec<Complex64>> {
        let len = self.signal_len();
        self.check_shape(c)?;
        let mut spec = vec![Complex64::new(0.0, 0.0); len];
        let mut buf = Vec::new();
        for ((g, coefs), &p) in self
            .dual
            .filters()
            .iter()
            .zip(c.channels())
            .zip(&self.channel_plan)
        {
            let m = coefs.len();
            buf.clear();
            buf.extend_from_slice(coefs);
            self.plans[p].forward(&mut buf);
            let mut slot = g.unwrapped_start(len).rem_euclid(m as i64) as usize;
            for (bin, v) in g.support(len) {
                spec[bin] += buf[slot] * v;
                slot += 1;
                if slot == m {
                    slot = 0;
                }
            }
        }
        Ok(spec)
    }

    pub fn real_analyze(&self, f: &[f64]) -> Result<RaggedCoefficients> {
        let f: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.analyze(&f)
    }

    /// Synthesis for coefficients of a real signal; the imaginary part is
    /// checked against `1e-9 * ||output||_2` and dropped.
    pub fn real_synthesize(&self, c: &RaggedCoefficients) -> Result<Vec<f64>> {
        let out = self.synthesize(c)?;
        real_part_checked(&out)
    }

    fn check_shape(&self, c: &RaggedCoefficients) -> Result<()> {
        if c.channel_count() != self.system.channel_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficient channels for a {}-channel system",
                c.channel_count(),
                self.system.channel_count()
            )));
        }
        for (k, (coefs, &m)) in c.channels().iter().zip(self.coef_counts()).enumerate() {
            if coefs.len() != m {
                return Err(Error::ShapeMismatch(format!(
                    "channel {k} has {} coefficients, expected {m}",
                    coefs.len()
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn real_part_checked(out: &[Complex64]) -> Result<Vec<f64>> {
    let norm = sqrt(out.iter().map(Complex64::norm_sqr).sum::<f64>());
    let bound = 1e-9 * norm;
    let max_imag = out.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if max_imag > bound {
        return Err(Error::NonRealResult { max_imag, bound });
    }
    Ok(out.iter().map(|v| v.re).collect())
}

/// One-shot analysis with the system's canonical dual planned on the fly.
pub fn analyze<P: FftPlanner>(
    system: &NsgSystem,
    f: &[Complex64],
    planner: &mut P,
) -> Result<RaggedCoefficients> {
    NsgTransform::new(system.clone(), planner)?.analyze(f)
}

/// One-shot synthesis with an explicit dual system.
pub fn synthesize<P: FftPlanner>(
    c: &RaggedCoefficients,
    dual: &NsgSystem,
    planner: &mut P,
) -> Result<Vec<Complex64>> {
    NsgTransform::with_dual(dual.clone(), dual.clone(), planner)?.synthesize(c)
}
