//! Constant-Q filterbank design.
//!
//! Center frequencies are geometric between `min_freq` and the first band at
//! or above `max_freq`; bandwidths keep `Q = center / bandwidth` fixed. The
//! bands are mirrored above Nyquist so real signals produce conjugate channel
//! pairs, and two plateau filters close the gaps around DC and Nyquist.
//!
//! Channel order (with `K` geometric bands): `0` is the DC plateau, `1..=K`
//! the geometric bands, `K + 1` the Nyquist plateau, `K + 2..=2K + 1` the
//! mirrored bands, channel `k` mirroring `2K + 2 - k`.

use alloc::format;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::frame::{is_painless_frame, Filter, NsgSystem};
use crate::math::{ceil, cos, exp2, floor, log2, round, sqrt, PI};

/// Shape `H` of the band filters, supported on `]-1/2, 1/2[`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowShape {
    #[default]
    Hann,
    BlackmanHarris,
}

impl WindowShape {
    pub fn eval(self, t: f64) -> f64 {
        if !(t > -0.5 && t < 0.5) {
            return 0.0;
        }
        match self {
            WindowShape::Hann => {
                let c = cos(PI * t);
                c * c
            }
            WindowShape::BlackmanHarris => {
                let x = 2.0 * PI * t;
                0.35875 + 0.48829 * cos(x) + 0.14128 * cos(2.0 * x) + 0.01168 * cos(3.0 * x)
            }
        }
    }

    /// Positive `t` at which the shape falls to half its peak.
    pub fn half_height(self) -> f64 {
        match self {
            WindowShape::Hann => 0.25,
            WindowShape::BlackmanHarris => {
                let (mut lo, mut hi) = (0.0, 0.5);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if self.eval(mid) > 0.5 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WindowShape::Hann => "hann",
            WindowShape::BlackmanHarris => "blackman_harris",
        }
    }
}

impl FromStr for WindowShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hann" => Ok(WindowShape::Hann),
            "blackman_harris" | "blackman-harris" => Ok(WindowShape::BlackmanHarris),
            other => Err(Error::InvalidParams(format!(
                "unknown window shape {other:?}"
            ))),
        }
    }
}

/// Design parameters. Frequencies are in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqParams {
    pub min_freq: f64,
    pub max_freq: f64,
    pub sample_rate: f64,
    pub bins_per_octave: u32,
    pub shape: WindowShape,
    /// Lower bound on every band filter's support, in bins.
    pub min_filter_len: usize,
}

impl Default for CqParams {
    fn default() -> Self {
        Self {
            min_freq: 50.0,
            max_freq: 20_000.0,
            sample_rate: 44_100.0,
            bins_per_octave: 48,
            shape: WindowShape::Hann,
            min_filter_len: 16,
        }
    }
}

impl CqParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.min_freq > 0.0
            && self.min_freq < self.max_freq
            && self.max_freq < self.sample_rate / 2.0
            && self.sample_rate.is_finite();
        if !ok {
            return Err(Error::InvalidParams(format!(
                "need 0 < min_freq < max_freq < sample_rate/2, got {} / {} / {}",
                self.min_freq, self.max_freq, self.sample_rate
            )));
        }
        if self.bins_per_octave == 0 {
            return Err(Error::InvalidParams(
                "bins_per_octave must be at least 1".into(),
            ));
        }
        if self.min_filter_len == 0 {
            return Err(Error::InvalidParams(
                "min_filter_len must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// `Q = (2^{1/B} - 2^{-1/B})^{-1}`.
    pub fn q_factor(&self) -> f64 {
        let b = self.bins_per_octave as f64;
        1.0 / (exp2(1.0 / b) - exp2(-1.0 / b))
    }

    fn band_freq(&self, k: usize) -> f64 {
        self.min_freq * exp2((k as f64 - 1.0) / self.bins_per_octave as f64)
    }
}

/// Center frequencies and bandwidths for all `2K + 2` channels.
#[derive(Debug, Clone, PartialEq)]
pub struct CqLayout {
    pub center_freqs: Vec<f64>,
    pub bandwidths: Vec<f64>,
    /// Number of geometric bands `K`.
    pub bands: usize,
    pub q: f64,
}

impl CqLayout {
    pub fn channel_count(&self) -> usize {
        2 * self.bands + 2
    }

    /// Partner channel under mirroring at Nyquist; plateaus are their own partners.
    pub fn mirror(&self, k: usize) -> usize {
        mirror_channel(self.bands, k)
    }
}

pub(crate) fn mirror_channel(bands: usize, k: usize) -> usize {
    if k == 0 || k == bands + 1 {
        k
    } else {
        2 * bands + 2 - k
    }
}

pub fn cq_layout(params: &CqParams) -> Result<CqLayout> {
    params.validate()?;
    let b = params.bins_per_octave as f64;
    let q = params.q_factor();

    // Smallest K with band_freq(K) >= max_freq; the log estimate can be off
    // by one in floating point, so settle it by direct evaluation.
    let mut bands = 1 + ceil(b * log2(params.max_freq / params.min_freq)).max(0.0) as usize;
    while bands > 1 && params.band_freq(bands - 1) >= params.max_freq {
        bands -= 1;
    }
    while params.band_freq(bands) < params.max_freq {
        bands += 1;
    }

    let top = params.band_freq(bands);
    let nyquist = params.sample_rate / 2.0;
    if top >= nyquist {
        return Err(Error::InvalidParams(format!(
            "top band {top:.3} Hz reaches Nyquist {nyquist} Hz; lower max_freq or bins_per_octave"
        )));
    }
    if params.sample_rate - 2.0 * top <= 0.0 {
        return Err(Error::InvalidParams(
            "Nyquist plateau has no bandwidth".into(),
        ));
    }

    let count = 2 * bands + 2;
    let mut center_freqs = Vec::with_capacity(count);
    let mut bandwidths = Vec::with_capacity(count);
    center_freqs.push(0.0);
    bandwidths.push(2.0 * params.min_freq);
    for k in 1..=bands {
        let xi = params.band_freq(k);
        center_freqs.push(xi);
        bandwidths.push(xi / q);
    }
    center_freqs.push(nyquist);
    bandwidths.push(params.sample_rate - 2.0 * top);
    for k in bands + 2..count {
        let partner = 2 * bands + 2 - k;
        center_freqs.push(params.sample_rate - center_freqs[partner]);
        bandwidths.push(center_freqs[partner] / q);
    }
    Ok(CqLayout {
        center_freqs,
        bandwidths,
        bands,
        q,
    })
}

/// Continuous frequency response of one channel, in bins of the design length.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Profile {
    /// `H((x - center) / width)` with an odd `width`.
    Band { center: usize, width: usize },
    /// 1 for `|x - center| <= flat`, a cosine-squared ramp to 0 at `edge`.
    /// `center2` is twice the center so Nyquist of odd lengths is exact.
    Plateau {
        center2: usize,
        flat: f64,
        edge: f64,
    },
}

/// A constant-Q filterbank laid out on the bins of a base length. Besides the
/// system at that length it can emit finer samplings of the same responses
/// at integer multiples of the base length.
#[derive(Debug, Clone)]
pub struct CqDesign {
    params: CqParams,
    layout: CqLayout,
    base_len: usize,
    profiles: Vec<Profile>,
    base_coef_counts: Vec<usize>,
}

impl CqDesign {
    pub fn new(params: &CqParams, len: usize) -> Result<Self> {
        let layout = cq_layout(params)?;
        let bands = layout.bands;
        let scale = len as f64 / params.sample_rate;

        let mut band_centers = Vec::with_capacity(bands + 1);
        let mut band_widths = Vec::with_capacity(bands + 1);
        band_centers.push(0);
        band_widths.push(0);
        for k in 1..=bands {
            let center = round(layout.center_freqs[k] * scale) as usize;
            let nominal = ceil(layout.bandwidths[k] * scale - 1e-9).max(1.0) as usize;
            let mut width = nominal.max(params.min_filter_len);
            if width % 2 == 0 {
                width += 1;
            }
            if width > len {
                return Err(Error::DesignFailure(format!(
                    "band {k} needs {width} bins but the signal has only {len}"
                )));
            }
            band_centers.push(center);
            band_widths.push(width);
        }

        let first = band_centers[1];
        let last = band_centers[bands];
        if first == 0 {
            return Err(Error::DesignFailure(format!(
                "length {len} too short: lowest band sits on DC"
            )));
        }
        if 2 * last >= len {
            return Err(Error::DesignFailure(format!(
                "length {len} too short: top band reaches Nyquist"
            )));
        }

        let half = params.shape.half_height();
        let mut profiles = Vec::with_capacity(2 * bands + 2);
        let dc_edge = first as f64;
        profiles.push(Profile::Plateau {
            center2: 0,
            flat: (dc_edge - band_widths[1] as f64 * half).max(0.0),
            edge: dc_edge,
        });
        for k in 1..=bands {
            profiles.push(Profile::Band {
                center: band_centers[k],
                width: band_widths[k],
            });
        }
        let ny_edge = len as f64 / 2.0 - last as f64;
        profiles.push(Profile::Plateau {
            center2: len,
            flat: (ny_edge - band_widths[bands] as f64 * half).max(0.0),
            edge: ny_edge,
        });
        for k in (1..=bands).rev() {
            profiles.push(Profile::Band {
                center: len - band_centers[k],
                width: band_widths[k],
            });
        }

        let mut design = Self {
            params: *params,
            layout,
            base_len: len,
            profiles,
            base_coef_counts: Vec::new(),
        };
        let supports: Vec<usize> = (0..design.profiles.len())
            .map(|k| design.sample_filter(k, 1, 1.0).support_len())
            .collect();
        design.base_coef_counts = supports.iter().map(|&s| coef_count_for(s, len)).collect();
        Ok(design)
    }

    pub fn params(&self) -> &CqParams {
        &self.params
    }

    pub fn layout(&self) -> &CqLayout {
        &self.layout
    }

    pub fn base_len(&self) -> usize {
        self.base_len
    }

    pub fn coef_counts(&self) -> &[usize] {
        &self.base_coef_counts
    }

    /// The filterbank sampled at the base length.
    pub fn system(&self) -> Result<NsgSystem> {
        self.sample(1, 1.0)
    }

    /// The same continuous responses sampled on `len = r * base_len` bins, so
    /// that `refined[j * r] * sqrt(r) == base[j]`. Coefficient counts scale by
    /// `r`. The amplitude factor `1/sqrt(r)` compensates for the unitary DFT
    /// normalization, so coefficients of the refined system line up with
    /// slice coefficients of the base system.
    pub fn refined_system(&self, len: usize) -> Result<NsgSystem> {
        if len == 0 || len % self.base_len != 0 {
            return Err(Error::InvalidParams(format!(
                "refined length {len} is not a multiple of the design length {}",
                self.base_len
            )));
        }
        let ratio = len / self.base_len;
        self.sample(ratio, 1.0 / sqrt(ratio as f64))
    }

    fn sample(&self, ratio: usize, amplitude: f64) -> Result<NsgSystem> {
        let len = self.base_len * ratio;
        let filters: Vec<Filter> = (0..self.profiles.len())
            .map(|k| self.sample_filter(k, ratio, amplitude))
            .collect();
        let counts = self.base_coef_counts.iter().map(|m| m * ratio).collect();
        let system = NsgSystem::new(len, filters, counts)?;
        if let Some(v) = is_painless_frame(&system).violation {
            return Err(Error::DesignFailure(format!(
                "filterbank at length {len} is not a frame: {v}"
            )));
        }
        Ok(system)
    }

    fn sample_filter(&self, k: usize, ratio: usize, amplitude: f64) -> Filter {
        let len = self.base_len * ratio;
        match self.profiles[k] {
            Profile::Band { center, width } => {
                let span = width * ratio;
                let half = (span - 1) / 2;
                let center = (center * ratio) % len;
                let values = (0..=2 * half)
                    .map(|i| {
                        amplitude
                            * self
                                .params
                                .shape
                                .eval((i as f64 - half as f64) / span as f64)
                    })
                    .collect();
                Filter::new(values, (center + len - half) % len, center)
            }
            Profile::Plateau {
                center2,
                flat,
                edge,
            } => {
                // Doubled coordinates: bin j sits at 2j - c2 where c2 = center2 * ratio.
                let c2 = (center2 * ratio) as i64;
                let reach = 2.0 * edge * ratio as f64;
                let lo = floor((c2 as f64 - reach) / 2.0) as i64 + 1;
                let hi = ceil((c2 as f64 + reach) / 2.0) as i64 - 1;
                let values = (lo..=hi)
                    .map(|j| {
                        let x = ((2 * j - c2) as f64 / (2.0 * ratio as f64)).abs();
                        amplitude * plateau(x, flat, edge)
                    })
                    .collect();
                let start = lo.rem_euclid(len as i64) as usize;
                let center = (c2 / 2).rem_euclid(len as i64) as usize;
                Filter::new(values, start, center)
            }
        }
    }
}

fn plateau(x: f64, flat: f64, edge: f64) -> f64 {
    if x <= flat {
        1.0
    } else if x < edge {
        let c = cos(0.5 * PI * (x - flat) / (edge - flat));
        c * c
    } else {
        0.0
    }
}

/// Smallest even `2^a 3^b >= support`, or `len` if that does not fit.
fn coef_count_for(support: usize, len: usize) -> usize {
    let target = support.max(2);
    let mut best = usize::MAX;
    let mut p3 = 1usize;
    while p3 <= target.saturating_mul(3) {
        let mut n = p3 * 2;
        while n < target {
            n *= 2;
        }
        best = best.min(n);
        p3 *= 3;
    }
    if best <= len {
        best
    } else {
        len
    }
}

/// Constant-Q system for signals of length `len`.
pub fn build_cq_system(params: &CqParams, len: usize) -> Result<NsgSystem> {
    CqDesign::new(params, len)?.system()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_params() -> CqParams {
        CqParams::default()
    }

    #[test]
    fn default_layout_has_expected_band_count() {
        let layout = cq_layout(&reference_params()).unwrap();
        assert_eq!(layout.bands, 416);
        assert_eq!(layout.channel_count(), 834);
        assert_eq!(layout.center_freqs[0], 0.0);
        assert_eq!(layout.center_freqs[417], 22_050.0);
        assert!((layout.center_freqs[416] - 20_027.427_819_619_5).abs() < 1e-6);
        assert!((layout.q - 34.623_477_630_089).abs() < 1e-9);
    }

    #[test]
    fn layout_k_is_smallest_reaching_max() {
        let params = CqParams {
            min_freq: 200.0,
            max_freq: 2000.0,
            sample_rate: 8000.0,
            bins_per_octave: 12,
            ..Default::default()
        };
        let layout = cq_layout(&params).unwrap();
        assert_eq!(layout.bands, 41);
        assert_eq!(layout.channel_count(), 84);
        assert!(layout.center_freqs[41] >= 2000.0 && layout.center_freqs[40] < 2000.0);
    }

    #[test]
    fn exact_power_of_two_max_needs_no_extra_band() {
        let params = CqParams {
            min_freq: 100.0,
            max_freq: 800.0,
            sample_rate: 8000.0,
            bins_per_octave: 12,
            ..Default::default()
        };
        let layout = cq_layout(&params).unwrap();
        assert_eq!(layout.bands, 37);
        assert!((layout.center_freqs[37] - 800.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_nyquist_violation() {
        let params = CqParams {
            max_freq: 22_000.0,
            ..reference_params()
        };
        assert!(matches!(cq_layout(&params), Err(Error::InvalidParams(_))));
        let params = CqParams {
            min_freq: 0.0,
            ..reference_params()
        };
        assert!(cq_layout(&params).is_err());
        let params = CqParams {
            bins_per_octave: 0,
            ..reference_params()
        };
        assert!(cq_layout(&params).is_err());
    }

    #[test]
    fn interior_bandwidths_are_neighbor_spacing() {
        let layout = cq_layout(&reference_params()).unwrap();
        for k in 2..layout.bands {
            let spacing = layout.center_freqs[k + 1] - layout.center_freqs[k - 1];
            assert!(
                (layout.bandwidths[k] - spacing).abs() <= 1e-9 * spacing,
                "k = {k}"
            );
        }
    }

    #[test]
    fn coef_counts_are_even_smooth_and_large_enough() {
        for (s, len) in [(1, 64), (17, 64), (45, 128), (97, 4096), (1000, 1024)] {
            let m = coef_count_for(s, len);
            assert!(m >= s && m <= len);
            if m != len {
                let mut r = m;
                for p in [2, 3] {
                    while r % p == 0 {
                        r /= p;
                    }
                }
                assert_eq!(r, 1);
                assert_eq!(m % 2, 0);
            }
        }
        assert_eq!(coef_count_for(17, 4096), 18);
        assert_eq!(coef_count_for(45, 4096), 48);
        assert_eq!(coef_count_for(97, 4096), 108);
    }

    #[test]
    fn design_is_a_mirrored_painless_frame() {
        let params = reference_params();
        for len in [1024, 3 * 1024, 16384] {
            let design = CqDesign::new(&params, len).unwrap();
            let system = design.system().unwrap();
            assert!(is_painless_frame(&system).is_frame());
            let bands = design.layout().bands;
            for k in 1..=bands {
                let m = mirror_channel(bands, k);
                let (a, b) = (system.filter(k), system.filter(m));
                assert_eq!(b.center_bin(), (len - a.center_bin()) % len);
                assert_eq!(a.values(), b.values());
                assert_eq!(system.coef_counts()[k], system.coef_counts()[m]);
            }
        }
    }

    #[test]
    fn band_filters_respect_min_len_and_are_odd() {
        let params = CqParams {
            min_filter_len: 30,
            ..reference_params()
        };
        let system = build_cq_system(&params, 8192).unwrap();
        for k in 1..=416 {
            let s = system.filter(k).support_len();
            assert!(s >= 30 && s % 2 == 1);
        }
    }

    #[test]
    fn plateaus_peak_at_one() {
        let system = build_cq_system(&reference_params(), 4096).unwrap();
        assert_eq!(system.filter(0).value_at(0, 4096), 1.0);
        assert_eq!(system.filter(417).value_at(2048, 4096), 1.0);
    }

    #[test]
    fn refined_system_samples_the_same_responses() {
        let params = CqParams {
            min_filter_len: 8,
            ..reference_params()
        };
        let design = CqDesign::new(&params, 2048).unwrap();
        let base = design.system().unwrap();
        let fine = design.refined_system(8192).unwrap();
        let r = 4;
        for k in 0..base.channel_count() {
            assert_eq!(fine.coef_counts()[k], r * base.coef_counts()[k]);
            for j in 0..2048 {
                let a = base.filter(k).value_at(j, 2048);
                let b = fine.filter(k).value_at(j * r, 8192) * 2.0;
                assert!((a - b).abs() < 1e-15, "k={k} j={j}: {a} vs {b}");
            }
        }
        assert!(design.refined_system(3000).is_err());
    }

    #[test]
    fn blackman_harris_half_height_is_consistent() {
        let t = WindowShape::BlackmanHarris.half_height();
        assert!((WindowShape::BlackmanHarris.eval(t) - 0.5).abs() < 1e-12);
        assert!(t > 0.0 && t < 0.25);
        assert!(WindowShape::BlackmanHarris.eval(0.499) > 0.0);
        assert_eq!(WindowShape::Hann.eval(0.5), 0.0);
    }

    #[test]
    fn too_short_lengths_fail_cleanly() {
        assert!(matches!(
            build_cq_system(&reference_params(), 16),
            Err(Error::DesignFailure(_))
        ));
    }

    #[test]
    fn doubling_the_length_doubles_centers_and_supports() {
        let params = reference_params();
        for len in [3 << 12, 1 << 14] {
            let a = build_cq_system(&params, len).unwrap();
            let b = build_cq_system(&params, 2 * len).unwrap();
            for k in 1..=416 {
                let (ga, gb) = (a.filter(k), b.filter(k));
                assert!((gb.center_bin() as i64 - 2 * ga.center_bin() as i64).abs() <= 1);
                // Both widths are odd, so twice the coarse width is never hit exactly.
                if ga.support_len() > params.min_filter_len + 1 {
                    assert!((gb.support_len() as i64 - 2 * ga.support_len() as i64).abs() <= 3);
                }
            }
        }
    }

    #[test]
    fn shape_names_roundtrip() {
        for s in [WindowShape::Hann, WindowShape::BlackmanHarris] {
            assert_eq!(s.name().parse::<WindowShape>().unwrap(), s);
        }
        assert!("triangle".parse::<WindowShape>().is_err());
    }
}
