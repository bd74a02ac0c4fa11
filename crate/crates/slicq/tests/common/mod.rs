#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Writes interleaved 16-bit PCM from samples in `[-1, 1]`.
pub fn write_pcm16(path: &Path, rate: u32, channels: &[Vec<f64>]) {
    let spec = hound::WavSpec {
        channels: channels.len() as u16,
        sample_rate: rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(path, spec).unwrap();
    let len = channels.first().map_or(0, Vec::len);
    for t in 0..len {
        for ch in channels {
            w.write_sample((ch[t] * 32768.0).round().clamp(-32768.0, 32767.0) as i16)
                .unwrap();
        }
    }
    w.finalize().unwrap();
}

pub fn noise(seed: u64, len: usize, amplitude: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| rng.gen_range(-amplitude..amplitude))
        .collect()
}

/// A struck bar: inharmonic partials with exponential decay.
pub fn bell(freq: f64, rate: u32, len: usize) -> Vec<f64> {
    let partials = [(1.0, 0.6), (2.76, 0.15), (5.4, 0.05)];
    (0..len)
        .map(|t| {
            let s = t as f64 / rate as f64;
            let env = (-3.0 * s).exp();
            partials
                .iter()
                .map(|&(r, a)| a * env * (2.0 * PI * r * freq * s).sin())
                .sum()
        })
        .collect()
}

/// Geometric channel with the most energy.
pub fn dominant_band(power: &[Vec<f64>]) -> usize {
    let bands = (power.len() - 2) / 2;
    let energy = |k: usize| power[k].iter().sum::<f64>();
    (1..=bands)
        .max_by(|&a, &b| energy(a).total_cmp(&energy(b)))
        .unwrap()
}
