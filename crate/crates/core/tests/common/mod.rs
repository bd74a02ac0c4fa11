#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicq_core::{Filter, NsgSystem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn random_real(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    diff / norm(b)
}

pub fn cis(angle: f64) -> Complex64 {
    Complex64::new(angle.cos(), angle.sin())
}

/// Unitary DFT by direct summation.
pub fn naive_dft(f: &[Complex64]) -> Vec<Complex64> {
    let len = f.len();
    let scale = 1.0 / (len as f64).sqrt();
    (0..len)
        .map(|j| {
            f.iter()
                .enumerate()
                .map(|(t, &x)| x * cis(-2.0 * PI * ((j * t) % len) as f64 / len as f64))
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

/// Unitary inverse DFT by direct summation.
pub fn naive_idft(f: &[Complex64]) -> Vec<Complex64> {
    let conj: Vec<Complex64> = f.iter().map(|x| x.conj()).collect();
    naive_dft(&conj).into_iter().map(|x| x.conj()).collect()
}

fn hann_filter(center: isize, half: usize, len: usize) -> Filter {
    let width = (2 * half + 2) as f64;
    let values = (0..=2 * half)
        .map(|i| {
            let t = (i as f64 - half as f64) / width;
            (PI * t).cos().powi(2)
        })
        .collect();
    let start = (center - half as isize).rem_euclid(len as isize) as usize;
    Filter::new(values, start, center.rem_euclid(len as isize) as usize)
}

/// Six Hann filters covering the 128 bins; coefficient counts that do not
/// all divide the length, and a filter wrapping around bin 0.
pub fn toy_system() -> NsgSystem {
    let centers = [0isize, 21, 43, 64, 85, 107];
    let filters = centers.iter().map(|&c| hann_filter(c, 22, 128)).collect();
    NsgSystem::new(128, filters, vec![45, 48, 64, 45, 48, 64]).unwrap()
}

/// Spectrum of atom `n` of channel `k`: `g_k[j] e^{-2 pi i j n / M_k}`,
/// with `j` running contiguously through the center bin.
pub fn atom_spectrum(system: &NsgSystem, k: usize, n: usize) -> Vec<Complex64> {
    let len = system.signal_len();
    let g = system.filter(k);
    let m = system.coef_counts()[k];
    let mut spec = vec![Complex64::new(0.0, 0.0); len];
    let back = (g.center_bin() + len - g.support_start()) % len;
    for (i, &v) in g.values().iter().enumerate() {
        let j = g.center_bin() as i64 - back as i64 + i as i64;
        let phase = (j * n as i64).rem_euclid(m as i64);
        spec[j.rem_euclid(len as i64) as usize] += v * cis(-2.0 * PI * phase as f64 / m as f64);
    }
    spec
}

/// Time-domain atoms of every channel, in channel-major order.
pub fn atoms(system: &NsgSystem) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    for k in 0..system.channel_count() {
        for n in 0..system.coef_counts()[k] {
            out.push(naive_idft(&atom_spectrum(system, k, n)));
        }
    }
    out
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}
