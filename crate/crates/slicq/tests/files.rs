mod common;

use std::io::Cursor;

use common::{noise, write_pcm16};
use slicq::container::{Coefficients, Container};
use slicq::pipeline::{analyze_audio, synthesize_container, Settings};
use slicq::wav::{read_wav, write_wav, Audio, OutputFormat};
use slicq::CliError;
use slicq_core::CqParams;

fn stereo(len: usize) -> Audio {
    Audio {
        sample_rate: 44_100,
        channels: vec![noise(1, len, 0.5), noise(2, len, 0.5)],
    }
}

fn encode(c: &Container) -> Vec<u8> {
    let mut bytes = Vec::new();
    c.write_to(&mut bytes).unwrap();
    bytes
}

#[test]
fn container_roundtrip_is_bit_identical() {
    for slice in [None, Some(4096)] {
        let settings = Settings::new(CqParams::default(), slice, None).unwrap();
        let container = analyze_audio(&stereo(5000), &settings).unwrap();
        let bytes = encode(&container);
        let back = Container::read_from(&mut Cursor::new(&bytes)).unwrap();
        assert_eq!(back, container);
        assert_eq!(encode(&back), bytes);
    }
}

#[test]
fn payload_size_matches_the_header() {
    let settings = Settings::new(CqParams::default(), Some(4096), None).unwrap();
    let container = analyze_audio(&stereo(5000), &settings).unwrap();
    let h = &container.header;
    let header_len = 84 + 8 * h.coef_counts.len();
    let per_channel: usize = h.layer_lens().iter().sum::<usize>() * h.layer_count() * 16;
    assert_eq!(encode(&container).len(), header_len + 2 * per_channel);
}

#[test]
fn corrupt_containers_are_rejected() {
    let settings = Settings::new(CqParams::default(), None, None).unwrap();
    let bytes = encode(&analyze_audio(&stereo(2048), &settings).unwrap());
    assert!(Container::read_from(&mut Cursor::new(&bytes[..bytes.len() - 8])).is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(
        Container::read_from(&mut Cursor::new(&bad)),
        Err(CliError::Format(_))
    ));
}

#[test]
fn one_second_pads_to_whole_slices() {
    let settings = Settings::new(CqParams::default(), Some(16384), None).unwrap();
    let audio = Audio {
        sample_rate: 44_100,
        channels: vec![noise(3, 44_100, 0.5)],
    };
    let container = analyze_audio(&audio, &settings).unwrap();
    assert_eq!(container.header.signal_len, 49_152);
    assert_eq!(container.header.original_len, 44_100);
    match &container.channels[0] {
        Coefficients::Sliced(s) => assert_eq!(s.slice_count(), 6),
        Coefficients::Full(_) => panic!("expected sliced coefficients"),
    }
    let out = synthesize_container(&container).unwrap();
    assert_eq!(out.len(), 44_100);
    let err = out.channels[0]
        .iter()
        .zip(&audio.channels[0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-12);
}

#[test]
fn wav_formats_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let audio = stereo(1000);
    for (format, tol) in [
        (OutputFormat::Pcm16, 1.0 / 32768.0),
        (OutputFormat::Pcm24, 1.0 / 8_388_608.0),
        (OutputFormat::Float32, 1e-7),
    ] {
        let path = dir.path().join("a.wav");
        write_wav(&path, &audio, format).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.sample_rate, 44_100);
        assert_eq!(back.channels.len(), 2);
        for (a, b) in back
            .channels
            .iter()
            .flatten()
            .zip(audio.channels.iter().flatten())
        {
            assert!((a - b).abs() <= tol, "{format:?}");
        }
    }
}

#[test]
fn pcm16_reads_scale_to_unit_range() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.wav");
    write_pcm16(&path, 8000, &[vec![0.5, -1.0, 0.0]]);
    let audio = read_wav(&path).unwrap();
    assert_eq!(audio.channels, vec![vec![0.5, -1.0, 0.0]]);
    assert_eq!(audio.sample_rate, 8000);
}
