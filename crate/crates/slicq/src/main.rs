use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slicq::bench::{
    approx_csv, run_approximation, run_scaling, ApproxConfig, ScalingConfig, SignalSet, Variant,
};
use slicq::config::load_config;
use slicq::container::Container;
use slicq::images::{read_mask, spectrogram_levels, write_spectrogram};
use slicq::pipeline::{
    analyze_audio, mask_audio, power, synthesize_container, transpose_audio, Engine, Settings,
};
use slicq::wav::{read_wav, write_wav, OutputFormat};
use slicq::{CliError, Result};
use slicq_core::processing::MaskScaling;
use slicq_core::CqParams;

/// Invertible constant-Q analysis, resynthesis and processing of WAV files.
#[derive(Parser)]
#[command(name = "slicq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TransformArgs {
    /// key=value file with xi_min, xi_max, xi_s, bins, shape, min_filter_len.
    /// xi_s is always taken from the input file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Slice length 2N; enables the sliced transform.
    #[arg(long)]
    slice: Option<usize>,
    /// Transition length M of the slicing window (default N/8).
    #[arg(long)]
    transition: Option<usize>,
}

impl TransformArgs {
    fn settings(&self) -> Result<Settings> {
        let params = match &self.config {
            Some(path) => load_config(path)?,
            None => CqParams::default(),
        };
        Settings::new(params, self.slice, self.transition)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a WAV file into an NSGC1 coefficient file.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        transform: TransformArgs,
    },
    /// Resynthesize a WAV file from an NSGC1 coefficient file.
    Synthesize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "pcm16")]
        format: OutputFormat,
    },
    /// Analyze and resynthesize in one go.
    Roundtrip {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "pcm16")]
        format: OutputFormat,
        #[command(flatten)]
        transform: TransformArgs,
    },
    /// Render a log-frequency spectrogram (PGM, or PPM with --color).
    Spectrogram {
        /// A WAV file or an NSGC1 coefficient file.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Image width in columns.
        #[arg(long, default_value_t = 1024)]
        width: usize,
        /// Dynamic range below the maximum, in dB.
        #[arg(long, default_value_t = 100.0)]
        range_db: f64,
        #[arg(long)]
        color: bool,
        /// Audio channel to render.
        #[arg(long, default_value_t = 0)]
        channel: usize,
        #[command(flatten)]
        transform: TransformArgs,
    },
    /// Multiply coefficients by a PGM mask and resynthesize.
    Mask {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// How gray levels map to gains.
        #[arg(long, default_value = "db")]
        scaling: String,
        #[arg(long, value_enum, default_value = "pcm16")]
        format: OutputFormat,
        #[command(flatten)]
        transform: TransformArgs,
    },
    /// Shift content by a number of constant-Q bins and resynthesize.
    Transpose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        bins: i64,
        /// Lowest source channel (default: widest valid range).
        #[arg(long, requires = "high")]
        low: Option<usize>,
        #[arg(long, requires = "low")]
        high: Option<usize>,
        #[arg(long, value_enum, default_value = "pcm16")]
        format: OutputFormat,
        #[command(flatten)]
        transform: TransformArgs,
    },
    /// Time analysis plus synthesis over signal lengths 2^min..2^max.
    Bench {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 14)]
        min_exp: u32,
        #[arg(long, default_value_t = 20)]
        max_exp: u32,
        #[arg(long, default_value_t = 50)]
        iters: usize,
        /// Also time the full-length transform at this (prime) length.
        #[arg(long)]
        prime: Option<usize>,
        #[arg(long, value_enum, num_args = 1.., default_values = ["cq-nsgt", "slicq"])]
        variants: Vec<Variant>,
        #[arg(long, default_value_t = 16384)]
        slice: usize,
        #[arg(long)]
        transition: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also time this many concurrent roundtrips (throughput rows,
        /// excluded from the slope fit).
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// SNR between sliced and full-length coefficients.
    Approx {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1 << 17)]
        len: usize,
        #[arg(long, default_value_t = 20)]
        signals: usize,
        #[arg(long, value_enum, default_value = "random")]
        set: SignalSet,
        #[arg(long, value_delimiter = ',', default_value = "16384")]
        slice_lens: Vec<usize>,
        /// Transition lengths as divisors of N.
        #[arg(long, value_delimiter = ',', default_value = "4,128")]
        transition_divisors: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32,64")]
        min_filter_lens: Vec<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn is_container(path: &Path) -> bool {
    std::fs::File::open(path)
        .and_then(|mut f| {
            let mut magic = [0u8; 5];
            std::io::Read::read_exact(&mut f, &mut magic).map(|_| &magic == b"NSGC1")
        })
        .unwrap_or(false)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn params_from(config: &Option<PathBuf>) -> Result<CqParams> {
    config
        .as_deref()
        .map_or(Ok(CqParams::default()), load_config)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Analyze {
            input,
            out,
            transform,
        } => {
            let container = analyze_audio(&read_wav(&input)?, &transform.settings()?)?;
            container.save(&out)
        }
        Command::Synthesize { input, out, format } => {
            let audio = synthesize_container(&Container::load(&input)?)?;
            write_wav(&out, &audio, format)
        }
        Command::Roundtrip {
            input,
            out,
            format,
            transform,
        } => {
            let container = analyze_audio(&read_wav(&input)?, &transform.settings()?)?;
            write_wav(&out, &synthesize_container(&container)?, format)
        }
        Command::Spectrogram {
            input,
            out,
            width,
            range_db,
            color,
            channel,
            transform,
        } => {
            if width == 0 || range_db <= 0.0 {
                return Err(CliError::Usage("width and range must be positive".into()));
            }
            let container = if is_container(&input) {
                Container::load(&input)?
            } else {
                analyze_audio(&read_wav(&input)?, &transform.settings()?)?
            };
            let coefs = container
                .channels
                .get(channel)
                .ok_or_else(|| CliError::Usage(format!("no audio channel {channel}")))?;
            let bands = (container.header.coef_counts.len() - 2) / 2;
            let (height, levels) = spectrogram_levels(&power(coefs), bands, width, range_db);
            write_spectrogram(&out, width, height, &levels, color)
        }
        Command::Mask {
            input,
            mask,
            out,
            scaling,
            format,
            transform,
        } => {
            let scaling: MaskScaling = scaling
                .parse()
                .map_err(|e: slicq_core::Error| CliError::Usage(e.to_string()))?;
            let audio = read_wav(&input)?;
            let settings = transform.settings()?.for_rate(audio.sample_rate)?;
            let engine = Engine::new(&settings, settings.padded_len(audio.len()))?;
            let mask = read_mask(&mask, engine.bands(), scaling)?;
            write_wav(&out, &mask_audio(&audio, &settings, &mask)?, format)
        }
        Command::Transpose {
            input,
            out,
            bins,
            low,
            high,
            format,
            transform,
        } => {
            let audio = read_wav(&input)?;
            let range = low.zip(high);
            write_wav(
                &out,
                &transpose_audio(&audio, &transform.settings()?, bins, range)?,
                format,
            )
        }
        Command::Bench {
            out,
            min_exp,
            max_exp,
            iters,
            prime,
            variants,
            slice,
            transition,
            config,
            threads,
        } => {
            if min_exp > max_exp || max_exp > 26 {
                return Err(CliError::Usage("need min_exp <= max_exp <= 26".into()));
            }
            let settings = Settings::new(params_from(&config)?, Some(slice), transition)?;
            let (_, transition) = settings.slicing.expect("slicing requested");
            let cfg = ScalingConfig {
                variants,
                lengths: (min_exp..=max_exp).map(|e| 1usize << e).collect(),
                iters,
                prime_len: prime,
                slice_len: slice,
                transition,
                params: settings.params,
                threads,
                ..ScalingConfig::default()
            };
            let result = run_scaling(&cfg)?;
            for v in &cfg.variants {
                if let Some(s) = result.slope(*v) {
                    eprintln!("{}: log-log slope {s:.3}", v.name());
                }
            }
            write_text(&out, &result.to_csv())
        }
        Command::Approx {
            out,
            len,
            signals,
            set,
            slice_lens,
            transition_divisors,
            min_filter_lens,
            config,
        } => {
            let cfg = ApproxConfig {
                len,
                signals,
                set,
                slice_lens,
                transition_divisors,
                min_filter_lens,
                params: params_from(&config)?,
                ..ApproxConfig::default()
            };
            write_text(&out, &approx_csv(&run_approximation(&cfg)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slicq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
