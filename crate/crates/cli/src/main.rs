use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fftfold::io::{self, FileError, SampleFile};
use fftfold::oracle::{self, Complex64};
use fftfold::resources::{self, power_of_two_range};
use fftfold::selftest::{self, SelfTestConfig};
use fftfold::signals;
use fftfold::{FixedComplex, FoldedFftProcessor, FxFormat, ResourceReport, TwiddleRom};

type CountOf = fn(&ResourceReport) -> u64;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 65;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(
    name = "fftfold",
    version,
    about = "Folded radix-2 FFT processor model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct FormatArgs {
    /// Datapath integer bits (sign included); defaults to sample bits + log2(n)
    #[arg(long)]
    int_bits: Option<u32>,
    /// Datapath fractional bits; defaults to the sample format's
    #[arg(long)]
    frac_bits: Option<u32>,
}

impl FormatArgs {
    fn resolve(self, n: usize, sample: FxFormat) -> Result<FxFormat, Failure> {
        let default = FxFormat::internal_for(n, sample)?;
        Ok(FxFormat::new(
            self.int_bits.unwrap_or(default.int_bits),
            self.frac_bits.unwrap_or(default.frac_bits),
        )?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one frame through the folded processor
    Transform {
        input: PathBuf,
        output: PathBuf,
        /// Compare against the direct DFT and report the max abs error
        #[arg(long)]
        check: bool,
        /// Write integer mantissas instead of decimal reals
        #[arg(long)]
        raw: bool,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Transform several sample files concurrently
    Batch {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0, help = "Worker threads (0 = all cores)")]
        jobs: usize,
        #[arg(long)]
        check: bool,
        #[arg(long)]
        raw: bool,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Dump the per-cycle control signals and register contents as CSV
    Trace {
        input: PathBuf,
        trace: PathBuf,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Dump the twiddle ROM as CSV (stage, column, raw_re, raw_im)
    Rom {
        #[arg(long)]
        n: usize,
        output: PathBuf,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Butterfly, multiplier and adder counts for both architectures
    Resources {
        #[arg(long, default_value_t = 8)]
        min: u64,
        #[arg(long, default_value_t = 1024)]
        max: u64,
        csv: PathBuf,
        /// One row per n with both architectures side by side
        #[arg(long)]
        wide: bool,
        /// Also write <stem>_multipliers.csv and <stem>_adders.csv
        #[arg(long)]
        figures: bool,
    },
    /// Run the invariant suite (seed from FFTFOLD_SEED)
    Selftest {
        #[arg(long, default_value_t = 256)]
        max_n: usize,
        #[arg(long, default_value_t = 25)]
        frames: usize,
    },
    /// Write a test frame
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Signal::Random)]
        kind: Signal,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = FxFormat::SAMPLE_DEFAULT.int_bits)]
        int_bits: u32,
        #[arg(long, default_value_t = FxFormat::SAMPLE_DEFAULT.frac_bits)]
        frac_bits: u32,
        #[arg(long)]
        raw: bool,
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Signal {
    Random,
    Impulse,
    Ones,
}

enum Failure {
    Invalid(String),
    Io(String),
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => EXIT_INVALID,
            Failure::Io(_) => EXIT_IO,
            Failure::Check(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) | Failure::Io(m) | Failure::Check(m) => f.write_str(m),
        }
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        if e.is_io() {
            Failure::Io(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl From<fftfold::Error> for Failure {
    fn from(e: fftfold::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

#[derive(Serialize)]
struct TransformReport {
    input: PathBuf,
    n: usize,
    sample_format: FxFormat,
    datapath_format: FxFormat,
    butterfly_units: usize,
    cycles: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
}

fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".report.json");
    PathBuf::from(name)
}

fn transform_file(
    input: &Path,
    output: &Path,
    check: bool,
    raw: bool,
    format: FormatArgs,
) -> Result<TransformReport, Failure> {
    let file = SampleFile::read(input)?;
    let n = file.n();
    let datapath_format = format.resolve(n, file.format)?;
    let mut proc = FoldedFftProcessor::new(n, datapath_format)?;
    let (y, trace) = proc.run(&file.samples)?;

    let (max_abs_error, tolerance) = if check {
        let reference = oracle::dft_direct(&signals::to_complex(&file.samples))?;
        let err = oracle::max_abs_error(&signals::to_complex(&y), &reference)?;
        (Some(err), Some(selftest::oracle_tolerance(n, file.format)))
    } else {
        (None, None)
    };

    SampleFile::new(y)?.write(output, raw)?;
    let report = TransformReport {
        input: input.to_owned(),
        n,
        sample_format: file.format,
        datapath_format,
        butterfly_units: proc.butterfly_units(),
        cycles: trace.len() as u64,
        max_abs_error,
        tolerance,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    io::write_file(&sidecar_path(output), json.as_bytes())?;
    Ok(report)
}

fn print_report(report: &TransformReport, output: &Path) {
    print!(
        "{} -> {}: n={} {} -> {}, {} butterflies x {} cycles",
        report.input.display(),
        output.display(),
        report.n,
        report.sample_format,
        report.datapath_format,
        report.butterfly_units,
        report.cycles
    );
    match (report.max_abs_error, report.tolerance) {
        (Some(err), Some(tol)) => println!(", max abs error {err:e} (tolerance {tol:e})"),
        _ => println!(),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Transform {
            input,
            output,
            check,
            raw,
            format,
        } => {
            let report = transform_file(&input, &output, check, raw, format)?;
            print_report(&report, &output);
        }
        Command::Batch {
            inputs,
            out_dir,
            jobs,
            check,
            raw,
            format,
        } => {
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| Failure::Io(format!("{}: {e}", out_dir.display())))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            let results: Vec<(PathBuf, Result<TransformReport, Failure>)> = pool.install(|| {
                use rayon::prelude::*;
                inputs
                    .par_iter()
                    .map(|input| {
                        let name = input.file_name().unwrap_or(input.as_os_str());
                        let output = out_dir.join(name);
                        let result = transform_file(input, &output, check, raw, format);
                        (output, result)
                    })
                    .collect()
            });
            let mut first_failure = None;
            for (output, result) in results {
                match result {
                    Ok(report) => print_report(&report, &output),
                    Err(e) => {
                        eprintln!("error: {e}");
                        first_failure.get_or_insert(e);
                    }
                }
            }
            if let Some(e) = first_failure {
                return Err(e);
            }
        }
        Command::Trace {
            input,
            trace,
            format,
        } => {
            let file = SampleFile::read(&input)?;
            let n = file.n();
            let mut proc = FoldedFftProcessor::new(n, format.resolve(n, file.format)?)?;
            let (_, records) = proc.run(&file.samples)?;
            io::write_trace_csv(&records, n, io::create_file(&trace)?)?;
            println!("{}: {} cycles", trace.display(), records.len());
        }
        Command::Rom { n, output, format } => {
            let rom = TwiddleRom::build(n, format.resolve(n, FxFormat::SAMPLE_DEFAULT)?)?;
            io::write_rom_csv(&rom, io::create_file(&output)?)?;
            println!(
                "{}: {} x {} coefficients in {}",
                output.display(),
                rom.stages(),
                rom.width(),
                rom.format()
            );
        }
        Command::Resources {
            min,
            max,
            csv,
            wide,
            figures,
        } => {
            let rows = resources::resource_table(&power_of_two_range(min, max)?)?;
            let out = io::create_file(&csv)?;
            if wide {
                io::write_resource_table_csv(&rows, out)?;
            } else {
                io::write_resource_csv(&rows, out)?;
            }
            println!("{}: n={min}..{max}, {} sizes", csv.display(), rows.len());
            if figures {
                let stem = csv.with_extension("");
                let series: [(&str, CountOf); 2] = [
                    ("multipliers", |r| r.multipliers),
                    ("adders", |r| r.adders_subtractors),
                ];
                for (label, pick) in series {
                    let mut path = stem.clone().into_os_string();
                    path.push(format!("_{label}.csv"));
                    let path = PathBuf::from(path);
                    io::write_series_csv(&rows, pick, io::create_file(&path)?)?;
                    println!("{}", path.display());
                }
            }
        }
        Command::Selftest { max_n, frames } => {
            let mut config = SelfTestConfig {
                max_n,
                frames_per_size: frames,
                ..SelfTestConfig::default()
            };
            if let Ok(seed) = std::env::var("FFTFOLD_SEED") {
                config.seed = seed
                    .parse()
                    .map_err(|_| Failure::Invalid(format!("FFTFOLD_SEED={seed:?} is not a u64")))?;
            }
            println!("selftest: n <= {}, seed {}", config.max_n, config.seed);
            let results = selftest::run(&config);
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(Failure::Check(format!("{failed} properties failed")));
            }
        }
        Command::Gen {
            n,
            kind,
            seed,
            int_bits,
            frac_bits,
            raw,
            output,
        } => {
            fftfold::log2_exact(n)?;
            let format = FxFormat::new(int_bits, frac_bits)?;
            let samples: Vec<FixedComplex> = match kind {
                Signal::Random => signals::random_frame(n, format, seed),
                Signal::Impulse => signals::impulse(n, 0, format),
                Signal::Ones => signals::constant(n, Complex64::new(1.0, 0.0), format),
            };
            SampleFile::new(samples)?.write(&output, raw)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
