//! File formats: JSON sample frames and CSV traces, ROM dumps and resource tables.
//!
//! Sample file:
//!
//! ```json
//! {"n": 4, "format": {"int_bits": 2, "frac_bits": 15},
//!  "samples": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]}
//! ```
//!
//! With `"raw": true` every sample component is an integer mantissa instead.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Number;
use thiserror::Error;

use crate::datapath::TwiddleRom;
use crate::numerics::{FixedComplex, FxFormat};
use crate::processor::CycleTrace;
use crate::resources::{ResourceReport, ResourceRow};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed sample file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid sample file: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl FileError {
    /// I/O failures as opposed to content that failed validation.
    pub fn is_io(&self) -> bool {
        match self {
            FileError::Io { .. } => true,
            FileError::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}

type Result<T> = std::result::Result<T, FileError>;

/// One frame of complex samples in a single fixed-point format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleFile {
    pub format: FxFormat,
    pub samples: Vec<FixedComplex>,
}

#[derive(Serialize, Deserialize)]
struct SampleFileRepr {
    n: usize,
    format: FxFormat,
    samples: Vec<[Number; 2]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    raw: bool,
}

impl SampleFile {
    pub fn new(samples: Vec<FixedComplex>) -> Result<Self> {
        let format = samples
            .first()
            .map(|s| s.format())
            .ok_or(FileError::Model(crate::Error::Empty))?;
        if samples.iter().any(|s| s.format() != format) {
            return Err(FileError::Invalid("samples mix fixed-point formats".into()));
        }
        let file = SampleFile { format, samples };
        file.validate()?;
        Ok(file)
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    fn validate(&self) -> Result<()> {
        crate::log2_exact(self.n())?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: SampleFileRepr = serde_json::from_str(text)?;
        let format = FxFormat::new(repr.format.int_bits, repr.format.frac_bits)?;
        if repr.samples.len() != repr.n {
            return Err(FileError::Invalid(format!(
                "\"n\" is {} but {} samples are present",
                repr.n,
                repr.samples.len()
            )));
        }
        let samples = repr
            .samples
            .iter()
            .enumerate()
            .map(|(i, [re, im])| {
                if repr.raw {
                    match (re.as_i64(), im.as_i64()) {
                        (Some(re), Some(im)) => Ok(FixedComplex::from_raw(re, im, format)),
                        _ => Err(FileError::Invalid(format!(
                            "sample {i}: raw mantissas must be integers"
                        ))),
                    }
                } else {
                    let (re, im) = (number_to_f64(re)?, number_to_f64(im)?);
                    Ok(FixedComplex::quantize(re, im, format))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let file = SampleFile { format, samples };
        file.validate()?;
        Ok(file)
    }

    /// Decimal reals (exact, since every mantissa times `2^-f` is a finite
    /// binary fraction) or integer mantissas when `raw` is set.
    pub fn to_json(&self, raw: bool) -> String {
        let samples = self
            .samples
            .iter()
            .map(|s| {
                if raw {
                    let (re, im) = s.raw();
                    [Number::from(re), Number::from(im)]
                } else {
                    let z = s.to_complex64();
                    [float_number(z.re), float_number(z.im)]
                }
            })
            .collect();
        let repr = SampleFileRepr {
            n: self.n(),
            format: self.format,
            samples,
            raw,
        };
        serde_json::to_string_pretty(&repr).expect("sample file serializes")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path, raw: bool) -> Result<()> {
        write_file(path, self.to_json(raw).as_bytes())
    }
}

fn number_to_f64(n: &Number) -> Result<f64> {
    n.as_f64()
        .ok_or_else(|| FileError::Invalid(format!("{n} is not a real number")))
}

fn float_number(v: f64) -> Number {
    Number::from_f64(v).expect("fixed-point values are finite")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| FileError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn create_file(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|source| FileError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Columns `cycle, sb, isl, osl, r0 .. r{n-1}`; each register cell is `re:im`
/// in raw mantissas.
pub fn write_trace_csv<W: Write>(trace: &CycleTrace, n: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["cycle".to_string(), "sb".into(), "isl".into(), "osl".into()];
    header.extend((0..n).map(|i| format!("r{i}")));
    w.write_record(&header)?;
    for rec in trace.records() {
        let mut row = vec![
            rec.cycle.to_string(),
            rec.signals.sb.to_string(),
            (rec.signals.isl as u8).to_string(),
            (rec.signals.osl as u8).to_string(),
        ];
        row.extend(rec.registers.iter().map(|v| {
            let (re, im) = v.raw();
            format!("{re}:{im}")
        }));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Columns `stage, column, raw_re, raw_im`.
pub fn write_rom_csv<W: Write>(rom: &TwiddleRom, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["stage", "column", "raw_re", "raw_im"])?;
    for (stage, column, coeff) in rom.entries() {
        let (re, im) = coeff.raw();
        w.serialize((stage, column, re, im))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Serialize)]
struct ReportCsvRow {
    n: u64,
    arch: String,
    bu: u64,
    mult: u64,
    addsub: u64,
    rom_coeffs: u64,
    cycles: u64,
    alpha_num: u64,
    alpha_den: u64,
}

/// One line per `(n, architecture)`; alpha is the folded/traditional ratio
/// and is 1 for the traditional rows.
pub fn write_resource_csv<W: Write>(rows: &[ResourceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let line = |r: &ResourceReport, num: u64, den: u64| ReportCsvRow {
        n: r.n,
        arch: r.architecture.to_string(),
        bu: r.butterfly_units,
        mult: r.multipliers,
        addsub: r.adders_subtractors,
        rom_coeffs: r.rom_coefficients,
        cycles: r.frame_cycles,
        alpha_num: num,
        alpha_den: den,
    };
    for row in rows {
        w.serialize(line(&row.traditional, 1, 1))?;
        w.serialize(line(&row.folded, *row.alpha.numer(), *row.alpha.denom()))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// The comparison table, one line per `n`.
pub fn write_resource_table_csv<W: Write>(rows: &[ResourceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "traditional_bu",
        "folded_bu",
        "traditional_mult",
        "folded_mult",
        "traditional_addsub",
        "folded_addsub",
        "alpha",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.traditional.butterfly_units.to_string(),
            r.folded.butterfly_units.to_string(),
            r.traditional.multipliers.to_string(),
            r.folded.multipliers.to_string(),
            r.traditional.adders_subtractors.to_string(),
            r.folded.adders_subtractors.to_string(),
            r.alpha.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Series for plotting a count against `n`: columns `n, traditional, folded`.
pub fn write_series_csv<W, F>(rows: &[ResourceRow], pick: F, out: W) -> Result<()>
where
    W: Write,
    F: Fn(&ResourceReport) -> u64,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "traditional", "folded"])?;
    for r in rows {
        w.serialize((r.n, pick(&r.traditional), pick(&r.folded)))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processor::FoldedFftProcessor;
    use crate::resources::resource_table;
    use crate::signals;
    use proptest::prelude::*;

    const SAMPLE: FxFormat = FxFormat::SAMPLE_DEFAULT;

    #[test]
    fn parses_decimal_and_raw() {
        let text = r#"{"n": 2, "format": {"int_bits": 2, "frac_bits": 15},
                       "samples": [[1.0, -0.5], [0, 0.25]]}"#;
        let f = SampleFile::from_json(text).unwrap();
        assert_eq!(f.samples[0].raw(), (32768, -16384));
        assert_eq!(f.samples[1].raw(), (0, 8192));

        let raw = r#"{"n": 2, "format": {"int_bits": 2, "frac_bits": 15}, "raw": true,
                      "samples": [[32768, -16384], [0, 8192]]}"#;
        assert_eq!(SampleFile::from_json(raw).unwrap(), f);
    }

    #[test]
    fn rejects_bad_files() {
        let wrong_count =
            r#"{"n": 4, "format": {"int_bits": 2, "frac_bits": 15}, "samples": [[0,0]]}"#;
        assert!(matches!(
            SampleFile::from_json(wrong_count),
            Err(FileError::Invalid(_))
        ));

        let twelve = format!(
            r#"{{"n": 12, "format": {{"int_bits": 2, "frac_bits": 15}}, "samples": {}}}"#,
            serde_json::to_string(&vec![[0.0, 0.0]; 12]).unwrap()
        );
        let err = SampleFile::from_json(&twelve).unwrap_err();
        assert!(err.to_string().contains("power of two"), "{err}");

        let raw_float = r#"{"n": 1, "format": {"int_bits": 2, "frac_bits": 15}, "raw": true, "samples": [[0.5, 0]]}"#;
        assert!(matches!(
            SampleFile::from_json(raw_float),
            Err(FileError::Invalid(_))
        ));

        let bad_format =
            r#"{"n": 1, "format": {"int_bits": 0, "frac_bits": 15}, "samples": [[0, 0]]}"#;
        assert!(matches!(
            SampleFile::from_json(bad_format),
            Err(FileError::Model(_))
        ));

        assert!(matches!(
            SampleFile::from_json("{"),
            Err(FileError::Parse(_))
        ));
        let missing = SampleFile::read(Path::new("/nonexistent/x.json")).unwrap_err();
        assert!(missing.is_io());
    }

    #[test]
    fn trace_csv_layout() {
        let mut p = FoldedFftProcessor::for_samples(8, SAMPLE).unwrap();
        let (_, trace) = p.run(&signals::impulse(8, 0, SAMPLE)).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&trace, 8, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "cycle,sb,isl,osl,r0,r1,r2,r3,r4,r5,r6,r7");
        assert!(lines[1].starts_with("1,1,0,0,32768:0,32768:0,"));
        assert!(lines[3].starts_with("3,3,1,1,"));
        assert!(lines[3].ends_with(&["32768:0"; 8].join(",")));
    }

    #[test]
    fn rom_csv_layout() {
        let rom = TwiddleRom::build(4, SAMPLE).unwrap();
        let mut buf = Vec::new();
        write_rom_csv(&rom, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "stage,column,raw_re,raw_im\n1,0,32768,0\n1,1,32768,0\n2,0,32768,0\n2,1,0,-32768\n"
        );
    }

    #[test]
    fn resource_csv_layouts() {
        let rows = resource_table(&[8]).unwrap();
        let mut buf = Vec::new();
        write_resource_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,arch,bu,mult,addsub,rom_coeffs,cycles,alpha_num,alpha_den\n\
             8,traditional,12,12,24,12,3,1,1\n\
             8,folded,4,4,8,12,3,1,3\n"
        );
        let mut buf = Vec::new();
        write_resource_table_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .ends_with("8,12,4,12,4,24,8,1/3\n"));
        let mut buf = Vec::new();
        write_series_csv(&rows, |r| r.adders_subtractors, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,traditional,folded\n8,24,8\n"
        );
    }

    proptest! {
        #[test]
        fn json_round_trip_is_lossless(bits in 0u32..6, seed in any::<u64>(), g in 1u32..10, f in 1u32..30, raw in any::<bool>()) {
            let format = FxFormat::new(g, f).unwrap();
            let file = SampleFile::new(signals::random_frame(1 << bits, format, seed)).unwrap();
            prop_assert_eq!(SampleFile::from_json(&file.to_json(raw)).unwrap(), file);
        }
    }
}
