//! Invariant suite run by `fftfold selftest`: routing, control protocol, ROM
//! layout, folding equivalence and oracle agreement for every power-of-two
//! size up to a limit.

use std::fmt;

use crate::control::ControlState;
use crate::datapath::{self, StageRouting, TwiddleRom};
use crate::error::Result;
use crate::numerics::{FixedComplex, FxFormat};
use crate::oracle;
use crate::par::{self, Execution};
use crate::processor::{run_batch_with, FoldedFftProcessor, UnfoldedFft};
use crate::signals;

/// Routing network under test; swapped out for negative controls.
pub type RoutingFn = fn(usize, u32) -> Result<StageRouting>;

#[derive(Clone, Debug)]
pub struct SelfTestConfig {
    pub max_n: usize,
    pub frames_per_size: usize,
    pub seed: u64,
    pub sample_format: FxFormat,
    pub routing: RoutingFn,
    pub exec: Execution,
}

impl Default for SelfTestConfig {
    fn default() -> Self {
        SelfTestConfig {
            max_n: 256,
            frames_per_size: 25,
            seed: 0x5eed,
            sample_format: FxFormat::SAMPLE_DEFAULT,
            routing: datapath::route_stage,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:<28} {}", self.name, self.detail)
    }
}

pub fn all_passed(results: &[PropertyResult]) -> bool {
    results.iter().all(|r| r.passed)
}

/// Tolerance on the max componentwise error against the DFT, `4 n 2^-f`.
pub fn oracle_tolerance(n: usize, format: FxFormat) -> f64 {
    4.0 * n as f64 * format.ulp()
}

fn check<F>(name: &'static str, sizes: &[usize], f: F) -> PropertyResult
where
    F: Fn(usize) -> std::result::Result<String, String>,
{
    let mut notes = Vec::new();
    for &n in sizes {
        match f(n) {
            Ok(note) => {
                if !note.is_empty() {
                    notes.push(note);
                }
            }
            Err(why) => {
                return PropertyResult {
                    name,
                    passed: false,
                    detail: format!("n={n}: {why}"),
                }
            }
        }
    }
    let mut detail = format!("n={}..{}", sizes[0], sizes[sizes.len() - 1]);
    if let Some(last) = notes.last() {
        detail.push_str(&format!(" ({last})"));
    }
    PropertyResult {
        name,
        passed: true,
        detail,
    }
}

fn err_string(e: impl fmt::Display) -> String {
    e.to_string()
}

pub fn run(config: &SelfTestConfig) -> Vec<PropertyResult> {
    let sizes: Vec<usize> = std::iter::successors(Some(2usize), |n| n.checked_mul(2))
        .take_while(|&n| n <= config.max_n.max(2))
        .collect();
    let routing = config.routing;
    let stages_of = |n: usize| -> std::result::Result<Vec<StageRouting>, String> {
        (1..=n.trailing_zeros())
            .map(|s| routing(n, s).map_err(err_string))
            .collect()
    };

    let mut results = vec![
        check("routing_perfect_matching", &sizes, |n| {
            for r in stages_of(n)? {
                if !r.is_perfect_matching(n) {
                    return Err(format!("stage {} is not a perfect matching", r.stage));
                }
            }
            Ok(String::new())
        }),
        check("routing_stage_distance", &sizes, |n| {
            for r in stages_of(n)? {
                if !r.has_stage_distance() {
                    return Err(format!("stage {} pair distance is not 2^(m-1)", r.stage));
                }
            }
            Ok(String::new())
        }),
        check("routing_connected", &sizes, |n| {
            if datapath::stages_connected(n, &stages_of(n)?) {
                Ok(String::new())
            } else {
                Err("dependency graph is disconnected".into())
            }
        }),
        check("control_protocol", &sizes, |n| {
            let mut state = ControlState::new(n).map_err(err_string)?;
            let stages = state.total_stages();
            for cycle in 1..=stages {
                let s = state.signals();
                if s.sb != cycle || s.isl != (cycle != 1) || s.osl != (cycle == stages) {
                    return Err(format!("cycle {cycle}: {s}"));
                }
                state = state.advanced();
            }
            if state.stage() != 1 {
                return Err("counter did not wrap".into());
            }
            Ok(String::new())
        }),
        check("twiddle_rom_layout", &sizes, |n| {
            let rom = TwiddleRom::build(n, config.sample_format).map_err(err_string)?;
            let one = FixedComplex::quantize(1.0, 0.0, config.sample_format);
            if rom.stages() != n.trailing_zeros() || rom.width() != n / 2 {
                return Err("ROM is not log2(n) x n/2".into());
            }
            if rom.row(1).map_err(err_string)?.iter().any(|&w| w != one) {
                return Err("stage-1 row is not all ones".into());
            }
            Ok(String::new())
        }),
    ];

    let corpus = |n: usize| -> Vec<Vec<FixedComplex>> {
        (0..config.frames_per_size)
            .map(|i| {
                let seed = config.seed ^ ((n as u64) << 32) ^ i as u64;
                signals::random_frame(n, config.sample_format, seed)
            })
            .collect()
    };

    results.push(check("folding_equivalence", &sizes, |n| {
        let format = FxFormat::internal_for(n, config.sample_format).map_err(err_string)?;
        let frames = corpus(n);
        let folded = run_batch_with(config.exec, n, format, &frames).map_err(err_string)?;
        let unfolded = UnfoldedFft::new(n, format).map_err(err_string)?;
        for (i, (x, y)) in frames.iter().zip(&folded).enumerate() {
            if unfolded.evaluate(x).map_err(err_string)? != *y {
                return Err(format!("frame {i} differs"));
            }
        }
        Ok(format!("{} frames/size bit-identical", frames.len()))
    }));

    results.push(check("oracle_equivalence", &sizes, |n| {
        let format = FxFormat::internal_for(n, config.sample_format).map_err(err_string)?;
        let frames = corpus(n);
        let outputs = run_batch_with(config.exec, n, format, &frames).map_err(err_string)?;
        let errors = par::map_range(config.exec, frames.len(), |i| {
            let reference =
                oracle::dft_direct_with(Execution::Sequential, &signals::to_complex(&frames[i]))?;
            oracle::max_abs_error(&signals::to_complex(&outputs[i]), &reference)
        });
        let worst = errors
            .into_iter()
            .collect::<Result<Vec<f64>>>()
            .map_err(err_string)?
            .into_iter()
            .fold(0.0, f64::max);
        let tol = oracle_tolerance(n, config.sample_format);
        if worst <= tol {
            Ok(format!("worst {worst:.3e} <= {tol:.3e}"))
        } else {
            Err(format!("error {worst:.3e} exceeds {tol:.3e}"))
        }
    }));

    results.push(check("oracle_self_consistency", &sizes, |n| {
        let x = signals::random_complex(n, config.seed ^ n as u64);
        let err = oracle::max_abs_error(
            &oracle::fft_recursive(&x).map_err(err_string)?,
            &oracle::dft_direct_with(config.exec, &x).map_err(err_string)?,
        )
        .map_err(err_string)?;
        if err <= 1e-9 {
            Ok(String::new())
        } else {
            Err(format!("recursive FFT differs from DFT by {err:.3e}"))
        }
    }));

    results.push(check("impulse_exact", &sizes, |n| {
        let mut p = FoldedFftProcessor::for_samples(n, config.sample_format).map_err(err_string)?;
        let (y, _) = p
            .run(&signals::impulse(n, 0, config.sample_format))
            .map_err(err_string)?;
        let one = FixedComplex::quantize(1.0, 0.0, p.format());
        if y.iter().all(|&v| v == one) {
            Ok(String::new())
        } else {
            Err("impulse response is not exactly all ones".into())
        }
    }));

    results.push(check("degenerate_n2", &[2], |_| {
        let x = signals::random_frame(2, config.sample_format, config.seed);
        let mut p = FoldedFftProcessor::for_samples(2, config.sample_format).map_err(err_string)?;
        let (y, trace) = p.run(&x).map_err(err_string)?;
        let s = trace.records().first().ok_or("empty trace")?.signals;
        if trace.len() != 1 || s.isl || !s.osl {
            return Err(format!("unexpected control sequence ({s})"));
        }
        let f = p.format();
        let (a, b) = (x[0].convert(f), x[1].convert(f));
        if y != [
            a.try_add(b).map_err(err_string)?,
            a.try_sub(b).map_err(err_string)?,
        ] {
            return Err("output is not [a+b, a-b]".into());
        }
        Ok(String::new())
    }));

    results
}
