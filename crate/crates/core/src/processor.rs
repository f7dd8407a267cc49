//! The folded FFT processor and its unfolded reference cascade.
//!
//! [`FoldedFftProcessor`] owns one bank of `n/2` butterflies and steps them once
//! per clock over `log2(n)` cycles, feeding results back through the register
//! array. [`UnfoldedFft`] instantiates all `(n/2) log2(n)` butterflies as a
//! spatial cascade with the same ROM values and routing, so both must agree to
//! the last mantissa bit.

use crate::control::{ControlSignals, ControlState};
use crate::datapath::{self, RegisterArray, StageRouting, TwiddleRom};
use crate::error::{Error, Result};
use crate::numerics::{FixedComplex, FxFormat};
use crate::par::{self, Execution};

/// State of the machine at the end of one clock cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRecord {
    /// 1-based cycle count since the processor was created.
    pub cycle: u64,
    pub signals: ControlSignals,
    /// Register contents after writeback.
    pub registers: Vec<FixedComplex>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CycleTrace {
    records: Vec<CycleRecord>,
}

impl CycleTrace {
    pub fn records(&self) -> &[CycleRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn signals(&self) -> impl Iterator<Item = ControlSignals> + '_ {
        self.records.iter().map(|r| r.signals)
    }
}

#[derive(Clone, Debug)]
pub struct FoldedFftProcessor {
    format: FxFormat,
    rom: TwiddleRom,
    routing: Vec<StageRouting>,
    registers: RegisterArray,
    control: ControlState,
    loaded: bool,
    cycle: u64,
    tracing: bool,
    trace: CycleTrace,
    output: Option<Vec<FixedComplex>>,
}

impl FoldedFftProcessor {
    /// Processor whose ROM, registers and butterflies all use `format`.
    pub fn new(n: usize, format: FxFormat) -> Result<Self> {
        let control = ControlState::new(n)?;
        let rom = TwiddleRom::build(n, format)?;
        let routing = (1..=control.total_stages())
            .map(|stage| datapath::route_stage(n, stage))
            .collect::<Result<_>>()?;
        Ok(FoldedFftProcessor {
            format,
            rom,
            routing,
            registers: RegisterArray::new(n, format),
            control,
            loaded: false,
            cycle: 0,
            tracing: true,
            trace: CycleTrace::default(),
            output: None,
        })
    }

    /// Processor sized for `sample`-format input, using [`FxFormat::internal_for`].
    pub fn for_samples(n: usize, sample: FxFormat) -> Result<Self> {
        Self::new(n, FxFormat::internal_for(n, sample)?)
    }

    pub fn n(&self) -> usize {
        self.control.n()
    }

    pub fn format(&self) -> FxFormat {
        self.format
    }

    pub fn stages(&self) -> u32 {
        self.control.total_stages()
    }

    /// Physical butterfly units in the bank.
    pub fn butterfly_units(&self) -> usize {
        self.n() / 2
    }

    pub fn rom(&self) -> &TwiddleRom {
        &self.rom
    }

    pub fn registers(&self) -> &RegisterArray {
        &self.registers
    }

    pub fn control(&self) -> ControlState {
        self.control
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn set_tracing(&mut self, enabled: bool) {
        self.tracing = enabled;
    }

    /// Output latched on the most recent OSL cycle.
    pub fn output(&self) -> Option<&[FixedComplex]> {
        self.output.as_deref()
    }

    /// Hands over everything recorded so far.
    pub fn take_trace(&mut self) -> CycleTrace {
        std::mem::take(&mut self.trace)
    }

    /// Input path (ISL = 0): bit-reverses `x` into the register array,
    /// converted to the datapath format.
    pub fn load(&mut self, x: &[FixedComplex]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                actual: x.len(),
            });
        }
        if self.loaded {
            return Err(Error::FrameInProgress {
                stage: self.control.stage(),
            });
        }
        let widened: Vec<FixedComplex> = x.iter().map(|v| v.convert(self.format)).collect();
        self.registers
            .latch(datapath::bit_reverse_permute(&widened)?)?;
        self.loaded = true;
        Ok(())
    }

    /// One clock cycle: all `n/2` butterflies evaluate the stage selected by the
    /// stage bus and write back in place, then the counter advances.
    pub fn step(&mut self) -> Result<ControlSignals> {
        if !self.loaded {
            return Err(Error::NotLoaded);
        }
        let signals = self.control.signals();
        let twiddles = self.rom.row(signals.sb)?;
        let routing = &self.routing[signals.sb as usize - 1];
        let next = datapath::evaluate_stage(routing, twiddles, self.registers.slots());
        self.registers.latch(next)?;
        self.cycle += 1;

        if self.tracing {
            self.trace.records.push(CycleRecord {
                cycle: self.cycle,
                signals,
                registers: self.registers.slots().to_vec(),
            });
        }
        if signals.osl {
            self.output = Some(self.registers.slots().to_vec());
            self.loaded = false;
        }
        self.control = self.control.advanced();
        Ok(signals)
    }

    /// Loads `x` and clocks until OSL, returning the output and this frame's trace.
    pub fn run(&mut self, x: &[FixedComplex]) -> Result<(Vec<FixedComplex>, CycleTrace)> {
        let start = self.trace.len();
        self.load(x)?;
        while !self.step()?.osl {}
        let frame = CycleTrace {
            records: self.trace.records.split_off(start),
        };
        let output = self.output.clone().ok_or(Error::NotLoaded)?;
        Ok((output, frame))
    }
}

/// Transforms independent frames on clones of one processor.
pub fn run_batch(
    n: usize,
    format: FxFormat,
    frames: &[Vec<FixedComplex>],
) -> Result<Vec<Vec<FixedComplex>>> {
    run_batch_with(Execution::default(), n, format, frames)
}

pub fn run_batch_with(
    exec: Execution,
    n: usize,
    format: FxFormat,
    frames: &[Vec<FixedComplex>],
) -> Result<Vec<Vec<FixedComplex>>> {
    let mut prototype = FoldedFftProcessor::new(n, format)?;
    prototype.set_tracing(false);
    par::map_with_state(
        exec,
        frames,
        || prototype.clone(),
        |proc, frame| proc.run(frame).map(|(y, _)| y),
    )
    .into_iter()
    .collect()
}

/// One spatially instantiated butterfly of the unfolded cascade.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ButterflyInstance {
    pub stage: u32,
    pub top: usize,
    pub bottom: usize,
    pub twiddle: FixedComplex,
}

/// The traditional cascade: `log2(n)` columns of `n/2` butterflies with the
/// twiddles hard-wired, no register reuse.
#[derive(Clone, Debug)]
pub struct UnfoldedFft {
    n: usize,
    format: FxFormat,
    stages: u32,
    instances: Vec<ButterflyInstance>,
}

impl UnfoldedFft {
    pub fn new(n: usize, format: FxFormat) -> Result<Self> {
        let rom = TwiddleRom::build(n, format)?;
        let stages = rom.stages();
        let mut instances = Vec::with_capacity(n / 2 * stages as usize);
        for stage in 1..=stages {
            let row = rom.row(stage)?;
            for p in datapath::route_stage(n, stage)?.pairs {
                instances.push(ButterflyInstance {
                    stage,
                    top: p.top,
                    bottom: p.bottom,
                    twiddle: row[p.twiddle_column],
                });
            }
        }
        Ok(UnfoldedFft {
            n,
            format,
            stages,
            instances,
        })
    }

    pub fn butterfly_count(&self) -> usize {
        self.instances.len()
    }

    pub fn instances(&self) -> &[ButterflyInstance] {
        &self.instances
    }

    pub fn evaluate(&self, x: &[FixedComplex]) -> Result<Vec<FixedComplex>> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        let widened: Vec<FixedComplex> = x.iter().map(|v| v.convert(self.format)).collect();
        let mut wires = datapath::bit_reverse_permute(&widened)?;
        for column in self.instances.chunks(self.n / 2) {
            let mut next = vec![FixedComplex::zero(self.format); self.n];
            for bf in column {
                let (hi, lo) =
                    datapath::butterfly_unchecked(wires[bf.top], wires[bf.bottom], bf.twiddle);
                next[bf.top] = hi;
                next[bf.bottom] = lo;
            }
            wires = next;
        }
        debug_assert_eq!(self.instances.len(), self.n / 2 * self.stages as usize);
        Ok(wires)
    }
}

pub fn run_unfolded(n: usize, format: FxFormat, x: &[FixedComplex]) -> Result<Vec<FixedComplex>> {
    UnfoldedFft::new(n, format)?.evaluate(x)
}
