//! Stage counter driving the input select line (ISL), output select line (OSL)
//! and the stage bus (SB).

use std::fmt;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ControlState {
    n: usize,
    stage: u32,
    total_stages: u32,
}

/// Signals decoded from the stage counter for one clock cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ControlSignals {
    /// `false` selects external input, `true` the register-array feedback path.
    pub isl: bool,
    /// `true` enables the processor's output data path.
    pub osl: bool,
    /// Current stage, 1-based.
    pub sb: u32,
}

impl ControlState {
    /// Counter reset to stage 1 for an `n`-point frame.
    pub fn new(n: usize) -> Result<Self> {
        let total_stages = crate::stage_count(n)?;
        Ok(ControlState {
            n,
            stage: 1,
            total_stages,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn total_stages(&self) -> u32 {
        self.total_stages
    }

    pub fn signals(&self) -> ControlSignals {
        ControlSignals {
            isl: self.stage != 1,
            osl: self.stage == self.total_stages,
            sb: self.stage,
        }
    }

    /// Rising edge: next stage, wrapping to 1 after the last.
    #[must_use]
    pub fn advanced(self) -> Self {
        let stage = if self.stage >= self.total_stages {
            1
        } else {
            self.stage + 1
        };
        ControlState { stage, ..self }
    }
}

impl fmt::Display for ControlSignals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "isl={} osl={} sb={}",
            self.isl as u8, self.osl as u8, self.sb
        )
    }
}
