//! Cycle-accurate model of an area-folded radix-2 decimation-in-time FFT processor.
//!
//! A single bank of `N/2` butterfly units is reused for `log2(N)` clock cycles:
//! the [`control`] unit counts stages and drives the input/output select lines,
//! the [`datapath`] supplies the twiddle ROM, routing network and register
//! array, and [`processor`] composes them. An unfolded cascade with identical
//! arithmetic, a double-precision DFT [`oracle`] and a closed-form
//! [`resources`] model serve as references.

pub mod control;
pub mod datapath;
mod error;
pub mod io;
pub mod numerics;
pub mod oracle;
pub mod par;
pub mod processor;
pub mod resources;
pub mod selftest;
pub mod signals;

pub use control::{ControlSignals, ControlState};
pub use datapath::{RegisterArray, StageRouting, TwiddleRom};
pub use error::{Error, Result};
pub use numerics::{FixedComplex, Fx, FxFormat};
pub use par::Execution;
pub use processor::{run_unfolded, CycleRecord, CycleTrace, FoldedFftProcessor, UnfoldedFft};
pub use resources::{Architecture, ResourceReport, ResourceRow};

/// `log2(n)` for a power of two `n >= 1`.
pub fn log2_exact(n: usize) -> Result<u32> {
    if n == 0 {
        Err(Error::Empty)
    } else if !n.is_power_of_two() {
        Err(Error::NotPowerOfTwo { n })
    } else {
        Ok(n.trailing_zeros())
    }
}

/// Like [`log2_exact`] but also rejects `n = 1`, which has no butterfly stage.
pub(crate) fn stage_count(n: usize) -> Result<u32> {
    let stages = log2_exact(n)?;
    if stages == 0 {
        return Err(Error::SizeTooSmall { n, min: 2 });
    }
    Ok(stages)
}
