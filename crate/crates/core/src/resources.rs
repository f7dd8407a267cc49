//! Closed-form area and latency counts for the traditional cascade and the
//! folded processor.
//!
//! Each butterfly unit is one complex multiplier plus one adder and one
//! subtractor. Latency is counted in clock cycles only.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Traditional,
    Folded,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::Traditional => "traditional",
            Architecture::Folded => "folded",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResourceReport {
    pub n: u64,
    pub architecture: Architecture,
    pub butterfly_units: u64,
    pub multipliers: u64,
    pub adders_subtractors: u64,
    /// Twiddle coefficients stored: the folded ROM, or the constants wired into
    /// every butterfly of the cascade.
    pub rom_coefficients: u64,
    pub frame_cycles: u64,
}

fn stages(n: u64) -> Result<u64> {
    Ok(crate::stage_count(usize::try_from(n).unwrap_or(usize::MAX))? as u64)
}

/// `(n/2) log2(n)` butterflies, one per node of the spatial cascade.
pub fn traditional_resources(n: u64) -> Result<ResourceReport> {
    let l = stages(n)?;
    let bu = n / 2 * l;
    Ok(ResourceReport {
        n,
        architecture: Architecture::Traditional,
        butterfly_units: bu,
        multipliers: bu,
        adders_subtractors: n * l,
        rom_coefficients: bu,
        frame_cycles: l,
    })
}

/// `n/2` butterflies reused for `log2(n)` cycles, fed by a `log2(n) x n/2` ROM.
pub fn folded_resources(n: u64) -> Result<ResourceReport> {
    let l = stages(n)?;
    let bu = n / 2;
    Ok(ResourceReport {
        n,
        architecture: Architecture::Folded,
        butterfly_units: bu,
        multipliers: bu,
        adders_subtractors: n,
        rom_coefficients: bu * l,
        frame_cycles: l,
    })
}

pub fn resources(n: u64, architecture: Architecture) -> Result<ResourceReport> {
    match architecture {
        Architecture::Traditional => traditional_resources(n),
        Architecture::Folded => folded_resources(n),
    }
}

/// Folded over traditional butterfly count, `1 / log2(n)`.
pub fn reduction_factor(n: u64) -> Result<Ratio<u64>> {
    let folded = folded_resources(n)?;
    let traditional = traditional_resources(n)?;
    Ok(Ratio::new(
        folded.butterfly_units,
        traditional.butterfly_units,
    ))
}

/// One row of the side-by-side comparison table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResourceRow {
    pub n: u64,
    pub traditional: ResourceReport,
    pub folded: ResourceReport,
    pub alpha: Ratio<u64>,
}

pub fn resource_table(ns: &[u64]) -> Result<Vec<ResourceRow>> {
    ns.iter()
        .map(|&n| {
            Ok(ResourceRow {
                n,
                traditional: traditional_resources(n)?,
                folded: folded_resources(n)?,
                alpha: reduction_factor(n)?,
            })
        })
        .collect()
}

/// Powers of two in `lo..=hi`. Both bounds must themselves be powers of two >= 2.
pub fn power_of_two_range(lo: u64, hi: u64) -> Result<Vec<u64>> {
    stages(lo)?;
    stages(hi)?;
    if lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    Ok(std::iter::successors(Some(lo), |&n| n.checked_mul(2))
        .take_while(|&n| n <= hi)
        .collect())
}
