//! Physical elements of the folded processor: butterfly unit, twiddle ROM,
//! routing network and register array.

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::numerics::{FixedComplex, FxFormat};
use crate::oracle;

/// One radix-2 butterfly: `(a + w*b, a - w*b)`.
///
/// The product `w*b` is formed once and shared by both outputs, the way a single
/// complex multiplier feeds the adder and the subtractor.
pub fn butterfly(
    a: FixedComplex,
    b: FixedComplex,
    w: FixedComplex,
) -> Result<(FixedComplex, FixedComplex)> {
    let product = w.try_mul(b)?;
    Ok((a.try_add(product)?, a.try_sub(product)?))
}

pub(crate) fn butterfly_unchecked(
    a: FixedComplex,
    b: FixedComplex,
    w: FixedComplex,
) -> (FixedComplex, FixedComplex) {
    let product = w.mul_unchecked(b);
    (a.add_unchecked(product), a.sub_unchecked(product))
}

/// Reverses the low `bits` bits of `index`.
pub fn bit_reverse(index: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        index.reverse_bits() >> (usize::BITS - bits)
    }
}

/// `out[i] = x[bit_reverse(i)]`.
pub fn bit_reverse_permute<T: Copy>(x: &[T]) -> Result<Vec<T>> {
    let bits = crate::log2_exact(x.len())?;
    Ok((0..x.len()).map(|i| x[bit_reverse(i, bits)]).collect())
}

/// Exponent `e` such that ROM entry `(stage, column)` holds `W_n^e`.
pub fn twiddle_exponent(n: usize, stage: u32, column: usize) -> usize {
    let stages = n.trailing_zeros();
    let span = 1usize << (stage - 1);
    (column % span) << (stages - stage)
}

/// `log2(n)` rows of `n/2` quantized twiddle factors, addressed by the stage bus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwiddleRom {
    n: usize,
    format: FxFormat,
    rows: Vec<Vec<FixedComplex>>,
}

impl TwiddleRom {
    pub fn build(n: usize, format: FxFormat) -> Result<Self> {
        let stages = crate::stage_count(n)?;
        let rows = (1..=stages)
            .map(|stage| {
                (0..n / 2)
                    .map(|column| {
                        let w = oracle::twiddle(twiddle_exponent(n, stage, column), n);
                        FixedComplex::from_complex(w, format)
                    })
                    .collect()
            })
            .collect();
        Ok(TwiddleRom { n, format, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn format(&self) -> FxFormat {
        self.format
    }

    pub fn stages(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn width(&self) -> usize {
        self.n / 2
    }

    /// Row read out when the stage bus carries `stage` (1-based).
    pub fn row(&self, stage: u32) -> Result<&[FixedComplex]> {
        check_stage(stage, self.stages())?;
        Ok(&self.rows[stage as usize - 1])
    }

    /// `(stage, column, coefficient)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, usize, FixedComplex)> + '_ {
        self.rows.iter().enumerate().flat_map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(move |(c, &w)| (r as u32 + 1, c, w))
        })
    }
}

fn check_stage(stage: u32, stages: u32) -> Result<()> {
    if stage == 0 || stage > stages {
        Err(Error::StageOutOfRange { stage, stages })
    } else {
        Ok(())
    }
}

/// `n` sample slots holding butterfly outputs between stages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterArray {
    slots: Vec<FixedComplex>,
}

impl RegisterArray {
    pub fn new(n: usize, format: FxFormat) -> Self {
        RegisterArray {
            slots: vec![FixedComplex::zero(format); n],
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[FixedComplex] {
        &self.slots
    }

    /// Clock edge: replaces every slot at once.
    pub fn latch(&mut self, next: Vec<FixedComplex>) -> Result<()> {
        if next.len() != self.slots.len() {
            return Err(Error::LengthMismatch {
                expected: self.slots.len(),
                actual: next.len(),
            });
        }
        self.slots = next;
        Ok(())
    }
}

/// One butterfly's connection in a stage: the two register indices it reads
/// and writes back, and the ROM column feeding its twiddle input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ButterflyPair {
    pub top: usize,
    pub bottom: usize,
    pub twiddle_column: usize,
}

/// Routing-network configuration for one value of the stage bus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageRouting {
    pub stage: u32,
    pub pairs: Vec<ButterflyPair>,
}

impl StageRouting {
    /// True when every index in `0..n` is touched by exactly one pair.
    pub fn is_perfect_matching(&self, n: usize) -> bool {
        if self.pairs.len() * 2 != n {
            return false;
        }
        let mut seen = vec![false; n];
        for p in &self.pairs {
            for idx in [p.top, p.bottom] {
                if idx >= n || std::mem::replace(&mut seen[idx], true) {
                    return false;
                }
            }
        }
        true
    }

    /// True when every pair spans `2^(stage-1)`.
    pub fn has_stage_distance(&self) -> bool {
        let distance = 1usize << (self.stage - 1);
        self.pairs
            .iter()
            .all(|p| p.bottom.checked_sub(p.top) == Some(distance))
    }
}

/// Pairs `(k + j, k + j + 2^(m-1))` for `k = 0, 2^m, ...` and `j < 2^(m-1)`;
/// butterfly `b` takes the `b`-th pair and ROM column `b`.
pub fn route_stage(n: usize, stage: u32) -> Result<StageRouting> {
    let stages = crate::stage_count(n)?;
    check_stage(stage, stages)?;
    let half = 1usize << (stage - 1);
    let span = half << 1;
    let pairs = (0..n)
        .step_by(span)
        .flat_map(|k| (0..half).map(move |j| (k + j, k + j + half)))
        .enumerate()
        .map(|(b, (top, bottom))| ButterflyPair {
            top,
            bottom,
            twiddle_column: b,
        })
        .collect();
    Ok(StageRouting { stage, pairs })
}

/// True when the union of all stages' butterfly connections links every
/// index in `0..n`, i.e. every output depends on every input.
pub fn stages_connected(n: usize, stages: &[StageRouting]) -> bool {
    let mut sets = UnionFind::<usize>::new(n);
    for p in stages.iter().flat_map(|s| &s.pairs) {
        if p.top >= n || p.bottom >= n {
            return false;
        }
        sets.union(p.top, p.bottom);
    }
    (1..n).all(|i| sets.equiv(0, i))
}

/// Evaluates every butterfly of one stage on `current`, returning the values to latch.
pub(crate) fn evaluate_stage(
    routing: &StageRouting,
    twiddles: &[FixedComplex],
    current: &[FixedComplex],
) -> Vec<FixedComplex> {
    let mut next = current.to_vec();
    for p in &routing.pairs {
        let (hi, lo) = butterfly_unchecked(
            current[p.top],
            current[p.bottom],
            twiddles[p.twiddle_column],
        );
        next[p.top] = hi;
        next[p.bottom] = lo;
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;
    use std::f64::consts::FRAC_1_SQRT_2;

    const Q2_15: FxFormat = FxFormat::SAMPLE_DEFAULT;

    fn q(re: f64, im: f64) -> FixedComplex {
        FixedComplex::quantize(re, im, Q2_15)
    }

    fn pairs(n: usize, stage: u32) -> Vec<(usize, usize)> {
        route_stage(n, stage)
            .unwrap()
            .pairs
            .iter()
            .map(|p| (p.top, p.bottom))
            .collect()
    }

    #[test]
    fn butterfly_examples() {
        assert_eq!(
            butterfly(q(1.0, 0.0), q(1.0, 0.0), q(1.0, 0.0)).unwrap(),
            (q(2.0, 0.0), q(0.0, 0.0))
        );

        let (x, y) = (0.375, -0.625);
        assert_eq!(
            butterfly(q(0.0, 0.0), q(x, y), q(0.0, -1.0)).unwrap(),
            (q(y, -x), q(-y, x))
        );

        // 23170 = round(2^15 / sqrt 2); products of 23170 with 2^15 are exact
        let (hi, lo) =
            butterfly(q(1.0, 0.0), q(1.0, 0.0), q(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)).unwrap();
        assert_eq!(hi.raw(), (32768 + 23170, -23170));
        assert_eq!(lo.raw(), (32768 - 23170, 23170));
        let ulp = Q2_15.ulp();
        assert!((hi.re().to_f64() - (1.0 + FRAC_1_SQRT_2)).abs() <= 2.0 * ulp);
        assert!((lo.im().to_f64() - FRAC_1_SQRT_2).abs() <= 2.0 * ulp);

        let other = FixedComplex::zero(FxFormat::Q1_15);
        assert!(butterfly(q(1.0, 0.0), other, q(1.0, 0.0)).is_err());
    }

    #[test]
    fn unit_twiddle_butterfly_is_exact() {
        let (a, b) = (
            FixedComplex::from_raw(1234, -999, Q2_15),
            FixedComplex::from_raw(-77, 4321, Q2_15),
        );
        let (hi, lo) = butterfly(a, b, q(1.0, 0.0)).unwrap();
        assert_eq!(hi, a.try_add(b).unwrap());
        assert_eq!(lo, a.try_sub(b).unwrap());
    }

    #[test]
    fn bit_reversal_examples() {
        assert_eq!(bit_reverse(6, 3), 3);
        assert_eq!(bit_reverse(3, 3), 6);
        let v: Vec<usize> = (0..8).collect();
        assert_eq!(
            bit_reverse_permute(&v).unwrap(),
            vec![0, 4, 2, 6, 1, 5, 3, 7]
        );
        assert_eq!(bit_reverse_permute(&[10, 20]).unwrap(), vec![10, 20]);
        assert!(bit_reverse_permute(&[1, 2, 3]).is_err());
    }

    #[test]
    fn bit_reversal_is_involution() {
        for bits in 0..=10u32 {
            let v: Vec<usize> = (0..1usize << bits).collect();
            let twice = bit_reverse_permute(&bit_reverse_permute(&v).unwrap()).unwrap();
            assert_eq!(twice, v);
        }
    }

    #[test]
    fn routing_examples_n8() {
        assert_eq!(pairs(8, 1), vec![(0, 1), (2, 3), (4, 5), (6, 7)]);
        assert_eq!(pairs(8, 2), vec![(0, 2), (1, 3), (4, 6), (5, 7)]);
        assert_eq!(pairs(8, 3), vec![(0, 4), (1, 5), (2, 6), (3, 7)]);
        assert!(route_stage(8, 0).is_err());
        assert!(route_stage(8, 4).is_err());
        assert!(route_stage(6, 1).is_err());
    }

    #[test]
    fn routing_is_perfect_matching_with_stage_distance() {
        for bits in 1..=10u32 {
            let n = 1usize << bits;
            for stage in 1..=bits {
                let r = route_stage(n, stage).unwrap();
                assert!(r.is_perfect_matching(n), "n={n} stage={stage}");
                assert!(r.has_stage_distance(), "n={n} stage={stage}");
                let cols: Vec<usize> = r.pairs.iter().map(|p| p.twiddle_column).collect();
                assert_eq!(cols, (0..n / 2).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn stages_connect_all_indices() {
        for bits in 1..=10u32 {
            let n = 1usize << bits;
            let all: Vec<StageRouting> = (1..=bits).map(|s| route_stage(n, s).unwrap()).collect();
            assert!(stages_connected(n, &all));
            if bits > 1 {
                assert!(!stages_connected(n, &all[..all.len() - 1]));
            }
        }
    }

    #[test]
    fn matching_check_catches_defects() {
        let mut r = route_stage(8, 2).unwrap();
        r.pairs[1].bottom = 2;
        assert!(!r.is_perfect_matching(8));
        r.pairs.pop();
        assert!(!r.is_perfect_matching(8));
    }

    #[test]
    fn rom_shape_and_rows_n8() {
        let rom = TwiddleRom::build(8, Q2_15).unwrap();
        assert_eq!(rom.stages(), 3);
        assert_eq!(rom.width(), 4);
        assert_eq!(rom.entries().count(), 12);

        let one = q(1.0, 0.0);
        let w1 = q(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);
        let w2 = q(0.0, -1.0);
        let w3 = q(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2);
        assert_eq!(rom.row(1).unwrap(), &[one; 4]);
        assert_eq!(rom.row(2).unwrap(), &[one, w2, one, w2]);
        assert_eq!(rom.row(3).unwrap(), &[one, w1, w2, w3]);
        assert!(rom.row(4).is_err());
        assert!(TwiddleRom::build(1, Q2_15).is_err());
        assert!(TwiddleRom::build(24, Q2_15).is_err());
    }

    #[test]
    fn rom_magnitudes_and_repetition() {
        for bits in 1..=10u32 {
            let n = 1usize << bits;
            let rom = TwiddleRom::build(n, Q2_15).unwrap();
            let ulp = Q2_15.ulp();
            for (_, _, w) in rom.entries() {
                assert!(w.to_complex64().norm() <= 1.0 + ulp);
            }
            for stage in 2..=bits {
                let row = rom.row(stage).unwrap();
                let distinct: HashSet<_> = row.iter().map(|w| w.raw()).collect();
                assert_eq!(distinct.len(), 1 << (stage - 1), "n={n} stage={stage}");
                for w in &distinct {
                    let count = row.iter().filter(|v| v.raw() == *w).count();
                    assert_eq!(count, n >> stage);
                }
            }
        }
    }

    #[test]
    fn register_array_latch() {
        let mut regs = RegisterArray::new(4, Q2_15);
        assert_eq!(regs.len(), 4);
        assert!(regs.latch(vec![q(1.0, 0.0); 3]).is_err());
        regs.latch(vec![q(1.0, 0.0); 4]).unwrap();
        assert_eq!(regs.slots()[3], q(1.0, 0.0));
    }
}
