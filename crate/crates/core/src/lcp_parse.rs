//! Deterministic locally consistent parsing.
//!
//! A sequence of pairwise-distinct neighbours is first reduced to three
//! colours by repeated least-differing-bit relabelling, then landmark bits
//! are placed on local maxima (and on isolated local minima). Blocks start
//! at landmarks. Every bit depends only on a bounded window around its
//! position, so equal windows parse identically wherever they occur.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Window widths of the parser. Two encodings with equal params parse
/// identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParserParams {
    pub delta_l: usize,
    pub delta_r: usize,
    pub reduce_rounds: usize,
}

impl ParserParams {
    pub const DEFAULT: ParserParams = ParserParams { delta_l: 12, delta_r: 6, reduce_rounds: 6 };

    pub fn new(delta_l: usize, delta_r: usize, reduce_rounds: usize) -> Result<Self> {
        let p = ParserParams { delta_l, delta_r, reduce_rounds };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        // After `reduce_rounds` relabellings a 64-bit alphabet is down to at
        // most six colours only if at least six rounds run.
        if self.reduce_rounds < 6 {
            return Err(Error::Invariant("reduce_rounds must be at least 6".into()));
        }
        if self.delta_l < self.reduce_rounds + 6 || self.delta_r < 6 {
            return Err(Error::Invariant("context windows too narrow".into()));
        }
        Ok(())
    }

    /// Stop threshold on the number of runs used by common-sequence extraction.
    pub fn stop_runs(&self) -> usize {
        self.delta_l + self.delta_r + 9
    }
}

impl Default for ParserParams {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// One landmark bit per input position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandmarkBits {
    bits: Vec<bool>,
}

impl LandmarkBits {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        LandmarkBits { bits }
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    /// Checks the three landmark properties: first bit set, no two adjacent
    /// set bits, and a set bit in every window of four positions that ends
    /// before the last position.
    pub fn check(&self) -> bool {
        let b = &self.bits;
        if b.is_empty() || !b[0] {
            return false;
        }
        if b.windows(2).any(|w| w[0] && w[1]) {
            return false;
        }
        let n = b.len();
        (0..n.saturating_sub(4)).all(|i| b[i..i + 4].iter().any(|&x| x))
    }
}

/// A maximal run `symbol^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run<T> {
    pub symbol: T,
    pub exponent: u64,
}

fn check_distinct(p: &[u64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(index) = p.windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::AdjacentEqual { index });
    }
    Ok(())
}

fn relabel_round(p: &mut [u64]) {
    // Right to left so p[i - 1] still holds the previous round's value.
    for i in (0..p.len()).rev() {
        let prev = if i == 0 { u64::MAX } else { p[i - 1] };
        let k = (prev ^ p[i]).trailing_zeros() as u64;
        p[i] = 2 * k + ((p[i] >> k) & 1);
    }
}

fn recolor_sweeps(p: &mut [u64]) {
    let n = p.len();
    for c in [5u64, 4, 3] {
        for i in 0..n {
            if p[i] != c {
                continue;
            }
            let left = if i > 0 { Some(p[i - 1]) } else { None };
            let right = if i + 1 < n { Some(p[i + 1]) } else { None };
            p[i] = (0..3).find(|&x| Some(x) != left && Some(x) != right).unwrap();
        }
    }
}

fn reduce_unchecked(p: &[u64], rounds: usize) -> Vec<u64> {
    let mut out = p.to_vec();
    for _ in 0..rounds {
        relabel_round(&mut out);
    }
    debug_assert!(out.iter().all(|&c| c <= 5));
    recolor_sweeps(&mut out);
    out
}

/// Reduces an adjacent-distinct sequence to colours in `0..=2`, keeping
/// neighbours distinct.
pub fn reduce_colors<T: Copy + Into<u64>>(p: &[T], params: &ParserParams) -> Result<Vec<u8>> {
    let raw: Vec<u64> = p.iter().map(|&x| x.into()).collect();
    check_distinct(&raw)?;
    if raw[0] == u64::MAX {
        return Err(Error::SentinelValue);
    }
    Ok(reduce_unchecked(&raw, params.reduce_rounds).into_iter().map(|c| c as u8).collect())
}

/// Landmark bits of a window of a longer sequence.
///
/// `at_start`/`at_end` say whether the window touches the ends of the full
/// sequence. Bits are exact at indices `>= delta_l` (or all, when
/// `at_start`) and `< len - delta_r` (or all, when `at_end`); others are
/// unspecified.
pub(crate) fn landmarks_in_window(
    p: &[u64],
    params: &ParserParams,
    at_start: bool,
    at_end: bool,
) -> Vec<bool> {
    let n = p.len();
    if n == 0 {
        return Vec::new();
    }
    let colors = reduce_unchecked(p, params.reduce_rounds);
    let c = |i: isize| -> i8 {
        if i < 0 || i as usize >= n {
            -1
        } else {
            colors[i as usize] as i8
        }
    };
    let is_max = |i: isize| -> bool {
        i >= 0 && (i as usize) < n && c(i) > c(i - 1) && c(i) > c(i + 1)
    };
    let mut d = vec![false; n];
    for (i, slot) in d.iter_mut().enumerate() {
        let i = i as isize;
        if is_max(i) {
            *slot = true;
        } else if c(i) < c(i - 1) && c(i) < c(i + 1) && !is_max(i - 1) && !is_max(i + 1) {
            *slot = true;
        }
    }
    if at_start {
        d[0] = true;
        if n > 1 {
            d[1] = false;
        }
    }
    if at_end && n > 1 {
        d[n - 1] = false;
    }
    d
}

/// Landmark bits of a whole adjacent-distinct sequence.
pub fn compute_landmarks<T: Copy + Into<u64>>(
    p: &[T],
    params: &ParserParams,
) -> Result<LandmarkBits> {
    let raw: Vec<u64> = p.iter().map(|&x| x.into()).collect();
    check_distinct(&raw)?;
    if raw[0] == u64::MAX {
        return Err(Error::SentinelValue);
    }
    Ok(LandmarkBits { bits: landmarks_in_window(&raw, params, true, true) })
}

/// Splits `p` into blocks that start exactly at the set bits of `d`.
pub fn eblock<'a, T>(p: &'a [T], d: &LandmarkBits) -> Result<Vec<&'a [T]>> {
    if p.len() != d.len() {
        return Err(Error::Invariant("landmark bits and sequence differ in length".into()));
    }
    if p.is_empty() {
        return Ok(Vec::new());
    }
    if !d.get(0) {
        return Err(Error::Invariant("first landmark bit is not set".into()));
    }
    let mut out = Vec::with_capacity(p.len() / 2 + 1);
    let mut start = 0;
    for i in 1..p.len() {
        if d.get(i) {
            out.push(&p[start..i]);
            start = i;
        }
    }
    out.push(&p[start..]);
    Ok(out)
}

/// Groups maximal runs of equal symbols.
pub fn epow<T: Copy + PartialEq>(s: &[T]) -> Vec<Run<T>> {
    let mut out: Vec<Run<T>> = Vec::new();
    for &x in s {
        match out.last_mut() {
            Some(r) if r.symbol == x => r.exponent += 1,
            _ => out.push(Run { symbol: x, exponent: 1 }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: ParserParams = ParserParams::DEFAULT;

    #[test]
    fn reduce_single() {
        let c = reduce_colors(&[5u64], &P).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0] <= 2);
    }

    #[test]
    fn relabel_first_round_by_hand() {
        let mut v = [3u64, 7];
        relabel_round(&mut v);
        assert_eq!(v, [4, 5]);
        let c = reduce_colors(&[3u64, 7], &P).unwrap();
        assert_eq!(c, [0, 1]);
    }

    #[test]
    fn reduce_rejects_adjacent_equal() {
        assert_eq!(reduce_colors(&[1u64, 2, 2], &P), Err(Error::AdjacentEqual { index: 1 }));
        assert_eq!(compute_landmarks::<u64>(&[], &P), Err(Error::EmptyInput));
    }

    #[test]
    fn landmarks_small() {
        assert_eq!(compute_landmarks(&[5u64], &P).unwrap().as_slice(), &[true]);
        assert_eq!(compute_landmarks(&[3u64, 7], &P).unwrap().as_slice(), &[true, false]);
    }

    #[test]
    fn eblock_worked_example() {
        let p = [1u64, 2, 3, 2, 5, 7, 6, 4, 3, 4, 3, 4, 1, 2, 3, 4, 5];
        let d: Vec<bool> =
            [1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 1, 0, 0].iter().map(|&b| b == 1).collect();
        let blocks = eblock(&p, &LandmarkBits::from_bits(d)).unwrap();
        let expect: [&[u64]; 6] =
            [&[1, 2, 3], &[2, 5], &[7, 6, 4], &[3, 4, 3, 4], &[1, 2], &[3, 4, 5]];
        assert_eq!(blocks, expect);
    }

    #[test]
    fn eblock_two() {
        let d = compute_landmarks(&[3u64, 7], &P).unwrap();
        assert_eq!(eblock(&[3u64, 7], &d).unwrap(), [&[3u64, 7][..]]);
    }

    #[test]
    fn epow_examples() {
        let s: Vec<u8> = b"aabbbbbabb".to_vec();
        let runs: Vec<(u8, u64)> = epow(&s).into_iter().map(|r| (r.symbol, r.exponent)).collect();
        assert_eq!(runs, [(b'a', 2), (b'b', 5), (b'a', 1), (b'b', 2)]);
        assert_eq!(epow(&[9u64]), [Run { symbol: 9, exponent: 1 }]);
        assert_eq!(epow(&[4u64; 4]), [Run { symbol: 4, exponent: 4 }]);
    }

    #[test]
    fn params_validation() {
        assert!(ParserParams::new(12, 6, 6).is_ok());
        assert!(ParserParams::new(11, 6, 6).is_err());
        assert!(ParserParams::new(12, 5, 6).is_err());
    }

    fn all_colorings(n: usize, out: &mut Vec<Vec<u64>>, cur: &mut Vec<u64>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..3 {
            if cur.last() != Some(&c) {
                cur.push(c);
                all_colorings(n, out, cur);
                cur.pop();
            }
        }
    }

    // Every adjacent-distinct sequence over {0,1,2} up to length 11.
    #[test]
    fn landmark_rule_exhaustive() {
        for n in 1..=11 {
            let mut all = Vec::new();
            all_colorings(n, &mut all, &mut Vec::new());
            for p in all {
                let d = LandmarkBits::from_bits(landmarks_in_window(&p, &P, true, true));
                assert!(d.check(), "{:?} -> {:?}", p, d);
                let blocks = eblock(&p, &d).unwrap();
                for (k, b) in blocks.iter().enumerate() {
                    let last = k + 1 == blocks.len();
                    if n > 1 {
                        assert!(b.len() >= 2 && (b.len() <= 4 || (last && b.len() == 5)), "{:?}", p);
                    }
                }
            }
        }
    }
}
