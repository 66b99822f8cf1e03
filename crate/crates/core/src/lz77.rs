//! LZ77 factorization straight from the grammar, and the way back.
//!
//! The leftmost occurrence of `T[j..j+k-1]` is found from its primary
//! occurrences: each point carries `min vOcc(e) + |e.left|`, and an
//! occurrence crossing the split of `e` after `P[..i]` starts `i` before
//! that. Factor lengths are found by doubling and then binary search.

use alloc::vec;
use alloc::vec::Vec;

use crate::encoder::Encoding;
use crate::error::{Error, Result};
use crate::grammar_store::{Assignment, Sig, Symbol};
use crate::index::{left_of, split_positions, Grid, Index, Substr};
use crate::lcp_parse::ParserParams;

/// One LZ77 factor. `Ref` positions are 1-based and point at the leftmost
/// earlier occurrence; the copy may overlap the factor itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Literal(Symbol),
    Ref { pos: u64, len: u64 },
}

impl Factor {
    pub fn len(&self) -> u64 {
        match *self {
            Factor::Literal(_) => 1,
            Factor::Ref { len, .. } => len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Leftmost node occurrence per signature and the derived point weights.
#[derive(Debug, Clone)]
pub struct WeightMap {
    /// Indexed by signature id; `u64::MAX` when not under the start.
    min_occ: Vec<u64>,
    grid: Grid,
}

impl WeightMap {
    /// Smallest element of `vOcc(e)`.
    pub fn min_occ(&self, e: Sig) -> Option<u64> {
        self.min_occ.get(e.0 as usize).copied().filter(|&v| v != u64::MAX)
    }

    /// `min vOcc(e) + |e.left|`.
    pub fn weight(&self, enc: &Encoding, e: Sig) -> Option<u64> {
        let l = left_of(enc.store(), e)?;
        self.min_occ(e).map(|m| m + l.len)
    }
}

/// Leftmost node occurrences, parents before children.
fn min_occurrences(enc: &Encoding) -> Vec<u64> {
    let st = enc.store();
    let top = st.next_id() as usize;
    let mut m = vec![u64::MAX; top];
    let Some(s) = enc.start() else { return m };
    m[s.0 as usize] = 1;
    let sigs: Vec<Sig> = st.iter().map(|(s, _)| s).collect();
    for &p in sigs.iter().rev() {
        let at = m[p.0 as usize];
        if at == u64::MAX {
            continue;
        }
        match st.node(p).assign {
            Assignment::Char(_) => {}
            Assignment::Pair(l, r) => {
                m[l.0 as usize] = m[l.0 as usize].min(at);
                let ar = at + st.length(l);
                m[r.0 as usize] = m[r.0 as usize].min(ar);
            }
            Assignment::RunOf(b, _) => m[b.0 as usize] = m[b.0 as usize].min(at),
        }
    }
    m
}

pub fn compute_weights(enc: &Encoding, idx: &Index) -> WeightMap {
    let min_occ = min_occurrences(enc);
    let st = enc.store();
    let w: Vec<u64> = idx
        .x_order()
        .iter()
        .map(|&e| {
            let m = min_occ[e.0 as usize];
            if m == u64::MAX {
                u64::MAX
            } else {
                m + left_of(st, e).unwrap().len
            }
        })
        .collect();
    let grid = Grid::new(&idx.y_ranks(), &w);
    WeightMap { min_occ, grid }
}

/// Minimum weight among the primary occurrences of `p` split after `p[..i]`.
pub fn fst_occ(enc: &Encoding, idx: &Index, wmap: &WeightMap, p: Substr, i: u64) -> Option<u64> {
    let r = idx.pattern_ranges(enc, p, i)?;
    wmap.grid.min_weight(r.x1, r.x2, r.y1, r.y2).filter(|&w| w != u64::MAX)
}

/// Start of the leftmost occurrence of `T[j..j+k-1]`, if it lies before `j`.
pub fn fst(enc: &Encoding, idx: &Index, wmap: &WeightMap, j: u64, k: u64) -> Result<Option<u64>> {
    let n = enc.len();
    if j == 0 || k == 0 || j.checked_add(k).map_or(true, |e| e - 1 > n) {
        return Err(Error::Range { pos: j, len: k, bound: n });
    }
    let s = enc.start().expect("nonempty text");
    let best = if k == 1 {
        let c = enc.char_at(s, j)?;
        enc.store().lookup(&Assignment::Char(c)).and_then(|e| wmap.min_occ(e))
    } else {
        let p = Substr { sig: s, pos: j, len: k };
        split_positions(enc, p)?.into_iter().filter_map(|i| fst_occ(enc, idx, wmap, p, i).map(|w| w - i)).min()
    };
    Ok(best.filter(|&b| b < j))
}

/// Greedy LZ77 factorization with self-reference.
pub fn factorize(enc: &Encoding) -> Result<Vec<Factor>> {
    let n = enc.len();
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    let idx = Index::build(enc);
    let wmap = compute_weights(enc, &idx);
    let s = enc.start().unwrap();
    let mut j = 1;
    while j <= n {
        let Some(mut src) = fst(enc, &idx, &wmap, j, 1)? else {
            out.push(Factor::Literal(enc.char_at(s, j)?));
            j += 1;
            continue;
        };
        let room = n - j + 1;
        // good: longest known length with an earlier occurrence.
        let mut good = 1;
        let mut bad = None;
        let mut k = 2;
        while k <= room {
            match fst(enc, &idx, &wmap, j, k)? {
                Some(p) => {
                    good = k;
                    src = p;
                    k *= 2;
                }
                None => {
                    bad = Some(k);
                    break;
                }
            }
        }
        let mut hi = bad.unwrap_or(room + 1);
        while hi - good > 1 {
            let mid = good + (hi - good) / 2;
            match fst(enc, &idx, &wmap, j, mid)? {
                Some(p) => {
                    good = mid;
                    src = p;
                }
                None => hi = mid,
            }
        }
        out.push(Factor::Ref { pos: src, len: good });
        j += good;
    }
    Ok(out)
}

/// Builds an encoding from factors by appending one factor at a time.
pub fn from_factors(factors: &[Factor], params: ParserParams) -> Result<Encoding> {
    let mut enc = Encoding::new(params);
    for (at, f) in factors.iter().enumerate() {
        let n = enc.len();
        match *f {
            Factor::Literal(c) => {
                enc.insert_str(n + 1, &[c])?;
            }
            Factor::Ref { pos, len } => {
                if pos == 0 || pos > n || len == 0 {
                    return Err(Error::Format(alloc::format!("factor {} refers to position {} of {}", at + 1, pos, n)));
                }
                let mut left = len;
                let mut from = pos;
                while left > 0 {
                    let n = enc.len();
                    let chunk = left.min(n - from + 1);
                    enc.insert_copy(n + 1, from, chunk)?;
                    from += chunk;
                    left -= chunk;
                }
            }
        }
    }
    Ok(enc)
}
