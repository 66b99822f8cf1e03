//! Pattern index over an encoding.
//!
//! Every pair or run signature `e` splits its expansion into `e.left` and
//! `e.right`. `X` sorts the signatures by reversed left string, `Y` by right
//! string, and each signature is a point `(x-rank, y-rank)`. An occurrence of
//! `P` crossing such a split at offset `j` of `P` is a point in the rectangle
//! of signatures whose left ends with `P[..j]` and whose right starts with
//! `P[j+1..]`. The rectangle is read off a merge-sort tree.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;

use crate::editor::EditDelta;
use crate::encoder::Encoding;
use crate::error::{Error, Result};
use crate::grammar_store::{Assignment, GrammarStore, Sig, Symbol};

/// `val(sig)[pos..pos+len-1]`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Substr {
    pub sig: Sig,
    pub pos: u64,
    pub len: u64,
}

impl Substr {
    pub fn whole(st: &GrammarStore, sig: Sig) -> Result<Self> {
        Ok(Substr { sig, pos: 1, len: st.len_of(sig)? })
    }

    fn end(&self) -> u64 {
        self.pos + self.len - 1
    }
}

/// `e.left`: the first child, or one copy of a run's base.
pub fn left_of(st: &GrammarStore, e: Sig) -> Option<Substr> {
    match st.node(e).assign {
        Assignment::Char(_) => None,
        Assignment::Pair(l, _) => Some(Substr { sig: l, pos: 1, len: st.length(l) }),
        Assignment::RunOf(b, _) => Some(Substr { sig: b, pos: 1, len: st.length(b) }),
    }
}

/// `e.right`: the second child, or the remaining copies of a run's base.
pub fn right_of(st: &GrammarStore, e: Sig) -> Option<Substr> {
    match st.node(e).assign {
        Assignment::Char(_) => None,
        Assignment::Pair(_, r) => Some(Substr { sig: r, pos: 1, len: st.length(r) }),
        Assignment::RunOf(b, d) => {
            let lb = st.length(b);
            Some(Substr { sig: e, pos: lb + 1, len: (d - 1) * lb })
        }
    }
}

/// Lexicographic comparison, left to right.
fn cmp_fwd(enc: &Encoding, a: Substr, b: Substr) -> Ordering {
    let lim = a.len.min(b.len);
    let l = if lim == 0 { 0 } else { enc.lce_raw(a.sig, a.pos, b.sig, b.pos, true, lim) };
    if l == lim {
        return a.len.cmp(&b.len);
    }
    let ca = enc.char_at(a.sig, a.pos + l).expect("inside a");
    let cb = enc.char_at(b.sig, b.pos + l).expect("inside b");
    ca.cmp(&cb)
}

/// Lexicographic comparison of the reversed strings.
fn cmp_bwd(enc: &Encoding, a: Substr, b: Substr) -> Ordering {
    let lim = a.len.min(b.len);
    let l = if lim == 0 {
        0
    } else {
        let st = enc.store();
        let ra = st.length(a.sig) - a.end() + 1;
        let rb = st.length(b.sig) - b.end() + 1;
        enc.lce_raw(a.sig, ra, b.sig, rb, false, lim)
    };
    if l == lim {
        return a.len.cmp(&b.len);
    }
    let ca = enc.char_at(a.sig, a.end() - l).expect("inside a");
    let cb = enc.char_at(b.sig, b.end() - l).expect("inside b");
    ca.cmp(&cb)
}

fn x_cmp(enc: &Encoding, a: Sig, b: Sig) -> Ordering {
    let st = enc.store();
    cmp_bwd(enc, left_of(st, a).unwrap(), left_of(st, b).unwrap()).then(a.cmp(&b))
}

fn y_cmp(enc: &Encoding, a: Sig, b: Sig) -> Ordering {
    let st = enc.store();
    cmp_fwd(enc, right_of(st, a).unwrap(), right_of(st, b).unwrap()).then(a.cmp(&b))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Less,
    Prefix,
    Greater,
}

/// Where a key sits relative to the set of keys starting with `q`.
fn classify(enc: &Encoding, key: Substr, q: Substr, fwd: bool) -> Class {
    let lim = key.len.min(q.len);
    let l = if lim == 0 {
        0
    } else if fwd {
        enc.lce_raw(key.sig, key.pos, q.sig, q.pos, true, lim)
    } else {
        let st = enc.store();
        enc.lce_raw(key.sig, st.length(key.sig) - key.end() + 1, q.sig, st.length(q.sig) - q.end() + 1, false, lim)
    };
    if l == q.len {
        return Class::Prefix;
    }
    if l == key.len {
        return Class::Less;
    }
    let (ck, cq) = if fwd {
        (enc.char_at(key.sig, key.pos + l), enc.char_at(q.sig, q.pos + l))
    } else {
        (enc.char_at(key.sig, key.end() - l), enc.char_at(q.sig, q.end() - l))
    };
    if ck.expect("inside key") < cq.expect("inside pattern") {
        Class::Less
    } else {
        Class::Greater
    }
}

/// Static 2D structure over points `(x, y[x])` for `x` in `0..n`, each with
/// a weight. Reports points in a rectangle and finds the minimum weight.
#[derive(Debug, Clone, Default)]
pub struct Grid {
    n: usize,
    /// Per tree node: `(y, x)` sorted by `y`.
    lists: Vec<Vec<(usize, usize)>>,
    /// Per tree node: min segment tree over the weights of `lists`.
    mins: Vec<Vec<u64>>,
}

impl Grid {
    /// `ys[x]` is the y-rank of the point with x-rank `x`.
    pub fn new(ys: &[usize], weights: &[u64]) -> Self {
        let n = ys.len();
        let mut g = Grid { n, lists: vec![Vec::new(); 4 * n.max(1)], mins: vec![Vec::new(); 4 * n.max(1)] };
        if n > 0 {
            g.build(1, 0, n, ys, weights);
        }
        g
    }

    fn build(&mut self, node: usize, lo: usize, hi: usize, ys: &[usize], w: &[u64]) {
        let list = if hi - lo == 1 {
            vec![(ys[lo], lo)]
        } else {
            let mid = (lo + hi) / 2;
            self.build(2 * node, lo, mid, ys, w);
            self.build(2 * node + 1, mid, hi, ys, w);
            let (a, b) = (&self.lists[2 * node], &self.lists[2 * node + 1]);
            let mut m = Vec::with_capacity(a.len() + b.len());
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                if j == b.len() || (i < a.len() && a[i] < b[j]) {
                    m.push(a[i]);
                    i += 1;
                } else {
                    m.push(b[j]);
                    j += 1;
                }
            }
            m
        };
        let k = list.len();
        let mut seg = vec![u64::MAX; 2 * k];
        for (i, &(_, x)) in list.iter().enumerate() {
            seg[k + i] = w[x];
        }
        for i in (1..k).rev() {
            seg[i] = seg[2 * i].min(seg[2 * i + 1]);
        }
        self.lists[node] = list;
        self.mins[node] = seg;
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn cover(&self, node: usize, lo: usize, hi: usize, x1: usize, x2: usize, out: &mut Vec<usize>) {
        if x2 < lo || hi <= x1 {
            return;
        }
        if x1 <= lo && hi - 1 <= x2 {
            out.push(node);
            return;
        }
        let mid = (lo + hi) / 2;
        self.cover(2 * node, lo, mid, x1, x2, out);
        self.cover(2 * node + 1, mid, hi, x1, x2, out);
    }

    fn y_slice(&self, node: usize, y1: usize, y2: usize) -> (usize, usize) {
        let l = &self.lists[node];
        let a = l.partition_point(|p| p.0 < y1);
        let b = l.partition_point(|p| p.0 <= y2);
        (a, b)
    }

    /// X-ranks of the points in `[x1, x2] x [y1, y2]`, ascending.
    pub fn report(&self, x1: usize, x2: usize, y1: usize, y2: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if x1 > x2 || y1 > y2 || self.n == 0 {
            return out;
        }
        let mut nodes = Vec::new();
        self.cover(1, 0, self.n, x1, x2.min(self.n - 1), &mut nodes);
        for nd in nodes {
            let (a, b) = self.y_slice(nd, y1, y2);
            out.extend(self.lists[nd][a..b].iter().map(|p| p.1));
        }
        out.sort_unstable();
        out
    }

    /// Minimum weight in `[x1, x2] x [y1, y2]`.
    pub fn min_weight(&self, x1: usize, x2: usize, y1: usize, y2: usize) -> Option<u64> {
        if x1 > x2 || y1 > y2 || self.n == 0 {
            return None;
        }
        let mut nodes = Vec::new();
        self.cover(1, 0, self.n, x1, x2.min(self.n - 1), &mut nodes);
        let mut best: Option<u64> = None;
        for nd in nodes {
            let (a, b) = self.y_slice(nd, y1, y2);
            if a >= b {
                continue;
            }
            let seg = &self.mins[nd];
            let k = self.lists[nd].len();
            let (mut l, mut r) = (a + k, b + k);
            let mut m = u64::MAX;
            while l < r {
                if l & 1 == 1 {
                    m = m.min(seg[l]);
                    l += 1;
                }
                if r & 1 == 1 {
                    r -= 1;
                    m = m.min(seg[r]);
                }
                l /= 2;
                r /= 2;
            }
            best = Some(best.map_or(m, |b: u64| b.min(m)));
        }
        best
    }
}

/// A primary occurrence: `P` starts at `offset` inside `val(sig)` and
/// crosses the split of `sig`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimaryOcc {
    pub sig: Sig,
    pub offset: u64,
}

/// Rank ranges of a split pattern, inclusive, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x1: usize,
    pub x2: usize,
    pub y1: usize,
    pub y2: usize,
}

/// The pattern index: ordered sets `X`, `Y` and the point grid.
#[derive(Debug, Default)]
pub struct Index {
    x: Vec<Sig>,
    y: Vec<Sig>,
    grid: RefCell<Option<Grid>>,
}

impl Index {
    pub fn build(enc: &Encoding) -> Self {
        let st = enc.store();
        let sigs: Vec<Sig> =
            st.iter().filter(|(_, n)| !matches!(n.assign, Assignment::Char(_))).map(|(s, _)| s).collect();
        let mut x = sigs.clone();
        x.sort_by(|&a, &b| x_cmp(enc, a, b));
        let mut y = sigs;
        y.sort_by(|&a, &b| y_cmp(enc, a, b));
        Index { x, y, grid: RefCell::new(None) }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Signatures in `X` order.
    pub fn x_order(&self) -> &[Sig] {
        &self.x
    }

    /// Signatures in `Y` order.
    pub fn y_order(&self) -> &[Sig] {
        &self.y
    }

    /// Brings the index in line with an update of `enc`.
    pub fn apply_delta(&mut self, enc: &Encoding, delta: &EditDelta) {
        if !delta.removed.is_empty() {
            let gone: BTreeSet<Sig> = delta.removed.iter().copied().collect();
            self.x.retain(|s| !gone.contains(s));
            self.y.retain(|s| !gone.contains(s));
        }
        let st = enc.store();
        for &s in &delta.added {
            if !st.contains(s) || matches!(st.node(s).assign, Assignment::Char(_)) {
                continue;
            }
            let at = self.x.partition_point(|&o| x_cmp(enc, o, s) == Ordering::Less);
            self.x.insert(at, s);
            let at = self.y.partition_point(|&o| y_cmp(enc, o, s) == Ordering::Less);
            self.y.insert(at, s);
        }
        *self.grid.get_mut() = None;
    }

    /// `ys[x]` for the current orders.
    pub fn y_ranks(&self) -> Vec<usize> {
        let pos: BTreeMap<Sig, usize> = self.y.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        self.x.iter().map(|s| pos[s]).collect()
    }

    fn with_grid<R>(&self, f: impl FnOnce(&Grid) -> R) -> R {
        let mut g = self.grid.borrow_mut();
        if g.is_none() {
            let ys = self.y_ranks();
            *g = Some(Grid::new(&ys, &vec![u64::MAX; ys.len()]));
        }
        f(g.as_ref().unwrap())
    }

    /// Signatures whose points lie in `[x1, x2] x [y1, y2]`, by x-rank.
    pub fn range_report(&self, x1: usize, x2: usize, y1: usize, y2: usize) -> Vec<Sig> {
        self.with_grid(|g| g.report(x1, x2, y1, y2)).into_iter().map(|x| self.x[x]).collect()
    }

    /// Rectangle of signatures whose left ends with `p[..j]` and whose right
    /// starts with `p[j+1..]`.
    pub fn pattern_ranges(&self, enc: &Encoding, p: Substr, j: u64) -> Option<Rect> {
        if j == 0 || j >= p.len {
            return None;
        }
        let st = enc.store();
        let ql = Substr { sig: p.sig, pos: p.pos, len: j };
        let qr = Substr { sig: p.sig, pos: p.pos + j, len: p.len - j };
        let xc = |s: &Sig| classify(enc, left_of(st, *s).unwrap(), ql, false);
        let x1 = self.x.partition_point(|s| xc(s) == Class::Less);
        let x2 = x1 + self.x[x1..].partition_point(|s| xc(s) == Class::Prefix);
        if x1 == x2 {
            return None;
        }
        let yc = |s: &Sig| classify(enc, right_of(st, *s).unwrap(), qr, true);
        let y1 = self.y.partition_point(|s| yc(s) == Class::Less);
        let y2 = y1 + self.y[y1..].partition_point(|s| yc(s) == Class::Prefix);
        if y1 == y2 {
            return None;
        }
        Some(Rect { x1, x2: x2 - 1, y1, y2: y2 - 1 })
    }

    /// Primary occurrences of `p` split after `p[..j]`.
    pub fn primary_occs(&self, enc: &Encoding, p: Substr, j: u64) -> Vec<PrimaryOcc> {
        let st = enc.store();
        match self.pattern_ranges(enc, p, j) {
            None => Vec::new(),
            Some(r) => self
                .range_report(r.x1, r.x2, r.y1, r.y2)
                .into_iter()
                .map(|e| PrimaryOcc { sig: e, offset: left_of(st, e).unwrap().len - j + 1 })
                .collect(),
        }
    }

    /// Checks sortedness and that the points are exactly the live pair and
    /// run signatures.
    pub fn check(&self, enc: &Encoding) -> Result<()> {
        let st = enc.store();
        let want: BTreeSet<Sig> =
            st.iter().filter(|(_, n)| !matches!(n.assign, Assignment::Char(_))).map(|(s, _)| s).collect();
        let xs: BTreeSet<Sig> = self.x.iter().copied().collect();
        let ys: BTreeSet<Sig> = self.y.iter().copied().collect();
        if xs != want || ys != want || self.x.len() != want.len() || self.y.len() != want.len() {
            return Err(Error::Invariant("index out of sync with the grammar".into()));
        }
        if self.x.windows(2).any(|w| x_cmp(enc, w[0], w[1]) != Ordering::Less) {
            return Err(Error::Invariant("X out of order".into()));
        }
        if self.y.windows(2).any(|w| y_cmp(enc, w[0], w[1]) != Ordering::Less) {
            return Err(Error::Invariant("Y out of order".into()));
        }
        Ok(())
    }
}

/// Split offsets that can carry a primary occurrence of `p`.
pub fn split_positions(enc: &Encoding, p: Substr) -> Result<Vec<u64>> {
    if p.len <= 1 {
        return Err(Error::Range { pos: p.pos, len: p.len, bound: 2 });
    }
    let u = enc.uniq_pow(p.sig, p.pos, p.len)?;
    if u.len() == 1 {
        return Ok(vec![1]);
    }
    let st = enc.store();
    let mut out = Vec::with_capacity(u.len() - 1);
    let mut cum = 0u64;
    for &(x, c) in &u.items()[..u.len() - 1] {
        cum += st.length(x) * c;
        out.push(cum);
    }
    Ok(out)
}

/// Start positions of `val(e)` as a node of the start's derivation tree.
pub fn vocc_of(enc: &Encoding, e: Sig) -> Result<Vec<u64>> {
    let st = enc.store();
    st.meta(e)?;
    let mut memo = BTreeMap::new();
    let mut v = vocc_rec(enc, e, &mut memo);
    v.sort_unstable();
    Ok(v)
}

fn vocc_rec(enc: &Encoding, e: Sig, memo: &mut BTreeMap<Sig, Vec<u64>>) -> Vec<u64> {
    if let Some(v) = memo.get(&e) {
        return v.clone();
    }
    let st = enc.store();
    let mut out = Vec::new();
    if Some(e) == enc.start() {
        out.push(1);
    }
    let mut parents = st.node(e).parent_refs().to_vec();
    parents.sort_unstable();
    parents.dedup();
    for p in parents {
        let offs: Vec<u64> = match st.node(p).assign {
            Assignment::Pair(l, r) => {
                let mut o = Vec::new();
                if l == e {
                    o.push(0);
                }
                if r == e {
                    o.push(st.length(l));
                }
                o
            }
            Assignment::RunOf(_, d) => (0..d).map(|c| c * st.length(e)).collect(),
            Assignment::Char(_) => Vec::new(),
        };
        let base = vocc_rec(enc, p, memo);
        for &b in &base {
            out.extend(offs.iter().map(|o| b + o));
        }
    }
    memo.insert(e, out.clone());
    out
}

/// Extra shifts of an occurrence at offset `j` inside a run signature.
pub fn run_offsets(enc: &Encoding, e: Sig, j: u64, plen: u64) -> Vec<u64> {
    let st = enc.store();
    match st.get(e).map(|n| n.assign) {
        Some(Assignment::RunOf(b, d)) => {
            let lb = st.length(b);
            let total = d * lb;
            let mut out = Vec::new();
            let mut c = 1;
            while j + c * lb + plen - 1 <= total {
                out.push(c * lb);
                c += 1;
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Occurrences of the substring `p` (already in the store) in the text.
pub fn search_substr(enc: &Encoding, idx: &Index, p: Substr) -> Result<Vec<u64>> {
    let st = enc.store();
    let n = enc.len();
    if p.len == 0 {
        return Err(Error::EmptyText);
    }
    if n == 0 || p.len > n {
        return Ok(Vec::new());
    }
    if p.len == 1 {
        let c = enc.char_at(p.sig, p.pos)?;
        return match st.lookup(&Assignment::Char(c)) {
            Some(s) => vocc_of(enc, s),
            None => Ok(Vec::new()),
        };
    }
    let mut out = Vec::new();
    for j in split_positions(enc, p)? {
        for occ in idx.primary_occs(enc, p, j) {
            let shifts = run_offsets(enc, occ.sig, occ.offset, p.len);
            for k in vocc_of(enc, occ.sig)? {
                out.push(k + occ.offset - 1);
                out.extend(shifts.iter().map(|c| k + occ.offset + c - 1));
            }
        }
    }
    out.sort_unstable();
    debug_assert!(out.windows(2).all(|w| w[0] != w[1]), "occurrence reported twice");
    out.dedup();
    Ok(out)
}

/// Occurrences of an arbitrary pattern. The pattern is interned for the
/// duration of the query and released afterwards.
pub fn search(enc: &mut Encoding, idx: &Index, p: &[Symbol]) -> Result<Vec<u64>> {
    if p.is_empty() {
        return Err(Error::EmptyText);
    }
    if enc.is_empty() || p.len() as u64 > enc.len() {
        return Ok(Vec::new());
    }
    if p.len() == 1 {
        return match enc.store().lookup(&Assignment::Char(p[0])) {
            Some(s) => vocc_of(enc, s),
            None => Ok(Vec::new()),
        };
    }
    let since = enc.store().next_id();
    let ps = enc.encode_fragment(p).expect("nonempty");
    enc.store_mut().pin(ps)?;
    let res = search_substr(enc, idx, Substr { sig: ps, pos: 1, len: p.len() as u64 });
    let st = enc.store_mut();
    st.release(ps)?;
    // Pattern-only signatures that hung off shared ones.
    let floating: Vec<Sig> = st.live_since(since).filter(|&s| st.node(s).refcount() == 0).collect();
    for s in floating {
        if st.contains(s) && st.node(s).refcount() == 0 {
            st.release(s)?;
        }
    }
    st.rewind(since);
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar_store::tests::example_store;
    use crate::lcp_parse::ParserParams;

    fn example() -> Encoding {
        Encoding::from_parts(example_store(), Some(Sig(17)), ParserParams::DEFAULT).unwrap()
    }

    #[test]
    fn vocc_example() {
        let e = example();
        assert_eq!(vocc_of(&e, Sig(9)).unwrap(), [1, 4]);
        assert_eq!(vocc_of(&e, Sig(17)).unwrap(), [1]);
    }

    #[test]
    fn index_of_example_has_one_point_per_rule() {
        let e = example();
        let idx = Index::build(&e);
        assert_eq!(idx.len(), 14);
        idx.check(&e).unwrap();
    }

    #[test]
    fn run_offsets_by_hand() {
        let e = Encoding::encode_string(&[5, 5, 5, 5, 5], ParserParams::DEFAULT);
        let s = e.start().unwrap();
        assert_eq!(run_offsets(&e, s, 1, 2), [1, 2, 3]);
        assert!(run_offsets(&e, s, 1, 6).is_empty());
        let e = example();
        assert!(run_offsets(&e, Sig(9), 1, 2).is_empty());
    }

    #[test]
    fn split_positions_small() {
        let mut e = Encoding::encode_string(&[1, 2, 1, 1, 1, 1], ParserParams::DEFAULT);
        let s = e.start().unwrap();
        assert_eq!(split_positions(&e, Substr { sig: s, pos: 3, len: 4 }).unwrap(), [1]);
        assert_eq!(split_positions(&e, Substr { sig: s, pos: 1, len: 2 }).unwrap(), [1]);
        let ab = e.encode_fragment(&[1, 2]).unwrap();
        assert_eq!(split_positions(&e, Substr { sig: ab, pos: 1, len: 2 }).unwrap(), [1]);
        assert!(split_positions(&e, Substr { sig: s, pos: 1, len: 1 }).is_err());
    }

    #[test]
    fn unary_search_uses_run_offsets() {
        let mut e = Encoding::encode_string(&[9; 6], ParserParams::DEFAULT);
        let idx = Index::build(&e);
        assert_eq!(search(&mut e, &idx, &[9, 9]).unwrap(), [1, 2, 3, 4, 5]);
        assert_eq!(search(&mut e, &idx, &[9; 7]).unwrap(), Vec::<u64>::new());
        assert_eq!(search(&mut e, &idx, &[9]).unwrap(), [1, 2, 3, 4, 5, 6]);
        assert_eq!(e.size(), 2);
    }

    #[test]
    fn grid_brute_force() {
        let ys = [3usize, 0, 4, 1, 2, 6, 5];
        let w = [10u64, 4, 7, 1, 9, 3, 8];
        let g = Grid::new(&ys, &w);
        for x1 in 0..7 {
            for x2 in x1..7 {
                for y1 in 0..7 {
                    for y2 in y1..7 {
                        let want: Vec<usize> = (x1..=x2).filter(|&x| (y1..=y2).contains(&ys[x])).collect();
                        assert_eq!(g.report(x1, x2, y1, y2), want);
                        assert_eq!(g.min_weight(x1, x2, y1, y2), want.iter().map(|&x| w[x]).min());
                    }
                }
            }
        }
        assert!(g.report(3, 2, 0, 6).is_empty());
    }
}
