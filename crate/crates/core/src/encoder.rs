//! Signature encoding of a text: construction, random access, common
//! sequences and longest common extension.
//!
//! Levels alternate. Even levels hold block signatures (characters at level
//! 0), odd levels hold run signatures `RunOf(x, d)`, one per maximal run,
//! exponent 1 included. The start signature is the single run at the top.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grammar_store::{Assignment, GrammarStore, Sig, Symbol};
use crate::lcp_parse::{eblock, epow, landmarks_in_window, LandmarkBits, ParserParams};

/// A run-length list of signatures.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PowSeq {
    items: Vec<(Sig, u64)>,
}

impl PowSeq {
    pub fn new() -> Self {
        PowSeq { items: Vec::new() }
    }

    /// Appends `e^count`, merging with the last item when equal.
    pub fn push(&mut self, e: Sig, count: u64) {
        if count == 0 {
            return;
        }
        match self.items.last_mut() {
            Some((s, c)) if *s == e => *c += count,
            _ => self.items.push((e, count)),
        }
    }

    pub fn extend(&mut self, other: &PowSeq) {
        for &(e, c) in &other.items {
            self.push(e, c);
        }
    }

    pub fn items(&self) -> &[(Sig, u64)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Length of the expansion.
    pub fn expanded_len(&self, store: &GrammarStore) -> Result<u64> {
        let mut n = 0u64;
        for &(e, c) in &self.items {
            n += store.len_of(e)? * c;
        }
        Ok(n)
    }
}

impl From<Vec<(Sig, u64)>> for PowSeq {
    fn from(v: Vec<(Sig, u64)>) -> Self {
        let mut p = PowSeq::new();
        for (e, c) in v {
            p.push(e, c);
        }
        p
    }
}

/// Items bound of a common sequence of a length-`k` string.
pub fn uniq_bound(params: &ParserParams, k: u64) -> usize {
    let stop = params.stop_runs();
    let lg = 63 - k.max(1).leading_zeros() as usize;
    2 * stop * (lg + 1) + stop
}

/// Children of a node one level down.
pub(crate) enum Members {
    Leaf,
    Run(Sig, u64),
    Block(Vec<Sig>),
}

impl GrammarStore {
    /// Level-(l-1) members of a level-l node. Pair chains whose left operand
    /// sits on the node's own level are flattened.
    pub(crate) fn members(&self, e: Sig) -> Members {
        let n = self.node(e);
        match n.assign {
            Assignment::Char(_) => Members::Leaf,
            Assignment::RunOf(b, d) => Members::Run(b, d),
            Assignment::Pair(..) => {
                let mut out = Vec::new();
                let mut cur = e;
                loop {
                    match self.node(cur).assign {
                        Assignment::Pair(l, r) if self.level(cur) == n.level => {
                            out.push(r);
                            cur = l;
                        }
                        _ => {
                            out.push(cur);
                            break;
                        }
                    }
                }
                out.reverse();
                Members::Block(out)
            }
        }
    }

    /// Up to `m` nodes of level `lv` that overlap `[a, b]` inside the
    /// subtree of `e` (which starts at text position `base`), leftmost first
    /// when `fwd`, rightmost first otherwise. Each node comes with its start.
    pub(crate) fn level_nodes(
        &self,
        e: Sig,
        base: u64,
        lv: u32,
        a: u64,
        b: u64,
        m: usize,
        fwd: bool,
        out: &mut Vec<(Sig, u64)>,
    ) {
        if out.len() >= m {
            return;
        }
        let n = self.node(e);
        if n.level <= lv {
            out.push((e, base));
            return;
        }
        match self.members(e) {
            Members::Leaf => out.push((e, base)),
            Members::Run(x, _) => {
                let lx = self.length(x);
                let first = if a > base { (a - base) / lx } else { 0 };
                let last = ((b.min(base + n.length - 1)) - base) / lx;
                if fwd {
                    let mut c = first;
                    while c <= last && out.len() < m {
                        self.level_nodes(x, base + c * lx, lv, a, b, m, fwd, out);
                        c += 1;
                    }
                } else {
                    let mut c = last as i128;
                    while c >= first as i128 && out.len() < m {
                        let c64 = c as u64;
                        self.level_nodes(x, base + c64 * lx, lv, a, b, m, fwd, out);
                        c -= 1;
                    }
                }
            }
            Members::Block(v) => {
                let mut starts = Vec::with_capacity(v.len());
                let mut p = base;
                for &x in &v {
                    starts.push(p);
                    p += self.length(x);
                }
                let overlaps = |k: usize| {
                    let s = starts[k];
                    s <= b && s + self.length(v[k]) > a
                };
                if fwd {
                    for k in 0..v.len() {
                        if out.len() >= m {
                            break;
                        }
                        if overlaps(k) {
                            self.level_nodes(v[k], starts[k], lv, a, b, m, fwd, out);
                        }
                    }
                } else {
                    for k in (0..v.len()).rev() {
                        if out.len() >= m {
                            break;
                        }
                        if overlaps(k) {
                            self.level_nodes(v[k], starts[k], lv, a, b, m, fwd, out);
                        }
                    }
                }
            }
        }
    }

    /// First (or last) `m` level-`lv` nodes of the expansion of `e`, as
    /// signatures, in text order.
    pub(crate) fn level_head(&self, e: Sig, lv: u32, m: usize, fwd: bool) -> Vec<Sig> {
        let len = self.length(e);
        let mut out = Vec::new();
        self.level_nodes(e, 1, lv, 1, len, m, fwd, &mut out);
        let mut v: Vec<Sig> = out.into_iter().map(|(s, _)| s).collect();
        if !fwd {
            v.reverse();
        }
        v
    }
}

/// A traversal position in a derivation tree, read left to right or right
/// to left.
struct Cursor {
    stack: Vec<(Sig, u64)>,
    cur: Sig,
    fwd: bool,
}

impl Cursor {
    fn n_children(st: &GrammarStore, e: Sig) -> u64 {
        match st.node(e).assign {
            Assignment::Char(_) => 0,
            Assignment::Pair(..) => 2,
            Assignment::RunOf(_, d) => d,
        }
    }

    fn child(st: &GrammarStore, e: Sig, k: u64, fwd: bool) -> Sig {
        match st.node(e).assign {
            Assignment::Pair(l, r) => {
                if (k == 0) == fwd {
                    l
                } else {
                    r
                }
            }
            Assignment::RunOf(b, _) => b,
            Assignment::Char(_) => unreachable!("characters have no children"),
        }
    }

    /// Positions `pos` is 1-based in reading direction. Stops at the
    /// highest node that begins exactly at `pos`.
    fn at(st: &GrammarStore, root: Sig, pos: u64, fwd: bool) -> Cursor {
        let mut c = Cursor { stack: Vec::new(), cur: root, fwd };
        let mut off = 1u64;
        while off != pos {
            let e = c.cur;
            let k = match st.node(e).assign {
                Assignment::Pair(..) => {
                    let s0 = st.length(Self::child(st, e, 0, fwd));
                    if pos < off + s0 {
                        0
                    } else {
                        off += s0;
                        1
                    }
                }
                Assignment::RunOf(b, _) => {
                    let k = (pos - off) / st.length(b);
                    off += k * st.length(b);
                    k
                }
                Assignment::Char(_) => unreachable!("position inside a character"),
            };
            c.stack.push((e, k));
            c.cur = Self::child(st, e, k, fwd);
        }
        c
    }

    fn descend(&mut self, st: &GrammarStore) {
        self.stack.push((self.cur, 0));
        self.cur = Self::child(st, self.cur, 0, self.fwd);
    }

    /// Moves past the current node. Returns false at the end of the root.
    fn advance(&mut self, st: &GrammarStore) -> bool {
        while let Some((p, k)) = self.stack.pop() {
            if k + 1 < Self::n_children(st, p) {
                self.stack.push((p, k + 1));
                self.cur = Self::child(st, p, k + 1, self.fwd);
                return true;
            }
        }
        false
    }

    /// Copies of the current node left in its run parent, current included.
    fn run_left(&self, st: &GrammarStore) -> u64 {
        match self.stack.last() {
            Some(&(p, k)) => match st.node(p).assign {
                Assignment::RunOf(_, d) => d - k,
                _ => 1,
            },
            None => 1,
        }
    }

    /// Skips `m - 1` further copies inside the run parent.
    fn skip_copies(&mut self, m: u64) {
        if m > 1 {
            self.stack.last_mut().expect("run parent").1 += m - 1;
        }
    }
}

/// A text held as a signature encoding.
#[derive(Debug, Clone)]
pub struct Encoding {
    store: GrammarStore,
    start: Option<Sig>,
    text_len: u64,
    params: ParserParams,
}

impl Encoding {
    /// An empty text.
    pub fn new(params: ParserParams) -> Self {
        Encoding { store: GrammarStore::new(), start: None, text_len: 0, params }
    }

    pub fn encode_string(text: &[Symbol], params: ParserParams) -> Self {
        let mut enc = Encoding::new(params);
        if let Some(s) = enc.encode_fragment(text) {
            enc.store.pin(s).expect("fresh start is live");
            enc.start = Some(s);
            enc.text_len = text.len() as u64;
        }
        enc
    }

    /// Wraps an existing store; `start` is pinned here.
    pub fn from_parts(mut store: GrammarStore, start: Option<Sig>, params: ParserParams) -> Result<Self> {
        let text_len = match start {
            Some(s) => {
                store.pin(s)?;
                store.len_of(s)?
            }
            None => 0,
        };
        Ok(Encoding { store, start, text_len, params })
    }

    pub fn store(&self) -> &GrammarStore {
        &self.store
    }

    pub(crate) fn store_mut(&mut self) -> &mut GrammarStore {
        &mut self.store
    }

    pub fn start(&self) -> Option<Sig> {
        self.start
    }

    pub fn len(&self) -> u64 {
        self.text_len
    }

    pub fn is_empty(&self) -> bool {
        self.text_len == 0
    }

    pub fn params(&self) -> &ParserParams {
        &self.params
    }

    /// Number of live signatures.
    pub fn size(&self) -> usize {
        self.store.len()
    }

    /// Levels of the derivation tree, counting the character level.
    pub fn height(&self) -> u32 {
        self.start.map_or(0, |s| self.store.level(s) + 1)
    }

    /// Replaces the start signature. The new one is pinned before the old
    /// one is released; returns what the release removed.
    pub(crate) fn set_start(&mut self, s: Option<Sig>) -> Result<Vec<Sig>> {
        if let Some(s) = s {
            self.store.pin(s)?;
        }
        let removed = match self.start {
            Some(old) => self.store.release(old)?,
            None => Vec::new(),
        };
        self.start = s;
        self.text_len = match s {
            Some(s) => self.store.len_of(s)?,
            None => 0,
        };
        Ok(removed)
    }

    /// Encodes `text` into the store without touching the start. The result
    /// is unpinned.
    pub fn encode_fragment(&mut self, text: &[Symbol]) -> Option<Sig> {
        if text.is_empty() {
            return None;
        }
        let st = &mut self.store;
        let mut seq: Vec<Sig> =
            text.iter().map(|&c| st.intern(Assignment::Char(c)).expect("characters are always valid")).collect();
        loop {
            let pow: Vec<Sig> = epow(&seq)
                .into_iter()
                .map(|r| st.intern(Assignment::RunOf(r.symbol, r.exponent)).expect("live base"))
                .collect();
            if pow.len() == 1 {
                return Some(pow[0]);
            }
            let raw: Vec<u64> = pow.iter().map(|s| s.0).collect();
            let bits = LandmarkBits::from_bits(landmarks_in_window(&raw, &self.params, true, true));
            let blocks = eblock(&pow, &bits).expect("landmarks cover the sequence");
            seq = blocks.into_iter().map(|b| st.fold_block(b).expect("blocks of 2..=5")).collect();
        }
    }

    fn check_range(&self, e: Sig, i: u64, k: u64) -> Result<u64> {
        let len = self.store.len_of(e)?;
        if i == 0 || i.checked_add(k).map_or(true, |end| end - 1 > len) {
            return Err(Error::Range { pos: i, len: k, bound: len });
        }
        Ok(len)
    }

    /// `val(e)[i..i+k-1]`, 1-based.
    pub fn extract(&self, e: Sig, i: u64, k: u64) -> Result<Vec<Symbol>> {
        self.check_range(e, i, k)?;
        let mut out = Vec::with_capacity(k as usize);
        if k == 0 {
            return Ok(out);
        }
        let st = &self.store;
        let mut c = Cursor::at(st, e, i, true);
        loop {
            while let Assignment::Pair(..) | Assignment::RunOf(..) = st.node(c.cur).assign {
                c.descend(st);
            }
            if let Assignment::Char(ch) = st.node(c.cur).assign {
                out.push(ch);
            }
            if out.len() as u64 == k || !c.advance(st) {
                break;
            }
        }
        Ok(out)
    }

    /// The whole text.
    pub fn text(&self) -> Vec<Symbol> {
        match self.start {
            Some(s) => self.extract(s, 1, self.text_len).expect("start covers the text"),
            None => Vec::new(),
        }
    }

    pub fn char_at(&self, e: Sig, i: u64) -> Result<Symbol> {
        self.check_range(e, i, 1)?;
        let st = &self.store;
        let mut c = Cursor::at(st, e, i, true);
        loop {
            match st.node(c.cur).assign {
                Assignment::Char(ch) => return Ok(ch),
                _ => c.descend(st),
            }
        }
    }

    /// Greedy matching of `val(e1)` from `i` against `val(e2)` from `j`, in
    /// direction-relative positions, stopping after `limit` symbols.
    pub(crate) fn lce_raw(&self, e1: Sig, i: u64, e2: Sig, j: u64, fwd: bool, limit: u64) -> u64 {
        let st = &self.store;
        let mut c1 = Cursor::at(st, e1, i, fwd);
        let mut c2 = Cursor::at(st, e2, j, fwd);
        let mut matched = 0u64;
        while matched < limit {
            let (a, b) = (c1.cur, c2.cur);
            if a == b {
                let mut m = 1;
                let (r1, r2) = (c1.run_left(st), c2.run_left(st));
                if r1 > 1 && r2 > 1 {
                    m = r1.min(r2);
                }
                let step = m.saturating_mul(st.length(a));
                if matched.saturating_add(step) >= limit {
                    return limit;
                }
                matched += step;
                c1.skip_copies(m);
                c2.skip_copies(m);
                if !c1.advance(st) || !c2.advance(st) {
                    break;
                }
                continue;
            }
            let (la, lb) = (st.length(a), st.length(b));
            let leaf = |e: Sig| matches!(st.node(e).assign, Assignment::Char(_));
            if la > lb {
                c1.descend(st);
            } else if lb > la {
                c2.descend(st);
            } else {
                if leaf(a) && leaf(b) {
                    break;
                }
                if !leaf(a) {
                    c1.descend(st);
                }
                if !leaf(b) {
                    c2.descend(st);
                }
            }
        }
        matched.min(limit)
    }

    /// Longest common prefix of `val(e1)[i..]` and `val(e2)[j..]`.
    pub fn lce_forward(&self, e1: Sig, e2: Sig, i: u64, j: u64) -> Result<u64> {
        let n1 = self.check_range(e1, i, 1)?;
        let n2 = self.check_range(e2, j, 1)?;
        Ok(self.lce_raw(e1, i, e2, j, true, (n1 - i + 1).min(n2 - j + 1)))
    }

    /// Longest common suffix of `val(e1)[..i]` and `val(e2)[..j]`.
    pub fn lce_backward(&self, e1: Sig, e2: Sig, i: u64, j: u64) -> Result<u64> {
        let n1 = self.check_range(e1, i, 1)?;
        let n2 = self.check_range(e2, j, 1)?;
        Ok(self.lce_raw(e1, n1 - i + 1, e2, n2 - j + 1, false, i.min(j)))
    }

    pub fn lcp_of(&self, e1: Sig, e2: Sig) -> Result<u64> {
        self.lce_forward(e1, e2, 1, 1)
    }

    pub fn lcs_of(&self, e1: Sig, e2: Sig) -> Result<u64> {
        let (n1, n2) = (self.store.len_of(e1)?, self.store.len_of(e2)?);
        self.lce_backward(e1, e2, n1, n2)
    }

    /// Common sequence of `val(e)[i..i+k-1]`: a run-length list of
    /// signatures that depends only on the substring, not on where it
    /// occurs.
    pub fn uniq_pow(&self, e: Sig, i: u64, k: u64) -> Result<PowSeq> {
        self.check_range(e, i, k)?;
        if k == 0 {
            return Err(Error::Range { pos: i, len: k, bound: self.store.len_of(e)? });
        }
        let st = &self.store;
        let p = &self.params;
        let stop = p.stop_runs();
        let top = st.level(e);
        let mut left = PowSeq::new();
        let mut right: Vec<(Sig, u64)> = Vec::new();
        let (mut a, mut b) = (i, i + k - 1);
        let mut lv = 0u32;
        let bad = |what: &str| Error::Invariant(format!("encoding not well formed: {}", what));
        loop {
            // Runs of level-lv nodes, clipped to [a, b].
            let runs = if lv + 1 > top {
                vec![(e, 1u64)]
            } else {
                let mut v = Vec::new();
                st.level_nodes(e, 1, lv + 1, a, b, stop + 1, true, &mut v);
                if v.len() <= stop {
                    let mut out = Vec::with_capacity(v.len());
                    for (r, s) in v {
                        out.push(clip_run(st, r, s, a, b).ok_or_else(|| bad("run boundary"))?);
                    }
                    out
                } else {
                    Vec::new()
                }
            };
            if !runs.is_empty() {
                for (x, c) in runs {
                    left.push(x, c);
                }
                break;
            }
            let mut first = Vec::new();
            st.level_nodes(e, 1, lv + 1, a, b, 1, true, &mut first);
            let mut last = Vec::new();
            st.level_nodes(e, 1, lv + 1, a, b, 1, false, &mut last);
            let (fx, fc) = clip_run(st, first[0].0, first[0].1, a, b).ok_or_else(|| bad("run boundary"))?;
            let (lx, lc) = clip_run(st, last[0].0, last[0].1, a, b).ok_or_else(|| bad("run boundary"))?;
            left.push(fx, fc);
            right.push((lx, lc));
            a += fc * st.length(fx);
            b -= lc * st.length(lx);

            // Odd level: whole runs from here on.
            let w = p.delta_l + p.delta_r + 8;
            let mut head = Vec::new();
            st.level_nodes(e, 1, lv + 1, a, b, w, true, &mut head);
            let mut tail = Vec::new();
            st.level_nodes(e, 1, lv + 1, a, b, w, false, &mut tail);
            tail.reverse();
            if head.len() < w || tail.len() < w {
                return Err(bad("short odd level"));
            }
            let hb = landmarks_in_window(&head.iter().map(|x| x.0 .0).collect::<Vec<_>>(), p, false, false);
            let tb = landmarks_in_window(&tail.iter().map(|x| x.0 .0).collect::<Vec<_>>(), p, false, false);
            let nl = (p.delta_l..w).find(|&q| hb[q]).ok_or_else(|| bad("no left landmark"))?;
            let nr = (p.delta_r + 1..w).find(|&q| tb[w - q]).ok_or_else(|| bad("no right landmark"))?;
            for &(r, _) in &head[..nl] {
                let (x, d) = run_parts(st, r);
                left.push(x, d);
            }
            for &(r, _) in tail[w - nr..].iter().rev() {
                right.push(run_parts(st, r));
            }
            let na = head[nl].1;
            let ts = tail[w - nr].1;
            if na >= ts {
                break;
            }
            a = na;
            b = ts - 1;
            lv += 2;
        }
        for (x, c) in right.into_iter().rev() {
            left.push(x, c);
        }
        Ok(left)
    }

    /// Checks the store and that every level of the derivation is what the
    /// parser would produce from the level below.
    pub fn audit(&self) -> Result<()> {
        self.store.audit()?;
        let s = match self.start {
            None => return Ok(()),
            Some(s) => s,
        };
        let st = &self.store;
        let bad = |m: &str| Err(Error::Invariant(format!("derivation: {}", m)));
        if st.meta(s)?.pins() == 0 {
            return bad("start is not pinned");
        }
        if st.len_of(s)? != self.text_len {
            return bad("start length differs from text length");
        }
        let top = st.level(s);
        if top % 2 == 0 {
            return bad("start is not a run");
        }
        // Walk down: `upper` is the level-(lv+1) sequence.
        let mut upper = vec![s];
        for lv in (0..top).rev() {
            let mut lower = Vec::new();
            let mut shape = Vec::with_capacity(upper.len());
            for &u in &upper {
                if st.level(u) != lv + 1 {
                    return bad("node on the wrong level");
                }
                match st.members(u) {
                    Members::Leaf => return bad("character above level 0"),
                    Members::Run(x, d) => {
                        if lv % 2 == 1 {
                            return bad("run on an even level");
                        }
                        for _ in 0..d {
                            lower.push(x);
                        }
                        shape.push(d as usize);
                    }
                    Members::Block(v) => {
                        if lv % 2 == 0 {
                            return bad("block on an odd level");
                        }
                        shape.push(v.len());
                        lower.extend(v);
                    }
                }
            }
            if lv % 2 == 0 {
                let runs = epow(&lower);
                let ok = runs.len() == upper.len()
                    && runs.iter().zip(&upper).all(|(r, &u)| st.lookup(&Assignment::RunOf(r.symbol, r.exponent)) == Some(u));
                if !ok {
                    return bad("runs are not maximal");
                }
            } else {
                if lower.len() == 1 {
                    return bad("parse continued past a single run");
                }
                if lower.windows(2).any(|w| w[0] == w[1]) {
                    return bad("adjacent equal runs");
                }
                let raw: Vec<u64> = lower.iter().map(|x| x.0).collect();
                let bits = landmarks_in_window(&raw, &self.params, true, true);
                let mut at = 0;
                for &n in &shape {
                    if !bits[at] || bits[at + 1..at + n].iter().any(|&x| x) {
                        return bad("blocks disagree with landmarks");
                    }
                    at += n;
                }
            }
            upper = lower;
        }
        if upper.iter().any(|&u| st.level(u) != 0) {
            return bad("bottom level is not characters");
        }
        Ok(())
    }
}

fn run_parts(st: &GrammarStore, r: Sig) -> (Sig, u64) {
    match st.node(r).assign {
        Assignment::RunOf(x, d) => (x, d),
        _ => (r, 1),
    }
}

/// The part of run node `r` (starting at `s`) inside `[a, b]`, as
/// `(base, copies)`. None when the cut falls inside a copy.
fn clip_run(st: &GrammarStore, r: Sig, s: u64, a: u64, b: u64) -> Option<(Sig, u64)> {
    let (x, _) = run_parts(st, r);
    let lx = st.length(x);
    let lo = s.max(a);
    let hi = (s + st.length(r) - 1).min(b);
    if (lo - s) % lx != 0 || (hi + 1 - lo) % lx != 0 {
        return None;
    }
    Some((x, (hi + 1 - lo) / lx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar_store::tests::example_store;

    fn bytes(s: &str) -> Vec<Symbol> {
        s.bytes().map(u32::from).collect()
    }

    fn enc(s: &str) -> Encoding {
        Encoding::encode_string(&bytes(s), ParserParams::DEFAULT)
    }

    #[test]
    fn single_char() {
        let e = enc("a");
        let s = e.start().unwrap();
        let a = e.store().lookup(&Assignment::Char(b'a' as u32)).unwrap();
        assert_eq!(e.store().assgn(s).unwrap(), Assignment::RunOf(a, 1));
        assert_eq!(e.height(), 2);
        e.audit().unwrap();
    }

    #[test]
    fn unary_is_one_run() {
        let e = enc("aaaaa");
        let a = e.store().lookup(&Assignment::Char(b'a' as u32)).unwrap();
        assert_eq!(e.store().assgn(e.start().unwrap()).unwrap(), Assignment::RunOf(a, 5));
        assert_eq!(e.size(), 2);
    }

    #[test]
    fn two_chars_six_signatures() {
        let e = enc("ab");
        assert_eq!(e.size(), 6);
        assert_eq!(e.height(), 4);
        e.audit().unwrap();
    }

    #[test]
    fn empty_text() {
        let e = enc("");
        assert_eq!(e.start(), None);
        assert_eq!(e.len(), 0);
        assert!(e.text().is_empty());
        e.audit().unwrap();
    }

    #[test]
    fn extract_example_grammar() {
        let e = Encoding::from_parts(example_store(), Some(Sig(17)), ParserParams::DEFAULT).unwrap();
        assert_eq!(e.extract(Sig(9), 1, 3).unwrap(), bytes("CAB"));
        assert_eq!(e.text(), bytes("CABCABABABABABABABABABCCCC"));
        assert_eq!(e.extract(Sig(17), 20, 5).unwrap(), bytes("BABCC"));
        assert!(matches!(e.extract(Sig(9), 2, 3), Err(Error::Range { .. })));
        assert_eq!(e.char_at(Sig(17), 26).unwrap(), b'C' as u32);
    }

    #[test]
    fn round_trip_small() {
        for s in ["abracadabra", "mississippi", "abababababababababababababababababab", "xyz"] {
            let e = enc(s);
            assert_eq!(e.text(), bytes(s));
            e.audit().unwrap();
        }
    }

    #[test]
    fn lce_hand_cases() {
        let e = enc("CABCABBCABCABCAB");
        let s = e.start().unwrap();
        assert_eq!(e.lce_forward(s, s, 1, 4).unwrap(), 3);
        assert_eq!(e.lce_forward(s, s, 3, 3).unwrap(), 14);
        assert_eq!(e.lce_forward(s, s, 1, 2).unwrap(), 0);
        assert_eq!(e.lce_backward(s, s, 6, 3).unwrap(), 3);
        assert_eq!(e.lcp_of(s, s).unwrap(), 16);
        assert_eq!(e.lcs_of(s, s).unwrap(), 16);
    }

    #[test]
    fn uniq_of_one_char() {
        let e = enc("abcabc");
        let s = e.start().unwrap();
        let a = e.store().lookup(&Assignment::Char(b'b' as u32)).unwrap();
        assert_eq!(e.uniq_pow(s, 2, 1).unwrap().items(), &[(a, 1)]);
    }

    #[test]
    fn uniq_example_grammar_occurrences() {
        let e = Encoding::from_parts(example_store(), Some(Sig(17)), ParserParams::DEFAULT).unwrap();
        let u1 = e.uniq_pow(Sig(17), 1, 3).unwrap();
        let u4 = e.uniq_pow(Sig(17), 4, 3).unwrap();
        assert_eq!(u1, u4);
        assert_eq!(u1.expanded_len(e.store()).unwrap(), 3);
    }

    #[test]
    fn bound_values() {
        let p = ParserParams::DEFAULT;
        assert_eq!(uniq_bound(&p, 1), 81);
        assert_eq!(uniq_bound(&p, 1024), 54 * 11 + 27);
    }
}
