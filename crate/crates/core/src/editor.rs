//! Edits on an encoding.
//!
//! Every edit is a merge: the surviving parts of the text are described by
//! common sequences, the new material by its own encoding, and the merge
//! rebuilds only what the parser would now do differently. Each level keeps
//! a list of items `(signature, copies)`. An item on the current level is
//! explicit and gets parsed. An item above it is kept whole as long as the
//! parse near its edges, recomputed with its new neighbours, still agrees
//! with its own block and run boundaries; otherwise it is replaced by its
//! children.

use alloc::vec;
use alloc::vec::Vec;

use crate::encoder::{Encoding, Members, PowSeq};
use crate::error::{Error, Result};
use crate::grammar_store::{Assignment, GrammarStore, Sig, Symbol};
use crate::lcp_parse::{landmarks_in_window, ParserParams};

/// Signatures created and removed by one update.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EditDelta {
    /// New live signatures, in creation order.
    pub added: Vec<Sig>,
    /// Signatures that existed before and are gone now, ascending.
    pub removed: Vec<Sig>,
}

impl EditDelta {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }
}

type Item = (Sig, u64);

/// Copies of a repeated item checked one by one at each end before the
/// rest is treated as periodic.
const PEEL: u64 = 16;

/// Level-`lv` elements just before `items[i]`, in text order. The flag says
/// the text start was reached before `need` elements were found.
fn ctx_left(st: &GrammarStore, items: &[Item], i: usize, lv: u32, need: usize) -> (Vec<Sig>, bool) {
    let mut rev = Vec::with_capacity(need);
    let mut j = i;
    while rev.len() < need && j > 0 {
        j -= 1;
        let (x, c) = items[j];
        let t = st.level_head(x, lv, need - rev.len(), false);
        let mut reps = 0;
        while reps < c && rev.len() < need {
            for &y in t.iter().rev() {
                if rev.len() == need {
                    break;
                }
                rev.push(y);
            }
            reps += 1;
        }
    }
    let at_start = rev.len() < need;
    rev.reverse();
    (rev, at_start)
}

/// Level-`lv` elements from `items[i]` on.
fn ctx_right(st: &GrammarStore, items: &[Item], i: usize, lv: u32, need: usize) -> (Vec<Sig>, bool) {
    let mut out = Vec::with_capacity(need);
    let mut j = i;
    while out.len() < need && j < items.len() {
        let (x, c) = items[j];
        let t = st.level_head(x, lv, need - out.len(), true);
        let mut reps = 0;
        while reps < c && out.len() < need {
            for &y in &t {
                if out.len() == need {
                    break;
                }
                out.push(y);
            }
            reps += 1;
        }
        j += 1;
    }
    let at_end = out.len() < need;
    (out, at_end)
}

fn member_list(st: &GrammarStore, x: Sig) -> Vec<Sig> {
    match st.members(x) {
        Members::Leaf => vec![x],
        Members::Run(b, d) => vec![b; d as usize],
        Members::Block(v) => v,
    }
}

/// The first (or last) `m` level-`lv` elements of `x`, each flagged when a
/// level-`lv + 1` node of `x` starts there.
fn block_flags(st: &GrammarStore, x: Sig, lv: u32, m: usize, fwd: bool) -> Vec<(Sig, bool)> {
    let mut nodes = Vec::new();
    let len = st.length(x);
    st.level_nodes(x, 1, lv + 1, 1, len, m, fwd, &mut nodes);
    let mut acc: Vec<(Sig, bool)> = Vec::new();
    for &(n, _) in &nodes {
        let mem = member_list(st, n);
        if fwd {
            for (k, &y) in mem.iter().enumerate() {
                acc.push((y, k == 0));
            }
            if acc.len() >= m {
                break;
            }
        } else {
            for (k, &y) in mem.iter().enumerate().rev() {
                acc.push((y, k == 0));
            }
            if acc.len() >= m {
                break;
            }
        }
    }
    if fwd {
        acc.truncate(m);
    } else {
        acc.truncate(m);
        acc.reverse();
    }
    acc
}

fn distinct(w: &[Sig]) -> Result<()> {
    if w.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::Invariant("adjacent equal elements on a run level".into()));
    }
    Ok(())
}

fn bits_of(w: &[Sig], params: &ParserParams, at_start: bool, at_end: bool) -> Result<Vec<bool>> {
    distinct(w)?;
    let raw: Vec<u64> = w.iter().map(|s| s.0).collect();
    Ok(landmarks_in_window(&raw, params, at_start, at_end))
}

/// Does the block structure of `items[i]` survive its new neighbours on
/// odd level `lv`?
fn blocks_agree(st: &GrammarStore, params: &ParserParams, items: &[Item], i: usize, lv: u32) -> Result<bool> {
    let h = items[i].0;
    let (cl, at_start) = ctx_left(st, items, i, lv, params.delta_l);
    let (cr, at_end) = ctx_right(st, items, i + 1, lv, params.delta_r + 1);
    let m = params.delta_l + params.delta_r + 6;
    let head = block_flags(st, h, lv, 2 * m + 1, true);
    if head.len() <= 2 * m {
        let mut w = cl.clone();
        w.extend(head.iter().map(|p| p.0));
        w.extend(&cr);
        let bits = bits_of(&w, params, at_start, at_end)?;
        let o = cl.len();
        if head.iter().enumerate().any(|(k, p)| bits[o + k] != p.1) {
            return Ok(false);
        }
        return Ok(cr.is_empty() || bits[o + head.len()]);
    }
    let mut w = cl.clone();
    w.extend(head[..m].iter().map(|p| p.0));
    let bits = bits_of(&w, params, at_start, false)?;
    let o = cl.len();
    if (0..m - params.delta_r).any(|k| bits[o + k] != head[k].1) {
        return Ok(false);
    }
    let tail = block_flags(st, h, lv, m, false);
    let mut w: Vec<Sig> = tail.iter().map(|p| p.0).collect();
    w.extend(&cr);
    let bits = bits_of(&w, params, false, at_end)?;
    if (params.delta_l..m).any(|k| bits[k] != tail[k].1) {
        return Ok(false);
    }
    Ok(cr.is_empty() || bits[m])
}

fn break_item(st: &GrammarStore, (h, c): Item) -> Vec<Item> {
    match st.members(h) {
        Members::Leaf => vec![(h, c)],
        Members::Run(b, d) => vec![(b, d * c)],
        Members::Block(v) => {
            let mut out = Vec::with_capacity(v.len() * c as usize);
            for _ in 0..c {
                out.extend(v.iter().map(|&x| (x, 1)));
            }
            out
        }
    }
}

/// Even level: keep high items whose edge runs stay maximal.
fn settle_runs(st: &GrammarStore, items: &mut Vec<Item>, lv: u32) {
    let mut i = 0;
    while i < items.len() {
        let (h, c) = items[i];
        if st.level(h) <= lv {
            i += 1;
            continue;
        }
        let first = st.level_head(h, lv, 1, true)[0];
        let last = st.level_head(h, lv, 1, false)[0];
        let prev = (i > 0).then(|| st.level_head(items[i - 1].0, lv, 1, false)[0]);
        let next = (i + 1 < items.len()).then(|| st.level_head(items[i + 1].0, lv, 1, true)[0]);
        let lf = prev == Some(first);
        let rf = next == Some(last);
        let self_join = c > 1 && first == last;
        if !lf && !rf && !self_join {
            i += 1;
            continue;
        }
        if c > 1 && !self_join {
            let mut rep = Vec::new();
            let (l, r) = (lf as u64, rf as u64);
            if lf {
                rep.push((h, 1));
            }
            if c > l + r {
                rep.push((h, c - l - r));
            }
            if rf {
                rep.push((h, 1));
            }
            items.splice(i..=i, rep);
            continue;
        }
        let parts = break_item(st, (h, c));
        items.splice(i..=i, parts);
    }
}

/// Repeated high items become single copies at both ends and one periodic
/// middle.
fn spread(st: &GrammarStore, lv: u32, (h, c): Item, out: &mut Vec<Item>) -> Result<()> {
    if c == 1 {
        out.push((h, c));
    } else if st.level(h) <= lv {
        return Err(Error::Invariant("repeated element on a run level".into()));
    } else if c <= 2 * PEEL + 1 {
        out.extend((0..c).map(|_| (h, 1)));
    } else {
        out.extend((0..PEEL).map(|_| (h, 1)));
        out.push((h, c - 2 * PEEL));
        out.extend((0..PEEL).map(|_| (h, 1)));
    }
    Ok(())
}

/// Odd level: keep high items whose edge blocks agree with the landmarks.
fn settle_blocks(st: &GrammarStore, params: &ParserParams, items: &mut Vec<Item>, lv: u32) -> Result<()> {
    let mut spread_out = Vec::with_capacity(items.len());
    for &it in items.iter() {
        spread(st, lv, it, &mut spread_out)?;
    }
    *items = spread_out;
    let mut i = 0;
    while i < items.len() {
        let h = items[i].0;
        if st.level(h) <= lv || blocks_agree(st, params, items, i, lv)? {
            i += 1;
            continue;
        }
        let mut parts = Vec::new();
        for it in break_item(st, items[i]) {
            spread(st, lv, it, &mut parts)?;
        }
        items.splice(i..=i, parts);
    }
    Ok(())
}

fn parse_runs(st: &mut GrammarStore, items: Vec<Item>, lv: u32) -> Result<Vec<Item>> {
    let mut out: Vec<Item> = Vec::with_capacity(items.len());
    let mut pending: Option<Item> = None;
    for (x, c) in items {
        if st.level(x) == lv {
            pending = match pending {
                Some((y, d)) if y == x => Some((y, d + c)),
                Some(p) => {
                    out.push((st.intern(Assignment::RunOf(p.0, p.1))?, 1));
                    Some((x, c))
                }
                None => Some((x, c)),
            };
        } else {
            if let Some(p) = pending.take() {
                out.push((st.intern(Assignment::RunOf(p.0, p.1))?, 1));
            }
            out.push((x, c));
        }
    }
    if let Some(p) = pending {
        out.push((st.intern(Assignment::RunOf(p.0, p.1))?, 1));
    }
    Ok(out)
}

fn parse_blocks(st: &mut GrammarStore, params: &ParserParams, items: Vec<Item>, lv: u32) -> Result<Vec<Item>> {
    let mut out: Vec<Item> = Vec::with_capacity(items.len() / 2 + 1);
    let mut i = 0;
    while i < items.len() {
        if st.level(items[i].0) != lv {
            out.push(items[i]);
            i += 1;
            continue;
        }
        let s = i;
        while i < items.len() && st.level(items[i].0) == lv {
            i += 1;
        }
        let (cl, at_start) = ctx_left(st, &items, s, lv, params.delta_l);
        let (cr, at_end) = ctx_right(st, &items, i, lv, params.delta_r + 1);
        let stretch: Vec<Sig> = items[s..i].iter().map(|p| p.0).collect();
        let mut w = cl.clone();
        w.extend(&stretch);
        w.extend(&cr);
        let bits = bits_of(&w, params, at_start, at_end)?;
        let o = cl.len();
        if !bits[o] {
            return Err(Error::Invariant("stretch does not start a block".into()));
        }
        let mut b0 = 0;
        for k in 1..=stretch.len() {
            if k == stretch.len() || bits[o + k] {
                out.push((st.fold_block(&stretch[b0..k])?, 1));
                b0 = k;
            }
        }
    }
    Ok(out)
}

fn merge_items(st: &mut GrammarStore, params: &ParserParams, mut items: Vec<Item>) -> Result<Sig> {
    items.retain(|p| p.1 > 0);
    if items.is_empty() {
        return Err(Error::NoPieces);
    }
    for &(x, _) in &items {
        st.meta(x)?;
    }
    let mut lv = 0u32;
    loop {
        if let [(x, 1)] = items[..] {
            if st.level(x) == lv && lv % 2 == 1 {
                return Ok(x);
            }
        }
        if lv > 256 {
            return Err(Error::Invariant("merge did not converge".into()));
        }
        if lv % 2 == 0 {
            settle_runs(st, &mut items, lv);
            items = parse_runs(st, items, lv)?;
        } else {
            settle_blocks(st, params, &mut items, lv)?;
            items = parse_blocks(st, params, items, lv)?;
        }
        lv += 1;
    }
}

/// Builds the encoding of the concatenation of `pieces` on top of the
/// store and returns its (unpinned) top signature.
pub fn merge_pow(enc: &mut Encoding, pieces: &[PowSeq]) -> Result<(Sig, EditDelta)> {
    if pieces.is_empty() {
        return Err(Error::NoPieces);
    }
    if pieces.iter().any(|p| p.is_empty()) {
        return Err(Error::EmptyText);
    }
    let items: Vec<Item> = pieces.iter().flat_map(|p| p.items().iter().copied()).collect();
    let params = *enc.params();
    let st = enc.store_mut();
    let since = st.next_id();
    let top = merge_items(st, &params, items)?;
    let added = st.live_since(since).collect();
    Ok((top, EditDelta { added, removed: Vec::new() }))
}

impl Encoding {
    /// Makes `top` the start and settles the store. `since` is the first id
    /// the update may have allocated; `temp` are pins to drop.
    fn commit(&mut self, top: Option<Sig>, since: u64, temp: &[Sig]) -> Result<EditDelta> {
        let mut removed = self.set_start(top)?;
        let st = self.store_mut();
        for &t in temp {
            removed.extend(st.release(t)?);
        }
        let floating: Vec<Sig> = st.live_since(since).filter(|&s| st.node(s).refcount() == 0).collect();
        for s in floating {
            if st.contains(s) && st.node(s).refcount() == 0 {
                removed.extend(st.release(s)?);
            }
        }
        removed.retain(|s| s.0 < since);
        removed.sort();
        let added = st.live_since(since).collect();
        Ok(EditDelta { added, removed })
    }

    /// Inserts `y` so that it starts at position `i` (1-based).
    pub fn insert_str(&mut self, i: u64, y: &[Symbol]) -> Result<EditDelta> {
        let n = self.len();
        if i == 0 || i > n + 1 {
            return Err(Error::Range { pos: i, len: 0, bound: n });
        }
        if y.is_empty() {
            return Err(Error::EmptyText);
        }
        let since = self.store().next_id();
        let ys = self.encode_fragment(y).expect("nonempty");
        self.store_mut().pin(ys)?;
        let start = match self.start() {
            None => return self.commit(Some(ys), since, &[ys]),
            Some(s) => s,
        };
        let mut pieces = Vec::with_capacity(3);
        if i > 1 {
            pieces.push(self.uniq_pow(start, 1, i - 1)?);
        }
        pieces.push(PowSeq::from(vec![(ys, 1)]));
        if i <= n {
            pieces.push(self.uniq_pow(start, i, n - i + 1)?);
        }
        let (top, _) = merge_pow(self, &pieces)?;
        self.commit(Some(top), since, &[ys])
    }

    /// Inserts a copy of `T[j..j+k-1]` so that it starts at position `i`.
    pub fn insert_copy(&mut self, i: u64, j: u64, k: u64) -> Result<EditDelta> {
        let n = self.len();
        if i == 0 || i > n + 1 {
            return Err(Error::Range { pos: i, len: 0, bound: n });
        }
        if j == 0 || k == 0 || j.checked_add(k).map_or(true, |e| e - 1 > n) {
            return Err(Error::Range { pos: j, len: k, bound: n });
        }
        let since = self.store().next_id();
        let start = self.start().expect("nonempty text");
        let mut pieces = Vec::with_capacity(3);
        if i > 1 {
            pieces.push(self.uniq_pow(start, 1, i - 1)?);
        }
        pieces.push(self.uniq_pow(start, j, k)?);
        if i <= n {
            pieces.push(self.uniq_pow(start, i, n - i + 1)?);
        }
        let (top, _) = merge_pow(self, &pieces)?;
        self.commit(Some(top), since, &[])
    }

    /// Removes `k` symbols starting at position `i`.
    pub fn delete_range(&mut self, i: u64, k: u64) -> Result<EditDelta> {
        let n = self.len();
        if i == 0 || k == 0 || i.checked_add(k).map_or(true, |e| e - 1 > n) {
            return Err(Error::Range { pos: i, len: k, bound: n });
        }
        let since = self.store().next_id();
        let start = self.start().expect("nonempty text");
        if k == n {
            return self.commit(None, since, &[]);
        }
        let mut pieces = Vec::with_capacity(2);
        if i > 1 {
            pieces.push(self.uniq_pow(start, 1, i - 1)?);
        }
        if i + k <= n {
            pieces.push(self.uniq_pow(start, i + k, n - i - k + 1)?);
        }
        let (top, _) = merge_pow(self, &pieces)?;
        self.commit(Some(top), since, &[])
    }

    /// Drops every signature that is neither reachable from the start nor
    /// pinned. Returns what was removed.
    pub fn gc(&mut self) -> Vec<Sig> {
        let mut r = self.store_mut().remove_unreferenced();
        r.sort();
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bytes(s: &str) -> Vec<Symbol> {
        s.bytes().map(u32::from).collect()
    }

    #[test]
    fn insert_into_empty() {
        let mut e = Encoding::new(ParserParams::DEFAULT);
        let d = e.insert_str(1, &bytes("hello")).unwrap();
        let fresh = Encoding::encode_string(&bytes("hello"), ParserParams::DEFAULT);
        assert_eq!(e.text(), bytes("hello"));
        assert_eq!(e.size(), fresh.size());
        assert_eq!(d.added.len(), e.size());
        assert!(d.removed.is_empty());
        e.audit().unwrap();
    }

    #[test]
    fn insert_then_delete_restores_text() {
        let t = bytes("CABCABABABABABABABABABCCCC");
        let mut e = Encoding::encode_string(&t, ParserParams::DEFAULT);
        e.insert_str(1, &bytes("B")).unwrap();
        assert_eq!(e.text(), bytes("BCABCABABABABABABABABABCCCC"));
        e.audit().unwrap();
        e.delete_range(1, 1).unwrap();
        assert_eq!(e.text(), t);
        e.audit().unwrap();
    }

    #[test]
    fn unary_delete_stays_one_run() {
        let mut e = Encoding::encode_string(&bytes(&"a".repeat(100)), ParserParams::DEFAULT);
        e.delete_range(50, 1).unwrap();
        let a = e.store().lookup(&Assignment::Char(b'a' as u32)).unwrap();
        assert_eq!(e.store().assgn(e.start().unwrap()).unwrap(), Assignment::RunOf(a, 99));
        assert_eq!(e.size(), 2);
        e.audit().unwrap();
    }

    #[test]
    fn delete_everything() {
        let mut e = Encoding::encode_string(&bytes("abcabc"), ParserParams::DEFAULT);
        let before = e.size();
        let d = e.delete_range(1, 6).unwrap();
        assert_eq!(e.start(), None);
        assert!(e.store().is_empty());
        assert_eq!(d.removed.len(), before);
    }

    #[test]
    fn merge_single_full_piece_is_identity() {
        let mut e = Encoding::encode_string(&bytes("mississippi river"), ParserParams::DEFAULT);
        let s = e.start().unwrap();
        let (top, d) = merge_pow(&mut e, &[PowSeq::from(vec![(s, 1)])]).unwrap();
        assert_eq!(top, s);
        assert!(d.is_empty());
    }

    #[test]
    fn merge_two_copies() {
        let mut e = Encoding::encode_string(&bytes("xxCABCABzz"), ParserParams::DEFAULT);
        let s = e.start().unwrap();
        let u = e.uniq_pow(s, 3, 3).unwrap();
        let (top, _) = merge_pow(&mut e, &[u.clone(), u]).unwrap();
        assert_eq!(e.extract(top, 1, 6).unwrap(), bytes("CABCAB"));
    }

    #[test]
    fn errors() {
        let mut e = Encoding::encode_string(&bytes("abc"), ParserParams::DEFAULT);
        assert!(matches!(e.insert_str(5, &bytes("x")), Err(Error::Range { .. })));
        assert_eq!(e.insert_str(1, &[]), Err(Error::EmptyText));
        assert!(matches!(e.delete_range(3, 2), Err(Error::Range { .. })));
        assert_eq!(merge_pow(&mut e, &[]), Err(Error::NoPieces));
    }

    #[test]
    fn gc_is_idempotent() {
        let mut e = Encoding::encode_string(&bytes("abcabcabd"), ParserParams::DEFAULT);
        assert!(e.gc().is_empty());
        e.insert_str(4, &bytes("zz")).unwrap();
        e.gc();
        let n = e.size();
        assert!(e.gc().is_empty());
        assert_eq!(e.size(), n);
    }
}
