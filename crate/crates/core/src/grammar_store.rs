//! Signature dictionary plus reverse DAG of a run-length grammar.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Alphabet symbol. Byte texts use `0..=255`.
pub type Symbol = u32;

/// A grammar variable. Ids are positive and never reused within a store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sig(pub u64);

impl fmt::Display for Sig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<Sig> for u64 {
    fn from(s: Sig) -> u64 {
        s.0
    }
}

/// Right-hand side of a production.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assignment {
    Char(Symbol),
    Pair(Sig, Sig),
    RunOf(Sig, u64),
}

impl Assignment {
    /// Operand occurrences, with multiplicity.
    pub fn operands(&self) -> impl Iterator<Item = Sig> {
        let (a, b) = match *self {
            Assignment::Char(_) => (None, None),
            Assignment::Pair(l, r) => (Some(l), Some(r)),
            Assignment::RunOf(b, _) => (Some(b), None),
        };
        a.into_iter().chain(b)
    }
}

/// Per-signature metadata.
#[derive(Debug, Clone)]
pub struct NodeMeta {
    pub assign: Assignment,
    pub length: u64,
    pub level: u32,
    parents: Vec<Sig>,
    refcount: u32,
}

impl NodeMeta {
    pub fn parent_refs(&self) -> &[Sig] {
        &self.parents
    }

    pub fn refcount(&self) -> u32 {
        self.refcount
    }

    /// References held from outside the grammar (start symbols, pattern
    /// handles, imported variables).
    pub fn pins(&self) -> u32 {
        self.refcount - self.parents.len() as u32
    }
}

/// Dictionary `assignment -> signature` and DAG `signature -> metadata`.
#[derive(Debug, Clone, Default)]
pub struct GrammarStore {
    nodes: Vec<Option<NodeMeta>>,
    dict: BTreeMap<Assignment, Sig>,
    next_id: u64,
    live: usize,
}

impl GrammarStore {
    pub fn new() -> Self {
        GrammarStore { nodes: vec![None], dict: BTreeMap::new(), next_id: 1, live: 0 }
    }

    /// Number of live signatures.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// The id the next fresh signature will get.
    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn contains(&self, e: Sig) -> bool {
        self.get(e).is_some()
    }

    pub fn get(&self, e: Sig) -> Option<&NodeMeta> {
        self.nodes.get(e.0 as usize).and_then(|n| n.as_ref())
    }

    pub fn meta(&self, e: Sig) -> Result<&NodeMeta> {
        self.get(e).ok_or(Error::Dead(e))
    }

    /// Unchecked access for traversals over signatures known to be live.
    #[inline]
    pub(crate) fn node(&self, e: Sig) -> &NodeMeta {
        match self.nodes.get(e.0 as usize) {
            Some(Some(n)) => n,
            _ => panic!("signature {} is not live", e),
        }
    }

    #[inline]
    pub(crate) fn length(&self, e: Sig) -> u64 {
        self.node(e).length
    }

    #[inline]
    pub(crate) fn level(&self, e: Sig) -> u32 {
        self.node(e).level
    }

    pub fn assgn(&self, e: Sig) -> Result<Assignment> {
        Ok(self.meta(e)?.assign)
    }

    pub fn len_of(&self, e: Sig) -> Result<u64> {
        Ok(self.meta(e)?.length)
    }

    pub fn level_of(&self, e: Sig) -> Result<u32> {
        Ok(self.meta(e)?.level)
    }

    pub fn parents_of(&self, e: Sig) -> Result<&[Sig]> {
        Ok(self.meta(e)?.parent_refs())
    }

    /// Live signatures in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (Sig, &NodeMeta)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.as_ref().map(|n| (Sig(i as u64), n)))
    }

    /// Live signatures with id at least `from`, ascending.
    pub fn live_since(&self, from: u64) -> impl Iterator<Item = Sig> + '_ {
        let lo = (from as usize).min(self.nodes.len());
        self.nodes[lo..]
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_some())
            .map(move |(k, _)| Sig((lo + k) as u64))
    }

    /// Hands ids `from..` back when nothing at or above `from` is live, so a
    /// scratch computation leaves no trace in later allocations.
    pub(crate) fn rewind(&mut self, from: u64) {
        if from < self.next_id && self.live_since(from).next().is_none() {
            self.next_id = from;
            self.nodes.truncate((from as usize).max(1));
        }
    }

    pub fn lookup(&self, x: &Assignment) -> Option<Sig> {
        self.dict.get(x).copied()
    }

    fn derive_meta(&self, x: &Assignment) -> Result<(u64, u32)> {
        let live = |s: Sig| self.get(s).ok_or(Error::Dangling(s));
        Ok(match *x {
            Assignment::Char(_) => (1, 0),
            Assignment::Pair(l, r) => {
                let (ln, rn) = (live(l)?, live(r)?);
                if ln.level != rn.level && ln.level != rn.level + 1 {
                    return Err(Error::MixedLevels);
                }
                (ln.length + rn.length, rn.level + 1)
            }
            Assignment::RunOf(b, k) => {
                if k == 0 {
                    return Err(Error::Invariant("run exponent must be positive".into()));
                }
                let bn = live(b)?;
                let length = bn
                    .length
                    .checked_mul(k)
                    .ok_or_else(|| Error::Invariant("run length overflows".into()))?;
                (length, bn.level + 1)
            }
        })
    }

    fn insert_node(&mut self, id: Sig, x: Assignment, length: u64, level: u32) {
        for o in x.operands() {
            let n = self.nodes[o.0 as usize].as_mut().expect("operand checked live");
            n.parents.push(id);
            n.refcount += 1;
        }
        let idx = id.0 as usize;
        if self.nodes.len() <= idx {
            self.nodes.resize(idx + 1, None);
        }
        self.nodes[idx] = Some(NodeMeta { assign: x, length, level, parents: Vec::new(), refcount: 0 });
        self.dict.insert(x, id);
        self.next_id = self.next_id.max(id.0 + 1);
        self.live += 1;
    }

    /// Returns the signature of `x`, allocating `max + 1` when unmapped.
    pub fn intern(&mut self, x: Assignment) -> Result<Sig> {
        if let Some(&e) = self.dict.get(&x) {
            return Ok(e);
        }
        let (length, level) = self.derive_meta(&x)?;
        let id = Sig(self.next_id);
        self.insert_node(id, x, length, level);
        Ok(id)
    }

    /// Inserts `x` under a caller-chosen id (file loading, fixed grammars).
    pub fn insert_with_id(&mut self, id: Sig, x: Assignment) -> Result<()> {
        if id.0 == 0 {
            return Err(Error::Format("signature ids start at 1".into()));
        }
        if self.contains(id) {
            return Err(Error::Format(format!("duplicate signature {}", id)));
        }
        if let Some(&other) = self.dict.get(&x) {
            return Err(Error::Format(format!("signatures {} and {} share an assignment", other, id)));
        }
        if x.operands().any(|o| o >= id) {
            return Err(Error::Format(format!("signature {} refers to a larger id", id)));
        }
        let (length, level) = self.derive_meta(&x)?;
        self.insert_node(id, x, length, level);
        Ok(())
    }

    /// Left fold of pair interning over a block of 2..=5 same-level signatures.
    pub fn fold_block(&mut self, seq: &[Sig]) -> Result<Sig> {
        if !(2..=5).contains(&seq.len()) {
            return Err(Error::BlockLength(seq.len()));
        }
        let level = self.meta(seq[0])?.level;
        for &s in seq {
            if self.meta(s)?.level != level {
                return Err(Error::MixedLevels);
            }
        }
        let mut acc = seq[0];
        for &s in &seq[1..] {
            acc = self.intern(Assignment::Pair(acc, s))?;
        }
        Ok(acc)
    }

    /// Adds an external reference.
    pub fn pin(&mut self, e: Sig) -> Result<()> {
        let n = self.nodes.get_mut(e.0 as usize).and_then(|n| n.as_mut()).ok_or(Error::Dead(e))?;
        n.refcount += 1;
        Ok(())
    }

    /// Drops an external reference (or an unreferenced fresh signature) and
    /// removes everything that becomes unreferenced. Returns the removed
    /// signatures.
    pub fn release(&mut self, e: Sig) -> Result<Vec<Sig>> {
        let n = self.meta(e)?;
        let mut removed = Vec::new();
        if n.refcount == 0 {
            self.remove_cascade(e, &mut removed);
            return Ok(removed);
        }
        if n.pins() == 0 {
            return Err(Error::Invariant(format!("release of unpinned signature {}", e)));
        }
        let n = self.nodes[e.0 as usize].as_mut().unwrap();
        n.refcount -= 1;
        if n.refcount == 0 {
            self.remove_cascade(e, &mut removed);
        }
        Ok(removed)
    }

    fn remove_cascade(&mut self, e: Sig, removed: &mut Vec<Sig>) {
        let mut stack = vec![e];
        while let Some(s) = stack.pop() {
            let node = self.nodes[s.0 as usize].take().expect("cascade over live nodes");
            self.dict.remove(&node.assign);
            self.live -= 1;
            removed.push(s);
            for o in node.assign.operands() {
                let on = self.nodes[o.0 as usize].as_mut().expect("operands outlive parents");
                let at = on.parents.iter().position(|&p| p == s).expect("parent ref present");
                on.parents.swap_remove(at);
                on.refcount -= 1;
                if on.refcount == 0 {
                    stack.push(o);
                }
            }
        }
    }

    /// Removes every signature with no references at all, cascading.
    pub fn remove_unreferenced(&mut self) -> Vec<Sig> {
        let roots: Vec<Sig> =
            self.iter().filter(|(_, n)| n.refcount == 0).map(|(s, _)| s).collect();
        let mut removed = Vec::new();
        for s in roots {
            if self.get(s).is_some_and(|n| n.refcount == 0) {
                self.remove_cascade(s, &mut removed);
            }
        }
        removed
    }

    /// Full audit: bijection, operand order, length/level equations and
    /// parent/refcount bookkeeping.
    pub fn audit(&self) -> Result<()> {
        let bad = |m: alloc::string::String| Err(Error::Invariant(m));
        let mut expected_parents: BTreeMap<Sig, Vec<Sig>> = BTreeMap::new();
        for (e, n) in self.iter() {
            if self.lookup(&n.assign) != Some(e) {
                return bad(format!("dictionary does not map back to {}", e));
            }
            for o in n.assign.operands() {
                if o >= e || !self.contains(o) {
                    return bad(format!("{} has operand {} out of order or dead", e, o));
                }
                expected_parents.entry(o).or_default().push(e);
            }
            let (length, level) = self.derive_meta(&n.assign)?;
            if length != n.length || level != n.level {
                return bad(format!("length/level of {} out of date", e));
            }
        }
        if self.dict.len() != self.live {
            return bad(format!("dictionary holds {} entries for {} nodes", self.dict.len(), self.live));
        }
        for (e, n) in self.iter() {
            let mut want = expected_parents.remove(&e).unwrap_or_default();
            let mut have = n.parents.clone();
            want.sort();
            have.sort();
            if want != have {
                return bad(format!("parent list of {} out of date", e));
            }
            if (n.refcount as usize) < have.len() {
                return bad(format!("refcount of {} below parent count", e));
            }
        }
        Ok(())
    }
}
