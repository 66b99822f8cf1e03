//! Straight-line programs: import into a signature store, export of an
//! encoding (full or incremental), and LCE over imported variables.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::editor::{merge_pow, EditDelta};
use crate::encoder::{Encoding, PowSeq};
use crate::error::{Error, Result};
use crate::grammar_store::{Assignment, Sig, Symbol};
use crate::lcp_parse::ParserParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Char(Symbol),
    Pair(u64, u64),
}

/// An SLP in Chomsky normal form. Rules are kept by ascending id and only
/// refer to smaller ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slp {
    rules: BTreeMap<u64, Rule>,
    start: u64,
}

impl Slp {
    /// Validates rules given in file order.
    pub fn from_rules(rules: Vec<(u64, Rule)>, start: u64) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::Format("no rules".into()));
        }
        let mut map = BTreeMap::new();
        let mut last = 0;
        for (id, r) in rules {
            if id == 0 {
                return Err(Error::Format("variable id 0".into()));
            }
            if map.contains_key(&id) {
                return Err(Error::DuplicateRule(id));
            }
            if id < last {
                return Err(Error::Format(alloc::format!("rule {} listed after rule {}", id, last)));
            }
            if let Rule::Pair(l, r) = r {
                for o in [l, r] {
                    if o >= id {
                        return Err(Error::ForwardRef { id, operand: o });
                    }
                    if !map.contains_key(&o) {
                        return Err(Error::UnknownVar(o));
                    }
                }
            }
            map.insert(id, r);
            last = id;
        }
        if !map.contains_key(&start) {
            return Err(Error::UnknownVar(start));
        }
        Ok(Slp { rules: map, start })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn rules(&self) -> impl Iterator<Item = (u64, Rule)> + '_ {
        self.rules.iter().map(|(&i, &r)| (i, r))
    }

    pub fn rule(&self, id: u64) -> Option<Rule> {
        self.rules.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// `|val(id)|` for every variable.
    pub fn lengths(&self) -> BTreeMap<u64, u64> {
        let mut out = BTreeMap::new();
        for (&id, &r) in &self.rules {
            let l = match r {
                Rule::Char(_) => 1,
                Rule::Pair(a, b) => out[&a] + out[&b],
            };
            out.insert(id, l);
        }
        out
    }

    /// Expands a variable by walking the rules.
    pub fn expand(&self, id: u64) -> Result<Vec<Symbol>> {
        if !self.rules.contains_key(&id) {
            return Err(Error::UnknownVar(id));
        }
        let mut out = Vec::new();
        let mut stack = alloc::vec![id];
        while let Some(v) = stack.pop() {
            match self.rules[&v] {
                Rule::Char(c) => out.push(c),
                Rule::Pair(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        Ok(out)
    }

    /// The rules reachable from the start, renumbered 1.. in post order.
    /// Two SLPs that differ only in ids have equal canonical forms.
    pub fn canonical(&self) -> Slp {
        let mut ids: BTreeMap<u64, u64> = BTreeMap::new();
        let mut rules = BTreeMap::new();
        let mut stack = alloc::vec![(self.start, false)];
        while let Some((v, done)) = stack.pop() {
            if ids.contains_key(&v) {
                continue;
            }
            let r = self.rules[&v];
            match (r, done) {
                (Rule::Pair(l, rr), false) => {
                    stack.push((v, true));
                    stack.push((rr, false));
                    stack.push((l, false));
                }
                _ => {
                    let nr = match r {
                        Rule::Char(c) => Rule::Char(c),
                        Rule::Pair(l, rr) => Rule::Pair(ids[&l], ids[&rr]),
                    };
                    let n = ids.len() as u64 + 1;
                    ids.insert(v, n);
                    rules.insert(n, nr);
                }
            }
        }
        Slp { start: ids[&self.start], rules }
    }
}

/// Builds one store holding a signature for every variable. Each variable's
/// signature is pinned; the start variable also becomes the text.
pub fn import_slp(slp: &Slp, params: ParserParams) -> Result<(Encoding, BTreeMap<u64, Sig>)> {
    let mut enc = Encoding::new(params);
    let mut map: BTreeMap<u64, Sig> = BTreeMap::new();
    for (id, r) in slp.rules() {
        let s = match r {
            Rule::Char(c) => enc.encode_fragment(&[c]).expect("one symbol"),
            Rule::Pair(l, r) => {
                let pieces = [PowSeq::from(alloc::vec![(map[&l], 1)]), PowSeq::from(alloc::vec![(map[&r], 1)])];
                merge_pow(&mut enc, &pieces)?.0
            }
        };
        enc.store_mut().pin(s)?;
        map.insert(id, s);
    }
    enc.set_start(Some(map[&slp.start]))?;
    enc.gc();
    Ok((enc, map))
}

/// Drops the per-variable pins taken by [`import_slp`] and collects what
/// only those pins kept alive. The text stays.
pub fn release_variables(enc: &mut Encoding, map: &BTreeMap<u64, Sig>) -> Result<Vec<Sig>> {
    let mut removed = Vec::new();
    for &s in map.values() {
        removed.extend(enc.store_mut().release(s)?);
    }
    removed.extend(enc.gc());
    removed.sort();
    Ok(removed)
}

/// An SLP exported from an encoding, with enough bookkeeping to follow
/// later edits.
#[derive(Debug, Clone)]
pub struct ExportedSlp {
    slp: Slp,
    /// Variable deriving each signature.
    var: BTreeMap<Sig, u64>,
    /// Rule ids created for each signature (empty for exponent-1 runs).
    owned: BTreeMap<Sig, Vec<u64>>,
    next: u64,
}

impl ExportedSlp {
    pub fn slp(&self) -> &Slp {
        &self.slp
    }

    pub fn var_of(&self, s: Sig) -> Option<u64> {
        self.var.get(&s).copied()
    }

    fn push(&mut self, r: Rule) -> u64 {
        let id = self.next;
        self.next += 1;
        self.slp.rules.insert(id, r);
        id
    }

    fn translate(&mut self, enc: &Encoding, s: Sig) -> Result<()> {
        let first = self.next;
        let v = match enc.store().assgn(s)? {
            Assignment::Char(c) => self.push(Rule::Char(c)),
            Assignment::Pair(l, r) => {
                let (a, b) = (self.operand(l)?, self.operand(r)?);
                self.push(Rule::Pair(a, b))
            }
            Assignment::RunOf(b, k) => {
                let base = self.operand(b)?;
                // powers[i] derives base^(2^i)
                let mut powers = alloc::vec![base];
                while 1u64 << powers.len() <= k {
                    let q = *powers.last().unwrap();
                    powers.push(self.push(Rule::Pair(q, q)));
                }
                let mut acc = *powers.last().unwrap();
                for bit in (0..powers.len() - 1).rev() {
                    if k >> bit & 1 == 1 {
                        acc = self.push(Rule::Pair(acc, powers[bit]));
                    }
                }
                acc
            }
        };
        self.var.insert(s, v);
        self.owned.insert(s, (first..self.next).collect());
        Ok(())
    }

    fn operand(&self, s: Sig) -> Result<u64> {
        self.var.get(&s).copied().ok_or(Error::Invariant(alloc::format!("signature {} exported before its operands", s)))
    }
}

/// Exports the whole encoding. Ids follow signature order.
pub fn export_slp(enc: &Encoding) -> Result<ExportedSlp> {
    let start = enc.start().ok_or(Error::EmptyText)?;
    let mut out = ExportedSlp {
        slp: Slp { rules: BTreeMap::new(), start: 0 },
        var: BTreeMap::new(),
        owned: BTreeMap::new(),
        next: 1,
    };
    for (s, _) in enc.store().iter() {
        out.translate(enc, s)?;
    }
    out.slp.start = out.var[&start];
    Ok(out)
}

/// Follows an edit: drops the rules of removed signatures and appends rules
/// for added ones.
pub fn export_delta(enc: &Encoding, delta: &EditDelta, prev: &ExportedSlp) -> Result<ExportedSlp> {
    let start = enc.start().ok_or(Error::EmptyText)?;
    let mut out = prev.clone();
    for s in &delta.removed {
        let owned = out.owned.remove(s).ok_or(Error::Invariant(alloc::format!("removed {} was never exported", s)))?;
        out.var.remove(s);
        for id in owned {
            out.slp.rules.remove(&id);
        }
    }
    for &s in &delta.added {
        if out.var.contains_key(&s) {
            return Err(Error::Invariant(alloc::format!("added {} is already exported", s)));
        }
        out.translate(enc, s)?;
    }
    out.slp.start = out.operand(start)?;
    Ok(out)
}

fn sig_of(map: &BTreeMap<u64, Sig>, x: u64) -> Result<Sig> {
    map.get(&x).copied().ok_or(Error::UnknownVar(x))
}

/// Longest common prefix of `val(xi)[a..]` and `val(xj)[b..]`.
pub fn slp_lce(enc: &Encoding, map: &BTreeMap<u64, Sig>, xi: u64, xj: u64, a: u64, b: u64) -> Result<u64> {
    enc.lce_forward(sig_of(map, xi)?, sig_of(map, xj)?, a, b)
}

pub fn slp_lcp(enc: &Encoding, map: &BTreeMap<u64, Sig>, xi: u64, xj: u64) -> Result<u64> {
    enc.lcp_of(sig_of(map, xi)?, sig_of(map, xj)?)
}

pub fn slp_lcs(enc: &Encoding, map: &BTreeMap<u64, Sig>, xi: u64, xj: u64) -> Result<u64> {
    enc.lcs_of(sig_of(map, xi)?, sig_of(map, xj)?)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use alloc::vec;

    pub(crate) fn example_slp() -> Slp {
        let (a, b, c) = (b'A' as u32, b'B' as u32, b'C' as u32);
        Slp::from_rules(
            vec![
                (1, Rule::Char(a)),
                (2, Rule::Char(b)),
                (3, Rule::Char(c)),
                (4, Rule::Pair(3, 1)),
                (5, Rule::Pair(4, 2)),
                (6, Rule::Pair(5, 5)),
                (7, Rule::Pair(2, 3)),
                (8, Rule::Pair(1, 2)),
                (9, Rule::Pair(7, 8)),
                (10, Rule::Pair(6, 9)),
                (11, Rule::Pair(10, 6)),
            ],
            11,
        )
        .unwrap()
    }

    fn bytes(s: &str) -> Vec<Symbol> {
        s.bytes().map(u32::from).collect()
    }

    #[test]
    fn example_import() {
        let slp = example_slp();
        assert_eq!(slp.expand(11).unwrap(), bytes("CABCABBCABCABCAB"));
        let (enc, map) = import_slp(&slp, ParserParams::DEFAULT).unwrap();
        assert_eq!(enc.text(), bytes("CABCABBCABCABCAB"));
        for (id, _) in slp.rules() {
            let s = map[&id];
            assert_eq!(enc.extract(s, 1, enc.store().len_of(s).unwrap()).unwrap(), slp.expand(id).unwrap());
        }
        assert_eq!(slp_lcp(&enc, &map, 4, 5).unwrap(), 2);
        assert_eq!(slp_lce(&enc, &map, 11, 11, 1, 1).unwrap(), 16);
        assert_eq!(slp_lcs(&enc, &map, 6, 11).unwrap(), 6);
        assert!(slp_lcp(&enc, &map, 4, 12).is_err());
        enc.audit().unwrap();
    }

    #[test]
    fn bad_rule_sets() {
        assert!(Slp::from_rules(vec![], 1).is_err());
        assert_eq!(
            Slp::from_rules(vec![(1, Rule::Char(1)), (1, Rule::Char(2))], 1),
            Err(Error::DuplicateRule(1))
        );
        assert_eq!(
            Slp::from_rules(vec![(1, Rule::Char(1)), (2, Rule::Pair(1, 3))], 2),
            Err(Error::ForwardRef { id: 2, operand: 3 })
        );
        assert_eq!(Slp::from_rules(vec![(2, Rule::Char(1)), (3, Rule::Pair(1, 2))], 3), Err(Error::UnknownVar(1)));
        assert_eq!(Slp::from_rules(vec![(1, Rule::Char(1))], 2), Err(Error::UnknownVar(2)));
    }

    #[test]
    fn run_export_uses_squaring() {
        let e = Encoding::encode_string(&[3; 5], ParserParams::DEFAULT);
        let x = export_slp(&e).unwrap();
        // C, e^2, e^4, e^4 e
        assert_eq!(x.slp().len(), 4);
        assert_eq!(x.slp().expand(x.slp().start()).unwrap(), [3; 5]);
        let e = Encoding::encode_string(&[3], ParserParams::DEFAULT);
        let x = export_slp(&e).unwrap();
        assert_eq!(x.slp().len(), 1);
        assert!(export_slp(&Encoding::new(ParserParams::DEFAULT)).is_err());
    }

    #[test]
    fn release_keeps_text() {
        let (mut enc, map) = import_slp(&example_slp(), ParserParams::DEFAULT).unwrap();
        let before = enc.size();
        release_variables(&mut enc, &map).unwrap();
        assert!(enc.size() <= before);
        assert_eq!(enc.text(), bytes("CABCABBCABCABCAB"));
        enc.audit().unwrap();
    }
}
