use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigenc::index::{left_of, vocc_of};
use sigenc::lz77::{compute_weights, factorize, fst, from_factors, Factor};
use sigenc::{Encoding, Index, ParserParams, Symbol};

fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: u32) -> Vec<Symbol> {
    (0..n).map(|_| rng.gen_range(0..sigma) + b'a' as u32).collect()
}

fn repetitive_text(rng: &mut ChaCha8Rng, n: usize, sigma: u32) -> Vec<Symbol> {
    let mut t = random_text(rng, 8.min(n), sigma);
    while t.len() < n {
        if rng.gen_bool(0.2) {
            t.push(rng.gen_range(0..sigma) + b'a' as u32);
        } else {
            let p = rng.gen_range(0..t.len());
            let l = rng.gen_range(1..=100).min(n - t.len());
            for k in 0..l {
                let c = t[p + k];
                t.push(c);
            }
        }
    }
    t
}

/// Leftmost start (1-based) of `t[j..j+k]` if it starts before `j`.
fn naive_fst(t: &[Symbol], j: usize, k: usize) -> Option<u64> {
    let p = &t[j..j + k];
    (0..j).find(|&s| &t[s..s + k] == p).map(|s| s as u64 + 1)
}

fn naive_lz77(t: &[Symbol]) -> Vec<Factor> {
    let mut out = Vec::new();
    let mut j = 0;
    while j < t.len() {
        let mut best = (0, 0);
        for s in 0..j {
            let l = (0..t.len() - j).take_while(|&d| t[s + d] == t[j + d]).count();
            if l > best.1 {
                best = (s, l);
            }
        }
        if best.1 == 0 {
            out.push(Factor::Literal(t[j]));
            j += 1;
        } else {
            out.push(Factor::Ref { pos: best.0 as u64 + 1, len: best.1 as u64 });
            j += best.1;
        }
    }
    out
}

fn expand(f: &[Factor]) -> Vec<Symbol> {
    let mut t = Vec::new();
    for x in f {
        match *x {
            Factor::Literal(c) => t.push(c),
            Factor::Ref { pos, len } => {
                for d in 0..len {
                    let c = t[(pos + d - 1) as usize];
                    t.push(c);
                }
            }
        }
    }
    t
}

#[test]
fn factorization_matches_naive_parser() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for round in 0..100 {
        let n = rng.gen_range(1..=600);
        let sigma = [2, 3, 4, 26][round % 4];
        let t = if round % 2 == 0 { random_text(&mut rng, n, sigma) } else { repetitive_text(&mut rng, n, sigma) };
        let e = Encoding::encode_string(&t, ParserParams::DEFAULT);
        let f = factorize(&e).unwrap();
        assert_eq!(f, naive_lz77(&t), "round {}", round);
        assert_eq!(expand(&f), t);
        let back = from_factors(&f, ParserParams::DEFAULT).unwrap();
        assert_eq!(back.text(), t);
        back.audit().unwrap();
    }
}

#[test]
fn fst_matches_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let t = repetitive_text(&mut rng, 700, 2);
    let e = Encoding::encode_string(&t, ParserParams::DEFAULT);
    let idx = Index::build(&e);
    let w = compute_weights(&e, &idx);
    for _ in 0..2000 {
        let j = rng.gen_range(0..t.len());
        let k = rng.gen_range(1..=(t.len() - j).min(80));
        assert_eq!(fst(&e, &idx, &w, j as u64 + 1, k as u64).unwrap(), naive_fst(&t, j, k), "{} {}", j, k);
    }
}

#[test]
fn weights_match_occurrences() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let t = repetitive_text(&mut rng, 900, 3);
    let e = Encoding::encode_string(&t, ParserParams::DEFAULT);
    let idx = Index::build(&e);
    let w = compute_weights(&e, &idx);
    for (s, _) in e.store().iter() {
        let v = vocc_of(&e, s).unwrap();
        assert_eq!(w.min_occ(s), v.first().copied());
        if let Some(l) = left_of(e.store(), s) {
            assert_eq!(w.weight(&e, s), Some(v[0] + l.len));
        }
    }
}

#[test]
fn unary_factors_stay_small() {
    for n in [2u64, 10, 1000, 100_000] {
        let f = [Factor::Literal(5), Factor::Ref { pos: 1, len: n - 1 }];
        let e = from_factors(&f, ParserParams::DEFAULT).unwrap();
        assert_eq!(e.len(), n);
        assert_eq!(e.size(), 2);
    }
}

#[test]
fn literals_only_equal_plain_encoding() {
    let t: Vec<Symbol> = (0..40).collect();
    let f: Vec<Factor> = t.iter().map(|&c| Factor::Literal(c)).collect();
    let e = from_factors(&f, ParserParams::DEFAULT).unwrap();
    let plain = Encoding::encode_string(&t, ParserParams::DEFAULT);
    assert_eq!(e.text(), t);
    // Ids come in a different order, so the shape may differ; the text is
    // what must agree, and the parse is the fresh one of its own store.
    let mut e = e;
    let s = e.start();
    assert_eq!(e.encode_fragment(&t), s);
    assert_eq!(factorize(&plain).unwrap(), f);
}
