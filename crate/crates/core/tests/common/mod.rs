#![allow(dead_code)]

use std::path::PathBuf;

use nperm::algebra::FiniteAlgebra;
use nperm::format::read_algebra;
use nperm::relation::BinRel;
use rand::Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus_path(name: &str) -> PathBuf {
    corpus_dir().join(format!("{}.alg", name))
}

pub fn load(name: &str) -> FiniteAlgebra {
    read_algebra(&corpus_path(name)).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

/// Every well-formed algebra in the corpus, by file name.
pub fn corpus() -> Vec<FiniteAlgebra> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "alg").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .filter(|n| n != "malformed")
        .collect();
    names.sort();
    names.iter().map(|n| load(n)).collect()
}

pub fn random_rel<G: Rng>(rng: &mut G, size: usize) -> BinRel {
    let density: f64 = rng.gen_range(0.0..1.0);
    BinRel::from_fn(size, |_, _| rng.gen_bool(density))
}

/// Endpoints of all walks `a = e0, e1, …, en` with step `i` in `rels[i % 2]`,
/// found by enumerating the walks one by one.
pub fn naive_alternating(r: &BinRel, s: &BinRel, n: usize) -> BinRel {
    fn walk(rels: [&BinRel; 2], step: usize, n: usize, cur: usize, hit: &mut Vec<bool>) {
        if step == n {
            hit[cur] = true;
            return;
        }
        let rel = rels[step % 2];
        for next in 0..rel.size() {
            if rel.contains(cur, next) {
                walk(rels, step + 1, n, next, hit);
            }
        }
    }
    let k = r.size();
    let mut out = BinRel::empty(k);
    for a in 0..k {
        let mut hit = vec![false; k];
        walk([r, s], 0, n, a, &mut hit);
        for (b, &h) in hit.iter().enumerate() {
            if h {
                out.insert(a, b);
            }
        }
    }
    out
}

/// `R` then `S` straight from the definition.
pub fn naive_compose(r: &BinRel, s: &BinRel) -> BinRel {
    let k = r.size();
    BinRel::from_fn(k, |a, c| (0..k).any(|b| r.contains(a, b) && s.contains(b, c)))
}

/// Random operation tables of the given arities on `0..size`.
pub fn random_algebra<G: Rng>(rng: &mut G, name: &str, size: usize, arities: &[usize]) -> FiniteAlgebra {
    use nperm::algebra::Symbol;
    let ops = arities
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let len = size.pow(a as u32);
            let table = (0..len).map(|_| rng.gen_range(0..size as u32)).collect();
            (Symbol::new(format!("f{}", i), a), table)
        })
        .collect();
    FiniteAlgebra::new(name, size, ops).unwrap()
}

/// Whether `r` is closed under every operation, checked pair tuple by pair
/// tuple.
pub fn naive_compatible(alg: &FiniteAlgebra, r: &BinRel) -> bool {
    let pairs: Vec<(u32, u32)> = r.pairs().map(|(a, b)| (a as u32, b as u32)).collect();
    let sig = alg.signature();
    for op in 0..sig.len() {
        let arity = sig.arity(op);
        let mut idx = vec![0usize; arity];
        if arity > 0 && pairs.is_empty() {
            continue;
        }
        loop {
            let left: Vec<u32> = idx.iter().map(|&i| pairs[i].0).collect();
            let right: Vec<u32> = idx.iter().map(|&i| pairs[i].1).collect();
            if !r.contains(alg.apply(op, &left) as usize, alg.apply(op, &right) as usize) {
                return false;
            }
            // odometer
            let mut pos = arity;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < pairs.len() {
                    break;
                }
                idx[pos] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    true
}
