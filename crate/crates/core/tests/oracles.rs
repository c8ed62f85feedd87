//! Library results against brute-force computations that share no code
//! with the library's search routines.

mod common;

use std::collections::BTreeSet;

use common::{corpus, load, naive_compatible, random_algebra};
use nperm::algebra::{Elem, FiniteAlgebra};
use nperm::congruence::{all_congruences, principal_congruence};
use nperm::hm::{hm_search, min_degree, MinDegree};
use nperm::relation::BinRel;
use nperm::relcheck::enumerate_compatible_reflexive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// All ternary term operations of `alg`, as tables over `(x,y,z)` in
/// lexicographic order, by naive fixpoint iteration.
fn ternary_clone(alg: &FiniteAlgebra) -> BTreeSet<Vec<Elem>> {
    let k = alg.size() as Elem;
    let points: Vec<[Elem; 3]> = (0..k)
        .flat_map(|x| (0..k).flat_map(move |y| (0..k).map(move |z| [x, y, z])))
        .collect();
    let mut clone: BTreeSet<Vec<Elem>> = (0..3).map(|v| points.iter().map(|p| p[v]).collect()).collect();
    let sig = alg.signature();
    loop {
        let current: Vec<Vec<Elem>> = clone.iter().cloned().collect();
        let before = clone.len();
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            let mut idx = vec![0usize; arity];
            loop {
                let f: Vec<Elem> = (0..points.len())
                    .map(|p| {
                        let args: Vec<Elem> = idx.iter().map(|&i| current[i][p]).collect();
                        alg.apply(op, &args)
                    })
                    .collect();
                clone.insert(f);
                let mut pos = arity;
                let mut done = true;
                while pos > 0 {
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < current.len() {
                        done = false;
                        break;
                    }
                    idx[pos] = 0;
                }
                if done {
                    break;
                }
            }
        }
        if clone.len() == before {
            return clone;
        }
    }
}

/// Least `n ≤ max` with a chain of `n-1` term operations satisfying the
/// identities, found by scanning the clone.
fn brute_min_degree(alg: &FiniteAlgebra, max: usize) -> Option<usize> {
    let k = alg.size();
    let clone = ternary_clone(alg);
    let at = |f: &Vec<Elem>, x: usize, y: usize, z: usize| f[(x * k + y) * k + z];
    let xyy = |f: &Vec<Elem>| -> Vec<Elem> { (0..k).flat_map(|x| (0..k).map(move |y| (x, y))).map(|(x, y)| at(f, x, y, y)).collect() };
    let xxy = |f: &Vec<Elem>| -> Vec<Elem> { (0..k).flat_map(|x| (0..k).map(move |y| (x, y))).map(|(x, y)| at(f, x, x, y)).collect() };
    let first: Vec<Elem> = (0..k).flat_map(|x| (0..k).map(move |_| x as Elem)).collect();
    let second: Vec<Elem> = (0..k).flat_map(|_| (0..k).map(|y| y as Elem)).collect();
    // right faces reachable by chains of length i
    let mut frontier: BTreeSet<Vec<Elem>> = clone.iter().filter(|f| xyy(f) == first).map(xxy).collect();
    for n in 2..=max {
        if frontier.contains(&second) {
            return Some(n);
        }
        frontier = clone.iter().filter(|f| frontier.contains(&xyy(f))).map(xxy).collect();
    }
    None
}

#[test]
fn term_search_agrees_with_clone_scan() {
    let mut algebras: Vec<FiniteAlgebra> = ["group2", "imp2", "lattice2", "set2"].iter().map(|n| load(n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..60 {
        let arities: &[usize] = match i % 4 {
            0 => &[2],
            1 => &[2, 1],
            2 => &[2, 2],
            _ => &[1, 0, 2],
        };
        algebras.push(random_algebra(&mut rng, &format!("r{}", i), 2, arities));
    }
    let mut seen = BTreeSet::new();
    for alg in &algebras {
        let expected = brute_min_degree(alg, 6);
        for n in 2..=6 {
            let found = hm_search(alg, n, 100_000).unwrap().is_some();
            assert_eq!(found, expected.is_some_and(|d| d <= n), "{} n={}", alg.name(), n);
        }
        let got = match min_degree(alg, 100_000).unwrap() {
            MinDegree::Degree(w) => Some(w.n()),
            MinDegree::NotPermutable => None,
        };
        // the scan stops at 6; no sampled algebra has a larger degree
        assert_eq!(got, expected, "{}", alg.name());
        seen.insert(got);
    }
    // the sample exercises degrees 2 and 3 and non-permutable algebras
    assert!(seen.contains(&Some(2)) && seen.contains(&Some(3)) && seen.contains(&None), "{:?}", seen);
}

fn reflexive_relations(k: usize) -> impl Iterator<Item = BinRel> {
    let off: Vec<(usize, usize)> = (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    (0u64..1 << off.len()).map(move |mask| {
        let mut r = BinRel::diagonal(k);
        for (i, &(a, b)) in off.iter().enumerate() {
            if mask >> i & 1 == 1 {
                r.insert(a, b);
            }
        }
        r
    })
}

#[test]
fn compatible_reflexive_enumeration_is_complete() {
    let mut algebras: Vec<FiniteAlgebra> = corpus().into_iter().filter(|a| a.size() <= 4).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..20 {
        algebras.push(random_algebra(&mut rng, &format!("r{}", i), 3, &[2]));
    }
    for alg in &algebras {
        let oracle: BTreeSet<BinRel> = reflexive_relations(alg.size()).filter(|r| naive_compatible(alg, r)).collect();
        let got: BTreeSet<BinRel> = enumerate_compatible_reflexive(alg, 100_000).unwrap().into_iter().collect();
        assert_eq!(got, oracle, "{}", alg.name());
    }
}

/// Canonical block labellings of all partitions of `0..k`.
fn partitions(k: usize) -> Vec<Vec<Elem>> {
    fn rec(i: usize, k: usize, cur: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        let mut reps: Vec<Elem> = (0..i).filter(|&j| cur[j] == j as Elem).map(|j| j as Elem).collect();
        reps.push(i as Elem);
        for r in reps {
            cur.push(r);
            rec(i + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, &mut Vec::new(), &mut out);
    out
}

#[test]
fn congruences_match_partition_filter() {
    let mut algebras: Vec<FiniteAlgebra> = corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..20 {
        algebras.push(random_algebra(&mut rng, &format!("u{}", i), 5, &[1, 1]));
        algebras.push(random_algebra(&mut rng, &format!("b{}", i), 4, &[2]));
    }
    for alg in &algebras {
        let k = alg.size();
        let oracle: Vec<Vec<Elem>> = partitions(k)
            .into_iter()
            .filter(|p| naive_compatible(alg, &BinRel::from_fn(k, |a, b| p[a] == p[b])))
            .collect();
        let got = all_congruences(alg, 100_000).unwrap();
        let got_set: BTreeSet<Vec<Elem>> = got.iter().map(|c| c.reps().to_vec()).collect();
        let oracle_set: BTreeSet<Vec<Elem>> = oracle.iter().cloned().collect();
        assert_eq!(got_set, oracle_set, "{}", alg.name());
        assert_eq!(got.len(), oracle.len(), "{}: duplicates", alg.name());

        for a in 0..k as Elem {
            for b in 0..k as Elem {
                // the least congruence relating a and b
                let least = oracle
                    .iter()
                    .filter(|p| p[a as usize] == p[b as usize])
                    .min_by_key(|p| std::cmp::Reverse(p.iter().collect::<BTreeSet<_>>().len()))
                    .unwrap();
                let cg = principal_congruence(alg, a, b).unwrap();
                assert_eq!(cg.reps(), &least[..], "{} cg({},{})", alg.name(), a, b);
            }
        }
    }
}
