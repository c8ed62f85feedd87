//! Congruences of finite algebras and permutability degrees of congruence
//! pairs.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::relation::BinRel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("element {0} is outside the universe")]
    OutOfRange(u64),
    #[error("partition has {found} entries but the algebra has size {expected}")]
    WrongSize { expected: usize, found: usize },
    #[error("partition is not compatible with operation `{0}`")]
    NotCompatible(String),
    #[error("relation is not an equivalence relation")]
    NotEquivalence,
    #[error("congruence enumeration exceeded the budget of {budget}")]
    BudgetExceeded { budget: usize },
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; false if already merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller root so representatives stay minimal
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn reps(&mut self) -> Vec<Elem> {
        (0..self.parent.len()).map(|x| self.find(x) as Elem).collect()
    }
}

/// A congruence stored as the array mapping each element to the least
/// element of its block.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    reps: Vec<Elem>,
}

fn canonical(labels: &[Elem]) -> Vec<Elem> {
    let mut first = std::collections::HashMap::new();
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| *first.entry(*l).or_insert(i as Elem))
        .collect()
}

/// Checks that the partition given by `reps` is preserved by every basic
/// translation of `alg`.
fn respects(alg: &FiniteAlgebra, reps: &[Elem]) -> Result<(), CongruenceError> {
    let k = alg.size();
    let sig = alg.signature();
    let mut args = Vec::new();
    for op in 0..sig.len() {
        let arity = sig.arity(op);
        for tuple in crate::algebra::all_tuples(arity, k) {
            let base = alg.apply(op, &tuple);
            for pos in 0..arity {
                let a = tuple[pos];
                if reps[a as usize] != a {
                    continue;
                }
                // a is a block representative; every other member must map
                // into the same block as a does
                args.clear();
                args.extend_from_slice(&tuple);
                for b in (0..k as Elem).filter(|&b| b != a && reps[b as usize] == a) {
                    args[pos] = b;
                    if reps[alg.apply(op, &args) as usize] != reps[base as usize] {
                        return Err(CongruenceError::NotCompatible(sig.name(op).to_string()));
                    }
                }
            }
        }
    }
    Ok(())
}

impl Congruence {
    /// Builds a congruence from any block labelling, checking compatibility.
    pub fn new(alg: &FiniteAlgebra, labels: &[Elem]) -> Result<Self, CongruenceError> {
        if labels.len() != alg.size() {
            return Err(CongruenceError::WrongSize {
                expected: alg.size(),
                found: labels.len(),
            });
        }
        let reps = canonical(labels);
        respects(alg, &reps)?;
        Ok(Congruence { reps })
    }

    pub fn from_binrel(alg: &FiniteAlgebra, r: &BinRel) -> Result<Self, CongruenceError> {
        if r.size() != alg.size() {
            return Err(CongruenceError::WrongSize {
                expected: alg.size(),
                found: r.size(),
            });
        }
        if !r.is_equivalence() {
            return Err(CongruenceError::NotEquivalence);
        }
        let labels: Vec<Elem> = (0..r.size())
            .map(|a| r.successors(a).next().expect("reflexive") as Elem)
            .collect();
        Congruence::new(alg, &labels)
    }

    pub fn diagonal(size: usize) -> Self {
        Congruence {
            reps: (0..size as Elem).collect(),
        }
    }

    pub fn full(size: usize) -> Self {
        Congruence { reps: vec![0; size] }
    }

    pub fn size(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[Elem] {
        &self.reps
    }

    pub fn related(&self, a: Elem, b: Elem) -> bool {
        self.reps[a as usize] == self.reps[b as usize]
    }

    pub fn num_blocks(&self) -> usize {
        self.reps.iter().enumerate().filter(|(i, &r)| *i as Elem == r).count()
    }

    pub fn blocks(&self) -> Vec<Vec<Elem>> {
        let mut blocks: Vec<Vec<Elem>> = Vec::new();
        for (a, &r) in self.reps.iter().enumerate() {
            if a as Elem == r {
                blocks.push(vec![r]);
            } else {
                blocks
                    .iter_mut()
                    .find(|b| b[0] == r)
                    .expect("representative precedes its block")
                    .push(a as Elem);
            }
        }
        blocks
    }

    pub fn to_binrel(&self) -> BinRel {
        BinRel::from_fn(self.size(), |a, b| self.reps[a] == self.reps[b])
    }

    /// Least equivalence relation containing both; again a congruence.
    pub fn join(&self, other: &Congruence) -> Congruence {
        assert_eq!(self.size(), other.size(), "congruences of different algebras");
        let mut uf = UnionFind::new(self.size());
        for (a, (&r1, &r2)) in self.reps.iter().zip(&other.reps).enumerate() {
            uf.union(a, r1 as usize);
            uf.union(a, r2 as usize);
        }
        Congruence { reps: uf.reps() }
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in self.blocks() {
            let items: Vec<String> = block.iter().map(|e| e.to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Congruence({})", self)
    }
}

/// Least congruence identifying `a` and `b`.
///
/// Pairs merged so far are pushed through every basic translation
/// `x ↦ f(c_1, …, x, …, c_r)`; images landing in different blocks are merged
/// and queued in turn, until nothing changes.
pub fn principal_congruence(alg: &FiniteAlgebra, a: Elem, b: Elem) -> Result<Congruence, CongruenceError> {
    let k = alg.size();
    for e in [a, b] {
        if e as usize >= k {
            return Err(CongruenceError::OutOfRange(e as u64));
        }
    }
    let mut uf = UnionFind::new(k);
    let mut queue = Vec::new();
    if uf.union(a as usize, b as usize) {
        queue.push((a, b));
    }
    let sig = alg.signature();
    let mut args = Vec::new();
    while let Some((c, d)) = queue.pop() {
        for op in 0..sig.len() {
            let arity = sig.arity(op);
            if arity == 0 {
                continue;
            }
            for rest in crate::algebra::all_tuples(arity - 1, k) {
                for pos in 0..arity {
                    args.clear();
                    args.extend_from_slice(&rest[..pos]);
                    args.push(c);
                    args.extend_from_slice(&rest[pos..]);
                    let u = alg.apply(op, &args);
                    args[pos] = d;
                    let v = alg.apply(op, &args);
                    if uf.union(u as usize, v as usize) {
                        queue.push((u, v));
                    }
                }
            }
        }
    }
    Ok(Congruence { reps: uf.reps() })
}

/// All congruences of `alg`, finest first: ordered by decreasing number of
/// blocks, then by representative array.
pub fn all_congruences(alg: &FiniteAlgebra, budget: usize) -> Result<Vec<Congruence>, CongruenceError> {
    let k = alg.size() as Elem;
    let mut principals: Vec<Congruence> = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            let c = principal_congruence(alg, a, b)?;
            if !principals.contains(&c) {
                principals.push(c);
            }
        }
    }
    let mut seen: HashSet<Congruence> = HashSet::new();
    let mut out = vec![Congruence::diagonal(k as usize)];
    seen.insert(out[0].clone());
    let mut head = 0;
    while head < out.len() {
        let cur = out[head].clone();
        head += 1;
        for p in &principals {
            let j = cur.join(p);
            if seen.insert(j.clone()) {
                if seen.len() > budget {
                    return Err(CongruenceError::BudgetExceeded { budget });
                }
                out.push(j);
            }
        }
    }
    out.sort_by(|x, y| y.num_blocks().cmp(&x.num_blocks()).then_with(|| x.reps.cmp(&y.reps)));
    Ok(out)
}

/// Default bound on the search for a permutability degree.
pub fn default_max_degree(size: usize) -> usize {
    2 * size * size
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    /// Least `n` with `(R,S)_n = (S,R)_n`.
    Exact(usize),
    /// No such `n` up to the bound; not a proof that none exists.
    NoneUpTo(usize),
}

impl Degree {
    pub fn at_most(&self, n: usize) -> bool {
        matches!(self, Degree::Exact(d) if *d <= n)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Exact(n) => write!(f, "{}", n),
            Degree::NoneUpTo(n) => write!(f, "none up to {}", n),
        }
    }
}

/// Least `n ≥ 1` with `(R,S)_n = (S,R)_n`, reported as exact when it is at
/// most `max_n`.
pub fn permutability_degree(r: &Congruence, s: &Congruence, max_n: usize) -> Degree {
    let d = pair_degree(r, s);
    if d <= max_n {
        Degree::Exact(d)
    } else {
        Degree::NoneUpTo(max_n)
    }
}

/// Exact least `n` with `(R,S)_n = (S,R)_n` for two congruences.
///
/// Consider the bipartite graph on the blocks of `R` and of `S` with an edge
/// for every element, joining its two blocks. A pair `(a, c)` lies in
/// `(R,S)_n` iff the `R`-block of `a` is within distance `n-1` of the block
/// of `c` on the side reached after `n` steps. The products `(R,S)_n` and
/// `(S,R)_n` agree iff both equal `R ∨ S`, which holds iff for even `n`
/// every `R`-block is within `n-1` of every `S`-block in its component, and
/// for odd `n` the same holds among `R`-blocks and among `S`-blocks.
pub fn pair_degree(r: &Congruence, s: &Congruence) -> usize {
    DegreeScratch::new(r.size()).degree(r, s)
}

/// Buffers reused across many [`pair_degree`] computations.
struct DegreeScratch {
    k: usize,
    /// Generation stamps for `(R-rep, S-rep)` edges and for nodes.
    edge_seen: Vec<u32>,
    node_seen: Vec<u32>,
    generation: u32,
    uf: Vec<usize>,
    r_count: Vec<usize>,
    s_count: Vec<usize>,
    e_count: Vec<usize>,
}

fn uf_find(uf: &mut [usize], mut x: usize) -> usize {
    while uf[x] != x {
        uf[x] = uf[uf[x]];
        x = uf[x];
    }
    x
}

impl DegreeScratch {
    fn new(k: usize) -> Self {
        DegreeScratch {
            k,
            edge_seen: vec![0; k * k],
            node_seen: vec![0; 2 * k],
            generation: 0,
            uf: vec![0; 2 * k],
            r_count: vec![0; 2 * k],
            s_count: vec![0; 2 * k],
            e_count: vec![0; 2 * k],
        }
    }

    fn degree(&mut self, r: &Congruence, s: &Congruence) -> usize {
        let k = self.k;
        assert!(r.size() == k && s.size() == k, "congruences of different algebras");
        if r == s {
            return 1;
        }
        // nodes: R-block of x is reps[x], S-block is k + reps[x]
        self.generation += 1;
        let g = self.generation;
        for x in 0..k {
            for v in [r.reps[x] as usize, k + s.reps[x] as usize] {
                self.uf[v] = v;
                self.r_count[v] = 0;
                self.s_count[v] = 0;
                self.e_count[v] = 0;
            }
        }
        for x in 0..k {
            let (u, v) = (r.reps[x] as usize, k + s.reps[x] as usize);
            let (ru, rv) = (uf_find(&mut self.uf, u), uf_find(&mut self.uf, v));
            if ru != rv {
                self.uf[ru.max(rv)] = ru.min(rv);
            }
        }
        for x in 0..k {
            let (u, v) = (r.reps[x] as usize, k + s.reps[x] as usize);
            let root = uf_find(&mut self.uf, u);
            if self.node_seen[u] != g {
                self.node_seen[u] = g;
                self.r_count[root] += 1;
            }
            if self.node_seen[v] != g {
                self.node_seen[v] = g;
                self.s_count[root] += 1;
            }
            let e = u * k + (v - k);
            if self.edge_seen[e] != g {
                self.edge_seen[e] = g;
                self.e_count[root] += 1;
            }
        }
        // (R,S)_2 = (S,R)_2 iff every component is complete bipartite
        let complete = (0..2 * k)
            .filter(|&v| self.node_seen[v] == g && self.uf[v] == v)
            .all(|c| self.e_count[c] == self.r_count[c] * self.s_count[c]);
        if complete {
            return 2;
        }
        block_graph_degree(r, s)
    }
}

/// Degree from the largest distances in the block graph, by breadth-first
/// search from every block.
fn block_graph_degree(r: &Congruence, s: &Congruence) -> usize {
    let k = r.size();
    let mut node = vec![usize::MAX; 2 * k];
    let mut side = Vec::new();
    for x in 0..k {
        for (offset, reps, tag) in [(0, &r.reps, 0u8), (k, &s.reps, 1u8)] {
            let slot = offset + reps[x] as usize;
            if node[slot] == usize::MAX {
                node[slot] = side.len();
                side.push(tag);
            }
        }
    }
    let nodes = side.len();
    let mut adj = vec![Vec::new(); nodes];
    for x in 0..k {
        let (u, v) = (node[r.reps[x] as usize], node[k + s.reps[x] as usize]);
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    // largest distances between blocks of the same side and of opposite sides
    let (mut same, mut cross) = (0, 0);
    let mut dist = vec![usize::MAX; nodes];
    let mut queue = VecDeque::new();
    for start in 0..nodes {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[start] = 0;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if side[u] == side[start] {
                same = same.max(du);
            } else {
                cross = cross.max(du);
            }
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    // same is even and cross is odd
    (same + 1).min((cross + 1).max(2))
}

/// Least `n ≥ 1` with `(R,S)_n = (S,R)_n` for arbitrary relations, by
/// matrix products.
pub fn relation_degree(r: &BinRel, s: &BinRel, max_n: usize) -> Degree {
    let mut rs = r.clone();
    let mut sr = s.clone();
    for n in 1..=max_n {
        if n > 1 {
            let (next_rs, next_sr) = if n % 2 == 0 { (s, r) } else { (r, s) };
            rs = rs.then(next_rs).expect("same size");
            sr = sr.then(next_sr).expect("same size");
        }
        // For odd n a single inclusion does not force equality for a fixed
        // pair, so both directions are compared.
        if rs == sr {
            return Degree::Exact(n);
        }
    }
    Degree::NoneUpTo(max_n)
}

/// Largest [`pair_degree`] over all pairs of congruences of `alg`.
pub fn algebra_degree(alg: &FiniteAlgebra, budget: usize) -> Result<usize, CongruenceError> {
    let cons = all_congruences(alg, budget)?;
    let mut scratch = DegreeScratch::new(alg.size());
    let mut worst = 1;
    for (i, r) in cons.iter().enumerate() {
        for s in &cons[i + 1..] {
            worst = worst.max(scratch.degree(r, s));
        }
    }
    Ok(worst)
}

/// Whether every pair of congruences of `alg` is `n`-permutable.
pub fn algebra_permutability(alg: &FiniteAlgebra, n: usize, budget: usize) -> Result<bool, CongruenceError> {
    Ok(algebra_degree(alg, budget)? <= n)
}
