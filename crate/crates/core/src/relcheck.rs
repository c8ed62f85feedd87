//! Relations viewed against an algebra: compatibility, generated compatible
//! reflexive relations and the relational checks built on them.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::relation::{alternating, BinRel, RelError};
use crate::subpower::{subalgebra_closure, ClosureError};

/// Default cap on the number of relations produced by an enumeration.
pub const DEFAULT_ENUM_BUDGET: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Relation(#[from] RelError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error("relation has size {found} but the algebra has size {expected}")]
    WrongSize { expected: usize, found: usize },
    #[error("relation is not reflexive")]
    NotReflexive,
    #[error("relation is not compatible with the operations of the algebra")]
    NotCompatible,
    #[error("{0} is not an equivalence relation")]
    NotEquivalence(&'static str),
    #[error("n must be at least {min}, got {n}")]
    DegreeTooSmall { n: usize, min: usize },
    #[error("enumeration exceeded the budget of {budget} relations")]
    BudgetExceeded { budget: usize },
}

fn same_size(alg: &FiniteAlgebra, r: &BinRel) -> Result<(), CheckError> {
    if alg.size() != r.size() {
        return Err(CheckError::WrongSize {
            expected: alg.size(),
            found: r.size(),
        });
    }
    Ok(())
}

fn advance(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// True iff `r` is a subalgebra of `alg × alg`.
pub fn is_compatible(alg: &FiniteAlgebra, r: &BinRel) -> Result<bool, CheckError> {
    same_size(alg, r)?;
    let pairs: Vec<(usize, usize)> = r.pairs().collect();
    let sig = alg.signature();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for op in 0..sig.len() {
        let arity = sig.arity(op);
        if arity == 0 {
            let c = alg.apply(op, &[]) as usize;
            if !r.contains(c, c) {
                return Ok(false);
            }
            continue;
        }
        if pairs.is_empty() {
            continue;
        }
        let mut idx = vec![0usize; arity];
        loop {
            left.clear();
            right.clear();
            for &i in &idx {
                left.push(pairs[i].0 as Elem);
                right.push(pairs[i].1 as Elem);
            }
            if !r.contains(alg.apply(op, &left) as usize, alg.apply(op, &right) as usize) {
                return Ok(false);
            }
            if !advance(&mut idx, pairs.len()) {
                break;
            }
        }
    }
    Ok(true)
}

/// Least compatible relation containing the diagonal and `pairs`.
pub fn compatible_reflexive_closure(
    alg: &FiniteAlgebra,
    pairs: &[(Elem, Elem)],
) -> Result<BinRel, CheckError> {
    let k = alg.size();
    let mut gens: Vec<Vec<Elem>> = alg.elements().map(|a| vec![a, a]).collect();
    for &(a, b) in pairs {
        if a as usize >= k || b as usize >= k {
            return Err(RelError::OutOfRange {
                a: a as u64,
                b: b as u64,
                size: k,
            }
            .into());
        }
        gens.push(vec![a, b]);
    }
    let sub = subalgebra_closure(alg, 2, &gens, k * k)?;
    Ok(BinRel::from_pairs(k, sub.iter().map(|p| (p[0], p[1])))?)
}

fn close_with(alg: &FiniteAlgebra, base: &BinRel, extra: (usize, usize)) -> Result<BinRel, CheckError> {
    let mut pairs: Vec<(Elem, Elem)> = base
        .pairs()
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a as Elem, b as Elem))
        .collect();
    pairs.push((extra.0 as Elem, extra.1 as Elem));
    compatible_reflexive_closure(alg, &pairs)
}

/// All compatible reflexive relations of `alg`, i.e. all subalgebras of the
/// square containing the diagonal.
///
/// Every such relation is generated by its off-diagonal pairs, so closing
/// each known relation together with one further pair reaches all of them.
/// The result is sorted by number of pairs, then by the row-major pair list.
pub fn enumerate_compatible_reflexive(alg: &FiniteAlgebra, budget: usize) -> Result<Vec<BinRel>, CheckError> {
    let k = alg.size();
    let start = compatible_reflexive_closure(alg, &[])?;
    let mut seen: HashSet<BinRel> = HashSet::new();
    let mut queue = vec![start.clone()];
    seen.insert(start);
    let mut head = 0;
    while head < queue.len() {
        let cur = queue[head].clone();
        head += 1;
        for a in 0..k {
            for b in 0..k {
                if cur.contains(a, b) {
                    continue;
                }
                let next = close_with(alg, &cur, (a, b))?;
                if seen.insert(next.clone()) {
                    if seen.len() > budget {
                        return Err(CheckError::BudgetExceeded { budget });
                    }
                    queue.push(next);
                }
            }
        }
    }
    queue.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.pairs().cmp(y.pairs())));
    Ok(queue)
}

/// Whether `(E, E^op)_{n-1}` is transitive, for a reflexive compatible `E`.
pub fn check_reflexive_char(alg: &FiniteAlgebra, n: usize, e: &BinRel) -> Result<bool, CheckError> {
    if n < 2 {
        return Err(CheckError::DegreeTooSmall { n, min: 2 });
    }
    same_size(alg, e)?;
    if !e.is_reflexive() {
        return Err(CheckError::NotReflexive);
    }
    if !is_compatible(alg, e)? {
        return Err(CheckError::NotCompatible);
    }
    Ok(alternating(e, &e.opposite(), n - 1)?.is_transitive())
}

/// Outcome of the two inclusions
/// `(R,S)_{2n-2} ≤ (S,R)_{2n}` and `(S,R)_{2n} ≤ (S,R)_{2n-2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma43Report {
    pub n: usize,
    /// `(R,S)_{2n-2} ≤ (S,R)_{2n}`; holds for any reflexive `R`, `S`.
    pub padding_inclusion: bool,
    /// `(S,R)_{2n} ≤ (S,R)_{2n-2}`, i.e. `E^n ≤ E^{n-1}` for `E = S` then `R`.
    pub collapse_inclusion: bool,
    /// `(R,S)_{2n-2} ≤ (S,R)_{2n-2}`, computed directly.
    pub permutes: bool,
}

impl Lemma43Report {
    pub fn holds(&self) -> bool {
        self.padding_inclusion && self.collapse_inclusion
    }

    /// Name of the first failing inclusion, if any.
    pub fn failing(&self) -> Option<&'static str> {
        if !self.padding_inclusion {
            Some("(R,S)_{2n-2} <= (S,R)_{2n}")
        } else if !self.collapse_inclusion {
            Some("(S,R)_{2n} <= (S,R)_{2n-2}")
        } else {
            None
        }
    }
}

/// Checks the inclusion chain showing that `E^n ≤ E^{n-1}` for reflexive
/// relations forces `(2n-2)`-permutability, on one pair of equivalence
/// relations.
pub fn lemma43_check(r: &BinRel, s: &BinRel, n: usize) -> Result<Lemma43Report, CheckError> {
    if n < 2 {
        return Err(CheckError::DegreeTooSmall { n, min: 2 });
    }
    if !r.is_equivalence() {
        return Err(CheckError::NotEquivalence("R"));
    }
    if !s.is_equivalence() {
        return Err(CheckError::NotEquivalence("S"));
    }
    let rs_short = alternating(r, s, 2 * n - 2)?;
    let sr_short = alternating(s, r, 2 * n - 2)?;
    let sr_long = alternating(s, r, 2 * n)?;
    let report = Lemma43Report {
        n,
        padding_inclusion: rs_short.is_subset(&sr_long)?,
        collapse_inclusion: sr_long.is_subset(&sr_short)?,
        permutes: rs_short.is_subset(&sr_short)?,
    };
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtsEntry {
    pub relation: BinRel,
    pub symmetric: bool,
}

/// All compatible reflexive transitive relations of an algebra, each
/// flagged symmetric or not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtsReport {
    pub entries: Vec<RtsEntry>,
}

impl RtsReport {
    pub fn asymmetric(&self) -> impl Iterator<Item = &BinRel> {
        self.entries.iter().filter(|e| !e.symmetric).map(|e| &e.relation)
    }

    pub fn all_symmetric(&self) -> bool {
        self.entries.iter().all(|e| e.symmetric)
    }
}

pub fn rts_symmetry_check(alg: &FiniteAlgebra, budget: usize) -> Result<RtsReport, CheckError> {
    let entries = enumerate_compatible_reflexive(alg, budget)?
        .into_iter()
        .filter(|r| r.is_transitive())
        .map(|r| RtsEntry {
            symmetric: r.is_symmetric(),
            relation: r,
        })
        .collect();
    Ok(RtsReport { entries })
}

/// Distinct compatible reflexive relations generated by random pair sets.
pub fn sample_compatible_reflexive<R: rand::Rng>(
    alg: &FiniteAlgebra,
    count: usize,
    max_generators: usize,
    rng: &mut R,
) -> Result<Vec<BinRel>, CheckError> {
    let k = alg.size() as Elem;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..count {
        let g = rng.gen_range(0..=max_generators);
        let pairs: Vec<(Elem, Elem)> = (0..g).map(|_| (rng.gen_range(0..k), rng.gen_range(0..k))).collect();
        let r = compatible_reflexive_closure(alg, &pairs)?;
        if seen.insert(r.clone()) {
            out.push(r);
        }
    }
    Ok(out)
}
