//! Chains of related elements and the term-driven transformations on them.
//!
//! A chain `e0 -R-> e1 -S-> e2 …` records a membership of its endpoints in a
//! relational product. Given Hagemann–Mitschke terms, the functions here turn
//! `(R,S)_n` chains into `(S,R)_n` chains, single `R^op` steps into `n-1`
//! forward `R` steps, and `n`-step `R` chains into `(n-1)`-step ones. Every
//! output is checked step by step before it is returned; a failing step is a
//! bug and is reported, never repaired.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::hm::{hm_search, verify_hm, HmError, HmWitness};
use crate::relation::{opposite, rel_power, BinRel, RelError};
use crate::relcheck::{enumerate_compatible_reflexive, is_compatible, sample_compatible_reflexive, CheckError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    R,
    S,
}

impl Label {
    pub fn other(self) -> Label {
        match self {
            Label::R => Label::S,
            Label::S => Label::R,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::R => "R",
            Label::S => "S",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("a chain needs at least one element")]
    Empty,
    #[error("{elements} elements need {expected} labels, got {found}")]
    LabelCount { elements: usize, expected: usize, found: usize },
    #[error("element {0} is outside the universe")]
    OutOfRange(Elem),
    #[error("step {step}: ({from}, {to}) is not in {label}")]
    BadStep { step: usize, from: Elem, to: Elem, label: Label },
    #[error("expected a chain of {expected} steps, got {found}")]
    StepCount { expected: usize, found: usize },
    #[error("step {step} is labelled {found}, expected {expected}")]
    Pattern { step: usize, expected: Label, found: Label },
    #[error("witness is for n = {found}, expected n = {expected}")]
    WitnessDegree { expected: usize, found: usize },
    #[error("witness fails identity `{0}`")]
    InvalidWitness(String),
    #[error("{0}")]
    Precondition(String),
    #[error("internal error: constructed chain breaks at step {step}: ({from}, {to}) is not in {label}")]
    VerificationFailed { step: usize, from: Elem, to: Elem, label: Label },
    #[error("internal error: constructed chain runs from {got:?} instead of {expected:?}")]
    Endpoints { expected: (Elem, Elem), got: (Elem, Elem) },
    #[error(transparent)]
    Hm(#[from] HmError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Relation(#[from] RelError),
}

/// Elements `e0 … em` and the labels of the `m` steps between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    elements: Vec<Elem>,
    labels: Vec<Label>,
}

fn rel_for<'a>(label: Label, r: &'a BinRel, s: &'a BinRel) -> &'a BinRel {
    match label {
        Label::R => r,
        Label::S => s,
    }
}

fn first_bad_step(elements: &[Elem], labels: &[Label], r: &BinRel, s: &BinRel) -> Option<(usize, Elem, Elem, Label)> {
    elements
        .windows(2)
        .zip(labels)
        .enumerate()
        .find(|(_, (pair, &label))| !rel_for(label, r, s).contains(pair[0] as usize, pair[1] as usize))
        .map(|(step, (pair, &label))| (step, pair[0], pair[1], label))
}

impl Chain {
    /// Builds a chain and checks every step against `r` (label `R`) or `s`
    /// (label `S`).
    pub fn new(elements: Vec<Elem>, labels: Vec<Label>, r: &BinRel, s: &BinRel) -> Result<Self, ChainError> {
        if elements.is_empty() {
            return Err(ChainError::Empty);
        }
        if labels.len() + 1 != elements.len() {
            return Err(ChainError::LabelCount {
                elements: elements.len(),
                expected: elements.len() - 1,
                found: labels.len(),
            });
        }
        if let Some(&e) = elements.iter().find(|&&e| e as usize >= r.size() || e as usize >= s.size()) {
            return Err(ChainError::OutOfRange(e));
        }
        if let Some((step, from, to, label)) = first_bad_step(&elements, &labels, r, s) {
            return Err(ChainError::BadStep { step, from, to, label });
        }
        Ok(Chain { elements, labels })
    }

    /// A chain alternating `first, other, first, …`.
    pub fn alternating(elements: Vec<Elem>, first: Label, r: &BinRel, s: &BinRel) -> Result<Self, ChainError> {
        let steps = elements.len().saturating_sub(1);
        Chain::new(elements, alternating_labels(first, steps), r, s)
    }

    /// A chain all of whose steps lie in `r`.
    pub fn uniform(elements: Vec<Elem>, r: &BinRel) -> Result<Self, ChainError> {
        let steps = elements.len().saturating_sub(1);
        Chain::new(elements, vec![Label::R; steps], r, r)
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn steps(&self) -> usize {
        self.labels.len()
    }

    pub fn start(&self) -> Elem {
        self.elements[0]
    }

    pub fn end(&self) -> Elem {
        *self.elements.last().expect("chains are non-empty")
    }

    pub fn endpoints(&self) -> (Elem, Elem) {
        (self.start(), self.end())
    }

    /// Re-checks every step.
    pub fn verify(&self, r: &BinRel, s: &BinRel) -> Result<(), ChainError> {
        match first_bad_step(&self.elements, &self.labels, r, s) {
            None => Ok(()),
            Some((step, from, to, label)) => Err(ChainError::BadStep { step, from, to, label }),
        }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.elements[0])?;
        for (e, l) in self.elements[1..].iter().zip(&self.labels) {
            write!(f, " -{}-> {}", l, e)?;
        }
        Ok(())
    }
}

pub fn alternating_labels(first: Label, steps: usize) -> Vec<Label> {
    (0..steps).map(|i| if i % 2 == 0 { first } else { first.other() }).collect()
}

fn check_witness(alg: &FiniteAlgebra, w: &HmWitness, n: usize) -> Result<(), ChainError> {
    if w.n() != n {
        return Err(ChainError::WitnessDegree {
            expected: n,
            found: w.n(),
        });
    }
    match verify_hm(alg, w.terms(), n)?.first_failure() {
        None => Ok(()),
        Some(c) => Err(ChainError::InvalidWitness(c.identity.clone())),
    }
}

fn check_reflexive_compatible(alg: &FiniteAlgebra, r: &BinRel, name: &str) -> Result<(), ChainError> {
    if !r.is_reflexive() {
        return Err(ChainError::Precondition(format!("{} is not reflexive", name)));
    }
    if !is_compatible(alg, r)? {
        return Err(ChainError::Precondition(format!("{} is not compatible", name)));
    }
    Ok(())
}

/// Final self-check of a constructed chain.
fn finish(
    elements: Vec<Elem>,
    labels: Vec<Label>,
    r: &BinRel,
    s: &BinRel,
    expected: (Elem, Elem),
) -> Result<Chain, ChainError> {
    if let Some((step, from, to, label)) = first_bad_step(&elements, &labels, r, s) {
        return Err(ChainError::VerificationFailed { step, from, to, label });
    }
    let got = (elements[0], *elements.last().expect("non-empty"));
    if got != expected {
        return Err(ChainError::Endpoints { expected, got });
    }
    Ok(Chain { elements, labels })
}

/// Turns an `(R,S)_n` chain into an `(S,R)_n` chain with the same endpoints.
///
/// The new interior elements are `w_i(x_{i-1}, x_i, x_{i+1})`. Step `i` of
/// the output carries the label of step `i+1` of the input.
pub fn permute_chain(
    alg: &FiniteAlgebra,
    w: &HmWitness,
    r: &BinRel,
    s: &BinRel,
    c: &Chain,
) -> Result<Chain, ChainError> {
    let n = w.n();
    check_witness(alg, w, n)?;
    for (rel, name) in [(r, "R"), (s, "S")] {
        if !rel.is_equivalence() {
            return Err(ChainError::Precondition(format!("{} is not an equivalence relation", name)));
        }
        check_reflexive_compatible(alg, rel, name)?;
    }
    if c.steps() != n {
        return Err(ChainError::StepCount {
            expected: n,
            found: c.steps(),
        });
    }
    for (step, (&found, expected)) in c.labels().iter().zip(alternating_labels(Label::R, n)).enumerate() {
        if found != expected {
            return Err(ChainError::Pattern { step, expected, found });
        }
    }
    c.verify(r, s)?;

    let x = c.elements();
    let mut out = Vec::with_capacity(n + 1);
    out.push(x[0]);
    for i in 1..n {
        out.push(w.apply(alg, i, x[i - 1], x[i], x[i + 1]));
    }
    out.push(x[n]);
    finish(out, alternating_labels(Label::S, n), r, s, c.endpoints())
}

/// From `(y, x) ∈ R` builds `x = e0 R e1 R … R e_{n-1} = y` with
/// `e_i = w_i(x, x, y)`.
pub fn symmetrize_chain(alg: &FiniteAlgebra, w: &HmWitness, r: &BinRel, x: Elem, y: Elem) -> Result<Chain, ChainError> {
    let n = w.n();
    check_witness(alg, w, n)?;
    check_reflexive_compatible(alg, r, "R")?;
    if x as usize >= alg.size() || y as usize >= alg.size() {
        return Err(ChainError::OutOfRange(x.max(y)));
    }
    if !r.contains(y as usize, x as usize) {
        return Err(ChainError::Precondition(format!("({}, {}) is not in R", y, x)));
    }
    let mut out = Vec::with_capacity(n);
    out.push(x);
    for i in 1..n {
        out.push(w.apply(alg, i, x, x, y));
    }
    finish(out, vec![Label::R; n - 1], r, r, (x, y))
}

/// Turns an `n`-step `R` chain into an `(n-1)`-step one with the same
/// endpoints: `e_i = w_i(x_i, x_i, x_{i+1})`.
pub fn shorten_chain(alg: &FiniteAlgebra, w: &HmWitness, r: &BinRel, c: &Chain) -> Result<Chain, ChainError> {
    let n = w.n();
    check_witness(alg, w, n)?;
    check_reflexive_compatible(alg, r, "R")?;
    if c.steps() != n {
        return Err(ChainError::StepCount {
            expected: n,
            found: c.steps(),
        });
    }
    c.verify(r, r)?;
    shorten_unchecked(alg, w, r, c.elements())
}

fn shorten_unchecked(alg: &FiniteAlgebra, w: &HmWitness, r: &BinRel, x: &[Elem]) -> Result<Chain, ChainError> {
    let n = w.n();
    let mut out = Vec::with_capacity(n);
    out.push(x[0]);
    for i in 1..n {
        out.push(w.apply(alg, i, x[i], x[i], x[i + 1]));
    }
    finish(out, vec![Label::R; n - 1], r, r, (x[0], x[n]))
}

/// Shortens an `m`-step `R` chain, `m ≥ n - 1`, to `n - 1` steps by
/// repeatedly replacing its first `n` steps with `n - 1`.
pub fn reduce_chain(alg: &FiniteAlgebra, w: &HmWitness, r: &BinRel, c: &Chain) -> Result<Chain, ChainError> {
    let n = w.n();
    check_witness(alg, w, n)?;
    check_reflexive_compatible(alg, r, "R")?;
    if c.steps() + 1 < n {
        return Err(ChainError::StepCount {
            expected: n - 1,
            found: c.steps(),
        });
    }
    c.verify(r, r)?;
    let mut elements = c.elements().to_vec();
    while elements.len() > n {
        let head = shorten_unchecked(alg, w, r, &elements[..=n])?;
        elements.splice(..=n, head.elements().iter().copied());
    }
    let steps = elements.len() - 1;
    finish(elements, vec![Label::R; steps], r, r, c.endpoints())
}

/// Random walk along the given labels, starting at a uniform element.
/// Returns `None` if the walk reaches an element with no successor.
pub fn random_chain<G: Rng>(r: &BinRel, s: &BinRel, labels: &[Label], rng: &mut G) -> Option<Chain> {
    let k = r.size();
    let mut elements = vec![rng.gen_range(0..k) as Elem];
    for &l in labels {
        let rel = rel_for(l, r, s);
        let succ: Vec<usize> = rel.successors(*elements.last().unwrap() as usize).collect();
        if succ.is_empty() {
            return None;
        }
        elements.push(succ[rng.gen_range(0..succ.len())] as Elem);
    }
    Some(Chain {
        elements,
        labels: labels.to_vec(),
    })
}

/// Some chain from `a` to `b` following `labels`, or `None`. Prefers the
/// smallest element at each step, scanning backwards from `b`.
pub fn find_chain(r: &BinRel, s: &BinRel, labels: &[Label], a: Elem, b: Elem) -> Option<Chain> {
    let k = r.size();
    // reach[i][e]: e is reachable from a in i steps
    let mut reach = vec![vec![false; k]; labels.len() + 1];
    reach[0][a as usize] = true;
    for (i, &l) in labels.iter().enumerate() {
        let rel = rel_for(l, r, s);
        for u in 0..k {
            if reach[i][u] {
                for v in rel.successors(u) {
                    reach[i + 1][v] = true;
                }
            }
        }
    }
    if !reach[labels.len()][b as usize] {
        return None;
    }
    let mut elements = vec![b];
    let mut cur = b as usize;
    for i in (0..labels.len()).rev() {
        let rel = rel_for(labels[i], r, s);
        let prev = (0..k).find(|&u| reach[i][u] && rel.contains(u, cur))?;
        elements.push(prev as Elem);
        cur = prev;
    }
    elements.reverse();
    Some(Chain {
        elements,
        labels: labels.to_vec(),
    })
}

/// Where the relations for a report come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Every compatible reflexive relation, up to `budget` of them.
    Exhaustive { budget: usize },
    /// Closures of `count` random pair sets of at most `max_generators`
    /// pairs each; duplicates are dropped.
    Random { count: usize, seed: u64, max_generators: usize },
}

/// Outcome of the checks on one relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationVerdict {
    pub relation: BinRel,
    /// A pair of `R^op` outside `R^{n-1}`, if any.
    pub op_counterexample: Option<(usize, usize)>,
    /// A pair of `R^n` outside `R^{n-1}`, if any.
    pub power_counterexample: Option<(usize, usize)>,
    /// Chains built by `symmetrize_chain`, one per pair of `R`.
    pub symmetrized: usize,
    /// Chains built by `shorten_chain`, one per pair of `R^n`.
    pub shortened: usize,
}

impl RelationVerdict {
    pub fn holds(&self) -> bool {
        self.op_counterexample.is_none() && self.power_counterexample.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hm3Report {
    pub n: usize,
    /// `None` when no witness exists and the constructive checks were
    /// skipped.
    pub witness: Option<HmWitness>,
    pub verdicts: Vec<RelationVerdict>,
}

impl Hm3Report {
    pub fn holds(&self) -> bool {
        self.verdicts.iter().all(RelationVerdict::holds)
    }

    pub fn constructive(&self) -> bool {
        self.witness.is_some()
    }
}

impl fmt::Display for Hm3Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        writeln!(f, "n = {}, relations: {}", n, self.verdicts.len())?;
        if self.witness.is_none() {
            writeln!(f, "no witness for n = {}: constructive check inapplicable", n)?;
        }
        for v in &self.verdicts {
            let op = match v.op_counterexample {
                None => "ok".to_string(),
                Some((a, b)) => format!("FAIL ({},{})", a, b),
            };
            let pow = match v.power_counterexample {
                None => "ok".to_string(),
                Some((a, b)) => format!("FAIL ({},{})", a, b),
            };
            write!(f, "R = {}  R^op <= R^{}: {}  R^{} <= R^{}: {}", v.relation, n - 1, op, n, n - 1, pow)?;
            if self.witness.is_some() {
                write!(f, "  chains: {} symmetrized, {} shortened", v.symmetrized, v.shortened)?;
            }
            writeln!(f)?;
        }
        write!(f, "verdict: {}", if self.holds() { "holds" } else { "fails" })
    }
}

fn outside(r: &BinRel, bound: &BinRel) -> Option<(usize, usize)> {
    r.pairs().find(|&(a, b)| !bound.contains(a, b))
}

/// `R^op ≤ R^{n-1}` and `R^n ≤ R^{n-1}` for each sampled compatible
/// reflexive `R`, by matrix computation and, when a witness for `n` exists,
/// by building a chain for every pair.
pub fn hm3_equivalence_report(
    alg: &FiniteAlgebra,
    n: usize,
    samples: &Sampling,
    closure_budget: usize,
) -> Result<Hm3Report, ChainError> {
    if n < 2 {
        return Err(HmError::DegreeTooSmall(n).into());
    }
    let relations = match *samples {
        Sampling::Exhaustive { budget } => enumerate_compatible_reflexive(alg, budget)?,
        Sampling::Random {
            count,
            seed,
            max_generators,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample_compatible_reflexive(alg, count, max_generators, &mut rng)?
        }
    };
    let witness = hm_search(alg, n, closure_budget)?;
    let forward = vec![Label::R; n];

    let mut verdicts = Vec::with_capacity(relations.len());
    for r in relations {
        let lower = rel_power(&r, n - 1)?;
        let upper = rel_power(&r, n)?;
        let mut verdict = RelationVerdict {
            op_counterexample: outside(&opposite(&r), &lower),
            power_counterexample: outside(&upper, &lower),
            symmetrized: 0,
            shortened: 0,
            relation: r.clone(),
        };
        if let Some(w) = &witness {
            for (y, x) in r.pairs() {
                symmetrize_chain(alg, w, &r, x as Elem, y as Elem)?;
                verdict.symmetrized += 1;
            }
            for (a, b) in upper.pairs() {
                let c = find_chain(&r, &r, &forward, a as Elem, b as Elem)
                    .expect("pairs of R^n have n-step chains");
                shorten_chain(alg, w, &r, &c)?;
                verdict.shortened += 1;
            }
        }
        verdicts.push(verdict);
    }
    Ok(Hm3Report { n, witness, verdicts })
}
