//! Hagemann–Mitschke terms: witnesses, exhaustive verification and the
//! conversion between the ternary and the `(n+1)`-ary forms.
//!
//! A ternary witness for `n ≥ 2` is a chain `w_1, …, w_{n-1}` with
//!
//! ```text
//! w_1(x,y,y) = x
//! w_i(x,x,y) = w_{i+1}(x,y,y)      1 ≤ i ≤ n-2
//! w_{n-1}(x,x,y) = y
//! ```
//!
//! An `(n+1)`-ary witness is a family `v_0, …, v_n` with `v_0 = x_0`,
//! `v_n = x_n`, and `v_{i-1} = v_i` on the argument pattern that identifies
//! the pairs `(x_{i-2}, x_{i-1})`, `(x_i, x_{i+1})`, … (pairs starting at
//! even positions for even `i`, at odd positions for odd `i`).

mod file;
mod search;

pub use file::{parse_witness, render_witness, render_witness_toml, WitnessFile, WitnessForm};
pub use search::{
    build_pattern_subpower, hm_search, min_degree, MinDegree, PatternGraph, PatternSubpower,
};

use std::fmt;

use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::subpower::ClosureError;
use crate::term::{EvalError, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HmError {
    #[error("n must be at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("expected {expected} terms for n = {n}, got {found}")]
    TermCount { n: usize, expected: usize, found: usize },
    #[error("term {index}: {source}")]
    IllFormed { index: usize, source: EvalError },
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error("internal error: produced witness fails identity `{0}`")]
    VerificationFailed(String),
}

pub const TERNARY_VARS: [&str; 3] = ["x", "y", "z"];

pub fn ternary_var_names() -> Vec<String> {
    TERNARY_VARS.iter().map(|s| s.to_string()).collect()
}

/// Variable names `x0, …, xn`.
pub fn nary_var_names(n: usize) -> Vec<String> {
    (0..=n).map(|i| format!("x{}", i)).collect()
}

/// Ternary terms `w_1, …, w_{n-1}` in the variables `x, y, z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HmWitness {
    n: usize,
    terms: Vec<Term>,
}

/// `(n+1)`-ary terms `v_0, …, v_n` in the variables `x_0, …, x_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaryWitness {
    n: usize,
    terms: Vec<Term>,
}

fn check_vars(terms: &[Term], nvars: usize) -> Result<(), HmError> {
    for (index, t) in terms.iter().enumerate() {
        if let Some(v) = t.max_var().filter(|&v| v >= nvars) {
            return Err(HmError::IllFormed {
                index,
                source: EvalError::UnassignedVariable(v),
            });
        }
    }
    Ok(())
}

impl HmWitness {
    /// Checks only the shape; see [`verify_hm`] for the identities.
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self, HmError> {
        if n < 2 {
            return Err(HmError::DegreeTooSmall(n));
        }
        if terms.len() != n - 1 {
            return Err(HmError::TermCount {
                n,
                expected: n - 1,
                found: terms.len(),
            });
        }
        check_vars(&terms, 3)?;
        Ok(HmWitness { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// `w_i` for `1 ≤ i ≤ n-1`.
    pub fn w(&self, i: usize) -> &Term {
        &self.terms[i - 1]
    }

    /// Evaluates `w_i(x, y, z)`.
    pub fn apply(&self, alg: &FiniteAlgebra, i: usize, x: Elem, y: Elem, z: Elem) -> Elem {
        self.w(i).eval_unchecked(alg, &[x, y, z])
    }

    /// `v_0 = x_0`, `v_i = w_i(x_{i-1}, x_i, x_{i+1})`, `v_n = x_n`.
    pub fn to_nary(&self) -> NaryWitness {
        let n = self.n;
        let mut terms = Vec::with_capacity(n + 1);
        terms.push(Term::Var(0));
        for i in 1..n {
            terms.push(self.w(i).rename_vars(&[i - 1, i, i + 1]));
        }
        terms.push(Term::Var(n));
        NaryWitness { n, terms }
    }
}

impl NaryWitness {
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self, HmError> {
        if n < 2 {
            return Err(HmError::DegreeTooSmall(n));
        }
        if terms.len() != n + 1 {
            return Err(HmError::TermCount {
                n,
                expected: n + 1,
                found: terms.len(),
            });
        }
        check_vars(&terms, n + 1)?;
        Ok(NaryWitness { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn v(&self, i: usize) -> &Term {
        &self.terms[i]
    }

    /// `w_i(x, y, z) = v_i(x, …, x, y, z, …, z)` with `i` copies of `x` and
    /// `n - i` copies of `z`.
    pub fn to_ternary(&self) -> HmWitness {
        let n = self.n;
        let terms = (1..n)
            .map(|i| {
                let map: Vec<usize> = (0..=n)
                    .map(|p| match p.cmp(&i) {
                        std::cmp::Ordering::Less => 0,
                        std::cmp::Ordering::Equal => 1,
                        std::cmp::Ordering::Greater => 2,
                    })
                    .collect();
                self.v(i).rename_vars(&map)
            })
            .collect();
        HmWitness { n, terms }
    }
}

/// Result of checking one identity exhaustively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub identity: String,
    /// Number of assignments evaluated.
    pub assignments: usize,
    /// First failing assignment, listed variable by variable.
    pub counterexample: Option<Vec<(String, Elem)>>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "pass  {}  ({} assignments)", self.identity, self.assignments),
            Some(cex) => {
                let vals: Vec<String> = cex.iter().map(|(v, e)| format!("{}={}", v, e)).collect();
                write!(f, "FAIL  {}  at {}", self.identity, vals.join(", "))
            }
        }
    }
}

/// Per-identity verdicts for a candidate witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub checks: Vec<IdentityCheck>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn assignments(&self) -> usize {
        self.checks.iter().map(|c| c.assignments).sum()
    }

    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.passed())
    }
}

fn validate_terms(alg: &FiniteAlgebra, terms: &[Term], nvars: usize) -> Result<(), HmError> {
    for (index, t) in terms.iter().enumerate() {
        t.check_against(alg.signature(), nvars)
            .map_err(|source| HmError::IllFormed { index, source })?;
    }
    Ok(())
}

/// Side of a ternary identity: a term index (1-based) applied to a pattern
/// over `(x, y)`, or a bare variable.
#[derive(Clone, Copy)]
enum Side {
    Apply(usize, [usize; 3]),
    Var(usize),
}

const XYY: [usize; 3] = [0, 1, 1];
const XXY: [usize; 3] = [0, 0, 1];

fn side_label(side: Side) -> String {
    match side {
        Side::Apply(i, pat) => {
            let vars: Vec<&str> = pat.iter().map(|&p| ["x", "y"][p]).collect();
            format!("w{}({})", i, vars.join(","))
        }
        Side::Var(v) => ["x", "y"][v].to_string(),
    }
}

/// Checks the `n` ternary identities over all `k²` values of `(x, y)`.
pub fn verify_hm(alg: &FiniteAlgebra, candidate: &[Term], n: usize) -> Result<Verification, HmError> {
    if n < 2 {
        return Err(HmError::DegreeTooSmall(n));
    }
    if candidate.len() != n - 1 {
        return Err(HmError::TermCount {
            n,
            expected: n - 1,
            found: candidate.len(),
        });
    }
    validate_terms(alg, candidate, 3)?;

    let mut identities = vec![(Side::Apply(1, XYY), Side::Var(0))];
    for i in 1..n - 1 {
        identities.push((Side::Apply(i, XXY), Side::Apply(i + 1, XYY)));
    }
    identities.push((Side::Apply(n - 1, XXY), Side::Var(1)));

    let k = alg.size() as Elem;
    let eval = |side: Side, xy: [Elem; 2]| -> Elem {
        match side {
            Side::Apply(i, pat) => candidate[i - 1].eval_unchecked(alg, &[xy[pat[0]], xy[pat[1]], xy[pat[2]]]),
            Side::Var(v) => xy[v],
        }
    };
    let checks = identities
        .into_iter()
        .map(|(lhs, rhs)| {
            let mut counterexample = None;
            let mut assignments = 0;
            'outer: for x in 0..k {
                for y in 0..k {
                    assignments += 1;
                    if eval(lhs, [x, y]) != eval(rhs, [x, y]) {
                        counterexample = Some(vec![("x".to_string(), x), ("y".to_string(), y)]);
                        break 'outer;
                    }
                }
            }
            IdentityCheck {
                identity: format!("{} = {}", side_label(lhs), side_label(rhs)),
                assignments,
                counterexample,
            }
        })
        .collect();
    Ok(Verification { checks })
}

/// Variable pattern on which `v_{i-1}` and `v_i` must agree: position `p`
/// reads variable `pattern[p]`.
pub fn nary_pattern(n: usize, i: usize) -> Vec<usize> {
    (0..=n)
        .map(|p| {
            if i.is_multiple_of(2) {
                p - p % 2
            } else if p == 0 || p % 2 == 1 {
                p
            } else {
                p - 1
            }
        })
        .collect()
}

/// Checks `v_0 = x_0`, `v_n = x_n` and the `n` agreement identities,
/// each over every value of the variables it actually involves.
pub fn verify_nary(alg: &FiniteAlgebra, candidate: &[Term], n: usize) -> Result<Verification, HmError> {
    if n < 2 {
        return Err(HmError::DegreeTooSmall(n));
    }
    if candidate.len() != n + 1 {
        return Err(HmError::TermCount {
            n,
            expected: n + 1,
            found: candidate.len(),
        });
    }
    validate_terms(alg, candidate, n + 1)?;
    let names = nary_var_names(n);
    let k = alg.size();
    let all_vars = || (0..=n).collect::<Vec<usize>>();

    // each entry: label, lhs term index, rhs (term index or projection), pattern
    enum Rhs {
        Term(usize),
        Proj(usize),
    }
    let mut identities: Vec<(String, usize, Rhs, Vec<usize>)> = Vec::new();
    let full_args = names.join(",");
    identities.push((format!("v0({}) = x0", full_args), 0, Rhs::Proj(0), all_vars()));
    for i in 1..=n {
        let pat = nary_pattern(n, i);
        let args: Vec<&str> = pat.iter().map(|&v| names[v].as_str()).collect();
        let args = args.join(",");
        identities.push((
            format!("v{}({}) = v{}({})", i - 1, args, i, args),
            i - 1,
            Rhs::Term(i),
            pat,
        ));
    }
    identities.push((format!("v{}({}) = x{}", n, full_args, n), n, Rhs::Proj(n), all_vars()));

    let mut checks = Vec::with_capacity(identities.len());
    let mut point = vec![0 as Elem; n + 1];
    for (identity, lhs, rhs, pattern) in identities {
        let mut free: Vec<usize> = pattern.clone();
        free.sort_unstable();
        free.dedup();
        let mut values = vec![0 as Elem; free.len()];
        let mut assignments = 0;
        let mut counterexample = None;
        loop {
            for (p, &var) in pattern.iter().enumerate() {
                let slot = free.binary_search(&var).expect("pattern variable");
                point[p] = values[slot];
            }
            assignments += 1;
            let l = candidate[lhs].eval_unchecked(alg, &point);
            let r = match rhs {
                Rhs::Term(j) => candidate[j].eval_unchecked(alg, &point),
                Rhs::Proj(v) => point[v],
            };
            if l != r {
                counterexample = Some(
                    free.iter()
                        .zip(&values)
                        .map(|(&v, &e)| (names[v].clone(), e))
                        .collect(),
                );
                break;
            }
            if !crate::algebra::next_tuple(&mut values, k) {
                break;
            }
        }
        checks.push(IdentityCheck {
            identity,
            assignments,
            counterexample,
        });
    }
    Ok(Verification { checks })
}

fn ensure(v: Verification) -> Result<(), HmError> {
    match v.first_failure() {
        None => Ok(()),
        Some(c) => Err(HmError::VerificationFailed(c.identity.clone())),
    }
}

/// Converts a ternary witness to the `(n+1)`-ary form and re-verifies it.
pub fn ternary_to_nary(alg: &FiniteAlgebra, w: &HmWitness) -> Result<NaryWitness, HmError> {
    let v = w.to_nary();
    ensure(verify_nary(alg, v.terms(), v.n())?)?;
    Ok(v)
}

/// Converts an `(n+1)`-ary witness to the ternary form and re-verifies it.
pub fn nary_to_ternary(alg: &FiniteAlgebra, v: &NaryWitness) -> Result<HmWitness, HmError> {
    let w = v.to_ternary();
    ensure(verify_hm(alg, w.terms(), w.n())?)?;
    Ok(w)
}
