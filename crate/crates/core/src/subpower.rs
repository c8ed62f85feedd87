//! Lazy direct powers of a finite algebra and generated subalgebras of them.
//!
//! An element of the power `A^D` is a coordinate vector indexed by `0..|D|`.
//! The power is never tabulated; operations are applied coordinatewise on
//! demand. [`close`] computes the subalgebra generated by a list of such
//! vectors and records, for every element found, the operation and argument
//! elements that first produced it.

use indexmap::IndexSet;
use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::term::Term;

/// Default cap on the number of elements of a generated subpower.
pub const DEFAULT_CLOSURE_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosureError {
    #[error("index set of a power must be nonempty")]
    EmptyIndexSet,
    #[error("generator {index} has {found} coordinates, expected {expected}")]
    GeneratorShape {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("generator {index} has coordinate value {value} outside the universe")]
    GeneratorRange { index: usize, value: Elem },
    #[error("closure exceeded the budget of {budget} elements")]
    BudgetExceeded { budget: usize },
}

/// The power `alg^D` with `|D| = dim`, acting coordinatewise.
#[derive(Clone, Copy, Debug)]
pub struct PowerAlgebra<'a> {
    base: &'a FiniteAlgebra,
    dim: usize,
}

impl<'a> PowerAlgebra<'a> {
    pub fn new(base: &'a FiniteAlgebra, dim: usize) -> Result<Self, ClosureError> {
        if dim == 0 {
            return Err(ClosureError::EmptyIndexSet);
        }
        Ok(PowerAlgebra { base, dim })
    }

    pub fn base(&self) -> &'a FiniteAlgebra {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Applies `op` coordinatewise, writing the result into `out`.
    pub fn apply_into(&self, op: usize, args: &[&[Elem]], out: &mut Vec<Elem>) {
        out.clear();
        let mut scratch = Vec::with_capacity(args.len());
        for d in 0..self.dim {
            scratch.clear();
            scratch.extend(args.iter().map(|a| a[d]));
            out.push(self.base.apply(op, &scratch));
        }
    }

    pub fn apply(&self, op: usize, args: &[&[Elem]]) -> Vec<Elem> {
        let mut out = Vec::with_capacity(self.dim);
        self.apply_into(op, args, &mut out);
        out
    }

    /// Evaluates a term coordinatewise, variable `i` bound to `assignment[i]`.
    pub fn eval(&self, t: &Term, assignment: &[&[Elem]]) -> Vec<Elem> {
        (0..self.dim)
            .map(|d| {
                let point: Vec<Elem> = assignment.iter().map(|a| a[d]).collect();
                t.eval_unchecked(self.base, &point)
            })
            .collect()
    }
}

/// How an element of a [`Subpower`] was first obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Generator(usize),
    Op { symbol: usize, args: Vec<usize> },
}

/// An element of a subpower with its generating term materialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubpowerElement {
    pub coordinates: Vec<Elem>,
    pub provenance: Term,
}

/// A generated subalgebra of a power, elements in discovery order.
#[derive(Clone, Debug)]
pub struct Subpower {
    dim: usize,
    num_generators: usize,
    elements: IndexSet<Box<[Elem]>>,
    origins: Vec<Origin>,
}

impl Subpower {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_generators(&self) -> usize {
        self.num_generators
    }

    pub fn coordinates(&self, i: usize) -> &[Elem] {
        &self.elements[i]
    }

    pub fn origin(&self, i: usize) -> &Origin {
        &self.origins[i]
    }

    pub fn index_of(&self, coords: &[Elem]) -> Option<usize> {
        self.elements.get_index_of(coords)
    }

    pub fn contains(&self, coords: &[Elem]) -> bool {
        self.elements.contains(coords)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Elem]> {
        self.elements.iter().map(|e| &**e)
    }

    /// Expands the provenance of element `i` into a term with one variable
    /// per generator.
    pub fn provenance(&self, i: usize) -> Term {
        match &self.origins[i] {
            Origin::Generator(g) => Term::Var(*g),
            Origin::Op { symbol, args } => {
                Term::Op(*symbol, args.iter().map(|&a| self.provenance(a)).collect())
            }
        }
    }

    pub fn element(&self, i: usize) -> SubpowerElement {
        SubpowerElement {
            coordinates: self.elements[i].to_vec(),
            provenance: self.provenance(i),
        }
    }
}

/// Visits, in lexicographic order, every tuple of length `arity` over
/// `0..=newest` that contains `newest`.
fn for_each_tuple_with<E>(
    arity: usize,
    newest: usize,
    f: &mut dyn FnMut(&[usize]) -> Result<(), E>,
) -> Result<(), E> {
    fn rec<E>(
        buf: &mut Vec<usize>,
        arity: usize,
        newest: usize,
        seen: bool,
        f: &mut dyn FnMut(&[usize]) -> Result<(), E>,
    ) -> Result<(), E> {
        let pos = buf.len();
        if pos == arity {
            return f(buf);
        }
        let lo = if pos + 1 == arity && !seen { newest } else { 0 };
        for v in lo..=newest {
            buf.push(v);
            rec(buf, arity, newest, seen || v == newest, f)?;
            buf.pop();
        }
        Ok(())
    }
    let mut buf = Vec::with_capacity(arity);
    rec(&mut buf, arity, newest, false, f)
}

fn insert(
    elements: &mut IndexSet<Box<[Elem]>>,
    origins: &mut Vec<Origin>,
    budget: usize,
    coords: &[Elem],
    origin: impl FnOnce() -> Origin,
) -> Result<(), ClosureError> {
    if elements.contains(coords) {
        return Ok(());
    }
    if elements.len() >= budget {
        return Err(ClosureError::BudgetExceeded { budget });
    }
    elements.insert(coords.into());
    origins.push(origin());
    Ok(())
}

/// Computes the subalgebra of `power` generated by `generators`.
///
/// Elements are numbered in discovery order: the distinct generators first,
/// then the nullary operations, then the results of applying each operation
/// (in signature order) to every argument tuple whose largest index is the
/// element currently taken from the worklist, tuples in lexicographic order.
pub fn close(
    power: &PowerAlgebra<'_>,
    generators: &[Vec<Elem>],
    budget: usize,
) -> Result<Subpower, ClosureError> {
    let alg = power.base();
    let dim = power.dim();
    for (index, g) in generators.iter().enumerate() {
        if g.len() != dim {
            return Err(ClosureError::GeneratorShape {
                index,
                expected: dim,
                found: g.len(),
            });
        }
        if let Some(&value) = g.iter().find(|&&v| v as usize >= alg.size()) {
            return Err(ClosureError::GeneratorRange { index, value });
        }
    }

    let mut elements: IndexSet<Box<[Elem]>> = IndexSet::new();
    let mut origins = Vec::new();

    for (g, coords) in generators.iter().enumerate() {
        insert(&mut elements, &mut origins, budget, coords, || Origin::Generator(g))?;
    }
    let sig = alg.signature();
    let mut out = Vec::with_capacity(dim);
    for op in (0..sig.len()).filter(|&op| sig.arity(op) == 0) {
        power.apply_into(op, &[], &mut out);
        insert(&mut elements, &mut origins, budget, &out, || Origin::Op {
            symbol: op,
            args: Vec::new(),
        })?;
    }

    let mut next = 0;
    let mut scratch: Vec<Elem> = Vec::new();
    let mut point: Vec<Elem> = Vec::new();
    while next < elements.len() {
        for op in (0..sig.len()).filter(|&op| sig.arity(op) > 0) {
            let arity = sig.arity(op);
            for_each_tuple_with(arity, next, &mut |tuple: &[usize]| {
                scratch.clear();
                for &i in tuple {
                    scratch.extend_from_slice(&elements[i]);
                }
                out.clear();
                for d in 0..dim {
                    point.clear();
                    point.extend((0..arity).map(|j| scratch[j * dim + d]));
                    out.push(alg.apply(op, &point));
                }
                insert(&mut elements, &mut origins, budget, &out, || Origin::Op {
                    symbol: op,
                    args: tuple.to_vec(),
                })
            })?;
        }
        next += 1;
    }

    Ok(Subpower {
        dim,
        num_generators: generators.len(),
        elements,
        origins,
    })
}

/// Coordinatewise power of `alg` over an index set of size `dim`.
pub fn power_algebra(alg: &FiniteAlgebra, dim: usize) -> Result<PowerAlgebra<'_>, ClosureError> {
    PowerAlgebra::new(alg, dim)
}

/// Generated subalgebra of `alg^dim`; see [`close`].
pub fn subalgebra_closure(
    alg: &FiniteAlgebra,
    dim: usize,
    generators: &[Vec<Elem>],
    budget: usize,
) -> Result<Subpower, ClosureError> {
    close(&PowerAlgebra::new(alg, dim)?, generators, budget)
}
