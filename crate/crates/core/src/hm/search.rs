//! Term search on the pattern subpower.
//!
//! The identities only ever evaluate a ternary term at argument triples of
//! the shapes `(a,b,b)` and `(a,a,b)`. A term is therefore determined, as far
//! as the identities can tell, by its restriction to the index set
//! `D = {(a,b,b)} ∪ {(a,a,b)}`, and the term operations restricted to `D` are
//! exactly the subalgebra of `A^D` generated by the three projections.
//!
//! Each such element `f` has a left face `(a,b) ↦ f(a,b,b)` and a right face
//! `(a,b) ↦ f(a,a,b)`. A chain `w_1, …, w_{n-1}` satisfies the identities iff
//! the faces form a walk `π₁ = L(w_1), R(w_1) = L(w_2), …, R(w_{n-1}) = π₂`,
//! so witnesses are walks from `π₁` to `π₂` in the finite face graph.

use std::collections::VecDeque;

use indexmap::IndexSet;

use super::{verify_hm, HmError, HmWitness};
use crate::algebra::{Elem, FiniteAlgebra};
use crate::subpower::{subalgebra_closure, Subpower};
use crate::term::Term;

/// Generated subalgebra of `A^D` for the pattern index set `D`.
pub struct PatternSubpower {
    k: usize,
    /// Triples indexing the coordinates: all `(a,b,b)`, then `(a,a,b)` with
    /// `a ≠ b`. The diagonal triples occur once.
    points: Vec<[Elem; 3]>,
    /// `left[a*k+b]` is the coordinate of `(a,b,b)`.
    left: Vec<usize>,
    /// `right[a*k+b]` is the coordinate of `(a,a,b)`.
    right: Vec<usize>,
    sub: Subpower,
}

impl PatternSubpower {
    pub fn points(&self) -> &[[Elem; 3]] {
        &self.points
    }

    pub fn subpower(&self) -> &Subpower {
        &self.sub
    }

    pub fn len(&self) -> usize {
        self.sub.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sub.is_empty()
    }

    /// `(a,b) ↦ f(a,b,b)` as a `k×k` table.
    pub fn left_face(&self, i: usize) -> Vec<Elem> {
        let c = self.sub.coordinates(i);
        self.left.iter().map(|&p| c[p]).collect()
    }

    /// `(a,b) ↦ f(a,a,b)` as a `k×k` table.
    pub fn right_face(&self, i: usize) -> Vec<Elem> {
        let c = self.sub.coordinates(i);
        self.right.iter().map(|&p| c[p]).collect()
    }

    /// Index of the element with the given coordinates over `D`.
    pub fn index_of(&self, coords: &[Elem]) -> Option<usize> {
        self.sub.index_of(coords)
    }

    /// Restriction of the projection onto argument `v` (0, 1 or 2) to `D`.
    pub fn projection(&self, v: usize) -> Vec<Elem> {
        self.points.iter().map(|p| p[v]).collect()
    }

    fn face_projection(&self, v: usize) -> Vec<Elem> {
        let k = self.k as Elem;
        (0..k).flat_map(|a| (0..k).map(move |b| if v == 0 { a } else { b })).collect()
    }
}

/// Closes the three projections restricted to the pattern index set.
pub fn build_pattern_subpower(alg: &FiniteAlgebra, budget: usize) -> Result<PatternSubpower, HmError> {
    let k = alg.size();
    let mut points = Vec::with_capacity(2 * k * k - k);
    let mut left = vec![0; k * k];
    let mut right = vec![0; k * k];
    for a in 0..k as Elem {
        for b in 0..k as Elem {
            left[a as usize * k + b as usize] = points.len();
            points.push([a, b, b]);
        }
    }
    for a in 0..k as Elem {
        for b in 0..k as Elem {
            let idx = a as usize * k + b as usize;
            if a == b {
                right[idx] = left[idx];
            } else {
                right[idx] = points.len();
                points.push([a, a, b]);
            }
        }
    }
    let gens: Vec<Vec<Elem>> = (0..3).map(|v| points.iter().map(|p| p[v]).collect()).collect();
    let sub = subalgebra_closure(alg, points.len(), &gens, budget)?;
    Ok(PatternSubpower {
        k,
        points,
        left,
        right,
        sub,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceEdge {
    pub from: usize,
    pub to: usize,
    /// Subpower element whose faces these are.
    pub element: usize,
}

/// Faces of pattern-subpower elements and the left-to-right face edges.
pub struct PatternGraph {
    nodes: IndexSet<Box<[Elem]>>,
    edges: Vec<FaceEdge>,
    out: Vec<Vec<usize>>,
    first: usize,
    second: usize,
}

impl PatternGraph {
    pub fn new(ps: &PatternSubpower) -> Self {
        let mut nodes: IndexSet<Box<[Elem]>> = IndexSet::new();
        let first = nodes.insert_full(ps.face_projection(0).into()).0;
        let second = nodes.insert_full(ps.face_projection(1).into()).0;
        let mut edges = Vec::with_capacity(ps.len());
        for element in 0..ps.len() {
            let from = nodes.insert_full(ps.left_face(element).into()).0;
            let to = nodes.insert_full(ps.right_face(element).into()).0;
            edges.push(FaceEdge { from, to, element });
        }
        let mut out = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.from].push(i);
        }
        PatternGraph {
            nodes,
            edges,
            out,
            first,
            second,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[FaceEdge] {
        &self.edges
    }

    /// Node of the face `(a,b) ↦ a`.
    pub fn first_projection(&self) -> usize {
        self.first
    }

    /// Node of the face `(a,b) ↦ b`.
    pub fn second_projection(&self) -> usize {
        self.second
    }

    pub fn face(&self, node: usize) -> &[Elem] {
        &self.nodes[node]
    }

    /// Breadth-first search for a shortest walk of at least one edge from
    /// `π₁` to `π₂`; returns its edges. Edges are explored in element order.
    pub fn shortest_walk(&self) -> Option<Vec<FaceEdge>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut visited = vec![false; self.nodes.len()];
        let mut queue = VecDeque::new();
        visited[self.first] = true;
        queue.push_back(self.first);
        while let Some(u) = queue.pop_front() {
            for &ei in &self.out[u] {
                let e = self.edges[ei];
                if e.to == self.second {
                    let mut walk = vec![e];
                    let mut node = u;
                    while let Some(pi) = parent[node] {
                        let pe = self.edges[pi];
                        walk.push(pe);
                        node = pe.from;
                    }
                    walk.reverse();
                    return Some(walk);
                }
                if !visited[e.to] {
                    visited[e.to] = true;
                    parent[e.to] = Some(ei);
                    queue.push_back(e.to);
                }
            }
        }
        None
    }
}

/// Least degree of Hagemann–Mitschke terms for the variety of an algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinDegree {
    Degree(HmWitness),
    /// `π₂` is unreachable from `π₁`: no `n` admits terms.
    NotPermutable,
}

fn witness_from_walk(ps: &PatternSubpower, walk: &[FaceEdge], n: usize) -> HmWitness {
    let mut terms: Vec<Term> = walk.iter().map(|e| ps.sub.provenance(e.element)).collect();
    // z has both faces equal to π₂, so it extends any walk ending there
    let z = ps.index_of(&ps.projection(2)).expect("generator is in the closure");
    while terms.len() < n - 1 {
        terms.push(ps.sub.provenance(z));
    }
    HmWitness::new(n, terms).expect("walk yields well-shaped witness")
}

fn verified(alg: &FiniteAlgebra, w: HmWitness) -> Result<HmWitness, HmError> {
    let v = verify_hm(alg, w.terms(), w.n())?;
    match v.first_failure() {
        None => Ok(w),
        Some(c) => Err(HmError::VerificationFailed(c.identity.clone())),
    }
}

/// Searches for `w_1, …, w_{n-1}`. Returns `None` if no chain of length
/// `n - 1` exists.
pub fn hm_search(alg: &FiniteAlgebra, n: usize, budget: usize) -> Result<Option<HmWitness>, HmError> {
    if n < 2 {
        return Err(HmError::DegreeTooSmall(n));
    }
    let ps = build_pattern_subpower(alg, budget)?;
    let graph = PatternGraph::new(&ps);
    match graph.shortest_walk() {
        Some(walk) if walk.len() < n => verified(alg, witness_from_walk(&ps, &walk, n)).map(Some),
        _ => Ok(None),
    }
}

/// Least `n` admitting terms, with a witness, or a proof that none does.
pub fn min_degree(alg: &FiniteAlgebra, budget: usize) -> Result<MinDegree, HmError> {
    let ps = build_pattern_subpower(alg, budget)?;
    let graph = PatternGraph::new(&ps);
    match graph.shortest_walk() {
        Some(walk) => {
            let n = walk.len() + 1;
            Ok(MinDegree::Degree(verified(alg, witness_from_walk(&ps, &walk, n))?))
        }
        None => Ok(MinDegree::NotPermutable),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Symbol;
    use crate::hm::{ternary_var_names, TERNARY_VARS};
    use crate::subpower::{power_algebra, DEFAULT_CLOSURE_BUDGET};
    use crate::term::parse_term;

    fn group2() -> FiniteAlgebra {
        FiniteAlgebra::new(
            "group2",
            2,
            vec![
                (Symbol::new("+", 2), vec![0, 1, 1, 0]),
                (Symbol::new("-", 1), vec![0, 1]),
                (Symbol::new("0", 0), vec![0]),
            ],
        )
        .unwrap()
    }

    fn imp2() -> FiniteAlgebra {
        FiniteAlgebra::new("imp2", 2, vec![(Symbol::new("->", 2), vec![1, 1, 0, 1])]).unwrap()
    }

    fn lattice2() -> FiniteAlgebra {
        FiniteAlgebra::new(
            "lattice2",
            2,
            vec![
                (Symbol::new("meet", 2), vec![0, 0, 0, 1]),
                (Symbol::new("join", 2), vec![0, 1, 1, 1]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn pattern_index_set_has_2k2_minus_k_points() {
        let ps = build_pattern_subpower(&group2(), DEFAULT_CLOSURE_BUDGET).unwrap();
        assert_eq!(ps.points().len(), 6);
    }

    #[test]
    fn empty_signature_closure_is_the_projections() {
        let set2 = FiniteAlgebra::new("set2", 2, vec![]).unwrap();
        let ps = build_pattern_subpower(&set2, 100).unwrap();
        assert_eq!(ps.len(), 3);
        assert_eq!(min_degree(&set2, 100).unwrap(), MinDegree::NotPermutable);
    }

    #[test]
    fn group2_closure_contains_sum_of_projections() {
        let g = group2();
        let ps = build_pattern_subpower(&g, DEFAULT_CLOSURE_BUDGET).unwrap();
        let t = parse_term("+(x, +(y, z))", g.signature(), &TERNARY_VARS).unwrap();
        let p = power_algebra(&g, ps.points().len()).unwrap();
        let gens: Vec<Vec<Elem>> = (0..3).map(|v| ps.projection(v)).collect();
        let gref: Vec<&[Elem]> = gens.iter().map(|g| g.as_slice()).collect();
        assert!(ps.index_of(&p.eval(&t, &gref)).is_some());
    }

    #[test]
    fn group2_is_maltsev() {
        let g = group2();
        let w = hm_search(&g, 2, DEFAULT_CLOSURE_BUDGET).unwrap().unwrap();
        assert!(verify_hm(&g, w.terms(), 2).unwrap().passed());
        match min_degree(&g, DEFAULT_CLOSURE_BUDGET).unwrap() {
            MinDegree::Degree(w) => assert_eq!(w.n(), 2),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn implication_algebra_is_three_but_not_two_permutable() {
        let a = imp2();
        assert_eq!(hm_search(&a, 2, DEFAULT_CLOSURE_BUDGET).unwrap(), None);
        let w = hm_search(&a, 3, DEFAULT_CLOSURE_BUDGET).unwrap().unwrap();
        assert!(verify_hm(&a, w.terms(), 3).unwrap().passed());
        let vars = ternary_var_names();
        for t in w.terms() {
            let _ = t.display(a.signature(), &vars).to_string();
        }
        match min_degree(&a, DEFAULT_CLOSURE_BUDGET).unwrap() {
            MinDegree::Degree(w) => assert_eq!(w.n(), 3),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn lattice_has_no_terms() {
        let l = lattice2();
        for n in 2..=6 {
            assert_eq!(hm_search(&l, n, DEFAULT_CLOSURE_BUDGET).unwrap(), None);
        }
        assert_eq!(min_degree(&l, DEFAULT_CLOSURE_BUDGET).unwrap(), MinDegree::NotPermutable);
    }

    #[test]
    fn longer_chains_are_padded() {
        let g = group2();
        for n in 2..6 {
            let w = hm_search(&g, n, DEFAULT_CLOSURE_BUDGET).unwrap().unwrap();
            assert_eq!(w.terms().len(), n - 1);
            assert!(verify_hm(&g, w.terms(), n).unwrap().passed());
        }
    }

    #[test]
    fn trivial_algebra_is_maltsev() {
        let one = FiniteAlgebra::new("one", 1, vec![]).unwrap();
        match min_degree(&one, 10).unwrap() {
            MinDegree::Degree(w) => assert_eq!(w.n(), 2),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn budget_error_propagates() {
        assert!(matches!(hm_search(&group2(), 2, 2), Err(HmError::Closure(_))));
    }
}
