//! Binary relations on `0..k` as dense bit matrices.
//!
//! Composition is written in diagrammatic order: `compose(R, S)` relates `a`
//! to `c` when `a R b` and `b S c` for some `b`. The alternating composite
//! `(R, S)_n` relates the endpoints of chains `a R x1 S x2 R …` of `n` steps
//! whose first step is in `R`.

use std::fmt;

use thiserror::Error;

use crate::algebra::Elem;

const WORD: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelError {
    #[error("relations on universes of size {left} and {right} cannot be combined")]
    SizeMismatch { left: usize, right: usize },
    #[error("number of steps must be at least 1")]
    ZeroSteps,
    #[error("pair ({a},{b}) is outside the universe 0..{size}")]
    OutOfRange { a: u64, b: u64, size: usize },
    #[error("malformed relation literal: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinRel {
    size: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BinRel {
    pub fn empty(size: usize) -> Self {
        let stride = size.div_ceil(WORD).max(1);
        BinRel {
            size,
            stride,
            bits: vec![0; stride * size],
        }
    }

    pub fn diagonal(size: usize) -> Self {
        let mut r = BinRel::empty(size);
        for a in 0..size {
            r.insert(a, a);
        }
        r
    }

    pub fn full(size: usize) -> Self {
        let mut r = BinRel::empty(size);
        for a in 0..size {
            for b in 0..size {
                r.insert(a, b);
            }
        }
        r
    }

    pub fn from_pairs<I>(size: usize, pairs: I) -> Result<Self, RelError>
    where
        I: IntoIterator<Item = (Elem, Elem)>,
    {
        let mut r = BinRel::empty(size);
        for (a, b) in pairs {
            if a as usize >= size || b as usize >= size {
                return Err(RelError::OutOfRange {
                    a: a as u64,
                    b: b as u64,
                    size,
                });
            }
            r.insert(a as usize, b as usize);
        }
        Ok(r)
    }

    /// Builds `{(a, b) : f(a, b)}`.
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut r = BinRel::empty(size);
        for a in 0..size {
            for b in 0..size {
                if f(a, b) {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    fn row(&self, a: usize) -> &[u64] {
        &self.bits[a * self.stride..(a + 1) * self.stride]
    }

    #[inline]
    fn row_mut(&mut self, a: usize) -> &mut [u64] {
        &mut self.bits[a * self.stride..(a + 1) * self.stride]
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        a < self.size && b < self.size && self.bits[a * self.stride + b / WORD] >> (b % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, a: usize, b: usize) {
        assert!(a < self.size && b < self.size, "pair ({a},{b}) out of range");
        self.bits[a * self.stride + b / WORD] |= 1 << (b % WORD);
    }

    /// Number of pairs.
    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Elements related to `a`, ascending.
    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(a).iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * WORD + bit)
            })
        })
    }

    /// All pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size).flat_map(move |a| self.successors(a).map(move |b| (a, b)))
    }

    fn check_size(&self, other: &BinRel) -> Result<(), RelError> {
        if self.size != other.size {
            return Err(RelError::SizeMismatch {
                left: self.size,
                right: other.size,
            });
        }
        Ok(())
    }

    pub fn opposite(&self) -> BinRel {
        let mut r = BinRel::empty(self.size);
        for (a, b) in self.pairs() {
            r.insert(b, a);
        }
        r
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &BinRel) -> Result<BinRel, RelError> {
        self.check_size(next)?;
        let mut out = BinRel::empty(self.size);
        for a in 0..self.size {
            for b in self.successors(a) {
                let (dst, src) = (a * self.stride, b * self.stride);
                for w in 0..self.stride {
                    out.bits[dst + w] |= next.bits[src + w];
                }
            }
        }
        Ok(out)
    }

    pub fn union(&self, other: &BinRel) -> Result<BinRel, RelError> {
        self.check_size(other)?;
        let mut out = self.clone();
        for (w, o) in out.bits.iter_mut().zip(&other.bits) {
            *w |= o;
        }
        Ok(out)
    }

    pub fn is_subset(&self, other: &BinRel) -> Result<bool, RelError> {
        self.check_size(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size).all(|a| self.contains(a, a))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }

    /// `R∘R ≤ R`.
    pub fn is_transitive(&self) -> bool {
        let rr = self.then(self).expect("same size");
        rr.is_subset(self).expect("same size")
    }

    /// `R∘R = R`; coincides with [`is_transitive`](Self::is_transitive) for
    /// reflexive relations.
    pub fn is_transitive_strict(&self) -> bool {
        self.then(self).expect("same size") == *self
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    /// Least reflexive transitive relation containing `self`.
    pub fn reflexive_transitive_closure(&self) -> BinRel {
        let mut r = self.union(&BinRel::diagonal(self.size)).expect("same size");
        // Warshall over rows
        for k in 0..self.size {
            let krow: Vec<u64> = r.row(k).to_vec();
            for a in 0..self.size {
                if r.contains(a, k) {
                    for (w, kw) in r.row_mut(a).iter_mut().zip(&krow) {
                        *w |= kw;
                    }
                }
            }
        }
        r
    }

    /// Parses `"a,b;c,d"`. Whitespace is ignored; the empty string is the
    /// empty relation.
    pub fn parse(size: usize, literal: &str) -> Result<BinRel, RelError> {
        let mut pairs = Vec::new();
        for part in literal.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (a, b) = part
                .split_once(',')
                .ok_or_else(|| RelError::Parse(format!("`{}` is not a pair `a,b`", part)))?;
            let parse = |s: &str| -> Result<u64, RelError> {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| RelError::Parse(format!("`{}` is not an element", s.trim())))
            };
            let (a, b) = (parse(a)?, parse(b)?);
            if a >= size as u64 || b >= size as u64 {
                return Err(RelError::OutOfRange { a, b, size });
            }
            pairs.push((a as Elem, b as Elem));
        }
        BinRel::from_pairs(size, pairs)
    }
}

/// Renders as the literal accepted by [`BinRel::parse`].
impl fmt::Display for BinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{},{}", a, b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinRel({}: {})", self.size, self)
    }
}

pub fn opposite(r: &BinRel) -> BinRel {
    r.opposite()
}

/// Pairs `(a, c)` with `a R b` and `b S c` for some `b`; `R` is the first
/// step.
pub fn compose(r: &BinRel, s: &BinRel) -> Result<BinRel, RelError> {
    r.then(s)
}

/// `(R, S)_n`: endpoints of `n`-step chains alternating `R, S, R, …`.
pub fn alternating(r: &BinRel, s: &BinRel, n: usize) -> Result<BinRel, RelError> {
    if n == 0 {
        return Err(RelError::ZeroSteps);
    }
    r.check_size(s)?;
    let mut acc = r.clone();
    for step in 2..=n {
        acc = acc.then(if step % 2 == 0 { s } else { r })?;
    }
    Ok(acc)
}

/// `R^n = (R, R)_n`.
pub fn rel_power(r: &BinRel, n: usize) -> Result<BinRel, RelError> {
    alternating(r, r, n)
}

/// `R ≤ R'`.
pub fn leq(r: &BinRel, r2: &BinRel) -> Result<bool, RelError> {
    r.is_subset(r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(size: usize, pairs: &[(Elem, Elem)]) -> BinRel {
        BinRel::from_pairs(size, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn opposite_examples() {
        assert_eq!(opposite(&rel(2, &[(0, 1)])), rel(2, &[(1, 0)]));
        let sym = rel(3, &[(0, 1), (1, 0), (2, 2)]);
        assert_eq!(opposite(&sym), sym);
    }

    #[test]
    fn compose_examples() {
        let r = rel(3, &[(0, 1)]);
        let s = rel(3, &[(1, 2)]);
        assert_eq!(compose(&r, &s).unwrap(), rel(3, &[(0, 2)]));
        assert_eq!(compose(&BinRel::diagonal(3), &s).unwrap(), s);
        assert_eq!(
            compose(&r, &BinRel::empty(4)).unwrap_err(),
            RelError::SizeMismatch { left: 3, right: 4 }
        );
    }

    #[test]
    fn alternating_examples() {
        let r = rel(4, &[(0, 1), (2, 3)]);
        let s = rel(4, &[(1, 2)]);
        assert_eq!(alternating(&r, &s, 1).unwrap(), r);
        assert_eq!(alternating(&r, &s, 2).unwrap(), compose(&r, &s).unwrap());
        assert_eq!(alternating(&r, &s, 3).unwrap(), rel(4, &[(0, 3)]));
        assert_eq!(alternating(&r, &s, 0).unwrap_err(), RelError::ZeroSteps);
    }

    #[test]
    fn power_examples() {
        let r = rel(3, &[(0, 1), (1, 2)]);
        assert_eq!(rel_power(&r, 2).unwrap(), rel(3, &[(0, 2)]));
        assert_eq!(rel_power(&BinRel::diagonal(5), 4).unwrap(), BinRel::diagonal(5));
    }

    #[test]
    fn property_flags() {
        let d = BinRel::diagonal(3);
        assert!(d.is_reflexive() && d.is_symmetric() && d.is_transitive());
        let r = rel(2, &[(0, 1)]);
        assert_eq!((r.is_reflexive(), r.is_symmetric(), r.is_transitive()), (false, false, true));
        // vacuous transitivity, but R∘R = ∅ ≠ R
        assert!(!r.is_transitive_strict());
        let f = BinRel::full(3);
        assert!(f.is_reflexive() && f.is_symmetric() && f.is_transitive());
    }

    #[test]
    fn leq_examples() {
        let r = rel(3, &[(0, 1), (2, 2)]);
        assert!(leq(&r, &r).unwrap());
        assert!(leq(&BinRel::empty(3), &r).unwrap());
        assert!(!leq(&r, &BinRel::diagonal(3)).unwrap());
    }

    #[test]
    fn literal_round_trip() {
        let r = BinRel::parse(4, "0,1; 2,3;3,3").unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(BinRel::parse(4, &r.to_string()).unwrap(), r);
        assert_eq!(BinRel::parse(2, "").unwrap(), BinRel::empty(2));
        assert!(matches!(BinRel::parse(2, "0,2"), Err(RelError::OutOfRange { .. })));
        assert!(matches!(BinRel::parse(2, "0;1"), Err(RelError::Parse(_))));
    }

    #[test]
    fn wide_relations_use_multiple_words() {
        let r = BinRel::from_fn(130, |a, b| b == a + 1);
        let r2 = rel_power(&r, 2).unwrap();
        assert!(r2.contains(0, 2) && r2.contains(127, 129));
        assert_eq!(r2.len(), 128);
        let c = r.reflexive_transitive_closure();
        assert!(c.contains(0, 129) && !c.contains(129, 0));
    }
}
