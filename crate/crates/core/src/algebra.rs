//! Finite algebras over the universe `0..k` with flat operation tables.

use std::fmt;

use thiserror::Error;

/// An element of a finite universe `0..k`.
pub type Elem = u32;

/// Largest table materialized by [`FiniteAlgebra::direct_power`].
pub const MAX_TABLE_LEN: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("algebra size must be positive")]
    EmptyUniverse,
    #[error("operation symbol names must be nonempty")]
    EmptySymbol,
    #[error("symbol `{0}` contains whitespace, parentheses or commas")]
    InvalidSymbol(String),
    #[error("duplicate operation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("operation `{symbol}` of arity {arity} needs a table of {expected} entries, found {found}")]
    TableLength {
        symbol: String,
        arity: usize,
        expected: usize,
        found: usize,
    },
    #[error("operation `{symbol}`: table entry {index} is {value}, outside the universe 0..{size}")]
    EntryOutOfRange {
        symbol: String,
        index: usize,
        value: u64,
        size: usize,
    },
    #[error("table of {0}^{1} entries is too large to materialize")]
    TooLarge(usize, usize),
}

/// An operation symbol with its arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// Returns true if `name` can be used as an operation symbol or a variable
/// name in the prefix term syntax.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '=' | '#'))
}

/// Ordered list of operation symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, AlgebraError> {
        for (i, s) in symbols.iter().enumerate() {
            if s.name.is_empty() {
                return Err(AlgebraError::EmptySymbol);
            }
            if !is_valid_name(&s.name) {
                return Err(AlgebraError::InvalidSymbol(s.name.clone()));
            }
            if symbols[..i].iter().any(|t| t.name == s.name) {
                return Err(AlgebraError::DuplicateSymbol(s.name.clone()));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn arity(&self, op: usize) -> usize {
        self.symbols[op].arity
    }

    pub fn name(&self, op: usize) -> &str {
        &self.symbols[op].name
    }
}

/// A finite algebra on the universe `0..size`.
///
/// Each table lists the values of its operation on all argument tuples in
/// lexicographic order, the last argument varying fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    signature: Signature,
    tables: Vec<Vec<Elem>>,
}

fn table_len(size: usize, arity: usize) -> Option<usize> {
    let mut len: usize = 1;
    for _ in 0..arity {
        len = len.checked_mul(size)?;
    }
    Some(len)
}

impl FiniteAlgebra {
    pub fn new(
        name: impl Into<String>,
        size: usize,
        operations: Vec<(Symbol, Vec<Elem>)>,
    ) -> Result<Self, AlgebraError> {
        if size == 0 {
            return Err(AlgebraError::EmptyUniverse);
        }
        let (symbols, tables): (Vec<_>, Vec<_>) = operations.into_iter().unzip();
        let signature = Signature::new(symbols)?;
        for (sym, table) in signature.symbols().iter().zip(&tables) {
            let expected = table_len(size, sym.arity)
                .ok_or(AlgebraError::TooLarge(size, sym.arity))?;
            if table.len() != expected {
                return Err(AlgebraError::TableLength {
                    symbol: sym.name.clone(),
                    arity: sym.arity,
                    expected,
                    found: table.len(),
                });
            }
            if let Some((index, &value)) = table
                .iter()
                .enumerate()
                .find(|(_, &v)| v as usize >= size)
            {
                return Err(AlgebraError::EntryOutOfRange {
                    symbol: sym.name.clone(),
                    index,
                    value: value as u64,
                    size,
                });
            }
        }
        Ok(FiniteAlgebra {
            name: name.into(),
            size,
            signature,
            tables,
        })
    }

    /// Builds an algebra by tabulating each operation from a closure.
    pub fn from_fn<F>(
        name: impl Into<String>,
        size: usize,
        symbols: Vec<Symbol>,
        mut f: F,
    ) -> Result<Self, AlgebraError>
    where
        F: FnMut(usize, &[Elem]) -> Elem,
    {
        let mut ops = Vec::with_capacity(symbols.len());
        for (op, sym) in symbols.into_iter().enumerate() {
            let len = table_len(size, sym.arity).ok_or(AlgebraError::TooLarge(size, sym.arity))?;
            if len > MAX_TABLE_LEN {
                return Err(AlgebraError::TooLarge(size, sym.arity));
            }
            let mut table = Vec::with_capacity(len);
            let mut args = vec![0 as Elem; sym.arity];
            for _ in 0..len {
                table.push(f(op, &args));
                next_tuple(&mut args, size);
            }
            ops.push((sym, table));
        }
        FiniteAlgebra::new(name, size, ops)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn table(&self, op: usize) -> &[Elem] {
        &self.tables[op]
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.size as Elem
    }

    /// Applies operation `op` to `args`. Panics on a wrong argument count or
    /// out-of-range arguments.
    #[inline]
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let table = &self.tables[op];
        debug_assert_eq!(args.len(), self.signature.arity(op));
        let mut idx = 0usize;
        for &a in args {
            debug_assert!((a as usize) < self.size);
            idx = idx * self.size + a as usize;
        }
        table[idx]
    }

    /// Same algebra under a different name.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Materializes the direct power `A^m`. The element `(a_0, …, a_{m-1})`
    /// is encoded as `a_0·k^{m-1} + … + a_{m-1}`.
    pub fn direct_power(&self, m: usize) -> Result<FiniteAlgebra, AlgebraError> {
        assert!(m >= 1, "direct power exponent must be positive");
        let size = table_len(self.size, m).ok_or(AlgebraError::TooLarge(self.size, m))?;
        for sym in self.signature.symbols() {
            match table_len(size, sym.arity) {
                Some(len) if len <= MAX_TABLE_LEN => {}
                _ => return Err(AlgebraError::TooLarge(size, sym.arity)),
            }
        }
        let k = self.size;
        let decode = |mut e: Elem| -> Vec<Elem> {
            let mut coords = vec![0; m];
            for c in coords.iter_mut().rev() {
                *c = e % k as Elem;
                e /= k as Elem;
            }
            coords
        };
        let decoded: Vec<Vec<Elem>> = (0..size as Elem).map(decode).collect();
        let name = format!("{}^{}", self.name, m);
        let mut coord_args = Vec::new();
        FiniteAlgebra::from_fn(name, size, self.signature.symbols().to_vec(), |op, args| {
            let mut out: Elem = 0;
            for i in 0..m {
                coord_args.clear();
                coord_args.extend(args.iter().map(|&a| decoded[a as usize][i]));
                out = out * k as Elem + self.apply(op, &coord_args);
            }
            out
        })
    }
}

/// Advances `tuple` to its lexicographic successor over `0..size`, last
/// position fastest. Wraps to all zeros after the last tuple and returns
/// false in that case.
pub fn next_tuple(tuple: &mut [Elem], size: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if (*slot as usize) < size {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Iterates over all tuples of the given length over `0..size` in
/// lexicographic order.
pub fn all_tuples(len: usize, size: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = table_len(size, len).unwrap_or(usize::MAX);
    let mut cur = vec![0 as Elem; len];
    (0..total).map(move |_| {
        let out = cur.clone();
        next_tuple(&mut cur, size);
        out
    })
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (size {}; ", self.name, self.size)?;
        let ops: Vec<String> = self
            .signature
            .symbols()
            .iter()
            .map(|s| format!("{}/{}", s.name, s.arity))
            .collect();
        write!(f, "{})", ops.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn apply_uses_last_argument_fastest() {
        let alg = FiniteAlgebra::new("t", 3, vec![(Symbol::new("f", 2), (0..9).map(|i| i % 3).collect())])
            .unwrap();
        // f(a, b) = (3a + b) mod 3 = b
        assert_eq!(alg.apply(0, &[2, 1]), 1);
        assert_eq!(alg.apply(0, &[1, 0]), 0);
    }

    #[test]
    fn rejects_bad_tables() {
        let err = FiniteAlgebra::new("t", 2, vec![(Symbol::new("+", 2), vec![0, 1, 1])]).unwrap_err();
        assert!(matches!(err, AlgebraError::TableLength { expected: 4, found: 3, .. }));
        let err = FiniteAlgebra::new("t", 2, vec![(Symbol::new("+", 2), vec![0, 1, 2, 0])]).unwrap_err();
        assert!(matches!(err, AlgebraError::EntryOutOfRange { index: 2, value: 2, .. }));
        let err = FiniteAlgebra::new(
            "t",
            2,
            vec![(Symbol::new("f", 0), vec![0]), (Symbol::new("f", 0), vec![1])],
        )
        .unwrap_err();
        assert_eq!(err, AlgebraError::DuplicateSymbol("f".into()));
        assert_eq!(FiniteAlgebra::new("t", 0, vec![]).unwrap_err(), AlgebraError::EmptyUniverse);
        assert!(matches!(
            FiniteAlgebra::new("t", 2, vec![(Symbol::new("a b", 0), vec![0])]),
            Err(AlgebraError::InvalidSymbol(_))
        ));
    }

    #[test]
    fn square_of_group2_is_klein_four() {
        let sq = group2().direct_power(2).unwrap();
        assert_eq!(sq.size(), 4);
        // (0,1) + (1,1) = (1,0); encoded 1 + 3 = 2
        assert_eq!(sq.apply(0, &[1, 3]), 2);
        for a in 0..4 {
            assert_eq!(sq.apply(0, &[a, a]), 0);
            assert_eq!(sq.apply(1, &[a]), a);
        }
        assert_eq!(sq.apply(2, &[]), 0);
    }

    #[test]
    fn tuples_are_lexicographic() {
        let t: Vec<_> = all_tuples(2, 2).collect();
        assert_eq!(t, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(all_tuples(0, 5).count(), 1);
    }
}
