//! Text format for algebra files.
//!
//! An algebra file is a TOML document:
//!
//! ```toml
//! name = "group2"
//! size = 2
//!
//! [[operations]]
//! symbol = "+"
//! arity = 2
//! table = [0, 1, 1, 0]
//! ```
//!
//! Tables are flat, in lexicographic argument order with the last argument
//! varying fastest. Diagnostics carry the 1-based line of the offending
//! value.

use std::fmt::Write as _;
use std::ops::Range;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::algebra::{is_valid_name, Elem, FiniteAlgebra, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        FormatError {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn at(src: &str, span: Range<usize>, message: impl Into<String>) -> Self {
        FormatError::new(line_of(src, span.start), message)
    }

    pub(crate) fn from_toml(src: &str, err: toml::de::Error) -> Self {
        let line = err.span().map(|s| line_of(src, s.start)).unwrap_or(1);
        FormatError::new(line, err.message().trim().to_string())
    }
}

/// 1-based line number of a byte offset.
pub(crate) fn line_of(src: &str, offset: usize) -> usize {
    let offset = offset.min(src.len());
    src.as_bytes()[..offset].iter().filter(|&&b| b == b'\n').count() + 1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    name: Spanned<String>,
    size: Spanned<i64>,
    #[serde(default)]
    operations: Vec<RawOperation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperation {
    symbol: Spanned<String>,
    arity: Spanned<i64>,
    table: Spanned<Vec<Spanned<i64>>>,
}

/// Parses and validates an algebra file.
pub fn parse_algebra(src: &str) -> Result<FiniteAlgebra, FormatError> {
    let raw: RawAlgebra = toml::from_str(src).map_err(|e| FormatError::from_toml(src, e))?;

    let name = raw.name.get_ref();
    if name.trim().is_empty() {
        return Err(FormatError::at(src, raw.name.span(), "algebra name must be nonempty"));
    }
    let size = *raw.size.get_ref();
    if size < 1 {
        return Err(FormatError::at(src, raw.size.span(), format!("size must be positive, found {}", size)));
    }
    if size > u32::MAX as i64 {
        return Err(FormatError::at(src, raw.size.span(), format!("size {} is too large", size)));
    }
    let size = size as usize;

    let mut ops = Vec::with_capacity(raw.operations.len());
    for (i, op) in raw.operations.iter().enumerate() {
        let symbol = op.symbol.get_ref();
        if !is_valid_name(symbol) {
            return Err(FormatError::at(
                src,
                op.symbol.span(),
                format!("invalid operation symbol `{}`", symbol),
            ));
        }
        if raw.operations[..i].iter().any(|o| o.symbol.get_ref() == symbol) {
            return Err(FormatError::at(
                src,
                op.symbol.span(),
                format!("duplicate operation symbol `{}`", symbol),
            ));
        }
        let arity = *op.arity.get_ref();
        if !(0..=16).contains(&arity) {
            return Err(FormatError::at(
                src,
                op.arity.span(),
                format!("operation `{}`: arity {} is out of range", symbol, arity),
            ));
        }
        let arity = arity as usize;
        let expected = (0..arity).try_fold(1usize, |acc, _| acc.checked_mul(size));
        let table = op.table.get_ref();
        match expected {
            Some(expected) if table.len() == expected => {}
            Some(expected) => {
                return Err(FormatError::at(
                    src,
                    op.table.span(),
                    format!(
                        "operation `{}`: table has {} entries, expected {} (size {} to the power {})",
                        symbol,
                        table.len(),
                        expected,
                        size,
                        arity
                    ),
                ))
            }
            None => {
                return Err(FormatError::at(
                    src,
                    op.arity.span(),
                    format!("operation `{}`: table of size {}^{} is too large", symbol, size, arity),
                ))
            }
        }
        let mut values = Vec::with_capacity(table.len());
        for (idx, entry) in table.iter().enumerate() {
            let v = *entry.get_ref();
            if v < 0 || v >= size as i64 {
                return Err(FormatError::at(
                    src,
                    entry.span(),
                    format!(
                        "operation `{}`: table entry {} is {}, outside the universe 0..{}",
                        symbol, idx, v, size
                    ),
                ));
            }
            values.push(v as Elem);
        }
        ops.push((Symbol::new(symbol.clone(), arity), values));
    }

    FiniteAlgebra::new(name.clone(), size, ops).map_err(|e| FormatError::new(1, e.to_string()))
}

/// Reads an algebra file from disk.
pub fn read_algebra(path: &std::path::Path) -> Result<FiniteAlgebra, FormatError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| FormatError::new(0, format!("cannot read {}: {}", path.display(), e)))?;
    parse_algebra(&src)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub(crate) fn toml_string(s: &str) -> String {
    quote(s)
}

/// Renders an algebra in the file format. `parse_algebra` inverts it.
pub fn write_algebra(alg: &FiniteAlgebra) -> String {
    let mut out = String::new();
    writeln!(out, "name = {}", quote(alg.name())).unwrap();
    writeln!(out, "size = {}", alg.size()).unwrap();
    for (op, sym) in alg.signature().symbols().iter().enumerate() {
        out.push('\n');
        out.push_str("[[operations]]\n");
        writeln!(out, "symbol = {}", quote(&sym.name)).unwrap();
        writeln!(out, "arity = {}", sym.arity).unwrap();
        let entries: Vec<String> = alg.table(op).iter().map(|v| v.to_string()).collect();
        writeln!(out, "table = [{}]", entries.join(", ")).unwrap();
    }
    out
}
