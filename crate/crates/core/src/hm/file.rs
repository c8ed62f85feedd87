//! Witness files.
//!
//! The line form:
//!
//! ```text
//! algebra: imp2
//! kind: ternary
//! n: 3
//! w1 = ->(->(z, y), x)
//! w2 = ->(->(x, y), z)
//! ```
//!
//! Ternary terms use the variables `x, y, z` and are named `w1 … w{n-1}`;
//! `(n+1)`-ary terms use `x0 … xn` and are named `v0 … vn`. Blank lines and
//! `#` comments are ignored.
//!
//! The TOML form carries the same data as `algebra`, `kind`, `n`,
//! `variables` and `terms` keys. [`parse_witness`] accepts either.

use std::fmt::Write as _;

use serde::Deserialize;
use toml::Spanned;

use super::{nary_var_names, ternary_var_names, HmError, HmWitness, NaryWitness};
use crate::algebra::FiniteAlgebra;
use crate::format::{line_of, toml_string, FormatError};
use crate::term::{parse_term, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessForm {
    Ternary(HmWitness),
    Nary(NaryWitness),
}

impl WitnessForm {
    pub fn n(&self) -> usize {
        match self {
            WitnessForm::Ternary(w) => w.n(),
            WitnessForm::Nary(v) => v.n(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            WitnessForm::Ternary(_) => "ternary",
            WitnessForm::Nary(_) => "nary",
        }
    }

    pub fn terms(&self) -> &[Term] {
        match self {
            WitnessForm::Ternary(w) => w.terms(),
            WitnessForm::Nary(v) => v.terms(),
        }
    }

    fn variables(&self) -> Vec<String> {
        match self {
            WitnessForm::Ternary(_) => ternary_var_names(),
            WitnessForm::Nary(v) => nary_var_names(v.n()),
        }
    }

    /// Name of the `j`-th term in the file.
    fn term_name(&self, j: usize) -> String {
        match self {
            WitnessForm::Ternary(_) => format!("w{}", j + 1),
            WitnessForm::Nary(_) => format!("v{}", j),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessFile {
    pub algebra: String,
    pub form: WitnessForm,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Ternary,
    Nary,
}

fn parse_kind(s: &str) -> Option<Kind> {
    match s {
        "ternary" => Some(Kind::Ternary),
        "nary" => Some(Kind::Nary),
        _ => None,
    }
}

fn build(kind: Kind, n: usize, terms: Vec<Term>) -> Result<WitnessForm, HmError> {
    Ok(match kind {
        Kind::Ternary => WitnessForm::Ternary(HmWitness::new(n, terms)?),
        Kind::Nary => WitnessForm::Nary(NaryWitness::new(n, terms)?),
    })
}

fn default_vars(kind: Kind, n: usize) -> Vec<String> {
    match kind {
        Kind::Ternary => ternary_var_names(),
        Kind::Nary => nary_var_names(n),
    }
}

fn check_name(alg: &FiniteAlgebra, name: &str, line: usize) -> Result<(), FormatError> {
    if name != alg.name() {
        return Err(FormatError::new(
            line,
            format!("witness is for algebra `{}`, not `{}`", name, alg.name()),
        ));
    }
    Ok(())
}

/// Parses a witness in either form and checks that it names `alg` and fits
/// its signature. Does not check the identities.
pub fn parse_witness(src: &str, alg: &FiniteAlgebra) -> Result<WitnessFile, FormatError> {
    let first = src
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    match first {
        Some(l) if l.starts_with("algebra:") => parse_lines(src, alg),
        Some(_) => parse_toml(src, alg),
        None => Err(FormatError::new(1, "empty witness file")),
    }
}

fn parse_lines(src: &str, alg: &FiniteAlgebra) -> Result<WitnessFile, FormatError> {
    let mut algebra: Option<String> = None;
    let mut kind: Option<Kind> = None;
    let mut n: Option<usize> = None;
    let mut terms: Vec<(usize, Term)> = Vec::new();
    let mut last_line = 1;

    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        if let Some((key, value)) = text.split_once('=') {
            let (key, value) = (key.trim(), value.trim());
            let (Some(kind), Some(n)) = (kind, n) else {
                return Err(FormatError::new(line, "term before the `kind:` and `n:` headers"));
            };
            let (prefix, expected) = match kind {
                Kind::Ternary => ('w', terms.len() + 1),
                Kind::Nary => ('v', terms.len()),
            };
            if key != format!("{}{}", prefix, expected) {
                return Err(FormatError::new(
                    line,
                    format!("expected term `{}{}`, found `{}`", prefix, expected, key),
                ));
            }
            let vars = default_vars(kind, n);
            let t = parse_term(value, alg.signature(), &vars)
                .map_err(|e| FormatError::new(line, format!("{}: {}", key, e)))?;
            terms.push((line, t));
        } else if let Some((key, value)) = text.split_once(':') {
            let value = value.trim();
            match key.trim() {
                "algebra" => {
                    check_name(alg, value, line)?;
                    algebra = Some(value.to_string());
                }
                "kind" => {
                    kind = Some(parse_kind(value).ok_or_else(|| {
                        FormatError::new(line, format!("unknown kind `{}` (ternary or nary)", value))
                    })?);
                }
                "n" => {
                    let v: usize = value
                        .parse()
                        .map_err(|_| FormatError::new(line, format!("invalid n `{}`", value)))?;
                    if v < 2 {
                        return Err(FormatError::new(line, format!("n must be at least 2, got {}", v)));
                    }
                    n = Some(v);
                }
                other => return Err(FormatError::new(line, format!("unknown header `{}`", other))),
            }
        } else {
            return Err(FormatError::new(line, format!("cannot parse `{}`", text)));
        }
    }

    let algebra = algebra.ok_or_else(|| FormatError::new(1, "missing `algebra:` header"))?;
    let kind = kind.ok_or_else(|| FormatError::new(1, "missing `kind:` header"))?;
    let n = n.ok_or_else(|| FormatError::new(1, "missing `n:` header"))?;
    let terms: Vec<Term> = terms.into_iter().map(|(_, t)| t).collect();
    let form = build(kind, n, terms).map_err(|e| FormatError::new(last_line, e.to_string()))?;
    Ok(WitnessFile { algebra, form })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWitness {
    algebra: Spanned<String>,
    kind: Spanned<String>,
    n: Spanned<i64>,
    variables: Option<Spanned<Vec<String>>>,
    terms: Spanned<Vec<Spanned<String>>>,
}

fn parse_toml(src: &str, alg: &FiniteAlgebra) -> Result<WitnessFile, FormatError> {
    let raw: RawWitness = toml::from_str(src).map_err(|e| FormatError::from_toml(src, e))?;
    check_name(alg, raw.algebra.get_ref(), line_of(src, raw.algebra.span().start))?;
    let kind = parse_kind(raw.kind.get_ref()).ok_or_else(|| {
        FormatError::at(src, raw.kind.span(), format!("unknown kind `{}`", raw.kind.get_ref()))
    })?;
    let n = *raw.n.get_ref();
    if n < 2 {
        return Err(FormatError::at(src, raw.n.span(), format!("n must be at least 2, got {}", n)));
    }
    let n = n as usize;
    let vars = match &raw.variables {
        None => default_vars(kind, n),
        Some(v) => {
            let expected = default_vars(kind, n).len();
            if v.get_ref().len() != expected {
                return Err(FormatError::at(
                    src,
                    v.span(),
                    format!("expected {} variable names, found {}", expected, v.get_ref().len()),
                ));
            }
            v.get_ref().clone()
        }
    };
    let mut terms = Vec::new();
    for t in raw.terms.get_ref() {
        let parsed = parse_term(t.get_ref(), alg.signature(), &vars)
            .map_err(|e| FormatError::at(src, t.span(), e.to_string()))?;
        terms.push(parsed);
    }
    let form = build(kind, n, terms).map_err(|e| FormatError::at(src, raw.terms.span(), e.to_string()))?;
    Ok(WitnessFile {
        algebra: raw.algebra.into_inner(),
        form,
    })
}

/// Renders the line form.
pub fn render_witness(alg: &FiniteAlgebra, form: &WitnessForm) -> String {
    let mut out = String::new();
    writeln!(out, "algebra: {}", alg.name()).unwrap();
    writeln!(out, "kind: {}", form.kind()).unwrap();
    writeln!(out, "n: {}", form.n()).unwrap();
    let vars = form.variables();
    for (j, t) in form.terms().iter().enumerate() {
        writeln!(out, "{} = {}", form.term_name(j), t.display(alg.signature(), &vars)).unwrap();
    }
    out
}

/// Renders the TOML form.
pub fn render_witness_toml(alg: &FiniteAlgebra, form: &WitnessForm) -> String {
    let mut out = String::new();
    writeln!(out, "algebra = {}", toml_string(alg.name())).unwrap();
    writeln!(out, "kind = \"{}\"", form.kind()).unwrap();
    writeln!(out, "n = {}", form.n()).unwrap();
    let vars = form.variables();
    let quoted: Vec<String> = vars.iter().map(|v| toml_string(v)).collect();
    writeln!(out, "variables = [{}]", quoted.join(", ")).unwrap();
    out.push_str("terms = [\n");
    for t in form.terms() {
        writeln!(out, "  {},", toml_string(&t.display(alg.signature(), &vars).to_string())).unwrap();
    }
    out.push_str("]\n");
    out
}
