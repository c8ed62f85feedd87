//! Terms over a signature, their evaluation and a prefix-notation syntax.
//!
//! Terms refer to operation symbols by their index in the signature and to
//! variables by their index in a separately declared variable list, so the
//! same term can be evaluated in an algebra and in any of its powers.

use std::fmt;

use thiserror::Error;

use crate::algebra::{is_valid_name, Elem, FiniteAlgebra, Signature};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Op(usize, Vec<Term>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("operation symbol #{0} is not in the signature")]
    UnknownSymbol(usize),
    #[error("operation `{symbol}` takes {expected} arguments, term gives {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("variable #{0} has no assigned value")]
    UnassignedVariable(usize),
    #[error("value {value} assigned to variable #{var} is outside the universe")]
    ValueOutOfRange { var: usize, value: Elem },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("term parse error at column {column}: {message}")]
pub struct TermParseError {
    pub column: usize,
    pub message: String,
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn op(symbol: usize, args: Vec<Term>) -> Term {
        Term::Op(symbol, args)
    }

    /// Evaluates the term bottom-up with variable `i` bound to
    /// `assignment[i]`.
    pub fn eval(&self, alg: &FiniteAlgebra, assignment: &[Elem]) -> Result<Elem, EvalError> {
        self.check_against(alg.signature(), assignment.len())?;
        for (var, &value) in assignment.iter().enumerate() {
            if value as usize >= alg.size() {
                return Err(EvalError::ValueOutOfRange { var, value });
            }
        }
        Ok(self.eval_unchecked(alg, assignment))
    }

    /// Evaluation without validation. The caller guarantees well-formedness.
    pub fn eval_unchecked(&self, alg: &FiniteAlgebra, assignment: &[Elem]) -> Elem {
        match self {
            Term::Var(i) => assignment[*i],
            Term::Op(op, args) => {
                let vals: Vec<Elem> = args.iter().map(|t| t.eval_unchecked(alg, assignment)).collect();
                alg.apply(*op, &vals)
            }
        }
    }

    /// Checks arities against `sig` and that all variables are below `nvars`.
    pub fn check_against(&self, sig: &Signature, nvars: usize) -> Result<(), EvalError> {
        match self {
            Term::Var(i) if *i >= nvars => Err(EvalError::UnassignedVariable(*i)),
            Term::Var(_) => Ok(()),
            Term::Op(op, args) => {
                if *op >= sig.len() {
                    return Err(EvalError::UnknownSymbol(*op));
                }
                if sig.arity(*op) != args.len() {
                    return Err(EvalError::ArityMismatch {
                        symbol: sig.name(*op).to_string(),
                        expected: sig.arity(*op),
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check_against(sig, nvars))
            }
        }
    }

    /// Replaces variable `i` by `subst[i]`.
    pub fn substitute(&self, subst: &[Term]) -> Term {
        match self {
            Term::Var(i) => subst[*i].clone(),
            Term::Op(op, args) => Term::Op(*op, args.iter().map(|a| a.substitute(subst)).collect()),
        }
    }

    /// Renames variable `i` to `map[i]`.
    pub fn rename_vars(&self, map: &[usize]) -> Term {
        match self {
            Term::Var(i) => Term::Var(map[*i]),
            Term::Op(op, args) => Term::Op(*op, args.iter().map(|a| a.rename_vars(map)).collect()),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Term::Var(i) => Some(*i),
            Term::Op(_, args) => args.iter().filter_map(Term::max_var).max(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Op(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature, vars: &'a [String]) -> TermDisplay<'a> {
        TermDisplay {
            term: self,
            sig,
            vars,
        }
    }
}

/// Evaluates `t` in `alg` under `assignment`.
pub fn eval_term(alg: &FiniteAlgebra, t: &Term, assignment: &[Elem]) -> Result<Elem, EvalError> {
    t.eval(alg, assignment)
}

/// Prefix rendering of a term, e.g. `+(x, +(y, z))`.
pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
    vars: &'a [String],
}

impl TermDisplay<'_> {
    fn write(&self, t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match t {
            Term::Var(i) => match self.vars.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "?{}", i),
            },
            Term::Op(op, args) => {
                let name = self.sig.symbols().get(*op).map(|s| s.name.as_str()).unwrap_or("?");
                f.write_str(name)?;
                if args.is_empty() {
                    // bare constants would read back as variables
                    if self.vars.iter().any(|v| v == name) {
                        f.write_str("()")?;
                    }
                    return Ok(());
                }
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    self.write(a, f)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.term, f)
    }
}

/// Parses a term in prefix notation. A name followed by `(` is an operation
/// application; otherwise it is a variable if declared in `vars`, else a
/// nullary symbol.
pub fn parse_term<S: AsRef<str>>(input: &str, sig: &Signature, vars: &[S]) -> Result<Term, TermParseError> {
    let mut p = TermParser {
        src: input,
        pos: 0,
        sig,
        vars: vars.iter().map(|v| v.as_ref()).collect(),
    };
    let t = p.term()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("trailing input after term"));
    }
    Ok(t)
}

struct TermParser<'a> {
    src: &'a str,
    pos: usize,
    sig: &'a Signature,
    vars: Vec<&'a str>,
}

impl<'a> TermParser<'a> {
    fn error(&self, message: impl Into<String>) -> TermParseError {
        TermParseError {
            column: self.src[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn name(&mut self) -> Result<&'a str, TermParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .char_indices()
            .find(|&(_, c)| !is_valid_name(c.encode_utf8(&mut [0; 4])))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected a symbol or variable name"));
        }
        self.pos += len;
        Ok(&self.src[start..start + len])
    }

    fn term(&mut self) -> Result<Term, TermParseError> {
        let name_pos = {
            self.skip_ws();
            self.pos
        };
        let name = self.name()?;
        self.skip_ws();
        if self.peek() == Some('(') {
            self.pos += 1;
            let op = self.sig.index_of(name).ok_or_else(|| {
                self.pos = name_pos;
                self.error(format!("unknown operation symbol `{}`", name))
            })?;
            let mut args = Vec::new();
            self.skip_ws();
            if self.peek() == Some(')') {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("expected `,` or `)`")),
                    }
                }
            }
            let arity = self.sig.arity(op);
            if arity != args.len() {
                self.pos = name_pos;
                return Err(self.error(format!(
                    "operation `{}` takes {} arguments, got {}",
                    name,
                    arity,
                    args.len()
                )));
            }
            return Ok(Term::Op(op, args));
        }
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            return Ok(Term::Var(i));
        }
        match self.sig.index_of(name) {
            Some(op) if self.sig.arity(op) == 0 => Ok(Term::Op(op, Vec::new())),
            Some(op) => {
                self.pos = name_pos;
                Err(self.error(format!(
                    "operation `{}` takes {} arguments, got 0",
                    name,
                    self.sig.arity(op)
                )))
            }
            None => {
                self.pos = name_pos;
                Err(self.error(format!("unknown name `{}`", name)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Symbol;

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

    fn xyz() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    #[test]
    fn evaluates_sum_in_group2() {
        let alg = group2();
        let t = parse_term("+(x, +(y, z))", alg.signature(), &xyz()).unwrap();
        // 1 + (1 + 0) = 0 mod 2
        assert_eq!(eval_term(&alg, &t, &[1, 1, 0]), Ok(0));
        assert_eq!(eval_term(&alg, &Term::var(0), &[1]), Ok(1));
        let zero = parse_term("0", alg.signature(), &xyz()).unwrap();
        assert_eq!(eval_term(&alg, &zero, &[]), Ok(0));
    }

    #[test]
    fn eval_errors_are_distinct() {
        let alg = group2();
        assert_eq!(
            eval_term(&alg, &Term::op(7, vec![]), &[]),
            Err(EvalError::UnknownSymbol(7))
        );
        assert!(matches!(
            eval_term(&alg, &Term::op(0, vec![Term::var(0)]), &[0]),
            Err(EvalError::ArityMismatch { expected: 2, found: 1, .. })
        ));
        assert_eq!(
            eval_term(&alg, &Term::op(1, vec![Term::var(2)]), &[0, 1]),
            Err(EvalError::UnassignedVariable(2))
        );
    }

    #[test]
    fn display_round_trips() {
        let alg = group2();
        let vars = xyz();
        for src in ["+(x, +(y, z))", "-(0)", "x", "+(-(x), 0)"] {
            let t = parse_term(src, alg.signature(), &vars).unwrap();
            assert_eq!(t.display(alg.signature(), &vars).to_string(), src);
        }
        // a constant shadowed by a variable name keeps its parentheses
        let vars0: Vec<String> = vec!["0".into()];
        let t = Term::op(2, vec![]);
        let shown = t.display(alg.signature(), &vars0).to_string();
        assert_eq!(shown, "0()");
        assert_eq!(parse_term(&shown, alg.signature(), &vars0).unwrap(), t);
    }

    #[test]
    fn parse_errors_point_at_column() {
        let alg = group2();
        let err = parse_term("+(x, q)", alg.signature(), &xyz()).unwrap_err();
        assert_eq!(err.column, 6);
        let err = parse_term("+(x)", alg.signature(), &xyz()).unwrap_err();
        assert!(err.message.contains("takes 2"));
        assert!(parse_term("x y", alg.signature(), &xyz()).is_err());
    }

    #[test]
    fn substitution_composes() {
        let alg = group2();
        let vars = xyz();
        let t = parse_term("+(x, z)", alg.signature(), &vars).unwrap();
        let s = t.substitute(&[Term::var(1), Term::var(0), Term::op(2, vec![])]);
        assert_eq!(s.display(alg.signature(), &vars).to_string(), "+(y, 0)");
    }
}
