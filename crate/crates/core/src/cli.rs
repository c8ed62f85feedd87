//! Command-line front end.
//!
//! Exit codes: 0 when the property holds or a witness is found, 1 when it
//! fails or no witness exists, 2 on input or budget errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::chain::{hm3_equivalence_report, ChainError, Sampling};
use crate::congruence::{
    all_congruences, default_max_degree, permutability_degree, principal_congruence, Congruence, CongruenceError,
    Degree,
};
use crate::format::{read_algebra, FormatError};
use crate::hm::{
    hm_search, min_degree, nary_to_ternary, parse_witness, render_witness, render_witness_toml, ternary_to_nary,
    verify_hm, verify_nary, HmError, MinDegree, WitnessForm,
};
use crate::relation::{alternating, compose, leq, rel_power, BinRel, RelError};
use crate::relcheck::{
    check_reflexive_char, compatible_reflexive_closure, is_compatible, lemma43_check, rts_symmetry_check, CheckError,
    DEFAULT_ENUM_BUDGET,
};
use crate::subpower::DEFAULT_CLOSURE_BUDGET;

/// Seed used by `--samples` when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "nperm", version, about = "Congruence n-permutability toolkit for finite algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Algebra files
    #[command(subcommand)]
    Alg(AlgCommand),
    /// Hagemann–Mitschke terms
    #[command(subcommand)]
    Terms(TermsCommand),
    /// Congruences
    #[command(subcommand)]
    Cong(CongCommand),
    /// Binary relations on the universe of an algebra
    #[command(subcommand)]
    Rel(RelCommand),
    /// Cross-checks of the relational characterizations
    #[command(subcommand)]
    Xcheck(XcheckCommand),
}

#[derive(Subcommand, Debug)]
enum AlgCommand {
    /// Parse and validate an algebra file
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Toml,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Nary,
    Ternary,
}

#[derive(Args, Debug)]
struct ClosureOpts {
    /// Maximum number of elements of the pattern subpower
    #[arg(long, default_value_t = DEFAULT_CLOSURE_BUDGET)]
    max_closure: usize,
}

#[derive(Subcommand, Debug)]
enum TermsCommand {
    /// Search for terms w1 … w(n-1)
    Find {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        closure: ClosureOpts,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        file: PathBuf,
    },
    /// Least n admitting terms
    Mindegree {
        #[command(flatten)]
        closure: ClosureOpts,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        file: PathBuf,
    },
    /// Check a witness file exhaustively
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        witness: PathBuf,
        file: PathBuf,
    },
    /// Convert a witness between the ternary and (n+1)-ary forms
    Convert {
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        file: PathBuf,
    },
}

#[derive(Args, Debug)]
struct BudgetOpts {
    /// Maximum number of relations to enumerate
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: usize,
}

#[derive(Subcommand, Debug)]
enum CongCommand {
    /// List all congruences as c0, c1, … (finest first) and name the
    /// principal ones
    List {
        #[command(flatten)]
        budget: BudgetOpts,
        file: PathBuf,
    },
    /// Least n with (L,R)_n = (R,L)_n; congruences are named `c<i>` or
    /// `cg(a,b)`
    Degree {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        max: Option<usize>,
        #[command(flatten)]
        budget: BudgetOpts,
        file: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum RelCommand {
    /// R then S
    Compose {
        #[arg(long = "r")]
        r: String,
        #[arg(long = "s")]
        s: String,
        file: PathBuf,
    },
    /// (R,S)_n
    Alt {
        #[arg(long = "r")]
        r: String,
        #[arg(long = "s")]
        s: String,
        #[arg(long)]
        n: usize,
        file: PathBuf,
    },
    /// R^n
    Power {
        #[arg(long = "r")]
        r: String,
        #[arg(long)]
        n: usize,
        file: PathBuf,
    },
    /// Least reflexive compatible relation containing the pairs
    Closure {
        #[arg(long)]
        pairs: String,
        file: PathBuf,
    },
    /// Properties of R; with --n, whether (R,R^op)_(n-1) is transitive
    Check {
        #[arg(long = "r")]
        r: String,
        #[arg(long)]
        n: Option<usize>,
        file: PathBuf,
    },
    /// Whether R ≤ S
    Leq {
        #[arg(long = "r")]
        r: String,
        #[arg(long = "s")]
        s: String,
        file: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum XcheckCommand {
    /// R^op ≤ R^(n-1) and R^n ≤ R^(n-1) for compatible reflexive R
    Hm3 {
        #[arg(long)]
        n: usize,
        /// Sample this many relations instead of enumerating all of them
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Pairs per random generating set
        #[arg(long, default_value_t = 3)]
        max_generators: usize,
        #[command(flatten)]
        budget: BudgetOpts,
        #[command(flatten)]
        closure: ClosureOpts,
        file: PathBuf,
    },
    /// Compatible reflexive transitive relations and their symmetry
    Rts {
        #[command(flatten)]
        budget: BudgetOpts,
        file: PathBuf,
    },
    /// (R,S)_(2n-2) ≤ (S,R)_(2n) ≤ (S,R)_(2n-2) for all congruence pairs
    Lemma43 {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        budget: BudgetOpts,
        file: PathBuf,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{}:{}: {}", .path.display(), .err.line, .err.message)]
    Format { path: PathBuf, err: FormatError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Hm(#[from] HmError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Relation(#[from] RelError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Whether the checked property held.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Holds,
    Fails,
}

impl Outcome {
    fn from_bool(b: bool) -> Self {
        if b {
            Outcome::Holds
        } else {
            Outcome::Fails
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Results go to `out`, diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(Outcome::Holds) => 0,
        Ok(Outcome::Fails) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            2
        }
    }
}

fn load(path: &Path) -> Result<FiniteAlgebra, CliError> {
    read_algebra(path).map_err(|err| CliError::Format {
        path: path.to_path_buf(),
        err,
    })
}

fn rel(alg: &FiniteAlgebra, literal: &str) -> Result<BinRel, CliError> {
    Ok(BinRel::parse(alg.size(), literal)?)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match cmd {
        Command::Alg(AlgCommand::Validate { file }) => {
            let alg = load(&file)?;
            writeln!(
                out,
                "ok: {} (size {}, {} operations)",
                alg.name(),
                alg.size(),
                alg.signature().len()
            )?;
            Ok(Outcome::Holds)
        }
        Command::Terms(t) => terms(t, out),
        Command::Cong(c) => cong(c, out),
        Command::Rel(r) => relations(r, out),
        Command::Xcheck(x) => xcheck(x, out),
    }
}

fn render(alg: &FiniteAlgebra, form: &WitnessForm, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => render_witness(alg, form),
        OutputFormat::Toml => render_witness_toml(alg, form),
    }
}

fn read_witness(path: &Path, alg: &FiniteAlgebra) -> Result<WitnessForm, CliError> {
    let src = fs::read_to_string(path).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        err: FormatError::new(0, format!("cannot read: {}", e)),
    })?;
    let file = parse_witness(&src, alg).map_err(|err| CliError::Format {
        path: path.to_path_buf(),
        err,
    })?;
    Ok(file.form)
}

fn terms(cmd: TermsCommand, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match cmd {
        TermsCommand::Find {
            n,
            closure,
            format,
            file,
        } => {
            let alg = load(&file)?;
            match hm_search(&alg, n, closure.max_closure)? {
                Some(w) => {
                    write!(out, "{}", render(&alg, &WitnessForm::Ternary(w), format))?;
                    Ok(Outcome::Holds)
                }
                None => {
                    writeln!(out, "none")?;
                    Ok(Outcome::Fails)
                }
            }
        }
        TermsCommand::Mindegree { closure, format, file } => {
            let alg = load(&file)?;
            match min_degree(&alg, closure.max_closure)? {
                MinDegree::Degree(w) => {
                    writeln!(out, "min degree: {}", w.n())?;
                    write!(out, "{}", render(&alg, &WitnessForm::Ternary(w), format))?;
                    Ok(Outcome::Holds)
                }
                MinDegree::NotPermutable => {
                    writeln!(out, "not n-permutable for any n")?;
                    Ok(Outcome::Fails)
                }
            }
        }
        TermsCommand::Verify { n, witness, file } => {
            let alg = load(&file)?;
            let form = read_witness(&witness, &alg)?;
            if form.n() != n {
                return Err(CliError::Usage(format!(
                    "witness file is for n = {}, but --n is {}",
                    form.n(),
                    n
                )));
            }
            let v = match &form {
                WitnessForm::Ternary(w) => verify_hm(&alg, w.terms(), n)?,
                WitnessForm::Nary(w) => verify_nary(&alg, w.terms(), n)?,
            };
            for c in &v.checks {
                writeln!(out, "{}", c)?;
            }
            writeln!(out, "verdict: {}", if v.passed() { "pass" } else { "FAIL" })?;
            Ok(Outcome::from_bool(v.passed()))
        }
        TermsCommand::Convert {
            to,
            witness,
            format,
            file,
        } => {
            let alg = load(&file)?;
            let form = read_witness(&witness, &alg)?;
            // conversions re-verify, so an invalid input surfaces here
            let converted = match (form, to) {
                (WitnessForm::Ternary(w), Target::Nary) => WitnessForm::Nary(ternary_to_nary(&alg, &w)?),
                (WitnessForm::Nary(v), Target::Ternary) => WitnessForm::Ternary(nary_to_ternary(&alg, &v)?),
                (WitnessForm::Ternary(w), Target::Ternary) => {
                    nary_to_ternary(&alg, &ternary_to_nary(&alg, &w)?)?;
                    WitnessForm::Ternary(w)
                }
                (WitnessForm::Nary(v), Target::Nary) => {
                    ternary_to_nary(&alg, &nary_to_ternary(&alg, &v)?)?;
                    WitnessForm::Nary(v)
                }
            };
            write!(out, "{}", render(&alg, &converted, format))?;
            Ok(Outcome::Holds)
        }
    }
}

/// Resolves `c<i>` (index into the listing) or `cg(a,b)`.
fn congruence_by_name(alg: &FiniteAlgebra, list: &[Congruence], name: &str) -> Result<Congruence, CliError> {
    let name = name.trim();
    if let Some(idx) = name.strip_prefix('c').and_then(|s| s.parse::<usize>().ok()) {
        return list.get(idx).cloned().ok_or_else(|| {
            CliError::Usage(format!("no congruence `{}`: there are {} (c0 to c{})", name, list.len(), list.len() - 1))
        });
    }
    if let Some(inner) = name.strip_prefix("cg(").and_then(|s| s.strip_suffix(')')) {
        if let Some((a, b)) = inner.split_once(',') {
            if let (Ok(a), Ok(b)) = (a.trim().parse::<Elem>(), b.trim().parse::<Elem>()) {
                return Ok(principal_congruence(alg, a, b)?);
            }
        }
    }
    Err(CliError::Usage(format!("cannot parse congruence name `{}` (use c<i> or cg(a,b))", name)))
}

fn cong_label(list: &[Congruence], c: &Congruence) -> String {
    match list.iter().position(|x| x == c) {
        Some(i) => format!("c{}", i),
        None => c.to_string(),
    }
}

fn cong(cmd: CongCommand, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match cmd {
        CongCommand::List { budget, file } => {
            let alg = load(&file)?;
            let list = all_congruences(&alg, budget.budget)?;
            writeln!(out, "congruences: {}", list.len())?;
            for (i, c) in list.iter().enumerate() {
                writeln!(out, "c{} = {}", i, c)?;
            }
            let k = alg.size() as Elem;
            for a in 0..k {
                for b in a + 1..k {
                    let p = principal_congruence(&alg, a, b)?;
                    writeln!(out, "cg({},{}) = {}", a, b, cong_label(&list, &p))?;
                }
            }
            Ok(Outcome::Holds)
        }
        CongCommand::Degree {
            left,
            right,
            max,
            budget,
            file,
        } => {
            let alg = load(&file)?;
            let list = all_congruences(&alg, budget.budget)?;
            let l = congruence_by_name(&alg, &list, &left)?;
            let r = congruence_by_name(&alg, &list, &right)?;
            let max = max.unwrap_or_else(|| default_max_degree(alg.size()));
            let d = permutability_degree(&l, &r, max);
            writeln!(out, "degree: {}", d)?;
            Ok(Outcome::from_bool(matches!(d, Degree::Exact(_))))
        }
    }
}

fn relations(cmd: RelCommand, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match cmd {
        RelCommand::Compose { r, s, file } => {
            let alg = load(&file)?;
            writeln!(out, "{}", compose(&rel(&alg, &r)?, &rel(&alg, &s)?)?)?;
            Ok(Outcome::Holds)
        }
        RelCommand::Alt { r, s, n, file } => {
            let alg = load(&file)?;
            writeln!(out, "{}", alternating(&rel(&alg, &r)?, &rel(&alg, &s)?, n)?)?;
            Ok(Outcome::Holds)
        }
        RelCommand::Power { r, n, file } => {
            let alg = load(&file)?;
            writeln!(out, "{}", rel_power(&rel(&alg, &r)?, n)?)?;
            Ok(Outcome::Holds)
        }
        RelCommand::Closure { pairs, file } => {
            let alg = load(&file)?;
            let given = rel(&alg, &pairs)?;
            let pairs: Vec<(Elem, Elem)> = given.pairs().map(|(a, b)| (a as Elem, b as Elem)).collect();
            writeln!(out, "{}", compatible_reflexive_closure(&alg, &pairs)?)?;
            Ok(Outcome::Holds)
        }
        RelCommand::Check { r, n, file } => {
            let alg = load(&file)?;
            let r = rel(&alg, &r)?;
            writeln!(out, "reflexive: {}", yes_no(r.is_reflexive()))?;
            writeln!(out, "symmetric: {}", yes_no(r.is_symmetric()))?;
            writeln!(out, "transitive: {}", yes_no(r.is_transitive()))?;
            writeln!(out, "compatible: {}", yes_no(is_compatible(&alg, &r)?))?;
            match n {
                None => Ok(Outcome::Holds),
                Some(n) => {
                    let ok = check_reflexive_char(&alg, n, &r)?;
                    writeln!(
                        out,
                        "(R,R^op)_{} transitive: {}",
                        n - 1,
                        yes_no(ok)
                    )?;
                    Ok(Outcome::from_bool(ok))
                }
            }
        }
        RelCommand::Leq { r, s, file } => {
            let alg = load(&file)?;
            let ok = leq(&rel(&alg, &r)?, &rel(&alg, &s)?)?;
            writeln!(out, "R <= S: {}", yes_no(ok))?;
            Ok(Outcome::from_bool(ok))
        }
    }
}

fn xcheck(cmd: XcheckCommand, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match cmd {
        XcheckCommand::Hm3 {
            n,
            samples,
            seed,
            max_generators,
            budget,
            closure,
            file,
        } => {
            let alg = load(&file)?;
            let sampling = match samples {
                None => Sampling::Exhaustive { budget: budget.budget },
                Some(count) => Sampling::Random {
                    count,
                    seed,
                    max_generators,
                },
            };
            let report = hm3_equivalence_report(&alg, n, &sampling, closure.max_closure)?;
            writeln!(out, "{}", report)?;
            Ok(Outcome::from_bool(report.holds()))
        }
        XcheckCommand::Rts { budget, file } => {
            let alg = load(&file)?;
            let report = rts_symmetry_check(&alg, budget.budget)?;
            for e in &report.entries {
                writeln!(out, "{}  {}", e.relation, if e.symmetric { "symmetric" } else { "ASYMMETRIC" })?;
            }
            let asym = report.asymmetric().count();
            writeln!(
                out,
                "compatible reflexive transitive relations: {}, asymmetric: {}",
                report.entries.len(),
                asym
            )?;
            Ok(Outcome::from_bool(asym == 0))
        }
        XcheckCommand::Lemma43 { n, budget, file } => {
            let alg = load(&file)?;
            let list = all_congruences(&alg, budget.budget)?;
            let mut ok = true;
            for (i, r) in list.iter().enumerate() {
                for (j, s) in list.iter().enumerate() {
                    let rep = lemma43_check(&r.to_binrel(), &s.to_binrel(), n)?;
                    // the collapse forces permutability; a violation of that
                    // or of the padding inclusion refutes the lemma
                    let consistent = rep.padding_inclusion && (!rep.collapse_inclusion || rep.permutes);
                    ok &= consistent;
                    writeln!(
                        out,
                        "c{} c{}: (R,S)_{m} <= (S,R)_{l}: {}  (S,R)_{l} <= (S,R)_{m}: {}  (R,S)_{m} <= (S,R)_{m}: {}",
                        i,
                        j,
                        yes_no(rep.padding_inclusion),
                        yes_no(rep.collapse_inclusion),
                        yes_no(rep.permutes),
                        m = 2 * n - 2,
                        l = 2 * n,
                    )?;
                }
            }
            writeln!(out, "verdict: {}", if ok { "holds" } else { "fails" })?;
            Ok(Outcome::from_bool(ok))
        }
    }
}
