//! The `bsk` command line.
//!
//! Exit codes: 0 success, 2 bad input or out-of-domain parameters,
//! 3 an internal consistency check failed, 4 an extension could not be
//! resolved (partial data is still printed).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;

use crate::abelian::{normal_form_string, smith_normal_form, FgAbGroup, IntMatrix};
use crate::bc::bc_compare;
use crate::error::{Error, Result};
use crate::json::{
    matrix_from_json, BcReportJson, GroupJson, HomologyJson, KHomologyJson, MatrixJson, PairSummaryJson,
    PvSolutionJson, SnfJson,
};
use crate::presentation::{classifying_space_k, parse, presentation_homology};
use crate::pv::pv_solve;
use crate::solenoid::check_pairing_identities;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_UNRESOLVED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bsk", version, about = "Exact K-theory of crossed products and BS(1,n)")]
pub struct Cli {
    /// Emit JSON instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare K_*(BG) with K_*(C*G) for G = BS(1,n).
    #[command(allow_negative_numbers = true)]
    Bs { n: i64 },
    /// Solve the Pimsner-Voiculescu sequence for a JSON input file.
    Pv { path: PathBuf },
    /// Homology of a one-relator presentation complex.
    Homology { presentation: String },
    /// K-homology of a one-relator presentation complex.
    Khom { presentation: String },
    /// Randomized exact checks of the solenoid pairing.
    #[command(allow_negative_numbers = true)]
    Pair {
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// Smith normal form of an integer matrix given as `[[..],..]` or a file.
    Snf { matrix: String },
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnresolvedExtension { .. } => EXIT_UNRESOLVED,
        Error::Inconsistency(_)
        | Error::StabilizationOverflow(_)
        | Error::DepthExceeded { .. }
        | Error::UnspecifiedTraceValue(_) => EXIT_INVARIANT,
        _ => EXIT_USER,
    }
}

/// ASCII table with a rule under the header row.
pub fn table(rows: &[Vec<String>]) -> String {
    let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let width = |j: usize| {
        rows.iter()
            .filter_map(|r| r.get(j))
            .map(|c| c.chars().count())
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..ncols).map(width).collect();
    let rule = {
        let parts: Vec<String> = widths.iter().map(|w| "-".repeat(w + 2)).collect();
        format!("+{}+\n", parts.join("+"))
    };
    let mut out = rule.clone();
    for (i, r) in rows.iter().enumerate() {
        out.push('|');
        for (j, w) in widths.iter().enumerate() {
            let cell = r.get(j).map_or("", String::as_str);
            let pad = w - cell.chars().count();
            out.push_str(&format!(" {cell}{} |", " ".repeat(pad)));
        }
        out.push('\n');
        if i == 0 {
            out.push_str(&rule);
        }
    }
    if rows.len() > 1 {
        out.push_str(&rule);
    }
    out
}

fn group_row(label: &str, g: &FgAbGroup) -> Vec<String> {
    vec![
        label.to_string(),
        normal_form_string(g.free_rank(), g.torsion()),
        g.to_string(),
    ]
}

fn groups_table(items: &[(&str, &FgAbGroup)]) -> String {
    let mut rows = vec![vec!["group".to_string(), "normal form".into(), "generators".into()]];
    rows.extend(items.iter().map(|(l, g)| group_row(l, g)));
    table(&rows)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

struct Report {
    text: String,
    code: i32,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, code: EXIT_OK }
    }
}

fn run_bs(n: i64, json: bool) -> Result<Report> {
    let r = bc_compare(n)?;
    let code = if r.verdict { EXIT_OK } else { EXIT_INVARIANT };
    let text = if json { to_json(&BcReportJson::from(&r)) } else { r.render() };
    Ok(Report { text, code })
}

fn run_pv(path: &Path, json: bool) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let input = crate::json::parse_kinput(&text)?;
    let sol = pv_solve(&input)?;
    if json {
        return Ok(Report::ok(to_json(&PvSolutionJson::from(&sol))));
    }
    let mut out = groups_table(&[("K_0(A⋊Z)", &sol.k0_crossed), ("K_1(A⋊Z)", &sol.k1_crossed)]);
    let mut rows = vec![vec![
        "class".to_string(),
        "home".into(),
        "element".into(),
        "order".into(),
        "note".into(),
    ]];
    for (sym, e) in sol.ledger_out.entries() {
        let g = sol.crossed(if e.home == crate::pv::Home::Crossed0 { 0 } else { 1 });
        rows.push(vec![
            sym.to_string(),
            e.home.to_string(),
            e.coords.as_ref().map_or("?".into(), |c| g.describe(c)),
            e.order.to_string(),
            e.note.clone().unwrap_or_default(),
        ]);
    }
    out.push('\n');
    out.push_str(&table(&rows));
    for (i, s) in [&sol.seq0, &sol.seq1].into_iter().enumerate() {
        out.push_str(&format!(
            "\ndegree {i}: 0 -> {} -> {} -> {} -> 0{}\n  {}\n",
            s.sub,
            s.middle,
            s.quotient,
            if s.split { " (split)" } else { "" },
            s.section
        ));
    }
    Ok(Report::ok(out))
}

fn run_homology(text: &str, json: bool) -> Result<Report> {
    let h = presentation_homology(&parse(text)?)?;
    Ok(Report::ok(if json {
        to_json(&HomologyJson::from(&h))
    } else {
        groups_table(&[("H_0", &h.h0), ("H_1", &h.h1), ("H_2", &h.h2)])
    }))
}

fn run_khom(text: &str, json: bool) -> Result<Report> {
    let k = classifying_space_k(&parse(text)?)?;
    if json {
        return Ok(Report::ok(to_json(&KHomologyJson::from(&k))));
    }
    let mut out = groups_table(&[("K_0(BG)", &k.k0), ("K_1(BG)", &k.k1)]);
    let mut rows = vec![vec!["class".to_string(), "home".into(), "element".into(), "order".into()]];
    for (sym, e) in k.ledger.entries() {
        let g = if e.home == crate::pv::Home::K0 { &k.k0 } else { &k.k1 };
        rows.push(vec![
            sym.to_string(),
            e.home.to_string(),
            e.coords.as_ref().map_or("?".into(), |c| g.describe(c)),
            e.order.to_string(),
        ]);
    }
    out.push('\n');
    out.push_str(&table(&rows));
    Ok(Report::ok(out))
}

fn run_pair(n: i64, depth: usize, seed: u64, trials: usize, json: bool) -> Result<Report> {
    let t = check_pairing_identities(n, depth, seed, trials)?;
    let code = if t.all_passed() { EXIT_OK } else { EXIT_INVARIANT };
    let summary = PairSummaryJson::new(n, depth, seed, &t);
    let text = if json {
        to_json(&summary)
    } else {
        let mut out = table(&[
            vec![
                "n".into(),
                "depth".into(),
                "seed".into(),
                "checks".into(),
                "passed".into(),
                "skipped".into(),
                "failed".into(),
            ],
            vec![
                n.to_string(),
                depth.to_string(),
                seed.to_string(),
                summary.checks.to_string(),
                summary.passed.to_string(),
                summary.skipped.to_string(),
                summary.failed.to_string(),
            ],
        ]);
        for f in &t.failures {
            out.push_str(&format!("FAIL {f}\n"));
        }
        out
    };
    Ok(Report { text, code })
}

fn parse_matrix(arg: &str) -> Result<IntMatrix> {
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Error::InvalidInput(format!("{arg}: {e}")))?
    };
    let rows: MatrixJson = serde_json::from_str(&text)?;
    let cols = rows.first().map_or(0, Vec::len);
    matrix_from_json(&rows, cols)
}

fn run_snf(arg: &str, json: bool) -> Result<Report> {
    let a = parse_matrix(arg)?;
    let d = smith_normal_form(&a);
    if json {
        return Ok(Report::ok(to_json(&SnfJson::new(&a, &d))));
    }
    let diag: Vec<String> = d.diag.iter().map(BigInt::to_string).collect();
    let mut out = format!("diag: [{}]\nrank: {}\n", diag.join(", "), d.rank());
    out.push_str(&format!("S = {}\nU = {}\nV = {}\n", d.s, d.u, d.v));
    let coker: Vec<BigInt> = d.diag.iter().filter(|x| *x > &BigInt::from(1)).cloned().collect();
    out.push_str(&format!(
        "cokernel: {}\n",
        normal_form_string(a.rows() - d.rank(), &coker)
    ));
    Ok(Report::ok(out))
}

#[derive(Serialize)]
struct ErrorJson {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    partial: Option<PartialJson>,
}

#[derive(Serialize)]
struct PartialJson {
    degree: u8,
    sub: GroupJson,
    quotient: GroupJson,
}

fn error_report(e: &Error, json: bool) -> String {
    let partial = match e {
        Error::UnresolvedExtension { degree, sub, quotient } => Some(PartialJson {
            degree: *degree,
            sub: sub.into(),
            quotient: quotient.into(),
        }),
        _ => None,
    };
    if json {
        return to_json(&ErrorJson {
            error: e.to_string(),
            partial,
        });
    }
    match partial {
        Some(p) => format!(
            "unresolved extension in degree {}: 0 -> {} -> ? -> {} -> 0\n",
            p.degree,
            FgAbGroup::try_from(&p.sub).map(|g| g.to_string()).unwrap_or_default(),
            FgAbGroup::try_from(&p.quotient).map(|g| g.to_string()).unwrap_or_default(),
        ),
        None => String::new(),
    }
}

/// Runs the command line `args` (program name first), writing the report to
/// `out` (or `--out`) and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USER } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let json = cli.json;
    let result = match &cli.command {
        Command::Bs { n } => run_bs(*n, json),
        Command::Pv { path } => run_pv(path, json),
        Command::Homology { presentation } => run_homology(presentation, json),
        Command::Khom { presentation } => run_khom(presentation, json),
        Command::Pair {
            n,
            depth,
            seed,
            trials,
        } => run_pair(*n, *depth, *seed, *trials, json),
        Command::Snf { matrix } => run_snf(matrix, json),
    };
    let (text, code) = match result {
        Ok(r) => (r.text, r.code),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            (error_report(&e, json), exit_code(&e))
        }
    };
    if text.is_empty() {
        return code;
    }
    match &cli.out {
        Some(p) => {
            if let Err(e) = fs::write(p, &text) {
                let _ = writeln!(err, "error: {}: {e}", p.display());
                return EXIT_USER;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    code
}
