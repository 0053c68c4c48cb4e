//! `gapbal`: batch command-line front end for the gap-balancing library.
//!
//! Every subcommand prints to stdout in text, JSON, or CSV. JSON output is
//! wrapped in a schema-versioned envelope with all numbers rendered as
//! decimal strings. Exit codes: 0 success, 2 usage, 3 data mismatch,
//! 4 internal invariant violation.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use gap_balancing::classes::{classes_for, BalancingClass};
use gap_balancing::identities::{
    check_cassini, check_mixed_limits, check_ratio_limits, check_recurrences, sequence_rows,
    IdentityReport, SequenceRows, DEFAULT_PRECISION,
};
use gap_balancing::oeis::{
    cross_check, load_fixture, parse_bfile, to_bfile_text, DEFAULT_URL_TEMPLATE, URL_TEMPLATE_ENV,
};
use gap_balancing::pairs::verify_triangular_identity;
use gap_balancing::series::{class_genfun, interleaved_genfun, Poly, RationalFunction};
use gap_balancing::survey::{check_conjecture, table1};
use gap_balancing::transitions::{
    check_conjugate_symmetry, conjugate_class_indices, derive_balancer_transition,
    derive_transition, MapKind, TransitionMap,
};
use gap_balancing::{Error, GapContext, Rational};

const SCHEMA_VERSION: u32 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "gapbal",
    version,
    about = "Exact computations with classes of upper k-gap balancing numbers"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for sweeps (env fallback GAPBAL_JOBS)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Seeds, conjugate pairing, and initial pairs of every class of k
    Seeds {
        #[arg(long)]
        k: u64,
    },
    /// Terms of one class and its companion sequences
    Class {
        #[arg(long)]
        k: u64,
        /// Class index (classes ordered by ascending initial B)
        #[arg(long)]
        index: usize,
        #[arg(long, default_value_t = 10)]
        terms: usize,
        /// Comma-separated subset of B,C,m,r,rhat
        #[arg(long, default_value = "B,C,m,r,rhat")]
        fields: String,
    },
    /// The full reference table for k = 9, asterisks and all
    Table2,
    /// Run the identity and limit suite over every class of k
    Verify {
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 30)]
        terms: usize,
        /// Working precision for limit checks, decimal digits
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        digits: u32,
    },
    /// Transition maps between two classes (balancing and balancer sides)
    Transition {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        /// Index shift applied to the target class
        #[arg(long, default_value_t = 0)]
        offset: usize,
    },
    /// Generating function of one class, or the interleaved one for all
    Genfun {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        class: Option<usize>,
        /// Number of series coefficients to expand
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Compare class counts against divisor counts of |2k^2 - 1|
    Conjecture {
        #[arg(long, default_value_t = 0)]
        k_min: u64,
        #[arg(long)]
        k_max: u64,
    },
    /// Smallest k attaining each observed class count
    Table1 {
        #[arg(long)]
        k_max: u64,
    },
    /// Check generated sequences against committed OEIS fixtures
    OeisCheck {
        /// A-number, or "all" for every known sequence
        #[arg(long)]
        id: String,
        /// Fixture directory (env fallback GAPBAL_FIXTURES)
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        terms: usize,
        /// Alignment search window
        #[arg(long, default_value_t = 5)]
        window: usize,
    },
    /// Fetch a b-file from the network and rewrite the fixture
    OeisRefresh {
        #[arg(long)]
        id: String,
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// URL template with {id}/{num} placeholders (env fallback GAPBAL_OEIS_URL)
        #[arg(long)]
        url_template: Option<String>,
        #[arg(long, default_value_t = 30)]
        timeout_secs: u64,
    },
}

/// Everything a handler produces; the format switch picks one rendering.
struct Output {
    command: &'static str,
    context: Value,
    payload: Value,
    text: String,
    csv: String,
    /// `EXIT_MISMATCH` when the command found a data-level disagreement.
    status: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_jobs(cli.jobs);
    match run(&cli.command) {
        Ok(out) => {
            match cli.format {
                Format::Text => println!("{}", out.text.trim_end()),
                Format::Csv => print!("{}", out.csv),
                Format::Json => {
                    let envelope = json!({
                        "schema_version": SCHEMA_VERSION,
                        "command": out.command,
                        "context": out.context,
                        "payload": out.payload,
                    });
                    println!("{}", serde_json::to_string_pretty(&envelope).unwrap());
                }
            }
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Invariant(_) => EXIT_INVARIANT,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn init_jobs(flag: Option<usize>) {
    let jobs = flag.or_else(|| {
        std::env::var("GAPBAL_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(jobs) = jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
}

fn run(command: &Command) -> gap_balancing::Result<Output> {
    match command {
        Command::Seeds { k } => cmd_seeds(*k),
        Command::Class {
            k,
            index,
            terms,
            fields,
        } => cmd_class(*k, *index, *terms, fields),
        Command::Table2 => cmd_table2(),
        Command::Verify { k, terms, digits } => cmd_verify(*k, *terms, *digits),
        Command::Transition {
            k,
            from,
            to,
            offset,
        } => cmd_transition(*k, *from, *to, *offset),
        Command::Genfun { k, class, terms } => cmd_genfun(*k, *class, *terms),
        Command::Conjecture { k_min, k_max } => cmd_conjecture(*k_min, *k_max),
        Command::Table1 { k_max } => cmd_table1(*k_max),
        Command::OeisCheck {
            id,
            fixtures,
            terms,
            window,
        } => cmd_oeis_check(id, fixtures, *terms, *window),
        Command::OeisRefresh {
            id,
            fixtures,
            url_template,
            timeout_secs,
        } => cmd_oeis_refresh(id, fixtures, url_template.as_deref(), *timeout_secs),
    }
}

// ---------------------------------------------------------------- seeds

fn cmd_seeds(k: u64) -> gap_balancing::Result<Output> {
    let classes = classes_for(GapContext::new(k))?;
    let conj = conjugate_class_indices(&classes);
    let mut rows = Vec::new();
    for (i, class) in classes.iter().enumerate() {
        let init = class.initial();
        let (sx, sy, ambiguous) = match &class.seed {
            Some(seed) => (seed.x.to_string(), seed.y.to_string(), seed.is_ambiguous()),
            None => ("-".to_string(), "-".to_string(), false),
        };
        rows.push((i, sx, sy, conj[i], ambiguous, init.b.to_string(), init.c.to_string()));
    }

    let mut text = format!("k = {k}: {} class(es)\n", rows.len());
    text.push_str("class  seed        conjugate  ambiguous  initial (B, C)\n");
    for (i, sx, sy, cj, amb, b, c) in &rows {
        let seed = if sx == "-" {
            "-".to_string()
        } else {
            format!("({sx}, {sy})")
        };
        text.push_str(&format!(
            "{:<5}  {:<10}  {:<9}  {:<9}  ({}, {})\n",
            i,
            seed,
            cj,
            if *amb { "yes" } else { "no" },
            b,
            c
        ));
    }

    let mut csv = String::from("class,seed_x,seed_y,conjugate,ambiguous,b0,c0\n");
    for (i, sx, sy, cj, amb, b, c) in &rows {
        csv.push_str(&format!("{i},{sx},{sy},{cj},{amb},{b},{c}\n"));
    }

    let payload = json!({
        "classes": rows.iter().map(|(i, sx, sy, cj, amb, b, c)| json!({
            "index": i,
            "seed": if sx == "-" { Value::Null } else { json!({"x": sx, "y": sy}) },
            "conjugate": cj,
            "ambiguous": amb,
            "initial": {"b": b, "c": c},
        })).collect::<Vec<_>>(),
    });

    Ok(Output {
        command: "seeds",
        context: json!({"k": k.to_string()}),
        payload,
        text,
        csv,
        status: 0,
    })
}

// ---------------------------------------------------------------- class

const FIELD_NAMES: [&str; 5] = ["B", "C", "m", "r", "rhat"];

fn field_rows<'a>(rows: &'a SequenceRows, field: &str) -> Option<&'a [BigInt]> {
    match field {
        "B" => Some(&rows.b),
        "C" => Some(&rows.c),
        "m" => Some(&rows.m),
        "r" => Some(&rows.r),
        "rhat" => Some(&rows.r_hat),
        _ => None,
    }
}

fn cmd_class(k: u64, index: usize, terms: usize, fields: &str) -> gap_balancing::Result<Output> {
    if terms == 0 {
        return Err(Error::Domain("terms must be at least 1".into()));
    }
    let requested: Vec<String> = fields
        .split(',')
        .map(|f| f.trim())
        .filter(|f| !f.is_empty())
        .map(|f| {
            FIELD_NAMES
                .iter()
                .find(|n| n.eq_ignore_ascii_case(f))
                .map(|n| n.to_string())
                .ok_or_else(|| Error::Domain(format!("unknown field '{f}'")))
        })
        .collect::<gap_balancing::Result<_>>()?;
    if requested.is_empty() {
        return Err(Error::Domain("no fields requested".into()));
    }
    let mut classes = classes_for(GapContext::new(k))?;
    if index >= classes.len() {
        return Err(Error::Domain(format!(
            "class index {index} out of range, k = {k} has {} class(es)",
            classes.len()
        )));
    }
    let class = &mut classes[index];
    let rows = sequence_rows(class, terms)?;

    let columns: Vec<(&String, &[BigInt])> = requested
        .iter()
        .map(|f| (f, &field_rows(&rows, f).unwrap()[..terms]))
        .collect();

    let mut text = format!("k = {k}, class {index}, {terms} term(s)\n");
    for (name, seq) in &columns {
        let joined: Vec<String> = seq.iter().map(|v| v.to_string()).collect();
        text.push_str(&format!("{:<5} {}\n", name, joined.join(" ")));
    }

    let mut csv = format!("i,{}\n", requested.join(","));
    for i in 0..terms {
        let cells: Vec<String> = columns.iter().map(|(_, seq)| seq[i].to_string()).collect();
        csv.push_str(&format!("{i},{}\n", cells.join(",")));
    }

    let payload = json!({
        "fields": columns.iter().map(|(name, seq)| json!({
            "name": name,
            "terms": seq.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });

    Ok(Output {
        command: "class",
        context: json!({
            "k": k.to_string(),
            "class": index,
            "terms": terms,
        }),
        payload,
        text,
        csv,
        status: 0,
    })
}

// --------------------------------------------------------------- table2

/// A table cell: a number or the non-integer marker.
enum Cell {
    Number(BigInt),
    Star,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Number(v) => v.to_string(),
            Cell::Star => "*".to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Number(v) => json!({"value": v.to_string()}),
            Cell::Star => json!({"value": Value::Null, "reason": "non-integral"}),
        }
    }
}

fn cmd_table2() -> gap_balancing::Result<Output> {
    let mut classes = classes_for(GapContext::new(9))?;
    if classes.len() != 4 {
        return Err(Error::Invariant(format!(
            "expected 4 classes at k = 9, found {}",
            classes.len()
        )));
    }
    let t1 = {
        let [src, dst] = two(&mut classes, 0, 1);
        derive_transition(src, dst, 0)?
    };
    let t2 = {
        let [src, dst] = two(&mut classes, 1, 2);
        derive_transition(src, dst, 0)?
    };
    let t4 = {
        let [src, dst] = two(&mut classes, 3, 0);
        derive_transition(src, dst, 1)?
    };

    let per_class: Vec<SequenceRows> = classes
        .iter_mut()
        .map(|c| sequence_rows(c, 4))
        .collect::<gap_balancing::Result<_>>()?;

    let labels: Vec<String> = (0..3)
        .flat_map(|i| ["a", "b", "c", "d"].iter().map(move |s| format!("{i}_{s}")))
        .collect();
    // (i, class) per column, classes a-d in ascending initial B
    let cols: Vec<(usize, usize)> = (0..3).flat_map(|i| (0..4).map(move |j| (i, j))).collect();

    let seq_row = |pick: fn(&SequenceRows) -> &[BigInt]| -> Vec<Cell> {
        cols.iter()
            .map(|&(i, j)| Cell::Number(pick(&per_class[j])[i].clone()))
            .collect()
    };
    let map_row = |map: &TransitionMap| -> Vec<Cell> {
        cols.iter()
            .map(|&(i, j)| {
                let rows = &per_class[j];
                match map.evaluate_first(&rows.b[i], &rows.c[i]) {
                    Some(v) => Cell::Number(v),
                    None => Cell::Star,
                }
            })
            .collect()
    };
    // ascending successor within the same class
    let f9_row: Vec<Cell> = cols
        .iter()
        .map(|&(i, j)| Cell::Number(per_class[j].b[i + 1].clone()))
        .collect();

    let rows: Vec<(&str, Vec<Cell>)> = vec![
        ("B", seq_row(|r| &r.b)),
        ("C", seq_row(|r| &r.c)),
        ("m", seq_row(|r| &r.m)),
        ("r", seq_row(|r| &r.r)),
        ("rhat", seq_row(|r| &r.r_hat)),
        ("t1", map_row(&t1)),
        ("t2", map_row(&t2)),
        ("t4", map_row(&t4)),
        ("f9", f9_row),
    ];

    // column-aligned text
    let mut widths: Vec<usize> = labels.iter().map(|l| l.len()).collect();
    for (_, cells) in &rows {
        for (w, cell) in widths.iter_mut().zip(cells) {
            *w = (*w).max(cell.text().len());
        }
    }
    let mut text = String::from("i    ");
    for (label, w) in labels.iter().zip(&widths) {
        text.push_str(&format!(" {label:>w$}"));
    }
    text.push('\n');
    for (name, cells) in &rows {
        text.push_str(&format!("{name:<5}"));
        for (cell, w) in cells.iter().zip(&widths) {
            text.push_str(&format!(" {:>w$}", cell.text()));
        }
        text.push('\n');
    }

    let mut csv = format!("row,{}\n", labels.join(","));
    for (name, cells) in &rows {
        let cells: Vec<String> = cells.iter().map(Cell::text).collect();
        csv.push_str(&format!("{name},{}\n", cells.join(",")));
    }

    let payload = json!({
        "columns": labels,
        "rows": rows.iter().map(|(name, cells)| json!({
            "name": name,
            "cells": cells.iter().map(Cell::json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });

    Ok(Output {
        command: "table2",
        context: json!({"k": "9"}),
        payload,
        text,
        csv,
        status: 0,
    })
}

/// Mutable references to two distinct vector elements, in call order.
fn two(classes: &mut [BalancingClass], i: usize, j: usize) -> [&mut BalancingClass; 2] {
    assert_ne!(i, j);
    if i < j {
        let (lo, hi) = classes.split_at_mut(j);
        [&mut lo[i], &mut hi[0]]
    } else {
        let (lo, hi) = classes.split_at_mut(i);
        [&mut hi[0], &mut lo[j]]
    }
}

// --------------------------------------------------------------- verify

fn cmd_verify(k: u64, terms: usize, digits: u32) -> gap_balancing::Result<Output> {
    if terms < 5 {
        return Err(Error::Domain("verify needs at least 5 terms".into()));
    }
    let ctx = GapContext::new(k);
    let mut classes = classes_for(ctx)?;
    let mut reports: Vec<IdentityReport> = Vec::new();
    let mut triangular_failures = Vec::new();
    for class in classes.iter_mut() {
        let index = class.class_index;
        for i in 0..terms {
            let pair = class.term(i).clone();
            if !verify_triangular_identity(&pair)? {
                triangular_failures.push(format!("class {index}: triangular identity at i = {i}"));
            }
        }
        reports.push(check_recurrences(class, terms)?);
        reports.push(check_cassini(class, terms)?);
        reports.push(check_ratio_limits(class, terms, digits)?);
        reports.push(check_mixed_limits(class, terms, digits)?);
    }
    // errors out (exit 4) if the coefficient equalities are violated
    let symmetry_pairs = check_conjugate_symmetry(ctx)?.len();

    let failed = !triangular_failures.is_empty() || reports.iter().any(|r| !r.passed);

    let mut text = format!("k = {k}, {} class(es), {terms} term(s), {digits}-digit limits\n", classes.len());
    if triangular_failures.is_empty() {
        text.push_str("triangular identity: pass\n");
    } else {
        for f in &triangular_failures {
            text.push_str(&format!("triangular identity: FAIL ({f})\n"));
        }
    }
    text.push_str(&format!(
        "conjugate symmetry: pass ({symmetry_pairs} ordered pair(s))\n"
    ));
    for r in &reports {
        let verdict = if r.passed { "pass" } else { "FAIL" };
        let mut line = format!("class {} {}: {verdict}", r.class_index, r.name);
        if !r.failures.is_empty() {
            line.push_str(&format!(" {:?}", r.failures));
        }
        if !r.bound_failures.is_empty() {
            line.push_str(&format!(
                " [absolute 1e-8 bound not met at {} index(es)]",
                r.bound_failures.len()
            ));
        }
        text.push_str(&line);
        text.push('\n');
    }
    text.push_str(if failed { "verify: FAIL\n" } else { "verify: PASS\n" });

    let mut csv = String::from("class,check,passed,monotone,absolute_bound_met\n");
    for r in &reports {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.class_index, r.name, r.passed, r.monotone, r.absolute_bound_met
        ));
    }

    let payload = json!({
        "passed": !failed,
        "triangular_failures": triangular_failures,
        "conjugate_symmetry_pairs": symmetry_pairs,
        "reports": reports.iter().map(|r| json!({
            "class": r.class_index,
            "name": r.name,
            "passed": r.passed,
            "failures": r.failures,
            "monotone": r.monotone,
            "absolute_bound_met": r.absolute_bound_met,
            "bound_failures": r.bound_failures,
            "errors": r.errors,
        })).collect::<Vec<_>>(),
    });

    Ok(Output {
        command: "verify",
        context: json!({"k": k.to_string(), "terms": terms, "digits": digits}),
        payload,
        text,
        csv,
        status: if failed { EXIT_MISMATCH } else { 0 },
    })
}

// ----------------------------------------------------------- transition

/// Renders `p x + q y + r` over the least common denominator, the way the
/// single-fraction forms read, e.g. `(27x + 5y - 16)/23`.
fn render_affine(p: &Rational, q: &Rational, r: &Rational) -> String {
    let lcm: BigInt = p
        .denom()
        .lcm(q.denom())
        .lcm(r.denom());
    let scale = |v: &Rational| -> BigInt { (v * Rational::from(lcm.clone())).to_integer() };
    let (p, q, r) = (scale(p), scale(q), scale(r));
    let mut inner = String::new();
    for (coeff, var) in [(&p, "x"), (&q, "y")] {
        if coeff.is_zero() {
            continue;
        }
        if inner.is_empty() {
            if *coeff == -BigInt::one() {
                inner.push('-');
            } else if !coeff.is_one() {
                inner.push_str(&coeff.to_string());
            }
        } else {
            inner.push_str(if coeff.is_negative() { " - " } else { " + " });
            let mag = coeff.abs();
            if !mag.is_one() {
                inner.push_str(&mag.to_string());
            }
        }
        inner.push_str(var);
    }
    if !r.is_zero() || inner.is_empty() {
        if inner.is_empty() {
            inner.push_str(&r.to_string());
        } else {
            inner.push_str(if r.is_negative() { " - " } else { " + " });
            inner.push_str(&r.abs().to_string());
        }
    }
    if lcm.is_one() {
        inner
    } else {
        format!("({inner})/{lcm}")
    }
}

/// The two affine rows of a transition map: (t, t-hat) or (T, T-hat).
fn map_rows(map: &TransitionMap) -> [(Rational, Rational, Rational); 2] {
    let k = map.ctx.k as i64;
    let offset2 = match map.kind {
        MapKind::Balancing => Rational::from(BigInt::from(4 - 4 * k)) * &map.b,
        MapKind::Balancer => Rational::from(BigInt::from(4 * k)) * &map.b,
    };
    [
        (map.a.clone(), map.b.clone(), map.c.clone()),
        (
            Rational::from(BigInt::from(8)) * &map.b,
            map.a.clone(),
            offset2,
        ),
    ]
}

fn rational_json(q: &Rational) -> Value {
    json!({"numer": q.numer().to_string(), "denom": q.denom().to_string()})
}

fn cmd_transition(k: u64, from: usize, to: usize, offset: usize) -> gap_balancing::Result<Output> {
    if from == to && offset == 0 {
        return Err(Error::Domain(
            "source and target class coincide; use --offset for a shift map".into(),
        ));
    }
    let ctx = GapContext::new(k);
    let mut classes = classes_for(ctx)?;
    let count = classes.len();
    if from >= count || to >= count {
        return Err(Error::Domain(format!(
            "class index out of range, k = {k} has {count} class(es)"
        )));
    }
    let (balancing, balancer) = if from == to {
        let mut src = classes.remove(from);
        let mut dst = src.clone();
        let map = derive_transition(&mut src, &mut dst, offset)?;
        let bal = derive_balancer_transition(
            &src.balancer_class(3 + offset)?,
            &dst.balancer_class(3 + offset)?,
            offset,
        )?;
        (map, bal)
    } else {
        let map = {
            let [src, dst] = two(&mut classes, from, to);
            derive_transition(src, dst, offset)?
        };
        let src_bal = classes[from].balancer_class(3 + offset)?;
        let dst_bal = classes[to].balancer_class(3 + offset)?;
        (map, derive_balancer_transition(&src_bal, &dst_bal, offset)?)
    };

    let [(ta, tb, tc), (ha, hb, hc)] = map_rows(&balancing);
    let [(ua, ub, uc), (va, vb, vc)] = map_rows(&balancer);

    let text = format!(
        "k = {k}, class {from} -> class {to}, target offset {offset}\n\
         t(x)    = {}\n\
         that(x) = {}\n\
         T(x)    = {}\n\
         That(x) = {}\n",
        render_affine(&ta, &tb, &tc),
        render_affine(&ha, &hb, &hc),
        render_affine(&ua, &ub, &uc),
        render_affine(&va, &vb, &vc),
    );

    let mut csv = String::from("map,x_coeff,y_coeff,constant\n");
    for (name, (a, b, c)) in [
        ("t", (&ta, &tb, &tc)),
        ("that", (&ha, &hb, &hc)),
        ("T", (&ua, &ub, &uc)),
        ("That", (&va, &vb, &vc)),
    ] {
        csv.push_str(&format!("{name},{a},{b},{c}\n"));
    }

    let payload = json!({
        "balancing": {
            "t": {"a": rational_json(&ta), "b": rational_json(&tb), "c": rational_json(&tc)},
            "that": {"a": rational_json(&ha), "b": rational_json(&hb), "c": rational_json(&hc)},
            "rendered": [render_affine(&ta, &tb, &tc), render_affine(&ha, &hb, &hc)],
        },
        "balancer": {
            "T": {"a": rational_json(&ua), "b": rational_json(&ub), "c": rational_json(&uc)},
            "That": {"a": rational_json(&va), "b": rational_json(&vb), "c": rational_json(&vc)},
            "rendered": [render_affine(&ua, &ub, &uc), render_affine(&va, &vb, &vc)],
        },
    });

    Ok(Output {
        command: "transition",
        context: json!({"k": k.to_string(), "from": from, "to": to, "offset": offset}),
        payload,
        text,
        csv,
        status: 0,
    })
}

// --------------------------------------------------------------- genfun

/// Ascending-power rendering, e.g. `9s - 25s^2`.
fn render_poly(p: &Poly) -> String {
    let mut out = String::new();
    for (i, coeff) in p.0.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let mag = coeff.abs();
        if out.is_empty() {
            if coeff.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if coeff.is_negative() { " - " } else { " + " });
        }
        let show_mag = !mag.is_one() || i == 0;
        if show_mag {
            out.push_str(&mag.to_string());
        }
        match i {
            0 => {}
            1 => out.push('s'),
            _ => out.push_str(&format!("s^{i}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn genfun_output(
    name: String,
    context: Value,
    f: &RationalFunction,
    terms: usize,
) -> gap_balancing::Result<Output> {
    let expansion = f.expand(terms)?;
    let num = render_poly(&f.numerator);
    let den = render_poly(&f.denominator);
    let coeffs: Vec<String> = expansion.iter().map(|v| v.to_string()).collect();

    let text = format!(
        "{name}\n  numerator:   {num}\n  denominator: {den}\n  series:      {}\n",
        coeffs.join(" ")
    );
    let mut csv = String::from("i,coefficient\n");
    for (i, c) in coeffs.iter().enumerate() {
        csv.push_str(&format!("{i},{c}\n"));
    }
    let payload = json!({
        "numerator": f.numerator.0.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "denominator": f.denominator.0.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "rendered": format!("({num}) / ({den})"),
        "series": coeffs,
    });
    Ok(Output {
        command: "genfun",
        context,
        payload,
        text,
        csv,
        status: 0,
    })
}

fn cmd_genfun(k: u64, class: Option<usize>, terms: usize) -> gap_balancing::Result<Output> {
    let ctx = GapContext::new(k);
    match class {
        Some(index) => {
            let mut classes = classes_for(ctx)?;
            if index >= classes.len() {
                return Err(Error::Domain(format!(
                    "class index {index} out of range, k = {k} has {} class(es)",
                    classes.len()
                )));
            }
            let f = class_genfun(&mut classes[index]);
            genfun_output(
                format!("k = {k}, class {index} generating function"),
                json!({"k": k.to_string(), "class": index, "terms": terms}),
                &f,
                terms,
            )
        }
        None => {
            let f = interleaved_genfun(ctx)?;
            genfun_output(
                format!("k = {k}, interleaved generating function"),
                json!({"k": k.to_string(), "class": Value::Null, "terms": terms}),
                &f,
                terms,
            )
        }
    }
}

// ----------------------------------------------------------- conjecture

fn cmd_conjecture(k_min: u64, k_max: u64) -> gap_balancing::Result<Output> {
    let mismatches = check_conjecture(k_min, k_max)?;
    let mut text = format!(
        "k in [{k_min}, {k_max}]: {} mismatch(es)\n",
        mismatches.len()
    );
    for m in &mismatches {
        text.push_str(&format!(
            "k = {}: {} class(es) but {} divisor(s)\n",
            m.k, m.class_count, m.divisor_count
        ));
    }
    let mut csv = String::from("k,class_count,divisor_count\n");
    for m in &mismatches {
        csv.push_str(&format!("{},{},{}\n", m.k, m.class_count, m.divisor_count));
    }
    let payload = json!({
        "mismatches": mismatches.iter().map(|m| json!({
            "k": m.k.to_string(),
            "class_count": m.class_count,
            "divisor_count": m.divisor_count,
        })).collect::<Vec<_>>(),
    });
    Ok(Output {
        command: "conjecture",
        context: json!({"k_min": k_min.to_string(), "k_max": k_max.to_string()}),
        payload,
        text,
        csv,
        status: if mismatches.is_empty() { 0 } else { EXIT_MISMATCH },
    })
}

// --------------------------------------------------------------- table1

fn cmd_table1(k_max: u64) -> gap_balancing::Result<Output> {
    let (smallest, observed) = table1(k_max)?;
    let ns: Vec<String> = smallest.keys().map(|n| n.to_string()).collect();
    let ks: Vec<String> = smallest.values().map(|k| k.to_string()).collect();
    let observed: Vec<String> = observed.iter().map(|n| n.to_string()).collect();

    let widths: Vec<usize> = ns
        .iter()
        .zip(&ks)
        .map(|(n, k)| n.len().max(k.len()))
        .collect();
    let mut text = String::from("n:");
    for (n, w) in ns.iter().zip(&widths) {
        text.push_str(&format!(" {n:>w$}"));
    }
    text.push_str("\nk:");
    for (k, w) in ks.iter().zip(&widths) {
        text.push_str(&format!(" {k:>w$}"));
    }
    text.push_str(&format!(
        "\nobserved class counts for k <= {k_max}: {}\n",
        observed.join(" ")
    ));

    let mut csv = String::from("n,smallest_k\n");
    for (n, k) in ns.iter().zip(&ks) {
        csv.push_str(&format!("{n},{k}\n"));
    }

    let payload = json!({
        "smallest_k": smallest.iter().map(|(n, k)| json!({
            "classes": n.to_string(),
            "k": k.to_string(),
        })).collect::<Vec<_>>(),
        "observed_counts": observed,
    });
    Ok(Output {
        command: "table1",
        context: json!({"k_max": k_max.to_string()}),
        payload,
        text,
        csv,
        status: 0,
    })
}

// ----------------------------------------------------------------- oeis

/// The sequences with committed fixtures: A-number, gap size, which
/// companion sequence, merged ascending over all classes of that k.
const OEIS_TARGETS: [(&str, u64, &str); 7] = [
    ("A001109", 1, "B"),
    ("A053141", 0, "B"),
    ("A077443", 2, "C"),
    ("A124124", 2, "m"),
    ("A077446", 2, "rhat"),
    ("A275797", 5, "C"),
    ("A076293", 5, "rhat"),
];

fn merged_sequence(k: u64, field: &str, terms: usize) -> gap_balancing::Result<Vec<BigInt>> {
    let mut values: Vec<BigInt> = Vec::new();
    for mut class in classes_for(GapContext::new(k))? {
        let rows = sequence_rows(&mut class, terms + 2)?;
        values.extend(field_rows(&rows, field).expect("known field").to_vec());
    }
    values.sort();
    values.dedup();
    values.truncate(terms);
    Ok(values)
}

fn fixtures_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os("GAPBAL_FIXTURES").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/oeis"))
}

fn cmd_oeis_check(
    id: &str,
    fixtures: &Option<PathBuf>,
    terms: usize,
    window: usize,
) -> gap_balancing::Result<Output> {
    let dir = fixtures_dir(fixtures);
    let targets: Vec<&(&str, u64, &str)> = if id == "all" {
        OEIS_TARGETS.iter().collect()
    } else {
        let found = OEIS_TARGETS.iter().find(|(t, _, _)| *t == id);
        match found {
            Some(t) => vec![t],
            None => {
                return Err(Error::Domain(format!(
                    "no generated sequence is associated with '{id}'"
                )))
            }
        }
    };

    let mut rows = Vec::new();
    let mut all_matched = true;
    for (id, k, field) in targets {
        let generated = merged_sequence(*k, field, terms)?;
        let fixture = load_fixture(&dir, id)?;
        let report = cross_check(&generated, &fixture, window);
        all_matched &= report.matched;
        rows.push((id.to_string(), *k, field.to_string(), report));
    }

    let mut text = String::new();
    for (id, k, field, r) in &rows {
        let line = if r.matched {
            format!(
                "{id} (k = {k}, {field}): match at offset {}, {} term(s) compared\n",
                r.offset.unwrap(),
                r.compared
            )
        } else {
            format!("{id} (k = {k}, {field}): MISMATCH\n")
        };
        text.push_str(&line);
    }

    let mut csv = String::from("id,k,field,matched,offset,compared\n");
    for (id, k, field, r) in &rows {
        csv.push_str(&format!(
            "{id},{k},{field},{},{},{}\n",
            r.matched,
            r.offset.map_or(String::new(), |o| o.to_string()),
            r.compared
        ));
    }

    let payload = json!({
        "checks": rows.iter().map(|(id, k, field, r)| json!({
            "id": id,
            "k": k.to_string(),
            "field": field,
            "matched": r.matched,
            "offset": r.offset,
            "compared": r.compared,
        })).collect::<Vec<_>>(),
    });

    Ok(Output {
        command: "oeis-check",
        context: json!({"fixtures": dir.display().to_string(), "terms": terms, "window": window}),
        payload,
        text,
        csv,
        status: if all_matched { 0 } else { EXIT_MISMATCH },
    })
}

fn cmd_oeis_refresh(
    id: &str,
    fixtures: &Option<PathBuf>,
    url_template: Option<&str>,
    timeout_secs: u64,
) -> gap_balancing::Result<Output> {
    let dir = fixtures_dir(fixtures);
    let template = url_template
        .map(str::to_string)
        .or_else(|| std::env::var(URL_TEMPLATE_ENV).ok())
        .unwrap_or_else(|| DEFAULT_URL_TEMPLATE.to_string());
    let body = gap_balancing::oeis::fetch_bfile(id, &template, Duration::from_secs(timeout_secs))?;
    let bfile = parse_bfile(id, &body)?;
    let path = dir.join(format!("{id}.txt"));
    std::fs::write(&path, to_bfile_text(&bfile))?;

    let text = format!(
        "{id}: wrote {} entries to {}\n",
        bfile.entries.len(),
        path.display()
    );
    let csv = format!("id,entries,path\n{id},{},{}\n", bfile.entries.len(), path.display());
    let payload = json!({
        "id": id,
        "entries": bfile.entries.len(),
        "path": path.display().to_string(),
    });
    Ok(Output {
        command: "oeis-refresh",
        context: json!({"url_template": template}),
        payload,
        text,
        csv,
        status: 0,
    })
}
