//! Command dispatch for the `geoiis` binary.
//!
//! Every command writes its result to stdout (or `--out FILE`) and is
//! deterministic: identical inputs produce byte-identical output. Errors
//! go to stderr with exit code 2; `solve` and `panlabel --check` exit 1
//! when the computation succeeds but the verification verdict is negative.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde_json::{json, Value};

use geoiis::adversary::{AdversaryAutomaton, Alphabet, Lasso, LetterId, Word};
use geoiis::classes::classify_geo_class;
use geoiis::geometry::complex::Complex;
use geoiis::geometry::export;
use geoiis::geometry::{geo_lasso, BaryPoint};
use geoiis::setagreement::{coverage_report, hole_at_depth, synthesize_and_verify};
use geoiis::sperner::{is_sperner, panchromatic_simplices, psi_labellings};
use geoiis::{Error, Limits, Result};

#[derive(Parser)]
#[command(
    name = "geoiis",
    version,
    about = "Exact geometry of iterated immediate-snapshot executions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Cap on subdivision rounds and enumeration depths.
    #[arg(long, global = true, default_value_t = 8)]
    cap: usize,
    /// Output format; each command has its natural default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Svg,
    Obj,
}

#[derive(Subcommand)]
enum Command {
    /// Print the letter catalogue of IS_n: ids, blocks, and views.
    EnumerateIs {
        /// Dimension: processes are 0..=n.
        #[arg(long)]
        n: usize,
    },
    /// Build the r-fold chromatic subdivision of S^n and export it.
    Subdivide {
        #[arg(long)]
        n: usize,
        /// Number of subdivision rounds.
        #[arg(long)]
        rounds: usize,
    },
    /// Compute the exact limit point of a lasso execution.
    Geo {
        #[arg(long)]
        n: usize,
        /// Execution as "prefix-ids ; period-ids", inline or a file path.
        #[arg(long)]
        lasso: String,
    },
    /// Classify the geo-equivalence class of a lasso execution.
    Classify {
        #[arg(long)]
        n: usize,
        /// Execution as "prefix-ids ; period-ids", inline or a file path.
        #[arg(long)]
        lasso: String,
    },
    /// Label the subdivision so the panchromatic simplex tracks a word.
    Panlabel {
        #[arg(long)]
        n: usize,
        /// Letter word; one id per round, space or comma separated.
        #[arg(long)]
        tau: String,
        /// Verify uniqueness of the panchromatic simplex per level.
        #[arg(long)]
        check: bool,
    },
    /// Synthesize the agreement algorithm for an adversary and verify it.
    Solve {
        #[arg(long)]
        n: usize,
        /// Adversary automaton file.
        #[arg(long, value_name = "FILE")]
        adversary: PathBuf,
        /// Probe depth: every allowed word of this length is exercised.
        #[arg(long)]
        depth: usize,
        /// Decision rule as a lasso; defaults to the hole found at depth.
        #[arg(long)]
        w: Option<String>,
        /// Rounds each probe runs for; defaults to depth + 8.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Count adversary-allowed words of a given length.
    Coverage {
        #[arg(long)]
        n: usize,
        /// Adversary automaton file.
        #[arg(long, value_name = "FILE")]
        adversary: PathBuf,
        /// Word length to census.
        #[arg(long)]
        depth: usize,
    },
    /// Re-emit a complex JSON file in another format.
    Export {
        /// Complex JSON file produced by `subdivide`.
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
    },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    let limits = Limits {
        depth_cap: cli.cap,
        ..Limits::default()
    };
    match dispatch(&cli.command, cli.format, &limits) {
        Ok((output, code)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, &output) {
                    eprintln!("error: cannot write {}: {}", path.display(), e);
                    return 2;
                }
            } else {
                print!("{output}");
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cmd: &Command, format: Option<Format>, limits: &Limits) -> Result<(String, i32)> {
    match cmd {
        Command::EnumerateIs { n } => enumerate_is(*n, format.unwrap_or(Format::Text), limits),
        Command::Subdivide { n, rounds } => {
            subdivide(*n, *rounds, format.unwrap_or(Format::Json), limits)
        }
        Command::Geo { n, lasso } => geo(*n, lasso, format.unwrap_or(Format::Text), limits),
        Command::Classify { n, lasso } => {
            classify(*n, lasso, format.unwrap_or(Format::Text), limits)
        }
        Command::Panlabel { n, tau, check } => {
            panlabel(*n, tau, *check, format.unwrap_or(Format::Text), limits)
        }
        Command::Solve {
            n,
            adversary,
            depth,
            w,
            horizon,
        } => solve(
            *n,
            adversary,
            *depth,
            w.as_deref(),
            *horizon,
            format.unwrap_or(Format::Text),
            limits,
        ),
        Command::Coverage {
            n,
            adversary,
            depth,
        } => coverage(*n, adversary, *depth, format.unwrap_or(Format::Text), limits),
        Command::Export { input } => export_cmd(input, format.unwrap_or(Format::Json)),
    }
}

// ── Shared plumbing ──────────────────────────────────────────────────────

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// A lasso argument names a file or is the inline "prefix ; period" form.
/// Files may carry '#' comments and arbitrary line breaks.
fn load_lasso(arg: &str) -> Result<Lasso> {
    let p = Path::new(arg);
    let text = if p.is_file() {
        read_file(p)?
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join(" ")
    } else {
        arg.to_string()
    };
    text.parse()
}

fn parse_word(s: &str) -> Result<Word> {
    let mut word = Vec::new();
    for tok in s.split(|c: char| c == ',' || c.is_whitespace()) {
        if tok.is_empty() {
            continue;
        }
        let id: LetterId = tok
            .parse()
            .map_err(|_| Error::ComplexParse(format!("bad letter id {tok:?}")))?;
        word.push(id);
    }
    Ok(word)
}

fn rat_str(r: &BigRational) -> String {
    r.to_string()
}

fn rat_pair(r: &BigRational) -> Value {
    json!([r.numer().to_string(), r.denom().to_string()])
}

fn point_text(x: &BaryPoint) -> String {
    let coords: Vec<String> = x.iter().map(rat_str).collect();
    format!("({})", coords.join(", "))
}

fn point_json(x: &BaryPoint) -> Value {
    Value::Array(x.iter().map(rat_pair).collect())
}

fn set_text(s: &std::collections::BTreeSet<usize>) -> String {
    let ids: Vec<String> = s.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", ids.join(", "))
}

fn word_text(w: &[LetterId]) -> String {
    w.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn json_out(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn unsupported(cmd: &str, format: Format) -> Error {
    Error::UnsupportedExport(format!("{cmd} has no {format:?} output"))
}

// ── Commands ─────────────────────────────────────────────────────────────

/// Groups processes sharing a view into blocks, ordered by view size.
/// Views are prefix unions of the blocks, so this inverts the encoding.
fn blocks_of(g: &geoiis::adversary::InstantGraph) -> Vec<Vec<usize>> {
    let mut by_view: BTreeMap<(usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for q in 0..=g.n() {
        let view: Vec<usize> = g.view(q).iter().copied().collect();
        by_view.entry((view.len(), view)).or_default().push(q);
    }
    by_view.into_values().collect()
}

fn block_text(blocks: &[Vec<usize>]) -> String {
    let parts: Vec<String> = blocks
        .iter()
        .map(|b| {
            let ids: Vec<String> = b.iter().map(|p| p.to_string()).collect();
            format!("{{{}}}", ids.join(","))
        })
        .collect();
    format!("({})", parts.join(","))
}

fn enumerate_is(n: usize, format: Format, limits: &Limits) -> Result<(String, i32)> {
    let alpha = Alphabet::generate(n, limits)?;
    match format {
        Format::Text => {
            let mut out = format!("n = {}  letters = {}\n", n, alpha.len());
            for (id, g) in alpha.letters().iter().enumerate() {
                out.push_str(&format!(
                    "{}\t{}\t{}\n",
                    id,
                    block_text(&blocks_of(g)),
                    g
                ));
            }
            Ok((out, 0))
        }
        Format::Json => {
            let letters: Vec<Value> = alpha
                .letters()
                .iter()
                .enumerate()
                .map(|(id, g)| {
                    let views: Vec<Vec<usize>> = (0..=n)
                        .map(|q| g.view(q).iter().copied().collect())
                        .collect();
                    json!({ "id": id, "blocks": blocks_of(g), "views": views })
                })
                .collect();
            Ok((json_out(&json!({ "n": n, "letters": letters })), 0))
        }
        other => Err(unsupported("enumerate-is", other)),
    }
}

fn subdivide(n: usize, rounds: usize, format: Format, limits: &Limits) -> Result<(String, i32)> {
    let alpha = Alphabet::generate(n, limits)?;
    let c = Complex::iterated(&alpha, rounds, limits)?;
    let out = match format {
        Format::Json => export::complex_to_json(&c),
        Format::Svg => export::complex_to_svg(&c)?,
        Format::Obj => export::complex_to_obj(&c)?,
        Format::Text => return Err(unsupported("subdivide", Format::Text)),
    };
    Ok((out, 0))
}

fn geo(n: usize, lasso_arg: &str, format: Format, limits: &Limits) -> Result<(String, i32)> {
    let alpha = Alphabet::generate(n, limits)?;
    let l = load_lasso(lasso_arg)?;
    alpha.check_word(&l.prefix)?;
    alpha.check_word(&l.period)?;
    let point = geo_lasso(&alpha, &l)?;
    match format {
        Format::Text => Ok((format!("lasso = {l}\ngeo = {}\n", point_text(&point)), 0)),
        Format::Json => Ok((
            json_out(&json!({
                "n": n,
                "lasso": { "prefix": l.prefix, "period": l.period },
                "geo": point_json(&point),
            })),
            0,
        )),
        other => Err(unsupported("geo", other)),
    }
}

fn classify(n: usize, lasso_arg: &str, format: Format, limits: &Limits) -> Result<(String, i32)> {
    let alpha = Alphabet::generate(n, limits)?;
    let l = load_lasso(lasso_arg)?;
    alpha.check_word(&l.prefix)?;
    alpha.check_word(&l.period)?;
    let verdict = classify_geo_class(&alpha, &l)?;
    let point = geo_lasso(&alpha, &l)?;
    let normalized = l.normalized();
    match format {
        Format::Text => {
            let mut out = format!(
                "lasso = {l}\nnormalized = {normalized}\ncardinality = {}\noffset = {}\nfair_set = {}\n",
                verdict.cardinality,
                verdict.offset,
                set_text(&verdict.fair_set),
            );
            if let Some(twin) = &verdict.twin {
                out.push_str(&format!("twin = {twin}\n"));
            }
            out.push_str(&format!("geo = {}\n", point_text(&point)));
            Ok((out, 0))
        }
        Format::Json => Ok((
            json_out(&json!({
                "n": n,
                "lasso": { "prefix": l.prefix, "period": l.period },
                "normalized": { "prefix": normalized.prefix, "period": normalized.period },
                "cardinality": verdict.cardinality.to_string(),
                "offset": verdict.offset,
                "fair_set": verdict.fair_set,
                "twin": verdict.twin.as_ref().map(|t| json!({
                    "prefix": t.prefix, "period": t.period,
                })),
                "geo": point_json(&point),
            })),
            0,
        )),
        other => Err(unsupported("classify", other)),
    }
}

fn panlabel(
    n: usize,
    tau: &str,
    check: bool,
    format: Format,
    limits: &Limits,
) -> Result<(String, i32)> {
    let alpha = Alphabet::generate(n, limits)?;
    let word = parse_word(tau)?;
    if word.is_empty() {
        return Err(Error::ComplexParse("empty letter word".into()));
    }
    alpha.check_word(&word)?;
    let c = Complex::iterated(&alpha, word.len(), limits)?;
    let levels = psi_labellings(&alpha, &c, &word)?;

    struct LevelVerdict {
        panchromatic: Vec<usize>,
        expected: usize,
        unique: bool,
        sperner: bool,
    }
    let mut verdicts = Vec::new();
    for (i, labels) in levels.iter().enumerate() {
        let level = i + 1;
        let panchromatic = panchromatic_simplices(&c, level, labels);
        let expected = c
            .simplex_by_word(&word[..level])
            .expect("the word's own path exists");
        let unique = panchromatic == vec![expected];
        let sperner = is_sperner(&c, level, labels);
        verdicts.push(LevelVerdict {
            panchromatic,
            expected,
            unique,
            sperner,
        });
    }
    let all_ok = verdicts.iter().all(|v| v.unique && v.sperner);
    let code = if check && !all_ok { 1 } else { 0 };

    match format {
        Format::Text => {
            let mut out = format!("n = {}  word = {}\n", n, word_text(&word));
            for (i, (labels, v)) in levels.iter().zip(&verdicts).enumerate() {
                let level = i + 1;
                let lv = c.level(level);
                out.push_str(&format!(
                    "level {}  word prefix = {}\n",
                    level,
                    word_text(&word[..level])
                ));
                for (vi, (vert, label)) in lv.vertices.iter().zip(labels).enumerate() {
                    let view: Vec<String> =
                        vert.view.iter().map(|p| p.to_string()).collect();
                    out.push_str(&format!(
                        "  vertex {}  color {}  view {{{}}}  ->  {}\n",
                        vi,
                        vert.color,
                        view.join(","),
                        label
                    ));
                }
                out.push_str(&format!(
                    "  panchromatic = [{}]  expected = {}  unique = {}  sperner = {}\n",
                    v.panchromatic
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                    v.expected,
                    v.unique,
                    v.sperner
                ));
            }
            if check {
                out.push_str(&format!(
                    "check = {}\n",
                    if all_ok { "PASS" } else { "FAIL" }
                ));
            }
            Ok((out, code))
        }
        Format::Json => {
            let levels_json: Vec<Value> = levels
                .iter()
                .zip(&verdicts)
                .enumerate()
                .map(|(i, (labels, v))| {
                    json!({
                        "round": i + 1,
                        "labels": labels,
                        "panchromatic": v.panchromatic,
                        "expected": v.expected,
                        "unique": v.unique,
                        "sperner": v.sperner,
                    })
                })
                .collect();
            Ok((
                json_out(&json!({
                    "n": n,
                    "word": word,
                    "levels": levels_json,
                    "check": if check { Some(all_ok) } else { None },
                })),
                code,
            ))
        }
        Format::Svg => {
            let last = levels.last().expect("word is nonempty");
            Ok((export::complex_to_svg_labelled(&c, last)?, code))
        }
        other => Err(unsupported("panlabel", other)),
    }
}

fn solve(
    n: usize,
    adversary: &Path,
    depth: usize,
    w: Option<&str>,
    horizon: Option<usize>,
    format: Format,
    limits: &Limits,
) -> Result<(String, i32)> {
    let alpha = Alphabet::generate(n, limits)?;
    let ma = AdversaryAutomaton::parse(&read_file(adversary)?, &alpha)?;
    let hole = hole_at_depth(&alpha, &ma, depth)?;
    let rule = match w {
        Some(arg) => {
            let l = load_lasso(arg)?;
            alpha.check_word(&l.prefix)?;
            alpha.check_word(&l.period)?;
            l
        }
        None => match &hole {
            Some(h) => h.excluded_execution.clone(),
            None => {
                return Err(Error::VerificationRefused(format!(
                    "no hole at depth {depth}; supply a rule with --w"
                )))
            }
        },
    };
    let horizon = horizon.unwrap_or(depth + 8);
    let report = synthesize_and_verify(&alpha, &ma, &rule, depth, horizon, limits)?;
    let failures: Vec<_> = report.failures().collect();
    let pass = report.all_ok;
    let code = if pass { 0 } else { 1 };

    match format {
        Format::Text => {
            let mut out = format!(
                "adversary = {} ({} states)\n",
                adversary.display(),
                ma.states.len()
            );
            match &hole {
                Some(h) => {
                    out.push_str(&format!(
                        "hole depth = {}\nhole word = {}\nhole witness = {}\n",
                        h.depth,
                        word_text(&h.word),
                        point_text(&h.witness)
                    ));
                }
                None => out.push_str(&format!("hole = none at depth {depth}\n")),
            }
            out.push_str(&format!(
                "rule = {}\nhorizon = {}\nprobes = {}\nfailures = {}\n",
                report.rule,
                horizon,
                report.probes.len(),
                failures.len()
            ));
            if let Some(f) = failures.first() {
                out.push_str(&format!(
                    "first failure: exec = {}  terminated = {}  agreement = {}  validity = {}\n",
                    f.execution,
                    f.report.terminated,
                    f.report.agreement_ok,
                    f.report.validity_ok
                ));
            }
            out.push_str(&format!(
                "verification = {}\n",
                if pass { "PASS" } else { "FAIL" }
            ));
            Ok((out, code))
        }
        Format::Json => Ok((
            json_out(&json!({
                "n": n,
                "adversary": adversary.display().to_string(),
                "states": ma.states.len(),
                "hole": hole.as_ref().map(|h| json!({
                    "depth": h.depth,
                    "word": h.word,
                    "witness": point_json(&h.witness),
                    "excluded_execution": {
                        "prefix": h.excluded_execution.prefix,
                        "period": h.excluded_execution.period,
                    },
                })),
                "rule": { "prefix": report.rule.prefix, "period": report.rule.period },
                "horizon": horizon,
                "probes": report.probes.len(),
                "failures": failures.iter().map(|f| json!({
                    "execution": { "prefix": f.execution.prefix, "period": f.execution.period },
                    "terminated": f.report.terminated,
                    "agreement_ok": f.report.agreement_ok,
                    "validity_ok": f.report.validity_ok,
                })).collect::<Vec<_>>(),
                "pass": pass,
            })),
            code,
        )),
        other => Err(unsupported("solve", other)),
    }
}

fn coverage(
    n: usize,
    adversary: &Path,
    depth: usize,
    format: Format,
    limits: &Limits,
) -> Result<(String, i32)> {
    let alpha = Alphabet::generate(n, limits)?;
    let ma = AdversaryAutomaton::parse(&read_file(adversary)?, &alpha)?;
    let report = coverage_report(&alpha, &ma, depth, limits)?;
    let truncated = (report.rejected_words.len() as u128) < report.rejected;
    match format {
        Format::Text => {
            let mut out = format!(
                "depth = {}\ntotal = {}\nallowed = {}\nrejected = {}\n",
                report.depth, report.total, report.allowed, report.rejected
            );
            if !report.rejected_words.is_empty() {
                out.push_str("rejected words:\n");
                for w in &report.rejected_words {
                    out.push_str(&format!("{}\n", word_text(w)));
                }
                if truncated {
                    out.push_str("... (list truncated)\n");
                }
            }
            Ok((out, 0))
        }
        Format::Json => Ok((
            json_out(&json!({
                "n": n,
                "depth": report.depth,
                "total": report.total.to_string(),
                "allowed": report.allowed.to_string(),
                "rejected": report.rejected.to_string(),
                "rejected_words": report.rejected_words,
                "rejected_list_truncated": truncated,
            })),
            0,
        )),
        other => Err(unsupported("coverage", other)),
    }
}

fn export_cmd(input: &Path, format: Format) -> Result<(String, i32)> {
    let c = export::parse_complex_json(&read_file(input)?)?;
    let out = match format {
        Format::Json => export::complex_to_json(&c),
        Format::Svg => export::complex_to_svg(&c)?,
        Format::Obj => export::complex_to_obj(&c)?,
        Format::Text => return Err(unsupported("export", Format::Text)),
    };
    Ok((out, 0))
}
