//! Command dispatch for the `preempt` binary. Kept in the library so tests can
//! drive it in-process.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dsa::{build_framework, state_space, PropertyReport};
use crate::error::{Error, Result};
use crate::explain::{build_explanation, diagnose, render_dialogue};
use crate::hierarchy::{is_locally_optimized, verdict, NormCase};
use crate::normfile::load_normfile;
use crate::render;
use crate::selfcheck::{check_case, run_selfcheck, selfcheck_case};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Dot,
    Json,
    Dialogue,
}

#[derive(Debug, Args)]
struct Common {
    /// Norm file to read.
    file: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Plain ASCII output (B for ⊥, d for δ, <> for ⟨⟩).
    #[arg(long)]
    ascii: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print OBLIGATORY, FORBIDDEN or NEITHER with the maximal sub-bases.
    Verdict(Common),
    /// Print the derivation state of every sub-base under every knowledge set.
    Statespace(Common),
    /// Emit the DS-argument framework.
    Framework(Common),
    /// Explain the verdict with dispute trees.
    Explain {
        #[command(flatten)]
        common: Common,
        /// Emit both rival tree families, whatever the verdict.
        #[arg(long)]
        diagnostic: bool,
    },
    /// Report local optimality and the framework and extension properties.
    Check(Common),
    /// Run the cross-checks over seeded random cases, or over one file.
    Selfcheck {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

#[derive(Debug, Parser)]
#[command(name = "preempt", version, about = "Obligation verdicts and preemption explanations for prioritized norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

struct Outcome {
    text: String,
    success: bool,
}

impl From<String> for Outcome {
    fn from(text: String) -> Self {
        Outcome { text, success: true }
    }
}

fn usage(cmd: &str, format: Format) -> Error {
    let name = format
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    Error::Usage(format!("`{cmd}` does not support --format {name}"))
}

fn cmd_verdict(c: &Common) -> Result<Outcome> {
    let case = load_normfile(&c.file)?;
    let v = verdict(&case);
    Ok(match c.format.unwrap_or(Format::Text) {
        Format::Text => render::verdict_text(&v, &case, c.ascii),
        Format::Json => render::verdict_json(&v, &case)?,
        f => return Err(usage("verdict", f)),
    }
    .into())
}

fn cmd_statespace(c: &Common) -> Result<Outcome> {
    let case = load_normfile(&c.file)?;
    let space = state_space(&case)?;
    let fw = build_framework(&case)?;
    Ok(match c.format.unwrap_or(Format::Text) {
        Format::Text => render::statespace_text(&space, &fw, &case, c.ascii),
        Format::Json => render::statespace_json(&space, &fw, &case)?,
        f => return Err(usage("statespace", f)),
    }
    .into())
}

fn cmd_framework(c: &Common) -> Result<Outcome> {
    let case = load_normfile(&c.file)?;
    let fw = build_framework(&case)?;
    Ok(match c.format.unwrap_or(Format::Dot) {
        Format::Dot => render::framework_dot(&fw, c.ascii),
        Format::Json => render::framework_json(&fw, &case)?,
        Format::Text => render::framework_text(&fw, &case, c.ascii),
        f => return Err(usage("framework", f)),
    }
    .into())
}

fn cmd_explain(c: &Common, diagnostic: bool) -> Result<Outcome> {
    let case = load_normfile(&c.file)?;
    let fw = build_framework(&case)?;
    let format = c.format.unwrap_or(Format::Dialogue);
    if format == Format::Text {
        return Err(usage("explain", format));
    }
    if diagnostic {
        let d = diagnose(&case)?;
        return Ok(match format {
            Format::Json => render::diagnosis_json(&d, &fw)?,
            Format::Dot => render::diagnosis_dot(&d, &fw, c.ascii),
            _ => format!(
                "# verdict {}\n{}{}",
                d.verdict,
                render_dialogue(&d.obligatory, &fw, &case, c.ascii),
                render_dialogue(&d.forbidden, &fw, &case, c.ascii)
            ),
        }
        .into());
    }
    let expl = build_explanation(&case)?;
    Ok(match format {
        Format::Json => render::explanation_json(&expl, &fw)?,
        Format::Dot => render::explanation_dot(&expl, &fw, c.ascii),
        _ => render_dialogue(&expl, &fw, &case, c.ascii),
    }
    .into())
}

#[derive(Serialize)]
struct CheckDoc<'a> {
    verdict: String,
    locally_optimized: bool,
    non_decisive: Vec<String>,
    checks: Vec<CheckEntry<'a>>,
    passed: bool,
}

#[derive(Serialize)]
struct CheckEntry<'a> {
    name: &'a str,
    applicable: bool,
    passed: bool,
    detail: &'a str,
}

fn check_text(case: &NormCase, report: &PropertyReport) -> Result<String> {
    let lo = is_locally_optimized(case)?;
    let mut out = format!("verdict: {}\n", verdict(case).kind);
    out.push_str(&format!(
        "locally optimized: {}\n",
        if lo.optimized { "yes" } else { "no" }
    ));
    for fs in &lo.non_decisive {
        out.push_str(&format!("  undecided maximal subset: {fs}\n"));
    }
    let width = report.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &report.checks {
        let status = match (c.applicable, c.passed) {
            (false, _) => "n/a ",
            (true, true) => "pass",
            (true, false) => "FAIL",
        };
        let name = c.name;
        out.push_str(&format!("{status} {name:<width$}"));
        if !c.passed || !c.applicable {
            out.push_str(&format!("  {}", c.detail));
        }
        out = out.trim_end().to_string();
        out.push('\n');
    }
    Ok(out)
}

fn cmd_check(c: &Common) -> Result<Outcome> {
    let case = load_normfile(&c.file)?;
    let report = check_case(&case)?;
    let text = match c.format.unwrap_or(Format::Text) {
        Format::Text => check_text(&case, &report)?,
        Format::Json => {
            let lo = is_locally_optimized(&case)?;
            let doc = CheckDoc {
                verdict: verdict(&case).kind.to_string(),
                locally_optimized: lo.optimized,
                non_decisive: lo.non_decisive.iter().map(|fs| fs.to_string()).collect(),
                checks: report
                    .checks
                    .iter()
                    .map(|c| CheckEntry {
                        name: c.name,
                        applicable: c.applicable,
                        passed: c.passed,
                        detail: &c.detail,
                    })
                    .collect(),
                passed: report.all_passed(),
            };
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        f => return Err(usage("check", f)),
    };
    Ok(Outcome {
        text,
        success: report.all_passed(),
    })
}

fn cmd_selfcheck(file: Option<&PathBuf>, seed: u64, count: usize) -> Result<Outcome> {
    let report = match file {
        Some(path) => selfcheck_case(&load_normfile(path)?)?,
        None => run_selfcheck(seed, count)?,
    };
    Ok(Outcome {
        text: report.render(),
        success: report.all_passed(),
    })
}

/// Exit code for failed checks; shares its value with the other
/// semantic failures.
pub const CHECK_FAILED: i32 = 5;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Verdict(c) => cmd_verdict(c),
        Command::Statespace(c) => cmd_statespace(c),
        Command::Framework(c) => cmd_framework(c),
        Command::Explain { common, diagnostic } => cmd_explain(common, *diagnostic),
        Command::Check(c) => cmd_check(c),
        Command::Selfcheck { file, seed, count } => cmd_selfcheck(file.as_ref(), *seed, *count),
    };
    match result {
        Ok(outcome) => {
            if out.write_all(outcome.text.as_bytes()).is_err() {
                return 1;
            }
            if outcome.success {
                0
            } else {
                CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
