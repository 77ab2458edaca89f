//! The `ghs` command line.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or parse error,
//! 3 reference or replay error, 4 search budget exceeded under `--strict`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use ghs_core::bounds::{lower_bound, BoundsError, Family};
use ghs_core::ghs::{ghs_genus, validate_ghs};
use ghs_core::manifold::DecompositionGraph;
use ghs_core::sog::Link;

use crate::checks::run_samples;
use crate::report::{
    run_search, search_consistent, verify_row, SearchLine, VerifyOptions, CERTIFICATE_LABEL,
};
use crate::scenario::{ghs_block, parse, ScenarioFile};
use crate::script::replay;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFERENCE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "ghs",
    version,
    about = "Generalized Heegaard splitting scenarios and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the scenario of a counter-example family.
    Family {
        /// flip, torus-boundary or closed
        tag: String,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the genus of a named GHS.
    Genus { scenario: PathBuf, ghs: String },
    /// Replay a move script on a named GHS.
    Reduce {
        scenario: PathBuf,
        ghs: String,
        script: PathBuf,
        /// Write the scenario with the result added as GHS `result`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the family arithmetic, optionally with the bounded search.
    Verify(VerifyArgs),
    /// Run the bounded search between the endpoints of a scenario file.
    Search {
        scenario: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the scenario with the path entries added.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Largest genus a search state may have.
    #[arg(long)]
    pub cap: Option<u32>,
    /// Largest number of search states.
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: usize,
    /// Exit with code 4 when the budget runs out.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// flip, torus-boundary or closed
    pub tag: String,
    /// A single value `g` or a range `a..b`.
    #[arg(long, conflicts_with = "g_range")]
    pub g: Option<String>,
    #[arg(long)]
    pub g_range: Option<String>,
    #[arg(long)]
    pub search: bool,
    #[command(flatten)]
    pub limits: SearchArgs,
    /// Seed for the sampled property checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random GHSs for the sampled property checks.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command: exit code and message for stderr.
struct Failure(i32, String);

type CmdResult = Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn reference(msg: impl Into<String>) -> Failure {
    Failure(EXIT_REFERENCE, msg.into())
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {}", msg);
            code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CmdResult {
    match cmd {
        Command::Family { tag, g, out: path } => cmd_family(&tag, g, path.as_deref(), out),
        Command::Genus { scenario, ghs } => cmd_genus(&scenario, &ghs, out),
        Command::Reduce {
            scenario,
            ghs,
            script,
            out: path,
        } => cmd_reduce(&scenario, &ghs, &script, path.as_deref(), out),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Search {
            scenario,
            search,
            out: path,
        } => cmd_search(&scenario, &search, path.as_deref(), out),
    }
}

fn family_tag(tag: &str) -> Result<Family, Failure> {
    match Family::from_tag(tag) {
        Some(f) if f != Family::Custom => Ok(f),
        _ => Err(usage(format!("unknown family `{}`", tag))),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure(EXIT_USAGE, format!("cannot write output: {}", e)))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {}", path.display(), e)))
}

fn load(path: &Path) -> Result<ScenarioFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {}", path.display(), e)))?;
    parse(&text).map_err(|e| usage(format!("{}: {}", path.display(), e)))
}

fn bounds_failure(e: BoundsError) -> Failure {
    match e {
        BoundsError::Ghs(_) | BoundsError::Manifold(_) => reference(e.to_string()),
        _ => usage(e.to_string()),
    }
}

fn cmd_family(tag: &str, g: u32, path: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let family = family_tag(tag)?;
    let s = family.build(g).map_err(bounds_failure)?;
    let text = ScenarioFile::from_scenario(&s).to_text();
    match path {
        Some(p) => write_file(p, &text)?,
        None => emit(out, &text)?,
    }
    Ok(EXIT_OK)
}

fn checked_genus(m: &DecompositionGraph, file: &ScenarioFile, name: &str) -> Result<u32, Failure> {
    let h = file
        .get(name)
        .ok_or_else(|| reference(format!("no GHS named `{}`", name)))?;
    validate_ghs(m, h).map_err(|errs| {
        let msgs: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        reference(format!("GHS `{}` is invalid: {}", name, msgs.join("; ")))
    })?;
    ghs_genus(m, h).map_err(|e| reference(e.to_string()))
}

fn cmd_genus(path: &Path, name: &str, out: &mut dyn Write) -> CmdResult {
    let file = load(path)?;
    let genus = checked_genus(file.graph(), &file, name)?;
    emit(out, &format!("{}\n", genus))?;
    Ok(EXIT_OK)
}

fn cmd_reduce(
    path: &Path,
    name: &str,
    script_path: &Path,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let mut file = load(path)?;
    let script = fs::read_to_string(script_path)
        .map_err(|e| usage(format!("cannot read {}: {}", script_path.display(), e)))?;
    let before = checked_genus(file.graph(), &file, name)?;
    let start = file.get(name).expect("checked above").clone();
    let r = replay(file.graph(), &start, &script);
    let mut text = format!("GENUS_BEFORE {}\n", before);
    for s in &r.steps {
        text.push_str(&format!(
            "MOVE {} {} {} {} CHECK {}\n",
            s.index,
            if s.destabilizing {
                "DESTAB"
            } else {
                "NON_DESTAB"
            },
            s.before,
            s.after,
            if s.genus_law_holds() { "PASS" } else { "FAIL" }
        ));
    }
    if let Some(e) = &r.error {
        text.push_str(&format!("FAILED_MOVE {}\n", e.index()));
        emit(out, &text)?;
        return Err(reference(e.to_string()));
    }
    let after = ghs_genus(file.graph(), &r.ghs).map_err(|e| reference(e.to_string()))?;
    text.push_str(&format!("GENUS_AFTER {}\n", after));
    text.push_str(&ghs_block("result", &r.ghs));
    emit(out, &text)?;
    if let Some(p) = out_path {
        file.put("result", r.ghs.clone());
        write_file(p, &file.to_text())?;
    }
    let ok = r.steps.iter().all(|s| s.genus_law_holds());
    Ok(if ok { EXIT_OK } else { EXIT_CHECK })
}

/// `g` or `a..b` (inclusive).
fn parse_g_spec(spec: &str) -> Result<(u32, u32), Failure> {
    let bad = || usage(format!("bad genus range `{}`", spec));
    let (a, b) = match spec.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let g = spec.trim().parse().map_err(|_| bad())?;
            (g, g)
        }
    };
    if a < 2 || a > b {
        return Err(usage(format!(
            "genus range `{}` must satisfy 2 <= a <= b",
            spec
        )));
    }
    Ok((a, b))
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let family = family_tag(&args.tag)?;
    let spec = args
        .g
        .as_deref()
        .or(args.g_range.as_deref())
        .ok_or_else(|| usage("one of --g or --g-range is required"))?;
    let (lo, hi) = parse_g_spec(spec)?;
    let opts = VerifyOptions {
        search: args.search,
        cap: args.limits.cap,
        budget: args.limits.budget,
    };
    let rows = (lo..=hi)
        .map(|g| verify_row(family, g, &opts))
        .collect::<Result<Vec<_>, _>>()
        .map_err(bounds_failure)?;
    let mut ok = rows.iter().all(|r| r.passed());
    let mut text = String::new();
    for r in &rows {
        text.push_str(&r.render());
        text.push('\n');
    }
    if args.samples > 0 {
        text.push_str(&format!(
            "PROPERTIES seed {} samples {}\n",
            args.seed, args.samples
        ));
        match run_samples(args.seed, args.samples, 8) {
            Ok(s) => {
                text.push_str(&format!("CUTS_CHECKED {}\n", s.cuts));
                text.push_str(&format!("MOVES_PRESERVED {}\n", s.preserved));
                text.push_str(&format!("MOVES_DECREASED {}\n", s.decreased));
                text.push_str("CHECK properties PASS\n");
            }
            Err(e) => {
                text.push_str(&format!("# {}\n", e));
                text.push_str("CHECK properties FAIL\n");
                ok = false;
            }
        }
        text.push('\n');
    }
    text.push_str(if ok { "RESULT PASS\n" } else { "RESULT FAIL\n" });
    emit(out, &text)?;
    if let Some(p) = &args.out {
        write_file(p, &text)?;
    }
    let blown = rows.iter().any(|r| r.search == SearchLine::BudgetExceeded);
    Ok(if !ok {
        EXIT_CHECK
    } else if blown && args.limits.strict {
        EXIT_BUDGET
    } else {
        EXIT_OK
    })
}

fn cmd_search(
    path: &Path,
    args: &SearchArgs,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let mut file = load(path)?;
    let s = file
        .to_scenario()
        .ok_or_else(|| reference("the scenario names no ENDPOINTS"))?;
    let lb = lower_bound(&s.config).ok();
    let cap = match (args.cap, lb) {
        (Some(c), _) => c,
        (None, Some(lb)) if lb >= 1 => (lb - 1) as u32,
        _ => {
            return Err(usage(
                "--cap is required when the scenario has no lower bound",
            ))
        }
    };
    let run = run_search(&s, cap, args.budget).map_err(bounds_failure)?;
    let mut text = format!("FAMILY {}\nG {}\nCAP {}\n", s.family.tag(), s.g, cap);
    if let Some(lb) = lb {
        text.push_str(&format!("LOWER_BOUND {}\n", lb));
    }
    text.push_str(&format!("SEARCH_RESULT {}\n", run.line.render()));
    text.push_str(&format!("STATES_EXPLORED {}\n", run.states));
    if matches!(run.line, SearchLine::UnreachableBelow(_)) {
        text.push_str(&format!("CERTIFICATE {}\n", CERTIFICATE_LABEL));
    }
    if let Some(sog) = &run.sog {
        text.push_str(&format!("PATH_LENGTH {}\n", sog.entries.len()));
        for (i, mv) in sog.links.iter().enumerate() {
            let (dir, mv) = match mv {
                Link::Down(mv) => ("down", mv),
                Link::Up(mv) => ("up", mv),
            };
            text.push_str(&format!("LINK {} {} {}\n", i + 1, dir, mv));
        }
    }
    let ok = lb.is_none_or(|lb| search_consistent(&s, &run, lb));
    if lb.is_some() {
        text.push_str(&format!(
            "CHECK search {}\n",
            if ok { "PASS" } else { "FAIL" }
        ));
    }
    emit(out, &text)?;
    if let (Some(p), Some(sog)) = (out_path, &run.sog) {
        for (i, h) in sog.entries.iter().enumerate() {
            file.put(&format!("path:{}", i), h.clone());
        }
        write_file(p, &file.to_text())?;
    }
    Ok(if !ok {
        EXIT_CHECK
    } else if run.line == SearchLine::BudgetExceeded && args.strict {
        EXIT_BUDGET
    } else {
        EXIT_OK
    })
}
