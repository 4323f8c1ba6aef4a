//! Command-line front end: configure prime/group/variant/window, run
//! schedules, compare against closed forms, emit tables and JSON.
//!
//! Subcommands:
//!
//! * `pages`  — run a differential schedule; emit the requested pages and a
//!   per-bidegree diff against the closed form when one is displayed.
//! * `tc`     — assemble a TC or K generator table; for `tc` also verify
//!   the Poincaré series against the closed formula.
//! * `verify` — run the cross-module verification suites.
//!
//! Exit codes: `0` success, `1` verification or diff failure, `2`
//! configuration errors.  Output is deterministic: identical configuration
//! yields byte-identical output, and nothing is written on failure paths
//! until the full output is assembled.
//!
//! Configuration precedence is flags > config file > defaults; the config
//! file is a flat `key=value` format mirroring the flag names.  The
//! environment variable `REDSHIFT_THREADS` (positive integer) caps
//! parallelism; the engine's reference path is single-threaded, so any
//! accepted value runs the bit-identical sequential computation.

pub mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::catalog::{self, e2_page_generators, e2_term, GroupTag, VariantTag, INFINITY};
use crate::fpalg::{Prime, Window};
use crate::ssengine::{run_schedule, Page};
use crate::tcasm;

#[derive(Parser)]
#[command(
    name = "redshift",
    about = "Symbolic Tate and homotopy fixed-point spectral sequences over F_p",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a differential schedule and emit pages.
    Pages(PagesArgs),
    /// Assemble a TC or K generator table.
    Tc(TcArgs),
    /// Run the cross-module verification suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Default)]
struct PagesArgs {
    /// Odd prime (values below 7 run in formal mode).
    #[arg(long)]
    prime: Option<u32>,
    /// Group: `T` or `Cp^N`.
    #[arg(long)]
    group: Option<String>,
    /// Variant: `hfp`, `tate` or `loc-hfp`.
    #[arg(long)]
    variant: Option<String>,
    /// Window `s=A..B,n=C..D` (inclusive).
    #[arg(long)]
    window: Option<String>,
    /// Page selector: a page index, `inf`, or `displayed`.
    #[arg(long)]
    page: Option<String>,
    /// Output format: `json`, `table` or `poincare`.
    #[arg(long)]
    emit: Option<String>,
    /// Output path (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value configuration file mirroring the flag names.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TcArgs {
    /// Odd prime.
    #[arg(long)]
    prime: u32,
    /// Which table to assemble.
    #[arg(value_enum)]
    which: TcWhich,
    /// Output format: `json`, `table` or `poincare`.
    #[arg(long, default_value = "table")]
    emit: String,
    /// Output path (standard output when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TcWhich {
    Tc,
    #[value(name = "k-padic")]
    KPadic,
    #[value(name = "k-local")]
    KLocal,
    #[value(name = "tc-height-0")]
    TcHeight0,
    #[value(name = "tc-height-1")]
    TcHeight1,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Pipeline prime for the suite (3 or 5).
    #[arg(long, default_value_t = 3)]
    prime: u32,
    #[arg(value_enum)]
    suite: Suite,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    Quick,
    Full,
}

/// A fully resolved `pages` run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub prime: Prime,
    pub group: GroupTag,
    pub variant: VariantTag,
    pub window: Window,
    pub page_selector: PageSelector,
    pub emit: EmitFormat,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PageSelector {
    Index(i64),
    Infinity,
    Displayed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Json,
    Table,
    Poincare,
}

fn config_error(msg: &str) -> String {
    format!("configuration error: {msg}")
}

pub fn parse_group(s: &str) -> Result<GroupTag, String> {
    if s == "T" {
        return Ok(GroupTag::Circle);
    }
    if let Some(rest) = s.strip_prefix("Cp^") {
        let n: u32 = rest
            .parse()
            .map_err(|_| config_error(&format!("bad group index in {s:?}")))?;
        if n == 0 {
            return Err(config_error("group index must be >= 1"));
        }
        return Ok(GroupTag::CyclicPPower(n));
    }
    Err(config_error(&format!(
        "unknown group {s:?}; expected T or Cp^N"
    )))
}

pub fn parse_variant(s: &str) -> Result<VariantTag, String> {
    match s {
        "hfp" => Ok(VariantTag::HomotopyFixedPoint),
        "tate" => Ok(VariantTag::Tate),
        "loc-hfp" => Ok(VariantTag::MuLocalizedHFP),
        _ => Err(config_error(&format!(
            "unknown variant {s:?}; expected hfp, tate or loc-hfp"
        ))),
    }
}

pub fn parse_window(s: &str) -> Result<Window, String> {
    let err = || config_error(&format!("bad window {s:?}; expected s=A..B,n=C..D"));
    let mut s_range = None;
    let mut n_range = None;
    for part in s.split(',') {
        let (key, range) = part.split_once('=').ok_or_else(err)?;
        let (lo, hi) = range.split_once("..").ok_or_else(err)?;
        let lo: i64 = lo.parse().map_err(|_| err())?;
        let hi: i64 = hi.parse().map_err(|_| err())?;
        match key {
            "s" => s_range = Some((lo, hi)),
            "n" => n_range = Some((lo, hi)),
            _ => return Err(err()),
        }
    }
    let (s_min, s_max) = s_range.ok_or_else(err)?;
    let (n_min, n_max) = n_range.ok_or_else(err)?;
    if s_min > s_max || n_min > n_max {
        return Err(config_error("window bounds are inverted"));
    }
    Ok(Window::new(s_min, s_max, n_min, n_max))
}

fn parse_page_selector(s: &str) -> Result<PageSelector, String> {
    match s {
        "inf" => Ok(PageSelector::Infinity),
        "displayed" => Ok(PageSelector::Displayed),
        _ => {
            let r: i64 = s
                .parse()
                .map_err(|_| config_error(&format!("bad page selector {s:?}")))?;
            if r < 2 {
                return Err(config_error("page index must be >= 2"));
            }
            Ok(PageSelector::Index(r))
        }
    }
}

fn parse_emit(s: &str) -> Result<EmitFormat, String> {
    match s {
        "json" => Ok(EmitFormat::Json),
        "table" => Ok(EmitFormat::Table),
        "poincare" => Ok(EmitFormat::Poincare),
        _ => Err(config_error(&format!(
            "unknown emit format {s:?}; expected json, table or poincare"
        ))),
    }
}

fn read_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_error(&format!("cannot read {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            config_error(&format!(
                "{}:{}: expected key=value",
                path.display(),
                lineno + 1
            ))
        })?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

impl PagesArgs {
    /// Resolve flags > config file > defaults.
    fn resolve(self) -> Result<RunConfig, String> {
        let file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let pick = |flag: Option<String>, key: &str, default: Option<&str>| -> Option<String> {
            flag.or_else(|| file.get(key).cloned())
                .or_else(|| default.map(str::to_string))
        };
        let prime = self
            .prime
            .map(|p| p.to_string())
            .or_else(|| file.get("prime").cloned())
            .ok_or_else(|| config_error("missing --prime"))?;
        let prime: u32 = prime
            .parse()
            .map_err(|_| config_error(&format!("bad prime {prime:?}")))?;
        let prime = Prime::new(prime).map_err(|e| config_error(&e.to_string()))?;
        let group = parse_group(&pick(self.group, "group", Some("T")).unwrap())?;
        let variant = parse_variant(&pick(self.variant, "variant", Some("tate")).unwrap())?;
        let window =
            parse_window(&pick(self.window, "window", Some("s=-200..200,n=0..60")).unwrap())?;
        let page_selector = parse_page_selector(&pick(self.page, "page", Some("inf")).unwrap())?;
        let emit = parse_emit(&pick(self.emit, "emit", Some("table")).unwrap())?;
        let out = self.out.or_else(|| file.get("out").map(PathBuf::from));
        Ok(RunConfig {
            prime,
            group,
            variant,
            window,
            page_selector,
            emit,
            out,
        })
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
    }
}

fn render_page_table(page: &Page) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# p={}{} page {}{} window {} safe {}",
        page.ambient.prime.get(),
        if page.ambient.prime.is_formal() {
            " (formal)"
        } else {
            ""
        },
        page.index,
        if page.is_infinity { " (E^inf)" } else { "" },
        page.window,
        page.safe_region,
    );
    let _ = writeln!(out, "{:>8} {:>8} {:>4}  basis", "s", "n", "dim");
    for ((s, n), dim) in page.dims() {
        let basis: Vec<String> = page
            .basis_elements(s, n)
            .iter()
            .map(|e| page.ambient.format_element(e))
            .collect();
        let _ = writeln!(out, "{s:>8} {n:>8} {dim:>4}  {}", basis.join(", "));
    }
    out
}

fn render_page_poincare(page: &Page) -> String {
    let mut per_degree: BTreeMap<i64, i64> = BTreeMap::new();
    for ((s, n), dim) in page.dims() {
        if page.safe_region.contains(s, n) {
            *per_degree.entry(n).or_insert(0) += dim as i64;
        }
    }
    let mut out = format!(
        "# p={}{} page {} dims per total degree on safe region {}\n",
        page.ambient.prime.get(),
        if page.ambient.prime.is_formal() {
            " (formal)"
        } else {
            ""
        },
        page.index,
        page.safe_region
    );
    out.push_str(&tcasm::render_poincare(&per_degree));
    out
}

/// Run a schedule and emit the requested pages with closed-form diffs.
/// Returns the exit code.
pub fn cmd_pages(config: &RunConfig) -> Result<i32, String> {
    let alg = e2_term(config.group, config.variant, config.prime);
    let schedule = catalog::schedule(config.group, config.variant, config.prime, &config.window);
    let pages = run_schedule(&alg, e2_page_generators(&alg), &schedule, &config.window)
        .map_err(|e| format!("engine error: {e}"))?;

    let selected: Vec<&Page> = match config.page_selector {
        PageSelector::Infinity => vec![pages.last().expect("schedule run yields pages")],
        PageSelector::Index(r) => {
            let page = pages
                .iter()
                .rev()
                .find(|p| p.index <= r)
                .ok_or_else(|| config_error(&format!("no page at index {r}")))?;
            vec![page]
        }
        PageSelector::Displayed => {
            let indices =
                catalog::displayed_page_indices(config.group, config.variant, config.prime);
            let mut out = Vec::new();
            for r in indices {
                let page = if r == INFINITY {
                    pages.last()
                } else {
                    pages.iter().rev().find(|p| p.index <= r)
                };
                if let Some(p) = page {
                    if !out.iter().any(|q: &&Page| q.index == p.index) {
                        out.push(p);
                    }
                }
            }
            out
        }
    };

    let mut exit = 0i32;
    let mut output = String::new();
    for page in selected {
        match config.emit {
            EmitFormat::Json => {
                output.push_str(&serde_json::to_string_pretty(&page.dump_json()).unwrap());
                output.push('\n');
            }
            EmitFormat::Table => output.push_str(&render_page_table(page)),
            EmitFormat::Poincare => output.push_str(&render_page_poincare(page)),
        }
        // Closed-form diff when displayed.
        let lookup = if page.is_infinity && config.group == GroupTag::Circle {
            INFINITY
        } else {
            page.index
        };
        match catalog::closed_form(config.group, config.variant, lookup, config.prime) {
            Err(_) => {
                eprintln!(
                    "note: no closed form displayed for page {}; diff unavailable",
                    page.index
                );
            }
            Ok(cf) => {
                let reference = catalog::materialize_dims(
                    &alg,
                    config.prime,
                    config.group,
                    config.variant,
                    &cf,
                    &config.window,
                );
                let engine = page.dims();
                let mut keys: std::collections::BTreeSet<(i64, i64)> =
                    engine.keys().copied().collect();
                keys.extend(reference.keys().copied());
                let mut mismatches = 0usize;
                for k in keys {
                    if !page.safe_region.contains(k.0, k.1) {
                        continue;
                    }
                    let a = engine.get(&k).copied().unwrap_or(0);
                    let b = reference.get(&k).copied().unwrap_or(0);
                    if a != b {
                        eprintln!(
                            "diff page {} at (s,n)=({},{}): engine {a}, closed form {b}",
                            page.index, k.0, k.1
                        );
                        mismatches += 1;
                    }
                }
                if mismatches > 0 {
                    eprintln!("page {}: {mismatches} mismatching cells", page.index);
                    exit = 1;
                } else {
                    eprintln!("page {}: diff clean against closed form", page.index);
                }
            }
        }
    }
    write_output(&config.out, &output)?;
    Ok(exit)
}

/// Assemble and emit a TC/K table.  Returns the exit code.
pub fn cmd_tc(
    prime: u32,
    which: TcWhich,
    emit: &str,
    out: &Option<PathBuf>,
) -> Result<i32, String> {
    let p = Prime::new(prime).map_err(|e| config_error(&e.to_string()))?;
    let emit = parse_emit(emit)?;
    let table = match which {
        TcWhich::Tc => tcasm::assemble_tc(p),
        TcWhich::KPadic => tcasm::assemble_k_padic(p),
        TcWhich::KLocal => tcasm::assemble_k_local(p),
        TcWhich::TcHeight0 => tcasm::assemble_tc_height(0, p),
        TcWhich::TcHeight1 => tcasm::assemble_tc_height(1, p),
    }
    .map_err(|e| format!("assembly error: {e}"))?;

    let mut exit = 0i32;
    if matches!(which, TcWhich::Tc) {
        let series = tcasm::poincare_series(&table).map_err(|e| e.to_string())?;
        if series == tcasm::reference_poincare(p) {
            eprintln!("poincare: OK (matches the closed formula)");
        } else {
            eprintln!("poincare: MISMATCH against the closed formula");
            exit = 1;
        }
    }
    let content = match emit {
        EmitFormat::Json => {
            let mut s = serde_json::to_string_pretty(&table.dump_json()).unwrap();
            s.push('\n');
            s
        }
        EmitFormat::Table => table.render_text(),
        EmitFormat::Poincare => {
            let series = tcasm::poincare_series(&table)
                .map_err(|e| config_error(&format!("poincare emit: {e}")))?;
            tcasm::render_poincare(&series)
        }
    };
    write_output(out, &content)?;
    Ok(exit)
}

/// Run a verification suite, printing one pass/fail line per check.
pub fn cmd_verify(prime: u32, suite: Suite) -> Result<i32, String> {
    if prime != 3 && prime != 5 {
        return Err(config_error(
            "verify pipelines are pinned for --prime 3 or 5",
        ));
    }
    let outcomes = match suite {
        Suite::Quick => verify::quick_suite(prime),
        Suite::Full => verify::full_suite(prime),
    };
    let mut failed = 0usize;
    for o in &outcomes {
        println!("{}", o.render());
        if !o.passed {
            failed += 1;
        }
    }
    println!("{} checks, {} failed", outcomes.len(), failed);
    Ok(if failed > 0 { 1 } else { 0 })
}

fn check_thread_env() -> Result<(), String> {
    if let Ok(v) = std::env::var("REDSHIFT_THREADS") {
        match v.parse::<u32>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(config_error(&format!(
                "REDSHIFT_THREADS must be a positive integer, got {v:?}"
            ))),
        }
    } else {
        Ok(())
    }
}

/// CLI entry point; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    if let Err(e) = check_thread_env() {
        eprintln!("{e}");
        return 2;
    }
    let result = match cli.command {
        Command::Pages(args) => args.resolve().and_then(|config| cmd_pages(&config)),
        Command::Tc(args) => cmd_tc(args.prime, args.which, &args.emit, &args.out),
        Command::Verify(args) => cmd_verify(args.prime, args.suite),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("{msg}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        let w = parse_window("s=-800..800,n=0..80").unwrap();
        assert_eq!(w, Window::new(-800, 800, 0, 80));
        assert!(parse_window("s=10..-10,n=0..1").is_err());
        assert!(parse_window("nonsense").is_err());
    }

    #[test]
    fn group_parsing() {
        assert_eq!(parse_group("T").unwrap(), GroupTag::Circle);
        assert_eq!(parse_group("Cp^2").unwrap(), GroupTag::CyclicPPower(2));
        assert!(parse_group("Cp^0").is_err());
        assert!(parse_group("D8").is_err());
    }

    #[test]
    fn selector_parsing() {
        assert_eq!(parse_page_selector("inf").unwrap(), PageSelector::Infinity);
        assert_eq!(
            parse_page_selector("displayed").unwrap(),
            PageSelector::Displayed
        );
        assert_eq!(parse_page_selector("14").unwrap(), PageSelector::Index(14));
        assert!(parse_page_selector("1").is_err());
    }
}
