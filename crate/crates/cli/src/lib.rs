//! Command-line front end: `list`, `compute`, `check`, `check-all`, `validate`.

use std::collections::BTreeMap;
use std::io::{IsTerminal, Write};
use std::path::Path;
use std::thread;

use bicohom::catalog;
use bicohom::dsl::{self, Mode, ModelDocument};
use bicohom::model::Model;
use bicohom::report::{self, Analysis, ReportError, TextOptions, USER_LABEL};
use bicohom::Rational;
use clap::{Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "bicohom", version, about = "Dolbeault, Bott-Chern, Aeppli and de Rham cohomology of invariant complex structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List built-in models.
    List,
    /// Compute all cohomologies of a built-in model or a model file.
    Compute {
        /// Catalog id or path to a model file
        target: String,
        /// Parameter override, `name=value`.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Show class representatives (text format).
        #[arg(long)]
        representatives: bool,
        /// Show every natural map (text format).
        #[arg(long)]
        maps: bool,
    },
    /// Compare a built-in model against its expected data.
    Check {
        /// Catalog id
        id: String,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
    },
    /// Check every built-in model.
    CheckAll,
    /// Parse and validate a model file.
    Validate { file: String },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVALID, message: message.into() }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Catalog(catalog::CatalogError::UnknownId(id)) => Failure::usage(format!("unknown model '{id}'")),
            other => Failure::invalid(other.to_string()),
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = match cli.command {
        Command::List => list(out),
        Command::Compute { target, params, format, representatives, maps } => {
            compute(out, &target, &params, format, representatives, maps)
        }
        Command::Check { id, params } => check(out, &id, &params),
        Command::CheckAll => check_all(out),
        Command::Validate { file } => validate(out, &file),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, Rational>, Failure> {
    let mut map = BTreeMap::new();
    for item in raw {
        let (k, v) = item.split_once('=').ok_or_else(|| Failure::usage(format!("--param expects NAME=VALUE, got '{item}'")))?;
        let value: Rational =
            v.trim().parse().map_err(|_| Failure::usage(format!("--param {k}: '{v}' is not a rational number")))?;
        map.insert(k.trim().to_string(), value);
    }
    Ok(map)
}

fn list(out: &mut dyn Write) -> Result<i32, Failure> {
    for info in catalog::list() {
        let params: Vec<String> = info
            .params
            .iter()
            .map(|p| format!("{}={}{}", p.name, p.default, if p.nonzero { " (nonzero)" } else { "" }))
            .collect();
        let params = if params.is_empty() { "-".to_string() } else { params.join(", ") };
        let _ = writeln!(out, "{:<20} {:<28} {}", info.id, params, info.description);
    }
    Ok(EXIT_OK)
}

fn is_file_target(target: &str) -> bool {
    target.contains('/') || target.contains('.') || Path::new(target).is_file()
}

fn read_document(path: &str) -> Result<ModelDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
    match dsl::parse(&text) {
        Ok((doc, warnings)) => {
            for w in warnings {
                eprintln!("{path}:{w}");
            }
            Ok(doc)
        }
        Err(diags) => {
            Err(Failure::invalid(diags.iter().map(|d| format!("{path}:{d}")).collect::<Vec<_>>().join("\n")))
        }
    }
}

fn instantiate(path: &str, doc: &ModelDocument, params: &BTreeMap<String, Rational>) -> Result<Model, Failure> {
    doc.instantiate(params).map_err(|e| Failure::invalid(format!("{path}: {e}")))
}

fn compute(
    out: &mut dyn Write,
    target: &str,
    raw_params: &[String],
    format: Format,
    representatives: bool,
    maps: bool,
) -> Result<i32, Failure> {
    let params = parse_params(raw_params)?;
    let analysis: Analysis = if is_file_target(target) {
        let doc = read_document(target)?;
        let model = instantiate(target, &doc, &params)?;
        report::analyze_model(&model, USER_LABEL).map_err(|e| Failure::invalid(format!("{target}: {e}")))?
    } else {
        report::analyze_catalog(target, &params)?.0
    };
    let r = &analysis.report;
    let text = match format {
        Format::Json => report::render_json(r),
        Format::Csv => report::render_csv(r),
        Format::Text => {
            let color = std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal();
            report::render_text(r, &TextOptions { representatives, all_maps: maps, color })
        }
    };
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

fn check_one(id: &str, params: &BTreeMap<String, Rational>) -> Result<Vec<String>, Failure> {
    let (a, mismatches) = report::check_catalog(id, params)?;
    let mut lines: Vec<String> = mismatches.iter().map(|m| m.to_string()).collect();
    // a failed invariant is a mismatch too, even when the tables agree
    let c = &a.report.checks;
    for (name, ok) in [
        ("bicomplex identities", c.bicomplex),
        ("conjugation symmetry", c.conjugation_symmetry),
        ("Frolicher equality", c.frolicher_equality),
        ("duality", c.duality),
        ("Delta^1 = 0", c.delta1_zero),
        ("map composition", c.map_composition),
    ] {
        if !ok {
            lines.push(format!("check failed: {name}"));
        }
    }
    Ok(lines)
}

fn print_check(out: &mut dyn Write, id: &str, lines: &[String]) {
    if lines.is_empty() {
        let _ = writeln!(out, "ok   {id}");
    } else {
        let _ = writeln!(out, "FAIL {id}");
        for l in lines {
            let _ = writeln!(out, "     {l}");
        }
    }
}

fn check(out: &mut dyn Write, id: &str, raw_params: &[String]) -> Result<i32, Failure> {
    let params = parse_params(raw_params)?;
    let lines = check_one(id, &params)?;
    print_check(out, id, &lines);
    Ok(if lines.is_empty() { EXIT_OK } else { EXIT_MISMATCH })
}

fn check_all(out: &mut dyn Write) -> Result<i32, Failure> {
    let ids: Vec<&str> = catalog::ids().collect();
    let empty = BTreeMap::new();
    let results: Vec<Result<Vec<String>, Failure>> = thread::scope(|s| {
        let handles: Vec<_> = ids.iter().map(|id| s.spawn(|| check_one(id, &empty))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    let mut code = EXIT_OK;
    for (id, res) in ids.iter().zip(results) {
        let lines = res?;
        if !lines.is_empty() {
            code = EXIT_MISMATCH;
        }
        print_check(out, id, &lines);
    }
    Ok(code)
}

fn validate(out: &mut dyn Write, path: &str) -> Result<i32, Failure> {
    let doc = read_document(path)?;
    let model = instantiate(path, &doc, &BTreeMap::new())?;
    let b = model.bicomplex().map_err(|e| Failure::invalid(format!("{path}: {e}")))?;
    let failures = b.verify();
    if !failures.is_empty() {
        let msgs: Vec<String> = failures.iter().map(|f| format!("{path}: {f}")).collect();
        return Err(Failure::invalid(msgs.join("\n")));
    }
    let mode = match doc.mode {
        Mode::Real => "real",
        Mode::Complex => "complex",
    };
    let _ = writeln!(out, "{path}: ok ({mode} model '{}', complex dimension {}, integrable)", doc.name, doc.complex_dim());
    Ok(EXIT_OK)
}
