use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cyclosep::builders::{c_scheme_with_budget, cyclotomic_with_budget, paley, PaleyKind};
use cyclosep::closure::{graph_closure, m_extension, point_extension};
use cyclosep::couples::{check_theorem_conditions_with, ConditionOptions};
use cyclosep::gf::multiplicative_subgroup;
use cyclosep::io::{
    ingest_catalog, json_line, locate, parse_ccf, parse_graph, write_ccf, CatalogFormat, ConfigurationSummary,
};
use cyclosep::iso::{algebraic_isomorphisms, automorphism_group, separability_witness};
use cyclosep::separability::{
    analyze, c_bound, exceptional_pairs, field_inequality, open_degree_rows, paley_wl_bound, two_separability_report,
    COMPUTATIONALLY_SETTLED,
};
use cyclosep::{Budget, CoherentConfiguration, Error, FiniteField};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "cyclosep",
    version,
    about = "Coherent configurations and separability checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Field parameters, the indistinguishing bound and the field inequality.
    FieldInfo { p: u64, d: u32 },
    /// Write a scheme in CCF.
    Build {
        #[command(subcommand)]
        what: Build,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Parse and validate a CCF file.
    Validate { file: PathBuf },
    /// Degree, valency and indistinguishing number with the resulting verdict.
    Analyze {
        file: PathBuf,
        /// Also enumerate both conditions at point 0.
        #[arg(long)]
        deep: bool,
    },
    /// WL closure of a graph file.
    Closure {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Point extension or 2-extension of a configuration.
    Extend {
        file: PathBuf,
        #[arg(long, conflicts_with = "m", required_unless_present = "m")]
        point: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check both conditions at a base point.
    CouplesCheck {
        file: PathBuf,
        #[arg(long)]
        mu: usize,
        #[arg(long, default_value_t = 4)]
        delta_size: usize,
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Pairs (p, d) failing the field inequality, then the open-degree rows.
    ExceptionalTable,
    /// 2-separability report for the cyclotomic scheme of the given index.
    TwoSep { p: u64, d: u32, m_index: u64 },
    /// Bound on the WL-dimension of the Paley graph or tournament.
    PaleyBound {
        q: u64,
        #[arg(long)]
        kind: Option<Kind>,
    },
    /// Automorphism group order, generators and base.
    Aut { file: PathBuf },
    /// Algebraic isomorphisms between two configurations.
    Aiso { a: PathBuf, b: PathBuf },
    /// Compare |iso(X)| / |aut(X)| with the number of algebraic automorphisms.
    Witness { file: PathBuf },
    /// Validate every block of a catalog.
    Ingest {
        catalog: PathBuf,
        #[arg(long)]
        format: String,
        /// Skip invalid blocks instead of stopping at the first one.
        #[arg(long)]
        lenient: bool,
        /// Report the blocks algebraically isomorphic to this configuration.
        #[arg(long)]
        locate: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Build {
    /// Cyclotomic scheme of the subgroup of the given index in GF(p^d)^x.
    Cyclotomic { p: u64, d: u32, index: u64 },
    /// The scheme C(F) on GF(p^d)^x.
    Cscheme { p: u64, d: u32 },
    /// WL closure of the Paley graph or tournament on GF(q).
    Paley {
        q: u64,
        #[arg(long)]
        kind: Option<Kind>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Graph,
    Tournament,
}

impl From<Kind> for PaleyKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Graph => PaleyKind::Graph,
            Kind::Tournament => PaleyKind::Tournament,
        }
    }
}

enum Failure {
    Usage(String),
    Invalid(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let inner = match &e {
            Error::Catalog { source, .. } => source.as_ref(),
            other => other,
        };
        match inner {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            Error::InvalidArgument(_) | Error::Field(_) | Error::OutOfRange { .. } | Error::DegreeMismatch(..) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<CoherentConfiguration, Failure> {
    parse_ccf(&read(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn out(text: &str) {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("{e}");
        std::process::exit(1);
    }
}

fn emit<T: Serialize>(v: &T) {
    out(&(json_line(v) + "\n"));
}

fn write_out(x: &CoherentConfiguration, output: Option<&Path>) -> Outcome {
    let text = write_ccf(x);
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => out(&text),
    }
    Ok(true)
}

fn build(what: &Build, output: Option<&Path>, budget: &Budget) -> Outcome {
    let x = match *what {
        Build::Cyclotomic { p, d, index } => {
            let field = FiniteField::new(p, d).map_err(Error::from)?;
            let m = multiplicative_subgroup(&field, index).map_err(Error::from)?;
            cyclotomic_with_budget(&field, &m, budget)?
        }
        Build::Cscheme { p, d } => c_scheme_with_budget(&FiniteField::new(p, d).map_err(Error::from)?, budget)?,
        Build::Paley { q, kind } => {
            let kind = match kind {
                Some(k) => k.into(),
                None => PaleyKind::for_order(q)
                    .ok_or_else(|| Failure::Usage(format!("no Paley structure on {q} points")))?,
            };
            paley(q, kind)?.scheme
        }
    };
    write_out(&x, output)
}

fn run(cli: Cli, budget: &Budget) -> Outcome {
    match cli.command {
        Command::FieldInfo { p, d } => {
            let field = FiniteField::new(p, d).map_err(Error::from)?;
            let inequality = if d >= 2 { Some(field_inequality(p, d)?) } else { None };
            emit(&json!({
                "p": p,
                "d": d,
                "q": field.order(),
                "modulus": field.modulus(),
                "primitive": field.primitive().rep(),
                "c_bound": c_bound(p, d)?.to_string(),
                "field_inequality": inequality,
            }));
            Ok(true)
        }
        Command::Build { what, output } => build(&what, output.as_deref(), budget),
        Command::Validate { file } => {
            emit(&ConfigurationSummary::of(&load(&file)?));
            Ok(true)
        }
        Command::Analyze { file, deep } => {
            let report = analyze(&load(&file)?, deep, budget);
            emit(&report);
            Ok(report.conclusion.certifies_separability())
        }
        Command::Closure { graph, output } => {
            let (n, arcs) = parse_graph(&read(&graph)?)?;
            write_out(&graph_closure(&arcs, n)?, output.as_deref())
        }
        Command::Extend { file, point, m, output } => {
            let x = load(&file)?;
            let y = match (point, m) {
                (Some(a), _) => point_extension(&x, a)?,
                (None, Some(m)) => m_extension(&x, m, budget)?,
                (None, None) => unreachable!("clap requires one of --point and --m"),
            };
            write_out(&y, output.as_deref())
        }
        Command::CouplesCheck {
            file,
            mu,
            delta_size,
            samples,
            seed,
        } => {
            let opts = ConditionOptions {
                delta_size,
                samples,
                seed,
            };
            let report = check_theorem_conditions_with(&load(&file)?, mu, budget, &opts)?;
            emit(&report);
            Ok(report.fully_holds())
        }
        Command::ExceptionalTable => {
            for e in exceptional_pairs() {
                emit(&json!({
                    "kind": "exceptional-pair",
                    "p": e.p,
                    "d": e.d,
                    "lhs": e.lhs.to_string(),
                    "rhs": e.rhs.to_string(),
                    "settled": COMPUTATIONALLY_SETTLED.contains(&(e.p, e.d)),
                }));
            }
            for row in open_degree_rows() {
                emit(&json!({ "kind": "open-degrees", "row": row }));
            }
            Ok(true)
        }
        Command::TwoSep { p, d, m_index } => {
            let field = FiniteField::new(p, d).map_err(Error::from)?;
            let m = multiplicative_subgroup(&field, m_index).map_err(Error::from)?;
            let report = two_separability_report(&field, &m, budget)?;
            emit(&report);
            Ok(!report.needs_small_case_check)
        }
        Command::PaleyBound { q, kind } => {
            let report = paley_wl_bound(q, kind.map(Into::into))?;
            emit(&report);
            Ok(report.bound.is_some())
        }
        Command::Aut { file } => {
            let aut = automorphism_group(&load(&file)?, budget)?;
            emit(&json!({
                "order": aut.order.to_string(),
                "generators": aut.group.generators(),
                "base": aut.base,
            }));
            Ok(true)
        }
        Command::Aiso { a, b } => {
            let maps = algebraic_isomorphisms(&load(&a)?, &load(&b)?, budget)?;
            emit(&json!({ "count": maps.len(), "maps": maps }));
            Ok(!maps.is_empty())
        }
        Command::Witness { file } => {
            let w = separability_witness(&load(&file)?, budget)?;
            emit(&w);
            Ok(w.holds)
        }
        Command::Ingest {
            catalog,
            format,
            lenient,
            locate: target,
        } => {
            let format: CatalogFormat = format.parse()?;
            let cat = ingest_catalog(&read(&catalog)?, format, !lenient)?;
            for (block, x) in &cat.entries {
                emit(&json!({ "block": block, "summary": ConfigurationSummary::of(x) }));
            }
            for e in &cat.rejected {
                emit(&json!({ "rejected": e.to_string() }));
            }
            if let Some(path) = target {
                let configs: Vec<CoherentConfiguration> = cat.entries.iter().map(|(_, x)| x.clone()).collect();
                let hits: Vec<usize> = locate(&configs, &load(&path)?, budget)?
                    .into_iter()
                    .map(|i| cat.entries[i].0)
                    .collect();
                emit(&json!({ "located": hits }));
            }
            Ok(cat.rejected.is_empty())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli, &Budget::from_env()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            let (code, kind, message) = match f {
                Failure::Invalid(m) => (1, "invalid", m),
                Failure::Usage(m) => (2, "usage", m),
                Failure::Budget(m) => (3, "budget", m),
            };
            eprintln!("{}", json_line(&json!({ "error": kind, "message": message })));
            ExitCode::from(code)
        }
    }
}
