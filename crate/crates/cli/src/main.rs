//! `cohft`: ranks and Chern characters of bundles of coinvariants from the
//! command line.

mod cache;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use cohft_core::chern::{moduli_dimension, ChernEngine, ChernError};
use cohft_core::fusion::{validate, FusionDatum, FusionError, ModuleIndex};
use cohft_core::graphs::{GraphCatalog, GraphError};
use cohft_core::io::{
    class_to_terms, format_class, parse_fusion_tables, parse_lattice, FusionDocument, GraphRecord, IoError,
    TermDoc,
};
use cohft_core::lattice::{discriminant_group, fusion_datum_from_gram, GramLattice, LatticeError};
use cohft_core::ranks::{rank_semisimple_with, RankError, RankQuery};
use cohft_core::scalar::format_rational;
use cohft_core::QClass;
use serde::Serialize;
use thiserror::Error;

use crate::cache::Cache;

#[derive(Debug, Parser)]
#[command(name = "cohft", version, about = "Ranks and Chern characters of bundles of coinvariants")]
struct Cli {
    /// Directory for cached graph catalogs and rank tables.
    #[arg(long, global = true, env = "COHFT_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Bound on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Fusion datum document.
    #[arg(long)]
    datum: Option<PathBuf>,
    /// Lattice document `{"gram": [[...]]}`.
    #[arg(long)]
    lattice: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Format {
    /// Single JSON document on stdout.
    #[arg(long, visible_alias = "machine", conflicts_with = "pretty")]
    json: bool,
    /// Human-readable output (default).
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug, Args)]
struct Point {
    #[arg(long)]
    genus: u32,
    /// Comma-separated module labels; `V` names the unit.
    #[arg(long, default_value = "")]
    modules: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a fusion datum against the Frobenius axioms.
    FusionCheck {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        format: Format,
    },
    /// Discriminant group, coset representatives and conformal dimensions.
    LatticeInfo {
        #[arg(long)]
        lattice: PathBuf,
        #[command(flatten)]
        format: Format,
    },
    /// Exact rank of the bundle of coinvariants.
    Rank {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        point: Point,
        /// Also evaluate the semisimple formula and report the discrepancy.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        format: Format,
    },
    /// Chern character as a formal tautological class.
    Chern {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        point: Point,
        /// Truncation degree, at most 3g - 3 + n (the default).
        #[arg(long)]
        degree: Option<u32>,
        /// Only the smooth-locus part.
        #[arg(long)]
        smooth: bool,
        #[command(flatten)]
        format: Format,
    },
    /// Closed-form first Chern class compared with the degree-1 part of ch.
    C1 {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        format: Format,
    },
    /// Stable graphs of type (g, n).
    Graphs {
        #[arg(long)]
        genus: u32,
        #[arg(long = "n")]
        n: usize,
        #[command(flatten)]
        format: Format,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("E-PARSE: {0}")]
    Parse(String),
    #[error("E-AXIOM: {0}")]
    Axiom(String),
    #[error("E-LABEL: {0}")]
    Label(String),
    #[error("E-STABILITY: {0}")]
    Stability(String),
    #[error("E-DEGREE: {0}")]
    Degree(String),
    #[error("E-NUMERIC: {0}")]
    Numeric(String),
    #[error("E-ORACLE: {0}")]
    Oracle(String),
    #[error("E-MISMATCH: {0}")]
    Mismatch(String),
    #[error("E-IO: {0}")]
    Io(String),
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Fusion(FusionError::Axioms(msg, _)) => Self::Axiom(msg),
            IoError::Lattice(LatticeError::Invalid(_)) => Self::Axiom(e.to_string()),
            other => Self::Parse(other.to_string()),
        }
    }
}

impl From<RankError> for CliError {
    fn from(e: RankError) -> Self {
        match e {
            RankError::Unstable(..) => Self::Stability(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<ChernError> for CliError {
    fn from(e: ChernError) -> Self {
        match e {
            ChernError::Unstable(..) | ChernError::Graph(GraphError::UnstableType(..)) => {
                Self::Stability(e.to_string())
            }
            ChernError::DegreeTooLarge { .. } => Self::Degree(e.to_string()),
            ChernError::Rank(r) => r.into(),
            other => Self::Numeric(other.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::UnstableType(..) => Self::Stability(e.to_string()),
            other => Self::Parse(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_lattice(path: &Path) -> Result<GramLattice, CliError> {
    Ok(parse_lattice(&read(path)?)?)
}

impl Source {
    fn load(&self) -> Result<FusionDatum, CliError> {
        match (&self.datum, &self.lattice) {
            (Some(path), _) => {
                let tables = parse_fusion_tables(&read(path)?)?;
                FusionDatum::new(tables).map_err(|e| match e {
                    FusionError::Axioms(msg, _) => CliError::Axiom(msg),
                    other => CliError::Parse(other.to_string()),
                })
            }
            (None, Some(path)) => fusion_datum_from_gram(&load_lattice(path)?)
                .map_err(|e| CliError::Axiom(e.to_string())),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

/// Resolves labels; `V` is accepted for the unit unless a module is so named.
fn resolve(datum: &FusionDatum, list: &str) -> Result<Vec<ModuleIndex>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|label| {
            datum
                .index_of(label)
                .or_else(|| (label == "V").then(|| datum.unit()))
                .ok_or_else(|| {
                    CliError::Label(format!(
                        "unknown module label '{label}' (known: {})",
                        datum.modules().join(", ")
                    ))
                })
        })
        .collect()
}

fn labels(datum: &FusionDatum, ms: &[ModuleIndex]) -> Vec<String> {
    ms.iter().map(|&i| datum.label(i).to_string()).collect()
}

fn check_stable(genus: u32, n: usize) -> Result<(), CliError> {
    if cohft_core::graphs::is_stable_type(genus, n) {
        Ok(())
    } else {
        Err(CliError::Stability(format!("(g, n) = ({genus}, {n}) is unstable: 2g - 2 + n must be positive")))
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

struct Session {
    cache: Option<Cache>,
}

impl Session {
    fn engine<'d>(&self, datum: &'d FusionDatum, genus: u32, n: usize) -> Result<ChernEngine<'d>, CliError> {
        let catalog = Arc::new(GraphCatalog::new());
        if let Some(cache) = &self.cache {
            if cohft_core::graphs::is_stable_type(genus, n) {
                catalog.insert(genus, n, cache.graphs(genus, n)?);
            }
        }
        let engine = ChernEngine::with_catalog(datum, catalog);
        if let Some(cache) = &self.cache {
            cache.load_ranks(engine.ranks());
        }
        Ok(engine)
    }

    fn save(&self, engine: &ChernEngine<'_>) {
        if let Some(cache) = &self.cache {
            // losing a cache write is harmless
            let _ = cache.store_ranks(engine.ranks());
        }
    }
}

#[derive(Serialize)]
struct FusionCheckDoc {
    valid: bool,
    modules: Vec<String>,
    central_charge: String,
}

#[derive(Serialize)]
struct ModuleInfo {
    label: String,
    coset_rep: Vec<String>,
    conformal_dimension: String,
}

#[derive(Serialize)]
struct LatticeInfoDoc {
    gram: Vec<Vec<i64>>,
    determinant: String,
    elementary_divisors: Vec<u64>,
    central_charge: String,
    modules: Vec<ModuleInfo>,
    datum: FusionDocument,
}

#[derive(Serialize)]
struct RankDoc {
    genus: u32,
    modules: Vec<String>,
    rank: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    semisimple: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    discrepancy: Option<f64>,
}

#[derive(Serialize)]
struct ChernDoc {
    genus: u32,
    modules: Vec<String>,
    degree: u32,
    smooth: bool,
    class: Vec<TermDoc>,
}

#[derive(Serialize)]
struct C1Doc {
    genus: u32,
    modules: Vec<String>,
    closed_form: Vec<TermDoc>,
    chern_degree_one: Vec<TermDoc>,
    agree: bool,
}

#[derive(Serialize)]
struct GraphsDoc {
    genus: u32,
    n: usize,
    graphs: Vec<GraphRecord>,
}

const ORACLE_TOLERANCE: f64 = 1e-6;

/// On error, any output produced so far is still printed before the diagnostic.
fn run(cli: Cli) -> Result<String, (String, CliError)> {
    let session = Session { cache: cli.cache_dir.map(Cache::new) };
    run_command(cli.command, &session)
}

fn run_command(command: Command, session: &Session) -> Result<String, (String, CliError)> {
    let plain = |e: CliError| (String::new(), e);
    match command {
        Command::FusionCheck { source, format } => {
            let tables = match (&source.datum, &source.lattice) {
                (Some(path), _) => parse_fusion_tables(&read(path).map_err(plain)?).map_err(|e| plain(e.into()))?,
                _ => source.load().map_err(plain)?.into_tables(),
            };
            let report = validate(&tables);
            if !report.is_valid() {
                return Err(plain(CliError::Axiom(report.describe(&tables))));
            }
            let doc = FusionCheckDoc {
                valid: true,
                modules: tables.modules().to_vec(),
                central_charge: format_rational(tables.central_charge()),
            };
            Ok(if format.json {
                to_json(&doc)
            } else {
                format!(
                    "valid: {} modules ({}), central charge {}\n",
                    doc.modules.len(),
                    doc.modules.join(", "),
                    doc.central_charge
                )
            })
        }

        Command::LatticeInfo { lattice, format } => {
            let l = load_lattice(&lattice).map_err(plain)?;
            let disc = discriminant_group(&l);
            let datum = fusion_datum_from_gram(&l).map_err(|e| plain(CliError::Axiom(e.to_string())))?;
            let modules = (0..disc.order())
                .map(|a| ModuleInfo {
                    label: disc.label(a),
                    coset_rep: disc.coset_reps[a].iter().map(format_rational).collect(),
                    conformal_dimension: format_rational(datum.conf_dim(a)),
                })
                .collect();
            let doc = LatticeInfoDoc {
                gram: l.gram().to_vec(),
                determinant: l.determinant().to_string(),
                elementary_divisors: disc.elementary_divisors.clone(),
                central_charge: format_rational(datum.central_charge()),
                modules,
                datum: FusionDocument::from_tables(&datum),
            };
            if format.json {
                return Ok(to_json(&doc));
            }
            let mut out = format!(
                "rank {}, determinant {}, discriminant group {}\ncentral charge {}\n",
                l.rank(),
                doc.determinant,
                if doc.elementary_divisors.is_empty() {
                    "trivial".to_string()
                } else {
                    doc.elementary_divisors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" + ")
                },
                doc.central_charge
            );
            for m in &doc.modules {
                out.push_str(&format!(
                    "  {:<8} rep ({})  a = {}\n",
                    m.label,
                    m.coset_rep.join(", "),
                    m.conformal_dimension
                ));
            }
            Ok(out)
        }

        Command::Rank { source, point, oracle, format } => {
            let datum = source.load().map_err(plain)?;
            let ms = resolve(&datum, &point.modules).map_err(plain)?;
            check_stable(point.genus, ms.len()).map_err(plain)?;
            let engine = session.engine(&datum, point.genus, ms.len()).map_err(plain)?;
            let rank = engine.ranks().rank(point.genus, &ms).map_err(|e| plain(e.into()))?;
            session.save(&engine);
            let mut doc = RankDoc {
                genus: point.genus,
                modules: labels(&datum, &ms),
                rank,
                semisimple: None,
                discrepancy: None,
            };
            let mut flagged = None;
            if oracle {
                let data = cohft_core::fusion::semisimple_decomposition::<f64>(&datum, 1e-9)
                    .map_err(|e| plain(CliError::Numeric(e.to_string())))?;
                let query = RankQuery::new(point.genus, &ms).map_err(|e| plain(e.into()))?;
                let s = rank_semisimple_with(&datum, &data, &query);
                let diff = (s - rank as f64).abs();
                doc.semisimple = Some(s);
                doc.discrepancy = Some(diff);
                if diff > ORACLE_TOLERANCE {
                    flagged = Some(CliError::Oracle(format!(
                        "semisimple value {s} differs from exact rank {rank} by {diff:e}"
                    )));
                }
            }
            let out = if format.json {
                to_json(&doc)
            } else if let (Some(s), Some(d)) = (doc.semisimple, doc.discrepancy) {
                format!("{rank}\nsemisimple {s:.12}\ndiscrepancy {d:.3e}\n")
            } else {
                format!("{rank}\n")
            };
            match flagged {
                Some(e) => Err((out, e)),
                None => Ok(out),
            }
        }

        Command::Chern { source, point, degree, smooth, format } => {
            let datum = source.load().map_err(plain)?;
            let ms = resolve(&datum, &point.modules).map_err(plain)?;
            check_stable(point.genus, ms.len()).map_err(plain)?;
            let max = moduli_dimension(point.genus, ms.len());
            let d = degree.unwrap_or(max);
            let engine = if smooth {
                ChernEngine::new(&datum)
            } else {
                session.engine(&datum, point.genus, ms.len()).map_err(plain)?
            };
            let class: QClass = if smooth {
                engine.chern_smooth(point.genus, &ms, Some(d))
            } else {
                engine.chern_character(point.genus, &ms, Some(d))
            }
            .map_err(|e| plain(e.into()))?;
            session.save(&engine);
            if format.json {
                return Ok(to_json(&ChernDoc {
                    genus: point.genus,
                    modules: labels(&datum, &ms),
                    degree: d,
                    smooth,
                    class: class_to_terms(&class),
                }));
            }
            let mut out = String::new();
            for k in 0..=d {
                let part = class.degree_part(k);
                out.push_str(&format!("degree {k}: {} terms\n", part.len()));
                out.push_str(&format_class(&part));
            }
            Ok(out)
        }

        Command::C1 { source, point, format } => {
            let datum = source.load().map_err(plain)?;
            let ms = resolve(&datum, &point.modules).map_err(plain)?;
            check_stable(point.genus, ms.len()).map_err(plain)?;
            let engine = session.engine(&datum, point.genus, ms.len()).map_err(plain)?;
            let closed: QClass = engine.first_chern_closed_form(point.genus, &ms).map_err(|e| plain(e.into()))?;
            let full: QClass =
                engine.chern_character_formal(point.genus, &ms, 1).map_err(|e| plain(e.into()))?;
            session.save(&engine);
            let one = full.degree_part(1);
            let agree = one == closed;
            let out = if format.json {
                to_json(&C1Doc {
                    genus: point.genus,
                    modules: labels(&datum, &ms),
                    closed_form: class_to_terms(&closed),
                    chern_degree_one: class_to_terms(&one),
                    agree,
                })
            } else {
                format!(
                    "closed form:\n{}degree-1 part of ch:\n{}agreement: {}\n",
                    format_class(&closed),
                    format_class(&one),
                    if agree { "yes" } else { "NO" }
                )
            };
            if agree {
                Ok(out)
            } else {
                Err((out, CliError::Mismatch("closed form differs from the degree-1 part of ch".into())))
            }
        }

        Command::Graphs { genus, n, format } => {
            check_stable(genus, n).map_err(plain)?;
            let forms = match &session.cache {
                Some(cache) => cache.graphs(genus, n),
                None => cohft_core::graphs::enumerate(genus, n),
            }
            .map_err(|e| plain(e.into()))?;
            if format.json {
                return Ok(to_json(&GraphsDoc {
                    genus,
                    n,
                    graphs: forms.iter().map(GraphRecord::from_form).collect(),
                }));
            }
            let mut out = format!("{} stable graphs of type ({genus}, {n})\n", forms.len());
            for (i, f) in forms.iter().enumerate() {
                let g = f.graph();
                let genera: Vec<String> = g.genera().iter().map(|x| x.to_string()).collect();
                let edges: Vec<String> = g.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect();
                let legs: Vec<String> =
                    g.legs().iter().enumerate().map(|(l, v)| format!("{}:{v}", l + 1)).collect();
                out.push_str(&format!(
                    "{:>5}  |Aut| = {:<4} genera ({})  edges ({})  legs ({})\n",
                    i + 1,
                    f.aut_order(),
                    genera.join(","),
                    edges.join(","),
                    legs.join(",")
                ));
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("E-IO: cannot configure {t} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err((out, e)) => {
            print!("{out}");
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
