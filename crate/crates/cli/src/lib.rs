//! Library half of the `qsep` command-line tool: argument types, command
//! execution and the verification harness.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use qsep_core::boolfun::{
    algebraic_degree, anf_from_tt, influencing_variables, nonlinearity, parse_function,
    real_degree, TruthTable, MAX_VARS, REAL_POLY_MAX_VARS, WALSH_MAX_VARS,
};
use qsep_core::certify::{
    classify_from_bounds, find_and_reduction, qe_bounds_with, reduction_from_tree, Caps,
};
use qsep_core::families::{selector_combine, FamilyKind, FamilySpec, FAMILY_TABLE_MAX_VARS};
use qsep_core::mmbent::{
    is_bent, mm_build, mm_classical_tree, mm_parity_tree, random_mm, MMBentSpec,
};
use qsep_core::ptrees::{ParityDecisionTree, ParityDepthSearch, PARITY_DEPTH_MAX_VARS};
use qsep_core::qsim::run_ptree_algorithm;
use qsep_core::trees::{DecisionTree, DepthSearch, DEPTH_MAX_VARS};
use qsep_core::Error as CoreError;

pub mod verify;

#[derive(Parser, Debug)]
#[command(
    name = "qsep",
    version,
    about = "Query complexity workbench for Boolean functions",
    after_help = "Functions are read as ANF text (\"x1*x2 + x3\") or as a truth-table file\n\
                  (\"n=3\" on the first line, hex table on the second, most significant nibble first).\n\n\
                  EXIT CODES: 0 success, 1 verification failure, 2 usage or input error, 3 cap exceeded.\n\
                  QSEP_THREADS bounds the worker count."
)]
pub struct Cli {
    /// Render output as an aligned key/value table instead of JSON
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct CapArgs {
    /// Largest influencing-variable count for exact deterministic depth
    #[arg(long, default_value_t = DEPTH_MAX_VARS)]
    pub max_n: usize,
    /// Largest influencing-variable count for exact parity depth
    #[arg(long, default_value_t = PARITY_DEPTH_MAX_VARS)]
    pub max_parity_n: usize,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps {
            depth: self.max_n,
            parity_depth: self.max_parity_n,
            ..Caps::default()
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Degrees, influencing variables, nonlinearity, depths and Q_E bounds
    Analyze {
        /// Function file (ANF or truth table)
        file: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Build a member of a query-friendly family
    Construct {
        /// full-tree | fn1 | fn2 | parity-complete | separable | selector
        family: String,
        /// Variable count (fn1, fn2, separable)
        #[arg(long)]
        n: Option<usize>,
        /// Depth (full-tree, parity-complete)
        #[arg(long)]
        k: Option<usize>,
        /// First input of the selector combination
        #[arg(long, requires = "h")]
        g: Option<PathBuf>,
        /// Second input of the selector combination
        #[arg(long, requires = "g")]
        h: Option<PathBuf>,
        /// Also write the tree JSON here
        #[arg(long)]
        tree_out: Option<PathBuf>,
        /// Also write the ANF text here
        #[arg(long)]
        anf_out: Option<PathBuf>,
    },
    /// Exact deterministic query complexity D(f)
    OptimalDepth {
        file: PathBuf,
        #[arg(long, default_value_t = DEPTH_MAX_VARS)]
        max_n: usize,
        /// Include an optimal tree
        #[arg(long)]
        tree: bool,
    },
    /// Exact minimum depth over parity decision trees
    ParityDepth {
        file: PathBuf,
        #[arg(long, default_value_t = PARITY_DEPTH_MAX_VARS)]
        max_parity_n: usize,
        /// Include an optimal tree
        #[arg(long)]
        tree: bool,
    },
    /// AND_k reduction certificate, searched for or read off a tree
    Reduce {
        file: PathBuf,
        /// Search for an AND_k restriction
        #[arg(long, conflicts_with = "tree")]
        k: Option<usize>,
        /// Read the certificate off this read-once decision tree
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Maiorana-McFarland bent function with its two query trees
    Mm {
        /// Spec JSON {"n", "phi", "h"}
        #[arg(long, conflicts_with_all = ["n", "seed"])]
        spec: Option<PathBuf>,
        #[arg(long, requires = "seed")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        seed: Option<u64>,
    },
    /// Simulate a parity tree as an exact quantum algorithm on every input
    Qsim {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long = "fn")]
        function: PathBuf,
        /// Omit the per-input transcript
        #[arg(long)]
        summary: bool,
    },
    /// Run the acceptance checks
    VerifyPaper {
        /// "all" or a comma-separated list of criterion numbers
        #[arg(long, default_value = "all")]
        suite: String,
        /// Also run the small searches around the open problems
        #[arg(long)]
        explore_open: bool,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(CoreError::CapExceeded { .. }) => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Core(CoreError::CapExceeded { .. }) => "cap_exceeded",
            Self::Core(CoreError::Parse(_) | CoreError::Json(_)) => "parse",
            Self::Core(_) => "invalid_input",
            Self::Io { .. } => "io",
            Self::Usage(_) => "usage",
        }
    }

    pub fn record(&self) -> Value {
        json!({"error": {"kind": self.kind(), "message": self.to_string()}})
    }
}

/// Result of a command: the JSON document to print and whether the checks it
/// ran passed.
#[derive(Debug)]
pub struct Output {
    pub value: Value,
    pub ok: bool,
}

impl Output {
    fn ok(value: Value) -> Self {
        Self { value, ok: true }
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_owned(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(contents.as_bytes()).map_err(io)?;
    file.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// Reads ANF text or a truth-table file; ANF variables define `n` as the
/// largest index mentioned.
pub fn parse_function_file(path_or_text: &str) -> Result<TruthTable, CliError> {
    let path = Path::new(path_or_text);
    let text = if path.is_file() {
        read(path)?
    } else {
        path_or_text.to_owned()
    };
    Ok(parse_function(&text)?)
}

fn load(path: &Path) -> Result<TruthTable, CliError> {
    let f = parse_function(&read(path)?)?;
    if f.num_vars() > MAX_VARS {
        return Err(CoreError::CapExceeded {
            what: "truth table",
            n: f.num_vars(),
            cap: MAX_VARS,
        }
        .into());
    }
    Ok(f)
}

fn one_based(vars: &[usize]) -> Vec<usize> {
    vars.iter().map(|v| v + 1).collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn tree_value(t: &ParityDecisionTree) -> Value {
    to_value(t)
}

pub fn run(cmd: &Command) -> Result<Output, CliError> {
    match cmd {
        Command::Analyze { file, caps } => analyze(&load(file)?, caps),
        Command::Construct {
            family,
            n,
            k,
            g,
            h,
            tree_out,
            anf_out,
        } => {
            let value = if family == "selector" {
                let (Some(g), Some(h)) = (g, h) else {
                    return Err(CliError::Usage("selector needs --g and --h".into()));
                };
                let f = selector_combine(&load(g)?, &load(h)?)?;
                json!({"family": "selector", "n": f.num_vars(), "anf": anf_from_tt(&f).to_string(), "table": f.to_hex()})
            } else {
                construct(family, *n, *k)?
            };
            if let Some(p) = tree_out {
                let tree = value.get("tree").ok_or_else(|| {
                    CliError::Usage("this construction has no tree output".into())
                })?;
                write_atomic(p, &format!("{tree}\n"))?;
            }
            if let Some(p) = anf_out {
                let anf = value
                    .get("anf")
                    .and_then(Value::as_str)
                    .ok_or_else(|| CliError::Usage("no ANF above the truth-table cap".into()))?;
                write_atomic(p, &format!("{anf}\n"))?;
            }
            Ok(Output::ok(value))
        }
        Command::OptimalDepth { file, max_n, tree } => {
            let f = load(file)?;
            let search = DepthSearch::new(*max_n);
            let mut v = json!({"n": f.num_vars()});
            if *tree {
                let (d, t) = search.optimal_tree(&f)?;
                v["depth"] = d.into();
                v["tree"] = to_value(&t);
            } else {
                v["depth"] = search.depth(&f)?.into();
            }
            Ok(Output::ok(v))
        }
        Command::ParityDepth {
            file,
            max_parity_n,
            tree,
        } => {
            let f = load(file)?;
            let search = ParityDepthSearch::new(*max_parity_n);
            let mut v = json!({"n": f.num_vars()});
            if *tree {
                let (d, t) = search.optimal_tree(&f)?;
                v["parityDepth"] = d.into();
                v["tree"] = tree_value(&t);
            } else {
                v["parityDepth"] = search.depth(&f)?.into();
            }
            Ok(Output::ok(v))
        }
        Command::Reduce { file, k, tree } => {
            let f = load(file)?;
            let cert = match (k, tree) {
                (Some(k), None) => find_and_reduction(&f, *k)?,
                (None, Some(t)) => Some(reduction_from_tree(&DecisionTree::from_json(&read(t)?)?)?),
                _ => {
                    return Err(CliError::Usage(
                        "reduce needs exactly one of --k and --tree".into(),
                    ))
                }
            };
            match cert {
                Some(c) => {
                    c.verify(&f)?;
                    Ok(Output::ok(
                        json!({"found": true, "verified": true, "certificate": to_value(&c)}),
                    ))
                }
                None => Ok(Output::ok(json!({"found": false}))),
            }
        }
        Command::Mm { spec, n, seed } => {
            let spec = match (spec, n, seed) {
                (Some(p), _, _) => MMBentSpec::from_json(&read(p)?)?,
                (None, Some(n), Some(seed)) => random_mm(*n, *seed)?,
                _ => {
                    return Err(CliError::Usage(
                        "mm needs --spec or both --n and --seed".into(),
                    ))
                }
            };
            mm(&spec)
        }
        Command::Qsim {
            tree,
            function,
            summary,
        } => {
            let t = ParityDecisionTree::from_json(&read(tree)?)?;
            let f = load(function)?;
            let mut rep = run_ptree_algorithm(&t, &f)?;
            if *summary {
                rep.transcript.clear();
            }
            Ok(Output {
                ok: rep.pass,
                value: to_value(&rep),
            })
        }
        Command::VerifyPaper {
            suite,
            explore_open,
        } => {
            let ids = parse_suite(suite)?;
            let results = verify::run_suite(&ids);
            let pass = results.iter().all(|r| r.pass);
            let mut v = json!({"pass": pass, "criteria": to_value(&results)});
            if *explore_open {
                let findings = verify::explore_open_problems().map_err(CliError::Usage)?;
                v["openProblems"] = to_value(&findings);
            }
            Ok(Output { value: v, ok: pass })
        }
    }
}

fn parse_suite(suite: &str) -> Result<Vec<u8>, CliError> {
    if suite == "all" {
        return Ok(vec![]);
    }
    let ids = suite
        .split(',')
        .map(|s| s.trim().parse::<u8>().ok().filter(|i| (1..=9).contains(i)))
        .collect::<Option<Vec<_>>>();
    ids.ok_or_else(|| {
        CliError::Usage(format!(
            "--suite expects \"all\" or numbers 1-9, got {suite:?}"
        ))
    })
}

fn analyze(f: &TruthTable, caps: &CapArgs) -> Result<Output, CliError> {
    let n = f.num_vars();
    let influencing = influencing_variables(f);
    let mut v = json!({
        "n": n,
        "anf": anf_from_tt(f).to_string(),
        "degree": algebraic_degree(f),
        "influencing": one_based(&influencing),
        "weight": f.weight(),
    });
    let m = influencing.len();
    let g = f.compact(f.support());
    if m <= REAL_POLY_MAX_VARS {
        v["realDegree"] = real_degree(&g)?.into();
    }
    if n <= WALSH_MAX_VARS {
        v["nonlinearity"] = nonlinearity(f)?.into();
    }
    let bounds = qe_bounds_with(f, &caps.caps())?;
    if let Some(d) = bounds.deterministic_depth {
        v["D"] = d.into();
        v["qfClassification"] = to_value(&classify_from_bounds(f, &bounds)?);
    }
    if let Some(p) = bounds.parity_depth {
        v["parityDepth"] = p.into();
    }
    v["qeBounds"] = to_value(&bounds);
    Ok(Output::ok(v))
}

fn construct(family: &str, n: Option<usize>, k: Option<usize>) -> Result<Value, CliError> {
    let kind: FamilyKind = family.parse()?;
    let param = match (kind.takes_depth(), n, k) {
        (true, None, Some(k)) => k,
        (false, Some(n), None) => n,
        (true, ..) => return Err(CliError::Usage(format!("{kind} takes --k"))),
        (false, ..) => return Err(CliError::Usage(format!("{kind} takes --n"))),
    };
    let spec = FamilySpec::new(kind, param)?;
    let mut v = json!({"family": kind.name(), "param": param, "n": spec.num_vars()});
    if spec.num_vars() <= FAMILY_TABLE_MAX_VARS {
        let c = spec.build()?;
        v["depth"] = c.tree.depth().into();
        v["tree"] = match &c.tree {
            qsep_core::families::FamilyTree::Deterministic(t) => to_value(t),
            qsep_core::families::FamilyTree::Parity(t) => to_value(t),
        };
        v["anf"] = anf_from_tt(&c.function).to_string().into();
        v["table"] = c.function.to_hex().into();
    } else {
        let t = spec.tree()?;
        v["depth"] = t.depth().into();
        v["tree"] = tree_value(&t);
    }
    Ok(v)
}

fn mm(spec: &MMBentSpec) -> Result<Output, CliError> {
    let f = mm_build(spec);
    let n = spec.num_vars();
    let ct = mm_classical_tree(spec);
    let pt = mm_parity_tree(spec);
    let bent = is_bent(&f)?;
    let exact = ct.function(n)? == f && pt.function(n)? == f;
    Ok(Output {
        ok: bent && exact,
        value: json!({
            "spec": to_value(spec),
            "n": n,
            "table": f.to_hex(),
            "anf": anf_from_tt(&f).to_string(),
            "bent": bent,
            "nonlinearity": nonlinearity(&f)?,
            "realDegree": real_degree(&f)?,
            "treesExact": exact,
            "classicalDepth": ct.depth(),
            "parityDepth": pt.depth(),
            "parityBound": (3 * n).div_ceil(4),
            "classicalTree": to_value(&ct),
            "parityTree": tree_value(&pt),
        }),
    })
}

/// `key  value` lines for the top-level fields; nested values stay JSON.
pub fn render_pretty(v: &Value) -> String {
    match v {
        Value::Object(map) => {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            map.iter()
                .map(|(k, val)| {
                    let shown = match val {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    format!("{k:<width$}  {shown}\n")
                })
                .collect()
        }
        other => format!("{other}\n"),
    }
}

pub fn render(v: &Value, pretty: bool) -> String {
    if pretty {
        render_pretty(v)
    } else {
        format!("{v}\n")
    }
}

/// Sizes the global worker pool from `QSEP_THREADS` when set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(s) = std::env::var("QSEP_THREADS") else {
        return Ok(());
    };
    let threads: usize = s.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "QSEP_THREADS must be a positive integer, got {s:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}
