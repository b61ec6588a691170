use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lipfree::beurling::{beurling_report, probe_beurling_gap};
use lipfree::free_space::{cascales_bounds, free_norm, free_norm_dual, optimal_decomposition, FreeElement};
use lipfree::interpolation::{analyze, min_norm_interpolant};
use lipfree::metric::{
    gen_ex1_clusters, gen_graph_space, gen_random_instance, gen_random_tree, gen_triple_chain, pairs_from_json,
    pairs_to_json, space_from_json, space_to_json, GraphKind, PairSet, PointedMetricSpace,
};
use lipfree::sequences::{greedy_extract, necessary_condition_check, ExtractionConfig};
use lipfree::{Error, Options};

#[derive(Parser)]
#[command(name = "lipfree", version, about = "Lipschitz interpolation on finite pointed metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print the report as JSON instead of key=value lines.
    #[arg(long, global = true)]
    json: bool,
    /// Solve every program in exact rational arithmetic.
    #[arg(long, global = true)]
    exact: bool,
    /// Largest pair count for exhaustive sign-pattern enumeration.
    #[arg(long, global = true)]
    cap: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    pairs: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ex1,
    TripleChain,
    Tree,
    Cycle,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Check a space file (and optionally a pair file against it).
    Validate {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        pairs: Option<PathBuf>,
    },
    /// Interpolation constants, separation, witnesses and the Beurling report.
    Analyze(Input),
    /// Least-norm Lipschitz function with prescribed incremental ratios.
    Interpolate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alpha: Vec<f64>,
    },
    /// Optimal Beurling family, matching diagnostic and vector constants;
    /// with --probe, a seeded random search for instances with t* > M.
    Beurling {
        #[arg(long, required_unless_present = "probe")]
        space: Option<PathBuf>,
        #[arg(long, required_unless_present = "probe")]
        pairs: Option<PathBuf>,
        #[arg(long)]
        probe: Option<usize>,
    },
    /// Greedy extraction of a subsequence with a certified lower bound.
    Extract {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        max_prefix: Option<usize>,
        #[arg(long)]
        require_full: bool,
    },
    /// Generate an example instance.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Points for tree, cycle and random; blocks for triple-chain.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        clusters: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Pair count for random instances.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        space_out: Option<PathBuf>,
        #[arg(long)]
        pairs_out: Option<PathBuf>,
    },
    /// Free-space norm of a zero-mass element and an optimal decomposition.
    Norm {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<f64>,
    },
    /// Molecular distance between two pairs with its metric bounds.
    Rho {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_parser = parse_pair)]
        p: (usize, usize),
        #[arg(long, value_parser = parse_pair)]
        q: (usize, usize),
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected x,y but got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

enum Failure {
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn to_json(&self) -> Value {
        match self {
            Failure::Domain(e) => e.to_json(),
            Failure::Io(detail) => json!({ "error": { "kind": "Io", "detail": detail, "witness": null } }),
        }
    }
}

type Outcome = Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<PointedMetricSpace, Failure> {
    Ok(space_from_json(&read(path)?)?)
}

fn load(input: &Input) -> Result<(PointedMetricSpace, PairSet), Failure> {
    let space = load_space(&input.space)?;
    let pairs = pairs_from_json(&read(&input.pairs)?, &space)?;
    Ok((space, pairs))
}

fn pairs_value(pairs: &PairSet) -> Value {
    json!(pairs.pairs().iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>())
}

fn run(cli: &Cli) -> Outcome {
    let mut opts = if cli.exact { Options::exact() } else { Options::default() };
    opts.seed = cli.seed;
    if let Some(cap) = cli.cap {
        opts.cap = cap;
    }
    match &cli.command {
        Command::Validate { space, pairs } => {
            let s = load_space(space)?;
            let mut out = json!({ "valid": true, "points": s.len(), "base": s.base(), "labels": s.labels() });
            if let Some(path) = pairs {
                let p = pairs_from_json(&read(path)?, &s)?;
                out["pairs"] = json!(p.len());
                out["duplicates"] = json!(p.duplicates());
            }
            Ok(out)
        }
        Command::Analyze(input) => {
            let (space, pairs) = load(input)?;
            let mut out = analyze(&space, &pairs, &opts)?.to_json();
            out["beurling"] = match beurling_report(&space, &pairs, &opts) {
                Ok(report) => report,
                Err(e) => json!({ "applicable": false, "reason": e.to_string() }),
            };
            Ok(out)
        }
        Command::Interpolate { input, alpha } => {
            let (space, pairs) = load(input)?;
            let r = min_norm_interpolant(&space, &pairs, alpha, opts.backend)?;
            Ok(json!({ "f": r.f.values(), "norm": r.norm, "floored": r.floored }))
        }
        Command::Beurling { space, pairs, probe } => {
            if let Some(count) = probe {
                let report = probe_beurling_gap(*count, cli.seed, &opts)?;
                return Ok(serde_json::to_value(report).expect("probe report serializes"));
            }
            let input = Input { space: space.clone().unwrap_or_default(), pairs: pairs.clone().unwrap_or_default() };
            let (space, pairs) = load(&input)?;
            Ok(beurling_report(&space, &pairs, &opts)?)
        }
        Command::Extract { input, epsilon, max_prefix, require_full } => {
            let (space, pairs) = load(input)?;
            let mut cfg = ExtractionConfig::new(*epsilon, max_prefix.unwrap_or(pairs.len()).max(1))?;
            cfg.require_full = *require_full;
            let result = greedy_extract(&space, &pairs, &cfg, &opts)?;
            let mut out = serde_json::to_value(result).expect("extraction report serializes");
            out["necessary"] = serde_json::to_value(necessary_condition_check(&space, &pairs)).expect("serializes");
            Ok(out)
        }
        Command::Gen { kind, size, clusters, scale, count, space_out, pairs_out } => {
            let need = |v: Option<usize>, flag: &str| {
                v.ok_or_else(|| Failure::Domain(Error::InvalidParams(format!("--kind needs --{flag}"))))
            };
            let (space, pairs) = match kind {
                Kind::Ex1 => {
                    let (s, p, _) = gen_ex1_clusters(need(*clusters, "clusters")?, *scale)?;
                    (s, p)
                }
                Kind::TripleChain => gen_triple_chain(need(*size, "size")?)?,
                Kind::Tree => gen_random_tree(need(*size, "size")?, cli.seed)?,
                Kind::Cycle => gen_graph_space(GraphKind::Cycle, need(*size, "size")?, &[])?,
                Kind::Random => gen_random_instance(need(*size, "size")?, need(*count, "count")?, cli.seed)?,
            };
            let space_text = space_to_json(&space)?;
            if let Some(path) = space_out {
                write(path, &space_text)?;
            }
            if let Some(path) = pairs_out {
                write(path, &pairs_to_json(&pairs))?;
            }
            let space_value: Value = serde_json::from_str(&space_text).expect("generated space is JSON");
            Ok(json!({ "space": space_value, "pairs": pairs_value(&pairs) }))
        }
        Command::Norm { space, coeffs } => {
            let space = load_space(space)?;
            let gamma = FreeElement::new(&space, coeffs.clone())?;
            let norm = free_norm(&space, &gamma, opts.backend)?;
            let (dual, f) = free_norm_dual(&space, &gamma, opts.backend)?;
            let decomposition = optimal_decomposition(&space, &gamma, opts.backend)?;
            Ok(json!({
                "norm": norm,
                "dual_value": dual,
                "dual_witness": f.values(),
                "decomposition": decomposition,
            }))
        }
        Command::Rho { space, p, q } => {
            let space = load_space(space)?;
            let b = cascales_bounds(&space, *p, *q, opts.backend)?;
            Ok(serde_json::to_value(b).expect("bounds serialize"))
        }
    }
}

/// One `key=value` line per scalar leaf; arrays of scalars stay inline as JSON.
fn flatten(value: &Value, prefix: &str, out: &mut Vec<String>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) if !map.is_empty() => {
            for (k, v) in map {
                flatten(v, &key(k), out);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array()) => {
            for (i, v) in items.iter().enumerate() {
                flatten(v, &key(&i.to_string()), out);
            }
        }
        Value::String(s) => out.push(format!("{prefix}={s}")),
        other => out.push(format!("{prefix}={other}")),
    }
}

fn render(value: &Value, as_json: bool) -> String {
    if as_json {
        return serde_json::to_string_pretty(value).expect("reports serialize");
    }
    let mut lines = Vec::new();
    flatten(value, "", &mut lines);
    lines.join("\n")
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("LIPFREE_THREADS") else { return Ok(()) };
    let threads: usize = raw.trim().parse().map_err(|_| format!("LIPFREE_THREADS={raw:?} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(report) => {
            println!("{}", render(&report, cli.json));
            ExitCode::SUCCESS
        }
        Err(failure) => {
            println!("{}", render(&failure.to_json(), cli.json));
            ExitCode::from(1)
        }
    }
}
