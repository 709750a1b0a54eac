//! `blockdesign`: build designs, check incidence bounds and run the
//! triangle-area experiments from the command line.

mod error;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use blockdesign::bounds::{
    ff_corollary_bounds, rich_block_bound, rich_point_bound, tightness_search, verify_exhaustive,
    verify_sampled, BoundKind, BoundReport, CorollaryKind, RichnessQuery, SamplingSpec, SizeSpec,
    VerificationSummary,
};
use blockdesign::rational::{self, Rational};
use blockdesign::spectral::{numeric_spectrum, theoretical_spectrum};
use blockdesign::subsets::seeded_rng;
use blockdesign::triangles::{distinct_areas_experiment, missing_area_search, PlanePointSet};
use blockdesign::{Design, FiniteField, GeometryParams};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{code, CliError};

const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "blockdesign",
    version,
    about = "Block designs, incidence bounds and triangle areas over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and validate a design, then write it in the design file format.
    Generate {
        #[command(flatten)]
        source: DesignSource,
        /// Write the design here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Theoretical and numeric spectrum of the incidence graph.
    Spectrum {
        #[command(flatten)]
        source: DesignSource,
        /// Skip the dense eigensolver and report the closed form only.
        #[arg(long)]
        theoretical_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a bound on sampled or exhaustively enumerated subsets.
    Verify {
        #[command(flatten)]
        source: DesignSource,
        #[command(flatten)]
        bound: BoundArgs,
        /// Number of sampled subset pairs.
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        /// Seed for sampling; required unless --exhaustive is given.
        #[arg(long)]
        seed: Option<u64>,
        /// Enumerate every subset of the chosen sizes instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        /// Fixed size of the point subset P.
        #[arg(long)]
        size_p: Option<usize>,
        /// Fixed size of the block subset L.
        #[arg(long)]
        size_l: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for the subset pair that comes closest to a bound.
    Tightness {
        #[command(flatten)]
        source: DesignSource,
        #[command(flatten)]
        bound: BoundArgs,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-geometry forms of the bounds for AG(n, q).
    Corollary {
        /// Affine geometry parameters, `q=..,n=..,m=..`.
        #[arg(long)]
        ag: String,
        #[command(flatten)]
        bound: BoundArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distinct triangle areas at a common vertex of a planar point set.
    Triangles {
        /// Point-set file.
        #[arg(long, conflicts_with = "random")]
        points: Option<PathBuf>,
        /// Random point set, `q=..,size=..`; needs --seed.
        #[arg(long)]
        random: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "1")]
        epsilon: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for point sets whose triangles miss some nonzero area.
    SearchAreas {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct DesignSource {
    /// Affine geometry parameters, `q=..,n=..,m=..`.
    #[arg(long)]
    ag: Option<String>,
    /// Design file.
    #[arg(long)]
    design: Option<PathBuf>,
    /// The Fano plane.
    #[arg(long)]
    fano: bool,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long, value_enum, default_value_t = BoundName::Incidence)]
    bound: BoundName,
    /// Slack ε > 0; integers, fractions `a/b` and decimals are read exactly.
    #[arg(long, default_value = "1")]
    epsilon: String,
    /// Richness threshold.
    #[arg(long, default_value_t = 2)]
    t: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BoundName {
    Incidence,
    RichBlocks,
    RichPoints,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Result of a command: the document to emit and the exit code.
struct Output {
    body: String,
    code: u8,
}

impl Output {
    fn json(value: Value, code: u8) -> Self {
        let mut body = serde_json::to_string_pretty(&value).expect("reports serialize");
        body.push('\n');
        Output { body, code }
    }
}

fn report(command: &str, fields: Value) -> Value {
    let mut doc = json!({ "schema": SCHEMA, "command": command });
    if let (Some(doc), Value::Object(fields)) = (doc.as_object_mut(), fields) {
        doc.extend(fields);
    }
    doc
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Parses `key=value,key=value` into the values of the requested keys.
fn parse_keyed<const N: usize>(spec: &str, keys: [&str; N]) -> Result<[u64; N], CliError> {
    let mut values = [None; N];
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::validation(format!("expected key=value, got `{part}`")))?;
        let slot = keys.iter().position(|k| *k == key.trim()).ok_or_else(|| {
            CliError::validation(format!("unknown key `{}` in `{spec}`", key.trim()))
        })?;
        let parsed = value.trim().parse().map_err(|_| {
            CliError::validation(format!("`{}` is not a non-negative integer", value.trim()))
        })?;
        values[slot] = Some(parsed);
    }
    let mut out = [0; N];
    for (i, v) in values.iter().enumerate() {
        out[i] =
            v.ok_or_else(|| CliError::validation(format!("missing `{}` in `{spec}`", keys[i])))?;
    }
    Ok(out)
}

fn to_u32(v: u64) -> Result<u32, CliError> {
    u32::try_from(v).map_err(|_| CliError::validation(format!("{v} is too large")))
}

fn parse_ag(spec: &str) -> Result<GeometryParams, CliError> {
    let [q, n, m] = parse_keyed(spec, ["q", "n", "m"])?;
    Ok(GeometryParams::new(to_u32(q)?, to_u32(n)?, to_u32(m)?)?)
}

fn load_design(source: &DesignSource) -> Result<Design, CliError> {
    if let Some(spec) = &source.ag {
        return Ok(Design::from_affine_geometry(&parse_ag(spec)?)?);
    }
    if let Some(path) = &source.design {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        return Ok(Design::from_text(&text)?);
    }
    Ok(Design::fano())
}

fn parse_epsilon(s: &str) -> Result<Rational, CliError> {
    Ok(rational::parse(s)?)
}

fn bound_kind(args: &BoundArgs) -> Result<BoundKind, CliError> {
    let query = || -> Result<RichnessQuery, CliError> {
        Ok(RichnessQuery::new(parse_epsilon(&args.epsilon)?, args.t)?)
    };
    Ok(match args.bound {
        BoundName::Incidence => BoundKind::Incidence,
        BoundName::RichBlocks => BoundKind::RichBlocks(query()?),
        BoundName::RichPoints => BoundKind::RichPoints(query()?),
    })
}

fn design_summary(d: &Design) -> Value {
    let mut v = json!({ "params": to_value(d.params()) });
    if let Some(g) = d.geometry() {
        v["geometry"] = to_value(g);
    }
    v
}

fn cmd_generate(source: &DesignSource, out: &Option<PathBuf>) -> Result<Output, CliError> {
    let d = load_design(source)?;
    let text = d.to_text();
    match out {
        Some(path) => {
            fs::write(path, text)?;
            Ok(Output::json(
                report("generate", design_summary(&d)),
                code::SUCCESS,
            ))
        }
        None => {
            eprintln!("{}", design_summary(&d));
            Ok(Output {
                body: text,
                code: code::SUCCESS,
            })
        }
    }
}

fn cmd_spectrum(source: &DesignSource, theoretical_only: bool) -> Result<Output, CliError> {
    let d = load_design(source)?;
    let spectrum = if theoretical_only {
        theoretical_spectrum(d.params())?
    } else {
        numeric_spectrum(&d)?
    };
    let mut doc = report("spectrum", design_summary(&d));
    doc["spectrum"] = to_value(&spectrum);
    Ok(Output::json(doc, code::SUCCESS))
}

/// Reports emitted by `verify`: every violation, then the tightest case.
fn summary_reports(summary: &VerificationSummary) -> Vec<BoundReport> {
    let mut reports = summary.violations.clone();
    if let Some(t) = &summary.tightest {
        if !t.is_violation() {
            reports.push(t.clone());
        }
    }
    reports
}

#[derive(Serialize)]
struct CsvRow<'a> {
    bound_name: &'a str,
    status: String,
    satisfied: bool,
    measured: f64,
    bound_value: f64,
    slack_ratio: Option<f64>,
    tightness: Option<f64>,
    size_p: Option<usize>,
    size_l: Option<usize>,
    points: String,
    blocks: String,
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn reports_csv(reports: &[BoundReport]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        let status = to_value(&r.status).as_str().unwrap_or_default().to_string();
        w.serialize(CsvRow {
            bound_name: &r.bound_name,
            status,
            satisfied: r.satisfied,
            measured: r.measured,
            bound_value: r.bound_value.approx,
            slack_ratio: r.slack_ratio,
            tightness: r.tightness,
            size_p: r.subset.as_ref().map(|s| s.points.len()),
            size_l: r.subset.as_ref().map(|s| s.blocks.len()),
            points: r
                .subset
                .as_ref()
                .map(|s| join(&s.points))
                .unwrap_or_default(),
            blocks: r
                .subset
                .as_ref()
                .map(|s| join(&s.blocks))
                .unwrap_or_default(),
        })
        .map_err(|e| CliError::validation(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::validation(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Size used when sampling the side a richness bound is about: the smallest
/// size meeting its hypothesis, if any subset is that large.
fn default_rich_size(d: &Design, kind: &BoundKind) -> Option<usize> {
    let p = d.params();
    let (min, limit) = match kind {
        BoundKind::Incidence => return None,
        BoundKind::RichBlocks(q) => (rich_block_bound(p, q).min_size, p.num_points),
        BoundKind::RichPoints(q) => (rich_point_bound(p, q).min_size, p.num_blocks),
    };
    let k = rational::ceil_usize(&min);
    (k <= limit).then_some(k)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    source: &DesignSource,
    bound: &BoundArgs,
    budget: usize,
    seed: Option<u64>,
    exhaustive: bool,
    size_p: Option<usize>,
    size_l: Option<usize>,
    format: Format,
) -> Result<Output, CliError> {
    let d = load_design(source)?;
    let kind = bound_kind(bound)?;
    let rich_size = default_rich_size(&d, &kind);
    let (size_p, size_l) = match kind {
        BoundKind::RichBlocks(_) => (size_p.or(rich_size), size_l),
        BoundKind::RichPoints(_) => (size_p, size_l.or(rich_size)),
        BoundKind::Incidence => (size_p, size_l),
    };
    let summary = if exhaustive {
        verify_exhaustive(&d, &kind, size_p, size_l)?
    } else {
        let seed = seed
            .ok_or_else(|| CliError::validation("sampling needs --seed (or use --exhaustive)"))?;
        let spec = SamplingSpec {
            count: budget,
            seed,
            point_size: size_p.map_or(SizeSpec::Uniform, SizeSpec::Fixed),
            block_size: size_l.map_or(SizeSpec::Uniform, SizeSpec::Fixed),
        };
        verify_sampled(&d, &kind, &spec)?
    };
    let exit = if summary.has_violation() {
        code::VIOLATION
    } else {
        code::SUCCESS
    };
    let reports = summary_reports(&summary);
    if format == Format::Csv {
        return Ok(Output {
            body: reports_csv(&reports)?,
            code: exit,
        });
    }
    let mut doc = report("verify", design_summary(&d));
    doc["mode"] = json!(if exhaustive { "exhaustive" } else { "sampled" });
    doc["seed"] = json!(if exhaustive { None } else { seed });
    doc["evaluated"] = json!(summary.evaluated);
    doc["satisfied"] = json!(summary.satisfied);
    doc["violated"] = json!(summary.violated);
    doc["hypothesis_unmet"] = json!(summary.hypothesis_unmet);
    doc["reports"] = to_value(&reports);
    Ok(Output::json(doc, exit))
}

fn cmd_tightness(
    source: &DesignSource,
    bound: &BoundArgs,
    budget: usize,
    seed: u64,
) -> Result<Output, CliError> {
    let d = load_design(source)?;
    let kind = bound_kind(bound)?;
    let best = tightness_search(&d, &kind, budget, seed)?;
    let exit = if best.is_violation() {
        code::VIOLATION
    } else {
        code::SUCCESS
    };
    let mut doc = report("tightness", design_summary(&d));
    doc["budget"] = json!(budget);
    doc["seed"] = json!(seed);
    doc["report"] = to_value(&best);
    Ok(Output::json(doc, exit))
}

fn cmd_corollary(ag: &str, bound: &BoundArgs) -> Result<Output, CliError> {
    let g = parse_ag(ag)?;
    let (which, query) = match bound.bound {
        BoundName::Incidence => (CorollaryKind::Incidence, None),
        BoundName::RichBlocks => (
            CorollaryKind::RichFlats,
            Some(RichnessQuery::new(parse_epsilon(&bound.epsilon)?, bound.t)?),
        ),
        BoundName::RichPoints => (
            CorollaryKind::RichPoints,
            Some(RichnessQuery::new(parse_epsilon(&bound.epsilon)?, bound.t)?),
        ),
    };
    let c = ff_corollary_bounds(&g, which, query.as_ref())?;
    let mut doc = report("corollary", json!({ "geometry": to_value(&g) }));
    doc["bounds"] = to_value(&c);
    if query.is_some() {
        doc["epsilon"] = json!(bound.epsilon);
        doc["t"] = json!(bound.t);
    }
    Ok(Output::json(doc, code::SUCCESS))
}

fn cmd_triangles(
    points: &Option<PathBuf>,
    random: &Option<String>,
    seed: Option<u64>,
    epsilon: &str,
) -> Result<Output, CliError> {
    let set = match (points, random) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
            PlanePointSet::from_text(&text)?
        }
        (None, Some(spec)) => {
            let [q, size] = parse_keyed(spec, ["q", "size"])?;
            let seed = seed.ok_or_else(|| CliError::validation("--random needs --seed"))?;
            let f = FiniteField::with_order(to_u32(q)?)?;
            PlanePointSet::random(&f, size as usize, &mut seeded_rng(seed))?
        }
        (None, None) => return Err(CliError::validation("give --points or --random")),
    };
    let eps = parse_epsilon(epsilon)?;
    let r = distinct_areas_experiment(&set, &eps)?;
    let exit = if r.satisfied {
        code::SUCCESS
    } else {
        code::VIOLATION
    };
    let mut doc = report("triangles", json!({ "seed": seed }));
    doc["result"] = to_value(&r);
    Ok(Output::json(doc, exit))
}

fn cmd_search_areas(q: u32, size: usize, budget: usize, seed: u64) -> Result<Output, CliError> {
    let witnesses = missing_area_search(q, size, budget, seed)?;
    let doc = report(
        "search-areas",
        json!({
            "q": q,
            "size": size,
            "budget": budget,
            "seed": seed,
            "witness_count": witnesses.len(),
            "witnesses": to_value(&witnesses),
        }),
    );
    Ok(Output::json(doc, code::SUCCESS))
}

fn run(cli: Cli) -> Result<(Output, Option<PathBuf>), CliError> {
    Ok(match cli.command {
        Command::Generate { source, out } => (cmd_generate(&source, &out)?, None),
        Command::Spectrum {
            source,
            theoretical_only,
            out,
        } => (cmd_spectrum(&source, theoretical_only)?, out),
        Command::Verify {
            source,
            bound,
            budget,
            seed,
            exhaustive,
            size_p,
            size_l,
            format,
            out,
        } => (
            cmd_verify(
                &source, &bound, budget, seed, exhaustive, size_p, size_l, format,
            )?,
            out,
        ),
        Command::Tightness {
            source,
            bound,
            budget,
            seed,
            out,
        } => (cmd_tightness(&source, &bound, budget, seed)?, out),
        Command::Corollary { ag, bound, out } => (cmd_corollary(&ag, &bound)?, out),
        Command::Triangles {
            points,
            random,
            seed,
            epsilon,
            out,
        } => (cmd_triangles(&points, &random, seed, &epsilon)?, out),
        Command::SearchAreas {
            q,
            size,
            budget,
            seed,
            out,
        } => (cmd_search_areas(q, size, budget, seed)?, out),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                code::VALIDATION
            } else {
                code::SUCCESS
            });
        }
    };
    let result = run(cli).and_then(|(output, out)| {
        match out {
            Some(path) => fs::write(path, &output.body)?,
            None => print!("{}", output.body),
        }
        Ok(output.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
