//! The `snlab` command line.
//!
//! Every subcommand shares one flag set ([`Params`]); a TOML file passed with
//! `--config` supplies values for flags that were not given. The effective
//! values, defaults included, are echoed in every output.
//!
//! Exit codes: 0 on success, 2 for bad input (unknown space, malformed file,
//! violated precondition), 3 when an enumeration budget ran out.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Value};

use crate::dist::Dist;
use crate::embeddability::{
    ball_growth_profile, covering_estimate, schoenberg_subset, sn_vs_doubling_report, ubg_report, GramVerdict,
    DEFAULT_EIGEN_TOLERANCE,
};
use crate::error::{Error, ParseError, Result};
use crate::isoperimetry::{
    amenability_bw_test, amenability_cgh_test, iso_constant_estimate, nested_family, quasi_lattice_verify,
    sn_witness_search, AmenabilityResult, AmenabilityVerdict, BoundEstimate, BwOptions, CghOptions, Direction, Gamma,
    IsoQuotientRecord, QuasiLattice, QuasiLatticeCheck, SearchOptions, SnSearchOptions, SnVerdict, Strategy,
    DEFAULT_EXHAUSTIVE_CAP, DEFAULT_GREEDY_MOVES,
};
use crate::local_graph::LocalGraph;
use crate::metric_graph::{find_tripod, validate_metric_graph};
use crate::report::{Outcome, Plot, Report, Table};
use crate::space::{ball, discrete_neighborhood, distance_levels, Capped, MetricSpace, PointSet, DEFAULT_POINT_CAP};
use crate::zoo::{make_space, BoxFamily, SpaceSpec, WeightRule, ZooSpace, ZOO_KINDS};
use crate::zoom::{growth_classify, zoom_aggregate, zoom_profile};

/// Point sets longer than this are listed only partially in JSON output.
const MAX_LISTED_POINTS: usize = 2000;

#[derive(Parser, Debug)]
#[command(
    name = "snlab",
    version,
    about = "Isoperimetry, amenability and embedding diagnostics for locally finite metric spaces"
)]
pub struct Cli {
    /// TOML file with parameter values; command line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for the parallel searches.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zoo of built-in spaces.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
    /// Check the two compatibility conditions of a weighted graph (--file).
    ValidateGraph(Params),
    /// Isoperimetric quotients |dB_k(A)|/|A| (--family nested|exhaustive|greedy).
    Profile(Params),
    /// Search a set with quotient below --epsilon.
    SnSearch(Params),
    /// Amenability test (--test cgh|bw).
    Amenability(Params),
    /// Find a tripod or semi-tripod in a graph space.
    Tripod(Params),
    /// Gram matrix test for isometric Hilbert embeddability of a finite set.
    EmbedCheck(Params),
    /// Covering and packing of B(x, 2t) by t-balls (--t).
    Doubling(Params),
    /// Radii at which the ball about a point grows.
    GrowthProfile(Params),
    /// Ball size ratios between sample points (--radii).
    Ubg(Params),
    /// Dyadic growth bands against doubling estimates.
    SnVsDoubling(Params),
    /// Zoom ratios |dN_nk(x)| / |dN_(n-1)k(x)|.
    Zoom(Params),
    /// Polynomial or exponential ball growth in a word metric.
    GrowthClassify(Params),
}

#[derive(Subcommand, Debug)]
enum ZooAction {
    /// List every space kind.
    List(Params),
}

/// Flags shared by all subcommands. Point lists are separated by `;`, number
/// lists by `,` or `;`.
#[derive(Args, Serialize, Deserialize, Debug, Default, Clone)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Params {
    /// Space kind, see `snlab zoo list`.
    #[arg(long)]
    #[serde(default)]
    pub space: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub dim: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub rank: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub degree: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub arity: Option<usize>,
    /// Weight base of a weighted tree.
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub base: Option<String>,
    /// Component sizes of a box space.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    /// Box space components: cycles or random-regular.
    #[arg(long)]
    #[serde(default)]
    pub box_family: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    /// Three tripod arm weights.
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub weights: Option<String>,
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub arm_edge: Option<String>,
    /// Weighted graph (JSON or edge list) or finite metric (JSON).
    #[arg(long)]
    #[serde(default)]
    pub file: Option<PathBuf>,

    /// Neighborhood parameter; `zoom` accepts a list.
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub k: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub horizon: Option<usize>,
    /// Search family for `profile`: nested, exhaustive or greedy.
    #[arg(long)]
    #[serde(default)]
    pub family: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub n_max: Option<usize>,
    /// Amenability test: cgh or bw.
    #[arg(long)]
    #[serde(default)]
    pub test: Option<String>,
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub epsilon: Option<String>,
    /// Growth factor of the cgh test.
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub factor: Option<String>,
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub delta: Option<String>,
    /// Boundary radius of the bw test.
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub r: Option<String>,
    /// Covering radius of an explicit lattice (--gamma).
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub alpha: Option<String>,
    /// Explicit lattice points for the bw test.
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub gamma: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub center: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub root: Option<String>,
    /// Hop radius budget of the tripod search.
    #[arg(long)]
    #[serde(default)]
    pub radius: Option<usize>,
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub points: Option<String>,
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub window: Option<String>,
    /// Window given as the closed ball of this radius about the center.
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub window_radius: Option<String>,
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub radii: Option<String>,
    #[arg(long)]
    #[serde(default, deserialize_with = "loose")]
    pub t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub r_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub r_max: Option<i64>,
    #[arg(long)]
    #[serde(default)]
    pub greedy_moves: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub exhaustive_cap: Option<usize>,
    /// Eigenvalue tolerance of the Gram test.
    #[arg(long)]
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Largest number of points a single enumeration may produce.
    #[arg(long)]
    #[serde(default)]
    pub cap: Option<usize>,

    /// json or csv.
    #[arg(long)]
    #[serde(default)]
    pub format: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// `plot-data` writes two-column CSV next to the output.
    #[arg(long)]
    #[serde(default)]
    pub emit: Option<String>,
}

fn flatten(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(flatten).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

/// Accepts strings, numbers and arrays where a string is expected.
fn loose<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<String>, D::Error> {
    Ok(match Option::<Value>::deserialize(d)? {
        None | Some(Value::Null) => None,
        Some(v) => Some(flatten(&v)),
    })
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Parse(ParseError::Format(msg.into()))
}

/// Config file values overlaid with the command line flags.
fn merge(flags: &Params, config: Option<&Path>) -> Result<Params> {
    let mut merged = serde_json::Map::new();
    if let Some(path) = config {
        let text = std::fs::read_to_string(path)?;
        let table: toml::Table = toml::from_str(&text).map_err(|e| format_err(format!("{}: {e}", path.display())))?;
        let value = serde_json::to_value(table).map_err(|e| format_err(e.to_string()))?;
        if let Value::Object(m) = value {
            merged.extend(m);
        }
    }
    if let Value::Object(m) = serde_json::to_value(flags).expect("flags serialize") {
        merged.extend(m.into_iter().filter(|(_, v)| !v.is_null()));
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| format_err(format!("config: {e}")))
}

/// Resolved parameters and the record of what was used.
struct Ctx {
    p: Params,
    used: BTreeMap<&'static str, Value>,
}

impl Ctx {
    fn get<T: Serialize>(&mut self, name: &'static str, v: Option<T>, default: T) -> T {
        let x = v.unwrap_or(default);
        self.used.insert(name, serde_json::to_value(&x).expect("parameters serialize"));
        x
    }

    fn opt<T: Serialize>(&mut self, name: &'static str, v: Option<T>) -> Option<T> {
        if let Some(x) = &v {
            self.used.insert(name, serde_json::to_value(x).expect("parameters serialize"));
        }
        v
    }

    fn dist(&mut self, name: &'static str, v: Option<String>, default: &str) -> Result<Dist> {
        let s = self.get(name, v, default.to_string());
        parse_dist(name, &s)
    }

    fn dists(&mut self, name: &'static str, v: Option<String>, default: &str) -> Result<Vec<Dist>> {
        let s = self.get(name, v, default.to_string());
        split_numbers(&s).map(|x| parse_dist(name, x)).collect()
    }

    fn k(&mut self) -> Result<usize> {
        let s = self.get("k", self.p.k.clone(), "1".into());
        parse_usize("k", &s)
    }

    fn ks(&mut self) -> Result<Vec<usize>> {
        let s = self.get("k", self.p.k.clone(), "1".into());
        split_numbers(&s).map(|x| parse_usize("k", x)).collect()
    }
}

fn split_numbers(s: &str) -> impl Iterator<Item = &str> {
    s.split([',', ';']).map(str::trim).filter(|x| !x.is_empty())
}

fn parse_dist(name: &str, s: &str) -> Result<Dist> {
    s.parse().map_err(|e| Error::precondition(format!("--{name}: {e}")))
}

fn parse_usize(name: &str, s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::precondition(format!("--{name}: expected a nonnegative integer, found `{s}`")))
}

fn space_spec(ctx: &mut Ctx) -> Result<SpaceSpec> {
    let kind = match (&ctx.p.space, &ctx.p.file) {
        (Some(k), _) => k.clone(),
        (None, Some(_)) => "from-file".to_string(),
        (None, None) => return Err(Error::precondition("--space is required (see `snlab zoo list`)")),
    };
    ctx.used.insert("space", json!(kind));
    Ok(match kind.as_str() {
        "harmonic" => SpaceSpec::Harmonic,
        "integer-lattice" => SpaceSpec::IntegerLattice { dim: ctx.get("dim", ctx.p.dim, 1) },
        "free-group" => SpaceSpec::FreeGroup { rank: ctx.get("rank", ctx.p.rank, 2) },
        "regular-tree" => SpaceSpec::RegularTree { degree: ctx.get("degree", ctx.p.degree, 3) },
        "tree-plus-ray" => SpaceSpec::TreePlusRay { degree: ctx.get("degree", ctx.p.degree, 3) },
        "weighted-tree" => {
            let arity = ctx.get("arity", ctx.p.arity, 2);
            let base = ctx.dist("base", ctx.p.base.clone(), "10")?;
            let rule = if base == Dist::one() { WeightRule::Unit } else { WeightRule::Geometric { base } };
            SpaceSpec::WeightedTree { arity, rule }
        }
        "box-space" => {
            let family = match ctx.get("box-family", ctx.p.box_family.clone(), "cycles".into()).as_str() {
                "cycles" => BoxFamily::Cycles,
                "random-regular" => BoxFamily::RandomRegular {
                    degree: ctx.get("degree", ctx.p.degree, 4),
                    seed: ctx.get("seed", ctx.p.seed, 0),
                },
                other => {
                    return Err(Error::precondition(format!("unknown box family `{other}` (cycles, random-regular)")))
                }
            };
            SpaceSpec::BoxSpace { family, sizes: ctx.get("sizes", ctx.p.sizes.clone(), vec![4, 8, 16]) }
        }
        "tripod" | "semi-tripod" => {
            let w = ctx.dists("weights", ctx.p.weights.clone(), "1,1,1")?;
            let weights: [Dist; 3] =
                w.try_into().map_err(|_| Error::precondition("--weights needs exactly three values"))?;
            if kind == "tripod" {
                SpaceSpec::Tripod { weights }
            } else {
                SpaceSpec::SemiTripod { weights, arm_edge: ctx.dist("arm-edge", ctx.p.arm_edge.clone(), "1")? }
            }
        }
        "from-file" => {
            let path = ctx.p.file.clone().ok_or_else(|| Error::precondition("from-file needs --file"))?;
            ctx.used.insert("file", json!(path.display().to_string()));
            SpaceSpec::FromFile { path }
        }
        other => return Err(Error::precondition(format!("unknown space kind `{other}` (see `snlab zoo list`)"))),
    })
}

// ---------------------------------------------------------------------------
// helpers shared by the commands

struct Body {
    result: Value,
    table: Table,
    plot: Option<Plot>,
    outcome: Outcome,
}

impl Body {
    fn new(result: Value, table: Table) -> Self {
        Body { result, table, plot: None, outcome: Outcome::Complete }
    }

    fn plot(mut self, x: &str, y: &str, points: Vec<(String, String)>) -> Self {
        self.plot = Some(Plot { x: x.into(), y: y.into(), points });
        self
    }
}

fn point<S: MetricSpace>(s: &S, label: &str) -> Result<S::Point> {
    s.parse_point(label).ok_or_else(|| Error::UnknownPoint(label.trim().to_string()))
}

fn point_list<S: MetricSpace>(s: &S, text: &str) -> Result<Vec<S::Point>> {
    text.split(';').map(str::trim).filter(|x| !x.is_empty()).map(|l| point(s, l)).collect()
}

fn center<S: MetricSpace>(s: &S, ctx: &mut Ctx) -> Result<S::Point> {
    match ctx.opt("center", ctx.p.center.clone()) {
        Some(l) => point(s, &l),
        None => {
            let b = s.base_point();
            ctx.used.insert("center", json!(s.label(&b)));
            Ok(b)
        }
    }
}

fn points_or<S: MetricSpace>(s: &S, ctx: &mut Ctx, fallback: Vec<S::Point>) -> Result<Vec<S::Point>> {
    match ctx.opt("points", ctx.p.points.clone()) {
        Some(text) => point_list(s, &text),
        None => Ok(fallback),
    }
}

/// `--window` (explicit points) or `--window-radius` (ball about `c`).
fn window<S: MetricSpace>(s: &S, ctx: &mut Ctx, c: &S::Point) -> Result<Option<PointSet<S::Point>>> {
    if let Some(text) = ctx.opt("window", ctx.p.window.clone()) {
        return Ok(Some(point_list(s, &text)?.into_iter().collect()));
    }
    match ctx.opt("window-radius", ctx.p.window_radius.clone()) {
        Some(r) => Ok(Some(ball(s, c, &parse_dist("window-radius", &r)?)?)),
        None => Ok(None),
    }
}

fn labels<S: MetricSpace>(s: &S, set: &PointSet<S::Point>) -> Value {
    let listed: Vec<String> = set.iter().take(MAX_LISTED_POINTS).map(|p| s.label(p)).collect();
    json!(listed)
}

fn set_json<S: MetricSpace>(s: &S, set: &PointSet<S::Point>) -> Value {
    json!({
        "size": set.len(),
        "points": labels(s, set),
        "truncated": set.len() > MAX_LISTED_POINTS,
    })
}

fn record_json<S: MetricSpace>(s: &S, r: &IsoQuotientRecord<S::Point>) -> Value {
    json!({
        "k": r.k,
        "set_size": r.set_size,
        "boundary_size": r.boundary_size,
        "quotient": r.quotient,
        "witness": set_json(s, &r.witness),
    })
}

fn scope(window: impl Into<String>, horizon: Option<usize>, direction: Direction, certified: bool) -> Value {
    json!({
        "window": window.into(),
        "horizon": horizon,
        "direction": direction,
        "certified": certified,
    })
}

fn f(x: f64) -> String {
    x.to_string()
}

// ---------------------------------------------------------------------------
// commands

fn cmd_zoo_list() -> Body {
    let mut table = Table::new(&["kind", "description"]);
    let kinds: Vec<Value> = ZOO_KINDS
        .iter()
        .map(|(k, d)| {
            table.push(vec![k.to_string(), d.to_string()]);
            json!({"kind": k, "description": d})
        })
        .collect();
    Body::new(json!({ "kinds": kinds }), table)
}

fn cmd_validate_graph(ctx: &mut Ctx) -> Result<Body> {
    let path = ctx.p.file.clone().ok_or_else(|| Error::precondition("validate-graph needs --file"))?;
    ctx.used.insert("file", json!(path.display().to_string()));
    let g = crate::io::load_graph(&path)?;
    let report = validate_metric_graph(&g);
    let mut table =
        Table::new(&["condition", "holds", "from", "to", "first_path", "first_weight", "second_path", "second_weight"]);
    for (name, c) in [("condition1", &report.condition1), ("condition2", &report.condition2)] {
        let mut row = vec![name.to_string(), c.holds.to_string()];
        match &c.violation {
            Some(v) => row.extend([
                v.from.clone(),
                v.to.clone(),
                v.first_path.join(" "),
                v.first_weight.to_string(),
                v.second_path.join(" "),
                v.second_weight.to_string(),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), 6)),
        }
        table.push(row);
    }
    let result = json!({
        "vertices": g.len(),
        "edges": g.edges().len(),
        "max_degree": g.max_degree(),
        "is_tree": g.is_tree(),
        "valid": report.is_valid(),
        "report": report,
        "scope": scope(format!("all vertex pairs of {}", path.display()), None, Direction::Estimate, true),
    });
    Ok(Body::new(result, table))
}

fn cmd_profile<S: MetricSpace>(s: &S, ctx: &mut Ctx) -> Result<Body> {
    let k = ctx.k()?;
    let family = ctx.get("family", ctx.p.family.clone(), "nested".into());
    let c = center(s, ctx)?;
    let n_max = ctx.get("n-max", ctx.p.n_max, 20);
    if family == "nested" {
        let records = nested_family(s, &c, k, n_max)?;
        let mut table = Table::new(&["n", "set_size", "boundary_size", "quotient", "quotient_float"]);
        let mut plot = Vec::new();
        let mut rows = Vec::new();
        for (i, r) in records.iter().enumerate() {
            let n = i + 1;
            table.push(vec![
                n.to_string(),
                r.set_size.to_string(),
                r.boundary_size.to_string(),
                r.quotient.to_string(),
                f(r.quotient.to_f64()),
            ]);
            plot.push((n.to_string(), f(r.quotient.to_f64())));
            rows.push(
                json!({"n": n, "set_size": r.set_size, "boundary_size": r.boundary_size, "quotient": r.quotient}),
            );
        }
        let window = format!("nested sets A_n = dN_(n-1)({}), n = 1..={n_max}", s.label(&c));
        let best = records.iter().map(|r| r.quotient.clone()).min().expect("n_max >= 1");
        let estimate = BoundEstimate {
            value: best,
            direction: Direction::UpperBoundOfInf,
            certified: false,
            window: window.clone(),
            k,
        };
        let result = json!({
            "family": "nested",
            "k": k,
            "center": s.label(&c),
            "rows": rows,
            "estimate": estimate,
            "scope": scope(window, Some(n_max), Direction::UpperBoundOfInf, false),
        });
        return Ok(Body::new(result, table).plot("n", "quotient", plot));
    }
    let strategy: Strategy = family.parse()?;
    let win = match window(s, ctx, &c)? {
        Some(w) => w,
        None => discrete_neighborhood(s, &PointSet::singleton(c.clone()), n_max.saturating_sub(1))?.dn,
    };
    let options = SearchOptions {
        exhaustive_cap: ctx.get("exhaustive-cap", ctx.p.exhaustive_cap, DEFAULT_EXHAUSTIVE_CAP),
        greedy_moves: ctx.get("greedy-moves", ctx.p.greedy_moves, DEFAULT_GREEDY_MOVES),
    };
    let est = iso_constant_estimate(s, &win, k, strategy, &options)?;
    let mut table =
        Table::new(&["strategy", "k", "window_size", "value", "direction", "certified", "set_size", "evaluated"]);
    let strategy_name = serde_json::to_value(est.strategy).expect("enum serializes");
    let direction_name = serde_json::to_value(est.estimate.direction).expect("enum serializes");
    table.push(vec![
        flatten(&strategy_name),
        k.to_string(),
        win.len().to_string(),
        est.estimate.value.to_string(),
        flatten(&direction_name),
        est.estimate.certified.to_string(),
        est.best.set_size.to_string(),
        est.evaluated.to_string(),
    ]);
    let result = json!({
        "family": strategy_name,
        "k": k,
        "center": s.label(&c),
        "window": set_json(s, &win),
        "estimate": est.estimate,
        "best": record_json(s, &est.best),
        "evaluated": est.evaluated,
        "scope": scope(est.estimate.window.clone(), None, est.estimate.direction, est.estimate.certified),
    });
    Ok(Body::new(result, table))
}

fn cmd_sn_search<S: MetricSpace>(s: &S, ctx: &mut Ctx) -> Result<Body> {
    let k = ctx.k()?;
    let epsilon = ctx.dist("epsilon", ctx.p.epsilon.clone(), "1/10")?;
    let n_max = ctx.get("n-max", ctx.p.n_max, 50);
    let greedy_moves = ctx.get("greedy-moves", ctx.p.greedy_moves, DEFAULT_GREEDY_MOVES);
    let c = center(s, ctx)?;
    let seeds = points_or(s, ctx, vec![c])?;
    let options = SnSearchOptions { epsilon, seeds: seeds.clone(), n_max, greedy_moves, extra: Vec::new() };
    let search = sn_witness_search(s, k, &options)?;
    let mut table = Table::new(&["index", "set_size", "boundary_size", "quotient", "quotient_float"]);
    let mut plot = Vec::new();
    let mut rows = Vec::new();
    for (i, r) in search.records.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            r.set_size.to_string(),
            r.boundary_size.to_string(),
            r.quotient.to_string(),
            f(r.quotient.to_f64()),
        ]);
        plot.push((r.set_size.to_string(), f(r.quotient.to_f64())));
        rows.push(json!({"set_size": r.set_size, "boundary_size": r.boundary_size, "quotient": r.quotient}));
    }
    let witness = match &search.verdict {
        SnVerdict::WitnessedBelow { record, .. } => record_json(s, &search.records[*record]),
        SnVerdict::Inconclusive { .. } => Value::Null,
    };
    let budget = matches!(search.verdict, SnVerdict::Inconclusive { .. }) && !search.diagnostics.is_empty();
    let window =
        format!("nested sets around {} seed(s) with n <= {n_max}, then {greedy_moves} greedy moves", seeds.len());
    let result = json!({
        "k": k,
        "seeds": seeds.iter().map(|p| s.label(p)).collect::<Vec<_>>(),
        "verdict": search.verdict,
        "records": rows,
        "witness": witness,
        "diagnostics": search.diagnostics,
        "scope": scope(window, Some(n_max), Direction::UpperBoundOfInf, false),
    });
    let mut body = Body::new(result, table).plot("set_size", "quotient", plot);
    if budget {
        body.outcome = Outcome::BudgetExhausted;
    }
    Ok(body)
}

fn verdict_json<S: MetricSpace>(s: &S, v: &AmenabilityVerdict<S::Point>) -> Value {
    match v {
        AmenabilityVerdict::WitnessFound { set, measure } => {
            json!({"verdict": "witness-found", "set": set_json(s, set), "measure": measure})
        }
        AmenabilityVerdict::NoWitnessInWindow { window, exhaustive } => {
            json!({"verdict": "no-witness-in-window", "window": window, "exhaustive": exhaustive})
        }
        AmenabilityVerdict::BudgetExhausted { diagnostics } => {
            json!({"verdict": "budget-exhausted", "diagnostics": diagnostics})
        }
    }
}

fn amenability_body<S: MetricSpace>(s: &S, test: &str, res: &AmenabilityResult<S::Point>, extra: Value) -> Body {
    let verdict = verdict_json(s, &res.verdict);
    let (name, size, measure, window, exhaustive) = match &res.verdict {
        AmenabilityVerdict::WitnessFound { set, measure } => {
            ("witness-found", set.len().to_string(), measure.to_string(), "candidate sets".to_string(), false)
        }
        AmenabilityVerdict::NoWitnessInWindow { window, exhaustive } => {
            ("no-witness-in-window", String::new(), String::new(), window.clone(), *exhaustive)
        }
        AmenabilityVerdict::BudgetExhausted { .. } => {
            ("budget-exhausted", String::new(), String::new(), "search stopped by the point cap".into(), false)
        }
    };
    let mut table = Table::new(&["test", "verdict", "set_size", "measure", "checked", "exceptions"]);
    table.push(vec![test.into(), name.into(), size, measure, res.checked.to_string(), res.exceptions.to_string()]);
    let result = json!({
        "test": test,
        "parameters": extra,
        "verdict": verdict,
        "checked": res.checked,
        "exceptions": res.exceptions,
        "diagnostics": res.diagnostics,
        "scope": scope(window, None, Direction::Estimate, exhaustive),
    });
    let mut body = Body::new(result, table);
    if matches!(res.verdict, AmenabilityVerdict::BudgetExhausted { .. }) {
        body.outcome = Outcome::BudgetExhausted;
    }
    body
}

fn cmd_amenability<S: MetricSpace>(s: &S, ctx: &mut Ctx) -> Result<Body> {
    let test = ctx.get("test", ctx.p.test.clone(), "cgh".into());
    let c = center(s, ctx)?;
    let seeds = points_or(s, ctx, vec![c.clone()])?;
    let win = window(s, ctx, &c)?;
    let n_max = ctx.get("n-max", ctx.p.n_max, 50);
    let greedy_moves = ctx.get("greedy-moves", ctx.p.greedy_moves, DEFAULT_GREEDY_MOVES);
    let exhaustive_cap = ctx.get("exhaustive-cap", ctx.p.exhaustive_cap, DEFAULT_EXHAUSTIVE_CAP);
    match test.as_str() {
        "cgh" => {
            let s_k = ctx.get("k", ctx.p.k.clone(), "1".into());
            let k = parse_dist("k", &s_k)?;
            let factor = ctx.dist("factor", ctx.p.factor.clone(), "2")?;
            let options =
                CghOptions { factor: factor.clone(), seeds, n_max, greedy_moves, window: win, exhaustive_cap };
            let res = amenability_cgh_test(s, &k, &options)?;
            Ok(amenability_body(s, "cgh", &res, json!({"k": k, "factor": factor})))
        }
        "bw" => {
            let r = ctx.dist("r", ctx.p.r.clone(), "1")?;
            let delta = ctx.dist("delta", ctx.p.delta.clone(), "1/10")?;
            let lattice = match ctx.opt("gamma", ctx.p.gamma.clone()) {
                None => QuasiLattice::identity(),
                Some(text) => {
                    let gamma: PointSet<S::Point> = point_list(s, &text)?.into_iter().collect();
                    let alpha = ctx.dist("alpha", ctx.p.alpha.clone(), "0")?;
                    let w =
                        win.clone().ok_or_else(|| Error::precondition("--gamma needs --window or --window-radius"))?;
                    match quasi_lattice_verify(s, Gamma::Members(gamma), &alpha, &w, std::slice::from_ref(&r))? {
                        QuasiLatticeCheck::Valid(l) => l,
                        QuasiLatticeCheck::CoveringFailure { label, .. } => {
                            return Err(Error::precondition(format!(
                                "not a quasi-lattice: {label} has no lattice point within {alpha}"
                            )))
                        }
                    }
                }
            };
            let options = BwOptions { seeds, n_max, greedy_moves, window: win, exhaustive_cap };
            let res = amenability_bw_test(s, &lattice, &r, &delta, &options)?;
            let k_table: Vec<Value> = lattice.k_table.iter().map(|(r, n)| json!({"r": r, "k_r": n})).collect();
            let extra =
                json!({"r": r, "delta": delta, "alpha": lattice.alpha, "lattice": lattice.window, "k_table": k_table});
            Ok(amenability_body(s, "bw", &res, extra))
        }
        other => Err(Error::precondition(format!("unknown amenability test `{other}` (cgh, bw)"))),
    }
}

fn cmd_tripod<G: LocalGraph>(g: &G, ctx: &mut Ctx) -> Result<Body> {
    let root = match ctx.opt("root", ctx.p.root.clone()) {
        Some(l) => point(g, &l)?,
        None => {
            let b = g.base_point();
            ctx.used.insert("root", json!(g.label(&b)));
            b
        }
    };
    let radius = ctx.get("radius", ctx.p.radius, 10);
    let search = find_tripod(g, &root, radius)?;
    let mut table =
        Table::new(&["center", "arm1", "arm2", "arm3", "kind", "connections_among_arms", "sphere", "gram_verdict"]);
    let witness = match &search.witness {
        Some(w) => {
            let four = [w.center.clone(), w.arms[0].clone(), w.arms[1].clone(), w.arms[2].clone()];
            let gram = schoenberg_subset(g, &four, DEFAULT_EIGEN_TOLERANCE)?;
            let verdict = flatten(&serde_json::to_value(&gram.verdict).expect("verdict serializes")["verdict"]);
            let kind = flatten(&serde_json::to_value(w.kind).expect("kind serializes"));
            table.push(vec![
                g.label(&w.center),
                g.label(&w.arms[0]),
                g.label(&w.arms[1]),
                g.label(&w.arms[2]),
                kind.clone(),
                w.connections_among_arms.to_string(),
                w.sphere.to_string(),
                verdict,
            ]);
            json!({
                "center": g.label(&w.center),
                "arms": w.arms.iter().map(|a| g.label(a)).collect::<Vec<_>>(),
                "kind": kind,
                "connections_among_arms": w.connections_among_arms,
                "sphere": w.sphere,
                "gram": gram,
            })
        }
        None => Value::Null,
    };
    let result = json!({
        "root": g.label(&root),
        "radius_budget": search.radius_budget,
        "spheres_inspected": search.spheres_inspected,
        "found": search.witness.is_some(),
        "witness": witness,
        "scope": scope(format!("hop spheres 1..={radius} about {}", g.label(&root)), Some(radius), Direction::Estimate, false),
    });
    Ok(Body::new(result, table))
}

/// Every point of a finite space, in canonical order.
fn all_points<S: MetricSpace>(s: &S) -> Result<Vec<S::Point>> {
    let n = s.cardinality().ok_or_else(|| Error::precondition("the space is infinite; pass --points"))?;
    let levels = distance_levels(s, &PointSet::singleton(s.base_point()), n)?;
    Ok(levels.union_through(n).to_vec())
}

fn cmd_embed_check<S: MetricSpace>(s: &S, ctx: &mut Ctx) -> Result<Body> {
    let pts = match ctx.opt("points", ctx.p.points.clone()) {
        Some(text) => point_list(s, &text)?,
        None => all_points(s)?,
    };
    let tolerance = ctx.get("tolerance", ctx.p.tolerance, DEFAULT_EIGEN_TOLERANCE);
    let res = schoenberg_subset(s, &pts, tolerance)?;
    let verdict = match res.verdict {
        GramVerdict::Embeddable => "embeddable",
        GramVerdict::NotEmbeddable => "not-embeddable",
        GramVerdict::Marginal { .. } => "marginal",
    };
    let mut table = Table::new(&["base_point", "points", "min_eigenvalue", "exact_psd", "verdict"]);
    table.push(vec![
        res.base_point.clone(),
        res.points.join(";"),
        f(res.min_eigenvalue),
        res.exact.as_ref().map(|e| e.positive_semidefinite.to_string()).unwrap_or_default(),
        verdict.into(),
    ]);
    let window = format!("{} given points", pts.len());
    let certified = res.exact.is_some();
    let mut result = serde_json::to_value(&res).expect("gram result serializes");
    result["scope"] = scope(window, None, Direction::Estimate, certified);
    Ok(Body::new(result, table))
}

fn cmd_doubling<S: MetricSpace>(s: &S, ctx: &mut Ctx) -> Result<Body> {
    let c = center(s, ctx)?;
    let ts = ctx.dists("t", ctx.p.t.clone(), "1,2,4,8")?;
    let mut table = Table::new(&["t", "ball_size", "greedy_cover_size", "packing_size", "ratio_to_ball"]);
    let mut plot = Vec::new();
    let mut rows = Vec::new();
    for t in &ts {
        let e = covering_estimate(s, &c, t)?;
        table.push(vec![
            t.to_string(),
            e.ball_size.to_string(),
            e.greedy_cover_size.to_string(),
            e.packing_size.to_string(),
            f(e.ratio_to_ball),
        ]);
        plot.push((f(t.to_f64()), e.greedy_cover_size.to_string()));
        rows.push(e);
    }
    let result = json!({
        "center": s.label(&c),
        "rows": rows,
        "scope": scope(format!("B({}, 2t)", s.label(&c)), None, Direction::Estimate, false),
    });
    Ok(Body::new(result, table).plot("t", "greedy_cover_size", plot))
}

fn cmd_growth_profile<S: MetricSpace>(s: &S, ctx: &mut Ctx) -> Result<Body> {
    let c = center(s, ctx)?;
    let horizon = ctx.get("horizon", ctx.p.horizon, 20);
    let p = ball_growth_profile(s, &c, horizon)?;
    let mut table = Table::new(&["n", "radius", "radius_float", "ball_size"]);
    let mut plot = Vec::new();
    for (i, (r, n)) in p.radii.iter().zip(&p.counts).enumerate() {
        table.push(vec![(i + 1).to_string(), r.to_string(), f(r.to_f64()), n.to_string()]);
        plot.push((f(r.to_f64()), n.to_string()));
    }
    let mut result = serde_json::to_value(&p).expect("profile serializes");
    result["scope"] = scope(format!("first {horizon} growth radii"), Some(horizon), Direction::Estimate, p.exhausted);
    Ok(Body::new(result, table).plot("radius", "ball_size", plot))
}

fn cmd_ubg<S: MetricSpace>(s: &S, ctx: &mut Ctx) -> Result<Body> {
    let c = center(s, ctx)?;
    let fallback = discrete_neighborhood(s, &PointSet::singleton(c.clone()), 2)?.dn.to_vec();
    let samples = points_or(s, ctx, fallback)?;
    let radii = ctx.dists("radii", ctx.p.radii.clone(), "1,2,4")?;
    let rep = ubg_report(s, &samples, &radii)?;
    let mut table = Table::new(&["r", "largest", "largest_size", "smallest", "smallest_size", "ratio"]);
    let mut plot = Vec::new();
    for row in &rep.rows {
        table.push(vec![
            row.r.to_string(),
            row.largest.clone(),
            row.largest_size.to_string(),
            row.smallest.clone(),
            row.smallest_size.to_string(),
            f(row.ratio),
        ]);
        plot.push((f(row.r.to_f64()), f(row.ratio)));
    }
    let mut result = serde_json::to_value(&rep).expect("report serializes");
    result["scope"] = scope(format!("{} sample points", samples.len()), None, Direction::Estimate, false);
    Ok(Body::new(result, table).plot("r", "ratio", plot))
}

fn cmd_sn_vs_doubling<S: MetricSpace>(s: &S, ctx: &mut Ctx) -> Result<Body> {
    let c = center(s, ctx)?;
    let k = ctx.k()?;
    let r_min = ctx.get("r-min", ctx.p.r_min, 0);
    let r_max = ctx.get("r-max", ctx.p.r_max, 3);
    let centers = points_or(s, ctx, Vec::new())?;
    let rep = sn_vs_doubling_report(s, &c, r_min..=r_max, k, &centers)?;
    let mut table = Table::new(&[
        "r",
        "band_count",
        "expansion_factor",
        "k_r_surrogate",
        "ball_size",
        "greedy_cover_size",
        "packing_size",
    ]);
    let mut plot = Vec::new();
    for row in &rep.rows {
        table.push(vec![
            row.r.to_string(),
            row.band_count.to_string(),
            row.expansion_factor.map(f).unwrap_or_default(),
            row.k_r_surrogate.to_string(),
            row.ball_size.to_string(),
            row.cover.greedy_cover_size.to_string(),
            row.cover.packing_size.to_string(),
        ]);
        plot.push((row.r.to_string(), row.band_count.to_string()));
    }
    let mut result = serde_json::to_value(&rep).expect("report serializes");
    result["scope"] = scope(format!("dyadic bands r = {r_min}..={r_max}"), None, Direction::Estimate, false);
    Ok(Body::new(result, table).plot("r", "band_count", plot))
}

fn cmd_zoom<S: MetricSpace>(s: &S, ctx: &mut Ctx) -> Result<Body> {
    let c = center(s, ctx)?;
    let bases = points_or(s, ctx, vec![c])?;
    let ks = ctx.ks()?;
    let horizon = ctx.get("horizon", ctx.p.horizon, 10);
    let mut profiles = Vec::new();
    for x in &bases {
        for &k in &ks {
            profiles.push(zoom_profile(s, x, k, horizon)?);
        }
    }
    let aggregate = zoom_aggregate(&profiles)?;
    let mut table = Table::new(&["base", "k", "n", "size", "ratio", "ratio_float", "running_inf"]);
    let mut plot = Vec::new();
    for p in &profiles {
        for row in &p.rows {
            table.push(vec![
                p.base.clone(),
                p.k.to_string(),
                row.n.to_string(),
                row.size.to_string(),
                row.ratio.to_string(),
                f(row.ratio.to_f64()),
                row.running_inf.to_string(),
            ]);
            plot.push((row.n.to_string(), f(row.ratio.to_f64())));
        }
    }
    let (running_inf, tail_sup) = (&aggregate.zeta_lower_plus, &aggregate.zeta_upper_plus);
    let result = json!({
        "profiles": profiles,
        "aggregate": aggregate,
        "running_inf": running_inf,
        "tail_sup": tail_sup,
        "scope": scope(aggregate.window.clone(), Some(horizon), Direction::UpperBoundOfInf, false),
    });
    Ok(Body::new(result, table).plot("n", "ratio", plot))
}

fn cmd_growth_classify<S: MetricSpace>(s: &S, ctx: &mut Ctx) -> Result<Body> {
    let horizon = ctx.get("horizon", ctx.p.horizon, 10);
    let g = growth_classify(s, horizon)?;
    let mut table = Table::new(&["n", "ball_size", "nth_root"]);
    let mut plot = Vec::new();
    for (n, b) in g.ball_sizes.iter().enumerate() {
        let root = if n == 0 { String::new() } else { f(g.nth_roots[n - 1]) };
        table.push(vec![n.to_string(), b.to_string(), root]);
        plot.push((n.to_string(), b.to_string()));
    }
    let mut result = serde_json::to_value(&g).expect("classification serializes");
    result["scope"] =
        scope(format!("balls about {} up to radius {horizon}", g.base), Some(horizon), Direction::Estimate, false);
    Ok(Body::new(result, table).plot("n", "ball_size", plot))
}

// ---------------------------------------------------------------------------
// driver

fn with_space_body(ctx: &mut Ctx, command: &str) -> Result<(Body, Value)> {
    let spec = space_spec(ctx)?;
    let zoo = make_space(&spec)?;
    let cap = ctx.get("cap", ctx.p.cap, DEFAULT_POINT_CAP);
    let spec_json = serde_json::to_value(&spec).expect("space spec serializes");
    let body = if command == "tripod" {
        crate::with_graph!(&zoo, g => cmd_tripod(&Capped::new(g.clone(), cap), ctx), {
            Err(Error::precondition(format!("`{}` is not a graph space; tripod needs one", zoo.name())))
        })?
    } else {
        crate::with_space!(&zoo, sp => {
            let s = Capped::new(sp.clone(), cap);
            match command {
                "profile" => cmd_profile(&s, ctx),
                "sn-search" => cmd_sn_search(&s, ctx),
                "amenability" => cmd_amenability(&s, ctx),
                "embed-check" => cmd_embed_check(&s, ctx),
                "doubling" => cmd_doubling(&s, ctx),
                "growth-profile" => cmd_growth_profile(&s, ctx),
                "ubg" => cmd_ubg(&s, ctx),
                "sn-vs-doubling" => cmd_sn_vs_doubling(&s, ctx),
                "zoom" => cmd_zoom(&s, ctx),
                "growth-classify" => cmd_growth_classify(&s, ctx),
                other => unreachable!("unhandled command {other}"),
            }
        })?
    };
    let mut spec_json = spec_json;
    if let ZooSpace::Graph(_) | ZooSpace::Finite(_) = zoo {
        spec_json["name"] = json!(zoo.name());
    }
    Ok((body, spec_json))
}

fn plot_path(output: &Path) -> PathBuf {
    output.with_extension("plot.csv")
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let (name, flags) = match &cli.command {
        Command::Zoo { action: ZooAction::List(p) } => ("zoo list", p),
        Command::ValidateGraph(p) => ("validate-graph", p),
        Command::Profile(p) => ("profile", p),
        Command::SnSearch(p) => ("sn-search", p),
        Command::Amenability(p) => ("amenability", p),
        Command::Tripod(p) => ("tripod", p),
        Command::EmbedCheck(p) => ("embed-check", p),
        Command::Doubling(p) => ("doubling", p),
        Command::GrowthProfile(p) => ("growth-profile", p),
        Command::Ubg(p) => ("ubg", p),
        Command::SnVsDoubling(p) => ("sn-vs-doubling", p),
        Command::Zoom(p) => ("zoom", p),
        Command::GrowthClassify(p) => ("growth-classify", p),
    };
    let mut ctx = Ctx { p: merge(flags, cli.config.as_deref())?, used: BTreeMap::new() };
    let format = ctx.get("format", ctx.p.format.clone(), "json".into());
    if format != "json" && format != "csv" {
        return Err(Error::precondition(format!("unknown format `{format}` (json, csv)")));
    }
    let emit_plot = match ctx.opt("emit", ctx.p.emit.clone()).as_deref() {
        None => false,
        Some("plot-data") => true,
        Some(other) => return Err(Error::precondition(format!("unknown --emit value `{other}` (plot-data)"))),
    };
    let (body, space) = match name {
        "zoo list" => (cmd_zoo_list(), Value::Null),
        "validate-graph" => (cmd_validate_graph(&mut ctx)?, Value::Null),
        _ => with_space_body(&mut ctx, name)?,
    };
    let mut config = json!({ "parameters": ctx.used });
    if !space.is_null() {
        config["space"] = space;
    }
    if let Some(path) = &cli.config {
        config["config_file"] = json!(path.display().to_string());
    }
    let report = Report {
        command: name.to_string(),
        config,
        result: body.result,
        table: body.table,
        plot: body.plot,
        outcome: body.outcome,
    };
    let main = if format == "csv" { report.to_csv()? } else { report.to_json() };
    let plot = if emit_plot { report.plot_csv()? } else { None };
    match &ctx.p.output {
        Some(path) => {
            std::fs::write(path, main)?;
            if let Some(p) = plot {
                std::fs::write(plot_path(path), p)?;
            }
        }
        None => {
            print!("{main}");
            if let Some(p) = plot {
                print!("\n{p}");
            }
        }
    }
    Ok(report.outcome)
}

/// Exit code for an error: 3 when a budget ran out, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_budget() {
        3
    } else {
        2
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Errors are reported on standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(n) = cli.jobs {
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match execute(&cli) {
        Ok(Outcome::Complete) => 0,
        Ok(Outcome::BudgetExhausted) => {
            eprintln!("snlab: search budget exhausted; partial results written");
            3
        }
        Err(e) => {
            eprintln!("snlab: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_merge_prefers_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "k = 3\nhorizon = 7\nweights = [1, 2, \"1/2\"]\n").unwrap();
        let flags = Params { k: Some("5".into()), ..Default::default() };
        let p = merge(&flags, Some(&path)).unwrap();
        assert_eq!(p.k.as_deref(), Some("5"));
        assert_eq!(p.horizon, Some(7));
        assert_eq!(p.weights.as_deref(), Some("1;2;1/2"));

        std::fs::write(&path, "colour = 3\n").unwrap();
        assert!(merge(&Params::default(), Some(&path)).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["snlab", "profile", "--space", "nowhere"]), 2);
        assert_eq!(run(["snlab", "frobnicate"]), 2);
        assert_eq!(run(["snlab", "zoom", "--space", "free-group", "--horizon", "30", "--cap", "1000"]), 3);
    }
}
