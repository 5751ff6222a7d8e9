//! Command-line front end. Every command is first turned into a
//! [`Request`], which is also the format of the regression corpus, and then
//! executed into a [`Envelope`].

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::amd::{self, AmdCode};
use crate::constructions;
use crate::corpus;
use crate::diffcore::{self, FrequencyMap, SetFamily};
use crate::error::{Error, Result};
use crate::families::{self, FamilyKind, SizeClass, VerificationReport, VerifyOptions};
use crate::group::{Element, FiniteField};
use crate::json;
use crate::search::{self, SearchMode};
use crate::Rational;

pub const TOOLKIT: &str = concat!("diffam ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GameMode {
    Weak,
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DiffOp {
    /// Internal differences of one set (`--index`) or summed over all sets.
    Internal,
    /// `A_i - A_j` for `--pair i,j`.
    Cross,
    External,
    Outgoing,
    Incoming,
    /// Summed outgoing differences of the sets in `--class`.
    Class,
}

/// One command with its inputs. JSON inputs are kept as values so a request
/// can be stored in a fixture and replayed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Request {
    Verify {
        #[serde(rename = "type")]
        kind: FamilyKind,
        family: Value,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        group: Option<Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambdas: Option<Vec<u64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        classes: Option<Vec<SizeClass>>,
        #[serde(default)]
        relax_sizes: bool,
    },
    Construct {
        recipe: String,
        #[serde(default)]
        params: BTreeMap<String, u64>,
    },
    Diff {
        family: Value,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        group: Option<Value>,
        op: DiffOp,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        index: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pair: Option<[usize; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        class: Option<Vec<usize>>,
    },
    Eval {
        mode: GameMode,
        code: Value,
        #[serde(default)]
        full_table: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<Element>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        source: Option<usize>,
    },
    Classify {
        code: Value,
    },
    ToFamily {
        #[serde(rename = "type")]
        kind: FamilyKind,
        code: Value,
    },
    FromFamily {
        #[serde(rename = "type")]
        kind: FamilyKind,
        family: Value,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        group: Option<Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambdas: Option<Vec<u64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        classes: Option<Vec<SizeClass>>,
        #[serde(default)]
        relax_sizes: bool,
    },
    Search {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spec: Option<Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mode: Option<SearchMode>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget_nodes: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget_seconds: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        jobs: Option<usize>,
        #[serde(default)]
        automorphisms: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sedf_sweep: Option<usize>,
    },
    Relate {
        family: Value,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        group: Option<Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        from: Option<FamilyKind>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        to: Option<FamilyKind>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        maximal: Option<FamilyKind>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        classes: Option<Vec<SizeClass>>,
    },
    ReproducePaper,
}

impl Request {
    pub fn name(&self) -> &'static str {
        match self {
            Request::Verify { .. } => "verify",
            Request::Construct { .. } => "construct",
            Request::Diff { .. } => "diff",
            Request::Eval { .. } => "eval",
            Request::Classify { .. } => "classify",
            Request::ToFamily { .. } => "to-family",
            Request::FromFamily { .. } => "from-family",
            Request::Search { .. } => "search",
            Request::Relate { .. } => "relate",
            Request::ReproducePaper => "reproduce-paper",
        }
    }
}

/// Output of one command.
#[derive(Clone, Debug, Serialize)]
pub struct Envelope {
    pub toolkit: &'static str,
    pub command: &'static str,
    pub result: Value,
    pub exit_code: i32,
}

/// Exit code for an error: a failed hypothesis is a negative answer, every
/// other error is a usage or input problem.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Precondition(_) => 1,
        _ => 2,
    }
}

pub fn error_json(e: &Error) -> Value {
    json!({ "error": { "code": e.code(), "kind": e.kind(), "message": e.to_string() } })
}

/// Execute a request; errors become an error payload in the envelope.
pub fn execute(request: &Request) -> Envelope {
    let (result, exit_code) = match dispatch(request) {
        Ok(ok) => ok,
        Err(e) => (error_json(&e), error_exit_code(&e)),
    };
    Envelope { toolkit: TOOLKIT, command: request.name(), result, exit_code }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("values serialize")
}

fn family_input(family: &Value, group: &Option<Value>) -> Result<SetFamily> {
    let g = group.clone().map(json::group_from_value).transpose()?;
    json::family_from_value(family.clone(), g.as_ref().map(|g| &g.group))
}

fn witnessed(r: &VerificationReport) -> Option<String> {
    r.witnessed.as_ref().map(|p| p.to_string())
}

fn pass_code(ok: bool) -> i32 {
    if ok {
        0
    } else {
        1
    }
}

fn dispatch(request: &Request) -> Result<(Value, i32)> {
    match request {
        Request::Verify { kind, family, group, lambda, lambdas, classes, relax_sizes } => {
            let fam = family_input(family, group)?;
            let opts = VerifyOptions {
                lambda: *lambda,
                lambdas: lambdas.clone(),
                classes: classes.clone(),
                relax_sizes: *relax_sizes,
            };
            let report = families::verify(&fam, *kind, &opts)?;
            let identity = report.witnessed.as_ref().map(families::check_parameter_identity).transpose()?;
            let ok = report.passed();
            Ok((json!({ "witnessed": witnessed(&report), "report": report, "identity": identity }), pass_code(ok)))
        }
        Request::Construct { recipe, params } => construct(recipe, params),
        Request::Diff { family, group, op, index, pair, class } => {
            let fam = family_input(family, group)?;
            let need_index = || index.ok_or_else(|| Error::Input(format!("{op:?} needs an index").to_lowercase()));
            let map = match op {
                DiffOp::Internal => match index {
                    Some(i) => diffcore::internal_differences(fam.group(), fam.set(*i)?)?,
                    None => diffcore::summed_internal_differences(&fam),
                },
                DiffOp::Cross => {
                    let [i, j] = pair.ok_or_else(|| Error::Input("cross needs a pair i,j".into()))?;
                    diffcore::cross_differences(fam.group(), fam.set(i)?, fam.set(j)?)?
                }
                DiffOp::External => diffcore::external_difference_multiset(&fam)?,
                DiffOp::Outgoing => diffcore::outgoing_differences(&fam, need_index()?)?,
                DiffOp::Incoming => diffcore::incoming_differences(&fam, need_index()?)?,
                DiffOp::Class => {
                    let c = class.as_ref().ok_or_else(|| Error::Input("class needs a list of set indices".into()))?;
                    diffcore::class_differences(&fam, c)?
                }
            };
            Ok((diff_json(&map), 0))
        }
        Request::Eval { mode, code, full_table, delta, source } => {
            let code = json::code_from_value(code.clone())?;
            eval(&code, *mode, *full_table, delta.as_ref(), *source).map(|v| (v, 0))
        }
        Request::Classify { code } => {
            let code = json::code_from_value(code.clone())?;
            let c = amd::classify(&code)?;
            let s = amd::check_simultaneous_optimality(&code)?;
            Ok((json!({ "classification": c, "simultaneous": s }), 0))
        }
        Request::ToFamily { kind, code } => {
            let code = json::code_from_value(code.clone())?;
            let r = amd::family_from_code(&code, *kind)?;
            Ok((json!({ "witnessed": witnessed(&r.report), "family": r.family, "predicted": r.predicted, "report": r.report }), 0))
        }
        Request::FromFamily { kind, family, group, lambda, lambdas, classes, relax_sizes } => {
            let fam = family_input(family, group)?;
            let opts = VerifyOptions {
                lambda: *lambda,
                lambdas: lambdas.clone(),
                classes: classes.clone(),
                relax_sizes: *relax_sizes,
            };
            let r = amd::code_from_family(&fam, *kind, &opts)?;
            Ok((json!({ "witnessed": witnessed(&r.report), "code": r.code, "guaranteed": r.guaranteed, "report": r.report }), 0))
        }
        Request::Search { spec, mode, budget_nodes, budget_seconds, jobs, automorphisms, sedf_sweep } => {
            let jobs = jobs.unwrap_or(0);
            if let Some(n_max) = sedf_sweep {
                if spec.is_some() {
                    return Err(Error::Input("give either a spec or a sweep bound, not both".into()));
                }
                let report = search::sweep_sedf_open_problem(*n_max, *budget_nodes, jobs)?;
                return Ok((to_value(&report), 0));
            }
            let spec = spec.as_ref().ok_or_else(|| Error::Input("search needs a spec".into()))?;
            let mut s = json::search_spec_from_value(spec.clone())?;
            if let Some(m) = mode {
                s.mode = *m;
            }
            if budget_nodes.is_some() {
                s.node_limit = *budget_nodes;
            }
            if budget_seconds.is_some() {
                s.time_limit = *budget_seconds;
            }
            s.automorphisms |= automorphisms;
            s.jobs = jobs;
            let cert = search::search_family(&s)?;
            let found = cert.outcome == search::Outcome::Found;
            let mut v = to_value(&cert);
            v["target"] = Value::from(s.target.to_string());
            Ok((v, pass_code(found)))
        }
        Request::Relate { family, group, from, to, maximal, classes } => {
            let fam = family_input(family, group)?;
            match (from, to, maximal) {
                (Some(f), Some(t), None) => {
                    let r = families::implication_check(&fam, *f, *t)?;
                    let ok = r.verdict == families::Verdict::Pass;
                    let mut v = to_value(&r);
                    v["predicted_parameters"] = Value::from(r.predicted.to_string());
                    Ok((v, pass_code(ok)))
                }
                (None, None, Some(kind)) => {
                    let r = match kind {
                        FamilyKind::Gsedf => families::maximal_gsedf_ds_check(&fam)?,
                        FamilyKind::Pedf => {
                            let profile = classes.clone().unwrap_or_else(|| families::size_classes(&fam.sizes()));
                            families::maximal_pedf_df_check(&fam, &profile)?
                        }
                        other => {
                            return Err(Error::Input(format!("no partition characterisation for {other}")));
                        }
                    };
                    let ok = r.verdict == families::Verdict::Pass;
                    let parts: Vec<Option<String>> = r.parts.iter().map(witnessed).collect();
                    let mut v = to_value(&r);
                    v["parts_witnessed"] = to_value(&parts);
                    Ok((v, pass_code(ok)))
                }
                _ => Err(Error::Input("relate needs --from and --to, or --maximal".into())),
            }
        }
        Request::ReproducePaper => {
            let items = corpus::run_corpus();
            let ok = items.iter().all(|i| i.passed);
            let passed = items.iter().filter(|i| i.passed).count();
            Ok((json!({ "passed": passed, "total": items.len(), "items": items }), pass_code(ok)))
        }
    }
}

fn diff_json(map: &FrequencyMap) -> Value {
    let nonzero: Vec<u64> = map.counts()[1..].to_vec();
    let differences: Vec<Element> = map.group().nonzero_elements().collect();
    json!({
        "total": map.total(),
        "differences": differences,
        "uniform": map.uniform_count(),
        "counts": nonzero,
        "frequencies": map,
    })
}

fn param(params: &BTreeMap<String, u64>, key: &str) -> Result<u64> {
    params.get(key).copied().ok_or_else(|| Error::Input(format!("recipe needs parameter {key}")))
}

fn check_params(params: &BTreeMap<String, u64>, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Input(format!("unexpected recipe parameter {k}"))),
        None => Ok(()),
    }
}

fn construct(recipe: &str, params: &BTreeMap<String, u64>) -> Result<(Value, i32)> {
    let (family, kind, extra) = match recipe {
        "tonchev" => {
            check_params(params, &["q", "u", "l"])?;
            let q = param(params, "q")?;
            let field = FiniteField::of_order(q)?;
            let c = constructions::tonchev_edf(q, param(params, "u")?, param(params, "l")?, &field)?;
            let extra = json!({
                "alpha": c.alpha,
                "stated_lambda": c.stated_lambda,
                "counted_lambda": c.counted_lambda,
                "max_external_count": c.max_external_count,
                "findings": c.findings,
            });
            (c.family, FamilyKind::Edf, Some(extra))
        }
        "two-set-sedf" => {
            check_params(params, &["k"])?;
            let k = u32::try_from(param(params, "k")?).map_err(|_| Error::Parameter("k is too large".into()))?;
            (constructions::two_set_sedf(k)?, FamilyKind::Sedf, None)
        }
        "singleton-sedf" => {
            check_params(params, &["n"])?;
            (constructions::singleton_sedf(param(params, "n")?)?, FamilyKind::Sedf, None)
        }
        "complement-gsedf" => {
            check_params(params, &["n"])?;
            (constructions::complement_gsedf(param(params, "n")?)?, FamilyKind::Gsedf, None)
        }
        "qr-gsedf" => {
            check_params(params, &[])?;
            (constructions::qr_gsedf(), FamilyKind::Gsedf, None)
        }
        "pedf-z13" => {
            check_params(params, &[])?;
            (constructions::pedf_example_z13(), FamilyKind::Pedf, None)
        }
        other => {
            return Err(Error::Input(format!(
                "unknown recipe {other:?}; expected one of {}",
                constructions::RECIPES.join(", ")
            )))
        }
    };
    let report = families::verify(&family, kind, &VerifyOptions::default())?;
    let ok = report.passed();
    let mut v = json!({ "recipe": recipe, "witnessed": witnessed(&report), "family": family, "report": report });
    if let Some(extra) = extra {
        v["construction"] = extra;
    }
    Ok((v, pass_code(ok)))
}

fn uniform_value(table: &[amd::DeltaValue]) -> Option<Rational> {
    let first = table.first()?.value;
    table.iter().all(|d| d.value == first).then_some(first)
}

fn eval(code: &AmdCode, mode: GameMode, full: bool, delta: Option<&Element>, source: Option<usize>) -> Result<Value> {
    let c = amd::classify(code)?;
    match mode {
        GameMode::Weak => {
            if source.is_some() {
                return Err(Error::Input("--source applies to the strong game".into()));
            }
            let opt = amd::eval_weak_optimum(code);
            let mut v = json!({
                "mode": "weak",
                "optimum": opt.value,
                "argmax": opt.argmax,
                "uniform_value": uniform_value(&opt.table),
                "bounds": amd::weak_bounds(code),
                "classification": { "weak_r": c.weak_r, "weak_g": c.weak_g },
            });
            if let Some(d) = delta {
                v["delta"] = json!({ "delta": d, "value": amd::eval_weak_delta(code, d)? });
            }
            if full {
                v["table"] = to_value(&opt.table);
            }
            Ok(v)
        }
        GameMode::Strong => {
            let ev = amd::eval_strong_optimum(code);
            let per_source: Vec<Value> = ev
                .per_source
                .iter()
                .map(|s| {
                    let mut p = json!({
                        "source": s.source,
                        "optimum": s.optimum.value,
                        "argmax": s.optimum.argmax,
                        "uniform_value": uniform_value(&s.optimum.table),
                    });
                    if full {
                        p["table"] = to_value(&s.optimum.table);
                    }
                    p
                })
                .collect();
            let mut v = json!({
                "mode": "strong",
                "optimum": ev.value,
                "argmax_sources": ev.argmax_sources,
                "source_optima": c.strong_source_optima,
                "per_source": per_source,
                "bounds": amd::strong_bounds(code),
                "classification": { "strong_r": c.strong_r, "strong_g": c.strong_g },
            });
            if let Some(d) = delta {
                let sources: Vec<usize> = match source {
                    Some(s) => vec![s],
                    None => (0..code.m()).collect(),
                };
                let vals = sources
                    .iter()
                    .map(|&s| Ok(json!({ "source": s, "delta": d, "value": amd::eval_strong_delta(code, s, d)? })))
                    .collect::<Result<Vec<_>>>()?;
                v["delta"] = Value::from(vals);
            } else if source.is_some() {
                return Err(Error::Input("--source needs --delta".into()));
            }
            Ok(v)
        }
    }
}

// ---------------------------------------------------------------------------
// Argument parsing

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Parser, Debug)]
#[command(name = "diffam", version, about = "Difference families and AMD codes over finite abelian groups")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify a family as one of the nine types.
    Verify(VerifyArgs),
    /// Build a family from a named recipe.
    Construct(ConstructArgs),
    /// Print a difference frequency table.
    Diff(DiffArgs),
    /// Evaluate the weak or strong game on a code.
    Eval(EvalArgs),
    /// Report R- and G-optimality of a code.
    Classify(CodeArgs),
    /// Recover the family behind an optimal code.
    ToFamily(ToFamilyArgs),
    /// Build the equiprobable code of a family.
    FromFamily(FamilyTypeArgs),
    /// Exhaustive search for a family with given parameters.
    Search(SearchArgs),
    /// Check a lattice implication or a partition characterisation.
    Relate(RelateArgs),
    /// Run the regression corpus.
    ReproducePaper,
}

#[derive(Args, Debug)]
pub struct FamilyInput {
    /// Family JSON, inline or a file path (`-` for stdin).
    #[arg(long)]
    family: String,
    /// Group descriptor when the family is a bare list of sets.
    #[arg(long)]
    group: Option<String>,
}

#[derive(Args, Debug)]
pub struct TypeOptions {
    /// λ bound for BEDF.
    #[arg(long)]
    lambda: Option<u64>,
    /// Per-set λ bounds for BGSEDF, comma separated.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<u64>>,
    /// PEDF size classes as COUNTxSIZE, e.g. 2x3,1x4,3x1.
    #[arg(long, value_delimiter = ',', value_parser = parse_class)]
    classes: Option<Vec<SizeClass>>,
    /// Allow unequal set sizes for DF and BEDF.
    #[arg(long)]
    relax_sizes: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Family type: ds, df, edf, bedf, sedf, gedf, gsedf, bgsedf or pedf.
    #[arg(long = "type")]
    kind: FamilyKind,
    #[command(flatten)]
    input: FamilyInput,
    #[command(flatten)]
    options: TypeOptions,
}

#[derive(Args, Debug)]
pub struct FamilyTypeArgs {
    /// Family type: ds, df, edf, bedf, sedf, gedf, gsedf, bgsedf or pedf.
    #[arg(long = "type")]
    kind: FamilyKind,
    #[command(flatten)]
    input: FamilyInput,
    #[command(flatten)]
    options: TypeOptions,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// Named construction.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(constructions::RECIPES))]
    recipe: String,
    /// Recipe parameters as key=value pairs, e.g. q=19,u=3,l=3.
    #[arg(long, value_delimiter = ',', value_parser = parse_param)]
    params: Vec<(String, u64)>,
}

#[derive(Args, Debug)]
pub struct DiffArgs {
    #[command(flatten)]
    input: FamilyInput,
    /// Difference operator.
    #[arg(long, value_enum)]
    op: DiffOp,
    /// Set index (0-based) for internal, outgoing and incoming.
    #[arg(long)]
    index: Option<usize>,
    /// Two set indices for cross differences.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pair: Option<Vec<usize>>,
    /// Set indices forming a class.
    #[arg(long, value_delimiter = ',')]
    class: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct CodeArgs {
    /// Code JSON, inline or a file path (`-` for stdin).
    #[arg(long)]
    code: String,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Adversary game.
    #[arg(long, value_enum)]
    mode: GameMode,
    #[command(flatten)]
    code: CodeArgs,
    /// Include every ε_Δ value.
    #[arg(long)]
    full_table: bool,
    /// Evaluate one offset, e.g. 3 or 1,2.
    #[arg(long, value_parser = parse_element)]
    delta: Option<Element>,
    /// Source index (0-based) for a strong single-offset evaluation.
    #[arg(long)]
    source: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ToFamilyArgs {
    /// Family type: ds, df, edf, bedf, sedf, gedf, gsedf, bgsedf or pedf.
    #[arg(long = "type")]
    kind: FamilyKind,
    #[command(flatten)]
    code: CodeArgs,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Search spec JSON, inline or a file path.
    #[arg(long, required_unless_present = "sedf_sweep", conflicts_with = "sedf_sweep")]
    spec: Option<String>,
    /// Overrides the mode in the spec.
    #[arg(long, value_enum)]
    mode: Option<SearchModeArg>,
    /// Node limit; deterministic for any number of jobs.
    #[arg(long)]
    budget_nodes: Option<u64>,
    /// Wall-clock limit; results then depend on machine speed.
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Worker threads (0 = all cores). Never changes the result.
    #[arg(long, env = "DIFFAM_JOBS")]
    jobs: Option<usize>,
    /// Also identify families related by multipliers.
    #[arg(long)]
    automorphisms: bool,
    /// Sweep SEDF parameters with m >= 3, k >= 2 up to this group order.
    #[arg(long)]
    sedf_sweep: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SearchModeArg {
    First,
    All,
    Count,
}

impl From<SearchModeArg> for SearchMode {
    fn from(m: SearchModeArg) -> Self {
        match m {
            SearchModeArg::First => SearchMode::First,
            SearchModeArg::All => SearchMode::All,
            SearchModeArg::Count => SearchMode::Count,
        }
    }
}

#[derive(Args, Debug)]
pub struct RelateArgs {
    #[command(flatten)]
    input: FamilyInput,
    /// Hypothesis type of a lattice implication.
    #[arg(long, requires = "to", conflicts_with = "maximal")]
    from: Option<FamilyKind>,
    /// Conclusion type of a lattice implication.
    #[arg(long, requires = "from")]
    to: Option<FamilyKind>,
    /// Partition characterisation to check: gsedf or pedf.
    #[arg(long, required_unless_present = "from")]
    maximal: Option<FamilyKind>,
    /// PEDF size classes as COUNTxSIZE.
    #[arg(long, value_delimiter = ',', value_parser = parse_class)]
    classes: Option<Vec<SizeClass>>,
}

fn parse_class(s: &str) -> std::result::Result<SizeClass, String> {
    let (c, k) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected COUNTxSIZE, got {s:?}"))?;
    let count = c.trim().parse().map_err(|e| format!("{c:?}: {e}"))?;
    let size = k.trim().parse().map_err(|e| format!("{k:?}: {e}"))?;
    Ok(SizeClass { count, size })
}

fn parse_param(s: &str) -> std::result::Result<(String, u64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().parse().map_err(|e| format!("{v:?}: {e}"))?))
}

fn parse_element(s: &str) -> std::result::Result<Element, String> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<u32>().map_err(|e| format!("{c:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Element::new(coords))
}

fn load(arg: &str) -> Result<Value> {
    json::parse_value(&json::read_input(arg)?)
}

fn family_request(input: &FamilyInput) -> Result<(Value, Option<Value>)> {
    Ok((load(&input.family)?, input.group.as_deref().map(load).transpose()?))
}

/// Turn parsed arguments into a request, loading every JSON input.
pub fn request_from_command(command: &Command) -> Result<Request> {
    Ok(match command {
        Command::Verify(a) => {
            let (family, group) = family_request(&a.input)?;
            let o = &a.options;
            Request::Verify {
                kind: a.kind,
                family,
                group,
                lambda: o.lambda,
                lambdas: o.lambdas.clone(),
                classes: o.classes.clone(),
                relax_sizes: o.relax_sizes,
            }
        }
        Command::Construct(a) => {
            let mut params = BTreeMap::new();
            for (k, v) in &a.params {
                if params.insert(k.clone(), *v).is_some() {
                    return Err(Error::Input(format!("parameter {k} given twice")));
                }
            }
            Request::Construct { recipe: a.recipe.clone(), params }
        }
        Command::Diff(a) => {
            let (family, group) = family_request(&a.input)?;
            let pair = match a.pair.as_deref() {
                None => None,
                Some(&[i, j]) => Some([i, j]),
                Some(_) => return Err(Error::Input("--pair takes exactly two indices".into())),
            };
            Request::Diff { family, group, op: a.op, index: a.index, pair, class: a.class.clone() }
        }
        Command::Eval(a) => Request::Eval {
            mode: a.mode,
            code: load(&a.code.code)?,
            full_table: a.full_table,
            delta: a.delta.clone(),
            source: a.source,
        },
        Command::Classify(a) => Request::Classify { code: load(&a.code)? },
        Command::ToFamily(a) => Request::ToFamily { kind: a.kind, code: load(&a.code.code)? },
        Command::FromFamily(a) => {
            let (family, group) = family_request(&a.input)?;
            let o = &a.options;
            Request::FromFamily {
                kind: a.kind,
                family,
                group,
                lambda: o.lambda,
                lambdas: o.lambdas.clone(),
                classes: o.classes.clone(),
                relax_sizes: o.relax_sizes,
            }
        }
        Command::Search(a) => Request::Search {
            spec: a.spec.as_deref().map(load).transpose()?,
            mode: a.mode.map(Into::into),
            budget_nodes: a.budget_nodes,
            budget_seconds: a.budget_seconds,
            jobs: a.jobs,
            automorphisms: a.automorphisms,
            sedf_sweep: a.sedf_sweep,
        },
        Command::Relate(a) => {
            let (family, group) = family_request(&a.input)?;
            Request::Relate { family, group, from: a.from, to: a.to, maximal: a.maximal, classes: a.classes.clone() }
        }
        Command::ReproducePaper => Request::ReproducePaper,
    })
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Verify(_) => "verify",
        Command::Construct(_) => "construct",
        Command::Diff(_) => "diff",
        Command::Eval(_) => "eval",
        Command::Classify(_) => "classify",
        Command::ToFamily(_) => "to-family",
        Command::FromFamily(_) => "from-family",
        Command::Search(_) => "search",
        Command::Relate(_) => "relate",
        Command::ReproducePaper => "reproduce-paper",
    }
}

/// What the binary prints and the status it exits with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { stdout: String::new(), stderr: text, exit_code: 2 }
            } else {
                Output { stdout: text, stderr: String::new(), exit_code: 0 }
            };
        }
    };
    let envelope = match request_from_command(&cli.command) {
        Ok(req) => execute(&req),
        Err(e) => Envelope {
            toolkit: TOOLKIT,
            command: command_name(&cli.command),
            result: error_json(&e),
            exit_code: error_exit_code(&e),
        },
    };
    let stdout = match cli.format {
        Format::Json => json::to_pretty(&envelope),
        Format::Table => render_table(&envelope),
    };
    let stderr = match envelope.result.get("error") {
        Some(err) => format!("error: {}\n", err["message"].as_str().unwrap_or_default()),
        None => String::new(),
    };
    Output { stdout, stderr, exit_code: envelope.exit_code }
}

// ---------------------------------------------------------------------------
// Human-readable output

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) if is_element(v) && !xs.is_empty() => {
            let parts: Vec<String> = xs.iter().map(Value::to_string).collect();
            if parts.len() == 1 {
                parts[0].clone()
            } else {
                format!("({})", parts.join(","))
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

fn is_element(v: &Value) -> bool {
    matches!(v, Value::Array(xs) if xs.iter().all(Value::is_number))
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(items) if !items.is_empty() && items.iter().any(|i| i.is_object() || (i.is_array() && !is_element(i))) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Null => {}
        other => {
            let _ = writeln!(out, "{prefix}: {}", scalar(other));
        }
    }
}

fn frequency_table(result: &Value) -> Option<String> {
    let heads: Vec<String> = result.get("differences")?.as_array()?.iter().map(|e| {
        let parts: Vec<String> = e.as_array().map(|xs| xs.iter().map(Value::to_string).collect()).unwrap_or_default();
        if parts.len() == 1 { parts[0].clone() } else { format!("({})", parts.join(",")) }
    }).collect();
    let vals: Vec<String> = result.get("counts")?.as_array()?.iter().map(Value::to_string).collect();
    let w = heads.iter().chain(&vals).map(String::len).max().unwrap_or(1);
    let mut out = String::from("difference");
    for h in &heads {
        let _ = write!(out, " {h:>w$}");
    }
    out.push_str("\nfrequency ");
    for v in &vals {
        let _ = write!(out, " {v:>w$}");
    }
    out.push('\n');
    Some(out)
}

/// Render an envelope as `key: value` lines; frequency tables for `diff`
/// use the difference/frequency layout.
pub fn render_table(env: &Envelope) -> String {
    let mut out = format!("{} {}\n", env.toolkit, env.command);
    if env.command == "reproduce-paper" {
        if let Some(items) = env.result.get("items").and_then(Value::as_array) {
            for item in items {
                let mark = if item["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "{mark} {} {}", item["id"].as_str().unwrap_or(""), item["title"].as_str().unwrap_or(""));
                if let Some(fs) = item["failures"].as_array() {
                    for f in fs {
                        let _ = writeln!(out, "     {}", f.as_str().unwrap_or(""));
                    }
                }
            }
            let _ = writeln!(out, "{} of {} items passed", env.result["passed"], env.result["total"]);
        }
    } else if env.command == "diff" && env.result.get("counts").is_some() {
        if let Some(t) = frequency_table(&env.result) {
            out.push_str(&t);
        }
        let _ = writeln!(out, "total: {}", env.result["total"]);
        let _ = writeln!(out, "uniform: {}", scalar(&env.result["uniform"]));
    } else {
        flatten("", &env.result, &mut out);
    }
    let _ = writeln!(out, "exit_code: {}", env.exit_code);
    out
}
