//! JSON documents accepted by the command line and the C interface.
//!
//! Group descriptor: `{"cyclic":[n1,...]}` (or a bare order `{"cyclic":21}`),
//! `{"field":{"p":p,"modulus":[c0,...,1]}}`, `{"field":{"q":q}}` or
//! `{"field":{"p":p}}`. Elements are integer arrays; a bare integer is
//! accepted for groups with one cyclic factor.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::amd::{AmdCode, Source};
use crate::diffcore::SetFamily;
use crate::error::{Error, Result};
use crate::families::{FamilyKind, FamilyParameters, Lambdas, SizeClass};
use crate::group::{Element, FiniteAbelianGroup, FiniteField};
use crate::search::{SearchMode, SearchSpec};
use crate::Rational;

/// Parse `text`, reporting syntax errors with line and column.
pub fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(syntax_error)
}

fn syntax_error(e: serde_json::Error) -> Error {
    // serde_json's message already ends with the line and column.
    Error::Input(format!("malformed JSON: {e}"))
}

fn from_value<T: DeserializeOwned>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Input(format!("{what}: {e}")))
}

/// Inline JSON (anything starting with `{` or `[`), `-` for stdin, or a path.
pub fn read_input(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| Error::Input(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::Input(format!("reading {arg}: {e}")))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Orders {
    One(u64),
    Many(Vec<u64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    p: Option<u64>,
    q: Option<u64>,
    modulus: Option<Vec<u32>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupDoc {
    cyclic: Option<Orders>,
    field: Option<FieldDoc>,
}

/// A group descriptor, remembering the field when one was given.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub group: FiniteAbelianGroup,
    pub field: Option<FiniteField>,
}

pub fn group_from_value(v: Value) -> Result<GroupSpec> {
    let doc: GroupDoc = from_value(v, "group descriptor")?;
    match (doc.cyclic, doc.field) {
        (Some(orders), None) => {
            let group = match orders {
                Orders::One(n) => FiniteAbelianGroup::cyclic(n)?,
                Orders::Many(v) => FiniteAbelianGroup::product(&v)?,
            };
            Ok(GroupSpec { group, field: None })
        }
        (None, Some(f)) => {
            let field = match (f.p, f.q, f.modulus) {
                (Some(p), None, Some(m)) => FiniteField::extension(p, &m)?,
                (Some(p), None, None) => FiniteField::prime(p)?,
                (None, Some(q), None) => FiniteField::of_order(q)?,
                _ => return Err(Error::Input("field needs \"p\" (with optional \"modulus\") or \"q\"".into())),
            };
            Ok(GroupSpec { group: field.additive_group().clone(), field: Some(field) })
        }
        _ => Err(Error::Input("group descriptor needs exactly one of \"cyclic\" or \"field\"".into())),
    }
}

pub fn parse_group(text: &str) -> Result<GroupSpec> {
    group_from_value(parse_value(text)?)
}

fn elements(group: &FiniteAbelianGroup, raw: Vec<Element>) -> Result<Vec<Element>> {
    for e in &raw {
        group.check(e)?;
    }
    Ok(raw)
}

/// `{"group":…, "sets":[[…],…]}`, or a bare list of sets when `group` is
/// supplied separately. Sets may overlap here; verifiers that need
/// disjointness check it themselves.
pub fn family_from_value(v: Value, group: Option<&FiniteAbelianGroup>) -> Result<SetFamily> {
    let (g, sets) = match v {
        Value::Array(_) => {
            let g = group.ok_or_else(|| Error::Input("a bare list of sets needs a separate group".into()))?;
            (g.clone(), v)
        }
        Value::Object(mut map) => {
            let sets = map.remove("sets").ok_or_else(|| Error::Input("family needs \"sets\"".into()))?;
            let g = match (map.remove("group"), group) {
                (Some(gv), _) => group_from_value(gv)?.group,
                (None, Some(g)) => g.clone(),
                (None, None) => return Err(Error::Input("family needs \"group\"".into())),
            };
            if let Some(k) = map.keys().next() {
                return Err(Error::Input(format!("unknown family field {k:?}")));
            }
            (g, sets)
        }
        _ => return Err(Error::Input("family must be an object or a list of sets".into())),
    };
    let raw: Vec<Vec<Element>> = from_value(sets, "family sets")?;
    let sets = raw.into_iter().map(|s| elements(&g, s)).collect::<Result<Vec<_>>>()?;
    SetFamily::blocks(g, sets)
}

pub fn parse_family(text: &str, group: Option<&FiniteAbelianGroup>) -> Result<SetFamily> {
    family_from_value(parse_value(text)?, group)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceDoc {
    name: Option<String>,
    set: Vec<Element>,
    probs: Option<Vec<Rational>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeDoc {
    group: Value,
    sources: Vec<SourceDoc>,
}

/// `{"group":…, "sources":[{"name":…, "set":[…], "probs":["1/2",…]}]}`.
/// Missing names become `s1, s2, …`; missing probabilities are uniform.
pub fn code_from_value(v: Value) -> Result<AmdCode> {
    let doc: CodeDoc = from_value(v, "code")?;
    let group = group_from_value(doc.group)?.group;
    let mut sources = Vec::with_capacity(doc.sources.len());
    for (i, s) in doc.sources.into_iter().enumerate() {
        let name = s.name.unwrap_or_else(|| format!("s{}", i + 1));
        let set = elements(&group, s.set)?;
        sources.push(match s.probs {
            None => Source::equiprobable(name, set),
            Some(p) if p.len() == set.len() => Source::new(name, set.into_iter().zip(p).collect()),
            Some(p) => {
                return Err(Error::InvalidCode(format!(
                    "source {name} has {} elements but {} probabilities",
                    set.len(),
                    p.len()
                )))
            }
        });
    }
    AmdCode::new(group, sources)
}

pub fn parse_code(text: &str) -> Result<AmdCode> {
    code_from_value(parse_value(text)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    group: Value,
    #[serde(rename = "type")]
    kind: FamilyKind,
    m: Option<usize>,
    k: Option<usize>,
    sizes: Option<Vec<usize>>,
    lambda: Option<u64>,
    lambdas: Option<Vec<u64>>,
    classes: Option<Vec<SizeClass>>,
    mode: Option<SearchMode>,
    node_limit: Option<u64>,
    time_limit: Option<f64>,
    #[serde(default)]
    automorphisms: bool,
}

/// Search specification:
/// `{"group":…, "type":"sedf", "m":3, "k":2, "lambda":1, "mode":"first"}`.
/// Sizes come from `"sizes"` or from `"m"` and `"k"`; λ from `"lambda"` or
/// the per-set / per-class list `"lambdas"`.
pub fn search_spec_from_value(v: Value) -> Result<SearchSpec> {
    let d: SpecDoc = from_value(v, "search spec")?;
    let group = group_from_value(d.group)?.group;
    let n = group.order();
    let sizes = match (d.sizes, d.m, d.k) {
        (Some(s), None, None) => s,
        (None, m, Some(k)) => vec![k; m.unwrap_or(1)],
        _ => return Err(Error::Input("give either \"sizes\" or \"k\" (with \"m\")".into())),
    };
    let target = match d.kind {
        FamilyKind::Pedf => {
            let classes = d.classes.unwrap_or_else(|| crate::families::size_classes(&sizes));
            let lambdas = match (d.lambdas, d.lambda) {
                (Some(l), None) => l,
                (None, Some(l)) if classes.len() == 1 => vec![l],
                _ => return Err(Error::Input("PEDF needs \"lambdas\", one per size class".into())),
            };
            FamilyParameters::pedf(n, sizes, classes, lambdas)
        }
        FamilyKind::Gsedf | FamilyKind::Bgsedf => {
            let lambdas = match (d.lambdas, d.lambda) {
                (Some(l), None) => l,
                (None, Some(l)) => vec![l; sizes.len()],
                _ => return Err(Error::Input("give \"lambdas\" (per set) or \"lambda\"".into())),
            };
            FamilyParameters::with_sizes(d.kind, n, sizes, Lambdas::PerSet(lambdas))
        }
        kind => {
            let l = d.lambda.ok_or_else(|| Error::Input(format!("{kind} needs \"lambda\"")))?;
            if d.lambdas.is_some() || d.classes.is_some() {
                return Err(Error::Input(format!("{kind} takes a single \"lambda\"")));
            }
            FamilyParameters::with_sizes(kind, n, sizes, Lambdas::Single(l))
        }
    };
    let mut spec = SearchSpec::new(group, target, d.mode.unwrap_or(SearchMode::First));
    spec.node_limit = d.node_limit;
    spec.time_limit = d.time_limit;
    spec.automorphisms = d.automorphisms;
    Ok(spec)
}

pub fn parse_search_spec(text: &str) -> Result<SearchSpec> {
    search_spec_from_value(parse_value(text)?)
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}
