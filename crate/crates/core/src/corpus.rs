//! Regression corpus of worked examples.
//!
//! Each fixture is a list of checks. A check is a [`Request`] plus the exit
//! code and result values it must produce. Expected values are keyed by
//! JSON pointer into the result; an expected `{"contains": x}` matches any
//! array holding `x`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cli::{self, Request};
use crate::diffcore::SetFamily;
use crate::json;

macro_rules! fixtures {
    ($($id:literal),* $(,)?) => {
        &[$(($id, include_str!(concat!("../fixtures/corpus/", $id, ".json")))),*]
    };
}

/// `(id, JSON text)` for every fixture, in run order.
pub const FIXTURES: &[(&str, &str)] = fixtures![
    "planar-difference-set-z21",
    "coset-edf-f19",
    "two-set-sedf-z10",
    "singleton-and-complement",
    "quadratic-residue-gsedf-z7",
    "partitioned-edf-z13",
    "gedf-not-rand-optimal-z13",
    "mixed-size-rand-optimal-z10",
    "sedf-existence-and-nonexistence",
];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub title: String,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub request: Request,
    #[serde(default)]
    pub exit_code: i32,
    #[serde(default)]
    pub expect: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ItemOutcome {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

pub fn load_fixture(text: &str) -> crate::Result<Fixture> {
    let v = json::parse_value(text)?;
    serde_json::from_value(v).map_err(|e| crate::Error::Input(format!("fixture: {e}")))
}

fn matches(expected: &Value, actual: Option<&Value>) -> bool {
    if let Value::Object(m) = expected {
        if let (1, Some(x)) = (m.len(), m.get("contains")) {
            return actual.and_then(Value::as_array).is_some_and(|a| a.contains(x));
        }
    }
    actual == Some(expected)
}

fn abbreviate(v: &Value) -> String {
    let s = v.to_string();
    match s.char_indices().nth(160) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s,
    }
}

/// Run every check of one fixture and collect the mismatches.
pub fn run_fixture(id: &str, fixture: &Fixture) -> ItemOutcome {
    let mut failures = Vec::new();
    for (i, check) in fixture.checks.iter().enumerate() {
        if matches!(check.request, Request::ReproducePaper) {
            failures.push(format!("check {i}: the corpus cannot contain itself"));
            continue;
        }
        let env = cli::execute(&check.request);
        if env.exit_code != check.exit_code {
            failures.push(format!(
                "check {i} ({}): exit code {} instead of {}; result {}",
                env.command,
                env.exit_code,
                check.exit_code,
                abbreviate(&env.result)
            ));
        }
        for (pointer, expected) in &check.expect {
            let actual = env.result.pointer(pointer);
            if !matches(expected, actual) {
                failures.push(format!(
                    "check {i} ({}): {pointer} is {} instead of {expected}",
                    env.command,
                    actual.map_or("missing".to_string(), abbreviate)
                ));
            }
        }
    }
    ItemOutcome {
        id: id.to_string(),
        title: fixture.title.clone(),
        passed: failures.is_empty(),
        checks: fixture.checks.len(),
        failures,
    }
}

/// Run the whole corpus in fixture order.
pub fn run_corpus() -> Vec<ItemOutcome> {
    FIXTURES
        .iter()
        .map(|(id, text)| match load_fixture(text) {
            Ok(f) => run_fixture(id, &f),
            Err(e) => ItemOutcome {
                id: id.to_string(),
                title: String::new(),
                passed: false,
                checks: 0,
                failures: vec![e.to_string()],
            },
        })
        .collect()
}

fn family_of(family: &Value, group: &Option<Value>) -> Option<SetFamily> {
    let g = match group {
        Some(g) => Some(json::group_from_value(g.clone()).ok()?.group),
        None => None,
    };
    json::family_from_value(family.clone(), g.as_ref()).ok()
}

/// Every family appearing in the corpus: family inputs, construction
/// outputs and search solutions, without repeats.
pub fn corpus_families() -> Vec<(String, SetFamily)> {
    let mut out: Vec<(String, SetFamily)> = Vec::new();
    let mut push = |label: String, f: SetFamily| {
        if !out.iter().any(|(_, g)| *g == f) {
            out.push((label, f));
        }
    };
    for (id, text) in FIXTURES {
        let Ok(fixture) = load_fixture(text) else { continue };
        for (i, check) in fixture.checks.iter().enumerate() {
            let label = format!("{id}#{i}");
            match &check.request {
                Request::Verify { family, group, .. }
                | Request::Diff { family, group, .. }
                | Request::FromFamily { family, group, .. }
                | Request::Relate { family, group, .. } => {
                    if let Some(f) = family_of(family, group) {
                        push(label, f);
                    }
                }
                Request::Construct { .. } | Request::Search { .. } => {
                    let env = cli::execute(&check.request);
                    if let Some(f) = env.result.get("family").and_then(|v| family_of(v, &None)) {
                        push(label.clone(), f);
                    }
                    if let Some(sols) = env.result.get("solutions").and_then(Value::as_array) {
                        for (j, s) in sols.iter().enumerate() {
                            if let Some(f) = family_of(s, &None) {
                                push(format!("{label}/{j}"), f);
                            }
                        }
                    }
                }
                _ => {}
            }
        }
    }
    out
}
