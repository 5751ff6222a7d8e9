//! Verifiers for the nine difference-family types, the arithmetic
//! necessary conditions on their parameters, and the implication lattice
//! between them.
//!
//! Verifiers read λ off the observed counts. Only the bounded types (BEDF,
//! BGSEDF) take λ as input, since for them the bound is the question.
//!
//! PEDF size classes are formed by set size `k_h`. Classes are listed in
//! order of first appearance in the family unless a profile is supplied.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diffcore::{
    class_differences, external_difference_multiset, incoming_differences, internal_differences,
    outgoing_differences, summed_internal_differences, FrequencyMap, SetFamily,
};
use crate::error::{Error, Result};
use crate::group::{Element, FiniteAbelianGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Ds,
    Df,
    Edf,
    Bedf,
    Sedf,
    Gedf,
    Gsedf,
    Bgsedf,
    Pedf,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 9] = [
        FamilyKind::Ds,
        FamilyKind::Df,
        FamilyKind::Edf,
        FamilyKind::Bedf,
        FamilyKind::Sedf,
        FamilyKind::Gedf,
        FamilyKind::Gsedf,
        FamilyKind::Bgsedf,
        FamilyKind::Pedf,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyKind::Ds => "ds",
            FamilyKind::Df => "df",
            FamilyKind::Edf => "edf",
            FamilyKind::Bedf => "bedf",
            FamilyKind::Sedf => "sedf",
            FamilyKind::Gedf => "gedf",
            FamilyKind::Gsedf => "gsedf",
            FamilyKind::Bgsedf => "bgsedf",
            FamilyKind::Pedf => "pedf",
        }
    }

    /// Types defined by differences between distinct sets.
    pub fn is_external(&self) -> bool {
        !matches!(self, FamilyKind::Ds | FamilyKind::Df)
    }

    /// Types whose sets must all have one size.
    pub fn is_uniform(&self) -> bool {
        matches!(self, FamilyKind::Edf | FamilyKind::Bedf | FamilyKind::Sedf)
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, FamilyKind::Bedf | FamilyKind::Bgsedf)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_str().to_uppercase())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Input(format!("unknown family type {s:?}")))
    }
}

/// One size class of a PEDF: `count` sets of size `size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SizeClass {
    pub count: usize,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lambdas {
    Single(u64),
    PerSet(Vec<u64>),
    PerClass(Vec<u64>),
}

/// Parameters of a family: its type, group order, set sizes and λ values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParameters {
    pub kind: FamilyKind,
    pub n: usize,
    /// `k_i` for every set (a DS has one entry).
    pub sizes: Vec<usize>,
    /// PEDF size classes; empty for other types.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<SizeClass>,
    pub lambdas: Lambdas,
}

impl FamilyParameters {
    /// `(n, m, k, λ)` for the uniform types, or `(n, k, λ)` for a DS with `m = 1`.
    pub fn uniform(kind: FamilyKind, n: usize, m: usize, k: usize, lambda: u64) -> Self {
        FamilyParameters { kind, n, sizes: vec![k; m], classes: Vec::new(), lambdas: Lambdas::Single(lambda) }
    }

    pub fn with_sizes(kind: FamilyKind, n: usize, sizes: Vec<usize>, lambdas: Lambdas) -> Self {
        FamilyParameters { kind, n, sizes, classes: Vec::new(), lambdas }
    }

    pub fn pedf(n: usize, sizes: Vec<usize>, classes: Vec<SizeClass>, lambdas: Vec<u64>) -> Self {
        FamilyParameters { kind: FamilyKind::Pedf, n, sizes, classes, lambdas: Lambdas::PerClass(lambdas) }
    }

    pub fn m(&self) -> usize {
        self.sizes.len()
    }

    pub fn a(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn single_lambda(&self) -> Option<u64> {
        match self.lambdas {
            Lambdas::Single(l) => Some(l),
            _ => None,
        }
    }

    pub fn lambda_list(&self) -> Vec<u64> {
        match &self.lambdas {
            Lambdas::Single(l) => vec![*l],
            Lambdas::PerSet(v) | Lambdas::PerClass(v) => v.clone(),
        }
    }

    fn uniform_k(&self) -> Option<usize> {
        let k = *self.sizes.first()?;
        self.sizes.iter().all(|&s| s == k).then_some(k)
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for FamilyParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        let m = self.m();
        let lams = join(&self.lambda_list());
        match (self.kind, self.uniform_k()) {
            (FamilyKind::Ds, Some(k)) => write!(f, "({n},{k},{lams})"),
            (FamilyKind::Pedf, _) => {
                let cs: Vec<usize> = self.classes.iter().map(|c| c.count).collect();
                let ks: Vec<usize> = self.classes.iter().map(|c| c.size).collect();
                write!(f, "({n},{m};{};{};{lams})", join(&cs), join(&ks))
            }
            (FamilyKind::Df | FamilyKind::Edf | FamilyKind::Bedf | FamilyKind::Sedf, Some(k)) => {
                write!(f, "({n},{m},{k},{lams})")
            }
            _ => write!(f, "({n},{m};{};{lams})", join(&self.sizes)),
        }?;
        write!(f, "-{}", self.kind)
    }
}

/// Size classes of a family in order of first appearance.
pub fn size_classes(sizes: &[usize]) -> Vec<SizeClass> {
    let mut out: Vec<SizeClass> = Vec::new();
    for &k in sizes {
        match out.iter_mut().find(|c| c.size == k) {
            Some(c) => c.count += 1,
            None => out.push(SizeClass { count: 1, size: k }),
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Which frequency map a counterexample refers to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Internal differences of one set or of all blocks.
    Internal,
    /// All external differences.
    External,
    /// Outgoing differences of set `i` (0-based).
    Outgoing(usize),
    /// Incoming differences of set `j` (0-based).
    Incoming(usize),
    /// Class differences of size class `h` (0-based).
    Class(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    Exactly,
    AtMost,
}

/// A concrete element whose count breaks the property.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub scope: Scope,
    pub element: Element,
    pub observed: u64,
    pub requirement: Requirement,
    pub required: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: FamilyKind,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnessed: Option<FamilyParameters>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl VerificationReport {
    fn pass(params: FamilyParameters) -> Self {
        VerificationReport { kind: params.kind, verdict: Verdict::Pass, witnessed: Some(params), counterexample: None }
    }

    fn fail(kind: FamilyKind, cx: Counterexample) -> Self {
        VerificationReport { kind, verdict: Verdict::Fail, witnessed: None, counterexample: Some(cx) }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Outcome of a uniformity test on one map.
enum Uniformity {
    Uniform(u64),
    Deviates(Element, u64, u64),
}

fn uniformity(map: &FrequencyMap) -> Uniformity {
    match map.uniform_count() {
        Some(l) => Uniformity::Uniform(l),
        None => {
            let required = map.get_index(1);
            let (e, observed) = map.first_deviation(required).expect("nonuniform map has a deviation");
            Uniformity::Deviates(e, observed, required)
        }
    }
}

fn exact_cx(scope: Scope, element: Element, observed: u64, required: u64) -> Counterexample {
    Counterexample { scope, element, observed, requirement: Requirement::Exactly, required }
}

fn external_preconditions(family: &SetFamily) -> Result<()> {
    if family.len() < 2 {
        return Err(Error::TrivialFamily(family.len()));
    }
    family.require_disjoint()
}

fn require_uniform_sizes(family: &SetFamily, kind: FamilyKind, suggest: &str) -> Result<usize> {
    family.uniform_size().ok_or_else(|| {
        Error::WrongType(format!("{kind} needs equal set sizes, got {:?}; try {suggest}", family.sizes()))
    })
}

/// Single set with uniform internal differences. A singleton passes with λ = 0.
pub fn verify_ds(group: &FiniteAbelianGroup, set: &[Element]) -> Result<VerificationReport> {
    let map = internal_differences(group, set)?;
    let n = group.order();
    Ok(match uniformity(&map) {
        Uniformity::Uniform(l) => VerificationReport::pass(FamilyParameters::uniform(FamilyKind::Ds, n, 1, set.len(), l)),
        Uniformity::Deviates(e, o, r) => VerificationReport::fail(FamilyKind::Ds, exact_cx(Scope::Internal, e, o, r)),
    })
}

/// Blocks whose internal differences together cover every nonzero element
/// equally often. Blocks need not be disjoint.
pub fn verify_df(family: &SetFamily, require_uniform_k: bool) -> Result<VerificationReport> {
    if family.is_empty() {
        return Err(Error::TrivialFamily(0));
    }
    if require_uniform_k {
        require_uniform_sizes(family, FamilyKind::Df, "df without the uniform-size requirement")?;
    }
    let map = summed_internal_differences(family);
    let n = family.group().order();
    Ok(match uniformity(&map) {
        Uniformity::Uniform(l) => VerificationReport::pass(FamilyParameters::with_sizes(
            FamilyKind::Df,
            n,
            family.sizes(),
            Lambdas::Single(l),
        )),
        Uniformity::Deviates(e, o, r) => VerificationReport::fail(FamilyKind::Df, exact_cx(Scope::Internal, e, o, r)),
    })
}

fn verify_external_uniform(family: &SetFamily, kind: FamilyKind) -> Result<VerificationReport> {
    let map = external_difference_multiset(family)?;
    let n = family.group().order();
    Ok(match uniformity(&map) {
        Uniformity::Uniform(l) => {
            VerificationReport::pass(FamilyParameters::with_sizes(kind, n, family.sizes(), Lambdas::Single(l)))
        }
        Uniformity::Deviates(e, o, r) => VerificationReport::fail(kind, exact_cx(Scope::External, e, o, r)),
    })
}

pub fn verify_edf(family: &SetFamily) -> Result<VerificationReport> {
    external_preconditions(family)?;
    require_uniform_sizes(family, FamilyKind::Edf, "gedf")?;
    verify_external_uniform(family, FamilyKind::Edf)
}

/// Whether a bounded verifier insists on equal set sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeRule {
    Uniform,
    Any,
}

/// Every external difference occurs at most `lambda` times.
pub fn verify_bedf(family: &SetFamily, lambda: u64, sizes: SizeRule) -> Result<VerificationReport> {
    external_preconditions(family)?;
    if sizes == SizeRule::Uniform {
        require_uniform_sizes(family, FamilyKind::Bedf, "the relaxed size rule")?;
    }
    let map = external_difference_multiset(family)?;
    Ok(match map.first_exceeding(lambda) {
        None => VerificationReport::pass(FamilyParameters::with_sizes(
            FamilyKind::Bedf,
            family.group().order(),
            family.sizes(),
            Lambdas::Single(lambda),
        )),
        Some((e, o)) => VerificationReport::fail(
            FamilyKind::Bedf,
            Counterexample { scope: Scope::External, element: e, observed: o, requirement: Requirement::AtMost, required: lambda },
        ),
    })
}

/// Outgoing differences of every set are uniform with one common λ.
pub fn verify_sedf(family: &SetFamily) -> Result<VerificationReport> {
    external_preconditions(family)?;
    require_uniform_sizes(family, FamilyKind::Sedf, "gsedf")?;
    let mut common: Option<u64> = None;
    for i in 0..family.len() {
        let map = outgoing_differences(family, i)?;
        match uniformity(&map) {
            Uniformity::Uniform(l) => match common {
                None => common = Some(l),
                Some(c) if c != l => {
                    let e = family.group().element_at(1);
                    return Ok(VerificationReport::fail(FamilyKind::Sedf, exact_cx(Scope::Outgoing(i), e, l, c)));
                }
                _ => {}
            },
            Uniformity::Deviates(e, o, r) => {
                return Ok(VerificationReport::fail(FamilyKind::Sedf, exact_cx(Scope::Outgoing(i), e, o, r)));
            }
        }
    }
    Ok(VerificationReport::pass(FamilyParameters::with_sizes(
        FamilyKind::Sedf,
        family.group().order(),
        family.sizes(),
        Lambdas::Single(common.expect("at least two sets")),
    )))
}

pub fn verify_gedf(family: &SetFamily) -> Result<VerificationReport> {
    external_preconditions(family)?;
    verify_external_uniform(family, FamilyKind::Gedf)
}

/// Outgoing differences of every set are uniform, each with its own λ_i.
pub fn verify_gsedf(family: &SetFamily) -> Result<VerificationReport> {
    external_preconditions(family)?;
    let mut lambdas = Vec::with_capacity(family.len());
    for i in 0..family.len() {
        match uniformity(&outgoing_differences(family, i)?) {
            Uniformity::Uniform(l) => lambdas.push(l),
            Uniformity::Deviates(e, o, r) => {
                return Ok(VerificationReport::fail(FamilyKind::Gsedf, exact_cx(Scope::Outgoing(i), e, o, r)));
            }
        }
    }
    Ok(VerificationReport::pass(FamilyParameters::with_sizes(
        FamilyKind::Gsedf,
        family.group().order(),
        family.sizes(),
        Lambdas::PerSet(lambdas),
    )))
}

/// Differences landing in each set `A_j` occur at most `lambdas[j]` times.
pub fn verify_bgsedf(family: &SetFamily, lambdas: &[u64]) -> Result<VerificationReport> {
    external_preconditions(family)?;
    if lambdas.len() != family.len() {
        return Err(Error::Parameter(format!(
            "{} bounds supplied for {} sets",
            lambdas.len(),
            family.len()
        )));
    }
    for (j, &bound) in lambdas.iter().enumerate() {
        if let Some((e, o)) = incoming_differences(family, j)?.first_exceeding(bound) {
            return Ok(VerificationReport::fail(
                FamilyKind::Bgsedf,
                Counterexample { scope: Scope::Incoming(j), element: e, observed: o, requirement: Requirement::AtMost, required: bound },
            ));
        }
    }
    Ok(VerificationReport::pass(FamilyParameters::with_sizes(
        FamilyKind::Bgsedf,
        family.group().order(),
        family.sizes(),
        Lambdas::PerSet(lambdas.to_vec()),
    )))
}

/// Check a class profile against the family and return the member indices
/// of each class.
pub fn class_members(family: &SetFamily, profile: &[SizeClass]) -> Result<Vec<Vec<usize>>> {
    let sizes = family.sizes();
    let mut members = Vec::with_capacity(profile.len());
    for (h, class) in profile.iter().enumerate() {
        if profile[..h].iter().any(|c| c.size == class.size) {
            return Err(Error::ClassDefinition(format!("size {} listed twice", class.size)));
        }
        let idx: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] == class.size).collect();
        if idx.len() != class.count {
            return Err(Error::ClassDefinition(format!(
                "profile expects {} set(s) of size {}, family has {}",
                class.count,
                class.size,
                idx.len()
            )));
        }
        members.push(idx);
    }
    let covered: usize = members.iter().map(Vec::len).sum();
    if covered != sizes.len() {
        return Err(Error::ClassDefinition("profile does not cover every set".into()));
    }
    Ok(members)
}

/// Class differences are uniform for every size class, each with its own λ_h.
pub fn verify_pedf(family: &SetFamily, profile: &[SizeClass]) -> Result<VerificationReport> {
    external_preconditions(family)?;
    let members = class_members(family, profile)?;
    let mut lambdas = Vec::with_capacity(members.len());
    for (h, idx) in members.iter().enumerate() {
        match uniformity(&class_differences(family, idx)?) {
            Uniformity::Uniform(l) => lambdas.push(l),
            Uniformity::Deviates(e, o, r) => {
                return Ok(VerificationReport::fail(FamilyKind::Pedf, exact_cx(Scope::Class(h), e, o, r)));
            }
        }
    }
    Ok(VerificationReport::pass(FamilyParameters::pedf(
        family.group().order(),
        family.sizes(),
        profile.to_vec(),
        lambdas,
    )))
}

/// Extra inputs for [`verify`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Bound for BEDF.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<u64>,
    /// Per-set bounds for BGSEDF.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<u64>>,
    /// PEDF class profile; derived from the family when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<SizeClass>>,
    /// Allow unequal set sizes for DF and BEDF.
    #[serde(default)]
    pub relax_sizes: bool,
}

/// Dispatch to the verifier for `kind`.
pub fn verify(family: &SetFamily, kind: FamilyKind, opts: &VerifyOptions) -> Result<VerificationReport> {
    match kind {
        FamilyKind::Ds => {
            if family.len() != 1 {
                return Err(Error::WrongType(format!("a DS is one set, got {}", family.len())));
            }
            verify_ds(family.group(), &family.sets()[0])
        }
        FamilyKind::Df => verify_df(family, !opts.relax_sizes),
        FamilyKind::Edf => verify_edf(family),
        FamilyKind::Bedf => {
            let lambda = opts.lambda.ok_or_else(|| Error::Parameter("BEDF needs a bound λ".into()))?;
            let rule = if opts.relax_sizes { SizeRule::Any } else { SizeRule::Uniform };
            verify_bedf(family, lambda, rule)
        }
        FamilyKind::Sedf => verify_sedf(family),
        FamilyKind::Gedf => verify_gedf(family),
        FamilyKind::Gsedf => verify_gsedf(family),
        FamilyKind::Bgsedf => {
            let lambdas = opts.lambdas.as_ref().ok_or_else(|| Error::Parameter("BGSEDF needs per-set bounds".into()))?;
            verify_bgsedf(family, lambdas)
        }
        FamilyKind::Pedf => {
            let profile = opts.classes.clone().unwrap_or_else(|| size_classes(&family.sizes()));
            verify_pedf(family, &profile)
        }
    }
}

/// One arithmetic condition `lhs (relation) rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityTerm {
    pub description: String,
    pub lhs: u64,
    pub relation: String,
    pub rhs: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub holds: bool,
    pub terms: Vec<IdentityTerm>,
}

impl IdentityCheck {
    pub fn violations(&self) -> Vec<&IdentityTerm> {
        self.terms.iter().filter(|t| !t.holds).collect()
    }

    pub fn summary(&self) -> String {
        self.terms
            .iter()
            .map(|t| format!("{}: {} {} {}{}", t.description, t.lhs, t.relation, t.rhs, if t.holds { "" } else { " (violated)" }))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

struct Terms(Vec<IdentityTerm>);

impl Terms {
    fn eq(&mut self, description: String, lhs: u64, rhs: u64) {
        self.0.push(IdentityTerm { description, lhs, relation: "=".into(), rhs, holds: lhs == rhs });
    }

    fn ge(&mut self, description: String, lhs: u64, rhs: u64) {
        self.0.push(IdentityTerm { description, lhs, relation: ">=".into(), rhs, holds: lhs >= rhs });
    }

    fn le(&mut self, description: String, lhs: u64, rhs: u64) {
        self.0.push(IdentityTerm { description, lhs, relation: "<=".into(), rhs, holds: lhs <= rhs });
    }
}

/// Necessary counting conditions on a parameter set. Never looks at sets.
pub fn check_parameter_identity(params: &FamilyParameters) -> Result<IdentityCheck> {
    let n = params.n as u64;
    if n < 2 {
        return Err(Error::Parameter("group order must be at least 2".into()));
    }
    if params.sizes.is_empty() || params.sizes.contains(&0) {
        return Err(Error::Parameter("set sizes must be positive".into()));
    }
    let m = params.m() as u64;
    let a = params.a() as u64;
    let sizes: Vec<u64> = params.sizes.iter().map(|&k| k as u64).collect();
    let lams = params.lambda_list();
    let single = || {
        params
            .single_lambda()
            .ok_or_else(|| Error::Parameter(format!("{} takes a single λ", params.kind)))
    };
    let uniform_k = || {
        params
            .uniform_k()
            .map(|k| k as u64)
            .ok_or_else(|| Error::Parameter(format!("{} needs equal set sizes", params.kind)))
    };
    let per = |len: usize, what: &str| -> Result<()> {
        if lams.len() != len {
            Err(Error::Parameter(format!("expected {len} λ values ({what}), got {}", lams.len())))
        } else {
            Ok(())
        }
    };
    let mut t = Terms(Vec::new());
    match params.kind {
        FamilyKind::Ds => {
            if m != 1 {
                return Err(Error::Parameter("a DS has exactly one set".into()));
            }
            let k = sizes[0];
            t.eq("λ(n-1) = k(k-1)".into(), single()? * (n - 1), k * (k - 1));
            t.le("k <= n".into(), k, n);
        }
        FamilyKind::Df => match params.uniform_k() {
            Some(k) => {
                let k = k as u64;
                t.eq("λ(n-1) = mk(k-1)".into(), single()? * (n - 1), m * k * (k - 1));
                t.le("k <= n".into(), k, n);
            }
            None => {
                let s: u64 = sizes.iter().map(|k| k * (k - 1)).sum();
                t.eq("λ(n-1) = Σk_i(k_i-1)".into(), single()? * (n - 1), s);
                t.le("max k_i <= n".into(), *sizes.iter().max().expect("nonempty"), n);
            }
        },
        FamilyKind::Edf => {
            let k = uniform_k()?;
            t.eq("λ(n-1) = k²m(m-1)".into(), single()? * (n - 1), k * k * m * (m - 1));
        }
        FamilyKind::Bedf => match params.uniform_k() {
            Some(k) => {
                let k = k as u64;
                t.ge("λ(n-1) >= k²m(m-1)".into(), single()? * (n - 1), k * k * m * (m - 1));
            }
            None => {
                let sq: u64 = sizes.iter().map(|k| k * k).sum();
                t.ge("λ(n-1) >= a² - Σk_i²".into(), single()? * (n - 1), a * a - sq);
            }
        },
        FamilyKind::Sedf => {
            let k = uniform_k()?;
            t.eq("λ(n-1) = k²(m-1)".into(), single()? * (n - 1), k * k * (m - 1));
        }
        FamilyKind::Gedf => {
            let sq: u64 = sizes.iter().map(|k| k * k).sum();
            t.eq("λ(n-1) = a² - Σk_i²".into(), single()? * (n - 1), a * a - sq);
        }
        FamilyKind::Gsedf => {
            per(sizes.len(), "one per set")?;
            for (i, (&k, &l)) in sizes.iter().zip(&lams).enumerate() {
                t.eq(format!("λ_{}(n-1) = k_{}(a-k_{})", i + 1, i + 1, i + 1), l * (n - 1), k * (a - k));
            }
        }
        FamilyKind::Bgsedf => {
            per(sizes.len(), "one per set")?;
            for (j, (&k, &l)) in sizes.iter().zip(&lams).enumerate() {
                t.ge(format!("λ_{}(n-1) >= k_{}(a-k_{})", j + 1, j + 1, j + 1), l * (n - 1), k * (a - k));
            }
        }
        FamilyKind::Pedf => {
            let classes = if params.classes.is_empty() { size_classes(&params.sizes) } else { params.classes.clone() };
            per(classes.len(), "one per size class")?;
            for (h, (c, &l)) in classes.iter().zip(&lams).enumerate() {
                let (cnt, k) = (c.count as u64, c.size as u64);
                t.eq(format!("λ_{}(n-1) = c_{}k_{}(a-k_{})", h + 1, h + 1, h + 1, h + 1), l * (n - 1), cnt * k * (a - k));
            }
        }
    }
    if params.kind.is_external() {
        t.ge("m >= 2".into(), m, 2);
        t.le("a <= n".into(), a, n);
    }
    let holds = t.0.iter().all(|x| x.holds);
    Ok(IdentityCheck { holds, terms: t.0 })
}

/// Edges of the implication lattice between family types.
pub const LATTICE_EDGES: [(FamilyKind, FamilyKind); 9] = [
    (FamilyKind::Sedf, FamilyKind::Gsedf),
    (FamilyKind::Sedf, FamilyKind::Edf),
    (FamilyKind::Ds, FamilyKind::Edf),
    (FamilyKind::Ds, FamilyKind::Df),
    (FamilyKind::Gsedf, FamilyKind::Bgsedf),
    (FamilyKind::Gsedf, FamilyKind::Pedf),
    (FamilyKind::Edf, FamilyKind::Pedf),
    (FamilyKind::Edf, FamilyKind::Bedf),
    (FamilyKind::Pedf, FamilyKind::Gedf),
];

pub fn is_lattice_edge(from: FamilyKind, to: FamilyKind) -> bool {
    LATTICE_EDGES.contains(&(from, to))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationReport {
    pub from: FamilyKind,
    pub to: FamilyKind,
    pub source: VerificationReport,
    /// Parameters the edge predicts for the target type.
    pub predicted: FamilyParameters,
    pub target: VerificationReport,
    pub verdict: Verdict,
}

/// Singletons `{x}` for each element of a single set.
pub fn singleton_lift(group: &FiniteAbelianGroup, set: &[Element]) -> Result<SetFamily> {
    SetFamily::new(group.clone(), set.iter().map(|e| vec![e.clone()]).collect())
}

/// Verify `family` as `from`, translate its parameters along the edge, and
/// verify the (possibly lifted) family as `to`.
pub fn implication_check(family: &SetFamily, from: FamilyKind, to: FamilyKind) -> Result<ImplicationReport> {
    if !is_lattice_edge(from, to) {
        return Err(Error::Lattice { from: from.to_string(), to: to.to_string() });
    }
    let source = verify(family, from, &VerifyOptions::default())?;
    let params = match &source.witnessed {
        Some(p) if source.passed() => p.clone(),
        _ => return Err(Error::Precondition(format!("family does not verify as {from}"))),
    };
    let n = params.n;
    let sizes = params.sizes.clone();
    let (target_family, predicted, opts) = match (from, to) {
        (FamilyKind::Sedf, FamilyKind::Gsedf) => {
            let l = params.single_lambda().expect("SEDF has one λ");
            let p = FamilyParameters::with_sizes(to, n, sizes.clone(), Lambdas::PerSet(vec![l; sizes.len()]));
            (family.clone(), p, VerifyOptions::default())
        }
        (FamilyKind::Sedf, FamilyKind::Edf) => {
            let l = params.single_lambda().expect("SEDF has one λ");
            let p = FamilyParameters::with_sizes(to, n, sizes.clone(), Lambdas::Single(l * sizes.len() as u64));
            (family.clone(), p, VerifyOptions::default())
        }
        (FamilyKind::Ds, FamilyKind::Edf) => {
            let l = params.single_lambda().expect("DS has one λ");
            let lifted = singleton_lift(family.group(), &family.sets()[0])?;
            if lifted.len() < 2 {
                return Err(Error::Precondition("a singleton DS lifts to a one-set family".into()));
            }
            let p = FamilyParameters::uniform(to, n, sizes[0], 1, l);
            (lifted, p, VerifyOptions::default())
        }
        (FamilyKind::Ds, FamilyKind::Df) => {
            let l = params.single_lambda().expect("DS has one λ");
            let p = FamilyParameters::uniform(to, n, 1, sizes[0], l);
            (family.clone(), p, VerifyOptions::default())
        }
        (FamilyKind::Gsedf, FamilyKind::Bgsedf) => {
            let lams = params.lambda_list();
            let p = FamilyParameters::with_sizes(to, n, sizes.clone(), Lambdas::PerSet(lams.clone()));
            (family.clone(), p, VerifyOptions { lambdas: Some(lams), ..Default::default() })
        }
        (FamilyKind::Gsedf, FamilyKind::Pedf) => {
            let lams = params.lambda_list();
            let classes = size_classes(&sizes);
            let class_l: Vec<u64> = classes
                .iter()
                .map(|c| sizes.iter().zip(&lams).filter(|(&k, _)| k == c.size).map(|(_, &l)| l).sum())
                .collect();
            let p = FamilyParameters::pedf(n, sizes.clone(), classes.clone(), class_l);
            (family.clone(), p, VerifyOptions { classes: Some(classes), ..Default::default() })
        }
        (FamilyKind::Edf, FamilyKind::Pedf) => {
            let l = params.single_lambda().expect("EDF has one λ");
            let classes = size_classes(&sizes);
            let p = FamilyParameters::pedf(n, sizes.clone(), classes.clone(), vec![l]);
            (family.clone(), p, VerifyOptions { classes: Some(classes), ..Default::default() })
        }
        (FamilyKind::Edf, FamilyKind::Bedf) => {
            let l = params.single_lambda().expect("EDF has one λ");
            let p = FamilyParameters::with_sizes(to, n, sizes.clone(), Lambdas::Single(l));
            (family.clone(), p, VerifyOptions { lambda: Some(l), ..Default::default() })
        }
        (FamilyKind::Pedf, FamilyKind::Gedf) => {
            let total: u64 = params.lambda_list().iter().sum();
            let p = FamilyParameters::with_sizes(to, n, sizes.clone(), Lambdas::Single(total));
            (family.clone(), p, VerifyOptions::default())
        }
        _ => unreachable!("edge list and translations agree"),
    };
    let target = verify(&target_family, to, &opts)?;
    let verdict = if target.passed() && target.witnessed.as_ref() == Some(&predicted) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(ImplicationReport { from, to, source, predicted, target, verdict })
}

/// Both sides of the partition characterisation: the family-level verdict
/// and the per-part (or per-class) verdicts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalReport {
    pub family: VerificationReport,
    pub parts: Vec<VerificationReport>,
    pub verdict: Verdict,
}

fn require_partition(family: &SetFamily) -> Result<()> {
    family.require_disjoint()?;
    if family.total_size() != family.group().order() {
        return Err(Error::Precondition(format!(
            "sets cover {} of {} elements; a partition of the group is required",
            family.total_size(),
            family.group().order()
        )));
    }
    Ok(())
}

/// A partition is a GSEDF exactly when each part `A_i` is an
/// `(n, k_i, k_i - λ_i)` difference set.
pub fn maximal_gsedf_ds_check(family: &SetFamily) -> Result<MaximalReport> {
    require_partition(family)?;
    let gsedf = verify_gsedf(family)?;
    let mut parts = Vec::with_capacity(family.len());
    for set in family.sets() {
        parts.push(verify_ds(family.group(), set)?);
    }
    let all_ds = parts.iter().all(VerificationReport::passed);
    if gsedf.passed() != all_ds {
        return Err(Error::InternalConsistency(format!(
            "partition GSEDF verdict {:?} disagrees with per-part DS verdicts",
            gsedf.verdict
        )));
    }
    if let Some(p) = &gsedf.witnessed {
        let lams = p.lambda_list();
        for (i, part) in parts.iter().enumerate() {
            let k = p.sizes[i] as u64;
            let ds_l = part.witnessed.as_ref().and_then(FamilyParameters::single_lambda);
            if ds_l != Some(k - lams[i]) {
                return Err(Error::InternalConsistency(format!(
                    "part {i}: DS λ {ds_l:?} but k_i - λ_i = {}",
                    k - lams[i]
                )));
            }
        }
    }
    let verdict = gsedf.verdict;
    Ok(MaximalReport { family: gsedf, parts, verdict })
}

/// A partition is a PEDF exactly when each size class forms an
/// `(n, c_h, k_h, c_h k_h - λ_h)` difference family.
pub fn maximal_pedf_df_check(family: &SetFamily, profile: &[SizeClass]) -> Result<MaximalReport> {
    require_partition(family)?;
    let pedf = verify_pedf(family, profile)?;
    let members = class_members(family, profile)?;
    let mut parts = Vec::with_capacity(members.len());
    for idx in &members {
        let blocks = SetFamily::blocks(family.group().clone(), idx.iter().map(|&i| family.sets()[i].clone()).collect())?;
        parts.push(verify_df(&blocks, true)?);
    }
    let all_df = parts.iter().all(VerificationReport::passed);
    if pedf.passed() != all_df {
        return Err(Error::InternalConsistency(format!(
            "partition PEDF verdict {:?} disagrees with per-class DF verdicts",
            pedf.verdict
        )));
    }
    if let Some(p) = &pedf.witnessed {
        let lams = p.lambda_list();
        for (h, (part, class)) in parts.iter().zip(profile).enumerate() {
            let expect = (class.count * class.size) as u64 - lams[h];
            let df_l = part.witnessed.as_ref().and_then(FamilyParameters::single_lambda);
            if df_l != Some(expect) {
                return Err(Error::InternalConsistency(format!(
                    "class {h}: DF λ {df_l:?} but c_h k_h - λ_h = {expect}"
                )));
            }
        }
    }
    let verdict = pedf.verdict;
    Ok(MaximalReport { family: pedf, parts, verdict })
}
