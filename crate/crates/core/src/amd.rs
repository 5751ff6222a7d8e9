//! Algebraic manipulation detection codes: the data model, exact evaluation
//! of the weak and strong substitution games, lower bounds, R/G-optimality
//! classification, and translations between codes and difference families.
//!
//! Sources are always equiprobable. Success probabilities are affine in the
//! adversary's mixed strategy, so optima are taken over single offsets Δ
//! (per source in the strong game).

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::diffcore::SetFamily;
use crate::error::{Error, Result};
use crate::families::{self, FamilyKind, FamilyParameters, Lambdas, VerificationReport, VerifyOptions};
use crate::group::{Element, FiniteAbelianGroup};
use crate::rational::Rational;

/// One source with its valid encodings and their probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Source {
    pub name: String,
    /// `(g, Pr[E(s) = g])`, in canonical group order.
    pub encodings: Vec<(Element, Rational)>,
}

impl Source {
    pub fn new(name: impl Into<String>, encodings: Vec<(Element, Rational)>) -> Self {
        Source { name: name.into(), encodings }
    }

    /// Uniform encoding over `set`.
    pub fn equiprobable(name: impl Into<String>, set: Vec<Element>) -> Self {
        let p = if set.is_empty() { Rational::zero() } else { Rational::new(1, set.len() as i128) };
        Source { name: name.into(), encodings: set.into_iter().map(|g| (g, p)).collect() }
    }

    pub fn set(&self) -> Vec<Element> {
        self.encodings.iter().map(|(g, _)| g.clone()).collect()
    }
}

/// A validated AMD code over a finite abelian group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmdCode {
    group: FiniteAbelianGroup,
    sources: Vec<Source>,
    /// Per source, `(element index, probability)`.
    indexed: Vec<Vec<(usize, Rational)>>,
    /// Source owning each element index, if any.
    owner: Vec<Option<usize>>,
}

impl AmdCode {
    pub fn new(group: FiniteAbelianGroup, sources: Vec<Source>) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::InvalidCode("a code needs at least one source".into()));
        }
        let mut owner: Vec<Option<usize>> = vec![None; group.order()];
        let mut indexed = Vec::with_capacity(sources.len());
        let mut sorted_sources = Vec::with_capacity(sources.len());
        for (s, src) in sources.into_iter().enumerate() {
            if sorted_sources.iter().any(|o: &Source| o.name == src.name) {
                return Err(Error::InvalidCode(format!("duplicate source name {:?}", src.name)));
            }
            if src.encodings.is_empty() {
                return Err(Error::EmptySet(s));
            }
            let mut pairs = Vec::with_capacity(src.encodings.len());
            let mut total = Rational::zero();
            for (g, p) in &src.encodings {
                let i = group.index_of(g)?;
                if *p <= Rational::zero() {
                    return Err(Error::InvalidCode(format!(
                        "source {:?}: encoding {g} has probability {p}; omit zero-probability encodings",
                        src.name
                    )));
                }
                if let Some(t) = owner[i] {
                    return Err(if t == s {
                        Error::DuplicateElement { element: g.to_string(), set: s }
                    } else {
                        Error::Disjointness { element: g.to_string(), first: t, second: s }
                    });
                }
                owner[i] = Some(s);
                total = total + p;
                pairs.push((i, *p));
            }
            if total != Rational::one() {
                return Err(Error::InvalidCode(format!(
                    "source {:?}: probabilities sum to {total}, not 1",
                    src.name
                )));
            }
            pairs.sort_by_key(|(i, _)| *i);
            let encodings = pairs.iter().map(|&(i, p)| (group.element_at(i), p)).collect();
            sorted_sources.push(Source { name: src.name, encodings });
            indexed.push(pairs);
        }
        Ok(AmdCode { group, sources: sorted_sources, indexed, owner })
    }

    /// Equiprobable encoding on every set of a disjoint family; sources are
    /// named `s1`, `s2`, ….
    pub fn from_family(family: &SetFamily) -> Result<Self> {
        family.require_disjoint()?;
        let sources = family
            .sets()
            .iter()
            .enumerate()
            .map(|(i, set)| Source::equiprobable(format!("s{}", i + 1), set.clone()))
            .collect();
        AmdCode::new(family.group().clone(), sources)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    /// Number of sources.
    pub fn m(&self) -> usize {
        self.sources.len()
    }

    pub fn n(&self) -> usize {
        self.group.order()
    }

    /// `a_s` for each source.
    pub fn sizes(&self) -> Vec<usize> {
        self.indexed.iter().map(Vec::len).collect()
    }

    /// Total number of valid encodings.
    pub fn a(&self) -> usize {
        self.indexed.iter().map(Vec::len).sum()
    }

    /// The valid sets as a disjoint family.
    pub fn family(&self) -> SetFamily {
        SetFamily::new(self.group.clone(), self.sources.iter().map(Source::set).collect())
            .expect("code sets are disjoint and nonempty")
    }

    /// `Some(k)` when every source has `k` encodings.
    pub fn uniform_size(&self) -> Option<usize> {
        let k = self.indexed[0].len();
        self.indexed.iter().all(|s| s.len() == k).then_some(k)
    }

    pub fn is_equiprobable(&self) -> bool {
        self.indexed
            .iter()
            .all(|s| s.iter().all(|(_, p)| *p == Rational::new(1, s.len() as i128)))
    }

    /// `Some(k)` for a k-uniform code with equiprobable encoding.
    pub fn regular_size(&self) -> Option<usize> {
        self.uniform_size().filter(|_| self.is_equiprobable())
    }

    pub fn is_deterministic(&self) -> bool {
        self.indexed.iter().all(|s| s.len() == 1)
    }

    /// A single source: nothing can be substituted and no bound applies.
    pub fn is_degenerate(&self) -> bool {
        self.m() < 2
    }

    fn delta_index(&self, delta: &Element) -> Result<usize> {
        let d = self.group.index_of(delta)?;
        if d == 0 {
            return Err(Error::ZeroDelta);
        }
        Ok(d)
    }

    fn source_index(&self, s: usize) -> Result<usize> {
        if s < self.m() {
            Ok(s)
        } else {
            Err(Error::IndexOutOfRange { index: s, len: self.m() })
        }
    }

    /// `ε_{Δ,s}` for a delta given by index.
    fn strong_value(&self, s: usize, d: usize) -> Rational {
        let mut total = Rational::zero();
        for &(g, p) in &self.indexed[s] {
            match self.owner[self.group.add_index(g, d)] {
                Some(t) if t != s => total = total + p,
                _ => {}
            }
        }
        total
    }

    /// Table of `ε_{Δ,s}` indexed `[s][d]`, with `d = 0` unused.
    fn strong_table(&self) -> Vec<Vec<Rational>> {
        (0..self.m())
            .map(|s| {
                let mut row = vec![Rational::zero(); self.n()];
                for (d, slot) in row.iter_mut().enumerate().skip(1) {
                    *slot = self.strong_value(s, d);
                }
                row
            })
            .collect()
    }

    fn weak_row(&self, strong: &[Vec<Rational>]) -> Vec<Rational> {
        let m = Rational::from(self.m());
        (0..self.n())
            .map(|d| if d == 0 { Rational::zero() } else { strong.iter().map(|r| r[d]).sum::<Rational>() / m })
            .collect()
    }
}

impl Serialize for AmdCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let sources: Vec<serde_json::Value> = self
            .sources
            .iter()
            .map(|src| {
                let set = src.set();
                let probs: Vec<String> = src.encodings.iter().map(|(_, p)| p.to_string()).collect();
                serde_json::json!({ "name": src.name, "set": set, "probs": probs })
            })
            .collect();
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("group", &self.group)?;
        map.serialize_entry("sources", &sources)?;
        map.end()
    }
}

/// `Pr[g] = Pr[E(s) = g] / m` for every valid encoding, in canonical order.
pub fn induced_message_distribution(code: &AmdCode) -> Vec<(Element, Rational)> {
    let m = Rational::from(code.m());
    let mut out: Vec<(usize, Rational)> =
        code.indexed.iter().flat_map(|s| s.iter().map(|&(g, p)| (g, p / m))).collect();
    out.sort_by_key(|(g, _)| *g);
    out.into_iter().map(|(g, p)| (code.group.element_at(g), p)).collect()
}

/// Encodings `g` for which `g + Δ` is a valid encoding of another source.
pub fn good_set(code: &AmdCode, delta: &Element) -> Result<Vec<Element>> {
    let d = code.delta_index(delta)?;
    let mut out: Vec<usize> = Vec::new();
    for (s, set) in code.indexed.iter().enumerate() {
        for &(g, _) in set {
            if matches!(code.owner[code.group.add_index(g, d)], Some(t) if t != s) {
                out.push(g);
            }
        }
    }
    out.sort_unstable();
    Ok(out.into_iter().map(|g| code.group.element_at(g)).collect())
}

/// `Good(Δ, s)`: the part of [`good_set`] inside `A(s)`.
pub fn good_set_for_source(code: &AmdCode, s: usize, delta: &Element) -> Result<Vec<Element>> {
    let s = code.source_index(s)?;
    let d = code.delta_index(delta)?;
    Ok(code.indexed[s]
        .iter()
        .filter(|&&(g, _)| matches!(code.owner[code.group.add_index(g, d)], Some(t) if t != s))
        .map(|&(g, _)| code.group.element_at(g))
        .collect())
}

/// Weak-game success probability `ε_Δ` of the substitution `g ↦ g + Δ`.
pub fn eval_weak_delta(code: &AmdCode, delta: &Element) -> Result<Rational> {
    let d = code.delta_index(delta)?;
    let total: Rational = (0..code.m()).map(|s| code.strong_value(s, d)).sum();
    Ok(total / Rational::from(code.m()))
}

/// Strong-game success probability `ε_{Δ,s}` for source index `s`.
pub fn eval_strong_delta(code: &AmdCode, s: usize, delta: &Element) -> Result<Rational> {
    let s = code.source_index(s)?;
    let d = code.delta_index(delta)?;
    Ok(code.strong_value(s, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaValue {
    pub delta: Element,
    pub value: Rational,
}

/// Optimum of one game (or one source of the strong game).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Optimum {
    pub value: Rational,
    /// Every Δ attaining the optimum, in canonical order.
    pub argmax: Vec<Element>,
    /// All `ε_Δ` values, in canonical order of Δ.
    pub table: Vec<DeltaValue>,
}

fn optimum_of(group: &FiniteAbelianGroup, row: &[Rational]) -> Optimum {
    let value = row[1..].iter().copied().max().unwrap_or_else(Rational::zero);
    let argmax = (1..row.len()).filter(|&d| row[d] == value).map(|d| group.element_at(d)).collect();
    let table = (1..row.len()).map(|d| DeltaValue { delta: group.element_at(d), value: row[d] }).collect();
    Optimum { value, argmax, table }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SourceOptimum {
    pub source: String,
    #[serde(flatten)]
    pub optimum: Optimum,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongEvaluation {
    /// `ε̂ = max_s ε̂_s`.
    pub value: Rational,
    /// Source indices attaining the overall optimum.
    pub argmax_sources: Vec<usize>,
    pub per_source: Vec<SourceOptimum>,
}

pub fn eval_weak_optimum(code: &AmdCode) -> Optimum {
    let strong = code.strong_table();
    optimum_of(&code.group, &code.weak_row(&strong))
}

fn strong_from_table(code: &AmdCode, strong: &[Vec<Rational>]) -> StrongEvaluation {
    let per_source: Vec<SourceOptimum> = strong
        .iter()
        .zip(&code.sources)
        .map(|(row, src)| SourceOptimum { source: src.name.clone(), optimum: optimum_of(&code.group, row) })
        .collect();
    let value = per_source.iter().map(|s| s.optimum.value).max().expect("at least one source");
    let argmax_sources = (0..per_source.len()).filter(|&s| per_source[s].optimum.value == value).collect();
    StrongEvaluation { value, argmax_sources, per_source }
}

pub fn eval_strong_optimum(code: &AmdCode) -> StrongEvaluation {
    strong_from_table(code, &code.strong_table())
}

/// A mixed choice of offset: `(Δ, σ(Δ))` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeakStrategy {
    weights: Vec<(Element, Rational)>,
}

impl WeakStrategy {
    pub fn new(group: &FiniteAbelianGroup, weights: Vec<(Element, Rational)>) -> Result<Self> {
        let mut seen = vec![false; group.order()];
        let mut total = Rational::zero();
        for (delta, w) in &weights {
            let d = group.index_of(delta)?;
            if d == 0 {
                return Err(Error::ZeroDelta);
            }
            if seen[d] {
                return Err(Error::InvalidStrategy(format!("offset {delta} listed twice")));
            }
            seen[d] = true;
            if *w < Rational::zero() {
                return Err(Error::InvalidStrategy(format!("negative weight {w} on {delta}")));
            }
            total = total + w;
        }
        if total != Rational::one() {
            return Err(Error::InvalidStrategy(format!("weights sum to {total}, not 1")));
        }
        Ok(WeakStrategy { weights })
    }

    /// Every nonzero offset with equal weight.
    pub fn uniform(group: &FiniteAbelianGroup) -> Self {
        let w = Rational::new(1, group.order() as i128 - 1);
        WeakStrategy { weights: group.nonzero_elements().map(|d| (d, w)).collect() }
    }

    pub fn point(group: &FiniteAbelianGroup, delta: Element) -> Result<Self> {
        Self::new(group, vec![(delta, Rational::one())])
    }

    pub fn weights(&self) -> &[(Element, Rational)] {
        &self.weights
    }
}

/// One weak strategy per source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongStrategy {
    pub per_source: Vec<WeakStrategy>,
}

/// `Σ_Δ σ(Δ) ε_Δ`.
pub fn eval_weak_strategy(code: &AmdCode, strategy: &WeakStrategy) -> Result<Rational> {
    let mut total = Rational::zero();
    for (delta, w) in &strategy.weights {
        if !w.is_zero() {
            total = total + *w * eval_weak_delta(code, delta)?;
        }
    }
    Ok(total)
}

/// Per-source success probabilities `Σ_Δ σ_s(Δ) ε_{Δ,s}`.
pub fn eval_strong_strategy(code: &AmdCode, strategy: &StrongStrategy) -> Result<Vec<Rational>> {
    if strategy.per_source.len() != code.m() {
        return Err(Error::InvalidStrategy(format!(
            "{} per-source strategies for {} sources",
            strategy.per_source.len(),
            code.m()
        )));
    }
    let mut out = Vec::with_capacity(code.m());
    for (s, sigma) in strategy.per_source.iter().enumerate() {
        let mut total = Rational::zero();
        for (delta, w) in &sigma.weights {
            if !w.is_zero() {
                total = total + *w * eval_strong_delta(code, s, delta)?;
            }
        }
        out.push(total);
    }
    Ok(out)
}

/// Lower bounds on the weak-game optimum. The products bound `ε̂²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeakBounds {
    /// `a(m-1) / (m(n-1))`, achieved by a uniformly random offset.
    pub rand: Rational,
    /// `1/a`.
    pub guess: Rational,
    /// Success of guessing the most likely encoding, `max Pr[g] >= 1/a`.
    pub guess_strategy: Rational,
    /// `(m-1) / (m(n-1))`, a lower bound on `ε̂²`.
    pub product: Rational,
    /// `k(m-1) / (n-1)` for a k-uniform code.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform: Option<Rational>,
    /// `(m-1) / (n-1)`.
    pub floor: Rational,
}

pub fn weak_bounds(code: &AmdCode) -> WeakBounds {
    let (a, m, n1) = (code.a() as i128, code.m() as i128, code.n() as i128 - 1);
    let guess_strategy = if code.is_degenerate() {
        Rational::zero()
    } else {
        induced_message_distribution(code).into_iter().map(|(_, p)| p).max().unwrap_or_else(Rational::zero)
    };
    WeakBounds {
        rand: Rational::new(a * (m - 1), m * n1),
        guess: Rational::new(1, a),
        guess_strategy,
        product: Rational::new(m - 1, m * n1),
        uniform: code.uniform_size().map(|k| Rational::new(k as i128 * (m - 1), n1)),
        floor: Rational::new(m - 1, n1),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SourceBounds {
    pub source: String,
    /// `(a - a_s) / (n-1)`.
    pub rand: Rational,
    /// `1/a_s`.
    pub guess: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongBounds {
    pub per_source: Vec<SourceBounds>,
    /// `(a - min a_s) / (n-1)`.
    pub rand: Rational,
    /// `1 / min a_s`.
    pub guess: Rational,
    /// `(m-1) / (n-1)`, a lower bound on `ε̂²` for k-uniform codes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform_product: Option<Rational>,
    /// `1/k` for k-regular codes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regular_guess: Option<Rational>,
}

pub fn strong_bounds(code: &AmdCode) -> StrongBounds {
    let (a, m, n1) = (code.a() as i128, code.m() as i128, code.n() as i128 - 1);
    let per_source = code
        .sources
        .iter()
        .zip(code.sizes())
        .map(|(src, a_s)| SourceBounds {
            source: src.name.clone(),
            rand: Rational::new(a - a_s as i128, n1),
            guess: Rational::new(1, a_s as i128),
        })
        .collect();
    let min = *code.sizes().iter().min().expect("at least one source") as i128;
    StrongBounds {
        per_source,
        rand: Rational::new(a - min, n1),
        guess: Rational::new(1, min),
        uniform_product: code.uniform_size().map(|_| Rational::new(m - 1, n1)),
        regular_guess: code.regular_size().map(|k| Rational::new(1, k as i128)),
    }
}

/// R/G-optimality in both games, with the numbers behind each flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub weak_r: bool,
    pub weak_g: bool,
    pub strong_r: bool,
    pub strong_g: bool,
    pub degenerate: bool,
    pub k_uniform: Option<usize>,
    pub equiprobable: bool,
    pub k_regular: Option<usize>,
    pub deterministic: bool,
    pub weak_optimum: Rational,
    pub strong_optimum: Rational,
    pub strong_source_optima: Vec<Rational>,
    pub weak_bounds: WeakBounds,
    pub strong_bounds: StrongBounds,
}

/// Classify a code. The optimum-based definitions are cross-checked against
/// the all-offsets characterisation and the averaging identities; any
/// disagreement is an internal-consistency error.
pub fn classify(code: &AmdCode) -> Result<Classification> {
    let strong = code.strong_table();
    let weak_row = code.weak_row(&strong);
    let weak = optimum_of(&code.group, &weak_row);
    let strong_eval = strong_from_table(code, &strong);
    let wb = weak_bounds(code);
    let sb = strong_bounds(code);
    let (a, m) = (code.a() as i128, code.m() as i128);
    let degenerate = code.is_degenerate();

    let weak_sum: Rational = weak_row[1..].iter().sum();
    if weak_sum != Rational::new(a * (m - 1), m) {
        return Err(Error::InternalConsistency(format!("Σ ε_Δ = {weak_sum}, expected a(m-1)/m")));
    }
    for (s, row) in strong.iter().enumerate() {
        let sum: Rational = row[1..].iter().sum();
        let expect = Rational::from_integer(a - code.sizes()[s] as i128);
        if sum != expect {
            return Err(Error::InternalConsistency(format!("Σ ε_Δ,s = {sum} for source {s}, expected {expect}")));
        }
    }

    let weak_r = !degenerate && weak.value == wb.rand;
    let all_equal = weak_row[1..].iter().all(|v| *v == wb.rand);
    if weak_r != (all_equal && !degenerate) {
        return Err(Error::InternalConsistency("weak R-optimality disagrees with the per-offset test".into()));
    }
    let weak_g = !degenerate && weak.value == wb.guess;

    let mut strong_r = !degenerate;
    let mut strong_g = !degenerate;
    for (s, row) in strong.iter().enumerate() {
        let b = &sb.per_source[s];
        let opt = strong_eval.per_source[s].optimum.value;
        let r_s = opt == b.rand;
        if r_s != row[1..].iter().all(|v| *v == b.rand) {
            return Err(Error::InternalConsistency(format!(
                "strong R-optimality of source {s} disagrees with the per-offset test"
            )));
        }
        strong_r &= r_s;
        strong_g &= opt == b.guess;
    }

    Ok(Classification {
        weak_r,
        weak_g,
        strong_r,
        strong_g,
        degenerate,
        k_uniform: code.uniform_size(),
        equiprobable: code.is_equiprobable(),
        k_regular: code.regular_size(),
        deterministic: code.is_deterministic(),
        weak_optimum: weak.value,
        strong_optimum: strong_eval.value,
        strong_source_optima: strong_eval.per_source.iter().map(|s| s.optimum.value).collect(),
        weak_bounds: wb,
        strong_bounds: sb,
    })
}

/// An optimality property a construction guarantees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guarantee {
    WeakR,
    WeakG,
    StrongR,
    StrongG,
}

impl Guarantee {
    fn holds(&self, c: &Classification) -> bool {
        match self {
            Guarantee::WeakR => c.weak_r,
            Guarantee::WeakG => c.weak_g,
            Guarantee::StrongR => c.strong_r,
            Guarantee::StrongG => c.strong_g,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyCode {
    pub code: AmdCode,
    pub report: VerificationReport,
    pub guaranteed: Vec<Guarantee>,
}

/// Equiprobable code whose valid sets are the family's sets (a DS is first
/// split into singletons). Every guarantee the family type carries is
/// checked against the evaluator before returning.
pub fn code_from_family(family: &SetFamily, kind: FamilyKind, opts: &VerifyOptions) -> Result<FamilyCode> {
    if kind == FamilyKind::Df {
        return Err(Error::WrongType("a DF constrains only internal differences and gives no code".into()));
    }
    let report = families::verify(family, kind, opts)?;
    let params = match &report.witnessed {
        Some(p) if report.passed() => p.clone(),
        _ => return Err(Error::WrongType(format!("family does not verify as {kind}"))),
    };
    let lams = params.lambda_list();
    let all_one = lams.iter().all(|&l| l == 1);
    let uniform = params.sizes.windows(2).all(|w| w[0] == w[1]);
    use Guarantee::*;
    let (code_family, guaranteed) = match kind {
        FamilyKind::Ds => {
            let lifted = families::singleton_lift(family.group(), &family.sets()[0])?;
            let mut g = vec![WeakR];
            if all_one {
                g.push(WeakG);
            }
            (lifted, g)
        }
        FamilyKind::Gsedf => (family.clone(), vec![WeakR, StrongR]),
        FamilyKind::Sedf => {
            let mut g = vec![WeakR, StrongR];
            if all_one {
                g.push(StrongG);
            }
            (family.clone(), g)
        }
        FamilyKind::Pedf => (family.clone(), vec![WeakR]),
        FamilyKind::Edf => {
            let mut g = vec![WeakR];
            if all_one {
                g.push(WeakG);
            }
            (family.clone(), g)
        }
        FamilyKind::Bedf => (family.clone(), if all_one && uniform { vec![WeakG] } else { vec![] }),
        FamilyKind::Bgsedf => (family.clone(), if all_one { vec![StrongG] } else { vec![] }),
        FamilyKind::Gedf => (family.clone(), vec![]),
        FamilyKind::Df => unreachable!(),
    };
    let code = AmdCode::from_family(&code_family)?;
    if !guaranteed.is_empty() {
        let c = classify(&code)?;
        if let Some(g) = guaranteed.iter().find(|g| !g.holds(&c)) {
            return Err(Error::InternalConsistency(format!("{kind} code is not {g:?} as guaranteed")));
        }
    }
    Ok(FamilyCode { code, report, guaranteed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeFamily {
    pub family: SetFamily,
    /// Parameters forced by the code's optimality.
    pub predicted: FamilyParameters,
    pub report: VerificationReport,
}

/// Recover the difference family behind an optimal code. Fails with a
/// precondition error naming the first missing hypothesis.
pub fn family_from_code(code: &AmdCode, kind: FamilyKind) -> Result<CodeFamily> {
    let c = classify(code)?;
    let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(Error::Precondition(what.to_string())) };
    let (n, m, a) = (code.n(), code.m(), code.a());
    let sizes = code.sizes();
    let n1 = n as u64 - 1;
    let family = code.family();
    let (predicted, opts) = match kind {
        FamilyKind::Edf | FamilyKind::Pedf => {
            need(c.k_regular.is_some(), "not k-regular")?;
            need(c.weak_r, "not weak R-optimal")?;
            let k = c.k_regular.unwrap() as u64;
            let lambda = k * k * m as u64 * (m as u64 - 1) / n1;
            if kind == FamilyKind::Edf {
                (FamilyParameters::uniform(kind, n, m, k as usize, lambda), VerifyOptions::default())
            } else {
                let classes = families::size_classes(&sizes);
                (FamilyParameters::pedf(n, sizes.clone(), classes.clone(), vec![lambda]), VerifyOptions {
                    classes: Some(classes),
                    ..Default::default()
                })
            }
        }
        FamilyKind::Bedf => {
            need(c.weak_g, "not weak G-optimal")?;
            let k = c.k_regular.ok_or_else(|| {
                Error::InternalConsistency("weak G-optimal code is not k-regular".into())
            })?;
            (FamilyParameters::uniform(kind, n, m, k, 1), VerifyOptions { lambda: Some(1), ..Default::default() })
        }
        FamilyKind::Gsedf | FamilyKind::Sedf => {
            need(c.equiprobable, "not equiprobable encoding")?;
            if kind == FamilyKind::Sedf {
                need(c.k_uniform.is_some(), "not k-uniform")?;
            }
            need(c.strong_r, "not strong R-optimal")?;
            let lams: Vec<u64> = sizes.iter().map(|&k| (k * (a - k)) as u64 / n1).collect();
            let p = if kind == FamilyKind::Sedf {
                FamilyParameters::uniform(kind, n, m, sizes[0], lams[0])
            } else {
                FamilyParameters::with_sizes(kind, n, sizes.clone(), Lambdas::PerSet(lams))
            };
            (p, VerifyOptions::default())
        }
        FamilyKind::Bgsedf => {
            need(c.strong_g, "not strong G-optimal")?;
            let ones = vec![1; m];
            (
                FamilyParameters::with_sizes(kind, n, sizes.clone(), Lambdas::PerSet(ones.clone())),
                VerifyOptions { lambdas: Some(ones), ..Default::default() },
            )
        }
        FamilyKind::Ds | FamilyKind::Df | FamilyKind::Gedf => {
            return Err(Error::WrongType(format!("no code characterisation yields a {kind}")));
        }
    };
    let report = families::verify(&family, kind, &opts)?;
    if !report.passed() || report.witnessed.as_ref() != Some(&predicted) {
        return Err(Error::InternalConsistency(format!(
            "optimal code does not give the predicted {predicted}"
        )));
    }
    Ok(CodeFamily { family, predicted, report })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimultaneousReport {
    pub weak_simultaneous: bool,
    /// The valid sets form an (n,m,k,1)-EDF.
    pub edf_lambda_one: bool,
    pub strong_simultaneous: bool,
    /// A k-uniform code meets `ε̂² = (m-1)/(n-1) < 1`.
    pub strong_product_equality: bool,
    pub m: usize,
    pub n: usize,
    pub k_uniform: Option<usize>,
}

/// Check the simultaneous R- and G-optimality characterisations for both
/// games and report which apply.
pub fn check_simultaneous_optimality(code: &AmdCode) -> Result<SimultaneousReport> {
    let c = classify(code)?;
    let (n, m) = (code.n(), code.m());
    let broken = |what: String| Err(Error::InternalConsistency(what));

    let weak_simultaneous = c.weak_r && c.weak_g;
    let edf_lambda_one = m >= 2
        && code.uniform_size().is_some()
        && matches!(
            families::verify_edf(&code.family())?.witnessed.and_then(|p| p.single_lambda()),
            Some(1)
        );
    if c.weak_g && c.k_regular.is_none() {
        return broken("weak G-optimal code is not k-regular".into());
    }
    if c.k_regular.is_some() && weak_simultaneous != edf_lambda_one {
        return broken(format!(
            "k-regular code: weak R+G is {weak_simultaneous} but (n,m,k,1)-EDF is {edf_lambda_one}"
        ));
    }

    let strong_simultaneous = c.strong_r && c.strong_g;
    if strong_simultaneous && m >= 3 && c.strong_optimum < Rational::one() {
        return broken(format!("strong R+G optimal code with m = {m} and ε̂ = {}", c.strong_optimum));
    }
    let mut strong_product_equality = false;
    if let (Some(k), false) = (c.k_uniform, c.degenerate) {
        let e2 = c.strong_optimum * c.strong_optimum;
        let floor = Rational::new(m as i128 - 1, n as i128 - 1);
        if e2 < floor {
            return broken(format!("ε̂² = {e2} is below (m-1)/(n-1) = {floor}"));
        }
        if e2 == floor && c.strong_optimum < Rational::one() {
            strong_product_equality = true;
            if m != 2 || n != k * k + 1 {
                return broken(format!("strong product bound met with m = {m}, n = {n}, k = {k}"));
            }
        }
    }
    Ok(SimultaneousReport {
        weak_simultaneous,
        edf_lambda_one,
        strong_simultaneous,
        strong_product_equality,
        m,
        n,
        k_uniform: c.k_uniform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;

    fn z(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    fn e(x: u32) -> Element {
        Element::from(x)
    }

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn equi(n: u64, sets: &[&[u32]]) -> AmdCode {
        let sources = sets
            .iter()
            .enumerate()
            .map(|(i, s)| Source::equiprobable(format!("s{}", i + 1), s.iter().map(|&x| e(x)).collect()))
            .collect();
        AmdCode::new(z(n), sources).unwrap()
    }

    fn ds_code() -> AmdCode {
        equi(21, &[&[3], &[6], &[12], &[7], &[14]])
    }

    fn qr_code() -> AmdCode {
        equi(7, &[&[1], &[2], &[4], &[0, 3, 5, 6]])
    }

    fn z10_code() -> AmdCode {
        equi(10, &[&[0], &[5], &[1, 9], &[2, 3]])
    }

    fn gedf13_code() -> AmdCode {
        equi(13, &[&[0, 1], &[2, 4, 6]])
    }

    #[test]
    fn validation() {
        let g = z(7);
        let bad_sum = Source::new("a", vec![(e(1), r(1, 2)), (e(2), r(1, 3))]);
        assert!(matches!(AmdCode::new(g.clone(), vec![bad_sum]), Err(Error::InvalidCode(_))));
        let zero = Source::new("a", vec![(e(1), r(1, 1)), (e(2), r(0, 1))]);
        assert!(matches!(AmdCode::new(g.clone(), vec![zero]), Err(Error::InvalidCode(_))));
        let overlap = vec![Source::equiprobable("a", vec![e(1)]), Source::equiprobable("b", vec![e(1), e(2)])];
        assert!(matches!(AmdCode::new(g.clone(), overlap), Err(Error::Disjointness { .. })));
        assert!(matches!(AmdCode::new(g, vec![]), Err(Error::InvalidCode(_))));
    }

    #[test]
    fn message_distribution() {
        assert!(induced_message_distribution(&ds_code()).iter().all(|(_, p)| *p == r(1, 5)));
        let d = induced_message_distribution(&qr_code());
        let get = |x: u32| d.iter().find(|(g, _)| *g == e(x)).unwrap().1;
        assert_eq!((get(1), get(2), get(4)), (r(1, 4), r(1, 4), r(1, 4)));
        for x in [0, 3, 5, 6] {
            assert_eq!(get(x), r(1, 16));
        }
        let single = AmdCode::new(z(5), vec![Source::new("a", vec![(e(1), r(1, 3)), (e(2), r(2, 3))])]).unwrap();
        assert_eq!(induced_message_distribution(&single)[1].1, r(2, 3));
    }

    #[test]
    fn good_sets() {
        let ds = ds_code();
        for d in 1..21 {
            assert_eq!(good_set(&ds, &e(d)).unwrap().len(), 1);
        }
        assert_eq!(good_set(&ds, &e(0)), Err(Error::ZeroDelta));
        // Oracle for Δ = 1 on the Z_7 code: g in one set with g + 1 in another.
        let sets: [&[u32]; 4] = [&[1], &[2], &[4], &[0, 3, 5, 6]];
        let owner = |x: u32| sets.iter().position(|s| s.contains(&x));
        let expect: Vec<Element> = (0..7).filter(|&g| {
            matches!((owner(g), owner((g + 1) % 7)), (Some(a), Some(b)) if a != b)
        }).map(e).collect();
        assert_eq!(good_set(&qr_code(), &e(1)).unwrap(), expect);
        let single = equi(5, &[&[0, 1]]);
        assert!(good_set(&single, &e(1)).unwrap().is_empty());
    }

    #[test]
    fn weak_values() {
        assert_eq!(eval_weak_delta(&gedf13_code(), &e(1)).unwrap(), r(1, 4));
        for d in 1..21 {
            assert_eq!(eval_weak_delta(&ds_code(), &e(d)).unwrap(), r(1, 5));
        }
        assert_eq!(eval_weak_delta(&equi(5, &[&[0, 1]]), &e(2)).unwrap(), Rational::zero());
        assert_eq!(eval_weak_optimum(&z10_code()).value, r(1, 2));
        assert_eq!(eval_weak_optimum(&ds_code()).value, r(1, 5));
        assert_eq!(eval_weak_optimum(&gedf13_code()).value, r(1, 4));
    }

    #[test]
    fn strong_values() {
        let qr = qr_code();
        for d in 1..7 {
            assert_eq!(eval_strong_delta(&qr, 3, &e(d)).unwrap(), r(1, 2));
        }
        assert_eq!(eval_strong_delta(&qr, 0, &e(1)).unwrap(), Rational::one());
        let ev = eval_strong_optimum(&qr);
        let opts: Vec<Rational> = ev.per_source.iter().map(|s| s.optimum.value).collect();
        assert_eq!(opts, vec![Rational::one(), Rational::one(), Rational::one(), r(1, 2)]);
        assert_eq!(ev.value, Rational::one());
        let sedf = AmdCode::from_family(&constructions::two_set_sedf(3).unwrap()).unwrap();
        let ev = eval_strong_optimum(&sedf);
        assert!(ev.per_source.iter().all(|s| s.optimum.value == r(1, 3)));
        let singles = AmdCode::from_family(&constructions::singleton_sedf(6).unwrap()).unwrap();
        assert!(eval_strong_optimum(&singles).per_source.iter().all(|s| s.optimum.value == Rational::one()));
    }

    #[test]
    fn strategies() {
        let ds = ds_code();
        assert_eq!(eval_weak_strategy(&ds, &WeakStrategy::uniform(ds.group())).unwrap(), r(1, 5));
        for code in [qr_code(), z10_code(), gedf13_code()] {
            let u = eval_weak_strategy(&code, &WeakStrategy::uniform(code.group())).unwrap();
            assert_eq!(u, weak_bounds(&code).rand);
        }
        let g = gedf13_code();
        let p = WeakStrategy::point(g.group(), e(1)).unwrap();
        assert_eq!(eval_weak_strategy(&g, &p).unwrap(), r(1, 4));
        assert!(matches!(WeakStrategy::point(g.group(), e(0)), Err(Error::ZeroDelta)));
        let bad = WeakStrategy::new(g.group(), vec![(e(1), r(1, 2))]);
        assert!(matches!(bad, Err(Error::InvalidStrategy(_))));
        let qr = qr_code();
        let strat = StrongStrategy { per_source: vec![WeakStrategy::uniform(qr.group()); 4] };
        let vals = eval_strong_strategy(&qr, &strat).unwrap();
        assert_eq!(vals[3], r(1, 2));
        assert_eq!(vals[0], Rational::one());
    }

    #[test]
    fn bounds() {
        let b = weak_bounds(&gedf13_code());
        assert_eq!((b.rand, b.guess), (r(5, 24), r(1, 5)));
        assert_eq!(weak_bounds(&z10_code()).rand, r(1, 2));
        let b = weak_bounds(&ds_code());
        assert_eq!((b.rand, b.guess), (r(1, 5), r(1, 5)));
        let b = strong_bounds(&qr_code());
        assert_eq!((b.per_source[3].rand, b.per_source[3].guess), (r(1, 2), r(1, 4)));
        assert_eq!((b.per_source[0].rand, b.per_source[0].guess), (Rational::one(), Rational::one()));
        let sedf = AmdCode::from_family(&constructions::two_set_sedf(3).unwrap()).unwrap();
        let b = strong_bounds(&sedf);
        assert_eq!((b.per_source[0].rand, b.per_source[0].guess), (r(1, 3), r(1, 3)));
        assert_eq!(b.uniform_product, Some(r(1, 9)));
    }

    #[test]
    fn classification() {
        let c = classify(&z10_code()).unwrap();
        assert!(c.weak_r);
        assert!(!classify(&gedf13_code()).unwrap().weak_r);
        let c = classify(&qr_code()).unwrap();
        assert!(c.strong_r);
        assert!(!c.strong_g);
        let c = classify(&ds_code()).unwrap();
        assert!(c.weak_r && c.weak_g);
        let single = classify(&equi(5, &[&[0, 1]])).unwrap();
        assert!(single.degenerate && !single.weak_r && !single.strong_g);
        assert_eq!(single.weak_optimum, Rational::zero());
    }

    #[test]
    fn codes_from_families() {
        let pedf = constructions::pedf_example_z13();
        let fc = code_from_family(&pedf, FamilyKind::Pedf, &VerifyOptions::default()).unwrap();
        assert_eq!(eval_weak_optimum(&fc.code).value, r(65, 72));
        let f = crate::group::FiniteField::prime(19).unwrap();
        let edf = constructions::tonchev_edf(19, 3, 3, &f).unwrap().family;
        let fc = code_from_family(&edf, FamilyKind::Edf, &VerifyOptions::default()).unwrap();
        assert_eq!(fc.code.regular_size(), Some(3));
        assert_eq!(eval_weak_optimum(&fc.code).value, r(1, 3));
        let fc = code_from_family(&constructions::qr_gsedf(), FamilyKind::Gsedf, &VerifyOptions::default()).unwrap();
        assert_eq!(fc.code, qr_code());
        let fc = code_from_family(&pedf, FamilyKind::Gedf, &VerifyOptions::default()).unwrap();
        assert!(fc.guaranteed.is_empty());
        assert!(matches!(
            code_from_family(&pedf, FamilyKind::Gsedf, &VerifyOptions::default()),
            Err(Error::WrongType(_))
        ));
        let ds = SetFamily::new(z(21), vec![[3, 6, 12, 7, 14].iter().map(|&x| e(x)).collect()]).unwrap();
        let fc = code_from_family(&ds, FamilyKind::Ds, &VerifyOptions::default()).unwrap();
        assert!(fc.code.is_deterministic());
        assert_eq!(fc.guaranteed, vec![Guarantee::WeakR, Guarantee::WeakG]);
    }

    #[test]
    fn families_from_codes() {
        let cf = family_from_code(&qr_code(), FamilyKind::Gsedf).unwrap();
        assert_eq!(cf.predicted.to_string(), "(7,4;1,1,1,4;1,1,1,2)-GSEDF");
        assert_eq!(family_from_code(&z10_code(), FamilyKind::Pedf), Err(Error::Precondition("not k-regular".into())));
        assert_eq!(family_from_code(&z10_code(), FamilyKind::Edf), Err(Error::Precondition("not k-regular".into())));
        let f = crate::group::FiniteField::prime(19).unwrap();
        let edf = constructions::tonchev_edf(19, 3, 3, &f).unwrap().family;
        let code = AmdCode::from_family(&edf).unwrap();
        let cf = family_from_code(&code, FamilyKind::Edf).unwrap();
        assert_eq!(cf.family, edf);
        assert_eq!(cf.predicted.to_string(), "(19,3,3,3)-EDF");
        assert_eq!(
            family_from_code(&qr_code(), FamilyKind::Bgsedf),
            Err(Error::Precondition("not strong G-optimal".into()))
        );
        let sedf = AmdCode::from_family(&constructions::two_set_sedf(3).unwrap()).unwrap();
        assert_eq!(family_from_code(&sedf, FamilyKind::Sedf).unwrap().predicted.to_string(), "(10,2,3,1)-SEDF");
        assert!(family_from_code(&sedf, FamilyKind::Bgsedf).is_ok());
    }

    #[test]
    fn simultaneous_optimality() {
        let sedf = AmdCode::from_family(&constructions::two_set_sedf(3).unwrap()).unwrap();
        let rep = check_simultaneous_optimality(&sedf).unwrap();
        assert!(rep.strong_simultaneous && rep.strong_product_equality);
        assert_eq!((rep.m, rep.n), (2, 10));
        let rep = check_simultaneous_optimality(&gedf13_code()).unwrap();
        assert!(!rep.weak_simultaneous);
        let rep = check_simultaneous_optimality(&ds_code()).unwrap();
        assert!(rep.weak_simultaneous && rep.edf_lambda_one);
    }
}
