//! Exhaustive backtracking search for families with prescribed parameters.
//!
//! Families are enumerated up to translation: the first set contains 0,
//! elements within a set increase, and sets that are interchangeable (same
//! size and same λ target) appear in increasing order of their minimum.
//! DF blocks may overlap, so each block is instead normalised to its least
//! translate and blocks are listed in non-decreasing order.
//!
//! Difference counts are maintained incrementally and a branch is cut as
//! soon as any count exceeds its cap. For the exact types the counting
//! identity then forces every count to equal λ once all sets are full.
//!
//! The tree is split at a fixed depth into subtrees that are merged in
//! order, so certificates do not depend on the number of worker threads.
//! A wall-clock limit is the one exception: where it strikes depends on
//! machine speed.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diffcore::SetFamily;
use crate::error::{Error, Result};
use crate::families::{self, FamilyKind, FamilyParameters, Lambdas, SizeClass, VerifyOptions};
use crate::group::{abelian_groups_of_order, FiniteAbelianGroup};

/// Number of element placements made before the tree is split.
const SPLIT_DEPTH: usize = 3;

/// Largest group order for which the subtraction table is precomputed.
const DIFF_TABLE_MAX: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Stop at the first solution in search order.
    First,
    /// Every solution up to equivalence.
    All,
    /// Count solutions up to equivalence without storing them.
    Count,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchSpec {
    pub group: FiniteAbelianGroup,
    pub target: FamilyParameters,
    pub mode: SearchMode,
    /// Maximum number of search nodes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_limit: Option<u64>,
    /// Wall-clock limit in seconds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<f64>,
    /// Worker threads; 0 uses the rayon default. Never affects results.
    #[serde(skip)]
    pub jobs: usize,
    /// Also identify families related by a multiplier `x ↦ u·x`.
    pub automorphisms: bool,
}

impl SearchSpec {
    pub fn new(group: FiniteAbelianGroup, target: FamilyParameters, mode: SearchMode) -> Self {
        SearchSpec { group, target, mode, node_limit: None, time_limit: None, jobs: 0, automorphisms: false }
    }

    /// SHA-256 over the group, target, mode and symmetry setting.
    pub fn hash(&self) -> String {
        let doc = serde_json::json!({
            "group": self.group,
            "target": self.target,
            "mode": self.mode,
            "automorphisms": self.automorphisms,
        });
        let digest = Sha256::digest(doc.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Found,
    ExhaustedNoSolution,
    BudgetExhausted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PruneStats {
    /// Placements rejected because a difference count exceeded its cap.
    pub cap: u64,
    /// DF blocks rejected as not the least translate or out of order.
    pub block_order: u64,
    /// Complete families rejected as non-canonical representatives.
    pub non_leader: u64,
}

impl PruneStats {
    fn add(&mut self, o: &PruneStats) {
        self.cap += o.cap;
        self.block_order += o.block_order;
        self.non_leader += o.non_leader;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchCertificate {
    pub spec_hash: String,
    pub spec: SearchSpec,
    pub outcome: Outcome,
    pub solution_count: u64,
    pub solutions: Vec<SetFamily>,
    pub nodes: u64,
    pub subtrees: usize,
    pub pruning: PruneStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Scheme {
    Internal,
    External,
    Outgoing,
    Incoming,
    Class,
}

struct Problem {
    group: FiniteAbelianGroup,
    n: usize,
    sizes: Vec<usize>,
    scheme: Scheme,
    disjoint: bool,
    /// Tracker of each set for the per-set and per-class schemes.
    tracker: Vec<usize>,
    caps: Vec<u32>,
    /// Previous position holding an interchangeable set.
    prev_same: Vec<Option<usize>>,
    /// Interchangeability class of each position.
    class_of: Vec<usize>,
    units: Vec<u64>,
    mode: SearchMode,
    node_limit: u64,
    deadline: Option<Instant>,
    /// `x - y` at `x * n + y`, for groups small enough to tabulate.
    diff: Option<Vec<u32>>,
}

#[derive(Clone)]
struct State {
    sets: Vec<Vec<usize>>,
    used: Vec<bool>,
    counts: Vec<u32>,
    cur: usize,
    depth: usize,
}

#[derive(Default)]
struct Run {
    nodes: u64,
    stats: PruneStats,
    solutions: Vec<Vec<Vec<usize>>>,
    count: u64,
    aborted: bool,
    budget: u64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
}

struct Shared<'a> {
    timed_out: &'a AtomicBool,
    /// Lowest subtree index that found a solution in first mode.
    first_found: &'a AtomicUsize,
    index: usize,
}

impl Problem {
    fn build(spec: &SearchSpec) -> Result<Problem> {
        let t = &spec.target;
        let n = spec.group.order();
        if t.n != n {
            return Err(Error::Parameter(format!("target order {} but group {} has order {n}", t.n, spec.group)));
        }
        let check = families::check_parameter_identity(t)?;
        if !check.holds {
            return Err(Error::Identity(
                check.violations().iter().map(|v| format!("{}: {} vs {}", v.description, v.lhs, v.rhs)).collect::<Vec<_>>().join("; "),
            ));
        }
        let m = t.m();
        let lams = t.lambda_list();
        let cap = |l: u64| u32::try_from(l).map_err(|_| Error::Parameter(format!("λ = {l} is too large")));
        let (scheme, caps, tracker, keys): (Scheme, Vec<u32>, Vec<usize>, Vec<u64>) = match t.kind {
            FamilyKind::Ds | FamilyKind::Df => (Scheme::Internal, vec![cap(lams[0])?], vec![0; m], vec![0; m]),
            FamilyKind::Edf | FamilyKind::Bedf | FamilyKind::Gedf => {
                (Scheme::External, vec![cap(lams[0])?], vec![0; m], vec![0; m])
            }
            FamilyKind::Sedf => (Scheme::Outgoing, vec![cap(lams[0])?; m], (0..m).collect(), vec![0; m]),
            FamilyKind::Gsedf | FamilyKind::Bgsedf => {
                let caps = lams.iter().map(|&l| cap(l)).collect::<Result<Vec<_>>>()?;
                let scheme = if t.kind == FamilyKind::Gsedf { Scheme::Outgoing } else { Scheme::Incoming };
                (scheme, caps, (0..m).collect(), lams.clone())
            }
            FamilyKind::Pedf => {
                let classes = pedf_classes(t)?;
                let tracker: Vec<usize> = t
                    .sizes
                    .iter()
                    .map(|k| classes.iter().position(|c| c.size == *k).expect("classes cover sizes"))
                    .collect();
                let caps = lams.iter().map(|&l| cap(l)).collect::<Result<Vec<_>>>()?;
                (Scheme::Class, caps, tracker, vec![0; m])
            }
        };
        if t.kind == FamilyKind::Ds && m != 1 {
            return Err(Error::Parameter("a DS has one set".into()));
        }
        let mut prev_same = vec![None; m];
        let mut class_of = vec![0; m];
        let mut class_keys: Vec<(usize, u64)> = Vec::new();
        for i in 0..m {
            let key = (t.sizes[i], keys[i]);
            prev_same[i] = (0..i).rev().find(|&j| (t.sizes[j], keys[j]) == key);
            class_of[i] = match class_keys.iter().position(|k| *k == key) {
                Some(c) => c,
                None => {
                    class_keys.push(key);
                    class_keys.len() - 1
                }
            };
        }
        let exp = spec.group.exponent();
        let units = if spec.automorphisms {
            (1..exp).filter(|&u| num_integer::gcd(u, exp) == 1).collect()
        } else {
            vec![1]
        };
        let deadline = spec.time_limit.map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0)));
        Ok(Problem {
            group: spec.group.clone(),
            n,
            sizes: t.sizes.clone(),
            scheme,
            disjoint: scheme != Scheme::Internal,
            tracker,
            caps,
            prev_same,
            class_of,
            units,
            mode: spec.mode,
            node_limit: spec.node_limit.unwrap_or(u64::MAX),
            deadline,
            diff: (n <= DIFF_TABLE_MAX).then(|| {
                let g = &spec.group;
                (0..n * n).map(|i| g.sub_index(i / n, i % n) as u32).collect()
            }),
        })
    }

    fn initial_state(&self) -> State {
        State {
            sets: vec![Vec::new(); self.sizes.len()],
            used: vec![false; self.n],
            counts: vec![0; self.caps.len() * self.n],
            cur: 0,
            depth: 0,
        }
    }

    /// Difference increments caused by putting `x` into set `i`.
    fn sub(&self, x: usize, y: usize) -> usize {
        match &self.diff {
            Some(t) => t[x * self.n + y] as usize,
            None => self.group.sub_index(x, y),
        }
    }

    fn increments(&self, st: &State, i: usize, x: usize, out: &mut Vec<usize>) {
        out.clear();
        let n = self.n;
        match self.scheme {
            Scheme::Internal => {
                for &y in &st.sets[i] {
                    out.push(self.sub(x, y));
                    out.push(self.sub(y, x));
                }
            }
            _ => {
                for (j, set) in st.sets.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let (tx, ty) = match self.scheme {
                        Scheme::External => (0, 0),
                        Scheme::Outgoing | Scheme::Class => (self.tracker[i], self.tracker[j]),
                        Scheme::Incoming => (self.tracker[j], self.tracker[i]),
                        Scheme::Internal => unreachable!(),
                    };
                    for &y in set {
                        out.push(tx * n + self.sub(x, y));
                        out.push(ty * n + self.sub(y, x));
                    }
                }
            }
        }
    }

    fn cap_of(&self, slot: usize) -> u32 {
        self.caps[slot / self.n]
    }

    fn place(&self, st: &mut State, i: usize, x: usize, buf: &mut Vec<usize>) -> bool {
        self.increments(st, i, x, buf);
        for (done, &slot) in buf.iter().enumerate() {
            st.counts[slot] += 1;
            if st.counts[slot] > self.cap_of(slot) {
                for &s in &buf[..=done] {
                    st.counts[s] -= 1;
                }
                return false;
            }
        }
        st.sets[i].push(x);
        st.used[x] = true;
        st.depth += 1;
        if st.sets[i].len() == self.sizes[i] {
            st.cur += 1;
        }
        true
    }

    fn unplace(&self, st: &mut State, i: usize, buf: &mut Vec<usize>) {
        if st.sets[i].len() == self.sizes[i] {
            st.cur -= 1;
        }
        let x = st.sets[i].pop().expect("placed element");
        if self.disjoint {
            st.used[x] = false;
        } else {
            st.used[x] = st.sets.iter().any(|s| s.contains(&x));
        }
        st.depth -= 1;
        self.increments(st, i, x, buf);
        for &slot in buf.iter() {
            st.counts[slot] -= 1;
        }
    }

    /// Candidate range for the next element of the current set.
    fn candidates(&self, st: &State) -> std::ops::Range<usize> {
        let i = st.cur;
        let set = &st.sets[i];
        let remaining = self.sizes[i] - set.len();
        let hi = self.n + 1 - remaining;
        let lo = match set.last() {
            Some(&last) => last + 1,
            None if i == 0 || self.scheme == Scheme::Internal => return 0..1.min(hi),
            None => match self.prev_same[i] {
                Some(p) => st.sets[p][0] + 1,
                None => 1,
            },
        };
        lo..hi.max(lo)
    }

    fn block_ok(&self, st: &State, i: usize) -> bool {
        let block = &st.sets[i];
        if least_translate(&self.group, block, 1) != *block {
            return false;
        }
        i == 0 || st.sets[i - 1] <= *block
    }

    fn complete(&self, st: &State) -> bool {
        st.cur == self.sizes.len()
    }

    /// Whether no transform gives a smaller representative. Only
    /// translations moving an element of a first-class set to 0 can.
    fn is_leader(&self, sets: &[Vec<usize>]) -> bool {
        if self.scheme == Scheme::Internal {
            return self.canonical_form(sets) == sets;
        }
        let g = &self.group;
        let mut cand: Vec<Vec<usize>> = sets.to_vec();
        for &u in &self.units {
            for (j, set) in sets.iter().enumerate() {
                if self.class_of[j] != self.class_of[0] {
                    continue;
                }
                for &y in set {
                    let t = g.neg_index(g.scale_index(y, u));
                    for (c, s) in cand.iter_mut().zip(sets) {
                        c.clear();
                        c.extend(s.iter().map(|&x| g.add_index(g.scale_index(x, u), t)));
                        c.sort_unstable();
                    }
                    self.normalize(&mut cand);
                    if cand.as_slice() < sets {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Least representative of the family under translations (and
    /// multipliers when enabled).
    fn canonical_form(&self, sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let g = &self.group;
        let mut best: Option<Vec<Vec<usize>>> = None;
        for &u in &self.units {
            let scaled: Vec<Vec<usize>> =
                sets.iter().map(|s| s.iter().map(|&x| g.scale_index(x, u)).collect()).collect();
            if self.scheme == Scheme::Internal {
                let mut blocks: Vec<Vec<usize>> = scaled.iter().map(|b| least_translate(g, b, 1)).collect();
                blocks.sort();
                if best.as_ref().is_none_or(|b| blocks < *b) {
                    best = Some(blocks);
                }
                continue;
            }
            for t in 0..self.n {
                let mut cand: Vec<Vec<usize>> = scaled
                    .iter()
                    .map(|s| {
                        let mut v: Vec<usize> = s.iter().map(|&x| g.add_index(x, t)).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect();
                self.normalize(&mut cand);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        best.expect("at least one transform")
    }

    /// Sort each interchangeability class by minimum element.
    fn normalize(&self, sets: &mut [Vec<usize>]) {
        let classes = self.class_of.iter().max().map_or(0, |c| c + 1);
        for c in 0..classes {
            let pos: Vec<usize> = (0..sets.len()).filter(|&i| self.class_of[i] == c).collect();
            let mut members: Vec<Vec<usize>> = pos.iter().map(|&i| std::mem::take(&mut sets[i])).collect();
            members.sort_by_key(|s| s[0]);
            for (&i, s) in pos.iter().zip(members) {
                sets[i] = s;
            }
        }
    }

    fn record(&self, st: &State, run: &mut Run) -> Flow {
        match self.mode {
            SearchMode::First => {
                run.count += 1;
                run.solutions.push(st.sets.clone());
                Flow::Stop
            }
            SearchMode::All | SearchMode::Count => {
                let leader = if self.scheme == Scheme::Internal && self.units.len() == 1 {
                    true
                } else {
                    self.is_leader(&st.sets)
                };
                if leader {
                    run.count += 1;
                    if self.mode == SearchMode::All {
                        run.solutions.push(st.sets.clone());
                    }
                } else {
                    run.stats.non_leader += 1;
                }
                Flow::Continue
            }
        }
    }

    /// Count a new node, or abort when a limit is reached.
    fn enter(&self, run: &mut Run, shared: &Shared) -> bool {
        if run.nodes >= run.budget {
            run.aborted = true;
            return false;
        }
        if run.nodes.is_multiple_of(4096) {
            if shared.timed_out.load(Ordering::Relaxed) {
                run.aborted = true;
                return false;
            }
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                shared.timed_out.store(true, Ordering::Relaxed);
                run.aborted = true;
                return false;
            }
            if self.mode == SearchMode::First && shared.first_found.load(Ordering::Relaxed) < shared.index {
                run.aborted = true;
                return false;
            }
        }
        run.nodes += 1;
        true
    }

    fn dfs(&self, st: &mut State, run: &mut Run, shared: &Shared, buf: &mut Vec<usize>) -> Flow {
        if self.complete(st) {
            return self.record(st, run);
        }
        let i = st.cur;
        for x in self.candidates(st) {
            if self.disjoint && st.used[x] {
                continue;
            }
            if !self.place(st, i, x, buf) {
                run.stats.cap += 1;
                continue;
            }
            if self.scheme == Scheme::Internal && st.sets[i].len() == self.sizes[i] && !self.block_ok(st, i) {
                run.stats.block_order += 1;
                self.unplace(st, i, buf);
                continue;
            }
            if !self.enter(run, shared) {
                self.unplace(st, i, buf);
                return Flow::Stop;
            }
            let flow = self.dfs(st, run, shared, buf);
            self.unplace(st, i, buf);
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    /// Enumerate states at the split depth (or complete families above it).
    fn frontier(&self, st: &mut State, out: &mut Vec<State>, stats: &mut PruneStats, nodes: &mut u64, buf: &mut Vec<usize>) {
        if st.depth == SPLIT_DEPTH || self.complete(st) {
            out.push(st.clone());
            return;
        }
        let i = st.cur;
        for x in self.candidates(st) {
            if self.disjoint && st.used[x] {
                continue;
            }
            if !self.place(st, i, x, buf) {
                stats.cap += 1;
                continue;
            }
            if self.scheme == Scheme::Internal && st.sets[i].len() == self.sizes[i] && !self.block_ok(st, i) {
                stats.block_order += 1;
                self.unplace(st, i, buf);
                continue;
            }
            *nodes += 1;
            self.frontier(st, out, stats, nodes, buf);
            self.unplace(st, i, buf);
        }
    }

    fn run_subtree(&self, start: &State, budget: u64, shared: &Shared) -> Run {
        let mut st = start.clone();
        let mut run = Run { budget, ..Default::default() };
        let mut buf = Vec::new();
        self.dfs(&mut st, &mut run, shared, &mut buf);
        run
    }
}

fn pedf_classes(t: &FamilyParameters) -> Result<Vec<SizeClass>> {
    let derived = families::size_classes(&t.sizes);
    if t.classes.is_empty() {
        return Ok(derived);
    }
    for c in &t.classes {
        let have = t.sizes.iter().filter(|&&k| k == c.size).count();
        if have != c.count {
            return Err(Error::ClassDefinition(format!(
                "class of size {} has {} sets in the size list, {} in the profile",
                c.size, have, c.count
            )));
        }
    }
    if t.classes.len() != derived.len() {
        return Err(Error::ClassDefinition("profile does not cover every size".into()));
    }
    Ok(t.classes.clone())
}

/// Lexicographically least sorted translate `u·B - b` over `b` in `u·B`.
fn least_translate(g: &FiniteAbelianGroup, block: &[usize], u: u64) -> Vec<usize> {
    let scaled: Vec<usize> = block.iter().map(|&x| g.scale_index(x, u)).collect();
    scaled
        .iter()
        .map(|&b| {
            let mut v: Vec<usize> = scaled.iter().map(|&x| g.sub_index(x, b)).collect();
            v.sort_unstable();
            v
        })
        .min()
        .expect("nonempty block")
}

fn verify_options(t: &FamilyParameters) -> Result<VerifyOptions> {
    Ok(match t.kind {
        FamilyKind::Bedf => VerifyOptions { lambda: t.single_lambda(), relax_sizes: true, ..Default::default() },
        FamilyKind::Bgsedf => VerifyOptions { lambdas: Some(t.lambda_list()), ..Default::default() },
        FamilyKind::Pedf => VerifyOptions { classes: Some(pedf_classes(t)?), ..Default::default() },
        FamilyKind::Df => VerifyOptions { relax_sizes: true, ..Default::default() },
        _ => VerifyOptions::default(),
    })
}

fn to_family(spec: &SearchSpec, sets: &[Vec<usize>]) -> Result<SetFamily> {
    let fam = if spec.target.kind == FamilyKind::Df {
        let blocks = sets.iter().map(|s| s.iter().map(|&i| spec.group.element_at(i)).collect()).collect();
        SetFamily::blocks(spec.group.clone(), blocks)?
    } else {
        SetFamily::from_indices(spec.group.clone(), sets)?
    };
    let report = families::verify(&fam, spec.target.kind, &verify_options(&spec.target)?)?;
    let agrees = report.passed()
        && (spec.target.kind.is_bounded()
            || report.witnessed.as_ref().map(|w| w.lambda_list()) == Some(spec.target.lambda_list()));
    if !agrees {
        return Err(Error::InternalConsistency(format!(
            "search produced a family that does not verify as {}",
            spec.target
        )));
    }
    Ok(fam)
}

/// Run the search described by `spec`.
pub fn search_family(spec: &SearchSpec) -> Result<SearchCertificate> {
    let problem = Problem::build(spec)?;
    let mut root = problem.initial_state();
    let mut buf = Vec::new();
    let mut stats = PruneStats::default();
    let mut prefix_nodes = 0u64;
    let mut frontier = Vec::new();
    problem.frontier(&mut root, &mut frontier, &mut stats, &mut prefix_nodes, &mut buf);

    let timed_out = AtomicBool::new(false);
    let first_found = AtomicUsize::new(usize::MAX);
    let budget = problem.node_limit;
    let prefix_over = prefix_nodes > budget;
    let remaining_after_prefix = budget.saturating_sub(prefix_nodes);

    let run_all = || -> Vec<Run> {
        frontier
            .par_iter()
            .enumerate()
            .map(|(index, st)| {
                let shared = Shared { timed_out: &timed_out, first_found: &first_found, index };
                let run = problem.run_subtree(st, remaining_after_prefix, &shared);
                if problem.mode == SearchMode::First && run.count > 0 {
                    first_found.fetch_min(index, Ordering::Relaxed);
                }
                run
            })
            .collect()
    };
    let runs = if prefix_over {
        Vec::new()
    } else if spec.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .map_err(|e| Error::Input(format!("thread pool: {e}")))?
            .install(run_all)
    } else {
        run_all()
    };

    // Replay the subtrees in order, as a single thread would.
    let mut nodes = prefix_nodes.min(budget);
    let mut aborted = prefix_over;
    let mut count = 0u64;
    let mut raw = Vec::new();
    for (index, run) in runs.into_iter().enumerate() {
        let remaining = budget - nodes;
        let run = if !run.aborted && run.nodes <= remaining {
            run
        } else if run.aborted && timed_out.load(Ordering::Relaxed) {
            aborted = true;
            run
        } else {
            let shared = Shared { timed_out: &timed_out, first_found: &AtomicUsize::new(usize::MAX), index };
            problem.run_subtree(&frontier[index], remaining, &shared)
        };
        nodes += run.nodes;
        stats.add(&run.stats);
        count += run.count;
        raw.extend(run.solutions);
        if run.aborted {
            aborted = true;
            break;
        }
        if problem.mode == SearchMode::First && count > 0 {
            break;
        }
    }

    let solutions = raw.iter().map(|s| to_family(spec, s)).collect::<Result<Vec<_>>>()?;
    let outcome = if aborted && !(problem.mode == SearchMode::First && count > 0) {
        Outcome::BudgetExhausted
    } else if count > 0 {
        Outcome::Found
    } else {
        Outcome::ExhaustedNoSolution
    };
    Ok(SearchCertificate {
        spec_hash: spec.hash(),
        spec: spec.clone(),
        outcome,
        solution_count: count,
        solutions,
        nodes,
        subtrees: frontier.len(),
        pruning: stats,
    })
}

/// First-solution search whose certificate either exhibits a family or
/// records that the canonical tree was traversed without finding one.
pub fn certify_nonexistence(spec: &SearchSpec) -> Result<SearchCertificate> {
    let mut s = spec.clone();
    s.mode = SearchMode::First;
    search_family(&s)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub lambda: u64,
    pub group: String,
    pub outcome: Outcome,
    pub nodes: u64,
    pub spec_hash: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepExclusion {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub n_max: usize,
    pub rows: Vec<SweepRow>,
    pub excluded: Vec<SweepExclusion>,
}

/// Search every abelian group of order `n <= n_max` for SEDFs with
/// `m >= 3` and `k >= 2` whose parameters pass the counting identity.
pub fn sweep_sedf_open_problem(n_max: usize, node_limit: Option<u64>, jobs: usize) -> Result<SweepReport> {
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for n in 2..=n_max {
        for m in 3..=n / 2 {
            for k in 2..=n / m {
                let num = (k * k * (m - 1)) as u64;
                if !num.is_multiple_of(n as u64 - 1) {
                    excluded.push(SweepExclusion {
                        n,
                        m,
                        k,
                        reason: format!("λ = k²(m-1)/(n-1) = {num}/{} is not an integer", n - 1),
                    });
                    continue;
                }
                let lambda = num / (n as u64 - 1);
                let target = FamilyParameters::with_sizes(FamilyKind::Sedf, n, vec![k; m], Lambdas::Single(lambda));
                for group in abelian_groups_of_order(n as u64)? {
                    let mut spec = SearchSpec::new(group.clone(), target.clone(), SearchMode::First);
                    spec.node_limit = node_limit;
                    spec.jobs = jobs;
                    let cert = certify_nonexistence(&spec)?;
                    rows.push(SweepRow {
                        n,
                        m,
                        k,
                        lambda,
                        group: group.name(),
                        outcome: cert.outcome,
                        nodes: cert.nodes,
                        spec_hash: cert.spec_hash,
                    });
                }
            }
        }
    }
    Ok(SweepReport { n_max, rows, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    fn ints(f: &SetFamily) -> Vec<Vec<u32>> {
        f.sets().iter().map(|s| s.iter().map(|e| e.coords()[0]).collect()).collect()
    }

    #[test]
    fn finds_planar_difference_set() {
        let target = FamilyParameters::uniform(FamilyKind::Ds, 21, 1, 5, 1);
        let cert = search_family(&SearchSpec::new(z(21), target.clone(), SearchMode::First)).unwrap();
        assert_eq!(cert.outcome, Outcome::Found);
        let spec = SearchSpec::new(z(21), target, SearchMode::All);
        let cert = search_family(&spec).unwrap();
        let p = Problem::build(&spec).unwrap();
        let canon = p.canonical_form(&[vec![3, 6, 7, 12, 14]]);
        assert!(cert.solutions.iter().any(|s| s.index_sets() == canon.as_slice()));
    }

    #[test]
    fn finds_coset_edf() {
        let target = FamilyParameters::uniform(FamilyKind::Edf, 19, 3, 3, 3);
        let mut spec = SearchSpec::new(z(19), target, SearchMode::All);
        spec.automorphisms = true;
        let cert = search_family(&spec).unwrap();
        assert_eq!(cert.outcome, Outcome::Found);
        let f = crate::group::FiniteField::prime(19).unwrap();
        let known = crate::constructions::tonchev_edf(19, 3, 3, &f).unwrap().family;
        let p = Problem::build(&spec).unwrap();
        let canon = p.canonical_form(known.index_sets());
        assert!(cert.solutions.iter().any(|s| s.index_sets() == canon.as_slice()));
    }

    #[test]
    fn infeasible_identity_is_rejected() {
        let target = FamilyParameters::uniform(FamilyKind::Edf, 5, 2, 2, 1);
        let err = search_family(&SearchSpec::new(z(5), target, SearchMode::First)).unwrap_err();
        assert!(matches!(err, Error::Identity(_)));
    }

    #[test]
    fn sedf_existence_and_nonexistence() {
        let target = FamilyParameters::uniform(FamilyKind::Sedf, 9, 3, 2, 1);
        for group in [z(9), FiniteAbelianGroup::product(&[3, 3]).unwrap()] {
            let cert = certify_nonexistence(&SearchSpec::new(group, target.clone(), SearchMode::First)).unwrap();
            assert_eq!(cert.outcome, Outcome::ExhaustedNoSolution);
        }
        let target = FamilyParameters::uniform(FamilyKind::Sedf, 10, 2, 3, 1);
        let cert = certify_nonexistence(&SearchSpec::new(z(10), target, SearchMode::First)).unwrap();
        assert_eq!(cert.outcome, Outcome::Found);
    }

    #[test]
    fn all_mode_counts_translation_classes() {
        // Oracle: brute force over 2-subsets pairs of Z_5 for (5,2,2,2)-EDFs,
        // counted up to translation.
        let mut classes = std::collections::BTreeSet::new();
        for a in 0..5u32 {
            for b in a + 1..5 {
                for c in 0..5u32 {
                    for d in c + 1..5 {
                        let (s1, s2) = (vec![a, b], vec![c, d]);
                        if s1.iter().any(|x| s2.contains(x)) {
                            continue;
                        }
                        let mut cnt = [0; 5];
                        for x in &s1 {
                            for y in &s2 {
                                cnt[((x + 5 - y) % 5) as usize] += 1;
                                cnt[((y + 5 - x) % 5) as usize] += 1;
                            }
                        }
                        if cnt[1..].iter().all(|&c| c == 2) {
                            let canon = (0..5)
                                .map(|t| {
                                    let mut p: Vec<Vec<u32>> = [&s1, &s2]
                                        .iter()
                                        .map(|s| {
                                            let mut v: Vec<u32> = s.iter().map(|x| (x + t) % 5).collect();
                                            v.sort();
                                            v
                                        })
                                        .collect();
                                    p.sort();
                                    p
                                })
                                .min()
                                .unwrap();
                            classes.insert(canon);
                        }
                    }
                }
            }
        }
        let target = FamilyParameters::uniform(FamilyKind::Edf, 5, 2, 2, 2);
        let cert = search_family(&SearchSpec::new(z(5), target.clone(), SearchMode::All)).unwrap();
        assert_eq!(cert.solution_count as usize, classes.len());
        let found: std::collections::BTreeSet<Vec<Vec<u32>>> = cert.solutions.iter().map(ints).collect();
        assert_eq!(found, classes);
        let cert = search_family(&SearchSpec::new(z(5), target, SearchMode::Count)).unwrap();
        assert_eq!(cert.solution_count as usize, classes.len());
        assert!(cert.solutions.is_empty());
    }

    #[test]
    fn difference_family_blocks() {
        let target = FamilyParameters::uniform(FamilyKind::Df, 13, 2, 3, 1);
        let cert = search_family(&SearchSpec::new(z(13), target, SearchMode::All)).unwrap();
        assert_eq!(cert.outcome, Outcome::Found);
        for s in &cert.solutions {
            assert!(families::verify_df(s, true).unwrap().passed());
        }
    }

    #[test]
    fn results_do_not_depend_on_jobs() {
        let target = FamilyParameters::uniform(FamilyKind::Edf, 19, 3, 3, 3);
        type Snapshot = (u64, u64, Vec<Vec<Vec<u32>>>);
        let mut base: Option<Snapshot> = None;
        for jobs in [1, 2, 4] {
            for limit in [None, Some(500)] {
                let mut spec = SearchSpec::new(z(19), target.clone(), SearchMode::All);
                spec.jobs = jobs;
                spec.node_limit = limit;
                let cert = search_family(&spec).unwrap();
                let key = (cert.nodes, cert.solution_count, cert.solutions.iter().map(ints).collect());
                if limit.is_none() {
                    match &base {
                        None => base = Some(key),
                        Some(b) => assert_eq!(*b, key),
                    }
                } else {
                    assert_eq!(cert.outcome, Outcome::BudgetExhausted);
                    assert_eq!(cert.nodes, 500);
                }
            }
        }
    }

    #[test]
    fn node_budget_is_a_separate_outcome() {
        let target = FamilyParameters::uniform(FamilyKind::Sedf, 9, 3, 2, 1);
        let mut spec = SearchSpec::new(z(9), target, SearchMode::First);
        spec.node_limit = Some(3);
        let cert = search_family(&spec).unwrap();
        assert_eq!(cert.outcome, Outcome::BudgetExhausted);
        assert!(cert.nodes <= 3);
    }

    #[test]
    fn small_sweep_has_no_solutions() {
        let rep = sweep_sedf_open_problem(10, None, 0).unwrap();
        assert!(rep.rows.iter().any(|r| (r.n, r.m, r.k, r.lambda) == (9, 3, 2, 1)));
        assert!(rep.rows.iter().all(|r| r.outcome == Outcome::ExhaustedNoSolution));
        assert!(!rep.excluded.is_empty());
    }
}
