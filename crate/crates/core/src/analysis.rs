//! Necessary-condition battery for polynomial consensus protocols.
//!
//! Every check is a pure function of the protocol. [`run_all`] aggregates them
//! into a [`CheckReport`]; the overall verdict is "impossible" exactly when a
//! check marked necessary fails. Checks marked informational (strong
//! connectivity, the diagonal-equilibrium hypothesis, the component-count
//! estimate) are reported but never decide the verdict on their own.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::depgraph::{
    build_dependency_graph, has_directed_spanning_tree, is_strongly_connected,
    path_equivalence_classes,
};
use crate::groebner::{buchberger, elimination_ideal, sum_ideal, GroebnerBasis, Ideal};
use crate::polyring::{MonomialOrder, Polynomial};
use crate::protocol::{DiagonalIdeal, Protocol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    SupportCondition,
    ZeroPolynomialCondition,
    ConsensusVarietyCondition,
    DiagonalEquilibrium,
    EliminationSpanningTree,
    ComponentCountEstimate,
    GraphSpanningTree,
    GraphStrongConnectivity,
}

impl CheckName {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::SupportCondition => "support_condition",
            CheckName::ZeroPolynomialCondition => "zero_polynomial_condition",
            CheckName::ConsensusVarietyCondition => "consensus_variety_condition",
            CheckName::DiagonalEquilibrium => "diagonal_equilibrium",
            CheckName::EliminationSpanningTree => "elimination_spanning_tree",
            CheckName::ComponentCountEstimate => "component_count_estimate",
            CheckName::GraphSpanningTree => "graph_spanning_tree",
            CheckName::GraphStrongConnectivity => "graph_strong_connectivity",
        }
    }

    /// Whether a failure of this check rules out consensus.
    pub fn is_necessary(self) -> bool {
        !matches!(
            self,
            CheckName::DiagonalEquilibrium
                | CheckName::ComponentCountEstimate
                | CheckName::GraphStrongConnectivity
        )
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Variables missing from every support; empty on pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportCheck {
    pub verdict: Verdict,
    pub missing: Vec<usize>,
}

pub fn check_support_condition(p: &Protocol) -> SupportCheck {
    let covered: BTreeSet<usize> = p.polys().iter().flat_map(Polynomial::support).collect();
    let missing: Vec<usize> = (0..p.n()).filter(|v| !covered.contains(v)).collect();
    SupportCheck {
        verdict: Verdict::from_bool(missing.is_empty()),
        missing,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroPolynomialCheck {
    pub verdict: Verdict,
    pub zero_indices: Vec<usize>,
}

pub fn check_zero_polynomials(p: &Protocol) -> ZeroPolynomialCheck {
    let zero_indices: Vec<usize> = p
        .polys()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_zero())
        .map(|(i, _)| i)
        .collect();
    ZeroPolynomialCheck {
        verdict: Verdict::from_bool(zero_indices.len() <= 1),
        zero_indices,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietyCheck {
    pub verdict: Verdict,
    /// Reduced lex basis of `I + J`; absent when not applicable.
    pub basis: Option<GroebnerBasis>,
    /// Pass may only reflect the consensus at the origin: no `fᵢ` has a
    /// constant term.
    pub trivial_consensus_possible: bool,
}

pub fn check_consensus_variety(p: &Protocol) -> VarietyCheck {
    if p.n() < 2 {
        return VarietyCheck {
            verdict: Verdict::NotApplicable,
            basis: None,
            trivial_consensus_possible: false,
        };
    }
    let j = DiagonalIdeal::new(p.ring());
    let sum = sum_ideal(&p.ideal(), j.ideal()).expect("same ring");
    let basis = buchberger(&sum, &MonomialOrder::Lex);
    let empty = basis.is_unit();
    let trivial = p.polys().iter().all(|f| f.constant_term() == crate::polyring::int(0));
    VarietyCheck {
        verdict: Verdict::from_bool(!empty),
        basis: Some(basis),
        trivial_consensus_possible: !empty && trivial,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalCheck {
    pub verdict: Verdict,
    /// Indices whose right-hand side does not vanish on the diagonal.
    pub failing: Vec<usize>,
    /// `fᵢ(t, …, t)` for each failing index.
    pub diagonals: Vec<Polynomial>,
    /// Membership of each `fᵢ` in `J`, computed independently by reduction.
    pub membership_agrees: bool,
}

pub fn check_diagonal_equilibrium(p: &Protocol) -> DiagonalCheck {
    let j_basis = buchberger(DiagonalIdeal::new(p.ring()).ideal(), &MonomialOrder::Lex);
    let mut failing = Vec::new();
    let mut diagonals = Vec::new();
    let mut agrees = true;
    for (i, f) in p.polys().iter().enumerate() {
        let d = f.substitute_diagonal();
        let vanishes = d.is_zero();
        let member = j_basis.contains(f).expect("same ring");
        agrees &= vanishes == member;
        if !vanishes {
            failing.push(i);
            diagonals.push(d);
        }
    }
    DiagonalCheck {
        verdict: Verdict::from_bool(failing.is_empty()),
        failing,
        diagonals,
        membership_agrees: agrees,
    }
}

/// Memoised zero-test for elimination ideals of one protocol, keyed by the
/// kept variable set.
struct EliminationSweep {
    ideal: Ideal,
    cache: Mutex<HashMap<Vec<usize>, bool>>,
}

impl EliminationSweep {
    fn new(p: &Protocol) -> Self {
        EliminationSweep {
            ideal: p.ideal(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// True when `I ∩ k[keep]` is the zero ideal.
    fn is_zero(&self, keep: &[usize]) -> bool {
        if let Some(&hit) = self.cache.lock().expect("cache lock").get(keep) {
            return hit;
        }
        let set: BTreeSet<usize> = keep.iter().copied().collect();
        let zero = elimination_ideal(&self.ideal, &set)
            .expect("kept set is a nonempty proper subset")
            .is_empty();
        self.cache
            .lock()
            .expect("cache lock")
            .insert(keep.to_vec(), zero);
        zero
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationCheck {
    pub verdict: Verdict,
    /// Kept pairs `{a, b}` whose elimination ideal is zero.
    pub zero_pairs: Vec<(usize, usize)>,
    pub reason: Option<String>,
}

fn elimination_precondition(p: &Protocol) -> Option<String> {
    if p.n() < 3 {
        return Some(format!("needs at least 3 agents, protocol has {}", p.n()));
    }
    if check_diagonal_equilibrium(p).verdict != Verdict::Pass {
        return Some("the diagonal is not an equilibrium set, so the elimination criterion does not apply".into());
    }
    None
}

pub fn check_elimination_spanning_tree(p: &Protocol) -> EliminationCheck {
    elimination_check(p, &EliminationSweep::new(p), elimination_precondition(p))
}

fn elimination_check(p: &Protocol, sweep: &EliminationSweep, blocked: Option<String>) -> EliminationCheck {
    if let Some(reason) = blocked {
        return EliminationCheck {
            verdict: Verdict::NotApplicable,
            zero_pairs: Vec::new(),
            reason: Some(reason),
        };
    }
    let n = p.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let zero_pairs: Vec<(usize, usize)> = pairs
        .par_iter()
        .filter(|&&(a, b)| sweep.is_zero(&[a, b]))
        .copied()
        .collect();
    EliminationCheck {
        verdict: Verdict::from_bool(zero_pairs.is_empty()),
        zero_pairs,
        reason: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentEstimate {
    pub verdict: Verdict,
    /// Smallest number of eliminated variables giving a zero elimination ideal.
    pub l: Option<usize>,
    /// `N − l`, or 1 when no subset eliminates to zero.
    pub estimate: Option<usize>,
    /// The first eliminated subset (lexicographic) attaining `l`.
    pub eliminated: Vec<usize>,
    pub reason: Option<String>,
}

/// Tuning knobs for the check battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Largest `N` for which the exhaustive subset sweep of the component-count
    /// estimate runs.
    pub max_sweep_n: usize,
    pub record_timing: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_sweep_n: 8,
            record_timing: false,
        }
    }
}

pub fn estimate_component_count(p: &Protocol) -> ComponentEstimate {
    component_estimate(p, &EliminationSweep::new(p), elimination_precondition(p), usize::MAX)
}

fn component_estimate(
    p: &Protocol,
    sweep: &EliminationSweep,
    blocked: Option<String>,
    max_sweep_n: usize,
) -> ComponentEstimate {
    let n = p.n();
    let blocked = blocked.or_else(|| {
        (n > max_sweep_n).then(|| format!("subset sweep skipped: N = {n} exceeds the cap of {max_sweep_n}"))
    });
    if let Some(reason) = blocked {
        return ComponentEstimate {
            verdict: Verdict::NotApplicable,
            l: None,
            estimate: None,
            eliminated: Vec::new(),
            reason: Some(reason),
        };
    }
    for l in 1..n {
        let subsets = combinations(n, l);
        let found: Vec<bool> = subsets
            .par_iter()
            .map(|elim| {
                let keep: Vec<usize> = (0..n).filter(|v| !elim.contains(v)).collect();
                sweep.is_zero(&keep)
            })
            .collect();
        if let Some(k) = found.iter().position(|&z| z) {
            let estimate = n - l;
            return ComponentEstimate {
                verdict: Verdict::from_bool(estimate == 1),
                l: Some(l),
                estimate: Some(estimate),
                eliminated: subsets[k].clone(),
                reason: None,
            };
        }
    }
    ComponentEstimate {
        verdict: Verdict::Pass,
        l: None,
        estimate: Some(1),
        eliminated: Vec::new(),
        reason: None,
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

/// One line of the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: CheckName,
    pub verdict: Verdict,
    pub necessary: bool,
    pub summary: String,
    /// Rendered polynomials or index sets backing the verdict.
    pub witness: Vec<String>,
    pub notes: Vec<String>,
    pub elapsed_us: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overall {
    Impossible,
    NecessaryConditionsSatisfied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub edges: Vec<(usize, usize)>,
    pub classes: Vec<Vec<usize>>,
    pub maximal_classes: usize,
    pub strongly_connected: bool,
    pub spanning_tree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub agents: usize,
    pub variables: Vec<String>,
    pub checks: Vec<CheckResult>,
    /// 1-based edges and classes of the dependency graph.
    pub graph: GraphSummary,
    /// `N − l` from the elimination sweep, next to the graph's own count.
    pub algebraic_component_estimate: Option<usize>,
    pub overall: Overall,
    pub reasons: Vec<CheckName>,
}

impl CheckReport {
    pub fn check(&self, name: CheckName) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn is_impossible(&self) -> bool {
        self.overall == Overall::Impossible
    }

    pub fn overall_text(&self) -> String {
        match self.overall {
            Overall::Impossible => {
                let reasons: Vec<&str> = self.reasons.iter().map(|r| r.as_str()).collect();
                format!("consensus impossible ({})", reasons.join(", "))
            }
            Overall::NecessaryConditionsSatisfied => {
                "necessary conditions satisfied (not a proof of consensus)".to_string()
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serialises");
        v["overall_text"] = serde_json::Value::String(self.overall_text());
        v
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "protocol: {} agents over [{}]", self.agents, self.variables.join(", "))?;
        for c in &self.checks {
            let tag = if c.necessary { "" } else { " (informational)" };
            write!(f, "[{}] {}{}: {}", c.verdict, c.name, tag, c.summary)?;
            if let Some(us) = c.elapsed_us {
                write!(f, " [{us} us]")?;
            }
            writeln!(f)?;
            for w in &c.witness {
                writeln!(f, "    {w}")?;
            }
            for n in &c.notes {
                writeln!(f, "    note: {n}")?;
            }
        }
        let estimate = self
            .algebraic_component_estimate
            .map_or_else(|| "n/a".to_string(), |e| e.to_string());
        writeln!(
            f,
            "maximal classes: graph {}, elimination estimate {}",
            self.graph.maximal_classes, estimate
        )?;
        writeln!(f, "overall: {}", self.overall_text())
    }
}

fn names(p: &Protocol, vars: &[usize]) -> String {
    vars.iter()
        .map(|&v| p.ring().name(v))
        .collect::<Vec<_>>()
        .join(", ")
}

fn timed<T>(record: bool, f: impl FnOnce() -> T) -> (T, Option<u64>) {
    let start = Instant::now();
    let out = f();
    let elapsed = record.then(|| u64::try_from(start.elapsed().as_micros()).unwrap_or(u64::MAX));
    (out, elapsed)
}

fn result(name: CheckName, verdict: Verdict, summary: String, elapsed_us: Option<u64>) -> CheckResult {
    CheckResult {
        name,
        verdict,
        necessary: name.is_necessary(),
        summary,
        witness: Vec::new(),
        notes: Vec::new(),
        elapsed_us,
    }
}

pub fn run_all(p: &Protocol) -> CheckReport {
    run_all_with(p, &CheckOptions::default())
}

pub fn run_all_with(p: &Protocol, opts: &CheckOptions) -> CheckReport {
    let rec = opts.record_timing;
    let mut checks = Vec::new();

    let (support, t) = timed(rec, || check_support_condition(p));
    let summary = if support.missing.is_empty() {
        "every variable occurs in some right-hand side".to_string()
    } else {
        format!("isolated variables: {}", names(p, &support.missing))
    };
    checks.push(result(CheckName::SupportCondition, support.verdict, summary, t));

    let (zeros, t) = timed(rec, || check_zero_polynomials(p));
    let idx: Vec<String> = zeros.zero_indices.iter().map(|i| format!("f{}", i + 1)).collect();
    let summary = if idx.is_empty() {
        "no zero right-hand sides".to_string()
    } else {
        format!("zero right-hand sides: {}", idx.join(", "))
    };
    checks.push(result(CheckName::ZeroPolynomialCondition, zeros.verdict, summary, t));

    let (variety, t) = timed(rec, || check_consensus_variety(p));
    let mut r = match &variety.basis {
        None => result(
            CheckName::ConsensusVarietyCondition,
            variety.verdict,
            "needs at least 2 agents".into(),
            t,
        ),
        Some(gb) if gb.is_unit() => result(
            CheckName::ConsensusVarietyCondition,
            variety.verdict,
            "reduced basis of I + J is {1}: no consensus point exists".into(),
            t,
        ),
        Some(_) => result(
            CheckName::ConsensusVarietyCondition,
            variety.verdict,
            "V(I + J) is nonempty".into(),
            t,
        ),
    };
    if let Some(gb) = &variety.basis {
        r.witness = gb.elements().iter().map(|g| g.display_with(gb.order()).to_string()).collect();
        r.notes.push("emptiness is decided over the complex numbers; a nonempty complex variety need not contain real points".into());
    }
    if variety.trivial_consensus_possible {
        r.notes.push("no right-hand side has a constant term: this may be trivial consensus at the origin".into());
    }
    checks.push(r);

    let (diag, t) = timed(rec, || check_diagonal_equilibrium(p));
    let summary = if diag.failing.is_empty() {
        "every point of the diagonal is an equilibrium".to_string()
    } else {
        let idx: Vec<String> = diag.failing.iter().map(|i| format!("f{}", i + 1)).collect();
        format!("nonzero on the diagonal: {}", idx.join(", "))
    };
    let mut r = result(CheckName::DiagonalEquilibrium, diag.verdict, summary, t);
    r.witness = diag
        .failing
        .iter()
        .zip(&diag.diagonals)
        .map(|(i, d)| format!("f{}(t, ..., t) = {d}", i + 1))
        .collect();
    if !diag.membership_agrees {
        r.notes.push("internal inconsistency: diagonal substitution and membership in J disagree".into());
    }
    checks.push(r);

    let blocked = elimination_precondition(p);
    let sweep = EliminationSweep::new(p);
    let (elim, t) = timed(rec, || elimination_check(p, &sweep, blocked.clone()));
    let summary = match (&elim.reason, elim.zero_pairs.is_empty()) {
        (Some(reason), _) => reason.clone(),
        (None, true) => "every pair of variables survives elimination of the others".into(),
        (None, false) => format!("{} kept pair(s) with zero elimination ideal", elim.zero_pairs.len()),
    };
    let mut r = result(CheckName::EliminationSpanningTree, elim.verdict, summary, t);
    r.witness = elim
        .zero_pairs
        .iter()
        .map(|&(a, b)| format!("{{{}}}: elimination ideal is zero", names(p, &[a, b])))
        .collect();
    checks.push(r);

    let (est, t) = timed(rec, || component_estimate(p, &sweep, blocked, opts.max_sweep_n));
    let summary = match (&est.reason, est.l, est.estimate) {
        (Some(reason), _, _) => reason.clone(),
        (None, Some(l), Some(e)) => format!("l = {l}, estimate N - l = {e}"),
        (None, None, Some(e)) => format!("no subset eliminates to zero; estimate {e}"),
        _ => "no estimate".into(),
    };
    let mut r = result(CheckName::ComponentCountEstimate, est.verdict, summary, t);
    if !est.eliminated.is_empty() {
        r.witness.push(format!("eliminated {{{}}}", names(p, &est.eliminated)));
    }
    checks.push(r);

    let (graph, t) = timed(rec, || {
        let g = build_dependency_graph(p);
        let part = path_equivalence_classes(&g);
        GraphSummary {
            edges: g.edges().iter().map(|&(i, j)| (i + 1, j + 1)).collect(),
            classes: part
                .classes()
                .iter()
                .map(|c| c.iter().map(|v| v + 1).collect())
                .collect(),
            maximal_classes: part.maximal_count(),
            strongly_connected: is_strongly_connected(&g),
            spanning_tree: has_directed_spanning_tree(&g),
        }
    });
    let mut r = result(
        CheckName::GraphSpanningTree,
        Verdict::from_bool(graph.spanning_tree),
        format!("{} maximal path-equivalence class(es)", graph.maximal_classes),
        t,
    );
    r.witness = vec![format!("classes {:?}", graph.classes)];
    checks.push(r);
    let mut r = result(
        CheckName::GraphStrongConnectivity,
        Verdict::from_bool(graph.strongly_connected),
        format!("{} path-equivalence class(es)", graph.classes.len()),
        None,
    );
    r.notes.push("strong connectivity is not required for consensus".into());
    checks.push(r);

    let reasons: Vec<CheckName> = checks
        .iter()
        .filter(|c| c.necessary && c.verdict == Verdict::Fail)
        .map(|c| c.name)
        .collect();
    let overall = if reasons.is_empty() {
        Overall::NecessaryConditionsSatisfied
    } else {
        Overall::Impossible
    };
    CheckReport {
        agents: p.n(),
        variables: p.ring().names().to_vec(),
        checks,
        graph,
        algebraic_component_estimate: est.estimate,
        overall,
        reasons,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depgraph::{generate_protocol, DependencyGraph, ProtocolKind};
    use crate::polyring::{int, Ring};

    fn tree5() -> DependencyGraph {
        let e = [(2, 1), (5, 1), (1, 2), (3, 2), (4, 2), (2, 4), (1, 5), (3, 5)];
        DependencyGraph::new(5, e.iter().map(|&(i, j)| (i - 1, j - 1))).unwrap()
    }

    fn bias() -> Protocol {
        let r = Ring::indexed("x", 3);
        let v = |i| r.var(i);
        Protocol::new(
            r.clone(),
            vec![
                &(&v(0) + &v(1)) + &r.one(),
                &(&v(0) + &v(2)) + &crate::polyring::Polynomial::constant(&r, int(3)),
                &v(1) - &v(2),
            ],
        )
        .unwrap()
    }

    fn two_roots() -> Protocol {
        let r = Ring::indexed("x", 4);
        let v = |i| r.var(i);
        let f4 = &(&(&v(0) * &v(1)) * &v(2)) - &(&(&v(3) * &v(3)) * &v(3));
        Protocol::new(r.clone(), vec![&v(1) - &v(0), &v(0) - &v(1), r.zero(), f4]).unwrap()
    }

    fn pair_chain() -> Protocol {
        let r = Ring::indexed("x", 3);
        let v = |i| r.var(i);
        Protocol::new(r.clone(), vec![&v(1) - &v(0), &v(0) - &v(1), &v(1) - &v(2)]).unwrap()
    }

    #[test]
    fn support_examples() {
        let lin = generate_protocol(&tree5(), ProtocolKind::Linear);
        assert_eq!(check_support_condition(&lin).verdict, Verdict::Pass);
        let r = Ring::indexed("x", 3);
        let p = Protocol::new(r.clone(), vec![&r.var(1) - &r.var(0), &r.var(0) - &r.var(1), r.zero()]).unwrap();
        let c = check_support_condition(&p);
        assert_eq!((c.verdict, c.missing), (Verdict::Fail, vec![2]));
        let r1 = Ring::indexed("x", 1);
        let single = Protocol::new(r1.clone(), vec![r1.var(0)]).unwrap();
        assert_eq!(check_support_condition(&single).verdict, Verdict::Pass);
    }

    #[test]
    fn zero_polynomial_examples() {
        let lin = generate_protocol(&tree5(), ProtocolKind::Linear);
        assert_eq!(check_zero_polynomials(&lin).verdict, Verdict::Pass);
        let r = Ring::indexed("x", 3);
        let p = Protocol::new(r.clone(), vec![r.zero(), r.zero(), &r.var(0) - &r.var(2)]).unwrap();
        let c = check_zero_polynomials(&p);
        assert_eq!((c.verdict, c.zero_indices), (Verdict::Fail, vec![0, 1]));
        assert_eq!(check_zero_polynomials(&pair_chain()).verdict, Verdict::Pass);
    }

    #[test]
    fn variety_examples() {
        let c = check_consensus_variety(&bias());
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(c.basis.unwrap().is_unit());

        let c = check_consensus_variety(&generate_protocol(&tree5(), ProtocolKind::Linear));
        assert_eq!(c.verdict, Verdict::Pass);
        let shown: Vec<String> = c.basis.unwrap().elements().iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["x1 - x5", "x2 - x5", "x3 - x5", "x4 - x5"]);
        assert!(c.trivial_consensus_possible);

        let r = Ring::indexed("x", 2);
        let p = Protocol::new(r.clone(), vec![&r.var(1) - &r.var(0), &r.var(0) - &r.var(1)]).unwrap();
        assert_eq!(check_consensus_variety(&p).verdict, Verdict::Pass);
    }

    #[test]
    fn diagonal_examples() {
        for kind in [ProtocolKind::Squared, ProtocolKind::Product] {
            let c = check_diagonal_equilibrium(&generate_protocol(&tree5(), kind));
            assert_eq!(c.verdict, Verdict::Pass);
            assert!(c.membership_agrees);
        }
        let c = check_diagonal_equilibrium(&bias());
        assert_eq!(c.verdict, Verdict::Fail);
        assert_eq!(c.failing, vec![0, 1]);
        let shown: Vec<String> = c.diagonals.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["2*t + 1", "2*t + 3"]);
        assert!(c.membership_agrees);
    }

    #[test]
    fn elimination_examples() {
        let c = check_elimination_spanning_tree(&two_roots());
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(c.zero_pairs.contains(&(2, 3)));
        assert!(!c.zero_pairs.contains(&(0, 1)));

        let lin = generate_protocol(&tree5(), ProtocolKind::Linear);
        assert_eq!(check_elimination_spanning_tree(&lin).verdict, Verdict::Pass);
        assert_eq!(check_elimination_spanning_tree(&pair_chain()).verdict, Verdict::Pass);

        let c = check_elimination_spanning_tree(&bias());
        assert_eq!(c.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn component_examples() {
        let e = estimate_component_count(&two_roots());
        assert_eq!((e.l, e.estimate), (Some(2), Some(2)));
        let lin = generate_protocol(&tree5(), ProtocolKind::Linear);
        assert_eq!(estimate_component_count(&lin).estimate, Some(1));

        let r = Ring::indexed("x", 2);
        let degenerate = Protocol::new(r.clone(), vec![r.zero(), &r.var(1) - &r.var(1)]).unwrap();
        assert_eq!(estimate_component_count(&degenerate).verdict, Verdict::NotApplicable);
    }

    #[test]
    fn run_all_examples() {
        let rep = run_all(&bias());
        assert!(rep.is_impossible());
        assert_eq!(rep.reasons, vec![CheckName::ConsensusVarietyCondition]);

        let rep = run_all(&two_roots());
        assert_eq!(
            rep.reasons,
            vec![CheckName::EliminationSpanningTree, CheckName::GraphSpanningTree]
        );
        assert_eq!(rep.algebraic_component_estimate, Some(2));
        assert_eq!(rep.graph.maximal_classes, 2);

        let rep = run_all(&generate_protocol(&tree5(), ProtocolKind::Product));
        assert_eq!(rep.overall, Overall::NecessaryConditionsSatisfied);
        assert!(rep.overall_text().starts_with("necessary conditions satisfied"));
        let strong = rep.check(CheckName::GraphStrongConnectivity).unwrap();
        assert_eq!(strong.verdict, Verdict::Fail);
        assert!(!strong.necessary);
    }

    #[test]
    fn sweep_cap_marks_estimate_not_applicable() {
        let lin = generate_protocol(&tree5(), ProtocolKind::Linear);
        let opts = CheckOptions {
            max_sweep_n: 4,
            record_timing: false,
        };
        let rep = run_all_with(&lin, &opts);
        let est = rep.check(CheckName::ComponentCountEstimate).unwrap();
        assert_eq!(est.verdict, Verdict::NotApplicable);
        assert_eq!(rep.algebraic_component_estimate, None);
        assert!(rep.checks.iter().all(|c| c.elapsed_us.is_none()));
    }

    #[test]
    fn report_json_vocabulary() {
        let rep = run_all(&two_roots());
        let v = rep.to_json();
        let checks = v["checks"].as_array().unwrap();
        assert_eq!(checks.len(), 8);
        for c in checks {
            let verdict = c["verdict"].as_str().unwrap();
            assert!(["pass", "fail", "not-applicable"].contains(&verdict));
        }
        assert_eq!(v["overall"], "impossible");
        assert_eq!(checks[4]["name"], "elimination_spanning_tree");
    }

    #[test]
    fn combination_enumeration() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert!(combinations(2, 3).is_empty());
    }
}
