//! Dependency graphs of protocols and the path-order analysis on them.
//!
//! Node `i` stands for agent `i` (0-based here, 1-based in every text format).
//! An edge `(i, j)` means `xᵢ` occurs in `f_j`, so information flows from `i`
//! to `j` and `i` is an in-neighbour of `j`. Self-dependence (`x_j` in `f_j`)
//! is kept apart from the edge set.
//!
//! Path equivalence classes are the strongly connected components; a class is
//! maximal when no edge enters it from outside, i.e. it is a source of the
//! condensation.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::polyring::{int, Monomial, Polynomial, Ring};
use crate::protocol::Protocol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown protocol kind `{0}` (expected linear, squared or product)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    self_dependent: Vec<bool>,
}

impl DependencyGraph {
    /// Graph on `n` nodes. Pairs `(i, i)` set the self-dependence flag instead
    /// of adding an edge.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = DependencyGraph {
            n,
            edges: BTreeSet::new(),
            self_dependent: vec![false; n],
        };
        for (i, j) in edges {
            for node in [i, j] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if i == j {
                g.self_dependent[i] = true;
            } else {
                g.edges.insert((i, j));
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn self_dependent(&self) -> &[bool] {
        &self.self_dependent
    }

    /// `𝒩ⱼ`: nodes with an edge into `j`, ascending.
    pub fn in_neighbors(&self, j: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|&&(_, t)| t == j)
            .map(|&(s, _)| s)
            .collect()
    }

    pub fn out_neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .range((i, 0)..(i + 1, 0))
            .map(|&(_, t)| t)
            .collect()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
        }
        adj
    }
}

pub fn build_dependency_graph(p: &Protocol) -> DependencyGraph {
    let n = p.n();
    let mut g = DependencyGraph {
        n,
        edges: BTreeSet::new(),
        self_dependent: vec![false; n],
    };
    for (j, f) in p.polys().iter().enumerate() {
        for i in f.support() {
            if i == j {
                g.self_dependent[j] = true;
            } else {
                g.edges.insert((i, j));
            }
        }
    }
    g
}

/// Strongly connected components with their maximality flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePartition {
    classes: Vec<Vec<usize>>,
    maximal: Vec<bool>,
}

impl NodePartition {
    /// Classes sorted internally and ordered by smallest member.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn maximal_flags(&self) -> &[bool] {
        &self.maximal
    }

    pub fn maximal_classes(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.classes
            .iter()
            .zip(&self.maximal)
            .filter(|(_, &m)| m)
            .map(|(c, _)| c)
    }

    pub fn maximal_count(&self) -> usize {
        self.maximal.iter().filter(|&&m| m).count()
    }

    pub fn class_of(&self, node: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&node))
    }
}

/// Iterative Tarjan. Returns components in completion order.
fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (node, next child position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, pos)) = call.last() {
            if pos < adj[v].len() {
                let w = adj[v][pos];
                call.last_mut().expect("frame present").1 += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack holds the component");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comps.push(comp);
            }
        }
    }
    comps
}

pub fn path_equivalence_classes(g: &DependencyGraph) -> NodePartition {
    let mut classes = tarjan(&g.adjacency());
    for c in &mut classes {
        c.sort_unstable();
    }
    classes.sort_by_key(|c| c[0]);
    let mut class_of = vec![0; g.n];
    for (k, c) in classes.iter().enumerate() {
        for &v in c {
            class_of[v] = k;
        }
    }
    let mut maximal = vec![true; classes.len()];
    for &(i, j) in &g.edges {
        if class_of[i] != class_of[j] {
            maximal[class_of[j]] = false;
        }
    }
    NodePartition { classes, maximal }
}

pub fn is_strongly_connected(g: &DependencyGraph) -> bool {
    path_equivalence_classes(g).classes.len() == 1
}

pub fn has_directed_spanning_tree(g: &DependencyGraph) -> bool {
    path_equivalence_classes(g).maximal_count() == 1
}

/// `L = D − A` with `D` the in-degrees: row `i` holds `|𝒩ᵢ|` on the diagonal
/// and `−1` in every column `j ∈ 𝒩ᵢ`, so the linear protocol reads `ẋ = −Lx`.
pub fn laplacian(g: &DependencyGraph) -> Vec<Vec<i64>> {
    let mut l = vec![vec![0i64; g.n]; g.n];
    for &(j, i) in &g.edges {
        l[i][j] -= 1;
        l[i][i] += 1;
    }
    l
}

/// The three protocol families built from in-neighbour sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    /// `Σ x_j − |𝒩ᵢ|·xᵢ`
    Linear,
    /// `Σ x_j² − |𝒩ᵢ|·xᵢ²`
    Squared,
    /// `Π x_j − xᵢ^|𝒩ᵢ|`
    Product,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [ProtocolKind::Linear, ProtocolKind::Squared, ProtocolKind::Product];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Linear => "linear",
            ProtocolKind::Squared => "squared",
            ProtocolKind::Product => "product",
        }
    }
}

impl FromStr for ProtocolKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(ProtocolKind::Linear),
            "squared" => Ok(ProtocolKind::Squared),
            "product" => Ok(ProtocolKind::Product),
            other => Err(GraphError::UnknownKind(other.to_string())),
        }
    }
}

/// Nodes without in-neighbours get `fᵢ = 0`.
pub fn generate_protocol(g: &DependencyGraph, kind: ProtocolKind) -> Protocol {
    let ring = Ring::indexed("x", g.n);
    let polys = (0..g.n)
        .map(|i| generated_row(&ring, &g.in_neighbors(i), i, kind))
        .collect();
    Protocol::new(ring, polys).expect("one row per node")
}

fn generated_row(ring: &Ring, nbrs: &[usize], i: usize, kind: ProtocolKind) -> Polynomial {
    let n = ring.nvars();
    if nbrs.is_empty() {
        return ring.zero();
    }
    let deg = nbrs.len();
    let pow = |v: usize, e: u32| Polynomial::monomial(ring, int(1), Monomial::var(n, v, e));
    match kind {
        ProtocolKind::Linear | ProtocolKind::Squared => {
            let e = if kind == ProtocolKind::Linear { 1 } else { 2 };
            let mut f = pow(i, e).scale(&-int(deg as i64));
            for &j in nbrs {
                f = &f + &pow(j, e);
            }
            f
        }
        ProtocolKind::Product => {
            let mut exps = vec![0u32; n];
            for &j in nbrs {
                exps[j] = 1;
            }
            let prod = Polynomial::monomial(ring, int(1), Monomial::new(exps));
            &prod - &pow(i, deg as u32)
        }
    }
}

/// Parses the edge-list format: `N <count>` first, then `E i j` lines with
/// 1-based nodes. `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<DependencyGraph, GraphError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| GraphError::Syntax { line, message };
        let mut words = content.split_whitespace();
        let directive = words.next().unwrap_or_default();
        let args: Vec<&str> = words.collect();
        let number = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(format!("expected a non-negative integer, found `{s}`")))
        };
        match directive {
            "N" => {
                if n.is_some() {
                    return Err(err("duplicate `N` directive".into()));
                }
                let [count] = args[..] else {
                    return Err(err("`N` takes exactly one argument".into()));
                };
                n = Some(number(count)?);
            }
            "E" => {
                let Some(count) = n else {
                    return Err(err("`E` before `N`".into()));
                };
                let [a, b] = args[..] else {
                    return Err(err("`E` takes exactly two arguments".into()));
                };
                let (i, j) = (number(a)?, number(b)?);
                for node in [i, j] {
                    if node == 0 || node > count {
                        return Err(err(format!("node {node} outside 1..={count}")));
                    }
                }
                edges.push((i - 1, j - 1));
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    let n = n.ok_or(GraphError::Syntax {
        line: text.lines().count().max(1),
        message: "missing `N` directive".into(),
    })?;
    DependencyGraph::new(n, edges)
}

/// Edge-list text, edges ascending. With `annotate`, comment lines list the
/// path-equivalence classes and self-dependent nodes.
pub fn format_edge_list(g: &DependencyGraph, annotate: bool) -> String {
    let mut out = String::new();
    if annotate {
        let part = path_equivalence_classes(g);
        for (c, &m) in part.classes().iter().zip(part.maximal_flags()) {
            let kind = if m { "maximal class" } else { "class" };
            let _ = writeln!(out, "# {kind} {{{}}}", one_based(c));
        }
        let selfs: Vec<usize> = (0..g.n).filter(|&i| g.self_dependent[i]).collect();
        if !selfs.is_empty() {
            let _ = writeln!(out, "# self-dependent {{{}}}", one_based(&selfs));
        }
    }
    let _ = writeln!(out, "N {}", g.n);
    for &(i, j) in &g.edges {
        let _ = writeln!(out, "E {} {}", i + 1, j + 1);
    }
    out
}

fn one_based(nodes: &[usize]) -> String {
    nodes
        .iter()
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Graphviz export. Maximal classes are drawn as dashed clusters; everything
/// is emitted in ascending node order.
pub fn to_dot(g: &DependencyGraph) -> String {
    let part = path_equivalence_classes(g);
    let mut out = String::from("digraph dependency {\n    node [shape=circle];\n");
    for (k, class) in part.maximal_classes().enumerate() {
        let _ = writeln!(out, "    subgraph cluster_maximal_{k} {{");
        let _ = writeln!(out, "        label=\"maximal\";\n        style=dashed;");
        for &v in class {
            let _ = writeln!(out, "        x{};", v + 1);
        }
        out.push_str("    }\n");
    }
    for v in 0..g.n {
        let shape = if g.self_dependent[v] { " [peripheries=2]" } else { "" };
        let _ = writeln!(out, "    x{}{shape};", v + 1);
    }
    for &(i, j) in &g.edges {
        let _ = writeln!(out, "    x{} -> x{};", i + 1, j + 1);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Spanning tree rooted at node 3 (1-based).
    fn tree5() -> DependencyGraph {
        let e = [(2, 1), (5, 1), (1, 2), (3, 2), (4, 2), (2, 4), (1, 5), (3, 5)];
        DependencyGraph::new(5, e.iter().map(|&(i, j)| (i - 1, j - 1))).unwrap()
    }

    fn two_roots() -> DependencyGraph {
        let e = [(2, 1), (1, 2), (1, 4), (2, 4), (3, 4)];
        DependencyGraph::new(4, e.iter().map(|&(i, j)| (i - 1, j - 1))).unwrap()
    }

    #[test]
    fn edges_from_protocols() {
        let p = generate_protocol(&tree5(), ProtocolKind::Linear);
        let g = build_dependency_graph(&p);
        assert_eq!(g.edges(), tree5().edges());
        assert_eq!(g.self_dependent(), &[true, true, false, true, true]);

        let r = Ring::indexed("x", 1);
        let zero = Protocol::new(r.clone(), vec![r.zero()]).unwrap();
        assert!(build_dependency_graph(&zero).edges().is_empty());
    }

    #[test]
    fn partitions() {
        let p = path_equivalence_classes(&two_roots());
        assert_eq!(p.classes(), &[vec![0, 1], vec![2], vec![3]]);
        assert_eq!(p.maximal_flags(), &[true, true, false]);
        assert_eq!(p.maximal_count(), 2);

        let two = DependencyGraph::new(2, [(0, 1), (1, 0)]).unwrap();
        let p = path_equivalence_classes(&two);
        assert_eq!(p.classes(), &[vec![0, 1]]);
        assert_eq!(p.maximal_flags(), &[true]);

        let p = path_equivalence_classes(&tree5());
        assert_eq!(p.classes(), &[vec![0, 1, 3, 4], vec![2]]);
        assert_eq!(p.maximal_flags(), &[false, true]);
        assert_eq!(p.class_of(2), Some(1));
    }

    #[test]
    fn connectivity() {
        let two = DependencyGraph::new(2, [(0, 1), (1, 0)]).unwrap();
        let single = DependencyGraph::new(1, []).unwrap();
        assert!(is_strongly_connected(&two));
        assert!(!is_strongly_connected(&tree5()));
        assert!(is_strongly_connected(&single));
        assert!(has_directed_spanning_tree(&tree5()));
        assert!(!has_directed_spanning_tree(&two_roots()));
        assert!(has_directed_spanning_tree(&single));
    }

    #[test]
    fn laplacians() {
        let two = DependencyGraph::new(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(laplacian(&two), vec![vec![1, -1], vec![-1, 1]]);
        let empty = DependencyGraph::new(3, []).unwrap();
        assert_eq!(laplacian(&empty), vec![vec![0; 3]; 3]);
        assert_eq!(laplacian(&tree5())[0], vec![2, -1, 0, 0, -1]);
    }

    #[test]
    fn generated_families() {
        let lin = generate_protocol(&tree5(), ProtocolKind::Linear);
        let shown: Vec<String> = lin.polys().iter().map(ToString::to_string).collect();
        assert_eq!(
            shown,
            ["-2*x1 + x2 + x5", "x1 - 3*x2 + x3 + x4", "0", "x2 - x4", "x1 + x3 - 2*x5"]
        );
        let sq = generate_protocol(&tree5(), ProtocolKind::Squared);
        assert_eq!(sq.polys()[0].to_string(), "-2*x1^2 + x2^2 + x5^2");
        let prod = generate_protocol(&tree5(), ProtocolKind::Product);
        let shown: Vec<String> = prod.polys().iter().map(ToString::to_string).collect();
        assert_eq!(
            shown,
            ["-x1^2 + x2*x5", "x1*x3*x4 - x2^3", "0", "x2 - x4", "x1*x3 - x5^2"]
        );
    }

    #[test]
    fn unknown_kind() {
        assert_eq!(
            "cubic".parse::<ProtocolKind>(),
            Err(GraphError::UnknownKind("cubic".into()))
        );
        assert_eq!("product".parse::<ProtocolKind>(), Ok(ProtocolKind::Product));
    }

    #[test]
    fn edge_list_round_trip() {
        let text = format_edge_list(&tree5(), true);
        assert!(text.contains("# maximal class {3}"));
        assert_eq!(parse_edge_list(&text).unwrap(), tree5());
        let g = parse_edge_list("# comment\nN 2\n\nE 1 2 # trailing\n").unwrap();
        assert_eq!(g.edges(), &BTreeSet::from([(0, 1)]));
    }

    #[test]
    fn edge_list_errors() {
        for bad in ["E 1 2\nN 2", "N 2\nE 1 3", "N 2\nN 3", "N x", "N 2\nE 1", "N 2\nQ 1 2", ""] {
            assert!(parse_edge_list(bad).is_err(), "{bad:?}");
        }
        let err = parse_edge_list("N 2\nE 0 1").unwrap_err();
        assert!(matches!(err, GraphError::Syntax { line: 2, .. }));
    }

    #[test]
    fn dot_output() {
        let dot = to_dot(&two_roots());
        assert!(dot.starts_with("digraph dependency {"));
        assert_eq!(dot.matches(" -> ").count(), 5);
        assert_eq!(dot.matches("subgraph cluster_maximal").count(), 2);
        assert_eq!(dot, to_dot(&two_roots()));
    }
}
