//! Support graphs of the per-generator chains and the combinatorics built
//! on them: classes, periodicity, the ergodicity and freeness criteria,
//! branch data for edge slides and special edge sets.

use std::collections::{BTreeSet, VecDeque};

use num_traits::Zero;
use serde::Serialize;

use crate::chainspec::{MarkovSpec, Symbol};
use crate::error::Error;

/// A directed graph on the symbols `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionGraph {
    n: usize,
    edges: BTreeSet<(Symbol, Symbol)>,
}

impl TransitionGraph {
    pub fn new<I: IntoIterator<Item = (Symbol, Symbol)>>(n: usize, edges: I) -> Result<Self, Error> {
        let edges: BTreeSet<_> = edges.into_iter().collect();
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(Error::Mismatch(format!("edge ({a}, {b}) leaves the vertex set 0..{n}")));
        }
        Ok(TransitionGraph { n, edges })
    }

    pub fn complete(n: usize) -> Self {
        TransitionGraph {
            n,
            edges: (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(Symbol, Symbol)> {
        &self.edges
    }

    pub fn has_edge(&self, a: Symbol, b: Symbol) -> bool {
        self.edges.contains(&(a, b))
    }

    /// Successors of `a` in increasing order.
    pub fn successors(&self, a: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        self.edges.range((a, 0)..(a + 1, 0)).map(|&(_, b)| b)
    }

    pub fn out_degree(&self, a: Symbol) -> usize {
        self.successors(a).count()
    }

    pub fn in_degree(&self, b: Symbol) -> usize {
        self.edges.iter().filter(|&&(_, y)| y == b).count()
    }

    /// Neighbours of `a` ignoring direction, in increasing order.
    pub fn undirected_neighbours(&self, a: Symbol) -> Vec<Symbol> {
        let set: BTreeSet<Symbol> = self
            .edges
            .iter()
            .filter_map(|&(x, y)| if x == a { Some(y) } else if y == a { Some(x) } else { None })
            .collect();
        set.into_iter().collect()
    }
}

/// `E_s`: pairs `(a, b)` with `π(a) P_s(a, b) > 0`.
pub fn support_edges(spec: &MarkovSpec, s: usize) -> Result<TransitionGraph, Error> {
    let k = spec.kernel(s)?;
    let n = spec.symbol_count();
    let edges = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !spec.pi()[a].is_zero() && !k.get(a, b).is_zero());
    TransitionGraph::new(n, edges)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Classes of the equivalence relation generated by a set of edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassPartition {
    class_of: Vec<usize>,
    classes: Vec<Vec<Symbol>>,
}

impl ClassPartition {
    pub fn classes(&self) -> &[Vec<Symbol>] {
        &self.classes
    }

    pub fn class_id(&self, a: Symbol) -> usize {
        self.class_of[a]
    }

    pub fn class_of(&self, a: Symbol) -> &[Symbol] {
        &self.classes[self.class_of[a]]
    }

    pub fn same_class(&self, a: Symbol, b: Symbol) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn is_single(&self) -> bool {
        self.classes.len() == 1
    }
}

fn partition_from(n: usize, edges: impl IntoIterator<Item = (Symbol, Symbol)>) -> ClassPartition {
    let mut dsu = Dsu::new(n);
    for (a, b) in edges {
        dsu.union(a, b);
    }
    let mut classes: Vec<Vec<Symbol>> = Vec::new();
    let mut class_of = vec![usize::MAX; n];
    for a in 0..n {
        let root = dsu.find(a);
        if class_of[root] == usize::MAX {
            class_of[root] = classes.len();
            classes.push(Vec::new());
        }
        class_of[a] = class_of[root];
        classes[class_of[a]].push(a);
    }
    ClassPartition { class_of, classes }
}

/// Undirected connected components, numbered by smallest member.
pub fn classes(g: &TransitionGraph) -> ClassPartition {
    partition_from(g.n, g.edges.iter().copied())
}

/// Every vertex of the class has in-degree and out-degree one.
pub fn is_periodic_class(g: &TransitionGraph, class: &[Symbol]) -> bool {
    class.iter().all(|&a| g.out_degree(a) == 1 && g.in_degree(a) == 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorClassification {
    pub ergodic: bool,
    pub free: bool,
    pub classes: Vec<Vec<Symbol>>,
    pub periodic_classes: Vec<Vec<Symbol>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub per_generator: Vec<GeneratorClassification>,
    pub ergodic: bool,
    pub properly_ergodic: bool,
}

impl Classification {
    /// Every restriction ergodic and essentially free.
    pub fn generator_ergodic(&self) -> bool {
        self.per_generator.iter().all(|g| g.ergodic && g.free)
    }
}

pub fn classify_generator(g: &TransitionGraph) -> GeneratorClassification {
    let part = classes(g);
    let periodic_classes: Vec<Vec<Symbol>> = part
        .classes()
        .iter()
        .filter(|c| is_periodic_class(g, c))
        .cloned()
        .collect();
    GeneratorClassification {
        ergodic: part.is_single(),
        free: periodic_classes.is_empty(),
        classes: part.classes().to_vec(),
        periodic_classes,
    }
}

/// Ergodicity and freeness of each restriction, and ergodicity and proper
/// ergodicity of the whole measure. A non-ergodic measure is never reported
/// as properly ergodic.
pub fn classify(spec: &MarkovSpec) -> Result<Classification, Error> {
    let graphs = (0..spec.rank())
        .map(|s| support_edges(spec, s))
        .collect::<Result<Vec<_>, _>>()?;
    let per_generator: Vec<_> = graphs.iter().map(classify_generator).collect();
    let all = partition_from(
        spec.symbol_count(),
        graphs.iter().flat_map(|g| g.edges.iter().copied()),
    );
    let ergodic = all.is_single();
    let properly_ergodic = ergodic && per_generator.iter().any(|g| g.periodic_classes.len() < g.classes.len());
    Ok(Classification {
        per_generator,
        ergodic,
        properly_ergodic,
    })
}

/// The data `n(b)`, `b_0 … b_n` and `η(b)` attached to a target of a slide.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchData {
    pub n: usize,
    pub path: Vec<Symbol>,
    pub eta: Symbol,
}

/// The smallest `n > 0` admitting a walk `b = b_0, …, b_n` and a symbol
/// `η ≠ b_n` with `(b_{n-1}, η)` an edge. `b_{n-1}` is the first vertex of
/// out-degree at least two reachable from `b`; the walk up to it is forced,
/// then `b_n` and `η` are its two smallest successors.
pub fn branch_data(g: &TransitionGraph, b: Symbol) -> Result<BranchData, Error> {
    if b >= g.n {
        return Err(Error::Mismatch(format!("symbol {b} is not a vertex")));
    }
    let mut prev = vec![usize::MAX; g.n];
    let mut seen = vec![false; g.n];
    let mut queue = VecDeque::from([b]);
    seen[b] = true;
    let mut branch = None;
    while let Some(a) = queue.pop_front() {
        if g.out_degree(a) >= 2 {
            branch = Some(a);
            break;
        }
        for c in g.successors(a) {
            if !seen[c] {
                seen[c] = true;
                prev[c] = a;
                queue.push_back(c);
            }
        }
    }
    let Some(branch) = branch else {
        return Err(Error::PeriodicClass(b.to_string()));
    };
    let mut path = vec![branch];
    while *path.last().expect("non-empty") != b {
        path.push(prev[*path.last().expect("non-empty")]);
    }
    path.reverse();
    let mut succ = g.successors(branch);
    let next = succ.next().expect("out-degree at least two");
    let eta = succ.next().expect("out-degree at least two");
    path.push(next);
    Ok(BranchData {
        n: path.len() - 1,
        path,
        eta,
    })
}

/// Whether `sub` is special: no vertex has both an incoming and an outgoing
/// edge of `sub`, and every endpoint lies in an aperiodic class.
pub fn is_special(g: &TransitionGraph, sub: &[(Symbol, Symbol)]) -> Result<bool, Error> {
    special_violation(g, sub).map(|v| v.is_none())
}

/// The first reason `sub` fails to be special, if any.
pub fn special_violation(g: &TransitionGraph, sub: &[(Symbol, Symbol)]) -> Result<Option<String>, Error> {
    if let Some(&(a, b)) = sub.iter().find(|&&(a, b)| !g.has_edge(a, b)) {
        return Err(Error::NotSpecial(format!("({a}, {b}) is not a support edge")));
    }
    let sources: BTreeSet<Symbol> = sub.iter().map(|&(a, _)| a).collect();
    let targets: BTreeSet<Symbol> = sub.iter().map(|&(_, b)| b).collect();
    if let Some(v) = sources.intersection(&targets).next() {
        return Ok(Some(format!("symbol {v} has both an incoming and an outgoing edge")));
    }
    let part = classes(g);
    for v in sources.union(&targets) {
        if is_periodic_class(g, part.class_of(*v)) {
            return Ok(Some(format!("the class of symbol {v} is periodic")));
        }
    }
    Ok(None)
}

/// A spanning tree of one aperiodic class, two-coloured, and the two
/// special edge sets it splits into.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialSets {
    pub tree: Vec<(Symbol, Symbol)>,
    pub part0: Vec<Symbol>,
    pub part1: Vec<Symbol>,
    pub e1: Vec<(Symbol, Symbol)>,
    pub e2: Vec<(Symbol, Symbol)>,
}

/// Breadth-first spanning tree of the class of `a`, rooted at its smallest
/// symbol, with tree edges oriented along an existing edge (smaller endpoint
/// first when both directions exist). Even depth goes to `part0`.
pub fn special_sets_in(g: &TransitionGraph, a: Symbol) -> Result<SpecialSets, Error> {
    let part = classes(g);
    let class = part.class_of(a);
    if is_periodic_class(g, class) {
        return Err(Error::PeriodicClass(a.to_string()));
    }
    let root = class[0];
    let mut depth = vec![usize::MAX; g.n];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut tree = Vec::new();
    while let Some(v) = queue.pop_front() {
        for w in g.undirected_neighbours(v) {
            if depth[w] != usize::MAX {
                continue;
            }
            depth[w] = depth[v] + 1;
            queue.push_back(w);
            let (lo, hi) = (v.min(w), v.max(w));
            tree.push(if g.has_edge(lo, hi) { (lo, hi) } else { (hi, lo) });
        }
    }
    tree.sort();
    let (part0, part1): (Vec<Symbol>, Vec<Symbol>) = class.iter().partition(|&&v| depth[v] % 2 == 0);
    let e1 = tree.iter().copied().filter(|&(x, _)| depth[x] % 2 == 0).collect();
    let e2 = tree.iter().copied().filter(|&(x, _)| depth[x] % 2 == 1).collect();
    Ok(SpecialSets {
        tree,
        part0,
        part1,
        e1,
        e2,
    })
}

pub fn special_sets(spec: &MarkovSpec, u: usize, a: Symbol) -> Result<SpecialSets, Error> {
    special_sets_in(&support_edges(spec, u)?, a)
}
