//! Labeled simple digraphs and the combinatorial objects built on them:
//! strongly connected components, arborescences, simple cycles, incidence
//! matrices and auxiliary spanning forests.
//!
//! Vertex ids are opaque strings mapped to dense indices in declaration
//! order. Every matrix in the crate is indexed by these dense indices.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Directed edge between dense vertex indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
}

impl Edge {
    pub fn new(source: usize, target: usize) -> Self {
        Edge { source, target }
    }
}

impl From<(usize, usize)> for Edge {
    fn from((source, target): (usize, usize)) -> Self {
        Edge { source, target }
    }
}

/// A simple digraph with positive edge labels.
///
/// Immutable after construction. The strongly connected components are
/// computed once and stored in canonical order: vertices ascending inside a
/// component, components ordered by their smallest vertex.
#[derive(Clone, Debug)]
pub struct LabeledDigraph<T> {
    vertex_ids: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    labels: Vec<T>,
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
}

impl<T: Scalar> LabeledDigraph<T> {
    /// Builds a graph from vertex ids and `(source, target, label)` triples.
    pub fn build<V, S>(vertices: &[V], edges: Vec<(S, S, T)>) -> Result<Self>
    where
        V: AsRef<str>,
        S: AsRef<str>,
    {
        let mut index = HashMap::with_capacity(vertices.len());
        let mut vertex_ids = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            let id = v.as_ref().to_string();
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(id));
            }
            vertex_ids.push(id);
        }
        let mut seen = HashSet::new();
        let mut dense = Vec::with_capacity(edges.len());
        let mut labels = Vec::with_capacity(edges.len());
        for (s, t, k) in edges {
            let (s, t) = (s.as_ref(), t.as_ref());
            let si = *index
                .get(s)
                .ok_or_else(|| Error::UnknownEndpoint(s.to_string()))?;
            let ti = *index
                .get(t)
                .ok_or_else(|| Error::UnknownEndpoint(t.to_string()))?;
            if si == ti {
                return Err(Error::SelfLoop(s.to_string()));
            }
            if !seen.insert((si, ti)) {
                return Err(Error::DuplicateEdge(s.to_string(), t.to_string()));
            }
            if !k.is_positive() {
                return Err(Error::NonPositiveLabel(s.to_string(), t.to_string()));
            }
            dense.push(Edge::new(si, ti));
            labels.push(k);
        }
        Ok(Self::assemble(vertex_ids, index, dense, labels))
    }

    /// Builds a graph on vertices `"1"..="n"` from dense-index edges.
    pub fn from_indexed(n: usize, edges: Vec<(usize, usize, T)>) -> Result<Self> {
        let ids: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let named = edges
            .into_iter()
            .map(|(s, t, k)| {
                let name = |i: usize| ids.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
                (name(s), name(t), k)
            })
            .collect();
        Self::build(&ids, named)
    }

    fn assemble(
        vertex_ids: Vec<String>,
        index: HashMap<String, usize>,
        edges: Vec<Edge>,
        labels: Vec<T>,
    ) -> Self {
        let components = strongly_connected_components(vertex_ids.len(), &edges);
        let mut component_of = vec![0; vertex_ids.len()];
        for (c, comp) in components.iter().enumerate() {
            for &v in comp {
                component_of[v] = c;
            }
        }
        LabeledDigraph {
            vertex_ids,
            index,
            edges,
            labels,
            components,
            component_of,
        }
    }

    /// Same graph with every label mapped through `f`.
    pub fn map_labels<U: Scalar>(&self, f: impl FnMut(&T) -> U) -> LabeledDigraph<U> {
        LabeledDigraph {
            vertex_ids: self.vertex_ids.clone(),
            index: self.index.clone(),
            edges: self.edges.clone(),
            labels: self.labels.iter().map(f).collect(),
            components: self.components.clone(),
            component_of: self.component_of.clone(),
        }
    }

    pub fn to_f64(&self) -> LabeledDigraph<f64> {
        self.map_labels(|k| k.to_f64())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> &[T] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> &T {
        &self.labels[e]
    }

    pub fn edge_index(&self, source: usize, target: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|e| e.source == source && e.target == target)
    }

    /// Strongly connected components in canonical order.
    pub fn scc_partition(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }

    /// True when every edge stays inside one strongly connected component,
    /// i.e. every connected component is strongly connected.
    pub fn has_strongly_connected_components(&self) -> bool {
        self.edges
            .iter()
            .all(|e| self.component_of[e.source] == self.component_of[e.target])
    }

    /// Simple directed cycles, each rotated to start at its smallest vertex,
    /// sorted lexicographically by vertex sequence.
    pub fn enumerate_cycles(&self) -> Vec<Cycle> {
        let n = self.vertex_count();
        let adjacency = self.adjacency();
        let mut cycles = Vec::new();
        let mut on_path = vec![false; n];
        for start in 0..n {
            let mut path = vec![start];
            let mut path_edges = Vec::new();
            on_path[start] = true;
            self.cycles_from(start, &adjacency, &mut path, &mut path_edges, &mut on_path, &mut cycles);
            on_path[start] = false;
        }
        cycles.sort_by(|a, b| a.vertices.cmp(&b.vertices));
        cycles
    }

    fn cycles_from(
        &self,
        start: usize,
        adjacency: &[Vec<usize>],
        path: &mut Vec<usize>,
        path_edges: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Cycle>,
    ) {
        let v = *path.last().expect("path is never empty");
        for &e in &adjacency[v] {
            let t = self.edges[e].target;
            if t == start {
                let mut edges = path_edges.clone();
                edges.push(e);
                out.push(Cycle {
                    vertices: path.clone(),
                    edges,
                });
            } else if t > start && !on_path[t] {
                on_path[t] = true;
                path.push(t);
                path_edges.push(e);
                self.cycles_from(start, adjacency, path, path_edges, on_path, out);
                path_edges.pop();
                path.pop();
                on_path[t] = false;
            }
        }
    }

    /// All spanning arborescences of `root`'s strongly connected component
    /// that are directed towards `root`.
    pub fn arborescences(&self, root: usize) -> Result<Vec<Arborescence>> {
        if root >= self.vertex_count() {
            return Err(Error::RootNotInGraph(format!("#{root}")));
        }
        Ok(self
            .rooted_forests(&[root])
            .into_iter()
            .map(|edges| Arborescence { root, edges })
            .collect())
    }

    /// All edge sets inside the component of `roots` in which every
    /// non-root vertex is the source of exactly one edge and no cycle
    /// occurs, so that every vertex drains into `roots`. Edge indices are
    /// listed by source vertex; the enumeration order is deterministic.
    pub fn rooted_forests(&self, roots: &[usize]) -> Vec<Vec<usize>> {
        let Some(&first) = roots.first() else {
            return Vec::new();
        };
        let c = self.component_of[first];
        let others: Vec<usize> = self.components[c]
            .iter()
            .copied()
            .filter(|v| !roots.contains(v))
            .collect();
        let candidates: Vec<Vec<usize>> = others
            .iter()
            .map(|&v| {
                (0..self.edges.len())
                    .filter(|&e| {
                        self.edges[e].source == v && self.component_of[self.edges[e].target] == c
                    })
                    .collect()
            })
            .collect();
        let mut parent: Vec<Option<usize>> = vec![None; self.vertex_count()];
        let mut chosen = Vec::with_capacity(others.len());
        let mut out = Vec::new();
        self.forests_from(0, &others, &candidates, &mut parent, &mut chosen, &mut out);
        out
    }

    fn forests_from(
        &self,
        depth: usize,
        others: &[usize],
        candidates: &[Vec<usize>],
        parent: &mut [Option<usize>],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if depth == others.len() {
            out.push(chosen.clone());
            return;
        }
        let v = others[depth];
        for &e in &candidates[depth] {
            // Follow the chosen edges from the target; reaching `v` would
            // close a cycle.
            let mut cur = self.edges[e].target;
            while let Some(p) = parent[cur] {
                cur = p;
            }
            if cur == v {
                continue;
            }
            parent[v] = Some(self.edges[e].target);
            chosen.push(e);
            self.forests_from(depth + 1, others, candidates, parent, chosen, out);
            chosen.pop();
            parent[v] = None;
        }
    }

    /// Incidence matrix `I_E` and source matrix `I_{E,s}`, both `V × E`.
    pub fn incidence_matrices(&self) -> (Matrix<T>, Matrix<T>) {
        let (n, m) = (self.vertex_count(), self.edge_count());
        let mut incidence = Matrix::zeros(n, m);
        let mut source = Matrix::zeros(n, m);
        for (j, e) in self.edges.iter().enumerate() {
            incidence[(e.source, j)] = -T::one();
            incidence[(e.target, j)] = T::one();
            source[(e.source, j)] = T::one();
        }
        (incidence, source)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (j, e) in self.edges.iter().enumerate() {
            adj[e.source].push(j);
        }
        adj
    }
}

/// Tarjan's algorithm; output in canonical order.
fn strongly_connected_components(n: usize, edges: &[Edge]) -> Vec<Vec<usize>> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }

    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for i in 0..s.adj[v].len() {
            let w = s.adj[v][i];
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().expect("root is on the stack");
                s.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            s.out.push(comp);
        }
    }

    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.source].push(e.target);
    }
    let mut state = State {
        adj: &adj,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if state.index[v].is_none() {
            visit(&mut state, v);
        }
    }
    let mut out = state.out;
    out.sort_by_key(|c| c[0]);
    out
}

/// Spanning tree of one component directed towards `root`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arborescence {
    pub root: usize,
    /// Indices into the host graph's edge list.
    pub edges: Vec<usize>,
}

impl Arborescence {
    pub fn weight<T: Scalar>(&self, g: &LabeledDigraph<T>) -> T {
        self.edges
            .iter()
            .fold(T::one(), |acc, &e| acc * g.label(e).clone())
    }

    pub fn pairs<T: Scalar>(&self, g: &LabeledDigraph<T>) -> Vec<Edge> {
        self.edges.iter().map(|&e| g.edges()[e]).collect()
    }
}

/// Simple directed cycle, starting at its smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub vertices: Vec<usize>,
    /// Indices into the host graph's edge list; edge `i` leaves `vertices[i]`.
    pub edges: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// Laplacian of the cycle with unit labels, `V × V`.
    pub fn unit_laplacian<T: Scalar>(&self, n: usize) -> Matrix<T> {
        let mut a = Matrix::zeros(n, n);
        let m = self.vertices.len();
        for i in 0..m {
            let (s, t) = (self.vertices[i], self.vertices[(i + 1) % m]);
            a[(t, s)] = T::one();
            a[(s, s)] = -T::one();
        }
        a
    }
}

/// Shape of an auxiliary spanning forest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AuxKind {
    /// Each component is a directed path `i1 → i2 → … → im`.
    Chain,
    /// Each component is `i1 → im, …, i(m-1) → im` for a root `im`.
    Star,
    General,
}

impl fmt::Display for AuxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuxKind::Chain => "chain",
            AuxKind::Star => "star",
            AuxKind::General => "general",
        })
    }
}

/// Auxiliary digraph: one directed spanning tree per strongly connected
/// component, encoding a partial order on the vertices. Its edges need not
/// be edges of the host graph.
///
/// Trees built through the constructors are valid for their host graph and
/// list edges component by component in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxTree {
    pub edges: Vec<Edge>,
    pub kind: AuxKind,
    /// Component index of each edge (the source's component).
    pub component_map: Vec<usize>,
}

/// First violated auxiliary-tree invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuxViolation {
    UnknownVertex { edge: usize },
    SelfLoop { edge: usize },
    CrossComponent { edge: usize },
    EdgeCount { component: usize, expected: usize, found: usize },
    NotSpanningTree { component: usize },
    KindMismatch { kind: AuxKind },
    ComponentMap { edge: usize },
}

impl fmt::Display for AuxViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuxViolation::UnknownVertex { edge } => write!(f, "edge {edge} has an unknown endpoint"),
            AuxViolation::SelfLoop { edge } => write!(f, "edge {edge} is a self-loop"),
            AuxViolation::CrossComponent { edge } => {
                write!(f, "edge {edge} joins different components")
            }
            AuxViolation::EdgeCount { component, expected, found } => write!(
                f,
                "component {component} needs {expected} edges (|V|-1), found {found}"
            ),
            AuxViolation::NotSpanningTree { component } => {
                write!(f, "edges of component {component} do not form a spanning tree")
            }
            AuxViolation::KindMismatch { kind } => write!(f, "edges do not have {kind} shape"),
            AuxViolation::ComponentMap { edge } => {
                write!(f, "component map of edge {edge} is wrong")
            }
        }
    }
}

impl AuxTree {
    /// Validated tree from arbitrary edges; the kind is detected.
    pub fn from_edges<T: Scalar>(g: &LabeledDigraph<T>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut tree = AuxTree::unchecked(g, edges, AuxKind::General);
        tree.canonicalize();
        tree.kind = detect_kind(g, &tree.edges);
        validate_aux_tree(g, &tree).map_err(|v| Error::InvalidAuxTree(v.to_string()))?;
        Ok(tree)
    }

    /// Tree with the given edges and declared kind, without validation.
    /// Endpoints outside the graph get component `usize::MAX`.
    pub fn unchecked<T: Scalar>(g: &LabeledDigraph<T>, edges: &[(usize, usize)], kind: AuxKind) -> Self {
        let edges: Vec<Edge> = edges.iter().map(|&p| Edge::from(p)).collect();
        let component_map = edges
            .iter()
            .map(|e| {
                if e.source < g.vertex_count() {
                    g.component_of(e.source)
                } else {
                    usize::MAX
                }
            })
            .collect();
        AuxTree { edges, kind, component_map }
    }

    /// Chain graph from one vertex order per component. Orders are matched
    /// to components by membership; singleton components may be omitted.
    pub fn chain<T: Scalar>(g: &LabeledDigraph<T>, orders: &[Vec<usize>]) -> Result<Self> {
        let comps = g.scc_partition();
        let mut per_component: Vec<Option<&Vec<usize>>> = vec![None; comps.len()];
        for order in orders {
            let Some(&first) = order.first() else {
                return Err(Error::BadOrder("empty order".into()));
            };
            if first >= g.vertex_count() {
                return Err(Error::BadOrder(format!("unknown vertex #{first}")));
            }
            let c = g.component_of(first);
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != comps[c] {
                return Err(Error::BadOrder(format!(
                    "order is not a permutation of component {{{}}}",
                    ids(g, &comps[c])
                )));
            }
            if per_component[c].replace(order).is_some() {
                return Err(Error::BadOrder(format!(
                    "component {{{}}} ordered twice",
                    ids(g, &comps[c])
                )));
            }
        }
        let mut edges = Vec::new();
        for (c, comp) in comps.iter().enumerate() {
            match per_component[c] {
                Some(order) => edges.extend(order.windows(2).map(|w| (w[0], w[1]))),
                None if comp.len() == 1 => {}
                None => {
                    return Err(Error::BadOrder(format!(
                        "no order given for component {{{}}}",
                        ids(g, comp)
                    )))
                }
            }
        }
        let tree = AuxTree::unchecked(g, &edges, AuxKind::Chain);
        debug_assert!(validate_aux_tree(g, &tree).is_ok());
        Ok(tree)
    }

    /// Star graph from one root per component. A list with one root per
    /// component is read positionally; otherwise roots are matched to
    /// components by membership and singleton components may be omitted.
    pub fn star<T: Scalar>(g: &LabeledDigraph<T>, roots: &[usize]) -> Result<Self> {
        let comps = g.scc_partition();
        if let Some(&bad) = roots.iter().find(|&&r| r >= g.vertex_count()) {
            return Err(Error::RootNotInGraph(format!("#{bad}")));
        }
        let mut per_component: Vec<Option<usize>> = vec![None; comps.len()];
        if roots.len() == comps.len() {
            for (c, &r) in roots.iter().enumerate() {
                if g.component_of(r) != c {
                    return Err(Error::RootOutsideComponent {
                        root: g.vertex_id(r).to_string(),
                    });
                }
                per_component[c] = Some(r);
            }
        } else {
            for &r in roots {
                let c = g.component_of(r);
                if per_component[c].replace(r).is_some() {
                    return Err(Error::BadOrder(format!(
                        "two roots for component {{{}}}",
                        ids(g, &comps[c])
                    )));
                }
            }
        }
        let mut edges = Vec::new();
        for (c, comp) in comps.iter().enumerate() {
            match per_component[c] {
                Some(root) => edges.extend(comp.iter().filter(|&&v| v != root).map(|&v| (v, root))),
                None if comp.len() == 1 => {}
                None => {
                    return Err(Error::BadOrder(format!(
                        "no root given for component {{{}}}",
                        ids(g, comp)
                    )))
                }
            }
        }
        Ok(AuxTree::unchecked(g, &edges, AuxKind::Star))
    }

    /// Chain through each component in ascending vertex order.
    pub fn canonical_chain<T: Scalar>(g: &LabeledDigraph<T>) -> Self {
        AuxTree::chain(g, g.scc_partition()).expect("components are valid orders")
    }

    /// Star rooted at the last vertex of each component.
    pub fn canonical_star<T: Scalar>(g: &LabeledDigraph<T>) -> Self {
        let roots: Vec<usize> = g
            .scc_partition()
            .iter()
            .map(|c| *c.last().expect("components are non-empty"))
            .collect();
        AuxTree::star(g, &roots).expect("roots are valid")
    }

    /// Vertex order of each component for chain trees, in canonical
    /// component order. `None` for other kinds.
    pub fn chain_orders<T: Scalar>(&self, g: &LabeledDigraph<T>) -> Option<Vec<Vec<usize>>> {
        if self.kind != AuxKind::Chain {
            return None;
        }
        Some(
            g.scc_partition()
                .iter()
                .enumerate()
                .map(|(c, comp)| {
                    let edges: Vec<&Edge> = self
                        .edges
                        .iter()
                        .zip(&self.component_map)
                        .filter(|(_, &m)| m == c)
                        .map(|(e, _)| e)
                        .collect();
                    let Some(start) = edges
                        .iter()
                        .map(|e| e.source)
                        .find(|&v| edges.iter().all(|e| e.target != v))
                    else {
                        return comp.clone();
                    };
                    let mut order = vec![start];
                    while let Some(e) = edges.iter().find(|e| Some(&e.source) == order.last()) {
                        order.push(e.target);
                    }
                    order
                })
                .collect(),
        )
    }

    /// Edges as pairs of vertex ids.
    pub fn id_pairs<T: Scalar>(&self, g: &LabeledDigraph<T>) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|e| (g.vertex_id(e.source).to_string(), g.vertex_id(e.target).to_string()))
            .collect()
    }

    fn canonicalize(&mut self) {
        let mut paired: Vec<(usize, Edge)> = self.component_map.iter().copied().zip(self.edges.iter().copied()).collect();
        paired.sort_by_key(|(c, _)| *c);
        self.component_map = paired.iter().map(|(c, _)| *c).collect();
        self.edges = paired.into_iter().map(|(_, e)| e).collect();
    }

    /// Incidence matrix `I_ℰ`, `V × ℰ`.
    pub fn incidence<T: Scalar>(&self, n: usize) -> Matrix<T> {
        let mut m = Matrix::zeros(n, self.edges.len());
        for (j, e) in self.edges.iter().enumerate() {
            m[(e.source, j)] = -T::one();
            m[(e.target, j)] = T::one();
        }
        m
    }

    /// Edge indices belonging to component `c`.
    pub fn component_edges(&self, c: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&j| self.component_map[j] == c)
            .collect()
    }
}

fn ids<T: Scalar>(g: &LabeledDigraph<T>, vs: &[usize]) -> String {
    vs.iter().map(|&v| g.vertex_id(v)).collect::<Vec<_>>().join(",")
}

fn detect_kind<T: Scalar>(g: &LabeledDigraph<T>, edges: &[Edge]) -> AuxKind {
    let per_comp = |c: usize| -> Vec<Edge> {
        edges
            .iter()
            .copied()
            .filter(|e| e.source < g.vertex_count() && g.component_of(e.source) == c)
            .collect()
    };
    let comps = g.scc_partition().len();
    if (0..comps).all(|c| is_chain(&per_comp(c))) {
        AuxKind::Chain
    } else if (0..comps).all(|c| is_star(&per_comp(c))) {
        AuxKind::Star
    } else {
        AuxKind::General
    }
}

/// Edges form one directed path, listed in path order.
/// Distinct sources and distinct targets: on a spanning tree, a directed path.
fn is_chain(edges: &[Edge]) -> bool {
    let mut sources = HashSet::new();
    let mut targets = HashSet::new();
    edges.iter().all(|e| sources.insert(e.source) && targets.insert(e.target))
}

fn is_star(edges: &[Edge]) -> bool {
    match edges.first() {
        None => true,
        Some(first) => {
            let root = first.target;
            let mut seen = HashSet::new();
            edges
                .iter()
                .all(|e| e.target == root && e.source != root && seen.insert(e.source))
        }
    }
}

/// Checks every auxiliary-tree invariant against `g`'s component partition.
pub fn validate_aux_tree<T: Scalar>(g: &LabeledDigraph<T>, aux: &AuxTree) -> std::result::Result<(), AuxViolation> {
    let n = g.vertex_count();
    if aux.component_map.len() != aux.edges.len() {
        return Err(AuxViolation::ComponentMap { edge: aux.component_map.len().min(aux.edges.len()) });
    }
    for (j, e) in aux.edges.iter().enumerate() {
        if e.source >= n || e.target >= n {
            return Err(AuxViolation::UnknownVertex { edge: j });
        }
        if e.source == e.target {
            return Err(AuxViolation::SelfLoop { edge: j });
        }
        if g.component_of(e.source) != g.component_of(e.target) {
            return Err(AuxViolation::CrossComponent { edge: j });
        }
        if aux.component_map[j] != g.component_of(e.source) {
            return Err(AuxViolation::ComponentMap { edge: j });
        }
    }
    for (c, comp) in g.scc_partition().iter().enumerate() {
        let edges: Vec<Edge> = aux
            .edges
            .iter()
            .copied()
            .filter(|e| g.component_of(e.source) == c)
            .collect();
        if edges.len() != comp.len() - 1 {
            return Err(AuxViolation::EdgeCount {
                component: c,
                expected: comp.len() - 1,
                found: edges.len(),
            });
        }
        // |V|-1 edges without an undirected cycle span the component.
        let mut uf = UnionFind::new(n);
        for e in &edges {
            if !uf.union(e.source, e.target) {
                return Err(AuxViolation::NotSpanningTree { component: c });
            }
        }
        let shape_ok = match aux.kind {
            AuxKind::Chain => is_chain(&edges),
            AuxKind::Star => is_star(&edges),
            AuxKind::General => true,
        };
        if !shape_ok {
            return Err(AuxViolation::KindMismatch { kind: aux.kind });
        }
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// False when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// All permutations of `items` in lexicographic order of positions.
pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    let mut out = vec![idx.iter().map(|&i| items[i]).collect()];
    loop {
        let Some(i) = (1..idx.len()).rev().find(|&i| idx[i - 1] < idx[i]) else {
            return out;
        };
        let j = (i..idx.len()).rev().find(|&j| idx[j] > idx[i - 1]).expect("successor exists");
        idx.swap(i - 1, j);
        idx[i..].reverse();
        out.push(idx.iter().map(|&i| items[i]).collect());
    }
}

/// Every chain tree of `g`: the product of all vertex orders of every
/// component. Returns `None` when there would be more than `cap`.
pub fn all_chain_trees<T: Scalar>(g: &LabeledDigraph<T>, cap: usize) -> Option<Vec<AuxTree>> {
    let mut total: usize = 1;
    for comp in g.scc_partition() {
        total = total.checked_mul((1..=comp.len()).product())?;
        if total > cap {
            return None;
        }
    }
    let per_comp: Vec<Vec<Vec<usize>>> = g.scc_partition().iter().map(|c| permutations(c)).collect();
    let mut combos: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for options in &per_comp {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut p = prefix.clone();
                    p.push(o.clone());
                    p
                })
            })
            .collect();
    }
    Some(
        combos
            .into_iter()
            .map(|orders| AuxTree::chain(g, &orders).expect("permutations are valid orders"))
            .collect(),
    )
}
