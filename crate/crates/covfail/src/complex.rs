//! Communication graphs and their Rips 2-skeletons.
//!
//! A [`CommunicationGraph`] records which sensors hear which others plus a
//! distinguished fence cycle along the domain boundary. Its
//! [`SimplicialComplex2`] has the graph's edges as 1-simplices and every
//! 3-clique as a 2-simplex. All coverage reasoning downstream happens on the
//! 2-skeleton; no higher simplices are ever materialised.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::probability::Distribution;

/// Dense index of a node; stable across subcomplex operations.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Undirected edge stored with endpoints in ascending id order.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge(VertexId, VertexId);

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Edge {
        assert_ne!(a, b, "self-loop");
        if a < b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn endpoints(self) -> (VertexId, VertexId) {
        (self.0, self.1)
    }

    pub fn contains(self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }
}

/// Triangle stored with vertices in ascending id order.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Triangle(VertexId, VertexId, VertexId);

impl Triangle {
    pub fn new(a: VertexId, b: VertexId, c: VertexId) -> Triangle {
        let mut v = [a, b, c];
        v.sort();
        assert!(v[0] != v[1] && v[1] != v[2], "degenerate triangle");
        Triangle(v[0], v[1], v[2])
    }

    pub fn vertices(self) -> [VertexId; 3] {
        [self.0, self.1, self.2]
    }

    pub fn edges(self) -> [Edge; 3] {
        [
            Edge::new(self.0, self.1),
            Edge::new(self.0, self.2),
            Edge::new(self.1, self.2),
        ]
    }

    pub fn contains(self, v: VertexId) -> bool {
        self.0 == v || self.1 == v || self.2 == v
    }
}

#[derive(Error, Debug)]
pub enum ComplexError {
    #[error("fence invalid: {0}")]
    FenceInvalid(FenceDiagnostics),
    #[error(
        "fence gap: consecutive fence nodes {a} and {b} are {dist:.6} apart, \
         which is not below the broadcast radius {r_b}"
    )]
    FenceGap {
        a: String,
        b: String,
        dist: f64,
        r_b: f64,
    },
    #[error("cannot remove fence vertex {0}")]
    FenceRemoval(String),
    #[error("duplicate node label {0}")]
    DuplicateLabel(String),
    #[error("unknown node label {0}")]
    UnknownLabel(String),
    #[error("self-loop on node {0}")]
    SelfLoop(String),
    #[error("not downward closed: {0}")]
    NotClosed(String),
}

/// Node data carried by a [`CommunicationGraph`].
#[derive(Clone, Debug)]
pub struct NodeSpec {
    pub label: String,
    pub position: Option<[f64; 2]>,
    pub failure: Option<Distribution>,
}

/// Undirected connectivity data plus the cyclic fence order.
///
/// Fence membership is defined by the fence order; edges are deduplicated.
#[derive(Clone, Debug, Default)]
pub struct CommunicationGraph {
    nodes: Vec<NodeSpec>,
    by_label: BTreeMap<String, VertexId>,
    edges: BTreeSet<Edge>,
    fence_order: Vec<VertexId>,
}

impl CommunicationGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(
        &mut self,
        label: &str,
        position: Option<[f64; 2]>,
        failure: Option<Distribution>,
    ) -> Result<VertexId, ComplexError> {
        if self.by_label.contains_key(label) {
            return Err(ComplexError::DuplicateLabel(label.to_string()));
        }
        let id = VertexId(self.nodes.len() as u32);
        self.nodes.push(NodeSpec {
            label: label.to_string(),
            position,
            failure,
        });
        self.by_label.insert(label.to_string(), id);
        Ok(id)
    }

    /// Inserts an edge; returns false if it was already present.
    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<bool, ComplexError> {
        if a == b {
            return Err(ComplexError::SelfLoop(self.label(a).to_string()));
        }
        Ok(self.edges.insert(Edge::new(a, b)))
    }

    pub fn add_edge_by_labels(&mut self, a: &str, b: &str) -> Result<bool, ComplexError> {
        let a = self.id_of_checked(a)?;
        let b = self.id_of_checked(b)?;
        self.add_edge(a, b)
    }

    pub fn set_fence_by_labels(&mut self, labels: &[&str]) -> Result<(), ComplexError> {
        let order = labels
            .iter()
            .map(|l| self.id_of_checked(l))
            .collect::<Result<Vec<_>, _>>()?;
        self.fence_order = order;
        Ok(())
    }

    pub fn id_of(&self, label: &str) -> Option<VertexId> {
        self.by_label.get(label).copied()
    }

    fn id_of_checked(&self, label: &str) -> Result<VertexId, ComplexError> {
        self.id_of(label)
            .ok_or_else(|| ComplexError::UnknownLabel(label.to_string()))
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.nodes[v.index()].label
    }

    pub fn node(&self, v: VertexId) -> &NodeSpec {
        &self.nodes[v.index()]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (VertexId, &NodeSpec)> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (VertexId(i as u32), n))
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        a != b && self.edges.contains(&Edge::new(a, b))
    }

    pub fn fence(&self) -> &[VertexId] {
        &self.fence_order
    }

    pub fn is_fence(&self, v: VertexId) -> bool {
        self.fence_order.contains(&v)
    }
}

/// One defect found by [`validate_fence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FenceIssue {
    /// The cycle needs at least three vertices.
    TooShort {
        len: usize,
    },
    DuplicateVertex {
        label: String,
    },
    /// Consecutive fence nodes must share an edge.
    MissingEdge {
        a: String,
        b: String,
    },
    /// Fence nodes never fail; a failure spec on one is a modelling error.
    HasFailureSpec {
        label: String,
    },
}

impl fmt::Display for FenceIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FenceIssue::TooShort { len } => {
                write!(f, "fence has {len} vertices, need at least 3")
            }
            FenceIssue::DuplicateVertex { label } => {
                write!(f, "fence lists vertex {label} more than once")
            }
            FenceIssue::MissingEdge { a, b } => {
                write!(f, "consecutive fence nodes ({a}, {b}) share no edge")
            }
            FenceIssue::HasFailureSpec { label } => {
                write!(f, "fence node {label} carries a failure spec")
            }
        }
    }
}

/// Structured result of fence validation.
#[derive(Clone, Debug, Default)]
pub struct FenceDiagnostics {
    pub issues: Vec<FenceIssue>,
}

impl FenceDiagnostics {
    pub fn ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for FenceDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "fence ok");
        }
        let msgs: Vec<String> = self.issues.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// Checks the fence cycle: length, distinctness, consecutive adjacency
/// (including the closing pair), and absence of failure specs.
pub fn validate_fence(g: &CommunicationGraph) -> FenceDiagnostics {
    let mut d = FenceDiagnostics::default();
    let fence = g.fence();
    if fence.len() < 3 {
        d.issues.push(FenceIssue::TooShort { len: fence.len() });
    }
    let mut seen = BTreeSet::new();
    for &v in fence {
        if !seen.insert(v) {
            d.issues.push(FenceIssue::DuplicateVertex {
                label: g.label(v).to_string(),
            });
        }
        if g.node(v).failure.is_some() {
            d.issues.push(FenceIssue::HasFailureSpec {
                label: g.label(v).to_string(),
            });
        }
    }
    if fence.len() >= 2 {
        for i in 0..fence.len() {
            let a = fence[i];
            let b = fence[(i + 1) % fence.len()];
            if a == b || !g.has_edge(a, b) {
                d.issues.push(FenceIssue::MissingEdge {
                    a: g.label(a).to_string(),
                    b: g.label(b).to_string(),
                });
            }
        }
    }
    d
}

/// Builds a communication graph from planar positions: nodes hear each other
/// exactly when their distance is strictly below `r_b`.
pub fn rips_graph_from_points(
    nodes: &[NodeSpec],
    fence: &[&str],
    r_b: f64,
) -> Result<CommunicationGraph, ComplexError> {
    let mut g = CommunicationGraph::new();
    for n in nodes {
        g.add_node(&n.label, n.position, n.failure)?;
    }
    g.set_fence_by_labels(fence)?;
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let (Some(p), Some(q)) = (nodes[i].position, nodes[j].position) else {
                continue;
            };
            if dist(p, q) < r_b {
                g.add_edge(VertexId(i as u32), VertexId(j as u32))?;
            }
        }
    }
    for i in 0..g.fence_order.len() {
        let a = g.fence_order[i];
        let b = g.fence_order[(i + 1) % g.fence_order.len()];
        if !g.has_edge(a, b) {
            let (pa, pb) = (g.node(a).position, g.node(b).position);
            let dist = match (pa, pb) {
                (Some(p), Some(q)) => dist(p, q),
                _ => f64::NAN,
            };
            return Err(ComplexError::FenceGap {
                a: g.label(a).to_string(),
                b: g.label(b).to_string(),
                dist,
                r_b,
            });
        }
    }
    Ok(g)
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

/// A 2-dimensional simplicial complex over a fixed vertex label table.
///
/// Vertex ids stay stable under [`SimplicialComplex2::remove_vertices`]; dead
/// vertices simply disappear from the live set and from all simplices.
#[derive(Clone, Debug)]
pub struct SimplicialComplex2 {
    labels: Vec<String>,
    positions: Vec<Option<[f64; 2]>>,
    failures: Vec<Option<Distribution>>,
    live: Vec<bool>,
    is_fence: Vec<bool>,
    fence_order: Vec<VertexId>,
    edges: BTreeSet<Edge>,
    triangles: BTreeSet<Triangle>,
    neighbors: Vec<BTreeSet<VertexId>>,
}

/// Builds the Rips 2-skeleton: given edges plus every 3-clique as a triangle.
/// Fails with [`ComplexError::FenceInvalid`] when the fence cycle is defective.
pub fn build_rips_2skeleton(g: &CommunicationGraph) -> Result<SimplicialComplex2, ComplexError> {
    let diag = validate_fence(g);
    if !diag.ok() {
        return Err(ComplexError::FenceInvalid(diag));
    }
    let n = g.node_count();
    let mut neighbors = vec![BTreeSet::new(); n];
    for e in g.edges() {
        let (a, b) = e.endpoints();
        neighbors[a.index()].insert(b);
        neighbors[b.index()].insert(a);
    }
    let mut triangles = BTreeSet::new();
    for e in g.edges() {
        let (a, b) = e.endpoints();
        // Common neighbors above b, so each clique is found once.
        for &c in neighbors[a.index()].intersection(&neighbors[b.index()]) {
            if c > b {
                triangles.insert(Triangle::new(a, b, c));
            }
        }
    }
    let mut is_fence = vec![false; n];
    for &v in g.fence() {
        is_fence[v.index()] = true;
    }
    Ok(SimplicialComplex2 {
        labels: g.nodes.iter().map(|n| n.label.clone()).collect(),
        positions: g.nodes.iter().map(|n| n.position).collect(),
        failures: g.nodes.iter().map(|n| n.failure).collect(),
        live: vec![true; n],
        is_fence,
        fence_order: g.fence().to_vec(),
        edges: g.edges.clone(),
        triangles,
        neighbors,
    })
}

impl SimplicialComplex2 {
    /// Builds a complex from an explicit simplex list (no clique completion).
    /// The fence must be a valid cycle and every simplex face must be present.
    pub fn from_simplices(
        labels: Vec<String>,
        positions: Vec<Option<[f64; 2]>>,
        fence_order: Vec<VertexId>,
        edges: BTreeSet<Edge>,
        triangles: BTreeSet<Triangle>,
    ) -> Result<SimplicialComplex2, ComplexError> {
        let n = labels.len();
        assert_eq!(positions.len(), n);
        for t in &triangles {
            for e in t.edges() {
                if !edges.contains(&e) {
                    return Err(ComplexError::NotClosed(format!(
                        "triangle ({}, {}, {}) lacks edge ({}, {})",
                        labels[t.0.index()],
                        labels[t.1.index()],
                        labels[t.2.index()],
                        labels[e.0.index()],
                        labels[e.1.index()],
                    )));
                }
            }
        }
        let mut neighbors = vec![BTreeSet::new(); n];
        for e in &edges {
            let (a, b) = e.endpoints();
            neighbors[a.index()].insert(b);
            neighbors[b.index()].insert(a);
        }
        if fence_order.len() < 3 {
            return Err(ComplexError::FenceInvalid(FenceDiagnostics {
                issues: vec![FenceIssue::TooShort {
                    len: fence_order.len(),
                }],
            }));
        }
        for i in 0..fence_order.len() {
            let a = fence_order[i];
            let b = fence_order[(i + 1) % fence_order.len()];
            if a == b || !edges.contains(&Edge::new(a, b)) {
                return Err(ComplexError::FenceInvalid(FenceDiagnostics {
                    issues: vec![FenceIssue::MissingEdge {
                        a: labels[a.index()].clone(),
                        b: labels[b.index()].clone(),
                    }],
                }));
            }
        }
        let mut is_fence = vec![false; n];
        for &v in &fence_order {
            is_fence[v.index()] = true;
        }
        Ok(SimplicialComplex2 {
            labels,
            positions,
            failures: vec![None; n],
            live: vec![true; n],
            is_fence,
            fence_order,
            edges,
            triangles,
            neighbors,
        })
    }

    pub fn failure(&self, v: VertexId) -> Option<Distribution> {
        self.failures[v.index()]
    }

    pub fn set_failure(&mut self, v: VertexId, dist: Option<Distribution>) {
        self.failures[v.index()] = dist;
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.index()]
    }

    pub fn position(&self, v: VertexId) -> Option<[f64; 2]> {
        self.positions[v.index()]
    }

    pub fn id_of(&self, label: &str) -> Option<VertexId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| VertexId(i as u32))
            .filter(|&v| self.live[v.index()])
    }

    pub fn is_live(&self, v: VertexId) -> bool {
        self.live[v.index()]
    }

    pub fn is_fence(&self, v: VertexId) -> bool {
        self.is_fence[v.index()]
    }

    /// Live vertices in ascending id order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.live
            .iter()
            .enumerate()
            .filter(|(_, &l)| l)
            .map(|(i, _)| VertexId(i as u32))
    }

    /// Live interior (non-fence) vertices in ascending id order.
    pub fn interior_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(|&v| !self.is_fence(v))
    }

    pub fn vertex_count(&self) -> usize {
        self.live.iter().filter(|&&l| l).count()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangles(&self) -> impl Iterator<Item = Triangle> + '_ {
        self.triangles.iter().copied()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        a != b && self.edges.contains(&Edge::new(a, b))
    }

    pub fn fence(&self) -> &[VertexId] {
        &self.fence_order
    }

    /// The fence cycle's edges in cyclic order.
    pub fn fence_edges(&self) -> Vec<Edge> {
        let k = self.fence_order.len();
        (0..k)
            .map(|i| Edge::new(self.fence_order[i], self.fence_order[(i + 1) % k]))
            .collect()
    }

    pub fn triangles_containing(&self, v: VertexId) -> Vec<Triangle> {
        self.triangles
            .iter()
            .copied()
            .filter(|t| t.contains(v))
            .collect()
    }

    /// Removes the vertices in `a` and every simplex touching them.
    pub fn remove_vertices(
        &self,
        a: &BTreeSet<VertexId>,
    ) -> Result<SimplicialComplex2, ComplexError> {
        for &v in a {
            if self.is_fence(v) {
                return Err(ComplexError::FenceRemoval(self.label(v).to_string()));
            }
        }
        let mut out = self.clone();
        for &v in a {
            out.live[v.index()] = false;
        }
        out.edges.retain(|e| !a.iter().any(|&v| e.contains(v)));
        out.triangles.retain(|t| !a.iter().any(|&v| t.contains(v)));
        for nb in out.neighbors.iter_mut() {
            for &v in a {
                nb.remove(&v);
            }
        }
        for &v in a {
            out.neighbors[v.index()].clear();
        }
        Ok(out)
    }

    /// Link of `w`: the graph of vertices adjacent to `w` with an edge
    /// `(u, v)` for every triangle `(u, v, w)`.
    pub fn link(&self, w: VertexId) -> LinkGraph {
        let mut lg = LinkGraph::default();
        lg.vertices.extend(self.neighbors[w.index()].iter());
        for t in self.triangles.iter().filter(|t| t.contains(w)) {
            let [a, b, c] = t.vertices();
            let (u, v) = if a == w {
                (b, c)
            } else if b == w {
                (a, c)
            } else {
                (a, b)
            };
            lg.edges.insert(Edge::new(u, v));
        }
        lg
    }
}

/// A 1-complex arising as the link of a vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinkGraph {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<Edge>,
}

impl LinkGraph {
    /// Drops `v` and every edge touching it; used for incremental updates.
    pub fn remove_vertex(&mut self, v: VertexId) {
        self.vertices.remove(&v);
        self.edges.retain(|e| !e.contains(v));
    }
}

/// Betti numbers `(b0, b1)` of a 1-complex: components via union-find, then
/// `b1 = E - V + b0`.
pub fn graph_betti(g: &LinkGraph) -> (usize, usize) {
    let ids: Vec<VertexId> = g.vertices.iter().copied().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in &g.edges {
        let (a, b) = e.endpoints();
        let (ra, rb) = (find(&mut parent, index[&a]), find(&mut parent, index[&b]));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let b0 = (0..ids.len())
        .filter(|&i| find(&mut parent, i) == i)
        .count();
    let b1 = g.edges.len() + b0 - ids.len();
    (b0, b1)
}
