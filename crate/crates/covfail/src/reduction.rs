//! Reduction from two-terminal network reliability to the coverage problem.
//!
//! A graph with edge failure probabilities and terminals `s`, `t` is turned
//! into a fenced 2-complex: vertices are ranked with `s` lowest and `t`
//! highest, each edge becomes a vertical strip of rectangles (one per unit
//! rank interval it spans, subdivided at intermediate ranks), and each
//! rectangle is fanned around a barycenter. The fence is the strip bundle's
//! outer boundary. The lowest rectangle of each strip inherits the edge's
//! failure probability; everything else is infallible. The criterion then
//! holds exactly when `s` and `t` are connected through surviving edges, so
//! network-reliability answers transfer to coverage answers. This is the
//! test generator behind several cross-check suites.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::complex::{ComplexError, Edge, SimplicialComplex2, Triangle, VertexId};
use crate::persistence::criterion_oracle;
use crate::probability::{CompensatedSum, Distribution};

/// Two-terminal reliability instance: an undirected multigraph, a failure
/// probability per edge, and a query threshold `q` carried along for
/// reporting.
#[derive(Clone, Debug)]
pub struct ReliabilityInstance {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub p: Vec<f64>,
    pub s: usize,
    pub t: usize,
    pub q: f64,
}

#[derive(Error, Debug)]
pub enum ReductionError {
    #[error("degenerate reliability instance: {0}")]
    DegenerateGraph(String),
    #[error("{0} items exceed the brute-force cap of {1}")]
    TooLargeForBrute(usize, usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

impl ReliabilityInstance {
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(usize, usize)>,
        p: Vec<f64>,
        s: usize,
        t: usize,
        q: f64,
    ) -> Result<ReliabilityInstance, ReductionError> {
        let bad = |msg: String| Err(ReductionError::DegenerateGraph(msg));
        let n = vertices.len();
        if n < 2 {
            return bad(format!("need at least two vertices, got {n}"));
        }
        let mut seen = BTreeSet::new();
        for l in &vertices {
            if !seen.insert(l) {
                return bad(format!("duplicate vertex label {l:?}"));
            }
        }
        if s >= n || t >= n {
            return bad(format!("terminal out of range (s={s}, t={t}, n={n})"));
        }
        if s == t {
            return bad("terminals coincide".to_string());
        }
        if p.len() != edges.len() {
            return bad(format!(
                "{} probabilities for {} edges",
                p.len(),
                edges.len()
            ));
        }
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return bad(format!("edge {i} endpoint out of range"));
            }
            if u == v {
                return bad(format!("edge {i} is a self-loop"));
            }
        }
        for (i, &pe) in p.iter().enumerate() {
            if !(0.0..=1.0).contains(&pe) {
                return bad(format!("edge {i} probability {pe} outside [0, 1]"));
            }
        }
        if !(0.0..=1.0).contains(&q) {
            return bad(format!("threshold {q} outside [0, 1]"));
        }
        Ok(ReliabilityInstance {
            vertices,
            edges,
            p,
            s,
            t,
            q,
        })
    }
}

/// One rectangle of an edge's strip: the rank interval `[level, level + 1]`,
/// its barycenter, and its triangle fan.
#[derive(Clone, Debug)]
pub struct RectCell {
    pub level: usize,
    pub barycenter: VertexId,
    pub triangles: Vec<Triangle>,
}

/// The strip of rectangles produced for one input edge, lowest level first.
#[derive(Clone, Debug)]
pub struct EdgeStrip {
    pub endpoints: (usize, usize),
    pub cells: Vec<RectCell>,
}

/// Result of the reduction: the coverage instance plus enough structure to
/// map chains back to the input graph.
#[derive(Clone, Debug)]
pub struct Reduced2DInstance {
    pub complex: SimplicialComplex2,
    /// Failure probability of every interior vertex (zero off barycenters).
    pub failure_p: BTreeMap<VertexId, f64>,
    /// Rank of every input vertex; `s` is 1 and `t` is the vertex count.
    pub rank: Vec<usize>,
    pub strips: Vec<EdgeStrip>,
}

struct ComplexBuilder {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: BTreeSet<Edge>,
    triangles: BTreeSet<Triangle>,
}

impl ComplexBuilder {
    fn new() -> ComplexBuilder {
        ComplexBuilder {
            labels: Vec::new(),
            index: HashMap::new(),
            edges: BTreeSet::new(),
            triangles: BTreeSet::new(),
        }
    }

    fn vertex(&mut self, label: &str) -> VertexId {
        if let Some(&v) = self.index.get(label) {
            return v;
        }
        let v = VertexId(self.labels.len() as u32);
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), v);
        v
    }

    fn edge(&mut self, a: VertexId, b: VertexId) {
        self.edges.insert(Edge::new(a, b));
    }
}

/// Builds the coverage instance for a reliability query.
pub fn reduce_instance(g: &ReliabilityInstance) -> Result<Reduced2DInstance, ReductionError> {
    let n = g.vertices.len();
    let mut rank = vec![0usize; n];
    rank[g.s] = 1;
    rank[g.t] = n;
    let mut next = 2;
    for (v, r) in rank.iter_mut().enumerate() {
        if v != g.s && v != g.t {
            *r = next;
            next += 1;
        }
    }
    let by_rank: HashMap<usize, usize> = (0..n).map(|v| (rank[v], v)).collect();

    let mut b = ComplexBuilder::new();
    let bottom: Vec<VertexId> = (1..=n).map(|l| b.vertex(&format!("b{l}"))).collect();
    let top: Vec<VertexId> = (1..=n).map(|l| b.vertex(&format!("t{l}"))).collect();
    for l in 0..n - 1 {
        b.edge(bottom[l], bottom[l + 1]);
        b.edge(top[l], top[l + 1]);
    }
    b.edge(bottom[0], top[0]);
    b.edge(bottom[n - 1], top[n - 1]);
    let fence_order: Vec<VertexId> = bottom
        .iter()
        .copied()
        .chain(top.iter().rev().copied())
        .collect();

    // The vertical 1-chain at `level` for the ranked-graph vertex named by
    // `key`. End levels reuse the fence sides; interior levels get a private
    // midpoint so that strips sharing the vertex share its whole vertical.
    let vertical = |b: &mut ComplexBuilder, level: usize, key: &str| -> Option<VertexId> {
        if level == 1 || level == n {
            return None;
        }
        let m = b.vertex(&format!("m:{key}"));
        b.edge(bottom[level - 1], m);
        b.edge(m, top[level - 1]);
        Some(m)
    };

    // Every input vertex contributes its vertical, edges or not: the strip
    // bundle contains the full product of the ranked graph with an interval.
    for (&r, key) in rank.iter().zip(&g.vertices) {
        vertical(&mut b, r, key);
    }

    let mut strips = Vec::with_capacity(g.edges.len());
    let mut failure_p: Vec<(VertexId, f64)> = Vec::new();
    for (ei, &(u, v)) in g.edges.iter().enumerate() {
        let lo = rank[u].min(rank[v]);
        let hi = rank[u].max(rank[v]);
        let mut cells = Vec::with_capacity(hi - lo);
        for level in lo..hi {
            let side_key = |l: usize| {
                if l == lo || l == hi {
                    g.vertices[by_rank[&l]].clone()
                } else {
                    format!("e{ei}:{l}")
                }
            };
            let left = vertical(&mut b, level, &side_key(level));
            let right = vertical(&mut b, level + 1, &side_key(level + 1));
            let mut cycle = vec![bottom[level - 1], bottom[level]];
            cycle.extend(right);
            cycle.push(top[level]);
            cycle.push(top[level - 1]);
            cycle.extend(left);
            let c = b.vertex(&format!("c:e{ei}:{level}"));
            let mut triangles = Vec::with_capacity(cycle.len());
            for i in 0..cycle.len() {
                let x = cycle[i];
                let y = cycle[(i + 1) % cycle.len()];
                b.edge(c, x);
                let t = Triangle::new(c, x, y);
                b.triangles.insert(t);
                triangles.push(t);
            }
            failure_p.push((c, if level == lo { g.p[ei] } else { 0.0 }));
            cells.push(RectCell {
                level,
                barycenter: c,
                triangles,
            });
        }
        strips.push(EdgeStrip {
            endpoints: (u, v),
            cells,
        });
    }

    let vertex_count = b.labels.len();
    let mut complex = SimplicialComplex2::from_simplices(
        b.labels,
        vec![None; vertex_count],
        fence_order,
        b.edges,
        b.triangles,
    )?;
    let mut failures: BTreeMap<VertexId, f64> =
        complex.interior_vertices().map(|v| (v, 0.0)).collect();
    for (v, p) in failure_p {
        failures.insert(v, p);
    }
    for (&v, &p) in &failures {
        complex.set_failure(v, Some(Distribution::Fixed { p }));
    }
    Ok(Reduced2DInstance {
        complex,
        failure_p: failures,
        rank,
        strips,
    })
}

/// Number of distinct triangle chains whose boundary is the fence: zero when
/// the criterion fails, otherwise two to the dimension of the 2-cycle space.
pub fn count_fundamental_classes(x: &Reduced2DInstance) -> u64 {
    let out = criterion_oracle(&x.complex);
    if !out.pass {
        return 0;
    }
    assert!(out.kernel_dim < 64, "class count overflows u64");
    1u64 << out.kernel_dim
}

/// The triangle chain obtained by stacking the full strips of the edges of
/// an `s`-`t` path, given as a vertex sequence. Its boundary is always the
/// fence. With parallel edges the first matching strip is used.
pub fn path_chain(
    g: &ReliabilityInstance,
    x: &Reduced2DInstance,
    path: &[usize],
) -> Result<BTreeSet<Triangle>, ReductionError> {
    if path.first() != Some(&g.s) || path.last() != Some(&g.t) {
        return Err(ReductionError::DegenerateGraph(
            "path must run from s to t".to_string(),
        ));
    }
    let mut chain = BTreeSet::new();
    for w in path.windows(2) {
        let strip = x
            .strips
            .iter()
            .find(|st| st.endpoints == (w[0], w[1]) || st.endpoints == (w[1], w[0]))
            .ok_or_else(|| {
                ReductionError::DegenerateGraph(format!(
                    "no edge between {:?} and {:?}",
                    g.vertices[w[0]], g.vertices[w[1]]
                ))
            })?;
        for cell in &strip.cells {
            for &t in &cell.triangles {
                if !chain.insert(t) {
                    chain.remove(&t);
                }
            }
        }
    }
    Ok(chain)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn st_connected(g: &ReliabilityInstance, alive: u64) -> bool {
    let mut parent: Vec<usize> = (0..g.vertices.len()).collect();
    for (ei, &(u, v)) in g.edges.iter().enumerate() {
        if alive >> ei & 1 == 1 {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            parent[ru] = rv;
        }
    }
    find(&mut parent, g.s) == find(&mut parent, g.t)
}

/// Exhaustive two-terminal reliability over edge subsets: the probability
/// that `s` and `t` stay connected when each edge fails independently.
pub fn reliability_bruteforce_1d(
    g: &ReliabilityInstance,
    max_edges: usize,
) -> Result<f64, ReductionError> {
    let m = g.edges.len();
    if m > max_edges {
        return Err(ReductionError::TooLargeForBrute(m, max_edges));
    }
    let mut total = CompensatedSum::default();
    for alive in 0..1u64 << m {
        let mut weight = 1.0;
        for ei in 0..m {
            weight *= if alive >> ei & 1 == 1 {
                1.0 - g.p[ei]
            } else {
                g.p[ei]
            };
        }
        if weight != 0.0 && st_connected(g, alive) {
            total.add(weight);
        }
    }
    Ok(total.value().clamp(0.0, 1.0))
}

/// Exhaustive reliability on the reduced complex: the probability that the
/// coverage criterion holds when each fallible vertex fails independently.
/// Shares nothing with the 1-dimensional computation past the instance.
pub fn reliability_bruteforce_2d(
    x: &Reduced2DInstance,
    max_fallible: usize,
) -> Result<f64, ReductionError> {
    let fallible: Vec<(VertexId, f64)> = x
        .failure_p
        .iter()
        .filter(|&(_, &p)| p > 0.0)
        .map(|(&v, &p)| (v, p))
        .collect();
    let f = fallible.len();
    if f > max_fallible {
        return Err(ReductionError::TooLargeForBrute(f, max_fallible));
    }
    let mut total = CompensatedSum::default();
    for mask in 0..1u64 << f {
        let mut weight = 1.0;
        let mut dead = BTreeSet::new();
        for (i, &(v, p)) in fallible.iter().enumerate() {
            if mask >> i & 1 == 1 {
                weight *= p;
                dead.insert(v);
            } else {
                weight *= 1.0 - p;
            }
        }
        if weight == 0.0 {
            continue;
        }
        let pruned = x.complex.remove_vertices(&dead)?;
        if criterion_oracle(&pruned).pass {
            total.add(weight);
        }
    }
    Ok(total.value().clamp(0.0, 1.0))
}

/// Counts simple `s`-`t` paths by depth-first search; a reference quantity
/// for class-count tests on restricted families.
pub fn count_st_paths(g: &ReliabilityInstance) -> u64 {
    fn go(g: &ReliabilityInstance, at: usize, visited: &mut Vec<bool>) -> u64 {
        if at == g.t {
            return 1;
        }
        let mut total = 0;
        for &(u, v) in &g.edges {
            let next = if u == at {
                v
            } else if v == at {
                u
            } else {
                continue;
            };
            if !visited[next] {
                visited[next] = true;
                total += go(g, next, visited);
                visited[next] = false;
            }
        }
        total
    }
    let mut visited = vec![false; g.vertices.len()];
    visited[g.s] = true;
    go(g, g.s, &mut visited)
}
