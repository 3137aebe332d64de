//! Python bindings for the coverage-verification library: build or parse
//! connectivity graphs, run the homological coverage check, enumerate minimal
//! death sets, evaluate failure probabilities, and monitor failure streams.
//!
//! Build with `cargo build -p covfail-py`, then import the produced cdylib as
//! `covfail_py` (see `python/smoke_test.py` for a loader).

use std::collections::BTreeSet;
use std::str::FromStr;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use covfail::complex::{
    build_rips_2skeleton, graph_betti, CommunicationGraph, SimplicialComplex2, VertexId,
};
use covfail::deathsets::{cake_or_death, DeathSetOptions};
use covfail::monitor::{init_monitor, FailureEvent, MonitorState, MonitorStatus};
use covfail::persistence::{
    build_boundary_matrix, check_criterion, criterion_oracle, homology_ranks, reduce,
};
use covfail::probability::{
    prob_failure_bruteforce, prob_failure_exact, prob_failure_mc, Distribution, FailureModel,
};
use covfail_cli::coverage::ConvexPolygon;
use covfail_cli::generator::{generate, GeneratorSpec};
use covfail_cli::graphfile::{emit_graph, parse_graph};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_failure(s: Option<&str>) -> PyResult<Option<Distribution>> {
    s.map(Distribution::from_str).transpose().map_err(value_err)
}

/// Undirected connectivity data plus the cyclic fence order.
#[pyclass]
struct Graph {
    inner: CommunicationGraph,
}

#[pymethods]
impl Graph {
    #[new]
    fn new() -> Graph {
        Graph {
            inner: CommunicationGraph::new(),
        }
    }

    /// Parse the text graph format used by the `covfail` CLI.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Graph> {
        Ok(Graph {
            inner: parse_graph(text).map_err(value_err)?,
        })
    }

    /// Serialize back to the text format; `parse` of the result round-trips.
    fn emit(&self) -> String {
        emit_graph(&self.inner)
    }

    /// Add a node. `failure` uses the textual form, e.g. `"exp:0.5"`,
    /// `"weibull:1.5:2.0"`, or `"fixed:0.3"`.
    #[pyo3(signature = (label, position=None, failure=None))]
    fn add_node(
        &mut self,
        label: &str,
        position: Option<(f64, f64)>,
        failure: Option<&str>,
    ) -> PyResult<()> {
        let pos = position.map(|(x, y)| [x, y]);
        self.inner
            .add_node(label, pos, parse_failure(failure)?)
            .map(|_| ())
            .map_err(value_err)
    }

    /// Add an undirected edge; returns False when it was already present.
    fn add_edge(&mut self, a: &str, b: &str) -> PyResult<bool> {
        self.inner.add_edge_by_labels(a, b).map_err(value_err)
    }

    /// Declare the fence cycle; consecutive labels (and last-to-first) gain
    /// ring edges implicitly.
    fn set_fence(&mut self, labels: Vec<String>) -> PyResult<()> {
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        self.inner.set_fence_by_labels(&refs).map_err(value_err)?;
        for i in 0..refs.len() {
            self.inner
                .add_edge_by_labels(refs[i], refs[(i + 1) % refs.len()])
                .map_err(value_err)?;
        }
        Ok(())
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    /// Build the communication complex: the given edges plus every 3-clique
    /// as a triangle. Fails when the fence cycle is defective.
    fn complex(&self) -> PyResult<Complex> {
        Ok(Complex {
            inner: build_rips_2skeleton(&self.inner).map_err(value_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={}, fence={})",
            self.inner.node_count(),
            self.inner.edge_count(),
            self.inner.fence().len()
        )
    }
}

/// Verdict of the coverage check, with the certificate when it passes.
#[pyclass]
struct CheckResult {
    #[pyo3(get)]
    passes: bool,
    /// Labels of the witness triangle, None when the check fails.
    #[pyo3(get)]
    triangle: Option<(String, String, String)>,
    /// Labels of the fence edge the witness column pairs with.
    #[pyo3(get)]
    fence_edge: Option<(String, String)>,
}

#[pymethods]
impl CheckResult {
    fn __bool__(&self) -> bool {
        self.passes
    }

    fn __repr__(&self) -> String {
        match &self.triangle {
            Some((a, b, c)) => format!("CheckResult(passes=True, triangle=({a}, {b}, {c}))"),
            None => "CheckResult(passes=False)".into(),
        }
    }
}

/// Minimal death sets of a complex, as label lists sorted by size.
#[pyclass]
struct DeathSets {
    #[pyo3(get)]
    sets: Vec<Vec<String>>,
    /// Size at which enumeration stopped early, None when complete.
    #[pyo3(get)]
    truncated_at_size: Option<usize>,
    #[pyo3(get)]
    explored: usize,
    #[pyo3(get)]
    baseline_failed: bool,
}

#[pymethods]
impl DeathSets {
    fn __len__(&self) -> usize {
        self.sets.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "DeathSets(sets={}, explored={}, truncated_at_size={:?})",
            self.sets.len(),
            self.explored,
            self.truncated_at_size
        )
    }
}

/// The curried 2-skeleton: a fence cycle, edges, and all triangles.
#[pyclass]
struct Complex {
    inner: SimplicialComplex2,
}

impl Complex {
    fn id_of(&self, label: &str) -> PyResult<VertexId> {
        self.inner
            .id_of(label)
            .ok_or_else(|| value_err(format!("unknown vertex {label:?}")))
    }
}

#[pymethods]
impl Complex {
    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn triangle_count(&self) -> usize {
        self.inner.triangle_count()
    }

    #[getter]
    fn fence(&self) -> Vec<String> {
        self.inner
            .fence()
            .iter()
            .map(|&v| self.inner.label(v).to_string())
            .collect()
    }

    #[getter]
    fn interior(&self) -> Vec<String> {
        self.inner
            .interior_vertices()
            .map(|v| self.inner.label(v).to_string())
            .collect()
    }

    /// Run the coverage check: passes iff some triangle chain has the fence
    /// cycle as boundary.
    fn check(&self) -> CheckResult {
        let (order, d) = build_boundary_matrix(&self.inner);
        match check_criterion(&reduce(&d), &order) {
            Some(w) => {
                let [a, b, c] = w.triangle.vertices();
                let (x, y) = w.fence_edge.endpoints();
                let l = |v: VertexId| self.inner.label(v).to_string();
                CheckResult {
                    passes: true,
                    triangle: Some((l(a), l(b), l(c))),
                    fence_edge: Some((l(x), l(y))),
                }
            }
            None => CheckResult {
                passes: false,
                triangle: None,
                fence_edge: None,
            },
        }
    }

    /// Ranks of first and second homology of the whole complex.
    fn homology_ranks(&self) -> (usize, usize) {
        homology_ranks(&self.inner)
    }

    /// Link condition of a vertex: True when its link graph contains a cycle,
    /// i.e. its death needs a full re-check.
    fn link_flag(&self, label: &str) -> PyResult<bool> {
        let v = self.id_of(label)?;
        Ok(graph_betti(&self.inner.link(v)).1 > 0)
    }

    /// A copy of the complex with the given vertices (and every incident
    /// simplex) removed. Fence vertices cannot be removed.
    fn remove(&self, labels: Vec<String>) -> PyResult<Complex> {
        let mut dead = BTreeSet::new();
        for l in &labels {
            dead.insert(self.id_of(l)?);
        }
        Ok(Complex {
            inner: self.inner.remove_vertices(&dead).map_err(value_err)?,
        })
    }

    /// Enumerate all minimal sets of interior vertices whose joint death
    /// breaks the coverage check.
    #[pyo3(signature = (max_size=None, budget=1_000_000))]
    fn death_sets(&self, max_size: Option<usize>, budget: usize) -> PyResult<DeathSets> {
        let opts = DeathSetOptions {
            max_size,
            budget,
            parallel: false,
        };
        let report = cake_or_death(&self.inner, &opts).map_err(value_err)?;
        Ok(DeathSets {
            sets: report.set_labels(&self.inner),
            truncated_at_size: report.truncated_at_size,
            explored: report.explored_total,
            baseline_failed: report.baseline_failed,
        })
    }

    /// Probability that coverage has failed by each time in `times`, using
    /// the per-node failure distributions. `method` is `"exact"`
    /// (inclusion-exclusion over minimal death sets), `"mc"` (Monte Carlo,
    /// needs `seed`), or `"brute"` (sum over all interior subsets).
    /// Returns `(t, probability, stderr)` triples; stderr is None except
    /// for `"mc"`.
    #[pyo3(signature = (times, method="exact", budget=20, samples=100_000, seed=None))]
    fn failure_probability(
        &self,
        times: Vec<f64>,
        method: &str,
        budget: usize,
        samples: u64,
        seed: Option<u64>,
    ) -> PyResult<Vec<(f64, f64, Option<f64>)>> {
        let model = FailureModel::from_complex(&self.inner).map_err(value_err)?;
        let curve = match method {
            "brute" => {
                prob_failure_bruteforce(&self.inner, &model, &times, 20).map_err(value_err)?
            }
            "exact" | "mc" => {
                let report =
                    cake_or_death(&self.inner, &DeathSetOptions::default()).map_err(value_err)?;
                if let Some(size) = report.truncated_at_size {
                    return Err(value_err(format!(
                        "death-set enumeration truncated at size {size}; result would be a lower bound"
                    )));
                }
                if method == "exact" {
                    prob_failure_exact(
                        &report.minimal_death_sets,
                        &report.interior,
                        &model,
                        &times,
                        budget,
                    )
                    .map_err(value_err)?
                } else {
                    let seed =
                        seed.ok_or_else(|| value_err("seed is required for method=\"mc\""))?;
                    prob_failure_mc(
                        &report.minimal_death_sets,
                        &report.interior,
                        &model,
                        &times,
                        samples,
                        seed,
                    )
                    .map_err(value_err)?
                }
            }
            other => return Err(value_err(format!("unknown method {other:?}"))),
        };
        Ok(curve
            .points
            .iter()
            .map(|p| (p.t, p.probability, p.stderr))
            .collect())
    }

    /// Start live monitoring of this complex.
    fn monitor(&self) -> PyResult<Monitor> {
        Ok(Monitor {
            state: init_monitor(&self.inner).map_err(value_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Complex(vertices={}, edges={}, triangles={})",
            self.inner.vertex_count(),
            self.inner.edge_count(),
            self.inner.triangle_count()
        )
    }
}

/// What the monitor did with one failure event.
#[pyclass]
struct Event {
    #[pyo3(get)]
    time: f64,
    #[pyo3(get)]
    vertex: String,
    #[pyo3(get)]
    fence: bool,
    /// Link flag of the dying vertex; None for fence deaths.
    #[pyo3(get)]
    was_flagged: Option<bool>,
    #[pyo3(get)]
    rechecked: bool,
    #[pyo3(get)]
    criterion_pass: Option<bool>,
    #[pyo3(get)]
    warnings: Vec<String>,
}

#[pymethods]
impl Event {
    fn __repr__(&self) -> String {
        format!(
            "Event(time={}, vertex={:?}, rechecked={}, criterion_pass={:?})",
            self.time, self.vertex, self.rechecked, self.criterion_pass
        )
    }
}

/// Live monitor: feed it deaths in time order; it tracks links and link
/// flags incrementally and re-checks the full criterion when needed.
#[pyclass]
struct Monitor {
    state: MonitorState,
}

#[pymethods]
impl Monitor {
    /// Startup warnings (e.g. nonzero second homology weakens link flags).
    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.state.init_warnings().to_vec()
    }

    /// `"running"` or `"criterion-failed"`.
    #[getter]
    fn status(&self) -> &'static str {
        match self.state.status() {
            MonitorStatus::Running => "running",
            MonitorStatus::CriterionFailed { .. } => "criterion-failed",
        }
    }

    /// `(time, vertex)` of the death that broke coverage, if any.
    #[getter]
    fn failure(&self) -> Option<(f64, String)> {
        match self.state.status() {
            MonitorStatus::Running => None,
            MonitorStatus::CriterionFailed { time, vertex } => Some((*time, vertex.clone())),
        }
    }

    /// Labels of the vertices that have died so far, in death order.
    #[getter]
    fn dead(&self) -> Vec<String> {
        self.state.dead().to_vec()
    }

    /// `(h1, h2)` of the current live complex, recomputed on demand.
    fn homology_ranks(&self) -> (usize, usize) {
        self.state.homology_ranks()
    }

    /// Current link flag of a live vertex, or None for dead/unknown labels.
    fn flagged(&self, label: &str) -> Option<bool> {
        let v = self.state.complex().id_of(label)?;
        self.state.flagged(v)
    }

    /// Process one death. Times must be non-decreasing; fails after the
    /// criterion has already failed or for unknown/dead/fence-adjacent
    /// misuse.
    fn process(&mut self, time: f64, vertex: &str) -> PyResult<Event> {
        let ev = FailureEvent {
            time,
            vertex: vertex.to_string(),
        };
        let r = self.state.process_failure(&ev).map_err(value_err)?;
        Ok(Event {
            time: r.time,
            vertex: r.vertex,
            fence: r.fence,
            was_flagged: r.was_flagged,
            rechecked: r.rechecked,
            criterion_pass: r.criterion_pass,
            warnings: r.warnings,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Monitor(status={:?}, dead={})",
            self.status(),
            self.state.dead().len()
        )
    }
}

/// Generate a synthetic instance: a fence sampled along a convex polygon
/// boundary plus uniform interior sensors, with edges between nodes closer
/// than `r_b`. Returns `(graph, r_c, warnings)`; output is deterministic in
/// `seed`.
#[pyfunction]
#[pyo3(signature = (polygon, n_interior, r_b, seed, r_c=None, fence_spacing=None, failure=None))]
fn generate_instance(
    polygon: Vec<(f64, f64)>,
    n_interior: usize,
    r_b: f64,
    seed: u64,
    r_c: Option<f64>,
    fence_spacing: Option<f64>,
    failure: Option<&str>,
) -> PyResult<(Graph, f64, Vec<String>)> {
    let poly = ConvexPolygon::new(polygon.into_iter().map(|(x, y)| [x, y]).collect())
        .map_err(value_err)?;
    let spec = GeneratorSpec {
        polygon: poly,
        n_interior,
        r_b,
        r_c,
        fence_spacing,
        seed,
        failure: parse_failure(failure)?,
    };
    let out = generate(&spec).map_err(value_err)?;
    Ok((Graph { inner: out.graph }, out.r_c, out.warnings))
}

/// Sanity-check a complex against the independent linear-system oracle;
/// returns `(passes, kernel_dim)`.
#[pyfunction]
fn oracle_check(k: &Complex) -> (bool, usize) {
    let o = criterion_oracle(&k.inner);
    (o.pass, o.kernel_dim)
}

#[pymodule]
fn covfail_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Complex>()?;
    m.add_class::<CheckResult>()?;
    m.add_class::<DeathSets>()?;
    m.add_class::<Event>()?;
    m.add_class::<Monitor>()?;
    m.add_function(wrap_pyfunction!(generate_instance, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_check, m)?)?;
    Ok(())
}
