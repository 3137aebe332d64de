//! Live monitoring of a running network under sensor failures.
//!
//! The monitor keeps one reduced boundary factorisation for the lifetime of
//! the stream. Each interior death parks the dead vertex's triangle columns
//! behind the live prefix; whether the criterion is actually re-checked is
//! decided by a cheap local flag, the first mod-2 homology of the dying
//! vertex's link. The flag is only sound when the complex has no global
//! 1- or 2-dimensional homology, so whenever those ranks are nonzero the
//! monitor falls back to re-checking after every death. A fence death ends
//! the run immediately: the fence cycle itself is gone.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{graph_betti, ComplexError, LinkGraph, SimplicialComplex2, VertexId};
use crate::persistence::{
    build_boundary_matrix, check_criterion, check_criterion_prefix, homology_ranks, reduce,
    FiltrationOrder, PersistenceError, RUState, Simplex,
};

/// One failure in the input stream: a sensor label and the time it died.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct FailureEvent {
    pub time: f64,
    pub vertex: String,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum MonitorStatus {
    Running,
    CriterionFailed { time: f64, vertex: String },
}

/// What the monitor did with one event.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EventRecord {
    pub time: f64,
    pub vertex: String,
    pub fence: bool,
    /// The link flag of the dying vertex, absent for fence deaths.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub was_flagged: Option<bool>,
    /// Whether the full criterion was re-checked for this event.
    pub rechecked: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion_pass: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

/// Result of replaying a stream: per-event records, the final status, and
/// any events left unprocessed after the criterion failed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonitorVerdict {
    pub records: Vec<EventRecord>,
    pub status: MonitorStatus,
    pub unprocessed: Vec<FailureEvent>,
}

#[derive(Error, Debug)]
pub enum MonitorError {
    #[error("the network fails the coverage criterion before any event")]
    BaselineFailure,
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("vertex {0:?} has already failed")]
    AlreadyDead(String),
    #[error("event {index} at time {time} precedes time {prev}")]
    OutOfOrderEvent { index: usize, time: f64, prev: f64 },
    #[error("the monitor already reported a criterion failure")]
    Terminated,
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Running state of the monitor. Holds the live complex, the shared reduced
/// factorisation with its live-column prefix, and per-vertex link graphs
/// maintained incrementally.
pub struct MonitorState {
    complex: SimplicialComplex2,
    order: FiltrationOrder,
    ru: RUState,
    live_cols: usize,
    links: BTreeMap<VertexId, LinkGraph>,
    betti: BTreeMap<VertexId, (usize, usize)>,
    known_labels: BTreeSet<String>,
    dead: Vec<String>,
    h1_rank: usize,
    h2_rank: usize,
    last_time: f64,
    status: MonitorStatus,
    init_warnings: Vec<String>,
}

/// Builds the monitor, failing when the initial network is already uncovered.
pub fn init_monitor(k: &SimplicialComplex2) -> Result<MonitorState, MonitorError> {
    let (order, d) = build_boundary_matrix(k);
    let ru = reduce(&d);
    if check_criterion(&ru, &order).is_none() {
        return Err(MonitorError::BaselineFailure);
    }
    let live_cols = ru.len();
    let mut links = BTreeMap::new();
    let mut betti = BTreeMap::new();
    for v in k.interior_vertices() {
        let lg = k.link(v);
        betti.insert(v, graph_betti(&lg));
        links.insert(v, lg);
    }
    let (h1_rank, h2_rank) = homology_ranks(k);
    let mut init_warnings = Vec::new();
    if h2_rank > 0 {
        init_warnings.push(format!(
            "second homology rank is {h2_rank}; link flags may miss failures, re-checking every death"
        ));
    }
    if h1_rank > 0 {
        init_warnings.push(format!(
            "first homology rank is {h1_rank}; link flags may miss failures, re-checking every death"
        ));
    }
    Ok(MonitorState {
        complex: k.clone(),
        order,
        ru,
        live_cols,
        links,
        betti,
        known_labels: k.vertices().map(|v| k.label(v).to_string()).collect(),
        dead: Vec::new(),
        h1_rank,
        h2_rank,
        last_time: f64::NEG_INFINITY,
        status: MonitorStatus::Running,
        init_warnings,
    })
}

impl MonitorState {
    pub fn status(&self) -> &MonitorStatus {
        &self.status
    }

    pub fn complex(&self) -> &SimplicialComplex2 {
        &self.complex
    }

    /// Warnings about modelling assumptions, produced at initialisation.
    pub fn init_warnings(&self) -> &[String] {
        &self.init_warnings
    }

    /// Current link flag of an interior vertex: set when the link has a
    /// 1-cycle, meaning the vertex may be load-bearing for coverage.
    pub fn flagged(&self, v: VertexId) -> Option<bool> {
        self.betti.get(&v).map(|&(_, b1)| b1 > 0)
    }

    pub fn link_of(&self, v: VertexId) -> Option<&LinkGraph> {
        self.links.get(&v)
    }

    pub fn dead(&self) -> &[String] {
        &self.dead
    }

    pub fn homology_ranks(&self) -> (usize, usize) {
        (self.h1_rank, self.h2_rank)
    }

    fn conservative(&self) -> bool {
        self.h1_rank > 0 || self.h2_rank > 0
    }

    /// Processes one death. Interior deaths always park the vertex's
    /// triangle columns; the criterion is re-checked when the vertex was
    /// flagged, when its link was disconnected, or when global homology makes
    /// the flags unreliable. Fence deaths fail the run outright.
    pub fn process_failure(&mut self, ev: &FailureEvent) -> Result<EventRecord, MonitorError> {
        if let MonitorStatus::CriterionFailed { .. } = self.status {
            return Err(MonitorError::Terminated);
        }
        if ev.time < self.last_time {
            return Err(MonitorError::OutOfOrderEvent {
                index: self.dead.len(),
                time: ev.time,
                prev: self.last_time,
            });
        }
        let Some(v) = self.complex.id_of(&ev.vertex) else {
            return Err(if self.known_labels.contains(&ev.vertex) {
                MonitorError::AlreadyDead(ev.vertex.clone())
            } else {
                MonitorError::UnknownVertex(ev.vertex.clone())
            });
        };
        self.last_time = ev.time;
        if self.complex.is_fence(v) {
            self.status = MonitorStatus::CriterionFailed {
                time: ev.time,
                vertex: ev.vertex.clone(),
            };
            return Ok(EventRecord {
                time: ev.time,
                vertex: ev.vertex.clone(),
                fence: true,
                was_flagged: None,
                rechecked: false,
                criterion_pass: Some(false),
                warnings: vec!["fence sensor failed; the fence cycle is gone".to_string()],
            });
        }

        let (link_b0, link_b1) = self.betti[&v];
        let was_flagged = link_b1 > 0;
        let mut warnings = Vec::new();
        let recheck = if was_flagged {
            true
        } else if self.conservative() {
            warnings.push(
                "re-checking an unflagged death because global homology is nonzero".to_string(),
            );
            true
        } else if link_b0 > 1 {
            warnings.push(
                "re-checking an unflagged death because its link is disconnected".to_string(),
            );
            true
        } else {
            false
        };

        let doomed: BTreeSet<u32> = self
            .complex
            .triangles_containing(v)
            .into_iter()
            .map(|t| self.order.id_of(&Simplex::Triangle(t)).unwrap() as u32)
            .collect();
        self.ru.move_triangles_to_end(&doomed)?;
        self.live_cols -= doomed.len();

        let criterion_pass = if recheck {
            Some(check_criterion_prefix(&self.ru, &self.order, self.live_cols).is_some())
        } else {
            None
        };

        // Update the live complex and the links of surviving neighbours.
        let affected: Vec<VertexId> = self
            .links
            .keys()
            .copied()
            .filter(|&u| u != v && self.links[&u].vertices.contains(&v))
            .collect();
        self.complex = self.complex.remove_vertices(&BTreeSet::from([v]))?;
        self.links.remove(&v);
        self.betti.remove(&v);
        for u in affected {
            let lg = self.links.get_mut(&u).unwrap();
            lg.remove_vertex(v);
            self.betti.insert(u, graph_betti(lg));
        }
        let (h1, h2) = homology_ranks(&self.complex);
        if h2 > self.h2_rank {
            warnings.push(format!("second homology rank grew to {h2}"));
        }
        if h1 > self.h1_rank {
            warnings.push(format!("first homology rank grew to {h1}"));
        }
        self.h1_rank = h1;
        self.h2_rank = h2;
        self.dead.push(ev.vertex.clone());

        if criterion_pass == Some(false) {
            self.status = MonitorStatus::CriterionFailed {
                time: ev.time,
                vertex: ev.vertex.clone(),
            };
        }
        Ok(EventRecord {
            time: ev.time,
            vertex: ev.vertex.clone(),
            fence: false,
            was_flagged: Some(was_flagged),
            rechecked: recheck,
            criterion_pass,
            warnings,
        })
    }
}

/// Replays an ordered event stream against a monitor. Stops at the first
/// criterion failure and returns the remaining events unprocessed. The whole
/// stream's ordering is validated before any event mutates the state.
pub fn replay(
    state: &mut MonitorState,
    events: &[FailureEvent],
) -> Result<MonitorVerdict, MonitorError> {
    let mut prev = state.last_time;
    for (index, ev) in events.iter().enumerate() {
        if ev.time < prev {
            return Err(MonitorError::OutOfOrderEvent {
                index,
                time: ev.time,
                prev,
            });
        }
        prev = ev.time;
    }
    let mut records = Vec::new();
    for (index, ev) in events.iter().enumerate() {
        records.push(state.process_failure(ev)?);
        if let MonitorStatus::CriterionFailed { .. } = state.status {
            return Ok(MonitorVerdict {
                records,
                status: state.status.clone(),
                unprocessed: events[index + 1..].to_vec(),
            });
        }
    }
    Ok(MonitorVerdict {
        records,
        status: state.status.clone(),
        unprocessed: Vec::new(),
    })
}
