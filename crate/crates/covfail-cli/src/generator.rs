//! Synthetic instance generator.
//!
//! Places fence nodes along the boundary of a convex domain polygon with
//! consecutive spacing strictly below the broadcast radius, scatters interior
//! sensors uniformly in the domain, and wires edges by broadcast distance.
//! Fully deterministic per seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use covfail::complex::{rips_graph_from_points, CommunicationGraph, ComplexError, NodeSpec};
use covfail::probability::Distribution;

use crate::coverage::ConvexPolygon;

/// Ratio r_c/r_b below which a pass of the criterion no longer certifies
/// geometric coverage.
pub const MIN_COVER_RATIO: f64 = 0.577_350_269_189_625_8; // 1/√3

#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub polygon: ConvexPolygon,
    pub n_interior: usize,
    pub r_b: f64,
    /// Cover radius; defaults to r_b/√3, the smallest value the coverage
    /// guarantee supports. Smaller overrides generate a warning.
    pub r_c: Option<f64>,
    /// Upper bound on consecutive fence spacing; defaults to r_b/2.
    pub fence_spacing: Option<f64>,
    pub seed: u64,
    /// Failure distribution stamped on every interior sensor.
    pub failure: Option<Distribution>,
}

#[derive(Error, Debug)]
pub enum GeneratorError {
    #[error("broadcast radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("fence spacing must lie strictly between 0 and the broadcast radius, got {0}")]
    BadSpacing(f64),
    #[error("cover radius must be positive and finite, got {0}")]
    BadCoverRadius(f64),
    #[error("could not sample interior points; domain too thin for rejection sampling")]
    DomainTooThin,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug)]
pub struct Generated {
    pub graph: CommunicationGraph,
    pub r_c: f64,
    pub warnings: Vec<String>,
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated, GeneratorError> {
    if !spec.r_b.is_finite() || spec.r_b <= 0.0 {
        return Err(GeneratorError::BadRadius(spec.r_b));
    }
    let spacing = spec.fence_spacing.unwrap_or(spec.r_b / 2.0);
    if !spacing.is_finite() || spacing <= 0.0 || spacing >= spec.r_b {
        return Err(GeneratorError::BadSpacing(spacing));
    }
    let mut warnings = Vec::new();
    let floor = spec.r_b * MIN_COVER_RATIO;
    let r_c = match spec.r_c {
        None => floor,
        Some(rc) => {
            if !rc.is_finite() || rc <= 0.0 {
                return Err(GeneratorError::BadCoverRadius(rc));
            }
            if rc < floor {
                warnings.push(format!(
                    "cover radius {rc} is below r_b/\u{221a}3 \u{2248} {floor:.6}; \
                     a passing criterion no longer certifies coverage"
                ));
            }
            rc
        }
    };

    let mut nodes: Vec<NodeSpec> = Vec::new();
    let boundary = spec.polygon.vertices();
    for i in 0..boundary.len() {
        let p = boundary[i];
        let q = boundary[(i + 1) % boundary.len()];
        let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
        let pieces = (len / spacing).ceil().max(1.0) as usize;
        for j in 0..pieces {
            let t = j as f64 / pieces as f64;
            nodes.push(NodeSpec {
                label: format!("f{}", nodes.len() + 1),
                position: Some([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]),
                failure: None,
            });
        }
    }
    let fence_labels: Vec<String> = nodes.iter().map(|n| n.label.clone()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = spec.polygon.bounding_box();
    for i in 0..spec.n_interior {
        let mut attempts = 0;
        let position = loop {
            let p = [
                rng.random_range(lo[0]..hi[0]),
                rng.random_range(lo[1]..hi[1]),
            ];
            if spec.polygon.contains(p) {
                break p;
            }
            attempts += 1;
            if attempts > 100_000 {
                return Err(GeneratorError::DomainTooThin);
            }
        };
        nodes.push(NodeSpec {
            label: format!("s{}", i + 1),
            position: Some(position),
            failure: spec.failure,
        });
    }

    let fence_refs: Vec<&str> = fence_labels.iter().map(String::as_str).collect();
    let graph = rips_graph_from_points(&nodes, &fence_refs, spec.r_b)?;
    Ok(Generated {
        graph,
        r_c,
        warnings,
    })
}
