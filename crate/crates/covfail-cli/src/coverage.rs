//! Geometric ground truth: does a union of disks cover a convex polygon?
//!
//! The check samples the polygon on a square grid, so it can miss gaps
//! smaller than the step `h`. That is good enough for soundness sweeps,
//! where any uncovered sample is a definite counterexample.

use thiserror::Error;

#[derive(Error, Debug, PartialEq)]
pub enum CoverageError {
    #[error("domain polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("domain polygon is not convex at vertex {0}")]
    NotConvex(usize),
    #[error("domain polygon has zero area")]
    Degenerate,
    #[error("grid step must be positive and finite, got {0}")]
    BadStep(f64),
}

/// A convex polygon given by its vertices in counter-clockwise order.
#[derive(Clone, Debug)]
pub struct ConvexPolygon {
    vertices: Vec<[f64; 2]>,
}

impl ConvexPolygon {
    /// Accepts either winding order and normalizes to counter-clockwise.
    pub fn new(mut vertices: Vec<[f64; 2]>) -> Result<ConvexPolygon, CoverageError> {
        if vertices.len() < 3 {
            return Err(CoverageError::TooFewVertices(vertices.len()));
        }
        let doubled_area: f64 = vertices
            .iter()
            .zip(vertices.iter().cycle().skip(1))
            .map(|(p, q)| p[0] * q[1] - q[0] * p[1])
            .sum();
        if doubled_area == 0.0 || !doubled_area.is_finite() {
            return Err(CoverageError::Degenerate);
        }
        if doubled_area < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            let p = vertices[i];
            let q = vertices[(i + 1) % n];
            let r = vertices[(i + 2) % n];
            if cross(p, q, r) < 0.0 {
                return Err(CoverageError::NotConvex((i + 1) % n));
            }
        }
        Ok(ConvexPolygon { vertices })
    }

    pub fn unit_square() -> ConvexPolygon {
        ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Point-in-polygon for the closed region (boundary counts as inside).
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0.0)
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Total boundary length.
    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| dist(self.vertices[i], self.vertices[(i + 1) % n]))
            .sum()
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

/// Verdict of the grid sweep. `worst_uncovered` is the sample farthest from
/// every disk center, present exactly when `covered` is false.
#[derive(Clone, Debug)]
pub struct CoverageOutcome {
    pub covered: bool,
    pub worst_uncovered: Option<[f64; 2]>,
    pub samples: usize,
}

/// Checks whether the disks of radius `r_c` about `positions` cover `poly`,
/// sampling on a square grid of step `h` (boundary-inclusive).
pub fn coverage_oracle(
    positions: &[[f64; 2]],
    r_c: f64,
    poly: &ConvexPolygon,
    h: f64,
) -> Result<CoverageOutcome, CoverageError> {
    if !h.is_finite() || h <= 0.0 {
        return Err(CoverageError::BadStep(h));
    }
    let (lo, hi) = poly.bounding_box();
    let nx = ((hi[0] - lo[0]) / h).ceil() as usize + 1;
    let ny = ((hi[1] - lo[1]) / h).ceil() as usize + 1;
    let mut worst: Option<([f64; 2], f64)> = None;
    let mut samples = 0usize;
    for iy in 0..=ny {
        for ix in 0..=nx {
            let p = [
                (lo[0] + ix as f64 * h).min(hi[0]),
                (lo[1] + iy as f64 * h).min(hi[1]),
            ];
            if !poly.contains(p) {
                continue;
            }
            samples += 1;
            let mut in_reach = false;
            let mut nearest = f64::INFINITY;
            for &q in positions {
                let d = dist(p, q);
                if d <= r_c {
                    in_reach = true;
                    break;
                }
                nearest = nearest.min(d);
            }
            if !in_reach && worst.is_none_or(|(_, d)| nearest > d) {
                worst = Some((p, nearest));
            }
        }
    }
    Ok(CoverageOutcome {
        covered: worst.is_none(),
        worst_uncovered: worst.map(|(p, _)| p),
        samples,
    })
}
