//! Failure-probability computation from minimal death sets.
//!
//! Coverage fails by time `t` exactly when some minimal death set has
//! entirely failed, so the probability is an inclusion-exclusion sum over
//! unions of minimal death sets. A Monte Carlo estimator and an exhaustive
//! subset enumeration serve as independent cross-checks.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ComplexError, SimplicialComplex2, VertexId};
use crate::deathsets::{InteriorIndex, SubsetKey};
use crate::persistence::criterion_oracle;

/// Lifetime distribution of a single sensor; `cdf(t)` is the probability
/// that the sensor has failed by time `t`.
#[derive(Copy, Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distribution {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Fixed { p: f64 },
}

impl Distribution {
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match *self {
            Distribution::Exponential { rate } => 1.0 - (-rate * t).exp(),
            Distribution::Weibull { shape, scale } => 1.0 - (-(t / scale).powf(shape)).exp(),
            Distribution::Fixed { p } => p,
        }
    }

    pub fn validate(&self) -> Result<(), ProbabilityError> {
        let bad = |msg: String| Err(ProbabilityError::InvalidParameter(msg));
        match *self {
            Distribution::Exponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return bad(format!("exponential rate must be positive, got {rate}"));
                }
            }
            Distribution::Weibull { shape, scale } => {
                if !(shape > 0.0 && shape.is_finite()) {
                    return bad(format!("weibull shape must be positive, got {shape}"));
                }
                if !(scale > 0.0 && scale.is_finite()) {
                    return bad(format!("weibull scale must be positive, got {scale}"));
                }
            }
            Distribution::Fixed { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return bad(format!("fixed probability must lie in [0, 1], got {p}"));
                }
            }
        }
        Ok(())
    }
}

/// Text form used in graph files: `exp:<rate>`, `weibull:<shape>:<scale>`,
/// or `fixed:<p>`.
impl FromStr for Distribution {
    type Err = ProbabilityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.parse::<f64>().map_err(|_| {
                ProbabilityError::InvalidParameter(format!("bad number {p:?} in {s:?}"))
            })
        };
        let dist = match parts.as_slice() {
            ["exp", r] => Distribution::Exponential { rate: num(r)? },
            ["weibull", k, l] => Distribution::Weibull {
                shape: num(k)?,
                scale: num(l)?,
            },
            ["fixed", p] => Distribution::Fixed { p: num(p)? },
            _ => {
                return Err(ProbabilityError::InvalidParameter(format!(
                    "unrecognized distribution {s:?}"
                )))
            }
        };
        dist.validate()?;
        Ok(dist)
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Distribution::Exponential { rate } => write!(f, "exp:{rate}"),
            Distribution::Weibull { shape, scale } => write!(f, "weibull:{shape}:{scale}"),
            Distribution::Fixed { p } => write!(f, "fixed:{p}"),
        }
    }
}

#[derive(Error, Debug)]
pub enum ProbabilityError {
    #[error("interior vertex {0:?} has no failure distribution")]
    MissingDistribution(String),
    #[error("{count} minimal death sets exceed the inclusion-exclusion budget of {budget}")]
    TooManySets { count: usize, budget: usize },
    #[error("{0} interior vertices exceed the brute-force cap of {1}")]
    TooLargeForBrute(usize, usize),
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Per-vertex failure distributions for the interior of a complex.
#[derive(Clone, Debug, Default)]
pub struct FailureModel {
    map: BTreeMap<VertexId, Distribution>,
}

impl FailureModel {
    pub fn new() -> FailureModel {
        FailureModel::default()
    }

    pub fn insert(&mut self, v: VertexId, dist: Distribution) {
        self.map.insert(v, dist);
    }

    pub fn get(&self, v: VertexId) -> Option<Distribution> {
        self.map.get(&v).copied()
    }

    /// Collects the distributions attached to a complex's interior vertices,
    /// failing with the first missing vertex by label.
    pub fn from_complex(k: &SimplicialComplex2) -> Result<FailureModel, ProbabilityError> {
        let mut model = FailureModel::new();
        for v in k.interior_vertices() {
            let dist = k
                .failure(v)
                .ok_or_else(|| ProbabilityError::MissingDistribution(k.label(v).to_string()))?;
            dist.validate()?;
            model.insert(v, dist);
        }
        Ok(model)
    }

    fn cdfs(&self, interior: &InteriorIndex, t: f64) -> Result<Vec<f64>, ProbabilityError> {
        (0..interior.len())
            .map(|bit| {
                let v = interior.vertex(bit);
                self.get(v)
                    .map(|d| d.cdf(t))
                    .ok_or_else(|| ProbabilityError::MissingDistribution(format!("{v:?}")))
            })
            .collect()
    }
}

/// One evaluated time point. `stderr` is populated by the Monte Carlo
/// estimator only.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FailureCurve {
    pub method: String,
    pub points: Vec<CurvePoint>,
}

/// Neumaier compensated summation; inclusion-exclusion terms alternate in
/// sign and cancel heavily.
#[derive(Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Exact failure probability at each time via inclusion-exclusion over the
/// minimal death sets. The number of sets is capped by `budget` because the
/// sum has `2^d` terms.
pub fn prob_failure_exact(
    sets: &[SubsetKey],
    interior: &InteriorIndex,
    model: &FailureModel,
    times: &[f64],
    budget: usize,
) -> Result<FailureCurve, ProbabilityError> {
    let d = sets.len();
    if d > budget {
        return Err(ProbabilityError::TooManySets { count: d, budget });
    }
    // Union of each subset of the antichain, built incrementally: the union
    // for mask extends the union for mask without its lowest set.
    let mut unions: Vec<SubsetKey> = Vec::with_capacity(1 << d);
    unions.push(SubsetKey::EMPTY);
    for mask in 1usize..1 << d {
        let low = mask.trailing_zeros() as usize;
        unions.push(unions[mask & (mask - 1)].union(sets[low]));
    }
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let cdf = model.cdfs(interior, t)?;
        let mut acc = CompensatedSum::default();
        for (mask, union) in unions.iter().enumerate().skip(1) {
            let mut term = 1.0;
            for bit in union.bits() {
                term *= cdf[bit];
            }
            if mask.count_ones() % 2 == 0 {
                term = -term;
            }
            acc.add(term);
        }
        points.push(CurvePoint {
            t,
            probability: acc.value().clamp(0.0, 1.0),
            stderr: None,
        });
    }
    Ok(FailureCurve {
        method: "exact".to_string(),
        points,
    })
}

const MC_CHUNK: u64 = 4096;

fn substream_seed(master: u64, index: u64) -> u64 {
    // splitmix64 finalizer over master offset by the golden-ratio gamma;
    // gives independent substreams per chunk regardless of thread count.
    let mut z = master.wrapping_add((index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Monte Carlo estimate of the failure probability at each time. Sampling is
/// split into fixed-size chunks with per-chunk seeds, so results depend only
/// on `seed` and `samples`, not on how chunks are scheduled across threads.
pub fn prob_failure_mc(
    sets: &[SubsetKey],
    interior: &InteriorIndex,
    model: &FailureModel,
    times: &[f64],
    samples: u64,
    seed: u64,
) -> Result<FailureCurve, ProbabilityError> {
    let mut relevant = SubsetKey::EMPTY;
    for &s in sets {
        relevant = relevant.union(s);
    }
    let relevant_bits: Vec<usize> = relevant.bits().collect();
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let cdf = model.cdfs(interior, t)?;
        let chunks = samples.div_ceil(MC_CHUNK);
        let hits: u64 = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, chunk));
                let lo = chunk * MC_CHUNK;
                let hi = (lo + MC_CHUNK).min(samples);
                let mut hits = 0u64;
                for _ in lo..hi {
                    let mut failed = SubsetKey::EMPTY;
                    for &bit in &relevant_bits {
                        if rng.random::<f64>() < cdf[bit] {
                            failed = failed.with(bit);
                        }
                    }
                    if sets.iter().any(|s| s.is_subset_of(failed)) {
                        hits += 1;
                    }
                }
                hits
            })
            .sum();
        let p = hits as f64 / samples as f64;
        points.push(CurvePoint {
            t,
            probability: p,
            stderr: Some((p * (1.0 - p) / samples as f64).sqrt()),
        });
    }
    Ok(FailureCurve {
        method: "monte-carlo".to_string(),
        points,
    })
}

/// Reference implementation: sums the criterion indicator over every interior
/// subset, weighting each subset by its probability under the model. Bypasses
/// death-set enumeration entirely; each subset is judged by the linear-system
/// oracle on the pruned complex.
pub fn prob_failure_bruteforce(
    k: &SimplicialComplex2,
    model: &FailureModel,
    times: &[f64],
    max_n: usize,
) -> Result<FailureCurve, ProbabilityError> {
    let interior =
        InteriorIndex::new(k).map_err(|_| ProbabilityError::TooLargeForBrute(129, 128))?;
    let n = interior.len();
    if n > max_n {
        return Err(ProbabilityError::TooLargeForBrute(n, max_n));
    }
    let mut fails = vec![false; 1 << n];
    for mask in 0..1u128 << n {
        let dead = interior.vertices_of(SubsetKey(mask));
        let pruned = k.remove_vertices(&dead)?;
        fails[mask as usize] = !criterion_oracle(&pruned).pass;
    }
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let cdf = model.cdfs(&interior, t)?;
        let mut acc = CompensatedSum::default();
        for (mask, &failed) in fails.iter().enumerate() {
            if !failed {
                continue;
            }
            let mut weight = 1.0;
            for (bit, &p) in cdf.iter().enumerate() {
                weight *= if mask >> bit & 1 == 1 { p } else { 1.0 - p };
            }
            acc.add(weight);
        }
        points.push(CurvePoint {
            t,
            probability: acc.value().clamp(0.0, 1.0),
            stderr: None,
        });
    }
    Ok(FailureCurve {
        method: "brute-force".to_string(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_rips_2skeleton;
    use crate::deathsets::{cake_or_death, DeathSetOptions};
    use crate::fixtures;
    use crate::testutil::random_fenced_graph;

    fn model_with(k: &SimplicialComplex2, dist: Distribution) -> FailureModel {
        let mut m = FailureModel::new();
        for v in k.interior_vertices() {
            m.insert(v, dist);
        }
        m
    }

    fn exact_curve(k: &SimplicialComplex2, model: &FailureModel, times: &[f64]) -> FailureCurve {
        let report = cake_or_death(k, &DeathSetOptions::default()).unwrap();
        prob_failure_exact(
            &report.minimal_death_sets,
            &report.interior,
            model,
            times,
            20,
        )
        .unwrap()
    }

    #[test]
    fn wheel_failure_probability_is_the_hub_probability() {
        let k = fixtures::wheel(6);
        let model = model_with(&k, Distribution::Fixed { p: 0.3 });
        let curve = exact_curve(&k, &model, &[1.0]);
        assert!((curve.points[0].probability - 0.3).abs() < 1e-15);
    }

    #[test]
    fn twin_fails_when_either_hub_fails() {
        let k = fixtures::twin();
        let model = model_with(&k, Distribution::Fixed { p: 0.5 });
        let curve = exact_curve(&k, &model, &[1.0]);
        assert!((curve.points[0].probability - 0.75).abs() < 1e-15);
    }

    #[test]
    fn pair_fails_only_when_both_hubs_fail() {
        let k = fixtures::pair();
        let model = model_with(&k, Distribution::Fixed { p: 0.5 });
        let curve = exact_curve(&k, &model, &[1.0]);
        assert!((curve.points[0].probability - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exact_matches_brute_force_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        use rand::Rng;
        let times = [0.1, 0.5, 1.0, 2.0, 5.0];
        for trial in 0..25 {
            let g = random_fenced_graph(&mut rng, 6, trial % 4 + 1, 0.6);
            let k = build_rips_2skeleton(&g).unwrap();
            let mut model = FailureModel::new();
            for v in k.interior_vertices() {
                let dist = match rng.random_range(0..3) {
                    0 => Distribution::Exponential {
                        rate: rng.random_range(0.2..2.0),
                    },
                    1 => Distribution::Weibull {
                        shape: rng.random_range(0.5..3.0),
                        scale: rng.random_range(0.5..2.0),
                    },
                    _ => Distribution::Fixed {
                        p: rng.random_range(0.0..1.0),
                    },
                };
                model.insert(v, dist);
            }
            let exact = exact_curve(&k, &model, &times);
            let brute = prob_failure_bruteforce(&k, &model, &times, 14).unwrap();
            for (a, b) in exact.points.iter().zip(&brute.points) {
                assert!(
                    (a.probability - b.probability).abs() < 1e-12,
                    "trial {trial} t {}: {} vs {}",
                    a.t,
                    a.probability,
                    b.probability
                );
            }
        }
    }

    #[test]
    fn monte_carlo_agrees_with_exact_within_three_sigma() {
        let k = fixtures::twin();
        let model = model_with(&k, Distribution::Exponential { rate: 1.0 });
        let times = [0.25, 1.0, 3.0];
        let report = cake_or_death(&k, &DeathSetOptions::default()).unwrap();
        let exact = prob_failure_exact(
            &report.minimal_death_sets,
            &report.interior,
            &model,
            &times,
            20,
        )
        .unwrap();
        let mc = prob_failure_mc(
            &report.minimal_death_sets,
            &report.interior,
            &model,
            &times,
            100_000,
            7,
        )
        .unwrap();
        for (a, b) in exact.points.iter().zip(&mc.points) {
            let sigma = b.stderr.unwrap().max(1e-9);
            assert!(
                (a.probability - b.probability).abs() <= 3.0 * sigma,
                "t {}: exact {} mc {} sigma {}",
                a.t,
                a.probability,
                b.probability,
                sigma
            );
        }
    }

    #[test]
    fn monte_carlo_is_deterministic_in_the_seed() {
        let k = fixtures::pair();
        let model = model_with(
            &k,
            Distribution::Weibull {
                shape: 1.5,
                scale: 2.0,
            },
        );
        let report = cake_or_death(&k, &DeathSetOptions::default()).unwrap();
        let run = || {
            prob_failure_mc(
                &report.minimal_death_sets,
                &report.interior,
                &model,
                &[0.5, 2.0],
                20_000,
                99,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        for (x, y) in a.points.iter().zip(&b.points) {
            assert_eq!(x.probability, y.probability);
            assert_eq!(x.stderr, y.stderr);
        }
    }

    #[test]
    fn degenerate_reports_give_constant_curves() {
        // No death sets: failure never happens. Empty-set report: certain.
        let k = fixtures::wheel(6);
        let report = cake_or_death(&k, &DeathSetOptions::default()).unwrap();
        let model = model_with(&k, Distribution::Fixed { p: 0.4 });
        let none = prob_failure_exact(&[], &report.interior, &model, &[1.0, 2.0], 20).unwrap();
        assert!(none.points.iter().all(|p| p.probability == 0.0));
        let certain = prob_failure_exact(
            &[SubsetKey::EMPTY],
            &report.interior,
            &model,
            &[1.0, 2.0],
            20,
        )
        .unwrap();
        assert!(certain.points.iter().all(|p| p.probability == 1.0));
    }

    #[test]
    fn negative_times_never_fail() {
        let d = Distribution::Exponential { rate: 2.0 };
        assert_eq!(d.cdf(-1.0), 0.0);
        let w = Distribution::Weibull {
            shape: 2.0,
            scale: 1.0,
        };
        assert_eq!(w.cdf(-0.5), 0.0);
    }

    #[test]
    fn distribution_text_round_trips() {
        for s in ["exp:0.5", "weibull:2:1.5", "fixed:0.3"] {
            let d: Distribution = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("exp:-1".parse::<Distribution>().is_err());
        assert!("fixed:1.5".parse::<Distribution>().is_err());
        assert!("gamma:1:2".parse::<Distribution>().is_err());
        assert!("weibull:2".parse::<Distribution>().is_err());
    }

    #[test]
    fn set_budget_is_enforced() {
        let k = fixtures::twin();
        let report = cake_or_death(&k, &DeathSetOptions::default()).unwrap();
        let model = model_with(&k, Distribution::Fixed { p: 0.5 });
        let err = prob_failure_exact(
            &report.minimal_death_sets,
            &report.interior,
            &model,
            &[1.0],
            1,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ProbabilityError::TooManySets {
                count: 2,
                budget: 1
            }
        ));
    }

    #[test]
    fn missing_distribution_is_reported_by_label() {
        let k = fixtures::wheel(6);
        let model = FailureModel::new();
        let report = cake_or_death(&k, &DeathSetOptions::default()).unwrap();
        let err = prob_failure_exact(
            &report.minimal_death_sets,
            &report.interior,
            &model,
            &[1.0],
            20,
        )
        .unwrap_err();
        assert!(matches!(err, ProbabilityError::MissingDistribution(_)));
    }
}
