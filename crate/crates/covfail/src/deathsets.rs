//! Enumeration of minimal death sets.
//!
//! A subset of interior sensors is a death set when removing it breaks the
//! coverage criterion, and Cake otherwise. Death sets are upward closed, so
//! the minimal ones form an antichain; they are found by a level-synchronous
//! breadth-first walk over subsets that only ever expands Cake sets. Each
//! candidate is classified by parking its doomed triangle columns behind the
//! live prefix of a shared reduced snapshot, never by re-reducing.

use std::collections::HashSet;

use rayon::prelude::*;
use std::collections::BTreeSet;
use thiserror::Error;

use crate::complex::{ComplexError, SimplicialComplex2, VertexId};
use crate::persistence::{
    build_boundary_matrix, check_criterion, check_criterion_prefix, criterion_oracle, reduce,
    FiltrationOrder, PersistenceError, RUState, Simplex,
};

/// Bit set over the interior vertices of a fixed complex, in ascending
/// vertex-id order. Canonical: equal subsets have equal keys.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct SubsetKey(pub u128);

impl SubsetKey {
    pub const EMPTY: SubsetKey = SubsetKey(0);

    pub fn contains(self, bit: usize) -> bool {
        self.0 >> bit & 1 == 1
    }

    pub fn with(self, bit: usize) -> SubsetKey {
        SubsetKey(self.0 | 1 << bit)
    }

    pub fn without(self, bit: usize) -> SubsetKey {
        SubsetKey(self.0 & !(1 << bit))
    }

    pub fn size(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset_of(self, other: SubsetKey) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: SubsetKey) -> SubsetKey {
        SubsetKey(self.0 | other.0)
    }

    pub fn bits(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(b)
        })
    }
}

/// Maps interior vertices to subset-key bit positions and back.
#[derive(Clone, Debug)]
pub struct InteriorIndex {
    vertices: Vec<VertexId>,
}

impl InteriorIndex {
    pub fn new(k: &SimplicialComplex2) -> Result<InteriorIndex, DeathSetError> {
        let vertices: Vec<VertexId> = k.interior_vertices().collect();
        if vertices.len() > 128 {
            return Err(DeathSetError::TooManyInterior(vertices.len()));
        }
        Ok(InteriorIndex { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, bit: usize) -> VertexId {
        self.vertices[bit]
    }

    pub fn bit_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&u| u == v)
    }

    pub fn key_of(&self, vs: &BTreeSet<VertexId>) -> Option<SubsetKey> {
        let mut key = SubsetKey::EMPTY;
        for &v in vs {
            key = key.with(self.bit_of(v)?);
        }
        Some(key)
    }

    pub fn vertices_of(&self, key: SubsetKey) -> BTreeSet<VertexId> {
        key.bits().map(|b| self.vertex(b)).collect()
    }

    pub fn labels_of(&self, key: SubsetKey, k: &SimplicialComplex2) -> Vec<String> {
        key.bits()
            .map(|b| k.label(self.vertex(b)).to_string())
            .collect()
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum DeathClass {
    Cake,
    Death,
}

#[derive(Error, Debug)]
pub enum DeathSetError {
    #[error("{0} interior vertices exceed the 128-bit subset key")]
    TooManyInterior(usize),
    #[error("{0} interior vertices exceed the brute-force cap of {1}")]
    TooLargeForBrute(usize, usize),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Options for [`cake_or_death`]. `budget` caps the number of classified
/// subsets; hitting it truncates the report rather than erroring.
#[derive(Clone, Debug)]
pub struct DeathSetOptions {
    pub max_size: Option<usize>,
    pub budget: usize,
    pub parallel: bool,
}

impl Default for DeathSetOptions {
    fn default() -> Self {
        DeathSetOptions {
            max_size: None,
            budget: 1_000_000,
            parallel: false,
        }
    }
}

/// Result of death-set enumeration. `minimal_death_sets` is an antichain
/// sorted by (size, bits). When the baseline check already fails, the empty
/// set is reported as the sole, degenerate death set.
#[derive(Clone, Debug)]
pub struct DeathSetReport {
    pub minimal_death_sets: Vec<SubsetKey>,
    pub interior: InteriorIndex,
    pub explored_total: usize,
    pub explored_cake_count: usize,
    pub truncated_at_size: Option<usize>,
    pub baseline_failed: bool,
}

impl DeathSetReport {
    pub fn set_labels(&self, k: &SimplicialComplex2) -> Vec<Vec<String>> {
        self.minimal_death_sets
            .iter()
            .map(|&key| self.interior.labels_of(key, k))
            .collect()
    }
}

/// Classifies one subset against a reduced snapshot: park the triangles that
/// touch it, then re-check the live prefix. The snapshot is cloned, so `s0`
/// can be reused across calls.
pub fn classify_subset(
    k: &SimplicialComplex2,
    order: &FiltrationOrder,
    s0: &RUState,
    interior: &InteriorIndex,
    key: SubsetKey,
) -> Result<DeathClass, PersistenceError> {
    let doomed = doomed_triangle_ids(k, order, interior, key);
    let mut s = s0.clone();
    s.move_triangles_to_end(&doomed)?;
    let live = s.len() - doomed.len();
    Ok(if check_criterion_prefix(&s, order, live).is_some() {
        DeathClass::Cake
    } else {
        DeathClass::Death
    })
}

fn doomed_triangle_ids(
    k: &SimplicialComplex2,
    order: &FiltrationOrder,
    interior: &InteriorIndex,
    key: SubsetKey,
) -> BTreeSet<u32> {
    let dead: BTreeSet<VertexId> = interior.vertices_of(key);
    k.triangles()
        .filter(|t| dead.iter().any(|&v| t.contains(v)))
        .map(|t| order.id_of(&Simplex::Triangle(t)).unwrap() as u32)
        .collect()
}

/// Finds all minimal death sets by breadth-first expansion of Cake sets.
///
/// A subset of size `k + 1` is enqueued only when all of its size-`k`
/// subsets were Cake, so every Death found is minimal and every minimal
/// death set within the size/budget limits is found.
pub fn cake_or_death(
    k: &SimplicialComplex2,
    opts: &DeathSetOptions,
) -> Result<DeathSetReport, DeathSetError> {
    let interior = InteriorIndex::new(k)?;
    let (order, d) = build_boundary_matrix(k);
    let s0 = reduce(&d);

    let mut explored_total = 1usize; // the baseline counts as a classification
    let mut explored_cake = 0usize;
    if check_criterion(&s0, &order).is_none() {
        return Ok(DeathSetReport {
            minimal_death_sets: vec![SubsetKey::EMPTY],
            interior,
            explored_total,
            explored_cake_count: explored_cake,
            truncated_at_size: None,
            baseline_failed: true,
        });
    }
    explored_cake += 1;

    let n = interior.len();
    let max_size = opts.max_size.unwrap_or(n).min(n);
    let mut minimal: Vec<SubsetKey> = Vec::new();
    let mut prev_cakes: HashSet<SubsetKey> = HashSet::from([SubsetKey::EMPTY]);
    let mut truncated_at_size = None;
    let mut search_complete = false;

    for size in 1..=max_size {
        let mut candidates: Vec<SubsetKey> = Vec::new();
        let mut seen: HashSet<SubsetKey> = HashSet::new();
        for &cake in &prev_cakes {
            for bit in 0..n {
                if cake.contains(bit) {
                    continue;
                }
                let cand = cake.with(bit);
                if !seen.insert(cand) {
                    continue;
                }
                if cand.bits().all(|b| prev_cakes.contains(&cand.without(b))) {
                    candidates.push(cand);
                }
            }
        }
        candidates.sort_unstable();
        if candidates.is_empty() {
            search_complete = true;
            break;
        }
        if explored_total + candidates.len() > opts.budget {
            truncated_at_size = Some(size);
            break;
        }
        let classify = |&cand: &SubsetKey| -> Result<(SubsetKey, DeathClass), PersistenceError> {
            Ok((cand, classify_subset(k, &order, &s0, &interior, cand)?))
        };
        let classified: Vec<(SubsetKey, DeathClass)> = if opts.parallel {
            candidates
                .par_iter()
                .map(classify)
                .collect::<Result<_, _>>()?
        } else {
            candidates.iter().map(classify).collect::<Result<_, _>>()?
        };
        explored_total += classified.len();
        let mut next_cakes = HashSet::new();
        for (cand, class) in classified {
            match class {
                DeathClass::Cake => {
                    explored_cake += 1;
                    next_cakes.insert(cand);
                }
                DeathClass::Death => minimal.push(cand),
            }
        }
        if next_cakes.is_empty() {
            search_complete = true;
            break;
        }
        prev_cakes = next_cakes;
    }

    // Loop exhausted by the size cap while Cake sets were still alive: larger
    // death sets may exist beyond `max_size`.
    if !search_complete && truncated_at_size.is_none() && max_size < n {
        truncated_at_size = Some(max_size + 1);
    }

    minimal.sort_unstable_by_key(|k| (k.size(), *k));
    Ok(DeathSetReport {
        minimal_death_sets: minimal,
        interior,
        explored_total,
        explored_cake_count: explored_cake,
        truncated_at_size,
        baseline_failed: false,
    })
}

/// Reference implementation: classifies every interior subset through the
/// linear-system oracle on the pruned complex, then filters for minimality.
/// Shares no code path with [`cake_or_death`]'s matrix updates.
pub fn brute_force_death_sets(
    k: &SimplicialComplex2,
    max_n: usize,
) -> Result<DeathSetReport, DeathSetError> {
    let interior = InteriorIndex::new(k)?;
    let n = interior.len();
    if n > max_n {
        return Err(DeathSetError::TooLargeForBrute(n, max_n));
    }
    let mut death = vec![false; 1 << n];
    for mask in 0..1u128 << n {
        let key = SubsetKey(mask);
        let dead = interior.vertices_of(key);
        let pruned = k.remove_vertices(&dead)?;
        death[mask as usize] = !criterion_oracle(&pruned).pass;
    }
    if death[0] {
        return Ok(DeathSetReport {
            minimal_death_sets: vec![SubsetKey::EMPTY],
            interior,
            explored_total: 1 << n,
            explored_cake_count: 0,
            truncated_at_size: None,
            baseline_failed: true,
        });
    }
    let mut minimal: Vec<SubsetKey> = Vec::new();
    for mask in 1..1u128 << n {
        let key = SubsetKey(mask);
        if death[mask as usize] && key.bits().all(|b| !death[key.without(b).0 as usize]) {
            minimal.push(key);
        }
    }
    minimal.sort_unstable_by_key(|k| (k.size(), *k));
    let cake = death.iter().filter(|&&d| !d).count();
    Ok(DeathSetReport {
        minimal_death_sets: minimal,
        interior,
        explored_total: 1 << n,
        explored_cake_count: cake,
        truncated_at_size: None,
        baseline_failed: false,
    })
}
