//! Boundary-matrix machinery for the coverage criterion.
//!
//! The complex is ordered fence-first (fence vertices, fence edges, remaining
//! vertices, remaining edges, then all triangles) and its boundary matrix `D`
//! is kept factored as `D = R * U` with `R` reduced and `U` unit upper
//! triangular, all over GF(2). The coverage criterion reads directly off `R`:
//! it passes exactly when some triangle column is nonzero with its lowest
//! entry in a fence-edge row. Adjacent column transpositions update the
//! factorisation in place, which lets subset classification reuse one
//! reduction instead of starting over.
//!
//! [`criterion_oracle`] answers the same question by solving the linear system
//! "boundary of a triangle chain = fence cycle" with plain elimination; it
//! shares no state with [`RUState`] and serves as the independent reference.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::complex::{Edge, SimplicialComplex2, Triangle, VertexId};
use crate::z2::Z2Matrix;

/// A simplex of dimension at most 2.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Simplex {
    Vertex(VertexId),
    Edge(Edge),
    Triangle(Triangle),
}

impl Simplex {
    pub fn dim(self) -> u8 {
        match self {
            Simplex::Vertex(_) => 0,
            Simplex::Edge(_) => 1,
            Simplex::Triangle(_) => 2,
        }
    }

    pub fn describe(self, k: &SimplicialComplex2) -> String {
        match self {
            Simplex::Vertex(v) => k.label(v).to_string(),
            Simplex::Edge(e) => {
                let (a, b) = e.endpoints();
                format!("({}, {})", k.label(a), k.label(b))
            }
            Simplex::Triangle(t) => {
                let [a, b, c] = t.vertices();
                format!("({}, {}, {})", k.label(a), k.label(b), k.label(c))
            }
        }
    }
}

/// Fence-first total order on the simplices of a complex.
///
/// Ids equal initial positions; transpositions later permute positions but
/// never ids. Faces always precede cofaces, and the triangle block is a
/// contiguous suffix.
#[derive(Clone, Debug)]
pub struct FiltrationOrder {
    simplices: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
    fence_rows: Vec<bool>,
    pub tri_start: usize,
}

impl FiltrationOrder {
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplex(&self, id: usize) -> Simplex {
        self.simplices[id]
    }

    pub fn id_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Fence vertices and fence cycle edges (not chords).
    pub fn is_fence_row(&self, id: usize) -> bool {
        self.fence_rows[id]
    }
}

/// Sparse GF(2) boundary matrix; column `j` lists the ascending row indices
/// of the codimension-1 faces of simplex `j`.
#[derive(Clone, Debug)]
pub struct SparseBoundaryMatrix {
    pub columns: Vec<Vec<u32>>,
    pub dims: Vec<u8>,
}

/// Builds the fence-first order and its boundary matrix.
pub fn build_boundary_matrix(k: &SimplicialComplex2) -> (FiltrationOrder, SparseBoundaryMatrix) {
    let fence_vertex_set: BTreeSet<VertexId> = k.fence().iter().copied().collect();
    let fence_edge_set: BTreeSet<Edge> = k.fence_edges().into_iter().collect();

    let mut simplices: Vec<Simplex> = Vec::new();
    let mut fence_rows: Vec<bool> = Vec::new();
    for &v in k.fence() {
        simplices.push(Simplex::Vertex(v));
        fence_rows.push(true);
    }
    for e in k.fence_edges() {
        simplices.push(Simplex::Edge(e));
        fence_rows.push(true);
    }
    for v in k.vertices().filter(|v| !fence_vertex_set.contains(v)) {
        simplices.push(Simplex::Vertex(v));
        fence_rows.push(false);
    }
    for e in k.edges().filter(|e| !fence_edge_set.contains(e)) {
        simplices.push(Simplex::Edge(e));
        fence_rows.push(false);
    }
    let tri_start = simplices.len();
    for t in k.triangles() {
        simplices.push(Simplex::Triangle(t));
        fence_rows.push(false);
    }

    let index: HashMap<Simplex, usize> =
        simplices.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut columns = Vec::with_capacity(simplices.len());
    let mut dims = Vec::with_capacity(simplices.len());
    for s in &simplices {
        let mut col: Vec<u32> = match s {
            Simplex::Vertex(_) => Vec::new(),
            Simplex::Edge(e) => {
                let (a, b) = e.endpoints();
                vec![
                    index[&Simplex::Vertex(a)] as u32,
                    index[&Simplex::Vertex(b)] as u32,
                ]
            }
            Simplex::Triangle(t) => t
                .edges()
                .iter()
                .map(|e| index[&Simplex::Edge(*e)] as u32)
                .collect(),
        };
        col.sort_unstable();
        columns.push(col);
        dims.push(s.dim());
    }
    (
        FiltrationOrder {
            simplices,
            index,
            fence_rows,
            tri_start,
        },
        SparseBoundaryMatrix { columns, dims },
    )
}

#[derive(Error, Debug)]
pub enum PersistenceError {
    #[error("cannot transpose a face past its coface at position {0}")]
    IncidenceError(usize),
    #[error("cannot transpose across the triangle block boundary at position {0}")]
    BlockViolation(usize),
    #[error("transposition position {0} out of range")]
    OutOfRange(usize),
    #[error("factorisation invariant breached: {0}")]
    InvariantBreach(String),
}

/// The decomposition `D = R * U` over GF(2), indexed by simplex id.
///
/// Columns of `R` and rows of `U` are stored against ids, so a transposition
/// moves no data; it only updates the two permutation arrays plus whatever
/// column fixups the case analysis demands. Column entries are kept sorted by
/// current position, making each column's low its last entry.
#[derive(Clone, Debug)]
pub struct RUState {
    d_cols: Vec<Vec<u32>>,
    r_cols: Vec<Vec<u32>>,
    u_rows: Vec<BTreeSet<u32>>,
    pos_of: Vec<u32>,
    at_pos: Vec<u32>,
    pair_of: Vec<Option<u32>>,
    dims: Vec<u8>,
    tri_start: usize,
}

/// Left-to-right reduction producing the initial factorisation.
pub fn reduce(d: &SparseBoundaryMatrix) -> RUState {
    let m = d.columns.len();
    let mut s = RUState {
        d_cols: d.columns.clone(),
        r_cols: d.columns.clone(),
        u_rows: (0..m as u32).map(|i| BTreeSet::from([i])).collect(),
        pos_of: (0..m as u32).collect(),
        at_pos: (0..m as u32).collect(),
        pair_of: vec![None; m],
        dims: d.dims.clone(),
        tri_start: d.dims.iter().position(|&x| x == 2).unwrap_or(m),
    };
    for j in 0..m as u32 {
        while let Some(&low) = s.r_cols[j as usize].last() {
            match s.pair_of[low as usize] {
                Some(k) => s.add_column(k, j),
                None => {
                    s.pair_of[low as usize] = Some(j);
                    break;
                }
            }
        }
    }
    s
}

impl RUState {
    pub fn len(&self) -> usize {
        self.d_cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_cols.is_empty()
    }

    /// First position of the triangle block (positions, not ids; triangles
    /// never leave the block).
    pub fn triangle_block_start(&self) -> usize {
        self.tri_start
    }

    pub fn position_of(&self, id: usize) -> usize {
        self.pos_of[id] as usize
    }

    pub fn id_at(&self, pos: usize) -> usize {
        self.at_pos[pos] as usize
    }

    pub fn column_is_zero(&self, id: usize) -> bool {
        self.r_cols[id].is_empty()
    }

    /// Entries of `R` column `id`, as row ids sorted by current position.
    pub fn column(&self, id: usize) -> &[u32] {
        &self.r_cols[id]
    }

    /// Birth/death pairs as `(row id, column id)`.
    pub fn pairs(&self) -> BTreeSet<(u32, u32)> {
        self.pair_of
            .iter()
            .enumerate()
            .filter_map(|(row, col)| col.map(|c| (row as u32, c)))
            .collect()
    }

    /// `R` column `dst` += column `src`, with the matching `U` row update
    /// (`U` row `src` += row `dst`), preserving `R * U = D`.
    fn add_column(&mut self, src: u32, dst: u32) {
        debug_assert_ne!(src, dst);
        let merged = xor_merge(
            &self.r_cols[dst as usize],
            &self.r_cols[src as usize],
            &self.pos_of,
        );
        self.r_cols[dst as usize] = merged;
        let row_dst: Vec<u32> = self.u_rows[dst as usize].iter().copied().collect();
        let row_src = &mut self.u_rows[src as usize];
        for x in row_dst {
            if !row_src.insert(x) {
                row_src.remove(&x);
            }
        }
    }

    fn u_get(&self, row: u32, col: u32) -> bool {
        self.u_rows[row as usize].contains(&col)
    }

    fn low(&self, id: u32) -> Option<u32> {
        self.r_cols[id as usize].last().copied()
    }

    /// Swaps the positions of ids `a` and `b` (currently adjacent). For
    /// 1-skeleton swaps this also re-sorts columns containing both rows and
    /// refreshes the pairing where a column's low changed identity.
    fn swap_positions(&mut self, a: u32, b: u32) {
        let (pa, pb) = (self.pos_of[a as usize], self.pos_of[b as usize]);
        self.pos_of[a as usize] = pb;
        self.pos_of[b as usize] = pa;
        self.at_pos[pa as usize] = b;
        self.at_pos[pb as usize] = a;
        if self.dims[a as usize] == 2 && self.dims[b as usize] == 2 {
            // Triangles are never rows in a 2-complex; nothing else moves.
            return;
        }
        for c in 0..self.r_cols.len() {
            let col = &mut self.r_cols[c];
            let (Some(ia), Some(ib)) = (
                col.iter().position(|&x| x == a),
                col.iter().position(|&x| x == b),
            ) else {
                continue;
            };
            let was_last = col.len() - 1;
            col.swap(ia, ib);
            if ia == was_last || ib == was_last {
                // The column's low row changed identity with the swap.
                let old_low = if ia == was_last { a } else { b };
                let new_low = col[was_last];
                if old_low != new_low {
                    // old_low sat at the larger position before the swap.
                    debug_assert_eq!(self.pair_of[old_low as usize], Some(c as u32));
                    self.pair_of[old_low as usize] = None;
                    self.pair_of[new_low as usize] = Some(c as u32);
                }
            }
        }
    }

    /// Re-derives `pair_of` entries for the given rows from columns `a`, `b`.
    fn refresh_pairs(&mut self, rows: &[Option<u32>], a: u32, b: u32) {
        for r in rows.iter().flatten() {
            if matches!(self.pair_of[*r as usize], Some(c) if c == a || c == b) {
                self.pair_of[*r as usize] = None;
            }
        }
        for c in [a, b] {
            if let Some(l) = self.low(c) {
                self.pair_of[l as usize] = Some(c);
            }
        }
    }

    /// Transposes the simplices at positions `i` and `i + 1`, repairing the
    /// factorisation so that `R` stays reduced and `U` unit upper triangular.
    pub fn transpose(&mut self, i: usize) -> Result<(), PersistenceError> {
        if i + 1 >= self.len() {
            return Err(PersistenceError::OutOfRange(i));
        }
        let a = self.at_pos[i];
        let b = self.at_pos[i + 1];
        let (da, db) = (self.dims[a as usize], self.dims[b as usize]);
        if (da == 2) != (db == 2) {
            return Err(PersistenceError::BlockViolation(i));
        }
        if da + 1 == db && self.d_cols[b as usize].binary_search(&a).is_ok() {
            return Err(PersistenceError::IncidenceError(i));
        }

        let mut u = self.u_get(a, b);
        if u && self.r_cols[a as usize].is_empty() {
            // Clearing U[a, b] is free when column a of R is zero.
            let row_b: Vec<u32> = self.u_rows[b as usize].iter().copied().collect();
            let row_a = &mut self.u_rows[a as usize];
            for x in row_b {
                if !row_a.insert(x) {
                    row_a.remove(&x);
                }
            }
            u = false;
        }

        let a_zero = self.r_cols[a as usize].is_empty();
        let b_zero = self.r_cols[b as usize].is_empty();
        match (a_zero, b_zero) {
            (true, true) => {
                let ka = self.pair_of[a as usize];
                let kb = self.pair_of[b as usize];
                let entangled = kb.is_some_and(|c| self.r_cols[c as usize].contains(&a));
                self.swap_positions(a, b);
                if entangled {
                    if let (Some(ka), Some(kb)) = (ka, kb) {
                        // Both killer columns now end in row a; cancel it out
                        // of the later one to restore distinct lows. Which
                        // class each killer ends up closing depends on the
                        // killers' own order.
                        let (src, dst) = if self.pos_of[ka as usize] < self.pos_of[kb as usize] {
                            (ka, kb)
                        } else {
                            (kb, ka)
                        };
                        self.add_column(src, dst);
                        self.refresh_pairs(&[Some(a), Some(b)], ka, kb);
                    }
                    // Without a killer for row a the relabelled low is already
                    // the correct new pairing; swap_positions recorded it.
                }
            }
            (false, false) => {
                if u {
                    let (la, lb) = (self.low(a), self.low(b));
                    self.add_column(a, b);
                    if self.low(b) == la {
                        // Column b's low collided with column a's; swap then
                        // cancel it back out of the later column.
                        self.swap_positions(a, b);
                        self.add_column(b, a);
                        let rows = [la, lb, self.low(a), self.low(b)];
                        self.refresh_pairs(&rows, a, b);
                    } else {
                        let rows = [la, lb, self.low(b)];
                        self.refresh_pairs(&rows, a, b);
                        self.swap_positions(a, b);
                    }
                } else {
                    self.swap_positions(a, b);
                }
            }
            (false, true) => {
                if u {
                    // The death recorded in column a migrates to b: copy the
                    // column across, swap, and zero out the later copy.
                    let la = self.low(a);
                    self.add_column(a, b);
                    self.swap_positions(a, b);
                    self.add_column(b, a);
                    let rows = [la, self.low(a), self.low(b)];
                    self.refresh_pairs(&rows, a, b);
                } else {
                    self.swap_positions(a, b);
                }
            }
            (true, false) => {
                self.swap_positions(a, b);
            }
        }
        Ok(())
    }

    /// Moves the given triangle columns behind every other triangle by
    /// adjacent transpositions; survivor order is preserved.
    pub fn move_triangles_to_end(
        &mut self,
        doomed: &BTreeSet<u32>,
    ) -> Result<(), PersistenceError> {
        let m = self.len();
        for &id in doomed {
            if self.dims[id as usize] != 2 {
                return Err(PersistenceError::InvariantBreach(format!(
                    "id {id} is not a triangle"
                )));
            }
        }
        let mut positions: Vec<usize> = doomed
            .iter()
            .map(|&id| self.position_of(id as usize))
            .collect();
        positions.sort_unstable_by(|x, y| y.cmp(x));
        for (k, &p) in positions.iter().enumerate() {
            let target = m - 1 - k;
            for q in p..target {
                self.transpose(q)?;
            }
        }
        Ok(())
    }

    /// Checks the factorisation invariants exactly; returns a description of
    /// the first violation. Intended for tests and the acceptance suite.
    pub fn validate(&self) -> Result<(), String> {
        let m = self.len();
        // R columns sorted by position; nonzero lows distinct; pair_of exact.
        let mut seen_low: HashMap<u32, u32> = HashMap::new();
        for c in 0..m {
            let col = &self.r_cols[c];
            for w in col.windows(2) {
                if self.pos_of[w[0] as usize] >= self.pos_of[w[1] as usize] {
                    return Err(format!("column {c} not sorted by position"));
                }
            }
            if let Some(&low) = col.last() {
                if let Some(prev) = seen_low.insert(low, c as u32) {
                    return Err(format!("columns {prev} and {c} share low row {low}"));
                }
                if self.pos_of[low as usize] >= self.pos_of[c] {
                    return Err(format!("column {c} has an entry at or after itself"));
                }
            }
        }
        for (row, &p) in self.pair_of.iter().enumerate() {
            let expected = seen_low.get(&(row as u32)).copied();
            if p != expected {
                return Err(format!("pair_of[{row}] = {p:?} but lows say {expected:?}"));
            }
        }
        // Lows sit at positive (zero) columns.
        for &low in seen_low.keys() {
            if !self.r_cols[low as usize].is_empty() {
                return Err(format!("low row {low} has a nonzero column"));
            }
        }
        // U unit upper triangular with respect to current positions.
        for r in 0..m {
            if !self.u_rows[r].contains(&(r as u32)) {
                return Err(format!("U[{r},{r}] = 0"));
            }
            for &c in &self.u_rows[r] {
                if self.pos_of[c as usize] < self.pos_of[r] {
                    return Err(format!("U[{r},{c}] below the diagonal"));
                }
            }
        }
        // R * U = D, column by column, as id sets.
        for j in 0..m as u32 {
            let mut acc: BTreeSet<u32> = BTreeSet::new();
            for k in 0..m as u32 {
                if self.u_rows[k as usize].contains(&j) {
                    for &row in &self.r_cols[k as usize] {
                        if !acc.insert(row) {
                            acc.remove(&row);
                        }
                    }
                }
            }
            let d: BTreeSet<u32> = self.d_cols[j as usize].iter().copied().collect();
            if acc != d {
                return Err(format!("(R*U) column {j} differs from D"));
            }
        }
        // Blocks: triangles occupy positions tri_start.. exactly.
        for id in 0..m {
            let in_tri_block = self.pos_of[id] as usize >= self.tri_start;
            if (self.dims[id] == 2) != in_tri_block {
                return Err(format!("id {id} strayed across the triangle block"));
            }
        }
        Ok(())
    }

    /// The boundary matrix under the current order: column `p` is the column
    /// of the simplex at position `p`, rows renumbered by position.
    pub fn permuted_boundary(&self) -> SparseBoundaryMatrix {
        let m = self.len();
        let mut columns = Vec::with_capacity(m);
        let mut dims = Vec::with_capacity(m);
        for p in 0..m {
            let id = self.at_pos[p] as usize;
            let mut col: Vec<u32> = self.d_cols[id]
                .iter()
                .map(|&r| self.pos_of[r as usize])
                .collect();
            col.sort_unstable();
            columns.push(col);
            dims.push(self.dims[id]);
        }
        SparseBoundaryMatrix { columns, dims }
    }
}

fn xor_merge(a: &[u32], b: &[u32], pos_of: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (pa, pb) = (pos_of[a[i] as usize], pos_of[b[j] as usize]);
        match pa.cmp(&pb) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                debug_assert_eq!(a[i], b[j]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A passing check's certificate: the reduced triangle column, the fence edge
/// its low row names, and the full boundary chain the column carries.
#[derive(Clone, Debug)]
pub struct CriterionWitness {
    pub triangle: Triangle,
    pub fence_edge: Edge,
    pub boundary: Vec<Edge>,
}

/// Criterion verdict from the reduced matrix: pass iff some live triangle
/// column is nonzero with its low in a fence-edge row.
pub fn check_criterion(s: &RUState, order: &FiltrationOrder) -> Option<CriterionWitness> {
    check_criterion_prefix(s, order, s.len())
}

/// Same check restricted to columns at positions below `live_cols`; parked
/// (dead) triangle columns beyond it are ignored. Low rows are 1-skeleton
/// simplices, which never die, so no liveness test is needed for rows.
pub fn check_criterion_prefix(
    s: &RUState,
    order: &FiltrationOrder,
    live_cols: usize,
) -> Option<CriterionWitness> {
    debug_assert!(live_cols >= s.triangle_block_start() && live_cols <= s.len());
    for p in s.triangle_block_start()..live_cols {
        let id = s.id_at(p);
        let col = s.column(id);
        let Some(&low) = col.last() else {
            continue;
        };
        if !order.is_fence_row(low as usize) {
            continue;
        }
        let Simplex::Triangle(triangle) = order.simplex(id) else {
            continue;
        };
        let Simplex::Edge(fence_edge) = order.simplex(low as usize) else {
            continue;
        };
        let boundary = col
            .iter()
            .filter_map(|&r| match order.simplex(r as usize) {
                Simplex::Edge(e) => Some(e),
                _ => None,
            })
            .collect();
        return Some(CriterionWitness {
            triangle,
            fence_edge,
            boundary,
        });
    }
    None
}

/// Outcome of the linear-system oracle.
#[derive(Clone, Debug)]
pub struct CriterionOracle {
    pub pass: bool,
    /// A triangle chain whose boundary is the fence cycle, when one exists.
    pub chain: Option<Vec<Triangle>>,
    /// Dimension of the space of triangle 2-cycles; the solution set has
    /// `2^kernel_dim` chains when `pass`.
    pub kernel_dim: usize,
}

/// Decides the criterion by solving "boundary of triangle chain = fence
/// cycle" over GF(2) with dense elimination. Independent of [`RUState`].
pub fn criterion_oracle(k: &SimplicialComplex2) -> CriterionOracle {
    let edges: Vec<Edge> = k.edges().collect();
    let edge_index: HashMap<Edge, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let triangles: Vec<Triangle> = k.triangles().collect();
    let mut m = Z2Matrix::new(edges.len(), triangles.len());
    for (c, t) in triangles.iter().enumerate() {
        for e in t.edges() {
            m.set(edge_index[&e], c, true);
        }
    }
    let mut rhs = vec![false; edges.len()];
    for e in k.fence_edges() {
        rhs[edge_index[&e]] = true;
    }
    let out = m.solve(&rhs);
    CriterionOracle {
        pass: out.solution.is_some(),
        chain: out
            .solution
            .map(|cols| cols.into_iter().map(|c| triangles[c]).collect()),
        kernel_dim: out.kernel_dim,
    }
}

/// Mod-2 homology ranks `(h1, h2)` of the full complex, from boundary ranks.
/// Used as a diagnostic: the local link flags are only sound when both vanish.
pub fn homology_ranks(k: &SimplicialComplex2) -> (usize, usize) {
    let verts: Vec<VertexId> = k.vertices().collect();
    let vpos: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let edges: Vec<Edge> = k.edges().collect();
    let epos: HashMap<Edge, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let triangles: Vec<Triangle> = k.triangles().collect();
    let mut d1 = Z2Matrix::new(verts.len(), edges.len());
    for (c, e) in edges.iter().enumerate() {
        let (a, b) = e.endpoints();
        d1.set(vpos[&a], c, true);
        d1.set(vpos[&b], c, true);
    }
    let mut d2 = Z2Matrix::new(edges.len(), triangles.len());
    for (c, t) in triangles.iter().enumerate() {
        for e in t.edges() {
            d2.set(epos[&e], c, true);
        }
    }
    let r1 = d1.rank();
    let r2 = d2.rank();
    let h1 = edges.len() - r1 - r2;
    let h2 = triangles.len() - r2;
    (h1, h2)
}
