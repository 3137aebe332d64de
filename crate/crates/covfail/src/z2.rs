//! Dense linear algebra over GF(2), used by the independent oracles and by
//! rank diagnostics. Rows are bit-packed in `u64` blocks.

/// Dense GF(2) matrix with `rows × cols` entries.
#[derive(Clone, Debug)]
pub struct Z2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

/// Outcome of solving `M x = b`.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    /// One solution (column indices set to 1), if the system is consistent.
    pub solution: Option<Vec<usize>>,
    /// Dimension of the kernel of `M`; the solution set has `2^kernel_dim`
    /// elements when a solution exists.
    pub kernel_dim: usize,
    pub rank: usize,
}

impl Z2Matrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Z2Matrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = r * self.words + c / 64;
        let bit = 1u64 << (c % 64);
        if value {
            self.data[w] |= bit;
        } else {
            self.data[w] &= !bit;
        }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert!(src != dst);
        let (s, d) = (src * self.words, dst * self.words);
        for i in 0..self.words {
            let v = self.data[s + i];
            self.data[d + i] ^= v;
        }
    }

    /// Rank via Gaussian elimination on a working copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.data.swap_chunks(pivot, rank, m.words);
            for r in 0..m.rows {
                if r != rank && m.get(r, c) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Solves `M x = b` by eliminating an augmented copy.
    pub fn solve(&self, b: &[bool]) -> SolveOutcome {
        assert_eq!(b.len(), self.rows);
        let mut m = Z2Matrix::new(self.rows, self.cols + 1);
        for (r, &rhs) in b.iter().enumerate() {
            for w in 0..self.words {
                m.data[r * m.words + w] = self.data[r * self.words + w];
            }
            // Re-mask in case the augmented column landed in an existing word.
            m.set(r, self.cols, rhs);
        }
        let aug = self.cols;
        let mut pivot_col_of_row = Vec::new();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.data.swap_chunks(pivot, rank, m.words);
            for r in 0..m.rows {
                if r != rank && m.get(r, c) {
                    m.xor_row_into(rank, r);
                }
            }
            pivot_col_of_row.push(c);
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        let consistent = (rank..m.rows).all(|r| !m.get(r, aug));
        let solution = consistent.then(|| {
            (0..rank)
                .filter(|&r| m.get(r, aug))
                .map(|r| pivot_col_of_row[r])
                .collect()
        });
        SolveOutcome {
            solution,
            kernel_dim: self.cols - rank,
            rank,
        }
    }
}

trait SwapChunks {
    fn swap_chunks(&mut self, a: usize, b: usize, len: usize);
}

impl SwapChunks for Vec<u64> {
    fn swap_chunks(&mut self, a: usize, b: usize, len: usize) {
        if a == b {
            return;
        }
        for i in 0..len {
            self.swap(a * len + i, b * len + i);
        }
    }
}
