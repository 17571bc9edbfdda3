//! Sparse operators on truncated Fock spaces.
//!
//! Matrices are stored as sorted row-major triplets together with three
//! pieces of bookkeeping that make finite-cutoff verification honest:
//!
//! * a parity tag (even / odd / mixed) under the fermion grading,
//! * the range `[shift_min2, shift_max2]` of energy shifts (doubled units)
//!   that the underlying untruncated operator can produce, and
//! * an exactness window `window2`: for every basis column of energy
//!   `<= window2 / 2` the stored column equals the compression of the
//!   untruncated operator to the ambient cutoff.
//!
//! Sums intersect the windows; in a product the window also shrinks by the
//! largest upward shift of the factor applied first, because intermediate
//! vectors must not be clipped by the ambient cutoff.

use crate::linalg::{CMat, CVec};
use num_complex::Complex64;
use std::sync::Arc;

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Mixed => Parity::Mixed,
        }
    }

    fn combine_mul(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::Even, p) | (p, Parity::Even) => p,
            (Parity::Odd, Parity::Odd) => Parity::Even,
            _ => Parity::Mixed,
        }
    }

    fn combine_add(self, other: Parity) -> Parity {
        if self == other {
            self
        } else {
            Parity::Mixed
        }
    }
}

/// Energy data a sparse operator needs from the spaces it acts between:
/// per-basis-state doubled energies and the ambient doubled cutoff.
pub trait EnergyGraded {
    fn dim(&self) -> usize;
    fn energy2_of(&self, index: usize) -> i64;
    fn cutoff2(&self) -> i64;
}

#[derive(Debug, Clone)]
pub struct SparseOperator {
    pub rows: Arc<dyn EnergyGradedDebug>,
    pub cols: Arc<dyn EnergyGradedDebug>,
    /// Sorted row-major `(row, col, value)` triplets, duplicates merged.
    triplets: Vec<(u32, u32, C)>,
    pub parity: Parity,
    pub window2: i64,
    pub shift_min2: i64,
    pub shift_max2: i64,
}

/// Object-safe alias so spaces can be stored behind `Arc<dyn ...>` while
/// keeping `Debug` for diagnostics.
pub trait EnergyGradedDebug: EnergyGraded + std::fmt::Debug + Send + Sync {}
impl<T: EnergyGraded + std::fmt::Debug + Send + Sync> EnergyGradedDebug for T {}

impl SparseOperator {
    pub fn from_triplets(
        rows: Arc<dyn EnergyGradedDebug>,
        cols: Arc<dyn EnergyGradedDebug>,
        mut triplets: Vec<(u32, u32, C)>,
        parity: Parity,
        window2: i64,
        shift_min2: i64,
        shift_max2: i64,
    ) -> Self {
        triplets.retain(|t| t.2.norm_sqr() != 0.0);
        triplets.sort_by_key(|t| (t.0, t.1));
        triplets.dedup_by(|cur, acc| {
            if cur.0 == acc.0 && cur.1 == acc.1 {
                acc.2 += cur.2;
                true
            } else {
                false
            }
        });
        triplets.retain(|t| t.2.norm_sqr() != 0.0);
        SparseOperator {
            rows,
            cols,
            triplets,
            parity,
            window2,
            shift_min2,
            shift_max2,
        }
    }

    pub fn zero(rows: Arc<dyn EnergyGradedDebug>, cols: Arc<dyn EnergyGradedDebug>, parity: Parity) -> Self {
        let w = rows.cutoff2().min(cols.cutoff2());
        Self::from_triplets(rows, cols, Vec::new(), parity, w, 0, 0)
    }

    pub fn identity(space: Arc<dyn EnergyGradedDebug>) -> Self {
        let triplets = (0..space.dim())
            .map(|i| (i as u32, i as u32, C::new(1.0, 0.0)))
            .collect();
        let w = space.cutoff2();
        Self::from_triplets(space.clone(), space, triplets, Parity::Even, w, 0, 0)
    }

    pub fn nrows(&self) -> usize {
        self.rows.dim()
    }

    pub fn ncols(&self) -> usize {
        self.cols.dim()
    }

    pub fn nnz(&self) -> usize {
        self.triplets.len()
    }

    pub fn triplets(&self) -> &[(u32, u32, C)] {
        &self.triplets
    }

    pub fn scale(&self, factor: C) -> Self {
        let mut out = self.clone();
        if factor.norm_sqr() == 0.0 {
            out.triplets.clear();
            return out;
        }
        for t in &mut out.triplets {
            t.2 *= factor;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nrows(), other.nrows(), "row spaces differ");
        assert_eq!(self.ncols(), other.ncols(), "column spaces differ");
        let mut triplets = self.triplets.clone();
        triplets.extend_from_slice(&other.triplets);
        let (smin, smax) = if self.nnz() == 0 {
            (other.shift_min2, other.shift_max2)
        } else if other.nnz() == 0 {
            (self.shift_min2, self.shift_max2)
        } else {
            (
                self.shift_min2.min(other.shift_min2),
                self.shift_max2.max(other.shift_max2),
            )
        };
        Self::from_triplets(
            self.rows.clone(),
            self.cols.clone(),
            triplets,
            self.parity.combine_add(other.parity),
            self.window2.min(other.window2),
            smin,
            smax,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    /// `self * other` (apply `other` first). The window shrinks by the
    /// largest upward shift of `other`, which bounds how far intermediate
    /// vectors can climb toward the ambient cutoff.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols(), other.nrows(), "inner dimensions differ");
        // Column-indexed accumulation: group `other` by column.
        let mut by_col: Vec<Vec<(u32, C)>> = vec![Vec::new(); other.ncols()];
        for &(r, c, v) in &other.triplets {
            by_col[c as usize].push((r, v));
        }
        let mut self_by_col: Vec<Vec<(u32, C)>> = vec![Vec::new(); self.ncols()];
        for &(r, c, v) in &self.triplets {
            self_by_col[c as usize].push((r, v));
        }
        let mut triplets = Vec::new();
        let mut acc: Vec<C> = vec![C::new(0.0, 0.0); self.nrows()];
        let mut touched: Vec<u32> = Vec::new();
        for col in 0..other.ncols() {
            for &(mid, v1) in &by_col[col] {
                for &(row, v2) in &self_by_col[mid as usize] {
                    if acc[row as usize].norm_sqr() == 0.0 {
                        touched.push(row);
                    }
                    acc[row as usize] += v2 * v1;
                }
            }
            for &row in &touched {
                let v = acc[row as usize];
                if v.norm_sqr() != 0.0 {
                    triplets.push((row, col as u32, v));
                }
                acc[row as usize] = C::new(0.0, 0.0);
            }
            touched.clear();
        }
        let ambient2 = self.cols.cutoff2();
        let up = other.shift_max2.max(0);
        let window2 = other
            .window2
            .min(self.window2 - up)
            .min(ambient2 - up);
        Self::from_triplets(
            self.rows.clone(),
            other.cols.clone(),
            triplets,
            self.parity.combine_mul(other.parity),
            window2,
            self.shift_min2 + other.shift_min2,
            self.shift_max2 + other.shift_max2,
        )
    }

    /// Conjugate transpose. Columns of the adjoint are exact wherever every
    /// contributing row of the original was an exact column, which is the
    /// whole ambient space when `self` was exact everywhere and otherwise
    /// shrinks by the downward shift range.
    pub fn adjoint(&self) -> Self {
        let triplets = self
            .triplets
            .iter()
            .map(|&(r, c, v)| (c, r, v.conj()))
            .collect();
        let ambient2 = self.rows.cutoff2();
        let window2 = if self.window2 >= self.cols.cutoff2() {
            ambient2
        } else {
            (self.window2 + self.shift_min2).min(ambient2)
        };
        Self::from_triplets(
            self.cols.clone(),
            self.rows.clone(),
            triplets,
            self.parity,
            window2,
            -self.shift_max2,
            -self.shift_min2,
        )
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        assert_eq!(v.len(), self.ncols());
        let mut out = CVec::zeros(self.nrows());
        for &(r, c, val) in &self.triplets {
            out[r as usize] += val * v[c as usize];
        }
        out
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.nrows(), self.ncols());
        for &(r, c, v) in &self.triplets {
            m[(r as usize, c as usize)] += v;
        }
        m
    }

    /// Dense block with rows of energy `<= row_max2` and columns of energy
    /// `<= col_max2`, in the ambient basis order.
    pub fn dense_block(&self, row_max2: i64, col_max2: i64) -> CMat {
        let rows: Vec<usize> = (0..self.nrows())
            .filter(|&i| self.rows.energy2_of(i) <= row_max2)
            .collect();
        let cols: Vec<usize> = (0..self.ncols())
            .filter(|&j| self.cols.energy2_of(j) <= col_max2)
            .collect();
        let rpos: std::collections::HashMap<usize, usize> =
            rows.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let cpos: std::collections::HashMap<usize, usize> =
            cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        let mut m = CMat::zeros(rows.len(), cols.len());
        for &(r, c, v) in &self.triplets {
            if let (Some(&ri), Some(&ci)) = (rpos.get(&(r as usize)), cpos.get(&(c as usize))) {
                m[(ri, ci)] += v;
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.triplets.iter().map(|t| t.2.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Spectral norm of the dense form (small matrices only).
    pub fn operator_norm(&self) -> f64 {
        crate::linalg::operator_norm(&self.to_dense())
    }

    /// Largest parity-consistent tag for the stored triplets, checked against
    /// the state parities of the two spaces via a caller-supplied map.
    pub fn with_window(mut self, window2: i64) -> Self {
        self.window2 = window2;
        self
    }
}

/// Operator norm of `(a - b)` compressed to columns of energy `<= col2` and
/// all retained rows; `col2` should not exceed both windows.
pub fn residual_on_window(a: &SparseOperator, b: &SparseOperator, col2: i64) -> f64 {
    let diff = a.sub(b);
    let block = diff.dense_block(i64::MAX, col2);
    crate::linalg::operator_norm(&block)
}

/// Joint exactness window of a list of operators.
pub fn joint_window2(ops: &[&SparseOperator]) -> i64 {
    ops.iter().map(|o| o.window2).min().unwrap_or(i64::MIN)
}
