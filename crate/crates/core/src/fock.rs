//! Truncated charged free-fermion Fock space.
//!
//! Basis states are pairs of strictly increasing index sets: `pos` collects
//! the nonnegative one-particle modes carried by starred generators and `neg`
//! the moduli of the negative modes carried by unstarred generators. The
//! state with sets `I = {i_1 < ... < i_n}` and `J = {j_1 < ... < j_m}`
//! (all `j < 0`) is the ordered word
//!
//! ```text
//! a(e_{j_1}) ... a(e_{j_m}) a(e_{i_n})* ... a(e_{i_1})* |vac>
//! ```
//!
//! and its energy is `sum (i + 1/2) + sum (|j| - 1/2)`, a half-integer kept
//! in doubled units. Fermionic signs come from counting the adjacent
//! transpositions needed to bring a generator into this normal order.

use crate::boundary::BoundaryFunction;
use crate::error::FockError;
use crate::linalg::CVec;
use crate::sparse::{EnergyGraded, EnergyGradedDebug, Parity, SparseOperator};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Arc;

type C = Complex64;

/// One normal-ordered basis word, stored as ascending mode sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockBasisState {
    /// Nonnegative modes `i` (starred generators), strictly ascending.
    pub pos: Vec<u32>,
    /// Moduli `|j|` of negative modes (unstarred generators), strictly
    /// ascending; the actual frequencies are `-|j|`.
    pub neg: Vec<u32>,
}

impl FockBasisState {
    pub fn vacuum() -> Self {
        FockBasisState { pos: Vec::new(), neg: Vec::new() }
    }

    pub fn energy2(&self) -> i64 {
        let p: i64 = self.pos.iter().map(|&i| 2 * i as i64 + 1).sum();
        let n: i64 = self.neg.iter().map(|&a| 2 * a as i64 - 1).sum();
        p + n
    }

    pub fn parity(&self) -> Parity {
        if (self.pos.len() + self.neg.len()) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// A single CAR generator on the mode basis: `A(n)` is `a(e_n)`, `AStar(n)`
/// is `a(e_n)*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gen {
    A(i64),
    AStar(i64),
}

impl Gen {
    /// Doubled energy shift of the untruncated generator.
    pub fn shift2(self) -> i64 {
        match self {
            Gen::A(n) if n >= 0 => -(2 * n + 1),
            Gen::A(n) => 2 * (-n) - 1,
            Gen::AStar(n) if n >= 0 => 2 * n + 1,
            Gen::AStar(n) => -(2 * (-n) - 1),
        }
    }
}

/// Apply a generator to a basis word; returns the resulting word and the
/// fermionic sign, or `None` when the word dies.
pub fn apply_gen(state: &FockBasisState, gen: Gen) -> Option<(FockBasisState, f64)> {
    let mut out = state.clone();
    let sign = match gen {
        Gen::A(n) if n >= 0 => {
            // Annihilate starred mode n.
            let k = n as u32;
            let idx = out.pos.binary_search(&k).ok()?;
            out.pos.remove(idx);
            let above = state.pos.iter().filter(|&&i| i > k).count();
            pow_sign(state.neg.len() + above)
        }
        Gen::AStar(n) if n >= 0 => {
            // Create starred mode n.
            let k = n as u32;
            let idx = match out.pos.binary_search(&k) {
                Ok(_) => return None,
                Err(i) => i,
            };
            out.pos.insert(idx, k);
            let above = state.pos.iter().filter(|&&i| i > k).count();
            pow_sign(state.neg.len() + above)
        }
        Gen::A(n) => {
            // Create unstarred mode n < 0.
            let a = (-n) as u32;
            let idx = match out.neg.binary_search(&a) {
                Ok(_) => return None,
                Err(i) => i,
            };
            out.neg.insert(idx, a);
            let above = state.neg.iter().filter(|&&b| b > a).count();
            pow_sign(above)
        }
        Gen::AStar(n) => {
            // Annihilate unstarred mode n < 0.
            let a = (-n) as u32;
            let idx = out.neg.binary_search(&a).ok()?;
            out.neg.remove(idx);
            let above = state.neg.iter().filter(|&&b| b > a).count();
            pow_sign(above)
        }
    };
    Some((out, sign))
}

fn pow_sign(count: usize) -> f64 {
    if count % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The truncated Fock space: every basis word with energy at most the
/// cutoff, in deterministic (energy, lexicographic) order.
#[derive(Debug)]
pub struct FockSpace {
    pub states: Vec<FockBasisState>,
    index: HashMap<FockBasisState, usize>,
    cutoff2: i64,
    energies2: Vec<i64>,
}

impl EnergyGraded for FockSpace {
    fn dim(&self) -> usize {
        self.states.len()
    }
    fn energy2_of(&self, index: usize) -> i64 {
        self.energies2[index]
    }
    fn cutoff2(&self) -> i64 {
        self.cutoff2
    }
}

pub const DEFAULT_CAPACITY: usize = 500_000;

/// Enumerate all strictly ascending sets of nonnegative integers `k` with
/// weights `w(k) = 2k + 1` summing to at most `budget`.
fn enumerate_sets(budget: i64) -> Vec<(Vec<u32>, i64)> {
    let mut out: Vec<(Vec<u32>, i64)> = Vec::new();
    let mut prefix: Vec<u32> = Vec::new();
    fn rec(next: u32, used: i64, budget: i64, prefix: &mut Vec<u32>, out: &mut Vec<(Vec<u32>, i64)>) {
        out.push((prefix.clone(), used));
        let mut k = next;
        loop {
            let w = 2 * k as i64 + 1;
            if used + w > budget {
                break;
            }
            prefix.push(k);
            rec(k + 1, used + w, budget, prefix, out);
            prefix.pop();
            k += 1;
        }
    }
    rec(0, 0, budget, &mut prefix, &mut out);
    out
}

pub fn enumerate_basis(cutoff2: i64) -> Result<Arc<FockSpace>, FockError> {
    enumerate_basis_with_capacity(cutoff2, DEFAULT_CAPACITY)
}

pub fn enumerate_basis_with_capacity(cutoff2: i64, capacity: usize) -> Result<Arc<FockSpace>, FockError> {
    assert!(cutoff2 >= 0, "cutoff must be nonnegative");
    // `pos` sets carry weights 2i+1, `neg` sets weights 2|j|-1 with |j| >= 1;
    // substituting |j| = k+1 gives the same weight list 2k+1.
    let sets = enumerate_sets(cutoff2);
    let mut states: Vec<FockBasisState> = Vec::new();
    for (pos, wp) in &sets {
        for (negk, wn) in &sets {
            if wp + wn <= cutoff2 {
                let neg: Vec<u32> = negk.iter().map(|&k| k + 1).collect();
                states.push(FockBasisState { pos: pos.clone(), neg });
                if states.len() > capacity {
                    return Err(FockError::Capacity { cutoff2, capacity });
                }
            }
        }
    }
    states.sort_by(|a, b| {
        (a.energy2(), &a.pos, &a.neg).cmp(&(b.energy2(), &b.pos, &b.neg))
    });
    let energies2: Vec<i64> = states.iter().map(|s| s.energy2()).collect();
    let index: HashMap<FockBasisState, usize> =
        states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    Ok(Arc::new(FockSpace {
        states,
        index,
        cutoff2,
        energies2,
    }))
}

impl FockSpace {
    pub fn index_of(&self, state: &FockBasisState) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn vacuum_index(&self) -> usize {
        self.index_of(&FockBasisState::vacuum()).expect("vacuum below any cutoff")
    }

    pub fn basis_vector(&self, idx: usize) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[idx] = C::new(1.0, 0.0);
        v
    }

    /// Dimensions per energy level, ascending in energy.
    pub fn level_dims(&self) -> Vec<(i64, usize)> {
        let mut out: Vec<(i64, usize)> = Vec::new();
        for &e in &self.energies2 {
            match out.last_mut() {
                Some((le, d)) if *le == e => *d += 1,
                _ => out.push((e, 1)),
            }
        }
        out
    }

    pub fn state_parity(&self, idx: usize) -> Parity {
        self.states[idx].parity()
    }
}

/// Matrix of a single CAR generator on the truncated space. Every column is
/// either the exact image or escapes the cutoff entirely, so the compression
/// window is the full space.
pub fn gen_matrix(space: &Arc<FockSpace>, gen: Gen) -> SparseOperator {
    let mut triplets = Vec::new();
    for (col, state) in space.states.iter().enumerate() {
        if let Some((out, sign)) = apply_gen(state, gen) {
            if let Some(row) = space.index_of(&out) {
                triplets.push((row as u32, col as u32, C::new(sign, 0.0)));
            }
        }
    }
    let s2 = gen.shift2();
    SparseOperator::from_triplets(
        space.clone() as Arc<dyn EnergyGradedDebug>,
        space.clone() as Arc<dyn EnergyGradedDebug>,
        triplets,
        Parity::Odd,
        space.cutoff2(),
        s2,
        s2,
    )
}

/// Smeared annihilation operator `a(f) = sum_n f_n a(e_n)`, linear in `f`.
pub fn car_annihilator(f: &BoundaryFunction, space: &Arc<FockSpace>) -> SparseOperator {
    let mut acc = SparseOperator::zero(
        space.clone() as Arc<dyn EnergyGradedDebug>,
        space.clone() as Arc<dyn EnergyGradedDebug>,
        Parity::Odd,
    );
    let mut smin = i64::MAX;
    let mut smax = i64::MIN;
    for (n, c) in f.support() {
        let g = gen_matrix(space, Gen::A(n)).scale(c);
        smin = smin.min(Gen::A(n).shift2());
        smax = smax.max(Gen::A(n).shift2());
        acc = acc.add(&g);
    }
    if smin > smax {
        return acc;
    }
    acc.shift_min2 = smin;
    acc.shift_max2 = smax;
    acc.window2 = space.cutoff2();
    acc.parity = Parity::Odd;
    acc
}

/// `a(f)* = sum_n conj(f_n) a(e_n)*`: the adjoint of [`car_annihilator`].
pub fn car_creator(f: &BoundaryFunction, space: &Arc<FockSpace>) -> SparseOperator {
    car_annihilator(f, space).adjoint()
}

/// Diagonal energy operator with half-integer eigenvalues.
pub fn l0_diagonal(space: &Arc<FockSpace>) -> SparseOperator {
    let triplets = (0..space.dim())
        .map(|i| {
            (
                i as u32,
                i as u32,
                C::new(space.energy2_of(i) as f64 / 2.0, 0.0),
            )
        })
        .collect();
    SparseOperator::from_triplets(
        space.clone() as Arc<dyn EnergyGradedDebug>,
        space.clone() as Arc<dyn EnergyGradedDebug>,
        triplets,
        Parity::Even,
        space.cutoff2(),
        0,
        0,
    )
}

/// Diagonal operator `g(E)` of the energy, e.g. `r^{L_0}` or phases.
pub fn diagonal_of_energy(space: &Arc<FockSpace>, g: impl Fn(f64) -> C) -> SparseOperator {
    let triplets = (0..space.dim())
        .map(|i| (i as u32, i as u32, g(space.energy2_of(i) as f64 / 2.0)))
        .collect();
    SparseOperator::from_triplets(
        space.clone() as Arc<dyn EnergyGradedDebug>,
        space.clone() as Arc<dyn EnergyGradedDebug>,
        triplets,
        Parity::Even,
        space.cutoff2(),
        0,
        0,
    )
}

/// The grading involution: `(-1)^{particle count}`.
pub fn grading(space: &Arc<FockSpace>) -> SparseOperator {
    let triplets = (0..space.dim())
        .map(|i| {
            let sign = match space.state_parity(i) {
                Parity::Even => 1.0,
                _ => -1.0,
            };
            (i as u32, i as u32, C::new(sign, 0.0))
        })
        .collect();
    SparseOperator::from_triplets(
        space.clone() as Arc<dyn EnergyGradedDebug>,
        space.clone() as Arc<dyn EnergyGradedDebug>,
        triplets,
        Parity::Even,
        space.cutoff2(),
        0,
        0,
    )
}

// ---------------------------------------------------------------------------
// Doubled space: Fock(H + H) realized as graded pairs.
// ---------------------------------------------------------------------------

/// Truncated basis of the doubled Fock space, realized as ordered pairs
/// `(left, right)` of single-copy basis states with total energy at most the
/// cutoff. The CAR action of `h + k` is
/// `a(h) (x) 1 + Gamma (x) a(k)`, matching the sign rule for turning direct
/// sums into graded tensor products.
#[derive(Debug)]
pub struct PairSpace {
    pub factor: Arc<FockSpace>,
    pub pairs: Vec<(u32, u32)>,
    index: HashMap<(u32, u32), usize>,
    cutoff2: i64,
    energies2: Vec<i64>,
}

impl EnergyGraded for PairSpace {
    fn dim(&self) -> usize {
        self.pairs.len()
    }
    fn energy2_of(&self, index: usize) -> i64 {
        self.energies2[index]
    }
    fn cutoff2(&self) -> i64 {
        self.cutoff2
    }
}

impl PairSpace {
    pub fn enumerate(factor: Arc<FockSpace>, cutoff2: i64) -> Arc<PairSpace> {
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (i, si) in factor.states.iter().enumerate() {
            if si.energy2() > cutoff2 {
                continue;
            }
            for (j, sj) in factor.states.iter().enumerate() {
                if si.energy2() + sj.energy2() <= cutoff2 {
                    pairs.push((i as u32, j as u32));
                }
            }
        }
        pairs.sort_by_key(|&(i, j)| {
            (
                factor.energy2_of(i as usize) + factor.energy2_of(j as usize),
                i,
                j,
            )
        });
        let energies2: Vec<i64> = pairs
            .iter()
            .map(|&(i, j)| factor.energy2_of(i as usize) + factor.energy2_of(j as usize))
            .collect();
        let index: HashMap<(u32, u32), usize> =
            pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        Arc::new(PairSpace {
            factor,
            pairs,
            index,
            cutoff2,
            energies2,
        })
    }

    pub fn index_of(&self, left: usize, right: usize) -> Option<usize> {
        self.index.get(&(left as u32, right as u32)).copied()
    }

    pub fn vacuum_index(&self) -> usize {
        let v = self.factor.vacuum_index();
        self.index_of(v, v).expect("vacuum pair")
    }

    pub fn basis_vector(&self, idx: usize) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[idx] = C::new(1.0, 0.0);
        v
    }

    pub fn pair_parity(&self, idx: usize) -> Parity {
        let (i, j) = self.pairs[idx];
        match (
            self.factor.state_parity(i as usize),
            self.factor.state_parity(j as usize),
        ) {
            (Parity::Even, p) => p,
            (Parity::Odd, Parity::Even) => Parity::Odd,
            (Parity::Odd, Parity::Odd) => Parity::Even,
            _ => Parity::Mixed,
        }
    }
}

/// `op (x) 1` acting on the left factor.
pub fn embed_left(op: &SparseOperator, pair: &Arc<PairSpace>) -> SparseOperator {
    let mut by_col: Vec<Vec<(u32, C)>> = vec![Vec::new(); op.ncols()];
    for &(r, c, v) in op.triplets() {
        by_col[c as usize].push((r, v));
    }
    let mut triplets = Vec::new();
    for (col, &(i, j)) in pair.pairs.iter().enumerate() {
        for &(inew, v) in &by_col[i as usize] {
            if let Some(row) = pair.index_of(inew as usize, j as usize) {
                triplets.push((row as u32, col as u32, v));
            }
        }
    }
    SparseOperator::from_triplets(
        pair.clone() as Arc<dyn EnergyGradedDebug>,
        pair.clone() as Arc<dyn EnergyGradedDebug>,
        triplets,
        op.parity,
        embed_window2(op, pair),
        op.shift_min2,
        op.shift_max2,
    )
}

/// `Gamma^p (x) op` acting on the right factor through the grading of the
/// left one.
pub fn embed_right_graded(op: &SparseOperator, pair: &Arc<PairSpace>, grading_power: usize) -> SparseOperator {
    let mut by_col: Vec<Vec<(u32, C)>> = vec![Vec::new(); op.ncols()];
    for &(r, c, v) in op.triplets() {
        by_col[c as usize].push((r, v));
    }
    let mut triplets = Vec::new();
    for (col, &(i, j)) in pair.pairs.iter().enumerate() {
        let sign = if grading_power % 2 == 1
            && pair.factor.state_parity(i as usize) == Parity::Odd
        {
            -1.0
        } else {
            1.0
        };
        for &(jnew, v) in &by_col[j as usize] {
            if let Some(row) = pair.index_of(i as usize, jnew as usize) {
                triplets.push((row as u32, col as u32, v * sign));
            }
        }
    }
    SparseOperator::from_triplets(
        pair.clone() as Arc<dyn EnergyGradedDebug>,
        pair.clone() as Arc<dyn EnergyGradedDebug>,
        triplets,
        op.parity,
        embed_window2(op, pair),
        op.shift_min2,
        op.shift_max2,
    )
}

/// Window of an embedded factor operator: a pair column `(u, v)` is exact
/// when the factor column is exact at the *total* pair energy, because the
/// passive factor eats part of the budget. Factor operators with full
/// windows stay full.
fn embed_window2(op: &SparseOperator, pair: &Arc<PairSpace>) -> i64 {
    if op.window2 >= op.cols.cutoff2() {
        pair.cutoff2()
    } else {
        op.window2
    }
}

/// CAR action of a one-particle vector `(g, k)` on the pair space.
pub fn pair_annihilator(
    g: &BoundaryFunction,
    k: &BoundaryFunction,
    pair: &Arc<PairSpace>,
) -> SparseOperator {
    let factor = &pair.factor;
    let ag = car_annihilator(g, factor);
    let ak = car_annihilator(k, factor);
    embed_left(&ag, pair).add(&embed_right_graded(&ak, pair, 1))
}

pub fn pair_creator(
    g: &BoundaryFunction,
    k: &BoundaryFunction,
    pair: &Arc<PairSpace>,
) -> SparseOperator {
    let factor = &pair.factor;
    let cg = car_creator(g, factor);
    let ck = car_creator(k, factor);
    embed_left(&cg, pair).add(&embed_right_graded(&ck, pair, 1))
}

/// Isomorphism datum of the tensor factorization: the pair index and sign of
/// a doubled-space word written with all first-copy generators to the left
/// of all second-copy generators. Computed by actually applying the graded
/// embeddings to the vacuum pair, so it is the oracle for sign conventions.
pub fn tensor_factorize(
    pair: &Arc<PairSpace>,
    left_word: &FockBasisState,
    right_word: &FockBasisState,
) -> Option<(usize, f64)> {
    let mut current: (FockBasisState, FockBasisState, f64) =
        (FockBasisState::vacuum(), FockBasisState::vacuum(), 1.0);
    // Second-copy generators first (they sit right of the first-copy ones in
    // the word, and operators apply right to left).
    for &i in right_word.pos.iter().rev() {
        let (s, sign) = apply_gen(&current.1, Gen::AStar(i as i64))?;
        let gamma = if current.0.parity() == Parity::Odd { -1.0 } else { 1.0 };
        current = (current.0, s, current.2 * sign * gamma);
    }
    for &a in right_word.neg.iter() {
        let (s, sign) = apply_gen(&current.1, Gen::A(-(a as i64)))?;
        let gamma = if current.0.parity() == Parity::Odd { -1.0 } else { 1.0 };
        current = (current.0, s, current.2 * sign * gamma);
    }
    for &i in left_word.pos.iter().rev() {
        let (s, sign) = apply_gen(&current.0, Gen::AStar(i as i64))?;
        current = (s, current.1, current.2 * sign);
    }
    for &a in left_word.neg.iter() {
        let (s, sign) = apply_gen(&current.0, Gen::A(-(a as i64)))?;
        current = (s, current.1, current.2 * sign);
    }
    let li = pair.factor.index_of(&current.0)?;
    let ri = pair.factor.index_of(&current.1)?;
    let idx = pair.index_of(li, ri)?;
    Some((idx, current.2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::residual_on_window;

    /// Independent counting oracle: coefficients of the square of the
    /// distinct-odd-part partition generating function, by polynomial
    /// multiplication in doubled-energy units.
    pub fn character_coefficients(max2: usize) -> Vec<u64> {
        let mut poly = vec![0u64; max2 + 1];
        poly[0] = 1;
        let mut w = 1usize;
        while w <= max2 {
            // Multiply twice by (1 + u^w): two fermion copies per weight.
            for _ in 0..2 {
                let mut next = poly.clone();
                for (k, &c) in poly.iter().enumerate() {
                    if c > 0 && k + w <= max2 {
                        next[k + w] += c;
                    }
                }
                poly = next;
            }
            w += 2;
        }
        poly
    }

    /// Second independent oracle: direct recursive count of pairs of
    /// distinct-odd-part partitions with bounded total.
    fn recursive_count(total2: i64) -> u64 {
        fn sets(budget: i64, min_w: i64) -> u64 {
            let mut count = 1;
            let mut w = min_w;
            while w <= budget {
                count += sets(budget - w, w + 2);
                w += 2;
            }
            count
        }
        let mut total = 0u64;
        for e1 in 0..=total2 {
            let c1 = sets_exact(e1);
            if c1 == 0 {
                continue;
            }
            for e2 in 0..=(total2 - e1) {
                total += c1 * sets_exact(e2);
            }
        }
        fn sets_exact(exact: i64) -> u64 {
            fn rec(budget: i64, min_w: i64) -> u64 {
                if budget == 0 {
                    return 1;
                }
                let mut count = 0;
                let mut w = min_w;
                while w <= budget {
                    count += rec(budget - w, w + 2);
                    w += 2;
                }
                count
            }
            rec(exact, 1)
        }
        let _ = sets;
        total
    }

    #[test]
    fn vacuum_only_at_cutoff_zero() {
        let space = enumerate_basis(0).unwrap();
        assert_eq!(space.dim(), 1);
        assert_eq!(space.vacuum_index(), 0);
    }

    #[test]
    fn level_dimensions_match_character() {
        let space = enumerate_basis(4).unwrap();
        let dims: Vec<usize> = space.level_dims().iter().map(|&(_, d)| d).collect();
        assert_eq!(dims, vec![1, 2, 1, 2, 4]);

        let space = enumerate_basis(12).unwrap();
        let oracle = character_coefficients(12);
        let dims = space.level_dims();
        for (k, &want) in oracle.iter().enumerate() {
            let got = dims
                .iter()
                .find(|&&(e, _)| e == k as i64)
                .map(|&(_, d)| d as u64)
                .unwrap_or(0);
            assert_eq!(got, want, "level {k}/2 dimension");
        }
        assert_eq!(space.dim() as u64, recursive_count(12));
    }

    #[test]
    fn car_anticommutators_on_modes() {
        let space = enumerate_basis(8).unwrap();
        let band = 3i64;
        for m in -band..=band {
            for n in -band..=band {
                let am = gen_matrix(&space, Gen::A(m));
                let anst = gen_matrix(&space, Gen::AStar(n));
                let acomm = am.matmul(&anst).add(&anst.matmul(&am));
                let want = if m == n {
                    SparseOperator::identity(space.clone() as Arc<dyn EnergyGradedDebug>)
                } else {
                    SparseOperator::zero(
                        space.clone() as Arc<dyn EnergyGradedDebug>,
                        space.clone() as Arc<dyn EnergyGradedDebug>,
                        Parity::Even,
                    )
                };
                let w = acomm.window2;
                assert!(w >= 0, "window collapsed for m={m}, n={n}");
                let res = residual_on_window(&acomm, &want, w);
                assert!(res < 1e-14, "CAR defect {res} for m={m}, n={n}");

                // {a, a} = 0 holds on the joint window; outside it one order
                // of the product may clip an intermediate level the other
                // order keeps, so only windowed columns are compared.
                let an = gen_matrix(&space, Gen::A(n));
                let aacomm = am.matmul(&an).add(&an.matmul(&am));
                assert!(aacomm.window2 >= 0, "window collapsed for a-a pair {m},{n}");
                let zero = SparseOperator::zero(
                    space.clone() as Arc<dyn EnergyGradedDebug>,
                    space.clone() as Arc<dyn EnergyGradedDebug>,
                    Parity::Even,
                );
                let res = residual_on_window(&aacomm, &zero, aacomm.window2);
                assert!(res < 1e-14, "{{a,a}} defect {res} for m={m}, n={n}");
            }
        }
    }

    #[test]
    fn annihilators_kill_vacuum_correctly() {
        let space = enumerate_basis(6).unwrap();
        let vac = space.basis_vector(space.vacuum_index());
        for k in 0..3i64 {
            let a = gen_matrix(&space, Gen::A(k));
            assert_eq!(a.apply(&vac).norm(), 0.0);
            let astar_neg = gen_matrix(&space, Gen::AStar(-k - 1));
            assert_eq!(astar_neg.apply(&vac).norm(), 0.0);
        }
    }

    #[test]
    fn adjoint_is_conjugate_transpose_exactly() {
        let space = enumerate_basis(5).unwrap();
        let f = BoundaryFunction::from_coeffs(
            &[(-2, C::new(0.3, 0.7)), (1, C::new(-1.0, 0.25))],
            4,
        );
        let a = car_annihilator(&f, &space);
        let astar = car_creator(&f, &space);
        let diff = astar.to_dense() - a.to_dense().adjoint();
        assert_eq!(diff.norm(), 0.0);
    }

    #[test]
    fn grading_anticommutes_with_generators() {
        let space = enumerate_basis(5).unwrap();
        let g = grading(&space);
        let gg = g.matmul(&g);
        let id = SparseOperator::identity(space.clone() as Arc<dyn EnergyGradedDebug>);
        assert!(residual_on_window(&gg, &id, space.cutoff2()) == 0.0);
        for gen in [Gen::A(1), Gen::A(-2), Gen::AStar(0), Gen::AStar(-1)] {
            let a = gen_matrix(&space, gen);
            let anti = g.matmul(&a).add(&a.matmul(&g));
            assert_eq!(anti.nnz(), 0, "grading fails to anticommute with {gen:?}");
        }
    }

    #[test]
    fn energy_shift_of_generators() {
        let space = enumerate_basis(6).unwrap();
        // a(z^k) with k >= 0 lowers the level by k + 1/2 on every state.
        for k in 0..2i64 {
            let a = gen_matrix(&space, Gen::A(k));
            for &(r, c, _) in a.triplets() {
                let de = space.energy2_of(r as usize) - space.energy2_of(c as usize);
                assert_eq!(de, -(2 * k + 1));
            }
        }
    }

    #[test]
    fn l0_matches_index_formula() {
        let space = enumerate_basis(6).unwrap();
        let l0 = l0_diagonal(&space);
        // a(e_{-1}) vac has energy 1/2; a(e_{-2}) a(e_1)* vac has energy 3.
        let s1 = FockBasisState { pos: vec![], neg: vec![1] };
        let e1 = space.index_of(&s1).unwrap();
        assert_eq!(space.energy2_of(e1), 1);
        let s2 = FockBasisState { pos: vec![1], neg: vec![2] };
        let e2 = space.index_of(&s2).unwrap();
        assert_eq!(space.energy2_of(e2), 6);
        let d = l0.to_dense();
        assert_eq!(d[(e2, e2)].re, 3.0);
    }

    #[test]
    fn tensor_factorization_signs() {
        let factor = enumerate_basis(4).unwrap();
        let pair = PairSpace::enumerate(factor.clone(), 4);

        // Vacuum maps to the vacuum pair with sign +1.
        let (idx, sign) =
            tensor_factorize(&pair, &FockBasisState::vacuum(), &FockBasisState::vacuum()).unwrap();
        assert_eq!(idx, pair.vacuum_index());
        assert_eq!(sign, 1.0);

        // A single creator in the second copy: gamma acts on the even vacuum.
        let right = FockBasisState { pos: vec![0], neg: vec![] };
        let (idx, sign) = tensor_factorize(&pair, &FockBasisState::vacuum(), &right).unwrap();
        let li = pair.factor.vacuum_index();
        let ri = pair.factor.index_of(&right).unwrap();
        assert_eq!(idx, pair.index_of(li, ri).unwrap());
        assert_eq!(sign, 1.0);

        // Ordered words always factor with sign +1 in this normal order.
        let left = FockBasisState { pos: vec![0], neg: vec![1] };
        let (_, sign) = tensor_factorize(&pair, &left, &right).unwrap();
        assert_eq!(sign, 1.0);
    }

    #[test]
    fn doubled_car_braiding() {
        // Crossing one odd generator of the second copy past one of the
        // first copy must produce the super braiding sign.
        let factor = enumerate_basis(3).unwrap();
        let pair = PairSpace::enumerate(factor.clone(), 3);
        let f = BoundaryFunction::monomial(-1, 2);
        let g = BoundaryFunction::monomial(-2, 2);
        let a1 = {
            let op = car_annihilator(&f, &factor);
            embed_left(&op, &pair)
        };
        let a2 = {
            let op = car_annihilator(&g, &factor);
            embed_right_graded(&op, &pair, 1)
        };
        let anti = a1.matmul(&a2).add(&a2.matmul(&a1));
        assert_eq!(anti.nnz(), 0, "cross-copy generators must anticommute");

        // And the mixed anticommutator with a starred partner reproduces the
        // inner product in the second slot only.
        let a2star = {
            let op = car_creator(&g, &factor);
            embed_right_graded(&op, &pair, 1)
        };
        let acomm = a2.matmul(&a2star).add(&a2star.matmul(&a2));
        let id = SparseOperator::identity(pair.clone() as Arc<dyn EnergyGradedDebug>);
        let res = residual_on_window(&acomm, &id.scale(C::new(g.norm().powi(2), 0.0)), acomm.window2);
        assert!(res < 1e-14, "doubled CAR defect {res}");
    }

    #[test]
    fn pair_annihilator_matches_graded_sum_rule() {
        let factor = enumerate_basis(3).unwrap();
        let pair = PairSpace::enumerate(factor.clone(), 3);
        let g = BoundaryFunction::monomial(0, 1);
        let k = BoundaryFunction::monomial(-1, 1);
        let op = pair_annihilator(&g, &k, &pair);
        // On vac (x) vac: only the second slot creates (a(z^0) kills vac).
        let out = op.apply(&pair.basis_vector(pair.vacuum_index()));
        let target = FockBasisState { pos: vec![], neg: vec![1] };
        let ti = pair
            .index_of(pair.factor.vacuum_index(), pair.factor.index_of(&target).unwrap())
            .unwrap();
        assert!((out[ti] - C::new(1.0, 0.0)).norm() < 1e-15);
        assert!((out.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn capacity_error_fires() {
        assert!(matches!(
            enumerate_basis_with_capacity(12, 10),
            Err(FockError::Capacity { .. })
        ));
    }
}
