//! Dense complex linear algebra helpers: scaling-and-squaring matrix
//! exponential, SVD-based norms and ranks, Hermitian spectra, nullspaces and
//! polar decompositions. All routines work on `DMatrix<Complex64>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// 1-norm (maximum absolute column sum).
pub fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling-and-squaring with a fixed Pade(13)
/// approximant, after Higham's method. The matrices here are small dense
/// blocks, so no norm-adaptive order selection is needed.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    if n == 1 {
        return CMat::from_element(1, 1, a[(0, 0)].exp());
    }

    // theta_13 from Higham's scaling analysis.
    let theta13 = 5.371_920_351_148_152_f64;
    let norm = one_norm(a);
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((0.5f64).powi(s as i32), 0.0);
    let a1 = a * scale;

    let b: [Complex64; 14] = [
        Complex64::new(64_764_752_532_480_000.0, 0.0),
        Complex64::new(32_382_376_266_240_000.0, 0.0),
        Complex64::new(7_771_770_303_897_600.0, 0.0),
        Complex64::new(1_187_353_796_428_800.0, 0.0),
        Complex64::new(129_060_195_264_000.0, 0.0),
        Complex64::new(10_559_470_521_600.0, 0.0),
        Complex64::new(670_442_572_800.0, 0.0),
        Complex64::new(33_522_128_640.0, 0.0),
        Complex64::new(1_323_241_920.0, 0.0),
        Complex64::new(40_840_800.0, 0.0),
        Complex64::new(960_960.0, 0.0),
        Complex64::new(16_380.0, 0.0),
        Complex64::new(182.0, 0.0),
        Complex64::new(1.0, 0.0),
    ];
    let id = CMat::identity(n, n);
    let a2 = &a1 * &a1;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a1 * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Pade denominator is singular; scaling failed");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Operator (spectral) norm; 0 for empty matrices.
pub fn operator_norm(a: &CMat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Numerical rank at an absolute singular-value threshold.
pub fn numerical_rank(a: &CMat, threshold: f64) -> usize {
    singular_values(a).iter().filter(|&&s| s > threshold).count()
}

/// Nuclear (trace) norm: the sum of singular values.
pub fn trace_norm(a: &CMat) -> f64 {
    singular_values(a).iter().sum()
}

/// Orthonormal basis of the (right) nullspace, using singular vectors whose
/// singular values fall below `threshold`.
pub fn nullspace(a: &CMat, threshold: f64) -> Vec<CVec> {
    if a.ncols() == 0 {
        return Vec::new();
    }
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let sv = &svd.singular_values;
    let mut kernel = Vec::new();
    for i in 0..vt.nrows() {
        let s = if i < sv.len() { sv[i] } else { 0.0 };
        if s <= threshold {
            kernel.push(vt.row(i).conjugate().transpose());
        }
    }
    // Rows of V^T beyond min(nrows, ncols) never appear in nalgebra's thin
    // SVD, so columns of A beyond the row count contribute kernel vectors
    // only through the rows above. For the wide stacks used here the thin
    // SVD is enough: nrows >= ncols always holds for constraint stacks.
    kernel
}

/// Polar decomposition `a = u * h` with `u` a partial isometry extended to a
/// unitary (from the SVD) and `h = sqrt(a* a)` positive semidefinite.
pub fn polar(a: &CMat) -> (CMat, CMat) {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let sv = &svd.singular_values;
    let unitary = &u * &vt;
    let mut h = vt.adjoint();
    let mut diag = CMat::zeros(sv.len(), sv.len());
    for i in 0..sv.len() {
        diag[(i, i)] = Complex64::new(sv[i], 0.0);
    }
    h = &h * diag * &vt;
    (unitary, h)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let herm = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let se = herm.symmetric_eigen();
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(a.nrows(), a.ncols());
    for (out, &i) in idx.iter().enumerate() {
        vecs.set_column(out, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Largest singular value by power iteration on `a* a`; cheap for very wide
/// matrices where a full SVD would be wasteful. Deterministic start vector.
pub fn top_singular_value(a: &CMat, iters: usize, tol: f64) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return 0.0;
    }
    let mut v = CVec::from_fn(n, |i, _| {
        Complex64::new(1.0 + (i as f64 * 0.7).sin() * 0.01, (i as f64 * 0.3).cos() * 0.01)
    });
    v /= Complex64::new(v.norm(), 0.0);
    let mut sigma = 0.0f64;
    for _ in 0..iters {
        let w = a * &v;
        let mut u = a.adjoint() * w;
        let norm = u.norm();
        if norm == 0.0 {
            return 0.0;
        }
        u /= Complex64::new(norm, 0.0);
        let new_sigma = norm.sqrt();
        let done = (new_sigma - sigma).abs() <= tol * new_sigma.max(1.0);
        sigma = new_sigma;
        v = u;
        if done {
            break;
        }
    }
    sigma
}
