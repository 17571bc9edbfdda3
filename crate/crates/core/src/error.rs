//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("sample count {samples} cannot resolve band {band}: need at least {needed} samples (power of two) to avoid aliasing")]
    Aliasing {
        samples: usize,
        band: usize,
        needed: usize,
    },
    #[error("sample count {0} is not a power of two")]
    NotPowerOfTwo(usize),
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("sigma'(z) vanishes near z = {at} (|sigma'| = {modulus:.3e}); Koenigs data is singular on the closed disk grid")]
    DerivativeVanishes { at: num_complex::Complex64, modulus: f64 },
    #[error("Re rho dips to {min:.3e} at z = {at}, beyond tolerance {tol:.1e}: the target domain is not starlike about 0")]
    StarlikeViolation {
        min: f64,
        at: num_complex::Complex64,
        tol: f64,
    },
    #[error("Newton inversion of sigma failed at boundary point {at} after {iters} iterations (last residual {residual:.3e})")]
    NewtonDiverged {
        at: num_complex::Complex64,
        iters: usize,
        residual: f64,
    },
    #[error("phi'(z) vanishes at sample {at}; no continuous square root")]
    BranchVanishes { at: num_complex::Complex64 },
    #[error("phi' winds {winding} times around 0 along the circle; square root has a branch cut")]
    BranchCut { winding: i64 },
    #[error("negative flow time {0} is outside the semigroup")]
    NegativeTime(f64),
}

#[derive(Debug, Error)]
pub enum FockError {
    #[error("cutoff {cutoff2}/2 enumerates more than the configured capacity of {capacity} basis states")]
    Capacity { cutoff2: i64, capacity: usize },
    #[error("operator spaces are incompatible: {0}")]
    SpaceMismatch(&'static str),
}

#[derive(Debug, Error)]
pub enum VoaError {
    #[error("vertex operator evaluated at |w| = {0} outside the open punctured unit disk")]
    EvaluationDomain(f64),
    #[error("mode recursion wandered outside the basis word (internal sign/bookkeeping bug)")]
    RecursionDepth,
}

#[derive(Debug, Error)]
pub enum VirasoroError {
    #[error("smearing band {band} exceeds the configured mode band {max_band}")]
    BandTooLarge { band: usize, max_band: usize },
    #[error("rho carries negative frequencies (|coeff({freq})| = {magnitude:.3e}); the exponential needs an analytic symbol")]
    NonAnalytic { freq: i64, magnitude: f64 },
    #[error("smearing function has negative samples (min {0:.3e}); the spectral lower-bound study needs f >= 0")]
    NegativeSamples(f64),
    #[error("window {window2}/2 plus energy shifts exceeds cutoff {cutoff2}/2; identity is not exact there")]
    WindowViolation { window2: i64, cutoff2: i64 },
}

#[derive(Debug, Error)]
pub enum SegalError {
    #[error("pants geometry rejected: {0}")]
    Geometry(String),
    #[error("inner radius s = {s} is not below |w| = {w_abs}; Laurent expansions about w do not converge on the inner circle")]
    ExpansionDomain { s: f64, w_abs: f64 },
    #[error("requested window {window2}/2 is not exact at cutoff {cutoff2}/2")]
    WindowExhausted { window2: i64, cutoff2: i64 },
    #[error(transparent)]
    Geom(#[from] GeometryError),
    #[error(transparent)]
    Voa(#[from] VoaError),
    #[error(transparent)]
    Virasoro(#[from] VirasoroError),
}

#[derive(Debug, Error)]
pub enum ImplementingError {
    #[error("joint kernel at cutoff {cutoff2}/2 has dimension {dim} (threshold {threshold:.1e}); expected a one-dimensional vacuum")]
    KernelDimension {
        dim: usize,
        cutoff2: i64,
        threshold: f64,
        /// Smallest singular values of the constraint stack, for diagnostics.
        tail: Vec<f64>,
    },
    #[error("one-particle map is not square on the band ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

#[derive(Debug, Error)]
pub enum NetError {
    #[error("reparametrization pair disagrees with the flow on the complementary arc: max deviation {deviation:.3e} exceeds {tol:.1e}")]
    Localization { deviation: f64, tol: f64 },
    #[error(transparent)]
    Segal(#[from] SegalError),
    #[error(transparent)]
    Implementing(#[from] ImplementingError),
}
