//! Band-limited functions on the unit circle, stored as dense Fourier
//! coefficients over the symmetric window `[-M, M]`. The one-particle space
//! everywhere in this crate is L^2(S^1) with normalized arclength measure, so
//! `|f|^2` is the plain coefficient sum.

use crate::error::BoundaryError;
use num_complex::Complex64;
use rustfft::FftPlanner;

type C = Complex64;

/// Truncated Fourier series `f(z) = sum_{|n| <= band} coeff(n) z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    /// Coefficient of `z^n` at index `n + band`.
    coeffs: Vec<C>,
    band: usize,
}

/// Result of the Hardy projection: `plus` carries frequencies `>= 0`,
/// `minus` the frequencies `< 0`, and `plus + minus` is the input.
#[derive(Debug, Clone)]
pub struct HardySplit {
    pub plus: BoundaryFunction,
    pub minus: BoundaryFunction,
}

impl BoundaryFunction {
    pub fn zero(band: usize) -> Self {
        BoundaryFunction {
            coeffs: vec![C::new(0.0, 0.0); 2 * band + 1],
            band,
        }
    }

    /// The monomial `z^n`. Panics if `|n|` exceeds `band`.
    pub fn monomial(n: i64, band: usize) -> Self {
        let mut f = Self::zero(band);
        f.set_coeff(n, C::new(1.0, 0.0));
        f
    }

    pub fn constant(value: C, band: usize) -> Self {
        let mut f = Self::zero(band);
        f.set_coeff(0, value);
        f
    }

    pub fn from_coeffs(pairs: &[(i64, C)], band: usize) -> Self {
        let mut f = Self::zero(band);
        for &(n, c) in pairs {
            f.set_coeff(n, f.coeff(n) + c);
        }
        f
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn coeff(&self, n: i64) -> C {
        if n.unsigned_abs() as usize > self.band {
            C::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.band as i64) as usize]
        }
    }

    pub fn set_coeff(&mut self, n: i64, value: C) {
        assert!(
            n.unsigned_abs() as usize <= self.band,
            "frequency {n} outside band {}",
            self.band
        );
        self.coeffs[(n + self.band as i64) as usize] = value;
    }

    /// Iterator over `(frequency, coefficient)` pairs with nonzero entries.
    pub fn support(&self) -> impl Iterator<Item = (i64, C)> + '_ {
        let band = self.band as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() != 0.0)
            .map(move |(i, &c)| (i as i64 - band, c))
    }

    /// L^2 norm with respect to normalized arclength.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, z: C) -> C {
        // Split into the polynomial part in z and in 1/z; Horner on each.
        let mut plus = C::new(0.0, 0.0);
        for n in (0..=self.band as i64).rev() {
            plus = plus * z + self.coeff(n);
        }
        let zinv = C::new(1.0, 0.0) / z;
        let mut minus = C::new(0.0, 0.0);
        for n in (1..=self.band as i64).rev() {
            minus = minus * zinv + self.coeff(-n);
        }
        plus + minus * zinv
    }

    /// Re-truncate to a new band, dropping coefficients outside it.
    pub fn truncated(&self, band: usize) -> Self {
        let mut out = Self::zero(band);
        let keep = band.min(self.band) as i64;
        for n in -keep..=keep {
            out.set_coeff(n, self.coeff(n));
        }
        out
    }

    pub fn scale(&self, factor: C) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= factor;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let band = self.band.max(other.band);
        let mut out = Self::zero(band);
        for n in -(band as i64)..=(band as i64) {
            out.set_coeff(n, self.coeff(n) + other.coeff(n));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    /// Pointwise complex conjugate: coefficient at `n` becomes
    /// `conj(coeff(-n))`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.band);
        for n in -(self.band as i64)..=(self.band as i64) {
            out.set_coeff(n, self.coeff(-n).conj());
        }
        out
    }

    /// Multiplication by `z^k` (frequency shift). Grows the band as needed.
    pub fn shift(&self, k: i64) -> Self {
        let band = (self.band as i64 + k.abs()) as usize;
        let mut out = Self::zero(band);
        for (n, c) in self.support() {
            out.set_coeff(n + k, c);
        }
        out
    }

    /// Complex derivative `f'(z) = (1/iz) d/dtheta f`: the coefficient at
    /// `n` moves to `n - 1` with weight `n`.
    pub fn derivative(&self) -> Self {
        let band = self.band + 1;
        let mut out = Self::zero(band);
        for (n, c) in self.support() {
            out.set_coeff(n - 1, c * C::new(n as f64, 0.0));
        }
        out
    }

    /// Maximum modulus over an equispaced grid.
    pub fn sup_on_grid(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / grid as f64;
                self.eval(C::from_polar(1.0, theta)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Discrete Fourier analysis of equispaced boundary samples, truncated to
/// `|n| <= band`. The sample count must be a power of two and large enough
/// that the retained window is alias-free for band-limited inputs.
pub fn from_samples(samples: &[C], band: usize) -> Result<BoundaryFunction, BoundaryError> {
    let len = samples.len();
    if !len.is_power_of_two() {
        return Err(BoundaryError::NotPowerOfTwo(len));
    }
    if len < 2 * band + 1 {
        return Err(BoundaryError::Aliasing {
            samples: len,
            band,
            needed: (2 * band + 1).next_power_of_two(),
        });
    }
    let mut buf: Vec<C> = samples.to_vec();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let scale = 1.0 / len as f64;
    let mut f = BoundaryFunction::zero(band);
    for n in -(band as i64)..=(band as i64) {
        let bin = n.rem_euclid(len as i64) as usize;
        f.set_coeff(n, buf[bin] * scale);
    }
    Ok(f)
}

/// Sample an arbitrary function at `len` equispaced points (`len` a power of
/// two) and truncate; convenience wrapper around [`from_samples`].
pub fn analyze(f: impl Fn(C) -> C, len: usize, band: usize) -> Result<BoundaryFunction, BoundaryError> {
    let samples: Vec<C> = (0..len)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / len as f64;
            f(C::from_polar(1.0, theta))
        })
        .collect();
    from_samples(&samples, band)
}

/// Split into Hardy and anti-Hardy parts. Idempotent and norm-preserving in
/// the sense `|f|^2 = |plus|^2 + |minus|^2`.
pub fn hardy_project(f: &BoundaryFunction) -> HardySplit {
    let band = f.band();
    let mut plus = BoundaryFunction::zero(band);
    let mut minus = BoundaryFunction::zero(band);
    for (n, c) in f.support() {
        if n >= 0 {
            plus.set_coeff(n, c);
        } else {
            minus.set_coeff(n, c);
        }
    }
    HardySplit { plus, minus }
}

/// The antilinear involution `(cf)(z) = conj(z f(z))`, acting on monomials by
/// `z^k -> z^{-k-1}`, which exchanges the Hardy space and its complement.
pub fn conj_c(f: &BoundaryFunction) -> BoundaryFunction {
    let band = f.band() + 1;
    let mut out = BoundaryFunction::zero(band);
    for (n, c) in f.support() {
        out.set_coeff(-n - 1, c.conj());
    }
    out
}

/// Pointwise product via coefficient convolution; the result keeps every
/// computable frequency (band sum), so it is exact.
pub fn multiply(f: &BoundaryFunction, g: &BoundaryFunction) -> BoundaryFunction {
    let band = f.band() + g.band();
    let mut out = BoundaryFunction::zero(band);
    for (n, cf) in f.support() {
        for (m, cg) in g.support() {
            out.set_coeff(n + m, out.coeff(n + m) + cf * cg);
        }
    }
    out
}
