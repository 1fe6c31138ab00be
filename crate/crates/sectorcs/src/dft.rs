//! Complex-signal primitives: the unitary DFT pair, circular convolution,
//! circulant shifts and the flip-conjugate involution.
//!
//! Both transform directions carry the symmetric 1/sqrt(N) scaling, so they
//! are unitary: `idft(dft(v)) == v` and the l2 norm is preserved either way.
//! `dft` applies the conjugate transpose of the synthesis matrix whose
//! columns are `exp(j*2*pi*n*k/N)/sqrt(N)`; `idft` applies the matrix
//! itself. Power-of-two lengths run through a radix-2 FFT, everything else
//! through the direct O(N^2) sum, and the two paths agree to 1e-10.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

// ── Complex vectors ─────────────────────────────────────────────────────────

/// Fixed-length vector of finite complex entries. Indices are 0-based and
/// every cyclic operation below works modulo the length.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    /// Wraps a non-empty vector of finite entries.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "complex vector entry",
            });
        }
        Ok(Self { entries })
    }

    /// Builds entry-by-entry from an index function.
    pub fn from_fn(n: usize, f: impl FnMut(usize) -> Complex64) -> Result<Self> {
        Self::new((0..n).map(f).collect())
    }

    pub(crate) fn from_raw(entries: Vec<Complex64>) -> Self {
        debug_assert!(!entries.is_empty());
        debug_assert!(entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self { entries }
    }

    /// All-zero vector of length `n` (n >= 1).
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "vector length must be at least 1");
        Self::from_raw(vec![Complex64::new(0.0, 0.0); n])
    }

    /// All-ones vector of length `n` (n >= 1).
    pub fn ones(n: usize) -> Self {
        assert!(n >= 1, "vector length must be at least 1");
        Self::from_raw(vec![Complex64::new(1.0, 0.0); n])
    }

    /// Unit impulse at `index`.
    pub fn delta(n: usize, index: usize) -> Self {
        assert!(index < n, "impulse index {index} out of range for length {n}");
        let mut v = Self::zeros(n);
        v.entries[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Always false; kept so clippy-style call sites read naturally.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.entries.iter()
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.entries
    }

    /// Squared l2 norm, `sum |v[i]|^2`.
    pub fn energy(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// l2 norm.
    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// Entrywise real scaling.
    pub fn scaled(&self, s: f64) -> Self {
        Self::from_raw(self.entries.iter().map(|z| z * s).collect())
    }
}

impl std::ops::Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

impl<'a> IntoIterator for &'a ComplexVector {
    type Item = &'a Complex64;
    type IntoIter = std::slice::Iter<'a, Complex64>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

// ── Transforms ──────────────────────────────────────────────────────────────

/// Analysis transform: projects onto the conjugated Fourier columns with
/// 1/sqrt(N) scaling, so `dft(ones(N)) = sqrt(N) * delta(N, 0)`.
pub fn dft(v: &ComplexVector) -> ComplexVector {
    ComplexVector::from_raw(transform(v.as_slice(), -1.0))
}

/// Synthesis transform, the unitary inverse of [`dft`]:
/// `idft(delta(N, 0))` is the constant vector `1/sqrt(N)`.
pub fn idft(v: &ComplexVector) -> ComplexVector {
    ComplexVector::from_raw(transform(v.as_slice(), 1.0))
}

/// Unitary transform with the given exponent sign; picks the FFT for
/// power-of-two lengths and the direct sum otherwise.
fn transform(v: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = v.len();
    let mut out = if n.is_power_of_two() {
        let mut buf = v.to_vec();
        fft_radix2(&mut buf, sign);
        buf
    } else {
        transform_direct(v, sign)
    };
    let scale = 1.0 / (n as f64).sqrt();
    for z in &mut out {
        *z *= scale;
    }
    out
}

/// Direct O(N^2) evaluation of `out[k] = sum_n v[n] exp(sign*j*2*pi*n*k/N)`,
/// unnormalized. Doubles as the reference path for the FFT.
fn transform_direct(v: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = v.len();
    let roots: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, sign * 2.0 * PI * j as f64 / n as f64))
        .collect();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &x) in v.iter().enumerate() {
                acc += x * roots[(i * k) % n];
            }
            acc
        })
        .collect()
}

/// In-place iterative radix-2 transform, unnormalized, exponent sign given
/// by `sign`. Length must be a power of two.
fn fft_radix2(buf: &mut [Complex64], sign: f64) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());

    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let step = sign * 2.0 * PI / len as f64;
        let w_len = Complex64::from_polar(1.0, step);
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in start..start + len / 2 {
                let u = buf[k];
                let t = buf[k + len / 2] * w;
                buf[k] = u + t;
                buf[k + len / 2] = u - t;
                w *= w_len;
            }
        }
        len <<= 1;
    }
}

/// Unnormalized synthesis-sign spectrum of `v` zero-padded to `len`:
/// `out[q] = sum_n v[n] exp(j*2*pi*n*q/len)`. Used to correlate a vector
/// against a finer-than-N frequency grid in one pass.
pub(crate) fn padded_synthesis_spectrum(v: &[Complex64], len: usize) -> Vec<Complex64> {
    debug_assert!(len >= v.len());
    if len.is_power_of_two() {
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        buf[..v.len()].copy_from_slice(v);
        fft_radix2(&mut buf, 1.0);
        buf
    } else {
        (0..len)
            .map(|q| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, &x) in v.iter().enumerate() {
                    acc += x * Complex64::from_polar(1.0, 2.0 * PI * (i * q) as f64 / len as f64);
                }
                acc
            })
            .collect()
    }
}

// ── Cyclic operations ───────────────────────────────────────────────────────

/// Circular convolution `(a (*) b)[i] = sum_k a[k] b[(i-k) mod N]`, computed
/// by the direct double sum.
pub fn circular_convolve(a: &ComplexVector, b: &ComplexVector) -> Result<ComplexVector> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "circular_convolve",
            left: n,
            right: b.len(),
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, &ak) in a.iter().enumerate() {
        for (i, o) in out.iter_mut().enumerate() {
            *o += ak * b[(i + n - k) % n];
        }
    }
    Ok(ComplexVector::from_raw(out))
}

/// Cyclic delay by `c` positions: `out[i] = v[(i - c) mod N]`.
pub fn circulant_shift(v: &ComplexVector, c: usize) -> Result<ComplexVector> {
    let n = v.len();
    if c >= n {
        return Err(Error::IndexOutOfRange { index: c, len: n });
    }
    Ok(ComplexVector::from_raw(
        (0..n).map(|i| v[(i + n - c) % n]).collect(),
    ))
}

/// Conjugated index reversal `out[i] = conj(v[(-i) mod N])`; applying it
/// twice gives the original vector back.
pub fn flip_conjugate(v: &ComplexVector) -> ComplexVector {
    let n = v.len();
    ComplexVector::from_raw((0..n).map(|i| v[(n - i) % n].conj()).collect())
}

/// Inner product `<a, b> = b^H a` (conjugate-linear in the second slot).
pub fn inner_product(a: &ComplexVector, b: &ComplexVector) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "inner_product",
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum())
}

/// Entrywise product `a[i] * b[i]`.
pub fn hadamard(a: &ComplexVector, b: &ComplexVector) -> Result<ComplexVector> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "hadamard",
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(ComplexVector::from_raw(
        a.iter().zip(b.iter()).map(|(x, y)| x * y).collect(),
    ))
}
