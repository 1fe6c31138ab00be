//! Sparse recovery of the in-sector analysis coefficients.
//!
//! Subsampling the convolution of the channel with the flip-conjugated base
//! beam at shifts Omega gives measurements `y = A_L x_L + n`, where A_L is
//! the row-subsampled synthesis matrix restricted to the sector band and
//! `x_L = g_L .* p_eff_L` the masked analysis coefficients. Orthogonal
//! matching pursuit on A_L recovers x_L; dividing out the effective mask
//! returns the beamspace estimate, and synthesizing it returns the channel.
//! An oversampled-dictionary variant trades the fixed grid for steering
//! atoms at fractional spacing and confines selection to the sector window.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

use crate::beam::{beam_ensemble, BaseBeam};
use crate::dft::{
    circular_convolve, dft, flip_conjugate, hadamard, idft, inner_product,
    padded_synthesis_spectrum, ComplexVector,
};
use crate::error::{Error, Result};
use crate::sampling::ShiftSet;
use crate::sector::Sector;

/// Singular values below this fraction of the largest are treated as zero
/// when solving the support's least-squares system.
const LS_RELATIVE_TOL: f64 = 1e-12;

/// Mask magnitudes below this cannot be divided out.
const DEMASK_TOL: f64 = 1e-9;

// ── Domain types ────────────────────────────────────────────────────────────

/// The in-sector measurement operator `A_L = S U_N` restricted to the
/// sector columns: `a[m][j] = exp(j*2*pi*c_m*(d1+j)/N) / sqrt(N)`.
#[derive(Debug, Clone)]
pub struct SensingMatrix {
    a: DMatrix<Complex64>,
    shifts: ShiftSet,
    sector: Sector,
}

impl SensingMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.a
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_sec(&self) -> usize {
        self.a.ncols()
    }

    pub fn shifts(&self) -> &ShiftSet {
        &self.shifts
    }

    pub fn sector(&self) -> &Sector {
        &self.sector
    }
}

/// Sparse solution: selected columns in selection order with their
/// least-squares coefficients and the final residual norm.
#[derive(Debug, Clone)]
pub struct SparseEstimate {
    support: Vec<usize>,
    values: Vec<Complex64>,
    residual_norm: f64,
}

impl SparseEstimate {
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    /// Scatters the coefficients into a dense length-`len` vector.
    pub fn to_dense(&self, len: usize) -> Result<ComplexVector> {
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for (&j, &v) in self.support.iter().zip(&self.values) {
            if j >= len {
                return Err(Error::IndexOutOfRange { index: j, len });
            }
            out[j] = v;
        }
        ComplexVector::new(out)
    }
}

/// Oversampled-dictionary recovery: the channel estimate plus the selected
/// window atoms.
#[derive(Debug, Clone)]
pub struct OversampledRecovery {
    /// Synthesized channel estimate from the selected steering atoms.
    pub h_hat: ComplexVector,
    /// Selected atom indices within the sector window, selection order.
    pub support: Vec<usize>,
    pub coefficients: Vec<Complex64>,
    pub residual_norm: f64,
}

// ── Measurement formation ───────────────────────────────────────────────────

/// Inner-product measurements against an explicit beam list, plus optional
/// circular Gaussian noise of variance `noise_std^2` per entry.
pub(crate) fn measure_with_beams(
    h: &ComplexVector,
    beams: &[ComplexVector],
    noise_std: f64,
    rng: &mut impl Rng,
) -> Result<ComplexVector> {
    if beams.is_empty() {
        return Err(Error::InvalidConfig("need at least one measurement beam".into()));
    }
    if !(noise_std.is_finite() && noise_std >= 0.0) {
        return Err(Error::NonFinite { context: "noise standard deviation" });
    }
    let mut y = Vec::with_capacity(beams.len());
    let component = noise_std / 2.0f64.sqrt();
    for f in beams {
        let mut v = inner_product(h, f)?;
        if noise_std > 0.0 {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            v += Complex64::new(re * component, im * component);
        }
        y.push(v);
    }
    ComplexVector::new(y)
}

/// Measurements as the receiver forms them: one inner product of the
/// channel with each shifted beam, `y[m] = <h, shift(f_b, c_m)> + n[m]`.
pub fn simulate_measurements(
    h: &ComplexVector,
    base: &BaseBeam,
    shifts: &ShiftSet,
    noise_std: f64,
    rng: &mut impl Rng,
) -> Result<ComplexVector> {
    if h.len() != base.n() {
        return Err(Error::DimensionMismatch {
            context: "simulate_measurements",
            left: h.len(),
            right: base.n(),
        });
    }
    let beams = beam_ensemble(base, shifts)?;
    measure_with_beams(h, &beams, noise_std, rng)
}

/// The same noiseless measurements computed as the subsampled circular
/// convolution of the channel with the flip-conjugated base beam.
pub fn measurements_via_convolution(
    h: &ComplexVector,
    base: &BaseBeam,
    shifts: &ShiftSet,
) -> Result<ComplexVector> {
    if h.len() != base.n() || shifts.n() != base.n() {
        return Err(Error::DimensionMismatch {
            context: "measurements_via_convolution",
            left: h.len(),
            right: base.n(),
        });
    }
    let conv = circular_convolve(h, &flip_conjugate(base.beam()))?;
    ComplexVector::new(shifts.iter().map(|&c| conv[c]).collect())
}

/// The same noiseless measurements computed in the analysis domain:
/// synthesize the masked coefficients `x = g .* p_eff` and read the shift
/// positions.
pub fn measurements_via_masked_dft(
    h: &ComplexVector,
    base: &BaseBeam,
    shifts: &ShiftSet,
) -> Result<ComplexVector> {
    if h.len() != base.n() || shifts.n() != base.n() {
        return Err(Error::DimensionMismatch {
            context: "measurements_via_masked_dft",
            left: h.len(),
            right: base.n(),
        });
    }
    let x = hadamard(&dft(h), &base.effective_mask())?;
    let full = idft(&x);
    ComplexVector::new(shifts.iter().map(|&c| full[c]).collect())
}

// ── Operator construction ───────────────────────────────────────────────────

/// Builds the in-sector measurement operator for a shift set.
pub fn build_sensing_matrix(shifts: &ShiftSet, sector: &Sector) -> Result<SensingMatrix> {
    if shifts.n() != sector.n() {
        return Err(Error::DimensionMismatch {
            context: "build_sensing_matrix",
            left: shifts.n(),
            right: sector.n(),
        });
    }
    let n = sector.n();
    let scale = 1.0 / (n as f64).sqrt();
    let a = DMatrix::from_fn(shifts.m(), sector.n_sec(), |row, col| {
        let c = shifts.shifts()[row];
        let phase = 2.0 * PI * (c * (sector.d1() + col)) as f64 / n as f64;
        Complex64::from_polar(scale, phase)
    });
    Ok(SensingMatrix {
        a,
        shifts: shifts.clone(),
        sector: *sector,
    })
}

// ── Orthogonal matching pursuit ─────────────────────────────────────────────

/// Greedy sparse solve of `y ~ a * x`.
///
/// Each iteration scores every unselected column by its norm-compensated
/// correlation with the residual (exact ties go to the lowest index), adds
/// the winner, and refits all coefficients by least squares on the chosen
/// columns; rank-deficient supports fall back to the pseudoinverse with
/// singular values below 1e-12 of the largest treated as zero. Stops after
/// `max_sparsity` selections or as soon as the residual norm drops to
/// `residual_tol` times the measurement norm.
pub fn omp(
    y: &ComplexVector,
    a: &DMatrix<Complex64>,
    max_sparsity: usize,
    residual_tol: f64,
) -> Result<SparseEstimate> {
    if y.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            context: "omp",
            left: y.len(),
            right: a.nrows(),
        });
    }
    if !(residual_tol.is_finite() && residual_tol >= 0.0) {
        return Err(Error::NonFinite { context: "omp residual tolerance" });
    }
    let n_cols = a.ncols();
    let budget = max_sparsity.min(a.nrows()).min(n_cols);

    let col_norms: Vec<f64> = (0..n_cols).map(|j| a.column(j).norm()).collect();
    let y_vec = nalgebra::DVector::from_column_slice(y.as_slice());
    let y_norm = y_vec.norm();

    let mut support: Vec<usize> = Vec::new();
    let mut values = nalgebra::DVector::<Complex64>::zeros(0);
    let mut residual = y_vec.clone();
    let mut residual_norm = y_norm;

    while support.len() < budget && residual_norm > residual_tol * y_norm {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n_cols {
            if support.contains(&j) || col_norms[j] == 0.0 {
                continue;
            }
            let score = a.column(j).dotc(&residual).norm() / col_norms[j];
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        let (pick, score) = match best {
            Some(found) => found,
            None => break,
        };
        if score == 0.0 {
            // The residual is orthogonal to every remaining column; another
            // selection cannot reduce it.
            break;
        }
        support.push(pick);

        let sub = a.select_columns(support.iter());
        let svd = sub.clone().svd(true, true);
        let eps = LS_RELATIVE_TOL
            * svd
                .singular_values
                .iter()
                .fold(0.0f64, |acc, &s| acc.max(s));
        values = svd
            .solve(&y_vec, eps)
            .expect("SVD solve with computed U and V never fails");
        residual = &y_vec - sub * &values;
        residual_norm = residual.norm();
    }

    Ok(SparseEstimate {
        support,
        values: values.iter().copied().collect(),
        residual_norm,
    })
}

// ── Demasking and synthesis ─────────────────────────────────────────────────

/// Divides the effective mask out of a masked-coefficient estimate,
/// returning the dense in-sector beamspace estimate `g_hat_L`.
pub fn demask(estimate: &SparseEstimate, base: &BaseBeam) -> Result<ComplexVector> {
    let sector = base.sector();
    let p_eff = base.effective_mask();
    let mut g = vec![Complex64::new(0.0, 0.0); sector.n_sec()];
    for (&j, &x) in estimate.support().iter().zip(estimate.values()) {
        if j >= sector.n_sec() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: sector.n_sec(),
            });
        }
        let p = p_eff[sector.d1() + j];
        if p.norm() < DEMASK_TOL {
            return Err(Error::SingularMask { index: sector.d1() + j });
        }
        g[j] = x * p.conj() / p.norm_sqr();
    }
    ComplexVector::new(g)
}

/// Synthesizes the in-sector beamspace estimate back to the array domain:
/// `h_hat = U_N * embed(g_hat_L)`.
pub fn reconstruct_channel(g_hat_l: &ComplexVector, sector: &Sector) -> Result<ComplexVector> {
    if g_hat_l.len() != sector.n_sec() {
        return Err(Error::DimensionMismatch {
            context: "reconstruct_channel",
            left: g_hat_l.len(),
            right: sector.n_sec(),
        });
    }
    let mut g = vec![Complex64::new(0.0, 0.0); sector.n()];
    for (offset, &v) in g_hat_l.iter().enumerate() {
        g[sector.d1() + offset] = v;
    }
    Ok(idft(&ComplexVector::from_raw(g)))
}

// ── Oversampled dictionary ──────────────────────────────────────────────────

/// Steering atom q of the oversampled grid: spatial frequency
/// 2q/(oversampling*N), unit norm.
fn dictionary_atom(n: usize, oversampling: usize, q: usize) -> ComplexVector {
    let scale = 1.0 / (n as f64).sqrt();
    let step = 2.0 * PI * q as f64 / (oversampling * n) as f64;
    ComplexVector::from_raw(
        (0..n)
            .map(|i| Complex64::from_polar(scale, step * i as f64))
            .collect(),
    )
}

/// Correlations of every beam against the window atoms: row m holds
/// `<atom_q, f_m>` for q in [oversampling*d1, oversampling*(d2+1)).
fn beam_atom_products(
    beams: &[ComplexVector],
    sector: &Sector,
    oversampling: usize,
) -> DMatrix<Complex64> {
    let n = sector.n();
    let len = oversampling * n;
    let q0 = oversampling * sector.d1();
    let window = oversampling * sector.n_sec();
    let scale = 1.0 / (n as f64).sqrt();

    let mut out = DMatrix::zeros(beams.len(), window);
    for (m, f) in beams.iter().enumerate() {
        let conj_beam: Vec<Complex64> = f.iter().map(|z| z.conj()).collect();
        let spectrum = padded_synthesis_spectrum(&conj_beam, len);
        for col in 0..window {
            out[(m, col)] = spectrum[q0 + col] * scale;
        }
    }
    out
}

/// Windowed matching pursuit on the oversampled steering dictionary.
///
/// Works for any beam list, circulant or not: the compressed matrix is the
/// beam-atom product restricted to the sector window, so atoms outside the
/// window can never be selected. Returns the synthesized channel estimate
/// `h_hat = D_win * g_win`. With `oversampling = 1` the atoms coincide with
/// the analysis grid and the result matches the masked grid pipeline.
pub fn omp_oversampled(
    y: &ComplexVector,
    beams: &[ComplexVector],
    sector: &Sector,
    oversampling: usize,
    max_sparsity: usize,
    residual_tol: f64,
) -> Result<OversampledRecovery> {
    if oversampling == 0 {
        return Err(Error::InvalidConfig("oversampling must be at least 1".into()));
    }
    if beams.is_empty() {
        return Err(Error::InvalidConfig("need at least one measurement beam".into()));
    }
    if y.len() != beams.len() {
        return Err(Error::DimensionMismatch {
            context: "omp_oversampled",
            left: y.len(),
            right: beams.len(),
        });
    }
    for f in beams {
        if f.len() != sector.n() {
            return Err(Error::DimensionMismatch {
                context: "omp_oversampled beam",
                left: f.len(),
                right: sector.n(),
            });
        }
    }

    let phi = beam_atom_products(beams, sector, oversampling);
    let estimate = omp(y, &phi, max_sparsity, residual_tol)?;

    let n = sector.n();
    let q0 = oversampling * sector.d1();
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    for (&col, &v) in estimate.support().iter().zip(estimate.values()) {
        let atom = dictionary_atom(n, oversampling, q0 + col);
        for i in 0..n {
            h[i] += v * atom[i];
        }
    }
    Ok(OversampledRecovery {
        h_hat: ComplexVector::new(h)?,
        support: estimate.support().to_vec(),
        coefficients: estimate.values().to_vec(),
        residual_norm: estimate.residual_norm(),
    })
}
