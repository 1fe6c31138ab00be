//! Shift-set design and its point-spread analysis.
//!
//! Subsampling the circular convolution at shift positions Omega makes the
//! in-sector measurement operator a row-subsampled Fourier matrix whose
//! Gram is circulant. Its first row, the point spread function, is the
//! scaled synthesis transform of the 0/1 indicator of Omega, so the mutual
//! coherence of the operator is just the largest PSF magnitude over lags
//! 1..N_sec-1. Uniformly spaced shifts with spacing rho = N/N_sec make
//! every in-window PSF entry vanish, which is the best possible coherence;
//! random subsets of that uniform parent (PCS) keep more of this structure
//! than unrestricted random shifts (RCS) and show stochastically smaller
//! coherence.

use num_complex::Complex64;
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::dft::{idft, ComplexVector};
use crate::error::{Error, Result};
use crate::sector::Sector;

/// Coherence below this counts as exactly zero when tallying optimal sets.
const TIE_TOL: f64 = 1e-12;

// ── Domain types ────────────────────────────────────────────────────────────

/// Ordered set of distinct shift positions in [0, N).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSet {
    shifts: Vec<usize>,
    n: usize,
}

impl ShiftSet {
    pub fn new(shifts: Vec<usize>, n: usize) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::InvalidShifts("need at least one shift".into()));
        }
        if let Some(&bad) = shifts.iter().find(|&&c| c >= n) {
            return Err(Error::InvalidShifts(format!("shift {bad} out of range for N = {n}")));
        }
        let mut seen = vec![false; n];
        for &c in &shifts {
            if seen[c] {
                return Err(Error::InvalidShifts(format!("duplicate shift {c}")));
            }
            seen[c] = true;
        }
        Ok(Self { shifts, n })
    }

    pub fn m(&self) -> usize {
        self.shifts.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shifts(&self) -> &[usize] {
        &self.shifts
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.shifts.iter()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.shifts.contains(&c)
    }
}

/// 0/1 membership vector of a shift set, complex-typed so it plugs straight
/// into the transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingIndicator {
    b: ComplexVector,
    m: usize,
}

impl SamplingIndicator {
    pub fn vector(&self) -> &ComplexVector {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// Point spread function of a shift set relative to a sector window.
#[derive(Debug, Clone)]
pub struct PsfReport {
    psf: ComplexVector,
    mu: f64,
    argmax_index: usize,
}

impl PsfReport {
    pub fn psf(&self) -> &ComplexVector {
        &self.psf
    }

    /// Largest PSF magnitude over lags 1..=N_sec-1: the mutual coherence of
    /// the in-sector operator, in the raw inner-product scale where the
    /// zero lag is M/N.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// The lag attaining mu; ties go to the lowest lag.
    pub fn argmax_index(&self) -> usize {
        self.argmax_index
    }
}

/// Result of exhaustively scanning all size-M shift sets of a small grid.
#[derive(Debug, Clone)]
pub struct ExhaustiveCoherenceReport {
    pub min_mu: f64,
    pub best_set: Vec<usize>,
    /// How many sets reach coherence below the zero tolerance (1e-12).
    pub tie_count: usize,
    pub total_sets: u64,
}

/// The two randomized shift constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftScheme {
    /// Random subset of the uniform stride-rho parent set.
    Pcs,
    /// Random subset of all N positions.
    Rcs,
}

// ── Constructions ───────────────────────────────────────────────────────────

/// The uniform pattern {0, rho, 2*rho, ...} with rho = N/N_sec; M = N_sec
/// shifts whose in-window coherence is exactly zero.
pub fn uniform_shifts(n: usize, n_sec: usize) -> Result<ShiftSet> {
    if n_sec == 0 || n_sec > n || n % n_sec != 0 {
        return Err(Error::InvalidShifts(format!(
            "N_sec = {n_sec} must divide N = {n}"
        )));
    }
    let rho = n / n_sec;
    ShiftSet::new((0..n_sec).map(|t| t * rho).collect(), n)
}

/// Partial convolutional sampling: M distinct members of the uniform
/// parent set, ascending.
pub fn pcs_shifts(n: usize, n_sec: usize, m: usize, rng: &mut impl Rng) -> Result<ShiftSet> {
    let parent = uniform_shifts(n, n_sec)?;
    if m == 0 || m > n_sec {
        return Err(Error::InvalidShifts(format!(
            "PCS needs 1 <= M <= N_sec, got M = {m}, N_sec = {n_sec}"
        )));
    }
    let mut picks: Vec<usize> = sample_indices(rng, n_sec, m)
        .into_iter()
        .map(|t| parent.shifts()[t])
        .collect();
    picks.sort_unstable();
    ShiftSet::new(picks, n)
}

/// Random convolutional sampling: M distinct positions out of all N,
/// ascending.
pub fn rcs_shifts(n: usize, m: usize, rng: &mut impl Rng) -> Result<ShiftSet> {
    if m == 0 || m > n {
        return Err(Error::InvalidShifts(format!(
            "RCS needs 1 <= M <= N, got M = {m}, N = {n}"
        )));
    }
    let mut picks: Vec<usize> = sample_indices(rng, n, m).into_iter().collect();
    picks.sort_unstable();
    ShiftSet::new(picks, n)
}

// ── Analysis ────────────────────────────────────────────────────────────────

/// 0/1 indicator vector of the shift set.
pub fn indicator(shifts: &ShiftSet) -> SamplingIndicator {
    let mut b = vec![Complex64::new(0.0, 0.0); shifts.n()];
    for &c in shifts.iter() {
        b[c] = Complex64::new(1.0, 0.0);
    }
    SamplingIndicator {
        b: ComplexVector::from_raw(b),
        m: shifts.m(),
    }
}

/// Point spread function: the synthesis transform of the indicator with an
/// extra 1/sqrt(N), so psf[0] = M/N and psf[lag] is the Gram entry between
/// operator columns `lag` bins apart.
pub fn psf(indicator: &SamplingIndicator) -> ComplexVector {
    let n = indicator.vector().len() as f64;
    idft(indicator.vector()).scaled(1.0 / n.sqrt())
}

/// Mutual coherence: max |psf[lag]| over lags 1..=N_sec-1. Depends on the
/// sector only through its width.
pub fn coherence(shifts: &ShiftSet, sector: &Sector) -> f64 {
    psf_report(shifts, sector).mu()
}

/// Coherence rescaled by the common column norm M/N, so 1 means two
/// columns are parallel.
pub fn normalized_coherence(shifts: &ShiftSet, sector: &Sector) -> f64 {
    coherence(shifts, sector) * shifts.n() as f64 / shifts.m() as f64
}

/// PSF plus its windowed maximum in one pass.
pub fn psf_report(shifts: &ShiftSet, sector: &Sector) -> PsfReport {
    assert_eq!(
        shifts.n(),
        sector.n(),
        "shift set and sector must share the grid size"
    );
    let psf = psf(&indicator(shifts));
    let mut mu = 0.0;
    let mut argmax_index = 1;
    for lag in 1..sector.n_sec() {
        let mag = psf[lag].norm();
        if mag > mu {
            mu = mag;
            argmax_index = lag;
        }
    }
    PsfReport { psf, mu, argmax_index }
}

/// Sorted coherence sample over independently drawn shift sets; trial t
/// seeds its stream with `base_seed + t`, so any prefix of the sample is
/// reproducible in isolation.
pub fn coherence_cdf(
    scheme: ShiftScheme,
    n: usize,
    n_sec: usize,
    m: usize,
    trials: usize,
    base_seed: u64,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::InvalidConfig("coherence_cdf needs at least one trial".into()));
    }
    let sector = Sector::new(0, n_sec - 1, n)
        .map_err(|e| Error::InvalidConfig(format!("bad CDF geometry: {e}")))?;
    let mut mus = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(t as u64));
        let shifts = match scheme {
            ShiftScheme::Pcs => pcs_shifts(n, n_sec, m, &mut rng)?,
            ShiftScheme::Rcs => rcs_shifts(n, m, &mut rng)?,
        };
        mus.push(coherence(&shifts, &sector));
    }
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(mus)
}

/// Scans every size-M subset of [0, N) and reports the smallest coherence,
/// the earliest set attaining it, and how many sets reach numerical zero.
/// Exhaustive search is only viable for small grids; N is capped at 24.
pub fn min_coherence_exhaustive(n: usize, n_sec: usize, m: usize) -> Result<ExhaustiveCoherenceReport> {
    use itertools::Itertools;

    if n > 24 {
        return Err(Error::TooLarge {
            what: "exhaustive shift-set search",
            max: 24,
            got: n,
        });
    }
    if n_sec == 0 || n % n_sec != 0 {
        return Err(Error::InvalidShifts(format!(
            "N_sec = {n_sec} must divide N = {n}"
        )));
    }
    if m == 0 || m > n {
        return Err(Error::InvalidShifts(format!("need 1 <= M <= N, got M = {m}")));
    }

    let roots: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect();

    let mut min_mu = f64::INFINITY;
    let mut best_set = Vec::new();
    let mut tie_count = 0usize;
    let mut total_sets = 0u64;

    for set in (0..n).combinations(m) {
        total_sets += 1;
        let mut mu = 0.0f64;
        for lag in 1..n_sec {
            let mut acc = Complex64::new(0.0, 0.0);
            for &c in &set {
                acc += roots[(c * lag) % n];
            }
            mu = mu.max(acc.norm() / n as f64);
        }
        if mu < TIE_TOL {
            tie_count += 1;
        }
        if mu < min_mu {
            min_mu = mu;
            best_set = set;
        }
    }

    Ok(ExhaustiveCoherenceReport {
        min_mu,
        best_set,
        tie_count,
        total_sets,
    })
}
