//! Sector beam design in the analysis domain.
//!
//! A beam is specified by a spectral mask: unit-modulus random phases on
//! the sector's band, zero outside. Synthesizing the mask and applying the
//! flip-conjugate involution yields a base beam whose inner products with
//! circulant shifts of the channel realize convolutional measurements. The
//! base beam is rescaled to unit transmit norm and the rescaling factor
//! (sqrt(rho) for a width-N/rho sector) is kept so the masked analysis
//! relation stays exact. Candidate masks are screened by peak-to-average
//! power ratio, which rewards beams that spread power evenly across the
//! array.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

use crate::dft::{circulant_shift, dft, flip_conjugate, idft, ComplexVector};
use crate::error::{Error, Result};
use crate::sampling::ShiftSet;
use crate::sector::Sector;

const MASK_TOL: f64 = 1e-12;

// ── Domain types ────────────────────────────────────────────────────────────

/// Unit-modulus phases on a sector's band, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMask {
    p: ComplexVector,
    sector: Sector,
}

impl SpectralMask {
    /// Validates support and modulus against the sector.
    pub fn new(p: ComplexVector, sector: Sector) -> Result<Self> {
        if p.len() != sector.n() {
            return Err(Error::DimensionMismatch {
                context: "spectral mask",
                left: p.len(),
                right: sector.n(),
            });
        }
        for i in 0..p.len() {
            let mag = p[i].norm();
            if sector.contains(i) {
                if (mag - 1.0).abs() > MASK_TOL {
                    return Err(Error::InvalidMask(format!(
                        "in-band entry {i} has magnitude {mag}, expected 1"
                    )));
                }
            } else if mag > MASK_TOL {
                return Err(Error::InvalidMask(format!(
                    "out-of-band entry {i} has magnitude {mag}, expected 0"
                )));
            }
        }
        Ok(Self { p, sector })
    }

    /// Builds the mask from per-bin phases (radians), one per in-band bin.
    pub fn from_phases(sector: Sector, phases: &[f64]) -> Result<Self> {
        if phases.len() != sector.n_sec() {
            return Err(Error::DimensionMismatch {
                context: "mask phases",
                left: phases.len(),
                right: sector.n_sec(),
            });
        }
        let mut p = vec![Complex64::new(0.0, 0.0); sector.n()];
        for (offset, &phi) in phases.iter().enumerate() {
            p[sector.d1() + offset] = Complex64::from_polar(1.0, phi);
        }
        Ok(Self {
            p: ComplexVector::from_raw(p),
            sector,
        })
    }

    pub fn p(&self) -> &ComplexVector {
        &self.p
    }

    pub fn sector(&self) -> &Sector {
        &self.sector
    }
}

/// A unit-norm sector beam together with the mask that generated it.
#[derive(Debug, Clone)]
pub struct BaseBeam {
    f_b: ComplexVector,
    mask: SpectralMask,
    papr: f64,
    norm_factor: f64,
}

impl BaseBeam {
    pub fn beam(&self) -> &ComplexVector {
        &self.f_b
    }

    pub fn mask(&self) -> &SpectralMask {
        &self.mask
    }

    pub fn sector(&self) -> &Sector {
        self.mask.sector()
    }

    pub fn n(&self) -> usize {
        self.f_b.len()
    }

    /// Peak-to-average power ratio of the beam entries, at least 1.
    pub fn papr(&self) -> f64 {
        self.papr
    }

    /// Rescaling applied to reach unit norm; sqrt(rho) up to rounding.
    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    /// The mask as seen through the unit-norm beam: `norm_factor * p`.
    /// This is the entrywise weight relating the channel's analysis
    /// coefficients to the measurement-domain coefficients.
    pub fn effective_mask(&self) -> ComplexVector {
        self.mask.p().scaled(self.norm_factor)
    }
}

// ── Operations ──────────────────────────────────────────────────────────────

/// Draws i.i.d. uniform phases on the sector band.
pub fn random_mask(sector: &Sector, rng: &mut impl Rng) -> SpectralMask {
    let phases: Vec<f64> = (0..sector.n_sec())
        .map(|_| rng.gen::<f64>() * 2.0 * PI)
        .collect();
    SpectralMask::from_phases(*sector, &phases).expect("phases match sector width")
}

/// Synthesizes the mask, flip-conjugates, and rescales to unit norm.
///
/// The unnormalized beam is `flip_conjugate(idft(p) / sqrt(N))`, whose norm
/// is exactly sqrt(N_sec/N); dividing by it records
/// `norm_factor = sqrt(N/N_sec)` so that
/// `sqrt(N) * dft(flip_conjugate(f_b)) = norm_factor * p`.
pub fn mask_to_base_beam(mask: SpectralMask) -> BaseBeam {
    let n = mask.sector().n() as f64;
    let f_fc = idft(mask.p()).scaled(1.0 / n.sqrt());
    let f_raw = flip_conjugate(&f_fc);
    let norm = f_raw.norm();
    debug_assert!(norm > 0.0);
    let f_b = f_raw.scaled(1.0 / norm);

    let peak = f_b.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let mean = f_b.energy() / n;
    BaseBeam {
        f_b,
        mask,
        papr: peak / mean,
        norm_factor: 1.0 / norm,
    }
}

/// Draws `n_candidates` masks from the stream and keeps the beam with the
/// lowest PAPR; ties go to the earliest candidate. Candidates are drawn
/// sequentially, so a longer search with the same stream can only improve
/// the winner.
pub fn select_base_beam(sector: &Sector, n_candidates: usize, rng: &mut impl Rng) -> BaseBeam {
    assert!(n_candidates >= 1, "need at least one candidate mask");
    let mut best: Option<BaseBeam> = None;
    for _ in 0..n_candidates {
        let candidate = mask_to_base_beam(random_mask(sector, rng));
        let better = match &best {
            None => true,
            Some(b) => candidate.papr() < b.papr(),
        };
        if better {
            best = Some(candidate);
        }
    }
    best.expect("at least one candidate was drawn")
}

/// The measurement beams: circulant shifts of the base beam, one per shift.
pub fn beam_ensemble(base: &BaseBeam, shifts: &ShiftSet) -> Result<Vec<ComplexVector>> {
    if shifts.n() != base.n() {
        return Err(Error::DimensionMismatch {
            context: "beam ensemble",
            left: shifts.n(),
            right: base.n(),
        });
    }
    shifts
        .iter()
        .map(|&c| circulant_shift(base.beam(), c))
        .collect()
}

/// Out-of-band analysis-domain energy of a beam, `sum |dft(f)[i]|^2` over
/// indices outside the sector. Zero up to rounding for mask-built beams.
pub fn out_of_sector_energy(beam: &ComplexVector, sector: &Sector) -> f64 {
    let spectrum = dft(beam);
    (0..beam.len())
        .filter(|i| !sector.contains(*i))
        .map(|i| spectrum[i].norm_sqr())
        .sum()
}
