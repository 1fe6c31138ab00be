//! Geometric multipath channel model for a half-wavelength ULA.
//!
//! A channel is a sum of K rays, each a steering vector weighted by a
//! complex gain. The synthetic scenario generator draws departure angles
//! either on the analysis grid (distinct bins, no replacement) or uniformly
//! in sin-angle, with gains i.i.d. circular Gaussian scaled so the expected
//! channel energy is N regardless of K. Scenarios are pure functions of
//! their configuration and seed.

use num_complex::Complex64;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

use crate::dft::{dft, ComplexVector};
use crate::error::{Error, Result};
use crate::sector::Sector;

// ── Domain types ────────────────────────────────────────────────────────────

/// Single propagation path: departure angle (radians) and complex gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    aod: f64,
    gain: Complex64,
}

impl Ray {
    pub fn new(aod: f64, gain: Complex64) -> Result<Self> {
        if !aod.is_finite() {
            return Err(Error::NonFinite { context: "ray angle" });
        }
        if !gain.re.is_finite() || !gain.im.is_finite() {
            return Err(Error::NonFinite { context: "ray gain" });
        }
        Ok(Self { aod, gain })
    }

    pub fn aod(&self) -> f64 {
        self.aod
    }

    pub fn gain(&self) -> Complex64 {
        self.gain
    }

    /// Spatial frequency sin(aod), always in [-1, 1].
    pub fn spatial_frequency(&self) -> f64 {
        self.aod.sin()
    }
}

/// The rays making up one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySet {
    rays: Vec<Ray>,
}

impl RaySet {
    pub fn new(rays: Vec<Ray>) -> Result<Self> {
        if rays.is_empty() {
            return Err(Error::InvalidConfig("a ray set needs at least one ray".into()));
        }
        Ok(Self { rays })
    }

    pub fn k(&self) -> usize {
        self.rays.len()
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Ray> {
        self.rays.iter()
    }
}

/// How departure angles are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    /// Distinct analysis-grid bins, sampled without replacement.
    OnGrid,
    /// Spatial frequencies uniform on the band, independent across rays.
    OffGrid,
}

/// Recipe for drawing random scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelScenarioConfig {
    /// Array size N.
    pub n_antennas: usize,
    /// Rays per channel.
    pub k_rays: usize,
    pub grid_mode: GridMode,
    /// When true, gains are CN(0, 1/K) so E[h^H h] = N; when false the
    /// per-ray variance is 1.
    pub power_normalization: bool,
    pub rng_seed: u64,
    /// Restricts angle draws to one sector's band when set.
    pub sector: Option<Sector>,
}

impl ChannelScenarioConfig {
    /// Off-grid, power-normalized, full-band scenario with the given size.
    pub fn new(n_antennas: usize, k_rays: usize) -> Self {
        Self {
            n_antennas,
            k_rays,
            grid_mode: GridMode::OffGrid,
            power_normalization: true,
            rng_seed: 0,
            sector: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_antennas < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 antennas, got {}",
                self.n_antennas
            )));
        }
        if self.k_rays == 0 {
            return Err(Error::InvalidConfig("k_rays must be positive".into()));
        }
        if let Some(sector) = &self.sector {
            if sector.n() != self.n_antennas {
                return Err(Error::InvalidConfig(format!(
                    "sector grid size {} does not match n_antennas {}",
                    sector.n(),
                    self.n_antennas
                )));
            }
        }
        if self.grid_mode == GridMode::OnGrid {
            let bins = match &self.sector {
                Some(s) => s.n_sec(),
                None => self.n_antennas,
            };
            if self.k_rays > bins {
                return Err(Error::InvalidConfig(format!(
                    "cannot place {} distinct on-grid rays in {bins} bins",
                    self.k_rays
                )));
            }
        }
        Ok(())
    }

    /// Seeded stream for standalone use of this scenario.
    pub fn rng(&self) -> ChaCha8Rng {
        use rand::SeedableRng;
        ChaCha8Rng::seed_from_u64(self.rng_seed)
    }
}

// ── Operations ──────────────────────────────────────────────────────────────

/// ULA steering vector `[exp(j*n*pi*sin(theta))]` for n = 0..N-1.
pub fn steering_vector(n: usize, theta: f64) -> ComplexVector {
    assert!(n >= 1, "steering vector needs at least one antenna");
    assert!(theta.is_finite(), "steering angle must be finite");
    let omega = PI * theta.sin();
    ComplexVector::from_raw(
        (0..n)
            .map(|i| Complex64::from_polar(1.0, omega * i as f64))
            .collect(),
    )
}

/// Superimposes the rays: `h = sum_k gain_k * steering(N, aod_k)`.
pub fn synthesize_channel(rays: &RaySet, n: usize) -> ComplexVector {
    assert!(n >= 1, "channel needs at least one antenna");
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    for ray in rays.iter() {
        let omega = PI * ray.spatial_frequency();
        for (i, entry) in h.iter_mut().enumerate() {
            *entry += ray.gain() * Complex64::from_polar(1.0, omega * i as f64);
        }
    }
    ComplexVector::from_raw(h)
}

/// Analysis-domain view of the channel, `g = dft(h)`.
pub fn beamspace(h: &ComplexVector) -> ComplexVector {
    dft(h)
}

/// Departure angle of grid bin `index`: spatial frequency 2*index/N wrapped
/// into [-1, 1).
pub fn grid_angle(n: usize, index: usize) -> f64 {
    assert!(index < n, "grid index {index} out of range for N = {n}");
    let mut u = 2.0 * index as f64 / n as f64;
    if u >= 1.0 {
        u -= 2.0;
    }
    u.asin()
}

/// Draws one scenario from the config using the supplied stream. Equal
/// configs and equal stream states give equal ray sets.
pub fn sample_scenario(config: &ChannelScenarioConfig, rng: &mut impl Rng) -> Result<RaySet> {
    config.validate()?;
    let n = config.n_antennas;
    let k = config.k_rays;

    let angles: Vec<f64> = match config.grid_mode {
        GridMode::OnGrid => {
            let (offset, bins) = match &config.sector {
                Some(s) => (s.d1(), s.n_sec()),
                None => (0, n),
            };
            sample_indices(rng, bins, k)
                .into_iter()
                .map(|i| grid_angle(n, offset + i))
                .collect()
        }
        GridMode::OffGrid => {
            let (lo, width) = match &config.sector {
                // The band of sector [d1, d2] in sin-angle, half a bin past
                // each edge so consecutive sectors tile [-1, 1) exactly.
                Some(s) => ((2.0 * s.d1() as f64 - 1.0) / n as f64, 2.0 * s.n_sec() as f64 / n as f64),
                None => (-1.0, 2.0),
            };
            (0..k)
                .map(|_| {
                    let u = lo + width * rng.gen::<f64>();
                    let wrapped = (u + 1.0).rem_euclid(2.0) - 1.0;
                    wrapped.asin()
                })
                .collect()
        }
    };

    let sigma = if config.power_normalization {
        (0.5 / k as f64).sqrt()
    } else {
        0.5f64.sqrt()
    };
    let rays = angles
        .into_iter()
        .map(|aod| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Ray::new(aod, Complex64::new(re * sigma, im * sigma))
        })
        .collect::<Result<Vec<_>>>()?;
    RaySet::new(rays)
}
