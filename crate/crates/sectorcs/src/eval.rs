//! Monte-Carlo comparison of sounding schemes.
//!
//! An experiment fixes the array size, the sector partition, and a
//! measurement budget, then repeats independent trials: draw a channel,
//! pick the serving sector by sector-level sounding, form that trial's
//! measurement beams, and recover the channel. Schemes under test:
//!
//! * `pcs`: circular shifts drawn from the uniform partial-DFT pattern
//!   (a partial circulant operator with flat aliasing).
//! * `rcs`: circular shifts drawn from the full index range.
//! * `greedy`: unstructured random beams screened for in-sector energy,
//!   a per-beam PAPR-unconstrained benchmark.
//! * `genie`: an exhaustive unit-norm scan of the sector grid, the
//!   noise-limited reference (its budget is the sector size, not `m`).
//!
//! Noise is calibrated to a target average per-measurement SNR scheme by
//! scheme in a first pass over the trial population, so schemes differ
//! only through their measurement geometry. Achievable rate is the one
//! metric whose noise must NOT follow the scheme (the downlink noise
//! belongs to the user, not to the sounding beams), so rates are
//! evaluated against a common reference: the per-measurement noise an
//! ideal in-band unit-norm beam would see at the target SNR. For
//! in-sector channels this coincides with the pcs/rcs/genie sounding
//! calibration. All randomness derives from per-trial counter-mode
//! streams, making every trial reproducible in isolation and the whole
//! experiment independent of evaluation order.

use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::beam::{beam_ensemble, select_base_beam, BaseBeam};
use crate::channel::{beamspace, sample_scenario, synthesize_channel, ChannelScenarioConfig};
use crate::dft::{dft, idft, inner_product, ComplexVector};
use crate::error::{Error, Result};
use crate::recovery::{
    build_sensing_matrix, demask, measure_with_beams, omp, omp_oversampled, reconstruct_channel,
};
use crate::sampling::{coherence, pcs_shifts, rcs_shifts, ShiftSet};
use crate::sector::Sector;

/// Residual stopping tolerance used when none is configured and the
/// measurements are noiseless.
const NOISELESS_RESIDUAL_TOL: f64 = 1e-6;

// Per-trial stream identifiers. Channel draws, scheme randomness, and
// measurement noise come from separate streams of the same per-trial
// counter so a calibration pass can re-derive a trial without touching
// its noise.
const CHANNEL_LANE: u64 = 1;
const SCHEME_LANE: u64 = 2;
const NOISE_LANE: u64 = 3;
const DESIGN_LANE_BASE: u64 = 1000;

fn trial_stream(seed: u64, trial: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial));
    rng.set_stream(lane);
    rng
}

fn design_stream(seed: u64, sector_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(DESIGN_LANE_BASE + sector_index as u64);
    rng
}

// ── Scheme and configuration ────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Pcs,
    Rcs,
    Greedy,
    Genie,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Pcs, Scheme::Rcs, Scheme::Greedy, Scheme::Genie];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Pcs => "pcs",
            Scheme::Rcs => "rcs",
            Scheme::Greedy => "greedy",
            Scheme::Genie => "genie",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pcs" => Ok(Scheme::Pcs),
            "rcs" => Ok(Scheme::Rcs),
            "greedy" => Ok(Scheme::Greedy),
            "genie" => Ok(Scheme::Genie),
            other => Err(Error::InvalidConfig(format!(
                "unknown scheme '{other}' (expected pcs, rcs, greedy, or genie)"
            ))),
        }
    }
}

/// Sparse-solver knobs. Unset fields fall back to scenario-derived
/// defaults: the selection budget to the ray count, the residual stop to
/// 1e-6 of the measurement norm when noiseless and to 0 under noise.
#[derive(Debug, Clone, Copy)]
pub struct OmpSettings {
    pub max_sparsity: Option<usize>,
    pub residual_tol: Option<f64>,
    /// Dictionary grid refinement; 1 recovers on the analysis grid.
    pub oversampling: usize,
}

impl Default for OmpSettings {
    fn default() -> Self {
        Self {
            max_sparsity: None,
            residual_tol: None,
            oversampling: 1,
        }
    }
}

/// Full description of a Monte-Carlo experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Array size N.
    pub n: usize,
    /// Number of equal sectors partitioning the grid.
    pub n_sectors: usize,
    /// Measurement budget per trial (ignored by `genie`, which scans the
    /// whole sector).
    pub m: usize,
    /// Target average per-measurement SNR in dB; `f64::INFINITY` turns
    /// noise off.
    pub snr_db: f64,
    pub trials: usize,
    pub scheme: Scheme,
    /// Channel scenario template. Its `sector` field must stay unset; the
    /// experiment assigns the per-trial sector itself.
    pub channel: ChannelScenarioConfig,
    /// Draw each trial's rays inside a uniformly chosen sector. When
    /// false the rays cover the full band and sector-level sounding
    /// decides which band gets estimated.
    pub in_sector: bool,
    pub omp: OmpSettings,
    /// Random masks screened per sector when designing the base beam.
    pub n_mask_candidates: usize,
    /// Greedy benchmark pool size, as a multiple of `m`.
    pub greedy_pool_factor: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(n: usize, n_sectors: usize, m: usize) -> Self {
        Self {
            n,
            n_sectors,
            m,
            snr_db: f64::INFINITY,
            trials: 100,
            scheme: Scheme::Pcs,
            channel: ChannelScenarioConfig::new(n, 4),
            in_sector: true,
            omp: OmpSettings::default(),
            n_mask_candidates: 5000,
            greedy_pool_factor: 30,
            seed: 0,
        }
    }

    pub fn n_sec(&self) -> usize {
        self.n / self.n_sectors
    }

    /// Measurements actually taken per trial.
    pub fn m_effective(&self) -> usize {
        match self.scheme {
            Scheme::Genie => self.n_sec(),
            _ => self.m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sectors == 0 || self.n % self.n_sectors != 0 {
            return Err(Error::InvalidConfig(format!(
                "n_sectors {} must divide the array size {}",
                self.n_sectors, self.n
            )));
        }
        let n_sec = self.n_sec();
        if n_sec < 2 {
            return Err(Error::InvalidConfig(format!(
                "sector size {n_sec} is too small; need at least 2 grid points"
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be positive".into()));
        }
        match self.scheme {
            Scheme::Genie => {}
            Scheme::Pcs => {
                if self.m == 0 || self.m > n_sec {
                    return Err(Error::InvalidConfig(format!(
                        "pcs draws m from the uniform pattern: need 1 <= m <= {n_sec}, got {}",
                        self.m
                    )));
                }
            }
            Scheme::Rcs | Scheme::Greedy => {
                if self.m == 0 || self.m > self.n {
                    return Err(Error::InvalidConfig(format!(
                        "need 1 <= m <= {}, got {}",
                        self.n, self.m
                    )));
                }
            }
        }
        if self.channel.n_antennas != self.n {
            return Err(Error::DimensionMismatch {
                context: "experiment vs channel array size",
                left: self.n,
                right: self.channel.n_antennas,
            });
        }
        if self.channel.sector.is_some() {
            return Err(Error::InvalidConfig(
                "channel.sector is assigned per trial; leave it unset".into(),
            ));
        }
        self.channel.validate()?;
        if self.in_sector
            && self.channel.grid_mode == crate::channel::GridMode::OnGrid
            && self.channel.k_rays > n_sec
        {
            return Err(Error::InvalidConfig(format!(
                "on-grid in-sector draws need k_rays <= sector size {n_sec}"
            )));
        }
        if self.snr_db.is_nan() {
            return Err(Error::NonFinite { context: "snr_db" });
        }
        if self.scheme == Scheme::Greedy && self.greedy_pool_factor == 0 {
            return Err(Error::InvalidConfig(
                "greedy needs a positive pool factor".into(),
            ));
        }
        if self.omp.oversampling == 0 {
            return Err(Error::InvalidConfig("oversampling must be at least 1".into()));
        }
        if let Some(tol) = self.omp.residual_tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(Error::NonFinite { context: "residual_tol" });
            }
        }
        if self.n_mask_candidates == 0 {
            return Err(Error::InvalidConfig(
                "need at least one mask candidate".into(),
            ));
        }
        Ok(())
    }
}

// ── Results ─────────────────────────────────────────────────────────────────

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial_index: usize,
    /// Sector picked by the sounding stage.
    pub selected_sector: usize,
    /// True when the sounding stage missed the sector holding the most
    /// beamspace energy.
    pub misselected: bool,
    /// Squared beamspace estimate error over the selected sector's band.
    pub nmse_numerator: f64,
    /// Channel beamspace energy in the selected band.
    pub nmse_denominator: f64,
    /// Bits per use when beamforming with the normalized estimate; NaN in
    /// noiseless runs, 0 when the estimate is empty.
    pub rate_bits: f64,
    /// Largest off-diagonal Gram magnitude of this trial's in-sector
    /// measurement operator.
    pub mu: f64,
    /// The estimate was empty (nothing selected), so the rate defaulted
    /// to zero.
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub scheme: Scheme,
    pub n: usize,
    pub n_sec: usize,
    /// Measurements per trial actually taken.
    pub m: usize,
    pub snr_db: f64,
    pub trials: usize,
    /// In-band NMSE: total squared band error over total band energy.
    pub nmse: f64,
    pub mean_rate_bits: f64,
    pub mean_mu: f64,
    /// Calibrated per-measurement noise standard deviation.
    pub noise_std: f64,
    /// Scheme-independent noise variance the rates are evaluated
    /// against; NaN in noiseless runs.
    pub rate_noise_var: f64,
    pub misselect_count: usize,
    pub degenerate_rate_count: usize,
}

/// Everything one trial produced, for detailed inspection.
#[derive(Debug, Clone)]
pub struct TrialOutput {
    pub record: TrialRecord,
    pub h: ComplexVector,
    pub h_hat: ComplexVector,
    /// True beamspace coefficients on the selected sector's band.
    pub g_true_l: ComplexVector,
    /// Estimated beamspace coefficients on the same band.
    pub g_hat_l: ComplexVector,
    pub sector: Sector,
    pub noise_std: f64,
}

/// One full-band estimate spliced together from per-sector solves.
#[derive(Debug, Clone)]
pub struct FullBandReport {
    pub h: ComplexVector,
    pub h_hat: ComplexVector,
    pub nmse: f64,
    pub noise_std: f64,
}

// ── Metrics ─────────────────────────────────────────────────────────────────

/// Pooled NMSE over a record set: total squared band error over total
/// band energy (expectation over expectation, not a mean of ratios).
pub fn nmse(records: &[TrialRecord]) -> f64 {
    let num: f64 = records.iter().map(|r| r.nmse_numerator).sum();
    let den: f64 = records.iter().map(|r| r.nmse_denominator).sum();
    num / den
}

/// Downlink rate when transmitting along the normalized estimate:
/// log2(1 + |<h, h_hat>|^2 / (|h_hat|^2 * noise_var)). An all-zero
/// estimate earns zero rate.
pub fn achievable_rate(h_hat: &ComplexVector, h: &ComplexVector, noise_var: f64) -> Result<f64> {
    if h_hat.len() != h.len() {
        return Err(Error::DimensionMismatch {
            context: "achievable_rate",
            left: h_hat.len(),
            right: h.len(),
        });
    }
    if !(noise_var.is_finite() && noise_var > 0.0) {
        return Err(Error::DegenerateMetric(
            "achievable rate needs a positive, finite noise variance",
        ));
    }
    let energy = h_hat.energy();
    if energy == 0.0 {
        return Ok(0.0);
    }
    let gain = inner_product(h, h_hat)?.norm_sqr() / energy;
    Ok((1.0 + gain / noise_var).log2())
}

/// Noise level that puts the average measured power `snr_db` decibels
/// above the per-measurement noise, over the given channel population.
pub fn noise_std_for_snr(
    beams: &[ComplexVector],
    channels: &[ComplexVector],
    snr_db: f64,
) -> Result<f64> {
    if beams.is_empty() || channels.is_empty() {
        return Err(Error::EmptyVector);
    }
    if snr_db.is_nan() {
        return Err(Error::NonFinite { context: "snr_db" });
    }
    if snr_db == f64::INFINITY {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for h in channels {
        for f in beams {
            total += inner_product(h, f)?.norm_sqr();
        }
    }
    let mean_power = total / (beams.len() * channels.len()) as f64;
    Ok((mean_power / 10f64.powf(snr_db / 10.0)).sqrt())
}

// ── Sounding and benchmark beams ────────────────────────────────────────────

/// Sector-level sounding: beamform once per sector with its base beam and
/// return the strongest responder (ties to the lowest index).
pub fn sls_select_sector(h: &ComplexVector, bases: &[BaseBeam]) -> Result<usize> {
    if bases.is_empty() {
        return Err(Error::EmptyVector);
    }
    let mut best = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    for (s, base) in bases.iter().enumerate() {
        let score = inner_product(h, base.beam())?.norm_sqr();
        if score > best_score {
            best = s;
            best_score = score;
        }
    }
    Ok(best)
}

/// Unstructured benchmark: draw `pool_factor * m` random unit-norm beams
/// and keep the `m` with the most in-sector spectral energy (score ties
/// keep pool order; the result is in pool order).
pub fn greedy_benchmark_beams(
    sector: &Sector,
    m: usize,
    pool_factor: usize,
    rng: &mut impl Rng,
) -> Result<Vec<ComplexVector>> {
    if m == 0 || pool_factor == 0 {
        return Err(Error::InvalidConfig(
            "greedy selection needs m >= 1 and pool_factor >= 1".into(),
        ));
    }
    let n = sector.n();
    let mut scored = Vec::with_capacity(pool_factor * m);
    for idx in 0..pool_factor * m {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= norm;
        }
        let f = ComplexVector::new(v)?;
        let g = dft(&f);
        let score: f64 = sector.indices().map(|i| g[i].norm_sqr()).sum();
        scored.push((score, idx, f));
    }
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut chosen: Vec<(usize, ComplexVector)> =
        scored.into_iter().take(m).map(|(_, i, f)| (i, f)).collect();
    chosen.sort_by_key(|&(i, _)| i);
    Ok(chosen.into_iter().map(|(_, f)| f).collect())
}

/// Exhaustive sector scan: one unit-norm array response per grid point of
/// the sector, so the measurements read the band coefficients directly.
pub fn directional_scan_beams(sector: &Sector) -> Vec<ComplexVector> {
    let n = sector.n();
    let scale = 1.0 / (n as f64).sqrt();
    sector
        .indices()
        .map(|i| {
            ComplexVector::from_fn(n, |row| {
                Complex64::from_polar(scale, 2.0 * PI * (row * i) as f64 / n as f64)
            })
            .expect("scan beams are finite")
        })
        .collect()
}

/// Largest off-diagonal Gram magnitude of the in-sector response matrix
/// of an arbitrary beam set (the shift-set `coherence` generalized to
/// non-circulant measurements).
pub fn beam_set_coherence(beams: &[ComplexVector], sector: &Sector) -> f64 {
    let n_sec = sector.n_sec();
    let spectra: Vec<ComplexVector> = beams.iter().map(dft).collect();
    let phi = DMatrix::from_fn(beams.len(), n_sec, |m, j| {
        spectra[m][sector.d1() + j].conj()
    });
    let gram = phi.adjoint() * &phi;
    let mut mu = 0.0f64;
    for i in 0..n_sec {
        for j in 0..n_sec {
            if i != j {
                mu = mu.max(gram[(i, j)].norm());
            }
        }
    }
    mu
}

// ── The experiment engine ───────────────────────────────────────────────────

/// The per-sector base beams an experiment with this configuration
/// sounds with, derived from per-sector design streams of the seed.
pub fn design_base_beams(config: &ExperimentConfig) -> Result<Vec<BaseBeam>> {
    let sectors = Sector::tile(config.n, config.n_sectors)?;
    Ok(sectors
        .iter()
        .enumerate()
        .map(|(s, sector)| {
            select_base_beam(sector, config.n_mask_candidates, &mut design_stream(config.seed, s))
        })
        .collect())
}

struct Context {
    config: ExperimentConfig,
    sectors: Vec<Sector>,
    bases: Vec<BaseBeam>,
}

fn build_context(config: &ExperimentConfig) -> Result<Context> {
    Ok(Context {
        config: config.clone(),
        sectors: Sector::tile(config.n, config.n_sectors)?,
        bases: design_base_beams(config)?,
    })
}

struct TrialSetup {
    h: ComplexVector,
    selected: usize,
    misselected: bool,
    beams: Vec<ComplexVector>,
    shifts: Option<ShiftSet>,
    mu: f64,
}

fn prepare_trial(ctx: &Context, trial: usize) -> Result<TrialSetup> {
    let cfg = &ctx.config;
    let mut channel_rng = trial_stream(cfg.seed, trial as u64, CHANNEL_LANE);

    let mut scenario = cfg.channel;
    if cfg.in_sector {
        let s = channel_rng.gen_range(0..cfg.n_sectors);
        scenario.sector = Some(ctx.sectors[s]);
    }
    let rays = sample_scenario(&scenario, &mut channel_rng)?;
    let h = synthesize_channel(&rays, cfg.n);

    let selected = sls_select_sector(&h, &ctx.bases)?;

    let g = beamspace(&h);
    let mut energy_argmax = 0usize;
    let mut best_energy = f64::NEG_INFINITY;
    for (s, sec) in ctx.sectors.iter().enumerate() {
        let e: f64 = sec.indices().map(|i| g[i].norm_sqr()).sum();
        if e > best_energy {
            energy_argmax = s;
            best_energy = e;
        }
    }

    let sector = ctx.sectors[selected];
    let mut scheme_rng = trial_stream(cfg.seed, trial as u64, SCHEME_LANE);
    let (beams, shifts, mu) = match cfg.scheme {
        Scheme::Pcs => {
            let shifts = pcs_shifts(cfg.n, cfg.n_sec(), cfg.m, &mut scheme_rng)?;
            let beams = beam_ensemble(&ctx.bases[selected], &shifts)?;
            let mu = coherence(&shifts, &sector);
            (beams, Some(shifts), mu)
        }
        Scheme::Rcs => {
            let shifts = rcs_shifts(cfg.n, cfg.m, &mut scheme_rng)?;
            let beams = beam_ensemble(&ctx.bases[selected], &shifts)?;
            let mu = coherence(&shifts, &sector);
            (beams, Some(shifts), mu)
        }
        Scheme::Greedy => {
            let beams =
                greedy_benchmark_beams(&sector, cfg.m, cfg.greedy_pool_factor, &mut scheme_rng)?;
            let mu = beam_set_coherence(&beams, &sector);
            (beams, None, mu)
        }
        Scheme::Genie => (directional_scan_beams(&sector), None, 0.0),
    };

    Ok(TrialSetup {
        h,
        selected,
        misselected: selected != energy_argmax,
        beams,
        shifts,
        mu,
    })
}

#[derive(Clone, Copy)]
struct Calibration {
    /// Per-measurement sounding noise for this scheme's beams.
    noise_std: f64,
    /// Common downlink reference: what an ideal in-band unit-norm beam
    /// would see per measurement at the target SNR. Depends only on the
    /// channel population, never on the scheme.
    rate_noise_var: f64,
}

/// First pass: noiseless measurement energy over the trial population
/// fixes the noise level for the requested SNR.
fn calibrate_noise(ctx: &Context) -> Result<Calibration> {
    let cfg = &ctx.config;
    if cfg.snr_db == f64::INFINITY {
        return Ok(Calibration {
            noise_std: 0.0,
            rate_noise_var: f64::NAN,
        });
    }
    let energies: Vec<(f64, f64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64)> {
            let setup = prepare_trial(ctx, t)?;
            let mut unused = trial_stream(cfg.seed, t as u64, NOISE_LANE);
            let y = measure_with_beams(&setup.h, &setup.beams, 0.0, &mut unused)?;
            Ok((y.energy(), setup.h.energy()))
        })
        .collect::<Result<Vec<_>>>()?;
    let snr = 10f64.powf(cfg.snr_db / 10.0);
    let mean_power = energies.iter().map(|e| e.0).sum::<f64>()
        / (cfg.trials * cfg.m_effective()) as f64;
    let mean_channel_energy = energies.iter().map(|e| e.1).sum::<f64>() / cfg.trials as f64;
    Ok(Calibration {
        noise_std: (mean_power / snr).sqrt(),
        // A unit-norm beam confined to one sector band captures rho/N of
        // the channel energy per measurement on average.
        rate_noise_var: mean_channel_energy / (cfg.n_sec() as f64 * snr),
    })
}

fn run_trial(ctx: &Context, trial: usize, calibration: Calibration) -> Result<TrialOutput> {
    let cfg = &ctx.config;
    let noise_std = calibration.noise_std;
    let setup = prepare_trial(ctx, trial)?;
    let sector = ctx.sectors[setup.selected];

    let mut noise_rng = trial_stream(cfg.seed, trial as u64, NOISE_LANE);
    let y = measure_with_beams(&setup.h, &setup.beams, noise_std, &mut noise_rng)?;

    let sparsity = cfg.omp.max_sparsity.unwrap_or(cfg.channel.k_rays);
    let tol = cfg.omp.residual_tol.unwrap_or(if noise_std > 0.0 {
        0.0
    } else {
        NOISELESS_RESIDUAL_TOL
    });

    let h_hat = match cfg.scheme {
        Scheme::Genie => reconstruct_channel(&y, &sector)?,
        Scheme::Pcs | Scheme::Rcs if cfg.omp.oversampling == 1 => {
            let shifts = setup.shifts.as_ref().expect("shift schemes carry shifts");
            let sm = build_sensing_matrix(shifts, &sector)?;
            let est = omp(&y, sm.matrix(), sparsity, tol)?;
            let g_hat = demask(&est, &ctx.bases[setup.selected])?;
            reconstruct_channel(&g_hat, &sector)?
        }
        _ => {
            omp_oversampled(&y, &setup.beams, &sector, cfg.omp.oversampling, sparsity, tol)?
                .h_hat
        }
    };

    let g_true = beamspace(&setup.h);
    let g_hat = beamspace(&h_hat);
    let g_true_l = ComplexVector::new(sector.indices().map(|i| g_true[i]).collect())?;
    let g_hat_l = ComplexVector::new(sector.indices().map(|i| g_hat[i]).collect())?;
    let num: f64 = g_true_l
        .iter()
        .zip(g_hat_l.iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let den = g_true_l.energy();

    let degenerate = noise_std > 0.0 && h_hat.energy() == 0.0;
    let rate_bits = if noise_std > 0.0 {
        achievable_rate(&h_hat, &setup.h, calibration.rate_noise_var)?
    } else {
        f64::NAN
    };

    Ok(TrialOutput {
        record: TrialRecord {
            trial_index: trial,
            selected_sector: setup.selected,
            misselected: setup.misselected,
            nmse_numerator: num,
            nmse_denominator: den,
            rate_bits,
            mu: setup.mu,
            degenerate,
        },
        h: setup.h,
        h_hat,
        g_true_l,
        g_hat_l,
        sector,
        noise_std,
    })
}

fn summarize(
    config: &ExperimentConfig,
    calibration: Calibration,
    records: &[TrialRecord],
) -> ExperimentSummary {
    let trials = records.len();
    ExperimentSummary {
        scheme: config.scheme,
        n: config.n,
        n_sec: config.n_sec(),
        m: config.m_effective(),
        snr_db: config.snr_db,
        trials,
        nmse: nmse(records),
        mean_rate_bits: records.iter().map(|r| r.rate_bits).sum::<f64>() / trials as f64,
        mean_mu: records.iter().map(|r| r.mu).sum::<f64>() / trials as f64,
        noise_std: calibration.noise_std,
        rate_noise_var: calibration.rate_noise_var,
        misselect_count: records.iter().filter(|r| r.misselected).count(),
        degenerate_rate_count: records.iter().filter(|r| r.degenerate).count(),
    }
}

/// Runs the full two-pass experiment and returns the summary together
/// with the per-trial records (in trial order).
pub fn run_experiment(config: &ExperimentConfig) -> Result<(ExperimentSummary, Vec<TrialRecord>)> {
    config.validate()?;
    let ctx = build_context(config)?;
    let calibration = calibrate_noise(&ctx)?;
    let mut records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(&ctx, t, calibration).map(|out| out.record))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| r.trial_index);
    Ok((summarize(config, calibration, &records), records))
}

/// Reruns one trial of the experiment at the population-calibrated noise
/// level and returns the full estimate alongside its record.
pub fn run_single(config: &ExperimentConfig, trial_index: usize) -> Result<TrialOutput> {
    config.validate()?;
    if trial_index >= config.trials {
        return Err(Error::IndexOutOfRange {
            index: trial_index,
            len: config.trials,
        });
    }
    let ctx = build_context(config)?;
    let calibration = calibrate_noise(&ctx)?;
    run_trial(&ctx, trial_index, calibration)
}

/// Estimates one full-band channel by running the sector pipeline once
/// per sector and splicing the per-sector band estimates together
/// (`h_hat = idft(g_hat)` with each band restricted to its own sector, so
/// neighbouring solves cannot double-count leakage). Uses the trial-0
/// streams; the channel is drawn over the full band regardless of
/// `in_sector`, and the noise level is pooled over all sectors'
/// measurements.
pub fn run_full_band(config: &ExperimentConfig) -> Result<FullBandReport> {
    config.validate()?;
    let ctx = build_context(config)?;
    let cfg = &ctx.config;

    let mut channel_rng = trial_stream(cfg.seed, 0, CHANNEL_LANE);
    let mut scenario = cfg.channel;
    scenario.sector = None;
    let rays = sample_scenario(&scenario, &mut channel_rng)?;
    let h = synthesize_channel(&rays, cfg.n);

    let mut scheme_rng = trial_stream(cfg.seed, 0, SCHEME_LANE);
    let mut per_sector: Vec<(Vec<ComplexVector>, Option<ShiftSet>)> = Vec::new();
    for s in 0..cfg.n_sectors {
        let sector = ctx.sectors[s];
        per_sector.push(match cfg.scheme {
            Scheme::Pcs => {
                let shifts = pcs_shifts(cfg.n, cfg.n_sec(), cfg.m, &mut scheme_rng)?;
                (beam_ensemble(&ctx.bases[s], &shifts)?, Some(shifts))
            }
            Scheme::Rcs => {
                let shifts = rcs_shifts(cfg.n, cfg.m, &mut scheme_rng)?;
                (beam_ensemble(&ctx.bases[s], &shifts)?, Some(shifts))
            }
            Scheme::Greedy => (
                greedy_benchmark_beams(&sector, cfg.m, cfg.greedy_pool_factor, &mut scheme_rng)?,
                None,
            ),
            Scheme::Genie => (directional_scan_beams(&sector), None),
        });
    }

    let noise_std = if cfg.snr_db == f64::INFINITY {
        0.0
    } else {
        let mut total = 0.0;
        let mut count = 0usize;
        for (beams, _) in &per_sector {
            for f in beams {
                total += inner_product(&h, f)?.norm_sqr();
                count += 1;
            }
        }
        ((total / count as f64) / 10f64.powf(cfg.snr_db / 10.0)).sqrt()
    };

    let sparsity = cfg.omp.max_sparsity.unwrap_or(cfg.channel.k_rays);
    let tol = cfg.omp.residual_tol.unwrap_or(if noise_std > 0.0 {
        0.0
    } else {
        NOISELESS_RESIDUAL_TOL
    });

    let mut noise_rng = trial_stream(cfg.seed, 0, NOISE_LANE);
    let mut g_hat = vec![Complex64::new(0.0, 0.0); cfg.n];
    for (s, (beams, shifts)) in per_sector.iter().enumerate() {
        let sector = ctx.sectors[s];
        let y = measure_with_beams(&h, beams, noise_std, &mut noise_rng)?;
        let h_hat_s = match cfg.scheme {
            Scheme::Genie => reconstruct_channel(&y, &sector)?,
            Scheme::Pcs | Scheme::Rcs if cfg.omp.oversampling == 1 => {
                let shifts = shifts.as_ref().expect("shift schemes carry shifts");
                let sm = build_sensing_matrix(shifts, &sector)?;
                let est = omp(&y, sm.matrix(), sparsity, tol)?;
                let g_s = demask(&est, &ctx.bases[s])?;
                reconstruct_channel(&g_s, &sector)?
            }
            _ => {
                omp_oversampled(&y, beams, &sector, cfg.omp.oversampling, sparsity, tol)?.h_hat
            }
        };
        let g_s = beamspace(&h_hat_s);
        for i in sector.indices() {
            g_hat[i] = g_s[i];
        }
    }

    let h_hat = idft(&ComplexVector::new(g_hat)?);
    let num: f64 = h
        .iter()
        .zip(h_hat.iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    Ok(FullBandReport {
        nmse: num / h.energy(),
        h,
        h_hat,
        noise_std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::GridMode;

    fn on_grid_config(scheme: Scheme, m: usize) -> ExperimentConfig {
        let mut config = ExperimentConfig::new(32, 4, m);
        config.scheme = scheme;
        config.trials = 20;
        config.channel.k_rays = 2;
        config.channel.grid_mode = GridMode::OnGrid;
        config.n_mask_candidates = 30;
        config.seed = 42;
        config
    }

    // 1. Scheme names round-trip and bad input errors.
    #[test]
    fn scheme_round_trip() {
        for scheme in Scheme::ALL {
            assert_eq!(scheme.as_str().parse::<Scheme>().unwrap(), scheme);
        }
        assert_eq!("GENIE".parse::<Scheme>().unwrap(), Scheme::Genie);
        assert!("omp".parse::<Scheme>().is_err());
    }

    // 2. Configuration validation catches the contract violations.
    #[test]
    fn config_validation() {
        assert!(on_grid_config(Scheme::Pcs, 8).validate().is_ok());

        let mut bad = on_grid_config(Scheme::Pcs, 8);
        bad.n_sectors = 5;
        assert!(bad.validate().is_err());

        let mut bad = on_grid_config(Scheme::Pcs, 9);
        assert!(bad.validate().is_err());
        bad.scheme = Scheme::Rcs;
        assert!(bad.validate().is_ok());

        let mut bad = on_grid_config(Scheme::Pcs, 8);
        bad.trials = 0;
        assert!(bad.validate().is_err());

        let mut bad = on_grid_config(Scheme::Pcs, 8);
        bad.channel.n_antennas = 64;
        assert!(bad.validate().is_err());

        let mut bad = on_grid_config(Scheme::Pcs, 8);
        bad.channel.sector = Some(Sector::new(0, 7, 32).unwrap());
        assert!(bad.validate().is_err());

        let mut bad = on_grid_config(Scheme::Pcs, 8);
        bad.omp.oversampling = 0;
        assert!(bad.validate().is_err());

        let mut bad = on_grid_config(Scheme::Pcs, 8);
        bad.snr_db = f64::NAN;
        assert!(bad.validate().is_err());

        let mut bad = on_grid_config(Scheme::Pcs, 8);
        bad.channel.k_rays = 9;
        assert!(bad.validate().is_err());
    }

    // 3. Sounding picks the sector whose band holds the channel.
    #[test]
    fn sounding_finds_the_sector() {
        let config = on_grid_config(Scheme::Pcs, 8);
        let ctx = build_context(&config).unwrap();
        for s in 0..4 {
            let mut scenario = config.channel;
            scenario.sector = Some(ctx.sectors[s]);
            let mut rng = ChaCha8Rng::seed_from_u64(900 + s as u64);
            let rays = sample_scenario(&scenario, &mut rng).unwrap();
            let h = synthesize_channel(&rays, 32);
            assert_eq!(sls_select_sector(&h, &ctx.bases).unwrap(), s);
        }
    }

    // 4. Analytic noise calibration for a single delta beam.
    #[test]
    fn noise_std_matches_hand_computation() {
        let beams = vec![ComplexVector::delta(4, 0)];
        let h = ComplexVector::new(vec![
            Complex64::new(3.0, 4.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        // |<h, e_0>|^2 = 25, so at 10 dB the noise variance is 2.5.
        let sigma = noise_std_for_snr(&beams, &[h], 10.0).unwrap();
        assert!((sigma - 2.5f64.sqrt()).abs() < 1e-12);
        let silent = noise_std_for_snr(&beams, &[ComplexVector::ones(4)], f64::INFINITY).unwrap();
        assert_eq!(silent, 0.0);
    }

    // 5. Calibrated noise scales exactly with the SNR target because the
    // measurement-energy pass is identical.
    #[test]
    fn calibration_scales_with_snr() {
        let mut config = on_grid_config(Scheme::Genie, 8);
        config.trials = 10;
        config.snr_db = 0.0;
        let low = calibrate_noise(&build_context(&config).unwrap()).unwrap();
        config.snr_db = 10.0;
        let high = calibrate_noise(&build_context(&config).unwrap()).unwrap();
        assert!(low.noise_std > 0.0);
        assert!((low.noise_std / high.noise_std - 10f64.sqrt()).abs() < 1e-12);
        // Genie reads band coefficients directly, so the mean measured
        // power is E|h|^2 / n_sec = rho up to sampling noise.
        let rho = 32.0 / 8.0;
        let sigma_sqr = low.noise_std * low.noise_std;
        assert!((sigma_sqr / rho - 1.0).abs() < 0.5, "sigma^2 = {sigma_sqr}");
        // For on-grid in-sector channels the genie captures the whole
        // channel, so its sounding noise IS the rate reference.
        assert!((low.rate_noise_var - sigma_sqr).abs() < 1e-12);
    }

    // 6. Noiseless on-grid recovery at full uniform sampling is exact for
    // every scheme that samples the whole pattern, and the bookkeeping
    // fields behave.
    #[test]
    fn noiseless_on_grid_is_exact() {
        for scheme in [Scheme::Pcs, Scheme::Genie] {
            let config = on_grid_config(scheme, 8);
            let (summary, records) = run_experiment(&config).unwrap();
            assert!(summary.nmse < 1e-18, "{scheme}: NMSE {}", summary.nmse);
            assert_eq!(summary.misselect_count, 0, "{scheme}");
            assert_eq!(summary.degenerate_rate_count, 0, "{scheme}");
            assert!(summary.mean_rate_bits.is_nan(), "{scheme}");
            assert_eq!(summary.noise_std, 0.0);
            assert_eq!(summary.m, 8);
            assert!(summary.mean_mu < 1e-12, "{scheme}: mu {}", summary.mean_mu);
            assert_eq!(records.len(), 20);
            for (t, r) in records.iter().enumerate() {
                assert_eq!(r.trial_index, t);
                assert!(r.rate_bits.is_nan());
            }
        }
    }

    // 7. Experiments are bit-reproducible.
    #[test]
    fn experiment_is_deterministic() {
        let mut config = on_grid_config(Scheme::Rcs, 6);
        config.trials = 8;
        config.snr_db = 5.0;
        let (s1, r1) = run_experiment(&config).unwrap();
        let (s2, r2) = run_experiment(&config).unwrap();
        assert_eq!(s1.nmse.to_bits(), s2.nmse.to_bits());
        assert_eq!(s1.mean_rate_bits.to_bits(), s2.mean_rate_bits.to_bits());
        assert_eq!(s1.noise_std.to_bits(), s2.noise_std.to_bits());
        for (a, b) in r1.iter().zip(&r2) {
            assert_eq!(a.nmse_numerator.to_bits(), b.nmse_numerator.to_bits());
            assert_eq!(a.mu.to_bits(), b.mu.to_bits());
            assert_eq!(a.selected_sector, b.selected_sector);
        }
    }

    // 8. Under noise the exhaustive scan beats a thin shift budget.
    #[test]
    fn genie_beats_thin_budget_under_noise() {
        let mut pcs = on_grid_config(Scheme::Pcs, 4);
        pcs.trials = 40;
        pcs.snr_db = 5.0;
        let (pcs_summary, _) = run_experiment(&pcs).unwrap();

        let mut genie = pcs.clone();
        genie.scheme = Scheme::Genie;
        let (genie_summary, _) = run_experiment(&genie).unwrap();

        assert!(genie_summary.nmse > 0.0);
        assert!(
            genie_summary.nmse < pcs_summary.nmse,
            "genie {} vs pcs {}",
            genie_summary.nmse,
            pcs_summary.nmse
        );
        assert!(genie_summary.mean_rate_bits > pcs_summary.mean_rate_bits);
        assert_eq!(genie_summary.mean_mu, 0.0);
    }

    // 9. The greedy benchmark runs end to end and reports a strictly
    // positive operator coherence.
    #[test]
    fn greedy_benchmark_runs() {
        let mut config = on_grid_config(Scheme::Greedy, 6);
        config.trials = 6;
        config.greedy_pool_factor = 5;
        config.omp.oversampling = 1;
        let (summary, records) = run_experiment(&config).unwrap();
        assert!(summary.nmse.is_finite());
        assert!(summary.mean_mu > 0.0);
        for r in &records {
            assert!(r.mu > 0.0);
        }
    }

    // 10. Rate metric: exact estimate, scale invariance, empty estimate,
    // and the noiseless error path.
    #[test]
    fn rate_metric_properties() {
        let h = ComplexVector::new(vec![Complex64::new(1.0, 1.0), Complex64::new(0.5, -2.0)])
            .unwrap();
        let exact = achievable_rate(&h, &h, 0.5).unwrap();
        assert!((exact - (1.0 + h.energy() / 0.5).log2()).abs() < 1e-12);

        let scaled =
            ComplexVector::new(h.iter().map(|z| z * Complex64::new(0.0, 3.0)).collect()).unwrap();
        assert!((achievable_rate(&scaled, &h, 0.5).unwrap() - exact).abs() < 1e-12);

        let zero = ComplexVector::zeros(2);
        assert_eq!(achievable_rate(&zero, &h, 0.5).unwrap(), 0.0);
        assert!(achievable_rate(&h, &h, 0.0).is_err());
        assert!(achievable_rate(&h, &ComplexVector::zeros(3), 0.5).is_err());
    }

    // 11. A rerun of a single trial reproduces the experiment's record
    // and exposes consistent band vectors.
    #[test]
    fn single_trial_matches_experiment() {
        let mut config = on_grid_config(Scheme::Pcs, 6);
        config.trials = 8;
        config.snr_db = 10.0;
        let (_, records) = run_experiment(&config).unwrap();
        let single = run_single(&config, 3).unwrap();
        assert_eq!(single.record.trial_index, 3);
        assert_eq!(single.record.selected_sector, records[3].selected_sector);
        assert_eq!(
            single.record.nmse_numerator.to_bits(),
            records[3].nmse_numerator.to_bits()
        );
        assert_eq!(
            single.record.rate_bits.to_bits(),
            records[3].rate_bits.to_bits()
        );
        assert_eq!(single.g_true_l.len(), 8);
        assert_eq!(single.g_hat_l.len(), 8);
        let g_hat = beamspace(&single.h_hat);
        for (offset, i) in single.sector.indices().enumerate() {
            assert_eq!(single.g_hat_l[offset], g_hat[i]);
        }
        assert!(run_single(&config, 8).is_err());
    }

    // 12. Full-band splicing is exact when every sector is fully sampled
    // and the rays are on-grid.
    #[test]
    fn full_band_exact_when_fully_sampled() {
        let mut config = on_grid_config(Scheme::Pcs, 8);
        config.channel.k_rays = 3;
        let report = run_full_band(&config).unwrap();
        assert!(report.nmse < 1e-18, "NMSE {}", report.nmse);
        assert_eq!(report.h.len(), 32);
        assert_eq!(report.h_hat.len(), 32);
        assert_eq!(report.noise_std, 0.0);
        let report2 = run_full_band(&config).unwrap();
        let same = report
            .h_hat
            .iter()
            .zip(report2.h_hat.iter())
            .all(|(a, b)| a == b);
        assert!(same);
    }

    // 13. Orthogonal scan beams have zero operator coherence; duplicated
    // random beams do not.
    #[test]
    fn beam_set_coherence_extremes() {
        let sector = Sector::new(8, 15, 32).unwrap();
        let scan = directional_scan_beams(&sector);
        assert_eq!(scan.len(), 8);
        for f in &scan {
            assert!((f.norm() - 1.0).abs() < 1e-12);
        }
        assert!(beam_set_coherence(&scan, &sector) < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pool = greedy_benchmark_beams(&sector, 2, 3, &mut rng).unwrap();
        let doubled = vec![pool[0].clone(), pool[0].clone()];
        assert!(beam_set_coherence(&doubled, &sector) > 1e-6);
    }
}
