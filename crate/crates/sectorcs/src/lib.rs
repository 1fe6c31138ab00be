//! In-sector millimeter-wave channel estimation with convolutional
//! compressed sensing beams.
//!
//! A base station serving a known angular sector sounds the channel with
//! circular shifts of a single base beam. The base beam is synthesized from
//! a unit-modulus spectral mask on the sector band, so every shifted beam
//! keeps the same (low) peak-to-average power ratio and zero energy outside
//! the sector, while the measurements become a subsampled circular
//! convolution. Choosing the shifts as a random subset of the uniform
//! partial-DFT pattern (partial circulant sampling) keeps the aliasing
//! point spread function flat, and orthogonal matching pursuit on the
//! resulting structured operator recovers the in-sector beamspace channel.
//!
//! The crate covers the full pipeline:
//!
//! * [`dft`]: unitary DFT/IDFT pair, circular convolution, shift and
//!   flip-conjugate operators on complex vectors.
//! * [`sector`]: angular sector bookkeeping on the DFT grid.
//! * [`channel`]: multipath channel synthesis, on-grid and off-grid,
//!   full-band or confined to a sector.
//! * [`beam`]: spectral-mask beam design, PAPR-based mask selection, and
//!   shifted beam ensembles.
//! * [`sampling`]: shift-set constructions (uniform, partial circulant,
//!   random), point spread functions, and coherence diagnostics.
//! * [`recovery`]: measurement formation, the sensing operator, orthogonal
//!   matching pursuit, demasking, and oversampled-dictionary recovery.
//! * [`eval`]: Monte-Carlo experiments comparing sampling schemes by NMSE,
//!   achievable rate, and coherence.
//! * [`config`]: flat key=value experiment configuration files.
//! * [`output`]: CSV and JSON serialization of designs, reports, and
//!   sweep results.
//!
//! The `examples/` directory holds one runnable program per capability;
//! `cargo run --example design_beam` is a good starting point. A thin
//! `sectorcs` binary exposes the same flows as subcommands.
//!
//! ```
//! use sectorcs::{beam, dft, sampling, sector::Sector};
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha8Rng;
//!
//! // Design a constant-envelope beam for the third of four sectors of a
//! // 32-antenna array, then sound it at eight circularly shifted positions.
//! let sector = Sector::new(16, 23, 32)?;
//! let mut rng = ChaCha8Rng::seed_from_u64(7);
//! let base = beam::select_base_beam(&sector, 50, &mut rng);
//! assert!(base.papr() < 3.0);
//!
//! let shifts = sampling::pcs_shifts(32, 8, 8, &mut rng)?;
//! let ensemble = beam::beam_ensemble(&base, &shifts)?;
//! assert_eq!(ensemble.len(), 8);
//! for f in &ensemble {
//!     // Shifting preserves the spectral support: no energy off-sector.
//!     assert!(beam::out_of_sector_energy(f, &sector) < 1e-18);
//! }
//! # Ok::<(), sectorcs::error::Error>(())
//! ```

pub mod beam;
pub mod channel;
pub mod config;
pub mod dft;
pub mod error;
pub mod eval;
pub mod output;
pub mod recovery;
pub mod sampling;
pub mod sector;

pub use dft::ComplexVector;
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use sector::Sector;
