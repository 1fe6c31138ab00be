//! Angular sectors expressed as contiguous index bands of the N-point
//! analysis grid. A sector of width N_sec partitions evenly into N/N_sec
//! bands, and the subsampling ratio rho = N/N_sec drives everything from
//! beam normalization to the optimal shift spacing.

use crate::error::{Error, Result};

/// Contiguous band of analysis-grid indices `d1..=d2` inside a length-N
/// grid. The width `d2 - d1 + 1` must divide N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sector {
    d1: usize,
    d2: usize,
    n: usize,
}

impl Sector {
    pub fn new(d1: usize, d2: usize, n: usize) -> Result<Self> {
        if !(d1 < d2 && d2 < n) {
            return Err(Error::InvalidSector(format!(
                "need 0 <= d1 < d2 < N, got d1 = {d1}, d2 = {d2}, N = {n}"
            )));
        }
        let width = d2 - d1 + 1;
        if n % width != 0 {
            return Err(Error::InvalidSector(format!(
                "width {width} does not divide N = {n}"
            )));
        }
        Ok(Self { d1, d2, n })
    }

    /// Splits the full grid into `n_sectors` equal consecutive sectors.
    pub fn tile(n: usize, n_sectors: usize) -> Result<Vec<Sector>> {
        if n_sectors == 0 || n % n_sectors != 0 {
            return Err(Error::InvalidSector(format!(
                "cannot tile N = {n} into {n_sectors} equal sectors"
            )));
        }
        let width = n / n_sectors;
        if width < 2 {
            return Err(Error::InvalidSector(format!(
                "sector width {width} is degenerate, need at least 2"
            )));
        }
        (0..n_sectors)
            .map(|s| Sector::new(s * width, (s + 1) * width - 1, n))
            .collect()
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sector width N_sec.
    pub fn n_sec(&self) -> usize {
        self.d2 - self.d1 + 1
    }

    /// Subsampling ratio rho = N / N_sec.
    pub fn rho(&self) -> usize {
        self.n / self.n_sec()
    }

    pub fn contains(&self, index: usize) -> bool {
        (self.d1..=self.d2).contains(&index)
    }

    /// The in-band grid indices, ascending.
    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.d1..=self.d2
    }
}
