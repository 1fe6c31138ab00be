//! Compares the aliasing point spread function of three shift patterns:
//! the full uniform pattern (exactly zero in-band aliasing), a random
//! subset of it, and shifts drawn from the whole index range. The largest
//! PSF magnitude over the in-band lags is the operator coherence that
//! governs sparse recovery.
//!
//! cargo run --example psf_patterns

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sectorcs::sampling::{pcs_shifts, psf_report, rcs_shifts, uniform_shifts};
use sectorcs::Sector;

fn main() {
    let n = 64;
    let n_sec = 16;
    let m = 8;
    let sector = Sector::new(0, n_sec - 1, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);

    let patterns = [
        ("uniform (m=16)", uniform_shifts(n, n_sec).unwrap()),
        ("pcs (m=8)", pcs_shifts(n, n_sec, m, &mut rng).unwrap()),
        ("rcs (m=8)", rcs_shifts(n, m, &mut rng).unwrap()),
    ];

    println!("N = {n}, sector size {n_sec}; |psf| at the first in-band lags\n");
    print!("{:>14}", "lag");
    for lag in 1..8 {
        print!("{lag:>9}");
    }
    println!("       mu  (argmax)");

    for (name, shifts) in &patterns {
        let report = psf_report(shifts, &sector);
        print!("{name:>14}");
        for lag in 1..8 {
            print!("{:>9.4}", report.psf()[lag].norm());
        }
        println!("   {:.4}  (lag {})", report.mu(), report.argmax_index());
    }

    println!("\nshift positions:");
    for (name, shifts) in &patterns {
        println!("{name:>14}: {:?}", shifts.shifts());
    }
    println!("\nThe uniform pattern nulls every in-band lag; dropping to m=8 keeps");
    println!("the pcs coherence well below rcs because its aliases stay on the");
    println!("decimated grid, outside the sector band.");
}
