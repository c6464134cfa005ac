//! Quantitative checks: dispersive decay, the mixed-norm chain, Lyapunov
//! exponents of the chains, and spreading moments.

pub mod decay;
pub mod lyapunov;
pub mod moments;

pub use decay::{
    decay_snapshot, fit_decay_exponent, log_spaced_times, record_decay, ChainReport,
    ChainTolerance, DecayFit, DecaySnapshot, DecayTrace, InitialNorms, FIT_WINDOW,
};
pub use lyapunov::{
    lyapunov_exponent, lyapunov_scan, on_spectrum_energies, write_scan_csv, LyapunovPoint,
};
pub use moments::{centroid, spreading_moments, SpreadingMoments};
