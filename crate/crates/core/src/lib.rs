//! Distance spectra and maximum-likelihood decoding error bounds for binary
//! linear block codes transmitted over a set of independent parallel
//! memoryless binary-input output-symmetric (MBIOS) channels.
//!
//! Code bits are assigned to the component channels at random: each bit is
//! mapped to channel `j` independently with probability `alpha_j`. All
//! bounds in this crate are ensemble averages over that random assignment
//! (and, for code ensembles, over the ensemble itself).
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`] - log-domain arithmetic, quadrature, fixed points, grid
//!   maximisation and bisection. Everything above is built on it.
//! * [`channels`] - MBIOS channel models (BIAWGN, BSC, BEC), Bhattacharyya
//!   parameters, cutoff rate and channel capacity, and solvers for
//!   two-channel reference boundaries.
//! * [`spectra`] - finite-length input-output weight enumerators (IOWEs)
//!   and distance spectra of random and repeat-accumulate ensembles.
//! * [`asymspec`] - asymptotic exponential growth rates of those spectra.
//! * [`bounds`] - block/bit error bounds: union bounds (Bhattacharyya and
//!   exact Q-form), the DS2 bound, the 1961 Gallager bound, sphere,
//!   Shulman-Feder and modified Shulman-Feder bounds, all generalised to
//!   parallel channels.
//! * [`regions`] - error exponents and attainable channel regions traced
//!   from the bounds.
//!
//! Probabilities are kept in natural-log domain throughout
//! (`f64::NEG_INFINITY` encodes zero); signal-to-noise ratios cross public
//! interfaces in dB and are converted once at the boundary.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod math;

pub mod asymspec;
pub mod bounds;
pub mod channels;
pub mod numerics;
pub mod regions;
pub mod spectra;

pub use asymspec::{Ensemble, GrowthRate};
pub use bounds::{
    error_bound, BoundConfig, BoundInput, BoundKind, BoundResult, BoundsError, SfVariant, Target,
};
pub use channels::{CapacityMethod, ChannelError, MbiosChannel, ParallelChannelSet};
pub use regions::{
    attainable, boundary_point, ds2_exponent, exponent_curve, gallager_exponent,
    reference_boundaries, region_boundary, symmetric_boundary_point, symmetric_capacity_point,
    symmetric_cutoff_point, BoundaryKind, EnsembleFlags, ExponentCurve, ExponentKind,
    RegionBoundary, RegionConfig, RegionsError,
};
pub use spectra::{DistanceSpectrum, Iowe};

