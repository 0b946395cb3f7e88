//! Numerical laboratory for hypercyclic and chaotic operators built from a
//! right inverse.
//!
//! The crate works with pairs `(A, B)` where `A B f = f` on a dense subset
//! `Y`, and turns the decay of `A^n f` and `B^n f` into explicit periodic
//! points, eigenvectors, hypercyclic vectors and point-spectrum scans.

pub mod enumerate;
pub mod error;
pub mod linalg;
pub mod pairs;
pub mod report;
pub mod series;
pub mod space;
pub mod verifier;

pub use error::{Error, ErrorClass, Result};
pub use pairs::{
    make_bounded_shift, make_differentiation, make_unbounded_shift, multiple_pair, power_pair,
    swap_pair, AdjointView, DecayProfile, OperatorPair, PairDescriptor, PairSpec, Transform,
};
pub use series::{
    eigenvector, hypercyclic_vector, kernel_isomorphism, kernel_isomorphism_inverse,
    local_spectral_radius, periodic_point, HypercyclicSchedule, SeriesResult, Side,
    SpectralEstimate,
};
pub use space::{Scalar, Space, Vector};
pub use verifier::{
    adjoint_nonhc_probe, check_hypotheses, check_kernel_range_disjoint, orbit_density_probe,
    probe_adjoint, spectrum_scan, verify_eigen, verify_periodic, AdjointProbeResult, DecayClass,
    HypothesisVerdict, ScanCell,
};
