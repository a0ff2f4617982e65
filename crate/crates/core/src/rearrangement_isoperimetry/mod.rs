//! Decreasing and spherical rearrangements of radial functions, volume-matched
//! model balls, level-set bookkeeping, and the isoperimetric, Faber–Krahn and
//! Obata-type comparisons built on them.

mod checks;
mod coarea;
mod distribution;
mod spherical;

pub use checks::{
    faber_krahn_check, isoperimetric_check, obata_check, replay_rearrangement, RearrangementReplay,
    CONSERVATION_EXPONENTS, CONSERVATION_TOL, NODAL_TOL,
};
pub use coarea::{coarea_audit, coarea_derivative_defect, quantile_thresholds, LevelSetProfile, DEFAULT_THRESHOLDS};
pub use distribution::{
    decreasing_rearrangement, interpolant_gradient_mass, interpolant_lp_mass, DensityFn, Distribution,
    RadialSamples, RearrangedFunction,
};
pub use spherical::{spherical_rearrangement, volume_matching_radius, SphericalRearrangement};
