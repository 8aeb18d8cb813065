//! Right-hand sides of the semiclassical limits: edge moments of μ₁,
//! boundary geometry, and the boundary/counting/bulk coefficients.

pub mod coefficients;
pub mod geometry;
pub mod moments;

pub use coefficients::{
    boundary_energy_coefficient, bulk_boundary_split, constant_field_coefficients, counting_coefficient,
    AsymptoticCoefficients, FieldProfile,
};
pub use geometry::{curve_from_parametrization, parse_points, BoundaryCurve, CurveSample, Point};
pub use moments::{edge_moment, edge_moment_detailed, level_set, EdgeMoment, LevelSet};
