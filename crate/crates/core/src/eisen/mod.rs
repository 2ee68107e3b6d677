//! Eisenstein-series side: the polynomial R(g; beta, s'), the projection
//! polynomial P, the constants C* and the coefficients over V_{p^r sigma}.

pub mod coeff;
pub mod constant;
pub mod projection;
pub mod rpoly;

pub use coeff::{congruence_check, congruent_mod, CongruenceReport, EisenData, ThetaLevel, Violation};
pub use constant::{c_star, CStarParams, LocalPolys, Sign, SymbolicConstant, WeightData};
pub use projection::{BuiltinN1, ProjectionContext, ProjectionPoly, ProjectionRegistry};
pub use rpoly::{r_poly, MPoly, SymPolyG};
