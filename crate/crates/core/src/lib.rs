//! Exact and numerical tools for Hecke operators, L-functions and
//! equidistribution on the symplectic group.
pub mod arith;
pub mod linalg;
pub use linalg::{GSpElement, LinalgError, PFrac, PLocalMatrix};
pub mod hecke;
pub use hecke::{CosetList, HeckeCombination, HeckeError, SpCocharacter};
pub mod series;
pub use series::{Coefficient, Cyclotomic, TruncatedSeries, Variable};
pub mod lfunctions;
pub use lfunctions::{LfunctionError, RootOfUnityPoint, SatakePoint, WeightTuple};
pub mod plancherel;
pub mod quadrature;
pub use plancherel::{OmegaDensity, Place, QuadratureSpec};
pub mod level_density;
pub use level_density::{TestFunctionPW, ZeroList};
pub mod counting;
pub use counting::LevelProfile;
pub mod verify;
