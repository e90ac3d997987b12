pub mod algebra;
pub mod character;
pub mod checks;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod linalg;
pub mod scalar;
pub mod series;
pub mod vertex;

pub use algebra::{BracketChecker, BracketFamily, BracketReport, Engine, GeneratorDictionary, ModeOperator};
pub use character::{AffineWeight, CharacterTable};
pub use error::{Error, Result};
pub use fock::{DegreeWindow, FockMonomial, FockSpace, FockVector, OscillatorMode, Oscillators};
pub use lattice::{Lattice, LatticeVector, Rank, RootClass, RootSystem};
pub use scalar::{Rational, Scalar};
pub use vertex::{ModeIndex, PhaseConvention, VertexOperator};
