//! Word maps on classical Lie algebras, matrix algebras and `SL_n` over
//! finite local rings: exact fiber counts, word measures, Fourier analysis,
//! jets, weight degenerations and polyhypergraph encodings.

pub mod chevalley;
pub mod counting;
pub mod cyclotomic;
pub mod dph;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod polymap;
pub mod ring;
pub mod words;

pub use chevalley::{algebra_make, group_make, AlgebraType, ChevalleyAlgebra, FiniteGroup, RootInfo, RootType, SlGroup};
pub use counting::{CountOptions, DiagnosticSeries, Measure, WordMap};
pub use dph::{Coloring, PolyHypergraph};
pub use error::{Error, Result};
pub use matrix::Mat;
pub use polymap::{Carrier, IdealSpec, JetConvention, Poly, PolyMap, VarLayout, WeightKind, Weights};
pub use ring::{ring_make, Ring, RingKind, RingSpec};
pub use words::{AssocWord, GroupWord, JetVariableIndex, LieTree, LieWord, Word, WordKind};
