//! Bit-packed binary words, matrices and codes, plus the GF(2) linear
//! algebra the other modules build on.

mod code;
mod matrix;
mod word;

pub(crate) use code::relabel;
pub use code::{parse_matrix, Code, LinearCode, MAX_SPAN_DIMENSION};
pub use matrix::{solve_unit, BitMatrix, Echelon, UnitSolution};
pub use word::{hamming_distance, Word};
