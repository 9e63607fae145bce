//! Dense symmetric matrices over R, C and H.
//!
//! Complex and quaternionic matrices are real `2n x 2n` / `4n x 4n`
//! symmetric matrices that commute with fixed complex structures; see
//! [`ComplexStructures`].

mod det;
mod eigen;
mod io;
mod matrix;
mod structures;

pub use det::{char_series, cholesky, det_field};
pub use eigen::{eigenvalues_sym, jacobi, EigenDecomposition, Spectrum};
pub use io::{matrix_from_json, matrix_to_json, read_matrix, MatrixFile};
pub use matrix::{Algebra, Matrix, SymmetricMatrix};
pub use structures::{project_complex, project_quaternionic, ComplexStructures};
