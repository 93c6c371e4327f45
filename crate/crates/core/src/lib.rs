pub mod complex;
pub mod linalg;
pub mod torsion;
pub mod symplectic;
pub mod generators;
pub mod io;
