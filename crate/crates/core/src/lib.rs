pub mod cli;
pub mod finance;
pub mod generate;
pub mod linalg;
pub mod lp;
pub mod polyhedra;
pub mod rational;
pub mod solver;
pub mod tree;
