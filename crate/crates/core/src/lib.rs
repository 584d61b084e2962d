pub mod adhm;
pub mod ansatz;
pub mod boundary;
pub mod cli;
pub mod error;
pub mod fields;
pub mod io;
pub mod linearized;
pub mod quat;
