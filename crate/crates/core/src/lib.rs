pub mod coupling;
pub mod error;
pub mod grid;
pub mod model;
pub mod pde;
pub mod verify;
pub mod cli;
