pub mod error;
pub mod extreal;
pub mod prob;
pub mod solver;
pub mod utility;
pub mod discrete;
pub mod related;
pub mod verify;
pub mod cli;
