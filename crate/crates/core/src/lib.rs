pub mod bitset;
pub mod cli;
pub mod concept;
pub mod dimensions;
pub mod error;
pub mod labelcover;
pub mod reductions;
pub mod verify;
