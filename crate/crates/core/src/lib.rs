pub mod cli;
pub mod compat;
pub mod config;
pub mod families;
pub mod linalg;
pub mod quaternion;
pub mod soliton;
pub mod triplet;
pub mod verify;
