pub mod compare;
pub mod density;
pub mod hj;
pub mod preset;
pub mod sample;
