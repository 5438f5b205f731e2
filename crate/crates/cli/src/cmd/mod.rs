pub mod lln;
pub mod rate;
pub mod simulate;
pub mod verify;
