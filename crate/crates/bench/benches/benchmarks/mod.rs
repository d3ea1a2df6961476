pub mod analysis;
pub mod choice;
pub mod dynamics;
