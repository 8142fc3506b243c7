pub mod progress;
pub mod verify;
