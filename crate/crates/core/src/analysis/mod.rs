pub mod atk;
pub mod goodsets;
pub mod probes;
pub mod windows;
