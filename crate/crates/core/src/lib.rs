pub mod numerics;
pub mod spaces;
pub mod fine;
pub mod gauges;
pub mod integral;
pub mod gallery;
pub mod cli;
