pub mod error;
pub mod materials;
pub mod special;
pub mod greens;
pub mod bie;
pub mod spectrum;
pub mod oracle;
pub mod cli;
