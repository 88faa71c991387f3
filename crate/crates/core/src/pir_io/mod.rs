//! File formats, wire framing and the network service.

mod matrix_file;
mod params_file;
mod secrets_file;
pub mod server;
mod text;
mod wire;

pub use matrix_file::MatrixFile;
pub use params_file::{ParamsFile, PublicParams};
pub use secrets_file::SecretsFile;
pub use wire::{MessageType, WireFrame, HEADER_LEN, MAX_PAYLOAD, WIRE_MAGIC};

/// Environment variable consulted for a seed when none is given on the command line.
pub const SEED_ENV: &str = "PIR_SEED";
