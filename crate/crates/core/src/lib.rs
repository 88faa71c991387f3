pub mod analysis;
pub mod attack;
pub mod chaincode;
pub mod crtcode;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod outercode;
pub mod pir;
pub mod pir_io;
pub mod poly;
pub mod upoly;
pub mod zmod;

pub use error::{PirError, Result};
