//! One-time signatures over a toy hash, and Reed-Solomon codes.

pub mod gf;
pub mod hash;
pub mod ots;
pub mod rs;

pub use hash::{toy_hash, toy_hash_u64};
pub use ots::{ForgeReport, KeyPair, OtsParams, SecretKey, Signature, VerifyingKey};
pub use rs::{EccParams, ReedSolomon};
