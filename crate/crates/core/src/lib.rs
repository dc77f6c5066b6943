//! DNA archive built on bacterial nanonetworks.
//!
//! Digital payloads are encoded into nucleotide plasmids ([`codec`]), stored
//! in clusters of motility-restricted bacteria ([`archive`]), and read back by
//! engineered motile bacteria that steer by three chemoattractant beacons
//! ([`field`], [`agent`]). [`engine`] runs the retrieval and positioning
//! experiments.

pub mod agent;
pub mod archive;
pub mod codec;
pub mod engine;
pub mod field;
