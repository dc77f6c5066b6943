//! Digital data to nucleotide conversion.
//!
//! Two encodings are provided. The basic encoding maps every 2-bit pair of
//! the input to one base (4 bases per byte). The Goldman-style encoding first
//! compresses bytes into ternary Huffman codewords and then writes the trits
//! with a rotational code that never repeats the previous base, so the output
//! is free of homopolymers. Encoded sequences are cut into fixed-length
//! plasmids for storage.

mod basic;
mod file;
mod goldman;
mod huffman;
mod mutation;
mod nucleotide;
mod plasmid;

pub use basic::{decode_basic, encode_basic, BIT_BASE_MAP};
pub use file::{parse_plasmid_fasta, Encoding, EncodedFile, Manifest, DEFAULT_PLASMID_LEN};
pub use goldman::{decode_goldman, encode_goldman, rotational_decode, rotational_encode, ROTATION_SENTINEL};
pub use huffman::{byte_histogram, HuffmanTable, Trit};
pub use mutation::{inject_errors, Mutated, Mutation, MutationRates, SubstitutionKind};
pub use nucleotide::{Nucleotide, NucleotideSequence};
pub use plasmid::{packetize, reassemble, Plasmid, PADDING_BASE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("sequence length {0} is not a multiple of four")]
    LengthNotMultipleOfFour(usize),
    #[error("invalid base {found:?} at position {position}")]
    InvalidBase { position: usize, found: char },
    #[error("homopolymer at position {position}: base repeats its predecessor")]
    InvalidSequence { position: usize },
    #[error("{trits} trailing trits do not form a codeword")]
    DanglingCodeword { trits: usize },
    #[error("trit string ending at position {position} is not an assigned codeword")]
    UnassignedCodeword { position: usize },
    #[error("trit value {0} out of range")]
    InvalidTrit(u8),
    #[error("missing plasmid indices {0:?}")]
    MissingPlasmid(Vec<usize>),
    #[error("plasmid {index} disagrees with the file ({reason})")]
    InconsistentPlasmid { index: usize, reason: String },
    #[error("malformed Huffman table: {0}")]
    BadTable(String),
    #[error("manifest: {0}")]
    Manifest(String),
}
