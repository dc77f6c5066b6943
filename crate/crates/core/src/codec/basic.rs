use super::{CodecError, Nucleotide, NucleotideSequence};

/// The fixed bit-pair to base mapping, most significant pair first.
pub const BIT_BASE_MAP: &str = "00=A,01=C,10=G,11=T";

/// Maps each byte to four bases, two bits per base, high bits first.
pub fn encode_basic(data: &[u8]) -> NucleotideSequence {
    let mut out = NucleotideSequence::with_capacity(data.len() * 4);
    for &byte in data {
        for shift in [6u8, 4, 2, 0] {
            out.push(Nucleotide::from_index((byte >> shift) & 0b11));
        }
    }
    out
}

pub fn decode_basic(seq: &NucleotideSequence) -> Result<Vec<u8>, CodecError> {
    if !seq.len().is_multiple_of(4) {
        return Err(CodecError::LengthNotMultipleOfFour(seq.len()));
    }
    Ok(seq
        .as_slice()
        .chunks_exact(4)
        .map(|quad| quad.iter().fold(0u8, |acc, b| (acc << 2) | b.index()))
        .collect())
}
