use super::{byte_histogram, CodecError, HuffmanTable, Nucleotide, NucleotideSequence, Trit};

/// The base assumed to precede the first emitted base.
pub const ROTATION_SENTINEL: Nucleotide = Nucleotide::A;

/// Writes trits as bases that always differ from their predecessor.
///
/// Given the previous base P, trit t selects the t-th base of the cyclic
/// order A, C, G, T counted from the base after P, skipping P itself.
pub fn rotational_encode(trits: &[Trit], prev: Nucleotide) -> NucleotideSequence {
    let mut out = NucleotideSequence::with_capacity(trits.len());
    let mut prev = prev;
    for t in trits {
        let next = Nucleotide::from_index(prev.index() + 1 + t.value());
        out.push(next);
        prev = next;
    }
    out
}

/// Inverse of [`rotational_encode`]. A base equal to its predecessor cannot
/// have been produced by the code and is rejected.
pub fn rotational_decode(seq: &NucleotideSequence, prev: Nucleotide) -> Result<Vec<Trit>, CodecError> {
    let mut out = Vec::with_capacity(seq.len());
    let mut prev = prev;
    for (position, &base) in seq.iter().enumerate() {
        if base == prev {
            return Err(CodecError::InvalidSequence { position });
        }
        let t = (base.index() + 4 - prev.index() - 1) % 4;
        out.push(Trit::new(t)?);
        prev = base;
    }
    Ok(out)
}

/// Huffman-compresses `data` into trits using its own byte histogram, then
/// writes them with the rotational code.
pub fn encode_goldman(data: &[u8]) -> (HuffmanTable, NucleotideSequence) {
    let table = HuffmanTable::build(&byte_histogram(data));
    let trits = table.encode_trits(data);
    let seq = rotational_encode(&trits, ROTATION_SENTINEL);
    (table, seq)
}

pub fn decode_goldman(table: &HuffmanTable, seq: &NucleotideSequence) -> Result<Vec<u8>, CodecError> {
    let trits = rotational_decode(seq, ROTATION_SENTINEL)?;
    table.decode_trits(&trits)
}
