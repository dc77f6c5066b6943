use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CodecError, Nucleotide, NucleotideSequence};

pub const PADDING_BASE: Nucleotide = Nucleotide::A;

/// One fixed-length chunk of an encoded file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plasmid {
    pub file_id: String,
    pub index: usize,
    pub total: usize,
    #[serde(with = "seq_text")]
    pub bases: NucleotideSequence,
}

/// Cuts `seq` into `ceil(len / plasmid_len)` plasmids, padding the last one
/// with [`PADDING_BASE`].
pub fn packetize(seq: &NucleotideSequence, file_id: &str, plasmid_len: usize) -> Vec<Plasmid> {
    assert!(plasmid_len > 0, "plasmid length must be positive");
    let chunks = seq.as_slice().chunks(plasmid_len);
    let total = chunks.len();
    chunks
        .enumerate()
        .map(|(index, chunk)| {
            let mut bases = NucleotideSequence::with_capacity(plasmid_len);
            bases.extend_from_slice(chunk);
            while bases.len() < plasmid_len {
                bases.push(PADDING_BASE);
            }
            Plasmid { file_id: file_id.to_string(), index, total, bases }
        })
        .collect()
}

/// Joins plasmids in index order and strips the padding.
///
/// Input order does not matter and duplicate indices are tolerated (the first
/// copy wins). Every index below the advertised total must be present.
pub fn reassemble(plasmids: &[Plasmid], seq_len: usize) -> Result<NucleotideSequence, CodecError> {
    let Some(first) = plasmids.first() else {
        return if seq_len == 0 {
            Ok(NucleotideSequence::new())
        } else {
            Err(CodecError::MissingPlasmid(vec![0]))
        };
    };
    let total = first.total;
    let mut by_index: BTreeMap<usize, &Plasmid> = BTreeMap::new();
    for p in plasmids {
        if p.total != total {
            return Err(CodecError::InconsistentPlasmid {
                index: p.index,
                reason: format!("total {} != {}", p.total, total),
            });
        }
        if p.index >= total {
            return Err(CodecError::InconsistentPlasmid {
                index: p.index,
                reason: format!("index beyond total {total}"),
            });
        }
        by_index.entry(p.index).or_insert(p);
    }
    let missing: Vec<usize> = (0..total).filter(|i| !by_index.contains_key(i)).collect();
    if !missing.is_empty() {
        return Err(CodecError::MissingPlasmid(missing));
    }
    let mut seq = NucleotideSequence::with_capacity(total * first.bases.len());
    for p in by_index.values() {
        seq.extend_from_slice(p.bases.as_slice());
    }
    if seq.len() < seq_len {
        return Err(CodecError::InconsistentPlasmid {
            index: total.saturating_sub(1),
            reason: format!("plasmids hold {} bases, expected at least {seq_len}", seq.len()),
        });
    }
    seq.truncate(seq_len);
    Ok(seq)
}

pub(crate) mod seq_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::NucleotideSequence;

    pub fn serialize<S: Serializer>(seq: &NucleotideSequence, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(seq)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NucleotideSequence, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq_of(len: usize) -> NucleotideSequence {
        (0..len).map(|i| Nucleotide::from_index((i * 7 % 5) as u8)).collect()
    }

    #[test]
    fn counts() {
        assert_eq!(packetize(&seq_of(73_600), "f", 200).len(), 368);
        let one = packetize(&seq_of(10), "f", 200);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].bases.len(), 200);
        assert!(one[0].bases.as_slice()[10..].iter().all(|&b| b == PADDING_BASE));
        assert!(packetize(&NucleotideSequence::new(), "f", 200).is_empty());
    }

    #[test]
    fn missing_index_reported() {
        let mut ps = packetize(&seq_of(5 * 20), "f", 20);
        ps.remove(3);
        assert_eq!(reassemble(&ps, 100), Err(CodecError::MissingPlasmid(vec![3])));
    }

    #[test]
    fn shuffled_order_is_irrelevant() {
        let seq = seq_of(1234);
        let ps = packetize(&seq, "f", 50);
        let mut rev = ps.clone();
        rev.reverse();
        rev.swap(0, 7);
        assert_eq!(reassemble(&rev, seq.len()).unwrap(), reassemble(&ps, seq.len()).unwrap());
    }

    #[test]
    fn boundary_lengths() {
        let l = 16;
        for len in [0, 1, l - 1, l, l + 1] {
            let seq = seq_of(len);
            let ps = packetize(&seq, "f", l);
            assert_eq!(ps.len(), len.div_ceil(l));
            for (i, p) in ps.iter().enumerate() {
                assert_eq!(p.index, i);
                assert_eq!(p.total, ps.len());
                assert_eq!(p.bases.len(), l);
            }
            assert_eq!(reassemble(&ps, len).unwrap(), seq);
        }
    }

    proptest! {
        #[test]
        fn packetize_reassemble_identity(len in 0usize..3000, l in 1usize..300, rot in 0usize..64) {
            let seq = seq_of(len);
            let mut ps = packetize(&seq, "f", l);
            if !ps.is_empty() {
                let k = rot % ps.len();
                ps.rotate_left(k);
            }
            prop_assert_eq!(reassemble(&ps, len).unwrap(), seq);
        }
    }
}
