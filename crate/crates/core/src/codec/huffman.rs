use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CodecError;

/// A base-3 digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trit(u8);

impl Trit {
    pub const ZERO: Trit = Trit(0);
    pub const ONE: Trit = Trit(1);
    pub const TWO: Trit = Trit(2);

    pub fn new(v: u8) -> Result<Trit, CodecError> {
        if v < 3 {
            Ok(Trit(v))
        } else {
            Err(CodecError::InvalidTrit(v))
        }
    }

    #[inline]
    pub fn value(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for Trit {
    type Error = CodecError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Trit::new(v)
    }
}

impl fmt::Display for Trit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Counts of every byte value in `data`.
pub fn byte_histogram(data: &[u8]) -> [u64; 256] {
    let mut h = [0u64; 256];
    for &b in data {
        h[b as usize] += 1;
    }
    h
}

const NO_CHILD: u32 = u32::MAX;
const LEAF_FLAG: u32 = 1 << 31;

/// Ternary prefix code over all 256 byte values.
///
/// Every byte gets a codeword, including bytes that never occur in the
/// histogram, so any byte stream can be encoded with any table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanTable {
    codes: Vec<Vec<Trit>>,
    // Decoding trie: each node holds three slots that are either a child node,
    // a leaf (`LEAF_FLAG | byte`) or `NO_CHILD`.
    trie: Vec<[u32; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct HeapKey {
    weight: u64,
    // Smallest byte value in the subtree; dummies sort after every byte.
    min_symbol: u32,
    created: u32,
}

impl HuffmanTable {
    /// Builds a ternary Huffman code from byte frequencies.
    ///
    /// The symbol set is padded with zero-weight dummies so that three-way
    /// merges end in a single root. Lowest weights merge first; ties go to the
    /// subtree holding the smaller byte value, then to the older node. Within
    /// a merge the first popped child takes trit 0.
    pub fn build(histogram: &[u64; 256]) -> HuffmanTable {
        let mut leaves = 256usize;
        while !(leaves - 1).is_multiple_of(2) {
            leaves += 1;
        }

        // node -> children, or None for a leaf
        let mut children: Vec<Option<[usize; 3]>> = Vec::with_capacity(leaves * 2);
        let mut heap = BinaryHeap::with_capacity(leaves);
        for sym in 0..leaves {
            let weight = if sym < 256 { histogram[sym] } else { 0 };
            children.push(None);
            heap.push(Reverse((
                HeapKey { weight, min_symbol: sym as u32, created: sym as u32 },
                sym,
            )));
        }

        while heap.len() > 1 {
            let mut picked = [(HeapKey { weight: 0, min_symbol: 0, created: 0 }, 0usize); 3];
            for slot in picked.iter_mut() {
                let Reverse(entry) = heap.pop().expect("odd leaf count keeps triples full");
                *slot = entry;
            }
            let id = children.len();
            children.push(Some([picked[0].1, picked[1].1, picked[2].1]));
            let key = HeapKey {
                weight: picked.iter().map(|(k, _)| k.weight).sum(),
                min_symbol: picked.iter().map(|(k, _)| k.min_symbol).min().unwrap(),
                created: id as u32,
            };
            heap.push(Reverse((key, id)));
        }
        let Reverse((_, root)) = heap.pop().unwrap();

        let mut codes = vec![Vec::new(); 256];
        let mut stack = vec![(root, Vec::<Trit>::new())];
        while let Some((node, prefix)) = stack.pop() {
            match children[node] {
                Some(kids) => {
                    for (t, &kid) in kids.iter().enumerate() {
                        let mut code = prefix.clone();
                        code.push(Trit(t as u8));
                        stack.push((kid, code));
                    }
                }
                None if node < 256 => codes[node] = prefix,
                None => {}
            }
        }

        Self::from_codes(codes).expect("Huffman construction yields a prefix-free code")
    }

    /// Builds a table from explicit codewords, checking they form a prefix-free
    /// code over all 256 bytes.
    pub fn from_codes(codes: Vec<Vec<Trit>>) -> Result<HuffmanTable, CodecError> {
        if codes.len() != 256 {
            return Err(CodecError::BadTable(format!("expected 256 codewords, got {}", codes.len())));
        }
        let mut trie: Vec<[u32; 3]> = vec![[NO_CHILD; 3]];
        for (byte, code) in codes.iter().enumerate() {
            let Some((last, head)) = code.split_last() else {
                return Err(CodecError::BadTable(format!("byte {byte} has an empty codeword")));
            };
            let mut node = 0usize;
            for t in head {
                let slot = trie[node][t.0 as usize];
                if slot == NO_CHILD {
                    trie.push([NO_CHILD; 3]);
                    let id = (trie.len() - 1) as u32;
                    trie[node][t.0 as usize] = id;
                    node = id as usize;
                } else if slot & LEAF_FLAG != 0 {
                    return Err(prefix_clash(slot, byte));
                } else {
                    node = slot as usize;
                }
            }
            let slot = &mut trie[node][last.0 as usize];
            if *slot != NO_CHILD {
                return Err(if *slot & LEAF_FLAG != 0 {
                    prefix_clash(*slot, byte)
                } else {
                    CodecError::BadTable(format!("codeword of byte {byte} is a prefix of another"))
                });
            }
            *slot = LEAF_FLAG | byte as u32;
        }
        Ok(HuffmanTable { codes, trie })
    }

    pub fn codeword(&self, byte: u8) -> &[Trit] {
        &self.codes[byte as usize]
    }

    pub fn codewords(&self) -> &[Vec<Trit>] {
        &self.codes
    }

    pub fn max_len(&self) -> usize {
        self.codes.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Σ 3^(-len) over all codewords.
    pub fn kraft_sum(&self) -> f64 {
        self.codes.iter().map(|c| 3f64.powi(-(c.len() as i32))).sum()
    }

    pub fn encode_trits(&self, data: &[u8]) -> Vec<Trit> {
        let mut out = Vec::with_capacity(data.len() * 6);
        for &b in data {
            out.extend_from_slice(&self.codes[b as usize]);
        }
        out
    }

    /// Decodes complete codewords. A trailing incomplete codeword is dropped
    /// as long as it is shorter than the longest codeword.
    pub fn decode_trits(&self, trits: &[Trit]) -> Result<Vec<u8>, CodecError> {
        let mut out = Vec::with_capacity(trits.len() / 5 + 1);
        let mut node = 0usize;
        let mut pending = 0usize;
        for (i, t) in trits.iter().enumerate() {
            let slot = self.trie[node][t.0 as usize];
            if slot == NO_CHILD {
                return Err(CodecError::UnassignedCodeword { position: i });
            }
            if slot & LEAF_FLAG != 0 {
                out.push((slot & 0xff) as u8);
                node = 0;
                pending = 0;
            } else {
                node = slot as usize;
                pending += 1;
            }
        }
        if pending > 0 && pending >= self.max_len() {
            return Err(CodecError::DanglingCodeword { trits: pending });
        }
        Ok(out)
    }

    /// Codewords rendered as digit strings, indexed by byte value.
    pub fn to_strings(&self) -> Vec<String> {
        self.codes
            .iter()
            .map(|c| c.iter().map(|t| char::from(b'0' + t.0)).collect())
            .collect()
    }

    pub fn from_strings<S: AsRef<str>>(words: &[S]) -> Result<HuffmanTable, CodecError> {
        let codes = words
            .iter()
            .map(|w| {
                w.as_ref()
                    .bytes()
                    .map(|c| match c {
                        b'0'..=b'2' => Ok(Trit(c - b'0')),
                        _ => Err(CodecError::BadTable(format!("bad trit character {:?}", c as char))),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_codes(codes)
    }
}

fn prefix_clash(slot: u32, byte: usize) -> CodecError {
    CodecError::BadTable(format!(
        "codeword of byte {} is a prefix of the codeword of byte {byte}",
        slot & 0xff
    ))
}

impl Serialize for HuffmanTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HuffmanTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let words = Vec::<String>::deserialize(d)?;
        HuffmanTable::from_strings(&words).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent checks: brute-force pairwise prefix scan and Kraft sum.
    fn assert_prefix_free(table: &HuffmanTable) {
        let codes = table.codewords();
        for (i, a) in codes.iter().enumerate() {
            for (j, b) in codes.iter().enumerate() {
                if i != j {
                    assert!(!b.starts_with(a), "codeword {i} is a prefix of {j}");
                }
            }
        }
    }

    fn kraft(lengths: impl Iterator<Item = usize>) -> f64 {
        lengths.map(|l| 1.0 / 3f64.powi(l as i32)).sum()
    }

    #[test]
    fn uniform_histogram_uses_five_and_six_trits() {
        let table = HuffmanTable::build(&[7u64; 256]);
        assert_prefix_free(&table);
        let lens: Vec<usize> = table.codewords().iter().map(Vec::len).collect();
        assert!(lens.iter().all(|&l| l == 5 || l == 6), "{lens:?}");
        let k = kraft(lens.iter().copied());
        assert!(k <= 1.0 + 1e-12, "kraft {k}");
        // 3^5 = 243 five-trit words cannot cover 256 symbols alone.
        assert!(lens.iter().filter(|&&l| l == 6).count() > 0);
    }

    #[test]
    fn dominant_byte_gets_strictly_shortest_code() {
        let mut hist = [1u64; 256];
        hist[b'e' as usize] = 1_000_000;
        let table = HuffmanTable::build(&hist);
        assert_prefix_free(&table);
        let dominant = table.codeword(b'e').len();
        for b in 0..=255u8 {
            if b != b'e' {
                assert!(table.codeword(b).len() > dominant);
            }
        }
    }

    #[test]
    fn scaling_the_histogram_changes_nothing() {
        let mut hist = [0u64; 256];
        for (i, h) in hist.iter_mut().enumerate() {
            *h = (i as u64 * 37) % 11;
        }
        let scaled = hist.map(|h| h * 13);
        assert_eq!(HuffmanTable::build(&hist), HuffmanTable::build(&scaled));
    }

    #[test]
    fn empty_histogram_still_codes_every_byte() {
        let table = HuffmanTable::build(&[0; 256]);
        assert_prefix_free(&table);
        assert!(table.codewords().iter().all(|c| !c.is_empty()));
    }

    #[test]
    fn string_form_round_trips() {
        let table = HuffmanTable::build(&byte_histogram(b"abracadabra"));
        let again = HuffmanTable::from_strings(&table.to_strings()).unwrap();
        assert_eq!(table, again);
    }

    #[test]
    fn prefix_violation_is_rejected() {
        let mut words: Vec<String> = HuffmanTable::build(&[1; 256]).to_strings();
        let short = words[0][..words[0].len() - 1].to_string();
        words[1] = short;
        assert!(matches!(HuffmanTable::from_strings(&words), Err(CodecError::BadTable(_))));
    }

    #[test]
    fn dangling_tail_tolerance() {
        let table = HuffmanTable::build(&[1; 256]);
        let mut trits = table.encode_trits(b"ok");
        trits.extend_from_slice(&table.codeword(b'!')[..2]);
        assert_eq!(table.decode_trits(&trits).unwrap(), b"ok");
    }

    #[test]
    fn trit_range_checked() {
        assert!(Trit::new(2).is_ok());
        assert_eq!(Trit::new(3), Err(CodecError::InvalidTrit(3)));
    }

    proptest! {
        #[test]
        fn monotone_in_frequency(hist in proptest::array::uniform32(0u64..1000)) {
            // Spread 32 sampled weights over all 256 bytes.
            let mut full = [0u64; 256];
            for (i, h) in full.iter_mut().enumerate() {
                *h = hist[i % 32] + (i as u64 % 3);
            }
            let table = HuffmanTable::build(&full);
            prop_assert!(table.kraft_sum() <= 1.0 + 1e-12);
            for a in 0..256 {
                for b in 0..256 {
                    if full[a] > full[b] {
                        prop_assert!(table.codeword(a as u8).len() <= table.codeword(b as u8).len());
                    }
                }
            }
        }
    }
}
