use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    decode_basic, decode_goldman, encode_basic, encode_goldman, packetize, reassemble, CodecError,
    HuffmanTable, NucleotideSequence, Plasmid, BIT_BASE_MAP,
};

pub const DEFAULT_PLASMID_LEN: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    Basic,
    Goldman,
}

impl Encoding {
    pub fn as_str(self) -> &'static str {
        match self {
            Encoding::Basic => "basic",
            Encoding::Goldman => "goldman",
        }
    }

    pub fn encode(self, data: &[u8]) -> (Option<HuffmanTable>, NucleotideSequence) {
        match self {
            Encoding::Basic => (None, encode_basic(data)),
            Encoding::Goldman => {
                let (table, seq) = encode_goldman(data);
                (Some(table), seq)
            }
        }
    }
}

impl std::fmt::Display for Encoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(Encoding::Basic),
            "goldman" => Ok(Encoding::Goldman),
            other => Err(format!("unknown encoding {other:?} (expected basic or goldman)")),
        }
    }
}

/// A byte payload encoded and cut into plasmids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedFile {
    pub file_id: String,
    pub encoding: Encoding,
    pub huffman: Option<HuffmanTable>,
    pub payload_len_bytes: usize,
    /// Base count before the last plasmid was padded.
    pub sequence_len_bases: usize,
    pub plasmid_len: usize,
    pub plasmids: Vec<Plasmid>,
}

/// Self-describing header of an encoded file. Plasmid bases travel separately
/// in FASTA-style text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub encoding: Encoding,
    pub file_id: String,
    pub payload_len_bytes: usize,
    pub sequence_len_bases: usize,
    pub plasmid_len: usize,
    pub total_plasmids: usize,
    pub bit_base_map: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub huffman_codewords: Option<Vec<String>>,
    /// Path of the plasmid sequence file, relative to the manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plasmid_file: Option<String>,
}

impl EncodedFile {
    pub fn encode(data: &[u8], encoding: Encoding, file_id: &str, plasmid_len: usize) -> EncodedFile {
        let (huffman, seq) = encoding.encode(data);
        EncodedFile {
            file_id: file_id.to_string(),
            encoding,
            huffman,
            payload_len_bytes: data.len(),
            sequence_len_bases: seq.len(),
            plasmid_len,
            plasmids: packetize(&seq, file_id, plasmid_len),
        }
    }

    pub fn total_plasmids(&self) -> usize {
        self.plasmids.len()
    }

    pub fn sequence(&self) -> Result<NucleotideSequence, CodecError> {
        reassemble(&self.plasmids, self.sequence_len_bases)
    }

    pub fn decode(&self) -> Result<Vec<u8>, CodecError> {
        let seq = self.sequence()?;
        let data = match self.encoding {
            Encoding::Basic => decode_basic(&seq)?,
            Encoding::Goldman => {
                let table = self
                    .huffman
                    .as_ref()
                    .ok_or_else(|| CodecError::Manifest("Goldman file without Huffman table".into()))?;
                decode_goldman(table, &seq)?
            }
        };
        if data.len() != self.payload_len_bytes {
            return Err(CodecError::Manifest(format!(
                "decoded {} bytes, manifest says {}",
                data.len(),
                self.payload_len_bytes
            )));
        }
        Ok(data)
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            encoding: self.encoding,
            file_id: self.file_id.clone(),
            payload_len_bytes: self.payload_len_bytes,
            sequence_len_bases: self.sequence_len_bases,
            plasmid_len: self.plasmid_len,
            total_plasmids: self.plasmids.len(),
            bit_base_map: BIT_BASE_MAP.to_string(),
            huffman_codewords: self.huffman.as_ref().map(HuffmanTable::to_strings),
            plasmid_file: None,
        }
    }

    /// Rebuilds a file from its manifest and whatever plasmids were recovered.
    /// Missing plasmids surface when decoding.
    pub fn from_manifest(manifest: &Manifest, plasmids: Vec<Plasmid>) -> Result<EncodedFile, CodecError> {
        if manifest.bit_base_map != BIT_BASE_MAP {
            return Err(CodecError::Manifest(format!(
                "unsupported bit_base_map {:?}",
                manifest.bit_base_map
            )));
        }
        let huffman = match (&manifest.encoding, &manifest.huffman_codewords) {
            (Encoding::Goldman, Some(words)) => Some(HuffmanTable::from_strings(words)?),
            (Encoding::Goldman, None) => {
                return Err(CodecError::Manifest("Goldman manifest lacks huffman_codewords".into()))
            }
            (Encoding::Basic, _) => None,
        };
        for p in &plasmids {
            if p.total != manifest.total_plasmids {
                return Err(CodecError::InconsistentPlasmid {
                    index: p.index,
                    reason: format!("total {} != manifest {}", p.total, manifest.total_plasmids),
                });
            }
            if p.bases.len() != manifest.plasmid_len {
                return Err(CodecError::InconsistentPlasmid {
                    index: p.index,
                    reason: format!("length {} != {}", p.bases.len(), manifest.plasmid_len),
                });
            }
        }
        if manifest.total_plasmids > 0 && plasmids.is_empty() {
            return Err(CodecError::MissingPlasmid((0..manifest.total_plasmids).collect()));
        }
        Ok(EncodedFile {
            file_id: manifest.file_id.clone(),
            encoding: manifest.encoding,
            huffman,
            payload_len_bytes: manifest.payload_len_bytes,
            sequence_len_bases: manifest.sequence_len_bases,
            plasmid_len: manifest.plasmid_len,
            plasmids,
        })
    }

    /// One `>file_id index/total` header and one uppercase sequence line per
    /// plasmid.
    pub fn plasmids_to_fasta(&self) -> String {
        let mut out = String::with_capacity(self.plasmids.len() * (self.plasmid_len + 32));
        for p in &self.plasmids {
            let _ = writeln!(out, ">{} {}/{}", p.file_id, p.index, p.total);
            let _ = writeln!(out, "{}", p.bases);
        }
        out
    }
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest is plain data")
    }

    pub fn from_toml(text: &str) -> Result<Manifest, CodecError> {
        toml::from_str(text).map_err(|e| CodecError::Manifest(e.to_string()))
    }
}

/// Parses the FASTA-style plasmid listing written by
/// [`EncodedFile::plasmids_to_fasta`].
pub fn parse_plasmid_fasta(text: &str) -> Result<Vec<Plasmid>, CodecError> {
    let mut out = Vec::new();
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    while let Some(header) = lines.next() {
        let header = header
            .strip_prefix('>')
            .ok_or_else(|| CodecError::Manifest(format!("expected a '>' header, got {header:?}")))?;
        let (file_id, counter) = header
            .trim_end()
            .rsplit_once(' ')
            .ok_or_else(|| CodecError::Manifest(format!("malformed header {header:?}")))?;
        let (index, total) = counter
            .split_once('/')
            .and_then(|(i, t)| Some((i.parse().ok()?, t.parse().ok()?)))
            .ok_or_else(|| CodecError::Manifest(format!("malformed counter {counter:?}")))?;
        let bases = lines
            .next()
            .ok_or_else(|| CodecError::Manifest(format!("header {header:?} has no sequence")))?
            .trim()
            .parse()?;
        out.push(Plasmid { file_id: file_id.to_string(), index, total, bases });
    }
    Ok(out)
}
