use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CodecError;

/// One of the four DNA bases. Ordered alphabetically so comparisons are
/// deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Nucleotide {
    A,
    C,
    G,
    T,
}

impl Nucleotide {
    pub const ALL: [Nucleotide; 4] = [Nucleotide::A, Nucleotide::C, Nucleotide::G, Nucleotide::T];

    /// Position in the cyclic order A, C, G, T.
    #[inline]
    pub fn index(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn from_index(i: u8) -> Nucleotide {
        Self::ALL[(i & 3) as usize]
    }

    pub fn as_char(self) -> char {
        match self {
            Nucleotide::A => 'A',
            Nucleotide::C => 'C',
            Nucleotide::G => 'G',
            Nucleotide::T => 'T',
        }
    }

    pub fn from_char(c: char) -> Option<Nucleotide> {
        match c {
            'A' => Some(Nucleotide::A),
            'C' => Some(Nucleotide::C),
            'G' => Some(Nucleotide::G),
            'T' => Some(Nucleotide::T),
            _ => None,
        }
    }

    /// Adenine and guanine are the two-ring purines.
    pub fn is_purine(self) -> bool {
        matches!(self, Nucleotide::A | Nucleotide::G)
    }

    /// The base reached by a transition mutation (A<->G, C<->T).
    pub fn transition(self) -> Nucleotide {
        match self {
            Nucleotide::A => Nucleotide::G,
            Nucleotide::G => Nucleotide::A,
            Nucleotide::C => Nucleotide::T,
            Nucleotide::T => Nucleotide::C,
        }
    }

    /// The two bases reached by a transversion (purine <-> pyrimidine).
    pub fn transversions(self) -> [Nucleotide; 2] {
        if self.is_purine() {
            [Nucleotide::C, Nucleotide::T]
        } else {
            [Nucleotide::A, Nucleotide::G]
        }
    }
}

impl fmt::Display for Nucleotide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// An ordered run of bases.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NucleotideSequence(Vec<Nucleotide>);

impl NucleotideSequence {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        Self(Vec::with_capacity(n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, base: Nucleotide) {
        self.0.push(base);
    }

    pub fn extend_from_slice(&mut self, bases: &[Nucleotide]) {
        self.0.extend_from_slice(bases);
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    pub fn as_slice(&self) -> &[Nucleotide] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Nucleotide> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Nucleotide> {
        self.0
    }

    /// Index of the first base equal to its predecessor, if any.
    pub fn first_homopolymer(&self) -> Option<usize> {
        self.0.windows(2).position(|w| w[0] == w[1]).map(|i| i + 1)
    }
}

impl From<Vec<Nucleotide>> for NucleotideSequence {
    fn from(v: Vec<Nucleotide>) -> Self {
        Self(v)
    }
}

impl FromIterator<Nucleotide> for NucleotideSequence {
    fn from_iter<I: IntoIterator<Item = Nucleotide>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a NucleotideSequence {
    type Item = &'a Nucleotide;
    type IntoIter = std::slice::Iter<'a, Nucleotide>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl std::ops::Index<usize> for NucleotideSequence {
    type Output = Nucleotide;

    fn index(&self, i: usize) -> &Nucleotide {
        &self.0[i]
    }
}

impl fmt::Display for NucleotideSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|b| b.as_char()).collect();
        f.write_str(&s)
    }
}

impl FromStr for NucleotideSequence {
    type Err = CodecError;

    /// Parses uppercase `ACGT` text. Anything else is rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(position, c)| {
                Nucleotide::from_char(c).ok_or(CodecError::InvalidBase { position, found: c })
            })
            .collect()
    }
}
