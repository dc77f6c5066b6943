//! Synthesis and sequencing error model used by robustness tests.

use rand::Rng;

use super::{Nucleotide, NucleotideSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubstitutionKind {
    /// Any of the three other bases, uniformly.
    #[default]
    Any,
    TransitionOnly,
    TransversionOnly,
}

/// Independent per-position probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MutationRates {
    pub insertion: f64,
    pub deletion: f64,
    pub substitution: f64,
    pub substitution_kind: SubstitutionKind,
}

impl MutationRates {
    pub fn uniform(rate: f64) -> Self {
        Self { insertion: rate, deletion: rate, substitution: rate, substitution_kind: SubstitutionKind::Any }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// `base` inserted after original position `after`.
    Insertion { after: usize, base: Nucleotide },
    Deletion { position: usize, base: Nucleotide },
    Substitution { position: usize, from: Nucleotide, to: Nucleotide, transition: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutated {
    pub sequence: NucleotideSequence,
    pub events: Vec<Mutation>,
}

/// Applies random insertions, deletions and substitutions.
///
/// Each original position is deleted with probability `deletion`; a surviving
/// base is substituted with probability `substitution`; then a random base is
/// inserted after it with probability `insertion`.
pub fn inject_errors<R: Rng + ?Sized>(seq: &NucleotideSequence, rates: &MutationRates, rng: &mut R) -> Mutated {
    for (name, r) in [("insertion", rates.insertion), ("deletion", rates.deletion), ("substitution", rates.substitution)] {
        assert!((0.0..=1.0).contains(&r), "{name} rate {r} outside [0, 1]");
    }
    let mut out = NucleotideSequence::with_capacity(seq.len());
    let mut events = Vec::new();
    for (position, &base) in seq.iter().enumerate() {
        if rates.deletion > 0.0 && rng.random_bool(rates.deletion) {
            events.push(Mutation::Deletion { position, base });
        } else {
            let mut kept = base;
            if rates.substitution > 0.0 && rng.random_bool(rates.substitution) {
                let to = match rates.substitution_kind {
                    SubstitutionKind::TransitionOnly => base.transition(),
                    SubstitutionKind::TransversionOnly => base.transversions()[rng.random_range(0..2)],
                    SubstitutionKind::Any => {
                        let k = rng.random_range(1..4u8);
                        Nucleotide::from_index(base.index() + k)
                    }
                };
                events.push(Mutation::Substitution {
                    position,
                    from: base,
                    to,
                    transition: to == base.transition(),
                });
                kept = to;
            }
            out.push(kept);
        }
        if rates.insertion > 0.0 && rng.random_bool(rates.insertion) {
            let inserted = Nucleotide::from_index(rng.random_range(0..4u8));
            events.push(Mutation::Insertion { after: position, base: inserted });
            out.push(inserted);
        }
    }
    Mutated { sequence: out, events }
}
