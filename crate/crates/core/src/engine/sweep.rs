use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_retrieval, EngineError, SimConfig};
use crate::codec::Encoding;

/// Grid of retrieval runs. An empty axis keeps the base config's value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepParams {
    pub retrievers: Vec<usize>,
    #[serde(rename = "D")]
    pub rotational_diffusion: Vec<f64>,
    pub encodings: Vec<Encoding>,
    pub repetitions: usize,
}

impl Default for SweepParams {
    /// The full campaign: 10..=150 retrievers in steps of 10, D from 5 to 32
    /// in steps of 3, both encodings, 10 repetitions.
    fn default() -> Self {
        Self {
            retrievers: (10..=150).step_by(10).collect(),
            rotational_diffusion: (0..10).map(|k| 5.0 + 3.0 * k as f64).collect(),
            encodings: vec![Encoding::Basic, Encoding::Goldman],
            repetitions: 10,
        }
    }
}

impl SweepParams {
    /// Corners and middle of the grid at low cost.
    pub fn desk_scale() -> Self {
        Self { retrievers: vec![10, 80, 150], rotational_diffusion: vec![5.0, 14.0], repetitions: 3, ..Self::default() }
    }

    /// A single point at the base config, repeated.
    pub fn single(repetitions: usize) -> Self {
        Self { retrievers: Vec::new(), rotational_diffusion: Vec::new(), encodings: Vec::new(), repetitions }
    }

    pub fn len(&self) -> usize {
        self.retrievers.len().max(1) * self.rotational_diffusion.len().max(1) * self.encodings.len().max(1) * self.repetitions
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Run configs in output order: retrievers, D, encoding, repetition.
    /// Repetition `r` uses seed `base.seed + r`, so encodings share seeds.
    pub fn configs(&self, base: &SimConfig) -> Vec<SimConfig> {
        fn axis<T: Copy>(values: &[T], base: T) -> Vec<T> {
            if values.is_empty() {
                vec![base]
            } else {
                values.to_vec()
            }
        }
        let mut out = Vec::with_capacity(self.len());
        for n in axis(&self.retrievers, base.n_retrievers_per_cluster) {
            for d in axis(&self.rotational_diffusion, base.motility.rotational_diffusion) {
                for encoding in axis(&self.encodings, base.encoding) {
                    for rep in 0..self.repetitions {
                        let mut c = base.clone();
                        c.n_retrievers_per_cluster = n;
                        c.motility.rotational_diffusion = d;
                        c.encoding = encoding;
                        c.seed = base.seed.wrapping_add(rep as u64);
                        out.push(c);
                    }
                }
            }
        }
        out
    }
}

/// Runs every grid point on the current rayon pool. Records come back in
/// [`SweepParams::configs`] order with `run_id` set to the position.
pub fn parameter_sweep(base: &SimConfig, sweep: &SweepParams) -> Result<Vec<crate::engine::MetricsRecord>, EngineError> {
    sweep
        .configs(base)
        .into_par_iter()
        .enumerate()
        .map(|(k, c)| {
            let mut r = run_retrieval(&c)?;
            r.run_id = k as u64;
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(SweepParams::default().len(), 3000);
        assert_eq!(SweepParams::default().rotational_diffusion.last(), Some(&32.0));
        assert_eq!(SweepParams::desk_scale().len(), 36);
    }

    #[test]
    fn storage_follows_retrievers() {
        let cfgs = SweepParams::desk_scale().configs(&SimConfig::default());
        assert_eq!(cfgs.len(), 36);
        assert!(cfgs.iter().all(|c| c.members_per_cluster() == c.n_retrievers_per_cluster));
        assert_eq!(cfgs[0].seed, 0);
        assert_eq!(cfgs[2].seed, 2);
        assert_eq!(cfgs[3].encoding, Encoding::Goldman);
        assert_eq!(cfgs[3].seed, 0);
    }

    #[test]
    fn empty_axes_follow_the_base() {
        let mut base = SimConfig { n_retrievers_per_cluster: 7, encoding: Encoding::Goldman, ..Default::default() };
        base.motility.rotational_diffusion = 11.0;
        let cfgs = SweepParams::single(2).configs(&base);
        assert_eq!(cfgs.len(), 2);
        assert_eq!(SweepParams::single(2).len(), 2);
        assert!(cfgs.iter().all(|c| c.n_retrievers_per_cluster == 7
            && c.encoding == Encoding::Goldman
            && c.motility.rotational_diffusion == 11.0));
    }
}
