use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::metrics::{join, MetricsRecord, TrajectoryRow};
use super::{stream, Domain, EngineError, Placement, SimConfig, SuccessModel};
use crate::agent::{BacteriumState, Chemotaxis, Mode};
use crate::archive::{store, store_by_priority, ArchiveLayout, Cluster, LayoutMode};
use crate::codec::EncodedFile;
use crate::field::{targets_for, BeaconTriad};

/// Result of one retrieval run.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalOutcome {
    /// Tick at which the last missing plasmid arrived, or the time limit.
    pub completion_time_s: f64,
    pub total_plasmids: usize,
    pub delivered: BTreeSet<usize>,
    pub pct_retrieved: f64,
    pub per_cluster_conjugations: Vec<usize>,
    /// Fraction of each cluster's plasmids that reached C; 1 for an empty
    /// cluster.
    pub per_cluster_retrieved: Vec<f64>,
    /// Highest simultaneous conjugation count seen per cluster.
    pub peak_concurrency: Vec<usize>,
    /// Successful conjugations per retriever.
    pub conjugations_per_retriever: Vec<u32>,
    /// Delivered-set size after each tick.
    pub delivered_history: Vec<usize>,
}

/// Decides one conjugation attempt.
pub fn try_conjugation<R: Rng + ?Sized>(model: SuccessModel, threshold: f64, rng: &mut R) -> bool {
    match model {
        SuccessModel::NormalThreshold => rng.sample::<f64, _>(StandardNormal) > threshold,
        SuccessModel::Probability => rng.random::<f64>() < threshold,
    }
}

/// The seeded payload of a run, encoded per the config.
pub fn payload_for(config: &SimConfig) -> EncodedFile {
    let mut rng = stream(config.seed, Domain::Payload, 0);
    let mut bytes = vec![0u8; config.payload.bytes];
    rng.fill(&mut bytes[..]);
    EncodedFile::encode(&bytes, config.encoding, "payload", config.payload.plasmid_len)
}

/// Runs the configured retrieval experiment and summarises it.
pub fn run_retrieval(config: &SimConfig) -> Result<MetricsRecord, EngineError> {
    let file = payload_for(config);
    let outcome = simulate_retrieval(config, &file, None)?;
    let mut r = MetricsRecord::blank(
        0,
        config.seed,
        "retrieval",
        config.n_retrievers_per_cluster,
        config.motility.rotational_diffusion,
    );
    r.encoding = Some(config.encoding.to_string());
    r.layout = Some(layout_label(config.layout.mode).to_string());
    r.total_plasmids = Some(outcome.total_plasmids);
    r.completion_time_s = Some(outcome.completion_time_s);
    r.pct_retrieved = Some(outcome.pct_retrieved);
    r.per_cluster_conjugations = Some(join(&outcome.per_cluster_conjugations));
    r.per_cluster_retrieved = Some(join(&outcome.per_cluster_retrieved));
    Ok(r)
}

pub(crate) fn layout_label(mode: LayoutMode) -> &'static str {
    match mode {
        LayoutMode::AllInside => "all-inside",
        LayoutMode::TwoOutside => "two-outside",
    }
}

struct Retriever {
    state: BacteriumState,
    cluster: usize,
    donor: Option<usize>,
    delivered: bool,
    conjugations: u32,
    motion: ChaCha8Rng,
    events: ChaCha8Rng,
}

/// Stores `file` in a fresh archive and releases the retrievers.
///
/// Each cluster gets `n_retrievers_per_cluster` retrievers addressed to its
/// centre. Between event ticks every active retriever swims; at a tick,
/// retrievers are handled in ascending id: a finished conjugation frees its
/// donor, a retriever near its cluster may conjugate, and a loaded retriever
/// near C delivers and stops.
pub fn simulate_retrieval(
    config: &SimConfig,
    file: &EncodedFile,
    mut trajectory: Option<&mut Vec<TrajectoryRow>>,
) -> Result<RetrievalOutcome, EngineError> {
    let layout = config.validate()?;
    let chem = Chemotaxis::new(config.motility).map_err(|e| EngineError::ConfigInvalid {
        field: "motility".into(),
        message: e.0,
    })?;
    let mut clusters = build_archive(config, file, &layout)?;
    let total = file.total_plasmids();
    let homing = targets_for(&layout.destination_triad, layout.point_c);
    let start = config.start.unwrap_or(layout.point_a);

    let mut retrievers: Vec<Retriever> = Vec::new();
    for (c, cluster) in clusters.iter().enumerate() {
        let targets = targets_for(&layout.storage_triad, cluster.site.centre);
        for _ in 0..config.n_retrievers_per_cluster {
            let id = retrievers.len() as u32;
            let mut motion = stream(config.seed, Domain::Motion, id as u64);
            let heading = motion.random::<f64>() * std::f64::consts::TAU;
            let mut state = BacteriumState::new(id, start, heading, targets);
            state.mode = chem.update_mode(&state, &layout.storage_triad);
            retrievers.push(Retriever {
                state,
                cluster: c,
                donor: None,
                delivered: false,
                conjugations: 0,
                motion,
                events: stream(config.seed, Domain::Events, id as u64),
            });
        }
    }
    let mut checkout_rngs: Vec<ChaCha8Rng> =
        (0..clusters.len()).map(|c| stream(config.seed, Domain::Checkout, c as u64)).collect();

    let steps = config.steps_per_event();
    let mut delivered = BTreeSet::new();
    let mut per_cluster_conjugations = vec![0usize; clusters.len()];
    let mut peak = vec![0usize; clusters.len()];
    let mut history = Vec::new();
    let mut completion = if total == 0 { Some(0.0) } else { None };
    let mut tick: u64 = 0;

    while completion.is_none() {
        let next = (tick + 1) as f64 * config.event_dt_s;
        if next >= config.time_limit_s {
            break;
        }
        tick += 1;
        let t = next;
        retrievers.par_iter_mut().filter(|r| !r.delivered).for_each(|r| {
            let triad = if r.state.should_conjugate { &layout.storage_triad } else { &layout.destination_triad };
            advance(&chem, r, triad, steps);
        });

        for r in retrievers.iter_mut().filter(|r| !r.delivered) {
            let cluster = &mut clusters[r.cluster];
            let frozen = matches!(r.state.mode, Mode::Conjugating { .. });
            if !frozen {
                if let Some(m) = r.donor.take() {
                    cluster.release(m);
                }
            }
            if r.state.should_conjugate
                && r.state.position.distance(cluster.site.centre) < config.conjugation_threshold_cm
                && try_conjugation(config.success_model, config.conjugation_success_threshold, &mut r.events)
            {
                if let Some(m) = cluster.checkout_conjugation(&mut checkout_rngs[r.cluster]) {
                    peak[r.cluster] = peak[r.cluster].max(cluster.concurrent_conjugations);
                    per_cluster_conjugations[r.cluster] += 1;
                    r.conjugations += 1;
                    r.state.cargo = cluster.members[m].held.clone();
                    r.state.should_conjugate = false;
                    r.state.mode = Mode::conjugating(config.conjugation_time_s, config.motility.dt);
                    if r.state.mode == (Mode::Conjugating { remaining_steps: 0 }) {
                        r.state.mode = Mode::Chemotaxis;
                        cluster.release(m);
                    } else {
                        r.donor = Some(m);
                    }
                    chem.retarget(&mut r.state, homing, &layout.destination_triad);
                }
            }
            if !r.state.cargo.is_empty()
                && !matches!(r.state.mode, Mode::Conjugating { .. })
                && r.state.position.distance(layout.point_c) < config.delivery_radius_cm
            {
                delivered.extend(r.state.cargo.iter().map(|p| p.index));
                r.delivered = true;
                if let Some(m) = r.donor.take() {
                    cluster.release(m);
                }
            }
        }

        if let Some(rows) = trajectory.as_deref_mut() {
            rows.extend(retrievers.iter().map(|r| TrajectoryRow {
                t,
                id: r.state.id,
                x: r.state.position.x,
                y: r.state.position.y,
                theta: r.state.heading,
                mode: if r.delivered { "delivered" } else { r.state.mode.label() },
            }));
        }
        history.push(delivered.len());
        if delivered.len() == total {
            completion = Some(t);
        }
    }

    let per_cluster_retrieved = clusters
        .iter()
        .map(|c| {
            if c.plasmid_indices.is_empty() {
                1.0
            } else {
                c.plasmid_indices.iter().filter(|i| delivered.contains(i)).count() as f64 / c.plasmid_indices.len() as f64
            }
        })
        .collect();
    Ok(RetrievalOutcome {
        completion_time_s: completion.unwrap_or(config.time_limit_s),
        total_plasmids: total,
        pct_retrieved: if total == 0 { 1.0 } else { delivered.len() as f64 / total as f64 },
        delivered,
        per_cluster_conjugations,
        per_cluster_retrieved,
        peak_concurrency: peak,
        conjugations_per_retriever: retrievers.iter().map(|r| r.conjugations).collect(),
        delivered_history: history,
    })
}

fn build_archive(config: &SimConfig, file: &EncodedFile, layout: &ArchiveLayout) -> Result<Vec<Cluster>, EngineError> {
    let mut rng = stream(config.seed, Domain::Storage, 0);
    let members = config.members_per_cluster();
    let clusters = match config.placement {
        Placement::RoundRobin => {
            let namespace = targets_for(&layout.storage_triad, layout.point_b);
            store(&namespace, file, layout, members, &config.storage, &mut rng)?
        }
        Placement::Priority { high_fraction } => {
            store_by_priority(file, layout, high_fraction, members, &config.storage, &mut rng)?
        }
    };
    Ok(clusters)
}

fn advance(chem: &Chemotaxis, r: &mut Retriever, triad: &BeaconTriad, steps: u64) {
    if let Mode::Conjugating { remaining_steps } = r.state.mode {
        if remaining_steps > steps {
            r.state.mode = Mode::Conjugating { remaining_steps: remaining_steps - steps };
            return;
        }
    }
    for _ in 0..steps {
        chem.step(&mut r.state, triad, &mut r.motion);
    }
}
