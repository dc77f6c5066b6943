//! Storage side of the archive: beacon layout, clusters of motility-restricted
//! bacteria holding plasmids, and content placement.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{EncodedFile, Plasmid};
use crate::field::{BeaconTriad, FieldError, Point, TargetConcentrations};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArchiveError {
    #[error("cluster {cluster}: capacity {capacity} cannot hold {plasmids} plasmids")]
    CapacityExceeded { cluster: usize, capacity: usize, plasmids: usize },
    #[error("no cluster with room for chunk {chunk} of priority {priority:?}")]
    NoMatchingCluster { chunk: usize, priority: Priority },
    #[error("namespace does not resolve to any cluster")]
    UnresolvedNamespace,
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Priority {
    High,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayoutMode {
    /// Four clusters on a square around B, all inside the storage triangle.
    #[default]
    AllInside,
    /// The two upper clusters moved out past the triangle's base edge.
    TwoOutside,
}

/// Geometry knobs of the three-point experiment (start A, storage B,
/// delivery C on a vertical line).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutParams {
    pub mode: LayoutMode,
    pub ab_distance_cm: f64,
    pub triad_side_cm: f64,
    pub cluster_offset_cm: f64,
    pub cluster_radius_cm: f64,
    pub max_concurrent: usize,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            mode: LayoutMode::AllInside,
            ab_distance_cm: 0.4,
            triad_side_cm: 0.2425,
            cluster_offset_cm: 0.02,
            cluster_radius_cm: 0.005,
            max_concurrent: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterSite {
    pub id: usize,
    pub centre: Point,
    pub radius: f64,
    pub priority: Priority,
    pub max_concurrent: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveLayout {
    pub storage_triad: BeaconTriad,
    pub destination_triad: BeaconTriad,
    pub point_a: Point,
    pub point_b: Point,
    pub point_c: Point,
    pub clusters: Vec<ClusterSite>,
}

pub fn default_layout(mode: LayoutMode) -> ArchiveLayout {
    LayoutParams { mode, ..Default::default() }.build().expect("default geometry is valid")
}

impl LayoutParams {
    /// B sits at the origin, A below it and C above it. Both triads are
    /// equilateral with the apex pointing towards A, so the base edge of the
    /// storage triad faces C.
    pub fn build(&self) -> Result<ArchiveLayout, ArchiveError> {
        let positive = [
            ("ab_distance_cm", self.ab_distance_cm),
            ("triad_side_cm", self.triad_side_cm),
            ("cluster_offset_cm", self.cluster_offset_cm),
            ("cluster_radius_cm", self.cluster_radius_cm),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ArchiveError::InvalidLayout(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_concurrent == 0 {
            return Err(ArchiveError::InvalidLayout("max_concurrent must be at least 1".into()));
        }
        let point_b = Point::new(0.0, 0.0);
        let point_a = Point::new(0.0, -self.ab_distance_cm);
        let point_c = Point::new(0.0, self.ab_distance_cm);
        let apex = -PI / 2.0;
        let storage_triad = BeaconTriad::equilateral(point_b, self.triad_side_cm, apex, 0)?;
        let destination_triad = BeaconTriad::equilateral(point_c, self.triad_side_cm, apex, 3)?;

        let o = self.cluster_offset_cm;
        let mut centres = [(-o, -o), (o, -o), (-o, o), (o, o)].map(|(dx, dy)| point_b.offset(dx, dy));
        if self.mode == LayoutMode::TwoOutside {
            // Base vertices are beacons 1 and 2. Clusters keep their abscissa and
            // sit one cluster radius beyond the base line so the whole disc is
            // outside the hull.
            let base_y = storage_triad.beacons()[1].position.y;
            for c in &mut centres[2..] {
                c.y = base_y + self.cluster_radius_cm;
            }
        }
        let clusters = centres
            .iter()
            .enumerate()
            .map(|(id, &centre)| ClusterSite {
                id,
                centre,
                radius: self.cluster_radius_cm,
                priority: if storage_triad.contains(centre) { Priority::High } else { Priority::Low },
                max_concurrent: self.max_concurrent,
            })
            .collect();
        Ok(ArchiveLayout { storage_triad, destination_triad, point_a, point_b, point_c, clusters })
    }
}

/// How plasmids are copied across the bacteria of one cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Replication {
    /// Every member is filled up to its capacity.
    #[default]
    Full,
    /// Each plasmid is placed in this many members.
    Copies(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StorageParams {
    /// Members per cluster. `None` follows the retriever count.
    pub members_per_cluster: Option<usize>,
    pub capacity_mean: f64,
    pub capacity_sd: f64,
    pub replication: Replication,
}

impl Default for StorageParams {
    fn default() -> Self {
        Self { members_per_cluster: None, capacity_mean: 100.0, capacity_sd: 10.0, replication: Replication::Full }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StorageBacterium {
    pub position: Point,
    pub capacity: usize,
    pub held: Vec<Arc<Plasmid>>,
    pub busy: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub site: ClusterSite,
    pub members: Vec<StorageBacterium>,
    pub concurrent_conjugations: usize,
    /// Plasmid indices assigned to this cluster.
    pub plasmid_indices: Vec<usize>,
}

impl Cluster {
    /// Fresh cluster with `members` bacteria scattered uniformly over the disc.
    /// Capacities are `round(Normal(mean, sd))`, at least 1.
    pub fn populate<R: Rng + ?Sized>(site: ClusterSite, members: usize, storage: &StorageParams, rng: &mut R) -> Cluster {
        let capacity = Normal::new(storage.capacity_mean, storage.capacity_sd.max(0.0))
            .expect("finite capacity distribution");
        let members = (0..members)
            .map(|_| {
                let r = site.radius * rng.random::<f64>().sqrt();
                let a = rng.random::<f64>() * 2.0 * PI;
                StorageBacterium {
                    position: site.centre.offset(r * a.cos(), r * a.sin()),
                    capacity: capacity.sample(rng).round().max(1.0) as usize,
                    held: Vec::new(),
                    busy: false,
                }
            })
            .collect();
        Cluster { site, members, concurrent_conjugations: 0, plasmid_indices: Vec::new() }
    }

    pub fn total_capacity(&self) -> usize {
        self.members.iter().map(|m| m.capacity).sum()
    }

    /// Packs `plasmids` into the members as consecutive cyclic windows, each
    /// window no longer than the member's capacity.
    pub fn load(&mut self, plasmids: Vec<Arc<Plasmid>>, replication: Replication) -> Result<(), ArchiveError> {
        let n = plasmids.len();
        self.plasmid_indices = plasmids.iter().map(|p| p.index).collect();
        for m in &mut self.members {
            m.held.clear();
        }
        if n == 0 {
            return Ok(());
        }
        if self.total_capacity() < n {
            return Err(ArchiveError::CapacityExceeded {
                cluster: self.site.id,
                capacity: self.total_capacity(),
                plasmids: n,
            });
        }
        let mut budget = match replication {
            Replication::Full => usize::MAX,
            Replication::Copies(k) => k.max(1) * n,
        };
        let mut cursor = 0usize;
        for m in &mut self.members {
            if budget == 0 {
                break;
            }
            let take = m.capacity.min(n).min(budget);
            m.held = (0..take).map(|i| Arc::clone(&plasmids[(cursor + i) % n])).collect();
            cursor = (cursor + take) % n;
            budget -= take;
        }
        Ok(())
    }

    /// Reserves a random idle member for conjugation, respecting the cap on
    /// simultaneous conjugations.
    pub fn checkout_conjugation<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        if self.concurrent_conjugations >= self.site.max_concurrent {
            return None;
        }
        let idle = self.members.iter().filter(|m| !m.busy).count();
        if idle == 0 {
            return None;
        }
        let pick = rng.random_range(0..idle);
        let (index, member) = self.members.iter_mut().enumerate().filter(|(_, m)| !m.busy).nth(pick)?;
        member.busy = true;
        self.concurrent_conjugations += 1;
        Some(index)
    }

    pub fn release(&mut self, member: usize) {
        if let Some(m) = self.members.get_mut(member) {
            if m.busy {
                m.busy = false;
                self.concurrent_conjugations -= 1;
            }
        }
    }
}

/// Stores `file` in the clusters addressed by `namespace`, dealing plasmids
/// round-robin across them.
///
/// The namespace is a concentration triple of the storage triad; it names the
/// point it trilaterates to, and every cluster within one circumradius of that
/// point belongs to it.
pub fn store<R: Rng + ?Sized>(
    namespace: &TargetConcentrations,
    file: &EncodedFile,
    layout: &ArchiveLayout,
    members_per_cluster: usize,
    storage: &StorageParams,
    rng: &mut R,
) -> Result<Vec<Cluster>, ArchiveError> {
    let sites = resolve_namespace(namespace, layout)?;
    let mut shares: Vec<Vec<Arc<Plasmid>>> = vec![Vec::new(); sites.len()];
    for (i, p) in file.plasmids.iter().enumerate() {
        shares[i % sites.len()].push(Arc::new(p.clone()));
    }
    fill(sites, shares, members_per_cluster, storage, rng)
}

/// Stores `file` with the first `high_fraction` of its plasmids marked high
/// priority and the rest low, placed by [`distribute_by_priority`]. Each
/// cluster takes at most `ceil(total / clusters)` plasmids.
pub fn store_by_priority<R: Rng + ?Sized>(
    file: &EncodedFile,
    layout: &ArchiveLayout,
    high_fraction: f64,
    members_per_cluster: usize,
    storage: &StorageParams,
    rng: &mut R,
) -> Result<Vec<Cluster>, ArchiveError> {
    let sites = layout.clusters.clone();
    let total = file.plasmids.len();
    let high = (total as f64 * high_fraction.clamp(0.0, 1.0)).ceil() as usize;
    let chunks: Vec<(&Plasmid, Priority)> = file
        .plasmids
        .iter()
        .enumerate()
        .map(|(i, p)| (p, if i < high { Priority::High } else { Priority::Low }))
        .collect();
    let per_cluster = total.div_ceil(sites.len().max(1));
    let slots: Vec<Slot> = sites.iter().map(|s| Slot { priority: s.priority, capacity: per_cluster }).collect();
    let assignment = distribute_by_priority(&chunks, &slots)?;
    let mut shares: Vec<Vec<Arc<Plasmid>>> = vec![Vec::new(); sites.len()];
    for ((p, _), cluster) in chunks.iter().zip(assignment) {
        shares[cluster].push(Arc::new((*p).clone()));
    }
    fill(sites, shares, members_per_cluster, storage, rng)
}

fn resolve_namespace(namespace: &TargetConcentrations, layout: &ArchiveLayout) -> Result<Vec<ClusterSite>, ArchiveError> {
    let point = layout
        .storage_triad
        .trilaterate(namespace)
        .filter(|p| p.is_finite())
        .ok_or(ArchiveError::UnresolvedNamespace)?;
    let reach = layout.storage_triad.beacons()[0].position.distance(layout.storage_triad.barycentre());
    let sites: Vec<ClusterSite> =
        layout.clusters.iter().filter(|s| s.centre.distance(point) <= reach).copied().collect();
    if sites.is_empty() {
        Err(ArchiveError::UnresolvedNamespace)
    } else {
        Ok(sites)
    }
}

fn fill<R: Rng + ?Sized>(
    sites: Vec<ClusterSite>,
    shares: Vec<Vec<Arc<Plasmid>>>,
    members_per_cluster: usize,
    storage: &StorageParams,
    rng: &mut R,
) -> Result<Vec<Cluster>, ArchiveError> {
    // Populate every cluster before loading so member draws do not depend on
    // the file contents.
    let mut clusters: Vec<Cluster> =
        sites.into_iter().map(|s| Cluster::populate(s, members_per_cluster, storage, rng)).collect();
    for (cluster, share) in clusters.iter_mut().zip(shares) {
        cluster.load(share, storage.replication)?;
    }
    Ok(clusters)
}

/// A cluster as seen by the content distributor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub priority: Priority,
    /// Chunks the cluster accepts.
    pub capacity: usize,
}

/// Priority-based content distribution: each chunk, in order, goes to the
/// first cluster (in id order) that is not full and has the chunk's priority.
/// Returns the chosen cluster for every chunk.
pub fn distribute_by_priority<T>(chunks: &[(T, Priority)], clusters: &[Slot]) -> Result<Vec<usize>, ArchiveError> {
    let mut used = vec![0usize; clusters.len()];
    let mut assignment = Vec::with_capacity(chunks.len());
    for (chunk, (_, priority)) in chunks.iter().enumerate() {
        let mut stored = None;
        for (i, slot) in clusters.iter().enumerate() {
            if used[i] < slot.capacity && slot.priority == *priority && stored.is_none() {
                used[i] += 1;
                stored = Some(i);
            }
        }
        match stored {
            Some(i) => assignment.push(i),
            None => return Err(ArchiveError::NoMatchingCluster { chunk, priority: *priority }),
        }
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Encoding;
    use crate::field::targets_for;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn file(bytes: usize) -> EncodedFile {
        let data: Vec<u8> = (0..bytes).map(|i| (i * 131 % 256) as u8).collect();
        EncodedFile::encode(&data, Encoding::Basic, "f", 200)
    }

    fn namespace(layout: &ArchiveLayout) -> TargetConcentrations {
        targets_for(&layout.storage_triad, layout.point_b)
    }

    #[test]
    fn all_inside_geometry() {
        let l = default_layout(LayoutMode::AllInside);
        assert_eq!(l.clusters.len(), 4);
        assert!(l.clusters.iter().all(|c| l.storage_triad.contains(c.centre)));
        assert!(l.clusters.iter().all(|c| c.priority == Priority::High));
        let inradius = 0.2425 / (2.0 * 3f64.sqrt());
        assert!((inradius - 0.0700).abs() < 1e-4);
        assert!((l.point_a.distance(l.point_b) - 0.4).abs() < 1e-15);
        assert!((l.point_b.distance(l.point_c) - 0.4).abs() < 1e-15);
        assert_eq!(l.point_a.x, l.point_b.x);
        assert_eq!(l.point_b.x, l.point_c.x);
        assert!((l.destination_triad.barycentre().distance(l.point_c)) < 1e-15);
    }

    #[test]
    fn two_outside_geometry() {
        let l = default_layout(LayoutMode::TwoOutside);
        let outside: Vec<_> = l.clusters.iter().filter(|c| !l.storage_triad.contains(c.centre)).collect();
        assert_eq!(outside.len(), 2);
        assert!(outside.iter().all(|c| c.priority == Priority::Low && c.centre.x.abs() == 0.02));
        // lower pair untouched
        assert_eq!(l.clusters[0].centre, Point::new(-0.02, -0.02));
        assert_eq!(l.clusters[1].centre, Point::new(0.02, -0.02));
        assert!((l.point_a.distance(l.point_b) - 0.4).abs() < 1e-15);
        assert!((l.point_b.distance(l.point_c) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn round_robin_quarters() {
        let l = default_layout(LayoutMode::AllInside);
        let f = file(18_400);
        assert_eq!(f.total_plasmids(), 368);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let clusters = store(&namespace(&l), &f, &l, 10, &StorageParams::default(), &mut rng).unwrap();
        assert!(clusters.iter().all(|c| c.plasmid_indices.len() == 92));
    }

    #[test]
    fn single_plasmid_lands_in_one_cluster() {
        let l = default_layout(LayoutMode::AllInside);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let clusters = store(&namespace(&l), &file(10), &l, 10, &StorageParams::default(), &mut rng).unwrap();
        assert_eq!(clusters.iter().filter(|c| !c.plasmid_indices.is_empty()).count(), 1);
    }

    #[test]
    fn sequential_fill_and_seed_determinism() {
        let l = default_layout(LayoutMode::AllInside);
        let storage = StorageParams { replication: Replication::Copies(1), ..Default::default() };
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            store(&namespace(&l), &file(18_400), &l, 10, &storage, &mut rng).unwrap()
        };
        let a = run(5);
        assert_eq!(a, run(5));
        let first = &a[0].members[0];
        if first.capacity >= 92 {
            assert_eq!(first.held.len(), 92);
            assert!(a[0].members[1..].iter().all(|m| m.held.is_empty()));
        }
        // capacity is round(N(100, 10)); 92 fits the first member for most seeds
        let fits = (0..50).filter(|&s| run(s)[0].members[0].held.len() == 92).count();
        assert!(fits > 30, "{fits}");
    }

    #[test]
    fn capacity_exceeded() {
        let l = default_layout(LayoutMode::AllInside);
        let storage = StorageParams { capacity_mean: 1.0, capacity_sd: 0.0, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = store(&namespace(&l), &file(18_400), &l, 10, &storage, &mut rng).unwrap_err();
        assert!(matches!(err, ArchiveError::CapacityExceeded { plasmids: 92, capacity: 10, .. }));
    }

    #[test]
    fn unresolvable_namespace() {
        let l = default_layout(LayoutMode::AllInside);
        let far = targets_for(&l.storage_triad, Point::new(3.0, 3.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = store(&far, &file(100), &l, 10, &StorageParams::default(), &mut rng).unwrap_err();
        assert_eq!(err, ArchiveError::UnresolvedNamespace);
    }

    #[test]
    fn priority_first_fit() {
        let high = Slot { priority: Priority::High, capacity: 5 };
        let chunks = [((), Priority::High), ((), Priority::High)];
        assert_eq!(distribute_by_priority(&chunks, &[high, high]).unwrap(), vec![0, 0]);
        let tight = Slot { priority: Priority::High, capacity: 1 };
        assert_eq!(distribute_by_priority(&chunks, &[tight, tight]).unwrap(), vec![0, 1]);
        let err = distribute_by_priority(&[((), Priority::Low)], &[high]).unwrap_err();
        assert_eq!(err, ArchiveError::NoMatchingCluster { chunk: 0, priority: Priority::Low });
        assert!(distribute_by_priority::<()>(&[], &[high]).unwrap().is_empty());
        assert!(distribute_by_priority(&chunks, &[tight]).is_err());
    }

    #[test]
    fn priority_store_keeps_classes_apart() {
        let l = default_layout(LayoutMode::TwoOutside);
        let f = file(18_400);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let clusters = store_by_priority(&f, &l, 0.5, 20, &StorageParams::default(), &mut rng).unwrap();
        for c in &clusters {
            let first_half = c.plasmid_indices.iter().all(|&i| i < 184);
            assert_eq!(first_half, c.site.priority == Priority::High, "cluster {}", c.site.id);
            assert_eq!(c.plasmid_indices.len(), 92);
        }
        let l = default_layout(LayoutMode::AllInside);
        assert!(matches!(
            store_by_priority(&f, &l, 0.5, 20, &StorageParams::default(), &mut rng),
            Err(ArchiveError::NoMatchingCluster { priority: Priority::Low, .. })
        ));
    }

    #[test]
    fn checkout_limits() {
        let site = default_layout(LayoutMode::AllInside).clusters[0];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut c = Cluster::populate(site, 10, &StorageParams::default(), &mut rng);
        assert!(c.checkout_conjugation(&mut rng).is_some());
        assert_eq!(c.concurrent_conjugations, 1);
        for _ in 0..9 {
            assert!(c.checkout_conjugation(&mut rng).is_some());
        }
        // every member busy, counter below the cap
        assert_eq!(c.checkout_conjugation(&mut rng), None);

        let mut big = Cluster::populate(site, 80, &StorageParams::default(), &mut rng);
        for _ in 0..50 {
            assert!(big.checkout_conjugation(&mut rng).is_some());
        }
        assert_eq!(big.concurrent_conjugations, 50);
        assert_eq!(big.checkout_conjugation(&mut rng), None);
        assert!(big.members.iter().filter(|m| m.busy).count() == 50);
    }

    #[test]
    fn members_lie_in_the_disc() {
        let site = default_layout(LayoutMode::AllInside).clusters[3];
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = Cluster::populate(site, 500, &StorageParams::default(), &mut rng);
        assert!(c.members.iter().all(|m| m.position.distance(site.centre) <= site.radius && m.capacity >= 1));
    }

    proptest! {
        #[test]
        fn store_conserves_plasmids(bytes in 0usize..6000, members in 1usize..40, copies in 0usize..4, seed in any::<u64>()) {
            let l = default_layout(LayoutMode::AllInside);
            let f = EncodedFile::encode(&vec![0x5a; bytes], Encoding::Basic, "f", 50);
            let replication = if copies == 0 { Replication::Full } else { Replication::Copies(copies) };
            let storage = StorageParams { replication, ..Default::default() };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let clusters = match store(&namespace(&l), &f, &l, members, &storage, &mut rng) {
                Ok(c) => c,
                Err(ArchiveError::CapacityExceeded { capacity, plasmids, .. }) => {
                    prop_assert!(capacity < plasmids);
                    return Ok(());
                }
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            };
            let counts: Vec<usize> = clusters.iter().map(|c| c.plasmid_indices.len()).collect();
            prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
            let mut seen = BTreeSet::new();
            for c in &clusters {
                let held: BTreeSet<usize> = c.members.iter().flat_map(|m| m.held.iter().map(|p| p.index)).collect();
                let assigned: BTreeSet<usize> = c.plasmid_indices.iter().copied().collect();
                prop_assert_eq!(&held, &assigned);
                for i in assigned {
                    prop_assert!(seen.insert(i), "index {} in two clusters", i);
                }
                for m in &c.members {
                    prop_assert!(m.held.len() <= m.capacity);
                }
            }
            prop_assert_eq!(seen.len(), f.total_plasmids());
        }

        #[test]
        fn checkout_release_interleaving(ops in proptest::collection::vec(any::<(bool, u8)>(), 0..400), seed in any::<u64>()) {
            let mut site = default_layout(LayoutMode::AllInside).clusters[0];
            site.max_concurrent = 7;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c = Cluster::populate(site, 12, &StorageParams::default(), &mut rng);
            let mut out: Vec<usize> = Vec::new();
            for (checkout, k) in ops {
                if checkout {
                    if let Some(m) = c.checkout_conjugation(&mut rng) {
                        prop_assert!(!out.contains(&m));
                        out.push(m);
                    }
                } else if !out.is_empty() {
                    let m = out.swap_remove(k as usize % out.len());
                    c.release(m);
                }
                prop_assert!(c.concurrent_conjugations <= 7);
                prop_assert_eq!(c.concurrent_conjugations, out.len());
                prop_assert_eq!(c.members.iter().filter(|m| m.busy).count(), out.len());
            }
        }

        #[test]
        fn priorities_never_mix(prios in proptest::collection::vec(any::<bool>(), 0..60), caps in proptest::collection::vec((any::<bool>(), 0usize..20), 1..6)) {
            let chunks: Vec<((), Priority)> = prios.iter().map(|&h| ((), if h { Priority::High } else { Priority::Low })).collect();
            let slots: Vec<Slot> = caps.iter().map(|&(h, c)| Slot { priority: if h { Priority::High } else { Priority::Low }, capacity: c }).collect();
            if let Ok(assign) = distribute_by_priority(&chunks, &slots) {
                let mut used = vec![0; slots.len()];
                for (i, &cl) in assign.iter().enumerate() {
                    prop_assert_eq!(slots[cl].priority, chunks[i].1);
                    used[cl] += 1;
                }
                for (u, s) in used.iter().zip(&slots) {
                    prop_assert!(*u <= s.capacity);
                }
            }
        }
    }
}
