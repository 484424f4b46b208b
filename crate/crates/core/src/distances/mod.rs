//! Hop distances, sensor signatures, equivalence-class refinement and
//! closed-neighborhood expansion.

mod bfs;
pub mod bulk;

pub use bfs::{hop_distances, INF_HOPS};

use crate::rgg::{GraphInstance, RggError, VertexId};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Vector of hop distances from a sensor set to one vertex, in sensor order.
/// `INF_HOPS` entries mark unreachable sensors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature(pub Vec<u32>);

impl Signature {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The set of vertices consistent with all readings so far: sorted, distinct,
/// nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateClass {
    members: Vec<VertexId>,
}

impl CandidateClass {
    /// Build a class from arbitrary member order; sorts and deduplicates.
    /// Panics on an empty member list (classes are nonempty during play).
    pub fn new(mut members: Vec<VertexId>) -> Self {
        members.sort_unstable();
        members.dedup();
        assert!(!members.is_empty(), "candidate class must be nonempty");
        CandidateClass { members }
    }

    /// Wrap an already-sorted deduplicated nonempty list.
    pub fn from_sorted(members: Vec<VertexId>) -> Self {
        debug_assert!(!members.is_empty());
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        CandidateClass { members }
    }

    pub fn members(&self) -> &[VertexId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn min_id(&self) -> VertexId {
        self.members[0]
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Hop distances from every sensor, one BFS per sensor, for each candidate.
/// Signature ordering follows sensor ordering.
pub fn signatures(
    g: &GraphInstance,
    sensors: &[VertexId],
    candidates: &CandidateClass,
) -> Result<BTreeMap<VertexId, Signature>, RggError> {
    if sensors.is_empty() {
        return Err(RggError::InvalidParams("sensor set must be nonempty".into()));
    }
    let arrays = sensor_distance_arrays(g, sensors)?;
    let mut out = BTreeMap::new();
    for &v in candidates.members() {
        let sig = Signature(arrays.iter().map(|d| d[v as usize]).collect());
        out.insert(v, sig);
    }
    Ok(out)
}

/// One full-graph distance array per sensor, computed in parallel but
/// returned in sensor order.
pub fn sensor_distance_arrays(
    g: &GraphInstance,
    sensors: &[VertexId],
) -> Result<Vec<Vec<u32>>, RggError> {
    for &s in sensors {
        g.check_vertex(s)?;
    }
    sensors
        .par_iter()
        .map(|&s| hop_distances(g, s))
        .collect::<Result<Vec<_>, _>>()
}

/// Partition `class` by identical signatures. Output classes are disjoint,
/// union to the input, and are ordered by lexicographically smallest
/// signature with ties broken by smallest member id.
pub fn refine(
    g: &GraphInstance,
    class: &CandidateClass,
    sensors: &[VertexId],
) -> Result<Vec<CandidateClass>, RggError> {
    if sensors.is_empty() {
        return Ok(vec![class.clone()]);
    }
    let arrays = sensor_distance_arrays(g, sensors)?;
    let mut groups: BTreeMap<Signature, Vec<VertexId>> = BTreeMap::new();
    for &v in class.members() {
        let sig = Signature(arrays.iter().map(|d| d[v as usize]).collect());
        groups.entry(sig).or_default().push(v);
    }
    // BTreeMap iteration is already in lexicographic signature order; member
    // lists are ascending because the class is sorted.
    let mut out: Vec<(Signature, Vec<VertexId>)> = groups.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1[0].cmp(&b.1[0])));
    Ok(out
        .into_iter()
        .map(|(_, members)| CandidateClass::from_sorted(members))
        .collect())
}

/// All vertices at metric distance at most `r` from some member, members
/// included; computed through the cell grid.
pub fn closed_neighborhood(g: &GraphInstance, class: &CandidateClass) -> CandidateClass {
    let mut mark = vec![false; g.n()];
    let mut out: Vec<VertexId> = Vec::new();
    for &v in class.members() {
        g.for_each_in_ball(g.position(v), g.r(), |u| {
            if !mark[u as usize] {
                mark[u as usize] = true;
                out.push(u);
            }
        });
    }
    // Members with no neighbors are still in their own ball; out is nonempty.
    out.sort_unstable();
    CandidateClass::from_sorted(out)
}

/// Inputs for the distance-stretch coefficient of the graph-vs-metric bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaInputs {
    pub r: f64,
    pub d_e: f64,
    pub n: u64,
}

/// Stretch coefficient
/// `max(31 (2 r log n / (r + d_E))^{2/3}, 70 log^2 n / r^{8/3}, 300^{2/3})`.
pub fn gamma(inp: &GammaInputs) -> f64 {
    let ln = (inp.n.max(2) as f64).ln();
    let t1 = 31.0 * (2.0 * inp.r * ln / (inp.r + inp.d_e)).powf(2.0 / 3.0);
    let t2 = 70.0 * ln * ln / inp.r.powf(8.0 / 3.0);
    let t3 = 300.0f64.powf(2.0 / 3.0);
    t1.max(t2).max(t3)
}

/// Hop-count ceiling `ceil((d_T / r) (1 + gamma r^{-4/3}))` that graph
/// distance is checked against.
pub fn distance_ceiling(g: &GraphInstance, d_t: f64) -> u32 {
    let gam = gamma(&GammaInputs {
        r: g.r(),
        d_e: d_t,
        n: g.n() as u64,
    });
    let bound = d_t / g.r() * (1.0 + gam * g.r().powf(-4.0 / 3.0));
    bound.ceil() as u32
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairCheck {
    pub u: VertexId,
    pub v: VertexId,
    pub d_t: f64,
    pub d_g: u32,
    pub ceiling: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceBoundReport {
    pub pairs_checked: usize,
    pub violations: Vec<PairCheck>,
    /// Pairs with infinite hop distance, flagged separately from ceiling
    /// violations.
    pub unreachable: Vec<(VertexId, VertexId)>,
}

impl DistanceBoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.unreachable.is_empty()
    }
}

/// Check `d_G(u, v) <= ceil((d_T / r)(1 + gamma r^{-4/3}))` on `m` random
/// pairs. Pairs are grouped into batches sharing a BFS source so the check
/// runs at million-vertex scale.
pub fn check_distance_bound(
    g: &GraphInstance,
    m: usize,
    seed: u64,
) -> Result<DistanceBoundReport, RggError> {
    if g.n() < 2 {
        return Err(RggError::EmptyInstance);
    }
    const TARGETS_PER_SOURCE: usize = 256;
    let n = g.n() as u64;
    let mut report = DistanceBoundReport {
        pairs_checked: 0,
        violations: Vec::new(),
        unreachable: Vec::new(),
    };
    let sources = m.div_ceil(TARGETS_PER_SOURCE);
    let mut stream = crate::rng::Stream::new(seed, "distance-bound-pairs", 0);
    for _ in 0..sources {
        let src = stream.below(n) as VertexId;
        let dist = hop_distances(g, src)?;
        let batch = TARGETS_PER_SOURCE.min(m - report.pairs_checked);
        for _ in 0..batch {
            let v = stream.below(n) as VertexId;
            let d_t = g.distance(g.position(src), g.position(v));
            let d_g = dist[v as usize];
            let ceiling = distance_ceiling(g, d_t);
            if d_g == INF_HOPS {
                if src != v {
                    report.unreachable.push((src, v));
                }
            } else if d_g > ceiling {
                report.violations.push(PairCheck {
                    u: src,
                    v,
                    d_t,
                    d_g,
                    ceiling,
                });
            }
            report.pairs_checked += 1;
        }
    }
    Ok(report)
}
