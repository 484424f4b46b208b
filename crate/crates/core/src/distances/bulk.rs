//! Exact signature partitions at scale.
//!
//! Partitioning a scope of vertices by their full signature against a large
//! sensor set cannot afford one BFS per sensor. This module computes the
//! identical partition with far fewer traversals, using only exact
//! certificates:
//!
//! * a sensor vertex inside the scope is a singleton class (it is the only
//!   vertex at hop distance 0 from itself);
//! * a sensor adjacent to exactly one vertex of a pair splits the pair
//!   (readings 1 versus >= 2), decided geometrically from the cell grid;
//! * an "anchor" prefix of sensors is processed one BFS at a time, splitting
//!   classes by observed distance, until the surviving suspect set is small;
//! * surviving candidate pairs are settled exactly by comparing the full
//!   signatures of their endpoints, one BFS per endpoint (a BFS from the
//!   vertex reads off its whole signature at the sensors).
//!
//! Orderings differ from [`super::refine`]: classes come back sorted by
//! smallest member id, since materializing full signatures for ordering is
//! what this path exists to avoid. Game semantics only consume class sizes
//! and member ids, never the class order.

use super::{hop_distances, CandidateClass, Signature};
use crate::rgg::{CellGrid, GraphInstance, RggError, VertexId};
use rayon::prelude::*;

/// Sensor-set size up to which plain per-sensor refinement is used.
pub const SMALL_SENSOR_LIMIT: usize = 64;
/// Scope-cells budget under which signatures are fully materialized.
const MATERIALIZE_BUDGET: usize = 30_000_000;
const ANCHOR_BATCH: usize = 32;
const MAX_ANCHORS: usize = 4096;
const PAIR_CAP: usize = 20_000_000;

/// A scope partition; signatures are attached when the scope was small
/// enough to materialize them (then classes are in lexicographic signature
/// order, ties by smallest member id — the `refine` ordering).
#[derive(Debug)]
pub enum ScopedPartition {
    WithSignatures(Vec<(CandidateClass, Signature)>),
    Plain(Vec<CandidateClass>),
}

impl ScopedPartition {
    pub fn classes(&self) -> Vec<&CandidateClass> {
        match self {
            ScopedPartition::WithSignatures(v) => v.iter().map(|(c, _)| c).collect(),
            ScopedPartition::Plain(v) => v.iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ScopedPartition::WithSignatures(v) => v.len(),
            ScopedPartition::Plain(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn into_classes(self) -> Vec<CandidateClass> {
        match self {
            ScopedPartition::WithSignatures(v) => v.into_iter().map(|(c, _)| c).collect(),
            ScopedPartition::Plain(v) => v,
        }
    }
}

/// Exact partition of `scope` by full sensor signatures.
pub fn partition_scoped(
    g: &GraphInstance,
    scope: &CandidateClass,
    sensors: &[VertexId],
) -> Result<ScopedPartition, RggError> {
    for &s in sensors {
        g.check_vertex(s)?;
    }
    if sensors.is_empty() {
        return Ok(ScopedPartition::Plain(vec![scope.clone()]));
    }
    let mut sensors_dedup = sensors.to_vec();
    sensors_dedup.sort_unstable();
    sensors_dedup.dedup();

    if scope.len().saturating_mul(sensors.len()) <= MATERIALIZE_BUDGET {
        let parts = refine_with_signatures(g, scope, sensors)?;
        return Ok(ScopedPartition::WithSignatures(parts));
    }
    if sensors_dedup.len() <= SMALL_SENSOR_LIMIT {
        return Ok(ScopedPartition::Plain(incremental_partition(
            g,
            scope,
            &sensors_dedup,
            usize::MAX,
        )?));
    }
    certificate_partition(g, scope, &sensors_dedup).map(ScopedPartition::Plain)
}

/// Per-sensor refinement with fully materialized signatures, in the
/// `refine` ordering (lexicographic signature, ties by smallest member).
pub fn refine_with_signatures(
    g: &GraphInstance,
    scope: &CandidateClass,
    sensors: &[VertexId],
) -> Result<Vec<(CandidateClass, Signature)>, RggError> {
    let arrays = super::sensor_distance_arrays(g, sensors)?;
    let mut rows: Vec<(Vec<u32>, VertexId)> = scope
        .members()
        .iter()
        .map(|&v| (arrays.iter().map(|d| d[v as usize]).collect(), v))
        .collect();
    rows.sort();
    let mut out: Vec<(CandidateClass, Signature)> = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let mut j = i + 1;
        while j < rows.len() && rows[j].0 == rows[i].0 {
            j += 1;
        }
        let members: Vec<VertexId> = rows[i..j].iter().map(|&(_, v)| v).collect();
        out.push((
            CandidateClass::from_sorted(members),
            Signature(rows[i].0.clone()),
        ));
        i = j;
    }
    Ok(out)
}

/// Split classes by one distance array at a time; memory stays O(scope).
/// Processing stops early once every class is a singleton (further sensors
/// cannot merge classes, so the partition is already final). The
/// `anchor_limit` knob lets the certificate path reuse this as its anchor
/// stage.
/// Split a list of classes by one distance array; classes that become
/// singletons move to `settled` and drop out of further passes.
fn split_by_array(active: &mut Vec<Vec<VertexId>>, settled: &mut Vec<VertexId>, d: &[u32]) {
    let mut next: Vec<Vec<VertexId>> = Vec::with_capacity(active.len());
    for class in active.drain(..) {
        let mut parts: Vec<(u32, Vec<VertexId>)> = Vec::new();
        for v in class {
            let key = d[v as usize];
            match parts.iter_mut().find(|(k, _)| *k == key) {
                Some((_, vs)) => vs.push(v),
                None => parts.push((key, vec![v])),
            }
        }
        for (_, vs) in parts {
            if vs.len() == 1 {
                settled.push(vs[0]);
            } else {
                next.push(vs);
            }
        }
    }
    *active = next;
}

fn incremental_partition(
    g: &GraphInstance,
    scope: &CandidateClass,
    sensors: &[VertexId],
    anchor_limit: usize,
) -> Result<Vec<CandidateClass>, RggError> {
    let mut active: Vec<Vec<VertexId>> = vec![scope.members().to_vec()];
    let mut settled: Vec<VertexId> = Vec::new();
    if scope.len() == 1 {
        active.clear();
        settled.push(scope.min_id());
    }
    let mut used = 0;
    for batch in sensors.chunks(ANCHOR_BATCH) {
        if used >= anchor_limit || active.is_empty() {
            break;
        }
        let take = batch.len().min(anchor_limit - used);
        let arrays = super::sensor_distance_arrays(g, &batch[..take])?;
        for d in &arrays {
            used += 1;
            split_by_array(&mut active, &mut settled, d);
            if active.is_empty() {
                break;
            }
        }
    }
    let mut out: Vec<CandidateClass> = active.into_iter().map(CandidateClass::new).collect();
    out.extend(settled.into_iter().map(|v| CandidateClass::from_sorted(vec![v])));
    out.sort_by_key(CandidateClass::min_id);
    Ok(out)
}

struct SensorIndex {
    grid: CellGrid,
    /// Sensor vertex ids, addressed by the grid's internal indices.
    vertex_of: Vec<VertexId>,
}

impl SensorIndex {
    fn build(g: &GraphInstance, sensors: &[VertexId]) -> SensorIndex {
        let positions: Vec<_> = sensors.iter().map(|&s| g.position(s)).collect();
        let target = g.r().min(8.0).min(g.side()).max(g.side() * 1e-9);
        SensorIndex {
            grid: CellGrid::build(&positions, g.side(), target),
            vertex_of: sensors.to_vec(),
        }
    }

    /// True when some sensor is adjacent to exactly one of `u`, `v`
    /// (metric-ball membership, the exact split certificate). All such
    /// sensors lie within `d(u, v)` of the radius-`r` circle around `u`.
    fn splits_pair(&self, g: &GraphInstance, u: VertexId, v: VertexId) -> bool {
        let pu = g.position(u);
        let pv = g.position(v);
        let r = g.r();
        let r2 = r * r;
        let eps = g.distance(pu, pv);
        let lo = (r - eps - 1e-9).max(0.0);
        let hi = r + eps + 1e-9;
        let grid = &self.grid;
        let (row, col) = grid.cell_of(match g.metric() {
            crate::rgg::MetricMode::Torus => g.torus().canonicalize(pu),
            crate::rgg::MetricMode::Square => pu,
        });
        let rad = (hi / grid.cell_side()).ceil() as u32;
        let mut found = false;
        grid.for_each_cell_near(row, col, rad, g.wraps(), |rr, cc| {
            if found {
                return;
            }
            for &idx in grid.ids_in(rr, cc) {
                let s = self.vertex_of[idx as usize];
                if s == u || s == v {
                    continue;
                }
                let ps = g.position(s);
                let du = g.distance(pu, ps);
                if du < lo || du > hi {
                    continue;
                }
                let in_u = du * du <= r2;
                let in_v = g.dist2(pv, ps) <= r2;
                if in_u != in_v {
                    found = true;
                    return;
                }
            }
        });
        found
    }

}

fn certificate_partition(
    g: &GraphInstance,
    scope: &CandidateClass,
    sensors: &[VertexId],
) -> Result<Vec<CandidateClass>, RggError> {
    let sensor_set: std::collections::HashSet<VertexId> = sensors.iter().copied().collect();
    let mut classes: Vec<CandidateClass> = Vec::new();
    let mut rest: Vec<VertexId> = Vec::new();
    for &v in scope.members() {
        if sensor_set.contains(&v) {
            classes.push(CandidateClass::from_sorted(vec![v]));
        } else {
            rest.push(v);
        }
    }
    if rest.is_empty() {
        classes.sort_by_key(CandidateClass::min_id);
        return Ok(classes);
    }

    // Anchor stage: refine the non-sensor scope by a deterministic shuffled
    // prefix of the sensors until the suspect set is small.
    let mut order = sensors.to_vec();
    let mut stream =
        crate::rng::Stream::new(g.seed() ^ sensors.len() as u64, "bulk-anchor-order", 0);
    stream.shuffle(&mut order);

    let rest_class = CandidateClass::from_sorted(rest);
    let mut active: Vec<Vec<VertexId>> = vec![rest_class.members().to_vec()];
    let mut settled: Vec<VertexId> = Vec::new();
    if rest_class.len() == 1 {
        active.clear();
        settled.push(rest_class.min_id());
    }
    let mut anchors_used = 0usize;
    loop {
        let suspects: usize = active.iter().map(Vec::len).sum();
        if suspects <= anchors_used.max(SMALL_SENSOR_LIMIT)
            || anchors_used >= MAX_ANCHORS.min(order.len())
        {
            break;
        }
        let batch_end = (anchors_used + ANCHOR_BATCH)
            .min(order.len())
            .min(MAX_ANCHORS);
        let batch = &order[anchors_used..batch_end];
        let arrays = super::sensor_distance_arrays(g, batch)?;
        for d in &arrays {
            split_by_array(&mut active, &mut settled, d);
        }
        anchors_used = batch_end;
        let after: usize = active.iter().map(Vec::len).sum();
        // Plateau guard: anchors have stopped paying for themselves.
        if after + after / 50 >= suspects && anchors_used >= 2 * ANCHOR_BATCH {
            break;
        }
    }

    // Candidate collision edges among surviving groups: pairs that no sensor
    // splits geometrically.
    let idx = SensorIndex::build(g, sensors);
    let mut pair_budget: usize = 0;
    for c in &active {
        pair_budget = pair_budget.saturating_add(c.len() * (c.len() - 1) / 2);
    }
    if pair_budget > PAIR_CAP {
        // Pathologically twin-heavy scope; fall back to exhaustive
        // per-sensor refinement, which is exact at any size.
        let mut out = incremental_partition(g, &rest_class, sensors, usize::MAX)?;
        out.extend(classes);
        out.sort_by_key(CandidateClass::min_id);
        return Ok(out);
    }

    let mut suspect_edges: Vec<(VertexId, VertexId)> = Vec::new();
    for c in &active {
        for i in 0..c.len() {
            for j in (i + 1)..c.len() {
                let (u, v) = (c[i], c[j]);
                if !idx.splits_pair(g, u, v) {
                    suspect_edges.push((u, v));
                }
            }
        }
    }

    // Exact resolution: one BFS per incident vertex reads off its full
    // signature at the sensors.
    let mut incident: Vec<VertexId> = suspect_edges
        .iter()
        .flat_map(|&(u, v)| [u, v])
        .collect();
    incident.sort_unstable();
    incident.dedup();
    let sigs: Vec<(VertexId, Vec<u32>)> = incident
        .par_iter()
        .map(|&v| {
            hop_distances(g, v).map(|d| {
                let sig: Vec<u32> = sensors.iter().map(|&s| d[s as usize]).collect();
                (v, sig)
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut by_sig: std::collections::HashMap<&[u32], Vec<VertexId>> =
        std::collections::HashMap::new();
    for (v, sig) in &sigs {
        by_sig.entry(sig.as_slice()).or_default().push(*v);
    }
    let merged: std::collections::HashSet<VertexId> = by_sig
        .values()
        .filter(|vs| vs.len() > 1)
        .flatten()
        .copied()
        .collect();
    for vs in by_sig.into_values() {
        if vs.len() > 1 {
            classes.push(CandidateClass::new(vs));
        }
    }
    // Everything else in the surviving groups is certified split, as is
    // everything the anchors settled.
    for c in active {
        for v in c {
            if !merged.contains(&v) {
                classes.push(CandidateClass::from_sorted(vec![v]));
            }
        }
    }
    for v in settled {
        classes.push(CandidateClass::from_sorted(vec![v]));
    }
    classes.sort_by_key(CandidateClass::min_id);
    Ok(classes)
}

/// Exact check that every vertex of `scope` has a unique signature under
/// `sensors`. Runs the partition machinery with the anchor order reversed so
/// a verification pass does not retrace the construction path.
pub fn verify_unique_signatures(
    g: &GraphInstance,
    scope: &CandidateClass,
    sensors: &[VertexId],
) -> Result<bool, RggError> {
    if sensors.is_empty() {
        return Ok(scope.len() <= 1);
    }
    let mut reversed = sensors.to_vec();
    reversed.reverse();
    let parts = partition_scoped(g, scope, &reversed)?;
    Ok(parts.len() == scope.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rgg::{sample_instance, ModelParams};

    /// Oracle: group scope by fully materialized signatures.
    fn brute_partition(
        g: &GraphInstance,
        scope: &CandidateClass,
        sensors: &[VertexId],
    ) -> Vec<Vec<VertexId>> {
        let arrays: Vec<Vec<u32>> = sensors
            .iter()
            .map(|&s| hop_distances(g, s).unwrap())
            .collect();
        let mut map: std::collections::HashMap<Vec<u32>, Vec<VertexId>> =
            std::collections::HashMap::new();
        for &v in scope.members() {
            let sig: Vec<u32> = arrays.iter().map(|d| d[v as usize]).collect();
            map.entry(sig).or_default().push(v);
        }
        let mut out: Vec<Vec<VertexId>> = map.into_values().collect();
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort_by_key(|c| c[0]);
        out
    }

    #[test]
    fn certificate_path_matches_brute_force() {
        let g = sample_instance(&ModelParams::new(900, 4.0, 77)).unwrap();
        let scope = CandidateClass::new((0..g.n() as u32).collect());
        // Enough sensors to push past the small-sensor path.
        let mut stream = crate::rng::Stream::new(5, "bulk-test-sensors", 0);
        let mut sensors: Vec<u32> = (0..g.n() as u32).collect();
        stream.shuffle(&mut sensors);
        sensors.truncate(200);
        sensors.sort_unstable();

        let got = certificate_partition(&g, &scope, &sensors).unwrap();
        let got: Vec<Vec<u32>> = got.iter().map(|c| c.members().to_vec()).collect();
        assert_eq!(got, brute_partition(&g, &scope, &sensors));
    }

    #[test]
    fn incremental_path_matches_brute_force() {
        let g = sample_instance(&ModelParams::new(400, 3.0, 12)).unwrap();
        let scope = CandidateClass::new((0..g.n() as u32).collect());
        let sensors: Vec<u32> = vec![3, 50, 77, 123, 300];
        let got = incremental_partition(&g, &scope, &sensors, usize::MAX).unwrap();
        let got: Vec<Vec<u32>> = got.iter().map(|c| c.members().to_vec()).collect();
        assert_eq!(got, brute_partition(&g, &scope, &sensors));
    }

    #[test]
    fn dispatch_is_consistent_across_paths() {
        let g = sample_instance(&ModelParams::new(700, 3.5, 4)).unwrap();
        let scope = CandidateClass::new((0..g.n() as u32).collect());
        let sensors: Vec<u32> = (0..140).map(|i| (i * 5) as u32).collect();
        let via_cert = certificate_partition(&g, &scope, &sensors).unwrap();
        let mut via_brute = brute_partition(&g, &scope, &sensors);
        via_brute.sort_by_key(|c| c[0]);
        let got: Vec<Vec<u32>> = via_cert.iter().map(|c| c.members().to_vec()).collect();
        assert_eq!(got, via_brute);
    }

    #[test]
    fn verify_unique_signatures_detects_twins() {
        // Two vertices closer than anything else, far from all sensors'
        // symmetric differences: a third-vertex sensor cannot split them.
        let positions = vec![
            crate::geometry::Point::new(10.0, 10.0),
            crate::geometry::Point::new(10.05, 10.0),
            crate::geometry::Point::new(12.0, 10.0),
            crate::geometry::Point::new(14.0, 10.0),
        ];
        let g = GraphInstance::from_parts(
            30.0,
            2.5,
            crate::rgg::MetricMode::Torus,
            crate::rgg::SampleMode::Binomial,
            0,
            positions,
        );
        let scope = CandidateClass::new(vec![0, 1, 2, 3]);
        assert!(!verify_unique_signatures(&g, &scope, &[2, 3]).unwrap());
        // Putting a sensor on one twin resolves everything.
        assert!(verify_unique_signatures(&g, &scope, &[0, 2, 3]).unwrap());
    }

    #[test]
    fn sensors_in_scope_become_singletons() {
        let g = sample_instance(&ModelParams::new(300, 6.0, 8)).unwrap();
        let scope = CandidateClass::new((0..g.n() as u32).collect());
        let sensors: Vec<u32> = (0..100).collect();
        let parts = certificate_partition(&g, &scope, &sensors).unwrap();
        for &s in &sensors {
            assert!(parts
                .iter()
                .any(|c| c.len() == 1 && c.min_id() == s));
        }
    }
}
