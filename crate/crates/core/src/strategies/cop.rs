//! Cop-side machinery: the coarse probe grid, the four-sensor square
//! shrinking step, distinguishing-set construction for the final round, and
//! the composite strategy stitching the phases together.

use super::{ConstantsProfile, StrategyError};
use crate::distances::bulk::{partition_scoped, verify_unique_signatures};
use crate::distances::{gamma, CandidateClass, GammaInputs, INF_HOPS};
use crate::game::{CopStrategy, GameConfig, RoundInfo};
use crate::geometry::{crown_pair_strip, Point, Strip};
use crate::rgg::{GraphInstance, Region, VertexId};
use crate::rng::Stream;
use serde::Serialize;

/// A square of arbitrary orientation: `angle` is the rotation of its sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrientedSquare {
    pub center: Point,
    pub side: f64,
    pub angle: f64,
}

impl OrientedSquare {
    pub fn whole_torus(l: f64) -> Self {
        OrientedSquare {
            center: Point::new(l / 2.0, l / 2.0),
            side: l,
            angle: 0.0,
        }
    }

    pub fn covers_torus(&self, l: f64) -> bool {
        self.side >= l
    }

    /// Wrap-aware membership with a shrink margin: the point must lie at
    /// least `margin` inside every border.
    pub fn contains_with_margin(&self, g: &GraphInstance, p: Point, margin: f64) -> bool {
        if self.covers_torus(g.side()) && g.wraps() {
            return true;
        }
        let (dx, dy) = match g.metric() {
            crate::rgg::MetricMode::Torus => {
                let t = g.torus();
                (t.delta(self.center.x, p.x), t.delta(self.center.y, p.y))
            }
            crate::rgg::MetricMode::Square => (p.x - self.center.x, p.y - self.center.y),
        };
        let (sin, cos) = self.angle.sin_cos();
        let u = dx * cos + dy * sin;
        let v = -dx * sin + dy * cos;
        let half = self.side / 2.0 - margin;
        u.abs() <= half + 1e-9 && v.abs() <= half + 1e-9
    }

    pub fn contains(&self, g: &GraphInstance, p: Point) -> bool {
        self.contains_with_margin(g, p, 0.0)
    }

    /// Planar membership (no wrap), for geometry-only validation.
    pub fn contains_planar_with_margin(&self, p: Point, margin: f64) -> bool {
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        let (sin, cos) = self.angle.sin_cos();
        let u = dx * cos + dy * sin;
        let v = -dx * sin + dy * cos;
        let half = self.side / 2.0 - margin;
        u.abs() <= half + 1e-9 && v.abs() <= half + 1e-9
    }

    /// Corners of the concentric square of side `factor * side`, in absolute
    /// (unwrapped) planar coordinates, order A, B, C, D counterclockwise
    /// from the bottom-left.
    pub fn scaled_corners(&self, factor: f64) -> [Point; 4] {
        let h = factor * self.side / 2.0;
        let (sin, cos) = self.angle.sin_cos();
        let rot = |x: f64, y: f64| {
            Point::new(
                self.center.x + x * cos - y * sin,
                self.center.y + x * sin + y * cos,
            )
        };
        [rot(-h, -h), rot(h, -h), rot(h, h), rot(-h, h)]
    }
}

/// Coarse localization phase: probe nearest vertices to a
/// `grid_divisions x grid_divisions` grid, then center a side-`L/9` square
/// on the sensor that reported the smallest reading.
#[derive(Debug)]
pub struct GridProbe {
    snapped: Vec<VertexId>,
    cursor: usize,
    best: Option<(u32, VertexId)>,
    trivial: bool,
    flags: Vec<String>,
    last_emitted: Option<Vec<VertexId>>,
}

impl GridProbe {
    pub fn new(g: &GraphInstance, constants: &ConstantsProfile) -> Result<Self, StrategyError> {
        let l = g.side();
        let r = g.r();
        if r >= l / constants.loc_square_coef || g.n() == 0 {
            // The whole torus already fits in a side loc_square_coef * r
            // square: zero probe rounds.
            return Ok(GridProbe {
                snapped: Vec::new(),
                cursor: 0,
                best: None,
                trivial: true,
                flags: Vec::new(),
                last_emitted: None,
            });
        }
        let div = constants.grid_divisions;
        let snap_bound = 2.0 * ((g.n().max(2) as f64).ln()).sqrt();
        let mut snapped = Vec::with_capacity((div * div) as usize);
        let mut flags = Vec::new();
        let mut flagged = false;
        for i in 0..div {
            for j in 0..div {
                let h = Point::new(f64::from(i) * l / f64::from(div), f64::from(j) * l / f64::from(div));
                let (v, d) = g.nearest_vertex(h)?;
                if d > snap_bound && !flagged {
                    flags.push(format!(
                        "probe-snap-distance {d:.3} exceeds 2 sqrt(log n) = {snap_bound:.3}"
                    ));
                    flagged = true;
                }
                snapped.push(v);
            }
        }
        Ok(GridProbe {
            snapped,
            cursor: 0,
            best: None,
            trivial: false,
            flags,
            last_emitted: None,
        })
    }

    pub fn finished(&self) -> bool {
        self.trivial || self.cursor >= self.snapped.len()
    }

    /// Rounds this probe will consume for a given sensors-per-round count.
    pub fn rounds(&self, k: usize) -> usize {
        if self.trivial || k == 0 {
            0
        } else {
            self.snapped.len().div_ceil(k)
        }
    }

    fn digest_last(&mut self, info: &RoundInfo) {
        let Some(sensors) = self.last_emitted.take() else {
            return;
        };
        match &info.readings {
            Some(sig) => {
                for (i, &s) in sensors.iter().enumerate() {
                    let d = sig.0[i];
                    if d == INF_HOPS {
                        continue;
                    }
                    let better = match self.best {
                        None => true,
                        Some((bd, bv)) => d < bd || (d == bd && s < bv),
                    };
                    if better {
                        self.best = Some((d, s));
                    }
                }
            }
            None => self
                .flags
                .push("probe-readings-unavailable".to_string()),
        }
    }

    fn emit(&mut self, k: usize) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(k);
        let start = self.cursor;
        for i in 0..k {
            let idx = start + i;
            if idx < self.snapped.len() {
                out.push(self.snapped[idx]);
            } else {
                // Pad the final group by repeating its first sensor.
                out.push(*out.first().unwrap_or(&self.snapped[0]));
            }
        }
        self.cursor = (start + k).min(self.snapped.len());
        self.last_emitted = Some(out.clone());
        out
    }

    /// Containment square after the probe: side `L/9` centered on the
    /// minimum-reading sensor, whole torus when trivial or no reading.
    pub fn square(&self, g: &GraphInstance) -> OrientedSquare {
        let l = g.side();
        match self.best {
            Some((_, v)) if !self.trivial => OrientedSquare {
                center: g.position(v),
                side: l / 9.0,
                angle: 0.0,
            },
            _ => OrientedSquare::whole_torus(l),
        }
    }
}

impl CopStrategy for GridProbe {
    fn next_sensors(
        &mut self,
        _g: &GraphInstance,
        cfg: &GameConfig,
        history: &[RoundInfo],
    ) -> Vec<VertexId> {
        if let Some(last) = history.last() {
            self.digest_last(last);
        }
        if self.finished() || cfg.k == 0 {
            // Probe over; keep re-probing the first group (standalone use).
            return vec![self.snapped.first().copied().unwrap_or(0); cfg.k];
        }
        self.emit(cfg.k)
    }

    fn phase(&self) -> Option<String> {
        Some("probe".to_string())
    }

    fn take_flags(&mut self) -> Vec<String> {
        std::mem::take(&mut self.flags)
    }
}

/// Result of one four-sensor shrink round.
#[derive(Debug, Clone)]
pub struct QuadOutcome {
    pub square: OrientedSquare,
    pub strips: (Strip, Strip),
    pub rhos: [f64; 4],
}

/// One shrink step: convert four corner readings into crowns, bound the two
/// crown-pair intersections by strips along the diagonals, and intersect the
/// strips into a square of a quarter the side with the margin restored.
pub fn quadrilaterate_step(
    g: &GraphInstance,
    square: &OrientedSquare,
    readings: [u32; 4],
    constants: &ConstantsProfile,
) -> Result<QuadOutcome, StrategyError> {
    let torus = g.wraps().then(|| *g.torus());
    quadrilaterate_geometry(
        g.r(),
        g.n() as u64,
        square,
        readings,
        constants,
        torus.as_ref(),
    )
}

/// Graph-free core of the shrink step, usable at synthetic scales where no
/// instance of matching density can exist.
pub fn quadrilaterate_geometry(
    r: f64,
    n_for_log: u64,
    square: &OrientedSquare,
    readings: [u32; 4],
    constants: &ConstantsProfile,
    torus: Option<&crate::geometry::TorusBox>,
) -> Result<QuadOutcome, StrategyError> {
    let s = square.side;
    if readings.iter().any(|&d| d == INF_HOPS || d == 0) {
        return Err(StrategyError::ShrinkFailed(
            "corner reading unusable (unreachable or zero)".into(),
        ));
    }
    let gam = gamma(&GammaInputs {
        r,
        d_e: 2.0f64.sqrt() * s,
        n: n_for_log,
    });
    let denom = 1.0 + gam * r.powf(-4.0 / 3.0);
    let slack = 2.0 * ((n_for_log.max(2) as f64).ln()).sqrt();
    let rho = |d: u32| (r * (f64::from(d) - 1.0) / denom - slack).max(0.0);
    let rhos = [
        rho(readings[0]),
        rho(readings[1]),
        rho(readings[2]),
        rho(readings[3]),
    ];
    let [a, b, c, d] = square.scaled_corners(3.0);
    let strip_bd = crown_pair_strip(b, d, rhos[1], rhos[3], s)
        .map_err(|e| StrategyError::ShrinkFailed(format!("diagonal BD: {e}")))?;
    let strip_ac = crown_pair_strip(a, c, rhos[0], rhos[2], s)
        .map_err(|e| StrategyError::ShrinkFailed(format!("diagonal AC: {e}")))?;

    // Intersection of the two strip axes (they are perpendicular).
    let cross = strip_ac.direction.x * strip_bd.direction.y
        - strip_ac.direction.y * strip_bd.direction.x;
    if cross.abs() < 1e-12 {
        return Err(StrategyError::ShrinkFailed("parallel strips".into()));
    }
    let wx = strip_bd.anchor.x - strip_ac.anchor.x;
    let wy = strip_bd.anchor.y - strip_ac.anchor.y;
    let t = (wx * strip_bd.direction.y - wy * strip_bd.direction.x) / cross;
    let center = Point::new(
        strip_ac.anchor.x + t * strip_ac.direction.x,
        strip_ac.anchor.y + t * strip_ac.direction.y,
    );
    let center = match torus {
        Some(tb) => tb.canonicalize(center),
        None => center,
    };
    Ok(QuadOutcome {
        square: OrientedSquare {
            center,
            side: s / constants.shrink_guard,
            angle: square.angle + std::f64::consts::FRAC_PI_4,
        },
        strips: (strip_ac, strip_bd),
        rhos,
    })
}

/// Which branch of the sensor-budget table applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaBranch {
    Dense,
    Mid,
    Sparse,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeltaRegime {
    pub delta: f64,
    pub w_budget: f64,
    pub branch: DeltaBranch,
}

/// Sampling probability and sensor budget per radius regime:
/// `(r^{-2/3}, 1e15 r^{4/3})` for `r >= log^{3/2} n`,
/// `(log^2 n / r^2, 3e16 log^2 n)` for `100 log n <= r < log^{3/2} n`, and
/// `(1, 2e10 r^2)` below.
pub fn delta_regime(r: f64, n: u64) -> DeltaRegime {
    let ln = (n.max(2) as f64).ln();
    if r >= ln.powf(1.5) {
        DeltaRegime {
            delta: r.powf(-2.0 / 3.0),
            w_budget: 1e15 * r.powf(4.0 / 3.0),
            branch: DeltaBranch::Dense,
        }
    } else if r >= 100.0 * ln {
        DeltaRegime {
            delta: ln * ln / (r * r),
            w_budget: 3e16 * ln * ln,
            branch: DeltaBranch::Mid,
        }
    } else {
        DeltaRegime {
            delta: 1.0,
            w_budget: 2e10 * r * r,
            branch: DeltaBranch::Sparse,
        }
    }
}

/// Axis-aligned tessellation square (side `family_square_coef * r`, stepped
/// by a tenth of the side).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilySquare {
    pub min: Point,
    pub side: f64,
}

impl FamilySquare {
    /// The internal square: same center, side shrunk by `2r`. A square
    /// covering the whole torus has no border, so it is its own interior.
    pub fn inner(&self, g: &GraphInstance) -> (Point, f64) {
        let l = g.side();
        if self.side >= l && g.wraps() {
            return (self.min, self.side);
        }
        let r = g.r();
        let min = Point::new(self.min.x + r, self.min.y + r);
        let min = if g.wraps() {
            g.torus().canonicalize(min)
        } else {
            min
        };
        (min, (self.side - 2.0 * r).max(0.0))
    }

    pub fn vertices(&self, g: &GraphInstance) -> Vec<VertexId> {
        g.vertices_in(&Region::Square {
            min: self.min,
            side: self.side,
        })
    }

    pub fn inner_vertices(&self, g: &GraphInstance) -> Vec<VertexId> {
        let (min, side) = self.inner(g);
        g.vertices_in(&Region::Square { min, side })
    }

    pub fn inner_contains_with_margin(&self, g: &GraphInstance, p: Point, margin: f64) -> bool {
        let l = g.side();
        if self.side >= l && g.wraps() {
            return true;
        }
        let (min, side) = self.inner(g);
        let (dx, dy) = if g.wraps() {
            (
                (p.x - min.x).rem_euclid(l),
                (p.y - min.y).rem_euclid(l),
            )
        } else {
            (p.x - min.x, p.y - min.y)
        };
        dx >= margin && dx <= side - margin && dy >= margin && dy <= side - margin
    }
}

/// The tessellation family: squares of side `family_square_coef * r` with
/// min corners on a grid stepped by a tenth of the side. Collapses to one
/// whole-torus square once the side reaches the torus.
pub fn family_squares(g: &GraphInstance, constants: &ConstantsProfile) -> Vec<FamilySquare> {
    let l = g.side();
    let side = constants.family_square_coef * g.r();
    if side >= l {
        return vec![FamilySquare {
            min: Point::new(0.0, 0.0),
            side: l,
        }];
    }
    let step = side / 10.0;
    let count = (l / step).ceil() as u32;
    let mut out = Vec::new();
    for i in 0..count {
        for j in 0..count {
            let x = f64::from(i) * step;
            let y = f64::from(j) * step;
            if x < l && y < l {
                out.push(FamilySquare {
                    min: Point::new(x, y),
                    side,
                });
            }
        }
    }
    out
}

/// A sensor set distinguishing every vertex of the internal square: a
/// delta-sample `X` of the square's vertices patched by the set `Y` of all
/// members of non-singleton `X`-signature classes.
#[derive(Debug, Clone, Serialize)]
pub struct DistinguishingSet {
    pub x: Vec<VertexId>,
    pub y: Vec<VertexId>,
    pub w: Vec<VertexId>,
    pub square: FamilySquare,
    pub delta: f64,
    pub w_budget: f64,
    pub inner_count: usize,
}

impl DistinguishingSet {
    pub fn within_budget(&self) -> bool {
        (self.w.len() as f64) <= self.w_budget
    }
}

/// Build and verify a distinguishing set for one tessellation square.
/// The construction cannot fail to distinguish (Y patches every colliding
/// class); the verification pass runs anyway, through the reversed-anchor
/// partition path rather than the construction's.
pub fn build_distinguishing_set(
    g: &GraphInstance,
    square: &FamilySquare,
    delta: f64,
    seed: u64,
) -> Result<DistinguishingSet, StrategyError> {
    assert!(delta > 0.0 && delta <= 1.0, "delta must be in (0, 1]");
    let s_vertices = square.vertices(g);
    let mut stream = Stream::new(seed, "dset-sample", 0);
    let x: Vec<VertexId> = s_vertices
        .iter()
        .copied()
        .filter(|_| stream.bernoulli(delta))
        .collect();
    let inner = square.inner_vertices(g);
    let inner_count = inner.len();
    let y: Vec<VertexId> = if inner.is_empty() {
        Vec::new()
    } else {
        let scope = CandidateClass::from_sorted(inner.clone());
        let parts = partition_scoped(g, &scope, &x)?;
        let mut y: Vec<VertexId> = parts
            .into_classes()
            .into_iter()
            .filter(|c| c.len() > 1)
            .flat_map(|c| c.members().to_vec())
            .collect();
        y.sort_unstable();
        y
    };
    let mut w = x.clone();
    w.extend_from_slice(&y);
    w.sort_unstable();
    w.dedup();

    if !inner.is_empty() && !w.is_empty() {
        let scope = CandidateClass::from_sorted(inner);
        if !verify_unique_signatures(g, &scope, &w)? {
            return Err(StrategyError::VerificationFailed);
        }
    } else if inner_count > 1 {
        // Nonempty interior with an empty sensor set cannot distinguish.
        return Err(StrategyError::VerificationFailed);
    }

    Ok(DistinguishingSet {
        x,
        y,
        w,
        square: *square,
        delta,
        w_budget: delta_regime(g.r(), g.n() as u64).w_budget,
        inner_count,
    })
}

enum CopState {
    Probe,
    Quad {
        square: OrientedSquare,
        pending: Option<([VertexId; 4], OrientedSquare)>,
        failures: u32,
    },
    Endgame {
        square_idx: usize,
        w_order: Vec<VertexId>,
        cursor: usize,
    },
}

/// The full cop strategy: probe grid, four-sensor shrinking until the square
/// side reaches `loc_square_coef * r`, then a distinguishing set placed in
/// one round when `k >= |W|` and in chunks of `k` otherwise (the chunked
/// extension is flagged in the transcript).
pub struct CompositeCop {
    constants: ConstantsProfile,
    seed: u64,
    probe: GridProbe,
    state: CopState,
    family: Vec<FamilySquare>,
    dsets: std::collections::HashMap<usize, DistinguishingSet>,
    flags: Vec<String>,
    phase_label: String,
    chunk_flagged: bool,
    /// Containment-violation count observed across shrink rounds.
    pub leaks: u32,
    /// Shrink rounds executed.
    pub shrink_rounds: u32,
}

impl CompositeCop {
    pub fn new(
        g: &GraphInstance,
        profile: crate::rgg::Profile,
        seed: u64,
    ) -> Result<Self, StrategyError> {
        let constants = ConstantsProfile::for_profile(profile);
        let probe = GridProbe::new(g, &constants)?;
        let family = family_squares(g, &constants);
        Ok(CompositeCop {
            constants,
            seed,
            probe,
            state: CopState::Probe,
            family,
            dsets: std::collections::HashMap::new(),
            flags: Vec::new(),
            phase_label: "probe".to_string(),
            chunk_flagged: false,
            leaks: 0,
            shrink_rounds: 0,
        })
    }

    /// Size of the distinguishing set used by the endgame, once built.
    pub fn required_w(&self) -> Option<usize> {
        if let CopState::Endgame { square_idx, .. } = &self.state {
            self.dsets.get(square_idx).map(|d| d.w.len())
        } else {
            None
        }
    }

    pub fn distinguishing_set(&self) -> Option<&DistinguishingSet> {
        if let CopState::Endgame { square_idx, .. } = &self.state {
            self.dsets.get(square_idx)
        } else {
            None
        }
    }

    fn snap_corner(&mut self, g: &GraphInstance, corner: Point) -> VertexId {
        let q = if g.wraps() {
            g.torus().canonicalize(corner)
        } else {
            corner
        };
        let (v, d) = g.nearest_vertex(q).expect("nonempty instance");
        let bound = 2.0 * ((g.n().max(2) as f64).ln()).sqrt();
        if d > bound {
            self.flags.push(format!(
                "corner-snap-distance {d:.3} exceeds 2 sqrt(log n) = {bound:.3}"
            ));
        }
        v
    }

    fn find_family_square(&mut self, g: &GraphInstance, class: &CandidateClass) -> usize {
        let r = g.r();
        for (i, sq) in self.family.iter().enumerate() {
            let ok = class
                .members()
                .iter()
                .all(|&v| sq.inner_contains_with_margin(g, g.position(v), r));
            if ok {
                return i;
            }
        }
        self.flags
            .push("endgame-anchor: no tessellation square contains the class with margin".into());
        0
    }

    fn build_endgame(&mut self, g: &GraphInstance, class: &CandidateClass) -> CopState {
        let square_idx = self.find_family_square(g, class);
        if !self.dsets.contains_key(&square_idx) {
            let regime = delta_regime(g.r(), g.n() as u64);
            match build_distinguishing_set(g, &self.family[square_idx], regime.delta, self.seed) {
                Ok(dset) => {
                    if !dset.within_budget() {
                        self.flags.push(format!(
                            "distinguishing set exceeds budget: |W| = {} > {}",
                            dset.w.len(),
                            dset.w_budget
                        ));
                    }
                    self.dsets.insert(square_idx, dset);
                }
                Err(e) => {
                    self.flags
                        .push(format!("distinguishing-set construction failed: {e}"));
                    self.dsets.insert(
                        square_idx,
                        DistinguishingSet {
                            x: Vec::new(),
                            y: Vec::new(),
                            w: (0..g.n() as u32).collect(),
                            square: self.family[square_idx],
                            delta: 1.0,
                            w_budget: delta_regime(g.r(), g.n() as u64).w_budget,
                            inner_count: 0,
                        },
                    );
                }
            }
        }
        let dset = &self.dsets[&square_idx];
        // Patch sensors first, then the random sample.
        let mut w_order = dset.y.clone();
        let yset: std::collections::HashSet<VertexId> = dset.y.iter().copied().collect();
        w_order.extend(dset.x.iter().copied().filter(|v| !yset.contains(v)));
        if w_order.is_empty() {
            w_order.push(class.min_id());
        }
        CopState::Endgame {
            square_idx,
            w_order,
            cursor: 0,
        }
    }

    fn digest(&mut self, g: &GraphInstance, history: &[RoundInfo]) {
        let Some(last) = history.last() else { return };
        match &mut self.state {
            CopState::Probe => {
                self.probe.digest_last(last);
                self.flags.extend(self.probe.take_flags());
                if self.probe.finished() {
                    let square = self.probe.square(g);
                    // Flag if the revealed class already escapes the square.
                    let leak = last
                        .chosen_class()
                        .members()
                        .iter()
                        .any(|&v| !square.contains_with_margin(g, g.position(v), g.r()));
                    if leak {
                        self.leaks += 1;
                        self.flags.push("probe-containment-leak".into());
                    }
                    self.state = CopState::Quad {
                        square,
                        pending: None,
                        failures: 0,
                    };
                }
            }
            CopState::Quad {
                square,
                pending,
                failures,
            } => {
                if let Some((sensors, old_square)) = pending.take() {
                    self.shrink_rounds += 1;
                    let readings = match &last.readings {
                        Some(sig) => {
                            let mut rd = [0u32; 4];
                            debug_assert!(last.sensors[..4] == sensors[..]);
                            rd.copy_from_slice(&sig.0[..4]);
                            Some(rd)
                        }
                        None => None,
                    };
                    let step = readings.ok_or(()).and_then(|rd| {
                        quadrilaterate_step(g, &old_square, rd, &self.constants).map_err(|e| {
                            self.flags.push(format!("shrink failed: {e}"));
                        })
                    });
                    match step {
                        Ok(out) => {
                            let leak = last
                                .chosen_class()
                                .members()
                                .iter()
                                .any(|&v| {
                                    !out.square.contains_with_margin(g, g.position(v), g.r())
                                });
                            if leak {
                                self.leaks += 1;
                                self.flags.push(format!(
                                    "quadrilaterate-containment-leak at side {:.3}",
                                    out.square.side
                                ));
                            }
                            *square = out.square;
                            *failures = 0;
                        }
                        Err(()) => {
                            *failures += 1;
                        }
                    }
                }
            }
            CopState::Endgame { .. } => {}
        }
    }

    fn current_class(history: &[RoundInfo], g: &GraphInstance) -> CandidateClass {
        match history.last() {
            Some(info) => info.chosen_class().clone(),
            None => CandidateClass::from_sorted((0..g.n() as VertexId).collect()),
        }
    }
}

impl CopStrategy for CompositeCop {
    fn next_sensors(
        &mut self,
        g: &GraphInstance,
        cfg: &GameConfig,
        history: &[RoundInfo],
    ) -> Vec<VertexId> {
        self.digest(g, history);
        loop {
            match &mut self.state {
                CopState::Probe => {
                    if self.probe.finished() {
                        // Trivial probe: whole-torus square, zero rounds.
                        self.state = CopState::Quad {
                            square: self.probe.square(g),
                            pending: None,
                            failures: 0,
                        };
                        continue;
                    }
                    if cfg.k == 0 {
                        self.phase_label = "probe".into();
                        return Vec::new();
                    }
                    self.phase_label = "probe".into();
                    return self.probe.emit(cfg.k);
                }
                CopState::Quad {
                    square, failures, ..
                } => {
                    let done = square.side <= self.constants.loc_square_coef * g.r() * (1.0 + 1e-12)
                        || *failures >= 3
                        || cfg.k < 4;
                    if cfg.k < 4 && square.side > self.constants.loc_square_coef * g.r() {
                        self.flags
                            .push("shrink phase skipped: needs k >= 4".into());
                    }
                    if done {
                        let class = Self::current_class(history, g);
                        self.state = self.build_endgame(g, &class);
                        continue;
                    }
                    let sq = *square;
                    let corners = sq.scaled_corners(3.0);
                    let sensors: Vec<VertexId> = corners
                        .iter()
                        .map(|&c| self.snap_corner(g, c))
                        .collect();
                    let mut padded = sensors.clone();
                    while padded.len() < cfg.k {
                        padded.push(sensors[padded.len() % 4]);
                    }
                    if let CopState::Quad { pending, .. } = &mut self.state {
                        *pending = Some((
                            [sensors[0], sensors[1], sensors[2], sensors[3]],
                            sq,
                        ));
                    }
                    self.phase_label = "quadrilaterate".into();
                    return padded;
                }
                CopState::Endgame {
                    w_order, cursor, ..
                } => {
                    self.phase_label = "endgame".into();
                    if cfg.k == 0 {
                        return Vec::new();
                    }
                    if cfg.k < w_order.len() && !self.chunk_flagged {
                        self.chunk_flagged = true;
                        self.flags.push(format!(
                            "endgame-chunked: k = {} below |W| = {}",
                            cfg.k,
                            w_order.len()
                        ));
                    }
                    let mut out = Vec::with_capacity(cfg.k);
                    for i in 0..cfg.k {
                        out.push(w_order[(*cursor + i) % w_order.len()]);
                    }
                    *cursor = (*cursor + cfg.k) % w_order.len();
                    return out;
                }
            }
        }
    }

    fn phase(&self) -> Option<String> {
        Some(self.phase_label.clone())
    }

    fn take_flags(&mut self) -> Vec<String> {
        std::mem::take(&mut self.flags)
    }
}

/// Adversarial baseline: spends every sensor inside a fixed target set each
/// round, cycling through it in chunks of `k`.
#[derive(Debug)]
pub struct FloodingCop {
    targets: Vec<VertexId>,
    cursor: usize,
}

impl FloodingCop {
    pub fn new(mut targets: Vec<VertexId>) -> Self {
        targets.sort_unstable();
        targets.dedup();
        FloodingCop { targets, cursor: 0 }
    }
}

impl CopStrategy for FloodingCop {
    fn next_sensors(
        &mut self,
        _g: &GraphInstance,
        cfg: &GameConfig,
        _history: &[RoundInfo],
    ) -> Vec<VertexId> {
        if self.targets.is_empty() {
            return vec![0; cfg.k];
        }
        let mut out = Vec::with_capacity(cfg.k);
        for i in 0..cfg.k {
            out.push(self.targets[(self.cursor + i) % self.targets.len()]);
        }
        self.cursor = (self.cursor + cfg.k) % self.targets.len().max(1);
        out
    }

    fn phase(&self) -> Option<String> {
        Some("flooding".to_string())
    }
}
