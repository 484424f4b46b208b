//! Random geometric graph instances on the torus (or square): sampling,
//! implicit adjacency through a cell grid, spatial queries, serialization.

mod grid;
mod io;

pub use grid::CellGrid;
pub use io::same_adjacency;

use crate::geometry::{Ball, Point, TorusBox};
use crate::rng::Stream;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;

pub type VertexId = u32;

#[derive(Debug, thiserror::Error)]
pub enum RggError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("vertex id {id} out of range (instance has {n} vertices)")]
    InvalidVertex { id: VertexId, n: usize },
    #[error("operation requires a nonempty instance")]
    EmptyInstance,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed graph file: {0}")]
    Malformed(String),
    #[error("vertex count mismatch: header says {expected}, file has {found}")]
    CountMismatch { expected: u64, found: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Binomial,
    Poisson,
}

impl fmt::Display for SampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SampleMode::Binomial => "binomial",
            SampleMode::Poisson => "poisson",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricMode {
    Torus,
    Square,
}

impl fmt::Display for MetricMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricMode::Torus => "torus",
            MetricMode::Square => "square",
        })
    }
}

/// Which constant set drives strategy parameters: the literal constants of
/// the analysis, or desk-scale stand-ins that exercise the same mechanics on
/// instances that fit in memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Paper,
    Desk,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Paper => "paper",
            Profile::Desk => "desk",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u64,
    pub r: f64,
    pub mode: SampleMode,
    pub metric: MetricMode,
    pub seed: u64,
    pub profile: Profile,
}

impl ModelParams {
    pub fn new(n: u64, r: f64, seed: u64) -> Self {
        ModelParams {
            n,
            r,
            mode: SampleMode::Binomial,
            metric: MetricMode::Torus,
            seed,
            profile: Profile::Desk,
        }
    }

    pub fn validate(&self) -> Result<(), RggError> {
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(RggError::InvalidParams(format!(
                "radius must be positive and finite, got {}",
                self.r
            )));
        }
        Ok(())
    }

    /// Connectivity-scale lower radius `r0 = 70 sqrt(log n)` checked by the
    /// paper profile.
    pub fn r0(&self) -> f64 {
        70.0 * ((self.n.max(2) as f64).ln()).sqrt()
    }

    /// Non-fatal parameter warnings (paper-profile range checks).
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.profile == Profile::Paper && self.n >= 2 {
            let side = (self.n as f64).sqrt();
            let r0 = self.r0();
            if self.r < r0 || self.r >= side / 4.0 {
                out.push(format!(
                    "paper profile expects r in [{r0:.3}, {:.3}), got r = {}",
                    side / 4.0,
                    self.r
                ));
            }
        }
        out
    }
}

/// Immutable random geometric graph instance: point set on the side-`L`
/// square plus a cell grid giving implicit adjacency at radius `r`.
#[derive(Debug)]
pub struct GraphInstance {
    torus: TorusBox,
    r: f64,
    metric: MetricMode,
    mode: SampleMode,
    seed: u64,
    positions: Vec<Point>,
    grid: CellGrid,
    /// Finer index built on demand for traversal workloads.
    fine: OnceLock<CellGrid>,
}

/// Query region for [`GraphInstance::vertices_in`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Ball(Ball),
    /// Axis-aligned square given by its min corner and side. On the torus the
    /// square wraps; `side >= L` covers everything.
    Square { min: Point, side: f64 },
}

pub fn sample_instance(params: &ModelParams) -> Result<GraphInstance, RggError> {
    params.validate()?;
    let side = (params.n.max(1) as f64).sqrt();
    let count = match params.mode {
        SampleMode::Binomial => params.n,
        SampleMode::Poisson => {
            if params.n == 0 {
                0
            } else {
                let mut stream = Stream::new(params.seed, "poisson-count", 0);
                let dist = rand_distr::Poisson::new(params.n as f64)
                    .map_err(|e| RggError::InvalidParams(format!("poisson mean: {e}")))?;
                dist.sample(&mut stream) as u64
            }
        }
    };
    let mut stream = Stream::new(params.seed, "positions", 0);
    let positions: Vec<Point> = (0..count)
        .map(|_| Point::new(stream.uniform(side), stream.uniform(side)))
        .collect();
    Ok(GraphInstance::from_parts(
        side,
        params.r,
        params.metric,
        params.mode,
        params.seed,
        positions,
    ))
}

impl GraphInstance {
    /// Assemble an instance from explicit positions (used by sampling, file
    /// loading, and hand-built fixtures). Positions must be canonical in
    /// `[0, side)`.
    pub fn from_parts(
        side: f64,
        r: f64,
        metric: MetricMode,
        mode: SampleMode,
        seed: u64,
        positions: Vec<Point>,
    ) -> GraphInstance {
        let torus = TorusBox::new(side).expect("positive side");
        let grid = CellGrid::build(&positions, side, r.min(side).max(side * 1e-9));
        GraphInstance {
            torus,
            r,
            metric,
            mode,
            seed,
            positions,
            grid,
            fine: OnceLock::new(),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.positions.len()
    }

    #[inline]
    pub fn r(&self) -> f64 {
        self.r
    }

    #[inline]
    pub fn side(&self) -> f64 {
        self.torus.side()
    }

    #[inline]
    pub fn torus(&self) -> &TorusBox {
        &self.torus
    }

    #[inline]
    pub fn metric(&self) -> MetricMode {
        self.metric
    }

    #[inline]
    pub fn mode(&self) -> SampleMode {
        self.mode
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    #[inline]
    pub fn position(&self, v: VertexId) -> Point {
        self.positions[v as usize]
    }

    #[inline]
    pub fn grid(&self) -> &CellGrid {
        &self.grid
    }

    /// Finer cell grid for traversal workloads, built once on first use.
    pub fn fine_grid(&self) -> &CellGrid {
        self.fine.get_or_init(|| {
            let target = self.r.min(8.0).min(self.side()).max(self.side() * 1e-9);
            CellGrid::build(&self.positions, self.side(), target)
        })
    }

    #[inline]
    pub fn wraps(&self) -> bool {
        self.metric == MetricMode::Torus
    }

    /// Squared metric distance between two points of the instance space.
    #[inline]
    pub fn dist2(&self, p: Point, q: Point) -> f64 {
        match self.metric {
            MetricMode::Torus => self.torus.dist2(p, q),
            MetricMode::Square => p.dist2(q),
        }
    }

    #[inline]
    pub fn distance(&self, p: Point, q: Point) -> f64 {
        self.dist2(p, q).sqrt()
    }

    #[inline]
    pub fn vertex_dist2(&self, u: VertexId, v: VertexId) -> f64 {
        self.dist2(self.positions[u as usize], self.positions[v as usize])
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), RggError> {
        if (v as usize) < self.positions.len() {
            Ok(())
        } else {
            Err(RggError::InvalidVertex {
                id: v,
                n: self.positions.len(),
            })
        }
    }

    /// Visit every vertex within metric distance `radius` of `center`
    /// (including vertices at the center itself).
    pub fn for_each_in_ball<F: FnMut(VertexId)>(&self, center: Point, radius: f64, mut f: F) {
        let grid = &self.grid;
        let rad_cells = (radius / grid.cell_side()).ceil() as u32;
        let (row, col) = grid.cell_of(center);
        let r2 = radius * radius;
        grid.for_each_cell_near(row, col, rad_cells, self.wraps(), |rr, cc| {
            for &v in grid.ids_in(rr, cc) {
                if self.dist2(self.positions[v as usize], center) <= r2 {
                    f(v);
                }
            }
        });
    }

    /// Exactly the vertices `u != v` with metric distance at most `r`, in
    /// ascending id order.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>, RggError> {
        self.check_vertex(v)?;
        let mut out = Vec::new();
        let pos = self.positions[v as usize];
        self.for_each_in_ball(pos, self.r, |u| {
            if u != v {
                out.push(u);
            }
        });
        out.sort_unstable();
        Ok(out)
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, RggError> {
        Ok(self.neighbors(v)?.len())
    }

    /// Vertex minimizing metric distance to `x`; ties broken by smallest id.
    pub fn nearest_vertex(&self, x: Point) -> Result<(VertexId, f64), RggError> {
        if self.positions.is_empty() {
            return Err(RggError::EmptyInstance);
        }
        let grid = &self.grid;
        let m = grid.cells_per_axis();
        let (row, col) = grid.cell_of(self.canonical(x));
        let cs = grid.cell_side();
        let mut best: Option<(f64, VertexId)> = None;
        let mut ring: u32 = 0;
        loop {
            let mut visit = |rr: u32, cc: u32| {
                for &v in grid.ids_in(rr, cc) {
                    let d2 = self.dist2(self.positions[v as usize], x);
                    match best {
                        None => best = Some((d2, v)),
                        Some((bd2, bid)) => {
                            if d2 < bd2 || (d2 == bd2 && v < bid) {
                                best = Some((d2, v));
                            }
                        }
                    }
                }
            };
            // Ring `ring` of the Chebyshev block.
            if ring == 0 {
                visit(row, col);
            } else {
                self.for_each_ring_cell(row, col, ring, &mut visit);
            }
            let covered_all = 2 * u64::from(ring) + 1 >= u64::from(m);
            if covered_all {
                break;
            }
            if let Some((bd2, _)) = best {
                // Cells in ring k are at least (k-1) * cell_side away.
                let lower = f64::from(ring) * cs - cs;
                if lower > 0.0 && lower * lower > bd2 {
                    break;
                }
            }
            ring += 1;
        }
        let (d2, v) = best.expect("nonempty instance");
        Ok((v, d2.sqrt()))
    }

    fn for_each_ring_cell<F: FnMut(u32, u32)>(&self, row: u32, col: u32, k: u32, f: &mut F) {
        let m = i64::from(self.grid.cells_per_axis());
        let wrap = self.wraps();
        let k = i64::from(k);
        let emit = |rr: i64, cc: i64, f: &mut F| {
            let rr = if wrap {
                rr.rem_euclid(m)
            } else if (0..m).contains(&rr) {
                rr
            } else {
                return;
            };
            let cc = if wrap {
                cc.rem_euclid(m)
            } else if (0..m).contains(&cc) {
                cc
            } else {
                return;
            };
            f(rr as u32, cc as u32);
        };
        let (row, col) = (i64::from(row), i64::from(col));
        // Guard against revisiting cells when the ring wraps around: only
        // call this with 2k+1 <= m (checked by the caller loop).
        for dc in -k..=k {
            emit(row - k, col + dc, f);
            emit(row + k, col + dc, f);
        }
        for dr in (-k + 1)..=(k - 1) {
            emit(row + dr, col - k, f);
            emit(row + dr, col + k, f);
        }
    }

    fn canonical(&self, p: Point) -> Point {
        match self.metric {
            MetricMode::Torus => self.torus.canonicalize(p),
            MetricMode::Square => p,
        }
    }

    /// Exact membership query, ascending ids.
    pub fn vertices_in(&self, region: &Region) -> Vec<VertexId> {
        let mut out = Vec::new();
        match *region {
            Region::Ball(ball) => {
                self.for_each_in_ball(ball.center, ball.radius, |v| out.push(v));
            }
            Region::Square { min, side } => {
                if side >= self.side() {
                    return (0..self.positions.len() as u32).collect();
                }
                let l = self.side();
                for (v, p) in self.positions.iter().enumerate() {
                    let inside = if self.wraps() {
                        let dx = (p.x - min.x).rem_euclid(l);
                        let dy = (p.y - min.y).rem_euclid(l);
                        dx <= side && dy <= side
                    } else {
                        p.x >= min.x && p.x <= min.x + side && p.y >= min.y && p.y <= min.y + side
                    };
                    if inside {
                        out.push(v as u32);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}
