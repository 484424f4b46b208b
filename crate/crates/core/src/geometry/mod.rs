//! Planar and toroidal geometry: discs, crowns, strips, annuli and
//! circular-arc boundaries, plus Monte Carlo area estimation.
//!
//! Everything is 64-bit floating point. Predicate tolerances are fixed here
//! so that tests are deterministic: lengths compare at [`LEN_TOL`] absolute
//! (on problem-scaled coordinates) and angles at [`ANG_TOL`] radians.

mod arcs;
mod mc;
mod strip;

pub use arcs::boundary_arcs;
pub use mc::mc_area;
pub use strip::crown_pair_strip;

use serde::{Deserialize, Serialize};

/// Absolute tolerance on lengths scaled to the problem.
pub const LEN_TOL: f64 = 1e-9;
/// Tolerance on angles, in radians. Circle pairs meeting at an angular gap
/// below this are rejected as degenerate rather than perturbed.
pub const ANG_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("negative input for {0}")]
    NegativeInput(&'static str),
    #[error("annulus halfwidth {halfwidth} exceeds mid radius {r_mid}")]
    HalfwidthTooLarge { r_mid: f64, halfwidth: f64 },
    #[error("crown intersection is empty")]
    EmptyIntersection,
    #[error("degenerate tangency: circles meet at angular separation below tolerance")]
    DegenerateTangency,
    #[error("invalid input: {0}")]
    Invalid(&'static str),
}

/// A point of the plane or of the torus, coordinates in `[0, L)` when
/// canonical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Euclidean (planar) distance.
    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// The flat torus of side `L`, i.e. `[0, L)^2` with wrap-around metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusBox {
    side: f64,
}

impl TorusBox {
    pub fn new(side: f64) -> Result<Self, GeomError> {
        if !(side > 0.0) || !side.is_finite() {
            return Err(GeomError::Invalid("torus side must be positive and finite"));
        }
        Ok(TorusBox { side })
    }

    #[inline]
    pub fn side(&self) -> f64 {
        self.side
    }

    /// Canonicalize a coordinate into `[0, L)`.
    #[inline]
    pub fn wrap_coord(&self, x: f64) -> f64 {
        let w = x.rem_euclid(self.side);
        // rem_euclid can return `side` itself when x is a tiny negative value.
        if w >= self.side {
            0.0
        } else {
            w
        }
    }

    #[inline]
    pub fn canonicalize(&self, p: Point) -> Point {
        Point::new(self.wrap_coord(p.x), self.wrap_coord(p.y))
    }

    /// Shortest signed displacement from `a` to `b` along one axis.
    #[inline]
    pub fn delta(&self, a: f64, b: f64) -> f64 {
        let mut d = b - a;
        if d > 0.5 * self.side {
            d -= self.side;
        } else if d < -0.5 * self.side {
            d += self.side;
        }
        d
    }

    #[inline]
    pub fn dist2(&self, p: Point, q: Point) -> f64 {
        let dx = self.delta(p.x, q.x);
        let dy = self.delta(p.y, q.y);
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(&self, p: Point, q: Point) -> f64 {
        self.dist2(p, q).sqrt()
    }
}

/// Wrap-around metric distance on the torus.
///
/// Computed coordinate-wise as `min(|d|, L - |d|)` per axis, which equals the
/// minimum over the nine wrap images of the Euclidean distance.
#[inline]
pub fn torus_distance(p: Point, q: Point, torus: &TorusBox) -> f64 {
    torus.distance(p, q)
}

/// Closed ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self, GeomError> {
        if radius < 0.0 {
            return Err(GeomError::NegativeInput("ball radius"));
        }
        Ok(Ball { center, radius })
    }

    /// Planar membership test.
    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        self.center.dist2(p) <= self.radius * self.radius
    }

    /// Membership under the torus metric.
    #[inline]
    pub fn contains_torus(&self, p: Point, torus: &TorusBox) -> bool {
        torus.dist2(self.center, p) <= self.radius * self.radius
    }
}

/// Crown (annular region) `r_inner <= |x - center| <= r_outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crown {
    pub center: Point,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl Crown {
    pub fn new(center: Point, r_inner: f64, r_outer: f64) -> Result<Self, GeomError> {
        if r_inner < 0.0 || r_outer < 0.0 {
            return Err(GeomError::NegativeInput("crown radius"));
        }
        if r_inner > r_outer {
            return Err(GeomError::Invalid("crown r_inner must be <= r_outer"));
        }
        Ok(Crown {
            center,
            r_inner,
            r_outer,
        })
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        let d2 = self.center.dist2(p);
        d2 >= self.r_inner * self.r_inner && d2 <= self.r_outer * self.r_outer
    }
}

/// All points within `width / 2` of the line through `anchor` along
/// `direction` (a unit vector).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub anchor: Point,
    pub direction: Point,
    pub width: f64,
}

impl Strip {
    /// Signed distance of `p` from the strip axis.
    #[inline]
    pub fn offset(&self, p: Point) -> f64 {
        let dx = p.x - self.anchor.x;
        let dy = p.y - self.anchor.y;
        // Normal of the axis direction.
        dx * (-self.direction.y) + dy * self.direction.x
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        self.offset(p).abs() <= 0.5 * self.width + LEN_TOL
    }
}

/// One circular arc, counterclockwise from `start` to `end` (radians,
/// `end >= start`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularArc {
    pub center: Point,
    pub radius: f64,
    pub start: f64,
    pub end: f64,
}

impl CircularArc {
    #[inline]
    pub fn extent(&self) -> f64 {
        self.end - self.start
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.radius * self.extent()
    }

    pub fn point_at(&self, theta: f64) -> Point {
        Point::new(
            self.center.x + self.radius * theta.cos(),
            self.center.y + self.radius * theta.sin(),
        )
    }

    pub fn midpoint(&self) -> Point {
        self.point_at(0.5 * (self.start + self.end))
    }
}

/// A set of circular arcs with their total length.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ArcSet {
    pub arcs: Vec<CircularArc>,
    pub total_length: f64,
}

impl ArcSet {
    pub fn from_arcs(arcs: Vec<CircularArc>) -> Self {
        let total_length = arcs.iter().map(CircularArc::length).sum();
        ArcSet { arcs, total_length }
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

/// Axis-aligned rectangle (a planar window).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Result<Self, GeomError> {
        if !(min.x <= max.x && min.y <= max.y) {
            return Err(GeomError::Invalid("rect min must not exceed max"));
        }
        Ok(Rect { min, max })
    }

    #[inline]
    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Area of the symmetric difference of two radius-`r` discs whose centers are
/// `eps` apart.
///
/// For `eps <= 2r` this is
/// `(2pi - 4 arccos(eps / 2r)) r^2 + 2 eps r sqrt(1 - eps^2 / 4r^2)`;
/// once the discs are disjoint (`eps > 2r`) it saturates at `2 pi r^2`.
pub fn symdiff_area(r: f64, eps: f64) -> Result<f64, GeomError> {
    if r <= 0.0 {
        return Err(GeomError::NegativeInput("disc radius"));
    }
    if eps < 0.0 {
        return Err(GeomError::NegativeInput("center separation"));
    }
    if eps >= 2.0 * r {
        return Ok(2.0 * std::f64::consts::PI * r * r);
    }
    let q = eps / (2.0 * r);
    let area = (2.0 * std::f64::consts::PI - 4.0 * q.acos()) * r * r
        + 2.0 * eps * r * (1.0 - q * q).sqrt();
    Ok(area.max(0.0))
}

/// Area of the annulus with mid radius `r_mid` and halfwidth `halfwidth`,
/// i.e. `pi (r_mid + h)^2 - pi (r_mid - h)^2 = 4 pi r_mid h`.
pub fn annulus_area(r_mid: f64, halfwidth: f64) -> Result<f64, GeomError> {
    if r_mid < 0.0 || halfwidth < 0.0 {
        return Err(GeomError::NegativeInput("annulus radius"));
    }
    if halfwidth > r_mid {
        return Err(GeomError::HalfwidthTooLarge { r_mid, halfwidth });
    }
    Ok(4.0 * std::f64::consts::PI * r_mid * halfwidth)
}

/// Combined area budget `7 pi eps r / 3` for the small components
/// (`pi eps r`) plus the tubes around large-component boundaries
/// (`4 pi eps r / 3`) in the hiding-ball decomposition.
pub fn tube_area_budget(eps: f64, r: f64) -> f64 {
    7.0 * std::f64::consts::PI * eps * r / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn torus_distance_no_wrap_345() {
        let t = TorusBox::new(100.0).unwrap();
        assert_relative_eq!(
            torus_distance(Point::new(0.0, 0.0), Point::new(3.0, 4.0), &t),
            5.0
        );
    }

    #[test]
    fn torus_distance_wraps_across_seam() {
        let t = TorusBox::new(100.0).unwrap();
        assert_relative_eq!(
            torus_distance(Point::new(1.0, 0.0), Point::new(99.0, 0.0), &t),
            2.0
        );
    }

    #[test]
    fn torus_distance_antipodal() {
        let t = TorusBox::new(100.0).unwrap();
        assert_relative_eq!(
            torus_distance(Point::new(0.0, 0.0), Point::new(50.0, 50.0), &t),
            50.0 * 2.0f64.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn torus_distance_never_exceeds_half_diagonal() {
        let t = TorusBox::new(10.0).unwrap();
        let mut s = Stream::new(3, "torus-max", 0);
        let cap = 5.0 * 2.0f64.sqrt() + 1e-12;
        for _ in 0..1000 {
            let p = Point::new(s.uniform(10.0), s.uniform(10.0));
            let q = Point::new(s.uniform(10.0), s.uniform(10.0));
            assert!(torus_distance(p, q, &t) <= cap);
        }
    }

    #[test]
    fn torus_metric_axioms_hold_on_random_triples() {
        let t = TorusBox::new(37.5).unwrap();
        let mut s = Stream::new(11, "metric-axioms", 0);
        for _ in 0..10_000 {
            let p = Point::new(s.uniform(37.5), s.uniform(37.5));
            let q = Point::new(s.uniform(37.5), s.uniform(37.5));
            let w = Point::new(s.uniform(37.5), s.uniform(37.5));
            let pq = torus_distance(p, q, &t);
            let qp = torus_distance(q, p, &t);
            assert_eq!(pq, qp, "symmetry");
            let pw = torus_distance(p, w, &t);
            let wq = torus_distance(w, q, &t);
            assert!(pq <= pw + wq + 1e-9, "triangle inequality");
        }
    }

    #[test]
    fn symdiff_identical_discs_is_zero() {
        assert_relative_eq!(symdiff_area(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn symdiff_disjoint_discs_is_two_discs() {
        assert_relative_eq!(symdiff_area(1.0, 2.0).unwrap(), 2.0 * PI);
        assert_relative_eq!(symdiff_area(1.0, 5.0).unwrap(), 2.0 * PI);
    }

    #[test]
    fn symdiff_at_unit_separation_matches_closed_form() {
        // Independent derivation: two unit discs at distance 1. Lens area is
        // 2 arccos(1/2) - sin(2 arccos(1/2)) ... = 2 pi/3 - sqrt(3)/2 per
        // standard lens formula; symmetric difference = 2 pi - 2 * lens.
        let lens = 2.0 * (PI / 3.0) - (3.0f64).sqrt() / 2.0 * 1.0;
        let expected = 2.0 * PI - 2.0 * lens;
        assert_relative_eq!(expected, 2.0 * PI / 3.0 + 3.0f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(symdiff_area(1.0, 1.0).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn symdiff_rejects_negative_inputs() {
        assert!(symdiff_area(-1.0, 0.5).is_err());
        assert!(symdiff_area(1.0, -0.5).is_err());
    }

    #[test]
    fn symdiff_monotone_and_lower_bounded() {
        let mut s = Stream::new(5, "symdiff-mono", 0);
        for _ in 0..2000 {
            let r = 0.1 + s.uniform(10.0);
            let e1 = s.uniform(3.0 * r);
            let e2 = s.uniform(3.0 * r);
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let a_lo = symdiff_area(r, lo).unwrap();
            let a_hi = symdiff_area(r, hi).unwrap();
            assert!(a_lo <= a_hi + 1e-9, "monotone in eps");
            assert!(
                a_lo >= 2.0 * lo.min(2.0 * r) * r - 1e-9,
                "lower bound 2 min(eps, 2r) r"
            );
        }
    }

    #[test]
    fn annulus_area_basics() {
        assert_relative_eq!(annulus_area(3.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(annulus_area(2.0, 0.5).unwrap(), 4.0 * PI);
        assert!(annulus_area(1.0, 2.0).is_err());
        assert!(annulus_area(-1.0, 0.1).is_err());
    }

    #[test]
    fn annulus_area_log_budget() {
        // halfwidth log(n)/(16 r) around mid radius r gives pi log(n)/4.
        let n: f64 = 1e6;
        let r = 12.0;
        let hw = n.ln() / (16.0 * r);
        let a = annulus_area(r, hw).unwrap();
        assert_relative_eq!(a, PI * n.ln() / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn tube_budget_examples() {
        assert_relative_eq!(tube_area_budget(0.0, 5.0), 0.0);
        assert_relative_eq!(tube_area_budget(1.0, 3.0), 7.0 * PI);
    }
}
