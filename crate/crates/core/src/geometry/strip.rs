//! Bounding strip for the intersection of two crowns anchored at opposite
//! corners of the surrounding square.

use super::{GeomError, Point, Strip};

/// Bound the intersection of the crowns `D(b, rho_b, rho_b + s/6)` and
/// `D(d, rho_d, rho_d + s/6)` by a strip perpendicular to the segment `bd`
/// (i.e. parallel to the other diagonal of the surrounding square).
///
/// The strip is obtained from the radical-line coordinates of the bounding
/// circle pairs, intersected with plain projection bounds. When the two
/// crowns cannot meet at all, `EmptyIntersection` is signalled and any
/// zero-width strip is valid.
///
/// Geometry is planar: callers working on the torus must unwrap coordinates
/// into a local frame first.
pub fn crown_pair_strip(
    b: Point,
    d: Point,
    rho_b: f64,
    rho_d: f64,
    s: f64,
) -> Result<Strip, GeomError> {
    if rho_b < 0.0 || rho_d < 0.0 {
        return Err(GeomError::NegativeInput("crown radius"));
    }
    if !(s > 0.0) {
        return Err(GeomError::Invalid("square side must be positive"));
    }
    let len = b.dist(d);
    if len <= 0.0 {
        return Err(GeomError::Invalid("crown centers must be distinct"));
    }
    let w = s / 6.0;
    let outer_b = rho_b + w;
    let outer_d = rho_d + w;

    // Disjointness: outer circles cannot reach each other, or one crown's
    // inner radius swallows the other's outer reach entirely.
    if outer_b + outer_d < len || rho_b > len + outer_d || rho_d > len + outer_b {
        return Err(GeomError::EmptyIntersection);
    }

    // Coordinate t along bd, measured from b. Any intersection point p has
    //   t(p) = (len^2 + |bp|^2 - |dp|^2) / (2 len),
    // monotone in |bp| and |dp|, so the radical coordinates of the extreme
    // circle pairs bound it. Independently, t <= |bp| and len - t <= |dp|.
    let t_rad_lo = (len * len + rho_b * rho_b - outer_d * outer_d) / (2.0 * len);
    let t_rad_hi = (len * len + outer_b * outer_b - rho_d * rho_d) / (2.0 * len);
    let t_lo = t_rad_lo.max(len - outer_d);
    let t_hi = t_rad_hi.min(outer_b);
    if t_hi < t_lo {
        return Err(GeomError::EmptyIntersection);
    }

    let dir_bd = Point::new((d.x - b.x) / len, (d.y - b.y) / len);
    let mid = 0.5 * (t_lo + t_hi);
    Ok(Strip {
        anchor: Point::new(b.x + mid * dir_bd.x, b.y + mid * dir_bd.y),
        // Perpendicular to bd: parallel to the other diagonal.
        direction: Point::new(-dir_bd.y, dir_bd.x),
        width: t_hi - t_lo,
    })
}
