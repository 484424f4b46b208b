//! Flat-file graph format.
//!
//! Line 1: `RGGT 1 <n> <r> <side> <mode> <metric> <seed>` where `<n>` is the
//! number of points that follow (for Poisson instances this is the drawn
//! count, not the intensity). Then one `x y` pair per line, decimal with 17
//! significant digits, which round-trips every finite f64 bit-exactly.

use super::{GraphInstance, MetricMode, RggError, SampleMode, VertexId};
use crate::geometry::Point;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

const MAGIC: &str = "RGGT";
const VERSION: u32 = 1;

impl GraphInstance {
    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<(), RggError> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        writeln!(
            w,
            "{MAGIC} {VERSION} {} {:.16e} {:.16e} {} {} {}",
            self.n(),
            self.r(),
            self.side(),
            self.mode(),
            self.metric(),
            self.seed()
        )?;
        for p in self.positions() {
            writeln!(w, "{:.16e} {:.16e}", p.x, p.y)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<GraphInstance, RggError> {
        let file = std::fs::File::open(path)?;
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| RggError::Malformed("empty file".into()))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 8 {
            return Err(RggError::Malformed(format!(
                "header has {} fields, expected 8",
                fields.len()
            )));
        }
        if fields[0] != MAGIC {
            return Err(RggError::Malformed(format!("bad magic {:?}", fields[0])));
        }
        let version: u32 = fields[1]
            .parse()
            .map_err(|_| RggError::Malformed("unparseable version".into()))?;
        if version != VERSION {
            return Err(RggError::Malformed(format!("unsupported version {version}")));
        }
        let expected: u64 = fields[2]
            .parse()
            .map_err(|_| RggError::Malformed("unparseable vertex count".into()))?;
        let r: f64 = fields[3]
            .parse()
            .map_err(|_| RggError::Malformed("unparseable radius".into()))?;
        let side: f64 = fields[4]
            .parse()
            .map_err(|_| RggError::Malformed("unparseable side".into()))?;
        let mode = match fields[5] {
            "binomial" => SampleMode::Binomial,
            "poisson" => SampleMode::Poisson,
            other => return Err(RggError::Malformed(format!("unknown mode {other:?}"))),
        };
        let metric = match fields[6] {
            "torus" => MetricMode::Torus,
            "square" => MetricMode::Square,
            other => return Err(RggError::Malformed(format!("unknown metric {other:?}"))),
        };
        let seed: u64 = fields[7]
            .parse()
            .map_err(|_| RggError::Malformed("unparseable seed".into()))?;
        if !(side > 0.0) || !(r > 0.0) {
            return Err(RggError::Malformed("side and radius must be positive".into()));
        }

        let mut positions = Vec::with_capacity(expected as usize);
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let x: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| RggError::Malformed(format!("bad x on line {}", lineno + 2)))?;
            let y: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| RggError::Malformed(format!("bad y on line {}", lineno + 2)))?;
            if it.next().is_some() {
                return Err(RggError::Malformed(format!(
                    "trailing tokens on line {}",
                    lineno + 2
                )));
            }
            if !(0.0..side).contains(&x) || !(0.0..side).contains(&y) {
                return Err(RggError::Malformed(format!(
                    "coordinate out of [0, side) on line {}",
                    lineno + 2
                )));
            }
            positions.push(Point::new(x, y));
        }
        if positions.len() as u64 != expected {
            return Err(RggError::CountMismatch {
                expected,
                found: positions.len() as u64,
            });
        }
        Ok(GraphInstance::from_parts(
            side, r, metric, mode, seed, positions,
        ))
    }
}

/// Neighbor lists of two instances agree on every vertex (used to cross-check
/// a reloaded instance against the original).
pub fn same_adjacency(a: &GraphInstance, b: &GraphInstance) -> Result<bool, RggError> {
    if a.n() != b.n() {
        return Ok(false);
    }
    for v in 0..a.n() as VertexId {
        if a.neighbors(v)? != b.neighbors(v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::super::{sample_instance, ModelParams, SampleMode};
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = std::env::temp_dir().join("locgame-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.rggt");
        for mode in [SampleMode::Binomial, SampleMode::Poisson] {
            let params = ModelParams {
                mode,
                ..ModelParams::new(400, 2.5, 99)
            };
            let g = sample_instance(&params).unwrap();
            g.save(&path).unwrap();
            let h = GraphInstance::load(&path).unwrap();
            assert_eq!(g.positions(), h.positions(), "positions must round-trip");
            assert_eq!(g.r(), h.r());
            assert_eq!(g.side(), h.side());
            assert_eq!(g.seed(), h.seed());
            assert!(same_adjacency(&g, &h).unwrap());
        }
    }

    #[test]
    fn tampered_count_fails_to_load() {
        let dir = std::env::temp_dir().join("locgame-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("tampered.rggt");
        let g = sample_instance(&ModelParams::new(50, 2.0, 1)).unwrap();
        g.save(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        lines.pop(); // drop one point
        std::fs::write(&path, lines.join("\n")).unwrap();
        match GraphInstance::load(&path) {
            Err(RggError::CountMismatch { expected, found }) => {
                assert_eq!(expected, 50);
                assert_eq!(found, 49);
            }
            other => panic!("expected count mismatch, got {other:?}"),
        }
    }

    #[test]
    fn malformed_header_rejected() {
        let dir = std::env::temp_dir().join("locgame-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("badheader.rggt");
        std::fs::write(&path, "RGGX 1 0 1.0 1.0 binomial torus 0\n").unwrap();
        assert!(matches!(
            GraphInstance::load(&path),
            Err(RggError::Malformed(_))
        ));
        std::fs::write(&path, "RGGT 2 0 1.0 1.0 binomial torus 0\n").unwrap();
        assert!(matches!(
            GraphInstance::load(&path),
            Err(RggError::Malformed(_))
        ));
    }
}
