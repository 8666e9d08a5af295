//! ASCII OFF meshes.

use std::fmt::Write as _;
use std::path::Path;

use crate::doubler::DoubledSurface;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct OffMesh {
    pub vertices: Vec<Vec<f64>>,
    pub triangles: Vec<[usize; 3]>,
}

impl OffMesh {
    /// Embedded coordinates when available, otherwise the base points lifted
    /// into `R^n` (copies of a base vertex then coincide).
    pub fn from_surface(s: &DoubledSurface) -> Self {
        let vertices = match &s.embedded {
            Some(e) => e.clone(),
            None => s.vertices.iter().map(|&(v, _)| s.base.lift(v)).collect(),
        };
        Self { vertices, triangles: s.triangles.clone() }
    }

    pub fn to_off_string(&self) -> String {
        let mut out = format!("OFF\n{} {} 0\n", self.vertices.len(), self.triangles.len());
        for v in &self.vertices {
            let row: Vec<String> = v.iter().map(|c| format!("{c:.16e}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        for t in &self.triangles {
            let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_off_string())?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("OFF: {m}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        if lines.next() != Some("OFF") {
            return Err(bad("missing header"));
        }
        let counts: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("missing counts"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad count")))
            .collect::<Result<_>>()?;
        if counts.len() != 3 {
            return Err(bad("counts line needs three fields"));
        }
        let mut vertices = Vec::with_capacity(counts[0]);
        for _ in 0..counts[0] {
            let row = lines.next().ok_or_else(|| bad("truncated vertex list"))?;
            vertices.push(
                row.split_whitespace().map(|t| t.parse::<f64>().map_err(|_| bad("bad coordinate"))).collect::<Result<_>>()?,
            );
        }
        let mut triangles = Vec::with_capacity(counts[1]);
        for _ in 0..counts[1] {
            let row: Vec<usize> = lines
                .next()
                .ok_or_else(|| bad("truncated face list"))?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("bad index")))
                .collect::<Result<_>>()?;
            if row.len() != 4 || row[0] != 3 {
                return Err(bad("only triangles are supported"));
            }
            if row[1..].iter().any(|&i| i >= counts[0]) {
                return Err(bad("face index out of range"));
            }
            triangles.push([row[1], row[2], row[3]]);
        }
        Ok(Self { vertices, triangles })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = OffMesh {
            vertices: vec![vec![0.1, -2.0 / 3.0, 1e-17], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, f64::MIN_POSITIVE]],
            triangles: vec![[0, 1, 2]],
        };
        let text = m.to_off_string();
        assert!(text.starts_with("OFF\n3 1 0\n"));
        assert_eq!(OffMesh::parse(&text).unwrap(), m);
    }

    #[test]
    fn rejects_quads() {
        assert!(OffMesh::parse("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n").is_err());
    }
}
