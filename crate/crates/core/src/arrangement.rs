//! Colored hypersurface arrangements and the lifted variety they define.
//!
//! Hypersurface indices are 0-based (`polys[j]`); colors are 1-based labels
//! `1..=l2`. A sign vector over the colors is a bitmask where bit `i - 1`
//! set means the sign for color `i` is negative.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::{Polynomial, Rational};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Bitmask sign vector over colors.
pub type SignVector = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorMap {
    color_of: Vec<usize>,
    sphere_dim: Vec<u32>,
}

impl ColorMap {
    pub fn new(color_of: Vec<usize>, sphere_dim: Vec<u32>) -> Result<Self> {
        let l2 = sphere_dim.len();
        if color_of.is_empty() || l2 == 0 {
            return Err(Error::InvalidInput("color map needs l1, l2 >= 1".into()));
        }
        if l2 > 16 {
            return Err(Error::InvalidInput(format!("too many colors ({l2})")));
        }
        let mut seen = vec![false; l2];
        for &c in &color_of {
            if c == 0 || c > l2 {
                return Err(Error::ColorOutOfRange { color: c, l2 });
            }
            seen[c - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidInput(format!(
                "color map is not surjective: color {} unused",
                missing + 1
            )));
        }
        Ok(Self { color_of, sphere_dim })
    }

    /// All sphere dimensions zero.
    pub fn with_point_fibers(color_of: Vec<usize>) -> Result<Self> {
        let l2 = color_of.iter().copied().max().unwrap_or(0);
        Self::new(color_of, vec![0; l2])
    }

    pub fn l1(&self) -> usize {
        self.color_of.len()
    }

    pub fn l2(&self) -> usize {
        self.sphere_dim.len()
    }

    pub fn color_of(&self, j: usize) -> usize {
        self.color_of[j]
    }

    pub fn colors(&self) -> &[usize] {
        &self.color_of
    }

    pub fn sphere_dim(&self, color: usize) -> u32 {
        self.sphere_dim[color - 1]
    }

    pub fn sphere_dims(&self) -> &[u32] {
        &self.sphere_dim
    }

    /// Hypersurfaces carrying the given color.
    pub fn fiber(&self, color: usize) -> Vec<usize> {
        (0..self.l1()).filter(|&j| self.color_of[j] == color).collect()
    }

    pub fn all_point_fibers(&self) -> bool {
        self.sphere_dim.iter().all(|&d| d == 0)
    }
}

/// Construction parameters a preset was generated from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamMeta {
    pub a: Rational,
    pub b: Rational,
    pub s1: Rational,
    pub s2: Rational,
    pub p: Vec<Rational>,
    pub radius: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrangementSpec {
    pub n: usize,
    pub polys: Vec<Polynomial>,
    pub colors: ColorMap,
    pub param_meta: Option<ParamMeta>,
}

impl ArrangementSpec {
    pub fn new(n: usize, polys: Vec<Polynomial>, colors: ColorMap) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("ambient dimension must be positive".into()));
        }
        for p in &polys {
            if p.nvars() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.nvars() });
            }
        }
        if polys.len() != colors.l1() {
            return Err(Error::InvalidInput(format!(
                "{} polynomials but color map covers {}",
                polys.len(),
                colors.l1()
            )));
        }
        Ok(Self { n, polys, colors, param_meta: None })
    }

    pub fn with_meta(mut self, meta: ParamMeta) -> Self {
        self.param_meta = Some(meta);
        self
    }

    pub fn l1(&self) -> usize {
        self.polys.len()
    }

    pub fn l2(&self) -> usize {
        self.colors.l2()
    }

    pub fn values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.polys.iter().map(|p| p.eval(x)).collect()
    }

    /// Whether `x` lies in the closed region up to `tol`.
    pub fn in_closure(&self, x: &[f64], tol: f64) -> bool {
        self.polys.iter().all(|p| p.eval_unchecked(x) >= -tol)
    }
}

/// Product of the hypersurface polynomials carrying color `i`.
pub fn color_polynomial(spec: &ArrangementSpec, color: usize) -> Result<Polynomial> {
    let l2 = spec.l2();
    if color == 0 || color > l2 {
        return Err(Error::ColorOutOfRange { color, l2 });
    }
    let mut acc = Polynomial::one(spec.n);
    for j in spec.colors.fiber(color) {
        acc = acc.checked_mul(&spec.polys[j])?;
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct LiftedSystem {
    pub base: ArrangementSpec,
    /// `color_polys[i - 1]` is the product polynomial for color `i`.
    pub color_polys: Vec<Polynomial>,
    pub ambient_dim: usize,
    pub manifold_dim: usize,
}

impl LiftedSystem {
    /// `F_i(x)` as the product of its factor values. The expanded polynomial
    /// loses precision to cancellation when the factors are large.
    pub fn color_value(&self, color: usize, x: &[f64]) -> f64 {
        self.base.colors.fiber(color).iter().map(|&j| self.base.polys[j].eval_unchecked(x)).product()
    }

    /// Offset of the first lifted coordinate of color `i` in ambient coordinates.
    pub fn y_offset(&self, color: usize) -> usize {
        let dims = self.base.colors.sphere_dims();
        self.base.n + dims[..color - 1].iter().map(|&d| d as usize + 1).sum::<usize>()
    }

    /// The equations `F_i(x) - |y_i|^2`, as polynomials in the ambient coordinates.
    pub fn equations(&self) -> Vec<Polynomial> {
        let n = self.base.n;
        let map: Vec<usize> = (0..n).collect();
        (1..=self.base.l2())
            .map(|i| {
                let mut eq = self.color_polys[i - 1].embed(self.ambient_dim, &map);
                let off = self.y_offset(i);
                for k in 0..=self.base.colors.sphere_dim(i) as usize {
                    let y = Polynomial::var(self.ambient_dim, off + k);
                    eq = &eq - &(&y * &y);
                }
                eq
            })
            .collect()
    }
}

pub fn lifted_system(spec: &ArrangementSpec) -> Result<LiftedSystem> {
    let color_polys = (1..=spec.l2())
        .map(|i| color_polynomial(spec, i))
        .collect::<Result<Vec<_>>>()?;
    let dims = spec.colors.sphere_dims();
    let manifold_dim = spec.n + dims.iter().map(|&d| d as usize).sum::<usize>();
    let ambient_dim = manifold_dim + spec.l2();
    Ok(LiftedSystem { base: spec.clone(), color_polys, ambient_dim, manifold_dim })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "active", rename_all = "snake_case")]
pub enum PointClass {
    Interior,
    /// Active hypersurfaces (0-based indices).
    Boundary(BTreeSet<usize>),
    Outside,
}

pub fn classify_point(spec: &ArrangementSpec, x: &[f64], tol: f64) -> Result<PointClass> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be non-negative, got {tol}")));
    }
    let vals = spec.values(x)?;
    if vals.iter().all(|&v| v > tol) {
        return Ok(PointClass::Interior);
    }
    if vals.iter().any(|&v| v < -tol) {
        return Ok(PointClass::Outside);
    }
    let active = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() <= tol)
        .map(|(j, _)| j)
        .collect();
    Ok(PointClass::Boundary(active))
}

/// Explicit section of the projection over `x` for the given signs. Requires
/// point fibers for every color.
pub fn lift_point(ls: &LiftedSystem, x: &[f64], signs: SignVector, tol: f64) -> Result<Vec<f64>> {
    for (i, &d) in ls.base.colors.sphere_dims().iter().enumerate() {
        if d != 0 {
            return Err(Error::UnsupportedSphereDim { color: i + 1, dim: d });
        }
    }
    if x.len() != ls.base.n {
        return Err(Error::DimensionMismatch { expected: ls.base.n, got: x.len() });
    }
    let mut out = x.to_vec();
    for k in 0..ls.color_polys.len() {
        let v = ls.color_value(k + 1, x);
        if v < -tol {
            return Err(Error::NotInClosure { color: k + 1, value: v });
        }
        let y = v.max(0.0).sqrt();
        out.push(if signs >> k & 1 == 1 { -y } else { y });
    }
    Ok(out)
}

/// Number of sign vectors in `{±1}^l2`.
pub fn sign_count(l2: usize) -> u32 {
    1u32 << l2
}

/// Parity sign `(-1)^{#negative entries}`.
pub fn parity(signs: SignVector) -> i32 {
    if signs.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::Polynomial;

    fn sphere_spec() -> ArrangementSpec {
        let x = Polynomial::var(1, 0);
        let f = &Polynomial::one(1) - &(&x * &x);
        let colors = ColorMap::new(vec![1], vec![1]).unwrap();
        ArrangementSpec::new(1, vec![f], colors).unwrap()
    }

    #[test]
    fn color_map_must_be_surjective() {
        assert!(ColorMap::new(vec![1, 1], vec![0, 0]).is_err());
        assert!(matches!(
            ColorMap::new(vec![1, 3], vec![0, 0]),
            Err(Error::ColorOutOfRange { color: 3, l2: 2 })
        ));
    }

    #[test]
    fn sphere_dimensions() {
        let ls = lifted_system(&sphere_spec()).unwrap();
        assert_eq!(ls.ambient_dim, 3);
        assert_eq!(ls.manifold_dim, 2);
        let eq = &ls.equations()[0];
        // x^2 + y1^2 + y2^2 = 1 on the unit sphere
        let s = 1.0 / 3f64.sqrt();
        assert!(eq.eval(&[s, s, s]).unwrap().abs() < 1e-15);
        assert!(lift_point(&ls, &[0.0], 0, DEFAULT_TOL).is_err());
    }

    #[test]
    fn color_out_of_range() {
        let spec = sphere_spec();
        assert!(matches!(color_polynomial(&spec, 2), Err(Error::ColorOutOfRange { .. })));
        assert!(matches!(color_polynomial(&spec, 0), Err(Error::ColorOutOfRange { .. })));
    }

    #[test]
    fn negative_tolerance_rejected() {
        let spec = sphere_spec();
        assert!(classify_point(&spec, &[0.0], -1.0).is_err());
        assert_eq!(classify_point(&spec, &[0.0], 0.0).unwrap(), PointClass::Interior);
        assert_eq!(classify_point(&spec, &[2.0], 0.0).unwrap(), PointClass::Outside);
    }

    #[test]
    fn color_value_is_exact_on_a_factor() {
        // (8 + x)(8 - x)((x - 5/2)^2 + 1)(x^2 + 3): zero at x = -8
        let x = Polynomial::var(1, 0);
        let c = |v: i64| Polynomial::constant(1, crate::polynomial::int(v));
        let d = &x - &Polynomial::constant(1, crate::polynomial::rat(5, 2));
        let polys = vec![&c(8) + &x, &c(8) - &x, &(&d * &d) + &c(1), &(&x * &x) + &c(3)];
        let spec = ArrangementSpec::new(1, polys, ColorMap::with_point_fibers(vec![1, 1, 1, 1]).unwrap()).unwrap();
        let ls = lifted_system(&spec).unwrap();
        assert_eq!(ls.color_value(1, &[-8.0]), 0.0);
        let x0 = [0.3];
        let expanded = ls.color_polys[0].eval_unchecked(&x0);
        assert!((ls.color_value(1, &x0) - expanded).abs() <= 1e-12 * expanded.abs());
    }
}
