//! Restriction of hypersurfaces to a coordinate plane and the line/circle
//! primitives they become there.
//!
//! Curve coefficients stay exact; intersection coordinates are `f64`. When
//! both curves carry exact data the tangency decision (discriminant zero) is
//! made in rational arithmetic.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::polynomial::{int, to_f64, Polynomial, Rational};

/// `a*u + b*v + c = 0`.
#[derive(Clone, Debug)]
pub struct LineEq {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub exact: Option<[Rational; 3]>,
}

impl LineEq {
    pub fn from_exact(a: Rational, b: Rational, c: Rational) -> Self {
        Self { a: to_f64(&a), b: to_f64(&b), c: to_f64(&c), exact: Some([a, b, c]) }
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        self.a * p[0] + self.b * p[1] + self.c
    }

    fn norm(&self) -> f64 {
        self.a.hypot(self.b)
    }

    /// Unit direction along the line.
    pub fn direction(&self) -> [f64; 2] {
        let n = self.norm();
        [-self.b / n, self.a / n]
    }

    /// Foot of the perpendicular from the origin.
    pub fn base_point(&self) -> [f64; 2] {
        let n2 = self.a * self.a + self.b * self.b;
        [-self.a * self.c / n2, -self.b * self.c / n2]
    }

    pub fn param(&self, p: [f64; 2]) -> f64 {
        let d = self.direction();
        let o = self.base_point();
        (p[0] - o[0]) * d[0] + (p[1] - o[1]) * d[1]
    }

    pub fn at(&self, t: f64) -> [f64; 2] {
        let d = self.direction();
        let o = self.base_point();
        [o[0] + t * d[0], o[1] + t * d[1]]
    }

    pub fn distance(&self, p: [f64; 2]) -> f64 {
        self.eval(p).abs() / self.norm()
    }
}

/// `(u - cu)^2 + (v - cv)^2 = r2`.
#[derive(Clone, Debug)]
pub struct CircleEq {
    pub cu: f64,
    pub cv: f64,
    pub r2: f64,
    pub exact: Option<[Rational; 3]>,
}

impl CircleEq {
    pub fn from_exact(cu: Rational, cv: Rational, r2: Rational) -> Self {
        Self { cu: to_f64(&cu), cv: to_f64(&cv), r2: to_f64(&r2), exact: Some([cu, cv, r2]) }
    }

    pub fn radius(&self) -> f64 {
        self.r2.sqrt()
    }

    pub fn at(&self, theta: f64) -> [f64; 2] {
        let r = self.radius();
        [self.cu + r * theta.cos(), self.cv + r * theta.sin()]
    }

    pub fn angle(&self, p: [f64; 2]) -> f64 {
        (p[1] - self.cv).atan2(p[0] - self.cu)
    }

    pub fn distance(&self, p: [f64; 2]) -> f64 {
        ((p[0] - self.cu).hypot(p[1] - self.cv) - self.radius()).abs()
    }
}

#[derive(Clone, Debug)]
pub enum Geom {
    Line(LineEq),
    Circle(CircleEq),
}

impl Geom {
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        match self {
            Geom::Line(l) => l.distance(p),
            Geom::Circle(c) => c.distance(p),
        }
    }
}

/// One connected curve of a restricted hypersurface.
#[derive(Clone, Debug)]
pub struct Primitive {
    pub geom: Geom,
    pub source: usize,
    pub color: usize,
}

/// What a hypersurface becomes on the slice plane.
#[derive(Clone, Debug)]
pub enum SliceCurve {
    /// Non-negative on the whole plane; imposes nothing.
    Free,
    /// Negative on an open dense set or everywhere; the slice has empty interior.
    Empty,
    Curves(Vec<Geom>),
}

fn coef(p: &Polynomial, e: [u32; 2]) -> Rational {
    p.coefficient(&e)
}

/// Exact square root of a non-negative rational, when it is a perfect square.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Classifies a polynomial in two variables `(u, v)` as a line, circle or
/// pair of parallel lines, together with its sign structure.
pub fn classify(index: usize, g: &Polynomial) -> Result<SliceCurve> {
    assert_eq!(g.nvars(), 2);
    let unsupported = |reason: &str| Error::UnsupportedCurve { index, reason: reason.to_string() };
    match g.degree() {
        -1 => return Ok(SliceCurve::Free),
        0 => {
            let c = coef(g, [0, 0]);
            return Ok(if c.is_negative() { SliceCurve::Empty } else { SliceCurve::Free });
        }
        1 => {
            let line = LineEq::from_exact(coef(g, [1, 0]), coef(g, [0, 1]), coef(g, [0, 0]));
            return Ok(SliceCurve::Curves(vec![Geom::Line(line)]));
        }
        2 => {}
        _ => return Err(unsupported("degree above 2")),
    }
    let a = coef(g, [2, 0]);
    let b = coef(g, [1, 1]);
    let c = coef(g, [0, 2]);
    let d = coef(g, [1, 0]);
    let e = coef(g, [0, 1]);
    let f = coef(g, [0, 0]);
    if !b.is_zero() {
        return Err(unsupported("mixed quadratic term"));
    }
    let four = int(4);
    let two = int(2);
    if !a.is_zero() && a == c {
        let cu = -&d / (&two * &a);
        let cv = -&e / (&two * &a);
        let r2 = (&d * &d + &e * &e) / (&four * &a * &a) - &f / &a;
        if r2.is_positive() {
            return Ok(SliceCurve::Curves(vec![Geom::Circle(CircleEq::from_exact(cu, cv, r2))]));
        }
        return Ok(if a.is_negative() { SliceCurve::Empty } else { SliceCurve::Free });
    }
    // quadratic in a single variable: a pair of parallel lines
    let (lead, lin, other_lin, along_u) = if !a.is_zero() && c.is_zero() {
        (a, d, e, true)
    } else if a.is_zero() && !c.is_zero() {
        (c, e, d, false)
    } else {
        return Err(unsupported("quadric is neither a circle nor a parallel pair"));
    };
    if !other_lin.is_zero() {
        return Err(unsupported("parabolic restriction"));
    }
    let disc = &lin * &lin - &four * &lead * &f;
    if !disc.is_positive() {
        return Ok(if lead.is_negative() { SliceCurve::Empty } else { SliceCurve::Free });
    }
    let roots: Vec<(f64, Option<Rational>)> = match exact_sqrt(&disc) {
        Some(s) => [-&lin - &s, -&lin + &s]
            .into_iter()
            .map(|num| {
                let r = num / (&two * &lead);
                (to_f64(&r), Some(r))
            })
            .collect(),
        None => {
            let s = to_f64(&disc).sqrt();
            let (l, q) = (to_f64(&lin), to_f64(&lead));
            vec![((-l - s) / (2.0 * q), None), ((-l + s) / (2.0 * q), None)]
        }
    };
    let lines = roots
        .into_iter()
        .map(|(r, exact)| {
            // coordinate = r, i.e. 1*coord - r = 0
            let (one, zero) = (int(1), int(0));
            let line = match exact {
                Some(rx) => {
                    if along_u {
                        LineEq::from_exact(one, zero, -rx)
                    } else {
                        LineEq::from_exact(zero, one, -rx)
                    }
                }
                None => {
                    if along_u {
                        LineEq { a: 1.0, b: 0.0, c: -r, exact: None }
                    } else {
                        LineEq { a: 0.0, b: 1.0, c: -r, exact: None }
                    }
                }
            };
            Geom::Line(line)
        })
        .collect();
    Ok(SliceCurve::Curves(lines))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Contact {
    Disjoint,
    Tangent([f64; 2]),
    Crossing([f64; 2], [f64; 2]),
}

fn sq(r: &Rational) -> Rational {
    r * r
}

pub fn intersect(g1: &Geom, g2: &Geom, tol: f64) -> Contact {
    match (g1, g2) {
        (Geom::Line(l1), Geom::Line(l2)) => line_line(l1, l2, tol),
        (Geom::Line(l), Geom::Circle(c)) | (Geom::Circle(c), Geom::Line(l)) => line_circle(l, c, tol),
        (Geom::Circle(c1), Geom::Circle(c2)) => circle_circle(c1, c2, tol),
    }
}

fn line_line(l1: &LineEq, l2: &LineEq, tol: f64) -> Contact {
    let det = l1.a * l2.b - l2.a * l1.b;
    let parallel = match (&l1.exact, &l2.exact) {
        (Some(e1), Some(e2)) => (&e1[0] * &e2[1] - &e2[0] * &e1[1]).is_zero(),
        _ => det.abs() <= tol * l1.norm() * l2.norm(),
    };
    if parallel {
        return Contact::Disjoint;
    }
    let u = (l1.b * l2.c - l2.b * l1.c) / det;
    let v = (l2.a * l1.c - l1.a * l2.c) / det;
    // a single transversal crossing; reported with both slots equal
    Contact::Crossing([u, v], [u, v])
}

/// Exact contact type of a line and a circle when both are rational.
pub fn line_circle_exact(l: &[Rational; 3], c: &[Rational; 3]) -> std::cmp::Ordering {
    // compare squared distance * |n|^2 against r^2 * |n|^2
    let s = &l[0] * &c[0] + &l[1] * &c[1] + &l[2];
    let lhs = sq(&s);
    let rhs = &c[2] * (sq(&l[0]) + sq(&l[1]));
    lhs.cmp(&rhs)
}

pub fn line_circle(l: &LineEq, c: &CircleEq, tol: f64) -> Contact {
    let n = l.norm();
    let signed = l.eval([c.cu, c.cv]) / n;
    let foot = [c.cu - signed * l.a / n, c.cv - signed * l.b / n];
    let h2 = c.r2 - signed * signed;
    let ordering = match (&l.exact, &c.exact) {
        (Some(le), Some(ce)) => line_circle_exact(le, ce),
        _ => {
            let scale = c.r2.max(1.0);
            if h2.abs() <= tol * scale {
                std::cmp::Ordering::Equal
            } else if h2 > 0.0 {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        }
    };
    match ordering {
        std::cmp::Ordering::Greater => Contact::Disjoint,
        std::cmp::Ordering::Equal => Contact::Tangent(foot),
        std::cmp::Ordering::Less => {
            let h = h2.max(0.0).sqrt();
            let d = l.direction();
            Contact::Crossing(
                [foot[0] - h * d[0], foot[1] - h * d[1]],
                [foot[0] + h * d[0], foot[1] + h * d[1]],
            )
        }
    }
}

fn circle_circle(c1: &CircleEq, c2: &CircleEq, tol: f64) -> Contact {
    let du = c2.cu - c1.cu;
    let dv = c2.cv - c1.cv;
    let d2 = du * du + dv * dv;
    if d2 == 0.0 {
        return Contact::Disjoint;
    }
    let tangent_exact = match (&c1.exact, &c2.exact) {
        (Some(e1), Some(e2)) => {
            let dd = sq(&(&e2[0] - &e1[0])) + sq(&(&e2[1] - &e1[1]));
            let lhs = sq(&(&dd - &e1[2] - &e2[2]));
            let rhs = int(4) * &e1[2] * &e2[2];
            Some(lhs == rhs)
        }
        _ => None,
    };
    let d = d2.sqrt();
    let (r1, r2) = (c1.radius(), c2.radius());
    // distance from c1 along the center line to the radical line
    let along = (d2 + c1.r2 - c2.r2) / (2.0 * d);
    let h2 = c1.r2 - along * along;
    let base = [c1.cu + along * du / d, c1.cv + along * dv / d];
    let tangent = tangent_exact.unwrap_or(h2.abs() <= tol * c1.r2.max(1.0));
    if tangent {
        return Contact::Tangent(base);
    }
    if d > r1 + r2 || d < (r1 - r2).abs() || h2 < 0.0 {
        return Contact::Disjoint;
    }
    let h = h2.sqrt();
    let (pu, pv) = (-dv / d, du / d);
    Contact::Crossing([base[0] - h * pu, base[1] - h * pv], [base[0] + h * pu, base[1] + h * pv])
}
