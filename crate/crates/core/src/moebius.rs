//! Arithmetic and geometry of PSL(2,R) and PSL(2,C) in the upper half-plane model.
//!
//! Every group element is carried by a [`ProjectiveMatrix`]: a 2x2 matrix of
//! determinant one, considered up to a global sign. Real matrices act on the
//! upper half-plane by Möbius transformations; rotation angles follow the
//! anticlockwise convention, i.e. a regular elliptic element with centre `p`
//! and angle `θ` has derivative `e^{iθ}` at `p`.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::TAU;
use thiserror::Error;

/// Default classification tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Normalization target: `|det - 1|` after [`ProjectiveMatrix`] construction.
pub const DET_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoebiusError {
    #[error("matrix is singular or has non-finite entries")]
    Singular,
    #[error("real matrix has non-positive determinant {0}")]
    NonPositiveDeterminant(f64),
    #[error("matrix has non-real entries but the real field was requested")]
    NotReal,
    #[error("|tr| = {abs_trace} lies within {tol} of 2: classification is ambiguous")]
    AmbiguousClass { abs_trace: f64, tol: f64 },
    #[error("element is not regular elliptic (class {0})")]
    NotRegularElliptic(ElementClass),
    #[error("expected an elliptic element, got {0}")]
    NotElliptic(ElementClass),
    #[error("rotation angle {0} is a multiple of 2π")]
    DegenerateAngle(f64),
    #[error("point ({0}, {1}) is not in the upper half-plane")]
    NotInUpperHalfPlane(f64, f64),
    #[error("geodesic endpoints coincide")]
    DegenerateGeodesic,
}

/// Scalar field of a matrix or representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

/// Conjugacy-invariant type of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementClass {
    Identity,
    EllipticRegular,
    Parabolic,
    Hyperbolic,
    /// Complex field only: non-real trace, or real trace of modulus above 2.
    Loxodromic,
}

impl ElementClass {
    /// Identity or regular elliptic, i.e. contained in a compact subgroup.
    pub fn is_elliptic(self) -> bool {
        matches!(self, ElementClass::Identity | ElementClass::EllipticRegular)
    }
}

impl fmt::Display for ElementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ElementClass::Identity => "Identity",
            ElementClass::EllipticRegular => "EllipticRegular",
            ElementClass::Parabolic => "Parabolic",
            ElementClass::Hyperbolic => "Hyperbolic",
            ElementClass::Loxodromic => "Loxodromic",
        };
        f.write_str(s)
    }
}

/// A unit-determinant 2x2 matrix up to sign, over R or C.
///
/// Entries are stored row-major as complex numbers; real matrices have
/// identically zero imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveMatrix {
    m: [Complex64; 4],
    field: Field,
}

impl ProjectiveMatrix {
    /// Builds a real matrix, rescaling it to determinant one.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MoebiusError> {
        let det = a * d - b * c;
        if !det.is_finite() || ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(MoebiusError::Singular);
        }
        if det <= 0.0 {
            return Err(MoebiusError::NonPositiveDeterminant(det));
        }
        let s = if (det - 1.0).abs() <= DET_TOL { 1.0 } else { det.sqrt() };
        Ok(Self {
            m: [a / s, b / s, c / s, d / s].map(|x| Complex64::new(x, 0.0)),
            field: Field::Real,
        })
    }

    /// Builds a complex matrix, rescaling it to determinant one.
    pub fn complex(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, MoebiusError> {
        Self::from_entries([a, b, c, d], Field::Complex)
    }

    /// Builds a matrix over the given field, rescaling to determinant one.
    pub fn from_entries(m: [Complex64; 4], field: Field) -> Result<Self, MoebiusError> {
        match field {
            Field::Real => {
                if m.iter().any(|z| z.im != 0.0) {
                    return Err(MoebiusError::NotReal);
                }
                Self::real(m[0].re, m[1].re, m[2].re, m[3].re)
            }
            Field::Complex => {
                let det = m[0] * m[3] - m[1] * m[2];
                if !det.is_finite() || det.norm() == 0.0 || m.iter().any(|z| !z.is_finite()) {
                    return Err(MoebiusError::Singular);
                }
                if (det - 1.0).norm() <= DET_TOL {
                    return Ok(Self { m, field });
                }
                let s = det.sqrt();
                Ok(Self {
                    m: m.map(|z| z / s),
                    field,
                })
            }
        }
    }

    pub fn identity(field: Field) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m: [one, zero, zero, one],
            field,
        }
    }

    pub fn entries(&self) -> [Complex64; 4] {
        self.m
    }

    /// Real entries, if the matrix is over R.
    pub fn real_entries(&self) -> Option<[f64; 4]> {
        match self.field {
            Field::Real => Some(self.m.map(|z| z.re)),
            Field::Complex => None,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn det(&self) -> Complex64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    /// Trace of the stored lift; only defined up to sign in PSL.
    pub fn trace(&self) -> Complex64 {
        self.m[0] + self.m[3]
    }

    /// `|tr|` for real matrices; modulus of the trace for complex ones.
    pub fn abs_trace(&self) -> f64 {
        match self.field {
            Field::Real => self.trace().re.abs(),
            Field::Complex => self.trace().norm(),
        }
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.m;
        Self {
            m: [d, -b, -c, a],
            field: self.field,
        }
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &ProjectiveMatrix) -> Self {
        *g * *self * g.inverse()
    }

    /// The commutator `self · other · self⁻¹ · other⁻¹`.
    pub fn commutator(&self, other: &ProjectiveMatrix) -> Self {
        *self * *other * self.inverse() * other.inverse()
    }

    /// Möbius action `z ↦ (az + b)/(cz + d)`.
    pub fn act(&self, z: Complex64) -> Complex64 {
        let [a, b, c, d] = self.m;
        (a * z + b) / (c * z + d)
    }

    /// Action on a point of the upper half-plane (real matrices only).
    pub fn act_point(&self, p: HPoint) -> HPoint {
        let w = self.act(p.z());
        HPoint {
            re: w.re,
            im: w.im.max(f64::MIN_POSITIVE),
        }
    }

    /// Action on the ideal boundary `R ∪ {∞}` (real matrices only).
    pub fn act_boundary(&self, x: BoundaryPoint) -> BoundaryPoint {
        let [a, b, c, d] = self.m.map(|z| z.re);
        match x {
            BoundaryPoint::Infinity => {
                if c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(a / c)
                }
            }
            BoundaryPoint::Finite(t) => {
                let den = c * t + d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((a * t + b) / den)
                }
            }
        }
    }

    /// Equality in PSL: entries agree up to a global sign within `tol`.
    pub fn approx_eq(&self, other: &ProjectiveMatrix, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Max-entry distance up to sign.
    pub fn distance(&self, other: &ProjectiveMatrix) -> f64 {
        let plus = (0..4).map(|k| (self.m[k] - other.m[k]).norm()).fold(0.0, f64::max);
        let minus = (0..4).map(|k| (self.m[k] + other.m[k]).norm()).fold(0.0, f64::max);
        plus.min(minus)
    }

    /// Max-entry distance from `±I`.
    pub fn distance_to_identity(&self) -> f64 {
        self.distance(&Self::identity(self.field))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance_to_identity() <= tol
    }

    /// The same element viewed in PSL(2,C).
    pub fn to_complex(self) -> Self {
        Self {
            m: self.m,
            field: Field::Complex,
        }
    }

    /// Drops imaginary parts of size at most `tol`, yielding a real matrix.
    pub fn to_real(self, tol: f64) -> Result<Self, MoebiusError> {
        if self.field == Field::Real {
            return Ok(self);
        }
        if self.m.iter().any(|z| z.im.abs() > tol) {
            return Err(MoebiusError::NotReal);
        }
        let [a, b, c, d] = self.m.map(|z| z.re);
        Self::real(a, b, c, d)
    }

    /// The sign-flipped lift `-M`.
    pub fn negated(&self) -> Self {
        Self {
            m: self.m.map(|z| -z),
            field: self.field,
        }
    }

    fn renormalized(m: [Complex64; 4], field: Field) -> Self {
        let det = m[0] * m[3] - m[1] * m[2];
        if (det - 1.0).norm() <= f64::EPSILON {
            return Self { m, field };
        }
        match field {
            Field::Real => {
                let s = det.re.abs().sqrt();
                Self {
                    m: m.map(|z| Complex64::new(z.re / s, 0.0)),
                    field,
                }
            }
            Field::Complex => {
                let s = det.sqrt();
                Self {
                    m: m.map(|z| z / s),
                    field,
                }
            }
        }
    }
}

impl Mul for ProjectiveMatrix {
    type Output = ProjectiveMatrix;

    fn mul(self, rhs: ProjectiveMatrix) -> ProjectiveMatrix {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = rhs.m;
        let field = if self.field == Field::Real && rhs.field == Field::Real {
            Field::Real
        } else {
            Field::Complex
        };
        ProjectiveMatrix::renormalized(
            [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h],
            field,
        )
    }
}

impl Serialize for ProjectiveMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.field {
            Field::Real => self.m.map(|z| z.re).serialize(serializer),
            Field::Complex => {
                let flat: Vec<f64> = self.m.iter().flat_map(|z| [z.re, z.im]).collect();
                flat.serialize(serializer)
            }
        }
    }
}

impl<'de> Deserialize<'de> for ProjectiveMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Vec::<f64>::deserialize(deserializer)?;
        let built = match raw.len() {
            4 => ProjectiveMatrix::real(raw[0], raw[1], raw[2], raw[3]),
            8 => ProjectiveMatrix::complex(
                Complex64::new(raw[0], raw[1]),
                Complex64::new(raw[2], raw[3]),
                Complex64::new(raw[4], raw[5]),
                Complex64::new(raw[6], raw[7]),
            ),
            k => {
                return Err(serde::de::Error::custom(format!(
                    "matrix needs 4 (real) or 8 (complex) numbers, got {k}"
                )))
            }
        };
        built.map_err(serde::de::Error::custom)
    }
}

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct HPoint {
    re: f64,
    im: f64,
}

#[derive(Deserialize)]
struct RawPoint {
    re: f64,
    im: f64,
}

impl TryFrom<RawPoint> for HPoint {
    type Error = MoebiusError;

    fn try_from(raw: RawPoint) -> Result<Self, Self::Error> {
        HPoint::new(raw.re, raw.im)
    }
}

impl HPoint {
    pub fn new(re: f64, im: f64) -> Result<Self, MoebiusError> {
        if re.is_finite() && im.is_finite() && im > 0.0 {
            Ok(Self { re, im })
        } else {
            Err(MoebiusError::NotInUpperHalfPlane(re, im))
        }
    }

    pub fn from_complex(z: Complex64) -> Result<Self, MoebiusError> {
        Self::new(z.re, z.im)
    }

    /// The point `i`.
    pub fn i() -> Self {
        Self { re: 0.0, im: 1.0 }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Hyperbolic distance (curvature −1).
    pub fn distance(&self, other: &HPoint) -> f64 {
        let chord = (self.z() - other.z()).norm();
        2.0 * (chord / (2.0 * (self.im * other.im).sqrt())).asinh()
    }

    /// Disk-model coordinate of `z` in the chart centred at `self`.
    ///
    /// The chart `w = (z - p)/(z - p̄)` is an orientation-preserving isometry
    /// onto the unit disk sending `self` to the origin.
    pub fn disk_chart(&self, z: Complex64) -> Complex64 {
        let p = self.z();
        (z - p) / (z - p.conj())
    }

    /// Inverse of [`HPoint::disk_chart`].
    pub fn from_disk_chart(&self, w: Complex64) -> Complex64 {
        let p = self.z();
        (p - w * p.conj()) / (1.0 - w)
    }

    /// The point at hyperbolic distance `t` from `self` in the direction
    /// making anticlockwise angle `phi` with the upward vertical direction.
    pub fn along(&self, phi: f64, t: f64) -> HPoint {
        // the upward direction at p is the positive real axis of the chart
        let w = Complex64::from_polar((t / 2.0).tanh(), phi);
        let z = self.from_disk_chart(w);
        HPoint {
            re: z.re,
            im: z.im.max(f64::MIN_POSITIVE),
        }
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.re, self.im)
    }
}

/// Unsigned interior angle at `p` between the geodesics `pq` and `pr`, in `[0, π]`.
pub fn interior_angle(p: &HPoint, q: &HPoint, r: &HPoint) -> f64 {
    let wq = p.disk_chart(q.z());
    let wr = p.disk_chart(r.z());
    (wr * wq.conj()).arg().abs()
}

/// A point of the ideal boundary `R ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

/// A complete geodesic, given by its two ideal endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    ends: [BoundaryPoint; 2],
}

impl Geodesic {
    pub fn new(u: BoundaryPoint, v: BoundaryPoint) -> Result<Self, MoebiusError> {
        if u == v {
            return Err(MoebiusError::DegenerateGeodesic);
        }
        Ok(Self { ends: [u, v] })
    }

    /// The imaginary axis.
    pub fn imaginary_axis() -> Self {
        Self {
            ends: [BoundaryPoint::Finite(0.0), BoundaryPoint::Infinity],
        }
    }

    /// The unique geodesic through two distinct points.
    pub fn through(p: &HPoint, q: &HPoint) -> Result<Self, MoebiusError> {
        if p == q {
            return Err(MoebiusError::DegenerateGeodesic);
        }
        let dx = q.re - p.re;
        let scale = 1.0 + p.re.abs().max(q.re.abs());
        if dx.abs() <= 1e-14 * scale {
            return Self::new(BoundaryPoint::Finite(p.re), BoundaryPoint::Infinity);
        }
        let centre = (q.z().norm_sqr() - p.z().norm_sqr()) / (2.0 * dx);
        let radius = (p.z() - centre).norm();
        Self::new(
            BoundaryPoint::Finite(centre - radius),
            BoundaryPoint::Finite(centre + radius),
        )
    }

    pub fn endpoints(&self) -> [BoundaryPoint; 2] {
        self.ends
    }

    /// Image under a real Möbius map.
    pub fn image(&self, m: &ProjectiveMatrix) -> Result<Self, MoebiusError> {
        Self::new(m.act_boundary(self.ends[0]), m.act_boundary(self.ends[1]))
    }

    /// Whether `p` lies on the geodesic, measured in the Euclidean metric
    /// relative to `Im p`.
    pub fn contains(&self, p: &HPoint, tol: f64) -> bool {
        let off = match self.ends {
            [BoundaryPoint::Finite(x), BoundaryPoint::Infinity]
            | [BoundaryPoint::Infinity, BoundaryPoint::Finite(x)] => (p.re - x).abs(),
            [BoundaryPoint::Finite(u), BoundaryPoint::Finite(v)] => {
                let centre = (u + v) / 2.0;
                let radius = (u - v).abs() / 2.0;
                ((p.z() - centre).norm() - radius).abs()
            }
            _ => f64::INFINITY,
        };
        off / p.im <= tol
    }
}

/// A hyperbolic isometry of H, possibly orientation reversing.
///
/// Orientation-reversing maps act as `z ↦ M·z̄`; the matrix `M` is then
/// `i` times a real matrix of determinant −1, so that it still has
/// determinant one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    matrix: ProjectiveMatrix,
    reversing: bool,
}

impl Isometry {
    pub fn from_moebius(m: ProjectiveMatrix) -> Self {
        Self {
            matrix: m.to_complex(),
            reversing: false,
        }
    }

    pub fn matrix(&self) -> &ProjectiveMatrix {
        &self.matrix
    }

    pub fn is_reversing(&self) -> bool {
        self.reversing
    }

    pub fn act(&self, z: Complex64) -> Complex64 {
        let w = if self.reversing { z.conj() } else { z };
        self.matrix.act(w)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let inner = if self.reversing {
            let m = other.matrix.entries().map(|z| z.conj());
            ProjectiveMatrix {
                m,
                field: Field::Complex,
            }
        } else {
            other.matrix
        };
        Isometry {
            matrix: self.matrix * inner,
            reversing: self.reversing ^ other.reversing,
        }
    }

    /// The underlying real Möbius map, if orientation preserving.
    pub fn as_moebius(&self, tol: f64) -> Option<ProjectiveMatrix> {
        if self.reversing {
            return None;
        }
        self.matrix.to_real(tol).ok()
    }
}

/// Reflection through a geodesic.
pub fn reflection(g: &Geodesic) -> Isometry {
    let real = match g.ends {
        [BoundaryPoint::Finite(x), BoundaryPoint::Infinity]
        | [BoundaryPoint::Infinity, BoundaryPoint::Finite(x)] => [-1.0, 2.0 * x, 0.0, 1.0],
        [BoundaryPoint::Finite(u), BoundaryPoint::Finite(v)] => {
            let c = (u + v) / 2.0;
            let r = (u - v).abs() / 2.0;
            [c / r, (r * r - c * c) / r, 1.0 / r, -c / r]
        }
        _ => unreachable!("geodesic endpoints are distinct"),
    };
    Isometry {
        matrix: ProjectiveMatrix {
            m: real.map(|x| Complex64::new(0.0, x)),
            field: Field::Complex,
        },
        reversing: true,
    }
}

/// Classifies an element; the near-parabolic band resolves to `Parabolic`.
pub fn classify_element(m: &ProjectiveMatrix, tol: f64) -> ElementClass {
    classify_impl(m, tol, false).unwrap_or(ElementClass::Parabolic)
}

/// Classifies an element, refusing to decide inside the band `||tr| − 2| ≤ tol`.
pub fn classify_strict(m: &ProjectiveMatrix, tol: f64) -> Result<ElementClass, MoebiusError> {
    classify_impl(m, tol, true)
}

fn classify_impl(m: &ProjectiveMatrix, tol: f64, strict: bool) -> Result<ElementClass, MoebiusError> {
    if m.is_identity(tol) {
        return Ok(ElementClass::Identity);
    }
    let tr = m.trace();
    let above = match m.field {
        Field::Real => ElementClass::Hyperbolic,
        Field::Complex => {
            if tr.im.abs() > tol {
                return Ok(ElementClass::Loxodromic);
            }
            ElementClass::Loxodromic
        }
    };
    let t = tr.re.abs();
    if t < 2.0 - tol {
        Ok(ElementClass::EllipticRegular)
    } else if t > 2.0 + tol {
        Ok(above)
    } else if strict {
        Err(MoebiusError::AmbiguousClass { abs_trace: t, tol })
    } else {
        Ok(ElementClass::Parabolic)
    }
}

/// Rotation angle in `(0, 2π)` and centre of a regular elliptic real element.
pub fn rotation_data(m: &ProjectiveMatrix, tol: f64) -> Result<(f64, HPoint), MoebiusError> {
    let Some([a, _, c, d]) = m.real_entries() else {
        return Err(MoebiusError::NotReal);
    };
    let class = classify_element(m, tol);
    if class != ElementClass::EllipticRegular {
        return Err(MoebiusError::NotRegularElliptic(class));
    }
    let tr = a + d;
    let centre = Complex64::new(
        (a - d) / (2.0 * c),
        (4.0 - tr * tr).max(0.0).sqrt() / (2.0 * c.abs()),
    );
    let centre = HPoint::from_complex(centre)?;
    // derivative of the action at the centre is 1/(cz + d)^2 = e^{iθ}
    let theta = (-2.0 * (Complex64::new(c, 0.0) * centre.z() + d).arg()).rem_euclid(TAU);
    Ok((theta, centre))
}

/// The anticlockwise rotation by `theta` about `p`.
pub fn rotation_about(p: &HPoint, theta: f64) -> Result<ProjectiveMatrix, MoebiusError> {
    let reduced = theta.rem_euclid(TAU);
    if !theta.is_finite() || reduced == 0.0 || (TAU - reduced) == 0.0 {
        return Err(MoebiusError::DegenerateAngle(theta));
    }
    let (s, c) = (theta / 2.0).sin_cos();
    // g K(θ) g⁻¹ with K(θ) = [[c, s], [-s, c]] the rotation at i and
    // g = [[√y, x/√y], [0, 1/√y]] sending i to p.
    let (x, y) = (p.re, p.im);
    ProjectiveMatrix::real(
        c - s * x / y,
        s * (x * x / y + y),
        -s / y,
        c + s * x / y,
    )
}

/// The commutator `[a, x]` of an elliptic `a` with any `x`, with its class.
pub fn commutator_class(
    a: &ProjectiveMatrix,
    x: &ProjectiveMatrix,
    tol: f64,
) -> Result<(ElementClass, ProjectiveMatrix), MoebiusError> {
    let class_a = classify_strict(a, tol)?;
    if !class_a.is_elliptic() {
        return Err(MoebiusError::NotElliptic(class_a));
    }
    let comm = a.commutator(x);
    Ok((classify_strict(&comm, tol)?, comm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn quarter() -> ProjectiveMatrix {
        ProjectiveMatrix::real(0.0, -1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn standard_normal_forms() {
        let tol = DEFAULT_TOL;
        assert_eq!(classify_element(&ProjectiveMatrix::identity(Field::Real), tol), ElementClass::Identity);
        let minus_i = ProjectiveMatrix::real(-1.0, 0.0, 0.0, -1.0).unwrap();
        assert_eq!(classify_element(&minus_i, tol), ElementClass::Identity);
        assert_eq!(classify_element(&quarter(), tol), ElementClass::EllipticRegular);
        let par = ProjectiveMatrix::real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(classify_element(&par, tol), ElementClass::Parabolic);
        assert!(matches!(classify_strict(&par, tol), Err(MoebiusError::AmbiguousClass { .. })));
        let hyp = ProjectiveMatrix::real(2.0, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(classify_element(&hyp, tol), ElementClass::Hyperbolic);
    }

    #[test]
    fn complex_classification() {
        let tol = DEFAULT_TOL;
        let lox = ProjectiveMatrix::complex(
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 1.0).inv(),
        )
        .unwrap();
        assert_eq!(classify_element(&lox, tol), ElementClass::Loxodromic);
        let ell = ProjectiveMatrix::complex(
            Complex64::from_polar(1.0, 0.7),
            Complex64::new(3.0, -2.0),
            Complex64::new(0.0, 0.0),
            Complex64::from_polar(1.0, -0.7),
        )
        .unwrap();
        assert_eq!(classify_element(&ell, tol), ElementClass::EllipticRegular);
        let big = ProjectiveMatrix::real(3.0, 0.0, 0.0, 1.0 / 3.0).unwrap().to_complex();
        assert_eq!(classify_element(&big, tol), ElementClass::Loxodromic);
    }

    #[test]
    fn construction_normalizes_and_rejects() {
        let m = ProjectiveMatrix::real(2.0, 0.0, 0.0, 2.0).unwrap();
        assert!((m.det().re - 1.0).abs() <= DET_TOL);
        assert!(matches!(
            ProjectiveMatrix::real(1.0, 0.0, 0.0, -1.0),
            Err(MoebiusError::NonPositiveDeterminant(_))
        ));
        assert_eq!(ProjectiveMatrix::real(1.0, 2.0, 2.0, 4.0), Err(MoebiusError::NonPositiveDeterminant(0.0)));
    }

    #[test]
    fn quarter_turn_rotation_data() {
        let (theta, centre) = rotation_data(&quarter(), DEFAULT_TOL).unwrap();
        assert!((theta - PI).abs() < 1e-12);
        assert!(centre.distance(&HPoint::i()) < 1e-12);
    }

    #[test]
    fn half_angle_matrix_against_derivative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let i = Complex64::i();
        for _ in 0..100 {
            let theta: f64 = rng.gen_range(0.05..TAU - 0.05);
            let (s, c) = (theta / 2.0).sin_cos();
            let m = ProjectiveMatrix::real(c, -s, s, c).unwrap();
            let h = 1e-6;
            let derivative = (m.act(i + h) - m.act(i - h)) / (2.0 * h);
            let oracle = derivative.arg().rem_euclid(TAU);
            let (t, centre) = rotation_data(&m, DEFAULT_TOL).unwrap();
            assert!(centre.distance(&HPoint::i()) < 1e-12);
            assert!((t - oracle).abs() < 1e-6, "{t} vs {oracle}");
            // this matrix turns clockwise by θ about i
            assert!((t - (TAU - theta)).abs() < 1e-9);
        }
    }

    #[test]
    fn rotation_about_i_by_pi_is_the_quarter_matrix() {
        let r = rotation_about(&HPoint::i(), PI).unwrap();
        assert!(r.approx_eq(&quarter(), 1e-12));
    }

    #[test]
    fn rotation_about_two_i_matches_direct_conjugation() {
        let g = ProjectiveMatrix::real(2f64.sqrt(), 0.0, 0.0, 1.0 / 2f64.sqrt()).unwrap();
        let expected = quarter().conjugate_by(&g);
        let r = rotation_about(&HPoint::new(0.0, 2.0).unwrap(), PI).unwrap();
        assert!(r.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn inverse_rotations_cancel() {
        let p = HPoint::new(0.3, 1.7).unwrap();
        let r = rotation_about(&p, 1.1).unwrap() * rotation_about(&p, TAU - 1.1).unwrap();
        assert_eq!(classify_element(&r, DEFAULT_TOL), ElementClass::Identity);
    }

    #[test]
    fn round_trip_at_i() {
        for theta in [0.1, FRAC_PI_2, 5.0] {
            let (t, c) = rotation_data(&rotation_about(&HPoint::i(), theta).unwrap(), DEFAULT_TOL).unwrap();
            assert!((t - theta).abs() < 1e-12);
            assert!(c.distance(&HPoint::i()) < 1e-12);
        }
    }

    #[test]
    fn degenerate_angles_rejected() {
        assert!(matches!(rotation_about(&HPoint::i(), 0.0), Err(MoebiusError::DegenerateAngle(_))));
        assert!(matches!(rotation_about(&HPoint::i(), TAU), Err(MoebiusError::DegenerateAngle(_))));
    }

    #[test]
    fn rotation_data_rejects_other_classes() {
        let hyp = ProjectiveMatrix::real(2.0, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(
            rotation_data(&hyp, DEFAULT_TOL),
            Err(MoebiusError::NotRegularElliptic(ElementClass::Hyperbolic))
        );
    }

    #[test]
    fn reflection_in_imaginary_axis() {
        let s = reflection(&Geodesic::imaginary_axis());
        let z = Complex64::new(0.4, 2.5);
        let w = s.act(z);
        assert!((w - Complex64::new(-0.4, 2.5)).norm() < 1e-14);
        let id = s.compose(&s).as_moebius(1e-14).unwrap();
        assert!(id.is_identity(1e-12));
    }

    #[test]
    fn reflection_fixes_its_geodesic() {
        let p = HPoint::new(-0.5, 0.8).unwrap();
        let q = HPoint::new(1.5, 0.3).unwrap();
        let g = Geodesic::through(&p, &q).unwrap();
        assert!(g.contains(&p, 1e-12) && g.contains(&q, 1e-12));
        let s = reflection(&g);
        for pt in [p, q] {
            assert!((s.act(pt.z()) - pt.z()).norm() < 1e-12);
        }
    }

    #[test]
    fn commutator_examples() {
        let a = rotation_about(&HPoint::i(), FRAC_PI_2).unwrap();
        let x = rotation_about(&HPoint::i(), 1.3).unwrap();
        let (class, _) = commutator_class(&a, &x, DEFAULT_TOL).unwrap();
        assert_eq!(class, ElementClass::Identity);

        let par = ProjectiveMatrix::real(1.0, 1.0, 0.0, 1.0).unwrap();
        let (class, comm) = commutator_class(&a, &par, DEFAULT_TOL).unwrap();
        assert_eq!(class, ElementClass::Hyperbolic);
        assert!((comm.abs_trace() - 2.5).abs() < 1e-12);

        let id = ProjectiveMatrix::identity(Field::Real);
        let hyp = ProjectiveMatrix::real(2.0, 1.0, 3.0, 2.0).unwrap();
        assert_eq!(commutator_class(&id, &hyp, DEFAULT_TOL).unwrap().0, ElementClass::Identity);
        assert_eq!(
            commutator_class(&hyp, &a, DEFAULT_TOL).unwrap_err(),
            MoebiusError::NotElliptic(ElementClass::Hyperbolic)
        );
    }

    #[test]
    fn json_shapes() {
        let m = quarter();
        assert_eq!(serde_json::to_string(&m).unwrap(), "[0.0,-1.0,1.0,0.0]");
        let c = m.to_complex();
        let v: Vec<f64> = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(v.len(), 8);
        let p: HPoint = serde_json::from_str(r#"{"re": 1.5, "im": 2.0}"#).unwrap();
        assert_eq!(p, HPoint::new(1.5, 2.0).unwrap());
        assert!(serde_json::from_str::<HPoint>(r#"{"re": 1.5, "im": -2.0}"#).is_err());
    }

    #[test]
    fn along_moves_by_the_requested_distance() {
        let p = HPoint::new(0.7, 0.4).unwrap();
        for (phi, t) in [(0.0, 1.0), (2.0, 0.3), (4.5, 2.2)] {
            let q = p.along(phi, t);
            assert!((p.distance(&q) - t).abs() < 1e-10);
        }
        let up = HPoint::i().along(0.0, 1.0);
        assert!(up.re().abs() < 1e-12 && (up.im() - 1f64.exp()).abs() < 1e-10);
    }
}
