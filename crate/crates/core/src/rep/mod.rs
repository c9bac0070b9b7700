//! Surface-group representations into PSL(2,R) and PSL(2,C).

mod certify;
mod orbit;
mod sample;

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::moebius::{
    classify_element, rotation_about, rotation_data, ElementClass, Field, HPoint, MoebiusError,
    ProjectiveMatrix, DEFAULT_TOL,
};
use crate::surface::{
    relation_word, Generator, SurfaceError, SurfacePresentation, TwistWindow, Word,
};

pub use certify::{certify_totally_elliptic, curve_stream, CertifyStatus, EllipticityReport};
pub use orbit::{run_orbit, OrbitRun};
pub use sample::{random_disk_point, sample_relative, EmptyReport, SampleConfig, SampleOutcome};

/// Hyperbolic distance under which two rotation centres count as equal.
pub const CENTRE_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error("expected {expected} generator images, got {got}")]
    WrongImageCount { expected: usize, got: usize },
    #[error("no image given for generator {0}")]
    MissingImage(String),
    #[error("image key {0:?} is not a generator of the presentation")]
    UnexpectedImage(String),
    #[error("a complex image was given for a real representation")]
    FieldMismatch,
    #[error("relation residual {residual:e} exceeds tolerance {tol:e}")]
    RelationResidual { residual: f64, tol: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("peripheral image of c{0} is not regular elliptic")]
    NonEllipticPeripheral(u32),
    #[error("angle {0} is outside (0, 2π)")]
    InvalidAngle(f64),
    #[error("expected {expected} angles, got {got}")]
    WrongAngleCount { expected: usize, got: usize },
}

/// A homomorphism from a surface group, stored as generator images.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    presentation: SurfacePresentation,
    field: Field,
    images: Vec<ProjectiveMatrix>,
    tol: f64,
}

impl Representation {
    /// Validates field, image count and the relation residual.
    ///
    /// `images` follow [`SurfacePresentation::generators`]. Real images are
    /// promoted when `field` is complex.
    pub fn new(
        presentation: SurfacePresentation,
        field: Field,
        images: Vec<ProjectiveMatrix>,
        tol: f64,
    ) -> Result<Self, RepError> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(RepError::BadTolerance(tol));
        }
        let expected = presentation.generator_count();
        if images.len() != expected {
            return Err(RepError::WrongImageCount {
                expected,
                got: images.len(),
            });
        }
        let images = images
            .into_iter()
            .map(|m| match (field, m.field()) {
                (Field::Complex, _) => Ok(m.to_complex()),
                (Field::Real, Field::Real) => Ok(m),
                (Field::Real, Field::Complex) => m.to_real(tol).map_err(|_| RepError::FieldMismatch),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let r = Self::from_parts(presentation, field, images, tol);
        let residual = r.relation_residual();
        if !(residual <= tol) {
            return Err(RepError::RelationResidual { residual, tol });
        }
        Ok(r)
    }

    /// Skips validation; used where the relation holds by construction
    /// but entry growth defeats an absolute residual check.
    pub(crate) fn from_parts(
        presentation: SurfacePresentation,
        field: Field,
        images: Vec<ProjectiveMatrix>,
        tol: f64,
    ) -> Self {
        Self {
            presentation,
            field,
            images,
            tol,
        }
    }

    /// A genus-0 representation whose last peripheral image is forced by
    /// the relation.
    pub fn sphere_from_prefix(
        presentation: SurfacePresentation,
        field: Field,
        prefix: Vec<ProjectiveMatrix>,
        tol: f64,
    ) -> Result<Self, RepError> {
        let id = ProjectiveMatrix::identity(field);
        let product = prefix.iter().fold(id, |acc, m| acc * *m);
        let mut images = prefix;
        images.push(product.inverse());
        Self::new(presentation, field, images, tol)
    }

    pub fn presentation(&self) -> &SurfacePresentation {
        &self.presentation
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn images(&self) -> &[ProjectiveMatrix] {
        &self.images
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn image(&self, g: Generator) -> Result<ProjectiveMatrix, RepError> {
        let k = self
            .presentation
            .position(g)
            .ok_or(SurfaceError::UnknownSymbol(g))?;
        Ok(self.images[k])
    }

    /// Image of the `j`-th peripheral generator (1-based).
    pub fn peripheral(&self, j: u32) -> ProjectiveMatrix {
        self.image(Generator::C(j)).expect("index within punctures")
    }

    /// `ρ(w)`, multiplying generator images left to right.
    pub fn evaluate(&self, w: &Word) -> Result<ProjectiveMatrix, RepError> {
        let mut acc = ProjectiveMatrix::identity(self.field);
        for l in w.letters() {
            let m = self.image(l.generator)?;
            acc = acc * if l.inverse { m.inverse() } else { m };
        }
        Ok(acc)
    }

    /// Max-entry distance of `ρ(relation)` from `±I`.
    pub fn relation_residual(&self) -> f64 {
        self.evaluate(&relation_word(&self.presentation))
            .map(|m| m.distance_to_identity())
            .unwrap_or(f64::INFINITY)
    }

    /// `g ρ g⁻¹`.
    pub fn conjugate(&self, g: &ProjectiveMatrix) -> Self {
        let field = if g.field() == Field::Complex {
            Field::Complex
        } else {
            self.field
        };
        Self {
            field,
            images: self.images.iter().map(|m| m.conjugate_by(g)).collect(),
            ..self.clone()
        }
    }

    /// The same representation viewed in PSL(2,C).
    pub fn to_complex(&self) -> Self {
        Self {
            field: Field::Complex,
            images: self.images.iter().map(|m| m.to_complex()).collect(),
            ..self.clone()
        }
    }

    /// No peripheral generator maps to the identity.
    pub fn is_reduced(&self) -> bool {
        self.first_trivial_peripheral().is_none()
    }

    /// The first puncture whose peripheral image is the identity.
    pub fn first_trivial_peripheral(&self) -> Option<u32> {
        (1..=self.presentation.punctures())
            .find(|&j| classify_element(&self.peripheral(j), self.tol) == ElementClass::Identity)
    }

    pub fn peripheral_data(&self) -> Result<PeripheralData, RepError> {
        let mut alpha = Vec::with_capacity(self.presentation.punctures() as usize);
        for j in 1..=self.presentation.punctures() {
            let m = self
                .peripheral(j)
                .to_real(self.tol)
                .map_err(|_| RepError::NonEllipticPeripheral(j))?;
            let (theta, _) = rotation_data(&m, self.tol).map_err(|_| RepError::NonEllipticPeripheral(j))?;
            alpha.push(theta);
        }
        Ok(PeripheralData::new(alpha))
    }

    /// Whether the image lies in a single conjugate of PSO(2).
    pub fn orthogonality(&self) -> Orthogonality {
        let mut centre: Option<HPoint> = None;
        for m in &self.images {
            let Ok(m) = m.to_real(self.tol) else {
                return Orthogonality::NotOrthogonal;
            };
            match classify_element(&m, self.tol) {
                ElementClass::Identity => continue,
                ElementClass::EllipticRegular => {}
                _ => return Orthogonality::NotOrthogonal,
            }
            let (_, c) = rotation_data(&m, self.tol).expect("regular elliptic");
            match centre {
                None => centre = Some(c),
                Some(p) if p.distance(&c) <= CENTRE_TOL => {}
                Some(_) => return Orthogonality::NotOrthogonal,
            }
        }
        match centre {
            None => Orthogonality::Trivial,
            Some(p) => Orthogonality::Centred(p),
        }
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonality() != Orthogonality::NotOrthogonal
    }

    /// The pure mapping class `T^k` for the twist along `window`, acting by
    /// `ρ′(w) = ρ(T^k(w))`.
    pub fn mcg_twist(&self, window: &TwistWindow, k: i32) -> Result<Self, RepError> {
        let p = &self.presentation;
        if p.genus() != 0 {
            return Err(SurfaceError::WrongGenus(p.genus()).into());
        }
        let window = TwistWindow::new(window.start(), window.end(), p)?;
        if k == 0 {
            return Ok(self.clone());
        }
        let gamma = self.evaluate(&window.curve())?;
        let step = if k > 0 { gamma } else { gamma.inverse() };
        let mut power = ProjectiveMatrix::identity(self.field);
        for _ in 0..k.unsigned_abs() {
            power = power * step;
        }
        let images = p
            .generators()
            .into_iter()
            .zip(&self.images)
            .map(|(g, m)| match g {
                Generator::C(j) if window.contains(j) => power.inverse() * *m * power,
                _ => *m,
            })
            .collect();
        Ok(Self::from_parts(*p, self.field, images, self.tol))
    }

    /// Conjugates so that the first regular elliptic generator image is
    /// centred at `i` and the next one with a different centre is centred
    /// on the imaginary axis above `i`. Returns `self` unchanged when no
    /// generator image is regular elliptic.
    pub fn normalized(&self) -> Self {
        let Some(reals) = self
            .images
            .iter()
            .map(|m| m.to_real(self.tol).ok())
            .collect::<Option<Vec<_>>>()
        else {
            return self.clone();
        };
        let centres: Vec<HPoint> = reals
            .iter()
            .filter(|m| classify_element(m, self.tol) == ElementClass::EllipticRegular)
            .filter_map(|m| rotation_data(m, self.tol).ok().map(|(_, c)| c))
            .collect();
        let Some(first) = centres.first() else {
            return self.clone();
        };
        let (x, y) = (first.re(), first.im());
        let s = y.sqrt();
        let lift = ProjectiveMatrix::real(1.0 / s, -x / s, 0.0, s).expect("positive determinant");
        let mut g = lift;
        if let Some(second) = centres.iter().find(|c| c.distance(first) > CENTRE_TOL) {
            let moved = lift.act_point(*second);
            let phi = -HPoint::i().disk_chart(moved.z()).arg();
            if let Ok(rot) = rotation_about(&HPoint::i(), phi.rem_euclid(TAU)) {
                g = rot * lift;
            }
        }
        self.conjugate(&g)
    }
}

/// Outcome of [`Representation::orthogonality`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Orthogonality {
    NotOrthogonal,
    /// Every generator maps to the identity.
    Trivial,
    /// Every non-trivial generator image is a rotation about this point.
    Centred(HPoint),
}

/// Peripheral rotation angles of a reduced representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeripheralData {
    pub alpha: Vec<f64>,
    pub total: f64,
}

impl PeripheralData {
    pub fn new(alpha: Vec<f64>) -> Self {
        let total = alpha.iter().sum();
        Self { alpha, total }
    }
}

/// Checks that each angle lies in `(0, 2π)`.
pub fn validate_angles(alpha: &[f64], expected: usize) -> Result<(), RepError> {
    if alpha.len() != expected {
        return Err(RepError::WrongAngleCount {
            expected,
            got: alpha.len(),
        });
    }
    match alpha.iter().find(|a| !(a.is_finite() && **a > 0.0 && **a < TAU)) {
        Some(&a) => Err(RepError::InvalidAngle(a)),
        None => Ok(()),
    }
}

impl Serialize for Representation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Images<'a>(&'a Representation);
        impl Serialize for Images<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let gens = self.0.presentation.generators();
                let mut map = serializer.serialize_map(Some(gens.len()))?;
                for (g, m) in gens.iter().zip(&self.0.images) {
                    map.serialize_entry(&g.to_string(), m)?;
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(4))?;
        map.serialize_entry("presentation", &self.presentation)?;
        map.serialize_entry("field", &self.field)?;
        map.serialize_entry("images", &Images(self))?;
        map.serialize_entry("tol", &self.tol)?;
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRepresentation {
    presentation: SurfacePresentation,
    field: Field,
    images: BTreeMap<String, ProjectiveMatrix>,
    #[serde(default = "default_tol")]
    tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl TryFrom<RawRepresentation> for Representation {
    type Error = RepError;

    fn try_from(raw: RawRepresentation) -> Result<Self, RepError> {
        let gens = raw.presentation.generators();
        let names: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
        if let Some(extra) = raw.images.keys().find(|k| !names.contains(k)) {
            return Err(RepError::UnexpectedImage(extra.clone()));
        }
        let images = names
            .iter()
            .map(|name| raw.images.get(name).copied().ok_or_else(|| RepError::MissingImage(name.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Representation::new(raw.presentation, raw.field, images, raw.tol)
    }
}

impl<'de> Deserialize<'de> for Representation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawRepresentation::deserialize(deserializer)?;
        Representation::try_from(raw).map_err(serde::de::Error::custom)
    }
}
