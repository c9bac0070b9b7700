//! Triangle chains of punctured-sphere representations and the
//! construction of representations from triangle data.
//!
//! For a representation `ρ` of the `n`-punctured sphere, the peripheral
//! centres `Cⱼ` and the centres `Bᵢ` of the pants curves
//! `bᵢ = (c₁⋯c_{i+1})⁻¹` form the triangles
//! `(C₁,C₂,B₁), (B₁,C₃,B₂), …, (B_{n−3},C_{n−1},Cₙ)`. Each triangle carries
//! a triple of rotation angles; an anticlockwise triangle has interior
//! angles equal to half of them, a clockwise triangle has interior angles
//! `π − θ/2`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moebius::{
    classify_element, rotation_about, rotation_data, ElementClass, Field, HPoint, MoebiusError,
    ProjectiveMatrix,
};
use crate::rep::{validate_angles, RepError, Representation};
use crate::surface::{Generator, Letter, SurfaceError, SurfacePresentation, Word};

/// Default degeneracy threshold for [`triangle_orientation`].
pub const TOL_AREA: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("image of {0} is not regular elliptic")]
    NotRegular(Word),
    #[error("angle data are outside the DT band: {0}")]
    Infeasible(String),
    #[error("triangle {triangle} has angle sum within tolerance of π")]
    NumericalCollapse { triangle: usize },
    #[error("total angle {0} is outside the DT band")]
    OutsideDtBand(f64),
    #[error("representation is not real")]
    NotReal,
    #[error("index {index} is outside 1..={max}")]
    InvalidIndex { index: u32, max: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PantsConfiguration {
    Degenerate,
    AntiClockwise,
    Clockwise,
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "ccw")]
    AntiClockwise,
    #[serde(rename = "cw")]
    Clockwise,
    #[serde(rename = "degenerate")]
    Degenerate,
}

/// Case table for the three-punctured sphere with peripheral angles `alpha`.
pub fn pants_configuration(alpha: [f64; 3], tol: f64) -> PantsConfiguration {
    let total: f64 = alpha.iter().sum();
    if (total - TAU).abs() <= tol || (total - 2.0 * TAU).abs() <= tol {
        PantsConfiguration::Degenerate
    } else if total < TAU {
        PantsConfiguration::AntiClockwise
    } else if total > 2.0 * TAU {
        PantsConfiguration::Clockwise
    } else {
        PantsConfiguration::Empty
    }
}

/// Orientation of the geodesic triangle `(p, q, r)`.
///
/// Measured in the disk chart centred at `p`, where geodesics through `p`
/// are straight: the sign of `Im(r′ · conj(q′))` decides, and magnitudes up
/// to `tol_area` count as degenerate.
pub fn triangle_orientation(p: &HPoint, q: &HPoint, r: &HPoint, tol_area: f64) -> Orientation {
    let wq = p.disk_chart(q.z());
    let wr = p.disk_chart(r.z());
    let s = (wr * wq.conj()).im;
    if s.abs() <= tol_area {
        Orientation::Degenerate
    } else if s > 0.0 {
        Orientation::AntiClockwise
    } else {
        Orientation::Clockwise
    }
}

/// The triangle chain of a punctured-sphere representation.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleChain {
    pub c_vertices: Vec<HPoint>,
    pub b_vertices: Vec<HPoint>,
    pub beta: Vec<f64>,
    pub orientations: Vec<Orientation>,
}

impl TriangleChain {
    /// Vertex triples in chain order.
    pub fn triangles(&self) -> Vec<[HPoint; 3]> {
        let n = self.c_vertices.len();
        let c = &self.c_vertices;
        let b = &self.b_vertices;
        if n == 3 {
            return vec![[c[0], c[1], c[2]]];
        }
        (1..=n - 2)
            .map(|t| {
                let first = if t == 1 { c[0] } else { b[t - 2] };
                let last = if t == n - 2 { c[n - 1] } else { b[t - 1] };
                [first, c[t], last]
            })
            .collect()
    }

    /// The common orientation of the non-degenerate triangles, if any.
    pub fn coherent_orientation(&self) -> Option<Orientation> {
        let mut found = None;
        for &o in &self.orientations {
            if o == Orientation::Degenerate {
                continue;
            }
            match found {
                None => found = Some(o),
                Some(f) if f == o => {}
                Some(_) => return None,
            }
        }
        found
    }

    pub fn all_degenerate(&self) -> bool {
        self.orientations.iter().all(|&o| o == Orientation::Degenerate)
    }
}

#[derive(Serialize, Deserialize)]
struct RawChain {
    #[serde(rename = "C")]
    c: Vec<[f64; 2]>,
    #[serde(rename = "B")]
    b: Vec<[f64; 2]>,
    beta: Vec<f64>,
    orientations: Vec<Orientation>,
}

impl Serialize for TriangleChain {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pair = |p: &HPoint| [p.re(), p.im()];
        RawChain {
            c: self.c_vertices.iter().map(pair).collect(),
            b: self.b_vertices.iter().map(pair).collect(),
            beta: self.beta.clone(),
            orientations: self.orientations.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TriangleChain {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawChain::deserialize(deserializer)?;
        let point = |[x, y]: [f64; 2]| HPoint::new(x, y).map_err(serde::de::Error::custom);
        Ok(TriangleChain {
            c_vertices: raw.c.into_iter().map(point).collect::<Result<_, _>>()?,
            b_vertices: raw.b.into_iter().map(point).collect::<Result<_, _>>()?,
            beta: raw.beta,
            orientations: raw.orientations,
        })
    }
}

fn c_prefix(k: u32) -> Word {
    Word::new((1..=k).map(|j| Letter::new(Generator::C(j), false)))
}

/// The pants word `bᵢ = (c₁⋯c_{i+1})⁻¹`.
pub fn pants_word(i: u32) -> Word {
    c_prefix(i + 1).inverse()
}

fn regular_centre(r: &Representation, w: &Word) -> Result<(f64, HPoint), ChainError> {
    let m = r.evaluate(w)?.to_real(r.tol()).map_err(|_| ChainError::NotReal)?;
    if classify_element(&m, r.tol()) != ElementClass::EllipticRegular {
        return Err(ChainError::NotRegular(w.clone()));
    }
    Ok(rotation_data(&m, r.tol())?)
}

fn require_sphere(p: &SurfacePresentation) -> Result<(), ChainError> {
    if p.genus() != 0 {
        return Err(SurfaceError::WrongGenus(p.genus()).into());
    }
    if p.punctures() < 3 {
        return Err(SurfaceError::TooFewPunctures {
            needed: 3,
            got: p.punctures(),
        }
        .into());
    }
    Ok(())
}

/// Builds the triangle chain with the default degeneracy threshold.
pub fn build_chain(r: &Representation) -> Result<TriangleChain, ChainError> {
    build_chain_with(r, TOL_AREA)
}

pub fn build_chain_with(r: &Representation, tol_area: f64) -> Result<TriangleChain, ChainError> {
    let p = r.presentation();
    require_sphere(p)?;
    let n = p.punctures();
    let c_vertices = (1..=n)
        .map(|j| regular_centre(r, &Word::generator(Generator::C(j))).map(|(_, c)| c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut b_vertices = Vec::new();
    let mut beta = Vec::new();
    for i in 1..=n.saturating_sub(3) {
        let (theta, centre) = regular_centre(r, &pants_word(i))?;
        beta.push(theta);
        b_vertices.push(centre);
    }
    let mut chain = TriangleChain {
        c_vertices,
        b_vertices,
        beta,
        orientations: Vec::new(),
    };
    chain.orientations = chain
        .triangles()
        .iter()
        .map(|[a, b, c]| triangle_orientation(a, b, c, tol_area))
        .collect();
    Ok(chain)
}

/// At least one non-degenerate triangle, and all non-degenerate triangles
/// share one orientation.
pub fn is_dt_chain(ch: &TriangleChain) -> bool {
    ch.coherent_orientation().is_some()
}

/// Nested feasibility intervals for the pants angles and a chosen point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleBetas {
    pub orientation: Orientation,
    /// Open interval `(lower[k], upper[k])` of attainable values of `β_{k+1}`.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// The point with equal slack in every triangle constraint.
    pub beta: Vec<f64>,
}

fn anticlockwise_betas(alpha: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = alpha.len();
    let m = n.saturating_sub(3);
    if m == 0 {
        return (Vec::new(), Vec::new(), Vec::new());
    }
    let total: f64 = alpha.iter().sum();
    let share = (TAU - total) / (n - 2) as f64;
    let mut upper = vec![0.0; m];
    let mut lower = vec![0.0; m];
    let mut beta = vec![0.0; m];
    upper[0] = TAU - alpha[0] - alpha[1];
    beta[0] = TAU - share - alpha[0] - alpha[1];
    for k in 1..m {
        upper[k] = upper[k - 1] - alpha[k + 1];
        beta[k] = beta[k - 1] - alpha[k + 1] - share;
    }
    lower[m - 1] = alpha[n - 2] + alpha[n - 1];
    for k in (0..m - 1).rev() {
        lower[k] = lower[k + 1] + alpha[k + 2];
    }
    (lower, upper, beta)
}

fn mirror(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| TAU - x).collect()
}

/// Pants angles compatible with a coherently oriented chain.
pub fn dt_feasible_betas(alpha: &[f64], orientation: Orientation) -> Result<FeasibleBetas, ChainError> {
    let n = alpha.len();
    if n < 3 {
        return Err(SurfaceError::TooFewPunctures {
            needed: 3,
            got: n as u32,
        }
        .into());
    }
    validate_angles(alpha, n)?;
    let total: f64 = alpha.iter().sum();
    match orientation {
        Orientation::AntiClockwise => {
            if !(total < TAU) {
                return Err(ChainError::Infeasible(format!(
                    "anticlockwise chains need total angle below 2π, got {total}"
                )));
            }
            let (lower, upper, beta) = anticlockwise_betas(alpha);
            Ok(FeasibleBetas {
                orientation,
                lower,
                upper,
                beta,
            })
        }
        Orientation::Clockwise => {
            if !(total > TAU * (n - 1) as f64) {
                return Err(ChainError::Infeasible(format!(
                    "clockwise chains need total angle above 2π(n−1), got {total}"
                )));
            }
            let (lower, upper, beta) = anticlockwise_betas(&mirror(alpha));
            Ok(FeasibleBetas {
                orientation,
                lower: mirror(&upper),
                upper: mirror(&lower),
                beta: mirror(&beta),
            })
        }
        Orientation::Degenerate => Err(ChainError::Infeasible(
            "degenerate chains carry no DT data".to_string(),
        )),
    }
}

/// Orientation of the DT band containing `alpha`, if any.
pub fn dt_orientation(alpha: &[f64]) -> Option<Orientation> {
    let total: f64 = alpha.iter().sum();
    let n = alpha.len() as f64;
    if total < TAU {
        Some(Orientation::AntiClockwise)
    } else if total > TAU * (n - 1.0) {
        Some(Orientation::Clockwise)
    } else {
        None
    }
}

/// Toledo number of the DT component with peripheral angles `alpha`.
pub fn toledo_dt(alpha: &[f64]) -> Result<f64, ChainError> {
    let total: f64 = alpha.iter().sum();
    let n = alpha.len() as f64;
    match dt_orientation(alpha) {
        Some(Orientation::AntiClockwise) => Ok(1.0 - total / TAU),
        Some(_) => Ok((n - 1.0) - total / TAU),
        None => Err(ChainError::OutsideDtBand(total)),
    }
}

/// Rotation-angle triples of the chain triangles.
pub fn triangle_angle_triples(alpha: &[f64], beta: &[f64]) -> Vec<[f64; 3]> {
    let n = alpha.len();
    if n == 3 {
        return vec![[alpha[0], alpha[1], alpha[2]]];
    }
    (1..=n - 2)
        .map(|t| {
            let first = if t == 1 { alpha[0] } else { TAU - beta[t - 2] };
            let last = if t == n - 2 { alpha[n - 1] } else { beta[t - 1] };
            [first, alpha[t], last]
        })
        .collect()
}

/// Interior angles of a triangle with the given rotation angles.
pub fn interior_angles(theta: [f64; 3], orientation: Orientation) -> [f64; 3] {
    match orientation {
        Orientation::Clockwise => theta.map(|t| PI - t / 2.0),
        _ => theta.map(|t| t / 2.0),
    }
}

/// Length of the side joining the vertices with angles `a` and `b`.
pub fn side_between(a: f64, b: f64, opposite: f64) -> f64 {
    ((opposite.cos() + a.cos() * b.cos()) / (a.sin() * b.sin())).max(1.0).acosh()
}

/// A punctured-sphere representation whose chain has the requested
/// orientation in every triangle.
///
/// `beta` are the pants rotation angles. Each triangle's rotation-angle
/// triple must sum to less than 2π (anticlockwise) or more than 4π
/// (clockwise). The first peripheral centre is `i`, the second lies above it
/// on the imaginary axis, and every later vertex is placed in a direction
/// drawn from `seed`.
pub fn construct_chain_representation(
    alpha: &[f64],
    beta: &[f64],
    orientations: &[Orientation],
    seed: u64,
    tol: f64,
) -> Result<Representation, ChainError> {
    let n = alpha.len();
    let p = SurfacePresentation::sphere(n as u32)?;
    require_sphere(&p)?;
    validate_angles(alpha, n)?;
    validate_angles(beta, n - 3)?;
    let triples = triangle_angle_triples(alpha, beta);
    if orientations.len() != triples.len() {
        return Err(ChainError::Infeasible(format!(
            "{} orientations for {} triangles",
            orientations.len(),
            triples.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prefix: Vec<ProjectiveMatrix> = Vec::with_capacity(n - 1);
    let mut product = ProjectiveMatrix::identity(Field::Real);
    let mut anchor = HPoint::i();
    for (t, (theta, &o)) in triples.iter().zip(orientations).enumerate() {
        let sum: f64 = theta.iter().sum();
        let ok = match o {
            Orientation::AntiClockwise => sum < TAU,
            Orientation::Clockwise => sum > 2.0 * TAU,
            Orientation::Degenerate => false,
        };
        if !ok {
            return Err(ChainError::Infeasible(format!(
                "triangle {} has rotation angles {theta:?}, incompatible with {o:?}",
                t + 1
            )));
        }
        let [a, b, c] = interior_angles(*theta, o);
        if a + b + c >= PI - tol {
            return Err(ChainError::NumericalCollapse { triangle: t + 1 });
        }
        let d = side_between(a, b, c);
        if t == 0 {
            let c1 = rotation_about(&anchor, alpha[0])?;
            prefix.push(c1);
            product = c1;
        }
        let direction = if t == 0 { 0.0 } else { rng.gen::<f64>() * TAU };
        let m = rotation_about(&anchor.along(direction, d), alpha[t + 1])?;
        prefix.push(m);
        product = product * m;
        if t + 1 < triples.len() {
            let pants = pants_word(t as u32 + 1);
            anchor = rotation_data(&product.inverse(), tol)
                .map_err(|_| ChainError::NotRegular(pants))?
                .1;
        }
    }
    Ok(Representation::sphere_from_prefix(p, Field::Real, prefix, tol)?)
}

/// A representation in the DT component with peripheral angles `alpha`.
///
/// `beta` defaults to the equal-slack point of [`dt_feasible_betas`].
/// Clockwise data are handled by building the mirrored anticlockwise
/// representation and conjugating by the reflection `z ↦ −z̄`.
pub fn construct_dt(
    alpha: &[f64],
    beta: Option<&[f64]>,
    seed: u64,
    tol: f64,
) -> Result<Representation, ChainError> {
    let n = alpha.len();
    if n < 3 {
        return Err(SurfaceError::TooFewPunctures {
            needed: 3,
            got: n as u32,
        }
        .into());
    }
    validate_angles(alpha, n)?;
    let orientation = dt_orientation(alpha)
        .ok_or_else(|| ChainError::Infeasible(format!("total angle {} outside the DT band", alpha.iter().sum::<f64>())))?;
    let beta = match beta {
        Some(b) => {
            validate_angles(b, n - 3)?;
            b.to_vec()
        }
        None => dt_feasible_betas(alpha, orientation)?.beta,
    };
    match orientation {
        Orientation::AntiClockwise => {
            let o = vec![Orientation::AntiClockwise; n - 2];
            construct_chain_representation(alpha, &beta, &o, seed, tol)
        }
        _ => {
            let o = vec![Orientation::AntiClockwise; n - 2];
            let r = construct_chain_representation(&mirror(alpha), &mirror(&beta), &o, seed, tol)?;
            let images = r
                .images()
                .iter()
                .map(|m| {
                    let [a, b, c, d] = m.real_entries().expect("real");
                    ProjectiveMatrix::real(a, -b, -c, d)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Representation::new(*r.presentation(), Field::Real, images, tol)?)
        }
    }
}

/// The four-punctured sub-sphere representation around pants curves
/// `b_{i−1}` and `b_{i+1}`, with peripheral images
/// `ρ(b_{i−1})⁻¹, ρ(c_{i+1}), ρ(c_{i+2}), ρ(b_{i+1})`, where `b₀ = c₁⁻¹` and
/// `b_{n−2} = cₙ`.
pub fn restrict_subsphere(r: &Representation, i: u32) -> Result<Representation, ChainError> {
    let p = r.presentation();
    require_sphere(p)?;
    let n = p.punctures();
    let max = n.saturating_sub(3);
    if i < 1 || i > max {
        return Err(ChainError::InvalidIndex { index: i, max });
    }
    if n == 4 {
        return Ok(r.clone());
    }
    let b = |k: u32| -> Word {
        if k == 0 {
            Word::generator(Generator::C(1)).inverse()
        } else if k == n - 2 {
            Word::generator(Generator::C(n))
        } else {
            pants_word(k)
        }
    };
    for w in [b(i - 1), b(i), b(i + 1)] {
        regular_centre(r, &w)?;
    }
    let first = r.evaluate(&b(i - 1))?.inverse();
    let c_next = r.peripheral(i + 1);
    let c_after = r.peripheral(i + 2);
    let images = vec![first, c_next, c_after, (first * c_next * c_after).inverse()];
    let q = SurfacePresentation::sphere(4)?;
    Ok(Representation::new(q, r.field(), images, r.tol())?)
}
