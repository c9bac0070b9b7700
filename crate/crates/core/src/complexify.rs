//! PSL(2,C) tools: irreducibility and unitarity tests, the upper-triangular
//! cocycle calculus and reducible non-unitary examples on punctured spheres.
//!
//! An upper-triangular element is written `[[λ, λ⁻¹z], [0, λ⁻¹]]`; products
//! then obey `λ(γ₁γ₂) = λ(γ₁)λ(γ₂)` and `z(γ₁γ₂) = z(γ₁) + λ(γ₁)² z(γ₂)`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moebius::{Field, MoebiusError, ProjectiveMatrix};
use crate::rep::{curve_stream, RepError, Representation};
use crate::surface::{
    relation_word, CurveClass, Generator, Letter, SccBudget, SurfaceError, SurfacePresentation, Word,
};

/// Relative tolerance for common-eigenline detection.
pub const EIGENLINE_TOL: f64 = 1e-7;
/// Band around `±1` excluded by condition (5) on products of `λ`.
pub const CONDITION_BAND: f64 = 1e-6;
/// Minkowski-norm threshold above which a positive-definite invariant form
/// is accepted.
pub const DEFINITE_ACCEPT: f64 = 1e-4;
/// Minkowski-norm threshold below which no positive-definite form exists.
pub const DEFINITE_REJECT: f64 = 1e-7;
/// Relative singular-value threshold defining the invariant-form space.
pub const NULL_TOL: f64 = 1e-9;
/// Relative singular values between [`NULL_TOL`] and this value make the
/// invariant-form solve ambiguous.
pub const NULL_GAP: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error("λ of c{indices:?} is within tolerance of ±1")]
    ConditionViolated { indices: Vec<u32> },
    #[error("c{0} maps to the identity")]
    NotReduced(u32),
    #[error("invariant-form solve is ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("|λ({0})| is not 1")]
    NotUnitModulus(String),
    #[error("data do not satisfy the surface relation")]
    RelationViolated,
}

/// A character `λ` and a cocycle `z` on the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperTriangularData {
    presentation: SurfacePresentation,
    lambda: Vec<Complex64>,
    z: Vec<Complex64>,
}

impl UpperTriangularData {
    pub fn new(
        presentation: SurfacePresentation,
        lambda: Vec<Complex64>,
        z: Vec<Complex64>,
        tol: f64,
    ) -> Result<Self, ComplexError> {
        let expected = presentation.generator_count();
        for v in [&lambda, &z] {
            if v.len() != expected {
                return Err(ComplexError::WrongLength {
                    expected,
                    got: v.len(),
                });
            }
        }
        for (g, l) in presentation.generators().iter().zip(&lambda) {
            if (l.norm() - 1.0).abs() > tol {
                return Err(ComplexError::NotUnitModulus(g.to_string()));
            }
        }
        let d = Self {
            presentation,
            lambda,
            z,
        };
        let (l, z) = cocycle_extend(&d, &relation_word(&presentation))?;
        let sign_ok = (l - 1.0).norm() <= tol || (l + 1.0).norm() <= tol;
        if !sign_ok || z.norm() > tol {
            return Err(ComplexError::RelationViolated);
        }
        Ok(d)
    }

    pub fn presentation(&self) -> &SurfacePresentation {
        &self.presentation
    }

    pub fn lambda(&self, g: Generator) -> Option<Complex64> {
        self.presentation.position(g).map(|k| self.lambda[k])
    }

    pub fn z(&self, g: Generator) -> Option<Complex64> {
        self.presentation.position(g).map(|k| self.z[k])
    }

    /// The matrix `[[λ, λ⁻¹z], [0, λ⁻¹]]`.
    pub fn matrix(lambda: Complex64, z: Complex64) -> ProjectiveMatrix {
        let zero = Complex64::new(0.0, 0.0);
        ProjectiveMatrix::complex(lambda, z / lambda, zero, lambda.inv()).expect("unit determinant")
    }

    pub fn to_representation(&self, tol: f64) -> Result<Representation, ComplexError> {
        let images = self
            .lambda
            .iter()
            .zip(&self.z)
            .map(|(&l, &z)| Self::matrix(l, z))
            .collect();
        Ok(Representation::new(self.presentation, Field::Complex, images, tol)?)
    }
}

/// `(λ(w), z(w))` by folding the cocycle rule over the letters of `w`.
pub fn cocycle_extend(d: &UpperTriangularData, w: &Word) -> Result<(Complex64, Complex64), ComplexError> {
    let mut lambda = Complex64::new(1.0, 0.0);
    let mut z = Complex64::new(0.0, 0.0);
    for l in w.letters() {
        let k = d
            .presentation
            .position(l.generator)
            .ok_or(SurfaceError::UnknownSymbol(l.generator))?;
        let (gl, gz) = (d.lambda[k], d.z[k]);
        let (gl, gz) = if l.inverse {
            (gl.inv(), -gz / (gl * gl))
        } else {
            (gl, gz)
        };
        z += lambda * lambda * gz;
        lambda *= gl;
    }
    Ok((lambda, z))
}

/// `[ρ(γ₁), ρ(γ₂)]` from the cocycle: unipotent with off-diagonal entry
/// `z(γ₁γ₂) − z(γ₂γ₁)`.
pub fn triangular_commutator(
    d: &UpperTriangularData,
    g1: &Word,
    g2: &Word,
) -> Result<ProjectiveMatrix, ComplexError> {
    let (_, z12) = cocycle_extend(d, &(g1.clone() * g2.clone()))?;
    let (_, z21) = cocycle_extend(d, &(g2.clone() * g1.clone()))?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(ProjectiveMatrix::complex(one, z12 - z21, zero, one)?)
}

fn eigenlines(m: &ProjectiveMatrix) -> Vec<[Complex64; 2]> {
    let [a, b, c, d] = m.entries();
    let tr = a + d;
    let disc = (tr * tr - 4.0).sqrt();
    let mut out = Vec::new();
    for mu in [(tr + disc) / 2.0, (tr - disc) / 2.0] {
        let u = [b, mu - a];
        let v = [mu - d, c];
        let nu = u[0].norm() + u[1].norm();
        let nv = v[0].norm() + v[1].norm();
        let best = if nu >= nv { u } else { v };
        let scale = best[0].norm().max(best[1].norm());
        if scale > 0.0 {
            out.push([best[0] / scale, best[1] / scale]);
        }
    }
    out
}

fn preserves(m: &ProjectiveMatrix, v: &[Complex64; 2], tol: f64) -> bool {
    let [a, b, c, d] = m.entries();
    let w = [a * v[0] + b * v[1], c * v[0] + d * v[1]];
    let cross = (v[0] * w[1] - v[1] * w[0]).norm();
    let scale = (v[0].norm() + v[1].norm()) * (w[0].norm() + w[1].norm());
    cross <= tol * scale.max(f64::MIN_POSITIVE)
}

/// No common eigenline for the generator images, tested on the generators
/// and 16 pseudo-random words.
pub fn is_irreducible(r: &Representation, tol: f64) -> bool {
    let p = r.presentation();
    let gens = p.generators();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut checks: Vec<ProjectiveMatrix> = r.images().to_vec();
    for _ in 0..16 {
        let len = rng.gen_range(2..=6);
        let w = Word::new((0..len).map(|_| {
            Letter::new(gens[rng.gen_range(0..gens.len())], rng.gen_bool(0.5))
        }));
        checks.push(r.evaluate(&w).expect("word over the presentation"));
    }
    let Some(pivot) = r.images().iter().find(|m| !m.is_identity(tol)) else {
        return false;
    };
    !eigenlines(pivot)
        .iter()
        .any(|v| checks.iter().all(|m| preserves(m, v, tol)))
}

/// A Hermitian form `[[p, q + ir], [q − ir, s]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermitianForm {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

impl HermitianForm {
    pub fn matrix(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.p, 0.0),
            Complex64::new(self.q, self.r),
            Complex64::new(self.q, -self.r),
            Complex64::new(self.s, 0.0),
        ]
    }

    pub fn det(&self) -> f64 {
        self.p * self.s - self.q * self.q - self.r * self.r
    }

    pub fn is_positive_definite(&self) -> bool {
        self.p > 0.0 && self.det() > 0.0
    }

    fn from_vec(v: [f64; 4]) -> Self {
        Self {
            p: v[0],
            q: v[1],
            r: v[2],
            s: v[3],
        }
    }
}

/// Outcome of [`is_unitary_conjugate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitarityCheck {
    pub unitary: bool,
    /// A positive-definite invariant form when unitary; otherwise the
    /// invariant form of largest determinant, if any form is invariant.
    pub form: Option<HermitianForm>,
    /// Dimension of the space of invariant Hermitian forms.
    pub form_space_dim: usize,
    /// Largest normalized determinant over the invariant-form space.
    pub max_det: f64,
}

fn invariance_residual(g: &ProjectiveMatrix, h: &[Complex64; 4]) -> [f64; 4] {
    let [a, b, c, d] = g.entries();
    let gs = [a.conj(), c.conj(), b.conj(), d.conj()];
    let mul = |x: &[Complex64; 4], y: &[Complex64; 4]| {
        [
            x[0] * y[0] + x[1] * y[2],
            x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3],
        ]
    };
    let out = mul(&mul(&gs, h), &[a, b, c, d]);
    [
        out[0].re - h[0].re,
        out[1].re - h[1].re,
        out[1].im - h[1].im,
        out[3].re - h[3].re,
    ]
}

/// Looks for a positive-definite Hermitian form preserved by every
/// generator image.
///
/// The invariance equations `g* H g = H` are linear in the four real
/// coordinates of `H`; on their solution space the determinant
/// `ps − q² − r²` is a Lorentzian quadratic form, and a positive-definite
/// solution exists exactly when it takes positive values there.
pub fn is_unitary_conjugate(r: &Representation) -> Result<UnitarityCheck, ComplexError> {
    let images = r.images();
    let basis = [
        HermitianForm::from_vec([1.0, 0.0, 0.0, 0.0]),
        HermitianForm::from_vec([0.0, 1.0, 0.0, 0.0]),
        HermitianForm::from_vec([0.0, 0.0, 1.0, 0.0]),
        HermitianForm::from_vec([0.0, 0.0, 0.0, 1.0]),
    ];
    let rows = 4 * images.len().max(1);
    let mut a = DMatrix::<f64>::zeros(rows.max(4), 4);
    for (k, g) in images.iter().enumerate() {
        let scale = g.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().max(1.0);
        for (col, h) in basis.iter().enumerate() {
            let res = invariance_residual(g, &h.matrix());
            for (i, v) in res.iter().enumerate() {
                a[(4 * k + i, col)] = v / scale;
            }
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let sigma_max = svd.singular_values.max().max(f64::MIN_POSITIVE);
    let mut null = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let rel = s / sigma_max;
        if rel <= NULL_TOL || s <= 1e-14 {
            null.push([v_t[(i, 0)], v_t[(i, 1)], v_t[(i, 2)], v_t[(i, 3)]]);
        } else if rel < NULL_GAP {
            return Err(ComplexError::IllConditioned(format!(
                "relative singular value {rel:e} between {NULL_TOL:e} and {NULL_GAP:e}"
            )));
        }
    }
    if images.is_empty() {
        null = basis.iter().map(|h| [h.p, h.q, h.r, h.s]).collect();
    }
    if null.is_empty() {
        return Ok(UnitarityCheck {
            unitary: false,
            form: None,
            form_space_dim: 0,
            max_det: f64::NEG_INFINITY,
        });
    }
    // determinant as a symmetric bilinear form in (p, q, r, s) coordinates
    let q = Matrix4::new(
        0.0, 0.0, 0.0, 0.5, //
        0.0, -1.0, 0.0, 0.0, //
        0.0, 0.0, -1.0, 0.0, //
        0.5, 0.0, 0.0, 0.0,
    );
    let k = null.len();
    let gram = DMatrix::<f64>::from_fn(k, k, |i, j| {
        let u = nalgebra::Vector4::from(null[i]);
        let v = nalgebra::Vector4::from(null[j]);
        (u.transpose() * q * v)[(0, 0)]
    });
    let eig = SymmetricEigen::new(gram);
    let (idx, &max_det) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let coeffs = eig.eigenvectors.column(idx);
    let mut v = [0.0; 4];
    for (c, basis_vec) in coeffs.iter().zip(&null) {
        for i in 0..4 {
            v[i] += c * basis_vec[i];
        }
    }
    let trace = v[0] + v[3];
    if trace < 0.0 || (trace == 0.0 && v[0] < 0.0) {
        v = v.map(|x| -x);
    }
    let form = HermitianForm::from_vec(v);
    if max_det > DEFINITE_ACCEPT {
        Ok(UnitarityCheck {
            unitary: true,
            form: Some(form),
            form_space_dim: k,
            max_det,
        })
    } else if max_det < DEFINITE_REJECT {
        Ok(UnitarityCheck {
            unitary: false,
            form: Some(form),
            form_space_dim: k,
            max_det,
        })
    } else {
        Err(ComplexError::IllConditioned(format!(
            "largest invariant-form determinant {max_det:e} is too close to 0"
        )))
    }
}

/// Conjugates a representation preserving an indefinite Hermitian form into
/// PSL(2,R). Returns `None` unless the invariant forms are one-dimensional
/// and of negative determinant.
pub fn real_form_conjugate(r: &Representation, tol: f64) -> Result<Option<Representation>, ComplexError> {
    let check = is_unitary_conjugate(r)?;
    let Some(h) = check.form else {
        return Ok(None);
    };
    if check.form_space_dim != 1 || h.det() >= -DEFINITE_REJECT {
        return Ok(None);
    }
    // H = U diag(μ₁, μ₂) U* with μ₁ > 0 > μ₂
    let b = Complex64::new(h.q, h.r);
    let half_sum = (h.p + h.s) / 2.0;
    let rad = (((h.p - h.s) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    let (mu1, mu2) = (half_sum + rad, half_sum - rad);
    let eigvec = |mu: f64| -> [Complex64; 2] {
        let u = [b, Complex64::new(mu - h.p, 0.0)];
        let v = [Complex64::new(mu - h.s, 0.0), b.conj()];
        let pick = if u[0].norm() + u[1].norm() >= v[0].norm() + v[1].norm() { u } else { v };
        let n = (pick[0].norm_sqr() + pick[1].norm_sqr()).sqrt();
        [pick[0] / n, pick[1] / n]
    };
    let (u1, u2) = (eigvec(mu1), eigvec(mu2));
    // J = [[0, i], [−i, 0]] has eigenvectors (1, −i)/√2 and (1, i)/√2
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    let v1 = [Complex64::new(s2, 0.0), -i * s2];
    let v2 = [Complex64::new(s2, 0.0), i * s2];
    let (d1, d2) = (mu1.sqrt(), (-mu2).sqrt());
    // P = V diag(d1, d2) U*
    let entry = |row: usize, col: usize| v1[row] * d1 * u1[col].conj() + v2[row] * d2 * u2[col].conj();
    let conj = ProjectiveMatrix::complex(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1))?;
    let conjugated = r.conjugate(&conj);
    let images = conjugated
        .images()
        .iter()
        .map(|m| {
            let scale = m.entries().iter().map(|z| z.norm()).fold(1.0, f64::max);
            m.to_real(tol * scale)
        })
        .collect::<Result<Vec<_>, _>>();
    let Ok(images) = images else {
        return Ok(None);
    };
    Ok(Representation::new(*r.presentation(), Field::Real, images, r.tol().max(tol)).ok())
}

/// `2π · frac(√pⱼ)` for the first `k` primes `pⱼ`.
pub fn default_phases(k: usize) -> Vec<f64> {
    let mut primes = Vec::with_capacity(k);
    let mut candidate = 2u64;
    while primes.len() < k {
        if primes.iter().take_while(|&&p| p * p <= candidate).all(|&p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
        .iter()
        .map(|&p| TAU * (p as f64).sqrt().fract())
        .collect()
}

/// Default cocycle values `(0, 1, 0, …, 0)`.
pub fn default_z(k: usize) -> Vec<Complex64> {
    (0..k)
        .map(|j| Complex64::new(if j == 1 { 1.0 } else { 0.0 }, 0.0))
        .collect()
}

/// An upper-triangular representation of the `n`-punctured sphere with
/// `λ(cⱼ) = e^{iθⱼ}` and `z(cⱼ) = zⱼ` for `j < n`; `λ(cₙ)` and `z(cₙ)` are
/// forced by the relation.
///
/// Every product `λ(c_{i₁}⋯c_{i_k})` over a non-empty proper subset of
/// punctures must stay away from `±1`; the first failing subset in
/// bitmask order is reported, as `NotReduced` when it is a single puncture
/// whose image is the identity.
pub fn build_reducible_example(
    n: u32,
    theta: &[f64],
    zvals: &[Complex64],
    tol: f64,
) -> Result<(UpperTriangularData, Representation), ComplexError> {
    let p = SurfacePresentation::sphere(n)?;
    if n < 3 {
        return Err(SurfaceError::TooFewPunctures { needed: 3, got: n }.into());
    }
    let k = n as usize - 1;
    for v in [theta.len(), zvals.len()] {
        if v != k {
            return Err(ComplexError::WrongLength { expected: k, got: v });
        }
    }
    let mut lambda: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let prod: Complex64 = lambda.iter().product();
    lambda.push(prod.inv());
    let mut z = zvals.to_vec();
    let partial = UpperTriangularData {
        presentation: p,
        lambda: lambda.clone(),
        z: {
            let mut t = z.clone();
            t.push(Complex64::new(0.0, 0.0));
            t
        },
    };
    let (lp, zp) = cocycle_extend(&partial, &Word::new((1..n).map(|j| Letter::new(Generator::C(j), false))))?;
    z.push(-zp / (lp * lp));

    for mask in 1u32..(1u32 << n) - 1 {
        let members: Vec<u32> = (0..n).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect();
        let l: Complex64 = members.iter().map(|&j| lambda[j as usize - 1]).product();
        if (l - 1.0).norm() <= CONDITION_BAND || (l + 1.0).norm() <= CONDITION_BAND {
            if let [j] = members[..] {
                if z[j as usize - 1].norm() <= tol {
                    return Err(ComplexError::NotReduced(j));
                }
            }
            return Err(ComplexError::ConditionViolated { indices: members });
        }
    }
    let data = UpperTriangularData::new(p, lambda, z, tol.max(1e-12))?;
    let rep = data.to_representation(tol)?;
    Ok((data, rep))
}

/// Result of scanning curve traces for non-real values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum TraceScan {
    AllRealOnScc { count: usize },
    NonRealWitness { curve: CurveClass, trace: [f64; 2] },
}

pub fn classify_complex_traces(
    r: &Representation,
    budget: SccBudget,
    seed: u64,
) -> Result<TraceScan, ComplexError> {
    let mut count = 0;
    for curve in curve_stream(r, budget, seed)? {
        let tr = r.evaluate(curve.representative())?.trace();
        count += 1;
        if tr.im.abs() > r.tol() {
            return Ok(TraceScan::NonRealWitness {
                curve,
                trace: [tr.re, tr.im],
            });
        }
    }
    Ok(TraceScan::AllRealOnScc { count })
}

#[derive(Serialize, Deserialize)]
struct RawData {
    presentation: SurfacePresentation,
    lambda: BTreeMap<String, [f64; 2]>,
    z: BTreeMap<String, [f64; 2]>,
}

impl Serialize for UpperTriangularData {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let names: Vec<String> = self.presentation.generators().iter().map(|g| g.to_string()).collect();
        let pack = |v: &[Complex64]| -> BTreeMap<String, [f64; 2]> {
            names.iter().cloned().zip(v.iter().map(|c| [c.re, c.im])).collect()
        };
        RawData {
            presentation: self.presentation,
            lambda: pack(&self.lambda),
            z: pack(&self.z),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UpperTriangularData {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawData::deserialize(deserializer)?;
        let unpack = |m: &BTreeMap<String, [f64; 2]>| -> Result<Vec<Complex64>, D::Error> {
            raw.presentation
                .generators()
                .iter()
                .map(|g| {
                    m.get(&g.to_string())
                        .map(|[a, b]| Complex64::new(*a, *b))
                        .ok_or_else(|| serde::de::Error::custom(format!("missing {g}")))
                })
                .collect()
        };
        let lambda = unpack(&raw.lambda)?;
        let z = unpack(&raw.z)?;
        UpperTriangularData::new(raw.presentation, lambda, z, 1e-9).map_err(serde::de::Error::custom)
    }
}
