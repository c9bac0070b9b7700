use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{validate_angles, RepError, Representation};
use crate::moebius::{
    classify_element, rotation_about, rotation_data, ElementClass, Field, HPoint, ProjectiveMatrix,
    DEFAULT_TOL,
};
use crate::surface::{SurfaceError, SurfacePresentation};

/// Parameters of [`sample_relative`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub attempts: u64,
    pub seed: u64,
    /// Hyperbolic radius of the disk about `i` that centres are drawn from.
    pub radius: f64,
    /// Grid resolution along the ray carrying the second-to-last centre.
    pub grid: usize,
    /// Allowed error on the last peripheral angle.
    pub angle_tol: f64,
    pub tol: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            attempts: 10_000,
            seed: 0,
            radius: 2.0,
            grid: 24,
            angle_tol: 1e-8,
            tol: DEFAULT_TOL,
        }
    }
}

/// Statistics of an unsuccessful sampling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmptyReport {
    pub attempts: u64,
    /// Roots of the trace equation located along sampled rays.
    pub trace_roots: u64,
    /// Roots whose last peripheral image had the wrong rotation angle.
    pub wrong_angle: u64,
    pub acceptance_rate: f64,
    /// True when the angle data admit no representation at all (three
    /// punctures with total angle strictly between 2π and 4π); otherwise the
    /// report is only evidence.
    pub proven_empty: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleOutcome {
    Accepted {
        representation: Representation,
        attempts_used: u64,
    },
    Empty(EmptyReport),
}

impl SampleOutcome {
    pub fn representation(&self) -> Option<&Representation> {
        match self {
            SampleOutcome::Accepted { representation, .. } => Some(representation),
            SampleOutcome::Empty(_) => None,
        }
    }
}

fn disk_point(rng: &mut ChaCha8Rng, radius: f64) -> HPoint {
    // area of a hyperbolic disk of radius r is proportional to cosh r - 1
    let u: f64 = rng.gen();
    let r = (1.0 + u * (radius.cosh() - 1.0)).acosh();
    let phi = rng.gen::<f64>() * TAU;
    HPoint::i().along(phi, r)
}

/// Searches for a point of the relative representation space with
/// peripheral angles `alpha` on a punctured sphere.
///
/// Each attempt draws the centres of `c1 … c_{n-2}` uniformly in a
/// hyperbolic disk and a random ray from `i` for the centre of `c_{n-1}`.
/// The product of the first `n − 1` rotations must have `|tr| = 2|cos(αₙ/2)|`,
/// which is solved along the ray by a grid scan and bisection; a root is
/// accepted when `cₙ = (c1⋯c_{n-1})⁻¹` has rotation angle `αₙ`.
pub fn sample_relative(
    p: &SurfacePresentation,
    alpha: &[f64],
    config: &SampleConfig,
) -> Result<SampleOutcome, RepError> {
    if p.genus() != 0 {
        return Err(SurfaceError::WrongGenus(p.genus()).into());
    }
    let n = p.punctures() as usize;
    if n < 3 {
        return Err(SurfaceError::TooFewPunctures {
            needed: 3,
            got: p.punctures(),
        }
        .into());
    }
    validate_angles(alpha, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let target = 2.0 * (alpha[n - 1] / 2.0).cos().abs();
    let grid = config.grid.max(2);
    let mut trace_roots = 0u64;
    let mut wrong_angle = 0u64;

    for attempt in 1..=config.attempts {
        let mut prefix = Vec::with_capacity(n - 1);
        let mut product = ProjectiveMatrix::identity(Field::Real);
        for &a in &alpha[..n - 2] {
            let m = rotation_about(&disk_point(&mut rng, config.radius), a)?;
            product = product * m;
            prefix.push(m);
        }
        let phi = rng.gen::<f64>() * TAU;
        let last = alpha[n - 2];
        let along = |t: f64| rotation_about(&HPoint::i().along(phi, t), last).expect("angle in range");
        let f = |t: f64| (product * along(t)).abs_trace() - target;

        let ts: Vec<f64> = (0..grid)
            .map(|k| config.radius * k as f64 / (grid - 1) as f64)
            .collect();
        let values: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
        for k in 0..grid - 1 {
            let (mut lo, mut hi) = (ts[k], ts[k + 1]);
            let (mut flo, fhi) = (values[k], values[k + 1]);
            if flo == 0.0 || flo.signum() == fhi.signum() {
                continue;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            trace_roots += 1;
            let m = along(0.5 * (lo + hi));
            let closing = (product * m).inverse();
            let ok = classify_element(&closing, config.tol) == ElementClass::EllipticRegular
                && rotation_data(&closing, config.tol)
                    .is_ok_and(|(theta, _)| angle_gap(theta, alpha[n - 1]) <= config.angle_tol);
            if !ok {
                wrong_angle += 1;
                continue;
            }
            let mut images = prefix.clone();
            images.push(m);
            images.push(closing);
            let representation = Representation::new(*p, Field::Real, images, config.tol)?;
            return Ok(SampleOutcome::Accepted {
                representation,
                attempts_used: attempt,
            });
        }
    }
    let total: f64 = alpha.iter().sum();
    Ok(SampleOutcome::Empty(EmptyReport {
        attempts: config.attempts,
        trace_roots,
        wrong_angle,
        acceptance_rate: 0.0,
        proven_empty: n == 3 && total > TAU && total < 2.0 * TAU,
    }))
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Draws a point uniformly in the hyperbolic disk of the given radius about `i`.
pub fn random_disk_point(rng: &mut ChaCha8Rng, radius: f64) -> HPoint {
    disk_point(rng, radius)
}
