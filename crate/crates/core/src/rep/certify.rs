use serde::{Deserialize, Serialize};

use super::{RepError, Representation};
use crate::moebius::{classify_strict, ElementClass};
use crate::surface::{enumerate_scc, scc_seed_family, CurveClass, SccBudget};

/// Result of scanning a stream of curve classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum CertifyStatus {
    /// Every scanned curve maps to an elliptic element. Only valid up to the
    /// budget: curves outside the stream were not examined.
    Certified,
    /// A curve whose image is parabolic, hyperbolic or loxodromic.
    Witness {
        curve: CurveClass,
        class: ElementClass,
        abs_trace: f64,
    },
    /// No witness was found but some images sit inside the ambiguity band
    /// around `|tr| = 2`.
    InconclusiveCurve { curves: Vec<CurveClass> },
}

/// Bounded-budget evidence for or against total ellipticity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticityReport {
    #[serde(flatten)]
    pub status: CertifyStatus,
    pub curves_checked: usize,
    /// Non-peripheral or peripheral curves whose image is the identity.
    pub identity_curves: Vec<CurveClass>,
    /// Largest `|tr|` among scanned elliptic images.
    pub max_elliptic_trace: f64,
    pub ambiguous: Vec<CurveClass>,
    pub budget: SccBudget,
    pub seed: u64,
}

impl EllipticityReport {
    pub fn is_certified(&self) -> bool {
        self.status == CertifyStatus::Certified
    }

    pub fn witness(&self) -> Option<(&CurveClass, ElementClass)> {
        match &self.status {
            CertifyStatus::Witness { curve, class, .. } => Some((curve, *class)),
            _ => None,
        }
    }
}

/// The curve stream certification runs over: the twist enumeration on
/// spheres with at least three punctures, the fixed seed family otherwise.
pub fn curve_stream(
    r: &Representation,
    budget: SccBudget,
    seed: u64,
) -> Result<Box<dyn Iterator<Item = CurveClass>>, RepError> {
    let p = *r.presentation();
    if p.genus() == 0 && p.punctures() >= 3 {
        Ok(Box::new(enumerate_scc(&p, budget, seed)?))
    } else {
        if budget.max_curves == 0 {
            return Err(crate::surface::SurfaceError::BudgetZero.into());
        }
        Ok(Box::new(scc_seed_family(&p).into_iter().take(budget.max_curves)))
    }
}

/// Evaluates every curve of the stream and returns the first witness in
/// stream order, if any.
///
/// Classification is strict at the representation's tolerance, so an image
/// with `|tr|` within `tol` of 2 that is not `±I` is recorded as ambiguous
/// instead of being counted either way.
pub fn certify_totally_elliptic(
    r: &Representation,
    budget: SccBudget,
    seed: u64,
) -> Result<EllipticityReport, RepError> {
    let mut report = EllipticityReport {
        status: CertifyStatus::Certified,
        curves_checked: 0,
        identity_curves: Vec::new(),
        max_elliptic_trace: 0.0,
        ambiguous: Vec::new(),
        budget,
        seed,
    };
    for curve in curve_stream(r, budget, seed)? {
        let m = r.evaluate(curve.representative())?;
        report.curves_checked += 1;
        match classify_strict(&m, r.tol()) {
            Ok(ElementClass::Identity) => report.identity_curves.push(curve),
            Ok(ElementClass::EllipticRegular) => {
                report.max_elliptic_trace = report.max_elliptic_trace.max(m.abs_trace());
            }
            Ok(class) => {
                report.status = CertifyStatus::Witness {
                    curve,
                    class,
                    abs_trace: m.abs_trace(),
                };
                return Ok(report);
            }
            Err(_) => report.ambiguous.push(curve),
        }
    }
    if !report.ambiguous.is_empty() {
        report.status = CertifyStatus::InconclusiveCurve {
            curves: report.ambiguous.clone(),
        };
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::{rotation_about, Field, HPoint, ProjectiveMatrix};
    use crate::surface::SurfacePresentation;
    use std::f64::consts::FRAC_PI_2;

    fn genus_two(a1: ProjectiveMatrix, b1: ProjectiveMatrix) -> Representation {
        let p = SurfacePresentation::new(2, 0).unwrap();
        Representation::new(p, Field::Real, vec![a1, b1, b1, a1], 1e-9).unwrap()
    }

    #[test]
    fn genus_two_non_commuting_rotations_have_a_witness() {
        let a1 = rotation_about(&HPoint::i(), FRAC_PI_2).unwrap();
        let b1 = rotation_about(&HPoint::new(0.0, 2.0).unwrap(), FRAC_PI_2).unwrap();
        let r = genus_two(a1, b1);
        let report = certify_totally_elliptic(&r, SccBudget::default(), 0).unwrap();
        let (curve, class) = report.witness().expect("witness");
        assert_eq!(class, ElementClass::Hyperbolic);
        assert_eq!(curve.representative().to_string(), "a1.b1.A1.B1");
        // the commutator word of the second kind is hyperbolic too
        let w = "B1.B2.a1.b2.b1.A1".parse().unwrap();
        let m = r.evaluate(&w).unwrap();
        assert_eq!(crate::moebius::classify_element(&m, 1e-9), ElementClass::Hyperbolic);
    }

    #[test]
    fn common_centre_certifies() {
        let a1 = rotation_about(&HPoint::i(), 0.8).unwrap();
        let b1 = rotation_about(&HPoint::i(), 2.1).unwrap();
        let report = certify_totally_elliptic(&genus_two(a1, b1), SccBudget::default(), 0).unwrap();
        assert!(report.is_certified());
        assert!(report.curves_checked > 10);
    }
}
