//! Top-level classification of totally elliptic representations.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chains::{
    build_chain, dt_orientation, is_dt_chain, pants_configuration, toledo_dt, ChainError, Orientation,
    PantsConfiguration, TriangleChain,
};
use crate::complexify::{
    classify_complex_traces, is_irreducible, is_unitary_conjugate, real_form_conjugate, ComplexError,
    TraceScan, EIGENLINE_TOL,
};
use crate::moebius::{ElementClass, Field, HPoint};
use crate::rep::{certify_totally_elliptic, CertifyStatus, EllipticityReport, Orthogonality, RepError, Representation};
use crate::surface::{CurveClass, SccBudget, TwistWindow};

/// Twist attempts made when a chain comes out degenerate.
pub const MAX_RECHAIN: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerdictError {
    #[error("representation is not real")]
    NotReal,
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum VerdictTag {
    Orthogonal {
        /// Common fixed point, absent when every image is trivial.
        centre: Option<HPoint>,
    },
    #[serde(rename = "DT")]
    Dt {
        toledo: f64,
        alpha: Vec<f64>,
        orientation: Orientation,
        chain: TriangleChain,
    },
    Unitary,
    #[serde(rename = "RealDT")]
    RealDt {
        toledo: f64,
        alpha: Vec<f64>,
        orientation: Orientation,
    },
    ReducibleNonUnitary,
    NotTotallyElliptic {
        class: ElementClass,
    },
    NotReduced {
        puncture: u32,
    },
    Inconclusive {
        reason: String,
        budget: SccBudget,
    },
}

/// One named check and its outcome, in the order performed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub check: String,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub tag: VerdictTag,
    pub evidence: Vec<Evidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<CurveClass>,
}

impl Verdict {
    pub fn is_inconclusive(&self) -> bool {
        matches!(self.tag, VerdictTag::Inconclusive { .. })
    }

    /// Process exit code: 0 for a definite verdict, 2 when inconclusive.
    pub fn exit_code(&self) -> i32 {
        if self.is_inconclusive() {
            2
        } else {
            0
        }
    }

    pub fn tag_name(&self) -> &'static str {
        match self.tag {
            VerdictTag::Orthogonal { .. } => "Orthogonal",
            VerdictTag::Dt { .. } => "DT",
            VerdictTag::Unitary => "Unitary",
            VerdictTag::RealDt { .. } => "RealDT",
            VerdictTag::ReducibleNonUnitary => "ReducibleNonUnitary",
            VerdictTag::NotTotallyElliptic { .. } => "NotTotallyElliptic",
            VerdictTag::NotReduced { .. } => "NotReduced",
            VerdictTag::Inconclusive { .. } => "Inconclusive",
        }
    }
}

struct Builder {
    evidence: Vec<Evidence>,
    budget: SccBudget,
}

impl Builder {
    fn new(budget: SccBudget) -> Self {
        Self {
            evidence: Vec::new(),
            budget,
        }
    }

    fn note(&mut self, check: &str, outcome: impl Into<String>) {
        self.evidence.push(Evidence {
            check: check.to_string(),
            outcome: outcome.into(),
        });
    }

    fn finish(self, tag: VerdictTag) -> Verdict {
        Verdict {
            tag,
            evidence: self.evidence,
            witness: None,
        }
    }

    fn inconclusive(self, reason: impl Into<String>) -> Verdict {
        let budget = self.budget;
        self.finish(VerdictTag::Inconclusive {
            reason: reason.into(),
            budget,
        })
    }
}

enum Gate {
    Done(Verdict),
    Certified(Builder, EllipticityReport),
}

/// Reducedness and certification steps shared by both fields.
fn gate(r: &Representation, budget: SccBudget, seed: u64) -> Result<Gate, RepError> {
    let mut b = Builder::new(budget);
    if let Some(j) = r.first_trivial_peripheral() {
        b.note("reduced", format!("c{j} maps to the identity"));
        return Ok(Gate::Done(b.finish(VerdictTag::NotReduced { puncture: j })));
    }
    b.note("reduced", "yes");
    let report = certify_totally_elliptic(r, budget, seed)?;
    let summary = format!(
        "{} curves checked, max elliptic |tr| {:.12}",
        report.curves_checked, report.max_elliptic_trace
    );
    match &report.status {
        CertifyStatus::Witness { curve, class, abs_trace } => {
            b.note("certify", format!("{summary}; {curve} is {class} with |tr| {abs_trace:.12}"));
            let mut v = b.finish(VerdictTag::NotTotallyElliptic { class: *class });
            v.witness = Some(curve.clone());
            Ok(Gate::Done(v))
        }
        CertifyStatus::InconclusiveCurve { curves } => {
            b.note("certify", format!("{summary}; {} curves in the ambiguity band", curves.len()));
            let first = curves.first().map(|c| c.to_string()).unwrap_or_default();
            Ok(Gate::Done(b.inconclusive(format!("|tr| of {first} is within tolerance of 2"))))
        }
        CertifyStatus::Certified => {
            b.note("certify", format!("certified; {summary}"));
            Ok(Gate::Certified(b, report))
        }
    }
}

fn orthogonal_centre(r: &Representation) -> Option<Option<HPoint>> {
    match r.orthogonality() {
        Orthogonality::NotOrthogonal => None,
        Orthogonality::Trivial => Some(None),
        Orthogonality::Centred(c) => Some(Some(c)),
    }
}

/// Chain test with up to [`MAX_RECHAIN`] random twists when the chain is
/// degenerate or a pants word has non-regular image.
fn chain_verdict(r: &Representation, mut b: Builder, seed: u64) -> Verdict {
    let p = *r.presentation();
    let windows = TwistWindow::all(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = r.clone();
    let mut twists = 0;
    let chain = loop {
        match build_chain(&current) {
            Ok(ch) if is_dt_chain(&ch) => break ch,
            Ok(ch) if !ch.all_degenerate() => {
                b.note("chain", format!("orientations {:?} are mixed", ch.orientations));
                return b.inconclusive("triangle chain is not coherently oriented");
            }
            Ok(_) => b.note("chain", "all triangles degenerate"),
            Err(ChainError::NotRegular(w)) => b.note("chain", format!("image of {w} is not regular elliptic")),
            Err(e) => {
                b.note("chain", e.to_string());
                return b.inconclusive(format!("chain construction failed: {e}"));
            }
        }
        if twists == MAX_RECHAIN || windows.is_empty() {
            return b.inconclusive(format!("no usable chain after {twists} twists"));
        }
        let w = windows.choose(&mut rng).expect("non-empty");
        current = match current.mcg_twist(w, 1) {
            Ok(next) => next,
            Err(e) => return b.inconclusive(format!("twist failed: {e}")),
        };
        twists += 1;
    };
    let orientation = chain.coherent_orientation().expect("coherent");
    b.note(
        "chain",
        format!("coherently {orientation:?} after {twists} twists"),
    );
    let alpha = match r.peripheral_data() {
        Ok(d) => d.alpha,
        Err(e) => return b.inconclusive(format!("peripheral angles unavailable: {e}")),
    };
    if dt_orientation(&alpha) != Some(orientation) {
        b.note("dt_band", format!("total angle {} does not match {orientation:?}", alpha.iter().sum::<f64>()));
        return b.inconclusive("chain orientation disagrees with the angle band");
    }
    match toledo_dt(&alpha) {
        Ok(toledo) => {
            b.note("toledo", format!("{toledo:.15}"));
            b.finish(VerdictTag::Dt {
                toledo,
                alpha,
                orientation,
                chain,
            })
        }
        Err(e) => b.inconclusive(e.to_string()),
    }
}

/// Decides whether a real representation is totally elliptic, and which
/// kind.
pub fn classify_real(r: &Representation, budget: SccBudget, seed: u64) -> Result<Verdict, VerdictError> {
    let r = match r.field() {
        Field::Real => r.clone(),
        Field::Complex => {
            let images = r
                .images()
                .iter()
                .map(|m| m.to_real(r.tol()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| VerdictError::NotReal)?;
            Representation::new(*r.presentation(), Field::Real, images, r.tol())?
        }
    };
    let (mut b, _report) = match gate(&r, budget, seed)? {
        Gate::Done(v) => return Ok(v),
        Gate::Certified(b, report) => (b, report),
    };
    let p = *r.presentation();
    let centre = orthogonal_centre(&r);
    if p.genus() >= 1 {
        return Ok(match centre {
            Some(centre) => {
                b.note("orthogonal", "yes");
                b.finish(VerdictTag::Orthogonal { centre })
            }
            None => {
                b.note("orthogonal", "no");
                b.inconclusive("seed words are all elliptic but the images share no fixed point")
            }
        });
    }
    if p.punctures() == 3 {
        let alpha = match r.peripheral_data() {
            Ok(d) => d.alpha,
            Err(e) => return Ok(b.inconclusive(format!("peripheral angles unavailable: {e}"))),
        };
        let config = pants_configuration([alpha[0], alpha[1], alpha[2]], r.tol());
        b.note("pants_configuration", format!("{config:?}"));
        return Ok(match config {
            PantsConfiguration::Degenerate => match centre {
                Some(centre) => b.finish(VerdictTag::Orthogonal { centre }),
                None => b.inconclusive("degenerate angle sum but no common fixed point"),
            },
            PantsConfiguration::Empty => b.inconclusive("angle sum lies in the empty band"),
            _ => chain_verdict(&r, b, seed),
        });
    }
    if let Some(centre) = centre {
        b.note("orthogonal", "yes");
        return Ok(b.finish(VerdictTag::Orthogonal { centre }));
    }
    b.note("orthogonal", "no");
    Ok(chain_verdict(&r, b, seed))
}

/// Decides whether a complex representation is totally elliptic, and which
/// kind.
pub fn classify_complex(r: &Representation, budget: SccBudget, seed: u64) -> Result<Verdict, VerdictError> {
    let r = r.to_complex();
    let mut b = match gate(&r, budget, seed)? {
        Gate::Done(v) => return Ok(v),
        Gate::Certified(b, _) => b,
    };
    let p = *r.presentation();
    let ill = |mut b: Builder, e: ComplexError| {
        b.note("unitary", e.to_string());
        b.inconclusive(format!("invariant-form solve: {e}"))
    };
    if is_irreducible(&r, EIGENLINE_TOL) {
        b.note("irreducible", "yes");
        match classify_complex_traces(&r, budget, seed) {
            Ok(TraceScan::AllRealOnScc { count }) => b.note("traces", format!("{count} real")),
            Ok(TraceScan::NonRealWitness { curve, .. }) => {
                b.note("traces", format!("{curve} has non-real trace"));
                return Ok(b.inconclusive("certified but a curve has non-real trace"));
            }
            Err(e) => return Ok(b.inconclusive(e.to_string())),
        }
        let check = match is_unitary_conjugate(&r) {
            Ok(c) => c,
            Err(e) => return Ok(ill(b, e)),
        };
        if check.unitary {
            b.note("unitary", format!("positive-definite form, det {:.3e}", check.max_det));
            return Ok(b.finish(VerdictTag::Unitary));
        }
        b.note("unitary", format!("no positive-definite form, max det {:.3e}", check.max_det));
        let real = match real_form_conjugate(&r, 1e-7) {
            Ok(Some(real)) => real,
            Ok(None) => return Ok(b.inconclusive("no conjugation into PSL(2,R) found")),
            Err(e) => return Ok(ill(b, e)),
        };
        b.note("real_form", "conjugated into PSL(2,R)");
        let inner = classify_real(&real, budget, seed)?;
        b.evidence.extend(inner.evidence.iter().cloned());
        return Ok(match inner.tag {
            VerdictTag::Dt {
                toledo,
                alpha,
                orientation,
                ..
            } => b.finish(VerdictTag::RealDt {
                toledo,
                alpha,
                orientation,
            }),
            other => b.inconclusive(format!("real form classified as {:?}", std::mem::discriminant(&other))),
        });
    }
    b.note("irreducible", "no");
    match is_unitary_conjugate(&r) {
        Err(e) => Ok(ill(b, e)),
        Ok(check) if check.unitary => {
            b.note("unitary", format!("positive-definite form, det {:.3e}", check.max_det));
            Ok(b.finish(VerdictTag::Unitary))
        }
        Ok(check) => {
            b.note("unitary", format!("no positive-definite form, max det {:.3e}", check.max_det));
            if p.genus() >= 1 {
                Ok(b.inconclusive("reducible non-unitary representation in positive genus"))
            } else {
                Ok(b.finish(VerdictTag::ReducibleNonUnitary))
            }
        }
    }
}

/// Dispatches on the field of `r`.
pub fn classify(r: &Representation, budget: SccBudget, seed: u64) -> Result<Verdict, VerdictError> {
    match r.field() {
        Field::Real => classify_real(r, budget, seed),
        Field::Complex => classify_complex(r, budget, seed),
    }
}
