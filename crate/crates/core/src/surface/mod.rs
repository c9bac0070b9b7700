//! Punctured-surface groups: presentations, words, abelianization, Dehn
//! twists on punctured spheres and simple-closed-curve word families.

mod enumerate;
mod word;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use enumerate::{enumerate_scc, scc_seed_family, SccBudget, SccEnumeration};
pub use word::{CurveClass, Generator, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("surface of genus 0 with {0} punctures has trivial fundamental group")]
    TrivialGroup(u32),
    #[error("symbol {0} is not a generator of this presentation")]
    UnknownSymbol(Generator),
    #[error("cannot parse {0:?} as a word")]
    Parse(String),
    #[error("operation requires genus 0, got genus {0}")]
    WrongGenus(u32),
    #[error("twist window {start}..{end} is invalid for {punctures} punctures")]
    InvalidWindow { start: u32, end: u32, punctures: u32 },
    #[error("operation requires at least {needed} punctures, got {got}")]
    TooFewPunctures { needed: u32, got: u32 },
    #[error("enumeration budget allows zero curves")]
    BudgetZero,
}

/// The standard presentation of the fundamental group of a genus `g`
/// surface with `n` punctures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPresentation")]
pub struct SurfacePresentation {
    genus: u32,
    punctures: u32,
}

#[derive(Deserialize)]
struct RawPresentation {
    genus: u32,
    punctures: u32,
}

impl TryFrom<RawPresentation> for SurfacePresentation {
    type Error = SurfaceError;

    fn try_from(raw: RawPresentation) -> Result<Self, Self::Error> {
        SurfacePresentation::new(raw.genus, raw.punctures)
    }
}

impl SurfacePresentation {
    pub fn new(genus: u32, punctures: u32) -> Result<Self, SurfaceError> {
        if genus == 0 && punctures <= 1 {
            return Err(SurfaceError::TrivialGroup(punctures));
        }
        Ok(Self { genus, punctures })
    }

    /// The `n`-punctured sphere.
    pub fn sphere(punctures: u32) -> Result<Self, SurfaceError> {
        Self::new(0, punctures)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn punctures(&self) -> u32 {
        self.punctures
    }

    /// Generators in canonical order `a1, b1, …, ag, bg, c1, …, cn`.
    pub fn generators(&self) -> Vec<Generator> {
        let mut out = Vec::with_capacity(self.generator_count());
        for i in 1..=self.genus {
            out.push(Generator::A(i));
            out.push(Generator::B(i));
        }
        out.extend((1..=self.punctures).map(Generator::C));
        out
    }

    pub fn generator_count(&self) -> usize {
        (2 * self.genus + self.punctures) as usize
    }

    /// Position of `g` in [`SurfacePresentation::generators`].
    pub fn position(&self, g: Generator) -> Option<usize> {
        let (genus, n) = (self.genus, self.punctures);
        match g {
            Generator::A(i) if (1..=genus).contains(&i) => Some(2 * (i as usize - 1)),
            Generator::B(i) if (1..=genus).contains(&i) => Some(2 * (i as usize - 1) + 1),
            Generator::C(j) if (1..=n).contains(&j) => Some(2 * genus as usize + j as usize - 1),
            _ => None,
        }
    }

    pub fn contains(&self, g: Generator) -> bool {
        self.position(g).is_some()
    }

    /// Checks that every letter of `w` is a generator of this presentation.
    pub fn check_word(&self, w: &Word) -> Result<(), SurfaceError> {
        match w.letters().iter().find(|l| !self.contains(l.generator)) {
            Some(l) => Err(SurfaceError::UnknownSymbol(l.generator)),
            None => Ok(()),
        }
    }

    fn require_genus0(&self) -> Result<(), SurfaceError> {
        if self.genus == 0 {
            Ok(())
        } else {
            Err(SurfaceError::WrongGenus(self.genus))
        }
    }
}

/// `∏[aᵢ,bᵢ] · cₙ⁻¹⋯c₁⁻¹`.
pub fn relation_word(p: &SurfacePresentation) -> Word {
    let mut w = Word::empty();
    for i in 1..=p.genus() {
        w = w * Word::commutator(&Word::generator(Generator::A(i)), &Word::generator(Generator::B(i)));
    }
    let peripheral: Word = Word::new((1..=p.punctures()).map(|j| Letter::new(Generator::C(j), false)));
    w * peripheral.inverse()
}

/// Signed exponent sums, indexed like [`SurfacePresentation::generators`].
pub fn abelianize(w: &Word, p: &SurfacePresentation) -> Result<Vec<i64>, SurfaceError> {
    let mut v = vec![0i64; p.generator_count()];
    for l in w.letters() {
        let k = p
            .position(l.generator)
            .ok_or(SurfaceError::UnknownSymbol(l.generator))?;
        v[k] += if l.inverse { -1 } else { 1 };
    }
    Ok(v)
}

/// Abelianization test on a punctured sphere: the class of `w` or `w⁻¹`
/// modulo the all-ones vector is a 0/1 vector with between 1 and `n − 1`
/// ones. Necessary for `w` to represent a non-trivial simple closed curve.
pub fn scc_admissible_genus0(w: &Word, p: &SurfacePresentation) -> Result<bool, SurfaceError> {
    p.require_genus0()?;
    let v = abelianize(w, p)?;
    let n = v.len();
    let zero_one = |u: &[i64]| -> bool {
        let min = u.iter().copied().min().unwrap_or(0);
        let shifted: Vec<i64> = u.iter().map(|x| x - min).collect();
        let ones = shifted.iter().filter(|&&x| x == 1).count();
        shifted.iter().all(|&x| x == 0 || x == 1) && ones >= 1 && ones < n
    };
    let neg: Vec<i64> = v.iter().map(|x| -x).collect();
    Ok(zero_one(&v) || zero_one(&neg))
}

/// A consecutive range `start..=end` of punctures with
/// `1 ≤ end − start ≤ n − 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwistWindow {
    start: u32,
    end: u32,
}

impl TwistWindow {
    pub fn new(start: u32, end: u32, p: &SurfacePresentation) -> Result<Self, SurfaceError> {
        let n = p.punctures();
        let bad = SurfaceError::InvalidWindow {
            start,
            end,
            punctures: n,
        };
        if start < 1 || end > n || end <= start || end - start > n.saturating_sub(2) {
            return Err(bad);
        }
        Ok(Self { start, end })
    }

    /// Every valid window, ordered by `(start, end)`.
    pub fn all(p: &SurfacePresentation) -> Vec<TwistWindow> {
        let n = p.punctures();
        let mut out = Vec::new();
        for start in 1..=n {
            for end in start + 1..=n {
                if let Ok(w) = TwistWindow::new(start, end, p) {
                    out.push(w);
                }
            }
        }
        out
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn end(&self) -> u32 {
        self.end
    }

    pub fn contains(&self, j: u32) -> bool {
        (self.start..=self.end).contains(&j)
    }

    /// The curve `c_start ⋯ c_end` twisted along.
    pub fn curve(&self) -> Word {
        Word::new((self.start..=self.end).map(|j| Letter::new(Generator::C(j), false)))
    }

    /// Image of a single generator under the twist of power `k`.
    pub fn generator_image(&self, g: Generator, k: i32) -> Word {
        match g {
            Generator::C(j) if self.contains(j) => {
                let gamma = self.curve();
                gamma.pow(-k) * Word::generator(g) * gamma.pow(k)
            }
            _ => Word::generator(g),
        }
    }
}

/// The `k`-th power of the Dehn twist along the curve `cᵢ⋯cⱼ` of `window`,
/// acting on a word: `c_m ↦ γ⁻ᵏ c_m γᵏ` inside the window.
pub fn dehn_twist_genus0(
    w: &Word,
    window: &TwistWindow,
    k: i32,
    p: &SurfacePresentation,
) -> Result<Word, SurfaceError> {
    p.require_genus0()?;
    TwistWindow::new(window.start, window.end, p)?;
    p.check_word(w)?;
    if k == 0 {
        return Ok(w.clone());
    }
    Ok(w.substitute(|g| window.generator_image(g, k)))
}
