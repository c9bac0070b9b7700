use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::SurfaceError;

/// A generator symbol of a geometric generating family (1-based index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    A(u32),
    B(u32),
    C(u32),
}

impl Generator {
    pub fn index(self) -> u32 {
        match self {
            Generator::A(i) | Generator::B(i) | Generator::C(i) => i,
        }
    }

    fn prefix(self) -> char {
        match self {
            Generator::A(_) => 'a',
            Generator::B(_) => 'b',
            Generator::C(_) => 'c',
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.prefix(), self.index())
    }
}

impl FromStr for Generator {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letter: Letter = s.parse()?;
        if letter.inverse {
            return Err(SurfaceError::Parse(s.to_string()));
        }
        Ok(letter.generator)
    }
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: Generator, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Self {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.generator.prefix();
        let p = if self.inverse { p.to_ascii_uppercase() } else { p };
        write!(f, "{}{}", p, self.generator.index())
    }
}

impl FromStr for Letter {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SurfaceError::Parse(s.to_string());
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str();
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) || rest.starts_with('0') {
            return Err(bad());
        }
        let index: u32 = rest.parse().map_err(|_| bad())?;
        let generator = match head.to_ascii_lowercase() {
            'a' => Generator::A(index),
            'b' => Generator::B(index),
            'c' => Generator::C(index),
            _ => return Err(bad()),
        };
        Ok(Letter::new(generator, head.is_ascii_uppercase()))
    }
}

/// A freely reduced word. Products follow loop concatenation read right to
/// left: `u * v` traverses `v` first, and evaluates to `ρ(u)ρ(v)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds the free reduction of a letter sequence.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|&last| last.cancels(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
    }

    pub fn generator(g: Generator) -> Self {
        Self {
            letters: vec![Letter::new(g, false)],
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// `self^k`, with negative powers meaning powers of the inverse.
    pub fn pow(&self, k: i32) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out * base.clone();
        }
        out
    }

    /// `[x, y] = x y x⁻¹ y⁻¹`.
    pub fn commutator(x: &Word, y: &Word) -> Self {
        x.clone() * y.clone() * x.inverse() * y.inverse()
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) if self.letters.len() > 1 => !f.cancels(l),
            _ => true,
        }
    }

    /// Strips cancelling first/last letter pairs.
    pub fn cyclically_reduced(&self) -> Self {
        let l = &self.letters;
        let (mut lo, mut hi) = (0usize, l.len());
        while hi - lo > 1 && l[lo].cancels(l[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        Self {
            letters: l[lo..hi].to_vec(),
        }
    }

    /// Substitutes a word for each letter and reduces.
    pub fn substitute(&self, image: impl Fn(Generator) -> Word) -> Self {
        Word::new(self.letters.iter().flat_map(|l| {
            let w = image(l.generator);
            let w = if l.inverse { w.inverse() } else { w };
            w.letters
        }))
    }

    fn rotated(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        letters.rotate_left(k);
        Self { letters }
    }
}

impl Mul for Word {
    type Output = Word;

    fn mul(self, rhs: Word) -> Word {
        Word::new(self.letters.into_iter().chain(rhs.letters))
    }
}

impl From<Letter> for Word {
    fn from(l: Letter) -> Self {
        Word { letters: vec![l] }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = SurfaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        let letters = s
            .split('.')
            .map(str::parse)
            .collect::<Result<Vec<Letter>, _>>()?;
        Ok(Word::new(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The free homotopy class of a closed curve, keyed by a canonical word.
///
/// The normal form is the lexicographically least cyclic rotation of the
/// cyclic reduction of either the word or its inverse.
#[derive(Debug, Clone)]
pub struct CurveClass {
    representative: Word,
    normal_form: Word,
}

impl CurveClass {
    pub fn new(representative: Word) -> Self {
        let normal_form = normal_form(&representative);
        Self {
            representative,
            normal_form,
        }
    }

    pub fn representative(&self) -> &Word {
        &self.representative
    }

    pub fn normal_form(&self) -> &Word {
        &self.normal_form
    }
}

fn normal_form(w: &Word) -> Word {
    let base = w.cyclically_reduced();
    if base.is_empty() {
        return base;
    }
    let inv = base.inverse();
    (0..base.len())
        .flat_map(|k| [base.rotated(k), inv.rotated(k)])
        .min()
        .expect("non-empty word has rotations")
}

impl PartialEq for CurveClass {
    fn eq(&self, other: &Self) -> bool {
        self.normal_form == other.normal_form
    }
}

impl Eq for CurveClass {}

impl Hash for CurveClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.normal_form.hash(state);
    }
}

impl PartialOrd for CurveClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CurveClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.normal_form.cmp(&other.normal_form)
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.representative.fmt(f)
    }
}

impl Serialize for CurveClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.representative.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CurveClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Word::deserialize(deserializer).map(CurveClass::new)
    }
}
