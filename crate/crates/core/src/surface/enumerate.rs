use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    dehn_twist_genus0, scc_admissible_genus0, CurveClass, Generator, Letter, SurfaceError,
    SurfacePresentation, TwistWindow, Word,
};

fn gen(g: Generator) -> Word {
    Word::generator(g)
}

fn inv(g: Generator) -> Word {
    Word::generator(g).inverse()
}

fn c_run(from: u32, len: u32, n: u32) -> Word {
    Word::new((0..len).map(|k| Letter::new(Generator::C((from - 1 + k) % n + 1), false)))
}

/// Known simple-closed-curve words for the standard generators, in a fixed
/// order with duplicates (same free homotopy class) removed.
pub fn scc_seed_family(p: &SurfacePresentation) -> Vec<CurveClass> {
    let (g, n) = (p.genus(), p.punctures());
    let mut words: Vec<Word> = Vec::new();
    words.extend((1..=n).map(|j| gen(Generator::C(j))));
    for i in 1..=g {
        words.push(gen(Generator::A(i)));
        words.push(gen(Generator::B(i)));
    }
    if g >= 2 {
        for i in 1..=g {
            for j in (1..=g).filter(|&j| j != i) {
                let (ai, bi, aj, bj) = (
                    gen(Generator::A(i)),
                    gen(Generator::B(i)),
                    gen(Generator::A(j)),
                    gen(Generator::B(j)),
                );
                let (ai_, bi_, aj_, bj_) = (
                    inv(Generator::A(i)),
                    inv(Generator::B(i)),
                    inv(Generator::A(j)),
                    inv(Generator::B(j)),
                );
                words.push(Word::commutator(&ai, &bi));
                words.push(Word::commutator(&aj, &bj));
                words.push(Word::commutator(&(bi_.clone() * bj_.clone()), &ai));
                words.push(Word::commutator(&(ai_.clone() * aj_.clone()), &bj));
                words.push(Word::commutator(&(bj_ * bi_.clone()), &aj));
                words.push(Word::commutator(&(aj_ * ai_.clone()), &bj));
                words.push(Word::commutator(&(bi.clone() * ai_ * bj.clone()), &aj));
                words.push(Word::commutator(&(ai * bi_ * aj), &bj));
            }
        }
    }
    if g >= 1 {
        for i in 1..=g {
            let (ai, bi) = (gen(Generator::A(i)), gen(Generator::B(i)));
            let comm = Word::commutator(&ai, &bi);
            for j in 1..=n {
                let cj = gen(Generator::C(j));
                words.push(ai.inverse() * comm.clone() * cj.inverse() * ai.clone() * cj.clone());
                words.push(bi.clone() * comm.clone() * cj.inverse() * bi.inverse() * cj);
            }
            for j in 1..=n {
                for k in 1..j {
                    let (cj, ck) = (gen(Generator::C(j)), gen(Generator::C(k)));
                    words.push(
                        bi.clone()
                            * ck.clone()
                            * bi.inverse()
                            * cj.clone()
                            * bi.clone()
                            * ai.inverse()
                            * bi.inverse()
                            * ck.inverse()
                            * bi.inverse()
                            * cj.inverse(),
                    );
                }
            }
        }
    }
    if g == 0 {
        for len in 2..=n.saturating_sub(2) {
            for start in 1..=n {
                words.push(c_run(start, len, n));
            }
        }
        for i in 1..=n.saturating_sub(3) {
            words.push(c_run(1, i + 1, n).inverse());
        }
    }
    let mut seen = HashSet::new();
    words
        .into_iter()
        .map(CurveClass::new)
        .filter(|c| seen.insert(c.clone()))
        .collect()
}

/// Limits on a simple-closed-curve enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccBudget {
    pub max_curves: usize,
    pub max_twist_depth: usize,
    pub max_word_length: usize,
}

impl Default for SccBudget {
    fn default() -> Self {
        Self {
            max_curves: 500,
            max_twist_depth: 3,
            max_word_length: 64,
        }
    }
}

impl SccBudget {
    pub fn with_max_curves(max_curves: usize) -> Self {
        Self {
            max_curves,
            ..Self::default()
        }
    }
}

/// Breadth-first closure of the genus-0 seed family under single Dehn
/// twists along consecutive windows.
///
/// The seed permutes the order in which twist moves are tried at each
/// node, so different seeds reach different curves first when the budget
/// truncates the stream.
pub fn enumerate_scc(
    p: &SurfacePresentation,
    budget: SccBudget,
    seed: u64,
) -> Result<SccEnumeration, SurfaceError> {
    if p.genus() != 0 {
        return Err(SurfaceError::WrongGenus(p.genus()));
    }
    if p.punctures() < 3 {
        return Err(SurfaceError::TooFewPunctures {
            needed: 3,
            got: p.punctures(),
        });
    }
    if budget.max_curves == 0 {
        return Err(SurfaceError::BudgetZero);
    }
    let mut moves: Vec<(TwistWindow, i32)> = TwistWindow::all(p)
        .into_iter()
        .flat_map(|w| [(w, 1), (w, -1)])
        .collect();
    moves.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(SccEnumeration {
        presentation: *p,
        budget,
        moves,
        seen: HashSet::new(),
        pending: scc_seed_family(p).into_iter().map(|c| (c, 0)).collect(),
        expand: VecDeque::new(),
        emitted: 0,
    })
}

/// Lazy stream produced by [`enumerate_scc`].
#[derive(Debug, Clone)]
pub struct SccEnumeration {
    presentation: SurfacePresentation,
    budget: SccBudget,
    moves: Vec<(TwistWindow, i32)>,
    seen: HashSet<CurveClass>,
    pending: VecDeque<(CurveClass, usize)>,
    expand: VecDeque<(CurveClass, usize)>,
    emitted: usize,
}

impl SccEnumeration {
    pub fn budget(&self) -> SccBudget {
        self.budget
    }

    fn accept(&mut self, class: CurveClass, depth: usize) -> Option<CurveClass> {
        if class.normal_form().len() > self.budget.max_word_length || self.seen.contains(&class) {
            return None;
        }
        let ok = scc_admissible_genus0(class.representative(), &self.presentation).unwrap_or(false);
        self.seen.insert(class.clone());
        if !ok {
            return None;
        }
        if depth < self.budget.max_twist_depth {
            self.expand.push_back((class.clone(), depth));
        }
        Some(class)
    }
}

impl Iterator for SccEnumeration {
    type Item = CurveClass;

    fn next(&mut self) -> Option<CurveClass> {
        if self.emitted >= self.budget.max_curves {
            return None;
        }
        loop {
            if let Some((class, depth)) = self.pending.pop_front() {
                if let Some(out) = self.accept(class, depth) {
                    self.emitted += 1;
                    return Some(out);
                }
                continue;
            }
            let (parent, depth) = self.expand.pop_front()?;
            let base = parent.normal_form().clone();
            for (win, k) in self.moves.clone() {
                let image = dehn_twist_genus0(&base, &win, k, &self.presentation)
                    .expect("moves are valid windows of this presentation");
                self.pending.push_back((CurveClass::new(image), depth + 1));
            }
        }
    }
}
