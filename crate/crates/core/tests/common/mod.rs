#![allow(dead_code)]

use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use totally_elliptic::moebius::{HPoint, ProjectiveMatrix};
use totally_elliptic::rep::Representation;
use totally_elliptic::surface::{Generator, Letter, Word};

pub fn point() -> impl Strategy<Value = HPoint> {
    (-3.0..3.0f64, 0.2..5.0f64).prop_map(|(x, y)| HPoint::new(x, y).unwrap())
}

pub fn angle() -> impl Strategy<Value = f64> {
    0.05..TAU - 0.05
}

/// A determinant-one real matrix with entries of moderate size.
pub fn sl2r() -> impl Strategy<Value = ProjectiveMatrix> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, any::<bool>()).prop_map(|(a, b, c, flip)| {
        let a = if a.abs() < 0.2 { 0.2f64.copysign(a) } else { a };
        let m = ProjectiveMatrix::real(a, b, c, (1.0 + b * c) / a).unwrap();
        if flip {
            m.inverse()
        } else {
            m
        }
    })
}

pub fn sl2c_from(rng: &mut ChaCha8Rng) -> ProjectiveMatrix {
    let mut z = || Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
    loop {
        let (a, b, c) = (z(), z(), z());
        if a.norm() > 0.3 {
            return ProjectiveMatrix::complex(a, b, c, (1.0 + b * c) / a).unwrap();
        }
    }
}

pub fn sl2r_from(rng: &mut ChaCha8Rng) -> ProjectiveMatrix {
    loop {
        let (a, b, c): (f64, f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if a.abs() > 0.3 {
            return ProjectiveMatrix::real(a, b, c, (1.0 + b * c) / a).unwrap();
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random angle vector with total in `(0.05·2π, 0.95·2π)`, mirrored into the
/// clockwise band when `clockwise` is set.
pub fn dt_alpha(rng: &mut ChaCha8Rng, n: usize, clockwise: bool) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total = rng.gen_range(0.05..0.95) * TAU;
        let s: f64 = w.iter().sum();
        let a: Vec<f64> = w.iter().map(|x| x * total / s).collect();
        if a.iter().all(|&x| x >= 0.05) {
            return if clockwise { a.iter().map(|x| TAU - x).collect() } else { a };
        }
    }
}

pub fn word_over(gens: &[Generator], code: &[(usize, bool)]) -> Word {
    Word::new(code.iter().map(|&(k, inv)| Letter::new(gens[k % gens.len()], inv)))
}

pub fn word_code(max_len: usize) -> impl Strategy<Value = Vec<(usize, bool)>> {
    prop::collection::vec((0..64usize, any::<bool>()), 0..=max_len)
}

/// Plain matrix-product evaluation of a word over a real representation.
pub fn oracle_eval(r: &Representation, w: &Word) -> [f64; 4] {
    let gens = r.presentation().generators();
    let mut acc = [1.0, 0.0, 0.0, 1.0];
    for l in w.letters() {
        let k = gens.iter().position(|g| *g == l.generator).unwrap();
        let m = r.images()[k].real_entries().unwrap();
        let m = if l.inverse { [m[3], -m[1], -m[2], m[0]] } else { m };
        acc = [
            acc[0] * m[0] + acc[1] * m[2],
            acc[0] * m[1] + acc[1] * m[3],
            acc[2] * m[0] + acc[3] * m[2],
            acc[2] * m[1] + acc[3] * m[3],
        ];
    }
    acc
}

/// Hyperbolic angle at `a` of the triangle `abc` from its side lengths.
pub fn angle_from_sides(a: &HPoint, b: &HPoint, c: &HPoint) -> f64 {
    let (ab, ac, bc) = (a.distance(b), a.distance(c), b.distance(c));
    ((ab.cosh() * ac.cosh() - bc.cosh()) / (ab.sinh() * ac.sinh())).clamp(-1.0, 1.0).acos()
}
