use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{RepError, Representation};
use crate::surface::{scc_seed_family, CurveClass, SurfaceError, TwistWindow};

/// Label recorded with every orbit run for the conjugacy normalization used.
pub const ORBIT_NORMALIZATION: &str = "first-elliptic-centre-at-i";

/// Trace statistics along a random walk in the pure mapping class group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRun {
    /// Seed-family curves, in column order.
    pub columns: Vec<CurveClass>,
    /// Applied twists as `(start, end, power)`.
    pub moves: Vec<(u32, u32, i32)>,
    /// `|tr|` of every column for every iterate, starting with the input.
    pub rows: Vec<Vec<f64>>,
    /// Supremum over iterates of the largest `|tr|` in a row.
    pub sup_abs_trace: f64,
    /// First iterate whose largest `|tr|` exceeds the threshold, if any.
    pub first_exceeding: Option<usize>,
    pub threshold: f64,
    pub normalization: String,
}

/// Applies `steps` random twists (window uniform, power ±1) to a genus-0
/// representation, normalizing each iterate by conjugation and recording
/// absolute traces over the seed family.
pub fn run_orbit(
    r: &Representation,
    steps: usize,
    seed: u64,
    threshold: f64,
) -> Result<OrbitRun, RepError> {
    let p = *r.presentation();
    if p.genus() != 0 {
        return Err(SurfaceError::WrongGenus(p.genus()).into());
    }
    let windows = TwistWindow::all(&p);
    if windows.is_empty() {
        return Err(SurfaceError::TooFewPunctures {
            needed: 3,
            got: p.punctures(),
        }
        .into());
    }
    let columns = scc_seed_family(&p);
    let traces = |r: &Representation| -> Result<Vec<f64>, RepError> {
        columns
            .iter()
            .map(|c| r.evaluate(c.representative()).map(|m| m.abs_trace()))
            .collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = r.normalized();
    let mut rows = vec![traces(&current)?];
    let mut moves = Vec::with_capacity(steps);
    for _ in 0..steps {
        let win = *windows.choose(&mut rng).expect("non-empty");
        let k = if rng.gen_bool(0.5) { 1 } else { -1 };
        current = current.mcg_twist(&win, k)?.normalized();
        moves.push((win.start(), win.end(), k));
        rows.push(traces(&current)?);
    }
    let row_max = |row: &Vec<f64>| row.iter().copied().fold(0.0, f64::max);
    let sup_abs_trace = rows.iter().map(row_max).fold(0.0, f64::max);
    let first_exceeding = rows.iter().position(|row| row_max(row) > threshold);
    Ok(OrbitRun {
        columns,
        moves,
        rows,
        sup_abs_trace,
        first_exceeding,
        threshold,
        normalization: ORBIT_NORMALIZATION.to_string(),
    })
}

impl OrbitRun {
    /// CSV with a header of curve words and one row per iterate.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iterate");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.to_string());
        }
        out.push('\n');
        for (k, row) in self.rows.iter().enumerate() {
            out.push_str(&k.to_string());
            for v in row {
                out.push(',');
                out.push_str(&format!("{v:.12e}"));
            }
            out.push('\n');
        }
        out
    }
}
