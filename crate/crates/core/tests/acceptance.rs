//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use totally_elliptic::chains::{
    build_chain, construct_dt, dt_orientation, pants_configuration, restrict_subsphere, toledo_dt, Orientation,
    PantsConfiguration,
};
use totally_elliptic::complexify::{
    build_reducible_example, cocycle_extend, default_phases, default_z, triangular_commutator,
};
use totally_elliptic::moebius::{
    classify_element, commutator_class, rotation_about, ElementClass, Field, HPoint, ProjectiveMatrix,
};
use totally_elliptic::rep::{
    certify_totally_elliptic, curve_stream, random_disk_point, run_orbit, sample_relative, Representation,
    SampleConfig, SampleOutcome,
};
use totally_elliptic::surface::{
    abelianize, dehn_twist_genus0, scc_seed_family, Generator, Letter, SccBudget, SurfacePresentation, TwistWindow,
    Word,
};
use totally_elliptic::verdict::{classify_complex, classify_real, VerdictTag};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Plain 2×2 product of real entries.
fn mul(x: [f64; 4], y: [f64; 4]) -> [f64; 4] {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

fn inv(x: [f64; 4]) -> [f64; 4] {
    [x[3], -x[1], -x[2], x[0]]
}

/// Evaluates a word by direct matrix products, independent of the library's
/// evaluation path.
fn oracle_trace(r: &Representation, w: &Word) -> f64 {
    let gens = r.presentation().generators();
    let mut acc = [1.0, 0.0, 0.0, 1.0];
    for l in w.letters() {
        let k = gens.iter().position(|g| *g == l.generator).unwrap();
        let m = r.images()[k].real_entries().unwrap();
        acc = mul(acc, if l.inverse { inv(m) } else { m });
    }
    acc[0] + acc[3]
}

/// Angle at `a` of the geodesic triangle `abc` from side lengths.
fn angle_from_sides(a: &HPoint, b: &HPoint, c: &HPoint) -> f64 {
    let (ab, ac, bc) = (a.distance(b), a.distance(c), b.distance(c));
    ((ab.cosh() * ac.cosh() - bc.cosh()) / (ab.sinh() * ac.sinh())).clamp(-1.0, 1.0).acos()
}

fn random_ccw_alpha(rng: &mut ChaCha8Rng, n: usize, min: f64) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total = rng.gen_range(0.05..0.95) * TAU;
        let s: f64 = w.iter().sum();
        let a: Vec<f64> = w.iter().map(|x| x * total / s).collect();
        if a.iter().all(|&x| x >= min) && a.iter().sum::<f64>() < TAU {
            return a;
        }
    }
}

fn random_sl2r(rng: &mut ChaCha8Rng) -> ProjectiveMatrix {
    loop {
        let (a, b, c): (f64, f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if a.abs() > 0.2 {
            return ProjectiveMatrix::real(a, b, c, (1.0 + b * c) / a).unwrap();
        }
    }
}

fn commutator_trichotomy() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut identity, mut hyperbolic) = (0, 0);
    for k in 0..10_000 {
        let centre = random_disk_point(&mut rng, 3.0);
        let theta = rng.gen_range(0.01..TAU - 0.01);
        let a = rotation_about(&centre, theta).unwrap();
        let x = if k % 4 == 0 {
            rotation_about(&centre, rng.gen_range(0.01..TAU - 0.01)).unwrap()
        } else {
            random_sl2r(&mut rng)
        };
        let (class, _) = commutator_class(&a, &x, 1e-9).map_err(|e| format!("pair {k}: {e}"))?;
        let fixes = x.act_point(centre).distance(&centre) < 1e-8;
        match class {
            ElementClass::Identity => identity += 1,
            ElementClass::Hyperbolic => hyperbolic += 1,
            other => return Err(format!("pair {k}: commutator is {other}")),
        }
        ensure((class == ElementClass::Identity) == fixes, || {
            format!("pair {k}: class {class} but fixes-centre = {fixes}")
        })?;
    }
    Ok(format!("{identity} identity, {hyperbolic} hyperbolic"))
}

fn pants_table_grid() -> Result<String, String> {
    let step = TAU / 51.0;
    let mut ccw = 0;
    let mut worst_residual: f64 = 0.0;
    let mut worst_angle: f64 = 0.0;
    for i in 1..=50u32 {
        for j in 1..=50u32 {
            for k in 1..=50u32 {
                let s = i + j + k;
                let alpha = [i as f64 * step, j as f64 * step, k as f64 * step];
                let expected = if s == 51 || s == 102 {
                    PantsConfiguration::Degenerate
                } else if s < 51 {
                    PantsConfiguration::AntiClockwise
                } else if s > 102 {
                    PantsConfiguration::Clockwise
                } else {
                    PantsConfiguration::Empty
                };
                let got = pants_configuration(alpha, 1e-9);
                ensure(got == expected, || format!("({i},{j},{k})·2π/51: {got:?} vs {expected:?}"))?;
                if got != PantsConfiguration::AntiClockwise {
                    continue;
                }
                ccw += 1;
                let r = construct_dt(&alpha, None, (i * 2500 + j * 50 + k) as u64, 1e-9)
                    .map_err(|e| format!("({i},{j},{k}): {e}"))?;
                worst_residual = worst_residual.max(r.relation_residual());
                let chain = build_chain(&r).map_err(|e| e.to_string())?;
                let c = &chain.c_vertices;
                for v in 0..3 {
                    let got = angle_from_sides(&c[v], &c[(v + 1) % 3], &c[(v + 2) % 3]);
                    worst_angle = worst_angle.max((got - alpha[v] / 2.0).abs());
                }
                ensure(chain.orientations == vec![Orientation::AntiClockwise], || {
                    format!("({i},{j},{k}): orientation {:?}", chain.orientations)
                })?;
            }
        }
    }
    ensure(worst_residual <= 1e-9, || format!("relation residual {worst_residual:e}"))?;
    ensure(worst_angle <= 1e-8, || format!("interior angle error {worst_angle:e}"))?;
    Ok(format!(
        "125000 triples, {ccw} anticlockwise; max residual {worst_residual:.1e}, max angle error {worst_angle:.1e}"
    ))
}

fn dt_certification() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut max_trace: f64 = 0.0;
    let mut curves = 0;
    for k in 0..100 {
        let n = rng.gen_range(3..=8);
        let mut alpha = random_ccw_alpha(&mut rng, n, 0.05);
        if k % 2 == 1 {
            alpha = alpha.iter().map(|a| TAU - a).collect();
        }
        let r = construct_dt(&alpha, None, k, 1e-9).map_err(|e| format!("sample {k} (n={n}): {e}"))?;
        let report = certify_totally_elliptic(&r, SccBudget::with_max_curves(500), k).map_err(|e| e.to_string())?;
        ensure(report.is_certified(), || format!("sample {k} (n={n}): {:?}", report.status))?;
        ensure(report.identity_curves.is_empty(), || format!("sample {k}: identity images"))?;
        ensure(report.max_elliptic_trace < 2.0 - 1e-6, || {
            format!("sample {k}: |tr| {} too close to 2", report.max_elliptic_trace)
        })?;
        max_trace = max_trace.max(report.max_elliptic_trace);
        curves += report.curves_checked;
    }
    Ok(format!("100 certified, {curves} curves, max |tr| {max_trace:.9}"))
}

fn toledo_formula() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for band in [Orientation::AntiClockwise, Orientation::Clockwise] {
        for k in 0..1000 {
            let n = rng.gen_range(3..=10);
            let mut alpha = random_ccw_alpha(&mut rng, n, 0.0);
            if band == Orientation::Clockwise {
                alpha = alpha.iter().map(|a| TAU - a).collect();
            }
            let total: f64 = alpha.iter().sum();
            let expected = match band {
                Orientation::AntiClockwise => 1.0 - total / TAU,
                _ => (n as f64 - 1.0) - total / TAU,
            };
            let got = toledo_dt(&alpha).map_err(|e| format!("{band:?} {k}: {e}"))?;
            ensure(got == expected, || format!("{band:?} {k}: {got} vs {expected}"))?;
            ensure(got > -1.0 && got < 1.0 && got != 0.0, || format!("{band:?} {k}: {got} out of range"))?;
            ensure(got.signum() == if band == Orientation::Clockwise { -1.0 } else { 1.0 }, || {
                format!("{band:?} {k}: sign of {got}")
            })?;
        }
    }
    Ok("2000 angle vectors".into())
}

fn twist_word() -> Result<String, String> {
    let p = SurfacePresentation::sphere(4).unwrap();
    let win = TwistWindow::new(2, 3, &p).unwrap();
    let w: Word = "c1.c2".parse().unwrap();
    let out = dehn_twist_genus0(&w, &win, 1, &p).map_err(|e| e.to_string())?;
    ensure(out.to_string() == "c1.C3.c2.c3", || format!("got {out}"))?;
    Ok(out.to_string())
}

fn genus_path() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = SurfacePresentation::new(2, 0).unwrap();
    let family: HashSet<_> = scc_seed_family(&p).into_iter().collect();
    let mut witnesses = HashSet::new();
    for k in 0..50 {
        let q1 = random_disk_point(&mut rng, 2.0);
        let q2 = loop {
            let q = random_disk_point(&mut rng, 2.0);
            if q.distance(&q1) > 0.05 {
                break q;
            }
        };
        let a1 = rotation_about(&q1, rng.gen_range(0.1..TAU - 0.1)).unwrap();
        let b1 = rotation_about(&q2, rng.gen_range(0.1..TAU - 0.1)).unwrap();
        let r = Representation::new(p, Field::Real, vec![a1, b1, b1, a1], 1e-9).map_err(|e| e.to_string())?;
        let v = classify_real(&r, SccBudget::default(), k).map_err(|e| e.to_string())?;
        let w = v.witness.clone().ok_or_else(|| format!("rep {k}: {:?}", v.tag))?;
        ensure(
            v.tag
                == VerdictTag::NotTotallyElliptic {
                    class: ElementClass::Hyperbolic,
                },
            || format!("rep {k}: {:?}", v.tag),
        )?;
        ensure(family.contains(&w) && w.representative().len() > 1, || {
            format!("rep {k}: witness {w} is not a listed commutator word")
        })?;
        let tr = oracle_trace(&r, w.representative()).abs();
        ensure(tr > 2.0 + 1e-9, || format!("rep {k}: witness {w} has |tr| {tr}"))?;
        witnesses.insert(w.to_string());
    }
    for k in 0..50 {
        let c = random_disk_point(&mut rng, 2.0);
        let images = (0..4)
            .map(|_| rotation_about(&c, rng.gen_range(0.1..TAU - 0.1)).unwrap())
            .collect();
        let r = Representation::new(p, Field::Real, images, 1e-9).map_err(|e| e.to_string())?;
        let v = classify_real(&r, SccBudget::default(), k).map_err(|e| e.to_string())?;
        ensure(matches!(v.tag, VerdictTag::Orthogonal { .. }), || format!("orthogonal {k}: {:?}", v.tag))?;
    }
    let mut w: Vec<_> = witnesses.into_iter().collect();
    w.sort();
    Ok(format!("50 witnesses {w:?}; 50 orthogonal"))
}

fn subsphere_induction() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for k in 0..50 {
        let n = rng.gen_range(5..=8);
        let mut alpha = random_ccw_alpha(&mut rng, n, 0.05);
        if k % 2 == 1 {
            alpha = alpha.iter().map(|a| TAU - a).collect();
        }
        let parent = dt_orientation(&alpha).unwrap();
        let r = construct_dt(&alpha, None, k, 1e-9).map_err(|e| format!("{k}: {e}"))?;
        let chain = build_chain(&r).map_err(|e| e.to_string())?;
        ensure(chain.coherent_orientation() == Some(parent), || format!("{k}: parent chain {:?}", chain.orientations))?;
        for i in 1..=(n as u32 - 3) {
            let sub = restrict_subsphere(&r, i).map_err(|e| format!("{k}, i={i}: {e}"))?;
            let ch = build_chain(&sub).map_err(|e| format!("{k}, i={i}: {e}"))?;
            ensure(ch.orientations.len() == 2 && ch.coherent_orientation() == Some(parent), || {
                format!("{k}, i={i}: {:?} vs {parent:?}", ch.orientations)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} sub-spheres coherent with their parent"))
}

fn orbit_boundedness() -> Result<String, String> {
    let r = construct_dt(&[FRAC_PI_3, FRAC_PI_2, 2.0 * FRAC_PI_3, 1.0], None, 8, 1e-9).map_err(|e| e.to_string())?;
    let run = run_orbit(&r, 10_000, 8, 2.0).map_err(|e| e.to_string())?;
    ensure(run.sup_abs_trace < 2.0, || format!("DT orbit reached |tr| {}", run.sup_abs_trace))?;
    ensure(run.rows.len() == 10_001, || "wrong number of iterates".into())?;

    let p = SurfacePresentation::sphere(4).unwrap();
    let hyp = |t: f64, phi: f64| {
        let h = ProjectiveMatrix::real(t.exp(), 0.0, 0.0, (-t).exp()).unwrap();
        h.conjugate_by(&rotation_about(&HPoint::i(), phi).unwrap())
    };
    let prefix = vec![hyp(0.9, 0.3), hyp(1.0, 2.2), hyp(0.8, 4.1)];
    let fuchsian = Representation::sphere_from_prefix(p, Field::Real, prefix, 1e-9).map_err(|e| e.to_string())?;
    let contrast = run_orbit(&fuchsian, 100, 8, 10.0).map_err(|e| e.to_string())?;
    let first = contrast
        .first_exceeding
        .ok_or_else(|| format!("contrast stayed below 10 (sup {})", contrast.sup_abs_trace))?;
    let start = contrast.rows[0].iter().copied().fold(0.0, f64::max);
    Ok(format!(
        "DT sup |tr| {:.9}; contrast starts at {start:.3}, exceeds 10 at iterate {first}",
        run.sup_abs_trace
    ))
}

fn reducible_examples() -> Result<String, String> {
    let mut summary = Vec::new();
    for n in 3..=6u32 {
        let k = n as usize - 1;
        let theta = default_phases(k);
        // independent check of the excluded products over every proper subset
        let mut all = theta.clone();
        all.push(-theta.iter().sum::<f64>());
        for mask in 1u32..(1 << n) - 1 {
            let s: f64 = (0..n as usize).filter(|b| mask & (1 << b) != 0).map(|b| all[b]).sum();
            let m = s.rem_euclid(PI);
            ensure(m.min(PI - m) > 1e-6, || format!("n={n}: subset {mask:b} has phase {s}"))?;
        }
        let (data, r) = build_reducible_example(n, &theta, &default_z(k), 1e-9).map_err(|e| format!("n={n}: {e}"))?;
        let v = classify_complex(&r, SccBudget::default(), 0).map_err(|e| e.to_string())?;
        ensure(v.tag == VerdictTag::ReducibleNonUnitary, || format!("n={n}: {:?} {:?}", v.tag, v.evidence))?;
        let budget = SccBudget::with_max_curves(1000);
        let report = certify_totally_elliptic(&r, budget, 0).map_err(|e| e.to_string())?;
        ensure(report.is_certified(), || format!("n={n}: {:?}", report.status))?;
        let p = *r.presentation();
        for curve in curve_stream(&r, budget, 0).map_err(|e| e.to_string())? {
            let tr = r.evaluate(curve.representative()).unwrap().trace();
            ensure(tr.im.abs() <= 1e-9 && tr.re.abs() < 2.0, || format!("n={n}: {curve} has trace {tr}"))?;
            // trace of an upper-triangular image is λ + λ⁻¹ with λ read off the abelianization
            let ab = abelianize(curve.representative(), &p).unwrap();
            let phase: f64 = ab.iter().zip(&all).map(|(&e, t)| e as f64 * t).sum();
            ensure((tr.re.abs() - 2.0 * phase.cos().abs()).abs() < 1e-9, || {
                format!("n={n}: {curve} trace {tr} vs phase {phase}")
            })?;
            let (lambda, _) = cocycle_extend(&data, curve.representative()).unwrap();
            ensure((lambda + lambda.inv() - tr).norm() < 1e-9 || (lambda + lambda.inv() + tr).norm() < 1e-9, || {
                format!("n={n}: {curve} cocycle mismatch")
            })?;
        }
        summary.push(format!("n={n}: {} curves", report.curves_checked));
    }
    Ok(summary.join(", "))
}

fn random_word(rng: &mut ChaCha8Rng, n: u32, len: usize) -> Word {
    Word::new((0..len).map(|_| Letter::new(Generator::C(rng.gen_range(1..=n)), rng.gen_bool(0.5))))
}

fn commutator_formula() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let n = 5;
    let theta = default_phases(4);
    let z: Vec<Complex64> = (0..4).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let (data, r) = build_reducible_example(n, &theta, &z, 1e-9).map_err(|e| e.to_string())?;
    let mut identities = 0;
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let len = rng.gen_range(1..=8);
        let g1 = random_word(&mut rng, n, len);
        let g2 = if k % 4 == 0 {
            g1.pow(rng.gen_range(-3..=3))
        } else {
            let len = rng.gen_range(1..=8);
            random_word(&mut rng, n, len)
        };
        let formula = triangular_commutator(&data, &g1, &g2).map_err(|e| e.to_string())?;
        let direct = r.evaluate(&Word::commutator(&g1, &g2)).map_err(|e| e.to_string())?;
        let d = formula.distance(&direct);
        worst = worst.max(d);
        ensure(d <= 1e-9, || format!("pair {k} ({g1}, {g2}): distance {d:e}"))?;
        let (_, z12) = cocycle_extend(&data, &(g1.clone() * g2.clone())).unwrap();
        let (_, z21) = cocycle_extend(&data, &(g2.clone() * g1.clone())).unwrap();
        let symmetric = (z12 - z21).norm() <= 1e-9;
        let identity = classify_element(&direct, 1e-9) == ElementClass::Identity;
        ensure(identity == symmetric, || format!("pair {k} ({g1}, {g2}): identity {identity}, z-symmetric {symmetric}"))?;
        identities += identity as usize;
    }
    Ok(format!("1000 pairs, {identities} identity, max distance {worst:.1e}"))
}

fn sampling_emptiness() -> Result<String, String> {
    let p = SurfacePresentation::sphere(3).unwrap();
    let mut parts = Vec::new();
    for (alpha, seed) in [([2.5; 3], 1u64), ([3.0, 2.8, 2.6], 2)] {
        let config = SampleConfig {
            attempts: 1_000_000,
            seed,
            ..SampleConfig::default()
        };
        match sample_relative(&p, &alpha, &config).map_err(|e| e.to_string())? {
            SampleOutcome::Empty(report) => {
                ensure(report.proven_empty && report.attempts == 1_000_000, || format!("{report:?}"))?;
            }
            SampleOutcome::Accepted { .. } => return Err(format!("{alpha:?} accepted")),
        }
        parts.push(format!("{alpha:?} empty"));
    }
    for (alpha, seed) in [([FRAC_PI_2; 3], 1u64), ([FRAC_PI_3, FRAC_PI_2, 2.0 * FRAC_PI_3], 2), ([1.0, 1.5, 2.0], 3)] {
        let config = SampleConfig {
            attempts: 10_000,
            seed,
            ..SampleConfig::default()
        };
        match sample_relative(&p, &alpha, &config).map_err(|e| e.to_string())? {
            SampleOutcome::Accepted { attempts_used, .. } => parts.push(format!("accepted after {attempts_used}")),
            SampleOutcome::Empty(report) => return Err(format!("{alpha:?} not accepted: {report:?}")),
        }
    }
    Ok(parts.join(", "))
}

fn main() {
    let criteria: [(&str, Check, u64); 11] = [
        ("commutator of elliptic with anything is identity or hyperbolic", commutator_trichotomy, 1),
        ("three-punctured case table and triangle angles", pants_table_grid, 10),
        ("DT constructions certify as regular elliptic", dt_certification, 60),
        ("Toledo formula in both bands", toledo_formula, 60),
        ("twist of c1c2 along c2c3", twist_word, 60),
        ("genus two witnesses and orthogonal cases", genus_path, 10),
        ("sub-sphere restrictions keep orientation", subsphere_induction, 60),
        ("DT twist orbits stay elliptic; hyperbolic contrast escapes", orbit_boundedness, 30),
        ("reducible non-unitary examples", reducible_examples, 30),
        ("triangular commutator formula", commutator_formula, 60),
        ("three-punctured emptiness and acceptance", sampling_emptiness, 60),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed > Duration::from_secs(*limit) {
                Err(format!("took {elapsed:.2?}, limit {limit} s ({detail})"))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("[PASS] {:>2}. {name} ({elapsed:.2?}): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {:>2}. {name} ({elapsed:.2?}): {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
