use std::f64::consts::PI;

use num_complex::Complex64;

/// Parses a decimal angle or a rational multiple of π such as `2pi/3`,
/// `π/3`, `pi` or `-3*pi/4`.
pub fn angle(s: &str) -> Result<f64, String> {
    let t = s.trim().replace('π', "pi");
    let Some(pos) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| format!("invalid angle `{s}`"));
    };
    let coef = t[..pos].trim_end_matches('*').trim();
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| format!("invalid coefficient in `{s}`"))?,
    };
    let rest = t[pos + 2..].trim();
    let den = match rest.strip_prefix('/') {
        Some(d) => d.trim().parse::<f64>().map_err(|_| format!("invalid denominator in `{s}`"))?,
        None if rest.is_empty() => 1.0,
        None => return Err(format!("invalid angle `{s}`")),
    };
    if den == 0.0 {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(coef * PI / den)
}

/// A comma-separated list given as one flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

pub fn angles(s: &str) -> Result<List<f64>, String> {
    s.split(',').map(angle).collect::<Result<_, _>>().map(List)
}

/// Comma-separated complex numbers in the forms `1`, `2i`, `1+2i`.
pub fn complexes(s: &str) -> Result<List<Complex64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<Complex64>().map_err(|_| format!("invalid complex number `{x}`")))
        .collect::<Result<_, _>>()
        .map(List)
}

/// A non-negative integer, also accepted in float notation such as `1e6`.
pub fn count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("invalid count `{s}`"))?;
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("invalid count `{s}`"))
    }
}
