//! Value grammars for flags and config files.

use dualent_core::{MeasurementSetting, VariablePair};
use num_complex::Complex64;

/// Complex amplitude: `a`, `ai`, `a+bi` or `a-bi` with decimal reals.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    let bad = || format!("`{s}` is not a complex amplitude (expected a, ai, a+bi or a-bi)");
    let real = |t: &str| -> Result<f64, String> {
        let x: f64 = t.parse().map_err(|_| bad())?;
        if x.is_finite() && !t.is_empty() {
            Ok(x)
        } else {
            Err(bad())
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(real(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(real(&body[..k])?, real(&body[k..])?)),
        None => Ok(Complex64::new(0.0, real(body)?)),
    }
}

/// `theta,phi` in radians.
pub fn setting(s: &str) -> Result<MeasurementSetting, String> {
    let (t, p) = s
        .split_once(',')
        .ok_or_else(|| format!("`{s}` is not a setting (expected theta,phi)"))?;
    let theta: f64 = t.trim().parse().map_err(|_| format!("bad theta in `{s}`"))?;
    let phi: f64 = p.trim().parse().map_err(|_| format!("bad phi in `{s}`"))?;
    MeasurementSetting::new(theta, phi).map_err(|e| e.to_string())
}

pub fn format_setting(s: &MeasurementSetting) -> String {
    format!("{},{}", s.theta(), s.phi())
}

/// `name:first,second`.
pub fn variable(s: &str) -> Result<VariablePair, String> {
    let (name, labels) = s
        .split_once(':')
        .ok_or_else(|| format!("`{s}` is not a variable (expected name:first,second)"))?;
    let (first, second) = labels
        .split_once(',')
        .ok_or_else(|| format!("`{s}` needs two comma-separated eigenlabels"))?;
    if name.is_empty() || first.is_empty() || second.is_empty() {
        return Err(format!("`{s}` has an empty field"));
    }
    VariablePair::new(name, first, second).map_err(|e| e.to_string())
}

const MAX_GRID_POINTS: usize = 100_000;

/// `start:stop:step` (inclusive of `stop` up to rounding) or a single value.
pub fn grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| -> Result<f64, String> {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("`{t}` in `{s}` is not a number"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 {
                return Err(format!("step in `{s}` must be positive"));
            }
            if stop < start {
                return Err(format!("stop before start in `{s}`"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > MAX_GRID_POINTS {
                return Err(format!("`{s}` has more than {MAX_GRID_POINTS} points"));
            }
            // Trim accumulated rounding (0.30000000000000004 -> 0.3).
            Ok((0..count)
                .map(|k| {
                    let x = start + k as f64 * step;
                    format!("{x:.12e}").parse().unwrap_or(x)
                })
                .collect())
        }
        _ => Err(format!("`{s}` is not a range (expected start:stop:step)")),
    }
}
