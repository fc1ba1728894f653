//! Parsing of `start:stop:step` grids and comma-separated lists.

/// Inclusive arithmetic grid `start, start + step, ..., <= stop`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(format!("grid {spec:?} is not start:stop:step"));
    };
    let num = |s: &str| {
        taulab::real::parse_real(s).ok_or_else(|| format!("grid {spec:?}: {s:?} is not a real"))
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(format!("grid {spec:?} needs step > 0 and stop >= start"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(format!("grid {spec:?} has too many points"));
    }
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

pub fn parse_list(spec: &str) -> Result<Vec<f64>, String> {
    let values: Result<Vec<f64>, String> = spec
        .split(',')
        .map(|s| {
            taulab::real::parse_real(s).ok_or_else(|| format!("list entry {s:?} is not a real"))
        })
        .collect();
    let values = values?;
    if values.is_empty() {
        return Err("empty list".into());
    }
    Ok(values)
}

/// `lo:hi` pairs separated by commas.
pub fn parse_bands(spec: &str) -> Result<Vec<(f64, f64)>, String> {
    spec.split(',')
        .map(|band| {
            let (lo, hi) = band
                .split_once(':')
                .ok_or_else(|| format!("band {band:?} is not lo:hi"))?;
            let lo = taulab::real::parse_real(lo).ok_or_else(|| format!("band {band:?}"))?;
            let hi = taulab::real::parse_real(hi).ok_or_else(|| format!("band {band:?}"))?;
            Ok((lo, hi))
        })
        .collect()
}
