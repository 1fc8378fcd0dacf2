use crate::error::{Error, Result};

/// Values of the lower convex hull of `{(k, samples[k])}` at the
/// integer abscissae `0..L`.
///
/// The output never exceeds the input componentwise and has
/// non-negative second differences. Aggregating costs over a region and
/// then taking the envelope is at least as tight as summing per-sample
/// envelopes: `convex_envelope(a + b) ≥ convex_envelope(a) +
/// convex_envelope(b)`.
pub fn convex_envelope(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::invalid("the envelope needs at least two samples"));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("envelope samples must be finite"));
    }
    // lower hull by the monotone-chain sweep: pop the middle point of
    // any non-convex (clockwise or collinear) triple
    let mut hull: Vec<usize> = Vec::with_capacity(samples.len());
    for k in 0..samples.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b - a) as f64 * (samples[k] - samples[a])
                - (samples[b] - samples[a]) * (k - a) as f64;
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut out = Vec::with_capacity(samples.len());
    for pair in hull.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let slope = (samples[b] - samples[a]) / (b - a) as f64;
        for k in a..b {
            out.push(samples[a] + slope * (k - a) as f64);
        }
    }
    out.push(samples[*hull.last().expect("hull is non-empty")]);
    Ok(out)
}
