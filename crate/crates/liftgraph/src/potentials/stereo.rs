use crate::core::{Image, PotentialField};
use crate::error::{Error, Result};

/// A cost volume is a potential field whose label axis indexes integer
/// disparities `0..=d_max`.
pub type CostVolume = PotentialField;

/// Matching cost for every pixel and every integer disparity:
/// truncated sum of absolute luminance differences over a
/// `window × window` patch,
/// `ρ_d(x, y) = min(T, Σ |left(x+u, y+v) − right(x−d+u, y+v)|)`,
/// with out-of-range samples replaced by the nearest border pixel.
/// `truncation` defaults to half the worst possible window sum,
/// `0.5 · window²`.
pub fn stereo_cost_volume(
    left: &Image,
    right: &Image,
    d_max: usize,
    window: usize,
    truncation: Option<f64>,
) -> Result<CostVolume> {
    if left.width() != right.width() || left.height() != right.height() {
        return Err(Error::dims(format!(
            "stereo pair sizes differ: {}x{} vs {}x{}",
            left.width(),
            left.height(),
            right.width(),
            right.height()
        )));
    }
    if d_max >= left.width() {
        return Err(Error::invalid(format!(
            "d_max {} out of range for width {}",
            d_max,
            left.width()
        )));
    }
    if window % 2 == 0 || window == 0 {
        return Err(Error::invalid("the matching window must be odd"));
    }
    let t = truncation.unwrap_or(0.5 * (window * window) as f64);
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::invalid("truncation must be positive and finite"));
    }

    let (width, height) = (left.width(), left.height());
    let (gl, gr) = (left.luma(), right.luma());
    let radius = (window / 2) as isize;
    let sample = |g: &[f64], x: isize, y: isize| -> f64 {
        let cx = x.clamp(0, width as isize - 1) as usize;
        let cy = y.clamp(0, height as isize - 1) as usize;
        g[cy * width + cx]
    };

    let labels = d_max + 1;
    let mut data = Vec::with_capacity(width * height * labels);
    for y in 0..height as isize {
        for x in 0..width as isize {
            for d in 0..labels as isize {
                let mut sad = 0.0;
                for v in -radius..=radius {
                    for u in -radius..=radius {
                        sad += (sample(&gl, x + u, y + v) - sample(&gr, x - d + u, y + v)).abs();
                    }
                }
                data.push(sad.min(t));
            }
        }
    }
    PotentialField::new(width, height, labels, data)
}

/// Per-pixel minimizing label as a scalar field (ties to the smallest
/// label). For a stereo cost volume this is the pixelwise disparity
/// estimate, the guide signal for cut-pursuit.
pub fn argmin_map(costs: &PotentialField) -> Vec<f64> {
    let l = costs.labels();
    costs
        .data()
        .chunks_exact(l)
        .map(|row| {
            let mut best = 0usize;
            for (k, &c) in row.iter().enumerate().skip(1) {
                if c < row[best] {
                    best = k;
                }
            }
            best as f64
        })
        .collect()
}
