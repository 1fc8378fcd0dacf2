use crate::core::{Image, PotentialField};
use crate::error::{Error, Result};

/// Covariance ridge keeping every fitted model well-conditioned.
const COVARIANCE_RIDGE: f64 = 1e-4;
/// Labels with fewer scribbled pixels than this get a diagonal
/// covariance (too few samples to estimate correlations).
const FULL_COVARIANCE_MIN_PIXELS: usize = 4;

/// User-marked training pixels: one disjoint, non-empty pixel-index
/// list per label.
#[derive(Debug, Clone)]
pub struct ScribbleSet {
    labels: Vec<Vec<usize>>,
    pixel_count: usize,
}

impl ScribbleSet {
    pub fn new(labels: Vec<Vec<usize>>, pixel_count: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::invalid("a scribble set needs at least one label"));
        }
        let mut seen = vec![false; pixel_count];
        for (k, pixels) in labels.iter().enumerate() {
            if pixels.is_empty() {
                return Err(Error::invalid(format!("label {} has no scribbled pixels", k)));
            }
            for &p in pixels {
                if p >= pixel_count {
                    return Err(Error::invalid(format!(
                        "scribble index {} out of range for {} pixels",
                        p, pixel_count
                    )));
                }
                if seen[p] {
                    return Err(Error::invalid(format!(
                        "pixel {} is scribbled with more than one label",
                        p
                    )));
                }
                seen[p] = true;
            }
        }
        Ok(Self {
            labels,
            pixel_count,
        })
    }

    /// Builds a scribble set from a per-pixel map where 0 means
    /// unmarked and `v ≥ 1` marks label `v − 1`. Every label up to the
    /// largest must be present.
    pub fn from_map(width: usize, height: usize, map: &[u32]) -> Result<Self> {
        if map.len() != width * height {
            return Err(Error::dims(format!(
                "expected {} map entries for a {}x{} grid, got {}",
                width * height,
                width,
                height,
                map.len()
            )));
        }
        let max = *map.iter().max().unwrap_or(&0);
        if max == 0 {
            return Err(Error::invalid("the scribble map marks no pixels"));
        }
        let mut labels = vec![Vec::new(); max as usize];
        for (p, &v) in map.iter().enumerate() {
            if v > 0 {
                labels[v as usize - 1].push(p);
            }
        }
        Self::new(labels, map.len())
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn pixels(&self, label: usize) -> &[usize] {
        &self.labels[label]
    }

    pub fn pixel_count(&self) -> usize {
        self.pixel_count
    }
}

/// Fits one Gaussian per label over (color, x/width, y/height) features
/// of the scribbled pixels — full covariance with a `1e-4·I` ridge, or
/// diagonal when a label has fewer than 4 pixels — and scores every
/// pixel by negative log-density, shifted per pixel so the best label
/// costs 0.
pub fn scribble_costs(image: &Image, scribbles: &ScribbleSet) -> Result<PotentialField> {
    if scribbles.label_count() < 2 {
        return Err(Error::invalid("scribble segmentation needs at least 2 labels"));
    }
    if scribbles.pixel_count() != image.pixel_count() {
        return Err(Error::dims(format!(
            "scribbles cover {} pixels but the image has {}",
            scribbles.pixel_count(),
            image.pixel_count()
        )));
    }
    let (width, height, ch) = (image.width(), image.height(), image.channels());
    let f = ch + 2;
    let feature = |p: usize, out: &mut [f64]| {
        let (x, y) = (p % width, p / width);
        out[..ch].copy_from_slice(image.pixel(x, y));
        out[ch] = x as f64 / width as f64;
        out[ch + 1] = y as f64 / height as f64;
    };

    struct Model {
        mean: Vec<f64>,
        chol: Vec<f64>,
        log_det: f64,
    }
    let mut models = Vec::with_capacity(scribbles.label_count());
    let mut v = vec![0.0; f];
    for k in 0..scribbles.label_count() {
        let pixels = scribbles.pixels(k);
        let n = pixels.len() as f64;
        let mut mean = vec![0.0; f];
        for &p in pixels {
            feature(p, &mut v);
            for (m, &x) in mean.iter_mut().zip(&v) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut cov = vec![0.0; f * f];
        for &p in pixels {
            feature(p, &mut v);
            for i in 0..f {
                for j in 0..f {
                    cov[i * f + j] += (v[i] - mean[i]) * (v[j] - mean[j]);
                }
            }
        }
        for c in &mut cov {
            *c /= n;
        }
        if pixels.len() < FULL_COVARIANCE_MIN_PIXELS {
            for i in 0..f {
                for j in 0..f {
                    if i != j {
                        cov[i * f + j] = 0.0;
                    }
                }
            }
        }
        for i in 0..f {
            cov[i * f + i] += COVARIANCE_RIDGE;
        }
        let chol = cholesky(&cov, f).expect("ridged covariance is positive definite");
        let log_det = 2.0 * (0..f).map(|i| chol[i * f + i].ln()).sum::<f64>();
        models.push(Model {
            mean,
            chol,
            log_det,
        });
    }

    let l = models.len();
    let half_norm = 0.5 * f as f64 * (2.0 * std::f64::consts::PI).ln();
    let mut data = Vec::with_capacity(image.pixel_count() * l);
    let mut d = vec![0.0; f];
    for p in 0..image.pixel_count() {
        feature(p, &mut v);
        let base = data.len();
        let mut best = f64::INFINITY;
        for model in &models {
            for i in 0..f {
                d[i] = v[i] - model.mean[i];
            }
            let quad = forward_solve_squared_norm(&model.chol, f, &mut d);
            let cost = 0.5 * quad + 0.5 * model.log_det + half_norm;
            best = best.min(cost);
            data.push(cost);
        }
        for c in &mut data[base..] {
            *c -= best;
        }
    }
    PotentialField::new(width, height, l, data)
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite
/// `n×n` matrix in row-major order.
fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Solves `L y = d` in place and returns `‖y‖²`, which equals the
/// quadratic form `dᵀ (L Lᵀ)⁻¹ d`.
fn forward_solve_squared_norm(l: &[f64], n: usize, d: &mut [f64]) -> f64 {
    let mut norm2 = 0.0;
    for i in 0..n {
        let mut s = d[i];
        for k in 0..i {
            s -= l[i * n + k] * d[k];
        }
        d[i] = s / l[i * n + i];
        norm2 += d[i] * d[i];
    }
    norm2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::argmin_map;

    #[test]
    fn separated_regions_are_recovered_exactly() {
        // constant halves 0.1 / 0.9 with scribbles inside each
        let data: Vec<f64> = (0..32)
            .map(|p| if p % 8 < 4 { 0.1 } else { 0.9 })
            .collect();
        let img = Image::new(8, 4, 1, data).unwrap();
        let mut map = vec![0u32; 32];
        for y in 1..3 {
            for x in 1..3 {
                map[y * 8 + x] = 1;
            }
            for x in 5..7 {
                map[y * 8 + x] = 2;
            }
        }
        let scribbles = ScribbleSet::from_map(8, 4, &map).unwrap();
        let costs = scribble_costs(&img, &scribbles).unwrap();
        let labeled = argmin_map(&costs);
        assert_eq!(labeled.len(), 32);
        for (p, &got) in labeled.iter().enumerate() {
            let want = if p % 8 < 4 { 0.0 } else { 1.0 };
            assert_eq!(got, want, "pixel {p}");
        }
    }

    #[test]
    fn single_pixel_labels_rank_by_feature_distance() {
        // 3x1 gray ramp, one scribble per end; the diagonal-fallback
        // model is an isotropic Gaussian with variance 1e-4, so the
        // shifted cost of the losing label is half the squared feature
        // distance gap over the ridge
        let img = Image::new(3, 1, 1, vec![0.0, 0.5, 1.0]).unwrap();
        let scribbles = ScribbleSet::new(vec![vec![0], vec![2]], 3).unwrap();
        let costs = scribble_costs(&img, &scribbles).unwrap();
        // pixel 0: features (0, 0, 0); label-1 mean is (1, 2/3, 0)
        let gap2 = 1.0f64 + (2.0 / 3.0) * (2.0 / 3.0);
        assert_eq!(costs.get(0, 0, 0), 0.0);
        approx::assert_relative_eq!(
            costs.get(0, 0, 1),
            0.5 * gap2 / 1e-4,
            max_relative = 1e-9
        );
        // pixel 2 mirrors it
        assert_eq!(costs.get(2, 0, 1), 0.0);
        assert!(costs.get(2, 0, 0) > 0.0);
    }

    #[test]
    fn identical_statistics_give_identical_costs() {
        // disjoint pixel sets {0,5,7} and {1,3,8} share mean 4 and
        // variance 26/3 in x on a constant-color row, so the fitted
        // models coincide and both labels cost 0 everywhere
        let img = Image::constant(9, 1, &[0.5]).unwrap();
        let scribbles = ScribbleSet::new(vec![vec![0, 5, 7], vec![1, 3, 8]], 9).unwrap();
        let costs = scribble_costs(&img, &scribbles).unwrap();
        for x in 0..9 {
            approx::assert_abs_diff_eq!(costs.get(x, 0, 0), costs.get(x, 0, 1), epsilon = 1e-9);
            approx::assert_abs_diff_eq!(costs.get(x, 0, 0), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn shifted_costs_are_non_negative_with_zero_minimum() {
        let data: Vec<f64> = (0..48).map(|i| ((i * 11 % 13) as f64) / 12.0).collect();
        let img = Image::new(4, 4, 3, data).unwrap();
        let scribbles = ScribbleSet::new(vec![vec![0, 1, 4, 5], vec![10, 11, 14, 15]], 16).unwrap();
        let costs = scribble_costs(&img, &scribbles).unwrap();
        for y in 0..4 {
            for x in 0..4 {
                let row = costs.costs(x, y);
                assert!(row.iter().all(|&c| c >= 0.0));
                let min = row.iter().fold(f64::INFINITY, |a, &b| a.min(b));
                assert_eq!(min, 0.0);
            }
        }
    }

    #[test]
    fn rejects_bad_scribbles() {
        let img = Image::constant(2, 2, &[0.5]).unwrap();
        // overlapping labels
        assert!(ScribbleSet::new(vec![vec![0], vec![0]], 4).is_err());
        // empty label
        assert!(ScribbleSet::new(vec![vec![0], vec![]], 4).is_err());
        // out of range
        assert!(ScribbleSet::new(vec![vec![0], vec![9]], 4).is_err());
        // a single label is not enough to segment
        let one = ScribbleSet::new(vec![vec![0, 1]], 4).unwrap();
        assert!(scribble_costs(&img, &one).is_err());
        // gap in the label map (label 1 missing)
        assert!(ScribbleSet::from_map(2, 2, &[0, 0, 2, 2]).is_err());
    }
}
