use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::core::Image;
use crate::error::{Error, Result};

/// A fixed set of target colors.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    channels: usize,
    colors: Vec<f64>,
}

impl Palette {
    pub fn new(channels: usize, colors: Vec<f64>) -> Result<Self> {
        if channels == 0 || colors.is_empty() || colors.len() % channels != 0 {
            return Err(Error::dims(format!(
                "palette data of length {} does not split into {}-channel colors",
                colors.len(),
                channels
            )));
        }
        if !colors.iter().all(|c| c.is_finite() && (0.0..=1.0).contains(c)) {
            return Err(Error::invalid("palette colors must lie in [0, 1]"));
        }
        Ok(Self { channels, colors })
    }

    pub fn len(&self) -> usize {
        self.colors.len() / self.channels
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one color
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn color(&self, k: usize) -> &[f64] {
        &self.colors[k * self.channels..(k + 1) * self.channels]
    }
}

/// Selects `l` palette colors by k-means over the pixel colors:
/// distance-proportional seeding driven by `seed`, then `iters` rounds
/// of Lloyd refinement. Deterministic for a fixed seed. When the image
/// has fewer distinct colors than `l`, duplicate centers are permitted
/// and a warning is logged.
pub fn kmeans_palette(image: &Image, l: usize, iters: usize, seed: u64) -> Result<Palette> {
    if l == 0 {
        return Err(Error::invalid("a palette needs at least one color"));
    }
    if iters == 0 {
        return Err(Error::invalid("at least one refinement iteration is required"));
    }
    let ch = image.channels();
    let n = image.pixel_count();
    let pixel = |p: usize| &image.data()[p * ch..(p + 1) * ch];
    let dist2 = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    };

    // distance-proportional seeding: each next center is a pixel drawn
    // with probability proportional to its squared distance from the
    // centers chosen so far
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<f64> = Vec::with_capacity(l * ch);
    centers.extend_from_slice(pixel(rng.gen_range(0..n)));
    let mut nearest2: Vec<f64> = (0..n).map(|p| dist2(pixel(p), &centers[..ch])).collect();
    let mut duplicates = false;
    while centers.len() < l * ch {
        let total: f64 = nearest2.iter().sum();
        let chosen = if total > 0.0 {
            WeightedIndex::new(&nearest2)
                .expect("non-negative weights with positive sum")
                .sample(&mut rng)
        } else {
            duplicates = true;
            rng.gen_range(0..n)
        };
        let start = centers.len();
        centers.extend_from_slice(pixel(chosen));
        for (p, near) in nearest2.iter_mut().enumerate() {
            let d = dist2(pixel(p), &centers[start..start + ch]);
            if d < *near {
                *near = d;
            }
        }
    }
    if duplicates {
        log::warn!(
            "image has fewer than {} distinct colors; palette contains duplicates",
            l
        );
    }

    // Lloyd rounds: assign to the nearest center (ties to the lowest
    // index), then move each center to its cluster mean
    for _ in 0..iters {
        let mut sums = vec![0.0f64; l * ch];
        let mut counts = vec![0usize; l];
        for p in 0..n {
            let px = pixel(p);
            let mut best = (f64::INFINITY, 0usize);
            for k in 0..l {
                let d = dist2(px, &centers[k * ch..(k + 1) * ch]);
                if d < best.0 {
                    best = (d, k);
                }
            }
            counts[best.1] += 1;
            for c in 0..ch {
                sums[best.1 * ch + c] += px[c];
            }
        }
        for k in 0..l {
            if counts[k] > 0 {
                for c in 0..ch {
                    centers[k * ch + c] = sums[k * ch + c] / counts[k] as f64;
                }
            }
        }
    }
    Palette::new(ch, centers)
}
