use crate::core::{Image, Partition};
use crate::error::{Error, Result};

/// Parameters for color-and-space clustering.
#[derive(Debug, Clone)]
pub struct SlicParams {
    /// Requested superpixel count (the final count may differ after
    /// connectivity enforcement).
    pub k: usize,
    /// Spatial compactness `m`: larger values weight coordinates more
    /// heavily against color, on `[0,1]`-scaled channels.
    pub compactness: f64,
    /// Assignment/update rounds.
    pub iterations: usize,
    /// Fragments smaller than this fraction of the mean superpixel size
    /// (`pixels / k`) are merged into their largest neighbor.
    pub min_size_fraction: f64,
}

impl Default for SlicParams {
    fn default() -> Self {
        Self {
            k: 256,
            compactness: 10.0,
            iterations: 10,
            min_size_fraction: 0.25,
        }
    }
}

#[derive(Clone)]
struct Center {
    x: f64,
    y: f64,
    color: [f64; 3],
}

/// Clusters pixels by the combined distance
/// `d = ‖Δcolor‖₂ + (m / S) · ‖Δxy‖₂` with `S = √(pixels / k)`,
/// searching a `2S × 2S` window around each cluster center, then
/// enforces 4-connectivity (fragments below the size threshold are
/// merged into their largest neighbor). Equal distances go to the
/// lowest cluster id, so the result is deterministic.
pub fn slic(image: &Image, params: &SlicParams) -> Result<Partition> {
    let (width, height) = (image.width(), image.height());
    let n = width * height;
    if params.k == 0 || params.k > n {
        return Err(Error::invalid(format!(
            "superpixel count {} out of range 1..={}",
            params.k, n
        )));
    }
    if params.compactness <= 0.0 || !params.compactness.is_finite() {
        return Err(Error::invalid("compactness must be positive and finite"));
    }
    if params.iterations == 0 {
        return Err(Error::invalid("at least one clustering iteration is required"));
    }
    if params.min_size_fraction.is_nan()
        || params.min_size_fraction <= 0.0
        || params.min_size_fraction > 1.0
    {
        return Err(Error::invalid("min_size_fraction must be in (0, 1]"));
    }

    let s = (n as f64 / params.k as f64).sqrt();
    let spatial_weight = params.compactness / s;
    let channels = image.channels();

    let mut centers = initial_centers(image, params.k);
    let mut assign = vec![0u32; n];
    for _ in 0..params.iterations {
        let mut best_d = vec![f64::INFINITY; n];
        let mut best_c = vec![u32::MAX; n];
        for (ci, c) in centers.iter().enumerate() {
            let x0 = (c.x - s).ceil().max(0.0) as usize;
            let y0 = (c.y - s).ceil().max(0.0) as usize;
            let x1 = (c.x + s).floor().min((width - 1) as f64).max(0.0) as usize;
            let y1 = (c.y + s).floor().min((height - 1) as f64).max(0.0) as usize;
            for y in y0..=y1.max(y0) {
                for x in x0..=x1.max(x0) {
                    let p = y * width + x;
                    let d = distance(image, x, y, c, spatial_weight);
                    if d < best_d[p] {
                        best_d[p] = d;
                        best_c[p] = ci as u32;
                    }
                }
            }
        }
        // pixels outside every window fall back to a full scan
        for p in 0..n {
            if best_c[p] == u32::MAX {
                let (x, y) = (p % width, p / width);
                for (ci, c) in centers.iter().enumerate() {
                    let d = distance(image, x, y, c, spatial_weight);
                    if d < best_d[p] {
                        best_d[p] = d;
                        best_c[p] = ci as u32;
                    }
                }
            }
        }
        assign = best_c;

        let mut sums = vec![[0.0f64; 5]; centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for (p, &label) in assign.iter().enumerate() {
            let ci = label as usize;
            let (x, y) = (p % width, p / width);
            sums[ci][0] += x as f64;
            sums[ci][1] += y as f64;
            for (ch, &v) in image.pixel(x, y).iter().enumerate() {
                sums[ci][2 + ch] += v;
            }
            counts[ci] += 1;
        }
        for (ci, c) in centers.iter_mut().enumerate() {
            if counts[ci] > 0 {
                let inv = 1.0 / counts[ci] as f64;
                c.x = sums[ci][0] * inv;
                c.y = sums[ci][1] * inv;
                for ch in 0..channels {
                    c.color[ch] = sums[ci][2 + ch] * inv;
                }
            }
        }
    }

    let threshold = params.min_size_fraction * (n as f64 / params.k as f64);
    enforce_connectivity(width, height, &assign, threshold)
}

fn distance(image: &Image, x: usize, y: usize, c: &Center, spatial_weight: f64) -> f64 {
    let px = image.pixel(x, y);
    let mut color2 = 0.0;
    for (pv, cv) in px.iter().zip(&c.color) {
        let d = pv - cv;
        color2 += d * d;
    }
    let dx = x as f64 - c.x;
    let dy = y as f64 - c.y;
    color2.sqrt() + spatial_weight * (dx * dx + dy * dy).sqrt()
}

/// Seeds an aspect-proportional `nx × ny` grid of centers with
/// `nx · ny ≤ k`, colors sampled at the nearest pixel.
fn initial_centers(image: &Image, k: usize) -> Vec<Center> {
    let (width, height) = (image.width(), image.height());
    let nx = ((k as f64 * width as f64 / height as f64).sqrt().round() as usize)
        .clamp(1, width.min(k));
    let ny = (k / nx).clamp(1, height);
    let mut centers = Vec::with_capacity(nx * ny);
    for gy in 0..ny {
        for gx in 0..nx {
            let x = (gx as f64 + 0.5) * width as f64 / nx as f64 - 0.5;
            let y = (gy as f64 + 0.5) * height as f64 / ny as f64 - 0.5;
            let sx = (x.round().max(0.0) as usize).min(width - 1);
            let sy = (y.round().max(0.0) as usize).min(height - 1);
            let mut color = [0.0; 3];
            for (ch, &v) in image.pixel(sx, sy).iter().enumerate() {
                color[ch] = v;
            }
            centers.push(Center { x, y, color });
        }
    }
    centers
}

/// Splits disconnected clusters into 4-connected fragments, then merges
/// every fragment smaller than `threshold` pixels into its largest
/// neighbor (ties to the lowest id), smallest fragment first.
fn enforce_connectivity(
    width: usize,
    height: usize,
    assign: &[u32],
    threshold: f64,
) -> Result<Partition> {
    let mut labels: Vec<u32> = {
        let p = Partition::from_values(width, height, assign)?;
        p.labels().to_vec()
    };
    loop {
        let partition = Partition::from_values(width, height, &labels)?;
        labels = partition.labels().to_vec();
        let m = partition.segment_count();
        if m == 1 {
            return Ok(partition);
        }
        let areas = partition.segment_areas();
        let victim = match (0..m)
            .filter(|&i| (areas[i] as f64) < threshold)
            .min_by_key(|&i| (areas[i], i))
        {
            Some(v) => v as u32,
            None => return Ok(partition),
        };
        // largest neighbor of the victim, ties to the lowest id
        let mut target: Option<u32> = None;
        let mut neighbor = |a: u32, b: u32| {
            let other = if a == victim && b != victim {
                b
            } else if b == victim && a != victim {
                a
            } else {
                return;
            };
            let better = match target {
                None => true,
                Some(t) => {
                    (areas[other as usize], std::cmp::Reverse(other))
                        > (areas[t as usize], std::cmp::Reverse(t))
                }
            };
            if better {
                target = Some(other);
            }
        };
        for y in 0..height {
            for x in 0..width {
                let p = y * width + x;
                if x + 1 < width {
                    neighbor(labels[p], labels[p + 1]);
                }
                if y + 1 < height {
                    neighbor(labels[p], labels[p + width]);
                }
            }
        }
        let target = target.expect("every segment of a multi-segment map has a neighbor");
        for l in &mut labels {
            if *l == victim {
                *l = target;
            }
        }
    }
}
