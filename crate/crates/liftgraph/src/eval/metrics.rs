use std::collections::BTreeSet;

use crate::core::Image;
use crate::error::{Error, Result};

fn check_dims(a: &Image, b: &Image) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels() {
        return Err(Error::dims(format!(
            "image shapes differ: {}x{}x{} vs {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )));
    }
    Ok(())
}

/// Peak signal-to-noise ratio in dB for unit-range images:
/// `10·log10(1/MSE)`, reported as 99 dB when the MSE vanishes
/// (below 1e-10).
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    check_dims(a, b)?;
    let mse: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.data().len() as f64;
    Ok(if mse < 1e-10 {
        99.0
    } else {
        10.0 * (1.0 / mse).log10()
    })
}

/// Mean structural similarity over non-overlapping 8×8 windows
/// (ragged border windows included), averaged across channels, with
/// the standard stabilizers `K1 = 0.01`, `K2 = 0.03` on unit range.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    check_dims(a, b)?;
    const C1: f64 = 0.01 * 0.01;
    const C2: f64 = 0.03 * 0.03;
    const WINDOW: usize = 8;
    let (width, height, channels) = (a.width(), a.height(), a.channels());
    let mut total = 0.0;
    let mut windows = 0usize;
    for y0 in (0..height).step_by(WINDOW) {
        for x0 in (0..width).step_by(WINDOW) {
            let (x1, y1) = ((x0 + WINDOW).min(width), (y0 + WINDOW).min(height));
            let n = ((x1 - x0) * (y1 - y0)) as f64;
            for c in 0..channels {
                let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for y in y0..y1 {
                    for x in x0..x1 {
                        let (va, vb) = (a.get(x, y, c), b.get(x, y, c));
                        sa += va;
                        sb += vb;
                        saa += va * va;
                        sbb += vb * vb;
                        sab += va * vb;
                    }
                }
                let (ma, mb) = (sa / n, sb / n);
                let var_a = saa / n - ma * ma;
                let var_b = sbb / n - mb * mb;
                let cov = sab / n - ma * mb;
                total += ((2.0 * ma * mb + C1) * (2.0 * cov + C2))
                    / ((ma * ma + mb * mb + C1) * (var_a + var_b + C2));
                windows += 1;
            }
        }
    }
    Ok(total / windows as f64)
}

/// Mean Dice overlap over every label present in either map:
/// `2|A_k ∩ B_k| / (|A_k| + |B_k|)` averaged over those labels.
pub fn dice(a: &[u32], b: &[u32]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::dims(format!(
            "label maps must match and be non-empty: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let labels: BTreeSet<u32> = a.iter().chain(b).copied().collect();
    let mut total = 0.0;
    for &k in &labels {
        let in_a = a.iter().filter(|&&l| l == k).count();
        let in_b = b.iter().filter(|&&l| l == k).count();
        let both = a
            .iter()
            .zip(b)
            .filter(|&(&x, &y)| x == k && y == k)
            .count();
        total += 2.0 * both as f64 / (in_a + in_b) as f64;
    }
    Ok(total / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(width: usize, height: usize, values: Vec<f64>) -> Image {
        Image::new(width, height, 1, values).unwrap()
    }

    #[test]
    fn identical_images_hit_the_caps() {
        let a = image(9, 7, (0..63).map(|i| (i as f64) / 62.0).collect());
        assert_eq!(psnr(&a, &a).unwrap(), 99.0);
        approx::assert_abs_diff_eq!(ssim(&a, &a).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn half_gray_psnr_closed_form() {
        let a = image(4, 4, vec![0.0; 16]);
        let b = image(4, 4, vec![0.5; 16]);
        // MSE = 0.25, PSNR = 10·log10(4)
        approx::assert_abs_diff_eq!(psnr(&a, &b).unwrap(), 6.0206, epsilon = 1e-3);
        approx::assert_abs_diff_eq!(
            psnr(&a, &b).unwrap(),
            psnr(&b, &a).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn dice_identity_and_symmetry() {
        let a = vec![0u32, 0, 1, 1, 2, 2];
        assert_eq!(dice(&a, &a).unwrap(), 1.0);
        let b = vec![0u32, 0, 1, 1, 1, 2];
        let d_ab = dice(&a, &b).unwrap();
        let d_ba = dice(&b, &a).unwrap();
        approx::assert_abs_diff_eq!(d_ab, d_ba, epsilon = 1e-12);
        assert!(d_ab > 0.0 && d_ab < 1.0);
    }

    #[test]
    fn dice_counts_labels_present_in_either_map() {
        // label 1 appears only in `a`: it contributes 0 to the mean
        let a = vec![0u32, 1];
        let b = vec![0u32, 0];
        // label 0: 2·1/(1+2) = 2/3; label 1: 0 → mean 1/3
        approx::assert_abs_diff_eq!(dice(&a, &b).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn ssim_penalizes_structure_loss() {
        let a = image(16, 16, (0..256).map(|i| (i % 2) as f64).collect());
        let flat = image(16, 16, vec![0.5; 256]);
        let s = ssim(&a, &flat).unwrap();
        assert!(s < 0.1, "flat image should score poorly against texture, got {s}");
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let a = image(2, 2, vec![0.0; 4]);
        let b = image(2, 3, vec![0.0; 6]);
        assert!(psnr(&a, &b).is_err());
        assert!(ssim(&a, &b).is_err());
        assert!(dice(&[0, 1], &[0]).is_err());
    }
}
