use crate::core::Partition;
use crate::error::{Error, Result};

/// Partitions the grid into axis-aligned `factor`×`factor` blocks
/// (ragged at the right/bottom borders), giving
/// `⌈w/f⌉ · ⌈h/f⌉` segments. `factor = 1` is the per-pixel partition.
pub fn grid_subsample(width: usize, height: usize, factor: usize) -> Result<Partition> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("grid dimensions must be at least 1x1"));
    }
    if factor == 0 || factor > width.min(height) {
        return Err(Error::invalid(format!(
            "subsampling factor {} out of range 1..={} for a {}x{} grid",
            factor,
            width.min(height),
            width,
            height
        )));
    }
    let blocks_x = width.div_ceil(factor);
    let mut ids = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            ids.push(((y / factor) * blocks_x + x / factor) as u32);
        }
    }
    Partition::from_values(width, height, &ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_tiling_4x4_factor_2() {
        let p = grid_subsample(4, 4, 2).unwrap();
        assert_eq!(p.segment_count(), 4);
        assert_eq!(p.segment_areas(), vec![4, 4, 4, 4]);
        assert_eq!(p.segment_of(0, 0), p.segment_of(1, 1));
        assert_ne!(p.segment_of(1, 1), p.segment_of(2, 1));
    }

    #[test]
    fn factor_one_is_per_pixel() {
        let p = grid_subsample(3, 2, 1).unwrap();
        assert_eq!(p, Partition::per_pixel(3, 2).unwrap());
    }

    #[test]
    fn ragged_5x4_factor_2() {
        let p = grid_subsample(5, 4, 2).unwrap();
        // ceiling arithmetic: 3 block columns (widths 2, 2, 1) x 2 block rows
        assert_eq!(p.segment_count(), 6);
        assert_eq!(p.segment_areas(), vec![4, 4, 2, 4, 4, 2]);
    }

    #[test]
    fn rejects_out_of_range_factor() {
        assert!(grid_subsample(4, 4, 0).is_err());
        assert!(grid_subsample(4, 4, 5).is_err());
        assert!(grid_subsample(5, 3, 3).is_ok());
    }
}
