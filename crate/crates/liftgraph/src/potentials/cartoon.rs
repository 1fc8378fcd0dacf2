use crate::core::{Image, PotentialField};
use crate::error::{Error, Result};
use crate::potentials::Palette;

/// Cost of snapping each pixel to each palette color: the L1 color
/// distance `ρ_k(x) = ‖color(x) − palette_k‖₁`.
pub fn cartoon_costs(image: &Image, palette: &Palette) -> Result<PotentialField> {
    if palette.channels() != image.channels() {
        return Err(Error::dims(format!(
            "palette has {} channels but the image has {}",
            palette.channels(),
            image.channels()
        )));
    }
    let l = palette.len();
    let mut data = Vec::with_capacity(image.pixel_count() * l);
    for px in image.data().chunks_exact(image.channels()) {
        for k in 0..l {
            let cost: f64 = px
                .iter()
                .zip(palette.color(k))
                .map(|(a, b)| (a - b).abs())
                .sum();
            data.push(cost);
        }
    }
    PotentialField::new(image.width(), image.height(), l, data)
}
