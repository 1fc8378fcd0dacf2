use crate::error::{Error, Result};

/// A grayscale or color image with intensities normalized to `[0, 1]`.
///
/// Values are stored row-major with interleaved channels:
/// `data[(y * width + x) * channels + c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Image {
    /// Builds an image from raw values, checking shape and range.
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be at least 1x1"));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::invalid(format!(
                "images must have 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::dims(format!(
                "expected {} values for a {}x{}x{} image, got {}",
                width * height * channels,
                width,
                height,
                channels,
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)) {
            return Err(Error::invalid("image values must lie in [0, 1]"));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// A constant image, handy for tests and synthetic inputs.
    pub fn constant(width: usize, height: usize, color: &[f64]) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * color.len());
        for _ in 0..width * height {
            data.extend_from_slice(color);
        }
        Self::new(width, height, color.len(), data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Channel values of the pixel at `(x, y)`.
    pub fn pixel(&self, x: usize, y: usize) -> &[f64] {
        let base = (y * self.width + x) * self.channels;
        &self.data[base..base + self.channels]
    }

    pub fn get(&self, x: usize, y: usize, channel: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + channel]
    }

    /// Scalar luminance field (Rec. 601 weights for color images).
    ///
    /// This is the default guide signal for scalar superpixel methods.
    pub fn luma(&self) -> Vec<f64> {
        match self.channels {
            1 => self.data.clone(),
            _ => self
                .data
                .chunks_exact(3)
                .map(|rgb| 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2])
                .collect(),
        }
    }
}
