use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

const LPOT_MAGIC: &[u8; 4] = b"LPOT";

/// Per-pixel, per-label costs: entry `(x, y, k)` is the price of giving
/// pixel `(x, y)` label `k`, so lower is better everywhere in the crate.
///
/// Layout is pixel-major with the label axis innermost:
/// `data[(y * width + x) * labels + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    width: usize,
    height: usize,
    labels: usize,
    data: Vec<f64>,
}

impl PotentialField {
    pub fn new(width: usize, height: usize, labels: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("potential field dimensions must be at least 1x1"));
        }
        if labels == 0 {
            return Err(Error::invalid("potential field needs at least one label"));
        }
        if data.len() != width * height * labels {
            return Err(Error::dims(format!(
                "expected {} cost values, got {}",
                width * height * labels,
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("potential values must be finite"));
        }
        Ok(Self {
            width,
            height,
            labels,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Cost vector of the pixel at `(x, y)`, one entry per label.
    pub fn costs(&self, x: usize, y: usize) -> &[f64] {
        let base = (y * self.width + x) * self.labels;
        &self.data[base..base + self.labels]
    }

    pub fn get(&self, x: usize, y: usize, label: usize) -> f64 {
        self.data[(y * self.width + x) * self.labels + label]
    }

    /// Writes the field in the `LPOT` unary format.
    ///
    /// Header: magic `LPOT`, then width, height and label count as
    /// little-endian u32. Body: `width * height * labels` little-endian
    /// f32 values, pixel-major with the label axis innermost. The format
    /// is the entry point for externally computed unaries; note that it
    /// stores single precision, so values survive a round trip exactly
    /// only when they are f32-representable.
    pub fn write_lpot(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(LPOT_MAGIC)?;
        w.write_all(&(self.width as u32).to_le_bytes())?;
        w.write_all(&(self.height as u32).to_le_bytes())?;
        w.write_all(&(self.labels as u32).to_le_bytes())?;
        for v in &self.data {
            w.write_all(&(*v as f32).to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a field written by [`PotentialField::write_lpot`].
    pub fn read_lpot(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != LPOT_MAGIC {
            return Err(Error::Format("not an LPOT file (bad magic)".into()));
        }
        let width = read_u32(&mut r)? as usize;
        let height = read_u32(&mut r)? as usize;
        let labels = read_u32(&mut r)? as usize;
        let count = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(labels))
            .ok_or_else(|| Error::Format("LPOT header overflows".into()))?;
        let mut data = Vec::with_capacity(count);
        let mut buf = [0u8; 4];
        for _ in 0..count {
            r.read_exact(&mut buf)?;
            data.push(f32::from_le_bytes(buf) as f64);
        }
        Self::new(width, height, labels, data)
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(PotentialField::new(1, 1, 2, vec![0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn rejects_zero_labels() {
        assert!(PotentialField::new(1, 1, 0, vec![]).is_err());
    }

    #[test]
    fn lpot_round_trip() {
        // f32-exact values so the round trip is bit-for-bit
        let field = PotentialField::new(2, 2, 2, vec![0.5, 1.0, 0.25, 2.0, 8.0, 0.0, 1.5, 3.0])
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("unaries.lpot");
        field.write_lpot(&path).unwrap();
        let back = PotentialField::read_lpot(&path).unwrap();
        assert_eq!(field, back);
    }

    #[test]
    fn lpot_rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.lpot");
        std::fs::write(&path, b"NOPE....").unwrap();
        assert!(matches!(
            PotentialField::read_lpot(&path),
            Err(Error::Format(_))
        ));
    }
}
