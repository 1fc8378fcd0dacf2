use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma, Rgb};

use liftgraph::core::Image;

use crate::error::{CliError, CliResult};

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

/// Reads a PNG or binary PGM/PPM file into a unit-range image.
pub fn read_image(path: &Path) -> CliResult<Image> {
    match extension(path).as_str() {
        "pgm" | "ppm" => {
            let (width, height, channels, maxval, samples) = read_pnm(path)?;
            let scale = f64::from(maxval);
            let data: Vec<f64> = samples.iter().map(|&s| f64::from(s) / scale).collect();
            Image::new(width, height, channels, data)
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))
        }
        _ => {
            let decoded = image::open(path)
                .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
            dynamic_to_image(decoded, path)
        }
    }
}

fn dynamic_to_image(decoded: DynamicImage, path: &Path) -> CliResult<Image> {
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    let (channels, data): (usize, Vec<f64>) = match decoded {
        DynamicImage::ImageLuma8(b) => {
            (1, b.into_raw().iter().map(|&v| f64::from(v) / 255.0).collect())
        }
        DynamicImage::ImageLuma16(b) => {
            (1, b.into_raw().iter().map(|&v| f64::from(v) / 65535.0).collect())
        }
        DynamicImage::ImageRgb8(b) => {
            (3, b.into_raw().iter().map(|&v| f64::from(v) / 255.0).collect())
        }
        DynamicImage::ImageRgb16(b) => {
            (3, b.into_raw().iter().map(|&v| f64::from(v) / 65535.0).collect())
        }
        other => (
            3,
            other
                .to_rgb16()
                .into_raw()
                .iter()
                .map(|&v| f64::from(v) / 65535.0)
                .collect(),
        ),
    };
    Image::new(width, height, channels, data)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

/// Writes a unit-range image as 16-bit PNG or binary PGM/PPM,
/// chosen by extension.
pub fn write_image(path: &Path, image: &Image) -> CliResult<()> {
    let quantize =
        |v: f64| -> u16 { (v.clamp(0.0, 1.0) * 65535.0).round() as u16 };
    match extension(path).as_str() {
        "pgm" | "ppm" => {
            let samples: Vec<u16> = image.data().iter().map(|&v| quantize(v)).collect();
            write_pnm(path, image.width(), image.height(), image.channels(), &samples)
        }
        "png" => {
            let raw: Vec<u16> = image.data().iter().map(|&v| quantize(v)).collect();
            let (w, h) = (image.width() as u32, image.height() as u32);
            let save_error =
                |e: image::ImageError| CliError::io(format!("cannot write {}: {e}", path.display()));
            if image.channels() == 1 {
                ImageBuffer::<Luma<u16>, Vec<u16>>::from_raw(w, h, raw)
                    .expect("raw buffer matches dimensions")
                    .save(path)
                    .map_err(save_error)
            } else {
                ImageBuffer::<Rgb<u16>, Vec<u16>>::from_raw(w, h, raw)
                    .expect("raw buffer matches dimensions")
                    .save(path)
                    .map_err(save_error)
            }
        }
        other => Err(CliError::io(format!(
            "unsupported output image extension `.{other}` for {}",
            path.display()
        ))),
    }
}

/// Reads an integer-valued mask (scribbles): PNG or PGM, one channel,
/// raw sample values without scaling.
pub fn read_mask(path: &Path) -> CliResult<(usize, usize, Vec<u32>)> {
    match extension(path).as_str() {
        "pgm" => {
            let (width, height, channels, _, samples) = read_pnm(path)?;
            if channels != 1 {
                return Err(CliError::io(format!(
                    "{} is not a single-channel mask",
                    path.display()
                )));
            }
            Ok((width, height, samples.iter().map(|&s| u32::from(s)).collect()))
        }
        _ => {
            let decoded = image::open(path)
                .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
            let (width, height) = (decoded.width() as usize, decoded.height() as usize);
            let values = match decoded {
                DynamicImage::ImageLuma8(b) => {
                    b.into_raw().iter().map(|&v| u32::from(v)).collect()
                }
                DynamicImage::ImageLuma16(b) => {
                    b.into_raw().iter().map(|&v| u32::from(v)).collect()
                }
                _ => {
                    return Err(CliError::io(format!(
                        "{} must be a single-channel (grayscale) mask",
                        path.display()
                    )))
                }
            };
            Ok((width, height, values))
        }
    }
}

/// Writes a per-pixel label map as a 16-bit grayscale PNG holding the
/// raw label indices.
pub fn write_labels(path: &Path, labels: &[u32], width: usize, height: usize) -> CliResult<()> {
    if let Some(&too_big) = labels.iter().find(|&&l| l > u32::from(u16::MAX)) {
        return Err(CliError::io(format!(
            "label {too_big} does not fit a 16-bit label map"
        )));
    }
    let raw: Vec<u16> = labels.iter().map(|&l| l as u16).collect();
    ImageBuffer::<Luma<u16>, Vec<u16>>::from_raw(width as u32, height as u32, raw)
        .expect("raw buffer matches dimensions")
        .save(path)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

/// Reads a 16-bit grayscale PNG label map back to raw indices.
#[cfg(test)]
pub fn read_labels(path: &Path) -> CliResult<(usize, usize, Vec<u32>)> {
    read_mask(path)
}

// --- binary PGM (P5) / PPM (P6) ----------------------------------------

fn read_pnm(path: &Path) -> CliResult<(usize, usize, usize, u16, Vec<u16>)> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let bad = |msg: &str| CliError::io(format!("{}: {msg}", path.display()));

    let mut cursor = 0usize;
    let mut token = |bytes: &[u8]| -> CliResult<String> {
        // skip whitespace and '#' comments
        loop {
            while cursor < bytes.len() && bytes[cursor].is_ascii_whitespace() {
                cursor += 1;
            }
            if cursor < bytes.len() && bytes[cursor] == b'#' {
                while cursor < bytes.len() && bytes[cursor] != b'\n' {
                    cursor += 1;
                }
            } else {
                break;
            }
        }
        let start = cursor;
        while cursor < bytes.len() && !bytes[cursor].is_ascii_whitespace() {
            cursor += 1;
        }
        if start == cursor {
            return Err(CliError::io(format!(
                "{}: truncated header",
                path.display()
            )));
        }
        Ok(String::from_utf8_lossy(&bytes[start..cursor]).into_owned())
    };

    let magic = token(&bytes)?;
    let channels = match magic.as_str() {
        "P5" => 1,
        "P6" => 3,
        _ => return Err(bad("not a binary PGM/PPM file")),
    };
    let width: usize = token(&bytes)?.parse().map_err(|_| bad("bad width"))?;
    let height: usize = token(&bytes)?.parse().map_err(|_| bad("bad height"))?;
    let maxval: u32 = token(&bytes)?.parse().map_err(|_| bad("bad maxval"))?;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(bad("header values out of range"));
    }
    cursor += 1; // single whitespace after maxval

    let count = width * height * channels;
    let wide = maxval > 255;
    let needed = count * if wide { 2 } else { 1 };
    if bytes.len() < cursor + needed {
        return Err(bad("file shorter than its header promises"));
    }
    let samples: Vec<u16> = if wide {
        bytes[cursor..cursor + needed]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    } else {
        bytes[cursor..cursor + needed]
            .iter()
            .map(|&b| u16::from(b))
            .collect()
    };
    Ok((width, height, channels, maxval as u16, samples))
}

fn write_pnm(
    path: &Path,
    width: usize,
    height: usize,
    channels: usize,
    samples: &[u16],
) -> CliResult<()> {
    let magic = match channels {
        1 => "P5",
        3 => "P6",
        n => {
            return Err(CliError::io(format!(
                "PGM/PPM cannot hold {n}-channel data"
            )))
        }
    };
    let mut out = BufWriter::new(
        File::create(path)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?,
    );
    let write = |out: &mut BufWriter<File>, data: &[u8]| {
        out.write_all(data)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
    };
    write(&mut out, format!("{magic}\n{width} {height}\n65535\n").as_bytes())?;
    for &s in samples {
        write(&mut out, &s.to_be_bytes())?;
    }
    out.flush()
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}
