use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// A decomposition of the pixel grid into `M` segments.
///
/// Every constructor canonicalizes its input: segments are the maximal
/// 4-connected components of the supplied values, and ids are assigned
/// in raster-scan order of each component's first pixel. Disconnected
/// regions of equal value are therefore split into separate segments,
/// and the invariants (ids dense in `0..M`, every segment 4-connected,
/// every id present) hold for every `Partition` by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    segments: usize,
}

impl Partition {
    /// Builds the partition whose segments are the 4-connected
    /// components of equal values in `values` (row-major).
    pub fn from_values<T: PartialEq>(width: usize, height: usize, values: &[T]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("partition dimensions must be at least 1x1"));
        }
        if values.len() != width * height {
            return Err(Error::dims(format!(
                "expected {} values for a {}x{} partition, got {}",
                width * height,
                width,
                height,
                values.len()
            )));
        }
        let (labels, segments) = canonical_components(width, height, values);
        Ok(Self {
            width,
            height,
            labels,
            segments,
        })
    }

    /// The trivial partition with one segment per pixel.
    pub fn per_pixel(width: usize, height: usize) -> Result<Self> {
        let ids: Vec<u32> = (0..width * height).map(|i| i as u32).collect();
        Self::from_values(width, height, &ids)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of segments `M`.
    pub fn segment_count(&self) -> usize {
        self.segments
    }

    /// Per-pixel segment ids, row-major.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn segment_of(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Pixel count of every segment.
    pub fn segment_areas(&self) -> Vec<u64> {
        let mut areas = vec![0u64; self.segments];
        for &id in &self.labels {
            areas[id as usize] += 1;
        }
        areas
    }

    /// Expands per-segment vectors to a per-pixel field: pixel `x` of
    /// segment `i` receives `values[i * dim .. (i + 1) * dim]`.
    ///
    /// The output is piecewise constant on the partition by construction.
    pub fn reassemble(&self, values: &[f64], dim: usize) -> Result<Vec<f64>> {
        if dim == 0 || values.len() != self.segments * dim {
            return Err(Error::dims(format!(
                "expected {} values ({} segments x dim {}), got {}",
                self.segments * dim,
                self.segments,
                dim,
                values.len()
            )));
        }
        let mut out = Vec::with_capacity(self.labels.len() * dim);
        for &id in &self.labels {
            let base = id as usize * dim;
            out.extend_from_slice(&values[base..base + dim]);
        }
        Ok(out)
    }

    /// Expands per-segment labels to a per-pixel label map.
    pub fn reassemble_labels(&self, labels: &[u32]) -> Result<Vec<u32>> {
        if labels.len() != self.segments {
            return Err(Error::dims(format!(
                "expected one label per segment ({}), got {}",
                self.segments,
                labels.len()
            )));
        }
        Ok(self.labels.iter().map(|&id| labels[id as usize]).collect())
    }

    /// Writes the segment-id map as a binary PGM plus a sidecar header.
    ///
    /// The map is a standard `P5` file with 16-bit big-endian samples
    /// when `M <= 65536`; larger partitions use the same header layout
    /// with `maxval > 65535` and 32-bit big-endian samples (a documented
    /// extension, readable only by this crate). The sidecar at
    /// `<path>.meta` records `segments`, `width` and `height` as flat
    /// `key = value` lines.
    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let maxval = (self.segments as u64 - 1).max(1);
        let mut w = BufWriter::new(File::create(path)?);
        write!(w, "P5\n{} {}\n{}\n", self.width, self.height, maxval)?;
        if maxval <= 65535 {
            for &id in &self.labels {
                w.write_all(&(id as u16).to_be_bytes())?;
            }
        } else {
            for &id in &self.labels {
                w.write_all(&id.to_be_bytes())?;
            }
        }
        w.flush()?;
        let meta = format!(
            "segments = {}\nwidth = {}\nheight = {}\n",
            self.segments, self.width, self.height
        );
        std::fs::write(sidecar_path(path), meta)?;
        Ok(())
    }

    /// Reads a partition written by [`Partition::write_pgm`].
    ///
    /// The label map must already be canonical (the file round-trips
    /// exactly); anything else is rejected as malformed.
    pub fn read_pgm(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let header = PgmHeader::parse(&mut r)?;
        let count = header.width * header.height;
        let mut labels = Vec::with_capacity(count);
        if header.maxval <= 65535 {
            let mut buf = [0u8; 2];
            for _ in 0..count {
                r.read_exact(&mut buf)?;
                labels.push(u16::from_be_bytes(buf) as u32);
            }
        } else {
            let mut buf = [0u8; 4];
            for _ in 0..count {
                r.read_exact(&mut buf)?;
                labels.push(u32::from_be_bytes(buf));
            }
        }
        let meta = std::fs::read_to_string(sidecar_path(path))?;
        let segments = parse_meta_segments(&meta)?;
        let partition = Self::from_values(header.width, header.height, &labels)?;
        if partition.labels != labels {
            return Err(Error::Format(
                "label map is not canonical (ids must be dense, 4-connected and in \
                 raster-scan-of-first-pixel order)"
                    .into(),
            ));
        }
        if partition.segments != segments {
            return Err(Error::Format(format!(
                "sidecar reports {} segments but the map has {}",
                segments, partition.segments
            )));
        }
        Ok(partition)
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".meta");
    PathBuf::from(s)
}

fn parse_meta_segments(meta: &str) -> Result<usize> {
    for line in meta.lines() {
        if let Some((key, value)) = line.split_once('=') {
            if key.trim() == "segments" {
                return value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Format("bad segment count in sidecar".into()));
            }
        }
    }
    Err(Error::Format("sidecar is missing a segments entry".into()))
}

struct PgmHeader {
    width: usize,
    height: usize,
    maxval: u64,
}

impl PgmHeader {
    fn parse(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 2];
        r.read_exact(&mut magic)?;
        if &magic != b"P5" {
            return Err(Error::Format("not a P5 label map".into()));
        }
        let width = next_header_token(r)?;
        let height = next_header_token(r)?;
        let maxval = next_header_token(r)?;
        if width == 0 || height == 0 || maxval == 0 {
            return Err(Error::Format("degenerate PGM header".into()));
        }
        Ok(Self {
            width: width as usize,
            height: height as usize,
            maxval,
        })
    }
}

/// Reads one whitespace-delimited integer token, skipping `#` comments.
/// Consumes exactly one trailing whitespace byte, per the PNM convention.
fn next_header_token(r: &mut impl Read) -> Result<u64> {
    let mut byte = [0u8; 1];
    let mut token = String::new();
    loop {
        r.read_exact(&mut byte)?;
        match byte[0] {
            b'#' => {
                while byte[0] != b'\n' {
                    r.read_exact(&mut byte)?;
                }
            }
            b if b.is_ascii_whitespace() => {
                if !token.is_empty() {
                    break;
                }
            }
            b if b.is_ascii_digit() => token.push(b as char),
            _ => return Err(Error::Format("unexpected byte in PGM header".into())),
        }
    }
    token
        .parse()
        .map_err(|_| Error::Format("bad integer in PGM header".into()))
}

/// Labels the 4-connected components of equal values, ids in raster-scan
/// order of each component's first pixel.
fn canonical_components<T: PartialEq>(
    width: usize,
    height: usize,
    values: &[T],
) -> (Vec<u32>, usize) {
    const UNSET: u32 = u32::MAX;
    let n = width * height;
    let mut labels = vec![UNSET; n];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..n {
        if labels[start] != UNSET {
            continue;
        }
        labels[start] = next;
        stack.push(start);
        while let Some(p) = stack.pop() {
            let x = p % width;
            let y = p / width;
            let mut visit = |q: usize| {
                if labels[q] == UNSET && values[q] == values[p] {
                    labels[q] = next;
                    stack.push(q);
                }
            };
            if x > 0 {
                visit(p - 1);
            }
            if x + 1 < width {
                visit(p + 1);
            }
            if y > 0 {
                visit(p - width);
            }
            if y + 1 < height {
                visit(p + width);
            }
        }
        next += 1;
    }
    (labels, next as usize)
}
