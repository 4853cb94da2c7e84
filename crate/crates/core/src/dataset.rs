//! On-disk containers for measurements and magnitude images.
//!
//! Both containers share the same layout: an 8-byte magic string, a
//! little-endian `u32` header length, a UTF-8 JSON header, and a raw
//! little-endian `f64` payload. Sample payloads store interleaved
//! `(re, im)` pairs in stacking order; image payloads store magnitudes in
//! grid order. Headers carry every geometric primary, so a dataset is
//! self-describing: reading one reconstructs validated model types.
//!
//! The formats pin `f64`: serde_json prints the shortest representation
//! that round-trips, so write/read/write cycles are byte-identical.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ClusterGeometry, WaveformConfig};
use crate::grid::SceneGrid;
use crate::measurement::MeasurementSet;

/// Magic prefix of measurement datasets.
pub const DATASET_MAGIC: &[u8; 8] = b"RTOMO1\0\0";

/// Magic prefix of magnitude-image files.
pub const IMAGE_MAGIC: &[u8; 8] = b"RIMG1\0\0\0";

/// The single format version this build reads and writes.
pub const FORMAT_VERSION: u32 = 1;

/// Upper bound on plausible header sizes; anything larger is corruption.
const MAX_HEADER_BYTES: u32 = 16 * 1024 * 1024;

#[derive(Debug, Serialize, Deserialize)]
struct DatasetHeader {
    version: u32,
    grid: Option<GridHeader>,
    clusters: Vec<ClusterHeader>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ImageHeader {
    version: u32,
    grid: GridHeader,
}

#[derive(Debug, Serialize, Deserialize)]
struct GridHeader {
    nx: usize,
    ny: usize,
    x_min_m: f64,
    x_max_m: f64,
    y_min_m: f64,
    y_max_m: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClusterHeader {
    phi_rad: f64,
    theta_rad: Vec<f64>,
    waveform: WaveformHeader,
    num_samples: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct WaveformHeader {
    f_center_hz: f64,
    bandwidth_hz: f64,
    num_freqs: usize,
    c_mps: f64,
}

impl GridHeader {
    fn from_grid(grid: &SceneGrid<f64>) -> Self {
        Self {
            nx: grid.nx(),
            ny: grid.ny(),
            x_min_m: grid.x_min(),
            x_max_m: grid.x_max(),
            y_min_m: grid.y_min(),
            y_max_m: grid.y_max(),
        }
    }

    fn to_grid(&self) -> Result<SceneGrid<f64>> {
        SceneGrid::new(
            self.nx, self.ny, self.x_min_m, self.x_max_m, self.y_min_m, self.y_max_m,
        )
    }
}

/// Writes a measurement dataset, optionally embedding the grid the scene
/// was designed for so imaging tools can run without extra flags.
pub fn write_dataset(
    path: impl AsRef<Path>,
    sets: &[MeasurementSet<f64>],
    grid: Option<&SceneGrid<f64>>,
) -> Result<()> {
    if sets.is_empty() {
        return Err(Error::EmptyInput("dataset cluster list".into()));
    }
    let header = DatasetHeader {
        version: FORMAT_VERSION,
        grid: grid.map(GridHeader::from_grid),
        clusters: sets
            .iter()
            .map(|s| {
                let g = s.geometry();
                let w = g.waveform();
                ClusterHeader {
                    phi_rad: g.phi(),
                    theta_rad: g.thetas().to_vec(),
                    waveform: WaveformHeader {
                        f_center_hz: w.f_center(),
                        bandwidth_hz: w.bandwidth(),
                        num_freqs: w.num_freqs(),
                        c_mps: w.c(),
                    },
                    num_samples: s.samples().len(),
                }
            })
            .collect(),
    };
    let header_bytes = serde_json::to_vec(&header)
        .map_err(|e| Error::Format(format!("failed to encode dataset header: {e}")))?;
    let mut out = BufWriter::new(File::create(path)?);
    write_preamble(&mut out, DATASET_MAGIC, &header_bytes)?;
    for set in sets {
        for s in set.samples() {
            out.write_all(&s.re.to_le_bytes())?;
            out.write_all(&s.im.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a measurement dataset back into validated model types, plus the
/// embedded grid if one was stored.
pub fn read_dataset(
    path: impl AsRef<Path>,
) -> Result<(Vec<MeasurementSet<f64>>, Option<SceneGrid<f64>>)> {
    let mut input = BufReader::new(File::open(path)?);
    let header_bytes = read_preamble(&mut input, DATASET_MAGIC, "dataset")?;
    let header: DatasetHeader = serde_json::from_slice(&header_bytes)
        .map_err(|e| Error::Format(format!("dataset header is not valid JSON: {e}")))?;
    if header.version != FORMAT_VERSION {
        return Err(Error::Version {
            found: header.version,
            supported: FORMAT_VERSION,
        });
    }
    if header.clusters.is_empty() {
        return Err(Error::Format("dataset declares zero clusters".into()));
    }
    let grid = header.grid.as_ref().map(GridHeader::to_grid).transpose()?;

    let mut sets = Vec::with_capacity(header.clusters.len());
    for (i, ch) in header.clusters.iter().enumerate() {
        let waveform = WaveformConfig::with_speed(
            ch.waveform.f_center_hz,
            ch.waveform.bandwidth_hz,
            ch.waveform.num_freqs,
            ch.waveform.c_mps,
        )?;
        let geometry = ClusterGeometry::new(ch.phi_rad, ch.theta_rad.clone(), waveform)?;
        if ch.num_samples != geometry.num_samples() {
            return Err(Error::Format(format!(
                "cluster {i} declares {} samples but its geometry implies {}",
                ch.num_samples,
                geometry.num_samples()
            )));
        }
        let mut samples = Vec::with_capacity(ch.num_samples);
        for _ in 0..ch.num_samples {
            let re = read_f64(&mut input, "dataset payload")?;
            let im = read_f64(&mut input, "dataset payload")?;
            samples.push(Complex::new(re, im));
        }
        sets.push(MeasurementSet::new(geometry, samples)?);
    }
    expect_eof(&mut input, "dataset")?;
    Ok((sets, grid))
}

/// Writes a real magnitude image over a grid.
pub fn write_raw_image(
    path: impl AsRef<Path>,
    grid: &SceneGrid<f64>,
    values: &[f64],
) -> Result<()> {
    if values.len() != grid.num_pixels() {
        return Err(Error::DimensionMismatch(format!(
            "image has {} values, grid expects {}",
            values.len(),
            grid.num_pixels()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("image values".into()));
    }
    let header = ImageHeader {
        version: FORMAT_VERSION,
        grid: GridHeader::from_grid(grid),
    };
    let header_bytes = serde_json::to_vec(&header)
        .map_err(|e| Error::Format(format!("failed to encode image header: {e}")))?;
    let mut out = BufWriter::new(File::create(path)?);
    write_preamble(&mut out, IMAGE_MAGIC, &header_bytes)?;
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a magnitude image and its grid.
pub fn read_raw_image(path: impl AsRef<Path>) -> Result<(SceneGrid<f64>, Vec<f64>)> {
    let mut input = BufReader::new(File::open(path)?);
    let header_bytes = read_preamble(&mut input, IMAGE_MAGIC, "image")?;
    let header: ImageHeader = serde_json::from_slice(&header_bytes)
        .map_err(|e| Error::Format(format!("image header is not valid JSON: {e}")))?;
    if header.version != FORMAT_VERSION {
        return Err(Error::Version {
            found: header.version,
            supported: FORMAT_VERSION,
        });
    }
    let grid = header.grid.to_grid()?;
    let mut values = Vec::with_capacity(grid.num_pixels());
    for _ in 0..grid.num_pixels() {
        let v = read_f64(&mut input, "image payload")?;
        if !v.is_finite() {
            return Err(Error::NonFinite("image payload".into()));
        }
        values.push(v);
    }
    expect_eof(&mut input, "image")?;
    Ok((grid, values))
}

fn write_preamble(out: &mut impl Write, magic: &[u8; 8], header: &[u8]) -> Result<()> {
    let len = u32::try_from(header.len())
        .map_err(|_| Error::Format("header exceeds u32 length".into()))?;
    if len > MAX_HEADER_BYTES {
        return Err(Error::Format(format!("header of {len} bytes is implausible")));
    }
    out.write_all(magic)?;
    out.write_all(&len.to_le_bytes())?;
    out.write_all(header)?;
    Ok(())
}

fn read_preamble(input: &mut impl Read, magic: &[u8; 8], what: &str) -> Result<Vec<u8>> {
    let mut found = [0u8; 8];
    read_exact(input, &mut found, what)?;
    if &found != magic {
        return Err(Error::Format(format!(
            "{what} magic mismatch: expected {:?}, found {:?}",
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(&found)
        )));
    }
    let mut len_bytes = [0u8; 4];
    read_exact(input, &mut len_bytes, what)?;
    let len = u32::from_le_bytes(len_bytes);
    if len == 0 || len > MAX_HEADER_BYTES {
        return Err(Error::Format(format!(
            "{what} declares an implausible header length of {len} bytes"
        )));
    }
    let mut header = vec![0u8; len as usize];
    read_exact(input, &mut header, what)?;
    Ok(header)
}

fn read_f64(input: &mut impl Read, what: &str) -> Result<f64> {
    let mut b = [0u8; 8];
    read_exact(input, &mut b, what)?;
    Ok(f64::from_le_bytes(b))
}

fn read_exact(input: &mut impl Read, buf: &mut [u8], what: &str) -> Result<()> {
    input.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::Truncated(format!("{what} ended early"))
        } else {
            Error::Io(e)
        }
    })
}

fn expect_eof(input: &mut impl Read, what: &str) -> Result<()> {
    let mut probe = [0u8; 1];
    match input.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(Error::Format(format!(
            "{what} has trailing bytes after its declared payload"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate, PointScatterer, SimulationSpec};
    use rand::prelude::*;

    fn sample_sets() -> (Vec<MeasurementSet<f64>>, SceneGrid<f64>) {
        let w = WaveformConfig::with_speed(6.0e8, 3.0e8, 4, 3.0e8).unwrap();
        let spec = SimulationSpec {
            scatterers: vec![PointScatterer::at(0.4, -0.2, 0.0), PointScatterer::at(-0.6, 0.5, 0.3)],
            clusters: vec![
                ClusterGeometry::uniform(0.5, 0.0, 0.4, 3, w).unwrap(),
                ClusterGeometry::uniform(0.9, 1.5, 0.4, 2, w).unwrap(),
            ],
            noise_sigma: 0.25,
            rng_seed: 12,
        };
        let grid = SceneGrid::new(8, 8, -1.0, 1.0, -1.0, 1.0).unwrap();
        (simulate(&spec).unwrap(), grid)
    }

    #[test]
    fn dataset_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.rtomo");
        let (sets, grid) = sample_sets();
        write_dataset(&path, &sets, Some(&grid)).unwrap();
        let (read, read_grid) = read_dataset(&path).unwrap();
        assert_eq!(read.len(), sets.len());
        assert_eq!(read_grid, Some(grid));
        for (a, b) in read.iter().zip(&sets) {
            assert_eq!(a, b, "model types round-trip bit for bit");
        }
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let first = dir.path().join("a.rtomo");
        let second = dir.path().join("b.rtomo");
        let (sets, grid) = sample_sets();
        write_dataset(&first, &sets, Some(&grid)).unwrap();
        let (read, read_grid) = read_dataset(&first).unwrap();
        write_dataset(&second, &read, read_grid.as_ref()).unwrap();
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap(),
            "write(read(x)) must equal x"
        );
    }

    #[test]
    fn dataset_without_grid_is_legal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nogrid.rtomo");
        let (sets, _) = sample_sets();
        write_dataset(&path, &sets, None).unwrap();
        let (read, grid) = read_dataset(&path).unwrap();
        assert_eq!(grid, None);
        assert_eq!(read.len(), sets.len());
    }

    #[test]
    fn wrong_magic_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.rtomo");
        let (sets, grid) = sample_sets();
        write_dataset(&path, &sets, Some(&grid)).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_dataset(&path), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_payload_is_reported_as_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("short.rtomo");
        let (sets, grid) = sample_sets();
        write_dataset(&path, &sets, Some(&grid)).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 9]).unwrap();
        assert!(matches!(read_dataset(&path), Err(Error::Truncated(_))));
        // Truncation inside the header is also caught.
        std::fs::write(&path, &bytes[..14]).unwrap();
        assert!(matches!(read_dataset(&path), Err(Error::Truncated(_))));
    }

    #[test]
    fn version_bumps_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v2.rtomo");
        let (sets, grid) = sample_sets();
        write_dataset(&path, &sets, Some(&grid)).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        // The header starts with {"version":1,...} right after the 12-byte
        // preamble; digit "1" sits at a fixed offset.
        let header_start = 12;
        let needle = b"\"version\":1";
        let pos = bytes[header_start..]
            .windows(needle.len())
            .position(|w| w == needle)
            .unwrap();
        bytes[header_start + pos + needle.len() - 1] = b'2';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            read_dataset(&path),
            Err(Error::Version { found: 2, supported: 1 })
        ));
    }

    #[test]
    fn trailing_bytes_are_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("extra.rtomo");
        let (sets, grid) = sample_sets();
        write_dataset(&path, &sets, Some(&grid)).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.extend_from_slice(b"junk");
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_dataset(&path), Err(Error::Format(_))));
    }

    #[test]
    fn header_garbage_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("garbage.rtomo");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(DATASET_MAGIC);
        bytes.extend_from_slice(&8u32.to_le_bytes());
        bytes.extend_from_slice(b"not json");
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_dataset(&path), Err(Error::Format(_))));
    }

    #[test]
    fn image_round_trips_and_validates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.rimg");
        let grid = SceneGrid::new(5, 4, -1.0, 1.0, -2.0, 2.0).unwrap();
        let values: Vec<f64> = (0..20).map(|i| (i as f64) * 0.31).collect();
        write_raw_image(&path, &grid, &values).unwrap();
        let (g, v) = read_raw_image(&path).unwrap();
        assert_eq!(g, grid);
        assert_eq!(v, values);
        // Wrong length and non-finite values are rejected at write time.
        assert!(write_raw_image(&path, &grid, &values[1..]).is_err());
        let mut bad = values.clone();
        bad[3] = f64::NAN;
        assert!(write_raw_image(&path, &grid, &bad).is_err());
    }

    #[test]
    fn corrupted_files_error_but_never_panic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fuzz.rtomo");
        let (sets, grid) = sample_sets();
        write_dataset(&path, &sets, Some(&grid)).unwrap();
        let pristine = std::fs::read(&path).unwrap();
        let mut rng = StdRng::seed_from_u64(2024);
        for trial in 0..30 {
            let mut bytes = pristine.clone();
            match trial % 3 {
                0 => {
                    let cut = rng.gen_range(0..bytes.len());
                    bytes.truncate(cut);
                }
                1 => {
                    let at = rng.gen_range(0..bytes.len());
                    bytes[at] ^= 1 << rng.gen_range(0..8);
                }
                _ => {
                    let at = rng.gen_range(0..bytes.len());
                    bytes.insert(at, rng.gen());
                }
            }
            std::fs::write(&path, &bytes).unwrap();
            // Any outcome is fine except a panic; corrupted floats may
            // still parse, but structure errors must be typed.
            let _ = read_dataset(&path);
        }
    }
}
