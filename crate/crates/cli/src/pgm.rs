//! 16-bit portable graymap export with decibel scaling.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{ensure, Context, Result};
use rtomo::SceneGrid64;

/// Maps magnitudes to 16-bit gray levels: `v` becomes
/// `clamp(20 log10(v / v_max), floor_db, 0)` stretched linearly onto
/// `[0, 65535]`. Zero magnitudes (and an all-zero image) land on the
/// floor.
pub fn db_levels(values: &[f64], floor_db: f64) -> Result<Vec<u16>> {
    ensure!(
        floor_db < 0.0 && floor_db.is_finite(),
        "display floor must be a negative decibel value, got {floor_db}"
    );
    let v_max = values.iter().cloned().fold(0.0, f64::max);
    let levels = values
        .iter()
        .map(|&v| {
            let db = if v > 0.0 && v_max > 0.0 {
                (20.0 * (v / v_max).log10()).clamp(floor_db, 0.0)
            } else {
                floor_db
            };
            // floor_db -> 0, 0 dB -> 65535.
            ((db - floor_db) / -floor_db * 65535.0).round() as u16
        })
        .collect();
    Ok(levels)
}

/// Writes the image as a binary 16-bit graymap (P5, big-endian samples),
/// top raster row at maximum y so north stays up.
pub fn write_pgm(
    path: impl AsRef<Path>,
    grid: &SceneGrid64,
    values: &[f64],
    floor_db: f64,
) -> Result<()> {
    let path = path.as_ref();
    ensure!(
        values.len() == grid.num_pixels(),
        "image has {} values but the grid expects {}",
        values.len(),
        grid.num_pixels()
    );
    let levels = db_levels(values, floor_db)?;
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write!(out, "P5\n{} {}\n65535\n", grid.nx(), grid.ny())?;
    for j in (0..grid.ny()).rev() {
        let row = &levels[j * grid.nx()..(j + 1) * grid.nx()];
        for level in row {
            out.write_all(&level.to_be_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}
