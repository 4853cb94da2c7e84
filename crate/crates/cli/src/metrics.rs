//! Image quality metrics against the true scene.

use anyhow::{ensure, Result};
use serde::Serialize;

use rtomo::SceneGrid64;

/// Decibel clamp for ratios whose numerator or denominator vanishes.
pub const RATIO_FLOOR_DB: f64 = -300.0;
pub const RATIO_CEIL_DB: f64 = 300.0;

/// Brightest pixel of an image.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Peak {
    pub x_m: f64,
    pub y_m: f64,
    pub value: f64,
}

/// How much energy an image leaks away from the true scatterers.
#[derive(Debug, Clone, Serialize)]
pub struct ImageMetrics {
    pub peak: Peak,
    /// Largest magnitude within `radius_m` of any true ground position.
    pub signal_peak: f64,
    /// Largest magnitude everywhere else.
    pub artifact_peak: f64,
    /// `20 log10(artifact_peak / signal_peak)`, clamped to
    /// [`RATIO_FLOOR_DB`, `RATIO_CEIL_DB`] when either side vanishes.
    pub artifact_to_signal_db: f64,
}

/// Computes the metrics of one image against the true ground positions.
///
/// Pixels whose centers lie within `radius_m` of any truth position form
/// the signal region; everything else counts as artifact. Both regions
/// must be nonempty, otherwise the radius cannot separate them.
pub fn evaluate(
    grid: &SceneGrid64,
    values: &[f64],
    truths: &[(f64, f64)],
    radius_m: f64,
) -> Result<ImageMetrics> {
    ensure!(
        values.len() == grid.num_pixels(),
        "image has {} values but the grid expects {}",
        values.len(),
        grid.num_pixels()
    );
    ensure!(!truths.is_empty(), "no true scatterer positions given");
    ensure!(
        radius_m.is_finite() && radius_m > 0.0,
        "signal radius must be positive, got {radius_m}"
    );

    let mut peak_index = 0;
    let mut signal_peak = f64::NEG_INFINITY;
    let mut artifact_peak = f64::NEG_INFINITY;
    let mut signal_pixels = 0usize;
    for (l, &v) in values.iter().enumerate() {
        if v > values[peak_index] {
            peak_index = l;
        }
        let (x, y) = grid.pixel_coords(l).expect("index is in range");
        let in_signal = truths
            .iter()
            .any(|&(tx, ty)| (x - tx).hypot(y - ty) <= radius_m);
        if in_signal {
            signal_pixels += 1;
            signal_peak = signal_peak.max(v);
        } else {
            artifact_peak = artifact_peak.max(v);
        }
    }
    ensure!(
        signal_pixels > 0,
        "radius {radius_m} m covers no pixel centers; enlarge it or refine the grid"
    );
    ensure!(
        signal_pixels < values.len(),
        "radius {radius_m} m covers the whole grid; shrink it"
    );

    let artifact_to_signal_db = if artifact_peak <= 0.0 {
        RATIO_FLOOR_DB
    } else if signal_peak <= 0.0 {
        RATIO_CEIL_DB
    } else {
        (20.0 * (artifact_peak / signal_peak).log10()).clamp(RATIO_FLOOR_DB, RATIO_CEIL_DB)
    };

    let (x_m, y_m) = grid.pixel_coords(peak_index).expect("index is in range");
    Ok(ImageMetrics {
        peak: Peak {
            x_m,
            y_m,
            value: values[peak_index],
        },
        signal_peak,
        artifact_peak,
        artifact_to_signal_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid4() -> SceneGrid64 {
        SceneGrid64::new(4, 4, -2.0, 2.0, -2.0, 2.0).unwrap()
    }

    #[test]
    fn identical_images_give_identical_metrics() {
        let grid = grid4();
        let mut values = vec![0.0; 16];
        values[5] = 1.0;
        values[10] = 0.2;
        let truths = [(-0.5, -0.5)];
        let a = evaluate(&grid, &values, &truths, 0.75).unwrap();
        let b = evaluate(&grid, &values, &truths, 0.75).unwrap();
        assert_eq!(a.artifact_to_signal_db, b.artifact_to_signal_db);
        assert_eq!(a.peak.value, b.peak.value);
        assert_eq!((a.peak.x_m, a.peak.y_m), (-0.5, -0.5));
        assert_eq!(a.signal_peak, 1.0);
        assert_eq!(a.artifact_peak, 0.2);
        let expected = 20.0 * (0.2f64).log10();
        assert!((a.artifact_to_signal_db - expected).abs() < 1.0e-12);
    }

    #[test]
    fn clean_single_peak_reports_the_ratio_floor() {
        let grid = grid4();
        let mut values = vec![0.0; 16];
        values[5] = 3.0;
        let m = evaluate(&grid, &values, &[(-0.5, -0.5)], 0.75).unwrap();
        assert_eq!(m.artifact_to_signal_db, RATIO_FLOOR_DB);
        assert_eq!(m.artifact_peak, 0.0);
    }

    #[test]
    fn energy_only_outside_the_disc_reports_the_ceiling() {
        let grid = grid4();
        let mut values = vec![0.0; 16];
        values[0] = 1.0;
        let m = evaluate(&grid, &values, &[(-0.5, -0.5)], 0.75).unwrap();
        assert_eq!(m.artifact_to_signal_db, RATIO_CEIL_DB);
    }

    #[test]
    fn degenerate_radii_are_rejected() {
        let grid = grid4();
        let values = vec![0.0; 16];
        let truths = [(0.0, 0.0)];
        // Too small to contain any pixel center.
        assert!(evaluate(&grid, &values, &truths, 0.1).is_err());
        // Swallows the whole grid.
        assert!(evaluate(&grid, &values, &truths, 10.0).is_err());
        assert!(evaluate(&grid, &values, &truths, -1.0).is_err());
        assert!(evaluate(&grid, &values, &[], 0.75).is_err());
    }

    #[test]
    fn first_of_equal_peaks_wins_deterministically() {
        let grid = grid4();
        let mut values = vec![0.0; 16];
        values[3] = 2.0;
        values[12] = 2.0;
        let m = evaluate(&grid, &values, &[(1.5, -1.5)], 0.6).unwrap();
        assert_eq!((m.peak.x_m, m.peak.y_m), (1.5, -1.5));
    }
}
