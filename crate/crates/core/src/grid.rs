//! Reconstruction grid on the ground plane.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Rectangular pixel grid on the ground plane (z = 0).
///
/// Pixels are indexed row-major with x fastest: pixel `l` has column
/// `i = l % nx` and row `j = l / nx`. Pixel centers sit at
///
/// ```text
/// x_l = x_min + (i + 0.5) * (x_max - x_min) / nx
/// y_l = y_min + (j + 0.5) * (y_max - y_min) / ny
/// ```
///
/// so the grid covers `[x_min, x_max) x [y_min, y_max)` with uniform pitch.
/// Images over the grid are flat vectors of length `nx * ny` in the same
/// ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneGrid<T> {
    nx: usize,
    ny: usize,
    x_min: T,
    x_max: T,
    y_min: T,
    y_max: T,
}

impl<T: Real> SceneGrid<T> {
    /// Builds a grid, validating `nx, ny >= 1` and strictly ordered,
    /// finite extents.
    pub fn new(nx: usize, ny: usize, x_min: T, x_max: T, y_min: T, y_max: T) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid must have at least one pixel per axis, got {nx}x{ny}"
            )));
        }
        for (name, v) in [
            ("x_min", x_min),
            ("x_max", x_max),
            ("y_min", y_min),
            ("y_max", y_max),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("grid extent {name}")));
            }
        }
        if x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidParameter(format!(
                "grid extents must be strictly ordered, got x [{x_min}, {x_max}], y [{y_min}, {y_max}]"
            )));
        }
        Ok(Self {
            nx,
            ny,
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// Number of pixel columns.
    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Number of pixel rows.
    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Minimum x extent in meters.
    pub fn x_min(&self) -> T {
        self.x_min
    }

    /// Maximum x extent in meters.
    pub fn x_max(&self) -> T {
        self.x_max
    }

    /// Minimum y extent in meters.
    pub fn y_min(&self) -> T {
        self.y_min
    }

    /// Maximum y extent in meters.
    pub fn y_max(&self) -> T {
        self.y_max
    }

    /// Total pixel count `L = nx * ny`.
    pub fn num_pixels(&self) -> usize {
        self.nx * self.ny
    }

    /// Pixel pitch along x in meters.
    pub fn pitch_x(&self) -> T {
        (self.x_max - self.x_min) / T::of(self.nx as f64)
    }

    /// Pixel pitch along y in meters.
    pub fn pitch_y(&self) -> T {
        (self.y_max - self.y_min) / T::of(self.ny as f64)
    }

    /// Center x coordinate of column `i` (unchecked; callers index in range).
    fn x_center(&self, i: usize) -> T {
        self.x_min + (T::of(i as f64) + T::of(0.5)) * (self.x_max - self.x_min) / T::of(self.nx as f64)
    }

    /// Center y coordinate of row `j` (unchecked).
    fn y_center(&self, j: usize) -> T {
        self.y_min + (T::of(j as f64) + T::of(0.5)) * (self.y_max - self.y_min) / T::of(self.ny as f64)
    }

    /// Flat index of the pixel at column `i`, row `j`.
    pub fn pixel_index(&self, i: usize, j: usize) -> Result<usize> {
        if i >= self.nx {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.nx,
            });
        }
        if j >= self.ny {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.ny,
            });
        }
        Ok(j * self.nx + i)
    }

    /// Center coordinates `(x, y)` of pixel `l`.
    pub fn pixel_coords(&self, l: usize) -> Result<(T, T)> {
        if l >= self.num_pixels() {
            return Err(Error::IndexOutOfRange {
                index: l,
                len: self.num_pixels(),
            });
        }
        let i = l % self.nx;
        let j = l / self.nx;
        Ok((self.x_center(i), self.y_center(j)))
    }

    /// Flat index of the pixel whose center is nearest to `(x, y)`, or
    /// `None` if the point lies outside the grid extents.
    pub fn nearest_pixel(&self, x: T, y: T) -> Option<usize> {
        if x < self.x_min || x >= self.x_max || y < self.y_min || y >= self.y_max {
            return None;
        }
        let fi = ((x - self.x_min) / self.pitch_x()).floor();
        let fj = ((y - self.y_min) / self.pitch_y()).floor();
        // Guard against rounding just past the last pixel on either axis.
        let i = (fi.to_usize().unwrap_or(0)).min(self.nx - 1);
        let j = (fj.to_usize().unwrap_or(0)).min(self.ny - 1);
        Some(j * self.nx + i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(SceneGrid::<f64>::new(0, 4, -1.0, 1.0, -1.0, 1.0).is_err());
        assert!(SceneGrid::<f64>::new(4, 0, -1.0, 1.0, -1.0, 1.0).is_err());
        assert!(SceneGrid::<f64>::new(4, 4, 1.0, 1.0, -1.0, 1.0).is_err());
        assert!(SceneGrid::<f64>::new(4, 4, 2.0, 1.0, -1.0, 1.0).is_err());
        assert!(SceneGrid::<f64>::new(4, 4, f64::NAN, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn pixel_coords_match_the_documented_formula_exactly() {
        let g = SceneGrid::new(7, 5, -2.3, 1.1, 0.4, 6.0).unwrap();
        for l in 0..g.num_pixels() {
            let i = l % 7;
            let j = l / 7;
            let x = -2.3 + (i as f64 + 0.5) * (1.1 - (-2.3)) / 7.0;
            let y = 0.4 + (j as f64 + 0.5) * (6.0 - 0.4) / 5.0;
            assert_eq!(g.pixel_coords(l).unwrap(), (x, y), "pixel {l}");
        }
    }

    #[test]
    fn index_and_coords_round_trip() {
        let g = SceneGrid::new(6, 9, -1.0, 1.0, -3.0, 3.0).unwrap();
        for j in 0..9 {
            for i in 0..6 {
                let l = g.pixel_index(i, j).unwrap();
                assert_eq!(l, j * 6 + i);
                let (x, y) = g.pixel_coords(l).unwrap();
                assert_eq!(g.nearest_pixel(x, y), Some(l));
            }
        }
    }

    #[test]
    fn out_of_range_indices_are_errors() {
        let g = SceneGrid::new(4, 3, -1.0, 1.0, -1.0, 1.0).unwrap();
        assert!(matches!(
            g.pixel_coords(12),
            Err(Error::IndexOutOfRange { index: 12, len: 12 })
        ));
        assert!(g.pixel_index(4, 0).is_err());
        assert!(g.pixel_index(0, 3).is_err());
    }

    #[test]
    fn nearest_pixel_rejects_points_outside() {
        let g = SceneGrid::new(4, 4, -1.0, 1.0, -1.0, 1.0).unwrap();
        assert_eq!(g.nearest_pixel(-1.0001, 0.0), None);
        assert_eq!(g.nearest_pixel(1.0, 0.0), None); // right edge is exclusive
        assert_eq!(g.nearest_pixel(0.0, 17.0), None);
        assert!(g.nearest_pixel(-1.0, -1.0).is_some()); // left edge inclusive
    }

    #[test]
    fn pitch_is_uniform() {
        let g = SceneGrid::new(10, 20, -2.0, 2.0, -4.0, 4.0).unwrap();
        assert_eq!(g.pitch_x(), 0.4);
        assert_eq!(g.pitch_y(), 0.4);
    }
}
