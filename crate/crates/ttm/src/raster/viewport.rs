use num_complex::Complex64;

/// Axis-aligned view of the plane with square pixels and the y-axis up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub center: Complex64,
    /// Real-axis extent of the image in plane units.
    pub width_units: f64,
    pub px_w: usize,
    pub px_h: usize,
}

impl Viewport {
    pub fn new(center: Complex64, width_units: f64, px_w: usize, px_h: usize) -> Viewport {
        assert!(width_units > 0.0 && px_w > 0 && px_h > 0);
        Viewport { center, width_units, px_w, px_h }
    }

    pub fn height_units(&self) -> f64 {
        self.width_units * self.px_h as f64 / self.px_w as f64
    }

    /// Plane units per pixel.
    pub fn scale(&self) -> f64 {
        self.width_units / self.px_w as f64
    }

    /// Pixel containing the point, if inside the view.
    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let x = ((z.re - self.center.re) / self.width_units + 0.5) * self.px_w as f64;
        let y = (0.5 - (z.im - self.center.im) / self.height_units()) * self.px_h as f64;
        if x < 0.0 || y < 0.0 {
            return None;
        }
        let (i, j) = (x.floor() as usize, y.floor() as usize);
        if i < self.px_w && j < self.px_h {
            Some((i, j))
        } else {
            None
        }
    }

    /// Center of pixel (i, j); row j = 0 is the top of the image.
    pub fn pixel_center(&self, i: usize, j: usize) -> Complex64 {
        let re = ((i as f64 + 0.5) / self.px_w as f64 - 0.5) * self.width_units;
        let im = (0.5 - (j as f64 + 0.5) / self.px_h as f64) * self.height_units();
        self.center + Complex64::new(re, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn center_pixel_of_odd_grid_is_exact() {
        let vp = Viewport::new(C::new(0.0, -0.7), 0.4, 801, 801);
        let z = vp.pixel_center(400, 400);
        assert_eq!(z.re, 0.0);
        assert_eq!(z.im, -0.7);
    }

    #[test]
    fn corners_and_orientation() {
        let vp = Viewport::new(C::new(1.0, 2.0), 4.0, 100, 50);
        let tl = vp.pixel_center(0, 0);
        let br = vp.pixel_center(99, 49);
        assert!(tl.re < 1.0 && tl.im > 2.0);
        assert!(br.re > 1.0 && br.im < 2.0);
        assert!((vp.height_units() - 2.0).abs() < 1e-15);
        // Square pixels: horizontal and vertical steps agree.
        let dx = vp.pixel_center(1, 0).re - tl.re;
        let dy = tl.im - vp.pixel_center(0, 1).im;
        assert!((dx - dy).abs() < 1e-15);
    }
}
