//! Orbit sampling, occupancy heuristics for absorbing regions, and the
//! renormalization / conjugacy identity checks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::map::apply_c;
use crate::param::Parameter;
use crate::raster::{Raster, Viewport};

#[derive(Debug, Clone)]
pub struct OrbitSample {
    pub start: Complex64,
    pub burn_in: u32,
    /// points[k] = f^k(start); truncated at the first escape.
    pub points: Vec<Complex64>,
    /// fold_flags[k] records whether the step producing points[k] folded;
    /// index 0 is always false.
    pub fold_flags: Vec<bool>,
    pub escaped: bool,
}

impl OrbitSample {
    /// Points after the burn-in prefix.
    pub fn tail(&self) -> &[Complex64] {
        let cut = (self.burn_in as usize + 1).min(self.points.len());
        &self.points[cut..]
    }

    /// CSV with header `k,re,im,folded`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,re,im,folded\n");
        for (k, (z, folded)) in self.points.iter().zip(&self.fold_flags).enumerate() {
            out.push_str(&format!("{},{},{},{}\n", k, z.re, z.im, u8::from(*folded)));
        }
        out
    }
}

/// Iterates n steps from z0, tagging the sample as escaped (and stopping)
/// once the orbit leaves the certified escape disk.
pub fn sample_orbit(p: &Parameter, z0: Complex64, n: u32, burn_in: u32) -> Result<OrbitSample> {
    let radius = p.escape_radius()?;
    let mut points = Vec::with_capacity(n as usize + 1);
    let mut fold_flags = Vec::with_capacity(n as usize + 1);
    let mut z = z0;
    points.push(z);
    fold_flags.push(false);
    let mut escaped = z.norm() > radius;
    if !escaped {
        for _ in 0..n {
            let step = p.apply(z);
            z = step.value;
            points.push(z);
            fold_flags.push(step.folded);
            if z.norm() > radius {
                escaped = true;
                break;
            }
        }
    }
    Ok(OrbitSample { start: z0, burn_in, points, fold_flags, escaped })
}

#[derive(Debug, Clone)]
pub struct OccupancyGrid {
    pub resolution: usize,
    /// Row-major square grid aligned to the viewport center and width.
    pub cells: Vec<bool>,
    pub component_count: usize,
}

/// Rasterizes the post-burn-in orbit into a square boolean grid and counts
/// 4-connected components.
pub fn occupancy(sample: &OrbitSample, vp: &Viewport, resolution: usize) -> Result<OccupancyGrid> {
    if sample.escaped || sample.tail().is_empty() {
        return Err(Error::EmptySample);
    }
    let grid_vp = Viewport::new(vp.center, vp.width_units, resolution, resolution);
    let mut cells = vec![false; resolution * resolution];
    for z in sample.tail() {
        if let Some((i, j)) = grid_vp.pixel_of(*z) {
            cells[j * resolution + i] = true;
        }
    }
    let component_count = count_components(&cells, resolution);
    Ok(OccupancyGrid { resolution, cells, component_count })
}

fn count_components(cells: &[bool], res: usize) -> usize {
    let mut seen = vec![false; cells.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..cells.len() {
        if !cells[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (i, j) = (idx % res, idx / res);
            let mut push = |ni: usize, nj: usize| {
                let n = nj * res + ni;
                if cells[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            if i > 0 {
                push(i - 1, j);
            }
            if i + 1 < res {
                push(i + 1, j);
            }
            if j > 0 {
                push(i, j - 1);
            }
            if j + 1 < res {
                push(i, j + 1);
            }
        }
    }
    count
}

#[derive(Debug, Clone, Copy)]
pub struct DeviationReport {
    pub max_deviation: f64,
    pub pass_fraction: f64,
    pub samples: usize,
}

/// Compares m steps under c against a single step under c^m on each sample.
/// The power parameter is used raw — no canonicalization — because the
/// identity is about the literal maps.
pub fn check_power_embedding(
    p: &Parameter,
    m: u32,
    region_samples: &[Complex64],
    tol: f64,
) -> DeviationReport {
    let cm = p.c.powi(m as i32);
    let mut max_dev = 0.0f64;
    let mut pass = 0usize;
    for &z in region_samples {
        let lhs = p.apply_n(z, m);
        let rhs = apply_c(cm, z).value;
        let dev = (lhs - rhs).norm();
        max_dev = max_dev.max(dev);
        if dev <= tol {
            pass += 1;
        }
    }
    DeviationReport {
        max_deviation: max_dev,
        pass_fraction: if region_samples.is_empty() {
            1.0
        } else {
            pass as f64 / region_samples.len() as f64
        },
        samples: region_samples.len(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConjugacyReport {
    pub fixed_point_residual: f64,
    pub identity: DeviationReport,
}

/// The fixed study parameter for the cubic affine conjugacy.
pub fn conjugacy_parameter() -> Complex64 {
    Complex64::new(-0.65, 0.88)
}

/// Scaled parameter b = |c|^2 c for the conjugacy identity.
pub fn conjugacy_power_parameter() -> Complex64 {
    let c = conjugacy_parameter();
    c.norm_sqr() * c
}

/// Verifies that z_0 = 2i(1 - conj(c)) / (|c|^2 c - 1) is fixed by the
/// third iterate of f_c and that phi(z) = (Im(z_0)+1) z + z_0 intertwines
/// f_{|c|^2 c} with f_c^3 on the given samples.
pub fn check_affine_conjugacy(samples: &[Complex64], tol: f64) -> ConjugacyReport {
    let c = conjugacy_parameter();
    let b = conjugacy_power_parameter();
    let p = Parameter::canonicalize(c);
    let z0 = Complex64::new(0.0, 2.0) * (Complex64::new(1.0, 0.0) - c.conj())
        / (b - Complex64::new(1.0, 0.0));
    let phi = |z: Complex64| (z0.im + 1.0) * z + z0;

    let fixed_point_residual = (p.apply_n(z0, 3) - z0).norm();

    let mut max_dev = 0.0f64;
    let mut pass = 0usize;
    for &z in samples {
        let lhs = phi(apply_c(b, z).value);
        let rhs = p.apply_n(phi(z), 3);
        let dev = (lhs - rhs).norm();
        max_dev = max_dev.max(dev);
        if dev <= tol {
            pass += 1;
        }
    }
    ConjugacyReport {
        fixed_point_residual,
        identity: DeviationReport {
            max_deviation: max_dev,
            pass_fraction: if samples.is_empty() { 1.0 } else { pass as f64 / samples.len() as f64 },
            samples: samples.len(),
        },
    }
}

/// One overlay layer: either a stroked polyline or a set of marked points.
#[derive(Debug, Clone)]
pub enum OverlayLayer {
    Chain(Vec<Complex64>),
    Points(Vec<Complex64>),
}

/// Draws annotation layers into the raster's overlay channel; layer i uses
/// stroke color i+1. One-pixel strokes; layers outside the view are clipped.
pub fn export_overlay(base: &mut Raster, vp: &Viewport, layers: &[OverlayLayer]) {
    for (li, layer) in layers.iter().enumerate() {
        let tag = (li % 4) as u8 + 1;
        match layer {
            OverlayLayer::Points(points) => {
                for z in points {
                    if let Some((i, j)) = vp.pixel_of(*z) {
                        base.overlay[j * base.px_w + i] = tag;
                    }
                }
            }
            OverlayLayer::Chain(chain) => {
                for pair in chain.windows(2) {
                    let (a, b) = (pair[0], pair[1]);
                    let steps = ((b - a).norm() / (vp.scale() * 0.5)).ceil().max(1.0) as usize;
                    for s in 0..=steps {
                        let z = a + (s as f64 / steps as f64) * (b - a);
                        if let Some((i, j)) = vp.pixel_of(z) {
                            base.overlay[j * base.px_w + i] = tag;
                        }
                    }
                }
            }
        }
    }
}
