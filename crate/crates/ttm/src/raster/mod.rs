//! Deterministic per-pixel rasterization of dynamical- and parameter-plane
//! pictures. Every shader is a pure function of its pixel, so the grid can
//! be partitioned across workers arbitrarily without changing the output.

pub mod palette;
pub mod ppm;
pub mod viewport;

pub use palette::Palette;
pub use viewport::Viewport;

use num_complex::Complex64;

use crate::error::Result;
use crate::map::apply_c;
use crate::param::Parameter;

/// Cell marker: the event never happened within the iteration budget.
pub const SURVIVED: u32 = u32::MAX;
/// Cell marker: the value is undefined for this pixel (masked region).
pub const SENTINEL: u32 = u32::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    EscapeTime,
    Coded,
    Fastest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShaderConfig {
    pub max_iter: u32,
    /// 0 requests the certified per-parameter escape radius.
    pub escape_r: f64,
    /// Coded bailout: the visit count that resolves the code channel.
    pub coded_bailout: u32,
    pub mode: Mode,
}

impl Default for ShaderConfig {
    fn default() -> ShaderConfig {
        ShaderConfig {
            max_iter: 1000,
            escape_r: 0.0,
            coded_bailout: 120,
            mode: Mode::EscapeTime,
        }
    }
}

/// Escape iteration and code iteration for one pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub escape: u32,
    pub code: u32,
}

pub const SENTINEL_CELL: Cell = Cell { escape: SENTINEL, code: SENTINEL };

#[derive(Debug, Clone)]
pub struct Raster {
    pub px_w: usize,
    pub px_h: usize,
    pub cells: Vec<Cell>,
    /// Optional annotation channel painted over the image at write time;
    /// 0 = transparent, small values select fixed stroke colors.
    pub overlay: Vec<u8>,
    /// Everything that influenced the cells, as key/value lines.
    pub meta: Vec<(String, String)>,
}

impl Raster {
    pub fn cell(&self, i: usize, j: usize) -> Cell {
        self.cells[j * self.px_w + i]
    }

    pub fn meta_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

/// Core shader: first escape iteration past `radius` and first iteration at
/// which the orbit has paid the N-th visit to the pre-upper half plane.
///
/// After an escape the loop keeps running only to resolve the code channel,
/// and gives up once the modulus overflows any reasonable range.
pub fn shade_point(c: Complex64, z0: Complex64, radius: f64, cfg: &ShaderConfig) -> Cell {
    let n_target = cfg.coded_bailout;
    let mut z = z0;
    let mut escape: Option<u32> = None;
    let mut code: Option<u32> = None;
    let mut visits: u32 = 0;
    for n in 0..=cfg.max_iter {
        if escape.is_none() && z.norm_sqr() > radius * radius {
            escape = Some(n);
        }
        if escape.is_some() && (code.is_some() || z.norm_sqr() > 1e200) {
            break;
        }
        if n == cfg.max_iter {
            break;
        }
        let step = apply_c(c, z);
        if code.is_none() {
            if !step.folded {
                visits += 1;
            }
            if visits >= n_target {
                code = Some(n + 1);
            }
        }
        z = step.value;
    }
    Cell {
        escape: escape.unwrap_or(SURVIVED),
        code: code.unwrap_or(SURVIVED),
    }
}

/// Dynamical-plane shader for a fixed parameter; resolves the escape radius
/// from the config.
pub fn shade_dynamical_pixel(p: &Parameter, z: Complex64, cfg: &ShaderConfig) -> Result<Cell> {
    let radius = if cfg.escape_r > 0.0 { cfg.escape_r } else { p.escape_radius()? };
    Ok(shade_point(p.c, z, radius, cfg))
}

fn fill_seq(px_w: usize, px_h: usize, shader: &(dyn Fn(usize, usize) -> Cell + Sync)) -> Vec<Cell> {
    let mut cells = vec![Cell { escape: 0, code: 0 }; px_w * px_h];
    for j in 0..px_h {
        for (i, cell) in cells[j * px_w..(j + 1) * px_w].iter_mut().enumerate() {
            *cell = shader(i, j);
        }
    }
    cells
}

#[cfg(feature = "parallel")]
fn fill_par(px_w: usize, px_h: usize, shader: &(dyn Fn(usize, usize) -> Cell + Sync)) -> Vec<Cell> {
    use rayon::prelude::*;
    let mut cells = vec![Cell { escape: 0, code: 0 }; px_w * px_h];
    cells
        .par_chunks_mut(px_w)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, cell) in row.iter_mut().enumerate() {
                *cell = shader(i, j);
            }
        });
    cells
}

/// Evaluates the shader over the whole grid, in parallel when the crate is
/// built with the `parallel` feature.
pub fn fill(px_w: usize, px_h: usize, shader: &(dyn Fn(usize, usize) -> Cell + Sync)) -> Vec<Cell> {
    #[cfg(feature = "parallel")]
    {
        fill_par(px_w, px_h, shader)
    }
    #[cfg(not(feature = "parallel"))]
    {
        fill_seq(px_w, px_h, shader)
    }
}

/// Sequential reference path, always available for comparison.
pub fn fill_sequential(
    px_w: usize,
    px_h: usize,
    shader: &(dyn Fn(usize, usize) -> Cell + Sync),
) -> Vec<Cell> {
    fill_seq(px_w, px_h, shader)
}

fn base_meta(kind: &str, vp: &Viewport, cfg: Option<&ShaderConfig>) -> Vec<(String, String)> {
    let mut meta = vec![
        ("kind".to_string(), kind.to_string()),
        ("center".to_string(), format!("{}+{}i", vp.center.re, vp.center.im)),
        ("width".to_string(), format!("{}", vp.width_units)),
        ("px_w".to_string(), format!("{}", vp.px_w)),
        ("px_h".to_string(), format!("{}", vp.px_h)),
    ];
    if let Some(cfg) = cfg {
        meta.push(("max_iter".to_string(), format!("{}", cfg.max_iter)));
        meta.push(("escape_r".to_string(), format!("{}", cfg.escape_r)));
        meta.push(("coded_bailout".to_string(), format!("{}", cfg.coded_bailout)));
        meta.push((
            "mode".to_string(),
            match cfg.mode {
                Mode::EscapeTime => "escape-time".to_string(),
                Mode::Coded => "coded".to_string(),
                Mode::Fastest => "fastest".to_string(),
            },
        ));
    }
    meta
}

/// Dynamical-plane render for a fixed parameter.
pub fn render_julia(p: &Parameter, vp: &Viewport, cfg: &ShaderConfig) -> Result<Raster> {
    let radius = if cfg.escape_r > 0.0 { cfg.escape_r } else { p.escape_radius()? };
    let c = p.c;
    let shader = move |i: usize, j: usize| shade_point(c, vp.pixel_center(i, j), radius, cfg);
    let cells = fill(vp.px_w, vp.px_h, &shader);
    let mut meta = base_meta("julia", vp, Some(cfg));
    meta.push(("c".to_string(), format!("{}+{}i", p.c.re, p.c.im)));
    meta.push(("resolved_escape_r".to_string(), format!("{radius}")));
    Ok(Raster { px_w: vp.px_w, px_h: vp.px_h, cells, overlay: vec![0; vp.px_w * vp.px_h], meta })
}

/// Parameter-plane render: escape time of the corner point gamma_0(c) under
/// its own map. Survived pixels approximate the locus where the invariant
/// set is a polygon. The real axis is masked (gamma_0 undefined).
pub fn render_param_polygonal_locus(vp: &Viewport, cfg: &ShaderConfig) -> Raster {
    let shader = move |i: usize, j: usize| {
        let c_raw = vp.pixel_center(i, j);
        if c_raw.im == 0.0 {
            return SENTINEL_CELL;
        }
        let p = Parameter::canonicalize(c_raw);
        if p.r <= 1.0 {
            return Cell { escape: SURVIVED, code: SURVIVED };
        }
        let radius = match p.escape_radius() {
            Ok(r) => r,
            Err(_) => return SENTINEL_CELL,
        };
        let g0 = match p.gamma0() {
            Ok(g) => g,
            Err(_) => return SENTINEL_CELL,
        };
        shade_point(p.c, g0, radius, cfg)
    };
    let cells = fill(vp.px_w, vp.px_h, &shader);
    let meta = base_meta("param-polygonal-locus", vp, Some(cfg));
    Raster { px_w: vp.px_w, px_h: vp.px_h, cells, overlay: vec![0; vp.px_w * vp.px_h], meta }
}

/// Smallest n >= 1 whose spiral vertex drops below the folding line, or
/// None within the cap. Requires |c| > 1.
pub fn first_low_vertex(c: Complex64, n_cap: u32) -> Option<u32> {
    let r2 = c.norm_sqr();
    let ell0 = Complex64::new(0.0, 2.0) * (Complex64::new(1.0, 0.0) - c.conj()) / (r2 - 1.0);
    let mut v = ell0;
    for n in 1..=n_cap {
        v /= c;
        if v.im <= -1.0 {
            return Some(n);
        }
    }
    None
}

/// Parameter-plane render: index of the first spiral vertex below the
/// folding line; the closed unit disk and cap misses are masked.
pub fn render_param_bubbles(vp: &Viewport, n_cap: u32) -> Raster {
    let shader = move |i: usize, j: usize| {
        let c = vp.pixel_center(i, j);
        if c.norm_sqr() <= 1.0 {
            return SENTINEL_CELL;
        }
        match first_low_vertex(c, n_cap) {
            Some(n) => Cell { escape: n, code: n },
            None => SENTINEL_CELL,
        }
    };
    let cells = fill(vp.px_w, vp.px_h, &shader);
    let mut meta = base_meta("param-bubbles", vp, None);
    meta.push(("n_cap".to_string(), format!("{n_cap}")));
    Raster { px_w: vp.px_w, px_h: vp.px_h, cells, overlay: vec![0; vp.px_w * vp.px_h], meta }
}

pub const LAYER_UNIT_DISK: u32 = 1;
pub const LAYER_SQRT2_CIRCLE: u32 = 1 << 1;
pub const LAYER_POLYGONAL_LOCUS: u32 = 1 << 2;
pub const LAYER_BUBBLE_SHIFT: u32 = 3;

/// Per-pixel composite of the partition layers, packed into the code
/// channel: bit 0 unit disk, bit 1 the |c| = sqrt(2) circle (one pixel
/// wide), bit 2 polygonal-locus membership, bits 3..7 the bubble index
/// clamped to 31.
pub fn layered_bits(c: Complex64, half_px: f64, cfg: &ShaderConfig) -> u32 {
    let mut bits = 0u32;
    let r = c.norm();
    if r <= 1.0 {
        bits |= LAYER_UNIT_DISK;
    }
    if (r - std::f64::consts::SQRT_2).abs() <= half_px {
        bits |= LAYER_SQRT2_CIRCLE;
    }
    if c.im != 0.0 && r > 1.0 {
        let p = Parameter::canonicalize(c);
        if let (Ok(radius), Ok(g0)) = (p.escape_radius(), p.gamma0()) {
            if shade_point(p.c, g0, radius, cfg).escape == SURVIVED {
                bits |= LAYER_POLYGONAL_LOCUS;
            }
        }
        if let Some(n) = first_low_vertex(c, 31) {
            bits |= n.min(31) << LAYER_BUBBLE_SHIFT;
        }
    }
    bits
}

pub fn render_param_layered(vp: &Viewport) -> Raster {
    let cfg = ShaderConfig::default();
    let half_px = vp.scale() * 0.5;
    let shader = move |i: usize, j: usize| {
        let bits = layered_bits(vp.pixel_center(i, j), half_px, &cfg);
        Cell { escape: bits, code: bits }
    };
    let cells = fill(vp.px_w, vp.px_h, &shader);
    let meta = base_meta("param-layered", vp, None);
    Raster { px_w: vp.px_w, px_h: vp.px_h, cells, overlay: vec![0; vp.px_w * vp.px_h], meta }
}

/// Parameter-plane render of the coded shader applied to one fixed test
/// point under each pixel's map. Contracting pixels iterate against a large
/// fixed radius instead of a certified one (their orbits stay bounded).
pub fn render_param_coded(vp: &Viewport, test_point: Complex64, cfg: &ShaderConfig) -> Raster {
    let shader = move |i: usize, j: usize| {
        let c = vp.pixel_center(i, j);
        let p = Parameter::canonicalize(c);
        let radius = if cfg.escape_r > 0.0 {
            cfg.escape_r
        } else {
            match p.escape_radius() {
                Ok(r) => r,
                Err(_) => 1e6,
            }
        };
        shade_point(c, test_point, radius, cfg)
    };
    let cells = fill(vp.px_w, vp.px_h, &shader);
    let mut meta = base_meta("param-coded", vp, Some(cfg));
    meta.push((
        "test_point".to_string(),
        format!("{}+{}i", test_point.re, test_point.im),
    ));
    Raster { px_w: vp.px_w, px_h: vp.px_h, cells, overlay: vec![0; vp.px_w * vp.px_h], meta }
}
