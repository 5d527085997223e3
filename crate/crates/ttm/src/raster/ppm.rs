use std::io::Write;

use crate::error::Result;

use super::palette::Palette;
use super::{Cell, Mode, Raster, SENTINEL, SURVIVED};

/// Stroke colors for the overlay channel, indexed by overlay value - 1.
const OVERLAY_COLORS: [(u8, u8, u8); 4] =
    [(255, 255, 255), (255, 64, 64), (64, 255, 64), (80, 144, 255)];

fn cell_color(cell: Cell, mode: Mode, palette: &Palette) -> (u8, u8, u8) {
    let value = match mode {
        Mode::EscapeTime => cell.escape,
        Mode::Coded => cell.code,
        Mode::Fastest => cell.escape.min(cell.code),
    };
    match value {
        SENTINEL => palette.sentinel,
        SURVIVED => (0, 0, 0),
        v => palette.color(v),
    }
}

/// Serializes the raster as a binary portable pixmap: "P6\n<w> <h>\n255\n"
/// followed by row-major RGB triplets, top row first. Byte deterministic.
pub fn ppm_bytes(raster: &Raster, palette: &Palette, mode: Mode) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + 3 * raster.cells.len());
    out.extend_from_slice(format!("P6\n{} {}\n255\n", raster.px_w, raster.px_h).as_bytes());
    for (idx, cell) in raster.cells.iter().enumerate() {
        let (r, g, b) = match raster.overlay.get(idx) {
            Some(&o) if o != 0 => {
                OVERLAY_COLORS[((o - 1) as usize).min(OVERLAY_COLORS.len() - 1)]
            }
            _ => cell_color(*cell, mode, palette),
        };
        out.push(r);
        out.push(g);
        out.push(b);
    }
    out
}

pub fn write_ppm<W: Write>(
    raster: &Raster,
    palette: &Palette,
    mode: Mode,
    writer: &mut W,
) -> Result<()> {
    writer.write_all(&ppm_bytes(raster, palette, mode))?;
    Ok(())
}
