//! Minimal raster plotting: histograms rendered to PNG bar charts.
//!
//! Deliberately dependency-light; the only text drawn is numeric tick labels
//! from a small built-in bitmap font, which keeps images byte-stable across
//! platforms.

use crate::histogram::Histogram;
use std::io::BufWriter;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("failed to write plot {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to encode plot {path}: {source}")]
    Encode {
        path: String,
        #[source]
        source: png::EncodingError,
    },
}

const WIDTH: usize = 800;
const HEIGHT: usize = 480;
const MARGIN_LEFT: usize = 56;
const MARGIN_RIGHT: usize = 16;
const MARGIN_TOP: usize = 24;
const MARGIN_BOTTOM: usize = 40;

const BACKGROUND: [u8; 3] = [255, 255, 255];
const AXIS: [u8; 3] = [32, 32, 32];
const BAR: [u8; 3] = [70, 110, 180];
const GRID: [u8; 3] = [225, 225, 225];

/// 3×5 bitmap glyphs for the numeric charset, one byte of 3 bits per row.
const GLYPH_ROWS: usize = 5;
fn glyph(c: char) -> Option<[u8; GLYPH_ROWS]> {
    Some(match c {
        '0' => [0b111, 0b101, 0b101, 0b101, 0b111],
        '1' => [0b010, 0b110, 0b010, 0b010, 0b111],
        '2' => [0b111, 0b001, 0b111, 0b100, 0b111],
        '3' => [0b111, 0b001, 0b111, 0b001, 0b111],
        '4' => [0b101, 0b101, 0b111, 0b001, 0b001],
        '5' => [0b111, 0b100, 0b111, 0b001, 0b111],
        '6' => [0b111, 0b100, 0b111, 0b101, 0b111],
        '7' => [0b111, 0b001, 0b010, 0b010, 0b010],
        '8' => [0b111, 0b101, 0b111, 0b101, 0b111],
        '9' => [0b111, 0b101, 0b111, 0b001, 0b111],
        '.' => [0b000, 0b000, 0b000, 0b000, 0b010],
        '-' => [0b000, 0b000, 0b111, 0b000, 0b000],
        'e' => [0b000, 0b111, 0b111, 0b100, 0b111],
        ' ' => [0; GLYPH_ROWS],
        _ => return None,
    })
}

struct Canvas {
    pixels: Vec<u8>,
}

impl Canvas {
    fn new() -> Self {
        let mut pixels = vec![0u8; WIDTH * HEIGHT * 3];
        for px in pixels.chunks_exact_mut(3) {
            px.copy_from_slice(&BACKGROUND);
        }
        Canvas { pixels }
    }

    fn set(&mut self, x: usize, y: usize, color: [u8; 3]) {
        if x < WIDTH && y < HEIGHT {
            let at = (y * WIDTH + x) * 3;
            self.pixels[at..at + 3].copy_from_slice(&color);
        }
    }

    fn fill_rect(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, color: [u8; 3]) {
        for y in y0..y1.min(HEIGHT) {
            for x in x0..x1.min(WIDTH) {
                self.set(x, y, color);
            }
        }
    }

    /// Draw `text` with its top-left corner at (x, y), scale 2.
    fn text(&mut self, x: usize, y: usize, text: &str, color: [u8; 3]) {
        const SCALE: usize = 2;
        let mut cx = x;
        for c in text.chars() {
            if let Some(rows) = glyph(c) {
                for (ry, bits) in rows.iter().enumerate() {
                    for rx in 0..3 {
                        if bits & (0b100 >> rx) != 0 {
                            self.fill_rect(
                                cx + rx * SCALE,
                                y + ry * SCALE,
                                cx + (rx + 1) * SCALE,
                                y + (ry + 1) * SCALE,
                                color,
                            );
                        }
                    }
                }
            }
            cx += 4 * SCALE;
        }
    }

    fn text_width(text: &str) -> usize {
        text.chars().count() * 8
    }
}

fn format_edge(value: f64) -> String {
    if value == value.trunc() && value.abs() < 1e9 {
        format!("{}", value as i64)
    } else {
        format!("{value:.2}")
    }
}

/// Render a histogram as a PNG bar chart.
///
/// Gaps between occupied bins are drawn as empty bars so the x axis stays
/// linear in value. An empty histogram renders as bare axes.
pub fn render_histogram_png(hist: &Histogram, path: impl AsRef<Path>) -> Result<(), PlotError> {
    let path = path.as_ref();
    let mut canvas = Canvas::new();
    let plot_left = MARGIN_LEFT;
    let plot_right = WIDTH - MARGIN_RIGHT;
    let plot_top = MARGIN_TOP;
    let plot_bottom = HEIGHT - MARGIN_BOTTOM;

    if !hist.bins.is_empty() {
        let lo = *hist.bins.keys().next().unwrap();
        let hi = *hist.bins.keys().next_back().unwrap();
        let n_bins = (hi - lo + 1) as usize;
        let max_count = hist.bins.values().copied().max().unwrap_or(1).max(1);
        let slot_width = (plot_right - plot_left) as f64 / n_bins as f64;

        // Horizontal gridlines at quarter heights.
        for q in 1..=4 {
            let y = plot_bottom - (plot_bottom - plot_top) * q / 4;
            for x in plot_left..plot_right {
                canvas.set(x, y, GRID);
            }
            let label = format!("{}", (max_count as f64 * q as f64 / 4.0).round() as u64);
            let lx = plot_left.saturating_sub(Canvas::text_width(&label) + 6);
            canvas.text(lx, y.saturating_sub(5), &label, AXIS);
        }

        let label_step = n_bins.div_ceil(14).max(1);
        for slot in 0..n_bins {
            let index = lo + slot as i64;
            let count = hist.count(index);
            let x0 = plot_left + (slot as f64 * slot_width).round() as usize;
            let x1 = plot_left + ((slot + 1) as f64 * slot_width).round() as usize;
            if count > 0 {
                let h = ((plot_bottom - plot_top) as f64 * count as f64 / max_count as f64)
                    .round() as usize;
                canvas.fill_rect(x0 + 1, plot_bottom - h, x1.saturating_sub(1).max(x0 + 1), plot_bottom, BAR);
            }
            if slot % label_step == 0 {
                let label = format_edge(index as f64 * hist.bin_width);
                let lx = (x0 + 1).min(WIDTH - Canvas::text_width(&label));
                canvas.text(lx, plot_bottom + 8, &label, AXIS);
            }
        }
    }

    // Axes drawn last so bars never overpaint them.
    for x in plot_left..plot_right {
        canvas.set(x, plot_bottom, AXIS);
    }
    for y in plot_top..=plot_bottom {
        canvas.set(plot_left, y, AXIS);
    }

    let file = std::fs::File::create(path).map_err(|source| PlotError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), WIDTH as u32, HEIGHT as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(|source| PlotError::Encode {
        path: path.display().to_string(),
        source,
    })?;
    writer
        .write_image_data(&canvas.pixels)
        .map_err(|source| PlotError::Encode {
            path: path.display().to_string(),
            source,
        })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_valid_png() {
        let hist = Histogram::from_values(0.5, [1.0, 1.4, 2.2, 6.9, 6.9]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hist.png");
        render_histogram_png(&hist, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..8], &[0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n']);
        assert!(bytes.len() > 500);
    }

    #[test]
    fn empty_histogram_renders_axes_only() {
        let hist = Histogram::new(1.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.png");
        render_histogram_png(&hist, &path).unwrap();
        assert!(path.exists());
    }

    #[test]
    fn identical_histograms_render_identical_bytes() {
        let hist = Histogram::from_values(0.5, [3.0, 3.3, 4.8]);
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.png");
        let b = dir.path().join("b.png");
        render_histogram_png(&hist, &a).unwrap();
        render_histogram_png(&hist, &b).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }
}
