//! SVG correlation heatmaps.
//!
//! Colors run on a diverging scale: -1 is blue, 0 white and +1 red. Cells carry
//! their value as text for matrices up to [`MAX_LABELLED`] features. Output is
//! a pure function of the matrix, so identical input yields identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::data::CorrelationMatrix;
use crate::{Error, Result};

pub const MAX_LABELLED: usize = 20;

const CELL: usize = 36;
const CHAR_WIDTH: usize = 7;
const PAD: usize = 10;

/// `#rrggbb` for a correlation in [-1, 1].
pub fn diverging_color(value: f64) -> String {
    let t = value.clamp(-1.0, 1.0);
    let fade = |x: f64| (255.0 * (1.0 - x.abs())).round() as u8;
    let (r, g, b) = if t < 0.0 {
        (fade(t), fade(t), 255)
    } else {
        (255, fade(t), fade(t))
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub fn render_heatmap(c: &CorrelationMatrix) -> String {
    let n = c.len();
    let longest = c
        .names()
        .iter()
        .map(|s| s.chars().count())
        .max()
        .unwrap_or(0);
    let margin = longest * CHAR_WIDTH + 2 * PAD;
    let size = margin + n * CELL + PAD;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="11">"##
    );
    let _ = writeln!(
        svg,
        r##"<rect width="{size}" height="{size}" fill="#ffffff"/>"##
    );
    for i in 0..n {
        for j in 0..n {
            let v = c.get(i, j);
            let (x, y) = (margin + j * CELL, margin + i * CELL);
            let _ = writeln!(
                svg,
                r##"<rect class="cell" data-row="{i}" data-col="{j}" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="#d0d0d0" stroke-width="0.5"/>"##,
                diverging_color(v)
            );
            if n <= MAX_LABELLED {
                let ink = if v.abs() > 0.6 { "#ffffff" } else { "#000000" };
                let _ = writeln!(
                    svg,
                    r##"<text x="{}" y="{}" text-anchor="middle" dominant-baseline="central" font-size="9" fill="{ink}">{v:.2}</text>"##,
                    x + CELL / 2,
                    y + CELL / 2
                );
            }
        }
    }
    for (k, name) in c.names().iter().enumerate() {
        let name = escape(name);
        let centre = margin + k * CELL + CELL / 2;
        let _ = writeln!(
            svg,
            r##"<text class="row-label" x="{}" y="{centre}" text-anchor="end" dominant-baseline="central">{name}</text>"##,
            margin - PAD / 2
        );
        let _ = writeln!(
            svg,
            r##"<text class="col-label" x="{centre}" y="{}" text-anchor="start" dominant-baseline="central" transform="rotate(-90 {centre} {})">{name}</text>"##,
            margin - PAD / 2,
            margin - PAD / 2
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_heatmap(c: &CorrelationMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_heatmap(c)).map_err(|e| Error::io(path, e))
}
