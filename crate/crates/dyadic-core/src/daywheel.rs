//! Daywheel figures: a measure tree rendered as concentric rings of SVG
//! annular sectors, one ring per scale.
//!
//! The center disc shows the scale-0 product coefficient; ring `i` is split
//! into `2^i` equal sectors, each spanning the angular interval its path
//! occupies on the unit circle (the dyadic interval of the path scaled to
//! 360 degrees), so every sector sits inside its parent's span. Coefficient
//! `v` colors a sector by exact convex interpolation between red `(1,0,0)`
//! at `v = +1`, purple `(1,0,1)` at `v = 0`, and blue `(0,0,1)` at
//! `v = -1`; nodes with no mass are green, and green is never produced by
//! the interpolation.

use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::measure::{unit_interval_embedding, DyadicMeasureTree, DyadicPath};
use crate::ratio::{rat, Rational};

/// Pole and background colors of the wheel, as RGB bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    /// Zero-mass nodes ("sea of green").
    pub empty: [u8; 3],
    /// Coefficient +1.
    pub pos_pole: [u8; 3],
    /// Coefficient 0.
    pub mid: [u8; 3],
    /// Coefficient −1.
    pub neg_pole: [u8; 3],
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            empty: [0, 128, 0],
            pos_pole: [255, 0, 0],
            mid: [255, 0, 255],
            neg_pole: [0, 0, 255],
        }
    }
}

/// Rendering parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DaywheelSpec {
    /// Rings to draw; ring `i` holds the level-`i` nodes.
    pub levels: usize,
    /// Outer radius of the wheel in pixels.
    pub radius_px: f64,
    pub palette: Palette,
}

impl Default for DaywheelSpec {
    fn default() -> Self {
        DaywheelSpec { levels: 12, radius_px: 360.0, palette: Palette::default() }
    }
}

/// Errors from daywheel rendering.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DaywheelError {
    #[error("levels must be at least 1")]
    LevelsZero,
    #[error("levels {levels} exceed the tree's maxscale {maxscale}")]
    LevelsOutOfRange { levels: usize, maxscale: usize },
    #[error("coefficient {value} outside [-1, 1]")]
    CoefficientOutOfRange { value: String },
}

/// The color of coefficient `v`: convex interpolation from the mid color
/// toward the matching pole, each channel computed as an exact rational and
/// rounded half-up to a byte. `v = 0` gives the mid color and `v = ±1` the
/// poles exactly.
pub fn coefficient_color(v: &Rational, palette: &Palette) -> Result<[u8; 3], DaywheelError> {
    let t = v.abs();
    if t > rat(1, 1) {
        return Err(DaywheelError::CoefficientOutOfRange { value: v.to_string() });
    }
    let pole = if v.is_negative() { &palette.neg_pole } else { &palette.pos_pole };
    let mut rgb = [0u8; 3];
    for (c, out) in rgb.iter_mut().enumerate() {
        let mid = i64::from(palette.mid[c]);
        let target = i64::from(pole[c]);
        let channel = rat(mid, 1) + &t * rat(target - mid, 1);
        // Round half up; convex combinations of bytes stay in 0..=255.
        let byte = (channel + rat(1, 2)).floor().to_integer();
        *out = byte.to_u8().expect("interpolated channel fits a byte");
    }
    Ok(rgb)
}

fn hex(rgb: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2])
}

/// A point on the circle of radius `r` around `(cx, cy)` at `frac` of a
/// full turn, starting at twelve o'clock and increasing counterclockwise —
/// so the `[0, 1/2)` half (the 0-child side) fills the left half of the
/// wheel and the `[1/2, 1)` half the right.
fn clock_point(cx: f64, cy: f64, r: f64, frac: f64) -> (f64, f64) {
    let theta = std::f64::consts::TAU * frac;
    (cx - r * theta.sin(), cy - r * theta.cos())
}

fn fmt_coord(x: f64) -> String {
    format!("{x:.4}")
}

/// The `d` attribute of an annular sector between radii `r0 < r1` spanning
/// the angle fractions `[f0, f1]`.
fn sector_path(cx: f64, cy: f64, r0: f64, r1: f64, f0: f64, f1: f64) -> String {
    let large = if (f1 - f0) > 0.5 { 1 } else { 0 };
    let (x0, y0) = clock_point(cx, cy, r1, f0);
    let (x1, y1) = clock_point(cx, cy, r1, f1);
    let (x2, y2) = clock_point(cx, cy, r0, f1);
    let (x3, y3) = clock_point(cx, cy, r0, f0);
    // Counterclockwise on screen = SVG sweep flag 0 on the outer arc.
    format!(
        "M {} {} A {} {} 0 {large} 0 {} {} L {} {} A {} {} 0 {large} 1 {} {} Z",
        fmt_coord(x0),
        fmt_coord(y0),
        fmt_coord(r1),
        fmt_coord(r1),
        fmt_coord(x1),
        fmt_coord(y1),
        fmt_coord(x2),
        fmt_coord(y2),
        fmt_coord(r0),
        fmt_coord(r0),
        fmt_coord(x3),
        fmt_coord(y3),
    )
}

/// A full disc of radius `r` as a path (two half-turn arcs).
fn disc_path(cx: f64, cy: f64, r: f64) -> String {
    let (x0, y0) = clock_point(cx, cy, r, 0.0);
    let (x1, y1) = clock_point(cx, cy, r, 0.5);
    format!(
        "M {} {} A {} {} 0 1 1 {} {} A {} {} 0 1 1 {} {} Z",
        fmt_coord(x0),
        fmt_coord(y0),
        fmt_coord(r),
        fmt_coord(r),
        fmt_coord(x1),
        fmt_coord(y1),
        fmt_coord(r),
        fmt_coord(r),
        fmt_coord(x0),
        fmt_coord(y0),
    )
}

/// Render the daywheel of a tree: one `<path>` for the center disc plus one
/// per sector of each ring `1..=levels`, colored by the node coefficients.
pub fn render_daywheel(
    tree: &DyadicMeasureTree,
    spec: &DaywheelSpec,
) -> Result<String, DaywheelError> {
    if spec.levels == 0 {
        return Err(DaywheelError::LevelsZero);
    }
    if spec.levels > tree.maxscale() {
        return Err(DaywheelError::LevelsOutOfRange {
            levels: spec.levels,
            maxscale: tree.maxscale(),
        });
    }
    let margin = 1.0;
    let size = 2.0 * (spec.radius_px + margin);
    let c = spec.radius_px + margin;
    let ring_width = spec.radius_px / (spec.levels as f64 + 1.0);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{w}\" viewBox=\"0 0 {w} {w}\">\n",
        w = fmt_coord(size)
    ));
    let node_fill = |path: &DyadicPath| -> Result<String, DaywheelError> {
        if tree.nodes().contains_key(path) {
            Ok(hex(coefficient_color(&tree.coeff(path), &spec.palette)?))
        } else {
            Ok(hex(spec.palette.empty))
        }
    };
    svg.push_str(&format!(
        "  <path d=\"{}\" fill=\"{}\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>\n",
        disc_path(c, c, ring_width),
        node_fill(&DyadicPath::root())?
    ));
    for level in 1..=spec.levels {
        let r0 = ring_width * level as f64;
        let r1 = ring_width * (level + 1) as f64;
        for k in 0u64..(1u64 << level) {
            let bits: Vec<u8> = (0..level).map(|b| (k >> (level - 1 - b) & 1) as u8).collect();
            let path = DyadicPath::from_bits(&bits).expect("generated bits are a valid path");
            let (num, den) = unit_interval_embedding(&path);
            let f0 = num.to_f64().expect("small dyadic numerator")
                / den.to_f64().expect("small dyadic denominator");
            let f1 = f0 + 1.0 / den.to_f64().expect("small dyadic denominator");
            svg.push_str(&format!(
                "  <path d=\"{}\" fill=\"{}\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>\n",
                sector_path(c, c, r0, r1, f0, f1),
                node_fill(&path)?
            ));
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
