//! Deterministic SVG output for glyphs, sheets, and on-demand legends.
//!
//! Sheet chrome is fixed: an 8 px gutter around and between cells, a 28 px
//! title band, and a 16 px caption band under each cell with 11 px
//! sans-serif captions. Every coordinate is written with four decimals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::DataTable;
use crate::geometry::{fmt4, Bounds, Path, Point};
use crate::palette::{PaletteConfig, ShapeClass};
use crate::sampler::GlyphDesign;
use crate::scales::{DesignBinding, ResolveError, ResolvedGlyph};

pub const GUTTER: f64 = 8.0;
pub const TITLE_BAND: f64 = 28.0;
pub const CAPTION_BAND: f64 = 16.0;
const SCAFFOLD_COLOR: &str = "#d0d0d0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutMode {
    SmallMultiples,
    SmallPermutables,
    Custom,
}

/// Free placement for one glyph; `position` is the cell's top-left corner.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GlyphOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetLayout {
    pub mode: LayoutMode,
    pub columns: usize,
    pub cell_size: f64,
    #[serde(default)]
    pub overrides: BTreeMap<String, GlyphOverride>,
}

impl SheetLayout {
    pub fn grid(mode: LayoutMode, columns: usize, cell_size: f64) -> Self {
        SheetLayout { mode, columns: columns.max(1), cell_size, overrides: BTreeMap::new() }
    }

    fn cell_origin(&self, index: usize) -> Point {
        let col = index % self.columns;
        let row = index / self.columns;
        Point::new(
            GUTTER + col as f64 * (self.cell_size + GUTTER),
            TITLE_BAND + row as f64 * (self.cell_size + CAPTION_BAND + GUTTER),
        )
    }

    /// Origin and size of item `index`, honoring overrides in custom mode.
    pub fn place(&self, index: usize, key: &str) -> (Point, f64) {
        let mut origin = self.cell_origin(index);
        let mut size = self.cell_size;
        if self.mode == LayoutMode::Custom {
            if let Some(o) = self.overrides.get(key) {
                origin = o.position.unwrap_or(origin);
                size = o.size.unwrap_or(size);
            }
        }
        (origin, size)
    }
}

/// Identifier of one drawn glyph: `{design_id}:{row_key}`.
pub fn glyph_key(design_id: &str, row_key: &str) -> String {
    format!("{design_id}:{row_key}")
}

pub fn split_glyph_key(key: &str) -> Option<(&str, &str)> {
    key.split_once(':')
}

pub fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(ch),
        }
    }
    out
}

fn polyline_points(path: &Path) -> String {
    path.sample_points()
        .iter()
        .map(|p| format!("{},{}", fmt4(p.x), fmt4(p.y)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Scaffold, then marks in set order, then pips on top.
pub fn glyph_body(rg: &ResolvedGlyph) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<path class="scaffold" d="{}" fill="none" stroke="{SCAFFOLD_COLOR}" stroke-width="{}"/>"#,
        rg.scaffold_geometry.to_svg_data(),
        fmt4(rg.scaffold_stroke)
    );
    for m in &rg.marks {
        match m.class {
            ShapeClass::Polygon => {
                let _ = writeln!(
                    out,
                    r#"<path class="mark polygon" data-shape="{}" data-set="{}" d="{}" fill="{}" fill-opacity="{}"/>"#,
                    escape_xml(&m.shape),
                    m.set_index,
                    m.geometry.to_svg_data(),
                    m.fill_color,
                    fmt4(m.alpha)
                );
            }
            ShapeClass::Wave => {
                let _ = writeln!(
                    out,
                    r#"<polyline class="mark wave" data-shape="{}" data-set="{}" points="{}" fill="none" stroke="{}" stroke-opacity="{}" stroke-width="{}" stroke-linecap="round"/>"#,
                    escape_xml(&m.shape),
                    m.set_index,
                    polyline_points(&m.geometry),
                    m.fill_color,
                    fmt4(m.alpha),
                    fmt4(m.stroke_width)
                );
            }
        }
    }
    for m in &rg.marks {
        let _ = writeln!(
            out,
            r##"<circle class="pip" cx="{}" cy="{}" r="{}" fill="#ffffff"/>"##,
            fmt4(m.pip.center.x),
            fmt4(m.pip.center.y),
            fmt4(m.pip.radius)
        );
    }
    out
}

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = fmt4(width),
        h = fmt4(height)
    )
}

/// Standalone SVG document for one glyph.
pub fn render_glyph(rg: &ResolvedGlyph) -> String {
    let mut out = svg_open(rg.size, rg.size);
    out.push_str(&glyph_body(rg));
    out.push_str("</svg>\n");
    out
}

struct Cell {
    key: String,
    caption: String,
    origin: Point,
    size: f64,
    glyph: Option<ResolvedGlyph>,
}

fn render_sheet(title: &str, cells: &[Cell]) -> String {
    let mut body = String::new();
    let mut extent = Point::new(GUTTER, TITLE_BAND);
    for cell in cells {
        let class = if cell.glyph.is_some() { "cell" } else { "cell excluded" };
        let _ = writeln!(
            body,
            r#"<g class="{class}" data-glyph-key="{}" transform="translate({},{})">"#,
            escape_xml(&cell.key),
            fmt4(cell.origin.x),
            fmt4(cell.origin.y)
        );
        if let Some(rg) = &cell.glyph {
            body.push_str(&glyph_body(rg));
        }
        let _ = writeln!(
            body,
            r##"<text class="caption" x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11" fill="#333333">{}</text>"##,
            fmt4(0.5 * cell.size),
            fmt4(cell.size + 12.0),
            escape_xml(&cell.caption)
        );
        body.push_str("</g>\n");
        extent.x = extent.x.max(cell.origin.x + cell.size + GUTTER);
        extent.y = extent.y.max(cell.origin.y + cell.size + CAPTION_BAND + GUTTER);
    }
    let mut out = svg_open(extent.x, extent.y);
    let _ = writeln!(
        out,
        r##"<text class="sheet-title" x="{}" y="18" font-family="sans-serif" font-size="13" fill="#222222">{}</text>"##,
        fmt4(GUTTER),
        escape_xml(title)
    );
    out.push_str(&body);
    out.push_str("</svg>\n");
    out
}

fn build_cell(
    binding: &DesignBinding<'_>,
    g: &GlyphDesign,
    t: &DataTable,
    row: usize,
    index: usize,
    caption: String,
    layout: &SheetLayout,
) -> Result<Cell, ResolveError> {
    let key = glyph_key(&g.id, t.key(row));
    let (origin, size) = layout.place(index, &key);
    let glyph = if t.row_excluded(&g.designation, row) {
        None
    } else {
        Some(binding.resolve(row, size)?)
    };
    Ok(Cell { key, caption, origin, size, glyph })
}

/// One cell per table row, all drawn with design `g`. Rows missing an
/// in-scope value get an empty `cell excluded` placeholder.
pub fn render_small_multiples(
    g: &GlyphDesign,
    t: &DataTable,
    p: &PaletteConfig,
    layout: &SheetLayout,
) -> Result<String, ResolveError> {
    let binding = DesignBinding::new(g, t, p)?;
    let cells = (0..t.row_count())
        .map(|row| build_cell(&binding, g, t, row, row, t.key(row).to_owned(), layout))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(render_sheet(&g.id, &cells))
}

/// One cell per design, all showing row `row`.
pub fn render_small_permutables(
    gs: &[GlyphDesign],
    t: &DataTable,
    p: &PaletteConfig,
    row: usize,
    layout: &SheetLayout,
) -> Result<String, ResolveError> {
    if row >= t.row_count() {
        return Err(ResolveError::RowOutOfRange(row));
    }
    let cells = gs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let binding = DesignBinding::new(g, t, p)?;
            build_cell(&binding, g, t, row, i, g.id.clone(), layout)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(render_sheet(t.key(row), &cells))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendMarkEntry {
    pub set_index: usize,
    pub shape: String,
    pub columns: Vec<String>,
    pub channels: Vec<String>,
    pub values: Vec<String>,
    pub colors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendModel {
    pub design_id: String,
    pub row_key: String,
    pub entries: Vec<LegendMarkEntry>,
}

/// One entry per drawn mark, listing what each of its channels encodes.
pub fn legend(rg: &ResolvedGlyph) -> LegendModel {
    let entries = rg
        .marks
        .iter()
        .map(|m| LegendMarkEntry {
            set_index: m.set_index,
            shape: m.shape.clone(),
            columns: m.legend_entries.iter().map(|e| e.column.clone()).collect(),
            channels: m.legend_entries.iter().map(|e| e.channel.clone()).collect(),
            values: m.legend_entries.iter().map(|e| e.value.clone()).collect(),
            colors: m.legend_entries.iter().filter_map(|e| e.color.clone()).collect(),
        })
        .collect();
    LegendModel { design_id: rg.design_id.clone(), row_key: rg.row_key.clone(), entries }
}

/// Bounding box of a glyph's drawing in sheet coordinates.
pub fn placed_bounds(rg: &ResolvedGlyph, origin: Point) -> Bounds {
    let b = rg.bounds();
    Bounds { min: b.min + origin, max: b.max + origin }
}
