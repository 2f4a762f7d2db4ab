//! Binding a design to one data row: linear scales, color assignment, and
//! mark placement inside the glyph cell.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::data::{Column, DataTable, Designation, SetKind, ValueKind};
use crate::geometry::{anchor_points, mark_outline, wave_polyline, Bounds, Path, Point};
use crate::palette::{PaletteConfig, Property, ShapeClass};
use crate::sampler::GlyphDesign;

/// Mark reference width as a fraction of the glyph cell. Channel ranges
/// expressed as "fraction of glyph width" are fractions of this unit.
pub const MARK_UNIT: f64 = 0.4;
/// Scaffold radius as a fraction of the glyph cell.
pub const SCAFFOLD_RADIUS: f64 = 0.3;
/// Pip radius relative to the polygon's drawn size.
pub const PIP_RATIO: f64 = 0.09;
/// Pip radius on waves, relative to the mark unit.
pub const WAVE_PIP: f64 = 0.04;
/// Wave stroke width relative to the mark unit.
pub const WAVE_STROKE: f64 = 0.035;
/// Fill used when no color channel applies to a mark.
pub const NEUTRAL_FILL: &str = "#999999";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantScale {
    pub domain: (f64, f64),
    pub range: (f64, f64),
}

impl QuantScale {
    pub fn new(domain: (f64, f64), range: (f64, f64)) -> Self {
        QuantScale { domain, range }
    }

    pub fn apply(&self, x: f64) -> f64 {
        quant_scale(self.domain, self.range, x)
    }
}

/// Linear map from `domain` onto `range`, clamped; a degenerate domain maps
/// to the range midpoint.
pub fn quant_scale(domain: (f64, f64), range: (f64, f64), x: f64) -> f64 {
    let (d0, d1) = domain;
    let (r0, r1) = range;
    if d1 <= d0 {
        return 0.5 * (r0 + r1);
    }
    let t = ((x - d0) / (d1 - d0)).clamp(0.0, 1.0);
    if t == 1.0 {
        return r1;
    }
    r0 + t * (r1 - r0)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColorKey {
    Category { column: String, value: String },
    RepeatColumn { column: String },
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("needs {required} colors, palette provides {available}")]
pub struct ColorBudgetExceeded {
    pub required: usize,
    pub available: usize,
}

/// Injective assignment of palette color indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ColorAssignment {
    entries: Vec<(ColorKey, usize)>,
}

impl ColorAssignment {
    pub fn entries(&self) -> &[(ColorKey, usize)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &ColorKey) -> Option<usize> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, c)| *c)
    }

    pub fn repeat_color(&self, column: &str) -> Option<usize> {
        self.get(&ColorKey::RepeatColumn { column: column.to_owned() })
    }

    pub fn category_color(&self, column: &str, value: &str) -> Option<usize> {
        self.get(&ColorKey::Category { column: column.to_owned(), value: value.to_owned() })
    }

    /// Indices for each category of `column` in first-appearance order.
    pub fn category_colors(&self, name: &str, column: &Column) -> Vec<usize> {
        column
            .categories()
            .into_iter()
            .filter_map(|v| self.category_color(name, v))
            .collect()
    }
}

/// Colors in first-appearance order: categorical values by designation
/// column order then row order, then repeat columns by set order.
pub fn assign_colors(
    d: &Designation,
    t: &DataTable,
    p: &PaletteConfig,
) -> Result<ColorAssignment, ColorBudgetExceeded> {
    let mut entries = Vec::new();
    for set in d.sets.iter().filter(|s| s.designation != SetKind::Repeat) {
        for name in &set.columns {
            let Some(col) = t.column(name) else { continue };
            if col.kind == ValueKind::Categorical {
                for value in col.categories() {
                    entries.push(ColorKey::Category { column: name.clone(), value: value.to_owned() });
                }
            }
        }
    }
    for set in d.sets.iter().filter(|s| s.designation == SetKind::Repeat) {
        for name in &set.columns {
            entries.push(ColorKey::RepeatColumn { column: name.clone() });
        }
    }
    let budget = crate::data::color_budget(d, t, p);
    if entries.len() > budget.available {
        return Err(ColorBudgetExceeded { required: entries.len(), available: budget.available });
    }
    Ok(ColorAssignment { entries: entries.into_iter().enumerate().map(|(i, k)| (k, i)).collect() })
}

fn serialize_path<S: Serializer>(path: &Path, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&path.to_svg_data())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveParams {
    pub frequency: f64,
    pub amplitude: f64,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pip {
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendValue {
    pub column: String,
    pub channel: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedMark {
    pub set_index: usize,
    pub shape: String,
    pub class: ShapeClass,
    pub repeat: bool,
    pub position: Point,
    pub fill_color: String,
    pub alpha: f64,
    pub size: f64,
    pub rotation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wave_params: Option<WaveParams>,
    /// Outline (polygons) or centerline (waves) in glyph-local pixels.
    #[serde(serialize_with = "serialize_path")]
    pub geometry: Path,
    pub stroke_width: f64,
    pub pip: Pip,
    pub legend_entries: Vec<LegendValue>,
}

impl ResolvedMark {
    pub fn bounds(&self) -> Bounds {
        let half = 0.5 * self.stroke_width;
        let mut b = self.geometry.bounds();
        b.min = b.min - Point::new(half, half);
        b.max = b.max + Point::new(half, half);
        let r = self.pip.radius;
        b.union(Bounds {
            min: self.pip.center - Point::new(r, r),
            max: self.pip.center + Point::new(r, r),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedGlyph {
    pub design_id: String,
    pub row_key: String,
    pub size: f64,
    pub mark_unit: f64,
    #[serde(serialize_with = "serialize_path")]
    pub scaffold_geometry: Path,
    pub scaffold_stroke: f64,
    pub marks: Vec<ResolvedMark>,
}

impl ResolvedGlyph {
    /// Bounds of everything drawn, strokes included.
    pub fn bounds(&self) -> Bounds {
        let half = 0.5 * self.scaffold_stroke;
        let mut b = self.scaffold_geometry.bounds();
        b.min = b.min - Point::new(half, half);
        b.max = b.max + Point::new(half, half);
        self.marks.iter().fold(b, |acc, m| acc.union(m.bounds()))
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ResolveError {
    #[error("row {row} has no value for `{column}`")]
    MissingValue { row: usize, column: String },
    #[error("row {0} is out of range")]
    RowOutOfRange(usize),
    #[error("glyph size must be positive")]
    NonPositiveSize,
    #[error("design does not match inputs: {0}")]
    Mismatch(String),
}

/// Per-design state shared by every row: scales, colors, anchors.
pub struct DesignBinding<'a> {
    design: &'a GlyphDesign,
    table: &'a DataTable,
    palette: &'a PaletteConfig,
    colors: ColorAssignment,
    domains: BTreeMap<String, (f64, f64)>,
    anchors: Vec<Point>,
    scaffold: Path,
}

fn channel_range(p: &PaletteConfig, property: Property, id: Option<&str>) -> (f64, f64) {
    id.and_then(|id| p.channel(id))
        .and_then(|c| c.range)
        .or_else(|| {
            p.channels
                .iter()
                .find(|c| c.property == property)
                .and_then(|c| c.range)
        })
        .or_else(|| property.default_range())
        .unwrap_or((0.0, 1.0))
}

fn mid(range: (f64, f64)) -> f64 {
    0.5 * (range.0 + range.1)
}

impl<'a> DesignBinding<'a> {
    pub fn new(
        design: &'a GlyphDesign,
        table: &'a DataTable,
        palette: &'a PaletteConfig,
    ) -> Result<Self, ResolveError> {
        let d = &design.designation;
        let colors = assign_colors(d, table, palette).map_err(|e| ResolveError::Mismatch(e.to_string()))?;
        let mut domains = BTreeMap::new();
        for set in &d.sets {
            let mut set_domain: Option<(f64, f64)> = None;
            for name in &set.columns {
                let col = table
                    .column(name)
                    .ok_or_else(|| ResolveError::Mismatch(format!("unknown column {name}")))?;
                if col.kind != ValueKind::Quantitative {
                    continue;
                }
                let dom = col.domain().unwrap_or((0.0, 0.0));
                if set.designation == SetKind::Repeat {
                    set_domain = Some(match set_domain {
                        None => dom,
                        Some((lo, hi)) => (lo.min(dom.0), hi.max(dom.1)),
                    });
                } else {
                    domains.insert(name.clone(), dom);
                }
            }
            if let Some(shared) = set_domain {
                for name in &set.columns {
                    domains.insert(name.clone(), shared);
                }
            }
        }
        let scaffold_spec = palette
            .scaffold(&design.scaffold)
            .ok_or_else(|| ResolveError::Mismatch(format!("unknown scaffold {}", design.scaffold)))?;
        let gravity = palette
            .gravity(design.gravity)
            .ok_or_else(|| ResolveError::Mismatch(format!("unknown gravity {:?}", design.gravity)))?;
        let scaffold = scaffold_spec.path();
        let anchors = anchor_points(&scaffold, d.mark_count(), gravity, scaffold_spec.centroid).points;
        Ok(DesignBinding { design, table, palette, colors, domains, anchors, scaffold })
    }

    pub fn colors(&self) -> &ColorAssignment {
        &self.colors
    }

    pub fn domain(&self, column: &str) -> Option<(f64, f64)> {
        self.domains.get(column).copied()
    }

    /// Resolves row `row` at a cell size of `glyph_size` pixels.
    pub fn resolve(&self, row: usize, glyph_size: f64) -> Result<ResolvedGlyph, ResolveError> {
        if !(glyph_size > 0.0) {
            return Err(ResolveError::NonPositiveSize);
        }
        if row >= self.table.row_count() {
            return Err(ResolveError::RowOutOfRange(row));
        }
        let p = self.palette;
        let cell_center = Point::new(0.5 * glyph_size, 0.5 * glyph_size);
        let scaffold_scale = SCAFFOLD_RADIUS * glyph_size;
        let unit = MARK_UNIT * glyph_size;
        let to_cell = |q: Point| cell_center + q * scaffold_scale;

        let mut marks = Vec::new();
        let mut anchor = 0;
        for mark in &self.design.marks {
            let shape = p
                .shape(&mark.shape)
                .ok_or_else(|| ResolveError::Mismatch(format!("unknown shape {}", mark.shape)))?;
            // Repeat marks yield one resolved mark per member column.
            let groups: Vec<Vec<&crate::sampler::ChannelAssignment>> = if mark.repeat {
                mark.channels.iter().map(|c| vec![c]).collect()
            } else {
                vec![mark.channels.iter().collect()]
            };
            for group in groups {
                let mut fill = NEUTRAL_FILL.to_owned();
                let mut alpha = 1.0;
                let mut size = mid(channel_range(p, Property::Size, None));
                let mut rotation = 0.0;
                let mut frequency = mid(channel_range(p, Property::Frequency, None));
                let mut amplitude = mid(channel_range(p, Property::Amplitude, None));
                let mut length = mid(channel_range(p, Property::Length, None));
                let mut legend = Vec::new();
                for ca in group {
                    let spec = p
                        .channel(&ca.channel)
                        .ok_or_else(|| ResolveError::Mismatch(format!("unknown channel {}", ca.channel)))?;
                    let col = self
                        .table
                        .column(&ca.column)
                        .ok_or_else(|| ResolveError::Mismatch(format!("unknown column {}", ca.column)))?;
                    if col.is_missing(row) {
                        return Err(ResolveError::MissingValue { row, column: ca.column.clone() });
                    }
                    let raw = col.raw(row).to_owned();
                    let mut swatch = None;
                    if mark.repeat {
                        let idx = self.colors.repeat_color(&ca.column).ok_or_else(|| {
                            ResolveError::Mismatch(format!("no color for {}", ca.column))
                        })?;
                        fill = p.colors[idx].clone();
                        swatch = Some(fill.clone());
                    }
                    match spec.property {
                        Property::Color => {
                            let idx = self.colors.category_color(&ca.column, &raw).ok_or_else(|| {
                                ResolveError::Mismatch(format!("no color for {}={raw}", ca.column))
                            })?;
                            fill = p.colors[idx].clone();
                            swatch = Some(fill.clone());
                        }
                        property => {
                            let x = col
                                .number(row)
                                .ok_or_else(|| ResolveError::MissingValue { row, column: ca.column.clone() })?;
                            let domain = self.domains.get(&ca.column).copied().unwrap_or((x, x));
                            let v = quant_scale(domain, channel_range(p, property, Some(&spec.id)), x);
                            match property {
                                Property::Alpha => alpha = v,
                                Property::Size => size = v,
                                Property::Rotation => rotation = v,
                                Property::Frequency => frequency = v,
                                Property::Amplitude => amplitude = v,
                                Property::Length => length = v,
                                Property::Color => unreachable!(),
                            }
                        }
                    }
                    legend.push(LegendValue {
                        column: ca.column.clone(),
                        channel: ca.channel.clone(),
                        value: raw,
                        color: swatch,
                    });
                }

                let position = to_cell(self.anchors[anchor]);
                anchor += 1;
                let (geometry, pip, wave_params, stroke_width) = match shape.class {
                    ShapeClass::Polygon => {
                        let outline = mark_outline(shape, size, rotation, unit)
                            .map_err(|e| ResolveError::Mismatch(e.to_string()))?;
                        let pip = Pip { center: position + outline.pip, radius: PIP_RATIO * size * unit };
                        (outline.path.transformed(1.0, 0.0, position), pip, None, 0.0)
                    }
                    ShapeClass::Wave => {
                        let local = wave_polyline(frequency, amplitude, length, rotation, unit);
                        let end = match &local {
                            Path::Polyline { points, .. } => *points.last().expect("sampled"),
                            _ => Point::ORIGIN,
                        };
                        let pip = Pip { center: position + end, radius: WAVE_PIP * unit };
                        let params = WaveParams { frequency, amplitude, length };
                        (local.transformed(1.0, 0.0, position), pip, Some(params), WAVE_STROKE * unit)
                    }
                };
                marks.push(ResolvedMark {
                    set_index: mark.set_index,
                    shape: shape.id.clone(),
                    class: shape.class,
                    repeat: mark.repeat,
                    position,
                    fill_color: fill,
                    alpha,
                    size,
                    rotation,
                    wave_params,
                    geometry,
                    stroke_width,
                    pip,
                    legend_entries: legend,
                });
            }
        }
        Ok(ResolvedGlyph {
            design_id: self.design.id.clone(),
            row_key: self.table.key(row).to_owned(),
            size: glyph_size,
            mark_unit: unit,
            scaffold_geometry: self.scaffold.transformed(scaffold_scale, 0.0, cell_center),
            scaffold_stroke: 0.008 * glyph_size,
            marks,
        })
    }
}

/// Resolves one row of `t` under design `g`.
pub fn resolve(
    g: &GlyphDesign,
    row: usize,
    t: &DataTable,
    p: &PaletteConfig,
    glyph_size: f64,
) -> Result<ResolvedGlyph, ResolveError> {
    DesignBinding::new(g, t, p)?.resolve(row, glyph_size)
}
