//! Mark-shape, encoding-channel, and scaffold palettes.
//!
//! The default palette carries eight polygons and one sine wave, one
//! categorical channel (`color`), three polygon channels (`alpha`, `size`,
//! `rotation`) and three wave channels (`frequency`, `amplitude`, `length`),
//! two linear and six polygon scaffolds, and three gravity levels.
//!
//! Designer palettes load from JSON:
//!
//! ```json
//! { "shapes":    [{"id": "circle", "class": "polygon", "symmetric": true}],
//!   "channels":  [{"id": "size", "value_kind": "quantitative", "applies_to": "polygon", "range": [0.2, 0.5]}],
//!   "scaffolds": [{"id": "circle", "class": "polygon"}],
//!   "gravities": [{"id": "weak", "pull": 0.15}],
//!   "colors":    ["#1f77b4"] }
//! ```
//!
//! A `path` (SVG path data) defines a custom shape or scaffold; without one
//! the id must name a built-in.

use std::collections::HashSet;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::data::ValueKind;
use crate::geometry::{
    is_simple_polygon, polygon_area, polygon_centroid, regular_polygon, star_points, Bounds,
    Path, Point, Spiral,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeClass {
    Polygon,
    Wave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AppliesTo {
    Polygon,
    Wave,
    Both,
}

impl AppliesTo {
    pub fn includes(self, class: ShapeClass) -> bool {
        matches!(
            (self, class),
            (AppliesTo::Both, _)
                | (AppliesTo::Polygon, ShapeClass::Polygon)
                | (AppliesTo::Wave, ShapeClass::Wave)
        )
    }
}

/// The visual property a channel drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    Color,
    Alpha,
    Size,
    Rotation,
    Frequency,
    Amplitude,
    Length,
}

impl Property {
    pub fn from_id(id: &str) -> Option<Property> {
        Some(match id {
            "color" => Property::Color,
            "alpha" => Property::Alpha,
            "size" => Property::Size,
            "rotation" => Property::Rotation,
            "frequency" => Property::Frequency,
            "amplitude" => Property::Amplitude,
            "length" => Property::Length,
            _ => return None,
        })
    }

    /// Output range used when a palette file omits one.
    pub fn default_range(self) -> Option<(f64, f64)> {
        match self {
            Property::Color => None,
            Property::Alpha => Some((0.25, 1.0)),
            Property::Size => Some((0.18, 0.55)),
            Property::Rotation => Some((0.0, 300.0)),
            Property::Frequency => Some((1.0, 6.0)),
            Property::Amplitude => Some((0.05, 0.22)),
            Property::Length => Some((0.25, 0.9)),
        }
    }
}

/// Unit-box outline of a polygon-class shape.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeOutline {
    Circle { radius: f64 },
    Polygon(Vec<Point>),
}

impl ShapeOutline {
    pub fn centroid(&self) -> Point {
        match self {
            ShapeOutline::Circle { .. } => Point::ORIGIN,
            ShapeOutline::Polygon(pts) => polygon_centroid(pts),
        }
    }

    /// Pip position: halfway from the centroid to the outline, due north.
    pub fn pip_anchor(&self) -> Point {
        let c = self.centroid();
        let reach = match self {
            ShapeOutline::Circle { radius } => *radius,
            ShapeOutline::Polygon(pts) => north_reach(c, pts).unwrap_or(0.0),
        };
        c + Point::new(0.0, -0.5 * reach)
    }

    pub fn bounds(&self) -> Bounds {
        match self {
            ShapeOutline::Circle { radius } => Bounds {
                min: Point::new(-radius, -radius),
                max: Point::new(*radius, *radius),
            },
            ShapeOutline::Polygon(pts) => Bounds::of(pts.iter().copied()).expect("non-empty"),
        }
    }
}

// Distance from `c` straight up to the first outline crossing.
fn north_reach(c: Point, pts: &[Point]) -> Option<f64> {
    let n = pts.len();
    (0..n)
        .filter_map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            if (a.x - c.x) * (b.x - c.x) > 0.0 || a.x == b.x {
                return None;
            }
            let t = (c.x - a.x) / (b.x - a.x);
            let y = a.y + t * (b.y - a.y);
            (y < c.y).then_some(c.y - y)
        })
        .min_by(f64::total_cmp)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeGeometry {
    Builtin,
    Custom(Vec<Point>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkShapeSpec {
    pub id: String,
    pub class: ShapeClass,
    pub geometry: ShapeGeometry,
    pub symmetric: bool,
}

impl MarkShapeSpec {
    /// Outline in the unit box, `None` for waves.
    pub fn outline(&self) -> Option<ShapeOutline> {
        if self.class == ShapeClass::Wave {
            return None;
        }
        match &self.geometry {
            ShapeGeometry::Custom(points) => Some(ShapeOutline::Polygon(points.clone())),
            ShapeGeometry::Builtin => builtin_outline(&self.id),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub id: String,
    pub property: Property,
    pub value_kind: ValueKind,
    pub applies_to: AppliesTo,
    /// Output range; `None` for categorical channels.
    pub range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaffoldClass {
    Linear,
    Polygon,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScaffoldGeometry {
    Builtin,
    Custom { points: Vec<Point>, closed: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaffoldSpec {
    pub id: String,
    pub class: ScaffoldClass,
    pub geometry: ScaffoldGeometry,
    pub centroid: Point,
}

impl ScaffoldSpec {
    /// Path in the scaffold box `[-1, 1]²`.
    pub fn path(&self) -> Path {
        match &self.geometry {
            ScaffoldGeometry::Custom { points, closed } => {
                Path::Polyline { points: points.clone(), closed: *closed }
            }
            ScaffoldGeometry::Builtin => builtin_scaffold(&self.id).expect("validated at load"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GravityId {
    Weak,
    Medium,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GravityLevel {
    pub id: GravityId,
    pub pull: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PaletteFile", into = "PaletteFile")]
pub struct PaletteConfig {
    pub mark_shapes: Vec<MarkShapeSpec>,
    pub channels: Vec<ChannelSpec>,
    pub scaffolds: Vec<ScaffoldSpec>,
    pub gravities: Vec<GravityLevel>,
    pub colors: Vec<String>,
}

impl PaletteConfig {
    pub fn shape(&self, id: &str) -> Option<&MarkShapeSpec> {
        self.mark_shapes.iter().find(|s| s.id == id)
    }

    pub fn channel(&self, id: &str) -> Option<&ChannelSpec> {
        self.channels.iter().find(|c| c.id == id)
    }

    pub fn scaffold(&self, id: &str) -> Option<&ScaffoldSpec> {
        self.scaffolds.iter().find(|s| s.id == id)
    }

    pub fn gravity(&self, id: GravityId) -> Option<&GravityLevel> {
        self.gravities.iter().find(|g| g.id == id)
    }

    /// Categorical channels, optionally restricted to those usable on `class`.
    pub fn categorical_channels(&self, class: Option<ShapeClass>) -> impl Iterator<Item = &ChannelSpec> {
        self.channels.iter().filter(move |c| {
            c.value_kind == ValueKind::Categorical && class.is_none_or(|k| c.applies_to.includes(k))
        })
    }

    pub fn quantitative_channels(&self, class: ShapeClass) -> impl Iterator<Item = &ChannelSpec> {
        self.channels
            .iter()
            .filter(move |c| c.value_kind == ValueKind::Quantitative && c.applies_to.includes(class))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("palette serializes")
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PaletteError {
    #[error("palette schema error at `{path}`: {message}")]
    SchemaError { path: String, message: String },
    #[error("degenerate path for `{0}`")]
    DegeneratePath(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> PaletteError {
    PaletteError::SchemaError { path: path.into(), message: message.into() }
}

/// Category10 ordering: blue, orange, green, red, purple, brown, pink,
/// grey, olive, cyan.
pub const DEFAULT_COLORS: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub const DEFAULT_SHAPES: [&str; 9] = [
    "circle", "square", "triangle", "hexagon", "star", "drop", "houndstooth", "diamond", "wave",
];

pub const DEFAULT_SCAFFOLDS: [&str; 8] =
    ["horizontal", "vertical", "circle", "triangle", "square", "pentagon", "hexagon", "spiral"];

pub fn default_palettes() -> PaletteConfig {
    let shape = |id: &str, class, symmetric| MarkShapeSpec {
        id: id.to_owned(),
        class,
        geometry: ShapeGeometry::Builtin,
        symmetric,
    };
    let mark_shapes = vec![
        shape("circle", ShapeClass::Polygon, true),
        shape("square", ShapeClass::Polygon, true),
        shape("triangle", ShapeClass::Polygon, true),
        shape("hexagon", ShapeClass::Polygon, true),
        shape("star", ShapeClass::Polygon, true),
        shape("drop", ShapeClass::Polygon, false),
        shape("houndstooth", ShapeClass::Polygon, false),
        shape("diamond", ShapeClass::Polygon, true),
        shape("wave", ShapeClass::Wave, false),
    ];
    let channel = |id: &str, applies_to| {
        let property = Property::from_id(id).expect("built-in channel");
        ChannelSpec {
            id: id.to_owned(),
            property,
            value_kind: if property == Property::Color {
                ValueKind::Categorical
            } else {
                ValueKind::Quantitative
            },
            applies_to,
            range: property.default_range(),
        }
    };
    let channels = vec![
        channel("color", AppliesTo::Both),
        channel("alpha", AppliesTo::Polygon),
        channel("size", AppliesTo::Polygon),
        channel("rotation", AppliesTo::Polygon),
        channel("frequency", AppliesTo::Wave),
        channel("amplitude", AppliesTo::Wave),
        channel("length", AppliesTo::Wave),
    ];
    let scaffolds = DEFAULT_SCAFFOLDS
        .iter()
        .map(|id| ScaffoldSpec {
            id: (*id).to_owned(),
            class: if matches!(*id, "horizontal" | "vertical") {
                ScaffoldClass::Linear
            } else {
                ScaffoldClass::Polygon
            },
            geometry: ScaffoldGeometry::Builtin,
            centroid: Point::ORIGIN,
        })
        .collect();
    let gravities = vec![
        GravityLevel { id: GravityId::Weak, pull: 0.15 },
        GravityLevel { id: GravityId::Medium, pull: 0.45 },
        GravityLevel { id: GravityId::Strong, pull: 0.80 },
    ];
    PaletteConfig {
        mark_shapes,
        channels,
        scaffolds,
        gravities,
        colors: DEFAULT_COLORS.iter().map(|c| (*c).to_owned()).collect(),
    }
}

/// Centers `points` on their bounding box and scales the larger side to
/// `extent`. Already-normalized input is returned unchanged.
fn normalize(points: Vec<Point>, extent: f64) -> Option<Vec<Point>> {
    let b = Bounds::of(points.iter().copied())?;
    let span = b.width().max(b.height());
    if !(span > 0.0) || !span.is_finite() {
        return None;
    }
    let c = b.center();
    if c.length() < 1e-12 && (span - extent).abs() < 1e-12 {
        return Some(points);
    }
    let k = extent / span;
    Some(points.into_iter().map(|p| (p - c) * k).collect())
}

fn builtin_outline(id: &str) -> Option<ShapeOutline> {
    let poly = |pts: Vec<Point>| ShapeOutline::Polygon(normalize(pts, 1.0).expect("built-in shape"));
    Some(match id {
        "circle" => ShapeOutline::Circle { radius: 0.5 },
        "square" => poly(vec![
            Point::new(-0.5, -0.5),
            Point::new(0.5, -0.5),
            Point::new(0.5, 0.5),
            Point::new(-0.5, 0.5),
        ]),
        "triangle" => poly(regular_polygon(3)),
        "hexagon" => poly(regular_polygon(6)),
        "star" => poly(star_points(0.42)),
        "diamond" => poly(vec![
            Point::new(0.0, -0.5),
            Point::new(0.32, 0.0),
            Point::new(0.0, 0.5),
            Point::new(-0.32, 0.0),
        ]),
        "drop" => poly(drop_points()),
        "houndstooth" => poly(
            [
                (1.0, 0.0),
                (2.0, 0.0),
                (2.0, 1.0),
                (3.0, 1.0),
                (4.0, 2.0),
                (3.0, 2.0),
                (3.0, 3.0),
                (2.0, 3.0),
                (2.0, 4.0),
                (1.0, 3.0),
                (1.0, 2.0),
                (0.0, 2.0),
                (1.0, 1.0),
            ]
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect(),
        ),
        _ => return None,
    })
}

// Teardrop: apex at north, round belly below.
fn drop_points() -> Vec<Point> {
    let radius = 0.3;
    let center = Point::new(0.0, 0.2);
    let apex = Point::new(0.0, -0.5);
    let d = apex.distance(center);
    // Angle (from north, clockwise) where the tangent from the apex meets the belly.
    let tangent = (radius / d).acos();
    let steps = 40;
    let mut pts = vec![apex];
    for i in 0..=steps {
        let a = tangent + (TAU - 2.0 * tangent) * i as f64 / steps as f64;
        pts.push(center + Point::new(a.sin(), -a.cos()) * radius);
    }
    pts
}

fn builtin_scaffold(id: &str) -> Option<Path> {
    Some(match id {
        "horizontal" => Path::open(vec![Point::new(-1.0, 0.0), Point::new(1.0, 0.0)]),
        "vertical" => Path::open(vec![Point::new(0.0, -1.0), Point::new(0.0, 1.0)]),
        "circle" => Path::circle(Point::ORIGIN, 1.0),
        "triangle" => Path::polygon(regular_polygon(3)),
        "square" => Path::polygon(regular_polygon(4)),
        "pentagon" => Path::polygon(regular_polygon(5)),
        "hexagon" => Path::polygon(regular_polygon(6)),
        "spiral" => Path::Spiral(Spiral::unit()),
        _ => return None,
    })
}

/// Flattens SVG path data into a single subpath; returns the points and
/// whether it was closed.
fn parse_path_data(data: &str) -> Option<(Vec<Point>, bool)> {
    use svgtypes::{SimplePathSegment as Seg, SimplifyingPathParser};
    const CURVE_STEPS: usize = 16;
    let mut points: Vec<Point> = Vec::new();
    let mut closed = false;
    let mut cursor = Point::ORIGIN;
    for seg in SimplifyingPathParser::from(data) {
        let seg = seg.ok()?;
        if closed {
            // Only one subpath is supported.
            return None;
        }
        match seg {
            Seg::MoveTo { x, y } => {
                if !points.is_empty() {
                    return None;
                }
                cursor = Point::new(x, y);
                points.push(cursor);
            }
            Seg::LineTo { x, y } => {
                cursor = Point::new(x, y);
                points.push(cursor);
            }
            Seg::CurveTo { x1, y1, x2, y2, x, y } => {
                let (p0, p1, p2, p3) = (cursor, Point::new(x1, y1), Point::new(x2, y2), Point::new(x, y));
                for i in 1..=CURVE_STEPS {
                    let t = i as f64 / CURVE_STEPS as f64;
                    let u = 1.0 - t;
                    points.push(
                        p0 * (u * u * u) + p1 * (3.0 * u * u * t) + p2 * (3.0 * u * t * t) + p3 * (t * t * t),
                    );
                }
                cursor = p3;
            }
            Seg::Quadratic { x1, y1, x, y } => {
                let (p0, p1, p2) = (cursor, Point::new(x1, y1), Point::new(x, y));
                for i in 1..=CURVE_STEPS {
                    let t = i as f64 / CURVE_STEPS as f64;
                    let u = 1.0 - t;
                    points.push(p0 * (u * u) + p1 * (2.0 * u * t) + p2 * (t * t));
                }
                cursor = p2;
            }
            Seg::ClosePath => closed = true,
        }
    }
    if closed && points.len() > 1 && points[0].distance(*points.last()?) < 1e-12 {
        points.pop();
    }
    points.dedup_by(|a, b| a.distance(*b) < 1e-12);
    (!points.is_empty()).then_some((points, closed))
}

fn points_to_path_data(points: &[Point], closed: bool) -> String {
    // Full precision keeps load(serialize(load(x))) exact.
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        d.push_str(if i == 0 { "M" } else { " L" });
        d.push_str(&format!("{} {}", p.x, p.y));
    }
    if closed {
        d.push_str(" Z");
    }
    d
}

// ---- file form -------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeEntry {
    id: String,
    class: ShapeClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    #[serde(default)]
    symmetric: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelEntry {
    id: String,
    value_kind: ValueKind,
    applies_to: AppliesTo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaffoldEntry {
    id: String,
    class: ScaffoldClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PaletteFile {
    shapes: Vec<ShapeEntry>,
    channels: Vec<ChannelEntry>,
    scaffolds: Vec<ScaffoldEntry>,
    gravities: Vec<GravityLevel>,
    colors: Vec<String>,
}

impl From<PaletteConfig> for PaletteFile {
    fn from(p: PaletteConfig) -> Self {
        PaletteFile {
            shapes: p
                .mark_shapes
                .into_iter()
                .map(|s| ShapeEntry {
                    path: match &s.geometry {
                        ShapeGeometry::Builtin => None,
                        ShapeGeometry::Custom(pts) => Some(points_to_path_data(pts, true)),
                    },
                    id: s.id,
                    class: s.class,
                    symmetric: s.symmetric,
                })
                .collect(),
            channels: p
                .channels
                .into_iter()
                .map(|c| ChannelEntry {
                    id: c.id,
                    value_kind: c.value_kind,
                    applies_to: c.applies_to,
                    range: c.range.map(|(lo, hi)| [lo, hi]),
                })
                .collect(),
            scaffolds: p
                .scaffolds
                .into_iter()
                .map(|s| ScaffoldEntry {
                    path: match &s.geometry {
                        ScaffoldGeometry::Builtin => None,
                        ScaffoldGeometry::Custom { points, closed } => {
                            Some(points_to_path_data(points, *closed))
                        }
                    },
                    id: s.id,
                    class: s.class,
                })
                .collect(),
            gravities: p.gravities,
            colors: p.colors,
        }
    }
}

fn check_unique<'a, I: Iterator<Item = &'a str>>(ids: I) -> Result<(), PaletteError> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(PaletteError::DuplicateId(id.to_owned()));
        }
    }
    Ok(())
}

fn valid_hex(c: &str) -> bool {
    let Some(hex) = c.strip_prefix('#') else { return false };
    matches!(hex.len(), 3 | 6) && hex.chars().all(|ch| ch.is_ascii_hexdigit())
}

impl TryFrom<PaletteFile> for PaletteConfig {
    type Error = PaletteError;

    fn try_from(file: PaletteFile) -> Result<Self, PaletteError> {
        check_unique(file.shapes.iter().map(|s| s.id.as_str()))?;
        check_unique(file.channels.iter().map(|s| s.id.as_str()))?;
        check_unique(file.scaffolds.iter().map(|s| s.id.as_str()))?;

        let mut mark_shapes = Vec::with_capacity(file.shapes.len());
        for (i, s) in file.shapes.into_iter().enumerate() {
            let geometry = match (&s.path, s.class) {
                (None, ShapeClass::Wave) => ShapeGeometry::Builtin,
                (Some(_), ShapeClass::Wave) => {
                    return Err(schema(format!("shapes[{i}].path"), "wave shapes take no path"))
                }
                (None, ShapeClass::Polygon) => {
                    if builtin_outline(&s.id).is_none() {
                        return Err(schema(format!("shapes[{i}].path"), "unknown built-in shape"));
                    }
                    ShapeGeometry::Builtin
                }
                (Some(data), ShapeClass::Polygon) => {
                    let degenerate = || PaletteError::DegeneratePath(s.id.clone());
                    let (points, closed) = parse_path_data(data).ok_or_else(degenerate)?;
                    if !closed || points.len() < 3 || polygon_area(&points).abs() < 1e-9 {
                        return Err(degenerate());
                    }
                    let points = normalize(points, 1.0).ok_or_else(degenerate)?;
                    if !is_simple_polygon(&points) {
                        return Err(degenerate());
                    }
                    ShapeGeometry::Custom(points)
                }
            };
            mark_shapes.push(MarkShapeSpec { id: s.id, class: s.class, geometry, symmetric: s.symmetric });
        }

        let mut channels = Vec::with_capacity(file.channels.len());
        for (i, c) in file.channels.into_iter().enumerate() {
            let property = Property::from_id(&c.id)
                .ok_or_else(|| schema(format!("channels[{i}].id"), "unknown channel"))?;
            let expected_kind = if property == Property::Color {
                ValueKind::Categorical
            } else {
                ValueKind::Quantitative
            };
            if c.value_kind != expected_kind {
                return Err(schema(format!("channels[{i}].value_kind"), "kind does not fit channel"));
            }
            let range = match (expected_kind, c.range) {
                (ValueKind::Categorical, _) => None,
                (ValueKind::Quantitative, Some([lo, hi])) => {
                    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                        return Err(schema(format!("channels[{i}].range"), "range must satisfy lo < hi"));
                    }
                    Some((lo, hi))
                }
                (ValueKind::Quantitative, None) => property.default_range(),
            };
            let shape_class_present = |class| mark_shapes.iter().any(|s: &MarkShapeSpec| s.class == class);
            let served = match c.applies_to {
                AppliesTo::Polygon => shape_class_present(ShapeClass::Polygon),
                AppliesTo::Wave => shape_class_present(ShapeClass::Wave),
                AppliesTo::Both => !mark_shapes.is_empty(),
            };
            if !served {
                return Err(schema(format!("channels[{i}].applies_to"), "no shape of this class"));
            }
            channels.push(ChannelSpec {
                id: c.id,
                property,
                value_kind: c.value_kind,
                applies_to: c.applies_to,
                range,
            });
        }

        let mut scaffolds = Vec::with_capacity(file.scaffolds.len());
        for (i, s) in file.scaffolds.into_iter().enumerate() {
            let (geometry, centroid) = match &s.path {
                None => {
                    if builtin_scaffold(&s.id).is_none() {
                        return Err(schema(format!("scaffolds[{i}].path"), "unknown built-in scaffold"));
                    }
                    (ScaffoldGeometry::Builtin, Point::ORIGIN)
                }
                Some(data) => {
                    let degenerate = || PaletteError::DegeneratePath(s.id.clone());
                    let (points, closed) = parse_path_data(data).ok_or_else(degenerate)?;
                    let points = normalize(points, 2.0).ok_or_else(degenerate)?;
                    let centroid = if closed && polygon_area(&points).abs() > 1e-9 {
                        polygon_centroid(&points)
                    } else {
                        Point::ORIGIN
                    };
                    let path = Path::Polyline { points: points.clone(), closed };
                    if !(path.arc_length() > 0.0) {
                        return Err(degenerate());
                    }
                    (ScaffoldGeometry::Custom { points, closed }, centroid)
                }
            };
            scaffolds.push(ScaffoldSpec { id: s.id, class: s.class, geometry, centroid });
        }
        if scaffolds.is_empty() {
            return Err(schema("scaffolds", "at least one scaffold is required"));
        }

        let mut ids = HashSet::new();
        for (i, g) in file.gravities.iter().enumerate() {
            if !ids.insert(g.id) {
                return Err(PaletteError::DuplicateId(format!("{:?}", g.id).to_lowercase()));
            }
            if !(0.0..1.0).contains(&g.pull) {
                return Err(schema(format!("gravities[{i}].pull"), "pull must lie in [0, 1)"));
            }
        }
        let mut ordered = file.gravities.clone();
        ordered.sort_by_key(|g| g.id);
        if ordered.windows(2).any(|w| !(w[0].pull < w[1].pull)) {
            return Err(schema("gravities", "pull must increase weak < medium < strong"));
        }
        if file.gravities.is_empty() {
            return Err(schema("gravities", "at least one gravity level is required"));
        }
        for (i, c) in file.colors.iter().enumerate() {
            if !valid_hex(c) {
                return Err(schema(format!("colors[{i}]"), "expected #rgb or #rrggbb"));
            }
        }

        Ok(PaletteConfig {
            mark_shapes,
            channels,
            scaffolds,
            gravities: file.gravities,
            colors: file.colors,
        })
    }
}

/// Parses and validates a palette file.
pub fn load_palette(json_text: &str) -> Result<PaletteConfig, PaletteError> {
    let de = &mut serde_json::Deserializer::from_str(json_text);
    let file: PaletteFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.inner().to_string())
    })?;
    PaletteConfig::try_from(file)
}
