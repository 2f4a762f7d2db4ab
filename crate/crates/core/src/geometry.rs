//! Scaffold paths, equal arc-length anchor placement, and mark outlines.
//!
//! Coordinates follow SVG conventions: `x` grows to the right, `y` grows
//! downward, north is `-y`, and positive rotation is clockwise on screen.
//! Scaffolds live in a box of half-width 1 around the origin; mark shapes
//! live in a box of side 1 centered on the origin.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::palette::{GravityLevel, MarkShapeSpec, ShapeClass, ShapeOutline};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).length()
    }

    /// Rotates about the origin, clockwise on screen for positive degrees.
    pub fn rotate(self, degrees: f64) -> Point {
        let (s, c) = degrees.to_radians().sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Formats a coordinate with four decimals, never emitting `-0.0000`.
pub fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_owned()
    } else {
        s
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Point,
    pub max: Point,
}

impl Bounds {
    pub fn of<I: IntoIterator<Item = Point>>(points: I) -> Option<Bounds> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = Bounds { min: first, max: first };
        for p in it {
            b.include(p);
        }
        Some(b)
    }

    pub fn include(&mut self, p: Point) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn union(self, other: Bounds) -> Bounds {
        let mut b = self;
        b.include(other.min);
        b.include(other.max);
        b
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        self.min.lerp(self.max, 0.5)
    }

    pub fn contains(&self, p: Point, eps: f64) -> bool {
        p.x >= self.min.x - eps
            && p.x <= self.max.x + eps
            && p.y >= self.min.y - eps
            && p.y <= self.max.y + eps
    }
}

/// Archimedean spiral `r(θ) = inner + growth·θ`, starting at north and
/// winding clockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spiral {
    pub center: Point,
    pub scale: f64,
    pub inner: f64,
    pub growth: f64,
    pub sweep: f64,
    pub phase: f64,
}

impl Spiral {
    /// Two turns from radius 0.2 out to radius 1.
    pub fn unit() -> Spiral {
        let sweep = 2.0 * TAU;
        Spiral {
            center: Point::ORIGIN,
            scale: 1.0,
            inner: 0.2,
            growth: 0.8 / sweep,
            sweep,
            phase: 0.0,
        }
    }

    pub fn radius_at(&self, theta: f64) -> f64 {
        self.inner + self.growth * theta
    }

    pub fn point_at_angle(&self, theta: f64) -> Point {
        let r = self.radius_at(theta) * self.scale;
        let a = theta + self.phase;
        self.center + Point::new(a.sin(), -a.cos()) * r
    }

    // Antiderivative of sqrt(r^2 + k^2) dθ with r = inner + kθ, unscaled.
    fn primitive(&self, theta: f64) -> f64 {
        let k = self.growth;
        let r = self.radius_at(theta);
        let h = (r * r + k * k).sqrt();
        (r * h + k * k * (r + h).ln()) / (2.0 * k)
    }

    pub fn length_to(&self, theta: f64) -> f64 {
        if self.growth == 0.0 {
            return self.inner * theta * self.scale;
        }
        (self.primitive(theta) - self.primitive(0.0)) * self.scale
    }

    pub fn angle_at_length(&self, s: f64) -> f64 {
        let total = self.length_to(self.sweep);
        if s <= 0.0 {
            return 0.0;
        }
        if s >= total {
            return self.sweep;
        }
        let (mut lo, mut hi) = (0.0, self.sweep);
        let mut theta = self.sweep * s / total;
        for _ in 0..100 {
            let f = self.length_to(theta) - s;
            if f.abs() < 1e-14 * total.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            let r = self.radius_at(theta);
            let deriv = (r * r + self.growth * self.growth).sqrt() * self.scale;
            let next = theta - f / deriv;
            theta = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        theta
    }
}

/// A piecewise parametric curve with an arc-length parameterization.
#[derive(Debug, Clone, PartialEq)]
pub enum Path {
    Polyline { points: Vec<Point>, closed: bool },
    /// Starts at north and runs clockwise.
    Circle { center: Point, radius: f64, start: f64 },
    Spiral(Spiral),
}

const SPIRAL_SVG_SEGMENTS: usize = 192;
const CIRCLE_SAMPLES: usize = 96;

impl Path {
    pub fn polygon(points: Vec<Point>) -> Path {
        Path::Polyline { points, closed: true }
    }

    pub fn open(points: Vec<Point>) -> Path {
        Path::Polyline { points, closed: false }
    }

    pub fn circle(center: Point, radius: f64) -> Path {
        Path::Circle { center, radius, start: 0.0 }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Path::Polyline { closed, .. } => *closed,
            Path::Circle { .. } => true,
            Path::Spiral(_) => false,
        }
    }

    fn segments(points: &[Point], closed: bool) -> impl Iterator<Item = (Point, Point)> + '_ {
        let tail = if closed && points.len() > 1 {
            Some((points[points.len() - 1], points[0]))
        } else {
            None
        };
        points.windows(2).map(|w| (w[0], w[1])).chain(tail)
    }

    pub fn arc_length(&self) -> f64 {
        match self {
            Path::Polyline { points, closed } => {
                Self::segments(points, *closed).map(|(a, b)| a.distance(b)).sum()
            }
            Path::Circle { radius, .. } => TAU * radius,
            Path::Spiral(s) => s.length_to(s.sweep),
        }
    }

    pub fn start(&self) -> Point {
        self.point_at_length(0.0)
    }

    /// Point at arc length `s` from the start; closed paths wrap around.
    pub fn point_at_length(&self, s: f64) -> Point {
        match self {
            Path::Polyline { points, closed } => {
                let total = self.arc_length();
                if points.len() == 1 || total == 0.0 {
                    return points[0];
                }
                let mut s = if *closed { s.rem_euclid(total) } else { s.clamp(0.0, total) };
                let mut last = points[0];
                for (a, b) in Self::segments(points, *closed) {
                    let len = a.distance(b);
                    if s <= len && len > 0.0 {
                        return a.lerp(b, s / len);
                    }
                    s -= len;
                    last = b;
                }
                last
            }
            Path::Circle { center, radius, start } => {
                let theta = if *radius > 0.0 { s / radius } else { 0.0 } + start;
                *center + Point::new(theta.sin(), -theta.cos()) * *radius
            }
            Path::Spiral(sp) => sp.point_at_angle(sp.angle_at_length(s)),
        }
    }

    /// Vertices for polylines, dense samples for curves.
    pub fn sample_points(&self) -> Vec<Point> {
        match self {
            Path::Polyline { points, .. } => points.clone(),
            Path::Circle { .. } => {
                let total = self.arc_length();
                (0..CIRCLE_SAMPLES)
                    .map(|i| self.point_at_length(total * i as f64 / CIRCLE_SAMPLES as f64))
                    .collect()
            }
            Path::Spiral(sp) => (0..=SPIRAL_SVG_SEGMENTS)
                .map(|i| sp.point_at_angle(sp.sweep * i as f64 / SPIRAL_SVG_SEGMENTS as f64))
                .collect(),
        }
    }

    pub fn bounds(&self) -> Bounds {
        match self {
            Path::Circle { center, radius, .. } => Bounds {
                min: *center - Point::new(*radius, *radius),
                max: *center + Point::new(*radius, *radius),
            },
            _ => Bounds::of(self.sample_points()).unwrap_or(Bounds {
                min: Point::ORIGIN,
                max: Point::ORIGIN,
            }),
        }
    }

    /// Applies `p ↦ offset + rotate(p·scale)` to the whole path.
    pub fn transformed(&self, scale: f64, rotation: f64, offset: Point) -> Path {
        let map = |p: Point| offset + (p * scale).rotate(rotation);
        match self {
            Path::Polyline { points, closed } => Path::Polyline {
                points: points.iter().map(|p| map(*p)).collect(),
                closed: *closed,
            },
            Path::Circle { center, radius, start } => Path::Circle {
                center: map(*center),
                radius: radius * scale,
                start: start + rotation.to_radians(),
            },
            Path::Spiral(sp) => Path::Spiral(Spiral {
                center: map(sp.center),
                scale: sp.scale * scale,
                phase: sp.phase + rotation.to_radians(),
                ..*sp
            }),
        }
    }

    /// SVG path data with fixed four-decimal coordinates.
    pub fn to_svg_data(&self) -> String {
        let mut d = String::new();
        match self {
            Path::Polyline { points, closed } => {
                for (i, p) in points.iter().enumerate() {
                    let cmd = if i == 0 { 'M' } else { 'L' };
                    let _ = write!(d, "{cmd}{},{} ", fmt4(p.x), fmt4(p.y));
                }
                if *closed {
                    d.push('Z');
                }
            }
            Path::Circle { center, radius, .. } => {
                let r = fmt4(*radius);
                let top = *center - Point::new(0.0, *radius);
                let bottom = *center + Point::new(0.0, *radius);
                let _ = write!(
                    d,
                    "M{},{} A{r},{r} 0 1 1 {},{} A{r},{r} 0 1 1 {},{} Z",
                    fmt4(top.x),
                    fmt4(top.y),
                    fmt4(bottom.x),
                    fmt4(bottom.y),
                    fmt4(top.x),
                    fmt4(top.y)
                );
            }
            Path::Spiral(_) => {
                for (i, p) in self.sample_points().iter().enumerate() {
                    let cmd = if i == 0 { 'M' } else { 'L' };
                    let _ = write!(d, "{cmd}{},{} ", fmt4(p.x), fmt4(p.y));
                }
            }
        }
        d.trim_end().to_owned()
    }
}

/// Area centroid of a simple polygon; falls back to the vertex mean for
/// zero-area input.
pub fn polygon_centroid(points: &[Point]) -> Point {
    let n = points.len();
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        let cross = p.x * q.y - q.x * p.y;
        a += cross;
        cx += (p.x + q.x) * cross;
        cy += (p.y + q.y) * cross;
    }
    if a.abs() < 1e-12 {
        let k = 1.0 / n.max(1) as f64;
        return points.iter().fold(Point::ORIGIN, |acc, p| acc + *p * k);
    }
    Point::new(cx / (3.0 * a), cy / (3.0 * a))
}

pub fn polygon_area(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let p = points[i];
            let q = points[(i + 1) % n];
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
        * 0.5
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let eps = 1e-12;
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > eps && o2 < -eps) || (o1 < -eps && o2 > eps))
        && ((o3 > eps && o4 < -eps) || (o3 < -eps && o4 > eps))
    {
        return true;
    }
    let on = |p: Point, q: Point, r: Point, o: f64| {
        o.abs() <= eps
            && r.x >= p.x.min(q.x) - eps
            && r.x <= p.x.max(q.x) + eps
            && r.y >= p.y.min(q.y) - eps
            && r.y <= p.y.max(q.y) + eps
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

/// True when no two non-adjacent edges of the closed polygon touch.
pub fn is_simple_polygon(points: &[Point]) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        if a.distance(b) < 1e-12 {
            return false;
        }
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (c, d) = (points[j], points[(j + 1) % n]);
            if segments_cross(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

pub fn point_in_polygon(p: Point, points: &[Point]) -> bool {
    let n = points.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (points[i], points[j]);
        if (a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Anchor positions for a glyph's marks along its scaffold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchorLayout {
    pub points: Vec<Point>,
    pub gravity_applied: crate::palette::GravityId,
}

/// Raw anchors at equal arc-length intervals, before gravity.
pub fn raw_anchor_points(path: &Path, n: usize) -> Vec<Point> {
    let total = path.arc_length();
    if n == 0 {
        return Vec::new();
    }
    if path.is_closed() {
        (0..n).map(|i| path.point_at_length(total * i as f64 / n as f64)).collect()
    } else if n == 1 {
        vec![path.point_at_length(total * 0.5)]
    } else {
        (0..n)
            .map(|i| path.point_at_length(total * i as f64 / (n - 1) as f64))
            .collect()
    }
}

/// Places `n` anchors at equal arc-length intervals and pulls each toward
/// `centroid` by the gravity fraction.
pub fn anchor_points(path: &Path, n: usize, gravity: &GravityLevel, centroid: Point) -> AnchorLayout {
    let keep = 1.0 - gravity.pull;
    let points = raw_anchor_points(path, n)
        .into_iter()
        .map(|p| centroid + (p - centroid) * keep)
        .collect();
    AnchorLayout { points, gravity_applied: gravity.id }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GeometryError {
    #[error("shape `{0}` is a wave and has no polygon outline")]
    WaveShapePassedToPolygonOp(String),
}

/// A sized, rotated polygon-class mark, centered on its centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkOutline {
    pub path: Path,
    pub pip: Point,
}

/// Outline for a polygon-class shape with its centroid at the origin.
///
/// `size` is the fraction of `glyph_width` given to the bounding box's
/// larger dimension; rotation is about the centroid and the pip turns with it.
pub fn mark_outline(
    shape: &MarkShapeSpec,
    size: f64,
    rotation: f64,
    glyph_width: f64,
) -> Result<MarkOutline, GeometryError> {
    if shape.class != ShapeClass::Polygon {
        return Err(GeometryError::WaveShapePassedToPolygonOp(shape.id.clone()));
    }
    let outline = shape
        .outline()
        .ok_or_else(|| GeometryError::WaveShapePassedToPolygonOp(shape.id.clone()))?;
    let scale = size * glyph_width;
    let centroid = outline.centroid();
    let place = |p: Point| ((p - centroid) * scale).rotate(rotation);
    let path = match &outline {
        ShapeOutline::Circle { radius } => Path::Circle {
            center: place(Point::ORIGIN),
            radius: radius * scale,
            start: rotation.to_radians(),
        },
        ShapeOutline::Polygon(points) => Path::polygon(points.iter().map(|p| place(*p)).collect()),
    };
    Ok(MarkOutline { path, pip: place(outline.pip_anchor()) })
}

/// Sampled sine wave `y = A·sin(2π·f·u)` for `u ∈ [0, 1]`, centered on the
/// origin before rotation. Amplitude and length are fractions of
/// `glyph_width`.
pub fn wave_polyline(
    frequency: f64,
    amplitude: f64,
    length: f64,
    rotation: f64,
    glyph_width: f64,
) -> Path {
    let segments = 64 * frequency.ceil().max(1.0) as usize;
    let width = length * glyph_width;
    let amp = amplitude * glyph_width;
    let points = (0..=segments)
        .map(|i| {
            let u = i as f64 / segments as f64;
            Point::new((u - 0.5) * width, -amp * (TAU * frequency * u).sin()).rotate(rotation)
        })
        .collect();
    Path::open(points)
}

/// Regular polygon inscribed in the circle of radius 1, first vertex north,
/// vertices ordered clockwise.
pub fn regular_polygon(sides: usize) -> Vec<Point> {
    (0..sides)
        .map(|i| {
            let a = TAU * i as f64 / sides as f64;
            Point::new(a.sin(), -a.cos())
        })
        .collect()
}

/// Five-pointed star with outer radius 1, first point north.
pub fn star_points(inner_ratio: f64) -> Vec<Point> {
    (0..10)
        .map(|i| {
            let a = PI * i as f64 / 5.0;
            let r = if i % 2 == 0 { 1.0 } else { inner_ratio };
            Point::new(a.sin() * r, -a.cos() * r)
        })
        .collect()
}
