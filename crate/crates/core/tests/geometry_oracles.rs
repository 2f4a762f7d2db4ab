mod support;

use glyphlab_core::geometry::{
    anchor_points, mark_outline, raw_anchor_points, wave_polyline, GeometryError, Path, Point, Spiral,
};
use glyphlab_core::palette::{default_palettes, GravityId, GravityLevel, ShapeClass, DEFAULT_SCAFFOLDS};
use glyphlab_core::scales::{MARK_UNIT, SCAFFOLD_RADIUS, WAVE_PIP, WAVE_STROKE};
use support::{arc_position, dense_scaffold, polyline_length, simpson};

fn level(pull: f64) -> GravityLevel {
    GravityLevel { id: GravityId::Weak, pull }
}

fn close(a: Point, b: Point, eps: f64) -> bool {
    a.distance(b) < eps
}

#[test]
fn anchors_are_equally_spaced_on_every_scaffold() {
    let p = default_palettes();
    for id in DEFAULT_SCAFFOLDS {
        let path = p.scaffold(id).unwrap().path();
        let (poly, closed) = dense_scaffold(id, 240_000);
        let total = polyline_length(&poly, closed);
        assert!((total - path.arc_length()).abs() < 1e-6, "{id}: {total} vs {}", path.arc_length());
        for n in 1..=12 {
            let anchors = raw_anchor_points(&path, n);
            assert_eq!(anchors.len(), n);
            let pos: Vec<f64> = anchors.iter().map(|&a| arc_position(&poly, closed, a)).collect();
            let mut gaps: Vec<f64> = pos.windows(2).map(|w| w[1] - w[0]).collect();
            if closed {
                gaps.push(total - pos[n - 1] + pos[0]);
            } else if n == 1 {
                gaps = vec![pos[0], total - pos[0]];
            } else {
                assert!(pos[0].abs() < 1e-9 && (pos[n - 1] - total).abs() < 1e-9, "{id}: endpoints");
            }
            let max = gaps.iter().cloned().fold(f64::MIN, f64::max);
            let min = gaps.iter().cloned().fold(f64::MAX, f64::min);
            assert!((max / min - 1.0).abs() < 1e-6, "{id} n={n}: ratio {}", max / min);
        }
    }
}

#[test]
fn gravity_shrinks_centroid_distance_strictly() {
    let p = default_palettes();
    let pulls = [0.0, 0.15, 0.45, 0.8, 0.99];
    for spec in &p.scaffolds {
        let path = spec.path();
        for n in 1..=12 {
            let raw = raw_anchor_points(&path, n);
            let layouts: Vec<Vec<Point>> =
                pulls.iter().map(|&k| anchor_points(&path, n, &level(k), spec.centroid).points).collect();
            for (i, r) in raw.iter().enumerate() {
                let d0 = r.distance(spec.centroid);
                if d0 < 1e-12 {
                    continue;
                }
                let ds: Vec<f64> = layouts.iter().map(|l| l[i].distance(spec.centroid)).collect();
                assert!(ds.windows(2).all(|w| w[1] < w[0]), "{} n={n} i={i}: {ds:?}", spec.id);
                for (k, d) in pulls.iter().zip(&ds) {
                    assert!((d - (1.0 - k) * d0).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn palette_gravity_levels_are_ordered() {
    let p = default_palettes();
    let pulls: Vec<f64> = [GravityId::Weak, GravityId::Medium, GravityId::Strong]
        .iter()
        .map(|&g| p.gravity(g).unwrap().pull)
        .collect();
    assert_eq!(pulls, vec![0.15, 0.45, 0.8]);
}

#[test]
fn spiral_length_matches_quadrature() {
    let s = Spiral::unit();
    let k = s.growth;
    let quad = simpson(|th| (s.radius_at(th).powi(2) + k * k).sqrt(), 0.0, s.sweep, 20_000);
    assert!((Path::Spiral(s).arc_length() - quad).abs() < 1e-4);
}

#[test]
fn square_and_line_lengths() {
    let p = default_palettes();
    let side = 2.0_f64.sqrt();
    assert!((p.scaffold("square").unwrap().path().arc_length() - 4.0 * side).abs() < 1e-12);
    let h = p.scaffold("horizontal").unwrap().path();
    assert!(!h.is_closed());
    assert!((h.arc_length() - 2.0).abs() < 1e-12);
}

#[test]
fn circle_four_anchors_at_compass_points() {
    let path = Path::circle(Point::ORIGIN, 1.0);
    let a = anchor_points(&path, 4, &level(0.0), Point::ORIGIN).points;
    let expect = [(0.0, -1.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)];
    for (q, (x, y)) in a.iter().zip(expect) {
        assert!(close(*q, Point::new(x, y), 1e-12));
    }
    let d: Vec<f64> = (0..4).map(|i| a[i].distance(a[(i + 1) % 4])).collect();
    assert!(d.iter().all(|x| (x - d[0]).abs() < 1e-12));
}

#[test]
fn full_pull_collapses_to_centroid() {
    let p = default_palettes();
    for spec in &p.scaffolds {
        for q in anchor_points(&spec.path(), 7, &level(1.0), spec.centroid).points {
            assert!(close(q, spec.centroid, 1e-12));
        }
    }
}

#[test]
fn square_eight_anchors_split_perimeter() {
    let p = default_palettes();
    let path = p.scaffold("square").unwrap().path();
    let (poly, _) = dense_scaffold("square", 80_000);
    let pos: Vec<f64> = raw_anchor_points(&path, 8).iter().map(|&a| arc_position(&poly, true, a)).collect();
    let per = path.arc_length() / 8.0;
    for w in pos.windows(2) {
        assert!((w[1] - w[0] - per).abs() < 1e-9);
    }
}

fn vertices(path: &Path) -> Vec<Point> {
    match path {
        Path::Polyline { points, .. } => points.clone(),
        other => other.sample_points(),
    }
}

fn same_point_set(a: &[Point], b: &[Point], eps: f64) -> bool {
    a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| close(*p, *q, eps)))
}

#[test]
fn circle_outline_ignores_rotation_but_pip_moves() {
    let p = default_palettes();
    let circle = p.shape("circle").unwrap();
    let m0 = mark_outline(circle, 0.4, 0.0, 100.0).unwrap();
    let m1 = mark_outline(circle, 0.4, 73.0, 100.0).unwrap();
    for q in m1.path.sample_points() {
        assert!((q.length() - 20.0).abs() < 1e-9);
    }
    assert_eq!(m0.path.bounds().center(), m1.path.bounds().center());
    assert!(m0.pip.distance(m1.pip) > 1.0);
}

#[test]
fn square_quarter_turn_is_symmetric() {
    let p = default_palettes();
    let sq = p.shape("square").unwrap();
    let m0 = mark_outline(sq, 0.5, 0.0, 80.0).unwrap();
    let m90 = mark_outline(sq, 0.5, 90.0, 80.0).unwrap();
    assert!(same_point_set(&vertices(&m0.path), &vertices(&m90.path), 1e-9));
    // Clockwise quarter turn in y-down coordinates: (x, y) -> (-y, x).
    let turned = Point::new(-m0.pip.y, m0.pip.x);
    assert!(close(turned, m90.pip, 1e-9));
}

#[test]
fn drop_half_turn_is_point_reflection() {
    let p = default_palettes();
    let drop = p.shape("drop").unwrap();
    let m0 = mark_outline(drop, 0.45, 0.0, 60.0).unwrap();
    let m180 = mark_outline(drop, 0.45, 180.0, 60.0).unwrap();
    let rot = |q: Point| {
        let (s, c) = std::f64::consts::PI.sin_cos();
        Point::new(c * q.x - s * q.y, s * q.x + c * q.y)
    };
    let reflected: Vec<Point> = vertices(&m0.path).into_iter().map(rot).collect();
    assert!(same_point_set(&reflected, &vertices(&m180.path), 1e-9));
    assert!(close(rot(m0.pip), m180.pip, 1e-9));
    let reflected_neg: Vec<Point> = vertices(&m0.path).into_iter().map(|q| q * -1.0).collect();
    assert!(same_point_set(&reflected_neg, &vertices(&m180.path), 1e-9));
}

#[test]
fn outline_max_dimension_matches_size() {
    let p = default_palettes();
    for shape in p.mark_shapes.iter().filter(|s| s.class == ShapeClass::Polygon) {
        let b = mark_outline(shape, 0.3, 0.0, 100.0).unwrap().path.bounds();
        assert!((b.width().max(b.height()) - 30.0).abs() < 1e-6, "{}", shape.id);
    }
}

#[test]
fn wave_is_rejected_by_outline() {
    let p = default_palettes();
    assert_eq!(
        mark_outline(p.shape("wave").unwrap(), 0.3, 0.0, 1.0).unwrap_err(),
        GeometryError::WaveShapePassedToPolygonOp("wave".into())
    );
}

fn ys(path: &Path) -> Vec<f64> {
    path.sample_points().iter().map(|p| p.y).collect()
}

#[test]
fn wave_extent_follows_amplitude() {
    let w = 50.0;
    for f in [1.0, 3.0, 6.0] {
        let path = wave_polyline(f, 0.05, 0.6, 0.0, w);
        let y = ys(&path);
        let span = y.iter().cloned().fold(f64::MIN, f64::max) - y.iter().cloned().fold(f64::MAX, f64::min);
        assert!((span - 2.0 * 0.05 * w).abs() < 1e-9, "f={f}: {span}");
    }
}

#[test]
fn wave_zero_crossings_follow_sine() {
    // sin(2πfu) on u ∈ (0, 1) changes sign 2f − 1 times for integer f.
    for f in 1..=6 {
        let path = wave_polyline(f as f64, 0.1, 0.5, 0.0, 40.0);
        let signs: Vec<bool> = ys(&path).into_iter().filter(|y| y.abs() > 1e-9).map(|y| y > 0.0).collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(changes, 2 * f - 1, "f={f}");
    }
}

#[test]
fn wave_length_sets_horizontal_extent() {
    let w = 120.0;
    let path = wave_polyline(2.5, 0.1, 0.9, 0.0, w);
    let pts = path.sample_points();
    let step = 0.9 * w / (pts.len() - 1) as f64;
    let b = path.bounds();
    assert!((b.width() - 0.9 * w).abs() <= step);
    assert!(close(b.center(), Point::new(0.0, b.center().y), 1e-9));
}

/// Every mark at every anchor, with the largest legal size and any
/// rotation, stays inside the cell.
#[test]
fn geometry_stays_inside_the_cell() {
    let p = default_palettes();
    let cell = 100.0;
    let unit = MARK_UNIT * cell;
    let center = Point::new(cell / 2.0, cell / 2.0);
    let size_hi = p.channel("size").unwrap().range.unwrap().1;
    let amp_hi = p.channel("amplitude").unwrap().range.unwrap().1;
    let (f_lo, f_hi) = p.channel("frequency").unwrap().range.unwrap();
    let len_hi = p.channel("length").unwrap().range.unwrap().1;
    let inside = |q: Point, pad: f64| {
        q.x - pad >= -1e-9 && q.y - pad >= -1e-9 && q.x + pad <= cell + 1e-9 && q.y + pad <= cell + 1e-9
    };
    for spec in &p.scaffolds {
        for pull in [0.0, 0.15, 0.45, 0.8] {
            for n in 1..=9 {
                let anchors = anchor_points(&spec.path(), n, &level(pull), spec.centroid).points;
                for a in anchors {
                    let pos = center + a * (SCAFFOLD_RADIUS * cell);
                    assert!(inside(pos, 0.0));
                    for rot in (0..360).step_by(20).map(f64::from) {
                        for shape in p.mark_shapes.iter().filter(|s| s.class == ShapeClass::Polygon) {
                            for size in [0.18, size_hi] {
                                let m = mark_outline(shape, size, rot, unit).unwrap();
                                for q in m.path.sample_points() {
                                    assert!(inside(pos + q, 0.0), "{} at {pos:?}", shape.id);
                                }
                            }
                        }
                        for k in 0..=10 {
                            let f = f_lo + (f_hi - f_lo) * k as f64 / 10.0;
                            let wave = wave_polyline(f, amp_hi, len_hi, rot, unit);
                            let pts = wave.sample_points();
                            for q in &pts {
                                assert!(inside(pos + *q, 0.5 * WAVE_STROKE * unit), "wave f={f} rot={rot}");
                            }
                            assert!(inside(pos + *pts.last().unwrap(), WAVE_PIP * unit));
                        }
                    }
                }
            }
        }
    }
}
