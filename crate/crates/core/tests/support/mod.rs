//! Shared test helpers: reference implementations used as oracles (none of
//! them call the library's own checkers) and random input generators.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::f64::consts::TAU;

use glyphlab_core::data::{ColumnSet, DataTable, Designation, SetKind, ValueKind};
use glyphlab_core::geometry::Point;
use glyphlab_core::palette::{PaletteConfig, ShapeClass};
use glyphlab_core::sampler::{DesignRng, GlyphDesign, Seed};

/// Every design-level rule, checked directly against the inputs. Returns one
/// message per broken rule.
pub fn design_violations(g: &GlyphDesign, t: &DataTable, p: &PaletteConfig) -> Vec<String> {
    let d = &g.designation;
    let mut out = Vec::new();
    if g.marks.len() != d.sets.len() {
        out.push(format!("{} marks for {} sets", g.marks.len(), d.sets.len()));
        return out;
    }
    let mut shapes = HashSet::new();
    let mut colors: Vec<usize> = Vec::new();
    for (i, (m, set)) in g.marks.iter().zip(&d.sets).enumerate() {
        if m.set_index != i {
            out.push(format!("mark {i} has set index {}", m.set_index));
        }
        if !shapes.insert(m.shape.as_str()) {
            out.push(format!("shape {} reused", m.shape));
        }
        let Some(shape) = p.mark_shapes.iter().find(|s| s.id == m.shape) else {
            out.push(format!("unknown shape {}", m.shape));
            continue;
        };
        let assigned: Vec<&str> = m.channels.iter().map(|c| c.column.as_str()).collect();
        let expected: Vec<&str> = set.columns.iter().map(String::as_str).collect();
        if assigned != expected {
            out.push(format!("set {i}: columns {assigned:?} != {expected:?}"));
        }
        for ca in &m.channels {
            let Some(ch) = p.channels.iter().find(|c| c.id == ca.channel) else {
                out.push(format!("unknown channel {}", ca.channel));
                continue;
            };
            let applies = match ch.applies_to {
                glyphlab_core::palette::AppliesTo::Both => true,
                glyphlab_core::palette::AppliesTo::Polygon => shape.class == ShapeClass::Polygon,
                glyphlab_core::palette::AppliesTo::Wave => shape.class == ShapeClass::Wave,
            };
            if !applies {
                out.push(format!("channel {} on {:?} shape {}", ch.id, shape.class, shape.id));
            }
            let col_kind = column_kind(t, &ca.column);
            if set.designation != SetKind::Repeat && ch.value_kind != col_kind {
                out.push(format!("column {} ({col_kind:?}) on {:?} channel {}", ca.column, ch.value_kind, ch.id));
            }
            if col_kind == ValueKind::Categorical {
                let cats: BTreeSet<&str> = (0..t.row_count())
                    .map(|r| t.column(&ca.column).unwrap().raw(r).trim())
                    .filter(|v| !v.is_empty())
                    .collect();
                if ca.colors.len() != cats.len() {
                    out.push(format!("column {}: {} colors for {} categories", ca.column, ca.colors.len(), cats.len()));
                }
            }
            colors.extend(&ca.colors);
        }
        match set.designation {
            SetKind::Repeat => {
                if !m.repeat {
                    out.push(format!("set {i} should be a repeat mark"));
                }
                let chans: HashSet<&str> = m.channels.iter().map(|c| c.channel.as_str()).collect();
                if chans.len() != 1 {
                    out.push(format!("repeat set {i} uses channels {chans:?}"));
                }
                for ca in &m.channels {
                    if ca.colors.len() != 1 {
                        out.push(format!("repeat column {} has {} colors", ca.column, ca.colors.len()));
                    }
                    if p.channel(&ca.channel).map(|c| c.value_kind) != Some(ValueKind::Quantitative) {
                        out.push(format!("repeat channel {} not quantitative", ca.channel));
                    }
                }
            }
            _ => {
                if m.repeat {
                    out.push(format!("set {i} flagged repeat"));
                }
                let chans: HashSet<&str> = m.channels.iter().map(|c| c.channel.as_str()).collect();
                if chans.len() != m.channels.len() {
                    out.push(format!("set {i} reuses a channel within its mark"));
                }
            }
        }
    }
    let distinct: HashSet<usize> = colors.iter().copied().collect();
    if distinct.len() != colors.len() {
        out.push(format!("color indices repeat: {colors:?}"));
    }
    if colors.iter().any(|&c| c >= p.colors.len()) {
        out.push("color index beyond palette".into());
    }
    if !p.scaffolds.iter().any(|s| s.id == g.scaffold) {
        out.push(format!("unknown scaffold {}", g.scaffold));
    }
    if !p.gravities.iter().any(|l| l.id == g.gravity) {
        out.push(format!("unknown gravity {:?}", g.gravity));
    }
    out
}

/// Float-parse every non-empty cell; any failure means categorical.
pub fn column_kind(t: &DataTable, name: &str) -> ValueKind {
    let c = t.column(name).expect("column exists");
    let all_numeric = (0..t.row_count())
        .map(|r| c.raw(r).trim())
        .filter(|v| !v.is_empty())
        .all(|v| v.parse::<f64>().is_ok_and(f64::is_finite));
    if all_numeric {
        ValueKind::Quantitative
    } else {
        ValueKind::Categorical
    }
}

fn category_count(t: &DataTable, name: &str) -> usize {
    let c = t.column(name).unwrap();
    (0..t.row_count())
        .map(|r| c.raw(r).trim())
        .filter(|v| !v.is_empty())
        .collect::<BTreeSet<_>>()
        .len()
}

/// A random designation that is valid for `t` and `p` by construction:
/// at most one categorical column per conjunction, at most as many
/// quantitative columns as the richest shape class offers, repeats purely
/// quantitative, and the color budget respected.
pub fn random_valid_designation(t: &DataTable, p: &PaletteConfig, rng: &mut DesignRng) -> Designation {
    let quant_cap = [ShapeClass::Polygon, ShapeClass::Wave]
        .into_iter()
        .map(|c| p.quantitative_channels(c).count())
        .max()
        .unwrap_or(0);
    loop {
        let mut cols: Vec<String> = t.columns().iter().map(|c| c.name.clone()).collect();
        // Fisher-Yates with the rng under test only as a source of entropy.
        for i in (1..cols.len()).rev() {
            let j = rng.below(i + 1);
            cols.swap(i, j);
        }
        let take = 1 + rng.below(cols.len());
        cols.truncate(take);
        let mut sets = Vec::new();
        let mut rest = cols.as_slice();
        while !rest.is_empty() {
            let k = 1 + rng.below(rest.len().min(3));
            let (chunk, tail) = rest.split_at(k);
            rest = tail;
            let all_quant = chunk.iter().all(|c| column_kind(t, c) == ValueKind::Quantitative);
            let set = match (k, all_quant && rng.below(2) == 0) {
                (1, _) => ColumnSet::single(chunk[0].clone()),
                (_, true) => ColumnSet::repeat(chunk.iter().cloned()),
                _ => ColumnSet::conjunction(chunk.iter().cloned()),
            };
            sets.push(set);
        }
        let d = Designation::new(t.key_column(), sets);
        let mut required = 0;
        let mut ok = d.sets.len() <= p.mark_shapes.len();
        for set in &d.sets {
            let cats = set
                .columns
                .iter()
                .filter(|c| column_kind(t, c) == ValueKind::Categorical)
                .count();
            let quants = set.columns.len() - cats;
            if set.designation == SetKind::Repeat {
                required += set.columns.len();
            } else {
                required += set
                    .columns
                    .iter()
                    .filter(|c| column_kind(t, c) == ValueKind::Categorical)
                    .map(|c| category_count(t, c))
                    .sum::<usize>();
                ok &= cats <= 1 && quants <= quant_cap;
            }
        }
        let has_categorical_channel = p.channels.iter().any(|c| c.value_kind == ValueKind::Categorical);
        ok &= required <= if has_categorical_channel { p.colors.len() } else { 0 };
        if ok {
            return d;
        }
    }
}

/// Whether an injective assignment of `columns` to `channels` exists such
/// that every column gets a channel of its own kind. Brute force.
pub fn injective_assignment_exists(kinds: &[ValueKind], channels: &[ValueKind]) -> bool {
    fn go(i: usize, kinds: &[ValueKind], channels: &[ValueKind], used: &mut Vec<bool>) -> bool {
        if i == kinds.len() {
            return true;
        }
        for j in 0..channels.len() {
            if !used[j] && channels[j] == kinds[i] {
                used[j] = true;
                if go(i + 1, kinds, channels, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    go(0, kinds, channels, &mut vec![false; channels.len()])
}

/// Dense reconstruction of a built-in scaffold from its defining formula.
pub fn dense_scaffold(id: &str, samples: usize) -> (Vec<Point>, bool) {
    let polar = |a: f64, r: f64| Point::new(a.sin() * r, -a.cos() * r);
    let polygon = |sides: usize| -> Vec<Point> {
        let verts: Vec<Point> = (0..sides).map(|i| polar(TAU * i as f64 / sides as f64, 1.0)).collect();
        let per = samples / sides;
        let mut out = Vec::new();
        for i in 0..sides {
            let (a, b) = (verts[i], verts[(i + 1) % sides]);
            for k in 0..per {
                out.push(a.lerp(b, k as f64 / per as f64));
            }
        }
        out
    };
    match id {
        "horizontal" => (vec![Point::new(-1.0, 0.0), Point::new(1.0, 0.0)], false),
        "vertical" => (vec![Point::new(0.0, -1.0), Point::new(0.0, 1.0)], false),
        "circle" => ((0..samples).map(|i| polar(TAU * i as f64 / samples as f64, 1.0)).collect(), true),
        "triangle" => (polygon(3), true),
        "square" => (polygon(4), true),
        "pentagon" => (polygon(5), true),
        "hexagon" => (polygon(6), true),
        "spiral" => {
            let sweep = 2.0 * TAU;
            let pts = (0..=samples)
                .map(|i| {
                    let th = sweep * i as f64 / samples as f64;
                    polar(th, 0.2 + 0.8 * th / sweep)
                })
                .collect();
            (pts, false)
        }
        other => panic!("no oracle for scaffold {other}"),
    }
}

/// Arc-length coordinate of `q` along a polyline: the cumulative length at
/// its projection onto the nearest segment.
pub fn arc_position(poly: &[Point], closed: bool, q: Point) -> f64 {
    let n = poly.len();
    let seg_count = if closed { n } else { n - 1 };
    let mut best = (f64::INFINITY, 0.0);
    let mut run = 0.0;
    for i in 0..seg_count {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let ab = b - a;
        let len2 = ab.x * ab.x + ab.y * ab.y;
        let t = if len2 > 0.0 { (((q - a).x * ab.x + (q - a).y * ab.y) / len2).clamp(0.0, 1.0) } else { 0.0 };
        let proj = a + ab * t;
        let dist = proj.distance(q);
        let len = len2.sqrt();
        if dist < best.0 {
            best = (dist, run + t * len);
        }
        run += len;
    }
    best.1
}

pub fn polyline_length(poly: &[Point], closed: bool) -> f64 {
    let mut total: f64 = poly.windows(2).map(|w| w[0].distance(w[1])).sum();
    if closed {
        total += poly[poly.len() - 1].distance(poly[0]);
    }
    total
}

/// Composite Simpson's rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Counts occurrences of `needle` in `hay`.
pub fn count(hay: &str, needle: &str) -> usize {
    hay.matches(needle).count()
}

/// Reads every number in the listed attributes of every element, pairing
/// x/y coordinates where possible; used for containment checks.
pub fn numbers_in(attr_value: &str) -> Vec<f64> {
    attr_value
        .split(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == 'e'))
        .filter_map(|s| s.parse::<f64>().ok())
        .collect()
}

/// Fresh test rng seeded from a label.
pub fn rng(label: u64) -> DesignRng {
    Seed(0x5eed_0000 ^ label).rng()
}

pub fn unit(rng: &mut DesignRng) -> f64 {
    rng.below(1 << 30) as f64 / (1u64 << 30) as f64
}

/// A random session operation, mostly well-formed but sometimes aimed at
/// missing targets so error paths get exercised too.
pub fn random_operation(
    state: &glyphlab_core::session::SessionState,
    t: &DataTable,
    p: &PaletteConfig,
    rng: &mut DesignRng,
) -> glyphlab_core::session::Operation {
    use glyphlab_core::sampler::OverrideRequest;
    use glyphlab_core::session::{Operation, ViewMode};

    let design_id = |rng: &mut DesignRng| -> String {
        if state.designs.is_empty() || rng.below(10) == 0 {
            "g-missing".into()
        } else {
            state.designs[rng.below(state.designs.len())].id.clone()
        }
    };
    let row_key = |rng: &mut DesignRng| -> String {
        if rng.below(12) == 0 {
            "nowhere".into()
        } else {
            t.key(rng.below(t.row_count())).to_owned()
        }
    };
    match rng.below(9) {
        0 => Operation::Append { n: rng.below(3) + 1 },
        1 => Operation::Cull { design_id: design_id(rng) },
        2 => Operation::SetMode {
            mode: if rng.below(2) == 0 { ViewMode::SmallMultiples } else { ViewMode::SmallPermutables },
        },
        3 => Operation::Page { delta: rng.below(7) as i64 - 3 },
        4 | 5 => Operation::Select { design_id: design_id(rng), row_key: row_key(rng) },
        6 => Operation::Move {
            glyph_key: format!("{}:{}", design_id(rng), row_key(rng)),
            position: Point::new(rng.below(800) as f64, rng.below(600) as f64),
        },
        7 => Operation::Resize {
            glyph_key: format!("{}:{}", design_id(rng), row_key(rng)),
            size: rng.below(300) as f64 - 20.0,
        },
        _ => {
            let set_index = rng.below(3);
            let request = if rng.below(2) == 0 {
                let shape = &p.mark_shapes[rng.below(p.mark_shapes.len())].id;
                OverrideRequest { set_index, shape: Some(shape.clone()), ..Default::default() }
            } else {
                let channel = &p.channels[rng.below(p.channels.len())].id;
                let column = state
                    .designs
                    .first()
                    .and_then(|g| g.marks.get(set_index))
                    .and_then(|m| m.channels.get(rng.below(m.channels.len().max(1))))
                    .map(|c| c.column.clone());
                OverrideRequest { set_index, column, channel: Some(channel.clone()), ..Default::default() }
            };
            Operation::Override { design_id: design_id(rng), request }
        }
    }
}

/// The resolved value of a numeric property on one mark.
pub fn property_value(m: &glyphlab_core::scales::ResolvedMark, property: glyphlab_core::palette::Property) -> f64 {
    use glyphlab_core::palette::Property;
    let wave = m.wave_params;
    match property {
        Property::Alpha => m.alpha,
        Property::Size => m.size,
        Property::Rotation => m.rotation,
        Property::Frequency => wave.unwrap().frequency,
        Property::Amplitude => wave.unwrap().amplitude,
        Property::Length => wave.unwrap().length,
        Property::Color => panic!("color is not numeric"),
    }
}

/// Domain of `column` as the scale sees it: repeat members share the union
/// of their columns' values.
pub fn oracle_domain(g: &GlyphDesign, t: &DataTable, column: &str) -> (f64, f64) {
    let set = g.designation.sets.iter().find(|s| s.columns.iter().any(|c| c == column)).unwrap();
    let members: Vec<&str> = if set.designation == SetKind::Repeat {
        set.columns.iter().map(String::as_str).collect()
    } else {
        vec![column]
    };
    let values: Vec<f64> = members
        .iter()
        .flat_map(|c| (0..t.row_count()).filter_map(move |r| t.column(c).unwrap().raw(r).trim().parse::<f64>().ok()))
        .collect();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Compares every encoded quantitative value of `row` against the
/// closed-form linear map, and checks that domain-max values land on range
/// hi within 1e-9. Returns how many domain-max hits were checked.
pub fn check_linear(g: &GlyphDesign, t: &DataTable, p: &PaletteConfig, row: usize) -> Result<usize, String> {
    let rg = glyphlab_core::scales::resolve(g, row, t, p, 100.0).map_err(|e| e.to_string())?;
    let mut hits = 0;
    for m in &rg.marks {
        for e in &m.legend_entries {
            let spec = p.channel(&e.channel).unwrap();
            if spec.value_kind != ValueKind::Quantitative {
                continue;
            }
            let (lo, hi) = spec.range.unwrap();
            let (dmin, dmax) = oracle_domain(g, t, &e.column);
            let x: f64 = e.value.trim().parse().unwrap();
            let expected = if dmax > dmin { lo + (x - dmin) / (dmax - dmin) * (hi - lo) } else { 0.5 * (lo + hi) };
            let got = property_value(m, spec.property);
            if (got - expected).abs() >= 1e-9 {
                return Err(format!("{} via {}: {got} vs {expected}", e.column, e.channel));
            }
            if x == dmax && dmax > dmin {
                if (got - hi).abs() >= 1e-9 {
                    return Err(format!("{} via {}: max maps to {got}, not {hi}", e.column, e.channel));
                }
                hits += 1;
            }
        }
    }
    Ok(hits)
}

/// `t` plus a row keyed `probe` that copies `base_row` except for `column`.
pub fn with_probe_row(t: &DataTable, base_row: usize, column: &str, value: f64) -> DataTable {
    let mut keys = t.keys().to_vec();
    keys.push("probe".into());
    let columns = t
        .columns()
        .iter()
        .map(|c| {
            let mut raw: Vec<String> = (0..t.row_count()).map(|r| c.raw(r).to_owned()).collect();
            raw.push(if c.name == column { value.to_string() } else { c.raw(base_row).to_owned() });
            (c.name.clone(), raw)
        })
        .collect();
    DataTable::from_columns(t.key_column(), keys, columns).unwrap()
}

/// One randomized monotonicity probe: picks a quantitative encoding of `g`,
/// a row, and a new in-domain value for that row's column, then checks the
/// encoded property moves in the same direction as the data. `None` when
/// `g` has nothing to probe or the draw repeats the current value.
pub fn monotone_probe(g: &GlyphDesign, t: &DataTable, p: &PaletteConfig, rng: &mut DesignRng) -> Option<Result<(), String>> {
    use glyphlab_core::scales::{resolve, ResolvedGlyph};
    let quant: Vec<(String, String)> = g
        .marks
        .iter()
        .flat_map(|m| m.channels.iter().map(|c| (c.column.clone(), c.channel.clone())))
        .filter(|(col, _)| column_kind(t, col) == ValueKind::Quantitative)
        .collect();
    if quant.is_empty() {
        return None;
    }
    let (column, channel) = &quant[rng.below(quant.len())];
    let row = rng.below(t.row_count());
    let (lo, hi) = t.column(column).unwrap().domain().unwrap();
    let v = lo + (hi - lo) * unit(rng);
    let x = t.column(column).unwrap().number(row).unwrap();
    if v == x {
        return None;
    }
    let probe_table = with_probe_row(t, row, column, v);
    let probe = probe_table.row_count() - 1;
    let a = resolve(g, row, &probe_table, p, 100.0).unwrap();
    let b = resolve(g, probe, &probe_table, p, 100.0).unwrap();
    let property = p.channel(channel).unwrap().property;
    let pick = |rg: &ResolvedGlyph| {
        let m = rg.marks.iter().find(|m| m.legend_entries.iter().any(|e| &e.column == column)).unwrap();
        property_value(m, property)
    };
    let (va, vb) = (pick(&a), pick(&b));
    Some(if (va < vb) == (x < v) && va != vb {
        Ok(())
    } else {
        Err(format!("{column} via {channel}: {x}->{va}, {v}->{vb}"))
    })
}
