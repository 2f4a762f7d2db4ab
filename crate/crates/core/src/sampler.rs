//! Constrained random sampling of glyph designs.
//!
//! Randomness comes from ChaCha8 seeded through `seed_from_u64`, which is
//! value-stable across platforms and crate versions. Sub-seeds are derived
//! with SplitMix64: `derive(seed, i) = mix(seed ⊕ mix(i + γ))` where `γ` is
//! the golden-ratio increment. Uniform integer draws use rejection sampling
//! on raw `u64` output, so no distribution code from other crates shapes
//! the stream.
//!
//! Draw order inside one design: for each set in order, the shape, then
//! each column's channel in column order; then scaffold; then gravity.

use std::collections::{BTreeSet, HashSet};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    compatible_shapes, has_shape_matching, validate_designation, DataTable, Designation, SetKind,
    ValueKind, Violation,
};
use crate::palette::{ChannelSpec, GravityId, PaletteConfig, ShapeClass};
use crate::scales::assign_colors;

pub const DESIGN_SCHEMA_VERSION: u32 = 1;

/// Consecutive duplicate draws tolerated before a batch gives up.
pub const RETRY_BUDGET: usize = 256;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit sampling seed. Serialized as a decimal string so JSON clients
/// without 64-bit integers keep it intact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

impl Seed {
    /// The `index`-th sub-seed of this seed.
    pub fn derive(self, index: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(index)))
    }

    pub fn rng(self) -> DesignRng {
        DesignRng(ChaCha8Rng::seed_from_u64(self.0))
    }
}

impl Serialize for Seed {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Seed {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(n) => Ok(Seed(n)),
            Repr::Str(s) => s.parse().map(Seed).map_err(serde::de::Error::custom),
        }
    }
}

pub struct DesignRng(ChaCha8Rng);

impl DesignRng {
    /// Uniform index in `0..n`, `n > 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "empty choice");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.0.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChannelAssignment {
    pub column: String,
    pub channel: String,
    /// Palette color indices: one per category for categorical columns, one
    /// for a repeat member, none otherwise.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub colors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkAssignment {
    pub set_index: usize,
    pub shape: String,
    pub repeat: bool,
    pub channels: Vec<ChannelAssignment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlyphDesign {
    pub schema_version: u32,
    pub id: String,
    pub revision: u32,
    pub seed: Seed,
    pub designation: Designation,
    pub marks: Vec<MarkAssignment>,
    pub scaffold: String,
    pub gravity: GravityId,
}

impl GlyphDesign {
    /// Everything that makes two designs look different.
    pub fn signature(&self) -> (&[MarkAssignment], &str, GravityId) {
        (&self.marks, &self.scaffold, self.gravity)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("design serializes")
    }

    pub fn mark(&self, set_index: usize) -> Option<&MarkAssignment> {
        self.marks.get(set_index)
    }
}

pub fn design_id(seed: Seed) -> String {
    format!("g{:016x}", seed.0)
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SampleError {
    #[error("set {set_index}: unsatisfiable conjunction")]
    UnsatisfiableConjunction { set_index: usize },
    #[error("palette exhausted")]
    PaletteExhausted,
    #[error("needs {required} colors, palette provides {available}")]
    ColorBudgetExceeded { required: usize, available: usize },
    #[error("invalid designation: {0}")]
    InvalidDesignation(Violation),
}

impl From<Violation> for SampleError {
    fn from(v: Violation) -> Self {
        match v {
            Violation::UnsatisfiableConjunction { set_index } => {
                SampleError::UnsatisfiableConjunction { set_index }
            }
            Violation::TooManySets { .. } | Violation::NoShapeAssignment => SampleError::PaletteExhausted,
            Violation::ColorBudgetExceeded { required, available } => {
                SampleError::ColorBudgetExceeded { required, available }
            }
            other => SampleError::InvalidDesignation(other),
        }
    }
}

fn channels_of_kind(p: &PaletteConfig, kind: ValueKind, class: ShapeClass) -> Vec<&ChannelSpec> {
    p.channels
        .iter()
        .filter(|c| c.value_kind == kind && c.applies_to.includes(class))
        .collect()
}

/// Samples one design. Identical inputs and seed give an identical design.
pub fn sample_design(
    d: &Designation,
    t: &DataTable,
    p: &PaletteConfig,
    seed: Seed,
) -> Result<GlyphDesign, SampleError> {
    if let Some(v) = validate_designation(d, t, p).into_iter().next() {
        return Err(v.into());
    }
    let colors = assign_colors(d, t, p).map_err(|_| SampleError::PaletteExhausted)?;
    let compatible = compatible_shapes(d, t, p);
    let mut rng = seed.rng();
    let mut taken = vec![false; p.mark_shapes.len()];
    let mut marks = Vec::with_capacity(d.sets.len());

    for (i, set) in d.sets.iter().enumerate() {
        // Keep only shapes that still leave the later sets a full assignment.
        let candidates: Vec<usize> = compatible[i]
            .iter()
            .copied()
            .filter(|&s| !taken[s])
            .filter(|&s| {
                let rest: Vec<Vec<usize>> = compatible[i + 1..]
                    .iter()
                    .map(|c| c.iter().copied().filter(|&x| !taken[x] && x != s).collect())
                    .collect();
                has_shape_matching(&rest, p.mark_shapes.len())
            })
            .collect();
        if candidates.is_empty() {
            return Err(SampleError::PaletteExhausted);
        }
        let shape_index = *rng.pick(&candidates);
        taken[shape_index] = true;
        let shape = &p.mark_shapes[shape_index];

        let channels = if set.designation == SetKind::Repeat {
            let options = channels_of_kind(p, ValueKind::Quantitative, shape.class);
            let channel = rng.pick(&options).id.clone();
            set.columns
                .iter()
                .map(|col| ChannelAssignment {
                    column: col.clone(),
                    channel: channel.clone(),
                    colors: vec![colors.repeat_color(col).expect("budgeted")],
                })
                .collect()
        } else {
            let mut used: HashSet<&str> = HashSet::new();
            let mut out = Vec::with_capacity(set.columns.len());
            for col in &set.columns {
                let column = t.column(col).expect("validated");
                let options: Vec<&ChannelSpec> = channels_of_kind(p, column.kind, shape.class)
                    .into_iter()
                    .filter(|c| !used.contains(c.id.as_str()))
                    .collect();
                if options.is_empty() {
                    return Err(SampleError::UnsatisfiableConjunction { set_index: i });
                }
                let channel = *rng.pick(&options);
                used.insert(channel.id.as_str());
                let colors = match column.kind {
                    ValueKind::Categorical => colors.category_colors(col, column),
                    ValueKind::Quantitative => Vec::new(),
                };
                out.push(ChannelAssignment { column: col.clone(), channel: channel.id.clone(), colors });
            }
            out
        };
        marks.push(MarkAssignment {
            set_index: i,
            shape: shape.id.clone(),
            repeat: set.designation == SetKind::Repeat,
            channels,
        });
    }

    let scaffold = rng.pick(&p.scaffolds).id.clone();
    let gravity = rng.pick(&p.gravities).id;
    Ok(GlyphDesign {
        schema_version: DESIGN_SCHEMA_VERSION,
        id: design_id(seed),
        revision: 0,
        seed,
        designation: d.clone(),
        marks,
        scaffold,
        gravity,
    })
}

/// Draws the next design from sub-seed `base‖cursor` onward that differs
/// from every design in `existing`, advancing `cursor` past each attempt.
pub fn draw_unique(
    d: &Designation,
    t: &DataTable,
    p: &PaletteConfig,
    base: Seed,
    cursor: &mut u64,
    existing: &[GlyphDesign],
) -> Result<GlyphDesign, SampleError> {
    for _ in 0..RETRY_BUDGET {
        let seed = base.derive(*cursor);
        *cursor += 1;
        let design = sample_design(d, t, p, seed)?;
        if existing.iter().all(|e| e.signature() != design.signature()) {
            return Ok(design);
        }
    }
    Err(SampleError::PaletteExhausted)
}

/// `n` pairwise-distinct designs from sub-seeds `base‖0, base‖1, …`;
/// duplicates are skipped in favour of the next sub-seed.
pub fn sample_batch(
    d: &Designation,
    t: &DataTable,
    p: &PaletteConfig,
    base: Seed,
    n: usize,
) -> Result<Vec<GlyphDesign>, SampleError> {
    let mut cursor = 0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let design = draw_unique(d, t, p, base, &mut cursor, &out)?;
        out.push(design);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OverrideRequest {
    pub set_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum OverrideError {
    #[error("shape `{0}` is already used by another mark")]
    ShapeAlreadyUsed(String),
    #[error("channel `{0}` cannot be used here")]
    IncompatibleChannel(String),
    #[error("unknown override target: {0}")]
    UnknownTarget(String),
}

/// Swaps the shape and/or one column's channel on a single mark.
///
/// A shape swap keeps every channel still legal on the new shape class and
/// moves the rest to the lexicographically first legal unused channel of
/// the same kind. Id and seed stay; `revision` goes up by one.
pub fn override_assignment(
    g: &GlyphDesign,
    p: &PaletteConfig,
    req: &OverrideRequest,
) -> Result<GlyphDesign, OverrideError> {
    let mut out = g.clone();
    let mark = out
        .marks
        .get(req.set_index)
        .ok_or_else(|| OverrideError::UnknownTarget(format!("set {}", req.set_index)))?
        .clone();
    let kind_of = |channel: &str| p.channel(channel).map(|c| c.value_kind);

    let mut shape_id = mark.shape.clone();
    if let Some(new_shape) = &req.shape {
        if p.shape(new_shape).is_none() {
            return Err(OverrideError::UnknownTarget(format!("shape {new_shape}")));
        }
        let clash = out.marks.iter().any(|m| m.set_index != req.set_index && &m.shape == new_shape);
        if clash {
            return Err(OverrideError::ShapeAlreadyUsed(new_shape.clone()));
        }
        shape_id = new_shape.clone();
    }
    let class = p
        .shape(&shape_id)
        .ok_or_else(|| OverrideError::UnknownTarget(format!("shape {shape_id}")))?
        .class;
    let mut channels = mark.channels.clone();

    if req.column.is_some() || req.channel.is_some() {
        let new_channel = req
            .channel
            .as_ref()
            .ok_or_else(|| OverrideError::UnknownTarget("column given without channel".into()))?;
        let spec = p
            .channel(new_channel)
            .ok_or_else(|| OverrideError::UnknownTarget(format!("channel {new_channel}")))?;
        let targets: Vec<usize> = match (&req.column, mark.repeat) {
            (_, true) => {
                if let Some(col) = &req.column {
                    if !channels.iter().any(|c| &c.column == col) {
                        return Err(OverrideError::UnknownTarget(format!("column {col}")));
                    }
                }
                (0..channels.len()).collect()
            }
            (Some(col), false) => vec![channels
                .iter()
                .position(|c| &c.column == col)
                .ok_or_else(|| OverrideError::UnknownTarget(format!("column {col}")))?],
            (None, false) if channels.len() == 1 => vec![0],
            (None, false) => {
                return Err(OverrideError::UnknownTarget("column required for conjunction".into()))
            }
        };
        let current_kind = kind_of(&channels[targets[0]].channel);
        let taken_elsewhere = !mark.repeat
            && channels
                .iter()
                .enumerate()
                .any(|(i, c)| !targets.contains(&i) && &c.channel == new_channel);
        if Some(spec.value_kind) != current_kind || !spec.applies_to.includes(class) || taken_elsewhere {
            return Err(OverrideError::IncompatibleChannel(new_channel.clone()));
        }
        for i in targets {
            channels[i].channel = new_channel.clone();
        }
    }

    // Remap whatever the (possibly new) shape class cannot carry.
    let legal = |id: &str| p.channel(id).is_some_and(|c| c.applies_to.includes(class));
    let mut held: BTreeSet<String> =
        channels.iter().filter(|c| legal(&c.channel)).map(|c| c.channel.clone()).collect();
    if mark.repeat {
        if !legal(&channels[0].channel) {
            let mut options: Vec<&str> = p
                .quantitative_channels(class)
                .map(|c| c.id.as_str())
                .collect();
            options.sort_unstable();
            let pick = options
                .first()
                .ok_or_else(|| OverrideError::IncompatibleChannel(channels[0].channel.clone()))?
                .to_string();
            for c in &mut channels {
                c.channel = pick.clone();
            }
        }
    } else {
        for c in &mut channels {
            if legal(&c.channel) {
                continue;
            }
            let kind = kind_of(&c.channel)
                .ok_or_else(|| OverrideError::UnknownTarget(format!("channel {}", c.channel)))?;
            let mut options: Vec<&str> = p
                .channels
                .iter()
                .filter(|s| s.value_kind == kind && s.applies_to.includes(class))
                .map(|s| s.id.as_str())
                .filter(|id| !held.contains(*id))
                .collect();
            options.sort_unstable();
            let pick = options
                .first()
                .ok_or_else(|| OverrideError::IncompatibleChannel(c.channel.clone()))?
                .to_string();
            held.insert(pick.clone());
            c.channel = pick;
        }
    }

    let slot = &mut out.marks[req.set_index];
    slot.shape = shape_id;
    slot.channels = channels;
    out.revision += 1;
    Ok(out)
}

/// Checks every structural invariant of a design against its inputs.
pub fn check_design(g: &GlyphDesign, t: &DataTable, p: &PaletteConfig) -> Result<(), String> {
    let d = &g.designation;
    if g.marks.len() != d.sets.len() {
        return Err(format!("{} marks for {} sets", g.marks.len(), d.sets.len()));
    }
    let mut shapes = HashSet::new();
    let mut all_colors = HashSet::new();
    for (i, (mark, set)) in g.marks.iter().zip(&d.sets).enumerate() {
        if mark.set_index != i {
            return Err(format!("mark {i} carries set index {}", mark.set_index));
        }
        if mark.repeat != (set.designation == SetKind::Repeat) {
            return Err(format!("mark {i}: repeat flag disagrees with designation"));
        }
        let shape = p.shape(&mark.shape).ok_or_else(|| format!("unknown shape {}", mark.shape))?;
        if !shapes.insert(mark.shape.as_str()) {
            return Err(format!("shape {} used twice", mark.shape));
        }
        let cols: Vec<&str> = mark.channels.iter().map(|c| c.column.as_str()).collect();
        let want: Vec<&str> = set.columns.iter().map(String::as_str).collect();
        if cols != want {
            return Err(format!("mark {i}: columns {cols:?} differ from set {want:?}"));
        }
        let mut mark_channels = HashSet::new();
        for ca in &mark.channels {
            let spec = p.channel(&ca.channel).ok_or_else(|| format!("unknown channel {}", ca.channel))?;
            if !spec.applies_to.includes(shape.class) {
                return Err(format!("channel {} incompatible with {}", ca.channel, mark.shape));
            }
            let column = t.column(&ca.column).ok_or_else(|| format!("unknown column {}", ca.column))?;
            if column.kind != spec.value_kind {
                return Err(format!("column {} bound to {:?} channel", ca.column, spec.value_kind));
            }
            if !mark.repeat && !mark_channels.insert(ca.channel.as_str()) {
                return Err(format!("mark {i}: channel {} used twice", ca.channel));
            }
            let expected_colors = match (mark.repeat, column.kind) {
                (true, _) => 1,
                (false, ValueKind::Categorical) => column.categories().len(),
                (false, ValueKind::Quantitative) => 0,
            };
            if ca.colors.len() != expected_colors {
                return Err(format!("column {} holds {} colors", ca.column, ca.colors.len()));
            }
            for &c in &ca.colors {
                if c >= p.colors.len() || !all_colors.insert(c) {
                    return Err(format!("color index {c} reused or out of range"));
                }
            }
        }
        if mark.repeat {
            let first = &mark.channels[0].channel;
            if mark.channels.iter().any(|c| &c.channel != first) {
                return Err(format!("repeat mark {i} mixes channels"));
            }
        }
    }
    if p.scaffold(&g.scaffold).is_none() {
        return Err(format!("unknown scaffold {}", g.scaffold));
    }
    if p.gravity(g.gravity).is_none() {
        return Err(format!("unknown gravity {:?}", g.gravity));
    }
    Ok(())
}
