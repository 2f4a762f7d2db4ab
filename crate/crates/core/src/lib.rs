//! Generative glyph design: sample mark/channel/scaffold combinations for a
//! table, scale them to concrete geometry, and draw them as SVG sheets.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod fixtures;
pub mod geometry;
pub mod palette;
pub mod render;
pub mod sampler;
pub mod scales;
pub mod session;

pub use data::{parse_table, validate_designation, ColumnSet, DataTable, Designation, Violation};
pub use palette::{default_palettes, load_palette, PaletteConfig};
pub use render::{legend, render_glyph, render_small_multiples, render_small_permutables, SheetLayout};
pub use sampler::{sample_batch, sample_design, GlyphDesign, SampleError, Seed};
pub use scales::{resolve, DesignBinding, ResolvedGlyph};
pub use session::{Operation, Session, SessionError, SessionInputs};
