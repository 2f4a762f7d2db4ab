//! Sample urban-mobility table and the two hand-built example designs used
//! throughout the tests and docs. Values are illustrative.

use crate::data::{parse_table, ColumnSet, DataTable, Designation};
use crate::palette::GravityId;
use crate::sampler::{ChannelAssignment, GlyphDesign, MarkAssignment, Seed, DESIGN_SCHEMA_VERSION};

pub const CITIES_CSV: &str = "\
city,region,area,population,bike score,transit score,walk score
Mexico City,Americas,1485,9209944,38,65,71
New York,Americas,784,8336817,70,89,88
Toronto,Americas,630,2794356,61,78,71
London,Europe,1572,8982000,71,90,84
Paris,Europe,105,2161000,76,96,94
Berlin,Europe,891,3645000,80,88,86
Tokyo,Asia,2194,13960000,64,95,86
Seoul,Asia,605,9776000,45,86,79
Singapore,Asia,728,5686000,52,82,75
Sydney,Oceania,12368,5312000,40,70,68
Melbourne,Oceania,9993,5078000,55,72,70
Auckland,Oceania,1086,1657000,30,55,60
";

/// The city table plus a `density` column (seven encodable columns).
pub const CITIES_EXTENDED_CSV: &str = "\
city,region,area,population,bike score,transit score,walk score,density
Mexico City,Americas,1485,9209944,38,65,71,6202
New York,Americas,784,8336817,70,89,88,10634
Toronto,Americas,630,2794356,61,78,71,4436
London,Europe,1572,8982000,71,90,84,5714
Paris,Europe,105,2161000,76,96,94,20581
Berlin,Europe,891,3645000,80,88,86,4091
Tokyo,Asia,2194,13960000,64,95,86,6363
Seoul,Asia,605,9776000,45,86,79,16159
Singapore,Asia,728,5686000,52,82,75,7810
Sydney,Oceania,12368,5312000,40,70,68,429
Melbourne,Oceania,9993,5078000,55,72,70,508
Auckland,Oceania,1086,1657000,30,55,60,1526
";

pub fn cities() -> DataTable {
    parse_table(CITIES_CSV, "city").expect("fixture parses")
}

pub fn cities_extended() -> DataTable {
    parse_table(CITIES_EXTENDED_CSV, "city").expect("fixture parses")
}

/// Conjunction {region, area, population} then repeat {bike, transit, walk}.
pub fn mobility_designation() -> Designation {
    Designation::new(
        "city",
        vec![
            ColumnSet::conjunction(["region", "area", "population"]),
            ColumnSet::repeat(["bike score", "transit score", "walk score"]),
        ],
    )
}

pub const MOBILITY_DESIGNATION_JSON: &str = r#"{
  "key": "city",
  "sets": [
    { "columns": ["region", "area", "population"], "designation": "conjunction" },
    { "columns": ["bike score", "transit score", "walk score"], "designation": "repeat" }
  ]
}"#;

fn explicit(id: &str, set0: (&str, [&str; 3]), repeat: (&str, &str), scaffold: &str, gravity: GravityId) -> GlyphDesign {
    let (shape0, [c_region, c_area, c_pop]) = set0;
    let ca = |column: &str, channel: &str, colors: Vec<usize>| ChannelAssignment {
        column: column.into(),
        channel: channel.into(),
        colors,
    };
    GlyphDesign {
        schema_version: DESIGN_SCHEMA_VERSION,
        id: id.into(),
        revision: 0,
        seed: Seed(0),
        designation: mobility_designation(),
        marks: vec![
            MarkAssignment {
                set_index: 0,
                shape: shape0.into(),
                repeat: false,
                channels: vec![
                    ca("region", c_region, vec![0, 1, 2, 3]),
                    ca("area", c_area, vec![]),
                    ca("population", c_pop, vec![]),
                ],
            },
            MarkAssignment {
                set_index: 1,
                shape: repeat.0.into(),
                repeat: true,
                channels: vec![
                    ca("bike score", repeat.1, vec![4]),
                    ca("transit score", repeat.1, vec![5]),
                    ca("walk score", repeat.1, vec![6]),
                ],
            },
        ],
        scaffold: scaffold.into(),
        gravity,
    }
}

/// Drop (region→color, area→size, population→rotation) with amplitude
/// waves on a weak-gravity spiral.
pub fn design_a() -> GlyphDesign {
    explicit("A", ("drop", ["color", "size", "rotation"]), ("wave", "amplitude"), "spiral", GravityId::Weak)
}

/// Hexagon (region→color, area→rotation, population→alpha) with
/// rotation-encoded stars on a medium-gravity triangle.
pub fn design_b() -> GlyphDesign {
    explicit("B", ("hexagon", ["color", "rotation", "alpha"]), ("star", "rotation"), "triangle", GravityId::Medium)
}
