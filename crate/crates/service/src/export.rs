//! Zip bundle of every sheet in a session plus the design list.

use std::io::{Cursor, Write};

use glyphlab_core::render::{render_small_multiples, render_small_permutables, LayoutMode, SheetLayout};
use glyphlab_core::scales::ResolveError;
use glyphlab_core::session::Session;
use zip::write::SimpleFileOptions;
use zip::ZipWriter;

/// Sheet file names; path separators in row keys become underscores.
pub fn multiples_name(design_id: &str) -> String {
    format!("{}.multiples.svg", safe(design_id))
}

pub fn permutables_name(row_key: &str) -> String {
    format!("{}.permutables.svg", safe(row_key))
}

fn safe(name: &str) -> String {
    name.chars().map(|c| if matches!(c, '/' | '\\' | '\0') { '_' } else { c }).collect()
}

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error(transparent)]
    Render(#[from] ResolveError),
    #[error(transparent)]
    Zip(#[from] zip::result::ZipError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `designs.json`, one small-multiples sheet per design and one
/// small-permutables sheet per row.
pub fn export_zip(session: &Session, columns: usize, cell_size: f64) -> Result<Vec<u8>, ExportError> {
    let inputs = session.inputs();
    let (t, p) = (&inputs.table, &inputs.palette);
    let designs = &session.state().designs;
    let options = SimpleFileOptions::default().last_modified_time(zip::DateTime::default());
    let mut zip = ZipWriter::new(Cursor::new(Vec::new()));

    zip.start_file("designs.json", options)?;
    zip.write_all(serde_json::to_string_pretty(designs).expect("designs serialize").as_bytes())?;
    let multiples = SheetLayout::grid(LayoutMode::SmallMultiples, columns, cell_size);
    for g in designs {
        zip.start_file(multiples_name(&g.id), options)?;
        zip.write_all(render_small_multiples(g, t, p, &multiples)?.as_bytes())?;
    }
    if !designs.is_empty() {
        let permutables = SheetLayout::grid(LayoutMode::SmallPermutables, columns, cell_size);
        for row in 0..t.row_count() {
            zip.start_file(permutables_name(t.key(row)), options)?;
            zip.write_all(render_small_permutables(designs, t, p, row, &permutables)?.as_bytes())?;
        }
    }
    Ok(zip.finish()?.into_inner())
}
