//! Curation state machine: generate, review, cull, arrange.
//!
//! Every mutation goes through [`Session::apply`]. Successful operations are
//! appended to the log; failed ones leave the state untouched. Replaying the
//! log from the initial state reproduces the serialized state exactly.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::data::{parse_table, validate_designation, DataError, DataTable, Designation, Violation};
use crate::geometry::Point;
use crate::palette::PaletteConfig;
use crate::render::{glyph_key, split_glyph_key, GlyphOverride, LayoutMode, SheetLayout};
use crate::sampler::{
    check_design, draw_unique, override_assignment, GlyphDesign, OverrideError, OverrideRequest,
    SampleError, Seed,
};

/// Designs generated by [`Session::init`].
pub const INITIAL_DESIGNS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewMode {
    SmallMultiples,
    SmallPermutables,
}

impl ViewMode {
    pub fn toggled(self) -> ViewMode {
        match self {
            ViewMode::SmallMultiples => ViewMode::SmallPermutables,
            ViewMode::SmallPermutables => ViewMode::SmallMultiples,
        }
    }

    pub fn layout_mode(self) -> LayoutMode {
        match self {
            ViewMode::SmallMultiples => LayoutMode::SmallMultiples,
            ViewMode::SmallPermutables => LayoutMode::SmallPermutables,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub design_id: String,
    pub row_key: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Operation {
    Append { n: usize },
    Cull { design_id: String },
    SetMode { mode: ViewMode },
    Page { delta: i64 },
    Select { design_id: String, row_key: String },
    Move { glyph_key: String, position: Point },
    Resize { glyph_key: String, size: f64 },
    Override { design_id: String, request: OverrideRequest },
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SessionError {
    #[error("invalid designation: {}", join(.0))]
    InvalidDesignation(Vec<Violation>),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Override(#[from] OverrideError),
    #[error("unknown design `{0}`")]
    UnknownDesign(String),
    #[error("unknown row `{0}`")]
    UnknownRow(String),
    #[error("malformed glyph key `{0}`")]
    BadGlyphKey(String),
    #[error("nothing is selected")]
    NothingSelected,
    #[error("size must be positive")]
    NonPositiveSize,
    #[error("snapshot does not match its operation log")]
    CorruptSnapshot,
}

fn join(vs: &[Violation]) -> String {
    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// The immutable inputs a session is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionInputs {
    pub table: DataTable,
    pub designation: Designation,
    pub palette: PaletteConfig,
}

/// Everything an operation can change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub id: String,
    pub seed: Seed,
    pub designs: Vec<GlyphDesign>,
    pub mode: ViewMode,
    /// Design index in small multiples, row index in small permutables.
    pub page_index: usize,
    /// Page the other mode was showing, restored on toggle when nothing is
    /// selected.
    pub parked_page: usize,
    pub selection: Option<Selection>,
    pub overrides: BTreeMap<String, GlyphOverride>,
    pub rng_cursor: u64,
    pub log: Vec<Operation>,
}

/// On-disk form: inputs plus state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub key: String,
    pub csv: String,
    pub designation: Designation,
    pub palette: PaletteConfig,
    pub state: SessionState,
}

#[derive(Debug, Clone)]
pub struct Session {
    inputs: Arc<SessionInputs>,
    state: SessionState,
}

impl Session {
    /// Validates the designation and draws the first designs.
    pub fn init(id: impl Into<String>, inputs: SessionInputs, seed: Seed) -> Result<Session, SessionError> {
        let violations = validate_designation(&inputs.designation, &inputs.table, &inputs.palette);
        if !violations.is_empty() {
            return Err(SessionError::InvalidDesignation(violations));
        }
        let mut session = Session {
            inputs: Arc::new(inputs),
            state: SessionState {
                id: id.into(),
                seed,
                designs: Vec::new(),
                mode: ViewMode::SmallMultiples,
                page_index: 0,
                parked_page: 0,
                selection: None,
                overrides: BTreeMap::new(),
                rng_cursor: 0,
                log: Vec::new(),
            },
        };
        session.append(INITIAL_DESIGNS)?;
        Ok(session)
    }

    /// Rebuilds a session by replaying `log` from its initial state.
    pub fn replay(
        id: impl Into<String>,
        inputs: Arc<SessionInputs>,
        seed: Seed,
        log: &[Operation],
    ) -> Result<Session, SessionError> {
        let fresh = Session::init(id, (*inputs).clone(), seed)?;
        let mut session = Session { inputs, state: fresh.state };
        for op in log {
            session.apply(op.clone())?;
        }
        Ok(session)
    }

    pub fn inputs(&self) -> &Arc<SessionInputs> {
        &self.inputs
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn id(&self) -> &str {
        &self.state.id
    }

    pub fn design(&self, design_id: &str) -> Option<&GlyphDesign> {
        self.state.designs.iter().find(|g| g.id == design_id)
    }

    pub fn state_json(&self) -> String {
        serde_json::to_string(&self.state).expect("session state serializes")
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            key: self.inputs.table.key_column().to_owned(),
            csv: self.inputs.table.to_csv(),
            designation: self.inputs.designation.clone(),
            palette: self.inputs.palette.clone(),
            state: self.state.clone(),
        }
    }

    /// Restores a snapshot, checking that its log replays to its state.
    pub fn from_snapshot(snap: SessionSnapshot) -> Result<Session, SessionError> {
        let inputs = Arc::new(SessionInputs {
            table: parse_table(&snap.csv, &snap.key)?,
            designation: snap.designation,
            palette: snap.palette,
        });
        let s = &snap.state;
        let session = Session::replay(s.id.clone(), inputs, s.seed, &s.log)?;
        if session.state != snap.state {
            return Err(SessionError::CorruptSnapshot);
        }
        Ok(session)
    }

    /// Layout for the current sheet; overrides only take effect in custom
    /// rendering.
    pub fn layout(&self, columns: usize, cell_size: f64, custom: bool) -> SheetLayout {
        let mode = if custom { LayoutMode::Custom } else { self.state.mode.layout_mode() };
        let mut layout = SheetLayout::grid(mode, columns, cell_size);
        if custom {
            layout.overrides = self.state.overrides.clone();
        }
        layout
    }

    fn page_count(&self, mode: ViewMode) -> usize {
        match mode {
            ViewMode::SmallMultiples => self.state.designs.len(),
            ViewMode::SmallPermutables => self.inputs.table.row_count(),
        }
    }

    fn clamp_page(&self, mode: ViewMode, page: usize) -> usize {
        page.min(self.page_count(mode).saturating_sub(1))
    }

    fn design_index(&self, design_id: &str) -> Result<usize, SessionError> {
        self.state
            .designs
            .iter()
            .position(|g| g.id == design_id)
            .ok_or_else(|| SessionError::UnknownDesign(design_id.to_owned()))
    }

    fn row_index(&self, row_key: &str) -> Result<usize, SessionError> {
        self.inputs
            .table
            .row_of_key(row_key)
            .ok_or_else(|| SessionError::UnknownRow(row_key.to_owned()))
    }

    fn check_glyph_key(&self, key: &str) -> Result<(), SessionError> {
        let (design_id, row_key) =
            split_glyph_key(key).ok_or_else(|| SessionError::BadGlyphKey(key.to_owned()))?;
        self.design_index(design_id)?;
        self.row_index(row_key)?;
        Ok(())
    }

    /// Applies one operation; on error the session is unchanged.
    pub fn apply(&mut self, op: Operation) -> Result<(), SessionError> {
        let before = self.state.clone();
        match self.apply_inner(&op) {
            Ok(()) => {
                self.state.log.push(op);
                Ok(())
            }
            Err(e) => {
                self.state = before;
                Err(e)
            }
        }
    }

    fn apply_inner(&mut self, op: &Operation) -> Result<(), SessionError> {
        match op {
            Operation::Append { n } => self.append(*n),
            Operation::Cull { design_id } => self.cull(design_id),
            Operation::SetMode { mode } => {
                self.set_mode(*mode);
                Ok(())
            }
            Operation::Page { delta } => {
                let count = self.page_count(self.state.mode) as i64;
                let target = (self.state.page_index as i64).saturating_add(*delta);
                self.state.page_index = target.clamp(0, (count - 1).max(0)) as usize;
                Ok(())
            }
            Operation::Select { design_id, row_key } => {
                self.design_index(design_id)?;
                self.row_index(row_key)?;
                self.state.selection =
                    Some(Selection { design_id: design_id.clone(), row_key: row_key.clone() });
                Ok(())
            }
            Operation::Move { glyph_key, position } => {
                self.require_selection()?;
                self.check_glyph_key(glyph_key)?;
                self.state.overrides.entry(glyph_key.clone()).or_default().position = Some(*position);
                Ok(())
            }
            Operation::Resize { glyph_key, size } => {
                self.require_selection()?;
                if !(size.is_finite() && *size > 0.0) {
                    return Err(SessionError::NonPositiveSize);
                }
                self.check_glyph_key(glyph_key)?;
                self.state.overrides.entry(glyph_key.clone()).or_default().size = Some(*size);
                Ok(())
            }
            Operation::Override { design_id, request } => {
                let i = self.design_index(design_id)?;
                let updated = override_assignment(&self.state.designs[i], &self.inputs.palette, request)?;
                self.state.designs[i] = updated;
                Ok(())
            }
        }
    }

    fn require_selection(&self) -> Result<(), SessionError> {
        self.state.selection.as_ref().map(|_| ()).ok_or(SessionError::NothingSelected)
    }

    fn append(&mut self, n: usize) -> Result<(), SessionError> {
        let SessionInputs { table, designation, palette } = &*self.inputs;
        for _ in 0..n {
            let g = draw_unique(
                designation,
                table,
                palette,
                self.state.seed,
                &mut self.state.rng_cursor,
                &self.state.designs,
            )?;
            self.state.designs.push(g);
        }
        Ok(())
    }

    fn cull(&mut self, design_id: &str) -> Result<(), SessionError> {
        let i = self.design_index(design_id)?;
        self.state.designs.remove(i);
        if self.state.selection.as_ref().is_some_and(|s| s.design_id == design_id) {
            self.state.selection = None;
        }
        let prefix = glyph_key(design_id, "");
        self.state.overrides.retain(|k, _| !k.starts_with(&prefix));
        let remap = |page: usize| if page > i { page - 1 } else { page };
        match self.state.mode {
            ViewMode::SmallMultiples => {
                self.state.page_index = self.clamp_page(ViewMode::SmallMultiples, remap(self.state.page_index));
            }
            ViewMode::SmallPermutables => {
                self.state.parked_page = self.clamp_page(ViewMode::SmallMultiples, remap(self.state.parked_page));
            }
        }
        Ok(())
    }

    fn set_mode(&mut self, mode: ViewMode) {
        if mode == self.state.mode {
            return;
        }
        let selected = self.state.selection.as_ref().and_then(|s| match mode {
            ViewMode::SmallMultiples => self.design_index(&s.design_id).ok(),
            ViewMode::SmallPermutables => self.row_index(&s.row_key).ok(),
        });
        let target = selected.unwrap_or(self.state.parked_page);
        self.state.parked_page = self.state.page_index;
        self.state.page_index = self.clamp_page(mode, target);
        self.state.mode = mode;
    }

    pub fn append_designs(&mut self, n: usize) -> Result<(), SessionError> {
        self.apply(Operation::Append { n })
    }

    pub fn cull_design(&mut self, design_id: &str) -> Result<(), SessionError> {
        self.apply(Operation::Cull { design_id: design_id.to_owned() })
    }

    pub fn toggle_mode(&mut self) -> Result<(), SessionError> {
        self.apply(Operation::SetMode { mode: self.state.mode.toggled() })
    }

    pub fn page(&mut self, delta: i64) -> Result<(), SessionError> {
        self.apply(Operation::Page { delta })
    }

    pub fn select(&mut self, design_id: &str, row_key: &str) -> Result<(), SessionError> {
        self.apply(Operation::Select { design_id: design_id.to_owned(), row_key: row_key.to_owned() })
    }

    pub fn move_glyph(&mut self, glyph_key: &str, position: Point) -> Result<(), SessionError> {
        self.apply(Operation::Move { glyph_key: glyph_key.to_owned(), position })
    }

    pub fn resize_glyph(&mut self, glyph_key: &str, size: f64) -> Result<(), SessionError> {
        self.apply(Operation::Resize { glyph_key: glyph_key.to_owned(), size })
    }

    pub fn override_design(&mut self, design_id: &str, request: OverrideRequest) -> Result<(), SessionError> {
        self.apply(Operation::Override { design_id: design_id.to_owned(), request })
    }

    /// Checks every session invariant; used by the fuzz tests.
    pub fn check_invariants(&self) -> Result<(), String> {
        let s = &self.state;
        let SessionInputs { table, palette, .. } = &*self.inputs;
        let count = self.page_count(s.mode);
        if s.page_index >= count.max(1) {
            return Err(format!("page {} out of range for {count} pages", s.page_index));
        }
        if s.parked_page >= self.page_count(s.mode.toggled()).max(1) {
            return Err(format!("parked page {} out of range", s.parked_page));
        }
        if let Some(sel) = &s.selection {
            if self.design(&sel.design_id).is_none() || table.row_of_key(&sel.row_key).is_none() {
                return Err(format!("dangling selection {sel:?}"));
            }
        }
        for key in s.overrides.keys() {
            self.check_glyph_key(key).map_err(|e| format!("override {key}: {e}"))?;
        }
        let mut ids = HashSet::new();
        let mut signatures = HashSet::new();
        for g in &s.designs {
            if !ids.insert(g.id.as_str()) {
                return Err(format!("duplicate design id {}", g.id));
            }
            if g.revision == 0 && !signatures.insert(g.signature()) {
                return Err(format!("duplicate sampled design {}", g.id));
            }
            if g.designation != self.inputs.designation {
                return Err(format!("design {} has a foreign designation", g.id));
            }
            check_design(g, table, palette).map_err(|e| format!("design {}: {e}", g.id))?;
        }
        Ok(())
    }
}
