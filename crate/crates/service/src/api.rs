use std::sync::Arc;

use axum::extract::{FromRequest, FromRequestParts, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use glyphlab_core::data::{parse_table, Designation, ValueKind};
use glyphlab_core::geometry::Point;
use glyphlab_core::palette::{default_palettes, load_palette, PaletteConfig};
use glyphlab_core::render::{legend, render_small_multiples, render_small_permutables, LegendModel};
use glyphlab_core::sampler::{OverrideRequest, Seed};
use glyphlab_core::scales::resolve;
use glyphlab_core::session::{Operation, Session, SessionInputs, SessionState, ViewMode};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::export::export_zip;
use crate::AppState;

pub const DEFAULT_COLUMNS: usize = 4;
pub const DEFAULT_CELL_SIZE: f64 = 120.0;

/// `Json` whose rejections use the service's error body.
#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
pub struct ApiJson<T>(pub T);

impl<T: Serialize> IntoResponse for ApiJson<T> {
    fn into_response(self) -> Response {
        axum::Json(self.0).into_response()
    }
}

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Query), rejection(ApiError))]
pub struct ApiQuery<T>(pub T);

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub csv: String,
    pub designation: Designation,
    #[serde(default)]
    pub palette: Option<serde_json::Value>,
    pub seed: Seed,
}

#[derive(Debug, Serialize)]
pub struct ColumnInfo {
    pub name: String,
    pub kind: ValueKind,
}

#[derive(Debug, Serialize)]
pub struct TableInfo {
    pub key: String,
    pub rows: Vec<String>,
    pub columns: Vec<ColumnInfo>,
}

/// Session state plus the read-only inputs a client needs to draw controls.
#[derive(Debug, Serialize)]
pub struct SessionView {
    #[serde(flatten)]
    pub state: SessionState,
    pub table: TableInfo,
    pub designation: Designation,
    pub palette: PaletteConfig,
}

impl SessionView {
    pub fn of(s: &Session) -> SessionView {
        let t = &s.inputs().table;
        SessionView {
            state: s.state().clone(),
            table: TableInfo {
                key: t.key_column().to_owned(),
                rows: t.keys().to_vec(),
                columns: t.columns().iter().map(|c| ColumnInfo { name: c.name.clone(), kind: c.kind }).collect(),
            },
            designation: s.inputs().designation.clone(),
            palette: s.inputs().palette.clone(),
        }
    }
}

type ViewResult = Result<ApiJson<SessionView>, ApiError>;

pub async fn create_session(
    State(app): State<Arc<AppState>>,
    ApiJson(req): ApiJson<CreateSession>,
) -> Result<(StatusCode, ApiJson<SessionView>), ApiError> {
    let palette = match req.palette {
        Some(v) => load_palette(&v.to_string())?,
        None => default_palettes(),
    };
    let table = parse_table(&req.csv, &req.designation.key)?;
    let inputs = SessionInputs { table, designation: req.designation, palette };
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = Session::init(id, inputs, req.seed)?;
    let view = SessionView::of(&session);
    app.insert(session).await?;
    Ok((StatusCode::CREATED, ApiJson(view)))
}

pub async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ViewResult {
    let s = app.snapshot(&id).await?;
    Ok(ApiJson(SessionView::of(&s)))
}

#[derive(Debug, Deserialize)]
pub struct AppendBody {
    pub n: usize,
}

pub async fn append(State(app): State<Arc<AppState>>, Path(id): Path<String>, ApiJson(b): ApiJson<AppendBody>) -> ViewResult {
    app.mutate(&id, Operation::Append { n: b.n }).await.map(ApiJson)
}

pub async fn cull(State(app): State<Arc<AppState>>, Path((id, design_id)): Path<(String, String)>) -> ViewResult {
    app.mutate(&id, Operation::Cull { design_id }).await.map(ApiJson)
}

#[derive(Debug, Deserialize)]
pub struct ModeBody {
    pub mode: ViewMode,
}

pub async fn set_mode(State(app): State<Arc<AppState>>, Path(id): Path<String>, ApiJson(b): ApiJson<ModeBody>) -> ViewResult {
    app.mutate(&id, Operation::SetMode { mode: b.mode }).await.map(ApiJson)
}

#[derive(Debug, Deserialize)]
pub struct PageBody {
    pub delta: i64,
}

pub async fn page(State(app): State<Arc<AppState>>, Path(id): Path<String>, ApiJson(b): ApiJson<PageBody>) -> ViewResult {
    app.mutate(&id, Operation::Page { delta: b.delta }).await.map(ApiJson)
}

#[derive(Debug, Deserialize)]
pub struct SelectBody {
    pub design_id: String,
    pub row_key: String,
}

pub async fn select(State(app): State<Arc<AppState>>, Path(id): Path<String>, ApiJson(b): ApiJson<SelectBody>) -> ViewResult {
    app.mutate(&id, Operation::Select { design_id: b.design_id, row_key: b.row_key }).await.map(ApiJson)
}

#[derive(Debug, Deserialize)]
pub struct MoveBody {
    pub position: Point,
}

pub async fn move_glyph(
    State(app): State<Arc<AppState>>,
    Path((id, glyph_key)): Path<(String, String)>,
    ApiJson(b): ApiJson<MoveBody>,
) -> ViewResult {
    app.mutate(&id, Operation::Move { glyph_key, position: b.position }).await.map(ApiJson)
}

#[derive(Debug, Deserialize)]
pub struct ResizeBody {
    pub size: f64,
}

pub async fn resize_glyph(
    State(app): State<Arc<AppState>>,
    Path((id, glyph_key)): Path<(String, String)>,
    ApiJson(b): ApiJson<ResizeBody>,
) -> ViewResult {
    app.mutate(&id, Operation::Resize { glyph_key, size: b.size }).await.map(ApiJson)
}

pub async fn override_design(
    State(app): State<Arc<AppState>>,
    Path((id, design_id)): Path<(String, String)>,
    ApiJson(request): ApiJson<OverrideRequest>,
) -> ViewResult {
    app.mutate(&id, Operation::Override { design_id, request }).await.map(ApiJson)
}

#[derive(Debug, Deserialize)]
pub struct SheetQuery {
    #[serde(default)]
    pub custom: bool,
    pub columns: Option<usize>,
    pub cell: Option<f64>,
}

fn svg(body: String) -> Response {
    ([(header::CONTENT_TYPE, "image/svg+xml")], body).into_response()
}

fn sheet_geometry(q: &SheetQuery) -> Result<(usize, f64), ApiError> {
    let columns = q.columns.unwrap_or(DEFAULT_COLUMNS);
    let cell = q.cell.unwrap_or(DEFAULT_CELL_SIZE);
    if columns == 0 || !(cell.is_finite() && cell > 0.0) {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "bad_request", "columns and cell must be positive"));
    }
    Ok((columns, cell))
}

/// The sheet for the current mode and page.
pub async fn sheet(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    ApiQuery(q): ApiQuery<SheetQuery>,
) -> Result<Response, ApiError> {
    let (columns, cell) = sheet_geometry(&q)?;
    let s = app.snapshot(&id).await?;
    let st = s.state();
    let SessionInputs { table, palette, .. } = &**s.inputs();
    if st.designs.is_empty() {
        return Err(ApiError::new(StatusCode::CONFLICT, "no_designs", "session has no designs to show"));
    }
    let layout = s.layout(columns, cell, q.custom);
    let body = match st.mode {
        ViewMode::SmallMultiples => render_small_multiples(&st.designs[st.page_index], table, palette, &layout)?,
        ViewMode::SmallPermutables => render_small_permutables(&st.designs, table, palette, st.page_index, &layout)?,
    };
    Ok(svg(body))
}

#[derive(Debug, Deserialize)]
pub struct LegendQuery {
    pub design_id: String,
    pub row_key: String,
}

pub async fn legend_for(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    ApiQuery(q): ApiQuery<LegendQuery>,
) -> Result<ApiJson<LegendModel>, ApiError> {
    let s = app.snapshot(&id).await?;
    let g = s
        .design(&q.design_id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown_design", format!("unknown design `{}`", q.design_id)))?;
    let SessionInputs { table, palette, .. } = &**s.inputs();
    let row = table
        .row_of_key(&q.row_key)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown_row", format!("unknown row `{}`", q.row_key)))?;
    let rg = resolve(g, row, table, palette, DEFAULT_CELL_SIZE)?;
    Ok(ApiJson(legend(&rg)))
}

pub async fn export(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    ApiQuery(q): ApiQuery<SheetQuery>,
) -> Result<Response, ApiError> {
    let (columns, cell) = sheet_geometry(&q)?;
    let s = app.snapshot(&id).await?;
    let bytes = export_zip(&s, columns, cell).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "export", e.to_string()))?;
    let disposition = format!("attachment; filename=\"{}.zip\"", s.id());
    Ok(([(header::CONTENT_TYPE, "application/zip".to_owned()), (header::CONTENT_DISPOSITION, disposition)], bytes)
        .into_response())
}
