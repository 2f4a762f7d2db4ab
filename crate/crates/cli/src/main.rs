//! `glyphlab`: batch gallery generation, designation checks, sheet
//! rendering and the curation service.
//!
//! Exit codes: 0 success, 1 usage or validation failure, 2 I/O failure.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use glyphlab_core::data::{parse_table, validate_designation, ColumnSet, DataTable, Designation};
use glyphlab_core::palette::{default_palettes, load_palette, PaletteConfig};
use glyphlab_core::render::{render_small_multiples, render_small_permutables, LayoutMode, SheetLayout};
use glyphlab_core::sampler::{check_design, sample_batch, GlyphDesign, Seed};
use glyphlab_service::export::{multiples_name, permutables_name};
use glyphlab_service::AppState;

#[derive(Debug, Parser)]
#[command(name = "glyphlab", version, about = "Generate and curate glyph design galleries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample designs and write their sheets.
    Generate(Generate),
    /// Check a designation (and palette) against a table.
    Validate(Validate),
    /// Re-render sheets from an existing designs.json.
    Render(Render),
    /// Run the HTTP service.
    Serve(Serve),
}

#[derive(Debug, Args)]
struct Inputs {
    /// CSV table.
    #[arg(long)]
    data: PathBuf,
    /// Key column of the table.
    #[arg(long)]
    key: String,
    /// Palette JSON; the built-in palettes when omitted.
    #[arg(long)]
    palette: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SheetArgs {
    /// Comma-separated row keys that get a small-permutables sheet.
    #[arg(long, value_delimiter = ',')]
    rows: Vec<String>,
    /// Cells per sheet row.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    columns: u32,
    /// Cell edge in pixels.
    #[arg(long, default_value_t = 120.0, value_parser = positive)]
    cell: f64,
}

#[derive(Debug, Args)]
struct Generate {
    #[command(flatten)]
    inputs: Inputs,
    /// Designation JSON: `{key, sets}` or a bare array of sets.
    #[arg(long)]
    sets: PathBuf,
    /// Base seed; design `i` uses the `i`-th sub-seed.
    #[arg(long)]
    seed: u64,
    /// Number of distinct designs to sample.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    count: u32,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    sheets: SheetArgs,
}

#[derive(Debug, Args)]
struct Validate {
    #[command(flatten)]
    inputs: Inputs,
    /// Designation JSON: `{key, sets}` or a bare array of sets.
    #[arg(long)]
    sets: PathBuf,
}

#[derive(Debug, Args)]
struct Render {
    #[command(flatten)]
    inputs: Inputs,
    /// designs.json as written by `generate`.
    #[arg(long)]
    designs: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    sheets: SheetArgs,
}

#[derive(Debug, Args)]
struct Serve {
    /// Listen address.
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Directory for session snapshots and logs; in-memory when omitted.
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Io(String),
}

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Failure {
        Failure::Invalid(e.to_string())
    }

    fn io(path: &Path, e: std::io::Error) -> Failure {
        Failure::Io(format!("{}: {e}", path.display()))
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

fn load_inputs(inputs: &Inputs) -> Result<(DataTable, PaletteConfig), Failure> {
    let table = parse_table(&read(&inputs.data)?, &inputs.key)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", inputs.data.display())))?;
    let palette = match &inputs.palette {
        Some(path) => load_palette(&read(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?,
        None => default_palettes(),
    };
    Ok((table, palette))
}

fn load_designation(path: &Path, key: &str) -> Result<Designation, Failure> {
    let text = read(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let parsed = if value.is_array() {
        serde_json::from_value::<Vec<ColumnSet>>(value).map(|sets| Designation::new(key, sets))
    } else {
        serde_json::from_value::<Designation>(value)
    };
    parsed.map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn layouts(sheets: &SheetArgs) -> (SheetLayout, SheetLayout) {
    let columns = sheets.columns as usize;
    (
        SheetLayout::grid(LayoutMode::SmallMultiples, columns, sheets.cell),
        SheetLayout::grid(LayoutMode::SmallPermutables, columns, sheets.cell),
    )
}

/// designs.json, a multiples sheet per design and a permutables sheet per
/// requested row.
fn write_gallery(designs: &[GlyphDesign], t: &DataTable, p: &PaletteConfig, sheets: &SheetArgs, out: &Path) -> Outcome {
    let mut rows = Vec::with_capacity(sheets.rows.len());
    for key in &sheets.rows {
        rows.push(t.row_of_key(key).ok_or_else(|| Failure::Invalid(format!("unknown row `{key}`")))?);
    }
    fs::create_dir_all(out).map_err(|e| Failure::io(out, e))?;
    let json = serde_json::to_string_pretty(designs).expect("designs serialize");
    write(&out.join("designs.json"), &json)?;
    let (multiples, permutables) = layouts(sheets);
    for g in designs {
        let svg = render_small_multiples(g, t, p, &multiples).map_err(Failure::invalid)?;
        write(&out.join(multiples_name(&g.id)), &svg)?;
    }
    if designs.is_empty() {
        return Ok(());
    }
    for row in rows {
        let svg = render_small_permutables(designs, t, p, row, &permutables).map_err(Failure::invalid)?;
        write(&out.join(permutables_name(t.key(row))), &svg)?;
    }
    Ok(())
}

fn report(violations: &[impl std::fmt::Display]) -> Outcome {
    if violations.is_empty() {
        return Ok(());
    }
    for v in violations {
        eprintln!("violation: {v}");
    }
    Err(Failure::Invalid(format!("{} violation(s)", violations.len())))
}

fn generate(args: Generate) -> Outcome {
    let (table, palette) = load_inputs(&args.inputs)?;
    let designation = load_designation(&args.sets, &args.inputs.key)?;
    report(&validate_designation(&designation, &table, &palette))?;
    let designs =
        sample_batch(&designation, &table, &palette, Seed(args.seed), args.count as usize).map_err(Failure::invalid)?;
    write_gallery(&designs, &table, &palette, &args.sheets, &args.out)
}

fn validate(args: Validate) -> Outcome {
    let (table, palette) = load_inputs(&args.inputs)?;
    let designation = load_designation(&args.sets, &args.inputs.key)?;
    report(&validate_designation(&designation, &table, &palette))?;
    println!("ok");
    Ok(())
}

fn render(args: Render) -> Outcome {
    let (table, palette) = load_inputs(&args.inputs)?;
    let text = read(&args.designs)?;
    let designs: Vec<GlyphDesign> =
        serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", args.designs.display())))?;
    let problems: Vec<String> = designs
        .iter()
        .filter_map(|g| check_design(g, &table, &palette).err().map(|e| format!("{}: {e}", g.id)))
        .collect();
    report(&problems)?;
    write_gallery(&designs, &table, &palette, &args.sheets, &args.out)
}

fn serve(args: Serve) -> Outcome {
    let ansi = std::io::IsTerminal::is_terminal(&std::io::stderr());
    tracing_subscriber::fmt().with_writer(std::io::stderr).with_ansi(ansi).init();
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
    runtime.block_on(async {
        let state = match &args.data_dir {
            Some(dir) => AppState::persistent(dir).await.map_err(|e| Failure::io(dir, e))?,
            None => AppState::in_memory(),
        };
        let listener = tokio::net::TcpListener::bind(args.addr)
            .await
            .map_err(|e| Failure::Io(format!("{}: {e}", args.addr)))?;
        glyphlab_service::serve(listener, state).await.map_err(|e| Failure::Io(e.to_string()))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Validate(a) => validate(a),
        Command::Render(a) => render(a),
        Command::Serve(a) => serve(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
