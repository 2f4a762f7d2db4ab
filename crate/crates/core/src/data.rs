//! Tidy table ingestion, column typing, and column-set designations.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::palette::{PaletteConfig, ShapeClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Categorical,
    Quantitative,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum DataError {
    #[error("key column `{0}` is not in the header")]
    MissingKeyColumn(String),
    #[error("row {0} has a different number of cells than the header")]
    RaggedRow(usize),
    #[error("table has no data rows")]
    EmptyTable,
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("duplicate key value `{0}`")]
    DuplicateKey(String),
    #[error("csv: {0}")]
    Csv(String),
}

fn parse_finite(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Quantitative iff every non-empty cell parses as a finite real.
pub fn infer_kind<S: AsRef<str>>(cells: &[S]) -> ValueKind {
    let all_numeric = cells
        .iter()
        .map(|c| c.as_ref())
        .filter(|c| !c.trim().is_empty())
        .all(|c| parse_finite(c).is_some());
    if all_numeric {
        ValueKind::Quantitative
    } else {
        ValueKind::Categorical
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ValueKind,
    raw: Vec<String>,
    numbers: Vec<Option<f64>>,
}

impl Column {
    pub fn new(name: impl Into<String>, raw: Vec<String>) -> Column {
        let kind = infer_kind(&raw);
        let numbers = match kind {
            ValueKind::Quantitative => raw.iter().map(|c| parse_finite(c)).collect(),
            ValueKind::Categorical => vec![None; raw.len()],
        };
        Column { name: name.into(), kind, raw, numbers }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn raw(&self, row: usize) -> &str {
        &self.raw[row]
    }

    pub fn is_missing(&self, row: usize) -> bool {
        self.raw[row].trim().is_empty()
    }

    pub fn number(&self, row: usize) -> Option<f64> {
        self.numbers[row]
    }

    /// Distinct non-missing values in first-appearance order.
    pub fn categories(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.raw
            .iter()
            .filter(|c| !c.trim().is_empty())
            .filter(|c| seen.insert(c.as_str()))
            .map(String::as_str)
            .collect()
    }

    /// `[min, max]` over present values, `None` when nothing is present.
    pub fn domain(&self) -> Option<(f64, f64)> {
        self.numbers.iter().flatten().fold(None, |acc, &v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    key_column: String,
    key_position: usize,
    keys: Vec<String>,
    columns: Vec<Column>,
}

/// Parses RFC-4180 CSV with a header row.
pub fn parse_table(csv_text: &str, key_column: &str) -> Result<DataTable, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Csv(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut names = HashSet::new();
    for h in &header {
        if !names.insert(h.as_str()) {
            return Err(DataError::DuplicateColumn(h.clone()));
        }
    }
    let key_position = header
        .iter()
        .position(|h| h == key_column)
        .ok_or_else(|| DataError::MissingKeyColumn(key_column.to_owned()))?;

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DataError::Csv(e.to_string()))?;
        if record.len() != header.len() {
            return Err(DataError::RaggedRow(row));
        }
        for (col, cell) in record.iter().enumerate() {
            cells[col].push(cell.to_owned());
        }
    }
    if cells[key_position].is_empty() {
        return Err(DataError::EmptyTable);
    }

    let keys = std::mem::take(&mut cells[key_position]);
    let mut seen = HashSet::new();
    for k in &keys {
        if !seen.insert(k.as_str()) {
            return Err(DataError::DuplicateKey(k.clone()));
        }
    }
    let columns = header
        .into_iter()
        .zip(cells)
        .enumerate()
        .filter(|(i, _)| *i != key_position)
        .map(|(_, (name, raw))| Column::new(name, raw))
        .collect();
    Ok(DataTable { key_column: key_column.to_owned(), key_position, keys, columns })
}

impl DataTable {
    /// Builds a table in memory with the key column first. Unlike
    /// [`parse_table`], zero rows are accepted.
    pub fn from_columns(
        key_column: &str,
        keys: Vec<String>,
        columns: Vec<(String, Vec<String>)>,
    ) -> Result<DataTable, DataError> {
        let mut names = HashSet::from([key_column]);
        for (name, raw) in &columns {
            if !names.insert(name.as_str()) {
                return Err(DataError::DuplicateColumn(name.clone()));
            }
            if raw.len() != keys.len() {
                return Err(DataError::RaggedRow(raw.len().min(keys.len())));
            }
        }
        let mut seen = HashSet::new();
        for k in &keys {
            if !seen.insert(k.as_str()) {
                return Err(DataError::DuplicateKey(k.clone()));
            }
        }
        let columns = columns.into_iter().map(|(name, raw)| Column::new(name, raw)).collect();
        Ok(DataTable { key_column: key_column.to_owned(), key_position: 0, keys, columns })
    }

    pub fn key_column(&self) -> &str {
        &self.key_column
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn key(&self, row: usize) -> &str {
        &self.keys[row]
    }

    pub fn row_of_key(&self, key: &str) -> Option<usize> {
        self.keys.iter().position(|k| k == key)
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn row_count(&self) -> usize {
        self.keys.len()
    }

    /// Writes the table back out as CSV with the original column order.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        header.insert(self.key_position, &self.key_column);
        writer.write_record(&header).expect("in-memory write");
        for row in 0..self.row_count() {
            let mut record: Vec<&str> = self.columns.iter().map(|c| c.raw(row)).collect();
            record.insert(self.key_position, self.key(row));
            writer.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    /// True when any column referenced by `d` is missing a value in `row`.
    pub fn row_excluded(&self, d: &Designation, row: usize) -> bool {
        d.columns()
            .filter_map(|name| self.column(name))
            .any(|c| c.is_missing(row))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Single,
    Conjunction,
    Repeat,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnSet {
    pub columns: Vec<String>,
    pub designation: SetKind,
}

impl ColumnSet {
    pub fn single(column: impl Into<String>) -> Self {
        ColumnSet { columns: vec![column.into()], designation: SetKind::Single }
    }

    pub fn conjunction<I: IntoIterator<Item = S>, S: Into<String>>(columns: I) -> Self {
        ColumnSet {
            columns: columns.into_iter().map(Into::into).collect(),
            designation: SetKind::Conjunction,
        }
    }

    pub fn repeat<I: IntoIterator<Item = S>, S: Into<String>>(columns: I) -> Self {
        ColumnSet {
            columns: columns.into_iter().map(Into::into).collect(),
            designation: SetKind::Repeat,
        }
    }

    /// Marks drawn for this set: one, or one per member for repeats.
    pub fn mark_count(&self) -> usize {
        match self.designation {
            SetKind::Repeat => self.columns.len(),
            _ => 1,
        }
    }
}

/// Grouping of table columns into ordered sets; the file form of this type
/// also names the key column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Designation {
    pub key: String,
    pub sets: Vec<ColumnSet>,
}

impl Designation {
    pub fn new(key: impl Into<String>, sets: Vec<ColumnSet>) -> Self {
        Designation { key: key.into(), sets }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn columns(&self) -> impl Iterator<Item = &str> {
        self.sets.iter().flat_map(|s| s.columns.iter().map(String::as_str))
    }

    pub fn mark_count(&self) -> usize {
        self.sets.iter().map(ColumnSet::mark_count).sum()
    }
}

/// One reason a designation cannot be sampled against a table and palette.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum Violation {
    KeyMismatch { designation: String, table: String },
    UnknownColumn { column: String },
    KeyColumnEncoded { column: String },
    DuplicateColumn { column: String },
    EmptySet { set_index: usize },
    BadArity { set_index: usize, kind: SetKind, columns: usize },
    RepeatNotQuantitative { set_index: usize, column: String },
    TooManySets { sets: usize, shapes: usize },
    UnsatisfiableConjunction { set_index: usize },
    NoCompatibleShape { set_index: usize },
    NoShapeAssignment,
    ColorBudgetExceeded { required: usize, available: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::KeyMismatch { designation, table } => {
                write!(f, "designation key `{designation}` does not match table key `{table}`")
            }
            Violation::UnknownColumn { column } => write!(f, "unknown column `{column}`"),
            Violation::KeyColumnEncoded { column } => {
                write!(f, "key column `{column}` cannot be encoded")
            }
            Violation::DuplicateColumn { column } => {
                write!(f, "column `{column}` appears in more than one set")
            }
            Violation::EmptySet { set_index } => write!(f, "set {set_index} is empty"),
            Violation::BadArity { set_index, kind, columns } => {
                write!(f, "set {set_index}: {kind:?} designation cannot hold {columns} column(s)")
            }
            Violation::RepeatNotQuantitative { set_index, column } => {
                write!(f, "set {set_index}: repeat column `{column}` is not quantitative")
            }
            Violation::TooManySets { sets, shapes } => {
                write!(f, "{sets} sets exceed the {shapes}-shape palette")
            }
            Violation::UnsatisfiableConjunction { set_index } => {
                write!(f, "set {set_index}: unsatisfiable conjunction")
            }
            Violation::NoCompatibleShape { set_index } => {
                write!(f, "set {set_index}: no palette shape can carry this set")
            }
            Violation::NoShapeAssignment => {
                write!(f, "sets cannot each receive a distinct compatible shape")
            }
            Violation::ColorBudgetExceeded { required, available } => {
                write!(f, "needs {required} colors, palette provides {available}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColorBudget {
    pub required: usize,
    pub available: usize,
    pub ok: bool,
}

/// Colors needed for categorical columns and repeat members against the
/// palette's color list. No categorical channel means no usable colors.
pub fn color_budget(d: &Designation, t: &DataTable, p: &PaletteConfig) -> ColorBudget {
    let mut required = 0;
    for set in &d.sets {
        if set.designation == SetKind::Repeat {
            required += set.columns.len();
            continue;
        }
        for name in &set.columns {
            if let Some(col) = t.column(name) {
                if col.kind == ValueKind::Categorical {
                    required += col.categories().len();
                }
            }
        }
    }
    let available = if p.categorical_channels(None).next().is_some() { p.colors.len() } else { 0 };
    ColorBudget { required, available, ok: required <= available }
}

/// Column kinds a set needs to bind on one mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SetDemand {
    pub categorical: usize,
    pub quantitative: usize,
    pub repeat: bool,
}

pub(crate) fn set_demand(set: &ColumnSet, t: &DataTable) -> SetDemand {
    if set.designation == SetKind::Repeat {
        return SetDemand { categorical: 0, quantitative: 1, repeat: true };
    }
    let mut demand = SetDemand { categorical: 0, quantitative: 0, repeat: false };
    for name in &set.columns {
        match t.column(name).map(|c| c.kind) {
            Some(ValueKind::Categorical) => demand.categorical += 1,
            Some(ValueKind::Quantitative) => demand.quantitative += 1,
            None => {}
        }
    }
    demand
}

/// Whether one mark of `class` has enough distinct channels for `demand`.
pub(crate) fn class_fits(p: &PaletteConfig, class: ShapeClass, demand: SetDemand) -> bool {
    let cat = p.categorical_channels(Some(class)).count();
    let quant = p.quantitative_channels(class).count();
    let cat_needed = if demand.repeat { 1 } else { demand.categorical };
    cat_needed <= cat && demand.quantitative <= quant
}

/// Bipartite matching of sets onto distinct shapes (Kuhn's algorithm).
pub(crate) fn has_shape_matching(compatible: &[Vec<usize>], shape_count: usize) -> bool {
    fn augment(
        set: usize,
        compatible: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &shape in &compatible[set] {
            if seen[shape] {
                continue;
            }
            seen[shape] = true;
            if owner[shape].is_none_or(|o| augment(o, compatible, seen, owner)) {
                owner[shape] = Some(set);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; shape_count];
    (0..compatible.len()).all(|set| {
        let mut seen = vec![false; shape_count];
        augment(set, compatible, &mut seen, &mut owner)
    })
}

/// Shape indices each set may take, by class compatibility.
pub(crate) fn compatible_shapes(d: &Designation, t: &DataTable, p: &PaletteConfig) -> Vec<Vec<usize>> {
    d.sets
        .iter()
        .map(|set| {
            let demand = set_demand(set, t);
            p.mark_shapes
                .iter()
                .enumerate()
                .filter(|(_, s)| class_fits(p, s.class, demand))
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

/// Checks a designation against a table and palette, collecting every
/// violation. An empty result means sampling succeeds for every seed.
pub fn validate_designation(d: &Designation, t: &DataTable, p: &PaletteConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    if d.key != t.key_column() {
        out.push(Violation::KeyMismatch { designation: d.key.clone(), table: t.key_column().to_owned() });
    }
    let mut used = BTreeSet::new();
    for (i, set) in d.sets.iter().enumerate() {
        if set.columns.is_empty() {
            out.push(Violation::EmptySet { set_index: i });
            continue;
        }
        let arity_ok = match set.designation {
            SetKind::Single => set.columns.len() == 1,
            SetKind::Conjunction | SetKind::Repeat => set.columns.len() >= 2,
        };
        if !arity_ok {
            out.push(Violation::BadArity {
                set_index: i,
                kind: set.designation,
                columns: set.columns.len(),
            });
        }
        for name in &set.columns {
            if !used.insert(name.as_str()) {
                out.push(Violation::DuplicateColumn { column: name.clone() });
            }
            if name == t.key_column() {
                out.push(Violation::KeyColumnEncoded { column: name.clone() });
                continue;
            }
            match t.column(name) {
                None => out.push(Violation::UnknownColumn { column: name.clone() }),
                Some(c) if set.designation == SetKind::Repeat && c.kind != ValueKind::Quantitative => {
                    out.push(Violation::RepeatNotQuantitative { set_index: i, column: name.clone() })
                }
                Some(_) => {}
            }
        }
    }
    if !out.is_empty() {
        return out;
    }

    if d.sets.len() > p.mark_shapes.len() {
        out.push(Violation::TooManySets { sets: d.sets.len(), shapes: p.mark_shapes.len() });
    }
    let compatible = compatible_shapes(d, t, p);
    let classes = [ShapeClass::Polygon, ShapeClass::Wave];
    for (i, set) in d.sets.iter().enumerate() {
        let demand = set_demand(set, t);
        let any_class = classes.iter().any(|c| class_fits(p, *c, demand));
        if !any_class {
            if set.designation == SetKind::Conjunction {
                out.push(Violation::UnsatisfiableConjunction { set_index: i });
            } else {
                out.push(Violation::NoCompatibleShape { set_index: i });
            }
        } else if compatible[i].is_empty() {
            out.push(Violation::NoCompatibleShape { set_index: i });
        }
    }
    if out.is_empty() && !has_shape_matching(&compatible, p.mark_shapes.len()) {
        out.push(Violation::NoShapeAssignment);
    }
    let budget = color_budget(d, t, p);
    if !budget.ok {
        out.push(Violation::ColorBudgetExceeded {
            required: budget.required,
            available: budget.available,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::palette::default_palettes;

    #[test]
    fn header_only_is_empty_table() {
        assert_eq!(parse_table("city,area\n", "city"), Err(DataError::EmptyTable));
    }

    #[test]
    fn missing_key_column() {
        assert_eq!(
            parse_table("a,b\n1,2\n", "city"),
            Err(DataError::MissingKeyColumn("city".into()))
        );
    }

    #[test]
    fn ragged_row_is_reported_with_index() {
        assert_eq!(parse_table("k,a\nx,1\ny\n", "k"), Err(DataError::RaggedRow(1)));
    }

    #[test]
    fn city_table_types() {
        let t = fixtures::cities();
        assert_eq!(t.key_column(), "city");
        assert_eq!(t.row_count(), 12);
        let kinds: Vec<_> = t.columns().iter().map(|c| (c.name.as_str(), c.kind)).collect();
        assert_eq!(kinds.len(), 6);
        assert_eq!(kinds.iter().filter(|(_, k)| *k == ValueKind::Categorical).count(), 1);
        assert_eq!(t.column("region").unwrap().kind, ValueKind::Categorical);
        assert_eq!(kinds.iter().filter(|(_, k)| *k == ValueKind::Quantitative).count(), 5);
    }

    // Oracle: try to parse every cell; any failure means categorical.
    fn kind_oracle(cells: &[&str]) -> ValueKind {
        for c in cells {
            if c.is_empty() {
                continue;
            }
            match c.parse::<f64>() {
                Ok(v) if v.is_finite() => {}
                _ => return ValueKind::Categorical,
            }
        }
        ValueKind::Quantitative
    }

    #[test]
    fn infer_kind_examples() {
        let cases: [&[&str]; 4] = [
            &["0", "50", "100"],
            &["West", "East", "West"],
            &["1e3", "2.5", ""],
            &["3", "x", "5"],
        ];
        let expected = [
            ValueKind::Quantitative,
            ValueKind::Categorical,
            ValueKind::Quantitative,
            ValueKind::Categorical,
        ];
        for (cells, want) in cases.iter().zip(expected) {
            assert_eq!(kind_oracle(cells), want);
            assert_eq!(infer_kind(cells), want);
        }
        assert_eq!(infer_kind(&["inf", "1"]), ValueKind::Categorical);
    }

    #[test]
    fn mixed_column_parses_categorical() {
        let t = parse_table("k,v\na,3\nb,x\nc,5\n", "k").unwrap();
        assert_eq!(t.column("v").unwrap().kind, ValueKind::Categorical);
    }

    #[test]
    fn round_trip_preserves_cells() {
        let t = fixtures::cities();
        let again = parse_table(&t.to_csv(), "city").unwrap();
        assert_eq!(again, t);
        let odd = "v,k\n\"a,b\",1\n\"say \"\"hi\"\"\",2\n,3\n";
        let t = parse_table(odd, "k").unwrap();
        assert_eq!(t.to_csv(), odd);
    }

    #[test]
    fn missing_cells_flag_rows() {
        let t = parse_table("k,a,b\nx,1,\ny,2,3\n", "k").unwrap();
        let d = Designation::new("k", vec![ColumnSet::single("a"), ColumnSet::single("b")]);
        assert!(t.row_excluded(&d, 0));
        assert!(!t.row_excluded(&d, 1));
        assert_eq!(t.column("b").unwrap().domain(), Some((3.0, 3.0)));
    }

    #[test]
    fn mobility_designation_validates() {
        let t = fixtures::cities();
        let p = default_palettes();
        assert!(validate_designation(&fixtures::mobility_designation(), &t, &p).is_empty());
    }

    #[test]
    fn seven_singletons_fit_nine_shapes() {
        let t = fixtures::cities_extended();
        let d = Designation::new(
            "city",
            t.columns().iter().map(|c| ColumnSet::single(c.name.clone())).collect(),
        );
        assert_eq!(d.sets.len(), 7);
        assert!(validate_designation(&d, &t, &default_palettes()).is_empty());
    }

    // Oracle: exhaustive search for an injective column→channel assignment
    // on any single shape class.
    fn conjunction_assignable(t: &DataTable, p: &PaletteConfig, cols: &[&str]) -> bool {
        fn search(
            i: usize,
            cols: &[(ValueKind, &str)],
            channels: &[(ValueKind, &str)],
            used: &mut Vec<bool>,
        ) -> bool {
            if i == cols.len() {
                return true;
            }
            for (j, ch) in channels.iter().enumerate() {
                if !used[j] && ch.0 == cols[i].0 {
                    used[j] = true;
                    if search(i + 1, cols, channels, used) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            false
        }
        let cols: Vec<(ValueKind, &str)> =
            cols.iter().map(|c| (t.column(c).unwrap().kind, *c)).collect();
        [ShapeClass::Polygon, ShapeClass::Wave].iter().any(|class| {
            let channels: Vec<(ValueKind, &str)> = p
                .channels
                .iter()
                .filter(|c| c.applies_to.includes(*class))
                .map(|c| (c.value_kind, c.id.as_str()))
                .collect();
            search(0, &cols, &channels, &mut vec![false; channels.len()])
        })
    }

    #[test]
    fn two_categoricals_in_a_conjunction_are_unsatisfiable() {
        let t = parse_table(
            "k,region,country,area\na,W,X,1\nb,E,Y,2\n",
            "k",
        )
        .unwrap();
        let p = default_palettes();
        assert!(!conjunction_assignable(&t, &p, &["region", "country", "area"]));
        let d = Designation::new("k", vec![ColumnSet::conjunction(["region", "country", "area"])]);
        assert_eq!(
            validate_designation(&d, &t, &p),
            vec![Violation::UnsatisfiableConjunction { set_index: 0 }]
        );
        assert!(conjunction_assignable(&t, &p, &["region", "area"]));
    }

    #[test]
    fn mobility_color_budget() {
        let t = fixtures::cities();
        let oracle = t.column("region").unwrap().categories().len() + 3;
        let b = color_budget(&fixtures::mobility_designation(), &t, &default_palettes());
        assert_eq!(oracle, 7);
        assert_eq!(b, ColorBudget { required: 7, available: 10, ok: true });
    }

    #[test]
    fn no_color_demand() {
        let t = fixtures::cities();
        let d = Designation::new("city", vec![ColumnSet::single("area")]);
        let b = color_budget(&d, &t, &default_palettes());
        assert_eq!(b, ColorBudget { required: 0, available: 10, ok: true });
    }

    #[test]
    fn color_budget_overflow() {
        let mut csv = String::from("k,cat,a,b,c\n");
        for i in 0..12 {
            csv.push_str(&format!("r{i},c{i},{i},{i},{i}\n"));
        }
        let t = parse_table(&csv, "k").unwrap();
        let d = Designation::new(
            "k",
            vec![ColumnSet::single("cat"), ColumnSet::repeat(["a", "b", "c"])],
        );
        let p = default_palettes();
        let b = color_budget(&d, &t, &p);
        assert_eq!(b, ColorBudget { required: 12 + 3, available: 10, ok: false });
        assert!(validate_designation(&d, &t, &p)
            .contains(&Violation::ColorBudgetExceeded { required: 15, available: 10 }));
    }

    #[test]
    fn structural_violations() {
        let t = fixtures::cities();
        let p = default_palettes();
        let d = Designation::new(
            "city",
            vec![
                ColumnSet { columns: vec!["area".into(), "population".into()], designation: SetKind::Single },
                ColumnSet::repeat(["region", "walk score"]),
                ColumnSet::single("walk score"),
                ColumnSet::single("city"),
                ColumnSet::single("nope"),
            ],
        );
        let v = validate_designation(&d, &t, &p);
        assert!(v.contains(&Violation::BadArity { set_index: 0, kind: SetKind::Single, columns: 2 }));
        assert!(v.contains(&Violation::RepeatNotQuantitative { set_index: 1, column: "region".into() }));
        assert!(v.contains(&Violation::DuplicateColumn { column: "walk score".into() }));
        assert!(v.contains(&Violation::KeyColumnEncoded { column: "city".into() }));
        assert!(v.contains(&Violation::UnknownColumn { column: "nope".into() }));
    }

    proptest::proptest! {
        #[test]
        fn infer_kind_is_order_invariant(
            cells in proptest::collection::vec(
                proptest::prop_oneof!["-?[0-9]{1,4}(\\.[0-9]{1,2})?", "[a-z]{1,3}", Just(String::new())],
                1..12,
            ),
            rot in 0usize..12,
        ) {
            let mut shuffled = cells.clone();
            let k = rot % shuffled.len();
            shuffled.rotate_left(k);
            shuffled.reverse();
            proptest::prop_assert_eq!(infer_kind(&cells), infer_kind(&shuffled));
        }
    }
    use proptest::strategy::Just;
}
