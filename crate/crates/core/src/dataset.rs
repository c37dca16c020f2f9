//! Sample tables, CSV ingestion and the synthetic benchmark generators.
//!
//! A [`Table`] is a list of named columns of equal length. Categorical columns
//! hold dense integer codes with a code-to-label mapping; numeric columns hold
//! reals. A [`Dataset`] is a table with roles: one target column and at most
//! one context column. Only the target of a dataset may be numeric.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Categorical column: codes in `0..labels.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct CategoricalColumn {
    codes: Vec<u32>,
    labels: Vec<String>,
}

impl CategoricalColumn {
    pub fn new(codes: Vec<u32>, labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Dataset("categorical column needs arity >= 1".into()));
        }
        let mut seen = HashMap::with_capacity(labels.len());
        for label in &labels {
            validate_cell("<label>", label)?;
            if seen.insert(label.as_str(), ()).is_some() {
                return Err(Error::Dataset(format!("duplicate label {label:?}")));
            }
        }
        if let Some(&bad) = codes.iter().find(|&&c| c as usize >= labels.len()) {
            return Err(Error::Dataset(format!(
                "code {bad} out of range for arity {}",
                labels.len()
            )));
        }
        Ok(CategoricalColumn { codes, labels })
    }

    /// Column whose labels are the decimal codes `0..arity`.
    pub fn from_codes(codes: Vec<u32>, arity: usize) -> Result<Self> {
        Self::new(codes, (0..arity).map(|c| c.to_string()).collect())
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn arity(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, code: u32) -> &str {
        &self.labels[code as usize]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    Categorical(CategoricalColumn),
    Numeric(Vec<f64>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Categorical(c) => c.codes.len(),
            Column::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            Column::Categorical(_) => ColumnKind::Categorical,
            Column::Numeric(_) => ColumnKind::Numeric,
        }
    }

    pub fn as_categorical(&self) -> Option<&CategoricalColumn> {
        match self {
            Column::Categorical(c) => Some(c),
            Column::Numeric(_) => None,
        }
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match self {
            Column::Numeric(v) => Some(v),
            Column::Categorical(_) => None,
        }
    }

    fn cell(&self, row: usize) -> String {
        match self {
            Column::Categorical(c) => c.labels[c.codes[row] as usize].clone(),
            Column::Numeric(v) => format!("{}", v[row]),
        }
    }

    fn select(&self, rows: &[u32]) -> Column {
        match self {
            Column::Categorical(c) => Column::Categorical(CategoricalColumn {
                codes: rows.iter().map(|&r| c.codes[r as usize]).collect(),
                labels: c.labels.clone(),
            }),
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r as usize]).collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

/// Expected layout of one CSV column.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    /// Fixes the label-to-code order; labels outside the list are rejected.
    pub declared_labels: Option<Vec<String>>,
}

impl ColumnSchema {
    pub fn categorical(name: impl Into<String>) -> Self {
        ColumnSchema {
            name: name.into(),
            kind: ColumnKind::Categorical,
            declared_labels: None,
        }
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        ColumnSchema {
            name: name.into(),
            kind: ColumnKind::Numeric,
            declared_labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.declared_labels = Some(labels);
        self
    }
}

/// Named columns of equal length, without roles.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    names: Vec<String>,
    columns: Vec<Column>,
    n_samples: usize,
}

impl Table {
    pub fn new(names: Vec<String>, columns: Vec<Column>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Dataset(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if columns.is_empty() {
            return Err(Error::Dataset("table has no columns".into()));
        }
        let mut seen = HashMap::new();
        for name in &names {
            if name.is_empty() {
                return Err(Error::Schema("empty column name".into()));
            }
            validate_cell(name, name)?;
            if seen.insert(name.as_str(), ()).is_some() {
                return Err(Error::Schema(format!("duplicate column name {name:?}")));
            }
        }
        let n_samples = columns[0].len();
        if n_samples == 0 {
            return Err(Error::Dataset("table has no rows".into()));
        }
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n_samples {
                return Err(Error::Dataset(format!(
                    "column {name:?} has {} entries, expected {n_samples}",
                    col.len()
                )));
            }
            if let Column::Numeric(v) = col {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Dataset(format!(
                        "column {name:?} has non-finite values"
                    )));
                }
            }
        }
        Ok(Table {
            names,
            columns,
            n_samples,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, index: usize) -> &Column {
        &self.columns[index]
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Schema reproducing this table's label order on reload.
    pub fn schema(&self) -> Vec<ColumnSchema> {
        self.names
            .iter()
            .zip(&self.columns)
            .map(|(name, col)| match col {
                Column::Categorical(c) => {
                    ColumnSchema::categorical(name.clone()).with_labels(c.labels.clone())
                }
                Column::Numeric(_) => ColumnSchema::numeric(name.clone()),
            })
            .collect()
    }

    pub fn select_rows(&self, rows: &[u32]) -> Result<Table> {
        Table::new(
            self.names.clone(),
            self.columns.iter().map(|c| c.select(rows)).collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetKind {
    Categorical,
    Numeric,
}

/// A table with a designated target and an optional categorical context.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    table: Table,
    target: usize,
    context: Option<usize>,
}

impl Dataset {
    pub fn new(table: Table, target: usize, context: Option<usize>) -> Result<Self> {
        let n = table.n_columns();
        if target >= n {
            return Err(Error::Dataset(format!("target index {target} out of range")));
        }
        if let Some(c) = context {
            if c >= n {
                return Err(Error::Dataset(format!("context index {c} out of range")));
            }
            if c == target {
                return Err(Error::Dataset("target and context must differ".into()));
            }
            if table.columns[c].kind() != ColumnKind::Categorical {
                return Err(Error::Schema(format!(
                    "context column {:?} must be categorical",
                    table.names[c]
                )));
            }
        }
        for (i, col) in table.columns.iter().enumerate() {
            if i != target && col.kind() == ColumnKind::Numeric {
                return Err(Error::Schema(format!(
                    "column {:?} is numeric; only the target may be numeric",
                    table.names[i]
                )));
            }
        }
        Ok(Dataset {
            table,
            target,
            context,
        })
    }

    /// Builds a dataset from columns, resolving roles by name.
    pub fn from_columns(
        names: Vec<String>,
        columns: Vec<Column>,
        target: &str,
        context: Option<&str>,
    ) -> Result<Self> {
        let table = Table::new(names, columns)?;
        let target = table.column_index(target)?;
        let context = context.map(|c| table.column_index(c)).transpose()?;
        Dataset::new(table, target, context)
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn names(&self) -> &[String] {
        self.table.names()
    }

    pub fn name(&self, column: usize) -> &str {
        &self.table.names[column]
    }

    pub fn n_samples(&self) -> usize {
        self.table.n_samples
    }

    pub fn n_columns(&self) -> usize {
        self.table.n_columns()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn context(&self) -> Option<usize> {
        self.context
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.table.column_index(name)
    }

    pub fn target_kind(&self) -> TargetKind {
        match self.table.columns[self.target] {
            Column::Categorical(_) => TargetKind::Categorical,
            Column::Numeric(_) => TargetKind::Numeric,
        }
    }

    pub fn column(&self, index: usize) -> &Column {
        self.table.column(index)
    }

    /// Codes of a categorical column; `None` for the numeric target.
    pub fn codes(&self, column: usize) -> Option<&[u32]> {
        self.table.columns[column].as_categorical().map(|c| c.codes())
    }

    pub fn arity(&self, column: usize) -> Option<usize> {
        self.table.columns[column].as_categorical().map(|c| c.arity())
    }

    pub fn labels(&self, column: usize) -> Option<&[String]> {
        self.table.columns[column]
            .as_categorical()
            .map(|c| c.labels())
    }

    /// Every column other than the target and the context.
    pub fn input_columns(&self) -> Vec<usize> {
        (0..self.n_columns())
            .filter(|&i| i != self.target && Some(i) != self.context)
            .collect()
    }

    pub fn context_codes(&self) -> Result<&[u32]> {
        let c = self.context.ok_or(Error::NoContext)?;
        Ok(self.codes(c).expect("context is categorical"))
    }

    pub fn context_arity(&self) -> Result<usize> {
        let c = self.context.ok_or(Error::NoContext)?;
        Ok(self.arity(c).expect("context is categorical"))
    }

    /// Rows (in increasing order) whose context equals `value`.
    pub fn context_rows(&self, value: u32) -> Result<Vec<u32>> {
        if value as usize >= self.context_arity()? {
            return Err(Error::UnknownContextValue(value));
        }
        Ok(self
            .context_codes()?
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == value)
            .map(|(i, _)| i as u32)
            .collect())
    }

    /// Subset of rows, keeping every column's label set (and thus its arity).
    pub fn select_rows(&self, rows: &[u32]) -> Result<Dataset> {
        Dataset::new(self.table.select_rows(rows)?, self.target, self.context)
    }

    /// Same data with the context column replaced by `codes`.
    pub fn with_context_codes(&self, codes: Vec<u32>) -> Result<Dataset> {
        let c = self.context.ok_or(Error::NoContext)?;
        let labels = self.labels(c).expect("context is categorical").to_vec();
        let mut table = self.table.clone();
        table.columns[c] = Column::Categorical(CategoricalColumn::new(codes, labels)?);
        if table.columns[c].len() != table.n_samples {
            return Err(Error::Dataset("context replacement has wrong length".into()));
        }
        Dataset::new(table, self.target, self.context)
    }
}

fn validate_cell(column: &str, value: &str) -> Result<()> {
    let reason = if value.is_empty() {
        "empty"
    } else if value.contains(',') {
        "contains a comma"
    } else if value.contains(['\n', '\r', '"']) {
        "contains a quote or line break"
    } else {
        return Ok(());
    };
    Err(Error::InvalidCell {
        column: column.to_string(),
        value: value.to_string(),
        reason,
    })
}

/// Reads a CSV file whose header matches `schema` exactly.
pub fn load_table(path: impl AsRef<Path>, schema: &[ColumnSchema]) -> Result<Table> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .quoting(false)
        .from_reader(file);
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r?,
        None => return Err(Error::Dataset(format!("{} is empty", path.display()))),
    };
    let found: Vec<String> = header.iter().map(|s| s.trim().to_string()).collect();
    let expected: Vec<String> = schema.iter().map(|s| s.name.clone()).collect();
    if found != expected {
        return Err(Error::HeaderMismatch { expected, found });
    }

    let mut builders: Vec<ColumnBuilder> = schema.iter().map(ColumnBuilder::new).collect();
    for (i, record) in records.enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() != schema.len() {
            return Err(Error::RaggedRow {
                row,
                expected: schema.len(),
                found: record.len(),
            });
        }
        for (builder, cell) in builders.iter_mut().zip(record.iter()) {
            builder.push(row, cell.trim())?;
        }
    }

    let columns = builders.into_iter().map(ColumnBuilder::finish).collect();
    Table::new(expected, columns)
}

/// Loads a dataset and assigns the target and context roles by name.
pub fn load_csv(
    path: impl AsRef<Path>,
    schema: &[ColumnSchema],
    target: &str,
    context: Option<&str>,
) -> Result<Dataset> {
    for col in schema {
        if col.kind == ColumnKind::Numeric && col.name != target {
            return Err(Error::Schema(format!(
                "column {:?} declared numeric; only the target may be numeric",
                col.name
            )));
        }
    }
    let table = load_table(path, schema)?;
    let target = table.column_index(target)?;
    let context = context.map(|c| table.column_index(c)).transpose()?;
    Dataset::new(table, target, context)
}

/// Reads only the header row of a CSV file.
pub fn read_header(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .quoting(false)
        .from_reader(file);
    match reader.records().next() {
        Some(r) => Ok(r?.iter().map(|s| s.trim().to_string()).collect()),
        None => Err(Error::Dataset(format!("{} is empty", path.display()))),
    }
}

struct ColumnBuilder<'a> {
    schema: &'a ColumnSchema,
    codes: Vec<u32>,
    labels: Vec<String>,
    index: HashMap<String, u32>,
    values: Vec<f64>,
}

impl<'a> ColumnBuilder<'a> {
    fn new(schema: &'a ColumnSchema) -> Self {
        let labels = schema.declared_labels.clone().unwrap_or_default();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u32))
            .collect();
        ColumnBuilder {
            schema,
            codes: Vec::new(),
            labels,
            index,
            values: Vec::new(),
        }
    }

    fn push(&mut self, row: usize, cell: &str) -> Result<()> {
        if cell.is_empty() {
            return Err(Error::MissingValue {
                row,
                column: self.schema.name.clone(),
            });
        }
        match self.schema.kind {
            ColumnKind::Numeric => {
                let v: f64 = cell.parse().map_err(|_| Error::BadNumber {
                    row,
                    column: self.schema.name.clone(),
                    value: cell.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(Error::BadNumber {
                        row,
                        column: self.schema.name.clone(),
                        value: cell.to_string(),
                    });
                }
                self.values.push(v);
            }
            ColumnKind::Categorical => {
                let code = match self.index.get(cell) {
                    Some(&c) => c,
                    None if self.schema.declared_labels.is_some() => {
                        return Err(Error::UnknownLabel {
                            row,
                            column: self.schema.name.clone(),
                            label: cell.to_string(),
                        })
                    }
                    None => {
                        validate_cell(&self.schema.name, cell)?;
                        let c = self.labels.len() as u32;
                        self.labels.push(cell.to_string());
                        self.index.insert(cell.to_string(), c);
                        c
                    }
                };
                self.codes.push(code);
            }
        }
        Ok(())
    }

    fn finish(self) -> Column {
        match self.schema.kind {
            ColumnKind::Numeric => Column::Numeric(self.values),
            ColumnKind::Categorical => Column::Categorical(CategoricalColumn {
                codes: self.codes,
                labels: self.labels,
            }),
        }
    }
}

/// CSV text with a header and one row per sample, using labels rather than codes.
pub fn table_to_csv(table: &Table) -> String {
    let mut out = table.names.join(",");
    out.push('\n');
    for row in 0..table.n_samples {
        let cells: Vec<String> = table.columns.iter().map(|c| c.cell(row)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn save_table(table: &Table, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    out.write_all(table_to_csv(table).as_bytes()).map_err(io)?;
    out.flush().map_err(io)
}

pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    save_table(&dataset.table, path)
}

fn categorical(codes: Vec<u32>, arity: usize) -> Column {
    Column::Categorical(CategoricalColumn::from_codes(codes, arity).expect("valid generator codes"))
}

fn assemble(names: &[&str], rows: &[Vec<u32>], arities: &[usize], context: bool) -> Dataset {
    let columns = (0..names.len())
        .map(|j| categorical(rows.iter().map(|r| r[j]).collect(), arities[j]))
        .collect();
    let names = names.iter().map(|s| s.to_string()).collect();
    let ctx = if context { Some("Xc") } else { None };
    Dataset::from_columns(names, columns, "Y", ctx).expect("generator output is valid")
}

/// The two-input toy problem with a quaternary output: 16 equiprobable rows
/// over `(Xc, X1, X2, Y)`.
///
/// When `X2 == Xc` the output copies `X1` (two identical rows); otherwise the
/// output is 2 or 3 with equal probability (one row each).
pub fn generate_example1() -> Dataset {
    let mut rows = Vec::with_capacity(16);
    for xc in 0..2u32 {
        for x1 in 0..2u32 {
            for x2 in 0..2u32 {
                if x2 == xc {
                    rows.push(vec![xc, x1, x2, x1]);
                    rows.push(vec![xc, x1, x2, x1]);
                } else {
                    rows.push(vec![xc, x1, x2, 2]);
                    rows.push(vec![xc, x1, x2, 3]);
                }
            }
        }
    }
    assemble(&["Xc", "X1", "X2", "Y"], &rows, &[2, 2, 2, 4], true)
}

/// Three binary inputs, ternary output, binary context; all 16 input
/// combinations once. `Y = 2` if `X1 = 0`, else `Y = X2` in context 0 and
/// `Y = X3` in context 1.
pub fn generate_problem1() -> Dataset {
    let mut rows = Vec::with_capacity(16);
    for xc in 0..2u32 {
        for x1 in 0..2u32 {
            for x2 in 0..2u32 {
                for x3 in 0..2u32 {
                    let y = match (x1, xc) {
                        (0, _) => 2,
                        (_, 0) => x2,
                        _ => x3,
                    };
                    rows.push(vec![xc, x1, x2, x3, y]);
                }
            }
        }
    }
    assemble(&["Xc", "X1", "X2", "X3", "Y"], &rows, &[2, 2, 2, 2, 3], true)
}

/// Seven-segment display patterns for digits 0-9. Segment order: top,
/// upper-left, upper-right, middle, lower-left, lower-right, bottom.
pub const SEVEN_SEGMENT: [[u32; 7]; 10] = [
    [1, 1, 1, 0, 1, 1, 1],
    [0, 0, 1, 0, 0, 1, 0],
    [1, 0, 1, 1, 1, 0, 1],
    [1, 0, 1, 1, 0, 1, 1],
    [0, 1, 1, 1, 0, 1, 0],
    [1, 1, 0, 1, 0, 1, 1],
    [1, 1, 0, 1, 1, 1, 1],
    [1, 0, 1, 0, 0, 1, 0],
    [1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, 0, 1, 1],
];

/// Digit recognition with a binary context: 320 rows over
/// `(Xc, X1..X8, Y)`, 160 per context.
///
/// Context 0 is the plain seven-segment problem with an independent fair
/// binary `X8`, each (digit, `X8`) pair replicated 8 times. In context 1 the
/// lower three segments `X5..X7` run through all 8 combinations for every
/// digit and `X8` value, so they carry no information about the digit.
pub fn generate_problem2() -> Dataset {
    let mut rows = Vec::with_capacity(320);
    for digit in 0..10u32 {
        let seg = SEVEN_SEGMENT[digit as usize];
        for x8 in 0..2u32 {
            for _ in 0..8 {
                let mut row = vec![0];
                row.extend_from_slice(&seg);
                row.push(x8);
                row.push(digit);
                rows.push(row);
            }
        }
    }
    for digit in 0..10u32 {
        let seg = SEVEN_SEGMENT[digit as usize];
        for lower in 0..8u32 {
            for x8 in 0..2u32 {
                let mut row = vec![1];
                row.extend_from_slice(&seg[..4]);
                row.extend_from_slice(&[(lower >> 2) & 1, (lower >> 1) & 1, lower & 1]);
                row.push(x8);
                row.push(digit);
                rows.push(row);
            }
        }
    }
    let names = ["Xc", "X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "Y"];
    let mut arities = vec![2; 9];
    arities.push(10);
    assemble(&names, &rows, &arities, true)
}

/// Generator lookup by name.
pub fn generate(name: &str) -> Option<Dataset> {
    match name {
        "example1" => Some(generate_example1()),
        "problem1" => Some(generate_problem1()),
        "problem2" => Some(generate_problem2()),
        _ => None,
    }
}

pub const GENERATORS: [&str; 3] = ["example1", "problem1", "problem2"];

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn problem1_matches_table() {
        let d = generate_problem1();
        assert_eq!(d.n_samples(), 16);
        let rows: HashSet<Vec<u32>> = (0..16)
            .map(|r| (0..5).map(|c| d.codes(c).unwrap()[r]).collect())
            .collect();
        assert_eq!(rows.len(), 16);
        let x1 = d.codes(1).unwrap();
        let y = d.codes(4).unwrap();
        let twos = (0..16).filter(|&r| x1[r] == 0).collect::<Vec<_>>();
        assert_eq!(twos.len(), 8);
        assert!(twos.iter().all(|&r| y[r] == 2));
        let xc = d.codes(0).unwrap();
        assert_eq!(xc.iter().filter(|&&c| c == 0).count(), 8);
    }

    #[test]
    fn example1_rows_follow_rule() {
        let d = generate_example1();
        assert_eq!(d.n_samples(), 16);
        let c = |j| d.codes(j).unwrap();
        for r in 0..16 {
            if c(2)[r] == c(0)[r] {
                assert_eq!(c(3)[r], c(1)[r]);
            } else {
                assert!(c(3)[r] >= 2);
            }
        }
    }

    #[test]
    fn problem2_layout() {
        let d = generate_problem2();
        assert_eq!(d.n_samples(), 320);
        let xc = d.context_codes().unwrap();
        assert_eq!(xc.iter().filter(|&&c| c == 0).count(), 160);
        let y = d.codes(9).unwrap();
        for ctx in 0..2 {
            for digit in 0..10 {
                let n = (0..320).filter(|&r| xc[r] == ctx && y[r] == digit).count();
                assert_eq!(n, 16);
            }
        }
        // context 1 rows are all distinct
        let distinct: HashSet<Vec<u32>> = (0..320)
            .filter(|&r| xc[r] == 1)
            .map(|r| (0..10).map(|c| d.codes(c).unwrap()[r]).collect())
            .collect();
        assert_eq!(distinct.len(), 160);
        assert_eq!(generate_problem2(), d);
    }

    #[test]
    fn dataset_rejects_bad_roles() {
        let cols = vec![
            Column::Numeric(vec![1.0, 2.0]),
            Column::Numeric(vec![1.0, 2.0]),
        ];
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(matches!(
            Dataset::from_columns(names.clone(), cols, "a", None),
            Err(Error::Schema(_))
        ));
        let cols = vec![
            categorical(vec![0, 1], 2),
            Column::Numeric(vec![1.0, 2.0]),
        ];
        assert!(Dataset::from_columns(names.clone(), cols.clone(), "a", Some("a")).is_err());
        assert!(matches!(
            Dataset::from_columns(names, cols, "a", Some("b")),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn empty_column_name_rejected() {
        let r = Table::new(vec!["".into()], vec![categorical(vec![0], 1)]);
        assert!(matches!(r, Err(Error::Schema(_))));
    }

    #[test]
    fn code_out_of_range_rejected() {
        assert!(CategoricalColumn::from_codes(vec![0, 2], 2).is_err());
        assert!(CategoricalColumn::new(vec![], vec![]).is_err());
    }
}
