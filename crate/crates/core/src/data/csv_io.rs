use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::data::dataset::{Dataset, Value, MISSING};
use crate::data::schema::{ColumnKind, Schema};
use crate::error::{Error, Result};

/// Reads RFC 4180 CSV with a header row naming every schema column
/// (in any order). Rows keep file order; columns are laid out in schema order.
pub fn load_csv<R: Read>(reader: R, schema: &Schema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);

    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut position: HashMap<&str, usize> = HashMap::new();
    for (i, name) in header.iter().enumerate() {
        if position.insert(name.as_str(), i).is_some() {
            return Err(Error::Header(format!("duplicate header `{name}`")));
        }
        if schema.index_of(name).is_none() {
            return Err(Error::Header(format!("unexpected column `{name}`")));
        }
    }
    let mut source = Vec::with_capacity(schema.columns().len());
    for col in schema.columns() {
        match position.get(col.name.as_str()) {
            Some(&i) => source.push(i),
            None => return Err(Error::Header(format!("missing column `{}`", col.name))),
        }
    }

    let target = schema.target_index();
    let mut rows = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row_no = r + 1;
        let mut row = Vec::with_capacity(source.len());
        for (ci, (col, &si)) in schema.columns().iter().zip(&source).enumerate() {
            let cell = record.get(si).unwrap_or("");
            let cell_err = |message: String| Error::Cell {
                row: row_no,
                column: col.name.clone(),
                message,
            };
            let value = match col.kind {
                ColumnKind::Categorical if cell.is_empty() => {
                    if ci == target {
                        return Err(cell_err("missing target value".into()));
                    }
                    Value::cat(MISSING)
                }
                ColumnKind::Categorical => Value::cat(cell),
                ColumnKind::Numeric => {
                    let trimmed = cell.trim();
                    if trimmed.is_empty() {
                        return Err(cell_err("missing numeric value".into()));
                    }
                    match trimmed.parse::<f64>() {
                        Ok(x) if x.is_finite() => Value::Number(x),
                        _ => return Err(cell_err(format!("cannot parse `{cell}` as a number"))),
                    }
                }
            };
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data("csv has no data rows".into()));
    }
    Dataset::new(schema.clone(), rows)
}

pub fn load_csv_path(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_csv(std::io::BufReader::new(file), schema)
}

/// Fixed-point rendering with at most 6 fractional digits and no exponent.
pub fn format_number(x: f64) -> String {
    let mut s = format!("{x:.6}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(data.schema().columns().iter().map(|c| c.name.as_str()))?;
    for row in data.rows() {
        w.write_record(row.iter().map(|v| match v {
            Value::Category(s) if s == MISSING => String::new(),
            Value::Category(s) => s.clone(),
            Value::Number(x) => format_number(*x),
        }))?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_csv_string(data: &Dataset) -> String {
    let mut buf = Vec::new();
    write_csv(data, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}
