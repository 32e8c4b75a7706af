//! Codebook file ingestion and emission (NPY and headerless CSV).

use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::npy::{self, NpyData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Npy,
    Csv,
}

impl Format {
    /// Guesses from the file extension; anything but `.csv` is NPY.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Npy,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "npy" => Ok(Format::Npy),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Invalid(format!("unknown format `{other}`"))),
        }
    }
}

/// Element width used when writing NPY.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    F32,
    F64,
}

pub fn load_codebook(path: &Path, format: Format) -> Result<Codebook> {
    match format {
        Format::Npy => load_npy(path),
        Format::Csv => load_csv(path),
    }
}

/// Writes `codebook` as `<f4` NPY or CSV.
pub fn save_codebook(codebook: &Codebook, path: &Path, format: Format) -> Result<()> {
    save_codebook_with(codebook, path, format, Precision::F32)
}

/// Like [`save_codebook`], choosing the NPY element width. `Precision::F64`
/// makes save/load the identity; `F32` is exact only for values that are
/// already representable in single precision.
pub fn save_codebook_with(
    codebook: &Codebook,
    path: &Path,
    format: Format,
    precision: Precision,
) -> Result<()> {
    match format {
        Format::Npy => {
            let shape = [codebook.n_tokens(), codebook.dim()];
            let data = match precision {
                Precision::F32 => NpyData::F32(codebook.as_slice().iter().map(|&v| v as f32).collect()),
                Precision::F64 => NpyData::F64(codebook.as_slice().to_vec()),
            };
            npy::write_file(path, &shape, &data)
        }
        Format::Csv => save_csv(codebook, path),
    }
}

fn load_npy(path: &Path) -> Result<Codebook> {
    let arr = npy::read_file(path)?;
    if arr.shape.len() != 2 {
        return Err(Error::Rank { shape: arr.shape });
    }
    if matches!(arr.data, NpyData::I32(_) | NpyData::I64(_)) {
        return Err(Error::Npy {
            path: path.to_path_buf(),
            offset: 0,
            reason: "codebook must be a float (<f4 or <f8) array".into(),
        });
    }
    Codebook::new(arr.to_f64(), arr.shape[0], arr.shape[1])
}

fn load_csv(path: &Path) -> Result<Codebook> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    let csv_err = |row: usize, reason: String| Error::Csv {
        path: path.to_path_buf(),
        row,
        reason,
    };

    let mut data = Vec::new();
    let mut dim = None;
    let mut rows = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(row, e.to_string()))?;
        if *dim.get_or_insert(record.len()) != record.len() {
            return Err(csv_err(
                row,
                format!("{} fields, expected {}", record.len(), dim.unwrap()),
            ));
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| csv_err(row, format!("column {col}: `{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(csv_err(row, format!("column {col}: non-finite value")));
            }
            data.push(v);
        }
        rows += 1;
    }
    Codebook::new(data, rows, dim.unwrap_or(0)).map_err(|e| match e {
        Error::Shape(reason) => csv_err(0, reason),
        other => other,
    })
}

fn save_csv(codebook: &Codebook, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    let to_io = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    for row in codebook.iter_rows() {
        writer
            .write_record(row.iter().map(|v| v.to_string()))
            .map_err(to_io)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}
