//! Reading and writing the numpy `.npy` format, version 1.0.
//!
//! Only what codebooks and index sequences need: little-endian `f4`, `f8`,
//! `i4` and `i8` payloads in C order. Version 2.0 headers are accepted when
//! reading; writing always emits 1.0.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 6] = b"\x93NUMPY";

/// Array payload, tagged by element type.
#[derive(Debug, Clone, PartialEq)]
pub enum NpyData {
    F32(Vec<f32>),
    F64(Vec<f64>),
    I32(Vec<i32>),
    I64(Vec<i64>),
}

impl NpyData {
    pub fn len(&self) -> usize {
        match self {
            NpyData::F32(v) => v.len(),
            NpyData::F64(v) => v.len(),
            NpyData::I32(v) => v.len(),
            NpyData::I64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn descr(&self) -> &'static str {
        match self {
            NpyData::F32(_) => "<f4",
            NpyData::F64(_) => "<f8",
            NpyData::I32(_) => "<i4",
            NpyData::I64(_) => "<i8",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NpyArray {
    pub shape: Vec<usize>,
    pub data: NpyData,
}

impl NpyArray {
    /// Elements widened to `f64`.
    pub fn to_f64(&self) -> Vec<f64> {
        match &self.data {
            NpyData::F32(v) => v.iter().map(|&x| f64::from(x)).collect(),
            NpyData::F64(v) => v.clone(),
            NpyData::I32(v) => v.iter().map(|&x| f64::from(x)).collect(),
            NpyData::I64(v) => v.iter().map(|&x| x as f64).collect(),
        }
    }

    /// Elements as non-negative indices, `None` if the payload is a float
    /// array or holds a negative value (returned as `Err(position)`).
    pub fn to_indices(&self) -> Option<std::result::Result<Vec<usize>, usize>> {
        let conv = |it: &mut dyn Iterator<Item = i64>| {
            it.enumerate()
                .map(|(i, x)| usize::try_from(x).map_err(|_| i))
                .collect()
        };
        match &self.data {
            NpyData::I32(v) => Some(conv(&mut v.iter().map(|&x| i64::from(x)))),
            NpyData::I64(v) => Some(conv(&mut v.iter().copied())),
            _ => None,
        }
    }
}

/// Positioned parse failure; the caller attaches the file path.
#[derive(Debug)]
pub struct ParseError {
    pub offset: u64,
    pub reason: String,
}

fn perr(offset: u64, reason: impl Into<String>) -> ParseError {
    ParseError {
        offset,
        reason: reason.into(),
    }
}

pub fn read_npy<R: Read>(reader: &mut R) -> std::result::Result<NpyArray, ParseError> {
    let mut magic = [0u8; 8];
    reader
        .read_exact(&mut magic)
        .map_err(|_| perr(0, "truncated preamble"))?;
    if &magic[..6] != MAGIC {
        return Err(perr(0, "missing \\x93NUMPY magic"));
    }
    let (major, minor) = (magic[6], magic[7]);
    let (header_len, mut offset) = match major {
        1 => {
            let mut b = [0u8; 2];
            reader
                .read_exact(&mut b)
                .map_err(|_| perr(8, "truncated header length"))?;
            (u16::from_le_bytes(b) as usize, 10u64)
        }
        2 => {
            let mut b = [0u8; 4];
            reader
                .read_exact(&mut b)
                .map_err(|_| perr(8, "truncated header length"))?;
            (u32::from_le_bytes(b) as usize, 12u64)
        }
        _ => return Err(perr(6, format!("unsupported version {major}.{minor}"))),
    };
    let mut header = vec![0u8; header_len];
    reader
        .read_exact(&mut header)
        .map_err(|_| perr(offset, "truncated header"))?;
    let header =
        std::str::from_utf8(&header).map_err(|_| perr(offset, "header is not valid text"))?;
    let dict = parse_header(header).map_err(|r| perr(offset, r))?;
    offset += header_len as u64;

    if dict.fortran_order {
        return Err(perr(offset, "fortran_order arrays are not supported"));
    }
    let count = dict
        .shape
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .ok_or_else(|| perr(offset, "shape overflows"))?;

    macro_rules! payload {
        ($ty:ty, $variant:ident) => {{
            const W: usize = std::mem::size_of::<$ty>();
            let mut bytes = vec![0u8; count * W];
            reader.read_exact(&mut bytes).map_err(|_| {
                perr(
                    offset,
                    format!("payload shorter than {} bytes for shape {:?}", count * W, dict.shape),
                )
            })?;
            let values = bytes
                .chunks_exact(W)
                .map(|c| <$ty>::from_le_bytes(c.try_into().unwrap()))
                .collect();
            NpyData::$variant(values)
        }};
    }

    let data = match dict.descr.as_str() {
        "<f4" => payload!(f32, F32),
        "<f8" => payload!(f64, F64),
        "<i4" => payload!(i32, I32),
        "<i8" => payload!(i64, I64),
        other => return Err(perr(offset, format!("unsupported dtype {other}"))),
    };
    let mut trailing = [0u8; 1];
    if matches!(reader.read(&mut trailing), Ok(n) if n > 0) {
        return Err(perr(
            offset + (count * element_size(&data)) as u64,
            "trailing bytes after payload",
        ));
    }
    Ok(NpyArray {
        shape: dict.shape,
        data,
    })
}

fn element_size(data: &NpyData) -> usize {
    match data {
        NpyData::F32(_) | NpyData::I32(_) => 4,
        NpyData::F64(_) | NpyData::I64(_) => 8,
    }
}

pub fn write_npy<W: Write>(writer: &mut W, shape: &[usize], data: &NpyData) -> std::io::Result<()> {
    let shape_str = match shape {
        [n] => format!("({n},)"),
        _ => format!(
            "({})",
            shape.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
        ),
    };
    let mut header = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': {}, }}",
        data.descr(),
        shape_str
    );
    // preamble (10 bytes) + header + '\n' is padded to a multiple of 64
    let unpadded = 10 + header.len() + 1;
    header.extend(std::iter::repeat_n(' ', (64 - unpadded % 64) % 64));
    header.push('\n');

    writer.write_all(MAGIC)?;
    writer.write_all(&[1, 0])?;
    writer.write_all(&(header.len() as u16).to_le_bytes())?;
    writer.write_all(header.as_bytes())?;
    match data {
        NpyData::F32(v) => v.iter().try_for_each(|x| writer.write_all(&x.to_le_bytes())),
        NpyData::F64(v) => v.iter().try_for_each(|x| writer.write_all(&x.to_le_bytes())),
        NpyData::I32(v) => v.iter().try_for_each(|x| writer.write_all(&x.to_le_bytes())),
        NpyData::I64(v) => v.iter().try_for_each(|x| writer.write_all(&x.to_le_bytes())),
    }
}

pub fn read_file(path: &Path) -> Result<NpyArray> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_npy(&mut BufReader::new(file)).map_err(|e| Error::Npy {
        path: path.to_path_buf(),
        offset: e.offset,
        reason: e.reason,
    })
}

pub fn write_file(path: &Path, shape: &[usize], data: &NpyData) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_npy(&mut w, shape, data)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a 1-D integer array as indices.
pub fn read_indices(path: &Path) -> Result<Vec<usize>> {
    let arr = read_file(path)?;
    if arr.shape.len() != 1 {
        return Err(Error::Npy {
            path: path.to_path_buf(),
            offset: 0,
            reason: format!("expected a 1-D index array, found shape {:?}", arr.shape),
        });
    }
    match arr.to_indices() {
        Some(Ok(v)) => Ok(v),
        Some(Err(pos)) => Err(Error::Npy {
            path: path.to_path_buf(),
            offset: 0,
            reason: format!("negative index at position {pos}"),
        }),
        None => Err(Error::Npy {
            path: path.to_path_buf(),
            offset: 0,
            reason: "expected an integer (<i4 or <i8) array".into(),
        }),
    }
}

/// Writes indices as a 1-D `<i4` array.
pub fn write_indices(path: &Path, indices: &[usize]) -> Result<()> {
    let values = indices
        .iter()
        .map(|&i| {
            i32::try_from(i).map_err(|_| Error::IndexOutOfRange {
                index: i,
                bound: i32::MAX as usize,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_file(path, &[values.len()], &NpyData::I32(values))
}

#[derive(Debug)]
struct HeaderDict {
    descr: String,
    fortran_order: bool,
    shape: Vec<usize>,
}

fn parse_header(text: &str) -> std::result::Result<HeaderDict, String> {
    let body = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or("header is not a dict literal")?;

    let mut descr = None;
    let mut fortran_order = None;
    let mut shape = None;
    let mut rest = body.trim();
    while !rest.is_empty() {
        let (key, after) = take_quoted(rest).ok_or("expected quoted key")?;
        let after = after
            .trim_start()
            .strip_prefix(':')
            .ok_or("expected ':' after key")?
            .trim_start();
        let (value, after) = take_value(after).ok_or_else(|| format!("bad value for '{key}'"))?;
        match key {
            "descr" => descr = Some(take_quoted(value).ok_or("descr must be a string")?.0.to_string()),
            "fortran_order" => {
                fortran_order = Some(match value {
                    "True" => true,
                    "False" => false,
                    v => return Err(format!("fortran_order must be True/False, got {v}")),
                })
            }
            "shape" => shape = Some(parse_shape(value)?),
            _ => {}
        }
        rest = after.trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    Ok(HeaderDict {
        descr: descr.ok_or("missing 'descr'")?,
        fortran_order: fortran_order.ok_or("missing 'fortran_order'")?,
        shape: shape.ok_or("missing 'shape'")?,
    })
}

fn take_quoted(s: &str) -> Option<(&str, &str)> {
    let q = s.chars().next().filter(|c| *c == '\'' || *c == '"')?;
    let end = s[1..].find(q)? + 1;
    Some((&s[1..end], &s[end + 1..]))
}

fn take_value(s: &str) -> Option<(&str, &str)> {
    match s.chars().next()? {
        '\'' | '"' => {
            let (_, rest) = take_quoted(s)?;
            let len = s.len() - rest.len();
            Some((&s[..len], rest))
        }
        '(' => {
            let end = s.find(')')?;
            Some((&s[..=end], &s[end + 1..]))
        }
        _ => {
            let end = s.find(',').unwrap_or(s.len());
            Some((s[..end].trim(), &s[end..]))
        }
    }
}

fn parse_shape(value: &str) -> std::result::Result<Vec<usize>, String> {
    let inner = value
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or("shape must be a tuple")?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("bad shape entry `{s}`")))
        .collect()
}
