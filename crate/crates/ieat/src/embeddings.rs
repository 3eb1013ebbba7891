//! Embedding interchange formats.
//!
//! Text: UTF-8 CSV with header `id,dim_0,...,dim_{D-1}` and one record per line.
//!
//! Packed binary, all integers little-endian:
//!
//! ```text
//! "IEAT"  u16 version  u32 D  u64 count
//! count x ( u32 id_len  id_len bytes UTF-8 id  D x f64 )
//! ```

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use ieat_core::{EmbeddingRecord, EmbeddingTable};

use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"IEAT";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingFormat {
    Csv,
    PackedBinary,
}

impl FromStr for EmbeddingFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(EmbeddingFormat::Csv),
            "packed-binary" => Ok(EmbeddingFormat::PackedBinary),
            other => Err(format!("unknown embedding format `{other}`")),
        }
    }
}

/// Guesses the format from the first bytes of the file.
pub fn sniff_format(path: &Path) -> Result<EmbeddingFormat> {
    let mut head = [0u8; 4];
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut filled = 0;
    while filled < head.len() {
        match file.read(&mut head[filled..]).map_err(|e| Error::io(path, e))? {
            0 => break,
            n => filled += n,
        }
    }
    Ok(if &head[..filled] == MAGIC {
        EmbeddingFormat::PackedBinary
    } else {
        EmbeddingFormat::Csv
    })
}

pub fn load_embeddings(path: &Path, format: EmbeddingFormat) -> Result<EmbeddingTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    match format {
        EmbeddingFormat::Csv => read_csv(reader, path),
        EmbeddingFormat::PackedBinary => read_packed(reader, path),
    }
}

pub fn write_embeddings(path: &Path, table: &EmbeddingTable, format: EmbeddingFormat) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        EmbeddingFormat::Csv => write_csv(&mut out, table).map_err(|e| Error::io(path, e))?,
        EmbeddingFormat::PackedBinary => write_packed(&mut out, table).map_err(|e| Error::io(path, e))?,
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Parses the text format; `origin` is only used in error messages.
pub fn read_csv<R: Read>(reader: R, origin: &Path) -> Result<EmbeddingTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::malformed(origin, "header", e))?
        .clone();
    if header.get(0).map(str::trim) != Some("id") {
        return Err(Error::malformed(origin, "header", "first column must be `id`"));
    }
    for (i, name) in header.iter().skip(1).enumerate() {
        if name.trim() != format!("dim_{i}") {
            return Err(Error::malformed(
                origin,
                "header",
                format!("column {} must be `dim_{i}`, found `{name}`", i + 1),
            ));
        }
    }
    let dimension = header.len() - 1;

    let mut records = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(|e| Error::malformed(origin, format!("line {line}"), e))?;
        let id = rec.get(0).unwrap_or("").trim().to_string();
        let location = || {
            if id.is_empty() {
                format!("line {line}")
            } else {
                format!("row `{id}` (line {line})")
            }
        };
        let mut vector = Vec::with_capacity(dimension);
        for (col, field) in rec.iter().skip(1).enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::malformed(origin, location(), format!("dim_{col}: `{field}` is not a number"))
            })?;
            vector.push(v);
        }
        if vector.len() != dimension {
            return Err(Error::invalid(
                origin,
                ieat_core::Error::DimensionMismatch {
                    id: if id.is_empty() { location() } else { id },
                    expected: dimension,
                    found: vector.len(),
                },
            ));
        }
        if id.is_empty() {
            return Err(Error::malformed(origin, location(), "empty id"));
        }
        records.push(EmbeddingRecord::new(id, vector));
    }
    EmbeddingTable::from_records(records).map_err(|e| Error::invalid(origin, e))
}

/// Writes the text format. Components use the shortest decimal form that
/// parses back to the same `f64`.
pub fn write_csv<W: Write>(out: W, table: &EmbeddingTable) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string()];
    header.extend((0..table.dimension()).map(|i| format!("dim_{i}")));
    w.write_record(&header)?;
    for rec in table.records() {
        let mut fields = Vec::with_capacity(rec.vector.len() + 1);
        fields.push(rec.id.clone());
        fields.extend(rec.vector.iter().map(|v| format!("{v:?}")));
        w.write_record(&fields)?;
    }
    w.flush()
}

fn read_array<const N: usize, R: Read>(r: &mut R, origin: &Path, what: &str) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::malformed(origin, what, format!("truncated ({e})")))?;
    Ok(buf)
}

pub fn read_packed<R: Read>(mut r: R, origin: &Path) -> Result<EmbeddingTable> {
    let magic: [u8; 4] = read_array(&mut r, origin, "header")?;
    if &magic != MAGIC {
        return Err(Error::malformed(origin, "header", "bad magic, expected `IEAT`"));
    }
    let version = u16::from_le_bytes(read_array(&mut r, origin, "header")?);
    if version != VERSION {
        return Err(Error::malformed(
            origin,
            "header",
            format!("unsupported version {version}"),
        ));
    }
    let dimension = u32::from_le_bytes(read_array(&mut r, origin, "header")?) as usize;
    let count = u64::from_le_bytes(read_array(&mut r, origin, "header")?);

    let mut records = Vec::new();
    for index in 0..count {
        let at = format!("record {index}");
        let len = u32::from_le_bytes(read_array(&mut r, origin, &at)?) as usize;
        let mut id = Vec::new();
        (&mut r)
            .take(len as u64)
            .read_to_end(&mut id)
            .map_err(|e| Error::malformed(origin, &at, e))?;
        if id.len() != len {
            return Err(Error::malformed(origin, &at, "truncated id"));
        }
        let id = String::from_utf8(id).map_err(|_| Error::malformed(origin, &at, "id is not UTF-8"))?;
        let at = format!("record {index} (`{id}`)");
        let mut vector = Vec::with_capacity(dimension);
        for _ in 0..dimension {
            vector.push(f64::from_le_bytes(read_array(&mut r, origin, &at)?));
        }
        records.push(EmbeddingRecord::new(id, vector));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(|e| Error::io(origin, e))? != 0 {
        return Err(Error::malformed(origin, "trailer", "bytes after the last record"));
    }
    EmbeddingTable::from_records(records).map_err(|e| Error::invalid(origin, e))
}

pub fn write_packed<W: Write>(mut out: W, table: &EmbeddingTable) -> io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(table.dimension() as u32).to_le_bytes())?;
    out.write_all(&(table.len() as u64).to_le_bytes())?;
    for rec in table.records() {
        let id = rec.id.as_bytes();
        let len = u32::try_from(id.len())
            .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "id longer than 4 GiB"))?;
        out.write_all(&len.to_le_bytes())?;
        out.write_all(id)?;
        for v in &rec.vector {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}
