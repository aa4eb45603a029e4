//! Binary embedding payloads.
//!
//! `ICEM` (sentence embeddings): magic `ICEM`, version byte `1`, `u32` row
//! count, `u32` dims, then `rows * dims` `f32` values, all little-endian. Row
//! ids live in a sibling JSON-Lines index of `{"row": i, "id": s}`.
//!
//! `ICTE` (token embeddings): magic `ICTE`, version byte, then records of
//! `u32 id_len`, id bytes, `u32 n_tokens`, `u32 dims`, `n_tokens * dims` floats.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufReader, ErrorKind, Read, Write};
use std::path::{Path, PathBuf};

use super::{jsonl_lines, parse_json_object, string_field};
use crate::error::{Error, Result};

pub const MAX_DIMS: usize = 8192;
const ICEM_MAGIC: &[u8; 4] = b"ICEM";
const ICTE_MAGIC: &[u8; 4] = b"ICTE";
const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    n_rows: usize,
    dims: usize,
    values: Vec<f32>,
    row_ids: Vec<String>,
    encoder_id: String,
}

impl EmbeddingMatrix {
    pub fn new(dims: usize, values: Vec<f32>, row_ids: Vec<String>, encoder_id: impl Into<String>) -> Result<Self> {
        if dims == 0 || dims > MAX_DIMS {
            return Err(Error::invalid(format!("dims {dims} outside 1..={MAX_DIMS}")));
        }
        if values.len() != dims * row_ids.len() {
            return Err(Error::invalid(format!(
                "{} values do not fill {} rows of {dims}",
                values.len(),
                row_ids.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value in row {}", pos / dims)));
        }
        Ok(EmbeddingMatrix {
            n_rows: row_ids.len(),
            dims,
            values,
            row_ids,
            encoder_id: encoder_id.into(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn encoder_id(&self) -> &str {
        &self.encoder_id
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dims..(i + 1) * self.dims]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.values.chunks_exact(self.dims)
    }
}

fn eof_as_truncated(path: &Path, e: std::io::Error) -> Error {
    if e.kind() == ErrorKind::UnexpectedEof {
        Error::binary(path, "truncated payload")
    } else {
        Error::io(path, e)
    }
}

fn read_u32<R: Read>(r: &mut R, path: &Path) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|e| eof_as_truncated(path, e))?;
    Ok(u32::from_le_bytes(b))
}

fn read_header<R: Read>(r: &mut R, path: &Path, magic: &[u8; 4]) -> Result<()> {
    let mut head = [0u8; 5];
    let mut filled = 0;
    while filled < head.len() {
        match r.read(&mut head[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(Error::io(path, e)),
        }
    }
    if filled < 4 || &head[..4] != magic {
        return Err(Error::binary(path, "not an ICEM/ICTE file"));
    }
    if filled < 5 {
        return Err(Error::binary(path, "truncated payload"));
    }
    if head[4] != VERSION {
        return Err(Error::binary(path, format!("unsupported version {}", head[4])));
    }
    Ok(())
}

fn check_dims(path: &Path, dims: usize) -> Result<()> {
    if dims == 0 || dims > MAX_DIMS {
        return Err(Error::binary(path, format!("dims {dims} outside 1..={MAX_DIMS}")));
    }
    Ok(())
}

/// Fills `out` with `n` little-endian floats, rejecting non-finite values.
fn read_floats<R: Read>(r: &mut R, path: &Path, out: &mut [f32], first_row: usize, dims: usize, bytes: &mut Vec<u8>) -> Result<()> {
    bytes.resize(out.len() * 4, 0);
    r.read_exact(bytes).map_err(|e| eof_as_truncated(path, e))?;
    for (i, (dst, src)) in out.iter_mut().zip(bytes.chunks_exact(4)).enumerate() {
        let v = f32::from_le_bytes([src[0], src[1], src[2], src[3]]);
        if !v.is_finite() {
            return Err(Error::binary(path, format!("non-finite value in row {}", first_row + i / dims)));
        }
        *dst = v;
    }
    Ok(())
}

/// Streaming reader over an ICEM file, for inputs too large to hold in memory.
pub struct EmbeddingRows {
    path: PathBuf,
    reader: BufReader<File>,
    n_rows: usize,
    dims: usize,
    row_ids: Vec<String>,
    next_row: usize,
    scratch: Vec<u8>,
}

impl EmbeddingRows {
    pub fn open(path: &Path, index_path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = BufReader::with_capacity(1 << 20, file);
        read_header(&mut reader, path, ICEM_MAGIC)?;
        let n_rows = read_u32(&mut reader, path)? as usize;
        let dims = read_u32(&mut reader, path)? as usize;
        check_dims(path, dims)?;
        let row_ids = read_index(index_path, n_rows)?;
        Ok(EmbeddingRows {
            path: path.to_path_buf(),
            reader,
            n_rows,
            dims,
            row_ids,
            next_row: 0,
            scratch: Vec::new(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    /// Encoder id derived from the file name (`use.icem` -> `use`).
    pub fn encoder_id(&self) -> String {
        encoder_from_path(&self.path)
    }

    /// Reads up to `max_rows` rows into `buf` (resized); returns the index of
    /// the first row read and the number of rows, or `None` at the end.
    pub fn next_block(&mut self, buf: &mut Vec<f32>, max_rows: usize) -> Result<Option<(usize, usize)>> {
        let remaining = self.n_rows - self.next_row;
        if remaining == 0 {
            self.check_trailing()?;
            return Ok(None);
        }
        let rows = remaining.min(max_rows.max(1));
        buf.resize(rows * self.dims, 0.0);
        let first = self.next_row;
        read_floats(&mut self.reader, &self.path, buf, first, self.dims, &mut self.scratch)?;
        self.next_row += rows;
        Ok(Some((first, rows)))
    }

    fn check_trailing(&mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        match self.reader.read(&mut probe) {
            Ok(0) => Ok(()),
            Ok(_) => Err(Error::binary(&self.path, "trailing bytes after payload")),
            Err(e) => Err(Error::io(&self.path, e)),
        }
    }
}

fn encoder_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "encoder".to_string())
}

fn read_index(index_path: &Path, n_rows: usize) -> Result<Vec<String>> {
    let mut ids: Vec<Option<String>> = vec![None; n_rows];
    let mut seen = HashSet::new();
    let mut lines = 0usize;
    for line in jsonl_lines(index_path)? {
        let (line_no, line) = line?;
        lines += 1;
        let obj = parse_json_object(index_path, line_no, &line)?;
        let row = obj
            .get("row")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::syntax(index_path, line_no, "field \"row\" must be a non-negative integer"))?
            as usize;
        let id = string_field(index_path, line_no, &obj, "id")?;
        if row >= n_rows {
            return Err(Error::syntax(
                index_path,
                line_no,
                format!("index/header mismatch: row {row} but header has {n_rows} rows"),
            ));
        }
        if ids[row].is_some() {
            return Err(Error::syntax(index_path, line_no, format!("row {row} listed twice")));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId {
                id: id.to_string(),
                line: line_no,
            });
        }
        ids[row] = Some(id.to_string());
    }
    if lines != n_rows {
        return Err(Error::binary(
            index_path,
            format!("index/header mismatch: index lists {lines} rows, header says {n_rows}"),
        ));
    }
    Ok(ids.into_iter().map(|id| id.expect("every row filled")).collect())
}

pub fn read_embeddings(path: &Path, index_path: &Path) -> Result<EmbeddingMatrix> {
    let mut rows = EmbeddingRows::open(path, index_path)?;
    let mut values = Vec::with_capacity(rows.n_rows() * rows.dims());
    let mut buf = Vec::new();
    while rows.next_block(&mut buf, 4096)?.is_some() {
        values.extend_from_slice(&buf);
    }
    let dims = rows.dims();
    let encoder = rows.encoder_id();
    let ids = std::mem::take(&mut rows.row_ids);
    EmbeddingMatrix::new(dims, values, ids, encoder)
}

pub fn write_embeddings<W: Write, I: Write>(m: &EmbeddingMatrix, mut data: W, mut index: I) -> std::io::Result<()> {
    data.write_all(ICEM_MAGIC)?;
    data.write_all(&[VERSION])?;
    data.write_all(&(m.n_rows as u32).to_le_bytes())?;
    data.write_all(&(m.dims as u32).to_le_bytes())?;
    for v in &m.values {
        data.write_all(&v.to_le_bytes())?;
    }
    for (row, id) in m.row_ids.iter().enumerate() {
        writeln!(index, "{}", serde_json::json!({ "row": row, "id": id }))?;
    }
    Ok(())
}

/// Per-record token matrices (`n_tokens x dims`, row-major).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TokenEmbeddingSet {
    dims: usize,
    entries: BTreeMap<String, Vec<f32>>,
}

impl TokenEmbeddingSet {
    pub fn new(dims: usize) -> Result<Self> {
        if dims == 0 || dims > MAX_DIMS {
            return Err(Error::invalid(format!("dims {dims} outside 1..={MAX_DIMS}")));
        }
        Ok(TokenEmbeddingSet {
            dims,
            entries: BTreeMap::new(),
        })
    }

    pub fn insert(&mut self, id: impl Into<String>, values: Vec<f32>) -> Result<()> {
        let id = id.into();
        if values.is_empty() || values.len() % self.dims != 0 {
            return Err(Error::invalid(format!("token matrix for {id} is not a non-empty multiple of {}", self.dims)));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value in token matrix for {id}")));
        }
        if self.entries.contains_key(&id) {
            return Err(Error::invalid(format!("duplicate id {id}")));
        }
        self.entries.insert(id, values);
        Ok(())
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.entries.get(id).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &[f32])> {
        self.entries.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn as_map(&self) -> &BTreeMap<String, Vec<f32>> {
        &self.entries
    }
}

pub fn read_token_embeddings(path: &Path) -> Result<TokenEmbeddingSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    read_header(&mut r, path, ICTE_MAGIC)?;
    let mut set = TokenEmbeddingSet::default();
    let mut scratch = Vec::new();
    let mut record = 0usize;
    loop {
        let mut len_bytes = [0u8; 4];
        let mut filled = 0;
        while filled < 4 {
            match r.read(&mut len_bytes[filled..]) {
                Ok(0) => break,
                Ok(n) => filled += n,
                Err(e) if e.kind() == ErrorKind::Interrupted => {}
                Err(e) => return Err(Error::io(path, e)),
            }
        }
        if filled == 0 {
            break;
        }
        if filled < 4 {
            return Err(Error::binary(path, "truncated payload"));
        }
        let id_len = u32::from_le_bytes(len_bytes) as usize;
        let mut id_bytes = vec![0u8; id_len];
        r.read_exact(&mut id_bytes).map_err(|e| eof_as_truncated(path, e))?;
        let id = String::from_utf8(id_bytes)
            .map_err(|_| Error::binary(path, format!("record {record}: id is not UTF-8")))?;
        if id.is_empty() {
            return Err(Error::binary(path, format!("record {record}: empty id")));
        }
        let n_tokens = read_u32(&mut r, path)? as usize;
        let dims = read_u32(&mut r, path)? as usize;
        check_dims(path, dims)?;
        if n_tokens == 0 {
            return Err(Error::binary(path, format!("record {id}: zero tokens")));
        }
        if set.dims == 0 {
            set.dims = dims;
        } else if set.dims != dims {
            return Err(Error::binary(path, format!("record {id}: dims {dims} differ from {}", set.dims)));
        }
        let mut values = vec![0.0f32; n_tokens * dims];
        read_floats(&mut r, path, &mut values, 0, dims, &mut scratch)
            .map_err(|e| match e {
                Error::Binary { path, message } if message.starts_with("non-finite") => Error::Binary {
                    path,
                    message: format!("non-finite value in record {id}"),
                },
                other => other,
            })?;
        if set.entries.insert(id.clone(), values).is_some() {
            return Err(Error::binary(path, format!("duplicate id {id}")));
        }
        record += 1;
    }
    Ok(set)
}

pub fn write_token_embeddings<W: Write>(set: &TokenEmbeddingSet, mut out: W) -> std::io::Result<()> {
    out.write_all(ICTE_MAGIC)?;
    out.write_all(&[VERSION])?;
    for (id, values) in &set.entries {
        out.write_all(&(id.len() as u32).to_le_bytes())?;
        out.write_all(id.as_bytes())?;
        out.write_all(&((values.len() / set.dims) as u32).to_le_bytes())?;
        out.write_all(&(set.dims as u32).to_le_bytes())?;
        for v in values {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}
