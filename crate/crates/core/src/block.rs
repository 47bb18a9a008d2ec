//! Finite multi-dimensional symbol arrays.
//!
//! A [`Block`] is the common currency of the crate: machine outputs,
//! lookup-table keys, decomposition pieces and whole evaluated objects are
//! all blocks. Symbols are small integers `0..k`; one dimension makes a
//! string, two a matrix, three or more a tensor.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    dims: Vec<usize>,
    data: Vec<u8>,
}

impl Block {
    /// Builds a block from explicit dimensions and row-major data.
    pub fn new(dims: Vec<usize>, data: Vec<u8>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "dimensions must be non-empty and positive, got {dims:?}"
            )));
        }
        let cells: usize = dims.iter().product();
        if cells != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "dims {dims:?} require {cells} cells, got {}",
                data.len()
            )));
        }
        Ok(Block { dims, data })
    }

    pub fn string(data: Vec<u8>) -> Result<Self> {
        let len = data.len();
        Block::new(vec![len], data)
    }

    /// Parses a string of ASCII digit symbols, e.g. `"0101"`.
    pub fn from_digits(s: &str) -> Result<Self> {
        let data = parse_digit_run(s)?;
        Block::string(data)
    }

    pub fn matrix(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        Block::new(vec![rows, cols], data)
    }

    /// Parses a matrix from digit rows, e.g. `&["010", "111"]`.
    pub fn matrix_from_rows(rows: &[&str]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::ShapeMismatch("matrix needs at least one row".into()));
        }
        let cols = rows[0].chars().count();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.chars().count() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "ragged matrix rows: expected width {cols}, got {}",
                    row.chars().count()
                )));
            }
            data.extend(parse_digit_run(row)?);
        }
        Block::matrix(rows.len(), cols, data)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// Number of dimensions (1 = string, 2 = matrix, ...).
    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn cells(&self) -> usize {
        self.data.len()
    }

    pub fn is_string(&self) -> bool {
        self.dims.len() == 1
    }

    /// Largest symbol present plus one; the minimal alphabet containing the
    /// block. At least 1.
    pub fn min_alphabet(&self) -> usize {
        self.data
            .iter()
            .copied()
            .max()
            .map_or(1, |m| m as usize + 1)
    }

    /// Row-major cell access for a 2-dimensional block.
    pub fn at(&self, row: usize, col: usize) -> u8 {
        debug_assert_eq!(self.dims.len(), 2);
        self.data[row * self.dims[1] + col]
    }

    /// Symbol-wise complement `s -> k-1-s` for alphabet size `k`.
    pub fn complement(&self, k: usize) -> Block {
        let hi = (k - 1) as u8;
        Block {
            dims: self.dims.clone(),
            data: self.data.iter().map(|&s| hi - s).collect(),
        }
    }

    /// Reversal of a 1-dimensional block.
    pub fn reversed(&self) -> Block {
        debug_assert!(self.is_string());
        let mut data = self.data.clone();
        data.reverse();
        Block {
            dims: self.dims.clone(),
            data,
        }
    }

    /// Extracts the sub-block with origin `origin` and shape `shape`.
    /// All coordinates must be in range.
    pub fn sub_block(&self, origin: &[usize], shape: &[usize]) -> Block {
        debug_assert_eq!(origin.len(), self.dims.len());
        debug_assert_eq!(shape.len(), self.dims.len());
        let mut data = Vec::with_capacity(shape.iter().product());
        let mut idx = vec![0usize; shape.len()];
        loop {
            let mut flat = 0usize;
            for (axis, &i) in idx.iter().enumerate() {
                flat = flat * self.dims[axis] + origin[axis] + i;
            }
            data.push(self.data[flat]);
            if !advance(&mut idx, shape) {
                break;
            }
        }
        Block {
            dims: shape.to_vec(),
            data,
        }
    }

    /// Extracts a sub-block on a torus: coordinates wrap modulo each
    /// dimension.
    pub fn sub_block_cyclic(&self, origin: &[usize], shape: &[usize]) -> Block {
        let mut data = Vec::with_capacity(shape.iter().product());
        let mut idx = vec![0usize; shape.len()];
        loop {
            let mut flat = 0usize;
            for (axis, &i) in idx.iter().enumerate() {
                flat = flat * self.dims[axis] + (origin[axis] + i) % self.dims[axis];
            }
            data.push(self.data[flat]);
            if !advance(&mut idx, shape) {
                break;
            }
        }
        Block {
            dims: shape.to_vec(),
            data,
        }
    }

    /// Serialized key: digits for strings, `RxC:`-prefixed row-major digits
    /// for matrices and higher-dimensional blocks. Requires symbols < 10.
    pub fn key(&self) -> String {
        let digits: String = self.data.iter().map(|&s| char::from(b'0' + s)).collect();
        if self.dims.len() == 1 {
            digits
        } else {
            let dims = self
                .dims
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("x");
            format!("{dims}:{digits}")
        }
    }

    /// Parses the [`Block::key`] form.
    pub fn from_key(key: &str) -> Result<Self> {
        match key.split_once(':') {
            None => Block::from_digits(key),
            Some((dims, digits)) => {
                let dims: Vec<usize> = dims
                    .split('x')
                    .map(|d| {
                        d.parse::<usize>().map_err(|_| {
                            Error::ShapeMismatch(format!("bad dimension `{d}` in block key"))
                        })
                    })
                    .collect::<Result<_>>()?;
                Block::new(dims, parse_digit_run(digits)?)
            }
        }
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Block({})", self.key())
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Odometer increment over `shape`; returns false after the last index.
fn advance(idx: &mut [usize], shape: &[usize]) -> bool {
    for axis in (0..idx.len()).rev() {
        idx[axis] += 1;
        if idx[axis] < shape[axis] {
            return true;
        }
        idx[axis] = 0;
    }
    false
}

fn parse_digit_run(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| Error::ShapeMismatch(format!("invalid symbol `{c}`")))
        })
        .collect()
}

/// Parses an object file: a `dims=` header introduces a tensor, two or more
/// digit lines a matrix, a single digit line a string.
pub fn parse_object(text: &str) -> Result<Block> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(Error::ShapeMismatch("empty object".into()));
    }
    if let Some(spec) = lines[0].strip_prefix("dims=") {
        let dims: Vec<usize> = spec
            .trim()
            .split('x')
            .map(|d| {
                d.parse::<usize>()
                    .map_err(|_| Error::ShapeMismatch(format!("bad tensor dimension `{d}`")))
            })
            .collect::<Result<_>>()?;
        let mut data = Vec::new();
        for line in &lines[1..] {
            data.extend(parse_digit_run(line.trim())?);
        }
        return Block::new(dims, data);
    }
    if lines.len() == 1 {
        Block::from_digits(lines[0].trim())
    } else {
        Block::matrix_from_rows(&lines.iter().map(|l| l.trim()).collect::<Vec<_>>())
    }
}

/// Renders an object in the format accepted by [`parse_object`].
pub fn format_object(block: &Block) -> String {
    match block.ndim() {
        1 => {
            let mut s = block.key();
            s.push('\n');
            s
        }
        // A one-line digit file reads back as a string, so single-row
        // matrices need the explicit header form.
        2 if block.dims()[0] > 1 => {
            let (rows, cols) = (block.dims()[0], block.dims()[1]);
            let mut out = String::with_capacity(rows * (cols + 1));
            for r in 0..rows {
                for c in 0..cols {
                    out.push(char::from(b'0' + block.at(r, c)));
                }
                out.push('\n');
            }
            out
        }
        _ => {
            let dims = block
                .dims()
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("x");
            let digits: String = block.data().iter().map(|&s| char::from(b'0' + s)).collect();
            format!("dims={dims}\n{digits}\n")
        }
    }
}
