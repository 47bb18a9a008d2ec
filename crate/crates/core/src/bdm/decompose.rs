//! Object decomposition under the four boundary strategies.

use super::{BdmConfig, BlockMultiset, Boundary, Leftover};
use crate::block::Block;
use crate::error::{Error, Result};

/// Anchor corner of the recursive partition. The accepted spellings `UL`,
/// `LL`, `LR` and `UR` name the corners; `DR` is an alias of `UR`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Quadrant {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

impl Quadrant {
    fn anchors_top(self) -> bool {
        matches!(self, Quadrant::TopLeft | Quadrant::TopRight)
    }

    fn anchors_left(self) -> bool {
        matches!(self, Quadrant::TopLeft | Quadrant::BottomLeft)
    }
}

impl std::str::FromStr for Quadrant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "UL" | "TL" => Ok(Quadrant::TopLeft),
            "UR" | "TR" | "DR" => Ok(Quadrant::TopRight),
            "LL" | "BL" => Ok(Quadrant::BottomLeft),
            "LR" | "BR" => Ok(Quadrant::BottomRight),
            other => Err(Error::Config(format!("unknown quadrant `{other}`"))),
        }
    }
}

/// Window start offsets for one axis: multiples of `step` while a window of
/// `size` fits in `len`. Also returns the covered extent.
fn trim_starts(len: usize, size: usize, step: usize) -> (Vec<usize>, usize) {
    let last = (len - size) / step * step;
    let starts = (0..=last).step_by(step).collect();
    (starts, last + size)
}

fn window_blocks(
    object: &Block,
    size: usize,
    step: usize,
    cyclic: bool,
) -> Result<(Vec<Block>, usize)> {
    let dims = object.dims();
    let shape = vec![size; dims.len()];
    let mut axis_starts: Vec<Vec<usize>> = Vec::with_capacity(dims.len());
    let mut covered = 1usize;
    for &len in dims {
        if size > len {
            return Err(Error::ObjectBelowBlockSize(format!(
                "axis of length {len} cannot hold a block of size {size}"
            )));
        }
        if cyclic {
            axis_starts.push((0..len).step_by(step).collect());
            covered *= len;
        } else {
            let (starts, extent) = trim_starts(len, size, step);
            axis_starts.push(starts);
            covered *= extent;
        }
    }
    let mut blocks = Vec::new();
    let mut cursor = vec![0usize; dims.len()];
    loop {
        let origin: Vec<usize> = cursor
            .iter()
            .zip(&axis_starts)
            .map(|(&i, starts)| starts[i])
            .collect();
        blocks.push(if cyclic {
            object.sub_block_cyclic(&origin, &shape)
        } else {
            object.sub_block(&origin, &shape)
        });
        let mut axis = dims.len();
        loop {
            if axis == 0 {
                return Ok((blocks, covered));
            }
            axis -= 1;
            cursor[axis] += 1;
            if cursor[axis] < axis_starts[axis].len() {
                break;
            }
            cursor[axis] = 0;
        }
    }
}

/// Decomposes `object` according to `config`. Multiplicities count exact
/// block matches; the leftover record accounts for every cell ignored by
/// trimming or appended by a border.
pub fn decompose(object: &Block, config: &BdmConfig) -> Result<BlockMultiset> {
    config.validate()?;
    let w = object.ndim();
    if w > 2 && !(config.boundary == Boundary::Trim && config.offset == config.block_size) {
        return Err(Error::UnsupportedTensor {
            dims: w,
            what: "only non-overlapping Trim decomposition is supported".into(),
        });
    }
    match config.boundary {
        Boundary::Trim => {
            let (blocks, covered) = window_blocks(object, config.block_size, config.offset, false)?;
            Ok(BlockMultiset::from_blocks(
                blocks,
                Leftover {
                    ignored_cells: object.cells() - covered,
                    ..Leftover::default()
                },
            ))
        }
        Boundary::Cyclic => {
            let (blocks, _) = window_blocks(object, config.block_size, config.offset, true)?;
            Ok(BlockMultiset::from_blocks(blocks, Leftover::default()))
        }
        Boundary::AddBorder => bordered(object, config, 0),
        Boundary::Recursive => {
            let blocks = recursive_partition(object, config.block_size, &config.quadrants)?;
            Ok(BlockMultiset::from_blocks(blocks, Leftover::default()))
        }
    }
}

/// AddBorder decomposition with an explicit fill symbol: each axis is
/// extended to the next length expressible as `block + j*offset`, so the
/// windows tile the extended object exactly.
pub(super) fn bordered(object: &Block, config: &BdmConfig, fill: u8) -> Result<BlockMultiset> {
    let (l, m) = (config.block_size, config.offset);
    let dims = object.dims();
    let extended_dims: Vec<usize> = dims
        .iter()
        .map(|&len| {
            if len <= l {
                l
            } else {
                l + (len - l).div_ceil(m) * m
            }
        })
        .collect();
    let added_per_axis: Vec<usize> = extended_dims
        .iter()
        .zip(dims)
        .map(|(&e, &o)| e - o)
        .collect();
    let extended = if extended_dims == dims {
        object.clone()
    } else {
        let mut data = vec![fill; extended_dims.iter().product()];
        // Copy the object into the low corner.
        let mut idx = vec![0usize; dims.len()];
        let mut src = 0usize;
        'copy: loop {
            let mut flat = 0usize;
            for (axis, &i) in idx.iter().enumerate() {
                flat = flat * extended_dims[axis] + i;
            }
            data[flat] = object.data()[src];
            src += 1;
            let mut axis = dims.len();
            loop {
                if axis == 0 {
                    break 'copy;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < dims[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
        Block::new(extended_dims.clone(), data)?
    };
    let (blocks, covered) = window_blocks(&extended, l, m, false)?;
    debug_assert_eq!(covered, extended.cells());
    let added_cells = extended.cells() - object.cells();
    Ok(BlockMultiset::from_blocks(
        blocks,
        Leftover {
            ignored_cells: 0,
            added_cells,
            added_per_axis,
            border_fill: Some(fill),
        },
    ))
}

/// Sliding-window decomposition of a matrix embedded in a torus: every cell
/// appears in exactly `d*d` blocks and there is no leftover.
pub fn cyclic_embed(x: &Block, d: usize) -> Result<BlockMultiset> {
    if x.ndim() != 2 {
        return Err(Error::ShapeMismatch(
            "cyclic embedding is defined for matrices".into(),
        ));
    }
    decompose(
        x,
        &BdmConfig::overlapping(d, 1).with_boundary(Boundary::Cyclic),
    )
}

/// Recursive partition of a string or matrix: the largest grid of
/// `d`-sized blocks is anchored at the quadrant's corner, and the residual
/// strips are partitioned again with size `d-1`, down to single cells.
/// Covers every cell exactly once. The quadrant sequence is consumed one
/// entry per level and cycled if exhausted.
pub fn recursive_partition(x: &Block, d: usize, quadrants: &[Quadrant]) -> Result<Vec<Block>> {
    if d == 0 {
        return Err(Error::Config("block size must be positive".into()));
    }
    if quadrants.is_empty() {
        return Err(Error::Config("quadrant sequence must be non-empty".into()));
    }
    let mut blocks = Vec::new();
    match x.ndim() {
        1 => rec_1d(x, 0, x.cells(), d, quadrants, 0, &mut blocks),
        2 => rec_2d(
            x,
            (0, 0),
            (x.dims()[0], x.dims()[1]),
            d,
            quadrants,
            0,
            &mut blocks,
        ),
        w => {
            return Err(Error::UnsupportedTensor {
                dims: w,
                what: "recursive partition ships for strings and matrices".into(),
            })
        }
    }
    Ok(blocks)
}

fn rec_1d(
    x: &Block,
    start: usize,
    len: usize,
    size: usize,
    quadrants: &[Quadrant],
    level: usize,
    out: &mut Vec<Block>,
) {
    if len == 0 {
        return;
    }
    if size == 1 {
        for i in 0..len {
            out.push(x.sub_block(&[start + i], &[1]));
        }
        return;
    }
    let fit = len / size * size;
    if fit == 0 {
        rec_1d(x, start, len, size - 1, quadrants, level + 1, out);
        return;
    }
    let q = quadrants[level % quadrants.len()];
    let anchor = if q.anchors_left() {
        start
    } else {
        start + len - fit
    };
    for i in 0..fit / size {
        out.push(x.sub_block(&[anchor + i * size], &[size]));
    }
    let (rest_start, rest_len) = if q.anchors_left() {
        (start + fit, len - fit)
    } else {
        (start, len - fit)
    };
    rec_1d(x, rest_start, rest_len, size - 1, quadrants, level + 1, out);
}

#[allow(clippy::too_many_arguments)]
fn rec_2d(
    x: &Block,
    (row, col): (usize, usize),
    (rows, cols): (usize, usize),
    size: usize,
    quadrants: &[Quadrant],
    level: usize,
    out: &mut Vec<Block>,
) {
    if rows == 0 || cols == 0 {
        return;
    }
    if size == 1 {
        for r in 0..rows {
            for c in 0..cols {
                out.push(x.sub_block(&[row + r, col + c], &[1, 1]));
            }
        }
        return;
    }
    let fit_r = rows / size * size;
    let fit_c = cols / size * size;
    if fit_r == 0 || fit_c == 0 {
        rec_2d(
            x,
            (row, col),
            (rows, cols),
            size - 1,
            quadrants,
            level + 1,
            out,
        );
        return;
    }
    let q = quadrants[level % quadrants.len()];
    let grid_r = if q.anchors_top() {
        row
    } else {
        row + rows - fit_r
    };
    let grid_c = if q.anchors_left() {
        col
    } else {
        col + cols - fit_c
    };
    for r in 0..fit_r / size {
        for c in 0..fit_c / size {
            out.push(x.sub_block(&[grid_r + r * size, grid_c + c * size], &[size, size]));
        }
    }
    // Residual strips relative to the anchored grid: a vertical strip
    // beside it, a horizontal strip above/below it, and the corner.
    let (res_rows_start, res_rows) = if q.anchors_top() {
        (row + fit_r, rows - fit_r)
    } else {
        (row, rows - fit_r)
    };
    let (res_cols_start, res_cols) = if q.anchors_left() {
        (col + fit_c, cols - fit_c)
    } else {
        (col, cols - fit_c)
    };
    // Vertical strip: grid rows x leftover cols.
    rec_2d(
        x,
        (grid_r, res_cols_start),
        (fit_r, res_cols),
        size - 1,
        quadrants,
        level + 1,
        out,
    );
    // Horizontal strip: leftover rows x grid cols.
    rec_2d(
        x,
        (res_rows_start, grid_c),
        (res_rows, fit_c),
        size - 1,
        quadrants,
        level + 1,
        out,
    );
    // Corner: leftover rows x leftover cols.
    rec_2d(
        x,
        (res_rows_start, res_cols_start),
        (res_rows, res_cols),
        size - 1,
        quadrants,
        level + 1,
        out,
    );
}
