//! Oriented block family for the mixing estimator.
//!
//! A block is a rotated rectangle of lattice positions translated to an
//! anchor on the coefficient grid, spanning every coefficient channel. The
//! family holds one rasterized shape per (rotation, base rectangle) and every
//! anchor of the grid; blocks are addressed by id and never materialized.
//!
//! Offsets are `(drow, dcol)`; the geometric frame has `x = dcol` and
//! `y = -drow`, and angles are counter-clockwise from the `x` axis.
//!
//! A block's direction is the direction of its long side, and its lines run
//! along that direction. A base rectangle `(w, h)` with `h > w` rotated by
//! `phi` therefore has direction `phi + pi/2`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Number of block directions.
pub const ANGLE_COUNT: usize = 20;
/// Inclusive area range of the base rectangles.
pub const MIN_AREA: usize = 12;
pub const MAX_AREA: usize = 18;

/// Sub-pixel shift of the rasterization grid. Keeps lattice points off the
/// rectangle boundary for axis-aligned rectangles of any parity.
const RASTER_SHIFT: f64 = 0.25;

/// Every `(w, h)` with `w != h` and area in `[12, 18]`, lexicographic.
pub fn base_shapes() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for w in 1..=MAX_AREA {
        for h in 1..=MAX_AREA {
            if w != h && (MIN_AREA..=MAX_AREA).contains(&(w * h)) {
                out.push((w, h));
            }
        }
    }
    out
}

/// `count` equally spaced angles `k pi / count` in `[0, pi)`.
pub fn angle_set(count: usize) -> Vec<f64> {
    (0..count).map(|k| k as f64 * PI / count as f64).collect()
}

/// A rasterized rotated rectangle.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockShape {
    pub width: usize,
    pub height: usize,
    /// Rotation applied to the base rectangle.
    pub rotation: f64,
    /// Direction of the long side, in `[0, pi)`.
    pub theta: f64,
    /// Offsets grouped by line, each line ordered along `theta`.
    offsets: Vec<(isize, isize)>,
    /// Start of each line in `offsets`, plus a final end marker.
    line_starts: Vec<usize>,
}

impl BlockShape {
    pub fn offsets(&self) -> &[(isize, isize)] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn line_count(&self) -> usize {
        self.line_starts.len() - 1
    }

    /// Offsets on line `i`.
    pub fn line(&self, i: usize) -> &[(isize, isize)] {
        &self.offsets[self.line_starts[i]..self.line_starts[i + 1]]
    }

    pub fn lines(&self) -> impl Iterator<Item = &[(isize, isize)]> {
        (0..self.line_count()).map(|i| self.line(i))
    }

    /// Line index of every offset, in [`offsets`](Self::offsets) order.
    pub fn line_ids(&self) -> Vec<usize> {
        let mut ids = Vec::with_capacity(self.len());
        for i in 0..self.line_count() {
            ids.extend(std::iter::repeat_n(i, self.line(i).len()));
        }
        ids
    }

    /// Bounding-box side, the larger of the row and column spans.
    pub fn extent(&self) -> usize {
        let span = |f: fn(&(isize, isize)) -> isize| {
            let lo = self.offsets.iter().map(f).min().unwrap_or(0);
            let hi = self.offsets.iter().map(f).max().unwrap_or(-1);
            (hi - lo + 1) as usize
        };
        span(|o| o.0).max(span(|o| o.1))
    }

    fn same_cells(&self, other: &BlockShape) -> bool {
        self.offsets == other.offsets && self.line_starts == other.line_starts
    }
}

/// Rectangle `w x h` centered at the anchor and rotated by `rotation`:
/// the lattice points whose centers fall strictly inside it.
pub fn rasterize(w: usize, h: usize, rotation: f64) -> BlockShape {
    let (s, c) = rotation.sin_cos();
    let (hw, hh) = (w as f64 / 2.0, h as f64 / 2.0);
    let reach = (hw.hypot(hh)).ceil() as isize + 1;
    let theta = if h > w {
        (rotation + PI / 2.0).rem_euclid(PI)
    } else {
        rotation.rem_euclid(PI)
    };
    let (ts, tc) = theta.sin_cos();

    // (line key, position along the line, offset)
    let mut cells: Vec<(i64, f64, (isize, isize))> = Vec::new();
    for dr in -reach..=reach {
        for dc in -reach..=reach {
            let x = dc as f64 - RASTER_SHIFT;
            let y = -dr as f64 - RASTER_SHIFT;
            let u = x * c + y * s;
            let v = -x * s + y * c;
            if u.abs() < hw && v.abs() < hh {
                let along = x * tc + y * ts;
                let across = -x * ts + y * tc;
                cells.push(((across + 0.5).floor() as i64, along, (dr, dc)));
            }
        }
    }
    cells.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut line_starts = vec![0];
    for i in 1..cells.len() {
        if cells[i].0 != cells[i - 1].0 {
            line_starts.push(i);
        }
    }
    line_starts.push(cells.len());
    BlockShape {
        width: w,
        height: h,
        rotation,
        theta,
        offsets: cells.into_iter().map(|c| c.2).collect(),
        line_starts,
    }
}

/// Shapes and angles used to build a family.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockConfig {
    pub shapes: Vec<(usize, usize)>,
    pub angles: Vec<f64>,
}

impl Default for BlockConfig {
    fn default() -> Self {
        BlockConfig {
            shapes: base_shapes(),
            angles: angle_set(ANGLE_COUNT),
        }
    }
}

/// Key-value text, one `key = value` per line, `#` starts a comment:
///
/// ```text
/// shapes = 1x12, 12x1, 2x6     # w x h pairs
/// angles = 20                  # count of equally spaced angles in [0, pi)
/// angles_deg = 0, 45, 90, 135  # or an explicit list in degrees
/// ```
///
/// Keys left out keep their defaults.
impl FromStr for BlockConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = BlockConfig::default();
        let list = |v: &str| -> Vec<String> {
            v.split(|ch: char| ch == ',' || ch.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(str::to_owned)
                .collect()
        };
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse(format!("block config line {}: {msg}", n + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key = value"))?;
            match key.trim() {
                "shapes" => {
                    cfg.shapes = list(value)
                        .iter()
                        .map(|t| {
                            let (w, h) = t
                                .split_once(['x', 'X'])
                                .ok_or_else(|| err("shape must be WxH"))?;
                            let w: usize = w.parse().map_err(|_| err("bad shape width"))?;
                            let h: usize = h.parse().map_err(|_| err("bad shape height"))?;
                            if w == 0 || h == 0 {
                                return Err(err("shape sides must be positive"));
                            }
                            Ok((w, h))
                        })
                        .collect::<Result<_>>()?;
                }
                "angles" => {
                    let count: usize = value
                        .trim()
                        .parse()
                        .map_err(|_| err("angles must be a count"))?;
                    if count == 0 {
                        return Err(err("angle count must be positive"));
                    }
                    cfg.angles = angle_set(count);
                }
                "angles_deg" => {
                    cfg.angles = list(value)
                        .iter()
                        .map(|t| {
                            t.parse::<f64>()
                                .map(|d| d.to_radians().rem_euclid(PI))
                                .map_err(|_| err("bad angle"))
                        })
                        .collect::<Result<_>>()?;
                }
                other => return Err(err(&format!("unknown key {other:?}"))),
            }
        }
        if cfg.shapes.is_empty() || cfg.angles.is_empty() {
            return Err(Error::Parse(
                "block config needs at least one shape and one angle".into(),
            ));
        }
        Ok(cfg)
    }
}

impl fmt::Display for BlockConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shapes: Vec<String> = self
            .shapes
            .iter()
            .map(|(w, h)| format!("{w}x{h}"))
            .collect();
        writeln!(f, "shapes = {}", shapes.join(", "))?;
        let angles: Vec<String> = self
            .angles
            .iter()
            .map(|a| format!("{}", a.to_degrees()))
            .collect();
        writeln!(f, "angles_deg = {}", angles.join(", "))
    }
}

/// A block: one shape of the family at one anchor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub id: u64,
    pub shape: usize,
    pub anchor: (usize, usize),
}

/// Every shape of a configuration translated over an `M x N` grid.
#[derive(Clone, Debug)]
pub struct BlockFamily {
    rows: usize,
    cols: usize,
    channels: Vec<usize>,
    rotations: Vec<f64>,
    base: Vec<(usize, usize)>,
    /// Rotation-major: index `rotation * base.len() + base_index`.
    shapes: Vec<BlockShape>,
    /// Distinct block directions, ascending.
    thetas: Vec<f64>,
    theta_of_shape: Vec<usize>,
    /// Index of the first shape with the same cells and lines.
    canonical: Vec<usize>,
}

/// Block directions closer than this are the same direction.
const THETA_EPS: f64 = 1e-9;

fn same_theta(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(PI);
    d < THETA_EPS || PI - d < THETA_EPS
}

impl BlockFamily {
    pub fn new(rows: usize, cols: usize, channels: Vec<usize>) -> Result<Self> {
        Self::with_config(rows, cols, channels, &BlockConfig::default())
    }

    pub fn with_config(
        rows: usize,
        cols: usize,
        channels: Vec<usize>,
        cfg: &BlockConfig,
    ) -> Result<Self> {
        let mut shapes = Vec::with_capacity(cfg.angles.len() * cfg.shapes.len());
        for &rot in &cfg.angles {
            for &(w, h) in &cfg.shapes {
                shapes.push(rasterize(w, h, rot));
            }
        }
        let extent = shapes.iter().map(BlockShape::extent).max().unwrap_or(0);
        if rows < extent || cols < extent {
            return Err(Error::GridTooSmall { rows, cols, extent });
        }

        let mut thetas: Vec<f64> = Vec::new();
        let mut theta_of_shape = Vec::with_capacity(shapes.len());
        for s in &shapes {
            let i = match thetas.iter().position(|&t| same_theta(t, s.theta)) {
                Some(i) => i,
                None => {
                    thetas.push(s.theta);
                    thetas.len() - 1
                }
            };
            theta_of_shape.push(i);
        }
        // Sort directions ascending and remap.
        let mut order: Vec<usize> = (0..thetas.len()).collect();
        order.sort_by(|&a, &b| thetas[a].total_cmp(&thetas[b]));
        let mut rank = vec![0; thetas.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let thetas: Vec<f64> = order.iter().map(|&i| thetas[i]).collect();
        let theta_of_shape: Vec<usize> = theta_of_shape.into_iter().map(|i| rank[i]).collect();

        let canonical = (0..shapes.len())
            .map(|i| {
                (0..i)
                    .find(|&j| {
                        theta_of_shape[j] == theta_of_shape[i] && shapes[j].same_cells(&shapes[i])
                    })
                    .unwrap_or(i)
            })
            .collect();

        Ok(BlockFamily {
            rows,
            cols,
            channels,
            rotations: cfg.angles.clone(),
            base: cfg.shapes.clone(),
            shapes,
            thetas,
            theta_of_shape,
            canonical,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn channels(&self) -> &[usize] {
        &self.channels
    }

    /// Rotation angles of the configuration.
    pub fn rotations(&self) -> &[f64] {
        &self.rotations
    }

    pub fn base_shapes(&self) -> &[(usize, usize)] {
        &self.base
    }

    pub fn shapes(&self) -> &[BlockShape] {
        &self.shapes
    }

    pub fn shape(&self, i: usize) -> &BlockShape {
        &self.shapes[i]
    }

    /// Distinct block directions, ascending in `[0, pi)`.
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Index into [`thetas`](Self::thetas) of a shape's direction.
    pub fn theta_index(&self, shape: usize) -> usize {
        self.theta_of_shape[shape]
    }

    /// True when no earlier shape covers the same cells with the same lines.
    /// Rotating `(w, h)` by `phi` and `(h, w)` by `phi - pi/2` yields the
    /// same block; only the first is canonical.
    pub fn is_canonical(&self, shape: usize) -> bool {
        self.canonical[shape] == shape
    }

    pub fn anchors(&self) -> u64 {
        (self.rows * self.cols) as u64
    }

    pub fn len(&self) -> u64 {
        self.shapes.len() as u64 * self.anchors()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Block count per rotation angle.
    pub fn per_rotation(&self) -> u64 {
        self.base.len() as u64 * self.anchors()
    }

    pub fn block(&self, id: u64) -> Block {
        assert!(id < self.len(), "block id {id} out of range");
        let a = self.anchors();
        let rem = id % a;
        Block {
            id,
            shape: (id / a) as usize,
            anchor: (
                (rem / self.cols as u64) as usize,
                (rem % self.cols as u64) as usize,
            ),
        }
    }

    pub fn block_id(&self, shape: usize, anchor: (usize, usize)) -> u64 {
        shape as u64 * self.anchors() + (anchor.0 * self.cols + anchor.1) as u64
    }

    pub fn theta(&self, block: &Block) -> f64 {
        self.thetas[self.theta_of_shape[block.shape]]
    }

    pub fn iter(&self) -> impl Iterator<Item = Block> + '_ {
        self.range(0..self.len())
    }

    pub fn range(&self, ids: Range<u64>) -> impl Iterator<Item = Block> + '_ {
        ids.map(|id| self.block(id))
    }

    /// Blocks whose direction is `thetas()[theta]`.
    pub fn iter_theta(&self, theta: usize) -> impl Iterator<Item = Block> + '_ {
        (0..self.shapes.len())
            .filter(move |&s| self.theta_of_shape[s] == theta)
            .flat_map(move |s| {
                let base = s as u64 * self.anchors();
                self.range(base..base + self.anchors())
            })
    }

    /// `parts` disjoint consecutive id ranges covering the family.
    pub fn split(&self, parts: usize) -> Vec<Range<u64>> {
        let parts = parts.max(1) as u64;
        let n = self.len();
        (0..parts)
            .map(|p| p * n / parts..(p + 1) * n / parts)
            .collect()
    }

    /// Grid positions covered by a block, in shape offset order.
    pub fn positions<'a>(&'a self, block: &Block) -> impl Iterator<Item = (usize, usize)> + 'a {
        let (r0, c0) = (block.anchor.0 as isize, block.anchor.1 as isize);
        let (m, n) = (self.rows as isize, self.cols as isize);
        self.shapes[block.shape]
            .offsets
            .iter()
            .map(move |&(dr, dc)| {
                (
                    (r0 + dr).rem_euclid(m) as usize,
                    (c0 + dc).rem_euclid(n) as usize,
                )
            })
    }

    pub fn contains(&self, block: &Block, pos: (usize, usize)) -> bool {
        self.positions(block).any(|p| p == pos)
    }

    /// Every block covering `pos`.
    pub fn blocks_at(&self, pos: (usize, usize)) -> Vec<Block> {
        let (m, n) = (self.rows as isize, self.cols as isize);
        let mut out = BTreeSet::new();
        for (s, shape) in self.shapes.iter().enumerate() {
            for &(dr, dc) in &shape.offsets {
                let anchor = (
                    (pos.0 as isize - dr).rem_euclid(m) as usize,
                    (pos.1 as isize - dc).rem_euclid(n) as usize,
                );
                out.insert(self.block(self.block_id(s, anchor)));
            }
        }
        out.into_iter().collect()
    }
}
