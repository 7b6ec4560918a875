//! Grid discretization of ℝⁿ (n = 1, 2): windows, sampled fields, lattice
//! balls, dyadic cube trees, the declarative field descriptions and file IO.
//!
//! A field is piecewise constant on the cells of a uniform grid over the
//! window `[-L, L]ⁿ` and takes a constant exterior value (zero unless set)
//! on the rest of the lattice `hℤⁿ`. Ball masses count every lattice cell
//! whose center lies in the ball, inside the window or not, so ball means of
//! compactly supported fields decay as the radius grows past the window
//! while constants stay constant on every ball.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// The window `[-L, L]ⁿ` split into `N` cells per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub n: u32,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub cells: usize,
}

impl Window {
    pub fn new(n: u32, half_width: f64, cells: usize) -> Result<Self> {
        let w = Window { n, half_width, cells };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n != 1 && self.n != 2 {
            return Err(invalid(format!("dimension must be 1 or 2, got {}", self.n)));
        }
        if self.cells < 8 || !self.cells.is_power_of_two() {
            return Err(invalid(format!("cells per axis must be a power of two ≥ 8, got {}", self.cells)));
        }
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(invalid("window half-width must be positive"));
        }
        Ok(())
    }

    /// Cell width `h = 2L/N`.
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.cells as f64
    }

    /// Number of cells `Nⁿ`.
    pub fn len(&self) -> usize {
        self.cells.pow(self.n)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of rows: `1` in one dimension, `N` in two.
    pub fn rows(&self) -> usize {
        if self.n == 1 {
            1
        } else {
            self.cells
        }
    }

    /// Cell measure `hⁿ`.
    pub fn cell_measure(&self) -> f64 {
        self.h().powi(self.n as i32)
    }

    /// Center coordinate of cell `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.h()
    }

    /// Flat index of the cell in column `ix` of row `iy`.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.cells + ix
    }

    /// `(ix, iy)` of a flat index.
    pub fn split(&self, idx: usize) -> (usize, usize) {
        if self.n == 1 {
            (idx, 0)
        } else {
            (idx % self.cells, idx / self.cells)
        }
    }

    /// Center of a cell as a point of ℝ² (second coordinate 0 when n = 1).
    pub fn center(&self, idx: usize) -> [f64; 2] {
        let (ix, iy) = self.split(idx);
        if self.n == 1 {
            [self.coord(ix), 0.0]
        } else {
            [self.coord(ix), self.coord(iy)]
        }
    }

    pub fn log2_cells(&self) -> u32 {
        self.cells.trailing_zeros()
    }
}

/// A function on the lattice, piecewise constant on cells: sampled values in
/// the window and one exterior value elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    window: Window,
    values: Vec<f64>,
    exterior: f64,
}

impl SampledField {
    pub fn new(window: Window, values: Vec<f64>) -> Result<Self> {
        window.validate()?;
        if values.len() != window.len() {
            return Err(invalid(format!("expected {} values, got {}", window.len(), values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("field values must be finite"));
        }
        Ok(SampledField { window, values, exterior: 0.0 })
    }

    pub fn zeros(window: Window) -> Self {
        SampledField { window, values: vec![0.0; window.len()], exterior: 0.0 }
    }

    pub fn from_fn<F: Fn([f64; 2]) -> f64>(window: Window, f: F) -> Self {
        let values = (0..window.len()).map(|i| f(window.center(i))).collect();
        SampledField { window, values, exterior: 0.0 }
    }

    /// The constant field `c` on the whole lattice.
    pub fn constant(window: Window, c: f64) -> Self {
        SampledField { window, values: vec![c; window.len()], exterior: c }
    }

    pub(crate) fn from_raw(window: Window, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), window.len());
        SampledField { window, values, exterior: 0.0 }
    }

    /// Replace the exterior value.
    pub fn with_exterior(mut self, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(invalid("exterior value must be finite"));
        }
        self.exterior = c;
        Ok(self)
    }

    /// Value taken on every lattice cell outside the window.
    pub fn exterior(&self) -> f64 {
        self.exterior
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> SampledField {
        SampledField { window: self.window, values: self.values.iter().map(|&v| f(v)).collect(), exterior: f(self.exterior) }
    }

    pub fn zip<F: Fn(f64, f64) -> f64>(&self, other: &SampledField, f: F) -> Result<SampledField> {
        if self.window != other.window {
            return Err(invalid("fields live on different windows"));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(SampledField { window: self.window, values, exterior: f(self.exterior, other.exterior) })
    }

    pub fn abs(&self) -> SampledField {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> SampledField {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(self.exterior.abs(), |m, v| m.max(v.abs()))
    }

    /// `∫ f` over the window in the cell measure.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.window.cell_measure()
    }

    /// Sum of values over the lattice cells of a ball.
    pub fn ball_sum(&self, shape: &BallShape) -> f64 {
        let inside: f64 = shape.spans.iter().map(|s| self.values[s.start..=s.end].iter().sum::<f64>()).sum();
        if self.exterior == 0.0 {
            inside
        } else {
            inside + shape.outside() * self.exterior
        }
    }

    /// Iterator over the window values in a ball.
    pub fn ball_values<'a>(&'a self, shape: &'a BallShape) -> impl Iterator<Item = f64> + 'a {
        shape.spans.iter().flat_map(move |s| self.values[s.start..=s.end].iter().copied())
    }

    /// Flat binary form: `n`, `N` as little-endian `u64`, `L` as little-endian
    /// `f64`, then the values as little-endian `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.window.n as u64).to_le_bytes())?;
        w.write_all(&(self.window.cells as u64).to_le_bytes())?;
        w.write_all(&self.window.half_width.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut b = [0u8; 8];
        r.read_exact(&mut b)?;
        let n = u64::from_le_bytes(b) as u32;
        r.read_exact(&mut b)?;
        let cells = u64::from_le_bytes(b) as usize;
        r.read_exact(&mut b)?;
        let half_width = f64::from_le_bytes(b);
        let window = Window::new(n, half_width, cells)?;
        let mut values = Vec::with_capacity(window.len());
        for _ in 0..window.len() {
            r.read_exact(&mut b)?;
            values.push(f64::from_le_bytes(b));
        }
        SampledField::new(window, values)
    }

    /// CSV with a header row: `x,value` in one dimension and `x,y,value` in two.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        self.require_zero_exterior()?;
        let mut wr = csv::Writer::from_writer(w);
        let to_io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        if self.window.n == 1 {
            wr.write_record(["x", "value"]).map_err(to_io)?;
        } else {
            wr.write_record(["x", "y", "value"]).map_err(to_io)?;
        }
        for (i, v) in self.values.iter().enumerate() {
            let c = self.window.center(i);
            let mut rec = vec![format!("{:?}", c[0])];
            if self.window.n == 2 {
                rec.push(format!("{:?}", c[1]));
            }
            rec.push(format!("{v:?}"));
            wr.write_record(&rec).map_err(to_io)?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Read the CSV form; the window is recovered from the coordinates.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let to_io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        let n = match rd.headers().map_err(to_io)?.len() {
            2 => 1usize,
            3 => 2,
            k => return Err(invalid(format!("CSV field needs 2 or 3 columns, got {k}"))),
        };
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(to_io)?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| invalid("short CSV row"))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| invalid(format!("CSV number: {e}")))
            };
            xs.push(parse(0)?);
            values.push(parse(n)?);
        }
        let total = values.len();
        let cells = if n == 1 { total } else { (total as f64).sqrt().round() as usize };
        if cells < 2 {
            return Err(invalid("CSV field too small"));
        }
        let h = xs[1] - xs[0];
        let half_width = -xs[0] + 0.5 * h;
        let window = Window::new(n as u32, half_width, cells)?;
        SampledField::new(window, values)
    }

    /// Error unless the field vanishes outside the window.
    pub fn require_zero_exterior(&self) -> Result<()> {
        if self.exterior != 0.0 {
            return Err(invalid("field has a nonzero exterior value; this operation needs compact support"));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        if path.extension().and_then(|e| e.to_str()) == Some("csv") {
            self.write_csv(f)
        } else {
            self.write_binary(f)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        if path.extension().and_then(|e| e.to_str()) == Some("csv") {
            Self::read_csv(f)
        } else {
            Self::read_binary(f)
        }
    }
}

/// An open ball. The center is stored in half-cell units measured from the
/// lower window corner, so cell centers and cell vertices are both exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center2: [i64; 2],
    pub radius: f64,
}

/// The cells of a ball: window-clipped row spans plus lattice counts.
#[derive(Clone, Debug, PartialEq)]
pub struct BallShape {
    /// Inclusive flat-index ranges, one per window row met by the ball.
    pub spans: Vec<Span>,
    /// Number of window cells in the ball.
    pub inside: usize,
    /// Number of lattice cells in the ball, inside the window or not.
    pub total: f64,
}

impl BallShape {
    /// Number of lattice cells of the ball outside the window.
    pub fn outside(&self) -> f64 {
        self.total - self.inside as f64
    }
}

/// Inclusive range of flat indices within one row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// Lattice counts above this many cells per radius use the area formula in two dimensions.
const EXACT_COUNT_LIMIT: f64 = 4_194_304.0;

impl Ball {
    /// Ball centered at the center of cell `idx`.
    pub fn at_cell(w: &Window, idx: usize, radius: f64) -> Ball {
        let (ix, iy) = w.split(idx);
        let c1 = if w.n == 1 { 0 } else { 2 * iy as i64 + 1 };
        Ball { center2: [2 * ix as i64 + 1, c1], radius }
    }

    /// Ball centered at the origin of ℝⁿ (a cell vertex, since `N` is even).
    pub fn at_origin(w: &Window, radius: f64) -> Ball {
        let c = w.cells as i64;
        Ball { center2: [c, if w.n == 1 { 0 } else { c }], radius }
    }

    pub fn center(&self, w: &Window) -> [f64; 2] {
        let h = w.h();
        let x = -w.half_width + 0.5 * h * self.center2[0] as f64;
        let y = if w.n == 1 { 0.0 } else { -w.half_width + 0.5 * h * self.center2[1] as f64 };
        [x, y]
    }

    /// Cell range `[lo, hi]` (possibly outside the window) of cells `i` with
    /// `|2i + 1 - c2| < lim2`, where `lim2` is twice the allowed distance in cells.
    fn index_range(c2: i64, lim2: f64) -> Option<(i64, i64)> {
        if !(lim2 > 0.0) {
            return None;
        }
        // |d| < lim2 with d = 2i + 1 - c2.
        let mut hi = ((c2 as f64 - 1.0 + lim2) / 2.0).floor() as i64;
        while (2 * hi + 1 - c2) as f64 >= lim2 {
            hi -= 1;
        }
        while ((2 * (hi + 1) + 1 - c2) as f64) < lim2 {
            hi += 1;
        }
        let mut lo = ((c2 as f64 - 1.0 - lim2) / 2.0).ceil() as i64;
        while ((2 * lo + 1 - c2) as f64) <= -lim2 {
            lo += 1;
        }
        while ((2 * (lo - 1) + 1 - c2) as f64) > -lim2 {
            lo -= 1;
        }
        if lo > hi {
            None
        } else {
            Some((lo, hi))
        }
    }

    /// Cells of the ball in the window and the lattice count.
    pub fn shape(&self, w: &Window) -> Result<BallShape> {
        if !(self.radius > 0.0) {
            return Err(Error::EmptyBall(format!("radius {}", self.radius)));
        }
        let r_cells = self.radius / w.h();
        let n_cells = w.cells as i64;
        let mut spans = Vec::new();
        let mut inside = 0usize;
        let mut total = 0.0;
        let clip = |lo: i64, hi: i64| -> Option<(usize, usize)> {
            let (a, b) = (lo.max(0), hi.min(n_cells - 1));
            if a > b {
                None
            } else {
                Some((a as usize, b as usize))
            }
        };
        if w.n == 1 {
            if let Some((lo, hi)) = Ball::index_range(self.center2[0], 2.0 * r_cells) {
                total = (hi - lo + 1) as f64;
                if let Some((a, b)) = clip(lo, hi) {
                    spans.push(Span { start: a, end: b });
                    inside = b - a + 1;
                }
            }
        } else {
            let four_r2 = 4.0 * r_cells * r_cells;
            let (ry_lo, ry_hi) = match Ball::index_range(self.center2[1], 2.0 * r_cells) {
                Some(r) => r,
                None => return Err(Error::EmptyBall("no lattice rows".into())),
            };
            let exact = r_cells <= EXACT_COUNT_LIMIT;
            for j in ry_lo..=ry_hi {
                let in_window = j >= 0 && j < n_cells;
                if !exact && !in_window {
                    continue;
                }
                let dy = (2 * j + 1 - self.center2[1]) as f64;
                let lim2 = (four_r2 - dy * dy).max(0.0).sqrt();
                // Refine lim2 so that dx² < 4R² - dy² is decided exactly.
                let range = Ball::index_range(self.center2[0], lim2).and_then(|(mut lo, mut hi)| {
                    let ok = |i: i64| {
                        let dx = (2 * i + 1 - self.center2[0]) as f64;
                        dx * dx + dy * dy < four_r2
                    };
                    while lo <= hi && !ok(lo) {
                        lo += 1;
                    }
                    while lo <= hi && !ok(hi) {
                        hi -= 1;
                    }
                    while ok(lo - 1) {
                        lo -= 1;
                    }
                    while ok(hi + 1) {
                        hi += 1;
                    }
                    if lo <= hi {
                        Some((lo, hi))
                    } else {
                        None
                    }
                });
                if let Some((lo, hi)) = range {
                    if exact {
                        total += (hi - lo + 1) as f64;
                    }
                    if in_window {
                        if let Some((a, b)) = clip(lo, hi) {
                            let row = j as usize * w.cells;
                            spans.push(Span { start: row + a, end: row + b });
                            inside += b - a + 1;
                        }
                    }
                }
            }
            if !exact {
                total = std::f64::consts::PI * r_cells * r_cells;
            }
        }
        if total == 0.0 {
            return Err(Error::EmptyBall(format!("radius {} holds no cell center", self.radius)));
        }
        Ok(BallShape { spans, inside, total })
    }

    /// Whether the center of flat cell `idx` lies in the ball.
    pub fn contains_cell(&self, w: &Window, idx: usize) -> bool {
        let (ix, iy) = w.split(idx);
        let r2 = 2.0 * self.radius / w.h();
        let dx = (2 * ix as i64 + 1 - self.center2[0]) as f64;
        let dy = if w.n == 1 { 0.0 } else { (2 * iy as i64 + 1 - self.center2[1]) as f64 };
        dx * dx + dy * dy < r2 * r2
    }
}

/// Mean of `f` over the lattice cells of `B`.
pub fn ball_mean(f: &SampledField, b: &Ball) -> Result<f64> {
    let shape = b.shape(f.window())?;
    Ok(f.ball_sum(&shape) / shape.total)
}

/// Enumeration policy of a ball family: centers every `stride` cells along
/// each axis, radii `h·2^j` for `j = min_rung..=max_rung`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallPolicy {
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default)]
    pub min_rung: i32,
    /// `None` selects `log2 N + EXTRA_RUNGS`.
    #[serde(default)]
    pub max_rung: Option<i32>,
}

fn one() -> usize {
    1
}

/// Rungs beyond the window diameter included by default; they let sup-type
/// norms and means see the decay of compactly supported fields.
pub const EXTRA_RUNGS: i32 = 3;

impl Default for BallPolicy {
    fn default() -> Self {
        BallPolicy { stride: 1, min_rung: 0, max_rung: None }
    }
}

impl BallPolicy {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn strided(stride: usize) -> Self {
        BallPolicy { stride, ..Self::default() }
    }

    pub fn max_rung_for(&self, w: &Window) -> i32 {
        self.max_rung.unwrap_or(w.log2_cells() as i32 + EXTRA_RUNGS)
    }
}

/// A finite family of balls with their precomputed shapes.
#[derive(Clone, Debug)]
pub struct BallFamily {
    pub window: Window,
    pub policy: BallPolicy,
    pub balls: Vec<Ball>,
    pub shapes: Vec<BallShape>,
}

impl BallFamily {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn describe(&self) -> String {
        format!(
            "{} balls: centers every {} cell(s), radii h·2^j for j = {}..={}",
            self.balls.len(),
            self.policy.stride,
            self.policy.min_rung,
            self.policy.max_rung_for(&self.window)
        )
    }
}

/// Deterministic enumeration of centers (row-major) times radii (ascending).
pub fn ball_family(w: &Window, policy: BallPolicy) -> Result<BallFamily> {
    w.validate()?;
    if policy.stride == 0 {
        return Err(invalid("stride must be positive"));
    }
    let max_rung = policy.max_rung_for(w);
    if max_rung < policy.min_rung || max_rung < 0 {
        return Err(invalid("radius ladder is empty: the largest radius is below one cell"));
    }
    let h = w.h();
    let radii: Vec<f64> = (policy.min_rung..=max_rung).map(|j| h * (j as f64).exp2()).collect();
    let mut balls = Vec::new();
    let ys: Vec<usize> = if w.n == 1 { vec![0] } else { (0..w.cells).step_by(policy.stride).collect() };
    for &iy in &ys {
        for ix in (0..w.cells).step_by(policy.stride) {
            let idx = w.index(ix, iy);
            for &r in &radii {
                balls.push(Ball::at_cell(w, idx, r));
            }
        }
    }
    let shapes = balls.iter().map(|b| b.shape(w)).collect::<Result<Vec<_>>>()?;
    Ok(BallFamily { window: *w, policy, balls, shapes })
}

/// The tree of dyadic subcubes of a cube `Q` aligned with the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicFamily {
    pub window: Window,
    /// Lower corner cell `(ix, iy)` of `Q`.
    pub origin: [usize; 2],
    /// Side of `Q` in cells (a power of two).
    pub side: usize,
    /// Depth `J`; leaves have side `side / 2^J` cells.
    pub depth: u32,
}

/// Dyadic cube `Q_{j,k}` of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicCube {
    pub level: u32,
    pub k: [usize; 2],
}

impl DyadicFamily {
    /// The whole window as the root cube.
    pub fn whole(w: &Window, depth: u32) -> Result<Self> {
        dyadic_family(w, [0, 0], w.cells, depth)
    }

    /// Number of cubes at all levels.
    pub fn count(&self) -> usize {
        (0..=self.depth).map(|j| 1usize << (self.window.n * j)).sum()
    }

    pub fn cubes(&self) -> Vec<DyadicCube> {
        let mut out = Vec::with_capacity(self.count());
        for level in 0..=self.depth {
            let m = 1usize << level;
            let ys = if self.window.n == 1 { 1 } else { m };
            for ky in 0..ys {
                for kx in 0..m {
                    out.push(DyadicCube { level, k: [kx, ky] });
                }
            }
        }
        out
    }

    /// Side in cells of a cube at `level`.
    pub fn cube_side(&self, level: u32) -> usize {
        self.side >> level
    }

    /// Flat indices of the cells covered by a cube.
    pub fn cells_of(&self, c: &DyadicCube) -> Vec<usize> {
        let s = self.cube_side(c.level);
        let x0 = self.origin[0] + c.k[0] * s;
        if self.window.n == 1 {
            (x0..x0 + s).collect()
        } else {
            let y0 = self.origin[1] + c.k[1] * s;
            let mut out = Vec::with_capacity(s * s);
            for iy in y0..y0 + s {
                for ix in x0..x0 + s {
                    out.push(self.window.index(ix, iy));
                }
            }
            out
        }
    }

    /// All cells of the root cube in row-major order.
    pub fn root_cells(&self) -> Vec<usize> {
        self.cells_of(&DyadicCube { level: 0, k: [0, 0] })
    }

    /// The cube at `level` containing flat cell `idx`, if `idx` lies in `Q`.
    pub fn cube_of(&self, idx: usize, level: u32) -> Option<DyadicCube> {
        let (ix, iy) = self.window.split(idx);
        let (ox, oy) = (self.origin[0], self.origin[1]);
        if ix < ox || ix >= ox + self.side {
            return None;
        }
        if self.window.n == 2 && (iy < oy || iy >= oy + self.side) {
            return None;
        }
        let s = self.cube_side(level);
        let ky = if self.window.n == 1 { 0 } else { (iy - oy) / s };
        Some(DyadicCube { level, k: [(ix - ox) / s, ky] })
    }
}

/// Build the dyadic tree of the cube with lower corner `origin` and `side` cells.
pub fn dyadic_family(w: &Window, origin: [usize; 2], side: usize, depth: u32) -> Result<DyadicFamily> {
    w.validate()?;
    if !side.is_power_of_two() {
        return Err(invalid("dyadic root side must be a power of two"));
    }
    if depth > side.trailing_zeros() {
        return Err(Error::Misaligned { depth, side });
    }
    let oy = if w.n == 1 { 0 } else { origin[1] };
    if origin[0] + side > w.cells || (w.n == 2 && oy + side > w.cells) {
        return Err(invalid("dyadic root cube leaves the window"));
    }
    Ok(DyadicFamily { window: *w, origin: [origin[0], oy], side, depth })
}

/// Geometric shape of an indicator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Region {
    /// Open ball `|x - center| < radius`.
    Ball { center: [f64; 2], radius: f64 },
    /// Open cube `|x - center|_∞ < half_side`.
    Cube { center: [f64; 2], half_side: f64 },
}

/// Declarative description of a field; `sample` turns it into values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FieldSpec {
    /// The constant `c` on the whole lattice, exterior included.
    Constant { c: f64 },
    Indicator { region: Region },
    /// `|x|^{-nβ}`, `0 ≤ β < 1`; the cells touching the origin hold their radial average.
    PowerSingular { beta: f64 },
    /// `sin(2πk x₁/L)` (times `sin(2πk x₂/L)` when n = 2).
    Oscillatory { k: f64 },
    /// Random dyadic step function: `2^depth` pieces per axis with values in `(1/8)ℤ ∩ [-4, 4]`.
    RandomStep { seed: u64, depth: u32 },
    /// `offset + Σ cᵢ fᵢ`; the offset also applies outside the window.
    Affine {
        terms: Vec<(f64, FieldSpec)>,
        #[serde(default)]
        offset: f64,
    },
    /// The coordinate `x_axis`.
    Coordinate { axis: usize },
    /// `clamp(x_axis, -bound, bound)`.
    ClampedCoordinate { axis: usize, bound: f64 },
    /// `log max(|x|, h/2)`.
    LogAbs,
    /// `|x|^β`, `β > 0`.
    AbsPower { beta: f64 },
    /// `inner · τ` with `τ = clamp((L - |x|_∞)/width, 0, 1)`, vanishing at the window edge.
    Tapered { inner: Box<FieldSpec>, width: f64 },
}

impl FieldSpec {
    pub fn label(&self) -> String {
        match self {
            FieldSpec::Constant { c } => format!("constant-{c}"),
            FieldSpec::Indicator { region: Region::Ball { radius, .. } } => format!("indicator-ball-{radius}"),
            FieldSpec::Indicator { region: Region::Cube { half_side, .. } } => format!("indicator-cube-{half_side}"),
            FieldSpec::PowerSingular { beta } => format!("power-singular-{beta}"),
            FieldSpec::Oscillatory { k } => format!("oscillatory-{k}"),
            FieldSpec::RandomStep { seed, depth } => format!("random-step-{seed}-d{depth}"),
            FieldSpec::Affine { terms, .. } => format!("affine-{}", terms.len()),
            FieldSpec::Coordinate { axis } => format!("coordinate-{axis}"),
            FieldSpec::ClampedCoordinate { axis, bound } => format!("clamped-coordinate-{axis}-{bound}"),
            FieldSpec::LogAbs => "log-abs".into(),
            FieldSpec::AbsPower { beta } => format!("abs-power-{beta}"),
            FieldSpec::Tapered { inner, .. } => format!("tapered-{}", inner.label()),
        }
    }

    /// Value of the sampled field outside the window.
    pub fn exterior(&self) -> f64 {
        match self {
            FieldSpec::Constant { c } => *c,
            FieldSpec::Affine { terms, offset } => offset + terms.iter().map(|(c, s)| c * s.exterior()).sum::<f64>(),
            _ => 0.0,
        }
    }

    /// Whether the field vanishes near the boundary of the window and outside it.
    pub fn compact_in_window(&self, w: &Window) -> bool {
        match self {
            FieldSpec::Indicator { region: Region::Ball { center, radius } } => {
                center[0].abs() + radius < w.half_width && center[1].abs() + radius < w.half_width
            }
            FieldSpec::Indicator { region: Region::Cube { center, half_side } } => {
                center[0].abs() + half_side < w.half_width && center[1].abs() + half_side < w.half_width
            }
            FieldSpec::Affine { terms, offset } => *offset == 0.0 && terms.iter().all(|(_, s)| s.compact_in_window(w)),
            FieldSpec::Tapered { .. } => true,
            _ => false,
        }
    }
}

fn norm2(x: [f64; 2]) -> f64 {
    (x[0] * x[0] + x[1] * x[1]).sqrt()
}

/// Evaluate a field description at the cell centers of `w`.
pub fn sample(spec: &FieldSpec, w: &Window) -> Result<SampledField> {
    w.validate()?;
    let n = w.n as usize;
    let h = w.h();
    let values: Vec<f64> = match spec {
        FieldSpec::Constant { c } => vec![*c; w.len()],
        FieldSpec::Indicator { region } => {
            let inside = |x: [f64; 2]| match region {
                Region::Ball { center, radius } => {
                    let d = [x[0] - center[0], if n == 1 { 0.0 } else { x[1] - center[1] }];
                    norm2(d) < *radius
                }
                Region::Cube { center, half_side } => {
                    (x[0] - center[0]).abs() < *half_side && (n == 1 || (x[1] - center[1]).abs() < *half_side)
                }
            };
            (0..w.len()).map(|i| if inside(w.center(i)) { 1.0 } else { 0.0 }).collect()
        }
        FieldSpec::PowerSingular { beta } => {
            if !(*beta >= 0.0 && *beta < 1.0) {
                return Err(invalid(format!("PowerSingular needs 0 ≤ β < 1 for integrability, got {beta}")));
            }
            let e = n as f64 * beta;
            // Radius of the ball with the measure of one cell.
            let r_eq = if n == 1 { h } else { h / std::f64::consts::PI.sqrt() };
            let near = r_eq.powf(-e) / (1.0 - beta);
            (0..w.len())
                .map(|i| {
                    let x = w.center(i);
                    let touches = x[0].abs() < h && (n == 1 || x[1].abs() < h);
                    if touches {
                        near
                    } else {
                        norm2(x).powf(-e)
                    }
                })
                .collect()
        }
        FieldSpec::Oscillatory { k } => {
            let om = 2.0 * std::f64::consts::PI * k / w.half_width;
            (0..w.len())
                .map(|i| {
                    let x = w.center(i);
                    let s = (om * x[0]).sin();
                    if n == 1 {
                        s
                    } else {
                        s * (om * x[1]).sin()
                    }
                })
                .collect()
        }
        FieldSpec::RandomStep { seed, depth } => {
            if *depth > w.log2_cells() {
                return Err(invalid("RandomStep depth exceeds the grid resolution"));
            }
            let pieces = 1usize << depth;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let table: Vec<f64> = (0..pieces.pow(w.n))
                .map(|_| rng.gen_range(-32i32..=32) as f64 / 8.0)
                .collect();
            let per = w.cells / pieces;
            (0..w.len())
                .map(|i| {
                    let (ix, iy) = w.split(i);
                    table[(iy / per) * pieces + ix / per]
                })
                .collect()
        }
        FieldSpec::Affine { terms, offset } => {
            let mut acc = vec![*offset; w.len()];
            for (c, s) in terms {
                let f = sample(s, w)?;
                for (a, v) in acc.iter_mut().zip(f.values()) {
                    *a += c * v;
                }
            }
            acc
        }
        FieldSpec::Coordinate { axis } | FieldSpec::ClampedCoordinate { axis, .. } => {
            if *axis >= n {
                return Err(invalid(format!("axis {axis} out of range for n = {n}")));
            }
            let bound = match spec {
                FieldSpec::ClampedCoordinate { bound, .. } => *bound,
                _ => f64::INFINITY,
            };
            (0..w.len()).map(|i| w.center(i)[*axis].clamp(-bound, bound)).collect()
        }
        FieldSpec::LogAbs => (0..w.len()).map(|i| norm2(w.center(i)).max(0.5 * h).ln()).collect(),
        FieldSpec::AbsPower { beta } => {
            if !(*beta > 0.0) {
                return Err(invalid("AbsPower needs β > 0"));
            }
            (0..w.len()).map(|i| norm2(w.center(i)).powf(*beta)).collect()
        }
        FieldSpec::Tapered { inner, width } => {
            if !(*width > 0.0) {
                return Err(invalid("taper width must be positive"));
            }
            let f = sample(inner, w)?;
            f.values()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let x = w.center(i);
                    let d = if n == 1 { x[0].abs() } else { x[0].abs().max(x[1].abs()) };
                    v * ((w.half_width - d) / width).clamp(0.0, 1.0)
                })
                .collect()
        }
    };
    SampledField::new(*w, values)?.with_exterior(spec.exterior())
}
