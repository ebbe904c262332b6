//! Occupancy raster for a point robot.
//!
//! Cell `(i, j)` covers `[ox + i·s, ox + (i+1)·s) × [oy + j·s, oy + (j+1)·s)`.
//! Text and PGM rasters list the top row (largest `y`) first.

use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::geom::Vec2;

#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    cell_size: f64,
    origin: Vec2,
    width: usize,
    height: usize,
    occupied: Vec<bool>,
    /// Euclidean distance, in cells, from each cell center to the nearest
    /// occupied cell center.
    edt: Vec<f64>,
}

impl OccupancyGrid {
    /// `occupied` is row-major with row 0 at the bottom (smallest `y`).
    pub fn new(cell_size: f64, origin: Vec2, width: usize, height: usize, occupied: Vec<bool>) -> Result<Self> {
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(invalid("cell size must be positive"));
        }
        if width == 0 || height == 0 {
            return Err(invalid("raster dimensions must be positive"));
        }
        if occupied.len() != width * height {
            return Err(invalid(format!(
                "raster has {} cells, expected {width}x{height}",
                occupied.len()
            )));
        }
        let edt = distance_transform(width, height, &occupied);
        Ok(Self {
            cell_size,
            origin,
            width,
            height,
            occupied,
            edt,
        })
    }

    /// Parses rows of `#` (occupied) and `.` (free), top row first.
    pub fn from_rows<S: AsRef<str>>(rows: &[S], cell_size: f64, origin: Vec2) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().chars().count());
        let mut occupied = vec![false; width * height];
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.chars().count() != width {
                return Err(invalid(format!("raster row {r} has inconsistent width")));
            }
            let j = height - 1 - r;
            for (i, ch) in row.chars().enumerate() {
                occupied[j * width + i] = match ch {
                    '#' => true,
                    '.' => false,
                    other => return Err(invalid(format!("raster row {r}: unexpected character {other:?}"))),
                };
            }
        }
        Self::new(cell_size, origin, width, height, occupied)
    }

    /// Reads a binary (P5) or plain (P2) graymap. Pixels darker than half of
    /// the maximum gray value are occupied.
    pub fn from_pgm(bytes: &[u8], cell_size: f64, origin: Vec2) -> Result<Self> {
        let (width, height, maxval, gray) = parse_pgm(bytes)?;
        let mut occupied = vec![false; width * height];
        for r in 0..height {
            let j = height - 1 - r;
            for i in 0..width {
                occupied[j * width + i] = 2 * u32::from(gray[r * width + i]) < maxval;
            }
        }
        Self::new(cell_size, origin, width, height, occupied)
    }

    pub fn load_pgm(path: &Path, cell_size: f64, origin: Vec2) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::from_pgm(&bytes, cell_size, origin)
    }

    /// Rows in the text format accepted by [`OccupancyGrid::from_rows`].
    pub fn to_rows(&self) -> Vec<String> {
        (0..self.height)
            .rev()
            .map(|j| {
                (0..self.width)
                    .map(|i| if self.occupied[j * self.width + i] { '#' } else { '.' })
                    .collect()
            })
            .collect()
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_occupied(&self, i: usize, j: usize) -> bool {
        self.occupied[j * self.width + i]
    }

    /// Upper corner of the raster extent.
    pub fn extent_max(&self) -> Vec2 {
        self.origin + Vec2::new(self.width as f64, self.height as f64) * self.cell_size
    }

    fn cell_of(&self, p: Vec2) -> Option<(usize, usize)> {
        let fx = (p.x - self.origin.x) / self.cell_size;
        let fy = (p.y - self.origin.y) / self.cell_size;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (i, j) = (fx as usize, fy as usize);
        (i < self.width && j < self.height).then_some((i, j))
    }

    pub(crate) fn collides(&self, q: &[f64]) -> bool {
        match self.cell_of(Vec2::new(q[0], q[1])) {
            Some((i, j)) => self.is_occupied(i, j),
            None => true,
        }
    }

    /// Exact distance from a free point to the nearest occupied cell square or
    /// to the raster border. The transform limits the search window.
    pub(crate) fn clearance(&self, q: &[f64]) -> f64 {
        let p = Vec2::new(q[0], q[1]);
        let Some((ci, cj)) = self.cell_of(p) else {
            return 0.0;
        };
        let max = self.extent_max();
        let border = (p.x - self.origin.x)
            .min(max.x - p.x)
            .min(p.y - self.origin.y)
            .min(max.y - p.y);
        let s = self.cell_size;
        let half_diag = s * std::f64::consts::FRAC_1_SQRT_2;
        let nearest = self.edt[cj * self.width + ci];
        if !nearest.is_finite() {
            return border;
        }
        // The occupied cell whose center realizes the transform is within
        // this distance of p, so the minimum lies inside the window.
        let upper = (nearest * s + half_diag).min(border);
        let window = upper + half_diag;
        let lo_i = ((p.x - window - self.origin.x) / s).floor().max(0.0) as usize;
        let lo_j = ((p.y - window - self.origin.y) / s).floor().max(0.0) as usize;
        let hi_i = (((p.x + window - self.origin.x) / s).floor() as usize).min(self.width - 1);
        let hi_j = (((p.y + window - self.origin.y) / s).floor() as usize).min(self.height - 1);
        let mut best = upper;
        for j in lo_j..=hi_j {
            let y0 = self.origin.y + j as f64 * s;
            let dy = (y0 - p.y).max(p.y - (y0 + s)).max(0.0);
            if dy >= best {
                continue;
            }
            for i in lo_i..=hi_i {
                if !self.is_occupied(i, j) {
                    continue;
                }
                let x0 = self.origin.x + i as f64 * s;
                let dx = (x0 - p.x).max(p.x - (x0 + s)).max(0.0);
                best = best.min(dx.hypot(dy));
            }
        }
        best
    }

    /// Center-to-center distance transform value (in cells) at a cell.
    pub fn transform_at(&self, i: usize, j: usize) -> f64 {
        self.edt[j * self.width + i]
    }
}

/// Exact squared-distance transform along one line (lower envelope of parabolas).
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    let mut first = None;
    for (q, fq) in f.iter().enumerate() {
        if fq.is_finite() {
            first = Some(q);
            break;
        }
    }
    let Some(start) = first else {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    };
    v[0] = start;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in start + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0: the new parabola dominates everywhere
                v[0] = q;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

fn distance_transform(width: usize, height: usize, occupied: &[bool]) -> Vec<f64> {
    let mut grid: Vec<f64> = occupied
        .iter()
        .map(|&o| if o { 0.0 } else { f64::INFINITY })
        .collect();
    let n = width.max(height);
    let (mut f, mut out) = (vec![0.0; n], vec![0.0; n]);
    let (mut v, mut z) = (vec![0usize; n], vec![0.0; n + 1]);
    for i in 0..width {
        for j in 0..height {
            f[j] = grid[j * width + i];
        }
        edt_1d(&f[..height], &mut out[..height], &mut v, &mut z);
        for j in 0..height {
            grid[j * width + i] = out[j];
        }
    }
    for j in 0..height {
        f[..width].copy_from_slice(&grid[j * width..(j + 1) * width]);
        edt_1d(&f[..width], &mut out[..width], &mut v, &mut z);
        grid[j * width..(j + 1) * width].copy_from_slice(&out[..width]);
    }
    grid.into_iter().map(f64::sqrt).collect()
}

/// Returns `(width, height, maxval, samples)` with samples in file order.
fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, u32, Vec<u16>)> {
    let mut pos = 0usize;
    let next_token = |pos: &mut usize| -> Result<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err(Error::Parse("unexpected end of PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = next_token(&mut pos)?;
    let binary = match magic.as_str() {
        "P5" => true,
        "P2" => false,
        other => return Err(Error::Parse(format!("not a graymap: magic {other:?}"))),
    };
    let number = |pos: &mut usize, what: &str| -> Result<usize> {
        next_token(pos)?
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad PGM {what}")))
    };
    let width = number(&mut pos, "width")?;
    let height = number(&mut pos, "height")?;
    let maxval = number(&mut pos, "maxval")?;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(Error::Parse("PGM header out of range".into()));
    }
    let count = width * height;
    let mut samples = Vec::with_capacity(count);
    if binary {
        pos += 1;
        let wide = maxval > 255;
        let needed = count * if wide { 2 } else { 1 };
        if bytes.len() < pos + needed {
            return Err(Error::Parse("PGM raster truncated".into()));
        }
        let raster = &bytes[pos..pos + needed];
        if wide {
            samples.extend(raster.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])));
        } else {
            samples.extend(raster.iter().map(|&b| u16::from(b)));
        }
    } else {
        for _ in 0..count {
            let v = number(&mut pos, "sample")?;
            if v > maxval {
                return Err(Error::Parse("PGM sample exceeds maxval".into()));
            }
            samples.push(v as u16);
        }
    }
    Ok((width, height, maxval as u32, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: &[&str]) -> OccupancyGrid {
        OccupancyGrid::from_rows(rows, 1.0, Vec2::new(0.0, 0.0)).unwrap()
    }

    /// Brute-force transform over all occupied cells.
    fn brute_edt(g: &OccupancyGrid, i: usize, j: usize) -> f64 {
        let mut best = f64::INFINITY;
        for jj in 0..g.height() {
            for ii in 0..g.width() {
                if g.is_occupied(ii, jj) {
                    let d = ((ii as f64 - i as f64).powi(2) + (jj as f64 - j as f64).powi(2)).sqrt();
                    best = best.min(d);
                }
            }
        }
        best
    }

    /// Brute-force point clearance against every occupied square and the border.
    fn brute_clearance(g: &OccupancyGrid, p: Vec2) -> f64 {
        let max = g.extent_max();
        let mut best = (p.x - g.origin().x)
            .min(max.x - p.x)
            .min(p.y - g.origin().y)
            .min(max.y - p.y);
        let s = g.cell_size();
        for j in 0..g.height() {
            for i in 0..g.width() {
                if g.is_occupied(i, j) {
                    let x0 = g.origin().x + i as f64 * s;
                    let y0 = g.origin().y + j as f64 * s;
                    let dx = (x0 - p.x).max(p.x - (x0 + s)).max(0.0);
                    let dy = (y0 - p.y).max(p.y - (y0 + s)).max(0.0);
                    best = best.min(dx.hypot(dy));
                }
            }
        }
        best
    }

    fn speckled(w: usize, h: usize, seed: u64) -> OccupancyGrid {
        let mut rng = crate::cspace::SampleRng::new(seed);
        let occ: Vec<bool> = (0..w * h).map(|_| rng.unit() < 0.04).collect();
        OccupancyGrid::new(0.5, Vec2::new(-3.0, 2.0), w, h, occ).unwrap()
    }

    #[test]
    fn empty_raster_is_free() {
        let g = grid(&["....", "...."]);
        assert!(!g.collides(&[0.5, 0.5]));
        assert!(!g.collides(&[3.9, 1.9]));
        assert!(g.collides(&[4.0, 1.0]));
        assert!(g.collides(&[-0.1, 1.0]));
    }

    #[test]
    fn rows_are_top_first() {
        let g = grid(&["#..", "..."]);
        assert!(g.is_occupied(0, 1));
        assert!(!g.is_occupied(0, 0));
        assert_eq!(g.to_rows(), vec!["#..".to_string(), "...".to_string()]);
        assert!(OccupancyGrid::from_rows(&["#.", "."], 1.0, Vec2::default()).is_err());
        assert!(OccupancyGrid::from_rows(&["#x"], 1.0, Vec2::default()).is_err());
    }

    #[test]
    fn transform_matches_brute_force() {
        let g = speckled(37, 23, 9);
        for j in 0..g.height() {
            for i in 0..g.width() {
                let fast = g.transform_at(i, j);
                let slow = brute_edt(&g, i, j);
                assert!((fast - slow).abs() < 1e-9, "({i},{j}) {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn clearance_matches_brute_force() {
        let g = speckled(40, 30, 4);
        let mut rng = crate::cspace::SampleRng::new(99);
        let max = g.extent_max();
        let mut checked = 0;
        while checked < 300 {
            let p = Vec2::new(
                g.origin().x + rng.unit() * (max.x - g.origin().x),
                g.origin().y + rng.unit() * (max.y - g.origin().y),
            );
            if g.collides(&[p.x, p.y]) {
                continue;
            }
            checked += 1;
            let fast = g.clearance(&[p.x, p.y]);
            let slow = brute_clearance(&g, p);
            assert!((fast - slow).abs() < 1e-9, "{p:?}: {fast} vs {slow}");
        }
    }

    #[test]
    fn pgm_plain_and_binary_agree() {
        let plain = b"P2\n# comment\n3 2\n255\n0 255 200\n255 100 255\n";
        let mut binary = b"P5\n3 2\n255\n".to_vec();
        binary.extend_from_slice(&[0, 255, 200, 255, 100, 255]);
        let a = OccupancyGrid::from_pgm(plain, 1.0, Vec2::default()).unwrap();
        let b = OccupancyGrid::from_pgm(&binary, 1.0, Vec2::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_rows(), vec!["#..".to_string(), ".#.".to_string()]);
        assert!(OccupancyGrid::from_pgm(b"P6\n1 1\n255\n\0", 1.0, Vec2::default()).is_err());
        assert!(OccupancyGrid::from_pgm(b"P5\n4 4\n255\n\0\0", 1.0, Vec2::default()).is_err());
    }
}
