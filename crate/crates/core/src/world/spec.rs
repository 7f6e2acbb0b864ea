//! Grid world geometry and its text file format.
//!
//! ```text
//! vibronav-world 1
//! cell_size 2.0
//! contact_radius 0.6
//! avatar_radius 0.25
//! start 9 9
//! spawn 1 1
//! grid
//! .#.
//! ...
//! ```
//!
//! Positions are world meters. Grid rows are listed top (north) first; `#`
//! marks an obstacle cell, `.` free space.

use super::WorldError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

/// Grid cell, column `i` from the west edge and row `j` from the south edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
}

impl Cell {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

/// Compass direction of a corridor leaving a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    East,
    North,
    West,
    South,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::East, Dir::North, Dir::West, Dir::South];

    /// World heading in degrees.
    pub fn heading(&self) -> f64 {
        match self {
            Dir::East => 0.0,
            Dir::North => 90.0,
            Dir::West => 180.0,
            Dir::South => -90.0,
        }
    }

    pub fn delta(&self) -> (isize, isize) {
        match self {
            Dir::East => (1, 0),
            Dir::North => (0, 1),
            Dir::West => (-1, 0),
            Dir::South => (0, -1),
        }
    }

    pub fn opposite(&self) -> Dir {
        match self {
            Dir::East => Dir::West,
            Dir::North => Dir::South,
            Dir::West => Dir::East,
            Dir::South => Dir::North,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldSpec {
    cell_size: f64,
    width: usize,
    height: usize,
    /// Row-major from the south row.
    blocked: Vec<bool>,
    start: Point,
    spawn_points: Vec<Point>,
    contact_radius: f64,
    avatar_radius: f64,
}

const HEADER: &str = "vibronav-world 1";

impl WorldSpec {
    /// `rows` are listed north first, `true` = obstacle.
    pub fn new(
        cell_size: f64,
        rows: &[Vec<bool>],
        start: Point,
        spawn_points: Vec<Point>,
        contact_radius: f64,
        avatar_radius: f64,
    ) -> Result<Self, WorldError> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if width == 0 || height == 0 {
            return Err(WorldError::Invalid("empty grid".into()));
        }
        if rows.iter().any(|r| r.len() != width) {
            return Err(WorldError::Invalid("grid rows differ in length".into()));
        }
        let blocked = rows.iter().rev().flatten().copied().collect();
        let w = Self {
            cell_size,
            width,
            height,
            blocked,
            start,
            spawn_points,
            contact_radius,
            avatar_radius,
        };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<(), WorldError> {
        if !(self.cell_size.is_finite() && self.cell_size > 0.0) {
            return Err(WorldError::Invalid(format!("cell_size {}", self.cell_size)));
        }
        if !(self.contact_radius.is_finite() && self.contact_radius > 0.0) {
            return Err(WorldError::Invalid(format!(
                "contact_radius {}",
                self.contact_radius
            )));
        }
        if !(self.avatar_radius.is_finite()
            && self.avatar_radius >= 0.0
            && self.avatar_radius < self.cell_size / 2.0)
        {
            return Err(WorldError::Invalid(format!(
                "avatar_radius {} must be in [0, cell_size/2)",
                self.avatar_radius
            )));
        }
        if self.spawn_points.len() < 2 {
            return Err(WorldError::Invalid(format!(
                "need at least 2 spawn points, got {}",
                self.spawn_points.len()
            )));
        }
        if !self.is_clear(self.start) {
            return Err(WorldError::Invalid(format!(
                "start ({}, {}) is not in free space",
                self.start.x, self.start.y
            )));
        }
        for (k, p) in self.spawn_points.iter().enumerate() {
            if !self.is_clear(*p) {
                return Err(WorldError::Invalid(format!(
                    "spawn {k} ({}, {}) is not in free space",
                    p.x, p.y
                )));
            }
        }
        Ok(())
    }

    /// 4x4 obstacle blocks of one cell each, separated by one-cell corridors
    /// and ringed by a corridor: 9x9 cells of 2 m. Start at the center,
    /// spawns at the ring's corners and side midpoints.
    pub fn default_world() -> Self {
        let rows: Vec<Vec<bool>> = (0..9)
            .map(|j| (0..9).map(|i| i % 2 == 1 && j % 2 == 1).collect())
            .collect();
        let c = |i: usize, j: usize| Point::new(2.0 * i as f64 + 1.0, 2.0 * j as f64 + 1.0);
        let spawns = vec![
            c(0, 0),
            c(4, 0),
            c(8, 0),
            c(8, 4),
            c(8, 8),
            c(4, 8),
            c(0, 8),
            c(0, 4),
        ];
        Self::new(2.0, &rows, c(4, 4), spawns, 0.6, 0.25).expect("default world is valid")
    }

    pub fn parse(text: &str) -> Result<Self, WorldError> {
        let err = |line: usize, msg: String| WorldError::Parse { line, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with("//") && !l.starts_with(';'));
        match lines.next() {
            Some((_, l)) if l == HEADER => {}
            Some((n, l)) => return Err(err(n, format!("expected `{HEADER}`, found `{l}`"))),
            None => return Err(err(1, "empty world file".into())),
        }
        let mut cell_size = None;
        let mut contact_radius = 0.6;
        let mut avatar_radius = 0.25;
        let mut start = None;
        let mut spawns = Vec::new();
        let mut rows: Vec<Vec<bool>> = Vec::new();
        let mut in_grid = false;
        for (n, line) in lines {
            if in_grid {
                let row = line
                    .chars()
                    .map(|ch| match ch {
                        '#' => Ok(true),
                        '.' => Ok(false),
                        other => Err(err(n, format!("unexpected grid character `{other}`"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(row);
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let nums = parts
                .map(|p| {
                    p.parse::<f64>()
                        .map_err(|_| err(n, format!("`{p}` is not a number")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let want = |k: usize| -> Result<(), WorldError> {
                if nums.len() == k {
                    Ok(())
                } else {
                    Err(err(
                        n,
                        format!("`{key}` takes {k} value(s), got {}", nums.len()),
                    ))
                }
            };
            match key {
                "cell_size" => {
                    want(1)?;
                    cell_size = Some(nums[0]);
                }
                "contact_radius" => {
                    want(1)?;
                    contact_radius = nums[0];
                }
                "avatar_radius" => {
                    want(1)?;
                    avatar_radius = nums[0];
                }
                "start" => {
                    want(2)?;
                    start = Some(Point::new(nums[0], nums[1]));
                }
                "spawn" => {
                    want(2)?;
                    spawns.push(Point::new(nums[0], nums[1]));
                }
                "grid" => {
                    want(0)?;
                    in_grid = true;
                }
                other => return Err(err(n, format!("unknown key `{other}`"))),
            }
        }
        let cell_size = cell_size.ok_or_else(|| err(0, "missing `cell_size`".into()))?;
        let start = start.ok_or_else(|| err(0, "missing `start`".into()))?;
        if !in_grid {
            return Err(err(0, "missing `grid` section".into()));
        }
        Self::new(
            cell_size,
            &rows,
            start,
            spawns,
            contact_radius,
            avatar_radius,
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{HEADER}");
        let _ = writeln!(s, "cell_size {}", self.cell_size);
        let _ = writeln!(s, "contact_radius {}", self.contact_radius);
        let _ = writeln!(s, "avatar_radius {}", self.avatar_radius);
        let _ = writeln!(s, "start {} {}", self.start.x, self.start.y);
        for p in &self.spawn_points {
            let _ = writeln!(s, "spawn {} {}", p.x, p.y);
        }
        let _ = writeln!(s, "grid");
        for j in (0..self.height).rev() {
            for i in 0..self.width {
                s.push(if self.blocked[j * self.width + i] {
                    '#'
                } else {
                    '.'
                });
            }
            s.push('\n');
        }
        s
    }

    /// SHA-256 of the canonical text form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> Point {
        self.start
    }

    pub fn spawn_points(&self) -> &[Point] {
        &self.spawn_points
    }

    pub fn contact_radius(&self) -> f64 {
        self.contact_radius
    }

    pub fn avatar_radius(&self) -> f64 {
        self.avatar_radius
    }

    pub fn extent(&self) -> (f64, f64) {
        (
            self.width as f64 * self.cell_size,
            self.height as f64 * self.cell_size,
        )
    }

    pub fn is_blocked(&self, c: Cell) -> bool {
        c.i >= self.width || c.j >= self.height || self.blocked[c.j * self.width + c.i]
    }

    pub fn is_free(&self, c: Cell) -> bool {
        !self.is_blocked(c)
    }

    pub fn cell_of(&self, p: Point) -> Option<Cell> {
        if !(p.x.is_finite() && p.y.is_finite()) || p.x < 0.0 || p.y < 0.0 {
            return None;
        }
        let i = (p.x / self.cell_size) as usize;
        let j = (p.y / self.cell_size) as usize;
        (i < self.width && j < self.height).then_some(Cell::new(i, j))
    }

    pub fn center(&self, c: Cell) -> Point {
        Point::new(
            (c.i as f64 + 0.5) * self.cell_size,
            (c.j as f64 + 0.5) * self.cell_size,
        )
    }

    /// Whether the point lies inside a free cell.
    pub fn is_free_point(&self, p: Point) -> bool {
        self.cell_of(p).is_some_and(|c| self.is_free(c))
    }

    pub fn neighbor(&self, c: Cell, d: Dir) -> Option<Cell> {
        let (di, dj) = d.delta();
        let i = c.i.checked_add_signed(di)?;
        let j = c.j.checked_add_signed(dj)?;
        (i < self.width && j < self.height).then_some(Cell::new(i, j))
    }

    /// Corridor directions leaving `c` into free cells.
    pub fn exits(&self, c: Cell) -> Vec<Dir> {
        Dir::ALL
            .into_iter()
            .filter(|&d| self.neighbor(c, d).is_some_and(|n| self.is_free(n)))
            .collect()
    }

    /// A free cell with three or more exits.
    pub fn is_junction(&self, c: Cell) -> bool {
        self.is_free(c) && self.exits(c).len() >= 3
    }

    /// A free cell where a walker has to make or change a decision:
    /// junctions, bends and dead ends.
    pub fn is_node(&self, c: Cell) -> bool {
        if !self.is_free(c) {
            return false;
        }
        let ex = self.exits(c);
        !(ex.len() == 2 && ex[0].opposite() == ex[1])
    }

    /// Blocked cells (plus the outside of the map) inflated by the avatar
    /// radius, as (xmin, ymin, xmax, ymax) rectangles near `p`.
    fn inflated_obstacles_near(&self, lo: Point, hi: Point) -> Vec<[f64; 4]> {
        let cs = self.cell_size;
        let r = self.avatar_radius;
        let i0 = ((lo.x - r) / cs).floor().max(0.0) as usize;
        let j0 = ((lo.y - r) / cs).floor().max(0.0) as usize;
        let i1 = (((hi.x + r) / cs).floor().max(0.0) as usize).min(self.width - 1);
        let j1 = (((hi.y + r) / cs).floor().max(0.0) as usize).min(self.height - 1);
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                if self.blocked[j * self.width + i] {
                    let x = i as f64 * cs;
                    let y = j as f64 * cs;
                    out.push([x - r, y - r, x + cs + r, y + cs + r]);
                }
            }
        }
        out
    }

    /// The avatar disc (square-inflated) fits at `p`.
    pub fn is_clear(&self, p: Point) -> bool {
        let r = self.avatar_radius;
        let (w, h) = self.extent();
        if !(p.x >= r && p.y >= r && p.x <= w - r && p.y <= h - r) {
            return false;
        }
        self.inflated_obstacles_near(p, p)
            .iter()
            .all(|b| !(p.x > b[0] && p.x < b[2] && p.y > b[1] && p.y < b[3]))
    }

    /// Distance the avatar can travel from `p` along unit vector `u`, up to
    /// `dist`, before touching an obstacle or the map edge.
    pub fn clamp_motion(&self, p: Point, u: (f64, f64), dist: f64) -> f64 {
        if dist <= 0.0 {
            return 0.0;
        }
        let r = self.avatar_radius;
        let (w, h) = self.extent();
        let mut t_max = dist;
        // map edge, shrunk by the radius
        for (pos, dir, lo, hi) in [(p.x, u.0, r, w - r), (p.y, u.1, r, h - r)] {
            if dir > 0.0 {
                t_max = t_max.min(((hi - pos) / dir).max(0.0));
            } else if dir < 0.0 {
                t_max = t_max.min(((lo - pos) / dir).max(0.0));
            }
        }
        let end = Point::new(p.x + u.0 * dist, p.y + u.1 * dist);
        let lo = Point::new(p.x.min(end.x), p.y.min(end.y));
        let hi = Point::new(p.x.max(end.x), p.y.max(end.y));
        for b in self.inflated_obstacles_near(lo, hi) {
            if let Some(t) = ray_box_entry(p, u, &b) {
                t_max = t_max.min(t);
            }
        }
        t_max.max(0.0)
    }
}

/// Parameter at which a ray starting outside the open box first enters it.
fn ray_box_entry(p: Point, u: (f64, f64), b: &[f64; 4]) -> Option<f64> {
    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    for (pos, dir, lo, hi) in [(p.x, u.0, b[0], b[2]), (p.y, u.1, b[1], b[3])] {
        if dir == 0.0 {
            if pos <= lo || pos >= hi {
                return None;
            }
        } else {
            let (a, c) = ((lo - pos) / dir, (hi - pos) / dir);
            t_enter = t_enter.max(a.min(c));
            t_exit = t_exit.min(a.max(c));
        }
    }
    if t_enter < t_exit && t_exit > 0.0 {
        Some(t_enter.max(0.0))
    } else {
        None
    }
}
