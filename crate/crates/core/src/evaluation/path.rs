use super::EvalError;
use crate::world::{Cell, Point, WorldSpec};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Grid moves: four straight, four diagonal. A diagonal needs both cells it
/// passes between to be free.
const MOVES: [(isize, isize); 8] = [
    (1, 0),
    (0, 1),
    (-1, 0),
    (0, -1),
    (1, 1),
    (-1, 1),
    (-1, -1),
    (1, -1),
];

/// Shortest-path distances from every free cell to one goal cell over the
/// 8-connected corridor graph.
#[derive(Debug, Clone)]
pub struct DistanceField {
    goal: Cell,
    width: usize,
    dist: Vec<f64>,
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Cells reachable in one move from `c`, with the move length.
pub(crate) fn moves(world: &WorldSpec, c: Cell) -> impl Iterator<Item = (Cell, f64)> + '_ {
    let cs = world.cell_size();
    MOVES.iter().filter_map(move |&(di, dj)| {
        let step = |c: Cell, di: isize, dj: isize| {
            let i = c.i.checked_add_signed(di)?;
            let j = c.j.checked_add_signed(dj)?;
            let n = Cell::new(i, j);
            world.is_free(n).then_some(n)
        };
        let n = step(c, di, dj)?;
        if di != 0 && dj != 0 {
            step(c, di, 0)?;
            step(c, 0, dj)?;
            Some((n, cs * std::f64::consts::SQRT_2))
        } else {
            Some((n, cs))
        }
    })
}

impl DistanceField {
    pub fn new(world: &WorldSpec, goal: Cell) -> Result<Self, EvalError> {
        if !world.is_free(goal) {
            return Err(EvalError::Domain(format!("goal cell {goal:?} is not free")));
        }
        let width = world.width();
        let mut dist = vec![f64::INFINITY; width * world.height()];
        let idx = |c: Cell| c.j * width + c.i;
        let mut heap = BinaryHeap::new();
        dist[idx(goal)] = 0.0;
        heap.push(Entry(0.0, idx(goal)));
        while let Some(Entry(d, k)) = heap.pop() {
            if d > dist[k] {
                continue;
            }
            let c = Cell::new(k % width, k / width);
            for (n, w) in moves(world, c) {
                let nd = d + w;
                if nd < dist[idx(n)] {
                    dist[idx(n)] = nd;
                    heap.push(Entry(nd, idx(n)));
                }
            }
        }
        Ok(Self { goal, width, dist })
    }

    pub fn goal(&self) -> Cell {
        self.goal
    }

    /// Distance from `c` to the goal, `None` when unreachable or off the map.
    pub fn get(&self, c: Cell) -> Option<f64> {
        if c.i >= self.width {
            return None;
        }
        self.dist
            .get(c.j * self.width + c.i)
            .copied()
            .filter(|d| d.is_finite())
    }

    /// Distance from an arbitrary free point: straight to the center of its
    /// own cell or of a neighbor reachable in one move, then along the grid.
    pub fn from_point(&self, world: &WorldSpec, p: Point) -> Option<f64> {
        let c = world.cell_of(p).filter(|&c| world.is_free(c))?;
        std::iter::once(c)
            .chain(moves(world, c).map(|(n, _)| n))
            .filter_map(|n| Some(p.dist(world.center(n)) + self.get(n)?))
            .min_by(f64::total_cmp)
    }
}

/// Length of the shortest obstacle-avoiding route between the centers of the
/// cells containing `from` and `to`.
pub fn shortest_path_distance(world: &WorldSpec, from: Point, to: Point) -> Result<f64, EvalError> {
    let cell = |p: Point| {
        world
            .cell_of(p)
            .filter(|&c| world.is_free(c))
            .ok_or_else(|| EvalError::Domain(format!("({}, {}) is not in free space", p.x, p.y)))
    };
    let (a, b) = (cell(from)?, cell(to)?);
    DistanceField::new(world, b)?
        .get(a)
        .ok_or(EvalError::NoPath((from.x, from.y), (to.x, to.y)))
}
