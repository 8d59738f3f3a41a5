//! Randomized construction of set-valued tableaux: the hook walk and the
//! generator that completes a pre-tableau by inserting values from the top down.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::shapes::{Cell, Partition};
use crate::tableaux::PreTableau;

/// Hook walk on `shape`: start at a uniform cell and keep jumping to a uniform
/// cell of the current hook until the hook is empty.
pub fn hook_walk(shape: &Partition, rng: &mut RngStream) -> Result<Cell> {
    if shape.is_empty() {
        return Err(Error::EmptyShape);
    }
    Ok(hook_walk_rows(shape.rows(), rng))
}

/// `rows` is a partition profile and may carry trailing zero rows.
fn hook_walk_rows(rows: &[usize], rng: &mut RngStream) -> Cell {
    let size: usize = rows.iter().sum();
    let mut pick = rng.below(size);
    let mut row = 0;
    while pick >= rows[row] {
        pick -= rows[row];
        row += 1;
    }
    let (mut row, mut col) = (row + 1, pick + 1);
    loop {
        let arm = rows[row - 1] - col;
        let leg = rows[row..].iter().take_while(|&&len| len >= col).count();
        let hook = arm + leg;
        if hook == 0 {
            return Cell::new(row, col);
        }
        let step = rng.below(hook);
        if step < arm {
            col += step + 1;
        } else {
            row += step - arm + 1;
        }
    }
}

/// Mutable filling used while the generator runs.
struct Filling {
    shape: Partition,
    capacity: usize,
    cells: Vec<Vec<usize>>,
    /// Empty cells per row; a left-justified prefix of each row.
    empty: Vec<usize>,
    empty_size: usize,
    row_start: Vec<usize>,
}

impl Filling {
    fn new(start: &PreTableau) -> Self {
        let shape = start.shape().clone();
        let mut row_start = Vec::with_capacity(shape.num_rows());
        let mut empty = Vec::with_capacity(shape.num_rows());
        let mut offset = 0;
        for &len in shape.rows() {
            row_start.push(offset);
            empty.push(start.cells()[offset..offset + len].iter().filter(|v| v.is_empty()).count());
            offset += len;
        }
        // values arrive in decreasing order, so cells are kept descending until finish
        let cells = start.cells().iter().map(|v| v.iter().rev().copied().collect()).collect();
        Filling {
            capacity: start.capacity(),
            empty_size: empty.iter().sum(),
            shape,
            cells,
            empty,
            row_start,
        }
    }

    fn slot(&mut self, cell: Cell) -> &mut Vec<usize> {
        &mut self.cells[self.row_start[cell.row - 1] + cell.col - 1]
    }

    /// `cell` must be a corner of the empty region.
    fn place_new(&mut self, cell: Cell, value: usize) {
        debug_assert_eq!(self.empty[cell.row - 1], cell.col);
        self.slot(cell).push(value);
        self.empty[cell.row - 1] -= 1;
        self.empty_size -= 1;
    }

    fn append(&mut self, cell: Cell, value: usize) {
        self.slot(cell).push(value);
    }

    /// North-west frontier of the nonempty region: the first nonempty cell of
    /// each row whose empty prefix is strictly shorter than the row above's.
    fn nw_cells(&self, out: &mut Vec<Cell>) {
        out.clear();
        for (i, (&len, &e)) in self.shape.rows().iter().zip(&self.empty).enumerate() {
            if e < len && (i == 0 || self.empty[i - 1] > e) {
                out.push(Cell::new(i + 1, e + 1));
            }
        }
    }

    fn finish(mut self) -> PreTableau {
        for values in &mut self.cells {
            values.reverse();
        }
        PreTableau::from_parts_unchecked(self.shape, self.capacity, self.cells, 0)
    }
}

/// Completes `start` to a full tableau containing it.
///
/// Values are inserted from `start.level()` down to 1. With `e` empty cells
/// left, value `m` joins a uniform cell of the nonempty region's north-west
/// frontier with probability `(m - e) / m`, and otherwise starts a new cell at
/// the end of a hook walk on the empty region. From the all-empty pre-tableau
/// the top value is placed by a hook walk on the whole shape first.
pub fn svgen(start: &PreTableau, rng: &mut RngStream) -> Result<PreTableau> {
    let mut fill = Filling::new(start);
    let mut top = start.level();
    if top == start.capacity() && top > 0 {
        if fill.empty_size == 0 {
            return Err(Error::InvalidStart("shape is empty".to_string()));
        }
        let cell = hook_walk_rows(&fill.empty, rng);
        fill.place_new(cell, top);
        top -= 1;
    }
    let mut frontier = Vec::new();
    for m in (1..=top).rev() {
        let e = fill.empty_size;
        // u uniform in 1..=m, join when u <= m - e; both branches are forced at the extremes
        let join = if e == 0 {
            true
        } else if e == m {
            false
        } else {
            rng.one_to(m) <= m - e
        };
        if join {
            fill.nw_cells(&mut frontier);
            let cell = frontier[rng.below(frontier.len())];
            fill.append(cell, m);
        } else {
            let cell = hook_walk_rows(&fill.empty, rng);
            fill.place_new(cell, m);
        }
    }
    Ok(fill.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn p(rows: &[usize]) -> Partition {
        Partition::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn hook_walk_ends_on_corner() {
        let shape = p(&[4, 3, 3, 1]);
        let corners = crate::shapes::lower_right_boxes(&shape).unwrap();
        let mut rng = RngStream::new(1);
        for _ in 0..2000 {
            assert!(corners.contains(&hook_walk(&shape, &mut rng).unwrap()));
        }
        assert_eq!(hook_walk(&Partition::empty(), &mut rng), Err(Error::EmptyShape));
    }

    #[test]
    fn hook_walk_trivial_shapes() {
        let mut rng = RngStream::new(2);
        for _ in 0..100 {
            assert_eq!(hook_walk(&p(&[1]), &mut rng).unwrap(), Cell::new(1, 1));
            assert_eq!(hook_walk(&p(&[2]), &mut rng).unwrap(), Cell::new(1, 2));
        }
    }

    #[test]
    fn hook_walk_two_one_is_balanced() {
        let mut rng = RngStream::new(3);
        let n = 40_000;
        let right = (0..n)
            .filter(|_| hook_walk(&p(&[2, 1]), &mut rng).unwrap() == Cell::new(1, 2))
            .count();
        // sd = sqrt(n/4) = 100
        assert!((right as f64 - n as f64 / 2.0).abs() < 400.0, "{right}");
    }

    #[test]
    fn single_cell_collects_everything() {
        let e = PreTableau::empty(&p(&[1]), 3).unwrap();
        let mut rng = RngStream::new(4);
        let t = svgen(&e, &mut rng).unwrap();
        assert_eq!(t.cells(), &[vec![1, 2, 3]]);
    }

    #[test]
    fn output_is_valid_and_contains_start() {
        let shape = p(&[3, 2, 1]);
        let mut rng = RngStream::new(5);
        let start = PreTableau::empty(&shape, 10).unwrap();
        for _ in 0..300 {
            let t = svgen(&start, &mut rng).unwrap();
            let again = PreTableau::from_cells(shape.clone(), 10, t.cells().to_vec()).unwrap();
            assert_eq!(again.level(), 0);
            assert!(start.is_contained_in(&t).unwrap());
            // resume from a partial filling
            let mid = t.restrict(6).unwrap();
            let u = svgen(&mid, &mut rng).unwrap();
            assert!(mid.is_contained_in(&u).unwrap());
        }
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let start = PreTableau::empty(&p(&[3, 1]), 7).unwrap();
        let a = svgen(&start, &mut RngStream::new(99)).unwrap();
        let b = svgen(&start, &mut RngStream::new(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn frontier_matches_definition() {
        let shape = p(&[3, 3, 2]);
        let mut rng = RngStream::new(6);
        let start = PreTableau::empty(&shape, 12).unwrap();
        let t = svgen(&start, &mut rng).unwrap();
        for k in 0..=12 {
            let s = t.restrict(k).unwrap();
            let fill = Filling::new(&s);
            let mut fast = Vec::new();
            fill.nw_cells(&mut fast);
            let slow: Vec<Cell> = crate::shapes::nw_frontier(&s.nonempty_cells()).into_iter().collect();
            assert_eq!(fast, slow, "k = {k}");
        }
    }

    #[test]
    fn two_cell_row_split_is_even() {
        let start = PreTableau::empty(&p(&[2]), 3).unwrap();
        let mut rng = RngStream::new(8);
        let mut counts: BTreeMap<Vec<Vec<usize>>, usize> = BTreeMap::new();
        let n = 40_000;
        for _ in 0..n {
            *counts.entry(svgen(&start, &mut rng).unwrap().cells().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 2);
        for &c in counts.values() {
            assert!((c as f64 - n as f64 / 2.0).abs() < 400.0);
        }
    }
}
