//! Partitions and cell geometry.
//!
//! Cells are 1-indexed `(row, col)` pairs, rows counted top-down and columns
//! left-right, so that a partition `(3,2)` holds the cells
//! `(1,1) (1,2) (1,3) (2,1) (2,2)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    /// `self` lies weakly north-west of `other`.
    pub fn weakly_northwest_of(&self, other: &Cell) -> bool {
        self.row <= other.row && self.col <= other.col
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Finite set of cells, iterated in row-major order.
pub type CellSet = BTreeSet<Cell>;

/// A weakly decreasing sequence of positive row lengths.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    rows: Vec<usize>,
}

impl Partition {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.contains(&0) || rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(rows));
        }
        Ok(Partition { rows })
    }

    /// Builds from row lengths that may end in zeros (e.g. a row-length
    /// profile of a region); zero rows are dropped.
    pub fn from_profile(mut rows: Vec<usize>) -> Result<Self> {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        Partition::new(rows)
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    /// The staircase `(n, n-1, ..., 1)`.
    pub fn staircase(n: usize) -> Self {
        Partition {
            rows: (1..=n).rev().collect(),
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn size(&self) -> usize {
        self.rows.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Length of row `row` (1-indexed); zero past the last row.
    pub fn row_len(&self, row: usize) -> usize {
        row.checked_sub(1)
            .and_then(|i| self.rows.get(i))
            .copied()
            .unwrap_or(0)
    }

    /// Length of column `col` (1-indexed).
    pub fn col_len(&self, col: usize) -> usize {
        if col == 0 {
            return 0;
        }
        self.rows.iter().take_while(|&&len| len >= col).count()
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.rows.first().copied().unwrap_or(0);
        Partition {
            rows: (1..=width).map(|c| self.col_len(c)).collect(),
        }
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.row >= 1 && cell.col >= 1 && cell.col <= self.row_len(cell.row)
    }

    pub fn contains_partition(&self, other: &Partition) -> bool {
        other.rows.len() <= self.rows.len()
            && other.rows.iter().zip(&self.rows).all(|(a, b)| a <= b)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, &len)| (1..=len).map(move |c| Cell::new(i + 1, c)))
    }

    pub fn cell_set(&self) -> CellSet {
        self.cells().collect()
    }

    /// Row-major position of `cell`, if it belongs to the shape.
    pub fn offset(&self, cell: Cell) -> Option<usize> {
        if !self.contains(cell) {
            return None;
        }
        let before: usize = self.rows[..cell.row - 1].iter().sum();
        Some(before + cell.col - 1)
    }

    /// Removes a lower right box.
    pub fn remove_corner(&self, cell: Cell) -> Result<Partition> {
        if !self.contains(cell) {
            return Err(Error::CellOutsideShape(cell));
        }
        if hook_size(self, cell) != 0 {
            return Err(Error::InvalidPartition(self.rows.clone()));
        }
        let mut rows = self.rows.clone();
        rows[cell.row - 1] -= 1;
        Partition::from_profile(rows)
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(rows: Vec<usize>) -> Result<Self> {
        Partition::new(rows)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.rows
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let rows = s
            .split(',')
            .map(|part| part.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::PartitionSyntax(s.to_string()))?;
        Partition::new(rows)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Number of cells in the hook of `cell`, the cell itself excluded.
pub fn hook_size(shape: &Partition, cell: Cell) -> usize {
    let arm = shape.row_len(cell.row) - cell.col;
    let leg = shape.col_len(cell.col) - cell.row;
    arm + leg
}

/// Cells strictly right of `cell` in its row and strictly below it in its column.
pub fn hook_cells(shape: &Partition, cell: Cell) -> Result<CellSet> {
    if !shape.contains(cell) {
        return Err(Error::CellOutsideShape(cell));
    }
    let arm = (cell.col + 1..=shape.row_len(cell.row)).map(|c| Cell::new(cell.row, c));
    let leg = (cell.row + 1..=shape.col_len(cell.col)).map(|r| Cell::new(r, cell.col));
    Ok(arm.chain(leg).collect())
}

/// Cells with an empty hook, i.e. the removable corners.
pub fn lower_right_boxes(shape: &Partition) -> Result<CellSet> {
    if shape.is_empty() {
        return Err(Error::EmptyShape);
    }
    Ok(shape.cells().filter(|&c| hook_size(shape, c) == 0).collect())
}

/// Elements of `cells` with no other element weakly north-west of them.
pub fn nw_frontier(cells: &CellSet) -> CellSet {
    cells
        .iter()
        .filter(|a| {
            !cells
                .iter()
                .any(|b| b != *a && b.weakly_northwest_of(a))
        })
        .copied()
        .collect()
}

/// Largest `k` such that the staircase `(k, k-1, ..., 1)` fits inside `shape`.
pub fn sylvester_size(shape: &Partition) -> usize {
    let mut k = 0;
    while (1..=k + 1).all(|i| shape.row_len(i) >= k + 2 - i) {
        k += 1;
    }
    k
}

/// Size of the largest subset of `cells` in which no element is weakly
/// north-west of another. On a partition this equals [`sylvester_size`].
pub fn max_antichain(cells: &CellSet) -> usize {
    // longest chain with rows strictly increasing and columns strictly decreasing
    let cells: Vec<Cell> = cells.iter().copied().collect();
    let mut best = vec![1usize; cells.len()];
    for i in 0..cells.len() {
        for j in 0..i {
            if cells[j].row < cells[i].row && cells[j].col > cells[i].col {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    num_integer::binomial(BigUint::from(n), BigUint::from(k))
}

/// Number of standard Young tableaux of `shape` by the hook-length formula.
pub fn count_syt(shape: &Partition) -> BigUint {
    let hooks = shape
        .cells()
        .fold(BigUint::one(), |acc, c| acc * BigUint::from(hook_size(shape, c) + 1));
    factorial(shape.size()) / hooks
}

/// All partitions of `n`, in reverse lexicographic order.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    fn extend(left: usize, cap: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if left == 0 {
            out.push(Partition { rows: prefix.clone() });
            return;
        }
        for part in (1..=cap.min(left)).rev() {
            prefix.push(part);
            extend(left - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(n, n, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rows: &[usize]) -> Partition {
        Partition::new(rows.to_vec()).unwrap()
    }

    fn set(cells: &[(usize, usize)]) -> CellSet {
        cells.iter().map(|&(r, c)| Cell::new(r, c)).collect()
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=8).map(|n| partitions_of(n).len()).collect();
        assert_eq!(counts, [1, 1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(partitions_of(3), [p(&[3]), p(&[2, 1]), p(&[1, 1, 1])]);
    }

    #[test]
    fn hooks() {
        assert_eq!(
            hook_cells(&p(&[3, 2]), Cell::new(1, 1)).unwrap(),
            set(&[(1, 2), (1, 3), (2, 1)])
        );
        assert!(hook_cells(&p(&[1]), Cell::new(1, 1)).unwrap().is_empty());
        assert!(hook_cells(&p(&[3, 2]), Cell::new(2, 2)).unwrap().is_empty());
        assert_eq!(
            hook_cells(&p(&[3, 2]), Cell::new(3, 1)),
            Err(Error::CellOutsideShape(Cell::new(3, 1)))
        );
    }

    #[test]
    fn corners() {
        assert_eq!(lower_right_boxes(&p(&[3, 2])).unwrap(), set(&[(1, 3), (2, 2)]));
        assert_eq!(lower_right_boxes(&p(&[2, 1])).unwrap(), set(&[(1, 2), (2, 1)]));
        assert_eq!(lower_right_boxes(&p(&[6])).unwrap(), set(&[(1, 6)]));
        assert_eq!(lower_right_boxes(&Partition::empty()), Err(Error::EmptyShape));
    }

    #[test]
    fn frontier() {
        assert_eq!(nw_frontier(&set(&[(1, 2), (2, 1), (2, 2)])), set(&[(1, 2), (2, 1)]));
        assert_eq!(nw_frontier(&set(&[(1, 1)])), set(&[(1, 1)]));
        assert_eq!(nw_frontier(&set(&[(1, 1), (1, 2), (2, 1)])), set(&[(1, 1)]));
        assert!(nw_frontier(&CellSet::new()).is_empty());
    }

    #[test]
    fn sylvester() {
        assert_eq!(sylvester_size(&p(&[3, 2])), 2);
        assert_eq!(sylvester_size(&p(&[5])), 1);
        assert_eq!(sylvester_size(&p(&[3, 2, 1])), 3);
        assert_eq!(sylvester_size(&Partition::empty()), 0);
        // staircase containment checked one size at a time
        let shape = p(&[3, 2]);
        assert!(shape.contains_partition(&Partition::staircase(2)));
        assert!(!shape.contains_partition(&Partition::staircase(3)));
    }

    #[test]
    fn syt_counts() {
        assert_eq!(count_syt(&p(&[2, 1])), BigUint::from(2u32));
        assert_eq!(count_syt(&p(&[3, 2])), BigUint::from(5u32));
        assert_eq!(count_syt(&p(&[7])), BigUint::from(1u32));
        assert_eq!(count_syt(&Partition::empty()), BigUint::from(1u32));
        assert_eq!(count_syt(&p(&[3, 3, 3])), BigUint::from(42u32));
    }

    #[test]
    fn parse_and_display() {
        let shape: Partition = "3, 2".parse().unwrap();
        assert_eq!(shape, p(&[3, 2]));
        assert_eq!(shape.to_string(), "3,2");
        assert!("2,3".parse::<Partition>().is_err());
        assert!("2,x".parse::<Partition>().is_err());
        assert_eq!(serde_json::to_string(&shape).unwrap(), "[3,2]");
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    }

    #[test]
    fn conjugate_and_offsets() {
        let shape = p(&[3, 2]);
        assert_eq!(shape.conjugate(), p(&[2, 2, 1]));
        assert_eq!(shape.offset(Cell::new(2, 1)), Some(3));
        assert_eq!(shape.offset(Cell::new(2, 3)), None);
        assert_eq!(shape.remove_corner(Cell::new(1, 3)).unwrap(), p(&[2, 2]));
        assert!(shape.remove_corner(Cell::new(1, 1)).is_err());
    }

    #[test]
    fn antichain_on_non_partition_region() {
        // (2,1) plus the two cells of an outer frontier
        let region = set(&[(1, 1), (1, 2), (2, 1), (1, 3), (2, 2)]);
        assert_eq!(max_antichain(&region), 2);
        assert_eq!(max_antichain(&set(&[(1, 3), (2, 2), (3, 1)])), 3);
        assert_eq!(max_antichain(&CellSet::new()), 0);
    }
}
