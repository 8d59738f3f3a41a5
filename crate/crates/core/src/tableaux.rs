//! Set-valued pre-tableaux.
//!
//! A pre-tableau at level `k` assigns the values `k+1..=N` to cells of a shape
//! such that each value appears once, the nonempty cells are closed to the right
//! and downward, values strictly increase along rows and down columns, and at
//! most `k` cells are empty. Level 0 is a complete tableau; level `N` is the
//! all-empty pre-tableau.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shapes::{nw_frontier, Cell, CellSet, Partition};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreTableau {
    shape: Partition,
    capacity: usize,
    /// Row-major, each cell sorted ascending.
    cells: Vec<Vec<usize>>,
    level: usize,
}

/// Canonical byte encoding: equal keys iff equal pre-tableaux.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TableauKey(Vec<u8>);

impl TableauKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// JSON wire form: `{"shape":[3,2],"n":9,"cells":[[[],[],[6]],[[],[7,8,9]]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableauJson {
    pub shape: Vec<usize>,
    pub n: usize,
    pub cells: Vec<Vec<Vec<usize>>>,
}

impl PreTableau {
    /// Checks a raw assignment against the pre-tableau conditions, reporting the
    /// first violation in the order: range, uniqueness, closure, order, empties.
    pub fn validate(
        entries: &BTreeMap<Cell, Vec<usize>>,
        shape: &Partition,
        capacity: usize,
    ) -> Result<PreTableau> {
        let mut cells = vec![Vec::new(); shape.size()];
        for (&cell, values) in entries {
            let offset = shape.offset(cell).ok_or(Error::CellOutsideShape(cell))?;
            for &value in values {
                if value == 0 || value > capacity {
                    return Err(Error::ValueOutOfRange { cell, value, capacity });
                }
            }
            cells[offset] = values.clone();
        }
        Self::from_cells(shape.clone(), capacity, cells)
    }

    /// Same checks as [`PreTableau::validate`] on row-major cell contents.
    pub fn from_cells(
        shape: Partition,
        capacity: usize,
        mut cells: Vec<Vec<usize>>,
    ) -> Result<PreTableau> {
        if cells.len() != shape.size() {
            return Err(Error::MalformedTableau(format!(
                "{} cells given for a shape of size {}",
                cells.len(),
                shape.size()
            )));
        }
        let positions: Vec<Cell> = shape.cells().collect();
        for (cell, values) in positions.iter().zip(&cells) {
            if let Some(&value) = values.iter().find(|&&v| v == 0 || v > capacity) {
                return Err(Error::ValueOutOfRange { cell: *cell, value, capacity });
            }
        }

        // (i) each present value once, and the present values are the top block
        let mut seen = vec![false; capacity + 1];
        for &value in cells.iter().flatten() {
            if std::mem::replace(&mut seen[value], true) {
                return Err(Error::DuplicateValue(value));
            }
        }
        let present = seen.iter().filter(|&&s| s).count();
        let level = capacity - present;
        if let Some(missing) = (level + 1..=capacity).find(|&v| !seen[v]) {
            return Err(Error::GapInTopValues {
                expected_low: level + 1,
                capacity,
                missing,
            });
        }
        for values in &mut cells {
            values.sort_unstable();
        }

        let at = |cell: Cell| shape.offset(cell).map(|i| &cells[i]);
        // (ii) closure of the nonempty region
        for &cell in &positions {
            if at(cell).is_some_and(|v| v.is_empty()) {
                continue;
            }
            for neighbour in [Cell::new(cell.row, cell.col + 1), Cell::new(cell.row + 1, cell.col)] {
                if at(neighbour).is_some_and(|v| v.is_empty()) {
                    return Err(Error::NonemptyRegionNotClosed { cell, neighbour });
                }
            }
        }
        // (iii) strict increase rightward and downward
        for &cell in &positions {
            let Some(&max) = at(cell).and_then(|v| v.last()) else {
                continue;
            };
            for neighbour in [Cell::new(cell.row, cell.col + 1), Cell::new(cell.row + 1, cell.col)] {
                if let Some(&min) = at(neighbour).and_then(|v| v.first()) {
                    if max >= min {
                        return Err(Error::OrderViolation { cell, neighbour });
                    }
                }
            }
        }
        // (iv)
        let empty = cells.iter().filter(|v| v.is_empty()).count();
        if empty > level {
            return Err(Error::TooManyEmptyCells { empty, level });
        }

        Ok(PreTableau {
            shape,
            capacity,
            cells,
            level,
        })
    }

    /// The all-empty pre-tableau at level `capacity`.
    pub fn empty(shape: &Partition, capacity: usize) -> Result<PreTableau> {
        Self::from_cells(shape.clone(), capacity, vec![Vec::new(); shape.size()])
    }

    /// Builds without checking; callers guarantee validity.
    pub(crate) fn from_parts_unchecked(
        shape: Partition,
        capacity: usize,
        cells: Vec<Vec<usize>>,
        level: usize,
    ) -> PreTableau {
        debug_assert!(cells.iter().all(|v| v.windows(2).all(|w| w[0] < w[1])));
        PreTableau {
            shape,
            capacity,
            cells,
            level,
        }
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_complete(&self) -> bool {
        self.level == 0
    }

    /// Row-major cell contents.
    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn get(&self, cell: Cell) -> Option<&[usize]> {
        self.shape.offset(cell).map(|i| self.cells[i].as_slice())
    }

    pub fn entries(&self) -> BTreeMap<Cell, Vec<usize>> {
        self.shape.cells().zip(self.cells.iter().cloned()).collect()
    }

    /// Drops every value `<= k`.
    pub fn restrict(&self, k: usize) -> Result<PreTableau> {
        if k < self.level || k > self.capacity {
            return Err(Error::LevelOutOfRange {
                level: k,
                low: self.level,
                high: self.capacity,
            });
        }
        let cells = self
            .cells
            .iter()
            .map(|values| values.iter().copied().filter(|&v| v > k).collect())
            .collect();
        Ok(PreTableau {
            shape: self.shape.clone(),
            capacity: self.capacity,
            cells,
            level: k,
        })
    }

    /// The cell holding `value`.
    pub fn cell_of(&self, value: usize) -> Result<Cell> {
        self.shape
            .cells()
            .zip(&self.cells)
            .find(|(_, values)| values.binary_search(&value).is_ok())
            .map(|(cell, _)| cell)
            .ok_or(Error::ValueAbsent(value))
    }

    /// Row profile of the empty cells; a partition by the closure condition.
    pub fn empty_region(&self) -> Partition {
        let mut offset = 0;
        let mut rows = Vec::with_capacity(self.shape.num_rows());
        for &len in self.shape.rows() {
            rows.push(self.cells[offset..offset + len].iter().filter(|v| v.is_empty()).count());
            offset += len;
        }
        Partition::from_profile(rows).expect("empty cells of a valid pre-tableau form a partition")
    }

    pub fn nonempty_cells(&self) -> CellSet {
        self.shape
            .cells()
            .zip(&self.cells)
            .filter(|(_, v)| !v.is_empty())
            .map(|(c, _)| c)
            .collect()
    }

    /// Empty cells together with the north-west frontier of the nonempty ones.
    pub fn augmented_region(&self) -> CellSet {
        let mut region = self.empty_region().cell_set();
        region.extend(nw_frontier(&self.nonempty_cells()));
        region
    }

    /// Cellwise inclusion `self ⊆ other`.
    pub fn is_contained_in(&self, other: &PreTableau) -> Result<bool> {
        if self.shape != other.shape || self.capacity != other.capacity {
            return Err(Error::ShapeMismatch);
        }
        Ok(self
            .cells
            .iter()
            .zip(&other.cells)
            .all(|(a, b)| a.iter().all(|v| b.binary_search(v).is_ok())))
    }

    /// Every pre-tableau one level down that contains `self`, found by trying
    /// value `level` in each cell and keeping the placements that validate.
    pub fn refinements(&self) -> Vec<PreTableau> {
        if self.level == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for i in 0..self.cells.len() {
            let mut cells = self.cells.clone();
            cells[i].insert(0, self.level);
            if let Ok(t) = Self::from_cells(self.shape.clone(), self.capacity, cells) {
                out.push(t);
            }
        }
        out.sort_by_cached_key(|t| t.key());
        out
    }

    pub fn key(&self) -> TableauKey {
        let mut bytes = Vec::with_capacity(4 * (self.capacity + self.cells.len() + self.shape.num_rows() + 2));
        bytes.extend_from_slice(&(self.capacity as u32).to_be_bytes());
        for &len in self.shape.rows() {
            bytes.extend_from_slice(&(len as u32).to_be_bytes());
        }
        bytes.extend_from_slice(&0u32.to_be_bytes());
        for values in &self.cells {
            for &v in values {
                bytes.extend_from_slice(&(v as u32).to_be_bytes());
            }
            bytes.extend_from_slice(&0u32.to_be_bytes());
        }
        TableauKey(bytes)
    }

    pub fn to_json(&self) -> TableauJson {
        let mut offset = 0;
        let cells = self
            .shape
            .rows()
            .iter()
            .map(|&len| {
                let row = self.cells[offset..offset + len].to_vec();
                offset += len;
                row
            })
            .collect();
        TableauJson {
            shape: self.shape.rows().to_vec(),
            n: self.capacity,
            cells,
        }
    }

    pub fn from_json(json: &TableauJson) -> Result<PreTableau> {
        let shape = Partition::new(json.shape.clone())?;
        if json.cells.len() != shape.num_rows()
            || json.cells.iter().zip(shape.rows()).any(|(row, &len)| row.len() != len)
        {
            return Err(Error::MalformedTableau(
                "cell rows do not match the shape".to_string(),
            ));
        }
        let cells = json.cells.iter().flatten().cloned().collect();
        Self::from_cells(shape, json.n, cells)
    }
}

impl Serialize for PreTableau {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PreTableau {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = TableauJson::deserialize(deserializer)?;
        PreTableau::from_json(&json).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PreTableau {
    /// One line per row, cells separated by `|`, values by commas; `.` marks an empty cell.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut offset = 0;
        for (r, &len) in self.shape.rows().iter().enumerate() {
            if r > 0 {
                writeln!(f)?;
            }
            let row: Vec<String> = self.cells[offset..offset + len]
                .iter()
                .map(|v| {
                    if v.is_empty() {
                        ".".to_string()
                    } else {
                        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                    }
                })
                .collect();
            write!(f, "{}", row.join(" | "))?;
            offset += len;
        }
        Ok(())
    }
}
