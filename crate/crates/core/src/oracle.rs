//! Exhaustive ground truth for small instances.
//!
//! Nothing here uses the closed-form law: completions are enumerated by
//! placing values one at a time, and the generator's law is obtained by
//! expanding every random choice it can make (hook walk paths included) with
//! its exact branch probability.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::probability::Distribution;
use crate::rng::RngStream;
use crate::scalar::Probability;
use crate::shapes::{hook_cells, lower_right_boxes, nw_frontier, Cell, Partition};
use crate::tableaux::PreTableau;

/// Default cap on the number of completions the oracle will enumerate.
pub const ENUMERATION_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct EnumerationResult {
    /// Complete tableaux sorted by key.
    pub tableaux: Vec<PreTableau>,
    pub count: BigUint,
}

/// Raw working state: row-major cells with values in descending order.
#[derive(Clone)]
struct Partial {
    cells: Vec<Vec<usize>>,
}

impl Partial {
    fn from(t: &PreTableau) -> Self {
        Partial {
            cells: t.cells().iter().map(|v| v.iter().rev().copied().collect()).collect(),
        }
    }

    fn empty_region(&self, shape: &Partition) -> Partition {
        let mut rows = Vec::new();
        let mut offset = 0;
        for &len in shape.rows() {
            rows.push(self.cells[offset..offset + len].iter().filter(|v| v.is_empty()).count());
            offset += len;
        }
        Partition::from_profile(rows).expect("empty cells form a partition")
    }

    fn nonempty(&self, shape: &Partition) -> crate::shapes::CellSet {
        shape
            .cells()
            .zip(&self.cells)
            .filter(|(_, v)| !v.is_empty())
            .map(|(c, _)| c)
            .collect()
    }

    fn with(&self, shape: &Partition, cell: Cell, value: usize) -> Partial {
        let mut next = self.clone();
        next.cells[shape.offset(cell).expect("cell in shape")].push(value);
        next
    }

    fn finish(&self, shape: &Partition, capacity: usize) -> PreTableau {
        let cells = self
            .cells
            .iter()
            .map(|v| v.iter().rev().copied().collect())
            .collect();
        PreTableau::from_parts_unchecked(shape.clone(), capacity, cells, 0)
    }
}

/// Legal homes for value `m` when it is the smallest value placed so far:
/// a new singleton at a corner of the empty region, or a join onto the
/// north-west frontier of the nonempty region when enough values remain to
/// fill the empty cells afterwards.
fn placements(shape: &Partition, state: &Partial, m: usize) -> (Vec<Cell>, Vec<Cell>) {
    let empty = state.empty_region(shape);
    let new_cells = if empty.is_empty() {
        Vec::new()
    } else {
        lower_right_boxes(&empty).expect("nonempty").into_iter().collect()
    };
    let joins = if empty.size() < m {
        nw_frontier(&state.nonempty(shape)).into_iter().collect()
    } else {
        Vec::new()
    };
    (new_cells, joins)
}

/// All complete tableaux containing `start`.
pub fn enumerate_svt(start: &PreTableau) -> Result<EnumerationResult> {
    enumerate_svt_bounded(start, ENUMERATION_LIMIT)
}

pub fn enumerate_svt_bounded(start: &PreTableau, limit: usize) -> Result<EnumerationResult> {
    let shape = start.shape();
    let mut out = Vec::new();
    let mut stack = vec![(Partial::from(start), start.level())];
    while let Some((state, m)) = stack.pop() {
        if m == 0 {
            if out.len() == limit {
                return Err(Error::StateSpaceTooLarge { limit });
            }
            out.push(state.finish(shape, start.capacity()));
            continue;
        }
        let (new_cells, joins) = placements(shape, &state, m);
        for cell in new_cells.into_iter().chain(joins) {
            stack.push((state.with(shape, cell, m), m - 1));
        }
    }
    out.sort_by_cached_key(|t| t.key());
    out.dedup();
    let count = BigUint::from(out.len());
    Ok(EnumerationResult { tableaux: out, count })
}

/// Standard Young tableaux of `shape` by brute force: every filling of the
/// cells with `1..=n` that increases along rows and columns, built by adding
/// the next value at any cell whose upper and left neighbours are already filled.
pub fn count_syt_brute_force(shape: &Partition) -> u64 {
    fn go(shape: &Partition, filled: &mut Vec<usize>) -> u64 {
        if filled.iter().sum::<usize>() == shape.size() {
            return 1;
        }
        let mut total = 0;
        for r in 0..shape.num_rows() {
            let c = filled[r];
            let fits_row = c < shape.rows()[r];
            let fits_col = r == 0 || filled[r - 1] > c;
            if fits_row && fits_col {
                filled[r] += 1;
                total += go(shape, filled);
                filled[r] -= 1;
            }
        }
        total
    }
    go(shape, &mut vec![0; shape.num_rows()])
}

/// Exact end-cell law of the hook walk, by expanding every path.
pub fn hook_walk_law(shape: &Partition) -> Result<BTreeMap<Cell, BigRational>> {
    fn absorb(
        shape: &Partition,
        cell: Cell,
        memo: &mut HashMap<Cell, BTreeMap<Cell, BigRational>>,
    ) -> BTreeMap<Cell, BigRational> {
        if let Some(hit) = memo.get(&cell) {
            return hit.clone();
        }
        let hook = hook_cells(shape, cell).expect("cell in shape");
        let mut law = BTreeMap::new();
        if hook.is_empty() {
            law.insert(cell, BigRational::one());
        } else {
            let step = BigRational::from_counts(1, hook.len() as u64);
            for next in hook {
                for (end, p) in absorb(shape, next, memo) {
                    *law.entry(end).or_insert_with(BigRational::zero) += &step * p;
                }
            }
        }
        memo.insert(cell, law.clone());
        law
    }

    if shape.is_empty() {
        return Err(Error::EmptyShape);
    }
    let mut memo = HashMap::new();
    let start = BigRational::from_counts(1, shape.size() as u64);
    let mut law = BTreeMap::new();
    for cell in shape.cells() {
        for (end, p) in absorb(shape, cell, &mut memo) {
            *law.entry(end).or_insert_with(BigRational::zero) += &start * p;
        }
    }
    Ok(law)
}

/// Law of the generator's output, obtained by expanding its random choices.
pub fn branch_tree_law(start: &PreTableau) -> Result<Distribution<BigRational>> {
    branch_tree_law_bounded(start, ENUMERATION_LIMIT)
}

pub fn branch_tree_law_bounded(start: &PreTableau, limit: usize) -> Result<Distribution<BigRational>> {
    let shape = start.shape();
    let capacity = start.capacity();
    let mut hook_laws: HashMap<Partition, BTreeMap<Cell, BigRational>> = HashMap::new();
    let mut law_for = |region: &Partition| -> Result<BTreeMap<Cell, BigRational>> {
        if let Some(hit) = hook_laws.get(region) {
            return Ok(hit.clone());
        }
        let law = hook_walk_law(region)?;
        hook_laws.insert(region.clone(), law.clone());
        Ok(law)
    };

    let mut frontier = vec![(Partial::from(start), start.level(), BigRational::one())];
    if start.level() == capacity && capacity > 0 {
        frontier.clear();
        for (cell, p) in law_for(shape)? {
            frontier.push((Partial::from(start).with(shape, cell, capacity), capacity - 1, p));
        }
    }

    let mut out = Distribution::new();
    let mut leaves = 0usize;
    while let Some((state, m, weight)) = frontier.pop() {
        if m == 0 {
            leaves += 1;
            if leaves > limit {
                return Err(Error::StateSpaceTooLarge { limit });
            }
            out.add(state.finish(shape, capacity), weight);
            continue;
        }
        let empty = state.empty_region(shape);
        let e = empty.size();
        let join = BigRational::from_counts((m - e) as u64, m as u64);
        let fresh = BigRational::from_counts(e as u64, m as u64);
        if !join.is_zero() {
            let targets = nw_frontier(&state.nonempty(shape));
            let each = &weight * &join / BigRational::from_counts(targets.len() as u64, 1);
            for cell in targets {
                frontier.push((state.with(shape, cell, m), m - 1, each.clone()));
            }
        }
        if !fresh.is_zero() {
            for (cell, p) in law_for(&empty)? {
                frontier.push((state.with(shape, cell, m), m - 1, &weight * &fresh * p));
            }
        }
    }
    Ok(out)
}

/// Exactly uniform draw from an enumeration.
pub fn uniform_sample(enumeration: &EnumerationResult, rng: &mut RngStream) -> Result<PreTableau> {
    rng.choose(&enumeration.tableaux)
        .cloned()
        .ok_or(Error::EmptyEnumeration)
}
