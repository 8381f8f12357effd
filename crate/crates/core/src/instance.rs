//! Problem instances, knapsack solutions and λ-partitions.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{AffineForm, ClosedInterval, ExtRational, Rational};

/// An item with profit `p` and weight `a + λ·b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Item {
    #[serde(rename = "p")]
    pub profit: i64,
    #[serde(rename = "a")]
    pub weight_intercept: i64,
    #[serde(rename = "b")]
    pub weight_slope: i64,
}

impl Item {
    pub fn new(profit: i64, weight_intercept: i64, weight_slope: i64) -> Self {
        Item { profit, weight_intercept, weight_slope }
    }

    pub fn weight(&self) -> AffineForm {
        AffineForm::from_ints(self.weight_intercept, self.weight_slope)
    }

    pub fn weight_at(&self, lambda: &Rational) -> Rational {
        self.weight().eval(lambda)
    }
}

#[derive(Deserialize)]
struct RawInstance {
    capacity: i64,
    items: Vec<Item>,
}

impl TryFrom<RawInstance> for ParametricInstance {
    type Error = Error;
    fn try_from(raw: RawInstance) -> Result<Self> {
        ParametricInstance::new(raw.items, raw.capacity)
    }
}

/// Items with affine weights and a fixed capacity `W ≥ 0`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct ParametricInstance {
    capacity: i64,
    items: Vec<Item>,
}

impl ParametricInstance {
    pub fn new(items: Vec<Item>, capacity: i64) -> Result<Self> {
        if capacity < 0 {
            return Err(Error::InvalidInstance(format!("capacity {capacity} is negative")));
        }
        if let Some((i, it)) = items.iter().enumerate().find(|(_, it)| it.profit < 1) {
            return Err(Error::InvalidInstance(format!(
                "item {} has profit {}; profits must be at least 1",
                i + 1,
                it.profit
            )));
        }
        Ok(ParametricInstance { capacity, items })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    pub fn capacity_q(&self) -> Rational {
        Rational::from_integer(self.capacity)
    }

    /// `M = max{W, n·max_i max{a_i, b_i}}`, floored at 1.
    pub fn big_m(&self) -> Result<i64> {
        if self.items.is_empty() {
            return Err(Error::NoItems);
        }
        let coeff = self
            .items
            .iter()
            .map(|it| it.weight_intercept.max(it.weight_slope))
            .max()
            .expect("nonempty");
        let m = self.capacity.max(self.items.len() as i64 * coeff);
        Ok(m.max(1))
    }

    /// Magnitude bound used by the λ search. Like [`big_m`](Self::big_m)
    /// but over absolute coefficient values and floored at `n`, so every
    /// path crossing `(W−α)/β` lies in `[-(n+1)M, (n+1)M]` and distinct
    /// crossings are at least `1/(n²M²)` apart even with negative
    /// coefficients.
    pub fn search_magnitude(&self) -> Result<i64> {
        if self.items.is_empty() {
            return Err(Error::NoItems);
        }
        let n = self.items.len() as i64;
        let coeff = self
            .items
            .iter()
            .map(|it| it.weight_intercept.abs().max(it.weight_slope.abs()))
            .max()
            .expect("nonempty");
        Ok(self.capacity.max(n * coeff).max(n).max(1))
    }

    /// `Σ p_i`, the trivial upper bound on any achievable profit.
    pub fn profit_upper_bound(&self) -> i64 {
        self.items.iter().map(|it| it.profit).sum()
    }

    pub fn weight_of(&self, chosen: &[bool]) -> Result<AffineForm> {
        self.check_len(chosen)?;
        let (a, b) = self
            .items
            .iter()
            .zip(chosen)
            .filter(|(_, &x)| x)
            .fold((0i64, 0i64), |(a, b), (it, _)| (a + it.weight_intercept, b + it.weight_slope));
        Ok(AffineForm::from_ints(a, b))
    }

    pub fn is_feasible_at(&self, chosen: &[bool], lambda: &Rational) -> Result<bool> {
        Ok(self.weight_of(chosen)?.eval(lambda) <= self.capacity_q())
    }

    pub fn solution(&self, chosen: Vec<bool>) -> Result<KnapsackSolution> {
        self.check_len(&chosen)?;
        let weight = self.weight_of(&chosen)?;
        let profit = self.items.iter().zip(&chosen).filter(|(_, &x)| x).map(|(it, _)| it.profit).sum();
        Ok(KnapsackSolution { chosen, profit, weight })
    }

    pub fn solution_from_indices(&self, indices: &[usize]) -> Result<KnapsackSolution> {
        let mut chosen = vec![false; self.len()];
        for &i in indices {
            *chosen.get_mut(i).ok_or_else(|| {
                Error::InvalidInstance(format!("item index {} out of range", i + 1))
            })? = true;
        }
        self.solution(chosen)
    }

    pub fn empty_solution(&self) -> KnapsackSolution {
        KnapsackSolution {
            chosen: vec![false; self.len()],
            profit: 0,
            weight: AffineForm::zero(),
        }
    }

    fn check_len(&self, chosen: &[bool]) -> Result<()> {
        if chosen.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: chosen.len() });
        }
        Ok(())
    }
}

/// A subset of items with its cached profit and affine weight.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct KnapsackSolution {
    pub chosen: Vec<bool>,
    pub profit: i64,
    pub weight: AffineForm,
}

impl KnapsackSolution {
    pub fn is_feasible_at(&self, lambda: &Rational, capacity: &Rational) -> bool {
        self.weight.eval(lambda) <= *capacity
    }

    /// Feasible everywhere on `interval` (affine weight: endpoints plus
    /// the slope sign at infinite ends).
    pub fn is_feasible_on(&self, interval: &ClosedInterval, capacity: &Rational) -> bool {
        let end_ok = |e: &ExtRational, toward_pos: bool| match e {
            ExtRational::Finite(x) => self.is_feasible_at(x, capacity),
            _ => {
                let s = self.weight.slope.signum();
                match s {
                    Ordering::Equal => self.weight.intercept <= *capacity,
                    Ordering::Greater => !toward_pos,
                    Ordering::Less => toward_pos,
                }
            }
        };
        end_ok(&interval.lo, false) && end_ok(&interval.hi, true)
    }

    /// 0-based indices of the chosen items.
    pub fn indices(&self) -> Vec<usize> {
        self.chosen.iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i).collect()
    }

    /// Order used for deterministic tie-breaking: chosen vectors compared
    /// lexicographically with `false < true`.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.chosen.cmp(&other.chosen)
    }

    pub fn to_record(&self) -> SolutionRecord {
        SolutionRecord {
            items: self.indices().into_iter().map(|i| i + 1).collect(),
            profit: self.profit,
            weight: self.weight.clone(),
        }
    }
}

/// On-disk form of a solution: 1-based item indices.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub items: Vec<usize>,
    pub profit: i64,
    pub weight: AffineForm,
}

impl SolutionRecord {
    pub fn to_solution(&self, instance: &ParametricInstance) -> Result<KnapsackSolution> {
        let idx: Vec<usize> = self
            .items
            .iter()
            .map(|&i| {
                i.checked_sub(1)
                    .ok_or_else(|| Error::InvalidInstance("item indices are 1-based".into()))
            })
            .collect::<Result<_>>()?;
        let sol = instance.solution_from_indices(&idx)?;
        if sol.profit != self.profit || sol.weight != self.weight {
            return Err(Error::InvalidInstance(format!(
                "stored profit/weight of items {:?} do not match the instance",
                self.items
            )));
        }
        Ok(sol)
    }
}

/// Breakpoints `λ_1 < … < λ_k` and `k+1` cells; cell `j` covers
/// `[λ_j, λ_{j+1}]` with `λ_0 = −∞` and `λ_{k+1} = +∞`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolutionPartition {
    pub breakpoints: Vec<Rational>,
    pub cells: Vec<KnapsackSolution>,
}

impl SolutionPartition {
    pub fn single(solution: KnapsackSolution) -> Self {
        SolutionPartition { breakpoints: Vec::new(), cells: vec![solution] }
    }

    pub fn cell_interval(&self, j: usize) -> ClosedInterval {
        cell_interval(&self.breakpoints, j)
    }

    /// The best profit reported at `λ`. At a breakpoint both neighbouring
    /// cells apply and the larger profit is taken.
    pub fn profit_at(&self, lambda: &Rational) -> i64 {
        let (j, k) = cells_at(&self.breakpoints, lambda);
        let p = self.cells[j].profit;
        k.map_or(p, |k| p.max(self.cells[k].profit))
    }

    /// Checks ordering, cell count, cached profit/weight and endpoint
    /// feasibility of every cell.
    pub fn validate(&self, instance: &ParametricInstance) -> Result<()> {
        validate_cells(&self.breakpoints, &self.cells, instance)
    }

    pub fn to_file(&self) -> PartitionFile {
        PartitionFile {
            breakpoints: self.breakpoints.clone(),
            cells: self.cells.iter().map(KnapsackSolution::to_record).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("partition serializes")
    }

    pub fn from_json(s: &str, instance: &ParametricInstance) -> Result<Self> {
        let file: PartitionFile = serde_json::from_str(s)?;
        file.to_partition(instance)
    }
}

/// JSON layout of a [`SolutionPartition`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PartitionFile {
    pub breakpoints: Vec<Rational>,
    pub cells: Vec<SolutionRecord>,
}

impl PartitionFile {
    pub fn to_partition(&self, instance: &ParametricInstance) -> Result<SolutionPartition> {
        let cells = self.cells.iter().map(|c| c.to_solution(instance)).collect::<Result<_>>()?;
        let p = SolutionPartition { breakpoints: self.breakpoints.clone(), cells };
        p.validate(instance)?;
        Ok(p)
    }

    /// Profit at λ without needing the instance (used for plotting).
    pub fn profit_at(&self, lambda: &Rational) -> i64 {
        let (j, k) = cells_at(&self.breakpoints, lambda);
        let p = self.cells[j].profit;
        k.map_or(p, |k| p.max(self.cells[k].profit))
    }

    pub fn check_shape(&self) -> Result<()> {
        check_breakpoints(&self.breakpoints, self.cells.len())
    }
}

pub(crate) fn cell_interval(breakpoints: &[Rational], j: usize) -> ClosedInterval {
    let lo = if j == 0 { ExtRational::NegInf } else { breakpoints[j - 1].clone().into() };
    let hi = breakpoints.get(j).map_or(ExtRational::PosInf, |b| b.clone().into());
    ClosedInterval { lo, hi }
}

/// Index of the cell containing λ, plus the right neighbour when λ is
/// exactly a breakpoint.
pub(crate) fn cells_at(breakpoints: &[Rational], lambda: &Rational) -> (usize, Option<usize>) {
    match breakpoints.binary_search(lambda) {
        Ok(i) => (i, Some(i + 1)),
        Err(i) => (i, None),
    }
}

pub(crate) fn check_breakpoints(breakpoints: &[Rational], cells: usize) -> Result<()> {
    if cells != breakpoints.len() + 1 {
        return Err(Error::Contract(format!(
            "{} breakpoints need {} cells, got {cells}",
            breakpoints.len(),
            breakpoints.len() + 1
        )));
    }
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Contract("breakpoints are not strictly increasing".into()));
    }
    Ok(())
}

pub(crate) fn validate_cells(
    breakpoints: &[Rational],
    cells: &[KnapsackSolution],
    instance: &ParametricInstance,
) -> Result<()> {
    check_breakpoints(breakpoints, cells.len())?;
    let cap = instance.capacity_q();
    for (j, cell) in cells.iter().enumerate() {
        let fresh = instance.solution(cell.chosen.clone())?;
        if fresh != *cell {
            return Err(Error::Contract(format!("cell {j} caches a stale profit or weight")));
        }
        let iv = cell_interval(breakpoints, j);
        if !cell.is_feasible_on(&iv, &cap) {
            return Err(Error::Contract(format!(
                "cell {j} solution {:?} is infeasible somewhere on {iv}",
                cell.indices()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Items (4,1,2), (3,2,−1), W = 4.
    pub fn e2() -> ParametricInstance {
        ParametricInstance::new(vec![Item::new(4, 1, 2), Item::new(3, 2, -1)], 4).unwrap()
    }

    /// Items (3,2,1), (2,1,−1), W = 3.
    pub fn e1() -> ParametricInstance {
        ParametricInstance::new(vec![Item::new(3, 2, 1), Item::new(2, 1, -1)], 3).unwrap()
    }

    pub fn empty() -> ParametricInstance {
        ParametricInstance::new(vec![], 5).unwrap()
    }

    pub fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }
}
