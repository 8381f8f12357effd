//! The min-weight knapsack recursion read as shortest paths in a layered
//! DAG, evaluated at one fixed λ.
//!
//! Node `(k, row)` holds the minimum weight at λ of a path using the first
//! `k` items and landing on profit row `row`. Two profit axes are
//! supported: explicit scaled integers `0..=P̃` where a row means "scaled
//! profit exactly p", and the implicit geometric grid `{0} ∪ {(1+ε)^{i/n}}`
//! where a row means "profit at least point(i)".
//!
//! Among minimum-weight paths the table tracks both the smallest and the
//! largest total slope, i.e. the right and left derivatives of the
//! concave function `ω(λ)` at λ.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::instance::{KnapsackSolution, ParametricInstance};
use crate::numeric::{AffineForm, Rational};
use crate::scaled::{ExactInt, ScaledWeights};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum SlopeMode {
    /// Among shortest paths, the one with the smallest slope (right derivative).
    MinSlope,
    /// Among shortest paths, the one with the largest slope (left derivative).
    MaxSlope,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GridKind {
    /// Scaled profits with rows `0..=cap`, row = exact scaled profit.
    Explicit { scaled_profits: Vec<i64>, cap: i64 },
    /// Rows `0` (profit 0) and `1 + i` for `(1+ε)^{i/n}`, `i ∈ 0..=max_index`.
    Implicit { epsilon: Rational, n: usize, bound: i64, max_index: usize },
}

/// The profit axis of the DP plus the precomputed take-edge targets.
#[derive(Clone, Debug)]
pub struct ProfitGrid {
    kind: GridKind,
    /// Implicit mode only: `thresholds[r] = ⌈point(r)⌉`, the smallest integer
    /// profit that satisfies row `r` (row 0 has threshold 0).
    thresholds: Vec<i64>,
    /// Implicit mode only: `(1+ε)^i` for `i ∈ 0..=max_index`.
    powers: Vec<Rational>,
    /// `sources[k][row]`: row at layer `k` reached by the take-edge of item
    /// `k` into `row` at layer `k+1`.
    sources: Vec<Vec<Option<u32>>>,
}

pub(crate) fn check_epsilon(eps: &Rational) -> Result<()> {
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(Error::EpsilonOutOfRange(eps.to_string()));
    }
    Ok(())
}

/// `p̃_i = ⌊n·p_i / (ε·p^A)⌋` and `P̃ = ⌈2n/ε⌉`.
pub fn scale_profits(instance: &ParametricInstance, approx_profit: i64, eps: &Rational) -> Result<ProfitGrid> {
    check_epsilon(eps)?;
    if approx_profit < 1 {
        return Err(Error::ZeroApproxProfit);
    }
    let n = Rational::from_integer(instance.len() as i64);
    let denom = eps * &Rational::from_integer(approx_profit);
    let scaled_profits = instance
        .items()
        .iter()
        .map(|it| {
            (&n * &Rational::from_integer(it.profit) / &denom)
                .floor()
                .to_i64()
                .ok_or_else(|| Error::Contract("scaled profit overflows i64".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let cap = (&n * &Rational::from_integer(2) / eps)
        .ceil()
        .to_i64()
        .ok_or_else(|| Error::Contract("scaled profit cap overflows i64".into()))?;
    Ok(ProfitGrid::explicit(scaled_profits, cap))
}

/// `S = {(1+ε)^{i/n} : i ∈ 0..=⌈n·log_{1+ε} P⌉}` plus the point 0.
pub fn build_profit_grid_implicit(bound: i64, eps: &Rational, n: usize) -> Result<ProfitGrid> {
    check_epsilon(eps)?;
    if bound < 1 || n < 1 {
        return Err(Error::Contract("implicit grid needs P ≥ 1 and n ≥ 1".into()));
    }
    let base = Rational::one() + eps;
    let target = Rational::from_integer(bound).pow(n as u32);
    let mut powers = vec![Rational::one()];
    while *powers.last().expect("nonempty") < target {
        let next = powers.last().expect("nonempty") * &base;
        powers.push(next);
    }
    let max_index = powers.len() - 1;
    let mut thresholds = Vec::with_capacity(max_index + 2);
    thresholds.push(0);
    for p in &powers {
        thresholds.push(nth_root_ceil(p, n));
    }
    let kind = GridKind::Implicit { epsilon: eps.clone(), n, bound, max_index };
    Ok(ProfitGrid { kind, thresholds, powers, sources: Vec::new() })
}

/// Smallest integer `m ≥ 0` with `mⁿ ≥ x` for rational `x > 0`.
fn nth_root_ceil(x: &Rational, n: usize) -> i64 {
    let guess = x.to_f64().powf(1.0 / n as f64).ceil().max(1.0) as i64;
    let ok = |m: i64| Rational::from_integer(m).pow(n as u32) >= *x;
    let mut m = guess.max(1);
    while m > 1 && ok(m - 1) {
        m -= 1;
    }
    while !ok(m) {
        m += 1;
    }
    m
}

impl ProfitGrid {
    pub fn explicit(scaled_profits: Vec<i64>, cap: i64) -> Self {
        let rows = cap as usize + 1;
        let sources = scaled_profits
            .iter()
            .map(|&s| {
                (0..rows)
                    .map(|r| {
                        let r = r as i64;
                        (s <= r).then(|| (r - s) as u32)
                    })
                    .collect()
            })
            .collect();
        ProfitGrid {
            kind: GridKind::Explicit { scaled_profits, cap },
            thresholds: Vec::new(),
            powers: Vec::new(),
            sources,
        }
    }

    /// Explicit grid with the true profits and `P̃ = Σ p_i`: the exact DP.
    pub fn unscaled(instance: &ParametricInstance) -> Self {
        let profits = instance.items().iter().map(|it| it.profit).collect();
        ProfitGrid::explicit(profits, instance.profit_upper_bound())
    }

    /// Implicit grid wired to the item profits of `instance`.
    pub fn implicit(instance: &ParametricInstance, eps: &Rational) -> Result<Self> {
        let bound = instance.profit_upper_bound().max(1);
        let mut grid = build_profit_grid_implicit(bound, eps, instance.len().max(1))?;
        grid.sources = instance
            .items()
            .iter()
            .map(|it| (0..grid.rows()).map(|r| Some(grid.source_row(r, it.profit) as u32)).collect())
            .collect();
        Ok(grid)
    }

    pub fn kind(&self) -> &GridKind {
        &self.kind
    }

    pub fn rows(&self) -> usize {
        match &self.kind {
            GridKind::Explicit { cap, .. } => *cap as usize + 1,
            GridKind::Implicit { max_index, .. } => max_index + 2,
        }
    }

    /// Row holding grid point `(1+ε)^{i/n}` (implicit mode).
    pub fn row_of_index(&self, i: usize) -> usize {
        i + 1
    }

    /// Smallest row whose point is `≥ x` (`x ≤ 0` maps to row 0), or `None`
    /// if `x` lies above the largest point. Exact: `(1+ε)^{i/n} ≥ x` iff
    /// `(1+ε)^i ≥ xⁿ`.
    pub fn round_up(&self, x: &Rational) -> Option<usize> {
        match &self.kind {
            GridKind::Explicit { cap, .. } => {
                let c = x.ceil().to_i64()?.max(0);
                (c <= *cap).then_some(c as usize)
            }
            GridKind::Implicit { n, .. } => {
                if !x.is_positive() {
                    return Some(0);
                }
                let xn = x.pow(*n as u32);
                let i = self.powers.partition_point(|p| *p < xn);
                (i < self.powers.len()).then(|| self.row_of_index(i))
            }
        }
    }

    /// Take-edge source in implicit mode: the remaining integer profit
    /// `⌈point(row)⌉ − p` rounded up onto the grid.
    fn source_row(&self, row: usize, profit: i64) -> usize {
        let need = self.thresholds[row] - profit;
        if need <= 0 {
            0
        } else {
            // thresholds are non-decreasing and row 0 has threshold 0
            self.thresholds.partition_point(|&t| t < need)
        }
    }

    /// Smallest integer profit that meets `row`.
    pub fn row_profit(&self, row: usize) -> i64 {
        match &self.kind {
            GridKind::Explicit { .. } => row as i64,
            GridKind::Implicit { .. } => self.thresholds[row],
        }
    }

    pub fn scaled_profits(&self) -> Option<&[i64]> {
        match &self.kind {
            GridKind::Explicit { scaled_profits, .. } => Some(scaled_profits),
            GridKind::Implicit { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
struct Node<T> {
    value: T,
    min_slope: i128,
    max_slope: i128,
}

#[derive(Clone, Debug)]
enum Values {
    Small(Vec<Option<Node<i128>>>),
    Big(Vec<Option<Node<BigInt>>>),
}

/// Shortest-path values at one λ. Weights are stored scaled by the
/// denominator of λ so that all comparisons are integer comparisons.
#[derive(Clone, Debug)]
pub struct DpTable {
    lambda: Rational,
    n: usize,
    rows: usize,
    /// Layers kept in `values`: all `n+1`, or only the last one.
    layers: usize,
    values: Values,
    scaled_capacity: BigInt,
    small_capacity: Option<i128>,
    /// Take flags for the min-slope and max-slope predecessor, layer-major
    /// for layers `1..=n`.
    take_min: Vec<bool>,
    take_max: Vec<bool>,
    sources: Vec<Vec<Option<u32>>>,
}

fn fill<T: ExactInt>(
    weights: &[T],
    slopes: &[i128],
    grid: &ProfitGrid,
    keep_layers: bool,
) -> (Vec<Option<Node<T>>>, Vec<bool>, Vec<bool>) {
    let n = weights.len();
    let rows = grid.rows();
    let mut prev: Vec<Option<Node<T>>> = vec![None; rows];
    prev[0] = Some(Node { value: T::zero(), min_slope: 0, max_slope: 0 });
    let mut all = if keep_layers { prev.clone() } else { Vec::new() };
    let mut take_min = vec![false; n * rows];
    let mut take_max = vec![false; n * rows];
    for k in 0..n {
        let src = &grid.sources[k];
        let w = &weights[k];
        let b = slopes[k];
        let mut cur: Vec<Option<Node<T>>> = Vec::with_capacity(rows);
        for row in 0..rows {
            let skip = &prev[row];
            let take = src[row].and_then(|s| prev[s as usize].as_ref());
            let node = match (skip, take) {
                (None, None) => None,
                (Some(s), None) => Some(s.clone()),
                (None, Some(t)) => {
                    take_min[k * rows + row] = true;
                    take_max[k * rows + row] = true;
                    Some(Node {
                        value: t.value.clone() + w,
                        min_slope: t.min_slope + b,
                        max_slope: t.max_slope + b,
                    })
                }
                (Some(s), Some(t)) => {
                    let tv = t.value.clone() + w;
                    match tv.cmp(&s.value) {
                        Ordering::Greater => Some(s.clone()),
                        Ordering::Less => {
                            take_min[k * rows + row] = true;
                            take_max[k * rows + row] = true;
                            Some(Node { value: tv, min_slope: t.min_slope + b, max_slope: t.max_slope + b })
                        }
                        Ordering::Equal => {
                            // ties go to the skip edge
                            let (tmin, tmax) = (t.min_slope + b, t.max_slope + b);
                            let mut node = s.clone();
                            if tmin < s.min_slope {
                                node.min_slope = tmin;
                                take_min[k * rows + row] = true;
                            }
                            if tmax > s.max_slope {
                                node.max_slope = tmax;
                                take_max[k * rows + row] = true;
                            }
                            Some(node)
                        }
                    }
                }
            };
            cur.push(node);
        }
        if keep_layers {
            all.extend(cur.iter().cloned());
        }
        prev = cur;
    }
    (if keep_layers { all } else { prev }, take_min, take_max)
}

/// Fills the DP at λ. The table keeps only the last layer; see
/// [`dp_min_weight_at_full`] for all layers.
pub fn dp_min_weight_at(instance: &ParametricInstance, grid: &ProfitGrid, lambda: &Rational) -> DpTable {
    build(instance, grid, lambda, false)
}

/// Like [`dp_min_weight_at`] but keeps every layer `k ∈ 0..=n`.
pub fn dp_min_weight_at_full(instance: &ParametricInstance, grid: &ProfitGrid, lambda: &Rational) -> DpTable {
    build(instance, grid, lambda, true)
}

fn build(instance: &ParametricInstance, grid: &ProfitGrid, lambda: &Rational, keep_layers: bool) -> DpTable {
    assert_eq!(grid.sources.len(), instance.len(), "grid was built for a different instance");
    let slopes: Vec<i128> = instance.items().iter().map(|it| i128::from(it.weight_slope)).collect();
    let scaled_capacity = BigInt::from(instance.capacity()) * lambda.denom();
    let (values, take_min, take_max, small_capacity) = match ScaledWeights::at(instance, lambda) {
        ScaledWeights::Small { weights, capacity } => {
            let (v, a, b) = fill(&weights, &slopes, grid, keep_layers);
            (Values::Small(v), a, b, Some(capacity))
        }
        ScaledWeights::Big { weights, .. } => {
            let (v, a, b) = fill(&weights, &slopes, grid, keep_layers);
            (Values::Big(v), a, b, None)
        }
    };
    DpTable {
        lambda: lambda.clone(),
        n: instance.len(),
        rows: grid.rows(),
        layers: if keep_layers { instance.len() + 1 } else { 1 },
        values,
        scaled_capacity,
        small_capacity,
        take_min,
        take_max,
        sources: grid.sources.clone(),
    }
}

impl DpTable {
    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    fn index(&self, k: usize, row: usize) -> Option<usize> {
        if self.layers == 1 {
            (k == self.n).then_some(row)
        } else {
            Some(k * self.rows + row)
        }
    }

    pub fn reachable(&self, row: usize) -> bool {
        match &self.values {
            Values::Small(v) => v[self.index(self.n, row).expect("last layer")].is_some(),
            Values::Big(v) => v[self.index(self.n, row).expect("last layer")].is_some(),
        }
    }

    /// Shortest-path length at layer `k` (`None` for +∞). Panics if the
    /// table does not keep layer `k`.
    pub fn value_at_layer(&self, k: usize, row: usize) -> Option<Rational> {
        let i = self.index(k, row).expect("layer not kept");
        let den = self.lambda.denom().clone();
        match &self.values {
            Values::Small(v) => v[i].as_ref().map(|nd| Rational::new(BigInt::from(nd.value), den)),
            Values::Big(v) => v[i].as_ref().map(|nd| Rational::new(nd.value.clone(), den)),
        }
    }

    /// `ω(λ)` for `row`, or `None` if the row is unreachable.
    pub fn value(&self, row: usize) -> Option<Rational> {
        self.value_at_layer(self.n, row)
    }

    pub fn slope(&self, row: usize, mode: SlopeMode) -> Option<i128> {
        let i = self.index(self.n, row).expect("last layer");
        let pick = |min: i128, max: i128| match mode {
            SlopeMode::MinSlope => min,
            SlopeMode::MaxSlope => max,
        };
        match &self.values {
            Values::Small(v) => v[i].as_ref().map(|nd| pick(nd.min_slope, nd.max_slope)),
            Values::Big(v) => v[i].as_ref().map(|nd| pick(nd.min_slope, nd.max_slope)),
        }
    }

    /// `ω(λ)` compared with the capacity `W`; `None` if unreachable.
    pub fn cmp_capacity(&self, row: usize) -> Option<Ordering> {
        let i = self.index(self.n, row).expect("last layer");
        match &self.values {
            Values::Small(v) => {
                let cap = self.small_capacity.expect("small table");
                v[i].as_ref().map(|nd| nd.value.cmp(&cap))
            }
            Values::Big(v) => v[i].as_ref().map(|nd| nd.value.cmp(&self.scaled_capacity)),
        }
    }

    /// The chosen-vector of the shortest path into `row` (unreachable rows
    /// yield `None`).
    pub fn path(&self, row: usize, mode: SlopeMode) -> Option<Vec<bool>> {
        if !self.reachable(row) {
            return None;
        }
        let takes = match mode {
            SlopeMode::MinSlope => &self.take_min,
            SlopeMode::MaxSlope => &self.take_max,
        };
        let mut chosen = vec![false; self.n];
        let mut r = row;
        for k in (0..self.n).rev() {
            if takes[k * self.rows + r] {
                chosen[k] = true;
                r = self.sources[k][r].expect("take edge has a source") as usize;
            }
        }
        debug_assert_eq!(r, 0);
        Some(chosen)
    }

    pub fn path_solution(&self, instance: &ParametricInstance, row: usize, mode: SlopeMode) -> Option<KnapsackSolution> {
        self.path(row, mode).map(|c| instance.solution(c).expect("length n"))
    }

    pub fn path_form(&self, instance: &ParametricInstance, row: usize, mode: SlopeMode) -> Option<AffineForm> {
        self.path(row, mode).map(|c| instance.weight_of(&c).expect("length n"))
    }
}

/// Scans rows from the top; the first row whose shortest path fits gives
/// the answer, reported with its true (unscaled) profit.
pub fn best_profit_at(table: &DpTable, instance: &ParametricInstance) -> (i64, KnapsackSolution) {
    for row in (0..table.rows()).rev() {
        if table.cmp_capacity(row).is_some_and(|o| o != Ordering::Greater) {
            let sol = table.path_solution(instance, row, SlopeMode::MinSlope).expect("reachable");
            return (sol.profit, sol);
        }
    }
    (0, instance.empty_solution())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::*;
    use crate::instance::Item;
    use crate::oracle::exact_opt_at;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e2_scaled() -> ProfitGrid {
        let g = scale_profits(&e2(), 4, &q("1/2")).unwrap();
        assert_eq!(g.scaled_profits().unwrap(), &[4, 3]);
        g
    }

    #[test]
    fn scale_examples() {
        let g = e2_scaled();
        assert_eq!(g.rows(), 9);
        let g = scale_profits(&e2(), 7, &q("1/2")).unwrap();
        assert_eq!(g.scaled_profits().unwrap(), &[2, 1]);
        assert_eq!(g.rows(), 9);
        let g = scale_profits(&e2(), 1000, &q("1/2")).unwrap();
        assert_eq!(g.scaled_profits().unwrap(), &[0, 0]);
        assert!(matches!(scale_profits(&e2(), 0, &q("1/2")), Err(Error::ZeroApproxProfit)));
        assert!(scale_profits(&e2(), 3, &q("1")).is_err());
        assert!(scale_profits(&e2(), 3, &q("0")).is_err());
    }

    #[test]
    fn implicit_grid_examples() {
        let g = build_profit_grid_implicit(7, &q("1/2"), 2).unwrap();
        assert!(matches!(g.kind(), GridKind::Implicit { max_index: 10, .. }));
        assert_eq!(g.rows(), 12);
        assert_eq!(g.round_up(&q("3")), Some(g.row_of_index(6)));
        assert_eq!(g.round_up(&q("-1")), Some(0));
        assert_eq!(g.round_up(&q("1")), Some(g.row_of_index(0)));
        assert_eq!(g.round_up(&q("50")), None);

        let g = build_profit_grid_implicit(1, &q("1/2"), 3).unwrap();
        assert!(matches!(g.kind(), GridKind::Implicit { max_index: 0, .. }));
        assert_eq!(g.rows(), 2);
    }

    #[test]
    fn implicit_thresholds_are_ceilings() {
        let g = build_profit_grid_implicit(7, &q("1/2"), 2).unwrap();
        // ⌈1.5^{i/2}⌉ for i = 0..=10
        let expect = [0, 1, 2, 2, 2, 3, 3, 4, 5, 6, 7, 8];
        assert_eq!(g.thresholds, expect);
    }

    #[test]
    fn explicit_table_examples() {
        let inst = e2();
        let g = e2_scaled();
        let t = dp_min_weight_at_full(&inst, &g, &q("0"));
        assert_eq!(t.value(7), Some(q("3")));
        assert_eq!(t.path(7, SlopeMode::MinSlope), Some(vec![true, true]));
        assert_eq!(t.value(4), Some(q("1")));
        assert_eq!(t.path(4, SlopeMode::MinSlope), Some(vec![true, false]));
        assert_eq!(t.value(8), None);
        assert_eq!(t.value(0), Some(q("0")));
        assert_eq!(t.path(0, SlopeMode::MaxSlope), Some(vec![false, false]));
        assert_eq!(t.value_at_layer(0, 0), Some(q("0")));
        assert_eq!(t.value_at_layer(0, 3), None);
    }

    #[test]
    fn implicit_table_example() {
        let inst = e2();
        let g = ProfitGrid::implicit(&inst, &q("1/2")).unwrap();
        let t = dp_min_weight_at(&inst, &g, &q("0"));
        let row = g.row_of_index(9);
        assert_eq!(t.value(row), Some(q("3")));
        assert_eq!(t.path(row, SlopeMode::MinSlope), Some(vec![true, true]));
    }

    #[test]
    fn best_profit_examples() {
        let inst = e2();
        let g = e2_scaled();
        let (p, s) = best_profit_at(&dp_min_weight_at(&inst, &g, &q("0")), &inst);
        assert_eq!((p, s.indices()), (7, vec![0, 1]));
        let (p, s) = best_profit_at(&dp_min_weight_at(&inst, &g, &q("5/4")), &inst);
        assert_eq!((p, s.indices()), (4, vec![0]));
        let nonneg = ParametricInstance::new(vec![Item::new(2, 1, 0), Item::new(3, 2, 1)], 100).unwrap();
        let g = ProfitGrid::unscaled(&nonneg);
        let (p, s) = best_profit_at(&dp_min_weight_at(&nonneg, &g, &q("3")), &nonneg);
        assert_eq!((p, s.indices()), (5, vec![0, 1]));
    }

    /// Brute-force: for every subset landing on `row`, its weight form.
    fn paths_into(inst: &ParametricInstance, grid: &ProfitGrid, row: usize) -> Vec<(Vec<bool>, AffineForm)> {
        let n = inst.len();
        (0..1u32 << n)
            .filter_map(|m| {
                let chosen: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
                // walk the DAG backwards: subset lands on `row` iff the
                // take-edge chain from `row` ends at row 0
                let mut r = row;
                for k in (0..n).rev() {
                    if chosen[k] {
                        r = grid.sources[k][r]? as usize;
                    }
                }
                (r == 0).then(|| {
                    let f = inst.weight_of(&chosen).unwrap();
                    (chosen, f)
                })
            })
            .collect()
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> ParametricInstance {
        let items = (0..n)
            .map(|_| Item::new(rng.gen_range(1..=20), rng.gen_range(-10..=10), rng.gen_range(-10..=10)))
            .collect();
        ParametricInstance::new(items, rng.gen_range(0..=50)).unwrap()
    }

    #[test]
    fn slopes_match_path_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..40 {
            let n = rng.gen_range(1..=6);
            let inst = random_instance(&mut rng, n);
            let grid = if trial % 2 == 0 {
                ProfitGrid::unscaled(&inst)
            } else {
                ProfitGrid::implicit(&inst, &q("1/3")).unwrap()
            };
            for _ in 0..4 {
                let lambda = Rational::new(rng.gen_range(-30..30), rng.gen_range(1..4));
                let t = dp_min_weight_at(&inst, &grid, &lambda);
                for row in 0..grid.rows() {
                    let paths = paths_into(&inst, &grid, row);
                    let best = paths.iter().map(|(_, f)| f.eval(&lambda)).min();
                    assert_eq!(t.value(row), best);
                    let Some(best) = best else { continue };
                    let active: Vec<&Rational> =
                        paths.iter().filter(|(_, f)| f.eval(&lambda) == best).map(|(_, f)| &f.slope).collect();
                    let lo = active.iter().min().unwrap().to_i64().unwrap() as i128;
                    let hi = active.iter().max().unwrap().to_i64().unwrap() as i128;
                    assert_eq!(t.slope(row, SlopeMode::MinSlope), Some(lo));
                    assert_eq!(t.slope(row, SlopeMode::MaxSlope), Some(hi));
                    for mode in [SlopeMode::MinSlope, SlopeMode::MaxSlope] {
                        let f = t.path_form(&inst, row, mode).unwrap();
                        assert_eq!(f.eval(&lambda), best);
                        assert_eq!(f.slope.to_i64().unwrap() as i128, t.slope(row, mode).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn unscaled_dp_equals_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let n = rng.gen_range(1..=7);
            let inst = random_instance(&mut rng, n);
            let grid = ProfitGrid::unscaled(&inst);
            for _ in 0..10 {
                let lambda = Rational::new(rng.gen_range(-60..60), rng.gen_range(1..7));
                let t = dp_min_weight_at_full(&inst, &grid, &lambda);
                assert_eq!(best_profit_at(&t, &inst).0, exact_opt_at(&inst, &lambda).unwrap().0);
                assert_eq!(t.value(0), Some(Rational::zero()).min(t.value(0)));
                for k in 1..=n {
                    for row in 0..grid.rows() {
                        if let Some(prev) = t.value_at_layer(k - 1, row) {
                            assert!(t.value_at_layer(k, row).unwrap() <= prev);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn big_integer_path_agrees_with_small() {
        let inst = ParametricInstance::new(
            vec![Item::new(3, i64::MAX / 4, -5), Item::new(2, -(i64::MAX / 4), 7), Item::new(4, 9, 1)],
            20,
        )
        .unwrap();
        let grid = ProfitGrid::unscaled(&inst);
        let lambda = Rational::new(BigInt::from(i64::MAX) * 3 + 1, BigInt::from(i64::MAX) * 2 - 5);
        let t = dp_min_weight_at(&inst, &grid, &lambda);
        assert!(matches!(t.values, Values::Big(_)));
        assert_eq!(best_profit_at(&t, &inst).0, exact_opt_at(&inst, &lambda).unwrap().0);
    }
}
