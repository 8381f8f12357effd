//! Parametric ½-approximation: the ratio-greedy knapsack heuristic at a
//! single λ, and the partition of the λ-axis into cells on which its
//! output is constant.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::instance::{KnapsackSolution, ParametricInstance, SolutionPartition};
use crate::numeric::{AffineForm, ExtRational, Rational};
use crate::par::{self, ExecMode};

/// A partition on whose cells the greedy output (and hence `p^A`) is
/// constant. Cell solutions are the greedy solutions; their profits are
/// the `p^A` values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GreedyPartition {
    pub partition: SolutionPartition,
    /// Number of raw events enumerated before sorting and merging.
    pub event_count: usize,
}

impl GreedyPartition {
    pub fn breakpoints(&self) -> &[Rational] {
        &self.partition.breakpoints
    }

    pub fn cells(&self) -> &[KnapsackSolution] {
        &self.partition.cells
    }

    pub fn approx_profits(&self) -> Vec<i64> {
        self.partition.cells.iter().map(|c| c.profit).collect()
    }

    /// `n(n−1)/2 + (n(n−1)/2 + 1)·n + 2n`: pairwise intersections, one
    /// prefix root per prefix per ordering cell, and item roots.
    pub fn event_cap(n: usize) -> usize {
        let pairs = n * n.saturating_sub(1) / 2;
        pairs + (pairs + 1) * n + 2 * n
    }
}

/// `f_i(λ) = w_i(λ)/p_i`.
pub fn ratio_functions(instance: &ParametricInstance) -> Vec<AffineForm> {
    instance
        .items()
        .iter()
        .map(|it| {
            let p = Rational::from_integer(it.profit);
            AffineForm::new(Rational::from_integer(it.weight_intercept) / &p, Rational::from_integer(it.weight_slope) / &p)
        })
        .collect()
}

/// Greedy at a fixed λ: sort by ratio (ties by index), take item `i` iff
/// the prefix sum through `i` fits, then compare with the best single
/// fitting item. Ties favour the prefix solution.
pub fn greedy_at(instance: &ParametricInstance, lambda: &Rational) -> (i64, KnapsackSolution) {
    let ratios = ratio_functions(instance);
    let vals: Vec<Rational> = ratios.iter().map(|f| f.eval(lambda)).collect();
    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by(|&i, &j| vals[i].cmp(&vals[j]).then(i.cmp(&j)));
    let weights: Vec<Rational> = instance.items().iter().map(|it| it.weight_at(lambda)).collect();
    let cap = instance.capacity_q();
    let fits = |w: &Rational| *w <= cap;
    greedy_from(instance, &order, &weights, fits)
}

fn greedy_from<W>(
    instance: &ParametricInstance,
    order: &[usize],
    weights: &[W],
    fits: impl Fn(&W) -> bool,
) -> (i64, KnapsackSolution)
where
    W: Clone + for<'a> std::ops::Add<&'a W, Output = W>,
{
    let n = instance.len();
    let mut chosen = vec![false; n];
    let mut sum: Option<W> = None;
    for &i in order {
        let s = match sum.take() {
            None => weights[i].clone(),
            Some(s) => s + &weights[i],
        };
        if fits(&s) {
            chosen[i] = true;
        }
        sum = Some(s);
    }
    let prefix = instance.solution(chosen).expect("length n");
    let single = (0..n)
        .filter(|&i| fits(&weights[i]))
        .max_by_key(|&i| (instance.items()[i].profit, Reverse(i)));
    match single {
        Some(i) if instance.items()[i].profit > prefix.profit => {
            let s = instance.solution_from_indices(&[i]).expect("index in range");
            (s.profit, s)
        }
        _ => (prefix.profit, prefix),
    }
}

/// One interior sample per cell of a sorted breakpoint list.
pub(crate) fn interior_samples(breakpoints: &[Rational]) -> Vec<Rational> {
    let one = Rational::one();
    match (breakpoints.first(), breakpoints.last()) {
        (Some(lo), Some(hi)) => std::iter::once(lo - &one)
            .chain(breakpoints.windows(2).map(|w| w[0].midpoint(&w[1])))
            .chain(std::iter::once(hi + &one))
            .collect(),
        _ => vec![Rational::zero()],
    }
}

/// Evaluates `solver` at one interior point per cell and merges adjacent
/// cells with identical output.
fn partition_from_events(
    events: Vec<Rational>,
    mode: ExecMode,
    solver: impl Fn(&Rational) -> KnapsackSolution + Sync + Send,
) -> SolutionPartition {
    let mut events = events;
    events.sort();
    events.dedup();
    let samples = interior_samples(&events);
    let outputs = par::map(mode, &samples, |x| solver(x));
    let mut breakpoints = Vec::new();
    let mut cells: Vec<KnapsackSolution> = Vec::new();
    for (j, sol) in outputs.into_iter().enumerate() {
        match cells.last() {
            Some(prev) if *prev == sol => {}
            Some(_) => {
                breakpoints.push(events[j - 1].clone());
                cells.push(sol);
            }
            None => cells.push(sol),
        }
    }
    SolutionPartition { breakpoints, cells }
}

/// Baseline construction by event enumeration: all pairwise ratio
/// intersections, the prefix-sum roots inside every cell of constant
/// ordering, and every single-item root; then one greedy evaluation per
/// cell and a merge pass.
pub fn greedy_partition(instance: &ParametricInstance) -> GreedyPartition {
    greedy_partition_with(instance, ExecMode::default())
}

pub fn greedy_partition_with(instance: &ParametricInstance, mode: ExecMode) -> GreedyPartition {
    let solve = |x: &Rational| greedy_at(instance, x).1;
    if instance.items().iter().all(|it| it.weight_slope == 0) {
        return GreedyPartition { partition: SolutionPartition::single(solve(&Rational::zero())), event_count: 0 };
    }
    let ratios = ratio_functions(instance);
    let n = instance.len();
    let cap = instance.capacity_q();

    let mut swaps: Vec<Rational> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if let Some(x) = ratios[i].intersect(&ratios[j]) {
                swaps.push(x);
            }
        }
    }
    let mut events = swaps.clone();
    swaps.sort();
    swaps.dedup();

    let weights: Vec<AffineForm> = instance.items().iter().map(|it| it.weight()).collect();
    let ordering_samples = interior_samples(&swaps);
    let prefix_roots = par::map_range(mode, ordering_samples.len(), |c| {
        let x = &ordering_samples[c];
        let lo = if c == 0 { ExtRational::NegInf } else { swaps[c - 1].clone().into() };
        let hi = swaps.get(c).map_or(ExtRational::PosInf, |b| b.clone().into());
        let mut order: Vec<usize> = (0..n).collect();
        let vals: Vec<Rational> = ratios.iter().map(|f| f.eval(x)).collect();
        order.sort_by(|&i, &j| vals[i].cmp(&vals[j]).then(i.cmp(&j)));
        let mut sum = AffineForm::zero();
        let mut roots = Vec::new();
        for &i in &order {
            sum = &sum + &weights[i];
            if let Some(r) = sum.solve_for(&cap) {
                if lo <= r && hi >= r {
                    roots.push(r);
                }
            }
        }
        roots
    });
    events.extend(prefix_roots.into_iter().flatten());
    events.extend(weights.iter().filter_map(|w| w.solve_for(&cap)));
    let event_count = events.len();

    GreedyPartition { partition: partition_from_events(events, mode, solve), event_count }
}

/// Where the sweep currently stands: either left of everything, or just
/// to the right of a finite λ.
#[derive(Clone)]
enum SweepPos {
    NegInf,
    RightOf(Rational),
}

impl SweepPos {
    /// Compares two affine functions on an open interval immediately to
    /// the right of this position.
    fn cmp(&self, f: &AffineForm, g: &AffineForm) -> Ordering {
        match self {
            SweepPos::NegInf => g.slope.cmp(&f.slope).then_with(|| f.intercept.cmp(&g.intercept)),
            SweepPos::RightOf(x) => f.eval(x).cmp(&g.eval(x)).then_with(|| f.slope.cmp(&g.slope)),
        }
    }

    fn at_most(&self, f: &AffineForm, level: &Rational) -> bool {
        self.cmp(f, &AffineForm::new(level.clone(), Rational::zero())) != Ordering::Greater
    }

    fn is_before(&self, x: &Rational) -> bool {
        match self {
            SweepPos::NegInf => true,
            SweepPos::RightOf(c) => c < x,
        }
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct SwapEvent {
    at: Reverse<Rational>,
    lead: usize,
    trail: usize,
}

/// Left-to-right sweep over the arrangement of ratio functions. It keeps
/// the ratio order with adjacent exchanges (kinetic sorting), tracks the
/// greedy level `k` (prefix length that fits), and stops only at
/// exchange events, level changes of prefix `k`/`k+1`, and single-item
/// roots.
pub fn level_sweep_partition(instance: &ParametricInstance) -> GreedyPartition {
    let n = instance.len();
    if instance.items().iter().all(|it| it.weight_slope == 0) {
        return GreedyPartition {
            partition: SolutionPartition::single(greedy_at(instance, &Rational::zero()).1),
            event_count: 0,
        };
    }
    let ratios = ratio_functions(instance);
    let weights: Vec<AffineForm> = instance.items().iter().map(|it| it.weight()).collect();
    let cap = instance.capacity_q();

    let mut pos = SweepPos::NegInf;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| pos.cmp(&ratios[i], &ratios[j]).then(i.cmp(&j)));
    let mut rank = vec![0usize; n];
    for (k, &i) in order.iter().enumerate() {
        rank[i] = k;
    }

    let mut heap: BinaryHeap<SwapEvent> = BinaryHeap::new();
    let push_pair = |heap: &mut BinaryHeap<SwapEvent>, lead: usize, trail: usize| {
        if ratios[lead].slope > ratios[trail].slope {
            let x = ratios[lead].intersect(&ratios[trail]).expect("distinct slopes");
            heap.push(SwapEvent { at: Reverse(x), lead, trail });
        }
    };
    for w in order.windows(2) {
        push_pair(&mut heap, w[0], w[1]);
    }

    let mut item_roots: Vec<Rational> = weights.iter().filter_map(|w| w.solve_for(&cap)).collect();
    item_roots.sort();
    item_roots.dedup();
    let mut next_root = 0usize;

    let output = |pos: &SweepPos, order: &[usize]| {
        let fits = |w: &AffineForm| pos.at_most(w, &cap);
        greedy_from(instance, order, &weights, fits).1
    };
    let level_of = |pos: &SweepPos, order: &[usize]| {
        let mut sum = AffineForm::zero();
        let mut k = 0;
        for (idx, &i) in order.iter().enumerate() {
            sum = &sum + &weights[i];
            if pos.at_most(&sum, &cap) {
                k = idx + 1;
            }
        }
        k
    };

    let mut breakpoints = Vec::new();
    let mut cells = vec![output(&pos, &order)];
    let mut level = level_of(&pos, &order);
    let mut event_count = 0usize;

    loop {
        // Level events: prefix k leaving the knapsack, prefix k+1 entering.
        let prefix = |len: usize| {
            order[..len].iter().fold(AffineForm::zero(), |acc, &i| &acc + &weights[i])
        };
        let mut next: Option<Rational> = None;
        let mut consider = |x: Rational| {
            if pos.is_before(&x) && next.as_ref().is_none_or(|y| x < *y) {
                next = Some(x);
            }
        };
        if level > 0 {
            let f = prefix(level);
            if f.slope.is_positive() {
                consider(f.solve_for(&cap).expect("nonzero slope"));
            }
        }
        if level < n {
            let f = prefix(level + 1);
            if f.slope.is_negative() {
                consider(f.solve_for(&cap).expect("nonzero slope"));
            }
        }
        while next_root < item_roots.len() && !pos.is_before(&item_roots[next_root]) {
            next_root += 1;
        }
        if let Some(r) = item_roots.get(next_root) {
            consider(r.clone());
        }
        while heap.peek().is_some_and(|e| rank[e.trail] != rank[e.lead] + 1) {
            heap.pop();
        }
        if let Some(top) = heap.peek() {
            consider(top.at.0.clone());
        }
        let Some(at) = next else { break };
        event_count += 1;

        while heap.peek().is_some_and(|e| e.at.0 == at) {
            let e = heap.pop().expect("peeked");
            if rank[e.trail] != rank[e.lead] + 1 {
                continue;
            }
            let k = rank[e.lead];
            order.swap(k, k + 1);
            rank[e.lead] = k + 1;
            rank[e.trail] = k;
            if k > 0 {
                push_pair(&mut heap, order[k - 1], order[k]);
            }
            if k + 2 < n {
                push_pair(&mut heap, order[k + 1], order[k + 2]);
            }
        }
        pos = SweepPos::RightOf(at.clone());
        level = level_of(&pos, &order);
        let sol = output(&pos, &order);
        if cells.last() != Some(&sol) {
            breakpoints.push(at);
            cells.push(sol);
        }
    }

    GreedyPartition { partition: SolutionPartition { breakpoints, cells }, event_count }
}
