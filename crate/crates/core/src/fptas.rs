//! End-to-end approximation schemes.
//!
//! The explicit variant splits ℝ into the cells of the greedy partition,
//! rescales profits by each cell's greedy value and searches every scaled
//! profit row inside the cell. The implicit variant uses one geometric
//! profit grid for the whole line. Both end by [`assemble`].

use num_traits::Zero;

use crate::dp::{check_epsilon, scale_profits, ProfitGrid};
use crate::error::{Error, Result};
use crate::feasibility::{FeasibilitySearch, Piece};
use crate::greedy::{greedy_partition_with, GreedyPartition};
use crate::instance::{cells_at, KnapsackSolution, ParametricInstance, SolutionPartition};
use crate::numeric::{ClosedInterval, ExtRational, Rational};
use crate::oracle::{exact_profit_function, sample_points};
use crate::par::{self, ExecMode};

#[derive(Clone, Debug)]
pub struct FptasOutput {
    pub partition: SolutionPartition,
    /// Cells of the greedy partition (explicit variant; 1 otherwise).
    pub greedy_cells: usize,
    /// Rows of the profit grid: `P̃+1` explicit, `|S|+1` implicit (the
    /// extra implicit row is profit 0).
    pub grid_rows: usize,
    /// Candidate pieces handed to [`assemble`].
    pub candidates: usize,
}

impl FptasOutput {
    /// The polynomial output-size bound for the variant that produced it.
    pub fn cell_cap(&self, variant: Variant) -> usize {
        match variant {
            Variant::Explicit => self.greedy_cells * (2 * self.grid_rows + 1),
            Variant::Implicit => 2 * (self.grid_rows - 1) + 1,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Variant {
    Explicit,
    Implicit,
}

pub fn fptas_explicit(instance: &ParametricInstance, eps: &Rational) -> Result<SolutionPartition> {
    Ok(fptas_explicit_with(instance, eps, ExecMode::default())?.partition)
}

pub fn fptas_implicit(instance: &ParametricInstance, eps: &Rational) -> Result<SolutionPartition> {
    Ok(fptas_implicit_with(instance, eps, ExecMode::default())?.partition)
}

pub fn fptas_with(instance: &ParametricInstance, eps: &Rational, variant: Variant, mode: ExecMode) -> Result<FptasOutput> {
    match variant {
        Variant::Explicit => fptas_explicit_with(instance, eps, mode),
        Variant::Implicit => fptas_implicit_with(instance, eps, mode),
    }
}

fn trivial(instance: &ParametricInstance) -> FptasOutput {
    FptasOutput {
        partition: SolutionPartition::single(instance.empty_solution()),
        greedy_cells: 1,
        grid_rows: 1,
        candidates: 0,
    }
}

pub fn fptas_explicit_with(instance: &ParametricInstance, eps: &Rational, mode: ExecMode) -> Result<FptasOutput> {
    check_epsilon(eps)?;
    if instance.is_empty() {
        return Ok(trivial(instance));
    }
    let greedy = greedy_partition_with(instance, mode);
    let cells = greedy.cells().len();
    let per_cell = |j: usize| -> Result<(usize, Vec<Piece>)> { explicit_cell(instance, eps, &greedy, j, mode) };
    let results = par::map_range(mode, cells, per_cell);
    let mut candidates = Vec::new();
    let mut grid_rows = 1;
    for r in results {
        let (rows, pieces) = r?;
        grid_rows = grid_rows.max(rows);
        candidates.extend(pieces);
    }
    let count = candidates.len();
    Ok(FptasOutput { partition: assemble(instance, candidates), greedy_cells: cells, grid_rows, candidates: count })
}

fn explicit_cell(
    instance: &ParametricInstance,
    eps: &Rational,
    greedy: &GreedyPartition,
    j: usize,
    mode: ExecMode,
) -> Result<(usize, Vec<Piece>)> {
    let window = greedy.partition.cell_interval(j);
    let approx = greedy.cells()[j].profit;
    if approx == 0 {
        return Ok((1, vec![(window, instance.empty_solution())]));
    }
    let mut grid = scale_profits(instance, approx, eps)?;
    if !weights_nonnegative_on(instance, &window) {
        // p* ≤ 2·p^A may fail here, so keep every reachable scaled row
        let scaled = grid.scaled_profits().expect("explicit grid").to_vec();
        let reach: i64 = scaled.iter().sum();
        let cap = (grid.rows() as i64 - 1).max(reach);
        grid = ProfitGrid::explicit(scaled, cap);
    }
    let search = FeasibilitySearch::new(instance, &grid)?;
    let pieces = search.all_pieces_within(&window, mode)?;
    Ok((grid.rows(), pieces))
}

/// Every item weight is `≥ 0` on the whole interval (checked at its ends).
fn weights_nonnegative_on(instance: &ParametricInstance, window: &ClosedInterval) -> bool {
    instance.items().iter().all(|it| {
        let w = it.weight();
        let ok = |end: &ExtRational, toward_pos: bool| match end {
            ExtRational::Finite(x) => !w.eval(x).is_negative(),
            _ => match w.slope.signum() {
                std::cmp::Ordering::Equal => !w.intercept.is_negative(),
                std::cmp::Ordering::Greater => toward_pos,
                std::cmp::Ordering::Less => !toward_pos,
            },
        };
        ok(&window.lo, false) && ok(&window.hi, true)
    })
}

pub fn fptas_implicit_with(instance: &ParametricInstance, eps: &Rational, mode: ExecMode) -> Result<FptasOutput> {
    check_epsilon(eps)?;
    if instance.is_empty() {
        return Ok(trivial(instance));
    }
    let grid = ProfitGrid::implicit(instance, eps)?;
    let search = FeasibilitySearch::new(instance, &grid)?;
    let candidates = search.all_pieces_within(&ClosedInterval::whole_line(), mode)?;
    let count = candidates.len();
    Ok(FptasOutput { partition: assemble(instance, candidates), greedy_cells: 1, grid_rows: grid.rows(), candidates: count })
}

/// Cuts ℝ at every finite candidate endpoint and gives each cell the most
/// profitable candidate covering it (ties: lexicographically smallest
/// chosen-vector). Uncovered cells get the empty solution; equal
/// neighbours are merged.
pub fn assemble(instance: &ParametricInstance, mut candidates: Vec<Piece>) -> SolutionPartition {
    let mut cuts: Vec<Rational> = candidates
        .iter()
        .flat_map(|(iv, _)| [iv.lo.finite().cloned(), iv.hi.finite().cloned()])
        .flatten()
        .collect();
    cuts.sort();
    cuts.dedup();
    let cells = cuts.len() + 1;
    candidates.sort_by(|a, b| b.1.profit.cmp(&a.1.profit).then_with(|| a.1.lex_cmp(&b.1)));

    // next[j]: smallest unpainted cell ≥ j (path-halving union-find)
    let mut next: Vec<usize> = (0..=cells).collect();
    fn find(next: &mut [usize], mut j: usize) -> usize {
        while next[j] != j {
            next[j] = next[next[j]];
            j = next[j];
        }
        j
    }
    let mut painted: Vec<Option<usize>> = vec![None; cells];
    for (c, (iv, _)) in candidates.iter().enumerate() {
        // cells [first, last] lie inside iv
        let first = match &iv.lo {
            ExtRational::Finite(x) => cuts.binary_search(x).expect("endpoint is a cut") + 1,
            _ => 0,
        };
        let last = match &iv.hi {
            ExtRational::Finite(x) => cuts.binary_search(x).expect("endpoint is a cut"),
            _ => cells - 1,
        };
        if first > last {
            continue;
        }
        let mut j = find(&mut next, first);
        while j <= last {
            painted[j] = Some(c);
            next[j] = j + 1;
            j = find(&mut next, j + 1);
        }
    }

    let empty = instance.empty_solution();
    let mut breakpoints = Vec::new();
    let mut out: Vec<KnapsackSolution> = Vec::new();
    for (j, p) in painted.into_iter().enumerate() {
        let sol = p.map_or(&empty, |c| &candidates[c].1);
        match out.last() {
            Some(prev) if prev == sol => {}
            Some(_) => {
                breakpoints.push(cuts[j - 1].clone());
                out.push(sol.clone());
            }
            None => out.push(sol.clone()),
        }
    }
    SolutionPartition { breakpoints, cells: out }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerifyReport {
    pub pass: bool,
    /// Smallest `profit/p*` over samples with `p* > 0` (1 if none).
    pub worst_ratio: Rational,
    pub worst_lambda: Option<Rational>,
    /// Cell of the partition containing the worst sample.
    pub max_gap_cell: Option<usize>,
    pub samples: usize,
}

/// Compares `partition` with the exact optimum at all breakpoints of both,
/// the midpoints between them and one point beyond each end.
pub fn verify_partition(instance: &ParametricInstance, partition: &SolutionPartition, eps: &Rational) -> Result<VerifyReport> {
    check_epsilon(eps)?;
    partition.validate(instance)?;
    let exact = exact_profit_function(instance)?;
    let samples = sample_points([partition.breakpoints.as_slice(), exact.breakpoints.as_slice()]);
    let keep = Rational::one() - eps;
    let mut report = VerifyReport {
        pass: true,
        worst_ratio: Rational::one(),
        worst_lambda: None,
        max_gap_cell: None,
        samples: samples.len(),
    };
    for x in &samples {
        let opt = exact.value_at(x);
        let got = partition.profit_at(x);
        if got > opt {
            return Err(Error::Contract(format!("partition reports {got} above the optimum {opt} at {x}")));
        }
        if opt.is_zero() {
            continue;
        }
        let ratio = Rational::new(got, opt);
        if ratio < keep {
            report.pass = false;
        }
        if ratio < report.worst_ratio {
            report.worst_ratio = ratio;
            report.max_gap_cell = Some(cells_at(&partition.breakpoints, x).0);
            report.worst_lambda = Some(x.clone());
        }
    }
    Ok(report)
}
