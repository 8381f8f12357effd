//! Where is profit row `p` attainable? `ω(λ)`, the DP value of the row, is
//! concave and piecewise linear, so `{λ : ω(λ) ≤ W}` is empty, all of ℝ,
//! or the union of a left ray `(−∞, λ₁]` and a right ray `[λ₂, ∞)`.
//!
//! Crossings are bracketed on the grid `δ = 1/(2n²M²)` inside
//! `[−(n+1)M, (n+1)M]`. Distinct critical values are at least `2δ` apart,
//! so once a bracket contains no interior grid point the shortest path at
//! its feasible end is still shortest at the crossing, and the crossing is
//! recovered exactly from that path's affine weight. Tangent steps are
//! interleaved with bisection; by concavity a tangent step from the
//! feasible side never overshoots, so it only ever tightens the bracket.

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::dp::{dp_min_weight_at, DpTable, ProfitGrid, SlopeMode};
use crate::error::{Error, Result};
use crate::instance::{KnapsackSolution, ParametricInstance};
use crate::numeric::{ClosedInterval, ExtRational, Rational};
use crate::par::{self, ExecMode};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Side {
    /// Searching `λ₁`, the right end of the left ray.
    Left,
    /// Searching `λ₂`, the left end of the right ray.
    Right,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Classification {
    TooSmall,
    TooLarge,
    Exact,
    /// `ω ≤ W` at a maximizer of `ω`: the row is feasible everywhere.
    Degenerate,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FeasibilityResult {
    /// Feasible for every λ. `left` is feasible on `(−∞, split]`, `right`
    /// on `[split, ∞)`.
    AlwaysFeasible { split: Rational, left: KnapsackSolution, right: KnapsackSolution },
    NeverFeasible,
    Rays { left: Option<(Rational, KnapsackSolution)>, right: Option<(Rational, KnapsackSolution)> },
}

/// A candidate produced by the search: `solution` is feasible on `interval`.
pub type Piece = (ClosedInterval, KnapsackSolution);

/// Shared state for all searches against one instance and grid.
pub struct FeasibilitySearch<'a> {
    instance: &'a ParametricInstance,
    grid: &'a ProfitGrid,
    capacity: Rational,
    range: Rational,
    grid_den: BigInt,
}

/// DP tables at the two probe points of a window. Infinite window ends
/// are probed at `∓(n+1)M`, beyond which every `ω` is affine.
pub struct WindowProbes {
    window: ClosedInterval,
    lo: (Rational, DpTable),
    hi: (Rational, DpTable),
}

enum Outcome {
    Empty,
    /// Feasible on the whole window: `left` up to `split`, `right` from it.
    Whole { split: Rational, left: KnapsackSolution, right: KnapsackSolution },
    Parts { left: Option<(Rational, KnapsackSolution)>, right: Option<(Rational, KnapsackSolution)> },
}

impl<'a> FeasibilitySearch<'a> {
    pub fn new(instance: &'a ParametricInstance, grid: &'a ProfitGrid) -> Result<Self> {
        let m = instance.search_magnitude()?;
        let n = instance.len() as i64;
        let range = Rational::from_integer((n + 1) * m);
        let grid_den = BigInt::from(2) * BigInt::from(n) * BigInt::from(n) * BigInt::from(m) * BigInt::from(m);
        Ok(FeasibilitySearch { instance, grid, capacity: instance.capacity_q(), range, grid_den })
    }

    /// `(n+1)M`.
    pub fn range(&self) -> &Rational {
        &self.range
    }

    pub fn delta(&self) -> Rational {
        Rational::new(1, self.grid_den.clone())
    }

    pub fn probe(&self, lambda: &Rational) -> DpTable {
        dp_min_weight_at(self.instance, self.grid, lambda)
    }

    pub fn classify(&self, table: &DpTable, row: usize, side: Side) -> Option<Classification> {
        let cmp = table.cmp_capacity(row)?;
        let smin = table.slope(row, SlopeMode::MinSlope)?;
        let smax = table.slope(row, SlopeMode::MaxSlope)?;
        Some(classify_raw(cmp, smin, smax, side))
    }

    /// Smallest grid point strictly inside `(lo, hi)` nearest to the midpoint.
    fn grid_mid(&self, lo: &Rational, hi: &Rational) -> Option<Rational> {
        let d = Rational::from_integer(self.grid_den.clone());
        let mut j = (lo.midpoint(hi) * &d).floor();
        let mut mid = Rational::new(j.clone(), self.grid_den.clone());
        if mid <= *lo {
            j += 1;
            mid = Rational::new(j, self.grid_den.clone());
        }
        (mid < *hi).then_some(mid)
    }

    fn probe_point(&self, end: &ExtRational) -> Rational {
        match end {
            ExtRational::NegInf => -self.range.clone(),
            ExtRational::PosInf => self.range.clone(),
            ExtRational::Finite(x) => x.clone(),
        }
    }

    pub fn window_probes(&self, window: &ClosedInterval) -> WindowProbes {
        let lo = self.probe_point(&window.lo);
        let hi = self.probe_point(&window.hi);
        let lo_t = self.probe(&lo);
        let hi_t = if hi == lo { lo_t.clone() } else { self.probe(&hi) };
        WindowProbes { window: window.clone(), lo: (lo, lo_t), hi: (hi, hi_t) }
    }

    /// Is the row feasible at the window end (in the limit for infinite ends)?
    fn end_feasible(&self, end: &ExtRational, table: &DpTable, row: usize) -> bool {
        let cmp = table.cmp_capacity(row).expect("reachable");
        match end {
            ExtRational::Finite(_) => cmp != Ordering::Greater,
            ExtRational::NegInf => {
                let s = table.slope(row, SlopeMode::MaxSlope).expect("reachable");
                s > 0 || (s == 0 && cmp != Ordering::Greater)
            }
            ExtRational::PosInf => {
                let s = table.slope(row, SlopeMode::MinSlope).expect("reachable");
                s < 0 || (s == 0 && cmp != Ordering::Greater)
            }
        }
    }

    fn solution(&self, table: &DpTable, row: usize, mode: SlopeMode) -> KnapsackSolution {
        table.path_solution(self.instance, row, mode).expect("reachable")
    }

    fn outcome(&self, probes: &WindowProbes, row: usize) -> Result<Outcome> {
        let (p0, t0) = (&probes.lo.0, &probes.lo.1);
        let (p1, t1) = (&probes.hi.0, &probes.hi.1);
        if row >= t0.rows() || !t0.reachable(row) {
            return Ok(Outcome::Empty);
        }
        let f0 = self.end_feasible(&probes.window.lo, t0, row);
        let f1 = self.end_feasible(&probes.window.hi, t1, row);
        match (f0, f1) {
            (false, false) => Ok(Outcome::Empty),
            (true, false) => {
                let hit = self.crossing(row, Side::Left, (p0.clone(), t0), (p1.clone(), t1))?;
                Ok(Outcome::Parts { left: Some(hit), right: None })
            }
            (false, true) => {
                let hit = self.crossing(row, Side::Right, (p0.clone(), t0), (p1.clone(), t1))?;
                Ok(Outcome::Parts { left: None, right: Some(hit) })
            }
            (true, true) => {
                let smin0 = t0.slope(row, SlopeMode::MinSlope).expect("reachable");
                let smax0 = t0.slope(row, SlopeMode::MaxSlope).expect("reachable");
                let smin1 = t1.slope(row, SlopeMode::MinSlope).expect("reachable");
                let smax1 = t1.slope(row, SlopeMode::MaxSlope).expect("reachable");
                // ω non-increasing across the window: its left end is the max
                if probes.window.lo.is_finite() && smin0 <= 0 || !probes.window.lo.is_finite() && smax0 <= 0 {
                    let mode = if probes.window.lo.is_finite() { SlopeMode::MinSlope } else { SlopeMode::MaxSlope };
                    let w = self.solution(t0, row, mode);
                    return Ok(Outcome::Whole { split: p0.clone(), left: w.clone(), right: w });
                }
                if probes.window.hi.is_finite() && smax1 >= 0 || !probes.window.hi.is_finite() && smin1 >= 0 {
                    let mode = if probes.window.hi.is_finite() { SlopeMode::MaxSlope } else { SlopeMode::MinSlope };
                    let w = self.solution(t1, row, mode);
                    return Ok(Outcome::Whole { split: p1.clone(), left: w.clone(), right: w });
                }
                let (x, tx) = self.maximizer(row, (p0.clone(), t0), (p1.clone(), t1))?;
                if tx.cmp_capacity(row).expect("reachable") != Ordering::Greater {
                    let left = self.solution(&tx, row, SlopeMode::MaxSlope);
                    let right = self.solution(&tx, row, SlopeMode::MinSlope);
                    return Ok(Outcome::Whole { split: x, left, right });
                }
                let l = self.crossing(row, Side::Left, (p0.clone(), t0), (x.clone(), &tx))?;
                let r = self.crossing(row, Side::Right, (x, &tx), (p1.clone(), t1))?;
                Ok(Outcome::Parts { left: Some(l), right: Some(r) })
            }
        }
    }

    /// A point of `[a, b]` where `ω` attains its maximum, given that `ω`
    /// strictly increases right of `a` and strictly decreases left of `b`.
    fn maximizer(&self, row: usize, a: (Rational, &DpTable), b: (Rational, &DpTable)) -> Result<(Rational, DpTable)> {
        let mut lo = a.0;
        let mut hi = b.0;
        let mut up = a.1.path_form(self.instance, row, SlopeMode::MinSlope).expect("reachable");
        let mut down = b.1.path_form(self.instance, row, SlopeMode::MaxSlope).expect("reachable");
        let mut step = 0u32;
        loop {
            // tangent lines sit above ω, so their intersection is strictly
            // inside (lo, hi); bisection steps bound the iteration count
            let meet = up.intersect(&down).expect("opposite slopes");
            let x = if step.is_multiple_of(2) { meet } else { self.grid_mid(&lo, &hi).unwrap_or(meet) };
            step += 1;
            let t = self.probe(&x);
            let smin = t.slope(row, SlopeMode::MinSlope).expect("reachable");
            let smax = t.slope(row, SlopeMode::MaxSlope).expect("reachable");
            if smin > 0 {
                up = t.path_form(self.instance, row, SlopeMode::MinSlope).expect("reachable");
                lo = x;
            } else if smax < 0 {
                down = t.path_form(self.instance, row, SlopeMode::MaxSlope).expect("reachable");
                hi = x;
            } else {
                return Ok((x, t));
            }
        }
    }

    /// Exact crossing of `ω` with `W` between `lo` and `hi`: for `Left`,
    /// `ω(lo) ≤ W` rising and `ω(hi) > W`; for `Right` mirrored.
    fn crossing(
        &self,
        row: usize,
        side: Side,
        lo: (Rational, &DpTable),
        hi: (Rational, &DpTable),
    ) -> Result<(Rational, KnapsackSolution)> {
        let (anchor_mode, anchor) = match side {
            Side::Left => (SlopeMode::MinSlope, &lo),
            Side::Right => (SlopeMode::MaxSlope, &hi),
        };
        match self.classify(anchor.1, row, side) {
            Some(Classification::Exact) => {
                return Ok((anchor.0.clone(), self.solution(anchor.1, row, anchor_mode)));
            }
            Some(Classification::TooSmall) if side == Side::Left => {}
            Some(Classification::TooLarge) if side == Side::Right => {}
            other => return Err(Error::Contract(format!("bad crossing anchor: {other:?}"))),
        }
        let mut witness = self.solution(anchor.1, row, anchor_mode);
        let mut lo_l = lo.0;
        let mut hi_l = hi.0;
        let recover = |w: &KnapsackSolution| -> Result<Rational> {
            w.weight
                .solve_for(&self.capacity)
                .ok_or_else(|| Error::Contract("crossing witness has zero slope".into()))
        };
        loop {
            // tangent step from the feasible side
            let root = recover(&witness)?;
            let tangent = (lo_l < root && root < hi_l).then_some(root);
            if let Some(x) = tangent {
                let t = self.probe(&x);
                match self.classify(&t, row, side).expect("reachable") {
                    Classification::Exact => return Ok((x, self.solution(&t, row, anchor_mode))),
                    Classification::TooSmall => {
                        if side == Side::Left {
                            witness = self.solution(&t, row, anchor_mode);
                        }
                        lo_l = x;
                    }
                    Classification::TooLarge => {
                        if side == Side::Right {
                            witness = self.solution(&t, row, anchor_mode);
                        }
                        hi_l = x;
                    }
                    Classification::Degenerate => return Err(Error::Contract("degenerate row inside bracket".into())),
                }
            }
            let Some(mid) = self.grid_mid(&lo_l, &hi_l) else { break };
            let t = self.probe(&mid);
            match self.classify(&t, row, side).expect("reachable") {
                Classification::Exact => return Ok((mid, self.solution(&t, row, anchor_mode))),
                Classification::TooSmall => {
                    if side == Side::Left {
                        witness = self.solution(&t, row, anchor_mode);
                    }
                    lo_l = mid;
                }
                Classification::TooLarge => {
                    if side == Side::Right {
                        witness = self.solution(&t, row, anchor_mode);
                    }
                    hi_l = mid;
                }
                Classification::Degenerate => return Err(Error::Contract("degenerate row inside bracket".into())),
            }
        }
        let lambda = recover(&witness)?;
        Ok((lambda, witness))
    }

    /// Feasible pieces of one row inside the probed window.
    pub fn pieces_within(&self, probes: &WindowProbes, row: usize) -> Result<Vec<Piece>> {
        let w = &probes.window;
        let clip = |iv: ClosedInterval| iv.intersect(w);
        Ok(match self.outcome(probes, row)? {
            Outcome::Empty => Vec::new(),
            Outcome::Whole { split, left, right } => {
                if left == right {
                    vec![(w.clone(), left)]
                } else {
                    let mut out = Vec::new();
                    if let Some(iv) = clip(ClosedInterval::left_ray(split.clone())) {
                        out.push((iv, left));
                    }
                    if let Some(iv) = clip(ClosedInterval::right_ray(split)) {
                        out.push((iv, right));
                    }
                    out
                }
            }
            Outcome::Parts { left, right } => {
                let mut out = Vec::new();
                if let Some((l, s)) = left {
                    if let Some(iv) = clip(ClosedInterval::left_ray(l)) {
                        out.push((iv, s));
                    }
                }
                if let Some((r, s)) = right {
                    if let Some(iv) = clip(ClosedInterval::right_ray(r)) {
                        out.push((iv, s));
                    }
                }
                out
            }
        })
    }

    /// Feasible pieces of every row inside `window`, ordered by row.
    pub fn all_pieces_within(&self, window: &ClosedInterval, mode: ExecMode) -> Result<Vec<Piece>> {
        let probes = self.window_probes(window);
        let per_row = par::map_range(mode, self.grid.rows(), |row| self.pieces_within(&probes, row));
        let mut out = Vec::new();
        for pieces in per_row {
            out.extend(pieces?);
        }
        Ok(out)
    }

    pub fn intervals(&self, row: usize) -> Result<FeasibilityResult> {
        let probes = self.window_probes(&ClosedInterval::whole_line());
        Ok(match self.outcome(&probes, row)? {
            Outcome::Empty => FeasibilityResult::NeverFeasible,
            Outcome::Whole { split, left, right } => FeasibilityResult::AlwaysFeasible { split, left, right },
            Outcome::Parts { left, right } => FeasibilityResult::Rays { left, right },
        })
    }
}

fn classify_raw(cmp: Ordering, smin: i128, smax: i128, side: Side) -> Classification {
    use Classification::*;
    match side {
        Side::Left => {
            if cmp == Ordering::Greater {
                TooLarge
            } else if smin > 0 {
                if cmp == Ordering::Equal {
                    Exact
                } else {
                    TooSmall
                }
            } else if smax < 0 {
                TooLarge
            } else {
                Degenerate
            }
        }
        Side::Right => {
            if cmp == Ordering::Greater {
                TooSmall
            } else if smax < 0 {
                if cmp == Ordering::Equal {
                    Exact
                } else {
                    TooLarge
                }
            } else if smin > 0 {
                TooSmall
            } else {
                Degenerate
            }
        }
    }
}

/// Where `λ` lies relative to the crossing searched on `side`; `None` for
/// an unreachable row.
pub fn classify_lambda(
    instance: &ParametricInstance,
    grid: &ProfitGrid,
    row: usize,
    lambda: &Rational,
    side: Side,
) -> Option<Classification> {
    if row >= grid.rows() {
        return None;
    }
    let t = dp_min_weight_at(instance, grid, lambda);
    let cmp = t.cmp_capacity(row)?;
    Some(classify_raw(cmp, t.slope(row, SlopeMode::MinSlope)?, t.slope(row, SlopeMode::MaxSlope)?, side))
}

pub fn feasibility_intervals(instance: &ParametricInstance, grid: &ProfitGrid, row: usize) -> Result<FeasibilityResult> {
    FeasibilitySearch::new(instance, grid)?.intervals(row)
}

/// The ray endpoint on `side`, if the row has a proper crossing there.
pub fn find_crossing(
    instance: &ParametricInstance,
    grid: &ProfitGrid,
    row: usize,
    side: Side,
) -> Result<Option<(Rational, KnapsackSolution)>> {
    Ok(match feasibility_intervals(instance, grid, row)? {
        FeasibilityResult::Rays { left, right } => match side {
            Side::Left => left,
            Side::Right => right,
        },
        _ => None,
    })
}
