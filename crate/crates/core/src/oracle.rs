//! Brute-force ground truth for small instances: the optimal profit at a
//! single λ and the exact optimal step function `p*(λ)` over all of ℝ.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{
    cell_interval, cells_at, check_breakpoints, KnapsackSolution, ParametricInstance, SolutionPartition,
    SolutionRecord,
};
use crate::numeric::Rational;
use crate::par::{self, ExecMode};
use crate::scaled::{ExactInt, ScaledWeights};

pub const ORACLE_LIMIT: usize = 20;

fn guard(instance: &ParametricInstance) -> Result<()> {
    if instance.len() > ORACLE_LIMIT {
        return Err(Error::OracleSizeLimit { n: instance.len(), limit: ORACLE_LIMIT });
    }
    Ok(())
}

/// Bit `i` of a mask is item `i`. Reversing the bits gives a key whose
/// integer order is the lexicographic order of chosen-vectors.
fn lex_key(mask: u32, n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        mask.reverse_bits() >> (32 - n)
    }
}

fn chosen_of(mask: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

const CHUNK: u32 = 1 << 12;

fn best_mask<T: ExactInt>(weights: &[T], cap: &T, profits: &[i64], mode: ExecMode) -> u32 {
    let n = weights.len();
    let total: u64 = 1 << n;
    let chunks = total.div_ceil(u64::from(CHUNK)) as usize;
    let best_in = |c: usize| {
        let lo = c as u64 * u64::from(CHUNK);
        let hi = (lo + u64::from(CHUNK)).min(total);
        let mut best: Option<(i64, std::cmp::Reverse<u32>, u32)> = None;
        for mask in lo as u32..hi as u32 {
            let mut w = T::zero();
            let mut p = 0i64;
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    w = w + &weights[i];
                    p += profits[i];
                }
            }
            if w <= *cap {
                let key = (p, std::cmp::Reverse(lex_key(mask, n)), mask);
                if best.as_ref().is_none_or(|b| key > *b) {
                    best = Some(key);
                }
            }
        }
        best
    };
    par::map_range(mode, chunks, best_in)
        .into_iter()
        .flatten()
        .max()
        .map(|b| b.2)
        .expect("the empty set is always feasible")
}

/// Optimal profit at λ by enumerating all `2ⁿ` subsets; ties go to the
/// lexicographically smallest chosen-vector.
pub fn exact_opt_at(instance: &ParametricInstance, lambda: &Rational) -> Result<(i64, KnapsackSolution)> {
    exact_opt_at_with(instance, lambda, ExecMode::default())
}

pub fn exact_opt_at_with(
    instance: &ParametricInstance,
    lambda: &Rational,
    mode: ExecMode,
) -> Result<(i64, KnapsackSolution)> {
    guard(instance)?;
    let n = instance.len();
    let profits: Vec<i64> = instance.items().iter().map(|it| it.profit).collect();
    let mask = match ScaledWeights::at(instance, lambda) {
        ScaledWeights::Small { weights, capacity } => best_mask(&weights, &capacity, &profits, mode),
        ScaledWeights::Big { weights, capacity } => best_mask(&weights, &capacity, &profits, mode),
    };
    let sol = instance.solution(chosen_of(mask, n))?;
    Ok((sol.profit, sol))
}

/// The exact optimal profit as a step function of λ, with one witness per
/// cell that is feasible on the whole closed cell.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProfitStepFunction {
    pub breakpoints: Vec<Rational>,
    pub values: Vec<i64>,
    pub witnesses: Vec<KnapsackSolution>,
    /// `true` where both neighbouring cells have the same value and the
    /// split exists only because no single witness spans both.
    pub redundant: Vec<bool>,
}

impl ProfitStepFunction {
    /// `p*(λ)`; at a breakpoint the larger neighbouring value.
    pub fn value_at(&self, lambda: &Rational) -> i64 {
        let (j, k) = cells_at(&self.breakpoints, lambda);
        k.map_or(self.values[j], |k| self.values[j].max(self.values[k]))
    }

    pub fn as_partition(&self) -> SolutionPartition {
        SolutionPartition { breakpoints: self.breakpoints.clone(), cells: self.witnesses.clone() }
    }

    pub fn to_json(&self) -> String {
        let file = StepFunctionFile {
            breakpoints: self.breakpoints.clone(),
            values: self.values.clone(),
            redundant: self.redundant.clone(),
            witnesses: self.witnesses.iter().map(KnapsackSolution::to_record).collect(),
        };
        serde_json::to_string_pretty(&file).expect("step function serializes")
    }

    pub fn from_json(s: &str, instance: &ParametricInstance) -> Result<Self> {
        let file: StepFunctionFile = serde_json::from_str(s)?;
        check_breakpoints(&file.breakpoints, file.values.len())?;
        let witnesses = file.witnesses.iter().map(|w| w.to_solution(instance)).collect::<Result<_>>()?;
        Ok(ProfitStepFunction {
            breakpoints: file.breakpoints,
            values: file.values,
            witnesses,
            redundant: file.redundant,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct StepFunctionFile {
    breakpoints: Vec<Rational>,
    values: Vec<i64>,
    redundant: Vec<bool>,
    witnesses: Vec<SolutionRecord>,
}

/// Feasibility region of one subset: all of ℝ, `(−∞, r]`, `[r, ∞)` or empty.
enum Region {
    Always,
    Never,
    Left(usize),
    Right(usize),
}

struct Subset {
    mask: u32,
    profit: i64,
    region: Region,
}

/// Builds `p*` by the candidate-point method: every subset's feasibility
/// region is a ray (or all/nothing), so `p*` can only change at ray
/// endpoints. Values at the endpoints and in the gaps between them come
/// from prefix/suffix maxima over the rays.
pub fn exact_profit_function(instance: &ParametricInstance) -> Result<ProfitStepFunction> {
    guard(instance)?;
    let n = instance.len();
    let cap = i128::from(instance.capacity());
    let items = instance.items();

    let forms: Vec<(u32, i64, i128, i128)> = (0..(1u32 << n))
        .map(|mask| {
            let (mut p, mut a, mut b) = (0i64, 0i128, 0i128);
            for (i, it) in items.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    p += it.profit;
                    a += i128::from(it.weight_intercept);
                    b += i128::from(it.weight_slope);
                }
            }
            (mask, p, a, b)
        })
        .collect();

    let root = |a: i128, b: i128| Rational::new(cap - a, b);
    let mut candidates: Vec<Rational> =
        forms.iter().filter(|f| f.3 != 0).map(|&(_, _, a, b)| root(a, b)).collect();
    candidates.sort();
    candidates.dedup();
    let m = candidates.len();
    let idx = |r: &Rational| candidates.binary_search(r).expect("root is a candidate");

    let subsets: Vec<Subset> = forms
        .iter()
        .map(|&(mask, profit, a, b)| {
            let region = match b.signum() {
                0 if a <= cap => Region::Always,
                0 => Region::Never,
                1 => Region::Left(idx(&root(a, b))),
                _ => Region::Right(idx(&root(a, b))),
            };
            Subset { mask, profit, region }
        })
        .collect();

    // left_best[i]: best profit among left rays with endpoint index ≥ i.
    // right_best[i]: best among right rays with endpoint index ≤ i.
    let mut always = 0i64;
    let mut left_at = vec![0i64; m + 1];
    let mut right_at = vec![0i64; m];
    for s in &subsets {
        match s.region {
            Region::Always => always = always.max(s.profit),
            Region::Never => {}
            Region::Left(i) => left_at[i] = left_at[i].max(s.profit),
            Region::Right(i) => right_at[i] = right_at[i].max(s.profit),
        }
    }
    let mut left_best = left_at.clone();
    for i in (0..m).rev() {
        left_best[i] = left_best[i].max(left_best[i + 1]);
    }
    let mut right_best = right_at.clone();
    for i in 1..m {
        right_best[i] = right_best[i].max(right_best[i - 1]);
    }
    // Gap g is the open region between candidates g-1 and g (gap 0 is
    // left of everything, gap m right of everything).
    let gap_value = |g: usize| {
        let l = if g < m { left_best[g] } else { 0 };
        let r = if g > 0 { right_best[g - 1] } else { 0 };
        always.max(l).max(r)
    };

    let mut by_profit: HashMap<i64, Vec<&Subset>> = HashMap::new();
    for s in &subsets {
        if !matches!(s.region, Region::Never) {
            by_profit.entry(s.profit).or_default().push(s);
        }
    }

    // Witness with profit v valid from the start of gap g, reaching as far
    // right as possible. Reach is a candidate index (cell may extend up to
    // and including that candidate) or None for +∞.
    let witness_from = |g: usize, v: i64| -> (u32, Option<usize>) {
        let mut best: Option<(Option<usize>, u32)> = None;
        for s in by_profit.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            let reach = match s.region {
                Region::Always => None,
                Region::Right(i) if g > 0 && i < g => None,
                Region::Left(i) if i >= g => Some(i),
                _ => continue,
            };
            let better = match &best {
                None => true,
                Some((r, mask)) => {
                    let ord = match (reach, r) {
                        (None, None) => std::cmp::Ordering::Equal,
                        (None, Some(_)) => std::cmp::Ordering::Greater,
                        (Some(_), None) => std::cmp::Ordering::Less,
                        (Some(a), Some(b)) => a.cmp(b),
                    };
                    ord.is_gt() || (ord.is_eq() && lex_key(s.mask, n) < lex_key(*mask, n))
                }
            };
            if better {
                best = Some((reach, s.mask));
            }
        }
        let (reach, mask) = best.expect("gap value is attained by some subset");
        (mask, reach)
    };

    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    let mut witnesses = Vec::new();
    let mut redundant = Vec::new();
    let mut g = 0usize;
    while g <= m {
        let v = gap_value(g);
        let (mask, reach) = witness_from(g, v);
        let mut t = g + 1;
        while t <= m && gap_value(t) == v && reach.is_none_or(|r| r >= t) {
            t += 1;
        }
        values.push(v);
        witnesses.push(instance.solution(chosen_of(mask, n))?);
        if t <= m {
            breakpoints.push(candidates[t - 1].clone());
            redundant.push(gap_value(t) == v);
        }
        g = t;
    }

    Ok(ProfitStepFunction { breakpoints, values, witnesses, redundant })
}

/// Sample points for comparing a step function against anything else:
/// all given breakpoints, midpoints between consecutive ones, and one
/// point beyond each end.
pub fn sample_points<'a>(breakpoint_sets: impl IntoIterator<Item = &'a [Rational]>) -> Vec<Rational> {
    let mut pts: Vec<Rational> = breakpoint_sets.into_iter().flatten().cloned().collect();
    pts.sort();
    pts.dedup();
    let mut out = Vec::with_capacity(2 * pts.len() + 2);
    match (pts.first(), pts.last()) {
        (Some(lo), Some(hi)) => {
            out.push(lo - &Rational::one());
            for w in pts.windows(2) {
                out.push(w[0].clone());
                out.push(w[0].midpoint(&w[1]));
            }
            out.push(hi.clone());
            out.push(hi + &Rational::one());
        }
        _ => out.push(Rational::zero()),
    }
    out
}

impl ProfitStepFunction {
    pub fn cell_interval(&self, j: usize) -> crate::numeric::ClosedInterval {
        cell_interval(&self.breakpoints, j)
    }
}
