//! Acceptance gate: one line per criterion, non-zero exit if any fails.
//! Every reference value comes from brute-force enumeration written here,
//! independent of the library's own search code.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use paraknap::dp::{best_profit_at, dp_min_weight_at, scale_profits, ProfitGrid};
use paraknap::feasibility::{FeasibilityResult, FeasibilitySearch};
use paraknap::fptas::{fptas_with, verify_partition, Variant};
use paraknap::generate::{generate, GenParams};
use paraknap::greedy::{greedy_at, greedy_partition, level_sweep_partition, GreedyPartition};
use paraknap::oracle::{exact_opt_at, exact_profit_function, sample_points};
use paraknap::{AffineForm, ClosedInterval, ExecMode, ExtRational, ParametricInstance, Rational};

type Outcome = Result<String, String>;

fn family(count: u64, seed: u64, max_n: usize) -> Vec<ParametricInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=max_n);
            generate(&GenParams::small(n, seed * 10_000 + i)).expect("valid params")
        })
        .collect()
}

fn random_lambda(rng: &mut ChaCha8Rng, span: i64) -> Rational {
    let den = rng.gen_range(1..=12);
    Rational::new(rng.gen_range(-span * den..=span * den), den)
}

/// All subsets as (chosen, profit, weight form).
fn subsets(inst: &ParametricInstance) -> Vec<(Vec<bool>, i64, AffineForm)> {
    let n = inst.len();
    (0..1u32 << n)
        .map(|m| {
            let chosen: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
            let profit = (0..n).filter(|&i| chosen[i]).map(|i| inst.items()[i].profit).sum();
            let w = inst.weight_of(&chosen).unwrap();
            (chosen, profit, w)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut points = 0;
    for inst in family(200, 1, 8) {
        let grid = ProfitGrid::unscaled(&inst);
        let exact = exact_profit_function(&inst).map_err(|e| e.to_string())?;
        let mut lams: Vec<Rational> = (0..20).map(|_| random_lambda(&mut rng, 20)).collect();
        lams.extend(exact.breakpoints.iter().cloned());
        for l in &lams {
            let (dp, _) = best_profit_at(&dp_min_weight_at(&inst, &grid, l), &inst);
            let (opt, _) = exact_opt_at(&inst, l).map_err(|e| e.to_string())?;
            if dp != opt {
                return Err(format!("λ={l}: dp {dp} vs oracle {opt} on {}", inst.to_json()));
            }
            points += 1;
        }
    }
    Ok(format!("200 instances, {points} points, exact equality"))
}

struct CapCheck {
    worst_explicit: (usize, usize),
    worst_implicit: (usize, usize),
}

fn check_caps(inst: &ParametricInstance, eps: &Rational, variant: Variant, cells: usize, greedy: &GreedyPartition, grid_rows: usize, caps: &mut CapCheck) -> Result<(), String> {
    let n = inst.len();
    if greedy.event_count > GreedyPartition::event_cap(n) {
        return Err(format!("greedy events {} > cap {}", greedy.event_count, GreedyPartition::event_cap(n)));
    }
    let (cap, slot) = match variant {
        Variant::Explicit => {
            // P̃ = ⌈2n/ε⌉ regardless of any extra rows the solver searched
            let p_tilde = (Rational::from_integer(2 * n as i64) / eps).ceil();
            let p_tilde: usize = p_tilde.try_into().expect("small");
            (greedy.cells().len() * (2 * p_tilde + 3), &mut caps.worst_explicit)
        }
        Variant::Implicit => (2 * (grid_rows - 1) + 1, &mut caps.worst_implicit),
    };
    if cells > cap {
        return Err(format!("{variant:?}: {cells} cells > cap {cap}"));
    }
    if cells * slot.1 > slot.0 * cap {
        *slot = (cells, cap);
    }
    Ok(())
}

fn criterion_2(caps: &mut CapCheck) -> Outcome {
    let mut runs = 0;
    let mut worst = Rational::from_integer(1);
    for inst in family(200, 2, 8) {
        let greedy = greedy_partition(&inst);
        for eps in ["1/10", "3/10", "1/2"] {
            let eps: Rational = eps.parse().unwrap();
            for variant in [Variant::Explicit, Variant::Implicit] {
                let out = fptas_with(&inst, &eps, variant, ExecMode::default()).map_err(|e| e.to_string())?;
                check_caps(&inst, &eps, variant, out.partition.cells.len(), &greedy, out.grid_rows, caps)?;
                let r = verify_partition(&inst, &out.partition, &eps).map_err(|e| e.to_string())?;
                if !r.pass {
                    return Err(format!("{variant:?} ε={eps}: worst ratio {} at {:?} on {}", r.worst_ratio, r.worst_lambda, inst.to_json()));
                }
                let slack = &r.worst_ratio - &(Rational::from_integer(1) - &eps);
                if slack < worst {
                    worst = slack;
                }
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} runs (200 instances × 3 ε × 2 variants), min slack over 1−ε = {worst}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checked, mut logged, mut negative_points) = (0, 0, 0);
    for inst in family(200, 3, 8) {
        let exact = exact_profit_function(&inst).map_err(|e| e.to_string())?;
        let greedy = greedy_partition(&inst);
        let mut lams = sample_points([exact.breakpoints.as_slice(), greedy.breakpoints()]);
        lams.extend((0..20).map(|_| random_lambda(&mut rng, 20)));
        for l in &lams {
            let pa = greedy_at(&inst, l).0;
            let opt = exact.value_at(l);
            if pa > opt {
                return Err(format!("λ={l}: p^A {pa} > p* {opt}"));
            }
            let nonneg = inst.items().iter().all(|it| !it.weight_at(l).is_negative());
            if nonneg {
                checked += 1;
                if 2 * pa < opt {
                    return Err(format!("λ={l}: 2·{pa} < {opt} with non-negative weights on {}", inst.to_json()));
                }
            } else {
                negative_points += 1;
                if 2 * pa < opt {
                    logged += 1;
                    eprintln!("  note: ½-bound fails with a negative weight at λ={l}: p^A={pa}, p*={opt}");
                }
            }
        }
    }
    Ok(format!(
        "{checked} non-negative points hold; {logged} of {negative_points} points with a negative weight violate 2p^A ≥ p* (logged)"
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let insts = family(100, 4, 8);
    let mut triples = 0;
    for inst in &insts {
        let grid = ProfitGrid::unscaled(inst);
        let t0 = dp_min_weight_at(inst, &grid, &Rational::zero());
        let rows: Vec<usize> = (0..grid.rows()).filter(|&r| t0.value(r).is_some()).collect();
        let row = rows[rng.gen_range(0..rows.len())];
        let omega = |l: &Rational| dp_min_weight_at(inst, &grid, l).value(row).expect("reachable");
        let mut done = 0;
        while done < 20 {
            let mut ls: Vec<Rational> = (0..3).map(|_| random_lambda(&mut rng, 30)).collect();
            ls.sort();
            ls.dedup();
            if ls.len() < 3 {
                continue;
            }
            done += 1;
            let (a, b, c) = (&ls[0], &ls[1], &ls[2]);
            let lhs = (c - a) * omega(b);
            let rhs = (c - b) * omega(a) + (b - a) * omega(c);
            if lhs < rhs {
                return Err(format!("chord violated for row {row} at {a}, {b}, {c}"));
            }
            triples += 1;
        }
    }
    Ok(format!("100 (instance, row) pairs, {triples} distinct triples"))
}

/// Brute-force feasible set `{λ : min_S w_S(λ) ≤ W}` as maximal intervals.
fn brute_feasible(forms: &[AffineForm], cap: &Rational) -> Vec<ClosedInterval> {
    let mut pts: Vec<Rational> = forms.iter().filter_map(|f| f.solve_for(cap)).collect();
    pts.sort();
    pts.dedup();
    let one = Rational::from_integer(1);
    let mut samples = Vec::new();
    if let (Some(a), Some(b)) = (pts.first(), pts.last()) {
        samples.push(a - &one);
        for (i, p) in pts.iter().enumerate() {
            samples.push(p.clone());
            if let Some(q) = pts.get(i + 1) {
                samples.push(p.midpoint(q));
            }
        }
        samples.push(b + &one);
    } else {
        samples.push(Rational::zero());
    }
    let feasible = |x: &Rational| forms.iter().any(|f| f.eval(x) <= *cap);
    let mut out = Vec::new();
    let mut start: Option<ExtRational> = None;
    let mut prev: Option<&Rational> = None;
    for (i, s) in samples.iter().enumerate() {
        if feasible(s) {
            if start.is_none() {
                start = Some(if i == 0 { ExtRational::NegInf } else { s.clone().into() });
            }
        } else if let Some(st) = start.take() {
            out.push(ClosedInterval::new(st, prev.unwrap().clone().into()).unwrap());
        }
        prev = Some(s);
    }
    if let Some(st) = start {
        out.push(ClosedInterval::new(st, ExtRational::PosInf).unwrap());
    }
    out
}

fn criterion_5() -> Outcome {
    let probes = [1, 10, 100].map(Rational::from_integer);
    let (mut rows_checked, mut crossings) = (0, 0);
    for inst in family(50, 5, 6) {
        let cap = inst.capacity_q();
        let subs = subsets(&inst);
        let pa = greedy_at(&inst, &Rational::zero()).0.max(1);
        let scaled = scale_profits(&inst, pa, &"1/3".parse().unwrap()).map_err(|e| e.to_string())?;
        let grids = [(ProfitGrid::unscaled(&inst), None), (scaled.clone(), scaled.scaled_profits().map(<[i64]>::to_vec))];
        for (grid, scaled_profits) in &grids {
            let search = FeasibilitySearch::new(&inst, grid).map_err(|e| e.to_string())?;
            for row in 0..grid.rows() {
                let forms: Vec<AffineForm> = subs
                    .iter()
                    .filter(|(c, p, _)| {
                        let q = match scaled_profits {
                            None => *p,
                            Some(sp) => (0..c.len()).filter(|&i| c[i]).map(|i| sp[i]).sum(),
                        };
                        q == row as i64
                    })
                    .map(|(_, _, f)| f.clone())
                    .collect();
                let res = search.intervals(row).map_err(|e| e.to_string())?;
                let got: Vec<ClosedInterval> = match &res {
                    FeasibilityResult::NeverFeasible => vec![],
                    FeasibilityResult::AlwaysFeasible { split, left, right } => {
                        if !left.is_feasible_on(&ClosedInterval::left_ray(split.clone()), &cap)
                            || !right.is_feasible_on(&ClosedInterval::right_ray(split.clone()), &cap)
                        {
                            return Err(format!("row {row}: always-feasible witnesses fail"));
                        }
                        vec![ClosedInterval::whole_line()]
                    }
                    FeasibilityResult::Rays { left, right } => {
                        let mut v = Vec::new();
                        if let Some((l, w)) = left {
                            crossings += 1;
                            let ok = w.weight.eval(l) == cap && probes.iter().all(|t| w.weight.eval(&(l - t)) <= cap);
                            if !ok {
                                return Err(format!("row {row}: λ₁={l} not certified by {:?}", w.indices()));
                            }
                            v.push(ClosedInterval::left_ray(l.clone()));
                        }
                        if let Some((r, w)) = right {
                            crossings += 1;
                            let ok = w.weight.eval(r) == cap && probes.iter().all(|t| w.weight.eval(&(r + t)) <= cap);
                            if !ok {
                                return Err(format!("row {row}: λ₂={r} not certified by {:?}", w.indices()));
                            }
                            v.push(ClosedInterval::right_ray(r.clone()));
                        }
                        v
                    }
                };
                let want = brute_feasible(&forms, &cap);
                if got != want {
                    return Err(format!("row {row}: search {got:?} vs enumeration {want:?} on {}", inst.to_json()));
                }
                rows_checked += 1;
            }
        }
    }
    Ok(format!("50 instances, {rows_checked} rows (exact and scaled grids), {crossings} crossings self-certified"))
}

fn criterion_6() -> Outcome {
    let (mut pairs, mut literal_bad, mut search_bad) = (0u64, 0u64, 0u64);
    let mut worst_literal: Option<String> = None;
    for inst in family(50, 6, 6) {
        let n = inst.len() as i64;
        let cap = inst.capacity_q();
        let crit: BTreeSet<Rational> = subsets(&inst).iter().filter_map(|(_, _, f)| f.solve_for(&cap)).collect();
        let crit: Vec<Rational> = crit.into_iter().collect();
        let min_gap = crit.windows(2).map(|w| &w[1] - &w[0]).min();
        pairs += crit.len().saturating_sub(1) as u64;
        let Some(gap) = min_gap else { continue };
        let bound = |m: i64| Rational::new(1, n * n * m * m);
        let literal = inst.big_m().map_err(|e| e.to_string())?;
        let search = inst.search_magnitude().map_err(|e| e.to_string())?;
        if gap < bound(literal) {
            literal_bad += 1;
            worst_literal.get_or_insert(format!("gap {gap} < 1/(n²M²) = {} with M = {literal} on {}", bound(literal), inst.to_json()));
        }
        if gap < bound(search) {
            search_bad += 1;
        }
    }
    if let Some(w) = worst_literal {
        return Err(format!(
            "{literal_bad} of 50 instances break the bound with M = max{{W, n·max(a_i, b_i)}} ({search_bad} with the absolute-value magnitude); first: {w}"
        ));
    }
    Ok(format!("{pairs} consecutive distinct crossings, all ≥ 1/(n²M²) ({search_bad} below the search-magnitude bound)"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut points = 0;
    for inst in family(50, 8, 8) {
        let base = greedy_partition(&inst);
        let sweep = level_sweep_partition(&inst);
        for _ in 0..100 {
            let l = random_lambda(&mut rng, 25);
            if base.partition.profit_at(&l) != sweep.partition.profit_at(&l) {
                return Err(format!("p^A differs at {l}"));
            }
            let cell = |g: &GreedyPartition| g.cells()[g.breakpoints().partition_point(|b| *b < l)].clone();
            let on_break = base.breakpoints().contains(&l) || sweep.breakpoints().contains(&l);
            if !on_break && cell(&base) != cell(&sweep) {
                return Err(format!("greedy solution differs at {l} on {}", inst.to_json()));
            }
            points += 1;
        }
    }
    Ok(format!("50 instances, {points} samples"))
}

fn criterion_9() -> Outcome {
    let eps: Rational = "1/4".parse().unwrap();
    let mut lines = Vec::new();
    for seed in 1..=3 {
        let params = GenParams { n: 50, coeff: (-100, 100), profit: (1, 100), capacity: (0, 2500), seed };
        let inst = generate(&params).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let greedy = greedy_partition(&inst);
        let out = fptas_with(&inst, &eps, Variant::Explicit, ExecMode::default()).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        let mut caps = CapCheck { worst_explicit: (0, 1), worst_implicit: (0, 1) };
        check_caps(&inst, &eps, Variant::Explicit, out.partition.cells.len(), &greedy, out.grid_rows, &mut caps)?;
        out.partition.validate(&inst).map_err(|e| e.to_string())?;
        if took >= Duration::from_secs(60) {
            return Err(format!("seed {seed}: {took:.1?} ≥ 60 s"));
        }
        lines.push(format!("seed {seed}: {took:.2?}, {} cells", out.partition.cells.len()));
    }
    Ok(lines.join("; "))
}

fn main() -> ExitCode {
    let mut caps = CapCheck { worst_explicit: (0, 1), worst_implicit: (0, 1) };
    let mut results: Vec<(u32, &str, Outcome, Duration)> = Vec::new();
    fn run(results: &mut Vec<(u32, &'static str, Outcome, Duration)>, id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome) {
        let t = Instant::now();
        let r = f();
        results.push((id, name, r, t.elapsed()));
    }
    run(&mut results, 1, "DP equals brute-force optimum", &mut criterion_1);
    run(&mut results, 2, "(1−ε) guarantee, both variants", &mut || criterion_2(&mut caps));
    run(&mut results, 3, "greedy ½-approximation", &mut criterion_3);
    run(&mut results, 4, "ω concavity", &mut criterion_4);
    run(&mut results, 5, "feasibility search self-certification", &mut criterion_5);
    run(&mut results, 6, "crossing separation 1/(n²M²)", &mut criterion_6);
    let caps_line = format!(
        "asserted on every run of 2 and 9; tightest explicit {}/{} cells, implicit {}/{} cells",
        caps.worst_explicit.0, caps.worst_explicit.1, caps.worst_implicit.0, caps.worst_implicit.1
    );
    let caps_ok = results.iter().find(|r| r.0 == 2).is_some_and(|r| r.2.is_ok());
    run(&mut results, 7, "structural caps", &mut || if caps_ok { Ok(caps_line.clone()) } else { Err("see criterion 2".into()) });
    run(&mut results, 8, "level sweep equals baseline", &mut criterion_8);
    run(&mut results, 9, "scale smoke test n=50, ε=1/4", &mut criterion_9);

    let mut failed = 0;
    for (id, name, r, t) in &results {
        match r {
            Ok(msg) => println!("PASS  [{id}] {name}: {msg} ({t:.1?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  [{id}] {name}: {msg} ({t:.1?})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
