use std::sync::Arc;

use anyhow::{bail, Result};
use qcomm::boolfn::{
    codeword_from_index, eval_rtilde_hg, transitive_perms, verify_transitive, BooleanFunction, Gadget, Hadamardized,
};
use qcomm::harness::{run_trials, trial_rng};
use qcomm::lowerbound::degree::best_error;
use qcomm::lowerbound::{
    approx_degree, check_addr_reduction, check_reduction, discrepancy, dual_witness, gdm_bound, is_balanced,
    xor_lemma_check, BoxGate, Distribution,
};
use qcomm::query::{rtilde_hg_query_algorithm, Equality, QueryOracle};
use qcomm::search::{SearchInstance, SearchRunner};
use qcomm::statevector::log2_exact;
use qcomm::symmetric::{bcw_baseline_cost, CountOutcome, Counter};
use rand::Rng;

use crate::config::Common;
use crate::output::{fmt_f, Table};

const ECHO: [&str; 8] = ["n", "t", "z", "gadget", "fn", "noise", "trials", "seed"];

fn header(extra: &[&str]) -> Vec<String> {
    ECHO.iter().chain(&["constants"]).chain(extra).map(|s| s.to_string()).collect()
}

fn echo(c: &Common, n: usize, t: usize, z: usize, constants: &str) -> Vec<String> {
    vec![
        n.to_string(),
        t.to_string(),
        z.to_string(),
        c.gadget.clone(),
        c.function.clone(),
        c.noise.to_string(),
        c.trials.to_string(),
        c.seed.to_string(),
        constants.to_string(),
    ]
}

/// `(n, t, z)` grid points; `z` defaults to `default_z(t)`.
fn grid(c: &Common, default_z: impl Fn(usize) -> usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for &n in &c.n {
        for &t in &c.t {
            if c.z.is_empty() {
                out.push((n, t, default_z(t)));
            } else {
                out.extend(c.z.iter().map(|&z| (n, t, z)));
            }
        }
    }
    out
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Per-point seed: distinct for every grid point, fixed by the global seed.
fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(index as u64)
}

pub fn search(c: &Common, unknown: bool) -> Result<Table> {
    let constants = c.resolve_constants()?;
    let echo_c = c.constants_echo(&constants);
    let g = Arc::new(c.gadget()?);
    let runner = SearchRunner::new(constants, c.noise.model(c.seed));
    let mut table = Table::new(
        if unknown { "search-unknown" } else { "search" },
        &header(&["successes", "frequency", "false_positives", "mean_cost", "mean_epr"]),
    );
    for (i, (n, t, z)) in grid(c, |t| t).into_iter().enumerate() {
        let results = run_trials(c.trials, point_seed(c.seed, i), |_, rng| -> qcomm::Result<(bool, bool, u64, u64)> {
            let inst = SearchInstance::planted_count(g.clone(), n, z, rng)?;
            let (found, meter) = if unknown {
                runner.search_unknown(&inst, rng)?
            } else {
                let out = runner.search_known_t(&inst, t, rng)?;
                (out.found, out.meter)
            };
            Ok((
                found.is_some(),
                found.is_some_and(|i| inst.value(i) != -1),
                meter.total(),
                meter.epr_consumed,
            ))
        });
        let results = results.into_iter().collect::<qcomm::Result<Vec<_>>>()?;
        runner.clear_cache();
        let successes = results.iter().filter(|r| r.0).count();
        let mut row = echo(c, n, t, z, &echo_c);
        row.extend([
            successes.to_string(),
            fmt_f(successes as f64 / c.trials as f64),
            results.iter().filter(|r| r.1).count().to_string(),
            fmt_f(mean(&results.iter().map(|r| r.2 as f64).collect::<Vec<_>>())),
            fmt_f(mean(&results.iter().map(|r| r.3 as f64).collect::<Vec<_>>())),
        ]);
        table.push(row);
    }
    Ok(table)
}

pub fn count(c: &Common) -> Result<Table> {
    let constants = c.resolve_constants()?;
    let echo_c = c.constants_echo(&constants);
    let g = Arc::new(c.gadget()?);
    let runner = SearchRunner::new(constants, c.noise.model(c.seed));
    let counter = Counter::new(&runner);
    let mut table = Table::new(
        "count",
        &header(&["exact_correct", "above_threshold", "errors", "error_frequency", "mean_cost", "mean_epr"]),
    );
    for (i, (n, t, z)) in grid(c, |t| t / 2).into_iter().enumerate() {
        let results = run_trials(c.trials, point_seed(c.seed, i), |_, rng| -> qcomm::Result<(CountOutcome, u64, u64)> {
            let inst = SearchInstance::planted_count(g.clone(), n, z, rng)?;
            let rep = counter.count_or_threshold(&inst, t, rng)?;
            Ok((rep.outcome, rep.meter.total(), rep.meter.epr_consumed))
        });
        let results = results.into_iter().collect::<qcomm::Result<Vec<_>>>()?;
        runner.clear_cache();
        let exact = results.iter().filter(|r| r.0 == CountOutcome::Exact(z)).count();
        let above = results.iter().filter(|r| matches!(r.0, CountOutcome::AboveThreshold(_))).count();
        let errors = results
            .iter()
            .filter(|r| match r.0 {
                CountOutcome::Exact(k) => k != z,
                CountOutcome::AboveThreshold(_) => z <= t,
            })
            .count();
        let mut row = echo(c, n, t, z, &echo_c);
        row.extend([
            exact.to_string(),
            above.to_string(),
            errors.to_string(),
            fmt_f(errors as f64 / c.trials as f64),
            fmt_f(mean(&results.iter().map(|r| r.1 as f64).collect::<Vec<_>>())),
            fmt_f(mean(&results.iter().map(|r| r.2 as f64).collect::<Vec<_>>())),
        ]);
        table.push(row);
    }
    Ok(table)
}

pub fn eval_symmetric(c: &Common) -> Result<Table> {
    let constants = c.resolve_constants()?;
    let echo_c = c.constants_echo(&constants);
    let g = Arc::new(c.gadget()?);
    let baseline_c = constants.baseline_c;
    let runner = SearchRunner::new(constants, c.noise.model(c.seed));
    let counter = Counter::new(&runner);
    let mut table = Table::new(
        "eval-symmetric",
        &header(&["f_threshold", "correct", "frequency", "mean_cost", "bcw_baseline", "baseline_over_cost"]),
    );
    let mut index = 0;
    for &n in &c.n {
        let f = c.symmetric(n)?;
        let zs = if c.z.is_empty() { vec![n / 4] } else { c.z.clone() };
        for z in zs {
            let results = run_trials(c.trials, point_seed(c.seed, index), |_, rng| -> qcomm::Result<(bool, u64)> {
                let inst = SearchInstance::planted_count(g.clone(), n, z, rng)?;
                let rep = counter.eval_symmetric(&f, &inst, rng)?;
                Ok((rep.value == f.at_weight(z), rep.meter.total()))
            });
            index += 1;
            let results = results.into_iter().collect::<qcomm::Result<Vec<_>>>()?;
            runner.clear_cache();
            let correct = results.iter().filter(|r| r.0).count();
            let cost = mean(&results.iter().map(|r| r.1 as f64).collect::<Vec<_>>());
            let baseline = bcw_baseline_cost(&f, &g, baseline_c);
            let mut row = echo(c, n, f.threshold_t(), z, &echo_c);
            row.extend([
                f.threshold_t().to_string(),
                correct.to_string(),
                fmt_f(correct as f64 / c.trials as f64),
                fmt_f(cost),
                baseline.to_string(),
                fmt_f(if cost > 0.0 { baseline as f64 / cost } else { 0.0 }),
            ]);
            table.push(row);
        }
    }
    Ok(table)
}

/// Random signed codeword blocks for `r ∘̃ h_{G}`, optionally with one
/// flipped position.
fn codeword_input<R: Rng + ?Sized>(n: usize, g: &Gadget, corrupt: bool, rng: &mut R) -> Vec<i8> {
    let mut input = Vec::new();
    for _ in 0..n {
        for bits in [g.j(), g.k()] {
            let sign = if rng.gen::<bool>() { 1 } else { -1 };
            input.extend(codeword_from_index(rng.gen_range(0..1 << bits), bits).into_iter().map(|v| v * sign));
        }
    }
    if corrupt {
        let p = rng.gen_range(0..input.len());
        input[p] = -input[p];
    }
    input
}

pub fn query_sim(c: &Common, corrupt: bool) -> Result<Table> {
    let mut table = Table::new(
        "query-sim",
        &header(&["corrupt", "correct", "frequency", "mean_queries", "max_queries", "block_queries", "mean_grover_queries"]),
    );
    for (i, &n) in c.n.iter().enumerate() {
        let r = c.function(n)?;
        let g = match c.gadget.as_str() {
            "ip" => Gadget::ip(log2_exact(n)?, c.q.unwrap_or(1))?,
            _ => c.gadget()?,
        };
        let h = Hadamardized::new(&g);
        let results = run_trials(c.trials, point_seed(c.seed, i), |_, rng| -> qcomm::Result<(bool, u64, u64, u64)> {
            let input = codeword_input(n, &g, corrupt, rng);
            let expected = if corrupt { -1 } else { eval_rtilde_hg(&r, &h, &input)? };
            let mut oracle = QueryOracle::new(input)?;
            let run = rtilde_hg_query_algorithm(&mut oracle, &r, &g, rng)?;
            let ok = run.value == expected && (!corrupt || matches!(run.equality, Equality::Differ(_)));
            Ok((ok, run.total_queries(), run.bv_queries + run.sign_queries, run.grover_queries))
        });
        let results = results.into_iter().collect::<qcomm::Result<Vec<_>>>()?;
        let correct = results.iter().filter(|r| r.0).count();
        let mut row = echo(c, n, 0, 0, "-");
        row.extend([
            corrupt.to_string(),
            correct.to_string(),
            fmt_f(correct as f64 / c.trials as f64),
            fmt_f(mean(&results.iter().map(|r| r.1 as f64).collect::<Vec<_>>())),
            results.iter().map(|r| r.1).max().unwrap_or(0).to_string(),
            fmt_f(mean(&results.iter().map(|r| r.2 as f64).collect::<Vec<_>>())),
            fmt_f(mean(&results.iter().map(|r| r.3 as f64).collect::<Vec<_>>())),
        ]);
        table.push(row);
    }
    Ok(table)
}

pub fn adeg(c: &Common, eps: f64) -> Result<Table> {
    let mut table = Table::new(
        "adeg",
        &header(&["eps", "adeg", "error_below", "witness_correlation"]),
    );
    for &n in &c.n {
        let f = c.function(n)?;
        let d = approx_degree(&f, eps)?;
        let below = if d > 0 { fmt_f(best_error(&f, d - 1)?) } else { "-".into() };
        let corr = match (d > 0).then(|| dual_witness(&f, d, eps)).transpose()?.flatten() {
            Some(w) => fmt_f(w.correlation),
            None => "-".into(),
        };
        let mut row = echo(c, n, 0, 0, "-");
        row.extend([eps.to_string(), d.to_string(), below, corr]);
        table.push(row);
    }
    Ok(table)
}

pub fn disc(c: &Common) -> Result<Table> {
    let mut table = Table::new("disc", &header(&["disc_uniform", "bound", "within_bound", "balanced"]));
    for &n in &c.n {
        let g = c.gadget_sized(n)?;
        let u = Distribution::uniform_for(&g)?;
        let value = discrepancy(&g, &u)?;
        let (bound, within) = if c.gadget.starts_with("addr") {
            let b = 1.0 / (n as f64).sqrt();
            (fmt_f(b), (value <= b).to_string())
        } else {
            ("-".into(), "-".into())
        };
        let mut row = echo(c, n, 0, 0, "-");
        row.extend([fmt_f(value), bound, within, is_balanced(&u, &g)?.to_string()]);
        table.push(row);
    }
    Ok(table)
}

pub fn xor_lemma(c: &Common, k_max: usize) -> Result<Table> {
    let mut table = Table::new("xor-lemma", &header(&["k", "disc", "lhs", "rhs", "holds"]));
    for &n in &c.n {
        let g = c.gadget_sized(n)?;
        let mu = Distribution::uniform_for(&g)?;
        for k in 1..=k_max {
            let rep = xor_lemma_check(&g, &mu, k)?;
            let mut row = echo(c, n, 0, 0, "-");
            row.extend([
                k.to_string(),
                fmt_f(rep.disc),
                fmt_f(rep.lhs),
                fmt_f(rep.rhs),
                rep.holds().to_string(),
            ]);
            table.push(row);
        }
    }
    Ok(table)
}

pub fn gdm(c: &Common, delta: f64, eps: f64) -> Result<Table> {
    let mut table = Table::new("gdm", &header(&["delta", "eps", "disc", "bound_argument"]));
    for &n in &c.n {
        let g = c.gadget_sized(n)?;
        let value = discrepancy(&g, &Distribution::uniform_for(&g)?)?;
        let mut row = echo(c, n, 0, 0, "-");
        row.extend([delta.to_string(), eps.to_string(), fmt_f(value), fmt_f(gdm_bound(delta, eps, value)?)]);
        table.push(row);
    }
    Ok(table)
}

pub fn reductions(c: &Common) -> Result<Table> {
    let mut table = Table::new("reductions", &header(&["path", "inputs", "mismatches", "holds"]));
    for &n in &c.n {
        let r: BooleanFunction = c.function(n)?;
        let mut rows = Vec::new();
        if let Some(m) = c.gadget.strip_prefix("addr:") {
            rows.push(("addr", check_addr_reduction(&r, m.parse()?)?));
        } else {
            let g = c.gadget()?;
            rows.push(("and", check_reduction(&r, &g, BoxGate::And)?));
            rows.push(("xor", check_reduction(&r, &g, BoxGate::Xor)?));
        }
        for (path, rep) in rows {
            let mut row = echo(c, n, 0, 0, "-");
            row.extend([
                path.to_string(),
                rep.inputs.to_string(),
                rep.mismatches.to_string(),
                rep.holds().to_string(),
            ]);
            table.push(row);
        }
    }
    Ok(table)
}

pub fn transitivity(c: &Common, samples: usize) -> Result<Table> {
    let mut table = Table::new(
        "transitivity",
        &header(&["inputs_checked", "exhaustive", "invariant", "single_orbit"]),
    );
    for (i, &n) in c.n.iter().enumerate() {
        let b = log2_exact(n)?;
        if b == 0 {
            bail!("transitivity needs n >= 2");
        }
        let h = Hadamardized::new(&Gadget::ip(b, 1)?);
        let perms = transitive_perms(n)?;
        let words: Vec<Vec<i8>> = (0..2usize << b)
            .map(|w| codeword_from_index(w >> 1, b).into_iter().map(|v| if w & 1 == 1 { -v } else { v }).collect())
            .collect();
        let extra: Vec<Vec<i8>> = words
            .iter()
            .flat_map(|x| words.iter().map(move |y| [x.as_slice(), y.as_slice()].concat()))
            .collect();
        let mut rng = trial_rng(c.seed, i as u64);
        let rep = verify_transitive(|x| h.eval_strs(&x[..n], &x[n..]), 2 * n, &perms, &extra, samples, &mut rng)?;
        let mut row = echo(c, n, 0, 0, "-");
        row.extend([
            rep.inputs_checked.to_string(),
            rep.exhaustive.to_string(),
            rep.invariant.to_string(),
            rep.single_orbit.to_string(),
        ]);
        table.push(row);
    }
    Ok(table)
}
