//! One line per acceptance criterion. Runs as a plain binary and always exits 0;
//! a FAIL line carries the reason.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use lietool::algebra_core::named::{d, m, p, q, qf, qs, r, rs, w};
use lietool::algebra_core::{expand_to_words, parse_tree, rat, AlgebraError, BracketTree, Rational};
use lietool::conditions::{ag_weight, check_with, pi1_w3, Caps, Condition, Verdict};
use lietool::coord2::{check_inequalities, random_piecewise_poly, xi, xi_closed_form, ControlSignal, Status};
use lietool::expansions::{chen_series, formal_state, interaction_log, ordered_product, random_control};
use lietool::linalg::{basic_solution, dot};
use lietool::hall_bstar::{basis_layer, basis_up_to_length, decompose, HallElement};
use lietool::simulate::{
    drift_family, drift_scan, integrate, pure_counterexample_check, pure_discrepancy, quartic_family, quartic_pair, rescale_to_precondition,
    zm_state, DriftParams,
};
use lietool::vector_fields::{check_zoo, zoo, Evaluator, INSTANCES, REGRESSION_LEN};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- 1

fn binom(n: u64, k: u64) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

fn mobius(mut n: u64) -> i128 {
    let mut out = 1;
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            n /= f;
            if n % f == 0 {
                return 0;
            }
            out = -out;
        }
        f += 1;
    }
    if n > 1 {
        out = -out;
    }
    out
}

/// Dimension of the (a, b) component of the free Lie algebra on two generators.
fn witt(a: u64, b: u64) -> i128 {
    let n = a + b;
    if n == 0 {
        return 0;
    }
    let g = num_integer::gcd(a, b);
    let s: i128 = (1..=g).filter(|e| g % e == 0).map(|e| mobius(e) * binom(n / e, a / e)).sum();
    s / n as i128
}

/// The five named families with their index constraints, filtered to bidegree (n1, n0).
fn family_layer(n1: u32, n0: u32) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut add = |t: Result<BracketTree, AlgebraError>| {
        if let Ok(t) = t {
            if t.bidegree() == (n1, n0) {
                out.insert(t.canonical());
            }
        }
    };
    let pos = 1..=7u32;
    let nat = 0..=6u32;
    match n1 {
        0 if n0 == 1 => add(Ok(BracketTree::x0())),
        1 => nat.clone().for_each(|nu| add(Ok(m(nu)))),
        2 => {
            for j in pos.clone() {
                for nu in nat.clone() {
                    add(w(j, nu));
                }
            }
        }
        3 => {
            for j in pos.clone() {
                for k in j..=7 {
                    for nu in nat.clone() {
                        add(p(j, k, nu));
                    }
                }
            }
        }
        4 => {
            for j in pos.clone() {
                for nu in nat.clone() {
                    for k in j..=7 {
                        for l in k..=7 {
                            add(q(j, k, l, nu));
                        }
                    }
                    for mu in nat.clone() {
                        for k in j + 1..=7 {
                            add(qs(j, mu, k, nu));
                        }
                        add(qf(j, mu, nu));
                    }
                }
            }
        }
        5 => {
            for j in pos.clone() {
                for k in j..=7 {
                    for nu in nat.clone() {
                        for l in k..=7 {
                            for mm in l..=7 {
                                add(r(j, k, l, mm, nu));
                            }
                        }
                        for l in pos.clone() {
                            for mu in nat.clone() {
                                add(rs(j, k, l, mu, nu));
                            }
                        }
                    }
                }
            }
        }
        _ => {}
    }
    out
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for n1 in 0..=5u32 {
        for n0 in 0..=6u32 {
            let layer: BTreeSet<String> = basis_layer(n1, n0).iter().map(|h| h.tree().canonical()).collect();
            let expected = family_layer(n1, n0);
            ensure(layer == expected, || {
                let extra: Vec<_> = layer.difference(&expected).collect();
                let missing: Vec<_> = expected.difference(&layer).collect();
                format!("bidegree ({n1},{n0}): extra {extra:?}, missing {missing:?}")
            })?;
            let wn = witt(n1.into(), n0.into());
            ensure(layer.len() as i128 == wn, || format!("bidegree ({n1},{n0}): {} elements, Witt number {wn}", layer.len()))?;
            checked += layer.len();
        }
    }
    Ok(format!("42 bidegrees, {checked} elements match the named families and Witt numbers"))
}

// ---------------------------------------------------------------- 2

fn random_tree(rng: &mut ChaCha8Rng, len: u32) -> BracketTree {
    if len == 1 {
        return if rng.gen_bool(0.5) { BracketTree::x0() } else { BracketTree::x1() };
    }
    let left = rng.gen_range(1..len);
    let (a, b) = (random_tree(rng, left), random_tree(rng, len - left));
    BracketTree::pair(&a, &b)
}

fn d_coeff(t: &str) -> Result<Rational, String> {
    let t = parse_tree(t).map_err(|e| e.to_string())?;
    Ok(decompose(&t).map_err(|e| e.to_string())?.coeff_of_tree(&d()))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut nonzero = 0;
    for i in 0..500 {
        let len = rng.gen_range(1..=8);
        let t = random_tree(&mut rng, len);
        let e = decompose(&t).map_err(|e| format!("tree {i} {}: {e}", t.canonical()))?;
        let lhs = e.to_series(8);
        let rhs = expand_to_words(&t, 8).map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("tree {i} {}: word expansions differ", t.canonical()))?;
        nonzero += usize::from(!rhs.is_zero());
    }
    let a = d_coeff("(X1,(W(1,1),(X1,(X1,(X1,X0)))))")?;
    ensure(a == -Rational::one(), || format!("first anchor gave {a}"))?;
    let b = d_coeff("(X1,(W(1,0),P(1,1,1)))")?;
    ensure(b == Rational::one(), || format!("second anchor gave {b}"))?;
    // A quadratic element bracketed with a quartic one never reaches D.
    let mut pairs = 0;
    for n0a in 0..=3 {
        for a in basis_layer(2, n0a).iter() {
            for bb in basis_layer(4, 3 - n0a).iter() {
                for t in [BracketTree::pair(a.tree(), bb.tree()), BracketTree::pair(bb.tree(), a.tree())] {
                    let c = decompose(&t).map_err(|e| e.to_string())?.coeff_of_tree(&d());
                    ensure(c.is_zero(), || format!("<{}, D> = {c}", t.canonical()))?;
                    pairs += 1;
                }
            }
        }
    }
    ensure(pairs > 0, || "no quadratic-quartic pairs".into())?;
    Ok(format!("500 trees ({nonzero} nonzero) round-trip; anchors -1, +1 and 0 on {pairs} pairs"))
}

// ---------------------------------------------------------------- 3

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..20 {
        let u = random_control(&mut rng, 3);
        let x = formal_state(&u, 5).map_err(|e| e.to_string())?.series;
        let c = chen_series(&u, 5).map_err(|e| e.to_string())?;
        let o = ordered_product(&u, 5).map_err(|e| e.to_string())?;
        ensure(x == c, || format!("control {i}: formal state differs from the Chen series"))?;
        ensure(c == o, || format!("control {i}: Chen series differs from the ordered product"))?;
        let eta = interaction_log(&u, 5).map_err(|e| e.to_string())?;
        let u1 = u.as_exact().expect("exact control").primitive().end_value();
        ensure(eta.get(&BracketTree::x0()).is_zero(), || format!("control {i}: eta_X0 = {}", eta.get(&BracketTree::x0())))?;
        ensure(eta.get(&BracketTree::x1()) == u1, || format!("control {i}: eta_X1 = {} but u1(t) = {u1}", eta.get(&BracketTree::x1())))?;
    }
    Ok("20 controls, cutoff 5".into())
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let elems: Vec<HallElement> = basis_up_to_length(8).into_iter().filter(|h| (1..=5).contains(&h.tree().n1())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..50 {
        let pieces = rng.gen_range(1..=3);
        let degree = rng.gen_range(0..=2);
        let t = rat(rng.gen_range(1..=10), 10);
        let u = random_piecewise_poly(&mut rng, pieces, degree, &t);
        for h in &elems {
            let a = xi(h.tree(), &u).map_err(|e| format!("{}: {e}", h.label()))?;
            let b = xi_closed_form(h.tree(), &u).map_err(|e| format!("{}: {e}", h.label()))?;
            ensure(a.exact().is_some() && a.exact() == b.exact(), || format!("control {i}, {}: {a} vs closed form {b}", h.label()))?;
        }
    }
    Ok(format!("{} elements x 50 controls", elems.len()))
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let mut mismatches = Vec::new();
    let mut conflicts = Vec::new();
    let mut listed = 0;
    let mut zeros = 0;
    for name in INSTANCES {
        let rep = check_zoo(&zoo(name).map_err(|e| e.to_string())?, REGRESSION_LEN);
        listed += rep.listed;
        zeros += rep.zeros_checked;
        for m in &rep.mismatches {
            mismatches.push(format!("{name} {}", m.bracket));
        }
        for c in &rep.published_conflicts {
            conflicts.push(format!("{name} {}: stated ({}) but evaluates to ({})", c.bracket, c.expected.join(","), c.found.join(",")));
        }
    }
    ensure(mismatches.is_empty(), || format!("mismatches: {}", mismatches.join("; ")))?;
    ensure(conflicts.is_empty(), || {
        format!("{listed} values and {zeros} zeros agree with evaluation, but the stated values differ: {}", conflicts.join("; "))
    })?;
    Ok(format!("{} systems, {listed} stated values, {zeros} vanishing brackets", INSTANCES.len()))
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let caps = Caps::default();
    let mut rows = vec![
        ("easy", "sussmann:1", Verdict::Violated),
        ("w2_vs_q111", "n2", Verdict::Violated),
        ("w2_vs_q111", "wk:2,0", Verdict::Violated),
        ("jakubczyk", "n2", Verdict::Satisfied),
        ("w3_vs_q111", "n3", Verdict::Satisfied),
        ("w3_time", "n3", Verdict::Violated),
        ("wk_prototype:1,4", "wk:1,0", Verdict::Violated),
        ("wk_prototype:2,8", "wk:2,0", Verdict::Violated),
        ("wk_prototype:3,6", "wk:3,0", Verdict::Violated),
        ("sextic:7", "sextic", Verdict::Satisfied),
        ("sextic:8", "sextic", Verdict::Violated),
    ];
    for name in INSTANCES.iter().filter(|n| n.starts_with("w3_vs_") && **n != "w3_vs_q111") {
        rows.push((name, "n3", Verdict::Satisfied));
    }
    for (sys, cond, want) in &rows {
        let c: Condition = cond.parse().map_err(|e: lietool::conditions::ConditionError| e.to_string())?;
        let ev = Evaluator::new(Arc::new(zoo(sys).map_err(|e| e.to_string())?));
        let rep = check_with(&ev, c, &caps).map_err(|e| format!("{sys} {cond}: {e}"))?;
        ensure(rep.verdict == *want, || format!("{sys} {cond}: {} instead of {want}", rep.verdict))?;
    }
    let one = Rational::one();
    let omega = |t: BracketTree| ag_weight(&t, &pi1_w3, &one).map(|a| a.omega).map_err(|e| e.to_string());
    ensure(omega(w(3, 0).unwrap())? == rat(6, 1), || "omega(W3) != 6".into())?;
    let mut weights = 0;
    for nu in 0..=3 {
        for l in 1..=6 {
            let o = omega(p(1, l, nu).unwrap())?;
            ensure([rat(3, 1), rat(4, 1), rat(5, 1)].contains(&o), || format!("omega(P(1,{l},{nu})) = {o}"))?;
            weights += 1;
        }
        let mut fives = vec![q(1, 1, 2, nu).unwrap(), r(1, 1, 1, 1, nu).unwrap()];
        fives.extend((0..=2).map(|mu| rs(1, 1, 1, mu, nu).unwrap()));
        for t in fives {
            let o = omega(t.clone())?;
            ensure(o == rat(5, 1), || format!("omega({}) = {o}", t.canonical()))?;
            weights += 1;
        }
    }
    Ok(format!("{} verdicts and {} weights", rows.len(), weights + 1))
}

// ---------------------------------------------------------------- 7

fn slope(lambdas: &[f64], values: &[f64]) -> f64 {
    let xs: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

const LAMBDAS: [(i64, i64); 4] = [(1, 1), (1, 2), (1, 4), (1, 8)];

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 10 {
        let pieces = rng.gen_range(2..=4);
        let v = lietool::coord2::random_piecewise_constant(&mut rng, pieces, &rat(1, 1), &rat(1, 1));
        let u = rescale_to_precondition(&v).map_err(|e| e.to_string())?;
        let (u2, i2) = lietool::simulate::moments(u.as_exact().expect("exact"));
        if i2.is_zero() || (&u2 + &i2 / rat(2, 1)) != Rational::zero() {
            continue;
        }
        let r = pure_counterexample_check(&u, 1e-4).map_err(|e| e.to_string())?;
        ensure(r.ok(), || format!("control {done}: error {:e} against {:e}", r.error, r.predicted[2]))?;
        worst = worst.max(r.error);
        done += 1;
    }
    let (wp, hp) = quartic_pair();
    let mut gaps = Vec::new();
    for (a, b) in LAMBDAS {
        let u = quartic_family(&wp, &hp, &rat(a, b));
        let (_, _, disc) = pure_discrepancy(&u, 1e-4).map_err(|e| e.to_string())?;
        gaps.push(disc[2].abs());
    }
    let ls: Vec<f64> = LAMBDAS.iter().map(|&(a, b)| a as f64 / b as f64).collect();
    let s = slope(&ls, &gaps);
    ensure((s - 4.0).abs() <= 0.1, || format!("identity holds (max error {worst:e}) but the scaling slope is {s:.3}"))?;
    Ok(format!("10 controls, max error {worst:.1e}; slope {s:.3}"))
}

// ---------------------------------------------------------------- 8

/// Piecewise-constant control on [0, 1] with u1(1) = u2(1) = u3(1) = u4(1) = 0, obtained by
/// projecting random piece values onto the kernel of the moment map.
fn zero_moment_control(rng: &mut ChaCha8Rng, pieces: usize) -> ControlSignal {
    let breaks: Vec<Rational> = (0..=pieces).map(|i| rat(i as i64, pieces as i64)).collect();
    let v: Vec<Rational> = (0..pieces).map(|_| rat(rng.gen_range(-4..=4), 2)).collect();
    let moment = |j: u32, a: &Rational, b: &Rational| {
        let one = Rational::one();
        let pw = |x: Rational| (0..=j).fold(Rational::one(), |acc, _| acc * &x);
        (pw(&one - a) - pw(&one - b)) / lietool::algebra_core::factorial(j + 1)
    };
    let a: Vec<Vec<Rational>> = (0..4).map(|j| breaks.windows(2).map(|w| moment(j, &w[0], &w[1])).collect()).collect();
    let gram: Vec<Vec<Rational>> = a.iter().map(|r| a.iter().map(|s| dot(r, s)).collect()).collect();
    let av: Vec<Rational> = a.iter().map(|r| dot(r, &v)).collect();
    let y = basic_solution(&gram, &av).expect("moment rows are independent");
    let values: Vec<Rational> = (0..pieces).map(|i| &v[i] - (0..4).map(|j| &a[j][i] * &y[j]).sum::<Rational>()).collect();
    ControlSignal::piecewise_constant(breaks, values).expect("valid partition")
}

fn criterion_8() -> Outcome {
    let sys = zoo("easy").map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ls: Vec<f64> = LAMBDAS.iter().map(|&(a, b)| a as f64 / b as f64).collect();
    let mut report = Vec::new();
    for i in 0..3 {
        let u0 = zero_moment_control(&mut rng, 8);
        for big_m in 1..=2u32 {
            let mut residuals = Vec::new();
            for (a, b) in LAMBDAS {
                let u = u0.scaled(&rat(a, b));
                let x = integrate(&sys, &u, 1e-4).map_err(|e| e.to_string())?;
                let z = zm_state(&sys, &u, big_m, 8).map_err(|e| e.to_string())?;
                let res = x.final_state().iter().zip(&z.state).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
                residuals.push(res);
            }
            let s = slope(&ls, &residuals);
            ensure(s >= f64::from(big_m) + 0.8, || format!("control {i}, M = {big_m}: slope {s:.3}, residuals {residuals:?}"))?;
            report.push(format!("{s:.2}"));
        }
    }
    Ok(format!("slopes (M=1, M=2) on 3 zero-moment controls: {}", report.join(" ")))
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Outcome {
    let params = DriftParams {
        eps: 0.1,
        c: 10.0,
        beta: 1.5,
        t_max: rat(1, 10),
        rho: rat(1, 10),
        trials: 200,
        seed: 1,
        steps: 400,
    };
    let mut out = Vec::new();
    for (sys, b, fam) in [("easy", w(1, 0).unwrap(), "s1"), ("w2_vs_q111", w(2, 0).unwrap(), "n2")] {
        let ev = Evaluator::new(Arc::new(zoo(sys).map_err(|e| e.to_string())?));
        let f = drift_family(fam).map_err(|e| e.to_string())?;
        let rep = drift_scan(&ev, &b, &f, &Caps::default(), &params).map_err(|e| format!("{sys}: {e}"))?;
        ensure(rep.pass, || format!("{sys}: min margin {:e}", rep.min_margin))?;
        out.push(format!("{sys} min margin {:.2e} over {}", rep.min_margin, rep.samples.len()));
    }
    Ok(out.join("; "))
}

// ---------------------------------------------------------------- 10

/// Random piecewise-constant control followed by its negation, so that u1(t) = 0.
fn balanced(rng: &mut ChaCha8Rng) -> ControlSignal {
    let n = rng.gen_range(1..=3);
    let mut breaks = vec![Rational::zero()];
    let mut values = Vec::new();
    let mut lens = Vec::new();
    for _ in 0..n {
        lens.push(rat(rng.gen_range(1..=5), 10));
        values.push(rat(rng.gen_range(-10..=10), 5));
    }
    let mut t = Rational::zero();
    for l in lens.iter().chain(&lens) {
        t += l;
        breaks.push(t.clone());
    }
    let all: Vec<Rational> = values.iter().cloned().chain(values.iter().map(|v| -v)).collect();
    ControlSignal::piecewise_constant(breaks, all).expect("valid partition")
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut gated = 0;
    let mut checks = 0;
    for i in 0..200 {
        let u = if i % 2 == 0 {
            let pieces = rng.gen_range(1..=3);
            let degree = rng.gen_range(0..=2);
            let t = rat(rng.gen_range(1..=10), 10);
            random_piecewise_poly(&mut rng, pieces, degree, &t)
        } else {
            balanced(&mut rng)
        };
        let rep = check_inequalities(&u, 5).map_err(|e| e.to_string())?;
        let fails: Vec<String> = rep.failures().iter().map(|c| format!("{} ({:e} > {:e})", c.name, c.lhs, c.rhs)).collect();
        ensure(fails.is_empty(), || format!("control {i}: {}", fails.join(", ")))?;
        checks += rep.checks.len();
        gated += rep.checks.iter().filter(|c| c.name == "l5_vs_l2_squared" && c.status == Status::Holds).count();
    }
    ensure(gated >= 100, || format!("gated inequality applied only {gated} times"))?;
    Ok(format!("200 controls, {checks} comparisons, gated inequality applied {gated} times"))
}

// ----------------------------------------------------------------

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, u64); 10] = [
        (1, "basis families and Witt counts", criterion_1, 10),
        (2, "decomposition oracle", criterion_2, 60),
        (3, "expansion identities", criterion_3, 60),
        (4, "xi closed forms", criterion_4, 120),
        (5, "zoo regression", criterion_5, 60),
        (6, "condition verdicts", criterion_6, 120),
        (7, "cross-terms counterexample", criterion_7, 30),
        (8, "representation-formula scaling", criterion_8, 60),
        (9, "drift scans", criterion_9, 300),
        (10, "inequality suite", criterion_10, 60),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut passed = 0;
    for (n, name, f, budget) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let outcome = outcome.and_then(|s| {
            if took > Duration::from_secs(budget) {
                Err(format!("{s}, but took {:.1}s over the {budget}s budget", took.as_secs_f64()))
            } else {
                Ok(s)
            }
        });
        match outcome {
            Ok(s) => {
                passed += 1;
                println!("criterion {n}: PASS  {name}: {s} [{:.1}s]", took.as_secs_f64());
            }
            Err(s) => println!("criterion {n}: FAIL  {name}: {s} [{:.1}s]", took.as_secs_f64()),
        }
    }
    let _ = panic::take_hook();
    println!("acceptance: {passed}/10 passed");
}
