//! Command-line front end for the `lietool` binary.

use std::ffi::OsString;
use std::fs;
use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra_core::{parse_rational, parse_tree, BracketTree, Rational};
use crate::conditions::{ag_screen, check_with, label, pi1_w3, Caps, Condition, Verdict};
use crate::coord2::{xi, xi_closed_form, ControlSignal};
use crate::expansions::verify_expansions;
use crate::hall_bstar::{basis_layer, decompose, enumerate_basis, HallElement};
use crate::simulate::{drift_family, drift_scan, integrate_with_estimate, zm_state, DriftParams};
use crate::vector_fields::{check_zoo, zoo, zoo_list, Evaluator, SystemDef, REGRESSION_LEN};

const TREE_GRAMMAR: &str = "trees: X0 | X1 | (T,T) | named forms M(nu) W(j,nu) P(j,k,nu) Q(j,k,l,nu) Qs(j,mu,k,nu) Qf(j,mu,nu) R(j,k,l,m,nu) Rs(j,k,l,mu,nu) D";
const SYSTEM_FORMAT: &str = r#"system: zoo:NAME or a JSON file {"dim": d, "f0": [[{"coeff":"p/q","powers":[e1,...,ed]}, ...] x d], "f1": [...]}"#;
const CONTROL_FORMAT: &str = r#"control: {"type":"piecewise_poly","t":"1","breakpoints":["0","1/2","1"],"pieces":[["1"],["-1"]]} (piece polynomials in s - t_i) or {"type":"samples","t":1.0,"values":[...]}"#;

#[derive(Parser, Debug)]
#[command(name = "lietool", version, about = "Hall basis B*, coordinates of the second kind and STLC obstruction checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// List B* elements with n1 <= N1 and n0 <= N0 (or exactly (N1, N0) with --exact).
    Basis {
        #[arg(long)]
        n1: u32,
        #[arg(long)]
        n0: u32,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decompose a tree on B*.
    Decompose {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        json: bool,
    },
    /// Coordinate of the second kind xi_b(t, u).
    Xi {
        #[arg(long)]
        bracket: String,
        #[arg(long)]
        control: String,
        #[arg(long)]
        closed_form: bool,
        #[arg(long)]
        json: bool,
    },
    /// f_b(0) for a system.
    Eval {
        #[arg(long)]
        system: String,
        #[arg(long)]
        bracket: String,
        #[arg(long)]
        json: bool,
    },
    /// Necessary-condition check: sussmann:K | wk:K,M | wk-screen:K,M | n2 | n3 | sextic | ag:SIGMA,R.
    Check {
        #[arg(long)]
        system: String,
        #[arg(long)]
        condition: String,
        #[arg(long, default_value_t = 12)]
        cap_n0: u32,
        #[arg(long, default_value_t = 12)]
        cap_index: u32,
        /// Stability window; defaults to the dimension.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        fail_on_violation: bool,
    },
    /// Exact expansion identities on seeded random controls.
    VerifyExpansions {
        #[arg(long, default_value_t = 5)]
        degree: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// RK4 trajectory from x(0) = 0.
    Simulate {
        #[arg(long)]
        system: String,
        #[arg(long)]
        control: String,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Write the trajectory as CSV (time, x1..xd).
        #[arg(long)]
        csv: Option<String>,
        /// Also report Z_M(0) and the residual for this M.
        #[arg(long)]
        zm: Option<u32>,
        #[arg(long, default_value_t = 6)]
        length_cutoff: usize,
        #[arg(long)]
        json: bool,
    },
    /// Drift inequality scan over seeded random and bang-bang controls.
    DriftScan {
        #[arg(long)]
        system: String,
        #[arg(long)]
        bracket: String,
        /// s1 | n2 | n3 | loose:K,M | sextic
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long = "C", default_value_t = 10.0)]
        c: f64,
        #[arg(long, default_value_t = 1.5)]
        beta: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "1/10")]
        t_max: String,
        #[arg(long, default_value = "1/10")]
        rho: String,
        #[arg(long, default_value_t = 400)]
        steps: usize,
        #[arg(long, default_value_t = 12)]
        cap_n0: u32,
        #[arg(long, default_value_t = 12)]
        cap_index: u32,
        #[arg(long)]
        json: bool,
    },
    /// Example systems.
    Zoo {
        #[arg(long)]
        list: bool,
        /// Print a system file and its known values.
        #[arg(long)]
        show: Option<String>,
        /// Regression of the known values against direct evaluation.
        #[arg(long)]
        check: Option<String>,
        #[arg(long, default_value_t = REGRESSION_LEN)]
        max_len: u32,
        #[arg(long)]
        json: bool,
    },
}

/// Exit status: 0 done, 1 violated with --fail-on-violation, 2 usage or input error, 3 runtime failure.
struct Failure {
    code: i32,
    err: anyhow::Error,
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, err: e.into() }
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 3, err: e.into() }
}

struct Out {
    json: bool,
    header: Vec<(String, String)>,
    command: String,
}

impl Out {
    fn new(command: &str, json: bool) -> Self {
        Out {
            json,
            header: Vec::new(),
            command: command.into(),
        }
    }

    fn arg(mut self, k: &str, v: impl ToString) -> Self {
        self.header.push((k.into(), v.to_string()));
        self
    }

    fn header_text(&self) -> String {
        let kv: Vec<String> = self.header.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("# lietool {} {} {}", env!("CARGO_PKG_VERSION"), self.command, kv.join(" "))
    }

    fn emit(&self, report: &impl Serialize, text: impl FnOnce() -> String) {
        if self.json {
            let run: serde_json::Map<String, Value> = self.header.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
            let doc = json!({
                "run": {"tool": "lietool", "version": env!("CARGO_PKG_VERSION"), "command": self.command, "args": run},
                "report": report,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        } else {
            println!("{}", self.header_text());
            print!("{}", text());
        }
    }
}

fn load_system(spec: &str) -> Result<SystemDef> {
    match spec.strip_prefix("zoo:") {
        Some(name) => Ok(zoo(name)?),
        None => {
            let text = fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
            Ok(SystemDef::from_json(&text)?)
        }
    }
}

fn load_control(path: &str) -> Result<ControlSignal> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    Ok(ControlSignal::from_json(&text)?)
}

fn tree(text: &str) -> Result<BracketTree> {
    Ok(parse_tree(text)?)
}

fn rational(text: &str) -> Result<Rational> {
    Ok(parse_rational(text)?)
}

fn vec_text(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn hall_line(h: &HallElement) -> String {
    match h.named() {
        Some(n) => format!("{}\t{}", h.tree().canonical(), n),
        None => h.tree().canonical(),
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.cmd {
        Cmd::Basis { n1, n0, exact, json } => {
            let elems: Vec<HallElement> = if exact {
                basis_layer(n1, n0).to_vec()
            } else {
                enumerate_basis(n1, n0)
            };
            let report: Vec<Value> = elems
                .iter()
                .map(|h| json!({"tree": h.tree().canonical(), "named": h.named().map(|n| n.to_string()), "n1": h.tree().n1(), "n0": h.tree().n0()}))
                .collect();
            Out::new("basis", json)
                .arg("n1", n1)
                .arg("n0", n0)
                .arg("exact", exact)
                .emit(&report, || elems.iter().map(|h| hall_line(h) + "\n").collect());
        }
        Cmd::Decompose { tree: t, json } => {
            let b = tree(&t).map_err(usage)?;
            let lie = decompose(&b).map_err(usage)?;
            let terms: Vec<(String, String)> = lie.iter().map(|(h, c)| (c.to_string(), h.label())).collect();
            let report: Vec<Value> = lie
                .iter()
                .map(|(h, c)| json!({"coeff": c.to_string(), "element": h.label(), "tree": h.tree().canonical()}))
                .collect();
            Out::new("decompose", json)
                .arg("tree", &t)
                .emit(&report, || terms.iter().map(|(c, h)| format!("{c}\t{h}\n")).collect());
        }
        Cmd::Xi {
            bracket,
            control,
            closed_form,
            json,
        } => {
            let b = tree(&bracket).map_err(usage)?;
            let u = load_control(&control).map_err(usage)?;
            let v = if closed_form { xi_closed_form(&b, &u) } else { xi(&b, &u) }.map_err(usage)?;
            let report = match &v {
                crate::coord2::XiValue::Exact(q) => json!({"bracket": label(&b), "exact": true, "value": q.to_string()}),
                crate::coord2::XiValue::Approx { value, error } => {
                    json!({"bracket": label(&b), "exact": false, "value": value, "error": error})
                }
            };
            Out::new("xi", json)
                .arg("bracket", &bracket)
                .arg("control", &control)
                .arg("closed_form", closed_form)
                .emit(&report, || format!("{v}\n"));
        }
        Cmd::Eval { system, bracket, json } => {
            let sys = load_system(&system).map_err(usage)?;
            let b = tree(&bracket).map_err(usage)?;
            let v = Evaluator::new(Arc::new(sys)).eval_bracket(&b);
            let report = json!({"bracket": label(&b), "value": strings(&v)});
            Out::new("eval", json)
                .arg("system", &system)
                .arg("bracket", &bracket)
                .emit(&report, || vec_text(&v) + "\n");
        }
        Cmd::Check {
            system,
            condition,
            cap_n0,
            cap_index,
            window,
            json,
            fail_on_violation,
        } => {
            let sys = load_system(&system).map_err(usage)?;
            let caps = Caps { cap_n0, cap_index, window };
            let out = Out::new("check", json)
                .arg("system", &system)
                .arg("condition", &condition)
                .arg("cap_n0", cap_n0)
                .arg("cap_index", cap_index)
                .arg("window", window.map(|w| w.to_string()).unwrap_or_else(|| format!("{} (dim)", sys.dim())));
            let ev = Evaluator::new(Arc::new(sys));
            if let Some(args) = condition.strip_prefix("ag:") {
                let (s, r) = args.split_once(',').ok_or_else(|| usage(anyhow!("ag needs ag:SIGMA,R")))?;
                let (sigma, r) = (rational(s).map_err(usage)?, rational(r).map_err(usage)?);
                let rep = ag_screen(&ev, &pi1_w3, &sigma, &r, &caps).map_err(usage)?;
                out.emit(&rep, || {
                    let mut s = format!("{}\n", if rep.passed() { "passed" } else { "not passed" });
                    s += &format!("compensated: {}\nspanning: {}\nstabilized: {}\n", rep.compensated, rep.spanning, rep.stabilized);
                    for e in &rep.entries {
                        s += &format!(
                            "{}\tlayer {}\tomega {}\t{}{}\n",
                            e.bracket,
                            e.layer,
                            e.omega,
                            vec_text(&e.value),
                            match e.compensated {
                                Some(true) => "\tcompensated",
                                Some(false) => "\tNOT compensated",
                                None => "",
                            }
                        );
                    }
                    s
                });
                return Ok(0);
            }
            let c: Condition = condition.parse().map_err(usage)?;
            let rep = check_with(&ev, c, &caps).map_err(usage)?;
            out.emit(&rep, || {
                let mut s = format!("{}\n", rep.verdict);
                s += &format!("target {} = {}\n", rep.target, vec_text(&rep.target_value));
                let mode = serde_json::to_value(rep.mode).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                s += &format!("family {} ({} members evaluated, mode {mode})\n", rep.family, rep.evaluated);
                s += &format!("rank {} of {}, stabilized {}\n", rep.rank, rep.dim, rep.stabilized);
                for v in &rep.span {
                    s += &format!("  {}\t{}\n", v.bracket, vec_text(&v.value));
                }
                if let Some(p) = &rep.functional {
                    s += &format!("component functional P = {}\n", vec_text(p));
                }
                if let Some(c) = &rep.combination {
                    let parts: Vec<String> = c.iter().map(|t| format!("{}*{}", t.coeff, t.bracket)).collect();
                    s += &format!("combination: {}\n", if parts.is_empty() { "0".into() } else { parts.join(" + ") });
                }
                for n in &rep.notes {
                    s += &format!("note: {n}\n");
                }
                s
            });
            if fail_on_violation && rep.verdict == Verdict::Violated {
                return Ok(1);
            }
        }
        Cmd::VerifyExpansions { degree, trials, seed, json } => {
            let rows = verify_expansions(degree, trials, seed).map_err(usage)?;
            let report: Vec<Value> = rows
                .iter()
                .map(|r| json!({"identity": r.identity, "trials": r.trials, "passed": r.passed, "ok": r.ok(), "detail": r.detail}))
                .collect();
            Out::new("verify-expansions", json)
                .arg("degree", degree)
                .arg("trials", trials)
                .arg("seed", seed)
                .emit(&report, || {
                    rows.iter()
                        .map(|r| {
                            format!(
                                "{:<28} {}/{} {}{}\n",
                                r.identity,
                                r.passed,
                                r.trials,
                                if r.ok() { "PASS" } else { "FAIL" },
                                r.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default()
                            )
                        })
                        .collect()
                });
        }
        Cmd::Simulate {
            system,
            control,
            step,
            csv,
            zm,
            length_cutoff,
            json,
        } => {
            let sys = load_system(&system).map_err(usage)?;
            let u = load_control(&control).map_err(usage)?;
            if !(step > 0.0) {
                return Err(usage(anyhow!("--step must be positive")));
            }
            let tr = integrate_with_estimate(&sys, &u, step).map_err(runtime)?;
            if let Some(path) = &csv {
                fs::write(path, tr.to_csv()).with_context(|| format!("writing {path}")).map_err(runtime)?;
            }
            let z = match zm {
                Some(m) => Some(zm_state(&sys, &u, m, length_cutoff).map_err(runtime)?),
                None => None,
            };
            let x = tr.final_state().to_vec();
            let residual = z
                .as_ref()
                .map(|z| x.iter().zip(&z.state).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt());
            let report = json!({
                "t": tr.times.last(),
                "state": x,
                "steps": tr.times.len() - 1,
                "step": tr.step,
                "method": tr.method,
                "error_estimate": tr.error_estimate,
                "zm": z,
                "residual": residual,
            });
            let mut out = Out::new("simulate", json)
                .arg("system", &system)
                .arg("control", &control)
                .arg("step", step)
                .arg("csv", csv.as_deref().unwrap_or("-"));
            if let Some(m) = zm {
                out = out.arg("zm", m).arg("length_cutoff", length_cutoff);
            }
            out.emit(&report, || {
                let mut s = format!("x(t) = {x:?}\nrk4 steps {}, step {:e}, error estimate {:e}\n", tr.times.len() - 1, tr.step, tr.error_estimate.unwrap_or(f64::NAN));
                if let (Some(z), Some(r)) = (&z, residual) {
                    s += &format!("Z_{}(0) = {:?}\nresidual |x - Z| = {r:e}\n", z.m, z.state);
                }
                s
            });
        }
        Cmd::DriftScan {
            system,
            bracket,
            family,
            eps,
            c,
            beta,
            trials,
            seed,
            t_max,
            rho,
            steps,
            cap_n0,
            cap_index,
            json,
        } => {
            let sys = load_system(&system).map_err(usage)?;
            let b = tree(&bracket).map_err(usage)?;
            let fam = drift_family(&family).map_err(usage)?;
            let params = DriftParams {
                eps,
                c,
                beta,
                t_max: rational(&t_max).map_err(usage)?,
                rho: rational(&rho).map_err(usage)?,
                trials,
                seed,
                steps,
            };
            let caps = Caps {
                cap_n0,
                cap_index,
                window: None,
            };
            let ev = Evaluator::new(Arc::new(sys));
            let rep = drift_scan(&ev, &b, &fam, &caps, &params).map_err(runtime)?;
            let threads = std::env::var("LIETOOL_THREADS").unwrap_or_else(|_| "default".into());
            Out::new("drift-scan", json)
                .arg("system", &system)
                .arg("bracket", &bracket)
                .arg("family", &family)
                .arg("eps", eps)
                .arg("C", c)
                .arg("beta", beta)
                .arg("trials", trials)
                .arg("seed", seed)
                .arg("t_max", &t_max)
                .arg("rho", &rho)
                .arg("steps", steps)
                .arg("threads", threads)
                .emit(&rep, || {
                    let worst = rep.samples.iter().min_by(|a, b| a.margin.total_cmp(&b.margin));
                    format!(
                        "{}\ncomponent P = {}\ncontrols {}\nmin margin {:e}{}\nmin weak margin {:e}\n{}",
                        if rep.pass { "pass" } else { "fail" },
                        vec_text(&rep.functional),
                        rep.samples.len(),
                        rep.min_margin,
                        worst.map(|w| format!(" ({})", w.kind)).unwrap_or_default(),
                        rep.min_weak_margin,
                        if rep.weak_variant_only { "note: W3 target, only the weak variant is claimed\n" } else { "" }
                    )
                });
        }
        Cmd::Zoo {
            list,
            show,
            check,
            max_len,
            json,
        } => {
            if let Some(name) = show {
                let sys = zoo(&name).map_err(usage)?;
                let file: Value = serde_json::from_str(&sys.to_json()).expect("valid json");
                let expected: Vec<Value> = sys
                    .expected
                    .iter()
                    .map(|e| json!({"bracket": label(&e.bracket), "published": strings(&e.value), "corrected": e.corrected.as_deref().map(strings)}))
                    .collect();
                let report = json!({"name": sys.name, "description": sys.description, "system": file, "expected": expected, "exhaustive_len": sys.exhaustive_len});
                Out::new("zoo", json).arg("show", &name).emit(&report, || {
                    let mut s = format!("{}: {}\n", sys.name, sys.description);
                    for (i, p) in sys.f0().components().iter().enumerate() {
                        s += &format!("x{}' = {} + u*({})\n", i + 1, p, sys.f1().components()[i]);
                    }
                    for e in &sys.expected {
                        s += &format!("f_{}(0) = {}", label(&e.bracket), vec_text(e.actual()));
                        if e.corrected.is_some() {
                            s += &format!("  (published {})", vec_text(&e.value));
                        }
                        s += "\n";
                    }
                    s
                });
            } else if let Some(name) = check {
                let sys = zoo(&name).map_err(usage)?;
                let rep = check_zoo(&sys, max_len);
                let report = json!({"check": &rep, "ok": rep.ok()});
                Out::new("zoo", json).arg("check", &name).arg("max_len", max_len).emit(&report, || {
                    let mut s = format!(
                        "{} ({} listed values, {} zero brackets checked)\n",
                        if rep.ok() { "ok" } else { "MISMATCH" },
                        rep.listed,
                        rep.zeros_checked
                    );
                    for m in &rep.mismatches {
                        s += &format!("  {}: expected ({}), found ({})\n", m.bracket, m.expected.join(", "), m.found.join(", "));
                    }
                    for c in &rep.published_conflicts {
                        s += &format!("  published value for {} is ({}), evaluation gives ({})\n", c.bracket, c.expected.join(", "), c.found.join(", "));
                    }
                    s
                });
            } else if list {
                let rows: Vec<Value> = zoo_list()
                    .iter()
                    .map(|(n, d, desc)| json!({"name": n, "default_args": d, "description": desc}))
                    .collect();
                Out::new("zoo", json).arg("list", true).emit(&rows, || {
                    zoo_list()
                        .iter()
                        .map(|(n, d, desc)| {
                            let args = if d.is_empty() { String::new() } else { format!(" [{d}]") };
                            format!("{n}{args}\t{desc}\n")
                        })
                        .collect()
                });
            } else {
                return Err(usage(anyhow!("zoo needs --list, --show NAME or --check NAME")));
            }
        }
    }
    Ok(0)
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            if code == 2 {
                eprintln!("\n{TREE_GRAMMAR}\n{SYSTEM_FORMAT}\n{CONTROL_FORMAT}");
            }
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            if code == 2 {
                eprintln!("\n{TREE_GRAMMAR}\n{SYSTEM_FORMAT}\n{CONTROL_FORMAT}");
            }
            code
        }
    }
}
