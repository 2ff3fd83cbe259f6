mod args;
mod report;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use thermocap::asymptotics::{
    constrained_holevo, regularized_capacity_series, shannon_capacity, stein_series, HolevoBudget, SeriesOptions,
};
use thermocap::bounds::{capacity_sandwich, equilibrium_sandwich, landauer_scenario, work_sandwich, ScenarioOptions, SearchBudget};
use thermocap::coding::{one_shot_capacity, theta_equilibrium_capacity, SearchOptions};
use thermocap::entropy::{d0_smoothed_with, dh_smoothed, relative_entropy, D0Options};
use thermocap::thermo::{extractable_work, work_from_correlation, Precision, Schedule, WorkBudget, WorkOptions};
use thermocap::{Distribution, ErrorParams, Exec, Hamiltonian, JointDistribution, StochasticChannel};

use args::{Asymptotics, BoundCheck, Cli, Command, EntropyKind, ExecMode, Format, Global, Protocol, ScheduleArg};
use report::Report;

const THREADS_VAR: &str = "THERMOCAP_THREADS";

type Fallible<T> = Result<T, String>;

fn load<T: DeserializeOwned>(path: &Path) -> Fallible<T> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialise")
}

fn lib<T>(r: thermocap::Result<T>) -> Fallible<T> {
    r.map_err(|e| e.to_string())
}

/// Input files, echoed as `{name: {path, value}}`.
struct Inputs(serde_json::Map<String, Value>);

impl Inputs {
    fn new() -> Self {
        Self(serde_json::Map::new())
    }

    fn read<T: DeserializeOwned + Serialize>(&mut self, name: &str, path: &Path) -> Fallible<T> {
        let x: T = load(path)?;
        self.0.insert(name.into(), json!({"path": path.display().to_string(), "value": value(&x)}));
        Ok(x)
    }
}

impl Global {
    fn exec(&self) -> Exec {
        match self.exec {
            ExecMode::Parallel => Exec::Parallel,
            ExecMode::Sequential => Exec::Sequential,
        }
    }

    fn search(&self, max_messages: Option<usize>) -> SearchOptions {
        let b = &self.budget;
        let d = SearchOptions::default();
        SearchOptions {
            max_messages,
            budget: b.budget_codebooks.unwrap_or(d.budget),
            randomized: b.budget_randomized,
            samples: b.budget_samples.unwrap_or(d.samples),
            seed: self.seed,
            exec: self.exec(),
        }
    }

    fn search_budget(&self) -> SearchBudget {
        let b = &self.budget;
        let d = SearchBudget::default();
        SearchBudget {
            capacity: self.search(None),
            max_messages: b.budget_messages.unwrap_or(d.max_messages),
            codebooks_per_size: b.budget_family.unwrap_or(d.codebooks_per_size),
            random_inputs: b.budget_random.unwrap_or(d.random_inputs),
            seed: self.seed,
        }
    }

    fn holevo(&self) -> HolevoBudget {
        let b = &self.budget;
        let d = HolevoBudget::default();
        HolevoBudget {
            max_messages: b.budget_messages.unwrap_or(d.max_messages),
            encoders_per_size: b.budget_family.unwrap_or(d.encoders_per_size),
            random_pairs: b.budget_random.unwrap_or(d.random_pairs),
            seed: self.seed,
            exec: self.exec(),
            ..d
        }
    }

    fn work(&self, p: Option<&Protocol>) -> WorkBudget {
        let b = &self.budget;
        let d = WorkBudget::default();
        let w = WorkOptions::default();
        WorkBudget {
            e_cut: p.and_then(|p| p.ecut).unwrap_or(d.e_cut),
            k_steps: p.and_then(|p| p.ksteps).unwrap_or(d.k_steps),
            schedule: match p.and_then(|p| p.schedule) {
                Some(ScheduleArg::UniformEnergy) => Schedule::UniformEnergy,
                Some(ScheduleArg::ThermodynamicLength) => Schedule::ThermodynamicLength,
                None => d.schedule,
            },
            max_candidates: b.budget_candidates.unwrap_or(d.max_candidates),
            work: WorkOptions {
                atom_budget: b.budget_atoms.unwrap_or(w.atom_budget),
                mc_samples: b.budget_mc_samples.unwrap_or(w.mc_samples),
                seed: self.seed,
                exec: self.exec(),
                ..w
            },
        }
    }

    /// The effective budget, echoed so a report alone is enough to rerun it.
    fn budget_echo(&self, work: Option<&WorkBudget>) -> Value {
        let s = self.search_budget();
        let h = self.holevo();
        let mut v = json!({
            "codebooks": s.capacity.budget,
            "randomized": s.capacity.randomized,
            "samples": s.capacity.samples,
            "messages": s.max_messages,
            "family": s.codebooks_per_size,
            "random": s.random_inputs,
            "holevo_random_pairs": h.random_pairs,
        });
        if let Some(w) = work {
            let o = v.as_object_mut().expect("object");
            o.insert("e_cut".into(), json!(w.e_cut));
            o.insert("k_steps".into(), json!(w.k_steps));
            o.insert("schedule".into(), value(&w.schedule));
            o.insert("candidates".into(), json!(w.max_candidates));
            o.insert("atoms".into(), json!(w.work.atom_budget));
            o.insert("mc_samples".into(), json!(w.work.mc_samples));
        }
        v
    }
}

fn precision(delta: Option<f64>) -> Precision {
    delta.map_or(Precision::Tightest, Precision::Fixed)
}

/// Adds work values rescaled by the bath temperature.
fn with_temperature(mut r: Report, t: f64, keys: &[(&str, f64)]) -> Report {
    if t != 1.0 {
        let scaled: serde_json::Map<String, Value> = keys.iter().map(|(k, v)| (k.to_string(), json!(v * t))).collect();
        r.insert("at_temperature", json!({"temperature": t, "values": scaled}));
    }
    r
}

fn run(cli: &Cli) -> Fallible<(String, Value, Report)> {
    let g = &cli.global;
    let mut inputs = Inputs::new();
    let (name, params, report) = match &cli.command {
        Command::Entropy { kind, p, q, eps } => {
            let p: Distribution = inputs.read("p", p)?;
            let q: Distribution = inputs.read("q", q)?;
            let need_eps = || eps.ok_or_else(|| "--eps is required".to_string());
            let r = match kind {
                EntropyKind::D0 => {
                    let opts = D0Options { exec: g.exec(), allow_heuristic: true };
                    let v = lib(d0_smoothed_with(&p, &q, need_eps()?, &opts))?;
                    json!({"bits": value(&v).get("bits"), "witness": v.witness.indices, "witness_state_mass": v.witness.q_mass,
                           "witness_reference_mass": v.witness.r_mass, "method": value(&v.method)})
                }
                EntropyKind::Dh => {
                    let v = lib(dh_smoothed(&p, &q, need_eps()?))?;
                    json!({"bits": value(&v).get("bits"), "cost": v.cost, "test": v.test.weights})
                }
                EntropyKind::Rel => json!({"bits": lib(relative_entropy(&p, &q))?}),
            };
            let name = match kind {
                EntropyKind::D0 => "entropy d0",
                EntropyKind::Dh => "entropy dh",
                EntropyKind::Rel => "entropy rel",
            };
            (name, json!({"eps": eps}), Report::new(r))
        }
        Command::Capacity { channel, eps, theta, max_m } => {
            let ch: StochasticChannel = inputs.read("channel", channel)?;
            let opts = g.search(*max_m);
            let r = match theta {
                Some(t) => lib(theta_equilibrium_capacity(&ch, *eps, *t, &opts))?,
                None => lib(one_shot_capacity(&ch, *eps, &opts))?,
            };
            ("capacity", json!({"eps": eps, "theta": theta, "max_m": max_m}), Report::new(value(&r)))
        }
        Command::Workext { state, hamiltonian, eps, delta, protocol } => {
            let eta: Distribution = inputs.read("state", state)?;
            let h: Hamiltonian = inputs.read("hamiltonian", hamiltonian)?;
            let budget = g.work(Some(protocol));
            let w = lib(extractable_work(&eta, &h, *eps, precision(*delta), &budget))?;
            let r = with_temperature(Report::new(value(&w)), g.temperature, &[("value", w.value), ("delta", w.delta)]);
            ("workext", json!({"eps": eps, "delta": delta, "budget": g.budget_echo(Some(&budget))}), r)
        }
        Command::Wcorr { joint, eps, delta, protocol } => {
            let j: JointDistribution = inputs.read("joint", joint)?;
            let budget = g.work(Some(protocol));
            let w = lib(work_from_correlation(&j, *eps, precision(*delta), &budget))?;
            let keys = [("value", w.work.value), ("delta", w.work.delta)];
            let r = with_temperature(Report::new(value(&w)), g.temperature, &keys);
            ("wcorr", json!({"eps": eps, "delta": delta, "budget": g.budget_echo(Some(&budget))}), r)
        }
        Command::Bounds { check, channel, eps, omega, delta, theta } => {
            let ch: StochasticChannel = inputs.read("channel", channel)?;
            let budget = g.search_budget();
            let mut params = ErrorParams::new(*eps);
            params.omega = *omega;
            params.delta = *delta;
            params.theta = *theta;
            let (name, r) = match check {
                BoundCheck::Capacity => ("bounds capacity", lib(capacity_sandwich(&ch, &params, &budget))?),
                BoundCheck::Work => ("bounds work", lib(work_sandwich(&ch, &params, &budget))?),
                BoundCheck::Equilibrium => {
                    let t = theta.ok_or("--theta is required for the equilibrium check")?;
                    ("bounds equilibrium", lib(equilibrium_sandwich(&ch, *eps, t, &budget))?)
                }
            };
            (name, json!({"error": value(&params), "budget": g.budget_echo(None)}), Report::new(value(&r)).check_verdict())
        }
        Command::Landauer { channel, eps, trials } => {
            let ch: StochasticChannel = inputs.read("channel", channel)?;
            let work = g.work(None);
            let opts = ScenarioOptions { capacity: g.search(None), work, ..ScenarioOptions::default() };
            let r = lib(landauer_scenario(&ch, *eps, *trials, g.seed, &opts))?;
            let keys = [("work", r.work.value), ("target", r.target_kt)];
            let rep = with_temperature(Report::new(value(&r)).check_verdict(), g.temperature, &keys);
            ("landauer", json!({"eps": eps, "trials": trials, "budget": g.budget_echo(Some(&work))}), rep)
        }
        Command::Asymptotics { which } => match which {
            Asymptotics::Stein { p, q, eps, n_max } => {
                let p: Distribution = inputs.read("p", p)?;
                let q: Distribution = inputs.read("q", q)?;
                let s = lib(stein_series(&p, &q, *eps, *n_max, g.exec()))?;
                let csv = s.to_csv();
                ("asymptotics stein", json!({"eps": eps, "n_max": n_max}), Report::new(value(&s)).with_table(csv))
            }
            Asymptotics::CapacitySeries { channel, eps, k_max, theta } => {
                let ch: StochasticChannel = inputs.read("channel", channel)?;
                let mut capacity = g.search(None);
                capacity.randomized = true;
                let opts = SeriesOptions { capacity, theta: *theta, holevo: g.holevo(), ..SeriesOptions::default() };
                let s = lib(regularized_capacity_series(&ch, *eps, *k_max, &opts))?;
                let mut csv = String::from("k,value,target,envelope,exact\n");
                for ((pt, env), exact) in s.capacity.points.iter().zip(&s.envelope).zip(&s.exact) {
                    csv.push_str(&format!("{},{},{},{},{}\n", pt.n, pt.value, s.capacity.target, env, exact));
                }
                let params = json!({"eps": eps, "k_max": k_max, "theta": theta, "budget": g.budget_echo(None)});
                ("asymptotics capacity-series", params, Report::new(value(&s)).with_table(csv))
            }
            Asymptotics::ChiBar { channel, theta } => {
                let ch: StochasticChannel = inputs.read("channel", channel)?;
                let h = lib(constrained_holevo(&ch, *theta, &g.holevo()))?;
                let c = lib(shannon_capacity(&ch, 1e-9))?;
                let r = json!({"estimate": value(&h), "estimate_kind": "search", "shannon_capacity": value(&c)});
                ("asymptotics chi-bar", json!({"theta": theta, "budget": g.budget_echo(None)}), Report::new(r))
            }
            Asymptotics::Shannon { channel, tol } => {
                let ch: StochasticChannel = inputs.read("channel", channel)?;
                ("asymptotics shannon", json!({"tol": tol}), Report::new(value(&lib(shannon_capacity(&ch, *tol))?)))
            }
        },
    };
    Ok((name.to_string(), json!({"inputs": inputs.0, "params": params}), report))
}

fn render(cli: &Cli, name: String, echo: Value, mut report: Report) -> String {
    let g = &cli.global;
    report.insert("tool", json!("thermocap"));
    report.insert("version", json!(env!("CARGO_PKG_VERSION")));
    report.insert("command", json!(name));
    report.insert("seed", json!(g.seed));
    report.insert("exec", json!(if g.exec == ExecMode::Parallel { "parallel" } else { "sequential" }));
    report.insert("temperature", json!(g.temperature));
    report.insert("inputs", echo["inputs"].clone());
    report.insert("config", echo["params"].clone());
    match g.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}

fn configure_threads() -> Fallible<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw.parse().map_err(|_| format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = configure_threads().and_then(|()| run(&cli)).and_then(|(name, echo, report)| {
        let violation = report.violation;
        let text = render(&cli, name, echo, report);
        match &cli.global.out {
            Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
            None => print!("{text}"),
        }
        Ok(violation)
    });
    if let Err(msg) = &outcome {
        eprintln!("error: {msg}");
    }
    ExitCode::from(exit_status(&outcome))
}

/// 0 when consistent, 2 when a verdict reports a violation, 1 on any error.
fn exit_status(outcome: &Fallible<bool>) -> u8 {
    match outcome {
        Ok(false) => 0,
        Ok(true) => 2,
        Err(_) => 1,
    }
}
