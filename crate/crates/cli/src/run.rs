// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sargmax_core::changepoint::{fit_cp, Dataset};
use sargmax_core::io::{to_json_line, to_json_pretty, write_atomic};
use sargmax_core::processes::{sample_cpp, CompoundPoissonSpec};
use sargmax_core::sargmax::{maximizer_set, maximizer_set_step};
use sargmax_core::skorohod::{
    skorohod_dist_1d_with_warp, sup_dist, tilde_dist, PiecewiseProcess, StepFn1D, TimeWarp,
};
use sargmax_core::verify::{
    cp_weak_convergence, rate_study, theorem1_suite, CounterexampleConfig, CpWeakConvergenceConfig, Emit,
    RateStudyConfig,
};
use sargmax_core::{Error, SimRng};

use crate::config::{effective, threads, Cli, Command, Overrides};

pub enum CliError {
    /// Bad flags, configs or inputs.
    Invalid(String),
    /// Too many failed replications.
    Experiment(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Replications { .. } => CliError::Experiment(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<String> for CliError {
    fn from(msg: String) -> Self {
        CliError::Invalid(msg)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SargmaxConfig {
    input: PathBuf,
    #[serde(default)]
    tie_tol: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistanceConfig {
    f: PathBuf,
    g: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateCppConfig {
    spec: CompoundPoissonSpec,
    horizon: f64,
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitChangepointConfig {
    input: PathBuf,
    c1: f64,
    c2: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Theorem1Config {
    ns: Vec<usize>,
}

/// A function read from JSON: a step function on an interval or a process on a rectangle.
#[derive(Deserialize)]
#[serde(untagged)]
enum Operand {
    Step(StepFn1D<f64>),
    Process(PiecewiseProcess<f64>),
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Invalid(format!("{}: {}: {}", path.display(), e.path(), e.inner())))
}

fn read_operand(path: &Path) -> Result<Operand, CliError> {
    let v: Value = read_json(path)?;
    // the untagged enum would hide the field-level error, so pick the shape first
    let text = v.to_string();
    let de = &mut serde_json::Deserializer::from_str(&text);
    let res = if v.get("sections").is_some() {
        serde_path_to_error::deserialize(de).map(Operand::Process)
    } else {
        serde_path_to_error::deserialize(de).map(Operand::Step)
    };
    res.map_err(|e| CliError::Invalid(format!("{}: {}: {}", path.display(), e.path(), e.inner())))
}

struct Output {
    dir: PathBuf,
    written: Vec<String>,
}

impl Output {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| format!("{}: {e}", self.dir.display()))?;
        let path = self.dir.join(name);
        write_atomic(&path, contents.as_bytes())?;
        self.written.push(path.display().to_string());
        Ok(())
    }

    fn emit<E: Emit>(&mut self, e: &E) -> Result<Value, CliError> {
        for (name, contents) in e.files()? {
            self.write(name, &contents)?;
        }
        Ok(serde_json::to_value(e.summary()).map_err(Error::from)?)
    }
}

fn warp_knots(w: &TimeWarp<f64>) -> Vec<[f64; 2]> {
    w.knots().iter().map(|&(x, y)| [x, y]).collect()
}

/// Runs one subcommand and returns the summary line.
pub fn dispatch(cli: Cli) -> Result<String, CliError> {
    let common = cli.common;
    let cfg_path = common.config.as_deref();
    let threads = threads(common.threads)?;
    let mut out = Output {
        dir: common.out_dir.clone(),
        written: Vec::new(),
    };
    let mut o = Overrides::default();
    let command = cli.command.name();
    let (config, result): (Value, Value) = match cli.command {
        Command::Sargmax { input, tie_tol } => {
            o.set_path("input", input.as_deref());
            o.set("tie_tol", tie_tol);
            let cfg: SargmaxConfig = effective(cfg_path, o)?;
            let rep = match read_operand(&cfg.input)? {
                Operand::Step(f) => maximizer_set_step(&f, cfg.tie_tol)?,
                Operand::Process(p) => maximizer_set(&p, cfg.tie_tol)?,
            };
            out.write("sargmax.json", &to_json_pretty(&rep)?)?;
            let result = json!({
                "sargmax": rep.sargmax_point,
                "largmax": rep.largmax_point,
                "global_sup": rep.global_sup,
                "unique_flat": rep.unique_flat,
            });
            (json!(cfg), result)
        }
        Command::Distance { f, g } => {
            o.set_path("f", f.as_deref());
            o.set_path("g", g.as_deref());
            let cfg: DistanceConfig = effective(cfg_path, o)?;
            let result = match (read_operand(&cfg.f)?, read_operand(&cfg.g)?) {
                (Operand::Step(f), Operand::Step(g)) => {
                    let (d, warp) = skorohod_dist_1d_with_warp(&f, &g)?;
                    json!({"kind": "skorohod", "distance": d, "sup_distance": sup_dist(&f, &g)?, "warp_knots": warp_knots(&warp)})
                }
                (Operand::Process(f), Operand::Process(g)) => {
                    let t = tilde_dist(&f, &g)?;
                    json!({"kind": "matching_bound", "distance": t.upper_bound, "warp_knots": warp_knots(&t.certificate)})
                }
                _ => return Err(CliError::Invalid("f and g must both be step functions or both be processes".into())),
            };
            out.write("distance.json", &to_json_pretty(&result)?)?;
            (json!(cfg), result)
        }
        Command::SimulateCpp { horizon } => {
            o.set("horizon", horizon);
            o.set("seed", common.seed);
            let cfg: SimulateCppConfig = effective(cfg_path, o)?;
            let path = sample_cpp(&cfg.spec, cfg.horizon, &mut SimRng::seed_from(cfg.seed))?;
            let rep = maximizer_set_step(&path, 0.0)?;
            out.write("cpp_path.json", &to_json_pretty(&path)?)?;
            let result = json!({
                "jumps": path.jumps().len(),
                "sargmax": rep.sargmax_point[0],
                "largmax": rep.largmax_point[0],
                "max": rep.global_sup,
            });
            (json!(cfg), result)
        }
        Command::FitChangepoint { input, c1, c2 } => {
            o.set_path("input", input.as_deref());
            o.set("c1", c1);
            o.set("c2", c2);
            let cfg: FitChangepointConfig = effective(cfg_path, o)?;
            let file = std::fs::File::open(&cfg.input).map_err(|e| format!("{}: {e}", cfg.input.display()))?;
            let data = Dataset::read_csv(file)?;
            let fit = fit_cp(&data, cfg.c1, cfg.c2)?;
            let result = json!({"n": data.len(), "zeta": fit.zeta, "alpha": fit.alpha, "beta": fit.beta, "objective": fit.objective});
            out.write("changepoint_fit.json", &to_json_pretty(&result)?)?;
            (json!(cfg), result)
        }
        Command::McChangepoint { reps } => {
            o.set("replications", reps.map(|r| r as i64));
            o.set("master_seed", common.seed);
            o.set("threads", threads.map(|t| t as i64));
            let cfg: CpWeakConvergenceConfig = effective(cfg_path, o)?;
            let rep = cp_weak_convergence(&cfg)?;
            (json!(cfg), out.emit(&rep)?)
        }
        Command::McCox { reps } => {
            o.set("replications", reps.map(|r| r as i64));
            o.set("master_seed", common.seed);
            o.set("threads", threads.map(|t| t as i64));
            let cfg: RateStudyConfig = effective(cfg_path, o)?;
            let rep = rate_study(&cfg)?;
            (json!(cfg), out.emit(&rep)?)
        }
        Command::Counterexample { rate, n, reps } => {
            o.set("rate", rate);
            o.set_list("n_values", n.as_deref());
            o.set("replications", reps.map(|r| r as i64));
            o.set("master_seed", common.seed);
            o.set("threads", threads.map(|t| t as i64));
            let cfg: CounterexampleConfig = effective(cfg_path, o)?;
            let rep = cfg.run()?;
            (json!(cfg), out.emit(&rep)?)
        }
        Command::Theorem1 { n } => {
            o.set_list("ns", n.as_deref());
            let cfg: Theorem1Config = effective(cfg_path, o)?;
            let rep = theorem1_suite(&cfg.ns)?;
            (json!(cfg), out.emit(&rep)?)
        }
    };
    let line = json!({
        "command": command,
        "config": config,
        "files": out.written,
        "result": result,
    });
    Ok(to_json_line(&line)?)
}
