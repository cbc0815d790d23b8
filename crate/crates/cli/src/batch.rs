use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::Parser;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cli::{BatchArgs, Cli, Command};
use crate::commands::{dispatch, write_json, Context};
use crate::error::{io_error, CliError};
use crate::output::Format;

/// A flag value in a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl ParamValue {
    fn to_arg(&self) -> Option<String> {
        match self {
            ParamValue::Bool(_) => None,
            ParamValue::Int(v) => Some(v.to_string()),
            ParamValue::Float(v) => Some(v.to_string()),
            ParamValue::Str(s) => Some(s.clone()),
        }
    }
}

/// One run: the subcommand, its flags as flat keys, and where its output goes.
///
/// ```toml
/// [[runs]]
/// command = "construct"
/// seed = 7
/// r = 2
/// x = 30
/// y = 20
/// z = 4
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// File receiving this run's payload in `format`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(flatten)]
    pub params: BTreeMap<String, ParamValue>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    #[serde(default)]
    pub runs: Vec<RunConfig>,
}

impl RunConfig {
    /// The argument vector this run stands for; flag names use hyphens.
    pub fn argv(&self) -> Vec<String> {
        let mut argv = vec!["primegap".to_string()];
        argv.extend(self.command.split_whitespace().map(str::to_string));
        if let Some(seed) = self.seed {
            argv.push("--seed".into());
            argv.push(seed.to_string());
        }
        for (key, value) in &self.params {
            let flag = format!("--{}", key.replace('_', "-"));
            match value {
                ParamValue::Bool(false) => {}
                ParamValue::Bool(true) => argv.push(flag),
                other => {
                    argv.push(flag);
                    argv.extend(other.to_arg());
                }
            }
        }
        argv
    }

    fn parse(&self, index: usize) -> Result<Command, CliError> {
        let reject = |msg: String| CliError::validation("invalid_config", format!("run {index}: {msg}"));
        let cli = Cli::try_parse_from(self.argv()).map_err(|e| reject(crate::first_line(&e.to_string())))?;
        if matches!(cli.command, Command::Batch(_)) {
            return Err(reject("batch runs cannot nest".into()));
        }
        Ok(cli.command)
    }
}

pub fn parse_config(text: &str) -> Result<BatchConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::validation("invalid_config", crate::first_line(&e.to_string())))
}

fn run_one(index: usize, run: &RunConfig, command: &Command, ctx: &Context) -> Value {
    let result = dispatch(command, ctx).and_then(|out| {
        if let Some(path) = &run.output {
            let text = out.payload.render(run.format.unwrap_or_default())?;
            fs::write(path, text).map_err(|e| io_error(path, e))?;
        }
        Ok(out)
    });
    let (payload, failure) = match result {
        Ok(out) => (out.payload.value, out.failure),
        Err(e) => (Value::Null, Some(e)),
    };
    json!({
        "index": index,
        "command": run.command,
        "argv": run.argv()[1..],
        "status": if failure.is_none() { "ok" } else { "failed" },
        "exit_code": failure.as_ref().map_or(0, CliError::exit_code),
        "error": failure.map(|e| json!({"error": e.kind(), "message": e.message()})),
        "payload": payload,
    })
}

/// Parses every run first so a malformed config fails before any work, then
/// runs them on the rayon pool and reduces in config order.
pub fn run_batch(args: &BatchArgs, ctx: &Context) -> Result<crate::commands::Output, CliError> {
    let text = fs::read_to_string(&args.config).map_err(|e| io_error(&args.config, e))?;
    let config = parse_config(&text)?;
    let commands = config
        .runs
        .iter()
        .enumerate()
        .map(|(i, run)| run.parse(i))
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<Value> = config
        .runs
        .par_iter()
        .zip(&commands)
        .enumerate()
        .map(|(i, (run, command))| run_one(i, run, command, ctx))
        .collect();

    let mut succeeded = 0;
    let mut construct_runs = 0;
    let mut construct_successes = 0;
    for (run, result) in config.runs.iter().zip(&results) {
        if result["status"] == "ok" {
            succeeded += 1;
        }
        if run.command.trim() == "construct" {
            construct_runs += 1;
            if result["payload"]["success"] == true {
                construct_successes += 1;
            }
        }
    }
    let aggregate = json!({
        "total": results.len(),
        "succeeded": succeeded,
        "failed": results.len() - succeeded,
        "construct_runs": construct_runs,
        "construct_successes": construct_successes,
        "runs": results,
    });
    if let Some(path) = &args.out {
        write_json(path, &aggregate)?;
    }
    Ok(crate::output::Payload::json(aggregate).into())
}
