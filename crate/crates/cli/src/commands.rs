use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use primegap::construction::{run_construction_with_band, ConstructionInput, Relation};
use primegap::covering::{
    check_certificate, crt_assemble, exact_y, greedy_y, jacobsthal, jacobsthal_of_primes, verify_cover,
    CompositeRunCertificate, ExactSearch, PrimeOrder, ResidueAssignment,
};
use primegap::primes::{
    gap_records, is_prime_u64, merit_rows, primorial, small_primes, GapRecord, PrimeStream, SieveConfig,
};
use primegap::statistics::{
    closed_form_beta, convergence_check, degree_stats, local_factor, make_form_system, montecarlo_stage2,
    singular_series, smooth_count, DegreeQuery, McTarget, Side, SystemKind,
};

use crate::cli::*;
use crate::error::{io_error, CliError};
use crate::output::Payload;

pub const MEM_ENV: &str = "PRIMEGAP_MEM_MB";

/// Settings shared by every command.
#[derive(Debug, Clone, Copy, Default)]
pub struct Context {
    pub sieve: SieveConfig,
}

impl Context {
    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var(MEM_ENV) {
            Err(_) => Ok(Self::default()),
            Ok(v) => {
                let mb: u64 = v.trim().parse().ok().filter(|&mb| mb > 0).ok_or_else(|| {
                    CliError::validation(
                        "invalid_parameter",
                        format!("{MEM_ENV}={v:?} is not a positive integer"),
                    )
                })?;
                Ok(Self {
                    sieve: SieveConfig::with_budget_mb(mb),
                })
            }
        }
    }
}

/// A payload plus the failure to report after printing it, if any.
#[derive(Debug, Clone)]
pub struct Output {
    pub payload: Payload,
    pub failure: Option<CliError>,
}

impl From<Payload> for Output {
    fn from(payload: Payload) -> Self {
        Self { payload, failure: None }
    }
}

type CmdResult = Result<Output, CliError>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn read_json<T: DeserializeOwned>(path: &Path, kind: &'static str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(kind, format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn dispatch(command: &Command, ctx: &Context) -> CmdResult {
    match command {
        Command::Gaps(a) => gaps(a, ctx),
        Command::Jacobsthal(a) => jacobsthal_cmd(a),
        Command::Ycover(a) => ycover(a),
        Command::Assemble(a) => assemble(a),
        Command::Check(a) => check(a),
        Command::Construct(a) => construct(a, ctx),
        Command::Stats(s) => match s {
            StatsCommand::Alpha(a) => alpha(a),
            StatsCommand::Beta(a) => beta(a),
            StatsCommand::Degrees(a) => degrees(a, ctx),
            StatsCommand::Montecarlo(a) => montecarlo(a),
            StatsCommand::Smooth(a) => smooth(a, ctx),
        },
        Command::Batch(a) => crate::batch::run_batch(a, ctx),
    }
}

fn gaps(a: &GapsArgs, ctx: &Context) -> CmdResult {
    let records = if a.records {
        gap_records(a.limit, &ctx.sieve)?
    } else {
        if a.limit < 3 {
            return Err(CliError::validation(
                "invalid_parameter",
                format!("limit {} has fewer than two primes at or below it", a.limit),
            ));
        }
        let mut out = Vec::new();
        let mut prev: Option<u64> = None;
        for q in PrimeStream::new(0, a.limit, &ctx.sieve)? {
            if let Some(p) = prev {
                out.push(GapRecord { start: p, gap: q - p });
            }
            prev = Some(q);
        }
        out
    };
    if a.merits {
        let rows = merit_rows(&records);
        let table = rows
            .iter()
            .map(|r| {
                vec![
                    r.start.to_string(),
                    r.gap.to_string(),
                    r.merit.to_string(),
                    r.merit2.to_string(),
                ]
            })
            .collect();
        Ok(Payload::json(to_value(&rows))
            .with_table(&["start", "gap", "merit", "merit2"], table)
            .into())
    } else {
        let table = records
            .iter()
            .map(|r| vec![r.start.to_string(), r.gap.to_string()])
            .collect();
        Ok(Payload::json(to_value(&records))
            .with_table(&["start", "gap"], table)
            .into())
    }
}

fn jacobsthal_cmd(a: &JacobsthalArgs) -> CmdResult {
    let (n, j) = match (&a.n, a.primorial) {
        (Some(s), _) => {
            let n: BigUint = s
                .trim()
                .parse()
                .map_err(|_| CliError::validation("invalid_parameter", format!("{s:?} is not a decimal integer")))?;
            let j = jacobsthal(&n)?;
            (n, j)
        }
        (None, Some(x)) => (primorial(x), jacobsthal_of_primes(&small_primes(x))?),
        (None, None) => unreachable!("clap requires one of --n, --primorial"),
    };
    Ok(Payload::json(json!({"n": n.to_str_radix(10), "primorial": a.primorial, "j": j})).into())
}

fn ycover(a: &YcoverArgs) -> CmdResult {
    let (y, witness, optimal, nodes, mode) = match a.mode {
        CoverMode::Exact => {
            let opts = ExactSearch {
                budget: a.budget,
                parallel: true,
            };
            let r = exact_y(a.x, &opts)?;
            (r.y, r.witness, Some(r.optimal), Some(r.nodes), "exact")
        }
        CoverMode::Greedy => {
            let order = match a.order {
                Order::Increasing => PrimeOrder::Increasing,
                Order::Decreasing => PrimeOrder::Decreasing,
            };
            let r = greedy_y(a.x, order)?;
            (r.y, r.witness, None, None, "greedy")
        }
    };
    if let Some(path) = &a.emit {
        write_json(path, &witness)?;
    }
    Ok(Payload::json(json!({
        "x": a.x,
        "mode": mode,
        "y": y,
        "optimal": optimal,
        "nodes": nodes,
        "verified": verify_cover(y, &witness),
        "witness": to_value(&witness),
    }))
    .into())
}

fn assemble(a: &AssembleArgs) -> CmdResult {
    let assignment: ResidueAssignment = read_json(&a.input, "invalid_assignment")?;
    let cert = crt_assemble(&assignment, a.y)?;
    if let Some(path) = &a.out {
        write_json(path, &cert)?;
    }
    Ok(Payload::json(to_value(&cert)).into())
}

fn check(a: &CheckArgs) -> CmdResult {
    let cert: CompositeRunCertificate = read_json(&a.cert, "invalid_certificate")?;
    let valid = check_certificate(&cert);
    let payload = Payload::json(json!({"valid": valid, "y": cert.y, "m": cert.m.to_str_radix(10)}));
    let failure =
        (!valid).then(|| CliError::CheckFailed(format!("{} does not certify a composite run", a.cert.display())));
    Ok(Output { payload, failure })
}

fn construct(a: &ConstructArgs, ctx: &Context) -> CmdResult {
    let mut input = ConstructionInput::new(a.r, a.x, a.seed);
    input.y = a.y;
    input.z = a.z;
    input.epsilon = a.epsilon;
    if !(a.band > 0.0 && a.band.is_finite()) {
        return Err(CliError::validation(
            "invalid_parameter",
            format!("band {} must be positive", a.band),
        ));
    }
    let params = input.resolve()?;
    let out = run_construction_with_band(&params, &ctx.sieve, a.band)?;
    let report = to_value(&out.report);
    if let Some(path) = &a.report {
        write_json(path, &report)?;
    }
    if let Some(path) = &a.emit {
        write_json(path, &out.assignment)?;
    }
    Ok(Payload::json(report).into())
}

fn alpha(a: &AlphaArgs) -> CmdResult {
    let value = match a.fine_cutoff {
        Some(fine) => to_value(&convergence_check(a.r, a.cutoff, fine)?),
        None => to_value(&singular_series(a.r, a.cutoff)?),
    };
    Ok(Payload::json(value).into())
}

fn beta(a: &BetaArgs) -> CmdResult {
    let kind: SystemKind = a.kind.parse()?;
    if !is_prime_u64(a.p) {
        return Err(CliError::validation(
            "invalid_parameter",
            format!("p = {} is not prime", a.p),
        ));
    }
    let system = make_form_system(kind, a.r, a.m, a.x, a.i)?;
    let brute = local_factor(&system, a.p)?;
    let closed = closed_form_beta(kind, a.r, a.p);
    Ok(Payload::json(json!({
        "kind": kind,
        "r": a.r,
        "p": a.p,
        "m": a.m,
        "x": a.x,
        "i": a.i,
        "d": system.d(),
        "t": system.t(),
        "finite_complexity": system.finite_complexity(),
        "brute_force": brute.to_string(),
        "closed_form": closed.to_string(),
        "brute_force_value": primegap::statistics::rational_to_f64(&brute),
        "equal": brute == closed,
    }))
    .into())
}

fn degrees(a: &DegreesArgs, ctx: &Context) -> CmdResult {
    let graph = primegap::construction::build_relation(a.r, a.x, a.y, &ctx.sieve)?;
    let query = DegreeQuery {
        side: match a.side {
            SideArg::P => Side::P,
            SideArg::Q => Side::Q,
        },
        relation: match a.relation {
            RelationArg::Full => Relation::Full,
            RelationArg::Strict => Relation::Strict,
        },
        i: a.i,
        allow_outside_regime: a.allow_outside_regime,
    };
    let stats = degree_stats(&graph, &query)?;
    let rows = stats
        .vertices
        .iter()
        .zip(&stats.counts)
        .map(|(v, &c)| vec![v.to_string(), c.to_string(), (c as f64 / stats.predicted).to_string()])
        .collect();
    Ok(Payload::json(to_value(&stats))
        .with_table(&["vertex", "count", "ratio"], rows)
        .into())
}

fn montecarlo(a: &MonteCarloArgs) -> CmdResult {
    let primes = match (&a.primes, a.x, a.z) {
        (Some(list), _, _) => {
            if let Some(bad) = list.iter().find(|&&p| !is_prime_u64(p)) {
                return Err(CliError::validation("invalid_parameter", format!("{bad} is not prime")));
            }
            let mut list = list.clone();
            list.sort_unstable();
            list.dedup();
            list
        }
        (None, Some(x), Some(z)) => {
            let log_x = (x as f64).ln();
            small_primes(z).into_iter().filter(|&p| p as f64 > log_x).collect()
        }
        _ => {
            return Err(CliError::validation(
                "invalid_parameter",
                "give the sieving primes with --primes or with --x and --z",
            ))
        }
    };
    let (target, descriptor) = match a.target {
        TargetArg::SurvivorCount => {
            if a.from > a.to {
                return Err(CliError::validation("invalid_parameter", "--from must not exceed --to"));
            }
            (
                McTarget::SurvivorCount((a.from..=a.to).collect()),
                json!({"kind": "survivor_count", "from": a.from, "to": a.to}),
            )
        }
        TargetArg::PairSurvival => (
            McTarget::PairSurvival(a.q1, a.q2),
            json!({"kind": "pair_survival", "q1": a.q1, "q2": a.q2}),
        ),
        TargetArg::ApSurvival => {
            let last = (a.len.max(1) as u64 - 1)
                .checked_mul(a.step)
                .and_then(|v| v.checked_add(a.start))
                .filter(|&v| v <= u32::MAX as u64);
            if a.len == 0 || last.is_none() {
                return Err(CliError::validation(
                    "invalid_parameter",
                    "progression must be non-empty and below 2^32",
                ));
            }
            (
                McTarget::ApSurvival {
                    start: a.start,
                    step: a.step,
                    len: a.len,
                },
                json!({"kind": "ap_survival", "start": a.start, "step": a.step, "len": a.len}),
            )
        }
    };
    let result = montecarlo_stage2(&primes, &target, a.trials, a.seed)?;
    let mut value = to_value(&result);
    value["target"] = descriptor;
    value["primes"] = to_value(&primes);
    Ok(Payload::json(value).into())
}

fn smooth(a: &SmoothArgs, ctx: &Context) -> CmdResult {
    Ok(Payload::json(to_value(&smooth_count(a.y, a.z, ctx.sieve.mem_budget_bytes)?)).into())
}
