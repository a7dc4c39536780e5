use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use qnetcap::aggregator::{plan_with, ErrorBudgetMode};
use qnetcap::random::{self, BudgetKindChoice, NetworkParams};
use qnetcap::{
    bell_state, build_bell_network, parse_network, plan_dot, sandwich_report, trace_distance,
    verify_error_chain, werner_pair, Network, ProtocolPlan, RateModel, Regime,
};
use serde::Serialize;

use crate::{BudgetArg, CliError, Weights};

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_network(path: &Path) -> Result<Network, CliError> {
    let text = read_text(path)?;
    parse_network(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
pub fn emit(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::io("<stdout>", e)),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Domain(format!("serialization failed: {e}")))?;
    emit(&text)
}

/// Explicit `--regime`, else the one matching the network's budgets.
pub fn resolve_regime(net: &Network, regime: Option<&str>) -> Result<Regime, CliError> {
    match regime {
        Some(r) => Ok(r.parse()?),
        None => Ok(net
            .budget_kind()
            .map(Regime::for_budget)
            .unwrap_or(Regime::PerChannelUse)),
    }
}

pub fn validate(path: &Path) -> Result<(), CliError> {
    let net = read_network(path)?;
    let budget = net
        .budget_kind()
        .map(|k| k.to_string())
        .unwrap_or_else(|| "none".into());
    let mut text = format!(
        "valid: {} nodes, {} edges, budget {budget}",
        net.nodes().len(),
        net.edges().len()
    );
    for w in net.warnings() {
        text.push_str(&format!("\nwarning: {w}"));
    }
    emit(&text)
}

pub fn bound(path: &Path, regime: Option<&str>, epsilon: f64, weights: Weights) -> Result<(), CliError> {
    let net = read_network(path)?;
    let regime = resolve_regime(&net, regime)?;
    let report = sandwich_report(&net, regime, epsilon)?;
    let mut value = serde_json::to_value(&report).expect("report serializes");
    let obj = value.as_object_mut().expect("report is an object");
    let drop: &[&str] = match weights {
        Weights::Both => &[],
        Weights::Qcap => &["upper_esq", "upper_eps_corrected", "vacuous", "upper_cut"],
        Weights::Esq => &["lower", "lower_cut"],
    };
    for key in drop {
        obj.remove(*key);
    }
    print_json(&value)
}

pub fn parse_rate_model(spec: &str) -> Result<RateModel, CliError> {
    if spec == "qcap" {
        return Ok(RateModel::AsymptoticQCap);
    }
    if let Some(alpha) = spec.strip_prefix("fraction:") {
        let alpha: f64 = alpha
            .parse()
            .map_err(|_| CliError::Domain(format!("bad fraction `{alpha}`")))?;
        return Ok(RateModel::FixedFraction { alpha });
    }
    if let Some(file) = spec.strip_prefix("table:") {
        let text = read_text(Path::new(file))?;
        let rates: BTreeMap<String, f64> = serde_json::from_str(&text)
            .map_err(|e| CliError::Domain(format!("{file}: rate table must map edge ids to numbers: {e}")))?;
        return Ok(RateModel::PerEdgeTable { rates });
    }
    Err(CliError::Domain(format!(
        "unknown rate model `{spec}` (expected qcap, fraction:<alpha> or table:<file>)"
    )))
}

pub fn plan(
    path: &Path,
    epsilon: f64,
    rate_model: &str,
    all_edges_budget: bool,
    dot: Option<&Path>,
) -> Result<(), CliError> {
    let net = read_network(path)?;
    let rates = parse_rate_model(rate_model)?;
    let mode = if all_edges_budget {
        ErrorBudgetMode::AllEdges
    } else {
        ErrorBudgetMode::GeneratingEdges
    };
    let plan = plan_with(&net, epsilon, &rates, mode)?;
    if let Some(dot_path) = dot {
        let bell = build_bell_network(&net, &rates)?;
        let text = plan_dot(&net, &bell, &plan)?;
        fs::write(dot_path, text).map_err(|e| CliError::io(dot_path, e))?;
    }
    print_json(&plan)
}

#[derive(Debug, Serialize)]
struct SwapOutput {
    chain: Vec<f64>,
    final_fidelity: f64,
    trace_distance: f64,
    budget: f64,
    pass: bool,
}

fn run_chain(chain: &[f64], per_pair_eps: Option<&[f64]>) -> Result<(), CliError> {
    let pairs = chain
        .iter()
        .map(|&p| werner_pair(p))
        .collect::<Result<Vec<_>, _>>()?;
    let eps: Vec<f64> = match per_pair_eps {
        Some(e) => e.to_vec(),
        None => {
            let bell = bell_state();
            pairs
                .iter()
                .map(|p| trace_distance(p, &bell))
                .collect::<Result<_, _>>()?
        }
    };
    let report = verify_error_chain(&pairs, &eps)?;
    print_json(&SwapOutput {
        chain: chain.to_vec(),
        final_fidelity: report.final_fidelity,
        trace_distance: report.trace_distance,
        budget: report.budget,
        pass: report.pass,
    })
}

/// Each link's epsilon is its own distance from the Bell state.
pub fn simulate_chain(chain: &[f64]) -> Result<(), CliError> {
    run_chain(chain, None)
}

/// Simulates one path of a plan with a Werner pair per hop. Without
/// `werner`, each link is the noisiest Werner pair the plan's epsilon admits,
/// `p = 1 - 2ε/3`.
pub fn simulate_plan_path(plan_path: &Path, index: usize, werner: Option<f64>) -> Result<(), CliError> {
    let text = read_text(plan_path)?;
    let plan: ProtocolPlan = serde_json::from_str(&text)
        .map_err(|e| CliError::Domain(format!("{}: not a plan: {e}", plan_path.display())))?;
    let path = plan.paths.paths.get(index).ok_or_else(|| {
        CliError::Domain(format!(
            "path index {index} out of range (plan has {} paths)",
            plan.paths.len()
        ))
    })?;
    let hops = path.edges.len();
    let p = werner.unwrap_or(1.0 - 2.0 * plan.epsilon / 3.0);
    run_chain(&vec![p; hops], Some(&vec![plan.epsilon; hops]))
}

pub fn generate(
    seed: Option<u64>,
    max_nodes: usize,
    max_edges: usize,
    budget: BudgetArg,
    budget_max: f64,
) -> Result<(), CliError> {
    if max_nodes < 2 || max_edges < 1 {
        return Err(CliError::Domain("need --max-nodes >= 2 and --max-edges >= 1".into()));
    }
    if !(budget_max.is_finite() && budget_max >= 0.0) {
        return Err(CliError::Domain("--budget-max must be finite and >= 0".into()));
    }
    let seed = seed.unwrap_or_else(random::seed_from_env);
    let params = NetworkParams {
        max_nodes,
        max_edges,
        budget: (0.0, budget_max),
        budget_kind: match budget {
            BudgetArg::Count => BudgetKindChoice::Count,
            BudgetArg::Freq => BudgetKindChoice::Frequency,
            BudgetArg::Rate => BudgetKindChoice::Rate,
        },
        ..NetworkParams::default()
    };
    let net = random::random_lossy_network(&mut random::rng(seed), &params);
    emit(&net.to_json())
}
