//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use qnetcap::capacity::VACUOUS_THRESHOLD;
use qnetcap::random::{self, BudgetKindChoice, NetworkParams};
use qnetcap::{
    bell_state, build_bell_network, epsilon_corrected_upper, lossy_esq_upper, lossy_gap_ratio,
    lossy_q_cap, max_disjoint_paths, parse_network, plan, sandwich_report, swap_chain,
    trace_distance, werner_pair, RateModel, Regime,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);

fn data(name: &str) -> String {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || {
        format!("{what}: got {got}, want {want} ± {tol}")
    })
}

/// The 500 networks shared by the factor-two and sandwich criteria.
fn random_lossy_networks() -> Vec<qnetcap::Network> {
    let params = NetworkParams {
        max_nodes: 10,
        max_edges: 25,
        eta: (0.05, 0.95),
        budget: (0.0, 1.0),
        budget_kind: BudgetKindChoice::Frequency,
    };
    let mut rng = random::rng(random::DEFAULT_SEED);
    (0..500)
        .map(|_| random::random_lossy_network(&mut rng, &params))
        .collect()
}

fn formula_fidelity() -> Outcome {
    ensure((lossy_q_cap(0.5).unwrap() - 1.0).abs() <= 1e-12, || "Q(0.5) != 1".into())?;
    ensure(
        (lossy_esq_upper(0.5).unwrap() - 3f64.log2()).abs() <= 1e-12,
        || "Esq(0.5) != log2 3".into(),
    )?;
    let table = include_str!("data/lossy_reference.csv");
    let mut worst = 0f64;
    let mut rows = 0;
    for line in table.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (eta, q, e) = (cols[0], cols[1], cols[2]);
        for (got, want) in [(lossy_q_cap(eta).unwrap(), q), (lossy_esq_upper(eta).unwrap(), e)] {
            worst = worst.max((got - want).abs() / want);
        }
        rows += 1;
    }
    ensure(rows == 99, || format!("reference table has {rows} rows"))?;
    ensure(worst <= 1e-12, || format!("max relative error {worst:e}"))?;
    Ok(format!("99-point grid, max relative error {worst:.1e}"))
}

fn factor_two(nets: &[qnetcap::Network]) -> Outcome {
    let mut max_ratio = 0f64;
    for (i, net) in nets.iter().enumerate() {
        let r = sandwich_report(net, Regime::PerChannelUse, 0.0).map_err(|e| e.to_string())?;
        ensure(r.lower <= r.upper_esq && r.upper_esq <= 2.0 * r.lower + 1e-9, || {
            format!("network {i}: lower {} upper {}", r.lower, r.upper_esq)
        })?;
        if let Ok(ratio) = lossy_gap_ratio(&r) {
            max_ratio = max_ratio.max(ratio);
        }
    }
    Ok(format!("{} networks, max upper/lower {max_ratio:.4}", nets.len()))
}

fn menger() -> Outcome {
    let mut rng = random::rng(random::DEFAULT_SEED ^ 0xBE11);
    let mut total = 0;
    for i in 0..200 {
        let bell = random::random_bell_network(&mut rng, 10, 30);
        let (count, paths) = max_disjoint_paths(&bell);
        let oracle = bell.flow_graph().min_cut_bruteforce().map_err(|e| e.to_string())?;
        ensure(count as f64 == oracle.value, || {
            format!("graph {i}: {count} paths, brute-force cut {}", oracle.value)
        })?;
        paths
            .validate(&bell.alice, &bell.bob)
            .map_err(|e| format!("graph {i}: {e}"))?;
        total += count;
    }
    Ok(format!("200 multigraphs, {total} paths in total"))
}

fn sandwich(nets: &[qnetcap::Network]) -> Outcome {
    let eps = 1e-4;
    let mut worst = 0f64;
    for (i, net) in nets.iter().enumerate() {
        let r = sandwich_report(net, Regime::PerChannelUse, 0.0).map_err(|e| e.to_string())?;
        ensure(r.lower <= r.upper_esq, || format!("network {i}: lower > upper"))?;
        let corrected = epsilon_corrected_upper(r.upper_esq, eps)
            .map_err(|e| e.to_string())?
            .value()
            .ok_or("vacuous at 1e-4")?;
        let expected_gap = (r.upper_esq + 0.565763) / 0.84 - r.upper_esq;
        let gap = corrected - r.upper_esq;
        worst = worst.max((gap - expected_gap).abs());
        close(gap, expected_gap, 1e-5, &format!("network {i} correction"))?;
    }
    Ok(format!("{} networks, max correction deviation {worst:.1e}", nets.len()))
}

// the six-decimal values are the published ones, not approximated constants
#[allow(clippy::approx_constant)]
fn diamond() -> Outcome {
    let net = parse_network(&data("diamond.json")).map_err(|e| e.to_string())?;
    let r = sandwich_report(&net, Regime::PerChannelUse, 0.0).map_err(|e| e.to_string())?;
    let ratio = lossy_gap_ratio(&r).map_err(|e| e.to_string())?;
    close(r.lower, 3.321928, 1e-4, "lower")?;
    close(r.upper_esq, 4.754888, 1e-4, "upper_esq")?;
    close(ratio, 1.4314, 1e-4, "ratio")?;
    Ok(format!(
        "lower {:.6}, upper {:.6}, ratio {ratio:.4}",
        r.lower, r.upper_esq
    ))
}

fn swap_oracle() -> Outcome {
    let w = werner_pair(0.9).unwrap();
    let out = swap_chain(&[w.clone(), w]).map_err(|e| e.to_string())?;
    let fid = out.bell_fidelity().unwrap();
    let dist = trace_distance(&out, &bell_state()).unwrap();
    close(fid, 0.8575, 1e-9, "fidelity")?;
    close(dist, 0.285, 1e-9, "trace distance")?;
    ensure(dist <= 0.30, || format!("distance {dist} over budget 0.30"))?;

    for len in 1..=6 {
        let chain = vec![bell_state(); len];
        let f = swap_chain(&chain).unwrap().bell_fidelity().unwrap();
        ensure(f >= 1.0 - 1e-12, || format!("perfect chain of {len}: fidelity {f}"))?;
    }

    let grid = [0.5, 0.6, 0.7, 0.8, 0.9];
    let mut worst = 0f64;
    for &p1 in &grid {
        for &p2 in &grid {
            let out = swap_chain(&[werner_pair(p1).unwrap(), werner_pair(p2).unwrap()]).unwrap();
            let dev = (out.matrix() - werner_pair(p1 * p2).unwrap().matrix()).camax();
            worst = worst.max(dev);
        }
    }
    ensure(worst <= 1e-10, || format!("Werner closure deviation {worst:e}"))?;
    Ok(format!(
        "fidelity {fid:.4}, distance {dist:.4} <= 0.30, closure deviation {worst:.1e}"
    ))
}

fn vacuity() -> Outcome {
    let mut grid: Vec<f64> = (0..=400).map(|i| 10f64.powf(-8.0 + i as f64 * 0.02)).collect();
    grid.extend([
        0.0,
        VACUOUS_THRESHOLD,
        f64::from_bits(VACUOUS_THRESHOLD.to_bits() - 1),
        f64::from_bits(VACUOUS_THRESHOLD.to_bits() + 1),
        0.01,
    ]);
    for &eps in &grid {
        let v = epsilon_corrected_upper(1.0, eps).map_err(|e| e.to_string())?;
        let want_vacuous = eps >= 1.0 / 256.0;
        ensure(v.is_vacuous() == want_vacuous, || format!("eps {eps:e}: {v:?}"))?;
        if let Some(x) = v.value() {
            ensure(x.is_finite(), || format!("eps {eps:e}: non-finite bound"))?;
        }
    }
    Ok(format!("{} epsilon values, threshold 1/256", grid.len()))
}

fn fig2_analog() -> Outcome {
    let net = parse_network(&data("fig2_analog.json")).map_err(|e| e.to_string())?;
    ensure(net.nodes().len() == 7, || "expected 7 nodes".into())?;
    let rates = RateModel::AsymptoticQCap;
    let p = plan(&net, 1e-3, &rates).map_err(|e| e.to_string())?;
    let bell = build_bell_network(&net, &rates).map_err(|e| e.to_string())?;
    let oracle = bell.flow_graph().min_cut_bruteforce().map_err(|e| e.to_string())?;
    ensure(p.m as f64 == oracle.value, || {
        format!("plan m {} vs brute-force cut {}", p.m, oracle.value)
    })?;
    let side = &p.witness.v_a.v_a;
    let intermediates = side
        .iter()
        .filter(|n| *n != net.alice() && *n != net.bob())
        .count();
    ensure(
        side.contains(net.alice()) && side.len() < net.nodes().len() && intermediates >= 1,
        || format!("witness {side:?} is not a strict subset holding A and an intermediate"),
    )?;
    let labels: Vec<&str> = side.iter().map(|n| n.as_str()).collect();
    Ok(format!("m = {} = brute-force cut, witness V_A = {{{}}}", p.m, labels.join(",")))
}

fn main() {
    let nets = random_lossy_networks();
    let criteria: Vec<Criterion> = vec![
        ("AC1 formula fidelity", Duration::from_secs(1), Box::new(formula_fidelity)),
        ("AC2 factor-two theorem", Duration::from_secs(30), Box::new(|| factor_two(&nets))),
        ("AC3 Menger equality", Duration::from_secs(10), Box::new(menger)),
        ("AC4 sandwich inequality", Duration::from_secs(30), Box::new(|| sandwich(&nets))),
        ("AC5 diamond example", Duration::from_secs(1), Box::new(diamond)),
        ("AC6 swap oracle", Duration::from_secs(10), Box::new(swap_oracle)),
        ("AC7 vacuity threshold", Duration::from_secs(1), Box::new(vacuity)),
        ("AC8 Bell-network plan", Duration::from_secs(10), Box::new(fig2_analog)),
    ];

    let mut failed = 0;
    for (name, limit, run) in &criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= *limit {
                Ok(msg)
            } else {
                Err(format!("took {elapsed:?}, limit {limit:?}"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS  {name:<26} {msg} ({:.3}s)", elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name:<26} {msg} ({:.3}s)", elapsed.as_secs_f64());
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
