//! Implementations of the five subcommands.

use std::io::Write;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use lonely_core::bounds::{
    divergent_bound, dubickas_condition, forest_gamma, gap_at_least, greedy_good_forest,
    hunter_bound, max_delta_hunter, union_bound, verify_gap_at, BoundReport,
};
use lonely_core::correlation::{
    good_pair_condition, is_eps_good, moments, pair_probability, pair_probability_oracle,
    PairStats,
};
use lonely_core::exact::{format_rat, rat, Rat};
use lonely_core::{corpus, graph, prime, Error, SpeedSet};

use crate::input::{self, rat_flag, rat_flag_opt};
use crate::render::{csv_line, edges_json, print_json, rat_json, rat_str, table};
use crate::{BoundsArgs, CliError, GraphArgs, PairArgs, PrimeArgs, Result, VerifyArgs};

fn write_file(path: &std::path::Path, contents: &str) -> Result<()> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn opt_yes_no(b: Option<bool>) -> String {
    b.map(yes_no).unwrap_or_else(|| "-".to_string())
}

struct PairRow {
    stats: PairStats,
    oracle: Option<Rat>,
    eps_good: Option<bool>,
    good_pair: Option<bool>,
}

pub fn pair(args: &PairArgs) -> Result<()> {
    let s = input::load_single(&args.input)?;
    let delta = rat_flag("delta", &args.delta)?;
    let epsilon = rat_flag_opt("epsilon", &args.epsilon)?;
    let gamma = rat_flag_opt("gamma", &args.gamma)?;

    let mut rows = Vec::new();
    let mut mismatches = 0usize;
    for i in 0..s.n() {
        for j in 0..s.n() {
            if i == j {
                continue;
            }
            let stats = pair_probability(s[i], s[j], &delta)?;
            let oracle = if args.check {
                let o = pair_probability_oracle(s[i], s[j], &delta)?;
                if o != stats.probability {
                    mismatches += 1;
                }
                Some(o)
            } else {
                None
            };
            let eps_good = match &epsilon {
                Some(e) => Some(is_eps_good(s[i], s[j], &delta, e)?),
                None => None,
            };
            // the ratio condition reads (faster, slower), so it only
            // applies to rows with v_i > v_j
            let good_pair = match &gamma {
                Some(g) if s[j] < s[i] => Some(good_pair_condition(s[i], s[j], &delta, g)?),
                _ => None,
            };
            rows.push(PairRow {
                stats,
                oracle,
                eps_good,
                good_pair,
            });
        }
    }

    if args.json {
        let pairs: Vec<Value> = rows.iter().map(|r| pair_row_json(r, args)).collect();
        print_json(&json!({
            "speeds": s.speeds(),
            "delta": rat_json(&delta),
            "pairs": pairs,
        }));
    } else {
        let mut headers = vec![
            "v_i",
            "v_j",
            "gcd",
            "eps_ij",
            "eps_ji",
            "f",
            "error_term",
            "probability",
        ];
        if args.check {
            headers.extend(["oracle", "matches"]);
        }
        if epsilon.is_some() {
            headers.push("eps_good");
        }
        if gamma.is_some() {
            headers.push("good_pair");
        }
        let cells: Vec<Vec<String>> = rows.iter().map(|r| pair_row_cells(r, args)).collect();
        let rendered_header = headers.clone();
        match &args.csv {
            Some(path) => {
                let mut out = String::new();
                out.push_str(&csv_line(
                    &rendered_header.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
                ));
                out.push('\n');
                for row in &cells {
                    // empty cells stand for columns that do not apply
                    let row: Vec<String> = row
                        .iter()
                        .map(|c| if c == "-" { String::new() } else { c.clone() })
                        .collect();
                    out.push_str(&csv_line(&row));
                    out.push('\n');
                }
                write_file(path, &out)?;
                println!("wrote {} rows to {}", cells.len(), path.display());
            }
            None => {
                if cells.is_empty() {
                    println!("single speed: no pairs to report");
                } else {
                    print!("{}", table(&headers, &cells));
                }
            }
        }
    }

    if mismatches > 0 {
        return Err(Error::Falsified(format!(
            "closed form and oracle disagree on {mismatches} pair(s) at delta {}",
            format_rat(&delta)
        ))
        .into());
    }
    Ok(())
}

fn pair_row_cells(r: &PairRow, args: &PairArgs) -> Vec<String> {
    let st = &r.stats;
    let mut cells = vec![
        st.v_i.to_string(),
        st.v_j.to_string(),
        st.gcd.to_string(),
        rat_str(&st.eps_ij),
        rat_str(&st.eps_ji),
        rat_str(&st.f_value),
        rat_str(&st.error_term),
        rat_str(&st.probability),
    ];
    if args.check {
        let oracle = r.oracle.as_ref().expect("oracle present under --check");
        cells.push(rat_str(oracle));
        cells.push(yes_no(*oracle == st.probability));
    }
    if args.epsilon.is_some() {
        cells.push(opt_yes_no(r.eps_good));
    }
    if args.gamma.is_some() {
        cells.push(opt_yes_no(r.good_pair));
    }
    cells
}

fn pair_row_json(r: &PairRow, args: &PairArgs) -> Value {
    let st = &r.stats;
    let mut obj = Map::new();
    obj.insert("v_i".into(), st.v_i.into());
    obj.insert("v_j".into(), st.v_j.into());
    obj.insert("gcd".into(), st.gcd.into());
    obj.insert("eps_ij".into(), rat_json(&st.eps_ij));
    obj.insert("eps_ji".into(), rat_json(&st.eps_ji));
    obj.insert("f".into(), rat_json(&st.f_value));
    obj.insert("error_term".into(), rat_json(&st.error_term));
    obj.insert("probability".into(), rat_json(&st.probability));
    if args.check {
        let oracle = r.oracle.as_ref().expect("oracle present under --check");
        obj.insert("oracle".into(), rat_json(oracle));
        obj.insert("matches".into(), (*oracle == st.probability).into());
    }
    if args.epsilon.is_some() {
        obj.insert("eps_good".into(), r.eps_good.into());
    }
    if args.gamma.is_some() {
        obj.insert("good_pair".into(), r.good_pair.into());
    }
    Value::Object(obj)
}

fn report_json(report: &BoundReport) -> Value {
    json!({
        "delta": rat_json(&report.delta),
        "value": rat_json(&report.lower_bound_value),
        "threshold": rat_json(&report.delta_star),
        "tree": edges_json(&report.tree_edges),
    })
}

fn edges_text(edges: &[(usize, usize)]) -> String {
    if edges.is_empty() {
        return "-".to_string();
    }
    edges
        .iter()
        .map(|&(i, j)| format!("({i},{j})"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn bounds(args: &BoundsArgs) -> Result<()> {
    let s = input::load_single(&args.input)?;
    let delta = rat_flag_opt("delta", &args.delta)?;
    let epsilon = rat_flag_opt("epsilon", &args.epsilon)?;

    let union_delta = delta
        .clone()
        .unwrap_or_else(|| rat(1, 2 * s.n() as i64));
    let union = union_bound(&s, &union_delta)?;
    let hunter_delta = match &delta {
        Some(d) => d.clone(),
        None => max_delta_hunter(&s)?,
    };
    let hunter = hunter_bound(&s, &hunter_delta, None)?;
    let divergent = divergent_bound(&s, None)?;
    let dubickas = dubickas_condition(&s);

    let mut best = union.delta_star.clone();
    for candidate in [&hunter.delta_star, &divergent.delta_star] {
        if *candidate > best {
            best = candidate.clone();
        }
    }
    let witness = gap_at_least(&s, &best)?.ok_or_else(|| {
        Error::Falsified(format!(
            "no time in (0,1) realizes the claimed threshold {} for {s}",
            format_rat(&best)
        ))
    })?;

    let moment_report = match &delta {
        Some(d) => Some(moments(&s, d)?),
        None => None,
    };
    let forest = match (&delta, &epsilon) {
        (Some(d), Some(e)) => Some((greedy_good_forest(&s, d, e)?, forest_gamma(e)?)),
        _ => None,
    };

    if args.json {
        let mut obj = Map::new();
        obj.insert("speeds".into(), json!(s.speeds()));
        obj.insert("union".into(), report_json(&union));
        obj.insert("hunter".into(), report_json(&hunter));
        obj.insert("divergent".into(), report_json(&divergent));
        obj.insert("dubickas".into(), dubickas.into());
        obj.insert(
            "witness".into(),
            json!({
                "t": rat_json(&witness.time),
                "gap": rat_json(&witness.gap),
                "global_max": witness.is_global_max,
            }),
        );
        if let Some(m) = &moment_report {
            obj.insert(
                "moments".into(),
                json!({
                    "delta": rat_json(&m.delta),
                    "e_x": rat_json(&m.e_x),
                    "e_x2": rat_json(&m.e_x2),
                    "var_floor": rat_json(&m.var_lower),
                }),
            );
        }
        if let Some((edges, gamma)) = &forest {
            obj.insert(
                "forest".into(),
                json!({ "gamma": rat_json(gamma), "edges": edges_json(edges) }),
            );
        }
        print_json(&Value::Object(obj));
    } else {
        println!("speeds     {s}");
        let rows = vec![
            vec![
                "union".to_string(),
                rat_str(&union.delta),
                rat_str(&union.lower_bound_value),
                rat_str(&union.delta_star),
                "-".to_string(),
            ],
            vec![
                "hunter".to_string(),
                rat_str(&hunter.delta),
                rat_str(&hunter.lower_bound_value),
                rat_str(&hunter.delta_star),
                edges_text(&hunter.tree_edges),
            ],
            vec![
                "divergent".to_string(),
                rat_str(&divergent.delta),
                rat_str(&divergent.lower_bound_value),
                rat_str(&divergent.delta_star),
                edges_text(&divergent.tree_edges),
            ],
        ];
        print!(
            "{}",
            table(&["bound", "delta", "value", "threshold", "tree"], &rows)
        );
        println!("dubickas   {}", yes_no(dubickas));
        println!(
            "witness    t {}  gap {}  (threshold {})",
            rat_str(&witness.time),
            rat_str(&witness.gap),
            rat_str(&best)
        );
        if let Some(m) = &moment_report {
            println!(
                "moments    E[X] {}  E[X^2] {}  floor {}",
                rat_str(&m.e_x),
                rat_str(&m.e_x2),
                rat_str(&m.var_lower)
            );
        }
        if let Some((edges, gamma)) = &forest {
            println!("forest     gamma {}  edges {}", rat_str(gamma), edges_text(edges));
        }
    }
    Ok(())
}

pub fn graph(args: &GraphArgs) -> Result<()> {
    let s = input::load_single(&args.input)?;
    let targeted = args.sweep.is_some() || args.certificate || args.expected_edges;
    let mut obj = Map::new();
    obj.insert("speeds".into(), json!(s.speeds()));

    if args.expected_edges {
        let total = graph::expected_edges(&s)?;
        if args.json {
            obj.insert(
                "expected_edges".into(),
                json!({ "sum": rat_json(&total), "target": s.n() as u64 - 1 }),
            );
        } else {
            println!("{} = {} OK", total.to_integer(), s.n() - 1);
        }
    }

    if let Some(path) = &args.sweep {
        if s.n() < 2 {
            return Err(CliError::Input("sweep needs at least two speeds".into()));
        }
        let cells = graph::sweep(&s)?;
        let mut out = String::from("t_lo,t_hi,Y,num_components,num_leaves\n");
        for cell in &cells {
            let snap = &cell.snapshot;
            let leaves = snap.degrees.iter().filter(|&&d| d == 1).count();
            out.push_str(&csv_line(&[
                rat_str(&cell.t_lo),
                rat_str(&cell.t_hi),
                snap.edges.len().to_string(),
                snap.components.len().to_string(),
                leaves.to_string(),
            ]));
            out.push('\n');
        }
        write_file(path, &out)?;
        if args.json {
            obj.insert(
                "sweep".into(),
                json!({ "cells": cells.len(), "path": path.display().to_string() }),
            );
        } else {
            println!("wrote {} cells to {}", cells.len(), path.display());
        }
    }

    if args.certificate {
        let cert = graph::invisible_certificate(&s)?;
        cert.verify(&s)?;
        let kind = match cert.kind {
            graph::InvisibleKind::Lonely => "lonely",
            graph::InvisibleKind::FourAlmostAlone => "four-almost-alone",
        };
        if args.json {
            obj.insert(
                "certificate".into(),
                json!({
                    "kind": kind,
                    "time": rat_json(&cert.time),
                    "cell": [rat_json(&cert.cell.0), rat_json(&cert.cell.1)],
                    "lonely": cert.lonely,
                    "almost_alone": cert.almost_alone
                        .iter()
                        .map(|&(a, b)| json!([a, b]))
                        .collect::<Vec<_>>(),
                }),
            );
        } else {
            println!("certificate  {kind}  t {}", rat_str(&cert.time));
            if let Some(i) = cert.lonely {
                println!("lonely       runner {i} (speed {})", s[i]);
            }
            for &(leaf, neighbor) in &cert.almost_alone {
                println!(
                    "almost alone runner {leaf} (speed {}), sole contact {neighbor} (speed {})",
                    s[leaf], s[neighbor]
                );
            }
        }
    }

    if !targeted {
        if s.n() >= 2 {
            let total = graph::expected_edges(&s)?;
            let (t, snap) = graph::weakest_time(&s)?;
            if args.json {
                obj.insert("n".into(), json!(s.n()));
                obj.insert("edge_measure_sum".into(), rat_json(&total));
                obj.insert("weakest_time".into(), rat_json(&t));
                obj.insert("components_at_weakest".into(), json!(snap.components.len()));
            } else {
                println!("speeds           {s}");
                println!("edge measures    sum to {} (n - 1)", total.to_integer());
                println!(
                    "weakest time     {}  ({} components)",
                    rat_str(&t),
                    snap.components.len()
                );
            }
        } else if args.json {
            obj.insert("n".into(), json!(1));
        } else {
            println!("speeds           {s}");
            println!("single runner: the graph has one vertex and no edges");
        }
    }

    if args.json {
        print_json(&Value::Object(obj));
    }
    Ok(())
}

pub fn prime(args: &PrimeArgs) -> Result<()> {
    let s = input::load_single(&args.input)?;
    let cert = prime::prime_gap_multiplier(&s)?;
    cert.verify(&s)?;
    if args.json {
        print_json(&json!({
            "p": cert.p,
            "m": cert.m,
            "modulus": cert.modulus.to_string(),
            "lambda": cert.lambda.to_string(),
            "case": cert.case_used.to_string(),
            "t": rat_json(&cert.t_real),
            "min_gap": rat_json(&cert.min_gap),
        }));
    } else {
        println!("p         {}", cert.p);
        println!("m         {}", cert.m);
        println!("modulus   {}", cert.modulus);
        println!("lambda    {}", cert.lambda);
        println!("case      {}", cert.case_used);
        println!("t         {}", rat_str(&cert.t_real));
        println!("min gap   {}  (>= 1/{})", rat_str(&cert.min_gap), cert.p);
    }
    Ok(())
}

struct SetReport {
    label: String,
    speeds: Vec<u64>,
    pair_checks: usize,
    witnessed: Vec<(&'static str, Rat)>,
    edges_ok: Option<bool>,
    certificate: Option<&'static str>,
    failures: Vec<String>,
}

fn check_set(s: &SpeedSet, delta_flag: &Option<Rat>) -> Result<SetReport> {
    let n = s.n();
    let delta = delta_flag
        .clone()
        .unwrap_or_else(|| rat(1, 4).min(rat(1, 2 * n as i64)));
    let mut failures = Vec::new();

    let mut pair_checks = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            let formula = pair_probability(s[i], s[j], &delta)?.probability;
            let oracle = pair_probability_oracle(s[i], s[j], &delta)?;
            pair_checks += 1;
            if formula != oracle {
                failures.push(format!(
                    "pair ({}, {}): closed form {} != oracle {}",
                    s[i],
                    s[j],
                    format_rat(&formula),
                    format_rat(&oracle)
                ));
            }
        }
    }

    let mut witnessed = Vec::new();
    let mut candidates = vec![("union", union_bound(s, &rat(1, 2 * n as i64))?.delta_star)];
    candidates.push(("hunter", max_delta_hunter(s)?));
    candidates.push(("divergent", divergent_bound(s, None)?.delta_star));
    for (name, star) in candidates {
        let ok = match gap_at_least(s, &star)? {
            Some(cert) => verify_gap_at(s, &cert.time, &star)?,
            None => false,
        };
        if ok {
            witnessed.push((name, star));
        } else {
            failures.push(format!(
                "{name} threshold {} has no witness time",
                format_rat(&star)
            ));
        }
    }

    let edges_ok = if n >= 2 {
        match graph::expected_edges(s) {
            Ok(_) => Some(true),
            Err(Error::Falsified(msg)) => {
                failures.push(msg);
                Some(false)
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };

    let certificate = if n >= 5 {
        match graph::invisible_certificate(s) {
            Ok(cert) => {
                cert.verify(s)?;
                Some(match cert.kind {
                    graph::InvisibleKind::Lonely => "lonely",
                    graph::InvisibleKind::FourAlmostAlone => "four-almost-alone",
                })
            }
            Err(Error::Falsified(msg)) => {
                failures.push(msg);
                None
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };

    Ok(SetReport {
        label: s.to_string(),
        speeds: s.speeds().to_vec(),
        pair_checks,
        witnessed,
        edges_ok,
        certificate,
        failures,
    })
}

pub fn verify(args: &VerifyArgs) -> Result<()> {
    let sets = match (&args.corpus, args.random) {
        (Some(path), _) => input::load_corpus(path)?,
        (None, Some(count)) => corpus::random_speed_sets(
            args.seed,
            count,
            args.set_size,
            args.set_size,
            args.max_speed,
        )?,
        _ => unreachable!("clap enforces exactly one corpus source"),
    };
    if sets.is_empty() {
        return Err(CliError::Input("the corpus holds no speed sets".into()));
    }
    let delta_flag = rat_flag_opt("delta", &args.delta)?;

    let outcomes: Vec<Result<SetReport>> = sets
        .par_iter()
        .map(|s| check_set(s, &delta_flag))
        .collect();
    let mut reports = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        reports.push(outcome?);
    }

    let failed = reports.iter().filter(|r| !r.failures.is_empty()).count();
    let total = reports.len();

    if args.json {
        let sets_json: Vec<Value> = reports
            .iter()
            .map(|r| {
                json!({
                    "speeds": r.speeds,
                    "pair_checks": r.pair_checks,
                    "witnessed": r.witnessed
                        .iter()
                        .map(|(name, star)| json!({ "bound": name, "threshold": rat_str(star) }))
                        .collect::<Vec<_>>(),
                    "edges_ok": r.edges_ok,
                    "certificate": r.certificate,
                    "failures": r.failures,
                })
            })
            .collect();
        print_json(&json!({
            "sets": sets_json,
            "passed": total - failed,
            "total": total,
        }));
    } else {
        for r in &reports {
            let status = if r.failures.is_empty() { "ok  " } else { "FAIL" };
            println!(
                "{status}  {}  pairs {}  thresholds {}/3  edges {}  certificate {}",
                r.label,
                r.pair_checks,
                r.witnessed.len(),
                r.edges_ok.map(|b| yes_no(b)).unwrap_or_else(|| "-".into()),
                r.certificate.unwrap_or("-"),
            );
            for failure in &r.failures {
                println!("      {failure}");
            }
        }
        println!("verified {}/{} sets", total - failed, total);
    }

    if failed > 0 {
        return Err(Error::Falsified(format!(
            "{failed} of {total} sets failed exact verification"
        ))
        .into());
    }
    Ok(())
}
