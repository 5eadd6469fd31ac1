use std::path::{Path, PathBuf};

use cvnet::cost::{
    analytic_cost, energy_delta, er_expected_cost, linear_asymptotic_per_mode, spectrum_from_adjacency,
    squeezing_cost, CostReport, CostTopology, SqueezingSpectrum,
};
use cvnet::gaussian::{graph_state_cov, squeezing_spectrum_numeric};
use cvnet::netgen::{write_network, Network, HEADER};
use cvnet::rng::split_seed;
use cvnet::routing::{survey, Protocol, RoutingContext};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::{
    AliceChoice, Common, CostArgs, Format, GenArgs, Kind, Metric, Params, RouteArgs, Source, SurveyArgs,
    SweepArgs,
};
use crate::error::CliError;
use crate::network::{far_pair, generate, generate_sized, kind_name, load};
use crate::output::{emit, render_csv, render_json, Cell, Meta, Table};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Canonical config of a command: its arguments plus the digest of any
/// input graph file, so the hash changes when the file does.
fn config_of(args: &impl Serialize, source: Option<&Source>) -> Result<Value, CliError> {
    let mut config = serde_json::to_value(args).map_err(|e| usage(e.to_string()))?;
    if let Some(path) = source.and_then(|s| s.graph.as_deref()) {
        let bytes = std::fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        config["graph_sha256"] = Value::from(digest);
    }
    Ok(config)
}

fn finish(meta: &Meta, table: &Table, common: &Common) -> Result<(), CliError> {
    let text = match common.format() {
        Format::Csv => render_csv(meta, table),
        Format::Json => render_json(meta, table.json()),
    };
    emit(&text, common.out.as_deref())
}

pub fn gen(args: &GenArgs, common: &Common) -> Result<(), CliError> {
    let kind = args.params.topology.ok_or_else(|| usage("--topology is required"))?;
    let net = generate(kind, args.nodes, &args.params, common.seed)?;
    let meta = Meta::new("gen", config_of(args, None)?, common.seed);
    let text = match common.format() {
        Format::Csv => {
            let body = write_network(&net);
            let rest = body.strip_prefix(HEADER).unwrap_or(&body).trim_start_matches('\n');
            format!("{HEADER}\n{}{rest}", meta.comment_lines())
        }
        Format::Json => render_json(&meta, network_json(&net)),
    };
    emit(&text, common.out.as_deref())?;
    eprintln!("nodes {} edges {}", net.n(), net.edge_count());
    Ok(())
}

fn network_json(net: &Network) -> Value {
    let edges: Vec<Value> = net.edges().into_iter().map(|(i, j, w)| json!([i, j, w])).collect();
    json!({
        "n": net.n(),
        "edge_count": net.edge_count(),
        "squeeze_db": net.node_squeeze_db(),
        "edges": edges,
        "topology": net.meta().topology,
        "params": net.meta().params,
        "seed": net.meta().seed,
    })
}

/// Cost report and spectrum: from the adjacency spectrum when the initial
/// squeezing is uniform, from the covariance matrix otherwise.
fn cost_of(net: &Network) -> Result<(CostReport, SqueezingSpectrum), CliError> {
    let spectrum = if net.uniform_squeeze_db().is_some() {
        spectrum_from_adjacency(net)?
    } else {
        squeezing_spectrum_numeric(&graph_state_cov(net))?
    };
    let mut report = squeezing_cost(&spectrum);
    report.energy = Some(energy_delta(net));
    Ok((report, spectrum))
}

/// Closed form (star, diamond, complete), large-size asymptote (linear,
/// ring) or semicircle expectation (er) of the total cost. Only defined
/// without initial squeezing.
fn analytic_total(kind: Kind, net: &Network, params: &Params) -> Result<Option<f64>, CliError> {
    if params.squeeze_db != 0.0 {
        return Ok(None);
    }
    let (n, g) = (net.n(), params.g);
    let value = match kind {
        Kind::Star => Some(analytic_cost(CostTopology::Star, n, g)?),
        Kind::Diamond => Some(analytic_cost(CostTopology::Diamond, n, g)?),
        Kind::Complete => Some(analytic_cost(CostTopology::Complete, n, g)?),
        Kind::Linear | Kind::Ring => Some(n as f64 * linear_asymptotic_per_mode(g)?),
        Kind::Er => match params.p {
            Some(p) if p > 0.0 && p < 1.0 => Some(er_expected_cost(n, p, g)?),
            _ => None,
        },
        _ => None,
    };
    Ok(value)
}

fn sample_seeds(kind: Option<Kind>, samples: u64, master: u64) -> Result<Vec<Option<u64>>, CliError> {
    if samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let stochastic = kind.is_some_and(Kind::is_stochastic);
    if samples > 1 && !stochastic {
        return Err(usage("--samples above 1 needs a random topology"));
    }
    Ok((0..samples).map(|i| stochastic.then(|| split_seed(master, i))).collect())
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn cost(args: &CostArgs, common: &Common) -> Result<(), CliError> {
    let kind = if args.source.graph.is_some() { None } else { args.source.params.topology };
    let seeds = sample_seeds(kind, args.samples, common.seed)?;
    let meta = Meta::new("cost", config_of(args, Some(&args.source))?, common.seed);

    struct Sample {
        seed: Option<u64>,
        net: Network,
        report: CostReport,
        spectrum: SqueezingSpectrum,
        analytic: Option<f64>,
    }
    let samples: Vec<Sample> = seeds
        .par_iter()
        .map(|&seed| {
            let net = load(&args.source, seed.unwrap_or(common.seed))?;
            let (report, spectrum) = cost_of(&net)?;
            let analytic = match (args.analytic, kind) {
                (true, Some(k)) => analytic_total(k, &net, &args.source.params)?,
                _ => None,
            };
            Ok(Sample { seed, net, report, spectrum, analytic })
        })
        .collect::<Result<_, CliError>>()?;

    let mut columns = vec!["topology", "n", "g", "seed", "total_db", "n_squeezers", "energy", "per_mode_db"];
    if args.analytic {
        columns.extend(["analytic_db", "abs_diff"]);
    }
    if args.spectrum {
        columns.extend(["mode", "lambda_plus", "lambda_minus", "mode_db"]);
    }
    let mut table = Table::new(&columns);
    for s in &samples {
        let topology = kind.map_or_else(|| s.net.meta().topology.clone(), kind_name);
        let g = match kind {
            Some(_) => Some(args.source.params.g),
            None => s.net.meta().params.get("g").copied(),
        };
        let head: Vec<Cell> = vec![topology.as_str().into(), s.net.n().into(), g.into(), s.seed.into()];
        let mut row = head.clone();
        row.extend([
            s.report.total_db.into(),
            s.report.n_squeezers.into(),
            s.report.energy.into(),
            Cell::List(s.report.per_mode_db.clone()),
        ]);
        if args.analytic {
            row.push(s.analytic.into());
            row.push(s.analytic.map(|a| (a - s.report.total_db).abs()).into());
        }
        if args.spectrum {
            row.extend(["total".into(), Cell::Empty, Cell::Empty, Cell::Empty]);
        }
        table.push(row);
        if args.spectrum {
            for (m, (&(lp, lm), &db)) in s.spectrum.pairs.iter().zip(&s.spectrum.db).enumerate() {
                let mut row = head.clone();
                row.resize(columns.len() - 4, Cell::Empty);
                row.extend([m.to_string().as_str().into(), lp.into(), lm.into(), db.into()]);
                table.push(row);
            }
        }
    }
    if samples.len() > 1 {
        let totals: Vec<f64> = samples.iter().map(|s| s.report.total_db).collect();
        let (mean, std) = mean_std(&totals);
        table.summarize("mean_db", mean);
        table.summarize("stddev_db", std);
        if let Some(a) = samples[0].analytic {
            table.summarize("analytic_db", a);
            table.summarize("rel_diff", (mean - a).abs() / a.abs());
        }
    }
    finish(&meta, &table, common)
}

fn distance_cell(d: Option<usize>) -> Cell {
    d.map_or_else(|| "inf".into(), Into::into)
}

fn plan_path(base: &Path, protocol: Protocol, several: bool) -> PathBuf {
    if !several {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{}.{}", protocol.name(), ext.to_string_lossy()),
        None => format!("{stem}.{}", protocol.name()),
    };
    base.with_file_name(name)
}

pub fn route(args: &RouteArgs, common: &Common) -> Result<(), CliError> {
    let net = load(&args.source, common.seed)?;
    net.check_node(args.alice)?;
    net.check_node(args.bob)?;
    if args.alice == args.bob {
        return Err(usage("--alice and --bob must differ"));
    }
    let meta = Meta::new("route", config_of(args, Some(&args.source))?, common.seed);
    let ctx = RoutingContext::new(&net);
    let mut table = Table::new(&[
        "alice",
        "target",
        "protocol",
        "distance",
        "n_paths",
        "n_paths_used",
        "useful_fraction",
        "logneg",
        "logneg_raw",
    ]);
    for &protocol in &args.protocol {
        let r = ctx.run(protocol, args.alice, args.bob)?;
        table.push(vec![
            r.alice.into(),
            r.target.into(),
            protocol.name().into(),
            distance_cell(r.distance),
            r.n_paths.into(),
            r.n_paths_used.into(),
            r.useful_fraction.into(),
            r.logneg.into(),
            r.logneg_raw.into(),
        ]);
        if let Some(base) = &args.plan_out {
            let path = plan_path(base, protocol, args.protocol.len() > 1);
            emit(&(meta.comment_lines() + &r.plan.to_text()), Some(&path))?;
        }
    }
    finish(&meta, &table, common)
}

pub fn survey_cmd(args: &SurveyArgs, common: &Common) -> Result<(), CliError> {
    let net = load(&args.source, common.seed)?;
    let alice = match args.alice {
        AliceChoice::Auto => None,
        AliceChoice::Node(a) => {
            net.check_node(a)?;
            Some(a)
        }
    };
    if args.protocol.is_empty() {
        return Err(usage("no protocol requested"));
    }
    let meta = Meta::new("survey", config_of(args, Some(&args.source))?, common.seed);
    let report = survey(&net, alice, &args.protocol)?;
    let mut table = Table::new(&[
        "target",
        "distance",
        "n_paths",
        "protocol",
        "logneg",
        "n_paths_used",
        "useful_fraction",
        "wall_ms",
    ]);
    for t in &report.targets {
        for (r, &ms) in t.results.iter().zip(&t.wall_ms) {
            table.push(vec![
                t.target.into(),
                distance_cell(t.distance),
                t.n_paths.into(),
                r.protocol.name().into(),
                r.logneg.into(),
                r.n_paths_used.into(),
                r.useful_fraction.into(),
                if args.no_timing { Cell::Empty } else { ms.into() },
            ]);
        }
    }
    table.summarize("alice", report.alice);
    let means: Vec<String> =
        report.protocols.iter().zip(&report.means).map(|(p, m)| format!("{}={m}", p.name())).collect();
    table.summarize("mean_logneg", means.join(" ").as_str());
    if !args.no_timing {
        table.summarize("total_ms", report.total_ms);
    }
    finish(&meta, &table, common)
}

pub fn sweep(args: &SweepArgs, common: &Common) -> Result<(), CliError> {
    let kind = args.params.topology.ok_or_else(|| usage("--topology is required"))?;
    let seeds = sample_seeds(Some(kind), args.samples, common.seed)?;
    let sizes = args.nodes.values();
    // probe the smallest size so parameter errors surface before the fan-out
    let probe = generate_sized(kind, sizes[0], &args.params, common.seed)?;
    let has_pair = far_pair(kind, &probe).is_some();
    let metric = args.metric.unwrap_or(if has_pair { Metric::Both } else { Metric::Cost });
    let want_cost = metric != Metric::Logneg;
    let want_logneg = metric != Metric::Cost;
    if want_logneg && !has_pair {
        return Err(usage(format!("--topology {} has no canonical far pair for logneg", kind_name(kind))));
    }
    let meta = Meta::new("sweep", config_of(args, None)?, common.seed);

    let mut columns = vec!["topology", "size", "nodes", "edges", "sample", "seed"];
    if want_cost {
        columns.extend(["total_db", "per_node_db", "n_squeezers"]);
        if args.analytic {
            columns.push("analytic_db");
        }
    }
    if want_logneg {
        columns.extend(["alice", "bob", "logneg"]);
    }
    let items: Vec<(usize, usize, Option<u64>)> = sizes
        .iter()
        .flat_map(|&size| seeds.iter().enumerate().map(move |(i, &seed)| (size, i, seed)))
        .collect();
    let name = kind_name(kind);
    let rows: Vec<Vec<Cell>> = items
        .par_iter()
        .map(|&(size, sample, seed)| {
            let net = generate_sized(kind, size, &args.params, seed.unwrap_or(common.seed))?;
            let mut row: Vec<Cell> = vec![
                name.as_str().into(),
                size.into(),
                net.n().into(),
                net.edge_count().into(),
                sample.into(),
                seed.into(),
            ];
            if want_cost {
                let (report, _) = cost_of(&net)?;
                row.push(report.total_db.into());
                row.push((report.total_db / net.n() as f64).into());
                row.push(report.n_squeezers.into());
                if args.analytic {
                    row.push(analytic_total(kind, &net, &args.params)?.into());
                }
            }
            if want_logneg {
                let (a, b) = far_pair(kind, &net).expect("checked above");
                let r = RoutingContext::new(&net).run(args.protocol, a, b)?;
                row.extend([a.into(), b.into(), r.logneg.into()]);
            }
            Ok(row)
        })
        .collect::<Result<_, CliError>>()?;
    let mut table = Table::new(&columns);
    for row in rows {
        table.push(row);
    }
    finish(&meta, &table, common)
}
