use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use log::{info, warn};
use netmob_core::estimator::{mcmle, mple_with, render_table, to_json, MpleOptions};
use netmob_core::gof::{gof_run, render};
use netmob_core::ingest::{
    apply_roles, build_network, describe, read_exclusions, read_roles, read_tweets, save_edge_log, sort_records,
};
use netmob_core::io::{read_edge_list, read_node_table, save_edge_list, save_node_table};
use netmob_core::model_file::parse_model_spec;
use netmob_core::sampler::simulate;
use netmob_core::scenario::{generate_scenario, RoleCounts, ScenarioKind};
use netmob_core::{
    DirectedGraph, EstimationError, FitResult, McmleConfig, Model, ModelSpec, NodeTable, SamplerConfig,
};

use crate::manifest::Manifest;
use crate::{
    fail, Command, DescribeArgs, Failure, FitArgs, GofArgs, IngestArgs, MethodArg, NetworkInput, Output, Sampling,
    ScenarioArgs, SimulateArgs,
};

pub fn run(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Ingest(a) => ingest(a, command),
        Command::Describe(a) => describe_cmd(a, command),
        Command::Fit(a) => fit(a, command),
        Command::Simulate(a) => simulate_cmd(a, command),
        Command::Gof(a) => gof(a, command),
        Command::Scenario(a) => scenario(a, command),
    }
}

fn require(path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::new("cli", "check_inputs", format!("{}: no such file", path.display())))
    }
}

fn prepare(output: &Output) -> Result<(), Failure> {
    std::fs::create_dir_all(&output.out_dir)
        .map_err(|e| Failure::new("cli", "create_out_dir", format!("{}: {e}", output.out_dir.display())))
}

fn with_path<'a, E: std::fmt::Display>(module: &'static str, operation: &'static str, path: &'a Path) -> impl Fn(E) -> Failure + 'a {
    move |e| Failure::new(module, operation, format!("{}: {e}", path.display()))
}

fn load_network(net: &NetworkInput, manifest: &mut Manifest) -> Result<(DirectedGraph, NodeTable), Failure> {
    require(&net.input)?;
    require(&net.roles)?;
    let nodes = read_node_table(&net.roles).map_err(with_path("graph_core", "read_node_table", &net.roles))?;
    let g = read_edge_list(&net.input, Some(nodes.len())).map_err(with_path("graph_core", "read_edge_list", &net.input))?;
    manifest.input(&net.input)?;
    manifest.input(&net.roles)?;
    Ok((g, nodes))
}

fn load_spec(path: &Path, manifest: &mut Manifest) -> Result<ModelSpec, Failure> {
    require(path)?;
    let src = std::fs::read_to_string(path).map_err(with_path("model_terms", "read_model", path))?;
    let spec = parse_model_spec(&src).map_err(with_path("model_terms", "parse_model", path))?;
    manifest.input(path)?;
    Ok(spec)
}

fn load_fit(path: &Path, model: &Model, manifest: &mut Manifest) -> Result<FitResult, Failure> {
    require(path)?;
    let src = std::fs::read_to_string(path).map_err(with_path("estimator", "read_fit", path))?;
    let fit: FitResult = serde_json::from_str(&src).map_err(with_path("estimator", "read_fit", path))?;
    let names = model.spec().coef_names();
    if fit.terms != names {
        return Err(Failure::new(
            "estimator",
            "read_fit",
            format!("{}: fit terms {:?} do not match model terms {:?}", path.display(), fit.terms, names),
        ));
    }
    manifest.input(path)?;
    Ok(fit)
}

fn sampler_config(n: usize, s: &Sampling, default_samples: usize) -> SamplerConfig {
    let base = SamplerConfig::for_nodes(n);
    SamplerConfig {
        burn_in: s.burn_in.unwrap_or(base.burn_in),
        interval: s.interval.unwrap_or(base.interval),
        sample_size: s.samples.unwrap_or(default_samples),
        seed: s.seed,
        ..base
    }
}

fn estimate(
    g: &DirectedGraph,
    model: &Model,
    method: MethodArg,
    sampling: &Sampling,
    manifest: &mut Manifest,
) -> Result<FitResult, Failure> {
    let start = mple_with(g, model, &MpleOptions::default()).map_err(fail("estimator", "mple"))?;
    if let MethodArg::Mple = method {
        return Ok(start);
    }
    let n = g.node_count();
    let defaults = McmleConfig::for_nodes(n);
    let config = McmleConfig {
        sampler: sampler_config(n, sampling, defaults.sampler.sample_size),
        ..defaults
    };
    info!("MC-MLE from the MPLE, {} samples per iteration", config.sampler.sample_size);
    mcmle(g, model, &start.theta, &config).map_err(|e| {
        // keep the last iterate for inspection before failing
        if let EstimationError::DegenerateModel { partial, .. } | EstimationError::NonConvergence { partial, .. } = &e {
            if let Err(w) = manifest.write("fit_partial.json", &to_json(partial)) {
                warn!("could not save partial fit: {}", w.cause);
            }
        }
        Failure::new("estimator", "mcmle", e)
    })
}

fn ingest(a: &IngestArgs, cmd: &Command) -> Result<(), Failure> {
    require(&a.input)?;
    for p in a.roles.iter().chain(&a.exclude) {
        require(p)?;
    }
    prepare(&a.output)?;
    let mut manifest = Manifest::new("ingest", cmd, None, &a.output.out_dir);
    let mut records = read_tweets(&a.input).map_err(with_path("ingest", "read_tweets", &a.input))?;
    manifest.input(&a.input)?;
    sort_records(&mut records);
    let exclude = match &a.exclude {
        Some(p) => {
            manifest.input(p)?;
            read_exclusions(p).map_err(with_path("ingest", "read_exclusions", p))?
        }
        None => HashSet::new(),
    };
    let mut net = build_network(&records, a.limit, &exclude);
    info!("{} retweets over {} users", net.log.len(), net.nodes.len());
    if let Some(p) = &a.roles {
        let roles = read_roles(p).map_err(with_path("ingest", "read_roles", p))?;
        manifest.input(p)?;
        apply_roles(&mut net.nodes, &roles);
    }
    let out = &a.output.out_dir;
    let edges = out.join("edges.tsv");
    save_edge_list(&net.graph, &edges).map_err(fail("graph_core", "write_edge_list"))?;
    manifest.artifact(&edges)?;
    let nodes = out.join("nodes.csv");
    save_node_table(&net.nodes, &nodes).map_err(fail("graph_core", "write_node_table"))?;
    manifest.artifact(&nodes)?;
    let log = out.join("edge_log.csv");
    save_edge_log(&net.log, &log).map_err(fail("ingest", "write_edge_log"))?;
    manifest.artifact(&log)?;
    let stats = describe(&net.graph, &net.nodes, net.log.len());
    manifest.write("descriptives.json", &(stats.to_json() + "\n"))?;
    manifest.write("descriptives.txt", &stats.render_text())?;
    manifest.finish()
}

fn describe_cmd(a: &DescribeArgs, cmd: &Command) -> Result<(), Failure> {
    let mut manifest = Manifest::new("describe", cmd, None, &a.output.out_dir);
    let (g, nodes) = load_network(&a.network, &mut manifest)?;
    let raw = match &a.edge_log {
        Some(p) => {
            require(p)?;
            let text = std::fs::read_to_string(p).map_err(with_path("ingest", "read_edge_log", p))?;
            manifest.input(p)?;
            text.lines().skip(1).filter(|l| !l.trim().is_empty()).count()
        }
        None => g.edge_count(),
    };
    prepare(&a.output)?;
    let stats = describe(&g, &nodes, raw);
    print!("{}", stats.render_text());
    manifest.write("descriptives.json", &(stats.to_json() + "\n"))?;
    manifest.write("descriptives.txt", &stats.render_text())?;
    manifest.finish()
}

fn fit(a: &FitArgs, cmd: &Command) -> Result<(), Failure> {
    let mut manifest = Manifest::new("fit", cmd, Some(a.sampling.seed), &a.output.out_dir);
    let (g, nodes) = load_network(&a.network, &mut manifest)?;
    let spec = load_spec(&a.model, &mut manifest)?;
    prepare(&a.output)?;
    let model = Model::new(&spec, &nodes).map_err(fail("model_terms", "bind_model"))?;
    let result = estimate(&g, &model, a.method, &a.sampling, &mut manifest);
    let fit = match result {
        Ok(f) => f,
        Err(e) => {
            manifest.finish()?;
            return Err(e);
        }
    };
    let table = render_table(&fit);
    print!("{table}");
    manifest.write("fit.json", &(to_json(&fit) + "\n"))?;
    manifest.write("fit.txt", &table)?;
    manifest.finish()
}

fn parse_theta(s: &str, expected: usize) -> Result<Vec<f64>, Failure> {
    let theta: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::new("cli", "parse_theta", format!("{s:?}: {e}")))?;
    if theta.len() != expected {
        return Err(Failure::new(
            "cli",
            "parse_theta",
            format!("{} coefficients given, model has {expected} terms", theta.len()),
        ));
    }
    Ok(theta)
}

fn simulate_cmd(a: &SimulateArgs, cmd: &Command) -> Result<(), Failure> {
    let mut manifest = Manifest::new("simulate", cmd, Some(a.sampling.seed), &a.output.out_dir);
    require(&a.roles)?;
    let nodes = read_node_table(&a.roles).map_err(with_path("graph_core", "read_node_table", &a.roles))?;
    manifest.input(&a.roles)?;
    let spec = load_spec(&a.model, &mut manifest)?;
    let model = Model::new(&spec, &nodes).map_err(fail("model_terms", "bind_model"))?;
    let theta = match (&a.theta, &a.fit) {
        (Some(t), _) => parse_theta(t, model.len())?,
        (None, Some(p)) => load_fit(p, &model, &mut manifest)?.theta,
        (None, None) => unreachable!("clap requires --theta or --fit"),
    };
    let start = match &a.input {
        Some(p) => {
            require(p)?;
            manifest.input(p)?;
            read_edge_list(p, Some(nodes.len())).map_err(with_path("graph_core", "read_edge_list", p))?
        }
        None => DirectedGraph::empty(nodes.len()),
    };
    prepare(&a.output)?;
    let config = sampler_config(nodes.len(), &a.sampling, 100);
    let samples = simulate(&model, &theta, &config, &start).map_err(fail("sampler", "simulate"))?;
    let mut csv = String::from("sample");
    for name in model.spec().coef_names() {
        let _ = write!(csv, ",{name}");
    }
    csv.push('\n');
    let width = samples.len().to_string().len().max(4);
    for (k, (g, stats)) in samples.iter().enumerate() {
        let _ = write!(csv, "{}", k + 1);
        for v in stats.iter() {
            let _ = write!(csv, ",{v}");
        }
        csv.push('\n');
        if a.edge_lists {
            let dir = a.output.out_dir.join("samples");
            std::fs::create_dir_all(&dir).map_err(with_path("cli", "create_out_dir", &dir))?;
            let path = dir.join(format!("sample_{:0width$}.tsv", k + 1));
            save_edge_list(g, &path).map_err(fail("graph_core", "write_edge_list"))?;
            manifest.artifact(&path)?;
        }
    }
    manifest.write("stats.csv", &csv)?;
    manifest.finish()
}

fn gof(a: &GofArgs, cmd: &Command) -> Result<(), Failure> {
    let mut manifest = Manifest::new("gof", cmd, Some(a.sampling.seed), &a.output.out_dir);
    let (g, nodes) = load_network(&a.network, &mut manifest)?;
    let spec = load_spec(&a.model, &mut manifest)?;
    let model = Model::new(&spec, &nodes).map_err(fail("model_terms", "bind_model"))?;
    prepare(&a.output)?;
    let fit = match &a.fit {
        Some(p) => load_fit(p, &model, &mut manifest)?,
        None => {
            let f = estimate(&g, &model, a.method, &a.sampling, &mut manifest)?;
            manifest.write("fit.json", &(to_json(&f) + "\n"))?;
            f
        }
    };
    let config = sampler_config(g.node_count(), &a.sampling, 100);
    let report = gof_run(&g, &model, &fit, &config).map_err(fail("gof", "gof_run"))?;
    for path in render(&report, &a.output.out_dir).map_err(fail("gof", "render"))? {
        manifest.artifact(&path)?;
    }
    let (inside, total) = report.coverage();
    let summary = serde_json::json!({
        "inside": inside,
        "coordinates": total,
        "fraction_inside": report.fraction_inside(),
        "samples": config.sample_size,
    });
    println!("{inside} of {total} auxiliary coordinates inside the 95% envelope");
    manifest.write("gof_summary.json", &(serde_json::to_string_pretty(&summary).expect("summary") + "\n"))?;
    manifest.finish()
}

fn scenario(a: &ScenarioArgs, cmd: &Command) -> Result<(), Failure> {
    let kind: ScenarioKind = a.kind.parse().map_err(fail("sampler", "scenario"))?;
    prepare(&a.output)?;
    let mut manifest = Manifest::new("scenario", cmd, Some(a.seed), &a.output.out_dir);
    let counts = RoleCounts::observed(kind).scaled(a.size);
    let (g, nodes) = generate_scenario(kind, &counts, a.seed).map_err(fail("sampler", "generate_scenario"))?;
    info!("{} edges over {} nodes", g.edge_count(), g.node_count());
    let edges = a.output.out_dir.join("edges.tsv");
    save_edge_list(&g, &edges).map_err(fail("graph_core", "write_edge_list"))?;
    manifest.artifact(&edges)?;
    let node_path = a.output.out_dir.join("nodes.csv");
    save_node_table(&nodes, &node_path).map_err(fail("graph_core", "write_node_table"))?;
    manifest.artifact(&node_path)?;
    manifest.finish()
}
