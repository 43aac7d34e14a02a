use std::fmt::Write as _;
use std::path::Path;

use edgelim::experiment::{converge_models_with, ConvergenceReport, Family};
use edgelim::graph::SimpleGraph;
use edgelim::graphon::{cut_distance_aligned, cut_seminorm, tau, StepGraphon};
use edgelim::hilbert::{Dictionary, SearchBudget, Tensor};
use edgelim::orbit::{orbit_distance_models_with, orbit_distance_with, GroupKind, GroupSpec, Metric, ModelMetric};
use edgelim::regularity::{greedy_decompose_with, q_k_membership_with, verify_energy_identity_with};
use edgelim::vertex_model::{partition_function, pi_f_with_plan, EdgeModel, Engine};
use serde::Serialize;
use serde_json::{json, Value};

use crate::options::{read_json, Options};
use crate::{CliError, Command};

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    seed: u64,
    tolerances: edgelim::Tolerances,
    result: Value,
}

struct Output {
    result: Value,
    csv: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// A graph file if `spec` names an existing path, else a built-in name.
fn load_graph(spec: &str) -> Result<SimpleGraph, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        return read_json(path);
    }
    SimpleGraph::named(spec).map_err(|_| CliError::Parse(format!("graph {spec:?}: no such file or built-in name")))
}

fn load_graphs(specs: &[String]) -> Result<Vec<SimpleGraph>, CliError> {
    specs.iter().map(|s| load_graph(s)).collect()
}

fn load_dictionary(spec: &str, order: usize, dim: usize, seed: u64) -> Result<Dictionary, CliError> {
    let dict = match spec {
        "basis" => Dictionary::standard_basis(dim)?,
        "signed_basis" => Dictionary::signed_basis(dim)?,
        "rank_one" => Dictionary::rank_one_ball(order, dim)?.with_budget(SearchBudget {
            seed,
            ..SearchBudget::default()
        }),
        "cut" => Dictionary::uniform_cut(dim)?,
        path => read_json(Path::new(path))?,
    };
    Ok(dict)
}

fn group_spec(name: &str, n: usize, seed: u64, samples: usize, refine: usize) -> Result<GroupSpec, CliError> {
    let kind = match name {
        "permutations" | "perm" => GroupKind::Permutations { n },
        "signed_permutations" | "signed" => GroupKind::SignedPermutations { n },
        "sampled_orthogonal" | "sampled" => GroupKind::SampledOrthogonal {
            n,
            sample_count: samples,
            refine_steps: refine,
        },
        other => return Err(CliError::Parse(format!("--group {other:?}: unknown group"))),
    };
    Ok(GroupSpec { kind, seed })
}

fn csv_line(cells: &[String]) -> String {
    let mut line = cells.join(",");
    line.push('\n');
    line
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn graph_rows(specs: &[String], values: &[f64]) -> String {
    let mut out = csv_line(&["graph".into(), "value".into()]);
    for (s, v) in specs.iter().zip(values) {
        out.push_str(&csv_line(&[s.clone(), fmt(*v)]));
    }
    out
}

fn convergence_csv(report: &ConvergenceReport, specs: &[String]) -> String {
    let mut header = vec!["i".to_string()];
    header.extend(specs.iter().map(|s| format!("value_{s}")));
    header.push("distance_to_previous".into());
    header.extend(specs.iter().map(|s| format!("gap_{s}")));
    header.extend(specs.iter().map(|s| format!("bound_{s}")));
    let mut out = csv_line(&header);
    for row in &report.rows {
        let mut cells = vec![row.i.to_string()];
        cells.extend(row.values.iter().map(|v| fmt(*v)));
        cells.push(row.distance_to_previous.map(fmt).unwrap_or_default());
        for col in [&row.gaps, &row.bounds] {
            match col {
                Some(v) => cells.extend(v.iter().map(|x| fmt(*x))),
                None => cells.extend(specs.iter().map(|_| String::new())),
            }
        }
        out.push_str(&csv_line(&cells));
    }
    out
}

fn decompose(input: &Path, k: usize, opts: &Options) -> Result<Output, CliError> {
    let a: Tensor = read_json(input)?;
    let dict = load_dictionary(opts.dict.as_deref().unwrap_or("basis"), a.order(), a.dim(), opts.seed)?;
    let dec = greedy_decompose_with(&a, &dict, k, &opts.tol)?;
    let energy = verify_energy_identity_with(&dec, &dict, &opts.tol)?;
    let member = q_k_membership_with(&dec, &opts.tol);
    let mut csv = csv_line(&["step".into(), "energy".into()]);
    for (i, e) in dec.energy_log.iter().enumerate() {
        csv.push_str(&csv_line(&[i.to_string(), fmt(*e)]));
    }
    Ok(Output {
        result: json!({
            "energy_log": dec.energy_log,
            "steps": dec.steps,
            "residual_seminorm": dec.residual_seminorm,
            "threshold": dec.threshold(),
            "certified": dec.certified,
            "in_q_k": member,
            "energy_check": energy,
            "decomposition": dec,
        }),
        csv: Some(csv),
    })
}

fn pf(model: &Path, specs: &[String], opts: &Options) -> Result<Output, CliError> {
    let model: EdgeModel = read_json(model)?;
    let graphs = load_graphs(specs)?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for (spec, f) in specs.iter().zip(&graphs) {
        let (value, order) = match opts.engine {
            Engine::Contract => {
                let (value, plan) = pi_f_with_plan(&model.assignment(f)?, f)?;
                if opts.verbose {
                    eprintln!("{spec}: contraction order {:?}, max scope {}", plan.order, plan.max_scope);
                }
                (value, Some(plan))
            }
            Engine::Brute => (partition_function(&model, f, Engine::Brute)?, None),
        };
        values.push(value);
        rows.push(json!({"graph": spec, "value": value, "plan": order}));
    }
    Ok(Output {
        result: json!({"engine": opts.engine, "rows": rows}),
        csv: Some(graph_rows(specs, &values)),
    })
}

fn tau_cmd(graphon: &Path, specs: &[String]) -> Result<Output, CliError> {
    let w: StepGraphon = read_json(graphon)?;
    let graphs = load_graphs(specs)?;
    let values = graphs.iter().map(|f| tau(&w, f)).collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Value> = specs
        .iter()
        .zip(&values)
        .map(|(s, v)| json!({"graph": s, "value": v}))
        .collect();
    Ok(Output {
        result: json!({ "rows": rows }),
        csv: Some(graph_rows(specs, &values)),
    })
}

fn is_model(v: &Value) -> bool {
    v.get("tensors").is_some()
}

fn parse_value<T: serde::de::DeserializeOwned>(v: Value, path: &Path) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn orbitdist(left: &Path, right: &Path, metric: &str, samples: usize, refine: usize, opts: &Options) -> Result<Output, CliError> {
    let (lv, rv): (Value, Value) = (read_json(left)?, read_json(right)?);
    if is_model(&lv) != is_model(&rv) {
        return Err(CliError::Parse("both inputs must be tensors or both models".into()));
    }
    let distance = if is_model(&lv) {
        let (x, y): (EdgeModel, EdgeModel) = (parse_value(lv, left)?, parse_value(rv, right)?);
        let group = group_spec(&opts.group, x.dim(), opts.seed, samples, refine)?;
        let metric = match metric {
            "hilbert" => ModelMetric::Hilbert,
            "rank_one" => ModelMetric::RankOne {
                budget: SearchBudget {
                    seed: opts.seed,
                    ..SearchBudget::default()
                },
            },
            other => return Err(CliError::Parse(format!("--metric {other:?}: models take hilbert or rank_one"))),
        };
        orbit_distance_models_with(&x, &y, &group, &metric, &opts.tol)?
    } else {
        let (x, y): (Tensor, Tensor) = (parse_value(lv, left)?, parse_value(rv, right)?);
        let group = group_spec(&opts.group, x.dim(), opts.seed, samples, refine)?;
        let metric = match metric {
            "hilbert" => Metric::Hilbert,
            "seminorm" => {
                let spec = opts
                    .dict
                    .as_deref()
                    .ok_or_else(|| CliError::Parse("--metric seminorm needs --dict".into()))?;
                Metric::Seminorm {
                    dictionary: load_dictionary(spec, x.order(), x.dim(), opts.seed)?,
                }
            }
            other => return Err(CliError::Parse(format!("--metric {other:?}: tensors take hilbert or seminorm"))),
        };
        orbit_distance_with(&x, &y, &group, &metric, &opts.tol)?
    };
    let n = (distance.witness.len() as f64).sqrt().round() as usize;
    let witness: Vec<&[f64]> = distance.witness.chunks(n.max(1)).collect();
    Ok(Output {
        result: json!({
            "group": opts.group,
            "value": distance.value,
            "kind": distance.kind,
            "witness": witness,
        }),
        csv: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn converge(
    family: &str,
    specs: &[String],
    i_max: usize,
    dim: usize,
    max_order: usize,
    scale: f64,
    p: f64,
    step: usize,
    opts: &Options,
) -> Result<Output, CliError> {
    let family = match family {
        "perturbed" | "a" => Family::Perturbed { dim, max_order, scale },
        "padded" | "b" => Family::Padded { dim, max_order },
        "sampled" | "c" => Family::Sampled { p, step },
        other => return Err(CliError::Parse(format!("--family {other:?}: expected perturbed, padded or sampled"))),
    };
    let graphs = load_graphs(specs)?;
    let report = converge_models_with(&family, &graphs, i_max, opts.seed, opts.engine, &opts.tol)?;
    if opts.verbose {
        if let Some(t) = &report.truncated {
            eprintln!("truncated at {t}");
        }
    }
    let csv = convergence_csv(&report, specs);
    let mut result = to_value(&report);
    result["graphs"] = json!(specs);
    Ok(Output { result, csv: Some(csv) })
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Decompose { .. } => "decompose",
        Command::Pf { .. } => "pf",
        Command::Tau { .. } => "tau",
        Command::Cutnorm { .. } => "cutnorm",
        Command::Cutdist { .. } => "cutdist",
        Command::Orbitdist { .. } => "orbitdist",
        Command::Converge { .. } => "converge",
    }
}

/// Computes the full report, then writes it; nothing is written on failure.
pub fn run(cmd: &Command, opts: &Options) -> Result<(), CliError> {
    let output = match cmd {
        Command::Decompose { input, k } => decompose(input, *k, opts)?,
        Command::Pf { model, graphs } => pf(model, graphs, opts)?,
        Command::Tau { graphon, graphs } => tau_cmd(graphon, graphs)?,
        Command::Cutnorm { graphon } => Output {
            result: to_value(&cut_seminorm(&read_json(graphon)?)?),
            csv: None,
        },
        Command::Cutdist { left, right } => Output {
            result: to_value(&cut_distance_aligned(&read_json(left)?, &read_json(right)?)?),
            csv: None,
        },
        Command::Orbitdist {
            left,
            right,
            metric,
            samples,
            refine,
        } => orbitdist(left, right, metric, *samples, *refine, opts)?,
        Command::Converge {
            family,
            graphs,
            i_max,
            dim,
            max_order,
            scale,
            p,
            step,
        } => converge(family, graphs, *i_max, *dim, *max_order, *scale, *p, *step, opts)?,
    };
    let envelope = Envelope {
        command: command_name(cmd),
        seed: opts.seed,
        tolerances: opts.tol,
        result: output.result,
    };
    let mut text = serde_json::to_string_pretty(&envelope).expect("reports serialize");
    writeln!(text).expect("writing to a string");

    if let (Some(path), Some(csv)) = (&opts.csv, &output.csv) {
        std::fs::write(path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    match &opts.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}
