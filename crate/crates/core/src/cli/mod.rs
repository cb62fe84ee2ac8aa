pub mod args;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::{json, Value};

use qfs::data::{discretize, gen_synth, load_csv, write_csv_to, write_csv_with_comment, SynthSpec};
use qfs::eval::{distance_graph, recovery_report, FeatureSubset};
use qfs::manifest::{with_manifest, RunManifest};
use qfs::qubo::{self, ExportFormat};
use qfs::selection::{
    monotonicity_violations, random_instance, select_k, sweep_alpha, uniform_grid,
    verify_subset_sizes, SubsetSizeReport,
};
use qfs::solve::{solve, solve_exhaustive, summarize, SolverKind};
use qfs::{DiscretizedDataset, MutualInformation, QfsError, QuboInstance};

use args::*;

/// Exit status of a successful run whose verification found a counterexample.
pub const EXIT_VERIFICATION_FAILED: u8 = 5;

/// Outcome of a subcommand that ran to completion.
pub enum Outcome {
    Success,
    VerificationFailed,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::GenSynth(a) => gen_synth_cmd(a),
        Command::Discretize(a) => discretize_cmd(a),
        Command::Mi(a) => mi_cmd(a),
        Command::Build(a) => build_cmd(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Select(a) => select_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::VerifyProp1(a) => verify_cmd(a),
        Command::Eval(EvalCommand::Recovery(a)) => recovery_cmd(a),
        Command::Eval(EvalCommand::Graph(a)) => graph_cmd(a),
        Command::Export(a) => export_cmd(a),
    }
}

fn require_inputs(paths: &[&Path]) -> Result<()> {
    for path in paths {
        if !path.exists() {
            let err = std::io::Error::new(std::io::ErrorKind::NotFound, "no such file");
            return Err(QfsError::Io {
                path: path.to_path_buf(),
                source: err,
            }
            .into());
        }
    }
    Ok(())
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: Value, manifest: &RunManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&with_manifest(value, manifest))?;
    text.push('\n');
    write_text(out, &text)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| QfsError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| QfsError::Malformed(format!("{}: {e}", path.display())).into())
}

fn read_mi(path: &Path) -> Result<MutualInformation> {
    let mi: MutualInformation = read_json(path)?;
    Ok(MutualInformation::new(mi.importance, mi.redundancy)?)
}

fn manifest(subcommand: &str, inputs: &[&Path], out: Option<&Path>) -> RunManifest {
    let mut m = RunManifest::new(subcommand);
    m.inputs = inputs.iter().map(|p| p.to_path_buf()).collect();
    m.outputs = out.into_iter().map(Path::to_path_buf).collect();
    m
}

fn truth_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".truth.json");
    PathBuf::from(name)
}

fn gen_synth_cmd(a: GenSynthArgs) -> Result<Outcome> {
    let spec = SynthSpec::new(a.n, a.d_inf, a.n_samples, a.seed)?;
    let (dataset, informative) = gen_synth(&spec)?;
    let mut m = manifest("gen-synth", &[], a.out.as_deref())
        .parameter("n", a.n)
        .parameter("d_inf", a.d_inf)
        .parameter("n_samples", a.n_samples);
    m.seed = Some(a.seed);
    match &a.out {
        Some(out) => {
            let truth = truth_path(out);
            m.outputs.push(truth.clone());
            write_csv_with_comment(&dataset, out, Some(&format!("manifest {}", m.to_line())))?;
            emit_json(
                Some(&truth),
                json!({ "n": a.n, "informative": informative }),
                &m,
            )?;
        }
        None => {
            let stdout = std::io::stdout().lock();
            write_csv_to(&dataset, stdout, Some(&format!("manifest {}", m.to_line())))?;
        }
    }
    Ok(Outcome::Success)
}

fn discretize_cmd(a: DiscretizeArgs) -> Result<Outcome> {
    require_inputs(&[&a.data.input])?;
    let dataset = load_csv(&a.data.input, &a.data.label_column())?;
    let binned = discretize(&dataset, a.bins)?;
    let mut m = manifest("discretize", &[&a.data.input], a.out.as_deref());
    m.n_bins = Some(a.bins);
    emit_json(a.out.as_deref(), serde_json::to_value(&binned)?, &m)?;
    Ok(Outcome::Success)
}

/// Loads a CSV and bins it, or reads an already discretized JSON file.
fn load_binned(
    input: &Path,
    label: &str,
    bins: usize,
) -> Result<(DiscretizedDataset, Option<usize>)> {
    if input.extension().and_then(|e| e.to_str()) == Some("json") {
        let d: DiscretizedDataset = read_json(input)?;
        Ok((d, None))
    } else {
        let dataset = load_csv(input, &label_column(label))?;
        Ok((discretize(&dataset, bins)?, Some(bins)))
    }
}

fn mi_cmd(a: MiArgs) -> Result<Outcome> {
    require_inputs(&[&a.input])?;
    let (binned, bins) = load_binned(&a.input, &a.label, a.bins)?;
    let mi = MutualInformation::compute(&binned);
    let mut m = manifest("mi", &[&a.input], a.out.as_deref());
    m.n_bins = bins.or(Some(binned.n_bins()));
    emit_json(a.out.as_deref(), serde_json::to_value(&mi)?, &m)?;
    Ok(Outcome::Success)
}

fn source_mi(
    source: &SourceArgs,
    binning: &BinningArgs,
    m: &mut RunManifest,
) -> Result<MutualInformation> {
    if let Some(path) = &source.mi {
        require_inputs(&[path])?;
        m.inputs.push(path.clone());
        read_mi(path)
    } else {
        let path = source.input.as_ref().expect("clap enforces one source");
        require_inputs(&[path])?;
        m.inputs.push(path.clone());
        let (binned, bins) = load_binned(path, &binning.label, binning.bins)?;
        m.n_bins = bins.or(Some(binned.n_bins()));
        Ok(MutualInformation::compute(&binned))
    }
}

fn write_qubo(
    q: &QuboInstance,
    out: Option<&Path>,
    format: ExportFormat,
    m: &RunManifest,
) -> Result<()> {
    match format {
        ExportFormat::Json => emit_json(out, serde_json::to_value(q.to_file())?, m),
        ExportFormat::CoordinateList => {
            let text = format!("# manifest {}\n{}", m.to_line(), q.to_coordinate_list());
            write_text(out, &text)
        }
    }
}

fn build_cmd(a: BuildArgs) -> Result<Outcome> {
    require_inputs(&[&a.mi])?;
    let mi = read_mi(&a.mi)?;
    let mut m = manifest("build", &[&a.mi], a.out.as_deref()).parameter("alpha", a.alpha);
    let q = if let Some(k) = a.penalty_k {
        let lambda = a.lambda.expect("clap requires lambda with penalty-k");
        m.k = Some(k);
        m = m.parameter("lambda", lambda);
        qubo::build_penalty(&mi.importance, &mi.redundancy, a.alpha, k, lambda)?
    } else if a.raw {
        qubo::build(&mi.importance, &mi.redundancy, a.alpha)?
    } else {
        m.epsilon = Some(a.threshold.epsilon);
        m.mu = Some(a.threshold.mu);
        qubo::build_with_threshold(
            &mi.importance,
            &mi.redundancy,
            a.alpha,
            a.threshold.epsilon,
            a.threshold.mu,
        )?
    };
    if let Some(p) = q.provenance().and_then(|p| p.mu) {
        m = m.parameter("mu_value", p);
    }
    if let Some(path) = &a.ising {
        m.outputs.push(path.clone());
        emit_json(Some(path), serde_json::to_value(q.to_ising())?, &m)?;
    }
    let format = a
        .out
        .as_deref()
        .map_or(ExportFormat::Json, ExportFormat::from_path);
    write_qubo(&q, a.out.as_deref(), format, &m)?;
    Ok(Outcome::Success)
}

fn solve_cmd(a: SolveArgs) -> Result<Outcome> {
    require_inputs(&[&a.qubo])?;
    let q = QuboInstance::read_from(&a.qubo)?;
    let cfg = a.solver.config(q.n());
    let mut m = manifest("solve", &[&a.qubo], a.out.as_deref());
    m.seed = Some(cfg.seed);
    m.solver = Some(cfg);
    let samples = solve(&q, &cfg)?;
    let reference = match (a.reference, cfg.kind) {
        (Some(r), _) => Some(r),
        (None, SolverKind::Exhaustive) => Some(solve_exhaustive(&q)?.energy),
        (None, _) => None,
    };
    let mut report = serde_json::to_value(summarize(&samples, reference))?;
    if a.samples {
        report["samples"] = serde_json::to_value(&samples.samples)?;
    }
    emit_json(a.out.as_deref(), report, &m)?;
    Ok(Outcome::Success)
}

fn select_cmd(a: SelectArgs) -> Result<Outcome> {
    let mut m = manifest("select", &[], a.out.as_deref());
    let mi = source_mi(&a.source, &a.binning, &mut m)?;
    let cfg = a.solver.config(mi.n());
    let threshold = a.threshold.threshold();
    m.k = Some(a.k);
    m.epsilon = Some(threshold.epsilon);
    m.mu = Some(threshold.mu);
    m.seed = Some(cfg.seed);
    m.solver = Some(cfg);
    let result = select_k(&mi.importance, &mi.redundancy, a.k, &cfg, &threshold)?;
    let mut value = serde_json::to_value(&result)?;
    value["selected"] = json!(result.selected());
    emit_json(a.out.as_deref(), value, &m)?;
    Ok(Outcome::Success)
}

fn sweep_cmd(a: SweepArgs) -> Result<Outcome> {
    let mut m = manifest("sweep", &[], a.out.as_deref());
    let mi = source_mi(&a.source, &a.binning, &mut m)?;
    let cfg = a.solver.config(mi.n());
    let threshold = a.threshold.threshold();
    let grid = a.alphas.clone().unwrap_or_else(|| uniform_grid(a.points));
    m.epsilon = Some(threshold.epsilon);
    m.mu = Some(threshold.mu);
    m.seed = Some(cfg.seed);
    m.solver = Some(cfg);
    m = m.parameter("grid_points", grid.len());
    let points = sweep_alpha(&mi.importance, &mi.redundancy, &grid, &cfg, &threshold)?;
    let violations = monotonicity_violations(&points);
    emit_json(
        a.out.as_deref(),
        json!({ "points": points, "violations": violations }),
        &m,
    )?;
    Ok(Outcome::Success)
}

fn witness_table(reports: &[(String, SubsetSizeReport)]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<10} {:<6} witnesses (k:α, * = only at a tie)",
        "instance", "holds"
    )
    .unwrap();
    for (name, report) in reports {
        let cells: Vec<String> = report
            .witnesses
            .iter()
            .map(|w| match w.alpha {
                Some(alpha) => format!("{}:{:.6}{}", w.k, alpha, if w.strict { "" } else { "*" }),
                None => format!("{}:-", w.k),
            })
            .collect();
        let holds = if report.holds { "yes" } else { "NO" };
        writeln!(out, "{name:<10} {holds:<6} {}", cells.join(" ")).unwrap();
    }
    out
}

fn verify_cmd(a: VerifyArgs) -> Result<Outcome> {
    let mut m = manifest("verify-prop1", &[], a.out.as_deref());
    let reports: Vec<(String, SubsetSizeReport)> = match &a.mi {
        Some(path) => {
            require_inputs(&[path])?;
            m.inputs.push(path.clone());
            let mi = read_mi(path)?;
            vec![(
                "input".into(),
                verify_subset_sizes(&mi.importance, &mi.redundancy)?,
            )]
        }
        None => {
            m.seed = Some(a.seed);
            m = m.parameter("n", a.n).parameter("trials", a.trials);
            (0..a.trials)
                .map(|t| {
                    let (imp, red) = random_instance(a.n, a.seed.wrapping_add(t as u64));
                    Ok((format!("trial {t}"), verify_subset_sizes(&imp, &red)?))
                })
                .collect::<Result<_>>()?
        }
    };
    print!("{}", witness_table(&reports));
    if let Some(out) = &a.out {
        let body: Vec<Value> = reports
            .iter()
            .map(|(name, r)| json!({ "instance": name, "report": r }))
            .collect();
        emit_json(Some(out), json!({ "instances": body }), &m)?;
    }
    let failed = reports.iter().filter(|(_, r)| !r.holds).count();
    if failed > 0 {
        eprintln!(
            "{failed} of {} instances have an unattainable subset size",
            reports.len()
        );
        return Ok(Outcome::VerificationFailed);
    }
    Ok(Outcome::Success)
}

/// A subset given inline or as a file; inline lists carry no dimension.
enum SubsetSpec {
    Resolved(FeatureSubset),
    Indices(Vec<usize>),
}

fn parse_subset(text: &str) -> Result<SubsetSpec> {
    let path = Path::new(text);
    if path.is_file() {
        let v: Value = read_json(path)?;
        let n = v.get("n").and_then(Value::as_u64).map(|n| n as usize);
        if let Some(bits) = v.get("x_star") {
            let bits: Vec<u8> = serde_json::from_value(bits.clone())?;
            return Ok(SubsetSpec::Resolved(FeatureSubset::from_bits(&bits)));
        }
        for key in ["informative", "indices", "features"] {
            if let Some(ix) = v.get(key) {
                let ix: Vec<usize> = serde_json::from_value(ix.clone())?;
                return Ok(match n {
                    Some(n) => SubsetSpec::Resolved(FeatureSubset::new(ix, n)?),
                    None => SubsetSpec::Indices(ix),
                });
            }
        }
        bail!(QfsError::Malformed(format!(
            "{}: expected x_star, informative, indices or features",
            path.display()
        )));
    }
    let ix = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>().map_err(|_| {
                QfsError::InvalidArgument(format!("'{text}' is neither a file nor an index list"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SubsetSpec::Indices(ix))
}

fn resolve(spec: SubsetSpec, n: Option<usize>) -> Result<FeatureSubset> {
    match spec {
        SubsetSpec::Resolved(s) => Ok(s),
        SubsetSpec::Indices(ix) => {
            let n = n.ok_or_else(|| {
                QfsError::InvalidArgument("--n is required for index lists".into())
            })?;
            Ok(FeatureSubset::new(ix, n)?)
        }
    }
}

fn recovery_cmd(a: RecoveryArgs) -> Result<Outcome> {
    let selected = parse_subset(&a.selected)?;
    let truth = parse_subset(&a.truth)?;
    let known_n = a.n.or(match (&selected, &truth) {
        (SubsetSpec::Resolved(s), _) | (_, SubsetSpec::Resolved(s)) => Some(s.n()),
        _ => None,
    });
    let selected = resolve(selected, known_n)?;
    let truth = resolve(truth, known_n)?;
    let report = recovery_report(&selected, &truth)?;
    let inputs: Vec<&Path> = [&a.selected, &a.truth]
        .into_iter()
        .map(Path::new)
        .filter(|p| p.is_file())
        .collect();
    let m = manifest("eval recovery", &inputs, a.out.as_deref());
    let mut value = serde_json::to_value(report)?;
    value["selected"] = json!(selected.indices());
    value["truth"] = json!(truth.indices());
    emit_json(a.out.as_deref(), value, &m)?;
    Ok(Outcome::Success)
}

#[derive(Deserialize)]
struct NamedSubset {
    name: String,
    features: Vec<usize>,
}

#[derive(Deserialize)]
struct SubsetsFile {
    n: usize,
    subsets: Vec<NamedSubset>,
}

fn graph_cmd(a: GraphArgs) -> Result<Outcome> {
    require_inputs(&[&a.subsets])?;
    let file: SubsetsFile = read_json(&a.subsets)?;
    let named = file
        .subsets
        .into_iter()
        .map(|s| Ok((s.name, FeatureSubset::new(s.features, file.n)?)))
        .collect::<Result<Vec<_>>>()?;
    let graph = distance_graph(&named)?;
    let m = manifest("eval graph", &[&a.subsets], a.out.as_deref());
    emit_json(a.out.as_deref(), serde_json::to_value(graph)?, &m)?;
    Ok(Outcome::Success)
}

fn export_cmd(a: ExportArgs) -> Result<Outcome> {
    require_inputs(&[&a.qubo])?;
    let q = QuboInstance::read_from(&a.qubo)?;
    let m = manifest("export", &[&a.qubo], Some(&a.out));
    if a.ising {
        emit_json(Some(&a.out), serde_json::to_value(q.to_ising())?, &m)?;
    } else {
        let format = a.format.unwrap_or_else(|| ExportFormat::from_path(&a.out));
        write_qubo(&q, Some(&a.out), format, &m)?;
    }
    Ok(Outcome::Success)
}
