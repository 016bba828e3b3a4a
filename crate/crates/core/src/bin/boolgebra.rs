use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use boolgebra::aig::{check_equivalence, read_aiger_file, write_aiger_file, EquivalenceMode, Verdict};
use boolgebra::dataset::{load_dataset, write_dataset};
use boolgebra::features::{dynamic_features, edge_list, edges_to_text, features_to_csv, static_features, DynamicFeatures, GraphSample};
use boolgebra::flow::{compare_baselines, run_flow, FlowConfig, FlowReport};
use boolgebra::predictor::{load_model, save_model, spearman, train, Lineage, Model, ModelConfig, TrainConfig};
use boolgebra::sampling::{build_dataset, normalize_labels, SamplerConfig, StrategyMix};
use boolgebra::transforms::{orchestrated_traversal, standalone_pass, AppliedOp, DecisionVector, OpCode, TransformOptions};
use boolgebra::{Aig, Error};

#[derive(Parser)]
#[command(name = "boolgebra", version, about = "AIG minimization by orchestrated rewrite, resub and refactor")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct TransformArgs {
    /// Accept zero-gain rewrites.
    #[arg(long)]
    rw_zero: bool,
    /// Accept zero-gain refactors that lower depth.
    #[arg(long)]
    rf_depth: bool,
    /// Reject rewrites that increase depth.
    #[arg(long)]
    preserve_depth: bool,
}

impl TransformArgs {
    fn options(&self) -> TransformOptions {
        TransformOptions {
            rw_zero: self.rw_zero,
            rf_depth: self.rf_depth,
            rw_preserve_depth: self.preserve_depth,
            ..TransformOptions::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Paper,
    Reduced,
    Tiny,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print size, depth and the standalone pass results.
    Stats {
        aig: PathBuf,
        #[command(flatten)]
        t: TransformArgs,
    },
    /// Run one traversal, either a standalone pass or a decision vector.
    Opt {
        aig: PathBuf,
        #[arg(long, conflicts_with = "decisions", required_unless_present = "decisions")]
        op: Option<OpCode>,
        /// Decision vector CSV, one code (0 rw, 1 rs, 2 rf) per node.
        #[arg(long)]
        decisions: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Write the per-node applied-op record here.
        #[arg(long)]
        record: Option<PathBuf>,
        #[command(flatten)]
        t: TransformArgs,
    },
    /// Draw and evaluate decision vectors, writing a training dataset.
    Sample {
        aig: PathBuf,
        #[arg(long, default_value_t = 600)]
        count: usize,
        #[arg(long, default_value = "mixed")]
        strategy: StrategyMix,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Fixed guided-sampling fraction instead of a per-sample draw.
        #[arg(long)]
        fraction: Option<f64>,
        #[arg(long, default_value = "dataset")]
        out: PathBuf,
        /// Design name used in the manifest; defaults to the file stem.
        #[arg(long)]
        design: Option<String>,
        #[arg(long)]
        directed: bool,
        /// Check each result for equivalence with the input.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        t: TransformArgs,
    },
    /// Write node features and the edge list of a design.
    Features {
        aig: PathBuf,
        /// Decision vector CSV whose traversal fills the dynamic columns.
        #[arg(long)]
        sample: Option<PathBuf>,
        #[arg(long, default_value = "features.csv")]
        out: PathBuf,
        #[arg(long, default_value = "edges.txt")]
        edges: PathBuf,
        #[arg(long)]
        directed: bool,
        #[command(flatten)]
        t: TransformArgs,
    },
    /// Train the predictor on one or more dataset manifests.
    Train {
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "reduced")]
        profile: Profile,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        batch: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long, default_value = "model.bin")]
        out: PathBuf,
        /// Per-epoch loss CSV.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Score the samples of dataset manifests with a trained model.
    Predict {
        model: PathBuf,
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Sample, prune with the model, evaluate the best candidates and
    /// compare against the standalone passes.
    Flow {
        #[arg(required = true)]
        aigs: Vec<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        /// key = value settings, overridden by flags.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        strategy: Option<StrategyMix>,
        #[arg(long)]
        no_verify: bool,
        #[arg(long)]
        directed: bool,
        /// Record wall time in the report.
        #[arg(long)]
        timing: bool,
        #[arg(short, long, default_value = "report.csv")]
        out: PathBuf,
        /// Write each design's best result into this directory.
        #[arg(long)]
        save_best: Option<PathBuf>,
        #[command(flatten)]
        t: TransformArgs,
    },
    /// Check two designs for functional equivalence.
    Verify {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        #[arg(long, default_value_t = 157)]
        words: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

enum Failure {
    Lib(Error),
    NotEquivalent(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Latches(_) | Error::Model(_) | Error::Json(_) => 3,
        Error::Equivalence(_) => 4,
        Error::Config(_) | Error::Shape(_) | Error::StalePlan { .. } => 5,
        Error::Io(_) => 6,
        _ => 1,
    }
}

fn design_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "design".into(), |s| s.to_string_lossy().into_owned())
}

fn read_decisions(path: &Path, aig: &Aig) -> Result<DecisionVector, Failure> {
    let d = DecisionVector::from_csv(&fs::read_to_string(path)?)?;
    if d.len() != DecisionVector::len_for(aig) {
        return Err(Error::Config(format!("{}: {} entries, design needs {}", path.display(), d.len(), DecisionVector::len_for(aig))).into());
    }
    Ok(d)
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Stats { aig, t } => {
            let g = read_aiger_file(&aig)?;
            let s = g.stats();
            let b = compare_baselines(&g, &t.options())?;
            println!("{}: {} inputs, {} outputs, {} and nodes, depth {}", aig.display(), s.n_pis, s.n_pos, s.size, s.depth);
            println!("standalone: rw {} rs {} rf {}", b.rw, b.rs, b.rf);
        }
        Cmd::Opt { aig, op, decisions, out, record, t } => {
            let g = read_aiger_file(&aig)?;
            let (h, rec) = match (op, decisions) {
                (Some(op), _) => standalone_pass(&g, op, &t.options())?,
                (None, Some(path)) => orchestrated_traversal(&g, &read_decisions(&path, &g)?, &t.options())?,
                (None, None) => unreachable!("clap requires one of --op and --decisions"),
            };
            if let Some(path) = &out {
                write_aiger_file(&h, path)?;
            }
            if let Some(path) = &record {
                fs::write(path, rec.to_csv())?;
            }
            let count = |o: AppliedOp| rec.ops.iter().filter(|&&x| x == o).count();
            println!(
                "{}: {} -> {} and nodes (rw {}, rs {}, rf {} applied)",
                aig.display(),
                rec.original_size,
                rec.final_size,
                count(AppliedOp::Rw),
                count(AppliedOp::Rs),
                count(AppliedOp::Rf)
            );
        }
        Cmd::Sample { aig, count, strategy, seed, fraction, out, design, directed, verify, t } => {
            let g = read_aiger_file(&aig)?;
            let name = design.unwrap_or_else(|| design_name(&aig));
            let opts = t.options();
            let cfg = SamplerConfig { mix: strategy, fraction, seed, count, verify, ..SamplerConfig::default() };
            let stat = static_features(&g, &opts)?;
            let mut records = build_dataset(&g, &name, &stat, &cfg, &opts)?;
            normalize_labels(&mut records);
            let manifest = write_dataset(&out, &g, &stat, &records, seed, directed)?;
            let best = records.iter().map(|r| r.reduction).max().unwrap_or(0);
            let mean = records.iter().map(|r| r.reduction as f64).sum::<f64>() / records.len().max(1) as f64;
            println!(
                "{name}: {} samples, reduction best {best} mean {mean:.2} of {} nodes; manifest {}",
                records.len(),
                g.size(),
                manifest.display()
            );
        }
        Cmd::Features { aig, sample, out, edges, directed, t } => {
            let g = read_aiger_file(&aig)?;
            let opts = t.options();
            let stat = static_features(&g, &opts)?;
            let dynamic = match &sample {
                Some(path) => {
                    let (_, rec) = orchestrated_traversal(&g, &read_decisions(path, &g)?, &opts)?;
                    dynamic_features(&g, &rec)?
                }
                None => DynamicFeatures::untouched(&g, &stat.nodes),
            };
            let list = edge_list(&g, &stat.nodes, directed);
            let s = GraphSample::new(list, &stat, &dynamic)?;
            fs::write(&out, features_to_csv(&s.nodes, &s.features))?;
            fs::write(&edges, edges_to_text(&s.nodes, &s.edges))?;
            println!("{}: {} rows to {}, {} edges to {}", aig.display(), s.num_nodes(), out.display(), s.edges.len(), edges.display());
        }
        Cmd::Train { manifests, profile, epochs, lr, batch, seed, out, curve } => {
            let (_, data) = load_dataset(&manifests)?;
            let (mc, mut tc) = match profile {
                Profile::Paper => (ModelConfig::paper(seed), TrainConfig::paper(seed)),
                Profile::Reduced => (ModelConfig::reduced(seed), TrainConfig::reduced(seed)),
                Profile::Tiny => (ModelConfig::tiny(seed), TrainConfig::reduced(seed)),
            };
            if let Some(e) = epochs {
                tc.epochs = e;
            }
            if let Some(l) = lr {
                tc.lr = l;
            }
            if let Some(b) = batch {
                tc.batch_size = b;
            }
            let mut model = Model::new(mc)?;
            let c = train(&mut model, &data, &tc)?;
            save_model(&model, Lineage { train_seed: seed, epochs: tc.epochs as u64 }, &out)?;
            if let Some(path) = &curve {
                fs::write(path, c.to_csv())?;
            }
            let first = c.epochs.first().expect("at least one epoch");
            let last = c.epochs.last().expect("at least one epoch");
            println!(
                "{} samples, {} parameters; train loss {:.6} -> {:.6}, test loss {:.6} -> {:.6}; model {}",
                data.len(),
                model.num_params(),
                first.train_loss,
                last.train_loss,
                first.test_loss,
                last.test_loss,
                out.display()
            );
        }
        Cmd::Predict { model, manifests, out } => {
            let (model, _) = load_model(&model)?;
            let (entries, data) = load_dataset(&manifests)?;
            let refs: Vec<_> = data.graphs.iter().collect();
            let scores = model.predict(&refs)?;
            let mut csv = String::from("design,index,label,score\n");
            for (e, s) in entries.iter().zip(&scores) {
                csv.push_str(&format!("{},{},{:.9},{:.9}\n", e.design_id, e.index, e.label, s));
            }
            if let Some(path) = &out {
                fs::write(path, &csv)?;
            } else {
                print!("{csv}");
            }
            println!("{} samples, spearman {:.4}", scores.len(), spearman(&scores, &data.labels));
        }
        Cmd::Flow { aigs, model, config, samples, top_k, seed, strategy, no_verify, directed, timing, out, save_best, t } => {
            let mut cfg = FlowConfig { transforms: t.options(), ..FlowConfig::default() };
            if let Some(path) = &config {
                cfg.apply_config_text(&fs::read_to_string(path)?)?;
            }
            if let Some(v) = samples {
                cfg.sample_count = v;
            }
            if let Some(v) = top_k {
                cfg.top_k = v;
            }
            if let Some(v) = seed {
                cfg.sampler.seed = v;
            }
            if let Some(v) = strategy {
                cfg.sampler.mix = v;
            }
            cfg.verify &= !no_verify;
            cfg.directed |= directed;
            cfg.timing |= timing;
            cfg.validate()?;
            let (model, _) = load_model(&model)?;
            let mut report = FlowReport::default();
            for path in &aigs {
                let g = read_aiger_file(path)?;
                let row = run_flow(&g, &design_name(path), &model, &cfg)?;
                if let (Some(dir), Some(best)) = (&save_best, row.best()) {
                    fs::create_dir_all(dir)?;
                    let (h, _) = orchestrated_traversal(&g, &best.decisions, &cfg.transforms)?;
                    write_aiger_file(&h, dir.join(format!("{}.aag", row.design)))?;
                }
                report.rows.push(row);
            }
            fs::write(&out, report.to_csv())?;
            print!("{}", report.summary());
        }
        Cmd::Verify { a, b, mode, words, seed } => {
            let ga = read_aiger_file(&a)?;
            let gb = read_aiger_file(&b)?;
            let m = match mode {
                Mode::Exhaustive => EquivalenceMode::Exhaustive,
                Mode::Random => EquivalenceMode::Random { words, seed },
            };
            match check_equivalence(&ga, &gb, m)? {
                Verdict::Equivalent => println!("equivalent"),
                Verdict::Inconclusive => println!("no difference in {} random patterns", 64 * words),
                Verdict::Counterexample(cex) => {
                    let bits: String = cex.iter().map(|&b| if b { '1' } else { '0' }).collect();
                    return Err(Failure::NotEquivalent(format!("not equivalent; counterexample inputs {bits}")));
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("BOOLGEBRA_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NotEquivalent(msg)) => {
            println!("{msg}");
            ExitCode::from(4)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
