use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use stiknn::bench::{self, BenchConfig};
use stiknn::core::analysis::{class_block_summary, display_order, efficiency_report, mislabel_scores};
use stiknn::core::oracle::{sti_exact_matrix, HARD_CAP};
use stiknn::core::{loo_values, Dataset, InteractionMatrix, KnnConfig, LabelInterner, Metric, Role, StiPlan};
use stiknn::dataset_csv::{read_csv_with, write_csv};
use stiknn::datagen;
use stiknn::matrix_io::{write_heatmap, write_matrix_csv};
use stiknn::openml;
use stiknn::parallel::{assemble_in, k_sweep_parallel, pool};
use stiknn::verify::{self, VerifyConfig};
use stiknn::{Error, Result};

const SLOPE_N: (f64, f64) = (1.7, 2.3);
const SLOPE_T: (f64, f64) = (0.7, 1.3);

/// Exact pairwise interaction values for KNN classifiers
#[derive(Parser)]
#[command(name = "stiknn", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Original,
    /// Sorted by class, then by feature values
    Display,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Circles,
    Moons,
    Random,
}

#[derive(clap::Args)]
struct Inputs {
    /// Training set CSV (features..., label)
    #[arg(long)]
    train: PathBuf,
    /// Test set CSV
    #[arg(long)]
    test: PathBuf,
    /// euclidean, manhattan or chebyshev
    #[arg(long, default_value = "euclidean", value_parser = parse_metric)]
    metric: Metric,
}

#[derive(Subcommand)]
enum Command {
    /// Interaction matrix via the fast recursion
    Compute {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        k: usize,
        /// Matrix CSV output
        #[arg(long)]
        out: PathBuf,
        /// Optional PPM heatmap output
        #[arg(long)]
        heatmap: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "original")]
        order: Order,
        /// Worker threads (0 = all cores)
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Interaction matrix by subset enumeration
    Oracle {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        /// Largest training size accepted
        #[arg(long, default_value_t = 15)]
        cap: usize,
    },
    /// Compare the recursion against the oracle on random instances
    Verify {
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Perturb every computed matrix (negative control)
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Correlation and spread of matrices across k
    Ksweep {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 3)]
        k_min: usize,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
        /// Correlation matrix CSV output
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Leave-one-out values
    Loo {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        k: usize,
        /// CSV output (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Efficiency check, class blocks and mislabel candidates
    Analyze {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        k: usize,
        /// Number of most suspicious points to list
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// Per-point mislabel scores CSV
        #[arg(long)]
        scores_out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Generate a synthetic dataset
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Points per class (total points for `random`)
        #[arg(long)]
        n: usize,
        /// Inner radius ratio for circles
        #[arg(long, default_value_t = datagen::DEFAULT_FACTOR)]
        factor: f64,
        /// Gaussian noise standard deviation
        #[arg(long, default_value_t = datagen::DEFAULT_NOISE)]
        noise: f64,
        /// Number of classes for `random`
        #[arg(long, default_value_t = 2)]
        classes: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fraction of labels to flip
        #[arg(long)]
        flip: Option<f64>,
        /// Class to shrink, used with --keep
        #[arg(long, requires = "keep")]
        shrink_class: Option<String>,
        /// Fraction of --shrink-class members to keep
        #[arg(long, requires = "shrink_class")]
        keep: Option<f64>,
        /// Fraction held out as a test set, written to --test-out
        #[arg(long, requires = "test_out")]
        split: Option<f64>,
        #[arg(long, requires = "split")]
        test_out: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Download an OpenML dataset into the local cache
    Fetch {
        #[arg(long)]
        id: u32,
        /// Cache root (default: $STI_CACHE_DIR or the user cache directory)
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Also copy the dataset CSV here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the recursion over growing n and t and fit log-log slopes
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000")]
        ns: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
        ts: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        t_fixed: usize,
        #[arg(long, default_value_t = 500)]
        n_fixed: usize,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Timings CSV output
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit 1 unless both slopes fall in their expected ranges
        #[arg(long)]
        check: bool,
    },
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    Metric::from_name(s).ok_or_else(|| format!("unknown metric {s:?}"))
}

fn load(inputs: &Inputs) -> Result<(Dataset, Dataset)> {
    let mut labels = LabelInterner::new();
    let train = read_csv_with(&inputs.train, &mut labels, Role::Train)?;
    let test = read_csv_with(&inputs.test, &mut labels, Role::Test)?;
    // the test file may have introduced labels unseen in training
    let train = Dataset::new(train.points().to_vec(), labels.names().to_vec(), Role::Train)?;
    Ok((train, test))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// `Ok(true)` on success, `Ok(false)` on a verification failure.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Compute { inputs, k, out, heatmap, order, threads } => {
            let (train, test) = load(&inputs)?;
            let config = KnnConfig::new(k).with_metric(inputs.metric);
            let start = Instant::now();
            let plan = StiPlan::new(&train, &test, &config)?;
            let matrix = assemble_in(&pool(threads)?, &plan)?;
            let elapsed = start.elapsed().as_secs_f64();
            let eff = efficiency_report(&matrix, &train, &test, &config)?;
            let shown = match order {
                Order::Original => matrix,
                Order::Display => matrix.permuted(&display_order(&train))?,
            };
            write_matrix_csv(&shown, &out)?;
            if let Some(path) = heatmap {
                write_heatmap(&shown, path)?;
            }
            println!("n = {}, t = {}, k = {k}, metric = {}", train.len(), test.len(), inputs.metric.name());
            print_efficiency(&eff);
            println!("runtime_s = {elapsed:.6}");
            Ok(true)
        }
        Command::Oracle { inputs, k, out, cap } => {
            if cap > HARD_CAP {
                return Err(Error::Invalid(format!("cap {cap} exceeds the hard limit {HARD_CAP}")));
            }
            let (train, test) = load(&inputs)?;
            if train.len() > cap {
                return Err(stiknn::core::Error::OracleCapExceeded { n: train.len(), cap }.into());
            }
            let config = KnnConfig::new(k).with_metric(inputs.metric);
            let start = Instant::now();
            let matrix = sti_exact_matrix(&train, &test, &config)?;
            let elapsed = start.elapsed().as_secs_f64();
            write_matrix_csv(&matrix, &out)?;
            print_efficiency(&efficiency_report(&matrix, &train, &test, &config)?);
            println!("runtime_s = {elapsed:.6}");
            Ok(true)
        }
        Command::Verify { n_max, trials, seed, threads, inject_fault } => {
            let cfg = VerifyConfig { n_max, trials, seed, threads };
            let report = if inject_fault {
                let pool = pool(threads)?;
                verify::run_with(&cfg, |train, test, knn| {
                    let m = assemble_in(&pool, &StiPlan::new(train, test, knn)?)?;
                    let mut values = m.values().to_vec();
                    values[0] += 1e-6;
                    Ok(InteractionMatrix::from_values(m.n(), values, *m.meta())?)
                })?
            } else {
                verify::run(&cfg)?
            };
            println!("instances = {}", report.instances);
            println!("max_abs_diff = {:e}", report.worst);
            println!("max_efficiency_residual = {:e}", report.worst_efficiency);
            if let Some(c) = report.worst_case {
                println!(
                    "worst_case: n = {}, k = {}, t = {}, classes = {}, trial = {}, seed = {}",
                    c.n, c.k, c.t, c.classes, c.trial, c.seed
                );
            }
            let ok = report.passed();
            println!("{} (tolerance {:e})", if ok { "PASS" } else { "FAIL" }, verify::TOLERANCE);
            Ok(ok)
        }
        Command::Ksweep { inputs, k_min, k_max, out, threads } => {
            if k_min == 0 || k_min > k_max {
                return Err(Error::Invalid(format!("bad k range {k_min}..={k_max}")));
            }
            let (train, test) = load(&inputs)?;
            let ks: Vec<usize> = (k_min..=k_max).collect();
            let start = Instant::now();
            let (sweep, _) = k_sweep_parallel(&train, &test, &ks, inputs.metric, threads)?;
            let elapsed = start.elapsed().as_secs_f64();
            println!("k,std");
            for (k, s) in sweep.ks.iter().zip(&sweep.stds) {
                println!("{k},{s:.6e}");
            }
            println!("min_correlation = {:.6}", sweep.min_correlation());
            println!("runtime_s = {elapsed:.6}");
            if let Some(path) = out {
                let mut text = String::from("k");
                for k in &sweep.ks {
                    text.push_str(&format!(",{k}"));
                }
                text.push('\n');
                for (a, k) in sweep.ks.iter().enumerate() {
                    text.push_str(&k.to_string());
                    for b in 0..sweep.ks.len() {
                        text.push_str(&format!(",{:.10}", sweep.correlation(a, b)));
                    }
                    text.push('\n');
                }
                write_text(&path, &text)?;
            }
            Ok(true)
        }
        Command::Loo { inputs, k, out } => {
            let (train, test) = load(&inputs)?;
            let values = loo_values(&train, &test, &KnnConfig::new(k).with_metric(inputs.metric))?;
            let mut text = String::from("index,loo\n");
            for (i, v) in values.iter().enumerate() {
                text.push_str(&format!("{i},{v:.16e}\n"));
            }
            match out {
                Some(path) => write_text(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Analyze { inputs, k, top, scores_out, threads } => {
            let (train, test) = load(&inputs)?;
            let config = KnnConfig::new(k).with_metric(inputs.metric);
            let plan = StiPlan::new(&train, &test, &config)?;
            let matrix = assemble_in(&pool(threads)?, &plan)?;
            print_efficiency(&efficiency_report(&matrix, &train, &test, &config)?);
            let labels = train.labels();
            println!("row_class,col_class,count,mean,mean_abs");
            for b in class_block_summary(&matrix, &labels)? {
                println!(
                    "{},{},{},{:.6e},{:.6e}",
                    train.label_name(b.row_class),
                    train.label_name(b.col_class),
                    b.count,
                    b.mean,
                    b.mean_abs
                );
            }
            if train.classes().len() > 1 {
                let scores = mislabel_scores(&matrix, &labels)?;
                let mut ranked: Vec<(usize, f64)> =
                    scores.iter().enumerate().filter_map(|(i, s)| s.map(|s| (i, s))).collect();
                ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                println!("most suspicious (index,label,score):");
                for &(i, s) in ranked.iter().take(top) {
                    println!("{i},{},{s:.6}", train.label_name(train.label(i)));
                }
                if let Some(path) = scores_out {
                    let mut text = String::from("index,label,score\n");
                    for (i, s) in scores.iter().enumerate() {
                        let s = s.map(|s| format!("{s:.16e}")).unwrap_or_default();
                        text.push_str(&format!("{i},{},{s}\n", train.label_name(train.label(i))));
                    }
                    write_text(&path, &text)?;
                }
            }
            Ok(true)
        }
        Command::Gen { kind, n, factor, noise, classes, seed, flip, shrink_class, keep, split, test_out, out } => {
            let mut data = match kind {
                Kind::Circles => datagen::make_circles(n, factor, noise, seed)?,
                Kind::Moons => datagen::make_moons(n, noise, seed)?,
                Kind::Random => datagen::random_instance(n, classes, seed)?,
            };
            if let (Some(name), Some(keep)) = (shrink_class, keep) {
                let class = data
                    .label_names()
                    .iter()
                    .position(|l| *l == name)
                    .ok_or_else(|| Error::Invalid(format!("unknown class {name:?}")))?;
                data = datagen::subsample_class(&data, stiknn::core::LabelId(class as u32), keep, seed)?;
            }
            if let Some(fraction) = flip {
                let (noisy, flipped) = datagen::inject_label_noise(&data, fraction, seed)?;
                println!("flipped = {}", flipped.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" "));
                data = noisy;
            }
            if let (Some(fraction), Some(test_path)) = (split, test_out) {
                let (train, test) = datagen::train_test_split(&data, fraction, seed)?;
                write_csv(&test, &test_path)?;
                data = train;
            }
            write_csv(&data, &out)?;
            Ok(true)
        }
        Command::Fetch { id, cache_dir, out } => {
            let cache = cache_dir.unwrap_or_else(openml::default_cache_dir);
            let data = openml::fetch_openml(id, &cache)?;
            println!(
                "dataset {id}: {} points, {} features, {} classes",
                data.len(),
                data.dim(),
                data.label_names().len()
            );
            println!("cached at {}", openml::cache_path(&cache, id).display());
            if let Some(path) = out {
                write_csv(&data, &path)?;
            }
            Ok(true)
        }
        Command::Bench { ns, ts, t_fixed, n_fixed, k, reps, threads, seed, out, check } => {
            let cfg = BenchConfig { ns, ts, t_fixed, n_fixed, k, reps, threads, seed };
            let report = bench::run(&cfg)?;
            let csv = report.to_csv();
            match out {
                Some(path) => write_text(&path, &csv)?,
                None => print!("{csv}"),
            }
            println!("slope_n = {:.4}", report.slope_n);
            println!("slope_t = {:.4}", report.slope_t);
            let in_range = |x: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&x);
            Ok(!check || (in_range(report.slope_n, SLOPE_N) && in_range(report.slope_t, SLOPE_T)))
        }
    }
}

fn print_efficiency(eff: &stiknn::core::analysis::EfficiencyReport) {
    println!("pair_sum = {:.16e}", eff.pair_sum);
    println!("v(N) = {:.16e}", eff.v_of_n);
    println!("residual = {:.3e}", eff.residual);
    println!("mean = {:.6e}", eff.mean);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
