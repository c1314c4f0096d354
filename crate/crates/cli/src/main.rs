//! `poisonlab` — generate data, poison it, sanitize it, train and score
//! SVMs, and verify the hardness reduction, all from the command line.
//!
//! Exit codes: 0 on success, 1 on errors, 2 when a verification command
//! finds failures.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use poisonlab::attack::{AttackConfig, AttackKind, PoisonBudget};
use poisonlab::dataset::{self, LabeledDataset, ManifoldSpec};
use poisonlab::hardness;
use poisonlab::harness::{self, ExperimentConfig, SuiteSpec};
use poisonlab::sanitize::{self, Defense};
use poisonlab::svm::{self, KernelSpec, SvmModel};

#[derive(Parser)]
#[command(name = "poisonlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic two-class dataset from polynomial manifolds.
    Gen(GenArgs),
    /// Poison a dataset with a label-flip or min-max attack.
    Attack(AttackArgs),
    /// Run one sanitization defense and report what it removed.
    Sanitize(SanitizeArgs),
    /// Train an SVM and store the model as JSON.
    Train(TrainArgs),
    /// Score a stored model on a test set.
    Eval(EvalArgs),
    /// Run a full experiment sweep from a JSON config.
    Run(RunArgs),
    /// Reduce a DIMACS 3-CNF formula to a one-class SVM-with-outliers
    /// instance.
    Reduce(ReduceArgs),
    /// Verify the reduction equivalence on curated or random formulas.
    #[command(name = "verify-lemma1")]
    VerifyLemma1(VerifyArgs),
    /// Empirical ball-occupancy density check.
    #[command(name = "density-check")]
    DensityCheck(DensityArgs),
}

#[derive(Args)]
struct GenArgs {
    /// JSON ManifoldSpec for the positive class (optional; built from the
    /// flags below when absent).
    #[arg(long)]
    pos_spec: Option<PathBuf>,
    /// JSON ManifoldSpec for the negative class.
    #[arg(long)]
    neg_spec: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    ambient_dim: usize,
    /// Polynomial degree (intrinsic-dimension knob).
    #[arg(long, default_value_t = 2)]
    degree: usize,
    #[arg(long, default_value_t = 3)]
    param_dim: usize,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 500)]
    n_per_class: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (.csv or libsvm text).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
    format: FileFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Csv,
    Libsvm,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    kind: AttackKindArg,
    /// Poisoned fraction in (0,1); mutually exclusive with --z.
    #[arg(long, conflicts_with = "z")]
    fraction: Option<f64>,
    /// Absolute poison budget.
    #[arg(long)]
    z: Option<usize>,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    #[arg(long, default_value_t = 0.25)]
    step_size: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Sidecar poison-mask path (defaults to `<out>.mask`).
    #[arg(long)]
    mask_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AttackKindArg {
    LabelFlip,
    MinMax,
}

#[derive(Args)]
struct SanitizeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    defense: DefenseArg,
    /// Removal budget (the assumed attacker budget).
    #[arg(long)]
    z: usize,
    #[arg(long, default_value_t = sanitize::DEFAULT_MIN_PTS)]
    min_pts: usize,
    #[arg(long, default_value_t = sanitize::DEFAULT_KNN_K)]
    k: usize,
    #[arg(long, value_enum, default_value_t = KernelArg::Linear)]
    kernel: KernelArg,
    #[arg(long)]
    gamma: Option<f64>,
    /// Poison mask for F1 scoring (optional).
    #[arg(long)]
    mask: Option<PathBuf>,
    /// CSV of removed indices.
    #[arg(long)]
    out_removed: PathBuf,
    /// Cleaned dataset (optional).
    #[arg(long)]
    out_data: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DefenseArg {
    Dbscan,
    L2,
    Slab,
    Loss,
    Knn,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Linear,
    Rbf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = KernelArg::Linear)]
    kernel: KernelArg,
    /// RBF gamma; median heuristic when omitted.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0, conflicts_with = "hard_margin")]
    c: f64,
    #[arg(long)]
    hard_margin: bool,
    #[arg(long, default_value_t = svm::DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// The dataset the model was trained on (support indices refer to it).
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment JSON config.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReduceArgs {
    /// DIMACS CNF file (clauses padded to 3 literals by repetition).
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Coordinate CSV output.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    max_l: usize,
    #[arg(long, default_value_t = 6)]
    max_m: usize,
    /// Use `count` random formulas instead of the curated suite.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    m: usize,
    /// Interiority margin for center eligibility.
    #[arg(long)]
    margin: f64,
    #[arg(long, default_value_t = 500)]
    balls: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn load_dataset(path: &PathBuf) -> Result<LabeledDataset> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let data = if is_csv {
        dataset::load_csv(path)?
    } else {
        dataset::load_libsvm(path)?
    };
    Ok(data)
}

fn resolve_kernel(
    kernel: KernelArg,
    gamma: Option<f64>,
    data: &LabeledDataset,
) -> Result<KernelSpec> {
    Ok(match kernel {
        KernelArg::Linear => KernelSpec::Linear,
        KernelArg::Rbf => match gamma {
            Some(g) => KernelSpec::rbf(g)?,
            None => KernelSpec::rbf(svm::median_heuristic_gamma(data))?,
        },
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run_cli() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run_cli() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen(args) => {
            let load_spec = |path: &Option<PathBuf>, fallback_seed: u64| -> Result<ManifoldSpec> {
                match path {
                    Some(p) => {
                        let text = std::fs::read_to_string(p)
                            .with_context(|| format!("reading spec {}", p.display()))?;
                        Ok(serde_json::from_str(&text)?)
                    }
                    None => Ok(ManifoldSpec {
                        ambient_dim: args.ambient_dim,
                        intrinsic_degree: args.degree,
                        param_dim: args.param_dim,
                        coeff_seed: fallback_seed,
                        noise_sigma: args.noise,
                    }),
                }
            };
            let pos = load_spec(&args.pos_spec, args.seed.wrapping_add(1))?;
            let neg = load_spec(&args.neg_spec, args.seed.wrapping_add(2))?;
            let data = dataset::generate_synthetic(&pos, &neg, args.n_per_class, args.seed)?;
            match args.format {
                FileFormat::Csv => dataset::save_csv(&data, &args.out)?,
                FileFormat::Libsvm => dataset::save_libsvm(&data, &args.out)?,
            }
            println!(
                "wrote {} points of dimension {} to {}",
                data.n(),
                data.dim(),
                args.out.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Attack(args) => {
            let data = load_dataset(&args.input)?;
            let budget = match (args.fraction, args.z) {
                (Some(f), None) => PoisonBudget::Fraction(f),
                (None, Some(z)) => PoisonBudget::Count(z),
                (None, None) => bail!("one of --fraction or --z is required"),
                (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
            };
            let config = AttackConfig {
                kind: match args.kind {
                    AttackKindArg::LabelFlip => AttackKind::LabelFlip,
                    AttackKindArg::MinMax => AttackKind::MinMax,
                },
                budget,
                steps: args.steps,
                step_size: args.step_size,
                seed: args.seed,
            };
            let poisoned = poisonlab::attack::run_attack(&data, &config)?;
            let is_csv = args
                .out
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
            if is_csv {
                dataset::save_csv(&poisoned, &args.out)?;
            } else {
                dataset::save_libsvm(&poisoned, &args.out)?;
            }
            let mask_path = args.mask_out.unwrap_or_else(|| {
                let mut p = args.out.clone();
                p.set_extension("mask");
                p
            });
            let mask = poisoned.poison_mask().expect("attacks set the mask");
            dataset::save_mask(mask, &mask_path)?;
            println!(
                "poisoned {} of {} points; wrote {} and {}",
                mask.iter().filter(|&&m| m).count(),
                poisoned.n(),
                args.out.display(),
                mask_path.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Sanitize(args) => {
            let data = load_dataset(&args.input)?;
            let kernel = resolve_kernel(args.kernel, args.gamma, &data)?;
            let defense = match args.defense {
                DefenseArg::Dbscan => Defense::Dbscan {
                    min_pts: args.min_pts,
                },
                DefenseArg::L2 => Defense::L2,
                DefenseArg::Slab => Defense::Slab,
                DefenseArg::Loss => Defense::Loss,
                DefenseArg::Knn => Defense::Knn { k: args.k },
            };
            let result = sanitize::apply(&data, &defense, args.z, &kernel)?;
            result.save_removed_csv(&args.out_removed)?;
            if let Some(out_data) = &args.out_data {
                dataset::save_csv(&result.kept_dataset(&data)?, out_data)?;
            }
            println!(
                "{}: removed {} of {} points{}",
                result.defense_name,
                result.removed.len(),
                data.n(),
                result
                    .tuned_radius
                    .map(|r| format!(", tuned radius {r:.6}"))
                    .unwrap_or_default()
            );
            if let Some(mask_path) = &args.mask {
                let mask = dataset::load_mask(mask_path)?;
                if mask.len() != data.n() {
                    bail!("mask has {} entries for {} points", mask.len(), data.n());
                }
                let score = sanitize::f1(&result, &mask);
                println!(
                    "precision {:.4}, recall {:.4}, f1 {:.4}",
                    score.precision, score.recall, score.f1
                );
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Train(args) => {
            let data = load_dataset(&args.input)?;
            let kernel = resolve_kernel(args.kernel, args.gamma, &data)?;
            let c = if args.hard_margin {
                svm::HARD_MARGIN_C
            } else {
                args.c
            };
            let model = svm::train(&data, &kernel, c, args.tol)?;
            std::fs::write(&args.out, model.to_json()?)
                .with_context(|| format!("writing {}", args.out.display()))?;
            println!(
                "trained on {} points: {} support vectors, margin width {:.6}",
                data.n(),
                model.support_indices.len(),
                model.margin_width
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Eval(args) => {
            let model_json = std::fs::read_to_string(&args.model)
                .with_context(|| format!("reading {}", args.model.display()))?;
            let model = SvmModel::from_json(&model_json)?;
            let train = load_dataset(&args.train)?;
            let test = load_dataset(&args.test)?;
            let acc = svm::accuracy(&model, &train, &test)?;
            println!("accuracy {:.4} on {} test points", acc, test.n());
            Ok(ExitCode::SUCCESS)
        }

        Command::Run(args) => {
            let mut config = ExperimentConfig::load(&args.config)?;
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            std::fs::create_dir_all(&args.out_dir)
                .with_context(|| format!("creating {}", args.out_dir.display()))?;
            let report = harness::run(&config)?;
            let csv_path = args.out_dir.join("report.csv");
            let svg_path = args.out_dir.join("accuracy.svg");
            harness::emit_csv(&report, &csv_path)?;
            harness::emit_svg(&report, &svg_path)?;
            println!(
                "{} rows ({} errors); wrote {} and {}",
                report.rows.len(),
                report.errors.len(),
                csv_path.display(),
                svg_path.display()
            );
            for err in &report.errors {
                eprintln!(
                    "row error: defense={} fraction={} trial={}: {}",
                    err.defense, err.fraction, err.trial, err.message
                );
            }
            for agg in report.aggregate() {
                println!(
                    "{:>8} f={:<6} acc {:.4} +- {:.4}  f1 {:.4} +- {:.4}  ({} trials)",
                    agg.defense,
                    agg.fraction,
                    agg.mean_accuracy,
                    agg.std_accuracy,
                    agg.mean_f1,
                    agg.std_f1,
                    agg.trials
                );
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Reduce(args) => {
            let sat = hardness::load_dimacs(&args.cnf)?;
            let reduction = hardness::reduce(&sat, args.alpha)?;
            reduction.save_points_csv(&args.out)?;
            println!(
                "reduced l={} m={} to {} points in R^{}, outlier budget z={}",
                sat.num_vars(),
                sat.clauses().len(),
                reduction.points.len(),
                reduction.dim(),
                reduction.z
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::VerifyLemma1(args) => {
            let suite = match args.random {
                Some(count) => SuiteSpec::Random {
                    count,
                    seed: args.seed,
                },
                None => SuiteSpec::Curated,
            };
            let report = harness::verify_lemma1(args.max_l, args.max_m, &suite)?;
            print!("{}", report.render());
            if report.all_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }

        Command::DensityCheck(args) => {
            let data = load_dataset(&args.input)?;
            let report = dataset::density_check(
                &data,
                args.delta,
                args.m,
                args.margin,
                args.balls,
                args.seed,
            )?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}
