use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kquad::io::{format_float, write_atomic};
use kquad::{KernelFamily, KernelSpec, SelectionRule};
use kquad_cli::config::{parse_rule, ExperimentConfig, Overrides};
use kquad_cli::{experiment, plotdata, uq, Failure};

#[derive(Parser)]
#[command(
    name = "kquad",
    about = "Greedy kernel quadrature: compression, experiments, and plot data",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct KernelArgs {
    /// Kernel family: matern-quadratic or gaussian.
    #[arg(long, default_value = "matern-quadratic")]
    family: String,
    /// Kernel shape parameter.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Fourier-decay metadata tau (optional).
    #[arg(long)]
    tau: Option<f64>,
}

impl KernelArgs {
    fn build(&self, dim: usize) -> Result<KernelSpec, Failure> {
        let family = match self.family.to_ascii_lowercase().as_str() {
            "matern-quadratic" | "maternquadratic" | "matern" => KernelFamily::MaternQuadratic,
            "gaussian" => KernelFamily::Gaussian,
            other => {
                return Err(Failure::config(format!(
                    "unknown kernel family '{other}'"
                )))
            }
        };
        let mut kernel =
            KernelSpec::new(family, self.gamma, dim).map_err(Failure::from_config_err)?;
        if let Some(tau) = self.tau {
            kernel = kernel.with_tau(tau).map_err(Failure::from_config_err)?;
        }
        Ok(kernel)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config file.
    Run {
        /// Path to the config file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for all artifacts.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Override the Monte Carlo sample count.
        #[arg(long = "mc-m")]
        mc_m: Option<usize>,
        #[arg(long = "max-n")]
        max_n: Option<usize>,
        #[arg(long = "residual-tol")]
        residual_tol: Option<f64>,
        #[arg(long = "wce-tol")]
        wce_tol: Option<f64>,
        /// Selection rule: FOverP, F, FOverSqrtK, or P.
        #[arg(long, value_parser = parse_rule)]
        rule: Option<SelectionRule>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Recompute the Newton basis densely and report drift.
        #[arg(long, default_value_t = false)]
        validate: bool,
    },
    /// Compress a discrete functional (CSV) to an n-point rule.
    Compress {
        /// Input functional: x1,...,xd,weight CSV.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Number of points to keep.
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, value_parser = parse_rule, default_value = "FOverP")]
        rule: SelectionRule,
    },
    /// Compress a UQ dataset's mean functional for a list of budgets.
    Uq {
        /// Parameter CSV (t1,t2,t3).
        #[arg(long)]
        params: PathBuf,
        /// Output CSV (c1..cS), row-aligned with the parameters.
        #[arg(long)]
        outputs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated list of budgets, e.g. 25,50,100,200.
        #[arg(long = "n-list", value_delimiter = ',')]
        n_list: Vec<usize>,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, value_parser = parse_rule, default_value = "FOverP")]
        rule: SelectionRule,
    },
    /// Generate a synthetic UQ dataset for testing the pipeline.
    SynthUq {
        #[arg(long)]
        out: PathBuf,
        /// Number of parameter samples.
        #[arg(long, default_value_t = 2000)]
        n: usize,
        /// Number of output cells per sample.
        #[arg(long, default_value_t = 50)]
        cells: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit plot-ready columns from a finished run directory.
    Plotdata {
        /// Directory produced by `run`.
        #[arg(long)]
        run: PathBuf,
        /// Output CSV (defaults to <run>/plot.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            mc_m,
            max_n,
            residual_tol,
            wce_tol,
            rule,
            gamma,
            validate,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            Overrides {
                seed,
                mc_m,
                max_n,
                residual_tol,
                wce_tol,
                rule,
                gamma,
            }
            .apply(&mut cfg);
            let summary = experiment::run_experiment(&cfg, &out)?;
            if validate {
                run_validation(&cfg, &out)?;
            }
            println!(
                "run: n = {}, wce = {:.6e}, status = {:?}, artifacts in {}",
                summary.n,
                summary.wce,
                summary.status,
                out.display()
            );
            Ok(())
        }
        Command::Compress {
            input,
            out,
            n,
            kernel,
            rule,
        } => {
            let functional = kquad::io::read_functional_csv(&input)?;
            let kernel = kernel.build(functional.nodes().dim())?;
            let compressed = kquad::compress(&functional, &kernel, n, rule)?;
            std::fs::create_dir_all(&out).map_err(|e| Failure::io(e.to_string()))?;
            kquad::io::write_rule_csv(&out.join("rule.csv"), &compressed)?;
            kquad::io::write_trace_csv(&out.join("trace.csv"), &compressed)?;
            let summary = serde_json::json!({
                "n": compressed.n(),
                "wce": compressed.wce(),
                "status": compressed.status(),
                "input_nodes": functional.len(),
                "kernel": kernel,
                "rule": rule,
            });
            write_atomic(
                &out.join("summary.json"),
                &(serde_json::to_string_pretty(&summary).unwrap() + "\n"),
            )?;
            println!(
                "compress: {} -> {} nodes, wce = {:.6e}",
                functional.len(),
                compressed.n(),
                compressed.wce()
            );
            Ok(())
        }
        Command::Uq {
            params,
            outputs,
            out,
            n_list,
            kernel,
            rule,
        } => {
            if n_list.is_empty() {
                return Err(Failure::config("--n-list must not be empty"));
            }
            let dataset = uq::load_dataset(&params, &outputs)?;
            let kernel = kernel.build(dataset.params().dim())?;
            std::fs::create_dir_all(&out).map_err(|e| Failure::io(e.to_string()))?;
            let mut rows = String::from("n,e_mu,e_sigma,clamped_cells\n");
            for &n in &n_list {
                let res = uq::uq_compress(&dataset, &kernel, n, rule)?;
                rows.push_str(&format!(
                    "{},{},{},{}\n",
                    res.errors.n,
                    format_float(res.errors.e_mu),
                    format_float(res.errors.e_sigma),
                    res.errors.clamped_cells
                ));
                kquad::io::write_rule_csv(&out.join(format!("rule_n{n}.csv")), &res.rule)?;
                println!(
                    "uq: n = {}, E_mu = {:.6e}, E_sigma = {:.6e}, clamped = {}",
                    res.errors.n, res.errors.e_mu, res.errors.e_sigma, res.errors.clamped_cells
                );
            }
            write_atomic(&out.join("uq_errors.csv"), &rows)?;
            Ok(())
        }
        Command::SynthUq { out, n, cells, seed } => {
            let dataset = uq::synthesize(n, cells, seed)?;
            std::fs::create_dir_all(&out).map_err(|e| Failure::io(e.to_string()))?;
            uq::write_dataset(
                &dataset,
                &out.join("params.csv"),
                &out.join("outputs.csv"),
            )?;
            println!(
                "synth-uq: wrote {} samples x {} cells (seed {}) to {}",
                n,
                cells,
                seed,
                out.display()
            );
            Ok(())
        }
        Command::Plotdata { run, out } => {
            let path = plotdata::emit_plot_data(&run, out.as_deref())?;
            println!("plotdata: wrote {}", path.display());
            Ok(())
        }
    }
}

/// Rebuild the greedy state for the run and report Gram-Schmidt drift.
fn run_validation(cfg: &ExperimentConfig, out: &PathBuf) -> Result<(), Failure> {
    let functional =
        kquad::monte_carlo_functional(&cfg.density, &cfg.domain, cfg.mc_m, cfg.seed)?;
    let candidates = experiment::generate_candidates(cfg)?;
    let rule_out = kquad::run_greedy(&cfg.kernel, &candidates, &functional, cfg.rule, &cfg.term)?;
    let target = functional.representer_values(&cfg.kernel, &candidates)?;
    let hn = functional.hnorm_squared(&cfg.kernel)?;
    let mut state = kquad::GreedyState::init(cfg.kernel, candidates, target, hn)?;
    for idx in rule_out.selected_indices() {
        state.add_point(idx).map_err(Failure::from)?;
    }
    let drift = state.validate_basis()?;
    let report = serde_json::json!({
        "n": state.n(),
        "ortho_dev": drift.ortho_dev,
        "coeff_dev": drift.coeff_dev,
    });
    write_atomic(
        &out.join("validation.json"),
        &(serde_json::to_string_pretty(&report).unwrap() + "\n"),
    )?;
    println!(
        "validate: ortho drift {:.3e}, coefficient drift {:.3e}",
        drift.ortho_dev, drift.coeff_dev
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let record = serde_json::json!({
                "error": failure.message(),
                "exit_code": failure.exit_code(),
            });
            eprintln!("{record}");
            ExitCode::from(failure.exit_code())
        }
    }
}
