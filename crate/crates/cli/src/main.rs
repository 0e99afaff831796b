use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hrvae_core::analysis::{ClusterReport, Marker};
use hrvae_core::pipeline::{self, config, SynthRequest};
use hrvae_core::Error;

#[derive(Parser)]
#[command(name = "hrvae", version, about = "Unsupervised stress detection from RR-interval recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic cohort (one .rri file per subject plus labels.csv).
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20, value_parser = positive)]
        subjects: usize,
        #[arg(long, default_value_t = 0.9)]
        stressed_frac: f64,
        /// Beats per subject.
        #[arg(long, default_value_t = 1800, value_parser = positive)]
        beats: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run the full pipeline on a cohort directory.
    Run {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Extract HRV features of every window into a CSV file.
    Features {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Encode every window of a cohort with a trained checkpoint.
    Encode {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Recompute and print the marker report of a finished run.
    Report {
        /// Run directory (`<out>/seed-<seed>`).
        #[arg(long)]
        run: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        significance: f64,
    },
}

#[derive(Args, Default)]
struct RunOpts {
    /// Config file: `key = value` lines or a flat JSON object.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// cae, lae or both.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    epochs: Option<usize>,
    /// per_window or global.
    #[arg(long)]
    scaling: Option<String>,
    /// stable, knee or a fixed positive value.
    #[arg(long)]
    eps: Option<String>,
    /// Any other config key, e.g. `--set knn_k=7`.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = key_value)]
    set: Vec<(String, String)>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn key_value(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or("expected KEY=VALUE")?;
    if !config::CONFIG_KEYS.contains(&k.trim()) {
        return Err(format!("unknown key `{k}`"));
    }
    Ok((k.trim().to_string(), v.trim().to_string()))
}

impl RunOpts {
    fn resolve(&self, extra: &[(&str, String)]) -> Result<config::ResolvedConfig, Error> {
        let mut overrides: Vec<(String, String)> = self.set.clone();
        let flags = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("model", self.model.clone()),
            ("epochs", self.epochs.map(|v| v.to_string())),
            ("scaling", self.scaling.clone()),
            ("eps", self.eps.clone()),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                overrides.push((k.to_string(), v));
            }
        }
        overrides.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
        config::resolve(self.config.as_deref(), &overrides)
    }
}

fn print_report(label: &str, r: &ClusterReport) {
    println!(
        "{label}: {} windows, clusters {:?} ({:.1}% / {:.1}%), noise {:.1}%",
        r.n_windows,
        r.cluster_sizes,
        100.0 * r.cluster_fractions[0],
        100.0 * r.cluster_fractions[1],
        100.0 * r.noise_fraction
    );
    for m in Marker::ALL {
        if let Some(c) = r.marker(m) {
            let p = c.test.map_or("n/a".to_string(), |t| format!("{:.3e}", t.p));
            println!(
                "  {:<8} {:>10.3} {:>10.3}  p={p}",
                m.name(),
                c.clusters[0].mean,
                c.clusters[1].mean
            );
        }
    }
    println!("  assignment: 0={} 1={}", r.assignment[0], r.assignment[1]);
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Synth {
            out,
            subjects,
            stressed_frac,
            beats,
            seed,
        } => {
            let cohort = pipeline::cmd_synth(&SynthRequest {
                out: out.clone(),
                subjects,
                stressed_frac,
                beats,
                seed,
            })?;
            println!("wrote {} subjects to {}", cohort.len(), out.display());
        }
        Command::Run { input, out, opts } => {
            let resolved = opts.resolve(&[
                ("input", input.display().to_string()),
                ("out", out.display().to_string()),
            ])?;
            let outcome = pipeline::cmd_run(&resolved)?;
            println!("run directory: {}", outcome.run_dir.display());
            for m in &outcome.report.models {
                print_report(&format!("{} validation", m.model), &m.validation);
                if let Some(t) = &m.test {
                    print_report(&format!("{} test", m.model), t);
                }
            }
        }
        Command::Features {
            input,
            output,
            opts,
        } => {
            let resolved = opts.resolve(&[])?;
            let n = pipeline::cmd_features(&input, &output, &resolved.config)?;
            println!("wrote {n} feature rows to {}", output.display());
        }
        Command::Encode {
            checkpoint,
            input,
            output,
            opts,
        } => {
            let resolved = opts.resolve(&[])?;
            let n = pipeline::cmd_encode(&checkpoint, &input, &output, &resolved.config)?;
            println!("wrote {n} latent rows to {}", output.display());
        }
        Command::Report { run, significance } => {
            for r in pipeline::cmd_report(&run, significance)? {
                print_report(&format!("{} validation", r.model), &r.validation);
                if let Some(t) = &r.test {
                    print_report(&format!("{} test", r.model), t);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
