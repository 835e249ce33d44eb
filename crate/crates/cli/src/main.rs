//! `errcomp`: batch experiments for gated error compensation.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "errcomp", version, about = "Hybrid battery models with a boundary-gated error compensator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Experiment configuration (TOML); defaults are used for missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed mixed into every random draw of the experiment.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Gate applied to the OCSVM score.
    #[arg(long, value_parser = ["hard", "sigmoid", "literal"])]
    pub gate: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the synthetic plant and write every cycle as CSV.
    GenData(Common),
    /// Grid-search and train the NARX error model on generated data.
    TrainFnn {
        #[command(flatten)]
        common: Common,
        /// Directory written by `gen-data`.
        #[arg(long)]
        data: PathBuf,
    },
    /// Train the OCSVM envelope on the training regressors.
    TrainOcsvm {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: PathBuf,
    },
    /// Build the (current, temperature, soc) hull and rank edge candidates.
    Hull {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: PathBuf,
    },
    /// Free-run one cycle through a hybrid variant.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Directory holding narx.toml, ocsvm.toml and hull.toml.
        #[arg(long)]
        models: PathBuf,
        /// Cycle CSV with columns t,i_a,temp_c,soc,v.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "ecm_ocsvm", value_parser = ["am", "ecm", "ecm_ocsvm", "ecm_hull"])]
        variant: String,
    },
    /// Score every variant on the validation and edge cycles.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Restrict the report to one variant.
        #[arg(long, value_parser = ["am", "ecm", "ecm_ocsvm", "ecm_hull"])]
        variant: Option<String>,
    },
    /// Two-input polynomial study: network vs hull- and OCSVM-gated network.
    PolyExperiment(Common),
    /// Complete battery study: data, training, envelopes, evaluation, plots.
    BatteryExperiment(Common),
    /// Render SVG plots from trace CSVs.
    Plot {
        #[command(flatten)]
        common: Common,
        /// Directory of trace CSVs (`traces/` of a battery run).
        #[arg(long)]
        traces: PathBuf,
        /// Generated data directory; its training cycles form the backdrop.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: kind=usage msg={first}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::GenData(c) => commands::gen_data(&c),
        Command::TrainFnn { common, data } => commands::train_fnn(&common, &data),
        Command::TrainOcsvm { common, data } => commands::train_ocsvm(&common, &data),
        Command::Hull { common, data } => commands::hull(&common, &data),
        Command::Simulate {
            common,
            models,
            input,
            variant,
        } => commands::simulate(&common, &models, &input, &variant),
        Command::Evaluate {
            common,
            models,
            data,
            variant,
        } => commands::evaluate(&common, &models, &data, variant.as_deref()),
        Command::PolyExperiment(c) => commands::poly_experiment(&c),
        Command::BatteryExperiment(c) => commands::battery_experiment(&c),
        Command::Plot { common, traces, data } => commands::plot(&common, &traces, data.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: kind={} msg={msg}", e.kind());
            ExitCode::FAILURE
        }
    }
}
