//! Command-line front end: generate, verify, stats, serve, config.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 format, 5 validation.

use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rpmsim::config::{ConfigError, Mode, SimulationConfig};
use rpmsim::dataset::{self, DatasetError};
use rpmsim::service::{self, Store};
use rpmsim::sim::{inject_messiness, simulate};
use rpmsim::stats::{cohort_stats, CohortStats};
use rpmsim::verify::verify_bundle;

#[derive(Parser)]
#[command(name = "rpmsim", version, about = "Synthetic remote patient monitoring cohorts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a cohort and write it as a bundle into an existing directory.
    Generate {
        #[command(flatten)]
        config: ConfigArgs,
        /// Destination directory; must exist.
        #[arg(long)]
        out: PathBuf,
    },
    /// Import a bundle and check integrity, the alert oracle and round-trip.
    Verify { bundle: PathBuf },
    /// Print cohort statistics for a bundle.
    Stats {
        bundle: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Serve the HTTP API for a bundle or a freshly simulated cohort.
    Serve {
        /// Serve this bundle instead of simulating.
        #[arg(long, conflicts_with_all = ["config", "patients", "hcps", "days", "seed", "mode"])]
        bundle: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
    /// Print the default configuration file.
    Config,
}

/// Flags override the config file, which overrides the defaults.
#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    patients: Option<u32>,
    #[arg(long)]
    hcps: Option<u32>,
    #[arg(long)]
    days: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Batch,
    Interactive,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<SimulationConfig, Failure> {
        let mut config = match &self.config {
            Some(path) => SimulationConfig::from_toml_file(path)?,
            None => SimulationConfig::default(),
        };
        if let Some(n) = self.patients {
            config.n_patients = n;
        }
        if let Some(n) = self.hcps {
            config.n_hcps = n;
        }
        if let Some(n) = self.days {
            config.duration_days = n;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(mode) = self.mode {
            config.mode = match mode {
                ModeArg::Batch => Mode::Batch,
                ModeArg::Interactive => Mode::Interactive,
            };
        }
        Ok(config.validated()?)
    }
}

#[derive(Debug, Clone, Copy)]
enum Status {
    Io = 3,
    Format = 4,
    Validation = 5,
}

struct Failure {
    status: Status,
    message: String,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let status = match e {
            ConfigError::Io { .. } => Status::Io,
            ConfigError::Parse(_) => Status::Format,
            ConfigError::Version(_) | ConfigError::Invalid(_) => Status::Validation,
        };
        Failure { status, message: e.to_string() }
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Self {
        let status = match e {
            DatasetError::Io { .. } => Status::Io,
            DatasetError::Format { .. } | DatasetError::Version { .. } => Status::Format,
            DatasetError::Validation(_) => Status::Validation,
        };
        Failure { status, message: e.to_string() }
    }
}

fn generate(config: &ConfigArgs, out: &Path) -> Result<(), Failure> {
    let config = config.resolve()?;
    let mut cohort = simulate(&config);
    inject_messiness(&mut cohort);
    let manifest = dataset::export(&cohort, out)?;
    println!(
        "wrote {} ({} patients, {} hcps, {} days, seed {}): {} measurements, {} alerts",
        out.display(),
        manifest.config.n_patients,
        manifest.config.n_hcps,
        manifest.days_simulated,
        manifest.seed,
        manifest.row_counts[dataset::MEASUREMENTS],
        manifest.row_counts[dataset::ALERTS],
    );
    Ok(())
}

fn verify(bundle: &Path) -> Result<(), Failure> {
    let report = verify_bundle(bundle).map_err(|e| {
        let failure = Failure::from(e);
        Failure { message: format!("FAIL import: {}", failure.message), ..failure }
    })?;
    print!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure { status: Status::Validation, message: "bundle failed verification".into() })
    }
}

fn print_stats(s: &CohortStats) {
    println!("measurements        {}", s.measurement_count);
    println!("alerts              {}", s.alert_count);
    println!("alert rate          {:.4}", s.alert_rate);
    println!("open alerts         {}", s.open_alert_count);
    println!("responses           {}", s.response_count);
    for (action, n) in &s.responses_by_action {
        println!("  {action:<18}{n}");
    }
    println!("medication changes  {}", s.medication_change_count);
    println!("admissions          {}", s.admission_count);
    println!("admission days      {}", s.admission_days);
    println!("consultations       {}", s.consultation_count);
    println!();
    println!("hcp      responses");
    for (hcp, n) in &s.responses_by_hcp {
        println!("{hcp:<9}{n}");
    }
    println!();
    println!("patient  alerts");
    for (patient, n) in &s.alerts_by_patient {
        println!("{patient:<9}{n}");
    }
}

fn stats(bundle: &Path, json: bool) -> Result<(), Failure> {
    let cohort = dataset::import(bundle)?;
    let s = cohort_stats(&cohort);
    if json {
        println!("{}", serde_json::to_string_pretty(&s).expect("stats serialize"));
    } else {
        print_stats(&s);
    }
    Ok(())
}

fn serve(bundle: Option<&Path>, config: &ConfigArgs, addr: SocketAddr) -> Result<(), Failure> {
    let store = Arc::new(Store::new());
    let handle = match bundle {
        Some(dir) => store.insert(dataset::import(dir)?),
        None => store
            .create_cohort(config.resolve()?)
            .map_err(|e| Failure { status: Status::Validation, message: e.message })?,
    };
    let runtime = tokio::runtime::Runtime::new()
        .map_err(|e| Failure { status: Status::Io, message: format!("cannot start runtime: {e}") })?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure { status: Status::Io, message: format!("cannot listen on {addr}: {e}") })?;
        println!(
            "serving {} (day {}/{}, {} open alerts) on http://{addr}",
            handle.cohort_id, handle.days_simulated, handle.duration_days, handle.open_alert_count
        );
        axum::serve(listener, service::router(store))
            .await
            .map_err(|e| Failure { status: Status::Io, message: e.to_string() })
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate { config, out } => generate(config, out),
        Command::Verify { bundle } => verify(bundle),
        Command::Stats { bundle, json } => stats(bundle, *json),
        Command::Serve { bundle, config, port, host } => {
            serve(bundle.as_deref(), config, SocketAddr::new(*host, *port))
        }
        Command::Config => {
            print!("{}", SimulationConfig::default().to_toml_string());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.message);
            ExitCode::from(failure.status as u8)
        }
    }
}
