use std::net::SocketAddr;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::Parser;
use tracing_subscriber::EnvFilter;

use deckqa_service::cli::{run_analyze, Cli, Command, ServeArgs};
use deckqa_service::server::{serve, AppState};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(args) => {
            // stderr carries the event stream, so logs stay off unless asked for.
            if std::env::var_os("RUST_LOG").is_some() {
                init_tracing("warn");
            }
            ExitCode::from(run_analyze(&args))
        }
        Command::Sample { out } => {
            match std::fs::write(&out, deckqa_core::synthetic::sample_lecture_pdf()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: writing {}: {e}", out.display());
                    ExitCode::FAILURE
                }
            }
        }
        Command::Serve(args) => {
            init_tracing("info");
            match run_server(args) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}

fn init_tracing(default: &str) {
    let filter = EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default));
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .init();
}

#[tokio::main]
async fn run_server(args: ServeArgs) -> anyhow::Result<()> {
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .with_context(|| format!("invalid listen address {}:{}", args.host, args.port))?;
    let base = args.run.pipeline_config();
    base.validate().context("invalid pipeline settings")?;
    let state = Arc::new(AppState::new(base).with_max_upload(args.max_upload_bytes));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    tracing::info!(%addr, "listening");
    serve(listener, state).await.context("server stopped")
}
