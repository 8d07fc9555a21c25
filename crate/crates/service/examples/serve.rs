//! Run the comparison service.
//!
//! ```text
//! cargo run -p scobo-service --example serve -- --bind 127.0.0.1:8080 --snapshot-dir /tmp/scobo-sessions
//! ```
//!
//! Sessions in the snapshot directory are restored at start-up and written
//! back every `--snapshot-secs` and once more on Ctrl-C.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::Parser;
use scobo_service::{router, SessionStore};

#[derive(Parser)]
struct Opts {
    #[arg(long, env = "SCOBO_BIND", default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Directory for JSON session snapshots; sessions live in memory only when unset.
    #[arg(long, env = "SCOBO_SNAPSHOT_DIR")]
    snapshot_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    snapshot_secs: u64,
    /// Allowed CORS origin; repeat for several. Any origin when absent.
    #[arg(long = "allow-origin")]
    allow_origin: Vec<String>,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = Opts::parse();
    let store = Arc::new(match &opts.snapshot_dir {
        Some(dir) => SessionStore::restore(dir)?,
        None => SessionStore::new(),
    });
    if !store.is_empty() {
        eprintln!("restored {} sessions", store.len());
    }

    if let Some(dir) = opts.snapshot_dir.clone() {
        let store = store.clone();
        let period = Duration::from_secs(opts.snapshot_secs.max(1));
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(period);
            loop {
                tick.tick().await;
                if let Err(e) = store.snapshot(&dir) {
                    eprintln!("{e}");
                }
            }
        });
    }

    let listener = tokio::net::TcpListener::bind(opts.bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(store.clone(), &opts.allow_origin))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(dir) = &opts.snapshot_dir {
        store.snapshot(dir)?;
    }
    Ok(())
}
