use std::net::SocketAddr;
use std::time::Duration;

use clap::Parser;
use collegeapp_service::{serve, ServiceConfig, DEFAULT_BODY_LIMIT};
use tokio::net::TcpListener;

/// HTTP API for the college application solvers.
#[derive(Parser, Debug)]
#[command(name = "collegeapp-server", version, about)]
struct Args {
    #[arg(long, env = "COLLEGEAPP_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "COLLEGEAPP_HOST", default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Largest accepted request body, in bytes.
    #[arg(long, default_value_t = DEFAULT_BODY_LIMIT)]
    body_limit: usize,
    /// Per-request solver budget, in seconds.
    #[arg(long, default_value_t = 10.0)]
    timeout: f64,
    /// Allowed CORS origin; repeat for several. Any origin when omitted.
    #[arg(
        long = "cors-origin",
        env = "COLLEGEAPP_CORS_ORIGINS",
        value_delimiter = ','
    )]
    cors_origins: Vec<String>,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let config = ServiceConfig {
        body_limit: args.body_limit,
        timeout: Duration::from_secs_f64(args.timeout),
        cors_origins: args.cors_origins,
    };
    let listener = TcpListener::bind(SocketAddr::new(args.host, args.port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    serve(listener, config, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}
