use cookiediff_fixtures::{serve, FixtureConfig, ScenarioParams};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let mut args = std::env::args().skip(1);
    let port = |v: Option<String>| v.and_then(|s| s.parse().ok()).unwrap_or(0);
    let config = FixtureConfig {
        primary_port: port(args.next()),
        secondary_port: port(args.next()),
        params: ScenarioParams::default(),
    };
    let server = serve(config).await?;
    println!("primary   {}", server.url("/"));
    println!("secondary {}", server.secondary_origin());
    tokio::signal::ctrl_c().await?;
    server.shutdown().await;
    Ok(())
}
