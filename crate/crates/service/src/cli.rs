use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, Context};
use chrono::Utc;
use clap::{Args, Parser, Subcommand, ValueEnum};
use facetnet_core::catalog::{build_index, FacetIndex, FilterSpec, MatchMode};
use facetnet_core::ingest::{load_catalog, load_snapshot, normalize_all, save_snapshot, FacetSchema, LoadReport};
use facetnet_core::network::{
    build_network, export_network, validate_topology, BuildOptions, ExportFormat, NetworkError,
    TopologySpec,
};
use facetnet_service::{router, AppState, ServiceConfig};
use tracing::{info, warn};
use tracing_subscriber::EnvFilter;

/// Faceted dataset discovery with co-occurrence networks.
#[derive(Debug, Parser)]
#[command(name = "facetnet", version)]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, env = "FACETNET_CONFIG", value_name = "FILE")]
    config: Option<PathBuf>,

    /// Catalog snapshot to read; overrides the configuration.
    #[arg(long, global = true, value_name = "FILE")]
    snapshot: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize a card file (JSON array or one card per line) into a snapshot.
    Ingest {
        input: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        out: PathBuf,
        #[command(flatten)]
        schema: SchemaArgs,
    },
    /// Download cards from a hub listing API into a snapshot.
    Fetch {
        #[arg(long, default_value = facetnet_core::ingest::hub::DEFAULT_ENDPOINT)]
        endpoint: String,
        #[arg(long, default_value_t = 100)]
        page_size: usize,
        #[arg(long)]
        max_records: Option<usize>,
        #[arg(short, long, value_name = "FILE")]
        out: PathBuf,
        #[command(flatten)]
        schema: SchemaArgs,
    },
    /// List facets, or the values of one facet with counts.
    Facets {
        facet: Option<String>,
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// Build a network and export it.
    Network {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        link: String,
        #[arg(long)]
        thematic: Option<String>,
        #[command(flatten)]
        filter: FilterArgs,
        /// Output file; the format follows the extension unless --format is given.
        #[arg(short, long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        max_nodes: Option<usize>,
        #[arg(long)]
        max_edges: Option<usize>,
        #[arg(long)]
        hide_isolated: bool,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        listen: Option<SocketAddr>,
    },
}

#[derive(Debug, Args)]
struct SchemaArgs {
    /// Skip tags whose prefix is not a standard facet.
    #[arg(long)]
    closed_schema: bool,
    /// Facet receiving tags without a prefix.
    #[arg(long, default_value = facetnet_core::ingest::DEFAULT_FALLBACK_FACET)]
    fallback_facet: String,
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// Select a value; repeat for more. Values of one facet combine by --mode.
    #[arg(long = "filter", value_name = "FACET=VALUE", value_parser = parse_assignment)]
    filters: Vec<(String, String)>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Or,
    And,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Graphml,
}

fn parse_assignment(s: &str) -> Result<(String, String), String> {
    FilterSpec::parse_assignment(s)
        .map(|(f, v)| (f.to_string(), v.to_string()))
        .ok_or_else(|| format!("expected FACET=VALUE, got {s:?}"))
}

pub enum Failure {
    /// Bad invocation; exit status 2.
    Usage(String),
    /// The command failed; exit status 1.
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

type CliResult = Result<(), Failure>;

pub fn run(cli: Cli) -> CliResult {
    let default_level = if matches!(cli.command, Command::Serve { .. }) { "info" } else { "warn" };
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default_level)))
        .with_writer(std::io::stderr)
        .init();

    let mut config = ServiceConfig::load(cli.config.as_deref()).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(path) = cli.snapshot {
        config.snapshot_path = Some(path);
    }

    match cli.command {
        Command::Ingest { input, out, schema } => {
            let report = load_catalog(&input).with_context(|| format!("reading {}", input.display()))?;
            write(report, &schema, &input.display().to_string(), &out)
        }
        Command::Fetch { endpoint, page_size, max_records, out, schema } => {
            let client = facetnet_core::ingest::hub::HubClient::new(&endpoint, page_size)
                .map_err(|e| Failure::Usage(e.to_string()))?
                .with_env_token();
            let report = client.fetch_catalog(max_records).context("fetching catalog")?;
            write(report, &schema, &endpoint, &out)
        }
        Command::Facets { facet, filter } => {
            let index = open(&config)?;
            let filter = filter_spec(filter, &config);
            match facet {
                None => {
                    for f in index.facet_summaries() {
                        println!("{}\t{} values\t{} records\t{} missing", f.name, f.distinct_values, f.records_with_values, f.records_missing);
                    }
                }
                Some(facet) => {
                    let values = index.facet_values(&facet, &filter).map_err(|e| Failure::Usage(e.to_string()))?;
                    for v in values {
                        println!("{}\t{}", v.value, v.count);
                    }
                }
            }
            Ok(())
        }
        Command::Network {
            source,
            target,
            link,
            thematic,
            filter,
            out,
            format,
            max_nodes,
            max_edges,
            hide_isolated,
        } => {
            let mut spec = TopologySpec::new(&source, &target, &link);
            spec.thematic = thematic;
            // facet checks that need no catalog come first
            if link == source || link == target {
                return Err(Failure::Usage(format!("--link {link:?} must differ from --source and --target")));
            }
            let index = open(&config)?;
            let filter = filter_spec(filter, &config);
            let valid = validate_topology(&spec, index.schema())
                .map_err(|e| Failure::Usage(NetworkError::from(e).to_string()))?;
            let options = BuildOptions {
                max_nodes: max_nodes.unwrap_or(config.limits.max_nodes),
                max_edges: max_edges.unwrap_or(config.limits.max_edges),
                hide_isolated,
            };
            if options.max_nodes == 0 || options.max_edges == 0 {
                return Err(Failure::Usage("--max-nodes and --max-edges must be positive".into()));
            }
            let net = build_network(&index, &filter, &valid, &options).map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(t) = &net.truncation {
                warn!(
                    "network truncated to {} of {} nodes and {} of {} edges",
                    t.nodes_kept, t.nodes_total, t.edges_kept, t.edges_total
                );
            }
            let format = match format {
                Some(Format::Json) => ExportFormat::NodeLinkJson,
                Some(Format::Graphml) => ExportFormat::GraphMl,
                None => out
                    .as_deref()
                    .and_then(ExportFormat::from_path)
                    .unwrap_or(ExportFormat::NodeLinkJson),
            };
            let doc = export_network(&net, format);
            match out {
                Some(path) => {
                    std::fs::write(&path, doc).with_context(|| format!("writing {}", path.display()))?;
                    eprintln!(
                        "wrote {} network with {} nodes and {} edges to {}",
                        net.kind,
                        net.nodes.len(),
                        net.edges.len(),
                        path.display()
                    );
                }
                None => println!("{doc}"),
            }
            Ok(())
        }
        Command::Serve { listen } => {
            if let Some(addr) = listen {
                config.listen = addr;
            }
            let index = open(&config)?;
            serve(index, config).map_err(Failure::Runtime)
        }
    }
}

fn schema(args: &SchemaArgs) -> FacetSchema {
    FacetSchema::new(!args.closed_schema, args.fallback_facet.clone())
}

fn write(report: LoadReport, args: &SchemaArgs, label: &str, out: &Path) -> CliResult {
    for e in &report.errors {
        warn!("skipped card at {e}");
    }
    let schema = schema(args);
    let summary = normalize_all(&report.cards, &schema);
    for (id, skipped) in &summary.skipped_tags {
        warn!("{id}: skipped tag {skipped:?}");
    }
    let records = summary.records.len();
    save_snapshot(summary.records, schema, label, Utc::now(), out)
        .with_context(|| format!("saving {}", out.display()))?;
    eprintln!(
        "wrote {records} records to {} ({} tags parsed, {} skipped, {} cards rejected)",
        out.display(),
        summary.parsed_tags,
        summary.skipped_tags.len(),
        report.errors.len()
    );
    Ok(())
}

fn open(config: &ServiceConfig) -> Result<FacetIndex, Failure> {
    let path = config.snapshot_path.as_deref().ok_or_else(|| {
        Failure::Usage("no snapshot given; pass --snapshot, set FACETNET_SNAPSHOT or snapshot_path in the config".into())
    })?;
    let snapshot = load_snapshot(path).map_err(|e| anyhow!(e))?;
    Ok(build_index(snapshot))
}

fn filter_spec(args: FilterArgs, config: &ServiceConfig) -> FilterSpec {
    let mode = match args.mode {
        Some(Mode::Or) => MatchMode::Or,
        Some(Mode::And) => MatchMode::And,
        None => config.within_facet_mode,
    };
    let mut filter = FilterSpec::new().with_mode(mode);
    for (facet, value) in args.filters {
        filter.select(&facet, [value]);
    }
    filter
}

fn serve(index: FacetIndex, config: ServiceConfig) -> anyhow::Result<()> {
    let runtime = tokio::runtime::Runtime::new().context("starting runtime")?;
    runtime.block_on(async move {
        let records = index.len();
        let state = Arc::new(AppState::new(index, &config));
        let listener = tokio::net::TcpListener::bind(config.listen)
            .await
            .with_context(|| format!("binding {}", config.listen))?;
        info!(addr = %listener.local_addr()?, records, "serving /api/v1");
        axum::serve(listener, router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .context("server failed")
    })
}
