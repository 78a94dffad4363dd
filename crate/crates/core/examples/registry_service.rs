//! Ingests the bouncing-ball record into a registry and serves it over HTTP.
//!
//! cargo run --example registry_service -- /tmp/microsim-root 8080

use std::net::SocketAddr;
use std::sync::Arc;

use microsim::registry::{load_store, serve};

#[tokio::main]
async fn main() {
    let mut args = std::env::args().skip(1);
    let root = args.next().map(std::path::PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("microsim-demo"));
    let port: u16 = args.next().and_then(|p| p.parse().ok()).unwrap_or(8080);
    std::fs::create_dir_all(&root).unwrap();

    let registry = load_store(&root).unwrap();
    let bytes = std::fs::read(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/records/bouncing-ball.json")).unwrap();
    let response = registry.api_ingest(&bytes);
    print!("{} {}", response.status, response.text());

    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    println!("try: curl 'http://{addr}/search?subject=math'");
    serve(Arc::new(registry), addr).await.unwrap();
}
