//! Shared helpers for the integration tests: fixture loading and an
//! in-process HTTP server over a router.

// Each test binary compiles this module separately and uses a different
// subset of it.
#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;
use std::thread;

use nedkit::index::InvertedIndex;
use nedkit::kb::KnowledgeBase;
use nedkit::service::{router, ServiceConfig, ServiceState};

pub const EXAMPLES_KB: &str = include_str!("../fixtures/examples_kb.jsonl");
pub const MINI_KB: &str = include_str!("../fixtures/mini_kb.jsonl");
pub const MINI_QUERIES: &str = include_str!("../fixtures/mini_queries.jsonl");
pub const MINI_GOLD: &str = include_str!("../fixtures/mini_gold.tsv");

pub fn examples_kb() -> (KnowledgeBase, InvertedIndex) {
    let kb = KnowledgeBase::from_dump_str(EXAMPLES_KB).unwrap().0;
    let index = InvertedIndex::build(&kb);
    (kb, index)
}

pub fn mini_kb() -> (KnowledgeBase, InvertedIndex) {
    let kb = KnowledgeBase::from_dump_str(MINI_KB).unwrap().0;
    let index = InvertedIndex::build(&kb);
    (kb, index)
}

pub fn service_config() -> ServiceConfig {
    // kb_path is required by the config shape but unused when the state
    // is built directly from an in-memory KB.
    toml::from_str(r#"kb_path = "unused.jsonl""#).unwrap()
}

/// Serves `state` on an ephemeral port from a background thread and
/// returns the base URL. The thread runs until the test process exits.
pub fn spawn_service(state: ServiceState) -> String {
    let app = router(Arc::new(state));
    let (tx, rx) = std::sync::mpsc::channel();
    thread::spawn(move || {
        let runtime = tokio::runtime::Builder::new_current_thread()
            .enable_all()
            .build()
            .expect("runtime");
        runtime.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
                .await
                .expect("bind ephemeral port");
            tx.send(listener.local_addr().expect("local addr"))
                .expect("send addr");
            axum::serve(listener, app).await.expect("serve");
        });
    });
    format!("http://{}", rx.recv().expect("server came up"))
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}
