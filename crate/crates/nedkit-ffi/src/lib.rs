//! C ABI over the disambiguation engine. Callers hold an opaque
//! [`NedEngine`] pointer; every entry point returns a [`NedStatus`] and
//! reports detail through a thread-local message readable with
//! [`ned_last_error`]. Strings handed out here must be released with
//! [`ned_string_free`], never with `free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use serde::Deserialize;

use nedkit::deadline::Deadline;
use nedkit::error::Error;
use nedkit::graph::{annotate_text, disambiguate_document, GraphConfig};
use nedkit::harness::Strategy;
use nedkit::index::InvertedIndex;
use nedkit::kb::{KnowledgeBase, Query, QueryType};
use nedkit::topic::{self, TopicConfig};

/// Result of a C-ABI call. Anything but `Ok` leaves a message in
/// [`ned_last_error`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NedStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The request itself was malformed (bad JSON, empty document, bad
    /// config values).
    InvalidInput = 3,
    Timeout = 4,
    /// The KB or index could not be loaded or is internally inconsistent.
    DataError = 5,
    /// A panic was caught at the boundary; the engine is still usable.
    Panic = 6,
}

/// Opaque engine handle: a loaded KB plus its search index and the
/// strategy defaults.
pub struct NedEngine {
    kb: KnowledgeBase,
    index: InvertedIndex,
    graph: GraphConfig,
    topic: TopicConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', "?")).expect("nul bytes were just replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_for(error: &Error) -> NedStatus {
    match error {
        Error::Timeout => NedStatus::Timeout,
        Error::InvalidQuery(_) | Error::EmptyQueryDocument | Error::Config(_) => {
            NedStatus::InvalidInput
        }
        _ => NedStatus::DataError,
    }
}

/// Runs `body` with panics converted to `NedStatus::Panic` so unwinding
/// never crosses the C boundary.
fn guarded(body: impl FnOnce() -> NedStatus) -> NedStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let detail = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_last_error(format!("panic: {detail}"));
            NedStatus::Panic
        }
    }
}

/// Borrows a C string as UTF-8, recording the failure on the error slot.
///
/// # Safety
/// `ptr` must be null or point to a nul-terminated string.
unsafe fn borrow_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, NedStatus> {
    if ptr.is_null() {
        set_last_error(format!("{what} must not be null"));
        return Err(NedStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| {
        set_last_error(format!("{what} is not valid UTF-8: {e}"));
        NedStatus::InvalidUtf8
    })
}

fn give_string(out: *mut *mut c_char, value: String) -> NedStatus {
    let value = CString::new(value.replace('\0', "?")).expect("nul bytes were just replaced");
    unsafe { *out = value.into_raw() };
    NedStatus::Ok
}

/// One disambiguation request, passed to [`ned_query`] as a JSON object.
/// Only `text` is required; `strategy` is `"graph"` or `"topic"`, `name`
/// and `seed` only matter for the topic strategy, and a missing
/// `timeout_s` means no deadline.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryRequest {
    text: String,
    #[serde(default)]
    strategy: Option<Strategy>,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    timeout_s: Option<f64>,
}

/// Opens an engine over the KB dump at `kb_path`. A null `index_path`
/// builds the search index in memory; otherwise the index is loaded from
/// that file. On `Ok` the caller owns `*out` and must release it with
/// [`ned_engine_free`].
///
/// # Safety
/// `kb_path` and `index_path` must be null or valid nul-terminated
/// strings; `out` must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn ned_engine_open(
    kb_path: *const c_char,
    index_path: *const c_char,
    out: *mut *mut NedEngine,
) -> NedStatus {
    guarded(|| {
        if out.is_null() {
            set_last_error("out must not be null".to_string());
            return NedStatus::NullArgument;
        }
        let kb_path = match borrow_str(kb_path, "kb_path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let kb = match KnowledgeBase::load_dump(Path::new(kb_path)) {
            Ok((kb, _)) => kb,
            Err(error) => {
                set_last_error(format!("loading {kb_path}: {error}"));
                return status_for(&error);
            }
        };
        let index = if index_path.is_null() {
            InvertedIndex::build(&kb)
        } else {
            let index_path = match borrow_str(index_path, "index_path") {
                Ok(s) => s,
                Err(status) => return status,
            };
            match InvertedIndex::load(Path::new(index_path)) {
                Ok(index) => index,
                Err(error) => {
                    set_last_error(format!("loading {index_path}: {error}"));
                    return status_for(&error);
                }
            }
        };
        let engine = Box::new(NedEngine {
            kb,
            index,
            graph: GraphConfig::default(),
            topic: TopicConfig::default(),
        });
        *out = Box::into_raw(engine);
        NedStatus::Ok
    })
}

/// Releases an engine. A null pointer is a no-op.
///
/// # Safety
/// `engine` must be null or a pointer from [`ned_engine_open`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ned_engine_free(engine: *mut NedEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Number of entities in the engine's KB. Returns 0 for a null engine.
///
/// # Safety
/// `engine` must be null or a live pointer from [`ned_engine_open`].
#[no_mangle]
pub unsafe extern "C" fn ned_entity_count(engine: *const NedEngine) -> usize {
    if engine.is_null() {
        return 0;
    }
    (*engine).kb.total_entities()
}

/// Annotates `text` with entity links using the graph strategy and stores
/// a newly allocated string in `*out`. Release it with
/// [`ned_string_free`].
///
/// # Safety
/// `engine` must be a live pointer from [`ned_engine_open`]; `text` must
/// be a valid nul-terminated string; `out` must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn ned_annotate(
    engine: *const NedEngine,
    text: *const c_char,
    out: *mut *mut c_char,
) -> NedStatus {
    guarded(|| {
        if engine.is_null() || out.is_null() {
            set_last_error("engine and out must not be null".to_string());
            return NedStatus::NullArgument;
        }
        let engine = &*engine;
        let text = match borrow_str(text, "text") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let result = match disambiguate_document(
            &engine.kb,
            &engine.index,
            "ffi",
            text,
            &engine.graph,
            &Deadline::never(),
        ) {
            Ok(result) => result,
            Err(error) => {
                set_last_error(error.to_string());
                return status_for(&error);
            }
        };
        let annotations = result.annotations.unwrap_or_default();
        give_string(out, annotate_text(text, &annotations))
    })
}

/// Disambiguates one request given as a JSON object: `text` (required),
/// `strategy` (`"graph"` or `"topic"`, default graph), `name` and `seed`
/// (topic strategy only), and `timeout_s` (no deadline when missing).
/// Stores the serialized result in `*out` as JSON with `query_id`,
/// `ranked` label/score pairs, and per-mention `annotations` when the
/// strategy produces them. Release `*out` with [`ned_string_free`].
///
/// # Safety
/// `engine` must be a live pointer from [`ned_engine_open`];
/// `request_json` must be a valid nul-terminated string; `out` must point
/// to writable memory.
#[no_mangle]
pub unsafe extern "C" fn ned_query(
    engine: *const NedEngine,
    request_json: *const c_char,
    out: *mut *mut c_char,
) -> NedStatus {
    guarded(|| {
        if engine.is_null() || out.is_null() {
            set_last_error("engine and out must not be null".to_string());
            return NedStatus::NullArgument;
        }
        let engine = &*engine;
        let request_json = match borrow_str(request_json, "request_json") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let request: QueryRequest = match serde_json::from_str(request_json) {
            Ok(request) => request,
            Err(error) => {
                set_last_error(format!("bad request: {error}"));
                return NedStatus::InvalidInput;
            }
        };
        let deadline = match request.timeout_s {
            Some(t) if !(t.is_finite() && t > 0.0) => {
                set_last_error(format!("timeout_s must be positive, got {t}"));
                return NedStatus::InvalidInput;
            }
            Some(t) => Deadline::after_secs(t),
            None => Deadline::never(),
        };
        let outcome = match request.strategy.unwrap_or(Strategy::Graph) {
            Strategy::Graph => disambiguate_document(
                &engine.kb,
                &engine.index,
                "ffi",
                &request.text,
                &engine.graph,
                &deadline,
            ),
            Strategy::Topic => {
                let mut config = engine.topic;
                if let Some(seed) = request.seed {
                    config.sampler.seed = seed;
                }
                let query = Query {
                    query_id: "ffi".to_string(),
                    query_type: QueryType::Unknown,
                    name: request.name.unwrap_or_default(),
                    context_document: request.text,
                };
                topic::disambiguate_query(&engine.kb, &engine.index, &query, &config, &deadline)
            }
        };
        match outcome {
            Ok(result) => {
                let body = serde_json::to_string(&result)
                    .expect("disambiguation results always serialize");
                give_string(out, body)
            }
            Err(error) => {
                set_last_error(error.to_string());
                status_for(&error)
            }
        }
    })
}

/// Releases a string produced by this library. A null pointer is a no-op.
///
/// # Safety
/// `s` must be null or a string from this library that has not been freed
/// yet.
#[no_mangle]
pub unsafe extern "C" fn ned_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on the calling thread, or null if
/// none. The pointer stays valid until the next failing call on the same
/// thread; do not free it.
#[no_mangle]
pub extern "C" fn ned_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |message| message.as_ptr())
    })
}
