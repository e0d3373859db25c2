//! Driving instances through model clients.

pub mod client;
pub mod http;
pub mod mock;
pub mod run;
pub mod sink;

pub use client::{ClientError, GenParams, GenRequest, ModelClient, MRCR_MIN_OUTPUT_TOKENS};
pub use http::{http_client, HttpClient, HttpConfig, DEFAULT_SECRET_ENV};
pub use mock::{mock_client, MockClient, MockKind};
pub use run::{run_eval, Backoff, RunError, RunOptions, RunSummary};
pub use sink::{read_records, EvalRecord, JsonlSink, RecordLog, SinkError};
