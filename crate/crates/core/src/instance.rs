//! Task instances and their JSONL schema.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    LatentList,
    Mrcr,
    Idk,
}

impl TaskKind {
    pub const ALL: [TaskKind; 3] = [TaskKind::LatentList, TaskKind::Mrcr, TaskKind::Idk];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::LatentList => "latent_list",
            TaskKind::Mrcr => "mrcr",
            TaskKind::Idk => "idk",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "latent_list" => Ok(TaskKind::LatentList),
            "mrcr" => Ok(TaskKind::Mrcr),
            "idk" => Ok(TaskKind::Idk),
            other => Err(format!(
                "unknown task kind {other:?} (expected latent_list, mrcr or idk)"
            )),
        }
    }
}

/// Context-length subsets. Ordered by size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContextBucket {
    #[serde(rename = "32k")]
    B32K,
    #[serde(rename = "128k")]
    B128K,
    #[serde(rename = "1m")]
    B1M,
}

impl ContextBucket {
    pub const ALL: [ContextBucket; 3] = [
        ContextBucket::B32K,
        ContextBucket::B128K,
        ContextBucket::B1M,
    ];

    pub fn max_tokens(self) -> usize {
        match self {
            ContextBucket::B32K => 32_768,
            ContextBucket::B128K => 131_072,
            ContextBucket::B1M => 1_048_576,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ContextBucket::B32K => "32k",
            ContextBucket::B128K => "128k",
            ContextBucket::B1M => "1m",
        }
    }

    /// Smallest bucket whose range contains `tokens`; lengths beyond 1M map to 1M.
    pub fn containing(tokens: usize) -> ContextBucket {
        Self::ALL
            .into_iter()
            .find(|b| tokens <= b.max_tokens())
            .unwrap_or(ContextBucket::B1M)
    }
}

impl fmt::Display for ContextBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ContextBucket {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "32k" => Ok(ContextBucket::B32K),
            "128k" => Ok(ContextBucket::B128K),
            "1m" => Ok(ContextBucket::B1M),
            other => Err(format!(
                "unknown bucket {other:?} (expected 32k, 128k or 1m)"
            )),
        }
    }
}

/// Metadata keys shared across tasks.
pub mod meta {
    pub const PROMPT_TOKENS: &str = "prompt_tokens";
    pub const TOKENIZER: &str = "tokenizer";
    pub const VIEW_KIND: &str = "view_kind";
    pub const VIEW: &str = "view";
    pub const MRCR_KEY: &str = "key";
    pub const MRCR_KEY_ARITY: &str = "key_arity";
    pub const MRCR_PREFIX: &str = "random_prefix";
    pub const MRCR_NEEDLES: &str = "needle_positions";
    pub const MRCR_CONVERSATION: &str = "conversation";
    pub const MRCR_TRUTH_BODY: &str = "truth_body";
    pub const MRCR_COUNTS_EXAMPLES: &str = "length_includes_examples";
    pub const IDK_ANSWERABLE: &str = "answerable";
    pub const IDK_CHOICES: &str = "choices";
    pub const IDK_TEMPLATE: &str = "template";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskInstance {
    pub id: String,
    pub kind: TaskKind,
    pub seed: u64,
    pub complexity: u32,
    pub bucket: ContextBucket,
    pub target_context_tokens: usize,
    pub prompt: String,
    pub ground_truth: String,
    pub metadata: BTreeMap<String, String>,
}

impl TaskInstance {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    /// Prompt length recorded at generation time, if any.
    pub fn prompt_tokens(&self) -> Option<usize> {
        self.meta(meta::PROMPT_TOKENS).and_then(|v| v.parse().ok())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.target_context_tokens == 0 {
            return Err("target_context_tokens must be positive".into());
        }
        if self.target_context_tokens > self.bucket.max_tokens() {
            return Err(format!(
                "target_context_tokens {} exceeds bucket {} maximum {}",
                self.target_context_tokens,
                self.bucket,
                self.bucket.max_tokens()
            ));
        }
        if self.complexity == 0 && self.kind != TaskKind::Idk {
            return Err("complexity 0 is only valid for IDK instances".into());
        }
        Ok(())
    }
}

/// Content-addressed id: the same kind, seed and generator config always map
/// to the same id.
pub fn instance_id(kind: TaskKind, seed: u64, config_fingerprint: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(kind.as_str().as_bytes());
    hasher.update([0]);
    hasher.update(seed.to_le_bytes());
    hasher.update([0]);
    hasher.update(config_fingerprint.as_bytes());
    let digest = hasher.finalize();
    format!("{}-{}", kind.as_str(), hex::encode(&digest[..8]))
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {}{message}", .field.as_ref().map(|f| format!("field `{f}`: ")).unwrap_or_default())]
pub struct ParseInstanceError {
    pub line: usize,
    pub field: Option<String>,
    pub message: String,
}

pub fn serialize_instance(inst: &TaskInstance) -> String {
    serde_json::to_string(inst).expect("instance serialization is infallible")
}

pub fn parse_instance(line: &str) -> Result<TaskInstance, ParseInstanceError> {
    parse_instance_at(line, 1)
}

pub(crate) fn field_from_serde_message(msg: &str) -> Option<String> {
    for marker in ["missing field `", "unknown field `", "duplicate field `"] {
        if let Some(rest) = msg.split(marker).nth(1) {
            return rest.split('`').next().map(str::to_owned);
        }
    }
    None
}

fn parse_instance_at(line: &str, line_no: usize) -> Result<TaskInstance, ParseInstanceError> {
    match serde_json::from_str::<TaskInstance>(line) {
        Ok(inst) => Ok(inst),
        Err(err) => {
            let message = err.to_string();
            // Type errors do not name the field; probe the raw object.
            let field = field_from_serde_message(&message).or_else(|| locate_bad_field(line));
            Err(ParseInstanceError {
                line: line_no,
                field,
                message,
            })
        }
    }
}

fn locate_bad_field(line: &str) -> Option<String> {
    let value: serde_json::Value = serde_json::from_str(line).ok()?;
    let obj = value.as_object()?;
    let check = |name: &str, ok: &dyn Fn(&serde_json::Value) -> bool| -> Option<String> {
        obj.get(name).filter(|v| !ok(v)).map(|_| name.to_owned())
    };
    check("id", &|v| v.is_string())
        .or_else(|| {
            check("kind", &|v| {
                v.as_str().is_some_and(|s| s.parse::<TaskKind>().is_ok())
            })
        })
        .or_else(|| check("seed", &|v| v.is_u64()))
        .or_else(|| {
            check("complexity", &|v| {
                v.as_u64().is_some_and(|c| c <= u32::MAX as u64)
            })
        })
        .or_else(|| {
            check("bucket", &|v| {
                v.as_str()
                    .is_some_and(|s| s.parse::<ContextBucket>().is_ok())
            })
        })
        .or_else(|| check("target_context_tokens", &|v| v.is_u64()))
        .or_else(|| check("prompt", &|v| v.is_string()))
        .or_else(|| check("ground_truth", &|v| v.is_string()))
        .or_else(|| {
            check("metadata", &|v| {
                v.as_object()
                    .is_some_and(|m| m.values().all(|x| x.is_string()))
            })
        })
}

/// Reads a JSONL instance file; blank lines are skipped.
pub fn read_instances<R: BufRead>(reader: R) -> Result<Vec<TaskInstance>, ParseInstanceError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| ParseInstanceError {
            line: i + 1,
            field: None,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_instance_at(&line, i + 1)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> TaskInstance {
        let mut metadata = BTreeMap::new();
        metadata.insert("view_kind".into(), "min".into());
        TaskInstance {
            id: instance_id(TaskKind::LatentList, 7, "cfg"),
            kind: TaskKind::LatentList,
            seed: 7,
            complexity: 5,
            bucket: ContextBucket::B32K,
            target_context_tokens: 30_000,
            prompt: "line one\nline \"two\"\n".into(),
            ground_truth: "42".into(),
            metadata,
        }
    }

    #[test]
    fn wire_names() {
        let line = serialize_instance(&sample());
        assert!(line.contains(r#""kind":"latent_list""#));
        assert!(line.contains(r#""bucket":"32k""#));
        assert!(!line.contains('\n'));
        assert_eq!(serde_json::to_string(&TaskKind::Mrcr).unwrap(), r#""mrcr""#);
        assert_eq!(
            serde_json::to_string(&ContextBucket::B1M).unwrap(),
            r#""1m""#
        );
    }

    #[test]
    fn newlines_escaped_and_restored() {
        let inst = sample();
        let line = serialize_instance(&inst);
        assert!(line.contains(r#"line one\nline \"two\"\n"#));
        assert_eq!(parse_instance(&line).unwrap(), inst);
    }

    #[test]
    fn missing_kind_names_field() {
        let mut v: serde_json::Value =
            serde_json::from_str(&serialize_instance(&sample())).unwrap();
        v.as_object_mut().unwrap().remove("kind");
        let err = parse_instance(&v.to_string()).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("kind"));
        assert_eq!(err.line, 1);
    }

    #[test]
    fn bad_bucket_names_field_and_line() {
        let good = serialize_instance(&sample());
        let bad = good.replace(r#""bucket":"32k""#, r#""bucket":"64k""#);
        let text = format!("{good}\n\n{bad}\n");
        let err = read_instances(text.as_bytes()).unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.field.as_deref(), Some("bucket"));
        assert!(err.to_string().starts_with("line 3: field `bucket`"));
    }

    #[test]
    fn ids_are_content_addressed() {
        assert_eq!(
            instance_id(TaskKind::Idk, 1, "a"),
            instance_id(TaskKind::Idk, 1, "a")
        );
        assert_ne!(
            instance_id(TaskKind::Idk, 1, "a"),
            instance_id(TaskKind::Idk, 2, "a")
        );
        assert_ne!(
            instance_id(TaskKind::Idk, 1, "a"),
            instance_id(TaskKind::Mrcr, 1, "a")
        );
    }

    #[test]
    fn bucket_order_and_containment() {
        assert!(
            ContextBucket::B32K < ContextBucket::B128K && ContextBucket::B128K < ContextBucket::B1M
        );
        assert_eq!(ContextBucket::containing(32_768), ContextBucket::B32K);
        assert_eq!(ContextBucket::containing(32_769), ContextBucket::B128K);
        assert_eq!(ContextBucket::containing(5_000_000), ContextBucket::B1M);
    }

    fn arb_instance() -> impl Strategy<Value = TaskInstance> {
        (
            prop::sample::select(TaskKind::ALL.to_vec()),
            any::<u64>(),
            0u32..50,
            prop::sample::select(ContextBucket::ALL.to_vec()),
            1usize..1_000_000,
            any::<String>(),
            any::<String>(),
            prop::collection::btree_map(any::<String>(), any::<String>(), 0..4),
        )
            .prop_map(
                |(kind, seed, complexity, bucket, target, prompt, truth, metadata)| TaskInstance {
                    id: instance_id(kind, seed, "p"),
                    kind,
                    seed,
                    complexity,
                    bucket,
                    target_context_tokens: target,
                    prompt,
                    ground_truth: truth,
                    metadata,
                },
            )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn round_trip(inst in arb_instance()) {
            let line = serialize_instance(&inst);
            prop_assert!(!line.contains('\n'));
            prop_assert_eq!(parse_instance(&line).unwrap(), inst);
        }
    }
}
