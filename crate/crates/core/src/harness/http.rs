//! Generic chat-completion adapter over blocking HTTP.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use serde_json::{json, Value};

use super::client::{excerpt, ClientError, GenRequest, ModelClient};

pub const DEFAULT_SECRET_ENV: &str = "LSQ_API_KEY";

pub const PROMPT: &str = "{{PROMPT}}";
pub const MODEL: &str = "{{MODEL}}";
pub const TEMPERATURE: &str = "{{TEMPERATURE}}";
pub const MAX_TOKENS: &str = "{{MAX_TOKENS}}";
pub const STOP: &str = "{{STOP}}";

/// Provider settings, read from a TOML file. Secrets are never stored here.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HttpConfig {
    pub endpoint: String,
    pub model: String,
    /// Client id recorded in results; defaults to the model name.
    pub id: Option<String>,
    pub auth_header: String,
    /// Prepended to the secret in the auth header, e.g. "Bearer ".
    pub auth_prefix: String,
    pub secret_env: String,
    pub secret_file: Option<PathBuf>,
    pub require_secret: bool,
    /// JSON body with `{{PROMPT}}`, `{{MODEL}}`, `{{TEMPERATURE}}`, `{{MAX_TOKENS}}`, `{{STOP}}` placeholders.
    pub request_template: Option<String>,
    /// JSON pointers tried in order to find the completion text.
    pub response_pointers: Vec<String>,
    pub timeout_secs: u64,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            endpoint: String::new(),
            model: String::new(),
            id: None,
            auth_header: "Authorization".into(),
            auth_prefix: "Bearer ".into(),
            secret_env: DEFAULT_SECRET_ENV.into(),
            secret_file: None,
            require_secret: true,
            request_template: None,
            response_pointers: vec![
                "/choices/0/message/content".into(),
                "/choices/0/text".into(),
                "/content/0/text".into(),
                "/candidates/0/content/parts/0/text".into(),
                "/output_text".into(),
            ],
            timeout_secs: 600,
        }
    }
}

impl HttpConfig {
    pub fn load(path: &Path) -> Result<HttpConfig, ClientError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ClientError::Config(format!("reading {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| ClientError::Config(format!("parsing {}: {e}", path.display())))
    }

    fn default_template() -> Value {
        json!({
            "model": MODEL,
            "messages": [{"role": "user", "content": PROMPT}],
            "temperature": TEMPERATURE,
            "max_tokens": MAX_TOKENS,
        })
    }
}

/// Replaces placeholder strings; whole-string placeholders keep their JSON type.
fn substitute(v: &Value, vars: &[(&str, &Value)]) -> Value {
    match v {
        Value::String(s) => {
            if let Some((_, val)) = vars.iter().find(|(k, _)| s == k) {
                return (*val).clone();
            }
            let mut out = s.clone();
            for (k, val) in vars {
                if out.contains(k) {
                    let text = match val {
                        Value::String(t) => t.clone(),
                        other => other.to_string(),
                    };
                    out = out.replace(k, &text);
                }
            }
            Value::String(out)
        }
        Value::Array(items) => Value::Array(items.iter().map(|i| substitute(i, vars)).collect()),
        Value::Object(map) => Value::Object(
            map.iter()
                .filter(|(_, v)| {
                    !(v.as_str() == Some(STOP) && vars.iter().all(|(k, _)| *k != STOP))
                })
                .map(|(k, v)| (k.clone(), substitute(v, vars)))
                .collect(),
        ),
        other => other.clone(),
    }
}

pub struct HttpClient {
    config: HttpConfig,
    id: String,
    template: Value,
    secret: Option<String>,
    agent: reqwest::blocking::Client,
}

impl fmt::Debug for HttpClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HttpClient")
            .field("id", &self.id)
            .field("endpoint", &self.config.endpoint)
            .field("secret", &self.secret.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

fn read_secret(config: &HttpConfig) -> Result<Option<String>, ClientError> {
    if let Ok(v) = std::env::var(&config.secret_env) {
        if !v.trim().is_empty() {
            return Ok(Some(v.trim().to_owned()));
        }
    }
    if let Some(path) = &config.secret_file {
        let v = std::fs::read_to_string(path).map_err(|e| {
            ClientError::Config(format!("reading secret file {}: {e}", path.display()))
        })?;
        if !v.trim().is_empty() {
            return Ok(Some(v.trim().to_owned()));
        }
    }
    if config.require_secret {
        return Err(ClientError::Config(format!(
            "no secret found: set ${} or `secret_file` in the provider config",
            config.secret_env
        )));
    }
    Ok(None)
}

pub fn http_client(config: HttpConfig) -> Result<HttpClient, ClientError> {
    if config.endpoint.is_empty() {
        return Err(ClientError::Config(
            "provider config needs `endpoint`".into(),
        ));
    }
    let template = match &config.request_template {
        Some(t) => serde_json::from_str(t)
            .map_err(|e| ClientError::Config(format!("request_template is not JSON: {e}")))?,
        None => HttpConfig::default_template(),
    };
    let secret = read_secret(&config)?;
    let agent = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(config.timeout_secs))
        .build()
        .map_err(|e| ClientError::Config(e.to_string()))?;
    let id = config.id.clone().unwrap_or_else(|| config.model.clone());
    Ok(HttpClient {
        config,
        id,
        template,
        secret,
        agent,
    })
}

impl HttpClient {
    pub fn request_body(&self, req: &GenRequest<'_>) -> Value {
        let prompt = Value::String(req.prompt.to_owned());
        let model = Value::String(self.config.model.clone());
        let temperature = json!(req.params.temperature);
        let max_tokens = json!(req.params.max_output_tokens);
        let stop = json!(req.params.stop);
        let mut vars = vec![
            (PROMPT, &prompt),
            (MODEL, &model),
            (TEMPERATURE, &temperature),
            (MAX_TOKENS, &max_tokens),
        ];
        if !req.params.stop.is_empty() {
            vars.push((STOP, &stop));
        }
        let mut body = substitute(&self.template, &vars);
        let template_has_stop = self.template.to_string().contains(STOP);
        if !req.params.stop.is_empty() && !template_has_stop {
            if let Value::Object(map) = &mut body {
                map.insert("stop".into(), stop.clone());
            }
        }
        body
    }

    pub fn extract_text(&self, body: &str) -> Result<String, ClientError> {
        let value: Value = serde_json::from_str(body).map_err(|e| ClientError::Protocol {
            message: format!("response is not JSON: {e}"),
            excerpt: excerpt(body),
        })?;
        self.config
            .response_pointers
            .iter()
            .find_map(|p| value.pointer(p).and_then(Value::as_str))
            .map(str::to_owned)
            .ok_or_else(|| ClientError::Protocol {
                message: format!(
                    "response has no text at any of {:?}",
                    self.config.response_pointers
                ),
                excerpt: excerpt(body),
            })
    }
}

impl ModelClient for HttpClient {
    fn id(&self) -> &str {
        &self.id
    }

    fn generate(&self, req: &GenRequest<'_>) -> Result<String, ClientError> {
        let mut call = self
            .agent
            .post(&self.config.endpoint)
            .json(&self.request_body(req));
        if let Some(secret) = &self.secret {
            call = call.header(
                self.config.auth_header.as_str(),
                format!("{}{secret}", self.config.auth_prefix),
            );
        }
        let resp = call.send().map_err(|e| ClientError::Transport {
            status: e.status().map(|s| s.as_u16()),
            message: e.without_url().to_string(),
            retryable: true,
        })?;
        let status = resp.status().as_u16();
        let body = resp.text().map_err(|e| ClientError::Transport {
            status: Some(status),
            message: format!("reading body: {}", e.without_url()),
            retryable: true,
        })?;
        if status >= 400 {
            return Err(ClientError::from_status(status, &body));
        }
        self.extract_text(&body)
    }
}
