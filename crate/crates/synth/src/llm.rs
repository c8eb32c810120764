//! Chat clients: an HTTP provider with per-vendor adapters and an offline
//! fixture replayer.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::extract::extract_code;
use crate::prompts::{Phase, PromptBundle};

pub const ENV_API_KEY: &str = "HEURSYNTH_API_KEY";
pub const ENV_BASE_URL: &str = "HEURSYNTH_BASE_URL";
pub const ENV_FLAVOR: &str = "HEURSYNTH_API_FLAVOR";

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("provider returned {status}: {body}")]
    ProviderError { status: u16, body: String },
    #[error("no fixture for {0}")]
    FixtureMissing(String),
    #[error("reply contains no fenced code block")]
    NoCodeBlock,
    #[error("provider configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Provider {
    Http,
    Offline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// `POST {base}/chat/completions`, bearer auth.
    OpenAi,
    /// `POST {base}/messages`, `x-api-key` auth.
    Anthropic,
}

impl Flavor {
    fn default_base(self) -> &'static str {
        match self {
            Flavor::OpenAi => "https://api.openai.com/v1",
            Flavor::Anthropic => "https://api.anthropic.com/v1",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HttpSettings {
    pub base_url: String,
    pub api_key: String,
    pub flavor: Flavor,
}

impl HttpSettings {
    /// Reads key, base URL and flavor from the environment.
    pub fn from_env() -> Result<Self, LlmError> {
        let api_key = std::env::var(ENV_API_KEY).map_err(|_| LlmError::Config(format!("{ENV_API_KEY} is not set")))?;
        let flavor = match std::env::var(ENV_FLAVOR).as_deref() {
            Err(_) | Ok("openai") => Flavor::OpenAi,
            Ok("anthropic") => Flavor::Anthropic,
            Ok(other) => return Err(LlmError::Config(format!("unknown {ENV_FLAVOR} `{other}`"))),
        };
        let base_url = std::env::var(ENV_BASE_URL).unwrap_or_else(|_| flavor.default_base().to_string());
        Ok(HttpSettings { base_url, api_key, flavor })
    }
}

#[derive(Debug, Clone)]
pub struct LlmConfig {
    pub provider: Provider,
    pub model_id: String,
    pub fixtures_dir: Option<PathBuf>,
    pub http: Option<HttpSettings>,
    /// Passed through verbatim into the request body (temperature etc.).
    pub params: Map<String, Value>,
}

impl LlmConfig {
    pub fn offline(fixtures_dir: impl Into<PathBuf>) -> Result<Self, LlmError> {
        let dir = fixtures_dir.into();
        if !dir.is_dir() {
            return Err(LlmError::Config(format!("fixtures dir {} does not exist", dir.display())));
        }
        Ok(LlmConfig {
            provider: Provider::Offline,
            model_id: "offline".into(),
            fixtures_dir: Some(dir),
            http: None,
            params: Map::new(),
        })
    }

    pub fn http(model_id: impl Into<String>, settings: HttpSettings) -> Self {
        LlmConfig {
            provider: Provider::Http,
            model_id: model_id.into(),
            fixtures_dir: None,
            http: Some(settings),
            params: Map::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub latency_seconds: f64,
    pub model_id: String,
    pub phase: Phase,
    /// Unix seconds; 0 for offline replies so runs are byte-reproducible.
    pub timestamp: f64,
    #[serde(default)]
    pub usage_missing: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Message {
    pub role: String,
    pub content: String,
}

struct Reply {
    text: String,
    usage: Option<(u64, u64)>,
}

#[derive(Deserialize)]
struct UsageSidecar {
    input_tokens: u64,
    output_tokens: u64,
}

pub fn fixture_path(dir: &Path, domain: &str, phase: Phase, attempt: u32) -> PathBuf {
    dir.join(domain).join(phase.dir_name()).join(format!("{attempt}.md"))
}

fn offline_reply(dir: &Path, domain: &str, phase: Phase, attempt: u32) -> Result<Reply, LlmError> {
    let path = fixture_path(dir, domain, phase, attempt);
    let text = std::fs::read_to_string(&path).map_err(|_| LlmError::FixtureMissing(format!("{domain}/{}/{attempt}", phase.dir_name())))?;
    let usage = std::fs::read_to_string(path.with_extension("usage.json"))
        .ok()
        .and_then(|s| serde_json::from_str::<UsageSidecar>(&s).ok())
        .map(|u| (u.input_tokens, u.output_tokens));
    Ok(Reply { text, usage })
}

fn count(v: &Value, keys: &[&str]) -> Option<u64> {
    keys.iter().find_map(|k| v.get(*k).and_then(Value::as_u64))
}

fn http_reply(
    settings: &HttpSettings,
    model: &str,
    params: &Map<String, Value>,
    messages: &[Message],
    timeout: Option<Duration>,
) -> Result<Reply, LlmError> {
    let base = settings.base_url.trim_end_matches('/');
    let mut body = Map::new();
    body.insert("model".into(), json!(model));
    body.insert("messages".into(), serde_json::to_value(messages).expect("messages serialize"));
    let url = match settings.flavor {
        Flavor::OpenAi => format!("{base}/chat/completions"),
        Flavor::Anthropic => {
            body.insert("max_tokens".into(), json!(8192));
            format!("{base}/messages")
        }
    };
    for (k, v) in params {
        body.insert(k.clone(), v.clone());
    }

    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(timeout)
        .build()
        .into();
    let req = agent.post(&url).header("content-type", "application/json");
    let req = match settings.flavor {
        Flavor::OpenAi => req.header("authorization", &format!("Bearer {}", settings.api_key)),
        Flavor::Anthropic => req.header("x-api-key", &settings.api_key).header("anthropic-version", "2023-06-01"),
    };
    let mut resp = req
        .send_json(Value::Object(body))
        .map_err(|e| LlmError::ProviderError { status: 0, body: e.to_string() })?;
    let status = resp.status().as_u16();
    let text = resp
        .body_mut()
        .read_to_string()
        .map_err(|e| LlmError::ProviderError { status, body: e.to_string() })?;
    if !(200..300).contains(&status) {
        return Err(LlmError::ProviderError { status, body: text });
    }
    let v: Value = serde_json::from_str(&text).map_err(|e| LlmError::ProviderError { status, body: format!("{e}: {text}") })?;
    let content = match settings.flavor {
        Flavor::OpenAi => v.pointer("/choices/0/message/content").and_then(Value::as_str).map(str::to_string),
        Flavor::Anthropic => v.get("content").and_then(Value::as_array).map(|parts| {
            parts.iter().filter_map(|p| p.get("text").and_then(Value::as_str)).collect::<Vec<_>>().join("")
        }),
    }
    .ok_or_else(|| LlmError::ProviderError { status, body: format!("no message content in {text}") })?;
    let usage = v.get("usage").and_then(|u| {
        Some((
            count(u, &["prompt_tokens", "input_tokens", "prompt"])?,
            count(u, &["completion_tokens", "output_tokens", "completion"])?,
        ))
    });
    Ok(Reply { text: content, usage })
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Runs every enabled phase of `bundle` as one conversation and returns the
/// code extracted from the last reply. `attempt` starts at 1 and selects the
/// offline fixture; `timeout` bounds each HTTP call.
///
/// Transcripts of completed phases are returned alongside the error when a
/// later phase fails, so their tokens can still be accounted.
pub fn request_heuristic(
    config: &LlmConfig,
    bundle: &PromptBundle,
    domain: &str,
    attempt: u32,
    timeout: Option<Duration>,
) -> Result<(String, Vec<TranscriptRecord>), (LlmError, Vec<TranscriptRecord>)> {
    let mut messages: Vec<Message> = Vec::new();
    let mut transcripts = Vec::new();
    let mut last = String::new();
    for (phase, prompt) in bundle.phases() {
        messages.push(Message { role: "user".into(), content: prompt.to_string() });
        let start = Instant::now();
        let reply = match config.provider {
            Provider::Offline => {
                let Some(dir) = &config.fixtures_dir else {
                    return Err((LlmError::Config("offline provider needs a fixtures dir".into()), transcripts));
                };
                offline_reply(dir, domain, phase, attempt)
            }
            Provider::Http => {
                let Some(settings) = &config.http else {
                    return Err((LlmError::Config("http provider needs settings".into()), transcripts));
                };
                http_reply(settings, &config.model_id, &config.params, &messages, timeout)
            }
        };
        let reply = match reply {
            Ok(r) => r,
            Err(e) => return Err((e, transcripts)),
        };
        let (latency, timestamp) = match config.provider {
            Provider::Offline => (0.0, 0.0),
            Provider::Http => (start.elapsed().as_secs_f64(), unix_now()),
        };
        transcripts.push(TranscriptRecord {
            input_tokens: reply.usage.map_or(0, |u| u.0),
            output_tokens: reply.usage.map_or(0, |u| u.1),
            latency_seconds: latency,
            model_id: config.model_id.clone(),
            phase,
            timestamp,
            usage_missing: reply.usage.is_none(),
        });
        messages.push(Message { role: "assistant".into(), content: reply.text.clone() });
        last = reply.text;
    }
    match extract_code(&last) {
        Ok(code) => Ok((code, transcripts)),
        Err(e) => Err((e, transcripts)),
    }
}
