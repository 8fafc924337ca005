//! Remote instruction-following backend speaking a generic chat-completion
//! HTTP protocol with temperature 0. Endpoint, model name, and key come from
//! configuration; requests are bounded by a configurable in-flight limit and
//! retried with exponential backoff.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{ChatModel, GatewayError, ModelRequest};

/// Configuration for the remote backend.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemoteConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint: String,
    /// Model name sent with each request.
    pub model: String,
    /// Bearer token; omitted from the request when empty.
    #[serde(default)]
    pub api_key: String,
    /// Maximum concurrent in-flight requests.
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    /// Per-request timeout in seconds.
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    /// Retries for retryable transport failures.
    #[serde(default = "default_max_retries")]
    pub max_retries: usize,
}

fn default_max_in_flight() -> usize {
    4
}

fn default_timeout_secs() -> u64 {
    60
}

fn default_max_retries() -> usize {
    3
}

#[derive(Serialize)]
struct ChatRequestBody<'a> {
    model: &'a str,
    temperature: f32,
    messages: Vec<ChatMessage<'a>>,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'static str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponseBody {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatChoiceMessage,
}

#[derive(Deserialize)]
struct ChatChoiceMessage {
    content: String,
}

/// Counting semaphore bounding in-flight requests.
struct Semaphore {
    permits: Mutex<usize>,
    available: Condvar,
}

impl Semaphore {
    fn new(permits: usize) -> Semaphore {
        Semaphore {
            permits: Mutex::new(permits.max(1)),
            available: Condvar::new(),
        }
    }

    fn acquire(&self) {
        let mut permits = self.permits.lock().unwrap();
        while *permits == 0 {
            permits = self.available.wait(permits).unwrap();
        }
        *permits -= 1;
    }

    fn release(&self) {
        *self.permits.lock().unwrap() += 1;
        self.available.notify_one();
    }
}

/// Chat model backed by an HTTP service.
pub struct RemoteChatModel {
    config: RemoteConfig,
    client: reqwest::blocking::Client,
    slots: Semaphore,
}

impl RemoteChatModel {
    pub fn new(config: RemoteConfig) -> Result<RemoteChatModel, GatewayError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| GatewayError::Transport {
                message: e.to_string(),
                retryable: false,
            })?;
        Ok(RemoteChatModel {
            slots: Semaphore::new(config.max_in_flight),
            config,
            client,
        })
    }

    /// Request body for one prompt; greedy decoding via temperature 0.
    fn body<'a>(&'a self, prompt: &'a str) -> ChatRequestBody<'a> {
        ChatRequestBody {
            model: &self.config.model,
            temperature: 0.0,
            messages: vec![ChatMessage {
                role: "user",
                content: prompt,
            }],
        }
    }

    fn attempt(&self, prompt: &str) -> Result<String, GatewayError> {
        let mut request = self
            .client
            .post(&self.config.endpoint)
            .json(&self.body(prompt));
        if !self.config.api_key.is_empty() {
            request = request.bearer_auth(&self.config.api_key);
        }
        let response = request.send().map_err(|e| GatewayError::Transport {
            message: e.to_string(),
            retryable: true,
        })?;
        let status = response.status();
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(GatewayError::Transport {
                message: format!("status {status}"),
                retryable: true,
            });
        }
        if !status.is_success() {
            return Err(GatewayError::Transport {
                message: format!("status {status}"),
                retryable: false,
            });
        }
        let body: ChatResponseBody = response.json().map_err(|e| GatewayError::Transport {
            message: format!("bad response body: {e}"),
            retryable: false,
        })?;
        body.choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| GatewayError::Transport {
                message: "response contained no choices".to_string(),
                retryable: false,
            })
    }
}

impl ChatModel for RemoteChatModel {
    fn name(&self) -> &str {
        "remote"
    }

    fn complete(&self, request: &ModelRequest) -> Result<String, GatewayError> {
        self.slots.acquire();
        let result = (|| {
            let mut delay = Duration::from_millis(250);
            let mut last = None;
            for attempt in 0..=self.config.max_retries {
                match self.attempt(&request.prompt) {
                    Ok(content) => return Ok(content),
                    Err(GatewayError::Transport { message, retryable }) if retryable => {
                        log::warn!(
                            "remote attempt {attempt} failed ({message}); backing off {delay:?}"
                        );
                        last = Some(GatewayError::Transport { message, retryable });
                        std::thread::sleep(delay);
                        delay = delay.saturating_mul(2);
                    }
                    Err(err) => return Err(err),
                }
            }
            Err(last.unwrap_or(GatewayError::Transport {
                message: "retries exhausted".to_string(),
                retryable: false,
            }))
        })();
        self.slots.release();
        result
    }
}
