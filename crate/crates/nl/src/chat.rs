use std::collections::VecDeque;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: "system".into(), content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: "user".into(), content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: "assistant".into(), content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChatError {
    #[error("offline mode: the chat endpoint is disabled")]
    Offline,
    #[error("environment variable {0} holding the endpoint token is not set")]
    MissingToken(String),
    #[error("invalid endpoint configuration: {0}")]
    Config(String),
    #[error("endpoint request failed: {0}")]
    Transport(String),
    #[error("unexpected endpoint reply: {0}")]
    Reply(String),
    #[error("scripted endpoint has no replies left")]
    ScriptEnded,
}

/// Where and how to reach a chat-completion endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub base_url: String,
    pub path: String,
    pub model: String,
    /// Name of the environment variable that holds the bearer token.
    pub token_env: String,
    pub temperature: f64,
    pub timeout_secs: u64,
    pub max_retries: u32,
    /// JSON pointer to the reply text in the response body.
    pub reply_pointer: String,
    /// Forces the offline stub; the endpoint is never contacted.
    pub offline: bool,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            base_url: "https://api.openai.com".into(),
            path: "/v1/chat/completions".into(),
            model: "gpt-4".into(),
            token_env: "TRIPSOLVE_CHAT_TOKEN".into(),
            temperature: 0.0,
            timeout_secs: 60,
            max_retries: 2,
            reply_pointer: "/choices/0/message/content".into(),
            offline: false,
        }
    }
}

impl EndpointConfig {
    pub fn offline() -> Self {
        EndpointConfig { offline: true, ..EndpointConfig::default() }
    }

    pub fn check(&self) -> Result<(), ChatError> {
        if !(self.temperature >= 0.0) {
            return Err(ChatError::Config("temperature must be a non-negative number".into()));
        }
        if self.token_env.is_empty() {
            return Err(ChatError::Config("token variable name is empty".into()));
        }
        Ok(())
    }

    pub fn url(&self) -> String {
        format!("{}/{}", self.base_url.trim_end_matches('/'), self.path.trim_start_matches('/'))
    }
}

pub trait ChatTransport: Send {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, ChatError>;
}

/// Blocking client for an OpenAI-style completion endpoint.
pub struct HttpTransport {
    cfg: EndpointConfig,
    token: String,
    agent: ureq::Agent,
}

impl std::fmt::Debug for HttpTransport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpTransport").field("url", &self.cfg.url()).field("model", &self.cfg.model).finish()
    }
}

impl HttpTransport {
    /// Reads the token from the configured environment variable. Fails in
    /// offline mode without touching the network.
    pub fn connect(cfg: &EndpointConfig) -> Result<Self, ChatError> {
        if cfg.offline {
            return Err(ChatError::Offline);
        }
        cfg.check()?;
        let token = std::env::var(&cfg.token_env)
            .ok()
            .filter(|t| !t.trim().is_empty())
            .ok_or_else(|| ChatError::MissingToken(cfg.token_env.clone()))?;
        let agent = ureq::AgentBuilder::new().timeout(Duration::from_secs(cfg.timeout_secs)).build();
        Ok(HttpTransport { cfg: cfg.clone(), token, agent })
    }

    fn send_once(&self, body: &Value) -> Result<String, ChatError> {
        let response = self
            .agent
            .post(&self.cfg.url())
            .set("Authorization", &format!("Bearer {}", self.token))
            .send_json(body.clone())
            .map_err(|e| match e {
                ureq::Error::Status(code, _) => ChatError::Transport(format!("status {code}")),
                ureq::Error::Transport(t) => ChatError::Transport(t.to_string()),
            })?;
        let value: Value = response.into_json().map_err(|e| ChatError::Reply(e.to_string()))?;
        value
            .pointer(&self.cfg.reply_pointer)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ChatError::Reply(format!("no text at {}", self.cfg.reply_pointer)))
    }
}

impl ChatTransport for HttpTransport {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, ChatError> {
        let body = json!({
            "model": self.cfg.model,
            "temperature": self.cfg.temperature,
            "messages": messages,
        });
        let mut last = ChatError::Transport("no attempt made".into());
        for _ in 0..=self.cfg.max_retries {
            match self.send_once(&body) {
                Ok(text) => return Ok(text),
                Err(e @ ChatError::Reply(_)) => return Err(e),
                Err(e) => last = e,
            }
        }
        Err(last)
    }
}

/// Replays canned replies and records every request; for tests and demos.
#[derive(Debug, Clone, Default)]
pub struct ScriptedTransport {
    replies: VecDeque<String>,
    log: Arc<Mutex<Vec<Vec<ChatMessage>>>>,
}

impl ScriptedTransport {
    pub fn new<I, S>(replies: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedTransport { replies: replies.into_iter().map(Into::into).collect(), log: Arc::default() }
    }

    /// Shared view of the requests sent so far.
    pub fn log(&self) -> Arc<Mutex<Vec<Vec<ChatMessage>>>> {
        Arc::clone(&self.log)
    }
}

impl ChatTransport for ScriptedTransport {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, ChatError> {
        self.log.lock().expect("log lock").push(messages.to_vec());
        self.replies.pop_front().ok_or(ChatError::ScriptEnded)
    }
}
