use serde::Serialize;
use tripsolve::query::{parse_query_value, Query};

use crate::chat::{ChatError, ChatMessage, ChatTransport, EndpointConfig, HttpTransport};
use crate::stub::stub_translate;
use crate::TRANSLATE_PROMPT;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    Valid,
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NlTranslation {
    pub input: String,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "query_json")]
    pub query: Option<Query>,
    /// Messages exchanged with the endpoint; empty for the offline stub.
    pub transcript: Vec<ChatMessage>,
    pub verdict: Verdict,
}

fn query_json<S: serde::Serializer>(q: &Option<Query>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => q.to_json().serialize(s),
        None => s.serialize_none(),
    }
}

impl NlTranslation {
    fn failed(input: &str, transcript: Vec<ChatMessage>, reason: impl Into<String>) -> Self {
        NlTranslation {
            input: input.to_string(),
            query: None,
            transcript,
            verdict: Verdict::Failed { reason: reason.into() },
        }
    }

    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }
}

/// Offline translation through the pattern grammar.
pub fn translate_offline(text: &str) -> NlTranslation {
    if text.trim().is_empty() {
        return NlTranslation::failed(text, Vec::new(), "empty request");
    }
    match stub_translate(text) {
        Ok(q) => NlTranslation { input: text.to_string(), query: Some(q), transcript: Vec::new(), verdict: Verdict::Valid },
        Err(e) => NlTranslation::failed(text, Vec::new(), e),
    }
}

/// The outermost `{...}` span of `reply`.
fn json_object(reply: &str) -> Option<&str> {
    let start = reply.find('{')?;
    let end = reply.rfind('}')?;
    (end > start).then(|| &reply[start..=end])
}

/// Endpoint translation over any transport. A reply that is not a valid
/// query fails; it is never patched up.
pub fn translate_with(transport: &mut dyn ChatTransport, text: &str) -> Result<NlTranslation, ChatError> {
    if text.trim().is_empty() {
        return Ok(NlTranslation::failed(text, Vec::new(), "empty request"));
    }
    let mut transcript = vec![ChatMessage::system(TRANSLATE_PROMPT), ChatMessage::user(text)];
    let reply = transport.complete(&transcript)?;
    transcript.push(ChatMessage::assistant(&reply));
    let Some(body) = json_object(&reply) else {
        return Ok(NlTranslation::failed(text, transcript, "reply holds no JSON object"));
    };
    let value: serde_json::Value = match serde_json::from_str(body) {
        Ok(v) => v,
        Err(e) => return Ok(NlTranslation::failed(text, transcript, format!("reply is not JSON: {e}"))),
    };
    Ok(match parse_query_value(&value) {
        Ok(q) => NlTranslation { input: text.to_string(), query: Some(q), transcript, verdict: Verdict::Valid },
        Err(e) => NlTranslation::failed(text, transcript, e.to_string()),
    })
}

/// Stub in offline mode, endpoint otherwise.
pub fn translate(text: &str, cfg: &EndpointConfig) -> Result<NlTranslation, ChatError> {
    if cfg.offline {
        return Ok(translate_offline(text));
    }
    let mut transport = HttpTransport::connect(cfg)?;
    translate_with(&mut transport, text)
}
