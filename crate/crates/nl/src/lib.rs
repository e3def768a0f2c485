//! Natural-language front end: request translation and a chat-endpoint
//! suggestion provider, with an offline stub for both directions of use.

mod chat;
mod stub;
mod suggest;
mod translate;

pub use chat::{ChatError, ChatMessage, ChatTransport, EndpointConfig, HttpTransport, ScriptedTransport};
pub use stub::stub_translate;
pub use suggest::{parse_step, LlmProvider, Step};
pub use translate::{translate, translate_offline, translate_with, NlTranslation, Verdict};

/// Version tag of the prompt assets below.
pub const PROMPT_VERSION: &str = "1";
pub const TRANSLATE_PROMPT: &str = include_str!("../prompts/translate.txt");
pub const SUGGEST_PROMPT: &str = include_str!("../prompts/suggest.txt");
pub const REMINDER_PROMPT: &str = include_str!("../prompts/reminder.txt");
