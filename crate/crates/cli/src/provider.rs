use tripsolve::repair::{RuleBasedProvider, SuggestionProvider};
use tripsolve_nl::{ChatError, EndpointConfig, HttpTransport, LlmProvider};

use crate::error::AppError;

/// Which suggestion provider serves repair sessions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum ProviderKind {
    #[default]
    Rules,
    /// The chat endpoint; refused in offline mode.
    Chat,
}

impl ProviderKind {
    pub fn build(self, endpoint: &EndpointConfig) -> Result<Box<dyn SuggestionProvider + Send>, AppError> {
        match self {
            ProviderKind::Rules => Ok(Box::new(RuleBasedProvider::default())),
            ProviderKind::Chat => match HttpTransport::connect(endpoint) {
                Ok(t) => Ok(Box::new(LlmProvider::new(Box::new(t)))),
                Err(e @ (ChatError::Offline | ChatError::MissingToken(_) | ChatError::Config(_))) => {
                    Err(AppError::usage("endpoint-unavailable", e.to_string()))
                }
                Err(e) => Err(AppError::internal(e.to_string())),
            },
        }
    }
}
