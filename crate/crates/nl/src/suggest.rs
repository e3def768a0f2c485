use serde::Serialize;
use tripsolve::query::Modification;
use tripsolve::repair::{apply_in_database, InfoAction, Probe, ProviderError, SuggestContext, Suggestion, SuggestionProvider};

use crate::chat::{ChatError, ChatMessage, ChatTransport};
use crate::{REMINDER_PROMPT, SUGGEST_PROMPT};

const ACTION_NAMES: [&str; 13] = [
    "FlightCheck",
    "FlightSearchFrom",
    "FlightSearch",
    "DrivingCheck",
    "DrivingSearchFrom",
    "DrivingSearch",
    "AirlineSearch",
    "AttractionSearch",
    "CategorySearch",
    "CuisineSearch",
    "AccommodationTypesIn",
    "AccommodationSearch",
    "TypeSearch",
];

/// One parsed reply of the suggestion dialogue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "step", content = "value", rename_all = "kebab-case")]
pub enum Step {
    Lookup(InfoAction),
    /// A lookup name with arguments that do not parse.
    BadLookup(String),
    Analyze(String),
    Suggest(Vec<Modification>),
}

/// Earliest `Name[...]` in `reply` with a known name, brackets balanced.
fn first_call(reply: &str) -> Option<(&str, &str)> {
    let mut best: Option<(usize, &str)> = None;
    for name in ACTION_NAMES.iter().copied().chain(["Analyze", "Suggest"]) {
        let needle = format!("{name}[");
        let mut from = 0;
        while let Some(i) = reply[from..].find(&needle) {
            let at = from + i;
            let boundary = reply[..at].chars().next_back().is_none_or(|c| !c.is_alphanumeric());
            if boundary {
                if best.is_none_or(|(b, n)| at < b || (at == b && name.len() > n.len())) {
                    best = Some((at, name));
                }
                break;
            }
            from = at + needle.len();
        }
    }
    let (at, name) = best?;
    let open = at + name.len();
    let mut depth = 0usize;
    for (i, c) in reply[open..].char_indices() {
        match c {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth == 0 {
                    return Some((name, &reply[open + 1..open + i]));
                }
            }
            _ => {}
        }
    }
    None
}

/// Splits `a; b` and `a, change ...` into single edits.
fn split_edits(inner: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for part in inner.split(';') {
        let lower = part.to_ascii_lowercase();
        let mut cuts = vec![0];
        for verb in [", raise ", ", change ", ", remove "] {
            let mut from = 0;
            while let Some(i) = lower[from..].find(verb) {
                cuts.push(from + i);
                from += i + verb.len();
            }
        }
        cuts.sort_unstable();
        cuts.push(part.len());
        for w in cuts.windows(2) {
            let piece = part[w[0]..w[1]].trim_start_matches(',').trim();
            if !piece.is_empty() {
                out.push(piece);
            }
        }
    }
    out
}

pub fn parse_step(reply: &str) -> Result<Step, String> {
    let (name, inner) = first_call(reply).ok_or_else(|| "no step found in reply".to_string())?;
    match name {
        "Analyze" => Ok(Step::Analyze(inner.trim().to_string())),
        "Suggest" => {
            let edits = split_edits(inner);
            if edits.is_empty() {
                return Err("empty suggestion".into());
            }
            edits.into_iter().map(Modification::parse).collect::<Result<Vec<_>, _>>().map(Step::Suggest)
        }
        _ => match format!("{name}[{inner}]").parse::<InfoAction>() {
            Ok(a) => Ok(Step::Lookup(a)),
            Err(e) => Ok(Step::BadLookup(e)),
        },
    }
}

/// Suggestion provider that runs the lookup/analyze/suggest dialogue with a
/// chat endpoint. Every proposed edit is parsed by the suggestion grammar
/// and checked for admissibility before it leaves the provider.
pub struct LlmProvider {
    transport: Box<dyn ChatTransport>,
    /// Messages of the most recent dialogue.
    pub transcript: Vec<ChatMessage>,
}

impl LlmProvider {
    pub fn new(transport: Box<dyn ChatTransport>) -> Self {
        LlmProvider { transport, transcript: Vec::new() }
    }

    fn opening(ctx: &SuggestContext<'_>) -> String {
        let mut text = format!("Request:\n{}\n\nWhy it has no itinerary:\n", ctx.query.to_json_string());
        match ctx.reasons {
            Some(reasons) if !reasons.is_empty() => {
                for r in reasons {
                    text.push_str(&format!("- {}\n", r.text));
                }
            }
            Some(_) => text.push_str("- unknown\n"),
            None => text.push_str("- not provided; use lookups to find out\n"),
        }
        if !ctx.protected.is_empty() {
            let names: Vec<&str> = ctx.protected.iter().map(|f| f.as_str()).collect();
            text.push_str(&format!("\nProtected fields: {}\n", names.join(", ")));
        }
        if !ctx.rejected.is_empty() {
            text.push_str("\nDo not propose again:\n");
            for m in ctx.rejected {
                text.push_str(&format!("- {m}\n"));
            }
        }
        if !ctx.feedback.is_empty() {
            text.push_str("\nTraveller feedback:\n");
            for f in ctx.feedback {
                text.push_str(&format!("- {f}\n"));
            }
        }
        text.push_str(&format!("\nYou have at most {} steps. Give your first step.", ctx.action_cap));
        text
    }

    /// Why `mods`, applied in order, cannot be offered; `None` when they can.
    fn refusal(ctx: &SuggestContext<'_>, mods: &[Modification]) -> Option<String> {
        let mut q = ctx.query.clone();
        for m in mods {
            if ctx.rejected.contains(m) {
                return Some(format!("\"{m}\" was already refused or tried"));
            }
            if ctx.protected.contains(&m.field()) {
                return Some(format!("the traveller will not change {}", m.field()));
            }
            match apply_in_database(ctx.db, &q, m) {
                Ok(next) if next == q => return Some(format!("\"{m}\" changes nothing")),
                Ok(next) => q = next,
                Err(e) => return Some(e.to_string()),
            }
        }
        None
    }

    fn dialogue(&mut self, ctx: &SuggestContext<'_>, batch: bool) -> Result<Vec<Suggestion>, ProviderError> {
        let mut probe = Probe::new(ctx.db, ctx.action_cap);
        let mut notes: Vec<String> = Vec::new();
        self.transcript = vec![ChatMessage::system(SUGGEST_PROMPT), ChatMessage::user(Self::opening(ctx))];
        let mut reminded = false;
        let mut steps = 0;
        while steps < ctx.action_cap {
            let reply = self.transport.complete(&self.transcript).map_err(|e| match e {
                ChatError::ScriptEnded => ProviderError::Exhausted(e.to_string()),
                e => ProviderError::Failure(e.to_string()),
            })?;
            self.transcript.push(ChatMessage::assistant(&reply));
            let step = match parse_step(&reply) {
                Ok(s) => s,
                Err(e) if !reminded => {
                    reminded = true;
                    self.transcript.push(ChatMessage::user(format!("{REMINDER_PROMPT}\n({e})")));
                    continue;
                }
                Err(e) => return Err(ProviderError::Failure(format!("unreadable endpoint reply: {e}"))),
            };
            reminded = false;
            steps += 1;
            let answer = match step {
                Step::Lookup(action) => match probe.ask(action.clone()) {
                    Some(result) => format!("{action} returned: {}", result.summary()),
                    None => {
                        let why = probe
                            .records
                            .iter()
                            .rev()
                            .find(|r| r.action == action)
                            .and_then(|r| r.error.clone())
                            .unwrap_or_else(|| "the lookup limit is reached".into());
                        format!("{action} failed: {why}")
                    }
                },
                Step::BadLookup(e) => format!("That lookup is malformed: {e}"),
                Step::Analyze(text) => {
                    notes.push(text);
                    "Noted. Next step.".into()
                }
                Step::Suggest(mods) => {
                    let mods: Vec<Modification> = if batch { mods } else { mods.into_iter().take(1).collect() };
                    match Self::refusal(ctx, &mods) {
                        None => {
                            let rationale = if notes.is_empty() {
                                "proposed by the chat endpoint".to_string()
                            } else {
                                notes.join(" ")
                            };
                            let mut out: Vec<Suggestion> = mods
                                .into_iter()
                                .map(|modification| Suggestion {
                                    modification,
                                    rationale: rationale.clone(),
                                    actions: Vec::new(),
                                })
                                .collect();
                            out[0].actions = probe.records;
                            return Ok(out);
                        }
                        Some(why) => format!("That edit is not allowed: {why}. Propose a different one."),
                    }
                }
            };
            self.transcript.push(ChatMessage::user(answer));
        }
        Err(ProviderError::Failure(format!("no acceptable suggestion within {} steps", ctx.action_cap)))
    }
}

impl SuggestionProvider for LlmProvider {
    fn name(&self) -> &str {
        "chat-endpoint"
    }

    fn suggest(&mut self, ctx: &SuggestContext<'_>) -> Result<Suggestion, ProviderError> {
        self.dialogue(ctx, false).map(|mut v| v.remove(0))
    }

    fn suggest_batch(&mut self, ctx: &SuggestContext<'_>) -> Result<Vec<Suggestion>, ProviderError> {
        self.dialogue(ctx, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_parse() {
        assert_eq!(
            parse_step("Thought done. Suggest[raise budget to 5000]"),
            Ok(Step::Suggest(vec![Modification::RaiseBudget(5000.into())]))
        );
        assert!(matches!(parse_step("CategorySearch[Park]"), Ok(Step::Lookup(InfoAction::CategorySearch { .. }))));
        assert_eq!(parse_step("Analyze[need [more] info]"), Ok(Step::Analyze("need [more] info".into())));
        assert!(matches!(parse_step("FlightCheck[A, B]"), Ok(Step::BadLookup(_))));
        assert!(parse_step("hello").is_err());
    }

    #[test]
    fn multi_edit_suggestions_split() {
        let Ok(Step::Suggest(m)) = parse_step("Suggest[raise budget to 2000, change destination cities to be Chicago]")
        else {
            panic!("not a suggestion")
        };
        assert_eq!(m.len(), 2);
        let Ok(Step::Suggest(m)) = parse_step("Suggest[change airlines to be United, Air France, or JetBlue]") else {
            panic!("not a suggestion")
        };
        assert_eq!(m.len(), 1);
    }
}
