use pdgal_core::sysio::ParseError;
use serde_json::{json, Value};

pub const AFFIRMATIVE: u8 = 0;
pub const NEGATIVE: u8 = 1;
pub const USAGE: u8 = 2;

/// A finished command: plain text, the same content as JSON, and the exit
/// code.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub code: u8,
}

impl Report {
    pub fn new(command: &str, text: String, mut json: Value, affirmative: bool) -> Self {
        json["command"] = json!(command);
        json["exit_code"] = json!(if affirmative { AFFIRMATIVE } else { NEGATIVE });
        Report { text, json, code: if affirmative { AFFIRMATIVE } else { NEGATIVE } }
    }

    pub fn render(&self, as_json: bool) -> Option<String> {
        Some(if as_json {
            format!("{}\n", serde_json::to_string_pretty(&self.json).expect("serializable"))
        } else {
            let mut t = self.text.clone();
            if !t.ends_with('\n') {
                t.push('\n');
            }
            t
        })
    }
}

/// Usage, input and parse failures (exit 2).
pub struct Failure {
    kind: &'static str,
    message: String,
    location: Option<Box<(String, ParseError)>>,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { kind: "usage", message: message.into(), location: None }
    }

    pub fn io(path: &str, err: std::io::Error) -> Self {
        Failure { kind: "io", message: format!("{path}: {err}"), location: None }
    }

    pub fn parse(path: &str, err: ParseError) -> Self {
        Failure { kind: "parse", message: format!("{path}: {err}"), location: Some(Box::new((path.to_string(), err))) }
    }

    pub fn internal(message: String) -> Self {
        Failure { kind: "internal", message: format!("internal error: {message}"), location: None }
    }

    pub fn render_stderr(&self) -> String {
        format!("error: {}", self.message)
    }

    pub fn render_stdout(&self, as_json: bool) -> Option<String> {
        if !as_json {
            return None;
        }
        let mut err = json!({ "kind": self.kind, "message": self.message });
        if let Some(loc) = &self.location {
            let (path, e) = &**loc;
            err["path"] = json!(path);
            err["parse_kind"] = json!(e.kind.as_str());
            err["offset"] = json!(e.offset);
            err["line"] = json!(e.line);
            err["column"] = json!(e.column);
            err["expected"] = json!(e.expected);
        }
        let doc = json!({ "error": err, "exit_code": USAGE });
        Some(format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable")))
    }
}
