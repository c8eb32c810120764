//! Pulling source code out of a model reply.

use crate::llm::LlmError;

fn fence(line: &str) -> Option<(&'static str, &str)> {
    let t = line.trim_start();
    for f in ["```", "~~~"] {
        if let Some(rest) = t.strip_prefix(f) {
            return Some((f, rest.trim_start_matches(f.as_bytes()[0] as char)));
        }
    }
    None
}

/// Contents of the last fenced code block, without the fences and the info
/// string. A trailing block that was never closed runs to the end of the
/// reply.
pub fn extract_code(response: &str) -> Result<String, LlmError> {
    let mut blocks = Vec::new();
    let mut open: Option<(&str, Vec<&str>)> = None;
    for line in response.lines() {
        match (&mut open, fence(line)) {
            (None, Some((f, _))) => open = Some((f, Vec::new())),
            (Some((f, body)), Some((g, rest))) if *f == g && rest.trim().is_empty() => {
                blocks.push(body.join("\n"));
                open = None;
            }
            (Some((_, body)), _) => body.push(line),
            (None, None) => {}
        }
    }
    if let Some((_, body)) = open {
        blocks.push(body.join("\n"));
    }
    blocks.pop().ok_or(LlmError::NoCodeBlock)
}
