//! Recovery of a JSON object from free-form model output.

/// Finds the first `{...}` region whose braces balance, ignoring braces that
/// sit inside double- or single-quoted strings. Returns the byte range.
pub fn find_balanced_object(text: &str) -> Option<std::ops::Range<usize>> {
    let bytes = text.as_bytes();
    let mut start = 0;
    while let Some(off) = text[start..].find('{') {
        let open = start + off;
        if let Some(end) = match_from(bytes, open) {
            return Some(open..end);
        }
        start = open + 1;
    }
    None
}

fn match_from(bytes: &[u8], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut quote: Option<u8> = None;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate().skip(open) {
        if let Some(q) = quote {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == q {
                quote = None;
            }
            continue;
        }
        match b {
            b'"' | b'\'' => quote = Some(b),
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

/// Rewrites a Python-style literal (single-quoted strings, `True`, `False`,
/// `None`) into JSON. Returns `None` when the text needs no rewriting.
pub fn python_literal_to_json(text: &str) -> Option<String> {
    let mut out = String::with_capacity(text.len());
    let mut changed = false;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' => {
                out.push('"');
                let mut escaped = false;
                for d in chars.by_ref() {
                    out.push(d);
                    if escaped {
                        escaped = false;
                    } else if d == '\\' {
                        escaped = true;
                    } else if d == '"' {
                        break;
                    }
                }
            }
            '\'' => {
                changed = true;
                out.push('"');
                let mut escaped = false;
                for d in chars.by_ref() {
                    if escaped {
                        escaped = false;
                        if d == '\'' {
                            out.push('\'');
                        } else {
                            out.push('\\');
                            out.push(d);
                        }
                    } else if d == '\\' {
                        escaped = true;
                    } else if d == '\'' {
                        break;
                    } else if d == '"' {
                        out.push_str("\\\"");
                    } else {
                        out.push(d);
                    }
                }
                out.push('"');
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::from(c);
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        word.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let mapped = match word.as_str() {
                    "True" => "true",
                    "False" => "false",
                    "None" => "null",
                    other => other,
                };
                if mapped != word {
                    changed = true;
                }
                out.push_str(mapped);
            }
            c => out.push(c),
        }
    }
    changed.then_some(out)
}

/// Result of pulling an object out of surrounding text.
#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    /// JSON text of the object.
    pub json: String,
    /// True when prose, template tokens or Python quoting were stripped.
    pub recovered: bool,
}

/// Extracts the first balanced object and normalizes it to JSON.
pub fn extract_object(text: &str) -> Option<Extracted> {
    let range = find_balanced_object(text)?;
    let outside_is_blank =
        text[..range.start].trim().is_empty() && text[range.end..].trim().is_empty();
    let raw = &text[range];
    let (json, requoted) = if serde_json::from_str::<serde_json::Value>(raw).is_ok() {
        (raw.to_string(), false)
    } else {
        match python_literal_to_json(raw) {
            Some(j) => (j, true),
            None => (raw.to_string(), false),
        }
    };
    Some(Extracted {
        json,
        recovered: !outside_is_blank || requoted,
    })
}
