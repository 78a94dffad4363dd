//! Just enough HTML scanning to find `<script>` elements.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptElement {
    External {
        src: String,
        line: usize,
    },
    Inline {
        text: String,
        /// Line on which the script body starts.
        line: usize,
    },
}

fn line_at(html: &str, offset: usize) -> usize {
    html[..offset].matches('\n').count() + 1
}

fn find_ci(haystack: &str, needle: &str, from: usize) -> Option<usize> {
    let lower = haystack[from..].to_ascii_lowercase();
    lower.find(needle).map(|i| i + from)
}

/// Script elements in document order, skipping HTML comments.
pub fn script_elements(html: &str) -> Vec<ScriptElement> {
    let mut out = Vec::new();
    let mut pos = 0;
    while let Some(open) = find_ci(html, "<script", pos) {
        if let Some(comment) = html[pos..open].find("<!--").map(|i| i + pos) {
            pos = html[comment..].find("-->").map_or(html.len(), |i| comment + i + 3);
            continue;
        }
        let after_name = open + "<script".len();
        if html[after_name..]
            .chars()
            .next()
            .is_some_and(|c| !(c.is_whitespace() || c == '>' || c == '/'))
        {
            pos = after_name;
            continue;
        }
        let Some(tag_end) = html[after_name..].find('>').map(|i| after_name + i) else {
            break;
        };
        let attrs = &html[after_name..tag_end];
        let body_start = tag_end + 1;
        let close = find_ci(html, "</script", body_start).unwrap_or(html.len());
        match attribute(attrs, "src") {
            Some(src) => out.push(ScriptElement::External {
                src,
                line: line_at(html, open),
            }),
            None => out.push(ScriptElement::Inline {
                text: html[body_start..close].to_string(),
                line: line_at(html, body_start),
            }),
        }
        pos = close;
        if pos >= html.len() {
            break;
        }
        pos += 1;
    }
    out
}

/// Value of attribute `name` in a tag's attribute text.
fn attribute(attrs: &str, name: &str) -> Option<String> {
    let bytes = attrs.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'/') {
            i += 1;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'=' {
            i += 1;
        }
        let key = &attrs[start..i];
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let mut value = None;
        if i < bytes.len() && bytes[i] == b'=' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'"' || bytes[i] == b'\'') {
                let quote = bytes[i];
                let vstart = i + 1;
                let vend = attrs[vstart..]
                    .bytes()
                    .position(|b| b == quote)
                    .map_or(attrs.len(), |p| vstart + p);
                value = Some(attrs[vstart..vend].to_string());
                i = (vend + 1).min(attrs.len());
            } else {
                let vstart = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                value = Some(attrs[vstart..i].to_string());
            }
        }
        if key.eq_ignore_ascii_case(name) {
            return Some(value.unwrap_or_default());
        }
        if start == i {
            i += 1;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_external_and_inline_scripts() {
        let html = "<html>\n<head>\n<SCRIPT src=\"https://cdn.example/p5.js\"></SCRIPT>\n<script>\nlet a = 1;\n</script>\n<script defer src='sketch.js'></script>";
        assert_eq!(
            script_elements(html),
            vec![
                ScriptElement::External {
                    src: "https://cdn.example/p5.js".into(),
                    line: 3
                },
                ScriptElement::Inline {
                    text: "\nlet a = 1;\n".into(),
                    line: 4
                },
                ScriptElement::External {
                    src: "sketch.js".into(),
                    line: 7
                },
            ]
        );
    }

    #[test]
    fn commented_out_scripts_are_ignored() {
        let html = "<!-- <script src=\"https://evil.example/x.js\"></script> -->\n<script src=a.js></script>";
        assert_eq!(
            script_elements(html),
            vec![ScriptElement::External {
                src: "a.js".into(),
                line: 2
            }]
        );
    }

    #[test]
    fn similar_tag_names_are_not_scripts() {
        assert!(script_elements("<scripted>x</scripted>").is_empty());
    }
}
