//! Minimal markup stripping: tags become whitespace, `script`/`style` bodies
//! are dropped, the first `title` element is captured separately, and a small
//! set of character references is decoded. No readability heuristics.

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HtmlText {
    pub title: String,
    pub text: String,
}

/// Extracts title and visible text. Input without markup passes through with
/// whitespace normalized.
pub fn extract_html(input: &str) -> HtmlText {
    // ASCII lowercasing keeps byte offsets aligned with `input`.
    let lower = input.to_ascii_lowercase();
    let bytes = input.as_bytes();
    let mut body = String::new();
    let mut title: Option<String> = None;
    let mut pos = 0;
    let mut text_start = 0;

    while pos < bytes.len() {
        if bytes[pos] != b'<' || !starts_markup(bytes, pos) {
            pos += 1;
            continue;
        }
        body.push_str(&input[text_start..pos]);

        if lower[pos..].starts_with("<!--") {
            pos = find_from(&lower, pos + 4, "-->").map_or(bytes.len(), |i| i + 3);
        } else {
            let end = find_from(&lower, pos, ">").map_or(bytes.len(), |i| i + 1);
            let name = tag_name(&lower[pos + 1..end]);
            pos = end;
            if matches!(name, "script" | "style" | "title") && !lower[..end].ends_with("/>") {
                let close = format!("</{name}");
                let inner_end = find_from(&lower, pos, &close).unwrap_or(bytes.len());
                if name == "title" && title.is_none() {
                    title = Some(normalize(&decode_entities(&input[pos..inner_end])));
                }
                pos = find_from(&lower, inner_end, ">").map_or(bytes.len(), |i| i + 1);
            }
        }
        body.push(' ');
        text_start = pos;
    }
    if text_start < bytes.len() {
        body.push_str(&input[text_start..]);
    }

    HtmlText {
        title: title.unwrap_or_default(),
        text: normalize(&decode_entities(&body)),
    }
}

fn starts_markup(bytes: &[u8], pos: usize) -> bool {
    bytes
        .get(pos + 1)
        .is_some_and(|&b| b.is_ascii_alphabetic() || matches!(b, b'/' | b'!' | b'?'))
}

fn find_from(haystack: &str, from: usize, needle: &str) -> Option<usize> {
    haystack.get(from..)?.find(needle).map(|i| i + from)
}

// Name of an opening tag; closing tags, doctypes and processing instructions
// yield "".
fn tag_name(tag: &str) -> &str {
    if tag.starts_with(['/', '!', '?']) {
        return "";
    }
    let end = tag
        .find(|c: char| c.is_ascii_whitespace() || c == '/' || c == '>')
        .unwrap_or(tag.len());
    &tag[..end]
}

fn normalize(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn decode_entities(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest
            .find(';')
            .filter(|&semi| semi <= 10)
            .and_then(|semi| decode_one(&rest[1..semi]).map(|c| (c, semi)));
        match decoded {
            Some((c, semi)) => {
                out.push(c);
                rest = &rest[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn decode_one(entity: &str) -> Option<char> {
    match entity {
        "amp" => Some('&'),
        "lt" => Some('<'),
        "gt" => Some('>'),
        "quot" => Some('"'),
        "apos" => Some('\''),
        "nbsp" => Some('\u{a0}'),
        _ => {
            let num = entity.strip_prefix('#')?;
            let code = match num.strip_prefix(['x', 'X']) {
                Some(hex) => u32::from_str_radix(hex, 16).ok()?,
                None => num.parse().ok()?,
            };
            char::from_u32(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn title_and_body() {
        let out = extract_html("<html><title>T</title><body><p>Hello world</p></body></html>");
        assert_eq!(out.title, "T");
        assert_eq!(out.text, "Hello world");
    }

    #[test]
    fn script_and_style_dropped() {
        assert_eq!(extract_html("<body><script>x=1</script>visible</body>").text, "visible");
        let out = extract_html("<STYLE type=\"text/css\">p { color: red }</STYLE><P>a</P><p>b</p>");
        assert_eq!(out.text, "a b");
    }

    #[test]
    fn empty_and_plain_inputs() {
        assert_eq!(extract_html(""), HtmlText::default());
        let out = extract_html("just  text\n with 3 < 4 and a&b");
        assert_eq!(out.title, "");
        assert_eq!(out.text, "just text with 3 < 4 and a&b");
    }

    #[test]
    fn comments_doctype_entities() {
        let out = extract_html(
            "<!DOCTYPE html><!-- hidden <p>no</p> --><title>Tips &amp; Tricks</title><p>caf&#233; &lt;b&gt; &#x41;</p>",
        );
        assert_eq!(out.title, "Tips & Tricks");
        assert_eq!(out.text, "café <b> A");
    }

    #[test]
    fn unterminated_markup() {
        assert_eq!(extract_html("before <script>never closed").text, "before");
        assert_eq!(extract_html("text <p unclosed").text, "text");
    }
}
