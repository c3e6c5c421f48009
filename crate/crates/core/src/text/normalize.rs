fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Splits on anything that is not a letter or apostrophe, lowercases, and
/// trims apostrophes from token edges. Non-Latin letters pass through.
pub fn normalize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphabetic() || is_apostrophe(c)))
        .filter_map(|raw| {
            let trimmed = raw.trim_matches(is_apostrophe);
            if trimmed.is_empty() {
                return None;
            }
            let token: String = trimmed
                .chars()
                .map(|c| if is_apostrophe(c) { '\'' } else { c })
                .flat_map(char::to_lowercase)
                .collect();
            Some(token)
        })
        .collect()
}
