/// Lowercased maximal runs of alphanumeric code points, keeping runs of two
/// or more characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|tok| tok.chars().nth(1).is_some())
        .map(|tok| tok.to_lowercase())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::tokenize;

    #[test]
    fn punctuation_and_case() {
        assert_eq!(tokenize("Cat, cat! dog"), vec!["cat", "cat", "dog"]);
    }

    #[test]
    fn empty() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn single_chars_dropped() {
        assert_eq!(tokenize("a B2 cc"), vec!["b2", "cc"]);
    }

    #[test]
    fn unicode_letters() {
        assert_eq!(tokenize("Über straße—ÉTÉ x"), vec!["über", "straße", "été"]);
    }
}
