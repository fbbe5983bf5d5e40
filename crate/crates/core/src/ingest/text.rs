use unicode_normalization::UnicodeNormalization;

/// Canonical form used to compare slide text: NFC, whitespace runs collapsed
/// to one space, trimmed. Case is preserved.
pub fn normalize_slide_text(text: &str) -> String {
    let nfc: String = text.nfc().collect();
    nfc.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn collapses_whitespace() {
        assert_eq!(normalize_slide_text("  A  B\n C "), "A B C");
        assert_eq!(normalize_slide_text(""), "");
        assert_eq!(normalize_slide_text("\t\n "), "");
    }

    #[test]
    fn line_breaks_do_not_distinguish_slides() {
        let a = "Self-attention\nQueries, keys\nand values";
        let b = "Self-attention Queries,\n  keys and\r\nvalues\n";
        assert_eq!(normalize_slide_text(a), normalize_slide_text(b));
    }

    #[test]
    fn composes_to_nfc_and_keeps_case() {
        // "e" + combining acute vs precomposed
        assert_eq!(normalize_slide_text("Caf\u{65}\u{301}"), "Caf\u{e9}");
        assert_ne!(normalize_slide_text("Title"), normalize_slide_text("title"));
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC{0,64}") {
            let once = normalize_slide_text(&s);
            prop_assert_eq!(normalize_slide_text(&once), once);
        }
    }
}
