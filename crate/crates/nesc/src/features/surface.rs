//! Sparse surface-form indicators: a 36-wide block per token.
//!
//! Layout: 32 character-class indicators for tokens made up entirely of one
//! special character, then is-hashtag, is-handle, first-char-capitalized,
//! and all-capitalized. Nonzero entries are always 0.1. A fully capitalized
//! token does not also set the first-capital indicator.

use super::pos::INDICATOR;

/// The 32 special characters that get a dedicated indicator when a token
/// consists entirely of (repetitions of) that character.
pub const SPECIAL_CHARS: [char; 32] = [
    '%', '/', '.', '!', '?', ',', ';', ':', '\'', '"', '(', ')', '[', ']', '{', '}', '@', '#',
    '$', '&', '*', '+', '-', '=', '<', '>', '|', '\\', '~', '^', '_', '`',
];

/// Width of the surface-feature block.
pub const SURFACE_DIM: usize = SPECIAL_CHARS.len() + 4;

const IDX_HASHTAG: usize = 32;
const IDX_HANDLE: usize = 33;
const IDX_FIRST_CAP: usize = 34;
const IDX_ALL_CAPS: usize = 35;

/// Computes the 36 surface indicators for a non-empty token surface.
pub fn surface_features(surface: &str) -> [f64; SURFACE_DIM] {
    debug_assert!(!surface.is_empty(), "token surface must be non-empty");
    let mut v = [0.0; SURFACE_DIM];

    let mut chars = surface.chars();
    let first = chars.next().expect("non-empty surface");
    if let Some(k) = char_class(surface, first) {
        v[k] = INDICATOR;
        return v;
    }

    let is_hashtag = first == '#' && surface.len() > 1;
    let is_handle = first == '@' && surface.len() > 1;
    if is_hashtag {
        v[IDX_HASHTAG] = INDICATOR;
    }
    if is_handle {
        v[IDX_HANDLE] = INDICATOR;
    }

    // Capitalization is judged on the text behind the marker for hashtags
    // and handles, so #Win still counts as first-capitalized.
    let body = if is_hashtag || is_handle {
        &surface[first.len_utf8()..]
    } else {
        surface
    };
    let letters: Vec<char> = body.chars().filter(|c| c.is_alphabetic()).collect();
    if !letters.is_empty() && letters.iter().all(|c| c.is_uppercase()) {
        v[IDX_ALL_CAPS] = INDICATOR;
    } else if body.chars().next().is_some_and(|c| c.is_uppercase()) {
        v[IDX_FIRST_CAP] = INDICATOR;
    }
    v
}

/// Index of the character-class indicator when every char of `surface`
/// equals `first` and `first` is one of the special characters.
fn char_class(surface: &str, first: char) -> Option<usize> {
    if surface.chars().all(|c| c == first) {
        SPECIAL_CHARS.iter().position(|&c| c == first)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nonzero(v: &[f64; SURFACE_DIM]) -> Vec<usize> {
        v.iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    #[test]
    fn special_char_list_has_32_entries() {
        assert_eq!(SPECIAL_CHARS.len(), 32);
        assert_eq!(SURFACE_DIM, 36);
    }

    #[test]
    fn all_caps_suppresses_first_cap() {
        let v = surface_features("NASA");
        assert_eq!(v[IDX_ALL_CAPS], INDICATOR);
        assert_eq!(v[IDX_FIRST_CAP], 0.0);
    }

    #[test]
    fn first_cap_only() {
        let v = surface_features("Paris");
        assert_eq!(v[IDX_FIRST_CAP], INDICATOR);
        assert_eq!(v[IDX_ALL_CAPS], 0.0);
    }

    #[test]
    fn lowercase_hashtag_sets_hashtag_only() {
        let v = surface_features("#win");
        assert_eq!(nonzero(&v), vec![IDX_HASHTAG]);
    }

    #[test]
    fn capitalized_hashtag_keeps_both_indicators() {
        let v = surface_features("#Win");
        assert_eq!(nonzero(&v), vec![IDX_HASHTAG, IDX_FIRST_CAP]);
    }

    #[test]
    fn handle_sets_handle_indicator() {
        let v = surface_features("@jack");
        assert_eq!(nonzero(&v), vec![IDX_HANDLE]);
    }

    #[test]
    fn pure_punctuation_gets_its_class_only() {
        let v = surface_features("!");
        assert_eq!(nonzero(&v), vec![3]);
        let v = surface_features("!!!");
        assert_eq!(nonzero(&v), vec![3]);
        let v = surface_features("%");
        assert_eq!(nonzero(&v), vec![0]);
    }

    #[test]
    fn bare_marker_is_a_char_class_not_a_tag() {
        let v = surface_features("#");
        assert_eq!(nonzero(&v), vec![17]);
        let v = surface_features("@");
        assert_eq!(nonzero(&v), vec![16]);
    }

    #[test]
    fn plain_word_has_no_indicators() {
        let v = surface_features("hello");
        assert!(nonzero(&v).is_empty());
    }

    #[test]
    fn nonzero_entries_are_exactly_point_one() {
        for s in ["NASA", "Paris", "#Win", "@Jack", "...", "w0rd!"] {
            for x in surface_features(s) {
                assert!(x == 0.0 || x == INDICATOR);
            }
        }
    }

    #[test]
    fn caps_indicators_never_coexist() {
        for s in ["A", "AB", "Ab", "aB", "#A", "#Ab", "@XY", "x", "É", "ÉÀ"] {
            let v = surface_features(s);
            assert!(
                v[IDX_FIRST_CAP] == 0.0 || v[IDX_ALL_CAPS] == 0.0,
                "both caps flags set for {s:?}"
            );
        }
    }
}
