//! Left multiplication of a reduced tree pair by the letters C, C^-1, D,
//! D^2, D^-1 in amortized constant time.
//!
//! Multiplying by C on the left rotates the three subtrees exposed at the
//! top of the range tree; multiplying by D rotates the four subtrees one
//! level down. Degenerate shapes are first padded with a double caret so the
//! required subtrees exist. Outputs are always reduced.

use crate::element::DoubleTree;
use crate::error::{Error, Result};
use crate::tree::CaretTree;

/// The letter alphabet of the word pipeline.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Letter {
    C,
    Cinv,
    D,
    D2,
    Dinv,
}

impl Letter {
    pub const ALL: [Letter; 5] = [Letter::C, Letter::Cinv, Letter::D, Letter::D2, Letter::Dinv];

    /// The group element the letter stands for.
    pub fn element(self) -> DoubleTree {
        let c = DoubleTree::generator_c();
        let d = DoubleTree::generator_d();
        match self {
            Letter::C => c,
            Letter::Cinv => c.inverse(),
            Letter::D => d,
            Letter::D2 => DoubleTree::compose(&d, &d),
            Letter::Dinv => d.inverse(),
        }
    }

    pub fn inverse(self) -> Letter {
        match self {
            Letter::C => Letter::Cinv,
            Letter::Cinv => Letter::C,
            Letter::D => Letter::Dinv,
            Letter::D2 => Letter::D2,
            Letter::Dinv => Letter::D,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Letter::C => "C",
            Letter::Cinv => "C^-1",
            Letter::D => "D",
            Letter::D2 => "D^2",
            Letter::Dinv => "D^-1",
        }
    }

    pub fn parse(token: &str) -> Result<Letter> {
        match token {
            "C" | "c" => Ok(Letter::C),
            "C^-1" | "C-1" | "Cinv" | "c^-1" => Ok(Letter::Cinv),
            "D" | "d" => Ok(Letter::D),
            "D^2" | "D2" | "d^2" => Ok(Letter::D2),
            "D^-1" | "D-1" | "Dinv" | "d^-1" => Ok(Letter::Dinv),
            _ => Err(Error::Parameter(format!("unknown letter {token:?}"))),
        }
    }
}

/// C . x by the top-level subtree rotation.
pub fn left_mul_c(x: &DoubleTree) -> DoubleTree {
    // x is the identity: C . x = C.
    if x.is_identity() {
        return DoubleTree::generator_c();
    }
    let l = x.leaf_count();
    let (left, right) = x.range_tree().children().expect("non-identity");
    if right.is_leaf() {
        // The range tree exposes only two subtrees at the root; split the
        // right leaf (and its domain partner) so three are available.
        let j = (l - 1 + l - x.rotation()) % l;
        return left_mul_c(&x.insert_double_caret(j));
    }
    // Non-degenerate: range root holds I, (II, III); C sends them to II, (III, I).
    let (sub_ii, sub_iii) = right.children().expect("caret");
    let i0 = left.leaf_count();
    let range = CaretTree::caret(&sub_ii, &CaretTree::caret(&sub_iii, &left));
    DoubleTree::new(range, x.domain_tree().clone(), (x.rotation() + l - i0) % l)
        .expect("shape is preserved")
        .reduce()
}

/// D . x by the second-level subtree rotation.
pub fn left_mul_d(x: &DoubleTree) -> DoubleTree {
    // x is the identity: D . x = D.
    if x.is_identity() {
        return DoubleTree::generator_d();
    }
    let l = x.leaf_count();
    if l == 2 {
        // Both subtrees of the range root are leaves; the only reduced such
        // element is D^2, and D . D^2 = D^3 = D^-1.
        debug_assert_eq!(x.rotation(), 1);
        return DoubleTree::generator_d().inverse();
    }
    let (left, right) = x.range_tree().children().expect("non-identity");
    if left.is_leaf() {
        let j = (l - x.rotation()) % l;
        return left_mul_d(&x.insert_double_caret(j));
    }
    if right.is_leaf() {
        let j = (l - 1 + l - x.rotation()) % l;
        return left_mul_d(&x.insert_double_caret(j));
    }
    // Non-degenerate: range root holds (I, II), (III, IV); D sends them to
    // (II, III), (IV, I).
    let (sub_i, sub_ii) = left.children().expect("caret");
    let (sub_iii, sub_iv) = right.children().expect("caret");
    let i0 = sub_i.leaf_count();
    let range = CaretTree::caret(
        &CaretTree::caret(&sub_ii, &sub_iii),
        &CaretTree::caret(&sub_iv, &sub_i),
    );
    DoubleTree::new(range, x.domain_tree().clone(), (x.rotation() + l - i0) % l)
        .expect("shape is preserved")
        .reduce()
}

/// Left product letter . x, reduced.
pub fn left_mul(letter: Letter, x: &DoubleTree) -> DoubleTree {
    match letter {
        Letter::C => left_mul_c(x),
        Letter::Cinv => left_mul_c(&left_mul_c(x)),
        Letter::D => left_mul_d(x),
        Letter::D2 => left_mul_d(&left_mul_d(x)),
        Letter::Dinv => left_mul_d(&left_mul_d(&left_mul_d(x))),
    }
}

/// Product of a word of letters: word_element([t1, .., tn]) = t1 t2 ... tn.
pub fn word_element(word: &[Letter]) -> DoubleTree {
    let mut acc = DoubleTree::identity();
    for &letter in word.iter().rev() {
        acc = left_mul(letter, &acc);
    }
    acc
}

/// Parses a whitespace-separated word such as "C D^2 C^-1 D".
pub fn parse_word(s: &str) -> Result<Vec<Letter>> {
    s.split_whitespace().map(Letter::parse).collect()
}

/// The six two-letter products C d with d in {D, D^2, D^-1} and C^-1 d, in
/// the fixed expansion order of the word pipeline.
pub const EXPANSION_PAIRS: [(Letter, Letter); 6] = [
    (Letter::C, Letter::D),
    (Letter::C, Letter::D2),
    (Letter::C, Letter::Dinv),
    (Letter::Cinv, Letter::D),
    (Letter::Cinv, Letter::D2),
    (Letter::Cinv, Letter::Dinv),
];

/// The three products C d used to build the half files.
pub const HALF_EXPANSION: [(Letter, Letter); 3] = [
    (Letter::C, Letter::D),
    (Letter::C, Letter::D2),
    (Letter::C, Letter::Dinv),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_cases() {
        let (e, c, d) = DoubleTree::generators();
        assert_eq!(left_mul_c(&e), c);
        assert_eq!(left_mul_d(&e), d);
        let d2 = DoubleTree::compose(&d, &d);
        assert_eq!(left_mul_d(&d2), d.inverse());
    }

    #[test]
    fn c_cubed_is_identity_pointwise() {
        let x = word_element(&[Letter::C, Letter::D, Letter::Cinv, Letter::D2]);
        let y = left_mul_c(&left_mul_c(&left_mul_c(&x)));
        assert_eq!(y, x);
    }

    #[test]
    fn d_fourth_is_identity_pointwise() {
        let x = word_element(&[Letter::D, Letter::C, Letter::D, Letter::C]);
        let y = left_mul_d(&left_mul_d(&left_mul_d(&left_mul_d(&x))));
        assert_eq!(y, x);
    }

    #[test]
    fn letters_agree_with_generic_composition() {
        // all 5-letter words over the alphabet, checked against compose
        let mut elements = vec![DoubleTree::identity()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for x in &elements {
                for letter in Letter::ALL {
                    next.push(left_mul(letter, x));
                }
            }
            elements = next;
        }
        for x in elements.iter().take(200) {
            for letter in Letter::ALL {
                let fast = left_mul(letter, x);
                let slow = DoubleTree::compose(&letter.element(), x);
                assert_eq!(fast, slow, "letter {letter:?} on {x:?}");
                assert!(fast.is_reduced());
            }
        }
    }

    #[test]
    fn inverse_letter_cancels() {
        let x = word_element(&[Letter::D, Letter::C, Letter::D2]);
        for letter in Letter::ALL {
            assert_eq!(left_mul(letter.inverse(), &left_mul(letter, &x)), x);
        }
    }

    #[test]
    fn word_parsing() {
        let w = parse_word("C D^2 C^-1 D^-1").unwrap();
        assert_eq!(w, vec![Letter::C, Letter::D2, Letter::Cinv, Letter::Dinv]);
        assert!(parse_word("C X").is_err());
    }
}
