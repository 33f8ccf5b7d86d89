//! Porter's suffix-stripping stemmer.
//!
//! Follows the structure of Martin Porter's reference C implementation,
//! including its two published departures (`-bli` → `-ble`, `-logi` →
//! `-log`). Step 1c additionally requires the letter before a final `y` to
//! be a consonant, so `guy` and `boy` keep their `y` while `happy` still
//! becomes `happi`.
//!
//! Only words made entirely of ASCII lowercase letters are stemmed; anything
//! else (digits, non-Latin script) is returned unchanged.

use alloc::string::String;
use alloc::vec::Vec;

/// Suffix rules keyed by the penultimate letter: `(letter, [(suffix, replacement)])`.
type RuleTable = &'static [(u8, &'static [(&'static [u8], &'static [u8])])];

/// Stem a single lowercase word.
pub fn stem(word: &str) -> String {
    if word.len() <= 2 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return String::from(word);
    }
    let mut s = Stemmer {
        b: word.as_bytes().to_vec(),
        k: word.len() - 1,
        j: 0,
    };
    s.step1ab();
    if s.k > 0 {
        s.step1c();
        s.step2();
        s.step3();
        s.step4();
        s.step5();
    }
    s.b.truncate(s.k + 1);
    // input was ASCII and every replacement is ASCII
    String::from_utf8(s.b).unwrap_or_default()
}

struct Stemmer {
    b: Vec<u8>,
    /// index of the last byte of the current word
    k: usize,
    /// end of the stem once a suffix has matched
    j: usize,
}

impl Stemmer {
    fn cons(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.cons(i - 1),
            _ => true,
        }
    }

    /// Number of VC sequences in `b[0..=j]`.
    fn m(&self) -> usize {
        let j = self.j;
        let mut n = 0;
        let mut i = 0;
        loop {
            if i > j {
                return n;
            }
            if !self.cons(i) {
                break;
            }
            i += 1;
        }
        i += 1;
        loop {
            loop {
                if i > j {
                    return n;
                }
                if self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i > j {
                    return n;
                }
                if !self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..=self.j).any(|i| !self.cons(i))
    }

    fn double_cons(&self, i: usize) -> bool {
        i >= 1 && self.b[i] == self.b[i - 1] && self.cons(i)
    }

    /// consonant-vowel-consonant ending at `i`, last consonant not w, x or y
    fn cvc(&self, i: usize) -> bool {
        if i < 2 || !self.cons(i) || self.cons(i - 1) || !self.cons(i - 2) {
            return false;
        }
        !matches!(self.b[i], b'w' | b'x' | b'y')
    }

    fn ends(&mut self, suffix: &[u8]) -> bool {
        let len = suffix.len();
        if len > self.k + 1 {
            return false;
        }
        if &self.b[self.k + 1 - len..=self.k] != suffix {
            return false;
        }
        // wraps for a suffix spanning the whole word; every caller checks m()
        // or indexes j only when a stem remains
        self.j = (self.k + 1 - len).wrapping_sub(1);
        true
    }

    fn set_to(&mut self, replacement: &[u8]) {
        let start = self.j.wrapping_add(1);
        self.b.truncate(start);
        self.b.extend_from_slice(replacement);
        self.k = start + replacement.len() - 1;
    }

    fn replace_if_measured(&mut self, replacement: &[u8]) {
        if self.m() > 0 {
            self.set_to(replacement);
        }
    }

    fn stem_nonempty(&self) -> bool {
        self.j != usize::MAX
    }

    fn step1ab(&mut self) {
        if self.b[self.k] == b's' {
            if self.ends(b"sses") {
                self.k -= 2;
            } else if self.ends(b"ies") {
                self.set_to(b"i");
            } else if self.b[self.k - 1] != b's' {
                self.k -= 1;
            }
        }
        if self.ends(b"eed") {
            if self.stem_nonempty() && self.m() > 0 {
                self.k -= 1;
            }
        } else if (self.ends(b"ed") || self.ends(b"ing")) && self.stem_nonempty() && self.vowel_in_stem() {
            self.k = self.j;
            if self.ends(b"at") {
                self.set_to(b"ate");
            } else if self.ends(b"bl") {
                self.set_to(b"ble");
            } else if self.ends(b"iz") {
                self.set_to(b"ize");
            } else if self.double_cons(self.k) {
                self.k -= 1;
                if matches!(self.b[self.k], b'l' | b's' | b'z') {
                    self.k += 1;
                }
            } else {
                self.j = self.k;
                if self.m() == 1 && self.cvc(self.k) {
                    self.set_to(b"e");
                }
            }
        }
    }

    fn step1c(&mut self) {
        if self.ends(b"y") && self.stem_nonempty() && self.vowel_in_stem() && self.cons(self.k - 1) {
            self.b[self.k] = b'i';
        }
    }

    fn step2(&mut self) {
        const RULES: RuleTable = &[
            (b'a', &[(b"ational", b"ate"), (b"tional", b"tion")]),
            (b'c', &[(b"enci", b"ence"), (b"anci", b"ance")]),
            (b'e', &[(b"izer", b"ize")]),
            (
                b'l',
                &[
                    (b"bli", b"ble"),
                    (b"alli", b"al"),
                    (b"entli", b"ent"),
                    (b"eli", b"e"),
                    (b"ousli", b"ous"),
                ],
            ),
            (b'o', &[(b"ization", b"ize"), (b"ation", b"ate"), (b"ator", b"ate")]),
            (
                b's',
                &[
                    (b"alism", b"al"),
                    (b"iveness", b"ive"),
                    (b"fulness", b"ful"),
                    (b"ousness", b"ous"),
                ],
            ),
            (b't', &[(b"aliti", b"al"), (b"iviti", b"ive"), (b"biliti", b"ble")]),
            (b'g', &[(b"logi", b"log")]),
        ];
        self.apply_rules(self.b[self.k - 1], RULES);
    }

    fn step3(&mut self) {
        const RULES: RuleTable = &[
            (b'e', &[(b"icate", b"ic"), (b"ative", b""), (b"alize", b"al")]),
            (b'i', &[(b"iciti", b"ic")]),
            (b'l', &[(b"ical", b"ic"), (b"ful", b"")]),
            (b's', &[(b"ness", b"")]),
        ];
        self.apply_rules(self.b[self.k], RULES);
    }

    /// The first matching suffix in the selected group is final, whether or
    /// not its measure condition holds.
    fn apply_rules(&mut self, selector: u8, rules: RuleTable) {
        let Some((_, group)) = rules.iter().find(|(c, _)| *c == selector) else {
            return;
        };
        for (suffix, replacement) in group.iter() {
            if self.ends(suffix) {
                if self.stem_nonempty() {
                    self.replace_if_measured(replacement);
                }
                return;
            }
        }
    }

    fn step4(&mut self) {
        let matched = match self.b[self.k - 1] {
            b'a' => self.ends(b"al"),
            b'c' => self.ends(b"ance") || self.ends(b"ence"),
            b'e' => self.ends(b"er"),
            b'i' => self.ends(b"ic"),
            b'l' => self.ends(b"able") || self.ends(b"ible"),
            b'n' => self.ends(b"ant") || self.ends(b"ement") || self.ends(b"ment") || self.ends(b"ent"),
            b'o' => {
                (self.ends(b"ion") && self.stem_nonempty() && matches!(self.b[self.j], b's' | b't'))
                    || self.ends(b"ou")
            }
            b's' => self.ends(b"ism"),
            b't' => self.ends(b"ate") || self.ends(b"iti"),
            b'u' => self.ends(b"ous"),
            b'v' => self.ends(b"ive"),
            b'z' => self.ends(b"ize"),
            _ => false,
        };
        if matched && self.stem_nonempty() && self.m() > 1 {
            self.k = self.j;
        }
    }

    fn step5(&mut self) {
        self.j = self.k;
        if self.b[self.k] == b'e' {
            let a = self.m();
            if a > 1 || (a == 1 && !self.cvc(self.k - 1)) {
                self.k -= 1;
            }
        }
        if self.b[self.k] == b'l' && self.double_cons(self.k) {
            self.j = self.k;
            if self.m() > 1 {
                self.k -= 1;
            }
        }
    }
}
