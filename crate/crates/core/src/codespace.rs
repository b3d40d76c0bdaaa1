//! Finite words and eventually-periodic infinite words over a finite alphabet.
//!
//! Infinite words are only ever represented as `preperiod · period · period · …`.
//! Every [`AddressSpec`] is kept in canonical form: the period is primitive
//! (not a proper power) and the preperiod is as short as possible, so two
//! specs denote the same infinite word iff they are structurally equal.
//!
//! Text syntax: a word is its letters joined by `.` (`"0.1.1"`, empty string
//! for the empty word); an address is `"pre|per"` (`"1|0"` is `1000…`,
//! `"|01"` is `0101…`).

use std::fmt;

use crate::error::{Error, Result};

pub type Letter = u32;

/// Default cap on the number of words materialized by [`enumerate_words`].
pub const DEFAULT_WORD_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, letter: Letter) -> bool {
        (letter as usize) < self.size
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.size as Letter
    }

    fn check(&self, letter: Letter) -> Result<()> {
        if self.contains(letter) {
            Ok(())
        } else {
            Err(Error::LetterOutOfRange { letter, size: self.size })
        }
    }

    fn check_same(&self, other: &Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch { left: self.size, right: other.size })
        }
    }
}

/// A finite word. Length zero is the empty word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(alphabet: Alphabet, letters: Vec<Letter>) -> Result<Self> {
        for &l in &letters {
            alphabet.check(l)?;
        }
        Ok(Self { alphabet, letters })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Self { alphabet, letters: Vec::new() }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        concat(self, other)
    }

    /// Parses the `.`-joined integer syntax.
    pub fn parse(s: &str, alphabet: Alphabet) -> Result<Word> {
        Self::parse_with(s, alphabet, |tok| tok.parse::<Letter>().ok())
    }

    /// Parses `.`-joined tokens, resolving each token to a letter with `resolve`.
    pub fn parse_with<F>(s: &str, alphabet: Alphabet, resolve: F) -> Result<Word>
    where
        F: Fn(&str) -> Option<Letter>,
    {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty(alphabet));
        }
        let letters = s
            .split('.')
            .map(|tok| {
                let tok = tok.trim();
                resolve(tok).ok_or_else(|| Error::Parse(format!("unknown letter `{tok}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(alphabet, letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

pub fn concat(u: &Word, v: &Word) -> Result<Word> {
    u.alphabet.check_same(&v.alphabet)?;
    let mut letters = Vec::with_capacity(u.len() + v.len());
    letters.extend_from_slice(&u.letters);
    letters.extend_from_slice(&v.letters);
    Ok(Word { alphabet: u.alphabet, letters })
}

/// An eventually-periodic infinite word, always held in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AddressSpec {
    preperiod: Word,
    period: Word,
}

impl AddressSpec {
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        preperiod.alphabet.check_same(&period.alphabet)?;
        if period.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Self::canonical(preperiod.alphabet, preperiod.letters, period.letters))
    }

    fn canonical(alphabet: Alphabet, mut pre: Vec<Letter>, mut per: Vec<Letter>) -> Self {
        let n = per.len();
        if let Some(p) = (1..n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| per[i] == per[i - p])) {
            per.truncate(p);
        }
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        Self { preperiod: Word { alphabet, letters: pre }, period: Word { alphabet, letters: per } }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.period.alphabet
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    /// The letter at 0-based position `k`.
    pub fn letter(&self, k: usize) -> Letter {
        let pre = self.preperiod.letters();
        if k < pre.len() {
            pre[k]
        } else {
            let per = self.period.letters();
            per[(k - pre.len()) % per.len()]
        }
    }

    /// `[ω]_m`: the first `m` letters.
    pub fn prefix(&self, m: usize) -> Word {
        Word { alphabet: self.alphabet(), letters: (0..m).map(|k| self.letter(k)).collect() }
    }

    /// `τ_i(ω) = iω`.
    pub fn shift_insert(&self, letter: Letter) -> Result<AddressSpec> {
        self.alphabet().check(letter)?;
        let mut pre = Vec::with_capacity(self.preperiod.len() + 1);
        pre.push(letter);
        pre.extend_from_slice(self.preperiod.letters());
        Ok(Self::canonical(self.alphabet(), pre, self.period.letters.clone()))
    }

    /// `u·ω` for a finite word `u`.
    pub fn prepend(&self, word: &Word) -> Result<AddressSpec> {
        self.alphabet().check_same(&word.alphabet)?;
        let mut pre = word.letters.clone();
        pre.extend_from_slice(self.preperiod.letters());
        Ok(Self::canonical(self.alphabet(), pre, self.period.letters.clone()))
    }

    /// The left shift `σ(ω) = ω₂ω₃…`.
    pub fn shift(&self) -> AddressSpec {
        let pre = self.preperiod.letters();
        if pre.is_empty() {
            let mut per = self.period.letters.clone();
            per.rotate_left(1);
            Self::canonical(self.alphabet(), Vec::new(), per)
        } else {
            Self::canonical(self.alphabet(), pre[1..].to_vec(), self.period.letters.clone())
        }
    }

    /// Every distinct word in the forward shift orbit, starting with `self`.
    pub fn shift_orbit(&self) -> Vec<AddressSpec> {
        let n = self.preperiod.len() + self.period.len();
        let mut out = Vec::with_capacity(n);
        let mut cur = self.clone();
        for _ in 0..n {
            out.push(cur.clone());
            cur = cur.shift();
        }
        out
    }

    /// Length after which two specs that still agree are equal.
    fn agreement_horizon(&self, other: &AddressSpec) -> usize {
        let (p, q) = (self.period.len(), other.period.len());
        self.preperiod.len().max(other.preperiod.len()) + p / gcd(p, q) * q
    }

    /// 1-based index of the first differing letter, `None` if equal.
    pub fn first_difference(&self, other: &AddressSpec) -> Result<Option<usize>> {
        self.alphabet().check_same(&other.alphabet())?;
        if self == other {
            return Ok(None);
        }
        let horizon = self.agreement_horizon(other);
        Ok((0..horizon).find(|&k| self.letter(k) != other.letter(k)).map(|k| k + 1))
    }

    pub fn distance(&self, other: &AddressSpec) -> Result<f64> {
        code_distance(self, other)
    }

    pub fn parse(s: &str, alphabet: Alphabet) -> Result<AddressSpec> {
        Self::parse_with(s, alphabet, |tok| tok.parse::<Letter>().ok())
    }

    pub fn parse_with<F>(s: &str, alphabet: Alphabet, resolve: F) -> Result<AddressSpec>
    where
        F: Fn(&str) -> Option<Letter>,
    {
        let (pre, per) =
            s.split_once('|').ok_or_else(|| Error::Parse(format!("address `{s}` lacks the `|` separator")))?;
        let pre = Word::parse_with(pre, alphabet, &resolve)?;
        let per = Word::parse_with(per, alphabet, &resolve)?;
        if per.is_empty() {
            return Err(Error::Parse(format!("address `{s}` has an empty period")));
        }
        AddressSpec::new(pre, per)
    }
}

impl fmt::Display for AddressSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.preperiod, self.period)
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact `2^(-k)`; saturates at the smallest subnormal past `k = 1074`.
pub fn dyadic(k: usize) -> f64 {
    if k <= 1022 {
        f64::from_bits(((1023 - k) as u64) << 52)
    } else if k <= 1074 {
        f64::from_bits(1u64 << (1074 - k))
    } else {
        f64::from_bits(1)
    }
}

pub fn prefix(a: &AddressSpec, m: usize) -> Word {
    a.prefix(m)
}

/// `ω̇`: the periodic word repeating `w`.
pub fn periodicize(w: &Word) -> Result<AddressSpec> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    AddressSpec::new(Word::empty(w.alphabet), w.clone())
}

pub fn shift_insert(letter: Letter, a: &AddressSpec) -> Result<AddressSpec> {
    a.shift_insert(letter)
}

/// `d_Λ(a, b) = 2^(-k)` with `k` the first differing position, 0 when equal.
pub fn code_distance(a: &AddressSpec, b: &AddressSpec) -> Result<f64> {
    Ok(match a.first_difference(b)? {
        None => 0.0,
        Some(k) => dyadic(k),
    })
}

/// All `|I|^n` words of length `n`, in lexicographic order.
pub fn enumerate_words(alphabet: Alphabet, n: usize, cap: usize) -> Result<Vec<Word>> {
    let count = word_count(alphabet, n);
    if count > cap as u128 {
        return Err(Error::CapExceeded { requested: count, cap });
    }
    let k = alphabet.size() as Letter;
    let mut out = Vec::with_capacity(count as usize);
    let mut cur = vec![0 as Letter; n];
    loop {
        out.push(Word { alphabet, letters: cur.clone() });
        // odometer increment from the right
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < k {
                break;
            }
            cur[pos] = 0;
        }
    }
}

/// All non-empty words of length at most `max_len`, shortest first.
pub fn enumerate_words_up_to(alphabet: Alphabet, max_len: usize, cap: usize) -> Result<Vec<Word>> {
    let total: u128 = (1..=max_len).map(|n| word_count(alphabet, n)).fold(0u128, u128::saturating_add);
    if total > cap as u128 {
        return Err(Error::CapExceeded { requested: total, cap });
    }
    let mut out = Vec::with_capacity(total as usize);
    for n in 1..=max_len {
        out.extend(enumerate_words(alphabet, n, cap)?);
    }
    Ok(out)
}

/// `|I|^n`, saturating.
pub fn word_count(alphabet: Alphabet, n: usize) -> u128 {
    let base = alphabet.size() as u128;
    (0..n).fold(1u128, |acc, _| acc.saturating_mul(base))
}
