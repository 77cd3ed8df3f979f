//! Words of the free monoid over {X0, X1}.

use std::cmp::Ordering;
use std::fmt;

use super::tree::Generator;

pub const MAX_WORD_LEN: usize = 64;

/// Bit i set means the i-th letter (from the left) is X1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word {
    bits: u64,
    len: u8,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn letter(g: Generator) -> Self {
        Word {
            bits: (g == Generator::X1) as u64,
            len: 1,
        }
    }

    pub fn from_letters(letters: &[Generator]) -> Self {
        assert!(letters.len() <= MAX_WORD_LEN, "word too long");
        let mut w = Word::empty();
        for &g in letters {
            w = w.push(g);
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n1(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn n0(&self) -> usize {
        self.len() - self.n1()
    }

    /// (n1, n0)
    pub fn bidegree(&self) -> (usize, usize) {
        (self.n1(), self.n0())
    }

    pub fn get(&self, i: usize) -> Generator {
        debug_assert!(i < self.len());
        if (self.bits >> i) & 1 == 1 {
            Generator::X1
        } else {
            Generator::X0
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Generator> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn push(self, g: Generator) -> Self {
        assert!(self.len() < MAX_WORD_LEN, "word too long");
        let bit = ((g == Generator::X1) as u64) << self.len;
        Word {
            bits: self.bits | bit,
            len: self.len + 1,
        }
    }

    pub fn concat(self, other: Word) -> Self {
        assert!(self.len() + other.len() <= MAX_WORD_LEN, "word too long");
        let shifted = if self.len() == 64 { 0 } else { other.bits << self.len };
        Word {
            bits: self.bits | shifted,
            len: self.len + other.len,
        }
    }

    /// All words with the given bidegree (n1 ones among n1+n0 letters), in increasing order.
    pub fn all_with_bidegree(n1: usize, n0: usize) -> Vec<Word> {
        let len = n1 + n0;
        assert!(len <= MAX_WORD_LEN);
        let mut out = Vec::new();
        fn rec(pos: usize, len: usize, left: usize, acc: Word, out: &mut Vec<Word>) {
            if pos == len {
                if left == 0 {
                    out.push(acc);
                }
                return;
            }
            if len - pos > left {
                rec(pos + 1, len, left, acc.push(Generator::X0), out);
            }
            if left > 0 {
                rec(pos + 1, len, left - 1, acc.push(Generator::X1), out);
            }
        }
        rec(0, len, n1, Word::empty(), &mut out);
        out
    }
}

impl Ord for Word {
    /// Shorter words first, then lexicographic with X0 < X1.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for i in 0..self.len() {
                let o = self.get(i).cmp(&other.get(i));
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        for (i, g) in self.letters().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}
