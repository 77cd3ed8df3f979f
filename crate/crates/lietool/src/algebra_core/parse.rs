//! Text syntax for bracket trees.
//!
//! ```text
//! TREE  := "X0" | "X1" | "(" TREE "," TREE ")" | NAMED
//! NAMED := "M(" nu ")" | "W(" j "," nu ")" | ... | "D"
//! ```
//! Whitespace is ignored.

use super::named::NamedForm;
use super::tree::BracketTree;
use super::AlgebraError;

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
            pos: 0,
        }
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|(i, _)| *i)
            .unwrap_or_else(|| self.chars.last().map(|(i, c)| i + c.len_utf8()).unwrap_or(0))
    }

    fn err(&self, msg: impl Into<String>) -> AlgebraError {
        AlgebraError::Parse {
            pos: self.offset(),
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn expect(&mut self, c: char) -> Result<(), AlgebraError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.err(format!("expected '{c}', found '{x}'"))),
            None => Err(self.err(format!("expected '{c}', found end of input"))),
        }
    }

    fn number(&mut self) -> Result<u32, AlgebraError> {
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            value = value * 10 + c.to_digit(10).unwrap() as u64;
            if value > u32::MAX as u64 {
                return Err(self.err("index too large"));
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a non-negative integer"));
        }
        Ok(value as u32)
    }

    fn tree(&mut self) -> Result<BracketTree, AlgebraError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let a = self.tree()?;
                self.expect(',')?;
                let b = self.tree()?;
                self.expect(')')?;
                Ok(BracketTree::pair(&a, &b))
            }
            Some('X') => {
                self.pos += 1;
                match self.peek() {
                    Some('0') => {
                        self.pos += 1;
                        Ok(BracketTree::x0())
                    }
                    Some('1') => {
                        self.pos += 1;
                        Ok(BracketTree::x1())
                    }
                    _ => Err(self.err("expected X0 or X1")),
                }
            }
            Some('D') => {
                self.pos += 1;
                Ok(super::named::d())
            }
            Some(c) if "MWPQR".contains(c) => {
                let at = self.offset();
                self.pos += 1;
                let mut family = c.to_string();
                if let Some(s) = self.peek().filter(|x| *x == 's' || *x == 'f') {
                    if c == 'Q' || (c == 'R' && s == 's') {
                        family.push(s);
                        self.pos += 1;
                    }
                }
                self.expect('(')?;
                let mut idx = vec![self.number()?];
                while self.peek() == Some(',') {
                    self.pos += 1;
                    idx.push(self.number()?);
                }
                self.expect(')')?;
                let form = NamedForm::from_parts(&family, &idx).map_err(|e| match e {
                    AlgebraError::InvalidIndex { family, msg } => AlgebraError::InvalidIndex {
                        family,
                        msg: format!("{msg} (at offset {at})"),
                    },
                    other => other,
                })?;
                form.tree()
            }
            Some(c) => Err(self.err(format!("unexpected character '{c}'"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses a tree in the grammar above; named forms expand to their trees.
pub fn parse_tree(text: &str) -> Result<BracketTree, AlgebraError> {
    let mut p = Parser::new(text);
    let t = p.tree()?;
    if p.pos != p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::named;

    #[test]
    fn leaves_and_pairs() {
        let t = parse_tree(" ( X1 , X0 ) ").unwrap();
        assert_eq!(t.to_string(), "(X1,X0)");
        assert_eq!(parse_tree(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn named_shortcuts() {
        assert_eq!(parse_tree("W(1,0)").unwrap().to_string(), "(X1,(X1,X0))");
        assert_eq!(parse_tree("D").unwrap(), named::d());
        assert_eq!(parse_tree("Qs(1,0,2,1)").unwrap(), named::qs(1, 0, 2, 1).unwrap());
        assert_eq!(parse_tree("Qf(1,2,0)").unwrap(), named::qf(1, 2, 0).unwrap());
        assert_eq!(parse_tree("Rs(1,1,1,0,2)").unwrap(), named::rs(1, 1, 1, 0, 2).unwrap());
        assert_eq!(parse_tree("(X1,M(2))").unwrap().to_string(), "(X1,((X1,X0),X0))");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_tree("(X1,X2)") {
            Err(AlgebraError::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_tree("W(0,0)"), Err(AlgebraError::InvalidIndex { .. })));
        assert!(matches!(parse_tree("(X1,X0"), Err(AlgebraError::Parse { .. })));
        assert!(matches!(parse_tree("X1 X0"), Err(AlgebraError::Parse { .. })));
    }
}
