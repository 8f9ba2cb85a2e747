use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let p = self.pos();
        Error::syntax(p.line, p.column, message)
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    /// The items of a list whose first element is the symbol `head`.
    pub fn tagged(&self, head: &str) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) if items.first().and_then(SExpr::as_atom) == Some(head) => {
                Some(&items[1..])
            }
            _ => None,
        }
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            SExpr::List(items, _) => items.first().and_then(SExpr::as_atom),
            SExpr::Atom(..) => None,
        }
    }
}

/// Reads every top-level expression in `text`. `;` starts a comment that
/// runs to the end of the line.
pub fn read_all(text: &str) -> Result<Vec<SExpr>> {
    let mut reader = Reader {
        chars: text.chars().collect(),
        at: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        reader.skip_blank();
        if reader.peek().is_none() {
            return Ok(out);
        }
        out.push(reader.read()?);
    }
}

struct Reader {
    chars: Vec<char>,
    at: usize,
    line: usize,
    column: usize,
}

impl Reader {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).copied()
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.at += 1;
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
    }

    fn skip_blank(&mut self) {
        while let Some(c) = self.peek() {
            if c == ';' {
                while !matches!(self.peek(), None | Some('\n')) {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<SExpr> {
        let start = self.pos();
        match self.peek() {
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.peek() {
                        None => {
                            return Err(Error::syntax(start.line, start.column, "unclosed `(`"))
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(SExpr::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(')') => Err(Error::syntax(start.line, start.column, "unexpected `)`")),
            Some(_) => {
                let mut token = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    token.push(c);
                    self.bump();
                }
                Ok(SExpr::Atom(token, start))
            }
            None => Err(Error::syntax(start.line, start.column, "unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let exprs = read_all("; header\n(a (b c)\n  d)").unwrap();
        assert_eq!(exprs.len(), 1);
        let SExpr::List(items, pos) = &exprs[0] else { panic!() };
        assert_eq!(pos, &Pos { line: 2, column: 1 });
        assert_eq!(items[2].pos(), Pos { line: 3, column: 3 });
        assert_eq!(exprs[0].head(), Some("a"));
    }

    #[test]
    fn unbalanced_input_reports_location() {
        match read_all("(a\n (b)").unwrap_err() {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (1, 1)),
            e => panic!("{e}"),
        }
        match read_all("a )").unwrap_err() {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (1, 3)),
            e => panic!("{e}"),
        }
    }
}
