//! The change-script format.
//!
//! A script is plain UTF-8 text, one item per line. The first meaningful
//! line declares the vertex universe, `n <int>`; after that, `+ u v` and
//! `- u v` toggle edges while the query forms ask isomorphism questions at
//! the three connectivity levels:
//!
//! ```text
//! ? u v                    are the components of u and v isomorphic?
//! ?c a a*                  component isomorphism sending a to a*?
//! ?b a b a* b*             block isomorphism sending (a, b) to (a*, b*)?
//! ?t a b c d a* b* c* d*   triconnected-component isomorphism on 4-tuples?
//! ```
//!
//! Everything after a `#` is a comment. Both sides of every query live in
//! the one declared universe; "two graphs" is a matter of which components
//! the endpoints select.

use planiso::VertexId;
use std::fmt;
use thiserror::Error;

/// One parsed script line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Item {
    Insert(VertexId, VertexId),
    Delete(VertexId, VertexId),
    /// `? u v`
    Components(VertexId, VertexId),
    /// `?c a a*`
    Connected(VertexId, VertexId),
    /// `?b a b a* b*`
    Biconnected([VertexId; 4]),
    /// `?t a b c d a* b* c* d*`
    Triconnected([VertexId; 8]),
}

impl Item {
    /// The leading token of the line this item came from.
    pub fn kind(&self) -> &'static str {
        match self {
            Item::Insert(..) => "+",
            Item::Delete(..) => "-",
            Item::Components(..) => "?",
            Item::Connected(..) => "?c",
            Item::Biconnected(..) => "?b",
            Item::Triconnected(..) => "?t",
        }
    }

    fn args(&self) -> Vec<VertexId> {
        match *self {
            Item::Insert(u, v) | Item::Delete(u, v) => vec![u, v],
            Item::Components(u, v) | Item::Connected(u, v) => vec![u, v],
            Item::Biconnected(a) => a.to_vec(),
            Item::Triconnected(a) => a.to_vec(),
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())?;
        for v in self.args() {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

/// A whole script: the universe size and the items in source order, each
/// tagged with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub n: usize,
    pub items: Vec<(usize, Item)>,
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for (_, item) in &self.items {
            writeln!(f, "{item}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ScriptError {
    /// The line is not one of the grammar forms: unknown head token, wrong
    /// argument count, a non-integer argument, a loop edge, or a misplaced
    /// or repeated universe header.
    #[error("line {0}: malformed script line")]
    ParseError(usize),
    /// A structurally fine line names a vertex outside the universe.
    #[error("line {0}: vertex id outside the declared universe")]
    RangeError(usize),
}

/// Parses a script, either completely or with the number of the first bad
/// line. Comments and blank lines carry no items but still count for line
/// numbering, so errors point at the source text as the user wrote it.
pub fn parse_script(text: &str) -> Result<Script, ScriptError> {
    let mut n: Option<usize> = None;
    let mut items = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().expect("a non-blank line has a head token");
        let args: Result<Vec<usize>, _> = toks.map(str::parse).collect();
        let args = args.map_err(|_| ScriptError::ParseError(lineno))?;
        if head == "n" {
            if n.is_some() || args.len() != 1 {
                return Err(ScriptError::ParseError(lineno));
            }
            n = Some(args[0]);
            continue;
        }
        let n = n.ok_or(ScriptError::ParseError(lineno))?;
        let item = match (head, args.as_slice()) {
            ("+", &[u, v]) if u != v => Item::Insert(u, v),
            ("-", &[u, v]) if u != v => Item::Delete(u, v),
            ("?", &[u, v]) => Item::Components(u, v),
            ("?c", &[a, a2]) => Item::Connected(a, a2),
            ("?b", &[a, b, a2, b2]) => Item::Biconnected([a, b, a2, b2]),
            ("?t", xs) if xs.len() == 8 => {
                Item::Triconnected(xs.try_into().expect("length checked"))
            }
            _ => return Err(ScriptError::ParseError(lineno)),
        };
        if args.iter().any(|&v| v >= n) {
            return Err(ScriptError::RangeError(lineno));
        }
        items.push((lineno, item));
    }
    match n {
        Some(n) => Ok(Script { n, items }),
        None => Err(ScriptError::ParseError(1)),
    }
}
