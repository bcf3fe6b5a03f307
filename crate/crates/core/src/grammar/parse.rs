//! Token list to [`PlanProgram`].

use thiserror::Error;

use super::{PlanProgram, QuantBox, Segment, Statement, Token, MAX_BIN};

/// A parse failure. Every variant carries the offending token offset; errors
/// at end of input use the input length.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("token {offset}: unbalanced bracket, expected {expected}")]
    UnbalancedBracket {
        offset: usize,
        expected: &'static str,
    },
    #[error("token {offset}: box has {found} coordinates, expected 6")]
    WrongCoordCount { offset: usize, found: usize },
    #[error("token {offset}: coordinate bin {bin} is outside [0, {MAX_BIN}]")]
    CoordOutOfRange { offset: usize, bin: u32 },
    #[error("token {offset}: box minimum exceeds maximum")]
    InvertedBox { offset: usize },
    #[error("token {offset}: edit statements may not nest")]
    NestedEdit { offset: usize },
    #[error("token {offset}: edit statement is missing its box")]
    MissingBox { offset: usize },
    #[error("token {offset}: unexpected token")]
    TrailingGarbage { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match *self {
            ParseError::UnbalancedBracket { offset, .. }
            | ParseError::WrongCoordCount { offset, .. }
            | ParseError::CoordOutOfRange { offset, .. }
            | ParseError::InvertedBox { offset }
            | ParseError::NestedEdit { offset }
            | ParseError::MissingBox { offset }
            | ParseError::TrailingGarbage { offset } => offset,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum EditKind {
    Add,
    Delete,
    Modify,
}

impl EditKind {
    fn opened_by(tok: &Token) -> Option<Self> {
        match tok {
            Token::AddStart => Some(EditKind::Add),
            Token::DelStart => Some(EditKind::Delete),
            Token::ModStart => Some(EditKind::Modify),
            _ => None,
        }
    }

    fn closer(self) -> Token {
        match self {
            EditKind::Add => Token::AddEnd,
            EditKind::Delete => Token::DelEnd,
            EditKind::Modify => Token::ModEnd,
        }
    }

    fn closer_surface(self) -> &'static str {
        match self {
            EditKind::Add => "<adde>",
            EditKind::Delete => "<dele>",
            EditKind::Modify => "<mode>",
        }
    }
}

fn opener_for_closer(tok: &Token) -> Option<&'static str> {
    match tok {
        Token::AddEnd => Some("<adds>"),
        Token::DelEnd => Some("<dels>"),
        Token::ModEnd => Some("<mods>"),
        Token::BoxEnd => Some("<boxs>"),
        _ => None,
    }
}

enum Item {
    Box(QuantBox),
    Word(String),
    Edit(Statement),
}

struct Parser<'a> {
    tokens: &'a [Token],
}

impl<'a> Parser<'a> {
    /// Parses the box opening at `start`; returns it with the offset after `<boxe>`.
    fn parse_box(&self, start: usize) -> Result<(QuantBox, usize), ParseError> {
        let mut i = start + 1;
        let mut bins = Vec::with_capacity(6);
        while let Some(Token::Coord(bin)) = self.tokens.get(i) {
            if *bin > MAX_BIN {
                return Err(ParseError::CoordOutOfRange {
                    offset: i,
                    bin: *bin,
                });
            }
            bins.push(*bin);
            i += 1;
        }
        match self.tokens.get(i) {
            Some(Token::BoxEnd) => {
                let arr: [u32; 6] =
                    bins.as_slice()
                        .try_into()
                        .map_err(|_| ParseError::WrongCoordCount {
                            offset: i,
                            found: bins.len(),
                        })?;
                let b =
                    QuantBox::new(arr).map_err(|_| ParseError::InvertedBox { offset: start })?;
                Ok((b, i + 1))
            }
            _ => Err(ParseError::UnbalancedBracket {
                offset: i,
                expected: "<boxe>",
            }),
        }
    }

    fn parse_edit(&self, start: usize, kind: EditKind) -> Result<(Statement, usize), ParseError> {
        let closer = kind.closer();
        let unclosed = |offset| ParseError::UnbalancedBracket {
            offset,
            expected: kind.closer_surface(),
        };
        let mut i = start + 1;
        let mut boxes = Vec::new();
        let mut words: Vec<&str> = Vec::new();

        if kind != EditKind::Delete {
            match self.tokens.get(i) {
                None => return Err(unclosed(i)),
                Some(Token::BoxStart) => {
                    let (b, next) = self.parse_box(i)?;
                    boxes.push(b);
                    i = next;
                }
                Some(t) if EditKind::opened_by(t).is_some() => {
                    return Err(ParseError::NestedEdit { offset: i })
                }
                Some(_) => return Err(ParseError::MissingBox { offset: i }),
            }
        }

        loop {
            let Some(tok) = self.tokens.get(i) else {
                return Err(unclosed(i));
            };
            if *tok == closer {
                if boxes.is_empty() {
                    return Err(ParseError::MissingBox { offset: i });
                }
                i += 1;
                break;
            }
            match tok {
                t if EditKind::opened_by(t).is_some() => {
                    return Err(ParseError::NestedEdit { offset: i })
                }
                Token::AddEnd | Token::DelEnd | Token::ModEnd => return Err(unclosed(i)),
                Token::BoxStart if kind == EditKind::Delete => {
                    let (b, next) = self.parse_box(i)?;
                    boxes.push(b);
                    i = next;
                }
                Token::Word(w) if kind != EditKind::Delete => {
                    words.push(w);
                    i += 1;
                }
                _ => return Err(ParseError::TrailingGarbage { offset: i }),
            }
        }

        let text = words.join(" ");
        let stmt = match kind {
            EditKind::Add => Statement::EditAdd(boxes[0], text),
            EditKind::Modify => Statement::EditModify(boxes[0], text),
            EditKind::Delete => Statement::EditDelete(boxes),
        };
        Ok((stmt, i))
    }

    fn parse_item(&self, i: usize) -> Result<(Item, usize), ParseError> {
        let tok = &self.tokens[i];
        if let Some(kind) = EditKind::opened_by(tok) {
            let (st, next) = self.parse_edit(i, kind)?;
            return Ok((Item::Edit(st), next));
        }
        match tok {
            Token::BoxStart => {
                let (b, next) = self.parse_box(i)?;
                Ok((Item::Box(b), next))
            }
            Token::Word(w) => Ok((Item::Word(w.clone()), i + 1)),
            Token::Coord(_) => Err(ParseError::TrailingGarbage { offset: i }),
            closer => Err(ParseError::UnbalancedBracket {
                offset: i,
                expected: opener_for_closer(closer).unwrap_or("an opening token"),
            }),
        }
    }

    /// Where lenient parsing resumes after a failed item starting at `start`.
    fn resync(&self, start: usize) -> usize {
        let opens = |t: &Token| matches!(t, Token::BoxStart) || EditKind::opened_by(t).is_some();
        let target = match &self.tokens[start] {
            Token::BoxStart => Some(Token::BoxEnd),
            t => EditKind::opened_by(t).map(EditKind::closer),
        };
        let Some(target) = target else {
            return start + 1;
        };
        for j in start + 1..self.tokens.len() {
            let t = &self.tokens[j];
            if *t == target {
                return j + 1;
            }
            let blocks = if target == Token::BoxEnd {
                opens(t)
            } else {
                EditKind::opened_by(t).is_some()
            };
            if blocks {
                return j;
            }
        }
        self.tokens.len()
    }

    fn items(&self, lenient: bool) -> Result<(Vec<Item>, Vec<ParseError>), ParseError> {
        let mut items = Vec::new();
        let mut errors = Vec::new();
        let mut i = 0;
        while i < self.tokens.len() {
            match self.parse_item(i) {
                Ok((item, next)) => {
                    items.push(item);
                    i = next;
                }
                Err(e) if lenient => {
                    errors.push(e);
                    i = self.resync(i);
                }
                Err(e) => return Err(e),
            }
        }
        Ok((items, errors))
    }
}

enum RunItem {
    Box(QuantBox),
    Word(String),
}

fn flush_run(run: &mut Vec<RunItem>, out: &mut Vec<Statement>) {
    if run.is_empty() {
        return;
    }
    let items = std::mem::take(run);
    let has_box = items.iter().any(|x| matches!(x, RunItem::Box(_)));
    let opens_with_box = matches!(items.first(), Some(RunItem::Box(_)));

    let mut segments: Vec<Segment> = Vec::new();
    for item in items {
        match item {
            RunItem::Box(b) => segments.push(Segment::Box(b)),
            RunItem::Word(w) => match segments.last_mut() {
                Some(Segment::Text(t)) => {
                    t.push(' ');
                    t.push_str(&w);
                }
                _ => segments.push(Segment::Text(w)),
            },
        }
    }

    if !has_box {
        if let Some(Segment::Text(t)) = segments.pop() {
            out.push(Statement::OverallText(t));
        }
    } else if opens_with_box {
        let mut iter = segments.into_iter().peekable();
        while let Some(seg) = iter.next() {
            let Segment::Box(b) = seg else { continue };
            match iter.peek() {
                Some(Segment::Text(_)) => {
                    let Some(Segment::Text(t)) = iter.next() else {
                        unreachable!()
                    };
                    out.push(Statement::BoxWithText(b, t));
                }
                _ => out.push(Statement::BoxOnly(b)),
            }
        }
    } else {
        out.push(Statement::GroundedText(segments));
    }
}

fn assemble(items: Vec<Item>) -> PlanProgram {
    let mut statements = Vec::new();
    let mut run = Vec::new();
    for item in items {
        match item {
            Item::Box(b) => run.push(RunItem::Box(b)),
            Item::Word(w) => run.push(RunItem::Word(w)),
            Item::Edit(st) => {
                flush_run(&mut run, &mut statements);
                statements.push(st);
            }
        }
    }
    flush_run(&mut run, &mut statements);
    PlanProgram { statements }
}

/// Strict parse: the first malformed statement aborts.
pub fn parse_program(tokens: &[Token]) -> Result<PlanProgram, ParseError> {
    let (items, _) = Parser { tokens }.items(false)?;
    Ok(assemble(items))
}

/// Lenient parse: malformed statements are skipped and reported.
pub fn parse_program_lenient(tokens: &[Token]) -> (PlanProgram, Vec<ParseError>) {
    let (items, errors) = Parser { tokens }
        .items(true)
        .expect("lenient parsing does not fail");
    (assemble(items), errors)
}
