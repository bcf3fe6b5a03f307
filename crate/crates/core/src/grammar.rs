//! The box-token planning language.
//!
//! A program is a flat token stream. Boxes are written as `<boxs>` followed by
//! six coordinate tokens and `<boxe>`; edit statements wrap boxes and words in
//! `<adds>..<adde>`, `<dels>..<dele>` or `<mods>..<mode>`. Coordinates live in
//! the normalized cube `[-1, 1]^3` and are quantized into [`NUM_BINS`] bins.

use std::fmt;

use thiserror::Error;

mod parse;
mod text;

pub use parse::{parse_program, parse_program_lenient, ParseError};
pub use text::{lex, render_tokens, RenderError};

/// Number of quantization bins per axis.
pub const NUM_BINS: u32 = 128;

/// Slack allowed when checking that a coordinate lies in `[-1, 1]`.
pub const COORD_TOLERANCE: f64 = 1e-9;

const MAX_BIN: u32 = NUM_BINS - 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrammarError {
    #[error("{axis} coordinate {value} lies outside [-1, 1]")]
    CoordOutOfDomain { axis: &'static str, value: f64 },
    #[error("coordinate bin {0} is outside [0, {MAX_BIN}]")]
    BinOutOfRange(u32),
    #[error("box minimum exceeds maximum on the {axis} axis ({min} > {max})")]
    InvertedBox {
        axis: &'static str,
        min: f64,
        max: f64,
    },
}

const AXES: [&str; 3] = ["x", "y", "z"];

fn check_coord(axis: &'static str, x: f64) -> Result<f64, GrammarError> {
    if !x.is_finite() || !(-1.0 - COORD_TOLERANCE..=1.0 + COORD_TOLERANCE).contains(&x) {
        return Err(GrammarError::CoordOutOfDomain { axis, value: x });
    }
    Ok(x.clamp(-1.0, 1.0))
}

fn quantize_on_axis(axis: &'static str, x: f64) -> Result<u8, GrammarError> {
    let x = check_coord(axis, x)?;
    // f64::round rounds half away from zero, so q(0) = round(63.5) = 64.
    let bin = ((x + 1.0) / 2.0 * f64::from(MAX_BIN)).round();
    Ok(bin.clamp(0.0, f64::from(MAX_BIN)) as u8)
}

/// Maps a normalized coordinate to its bin, `round((x + 1) / 2 * (K - 1))`.
pub fn quantize_coord(x: f64) -> Result<u8, GrammarError> {
    quantize_on_axis("normalized", x)
}

/// Inverse of [`quantize_coord`]: `2 * bin / (K - 1) - 1`.
pub fn dequantize_coord(bin: u32) -> Result<f64, GrammarError> {
    if bin > MAX_BIN {
        return Err(GrammarError::BinOutOfRange(bin));
    }
    Ok(2.0 * f64::from(bin) / f64::from(MAX_BIN) - 1.0)
}

/// Axis-aligned box in normalized coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    min: [f64; 3],
    max: [f64; 3],
}

impl Aabb {
    /// Builds a box, checking that every coordinate lies in `[-1, 1]` and that
    /// `min <= max` on each axis. Coordinates within [`COORD_TOLERANCE`] of the
    /// cube are clamped onto it.
    pub fn new(min: [f64; 3], max: [f64; 3]) -> Result<Self, GrammarError> {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for k in 0..3 {
            lo[k] = check_coord(AXES[k], min[k])?;
            hi[k] = check_coord(AXES[k], max[k])?;
            if lo[k] > hi[k] {
                return Err(GrammarError::InvertedBox {
                    axis: AXES[k],
                    min: lo[k],
                    max: hi[k],
                });
            }
        }
        Ok(Self { min: lo, max: hi })
    }

    /// Reads `(x_min, y_min, z_min, x_max, y_max, z_max)`.
    pub fn from_array(c: [f64; 6]) -> Result<Self, GrammarError> {
        Self::new([c[0], c[1], c[2]], [c[3], c[4], c[5]])
    }

    /// The full cube `[-1, 1]^3`.
    pub fn full() -> Self {
        Self {
            min: [-1.0; 3],
            max: [1.0; 3],
        }
    }

    pub fn min(&self) -> [f64; 3] {
        self.min
    }

    pub fn max(&self) -> [f64; 3] {
        self.max
    }

    pub fn to_array(&self) -> [f64; 6] {
        let (a, b) = (self.min, self.max);
        [a[0], a[1], a[2], b[0], b[1], b[2]]
    }

    pub fn center(&self) -> [f64; 3] {
        std::array::from_fn(|k| (self.min[k] + self.max[k]) / 2.0)
    }

    pub fn size(&self) -> [f64; 3] {
        std::array::from_fn(|k| self.max[k] - self.min[k])
    }

    pub fn volume(&self) -> f64 {
        self.size().iter().product()
    }

    /// Closed membership test: `min <= p <= max` on every axis.
    pub fn contains_point(&self, p: [f64; 3]) -> bool {
        (0..3).all(|k| self.min[k] <= p[k] && p[k] <= self.max[k])
    }

    /// Component-wise containment of `other` in `self`; equal boxes contain
    /// each other.
    pub fn contains_box(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= other.min[k] && other.max[k] <= self.max[k])
    }

    pub fn quantize(&self) -> QuantBox {
        // Validated coordinates always quantize, and ordering is preserved by
        // the monotone rounding map.
        let q = |axis, x| quantize_on_axis(axis, x).expect("validated coordinate");
        QuantBox {
            bins: [
                q("x", self.min[0]),
                q("y", self.min[1]),
                q("z", self.min[2]),
                q("x", self.max[0]),
                q("y", self.max[1]),
                q("z", self.max[2]),
            ],
        }
    }
}

/// A box after quantization: six bins ordered
/// `(x_min, y_min, z_min, x_max, y_max, z_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantBox {
    bins: [u8; 6],
}

impl QuantBox {
    pub fn new(bins: [u32; 6]) -> Result<Self, GrammarError> {
        let mut out = [0u8; 6];
        for (slot, &b) in out.iter_mut().zip(&bins) {
            if b > MAX_BIN {
                return Err(GrammarError::BinOutOfRange(b));
            }
            *slot = b as u8;
        }
        for k in 0..3 {
            if out[k] > out[k + 3] {
                return Err(GrammarError::InvertedBox {
                    axis: AXES[k],
                    min: f64::from(out[k]),
                    max: f64::from(out[k + 3]),
                });
            }
        }
        Ok(Self { bins: out })
    }

    pub fn bins(&self) -> [u8; 6] {
        self.bins
    }

    /// Dequantized box.
    pub fn to_aabb(&self) -> Aabb {
        let d = |b: u8| 2.0 * f64::from(b) / f64::from(MAX_BIN) - 1.0;
        let b = self.bins;
        Aabb {
            min: [d(b[0]), d(b[1]), d(b[2])],
            max: [d(b[3]), d(b[4]), d(b[5])],
        }
    }

    /// Sort key for part lists: `(z_min, y_min, x_min)` bins.
    pub fn order_key(&self) -> (u8, u8, u8) {
        (self.bins[2], self.bins[1], self.bins[0])
    }

    pub fn tokens(&self) -> [Token; 8] {
        let c = |i: usize| Token::Coord(u32::from(self.bins[i]));
        [
            Token::BoxStart,
            c(0),
            c(1),
            c(2),
            c(3),
            c(4),
            c(5),
            Token::BoxEnd,
        ]
    }
}

impl From<Aabb> for QuantBox {
    fn from(b: Aabb) -> Self {
        b.quantize()
    }
}

/// One token of the planning language.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Token {
    BoxStart,
    BoxEnd,
    /// A coordinate bin. The lexer accepts any integer here; the parser
    /// rejects bins outside `[0, 127]`.
    Coord(u32),
    AddStart,
    AddEnd,
    DelStart,
    DelEnd,
    ModStart,
    ModEnd,
    Word(String),
}

impl Token {
    pub fn word(text: impl Into<String>) -> Self {
        Token::Word(text.into())
    }

    /// Surface form of a reserved token; `None` for words.
    pub fn surface(&self) -> Option<String> {
        let s = match self {
            Token::BoxStart => "<boxs>",
            Token::BoxEnd => "<boxe>",
            Token::AddStart => "<adds>",
            Token::AddEnd => "<adde>",
            Token::DelStart => "<dels>",
            Token::DelEnd => "<dele>",
            Token::ModStart => "<mods>",
            Token::ModEnd => "<mode>",
            Token::Coord(k) => return Some(format!("<coord_{k}>")),
            Token::Word(_) => return None,
        };
        Some(s.to_string())
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Word(w) => f.write_str(w),
            other => f.write_str(&other.surface().unwrap_or_default()),
        }
    }
}

/// True if lexing `text` would yield only words.
pub fn text_is_reserved_free(text: &str) -> bool {
    !text::contains_reserved(text)
}

/// Emits the eight tokens for one box.
pub fn serialize_box(b: &Aabb) -> Vec<Token> {
    b.quantize().tokens().to_vec()
}

/// Stable sort by `(z_min, y_min, x_min)` bins.
pub fn sort_parts(boxes: &[QuantBox]) -> Vec<QuantBox> {
    sort_order(boxes).into_iter().map(|i| boxes[i]).collect()
}

/// The permutation applied by [`sort_parts`]: `sort_parts(b)[k] == b[sort_order(b)[k]]`.
pub fn sort_order(boxes: &[QuantBox]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..boxes.len()).collect();
    idx.sort_by_key(|&i| boxes[i].order_key());
    idx
}

/// A piece of grounded text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Text(String),
    Box(QuantBox),
}

/// One statement of a parsed program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    BoxOnly(QuantBox),
    BoxWithText(QuantBox, String),
    GroundedText(Vec<Segment>),
    EditAdd(QuantBox, String),
    EditDelete(Vec<QuantBox>),
    EditModify(QuantBox, String),
    OverallText(String),
}

impl Statement {
    pub fn is_edit(&self) -> bool {
        matches!(
            self,
            Statement::EditAdd(..) | Statement::EditDelete(_) | Statement::EditModify(..)
        )
    }

    /// Every box mentioned by the statement, in order.
    pub fn boxes(&self) -> Vec<QuantBox> {
        match self {
            Statement::BoxOnly(b)
            | Statement::BoxWithText(b, _)
            | Statement::EditAdd(b, _)
            | Statement::EditModify(b, _) => vec![*b],
            Statement::EditDelete(bs) => bs.clone(),
            Statement::GroundedText(segs) => segs
                .iter()
                .filter_map(|s| match s {
                    Segment::Box(b) => Some(*b),
                    Segment::Text(_) => None,
                })
                .collect(),
            Statement::OverallText(_) => Vec::new(),
        }
    }
}

/// Why a [`PlanProgram`] is not in the canonical form that the parser
/// produces.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("statement {0}: text must be non-empty single-spaced words")]
    BadText(usize),
    #[error("statement {index}: word {word:?} contains a reserved token")]
    ReservedWord { index: usize, word: String },
    #[error("statement {0}: delete needs at least one box")]
    EmptyDelete(usize),
    #[error("statement {0}: grounded text must open with text, hold a box, and not repeat text segments")]
    BadGrounding(usize),
    #[error("statement {0} would merge with its neighbour when re-parsed")]
    Ambiguous(usize),
}

/// A parsed program.
///
/// Adjacent non-edit statements share one token run, so only some statement
/// sequences survive a serialize/parse cycle unchanged. The parser reads a
/// run of boxes and words as:
///
/// * no boxes: one `OverallText`;
/// * starts with a box: one `BoxOnly` or `BoxWithText` per box, the words
///   after a box being its text;
/// * starts with words: one `GroundedText`.
///
/// [`PlanProgram::validate`] checks that a hand-built program is already in
/// that form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlanProgram {
    pub statements: Vec<Statement>,
}

fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace()
}

fn push_text(out: &mut Vec<Token>, text: &str) {
    out.extend(words(text).map(Token::word));
}

fn is_canonical_text(text: &str) -> bool {
    !text.is_empty() && words(text).collect::<Vec<_>>().join(" ") == text
}

impl PlanProgram {
    pub fn new(statements: Vec<Statement>) -> Self {
        Self { statements }
    }

    pub fn to_tokens(&self) -> Vec<Token> {
        let mut out = Vec::new();
        for st in &self.statements {
            match st {
                Statement::BoxOnly(b) => out.extend(b.tokens()),
                Statement::BoxWithText(b, t) => {
                    out.extend(b.tokens());
                    push_text(&mut out, t);
                }
                Statement::GroundedText(segs) => {
                    for s in segs {
                        match s {
                            Segment::Text(t) => push_text(&mut out, t),
                            Segment::Box(b) => out.extend(b.tokens()),
                        }
                    }
                }
                Statement::EditAdd(b, t) => {
                    out.push(Token::AddStart);
                    out.extend(b.tokens());
                    push_text(&mut out, t);
                    out.push(Token::AddEnd);
                }
                Statement::EditDelete(bs) => {
                    out.push(Token::DelStart);
                    for b in bs {
                        out.extend(b.tokens());
                    }
                    out.push(Token::DelEnd);
                }
                Statement::EditModify(b, t) => {
                    out.push(Token::ModStart);
                    out.extend(b.tokens());
                    push_text(&mut out, t);
                    out.push(Token::ModEnd);
                }
                Statement::OverallText(t) => push_text(&mut out, t),
            }
        }
        out
    }

    /// Canonical text form, `render_tokens(to_tokens())`.
    pub fn render(&self) -> Result<String, RenderError> {
        render_tokens(&self.to_tokens())
    }

    /// All boxes in statement order.
    pub fn boxes(&self) -> Vec<QuantBox> {
        self.statements.iter().flat_map(Statement::boxes).collect()
    }

    /// All words outside of boxes, joined by single spaces.
    pub fn text(&self) -> String {
        self.to_tokens()
            .into_iter()
            .filter_map(|t| match t {
                Token::Word(w) => Some(w),
                _ => None,
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Checks that `parse_program(&self.to_tokens())` reproduces `self`.
    pub fn validate(&self) -> Result<(), ProgramError> {
        let check_text = |i: usize, t: &str, allow_empty: bool| -> Result<(), ProgramError> {
            if t.is_empty() && allow_empty {
                return Ok(());
            }
            if !is_canonical_text(t) {
                return Err(ProgramError::BadText(i));
            }
            for w in words(t) {
                if text::contains_reserved(w) {
                    return Err(ProgramError::ReservedWord {
                        index: i,
                        word: w.to_string(),
                    });
                }
            }
            Ok(())
        };

        for (i, st) in self.statements.iter().enumerate() {
            match st {
                Statement::BoxOnly(_) => {}
                Statement::BoxWithText(_, t) | Statement::OverallText(t) => {
                    check_text(i, t, false)?
                }
                Statement::EditAdd(_, t) | Statement::EditModify(_, t) => check_text(i, t, true)?,
                Statement::EditDelete(bs) => {
                    if bs.is_empty() {
                        return Err(ProgramError::EmptyDelete(i));
                    }
                }
                Statement::GroundedText(segs) => {
                    let opens_with_text = matches!(segs.first(), Some(Segment::Text(_)));
                    let has_box = segs.iter().any(|s| matches!(s, Segment::Box(_)));
                    let repeated = segs
                        .windows(2)
                        .any(|w| matches!(w, [Segment::Text(_), Segment::Text(_)]));
                    if !opens_with_text || !has_box || repeated {
                        return Err(ProgramError::BadGrounding(i));
                    }
                    for s in segs {
                        if let Segment::Text(t) = s {
                            check_text(i, t, false)?;
                        }
                    }
                }
            }
        }

        // Within a run of non-edit statements, a run opened by text must be a
        // single statement, and box statements must not be followed by text.
        let mut run_start: Option<usize> = None;
        for (i, st) in self.statements.iter().enumerate() {
            if st.is_edit() {
                run_start = None;
                continue;
            }
            match run_start {
                None => run_start = Some(i),
                Some(start) => {
                    let opener = &self.statements[start];
                    let box_run =
                        matches!(opener, Statement::BoxOnly(_) | Statement::BoxWithText(..));
                    let box_next = matches!(st, Statement::BoxOnly(_) | Statement::BoxWithText(..));
                    if !(box_run && box_next) {
                        return Err(ProgramError::Ambiguous(i));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_bounds_and_midpoint() {
        assert_eq!(quantize_coord(-1.0).unwrap(), 0);
        assert_eq!(quantize_coord(1.0).unwrap(), 127);
        // (0 + 1) / 2 * 127 = 63.5, ties away from zero.
        assert_eq!(quantize_coord(0.0).unwrap(), 64);
    }

    #[test]
    fn quantize_rejects_out_of_domain() {
        assert!(quantize_coord(1.0 + 1e-10).is_ok());
        let err = quantize_coord(1.01).unwrap_err();
        assert!(err.to_string().contains("1.01"));
        assert!(quantize_coord(f64::NAN).is_err());
    }

    #[test]
    fn dequantize_values() {
        assert_eq!(dequantize_coord(0).unwrap(), -1.0);
        assert_eq!(dequantize_coord(127).unwrap(), 1.0);
        let mid = dequantize_coord(64).unwrap();
        assert!((mid - 0.007_874_015_748_031_5).abs() < 1e-15);
        assert_eq!(dequantize_coord(128), Err(GrammarError::BinOutOfRange(128)));
    }

    #[test]
    fn serialize_full_and_point_boxes() {
        let full = serialize_box(&Aabb::full());
        assert_eq!(full.len(), 8);
        assert_eq!(full[0], Token::BoxStart);
        assert_eq!(
            &full[1..4],
            &[Token::Coord(0), Token::Coord(0), Token::Coord(0)]
        );
        assert_eq!(
            &full[4..7],
            &[Token::Coord(127), Token::Coord(127), Token::Coord(127)]
        );
        assert_eq!(full[7], Token::BoxEnd);

        let point = serialize_box(&Aabb::new([0.0; 3], [0.0; 3]).unwrap());
        assert!(point[1..7].iter().all(|t| *t == Token::Coord(64)));
    }

    #[test]
    fn aabb_invariants() {
        assert!(matches!(
            Aabb::new([0.5, 0.0, 0.0], [0.0, 1.0, 1.0]),
            Err(GrammarError::InvertedBox { axis: "x", .. })
        ));
        assert!(Aabb::new([-2.0, 0.0, 0.0], [0.0; 3]).is_err());
        assert!(QuantBox::new([5, 0, 0, 4, 0, 0]).is_err());
        assert!(QuantBox::new([0, 0, 0, 128, 0, 0]).is_err());
    }

    fn qb(x: u32, y: u32, z: u32) -> QuantBox {
        QuantBox::new([x, y, z, 127, 127, 127]).unwrap()
    }

    #[test]
    fn sort_parts_cases() {
        assert!(sort_parts(&[]).is_empty());
        let two = sort_parts(&[qb(0, 0, 5), qb(0, 0, 3)]);
        assert_eq!(two[0].bins()[2], 3);

        // Same z_min; y_min 10, 10, 2; x_min 7, 1, 9.
        let three = sort_parts(&[qb(7, 10, 4), qb(1, 10, 4), qb(9, 2, 4)]);
        let keys: Vec<_> = three.iter().map(|b| (b.bins()[1], b.bins()[0])).collect();
        assert_eq!(keys, vec![(2, 9), (10, 1), (10, 7)]);
    }

    #[test]
    fn sort_parts_is_stable() {
        let a = QuantBox::new([3, 3, 3, 10, 10, 10]).unwrap();
        let b = QuantBox::new([3, 3, 3, 20, 20, 20]).unwrap();
        assert_eq!(sort_parts(&[b, a]), vec![b, a]);
        assert_eq!(sort_parts(&[a, b]), vec![a, b]);
    }

    #[test]
    fn validate_rejects_merging_statements() {
        let b = QuantBox::new([0, 0, 0, 1, 1, 1]).unwrap();
        let ok = PlanProgram::new(vec![
            Statement::BoxOnly(b),
            Statement::BoxWithText(b, "leg".into()),
            Statement::EditDelete(vec![b]),
            Statement::OverallText("done".into()),
        ]);
        assert_eq!(ok.validate(), Ok(()));

        let merged = PlanProgram::new(vec![
            Statement::OverallText("a chair".into()),
            Statement::BoxWithText(b, "leg".into()),
        ]);
        assert_eq!(merged.validate(), Err(ProgramError::Ambiguous(1)));

        let spaced = PlanProgram::new(vec![Statement::OverallText("a  chair".into())]);
        assert_eq!(spaced.validate(), Err(ProgramError::BadText(0)));

        let reserved = PlanProgram::new(vec![Statement::OverallText("x<boxs>".into())]);
        assert!(matches!(
            reserved.validate(),
            Err(ProgramError::ReservedWord { .. })
        ));
    }
}
