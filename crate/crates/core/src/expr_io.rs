//! Text syntax for scalars, elements and derivations, plus the derivation
//! table and witness family file formats.
//!
//! Elements:
//!
//! ```text
//! element  := term (('+' | '-') term)*
//! term     := '-'? ((scalar '*')? basis | scalar)
//! basis    := 'L' '[' integer ',' nonneg-integer ']'
//! scalar   := rational | '(' rational (('+'|'-') rational? 'i')? ')'
//! rational := integer ('/' positive-integer)?
//! ```
//!
//! Derivations:
//!
//! ```text
//! spec  := 'ad' '(' element ')' (('+'|'-') dterm)? | '-'? dterm
//! dterm := (scalar '*'?)? 'd'
//! ```
//!
//! The parser is recursive descent with one token of lookahead. Output of
//! the formatters is canonical: terms ascend in `(α, i)` order and fractions
//! are reduced, so `format(x) == format(y)` exactly when `x == y`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::algebra::{BasisIndex, Element, Window};
use crate::derivation::{DerivationTable, InnerOuterDerivation};
use crate::scalar::Scalar;
use crate::two_local::{KernelNotAnnihilating, Perturbation, WitnessFamilySpec};

/// Largest accepted magnitude of a basis index in text.
pub const INDEX_LIMIT: i64 = i32::MAX as i64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("domain error at byte {offset}: {message}")]
    Domain { offset: usize, message: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::Domain { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Number(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Number(n) => write!(f, "number '{n}'"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBracket => f.write_str("'['"),
            Tok::RBracket => f.write_str("']'"),
            Tok::Comma => f.write_str("','"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(at, ch)) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
            continue;
        }
        let tok = if ch.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, c)) = chars.peek().filter(|(_, c)| c.is_ascii_digit()) {
                s.push(c);
                chars.next();
            }
            out.push((Tok::Number(s), at));
            continue;
        } else if ch.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&(_, c)) = chars.peek().filter(|(_, c)| c.is_ascii_alphabetic()) {
                s.push(c);
                chars.next();
            }
            out.push((Tok::Ident(s), at));
            continue;
        } else {
            match ch {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                _ => {
                    return Err(ParseError::Syntax {
                        offset: at,
                        expected: vec!["a token"],
                        found: format!("character {ch:?}"),
                    })
                }
            }
        };
        chars.next();
        out.push((tok, at));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    fn expect_ident(&mut self, name: &'static str) -> Result<(), ParseError> {
        if self.is_ident(name) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error(&["'+'", "'-'", "end of input"]))
        }
    }

    fn element(&mut self) -> Result<Element, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc + self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Element, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unsigned_term()?);
        }
        self.unsigned_term()
    }

    fn unsigned_term(&mut self) -> Result<Element, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "L" => Ok(Element::basis(self.basis()?)),
            Tok::Number(_) | Tok::LParen => {
                let at = self.offset();
                let c = self.unsigned_scalar()?;
                if *self.peek() == Tok::Star {
                    self.bump();
                    let b = self.basis()?;
                    Ok(Element::term(c, b))
                } else if c.is_zero() {
                    Ok(Element::zero())
                } else {
                    Err(ParseError::Domain {
                        offset: at,
                        message: "a nonzero scalar term must multiply a basis vector".into(),
                    })
                }
            }
            _ => Err(self.error(&["'L'", "number", "'('"])),
        }
    }

    fn basis(&mut self) -> Result<BasisIndex, ParseError> {
        self.expect_ident("L")?;
        self.expect(Tok::LBracket, "'['")?;
        let (alpha, _) = self.index_integer()?;
        self.expect(Tok::Comma, "','")?;
        let (i, at) = self.index_integer()?;
        self.expect(Tok::RBracket, "']'")?;
        BasisIndex::try_new(alpha, i).map_err(|e| ParseError::Domain {
            offset: at,
            message: e.to_string(),
        })
    }

    fn index_integer(&mut self) -> Result<(i64, usize), ParseError> {
        let at = self.offset();
        let n = self.integer()?;
        match i64::try_from(n) {
            Ok(v) if v.abs() <= INDEX_LIMIT => Ok((v, at)),
            _ => Err(ParseError::Domain {
                offset: at,
                message: format!("index out of range (|index| must be at most {INDEX_LIMIT})"),
            }),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let n = self.natural()?;
        Ok(if negative { -n } else { n })
    }

    fn natural(&mut self) -> Result<BigInt, ParseError> {
        match self.peek() {
            Tok::Number(s) => {
                let n = s.parse::<BigInt>().expect("lexer yields digits only");
                self.bump();
                Ok(n)
            }
            _ => Err(self.error(&["number"])),
        }
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let num = self.integer()?;
        if *self.peek() != Tok::Slash {
            return Ok(BigRational::from_integer(num));
        }
        self.bump();
        let at = self.offset();
        let den = self.natural()?;
        if den.is_zero() {
            return Err(ParseError::Domain {
                offset: at,
                message: "zero denominator".into(),
            });
        }
        Ok(BigRational::new(num, den))
    }

    fn unsigned_scalar(&mut self) -> Result<Scalar, ParseError> {
        match self.peek() {
            Tok::Number(_) => Ok(Scalar::real(self.rational()?)),
            Tok::LParen => {
                self.bump();
                let re = self.rational()?;
                let im = match self.peek() {
                    Tok::Plus | Tok::Minus => {
                        let negative = self.bump() == Tok::Minus;
                        let im = if self.is_ident("i") {
                            BigRational::one()
                        } else {
                            self.rational()?
                        };
                        self.expect_ident("i")?;
                        if negative {
                            -im
                        } else {
                            im
                        }
                    }
                    _ => BigRational::zero(),
                };
                self.expect(Tok::RParen, "')'")?;
                Ok(Scalar::new(re, im))
            }
            _ => Err(self.error(&["number", "'('"])),
        }
    }

    fn derivation(&mut self) -> Result<InnerOuterDerivation, ParseError> {
        if self.is_ident("ad") {
            self.bump();
            self.expect(Tok::LParen, "'('")?;
            let inner = self.element()?;
            self.expect(Tok::RParen, "')'")?;
            let lambda = match self.peek() {
                Tok::Plus => {
                    self.bump();
                    self.dterm()?
                }
                Tok::Minus => {
                    self.bump();
                    -self.dterm()?
                }
                _ => Scalar::zero(),
            };
            Ok(InnerOuterDerivation::new(inner, lambda))
        } else if matches!(self.peek(), Tok::Minus | Tok::Number(_) | Tok::LParen | Tok::Ident(_)) {
            Ok(InnerOuterDerivation::outer(self.dterm()?))
        } else {
            Err(self.error(&["'ad'", "'d'", "number", "'('", "'-'"]))
        }
    }

    fn dterm(&mut self) -> Result<Scalar, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.dterm()?);
        }
        if self.is_ident("d") {
            self.bump();
            return Ok(Scalar::one());
        }
        let c = self.unsigned_scalar()?;
        if *self.peek() == Tok::Star {
            self.bump();
        }
        self.expect_ident("d")?;
        Ok(c)
    }
}

pub fn parse_element(text: &str) -> Result<Element, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.element()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_scalar(text: &str) -> Result<Scalar, ParseError> {
    let mut p = Parser::new(text)?;
    let negative = if *p.peek() == Tok::Minus {
        p.bump();
        true
    } else {
        false
    };
    let s = p.unsigned_scalar()?;
    p.finish()?;
    Ok(if negative { -s } else { s })
}

pub fn parse_derivation(text: &str) -> Result<InnerOuterDerivation, ParseError> {
    let mut p = Parser::new(text)?;
    let d = p.derivation()?;
    p.finish()?;
    Ok(d)
}

fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `a`, `a/b`, or `(a+b i)` with unit imaginary parts written `(a+i)`.
pub fn format_scalar(s: &Scalar) -> String {
    if s.is_real() {
        return format_rational(s.re());
    }
    let im = s.im();
    let sign = if im.is_negative() { '-' } else { '+' };
    let mag = im.abs();
    if mag.is_one() {
        format!("({}{sign}i)", format_rational(s.re()))
    } else {
        format!("({}{sign}{} i)", format_rational(s.re()), format_rational(&mag))
    }
}

/// Writes `c·X` where `X` is `unit` (e.g. `L[1,0]` or `d`), with its sign
/// folded into the separator when `c` is a negative real.
fn push_scaled(out: &mut String, c: &Scalar, unit: &str, first: bool) {
    let (negative, mag) = if c.is_negative_real() {
        (true, -c)
    } else {
        (false, c.clone())
    };
    match (first, negative) {
        (true, true) => out.push('-'),
        (true, false) => {}
        (false, true) => out.push_str(" - "),
        (false, false) => out.push_str(" + "),
    }
    if !mag.is_one() {
        out.push_str(&format_scalar(&mag));
        out.push('*');
    }
    out.push_str(unit);
}

pub fn format_element(x: &Element) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (n, (b, c)) in x.terms().enumerate() {
        push_scaled(&mut out, c, &b.to_string(), n == 0);
    }
    out
}

pub fn format_derivation(d: &InnerOuterDerivation) -> String {
    if d.inner.is_zero() && !d.lambda.is_zero() {
        let mut out = String::new();
        push_scaled(&mut out, &d.lambda, "d", true);
        return out;
    }
    let mut out = format!("ad({})", format_element(&d.inner));
    if !d.lambda.is_zero() {
        push_scaled(&mut out, &d.lambda, "d", false);
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_scalar(self))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_element(self))
    }
}

impl fmt::Display for InnerOuterDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_derivation(self))
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {source}")]
    Syntax {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("missing assignment for {0}")]
    MissingAssignment(BasisIndex),
    #[error("line {line}: duplicate assignment for {index}")]
    DuplicateAssignment { line: usize, index: BasisIndex },
    #[error("line {line}: {index} lies outside the declared window")]
    OutsideWindow { line: usize, index: BasisIndex },
    #[error("witness file: {0}")]
    Document(String),
    #[error("witness file, {field}: {source}")]
    Field {
        field: String,
        #[source]
        source: ParseError,
    },
    #[error("kernel not annihilating: {0}")]
    KernelNotAnnihilating(#[from] KernelNotAnnihilating),
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses the line-oriented table format:
///
/// ```text
/// # comment
/// window <alpha_min> <alpha_max> <i_max>
/// L[b,j] -> <element>
/// ```
pub fn parse_derivation_table(text: &str) -> Result<DerivationTable, LoadError> {
    let mut window: Option<Window> = None;
    let mut assignments = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(w) = window else {
            window = Some(parse_window_header(line, line_no)?);
            continue;
        };
        let (lhs, rhs) = line.split_once("->").ok_or_else(|| LoadError::Malformed {
            line: line_no,
            message: "expected 'L[b,j] -> <element>'".into(),
        })?;
        let syntax = |source| LoadError::Syntax { line: line_no, source };
        let key = parse_element(lhs).map_err(syntax)?;
        let index = match key.terms().collect::<Vec<_>>().as_slice() {
            [(b, c)] if c.is_one() => *b,
            _ => {
                return Err(LoadError::Malformed {
                    line: line_no,
                    message: format!("left side must be a single basis vector, got {key}"),
                })
            }
        };
        if !w.contains(index) {
            return Err(LoadError::OutsideWindow { line: line_no, index });
        }
        let value = parse_element(rhs).map_err(syntax)?;
        if assignments.insert(index, value).is_some() {
            return Err(LoadError::DuplicateAssignment { line: line_no, index });
        }
    }
    let window = window.ok_or_else(|| LoadError::Malformed {
        line: 1,
        message: "missing 'window' header".into(),
    })?;
    if let Some(b) = window.indices().find(|b| !assignments.contains_key(b)) {
        return Err(LoadError::MissingAssignment(b));
    }
    Ok(DerivationTable::new(window, assignments).expect("coverage checked above"))
}

fn parse_window_header(line: &str, line_no: usize) -> Result<Window, LoadError> {
    let malformed = |message: String| LoadError::Malformed { line: line_no, message };
    let fields: Vec<&str> = line.split_whitespace().collect();
    let ["window", a, b, c] = fields.as_slice() else {
        return Err(malformed("expected 'window <alpha_min> <alpha_max> <i_max>'".into()));
    };
    let num = |s: &str| s.parse::<i64>().map_err(|e| malformed(format!("bad window bound {s:?}: {e}")));
    Window::from_signed(num(a)?, num(b)?, num(c)?).map_err(|e| malformed(e.to_string()))
}

pub fn load_derivation_table(path: impl AsRef<Path>) -> Result<DerivationTable, LoadError> {
    parse_derivation_table(&read(path.as_ref())?)
}

pub fn format_derivation_table(table: &DerivationTable) -> String {
    let w = table.window();
    let mut out = format!("window {} {} {}\n", w.alpha_min(), w.alpha_max(), w.i_max());
    for (b, e) in table.assignments() {
        let _ = writeln!(out, "{b} -> {e}");
    }
    out
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessDocument {
    hidden: String,
    #[serde(default)]
    perturbations: Vec<PerturbationRecord>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PerturbationRecord {
    x: String,
    y: String,
    kernel: String,
    coeff: CoeffValue,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CoeffValue {
    Int(i64),
    Text(String),
}

/// Parses a TOML witness family document:
///
/// ```toml
/// hidden = "ad(L[2,1]) + 3d"
///
/// [[perturbations]]
/// x = "L[0,0]"
/// y = "L[1,0]"
/// kernel = "ad(L[0,0]) + d"
/// coeff = 5
/// ```
///
/// Pairs are matched by canonical form, so `"L[1,0] + L[0,0]"` and
/// `"L[0,0]+L[1,0]"` name the same member. With `validate`, each kernel must
/// kill both members of its pair.
pub fn parse_witness_family(text: &str, validate: bool) -> Result<WitnessFamilySpec, LoadError> {
    let doc: WitnessDocument = toml::from_str(text).map_err(|e| LoadError::Document(e.to_string()))?;
    let field = |name: String| move |source| LoadError::Field { field: name, source };
    let hidden = parse_derivation(&doc.hidden).map_err(field("hidden".into()))?;
    let mut perturbations = Vec::with_capacity(doc.perturbations.len());
    for (n, rec) in doc.perturbations.iter().enumerate() {
        let at = |key: &str| format!("perturbations[{n}].{key}");
        let coeff = match &rec.coeff {
            CoeffValue::Int(v) => Scalar::from_int(*v),
            CoeffValue::Text(s) => parse_scalar(s).map_err(field(at("coeff")))?,
        };
        perturbations.push(Perturbation {
            x: parse_element(&rec.x).map_err(field(at("x")))?,
            y: parse_element(&rec.y).map_err(field(at("y")))?,
            kernel: parse_derivation(&rec.kernel).map_err(field(at("kernel")))?,
            coeff,
        });
    }
    if validate {
        Ok(WitnessFamilySpec::new(hidden, perturbations)?)
    } else {
        Ok(WitnessFamilySpec::new_unchecked(hidden, perturbations))
    }
}

pub fn load_witness_family(path: impl AsRef<Path>) -> Result<WitnessFamilySpec, LoadError> {
    parse_witness_family(&read(path.as_ref())?, true)
}

/// Loads without checking kernels, to exercise the contract checks on
/// deliberately broken families.
pub fn load_witness_family_unchecked(path: impl AsRef<Path>) -> Result<WitnessFamilySpec, LoadError> {
    parse_witness_family(&read(path.as_ref())?, false)
}

pub fn format_witness_family(spec: &WitnessFamilySpec) -> String {
    let mut out = format!("hidden = \"{}\"\n", spec.hidden());
    for p in spec.perturbations() {
        let _ = write!(
            out,
            "\n[[perturbations]]\nx = \"{}\"\ny = \"{}\"\nkernel = \"{}\"\ncoeff = \"{}\"\n",
            p.x, p.y, p.kernel, p.coeff
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(a: i64, i: u64) -> BasisIndex {
        BasisIndex::new(a, i)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_element("L[1,0]").unwrap(), Element::l(1, 0));
        let e = parse_element("2*L[0,0] - (1/3)*L[-2,5]").unwrap();
        assert_eq!(
            e,
            Element::from_terms([(idx(0, 0), Scalar::from_int(2)), (idx(-2, 5), Scalar::ratio(-1, 3))])
        );
        assert!(matches!(parse_element("L[1,-1]"), Err(ParseError::Domain { offset: 4, .. })));
    }

    #[test]
    fn format_examples() {
        assert_eq!(format_element(&parse_element("L[2,1]+L[0,0]").unwrap()), "L[0,0] + L[2,1]");
        assert_eq!(format_element(&Element::zero()), "0");
        assert_eq!(
            parse_derivation("ad(L[0,0]) + 1*d").unwrap(),
            InnerOuterDerivation::kernel()
        );
        assert_eq!(format_derivation(&InnerOuterDerivation::kernel()), "ad(L[0,0]) + d");
        assert_eq!(format_derivation(&InnerOuterDerivation::zero()), "ad(0)");
        assert_eq!(format_derivation(&InnerOuterDerivation::outer(Scalar::from_int(-3))), "-3*d");
    }

    #[test]
    fn scalar_forms() {
        assert_eq!(format_scalar(&Scalar::ratio(-6, 4)), "-3/2");
        assert_eq!(format_scalar(&Scalar::i()), "(0+i)");
        assert_eq!(format_scalar(&Scalar::gaussian(2, -1)), "(2-i)");
        let z = Scalar::new(BigRational::new(1.into(), 2.into()), BigRational::new((-3).into(), 4.into()));
        assert_eq!(format_scalar(&z), "(1/2-3/4 i)");
        for s in ["(1/2-3/4 i)", "(0+i)", "-7", "5/3", "(2+3i)"] {
            let v = parse_scalar(s).unwrap();
            assert_eq!(parse_scalar(&format_scalar(&v)).unwrap(), v);
        }
    }

    #[test]
    fn signs_and_like_terms() {
        let e = parse_element("-L[1,0] + L[1,0] - -2*L[0,0] + 0").unwrap();
        assert_eq!(e, Element::term(Scalar::from_int(2), idx(0, 0)));
        let e = parse_element("(1+i)*L[3,2] - L[-1,0]").unwrap();
        assert_eq!(format_element(&e), "-L[-1,0] + (1+i)*L[3,2]");
        assert_eq!(parse_element(&format_element(&e)).unwrap(), e);
    }

    #[test]
    fn derivation_variants() {
        let k = InnerOuterDerivation::new(Element::l(2, 1), Scalar::from_int(3));
        assert_eq!(parse_derivation("ad(L[2,1]) + 3d").unwrap(), k);
        assert_eq!(parse_derivation("ad(L[2,1]) + 3 * d").unwrap(), k);
        assert_eq!(parse_derivation("d").unwrap(), InnerOuterDerivation::outer(Scalar::one()));
        assert_eq!(parse_derivation("-d").unwrap(), InnerOuterDerivation::outer(-Scalar::one()));
        assert_eq!(parse_derivation("ad(0)").unwrap(), InnerOuterDerivation::zero());
        assert_eq!(
            parse_derivation("ad(L[0,0]) - (1/2)d").unwrap(),
            InnerOuterDerivation::new(Element::l(0, 0), Scalar::ratio(-1, 2))
        );
    }

    #[test]
    fn errors_are_positioned() {
        let err = parse_element("L[1,0] + ").unwrap_err();
        assert_eq!(err.offset(), 9);
        let err = parse_element("L[1 0]").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 4, .. }), "{err:?}");
        assert_eq!(parse_element("2*L[0,0] ? L[1,0]").unwrap_err().offset(), 9);
        assert!(matches!(parse_element("3"), Err(ParseError::Domain { offset: 0, .. })));
        assert!(matches!(parse_element("1/0*L[0,0]"), Err(ParseError::Domain { offset: 2, .. })));
        assert!(matches!(parse_element("L[99999999999,0]"), Err(ParseError::Domain { .. })));
        assert!(parse_element("").is_err());
        assert!(parse_derivation("ad(L[0,0]) + 3").is_err());
    }

    #[test]
    fn table_example() {
        let text = "# three lines\nwindow -1 1 0\nL[-1,0] -> 2*L[-1,0]\nL[0,0] -> 0   # zero\nL[1,0] -> -L[1,0]\n";
        let t = parse_derivation_table(text).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.get(idx(1, 0)), Some(&-Element::l(1, 0)));
        assert_eq!(parse_derivation_table(&format_derivation_table(&t)).unwrap(), t);

        let missing = "window -1 1 0\nL[-1,0] -> 0\nL[1,0] -> 0\n";
        assert!(matches!(parse_derivation_table(missing), Err(LoadError::MissingAssignment(b)) if b == idx(0, 0)));
        let outside = "window 0 0 0\nL[0,0] -> 0\nL[1,0] -> 0\n";
        assert!(matches!(parse_derivation_table(outside), Err(LoadError::OutsideWindow { line: 3, .. })));
        let dup = "window 0 0 0\nL[0,0] -> 0\nL[0,0] -> L[0,0]\n";
        assert!(matches!(parse_derivation_table(dup), Err(LoadError::DuplicateAssignment { line: 3, .. })));
        assert!(matches!(parse_derivation_table("L[0,0] -> 0"), Err(LoadError::Malformed { line: 1, .. })));
        assert!(matches!(
            parse_derivation_table("window 0 0 0\nL[0,0] -> L[0,"),
            Err(LoadError::Syntax { line: 2, .. })
        ));
    }

    const WITNESS: &str = r#"
hidden = "ad(L[2,1]) + 3d"

[[perturbations]]
x = "L[0,0]"
y = "L[1,0]"
kernel = "ad(L[0,0]) + d"
coeff = 5
"#;

    #[test]
    fn witness_examples() {
        let spec = parse_witness_family(WITNESS, true).unwrap();
        assert_eq!(spec.hidden(), &InnerOuterDerivation::new(Element::l(2, 1), Scalar::from_int(3)));
        assert_eq!(spec.perturbations().len(), 1);
        assert_eq!(spec.perturbations()[0].coeff, Scalar::from_int(5));
        assert_eq!(parse_witness_family(&format_witness_family(&spec), true).unwrap(), spec);

        let bad = WITNESS.replace("kernel = \"ad(L[0,0]) + d\"", "kernel = \"d\"");
        match parse_witness_family(&bad, true) {
            Err(LoadError::KernelNotAnnihilating(e)) => assert_eq!(e.residual, Element::l(1, 0)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_witness_family(&bad, false).is_ok());

        let frac = WITNESS.replace("coeff = 5", "coeff = \"-1/2\"");
        assert_eq!(parse_witness_family(&frac, true).unwrap().perturbations()[0].coeff, Scalar::ratio(-1, 2));
        assert!(matches!(parse_witness_family("hidden = 3", true), Err(LoadError::Document(_))));
        assert!(matches!(
            parse_witness_family("hidden = \"ad(L[0,\"", true),
            Err(LoadError::Field { .. })
        ));
    }
}
