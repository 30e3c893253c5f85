//! Operator expressions over `y`, `p`, `i`, `hbar`, `m`, `omega`, `lambda`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' integer)?
//! atom   := literal | identifier | '(' expr ')'
//! ```
//!
//! There is no division operator and no unary minus. A literal is a decimal
//! or a fraction of two decimals written without spaces, so `1/2` is a single
//! token. Every product is normal ordered as it is evaluated.

use std::fmt;

use thiserror::Error;

use crate::weyl::{
    parse_rational, AlgebraError, OperatorPoly, RationalComplex, SymbolicParams, WeylAlgebra,
    MAX_EXPONENT,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("expression is empty")]
    Empty,
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<&'static str>, found: String },
    #[error("negative exponent at byte {offset}")]
    NegativeExponent { offset: usize },
    #[error("exponent {exponent} at byte {offset} exceeds the cap of {}", MAX_EXPONENT)]
    ExponentTooLarge { offset: usize, exponent: String },
    #[error("unknown identifier {name:?} at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Literal(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    /// Any byte that starts no token.
    Stray(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Literal(s) => write!(f, "literal {s}"),
            Tok::Ident(s) => write!(f, "identifier {s}"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Stray(c) => write!(f, "{c:?}"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Vec<(usize, Tok)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let number = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j + 1 < bytes.len() && bytes[j] == b'.' && bytes[j + 1].is_ascii_digit() {
            j += 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
        }
        j
    };
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                let mut j = number(i);
                if j == i {
                    // a lone '.'
                    j = i + 1;
                    Tok::Stray('.')
                } else {
                    if j + 1 < bytes.len() && bytes[j] == b'/' && bytes[j + 1].is_ascii_digit() {
                        j = number(j + 1);
                    }
                    Tok::Literal(text[i..j].to_string())
                }
                .also(|_| i = j)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                i = j;
                Tok::Ident(text[start..j].to_string())
            }
            b'+' => Tok::Plus.also(|_| i += 1),
            b'-' => Tok::Minus.also(|_| i += 1),
            b'*' => Tok::Star.also(|_| i += 1),
            b'^' => Tok::Caret.also(|_| i += 1),
            b'(' => Tok::LParen.also(|_| i += 1),
            b')' => Tok::RParen.also(|_| i += 1),
            _ => {
                let c = text[i..].chars().next().unwrap();
                i += c.len_utf8();
                Tok::Stray(c)
            }
        };
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    out
}

trait Also: Sized {
    fn also(self, f: impl FnOnce(&Self)) -> Self {
        f(&self);
        self
    }
}

impl Also for Tok {}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    params: &'a SymbolicParams,
    algebra: WeylAlgebra,
}

const ATOM_START: &[&str] = &["literal", "identifier", "'('"];

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().to_string(),
        }
    }

    fn expr(&mut self) -> Result<OperatorPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<OperatorPoly, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = self.algebra.mul(&acc, &rhs)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<OperatorPoly, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.pos += 1;
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Minus => Err(ParseError::NegativeExponent { offset }),
            Tok::Literal(s) if s.bytes().all(|b| b.is_ascii_digit()) => {
                self.pos += 1;
                match s.parse::<u32>() {
                    Ok(e) if e <= MAX_EXPONENT => Ok(self.algebra.pow(&base, e)?),
                    _ => Err(ParseError::ExponentTooLarge { offset, exponent: s }),
                }
            }
            _ => Err(self.unexpected(&["non-negative integer exponent"])),
        }
    }

    fn atom(&mut self) -> Result<OperatorPoly, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Literal(s) => {
                self.pos += 1;
                let value = parse_rational(&s).map_err(|_| ParseError::Syntax {
                    offset,
                    expected: vec!["literal with a non-zero denominator"],
                    found: format!("literal {s}"),
                })?;
                Ok(OperatorPoly::constant(RationalComplex::real(value)))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                let real = |r: &crate::weyl::Rational| OperatorPoly::constant(RationalComplex::real(r.clone()));
                Ok(match name.as_str() {
                    "y" => OperatorPoly::y(),
                    "p" => OperatorPoly::p(),
                    "i" => OperatorPoly::constant(RationalComplex::i()),
                    "hbar" => real(&self.params.hbar),
                    "m" => real(&self.params.m),
                    "omega" => real(&self.params.omega),
                    "lambda" => real(&self.params.lambda),
                    _ => return Err(ParseError::UnknownIdentifier { offset, name }),
                })
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["'+'", "'-'", "'*'", "'^'", "')'"]));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.unexpected(ATOM_START)),
        }
    }
}

/// Parses `text` and evaluates it to a normal-ordered polynomial, with
/// `m`, `omega`, `lambda` and `hbar` taken from `params`.
pub fn parse_operator(text: &str, params: &SymbolicParams) -> Result<OperatorPoly, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser { toks: lex(text), pos: 0, params, algebra: params.algebra() };
    let value = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.unexpected(&["'+'", "'-'", "'*'", "'^'", "end of input"]));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{build_hamiltonian, HamiltonianForm, Rational};

    fn params(m: i64, omega: i64, lambda: (i64, i64), hbar: i64) -> SymbolicParams {
        SymbolicParams::new(
            Rational::from_integer(m.into()),
            Rational::from_integer(omega.into()),
            Rational::new(lambda.0.into(), lambda.1.into()),
            Rational::from_integer(hbar.into()),
        )
        .unwrap()
    }

    #[test]
    fn canonical_commutator() {
        let sp = params(1, 1, (1, 2), 3);
        let got = parse_operator("y*p - p*y", &sp).unwrap();
        assert_eq!(got, OperatorPoly::constant(sp.algebra().i_hbar()));
    }

    #[test]
    fn literals_are_exact() {
        let sp = params(1, 1, (1, 2), 1);
        let got = parse_operator("0.1 + 1/10 + 2.5/5", &sp).unwrap();
        assert_eq!(got, OperatorPoly::constant(RationalComplex::real(Rational::new(7.into(), 10.into()))));
    }

    #[test]
    fn no_division_operator() {
        let sp = params(1, 1, (1, 2), 1);
        // `2/2` lexes as one literal, which is not an integer exponent
        let err = parse_operator("p^2/2", &sp).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 2, .. }), "{err}");
        let err = parse_operator("p*p/2", &sp).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 3, .. }), "{err}");
        let err = parse_operator("(p + (m*lambda/2)*y)^2", &sp).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 14, .. }), "{err}");
    }

    #[test]
    fn completed_square() {
        let sp = params(1, 1, (1, 1), 1);
        let got = parse_operator("(p + (1/2)*m*lambda*y)^2", &sp).unwrap();
        // oracle: two explicit normal-ordered products
        let alg = sp.algebra();
        let half = RationalComplex::real(Rational::new(1.into(), 2.into()));
        let base = OperatorPoly::p() + OperatorPoly::y().scale(&half);
        assert_eq!(got, alg.mul(&base, &base).unwrap());
        // p² + y·p + y²/4 − iħ/2
        let expected = OperatorPoly::from_terms([
            (0, 2, RationalComplex::from_int(1)),
            (1, 1, RationalComplex::from_int(1)),
            (2, 0, RationalComplex::real(Rational::new(1.into(), 4.into()))),
            (0, 0, RationalComplex::imag(Rational::new((-1).into(), 2.into()))),
        ])
        .unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn hamiltonian_from_text() {
        let sp = params(2, 3, (1, 3), 1);
        let text = "(1/2)*(1/m)*p^2";
        assert!(matches!(parse_operator(text, &sp), Err(ParseError::Syntax { .. })));
        // 1/(2m) = 1/4, mω²/2 = 9, λ/2 = 1/6
        let got = parse_operator("(1/4)*p^2 + 9*y^2 + (1/6)*y*p", &sp).unwrap();
        assert_eq!(got, build_hamiltonian(&sp, HamiltonianForm::Eq2).unwrap());
    }

    #[test]
    fn error_kinds() {
        let sp = params(1, 1, (1, 2), 1);
        assert_eq!(parse_operator("  ", &sp), Err(ParseError::Empty));
        assert_eq!(parse_operator("y^-1", &sp), Err(ParseError::NegativeExponent { offset: 2 }));
        assert_eq!(
            parse_operator("y + q", &sp),
            Err(ParseError::UnknownIdentifier { offset: 4, name: "q".into() })
        );
        assert!(matches!(parse_operator("-y", &sp), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_operator("2 y", &sp), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_operator("(y", &sp), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_operator("y^1.5", &sp), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_operator("y^17", &sp), Err(ParseError::ExponentTooLarge { .. })));
        assert!(matches!(parse_operator("1/0", &sp), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_operator("y # p", &sp), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_operator("y^9*y^9", &sp), Err(ParseError::Algebra(_))));
    }

    #[test]
    fn syntax_error_lists_expected_tokens() {
        let sp = params(1, 1, (1, 2), 1);
        match parse_operator("y + * p", &sp).unwrap_err() {
            ParseError::Syntax { offset, expected, found } => {
                assert_eq!(offset, 4);
                assert_eq!(expected, vec!["literal", "identifier", "'('"]);
                assert_eq!(found, "'*'");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn printed_forms_reparse() {
        let sp = params(3, 2, (5, 7), 2);
        for form in HamiltonianForm::ALL {
            let h = build_hamiltonian(&sp, form).unwrap();
            let again = parse_operator(&h.to_expr_string(), &sp).unwrap();
            assert_eq!(again, h);
        }
        let neg = parse_operator("0 - 3/4*i*y^2*p", &sp).unwrap();
        assert_eq!(parse_operator(&neg.to_expr_string(), &sp).unwrap(), neg);
    }
}
