//! Text and JSON forms of truncated series.
//!
//! Text: `c*x1^2*x2 - x2^3 + ...`, terms ordered by total degree and then
//! by decreasing exponent vector. Coefficients whose text is not atomic are
//! parenthesized; a coefficient of `1` is omitted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Ring;
use crate::series::trunc::{Exps, TruncSeries};

/// Default variable names `x1, x2, ...`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub coeff: String,
}

impl<S: Ring> TruncSeries<S> {
    fn sorted_terms(&self) -> Vec<(&Exps, &S)> {
        let mut v: Vec<_> = self.terms().collect();
        v.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            da.cmp(&db).then_with(|| b.0.cmp(a.0))
        });
        v
    }

    pub fn to_text(&self) -> String {
        self.to_text_with(&default_names(self.nvars()))
    }

    pub fn to_text_with<N: AsRef<str>>(&self, names: &[N]) -> String {
        assert!(names.len() >= self.nvars(), "not enough variable names");
        let one = S::one(self.ctx()).to_text();
        let mut out = String::new();
        for (i, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| {
                    if k == 1 {
                        names[j].as_ref().to_string()
                    } else {
                        format!("{}^{k}", names[j].as_ref())
                    }
                })
                .collect();
            let mono = mono.join("*");
            let t = c.to_text();
            let (negative, body) = match t.strip_prefix('-') {
                _ if t == one => (false, "1".to_string()),
                Some(rest) if simple_text(rest) => (true, rest.to_string()),
                _ if c.is_atomic_text() => (false, t),
                _ if c.neg_ref().to_text() == one => (true, "1".to_string()),
                _ => (false, format!("({t})")),
            };
            let is_one = body == "1";
            let term = match (mono.is_empty(), is_one) {
                (true, _) => body,
                (false, true) => mono,
                (false, false) => format!("{body}*{mono}"),
            };
            match (i, negative) {
                (0, false) => out.push_str(&term),
                (0, true) => {
                    out.push('-');
                    out.push_str(&term);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&term);
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&term);
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn parse(ctx: &S::Ctx, nvars: usize, order: u32, s: &str) -> Result<Self> {
        Self::parse_with(ctx, &default_names(nvars), order, s)
    }

    pub fn parse_with<N: AsRef<str>>(ctx: &S::Ctx, names: &[N], order: u32, s: &str) -> Result<Self> {
        let nvars = names.len();
        let mut out = Self::zero(ctx, nvars, order);
        for (negative, term) in split_terms(s)? {
            let (e, c) = parse_term::<S, N>(ctx, names, &term)?;
            out.add_term(e, if negative { c.neg_ref() } else { c });
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.sorted_terms()
            .into_iter()
            .map(|(e, c)| TermJson {
                exps: e.clone(),
                coeff: c.to_text(),
            })
            .collect()
    }

    pub fn from_json(ctx: &S::Ctx, nvars: usize, order: u32, terms: &[TermJson]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|t| Ok((t.exps.clone(), S::parse_text(ctx, &t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(ctx, nvars, order, parsed)
    }
}

/// Text without internal signs or spaces (an exponent sign as in `1e-7`
/// is allowed).
fn simple_text(t: &str) -> bool {
    let b = t.as_bytes();
    !t.is_empty()
        && !t.contains(char::is_whitespace)
        && !t.contains(['+', '(', '['])
        && b.iter()
            .enumerate()
            .all(|(i, &ch)| ch != b'-' || (i > 0 && b[i - 1] == b'e'))
}

/// Splits at top-level `+`/`-` signs, keeping the sign of each term.
fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut negative = false;
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(Error::parse(format!("unbalanced brackets in {s:?}")));
        }
        let binary = depth == 0
            && (ch == '+' || ch == '-')
            && !matches!(prev, Some('*' | '^' | '/' | 'e'));
        if binary {
            if !cur.trim().is_empty() {
                out.push((negative, cur.trim().to_string()));
                negative = false;
                cur.clear();
            }
            negative ^= ch == '-';
        } else {
            cur.push(ch);
        }
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    if depth != 0 {
        return Err(Error::parse(format!("unbalanced brackets in {s:?}")));
    }
    if cur.trim().is_empty() {
        return Err(Error::parse(format!("missing term in {s:?}")));
    }
    out.push((negative, cur.trim().to_string()));
    Ok(out)
}

/// Splits a term at top-level `*`.
fn split_factors(term: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in term.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if ch == '*' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    out.push(cur.trim().to_string());
    out
}

fn parse_term<S: Ring, N: AsRef<str>>(ctx: &S::Ctx, names: &[N], term: &str) -> Result<(Exps, S)> {
    let mut e = vec![0u32; names.len()];
    let mut c = S::one(ctx);
    for f in split_factors(term) {
        if f.is_empty() {
            return Err(Error::parse(format!("empty factor in term {term:?}")));
        }
        if let Some(inner) = f.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            c = c.mul_ref(&S::parse_text(ctx, inner)?);
            continue;
        }
        let (base, exp) = match f.split_once('^') {
            Some((b, k)) => {
                let k: u32 = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(format!("bad exponent in {f:?}")))?;
                (b.trim(), k)
            }
            None => (f.as_str(), 1),
        };
        if let Some(j) = names.iter().position(|n| n.as_ref() == base) {
            e[j] += exp;
        } else if base.starts_with(|ch: char| ch.is_ascii_alphabetic()) {
            return Err(Error::parse(format!("unknown variable {base:?}")));
        } else {
            c = c.mul_ref(&S::parse_text(ctx, base)?.pow(exp as u64));
        }
    }
    Ok((e, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::{FiniteField, Padic};
    use num_rational::BigRational;

    type Q = TruncSeries<BigRational>;

    #[test]
    fn canonical_round_trip() {
        let s = Q::parse(&(), 2, 6, "1 + x1^2*x2").unwrap();
        assert_eq!(s.to_text(), "1 + x1^2*x2");
        let t = Q::parse(&(), 2, 6, "x2*x1 - 3/2*x1^2 + -x2 - 4").unwrap();
        assert_eq!(t.to_text(), "-4 - x2 - 3/2*x1^2 + x1*x2");
        assert_eq!(Q::parse(&(), 2, 6, &t.to_text()).unwrap().to_text(), t.to_text());
        assert_eq!(Q::zero(&(), 2, 3).to_text(), "0");
    }

    #[test]
    fn truncation_applies_on_parse() {
        let s = Q::parse(&(), 1, 2, "x1 + x1^3").unwrap();
        assert_eq!(s.to_text(), "x1");
    }

    #[test]
    fn custom_names() {
        let names = ["s1", "s2"];
        let s = Q::parse_with(&(), &names, 4, "s2^2 - s1^2").unwrap();
        assert_eq!(s.to_text_with(&names), "-s1^2 + s2^2");
        assert!(Q::parse_with(&(), &names, 4, "x1").is_err());
    }

    #[test]
    fn padic_and_field_coefficients() {
        let k = Padic::new(5, 6).unwrap();
        let s = TruncSeries::<crate::rings::PadicNum>::parse(&k, 2, 4, "5*x1^2 + 1/3*x2").unwrap();
        let t = s.to_text();
        let back = TruncSeries::<crate::rings::PadicNum>::parse(&k, 2, 4, &t).unwrap();
        assert_eq!(back.to_text(), t);

        let f9 = FiniteField::extension(3, 2).unwrap();
        let s = TruncSeries::<crate::rings::FqElem>::parse(&f9, 1, 4, "[1,2]*x1 + 2*x1^3").unwrap();
        assert_eq!(s.to_text(), "[1,2]*x1 + [2,0]*x1^3");
        assert_eq!(TruncSeries::parse(&f9, 1, 4, &s.to_text()).unwrap(), s);
    }

    #[test]
    fn json_round_trip() {
        let s = Q::parse(&(), 2, 5, "2 - x1*x2^2 + 7/3*x2").unwrap();
        let j = serde_json::to_string(&s.to_json()).unwrap();
        let back: Vec<TermJson> = serde_json::from_str(&j).unwrap();
        assert_eq!(Q::from_json(&(), 2, 5, &back).unwrap().to_text(), s.to_text());
    }

    #[test]
    fn malformed_text_rejected() {
        assert!(Q::parse(&(), 1, 3, "x1 +").is_err());
        assert!(Q::parse(&(), 1, 3, "(x1").is_err());
        assert!(Q::parse(&(), 1, 3, "").is_err());
    }
}
