//! Mini-grammar for command-line values.
//!
//! * scalars: `2`, `-0.5`, `1/3`, `3+0i`, `2-1.5i`, `-i`
//! * sequences: `1,0,-2` (entries are scalars)
//! * polynomials: `1+2x`, `1/2 - x^3`, `(1+2i)x^2`, `0.5*x`
//! * spaces: `lp:<p>`, `c0`, `poly`
//! * transforms: `power:<n>`, `multiple:<scalar>`, `swap`
//! * grids: `re0:re1:step,im0:im1:step`

use hclab::{Scalar, Space, Vector};

/// Upper limit on the number of points a `--grid` may expand to.
pub const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GrammarError(pub String);

impl std::fmt::Display for GrammarError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

type Parsed<T> = Result<T, GrammarError>;

fn fail<T>(msg: impl Into<String>) -> Parsed<T> {
    Err(GrammarError(msg.into()))
}

/// A real number, decimal or `p/q`.
pub fn parse_real(s: &str) -> Parsed<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| GrammarError(format!("bad numerator in '{s}'")))?;
            let q: f64 = q.trim().parse().map_err(|_| GrammarError(format!("bad denominator in '{s}'")))?;
            if q == 0.0 {
                return fail(format!("zero denominator in '{s}'"));
            }
            p / q
        }
        None => s.parse().map_err(|_| GrammarError(format!("not a number: '{s}'")))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        fail(format!("not a finite number: '{s}'"))
    }
}

/// Byte index of the sign that separates real and imaginary parts, if any.
fn split_sign(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
}

fn parse_imag(s: &str) -> Parsed<f64> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => {
            let s = s.strip_suffix('*').unwrap_or(s);
            parse_real(s)
        }
    }
}

/// A complex scalar `a`, `bi` or `a+bi`.
pub fn parse_complex(s: &str) -> Parsed<Scalar> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return fail("empty scalar");
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Scalar::new(parse_real(&t)?, 0.0));
    };
    match split_sign(body) {
        Some(k) => Ok(Scalar::new(parse_real(&body[..k])?, parse_imag(&body[k..])?)),
        None => Ok(Scalar::new(0.0, parse_imag(body)?)),
    }
}

/// Comma-separated scalars.
pub fn parse_sequence(s: &str) -> Parsed<Vec<Scalar>> {
    s.split(',').map(parse_complex).collect()
}

/// Splits at top-level `+`/`-`, keeping the sign with the following term.
fn poly_terms(s: &str) -> Parsed<Vec<String>> {
    let mut terms = Vec::new();
    let mut current = String::new();
    let mut depth = 0i32;
    let mut prev: Option<char> = None;
    for ch in s.chars().filter(|c| !c.is_whitespace()) {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return fail(format!("unbalanced ')' in '{s}'"));
                }
            }
            '+' | '-' if depth == 0 && !matches!(prev, None | Some('e' | 'E' | '^')) => {
                if !current.is_empty() {
                    terms.push(std::mem::take(&mut current));
                }
            }
            _ => {}
        }
        current.push(ch);
        prev = Some(ch);
    }
    if depth != 0 {
        return fail(format!("unbalanced '(' in '{s}'"));
    }
    if !current.is_empty() {
        terms.push(current);
    }
    if terms.is_empty() {
        return fail("empty polynomial");
    }
    Ok(terms)
}

fn parse_coefficient(s: &str) -> Parsed<Scalar> {
    let (sign, body) = match s.as_bytes().first() {
        Some(b'+') => (1.0, &s[1..]),
        Some(b'-') => (-1.0, &s[1..]),
        _ => (1.0, s),
    };
    let body = body.strip_suffix('*').unwrap_or(body);
    let value = if body.is_empty() {
        Scalar::new(1.0, 0.0)
    } else if let Some(inner) = body.strip_prefix('(').and_then(|b| b.strip_suffix(')')) {
        parse_complex(inner)?
    } else {
        parse_complex(body)?
    };
    Ok(value * sign)
}

/// Polynomial in `x` with monomial terms; like powers are added.
pub fn parse_poly(s: &str) -> Parsed<Vec<Scalar>> {
    let mut coeffs: Vec<Scalar> = Vec::new();
    for term in poly_terms(s)? {
        let (coef, power) = match term.find('x') {
            Some(k) => {
                let rest = &term[k + 1..];
                let power = if rest.is_empty() {
                    1
                } else if let Some(p) = rest.strip_prefix('^') {
                    p.parse::<usize>()
                        .map_err(|_| GrammarError(format!("bad exponent in '{term}'")))?
                } else {
                    return fail(format!("unexpected '{rest}' after x in '{term}'"));
                };
                (parse_coefficient(&term[..k])?, power)
            }
            None => (parse_coefficient(&term)?, 0),
        };
        if power > hclab::space::MAX_POLY_DEGREE {
            return fail(format!("degree {power} exceeds {}", hclab::space::MAX_POLY_DEGREE));
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, Scalar::new(0.0, 0.0));
        }
        coeffs[power] += coef;
    }
    Ok(coeffs)
}

/// A vector of `space`: a polynomial for `Poly`, a comma list otherwise.
pub fn parse_vector(s: &str, space: Space) -> Result<Vector, String> {
    let coeffs = match space {
        Space::Poly { .. } => parse_poly(s),
        _ => parse_sequence(s),
    }
    .map_err(|e| e.0)?;
    Vector::new(space, coeffs).map_err(|e| e.to_string())
}

/// Space names before the interval of `poly` is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceArg {
    Sequence(Space),
    Poly,
}

pub fn parse_space(s: &str) -> Parsed<SpaceArg> {
    let s = s.trim();
    if s == "c0" {
        return Ok(SpaceArg::Sequence(Space::C0));
    }
    if s == "poly" {
        return Ok(SpaceArg::Poly);
    }
    if let Some(p) = s.strip_prefix("lp:") {
        let p = parse_real(p)?;
        return Space::lp(p)
            .map(SpaceArg::Sequence)
            .map_err(|e| GrammarError(e.to_string()));
    }
    fail(format!("unknown space '{s}', expected lp:<p>, c0 or poly"))
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransformArg {
    Power(usize),
    Multiple(Scalar),
    Swap,
}

pub fn parse_transform(s: &str) -> Parsed<TransformArg> {
    let s = s.trim();
    if s == "swap" {
        return Ok(TransformArg::Swap);
    }
    if let Some(n) = s.strip_prefix("power:") {
        return n
            .trim()
            .parse()
            .map(TransformArg::Power)
            .map_err(|_| GrammarError(format!("bad power in '{s}'")));
    }
    if let Some(l) = s.strip_prefix("multiple:") {
        return parse_complex(l).map(TransformArg::Multiple);
    }
    fail(format!("unknown transform '{s}', expected power:<n>, multiple:<lambda> or swap"))
}

fn parse_range(s: &str) -> Parsed<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return fail(format!("range '{s}' must be start:stop:step"));
    };
    let (lo, hi, step) = (parse_real(lo)?, parse_real(hi)?, parse_real(step)?);
    if !(step > 0.0) || hi < lo {
        return fail(format!("range '{s}' needs step > 0 and stop >= start"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() + 1.0;
    if count > MAX_GRID_POINTS as f64 {
        return fail(format!("range '{s}' is too long"));
    }
    Ok((0..count as usize).map(|k| lo + k as f64 * step).collect())
}

/// Rectangular grid, real part outer, imaginary part inner.
pub fn parse_grid(s: &str) -> Parsed<Vec<Scalar>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some((re, im)) = s.split_once(',') else {
        return fail(format!("grid '{s}' must be re0:re1:step,im0:im1:step"));
    };
    let (re, im) = (parse_range(re)?, parse_range(im)?);
    if re.len() * im.len() > MAX_GRID_POINTS {
        return fail(format!("grid '{s}' has more than {MAX_GRID_POINTS} points"));
    }
    Ok(re
        .iter()
        .flat_map(|&x| im.iter().map(move |&y| Scalar::new(x, y)))
        .collect())
}
