//! Text forms accepted on the command line.

use num_complex::Complex64;

use crate::{Error, Result};

/// Parses `a`, `bi`, `a+bi`, `a - b i`, `i`, `-i` and similar forms.
///
/// Whitespace is ignored. `j` is accepted in place of `i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty complex number".into()));
    }
    let bad = || Error::Parse(format!("cannot parse complex number {text:?}"));
    let s = s.replace('j', "i");
    if !s.ends_with('i') {
        return parse_real(&s).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    }
    let body = &s[..s.len() - 1];
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let (re, im) = match split {
        Some(i) => (parse_real(&body[..i]).ok_or_else(bad)?, imag_part(&body[i..]).ok_or_else(bad)?),
        None => (0.0, imag_part(body).ok_or_else(bad)?),
    };
    Ok(Complex64::new(re, im))
}

fn imag_part(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => parse_real(s.strip_suffix('*').unwrap_or(s)),
    }
}

fn parse_real(s: &str) -> Option<f64> {
    // Rust accepts "inf" and "NaN"; neither is a usable spectral parameter.
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}

/// A closed rectangle `[re0, re1] x [im0, im1]` in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Result<Rect> {
        let r = Rect { re0, re1, im0, im1 };
        if ![re0, re1, im0, im1].iter().all(|v| v.is_finite()) || re0 >= re1 || im0 >= im1 {
            return Err(Error::domain(format!("degenerate rectangle {r:?}")));
        }
        Ok(r)
    }

    pub fn contains(&self, s: Complex64) -> bool {
        s.re >= self.re0 && s.re <= self.re1 && s.im >= self.im0 && s.im <= self.im1
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    pub fn diameter(&self) -> f64 {
        (self.re1 - self.re0).hypot(self.im1 - self.im0)
    }
}

/// Parses `re0,re1,im0,im1`.
pub fn parse_rect(text: &str) -> Result<Rect> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::Parse(format!("rectangle needs four comma-separated numbers, got {text:?}")));
    }
    let mut v = [0.0; 4];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = parse_real(p).ok_or_else(|| Error::Parse(format!("bad rectangle coordinate {p:?}")))?;
    }
    Rect::new(v[0], v[1], v[2], v[3]).map_err(|e| Error::Parse(e.to_string()))
}
