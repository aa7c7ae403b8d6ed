//! Points of the extended complex plane and Möbius transformations.

pub use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of the Riemann sphere `C ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub fn new(re: f64, im: f64) -> Self {
        ExtComplex::Finite(Complex64::new(re, im))
    }

    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    /// Chordal distance on the unit Riemann sphere; bounded by 2 and finite at ∞.
    pub fn chordal_distance(self, other: ExtComplex) -> f64 {
        match (self, other) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => 0.0,
            (ExtComplex::Finite(z), ExtComplex::Infinity) | (ExtComplex::Infinity, ExtComplex::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (ExtComplex::Finite(z), ExtComplex::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
        }
    }
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

impl std::fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtComplex::Infinity => write!(f, "inf"),
            ExtComplex::Finite(z) => {
                if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
                    write!(f, "{:.16e}-{:.16e}i", z.re, -z.im)
                } else {
                    write!(f, "{:.16e}+{:.16e}i", z.re, z.im)
                }
            }
        }
    }
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i` or `inf`.
pub fn parse_complex(text: &str) -> Option<ExtComplex> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    if matches!(t.as_str(), "inf" | "∞" | "infinity") {
        return Some(ExtComplex::Infinity);
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse().ok().map(|re| ExtComplex::new(re, 0.0));
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let parse_im = |s: &str| -> Option<f64> {
        match s {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => s.parse().ok(),
        }
    };
    match split {
        Some(k) => Some(ExtComplex::new(body[..k].parse().ok()?, parse_im(&body[k..])?)),
        None => Some(ExtComplex::new(0.0, parse_im(body)?)),
    }
}

/// `z ↦ (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mobius { a: one, b: zero, c: zero, d: one }
    }

    fn normalized(self) -> Self {
        let s = [self.a, self.b, self.c, self.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        Mobius { a: self.a / s, b: self.b / s, c: self.c / s, d: self.d / s }
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: ExtComplex) -> ExtComplex {
        match z {
            ExtComplex::Infinity => {
                if self.c == Complex64::new(0.0, 0.0) {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(self.a / self.c)
                }
            }
            ExtComplex::Finite(z) => {
                let den = self.c * z + self.d;
                if den == Complex64::new(0.0, 0.0) {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .normalized()
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }.normalized()
    }

    /// The cross-ratio map sending `(z1, z2, z3)` to `(0, 1, ∞)`.
    pub fn to_standard(z: [ExtComplex; 3]) -> Option<Mobius> {
        use ExtComplex::*;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let m = match z {
            [Finite(z1), Finite(z2), Finite(z3)] => Mobius {
                a: z2 - z3,
                b: -z1 * (z2 - z3),
                c: z2 - z1,
                d: -z3 * (z2 - z1),
            },
            [Infinity, Finite(z2), Finite(z3)] => Mobius { a: zero, b: z2 - z3, c: one, d: -z3 },
            [Finite(z1), Infinity, Finite(z3)] => Mobius { a: one, b: -z1, c: one, d: -z3 },
            [Finite(z1), Finite(z2), Infinity] => Mobius { a: one, b: -z1, c: zero, d: z2 - z1 },
            _ => return None,
        };
        if m.determinant().norm() == 0.0 {
            return None;
        }
        Some(m.normalized())
    }

    /// The unique Möbius map sending `from[i]` to `to[i]`; `None` if either
    /// triple has repeated points.
    pub fn from_triples(from: [ExtComplex; 3], to: [ExtComplex; 3]) -> Option<Mobius> {
        let s = Mobius::to_standard(from)?;
        let t = Mobius::to_standard(to)?;
        Some(t.inverse().compose(&s))
    }
}
