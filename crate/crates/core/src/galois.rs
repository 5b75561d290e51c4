//! Table-driven arithmetic in GF(p^h) for the plane orders this crate supports.
//!
//! Elements are labelled `0..q`. A label's base-`p` digits (least significant
//! first) are the coefficients of the polynomial it stands for, so `0` is zero,
//! `1` is one and, for `h > 1`, `p` is the class of `x`.

use std::fmt;

use thiserror::Error;

/// Plane orders with a Desarguesian plane handled by this crate.
pub const SUPPORTED_ORDERS: [u32; 7] = [2, 3, 4, 5, 7, 8, 9];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("unsupported order {0}: supported plane orders are 2, 3, 4, 5, 7, 8, 9")]
    UnsupportedOrder(u32),
    #[error("malformed reduction polynomial {poly:?}: {reason}")]
    MalformedPolynomial { poly: Vec<u32>, reason: String },
    #[error("reduction polynomial {0:?} is reducible over the prime field")]
    ReduciblePolynomial(Vec<u8>),
    #[error("field axiom check failed: {0}")]
    AxiomViolation(String),
    #[error("automorphism index {k} out of range for extension degree {h}")]
    AutomorphismOutOfRange { k: u32, h: u32 },
    #[error("element label {x} out of range for GF({q})")]
    ElementOutOfRange { x: u32, q: u32 },
}

/// Characteristic, degree and reduction polynomial of a small finite field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u8,
    h: u8,
    /// Coefficients, constant term first; monic of degree `h`.
    reduction_poly: Vec<u8>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) mod {}", self.q(), self.poly_string())
    }
}

fn prime_power(q: u32) -> Option<(u8, u8)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut h = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        h += 1;
    }
    (rest == 1).then_some((p as u8, h))
}

impl FieldSpec {
    /// The default representation for order `q`: the prime field itself, or
    /// the Conway polynomial (x²+x+1, x³+x+1, x²+2x+2) for q = 4, 8, 9.
    pub fn default_for(q: u32) -> Result<Self, FieldError> {
        let poly: Vec<u32> = match q {
            2 | 3 | 5 | 7 => vec![0, 1],
            4 => vec![1, 1, 1],
            8 => vec![1, 1, 0, 1],
            9 => vec![2, 2, 1],
            _ => return Err(FieldError::UnsupportedOrder(q)),
        };
        Self::new(q, &poly)
    }

    /// Validate `poly` (constant term first) as a reduction polynomial for GF(q).
    pub fn new(q: u32, poly: &[u32]) -> Result<Self, FieldError> {
        if !SUPPORTED_ORDERS.contains(&q) {
            return Err(FieldError::UnsupportedOrder(q));
        }
        let (p, h) = prime_power(q).ok_or(FieldError::UnsupportedOrder(q))?;
        let malformed = |reason: &str| FieldError::MalformedPolynomial {
            poly: poly.to_vec(),
            reason: reason.to_string(),
        };
        if poly.len() != h as usize + 1 {
            return Err(malformed(&format!("expected degree {h} (that is {} coefficients)", h + 1)));
        }
        if let Some(c) = poly.iter().find(|&&c| c >= p as u32) {
            return Err(malformed(&format!("coefficient {c} is not reduced modulo {p}")));
        }
        if poly[h as usize] != 1 {
            return Err(malformed("leading coefficient must be 1"));
        }
        let reduction_poly: Vec<u8> = poly.iter().map(|&c| c as u8).collect();
        // Degree 2 and 3 polynomials are irreducible exactly when they have no root.
        if h > 1 {
            let has_root = (0..p as u32).any(|x| {
                reduction_poly
                    .iter()
                    .rev()
                    .fold(0u32, |acc, &c| (acc * x + c as u32) % p as u32)
                    == 0
            });
            if has_root {
                return Err(FieldError::ReduciblePolynomial(reduction_poly));
            }
        }
        Ok(FieldSpec { p, h, reduction_poly })
    }

    /// Parse a comma-separated coefficient list, constant term first.
    pub fn parse(q: u32, text: &str) -> Result<Self, FieldError> {
        let coeffs: Result<Vec<u32>, _> = text.split(',').map(|c| c.trim().parse::<u32>()).collect();
        match coeffs {
            Ok(c) => Self::new(q, &c),
            Err(_) => Err(FieldError::MalformedPolynomial {
                poly: vec![],
                reason: format!("cannot parse {text:?} as comma-separated integers"),
            }),
        }
    }

    pub fn p(&self) -> u32 {
        self.p as u32
    }

    pub fn h(&self) -> u32 {
        self.h as u32
    }

    pub fn q(&self) -> u32 {
        (self.p as u32).pow(self.h as u32)
    }

    pub fn reduction_poly(&self) -> &[u8] {
        &self.reduction_poly
    }

    /// Comma-separated coefficients, the format accepted by [`FieldSpec::parse`].
    pub fn coefficients_string(&self) -> String {
        self.reduction_poly.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn poly_string(&self) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.reduction_poly.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coeff = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            terms.push(match i {
                0 => coeff,
                1 => format!("{coeff}x"),
                _ => format!("{coeff}x^{i}"),
            });
        }
        terms.join("+")
    }
}

/// Complete lookup tables for one finite field.
#[derive(Clone)]
pub struct FieldTables {
    spec: FieldSpec,
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    frob: Vec<Vec<u8>>,
}

impl fmt::Debug for FieldTables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldTables").field("spec", &self.spec).finish_non_exhaustive()
    }
}

impl FieldTables {
    pub fn build(spec: FieldSpec) -> Result<Self, FieldError> {
        let p = spec.p as usize;
        let h = spec.h as usize;
        let q = spec.q() as usize;
        let digits = |x: usize| -> Vec<usize> {
            let mut d = vec![0; h];
            let mut rest = x;
            for slot in d.iter_mut() {
                *slot = rest % p;
                rest /= p;
            }
            d
        };
        let label = |d: &[usize]| -> usize { d.iter().rev().fold(0, |acc, &c| acc * p + c) };

        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = label(&sum) as u8;

                let mut prod = vec![0usize; 2 * h];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                // x^h = -(r_0 + r_1 x + ... + r_{h-1} x^{h-1})
                for deg in (h..2 * h).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    prod[deg] = 0;
                    for (i, &r) in spec.reduction_poly[..h].iter().enumerate() {
                        let sub = (c * r as usize) % p;
                        prod[deg - h + i] = (prod[deg - h + i] + p - sub) % p;
                    }
                }
                mul[a * q + b] = label(&prod[..h]) as u8;
            }
        }

        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap_or(0) as u8;
            if a != 0 {
                match (1..q).find(|&b| mul[a * q + b] == 1) {
                    Some(b) => inv[a] = b as u8,
                    None => {
                        return Err(FieldError::AxiomViolation(format!("element {a} has no inverse")))
                    }
                }
            }
        }

        let mut frob = Vec::with_capacity(h);
        for k in 0..h {
            let e = p.pow(k as u32);
            let table: Vec<u8> = (0..q)
                .map(|x| {
                    let mut acc = 1u8;
                    for _ in 0..e {
                        acc = mul[acc as usize * q + x];
                    }
                    if x == 0 {
                        0
                    } else {
                        acc
                    }
                })
                .collect();
            frob.push(table);
        }

        let tables = FieldTables { spec, q, add, mul, neg, inv, frob };
        tables.check_axioms()?;
        Ok(tables)
    }

    pub fn build_default(q: u32) -> Result<Self, FieldError> {
        Self::build(FieldSpec::default_for(q)?)
    }

    fn check_axioms(&self) -> Result<(), FieldError> {
        let q = self.q as u8;
        let fail = |what: String| Err(FieldError::AxiomViolation(what));
        for a in 0..q {
            if self.add(a, 0) != a || self.mul(a, 1) != a {
                return fail(format!("identity fails at {a}"));
            }
            if self.add(a, self.neg(a)) != 0 {
                return fail(format!("additive inverse fails at {a}"));
            }
            if a != 0 && self.mul(a, self.inv(a)) != 1 {
                return fail(format!("multiplicative inverse fails at {a}"));
            }
            for b in 0..q {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return fail(format!("commutativity fails at ({a}, {b})"));
                }
                if a != 0 && b != 0 && self.mul(a, b) == 0 {
                    return fail(format!("zero divisor ({a}, {b})"));
                }
                for c in 0..q {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return fail(format!("additive associativity fails at ({a}, {b}, {c})"));
                    }
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return fail(format!("multiplicative associativity fails at ({a}, {b}, {c})"));
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return fail(format!("distributivity fails at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        for (k, table) in self.frob.iter().enumerate() {
            for a in 0..q {
                for b in 0..q {
                    let (fa, fb) = (table[a as usize], table[b as usize]);
                    if table[self.add(a, b) as usize] != self.add(fa, fb)
                        || table[self.mul(a, b) as usize] != self.mul(fa, fb)
                    {
                        return fail(format!("frobenius {k} is not a homomorphism at ({a}, {b})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.q
    }

    /// Number of field automorphisms (the extension degree).
    #[inline]
    pub fn degree(&self) -> usize {
        self.frob.len()
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `inv(0)` is 0 and must not be relied upon.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    #[inline]
    pub fn div(&self, a: u8, b: u8) -> u8 {
        self.mul(a, self.inv(b))
    }

    /// `x ↦ x^(p^k)` without range checks.
    #[inline]
    pub fn frob(&self, k: usize, x: u8) -> u8 {
        self.frob[k][x as usize]
    }

    pub fn frobenius(&self, k: u32, x: u32) -> Result<u32, FieldError> {
        if k as usize >= self.frob.len() {
            return Err(FieldError::AutomorphismOutOfRange { k, h: self.frob.len() as u32 });
        }
        if x as usize >= self.q {
            return Err(FieldError::ElementOutOfRange { x, q: self.q as u32 });
        }
        Ok(self.frob[k as usize][x as usize] as u32)
    }

    pub fn pow(&self, a: u8, e: u32) -> u8 {
        (0..e).fold(1, |acc, _| self.mul(acc, a))
    }

    /// Smallest label generating the multiplicative group.
    pub fn primitive_element(&self) -> u8 {
        (1..self.q as u8)
            .find(|&g| {
                let mut x = g;
                let mut ord = 1;
                while x != 1 {
                    x = self.mul(x, g);
                    ord += 1;
                }
                ord == self.q - 1
            })
            .expect("finite field has a primitive element")
    }
}
