//! Arithmetic in the finite field GF(p^n).
//!
//! Elements are polynomials over GF(p) of degree < n, reduced modulo a fixed
//! monic irreducible polynomial. Each element is identified with the integer
//! `c_0 + c_1 p + ... + c_{n-1} p^{n-1}` of its coefficient vector, which
//! gives a dense index in `[0, q)`. The prime subfield occupies indices
//! `0..p`, so the integer `k < p` is also the field element `k`.
//!
//! Multiplication goes through log/antilog tables built once at construction.

use std::fmt;

use crate::error::FieldError;

/// Largest field order accepted by [`FiniteField::new`].
pub const MAX_FIELD_ORDER: u32 = 1 << 16;

/// Element of a [`FiniteField`], stored by its dense index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Dense index of the element; also its position in enumeration order.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    /// Wraps an index without range checking; callers guarantee `index < q`.
    #[inline]
    pub(crate) fn from_raw(index: u32) -> Self {
        FieldElement(index)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Unary and binary field operations, for callers that dispatch on an op name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
}

/// The field GF(p^n) with a deterministically chosen modulus.
#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    n: u32,
    q: u32,
    /// Modulus coefficients, little-endian, length n + 1, leading coefficient 1.
    modulus: Vec<u32>,
    /// exp[i] = g^i for a primitive element g, i in [0, q-1).
    exp: Vec<u32>,
    /// log[a] for a != 0; log[0] is unused.
    log: Vec<u32>,
    neg: Vec<u32>,
    /// Full addition table, present for small fields.
    add: Option<Vec<u32>>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

const ADD_TABLE_MAX_ORDER: u32 = 256;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power `q` into `(p, n)` with `q = p^n`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut n = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p, n))
}

impl FiniteField {
    /// Builds GF(p^n) using the smallest monic irreducible polynomial of degree n,
    /// where polynomials are ordered by the integer value of their lower coefficients.
    pub fn new(p: u32, n: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = checked_pow(p, n)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or(FieldError::TooLarge { p, n })?;

        let modulus = smallest_irreducible(p, n);
        let mut field = FiniteField {
            p,
            n,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            add: None,
        };
        field.neg = (0..q)
            .map(|a| field.digitwise(a, 0, |x, _| (p - x) % p))
            .collect();
        if q <= ADD_TABLE_MAX_ORDER {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.digitwise(a, b, |x, y| (x + y) % p);
                }
            }
            field.add = Some(table);
        }
        field.build_log_tables();
        Ok(field)
    }

    /// Builds the field of order `q`, which must be a prime power.
    pub fn with_order(q: u32) -> Result<Self, FieldError> {
        let (p, n) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, n)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, little-endian, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Element with the given dense index.
    pub fn element(&self, index: u32) -> Result<FieldElement, FieldError> {
        if index < self.q {
            Ok(FieldElement(index))
        } else {
            Err(FieldError::IndexOutOfRange { index, q: self.q })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, k: i64) -> FieldElement {
        FieldElement(k.rem_euclid(self.p as i64) as u32)
    }

    /// Element from little-endian polynomial coefficients.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.n as usize {
            return Err(FieldError::BadCoefficients);
        }
        let mut index = 0u32;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(FieldError::BadCoefficients);
            }
            index = index * self.p + c;
        }
        Ok(FieldElement(index))
    }

    /// Little-endian polynomial coefficients of `a`.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.n as usize);
        let mut rest = a.0;
        for _ in 0..self.n {
            out.push(rest % self.p);
            rest /= self.p;
        }
        out
    }

    /// All q elements, zero first, in increasing index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.add {
            Some(table) => FieldElement(table[(a.0 * self.q + b.0) as usize]),
            None => {
                let p = self.p;
                FieldElement(self.digitwise(a.0, b.0, |x, y| (x + y) % p))
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let order = self.q - 1;
        let e = (self.log[a.0 as usize] + self.log[b.0 as usize]) % order;
        FieldElement(self.exp[e as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let order = self.q - 1;
        let e = (order - self.log[a.0 as usize]) % order;
        Ok(FieldElement(self.exp[e as usize]))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let order = (self.q - 1) as u64;
        let k = (self.log[a.0 as usize] as u64 * (e % order)) % order;
        FieldElement(self.exp[k as usize])
    }

    /// Dispatches a named operation; `b` must be present exactly for binary ops.
    pub fn apply(
        &self,
        op: FieldOp,
        a: FieldElement,
        b: Option<FieldElement>,
    ) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        if let Some(b) = b {
            self.check(b)?;
        }
        match (op, b) {
            (FieldOp::Add, Some(b)) => Ok(self.add(a, b)),
            (FieldOp::Sub, Some(b)) => Ok(self.sub(a, b)),
            (FieldOp::Mul, Some(b)) => Ok(self.mul(a, b)),
            (FieldOp::Inv, None) => self.inv(a),
            (FieldOp::Neg, None) => Ok(self.neg(a)),
            _ => Err(FieldError::Arity(op)),
        }
    }

    fn check(&self, a: FieldElement) -> Result<(), FieldError> {
        self.element(a.0).map(|_| ())
    }

    fn digitwise(&self, a: u32, b: u32, f: impl Fn(u32, u32) -> u32) -> u32 {
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.n {
            out += f(a % self.p, b % self.p) * place;
            a /= self.p;
            b /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    /// Schoolbook product of two elements reduced by the modulus.
    fn poly_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let n = self.n as usize;
        let ac = self.coeffs(FieldElement(a));
        let bc = self.coeffs(FieldElement(b));
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in ac.iter().enumerate() {
            for (j, &y) in bc.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for deg in (n..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            // x^n = -(m_0 + ... + m_{n-1} x^{n-1})
            for (i, &m) in self.modulus[..n].iter().enumerate() {
                let slot = deg - n + i;
                prod[slot] = (prod[slot] + (p - m as u64) * c) % p;
            }
            prod[deg] = 0;
        }
        prod[..n].iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
    }

    fn build_log_tables(&mut self) {
        let q = self.q;
        let order = q - 1;
        if order == 1 {
            self.exp = vec![1];
            self.log = vec![0, 0];
            return;
        }
        for g in 2..q.max(3) {
            let mut exp = Vec::with_capacity(order as usize);
            let mut x = 1u32;
            let mut primitive = true;
            for i in 0..order {
                if i > 0 && x == 1 {
                    primitive = false;
                    break;
                }
                exp.push(x);
                x = self.poly_mul(x, g);
            }
            if primitive && x == 1 {
                let mut log = vec![0u32; q as usize];
                for (i, &v) in exp.iter().enumerate() {
                    log[v as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic");
    }
}

fn checked_pow(base: u32, exp: u32) -> Option<u32> {
    (0..exp).try_fold(1u32, |acc, _| acc.checked_mul(base))
}

/// Monic polynomial of degree `deg` whose lower coefficients encode `index` in base p.
fn monic_from_index(p: u32, deg: u32, index: u32) -> Vec<u32> {
    let mut coeffs = Vec::with_capacity(deg as usize + 1);
    let mut rest = index;
    for _ in 0..deg {
        coeffs.push(rest % p);
        rest /= p;
    }
    coeffs.push(1);
    coeffs
}

/// Remainder of `num` modulo the monic polynomial `den`, coefficients in GF(p).
fn poly_rem(p: u32, num: &[u32], den: &[u32]) -> Vec<u32> {
    let mut rem: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let p = p as u64;
    let dd = den.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().unwrap();
        let shift = rem.len() - 1 - dd;
        if lead != 0 {
            for (i, &c) in den.iter().enumerate() {
                rem[shift + i] = (rem[shift + i] + (p - lead) * c as u64) % p;
            }
        }
        rem.pop();
    }
    rem.into_iter().map(|c| c as u32).collect()
}

/// Irreducibility by trial division against every monic polynomial of degree 1..=deg/2.
pub(crate) fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let deg = (poly.len() - 1) as u32;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d);
        for index in 0..count {
            let divisor = monic_from_index(p, d, index);
            if poly_rem(p, poly, &divisor).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, n: u32) -> Vec<u32> {
    let count = p.pow(n);
    (0..count)
        .map(|index| monic_from_index(p, n, index))
        .find(|poly| is_irreducible(p, poly))
        .expect("irreducible polynomials exist in every degree")
}
