//! Normally ordered polynomials in two bosonic modes.
//!
//! A monomial `a†ⁿ aᵐ b†ᵏ bˡ` is identified by its [`MultiIndex`] `(n, m, k, l)`.
//! Products are brought back to normal order mode by mode with the closed-form
//! expansion of the antinormal product `aᵐ a†ⁿ`; the two modes commute, so the
//! `a` and `b` factors reorder independently.
//!
//! The ordering on [`MultiIndex`] is the one the moment hierarchy is built on:
//! lower total degree first, then the first nonzero difference in the sequence
//! (Δk, Δl, Δn, Δm) decides. Within a degree block this puts the `a` mode
//! first and `b†` exponents last, so the canonical sequence starts
//! `1, a, a†, b, b†, a², a†a, a†², ab, a†b, b², ab†, a†b†, b†b, b†², ...`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest total degree for which the reordering coefficients stay exact in `f64`.
pub const MAX_DEGREE: u32 = 20;

/// Exponents `(n, m, k, l)` of `a†ⁿ aᵐ b†ᵏ bˡ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "[u32; 4]", into = "[u32; 4]")]
pub struct MultiIndex {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub l: u32,
}

impl MultiIndex {
    pub const IDENTITY: MultiIndex = MultiIndex {
        n: 0,
        m: 0,
        k: 0,
        l: 0,
    };

    pub const fn new(n: u32, m: u32, k: u32, l: u32) -> Self {
        MultiIndex { n, m, k, l }
    }

    pub const fn degree(&self) -> u32 {
        self.n + self.m + self.k + self.l
    }

    /// Index of the adjoint monomial: `(n, m, k, l) -> (m, n, l, k)`.
    pub const fn adjoint(&self) -> Self {
        MultiIndex::new(self.m, self.n, self.l, self.k)
    }

    /// Index after partial transposition of mode b: `(n, m, k, l) -> (n, m, l, k)`.
    pub const fn pt(&self) -> Self {
        MultiIndex::new(self.n, self.m, self.l, self.k)
    }

    pub const fn as_array(&self) -> [u32; 4] {
        [self.n, self.m, self.k, self.l]
    }

    fn order_key(&self) -> (u32, u32, u32, u32, u32) {
        (self.degree(), self.k, self.l, self.n, self.m)
    }
}

impl From<[u32; 4]> for MultiIndex {
    fn from(v: [u32; 4]) -> Self {
        MultiIndex::new(v[0], v[1], v[2], v[3])
    }
}

impl From<MultiIndex> for [u32; 4] {
    fn from(u: MultiIndex) -> Self {
        u.as_array()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ad^{} a^{} bd^{} b^{}", self.n, self.m, self.k, self.l)
    }
}

/// Canonical comparison of two multi-indices.
///
/// `u < v` iff `deg u < deg v`, or the degrees agree and the first nonzero
/// entry of `(r-k, s-l, p-n, q-m)` is positive, for `u = (n,m,k,l)` and
/// `v = (p,q,r,s)`.
pub fn compare_indices(u: &MultiIndex, v: &MultiIndex) -> Ordering {
    if u.degree() != v.degree() {
        return u.degree().cmp(&v.degree());
    }
    let diffs = [
        v.k as i64 - u.k as i64,
        v.l as i64 - u.l as i64,
        v.n as i64 - u.n as i64,
        v.m as i64 - u.m as i64,
    ];
    match diffs.iter().find(|d| **d != 0) {
        Some(d) if *d > 0 => Ordering::Less,
        Some(_) => Ordering::Greater,
        None => Ordering::Equal,
    }
}

/// All indices of total degree exactly `d`, in canonical order.
pub fn indices_of_degree(d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for k in 0..=d {
        for l in 0..=d - k {
            for n in 0..=d - k - l {
                out.push(MultiIndex::new(n, d - k - l - n, k, l));
            }
        }
    }
    out.sort();
    out
}

/// All indices of total degree `<= d`, in canonical order.
pub fn indices_up_to_degree(d: u32) -> Vec<MultiIndex> {
    (0..=d).flat_map(indices_of_degree).collect()
}

/// The first `count` multi-indices in canonical order, starting at the identity.
pub fn enumerate_indices(count: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(count);
    let mut d = 0;
    while out.len() < count {
        out.extend(indices_of_degree(d).into_iter().take(count - out.len()));
        d += 1;
    }
    out
}

/// Finite sum of normally ordered monomials with complex coefficients.
///
/// Zero coefficients are never stored, so structural equality is operator equality.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormalPolynomial {
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl NormalPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::term(MultiIndex::IDENTITY, c)
    }

    pub fn monomial(u: MultiIndex) -> Self {
        Self::term(u, Complex64::new(1.0, 0.0))
    }

    pub fn term(u: MultiIndex, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(u, c);
        p
    }

    pub fn a() -> Self {
        Self::monomial(MultiIndex::new(0, 1, 0, 0))
    }

    pub fn ad() -> Self {
        Self::monomial(MultiIndex::new(1, 0, 0, 0))
    }

    pub fn b() -> Self {
        Self::monomial(MultiIndex::new(0, 0, 0, 1))
    }

    pub fn bd() -> Self {
        Self::monomial(MultiIndex::new(0, 0, 1, 0))
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, Complex64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (u, c) in terms {
            p.add_term(u, c);
        }
        p
    }

    /// Accumulate `c` onto the coefficient of `u`, dropping it if it becomes exactly zero.
    pub fn add_term(&mut self, u: MultiIndex, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(u).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&u);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, u: &MultiIndex) -> Complex64 {
        self.terms.get(u).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Highest total degree among the terms (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(u, v)| (*u, v * c)))
    }

    /// Hermitian adjoint; the result is again normally ordered.
    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(u, c)| (u.adjoint(), c.conj())))
    }

    /// Partial transposition of mode b on normally ordered monomials: `b†ᵏ bˡ -> b†ˡ bᵏ`.
    pub fn pt_transform(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(u, c)| (u.pt(), *c)))
    }

    /// Normal-ordered form of the operator product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let degree = self.degree() + other.degree();
        if !self.is_zero() && !other.is_zero() && degree > MAX_DEGREE {
            return Err(Error::DegreeLimit {
                degree,
                limit: MAX_DEGREE,
            });
        }
        let mut out = Self::zero();
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                let c = cu * cv;
                // a†^{u.n} (a^{u.m} a†^{v.n}) a^{v.m}, and likewise for b.
                let a_part = reorder(u.m, v.n);
                let b_part = reorder(u.l, v.k);
                for &(ja, ca) in &a_part {
                    for &(jb, cb) in &b_part {
                        let w = MultiIndex::new(
                            u.n + v.n - ja,
                            u.m + v.m - ja,
                            u.k + v.k - jb,
                            u.l + v.l - jb,
                        );
                        out.add_term(w, c * (ca * cb));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.multiply(self)?;
        }
        Ok(out)
    }
}

/// Contraction coefficients of `aᵐ a†ⁿ = Σ_j c_j a†^{n-j} a^{m-j}`,
/// `c_j = m! n! / (j! (m-j)! (n-j)!)`, built by the ratio
/// `c_{j+1} / c_j = (m-j)(n-j)/(j+1)`.
fn reorder(m: u32, n: u32) -> Vec<(u32, f64)> {
    let top = m.min(n);
    let mut out = Vec::with_capacity(top as usize + 1);
    let mut c = 1.0f64;
    for j in 0..=top {
        out.push((j, c));
        c = c * f64::from(m - j) * f64::from(n - j) / f64::from(j + 1);
    }
    out
}

/// Normal form of the single-mode antinormal product `aⁿ a†ᵐ`, encoded on mode a.
pub fn antinormal_to_normal(n: u32, m: u32) -> NormalPolynomial {
    NormalPolynomial::from_terms(
        reorder(n, m)
            .into_iter()
            .map(|(j, c)| (MultiIndex::new(m - j, n - j, 0, 0), Complex64::new(c, 0.0))),
    )
}

/// Normal form of `p · q`; fails when the product degree exceeds [`MAX_DEGREE`].
pub fn multiply(p: &NormalPolynomial, q: &NormalPolynomial) -> Result<NormalPolynomial> {
    p.multiply(q)
}

pub fn adjoint(p: &NormalPolynomial) -> NormalPolynomial {
    p.adjoint()
}

pub fn pt_transform(p: &NormalPolynomial) -> NormalPolynomial {
    p.pt_transform()
}

impl Add for &NormalPolynomial {
    type Output = NormalPolynomial;
    fn add(self, rhs: &NormalPolynomial) -> NormalPolynomial {
        let mut out = self.clone();
        for (u, c) in &rhs.terms {
            out.add_term(*u, *c);
        }
        out
    }
}

impl Add for NormalPolynomial {
    type Output = NormalPolynomial;
    fn add(self, rhs: NormalPolynomial) -> NormalPolynomial {
        &self + &rhs
    }
}

impl Sub for &NormalPolynomial {
    type Output = NormalPolynomial;
    fn sub(self, rhs: &NormalPolynomial) -> NormalPolynomial {
        self + &(-rhs)
    }
}

impl Sub for NormalPolynomial {
    type Output = NormalPolynomial;
    fn sub(self, rhs: NormalPolynomial) -> NormalPolynomial {
        &self - &rhs
    }
}

impl Neg for &NormalPolynomial {
    type Output = NormalPolynomial;
    fn neg(self) -> NormalPolynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Neg for NormalPolynomial {
    type Output = NormalPolynomial;
    fn neg(self) -> NormalPolynomial {
        -&self
    }
}

impl Mul for &NormalPolynomial {
    type Output = NormalPolynomial;
    fn mul(self, rhs: &NormalPolynomial) -> NormalPolynomial {
        self.multiply(rhs)
            .expect("operator degree above MAX_DEGREE")
    }
}

impl Mul for NormalPolynomial {
    type Output = NormalPolynomial;
    fn mul(self, rhs: NormalPolynomial) -> NormalPolynomial {
        &self * &rhs
    }
}

impl Mul<Complex64> for &NormalPolynomial {
    type Output = NormalPolynomial;
    fn mul(self, rhs: Complex64) -> NormalPolynomial {
        self.scale(rhs)
    }
}

impl Mul<f64> for &NormalPolynomial {
    type Output = NormalPolynomial;
    fn mul(self, rhs: f64) -> NormalPolynomial {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

// Text form: "(re,im)·ad^n a^m bd^k b^l + ...", "0" for the zero polynomial.
impl fmt::Display for NormalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (u, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({},{})·{}", c.re, c.im, u)?;
        }
        Ok(())
    }
}

impl FromStr for NormalPolynomial {
    type Err = Error;

    /// Accepts the rendered form as well as shorthand such as `ad a + (0,2)·b^2`:
    /// coefficients default to 1, `·` or `*` separates coefficient and factors,
    /// missing factors have exponent 0, a bare `1` is the identity.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        for term in split_terms(s)? {
            let (u, c) = parse_term(term)?;
            out.add_term(u, c);
        }
        Ok(out)
    }
}

fn split_terms(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
    }
    parts.push(&s[start..]);
    if parts.iter().any(|p| p.trim().is_empty()) {
        return Err(Error::Parse(format!("empty term in {s:?}")));
    }
    Ok(parts)
}

fn parse_term(term: &str) -> Result<(MultiIndex, Complex64)> {
    let term = term.trim();
    let (coeff, rest) = if let Some(stripped) = term.strip_prefix('(') {
        let close = stripped
            .find(')')
            .ok_or_else(|| Error::Parse(format!("missing ')' in {term:?}")))?;
        let (re, im) = stripped[..close]
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("coefficient needs (re,im): {term:?}")))?;
        let re: f64 = re
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad real part in {term:?}")))?;
        let im: f64 = im
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad imaginary part in {term:?}")))?;
        let rest = stripped[close + 1..].trim_start();
        let rest = rest
            .strip_prefix('·')
            .or_else(|| rest.strip_prefix('*'))
            .unwrap_or(rest);
        (Complex64::new(re, im), rest)
    } else {
        (Complex64::new(1.0, 0.0), term)
    };

    // exponents in the order ad, a, bd, b; None until seen
    let mut exps: [Option<u32>; 4] = [None; 4];
    for factor in rest.split_whitespace() {
        let (name, exp) = match factor.split_once('^') {
            Some((name, e)) => (
                name,
                e.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?,
            ),
            None => (factor, 1),
        };
        let slot = match name {
            "1" if exp == 1 => continue,
            "ad" => 0,
            "a" => 1,
            "bd" => 2,
            "b" => 3,
            _ => return Err(Error::Parse(format!("unknown factor {factor:?}"))),
        };
        if exps[slot].is_some() {
            return Err(Error::Parse(format!(
                "repeated factor {name:?} in {term:?}"
            )));
        }
        // creation must precede annihilation within a mode
        if (slot == 0 && exps[1].is_some()) || (slot == 2 && exps[3].is_some()) {
            return Err(Error::Parse(format!(
                "term {term:?} is not normally ordered"
            )));
        }
        exps[slot] = Some(exp);
    }
    let e = exps.map(|x| x.unwrap_or(0));
    Ok((MultiIndex::from(e), coeff))
}
