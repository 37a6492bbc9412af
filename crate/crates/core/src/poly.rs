//! Sparse graded multivariate polynomials over the ground rings.
//!
//! Variables are the Brown-Peterson generators `v<n>` of degree 2(2^n - 1),
//! the Bott class `u` of degree 2, a cyclotomic variable `w` (printed `w`,
//! internally omega) of degree 0 carrying the relation `Phi_p(w) = 0` for an
//! odd prime p, and logarithm-coefficient placeholders `m<n>`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;

use crate::coeff::{Coeff, RingTag};
use crate::Error;

pub type Exp = u32;

/// A polynomial variable together with the data needed to grade and reduce it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Variable {
    /// Hazewinkel generator v_n, n >= 1.
    V(u32),
    /// The Bott class of kU.
    U,
    /// A primitive p-th root of unity for an odd prime p: Phi_p(omega) = 0.
    Omega(u32),
    /// Logarithm coefficient m_n (scaffolding; absent from final outputs).
    M(u32),
}

impl Variable {
    pub fn degree(&self) -> i64 {
        match self {
            Variable::V(n) | Variable::M(n) => 2 * ((1i64 << n) - 1),
            Variable::U => 2,
            Variable::Omega(_) => 0,
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::V(n) => write!(f, "v{n}"),
            Variable::U => write!(f, "u"),
            Variable::Omega(_) => write!(f, "w"),
            Variable::M(n) => write!(f, "m{n}"),
        }
    }
}

/// An exponent vector, stored sparsely and sorted by variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<(Variable, Exp)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Variable) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn var_pow(v: Variable, e: Exp) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(Variable, Exp)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by_key(|&(v, _)| v);
        let mut out: Vec<(Variable, Exp)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[(Variable, Exp)] {
        &self.0
    }

    pub fn exponent_of(&self, v: Variable) -> Exp {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn contains(&self, v: Variable) -> bool {
        self.exponent_of(v) > 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut pairs = self.0.clone();
        pairs.extend_from_slice(&other.0);
        Monomial::from_pairs(pairs)
    }

    /// Sum of variable degrees weighted by exponents.
    pub fn grade(&self) -> i64 {
        self.0
            .iter()
            .map(|&(v, e)| v.degree() * (e as i64))
            .sum()
    }

    /// Lexicographic comparison over the fixed variable order, treating the
    /// monomials as dense exponent vectors.
    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let mut i = 0;
        let mut j = 0;
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

/// Canonical term order: by graded degree, then descending lexicographic.
/// This is also the printing order, matching the usual tabulated forms
/// (e.g. `v1^4*v2 + v1*v2^2 + v3`).
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grade()
            .cmp(&other.grade())
            .then_with(|| other.lex_cmp(self))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(v, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A sparse polynomial over one of the ground rings.  Zero coefficients are
/// never stored, and omega exponents are kept below p-1 by the eager rewrite
/// `w^{p-1} -> -(1 + w + ... + w^{p-2})`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedPoly {
    ring: RingTag,
    terms: BTreeMap<Monomial, Coeff>,
}

impl GradedPoly {
    pub fn zero(ring: RingTag) -> Self {
        GradedPoly {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: RingTag) -> Self {
        GradedPoly::from_int(1, ring)
    }

    pub fn from_int(n: i64, ring: RingTag) -> Self {
        GradedPoly::monomial(Monomial::one(), Coeff::from_int(n, ring))
    }

    pub fn constant(c: Coeff) -> Self {
        GradedPoly::monomial(Monomial::one(), c)
    }

    pub fn var(v: Variable, ring: RingTag) -> Self {
        GradedPoly::monomial(Monomial::var(v), Coeff::one(ring))
    }

    pub fn var_pow(v: Variable, e: Exp, ring: RingTag) -> Self {
        GradedPoly::monomial(Monomial::var_pow(v, e), Coeff::one(ring))
    }

    pub fn monomial(m: Monomial, c: Coeff) -> Self {
        let ring = c.ring();
        let mut p = GradedPoly::zero(ring);
        p.add_term(m, c);
        p
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff_of(&self, m: &Monomial) -> Coeff {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Coeff::zero(self.ring))
    }

    /// Accumulate `c * m`, applying the cyclotomic rewrite and pruning zeros.
    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        // Find an omega exponent that needs rewriting.
        let needs_rewrite = m
            .exponents()
            .iter()
            .find_map(|&(v, e)| match v {
                Variable::Omega(p) if e >= p - 1 => Some((v, e, p)),
                _ => None,
            });
        if let Some((v, e, p)) = needs_rewrite {
            // w^e = w^{e-(p-1)} * ( -(1 + w + ... + w^{p-2}) )
            let rest: Vec<(Variable, Exp)> = m
                .exponents()
                .iter()
                .filter(|&&(w, _)| w != v)
                .cloned()
                .collect();
            let neg = c.neg();
            for i in 0..(p - 1) {
                let mut pairs = rest.clone();
                let new_e = e - (p - 1) + i;
                if new_e > 0 {
                    pairs.push((v, new_e));
                }
                self.add_term(Monomial::from_pairs(pairs), neg.clone());
            }
            return;
        }
        let ring = self.ring;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    e.insert(s);
                }
            }
        }
        let _ = ring;
    }

    fn check_ring(&self, other: &GradedPoly) -> Result<(), Error> {
        if self.ring != other.ring {
            Err(Error::RingMismatch(self.ring, other.ring))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &GradedPoly) -> Result<GradedPoly, Error> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> GradedPoly {
        let mut out = GradedPoly::zero(self.ring);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &GradedPoly) -> Result<GradedPoly, Error> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &GradedPoly) -> Result<GradedPoly, Error> {
        self.check_ring(other)?;
        let mut out = GradedPoly::zero(self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Coeff) -> GradedPoly {
        debug_assert_eq!(c.ring(), self.ring);
        let mut out = GradedPoly::zero(self.ring);
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k.mul(c));
        }
        out
    }

    pub fn pow(&self, e: Exp) -> GradedPoly {
        let mut result = GradedPoly::one(self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        result
    }

    /// The common graded degree of all terms, if the polynomial is
    /// homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys();
        let first = it.next()?.grade();
        for m in it {
            if m.grade() != first {
                return None;
            }
        }
        Some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// True iff every coefficient has odd denominator.
    pub fn is_2_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_2_integral())
    }

    /// Reduce rational coefficients mod 2^k (k = 1 or 2).
    pub fn reduce_mod(&self, k: u8) -> Result<GradedPoly, Error> {
        if self.ring != RingTag::Rational {
            if (self.ring == RingTag::Mod2 && k == 1) || (self.ring == RingTag::Mod4 && k == 2) {
                return Ok(self.clone());
            }
            if self.ring == RingTag::Mod4 && k == 1 {
                let mut out = GradedPoly::zero(RingTag::Mod2);
                for (m, c) in &self.terms {
                    if let Coeff::Z4(a) = c {
                        out.add_term(m.clone(), Coeff::F2(a % 2));
                    }
                }
                return Ok(out);
            }
            return Err(Error::InvalidArgument(format!(
                "cannot reduce a {} polynomial mod 2^{k}",
                self.ring
            )));
        }
        let ring = match k {
            1 => RingTag::Mod2,
            2 => RingTag::Mod4,
            _ => return Err(Error::InvalidArgument("reduce_mod expects k = 1 or 2".into())),
        };
        let mut out = GradedPoly::zero(ring);
        for (m, c) in &self.terms {
            let r = c.reduce_mod(k).map_err(|_| Error::NotTwoIntegral {
                monomial: m.to_string(),
            })?;
            out.add_term(m.clone(), r);
        }
        Ok(out)
    }

    /// Lift residues to rationals with the same small nonnegative numerators.
    pub fn lift_to_rational(&self) -> GradedPoly {
        let mut out = GradedPoly::zero(RingTag::Rational);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.lift_to_rational());
        }
        out
    }

    /// Simultaneous substitution of variables, fully expanded.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<Variable, GradedPoly>,
    ) -> Result<GradedPoly, Error> {
        for b in bindings.values() {
            if b.ring != self.ring {
                return Err(Error::RingMismatch(self.ring, b.ring));
            }
        }
        let mut out = GradedPoly::zero(self.ring);
        for (m, c) in &self.terms {
            let mut term = GradedPoly::constant(c.clone());
            for &(v, e) in m.exponents() {
                let factor = match bindings.get(&v) {
                    Some(p) => p.pow(e),
                    None => GradedPoly::var_pow(v, e, self.ring),
                };
                term = term.mul(&factor)?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// The set of variables occurring in the polynomial.
    pub fn variables(&self) -> Vec<Variable> {
        let mut vars: Vec<Variable> = Vec::new();
        for m in self.terms.keys() {
            for &(v, _) in m.exponents() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        vars.sort();
        vars
    }

    /// First (canonically smallest) term, for residual reporting.
    pub fn leading_term(&self) -> Option<(Monomial, Coeff)> {
        self.terms.iter().next().map(|(m, c)| (m.clone(), c.clone()))
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let (neg, abs) = match c {
                Coeff::Q(r) if r < &BigRational::from(BigInt::from(0)) => {
                    (true, Coeff::Q(-r.clone()))
                }
                _ => (false, c.clone()),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

pub fn format_poly(p: &GradedPoly) -> String {
    p.to_string()
}

/// Parse the canonical text grammar: terms joined by `+`/`-`; a term is an
/// optional coefficient (`int` or `int/int`) and `*`-separated powers
/// `name[^exp]` with names `v<n>`, `u`, `w`, `m<n>`.  Whitespace is
/// insignificant.  `w` is the cyclotomic variable for the prime `omega_p`.
pub fn parse_poly(input: &str, ring: RingTag, omega_p: u32) -> Result<GradedPoly, Error> {
    Parser {
        bytes: input.as_bytes(),
        pos: 0,
        ring,
        omega_p,
    }
    .parse()
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    ring: RingTag,
    omega_p: u32,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<GradedPoly, Error> {
        let mut out = GradedPoly::zero(self.ring);
        let mut sign = 1i64;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            sign = -1;
        }
        loop {
            let term = self.parse_term(sign)?;
            out = out.add(&term)?;
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                Some(_) => return Err(self.err("expected '+' or '-' between terms")),
            }
        }
        Ok(out)
    }

    fn parse_uint(&mut self) -> Result<BigInt, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .unwrap())
    }

    fn parse_small_uint(&mut self) -> Result<u32, Error> {
        let n = self.parse_uint()?;
        n.to_string()
            .parse()
            .map_err(|_| self.err("index out of range"))
    }

    fn parse_term(&mut self, sign: i64) -> Result<GradedPoly, Error> {
        let mut coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.parse_uint()?;
                let c = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    if self.ring != RingTag::Rational {
                        return Err(self.err("fractional coefficient in a residue ring"));
                    }
                    let den = self.parse_uint()?;
                    Coeff::Q(BigRational::new(num, den))
                } else {
                    match self.ring {
                        RingTag::Rational => Coeff::Q(BigRational::from(num.clone())),
                        RingTag::Mod2 => {
                            Coeff::from_int(num.mod_floor_i64(2), RingTag::Mod2)
                        }
                        RingTag::Mod4 => {
                            Coeff::from_int(num.mod_floor_i64(4), RingTag::Mod4)
                        }
                    }
                };
                c
            }
            Some(_) => Coeff::one(self.ring),
            None => return Err(self.err("unexpected end of input")),
        };
        if sign < 0 {
            coeff = coeff.neg();
        }
        let mut pairs: Vec<(Variable, Exp)> = Vec::new();
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let (v, e) = self.parse_power()?;
                    pairs.push((v, e));
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    let (v, e) = self.parse_power()?;
                    pairs.push((v, e));
                }
                _ => break,
            }
        }
        Ok(GradedPoly::monomial(Monomial::from_pairs(pairs), coeff))
    }

    fn parse_power(&mut self) -> Result<(Variable, Exp), Error> {
        let c = self.peek().ok_or_else(|| self.err("expected a variable"))?;
        let v = match c {
            b'v' => {
                self.pos += 1;
                Variable::V(self.parse_small_uint()?)
            }
            b'u' => {
                self.pos += 1;
                Variable::U
            }
            b'w' => {
                self.pos += 1;
                Variable::Omega(self.omega_p)
            }
            b'm' => {
                self.pos += 1;
                Variable::M(self.parse_small_uint()?)
            }
            _ => return Err(self.err("unknown variable")),
        };
        if let Variable::V(n) | Variable::M(n) = v {
            if n == 0 || n > 62 {
                return Err(self.err("variable index out of range"));
            }
        }
        let e = if self.peek() == Some(b'^') {
            self.pos += 1;
            self.parse_small_uint()?
        } else {
            1
        };
        Ok((v, e))
    }
}

trait ModFloorI64 {
    fn mod_floor_i64(&self, m: i64) -> i64;
}

impl ModFloorI64 for BigInt {
    fn mod_floor_i64(&self, m: i64) -> i64 {
        use num::Integer;
        self.mod_floor(&BigInt::from(m)).to_string().parse().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> Variable {
        Variable::V(n)
    }

    fn p2(ring: RingTag) -> GradedPoly {
        parse_poly("v1^4*v2 + v1*v2^2 + v3", ring, 3).unwrap()
    }

    #[test]
    fn degrees() {
        assert_eq!(v(1).degree(), 2);
        assert_eq!(v(2).degree(), 6);
        assert_eq!(v(3).degree(), 14);
        assert_eq!(v(4).degree(), 30);
        assert_eq!(Variable::U.degree(), 2);
        assert_eq!(Variable::Omega(3).degree(), 0);
        assert_eq!(Variable::M(2).degree(), 6);
    }

    #[test]
    fn grade_examples() {
        // 12*2 + 6 = 30 = |v4|, and 4 + 12 + 14 = 30.
        let m = Monomial::from_pairs(vec![(v(1), 12), (v(2), 1)]);
        assert_eq!(m.grade(), 30);
        let m = Monomial::from_pairs(vec![(v(1), 2), (v(2), 2), (v(3), 1)]);
        assert_eq!(m.grade(), 30);
        assert_eq!(Monomial::one().grade(), 0);
    }

    #[test]
    fn add_char2_cancels() {
        let a = GradedPoly::var(v(1), RingTag::Mod2);
        assert!(a.add(&a).unwrap().is_zero());
        let z = GradedPoly::zero(RingTag::Mod2);
        assert_eq!(a.add(&z).unwrap(), a);
    }

    #[test]
    fn add_assembles_p2() {
        let a = parse_poly("v1^4*v2 + v3", RingTag::Mod2, 3).unwrap();
        let b = parse_poly("v1*v2^2", RingTag::Mod2, 3).unwrap();
        assert_eq!(a.add(&b).unwrap(), p2(RingTag::Mod2));
    }

    #[test]
    fn ring_mismatch() {
        let a = GradedPoly::var(v(1), RingTag::Mod2);
        let b = GradedPoly::var(v(1), RingTag::Rational);
        assert!(matches!(a.add(&b), Err(Error::RingMismatch(_, _))));
    }

    #[test]
    fn cyclotomic_omega_cubed_is_one() {
        // w * w^2 with p=3: w^3 = 1.
        let w = GradedPoly::var(Variable::Omega(3), RingTag::Rational);
        let w2 = w.mul(&w).unwrap();
        let w3 = w2.mul(&w).unwrap();
        assert_eq!(w3, GradedPoly::one(RingTag::Rational));
    }

    #[test]
    fn cyclotomic_sum_vanishes() {
        // 1 + w + w^2 = 0 for p = 3.
        let one = GradedPoly::one(RingTag::Rational);
        let w = GradedPoly::var(Variable::Omega(3), RingTag::Rational);
        let w2 = w.mul(&w).unwrap();
        assert!(one.add(&w).unwrap().add(&w2).unwrap().is_zero());
    }

    #[test]
    fn mul_u2_term() {
        // (v1*v1)^2 * v2 = v1^4*v2, the j=1 term of u_2.
        let sq = GradedPoly::var(v(1), RingTag::Mod2)
            .mul(&GradedPoly::var(v(1), RingTag::Mod2))
            .unwrap()
            .pow(2);
        let got = sq.mul(&GradedPoly::var(v(2), RingTag::Mod2)).unwrap();
        assert_eq!(got, parse_poly("v1^4*v2", RingTag::Mod2, 3).unwrap());
        let a = p2(RingTag::Mod2);
        assert_eq!(GradedPoly::one(RingTag::Mod2).mul(&a).unwrap(), a);
    }

    #[test]
    fn reduce_mod_examples() {
        let two_v1 = GradedPoly::var(v(1), RingTag::Rational).scale(&Coeff::from_int(2, RingTag::Rational));
        assert!(two_v1.reduce_mod(1).unwrap().is_zero());
        let p = GradedPoly::var(v(1), RingTag::Rational).scale(&Coeff::from_ratio(3, 5));
        assert_eq!(p.reduce_mod(1).unwrap(), GradedPoly::var(v(1), RingTag::Mod2));
        let bad = GradedPoly::var(v(1), RingTag::Rational).scale(&Coeff::from_ratio(1, 2));
        assert!(matches!(bad.reduce_mod(1), Err(Error::NotTwoIntegral { .. })));
    }

    #[test]
    fn two_integrality() {
        let p = GradedPoly::var(v(1), RingTag::Rational).scale(&Coeff::from_ratio(1, 2));
        assert!(!p.is_2_integral());
        assert!(GradedPoly::zero(RingTag::Rational).is_2_integral());
        assert!(GradedPoly::one(RingTag::Rational).is_2_integral());
    }

    #[test]
    fn substitute_drops_v3_terms_of_p3() {
        let p3 = parse_poly(
            "v1^12*v2 + v1^6*v2^3 + v1^2*v2^2*v3 + v1*v3^2 + v4",
            RingTag::Mod2,
            3,
        )
        .unwrap();
        let mut b = BTreeMap::new();
        b.insert(v(3), GradedPoly::zero(RingTag::Mod2));
        let got = p3.substitute(&b).unwrap();
        let want = parse_poly("v1^12*v2 + v1^6*v2^3 + v4", RingTag::Mod2, 3).unwrap();
        assert_eq!(got, want);
        // Empty and identity bindings leave the polynomial unchanged.
        assert_eq!(p3.substitute(&BTreeMap::new()).unwrap(), p3);
        let mut id = BTreeMap::new();
        id.insert(v(1), GradedPoly::var(v(1), RingTag::Mod2));
        assert_eq!(p3.substitute(&id).unwrap(), p3);
    }

    #[test]
    fn parse_format_round_trip() {
        for s in [
            "v1^4*v2 + v1*v2^2 + v3",
            "v1^12*v2 + v1^6*v2^3 + v1^2*v2^2*v3 + v1*v3^2 + v4",
            "0",
            "1",
            "v1",
        ] {
            let p = parse_poly(s, RingTag::Mod2, 3).unwrap();
            assert_eq!(format_poly(&p), s);
        }
        let q = parse_poly("1/2*v1 - 3*v2", RingTag::Rational, 3).unwrap();
        assert_eq!(format_poly(&q), "1/2*v1 - 3*v2");
    }

    #[test]
    fn parse_error_position() {
        match parse_poly("v1 + $", RingTag::Mod2, 3) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn canonical_order_is_graded_then_lex() {
        let p = parse_poly("v3 + v1*v2^2 + v1^4*v2", RingTag::Mod2, 3).unwrap();
        assert_eq!(format_poly(&p), "v1^4*v2 + v1*v2^2 + v3");
        // Mixed degrees sort by degree first.
        let p = parse_poly("v2 + v1", RingTag::Mod2, 3).unwrap();
        assert_eq!(format_poly(&p), "v1 + v2");
    }
}
