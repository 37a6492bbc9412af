//! Truncated power series in the formal variables x, y (and a third variable
//! z for on-demand associativity checks) over polynomial coefficients, plus
//! the epsilon-adjoined series modelling A*[eps]/(2 eps, eps^2).
//!
//! Truncation is by total degree, exclusive, and uniform across a
//! computation; mixing truncations is an error rather than an implicit min.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::{Coeff, RingTag};
use crate::poly::{GradedPoly, Variable};
use crate::Error;

/// Exponent index (x, y, z).
pub type Idx = [u32; 3];

/// A power series truncated at total degree `trunc` (exclusive bound).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncSeries {
    arity: u8,
    trunc: u32,
    ring: RingTag,
    coeffs: BTreeMap<Idx, GradedPoly>,
}

impl TruncSeries {
    pub fn zero(ring: RingTag, arity: u8, trunc: u32) -> Self {
        assert!((1..=3).contains(&arity));
        TruncSeries {
            arity,
            trunc,
            ring,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_poly(p: GradedPoly, arity: u8, trunc: u32) -> Self {
        let mut s = TruncSeries::zero(p.ring(), arity, trunc);
        s.set_coeff([0, 0, 0], p);
        s
    }

    pub fn one(ring: RingTag, arity: u8, trunc: u32) -> Self {
        TruncSeries::from_poly(GradedPoly::one(ring), arity, trunc)
    }

    /// The series `p * x^i * y^j * z^k`.
    pub fn term(p: GradedPoly, idx: Idx, arity: u8, trunc: u32) -> Self {
        let mut s = TruncSeries::zero(p.ring(), arity, trunc);
        s.set_coeff(idx, p);
        s
    }

    pub fn var_x(ring: RingTag, arity: u8, trunc: u32) -> Self {
        TruncSeries::term(GradedPoly::one(ring), [1, 0, 0], arity, trunc)
    }

    pub fn var_y(ring: RingTag, arity: u8, trunc: u32) -> Self {
        assert!(arity >= 2);
        TruncSeries::term(GradedPoly::one(ring), [0, 1, 0], arity, trunc)
    }

    pub fn var_z(ring: RingTag, trunc: u32) -> Self {
        TruncSeries::term(GradedPoly::one(ring), [0, 0, 1], 3, trunc)
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, idx: Idx) -> GradedPoly {
        self.coeffs
            .get(&idx)
            .cloned()
            .unwrap_or_else(|| GradedPoly::zero(self.ring))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Idx, &GradedPoly)> {
        self.coeffs.iter()
    }

    fn total(idx: Idx) -> u32 {
        idx[0] + idx[1] + idx[2]
    }

    pub fn set_coeff(&mut self, idx: Idx, p: GradedPoly) {
        debug_assert!(self.arity >= 2 || idx[1] == 0);
        debug_assert!(self.arity >= 3 || idx[2] == 0);
        if Self::total(idx) >= self.trunc || p.is_zero() {
            self.coeffs.remove(&idx);
        } else {
            debug_assert_eq!(p.ring(), self.ring);
            self.coeffs.insert(idx, p);
        }
    }

    fn add_coeff(&mut self, idx: Idx, p: &GradedPoly) -> Result<(), Error> {
        if Self::total(idx) >= self.trunc || p.is_zero() {
            return Ok(());
        }
        let cur = self.coeff(idx);
        self.set_coeff(idx, cur.add(p)?);
        Ok(())
    }

    fn check_compat(&self, other: &TruncSeries) -> Result<(), Error> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch(self.arity, other.arity));
        }
        if self.trunc != other.trunc {
            return Err(Error::TruncMismatch(self.trunc, other.trunc));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries, Error> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (idx, p) in &other.coeffs {
            out.add_coeff(*idx, p)?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> TruncSeries {
        let mut out = TruncSeries::zero(self.ring, self.arity, self.trunc);
        for (idx, p) in &self.coeffs {
            out.set_coeff(*idx, p.neg());
        }
        out
    }

    pub fn sub(&self, other: &TruncSeries) -> Result<TruncSeries, Error> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries, Error> {
        self.check_compat(other)?;
        let mut out = TruncSeries::zero(self.ring, self.arity, self.trunc);
        for (ia, pa) in &self.coeffs {
            let da = Self::total(*ia);
            for (ib, pb) in &other.coeffs {
                if da + Self::total(*ib) >= self.trunc {
                    continue;
                }
                let idx = [ia[0] + ib[0], ia[1] + ib[1], ia[2] + ib[2]];
                out.add_coeff(idx, &pa.mul(pb)?)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<TruncSeries, Error> {
        let mut result = TruncSeries::one(self.ring, self.arity, self.trunc);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn scale(&self, p: &GradedPoly) -> Result<TruncSeries, Error> {
        if p.ring() != self.ring {
            return Err(Error::RingMismatch(self.ring, p.ring()));
        }
        let mut out = TruncSeries::zero(self.ring, self.arity, self.trunc);
        for (idx, q) in &self.coeffs {
            out.set_coeff(*idx, q.mul(p)?);
        }
        Ok(out)
    }

    pub fn scale_int(&self, n: i64) -> TruncSeries {
        self.scale(&GradedPoly::from_int(n, self.ring)).unwrap()
    }

    pub fn truncate(&self, trunc: u32) -> TruncSeries {
        let mut out = TruncSeries::zero(self.ring, self.arity, trunc);
        for (idx, p) in &self.coeffs {
            if Self::total(*idx) < trunc {
                out.set_coeff(*idx, p.clone());
            }
        }
        out
    }

    /// Reinterpret a series in more (or the same) formal variables.
    pub fn extend_arity(&self, arity: u8) -> TruncSeries {
        assert!(arity >= self.arity);
        let mut out = TruncSeries::zero(self.ring, arity, self.trunc);
        for (idx, p) in &self.coeffs {
            out.set_coeff(*idx, p.clone());
        }
        out
    }

    pub fn swap_xy(&self) -> TruncSeries {
        let mut out = TruncSeries::zero(self.ring, self.arity, self.trunc);
        for (idx, p) in &self.coeffs {
            out.set_coeff([idx[1], idx[0], idx[2]], p.clone());
        }
        out
    }

    pub fn constant_term(&self) -> GradedPoly {
        self.coeff([0, 0, 0])
    }

    pub fn has_zero_constant_term(&self) -> bool {
        self.constant_term().is_zero()
    }

    pub fn reduce_mod(&self, k: u8) -> Result<TruncSeries, Error> {
        let ring = match k {
            1 => RingTag::Mod2,
            2 => RingTag::Mod4,
            _ => return Err(Error::InvalidArgument("reduce_mod expects k = 1 or 2".into())),
        };
        let mut out = TruncSeries::zero(ring, self.arity, self.trunc);
        for (idx, p) in &self.coeffs {
            out.set_coeff(*idx, p.reduce_mod(k)?);
        }
        Ok(out)
    }

    pub fn is_2_integral(&self) -> bool {
        self.coeffs.values().all(|p| p.is_2_integral())
    }

    /// Substitute `inner` into a one-variable series, truncated at the common
    /// bound.  `inner` must have zero constant term.
    pub fn compose(&self, inner: &TruncSeries) -> Result<TruncSeries, Error> {
        if self.arity != 1 {
            return Err(Error::ArityMismatch(self.arity, 1));
        }
        if self.trunc != inner.trunc {
            return Err(Error::TruncMismatch(self.trunc, inner.trunc));
        }
        if self.ring != inner.ring {
            return Err(Error::RingMismatch(self.ring, inner.ring));
        }
        if !inner.has_zero_constant_term() {
            return Err(Error::NonzeroConstantTerm);
        }
        // Horner evaluation from the top coefficient down.
        let max_i = self.coeffs.keys().map(|idx| idx[0]).max().unwrap_or(0);
        let mut acc = TruncSeries::zero(self.ring, inner.arity, inner.trunc);
        for i in (0..=max_i).rev() {
            acc = acc.mul(inner)?;
            let c = self.coeff([i, 0, 0]);
            if !c.is_zero() {
                acc.add_coeff([0, 0, 0], &c)?;
            }
        }
        Ok(acc)
    }

    /// Substitute `(s, t)` into a two-variable series.  Both substituted
    /// series must have zero constant term.
    pub fn subst2(&self, s: &TruncSeries, t: &TruncSeries) -> Result<TruncSeries, Error> {
        if self.arity != 2 {
            return Err(Error::ArityMismatch(self.arity, 2));
        }
        s.check_compat(t)?;
        if self.trunc != s.trunc {
            return Err(Error::TruncMismatch(self.trunc, s.trunc));
        }
        if self.ring != s.ring {
            return Err(Error::RingMismatch(self.ring, s.ring));
        }
        if !s.has_zero_constant_term() || !t.has_zero_constant_term() {
            return Err(Error::NonzeroConstantTerm);
        }
        let max_i = self.coeffs.keys().map(|idx| idx[0]).max().unwrap_or(0);
        let max_j = self.coeffs.keys().map(|idx| idx[1]).max().unwrap_or(0);
        let s_pows = powers(s, max_i)?;
        let t_pows = powers(t, max_j)?;
        let mut out = TruncSeries::zero(self.ring, s.arity, s.trunc);
        for (idx, p) in &self.coeffs {
            let (i, j) = (idx[0] as usize, idx[1] as usize);
            if s_pows[i].is_zero() || t_pows[j].is_zero() {
                continue;
            }
            let prod = s_pows[i].mul(&t_pows[j])?;
            out = out.add(&prod.scale(p)?)?;
        }
        Ok(out)
    }

    /// Compositional inverse of a one-variable series `x + O(x^2)`, found by
    /// degree-by-degree solving.
    pub fn revert(&self) -> Result<TruncSeries, Error> {
        if self.arity != 1 {
            return Err(Error::ArityMismatch(self.arity, 1));
        }
        if !self.has_zero_constant_term() || !self.coeff([1, 0, 0]).eq(&GradedPoly::one(self.ring))
        {
            return Err(Error::BadLeadingCoeff);
        }
        let x = TruncSeries::var_x(self.ring, 1, self.trunc);
        let mut g = x.clone();
        loop {
            let h = self.compose(&g)?;
            let err = h.sub(&x)?;
            // First uncorrected degree; fixing it cannot disturb lower ones
            // because the leading coefficient is 1.
            match err.coeffs.iter().next() {
                None => break,
                Some((idx, p)) => {
                    let idx = *idx;
                    let p = p.neg();
                    let cur = g.coeff(idx);
                    g.set_coeff(idx, cur.add(&p)?);
                }
            }
        }
        Ok(g)
    }

    /// Termwise formal derivative in x; the truncation bound drops by one.
    pub fn derivative(&self) -> Result<TruncSeries, Error> {
        if self.arity != 1 {
            return Err(Error::ArityMismatch(self.arity, 1));
        }
        let mut out = TruncSeries::zero(self.ring, 1, self.trunc.saturating_sub(1));
        for (idx, p) in &self.coeffs {
            let i = idx[0];
            if i == 0 {
                continue;
            }
            let c = Coeff::from_int(i as i64, self.ring);
            out.add_coeff([i - 1, 0, 0], &p.scale(&c))?;
        }
        Ok(out)
    }

    /// Multiplicative inverse of a series with constant term 1.
    pub fn reciprocal(&self) -> Result<TruncSeries, Error> {
        if !self.constant_term().eq(&GradedPoly::one(self.ring)) {
            return Err(Error::BadLeadingCoeff);
        }
        let one = TruncSeries::one(self.ring, self.arity, self.trunc);
        let h = self.sub(&one)?; // zero constant term
        let mut out = one.clone();
        let mut acc = one;
        let neg_h = h.neg();
        for _ in 1..self.trunc {
            acc = acc.mul(&neg_h)?;
            if acc.is_zero() {
                break;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// The common value of `grade(coefficient) - 2 * (total formal degree)`
    /// across all terms, if the series is homogeneous in that sense.  Formal
    /// variables carry homological degree -2.
    pub fn weight(&self) -> Result<Option<i64>, Error> {
        let mut w: Option<i64> = None;
        for (idx, p) in &self.coeffs {
            let d = p.homogeneous_degree().ok_or_else(|| {
                Error::Internal(format!(
                    "inhomogeneous series coefficient at x^{} y^{} z^{}: {p}",
                    idx[0], idx[1], idx[2]
                ))
            })?;
            let this = d - 2 * (Self::total(*idx) as i64);
            match w {
                None => w = Some(this),
                Some(prev) if prev != this => {
                    return Err(Error::Internal(format!(
                        "mixed series weights {prev} and {this}"
                    )))
                }
                _ => {}
            }
        }
        Ok(w)
    }

    /// First nonzero coefficient in index order, for residual reporting.
    pub fn first_term(&self) -> Option<(Idx, GradedPoly)> {
        self.coeffs.iter().next().map(|(i, p)| (*i, p.clone()))
    }
}

fn powers(s: &TruncSeries, max: u32) -> Result<Vec<TruncSeries>, Error> {
    let mut pows = Vec::with_capacity(max as usize + 1);
    pows.push(TruncSeries::one(s.ring, s.arity, s.trunc));
    for i in 1..=max {
        let prev = &pows[i as usize - 1];
        if prev.is_zero() {
            pows.push(prev.clone());
        } else {
            pows.push(prev.mul(s)?);
        }
    }
    Ok(pows)
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Idx, &GradedPoly)> = self.coeffs.iter().collect();
        terms.sort_by_key(|(idx, _)| (Self::total(**idx), idx[1], idx[2]));
        let mut first = true;
        for (idx, p) in terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({p})")?;
            for (e, name) in idx.iter().zip(["x", "y", "z"]) {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

pub fn format_series(s: &TruncSeries) -> String {
    s.to_string()
}

/// The series z = sum_{k >= 0} v1^{2^k} x^{2^k} over F_2[v1].
pub fn z_series(trunc: u32) -> TruncSeries {
    let mut s = TruncSeries::zero(RingTag::Mod2, 1, trunc);
    let mut k = 0u32;
    loop {
        let e = 1u64 << k;
        if e >= trunc as u64 {
            break;
        }
        s.set_coeff(
            [e as u32, 0, 0],
            GradedPoly::var_pow(Variable::V(1), e as u32, RingTag::Mod2),
        );
        k += 1;
    }
    s
}

/// A series over A*[eps]/(2 eps, eps^2): an even part plus eps times a mod-2
/// part.  The eps component being mod 2 encodes 2 eps = 0, and no eps^2 term
/// can be represented at all.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EpsSeries {
    pub even: TruncSeries,
    pub eps: TruncSeries,
}

impl EpsSeries {
    pub fn new(even: TruncSeries, eps: TruncSeries) -> Result<Self, Error> {
        if eps.ring() != RingTag::Mod2 {
            return Err(Error::RingMismatch(RingTag::Mod2, eps.ring()));
        }
        if even.arity != eps.arity {
            return Err(Error::ArityMismatch(even.arity, eps.arity));
        }
        if even.trunc != eps.trunc {
            return Err(Error::TruncMismatch(even.trunc, eps.trunc));
        }
        Ok(EpsSeries { even, eps })
    }

    pub fn from_even(even: TruncSeries) -> Self {
        let eps = TruncSeries::zero(RingTag::Mod2, even.arity, even.trunc);
        EpsSeries { even, eps }
    }

    /// The element eps itself.
    pub fn eps_unit(ring: RingTag, arity: u8, trunc: u32) -> Self {
        EpsSeries {
            even: TruncSeries::zero(ring, arity, trunc),
            eps: TruncSeries::one(RingTag::Mod2, arity, trunc),
        }
    }

    pub fn add(&self, other: &EpsSeries) -> Result<EpsSeries, Error> {
        Ok(EpsSeries {
            even: self.even.add(&other.even)?,
            eps: self.eps.add(&other.eps)?,
        })
    }

    /// (a + eps b)(c + eps d) = ac + eps (a~ d + b c~), with ~ the mod-2
    /// reduction; the eps^2 cross term vanishes identically.
    pub fn mul(&self, other: &EpsSeries) -> Result<EpsSeries, Error> {
        let even = self.even.mul(&other.even)?;
        let a2 = self.even.reduce_mod(1)?;
        let c2 = other.even.reduce_mod(1)?;
        let eps = a2.mul(&other.eps)?.add(&self.eps.mul(&c2)?)?;
        Ok(EpsSeries { even, eps })
    }

    pub fn pow(&self, e: u32) -> Result<EpsSeries, Error> {
        let mut result = EpsSeries::from_even(TruncSeries::one(
            self.even.ring,
            self.even.arity,
            self.even.trunc,
        ));
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    pub fn scale(&self, p: &GradedPoly) -> Result<EpsSeries, Error> {
        Ok(EpsSeries {
            even: self.even.scale(p)?,
            eps: self.eps.scale(&p.reduce_mod(1)?)?,
        })
    }

    pub fn has_zero_constant_term(&self) -> bool {
        self.even.has_zero_constant_term() && self.eps.has_zero_constant_term()
    }
}
