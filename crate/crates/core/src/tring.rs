//! The twisted ring T(A*): pairs [a,b] over the mod-2 reduction of the base,
//! with addition [a,b]+[c,d] = [a+c, b+d+t*ac] and multiplication
//! [a,b][c,d] = [ac, a^2 d + b c^2], where the twist t is v1 for BP and u
//! for kU.  Elements are held as truncated series so the formal-variable
//! identities can be checked degree by degree.

use std::fmt;
use std::sync::Arc;

use crate::coeff::RingTag;
use crate::poly::{GradedPoly, Variable};
use crate::series::{EpsSeries, TruncSeries};
use crate::Error;

/// Shared, immutable context fixing the twist element and the series shape.
///
/// Both components are truncated at the same x-degree bound: truncation by
/// formal degree is a ring quotient compatible with the twisted operations,
/// so a uniform bound keeps every comparison meaningful.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TContext {
    twist: GradedPoly,
    arity: u8,
    trunc: u32,
}

impl TContext {
    pub fn new(twist: GradedPoly, arity: u8, trunc: u32) -> Result<Arc<Self>, Error> {
        if twist.ring() != RingTag::Mod2 {
            return Err(Error::RingMismatch(RingTag::Mod2, twist.ring()));
        }
        if twist.homogeneous_degree() != Some(2) {
            return Err(Error::InvalidArgument(
                "twist element must be homogeneous of degree 2".into(),
            ));
        }
        Ok(Arc::new(TContext {
            twist,
            arity,
            trunc,
        }))
    }

    /// BP context: twist v1.
    pub fn bp(arity: u8, trunc: u32) -> Arc<Self> {
        TContext::new(GradedPoly::var(Variable::V(1), RingTag::Mod2), arity, trunc).unwrap()
    }

    /// kU context: twist u.
    pub fn ku(arity: u8, trunc: u32) -> Arc<Self> {
        TContext::new(GradedPoly::var(Variable::U, RingTag::Mod2), arity, trunc).unwrap()
    }

    pub fn twist(&self) -> &GradedPoly {
        &self.twist
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }
}

/// An element [a,b] of T(A*) with both components mod-2 truncated series.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TElem {
    ctx: Arc<TContext>,
    a: TruncSeries,
    b: TruncSeries,
}

impl TElem {
    pub fn new(ctx: Arc<TContext>, a: TruncSeries, b: TruncSeries) -> Result<Self, Error> {
        for s in [&a, &b] {
            if s.ring() != RingTag::Mod2 {
                return Err(Error::RingMismatch(RingTag::Mod2, s.ring()));
            }
            if s.arity() != ctx.arity {
                return Err(Error::ArityMismatch(ctx.arity, s.arity()));
            }
            if s.trunc() != ctx.trunc {
                return Err(Error::TruncMismatch(ctx.trunc, s.trunc()));
            }
        }
        Ok(TElem { ctx, a, b })
    }

    pub fn zero(ctx: Arc<TContext>) -> Self {
        let z = TruncSeries::zero(RingTag::Mod2, ctx.arity, ctx.trunc);
        TElem {
            ctx,
            a: z.clone(),
            b: z,
        }
    }

    pub fn one(ctx: Arc<TContext>) -> Self {
        let a = TruncSeries::one(RingTag::Mod2, ctx.arity, ctx.trunc);
        let b = TruncSeries::zero(RingTag::Mod2, ctx.arity, ctx.trunc);
        TElem { ctx, a, b }
    }

    /// [p, 0] for a constant polynomial p.
    pub fn from_a_poly(ctx: Arc<TContext>, p: GradedPoly) -> Result<Self, Error> {
        let a = TruncSeries::from_poly(p, ctx.arity, ctx.trunc);
        let b = TruncSeries::zero(RingTag::Mod2, ctx.arity, ctx.trunc);
        TElem::new(ctx, a, b)
    }

    /// [0, p] for a constant polynomial p.
    pub fn from_b_poly(ctx: Arc<TContext>, p: GradedPoly) -> Result<Self, Error> {
        let b = TruncSeries::from_poly(p, ctx.arity, ctx.trunc);
        let a = TruncSeries::zero(RingTag::Mod2, ctx.arity, ctx.trunc);
        TElem::new(ctx, a, b)
    }

    pub fn ctx(&self) -> &Arc<TContext> {
        &self.ctx
    }

    pub fn a(&self) -> &TruncSeries {
        &self.a
    }

    pub fn b(&self) -> &TruncSeries {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn check_ctx(&self, other: &TElem) -> Result<(), Error> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    fn twist_series(&self) -> TruncSeries {
        TruncSeries::from_poly(self.ctx.twist.clone(), self.ctx.arity, self.ctx.trunc)
    }

    /// [a,b] + [c,d] = [a+c, b+d+t*ac].
    pub fn add(&self, other: &TElem) -> Result<TElem, Error> {
        self.check_ctx(other)?;
        let a = self.a.add(&other.a)?;
        let cocycle = self.a.mul(&other.a)?.mul(&self.twist_series())?;
        let b = self.b.add(&other.b)?.add(&cocycle)?;
        Ok(TElem {
            ctx: self.ctx.clone(),
            a,
            b,
        })
    }

    /// [a,b] * [c,d] = [ac, a^2 d + b c^2].
    pub fn mul(&self, other: &TElem) -> Result<TElem, Error> {
        self.check_ctx(other)?;
        let a = self.a.mul(&other.a)?;
        let b = self
            .a
            .mul(&self.a)?
            .mul(&other.b)?
            .add(&self.b.mul(&other.a.mul(&other.a)?)?)?;
        Ok(TElem {
            ctx: self.ctx.clone(),
            a,
            b,
        })
    }

    /// 2[a,b] = [0, t*a^2].
    pub fn double(&self) -> Result<TElem, Error> {
        let b = self.a.mul(&self.a)?.mul(&self.twist_series())?;
        Ok(TElem {
            ctx: self.ctx.clone(),
            a: TruncSeries::zero(RingTag::Mod2, self.ctx.arity, self.ctx.trunc),
            b,
        })
    }

    /// -[a,b] = [a, b + t*a^2]; self + self.neg() = 0.
    pub fn neg(&self) -> Result<TElem, Error> {
        let b = self
            .b
            .add(&self.a.mul(&self.a)?.mul(&self.twist_series())?)?;
        Ok(TElem {
            ctx: self.ctx.clone(),
            a: self.a.clone(),
            b,
        })
    }

    pub fn pow(&self, e: u32) -> Result<TElem, Error> {
        let mut result = TElem::one(self.ctx.clone());
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

    /// The pair form (r, s) = (a, a^2 + eps b).
    pub fn to_pair(&self) -> Result<(TruncSeries, EpsSeries), Error> {
        let r = self.a.clone();
        let s = EpsSeries::new(self.a.mul(&self.a)?, self.b.clone())?;
        Ok((r, s))
    }

    /// Rebuild [a,b] from the pair form, checking s = r^2 mod eps.
    pub fn from_pair(
        ctx: Arc<TContext>,
        r: TruncSeries,
        s: EpsSeries,
    ) -> Result<TElem, Error> {
        if s.even != r.mul(&r)? {
            return Err(Error::InvalidArgument(
                "pair violates s = r^2 mod eps".into(),
            ));
        }
        TElem::new(ctx, r, s.eps)
    }
}

impl fmt::Display for TElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// Z(s) = [s, s * F2(s)] where F2 is the one-variable partial dF/dy(x,0)
/// of the mod-2 law, supplied at the context truncation.
pub fn z_elem(ctx: &Arc<TContext>, f2: &TruncSeries, s: &TruncSeries) -> Result<TElem, Error> {
    if !s.has_zero_constant_term() {
        return Err(Error::NonzeroConstantTerm);
    }
    let f2s = f2.compose(s)?;
    let b = s.mul(&f2s)?;
    TElem::new(ctx.clone(), s.clone(), b)
}

/// X +_{QF} Y = sum_{ij} Qbar(a_ij) X^i Y^j, with a_ij the coefficients of
/// the rational (2-integral) law and `qbar` the coefficient pushforward.
pub fn qf_add(
    qbar: &dyn Fn(&GradedPoly) -> Result<TElem, Error>,
    f: &crate::fgl::Fgl,
    x: &TElem,
    y: &TElem,
) -> Result<TElem, Error> {
    x.check_ctx(y)?;
    if !x.a.has_zero_constant_term()
        || !x.b.has_zero_constant_term()
        || !y.a.has_zero_constant_term()
        || !y.b.has_zero_constant_term()
    {
        return Err(Error::NonzeroConstantTerm);
    }
    let ctx = x.ctx.clone();
    let max_i = f.series().coeffs().map(|(idx, _)| idx[0]).max().unwrap_or(0);
    let max_j = f.series().coeffs().map(|(idx, _)| idx[1]).max().unwrap_or(0);
    let mut x_pows = Vec::with_capacity(max_i as usize + 1);
    x_pows.push(TElem::one(ctx.clone()));
    for i in 1..=max_i as usize {
        x_pows.push(x_pows[i - 1].mul(x)?);
    }
    let mut y_pows = Vec::with_capacity(max_j as usize + 1);
    y_pows.push(TElem::one(ctx.clone()));
    for j in 1..=max_j as usize {
        y_pows.push(y_pows[j - 1].mul(y)?);
    }
    let mut out = TElem::zero(ctx);
    for (idx, a_ij) in f.series().coeffs() {
        let (i, j) = (idx[0] as usize, idx[1] as usize);
        let xy = x_pows[i].mul(&y_pows[j])?;
        if xy.is_zero() {
            continue;
        }
        let c = qbar(a_ij)?;
        out = out.add(&c.mul(&xy)?)?;
    }
    Ok(out)
}

/// Left-to-right fold of +_{QF} over a term list; associativity of the
/// formal group law makes the result order-independent.
pub fn qf_sum(
    qbar: &dyn Fn(&GradedPoly) -> Result<TElem, Error>,
    f: &crate::fgl::Fgl,
    terms: &[TElem],
) -> Result<TElem, Error> {
    let mut it = terms.iter();
    let mut acc = match it.next() {
        None => return Err(Error::InvalidArgument("qf_sum of an empty list".into())),
        Some(t) => t.clone(),
    };
    for t in it {
        acc = qf_add(qbar, f, &acc, t)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn f2(s: &str) -> GradedPoly {
        parse_poly(s, RingTag::Mod2, 3).unwrap()
    }

    fn one_bp(trunc: u32) -> TElem {
        TElem::one(TContext::bp(1, trunc))
    }

    #[test]
    fn one_plus_one_is_zero_v1() {
        // [1,0] + [1,0] = [0, v1].
        let e = one_bp(4);
        let s = e.add(&e).unwrap();
        assert!(s.a().is_zero());
        assert_eq!(s.b().constant_term(), f2("v1"));
        // Fourfold sum is zero: 4T = 0.
        let four = s.add(&s).unwrap();
        assert!(four.is_zero());
    }

    #[test]
    fn double_formula() {
        let e = one_bp(4);
        let d = e.double().unwrap();
        assert_eq!(d, e.add(&e).unwrap());
        assert!(d.double().unwrap().is_zero());
        // 2[0,b] = 0.
        let ctx = TContext::bp(1, 4);
        let ob = TElem::from_b_poly(ctx, f2("v2")).unwrap();
        assert!(ob.double().unwrap().is_zero());
    }

    #[test]
    fn mul_unit_and_zero_b() {
        let ctx = TContext::bp(1, 4);
        let p = TElem::new(
            ctx.clone(),
            TruncSeries::from_poly(f2("v1"), 1, 4),
            TruncSeries::from_poly(f2("v2"), 1, 4),
        )
        .unwrap();
        assert_eq!(p.mul(&TElem::one(ctx.clone())).unwrap(), p);
        // [0,b][0,d] = 0.
        let b1 = TElem::from_b_poly(ctx.clone(), f2("v1")).unwrap();
        let b2 = TElem::from_b_poly(ctx, f2("v2")).unwrap();
        assert!(b1.mul(&b2).unwrap().is_zero());
    }

    #[test]
    fn neg_is_additive_inverse() {
        let ctx = TContext::bp(1, 4);
        let p = TElem::new(
            ctx,
            TruncSeries::from_poly(f2("v1"), 1, 4),
            TruncSeries::from_poly(f2("v2"), 1, 4),
        )
        .unwrap();
        let n = p.neg().unwrap();
        assert!(p.add(&n).unwrap().is_zero());
    }

    #[test]
    fn pair_round_trip() {
        let ctx = TContext::bp(1, 4);
        let p = TElem::new(
            ctx.clone(),
            TruncSeries::var_x(RingTag::Mod2, 1, 4),
            TruncSeries::from_poly(f2("v2"), 1, 4),
        )
        .unwrap();
        let (r, s) = p.to_pair().unwrap();
        assert_eq!(TElem::from_pair(ctx, r, s).unwrap(), p);
    }

    #[test]
    fn context_mismatch_rejected() {
        let a = one_bp(4);
        let b = TElem::one(TContext::ku(1, 4));
        assert!(matches!(a.add(&b), Err(Error::ContextMismatch)));
    }

    #[test]
    fn z_elem_square_has_zero_b() {
        // Z(x)^2 = [x^2, 0] because the b-part doubles away mod 2.
        let trunc = 9;
        let ctx = TContext::bp(1, trunc);
        let fgl = crate::fgl::build_bp_fgl(trunc + 1)
            .unwrap()
            .reduce_mod2()
            .unwrap();
        let f2s = fgl.f_partial();
        let x = TruncSeries::var_x(RingTag::Mod2, 1, trunc);
        let zx = z_elem(&ctx, &f2s, &x).unwrap();
        let sq = zx.pow(2).unwrap();
        assert_eq!(sq.a(), &x.mul(&x).unwrap());
        assert!(sq.b().is_zero());
    }
}
