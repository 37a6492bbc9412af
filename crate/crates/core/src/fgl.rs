//! Formal group laws: the 2-typical Hazewinkel law over BP*, the
//! multiplicative law over kU*, their log/exp series, the quadric-class
//! series, and typicality checks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::coeff::{Coeff, RingTag};
use crate::poly::{GradedPoly, Variable};
use crate::series::{EpsSeries, TruncSeries};
use crate::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FglName {
    HazewinkelBp,
    MultiplicativeKu,
    Pushforward,
}

/// A formal group law held as a truncated two-variable series, with cached
/// log/exp when the base ring is rational.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Fgl {
    pub name: FglName,
    f: TruncSeries,
    log: Option<TruncSeries>,
    exp: Option<TruncSeries>,
}

impl Fgl {
    pub fn series(&self) -> &TruncSeries {
        &self.f
    }

    pub fn log(&self) -> Option<&TruncSeries> {
        self.log.as_ref()
    }

    pub fn exp(&self) -> Option<&TruncSeries> {
        self.exp.as_ref()
    }

    pub fn trunc(&self) -> u32 {
        self.f.trunc()
    }

    pub fn ring(&self) -> RingTag {
        self.f.ring()
    }

    /// F(s, t) by two-variable substitution.
    pub fn formal_sum(&self, s: &TruncSeries, t: &TruncSeries) -> Result<TruncSeries, Error> {
        self.f.subst2(s, t)
    }

    /// F evaluated on eps-adjoined series.  Only the even parts need zero
    /// constant term: eps itself is nilpotent, so an eps constant is fine.
    /// Eps output is reliable only below degree trunc - 1 (the x^i eps terms
    /// come from the x^i y coefficients of F).
    pub fn formal_sum_eps(&self, s: &EpsSeries, t: &EpsSeries) -> Result<EpsSeries, Error> {
        if !s.even.has_zero_constant_term() || !t.even.has_zero_constant_term() {
            return Err(Error::NonzeroConstantTerm);
        }
        let arity = s.even.arity();
        let trunc = s.even.trunc();
        let ring = s.even.ring();
        let max_i = self.f.coeffs().map(|(idx, _)| idx[0]).max().unwrap_or(0);
        let max_j = self.f.coeffs().map(|(idx, _)| idx[1]).max().unwrap_or(0);
        let mut s_pows = Vec::with_capacity(max_i as usize + 1);
        s_pows.push(EpsSeries::from_even(TruncSeries::one(ring, arity, trunc)));
        for i in 1..=max_i as usize {
            s_pows.push(s_pows[i - 1].mul(s)?);
        }
        let mut t_pows = Vec::with_capacity(max_j as usize + 1);
        t_pows.push(EpsSeries::from_even(TruncSeries::one(ring, arity, trunc)));
        for j in 1..=max_j as usize {
            t_pows.push(t_pows[j - 1].mul(t)?);
        }
        let mut out = EpsSeries::from_even(TruncSeries::zero(ring, arity, trunc));
        for (idx, p) in self.f.coeffs() {
            let (i, j) = (idx[0] as usize, idx[1] as usize);
            let sp = &s_pows[i];
            let tp = &t_pows[j];
            if (sp.even.is_zero() && sp.eps.is_zero()) || (tp.even.is_zero() && tp.eps.is_zero()) {
                continue;
            }
            let prod = sp.mul(tp)?.scale(p)?;
            out = out.add(&prod)?;
        }
        Ok(out)
    }

    /// [n]_F(x) by iterated formal sums.
    pub fn n_series(&self, n: u32) -> Result<TruncSeries, Error> {
        let x = TruncSeries::var_x(self.ring(), 1, self.trunc());
        let mut acc = TruncSeries::zero(self.ring(), 1, self.trunc());
        for _ in 0..n {
            acc = if acc.is_zero() {
                x.clone()
            } else {
                self.formal_sum(&acc, &x)?
            };
        }
        Ok(acc)
    }

    /// The partial-derivative series F_2(x) = dF/dy (x, 0), extracted
    /// directly from the stored coefficients.  The x^i entry comes from the
    /// x^i y term of F, so the result is one degree shorter than F.
    pub fn f_partial(&self) -> TruncSeries {
        let mut out = TruncSeries::zero(self.ring(), 1, self.trunc().saturating_sub(1));
        for (idx, p) in self.f.coeffs() {
            if idx[1] == 1 {
                out.set_coeff([idx[0], 0, 0], p.clone());
            }
        }
        out
    }

    /// Reduce the law mod 2 (log/exp are dropped: they are rational data).
    pub fn reduce_mod2(&self) -> Result<Fgl, Error> {
        Ok(Fgl {
            name: self.name,
            f: self.f.reduce_mod(1)?,
            log: None,
            exp: None,
        })
    }

    /// Check F(F(x,y),z) = F(x,F(y,z)) at the given (reduced) truncation.
    pub fn check_associativity(&self, trunc: u32) -> Result<(), Error> {
        let ring = self.ring();
        let f = self.f.truncate(trunc);
        let x = TruncSeries::var_x(ring, 3, trunc);
        let y = TruncSeries::var_y(ring, 3, trunc);
        let z = TruncSeries::var_z(ring, trunc);
        let xy = f.subst2(&x, &y)?;
        let yz = f.subst2(&y, &z)?;
        let lhs = f.subst2(&xy, &z)?;
        let rhs = f.subst2(&x, &yz)?;
        if lhs != rhs {
            return Err(Error::Internal("formal group law is not associative".into()));
        }
        Ok(())
    }
}

/// Ravenel's sum formula for log_F over Q[v1, v2, ...]: summing
/// v_I x^{2^{||I||}} / 2^{|I|} over sequences I of positive integers, with
/// v_I = prod_j v_{i_j}^{m_j} and m_j = 2^{i_1 + ... + i_{j-1}}.
pub fn hazewinkel_log_ravenel(trunc: u32) -> TruncSeries {
    let mut out = TruncSeries::var_x(RingTag::Rational, 1, trunc);
    // Max total ||I|| with 2^||I|| < trunc.
    let mut norm_max = 0u32;
    while (1u64 << (norm_max + 1)) < trunc as u64 {
        norm_max += 1;
    }
    // Enumerate compositions of each norm 1..=norm_max.
    let mut stack: Vec<Vec<u32>> = vec![vec![]];
    while let Some(seq) = stack.pop() {
        let norm: u32 = seq.iter().sum();
        if !seq.is_empty() {
            // Contribute v_I x^{2^norm} / 2^{|I|}.
            let mut m_exp = 0u32; // running i_1 + ... + i_{j-1}
            let mut v_i = GradedPoly::one(RingTag::Rational);
            for &i in &seq {
                let m = 1u32 << m_exp;
                v_i = v_i
                    .mul(&GradedPoly::var_pow(Variable::V(i), m, RingTag::Rational))
                    .unwrap();
                m_exp += i;
            }
            let denom = num::BigInt::from(1u8) << seq.len();
            let c = Coeff::Q(num::BigRational::new(num::BigInt::from(1u8), denom));
            let term = v_i.scale(&c);
            let e = 1u32 << norm;
            let mut cur = out.coeff([e, 0, 0]);
            cur = cur.add(&term).unwrap();
            out.set_coeff([e, 0, 0], cur);
        }
        for i in 1..=(norm_max - norm) {
            let mut next = seq.clone();
            next.push(i);
            stack.push(next);
        }
    }
    out
}

/// The log series via the Hazewinkel recursion
/// 2 m_n = sum_{0 <= i < n} m_i v_{n-i}^{2^i}, with m_0 = 1 and
/// log = sum_n m_n x^{2^n}.
pub fn hazewinkel_log_recursion(trunc: u32) -> TruncSeries {
    let mut out = TruncSeries::var_x(RingTag::Rational, 1, trunc);
    let mut ms: Vec<GradedPoly> = vec![GradedPoly::one(RingTag::Rational)];
    let mut n = 1u32;
    loop {
        let e = 1u64 << n;
        if e >= trunc as u64 {
            break;
        }
        let mut sum = GradedPoly::zero(RingTag::Rational);
        for (i, mi) in ms.iter().enumerate() {
            let vpow = GradedPoly::var_pow(Variable::V(n - i as u32), 1 << i, RingTag::Rational);
            sum = sum.add(&mi.mul(&vpow).unwrap()).unwrap();
        }
        let m_n = sum.scale(&Coeff::from_ratio(1, 2));
        out.set_coeff([e as u32, 0, 0], m_n.clone());
        ms.push(m_n);
        n += 1;
    }
    out
}

/// The BP logarithm, computed both ways; the two constructions must agree.
pub fn hazewinkel_log(trunc: u32) -> Result<TruncSeries, Error> {
    let a = hazewinkel_log_ravenel(trunc);
    let b = hazewinkel_log_recursion(trunc);
    if a != b {
        return Err(Error::Internal(
            "Ravenel-formula log disagrees with the Hazewinkel recursion".into(),
        ));
    }
    Ok(a)
}

/// Residual of the defining relation
/// [2]_F(x) - ( exp_F(2x) +_F sum^F_{k>0} v_k x^{2^k} ).
pub fn defining_relation_residual(fgl: &Fgl) -> Result<TruncSeries, Error> {
    let trunc = fgl.trunc();
    let two_series = fgl.n_series(2)?;
    let exp = fgl
        .exp()
        .ok_or_else(|| Error::Internal("defining relation needs the exp series".into()))?;
    let x2 = TruncSeries::var_x(RingTag::Rational, 1, trunc).scale_int(2);
    let mut rhs = exp.compose(&x2)?;
    let mut k = 1u32;
    loop {
        let e = 1u64 << k;
        if e >= trunc as u64 {
            break;
        }
        let vk_term = TruncSeries::term(
            GradedPoly::var(Variable::V(k), RingTag::Rational),
            [e as u32, 0, 0],
            1,
            trunc,
        );
        rhs = fgl.formal_sum(&rhs, &vk_term)?;
        k += 1;
    }
    two_series.sub(&rhs)
}

/// Build the 2-typical Hazewinkel law over Q[v1, v2, ...] at the given
/// truncation, with unitality, commutativity, 2-integrality and the defining
/// relation verified as postconditions.
pub fn build_bp_fgl(trunc: u32) -> Result<Fgl, Error> {
    if trunc < 2 {
        return Err(Error::InvalidArgument("truncation must be at least 2".into()));
    }
    let log = hazewinkel_log(trunc)?;
    let exp = log.revert()?;
    let lx = log.extend_arity(2);
    let ly = lx.swap_xy();
    let f = exp.compose(&lx.add(&ly)?)?;
    let fgl = Fgl {
        name: FglName::HazewinkelBp,
        f,
        log: Some(log),
        exp: Some(exp),
    };
    check_unital_commutative(&fgl)?;
    if !fgl.f.is_2_integral() {
        return Err(Error::Internal("BP law has a non-2-integral coefficient".into()));
    }
    let res = defining_relation_residual(&fgl)?;
    if !res.is_zero() {
        return Err(Error::Internal(format!(
            "Hazewinkel defining relation fails; first residual term {:?}",
            res.first_term()
        )));
    }
    Ok(fgl)
}

/// The multiplicative law F(x,y) = x + y + u x y over Z[u] (exact), with log
/// and exp attached.
pub fn build_mult_fgl(trunc: u32) -> Result<Fgl, Error> {
    let ring = RingTag::Rational;
    let mut f = TruncSeries::zero(ring, 2, trunc);
    f.set_coeff([1, 0, 0], GradedPoly::one(ring));
    f.set_coeff([0, 1, 0], GradedPoly::one(ring));
    f.set_coeff([1, 1, 0], GradedPoly::var(Variable::U, ring));
    // log = sum_k (-u)^{k-1} x^k / k.
    let mut log = TruncSeries::zero(ring, 1, trunc);
    for k in 1..trunc {
        let c = Coeff::Q(num::BigRational::new(
            num::BigInt::from(if k % 2 == 1 { 1i64 } else { -1 }),
            num::BigInt::from(k),
        ));
        log.set_coeff(
            [k, 0, 0],
            GradedPoly::var_pow(Variable::U, k - 1, ring).scale(&c),
        );
    }
    let exp = log.revert()?;
    let x = TruncSeries::var_x(ring, 1, trunc);
    if log.compose(&exp)? != x || exp.compose(&log)? != x {
        return Err(Error::Internal("multiplicative log/exp are not inverse".into()));
    }
    // log linearises F: F(x,y) = exp(log x + log y).
    let lx = log.extend_arity(2);
    let ly = lx.swap_xy();
    if exp.compose(&lx.add(&ly)?)? != f {
        return Err(Error::Internal("multiplicative log does not linearise F".into()));
    }
    let fgl = Fgl {
        name: FglName::MultiplicativeKu,
        f,
        log: Some(log),
        exp: Some(exp),
    };
    check_unital_commutative(&fgl)?;
    Ok(fgl)
}

/// The additive law F(x,y) = x + y.
pub fn build_additive_fgl(ring: RingTag, trunc: u32) -> Fgl {
    let mut f = TruncSeries::zero(ring, 2, trunc);
    f.set_coeff([1, 0, 0], GradedPoly::one(ring));
    f.set_coeff([0, 1, 0], GradedPoly::one(ring));
    let x = TruncSeries::var_x(ring, 1, trunc);
    Fgl {
        name: FglName::Pushforward,
        f,
        log: Some(x.clone()),
        exp: Some(x),
    }
}

fn check_unital_commutative(fgl: &Fgl) -> Result<(), Error> {
    let ring = fgl.ring();
    let trunc = fgl.trunc();
    let x = TruncSeries::var_x(ring, 2, trunc);
    let zero = TruncSeries::zero(ring, 2, trunc);
    if fgl.formal_sum(&x, &zero)? != x {
        return Err(Error::Internal("formal group law is not unital".into()));
    }
    if fgl.f.swap_xy() != fgl.f {
        return Err(Error::Internal("formal group law is not commutative".into()));
    }
    Ok(())
}

/// The partial series F_2(x) = 1/log'_F(x) over the rational base, valid to
/// one degree less than the log's truncation.
pub fn f_partial_from_log(fgl: &Fgl) -> Result<TruncSeries, Error> {
    let log = fgl
        .log()
        .ok_or_else(|| Error::Internal("no log series available".into()))?;
    log.derivative()?.reciprocal()
}

/// Coefficients [W_m] of [2]_F(x) * log'_F(x): index m runs from 1; entry
/// q(w_k) is `ws[2^k - 1]`.  All values are checked 2-integral.
pub fn w_series(fgl: &Fgl, count: u32) -> Result<Vec<GradedPoly>, Error> {
    let log = fgl
        .log()
        .ok_or_else(|| Error::Internal("quadric series needs the log".into()))?;
    let exp = fgl
        .exp()
        .ok_or_else(|| Error::Internal("quadric series needs the exp".into()))?;
    if (count as u64) + 1 >= fgl.trunc() as u64 {
        return Err(Error::InvalidArgument(
            "truncation too small for the requested quadric classes".into(),
        ));
    }
    // [2]_F(x) = exp(2 log x).
    let two_log = log.scale_int(2);
    let doubling = exp.compose(&two_log)?;
    let dlog = log.derivative()?;
    let prod = doubling.truncate(fgl.trunc() - 1).mul(&dlog)?;
    let mut out = Vec::with_capacity(count as usize);
    for m in 1..=count {
        let c = prod.coeff([m, 0, 0]);
        if !c.is_2_integral() {
            return Err(Error::NotTwoIntegral {
                monomial: format!("[W_{m}] = {c}"),
            });
        }
        out.push(c);
    }
    Ok(out)
}

/// Classical typicality criterion at an odd prime p: the formal sum of
/// omega^i x over i = 0..p-1 must vanish in (ring[omega]/Phi_p)[[x]].
/// Returns the residual series (zero iff typical).
pub fn typicality_residual(fgl: &Fgl, p: u32, trunc: u32) -> Result<TruncSeries, Error> {
    let ring = fgl.ring();
    let f = Fgl {
        name: fgl.name,
        f: fgl.f.truncate(trunc),
        log: None,
        exp: None,
    };
    let x = TruncSeries::var_x(ring, 1, trunc);
    let mut acc: Option<TruncSeries> = None;
    for i in 0..p {
        let omega_i = GradedPoly::var_pow(Variable::Omega(p), i, ring);
        let term = x.scale(&omega_i)?;
        acc = Some(match acc {
            None => term,
            Some(a) => f.formal_sum(&a, &term)?,
        });
    }
    Ok(acc.unwrap())
}

pub fn verify_2_typical_classical(fgl: &Fgl, p: u32, trunc: u32) -> Result<bool, Error> {
    Ok(typicality_residual(fgl, p, trunc)?.is_zero())
}

/// Process-wide memo for the (expensive) rational BP law.
pub fn build_bp_fgl_cached(trunc: u32) -> Result<Arc<Fgl>, Error> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Fgl>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&trunc) {
        return Ok(f.clone());
    }
    let built = Arc::new(build_bp_fgl(trunc)?);
    cache.lock().unwrap().insert(trunc, built.clone());
    Ok(built)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::series::z_series;

    fn q(s: &str) -> GradedPoly {
        parse_poly(s, RingTag::Rational, 3).unwrap()
    }

    fn f2(s: &str) -> GradedPoly {
        parse_poly(s, RingTag::Mod2, 3).unwrap()
    }

    #[test]
    fn log_small_coefficients() {
        let log = hazewinkel_log(9).unwrap();
        assert_eq!(log.coeff([1, 0, 0]), GradedPoly::one(RingTag::Rational));
        assert_eq!(log.coeff([2, 0, 0]), q("1/2*v1"));
        assert_eq!(log.coeff([4, 0, 0]), q("1/2*v2 + 1/4*v1^3"));
        assert_eq!(log.coeff([3, 0, 0]), GradedPoly::zero(RingTag::Rational));
    }

    #[test]
    fn bp_fgl_basics() {
        let fgl = build_bp_fgl(9).unwrap();
        // F(x,0) = x is checked at build time; spot-check the xy coefficient.
        let a11 = fgl.series().coeff([1, 1, 0]).reduce_mod(1).unwrap();
        assert_eq!(a11, f2("v1"));
        // a_{1,2^k} = v1^{2^k} mod 2 and all other a_{1j} vanish mod 2.
        let fp = fgl.f_partial().reduce_mod(1).unwrap();
        let one_plus_z = TruncSeries::one(RingTag::Mod2, 1, 8)
            .add(&z_series(8))
            .unwrap();
        assert_eq!(fp, one_plus_z);
        fgl.check_associativity(5).unwrap();
    }

    #[test]
    fn bp_log_weight() {
        let log = hazewinkel_log(17).unwrap();
        assert_eq!(log.weight().unwrap(), Some(-2));
    }

    #[test]
    fn mult_fgl_basics() {
        let fgl = build_mult_fgl(8).unwrap();
        let mut want = TruncSeries::zero(RingTag::Rational, 2, 8);
        want.set_coeff([1, 0, 0], GradedPoly::one(RingTag::Rational));
        want.set_coeff([0, 1, 0], GradedPoly::one(RingTag::Rational));
        want.set_coeff([1, 1, 0], q("u"));
        assert_eq!(fgl.series(), &want);
        assert_eq!(fgl.log().unwrap().coeff([2, 0, 0]), q("-1/2*u"));
        // [2]_F(x) = 2x + u x^2.
        let two = fgl.n_series(2).unwrap();
        let mut want2 = TruncSeries::zero(RingTag::Rational, 1, 8);
        want2.set_coeff([1, 0, 0], GradedPoly::from_int(2, RingTag::Rational));
        want2.set_coeff([2, 0, 0], q("u"));
        assert_eq!(two, want2);
        // dF/dy(x, 0) = 1 + u x.
        let mut fp = TruncSeries::one(RingTag::Rational, 1, 7);
        fp.set_coeff([1, 0, 0], q("u"));
        assert_eq!(fgl.f_partial(), fp);
        fgl.check_associativity(5).unwrap();
    }

    #[test]
    fn n_series_trivia() {
        let fgl = build_mult_fgl(6).unwrap();
        let x = TruncSeries::var_x(RingTag::Rational, 1, 6);
        assert_eq!(fgl.n_series(1).unwrap(), x);
        assert!(fgl.n_series(0).unwrap().is_zero());
    }

    #[test]
    fn formal_sum_unit() {
        let fgl = build_mult_fgl(6).unwrap();
        let x = TruncSeries::var_x(RingTag::Rational, 2, 6);
        let zero = TruncSeries::zero(RingTag::Rational, 2, 6);
        assert_eq!(fgl.formal_sum(&x, &zero).unwrap(), x);
    }

    #[test]
    fn invdif_eps_route() {
        // x +_F eps = x + (1 + z) eps over BP mod 2.
        let trunc = 9;
        let fgl = build_bp_fgl(trunc).unwrap().reduce_mod2().unwrap();
        let x = EpsSeries::from_even(TruncSeries::var_x(RingTag::Mod2, 1, trunc));
        let e = EpsSeries::eps_unit(RingTag::Mod2, 1, trunc);
        let sum = fgl.formal_sum_eps(&x, &e).unwrap();
        assert_eq!(sum.even, TruncSeries::var_x(RingTag::Mod2, 1, trunc));
        let one_plus_z = TruncSeries::one(RingTag::Mod2, 1, trunc - 1)
            .add(&z_series(trunc - 1))
            .unwrap();
        assert_eq!(sum.eps.truncate(trunc - 1), one_plus_z);
    }

    #[test]
    fn two_series_mod2_leading_term() {
        let fgl = build_bp_fgl(5).unwrap();
        let two = fgl.n_series(2).unwrap().reduce_mod(1).unwrap();
        assert!(two.coeff([1, 0, 0]).is_zero());
        assert_eq!(two.coeff([2, 0, 0]), f2("v1"));
    }

    #[test]
    fn additive_is_typical() {
        let add = build_additive_fgl(RingTag::Rational, 6);
        assert!(verify_2_typical_classical(&add, 3, 6).unwrap());
    }

    #[test]
    fn multiplicative_is_not_2_typical() {
        let fgl = build_mult_fgl(6).unwrap();
        assert!(!verify_2_typical_classical(&fgl, 3, 6).unwrap());
    }

    #[test]
    fn bp_is_2_typical_at_p3() {
        let fgl = build_bp_fgl(9).unwrap();
        assert!(verify_2_typical_classical(&fgl, 3, 9).unwrap());
    }

    #[test]
    fn quadric_classes_small() {
        let fgl = build_bp_fgl(9).unwrap();
        let ws = w_series(&fgl, 4).unwrap();
        // q(w_0) = [W_1] = 2.
        assert_eq!(ws[0], GradedPoly::from_int(2, RingTag::Rational));
        // q(w_1) = v1 mod 2.
        assert_eq!(ws[1].reduce_mod(1).unwrap(), f2("v1"));
        // q(w_2) = v2 mod (2, v1).
        let mut b = std::collections::BTreeMap::new();
        b.insert(Variable::V(1), GradedPoly::zero(RingTag::Mod2));
        let w2 = ws[3].reduce_mod(1).unwrap().substitute(&b).unwrap();
        assert_eq!(w2, f2("v2"));
    }
}
