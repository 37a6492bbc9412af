//! The induced power operation Qbar on BP* and kU*: the u_n polynomials
//! (recurrence and subset-sum forms), the closed-form and
//! coefficient-extracted p_n = Ptilde(v_n), extension of Qbar to arbitrary
//! 2-integral polynomials, and the series-level verification computations.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::bigint::BigInt;
use num::Integer;

use crate::coeff::{choose2_mod2, Coeff, RingTag};
use crate::fgl::{build_bp_fgl_cached, build_mult_fgl, Fgl};
use crate::poly::{GradedPoly, Variable};
use crate::series::{z_series, TruncSeries};
use crate::tring::{qf_add, qf_sum, z_elem, TContext, TElem};
use crate::Error;

/// u_n via the recurrence u_n = v_{n+1} + sum_{j=1}^{n-1}
/// (v1 v_{n-j})^{2(2^j - 1)} u_{n-j}, over F_2.
pub fn u_n_recurrence(n: u32) -> Result<GradedPoly, Error> {
    if n == 0 {
        return Err(Error::InvalidArgument("u_n needs n >= 1".into()));
    }
    let ring = RingTag::Mod2;
    let mut us: Vec<GradedPoly> = vec![GradedPoly::zero(ring)]; // dummy u_0
    for m in 1..=n {
        let mut acc = GradedPoly::var(Variable::V(m + 1), ring);
        for j in 1..m {
            let e = 2 * ((1u32 << j) - 1);
            let factor = GradedPoly::var(Variable::V(1), ring)
                .mul(&GradedPoly::var(Variable::V(m - j), ring))?
                .pow(e);
            acc = acc.add(&factor.mul(&us[(m - j) as usize])?)?;
        }
        us.push(acc);
    }
    Ok(us.pop().unwrap())
}

/// u_n via the direct sum over subsets J = {j_1 < ... < j_r = n} of
/// {1,...,n} containing n, with
/// u_J = v_{j_1+1} * prod_{k=1}^{r-1} (v1 v_{j_k})^{2(2^{j_{k+1}-j_k} - 1)}.
pub fn u_n_subset_sum(n: u32) -> Result<GradedPoly, Error> {
    if n == 0 {
        return Err(Error::InvalidArgument("u_n needs n >= 1".into()));
    }
    let ring = RingTag::Mod2;
    let mut total = GradedPoly::zero(ring);
    // Subsets of {1,...,n-1}, each completed with the mandatory element n.
    for mask in 0u64..(1u64 << (n - 1)) {
        let mut js: Vec<u32> = (1..n).filter(|j| mask >> (j - 1) & 1 == 1).collect();
        js.push(n);
        let mut u_j = GradedPoly::var(Variable::V(js[0] + 1), ring);
        for k in 0..js.len() - 1 {
            let e = 2 * ((1u32 << (js[k + 1] - js[k])) - 1);
            let factor = GradedPoly::var(Variable::V(1), ring)
                .mul(&GradedPoly::var(Variable::V(js[k]), ring))?
                .pow(e);
            u_j = u_j.mul(&factor)?;
        }
        total = total.add(&u_j)?;
    }
    Ok(total)
}

/// u_n with the two constructions compared; disagreement is an internal
/// failure.
pub fn u_n(n: u32) -> Result<GradedPoly, Error> {
    let a = u_n_recurrence(n)?;
    let b = u_n_subset_sum(n)?;
    if a != b {
        return Err(Error::Internal(format!(
            "u_{n} recurrence disagrees with the subset-sum form"
        )));
    }
    Ok(a)
}

/// Closed-form p_n: p_0 = v1, p_1 = v2, p_n = v1 v_n^2 + u_n for n > 1.
pub fn p_n_closed(n: u32) -> Result<GradedPoly, Error> {
    let ring = RingTag::Mod2;
    Ok(match n {
        0 => GradedPoly::var(Variable::V(1), ring),
        1 => GradedPoly::var(Variable::V(2), ring),
        _ => {
            let head = GradedPoly::var(Variable::V(1), ring)
                .mul(&GradedPoly::var_pow(Variable::V(n), 2, ring))?;
            head.add(&u_n(n)?)?
        }
    })
}

/// p_1..p_nmax extracted independently of the closed form, by equating the
/// x^{2^{n+1}} coefficients of the two series expansions of the doubling
/// identity:
///   A(x) = sum_{l>0} v1^{2^l-1} x^{2^l}
///        + sum_{k,l>0} (v1 v_k)^{2^l-2} p_k x^{2^{k+l}}
///   B(x) = sum_{k>0, l>=0} v1^{2^l-1} v_k^{2^l} x^{2^{k+l}}
/// Solving degree by degree: the x^{2^{n+1}} equation contains p_n with unit
/// coefficient (the k=n, l=1 term) plus known lower p's.
pub fn p_list_extracted(nmax: u32) -> Result<Vec<GradedPoly>, Error> {
    let ring = RingTag::Mod2;
    let mut ps: Vec<GradedPoly> = vec![GradedPoly::var(Variable::V(1), ring)]; // p_0
    for n in 1..=nmax {
        // Build both coefficient sides at exponent 2^{n+1}.  Truncation
        // N = 2^{n+1} + 1 realised implicitly: only that coefficient matters.
        let mut rhs = GradedPoly::zero(ring); // B-side coefficient
        for k in 1..=n {
            let l = n + 1 - k;
            let c = GradedPoly::var_pow(Variable::V(1), (1 << l) - 1, ring)
                .mul(&GradedPoly::var_pow(Variable::V(k), 1 << l, ring))?;
            rhs = rhs.add(&c)?;
        }
        // k = n+1, l = 0 term of B: v1^0 v_{n+1}.
        rhs = rhs.add(&GradedPoly::var(Variable::V(n + 1), ring))?;
        // Known part of the A-side coefficient: v1^{2^{n+1}-1} plus the
        // k < n contributions (l = n+1-k >= 2).
        let mut known = GradedPoly::var_pow(Variable::V(1), (1 << (n + 1)) - 1, ring);
        for k in 1..n {
            let l = n + 1 - k;
            let factor = GradedPoly::var(Variable::V(1), ring)
                .mul(&GradedPoly::var(Variable::V(k), ring))?
                .pow((1 << l) - 2);
            known = known.add(&factor.mul(&ps[k as usize])?)?;
        }
        // A = B at x^{2^{n+1}}: p_n + known = rhs, i.e. p_n = rhs + known
        // over F_2.
        ps.push(rhs.add(&known)?);
    }
    Ok(ps)
}

pub fn p_n_extracted(n: u32) -> Result<GradedPoly, Error> {
    Ok(p_list_extracted(n)?.pop().unwrap())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    ClosedForm,
    CoefficientExtraction,
    Perturbed,
}

/// Table of Ptilde values for the polynomial generators: Qbar(g) = [g, table(g)].
#[derive(Clone, Debug)]
pub struct QbarTable {
    entries: BTreeMap<Variable, (GradedPoly, Provenance)>,
}

impl QbarTable {
    /// BP table: V(n) -> p_n from the closed form, 1 <= n <= nmax.
    pub fn bp(nmax: u32) -> Result<Arc<Self>, Error> {
        let mut entries = BTreeMap::new();
        for n in 1..=nmax {
            entries.insert(Variable::V(n), (p_n_closed(n)?, Provenance::ClosedForm));
        }
        Ok(Arc::new(QbarTable { entries }))
    }

    /// BP table built from the coefficient-extraction oracle instead.
    pub fn bp_extracted(nmax: u32) -> Result<Arc<Self>, Error> {
        let ps = p_list_extracted(nmax)?;
        let mut entries = BTreeMap::new();
        for n in 1..=nmax {
            entries.insert(
                Variable::V(n),
                (ps[n as usize].clone(), Provenance::CoefficientExtraction),
            );
        }
        Ok(Arc::new(QbarTable { entries }))
    }

    /// kU table: Qbar(u) = [u, u^3].
    pub fn ku() -> Arc<Self> {
        let mut entries = BTreeMap::new();
        entries.insert(
            Variable::U,
            (
                GradedPoly::var_pow(Variable::U, 3, RingTag::Mod2),
                Provenance::ClosedForm,
            ),
        );
        Arc::new(QbarTable { entries })
    }

    /// Copy with one entry replaced, for negative-control perturbation tests.
    pub fn perturbed(&self, v: Variable, ptilde: GradedPoly) -> Arc<Self> {
        let mut entries = self.entries.clone();
        entries.insert(v, (ptilde, Provenance::Perturbed));
        Arc::new(QbarTable {
            entries,
        })
    }

    pub fn get(&self, v: Variable) -> Result<&GradedPoly, Error> {
        match v {
            // Qbar(omega) = [omega, 0]: roots of unity square to a
            // permutation of themselves and carry no correction term.
            Variable::Omega(_) => Ok(&ZERO_POLY),
            _ => self
                .entries
                .get(&v)
                .map(|(p, _)| p)
                .ok_or_else(|| Error::MissingTableEntry(v.to_string())),
        }
    }

    pub fn provenance(&self, v: Variable) -> Option<Provenance> {
        self.entries.get(&v).map(|&(_, pr)| pr)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Variable, &GradedPoly)> {
        self.entries.iter().map(|(v, (p, _))| (v, p))
    }
}

static ZERO_POLY: std::sync::LazyLock<GradedPoly> =
    std::sync::LazyLock::new(|| GradedPoly::zero(RingTag::Mod2));

/// Qbar of a rational scalar n/d with d odd:
/// Qbar(n) = [n, C(n,2) t] and Qbar(d) = [1, C(d,2) t] is its own inverse,
/// so Qbar(n/d) = [n mod 2, (C(n,2) + n C(d,2)) t mod 2].
pub fn qbar_scalar(ctx: &Arc<TContext>, c: &Coeff) -> Result<TElem, Error> {
    let r = c
        .as_rational()
        .ok_or_else(|| Error::InvalidArgument("qbar_scalar expects a rational".into()))?;
    if !r.denom().is_odd() {
        return Err(Error::NotTwoIntegral {
            monomial: c.to_string(),
        });
    }
    let n_mod2 = (r.numer().mod_floor(&BigInt::from(2)) == BigInt::from(1)) as u8;
    let bit = (choose2_mod2(r.numer()) + n_mod2 * choose2_mod2(r.denom())) % 2;
    let a = GradedPoly::constant(Coeff::F2(n_mod2));
    let b = if bit == 1 {
        ctx.twist().clone()
    } else {
        GradedPoly::zero(RingTag::Mod2)
    };
    TElem::new(
        ctx.clone(),
        TruncSeries::from_poly(a, ctx.arity(), ctx.trunc()),
        TruncSeries::from_poly(b, ctx.arity(), ctx.trunc()),
    )
}

/// Qbar extended over a 2-integral rational polynomial: each monomial
/// c * prod v^e maps to Qbar(c) * prod Qbar(v)^e, terms combined with the
/// twisted addition.
pub fn qbar_eval(
    ctx: &Arc<TContext>,
    table: &QbarTable,
    a: &GradedPoly,
) -> Result<TElem, Error> {
    if a.ring() != RingTag::Rational {
        return Err(Error::RingMismatch(RingTag::Rational, a.ring()));
    }
    let mut acc = TElem::zero(ctx.clone());
    for (m, c) in a.terms() {
        let mut term = qbar_scalar(ctx, c)?;
        for &(v, e) in m.exponents() {
            let gen = TElem::new(
                ctx.clone(),
                TruncSeries::from_poly(GradedPoly::var(v, RingTag::Mod2), ctx.arity(), ctx.trunc()),
                TruncSeries::from_poly(table.get(v)?.clone(), ctx.arity(), ctx.trunc()),
            )?;
            term = term.mul(&gen.pow(e)?)?;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Ptilde(a): the b-component of Qbar(a), as a polynomial.
pub fn ptilde(table: &QbarTable, a: &GradedPoly) -> Result<GradedPoly, Error> {
    let ctx = TContext::new(
        table
            .entries()
            .next()
            .map(|(v, _)| match v {
                Variable::U => GradedPoly::var(Variable::U, RingTag::Mod2),
                _ => GradedPoly::var(Variable::V(1), RingTag::Mod2),
            })
            .unwrap_or_else(|| GradedPoly::var(Variable::V(1), RingTag::Mod2)),
        1,
        1,
    )?;
    let lifted = if a.ring() == RingTag::Rational {
        a.clone()
    } else {
        a.lift_to_rational()
    };
    let res = qbar_eval(&ctx, table, &lifted)?;
    Ok(res.b().constant_term())
}

/// Closure adapter for the qf_sum machinery.
pub fn qbar_fn(
    ctx: Arc<TContext>,
    table: Arc<QbarTable>,
) -> impl Fn(&GradedPoly) -> Result<TElem, Error> {
    move |a| qbar_eval(&ctx, &table, a)
}

/// Outcome of one verification: `None` on success, or a human-readable
/// witness of the first failure.
pub type VerifyOutcome = Option<String>;

fn diff_witness(label: &str, got: &TElem, want: &TElem) -> VerifyOutcome {
    if got == want {
        return None;
    }
    let da = got.a().sub(want.a()).ok().and_then(|d| d.first_term());
    let db = got.b().sub(want.b()).ok().and_then(|d| d.first_term());
    let t = da.or(db);
    Some(match t {
        Some((idx, p)) => format!(
            "{label}: first differing coefficient at x^{} y^{}: {p}",
            idx[0], idx[1]
        ),
        None => format!("{label}: elements differ"),
    })
}

/// Shared setup for BP series checks: rational law at trunc+1 (so that the
/// partial F2 is exact at trunc), mod-2 law, F2, and context.
struct BpSetup {
    fgl: Arc<Fgl>,
    fm2: Fgl,
    f2: TruncSeries,
}

fn bp_setup(trunc: u32) -> Result<BpSetup, Error> {
    let fgl = build_bp_fgl_cached(trunc + 1)?;
    let fm2 = fgl.reduce_mod2()?;
    let f2 = fm2.f_partial();
    Ok(BpSetup { fgl, fm2, f2 })
}

/// IPO identity over BP: Z(x) +_{QF} Z(y) = Z(x +_F y) at total degree trunc.
pub fn verify_ipo_bp(table: &Arc<QbarTable>, trunc: u32) -> Result<VerifyOutcome, Error> {
    let setup = bp_setup(trunc)?;
    let ctx = TContext::bp(2, trunc);
    let qbar = qbar_fn(ctx.clone(), table.clone());
    let x = TruncSeries::var_x(RingTag::Mod2, 2, trunc);
    let y = TruncSeries::var_y(RingTag::Mod2, 2, trunc);
    let zx = z_elem(&ctx, &setup.f2, &x)?;
    let zy = z_elem(&ctx, &setup.f2, &y)?;
    let lhs = qf_add(&qbar, &setup.fgl, &zx, &zy)?;
    let x_full = TruncSeries::var_x(RingTag::Mod2, 2, trunc + 1);
    let y_full = TruncSeries::var_y(RingTag::Mod2, 2, trunc + 1);
    let sum = setup.fm2.formal_sum(&x_full, &y_full)?.truncate(trunc);
    let rhs = z_elem(&ctx, &setup.f2, &sum)?;
    Ok(diff_witness("ipo-bp", &lhs, &rhs))
}

/// IPO identity over kU, including the four intermediate identities of the
/// multiplicative-law computation.
pub fn verify_ipo_ku(table: &Arc<QbarTable>, trunc: u32) -> Result<VerifyOutcome, Error> {
    let fgl = build_mult_fgl(trunc + 1)?;
    let fm2 = fgl.reduce_mod2()?;
    let f2 = fm2.f_partial();
    let ctx = TContext::ku(2, trunc);
    let qbar = qbar_fn(ctx.clone(), table.clone());

    let ring = RingTag::Mod2;
    let x = TruncSeries::var_x(ring, 2, trunc);
    let y = TruncSeries::var_y(ring, 2, trunc);
    let u = GradedPoly::var(Variable::U, ring);
    let zx = z_elem(&ctx, &f2, &x)?;
    let zy = z_elem(&ctx, &f2, &y)?;

    // Z(x) = [x, x + u x^2].
    {
        let want_b = x.add(&x.mul(&x)?.scale(&u)?)?;
        let want = TElem::new(ctx.clone(), x.clone(), want_b)?;
        if let Some(w) = diff_witness("ipo-ku Z(x)", &zx, &want) {
            return Ok(Some(w));
        }
    }
    let xy = x.mul(&y)?;
    let x_plus_y = x.add(&y)?;
    // Z(x) + Z(y) = [x+y, x+y + u(x^2+xy+y^2)].
    let plain_sum = zx.add(&zy)?;
    {
        let quad = x.mul(&x)?.add(&xy)?.add(&y.mul(&y)?)?;
        let want = TElem::new(ctx.clone(), x_plus_y.clone(), x_plus_y.add(&quad.scale(&u)?)?)?;
        if let Some(w) = diff_witness("ipo-ku Z(x)+Z(y)", &plain_sum, &want) {
            return Ok(Some(w));
        }
    }
    // Z(x) Z(y) = [xy, xy(x+y)].
    let prod = zx.mul(&zy)?;
    {
        let want = TElem::new(ctx.clone(), xy.clone(), xy.mul(&x_plus_y)?)?;
        if let Some(w) = diff_witness("ipo-ku Z(x)Z(y)", &prod, &want) {
            return Ok(Some(w));
        }
    }
    // U Z(x) Z(y) = [uxy, u^2 xy(x+y) + u^3 x^2 y^2] with U = Qbar(u).
    let u_elem = qbar(&GradedPoly::var(Variable::U, RingTag::Rational))?;
    let u_prod = u_elem.mul(&prod)?;
    {
        let b = xy
            .mul(&x_plus_y)?
            .scale(&u.pow(2))?
            .add(&xy.mul(&xy)?.scale(&u.pow(3))?)?;
        let want = TElem::new(ctx.clone(), xy.scale(&u)?, b)?;
        if let Some(w) = diff_witness("ipo-ku U*Z(x)Z(y)", &u_prod, &want) {
            return Ok(Some(w));
        }
    }
    // Z(x +_F y) = [x+y+uxy, x+y+u(x^2+xy+y^2)+u^3 x^2 y^2].
    let x_full = TruncSeries::var_x(ring, 2, trunc + 1);
    let y_full = TruncSeries::var_y(ring, 2, trunc + 1);
    let sum = fm2.formal_sum(&x_full, &y_full)?.truncate(trunc);
    let rhs = z_elem(&ctx, &f2, &sum)?;
    {
        let quad = x.mul(&x)?.add(&xy)?.add(&y.mul(&y)?)?;
        let b = x_plus_y
            .add(&quad.scale(&u)?)?
            .add(&xy.mul(&xy)?.scale(&u.pow(3))?)?;
        let want = TElem::new(ctx.clone(), sum.clone(), b)?;
        if let Some(w) = diff_witness("ipo-ku Z(x+_F y)", &rhs, &want) {
            return Ok(Some(w));
        }
    }
    // The identity itself: lhs = plain sum + U Z(x)Z(y) must equal Z(x +_F y),
    // and the generic qf_add route must agree.
    let lhs = plain_sum.add(&u_prod)?;
    if let Some(w) = diff_witness("ipo-ku identity", &lhs, &rhs) {
        return Ok(Some(w));
    }
    let lhs_qf = qf_add(&qbar, &fgl, &zx, &zy)?;
    Ok(diff_witness("ipo-ku qf_add route", &lhs_qf, &rhs))
}

/// The typicality sum sum^{QF}_{i=i0}^{p-1} Omega^i X over a given law,
/// with Omega = [omega, 0] and X = [x, 0].  `i0 = 0` gives the full sum;
/// higher `i0` truncates the list (used as a sanity control: a partial sum
/// must not vanish).
pub fn qf_typicality_sum(
    fgl: &Fgl,
    table: &Arc<QbarTable>,
    ctx: &Arc<TContext>,
    p: u32,
    i0: u32,
) -> Result<TElem, Error> {
    let trunc = ctx.trunc();
    let qbar = qbar_fn(ctx.clone(), table.clone());
    let terms: Vec<TElem> = (i0..p)
        .map(|i| {
            let a = TruncSeries::var_x(RingTag::Mod2, 1, trunc)
                .scale(&GradedPoly::var_pow(Variable::Omega(p), i, RingTag::Mod2))?;
            TElem::new(
                ctx.clone(),
                a,
                TruncSeries::zero(RingTag::Mod2, 1, trunc),
            )
        })
        .collect::<Result<_, _>>()?;
    qf_sum(&qbar, fgl, &terms)
}

/// 2-typicality of QF over BP at an odd prime p:
/// sum^{QF}_{i=0}^{p-1} Omega^i X = 0.
pub fn verify_qf_2_typical(
    table: &Arc<QbarTable>,
    p: u32,
    trunc: u32,
) -> Result<VerifyOutcome, Error> {
    let setup = bp_setup(trunc)?;
    let ctx = TContext::bp(1, trunc);
    let total = qf_typicality_sum(&setup.fgl, table, &ctx, p, 0)?;
    if total.is_zero() {
        Ok(None)
    } else {
        Ok(diff_witness("qf-2-typical", &total, &TElem::zero(ctx)))
    }
}

/// exp_F(2x) = 2z/v1 mod 4: 2-integrality, the mod-2 intermediate
/// log_F(2x)/2 = x + v1 x^2, and the mod-4 comparison.
pub fn exp2_mod4(trunc: u32) -> Result<VerifyOutcome, Error> {
    let fgl = build_bp_fgl_cached(trunc)?;
    let exp = fgl.exp().unwrap();
    let log = fgl.log().unwrap();
    let x2 = TruncSeries::var_x(RingTag::Rational, 1, trunc).scale_int(2);
    // Intermediate: log_F(2x)/2 mod 2 = x + v1 x^2.
    let half_log_2x = log.compose(&x2)?.scale(&GradedPoly::constant(Coeff::from_ratio(1, 2)));
    let half_log_2x = half_log_2x?;
    if !half_log_2x.is_2_integral() {
        return Ok(Some("exp-f-mod4: log_F(2x)/2 is not 2-integral".into()));
    }
    let mut want = TruncSeries::var_x(RingTag::Mod2, 1, trunc);
    want.set_coeff([2, 0, 0], GradedPoly::var(Variable::V(1), RingTag::Mod2));
    if half_log_2x.reduce_mod(1)? != want {
        return Ok(Some(
            "exp-f-mod4: log_F(2x)/2 mod 2 is not x + v1 x^2".into(),
        ));
    }
    // Main statement.
    let e2x = exp.compose(&x2)?;
    if !e2x.is_2_integral() {
        return Ok(Some("exp-f-mod4: exp_F(2x) is not 2-integral".into()));
    }
    let got = e2x.reduce_mod(2)?;
    // 2z/v1 = 2 * sum_k v1^{2^k - 1} x^{2^k}, as a mod-4 series.
    let mut zv = TruncSeries::zero(RingTag::Mod4, 1, trunc);
    let mut k = 0u32;
    loop {
        let e = 1u64 << k;
        if e >= trunc as u64 {
            break;
        }
        zv.set_coeff(
            [e as u32, 0, 0],
            GradedPoly::var_pow(Variable::V(1), e as u32 - 1, RingTag::Mod4).scale(&Coeff::Z4(2)),
        );
        k += 1;
    }
    if got != zv {
        let w = got
            .sub(&zv)?
            .first_term()
            .map(|(idx, p)| format!("exp-f-mod4: residual at x^{}: {p}", idx[0]))
            .unwrap_or_else(|| "exp-f-mod4: residual".into());
        return Ok(Some(w));
    }
    Ok(None)
}

/// exp_{QF}(2X): pushes the exp_F(2x) coefficients through Qbar and checks
/// both the per-coefficient claim Qbar(c_{2^k}) = [0, v1^{2^{k+1}-1}] and
/// the evaluation at X = Z(x), which must come out to [0, z/v1 + x].
pub fn exp_qf_2x(table: &Arc<QbarTable>, trunc: u32) -> Result<VerifyOutcome, Error> {
    let setup = bp_setup(trunc)?;
    let exp = setup.fgl.exp().unwrap();
    let x2 = TruncSeries::var_x(RingTag::Rational, 1, trunc + 1).scale_int(2);
    let e2x = exp.compose(&x2)?;
    let ctx = TContext::bp(1, trunc);
    // Per-coefficient claim.
    for (idx, c) in e2x.coeffs() {
        let k = idx[0];
        if k as u64 >= trunc as u64 {
            continue;
        }
        let q = qbar_eval(&ctx, table, c)?;
        let want = if k.is_power_of_two() && k >= 2 {
            TElem::from_b_poly(
                ctx.clone(),
                GradedPoly::var_pow(Variable::V(1), 2 * k - 1, RingTag::Mod2),
            )?
        } else if k == 1 {
            // c_1 = 2: Qbar(2) = [0, v1].
            TElem::from_b_poly(ctx.clone(), GradedPoly::var(Variable::V(1), RingTag::Mod2))?
        } else {
            TElem::zero(ctx.clone())
        };
        if let Some(w) = diff_witness(&format!("exp-qf coefficient x^{k}"), &q, &want) {
            return Ok(Some(w));
        }
    }
    // Evaluation at X = Z(x).
    let x = TruncSeries::var_x(RingTag::Mod2, 1, trunc);
    let zx = z_elem(&ctx, &setup.f2, &x)?;
    let mut total = TElem::zero(ctx.clone());
    for (idx, c) in e2x.coeffs() {
        let k = idx[0];
        if k as u64 >= trunc as u64 {
            continue;
        }
        let q = qbar_eval(&ctx, table, c)?;
        total = total.add(&q.mul(&zx.pow(k)?)?)?;
    }
    // z/v1 + x = sum_{j >= 1} v1^{2^j - 1} x^{2^j}.
    let mut want_b = TruncSeries::zero(RingTag::Mod2, 1, trunc);
    let mut j = 1u32;
    loop {
        let e = 1u64 << j;
        if e >= trunc as u64 {
            break;
        }
        want_b.set_coeff(
            [e as u32, 0, 0],
            GradedPoly::var_pow(Variable::V(1), e as u32 - 1, RingTag::Mod2),
        );
        j += 1;
    }
    let want = TElem::new(
        ctx.clone(),
        TruncSeries::zero(RingTag::Mod2, 1, trunc),
        want_b,
    )?;
    Ok(diff_witness("exp-qf at Z(x)", &total, &want))
}

/// The three Z(x)-decomposition identities:
///   (i)  [0,x] +_{QF} [0,y] = [0, x+y]
///   (ii) Z(x) = [x,0] +_{QF} [0, z/v1]
///   (iii) [x,y] = [x,0] +_{QF} [0, sum_k (v1 x)^{2(2^k-1)} y],
/// where the coefficient series in (iii) equals 1/(1+z)^2.
pub fn verify_zxqf(table: &Arc<QbarTable>, trunc: u32) -> Result<VerifyOutcome, Error> {
    let setup = bp_setup(trunc)?;
    let ring = RingTag::Mod2;

    // (i) in two formal variables.
    {
        let ctx = TContext::bp(2, trunc);
        let qbar = qbar_fn(ctx.clone(), table.clone());
        let bx = TElem::new(
            ctx.clone(),
            TruncSeries::zero(ring, 2, trunc),
            TruncSeries::var_x(ring, 2, trunc),
        )?;
        let by = TElem::new(
            ctx.clone(),
            TruncSeries::zero(ring, 2, trunc),
            TruncSeries::var_y(ring, 2, trunc),
        )?;
        let got = qf_add(&qbar, &setup.fgl, &bx, &by)?;
        let want = TElem::new(
            ctx.clone(),
            TruncSeries::zero(ring, 2, trunc),
            TruncSeries::var_x(ring, 2, trunc).add(&TruncSeries::var_y(ring, 2, trunc))?,
        )?;
        if let Some(w) = diff_witness("zxqf [0,x]+[0,y]", &got, &want) {
            return Ok(Some(w));
        }
    }

    let ctx = TContext::bp(1, trunc);
    let qbar = qbar_fn(ctx.clone(), table.clone());
    let x = TruncSeries::var_x(ring, 1, trunc);
    let z = z_series(trunc);

    // (ii): Z(x) = [x,0] +_{QF} [0, z/v1].
    {
        let zx = z_elem(&ctx, &setup.f2, &x)?;
        let x0 = TElem::new(ctx.clone(), x.clone(), TruncSeries::zero(ring, 1, trunc))?;
        // z/v1 = sum_{k>=0} v1^{2^k-1} x^{2^k}.
        let mut zv = TruncSeries::zero(ring, 1, trunc);
        let mut k = 0u32;
        loop {
            let e = 1u64 << k;
            if e >= trunc as u64 {
                break;
            }
            zv.set_coeff(
                [e as u32, 0, 0],
                GradedPoly::var_pow(Variable::V(1), e as u32 - 1, ring),
            );
            k += 1;
        }
        let bzv = TElem::new(ctx.clone(), TruncSeries::zero(ring, 1, trunc), zv)?;
        let got = qf_add(&qbar, &setup.fgl, &x0, &bzv)?;
        if let Some(w) = diff_witness("zxqf Z(x) decomposition", &got, &zx) {
            return Ok(Some(w));
        }
    }

    // (iii) with y a second formal variable: w-coefficient series equals
    // 1/(1+z)^2, checked first, then the reconstruction identity.
    {
        let mut coeffs = TruncSeries::zero(ring, 1, trunc);
        let mut k = 0u32;
        loop {
            let e = 2 * ((1u64 << k) - 1);
            if e >= trunc as u64 {
                break;
            }
            coeffs.set_coeff(
                [e as u32, 0, 0],
                GradedPoly::var_pow(Variable::V(1), e as u32, ring),
            );
            k += 1;
        }
        let one = TruncSeries::one(ring, 1, trunc);
        let one_plus_z_sq = one.add(&z)?.mul(&one.add(&z)?)?;
        if coeffs.mul(&one_plus_z_sq)? != one {
            return Ok(Some(
                "zxqf: sum_k (v1 x)^{2(2^k-1)} is not 1/(1+z)^2".into(),
            ));
        }
        let ctx2 = TContext::bp(2, trunc);
        let qbar2 = qbar_fn(ctx2.clone(), table.clone());
        let x2v = TruncSeries::var_x(ring, 2, trunc);
        let y2v = TruncSeries::var_y(ring, 2, trunc);
        let target = TElem::new(ctx2.clone(), x2v.clone(), y2v.clone())?;
        let x0 = TElem::new(ctx2.clone(), x2v.clone(), TruncSeries::zero(ring, 2, trunc))?;
        let w_series = coeffs.compose(&x2v)?.mul(&y2v)?;
        let bw = TElem::new(ctx2.clone(), TruncSeries::zero(ring, 2, trunc), w_series)?;
        let got = qf_add(&qbar2, &setup.fgl, &x0, &bw)?;
        if let Some(w) = diff_witness("zxqf [x,y] reconstruction", &got, &target) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn f2(s: &str) -> GradedPoly {
        parse_poly(s, RingTag::Mod2, 3).unwrap()
    }

    #[test]
    fn u_small_values() {
        assert_eq!(u_n(1).unwrap(), f2("v2"));
        assert_eq!(u_n(2).unwrap(), f2("v1^4*v2 + v3"));
    }

    #[test]
    fn u_n_mod_v1_squared_is_v_next() {
        for n in 1..=6 {
            let u = u_n(n).unwrap();
            // Drop every monomial divisible by v1^2.
            let mut kept = GradedPoly::zero(RingTag::Mod2);
            for (m, c) in u.terms() {
                if m.exponent_of(Variable::V(1)) < 2 {
                    kept = kept
                        .add(&GradedPoly::monomial(m.clone(), c.clone()))
                        .unwrap();
                }
            }
            assert_eq!(
                kept,
                GradedPoly::var(Variable::V(n + 1), RingTag::Mod2),
                "n={n}"
            );
        }
    }

    #[test]
    fn p_closed_small() {
        assert_eq!(p_n_closed(0).unwrap(), f2("v1"));
        assert_eq!(p_n_closed(1).unwrap(), f2("v2"));
        assert_eq!(p_n_closed(2).unwrap(), f2("v1^4*v2 + v1*v2^2 + v3"));
        assert_eq!(
            p_n_closed(3).unwrap(),
            f2("v1^12*v2 + v1^6*v2^3 + v1^2*v2^2*v3 + v1*v3^2 + v4")
        );
    }

    #[test]
    fn p_extracted_matches_closed() {
        let ps = p_list_extracted(4).unwrap();
        for (n, p) in ps.iter().enumerate() {
            assert_eq!(p, &p_n_closed(n as u32).unwrap(), "n={n}");
        }
    }

    #[test]
    fn p_n_grade() {
        for n in 0..=5u32 {
            let p = p_n_closed(n).unwrap();
            assert_eq!(p.homogeneous_degree(), Some(2 * ((1i64 << (n + 1)) - 1)));
        }
    }

    #[test]
    fn qbar_scalar_values() {
        let ctx = TContext::bp(1, 2);
        // Qbar(1) = [1, 0].
        let one = qbar_scalar(&ctx, &Coeff::from_int(1, RingTag::Rational)).unwrap();
        assert_eq!(one, TElem::one(ctx.clone()));
        // Qbar(2) = [0, v1].
        let two = qbar_scalar(&ctx, &Coeff::from_int(2, RingTag::Rational)).unwrap();
        assert!(two.a().is_zero());
        assert_eq!(two.b().constant_term(), f2("v1"));
        // Qbar(1/3) = Qbar(1) * Qbar(3) = [1, v1].
        let third = qbar_scalar(&ctx, &Coeff::from_ratio(1, 3)).unwrap();
        assert_eq!(third.a().constant_term(), GradedPoly::one(RingTag::Mod2));
        assert_eq!(third.b().constant_term(), f2("v1"));
        // Non-2-integral rejected.
        assert!(qbar_scalar(&ctx, &Coeff::from_ratio(1, 2)).is_err());
    }

    #[test]
    fn qbar_eval_examples() {
        let table = QbarTable::bp(4).unwrap();
        // ptilde(v3) = p_3.
        let v3 = GradedPoly::var(Variable::V(3), RingTag::Rational);
        assert_eq!(ptilde(&table, &v3).unwrap(), p_n_closed(3).unwrap());
        // ptilde(1) = 0; ptilde(2) = v1.
        assert!(ptilde(&table, &GradedPoly::one(RingTag::Rational))
            .unwrap()
            .is_zero());
        assert_eq!(
            ptilde(&table, &GradedPoly::from_int(2, RingTag::Rational)).unwrap(),
            f2("v1")
        );
        // Qbar(u) over kU: ptilde(u) = u^3.
        let ku = QbarTable::ku();
        assert_eq!(
            ptilde(&ku, &GradedPoly::var(Variable::U, RingTag::Rational)).unwrap(),
            f2("u^3")
        );
    }

    #[test]
    fn qbar_is_a_ring_map_spot() {
        // Qbar(v1 * v2) = Qbar(v1) * Qbar(v2) and additivity on v1 + v2.
        let table = QbarTable::bp(3).unwrap();
        let ctx = TContext::bp(1, 2);
        let a = GradedPoly::var(Variable::V(1), RingTag::Rational);
        let b = GradedPoly::var(Variable::V(2), RingTag::Rational);
        let qa = qbar_eval(&ctx, &table, &a).unwrap();
        let qb = qbar_eval(&ctx, &table, &b).unwrap();
        let qab = qbar_eval(&ctx, &table, &a.mul(&b).unwrap()).unwrap();
        assert_eq!(qab, qa.mul(&qb).unwrap());
        let qsum = qbar_eval(&ctx, &table, &a.add(&b).unwrap()).unwrap();
        assert_eq!(qsum, qa.add(&qb).unwrap());
    }

    #[test]
    fn ipo_ku_holds_and_perturbation_fails() {
        let table = QbarTable::ku();
        assert_eq!(verify_ipo_ku(&table, 8).unwrap(), None);
        let bad = table.perturbed(Variable::U, GradedPoly::zero(RingTag::Mod2));
        let res = verify_ipo_ku(&bad, 8).unwrap();
        assert!(res.is_some(), "wrong Qbar(u) must fail");
    }

    #[test]
    fn ipo_bp_small() {
        let table = QbarTable::bp(4).unwrap();
        assert_eq!(verify_ipo_bp(&table, 8).unwrap(), None);
    }

    #[test]
    fn qf_2_typical_small() {
        let table = QbarTable::bp(3).unwrap();
        assert_eq!(verify_qf_2_typical(&table, 3, 5).unwrap(), None);
        // Sanity control: a partial sum (i >= 1 only) must not vanish.
        let setup_ctx = TContext::bp(1, 5);
        let fgl = crate::fgl::build_bp_fgl_cached(6).unwrap();
        let partial = qf_typicality_sum(&fgl, &table, &setup_ctx, 3, 1).unwrap();
        assert!(!partial.is_zero());
        // Negative control: the multiplicative law is not 3-typical, and the
        // twisted sum detects it (the classical residual is u^2 x^3 + ...).
        let ku = QbarTable::ku();
        let ku_ctx = TContext::ku(1, 5);
        let mult = build_mult_fgl(6).unwrap();
        let bad = qf_typicality_sum(&mult, &ku, &ku_ctx, 3, 0).unwrap();
        assert!(!bad.is_zero());
    }

    #[test]
    fn exp2_mod4_small() {
        assert_eq!(exp2_mod4(9).unwrap(), None);
    }

    #[test]
    fn exp_qf_small() {
        let table = QbarTable::bp(3).unwrap();
        assert_eq!(exp_qf_2x(&table, 8).unwrap(), None);
    }

    #[test]
    fn zxqf_small() {
        let table = QbarTable::bp(3).unwrap();
        assert_eq!(verify_zxqf(&table, 8).unwrap(), None);
    }
}

