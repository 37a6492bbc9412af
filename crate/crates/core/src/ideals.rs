//! Triangular ideals in F_2[v1, v2, ...]: substitution normal forms, the
//! recursive construction of the ideal J, combined-ideal kernel comparisons
//! over GF(2), the quadric-class obstruction checks, and realisability
//! reports for quotient rings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coeff::RingTag;
use crate::fgl::{build_bp_fgl_cached, w_series};
use crate::poly::{GradedPoly, Monomial, Variable};
use crate::powerop::{ptilde, QbarTable, VerifyOutcome};
use crate::Error;

/// An ideal with generators g_k = v_k + r_k, each monic-linear in a distinct
/// leading variable.  Ideal membership mod 2 reduces to iterated
/// substitution v_k -> r_k, which terminates when the dependency relation
/// between leading variables is acyclic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularIdeal {
    /// leading variable -> tail r_k (generator is v_k + r_k over F_2).
    tails: BTreeMap<Variable, GradedPoly>,
}

impl TriangularIdeal {
    pub fn new(generators: &[GradedPoly]) -> Result<Self, Error> {
        let mut tails = BTreeMap::new();
        for g in generators {
            if g.ring() != RingTag::Mod2 {
                return Err(Error::RingMismatch(RingTag::Mod2, g.ring()));
            }
            let d = g.homogeneous_degree().ok_or_else(|| {
                Error::IllFormedIdeal(format!("generator {g} is not homogeneous"))
            })?;
            // The leading variable is the one appearing as a bare linear
            // monomial of the full degree; variable degrees are distinct, so
            // at most one candidate exists.
            let lead = g
                .variables()
                .into_iter()
                .find(|v| {
                    v.degree() == d && g.coeff_of(&Monomial::var(*v)).is_one()
                })
                .ok_or_else(|| {
                    Error::IllFormedIdeal(format!(
                        "generator {g} has no monic linear leading term"
                    ))
                })?;
            let tail = g.add(&GradedPoly::var(lead, RingTag::Mod2))?;
            if tails.insert(lead, tail).is_some() {
                return Err(Error::IllFormedIdeal(format!(
                    "two generators share the leading variable {lead}"
                )));
            }
        }
        let ideal = TriangularIdeal { tails };
        ideal.check_acyclic()?;
        Ok(ideal)
    }

    /// The ideal (v_k : k in indices).
    pub fn vanishing_vars(indices: impl IntoIterator<Item = u32>) -> Self {
        let tails = indices
            .into_iter()
            .map(|k| (Variable::V(k), GradedPoly::zero(RingTag::Mod2)))
            .collect();
        TriangularIdeal { tails }
    }

    pub fn leading_vars(&self) -> impl Iterator<Item = &Variable> {
        self.tails.keys()
    }

    pub fn generators(&self) -> Vec<GradedPoly> {
        self.tails
            .iter()
            .map(|(v, r)| {
                GradedPoly::var(*v, RingTag::Mod2).add(r).unwrap()
            })
            .collect()
    }

    /// Union of two triangular ideals (generator lists concatenated).
    pub fn union(&self, other: &TriangularIdeal) -> Result<TriangularIdeal, Error> {
        let mut gens = self.generators();
        gens.extend(other.generators());
        TriangularIdeal::new(&gens)
    }

    fn check_acyclic(&self) -> Result<(), Error> {
        // Substituting all tails at once, every leading variable must
        // disappear from every tail within #generators rounds.
        let bindings: BTreeMap<Variable, GradedPoly> = self
            .tails
            .iter()
            .map(|(v, r)| (*v, r.clone()))
            .collect();
        for (lead, tail) in &self.tails {
            let mut cur = tail.clone();
            for _ in 0..=self.tails.len() {
                if !cur
                    .variables()
                    .iter()
                    .any(|v| self.tails.contains_key(v))
                {
                    break;
                }
                cur = cur.substitute(&bindings)?;
            }
            if cur.variables().iter().any(|v| self.tails.contains_key(v)) {
                return Err(Error::IllFormedIdeal(format!(
                    "cyclic dependency through the generator for {lead}"
                )));
            }
        }
        Ok(())
    }

    /// Substitution normal form: nf(a) = 0 iff a lies in the ideal mod 2.
    pub fn nf(&self, a: &GradedPoly) -> Result<GradedPoly, Error> {
        if a.ring() != RingTag::Mod2 {
            return Err(Error::RingMismatch(RingTag::Mod2, a.ring()));
        }
        let bindings: BTreeMap<Variable, GradedPoly> = self
            .tails
            .iter()
            .map(|(v, r)| (*v, r.clone()))
            .collect();
        let mut cur = a.clone();
        for _ in 0..=self.tails.len() {
            if !cur.variables().iter().any(|v| self.tails.contains_key(v)) {
                return Ok(cur);
            }
            cur = cur.substitute(&bindings)?;
        }
        Err(Error::IllFormedIdeal(
            "substitution did not reach a fixpoint".into(),
        ))
    }

    pub fn contains(&self, a: &GradedPoly) -> Result<bool, Error> {
        Ok(self.nf(a)?.is_zero())
    }
}

/// The recursive construction of the ideal J: starting from
/// x_{n+1} = v_{n+1}, each next generator is the normal form of
/// Ptilde(x_k) modulo the ideal built so far.  Verified postconditions for
/// every produced generator x_k:
///   (a) x_k - v_k has all monomials divisible by v1^2 and supported on
///       v_1..v_n;
///   (b) Ptilde(x_k) reduces to zero modulo (x_{n+1},...,x_{k+1}).
pub fn construct_j(n: u32, kmax: u32) -> Result<TriangularIdeal, Error> {
    if n < 1 {
        return Err(Error::InvalidArgument("construct_j needs n >= 1".into()));
    }
    if kmax < n + 1 {
        return Err(Error::InvalidArgument(
            "construct_j needs kmax >= n + 1".into(),
        ));
    }
    let table = QbarTable::bp(kmax + 1)?;
    let mut gens: Vec<GradedPoly> = vec![GradedPoly::var(Variable::V(n + 1), RingTag::Mod2)];
    for k in (n + 1)..kmax {
        let ideal = TriangularIdeal::new(&gens)?;
        let pt = ptilde(&table, &gens.last().unwrap().lift_to_rational())?;
        let next = ideal.nf(&pt)?;
        // Structural checks on the new generator x_{k+1}.
        let lead = Variable::V(k + 1);
        if next.homogeneous_degree() != Some(lead.degree()) {
            return Err(Error::Internal(format!(
                "x_{} is not homogeneous of degree |v_{}|",
                k + 1,
                k + 1
            )));
        }
        let rest = next.add(&GradedPoly::var(lead, RingTag::Mod2))?;
        for (m, _) in rest.terms() {
            let ok = m.exponent_of(Variable::V(1)) >= 2
                && m.exponents()
                    .iter()
                    .all(|&(v, _)| matches!(v, Variable::V(i) if i <= n));
            if !ok {
                return Err(Error::Internal(format!(
                    "x_{} - v_{} has a monomial {m} outside v1^2 * F2[v1..v{n}]",
                    k + 1,
                    k + 1
                )));
            }
        }
        gens.push(next);
    }
    let ideal = TriangularIdeal::new(&gens)?;
    // Postcondition (b): Ptilde of every generator except the last lies in
    // the ideal; the last needs the next generator, which is out of range.
    for g in gens.iter().take(gens.len() - 1) {
        let pt = ptilde(&table, &g.lift_to_rational())?;
        if !ideal.contains(&pt)? {
            return Err(Error::Internal(format!(
                "Ptilde of the generator {g} does not reduce to zero"
            )));
        }
    }
    Ok(ideal)
}

/// All monomials of the given (homological) degree in the given variables.
pub fn monomials_of_degree(vars: &[Variable], degree: i64) -> Vec<Monomial> {
    fn rec(
        vars: &[Variable],
        degree: i64,
        acc: &mut Vec<(Variable, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if degree == 0 {
            out.push(Monomial::from_pairs(acc.clone()));
            return;
        }
        let Some((&v, rest)) = vars.split_first() else {
            return;
        };
        let d = v.degree();
        let max_e = (degree / d) as u32;
        for e in (0..=max_e).rev() {
            if e > 0 {
                acc.push((v, e));
            }
            rec(rest, degree - d * e as i64, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    if degree < 0 || degree % 2 != 0 {
        return out;
    }
    let mut acc = Vec::new();
    rec(vars, degree, &mut acc, &mut out);
    out
}

/// GF(2) matrix over a shared monomial column index; rows are polynomials.
struct F2Matrix {
    cols: BTreeMap<Monomial, usize>,
    rows: Vec<Vec<u64>>,
}

impl F2Matrix {
    fn new() -> Self {
        F2Matrix {
            cols: BTreeMap::new(),
            rows: Vec::new(),
        }
    }

    fn col(&mut self, m: &Monomial) -> usize {
        let next = self.cols.len();
        *self.cols.entry(m.clone()).or_insert(next)
    }

    fn add_row(&mut self, p: &GradedPoly) {
        let idxs: Vec<usize> = p.terms().map(|(m, _)| self.col(m)).collect();
        let words = self.cols.len().div_ceil(64).max(1);
        let mut row = vec![0u64; words];
        for i in idxs {
            row[i / 64] |= 1 << (i % 64);
        }
        self.rows.push(row);
    }

    fn rank(&self) -> usize {
        let words = self.cols.len().div_ceil(64).max(1);
        let mut rows: Vec<Vec<u64>> = self
            .rows
            .iter()
            .map(|r| {
                let mut x = r.clone();
                x.resize(words, 0);
                x
            })
            .collect();
        let mut rank = 0;
        for bit in 0..self.cols.len() {
            let (w, b) = (bit / 64, 1u64 << (bit % 64));
            let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][w] & b != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row[w] & b != 0 {
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Kernel-equality check for two ideals as linear maps on the degree-d
/// monomial space: ker(nf_a) = ker(nf_b) iff
/// rank(A) = rank(B) = rank(A stacked with B), where the rows of A are
/// (m, nf_a(m)) pairs (graph matrices), sharing one column index.
fn kernels_equal_in_degree(
    a: &TriangularIdeal,
    b: &TriangularIdeal,
    vars: &[Variable],
    degree: i64,
) -> Result<bool, Error> {
    let basis = monomials_of_degree(vars, degree);
    if basis.is_empty() {
        return Ok(true);
    }
    // Graph trick: the row for monomial m under map f is nf_f(m) alone;
    // ker equality needs comparing the maps themselves, so rows are the
    // images and kernels are compared via rank of stacked image matrices
    // against each individually... Instead compare kernels directly:
    // ker(f) = ker(g) iff rank(f) = rank(g) = rank(f (+) g), where f (+) g
    // maps m to (nf_a(m), nf_b(m)) into the direct sum of column spaces.
    let mut ma = F2Matrix::new();
    let mut mb = F2Matrix::new();
    let mut mab = F2Matrix::new();
    for m in &basis {
        let p = GradedPoly::monomial(m.clone(), crate::coeff::Coeff::F2(1));
        let na = a.nf(&p)?;
        let nb = b.nf(&p)?;
        ma.add_row(&na);
        mb.add_row(&nb);
        // Direct sum: tag the b-side columns by multiplying with a variable
        // that occurs in no normal form, keeping the two column blocks
        // disjoint.
        let tag = GradedPoly::var(Variable::M(1), RingTag::Mod2);
        let nb_tagged = nb.mul(&tag)?;
        mab.add_row(&na.add(&nb_tagged)?);
    }
    let (ra, rb, rab) = (ma.rank(), mb.rank(), mab.rank());
    Ok(ra == rb && rb == rab)
}

/// A finite generator list only describes the ideal faithfully below the
/// degree of the first missing leading variable.
fn check_bound_within_generators(j: &TriangularIdeal, bound: i64) -> Result<(), Error> {
    let max_lead = j
        .leading_vars()
        .filter_map(|v| match v {
            Variable::V(i) => Some(*i),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    if bound >= Variable::V(max_lead + 1).degree() {
        return Err(Error::InvalidArgument(format!(
            "degree bound {bound} reaches v{}, beyond the generator list",
            max_lead + 1
        )));
    }
    Ok(())
}

/// Condition (3) of the J construction: in every even degree up to `bound`,
/// I_n + J and (v_k : k != n) cut out the same subspace of the monomial
/// basis on the variables v_1..v_m (m chosen so every relevant variable is
/// present).
pub fn check_in_plus_j(n: u32, j: &TriangularIdeal, bound: i64) -> Result<bool, Error> {
    check_bound_within_generators(j, bound)?;
    let mut m = 1u32;
    while Variable::V(m).degree() <= bound {
        m += 1;
    }
    let vars: Vec<Variable> = (1..=m).map(Variable::V).collect();
    let i_n = TriangularIdeal::vanishing_vars(1..n);
    let a = i_n.union(j)?;
    let b = TriangularIdeal::vanishing_vars((1..=m).filter(|&k| k != n));
    for d in (0..=bound).step_by(2) {
        if !kernels_equal_in_degree(&a, &b, &vars, d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Condition (1), degreewise: the F_2-dimension of BP*/(2, J) equals that of
/// F_2[v_1..v_n] in every even degree up to `bound`.
pub fn check_j_dimensions(n: u32, j: &TriangularIdeal, bound: i64) -> Result<bool, Error> {
    check_bound_within_generators(j, bound)?;
    let mut m = 1u32;
    while Variable::V(m).degree() <= bound {
        m += 1;
    }
    let vars: Vec<Variable> = (1..=m).map(Variable::V).collect();
    let small: Vec<Variable> = (1..=n.min(m)).map(Variable::V).collect();
    for d in (0..=bound).step_by(2) {
        let basis = monomials_of_degree(&vars, d);
        let mut img = F2Matrix::new();
        for mono in &basis {
            let p = GradedPoly::monomial(mono.clone(), crate::coeff::Coeff::F2(1));
            img.add_row(&j.nf(&p)?);
        }
        let quotient_dim = img.rank();
        let expected = monomials_of_degree(&small, d).len();
        if quotient_dim != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Quadric-class obstruction checks: with q(w_k) the coefficient
/// [W_{2^k}] of [2]_F(x) log'_F(x),
///   - q(w_0) = 2, q(w_1) = v_1 mod 2, q(w_k) = v_k mod (2, I_k);
///   - Ptilde(q(w_{k-1})) = q(w_k) mod (2, I_k) for 1 <= k <= kmax;
///   - Ptilde(q(w_i)) lies in (2, I_k) for i < k - 1 (Ptilde preserves the
///     invariant-ideal tower).
pub fn verify_pwk(kmax: u32, trunc: u32) -> Result<VerifyOutcome, Error> {
    if (1u64 << kmax) + 1 >= trunc as u64 {
        return Err(Error::InvalidArgument(
            "truncation too small for the requested quadric classes".into(),
        ));
    }
    let fgl = build_bp_fgl_cached(trunc)?;
    let ws = w_series(&fgl, 1 << kmax)?;
    let qw = |k: u32| -> GradedPoly { ws[(1usize << k) - 1].clone() };
    let table = QbarTable::bp(kmax + 2)?;

    // Base values.
    if qw(0) != GradedPoly::from_int(2, RingTag::Rational) {
        return Ok(Some("pwk: q(w_0) is not 2".into()));
    }
    for k in 1..=kmax {
        let ik = TriangularIdeal::vanishing_vars(1..k);
        let got = ik.nf(&qw(k).reduce_mod(1)?)?;
        let want = GradedPoly::var(Variable::V(k), RingTag::Mod2);
        if got != want {
            return Ok(Some(format!(
                "pwk: q(w_{k}) is not v{k} mod (2, I_{k}); normal form {got}"
            )));
        }
    }
    // The power-operation step.
    for k in 1..=kmax {
        let ik = TriangularIdeal::vanishing_vars(1..k);
        let pt = ptilde(&table, &qw(k - 1))?;
        let lhs = ik.nf(&pt)?;
        let rhs = ik.nf(&qw(k).reduce_mod(1)?)?;
        if lhs != rhs {
            return Ok(Some(format!(
                "pwk: Ptilde(q(w_{})) != q(w_{k}) mod (2, I_{k}): {lhs} vs {rhs}",
                k - 1
            )));
        }
        for i in 0..k.saturating_sub(1) {
            let pt_low = ptilde(&table, &qw(i))?;
            if !ik.contains(&pt_low)? {
                return Ok(Some(format!(
                    "pwk: Ptilde(q(w_{i})) escapes (2, I_{k})"
                )));
            }
        }
    }
    Ok(None)
}

/// Machine-readable quotient description for realisability checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdealSpec {
    pub name: String,
    pub generators: Vec<String>,
    #[serde(default)]
    pub inverted: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealisabilityCheck {
    pub hypothesis: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealisabilityReport {
    pub name: String,
    pub pass: bool,
    pub checks: Vec<RealisabilityCheck>,
}

/// Check the obstruction-theoretic hypothesis for a quotient BP*/I (with an
/// optional inverted set): if 2 is inverted the even-obstruction machinery
/// is vacuous; otherwise every generator g of I must satisfy
/// Ptilde(g) in I mod 2.
pub fn realisability_report(spec: &IdealSpec) -> Result<RealisabilityReport, Error> {
    let mut checks = Vec::new();
    if spec.inverted.iter().any(|s| s.trim() == "2") {
        checks.push(RealisabilityCheck {
            hypothesis: "2 is a unit in the quotient".to_string(),
            status: "pass".to_string(),
            witness: None,
        });
        return Ok(RealisabilityReport {
            name: spec.name.clone(),
            pass: true,
            checks,
        });
    }
    let gens: Vec<GradedPoly> = spec
        .generators
        .iter()
        .map(|s| crate::poly::parse_poly(s, RingTag::Mod2, 3))
        .collect::<Result<_, _>>()?;
    let ideal = TriangularIdeal::new(&gens)?;
    let max_v = gens
        .iter()
        .flat_map(|g| g.variables())
        .filter_map(|v| match v {
            Variable::V(i) => Some(i),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    let table = QbarTable::bp(max_v + 1)?;
    // A finite generator list decides membership only up to the top leading
    // degree; checks whose Ptilde lands beyond that are reported as skipped.
    let max_lead_degree = gens
        .iter()
        .filter_map(|g| g.homogeneous_degree())
        .max()
        .unwrap_or(0);
    let mut pass = true;
    for g in &gens {
        let pt_degree = 2 * g.homogeneous_degree().unwrap_or(0) + 2;
        if pt_degree > max_lead_degree {
            checks.push(RealisabilityCheck {
                hypothesis: format!("Ptilde({g}) lies in the ideal mod 2"),
                status: "skipped (beyond generator range)".to_string(),
                witness: None,
            });
            continue;
        }
        let pt = ptilde(&table, &g.lift_to_rational())?;
        let nf = ideal.nf(&pt)?;
        let ok = nf.is_zero();
        pass &= ok;
        checks.push(RealisabilityCheck {
            hypothesis: format!("Ptilde({g}) lies in the ideal mod 2"),
            status: if ok { "pass" } else { "fail" }.to_string(),
            witness: if ok { None } else { Some(nf.to_string()) },
        });
    }
    Ok(RealisabilityReport {
        name: spec.name.clone(),
        pass,
        checks,
    })
}

/// Convenience: the realisability spec for the truncated quotient with
/// generators (v_k : k >= lo), restricted to indices <= hi.
pub fn vanishing_spec(name: &str, lo: u32, hi: u32) -> IdealSpec {
    IdealSpec {
        name: name.to_string(),
        generators: (lo..=hi).map(|k| format!("v{k}")).collect(),
        inverted: Vec::new(),
    }
}

/// The BP<2> obstruction: p_3 has nonzero normal form modulo
/// (v_3, v_4, ...); returns the surviving terms.
pub fn bpn2_obstruction_witness(kmax: u32) -> Result<GradedPoly, Error> {
    let ideal = TriangularIdeal::vanishing_vars(3..=kmax);
    let p3 = crate::powerop::p_n_closed(3)?;
    ideal.nf(&p3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn f2(s: &str) -> GradedPoly {
        parse_poly(s, RingTag::Mod2, 3).unwrap()
    }

    #[test]
    fn nf_examples() {
        let i3 = TriangularIdeal::vanishing_vars(1..3);
        assert_eq!(i3.nf(&f2("v3")).unwrap(), f2("v3"));
        let high = TriangularIdeal::vanishing_vars(3..=6);
        assert_eq!(
            high.nf(&crate::powerop::p_n_closed(3).unwrap()).unwrap(),
            f2("v1^12*v2 + v1^6*v2^3")
        );
        assert!(high.contains(&f2("v1^4*v2*v3")).unwrap());
    }

    #[test]
    fn nf_idempotent_and_multiplicative() {
        let j = construct_j(2, 5).unwrap();
        let a = f2("v1^2*v2*v4 + v3^2");
        let n1 = j.nf(&a).unwrap();
        assert_eq!(j.nf(&n1).unwrap(), n1);
        let b = f2("v1*v3 + v2^4");
        let prod_nf = j.nf(&a.mul(&b).unwrap()).unwrap();
        let nf_prod = j
            .nf(&j.nf(&a).unwrap().mul(&j.nf(&b).unwrap()).unwrap())
            .unwrap();
        assert_eq!(prod_nf, nf_prod);
    }

    #[test]
    fn generators_reduce_to_zero() {
        let j = construct_j(2, 6).unwrap();
        for g in j.generators() {
            assert!(j.contains(&g).unwrap());
        }
    }

    #[test]
    fn ill_formed_ideals_rejected() {
        // Inhomogeneous generator.
        assert!(TriangularIdeal::new(&[f2("v1 + v2")]).is_err());
        // No monic linear leading term.
        assert!(TriangularIdeal::new(&[f2("v1^3*v2^4")]).is_err());
        // Duplicate leading variable.
        assert!(TriangularIdeal::new(&[f2("v2"), f2("v2 + v1^3")]).is_err());
    }

    #[test]
    fn construct_j_n1_gives_plain_vs() {
        let j = construct_j(1, 6).unwrap();
        let want: Vec<GradedPoly> = (2..=6).map(|k| f2(&format!("v{k}"))).collect();
        assert_eq!(j.generators(), want);
    }

    #[test]
    fn construct_j_n2_x4() {
        let j = construct_j(2, 4).unwrap();
        let gens = j.generators();
        assert_eq!(gens[0], f2("v3"));
        assert_eq!(gens[1], f2("v1^12*v2 + v1^6*v2^3 + v4"));
        // Oracle: substitute v3 -> 0 in the closed-form p_3.
        let mut b = BTreeMap::new();
        b.insert(Variable::V(3), GradedPoly::zero(RingTag::Mod2));
        let oracle = crate::powerop::p_n_closed(3)
            .unwrap()
            .substitute(&b)
            .unwrap();
        assert_eq!(gens[1], oracle);
    }

    #[test]
    fn in_plus_j_kernels_match() {
        let j = construct_j(2, 4).unwrap();
        assert!(check_in_plus_j(2, &j, Variable::V(4).degree()).unwrap());
    }

    #[test]
    fn j_dimension_count() {
        let j = construct_j(2, 4).unwrap();
        assert!(check_j_dimensions(2, &j, Variable::V(4).degree()).unwrap());
    }

    #[test]
    fn bpn2_obstruction_present() {
        let w = bpn2_obstruction_witness(6).unwrap();
        assert_eq!(w, f2("v1^12*v2 + v1^6*v2^3"));
    }

    #[test]
    fn monomial_enumeration_small() {
        // Degree 6 in v1 (2), v2 (6): v1^3 and v2.
        let ms = monomials_of_degree(&[Variable::V(1), Variable::V(2)], 6);
        assert_eq!(ms.len(), 2);
        // Degree 0: just 1.
        let ms = monomials_of_degree(&[Variable::V(1)], 0);
        assert_eq!(ms.len(), 1);
        // Odd degree: none.
        assert!(monomials_of_degree(&[Variable::V(1)], 3).is_empty());
    }

    #[test]
    fn pwk_small() {
        assert_eq!(verify_pwk(2, 9).unwrap(), None);
    }

    #[test]
    fn realisability_cases() {
        // BP<1>: (v_k : k > 1) passes.
        let r = realisability_report(&vanishing_spec("BP<1>", 2, 6)).unwrap();
        assert!(r.pass, "{r:?}");
        // BP<2>: (v_k : k >= 3) fails at p_3.
        let r = realisability_report(&vanishing_spec("BP<2>", 3, 6)).unwrap();
        assert!(!r.pass);
        assert!(r.checks.iter().any(|c| c.witness.is_some()));
        // J for n = 2 passes.
        let j = construct_j(2, 6).unwrap();
        let spec = IdealSpec {
            name: "BP*/J(2)".to_string(),
            generators: j.generators().iter().map(|g| g.to_string()).collect(),
            inverted: Vec::new(),
        };
        let r = realisability_report(&spec).unwrap();
        assert!(r.pass, "{r:?}");
        // Inverting 2 short-circuits.
        let spec = IdealSpec {
            name: "rational".to_string(),
            generators: vec![],
            inverted: vec!["2".to_string()],
        };
        assert!(realisability_report(&spec).unwrap().pass);
    }
}
