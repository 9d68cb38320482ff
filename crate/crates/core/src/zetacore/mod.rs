//! Assembly of the structured local zeta functions: numerical data,
//! Igusa and exceptional factors, the corrected sum over Fano strata,
//! series extraction, abscissa estimation, and the functional equation.

mod cases;
mod lemmas;

pub use cases::{coeff_c, decomposition_cases, truncated_a, CaseDescriptor};
pub use lemmas::{lemma_suite, LemmaCheck, LemmaReport};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::combinat::{flag_count, FlagType};
use crate::exactalg::{Exp, FactorSet, GeomFactor, LaurentPoly, RatFun};
use crate::{Error, Result};

/// The three groups in scope.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum Group {
    F22,
    F23,
    F24,
}

impl Group {
    pub fn name(&self) -> &'static str {
        match self {
            Group::F22 => "F22",
            Group::F23 => "F23",
            Group::F24 => "F24",
        }
    }

    pub fn parse(s: &str) -> Result<Group> {
        match s.to_ascii_uppercase().as_str() {
            "F22" => Ok(Group::F22),
            "F23" => Ok(Group::F23),
            "F24" => Ok(Group::F24),
            other => Err(Error::UnknownCase(format!("unknown group {other}"))),
        }
    }

    /// Torsion-free rank of the abelianisation.
    pub fn d(&self) -> u32 {
        match self {
            Group::F22 => 2,
            Group::F23 => 3,
            Group::F24 => 4,
        }
    }

    /// Torsion-free rank of the centre, `d' = d(d-1)/2`.
    pub fn d_prime(&self) -> u32 {
        let d = self.d();
        d * (d - 1) / 2
    }

    /// Hirsch length `d + d'`.
    pub fn hirsch_length(&self) -> u32 {
        self.d() + self.d_prime()
    }
}

/// A monomial `p^a T^b` (the numerical data attached to a stratum).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Monomial {
    pub p_exp: Exp,
    pub t_exp: Exp,
}

impl Monomial {
    pub fn new(p_exp: Exp, t_exp: Exp) -> Self {
        Monomial { p_exp, t_exp }
    }

    pub fn as_poly(&self) -> LaurentPoly {
        LaurentPoly::monomial(1, self.p_exp, self.t_exp)
    }

    /// The factor `1 - p^a T^b`.
    pub fn one_minus(&self) -> GeomFactor {
        assert!(self.p_exp >= 0 && self.t_exp >= 1);
        GeomFactor::new(self.p_exp as u32, self.t_exp as u32)
    }
}

/// `X_i = p^{i(10-i)} T^{4+i}` for `i = 1..5` (the `F24` upper variables).
pub fn x_var(i: u32) -> Monomial {
    assert!((1..=5).contains(&i));
    let i = i as Exp;
    Monomial::new(i * (10 - i), 4 + i)
}

/// `Y_1 = p^8 T^3`, `Y_2 = p^13 T^5`, `Y_3 = p^15 T^6` (the `F24` lower
/// variables, `Y_i = p^{i d + dim_i} T^{d + i - t_i}`).
pub fn y_var(i: u32) -> Monomial {
    let fd = fano_data(i);
    let d = 4 as Exp;
    Monomial::new(
        (i as Exp) * d + fd.dim as Exp,
        d + i as Exp - fd.t as Exp,
    )
}

/// Numerical data of the Fano variety of `(i-1)`-dimensional subspaces on
/// the quadric: its dimension, codimension, the ambient Grassmannian
/// dimension `n_i = i(6-i)`, the exponent `t` (2 for points, 1 above), and
/// the point count (for planes: one ruling only).
#[derive(Clone, Debug)]
pub struct FanoData {
    pub level: u32,
    pub dim: u32,
    pub codim: u32,
    pub ambient_dim: u32,
    pub t: u32,
    pub count_poly: LaurentPoly,
}

pub fn fano_data(i: u32) -> FanoData {
    let (dim, codim, t) = match i {
        1 => (4, 1, 2),
        2 => (5, 3, 1),
        3 => (3, 6, 1),
        _ => panic!("Fano data exists for levels 1..=3"),
    };
    FanoData {
        level: i,
        dim,
        codim,
        ambient_dim: dim + codim,
        t,
        count_poly: fano_count(i),
    }
}

/// `n_i(p)`: points `(p^2+1)(p^2+p+1)`, lines `(p+1)(p^2+1)(p^2+p+1)`,
/// planes in the weight-dropping ruling `(p^2+1)(p+1)`; zero for `i > 3`.
pub fn fano_count(i: u32) -> LaurentPoly {
    let p2p1 = LaurentPoly::from_terms([(2, 0, 1), (0, 0, 1)]);
    let ppp = LaurentPoly::from_terms([(2, 0, 1), (1, 0, 1), (0, 0, 1)]);
    let p1 = LaurentPoly::from_terms([(1, 0, 1), (0, 0, 1)]);
    match i {
        1 => &p2p1 * &ppp,
        2 => &(&p1 * &p2p1) * &ppp,
        3 => &p2p1 * &p1,
        _ => LaurentPoly::zero(),
    }
}

/// `zeta_{Z^d, p} = prod_{j=0}^{d-1} 1/(1 - p^j T)`.
pub fn zeta_zd(d: u32) -> RatFun {
    assert!(d >= 1);
    RatFun::new(
        LaurentPoly::one(),
        FactorSet::from_factors((0..d).map(|j| GeomFactor::new(j, 1))),
    )
}

/// The Igusa factor `I_m(U_1, .., U_m) = sum_{I subset {1..m}} b_I(p^{-1})
/// prod_{i in I} U_i / (1 - U_i)`, with `b_I` counted in ambient `P^m` and
/// `vars[k]` bound to flag index `k + 1`. `I_0 = 1`.
pub fn igusa(m: u32, vars: &[Monomial]) -> RatFun {
    assert_eq!(vars.len(), m as usize);
    let den = FactorSet::from_factors(vars.iter().map(|u| u.one_minus()));
    let mut num = LaurentPoly::zero();
    for mask in 0u32..(1 << m) {
        let indices: Vec<u32> = (1..=m).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        let b_inv = flag_count(&FlagType::new(m, indices.clone())).invert_p();
        let mut term = b_inv;
        for i in 1..=m {
            let u = &vars[(i - 1) as usize];
            if indices.contains(&i) {
                term = term.mul_monomial(&BigInt::one(), u.p_exp, u.t_exp);
            } else {
                term = &term - &term.mul_monomial(&BigInt::one(), u.p_exp, u.t_exp);
            }
        }
        num = &num + &term;
    }
    RatFun::new(num, den)
}

/// The exceptional factor
/// `E_i = (p^{-dim_i} Y_i - p^{-n_i} X_i) / ((1 - X_i)(1 - Y_i))`.
pub fn exceptional(i: u32) -> RatFun {
    let fd = fano_data(i);
    let x = x_var(i);
    let y = y_var(i);
    let num = &LaurentPoly::monomial(1, y.p_exp - fd.dim as Exp, y.t_exp)
        - &LaurentPoly::monomial(1, x.p_exp - fd.ambient_dim as Exp, x.t_exp);
    RatFun::new(num, FactorSet::from_factors([x.one_minus(), y.one_minus()]))
}

/// `W_i = I_{5-i}(X_{i+1}, .., X_5) E_i I_{i-1}(Y_1, .., Y_{i-1})`, the
/// stratum factor of the corrected sum; `W_0 = I_5(X_1, .., X_5)`.
pub fn w_factor(i: u32) -> RatFun {
    assert!(i <= 3);
    let upper_vars: Vec<Monomial> = (i + 1..=5).map(x_var).collect();
    let upper = igusa(5 - i, &upper_vars);
    if i == 0 {
        return upper;
    }
    let lower_vars: Vec<Monomial> = (1..i).map(y_var).collect();
    let lower = igusa(i - 1, &lower_vars);
    upper.mul(&exceptional(i)).mul(&lower)
}

/// The exact local normal zeta function of the group, as a rational
/// function with factored denominator.
pub fn zeta_local(group: Group) -> RatFun {
    match group {
        Group::F22 => RatFun::new(
            LaurentPoly::one(),
            FactorSet::from_factors([
                GeomFactor::new(0, 1),
                GeomFactor::new(1, 1),
                GeomFactor::new(2, 3),
            ]),
        ),
        Group::F23 => {
            // zeta_{Z^3} * zeta_p(6s - 9) * I_2(U_1, U_2),
            // U_1 = p^8 T^5, U_2 = p^5 T^3
            let i2 = igusa(2, &[Monomial::new(8, 5), Monomial::new(5, 3)]);
            zeta_zd(3)
                .mul(&RatFun::geom_inverse(GeomFactor::new(9, 6)))
                .mul(&i2)
        }
        Group::F24 => {
            let mut strata = w_factor(0);
            for i in 1..=3 {
                strata = strata.add(&w_factor(i).mul_poly(&fano_count(i)));
            }
            zeta_zd(4)
                .mul(&RatFun::geom_inverse(GeomFactor::new(24, 10)))
                .mul(&strata)
        }
    }
}

/// Result of the functional-equation check: the verified relation
/// `zeta|_{p -> p^{-1}, T -> T^{-1}} = sign * p^{p_exp} T^{t_exp} * zeta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FunctionalEquation {
    pub sign: i8,
    pub p_exp: i64,
    pub t_exp: i64,
}

/// Finds and verifies the monomial relating `zeta` to its inversion, by
/// dividing leading terms and checking the whole numerator exactly.
pub fn check_functional_equation(group: Group) -> Result<FunctionalEquation> {
    let zeta = zeta_local(group);
    let inv = zeta.invert();
    // invert() keeps the factor multiset, so the relation reduces to
    // num_inv = sign * p^a T^b * num.
    let lead = |rf: &RatFun| rf.num().terms().next().map(|(ep, et, c)| (ep, et, c.clone()));
    let (ep_i, et_i, c_i) = lead(&inv).ok_or_else(|| {
        Error::FunctionalEquation("zero numerator".into())
    })?;
    let (ep_z, et_z, c_z) = lead(&zeta).ok_or_else(|| {
        Error::FunctionalEquation("zero numerator".into())
    })?;
    if c_i != c_z && c_i != -c_z.clone() {
        return Err(Error::FunctionalEquation(format!(
            "leading coefficients {c_i} vs {c_z} are not equal up to sign"
        )));
    }
    let sign: i8 = if c_i == c_z { 1 } else { -1 };
    let (a, b) = (ep_i - ep_z, et_i - et_z);
    let scaled = zeta
        .num()
        .mul_monomial(&BigInt::from(sign), a, b);
    if &scaled != inv.num() {
        return Err(Error::FunctionalEquation(
            "no monomial relates the inversion to the original".into(),
        ));
    }
    Ok(FunctionalEquation {
        sign,
        p_exp: a as i64,
        t_exp: b as i64,
    })
}

/// The coefficients `a_{p^n}` for `n <= upto`, as polynomials in `p`.
#[derive(Clone, Debug)]
pub struct SeriesCoeffs {
    pub group: Group,
    pub upto: u32,
    pub coeffs: Vec<LaurentPoly>,
}

pub fn series_coeffs(group: Group, upto: u32) -> SeriesCoeffs {
    let coeffs = zeta_local(group)
        .series(upto)
        .expect("zeta denominators are expandable");
    SeriesCoeffs {
        group,
        upto,
        coeffs,
    }
}

/// `max_{1 <= n <= upto} (deg_p a_{p^n} + 1) / n`, an exact rational.
pub fn abscissa_estimate(group: Group, upto: u32) -> Ratio<i64> {
    assert!(upto >= 1);
    let coeffs = series_coeffs(group, upto).coeffs;
    let mut best = Ratio::new(0, 1);
    for (n, c) in coeffs.iter().enumerate().skip(1) {
        if let Some(deg) = c.p_degree() {
            let cand = Ratio::new(deg as i64 + 1, n as i64);
            if cand > best {
                best = cand;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_ratfun;

    #[test]
    fn numerical_data() {
        assert_eq!(x_var(1), Monomial::new(9, 5));
        assert_eq!(x_var(5), Monomial::new(25, 9));
        assert_eq!(y_var(1), Monomial::new(8, 3));
        assert_eq!(y_var(2), Monomial::new(13, 5));
        assert_eq!(y_var(3), Monomial::new(15, 6));
        // consistency X_i = p^{i d + n_i} T^{d+i}
        for i in 1..=3u32 {
            let fd = fano_data(i);
            assert_eq!(fd.ambient_dim, i * (6 - i));
            assert_eq!(
                x_var(i),
                Monomial::new((4 * i + fd.ambient_dim) as Exp, (4 + i) as Exp)
            );
            // degree of the count polynomial is the Fano dimension, and the
            // count is palindromic: n_i(p^{-1}) = p^{-dim} n_i(p).
            assert_eq!(fd.count_poly.p_degree().unwrap() as u32, fd.dim);
            assert_eq!(
                fd.count_poly.invert_p(),
                fd.count_poly.mul_monomial(&BigInt::one(), -(fd.dim as Exp), 0)
            );
        }
    }

    #[test]
    fn fano_counts_at_small_primes() {
        use num_bigint::BigInt;
        assert_eq!(fano_count(1).eval_p_scalar(&BigInt::from(2)), BigInt::from(35));
        assert_eq!(fano_count(3).eval_p_scalar(&BigInt::from(3)), BigInt::from(40));
        assert_eq!(fano_count(2).eval_p_scalar(&BigInt::from(3)), BigInt::from(520));
    }

    #[test]
    fn zeta_zd_basics() {
        assert!(zeta_zd(1).equal(&RatFun::geom_inverse(GeomFactor::new(0, 1))));
        let s = zeta_zd(4).series(1).unwrap();
        assert_eq!(s[1], crate::combinat::sublattice_count(4, 1));
    }

    #[test]
    fn igusa_small() {
        assert!(igusa(0, &[]).equal(&RatFun::one()));
        // I_1(U) = (1 + p^{-1} U) / (1 - U) with U = p^2 T
        let u = Monomial::new(2, 1);
        let lhs = igusa(1, &[u]);
        let rhs = RatFun::new(
            LaurentPoly::from_terms([(0, 0, 1), (1, 1, 1)]),
            FactorSet::from_factors([GeomFactor::new(2, 1)]),
        );
        assert!(lhs.equal(&rhs));
    }

    #[test]
    fn f23_closed_form() {
        let explicit = parse_ratfun(
            "(1 + p^3*T^3 + p^4*T^3 + p^6*T^5 + p^7*T^5 + p^10*T^8) / \
             ((1 - T)*(1 - p*T)*(1 - p^2*T)*(1 - p^5*T^3)*(1 - p^8*T^5)*(1 - p^9*T^6))",
        )
        .unwrap();
        assert!(zeta_local(Group::F23).equal(&explicit));
    }

    #[test]
    fn f22_closed_form() {
        let explicit = parse_ratfun("(1) / ((1 - T)*(1 - p*T)*(1 - p^2*T^3))").unwrap();
        assert!(zeta_local(Group::F22).equal(&explicit));
    }

    #[test]
    fn exceptional_factors() {
        // E_1 numerator: p^4 T^3 - p^4 T^5
        let e1 = exceptional(1);
        assert_eq!(
            e1.num(),
            &LaurentPoly::from_terms([(4, 3, 1), (4, 5, -1)])
        );
        // E_i == p^{d i} T^{d+i-t} (1 - T^t) / ((1 - Y_i)(1 - X_i))
        for i in 1..=3u32 {
            let fd = fano_data(i);
            let num = LaurentPoly::from_terms([
                ((4 * i) as Exp, (4 + i - fd.t) as Exp, 1),
                ((4 * i) as Exp, (4 + i) as Exp, -1),
            ]);
            let rhs = RatFun::new(
                num,
                FactorSet::from_factors([x_var(i).one_minus(), y_var(i).one_minus()]),
            );
            assert!(exceptional(i).equal(&rhs), "crucial-corollary form fails at i={i}");
        }
    }

    #[test]
    fn w_factor_structure() {
        let x_all: Vec<Monomial> = (1..=5).map(x_var).collect();
        assert!(w_factor(0).equal(&igusa(5, &x_all)));
        let w1 = igusa(4, &x_all[1..]).mul(&exceptional(1));
        assert!(w_factor(1).equal(&w1));
        let w3 = igusa(2, &x_all[3..])
            .mul(&exceptional(3))
            .mul(&igusa(2, &[y_var(1), y_var(2)]));
        assert!(w_factor(3).equal(&w3));
    }

    #[test]
    fn functional_equations() {
        assert_eq!(
            check_functional_equation(Group::F22).unwrap(),
            FunctionalEquation { sign: -1, p_exp: 3, t_exp: 5 }
        );
        assert_eq!(
            check_functional_equation(Group::F23).unwrap(),
            FunctionalEquation { sign: 1, p_exp: 15, t_exp: 9 }
        );
    }

    #[test]
    fn f24_functional_equation() {
        assert_eq!(
            check_functional_equation(Group::F24).unwrap(),
            FunctionalEquation { sign: 1, p_exp: 45, t_exp: 14 }
        );
    }

    #[test]
    fn series_basics() {
        let s = series_coeffs(Group::F22, 3);
        assert_eq!(s.coeffs[0], LaurentPoly::one());
        assert_eq!(s.coeffs[1], LaurentPoly::from_terms([(0, 0, 1), (1, 0, 1)]));
        use num_bigint::BigInt;
        assert_eq!(s.coeffs[3].eval_p_scalar(&BigInt::from(2)), BigInt::from(19));
        for g in [Group::F22, Group::F23, Group::F24] {
            assert_eq!(series_coeffs(g, 0).coeffs[0], LaurentPoly::one());
        }
    }

    #[test]
    fn abscissas() {
        assert_eq!(abscissa_estimate(Group::F22, 12), Ratio::new(2, 1));
        assert_eq!(abscissa_estimate(Group::F23, 12), Ratio::new(3, 1));
        assert_eq!(abscissa_estimate(Group::F24, 12), Ratio::new(4, 1));
    }

    #[test]
    fn igusa_inversion() {
        // I_k inverts to (-1)^k p^{k(k+1)/2} I_k for the F24 variables.
        for k in 1..=5u32 {
            let vars: Vec<Monomial> = (6 - k..=5).map(x_var).collect();
            let ig = igusa(k, &vars);
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let scaled = ig.mul_poly(&LaurentPoly::monomial(sign, (k * (k + 1) / 2) as Exp, 0));
            assert!(ig.invert().equal(&scaled), "Igusa inversion fails at k={k}");
        }
    }

    #[test]
    fn exceptional_and_w_inversion() {
        // E_i inverts to -p^{n_i + d_i} E_i (sign verified symbolically).
        for i in 1..=3u32 {
            let fd = fano_data(i);
            let e = exceptional(i);
            let scaled = e.mul_poly(&LaurentPoly::monomial(
                -1,
                (fd.ambient_dim + fd.dim) as Exp,
                0,
            ));
            assert!(e.invert().equal(&scaled), "exceptional inversion fails at i={i}");
        }
        // The weighted strata n_i W_i all invert to -p^{15} times themselves
        // (the (-1)^{d'-1} p^{binom(d',2)} law); the bare W_i for i >= 1
        // carries the extra p^{d_i} that the Fano count's palindromy cancels.
        let w0 = w_factor(0);
        assert!(w0
            .invert()
            .equal(&w0.mul_poly(&LaurentPoly::monomial(-1, 15, 0))));
        for i in 1..=3u32 {
            let fd = fano_data(i);
            let w = w_factor(i);
            let scaled = w.mul_poly(&LaurentPoly::monomial(-1, 15 + fd.dim as Exp, 0));
            assert!(w.invert().equal(&scaled), "W inversion fails at i={i}");
            let weighted = w.mul_poly(&fd.count_poly);
            let weighted_scaled = weighted.mul_poly(&LaurentPoly::monomial(-1, 15, 0));
            assert!(
                weighted.invert().equal(&weighted_scaled),
                "weighted stratum inversion fails at i={i}"
            );
        }
    }
}
