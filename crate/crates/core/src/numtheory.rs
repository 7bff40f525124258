//! Exact rational constructions: star-graph energies realizing a prescribed
//! polynomial, quadratic discriminants, and root residual checks.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            if let Ok(n) = s.parse::<BigInt>() {
                return Ok(BigRational::from_integer(n));
            }
            let x: f64 = s.parse().map_err(|_| bad())?;
            BigRational::from_float(x).ok_or_else(bad)
        }
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Square root of `q` when it is the square of a rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

/// Polynomial with exact rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    /// Trailing zero coefficients are dropped; the zero polynomial is rejected.
    pub fn new(mut coeffs: Vec<Rational>) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("zero polynomial".into()));
        }
        Ok(RationalPolynomial { coeffs })
    }

    pub fn from_integers(coeffs: &[i64]) -> Result<Self> {
        RationalPolynomial::new(coeffs.iter().map(|&c| rat(c, 1)).collect())
    }

    /// `∏ (x - r)`.
    pub fn from_roots(roots: &[Rational]) -> Self {
        let mut coeffs = vec![Rational::one()];
        for r in roots {
            let mut next = vec![Rational::zero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        RationalPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    /// Sum of absolute coefficient values.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| to_f64(c).abs()).sum()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        RationalPolynomial { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let m = format_rational(&mag);
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{m}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{m}x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{m}x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Anchors `a_0 < … < a_d` and positive energies on the `(d+1)`-star whose
/// leaves sit at the anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct StarProblem {
    pub anchors: Vec<Rational>,
    pub energies: Vec<Rational>,
}

/// The energies `e_i` (normalized to sum 1) for which
/// `Σ e_i ∏_{j≠i} (x - a_j)` is a multiple of `p`, so the enharmonic values
/// at the star's centre are the roots of `p`.
///
/// The roots of `p` are certified to interlace the anchors by the exact
/// sign alternation of `p` at consecutive anchors.
pub fn star_energies(p: &RationalPolynomial, anchors: &[Rational]) -> Result<StarProblem> {
    let d = p.degree();
    if anchors.len() != d + 1 {
        return Err(Error::InvalidInput(format!("degree {d} needs {} anchors, got {}", d + 1, anchors.len())));
    }
    if anchors.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("anchors must be strictly increasing".into()));
    }
    let values: Vec<Rational> = anchors.iter().map(|a| p.eval(a)).collect();
    if values.iter().any(Zero::is_zero) || values.windows(2).any(|w| w[0].is_positive() == w[1].is_positive()) {
        return Err(Error::NotInterlaced);
    }

    let n = d + 1;
    let mut m: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n + 1]; n];
    for i in 0..n {
        let others: Vec<Rational> = anchors.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, a)| a.clone()).collect();
        let q = RationalPolynomial::from_roots(&others);
        for (k, c) in q.coeffs().iter().enumerate() {
            m[k][i] = c.clone();
        }
    }
    for (k, c) in p.coeffs().iter().enumerate() {
        m[k][n] = c.clone();
    }
    let e = solve_exact(m)?;
    let total: Rational = e.iter().sum();
    if total.is_zero() {
        return Err(Error::NotInterlaced);
    }
    let energies: Vec<Rational> = e.iter().map(|x| x / &total).collect();
    if energies.iter().any(|x| !x.is_positive()) {
        return Err(Error::NotInterlaced);
    }
    Ok(StarProblem { anchors: anchors.to_vec(), energies })
}

/// Gauss-Jordan elimination on an augmented `n × (n+1)` matrix.
fn solve_exact(mut m: Vec<Vec<Rational>>) -> Result<Vec<Rational>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::SingularSystem)?;
        m.swap(col, pivot);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=n {
                    let delta = &factor * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n].clone()).collect())
}

/// `δ = (E_a E_e − E_b E_d + E_c S)² + 4 E_b E_c E_d S` with `S` the sum of
/// the five energies of the small two-terminal graph.
pub fn quadratic_discriminant(
    ea: &Rational,
    eb: &Rational,
    ec: &Rational,
    ed: &Rational,
    ee: &Rational,
) -> Result<Rational> {
    for (name, v) in [("E_a", ea), ("E_b", eb), ("E_c", ec), ("E_d", ed), ("E_e", ee)] {
        if !v.is_positive() {
            return Err(Error::NonPositive(name.into()));
        }
    }
    let s = ea + eb + ec + ed + ee;
    let t = ea * ee - eb * ed + ec * &s;
    Ok(&t * &t + rat(4, 1) * eb * ec * ed * &s)
}

/// Energies `(1, 1, 1, E_d, E_e)` whose discriminant is `D` times a square.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticParams {
    pub s: Rational,
    /// `D s²`, inside `(1/3, 4/9)`.
    pub d_prime: Rational,
    pub e_d: Rational,
    pub e_e: Rational,
}

fn is_squarefree(d: u64) -> bool {
    let mut k = 2u64;
    while k * k <= d {
        if d % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// The first `s = p/q` (by denominator, then numerator) with
/// `D s² ∈ (1/3, 4/9)`, and the resulting energies.
pub fn quadratic_field_params(d: u64) -> Result<QuadraticParams> {
    if d < 2 || !is_squarefree(d) {
        return Err(Error::InvalidInput(format!("D = {d} must be a squarefree integer at least 2")));
    }
    let lo = rat(1, 3);
    let hi = rat(4, 9);
    let dd = Rational::from_integer(BigInt::from(d));
    for q in 1i64.. {
        for p in 1i64.. {
            let s = rat(p, q);
            let dp = &dd * &s * &s;
            if dp >= hi {
                break;
            }
            if dp > lo {
                return params_for_scale(d, &s);
            }
        }
    }
    unreachable!("the interval (1/3, 4/9) contains D s² for some rational s")
}

/// Energies for a given scale `s`; `D s²` must lie in `(1/3, 4/9)`.
pub fn params_for_scale(d: u64, s: &Rational) -> Result<QuadraticParams> {
    let dp = Rational::from_integer(BigInt::from(d)) * s * s;
    if !(dp > rat(1, 3) && dp < rat(4, 9)) {
        return Err(Error::InvalidInput(format!("D s² = {} is outside (1/3, 4/9)", format_rational(&dp))));
    }
    let denom = rat(6, 1) * &dp - rat(2, 1);
    let e_d = denom.recip();
    let e_e = (rat(4, 1) - rat(9, 1) * &dp) / &denom;
    Ok(QuadraticParams { s: s.clone(), d_prime: dp, e_d, e_e })
}

/// `max_v |p(v)| / ‖p‖₁`.
pub fn min_poly_residual(values: &[f64], p: &RationalPolynomial) -> f64 {
    let norm = p.l1_norm();
    values.iter().map(|&v| p.eval_f64(v).abs()).fold(0.0, f64::max) / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_star() {
        let p = RationalPolynomial::new(vec![rat(-1, 2), rat(1, 1)]).unwrap();
        let star = star_energies(&p, &[rat(0, 1), rat(1, 1)]).unwrap();
        assert_eq!(star.energies, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn quadratic_star_exact() {
        let p = RationalPolynomial::from_integers(&[4, -6, 1]).unwrap();
        let star = star_energies(&p, &[rat(0, 1), rat(1, 1), rat(6, 1)]).unwrap();
        assert_eq!(star.energies, vec![rat(2, 3), rat(1, 5), rat(2, 15)]);
    }

    #[test]
    fn root_on_anchor_is_not_interlaced() {
        let p = RationalPolynomial::from_integers(&[0, -1, 1]).unwrap();
        let err = star_energies(&p, &[rat(0, 1), rat(1, 2), rat(2, 1)]).unwrap_err();
        assert_eq!(err, Error::NotInterlaced);
    }

    #[test]
    fn discriminant_examples() {
        let one = rat(1, 1);
        assert_eq!(quadratic_discriminant(&one, &one, &one, &one, &one).unwrap(), rat(45, 1));
        let (ed, ee) = (rat(2, 3), rat(5, 7));
        let expected = rat(4, 1) * &ed * &ed + rat(4, 1) * &ed * &ee + rat(4, 1) * &ee * &ee
            + rat(12, 1) * &ed + rat(12, 1) * &ee + rat(9, 1);
        assert_eq!(quadratic_discriminant(&one, &one, &one, &ed, &ee).unwrap(), expected);
        assert_eq!(
            quadratic_discriminant(&one, &rat(0, 1), &one, &one, &one).unwrap_err(),
            Error::NonPositive("E_b".into())
        );
    }

    #[test]
    fn field_params_for_five() {
        let q = quadratic_field_params(5).unwrap();
        assert_eq!((q.s.clone(), q.d_prime.clone()), (rat(2, 7), rat(20, 49)));
        assert_eq!((q.e_d.clone(), q.e_e.clone()), (rat(49, 22), rat(16, 22)));
        let one = rat(1, 1);
        let delta = quadratic_discriminant(&one, &one, &one, &q.e_d, &q.e_e).unwrap();
        let three_dp_minus_one = rat(3, 1) * &q.d_prime - rat(1, 1);
        assert_eq!(delta, rat(9, 1) * &q.d_prime / (&three_dp_minus_one * &three_dp_minus_one));
        assert!(rational_sqrt(&(delta / rat(5, 1))).is_some());
        assert!(quadratic_field_params(1).is_err());
        assert!(quadratic_field_params(12).is_err());
    }

    #[test]
    fn scale_nine_twentieths_for_two() {
        let q = params_for_scale(2, &rat(9, 20)).unwrap();
        assert_eq!(q.d_prime, rat(81, 200));
    }

    #[test]
    fn residuals() {
        let p = RationalPolynomial::from_integers(&[0, -1, 1]).unwrap();
        assert_eq!(min_poly_residual(&[0.5], &p), 0.125);
        let q = RationalPolynomial::from_integers(&[1, -5, 5]).unwrap();
        let r = 5f64.sqrt() / 10.0;
        assert!(min_poly_residual(&[0.5 + r, 0.5 - r], &q) < 1e-15);
    }

    #[test]
    fn formatting_and_parsing() {
        let p = RationalPolynomial::new(vec![rat(1, 2), rat(-3, 1), rat(3, 1)]).unwrap();
        assert_eq!(p.to_string(), "3x^2 - 3x + 1/2");
        assert_eq!(parse_rational("-4/6").unwrap(), rat(-2, 3));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rational("0.5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(rational_sqrt(&rat(9, 49)), Some(rat(3, 7)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
    }
}
