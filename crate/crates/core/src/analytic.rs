//! Analytic functions on `|z| < R` given by exact Taylor coefficients together
//! with an exponential-growth envelope `|c_k| <= M·A^k/k!`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratpoly::{parse_rational, ratio, rational_to_f64, RationalPoly};
use crate::series::{exponential_tail, linear_geometric_tail};

/// Envelope rate used for polynomials when the caller does not choose one.
pub fn default_polynomial_rate() -> BigRational {
    ratio(1, 4)
}

/// Depth to which every constructed function's envelope is checked.
pub const VALIDATION_DEPTH: usize = 200;

/// `|c_k| <= M·A^k/k!` on the disk `|z| < R`, with `1/R < A < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEnvelope {
    m: BigRational,
    a: BigRational,
    radius: f64,
}

impl GrowthEnvelope {
    pub fn new(m: BigRational, a: BigRational, radius: f64) -> Result<Self> {
        if !m.is_positive() {
            return Err(Error::hypothesis("M > 0", rational_to_f64(&m)));
        }
        let af = rational_to_f64(&a);
        if !(a.is_positive() && a < BigRational::one()) {
            return Err(Error::hypothesis("A < 1 with A > 0", af));
        }
        if !(radius > 1.0 && af * radius > 1.0) {
            return Err(Error::hypothesis(
                "1/R < A with R > 1",
                format!("A = {af}, R = {radius}"),
            ));
        }
        Ok(GrowthEnvelope { m, a, radius })
    }

    /// Default disk radius `max(4, 2/A)`: keeps `R > 2` and `A > 1/R`.
    pub fn default_radius(a: &BigRational) -> f64 {
        (2.0 / rational_to_f64(a)).max(4.0)
    }

    pub fn m(&self) -> f64 {
        rational_to_f64(&self.m)
    }

    pub fn a(&self) -> f64 {
        rational_to_f64(&self.a)
    }

    pub fn m_exact(&self) -> &BigRational {
        &self.m
    }

    pub fn a_exact(&self) -> &BigRational {
        &self.a
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `M·A^k/k!`, exactly.
    pub fn bound(&self, k: usize) -> BigRational {
        &self.m * self.a.pow(k as i32) / factorial(k)
    }
}

fn factorial(k: usize) -> BigRational {
    BigRational::from_integer((1..=k).map(BigInt::from).product())
}

#[derive(Debug, Clone, PartialEq)]
enum Series {
    Exponential { a: BigRational },
    Polynomial(Vec<BigRational>),
    Derivative { base: Box<Series>, order: usize },
}

impl Series {
    fn coeff(&self, k: usize) -> BigRational {
        match self {
            Series::Exponential { a } => a.pow(k as i32) / factorial(k),
            Series::Polynomial(c) => c.get(k).cloned().unwrap_or_else(BigRational::zero),
            Series::Derivative { base, order } => {
                let falling: BigInt = (k + 1..=k + order).map(BigInt::from).product();
                base.coeff(k + order) * falling
            }
        }
    }

    fn last_nonzero(&self) -> Option<Option<usize>> {
        match self {
            Series::Exponential { .. } => None,
            Series::Polynomial(c) => Some(c.iter().rposition(|x| !x.is_zero())),
            Series::Derivative { base, order } => base.last_nonzero().map(|d| d.and_then(|d| d.checked_sub(*order))),
        }
    }
}

/// `f(z) = Σ c_k z^k` with exact coefficients and a certified growth envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFunction {
    series: Series,
    envelope: GrowthEnvelope,
    label: String,
    spec: String,
}

/// First envelope violation found by [`AnalyticFunction::validate_envelope`], if any.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub depth: usize,
    pub violation: Option<Error>,
}

impl EnvelopeReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

/// `e^{az}` with envelope `(M = 1, A = a)`.
pub fn make_exponential(a: BigRational) -> Result<AnalyticFunction> {
    if !a.is_positive() || a >= BigRational::one() {
        return Err(Error::hypothesis(
            "0 < a < 1 (envelope rate A = a)",
            rational_to_f64(&a),
        ));
    }
    let envelope = GrowthEnvelope::new(BigRational::one(), a.clone(), GrowthEnvelope::default_radius(&a))?;
    let f = AnalyticFunction {
        label: format!("exp({a}·z)"),
        spec: format!("exp:a={a}"),
        series: Series::Exponential { a },
        envelope,
    };
    f.ensure_valid()?;
    Ok(f)
}

/// A polynomial with the smallest `M` admissible for the chosen rate `A`.
pub fn make_polynomial(coeffs: Vec<BigRational>, a: BigRational) -> Result<AnalyticFunction> {
    let mut coeffs = coeffs;
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    if !a.is_positive() || a >= BigRational::one() {
        return Err(Error::hypothesis("0 < A < 1", rational_to_f64(&a)));
    }
    let m = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| c.abs() * factorial(k) / a.pow(k as i32))
        .max()
        .unwrap_or_else(BigRational::one);
    let envelope = GrowthEnvelope::new(m, a.clone(), GrowthEnvelope::default_radius(&a))?;
    let body = coeffs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let f = AnalyticFunction {
        label: format!("poly({})", if body.is_empty() { "0" } else { &body }),
        spec: format!("poly:{}", if body.is_empty() { "0" } else { &body }),
        series: Series::Polynomial(coeffs),
        envelope,
    };
    f.ensure_valid()?;
    Ok(f)
}

impl AnalyticFunction {
    pub fn coeff(&self, k: usize) -> BigRational {
        self.series.coeff(k)
    }

    pub fn coefficients(&self, upto: usize) -> Vec<BigRational> {
        (0..=upto).map(|k| self.coeff(k)).collect()
    }

    pub fn envelope(&self) -> &GrowthEnvelope {
        &self.envelope
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Canonical mini-format string, e.g. `exp:a=1/2`.
    pub fn spec(&self) -> &str {
        &self.spec
    }

    /// For polynomials, the index past which every coefficient vanishes
    /// (`Some(None)` for the zero function); `None` for transcendental series.
    pub fn polynomial_degree(&self) -> Option<Option<usize>> {
        self.series.last_nonzero()
    }

    /// Whether `f` is a polynomial of degree at most `d`.
    pub fn is_polynomial_of_degree_at_most(&self, d: usize) -> bool {
        matches!(self.polynomial_degree(), Some(deg) if deg.map_or(true, |deg| deg <= d))
    }

    /// Taylor polynomial `Σ_{k<=upto} c_k z^k`.
    pub fn taylor_poly(&self, upto: usize) -> RationalPoly {
        RationalPoly::from_coeffs(self.coefficients(upto))
    }

    /// Checks `|c_k| <= M·A^k/k!` exactly for `k = 0..=depth`.
    pub fn validate_envelope(&self, depth: usize) -> EnvelopeReport {
        let violation = (0..=depth).find_map(|k| {
            let c = self.coeff(k).abs();
            let bound = self.envelope.bound(k);
            (c > bound).then(|| Error::EnvelopeViolation {
                k,
                coefficient: rational_to_f64(&c),
                envelope: rational_to_f64(&bound),
            })
        });
        EnvelopeReport { depth, violation }
    }

    fn ensure_valid(&self) -> Result<()> {
        match self.validate_envelope(VALIDATION_DEPTH).violation {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Replaces the envelope, e.g. to test a tighter claim; the result is not validated.
    pub fn with_envelope(&self, envelope: GrowthEnvelope) -> Self {
        AnalyticFunction {
            envelope,
            ..self.clone()
        }
    }

    /// Index at which the envelope tail `M·(A|z|)^{K+1}/(K+1)!·e^{A|z|}` drops below `tol`.
    pub fn evaluation_index(&self, modulus: f64, tol: f64) -> usize {
        if let Some(deg) = self.polynomial_degree() {
            return deg.unwrap_or(0);
        }
        let x = self.envelope.a() * modulus;
        let m = self.envelope.m();
        (0..)
            .find(|&k| m * exponential_tail(x, k + 1) < tol)
            .expect("exponential tail eventually drops below any positive tolerance")
    }

    /// Partial sum of the Taylor series at `z`, accurate to `tol` by the envelope tail.
    pub fn eval(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        let modulus = z.norm();
        if !(modulus < self.envelope.radius) {
            return Err(Error::Domain {
                modulus,
                radius: self.envelope.radius,
            });
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        let k_max = self.evaluation_index(modulus, tol);
        let coeffs: Vec<f64> = self.coefficients(k_max).iter().map(rational_to_f64).collect();
        Ok(crate::ratpoly::horner_f64(&coeffs, z))
    }
}

/// `f^{(p)}` with envelope `(M·A^p, A)`, revalidated to [`VALIDATION_DEPTH`].
pub fn derivative_fn(f: &AnalyticFunction, p: usize) -> Result<AnalyticFunction> {
    if p == 0 {
        return Ok(f.clone());
    }
    let env = &f.envelope;
    let m = env.m_exact() * env.a_exact().pow(p as i32);
    let envelope = GrowthEnvelope::new(m, env.a_exact().clone(), env.radius())?;
    let d = AnalyticFunction {
        series: Series::Derivative {
            base: Box::new(f.series.clone()),
            order: p,
        },
        envelope,
        label: format!("d^{p}[{}]", f.label),
        spec: format!("deriv:p={p}:{}", f.spec),
    };
    d.ensure_valid()?;
    Ok(d)
}

/// Smallest `K` whose certified tail
/// `Σ_{k>K} M·A^k/k!·(r^k + (r+2)(k+1)!·r^{k-1}/n)` is below `tol`.
pub fn operator_truncation_index(env: &GrowthEnvelope, r: f64, n: u64, tol: f64) -> Result<usize> {
    let (_, k) = operator_truncation(env, r, n, tol)?;
    Ok(k)
}

/// The certified tail after truncating at `K`, for `K` as returned by [`operator_truncation_index`].
pub fn operator_tail(env: &GrowthEnvelope, r: f64, n: u64, k: usize) -> f64 {
    let u = env.a() * r;
    env.m() * (exponential_tail(u, k + 1) + (r + 2.0) / (n as f64 * r) * linear_geometric_tail(u, k + 1))
}

/// Checks `1 <= r`, `rA < 1` and `n > r + 2`.
pub fn check_operator_hypotheses(env: &GrowthEnvelope, r: f64, n: u64) -> Result<()> {
    if !(r >= 1.0) {
        return Err(Error::hypothesis("r >= 1", r));
    }
    let u = env.a() * r;
    if !(u < 1.0) {
        return Err(Error::divergence("rA < 1", u));
    }
    if !(n as f64 > r + 2.0) {
        return Err(Error::hypothesis("n > r + 2", format!("n = {n}, r = {r}")));
    }
    Ok(())
}

const MAX_TRUNCATION_INDEX: usize = 1_000_000;

fn operator_truncation(env: &GrowthEnvelope, r: f64, n: u64, tol: f64) -> Result<(f64, usize)> {
    check_operator_hypotheses(env, r, n)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let u = env.a() * r;
    let m = env.m();
    let lin = (r + 2.0) / (n as f64 * r);
    // Both tails are decreasing in K; walk the exponential part incrementally.
    let mut exp_head = u.exp(); // u^{K+1}/(K+1)!·e^u at K = -1
    for k in 0..MAX_TRUNCATION_INDEX {
        exp_head *= u / (k as f64 + 1.0);
        let tail = m * (exp_head + lin * linear_geometric_tail(u, k + 1));
        if tail < tol {
            return Ok((tail, k));
        }
    }
    Err(Error::Truncation(format!(
        "operator tail above {tol:e} up to K = {MAX_TRUNCATION_INDEX}"
    )))
}

/// Parses the function mini-format: `exp:a=1/2`, `poly:1,0,3/2`, `deriv:p=2:<inner>`.
///
/// `poly_rate` is the envelope rate `A` given to polynomials.
pub fn parse_function(spec: &str, poly_rate: &BigRational) -> Result<AnalyticFunction> {
    let spec = spec.trim();
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected kind:args, got {spec:?}")))?;
    match kind {
        "exp" => {
            let a = rest
                .strip_prefix("a=")
                .ok_or_else(|| Error::Parse(format!("expected exp:a=<rational>, got {spec:?}")))?;
            make_exponential(parse_rational(a)?)
        }
        "poly" => {
            let coeffs = rest.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
            make_polynomial(coeffs, poly_rate.clone())
        }
        "deriv" => {
            let (order, inner) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected deriv:p=<int>:<fn>, got {spec:?}")))?;
            let p: usize = order
                .strip_prefix("p=")
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad derivative order in {spec:?}")))?;
            derivative_fn(&parse_function(inner, poly_rate)?, p)
        }
        other => Err(Error::Parse(format!("unknown function kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> BigRational {
        ratio(1, 2)
    }

    #[test]
    fn exponential_coefficients() {
        let f = make_exponential(half()).unwrap();
        assert_eq!(f.coeff(0), ratio(1, 1));
        assert_eq!(f.coeff(1), ratio(1, 2));
        assert_eq!(f.coeff(2), ratio(1, 8));
        assert_eq!(f.envelope().m(), 1.0);
        assert_eq!(f.envelope().a(), 0.5);
        assert!(f.envelope().radius() > 2.0);
        assert_eq!(f.label(), "exp(1/2·z)");
        // tight envelope: equality at every k
        for k in 0..20 {
            assert_eq!(f.coeff(k), f.envelope().bound(k));
        }
        assert_eq!(
            f.eval(Complex64::new(0.0, 0.0), 1e-12).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn exponential_rejects_rate_at_least_one() {
        assert!(matches!(make_exponential(ratio(1, 1)), Err(Error::Hypothesis { .. })));
        assert!(make_exponential(ratio(3, 2)).is_err());
        assert!(make_exponential(ratio(0, 1)).is_err());
    }

    #[test]
    fn small_rates_get_a_large_enough_disk() {
        let f = make_exponential(ratio(1, 4)).unwrap();
        assert!(f.envelope().a() * f.envelope().radius() > 1.0);
        let g = make_exponential(ratio(1, 10)).unwrap();
        assert_eq!(g.envelope().radius(), 20.0);
    }

    #[test]
    fn polynomial_constructor() {
        let e1 = make_polynomial(vec![ratio(0, 1), ratio(1, 1)], half()).unwrap();
        assert!(e1.is_polynomial_of_degree_at_most(1));
        assert!(!e1.is_polynomial_of_degree_at_most(0));
        let e2 = make_polynomial(vec![ratio(0, 1), ratio(0, 1), ratio(1, 1)], half()).unwrap();
        assert_eq!(e2.polynomial_degree(), Some(Some(2)));
        // M = 1·2!/(1/2)^2 = 8
        assert_eq!(e2.envelope().m(), 8.0);
        let one = make_polynomial(vec![ratio(1, 1)], half()).unwrap();
        assert_eq!(one.envelope().m(), 1.0);
        let zero = make_polynomial(vec![], half()).unwrap();
        assert_eq!(zero.coeff(3), ratio(0, 1));
        assert_eq!(zero.polynomial_degree(), Some(None));
    }

    #[test]
    fn envelope_validation() {
        let f = make_exponential(half()).unwrap();
        assert!(f.validate_envelope(50).is_valid());
        let tight = GrowthEnvelope::new(ratio(1, 1), ratio(1, 4), 8.0).unwrap();
        let report = f.with_envelope(tight).validate_envelope(50);
        assert!(matches!(report.violation, Some(Error::EnvelopeViolation { k: 1, .. })));
        let e2 = make_polynomial(vec![ratio(0, 1), ratio(0, 1), ratio(1, 1)], half()).unwrap();
        let env = GrowthEnvelope::new(ratio(8, 1), half(), 4.0).unwrap();
        assert!(e2.with_envelope(env).validate_envelope(10).is_valid());
    }

    #[test]
    fn envelope_invariants() {
        assert!(GrowthEnvelope::new(ratio(1, 1), half(), 1.5).is_err());
        assert!(GrowthEnvelope::new(ratio(0, 1), half(), 4.0).is_err());
        assert!(GrowthEnvelope::new(ratio(1, 1), ratio(1, 1), 4.0).is_err());
    }

    #[test]
    fn derivatives() {
        let a = half();
        let f = make_exponential(a.clone()).unwrap();
        let d1 = derivative_fn(&f, 1).unwrap();
        for k in 0..10 {
            assert_eq!(d1.coeff(k), a.pow(k as i32 + 1) / factorial(k));
        }
        assert_eq!(d1.envelope().m(), 0.5);
        let e2 = make_polynomial(vec![ratio(0, 1), ratio(0, 1), ratio(1, 1)], half()).unwrap();
        let d2 = derivative_fn(&e2, 2).unwrap();
        assert_eq!(d2.coeff(0), ratio(2, 1));
        assert_eq!(d2.coeff(1), ratio(0, 1));
        assert_eq!(d2.polynomial_degree(), Some(Some(0)));
        assert_eq!(derivative_fn(&e2, 3).unwrap().polynomial_degree(), Some(None));
        assert_eq!(derivative_fn(&f, 0).unwrap(), f);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let f = make_exponential(half()).unwrap();
        let d = derivative_fn(&f, 1).unwrap();
        let h = 1e-4;
        for z in [Complex64::new(0.3, 0.0), Complex64::new(0.5, 0.2)] {
            let fd = (f.eval(z + h, 1e-15).unwrap() - f.eval(z - h, 1e-15).unwrap()) / (2.0 * h);
            let exact = d.eval(z, 1e-15).unwrap();
            assert!((fd - exact).norm() <= 1e-6 * exact.norm());
        }
    }

    #[test]
    fn evaluation() {
        let f = make_exponential(half()).unwrap();
        let v = f.eval(Complex64::new(1.0, 0.0), 1e-12).unwrap();
        assert!((v.re - 1.648721270700).abs() < 1e-12);
        assert!((v.re - 0.5f64.exp()).abs() < 1e-12);
        let e2 = make_polynomial(vec![ratio(0, 1), ratio(0, 1), ratio(1, 1)], half()).unwrap();
        assert_eq!(
            e2.eval(Complex64::new(0.0, 1.0), 1e-12).unwrap(),
            Complex64::new(-1.0, 0.0)
        );
        assert!(matches!(
            f.eval(Complex64::new(5.0, 0.0), 1e-12),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn evaluation_is_consistent_across_tolerances() {
        let f = make_exponential(ratio(1, 3)).unwrap();
        let r = 0.9 * f.envelope().radius();
        for j in 0..16 {
            let z = Complex64::from_polar(r * (j as f64 + 1.0) / 16.0, 0.7 * j as f64);
            for tol in [1e-6, 1e-9, 1e-12] {
                let a = f.eval(z, tol).unwrap();
                let b = f.eval(z, tol / 100.0).unwrap();
                assert!((a - b).norm() <= tol);
            }
        }
    }

    #[test]
    fn truncation_index_behaviour() {
        let env = make_exponential(half()).unwrap().envelope().clone();
        let k = operator_truncation_index(&env, 1.0, 10, 1e-12).unwrap();
        assert!(k <= 60);
        assert!(operator_tail(&env, 1.0, 10, k) < 1e-12);
        assert!(k == 0 || operator_tail(&env, 1.0, 10, k - 1) >= 1e-12);
        assert!(operator_truncation_index(&env, 1.0, 10, 1e3).unwrap() <= 1);
        let steep = GrowthEnvelope::new(ratio(1, 1), ratio(99, 100), 4.0).unwrap();
        let k = operator_truncation_index(&steep, 1.0, 10, 1e-12).unwrap();
        assert!(k > 1000);
        assert!(matches!(
            operator_truncation_index(&env, 2.0, 10, 1e-12),
            Err(Error::Divergence { .. })
        ));
        assert!(operator_truncation_index(&env, 1.0, 3, 1e-12).is_err());
    }

    #[test]
    fn truncation_index_monotonicity() {
        let env = make_exponential(ratio(2, 5)).unwrap().envelope().clone();
        for n in [5u64, 16, 256] {
            let mut last = usize::MAX;
            for tol in [1e-16, 1e-12, 1e-8, 1e-4, 1.0] {
                let k = operator_truncation_index(&env, 1.0, n, tol).unwrap();
                assert!(k <= last);
                last = k;
            }
            let mut last = 0;
            for r in [1.0, 1.25, 1.5, 2.0, 2.4] {
                let k = operator_truncation_index(&env, r, n, 1e-12).unwrap();
                assert!(k >= last, "n={n} r={r}");
                last = k;
            }
        }
    }

    #[test]
    fn parsing() {
        let r = default_polynomial_rate();
        let f = parse_function("exp:a=1/2", &r).unwrap();
        assert_eq!(f.spec(), "exp:a=1/2");
        let p = parse_function("poly:1,0,3/2", &r).unwrap();
        assert_eq!(p.coeff(2), ratio(3, 2));
        assert_eq!(p.spec(), "poly:1,0,3/2");
        let d = parse_function("deriv:p=2:exp:a=1/2", &r).unwrap();
        assert_eq!(d.coeff(0), ratio(1, 4));
        assert_eq!(d.spec(), "deriv:p=2:exp:a=1/2");
        assert!(parse_function("exp:a=2", &r).is_err());
        assert!(parse_function("sin:a=1", &r).is_err());
        assert!(parse_function("poly:1,x", &r).is_err());
        assert!(parse_function("deriv:q=1:exp:a=1/2", &r).is_err());
        assert_eq!(parse_function("exp:a=0.25", &r).unwrap().spec(), "exp:a=1/4");
    }
}
