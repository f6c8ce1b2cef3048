//! Classification of weighted homogeneous complete intersection
//! singularities from the weights and degrees alone: the Du Bois
//! threshold, minimal-exponent bounds, and the liminal/rational verdict,
//! plus the monomial order-bound and Hodge containment criteria feeding
//! them.
//!
//! Everything is integer arithmetic on |w| = sum of weights and
//! |L| = sum of degrees; the isolated-singularity and pure-codimension
//! hypotheses cannot be decided here and are reported as assumed.

use crate::poly::Polynomial;
use crate::rat::{rat_uint, Rat};
use num_bigint::BigInt;
use num_traits::Zero;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WhciError {
    LengthMismatch { what: &'static str, expected: usize, found: usize },
    NonPositive { what: &'static str, position: usize },
    TooManyEquations { r: usize, n: usize },
    Empty { what: &'static str },
    /// Terms of the offending polynomial with their weighted degrees.
    NotHomogeneous { terms: Vec<(Vec<u64>, u64)> },
    DegreeMismatch { index: usize, expected: u64, found: u64 },
}

impl fmt::Display for WhciError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WhciError::LengthMismatch { what, expected, found } => {
                write!(f, "{what}: expected length {expected}, found {found}")
            }
            WhciError::NonPositive { what, position } => {
                write!(f, "{what} at position {position} must be positive")
            }
            WhciError::TooManyEquations { r, n } => {
                write!(f, "{r} equations in {n} variables is not a complete intersection")
            }
            WhciError::Empty { what } => write!(f, "{what} must be nonempty"),
            WhciError::NotHomogeneous { terms } => {
                let list: Vec<String> = terms
                    .iter()
                    .map(|(e, d)| format!("{e:?} of weighted degree {d}"))
                    .collect();
                write!(f, "not weighted homogeneous: terms {}", list.join(", "))
            }
            WhciError::DegreeMismatch { index, expected, found } => write!(
                f,
                "polynomial {index} has weighted degree {found}, declared {expected}"
            ),
        }
    }
}

impl std::error::Error for WhciError {}

fn weighted_degree(exps: &[u64], w: &[u64]) -> u64 {
    exps.iter().zip(w).map(|(e, wi)| e * wi).sum()
}

/// Returns the common weighted degree of all terms, or lists every term
/// with its degree when they disagree.
pub fn check_weighted_homogeneous(f: &Polynomial, w: &[u64]) -> Result<u64, WhciError> {
    if let Some(position) = w.iter().position(|&x| x == 0) {
        return Err(WhciError::NonPositive { what: "weights", position });
    }
    if f.variables().len() != w.len() {
        return Err(WhciError::LengthMismatch {
            what: "weights",
            expected: f.variables().len(),
            found: w.len(),
        });
    }
    let degrees: Vec<(Vec<u64>, u64)> = f
        .terms()
        .keys()
        .map(|exps| (exps.clone(), weighted_degree(exps, w)))
        .collect();
    match degrees.first() {
        None => Err(WhciError::Empty { what: "polynomial" }),
        Some((_, d)) if degrees.iter().all(|(_, di)| di == d) => Ok(*d),
        _ => Err(WhciError::NotHomogeneous { terms: degrees }),
    }
}

fn check_positive(what: &'static str, values: &[u64]) -> Result<(), WhciError> {
    if values.is_empty() {
        return Err(WhciError::Empty { what });
    }
    match values.iter().position(|&x| x == 0) {
        Some(position) => Err(WhciError::NonPositive { what, position }),
        None => Ok(()),
    }
}

/// Order bound for the monomial class x^alpha del_t^beta: the level
/// min(|L|, |w| + w . alpha - L(beta)) along the slope L = sum d_i s_i.
pub fn element_order_bound(
    alpha: &[u64],
    beta: &[u64],
    w: &[u64],
    d: &[u64],
) -> Result<Rat, WhciError> {
    check_positive("weights", w)?;
    check_positive("degrees", d)?;
    if alpha.len() != w.len() {
        return Err(WhciError::LengthMismatch {
            what: "exponent vector",
            expected: w.len(),
            found: alpha.len(),
        });
    }
    if beta.len() != d.len() {
        return Err(WhciError::LengthMismatch {
            what: "multi-index",
            expected: d.len(),
            found: beta.len(),
        });
    }
    let big = |v: &[u64]| -> BigInt { v.iter().map(|&x| BigInt::from(x)).sum() };
    let dot = |a: &[u64], b: &[u64]| -> BigInt {
        a.iter().zip(b).map(|(&x, &y)| BigInt::from(x) * BigInt::from(y)).sum()
    };
    let slope_weight = big(d);
    let value = big(w) + dot(w, alpha) - dot(d, beta);
    Ok(Rat::from_integer(value.min(slope_weight)))
}

/// Whether the k-th Hodge piece lands inside the top filtration level:
/// true exactly when |w| - sum d_i >= k * d_r.
pub fn hodge_containment(k: u64, w: &[u64], d: &[u64]) -> Result<bool, WhciError> {
    check_positive("weights", w)?;
    check_positive("degrees", d)?;
    let slack: BigInt = w.iter().map(|&x| BigInt::from(x)).sum::<BigInt>()
        - d.iter().map(|&x| BigInt::from(x)).sum::<BigInt>();
    let d_max = d.iter().max().copied().expect("nonempty");
    Ok(slack >= BigInt::from(k) * BigInt::from(d_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NotDuBois,
    KLiminal(u64),
    KRational(u64),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NotDuBois => write!(f, "NotDuBois"),
            Verdict::KLiminal(k) => write!(f, "kLiminal({k})"),
            Verdict::KRational(k) => write!(f, "kRational({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub du_bois: bool,
    pub k: Option<u64>,
    pub lower_bound: Option<Rat>,
    pub upper_bound: Option<Rat>,
    /// Present exactly when the largest degree divides |w| - sum d_i.
    pub exact_minexp: Option<Rat>,
    pub verdict: Verdict,
    pub hypotheses_assumed: Vec<String>,
}

pub fn hypotheses_banner() -> Vec<String> {
    vec![
        "isolated singularity at the origin (not verified)".to_string(),
        "complete intersection of pure codimension r (not verified)".to_string(),
    ]
}

#[derive(Debug, Clone)]
pub struct WhciInput {
    pub weights: Vec<u64>,
    pub degrees: Vec<u64>,
    pub polynomials: Option<Vec<Polynomial>>,
}

/// Classifies the singularity cut out by r weighted homogeneous equations
/// of the given degrees. Degrees are sorted ascending (polynomials, when
/// supplied, travel with their declared degree and must match it exactly).
pub fn classify(input: &WhciInput) -> Result<ClassificationReport, WhciError> {
    check_positive("weights", &input.weights)?;
    check_positive("degrees", &input.degrees)?;
    let n = input.weights.len();
    let r = input.degrees.len();
    if r > n {
        return Err(WhciError::TooManyEquations { r, n });
    }
    let mut degrees = input.degrees.clone();
    if let Some(polys) = &input.polynomials {
        if polys.len() != r {
            return Err(WhciError::LengthMismatch {
                what: "polynomials",
                expected: r,
                found: polys.len(),
            });
        }
        for (index, (f, &declared)) in polys.iter().zip(&input.degrees).enumerate() {
            let found = check_weighted_homogeneous(f, &input.weights)?;
            if found != declared {
                return Err(WhciError::DegreeMismatch { index, expected: declared, found });
            }
        }
    }
    degrees.sort_unstable();
    let w_total: BigInt = input.weights.iter().map(|&x| BigInt::from(x)).sum();
    let d_total: BigInt = degrees.iter().map(|&x| BigInt::from(x)).sum();
    let d_max = *degrees.last().expect("nonempty");
    if w_total < d_total {
        return Ok(ClassificationReport {
            du_bois: false,
            k: None,
            lower_bound: None,
            upper_bound: None,
            exact_minexp: None,
            verdict: Verdict::NotDuBois,
            hypotheses_assumed: hypotheses_banner(),
        });
    }
    let slack = w_total - d_total;
    let k_big = &slack / BigInt::from(d_max);
    let k = u64::try_from(&k_big).expect("slack / d_max fits after positivity checks");
    let lower = rat_uint(r as u64) + rat_uint(k);
    let upper = rat_uint(r as u64) + Rat::new(slack.clone(), BigInt::from(d_max));
    let divisible = (&slack % BigInt::from(d_max)).is_zero();
    Ok(ClassificationReport {
        du_bois: true,
        k: Some(k),
        lower_bound: Some(lower.clone()),
        upper_bound: Some(upper),
        exact_minexp: divisible.then(|| lower.clone()),
        verdict: if divisible { Verdict::KLiminal(k) } else { Verdict::KRational(k) },
        hypotheses_assumed: hypotheses_banner(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn classify_wd(w: &[u64], d: &[u64]) -> ClassificationReport {
        classify(&WhciInput { weights: w.to_vec(), degrees: d.to_vec(), polynomials: None })
            .unwrap()
    }

    #[test]
    fn quadric_cone() {
        let report = classify_wd(&[1, 1, 1], &[2]);
        assert!(report.du_bois);
        assert_eq!(report.verdict, Verdict::KRational(0));
        assert_eq!(report.lower_bound, Some(rat_int(1)));
        assert_eq!(report.upper_bound, Some(rat(3, 2)));
        assert_eq!(report.exact_minexp, None);
    }

    #[test]
    fn cusp_is_not_du_bois() {
        let report = classify_wd(&[3, 2], &[6]);
        assert!(!report.du_bois);
        assert_eq!(report.verdict, Verdict::NotDuBois);
        assert_eq!(report.k, None);
        assert_eq!(report.lower_bound, None);
    }

    #[test]
    fn quadric_pencil_is_liminal() {
        let report = classify_wd(&[1, 1, 1, 1], &[2, 2]);
        assert_eq!(report.verdict, Verdict::KLiminal(0));
        assert_eq!(report.exact_minexp, Some(rat_int(2)));
        assert_eq!(report.lower_bound, report.upper_bound);
    }

    #[test]
    fn exceptional_surface_bounds() {
        let report = classify_wd(&[15, 10, 6], &[30]);
        assert_eq!(report.verdict, Verdict::KRational(0));
        assert_eq!(report.lower_bound, Some(rat_int(1)));
        assert_eq!(report.upper_bound, Some(rat(31, 30)));
    }

    #[test]
    fn classify_checks_supplied_polynomials() {
        let f = Polynomial::parse("x^2 + y^3", &vars(&["x", "y"])).unwrap();
        let ok = classify(&WhciInput {
            weights: vec![3, 2],
            degrees: vec![6],
            polynomials: Some(vec![f.clone()]),
        })
        .unwrap();
        assert_eq!(ok.verdict, Verdict::NotDuBois);
        let err = classify(&WhciInput {
            weights: vec![3, 2],
            degrees: vec![5],
            polynomials: Some(vec![f.clone()]),
        })
        .unwrap_err();
        assert_eq!(err, WhciError::DegreeMismatch { index: 0, expected: 5, found: 6 });
        let err = classify(&WhciInput {
            weights: vec![1, 1],
            degrees: vec![6],
            polynomials: Some(vec![f]),
        })
        .unwrap_err();
        assert!(matches!(err, WhciError::NotHomogeneous { .. }));
    }

    #[test]
    fn homogeneity_checker_reports_degrees() {
        let f = Polynomial::parse("x^2 + y^3", &vars(&["x", "y"])).unwrap();
        assert_eq!(check_weighted_homogeneous(&f, &[3, 2]).unwrap(), 6);
        assert_eq!(check_weighted_homogeneous(&f, &[1, 1]).unwrap_err(), {
            WhciError::NotHomogeneous { terms: vec![(vec![0, 3], 3), (vec![2, 0], 2)] }
        });
        let sphere = Polynomial::parse("x^2 + y^2 + z^2", &vars(&["x", "y", "z"])).unwrap();
        assert_eq!(check_weighted_homogeneous(&sphere, &[1, 1, 1]).unwrap(), 2);
    }

    #[test]
    fn order_bound_examples() {
        let w = [1, 1, 1];
        let d = [2];
        assert_eq!(element_order_bound(&[0, 0, 0], &[0], &w, &d).unwrap(), rat_int(2));
        assert_eq!(element_order_bound(&[0, 0, 0], &[2], &w, &d).unwrap(), rat_int(-1));
        assert_eq!(element_order_bound(&[1, 0, 0], &[1], &w, &d).unwrap(), rat_int(2));
        assert_eq!(
            element_order_bound(&[0], &[0], &w, &d).unwrap_err(),
            WhciError::LengthMismatch { what: "exponent vector", expected: 3, found: 1 }
        );
    }

    #[test]
    fn order_bound_saturates_exactly_when_slack_covers_beta() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..200 {
            let n = rng.gen_range(1..=4);
            let r = rng.gen_range(1..=n);
            let w: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
            let d: Vec<u64> = (0..r).map(|_| rng.gen_range(1..=9)).collect();
            let beta: Vec<u64> = (0..r).map(|_| rng.gen_range(0..=3)).collect();
            let zero = vec![0u64; n];
            let bound = element_order_bound(&zero, &beta, &w, &d).unwrap();
            let w_total: u64 = w.iter().sum();
            let l_total: u64 = d.iter().sum();
            let l_beta: u64 = d.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let saturated = bound == rat_uint(l_total);
            assert_eq!(saturated, w_total >= l_total + l_beta, "w={w:?} d={d:?} beta={beta:?}");
        }
    }

    #[test]
    fn containment_is_a_step_function_matching_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(181);
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let r = rng.gen_range(1..=n);
            let w: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=10)).collect();
            let d: Vec<u64> = (0..r).map(|_| rng.gen_range(1..=10)).collect();
            let report =
                classify(&WhciInput { weights: w.clone(), degrees: d.clone(), polynomials: None })
                    .unwrap();
            if let Some(k) = report.k {
                for kk in 0..=(k + 2) {
                    assert_eq!(
                        hodge_containment(kk, &w, &d).unwrap(),
                        kk <= k,
                        "w={w:?} d={d:?} k={k} kk={kk}"
                    );
                }
            } else {
                assert!(!hodge_containment(0, &w, &d).unwrap());
            }
        }
    }

    #[test]
    fn verdict_is_scale_invariant_and_bounds_are_ordered() {
        let mut rng = ChaCha8Rng::seed_from_u64(271);
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let r = rng.gen_range(1..=n);
            let w: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=10)).collect();
            let d: Vec<u64> = (0..r).map(|_| rng.gen_range(1..=10)).collect();
            let c = rng.gen_range(1..=4u64);
            let report = classify_wd(&w, &d);
            let scaled = classify_wd(
                &w.iter().map(|&x| x * c).collect::<Vec<_>>(),
                &d.iter().map(|&x| x * c).collect::<Vec<_>>(),
            );
            assert_eq!(report.verdict, scaled.verdict, "w={w:?} d={d:?} c={c}");
            if report.du_bois {
                let (lo, hi) = (report.lower_bound.unwrap(), report.upper_bound.unwrap());
                assert!(lo <= hi);
                assert_eq!(lo == hi, report.exact_minexp.is_some());
            }
        }
    }

    #[test]
    fn input_validation() {
        assert_eq!(
            classify(&WhciInput { weights: vec![], degrees: vec![2], polynomials: None })
                .unwrap_err(),
            WhciError::Empty { what: "weights" }
        );
        assert_eq!(
            classify(&WhciInput { weights: vec![1, 0], degrees: vec![2], polynomials: None })
                .unwrap_err(),
            WhciError::NonPositive { what: "weights", position: 1 }
        );
        assert_eq!(
            classify(&WhciInput { weights: vec![1], degrees: vec![2, 2], polynomials: None })
                .unwrap_err(),
            WhciError::TooManyEquations { r: 2, n: 1 }
        );
    }

    #[test]
    fn degrees_sort_with_their_polynomials() {
        // Declared out of order: the pairing happens before sorting, so
        // each polynomial is checked against its own declared degree.
        let f6 = Polynomial::parse("x^2 + y^3", &vars(&["x", "y"])).unwrap();
        let f12 = Polynomial::parse("x^4 + y^6", &vars(&["x", "y"])).unwrap();
        let report = classify(&WhciInput {
            weights: vec![3, 2],
            degrees: vec![12, 6],
            polynomials: Some(vec![f12, f6]),
        })
        .unwrap();
        // |w| = 5 < 18: not Du Bois, but the pairing must not error.
        assert_eq!(report.verdict, Verdict::NotDuBois);
    }
}
