//! Jumping spectra of rationally indexed filtrations and their transforms.
//!
//! A spectrum records the indices where a decreasing, discretely and left
//! continuously Q-indexed filtration jumps, together with opaque labels.
//! The transforms here are index arithmetic only: cyclic-cover pullback
//! (per covering character), the specialization index interleaving, the
//! hypersurface-supported shift union, and the t-adic generator criterion.

use crate::model::Slope;
use crate::rat::{format_rat, rat_uint, Rat};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectrumError {
    /// Jump indices must be strictly increasing; position of the offender.
    NotIncreasing { position: usize },
    DimensionMismatch { expected: usize, found: usize },
    /// Covering exponents must be positive.
    ZeroCover { position: usize },
    DirectionOutOfRange { index: usize, r: usize },
}

impl fmt::Display for SpectrumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumError::NotIncreasing { position } => {
                write!(f, "jump indices not strictly increasing at position {position}")
            }
            SpectrumError::DimensionMismatch { expected, found } => {
                write!(f, "expected {expected} covering exponents, found {found}")
            }
            SpectrumError::ZeroCover { position } => {
                write!(f, "covering exponent at position {position} must be positive")
            }
            SpectrumError::DirectionOutOfRange { index, r } => {
                write!(f, "direction {index} out of range for {r} variables")
            }
        }
    }
}

impl std::error::Error for SpectrumError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jump {
    pub index: Rat,
    pub labels: Vec<serde_json::Value>,
}

impl Jump {
    pub fn bare(index: Rat) -> Jump {
        Jump { index, labels: Vec::new() }
    }
}

/// Finite list of strictly increasing jump indices. Modules whose jump set
/// is unbounded are represented by the listed window plus `periodic_above`:
/// above that threshold the jumps repeat with period one and are not
/// enumerated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumpSpectrum {
    jumps: Vec<Jump>,
    periodic_above: Option<Rat>,
}

impl JumpSpectrum {
    pub fn new(jumps: Vec<Jump>) -> Result<JumpSpectrum, SpectrumError> {
        for i in 1..jumps.len() {
            if jumps[i].index <= jumps[i - 1].index {
                return Err(SpectrumError::NotIncreasing { position: i });
            }
        }
        Ok(JumpSpectrum { jumps, periodic_above: None })
    }

    pub fn from_indices(indices: Vec<Rat>) -> Result<JumpSpectrum, SpectrumError> {
        JumpSpectrum::new(indices.into_iter().map(Jump::bare).collect())
    }

    pub fn with_periodic_above(mut self, threshold: Rat) -> JumpSpectrum {
        self.periodic_above = Some(threshold);
        self
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn indices(&self) -> Vec<Rat> {
        self.jumps.iter().map(|j| j.index.clone()).collect()
    }

    pub fn periodic_above(&self) -> Option<&Rat> {
        self.periodic_above.as_ref()
    }

    pub fn jumps_at(&self, index: &Rat) -> bool {
        self.jumps.iter().any(|j| &j.index == index)
    }

    pub fn shift(&self, by: &Rat) -> JumpSpectrum {
        JumpSpectrum {
            jumps: self
                .jumps
                .iter()
                .map(|j| Jump { index: &j.index + by, labels: j.labels.clone() })
                .collect(),
            periodic_above: self.periodic_above.as_ref().map(|t| t + by),
        }
    }

    /// Union of jump sets; coinciding indices keep all labels (duplicates
    /// dropped). The periodicity threshold is the smaller of the two.
    pub fn merge(&self, other: &JumpSpectrum) -> JumpSpectrum {
        let mut jumps: Vec<Jump> = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.jumps.len() || j < other.jumps.len() {
            let take_left = match (self.jumps.get(i), other.jumps.get(j)) {
                (Some(a), Some(b)) => a.index <= b.index,
                (Some(_), None) => true,
                (None, _) => false,
            };
            let next = if take_left {
                i += 1;
                self.jumps[i - 1].clone()
            } else {
                j += 1;
                other.jumps[j - 1].clone()
            };
            match jumps.last_mut() {
                Some(last) if last.index == next.index => {
                    for label in next.labels {
                        if !last.labels.contains(&label) {
                            last.labels.push(label);
                        }
                    }
                }
                _ => jumps.push(next),
            }
        }
        let periodic_above = match (&self.periodic_above, &other.periodic_above) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (Some(a), None) => Some(a.clone()),
            (None, b) => b.clone(),
        };
        JumpSpectrum { jumps, periodic_above }
    }
}

impl fmt::Display for JumpSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.jumps.iter().map(|j| format_rat(&j.index)).collect();
        write!(f, "{{{}}}", list.join(", "))?;
        if let Some(t) = &self.periodic_above {
            write!(f, " (periodic above {})", format_rat(t))?;
        }
        Ok(())
    }
}

/// One spectrum per covering character beta in the box prod [0, a_i - 1],
/// listed in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedJumpSpectrum {
    pub components: Vec<(Vec<u64>, JumpSpectrum)>,
}

impl GradedJumpSpectrum {
    pub fn component(&self, beta: &[u64]) -> Option<&JumpSpectrum> {
        self.components.iter().find(|(b, _)| b == beta).map(|(_, s)| s)
    }

    pub fn flatten(&self) -> JumpSpectrum {
        let empty = JumpSpectrum { jumps: Vec::new(), periodic_above: None };
        self.components.iter().fold(empty, |acc, (_, s)| acc.merge(s))
    }
}

fn box_indices(a: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &bound in a {
        let mut next = Vec::new();
        for prefix in &out {
            for v in 0..bound {
                let mut b = prefix.clone();
                b.push(v);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Pullback of a spectrum under the cyclic cover with exponents `a`: the
/// input is read as the spectrum along the composite slope L with
/// L_i = ell_i * a_i, and the component of character beta jumps at lambda
/// exactly when the input jumps at lambda + |L| - ell(beta) - |ell|.
pub fn cyclic_pullback(
    s: &JumpSpectrum,
    a: &[u64],
    ell: &Slope,
) -> Result<GradedJumpSpectrum, SpectrumError> {
    if a.len() != ell.r() {
        return Err(SpectrumError::DimensionMismatch { expected: ell.r(), found: a.len() });
    }
    if let Some(position) = a.iter().position(|&x| x == 0) {
        return Err(SpectrumError::ZeroCover { position });
    }
    let big_weight: u64 = (0..ell.r()).map(|i| ell.coeff(i) * a[i]).sum();
    let ell_weight = rat_uint(ell.weight());
    let mut components = Vec::new();
    for beta in box_indices(a) {
        let offset = rat_uint(ell.eval(&beta)) + &ell_weight - rat_uint(big_weight);
        components.push((beta, s.shift(&offset)));
    }
    Ok(GradedJumpSpectrum { components })
}

/// The level of the generalized filtration that feeds the u^k graded piece
/// of the specialization deformation at level lambda.
pub fn specialization_index(lambda: &Rat, k: i64, l: &Slope) -> Rat {
    lambda + rat_uint(l.weight()) - Rat::from_integer(k.into()) - Rat::from_integer(1.into())
}

/// Spectrum of a module supported on the hypersurface of the i-th
/// direction: the union of the inner spectrum shifted down by a_i * j for
/// j = 0..=depth.
pub fn supported_spectrum(
    inner: &JumpSpectrum,
    i: usize,
    l: &Slope,
    depth: u32,
) -> Result<JumpSpectrum, SpectrumError> {
    if i >= l.r() {
        return Err(SpectrumError::DirectionOutOfRange { index: i, r: l.r() });
    }
    let a = rat_uint(l.coeff(i));
    let mut out = inner.clone();
    for j in 1..=depth {
        let shift = -(&a * rat_uint(j as u64));
        out = out.merge(&inner.shift(&shift));
    }
    Ok(out)
}

fn multi_indices_by_total(r: usize, cap: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        let mut next = Vec::new();
        for prefix in &out {
            let used: u64 = prefix.iter().sum();
            for v in 0..=(cap - used) {
                let mut b = prefix.clone();
                b.push(v);
                next.push(b);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Monomial generators of the level-lambda piece under the t-adic
/// criterion: all beta with |beta| <= degree_cap and L(beta + 1) >= lambda,
/// in lexicographic order.
pub fn t_adic_generators(l: &Slope, lambda: &Rat, degree_cap: u64) -> Vec<Vec<u64>> {
    multi_indices_by_total(l.r(), degree_cap)
        .into_iter()
        .filter(|beta| {
            let shifted: Vec<u64> = beta.iter().map(|&b| b + 1).collect();
            rat_uint(l.eval(&shifted)) >= *lambda
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn slope(coeffs: &[u64]) -> Slope {
        Slope::new(coeffs.to_vec()).unwrap()
    }

    fn spectrum(indices: &[Rat]) -> JumpSpectrum {
        JumpSpectrum::from_indices(indices.to_vec()).unwrap()
    }

    #[test]
    fn spectrum_requires_strict_increase() {
        let err = JumpSpectrum::from_indices(vec![rat_int(1), rat_int(1)]).unwrap_err();
        assert_eq!(err, SpectrumError::NotIncreasing { position: 1 });
        assert!(JumpSpectrum::from_indices(vec![rat(1, 2), rat_int(1)]).is_ok());
    }

    #[test]
    fn merge_unions_and_keeps_labels() {
        let a = JumpSpectrum::new(vec![Jump {
            index: rat_int(0),
            labels: vec![serde_json::json!("a")],
        }])
        .unwrap();
        let b = JumpSpectrum::new(vec![
            Jump { index: rat_int(0), labels: vec![serde_json::json!("b")] },
            Jump { index: rat_int(2), labels: vec![] },
        ])
        .unwrap();
        let m = a.merge(&b);
        assert_eq!(m.indices(), vec![rat_int(0), rat_int(2)]);
        assert_eq!(m.jumps()[0].labels.len(), 2);
    }

    #[test]
    fn pullback_along_trivial_cover_is_identity() {
        let s = spectrum(&[rat(1, 3), rat_int(2)]);
        let g = cyclic_pullback(&s, &[1, 1], &slope(&[2, 5])).unwrap();
        assert_eq!(g.components.len(), 1);
        assert_eq!(g.components[0].0, vec![0, 0]);
        assert_eq!(g.components[0].1, s);
    }

    #[test]
    fn pullback_two_fold_cover_worked_example() {
        // Single jump at 2 along L = 2 s_1: character 0 jumps at 1,
        // character 1 at 2.
        let s = spectrum(&[rat_int(2)]);
        let g = cyclic_pullback(&s, &[2], &slope(&[1])).unwrap();
        assert_eq!(g.component(&[0]).unwrap().indices(), vec![rat_int(1)]);
        assert_eq!(g.component(&[1]).unwrap().indices(), vec![rat_int(2)]);
    }

    #[test]
    fn pullback_three_fold_cover_worked_example() {
        let s = spectrum(&[rat_int(3)]);
        let g = cyclic_pullback(&s, &[3], &slope(&[1])).unwrap();
        for (beta, expected) in [(0u64, 1i64), (1, 2), (2, 3)] {
            assert_eq!(g.component(&[beta]).unwrap().indices(), vec![rat_int(expected)]);
        }
    }

    #[test]
    fn pullback_composes_over_nested_covers() {
        // Pulling back along a then a' (with the inner cover seen through
        // the slope ell * a') equals pulling back along a * a': both
        // flatten to { mu - ell * j : 0 <= j < a * a' }.
        let s = spectrum(&[rat(5, 2), rat_int(4)]);
        let (a, a2, ell) = (2u64, 3u64, 1u64);
        let direct = cyclic_pullback(&s, &[a * a2], &slope(&[ell])).unwrap().flatten();
        let inner = cyclic_pullback(&s, &[a], &slope(&[ell * a2])).unwrap().flatten();
        let nested = cyclic_pullback(&inner, &[a2], &slope(&[ell])).unwrap().flatten();
        assert_eq!(direct, nested);
        let mut expected: Vec<Rat> = Vec::new();
        for mu in s.indices() {
            for j in 0..(a * a2) {
                let v = &mu - rat_uint(ell * j);
                if !expected.contains(&v) {
                    expected.push(v);
                }
            }
        }
        expected.sort();
        assert_eq!(direct.indices(), expected);
    }

    #[test]
    fn pullback_rejects_bad_covers() {
        let s = spectrum(&[rat_int(0)]);
        assert_eq!(
            cyclic_pullback(&s, &[2], &slope(&[1, 1])).unwrap_err(),
            SpectrumError::DimensionMismatch { expected: 2, found: 1 }
        );
        assert_eq!(
            cyclic_pullback(&s, &[1, 0], &slope(&[1, 1])).unwrap_err(),
            SpectrumError::ZeroCover { position: 1 }
        );
    }

    #[test]
    fn specialization_index_examples() {
        assert_eq!(specialization_index(&rat_int(1), 0, &slope(&[1, 1, 1])), rat_int(3));
        assert_eq!(specialization_index(&rat_int(0), -1, &slope(&[5])), rat_int(5));
        assert_eq!(specialization_index(&rat_int(2), 1, &slope(&[3])), rat_int(3));
    }

    #[test]
    fn specialization_index_shift_identities() {
        let l = slope(&[2, 3]);
        let lambda = rat(7, 4);
        let base = specialization_index(&lambda, 2, &l);
        assert_eq!(
            specialization_index(&(&lambda + rat_int(1)), 2, &l),
            &base + rat_int(1)
        );
        assert_eq!(specialization_index(&lambda, 3, &l), &base - rat_int(1));
    }

    #[test]
    fn supported_spectrum_examples() {
        let l = slope(&[2]);
        let inner = spectrum(&[rat_int(0)]);
        assert_eq!(supported_spectrum(&inner, 0, &l, 0).unwrap(), inner);
        assert_eq!(
            supported_spectrum(&inner, 0, &l, 2).unwrap().indices(),
            vec![rat_int(-4), rat_int(-2), rat_int(0)]
        );
        let inner = spectrum(&[rat(1, 4), rat_int(1)]);
        assert_eq!(
            supported_spectrum(&inner, 0, &slope(&[1]), 1).unwrap().indices(),
            vec![rat(-3, 4), rat_int(0), rat(1, 4), rat_int(1)]
        );
        assert_eq!(
            supported_spectrum(&inner, 3, &slope(&[1]), 0).unwrap_err(),
            SpectrumError::DirectionOutOfRange { index: 3, r: 1 }
        );
    }

    #[test]
    fn supported_spectrum_monotone_in_depth() {
        let l = slope(&[3]);
        let inner = spectrum(&[rat(1, 2), rat(5, 3), rat_int(2)]);
        let mut previous = Vec::new();
        for depth in 0..4 {
            let current = supported_spectrum(&inner, 0, &l, depth).unwrap().indices();
            assert!(previous.iter().all(|i| current.contains(i)), "depth {depth}");
            previous = current;
        }
    }

    #[test]
    fn t_adic_generators_worked_examples() {
        let l = slope(&[2, 3]);
        let got = t_adic_generators(&l, &rat_int(7), 2);
        let expected: Vec<Vec<u64>> =
            vec![vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![2, 0]];
        assert_eq!(got, expected);
        // At or below |L| the zero index generates everything.
        assert!(t_adic_generators(&l, &rat_int(5), 2).contains(&vec![0, 0]));
        assert!(t_adic_generators(&l, &rat(-7, 2), 1).contains(&vec![0, 0]));
        // Just above |L| with unit slope: exactly the indices of degree >= 1.
        let unit = slope(&[1, 1]);
        let got = t_adic_generators(&unit, &rat_int(3), 2);
        assert!(got.iter().all(|b| b.iter().sum::<u64>() >= 1));
        assert_eq!(got.len(), 5);
    }
}
