//! Subspaces of Q^n and integer-indexed flags.
//!
//! A `Subspace` stores the reduced-echelon basis of its span, so equality of
//! subspaces is equality of the stored rows. A `Flag` is an increasing,
//! exhaustive-from-below family of subspaces declared at finitely many
//! integer indices; between declared indices it is constant, below the
//! lowest declared index it is zero, and above the highest it equals the
//! highest step.
//!
//! The `induced_dim` and `induced_rank` helpers compute dimensions and ranks
//! in subquotients without ever constructing quotient spaces explicitly;
//! everything reduces to ranks of sums of echelon bases.

use crate::linalg::{rref, QMat};
use crate::rat::Rat;
use num_traits::Zero;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubspaceError {
    AmbientMismatch { left: usize, right: usize },
}

impl fmt::Display for SubspaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubspaceError::AmbientMismatch { left, right } => {
                write!(f, "ambient dimensions differ: {left} vs {right}")
            }
        }
    }
}

impl std::error::Error for SubspaceError {}

#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rat>>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in Q^{})", self.dim(), self.ambient)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Subspace {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Subspace {
        Subspace::from_vectors(ambient, QMat::identity(ambient).rows_vec())
    }

    /// Span of the given vectors, stored as a canonical basis.
    pub fn from_vectors(ambient: usize, vectors: Vec<Vec<Rat>>) -> Subspace {
        assert!(vectors.iter().all(|v| v.len() == ambient), "vector length mismatch");
        Subspace { ambient, basis: rref(&vectors, ambient).mat }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), SubspaceError> {
        if self.ambient != other.ambient {
            return Err(SubspaceError::AmbientMismatch { left: self.ambient, right: other.ambient });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, SubspaceError> {
        self.check_ambient(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Ok(Subspace::from_vectors(self.ambient, rows))
    }

    /// Zassenhaus intersection: reduce the block matrix [A|A; B|0]; rows
    /// whose left half vanishes carry an intersection basis on the right.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, SubspaceError> {
        self.check_ambient(other)?;
        let n = self.ambient;
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for v in &self.basis {
            let mut row = v.clone();
            row.extend(v.iter().cloned());
            rows.push(row);
        }
        for v in &other.basis {
            let mut row = v.clone();
            row.extend(std::iter::repeat_n(Rat::zero(), n));
            rows.push(row);
        }
        let red = rref(&rows, 2 * n);
        let vectors: Vec<Vec<Rat>> = red
            .mat
            .into_iter()
            .filter(|row| row[..n].iter().all(Rat::is_zero))
            .map(|row| row[n..].to_vec())
            .collect();
        Ok(Subspace::from_vectors(n, vectors))
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let mut w = v.to_vec();
        for row in &self.basis {
            let lead = row.iter().position(|x| !x.is_zero()).expect("basis rows are nonzero");
            let c = w[lead].clone();
            if c.is_zero() {
                continue;
            }
            for (a, b) in w.iter_mut().zip(row) {
                *a = &*a - &c * b;
            }
        }
        w.iter().all(Rat::is_zero)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool, SubspaceError> {
        self.check_ambient(other)?;
        Ok(self.basis.iter().all(|v| other.contains(v)))
    }

    /// dim((self + other) / other).
    pub fn quotient_dim(&self, other: &Subspace) -> Result<usize, SubspaceError> {
        Ok(self.sum(other)?.dim() - other.dim())
    }

    /// Rows spanning the annihilator: self = {x : E x = 0}.
    pub fn equations(&self) -> QMat {
        let b = QMat::from_rows_with_cols(self.basis.clone(), self.ambient);
        QMat::from_rows_with_cols(b.kernel(), self.ambient)
    }

    /// Image of self under the linear map `m` (acting on columns).
    pub fn image_under(&self, m: &QMat) -> Subspace {
        assert_eq!(m.ncols(), self.ambient, "map domain mismatch");
        let vectors: Vec<Vec<Rat>> = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        Subspace::from_vectors(m.nrows(), vectors)
    }

    /// {x : m x is in target}.
    pub fn preimage_under(m: &QMat, target: &Subspace) -> Subspace {
        assert_eq!(m.nrows(), target.ambient, "map codomain mismatch");
        let e = target.equations();
        let em = &e * m;
        Subspace::from_vectors(m.ncols(), em.kernel())
    }

    /// Coefficients of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coordinates_of(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        if self.basis.is_empty() {
            return if v.iter().all(Rat::is_zero) { Some(Vec::new()) } else { None };
        }
        let bt = QMat::from_rows(self.basis.clone()).transpose();
        bt.solve(v)
    }

    /// The ambient vector with the given coefficients in the stored basis.
    pub fn vector_from_coords(&self, coords: &[Rat]) -> Vec<Rat> {
        assert_eq!(coords.len(), self.dim(), "coordinate length mismatch");
        let mut out = vec![Rat::zero(); self.ambient];
        for (c, row) in coords.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(row) {
                *o = &*o + c * x;
            }
        }
        out
    }

    /// Matrix of `m` restricted to this subspace, in the stored basis.
    /// Returns None when `m` does not map the subspace into itself.
    pub fn restriction_of(&self, m: &QMat) -> Option<QMat> {
        let k = self.dim();
        let mut r = QMat::zero(k, k);
        for (j, v) in self.basis.iter().enumerate() {
            let coords = self.coordinates_of(&m.mul_vec(v))?;
            for (i, c) in coords.into_iter().enumerate() {
                r.set(i, j, c);
            }
        }
        Some(r)
    }

    /// Re-expresses a subspace of `self` (given in ambient coordinates) in
    /// the coordinates of the stored basis.
    pub fn coordinates_of_subspace(&self, sub: &Subspace) -> Option<Subspace> {
        let mut vectors = Vec::new();
        for v in &sub.basis {
            vectors.push(self.coordinates_of(v)?);
        }
        Some(Subspace::from_vectors(self.dim(), vectors))
    }

    /// Embeds into a larger ambient space at the given coordinate offset.
    pub fn embed(&self, offset: usize, total: usize) -> Subspace {
        assert!(offset + self.ambient <= total, "embedding out of range");
        let vectors: Vec<Vec<Rat>> = self
            .basis
            .iter()
            .map(|v| {
                let mut w = vec![Rat::zero(); total];
                w[offset..offset + self.ambient].clone_from_slice(v);
                w
            })
            .collect();
        Subspace::from_vectors(total, vectors)
    }
}

/// dim of the image of `a` in the subquotient `b / c`, that is
/// dim(((a intersect b) + c) / c). Requires c to be a subspace of b for the
/// usual reading, but the formula is computed as stated either way.
pub fn induced_dim(a: &Subspace, b: &Subspace, c: &Subspace) -> Result<usize, SubspaceError> {
    let meet = a.intersect(b)?;
    meet.quotient_dim(c)
}

/// Rank of the map (s_top / s_bot) -> (t_top / t_bot) induced by `m`.
/// The caller must ensure m maps s_top into t_top and s_bot into t_bot.
pub fn induced_rank(
    m: &QMat,
    s_top: &Subspace,
    s_bot: &Subspace,
    t_top: &Subspace,
    t_bot: &Subspace,
) -> Result<usize, SubspaceError> {
    debug_assert!(s_top.image_under(m).is_subspace_of(t_top).unwrap_or(false));
    debug_assert!(s_bot.image_under(m).is_subspace_of(t_bot).unwrap_or(false));
    s_top.image_under(m).quotient_dim(t_bot)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlagError {
    AmbientMismatch { left: usize, right: usize },
    DuplicateIndex { index: i64 },
    NotNested { lower: i64, upper: i64 },
}

impl fmt::Display for FlagError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlagError::AmbientMismatch { left, right } => {
                write!(f, "flag steps live in different ambients: {left} vs {right}")
            }
            FlagError::DuplicateIndex { index } => write!(f, "duplicate flag index {index}"),
            FlagError::NotNested { lower, upper } => {
                write!(f, "flag step at {lower} is not contained in step at {upper}")
            }
        }
    }
}

impl std::error::Error for FlagError {}

#[derive(Clone, PartialEq, Eq)]
pub struct Flag {
    ambient: usize,
    steps: Vec<(i64, Subspace)>,
}

impl fmt::Debug for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.steps.iter().map(|(k, s)| format!("{k}: dim {}", s.dim())).collect();
        write!(f, "Flag in Q^{} {{{}}}", self.ambient, parts.join(", "))
    }
}

impl Flag {
    /// Builds from declared steps; sorts by index and checks nesting.
    pub fn from_steps(ambient: usize, mut steps: Vec<(i64, Subspace)>) -> Result<Flag, FlagError> {
        for (_, s) in &steps {
            if s.ambient_dim() != ambient {
                return Err(FlagError::AmbientMismatch { left: s.ambient_dim(), right: ambient });
            }
        }
        steps.sort_by_key(|(k, _)| *k);
        for w in steps.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(FlagError::DuplicateIndex { index: w[0].0 });
            }
            if !w[0].1.is_subspace_of(&w[1].1).expect("same ambient") {
                return Err(FlagError::NotNested { lower: w[0].0, upper: w[1].0 });
            }
        }
        Ok(Flag { ambient, steps })
    }

    /// Single jump: zero below `k`, the full space from `k` on.
    pub fn single_jump(ambient: usize, k: i64) -> Flag {
        Flag { ambient, steps: vec![(k, Subspace::full(ambient))] }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn steps(&self) -> &[(i64, Subspace)] {
        &self.steps
    }

    /// Step at index `k`: the highest declared step with index <= k, or zero.
    pub fn at(&self, k: i64) -> Subspace {
        let mut current = Subspace::zero(self.ambient);
        for (idx, s) in &self.steps {
            if *idx > k {
                break;
            }
            current = s.clone();
        }
        current
    }

    pub fn bottom_index(&self) -> Option<i64> {
        self.steps.first().map(|(k, _)| *k)
    }

    pub fn top_index(&self) -> Option<i64> {
        self.steps.last().map(|(k, _)| *k)
    }

    pub fn top(&self) -> Subspace {
        self.steps.last().map_or_else(|| Subspace::zero(self.ambient), |(_, s)| s.clone())
    }

    /// True when the highest step is the whole ambient space.
    pub fn is_exhaustive(&self) -> bool {
        self.top().is_full() || self.ambient == 0
    }

    pub fn graded_dim(&self, k: i64) -> usize {
        self.at(k).dim() - self.at(k - 1).dim()
    }

    /// Indices where the dimension actually increases.
    pub fn jumps(&self) -> Vec<i64> {
        self.steps.iter().map(|(k, _)| *k).filter(|&k| self.graded_dim(k) > 0).collect()
    }

    pub fn shift(&self, c: i64) -> Flag {
        Flag { ambient: self.ambient, steps: self.steps.iter().map(|(k, s)| (k + c, s.clone())).collect() }
    }

    /// Transports the flag through an invertible change of coordinates.
    pub fn map_through(&self, p: &QMat) -> Flag {
        assert_eq!(p.ncols(), self.ambient, "map domain mismatch");
        Flag {
            ambient: p.nrows(),
            steps: self.steps.iter().map(|(k, s)| (*k, s.image_under(p))).collect(),
        }
    }

    /// Intersects every step with `sub` and rewrites it in sub-coordinates.
    /// Returns None when some intersection fails to sit inside `sub`, which
    /// cannot happen for genuine subspaces.
    pub fn restrict_to(&self, sub: &Subspace) -> Option<Flag> {
        let mut steps = Vec::new();
        for (k, s) in &self.steps {
            let meet = s.intersect(sub).ok()?;
            steps.push((*k, sub.coordinates_of_subspace(&meet)?));
        }
        Some(Flag { ambient: sub.dim(), steps })
    }

    /// Interprets a flag in sub-coordinates back inside the ambient space.
    pub fn unrestrict_from(&self, sub: &Subspace) -> Flag {
        assert_eq!(self.ambient, sub.dim(), "coordinate count mismatch");
        let steps = self
            .steps
            .iter()
            .map(|(k, s)| {
                let vectors: Vec<Vec<Rat>> =
                    s.basis().iter().map(|v| sub.vector_from_coords(v)).collect();
                (*k, Subspace::from_vectors(sub.ambient_dim(), vectors))
            })
            .collect();
        Flag { ambient: sub.ambient_dim(), steps }
    }

    /// Block direct sum of flags placed at coordinate offsets inside a
    /// common ambient space. Steps are declared at the union of indices.
    pub fn stack(parts: &[(usize, &Flag)], total: usize) -> Flag {
        let mut indices: Vec<i64> = parts
            .iter()
            .flat_map(|(_, f)| f.steps.iter().map(|(k, _)| *k))
            .collect();
        indices.sort_unstable();
        indices.dedup();
        let steps = indices
            .into_iter()
            .map(|k| {
                let mut vectors = Vec::new();
                for (offset, f) in parts {
                    vectors.extend(f.at(k).embed(*offset, total).basis().to_vec());
                }
                (k, Subspace::from_vectors(total, vectors))
            })
            .collect();
        Flag { ambient: total, steps }
    }
}

/// A flag together with the integer it is centered at, for weight
/// filtrations of nilpotent operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenteredFlag {
    pub flag: Flag,
    pub center: i64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vecs(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect()
    }

    fn random_subspace(rng: &mut ChaCha8Rng, ambient: usize) -> Subspace {
        let k = rng.gen_range(0..=ambient);
        let vectors: Vec<Vec<Rat>> = (0..k)
            .map(|_| (0..ambient).map(|_| rat(rng.gen_range(-3..=3), 1)).collect())
            .collect();
        Subspace::from_vectors(ambient, vectors)
    }

    /// Independent dimension oracle: the dimension of a sum is the rank of
    /// the stacked bases, computed through the matrix layer directly.
    fn sum_dim_by_stacking(a: &Subspace, b: &Subspace) -> usize {
        let mut rows = a.basis().to_vec();
        rows.extend(b.basis().to_vec());
        QMat::from_rows_with_cols(rows, a.ambient_dim()).rank()
    }

    #[test]
    fn sum_matches_stacked_rank_oracle() {
        let a = Subspace::from_vectors(3, vecs(&[&[1, 0, 0], &[0, 1, 0]]));
        let b = Subspace::from_vectors(3, vecs(&[&[1, 1, 0], &[0, 0, 1]]));
        assert_eq!(sum_dim_by_stacking(&a, &b), 3);
        assert_eq!(a.sum(&b).unwrap().dim(), 3);

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let n = rng.gen_range(1..=5);
            let a = random_subspace(&mut rng, n);
            let b = random_subspace(&mut rng, n);
            assert_eq!(a.sum(&b).unwrap().dim(), sum_dim_by_stacking(&a, &b));
        }
    }

    #[test]
    fn intersection_dimension_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let n = rng.gen_range(1..=5);
            let a = random_subspace(&mut rng, n);
            let b = random_subspace(&mut rng, n);
            let meet = a.intersect(&b).unwrap();
            let join = a.sum(&b).unwrap();
            assert_eq!(meet.dim() + join.dim(), a.dim() + b.dim());
            assert!(meet.is_subspace_of(&a).unwrap());
            assert!(meet.is_subspace_of(&b).unwrap());
        }
    }

    #[test]
    fn intersection_worked_example() {
        let a = Subspace::from_vectors(3, vecs(&[&[1, 0, 0], &[0, 1, 0]]));
        let b = Subspace::from_vectors(3, vecs(&[&[0, 1, 0], &[0, 0, 1]]));
        let expected = Subspace::from_vectors(3, vecs(&[&[0, 1, 0]]));
        assert_eq!(a.intersect(&b).unwrap(), expected);
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = Subspace::full(2);
        let b = Subspace::full(3);
        assert_eq!(
            a.sum(&b).unwrap_err(),
            SubspaceError::AmbientMismatch { left: 2, right: 3 }
        );
        assert!(a.intersect(&b).is_err());
    }

    #[test]
    fn equations_cut_out_the_subspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..40 {
            let n = rng.gen_range(1..=5);
            let s = random_subspace(&mut rng, n);
            let e = s.equations();
            assert_eq!(e.nrows(), n - s.dim());
            for v in s.basis() {
                assert!(e.mul_vec(v).iter().all(Rat::is_zero));
            }
            let cut = Subspace::from_vectors(n, e.kernel());
            assert_eq!(cut, s);
        }
    }

    #[test]
    fn preimage_and_image_adjunction() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..40 {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=4);
            let a = QMat::from_fn(m, n, |_, _| rat(rng.gen_range(-3..=3), 1));
            let t = random_subspace(&mut rng, m);
            let pre = Subspace::preimage_under(&a, &t);
            assert!(pre.image_under(&a).is_subspace_of(&t).unwrap());
            // The preimage is the largest such subspace: adding any vector
            // outside it must leave the target.
            for v in Subspace::full(n).basis() {
                if !pre.contains(v) {
                    assert!(!t.contains(&a.mul_vec(v)));
                }
            }
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..40 {
            let n = rng.gen_range(1..=5);
            let s = random_subspace(&mut rng, n);
            for v in s.basis() {
                let c = s.coordinates_of(v).expect("basis vectors lie in the span");
                assert_eq!(s.vector_from_coords(&c), *v);
            }
        }
    }

    #[test]
    fn flag_nesting_is_enforced() {
        let a = Subspace::from_vectors(2, vecs(&[&[1, 0]]));
        let b = Subspace::from_vectors(2, vecs(&[&[0, 1]]));
        let err = Flag::from_steps(2, vec![(0, a), (1, b)]).unwrap_err();
        assert_eq!(err, FlagError::NotNested { lower: 0, upper: 1 });
    }

    #[test]
    fn flag_at_clamps_and_jumps() {
        let a = Subspace::from_vectors(3, vecs(&[&[1, 0, 0]]));
        let b = Subspace::from_vectors(3, vecs(&[&[1, 0, 0], &[0, 1, 0]]));
        let f = Flag::from_steps(3, vec![(-1, a.clone()), (2, b.clone()), (3, Subspace::full(3))])
            .unwrap();
        assert!(f.at(-2).is_zero());
        assert_eq!(f.at(-1), a);
        assert_eq!(f.at(0), a);
        assert_eq!(f.at(2), b);
        assert_eq!(f.at(10), Subspace::full(3));
        assert_eq!(f.jumps(), vec![-1, 2, 3]);
        assert_eq!(f.graded_dim(0), 0);
        assert_eq!(f.graded_dim(2), 1);
        assert!(f.is_exhaustive());
    }

    #[test]
    fn stacked_flags_add_graded_dimensions() {
        let f = Flag::single_jump(2, 0);
        let g = Flag::from_steps(
            1,
            vec![(-1, Subspace::zero(1)), (1, Subspace::full(1))],
        )
        .unwrap();
        let s = Flag::stack(&[(0, &f), (2, &g)], 3);
        assert_eq!(s.graded_dim(0), 2);
        assert_eq!(s.graded_dim(1), 1);
        assert_eq!(s.at(0).dim(), 2);
        assert!(s.is_exhaustive());
    }

    #[test]
    fn restrict_then_unrestrict_round_trips() {
        let sub = Subspace::from_vectors(3, vecs(&[&[1, 0, 1], &[0, 1, 0]]));
        let inner = Subspace::from_vectors(3, vecs(&[&[1, 1, 1]]));
        let f = Flag::from_steps(3, vec![(0, inner), (1, sub.clone())]).unwrap();
        let r = f.restrict_to(&sub).unwrap();
        assert_eq!(r.at(0).dim(), 1);
        assert_eq!(r.at(1).dim(), 2);
        let back = r.unrestrict_from(&sub);
        for k in [-1, 0, 1, 2] {
            assert_eq!(back.at(k), f.at(k));
        }
    }

    #[test]
    fn induced_dim_matches_quotients() {
        // a = plane, b = full, c = line inside a: image of a in b/c has dim 1.
        let a = Subspace::from_vectors(3, vecs(&[&[1, 0, 0], &[0, 1, 0]]));
        let b = Subspace::full(3);
        let c = Subspace::from_vectors(3, vecs(&[&[1, 0, 0]]));
        assert_eq!(induced_dim(&a, &b, &c).unwrap(), 1);
        assert_eq!(induced_dim(&c, &a, &c).unwrap(), 0);
    }

    #[test]
    fn induced_rank_on_a_jordan_block() {
        // N on Q^2 sending e2 to e1; S = full/0, T = full/(e1): rank 1.
        let n = QMat::from_rows(vecs(&[&[0, 1], &[0, 0]]));
        let full = Subspace::full(2);
        let zero = Subspace::zero(2);
        let line = Subspace::from_vectors(2, vecs(&[&[1, 0]]));
        assert_eq!(induced_rank(&n, &full, &zero, &full, &zero).unwrap(), 1);
        assert_eq!(induced_rank(&n, &full, &zero, &full, &line).unwrap(), 0);
    }
}
