//! Random monodromic models with honest filtration data.
//!
//! Every model produced here satisfies the validation rules by
//! construction, so the population can drive the complex machinery
//! without manufactured counterexamples sneaking in. Blocks come in five
//! families. Point blocks and structure blocks exist in any number of
//! directions; the ladder families (twisted, logarithmic, localized) are
//! one-direction models supported on a full arithmetic ladder inside the
//! window. Direct sums and grade-preserving base changes then produce
//! models whose matrices carry no visible block structure.
//!
//! The filtration data on the ladder families is pinned by the two
//! compatibility conditions: t is a filtered isomorphism between pieces
//! of positive grade, and d shifts the Hodge level by exactly one going
//! down from grade zero. Concretely the Hodge flag is a constant
//! coordinate flag on pieces of grade > -a and is propagated below by
//! taking images under the d matrix and shifting the level up by one.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::filtration::{monodromy_filtration, NilpotentOp};
use crate::linalg::QMat;
use crate::model::{multi_indices_up_to, GradedPiece, MonodromicModel, Slope};
use crate::rat::{rat_int, rat_uint, Rat};
use crate::subspace::{Flag, Subspace};

/// Which shape of population to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Population {
    /// Mixed block families; grades are unbounded above in spirit, so the
    /// cumulative complex is only available at non-positive levels.
    General,
    /// Point blocks only, window topped at |L|. Both the graded and the
    /// cumulative complex at level zero exist for these.
    BoundedAbove,
}

/// One basis line of the filtered vector space sitting at the point:
/// its Hodge level offset and its weight level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointLine {
    pub f: i64,
    pub w: i64,
}

fn coordinate_span(dim: usize, picks: &[usize]) -> Subspace {
    let vectors = picks
        .iter()
        .map(|&s| {
            let mut v = vec![Rat::zero(); dim];
            v[s] = rat_int(1);
            v
        })
        .collect();
    Subspace::from_vectors(dim, vectors)
}

/// Coordinate flag from per-line levels: the step at level p spans the
/// lines with level <= p.
fn flag_from_levels(levels: &[i64]) -> Flag {
    let dim = levels.len();
    let mut cuts: Vec<i64> = levels.to_vec();
    cuts.sort_unstable();
    cuts.dedup();
    let steps = cuts
        .into_iter()
        .map(|cut| {
            let picks: Vec<usize> = (0..dim).filter(|&s| levels[s] <= cut).collect();
            (cut, coordinate_span(dim, &picks))
        })
        .collect();
    Flag::from_steps(dim, steps).expect("level cuts are nested")
}

/// Point module pushed forward from the origin: basis d^alpha applied to
/// each point line, graded by -L(alpha), with every multi-index of
/// L-value <= -lo stored so that all checked relations are exact. The
/// Hodge level of (alpha, s) is f_s + r + |alpha| and the weight level is
/// w_s independently of alpha.
pub fn delta_block(l: &Slope, window: (Rat, Rat), point: &[PointLine]) -> MonodromicModel {
    let r = l.r();
    let (lo, hi) = window;
    assert!(lo <= Rat::zero() && !point.is_empty(), "window must reach grade 0");
    let cap = (-&lo).to_integer().try_into().unwrap_or(0u64);
    let mut m = MonodromicModel::new(l.clone(), (lo, hi)).expect("window is ordered");

    let mut by_grade: BTreeMap<Rat, Vec<Vec<u64>>> = BTreeMap::new();
    for alpha in multi_indices_up_to(l, cap) {
        let grade = -rat_uint(l.eval(&alpha));
        by_grade.entry(grade).or_default().push(alpha);
    }
    let np = point.len();
    for (grade, basis) in &by_grade {
        let dim = basis.len() * np;
        let mut f_levels = Vec::with_capacity(dim);
        let mut w_levels = Vec::with_capacity(dim);
        for alpha in basis {
            let order: u64 = alpha.iter().sum();
            for line in point {
                f_levels.push(line.f + r as i64 + order as i64);
                w_levels.push(line.w);
            }
        }
        let piece = GradedPiece::new(dim, flag_from_levels(&f_levels), flag_from_levels(&w_levels));
        m.add_piece(grade.clone(), piece).expect("fresh grade");
    }

    let index_of = |basis: &Vec<Vec<u64>>, alpha: &Vec<u64>| -> usize {
        basis.binary_search(alpha).expect("alpha in basis")
    };
    for (grade, basis) in &by_grade {
        for i in 0..r {
            let a = rat_uint(l.coeff(i));
            let target_grade = grade + &a;
            if let Some(target) = by_grade.get(&target_grade) {
                let mut mat = QMat::zero(target.len() * np, basis.len() * np);
                for (s, alpha) in basis.iter().enumerate() {
                    if alpha[i] == 0 {
                        continue;
                    }
                    let mut beta = alpha.clone();
                    beta[i] -= 1;
                    let t = index_of(target, &beta);
                    for q in 0..np {
                        mat.set(t * np + q, s * np + q, -rat_uint(alpha[i]));
                    }
                }
                if !mat.is_zero() {
                    m.set_t_action(i, grade.clone(), mat).expect("shapes agree");
                }
            }
            let target_grade = grade - &a;
            if let Some(target) = by_grade.get(&target_grade) {
                let mut mat = QMat::zero(target.len() * np, basis.len() * np);
                for (s, alpha) in basis.iter().enumerate() {
                    let mut beta = alpha.clone();
                    beta[i] += 1;
                    let t = index_of(target, &beta);
                    for q in 0..np {
                        mat.set(t * np + q, s * np + q, rat_int(1));
                    }
                }
                if !mat.is_zero() {
                    m.set_d_action(i, grade.clone(), mat).expect("shapes agree");
                }
            }
        }
    }
    m
}

/// Structure sheaf block: basis t^beta at grade |L| + L(beta) for every
/// beta fitting under the window top. Single Hodge jump at p0 and a
/// single weight jump at w0 on every piece.
pub fn structure_block(l: &Slope, window: (Rat, Rat), w0: i64, p0: i64) -> MonodromicModel {
    let r = l.r();
    let (lo, hi) = window;
    let weight = rat_uint(l.weight());
    assert!(hi >= weight, "window must reach grade |L|");
    let cap = (&hi - &weight).to_integer().try_into().unwrap_or(0u64);
    let mut m = MonodromicModel::new(l.clone(), (lo, hi)).expect("window is ordered");

    let mut by_grade: BTreeMap<Rat, Vec<Vec<u64>>> = BTreeMap::new();
    for beta in multi_indices_up_to(l, cap) {
        let grade = rat_uint(l.weight() + l.eval(&beta));
        by_grade.entry(grade).or_default().push(beta);
    }
    for (grade, basis) in &by_grade {
        let dim = basis.len();
        let piece =
            GradedPiece::new(dim, Flag::single_jump(dim, p0), Flag::single_jump(dim, w0));
        m.add_piece(grade.clone(), piece).expect("fresh grade");
    }
    let index_of = |basis: &Vec<Vec<u64>>, beta: &Vec<u64>| -> usize {
        basis.binary_search(beta).expect("beta in basis")
    };
    for (grade, basis) in &by_grade {
        for i in 0..r {
            let a = rat_uint(l.coeff(i));
            let target_grade = grade + &a;
            if let Some(target) = by_grade.get(&target_grade) {
                let mut mat = QMat::zero(target.len(), basis.len());
                for (s, beta) in basis.iter().enumerate() {
                    let mut gamma = beta.clone();
                    gamma[i] += 1;
                    mat.set(index_of(target, &gamma), s, rat_int(1));
                }
                if !mat.is_zero() {
                    m.set_t_action(i, grade.clone(), mat).expect("shapes agree");
                }
            }
            let target_grade = grade - &a;
            if let Some(target) = by_grade.get(&target_grade) {
                let mut mat = QMat::zero(target.len(), basis.len());
                for (s, beta) in basis.iter().enumerate() {
                    if beta[i] == 0 {
                        continue;
                    }
                    let mut gamma = beta.clone();
                    gamma[i] -= 1;
                    mat.set(index_of(target, &gamma), s, rat_uint(beta[i]));
                }
                if !mat.is_zero() {
                    m.set_d_action(i, grade.clone(), mat).expect("shapes agree");
                }
            }
        }
    }
    m
}

/// Shared scaffolding for the one-direction ladder families. The ladder
/// sits at grades a(c + k + 1) for integers k; `d_mat` gives the matrix
/// of d from ladder position k, `base_hodge` the coordinate Hodge flag
/// used on every piece of ladder position >= -1, and `weight_at` the
/// weight flag per position.
fn ladder_block(
    a: u64,
    window: (Rat, Rat),
    c: Rat,
    dim: usize,
    d_mat: impl Fn(i64) -> QMat,
    base_hodge: Flag,
    weight_at: impl Fn(i64) -> Flag,
) -> MonodromicModel {
    let slope = Slope::new(vec![a]).expect("positive coefficient");
    let (lo, hi) = window.clone();
    let mut m = MonodromicModel::new(slope, window).expect("window is ordered");
    let ar = rat_uint(a);
    let grade_of = |k: i64| -> Rat { &ar * &(&c + rat_int(k + 1)) };

    // Lowest k with grade(k) >= lo, walked down from 0 for simplicity.
    let mut k_min = 0i64;
    while grade_of(k_min - 1) >= lo {
        k_min -= 1;
    }
    let mut ks = Vec::new();
    let mut k = k_min;
    while grade_of(k) <= hi {
        ks.push(k);
        k += 1;
    }

    // Hodge flags: constant on positions >= -1, image-propagated below.
    let mut hodge: BTreeMap<i64, Flag> = BTreeMap::new();
    for &k in ks.iter().rev() {
        let flag = if k >= -1 {
            base_hodge.clone()
        } else {
            let above = match hodge.get(&(k + 1)) {
                Some(f) => f.clone(),
                None => base_hodge.clone(),
            };
            above.map_through(&d_mat(k + 1)).shift(1)
        };
        hodge.insert(k, flag);
    }
    for &k in &ks {
        let piece = GradedPiece::new(dim, hodge[&k].clone(), weight_at(k));
        m.add_piece(grade_of(k), piece).expect("fresh grade");
    }
    for &k in &ks {
        if ks.contains(&(k + 1)) {
            m.set_t_action(0, grade_of(k), QMat::identity(dim)).expect("shapes agree");
        }
        if ks.contains(&(k - 1)) {
            let mat = d_mat(k);
            if !mat.is_zero() {
                m.set_d_action(0, grade_of(k), mat).expect("shapes agree");
            }
        }
    }
    m
}

/// Rank-one ladder twisted by a fractional exponent c in (0,1): a pure
/// block of weight w0 whose Hodge level is p0 on every piece of positive
/// grade and grows by one per step below grade zero.
pub fn twisted_block(a: u64, window: (Rat, Rat), c: Rat, w0: i64, p0: i64) -> MonodromicModel {
    assert!(c > Rat::zero() && c < rat_int(1), "exponent must lie in (0,1)");
    let cc = c.clone();
    ladder_block(
        a,
        window,
        c,
        1,
        move |k| QMat::from_rows(vec![vec![&cc + rat_int(k)]]),
        Flag::single_jump(1, p0),
        move |_| Flag::single_jump(1, w0),
    )
}

/// Logarithmic ladder of the given rank >= 2, twisted by c in [0,1). The
/// Euler operator has a single nilpotent Jordan block on every piece, and
/// the weight flag is its monodromy filtration centered at w0. The base
/// Hodge flag steps one level per basis line, deepest line first.
pub fn log_block(
    a: u64,
    window: (Rat, Rat),
    c: Rat,
    rank: usize,
    w0: i64,
    p0: i64,
) -> MonodromicModel {
    assert!(rank >= 2, "rank one has no nilpotent part; use the other families");
    assert!(c >= Rat::zero() && c < rat_int(1), "exponent must lie in [0,1)");
    let mut shift = QMat::zero(rank, rank);
    for j in 1..rank {
        shift.set(j - 1, j, rat_uint(j as u64));
    }
    let n = NilpotentOp::new(shift.scale(&rat_uint(a))).expect("strictly triangular");
    let weight = monodromy_filtration(&n, w0).flag;
    let levels: Vec<i64> = (0..rank).map(|j| p0 + (rank - 1 - j) as i64).collect();
    let cc = c.clone();
    let sh = shift.clone();
    ladder_block(
        a,
        window,
        c,
        rank,
        move |k| &QMat::identity(rank).scale(&(&cc + rat_int(k))) + &sh,
        flag_from_levels(&levels),
        move |_| weight.clone(),
    )
}

/// Structure sheaf of the line localized at the origin: the full integer
/// ladder with one-dimensional pieces. Weight jumps at w0 on positive
/// grades and at w0 + 1 from grade zero down; the Hodge level grants one
/// free step at grade zero and then grows per step browsed down.
pub fn localized_block(a: u64, window: (Rat, Rat), w0: i64, p0: i64) -> MonodromicModel {
    ladder_block(
        a,
        window,
        Rat::zero(),
        1,
        move |k| QMat::from_rows(vec![vec![rat_int(k)]]),
        Flag::single_jump(1, p0),
        move |k| Flag::single_jump(1, if k >= 0 { w0 } else { w0 + 1 }),
    )
}

/// Direct sum of two models over the same slope and window.
pub fn direct_sum(a: &MonodromicModel, b: &MonodromicModel) -> MonodromicModel {
    assert_eq!(a.slope(), b.slope(), "summands must share the slope");
    assert_eq!(a.window(), b.window(), "summands must share the window");
    let (lo, hi) = a.window();
    let mut m = MonodromicModel::new(a.slope().clone(), (lo.clone(), hi.clone()))
        .expect("window is ordered");

    let mut grades: Vec<Rat> = a.grades();
    for g in b.grades() {
        if !grades.contains(&g) {
            grades.push(g);
        }
    }
    grades.sort();
    for g in &grades {
        let da = a.piece_dim(g);
        let db = b.piece_dim(g);
        let mut parts = Vec::new();
        if let Some(p) = a.piece(g) {
            parts.push((0usize, (&p.hodge, &p.weight)));
        }
        if let Some(p) = b.piece(g) {
            parts.push((da, (&p.hodge, &p.weight)));
        }
        let hodge = Flag::stack(
            &parts.iter().map(|(o, (h, _))| (*o, *h)).collect::<Vec<_>>(),
            da + db,
        );
        let weight = Flag::stack(
            &parts.iter().map(|(o, (_, w))| (*o, *w)).collect::<Vec<_>>(),
            da + db,
        );
        m.add_piece(g.clone(), GradedPiece::new(da + db, hodge, weight)).expect("fresh");
    }

    let write_block = |mat: &mut QMat, block: &QMat, row0: usize, col0: usize| {
        for i in 0..block.nrows() {
            for j in 0..block.ncols() {
                if !block.get(i, j).is_zero() {
                    mat.set(row0 + i, col0 + j, block.get(i, j).clone());
                }
            }
        }
    };
    for g in &grades {
        for i in 0..m.slope().r() {
            let step = rat_uint(m.slope().coeff(i));
            for (up, is_t) in [(true, true), (false, false)] {
                let target = if up { g + &step } else { g - &step };
                if m.piece(&target).is_none() {
                    continue;
                }
                let (rows, cols) = (m.piece_dim(&target), m.piece_dim(g));
                let mut mat = QMat::zero(rows, cols);
                let (ba, bb) = if is_t {
                    (a.t_map(i, g), b.t_map(i, g))
                } else {
                    (a.d_map(i, g), b.d_map(i, g))
                };
                write_block(&mut mat, &ba, 0, 0);
                write_block(&mut mat, &bb, a.piece_dim(&target), a.piece_dim(g));
                if mat.is_zero() {
                    continue;
                }
                if is_t {
                    m.set_t_action(i, g.clone(), mat).expect("shapes agree");
                } else {
                    m.set_d_action(i, g.clone(), mat).expect("shapes agree");
                }
            }
        }
    }
    m
}

/// Random integer matrix with determinant +-1, as a product of a few
/// elementary row operations.
pub fn random_unimodular(rng: &mut ChaCha8Rng, dim: usize) -> QMat {
    let mut p = QMat::identity(dim);
    if dim < 2 {
        return p;
    }
    let ops = rng.gen_range(2..=4);
    for _ in 0..ops {
        let i = rng.gen_range(0..dim);
        let mut j = rng.gen_range(0..dim);
        while j == i {
            j = rng.gen_range(0..dim);
        }
        match rng.gen_range(0..3u8) {
            0 => {
                let c = rat_int(*[-2, -1, 1, 2].get(rng.gen_range(0..4)).unwrap());
                for col in 0..dim {
                    let v = &p.get(i, col).clone() + &(&c * p.get(j, col));
                    p.set(i, col, v);
                }
            }
            1 => {
                for col in 0..dim {
                    let (vi, vj) = (p.get(i, col).clone(), p.get(j, col).clone());
                    p.set(i, col, vj);
                    p.set(j, col, vi);
                }
            }
            _ => {
                for col in 0..dim {
                    let v = -p.get(i, col).clone();
                    p.set(i, col, v);
                }
            }
        }
    }
    p
}

/// Applies a random basis change to every piece. The result is the same
/// module in disguised coordinates: validity and every derived invariant
/// are unchanged.
pub fn scramble(m: &MonodromicModel, rng: &mut ChaCha8Rng) -> MonodromicModel {
    let (lo, hi) = m.window();
    let mut out = MonodromicModel::new(m.slope().clone(), (lo.clone(), hi.clone()))
        .expect("window is ordered");
    let mut bases: BTreeMap<Rat, QMat> = BTreeMap::new();
    for g in m.grades() {
        bases.insert(g.clone(), random_unimodular(rng, m.piece_dim(&g)));
    }
    for g in m.grades() {
        let p = m.piece(&g).expect("grade listed");
        let basis = &bases[&g];
        let piece =
            GradedPiece::new(p.dim, p.hodge.map_through(basis), p.weight.map_through(basis));
        out.add_piece(g.clone(), piece).expect("fresh");
    }
    for ((i, source), mat) in m.t_actions() {
        let target = source + rat_uint(m.slope().coeff(*i));
        let inv = bases[source].inverse().expect("unimodular");
        let new = &(&bases[&target] * mat) * &inv;
        if !new.is_zero() {
            out.set_t_action(*i, source.clone(), new).expect("shapes agree");
        }
    }
    for ((i, source), mat) in m.d_actions() {
        let target = source - rat_uint(m.slope().coeff(*i));
        let inv = bases[source].inverse().expect("unimodular");
        let new = &(&bases[&target] * mat) * &inv;
        if !new.is_zero() {
            out.set_d_action(*i, source.clone(), new).expect("shapes agree");
        }
    }
    out
}

fn random_point(rng: &mut ChaCha8Rng, max_lines: usize) -> Vec<PointLine> {
    let n = rng.gen_range(1..=max_lines);
    (0..n)
        .map(|_| PointLine { f: rng.gen_range(-1..=1), w: rng.gen_range(-2..=2) })
        .collect()
}

fn fractional(rng: &mut ChaCha8Rng) -> Rat {
    let choices = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4)];
    let (n, d) = choices[rng.gen_range(0..choices.len())];
    Rat::new(n.into(), d.into())
}

fn random_slope(rng: &mut ChaCha8Rng, r: usize) -> Slope {
    let max = match r {
        1 => 2,
        2 => 3,
        _ => 2,
    };
    Slope::new((0..r).map(|_| rng.gen_range(1..=max)).collect()).expect("positive")
}

/// One random model of the requested population shape. Always validates;
/// at most eight stored grades and piece dimension at most four.
pub fn random_model(rng: &mut ChaCha8Rng, kind: Population) -> MonodromicModel {
    let m = match kind {
        Population::BoundedAbove => {
            let r = rng.gen_range(1..=3);
            let l = random_slope(rng, r);
            let cap = match r {
                1 => rng.gen_range(1..=2) * l.min_coeff(),
                2 => l.min_coeff(),
                _ => 1,
            };
            let window = (-rat_uint(cap), rat_uint(l.weight()));
            // A grade can hold up to r multi-indices per point line, so
            // the line budget shrinks with the direction count.
            let mut m = delta_block(&l, window.clone(), &random_point(rng, if r == 1 { 2 } else { 1 }));
            if r <= 2 && rng.gen_bool(0.4) {
                m = direct_sum(&m, &delta_block(&l, window, &random_point(rng, 1)));
            }
            m
        }
        Population::General => {
            let r = match rng.gen_range(0..10) {
                0..=4 => 1,
                5..=7 => 2,
                _ => 3,
            };
            let l = random_slope(rng, r);
            let weight = rat_uint(l.weight());
            if r == 1 {
                let a = l.coeff(0);
                let window = (-rat_uint(a + 1), &weight + rat_uint(a));
                let w0 = rng.gen_range(-1..=1);
                let p0 = rng.gen_range(-1..=1);
                let main = match rng.gen_range(0..5) {
                    0 => structure_block(&l, window.clone(), w0, p0),
                    1 => twisted_block(a, window.clone(), fractional(rng), w0, p0),
                    2 => log_block(a, window.clone(), fractional(rng), rng.gen_range(2..=3), w0, p0),
                    3 => log_block(a, window.clone(), Rat::zero(), rng.gen_range(2..=3), w0, p0),
                    _ => localized_block(a, window.clone(), w0, p0),
                };
                if rng.gen_bool(0.5) {
                    let lines = 4usize.saturating_sub(max_piece_dim(&main)).min(1);
                    if lines > 0 {
                        return scramble(
                            &direct_sum(&main, &delta_block(&l, window, &random_point(rng, lines))),
                            rng,
                        );
                    }
                }
                scramble(&main, rng)
            } else {
                // Structure sheaf plus a point block; the window top is
                // 2|L| when that keeps the structure piece dimensions
                // small, so that a graded complex is buildable at a
                // positive jump.
                let deep = r == 2 && l.weight() <= 3;
                let hi = if deep { &weight + &weight } else { &weight + rat_uint(l.max_coeff()) };
                let lo = -rat_uint(if r == 3 { 1 } else { l.min_coeff() });
                let window = (lo, hi);
                let w0 = rng.gen_range(-1..=1);
                let p0 = rng.gen_range(-1..=1);
                let sum = direct_sum(
                    &structure_block(&l, window.clone(), w0, p0),
                    &delta_block(&l, window, &random_point(rng, 1)),
                );
                scramble(&sum, rng)
            }
        }
    };
    debug_assert!(crate::model::validate(&m).ok);
    m
}

fn max_piece_dim(m: &MonodromicModel) -> usize {
    m.grades().iter().map(|g| m.piece_dim(g)).max().unwrap_or(0)
}

/// Draws `count` independent models from the given population.
pub fn random_population(seed: u64, count: usize, kind: Population) -> Vec<MonodromicModel> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_model(&mut rng, kind)).collect()
}

/// Random nilpotent matrix: strictly upper triangular entries pushed
/// through a random basis change.
pub fn random_nilpotent(rng: &mut ChaCha8Rng, dim: usize) -> QMat {
    let mut n = QMat::zero(dim, dim);
    for i in 0..dim {
        for j in (i + 1)..dim {
            if rng.gen_bool(0.6) {
                n.set(i, j, rat_int(rng.gen_range(1..=2)));
            }
        }
    }
    let p = random_unimodular(rng, dim);
    let inv = p.inverse().expect("unimodular");
    &(&p * &n) * &inv
}
