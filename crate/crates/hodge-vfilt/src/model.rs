//! Window-truncated models of monodromic modules.
//!
//! A slope L assigns positive integer coefficients a_1..a_r to r directions;
//! a monodromic model stores finitely many graded pieces, each a Q-vector
//! space with a Hodge flag (increasing in p) and a weight flag (increasing
//! in k), together with matrices for the multiplication operators t_i
//! (raising the grade by a_i) and the derivations d_i (lowering it by a_i).
//! Grades are rational. The window [lo, hi] bounds what the model speaks
//! about: a grade absent inside the window is genuinely zero, grades outside
//! the window are unknown and every action leaving the window is dropped.
//!
//! `validate` checks the defining relations at every grade where all the
//! composites stay inside the window; sites that cannot be checked are
//! reported as unchecked rather than silently passed, so a report with no
//! violations and no unchecked sites is a complete certificate.

use crate::linalg::QMat;
use crate::rat::{format_rat, rat_int, rat_uint, Rat};
use crate::subspace::Flag;
use crate::filtration::NilpotentOp;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    DegenerateSlope,
    GradeOutsideWindow { grade: Rat },
    DuplicateGrade { grade: Rat },
    UnknownGrade { grade: Rat },
    ActionShape { index: usize, grade: Rat },
    FlagShape { grade: Rat },
    EmptyWindow,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::DegenerateSlope => {
                write!(f, "slope coefficients must be positive and nonempty")
            }
            ModelError::GradeOutsideWindow { grade } => {
                write!(f, "grade {} lies outside the window", format_rat(grade))
            }
            ModelError::DuplicateGrade { grade } => {
                write!(f, "grade {} declared twice", format_rat(grade))
            }
            ModelError::UnknownGrade { grade } => {
                write!(f, "no piece declared at grade {}", format_rat(grade))
            }
            ModelError::ActionShape { index, grade } => {
                write!(f, "action {index} at grade {} has the wrong shape", format_rat(grade))
            }
            ModelError::FlagShape { grade } => {
                write!(f, "flag at grade {} does not match the piece dimension", format_rat(grade))
            }
            ModelError::EmptyWindow => write!(f, "window is empty"),
        }
    }
}

impl std::error::Error for ModelError {}

/// A slope: positive integer coefficients a_1..a_r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slope {
    coeffs: Vec<u64>,
}

impl Slope {
    pub fn new(coeffs: Vec<u64>) -> Result<Slope, ModelError> {
        if coeffs.is_empty() || coeffs.contains(&0) {
            return Err(ModelError::DegenerateSlope);
        }
        Ok(Slope { coeffs })
    }

    pub fn r(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Total weight |L| = a_1 + ... + a_r.
    pub fn weight(&self) -> u64 {
        self.coeffs.iter().sum()
    }

    /// L(alpha) for a multi-index.
    pub fn eval(&self, alpha: &[u64]) -> u64 {
        assert_eq!(alpha.len(), self.r(), "multi-index length mismatch");
        self.coeffs.iter().zip(alpha).map(|(a, x)| a * x).sum()
    }

    pub fn min_coeff(&self) -> u64 {
        *self.coeffs.iter().min().expect("nonempty")
    }

    pub fn max_coeff(&self) -> u64 {
        *self.coeffs.iter().max().expect("nonempty")
    }
}

/// One graded piece: a finite-dimensional space with its two flags.
/// The Hodge flag is indexed by p, the weight flag by k; both must exhaust
/// the piece at their top declared index.
#[derive(Debug, Clone)]
pub struct GradedPiece {
    pub dim: usize,
    pub hodge: Flag,
    pub weight: Flag,
}

impl GradedPiece {
    pub fn new(dim: usize, hodge: Flag, weight: Flag) -> GradedPiece {
        GradedPiece { dim, hodge, weight }
    }
}

/// Identifier for a validation rule, used in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    CommutatorMixed,
    CommutatorT,
    CommutatorD,
    Eigenvalue,
    HodgeT,
    HodgeD,
    WeightT,
    WeightD,
    FlagShape,
    Purity,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::CommutatorMixed => "commutator-dt",
            Rule::CommutatorT => "commutator-tt",
            Rule::CommutatorD => "commutator-dd",
            Rule::Eigenvalue => "monodromic-eigenvalue",
            Rule::HodgeT => "hodge-t",
            Rule::HodgeD => "hodge-d",
            Rule::WeightT => "weight-t",
            Rule::WeightD => "weight-d",
            Rule::FlagShape => "flag-shape",
            Rule::Purity => "purity",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub rule: Rule,
    pub grade: Rat,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct UncheckedSite {
    pub rule: Rule,
    pub grade: Rat,
}

/// Result of validating a model. `ok` means no violations; unchecked sites
/// list relations whose composites would leave the window.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub unchecked: Vec<UncheckedSite>,
}

#[derive(Debug, Clone)]
pub struct MonodromicModel {
    slope: Slope,
    window: (Rat, Rat),
    pieces: BTreeMap<Rat, GradedPiece>,
    t_actions: BTreeMap<(usize, Rat), QMat>,
    d_actions: BTreeMap<(usize, Rat), QMat>,
}

impl MonodromicModel {
    pub fn new(slope: Slope, window: (Rat, Rat)) -> Result<MonodromicModel, ModelError> {
        if window.0 > window.1 {
            return Err(ModelError::EmptyWindow);
        }
        Ok(MonodromicModel {
            slope,
            window,
            pieces: BTreeMap::new(),
            t_actions: BTreeMap::new(),
            d_actions: BTreeMap::new(),
        })
    }

    pub fn slope(&self) -> &Slope {
        &self.slope
    }

    pub fn window(&self) -> (&Rat, &Rat) {
        (&self.window.0, &self.window.1)
    }

    pub fn in_window(&self, grade: &Rat) -> bool {
        *grade >= self.window.0 && *grade <= self.window.1
    }

    pub fn add_piece(&mut self, grade: Rat, piece: GradedPiece) -> Result<(), ModelError> {
        if !self.in_window(&grade) {
            return Err(ModelError::GradeOutsideWindow { grade });
        }
        if self.pieces.contains_key(&grade) {
            return Err(ModelError::DuplicateGrade { grade });
        }
        if piece.hodge.ambient_dim() != piece.dim || piece.weight.ambient_dim() != piece.dim {
            return Err(ModelError::FlagShape { grade });
        }
        self.pieces.insert(grade, piece);
        Ok(())
    }

    /// Declares the matrix of t_i on the piece at `source` (target grade is
    /// source + a_i). Both pieces must exist; absent matrices mean zero.
    pub fn set_t_action(&mut self, i: usize, source: Rat, mat: QMat) -> Result<(), ModelError> {
        assert!(i < self.slope.r(), "direction index out of range");
        let target = &source + rat_uint(self.slope.coeff(i));
        let sdim = self
            .pieces
            .get(&source)
            .ok_or(ModelError::UnknownGrade { grade: source.clone() })?
            .dim;
        let tdim = self
            .pieces
            .get(&target)
            .ok_or(ModelError::UnknownGrade { grade: target.clone() })?
            .dim;
        if mat.nrows() != tdim || mat.ncols() != sdim {
            return Err(ModelError::ActionShape { index: i, grade: source });
        }
        self.t_actions.insert((i, source), mat);
        Ok(())
    }

    /// Declares the matrix of d_i on the piece at `source` (target grade is
    /// source - a_i).
    pub fn set_d_action(&mut self, i: usize, source: Rat, mat: QMat) -> Result<(), ModelError> {
        assert!(i < self.slope.r(), "direction index out of range");
        let target = &source - rat_uint(self.slope.coeff(i));
        let sdim = self
            .pieces
            .get(&source)
            .ok_or(ModelError::UnknownGrade { grade: source.clone() })?
            .dim;
        let tdim = self
            .pieces
            .get(&target)
            .ok_or(ModelError::UnknownGrade { grade: target.clone() })?
            .dim;
        if mat.nrows() != tdim || mat.ncols() != sdim {
            return Err(ModelError::ActionShape { index: i, grade: source });
        }
        self.d_actions.insert((i, source), mat);
        Ok(())
    }

    pub fn grades(&self) -> Vec<Rat> {
        self.pieces.keys().cloned().collect()
    }

    pub fn piece(&self, grade: &Rat) -> Option<&GradedPiece> {
        self.pieces.get(grade)
    }

    pub fn piece_dim(&self, grade: &Rat) -> usize {
        self.pieces.get(grade).map_or(0, |p| p.dim)
    }

    pub fn t_action(&self, i: usize, source: &Rat) -> Option<&QMat> {
        self.t_actions.get(&(i, source.clone()))
    }

    pub fn d_action(&self, i: usize, source: &Rat) -> Option<&QMat> {
        self.d_actions.get(&(i, source.clone()))
    }

    pub fn t_actions(&self) -> &BTreeMap<(usize, Rat), QMat> {
        &self.t_actions
    }

    pub fn d_actions(&self) -> &BTreeMap<(usize, Rat), QMat> {
        &self.d_actions
    }

    /// Matrix of t_i from `source`, with absent data read as the zero map.
    pub fn t_map(&self, i: usize, source: &Rat) -> QMat {
        let target = source + rat_uint(self.slope.coeff(i));
        match self.t_actions.get(&(i, source.clone())) {
            Some(m) => m.clone(),
            None => QMat::zero(self.piece_dim(&target), self.piece_dim(source)),
        }
    }

    /// Matrix of d_i from `source`, with absent data read as the zero map.
    pub fn d_map(&self, i: usize, source: &Rat) -> QMat {
        let target = source - rat_uint(self.slope.coeff(i));
        match self.d_actions.get(&(i, source.clone())) {
            Some(m) => m.clone(),
            None => QMat::zero(self.piece_dim(&target), self.piece_dim(source)),
        }
    }

    /// The Euler-type operator sum a_i t_i d_i on the piece at `grade`.
    /// Each summand is taken through the downward composite when the grade
    /// below stays in the window, otherwise through the upward composite via
    /// the commutation relation d_i t_i - t_i d_i = id. Returns None when a
    /// direction has both routes outside the window.
    pub fn theta(&self, grade: &Rat) -> Option<QMat> {
        let dim = self.piece_dim(grade);
        let mut acc = QMat::zero(dim, dim);
        for i in 0..self.slope.r() {
            let a = rat_uint(self.slope.coeff(i));
            let down = grade - &a;
            let up = grade + &a;
            let term = if self.in_window(&down) {
                &self.t_map(i, &down) * &self.d_map(i, grade)
            } else if self.in_window(&up) {
                &(&self.d_map(i, &up) * &self.t_map(i, grade)) - &QMat::identity(dim)
            } else {
                return None;
            };
            acc = &acc + &term.scale(&a);
        }
        Some(acc)
    }

    /// N at `grade`: theta minus its scalar eigenvalue grade - |L|.
    pub fn nilpotent_part(&self, grade: &Rat) -> Option<QMat> {
        let dim = self.piece_dim(grade);
        let theta = self.theta(grade)?;
        let scalar = grade - rat_uint(self.slope.weight());
        Some(&theta - &QMat::identity(dim).scale(&scalar))
    }

    /// Restricts the model to the intersection of its window with [lo, hi],
    /// dropping pieces and actions that no longer fit.
    pub fn clip_window(&self, lo: &Rat, hi: &Rat) -> Result<MonodromicModel, ModelError> {
        let new_lo = self.window.0.clone().max(lo.clone());
        let new_hi = self.window.1.clone().min(hi.clone());
        let mut out = MonodromicModel::new(self.slope.clone(), (new_lo, new_hi))?;
        for (grade, piece) in &self.pieces {
            if out.in_window(grade) {
                out.add_piece(grade.clone(), piece.clone()).expect("fresh grade");
            }
        }
        for ((i, source), mat) in &self.t_actions {
            let target = source + rat_uint(self.slope.coeff(*i));
            if out.in_window(source) && out.in_window(&target) {
                out.set_t_action(*i, source.clone(), mat.clone()).expect("checked");
            }
        }
        for ((i, source), mat) in &self.d_actions {
            let target = source - rat_uint(self.slope.coeff(*i));
            if out.in_window(source) && out.in_window(&target) {
                out.set_d_action(*i, source.clone(), mat.clone()).expect("checked");
            }
        }
        Ok(out)
    }

    /// Replaces every weight flag with a single jump at `w`.
    pub fn reweighted_pure(&self, w: i64) -> MonodromicModel {
        let mut out = self.clone();
        for piece in out.pieces.values_mut() {
            piece.weight = Flag::single_jump(piece.dim, w);
        }
        out
    }

    /// The graded subspace V^lambda: full pieces at grades >= lambda.
    pub fn lv_truncation(&self, lambda: &Rat) -> GradedSubspace {
        let parts = self
            .pieces
            .iter()
            .filter(|(g, _)| *g >= lambda)
            .map(|(g, p)| (g.clone(), crate::subspace::Subspace::full(p.dim)))
            .collect();
        GradedSubspace { parts }
    }
}

/// A grade-indexed family of subspaces of the pieces of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSubspace {
    pub parts: BTreeMap<Rat, crate::subspace::Subspace>,
}

impl GradedSubspace {
    pub fn dim(&self) -> usize {
        self.parts.values().map(|s| s.dim()).sum()
    }

    /// Keeps only the parts at grades >= lambda.
    pub fn truncate_at(&self, lambda: &Rat) -> GradedSubspace {
        GradedSubspace {
            parts: self
                .parts
                .iter()
                .filter(|(g, _)| *g >= lambda)
                .map(|(g, s)| (g.clone(), s.clone()))
                .collect(),
        }
    }
}

/// Validates the defining relations of a monodromic model.
///
/// Checked where interior: mixed commutators [d_i, t_j] = delta_ij,
/// commutativity of the t's and of the d's, the eigenvalue decomposition of
/// the Euler operator (theta = (grade - |L|) id + nilpotent, through the
/// downward composites), filtration compatibility of every stored action
/// (t preserves the Hodge level, d raises it by one, both preserve the
/// weight level), flag shapes, and purity: when every piece has a single
/// weight jump at a common level the nilpotent parts must vanish.
pub fn validate(m: &MonodromicModel) -> ValidationReport {
    let mut violations = Vec::new();
    let mut unchecked = Vec::new();
    let r = m.slope.r();

    // Flag shapes first; the relation checks assume well-formed pieces.
    for (grade, piece) in &m.pieces {
        let mut bad = piece.hodge.ambient_dim() != piece.dim
            || piece.weight.ambient_dim() != piece.dim;
        if piece.dim > 0 && (!piece.hodge.is_exhaustive() || !piece.weight.is_exhaustive()) {
            bad = true;
        }
        if bad {
            violations.push(Violation {
                rule: Rule::FlagShape,
                grade: grade.clone(),
                detail: "flags must match the piece dimension and exhaust it".into(),
            });
        }
    }
    if !violations.is_empty() {
        return ValidationReport { ok: false, violations, unchecked };
    }

    // Filtration compatibility of every stored action.
    for ((i, source), mat) in &m.t_actions {
        let target = source + rat_uint(m.slope.coeff(*i));
        let (sp, tp) = (&m.pieces[source], &m.pieces[&target]);
        for p in sp.hodge.jumps() {
            let image = sp.hodge.at(p).image_under(mat);
            if !image.is_subspace_of(&tp.hodge.at(p)).expect("dims checked") {
                violations.push(Violation {
                    rule: Rule::HodgeT,
                    grade: source.clone(),
                    detail: format!("t_{} does not preserve F_{p}", i + 1),
                });
            }
        }
        for k in sp.weight.jumps() {
            let image = sp.weight.at(k).image_under(mat);
            if !image.is_subspace_of(&tp.weight.at(k)).expect("dims checked") {
                violations.push(Violation {
                    rule: Rule::WeightT,
                    grade: source.clone(),
                    detail: format!("t_{} does not preserve W_{k}", i + 1),
                });
            }
        }
    }
    for ((i, source), mat) in &m.d_actions {
        let target = source - rat_uint(m.slope.coeff(*i));
        let (sp, tp) = (&m.pieces[source], &m.pieces[&target]);
        for p in sp.hodge.jumps() {
            let image = sp.hodge.at(p).image_under(mat);
            if !image.is_subspace_of(&tp.hodge.at(p + 1)).expect("dims checked") {
                violations.push(Violation {
                    rule: Rule::HodgeD,
                    grade: source.clone(),
                    detail: format!("d_{} does not map F_{p} into F_{}", i + 1, p + 1),
                });
            }
        }
        for k in sp.weight.jumps() {
            let image = sp.weight.at(k).image_under(mat);
            if !image.is_subspace_of(&tp.weight.at(k)).expect("dims checked") {
                violations.push(Violation {
                    rule: Rule::WeightD,
                    grade: source.clone(),
                    detail: format!("d_{} does not preserve W_{k}", i + 1),
                });
            }
        }
    }

    // Commutators, checked at each grade where the composites stay inside.
    for grade in m.pieces.keys() {
        let dim = m.piece_dim(grade);
        for i in 0..r {
            for j in 0..r {
                let ai = rat_uint(m.slope.coeff(i));
                let aj = rat_uint(m.slope.coeff(j));
                // [d_i, t_j] = delta_ij on the piece at `grade`.
                let up = grade + &aj;
                let down = grade - &ai;
                let corner = grade + &aj - &ai;
                if m.in_window(&up) && m.in_window(&down) && m.in_window(&corner) {
                    let lhs = &(&m.d_map(i, &up) * &m.t_map(j, grade))
                        - &(&m.t_map(j, &down) * &m.d_map(i, grade));
                    let expected = if i == j {
                        QMat::identity(dim)
                    } else {
                        QMat::zero(m.piece_dim(&corner), dim)
                    };
                    if lhs != expected {
                        violations.push(Violation {
                            rule: Rule::CommutatorMixed,
                            grade: grade.clone(),
                            detail: format!("[d_{}, t_{}] is wrong", i + 1, j + 1),
                        });
                    }
                } else {
                    unchecked.push(UncheckedSite { rule: Rule::CommutatorMixed, grade: grade.clone() });
                }
                if i < j {
                    // t_i t_j = t_j t_i.
                    let via_i = grade + &ai;
                    let via_j = grade + &aj;
                    let both = grade + &ai + &aj;
                    if m.in_window(&via_i) && m.in_window(&via_j) && m.in_window(&both) {
                        let lhs = &m.t_map(j, &via_i) * &m.t_map(i, grade);
                        let rhs = &m.t_map(i, &via_j) * &m.t_map(j, grade);
                        if lhs != rhs {
                            violations.push(Violation {
                                rule: Rule::CommutatorT,
                                grade: grade.clone(),
                                detail: format!("t_{} and t_{} do not commute", i + 1, j + 1),
                            });
                        }
                    } else {
                        unchecked.push(UncheckedSite { rule: Rule::CommutatorT, grade: grade.clone() });
                    }
                    // d_i d_j = d_j d_i.
                    let via_i = grade - &ai;
                    let via_j = grade - &aj;
                    let both = grade - &ai - &aj;
                    if m.in_window(&via_i) && m.in_window(&via_j) && m.in_window(&both) {
                        let lhs = &m.d_map(j, &via_i) * &m.d_map(i, grade);
                        let rhs = &m.d_map(i, &via_j) * &m.d_map(j, grade);
                        if lhs != rhs {
                            violations.push(Violation {
                                rule: Rule::CommutatorD,
                                grade: grade.clone(),
                                detail: format!("d_{} and d_{} do not commute", i + 1, j + 1),
                            });
                        }
                    } else {
                        unchecked.push(UncheckedSite { rule: Rule::CommutatorD, grade: grade.clone() });
                    }
                }
            }
        }
    }

    // Eigenvalue rule, through the downward composites only.
    let mut nilpotents: BTreeMap<Rat, Option<QMat>> = BTreeMap::new();
    for grade in m.pieces.keys() {
        let interior = (0..r).all(|i| m.in_window(&(grade - rat_uint(m.slope.coeff(i)))));
        if !interior {
            unchecked.push(UncheckedSite { rule: Rule::Eigenvalue, grade: grade.clone() });
            nilpotents.insert(grade.clone(), None);
            continue;
        }
        let n = m
            .nilpotent_part(grade)
            .expect("downward composites are interior");
        match NilpotentOp::new(n.clone()) {
            Ok(_) => {
                nilpotents.insert(grade.clone(), Some(n));
            }
            Err(_) => {
                violations.push(Violation {
                    rule: Rule::Eigenvalue,
                    grade: grade.clone(),
                    detail: "Euler operator minus (grade - |L|) id is not nilpotent".into(),
                });
                nilpotents.insert(grade.clone(), None);
            }
        }
    }

    // Purity: a single common weight level forces the nilpotent parts to
    // vanish wherever they are computable.
    let mut levels = m.pieces.values().filter(|p| p.dim > 0).map(|p| p.weight.jumps());
    let flagged_pure = match levels.next() {
        Some(first) => {
            first.len() == 1
                && levels.all(|j| j == first)
        }
        None => false,
    };
    if flagged_pure {
        for (grade, n) in &nilpotents {
            match n {
                Some(n) if !n.is_zero() => violations.push(Violation {
                    rule: Rule::Purity,
                    grade: grade.clone(),
                    detail: "pure model with a nonzero nilpotent part".into(),
                }),
                Some(_) => {}
                None => unchecked.push(UncheckedSite { rule: Rule::Purity, grade: grade.clone() }),
            }
        }
    }

    ValidationReport { ok: violations.is_empty(), violations, unchecked }
}

/// Enumerates the multi-indices alpha with L(alpha) <= cap, in
/// lexicographic order.
pub fn multi_indices_up_to(l: &Slope, cap: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut current = vec![0u64; l.r()];
    fn rec(l: &Slope, cap: u64, pos: usize, used: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if pos == l.r() {
            out.push(current.clone());
            return;
        }
        let a = l.coeff(pos);
        let mut v = 0u64;
        while used + a * v <= cap {
            current[pos] = v;
            rec(l, cap, pos + 1, used + a * v, current, out);
            v += 1;
        }
        current[pos] = 0;
    }
    rec(l, cap, 0, 0, &mut current, &mut out);
    out.sort();
    out
}

/// The greatest value v with every multi-index of L-value <= v interior to
/// the depth-truncated module: v = (depth + 1) * min(a_i) - 1.
fn truncation_value(l: &Slope, depth: u32) -> u64 {
    (depth as u64 + 1) * l.min_coeff() - 1
}

/// Model of the delta module at the origin: basis d^alpha applied to the
/// delta class, graded by -L(alpha), truncated at L(alpha) <= v where
/// v = (depth + 1) min(a_i) - 1. The truncation cuts along L-values, so
/// every relation with both endpoints in the window is exact. The Hodge
/// flag jumps with the order |alpha| at p = r + |alpha|; the module is pure
/// of weight 0.
pub fn delta_module_model(l: &Slope, depth: u32) -> MonodromicModel {
    let v = truncation_value(l, depth);
    let r = l.r();
    let lo = -rat_uint(v);
    let hi = rat_uint(l.weight());
    let mut m = MonodromicModel::new(l.clone(), (lo, hi)).expect("window is ordered");

    let mut by_grade: BTreeMap<Rat, Vec<Vec<u64>>> = BTreeMap::new();
    for alpha in multi_indices_up_to(l, v) {
        let grade = -rat_uint(l.eval(&alpha));
        by_grade.entry(grade).or_default().push(alpha);
    }
    for (grade, basis) in &by_grade {
        let dim = basis.len();
        let mut hodge_steps = Vec::new();
        let orders: Vec<u64> = basis.iter().map(|a| a.iter().sum()).collect();
        let mut cuts: Vec<u64> = orders.clone();
        cuts.sort_unstable();
        cuts.dedup();
        for cut in cuts {
            let vectors = (0..dim)
                .filter(|&s| orders[s] <= cut)
                .map(|s| {
                    let mut v = vec![Rat::zero(); dim];
                    v[s] = rat_int(1);
                    v
                })
                .collect();
            hodge_steps.push((
                r as i64 + cut as i64,
                crate::subspace::Subspace::from_vectors(dim, vectors),
            ));
        }
        let hodge = Flag::from_steps(dim, hodge_steps).expect("order cuts are nested");
        let weight = Flag::single_jump(dim, 0);
        m.add_piece(grade.clone(), GradedPiece::new(dim, hodge, weight)).expect("fresh");
    }

    let index_of = |basis: &Vec<Vec<u64>>, alpha: &Vec<u64>| -> usize {
        basis.binary_search(alpha).expect("alpha in basis")
    };
    for (grade, basis) in &by_grade {
        for i in 0..r {
            let a = rat_uint(l.coeff(i));
            // t_i sends d^alpha to -alpha_i d^(alpha - e_i), raising the grade.
            let target_grade = grade + &a;
            if let Some(target) = by_grade.get(&target_grade) {
                let mut mat = QMat::zero(target.len(), basis.len());
                for (s, alpha) in basis.iter().enumerate() {
                    if alpha[i] == 0 {
                        continue;
                    }
                    let mut beta = alpha.clone();
                    beta[i] -= 1;
                    mat.set(index_of(target, &beta), s, -rat_uint(alpha[i]));
                }
                if !mat.is_zero() {
                    m.set_t_action(i, grade.clone(), mat).expect("shapes agree");
                }
            }
            // d_i sends d^alpha to d^(alpha + e_i), lowering the grade.
            let target_grade = grade - &a;
            if let Some(target) = by_grade.get(&target_grade) {
                let mut mat = QMat::zero(target.len(), basis.len());
                for (s, alpha) in basis.iter().enumerate() {
                    let mut beta = alpha.clone();
                    beta[i] += 1;
                    mat.set(index_of(target, &beta), s, rat_int(1));
                }
                if !mat.is_zero() {
                    m.set_d_action(i, grade.clone(), mat).expect("shapes agree");
                }
            }
        }
    }
    m
}

/// Model of the structure sheaf of the ambient affine space as a module
/// over itself: basis t^beta, graded by |L| + L(beta), truncated along
/// L-values at the same cut as the delta model. The Hodge flag is a single
/// jump at 0 and the module is pure; the weight level is r by convention.
pub fn structure_module_model(l: &Slope, depth: u32) -> MonodromicModel {
    let v = truncation_value(l, depth);
    let r = l.r();
    let lo = Rat::zero();
    let hi = rat_uint(l.weight() + v);
    let mut m = MonodromicModel::new(l.clone(), (lo, hi)).expect("window is ordered");

    let mut by_grade: BTreeMap<Rat, Vec<Vec<u64>>> = BTreeMap::new();
    for beta in multi_indices_up_to(l, v) {
        let grade = rat_uint(l.weight() + l.eval(&beta));
        by_grade.entry(grade).or_default().push(beta);
    }
    for (grade, basis) in &by_grade {
        let dim = basis.len();
        let hodge = Flag::single_jump(dim, 0);
        let weight = Flag::single_jump(dim, r as i64);
        m.add_piece(grade.clone(), GradedPiece::new(dim, hodge, weight)).expect("fresh");
    }
    let index_of = |basis: &Vec<Vec<u64>>, beta: &Vec<u64>| -> usize {
        basis.binary_search(beta).expect("beta in basis")
    };
    for (grade, basis) in &by_grade {
        for i in 0..r {
            let a = rat_uint(l.coeff(i));
            // t_i sends t^beta to t^(beta + e_i).
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
            // d_i sends t^beta to beta_i t^(beta - e_i).
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
