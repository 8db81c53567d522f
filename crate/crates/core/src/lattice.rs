//! Integral lattices with exact symmetric bilinear forms: invariants,
//! sublattices, saturation, orthogonal complements, discriminant forms and
//! overlattice gluing.
//!
//! Every returned integral basis is in Hermite normal form, so two
//! sublattices are equal iff their basis matrices are equal.

use crate::exact::{common_denominator, rat_int, rat_mod, Int, Rat};
use crate::mat::{
    bareiss_det, clear_denominators, imat_to_q, is_symmetric, left_kernel, pair, q_inverse, q_rank,
    signature, solve_in_row_span, IMat, QMat,
};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("quadratic form is degenerate")]
    DegenerateForm,
    #[error("operation requires an even lattice")]
    NotEven,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis rows are linearly dependent")]
    DependentRows,
    #[error("vector does not lie in the dual lattice")]
    NotInDual,
    #[error("vector does not lie in the sublattice")]
    NotInSpan,
    #[error("sublattices live in different ambient lattices")]
    AmbientMismatch,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GlueError {
    #[error("glue matrix does not define a homomorphism on generator {generator}")]
    NotWellDefined { generator: usize },
    #[error("glue matrix is not an isomorphism of discriminant groups")]
    NotIsomorphism,
    #[error("quadratic forms incompatible on generator {generator}: q + q∘γ = {defect} mod 2")]
    IncompatibleGlue { generator: usize, defect: Rat },
    #[error("gluing requires even lattices")]
    NotEven,
    #[error("glued form failed integrality/evenness check")]
    BrokenOverlattice,
}

// ---------------------------------------------------------------------------
// IntegerLattice
// ---------------------------------------------------------------------------

/// A finite-rank free abelian group with an integral symmetric bilinear form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerLattice {
    label: Option<String>,
    gram: IMat,
    degenerate_allowed: bool,
}

impl IntegerLattice {
    /// A lattice with a non-degenerate symmetric Gram matrix.
    pub fn new(label: Option<String>, gram: IMat) -> Result<Self, LatticeError> {
        if !is_symmetric(&gram) {
            return Err(LatticeError::NotSymmetric);
        }
        if bareiss_det(&gram).is_zero() {
            return Err(LatticeError::DegenerateForm);
        }
        Ok(IntegerLattice {
            label,
            gram,
            degenerate_allowed: false,
        })
    }

    /// Escape hatch for intermediate spans that may carry a degenerate form.
    pub fn new_degenerate_allowed(label: Option<String>, gram: IMat) -> Result<Self, LatticeError> {
        if !is_symmetric(&gram) {
            return Err(LatticeError::NotSymmetric);
        }
        Ok(IntegerLattice {
            label,
            gram,
            degenerate_allowed: true,
        })
    }

    pub fn from_i64_rows(label: &str, rows: &[&[i64]]) -> Result<Self, LatticeError> {
        let gram = IMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Int::from(v)).collect())
                .collect(),
        );
        IntegerLattice::new(Some(label.to_string()), gram)
    }

    /// The hyperbolic plane `U` with Gram `[[0,1],[1,0]]`.
    pub fn hyperbolic_plane() -> Self {
        IntegerLattice::from_i64_rows("U", &[&[0, 1], &[1, 0]]).expect("U is valid")
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IMat {
        &self.gram
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn determinant(&self) -> Int {
        bareiss_det(&self.gram)
    }

    /// `(p, q)` — the counts of positive and negative squares.
    pub fn signature(&self) -> Result<(usize, usize), LatticeError> {
        let (p, n, z) = signature(&imat_to_q(&self.gram));
        if z > 0 {
            return Err(LatticeError::DegenerateForm);
        }
        Ok((p, n))
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.at(i, i).is_even())
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    pub fn is_even_unimodular(&self) -> bool {
        self.is_even() && self.is_unimodular()
    }

    /// `|L*/L| = |det|`.
    pub fn dual_overlattice_quotient_order(&self) -> Int {
        self.determinant().abs()
    }

    pub fn pair_int(&self, a: &[Int], b: &[Int]) -> Int {
        assert_eq!(a.len(), self.rank());
        assert_eq!(b.len(), self.rank());
        pair(&self.gram, a, b)
    }

    pub fn pair_rat(&self, a: &[Rat], b: &[Rat]) -> Rat {
        assert_eq!(a.len(), self.rank());
        assert_eq!(b.len(), self.rank());
        pair(&self.gram_q(), a, b)
    }

    pub fn gram_q(&self) -> QMat {
        imat_to_q(&self.gram)
    }

    /// Orthogonal direct sum, Gram in block-diagonal form.
    pub fn direct_sum(&self, other: &IntegerLattice) -> IntegerLattice {
        let n = self.rank() + other.rank();
        let mut gram = IMat::zero(n, n);
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                gram.set(i, j, self.gram.at(i, j).clone());
            }
        }
        for i in 0..other.rank() {
            for j in 0..other.rank() {
                gram.set(
                    self.rank() + i,
                    self.rank() + j,
                    other.gram.at(i, j).clone(),
                );
            }
        }
        let label = match (&self.label, &other.label) {
            (Some(a), Some(b)) => Some(format!("{a}+{b}")),
            _ => None,
        };
        IntegerLattice {
            label,
            gram,
            degenerate_allowed: self.degenerate_allowed || other.degenerate_allowed,
        }
    }

    /// Same lattice with the form scaled by an integer.
    pub fn rescaled(&self, factor: i64) -> IntegerLattice {
        let f = Int::from(factor);
        IntegerLattice {
            label: self.label.as_ref().map(|l| format!("{l}({factor})")),
            gram: self.gram.map(|v| v * &f),
            degenerate_allowed: self.degenerate_allowed,
        }
    }

    pub fn discriminant_form(&self) -> Result<DiscriminantForm, LatticeError> {
        DiscriminantForm::of(self)
    }

    /// The full lattice viewed as a sublattice of itself.
    pub fn full_sublattice(self: &Arc<Self>) -> Sublattice {
        Sublattice {
            ambient: Arc::clone(self),
            basis: QMat::identity(self.rank()),
            integral: true,
        }
    }
}

// ---------------------------------------------------------------------------
// RationalVector
// ---------------------------------------------------------------------------

/// A vector with exact rational coordinates in a declared ambient basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalVector {
    coords: Vec<Rat>,
}

impl RationalVector {
    pub fn new(coords: Vec<Rat>) -> Self {
        RationalVector { coords }
    }

    pub fn zero(n: usize) -> Self {
        RationalVector {
            coords: vec![Rat::zero(); n],
        }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        RationalVector {
            coords: coords
                .iter()
                .map(|&v| Rat::from_integer(Int::from(v)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Rat> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.denom().is_one())
    }

    pub fn add(&self, other: &RationalVector) -> RationalVector {
        assert_eq!(self.len(), other.len());
        RationalVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RationalVector) -> RationalVector {
        assert_eq!(self.len(), other.len());
        RationalVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, f: &Rat) -> RationalVector {
        RationalVector {
            coords: self.coords.iter().map(|c| c * f).collect(),
        }
    }

    pub fn neg(&self) -> RationalVector {
        RationalVector {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Sublattice
// ---------------------------------------------------------------------------

/// A sublattice (or rational subspace span) of an ambient lattice, presented
/// by independent spanning rows in ambient coordinates.
#[derive(Debug, Clone)]
pub struct Sublattice {
    ambient: Arc<IntegerLattice>,
    basis: QMat,
    integral: bool,
}

impl Sublattice {
    /// Build from spanning rows, which must be linearly independent.
    pub fn from_rows(
        ambient: Arc<IntegerLattice>,
        rows: Vec<Vec<Rat>>,
    ) -> Result<Self, LatticeError> {
        let n = ambient.rank();
        for r in &rows {
            if r.len() != n {
                return Err(LatticeError::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        let basis = if rows.is_empty() {
            QMat::zero(0, n)
        } else {
            QMat::from_rows(rows)
        };
        if q_rank(&basis) != basis.rows() {
            return Err(LatticeError::DependentRows);
        }
        let integral = basis
            .row_iter()
            .all(|r| r.iter().all(|c| c.denom().is_one()));
        Ok(Sublattice {
            ambient,
            basis,
            integral,
        })
    }

    /// Span of possibly-dependent integral rows, canonicalized by HNF.
    pub fn span_integral(
        ambient: Arc<IntegerLattice>,
        rows: Vec<Vec<Int>>,
    ) -> Result<Self, LatticeError> {
        let n = ambient.rank();
        for r in &rows {
            if r.len() != n {
                return Err(LatticeError::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        let m = if rows.is_empty() {
            IMat::zero(0, n)
        } else {
            IMat::from_rows(rows)
        };
        Ok(Sublattice::from_integer_basis(
            ambient,
            crate::mat::hnf_basis(&m),
        ))
    }

    fn from_integer_basis(ambient: Arc<IntegerLattice>, basis: IMat) -> Self {
        Sublattice {
            ambient,
            basis: imat_to_q(&basis),
            integral: true,
        }
    }

    pub fn ambient(&self) -> &Arc<IntegerLattice> {
        &self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &QMat {
        &self.basis
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn basis_int(&self) -> Option<IMat> {
        if !self.integral {
            return None;
        }
        Some(self.basis.map(|r| r.numer().clone()))
    }

    /// Gram matrix of the spanning rows under the ambient form.
    pub fn induced_gram(&self) -> QMat {
        let g = self.ambient.gram_q();
        self.basis.mul(&g).mul(&self.basis.transpose())
    }

    /// The induced lattice as a standalone `IntegerLattice` (requires an
    /// integral induced Gram).
    pub fn as_lattice(&self, label: Option<String>) -> Result<IntegerLattice, LatticeError> {
        let g = self.induced_gram();
        let (gi, d) = clear_denominators(&g);
        if !d.is_one() {
            return Err(LatticeError::NotInSpan);
        }
        IntegerLattice::new_degenerate_allowed(label, gi)
    }

    /// Does the rational span contain `v`?
    pub fn contains_in_span(&self, v: &[Rat]) -> bool {
        solve_in_row_span(v, &self.basis).is_some()
    }

    /// Is `v` an integer combination of the basis rows?
    pub fn contains_vector(&self, v: &[Rat]) -> bool {
        match solve_in_row_span(v, &self.basis) {
            None => false,
            Some(c) => c.iter().all(|x| x.denom().is_one()),
        }
    }

    /// Saturation: all ambient lattice vectors lying in the rational span.
    /// Basis returned in Hermite normal form; idempotent.
    pub fn primitive_closure(&self) -> Result<Sublattice, LatticeError> {
        let (bi, _) = clear_denominators(&self.basis);
        // Right kernel of the basis (as columns): y with B y^T = 0.
        let n = self.ambient.rank();
        let right_kernel = left_kernel(&bi.transpose()); // rows y with y B^T = 0
        if right_kernel.rows() == 0 {
            // Full span: saturation is the whole ambient lattice.
            return Ok(Sublattice::from_integer_basis(
                Arc::clone(&self.ambient),
                IMat::identity(n),
            ));
        }
        let sat = left_kernel(&right_kernel.transpose());
        Ok(Sublattice::from_integer_basis(
            Arc::clone(&self.ambient),
            sat,
        ))
    }

    pub fn is_primitive(&self) -> Result<bool, LatticeError> {
        if !self.integral {
            return Ok(false);
        }
        let closure = self.primitive_closure()?;
        let self_hnf = crate::mat::hnf_basis(&self.basis_int().expect("integral"));
        Ok(closure.basis_int().expect("closure integral") == self_hnf)
    }

    /// `{v in ambient : ⟨v, s⟩ = 0 for all s in self}`, in HNF.
    pub fn orthogonal_complement(&self) -> Result<Sublattice, LatticeError> {
        if self.ambient.determinant().is_zero() {
            return Err(LatticeError::DegenerateForm);
        }
        let g = self.ambient.gram_q();
        let m = g.mul(&self.basis.transpose()); // n×r, columns are G·b^T
        let (mi, _) = clear_denominators(&m);
        let comp = left_kernel(&mi);
        Ok(Sublattice::from_integer_basis(
            Arc::clone(&self.ambient),
            comp,
        ))
    }

    /// Index `[outer : self]` for integral sublattices of equal rank with
    /// `self ⊆ outer`.
    pub fn index_in(&self, outer: &Sublattice) -> Result<Int, LatticeError> {
        if !Arc::ptr_eq(&self.ambient, &outer.ambient) && self.ambient != outer.ambient {
            return Err(LatticeError::AmbientMismatch);
        }
        if self.rank() != outer.rank() {
            return Err(LatticeError::DimensionMismatch {
                expected: outer.rank(),
                got: self.rank(),
            });
        }
        let mut rows = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let c = solve_in_row_span(self.basis.row(i), &outer.basis)
                .ok_or(LatticeError::NotInSpan)?;
            if !c.iter().all(|x| x.denom().is_one()) {
                return Err(LatticeError::NotInSpan);
            }
            rows.push(c.iter().map(|x| x.numer().clone()).collect());
        }
        Ok(bareiss_det(&IMat::from_rows(rows)).abs())
    }

    /// Intersection with another sublattice of the same ambient (integral
    /// sublattices only), in HNF.
    pub fn intersect(&self, other: &Sublattice) -> Result<Sublattice, LatticeError> {
        let a = self.basis_int().ok_or(LatticeError::NotInSpan)?;
        let b = other.basis_int().ok_or(LatticeError::NotInSpan)?;
        // Kernel method: rows (x, y) with xA = yB; intersection = {xA}.
        let stacked = a.vstack(&b.map(|v| -v.clone()));
        let ker = left_kernel(&stacked);
        let mut rows = Vec::new();
        for i in 0..ker.rows() {
            let x = &ker.row(i)[..a.rows()];
            let v = crate::mat::row_mul(x, &a);
            rows.push(v);
        }
        Sublattice::span_integral(Arc::clone(&self.ambient), rows)
    }
}

impl PartialEq for Sublattice {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis == other.basis
    }
}

// ---------------------------------------------------------------------------
// DiscriminantForm
// ---------------------------------------------------------------------------

/// The finite quadratic form on `L*/L` of an even non-degenerate lattice:
/// elementary divisors `d1 | d2 | …` (> 1 only), generator lifts in `L ⊗ Q`,
/// `q` with values in `[0,2) ⊂ Q/2Z` and the pairing `b` in `[0,1) ⊂ Q/Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantForm {
    elementary_divisors: Vec<Int>,
    generators: Vec<RationalVector>,
    q_values: Vec<Rat>,
    pairing: QMat,
    // Full SNF data for class_of: L has basis rows of `u`; generator i of the
    // full quotient is row i of `u` divided by divisor i.
    all_divisors: Vec<Int>,
    u_inverse: QMat,
    nontrivial_idx: Vec<usize>,
}

impl DiscriminantForm {
    pub fn of(lattice: &IntegerLattice) -> Result<Self, LatticeError> {
        if lattice.determinant().is_zero() {
            return Err(LatticeError::DegenerateForm);
        }
        if !lattice.is_even() {
            return Err(LatticeError::NotEven);
        }
        let n = lattice.rank();
        let res = crate::mat::snf(lattice.gram());
        let all_divisors: Vec<Int> = (0..n).map(|i| res.d.at(i, i).clone()).collect();
        let u_q = imat_to_q(&res.u);
        let u_inverse = q_inverse(&u_q).expect("unimodular");
        let mut nontrivial_idx = Vec::new();
        let mut generators = Vec::new();
        let mut divisors = Vec::new();
        for i in 0..n {
            if all_divisors[i].abs() > Int::one() {
                nontrivial_idx.push(i);
                divisors.push(all_divisors[i].abs());
                let d = rat_int(&all_divisors[i]);
                let g: Vec<Rat> = (0..n).map(|j| rat_int(res.u.at(i, j)) / &d).collect();
                generators.push(RationalVector::new(g));
            }
        }
        let two = Rat::from_integer(Int::from(2));
        let one = Rat::one();
        let q_values: Vec<Rat> = generators
            .iter()
            .map(|g| rat_mod(&lattice.pair_rat(g.coords(), g.coords()), &two))
            .collect();
        let k = generators.len();
        let mut pairing = QMat::zero(k, k);
        for i in 0..k {
            for j in 0..k {
                let b = lattice.pair_rat(generators[i].coords(), generators[j].coords());
                pairing.set(i, j, rat_mod(&b, &one));
            }
        }
        Ok(DiscriminantForm {
            elementary_divisors: divisors,
            generators,
            q_values,
            pairing,
            all_divisors,
            u_inverse,
            nontrivial_idx,
        })
    }

    pub fn elementary_divisors(&self) -> &[Int] {
        &self.elementary_divisors
    }

    pub fn generators(&self) -> &[RationalVector] {
        &self.generators
    }

    pub fn q_values(&self) -> &[Rat] {
        &self.q_values
    }

    pub fn pairing(&self) -> &QMat {
        &self.pairing
    }

    pub fn group_order(&self) -> Int {
        self.elementary_divisors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.elementary_divisors.is_empty()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Class of a dual-lattice vector, as generator coefficients in
    /// `[0, d_i)`. Errors if `v` is not in `L*` (that is, not an integral
    /// combination of the quotient generators over `L`).
    pub fn class_of(&self, v: &[Rat]) -> Result<Vec<Int>, LatticeError> {
        let n = self.all_divisors.len();
        if v.len() != n {
            return Err(LatticeError::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        // Coordinates of v in the basis given by the rows of u.
        let a = crate::mat::row_mul(v, &self.u_inverse);
        let mut out = Vec::with_capacity(self.nontrivial_idx.len());
        for i in 0..n {
            let scaled = &a[i] * rat_int(&self.all_divisors[i]);
            if !scaled.denom().is_one() {
                return Err(LatticeError::NotInDual);
            }
            if self.all_divisors[i].abs() > Int::one() {
                let d = self.all_divisors[i].abs();
                let c = scaled.numer().mod_floor(&d);
                out.push(c);
            }
        }
        Ok(out)
    }

    /// `q` of an arbitrary class given by generator coefficients, in `[0,2)`.
    pub fn q_of_class(&self, coords: &[Int]) -> Rat {
        assert_eq!(coords.len(), self.num_generators());
        let two = Rat::from_integer(Int::from(2));
        let mut acc = Rat::zero();
        for (i, c) in coords.iter().enumerate() {
            let ci = rat_int(c);
            acc += &ci * &ci * &self.q_values[i];
            for (j, cj) in coords.iter().enumerate().skip(i + 1) {
                acc += rat_int(&(Int::from(2) * c * cj)) * self.pairing.at(i, j);
            }
        }
        rat_mod(&acc, &two)
    }

    /// Bilinear pairing of two classes, in `[0,1)`.
    pub fn b_of_classes(&self, a: &[Int], b: &[Int]) -> Rat {
        assert_eq!(a.len(), self.num_generators());
        assert_eq!(b.len(), self.num_generators());
        let one = Rat::one();
        let mut acc = Rat::zero();
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                acc += rat_int(&(ai * bj)) * self.pairing.at(i, j);
            }
        }
        rat_mod(&acc, &one)
    }
}

// ---------------------------------------------------------------------------
// GlueMap and gluing
// ---------------------------------------------------------------------------

/// An anti-isometry `γ : D(Λ) → D(V)` of discriminant forms, given by an
/// integer matrix on the SNF generators (row i = image of generator i).
#[derive(Debug, Clone)]
pub struct GlueMap {
    matrix: IMat,
}

impl GlueMap {
    /// Validate and build: γ must be a well-defined group isomorphism with
    /// `q_dom = −q_cod ∘ γ` (mod 2) and `b_dom = −b_cod ∘ γ` (mod 1).
    pub fn new(
        domain: &DiscriminantForm,
        codomain: &DiscriminantForm,
        matrix: IMat,
    ) -> Result<Self, GlueError> {
        let kd = domain.num_generators();
        let kc = codomain.num_generators();
        if matrix.rows() != kd || matrix.cols() != kc {
            return Err(GlueError::NotIsomorphism);
        }
        // Well-defined: d_i · γ(g_i) = 0 in the codomain.
        for i in 0..kd {
            let d = &domain.elementary_divisors()[i];
            for j in 0..kc {
                let e = &codomain.elementary_divisors()[j];
                if !(d * matrix.at(i, j)).mod_floor(e).is_zero() {
                    return Err(GlueError::NotWellDefined { generator: i });
                }
            }
        }
        if domain.group_order() != codomain.group_order() {
            return Err(GlueError::NotIsomorphism);
        }
        // Surjectivity: images together with the relations diag(e_j) must
        // generate Z^{kc}; equivalently the stacked HNF has all pivots 1.
        if kc > 0 {
            let mut rel = IMat::zero(kc, kc);
            for j in 0..kc {
                rel.set(j, j, codomain.elementary_divisors()[j].clone());
            }
            let stacked = matrix.vstack(&rel);
            let h = crate::mat::hnf_basis(&stacked);
            if h.rows() != kc || bareiss_det(&h).abs() != Int::one() {
                return Err(GlueError::NotIsomorphism);
            }
        }
        // Anti-isometry on generators and pairs.
        let two = Rat::from_integer(Int::from(2));
        let one = Rat::one();
        for i in 0..kd {
            let img = matrix.row_vec(i);
            let defect = rat_mod(
                &(domain.q_values()[i].clone() + codomain.q_of_class(&img)),
                &two,
            );
            if !defect.is_zero() {
                return Err(GlueError::IncompatibleGlue {
                    generator: i,
                    defect,
                });
            }
        }
        for i in 0..kd {
            for j in i + 1..kd {
                let gi = matrix.row_vec(i);
                let gj = matrix.row_vec(j);
                let lhs = domain.pairing().at(i, j).clone();
                let rhs = codomain.b_of_classes(&gi, &gj);
                if !rat_mod(&(lhs + rhs), &one).is_zero() {
                    return Err(GlueError::IncompatibleGlue {
                        generator: i,
                        defect: Rat::zero(),
                    });
                }
            }
        }
        Ok(GlueMap { matrix })
    }

    pub fn matrix(&self) -> &IMat {
        &self.matrix
    }

    /// Image of a domain class (generator coefficients) in the codomain.
    pub fn apply(&self, coords: &[Int]) -> Vec<Int> {
        crate::mat::row_mul(coords, &self.matrix)
    }
}

/// Result of gluing: the overlattice, its basis inside `Λ ⊕ V ⊗ Q`, and the
/// ambient direct sum it lives in.
#[derive(Debug, Clone)]
pub struct GluedLattice {
    pub lattice: IntegerLattice,
    pub basis_in_sum: QMat,
    pub ambient_sum: IntegerLattice,
}

/// The overlattice of `Λ ⊕ V` generated by all `(λ, v)` whose discriminant
/// classes correspond under γ.
pub fn glue(
    lambda: &IntegerLattice,
    v: &IntegerLattice,
    gamma: &GlueMap,
) -> Result<GluedLattice, GlueError> {
    if !lambda.is_even() || !v.is_even() {
        return Err(GlueError::NotEven);
    }
    let dl = lambda.discriminant_form().map_err(|_| GlueError::NotEven)?;
    let dv = v.discriminant_form().map_err(|_| GlueError::NotEven)?;
    let nl = lambda.rank();
    let nv = v.rank();
    let n = nl + nv;
    let sum = lambda.direct_sum(v);

    // Rows: Λ ⊕ V itself, plus one glue vector per domain generator.
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(n + dl.num_generators());
    for i in 0..n {
        let mut r = vec![Rat::zero(); n];
        r[i] = Rat::one();
        rows.push(r);
    }
    for (i, g) in dl.generators().iter().enumerate() {
        let img_coords = gamma.apply(
            &(0..dl.num_generators())
                .map(|k| if k == i { Int::one() } else { Int::zero() })
                .collect::<Vec<_>>(),
        );
        let mut lift = vec![Rat::zero(); n];
        for (j, c) in g.coords().iter().enumerate() {
            lift[j] = c.clone();
        }
        for (j, gen) in dv.generators().iter().enumerate() {
            for (t, c) in gen.coords().iter().enumerate() {
                lift[nl + t] += rat_int(&img_coords[j]) * c;
            }
        }
        rows.push(lift);
    }

    let raw = QMat::from_rows(rows);
    let (scaled, denom) = clear_denominators(&raw);
    let h = crate::mat::hnf_basis(&scaled);
    if h.rows() != n {
        return Err(GlueError::BrokenOverlattice);
    }
    let d = rat_int(&denom);
    let basis = imat_to_q(&h).map(|x| x / &d);
    let gram_q = basis.mul(&sum.gram_q()).mul(&basis.transpose());
    let (gram, gd) = clear_denominators(&gram_q);
    if !gd.is_one() {
        return Err(GlueError::BrokenOverlattice);
    }
    let glued = IntegerLattice::new(
        Some(format!(
            "glue({},{})",
            lambda.label().unwrap_or("?"),
            v.label().unwrap_or("?")
        )),
        gram,
    )
    .map_err(|_| GlueError::BrokenOverlattice)?;
    if !glued.is_even() {
        return Err(GlueError::BrokenOverlattice);
    }
    // |det| = det(Λ)·det(V) / |D|².
    let dd = dl.group_order();
    let expected = (lambda.determinant() * v.determinant()).abs() / (&dd * &dd);
    if glued.determinant().abs() != expected {
        return Err(GlueError::BrokenOverlattice);
    }
    Ok(GluedLattice {
        lattice: glued,
        basis_in_sum: basis,
        ambient_sum: sum,
    })
}

/// Identity glue map between two discriminant groups with equal divisors;
/// convenience for tests and the `A1 ⊕ A1(−1) → U` example.
pub fn identity_glue(
    domain: &DiscriminantForm,
    codomain: &DiscriminantForm,
) -> Result<GlueMap, GlueError> {
    let k = domain.num_generators();
    GlueMap::new(domain, codomain, IMat::identity(k))
}

/// Common denominator of a sublattice basis (diagnostic for rational data).
pub fn basis_denominator(s: &Sublattice) -> Int {
    let all: Vec<Rat> = s.basis().to_rows().into_iter().flatten().collect();
    common_denominator(&all)
}
