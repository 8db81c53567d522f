//! Numerical stability layer: Mukai vectors over a Néron–Severi frame, exact
//! central charges at `exp(B+iω)` points, chamber/set membership, wall loci
//! along piecewise-linear paths, and phase-lift bookkeeping for the rotation
//! action on charges.
//!
//! Everything is exact.  Charges are pairs of rationals, walls are located by
//! Sturm root isolation on segment polynomials, and lifts only ever rotate a
//! frame by quarter turns; phase offsets that are not half-integers are kept
//! symbolically in [`LiftedPoint::phase`] rather than as floating angles.
//!
//! Full coordinates on the numerical lattice are `(rank, NS-part, degree)`:
//! index `0` is the rank slot, indices `1..=ρ` the Néron–Severi coordinates
//! and the last index the degree slot, paired by
//! `⟨(r,c,s),(r',c',s')⟩ = −r·s' + c·c' − s·r'`.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::enumerate::{
    bounded_delta_plus_scan, roots_orthogonal_to_plane, BoundedRootQuery, EnumerateError,
};
use crate::exact::{floor_rat, Int, Rat};
use crate::kummer::{orbifold_map, GeometricInterpretation, KummerError, KummerModel};
use crate::lattice::{IntegerLattice, LatticeError, Sublattice};
use crate::mat::{imat_to_q, is_symmetric, signature, solve_in_row_span, IMat, QMat};
use crate::poly::{isolate_roots, refine_interval, region_samples, Poly, RootLocation, SturmChain};

#[derive(Debug, Error)]
pub enum StabError {
    #[error("coordinate length does not match the frame rank")]
    DimensionMismatch,
    #[error("omega must have positive square")]
    NonPositiveOmega,
    #[error("model rejected: {0}")]
    InvalidModel(String),
    #[error("geometric data does not induce a numerical frame: {0}")]
    NotInducible(String),
    #[error("both central charges vanish identically on segment {segment}")]
    DegeneratePath { segment: usize },
    #[error("frame degenerates on segment {segment}")]
    PathHitsWall { segment: usize },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error(transparent)]
    Kummer(#[from] KummerError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
}

// ---------------------------------------------------------------------------
// Vectors

/// `(r, c₁, s)` with integral entries; `c₁` in Néron–Severi basis coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MukaiVector {
    pub r: Int,
    pub c1: Vec<Int>,
    pub s: Int,
}

impl MukaiVector {
    pub fn new(r: Int, c1: Vec<Int>, s: Int) -> Self {
        MukaiVector { r, c1, s }
    }

    pub fn from_i64(r: i64, c1: &[i64], s: i64) -> Self {
        MukaiVector {
            r: Int::from(r),
            c1: c1.iter().map(|&v| Int::from(v)).collect(),
            s: Int::from(s),
        }
    }

    /// The point class `(0, 0, 1)`.
    pub fn skyscraper(rho: usize) -> Self {
        MukaiVector {
            r: Int::zero(),
            c1: vec![Int::zero(); rho],
            s: Int::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero() && self.c1.iter().all(Int::is_zero)
    }

    /// Full `(rank, NS, degree)` coordinate row.
    pub fn full_coords(&self) -> Vec<Rat> {
        let mut out = Vec::with_capacity(self.c1.len() + 2);
        out.push(Rat::from_integer(self.r.clone()));
        out.extend(self.c1.iter().cloned().map(Rat::from_integer));
        out.push(Rat::from_integer(self.s.clone()));
        out
    }
}

/// A rational frame `re + i·im` in full numerical coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabVector {
    pub re: Vec<Rat>,
    pub im: Vec<Rat>,
}

impl StabVector {
    pub fn new(re: Vec<Rat>, im: Vec<Rat>) -> Result<Self, StabError> {
        if re.len() != im.len() || re.len() < 3 {
            return Err(StabError::DimensionMismatch);
        }
        Ok(StabVector { re, im })
    }

    /// Complex conjugate: negate the imaginary part.
    pub fn conjugate(&self) -> StabVector {
        StabVector {
            re: self.re.clone(),
            im: self.im.iter().map(|x| -x).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Pairings

/// `⟨a,b⟩ = −a_r·b_s + a_c·b_c − a_s·b_r` with the middle term through
/// `ns_gram`.
pub fn mukai_pairing(a: &MukaiVector, b: &MukaiVector, ns_gram: &IMat) -> Result<Int, StabError> {
    if a.c1.len() != ns_gram.rows() || b.c1.len() != ns_gram.rows() {
        return Err(StabError::DimensionMismatch);
    }
    let mid = crate::mat::pair(ns_gram, &a.c1, &b.c1);
    Ok(mid - &a.r * &b.s - &a.s * &b.r)
}

/// The same pairing on full rational coordinate rows.
pub fn mukai_pairing_rat(a: &[Rat], b: &[Rat], ns_gram: &IMat) -> Result<Rat, StabError> {
    let rho = ns_gram.rows();
    if a.len() != rho + 2 || b.len() != rho + 2 {
        return Err(StabError::DimensionMismatch);
    }
    let gq = imat_to_q(ns_gram);
    let mid = crate::mat::pair(&gq, &a[1..=rho], &b[1..=rho]);
    Ok(mid - &a[0] * &b[rho + 1] - &a[rho + 1] * &b[0])
}

// ---------------------------------------------------------------------------
// Model

/// A Néron–Severi frame of signature `(1, ρ−1)` together with the numerical
/// lattice `U ⊥ NS` it spans and a fixed ample reference frame `exp(iω₀)`
/// used to orient the positive-plane component.
#[derive(Debug, Clone)]
pub struct StabilityModel {
    label: String,
    ns_gram: IMat,
    ns_gram_q: QMat,
    numerical: Arc<IntegerLattice>,
    full_gram_q: QMat,
    omega0: Vec<Rat>,
    reference: StabVector,
}

impl StabilityModel {
    pub fn new(label: &str, ns_gram: IMat, omega0: Vec<Rat>) -> Result<Self, StabError> {
        let rho = ns_gram.rows();
        if rho == 0 || ns_gram.cols() != rho {
            return Err(StabError::InvalidModel(
                "NS Gram must be square and nonempty".into(),
            ));
        }
        if !is_symmetric(&ns_gram) {
            return Err(StabError::InvalidModel("NS Gram must be symmetric".into()));
        }
        let ns_gram_q = imat_to_q(&ns_gram);
        let (p, m, z) = signature(&ns_gram_q);
        if (p, m, z) != (1, rho - 1, 0) {
            return Err(StabError::InvalidModel(format!(
                "NS signature must be (1,{},0), got ({p},{m},{z})",
                rho - 1
            )));
        }
        if omega0.len() != rho {
            return Err(StabError::DimensionMismatch);
        }
        let osq = crate::mat::pair(&ns_gram_q, &omega0, &omega0);
        if !osq.is_positive() {
            return Err(StabError::NonPositiveOmega);
        }
        let n = rho + 2;
        let mut ng = IMat::zero(n, n);
        ng.set(0, n - 1, -Int::one());
        ng.set(n - 1, 0, -Int::one());
        for i in 0..rho {
            for j in 0..rho {
                ng.set(1 + i, 1 + j, ns_gram.at(i, j).clone());
            }
        }
        let numerical = Arc::new(IntegerLattice::new(
            Some(format!("{label}[numerical]")),
            ng,
        )?);
        let full_gram_q = numerical.gram_q();
        // exp(iω₀) = (1, 0, −ω₀²/2) + i(0, ω₀, 0).
        let half = Rat::new(Int::one(), Int::from(2));
        let mut re = vec![Rat::zero(); n];
        re[0] = Rat::one();
        re[n - 1] = -(&half * &osq);
        let mut im = vec![Rat::zero(); n];
        im[1..=rho].clone_from_slice(&omega0);
        let reference = StabVector { re, im };
        Ok(StabilityModel {
            label: label.to_string(),
            ns_gram,
            ns_gram_q,
            numerical,
            full_gram_q,
            omega0,
            reference,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rho(&self) -> usize {
        self.ns_gram.rows()
    }

    pub fn ns_gram(&self) -> &IMat {
        &self.ns_gram
    }

    pub fn numerical_lattice(&self) -> &Arc<IntegerLattice> {
        &self.numerical
    }

    pub fn omega0(&self) -> &[Rat] {
        &self.omega0
    }

    /// The orientation reference `exp(iω₀)`.
    pub fn reference(&self) -> &StabVector {
        &self.reference
    }

    /// Néron–Severi pairing of rational coordinate rows.
    pub fn ns_pair(&self, a: &[Rat], b: &[Rat]) -> Rat {
        crate::mat::pair(&self.ns_gram_q, a, b)
    }

    /// Full numerical pairing of `(rank, NS, degree)` rows.
    pub fn full_pair(&self, a: &[Rat], b: &[Rat]) -> Rat {
        crate::mat::pair(&self.full_gram_q, a, b)
    }

    fn full_gram_times(&self, v: &[Rat]) -> Vec<Rat> {
        crate::mat::row_mul(v, &self.full_gram_q)
    }
}

// ---------------------------------------------------------------------------
// Chamber points and exponentials

/// A tube-domain point `B + iω` with `ω² > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberPoint {
    b: Vec<Rat>,
    omega: Vec<Rat>,
}

impl ChamberPoint {
    pub fn new(model: &StabilityModel, b: Vec<Rat>, omega: Vec<Rat>) -> Result<Self, StabError> {
        if b.len() != model.rho() || omega.len() != model.rho() {
            return Err(StabError::DimensionMismatch);
        }
        if !model.ns_pair(&omega, &omega).is_positive() {
            return Err(StabError::NonPositiveOmega);
        }
        Ok(ChamberPoint { b, omega })
    }

    /// Skip the `ω² > 0` check.  Only the algebraic expansion identities are
    /// meaningful at such a point; chamber semantics are not.
    pub fn unchecked(b: Vec<Rat>, omega: Vec<Rat>) -> Self {
        ChamberPoint { b, omega }
    }

    pub fn b(&self) -> &[Rat] {
        &self.b
    }

    pub fn omega(&self) -> &[Rat] {
        &self.omega
    }
}

/// `exp(B+iω) = (1, B, (B²−ω²)/2) + i(0, ω, B·ω)`.
pub fn exp_vector(model: &StabilityModel, p: &ChamberPoint) -> Result<StabVector, StabError> {
    let rho = model.rho();
    if p.b.len() != rho || p.omega.len() != rho {
        return Err(StabError::DimensionMismatch);
    }
    let half = Rat::new(Int::one(), Int::from(2));
    let bb = model.ns_pair(&p.b, &p.b);
    let oo = model.ns_pair(&p.omega, &p.omega);
    let bo = model.ns_pair(&p.b, &p.omega);
    let mut re = Vec::with_capacity(rho + 2);
    re.push(Rat::one());
    re.extend(p.b.iter().cloned());
    re.push(&half * &(&bb - &oo));
    let mut im = Vec::with_capacity(rho + 2);
    im.push(Rat::zero());
    im.extend(p.omega.iter().cloned());
    im.push(bo);
    Ok(StabVector { re, im })
}

/// The charge of `v` against an arbitrary frame: `(⟨re,v⟩, ⟨im,v⟩)`.
pub fn charge_of_stab(
    model: &StabilityModel,
    w: &StabVector,
    v: &MukaiVector,
) -> Result<(Rat, Rat), StabError> {
    let n = model.rho() + 2;
    if w.re.len() != n || w.im.len() != n || v.c1.len() != model.rho() {
        return Err(StabError::DimensionMismatch);
    }
    let full = v.full_coords();
    Ok((model.full_pair(&w.re, &full), model.full_pair(&w.im, &full)))
}

/// `Z(v) = ⟨exp(B+iω), v⟩` as an exact `(Re, Im)` pair.
pub fn central_charge(
    model: &StabilityModel,
    p: &ChamberPoint,
    v: &MukaiVector,
) -> Result<(Rat, Rat), StabError> {
    let w = exp_vector(model, p)?;
    charge_of_stab(model, &w, v)
}

/// `Im(Z(v)·conj(Z(w)))`; zero exactly when the two charges are
/// real-proportional.
pub fn alignment_of_charges(zv: &(Rat, Rat), zw: &(Rat, Rat)) -> Rat {
    &zv.1 * &zw.0 - &zv.0 * &zw.1
}

/// Wall function for the pair `(v, w)` at `p`.
pub fn phase_alignment(
    model: &StabilityModel,
    p: &ChamberPoint,
    v: &MukaiVector,
    w: &MukaiVector,
) -> Result<Rat, StabError> {
    let zv = central_charge(model, p, v)?;
    let zw = central_charge(model, p, w)?;
    Ok(alignment_of_charges(&zv, &zw))
}

// ---------------------------------------------------------------------------
// Membership

/// Set-membership flags for a frame, with a violating class when a flag
/// fails for root reasons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipReport {
    /// Spans a positive-definite two-plane.
    pub in_p: bool,
    /// In the component of the orientation reference.
    pub in_p_plus: bool,
    /// Additionally orthogonal to no `(−2)`-class.
    pub in_p_plus_0: bool,
    /// Normalized isotropic frame `exp(B+iω)` with `B, ω` rational.
    pub in_q: bool,
    /// `in_q` and no positive-rank root has非 real non-positive charge.
    pub in_l: bool,
    /// First violating class found by a scan, if any flag failed for one.
    pub witness: Option<MukaiVector>,
    /// Whether every bounded scan that ran covered its full window.
    pub scan_complete: bool,
}

fn mukai_from_full(coords: &[Int]) -> MukaiVector {
    let n = coords.len();
    MukaiVector {
        r: coords[0].clone(),
        c1: coords[1..n - 1].to_vec(),
        s: coords[n - 1].clone(),
    }
}

/// Exact membership of `w` in the nested chamber sets.  The root scan behind
/// `in_p_plus_0` is always complete (the orthogonal complement of a positive
/// two-plane is negative definite); the positive-rank scan behind `in_l` is
/// bounded by `r_max` and reports completeness through `scan_complete`.
pub fn membership(
    model: &StabilityModel,
    w: &StabVector,
    r_max: u32,
) -> Result<MembershipReport, StabError> {
    let rho = model.rho();
    let n = rho + 2;
    if w.re.len() != n || w.im.len() != n {
        return Err(StabError::DimensionMismatch);
    }
    let g_rr = model.full_pair(&w.re, &w.re);
    let g_ri = model.full_pair(&w.re, &w.im);
    let g_ii = model.full_pair(&w.im, &w.im);
    let det = &(&g_rr * &g_ii) - &(&g_ri * &g_ri);
    let in_p = g_rr.is_positive() && det.is_positive();

    let reference = model.reference();
    let o11 = model.full_pair(&w.re, &reference.re);
    let o12 = model.full_pair(&w.re, &reference.im);
    let o21 = model.full_pair(&w.im, &reference.re);
    let o22 = model.full_pair(&w.im, &reference.im);
    let orient = &(&o11 * &o22) - &(&o12 * &o21);
    let in_p_plus = in_p && orient.is_positive();

    let mut witness = None;
    let mut scan_complete = true;

    let in_p_plus_0 = if in_p_plus {
        let plane = QMat::from_rows(vec![w.re.clone(), w.im.clone()]);
        let report = roots_orthogonal_to_plane(model.numerical_lattice(), &plane)?;
        if let Some(root) = report.roots.first() {
            witness = Some(mukai_from_full(root));
        }
        report.roots.is_empty()
    } else {
        false
    };

    let one = Rat::one();
    let in_q = w.re[0] == one
        && w.im[0].is_zero()
        && g_rr == g_ii
        && g_ri.is_zero()
        && (&g_rr + &g_ii).is_positive();

    let in_l = if in_q {
        let b = &w.re[1..=rho];
        let omega = &w.im[1..=rho];
        let osq = model.ns_pair(omega, omega);
        if osq.is_positive() {
            let query = BoundedRootQuery {
                ns_gram: model.ns_gram(),
                b,
                omega,
                r_max,
                cap: None,
            };
            let scan = bounded_delta_plus_scan(&query)?;
            scan_complete = scan.complete;
            if let Some((r, c, s)) = scan.found.first() {
                if witness.is_none() {
                    witness = Some(MukaiVector::new(r.clone(), c.clone(), s.clone()));
                }
                false
            } else {
                true
            }
        } else {
            false
        }
    } else {
        false
    };

    Ok(MembershipReport {
        in_p,
        in_p_plus,
        in_p_plus_0,
        in_q,
        in_l,
        witness,
        scan_complete,
    })
}

// ---------------------------------------------------------------------------
// Sufficiency

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SufficiencyOutcome {
    /// `ω² > 2`: no positive-rank root can have real non-positive charge.
    HoldsByOmegaSq,
    /// The bounded scan over ranks `1..=r_max` found no violating class.
    HoldsByScan { complete: bool },
    /// A positive-rank root with `Z ∈ R_{≤0}`, with its exact charge.
    Violated {
        delta: MukaiVector,
        charge: (Rat, Rat),
    },
}

/// Decide whether every positive-rank `(−2)`-class keeps its charge off the
/// non-positive real axis at `p`, first by the `ω² > 2` window bound, then by
/// an exhaustive bounded enumeration.
pub fn sufficiency_check(
    model: &StabilityModel,
    p: &ChamberPoint,
    r_max: u32,
) -> Result<SufficiencyOutcome, StabError> {
    if p.b.len() != model.rho() || p.omega.len() != model.rho() {
        return Err(StabError::DimensionMismatch);
    }
    let osq = model.ns_pair(&p.omega, &p.omega);
    if !osq.is_positive() {
        return Err(StabError::NonPositiveOmega);
    }
    if osq > Rat::from_integer(Int::from(2)) {
        return Ok(SufficiencyOutcome::HoldsByOmegaSq);
    }
    let query = BoundedRootQuery {
        ns_gram: model.ns_gram(),
        b: &p.b,
        omega: &p.omega,
        r_max,
        cap: None,
    };
    let scan = bounded_delta_plus_scan(&query)?;
    if let Some((r, c, s)) = scan.found.first() {
        let delta = MukaiVector::new(r.clone(), c.clone(), s.clone());
        let charge = central_charge(model, p, &delta)?;
        Ok(SufficiencyOutcome::Violated { delta, charge })
    } else {
        Ok(SufficiencyOutcome::HoldsByScan {
            complete: scan.complete,
        })
    }
}

// ---------------------------------------------------------------------------
// Paths

/// A piecewise-linear path of chamber points with an optional piecewise-linear
/// phase parameter, one value per breakpoint.
#[derive(Debug, Clone)]
pub struct PathInChamber {
    points: Vec<ChamberPoint>,
    lambda: Option<Vec<Rat>>,
}

impl PathInChamber {
    /// Validates that every interpolated point keeps `ω² > 0`, exactly.
    pub fn new(
        model: &StabilityModel,
        points: Vec<ChamberPoint>,
        lambda: Option<Vec<Rat>>,
    ) -> Result<Self, StabError> {
        if points.is_empty() {
            return Err(StabError::InvalidPath(
                "path needs at least one point".into(),
            ));
        }
        if let Some(l) = &lambda {
            if l.len() != points.len() {
                return Err(StabError::InvalidPath(
                    "phase list must match the breakpoint count".into(),
                ));
            }
        }
        for p in &points {
            if p.b.len() != model.rho() {
                return Err(StabError::DimensionMismatch);
            }
            if !model.ns_pair(&p.omega, &p.omega).is_positive() {
                return Err(StabError::NonPositiveOmega);
            }
        }
        for (i, seg) in points.windows(2).enumerate() {
            let o = lerp_polys(&seg[0].omega, &seg[1].omega);
            let osq = poly_pair(&model.ns_gram_q, &o, &o);
            let chain = SturmChain::of(&osq);
            if chain.count_roots_open(&Rat::zero(), &Rat::one()) > 0 {
                return Err(StabError::InvalidPath(format!(
                    "segment {i} leaves the positive cone"
                )));
            }
        }
        Ok(PathInChamber { points, lambda })
    }

    pub fn points(&self) -> &[ChamberPoint] {
        &self.points
    }

    pub fn lambda(&self) -> Option<&[Rat]> {
        self.lambda.as_deref()
    }

    pub fn segments(&self) -> usize {
        self.points.len() - 1
    }
}

/// Coordinate-wise linear interpolation `a + t(b−a)` as degree-≤1 polynomials.
fn lerp_polys(a: &[Rat], b: &[Rat]) -> Vec<Poly> {
    a.iter()
        .zip(b)
        .map(|(x, y)| Poly::linear(x.clone(), y - x))
        .collect()
}

/// `Σ_{ij} a_i(t)·g_{ij}·b_j(t)`.
fn poly_pair(g: &QMat, a: &[Poly], b: &[Poly]) -> Poly {
    let mut acc = Poly::zero();
    for (j, bj) in b.iter().enumerate() {
        if bj.is_zero() {
            continue;
        }
        let mut coeff = Poly::zero();
        for (i, ai) in a.iter().enumerate() {
            let gij = g.at(i, j);
            if gij.is_zero() {
                continue;
            }
            coeff = coeff.add(&ai.scale(gij));
        }
        acc = acc.add(&coeff.mul(bj));
    }
    acc
}

fn poly_dot_const(a: &[Poly], w: &[Rat]) -> Poly {
    let mut acc = Poly::zero();
    for (ai, wi) in a.iter().zip(w) {
        if wi.is_zero() {
            continue;
        }
        acc = acc.add(&ai.scale(wi));
    }
    acc
}

/// `(Re Z(t), Im Z(t))` of `v` along one linear segment, degree ≤ 2 each.
fn charge_polys(
    model: &StabilityModel,
    pa: &ChamberPoint,
    pb: &ChamberPoint,
    v: &MukaiVector,
) -> (Poly, Poly) {
    let b = lerp_polys(&pa.b, &pb.b);
    let o = lerp_polys(&pa.omega, &pb.omega);
    let c: Vec<Poly> =
        v.c1.iter()
            .map(|x| Poly::constant(Rat::from_integer(x.clone())))
            .collect();
    let bc = poly_pair(&model.ns_gram_q, &b, &c);
    let oc = poly_pair(&model.ns_gram_q, &o, &c);
    let bb = poly_pair(&model.ns_gram_q, &b, &b);
    let oo = poly_pair(&model.ns_gram_q, &o, &o);
    let bo = poly_pair(&model.ns_gram_q, &b, &o);
    let r = Rat::from_integer(v.r.clone());
    let half_r = &r / &Rat::from_integer(Int::from(2));
    // Re Z = B·c − s − (B²−ω²)/2 · r
    let re = bc
        .sub(&Poly::constant(Rat::from_integer(v.s.clone())))
        .sub(&bb.sub(&oo).scale(&half_r));
    // Im Z = ω·c − (B·ω)·r
    let im = oc.sub(&bo.scale(&r));
    (re, im)
}

/// The frame `exp(B(t)+iω(t))` of a segment, coordinate-wise polynomials.
fn exp_frame_polys(
    model: &StabilityModel,
    pa: &ChamberPoint,
    pb: &ChamberPoint,
) -> (Vec<Poly>, Vec<Poly>) {
    let rho = model.rho();
    let b = lerp_polys(&pa.b, &pb.b);
    let o = lerp_polys(&pa.omega, &pb.omega);
    let bb = poly_pair(&model.ns_gram_q, &b, &b);
    let oo = poly_pair(&model.ns_gram_q, &o, &o);
    let bo = poly_pair(&model.ns_gram_q, &b, &o);
    let half = Rat::new(Int::one(), Int::from(2));
    let mut re = Vec::with_capacity(rho + 2);
    re.push(Poly::constant(Rat::one()));
    re.extend(b);
    re.push(bb.sub(&oo).scale(&half));
    let mut im = Vec::with_capacity(rho + 2);
    im.push(Poly::zero());
    im.extend(o);
    im.push(bo);
    (re, im)
}

/// Refine interval brackets until consecutive root locations are strictly
/// separated, so every between-roots region admits a sample point.
fn separate_locations(p: &Poly, mut locs: Vec<RootLocation>) -> Vec<RootLocation> {
    if locs.len() < 2 {
        return locs;
    }
    let sf = p.squarefree_part();
    loop {
        let mut touched = false;
        for i in 0..locs.len() - 1 {
            if locs[i].upper() >= locs[i + 1].lower() {
                touched = true;
                for k in [i, i + 1] {
                    if let RootLocation::Interval(lo, hi) = locs[k].clone() {
                        let width = (&hi - &lo) / Rat::from_integer(Int::from(4));
                        let (nlo, nhi) = refine_interval(&sf, &lo, &hi, &width);
                        locs[k] = if nlo == nhi {
                            RootLocation::Exact(nlo)
                        } else {
                            RootLocation::Interval(nlo, nhi)
                        };
                    }
                }
            }
        }
        if !touched {
            return locs;
        }
    }
}

/// Root locations and per-region signs of `p` over `[0,1]`.
fn roots_and_signs(p: &Poly) -> (Vec<RootLocation>, Vec<Option<i8>>) {
    if p.is_zero() {
        return (Vec::new(), vec![Some(0)]);
    }
    let zero = Rat::zero();
    let one = Rat::one();
    let locs = separate_locations(p, isolate_roots(p, &zero, &one));
    let signs = region_samples(&zero, &one, &locs)
        .into_iter()
        .map(|s| s.map(|x| p.sign_at(&x)))
        .collect();
    (locs, signs)
}

/// Deterministic parallel map over `n` jobs, honoring `KUMMERLAT_THREADS`.
fn run_jobs<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if n == 0 {
        return Vec::new();
    }
    let threads = std::env::var("KUMMERLAT_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
        .min(n);
    if threads <= 1 {
        return (0..n).map(f).collect();
    }
    let mut out: Vec<Option<T>> = Vec::with_capacity(n);
    out.resize_with(n, || None);
    let chunk = n.div_ceil(threads);
    std::thread::scope(|scope| {
        for (c, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (off, cell) in slot.iter_mut().enumerate() {
                    *cell = Some(f(c * chunk + off));
                }
            });
        }
    });
    out.into_iter().map(|x| x.expect("job ran")).collect()
}

/// A sign change of one pair's alignment along the path.  The parameter is
/// bracketed by `[t_lo, t_hi]` within the segment; exact rational roots have
/// `t_lo = t_hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingEvent {
    pub segment: usize,
    pub t_lo: Rat,
    pub t_hi: Rat,
    pub pair: (usize, usize),
    pub from_sign: i8,
    pub to_sign: i8,
}

struct SegmentPairScan {
    degenerate: bool,
    locs: Vec<RootLocation>,
    signs: Vec<Option<i8>>,
}

/// All parameters where two charges in `vectors` become real-proportional
/// along the path, as exact sign-change events ordered by position then pair.
///
/// A constant extra rotation of all charges drops out of the alignment, so an
/// attached phase parameter does not move walls; it is ignored here.  A root
/// sitting exactly on a breakpoint is reported once, on the earlier segment.
/// Stretches where the alignment vanishes identically (without both charges
/// vanishing) produce a single event at the entry of the stretch once a sign
/// flip is confirmed on the far side.
pub fn wall_crossings(
    model: &StabilityModel,
    path: &PathInChamber,
    vectors: &[MukaiVector],
) -> Result<Vec<CrossingEvent>, StabError> {
    for v in vectors {
        if v.c1.len() != model.rho() {
            return Err(StabError::DimensionMismatch);
        }
    }
    let mut pairs = Vec::new();
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            pairs.push((i, j));
        }
    }
    let nseg = path.segments();
    if nseg == 0 || pairs.is_empty() {
        return Ok(Vec::new());
    }
    let points = path.points();
    let jobs = nseg * pairs.len();
    let scans = run_jobs(jobs, |job| {
        let seg = job / pairs.len();
        let (i, j) = pairs[job % pairs.len()];
        let (rev, imv) = charge_polys(model, &points[seg], &points[seg + 1], &vectors[i]);
        let (rew, imw) = charge_polys(model, &points[seg], &points[seg + 1], &vectors[j]);
        if rev.is_zero() && imv.is_zero() && rew.is_zero() && imw.is_zero() {
            return SegmentPairScan {
                degenerate: true,
                locs: Vec::new(),
                signs: Vec::new(),
            };
        }
        let alignment = imv.mul(&rew).sub(&rev.mul(&imw));
        let (locs, signs) = roots_and_signs(&alignment);
        SegmentPairScan {
            degenerate: false,
            locs,
            signs,
        }
    });
    for seg in 0..nseg {
        for p in 0..pairs.len() {
            if scans[seg * pairs.len() + p].degenerate {
                return Err(StabError::DegeneratePath { segment: seg });
            }
        }
    }

    let mut events = Vec::new();
    for (p, &pair) in pairs.iter().enumerate() {
        let mut carried: i8 = 0;
        let mut pending: Option<(usize, Rat, Rat)> = None;
        for seg in 0..nseg {
            let scan = &scans[seg * pairs.len() + p];
            for i in 0..=scan.locs.len() {
                if let Some(s) = scan.signs[i] {
                    if s != 0 {
                        if let Some((eseg, lo, hi)) = pending.take() {
                            if carried != 0 && s != carried {
                                events.push(CrossingEvent {
                                    segment: eseg,
                                    t_lo: lo,
                                    t_hi: hi,
                                    pair,
                                    from_sign: carried,
                                    to_sign: s,
                                });
                            }
                        }
                        carried = s;
                    }
                }
                if i < scan.locs.len() {
                    let loc = &scan.locs[i];
                    if pending.is_none() {
                        pending = Some((seg, loc.lower().clone(), loc.upper().clone()));
                    }
                }
            }
        }
    }
    events.sort_by(|a, b| {
        (a.segment, &a.t_lo, &a.t_hi, a.pair).cmp(&(b.segment, &b.t_lo, &b.t_hi, b.pair))
    });
    Ok(events)
}

// ---------------------------------------------------------------------------
// Lifts

/// A frame with its phase lift: `phase ∈ [0,2)` records the rotation applied
/// beyond the quarter turns already baked into `base`, and `winding` counts
/// completed double turns (deck moves).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedPoint {
    pub base: StabVector,
    pub phase: Rat,
    pub winding: Int,
}

impl LiftedPoint {
    pub fn new(base: StabVector) -> Self {
        LiftedPoint {
            base,
            phase: Rat::zero(),
            winding: Int::zero(),
        }
    }
}

fn rotate_frame_quarters(w: &StabVector, steps: usize) -> StabVector {
    let mut re = w.re.clone();
    let mut im = w.im.clone();
    for _ in 0..steps % 4 {
        // Multiplication by e^{−iπ/2}: (re, im) ↦ (im, −re).
        let old_re = re;
        re = im;
        im = old_re.into_iter().map(|x| -x).collect();
    }
    StabVector { re, im }
}

/// Rotate a lifted frame by `e^{−iπλ}` with exact bookkeeping: quarter turns
/// are applied to the base whenever the accumulated phase crosses a
/// half-integer, the remainder stays in `phase`, and `winding` advances by
/// the number of completed double turns.  This is an exact group action:
/// composing two rotations equals rotating by the sum for every rational λ.
pub fn apply_lambda(pt: &LiftedPoint, lambda: &Rat) -> LiftedPoint {
    let two = Rat::from_integer(Int::from(2));
    let total = &pt.phase + lambda;
    let half_steps = floor_rat(&(&total * &two)) - floor_rat(&(&pt.phase * &two));
    let steps = half_steps.mod_floor(&Int::from(4));
    let base = rotate_frame_quarters(&pt.base, usize::try_from(&steps).expect("small residue"));
    let winding = &pt.winding + floor_rat(&(&total / &two)) - floor_rat(&(&pt.phase / &two));
    let phase = &total - &(&two * &Rat::from_integer(floor_rat(&(&total / &two))));
    LiftedPoint {
        base,
        phase,
        winding,
    }
}

/// Which side of the reference axis the tracking curve is on: strictly above,
/// or on/below it.  The axis itself is grouped with the lower bucket so that
/// a clockwise turn counts exactly when the curve lands back on the positive
/// axis — the same convention as the floor arithmetic in [`apply_lambda`].
#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Above,
    NotAbove,
}

/// Sign of `x` at an isolated root of `y`, assuming the two have no common
/// root there (guaranteed for positive frames).  Interval brackets are
/// refined until they are free of roots of `x`.
fn sign_at_root(x: &Poly, y: &Poly, loc: &RootLocation) -> i8 {
    match loc {
        RootLocation::Exact(r) => x.sign_at(r),
        RootLocation::Interval(lo, hi) => {
            let sf = y.squarefree_part();
            let chain = SturmChain::of(x);
            let (mut lo, mut hi) = (lo.clone(), hi.clone());
            loop {
                if x.sign_at(&lo) != 0
                    && x.sign_at(&hi) != 0
                    && chain.count_roots_open(&lo, &hi) == 0
                {
                    let mid = (&lo + &hi) / Rat::from_integer(Int::from(2));
                    return x.sign_at(&mid);
                }
                let width = (&hi - &lo) / Rat::from_integer(Int::from(4));
                let refined = refine_interval(&sf, &lo, &hi, &width);
                lo = refined.0;
                hi = refined.1;
            }
        }
    }
}

/// Exact positivity of the frame Gram on a whole segment: `g₁₁ > 0` and
/// `g₁₁g₂₂ − g₁₂² > 0` on `[0,1]`.
fn frame_positive_on_segment(model: &StabilityModel, re: &[Poly], im: &[Poly]) -> bool {
    let g11 = poly_pair(&model.full_gram_q, re, re);
    let g12 = poly_pair(&model.full_gram_q, re, im);
    let g22 = poly_pair(&model.full_gram_q, im, im);
    let det = g11.mul(&g22).sub(&g12.mul(&g12));
    let zero = Rat::zero();
    let one = Rat::one();
    for p in [&g11, &det] {
        if p.is_zero() || p.sign_at(&zero) <= 0 || p.sign_at(&one) <= 0 {
            return false;
        }
        if SturmChain::of(p).count_roots_open(&zero, &one) > 0 {
            return false;
        }
    }
    true
}

/// Winding of the lifted path, plus the endpoint lift.
///
/// The reference curve is the frame paired against the orientation
/// reference's real part; it cannot vanish while the frame stays positive.
/// The returned integer counts its net clockwise passes through the positive
/// real axis — for a closed loop this is the deck-transformation count, and a
/// phase sweep `0 → 2` contributes exactly `+1`.  Each segment must either
/// hold the phase fixed (a chamber move) or hold the chamber point fixed (a
/// phase sweep); phase breakpoints must be half-integers so every rotation is
/// an exact quarter turn.
pub fn lift_path_winding(
    model: &StabilityModel,
    path: &PathInChamber,
) -> Result<(Int, LiftedPoint), StabError> {
    let points = path.points();
    let zeros = vec![Rat::zero(); points.len()];
    let lambdas: &[Rat] = path.lambda().unwrap_or(&zeros);
    let two = Rat::from_integer(Int::from(2));
    let mut doubled = Vec::with_capacity(lambdas.len());
    for l in lambdas {
        let d = l * &two;
        if !d.is_integer() {
            return Err(StabError::InvalidPath(
                "phase breakpoints must be half-integers for exact lifting".into(),
            ));
        }
        doubled.push(d.to_integer());
    }

    let refw = model.full_gram_times(&model.reference().re);
    let four = Int::from(4);
    let mut winding = Int::zero();

    // Initial side of the reference curve.
    let start = exp_vector(model, &points[0])?;
    let k0 = usize::try_from(&doubled[0].mod_floor(&four)).expect("small residue");
    let start_rot = rotate_frame_quarters(&start, k0);
    let y0: Rat = start_rot
        .im
        .iter()
        .zip(&refw)
        .map(|(a, b)| a * b)
        .fold(Rat::zero(), |acc, v| acc + v);
    let mut side = if y0.is_positive() {
        Side::Above
    } else {
        Side::NotAbove
    };

    for seg in 0..path.segments() {
        let (pa, pb) = (&points[seg], &points[seg + 1]);
        let (la, lb) = (&doubled[seg], &doubled[seg + 1]);
        if la == lb {
            // Chamber move at constant phase.
            let (re, im) = exp_frame_polys(model, pa, pb);
            if !frame_positive_on_segment(model, &re, &im) {
                return Err(StabError::PathHitsWall { segment: seg });
            }
            let x_raw = poly_dot_const(&re, &refw);
            let y_raw = poly_dot_const(&im, &refw);
            let k = usize::try_from(&la.mod_floor(&four)).expect("small residue");
            let (mut x, mut y) = (x_raw, y_raw);
            for _ in 0..k {
                let old_x = x;
                x = y;
                y = old_x.neg();
            }
            if y.is_zero() {
                if x.is_zero() {
                    return Err(StabError::PathHitsWall { segment: seg });
                }
                side = Side::NotAbove;
                continue;
            }
            let (locs, signs) = roots_and_signs(&y);
            for (i, loc) in locs.iter().enumerate() {
                let xs = sign_at_root(&x, &y, loc);
                // Landing on the positive axis from above: a clockwise pass
                // completes here.
                if side == Side::Above && xs > 0 {
                    winding += 1;
                }
                // Leaving the axis upward: a counterclockwise pass starts
                // here and uncounts immediately.
                match signs[i + 1] {
                    Some(s) if s > 0 => {
                        if xs > 0 {
                            winding -= 1;
                        }
                        side = Side::Above;
                    }
                    _ => side = Side::NotAbove,
                }
            }
            if locs.is_empty() {
                if let Some(s) = signs[0] {
                    side = if s > 0 { Side::Above } else { Side::NotAbove };
                }
            }
        } else {
            // Phase sweep at a fixed chamber point.
            if pa != pb {
                return Err(StabError::InvalidPath(format!(
                    "segment {seg} varies the chamber point and the phase together"
                )));
            }
            let frame = exp_vector(model, pa)?;
            let k = usize::try_from(&la.mod_floor(&four)).expect("small residue");
            let rotated = rotate_frame_quarters(&frame, k);
            let dot = |v: &[Rat]| -> Rat {
                v.iter()
                    .zip(&refw)
                    .map(|(a, b)| a * b)
                    .fold(Rat::zero(), |acc, val| acc + val)
            };
            let mut x = dot(&rotated.re);
            let mut y = dot(&rotated.im);
            let steps = lb - la;
            let clockwise = steps.is_positive();
            let n = steps.abs();
            let mut i = Int::zero();
            while i < n {
                if clockwise {
                    // The quarter arc lands on or crosses the positive axis
                    // exactly when it starts strictly above it with x ≥ 0.
                    if y.is_positive() && !x.is_negative() {
                        winding += 1;
                    }
                    let old_x = x;
                    x = y;
                    y = -old_x;
                } else {
                    // Counterclockwise, the pass counts at departure: start
                    // on or below the axis with x > 0.
                    if x.is_positive() && !y.is_positive() {
                        winding -= 1;
                    }
                    let old_x = x;
                    x = -y;
                    y = old_x;
                }
                i += 1;
            }
            side = if y.is_positive() {
                Side::Above
            } else {
                Side::NotAbove
            };
        }
    }

    let start_lift = apply_lambda(&LiftedPoint::new(start), &lambdas[0]);
    let end_frame = exp_vector(model, points.last().expect("nonempty"))?;
    let l_end = lambdas.last().expect("nonempty");
    let k_end =
        usize::try_from(&doubled.last().expect("nonempty").mod_floor(&four)).expect("small");
    let base = rotate_frame_quarters(&end_frame, k_end);
    let phase = l_end - &(&two * &Rat::from_integer(floor_rat(&(l_end / &two))));
    let endpoint = LiftedPoint {
        base,
        phase,
        winding: &start_lift.winding + &winding,
    };
    Ok((winding, endpoint))
}

// ---------------------------------------------------------------------------
// Induced frames from the geometric layer

/// The numerical stability frame induced by a geometric interpretation on the
/// resolved quotient: the rank-20 algebraic frame orthogonal to the period
/// plane and the hyperbolic pair, the sixteen exceptional classes in that
/// frame, and the induced `B`-field and Kähler data.
///
/// The `B`-field is recorded through its algebraic component; the remainder
/// pairs to zero with every vector of the numerical lattice and is invisible
/// to charges.
#[derive(Debug, Clone)]
pub struct InducedStability {
    model: StabilityModel,
    e_hat_ns: Vec<Vec<Int>>,
    b_ns: Vec<Rat>,
    omega_ns: Vec<Rat>,
    exp_omega_ns: Vec<Rat>,
    omega_t_sq: Rat,
}

impl InducedStability {
    pub fn model(&self) -> &StabilityModel {
        &self.model
    }

    /// The sixteen exceptional classes in NS coordinates.
    pub fn e_hat_ns(&self) -> &[Vec<Int>] {
        &self.e_hat_ns
    }

    pub fn b_ns(&self) -> &[Rat] {
        &self.b_ns
    }

    /// The pushed Kähler class.
    pub fn omega_ns(&self) -> &[Rat] {
        &self.omega_ns
    }

    /// Half the pushed Kähler class — the exponential/reference scaling.
    pub fn exp_omega_ns(&self) -> &[Rat] {
        &self.exp_omega_ns
    }

    pub fn omega_t_sq(&self) -> &Rat {
        &self.omega_t_sq
    }

    /// The induced exponential point `(B, ω/2)`.
    pub fn exp_point(&self) -> ChamberPoint {
        ChamberPoint {
            b: self.b_ns.clone(),
            omega: self.exp_omega_ns.clone(),
        }
    }

    /// The induced boundary-probe point `(B, ω)`.
    pub fn probe_point(&self) -> ChamberPoint {
        ChamberPoint {
            b: self.b_ns.clone(),
            omega: self.omega_ns.clone(),
        }
    }

    /// `(0, Ê_i, k+1)`.
    pub fn exceptional_vector(&self, i: usize, k: &Int) -> MukaiVector {
        MukaiVector {
            r: Int::zero(),
            c1: self.e_hat_ns[i].clone(),
            s: k + Int::one(),
        }
    }

    /// A rational direction pairing to `δ_{ij}` against the sixteen
    /// exceptional classes.
    pub fn dual_direction(&self, i: usize) -> Result<Vec<Rat>, StabError> {
        let rho = self.model.rho();
        let gq = imat_to_q(self.model.ns_gram());
        let e_q = QMat::from_rows(
            self.e_hat_ns
                .iter()
                .map(|row| row.iter().cloned().map(Rat::from_integer).collect())
                .collect(),
        );
        // d·(G·Eᵀ) = δ_i, so d lies in the row-solution of the ρ×16 system.
        let m = gq.mul(&e_q.transpose());
        let mut target = vec![Rat::zero(); self.e_hat_ns.len()];
        target[i] = Rat::one();
        let d = solve_in_row_span(&target, &m)
            .ok_or_else(|| StabError::NotInducible("exceptional classes are degenerate".into()))?;
        debug_assert_eq!(d.len(), rho);
        Ok(d)
    }

    /// Alignment probe against the point class for all sixteen exceptional
    /// classes, optionally with the Kähler class perturbed along one vector.
    pub fn probe_exceptional(
        &self,
        k: &Int,
        omega_perturbation: Option<(usize, &Rat)>,
    ) -> Result<ProbeReport, StabError> {
        let mut omega = self.omega_ns.clone();
        if let Some((dir, eps)) = omega_perturbation {
            let dual = self.dual_direction(dir)?;
            for (o, d) in omega.iter_mut().zip(&dual) {
                *o = &*o + &(eps * d);
            }
        }
        let point = ChamberPoint::new(&self.model, self.b_ns.clone(), omega)?;
        let v = MukaiVector::skyscraper(self.model.rho());
        let zv = central_charge(&self.model, &point, &v)?;
        let mut entries = Vec::with_capacity(self.e_hat_ns.len());
        for i in 0..self.e_hat_ns.len() {
            let w = self.exceptional_vector(i, k);
            let zw = central_charge(&self.model, &point, &w)?;
            entries.push(ProbeEntry {
                index: i,
                alignment: alignment_of_charges(&zv, &zw),
                charge: zw,
            });
        }
        Ok(ProbeReport {
            hypothesis_omega_sq_exceeds_one: self.omega_t_sq > Rat::one(),
            entries,
        })
    }
}

/// One exceptional class's wall data at a probe point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeEntry {
    pub index: usize,
    pub alignment: Rat,
    /// `(Re, Im)` of the class's charge, for side-of-wall diagnostics.
    pub charge: (Rat, Rat),
}

/// Wall-incidence probe for the sixteen exceptional classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    /// The stated hypothesis `ω² > 1` on the covering side, recorded but not
    /// enforced — the incidence claim itself is scale-free.
    pub hypothesis_omega_sq_exceeds_one: bool,
    pub entries: Vec<ProbeEntry>,
}

impl ProbeReport {
    pub fn all_alignments_zero(&self) -> bool {
        self.entries.iter().all(|e| e.alignment.is_zero())
    }
}

/// Build the induced numerical frame from a certified model and geometric
/// data: the algebraic sublattice is the orthogonal complement of the period
/// plane together with the hyperbolic pair, and the reference polarization is
/// half the pushed Kähler class.
pub fn induced_stability(
    model: &KummerModel,
    g: &GeometricInterpretation,
) -> Result<InducedStability, StabError> {
    let gamma = model.lattice().clone();
    let p1 = model.push_h2(g.omega1().coords());
    let p2 = model.push_h2(g.omega2().coords());
    let rows = vec![
        model.to_basis_coords_rational(p1.coords()),
        model.to_basis_coords_rational(p2.coords()),
        model.to_basis_coords_rational(model.u_hat().coords()),
        model.to_basis_coords_rational(model.u0_hat().coords()),
    ];
    let span = Sublattice::from_rows(gamma.clone(), rows)?;
    let ns = span.orthogonal_complement()?;
    if ns.rank() != 20 {
        return Err(StabError::NotInducible(format!(
            "algebraic frame has rank {}, expected 20",
            ns.rank()
        )));
    }
    let ns_basis = ns
        .basis_int()
        .ok_or_else(|| StabError::NotInducible("algebraic frame basis is not integral".into()))?;
    let gram_q = ns.induced_gram();
    let (p, m, z) = signature(&gram_q);
    if (p, m, z) != (1, 19, 0) {
        return Err(StabError::NotInducible(format!(
            "algebraic frame signature is ({p},{m},{z})"
        )));
    }
    let mut ns_gram = IMat::zero(20, 20);
    for i in 0..20 {
        for j in 0..20 {
            let v = gram_q.at(i, j);
            if !v.is_integer() {
                return Err(StabError::NotInducible("non-integral Gram entry".into()));
            }
            ns_gram.set(i, j, v.to_integer());
        }
    }

    let basis_q = imat_to_q(&ns_basis);
    let in_ns_coords = |ambient: &[Rat]| -> Result<Vec<Rat>, StabError> {
        let gcoords = model.to_basis_coords_rational(ambient);
        solve_in_row_span(&gcoords, &basis_q)
            .ok_or_else(|| StabError::NotInducible("vector misses the algebraic frame".into()))
    };

    let mut e_hat_ns = Vec::with_capacity(16);
    for i in 0..16 {
        let coords = in_ns_coords(model.e_hat(i).coords())?;
        let mut row = Vec::with_capacity(20);
        for c in coords {
            if !c.is_integer() {
                return Err(StabError::NotInducible(
                    "exceptional class has non-integral frame coordinates".into(),
                ));
            }
            row.push(c.to_integer());
        }
        e_hat_ns.push(row);
    }

    let orb = orbifold_map(model, g);
    // Orthogonal projection of B onto the algebraic frame: solve x·G = ⟨B, basis⟩.
    let b_gamma = model.to_basis_coords_rational(orb.b.coords());
    let gamma_gram = gamma.gram_q();
    let pairings: Vec<Rat> = (0..20)
        .map(|j| {
            let row: Vec<Rat> = (0..24)
                .map(|c| Rat::from_integer(ns_basis.at(j, c).clone()))
                .collect();
            crate::mat::pair(&gamma_gram, &b_gamma, &row)
        })
        .collect();
    let b_ns = solve_in_row_span(&pairings, &gram_q)
        .ok_or_else(|| StabError::NotInducible("B-field projection failed".into()))?;

    let omega_ns = in_ns_coords(orb.omega_x.coords())?;
    let half = Rat::new(Int::one(), Int::from(2));
    let exp_omega_ns: Vec<Rat> = omega_ns.iter().map(|x| x * &half).collect();
    let omega_t_sq = model
        .torus()
        .pair_h2(g.omega_t().coords(), g.omega_t().coords());

    let stab_model = StabilityModel::new("induced", ns_gram, exp_omega_ns.clone())?;
    Ok(InducedStability {
        model: stab_model,
        e_hat_ns,
        b_ns,
        omega_ns,
        exp_omega_ns,
        omega_t_sq,
    })
}

/// Spec-shaped convenience wrapper: build the induced frame and run the
/// sixteen-class probe at its boundary point.
pub fn boundary_probe_exceptional(
    model: &KummerModel,
    g: &GeometricInterpretation,
    k: &Int,
) -> Result<ProbeReport, StabError> {
    let induced = induced_stability(model, g)?;
    induced.probe_exceptional(k, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::kummer::{build_mukai_model, sample_interpretations};

    fn deg2_model() -> StabilityModel {
        let g = IMat::from_rows(vec![vec![int(2), int(0)], vec![int(0), int(-2)]]);
        StabilityModel::new("deg2", g, vec![rat(1, 1), rat(0, 1)]).unwrap()
    }

    fn point(model: &StabilityModel, b: &[Rat], omega: &[Rat]) -> ChamberPoint {
        ChamberPoint::new(model, b.to_vec(), omega.to_vec()).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let m = deg2_model();
        let a = MukaiVector::from_i64(1, &[0, 0], 0);
        let b = MukaiVector::from_i64(0, &[0, 0], 1);
        assert_eq!(mukai_pairing(&a, &b, m.ns_gram()).unwrap(), int(-1));
        let o = MukaiVector::from_i64(1, &[0, 0], 1);
        assert_eq!(mukai_pairing(&o, &o, m.ns_gram()).unwrap(), int(-2));
        let c = MukaiVector::from_i64(0, &[1, 0], 0);
        assert_eq!(mukai_pairing(&c, &c, m.ns_gram()).unwrap(), int(2));
        let short = MukaiVector::from_i64(1, &[1], 0);
        assert!(matches!(
            mukai_pairing(&short, &c, m.ns_gram()),
            Err(StabError::DimensionMismatch)
        ));
    }

    #[test]
    fn exp_identities() {
        let m = deg2_model();
        let samples = [
            (vec![rat(0, 1), rat(0, 1)], vec![rat(1, 1), rat(0, 1)]),
            (vec![rat(1, 2), rat(1, 3)], vec![rat(3, 2), rat(1, 2)]),
            (vec![rat(-2, 1), rat(1, 1)], vec![rat(2, 1), rat(-1, 3)]),
        ];
        for (b, omega) in samples {
            let p = point(&m, &b, &omega);
            let e = exp_vector(&m, &p).unwrap();
            let rr = m.full_pair(&e.re, &e.re);
            let ii = m.full_pair(&e.im, &e.im);
            let ri = m.full_pair(&e.re, &e.im);
            // ⟨℧,℧⟩ = 0 and ⟨℧,℧̄⟩ = 2ω².
            assert_eq!(rr, ii);
            assert!(ri.is_zero());
            let osq = m.ns_pair(&omega, &omega);
            assert_eq!(&rr + &ii, &osq * &rat(2, 1));
        }
        // Degenerate corner used only for the algebraic identity.
        let degenerate =
            ChamberPoint::unchecked(vec![rat(0, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1)]);
        let e = exp_vector(&m, &degenerate).unwrap();
        assert_eq!(e.re, vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]);
        assert!(e.im.iter().all(|x| x.is_zero()));
        // B = 0, ω² = 2.
        let p = point(&m, &[rat(0, 1), rat(0, 1)], &[rat(1, 1), rat(0, 1)]);
        let e = exp_vector(&m, &p).unwrap();
        assert_eq!(e.re, vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(-1, 1)]);
    }

    #[test]
    fn charge_examples_and_linearity() {
        let m = deg2_model();
        let pt = point(&m, &[rat(1, 2), rat(-1, 3)], &[rat(1, 1), rat(1, 2)]);
        let sky = MukaiVector::skyscraper(2);
        assert_eq!(
            central_charge(&m, &pt, &sky).unwrap(),
            (rat(-1, 1), rat(0, 1))
        );

        let p0 = point(&m, &[rat(0, 1), rat(0, 1)], &[rat(1, 1), rat(0, 1)]);
        let o = MukaiVector::from_i64(1, &[0, 0], 1);
        // ω² = 2, so Z = ω²/2 − 1 = 0.
        assert_eq!(central_charge(&m, &p0, &o).unwrap(), (rat(0, 1), rat(0, 1)));
        let c = MukaiVector::from_i64(0, &[1, 1], 0);
        // (0, ω·c) with ω = (1,0): ω·c = 2.
        assert_eq!(central_charge(&m, &p0, &c).unwrap(), (rat(0, 1), rat(2, 1)));

        let v = MukaiVector::from_i64(2, &[1, -1], 3);
        let w = MukaiVector::from_i64(-1, &[0, 2], 1);
        let sum = MukaiVector::new(
            &v.r + &w.r,
            vec![&v.c1[0] + &w.c1[0], &v.c1[1] + &w.c1[1]],
            &v.s + &w.s,
        );
        let zv = central_charge(&m, &pt, &v).unwrap();
        let zw = central_charge(&m, &pt, &w).unwrap();
        let zs = central_charge(&m, &pt, &sum).unwrap();
        assert_eq!(zs.0, &zv.0 + &zw.0);
        assert_eq!(zs.1, &zv.1 + &zw.1);
    }

    #[test]
    fn alignment_antisymmetry_and_scaling() {
        let m = deg2_model();
        let pt = point(&m, &[rat(1, 3), rat(1, 5)], &[rat(1, 1), rat(1, 4)]);
        let v = MukaiVector::from_i64(1, &[2, -1], 0);
        let w = MukaiVector::from_i64(0, &[1, 3], 2);
        let a_vw = phase_alignment(&m, &pt, &v, &w).unwrap();
        let a_wv = phase_alignment(&m, &pt, &w, &v).unwrap();
        assert_eq!(a_vw, -&a_wv);
        assert!(phase_alignment(&m, &pt, &v, &v).unwrap().is_zero());
        // Integer scaling preserves the sign pattern.
        let w3 = MukaiVector::from_i64(0, &[3, 9], 6);
        let a_scaled = phase_alignment(&m, &pt, &v, &w3).unwrap();
        assert_eq!(a_scaled, &a_vw * &rat(3, 1));
        assert!(!a_vw.is_zero());
    }

    #[test]
    fn membership_flags_at_large_volume() {
        let m = deg2_model();
        // ω² = 4: every flag holds.
        let p = point(&m, &[rat(0, 1), rat(0, 1)], &[rat(3, 2), rat(1, 2)]);
        let w = exp_vector(&m, &p).unwrap();
        let rep = membership(&m, &w, 3).unwrap();
        assert!(rep.in_p && rep.in_p_plus && rep.in_p_plus_0 && rep.in_q && rep.in_l);
        assert!(rep.scan_complete);
        assert!(rep.witness.is_none());
    }

    #[test]
    fn membership_detects_orthogonal_root() {
        let m = deg2_model();
        // exp(iω) with ω = (1,0) is orthogonal to the (−2)-class (0,(0,1),0),
        // and at ω² = 2 the rank-one class has charge zero.
        let p = point(&m, &[rat(0, 1), rat(0, 1)], &[rat(1, 1), rat(0, 1)]);
        let w = exp_vector(&m, &p).unwrap();
        let rep = membership(&m, &w, 3).unwrap();
        assert!(rep.in_p && rep.in_p_plus);
        assert!(!rep.in_p_plus_0);
        assert!(rep.in_q);
        assert!(!rep.in_l);
        let delta = rep.witness.expect("a violating class is reported");
        assert_eq!(mukai_pairing(&delta, &delta, m.ns_gram()).unwrap(), int(-2));
        let z = charge_of_stab(&m, &w, &delta).unwrap();
        assert!(z.0.is_zero() && z.1.is_zero());
    }

    #[test]
    fn sufficiency_trichotomy() {
        let m = deg2_model();
        let b0 = [rat(0, 1), rat(0, 1)];
        // ω² = 4.
        let p4 = point(&m, &b0, &[rat(3, 2), rat(1, 2)]);
        assert_eq!(
            sufficiency_check(&m, &p4, 3).unwrap(),
            SufficiencyOutcome::HoldsByOmegaSq
        );
        // ω² = 2: violated by (1,0,1) with Z = 0.
        let p2 = point(&m, &b0, &[rat(1, 1), rat(0, 1)]);
        match sufficiency_check(&m, &p2, 3).unwrap() {
            SufficiencyOutcome::Violated { delta, charge } => {
                assert_eq!(delta, MukaiVector::from_i64(1, &[0, 0], 1));
                assert_eq!(charge, (rat(0, 1), rat(0, 1)));
            }
            other => panic!("expected violation, got {other:?}"),
        }
        // ω² = 3/2: violated with Z = −1/4.
        let p32 = point(&m, &b0, &[rat(1, 1), rat(1, 2)]);
        match sufficiency_check(&m, &p32, 3).unwrap() {
            SufficiencyOutcome::Violated { delta, charge } => {
                assert_eq!(delta, MukaiVector::from_i64(1, &[0, 0], 1));
                assert_eq!(charge, (rat(-1, 4), rat(0, 1)));
            }
            other => panic!("expected violation, got {other:?}"),
        }
        // A translated point with no violating class in the window.
        let pb = point(&m, &[rat(1, 2), rat(0, 1)], &[rat(1, 1), rat(0, 1)]);
        assert_eq!(
            sufficiency_check(&m, &pb, 3).unwrap(),
            SufficiencyOutcome::HoldsByScan { complete: true }
        );
    }

    #[test]
    fn wall_events_along_paths() {
        let m = deg2_model();
        let b0 = vec![rat(0, 1), rat(0, 1)];
        let sky = MukaiVector::skyscraper(2);
        let w = MukaiVector::from_i64(0, &[0, 1], 0);

        // Constant path: no events.
        let p = point(&m, &b0, &[rat(1, 1), rat(0, 1)]);
        let path = PathInChamber::new(&m, vec![p.clone(), p.clone()], None).unwrap();
        assert!(wall_crossings(&m, &path, &[sky.clone(), w.clone()])
            .unwrap()
            .is_empty());

        // ω(t) = (1, t − 1/2) crosses the wall ω·c = 0 at t = 1/2.
        let pa = point(&m, &b0, &[rat(1, 1), rat(-1, 2)]);
        let pb = point(&m, &b0, &[rat(1, 1), rat(1, 2)]);
        let path = PathInChamber::new(&m, vec![pa.clone(), pb.clone()], None).unwrap();
        let events = wall_crossings(&m, &path, &[sky.clone(), w.clone()]).unwrap();
        assert_eq!(events.len(), 1);
        let e = &events[0];
        assert_eq!((e.segment, &e.t_lo, &e.t_hi), (0, &rat(1, 2), &rat(1, 2)));
        assert_eq!(e.pair, (0, 1));
        assert_eq!((e.from_sign, e.to_sign), (1, -1));

        // The same crossing sitting exactly on a breakpoint is reported once,
        // on the earlier segment.
        let mid = point(&m, &b0, &[rat(1, 1), rat(0, 1)]);
        let path = PathInChamber::new(&m, vec![pa.clone(), mid, pb.clone()], None).unwrap();
        let events = wall_crossings(&m, &path, &[sky.clone(), w.clone()]).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].segment, 0);
        assert_eq!(events[0].t_lo, rat(1, 1));

        // A path strictly inside one chamber: sign constancy, no events.
        let pc = point(&m, &b0, &[rat(1, 1), rat(1, 4)]);
        let path = PathInChamber::new(&m, vec![pc.clone(), pb], None).unwrap();
        assert!(wall_crossings(&m, &path, &[sky.clone(), w.clone()])
            .unwrap()
            .is_empty());

        // Both charges identically zero: degenerate.
        let zero = MukaiVector::from_i64(0, &[0, 0], 0);
        let path = PathInChamber::new(&m, vec![pa, pc], None).unwrap();
        assert!(matches!(
            wall_crossings(&m, &path, &[zero.clone(), zero]),
            Err(StabError::DegeneratePath { segment: 0 })
        ));
    }

    #[test]
    fn lambda_action_examples_and_group_law() {
        let m = deg2_model();
        let p = point(&m, &[rat(1, 3), rat(0, 1)], &[rat(1, 1), rat(1, 5)]);
        let base = exp_vector(&m, &p).unwrap();
        let start = LiftedPoint::new(base.clone());

        let full = apply_lambda(&start, &rat(2, 1));
        assert_eq!(full.base, base);
        assert_eq!(full.winding, int(1));
        assert!(full.phase.is_zero());

        let ident = apply_lambda(&start, &rat(0, 1));
        assert_eq!(ident, start);

        let half_turn = apply_lambda(&start, &rat(1, 1));
        let negated = StabVector {
            re: base.re.iter().map(|x| -x).collect(),
            im: base.im.iter().map(|x| -x).collect(),
        };
        assert_eq!(half_turn.base, negated);
        assert_eq!(half_turn.winding, int(0));
        assert_eq!(half_turn.phase, rat(1, 1));

        let pairs = [
            (rat(3, 7), rat(5, 3)),
            (rat(-1, 2), rat(-7, 5)),
            (rat(9, 4), rat(-9, 4)),
            (rat(13, 6), rat(11, 6)),
            (rat(-22, 7), rat(22, 7)),
        ];
        for (a, b) in pairs {
            let two_step = apply_lambda(&apply_lambda(&start, &a), &b);
            let one_step = apply_lambda(&start, &(&a + &b));
            assert_eq!(two_step, one_step);
        }
    }

    #[test]
    fn lift_winding_examples() {
        let m = deg2_model();
        let p = point(&m, &[rat(0, 1), rat(0, 1)], &[rat(1, 1), rat(0, 1)]);

        // The full phase loop is the deck generator.
        let loop_path = PathInChamber::new(
            &m,
            vec![p.clone(), p.clone()],
            Some(vec![rat(0, 1), rat(2, 1)]),
        )
        .unwrap();
        let (w, end) = lift_path_winding(&m, &loop_path).unwrap();
        assert_eq!(w, int(1));
        assert_eq!(end.winding, int(1));
        assert!(end.phase.is_zero());
        assert_eq!(end.base, exp_vector(&m, &p).unwrap());

        // Constant path.
        let constant = PathInChamber::new(&m, vec![p.clone(), p.clone()], None).unwrap();
        assert_eq!(lift_path_winding(&m, &constant).unwrap().0, int(0));

        // Concatenated loops add.
        let double = PathInChamber::new(
            &m,
            vec![p.clone(), p.clone(), p.clone()],
            Some(vec![rat(0, 1), rat(2, 1), rat(4, 1)]),
        )
        .unwrap();
        assert_eq!(lift_path_winding(&m, &double).unwrap().0, int(2));

        // The reverse loop unwinds.
        let reverse = PathInChamber::new(
            &m,
            vec![p.clone(), p.clone()],
            Some(vec![rat(0, 1), rat(-2, 1)]),
        )
        .unwrap();
        assert_eq!(lift_path_winding(&m, &reverse).unwrap().0, int(-1));

        // A chamber move, a loop, and the move back still wind once.
        let q = point(&m, &[rat(1, 4), rat(0, 1)], &[rat(5, 4), rat(1, 4)]);
        let mixed = PathInChamber::new(
            &m,
            vec![p.clone(), q.clone(), q.clone(), p.clone()],
            Some(vec![rat(0, 1), rat(0, 1), rat(2, 1), rat(2, 1)]),
        )
        .unwrap();
        let (w, end) = lift_path_winding(&m, &mixed).unwrap();
        assert_eq!(w, int(1));
        assert_eq!(end.winding, int(1));

        // Half-integer phases rotate the endpoint by exact quarter turns.
        let quarter = PathInChamber::new(
            &m,
            vec![p.clone(), p.clone()],
            Some(vec![rat(0, 1), rat(1, 2)]),
        )
        .unwrap();
        let (_, end) = lift_path_winding(&m, &quarter).unwrap();
        let e = exp_vector(&m, &p).unwrap();
        assert_eq!(end.base.re, e.im);
        assert_eq!(end.base.im, e.re.iter().map(|x| -x).collect::<Vec<_>>());

        // Invalid inputs.
        let bad_phase = PathInChamber::new(
            &m,
            vec![p.clone(), p.clone()],
            Some(vec![rat(0, 1), rat(1, 3)]),
        )
        .unwrap();
        assert!(matches!(
            lift_path_winding(&m, &bad_phase),
            Err(StabError::InvalidPath(_))
        ));
        let mixed_segment =
            PathInChamber::new(&m, vec![p.clone(), q], Some(vec![rat(0, 1), rat(1, 2)])).unwrap();
        assert!(matches!(
            lift_path_winding(&m, &mixed_segment),
            Err(StabError::InvalidPath(_))
        ));
    }

    #[test]
    fn path_validation_rejects_cone_exit() {
        let m = deg2_model();
        let pa = point(&m, &[rat(0, 1), rat(0, 1)], &[rat(1, 1), rat(0, 1)]);
        let pb = point(&m, &[rat(0, 1), rat(0, 1)], &[rat(-1, 1), rat(0, 1)]);
        assert!(matches!(
            PathInChamber::new(&m, vec![pa, pb], None),
            Err(StabError::InvalidPath(_))
        ));
    }

    fn induced_fixture() -> InducedStability {
        let model = build_mukai_model().unwrap();
        let g = sample_interpretations(model.torus(), 0xBEEF, 1)
            .pop()
            .unwrap();
        induced_stability(&model, &g).unwrap()
    }

    #[test]
    fn induced_frame_shape() {
        let ind = induced_fixture();
        assert_eq!(ind.model().rho(), 20);
        assert_eq!(ind.e_hat_ns().len(), 16);
        // Exceptional classes keep their pairing matrix in frame coordinates.
        for i in 0..16 {
            for j in 0..16 {
                let vi = ind.exceptional_vector(i, &int(-1));
                let vj = ind.exceptional_vector(j, &int(-1));
                let p = mukai_pairing(&vi, &vj, ind.model().ns_gram()).unwrap();
                assert_eq!(p, if i == j { int(-2) } else { int(0) });
            }
        }
        // The probe point is a valid chamber point with ω² = 2ω_T².
        let osq = ind.model().ns_pair(ind.omega_ns(), ind.omega_ns());
        assert_eq!(osq, ind.omega_t_sq() * &rat(2, 1));
    }

    #[test]
    fn induced_point_is_in_p_plus_0() {
        let ind = induced_fixture();
        let w = exp_vector(ind.model(), &ind.exp_point()).unwrap();
        let rep = membership(ind.model(), &w, 2).unwrap();
        assert!(rep.in_p);
        assert!(rep.in_p_plus);
        assert!(rep.in_p_plus_0, "witness: {:?}", rep.witness);
    }

    #[test]
    fn boundary_probe_alignments() {
        let ind = induced_fixture();
        let report = ind.probe_exceptional(&int(1), None).unwrap();
        assert_eq!(
            report.hypothesis_omega_sq_exceeds_one,
            ind.omega_t_sq() > &rat(1, 1)
        );
        assert!(report.all_alignments_zero());
        // Re-part diagnostics: ⟨B, Ê_i⟩ − (k+1) = −1/2 − 2.
        for e in &report.entries {
            assert_eq!(e.charge.0, rat(-5, 2));
        }
        // The alignment zeros do not depend on the degree offset.
        let other = ind.probe_exceptional(&int(7), None).unwrap();
        assert!(other.all_alignments_zero());
        for (a, b) in report.entries.iter().zip(&other.entries) {
            assert_eq!(a.alignment, b.alignment);
            assert_eq!(a.charge.1, b.charge.1);
        }
    }

    #[test]
    fn boundary_probe_perturbation_breaks_one_wall() {
        let ind = induced_fixture();
        // Halve the perturbation until it keeps ω² positive.
        let mut eps = rat(1, 8);
        let report = loop {
            match ind.probe_exceptional(&int(1), Some((0, &eps))) {
                Ok(r) => break r,
                Err(StabError::NonPositiveOmega) => eps = &eps / &rat(2, 1),
                Err(e) => panic!("unexpected error: {e}"),
            }
        };
        let nonzero: Vec<usize> = report
            .entries
            .iter()
            .filter(|e| !e.alignment.is_zero())
            .map(|e| e.index)
            .collect();
        assert_eq!(nonzero, vec![0]);
    }

    #[test]
    fn induced_wall_crossing_for_one_exceptional_class() {
        let ind = induced_fixture();
        let m = ind.model();
        let dual = ind.dual_direction(0).unwrap();
        // Halve the excursion until the whole segment stays in the cone.
        let mut scale = rat(1, 8);
        let path = loop {
            let shift = |sign: i64| -> Vec<Rat> {
                ind.omega_ns()
                    .iter()
                    .zip(&dual)
                    .map(|(o, d)| o + &(&(&scale * &rat(sign, 1)) * d))
                    .collect()
            };
            let endpoints = ChamberPoint::new(m, ind.b_ns().to_vec(), shift(-1)).and_then(|pa| {
                ChamberPoint::new(m, ind.b_ns().to_vec(), shift(1)).map(|pb| (pa, pb))
            });
            match endpoints.and_then(|(pa, pb)| PathInChamber::new(m, vec![pa, pb], None)) {
                Ok(p) => break p,
                Err(_) => scale = &scale / &rat(2, 1),
            }
        };
        let sky = MukaiVector::skyscraper(20);
        let w = ind.exceptional_vector(0, &int(1));
        let events = wall_crossings(m, &path, &[sky, w]).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].t_lo, rat(1, 2));
        assert_eq!(events[0].t_hi, rat(1, 2));
    }
}
