//! Short-vector enumeration in definite lattices: exact LLL reduction on
//! Gram matrices, Fincke–Pohst with an optional rational shift, a brute-force
//! box oracle for cross-checking, and root scans in orthogonal complements.
//!
//! All bounds are derived and compared in exact rational arithmetic; no
//! pruning step can lose a vector.

use crate::exact::{
    common_denominator, floor_rat, isqrt_floor, rat_int, round_half_even, shifted_square_range,
    Int, Rat,
};
use crate::lattice::IntegerLattice;
use crate::mat::{
    clear_denominators, imat_to_q, left_kernel, pair, q_inverse, row_mul, signature, IMat, QMat,
};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("lattice is not definite")]
    NotDefinite,
    #[error("enumeration cap exceeded after {found} vectors")]
    CapExceeded { found: usize },
    #[error("plane Gram is not positive definite")]
    NotPositivePlane,
    #[error("norm target must be positive")]
    BadNormTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    ExactNorm,
    UpToNorm,
}

/// A definite-lattice short-vector query. Negative-definite inputs are
/// accepted and negated internally; `norm_target` always refers to the
/// positive-definite normalization.
#[derive(Debug, Clone)]
pub struct EnumerationRequest {
    pub lattice: IntegerLattice,
    pub norm_target: Int,
    pub mode: NormMode,
    pub cap: Option<usize>,
}

/// All lattice vectors of the requested norm, one representative per `±`
/// pair (first nonzero coordinate positive), sorted lexicographically.
pub fn short_vectors(req: &EnumerationRequest) -> Result<Vec<Vec<Int>>, EnumerateError> {
    if !req.norm_target.is_positive() {
        return Err(EnumerateError::BadNormTarget);
    }
    let n = req.lattice.rank();
    if n == 0 {
        return Ok(Vec::new());
    }
    let g = definite_normalization(req.lattice.gram())?;
    let gq = imat_to_q(&g);
    let bound = rat_int(&req.norm_target);
    let mut found = fincke_pohst(&gq, &bound, None, req.cap)?;
    if req.mode == NormMode::ExactNorm {
        found.retain(|x| {
            let xq: Vec<Rat> = x.iter().map(rat_int).collect();
            pair(&gq, &xq, &xq) == bound
        });
    }
    let mut out = dedup_signs(found);
    out.sort();
    Ok(out)
}

/// Negate a negative-definite Gram; pass a positive-definite one through.
fn definite_normalization(gram: &IMat) -> Result<IMat, EnumerateError> {
    let n = gram.rows();
    let (p, q, z) = signature(&imat_to_q(gram));
    if z != 0 {
        return Err(EnumerateError::NotDefinite);
    }
    if p == n {
        Ok(gram.clone())
    } else if q == n {
        Ok(gram.map(|v| -v.clone()))
    } else {
        Err(EnumerateError::NotDefinite)
    }
}

fn dedup_signs(vectors: Vec<Vec<Int>>) -> Vec<Vec<Int>> {
    vectors
        .into_iter()
        .filter(|x| {
            match x.iter().find(|c| !c.is_zero()) {
                None => false, // drop the zero vector
                Some(first) => first.is_positive(),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Exact LLL on Gram matrices
// ---------------------------------------------------------------------------

/// Gram-Schmidt data for a positive-definite rational Gram matrix:
/// `dstar[i] = |b_i*|²` and `mu[i][j] = ⟨b_i, b_j*⟩ / |b_j*|²` for `j < i`.
fn gram_schmidt(g: &QMat) -> Option<(Vec<Rat>, QMat)> {
    let n = g.rows();
    let mut dstar = vec![Rat::zero(); n];
    let mut mu = QMat::identity(n);
    // ⟨b_i, b_j*⟩ computed recursively: b_j* = b_j − Σ_{k<j} mu[j][k] b_k*.
    let mut inner_star = QMat::zero(n, n); // inner_star[i][j] = ⟨b_i, b_j*⟩
    for i in 0..n {
        for j in 0..=i {
            let mut s = g.at(i, j).clone();
            for k in 0..j {
                s -= mu.at(j, k).clone() * inner_star.at(i, k).clone();
            }
            inner_star.set(i, j, s.clone());
            if j < i {
                if dstar[j].is_zero() {
                    return None;
                }
                mu.set(i, j, s / &dstar[j]);
            } else {
                dstar[i] = s.clone();
                if !s.is_positive() {
                    return None;
                }
            }
        }
    }
    Some((dstar, mu))
}

/// LLL reduction (δ = 3/4) acting on a positive-definite Gram matrix.
/// Returns the reduced Gram `g' = u g uᵀ` and the unimodular transform `u`.
pub fn lll_reduce_gram(g: &QMat) -> Result<(QMat, IMat), EnumerateError> {
    let n = g.rows();
    let mut cur = g.clone();
    let mut u = IMat::identity(n);
    if n <= 1 {
        return Ok((cur, u));
    }
    let delta = Rat::new(Int::from(3), Int::from(4));
    let (mut dstar, mut mu) = gram_schmidt(&cur).ok_or(EnumerateError::NotDefinite)?;
    let mut k = 1usize;
    while k < n {
        // Size-reduce row k against rows k-1 .. 0.
        for j in (0..k).rev() {
            let q = round_half_even(mu.at(k, j));
            if !q.is_zero() {
                basis_sub(&mut cur, &mut u, k, j, &q);
                let refreshed = gram_schmidt(&cur).ok_or(EnumerateError::NotDefinite)?;
                dstar = refreshed.0;
                mu = refreshed.1;
            }
        }
        let m = mu.at(k, k - 1).clone();
        let lhs = dstar[k].clone();
        let rhs = (&delta - &m * &m) * &dstar[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            cur.swap_rows(k, k - 1);
            swap_cols_q(&mut cur, k, k - 1);
            u.swap_rows(k, k - 1);
            let refreshed = gram_schmidt(&cur).ok_or(EnumerateError::NotDefinite)?;
            dstar = refreshed.0;
            mu = refreshed.1;
            k = k.max(2) - 1;
        }
    }
    Ok((cur, u))
}

/// Basis operation `b_dst ← b_dst − q·b_src` applied to a Gram matrix
/// (row and column update) and to the transform.
fn basis_sub(g: &mut QMat, u: &mut IMat, dst: usize, src: usize, q: &Int) {
    let qr = rat_int(q);
    for j in 0..g.cols() {
        let v = g.at(dst, j) - &qr * g.at(src, j);
        g.set(dst, j, v);
    }
    for i in 0..g.rows() {
        let v = g.at(i, dst) - &qr * g.at(i, src);
        g.set(i, dst, v);
    }
    for j in 0..u.cols() {
        let v = u.at(dst, j) - q * u.at(src, j);
        u.set(dst, j, v);
    }
}

fn swap_cols_q(m: &mut QMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m.at(i, a).clone();
        let y = m.at(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

// ---------------------------------------------------------------------------
// Fincke–Pohst
// ---------------------------------------------------------------------------

/// All integer vectors `x` with `Q(x + shift) ≤ bound` for a positive-definite
/// rational Gram matrix `Q`, including the zero vector when it qualifies.
/// Runs LLL first and enumerates on the reduced basis. Results come back in
/// the original coordinates, unsorted.
pub fn fincke_pohst(
    g: &QMat,
    bound: &Rat,
    shift: Option<&[Rat]>,
    cap: Option<usize>,
) -> Result<Vec<Vec<Int>>, EnumerateError> {
    let n = g.rows();
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    if bound.is_negative() {
        return Ok(Vec::new());
    }
    let (red, u) = lll_reduce_gram(g)?;
    // x_orig = x_red · u ; shift transforms contravariantly: s_red = s · u⁻¹.
    let shift_red: Option<Vec<Rat>> = match shift {
        None => None,
        Some(s) => {
            assert_eq!(s.len(), n, "shift dimension mismatch");
            let uq = imat_to_q(&u);
            let uinv = q_inverse(&uq).expect("unimodular transform");
            Some(row_mul(s, &uinv))
        }
    };
    let (dstar, mu) = gram_schmidt(&red).ok_or(EnumerateError::NotDefinite)?;
    let zero_shift = vec![Rat::zero(); n];
    let s = shift_red.as_deref().unwrap_or(&zero_shift);

    // Depth-first over coordinates n-1 .. 0. At level k the remaining budget
    // is t_k and the center is c_k = s_k + Σ_{i>k} mu[i][k]·(x_i + s_i).
    let mut out: Vec<Vec<Int>> = Vec::new();
    let mut x = vec![Int::zero(); n];
    enum_level(n, &dstar, &mu, s, bound.clone(), &mut x, &mut out, cap)?;
    // Map back to the original coordinates.
    let mapped = out
        .into_iter()
        .map(|xr| row_mul(&xr, &u))
        .collect::<Vec<_>>();
    Ok(mapped)
}

#[allow(clippy::too_many_arguments)]
fn enum_level(
    level: usize,
    dstar: &[Rat],
    mu: &QMat,
    shift: &[Rat],
    budget: Rat,
    x: &mut Vec<Int>,
    out: &mut Vec<Vec<Int>>,
    cap: Option<usize>,
) -> Result<(), EnumerateError> {
    if budget.is_negative() {
        return Ok(());
    }
    if level == 0 {
        if let Some(c) = cap {
            if out.len() >= c {
                return Err(EnumerateError::CapExceeded { found: out.len() });
            }
        }
        out.push(x.clone());
        return Ok(());
    }
    let k = level - 1;
    let mut center = shift[k].clone();
    for i in level..x.len() {
        center += mu.at(i, k).clone() * (rat_int(&x[i]) + &shift[i]);
    }
    let radius_sq = &budget / &dstar[k];
    let Some((lo, hi)) = shifted_square_range(&center, &radius_sq) else {
        return Ok(());
    };
    let mut v = lo.clone();
    while v <= hi {
        let offset = rat_int(&v) + &center;
        let used = &dstar[k] * &offset * &offset;
        x[k] = v.clone();
        enum_level(level - 1, dstar, mu, shift, &budget - used, x, out, cap)?;
        v += Int::one();
    }
    x[k] = Int::zero();
    Ok(())
}

/// Brute-force oracle: enumerate the coordinate box `|x_i|² ≤ bound·(G⁻¹)_ii`
/// and filter by norm. Positive-definite integer Gram only. Same output
/// conventions as `short_vectors`.
pub fn box_search(req: &EnumerationRequest) -> Result<Vec<Vec<Int>>, EnumerateError> {
    if !req.norm_target.is_positive() {
        return Err(EnumerateError::BadNormTarget);
    }
    let n = req.lattice.rank();
    if n == 0 {
        return Ok(Vec::new());
    }
    let g = definite_normalization(req.lattice.gram())?;
    let gq = imat_to_q(&g);
    let ginv = q_inverse(&gq).ok_or(EnumerateError::NotDefinite)?;
    let bound = rat_int(&req.norm_target);
    let mut limits = Vec::with_capacity(n);
    for i in 0..n {
        let r = &bound * ginv.at(i, i);
        limits.push(isqrt_floor(&floor_rat(&r)));
    }
    let mut out = Vec::new();
    let mut x = vec![Int::zero(); n];
    box_walk(&gq, &bound, req.mode, &limits, 0, &mut x, &mut out, req.cap)?;
    let mut out = dedup_signs(out);
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn box_walk(
    gq: &QMat,
    bound: &Rat,
    mode: NormMode,
    limits: &[Int],
    level: usize,
    x: &mut Vec<Int>,
    out: &mut Vec<Vec<Int>>,
    cap: Option<usize>,
) -> Result<(), EnumerateError> {
    if level == x.len() {
        let xq: Vec<Rat> = x.iter().map(rat_int).collect();
        let norm = pair(gq, &xq, &xq);
        let keep = match mode {
            NormMode::ExactNorm => &norm == bound,
            NormMode::UpToNorm => !norm.is_zero() && &norm <= bound,
        };
        if keep {
            if let Some(c) = cap {
                if out.len() >= c {
                    return Err(EnumerateError::CapExceeded { found: out.len() });
                }
            }
            out.push(x.clone());
        }
        return Ok(());
    }
    let lim = limits[level].clone();
    let mut v = -lim.clone();
    while v <= lim {
        x[level] = v.clone();
        box_walk(gq, bound, mode, limits, level + 1, x, out, cap)?;
        v += Int::one();
    }
    x[level] = Int::zero();
    Ok(())
}

// ---------------------------------------------------------------------------
// Root scans in orthogonal complements
// ---------------------------------------------------------------------------

/// Outcome of a complement root scan: the complement's rank and signature,
/// the denominator cleared from the plane data, and every norm −2 class of
/// the complement in ambient coordinates (up to sign, sorted).
#[derive(Debug, Clone)]
pub struct ComplementRootReport {
    pub complement_rank: usize,
    pub complement_signature: (usize, usize),
    pub plane_denominator: Int,
    pub roots: Vec<Vec<Int>>,
}

/// Enumerate the (−2)-classes of `plane^⊥ ∩ ambient` for a rational spanning
/// set whose induced Gram must be positive definite.
pub fn roots_orthogonal_to_plane(
    ambient: &IntegerLattice,
    plane: &QMat,
) -> Result<ComplementRootReport, EnumerateError> {
    let n = ambient.rank();
    assert_eq!(plane.cols(), n, "plane lives in the wrong ambient");
    let gq = ambient.gram_q();
    let plane_gram = plane.mul(&gq).mul(&plane.transpose());
    let (p, _, z) = signature(&plane_gram);
    if z != 0 || p != plane.rows() {
        return Err(EnumerateError::NotPositivePlane);
    }
    // Complement as an integer kernel of the cleared pairing matrix.
    let m = gq.mul(&plane.transpose());
    let (mi, denom) = clear_denominators(&m);
    let comp = left_kernel(&mi);
    let rank = comp.rows();
    let comp_gram_q = imat_to_q(&comp).mul(&gq).mul(&imat_to_q(&comp).transpose());
    let (cp, cn, cz) = signature(&comp_gram_q);
    if cz != 0 || cp != 0 {
        // The scan is only meaningful against a negative-definite complement.
        return Err(EnumerateError::NotDefinite);
    }
    let comp_gram = comp_gram_q.map(|v| v.numer().clone());
    let neg = comp_gram.map(|v| -v.clone());
    let found = fincke_pohst(&imat_to_q(&neg), &rat_int(&Int::from(2)), None, None)?;
    let gneg = imat_to_q(&neg);
    let two = rat_int(&Int::from(2));
    let mut roots: Vec<Vec<Int>> = found
        .into_iter()
        .filter(|x| {
            let xq: Vec<Rat> = x.iter().map(rat_int).collect();
            pair(&gneg, &xq, &xq) == two
        })
        .map(|x| row_mul(&x, &comp))
        .collect();
    roots = dedup_signs(roots);
    roots.sort();
    Ok(ComplementRootReport {
        complement_rank: rank,
        complement_signature: (cp, cn),
        plane_denominator: denom,
        roots,
    })
}

// ---------------------------------------------------------------------------

/// Query for positive-rank (−2)-classes whose pairing against `exp(B + iω)`
/// lands on the nonpositive real axis: δ = (r, c, s) with r ≥ 1 integral,
/// c ∈ Z^ρ, s ∈ Z, c² − 2rs = −2, ω·(c − rB) = 0 and
/// B·c − s − ½r(B² − ω²) ≤ 0.
#[derive(Debug, Clone)]
pub struct BoundedRootQuery<'a> {
    pub ns_gram: &'a IMat,
    pub b: &'a [Rat],
    pub omega: &'a [Rat],
    pub r_max: u32,
    pub cap: Option<usize>,
}

/// Scan outcome. `r_bound` is the derived rank cutoff ⌊√(2/ω²)⌋ — writing
/// m = c − rB, the real part times 2r equals r²ω² − m² − 2 with m² ≤ 0, so
/// any hit needs r²ω² ≤ 2. `complete` records that `r_max` covered it.
#[derive(Debug, Clone)]
pub struct DeltaPlusScan {
    pub found: Vec<(Int, Vec<Int>, Int)>,
    pub complete: bool,
    pub r_bound: u32,
}

pub fn bounded_delta_plus_scan(q: &BoundedRootQuery) -> Result<DeltaPlusScan, EnumerateError> {
    let rho = q.ns_gram.rows();
    assert_eq!(q.b.len(), rho, "B-field dimension mismatch");
    assert_eq!(q.omega.len(), rho, "omega dimension mismatch");
    let gq = imat_to_q(q.ns_gram);
    let wsq = pair(&gq, q.omega, q.omega);
    if !wsq.is_positive() {
        return Err(EnumerateError::NotPositivePlane);
    }
    let r_bound_int = isqrt_floor(&(Int::from(2) * wsq.denom()).div_floor(wsq.numer()));
    let r_bound = u32::try_from(&r_bound_int).unwrap_or(u32::MAX);
    let r_eff = q.r_max.min(r_bound);
    let complete = q.r_max >= r_bound;
    let mut found: Vec<(Int, Vec<Int>, Int)> = Vec::new();

    // Integral form of the linear constraint ω·c = r(ω·B).
    let omega_row = row_mul(q.omega, &gq);
    let wb = pair(&gq, q.omega, q.b);
    let mut cleared = omega_row.clone();
    cleared.push(wb.clone());
    let d = common_denominator(&cleared);
    let a_int: Vec<Int> = omega_row
        .iter()
        .map(|x| (x * rat_int(&d)).numer().clone())
        .collect();
    let wb_int = (&wb * rat_int(&d)).numer().clone();
    let col = IMat::from_rows(a_int.iter().map(|v| vec![v.clone()]).collect());
    let h = crate::mat::hnf(&col);
    let g = h.h.at(0, 0).clone();
    let two = Int::from(2);

    for r in 1..=i64::from(r_eff) {
        let r_int = Int::from(r);
        let r_rat = rat_int(&r_int);
        let bound = rat_int(&two) - &r_rat * &r_rat * &wsq;
        if bound.is_negative() {
            continue;
        }
        // Particular solution and kernel of the constraint for this rank.
        let tau = &wb_int * &r_int;
        let (c0, kernel_rows): (Vec<Int>, Vec<Vec<Int>>) = if g.is_zero() {
            if !tau.is_zero() {
                continue;
            }
            (vec![Int::zero(); rho], h.u.to_rows())
        } else {
            if !tau.mod_floor(&g).is_zero() {
                continue;
            }
            let scale = tau.div_floor(&g);
            let c0: Vec<Int> = h.u.row(0).iter().map(|v| v * &scale).collect();
            (c0, h.u.to_rows()[1..].to_vec())
        };
        let c0_rat: Vec<Rat> = c0.iter().map(rat_int).collect();
        let m0: Vec<Rat> = c0_rat
            .iter()
            .zip(q.b)
            .map(|(c, b)| c - &r_rat * b)
            .collect();
        let mut candidates: Vec<Vec<Int>> = Vec::new();
        if kernel_rows.is_empty() {
            let msq = pair(&gq, &m0, &m0);
            if -msq <= bound {
                candidates.push(c0.clone());
            }
        } else {
            let k = IMat::from_rows(kernel_rows);
            let kq = imat_to_q(&k);
            let gram_y = kq.mul(&gq).mul(&kq.transpose()).map(|v| -v.clone());
            let sigma = crate::mat::solve_in_row_span(&m0, &kq)
                .expect("offset lies in the constraint kernel span");
            let ys = fincke_pohst(&gram_y, &bound, Some(&sigma), q.cap)?;
            for y in ys {
                let mut c = c0.clone();
                let yr: Vec<Rat> = y.iter().map(rat_int).collect();
                let shift = row_mul(&yr, &kq);
                for (ci, si) in c.iter_mut().zip(shift.iter()) {
                    *ci += si.numer();
                }
                candidates.push(c);
            }
        }
        for c in candidates {
            let c_rat: Vec<Rat> = c.iter().map(rat_int).collect();
            let csq = pair(&gq, &c_rat, &c_rat);
            debug_assert!(csq.denom().is_one());
            let num = csq.numer() + &two;
            let den = &two * &r_int;
            if !num.mod_floor(&den).is_zero() {
                continue;
            }
            let s = num.div_floor(&den);
            if let Some(cap) = q.cap {
                if found.len() >= cap {
                    return Err(EnumerateError::CapExceeded { found: found.len() });
                }
            }
            found.push((r_int.clone(), c, s));
        }
    }
    found.sort();
    Ok(DeltaPlusScan {
        found,
        complete,
        r_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn lat(rows: &[&[i64]]) -> IntegerLattice {
        IntegerLattice::from_i64_rows("L", rows).unwrap()
    }

    fn e8_gram() -> IntegerLattice {
        let rows: [&[i64]; 8] = [
            &[2, -1, 0, 0, 0, 0, 0, 0],
            &[-1, 2, -1, 0, 0, 0, 0, 0],
            &[0, -1, 2, -1, 0, 0, 0, 0],
            &[0, 0, -1, 2, -1, 0, 0, 0],
            &[0, 0, 0, -1, 2, -1, 0, -1],
            &[0, 0, 0, 0, -1, 2, -1, 0],
            &[0, 0, 0, 0, 0, -1, 2, 0],
            &[0, 0, 0, 0, -1, 0, 0, 2],
        ];
        lat(&rows)
    }

    #[test]
    fn unit_vectors_of_standard_z2() {
        let req = EnumerationRequest {
            lattice: lat(&[&[1, 0], &[0, 1]]),
            norm_target: int(1),
            mode: NormMode::ExactNorm,
            cap: None,
        };
        let v = short_vectors(&req).unwrap();
        assert_eq!(v, vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
    }

    #[test]
    fn a2_roots() {
        let req = EnumerationRequest {
            lattice: lat(&[&[2, 1], &[1, 2]]),
            norm_target: int(2),
            mode: NormMode::ExactNorm,
            cap: None,
        };
        let v = short_vectors(&req).unwrap();
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn e8_has_120_root_classes() {
        let e8 = e8_gram();
        assert_eq!(e8.determinant(), int(1));
        let req = EnumerationRequest {
            lattice: e8,
            norm_target: int(2),
            mode: NormMode::ExactNorm,
            cap: None,
        };
        let v = short_vectors(&req).unwrap();
        assert_eq!(v.len(), 120);
    }

    #[test]
    fn negative_definite_is_negated() {
        let req = EnumerationRequest {
            lattice: lat(&[&[-2, 0], &[0, -2]]),
            norm_target: int(2),
            mode: NormMode::ExactNorm,
            cap: None,
        };
        let v = short_vectors(&req).unwrap();
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn indefinite_rejected_and_cap_reported() {
        let req = EnumerationRequest {
            lattice: lat(&[&[0, 1], &[1, 0]]),
            norm_target: int(2),
            mode: NormMode::ExactNorm,
            cap: None,
        };
        assert_eq!(
            short_vectors(&req).unwrap_err(),
            EnumerateError::NotDefinite
        );

        let capped = EnumerationRequest {
            lattice: e8_gram(),
            norm_target: int(2),
            mode: NormMode::ExactNorm,
            cap: Some(10),
        };
        match short_vectors(&capped) {
            Err(EnumerateError::CapExceeded { found }) => assert!(found >= 10),
            other => panic!("expected CapExceeded, got {other:?}"),
        }
    }

    #[test]
    fn up_to_norm_includes_smaller() {
        let req = EnumerationRequest {
            lattice: lat(&[&[1, 0], &[0, 1]]),
            norm_target: int(2),
            mode: NormMode::UpToNorm,
            cap: None,
        };
        let v = short_vectors(&req).unwrap();
        // norms 1: (0,±1),(±1,0); norm 2: (±1,±1) → up to sign: 2 + 2 = 4.
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn fp_matches_box_on_fixed_cases() {
        let cases: Vec<(IntegerLattice, i64)> = vec![
            (lat(&[&[1, 0], &[0, 1]]), 4),
            (lat(&[&[2, 1], &[1, 2]]), 6),
            (lat(&[&[4, 1, 0], &[1, 3, -1], &[0, -1, 5]]), 8),
            (lat(&[&[3]]), 8),
        ];
        for (l, t) in cases {
            for mode in [NormMode::ExactNorm, NormMode::UpToNorm] {
                let req = EnumerationRequest {
                    lattice: l.clone(),
                    norm_target: int(t),
                    mode,
                    cap: None,
                };
                assert_eq!(
                    short_vectors(&req).unwrap(),
                    box_search(&req).unwrap(),
                    "mismatch on target {t}"
                );
            }
        }
    }

    #[test]
    fn shifted_enumeration_counts() {
        // Q(x + 1/2) ≤ 1/4 on Z with Q = x²: solutions x ∈ {-1, 0}.
        let g = QMat::from_rows(vec![vec![rat(1, 1)]]);
        let found = fincke_pohst(&g, &rat(1, 4), Some(&[rat(1, 2)]), None).unwrap();
        let mut xs: Vec<Int> = found.into_iter().map(|v| v[0].clone()).collect();
        xs.sort();
        assert_eq!(xs, vec![int(-1), int(0)]);
    }

    #[test]
    fn complement_root_scan_finds_planted_root() {
        // Ambient: diag(1, 1, -2); plane = span{e1, e2} (PD rank 2);
        // complement = span{e3} with norm -2.
        let amb = lat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, -2]]);
        let plane = QMat::from_rows(vec![
            vec![rat(1, 1), rat(0, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1), rat(0, 1)],
        ]);
        let rep = roots_orthogonal_to_plane(&amb, &plane).unwrap();
        assert_eq!(rep.complement_rank, 1);
        assert_eq!(rep.complement_signature, (0, 1));
        assert_eq!(rep.roots, vec![vec![int(0), int(0), int(1)]]);

        // Non-positive plane errors.
        let bad = QMat::from_rows(vec![vec![rat(0, 1), rat(0, 1), rat(1, 1)]]);
        assert_eq!(
            roots_orthogonal_to_plane(&amb, &bad).unwrap_err(),
            EnumerateError::NotPositivePlane
        );
    }

    #[test]
    fn lll_preserves_lattice() {
        let g = imat_to_q(lat(&[&[10, 3, 2], &[3, 5, 1], &[2, 1, 8]]).gram());
        let (red, u) = lll_reduce_gram(&g).unwrap();
        let uq = imat_to_q(&u);
        assert_eq!(uq.mul(&g).mul(&uq.transpose()), red);
        assert_eq!(crate::mat::bareiss_det(&u).abs(), int(1));
    }

    #[test]
    fn delta_plus_scan_degree_two() {
        let g = IMat::from_rows(vec![vec![int(2), int(0)], vec![int(0), int(-2)]]);
        let b0 = vec![rat(0, 1), rat(0, 1)];

        // Square 2: exactly the rank-one class at the origin survives the filter.
        let q = BoundedRootQuery {
            ns_gram: &g,
            b: &b0,
            omega: &[rat(1, 1), rat(0, 1)],
            r_max: 3,
            cap: None,
        };
        let scan = bounded_delta_plus_scan(&q).unwrap();
        assert!(scan.complete);
        assert_eq!(scan.r_bound, 1);
        assert_eq!(scan.found, vec![(int(1), vec![int(0), int(0)], int(1))]);

        // Square 3/2: same single class.
        let q2 = BoundedRootQuery {
            ns_gram: &g,
            b: &b0,
            omega: &[rat(1, 1), rat(1, 2)],
            r_max: 3,
            cap: None,
        };
        let s2 = bounded_delta_plus_scan(&q2).unwrap();
        assert!(s2.complete);
        assert_eq!(s2.found, vec![(int(1), vec![int(0), int(0)], int(1))]);

        // Square 4: no rank fits the window at all.
        let q3 = BoundedRootQuery {
            ns_gram: &g,
            b: &b0,
            omega: &[rat(3, 2), rat(1, 2)],
            r_max: 3,
            cap: None,
        };
        let s3 = bounded_delta_plus_scan(&q3).unwrap();
        assert!(s3.complete);
        assert_eq!(s3.r_bound, 0);
        assert!(s3.found.is_empty());

        // Integral shift translates the witness along with the form.
        let b1 = vec![rat(1, 1), rat(0, 1)];
        let q4 = BoundedRootQuery {
            ns_gram: &g,
            b: &b1,
            omega: &[rat(1, 1), rat(0, 1)],
            r_max: 1,
            cap: None,
        };
        let s4 = bounded_delta_plus_scan(&q4).unwrap();
        assert_eq!(s4.found, vec![(int(1), vec![int(1), int(0)], int(2))]);
    }
}
