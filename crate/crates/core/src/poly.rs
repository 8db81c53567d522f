//! Univariate polynomials over the rationals with Sturm-sequence root
//! counting and exact root isolation on closed intervals.
//!
//! Wall detection and winding accumulation reduce to locating sign changes of
//! such polynomials; everything here is exact, so no crossing can be missed
//! near a tangency.

use crate::exact::{rat_int, Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Polynomial with ascending coefficients (`coeffs[i]` multiplies `t^i`);
/// the zero polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat_int(&Int::from(c))).collect())
    }

    /// `a + b·t`.
    pub fn linear(a: Rat, b: Rat) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rat) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rat::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, f: &Rat) -> Poly {
        if f.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * f).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat_int(&Int::from(i as i64)))
                .collect(),
        )
    }

    /// Euclidean division: `self = q·div + r` with `deg r < deg div`.
    pub fn divmod(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let mut rem = self.clone();
        let mut q = vec![Rat::zero(); self.coeffs.len().saturating_sub(div.coeffs.len()) + 1];
        let dlead = div.coeffs.last().unwrap().clone();
        let dd = div.coeffs.len() - 1;
        while !rem.is_zero() && rem.coeffs.len() >= div.coeffs.len() {
            let shift = rem.coeffs.len() - div.coeffs.len();
            let f = rem.coeffs.last().unwrap() / &dlead;
            q[shift] = f.clone();
            let mut new = rem.coeffs.clone();
            for (i, c) in div.coeffs.iter().enumerate() {
                new[shift + i] = &new[shift + i] - &f * c;
            }
            // The leading term cancels exactly.
            new[dd + shift] = Rat::zero();
            rem = Poly::new(new);
        }
        (Poly::new(q), rem)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.coeffs.last().unwrap().clone();
        a.scale(&(Rat::one() / lead))
    }

    /// `self / gcd(self, self')` — same roots, all simple.
    pub fn squarefree_part(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.clone();
        }
        let (q, r) = self.divmod(&g);
        debug_assert!(r.is_zero());
        q
    }
}

// ---------------------------------------------------------------------------
// Sturm sequences
// ---------------------------------------------------------------------------

/// Sturm chain of a nonzero polynomial.
pub struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    pub fn of(p: &Poly) -> SturmChain {
        assert!(!p.is_zero(), "Sturm chain of the zero polynomial");
        let mut chain = vec![p.clone(), p.derivative()];
        while !chain.last().unwrap().is_zero() {
            let k = chain.len();
            let (_, r) = chain[k - 2].divmod(&chain[k - 1]);
            chain.push(r.neg());
        }
        chain.pop();
        SturmChain { chain }
    }

    fn variations_at(&self, x: &Rat) -> usize {
        let mut count = 0usize;
        let mut prev: i8 = 0;
        for p in &self.chain {
            let s = p.sign_at(x);
            if s == 0 {
                continue;
            }
            if prev != 0 && s != prev {
                count += 1;
            }
            prev = s;
        }
        count
    }

    /// Number of distinct real roots in the open interval `(a, b)`;
    /// requires both endpoints to be non-roots of the base polynomial.
    pub fn count_roots_open(&self, a: &Rat, b: &Rat) -> usize {
        assert!(a < b, "empty interval");
        debug_assert!(self.chain[0].sign_at(a) != 0 && self.chain[0].sign_at(b) != 0);
        self.variations_at(a) - self.variations_at(b)
    }
}

// ---------------------------------------------------------------------------
// Root isolation
// ---------------------------------------------------------------------------

/// A located root: either an exact rational value, or an open interval with
/// non-root rational endpoints containing exactly one (irrational) root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootLocation {
    Exact(Rat),
    Interval(Rat, Rat),
}

impl RootLocation {
    /// Greatest rational known to be ≤ the root.
    pub fn lower(&self) -> &Rat {
        match self {
            RootLocation::Exact(r) => r,
            RootLocation::Interval(lo, _) => lo,
        }
    }

    /// Least rational known to be ≥ the root.
    pub fn upper(&self) -> &Rat {
        match self {
            RootLocation::Exact(r) => r,
            RootLocation::Interval(_, hi) => hi,
        }
    }
}

/// All distinct real roots of `p` in the closed interval `[a, b]`, sorted.
/// Exact rational roots are reported as `Exact`; the remaining roots come as
/// disjoint isolating intervals that also avoid every exact root.
pub fn isolate_roots(p: &Poly, a: &Rat, b: &Rat) -> Vec<RootLocation> {
    assert!(a <= b, "empty domain");
    assert!(!p.is_zero(), "root isolation of the zero polynomial");
    let q = p.squarefree_part();
    if q.degree() == Some(0) {
        return Vec::new();
    }

    // Opportunistic exact rational roots; always correct, possibly partial.
    let mut exact: Vec<Rat> = rational_roots(&q)
        .into_iter()
        .filter(|r| r >= a && r <= b)
        .collect();
    exact.sort();
    let mut reduced = q.clone();
    for r in &exact {
        let lin = Poly::new(vec![-r.clone(), Rat::one()]);
        let (quo, rem) = reduced.divmod(&lin);
        debug_assert!(rem.is_zero());
        reduced = quo;
    }

    let mut out: Vec<RootLocation> = exact.iter().cloned().map(RootLocation::Exact).collect();
    if reduced.degree().unwrap_or(0) >= 1 {
        // Residual roots (none rational that RRT found; midpoint hits are
        // still handled). Shrink endpoints off roots first.
        let mut lo = a.clone();
        let mut hi = b.clone();
        if a == b {
            if reduced.sign_at(a) == 0 {
                out.push(RootLocation::Exact(a.clone()));
            }
            out.sort_by(|x, y| x.lower().cmp(y.lower()));
            return out;
        }
        if reduced.sign_at(&lo) == 0 {
            out.push(RootLocation::Exact(lo.clone()));
            lo = exclusion_above(&reduced, &lo, &hi);
        }
        if reduced.sign_at(&hi) == 0 {
            out.push(RootLocation::Exact(hi.clone()));
            hi = exclusion_below(&reduced, &hi, &lo);
        }
        if lo < hi {
            let chain = SturmChain::of(&reduced);
            let total = chain.count_roots_open(&lo, &hi);
            let mut intervals = Vec::new();
            subdivide(&reduced, &chain, lo, hi, total, &mut intervals);
            // Keep isolating intervals clear of the exact roots so locations
            // stay disjoint and totally ordered.
            for (mut ilo, mut ihi) in intervals {
                for r in &exact {
                    if r > &ilo && r < &ihi {
                        // reduced(r) ≠ 0, so r is a valid cut point.
                        if chain.count_roots_open(&ilo, r) == 1 {
                            ihi = r.clone();
                        } else {
                            ilo = r.clone();
                        }
                    }
                }
                out.push(RootLocation::Interval(ilo, ihi));
            }
        }
    } else if reduced.degree().is_none() {
        // q collapsed entirely into rational factors: nothing further.
    }
    out.sort_by(|x, y| x.lower().cmp(y.lower()).then(x.upper().cmp(y.upper())));
    out
}

/// Recursive bisection: `count` roots of squarefree `q` in open `(lo, hi)`,
/// endpoints non-roots; emits isolating intervals (or recurses on halves).
fn subdivide(
    q: &Poly,
    chain: &SturmChain,
    lo: Rat,
    hi: Rat,
    count: usize,
    out: &mut Vec<(Rat, Rat)>,
) {
    if count == 0 {
        return;
    }
    if count == 1 {
        out.push((lo, hi));
        return;
    }
    let two = rat_int(&Int::from(2));
    let mut mid = (&lo + &hi) / &two;
    if q.sign_at(&mid) == 0 {
        // A rational root RRT missed (large coefficients); isolate it as a
        // degenerate interval by nudging around it.
        let left = exclusion_below(q, &mid, &lo);
        let right = exclusion_above(q, &mid, &hi);
        out.push((left.clone(), right.clone()));
        let cl = chain.count_roots_open(&lo, &left);
        let cr = chain.count_roots_open(&right, &hi);
        subdivide(q, chain, lo, left, cl, out);
        subdivide(q, chain, right, hi, cr, out);
        return;
    }
    let mut cl = chain.count_roots_open(&lo, &mid);
    // Guard against a midpoint landing uselessly: always progresses since
    // roots are isolated points.
    while cl == count && q.sign_at(&mid) != 0 {
        mid = (&lo + &mid) / &two;
        if q.sign_at(&mid) == 0 {
            break;
        }
        cl = chain.count_roots_open(&lo, &mid);
    }
    if q.sign_at(&mid) == 0 {
        subdivide(q, chain, lo, hi, count, out);
        return;
    }
    subdivide(q, chain, lo.clone(), mid.clone(), cl, out);
    subdivide(q, chain, mid, hi, count - cl, out);
}

/// A point `y ∈ (x, limit]` with no root of `q` in `(x, y]`.
fn exclusion_above(q: &Poly, x: &Rat, limit: &Rat) -> Rat {
    assert!(limit > x);
    let two = rat_int(&Int::from(2));
    let mut y = (x + limit) / &two;
    if &y > limit {
        y = limit.clone();
    }
    loop {
        if q.sign_at(&y) != 0 {
            let chain = SturmChain::of(q);
            // x may be a root of q; count in (x, y) equals count in (x', y)
            // for x' slightly above x — use variations directly on (x, y):
            // Sturm with a root endpoint still bounds: we instead test the
            // half-open count by checking no sign change of q on (x, y):
            if chain_count_safe(&chain, q, x, &y) == 0 {
                return y;
            }
        }
        y = (x + &y) / &two;
    }
}

/// A point `y ∈ [limit, x)` with no root of `q` in `[y, x)`.
fn exclusion_below(q: &Poly, x: &Rat, limit: &Rat) -> Rat {
    assert!(limit < x);
    let two = rat_int(&Int::from(2));
    let mut y = (x + limit) / &two;
    loop {
        if q.sign_at(&y) != 0 {
            let chain = SturmChain::of(q);
            if chain_count_safe(&chain, q, &y, x) == 0 {
                return y;
            }
        }
        y = (&y + x) / &two;
    }
}

/// Root count on the open interval even when one endpoint is a root of `q`:
/// Sturm variations still decrease only at roots, and `V(a) − V(b)` counts
/// roots in `(a, b]`; subtracting the endpoint root when `q(b) = 0` gives the
/// open count. For endpoint roots the standard convention applies.
fn chain_count_safe(chain: &SturmChain, q: &Poly, a: &Rat, b: &Rat) -> usize {
    let va = chain.variations_at(a);
    let vb = chain.variations_at(b);
    let mut count = va.saturating_sub(vb);
    // V counts roots in (a, b] when q(b) ≠ 0 handles itself; when q(b) = 0
    // the b-end variation already drops. Remove an endpoint root at b.
    if q.sign_at(b) == 0 && count > 0 {
        count -= 1;
    }
    count
}

/// Narrow an isolating interval below a target width by bisection; the root
/// stays strictly inside and endpoints stay non-roots.
pub fn refine_interval(q: &Poly, lo: &Rat, hi: &Rat, width: &Rat) -> (Rat, Rat) {
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let two = rat_int(&Int::from(2));
    let sq = q.squarefree_part();
    let chain = SturmChain::of(&sq);
    debug_assert_eq!(chain.count_roots_open(&lo, &hi), 1);
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        if sq.sign_at(&mid) == 0 {
            // Rational root: return a tight symmetric bracket.
            let w = width / &two;
            return (&mid - &w, &mid + &w);
        }
        if chain.count_roots_open(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Opportunistic rational roots by the rational-root theorem; complete for
/// moderate coefficients, conservatively empty when divisor enumeration would
/// be too expensive. Never returns a non-root.
pub fn rational_roots(p: &Poly) -> Vec<Rat> {
    if p.is_zero() || p.degree() == Some(0) {
        return Vec::new();
    }
    // Clear denominators to an integer polynomial.
    let den = crate::exact::common_denominator(p.coeffs());
    let ints: Vec<Int> = p
        .coeffs()
        .iter()
        .map(|c| (c * rat_int(&den)).numer().clone())
        .collect();
    let mut out = Vec::new();
    // Factor out t^k.
    let k = ints.iter().take_while(|c| c.is_zero()).count();
    if k > 0 {
        out.push(Rat::zero());
    }
    let trimmed = &ints[k..];
    if trimmed.len() <= 1 {
        return out;
    }
    let c0 = trimmed[0].abs();
    let cn = trimmed.last().unwrap().abs();
    let limit = Int::from(1_000_000i64);
    if c0 > limit || cn > limit {
        return out;
    }
    let num_divs = divisors(&c0);
    let den_divs = divisors(&cn);
    for nd in &num_divs {
        for dd in &den_divs {
            if nd.gcd(dd) != Int::one() {
                continue;
            }
            for sign in [1i64, -1] {
                let cand = Rat::new(nd * Int::from(sign), dd.clone());
                if p.eval(&cand).is_zero() {
                    out.push(cand);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn divisors(n: &Int) -> Vec<Int> {
    assert!(n.is_positive());
    let mut out = Vec::new();
    let mut d = Int::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let q = n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += Int::one();
    }
    out.sort();
    out
}

/// Sample points for the open regions cut out of `[a, b]` by the sorted root
/// locations: entry `i` is a non-root point between location `i−1` and
/// location `i` (with the domain ends as outer boundaries), or `None` when
/// that region is empty.
pub fn region_samples(a: &Rat, b: &Rat, locations: &[RootLocation]) -> Vec<Option<Rat>> {
    let two = rat_int(&Int::from(2));
    let mut out = Vec::with_capacity(locations.len() + 1);
    for i in 0..=locations.len() {
        let left = if i == 0 {
            a.clone()
        } else {
            locations[i - 1].upper().clone()
        };
        let right = if i == locations.len() {
            b.clone()
        } else {
            locations[i].lower().clone()
        };
        if left < right {
            out.push(Some((&left + &right) / &two));
        } else {
            out.push(None);
        }
    }
    out
}
