//! Computational invariants separating the prime-family cohomology rings.
//!
//! The separation argument is finitary on its face: primitive pairs with
//! equal squares and vanishing product are confined to the first two
//! generators, a bounded search finds no unimodular ring isomorphism, and a
//! mod-p divisibility obstruction kills every bounded candidate image of the
//! third generator. The verdict is explicitly *evidence at the given bounds*,
//! never an unbounded proof.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::{Int, IntMat};
use crate::ring::{multiply, square, verify_graded_iso, CohomologyRing, DegreeTwoClass};
use crate::Error;

/// Two primitive degree-2 classes with `x^2 = y^2` and `xy = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitivePair {
    pub x: DegreeTwoClass,
    pub y: DegreeTwoClass,
}

/// Sign-canonical form: first nonzero coordinate positive.
fn sign_canonical(coords: &[i64]) -> bool {
    coords.iter().find(|&&v| v != 0).is_none_or(|&v| v > 0)
}

fn content_i64(coords: &[i64]) -> i64 {
    coords.iter().fold(0i64, |g, &v| g.gcd(&v))
}

/// Lexicographic enumeration of `[-h, h]^k`.
fn lex_box(k: usize, h: i64) -> impl Iterator<Item = Vec<i64>> {
    let mut cur = vec![-h; k];
    let mut done = k == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let item = cur.clone();
        let mut pos = k;
        loop {
            if pos == 0 {
                done = true;
                break;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] <= h {
                break;
            }
            cur[pos] = -h;
        }
        Some(item)
    })
}

/// All primitive pairs with coordinates in `[-height, height]` satisfying
/// `x^2 = y^2` and `xy = 0`, deduplicated under independent sign flips and
/// swapping, in lexicographic order on `(x, y)`.
pub fn primitive_square_pairs(ring: &CohomologyRing, height: u32) -> Vec<PrimitivePair> {
    let k = ring.k();
    let h = i64::from(height);
    // primitive, sign-canonical vectors in lex order, bucketed by square
    let mut order: Vec<DegreeTwoClass> = Vec::new();
    let mut buckets: HashMap<crate::ring::DegreeFourClass, Vec<usize>> = HashMap::new();
    for coords in lex_box(k, h) {
        if content_i64(&coords) != 1 || !sign_canonical(&coords) {
            continue;
        }
        let x = DegreeTwoClass::from_i64(&coords);
        let sq = square(&x, ring).expect("length matches ring");
        buckets.entry(sq).or_default().push(order.len());
        order.push(x);
    }
    let mut found: Vec<(usize, usize)> = Vec::new();
    for members in buckets.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a..] {
                let prod = multiply(&order[i], &order[j], ring).expect("length matches");
                if prod.is_zero() {
                    found.push((i, j));
                }
            }
        }
    }
    found.sort_by(|&(a1, b1), &(a2, b2)| {
        (&order[a1], &order[b1]).cmp(&(&order[a2], &order[b2]))
    });
    found
        .into_iter()
        .map(|(i, j)| PrimitivePair { x: order[i].clone(), y: order[j].clone() })
        .collect()
}

/// Do all primitive square pairs up to the given height have support in the
/// first two generator coordinates?
pub fn u12_claim_check(ring: &CohomologyRing, height: u32) -> bool {
    primitive_square_pairs(ring, height).iter().all(|p| {
        p.x.0[2..].iter().all(Int::is_zero) && p.y.0[2..].iter().all(Int::is_zero)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum IsoSearchResult {
    FoundIso { matrix: IntMat },
    NoneFound { entry_bound: u32 },
}

/// Fast `i64` determinant by Bareiss elimination with `i128` intermediates.
/// Only valid when `k! * bound^k` stays far below `i128::MAX`, which the
/// caller guarantees by bounding entries.
fn det_small(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> =
        m.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for t in 0..n.saturating_sub(1) {
        if a[t][t] == 0 {
            match (t + 1..n).find(|&r| a[r][t] != 0) {
                Some(r) => {
                    a.swap(t, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for r in t + 1..n {
            for c in t + 1..n {
                a[r][c] = (a[t][t] * a[r][c] - a[r][t] * a[t][c]) / prev;
            }
            a[r][t] = 0;
        }
        prev = a[t][t];
    }
    sign * a[n - 1][n - 1]
}

/// Hadamard-style bound: do all Bareiss intermediates of a k x k matrix with
/// entries bounded by `b` fit comfortably in i128?
fn fast_det_safe(k: usize, b: u32) -> bool {
    let mut log2 = 0f64;
    for i in 1..=k {
        log2 += (i as f64).log2();
    }
    log2 + (k as f64) * f64::from(b.max(1)).log2() < 120.0
}

/// Exhaustively search integer matrices with entries in
/// `[-entry_bound, entry_bound]` and `|det| = 1` for a graded isomorphism,
/// in lexicographic order over the flattened entries with the sign of the
/// first nonzero entry fixed positive (a map and its negative induce the same
/// degree-4 behaviour). Returns the first hit.
pub fn bounded_iso_search(
    ring_a: &CohomologyRing,
    ring_b: &CohomologyRing,
    entry_bound: u32,
) -> Result<IsoSearchResult, Error> {
    let k = ring_a.k();
    if ring_b.k() != k {
        return Err(Error::DimensionMismatch { expected: k, got: ring_b.k() });
    }
    let h = i64::from(entry_bound);
    let fast = fast_det_safe(k, entry_bound);
    for flat in lex_box(k * k, h) {
        if !sign_canonical(&flat) {
            continue;
        }
        let rows: Vec<Vec<i64>> = flat.chunks(k).map(<[i64]>::to_vec).collect();
        let unimodular = if fast {
            matches!(det_small(&rows), 1 | -1)
        } else {
            let m = IntMat::from_rows(
                rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect(),
            );
            m.det().abs().is_one()
        };
        if !unimodular {
            continue;
        }
        let m = IntMat::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect(),
        );
        if verify_graded_iso(&m, ring_a, ring_b)? {
            return Ok(IsoSearchResult::FoundIso { matrix: m });
        }
    }
    Ok(IsoSearchResult::NoneFound { entry_bound })
}

/// Mod-p obstruction for bounded candidate images of the third generator.
///
/// For rings of the prime family with parameters `p` (source) and `p_prime`
/// (target), a graded isomorphism sends the first two generators into the
/// span of the target's first two and the third to
/// `g1 u1' + g2 u2' + gi ui'` for a unique `i >= 3`, with `gi != 0`.
/// Compatibility with `u3^2 = -p u1 u3` pins three component equations for
/// the unknowns `(a1, a2, g1, g2, gi)`:
///
/// ```text
/// -g1^2 - (g1 - g2)^2 = -p (a1 g2 + a2 g1 - 2 a1 g1 - a2 g2)
/// -p' gi + 2 g1       = -p a1
/// 2 g2                = -p a2
/// ```
///
/// Returns true when every solution in the box `[-bound, bound]^5` with
/// `gi != 0` has `p | gcd(g1, g2, gi)`, i.e. no primitive image exists.
pub fn rp_obstruction_check(p: i64, p_prime: i64, bound: u32) -> Result<bool, Error> {
    if crate::biquotient::rp_matrix(p, 3).is_err() {
        return Err(Error::NotOddPrime("p", p.to_string()));
    }
    if crate::biquotient::rp_matrix(p_prime, 3).is_err() {
        return Err(Error::NotOddPrime("p_prime", p_prime.to_string()));
    }
    if p == p_prime {
        return Err(Error::PrimesEqual(p.to_string()));
    }
    let b = i64::from(bound);
    let (p, pp) = (i128::from(p), i128::from(p_prime));
    for g1 in -b..=b {
        for g2 in -b..=b {
            // 2 g2 = -p a2
            let num_a2 = -2 * i128::from(g2);
            if num_a2 % p != 0 {
                continue;
            }
            let a2 = num_a2 / p;
            if a2.abs() > i128::from(b) {
                continue;
            }
            for gi in -b..=b {
                if gi == 0 {
                    continue;
                }
                // -p' gi + 2 g1 = -p a1
                let num_a1 = pp * i128::from(gi) - 2 * i128::from(g1);
                if num_a1 % p != 0 {
                    continue;
                }
                let a1 = num_a1 / p;
                if a1.abs() > i128::from(b) {
                    continue;
                }
                let (g1, g2, gi128) = (i128::from(g1), i128::from(g2), i128::from(gi));
                let lhs = -g1 * g1 - (g1 - g2) * (g1 - g2);
                let rhs = -p * (a1 * g2 + a2 * g1 - 2 * a1 * g1 - a2 * g2);
                if lhs != rhs {
                    continue;
                }
                // a full solution; the obstruction demands p | gcd
                let g = g1.gcd(&g2).gcd(&gi128);
                if g % p != 0 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Search bounds for [`distinguish`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinguishBounds {
    pub pair_height: u32,
    pub iso_entry_bound: u32,
    pub obstruction_box: u32,
}

impl Default for DistinguishBounds {
    fn default() -> Self {
        DistinguishBounds { pair_height: 10, iso_entry_bound: 3, obstruction_box: 30 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinguishEvidence {
    pub no_iso_bound: u32,
    pub obstruction_checked: bool,
    pub pair_claim_height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DistinguishVerdict {
    /// Consistent with non-isomorphism at the stated bounds; not an unbounded
    /// proof.
    Distinct { evidence: DistinguishEvidence },
    Unknown { bounds: DistinguishBounds },
}

/// Accumulate the bounded evidence that the rings of two distinct odd primes
/// are non-isomorphic: the primitive-pair confinement holds for both rings up
/// to the pair height (non-vacuously: at least one pair must be found per
/// ring), no bounded unimodular isomorphism exists, and the mod-p obstruction
/// holds in both directions. Anything less returns `Unknown` with the bounds.
pub fn distinguish(
    p: i64,
    p_prime: i64,
    k: usize,
    bounds: &DistinguishBounds,
) -> Result<DistinguishVerdict, Error> {
    if p == p_prime {
        return Err(Error::PrimesEqual(p.to_string()));
    }
    let ring_p = crate::biquotient::rp_cohomology(p, k)?;
    let ring_q = crate::biquotient::rp_cohomology(p_prime, k)?;

    let unknown = || Ok(DistinguishVerdict::Unknown { bounds: bounds.clone() });
    if bounds.pair_height == 0 || bounds.iso_entry_bound == 0 || bounds.obstruction_box == 0 {
        return unknown();
    }
    for ring in [&ring_p, &ring_q] {
        let pairs = primitive_square_pairs(ring, bounds.pair_height);
        if pairs.is_empty() {
            return unknown(); // vacuous confinement is not evidence
        }
        if !pairs.iter().all(|pr| {
            pr.x.0[2..].iter().all(Int::is_zero) && pr.y.0[2..].iter().all(Int::is_zero)
        }) {
            return unknown();
        }
    }
    match bounded_iso_search(&ring_p, &ring_q, bounds.iso_entry_bound)? {
        IsoSearchResult::FoundIso { .. } => return unknown(),
        IsoSearchResult::NoneFound { .. } => {}
    }
    if !rp_obstruction_check(p, p_prime, bounds.obstruction_box)?
        || !rp_obstruction_check(p_prime, p, bounds.obstruction_box)?
    {
        return unknown();
    }
    Ok(DistinguishVerdict::Distinct {
        evidence: DistinguishEvidence {
            no_iso_bound: bounds.iso_entry_bound,
            obstruction_checked: true,
            pair_claim_height: bounds.pair_height,
        },
    })
}
