//! Characteristic classes of sums of line bundles and inverse-existence
//! predicates.
//!
//! Over a quotient by a torus every relevant bundle splits as a sum of line
//! bundles, each determined by its first Chern class in `H^2`, so a bundle is
//! just a list of degree-2 vectors plus a realification flag and an optional
//! trivial summand. The key quantity is the stable obstruction
//! `c1^2 - 2 c2 = sum of c1(L_i)^2`, which is also the first Pontryagin class
//! of the realification.

use serde::{Deserialize, Serialize};

use crate::ring::{multiply, square, CohomologyRing, DegreeFourClass, DegreeTwoClass};
use crate::star::StarVerdict;
use crate::Error;

/// A Whitney sum of line bundles given by their first Chern classes, possibly
/// realified and padded by a trivial bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineBundleSum {
    #[serde(rename = "lines")]
    pub c1s: Vec<DegreeTwoClass>,
    #[serde(rename = "real", default)]
    pub real_flag: bool,
    #[serde(rename = "extra_trivial", default)]
    pub extra_trivial_rank: u32,
}

impl LineBundleSum {
    pub fn complex(c1s: Vec<DegreeTwoClass>) -> Self {
        LineBundleSum { c1s, real_flag: false, extra_trivial_rank: 0 }
    }

    pub fn trivial(rank: u32) -> Self {
        LineBundleSum { c1s: vec![], real_flag: false, extra_trivial_rank: rank }
    }

    /// All line summands trivial (and hence the bundle, since line bundles
    /// are classified by their first Chern class).
    pub fn is_trivial(&self) -> bool {
        self.c1s.iter().all(DegreeTwoClass::is_zero)
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serialization")
    }

    fn check_ring(&self, ring: &CohomologyRing) -> Result<(), Error> {
        for c1 in &self.c1s {
            if c1.len() != ring.k() {
                return Err(Error::DimensionMismatch { expected: ring.k(), got: c1.len() });
            }
        }
        Ok(())
    }
}

/// Rank and the first two Chern classes of a complex sum, plus the stable
/// obstruction `c1^2 - 2 c2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernSummary {
    pub rank: u32,
    pub c1: DegreeTwoClass,
    pub c2: DegreeFourClass,
    pub stable_obstruction: DegreeFourClass,
}

/// Chern data of a complex sum of line bundles via the Whitney formula:
/// `c1 = sum c1(L_i)`, `c2 = sum_{i<j} c1(L_i) c1(L_j)`.
///
/// The stable obstruction is computed both as `c1^2 - 2 c2` and as
/// `sum c1(L_i)^2`; the two expansions agree identically and the function
/// asserts so.
pub fn chern_summary(e: &LineBundleSum, ring: &CohomologyRing) -> Result<ChernSummary, Error> {
    if e.real_flag {
        return Err(Error::RealBundle);
    }
    e.check_ring(ring)?;
    let h4 = ring.degree_four();
    let mut c1 = DegreeTwoClass::zero(ring.k());
    for line in &e.c1s {
        c1 = c1.add(line);
    }
    let mut c2 = h4.zero_class();
    for i in 0..e.c1s.len() {
        for j in i + 1..e.c1s.len() {
            let prod = multiply(&e.c1s[i], &e.c1s[j], ring)?;
            c2 = h4.add(&c2, &prod);
        }
    }
    let c1_sq = square(&c1, ring)?;
    let minus_2c2 = h4.scale(&crate::Int::from(-2), &c2);
    let stable_obstruction = h4.add(&c1_sq, &minus_2c2);
    let via_squares = pontryagin_of_realification(e, ring)?;
    assert_eq!(
        stable_obstruction, via_squares,
        "Whitney identity violated; this is a bug"
    );
    let rank = u32::try_from(e.c1s.len()).unwrap() + e.extra_trivial_rank;
    Ok(ChernSummary { rank, c1, c2, stable_obstruction })
}

/// First Pontryagin class of the realification: `sum c1(L_i)^2`.
pub fn pontryagin_of_realification(
    e: &LineBundleSum,
    ring: &CohomologyRing,
) -> Result<DegreeFourClass, Error> {
    e.check_ring(ring)?;
    let h4 = ring.degree_four();
    let mut p1 = h4.zero_class();
    for line in &e.c1s {
        p1 = h4.add(&p1, &square(line, ring)?);
    }
    Ok(p1)
}

/// The line bundle cancelling `c1`: the class `-c1(E)`. Summing `E` with the
/// line bundle it names yields a bundle with vanishing first Chern class.
pub fn kill_c1_partner(e: &LineBundleSum, ring: &CohomologyRing) -> Result<DegreeTwoClass, Error> {
    e.check_ring(ring)?;
    let mut c1 = DegreeTwoClass::zero(ring.k());
    for line in &e.c1s {
        c1 = c1.add(line);
    }
    Ok(c1.neg())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseDecision {
    HasBiquotientInverse,
    NoBiquotientInverse,
    Unknown,
}

/// Decide inverse existence for a sum of line bundles over a ring with a
/// known verdict for the vanishing-squares property.
///
/// When the property holds, a vanishing sum of line bundles forces every
/// summand trivial, so the only bundles with an inverse in the class are the
/// trivial ones. Without an established verdict nothing is concluded.
pub fn inverse_decision(
    ring: &CohomologyRing,
    verdict: &StarVerdict,
    e: &LineBundleSum,
) -> Result<InverseDecision, Error> {
    e.check_ring(ring)?;
    Ok(match verdict {
        StarVerdict::Holds { .. } => {
            if e.is_trivial() {
                InverseDecision::HasBiquotientInverse
            } else {
                InverseDecision::NoBiquotientInverse
            }
        }
        _ => InverseDecision::Unknown,
    })
}

/// Rational Betti data of a closed manifold, with the simple-connectivity
/// flags consumed by the sufficient conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiProfile {
    pub dimension: u32,
    /// degree -> rational Betti number; absent degrees are zero
    pub rational_betti: std::collections::BTreeMap<u32, u32>,
    pub simply_connected: bool,
    pub total_space_simply_connected: bool,
}

impl BettiProfile {
    pub fn new(
        dimension: u32,
        betti: &[(u32, u32)],
        simply_connected: bool,
        total_space_simply_connected: bool,
    ) -> Result<Self, Error> {
        let rational_betti: std::collections::BTreeMap<u32, u32> =
            betti.iter().copied().collect();
        if rational_betti.get(&0) != Some(&1) {
            return Err(Error::BadBettiProfile("betti(0) must be 1".into()));
        }
        if rational_betti.keys().any(|&d| d > dimension) {
            return Err(Error::BadBettiProfile(format!(
                "a Betti degree exceeds the dimension {dimension}"
            )));
        }
        Ok(BettiProfile {
            dimension,
            rational_betti,
            simply_connected,
            total_space_simply_connected,
        })
    }

    pub fn betti(&self, degree: u32) -> u32 {
        self.rational_betti.get(&degree).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionUsed {
    H4iVanishes,
    H2iVanishes,
    H2IsLine,
    None,
}

/// Which inverse-existence guarantees a Betti profile supports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseReport {
    pub real_inverse_guaranteed: bool,
    pub complex_inverse_guaranteed: bool,
    pub condition_used: ConditionUsed,
}

/// Sufficient topological conditions for inverses:
/// vanishing positive `H^{4i}(-, Q)` guarantees real inverses; vanishing
/// positive even rational cohomology, or `H^2 = Q` alone with both the space
/// and its total space simply connected, guarantees complex inverses.
pub fn sufficient_conditions(profile: &BettiProfile) -> InverseReport {
    let h4i_vanishes = (1..).take_while(|i| 4 * i <= profile.dimension).all(|i| {
        profile.betti(4 * i) == 0
    });
    let h2i_vanishes = (1..).take_while(|i| 2 * i <= profile.dimension).all(|i| {
        profile.betti(2 * i) == 0
    });
    let h2_is_line = profile.betti(2) == 1
        && (2..)
            .take_while(|i| 2 * i <= profile.dimension)
            .all(|i| profile.betti(2 * i) == 0)
        && profile.simply_connected
        && profile.total_space_simply_connected;

    let complex = h2i_vanishes || h2_is_line;
    let condition_used = if h2i_vanishes {
        ConditionUsed::H2iVanishes
    } else if h2_is_line {
        ConditionUsed::H2IsLine
    } else if h4i_vanishes {
        ConditionUsed::H4iVanishes
    } else {
        ConditionUsed::None
    };
    InverseReport {
        real_inverse_guaranteed: h4i_vanishes,
        complex_inverse_guaranteed: complex,
        condition_used,
    }
}

/// Formal inverse `(n-1) E + k` obtained from a stable order assertion
/// `n E + k` trivial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalInverse {
    /// Number of copies of `E` in the inverse.
    pub e_multiplicity: u32,
    /// Rank of the trivial summand.
    pub trivial_rank: u32,
    /// Total rank of the inverse.
    pub rank: u64,
}

/// Given that `n E + k` is trivial (an input assertion, not something this
/// function proves), the bundle `(n-1) E + k` is an inverse for `E`. Rank
/// bookkeeping: `rank(E) + rank(F) = n rank(E) + k`.
pub fn inverse_from_finite_order(
    rank_e: u32,
    n: i64,
    trivial_rank: u32,
) -> Result<FormalInverse, Error> {
    if n < 1 {
        return Err(Error::BadStableOrder(n));
    }
    let n = n as u64;
    let rank = (n - 1) * u64::from(rank_e) + u64::from(trivial_rank);
    let inverse = FormalInverse {
        e_multiplicity: u32::try_from(n - 1).unwrap(),
        trivial_rank,
        rank,
    };
    debug_assert_eq!(
        u64::from(rank_e) + inverse.rank,
        n * u64::from(rank_e) + u64::from(trivial_rank)
    );
    Ok(inverse)
}

impl std::fmt::Display for FormalInverse {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.e_multiplicity, self.trivial_rank) {
            (0, k) => write!(f, "{k}"),
            (1, 0) => write!(f, "E"),
            (1, k) => write!(f, "E + {k}"),
            (n, 0) => write!(f, "{n}E"),
            (n, k) => write!(f, "{n}E + {k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::fixtures::{cp2cp2, eschenburg, s2xs2};
    use crate::star::{check_star, SearchBudget};

    fn d2(coords: &[i64]) -> DegreeTwoClass {
        DegreeTwoClass::from_i64(coords)
    }

    #[test]
    fn chern_of_cancelling_pair() {
        // L(u) + L(-u) over the connected sum: c1 = 0, c2 = -[u^2],
        // obstruction = 2 [u^2]
        let ring = cp2cp2();
        let h4 = ring.degree_four();
        let e = LineBundleSum::complex(vec![d2(&[1, 0]), d2(&[-1, 0])]);
        let summary = chern_summary(&e, &ring).unwrap();
        assert!(summary.c1.is_zero());
        let u2 = square(&ring.generator(0), &ring).unwrap();
        assert_eq!(summary.c2, h4.neg(&u2));
        assert_eq!(summary.stable_obstruction, h4.scale(&crate::Int::from(2), &u2));
        assert_eq!(summary.rank, 2);
    }

    #[test]
    fn chern_of_trivial_bundle() {
        let ring = cp2cp2();
        let e = LineBundleSum::trivial(3);
        let summary = chern_summary(&e, &ring).unwrap();
        assert!(summary.c1.is_zero());
        assert!(summary.c2.is_zero());
        assert!(summary.stable_obstruction.is_zero());
        assert_eq!(summary.rank, 3);
    }

    #[test]
    fn chern_obstruction_eschenburg() {
        // L(u) + L(v): obstruction = square(u) + square(v) = 2[u^2] + [uv]
        let ring = eschenburg();
        let h4 = ring.degree_four();
        let e = LineBundleSum::complex(vec![d2(&[1, 0]), d2(&[0, 1])]);
        let summary = chern_summary(&e, &ring).unwrap();
        let expect = h4.add(
            &square(&ring.generator(0), &ring).unwrap(),
            &square(&ring.generator(1), &ring).unwrap(),
        );
        assert_eq!(summary.stable_obstruction, expect);
    }

    #[test]
    fn chern_rejects_real_bundles() {
        let ring = cp2cp2();
        let e = LineBundleSum { c1s: vec![d2(&[1, 0])], real_flag: true, extra_trivial_rank: 0 };
        assert!(matches!(chern_summary(&e, &ring), Err(Error::RealBundle)));
        // pontryagin still works for real bundles
        assert!(!pontryagin_of_realification(&e, &ring).unwrap().is_zero());
    }

    #[test]
    fn pontryagin_examples() {
        let ring = cp2cp2();
        let h4 = ring.degree_four();
        let u2 = square(&ring.generator(0), &ring).unwrap();
        // single line
        let e = LineBundleSum::complex(vec![d2(&[1, 0])]);
        assert_eq!(pontryagin_of_realification(&e, &ring).unwrap(), u2);
        // trivial
        assert!(pontryagin_of_realification(&LineBundleSum::trivial(2), &ring)
            .unwrap()
            .is_zero());
        // L(u) + L(v): 2 [u^2] since [v^2] = [u^2]
        let e = LineBundleSum::complex(vec![d2(&[1, 0]), d2(&[0, 1])]);
        assert_eq!(
            pontryagin_of_realification(&e, &ring).unwrap(),
            h4.scale(&crate::Int::from(2), &u2)
        );
    }

    #[test]
    fn pontryagin_additive_over_concatenation() {
        let ring = eschenburg();
        let h4 = ring.degree_four();
        let a = LineBundleSum::complex(vec![d2(&[1, 2]), d2(&[0, -1])]);
        let b = LineBundleSum::complex(vec![d2(&[3, 1])]);
        let mut both = a.c1s.clone();
        both.extend(b.c1s.clone());
        let cat = LineBundleSum::complex(both);
        let sum = h4.add(
            &pontryagin_of_realification(&a, &ring).unwrap(),
            &pontryagin_of_realification(&b, &ring).unwrap(),
        );
        assert_eq!(pontryagin_of_realification(&cat, &ring).unwrap(), sum);
    }

    #[test]
    fn inverse_decision_cases() {
        let ring = cp2cp2();
        let holds = check_star(&ring, &SearchBudget::default_for(&ring));
        assert!(holds.is_holds());
        let line_u = LineBundleSum::complex(vec![d2(&[1, 0])]);
        assert_eq!(
            inverse_decision(&ring, &holds, &line_u).unwrap(),
            InverseDecision::NoBiquotientInverse
        );
        assert_eq!(
            inverse_decision(&ring, &holds, &LineBundleSum::trivial(4)).unwrap(),
            InverseDecision::HasBiquotientInverse
        );
        let fails_ring = s2xs2();
        let fails = check_star(&fails_ring, &SearchBudget::default_for(&fails_ring));
        assert!(fails.is_fails());
        assert_eq!(
            inverse_decision(&fails_ring, &fails, &line_u).unwrap(),
            InverseDecision::Unknown
        );
    }

    #[test]
    fn nontrivial_sums_obstructed_under_holds() {
        // over a ring where the property holds, any line-bundle sum with a
        // nonzero summand has nonzero stable obstruction, so a trivial sum
        // forces every summand trivial
        let ring = cp2cp2();
        assert!(check_star(&ring, &SearchBudget::default_for(&ring)).is_holds());
        let sums = [
            vec![d2(&[1, 0])],
            vec![d2(&[2, -3]), d2(&[0, 0])],
            vec![d2(&[1, 1]), d2(&[-1, 1]), d2(&[0, 5])],
        ];
        for lines in sums {
            let e = LineBundleSum::complex(lines);
            assert!(!e.is_trivial());
            assert!(!pontryagin_of_realification(&e, &ring).unwrap().is_zero());
        }
    }

    #[test]
    fn kill_c1_examples() {
        let ring = eschenburg();
        let e = LineBundleSum::complex(vec![d2(&[1, 0]), d2(&[0, 1])]);
        let partner = kill_c1_partner(&e, &ring).unwrap();
        assert_eq!(partner, d2(&[-1, -1]));
        // augmenting by the partner kills c1
        let mut lines = e.c1s.clone();
        lines.push(partner);
        let summary = chern_summary(&LineBundleSum::complex(lines), &ring).unwrap();
        assert!(summary.c1.is_zero());
        // trivial bundle: partner is zero
        assert!(kill_c1_partner(&LineBundleSum::trivial(1), &ring).unwrap().is_zero());
    }

    #[test]
    fn sufficient_condition_cases() {
        // S^3: everything positive-even vanishes
        let s3 = BettiProfile::new(3, &[(0, 1), (3, 1)], true, true).unwrap();
        let r = sufficient_conditions(&s3);
        assert!(r.real_inverse_guaranteed && r.complex_inverse_guaranteed);
        assert_eq!(r.condition_used, ConditionUsed::H2iVanishes);

        // S^2: complex via the H^2-line condition
        let s2 = BettiProfile::new(2, &[(0, 1), (2, 1)], true, true).unwrap();
        let r = sufficient_conditions(&s2);
        assert!(r.real_inverse_guaranteed && r.complex_inverse_guaranteed);
        assert_eq!(r.condition_used, ConditionUsed::H2IsLine);

        // dimension-4 space with H^4 = Q: nothing guaranteed
        let cs = BettiProfile::new(4, &[(0, 1), (2, 2), (4, 1)], true, true).unwrap();
        let r = sufficient_conditions(&cs);
        assert!(!r.real_inverse_guaranteed && !r.complex_inverse_guaranteed);
        assert_eq!(r.condition_used, ConditionUsed::None);

        // real-only: H^2 too big for the line condition, H^4 empty
        let t = BettiProfile::new(3, &[(0, 1), (2, 2)], true, true).unwrap();
        let r = sufficient_conditions(&t);
        assert!(r.real_inverse_guaranteed && !r.complex_inverse_guaranteed);
        assert_eq!(r.condition_used, ConditionUsed::H4iVanishes);
    }

    #[test]
    fn sufficient_conditions_monotone_under_zeroing() {
        // zeroing even Betti numbers never turns a guarantee off
        let base = BettiProfile::new(6, &[(0, 1), (2, 1), (4, 2), (6, 1)], true, true).unwrap();
        let before = sufficient_conditions(&base);
        let mut zeroed = base.clone();
        zeroed.rational_betti.insert(4, 0);
        zeroed.rational_betti.insert(6, 0);
        let after = sufficient_conditions(&zeroed);
        assert!(after.real_inverse_guaranteed >= before.real_inverse_guaranteed);
        assert!(after.complex_inverse_guaranteed >= before.complex_inverse_guaranteed);
    }

    #[test]
    fn betti_profile_validation() {
        assert!(BettiProfile::new(3, &[(0, 2)], true, true).is_err());
        assert!(BettiProfile::new(3, &[(0, 1), (5, 1)], true, true).is_err());
    }

    #[test]
    fn finite_order_inverse_bookkeeping() {
        // n = 1, k = 0: E itself is trivial, inverse is the zero bundle
        let f = inverse_from_finite_order(2, 1, 0).unwrap();
        assert_eq!((f.e_multiplicity, f.trivial_rank, f.rank), (0, 0, 0));
        // n = 2, k = 0, rank 2: F = E, total rank 4
        let f = inverse_from_finite_order(2, 2, 0).unwrap();
        assert_eq!((f.e_multiplicity, f.rank), (1, 2));
        assert_eq!(f.to_string(), "E");
        // n = 3, k = 2, rank 1: F = 2E + 2, total rank 5
        let f = inverse_from_finite_order(1, 3, 2).unwrap();
        assert_eq!((f.e_multiplicity, f.trivial_rank, f.rank), (2, 2, 4));
        assert_eq!(f.to_string(), "2E + 2");
        assert!(inverse_from_finite_order(1, 0, 0).is_err());
    }

    #[test]
    fn bundle_json_roundtrip() {
        let text = r#"{"lines": [[1, 0], [-1, 2]], "real": false, "extra_trivial": 1}"#;
        let e = LineBundleSum::from_json(text).unwrap();
        assert_eq!(e.c1s.len(), 2);
        assert_eq!(e.extra_trivial_rank, 1);
        let again = LineBundleSum::from_json(&e.to_json()).unwrap();
        assert_eq!(again, e);
        // flags default to false/0
        let bare = LineBundleSum::from_json(r#"{"lines": [[1, 0]]}"#).unwrap();
        assert!(!bare.real_flag);
        assert_eq!(bare.extra_trivial_rank, 0);
    }
}
