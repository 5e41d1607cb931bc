//! The example families: admissible weight matrices, torus actions on
//! products of 3-spheres, their cohomology rings, and the low-dimensional
//! catalog.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bundle::BettiProfile;
use crate::matrix::{self, Int, IntMat};
use crate::ring::{CohomologyRing, PairBasis, SymCoeffVector};
use crate::Error;

/// A square integer weight matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightMatrix(pub IntMat);

impl WeightMatrix {
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, Error> {
        let m = IntMat::from_i64_rows(rows);
        WeightMatrix::new(m)
    }

    pub fn new(m: IntMat) -> Result<Self, Error> {
        if m.rows() != m.cols() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        Ok(WeightMatrix(m))
    }

    pub fn k(&self) -> usize {
        self.0.rows()
    }
}

/// Is the matrix admissible: ones on the diagonal, a 2 at position (1,2), a 1
/// at (2,1), and zeros strictly above the diagonal elsewhere? Entries below
/// the diagonal (other than the pinned (2,1)) are unconstrained.
pub fn is_admissible(a: &WeightMatrix) -> Result<bool, Error> {
    let k = a.k();
    if k < 2 {
        return Err(Error::MatrixTooSmall { min: 2, got: k });
    }
    let m = &a.0;
    for i in 0..k {
        if !m.at(i, i).is_one() {
            return Ok(false);
        }
    }
    if *m.at(0, 1) != Int::from(2) || !m.at(1, 0).is_one() {
        return Ok(false);
    }
    for i in 0..k {
        for j in i + 1..k {
            if (i, j) != (0, 1) && !m.at(i, j).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Weight data of a torus action on a product of 3-spheres: per factor `i`,
/// the exponent vectors of the two circle actions on the two complex
/// coordinates of that factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusActionSpec {
    #[serde(with = "crate::jsonint::vec2")]
    pub a_weights: Vec<Vec<Int>>,
    #[serde(with = "crate::jsonint::vec2")]
    pub b_weights: Vec<Vec<Int>>,
}

impl TorusActionSpec {
    pub fn new(a_weights: Vec<Vec<Int>>, b_weights: Vec<Vec<Int>>) -> Result<Self, Error> {
        let k = a_weights.len();
        if k == 0 || b_weights.len() != k {
            return Err(Error::BadActionSpec(format!(
                "need equally many a- and b-weight vectors, got {} and {}",
                k,
                b_weights.len()
            )));
        }
        if a_weights.iter().chain(&b_weights).any(|w| w.len() != k) {
            return Err(Error::BadActionSpec(format!("every weight vector must have length {k}")));
        }
        Ok(TorusActionSpec { a_weights, b_weights })
    }

    /// The action attached to an admissible matrix: the i-th a-weight is the
    /// standard basis vector e_i and the i-th b-weight is row i of the matrix.
    pub fn from_weight_matrix(a: &WeightMatrix) -> Self {
        let k = a.k();
        let a_weights = (0..k)
            .map(|i| {
                let mut e = vec![Int::zero(); k];
                e[i] = Int::one();
                e
            })
            .collect();
        let b_weights = (0..k).map(|i| a.0.row(i).to_vec()).collect();
        TorusActionSpec { a_weights, b_weights }
    }

    pub fn k(&self) -> usize {
        self.a_weights.len()
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let spec: TorusActionSpec = serde_json::from_str(text)?;
        TorusActionSpec::new(spec.a_weights, spec.b_weights)
    }
}

/// Isotropy found at a weight selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Isotropy {
    /// Finite isotropy of the given order (> 1).
    Finite {
        #[serde(with = "crate::jsonint::scalar")]
        order: Int,
    },
    /// A positive-dimensional isotropy subgroup (selection matrix singular).
    PositiveDimensional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "freeness", rename_all = "snake_case")]
pub enum Freeness {
    Free,
    NonFree {
        /// Per factor: false selects the a-weight, true the b-weight.
        selection: Vec<bool>,
        isotropy: Isotropy,
    },
}

/// The selection matrix for a pole pattern: row i is the a- or b-weight of
/// factor i according to the selection bit.
pub fn selection_matrix(spec: &TorusActionSpec, selection: &[bool]) -> IntMat {
    let rows = selection
        .iter()
        .enumerate()
        .map(|(i, &b)| if b { spec.b_weights[i].clone() } else { spec.a_weights[i].clone() })
        .collect();
    IntMat::from_rows(rows)
}

/// All `2^k` selection determinants in selection order (binary counting,
/// a-weights first).
pub fn selection_determinants(spec: &TorusActionSpec) -> Vec<(Vec<bool>, Int)> {
    let k = spec.k();
    (0..1u64 << k)
        .map(|bits| {
            let selection: Vec<bool> = (0..k).map(|i| bits >> i & 1 == 1).collect();
            let det = selection_matrix(spec, &selection).det();
            (selection, det)
        })
        .collect()
}

/// Freeness test: the action is free exactly when every one of the `2^k`
/// selection matrices has determinant ±1. The isotropy group at a pole
/// pattern is the kernel of the character map given by the selection matrix —
/// of order |det| when that is nonzero, positive-dimensional when it is zero —
/// and interior points only impose supersets of the pole constraints.
pub fn freeness_check(spec: &TorusActionSpec) -> Freeness {
    for (selection, det) in selection_determinants(spec) {
        let a = det.abs();
        if !a.is_one() {
            let isotropy = if a.is_zero() {
                Isotropy::PositiveDimensional
            } else {
                Isotropy::Finite { order: a }
            };
            return Freeness::NonFree { selection, isotropy };
        }
    }
    Freeness::Free
}

/// The truncated cohomology ring of the quotient by the action of an
/// admissible matrix: generators `u_1..u_k`, relation `i` being
/// `sum_j A_{ij} u_i u_j`.
pub fn ra_cohomology(a: &WeightMatrix) -> Result<CohomologyRing, Error> {
    if !is_admissible(a)? {
        return Err(Error::NotAdmissible(format!("{:?}", a.0)));
    }
    let k = a.k();
    let basis = PairBasis::new(k);
    let relations = (0..k)
        .map(|i| {
            let mut rel = SymCoeffVector::zeros(basis);
            for j in 0..k {
                let coeff = a.0.at(i, j).clone();
                if !coeff.is_zero() {
                    rel.0[basis.index(i, j)] = coeff;
                }
            }
            rel
        })
        .collect();
    CohomologyRing::new(k, relations, Some(format!("R(A), k={k}")), None)
}

fn is_odd_prime(p: i64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The admissible matrix of the prime family: first column `(1,1,p,...,p)^t`,
/// second column `(2,1,0,...,0)^t`, and identity columns from the third on.
pub fn rp_matrix(p: i64, k: usize) -> Result<WeightMatrix, Error> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime("p", p.to_string()));
    }
    if k < 3 {
        return Err(Error::MatrixTooSmall { min: 3, got: k });
    }
    let mut m = IntMat::identity(k);
    m.set(0, 1, Int::from(2));
    m.set(1, 0, Int::one());
    for i in 2..k {
        m.set(i, 0, Int::from(p));
    }
    let w = WeightMatrix(m);
    debug_assert!(is_admissible(&w).unwrap());
    Ok(w)
}

/// The ring of the prime-family quotient.
pub fn rp_cohomology(p: i64, k: usize) -> Result<CohomologyRing, Error> {
    let a = rp_matrix(p, k)?;
    let ring = ra_cohomology(&a)?;
    CohomologyRing::new(
        ring.k(),
        ring.relations().to_vec(),
        Some(format!("R({p}), k={k}")),
        None,
    )
}

/// Parameters of the 7-dimensional two-circle-weight family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QParams {
    pub s: i64,
    pub t: i64,
}

impl QParams {
    pub fn first_pontryagin(self) -> i64 {
        q_first_pontryagin(self.s, self.t)
    }
}

/// First Pontryagin number of the 7-dimensional two-parameter family:
/// `6 - s^2 - (s-t)^2` on the degree-4 generator. The sign of the class is
/// presentation-dependent; homeomorphism-type comparisons use the absolute
/// value.
pub fn q_first_pontryagin(s: i64, t: i64) -> i64 {
    let s = i128::from(s);
    let t = i128::from(t);
    i64::try_from(6 - s * s - (s - t) * (s - t)).expect("p1 out of i64 range")
}

/// Extend a primitive row vector to a unimodular matrix whose first row is
/// the input, by iterated extended-gcd column reduction. Deterministic.
///
/// Column operations reduce the row to `e_1`; their inverses, applied on the
/// left to the identity, accumulate the result: if `b * E_1 * ... * E_t =
/// e_1` then `B = E_t^{-1} ... E_1^{-1}` satisfies `e_1^T B = b`, i.e. its
/// first row is the input, and `|det B| = 1`.
pub fn complete_to_unimodular(b: &[Int]) -> Result<IntMat, Error> {
    let k = b.len();
    if b.iter().all(Int::is_zero) {
        return Err(Error::ZeroVector);
    }
    let content = b.iter().fold(Int::zero(), |g, x| g.gcd(x));
    if !content.is_one() {
        return Err(Error::NotPrimitive(content.to_string()));
    }
    let mut row: Vec<Int> = b.to_vec();
    let mut out: Vec<Vec<Int>> = (0..k)
        .map(|r| {
            let mut e = vec![Int::zero(); k];
            e[r] = Int::one();
            e
        })
        .collect();
    for j in 1..k {
        // Euclid on (row[0], row[j]). Column op "col_0 -= q * col_j" has the
        // left-inverse action "B row_j += q * B row_0"; the column swap swaps
        // the corresponding rows of B.
        while !row[j].is_zero() {
            let q = &row[0] / &row[j];
            if !q.is_zero() {
                let delta = &q * &row[j];
                row[0] -= delta;
                let (head, tail) = out.split_at_mut(j);
                for (a, b) in tail[0].iter_mut().zip(&head[0]) {
                    *a += &q * b;
                }
            }
            row.swap(0, j);
            out.swap(0, j);
        }
    }
    if row[0].is_negative() {
        // negate column 0; on the left this negates row 0 of B
        row[0] = -row[0].clone();
        for v in &mut out[0] {
            *v = -v.clone();
        }
    }
    debug_assert!(row[0].is_one() && row[1..].iter().all(Int::is_zero));
    let b_mat = IntMat::from_rows(out);
    debug_assert_eq!(b_mat.row(0), b);
    debug_assert!(b_mat.det().abs().is_one());
    Ok(b_mat)
}

/// Presentation data realising a degree-2 class as an Euler class: the
/// rotation speed `d = gcd(x)`, the unimodular completion `B` of `x/d`, and
/// complementary circle/corank-1 subtorus exponent data read off `B^{-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineBundlePresentation {
    #[serde(with = "crate::jsonint::scalar")]
    pub d: Int,
    pub b_matrix: IntMat,
    /// Exponent vector of the circle subgroup (first column of `B^{-1}`).
    #[serde(with = "crate::jsonint::vec")]
    pub circle: Vec<Int>,
    /// Exponent vectors of the complementary subtorus (columns 2..k of
    /// `B^{-1}`).
    pub complement: IntMat,
}

/// Subtorus presentation of the line bundle with first Chern class `x`: write
/// `x = d * b` with `b` primitive, complete `b` to a unimodular `B`; the
/// circle is the `B^{-1}`-image of the first coordinate circle acting at
/// speed `d`, and the complementary subtorus is the `B^{-1}`-image of the
/// remaining coordinates. For `x = 0` the presentation is `d = 0` with the
/// identity matrix.
pub fn line_bundle_presentation(x: &[Int]) -> Result<LineBundlePresentation, Error> {
    let k = x.len();
    if x.iter().all(Int::is_zero) {
        let b = IntMat::identity(k);
        let mut circle = vec![Int::zero(); k];
        if k > 0 {
            circle[0] = Int::one();
        }
        let complement = IntMat::identity(k).select_cols(&(1..k).collect::<Vec<_>>());
        return Ok(LineBundlePresentation { d: Int::zero(), b_matrix: b, circle, complement });
    }
    let d = x.iter().fold(Int::zero(), |g, v| g.gcd(v));
    let primitive: Vec<Int> = x.iter().map(|v| v / &d).collect();
    let b_matrix = complete_to_unimodular(&primitive)?;
    let b_inv = matrix::inverse_unimodular(&b_matrix).expect("unimodular completion");
    let circle = b_inv.col(0);
    let complement = b_inv.select_cols(&(1..k).collect::<Vec<_>>());
    Ok(LineBundlePresentation { d, b_matrix, circle, complement })
}

/// A ring together with the dimension bookkeeping of a product with an
/// odd-dimensional sphere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductWithSphere {
    pub ring: CohomologyRing,
    pub dimension: u32,
}

/// Product with an odd sphere of dimension >= 3: the degree <= 4 ring data is
/// unchanged (the sphere contributes nothing below its own dimension) and the
/// manifold dimension grows from `2k` by the sphere dimension. In particular
/// the vanishing-squares verdict of the product equals that of the base.
pub fn product_with_odd_sphere(
    ring: &CohomologyRing,
    sphere_dim: u32,
) -> Result<ProductWithSphere, Error> {
    if sphere_dim.is_multiple_of(2) || sphere_dim < 3 {
        return Err(Error::BadSphereDimension(sphere_dim));
    }
    let name = match ring.name() {
        Some(n) => format!("{n} x S^{sphere_dim}"),
        None => format!("product with S^{sphere_dim}"),
    };
    let renamed = CohomologyRing::new(
        ring.k(),
        ring.relations().to_vec(),
        Some(name),
        ring.generator_names().map(<[String]>::to_vec),
    )?;
    Ok(ProductWithSphere { ring: renamed, dimension: 2 * ring.k() as u32 + sphere_dim })
}

/// A named space in the low-dimensional catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub dimension: u32,
    pub profile: BettiProfile,
}

/// The simply connected spaces of dimension 2, 3, 5 (with simply connected
/// total space), with their rational Betti data.
pub fn catalog_low_dim() -> Vec<CatalogEntry> {
    let entry = |name: &str, dimension: u32, betti: &[(u32, u32)]| CatalogEntry {
        name: name.to_string(),
        dimension,
        profile: BettiProfile::new(dimension, betti, true, true).expect("catalog profile"),
    };
    vec![
        entry("S^2", 2, &[(0, 1), (2, 1)]),
        entry("S^3", 3, &[(0, 1), (3, 1)]),
        entry("S^5", 5, &[(0, 1), (5, 1)]),
        entry("S^2 x S^3", 5, &[(0, 1), (2, 1), (3, 1), (5, 1)]),
        // rational homology 5-sphere
        entry("SU(3)/SO(3)", 5, &[(0, 1), (5, 1)]),
        // the twisted S^3-bundle over S^2; same rational Betti data as the product
        entry("S^3 ~x S^2", 5, &[(0, 1), (2, 1), (3, 1), (5, 1)]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{multiply, square};
    use crate::star::{check_star, SearchBudget};
    use proptest::prelude::*;

    fn wm(rows: &[&[i64]]) -> WeightMatrix {
        WeightMatrix::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&wm(&[&[1, 2], &[1, 1]])).unwrap());
        let five = wm(&[
            &[1, 2, 0, 0, 0],
            &[1, 1, 0, 0, 0],
            &[3, -2, 1, 0, 0],
            &[-1, 4, 2, 1, 0],
            &[5, 0, -3, 2, 1],
        ]);
        assert!(is_admissible(&five).unwrap());
        // identity fails: the (1,2) entry must be 2
        assert!(!is_admissible(&wm(&[&[1, 0], &[0, 1]])).unwrap());
        // upper-triangular garbage fails
        assert!(!is_admissible(&wm(&[&[1, 2, 1], &[1, 1, 0], &[0, 0, 1]])).unwrap());
        // too small
        assert!(is_admissible(&wm(&[&[1]])).is_err());
    }

    #[test]
    fn freeness_of_base_admissible_action() {
        let spec = TorusActionSpec::from_weight_matrix(&wm(&[&[1, 2], &[1, 1]]));
        let dets: Vec<Int> =
            selection_determinants(&spec).into_iter().map(|(_, d)| d).collect();
        assert_eq!(dets, vec![Int::from(1), Int::from(1), Int::from(1), Int::from(-1)]);
        assert_eq!(freeness_check(&spec), Freeness::Free);
    }

    #[test]
    fn componentwise_hopf_action_is_free() {
        let e = |i: usize, k: usize| {
            let mut v = vec![Int::zero(); k];
            v[i] = Int::one();
            v
        };
        let spec = TorusActionSpec::new(
            vec![e(0, 3), e(1, 3), e(2, 3)],
            vec![e(0, 3), e(1, 3), e(2, 3)],
        )
        .unwrap();
        assert_eq!(freeness_check(&spec), Freeness::Free);
    }

    #[test]
    fn doubled_b_weight_gives_positive_dimensional_isotropy() {
        let spec = TorusActionSpec::new(
            vec![vec![Int::one(), Int::zero()], vec![Int::zero(), Int::one()]],
            vec![vec![Int::one(), Int::one()], vec![Int::one(), Int::one()]],
        )
        .unwrap();
        match freeness_check(&spec) {
            Freeness::NonFree { selection, isotropy } => {
                assert_eq!(selection, vec![true, true]);
                assert_eq!(isotropy, Isotropy::PositiveDimensional);
            }
            f => panic!("expected NonFree, got {f:?}"),
        }
    }

    #[test]
    fn finite_isotropy_is_reported_with_order() {
        // b-weight (2, 1) against a-weight selection: det 2 at the pure-b pole
        let spec = TorusActionSpec::new(
            vec![vec![Int::one(), Int::zero()], vec![Int::zero(), Int::one()]],
            vec![vec![Int::from(2), Int::zero()], vec![Int::zero(), Int::one()]],
        )
        .unwrap();
        match freeness_check(&spec) {
            Freeness::NonFree { isotropy, .. } => {
                assert_eq!(isotropy, Isotropy::Finite { order: Int::from(2) });
            }
            f => panic!("expected NonFree, got {f:?}"),
        }
    }

    #[test]
    fn ra_ring_k2_presentation() {
        let ring = ra_cohomology(&wm(&[&[1, 2], &[1, 1]])).unwrap();
        // relations u1^2 + 2 u1u2 and u2^2 + u1u2
        let b = ring.pair_basis();
        let r0 = &ring.relations()[0].0;
        assert_eq!(r0[b.index(0, 0)], Int::from(1));
        assert_eq!(r0[b.index(0, 1)], Int::from(2));
        assert_eq!(r0[b.index(1, 1)], Int::from(0));
        let r1 = &ring.relations()[1].0;
        assert_eq!(r1[b.index(1, 1)], Int::from(1));
        assert_eq!(r1[b.index(0, 1)], Int::from(1));
        assert_eq!(ring.degree_four().free_rank(), 1);
    }

    #[test]
    fn rp_ring_relations_and_rank() {
        let ring = rp_cohomology(3, 3).unwrap();
        let b = ring.pair_basis();
        // relation 3 is u3^2 + 3 u1u3
        let r2 = &ring.relations()[2].0;
        assert_eq!(r2[b.index(2, 2)], Int::from(1));
        assert_eq!(r2[b.index(0, 2)], Int::from(3));
        assert_eq!(r2[b.index(1, 2)], Int::from(0));
        // free rank k(k-1)/2, no torsion
        assert_eq!(ring.degree_four().free_rank(), 3);
        assert!(ring.degree_four().torsion_orders().is_empty());
    }

    #[test]
    fn ra_reduction_identities() {
        // in the quotient: u1^2 = -2 u1u2
        let ring = ra_cohomology(&wm(&[&[1, 2], &[1, 1]])).unwrap();
        let u1 = ring.generator(0);
        let u2 = ring.generator(1);
        let u1_sq = square(&u1, &ring).unwrap();
        let u1u2 = multiply(&u1, &u2, &ring).unwrap();
        assert_eq!(u1_sq, ring.degree_four().scale(&Int::from(-2), &u1u2));
    }

    #[test]
    fn rp_matrix_displayed_example() {
        let a = rp_matrix(3, 5).unwrap();
        let expect = wm(&[
            &[1, 2, 0, 0, 0],
            &[1, 1, 0, 0, 0],
            &[3, 0, 1, 0, 0],
            &[3, 0, 0, 1, 0],
            &[3, 0, 0, 0, 1],
        ]);
        assert_eq!(a, expect);
        assert!(is_admissible(&a).unwrap());
        // first column nonzero everywhere
        for i in 0..5 {
            assert!(!a.0.at(i, 0).is_zero());
        }
    }

    #[test]
    fn rp_matrix_validation() {
        assert!(rp_matrix(4, 3).is_err());
        assert!(rp_matrix(9, 3).is_err());
        assert!(rp_matrix(2, 3).is_err());
        assert!(rp_matrix(3, 2).is_err());
        assert!(rp_matrix(7, 4).is_ok());
    }

    #[test]
    fn q_pontryagin_values() {
        assert_eq!(q_first_pontryagin(0, 0), 6);
        assert_eq!(q_first_pontryagin(1, 1), 5);
        assert_eq!(q_first_pontryagin(1, 0), 4);
        assert_eq!(QParams { s: 2, t: -1 }.first_pontryagin(), 6 - 4 - 9);
    }

    #[test]
    fn q_pontryagin_reflection_symmetry() {
        for s in -10..=10 {
            for t in -10..=10 {
                assert_eq!(q_first_pontryagin(s, t), q_first_pontryagin(s, 2 * s - t));
            }
        }
    }

    #[test]
    fn unimodular_completion_examples() {
        let ints = |v: &[i64]| v.iter().map(|&x| Int::from(x)).collect::<Vec<_>>();
        // basis vector: identity
        let b = complete_to_unimodular(&ints(&[1, 0, 0])).unwrap();
        assert_eq!(b, IntMat::identity(3));
        // (2,3) and (6,10,15)
        for v in [vec![2i64, 3], vec![6, 10, 15], vec![0, 5, 3], vec![-4, 9]] {
            let v = ints(&v);
            let b = complete_to_unimodular(&v).unwrap();
            assert_eq!(b.row(0), &v[..]);
            assert!(b.det().abs().is_one());
        }
        // errors
        assert!(matches!(complete_to_unimodular(&ints(&[0, 0])), Err(Error::ZeroVector)));
        assert!(matches!(
            complete_to_unimodular(&ints(&[2, 4])),
            Err(Error::NotPrimitive(_))
        ));
    }

    #[test]
    fn line_bundle_presentation_cases() {
        let ints = |v: &[i64]| v.iter().map(|&x| Int::from(x)).collect::<Vec<_>>();
        // multiple of a basis vector: speed d, identity matrix
        let p = line_bundle_presentation(&ints(&[4, 0, 0])).unwrap();
        assert_eq!(p.d, Int::from(4));
        assert_eq!(p.b_matrix, IntMat::identity(3));
        // primitive vector: d = 1
        let p = line_bundle_presentation(&ints(&[2, 3])).unwrap();
        assert_eq!(p.d, Int::from(1));
        assert_eq!(p.b_matrix.row(0), &ints(&[2, 3])[..]);
        // gcd factored out
        let p = line_bundle_presentation(&ints(&[4, 6])).unwrap();
        assert_eq!(p.d, Int::from(2));
        assert_eq!(p.b_matrix.row(0), &ints(&[2, 3])[..]);
        // zero class
        let p = line_bundle_presentation(&ints(&[0, 0])).unwrap();
        assert_eq!(p.d, Int::from(0));
        assert_eq!(p.b_matrix, IntMat::identity(2));
    }

    #[test]
    fn line_bundle_presentation_reconstructs_and_complements() {
        let ints = |v: &[i64]| v.iter().map(|&x| Int::from(x)).collect::<Vec<_>>();
        for v in [vec![4i64, 6], vec![3, 5, 7], vec![0, -2, 4]] {
            let x = ints(&v);
            let p = line_bundle_presentation(&x).unwrap();
            // d * first row of B = x
            let rebuilt: Vec<Int> = p.b_matrix.row(0).iter().map(|b| &p.d * b).collect();
            assert_eq!(rebuilt, x);
            // circle and complement columns assemble to B^{-1}
            let k = x.len();
            let mut cols = vec![p.circle.clone()];
            for j in 0..k - 1 {
                cols.push(p.complement.col(j));
            }
            let assembled = IntMat::from_rows(
                (0..k).map(|r| (0..k).map(|c| cols[c][r].clone()).collect()).collect(),
            );
            assert_eq!(p.b_matrix.mul(&assembled), IntMat::identity(k));
        }
    }

    #[test]
    fn product_with_sphere_preserves_ring_and_verdict() {
        let ring = rp_cohomology(3, 3).unwrap();
        let product = product_with_odd_sphere(&ring, 3).unwrap();
        assert_eq!(product.dimension, 9);
        assert_eq!(product.ring.relations(), ring.relations());
        let b1 = SearchBudget::default_for(&ring);
        let b2 = SearchBudget::default_for(&product.ring);
        assert_eq!(
            check_star(&ring, &b1).is_holds(),
            check_star(&product.ring, &b2).is_holds()
        );
        // dimension-5 sphere also leaves the ring alone
        let p5 = product_with_odd_sphere(&ring, 5).unwrap();
        assert_eq!(p5.ring.relations(), ring.relations());
        assert!(product_with_odd_sphere(&ring, 2).is_err());
    }

    #[test]
    fn catalog_entries() {
        let entries = catalog_low_dim();
        assert_eq!(entries.len(), 6);
        let by_name = |n: &str| entries.iter().find(|e| e.name == n).unwrap();
        let s5 = by_name("S^5");
        assert_eq!(s5.profile.betti(0), 1);
        assert_eq!(s5.profile.betti(5), 1);
        assert_eq!(s5.profile.betti(2), 0);
        let wu = by_name("SU(3)/SO(3)");
        for d in [2, 4] {
            assert_eq!(wu.profile.betti(d), 0);
        }
        let s2s3 = by_name("S^2 x S^3");
        assert_eq!(
            (0..=5).map(|d| s2s3.profile.betti(d)).collect::<Vec<_>>(),
            vec![1, 0, 1, 1, 0, 1]
        );
    }

    /// Brute-force pole-point isotropy oracle: elements of order dividing m
    /// fixing the pole pattern of a selection sigma are the solutions of
    /// `M_sigma x = 0 (mod m)`. Cross-validates the determinant criterion
    /// for k <= 3.
    #[test]
    fn freeness_matches_brute_force_pole_isotropy() {
        let count_mod = |m: &IntMat, modulus: i64| -> i64 {
            let k = m.rows();
            let mut count = 0;
            let mut x = vec![0i64; k];
            loop {
                let fixes = (0..k).all(|i| {
                    let mut acc = 0i64;
                    for j in 0..k {
                        let mij = i64::try_from(m.at(i, j).clone()).unwrap();
                        acc = (acc + mij.rem_euclid(modulus) * x[j]).rem_euclid(modulus);
                    }
                    acc == 0
                });
                if fixes {
                    count += 1;
                }
                let mut pos = k;
                loop {
                    if pos == 0 {
                        return count;
                    }
                    pos -= 1;
                    x[pos] += 1;
                    if x[pos] < modulus {
                        break;
                    }
                    x[pos] = 0;
                }
            }
        };

        let specs = [
            TorusActionSpec::from_weight_matrix(&wm(&[&[1, 2], &[1, 1]])),
            TorusActionSpec::from_weight_matrix(&wm(&[&[1, 2, 0], &[1, 1, 0], &[-3, 2, 1]])),
            // positive-dimensional isotropy
            TorusActionSpec::new(
                vec![vec![Int::one(), Int::zero()], vec![Int::zero(), Int::one()]],
                vec![vec![Int::one(), Int::one()], vec![Int::one(), Int::one()]],
            )
            .unwrap(),
            // finite isotropy of order 2
            TorusActionSpec::new(
                vec![vec![Int::one(), Int::zero()], vec![Int::zero(), Int::one()]],
                vec![vec![Int::from(2), Int::zero()], vec![Int::zero(), Int::one()]],
            )
            .unwrap(),
        ];
        for spec in &specs {
            let mut all_trivial = true;
            for (selection, det) in selection_determinants(spec) {
                let m = selection_matrix(spec, &selection);
                let d = i64::try_from(det.abs()).unwrap();
                if d == 0 {
                    // a circle (or bigger) fixes the point: solution counts
                    // grow with the modulus
                    for modulus in [2i64, 3, 4] {
                        assert!(count_mod(&m, modulus) >= modulus, "{selection:?}");
                    }
                    all_trivial = false;
                } else if d == 1 {
                    for modulus in [2i64, 3, 4, 5] {
                        assert_eq!(count_mod(&m, modulus), 1, "{selection:?}");
                    }
                } else {
                    assert_eq!(count_mod(&m, d), d, "{selection:?}");
                    all_trivial = false;
                }
            }
            assert_eq!(freeness_check(spec) == Freeness::Free, all_trivial);
        }
    }

    #[test]
    fn square_of_primitive_nonzero_in_ra_rings() {
        // reproduces the reduction consistency on a few admissible matrices
        let a = wm(&[&[1, 2, 0], &[1, 1, 0], &[-3, 2, 1]]);
        let ring = ra_cohomology(&a).unwrap();
        for relv in ring.relations() {
            assert!(ring.degree_four().normal_form(relv).is_zero());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn random_admissible_actions_are_free(
            k in 2usize..=6,
            seed in proptest::collection::vec(-5i64..=5, 36),
        ) {
            let mut m = IntMat::identity(k);
            m.set(0, 1, Int::from(2));
            m.set(1, 0, Int::one());
            let mut s = seed.into_iter();
            for i in 2..k {
                for j in 0..i {
                    if (i, j) != (1, 0) {
                        m.set(i, j, Int::from(s.next().unwrap()));
                    }
                }
            }
            let a = WeightMatrix(m);
            prop_assert!(is_admissible(&a).unwrap());
            let spec = TorusActionSpec::from_weight_matrix(&a);
            prop_assert_eq!(freeness_check(&spec), Freeness::Free);
            // the quotient's degree-4 group is free of rank k(k-1)/2
            let ring = ra_cohomology(&a).unwrap();
            prop_assert_eq!(ring.degree_four().free_rank(), k * (k - 1) / 2);
            prop_assert!(ring.degree_four().torsion_orders().is_empty());
        }

        #[test]
        fn unimodular_completion_randomized(
            v in proptest::collection::vec(-30i64..=30, 1..=6),
        ) {
            let x: Vec<Int> = v.iter().map(|&a| Int::from(a)).collect();
            let content = x.iter().fold(Int::zero(), |g, a| g.gcd(a));
            prop_assume!(content.is_one());
            let b = complete_to_unimodular(&x).unwrap();
            prop_assert_eq!(b.row(0), &x[..]);
            prop_assert!(b.det().abs().is_one());
        }
    }
}
