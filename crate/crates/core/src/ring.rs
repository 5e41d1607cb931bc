//! Graded rings `Z[u_1..u_k]/I` truncated at degree 4.
//!
//! A ring is presented by `k` degree-2 generators and a list of degree-4
//! integer relations. Degrees 0 and 2 are free; the degree-4 part is the
//! quotient of the free symmetric square `Z^{k(k+1)/2}` by the lattice the
//! relations span, normalised once by Smith normal form. Relations of degree
//! 6 and above are outside the model: every computation in this crate only
//! consumes degrees 2 and 4, so presentations like Eschenburg's
//! `<v^2 - u^2 - uv, u^3>` enter with the cubic generator dropped.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::jsonint;
use crate::matrix::{self, Int, IntMat};
use crate::Error;

/// Index bookkeeping for the basis `{u_i u_j : i <= j}` of the symmetric
/// square. Off-diagonal pairs come first (lexicographically), then the
/// diagonal ones; the Smith normal form's pivot rule prefers late rows, so
/// relation sets whose diagonal coefficients are units get eliminated through
/// the diagonal coordinates and the surviving classes stay aligned with the
/// off-diagonal products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairBasis {
    k: usize,
}

impl PairBasis {
    pub fn new(k: usize) -> Self {
        PairBasis { k }
    }

    pub fn len(&self) -> usize {
        self.k * (self.k + 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate index of the pair `(i, j)`, 0-based, any order.
    pub fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        assert!(j < self.k, "generator index out of range");
        if i == j {
            self.k * (self.k - 1) / 2 + i
        } else {
            // off-diagonal block, lexicographic over i < j
            i * self.k - i * (i + 1) / 2 + (j - i - 1)
        }
    }

    /// Pair `(i, j)` with `i <= j` for a coordinate index.
    pub fn pair(&self, idx: usize) -> (usize, usize) {
        let off = self.k * (self.k - 1) / 2;
        if idx >= off {
            let i = idx - off;
            (i, i)
        } else {
            let mut rest = idx;
            for i in 0..self.k {
                let row = self.k - i - 1;
                if rest < row {
                    return (i, i + 1 + rest);
                }
                rest -= row;
            }
            unreachable!("pair index out of range")
        }
    }
}

/// Integer vector over the pair basis of the symmetric square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymCoeffVector(pub Vec<Int>);

impl SymCoeffVector {
    pub fn zeros(basis: PairBasis) -> Self {
        SymCoeffVector(vec![Int::zero(); basis.len()])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Int::is_zero)
    }
}

impl Serialize for SymCoeffVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        jsonint::vec::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for SymCoeffVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(SymCoeffVector(jsonint::vec::deserialize(d)?))
    }
}

/// An element of `H^2 = Z^k`, written in generator coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DegreeTwoClass(pub Vec<Int>);

impl DegreeTwoClass {
    pub fn from_i64(coords: &[i64]) -> Self {
        DegreeTwoClass(coords.iter().map(|&x| Int::from(x)).collect())
    }

    pub fn zero(k: usize) -> Self {
        DegreeTwoClass(vec![Int::zero(); k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Int::is_zero)
    }

    pub fn neg(&self) -> Self {
        DegreeTwoClass(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        DegreeTwoClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// gcd of the coordinates; zero for the zero vector.
    pub fn content(&self) -> Int {
        self.0.iter().fold(Int::zero(), |g, x| g.gcd(x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }
}

impl Serialize for DegreeTwoClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        jsonint::vec::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for DegreeTwoClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(DegreeTwoClass(jsonint::vec::deserialize(d)?))
    }
}

/// The degree-4 group in normal coordinates: a free part and cyclic torsion
/// summands, together with the projection from raw pair coordinates and a
/// section used to verify it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeFourGroup {
    basis: PairBasis,
    free_rank: usize,
    torsion_orders: Vec<Int>,
    /// free_rank x N rows of the SNF left transform
    projection_free: IntMat,
    /// t x N rows of the SNF left transform at torsion pivots
    projection_torsion: IntMat,
    /// N x free_rank columns of the inverse transform (a section of the
    /// projection; composing projection with section is the identity)
    section_free: IntMat,
    /// N x t columns of the inverse transform at torsion pivots
    section_torsion: IntMat,
}

/// A degree-4 class in normal coordinates, torsion residues reduced to
/// `[0, order)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DegreeFourClass {
    #[serde(with = "jsonint::vec")]
    pub free_part: Vec<Int>,
    #[serde(with = "jsonint::vec")]
    pub torsion_part: Vec<Int>,
}

impl DegreeFourClass {
    pub fn is_zero(&self) -> bool {
        self.free_part.iter().all(Int::is_zero) && self.torsion_part.iter().all(Int::is_zero)
    }
}

impl DegreeFourGroup {
    fn from_relations(basis: PairBasis, relations: &[SymCoeffVector]) -> Self {
        let n = basis.len();
        // Columns are the relation vectors.
        let mut lattice = IntMat::zeros(n, relations.len());
        for (j, rel) in relations.iter().enumerate() {
            for (i, v) in rel.0.iter().enumerate() {
                lattice.set(i, j, v.clone());
            }
        }
        let snf = matrix::smith_normal_form(&lattice);
        let torsion_idx: Vec<usize> =
            (0..snf.rank).filter(|&i| !snf.diag[i].is_one()).collect();
        let free_idx: Vec<usize> = (snf.rank..n).collect();
        let torsion_orders: Vec<Int> = torsion_idx.iter().map(|&i| snf.diag[i].clone()).collect();

        let select_rows = |m: &IntMat, idx: &[usize]| {
            if idx.is_empty() {
                IntMat::zeros(0, n)
            } else {
                IntMat::from_rows(idx.iter().map(|&i| m.row(i).to_vec()).collect())
            }
        };
        let projection_free = select_rows(&snf.left, &free_idx);
        let projection_torsion = select_rows(&snf.left, &torsion_idx);
        let section_free = snf.left_inv.select_cols(&free_idx);
        let section_torsion = snf.left_inv.select_cols(&torsion_idx);

        DegreeFourGroup {
            basis,
            free_rank: free_idx.len(),
            torsion_orders,
            projection_free,
            projection_torsion,
            section_free,
            section_torsion,
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_orders(&self) -> &[Int] {
        &self.torsion_orders
    }

    pub fn pair_basis(&self) -> PairBasis {
        self.basis
    }

    /// Normal form of a raw symmetric-square vector.
    pub fn normal_form(&self, raw: &SymCoeffVector) -> DegreeFourClass {
        assert_eq!(raw.len(), self.basis.len(), "raw vector has wrong length");
        let free_part = self.projection_free.mul_vec(&raw.0);
        let torsion_part = self
            .projection_torsion
            .mul_vec(&raw.0)
            .into_iter()
            .zip(&self.torsion_orders)
            .map(|(v, d)| v.mod_floor(d))
            .collect();
        DegreeFourClass { free_part, torsion_part }
    }

    /// A raw representative of a class given in normal coordinates.
    pub fn section(&self, class: &DegreeFourClass) -> SymCoeffVector {
        assert_eq!(class.free_part.len(), self.free_rank);
        assert_eq!(class.torsion_part.len(), self.torsion_orders.len());
        let mut raw = self.section_free.mul_vec(&class.free_part);
        let tor = self.section_torsion.mul_vec(&class.torsion_part);
        for (a, b) in raw.iter_mut().zip(tor) {
            *a += b;
        }
        SymCoeffVector(raw)
    }

    /// Row `c` of the free projection, as a functional on raw coordinates.
    pub fn free_projection_row(&self, c: usize) -> &[Int] {
        self.projection_free.row(c)
    }

    pub fn zero_class(&self) -> DegreeFourClass {
        DegreeFourClass {
            free_part: vec![Int::zero(); self.free_rank],
            torsion_part: vec![Int::zero(); self.torsion_orders.len()],
        }
    }

    pub fn add(&self, a: &DegreeFourClass, b: &DegreeFourClass) -> DegreeFourClass {
        DegreeFourClass {
            free_part: a.free_part.iter().zip(&b.free_part).map(|(x, y)| x + y).collect(),
            torsion_part: a
                .torsion_part
                .iter()
                .zip(&b.torsion_part)
                .zip(&self.torsion_orders)
                .map(|((x, y), d)| (x + y).mod_floor(d))
                .collect(),
        }
    }

    pub fn neg(&self, a: &DegreeFourClass) -> DegreeFourClass {
        DegreeFourClass {
            free_part: a.free_part.iter().map(|x| -x).collect(),
            torsion_part: a
                .torsion_part
                .iter()
                .zip(&self.torsion_orders)
                .map(|(x, d)| (-x).mod_floor(d))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Int, a: &DegreeFourClass) -> DegreeFourClass {
        DegreeFourClass {
            free_part: a.free_part.iter().map(|x| c * x).collect(),
            torsion_part: a
                .torsion_part
                .iter()
                .zip(&self.torsion_orders)
                .map(|(x, d)| (c * x).mod_floor(d))
                .collect(),
        }
    }
}

/// A cohomology ring truncated at degree 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyRing {
    k: usize,
    relations: Vec<SymCoeffVector>,
    name: Option<String>,
    generator_names: Option<Vec<String>>,
    h4: DegreeFourGroup,
}

/// Build a ring from `k` generators and degree-4 relation vectors, computing
/// the normalised degree-4 group. Deterministic for a fixed input.
pub fn build_ring(k: usize, relations: Vec<SymCoeffVector>) -> Result<CohomologyRing, Error> {
    CohomologyRing::new(k, relations, None, None)
}

impl CohomologyRing {
    pub fn new(
        k: usize,
        relations: Vec<SymCoeffVector>,
        name: Option<String>,
        generator_names: Option<Vec<String>>,
    ) -> Result<Self, Error> {
        if k == 0 {
            return Err(Error::BadRingDefinition("k must be positive".into()));
        }
        let basis = PairBasis::new(k);
        for rel in &relations {
            if rel.len() != basis.len() {
                return Err(Error::DimensionMismatch { expected: basis.len(), got: rel.len() });
            }
        }
        if let Some(names) = &generator_names {
            if names.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: names.len() });
            }
        }
        let h4 = DegreeFourGroup::from_relations(basis, &relations);
        Ok(CohomologyRing { k, relations, name, generator_names, h4 })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn relations(&self) -> &[SymCoeffVector] {
        &self.relations
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn generator_names(&self) -> Option<&[String]> {
        self.generator_names.as_deref()
    }

    pub fn generator_name(&self, i: usize) -> String {
        match &self.generator_names {
            Some(names) => names[i].clone(),
            None => format!("u{}", i + 1),
        }
    }

    pub fn pair_basis(&self) -> PairBasis {
        self.h4.basis
    }

    pub fn degree_four(&self) -> &DegreeFourGroup {
        &self.h4
    }

    /// The `i`-th generator as a degree-2 class.
    pub fn generator(&self, i: usize) -> DegreeTwoClass {
        assert!(i < self.k);
        let mut v = vec![Int::zero(); self.k];
        v[i] = Int::one();
        DegreeTwoClass(v)
    }

    fn check_len(&self, x: &DegreeTwoClass) -> Result<(), Error> {
        if x.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: x.len() });
        }
        Ok(())
    }
}

/// Raw symmetric-square product of two degree-2 vectors (no reduction).
pub fn raw_product(x: &DegreeTwoClass, y: &DegreeTwoClass) -> SymCoeffVector {
    assert_eq!(x.len(), y.len());
    let k = x.len();
    let basis = PairBasis::new(k);
    let mut out = vec![Int::zero(); basis.len()];
    for i in 0..k {
        out[basis.index(i, i)] = &x.0[i] * &y.0[i];
        for j in i + 1..k {
            out[basis.index(i, j)] = &x.0[i] * &y.0[j] + &x.0[j] * &y.0[i];
        }
    }
    SymCoeffVector(out)
}

/// Cup product of two degree-2 classes, in normal degree-4 coordinates.
pub fn multiply(
    x: &DegreeTwoClass,
    y: &DegreeTwoClass,
    ring: &CohomologyRing,
) -> Result<DegreeFourClass, Error> {
    ring.check_len(x)?;
    ring.check_len(y)?;
    Ok(ring.h4.normal_form(&raw_product(x, y)))
}

/// Square of a degree-2 class.
pub fn square(x: &DegreeTwoClass, ring: &CohomologyRing) -> Result<DegreeFourClass, Error> {
    multiply(x, x, ring)
}

/// Sum of the squares of a list of degree-2 classes.
pub fn sum_of_squares(
    xs: &[DegreeTwoClass],
    ring: &CohomologyRing,
) -> Result<DegreeFourClass, Error> {
    let mut acc = ring.h4.zero_class();
    for x in xs {
        let sq = square(x, ring)?;
        acc = ring.h4.add(&acc, &sq);
    }
    Ok(acc)
}

/// Does the unimodular matrix `m` (columns = images of `ring_a`'s generators
/// in `ring_b`'s generator coordinates) induce a graded ring isomorphism in
/// degrees <= 4?
///
/// Checked as well-definedness in both directions: every relation of `ring_a`
/// must die in `ring_b` after substituting images, and every relation of
/// `ring_b` must die in `ring_a` under the inverse. Those two conditions make
/// the induced degree-4 maps mutually inverse isomorphisms.
pub fn verify_graded_iso(
    m: &IntMat,
    ring_a: &CohomologyRing,
    ring_b: &CohomologyRing,
) -> Result<bool, Error> {
    let k = ring_a.k;
    if ring_b.k != k {
        return Err(Error::DimensionMismatch { expected: k, got: ring_b.k });
    }
    if m.rows() != k || m.cols() != k {
        return Err(Error::DimensionMismatch { expected: k, got: m.rows().max(m.cols()) });
    }
    if !m.det().abs().is_one() {
        return Ok(false);
    }
    let m_inv = matrix::inverse_unimodular(m).expect("unimodular");
    Ok(relations_die(m, ring_a, ring_b) && relations_die(&m_inv, ring_b, ring_a))
}

/// Push a relation of `src` through the degree-2 map given by `m` and check
/// that it vanishes in `dst`'s degree-4 group.
fn relations_die(m: &IntMat, src: &CohomologyRing, dst: &CohomologyRing) -> bool {
    let k = src.k;
    let basis = src.pair_basis();
    let images: Vec<DegreeTwoClass> = (0..k).map(|i| DegreeTwoClass(m.col(i))).collect();
    // raw products of images, one per basis pair of the source
    let products: Vec<SymCoeffVector> = (0..basis.len())
        .map(|idx| {
            let (i, j) = basis.pair(idx);
            raw_product(&images[i], &images[j])
        })
        .collect();
    src.relations.iter().all(|rel| {
        let mut raw = SymCoeffVector::zeros(basis);
        for (idx, coeff) in rel.0.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for (a, b) in raw.0.iter_mut().zip(&products[idx].0) {
                *a += coeff * b;
            }
        }
        dst.h4.normal_form(&raw).is_zero()
    })
}

// ---------------------------------------------------------------------------
// Ring definition file format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RingFile {
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<String>>,
    relations: Vec<BTreeMap<String, jsonint::Flex>>,
}

fn parse_pair_key(key: &str, k: usize) -> Result<(usize, usize), Error> {
    let bad = || {
        Error::BadRingDefinition(format!(
            "bad pair key {key:?}; expected \"i,j\" with 1 <= i <= j <= {k}"
        ))
    };
    let (i, j) = key.split_once(',').ok_or_else(bad)?;
    let i: usize = i.trim().parse().map_err(|_| bad())?;
    let j: usize = j.trim().parse().map_err(|_| bad())?;
    if i < 1 || j < i || j > k {
        return Err(bad());
    }
    Ok((i - 1, j - 1))
}

impl CohomologyRing {
    /// Parse the ring definition file format:
    /// `{"k": int, "generators": [..]?, "relations": [{"i,j": int, ..}, ..]}`
    /// with 1-based pair keys `i <= j`; absent pairs mean coefficient 0 and
    /// integers beyond 2^63 may be given as decimal strings.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let file: RingFile = serde_json::from_str(text)?;
        if file.k == 0 {
            return Err(Error::BadRingDefinition("k must be positive".into()));
        }
        let basis = PairBasis::new(file.k);
        let mut relations = Vec::with_capacity(file.relations.len());
        for rel in &file.relations {
            let mut v = SymCoeffVector::zeros(basis);
            for (key, coeff) in rel {
                let (i, j) = parse_pair_key(key, file.k)?;
                v.0[basis.index(i, j)] = coeff.0.clone();
            }
            relations.push(v);
        }
        CohomologyRing::new(file.k, relations, file.name, file.generators)
    }

    /// Serialize back into the ring definition file format.
    pub fn to_json(&self) -> String {
        let basis = self.pair_basis();
        let relations = self
            .relations
            .iter()
            .map(|rel| {
                let mut map = BTreeMap::new();
                for (idx, coeff) in rel.0.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let (i, j) = basis.pair(idx);
                    map.insert(format!("{},{}", i + 1, j + 1), jsonint::Flex(coeff.clone()));
                }
                map
            })
            .collect();
        let file = RingFile {
            k: self.k,
            name: self.name.clone(),
            generators: self.generator_names.clone(),
            relations,
        };
        serde_json::to_string_pretty(&file).expect("ring file serialization")
    }

    /// Human-readable polynomial form of a relation, e.g. `u1^2 + 2*u1*u2`.
    pub fn relation_display(&self, rel: &SymCoeffVector) -> String {
        let basis = self.pair_basis();
        let mut terms: Vec<(usize, usize, &Int)> = Vec::new();
        for (idx, coeff) in rel.0.iter().enumerate() {
            if !coeff.is_zero() {
                let (i, j) = basis.pair(idx);
                terms.push((i, j, coeff));
            }
        }
        // diagonal-first reading order
        terms.sort_by_key(|&(i, j, _)| (usize::from(i != j), i, j));
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (n, (i, j, coeff)) in terms.iter().enumerate() {
            let mono = if i == j {
                format!("{}^2", self.generator_name(*i))
            } else {
                format!("{}*{}", self.generator_name(*i), self.generator_name(*j))
            };
            let abs = coeff.abs();
            let lead = if abs.is_one() { mono } else { format!("{abs}*{mono}") };
            if n == 0 {
                if coeff.is_negative() {
                    out.push('-');
                }
            } else if coeff.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&lead);
        }
        out
    }
}

impl fmt::Display for CohomologyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = (0..self.k).map(|i| self.generator_name(i)).collect();
        write!(f, "Z[{}]", gens.join(","))?;
        if !self.relations.is_empty() {
            let rels: Vec<String> =
                self.relations.iter().map(|r| self.relation_display(r)).collect();
            write!(f, "/<{}>", rels.join(", "))?;
        }
        Ok(())
    }
}
