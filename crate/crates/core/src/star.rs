//! Decision procedure for the vanishing-sum-of-squares property.
//!
//! A ring *has the property* when any finite tuple of degree-2 classes whose
//! squares sum to zero in degree 4 must be entirely zero. The checker returns
//! one of three verdicts:
//!
//! * `Holds`, with a [`StarCertificate`]: a chain of integer linear
//!   functionals on the free degree-4 coordinates whose induced quadratic
//!   forms are positive semidefinite with strictly nested saturated kernels
//!   terminating at the zero lattice. Such a chain is a sound proof: a
//!   vanishing sum of squares has vanishing free part, each stage's PSD form
//!   then forces every tuple element into the stage kernel, and the final
//!   kernel is zero.
//! * `Fails`, with a [`StarWitness`]: an explicit tuple of nonzero classes
//!   whose squares sum to zero (torsion included), checkable by direct
//!   expansion.
//! * `Unknown`, with the budget that was exhausted. The procedure is a sound
//!   search, not a decision oracle; no completeness is claimed.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::matrix::{self, Int, IntMat};
use crate::ring::{square, sum_of_squares, CohomologyRing, DegreeFourClass, DegreeTwoClass};
use crate::Error;

/// Bounds for the search phases of [`check_star`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Max absolute coordinate value in witness candidates.
    pub height_bound: u32,
    /// Max number of elements in a witness tuple.
    pub tuple_length_bound: usize,
    /// Coefficients tried when combining coordinate functionals.
    pub functional_coefficient_set: Vec<i64>,
    /// Cap on the number of candidate functionals examined per stage.
    pub max_functional_candidates: usize,
}

impl SearchBudget {
    pub fn new(
        height_bound: u32,
        tuple_length_bound: usize,
        functional_coefficient_set: Vec<i64>,
        max_functional_candidates: usize,
    ) -> Result<Self, Error> {
        if height_bound == 0
            || tuple_length_bound == 0
            || functional_coefficient_set.is_empty()
            || max_functional_candidates == 0
        {
            return Err(Error::BadBudget);
        }
        Ok(SearchBudget {
            height_bound,
            tuple_length_bound,
            functional_coefficient_set,
            max_functional_candidates,
        })
    }

    /// Default budget: height 20, tuple length `free_rank + 1`, coefficient
    /// set `{-1, 0, 1}`, 10000 functional candidates.
    pub fn default_for(ring: &CohomologyRing) -> Self {
        SearchBudget {
            height_bound: 20,
            tuple_length_bound: ring.degree_four().free_rank() + 1,
            functional_coefficient_set: vec![-1, 0, 1],
            max_functional_candidates: 10_000,
        }
    }
}

/// One stage of a certificate: the functional, its Gram matrix restricted to
/// the current sublattice, and a basis (in the coordinates of that
/// sublattice) of the saturated kernel, which is the next sublattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertStage {
    #[serde(with = "crate::jsonint::vec")]
    pub functional: Vec<Int>,
    pub gram: IntMat,
    pub kernel_basis: IntMat,
}

/// A positive-semidefiniteness certificate with nested kernels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarCertificate {
    pub stages: Vec<CertStage>,
}

/// An explicit nonzero tuple whose squares sum to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarWitness {
    pub tuple: Vec<DegreeTwoClass>,
}

/// What the search did before giving up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub budget: SearchBudget,
    pub functionals_tried: u64,
    pub singles_scanned: u64,
    pub tuple_sums_tried: u64,
    /// Rank of the sublattice the certificate descent got stuck at.
    pub residual_kernel_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StarVerdict {
    Holds { certificate: StarCertificate },
    Fails { witness: StarWitness },
    Unknown { report: BudgetReport },
}

impl StarVerdict {
    pub fn is_holds(&self) -> bool {
        matches!(self, StarVerdict::Holds { .. })
    }

    pub fn is_fails(&self) -> bool {
        matches!(self, StarVerdict::Fails { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, StarVerdict::Unknown { .. })
    }
}

/// Gram matrix of the quadratic form `x -> functional(free part of x^2)`.
///
/// The cross coefficients of the squaring map are even (the `u_i u_j`
/// coordinate of `x^2` is `2 x_i x_j`), so the symmetric matrix `G` with
/// `x^T G x = functional(free(x^2))` is always integral.
pub fn gram_of_functional(ring: &CohomologyRing, functional: &[Int]) -> Result<IntMat, Error> {
    let h4 = ring.degree_four();
    if functional.len() != h4.free_rank() {
        return Err(Error::DimensionMismatch {
            expected: h4.free_rank(),
            got: functional.len(),
        });
    }
    let basis = ring.pair_basis();
    let n = basis.len();
    // composite functional on raw pair coordinates
    let mut psi = vec![Int::zero(); n];
    for (c, coeff) in functional.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        for (a, b) in psi.iter_mut().zip(h4.free_projection_row(c)) {
            *a += coeff * b;
        }
    }
    let k = ring.k();
    let mut g = IntMat::zeros(k, k);
    for (idx, value) in psi.into_iter().enumerate() {
        let (i, j) = basis.pair(idx);
        if i == j {
            g.set(i, i, value);
        } else {
            g.set(i, j, value.clone());
            g.set(j, i, value);
        }
    }
    Ok(g)
}

/// Exact positive-semidefiniteness test by rational symmetric elimination.
/// A zero pivot is accepted only when its entire row is already zero.
#[allow(clippy::needless_range_loop)] // index pairs mirror the matrix symmetry
pub fn is_psd(g: &IntMat) -> bool {
    let n = g.rows();
    assert_eq!(n, g.cols(), "Gram matrix must be square");
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|r| g.row(r).iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    for i in 0..n {
        if m[i][i].is_negative() {
            return false;
        }
        if m[i][i].is_zero() {
            // symmetric matrix with a zero pivot: any off-diagonal residue
            // makes a 2x2 block of negative determinant
            if (i + 1..n).any(|j| !m[i][j].is_zero()) {
                return false;
            }
            continue;
        }
        // the trailing block is the Schur complement and stays symmetric
        for r in i + 1..n {
            if m[r][i].is_zero() {
                continue;
            }
            let f = &m[r][i] / &m[i][i];
            for c in i + 1..n {
                let sub = &f * &m[i][c];
                m[r][c] -= sub;
            }
            m[r][i] = BigRational::zero();
        }
    }
    true
}

/// Candidate functionals in deterministic order: an odometer over
/// `coeff_set^m`, first coordinate slowest, skipping the zero vector.
struct CombinationIter {
    coeffs: Vec<i64>,
    idx: Vec<usize>,
    done: bool,
}

impl CombinationIter {
    fn new(mut coeffs: Vec<i64>, m: usize) -> Self {
        coeffs.sort_unstable();
        coeffs.dedup();
        CombinationIter { coeffs, idx: vec![0; m], done: m == 0 }
    }
}

impl Iterator for CombinationIter {
    type Item = Vec<Int>;

    fn next(&mut self) -> Option<Vec<Int>> {
        loop {
            if self.done {
                return None;
            }
            let item: Vec<Int> =
                self.idx.iter().map(|&i| Int::from(self.coeffs[i])).collect();
            // advance odometer, last coordinate fastest
            let mut pos = self.idx.len();
            loop {
                if pos == 0 {
                    self.done = true;
                    break;
                }
                pos -= 1;
                self.idx[pos] += 1;
                if self.idx[pos] < self.coeffs.len() {
                    break;
                }
                self.idx[pos] = 0;
            }
            if !item.iter().all(Int::is_zero) {
                return Some(item);
            }
        }
    }
}

struct CertSearch {
    certificate: Option<StarCertificate>,
    residual_basis: IntMat,
    functionals_tried: u64,
}

/// Pick the functional for one descent stage, given the Gram matrices of the
/// coordinate functionals and the current ambient basis.
///
/// Every signed coordinate functional whose restricted form is PSD and
/// nonzero joins a pool; their sum (itself PSD, with kernel the intersection
/// of the members' kernels) wins. When the pool is empty the coefficient-set
/// combinations are tried in lexicographic order and the first PSD nonzero
/// one is taken. `None` means the descent is stuck at this basis.
fn stage_functional(
    coordinate_grams: &[IntMat],
    basis: &IntMat,
    budget: &SearchBudget,
    tried: &mut u64,
) -> Option<(Vec<Int>, IntMat)> {
    let m = coordinate_grams.len();
    let k = basis.rows();
    let restrict = |g: &IntMat| basis.transpose().mul(g).mul(basis);

    let mut pool_functional = vec![Int::zero(); m];
    let mut pool_gram = IntMat::zeros(basis.cols(), basis.cols());
    let mut pool_nonempty = false;
    for (c, g) in coordinate_grams.iter().enumerate() {
        for sign in [1i64, -1] {
            *tried += 1;
            let restricted = if sign == 1 { restrict(g) } else { restrict(g).neg() };
            if restricted.is_zero() || !is_psd(&restricted) {
                continue;
            }
            pool_functional[c] = Int::from(sign);
            pool_gram = pool_gram.add(&restricted);
            pool_nonempty = true;
            break; // +e and -e cannot both be PSD and nonzero
        }
    }
    if pool_nonempty {
        return Some((pool_functional, pool_gram));
    }

    for combo in CombinationIter::new(budget.functional_coefficient_set.clone(), m) {
        if *tried >= budget.max_functional_candidates as u64 {
            break;
        }
        *tried += 1;
        let mut g_full = IntMat::zeros(k, k);
        for (c, coeff) in combo.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for r in 0..k {
                for cc in 0..k {
                    let v = g_full.at(r, cc) + coeff * coordinate_grams[c].at(r, cc);
                    g_full.set(r, cc, v);
                }
            }
        }
        let restricted = restrict(&g_full);
        if !restricted.is_zero() && is_psd(&restricted) {
            return Some((combo, restricted));
        }
    }
    None
}

/// Greedy certificate descent through nested PSD kernels.
fn certificate_search(ring: &CohomologyRing, budget: &SearchBudget) -> CertSearch {
    let h4 = ring.degree_four();
    let m = h4.free_rank();
    let k = ring.k();
    let coordinate_grams: Vec<IntMat> = (0..m)
        .map(|c| {
            let mut e = vec![Int::zero(); m];
            e[c] = Int::from(1);
            gram_of_functional(ring, &e).expect("coordinate functional")
        })
        .collect();

    let mut basis = IntMat::identity(k);
    let mut stages = Vec::new();
    let mut tried: u64 = 0;

    while basis.cols() > 0 {
        let Some((functional, gram)) =
            stage_functional(&coordinate_grams, &basis, budget, &mut tried)
        else {
            return CertSearch {
                certificate: None,
                residual_basis: basis,
                functionals_tried: tried,
            };
        };
        // a nonzero PSD form has a strictly smaller kernel, so this descends
        let ker = matrix::kernel(&gram);
        stages.push(CertStage { functional, gram, kernel_basis: ker.clone() });
        basis = basis.mul(&ker);
    }

    CertSearch {
        certificate: Some(StarCertificate { stages }),
        residual_basis: basis,
        functionals_tried: tried,
    }
}

/// Iterate the integer box `[-h, h]^k` by increasing max-norm shell, in
/// descending lexicographic order within each shell (so all-positive vectors
/// come first). The zero vector is skipped.
fn box_shells(k: usize, h: u32) -> impl Iterator<Item = Vec<i64>> {
    (1..=h as i64).flat_map(move |shell| BoxShellIter::new(k, shell))
}

struct BoxShellIter {
    shell: i64,
    cur: Vec<i64>,
    done: bool,
}

impl BoxShellIter {
    fn new(k: usize, shell: i64) -> Self {
        BoxShellIter { shell, cur: vec![shell; k], done: k == 0 }
    }
}

impl Iterator for BoxShellIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        loop {
            if self.done {
                return None;
            }
            let on_shell = self.cur.iter().any(|&v| v.abs() == self.shell);
            let item = if on_shell { Some(self.cur.clone()) } else { None };
            // advance downward, last coordinate fastest
            let mut pos = self.cur.len();
            loop {
                if pos == 0 {
                    self.done = true;
                    break;
                }
                pos -= 1;
                self.cur[pos] -= 1;
                if self.cur[pos] >= -self.shell {
                    break;
                }
                self.cur[pos] = self.shell;
            }
            if let Some(item) = item {
                return Some(item);
            }
        }
    }
}

/// Membership test for the residual sublattice; None means the full lattice.
/// The bases used here are saturated, so rational and integer membership
/// agree.
fn sublattice_test(basis: &IntMat) -> Option<matrix::Solver> {
    if basis.cols() == basis.rows() {
        None
    } else {
        Some(matrix::Solver::new(basis))
    }
}

/// Decide the property for `ring` within `budget`.
///
/// Search order: certificate descent first (a verified certificate excludes
/// all witnesses, so nothing is lost by not scanning), then a single-element
/// witness scan in increasing height shells, then a multi-element search over
/// distinct square values. Each phase is deterministic, so the verdict and
/// its evidence are a function of `(ring, budget)` only. Any witness element
/// must lie in every kernel reached by the certificate descent — the same
/// argument that makes certificates sound — so the scans are restricted to
/// the residual sublattice.
pub fn check_star(ring: &CohomologyRing, budget: &SearchBudget) -> StarVerdict {
    let h4 = ring.degree_four();
    let k = ring.k();

    let search = certificate_search(ring, budget);
    if let Some(certificate) = search.certificate {
        debug_assert!(verify_certificate(ring, &certificate).unwrap_or(false));
        return StarVerdict::Holds { certificate };
    }
    let residual = &search.residual_basis;
    let membership = sublattice_test(residual);
    let in_residual =
        |x: &[Int]| membership.as_ref().is_none_or(|solver| solver.is_solvable(x));

    // Phase: single-element scan.
    let mut singles: u64 = 0;
    for coords in box_shells(k, budget.height_bound) {
        let coords: Vec<Int> = coords.into_iter().map(Int::from).collect();
        if !in_residual(&coords) {
            continue;
        }
        singles += 1;
        let x = DegreeTwoClass(coords);
        if square(&x, ring).expect("length matches ring").is_zero() {
            let witness = StarWitness { tuple: vec![x] };
            debug_assert!(verify_witness(ring, &witness));
            return StarVerdict::Fails { witness };
        }
    }

    // Phase: multi-element search over distinct square values. Each value is
    // represented by the first vector (in scan order) that attains it.
    let mut tuples_tried: u64 = 0;
    if budget.tuple_length_bound >= 2 {
        let mut values: Vec<DegreeFourClass> = Vec::new();
        let mut reps: Vec<DegreeTwoClass> = Vec::new();
        let mut index: HashMap<DegreeFourClass, usize> = HashMap::new();
        for coords in box_shells(k, budget.height_bound) {
            let coords: Vec<Int> = coords.into_iter().map(Int::from).collect();
            if !in_residual(&coords) {
                continue;
            }
            let x = DegreeTwoClass(coords);
            let v = square(&x, ring).expect("length matches ring");
            if !index.contains_key(&v) {
                index.insert(v.clone(), values.len());
                values.push(v);
                reps.push(x);
            }
        }
        // tuples of value indices i_1 <= ... <= i_l; the last index is found
        // by hash lookup, the prefix by depth-first search
        for l in 2..=budget.tuple_length_bound {
            let mut found = None;
            let mut prefix: Vec<usize> = Vec::new();
            let mut sums: Vec<DegreeFourClass> = vec![h4.zero_class()];
            'dfs: loop {
                if prefix.len() == l - 1 {
                    let need = h4.neg(sums.last().unwrap());
                    tuples_tried += 1;
                    if let Some(&last) = index.get(&need) {
                        if last >= *prefix.last().unwrap_or(&0) {
                            let mut tuple: Vec<DegreeTwoClass> =
                                prefix.iter().map(|&i| reps[i].clone()).collect();
                            tuple.push(reps[last].clone());
                            found = Some(StarWitness { tuple });
                            break 'dfs;
                        }
                    }
                    // backtrack/advance
                    loop {
                        let Some(i) = prefix.pop() else { break 'dfs };
                        sums.pop();
                        if i + 1 < values.len() {
                            let base = sums.last().unwrap().clone();
                            prefix.push(i + 1);
                            sums.push(h4.add(&base, &values[i + 1]));
                            break;
                        }
                    }
                } else {
                    let start = *prefix.last().unwrap_or(&0);
                    if start >= values.len() {
                        break 'dfs;
                    }
                    let base = sums.last().unwrap().clone();
                    prefix.push(start);
                    sums.push(h4.add(&base, &values[start]));
                }
            }
            if let Some(witness) = found {
                debug_assert!(verify_witness(ring, &witness));
                return StarVerdict::Fails { witness };
            }
        }
    }

    StarVerdict::Unknown {
        report: BudgetReport {
            budget: budget.clone(),
            functionals_tried: search.functionals_tried,
            singles_scanned: singles,
            tuple_sums_tried: tuples_tried,
            residual_kernel_rank: residual.cols(),
        },
    }
}

/// Independent certificate checker: re-derives every Gram from the ring, runs
/// the exact PSD test, recomputes each saturated kernel, and follows the
/// chain down to the zero lattice. Never searches.
pub fn verify_certificate(ring: &CohomologyRing, cert: &StarCertificate) -> Result<bool, Error> {
    let h4 = ring.degree_four();
    let m = h4.free_rank();
    let k = ring.k();
    if cert.stages.is_empty() {
        return Ok(false); // the ambient lattice Z^k, k >= 1, is never zero
    }
    let mut basis = IntMat::identity(k);
    for (n, stage) in cert.stages.iter().enumerate() {
        let r = basis.cols();
        if stage.functional.len() != m {
            return Err(Error::MalformedCertificate(format!(
                "stage {n}: functional has length {}, expected {m}",
                stage.functional.len()
            )));
        }
        if stage.gram.rows() != r || stage.gram.cols() != r {
            return Err(Error::MalformedCertificate(format!(
                "stage {n}: gram is {}x{}, expected {r}x{r}",
                stage.gram.rows(),
                stage.gram.cols()
            )));
        }
        if stage.kernel_basis.rows() != r {
            return Err(Error::MalformedCertificate(format!(
                "stage {n}: kernel basis has {} rows, expected {r}",
                stage.kernel_basis.rows()
            )));
        }
        let g_full = gram_of_functional(ring, &stage.functional)?;
        let expected = basis.transpose().mul(&g_full).mul(&basis);
        if stage.gram != expected {
            return Ok(false);
        }
        if !is_psd(&stage.gram) {
            return Ok(false);
        }
        let ker = matrix::kernel(&stage.gram);
        if stage.kernel_basis.cols() != ker.cols()
            || !matrix::lattice_eq(&stage.kernel_basis, &ker)
        {
            return Ok(false);
        }
        if ker.cols() >= r {
            return Ok(false); // no descent
        }
        basis = basis.mul(&stage.kernel_basis);
    }
    Ok(basis.cols() == 0)
}

/// Check a witness: every element nonzero and of the right length, and the
/// squares sum to zero in the full degree-4 group, torsion included.
pub fn verify_witness(ring: &CohomologyRing, witness: &StarWitness) -> bool {
    if witness.tuple.is_empty() {
        return false;
    }
    if witness.tuple.iter().any(|x| x.len() != ring.k() || x.is_zero()) {
        return false;
    }
    sum_of_squares(&witness.tuple, ring).map(|s| s.is_zero()).unwrap_or(false)
}
