//! Python bindings: the main ring type plus the family constructors,
//! property checker, bundle calculus, and bounded searches.
//!
//! Integers cross the boundary as Python ints of arbitrary size; structured
//! evidence (certificates, witnesses, reports) comes back as plain dicts and
//! lists so it can be inspected or re-serialized freely.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use std::collections::HashMap;

use biquo_core::biquotient::{
    catalog_low_dim, complete_to_unimodular, freeness_check, line_bundle_presentation,
    q_first_pontryagin, ra_cohomology, rp_cohomology, rp_matrix, selection_determinants,
    Freeness, Isotropy, TorusActionSpec, WeightMatrix,
};
use biquo_core::bundle::{
    chern_summary, inverse_decision, kill_c1_partner, pontryagin_of_realification,
    sufficient_conditions, BettiProfile, ConditionUsed, InverseDecision, LineBundleSum,
};
use biquo_core::distinguish::{
    bounded_iso_search, distinguish as distinguish_rings, primitive_square_pairs,
    u12_claim_check, DistinguishBounds, DistinguishVerdict, IsoSearchResult,
};
use biquo_core::ring::PairBasis;
use biquo_core::{
    builtins, check_star, gram_of_functional, verify_certificate, verify_witness,
    CohomologyRing, DegreeFourClass, DegreeTwoClass, IntMat, SearchBudget, StarCertificate,
    StarVerdict, StarWitness, SymCoeffVector,
};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mat_to_rows(m: &IntMat) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn rows_to_mat(rows: Vec<Vec<BigInt>>) -> PyResult<IntMat> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("matrix rows must have equal length"));
    }
    Ok(IntMat::from_rows(rows))
}

fn class_dict<'py>(py: Python<'py>, c: &DegreeFourClass) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("free", c.free_part.clone())?;
    d.set_item("torsion", c.torsion_part.clone())?;
    Ok(d)
}

fn lines_to_bundle(lines: Vec<Vec<BigInt>>, real: bool, extra_trivial: u32) -> LineBundleSum {
    LineBundleSum {
        c1s: lines.into_iter().map(DegreeTwoClass).collect(),
        real_flag: real,
        extra_trivial_rank: extra_trivial,
    }
}

fn certificate_list<'py>(
    py: Python<'py>,
    cert: &StarCertificate,
) -> PyResult<Bound<'py, PyList>> {
    let stages = PyList::empty(py);
    for stage in &cert.stages {
        let d = PyDict::new(py);
        d.set_item("functional", stage.functional.clone())?;
        d.set_item("gram", mat_to_rows(&stage.gram))?;
        d.set_item("kernel_basis", mat_to_rows(&stage.kernel_basis))?;
        stages.append(d)?;
    }
    Ok(stages)
}

fn verdict_dict<'py>(py: Python<'py>, verdict: &StarVerdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    match verdict {
        StarVerdict::Holds { certificate } => {
            d.set_item("verdict", "holds")?;
            d.set_item("certificate", certificate_list(py, certificate)?)?;
        }
        StarVerdict::Fails { witness } => {
            d.set_item("verdict", "fails")?;
            let tuple: Vec<Vec<BigInt>> =
                witness.tuple.iter().map(|x| x.0.clone()).collect();
            d.set_item("witness", tuple)?;
        }
        StarVerdict::Unknown { report } => {
            d.set_item("verdict", "unknown")?;
            d.set_item("functionals_tried", report.functionals_tried)?;
            d.set_item("singles_scanned", report.singles_scanned)?;
            d.set_item("tuple_sums_tried", report.tuple_sums_tried)?;
            d.set_item("residual_kernel_rank", report.residual_kernel_rank)?;
        }
    }
    Ok(d)
}

fn relations_from_dicts(
    k: usize,
    relations: Vec<HashMap<String, BigInt>>,
) -> PyResult<Vec<SymCoeffVector>> {
    let basis = PairBasis::new(k);
    relations
        .into_iter()
        .map(|rel| {
            let mut v = SymCoeffVector(vec![BigInt::from(0); basis.len()]);
            for (key, coeff) in rel {
                let bad = || {
                    PyValueError::new_err(format!(
                        "bad pair key {key:?}; expected \"i,j\" with 1 <= i <= j <= {k}"
                    ))
                };
                let (i, j) = key.split_once(',').ok_or_else(bad)?;
                let i: usize = i.trim().parse().map_err(|_| bad())?;
                let j: usize = j.trim().parse().map_err(|_| bad())?;
                if i < 1 || j < i || j > k {
                    return Err(bad());
                }
                v.0[basis.index(i - 1, j - 1)] = coeff;
            }
            Ok(v)
        })
        .collect()
}

/// A cohomology ring truncated at degree 4.
#[pyclass(name = "Ring", module = "biquo")]
struct PyRing {
    inner: CohomologyRing,
}

#[pymethods]
impl PyRing {
    /// Ring(k, relations, name=None, generators=None) with relations given as
    /// dicts {"i,j": coefficient} over 1-based pairs i <= j.
    #[new]
    #[pyo3(signature = (k, relations, name=None, generators=None))]
    fn new(
        k: usize,
        relations: Vec<HashMap<String, BigInt>>,
        name: Option<String>,
        generators: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let rels = relations_from_dicts(k, relations)?;
        Ok(PyRing { inner: CohomologyRing::new(k, rels, name, generators).map_err(err)? })
    }

    /// One of the built-in rings: cp2cp2, eschenburg, s2xs2, rp:<p>:<k>.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(PyRing { inner: builtins::resolve(name).map_err(err)? })
    }

    /// Parse the ring definition file format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyRing { inner: CohomologyRing::from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn name(&self) -> Option<String> {
        self.inner.name().map(str::to_string)
    }

    #[getter]
    fn free_rank(&self) -> usize {
        self.inner.degree_four().free_rank()
    }

    #[getter]
    fn torsion_orders(&self) -> Vec<BigInt> {
        self.inner.degree_four().torsion_orders().to_vec()
    }

    /// Cup product of two degree-2 classes, in normal degree-4 coordinates.
    fn multiply<'py>(
        &self,
        py: Python<'py>,
        x: Vec<BigInt>,
        y: Vec<BigInt>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let c = biquo_core::multiply(&DegreeTwoClass(x), &DegreeTwoClass(y), &self.inner)
            .map_err(err)?;
        class_dict(py, &c)
    }

    fn square<'py>(&self, py: Python<'py>, x: Vec<BigInt>) -> PyResult<Bound<'py, PyDict>> {
        let c = biquo_core::square(&DegreeTwoClass(x), &self.inner).map_err(err)?;
        class_dict(py, &c)
    }

    fn sum_of_squares<'py>(
        &self,
        py: Python<'py>,
        xs: Vec<Vec<BigInt>>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let xs: Vec<DegreeTwoClass> = xs.into_iter().map(DegreeTwoClass).collect();
        let c = biquo_core::sum_of_squares(&xs, &self.inner).map_err(err)?;
        class_dict(py, &c)
    }

    /// Decide the vanishing-squares property. Returns a dict with the verdict
    /// and its evidence.
    #[pyo3(signature = (height=20, tuple_len=None, max_functionals=10_000))]
    fn check_star<'py>(
        &self,
        py: Python<'py>,
        height: u32,
        tuple_len: Option<usize>,
        max_functionals: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let budget = SearchBudget::new(
            height,
            tuple_len.unwrap_or(self.inner.degree_four().free_rank() + 1),
            vec![-1, 0, 1],
            max_functionals,
        )
        .map_err(err)?;
        let verdict = check_star(&self.inner, &budget);
        verdict_dict(py, &verdict)
    }

    /// Re-check a certificate as produced by check_star (list of stage dicts).
    fn verify_certificate(&self, stages: Vec<HashMap<String, Py<PyAny>>>) -> PyResult<bool> {
        Python::attach(|py| {
            let mut parsed = Vec::new();
            for stage in stages {
                let get = |key: &str| {
                    stage.get(key).ok_or_else(|| {
                        PyValueError::new_err(format!("stage missing {key:?}"))
                    })
                };
                let functional: Vec<BigInt> = get("functional")?.extract(py)?;
                let gram: Vec<Vec<BigInt>> = get("gram")?.extract(py)?;
                let kernel: Vec<Vec<BigInt>> = get("kernel_basis")?.extract(py)?;
                parsed.push(biquo_core::CertStage {
                    functional,
                    gram: rows_to_mat(gram)?,
                    kernel_basis: rows_to_mat(kernel)?,
                });
            }
            verify_certificate(&self.inner, &StarCertificate { stages: parsed }).map_err(err)
        })
    }

    fn verify_witness(&self, tuple: Vec<Vec<BigInt>>) -> bool {
        let witness =
            StarWitness { tuple: tuple.into_iter().map(DegreeTwoClass).collect() };
        verify_witness(&self.inner, &witness)
    }

    /// Gram matrix of `x -> functional(free part of x^2)`.
    fn gram_of_functional(&self, functional: Vec<BigInt>) -> PyResult<Vec<Vec<BigInt>>> {
        let g = gram_of_functional(&self.inner, &functional).map_err(err)?;
        Ok(mat_to_rows(&g))
    }

    fn __repr__(&self) -> String {
        format!("Ring({})", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Does the matrix (columns = generator images) induce a graded isomorphism?
#[pyfunction]
fn graded_iso(matrix: Vec<Vec<BigInt>>, ring_a: &PyRing, ring_b: &PyRing) -> PyResult<bool> {
    let m = rows_to_mat(matrix)?;
    biquo_core::verify_graded_iso(&m, &ring_a.inner, &ring_b.inner).map_err(err)
}

/// Chern data of a complex sum of line bundles over a ring.
#[pyfunction]
#[pyo3(signature = (ring, lines, extra_trivial=0))]
fn chern<'py>(
    py: Python<'py>,
    ring: &PyRing,
    lines: Vec<Vec<BigInt>>,
    extra_trivial: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let e = lines_to_bundle(lines, false, extra_trivial);
    let summary = chern_summary(&e, &ring.inner).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("rank", summary.rank)?;
    d.set_item("c1", summary.c1.0.clone())?;
    d.set_item("c2", class_dict(py, &summary.c2)?)?;
    d.set_item("stable_obstruction", class_dict(py, &summary.stable_obstruction)?)?;
    Ok(d)
}

/// First Pontryagin class of the realification: sum of the squared c1s.
#[pyfunction]
fn pontryagin<'py>(
    py: Python<'py>,
    ring: &PyRing,
    lines: Vec<Vec<BigInt>>,
) -> PyResult<Bound<'py, PyDict>> {
    let e = lines_to_bundle(lines, true, 0);
    let p1 = pontryagin_of_realification(&e, &ring.inner).map_err(err)?;
    class_dict(py, &p1)
}

/// The degree-2 class of the line bundle cancelling the sum's c1.
#[pyfunction]
fn kill_c1(ring: &PyRing, lines: Vec<Vec<BigInt>>) -> PyResult<Vec<BigInt>> {
    let e = lines_to_bundle(lines, false, 0);
    Ok(kill_c1_partner(&e, &ring.inner).map_err(err)?.0)
}

/// Inverse decision for a line-bundle sum; runs the property check first.
/// Returns "has_biquotient_inverse", "no_biquotient_inverse" or "unknown".
#[pyfunction]
#[pyo3(signature = (ring, lines, real=false, extra_trivial=0, height=20))]
fn inverse(
    ring: &PyRing,
    lines: Vec<Vec<BigInt>>,
    real: bool,
    extra_trivial: u32,
    height: u32,
) -> PyResult<String> {
    let e = lines_to_bundle(lines, real, extra_trivial);
    let mut budget = SearchBudget::default_for(&ring.inner);
    budget.height_bound = height.max(1);
    let verdict = check_star(&ring.inner, &budget);
    let decision = inverse_decision(&ring.inner, &verdict, &e).map_err(err)?;
    Ok(match decision {
        InverseDecision::HasBiquotientInverse => "has_biquotient_inverse",
        InverseDecision::NoBiquotientInverse => "no_biquotient_inverse",
        InverseDecision::Unknown => "unknown",
    }
    .to_string())
}

/// Is a square integer matrix admissible?
#[pyfunction]
fn is_admissible(matrix: Vec<Vec<BigInt>>) -> PyResult<bool> {
    let w = WeightMatrix::new(rows_to_mat(matrix)?).map_err(err)?;
    biquo_core::biquotient::is_admissible(&w).map_err(err)
}

/// Freeness of the torus action given by a weight matrix or explicit weights.
#[pyfunction]
#[pyo3(signature = (matrix=None, a_weights=None, b_weights=None))]
fn freeness<'py>(
    py: Python<'py>,
    matrix: Option<Vec<Vec<BigInt>>>,
    a_weights: Option<Vec<Vec<BigInt>>>,
    b_weights: Option<Vec<Vec<BigInt>>>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = match (matrix, a_weights, b_weights) {
        (Some(m), None, None) => {
            let w = WeightMatrix::new(rows_to_mat(m)?).map_err(err)?;
            TorusActionSpec::from_weight_matrix(&w)
        }
        (None, Some(a), Some(b)) => TorusActionSpec::new(a, b).map_err(err)?,
        _ => {
            return Err(PyValueError::new_err(
                "pass either matrix=... or both a_weights=... and b_weights=...",
            ))
        }
    };
    let d = PyDict::new(py);
    let dets: Vec<BigInt> =
        selection_determinants(&spec).into_iter().map(|(_, det)| det).collect();
    d.set_item("selection_determinants", dets)?;
    match freeness_check(&spec) {
        Freeness::Free => {
            d.set_item("free", true)?;
        }
        Freeness::NonFree { selection, isotropy } => {
            d.set_item("free", false)?;
            d.set_item("selection", selection)?;
            match isotropy {
                Isotropy::Finite { order } => d.set_item("isotropy_order", order)?,
                Isotropy::PositiveDimensional => {
                    d.set_item("isotropy_order", "positive-dimensional")?
                }
            }
        }
    }
    Ok(d)
}

/// Ring of an admissible weight matrix.
#[pyfunction]
fn ra_ring(matrix: Vec<Vec<BigInt>>) -> PyResult<PyRing> {
    let w = WeightMatrix::new(rows_to_mat(matrix)?).map_err(err)?;
    Ok(PyRing { inner: ra_cohomology(&w).map_err(err)? })
}

/// The prime-family weight matrix as a list of rows.
#[pyfunction(name = "rp_matrix")]
fn rp_matrix_py(p: i64, k: usize) -> PyResult<Vec<Vec<BigInt>>> {
    Ok(mat_to_rows(&rp_matrix(p, k).map_err(err)?.0))
}

/// Ring of the prime family.
#[pyfunction]
fn rp_ring(p: i64, k: usize) -> PyResult<PyRing> {
    Ok(PyRing { inner: rp_cohomology(p, k).map_err(err)? })
}

/// 6 - s^2 - (s - t)^2.
#[pyfunction(name = "q_first_pontryagin")]
fn q_first_pontryagin_py(s: i64, t: i64) -> i64 {
    q_first_pontryagin(s, t)
}

/// Unimodular matrix whose first row is the given primitive vector.
#[pyfunction(name = "complete_to_unimodular")]
fn complete_to_unimodular_py(b: Vec<BigInt>) -> PyResult<Vec<Vec<BigInt>>> {
    Ok(mat_to_rows(&complete_to_unimodular(&b).map_err(err)?))
}

/// Subtorus presentation of the line bundle with the given first Chern class.
#[pyfunction(name = "line_bundle_presentation")]
fn line_bundle_presentation_py<'py>(
    py: Python<'py>,
    x: Vec<BigInt>,
) -> PyResult<Bound<'py, PyDict>> {
    let p = line_bundle_presentation(&x).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("d", p.d)?;
    d.set_item("b_matrix", mat_to_rows(&p.b_matrix))?;
    d.set_item("circle", p.circle)?;
    d.set_item("complement", mat_to_rows(&p.complement))?;
    Ok(d)
}

fn profile_dict<'py>(py: Python<'py>, profile: &BettiProfile) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("dimension", profile.dimension)?;
    d.set_item(
        "betti",
        profile.rational_betti.iter().map(|(&k, &v)| (k, v)).collect::<Vec<_>>(),
    )?;
    d.set_item("simply_connected", profile.simply_connected)?;
    d.set_item("total_space_simply_connected", profile.total_space_simply_connected)?;
    Ok(d)
}

/// The low-dimensional catalog; with check_conditions=True each entry also
/// carries the inverse-existence report.
#[pyfunction]
#[pyo3(signature = (check_conditions=false))]
fn catalog<'py>(py: Python<'py>, check_conditions: bool) -> PyResult<Bound<'py, PyList>> {
    let list = PyList::empty(py);
    for entry in catalog_low_dim() {
        let d = PyDict::new(py);
        d.set_item("name", &entry.name)?;
        d.set_item("dimension", entry.dimension)?;
        d.set_item("profile", profile_dict(py, &entry.profile)?)?;
        if check_conditions {
            let report = sufficient_conditions(&entry.profile);
            d.set_item("real_inverse_guaranteed", report.real_inverse_guaranteed)?;
            d.set_item("complex_inverse_guaranteed", report.complex_inverse_guaranteed)?;
            d.set_item(
                "condition_used",
                match report.condition_used {
                    ConditionUsed::H4iVanishes => "h4i_vanishes",
                    ConditionUsed::H2iVanishes => "h2i_vanishes",
                    ConditionUsed::H2IsLine => "h2_is_line",
                    ConditionUsed::None => "none",
                },
            )?;
        }
        list.append(d)?;
    }
    Ok(list)
}

/// Bounded search for a graded isomorphism; the matrix or None.
#[pyfunction(name = "bounded_iso_search")]
fn bounded_iso_search_py(
    ring_a: &PyRing,
    ring_b: &PyRing,
    bound: u32,
) -> PyResult<Option<Vec<Vec<BigInt>>>> {
    match bounded_iso_search(&ring_a.inner, &ring_b.inner, bound).map_err(err)? {
        IsoSearchResult::FoundIso { matrix } => Ok(Some(mat_to_rows(&matrix))),
        IsoSearchResult::NoneFound { .. } => Ok(None),
    }
}

/// Primitive pairs with equal squares and zero product, up to the height.
#[pyfunction(name = "primitive_square_pairs")]
fn primitive_square_pairs_py(
    ring: &PyRing,
    height: u32,
) -> Vec<(Vec<BigInt>, Vec<BigInt>)> {
    primitive_square_pairs(&ring.inner, height)
        .into_iter()
        .map(|p| (p.x.0, p.y.0))
        .collect()
}

/// Do all primitive square pairs up to the height live in the span of the
/// first two generators?
#[pyfunction(name = "u12_claim_check")]
fn u12_claim_check_py(ring: &PyRing, height: u32) -> bool {
    u12_claim_check(&ring.inner, height)
}

/// Bounded non-isomorphism evidence for two prime-family rings.
#[pyfunction]
#[pyo3(signature = (p, p_prime, k, pair_height=10, iso_bound=3, obstruction_box=30))]
fn distinguish<'py>(
    py: Python<'py>,
    p: i64,
    p_prime: i64,
    k: usize,
    pair_height: u32,
    iso_bound: u32,
    obstruction_box: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let bounds = DistinguishBounds {
        pair_height,
        iso_entry_bound: iso_bound,
        obstruction_box,
    };
    let verdict = distinguish_rings(p, p_prime, k, &bounds)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    match verdict {
        DistinguishVerdict::Distinct { evidence } => {
            d.set_item("verdict", "distinct")?;
            d.set_item("no_iso_bound", evidence.no_iso_bound)?;
            d.set_item("obstruction_checked", evidence.obstruction_checked)?;
            d.set_item("pair_claim_height", evidence.pair_claim_height)?;
        }
        DistinguishVerdict::Unknown { bounds } => {
            d.set_item("verdict", "unknown")?;
            d.set_item("pair_height", bounds.pair_height)?;
            d.set_item("iso_bound", bounds.iso_entry_bound)?;
            d.set_item("obstruction_box", bounds.obstruction_box)?;
        }
    }
    Ok(d)
}

/// Mod-p divisibility obstruction over a bounded box.
#[pyfunction(name = "rp_obstruction_check")]
fn rp_obstruction_check_py(p: i64, p_prime: i64, bound: u32) -> PyResult<bool> {
    biquo_core::distinguish::rp_obstruction_check(p, p_prime, bound).map_err(err)
}

#[pymodule]
fn biquo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRing>()?;
    m.add_function(wrap_pyfunction!(graded_iso, m)?)?;
    m.add_function(wrap_pyfunction!(chern, m)?)?;
    m.add_function(wrap_pyfunction!(pontryagin, m)?)?;
    m.add_function(wrap_pyfunction!(kill_c1, m)?)?;
    m.add_function(wrap_pyfunction!(inverse, m)?)?;
    m.add_function(wrap_pyfunction!(is_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(freeness, m)?)?;
    m.add_function(wrap_pyfunction!(ra_ring, m)?)?;
    m.add_function(wrap_pyfunction!(rp_matrix_py, m)?)?;
    m.add_function(wrap_pyfunction!(rp_ring, m)?)?;
    m.add_function(wrap_pyfunction!(q_first_pontryagin_py, m)?)?;
    m.add_function(wrap_pyfunction!(complete_to_unimodular_py, m)?)?;
    m.add_function(wrap_pyfunction!(line_bundle_presentation_py, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(bounded_iso_search_py, m)?)?;
    m.add_function(wrap_pyfunction!(primitive_square_pairs_py, m)?)?;
    m.add_function(wrap_pyfunction!(u12_claim_check_py, m)?)?;
    m.add_function(wrap_pyfunction!(distinguish, m)?)?;
    m.add_function(wrap_pyfunction!(rp_obstruction_check_py, m)?)?;
    Ok(())
}
