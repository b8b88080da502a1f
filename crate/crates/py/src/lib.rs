//! Python bindings: the main engine types (Ring, Polynomial, Derivation)
//! and the classification / blow-up / F-purity / transfer operations.
//!
//! Build produces a `folcalc` extension module; see python/smoke_test.py
//! for usage.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use folcalc_core::birational as bir;
use folcalc_core::constants as cst;
use folcalc_core::derivation::{CoactionKind, Derivation as CoreDerivation, PClosure};
use folcalc_core::families as fam;
use folcalc_core::ledger;
use folcalc_core::parse;
use folcalc_core::poly::{Poly as CorePoly, Ring as CoreRing};
use folcalc_core::singularity as sing;

fn engine_err(e: folcalc_core::EngineError) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn parse_err(e: parse::ParseError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Ambient polynomial ring F_p\[vars\].
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Ring {
    inner: CoreRing,
}

#[pymethods]
impl Ring {
    #[new]
    fn new(p: u64, vars: Vec<String>) -> PyResult<Self> {
        if !folcalc_core::field::is_prime(p) {
            return Err(PyValueError::new_err(format!("{p} is not prime")));
        }
        let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        for v in &refs {
            if !folcalc_core::poly::valid_identifier(v) {
                return Err(PyValueError::new_err(format!("invalid variable `{v}`")));
            }
        }
        Ok(Ring {
            inner: CoreRing::new(p, &refs),
        })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.inner.vars().to_vec()
    }

    /// Parse a polynomial in the canonical text form.
    fn poly(&self, text: &str) -> PyResult<Polynomial> {
        Ok(Polynomial {
            inner: parse::parse_poly(text, &self.inner).map_err(parse_err)?,
        })
    }

    /// Parse a derivation written as a sum of `<poly>*d<var>` terms.
    fn derivation(&self, text: &str) -> PyResult<Derivation> {
        Ok(Derivation {
            inner: parse::parse_derivation(text, &self.inner).map_err(parse_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Ring(p={}, vars={:?})", self.inner.p(), self.inner.vars())
    }
}

/// Sparse polynomial over F_p.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Polynomial {
    inner: CorePoly,
}

#[pymethods]
impl Polynomial {
    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial({})", self.inner)
    }

    fn __add__(&self, other: &Polynomial) -> Polynomial {
        Polynomial {
            inner: self.inner.add(&other.inner),
        }
    }

    fn __sub__(&self, other: &Polynomial) -> Polynomial {
        Polynomial {
            inner: self.inner.sub(&other.inner),
        }
    }

    fn __mul__(&self, other: &Polynomial) -> PyResult<Polynomial> {
        Ok(Polynomial {
            inner: self.inner.mul(&other.inner).map_err(engine_err)?,
        })
    }

    fn __richcmp__(&self, other: &Polynomial, op: pyo3::basic::CompareOp) -> PyResult<bool> {
        match op {
            pyo3::basic::CompareOp::Eq => Ok(self.inner == other.inner),
            pyo3::basic::CompareOp::Ne => Ok(self.inner != other.inner),
            _ => Err(PyValueError::new_err("polynomials are not ordered")),
        }
    }

    fn pow(&self, e: u64) -> PyResult<Polynomial> {
        Ok(Polynomial {
            inner: self.inner.pow(e).map_err(engine_err)?,
        })
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn total_degree(&self) -> Option<i64> {
        self.inner.total_degree()
    }
}

/// Vector field Σ f_i ∂/∂x_i on the ring.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Derivation {
    inner: CoreDerivation,
}

#[pymethods]
impl Derivation {
    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Derivation({})", self.inner)
    }

    fn __richcmp__(&self, other: &Derivation, op: pyo3::basic::CompareOp) -> PyResult<bool> {
        match op {
            pyo3::basic::CompareOp::Eq => Ok(self.inner == other.inner),
            pyo3::basic::CompareOp::Ne => Ok(self.inner != other.inner),
            _ => Err(PyValueError::new_err("derivations are not ordered")),
        }
    }

    fn apply(&self, f: &Polynomial) -> PyResult<Polynomial> {
        Ok(Polynomial {
            inner: self.inner.apply(&f.inner).map_err(engine_err)?,
        })
    }

    fn lie_bracket(&self, other: &Derivation) -> PyResult<Derivation> {
        Ok(Derivation {
            inner: self.inner.lie_bracket(&other.inner).map_err(engine_err)?,
        })
    }

    fn p_power(&self) -> PyResult<Derivation> {
        Ok(Derivation {
            inner: self.inner.p_power().map_err(engine_err)?,
        })
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// {"status": "additive" | "p_closed" | "not_p_closed",
    ///  "multiplier": (num, den)?, "p_power": str}
    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let c = self.inner.classify().map_err(engine_err)?;
        let d = PyDict::new(py);
        match &c.status {
            PClosure::Additive => d.set_item("status", "additive")?,
            PClosure::NotPClosed => d.set_item("status", "not_p_closed")?,
            PClosure::PClosed { num, den } => {
                d.set_item("status", "p_closed")?;
                d.set_item(
                    "multiplier",
                    (num.to_string_bare(), den.to_string_bare()),
                )?;
            }
        }
        d.set_item("p_power", c.witness.to_string())?;
        Ok(d)
    }

    fn is_multiplicative_at(&self, point: Vec<i64>) -> PyResult<bool> {
        self.inner.is_multiplicative_at(&point).map_err(engine_err)
    }

    fn additive_rescale(&self, pivot: &Polynomial) -> PyResult<Derivation> {
        Ok(Derivation {
            inner: self
                .inner
                .additive_rescale(&pivot.inner)
                .map_err(engine_err)?,
        })
    }

    /// Coaction coefficients; kind is "alpha_p" or "mu_p".
    fn coaction(&self, s: &Polynomial, kind: &str) -> PyResult<Vec<Polynomial>> {
        let kind = match kind {
            "alpha_p" => CoactionKind::AlphaP,
            "mu_p" => CoactionKind::MuP,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown coaction kind `{other}`"
                )))
            }
        };
        Ok(self
            .inner
            .coaction_expand(&s.inner, kind)
            .map_err(engine_err)?
            .into_iter()
            .map(|p| Polynomial { inner: p })
            .collect())
    }

    fn fixed_ideal_gens(&self) -> Vec<Polynomial> {
        self.inner
            .fixed_ideal_gens()
            .into_iter()
            .map(|p| Polynomial { inner: p })
            .collect()
    }
}

/// Basis of the constants of total degree ≤ degree, as canonical strings.
#[pyfunction]
fn kernel_basis(derivations: Vec<Derivation>, degree: i64) -> PyResult<Vec<String>> {
    let ds: Vec<CoreDerivation> = derivations.into_iter().map(|d| d.inner).collect();
    let kernel = cst::kernel_truncated(&ds, degree).map_err(engine_err)?;
    Ok(kernel.basis.iter().map(|f| f.to_string()).collect())
}

/// Minimal monomial generators of the diagonal constants for the weights.
#[pyfunction]
fn toric_generators(weights: Vec<i64>, p: u64) -> PyResult<Vec<Vec<i64>>> {
    if !folcalc_core::field::is_prime(p) {
        return Err(PyValueError::new_err(format!("{p} is not prime")));
    }
    let monoid = cst::toric_constants(&weights, p);
    Ok(monoid.minimal_gens.into_iter().map(|e| e.0).collect())
}

/// Kernel-vs-subalgebra certification of claimed constant generators.
#[pyfunction]
fn certify_generators<'py>(
    py: Python<'py>,
    derivations: Vec<Derivation>,
    claimed: Vec<Polynomial>,
    degree: i64,
) -> PyResult<Bound<'py, PyDict>> {
    let ds: Vec<CoreDerivation> = derivations.into_iter().map(|d| d.inner).collect();
    let cs: Vec<CorePoly> = claimed.into_iter().map(|p| p.inner).collect();
    let report = cst::certify_generators(&ds, &cs, degree).map_err(engine_err)?;
    let d = PyDict::new(py);
    d.set_item("pass", report.pass)?;
    d.set_item("kernel_dim", report.kernel_dim)?;
    d.set_item("touches_boundary", report.touches_boundary)?;
    d.set_item(
        "witness",
        report.failing_witness.map(|f| f.to_string()),
    )?;
    Ok(d)
}

fn build_chart(
    ring: &Ring,
    center: Vec<String>,
    chart_var: String,
    weights: Option<Vec<(String, i64)>>,
) -> PyResult<bir::Chart> {
    let r = &ring.inner;
    let center_idx: Vec<usize> = center
        .iter()
        .map(|name| {
            r.var_index(name)
                .ok_or_else(|| PyValueError::new_err(format!("unknown variable `{name}`")))
        })
        .collect::<PyResult<_>>()?;
    let chart_idx = r
        .var_index(&chart_var)
        .ok_or_else(|| PyValueError::new_err(format!("unknown variable `{chart_var}`")))?;
    match weights {
        None => bir::Chart::blowup(r, &center_idx, chart_idx).map_err(engine_err),
        Some(list) => {
            let mut w = vec![0i64; r.nvars()];
            for &i in &center_idx {
                if i != chart_idx {
                    w[i] = 1;
                }
            }
            for (name, value) in list {
                let idx = r.var_index(&name).ok_or_else(|| {
                    PyValueError::new_err(format!("unknown variable `{name}`"))
                })?;
                w[idx] = value;
            }
            bir::Chart::weighted(r, chart_idx, w).map_err(engine_err)
        }
    }
}

/// Pull a derivation back along a blow-up chart.
#[pyfunction]
#[pyo3(signature = (ring, derivation, center, chart_var, weights=None))]
fn blowup_pullback(
    ring: &Ring,
    derivation: &Derivation,
    center: Vec<String>,
    chart_var: String,
    weights: Option<Vec<(String, i64)>>,
) -> PyResult<Derivation> {
    let chart = build_chart(ring, center, chart_var, weights)?;
    Ok(Derivation {
        inner: chart.pullback(&derivation.inner).map_err(engine_err)?,
    })
}

/// {"a_F": int, "epsilon": 0|1, "content": str, "pullback": str, "lc": bool}
#[pyfunction]
#[pyo3(signature = (ring, derivation, center, chart_var, weights=None))]
fn discrepancy<'py>(
    py: Python<'py>,
    ring: &Ring,
    derivation: &Derivation,
    center: Vec<String>,
    chart_var: String,
    weights: Option<Vec<(String, i64)>>,
) -> PyResult<Bound<'py, PyDict>> {
    let chart = build_chart(ring, center, chart_var, weights)?;
    let rec = bir::discrepancy_rank1(&derivation.inner, &chart).map_err(engine_err)?;
    let d = PyDict::new(py);
    d.set_item("a_F", rec.a_f)?;
    d.set_item("epsilon", rec.epsilon)?;
    d.set_item("content", rec.content.to_string())?;
    d.set_item("pullback", rec.saturated_pullback.to_string())?;
    d.set_item("lc", rec.satisfies_lc())?;
    Ok(d)
}

/// {"status": "regular_canonical"|"lc_multiplicative"|"not_lc",
///  "linear_part": [\[int\]]?, "multiplicative_at_point": bool}
#[pyfunction]
fn lc_check<'py>(
    py: Python<'py>,
    derivation: &Derivation,
    point: Vec<i64>,
) -> PyResult<Bound<'py, PyDict>> {
    let verdict = sing::classify_rank1(&derivation.inner, &point).map_err(engine_err)?;
    let d = PyDict::new(py);
    d.set_item(
        "status",
        match verdict.status {
            sing::Rank1Status::RegularCanonical => "regular_canonical",
            sing::Rank1Status::LcMultiplicative => "lc_multiplicative",
            sing::Rank1Status::NotLc => "not_lc",
        },
    )?;
    d.set_item(
        "linear_part",
        verdict.linear_part.map(|m| {
            (0..m.rows)
                .map(|i| (0..m.cols).map(|j| m.get(i, j)).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        }),
    )?;
    d.set_item("multiplicative_at_point", verdict.multiplicative_at_point)?;
    Ok(d)
}

/// Blow-up path witnessing non-log-canonicity.
#[pyfunction]
#[pyo3(signature = (derivation, point, max_steps=16))]
fn nonlc_certificate<'py>(
    py: Python<'py>,
    derivation: &Derivation,
    point: Vec<i64>,
    max_steps: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cert =
        sing::find_nonlc_divisor(&derivation.inner, &point, max_steps).map_err(engine_err)?;
    let d = PyDict::new(py);
    let steps = PyList::empty(py);
    for s in &cert.steps {
        match s {
            sing::CertificateStep::Coordinates { images } => {
                let item = PyDict::new(py);
                item.set_item("kind", "coordinates")?;
                item.set_item(
                    "images",
                    images.iter().map(|f| f.to_string_bare()).collect::<Vec<_>>(),
                )?;
                steps.append(item)?;
            }
            sing::CertificateStep::Blowup { chart } => {
                let item = PyDict::new(py);
                item.set_item("kind", "blowup")?;
                item.set_item("chart", chart.to_string())?;
                steps.append(item)?;
            }
        }
    }
    d.set_item("steps", steps)?;
    d.set_item("a_F", cert.record.a_f)?;
    d.set_item("epsilon", cert.record.epsilon)?;
    d.set_item("final_vanishing_order", cert.final_vanishing_order)?;
    Ok(d)
}

/// Fedder's criterion at the origin for the hypersurface (f = 0).
#[pyfunction]
fn fedder_f_pure(f: &Polynomial) -> PyResult<bool> {
    sing::fedder_f_pure(&f.inner).map_err(engine_err)
}

/// Annihilator foliation generators of a non-p-th-power.
#[pyfunction]
fn ann_generators(f: &Polynomial) -> PyResult<Vec<Derivation>> {
    Ok(sing::ann_foliation(&f.inner)
        .map_err(engine_err)?
        .into_iter()
        .map(|d| Derivation { inner: d })
        .collect())
}

/// Two-variable annihilator classification with the rank-1 cross-check.
#[pyfunction]
fn ann_surface<'py>(
    py: Python<'py>,
    f: &Polynomial,
    point: Vec<i64>,
) -> PyResult<Bound<'py, PyDict>> {
    let report = sing::ann_surface_classify(&f.inner, &point).map_err(engine_err)?;
    let d = PyDict::new(py);
    d.set_item(
        "class",
        match report.class {
            sing::SurfaceClass::Regular => "regular",
            sing::SurfaceClass::StrictlyLc => "strictly_lc",
            sing::SurfaceClass::NotLc => "not_lc",
        },
    )?;
    d.set_item("generator", report.generator.to_string())?;
    d.set_item("agrees", report.agrees)?;
    Ok(d)
}

/// Best quotient singularity class guaranteed by the transfer theorem.
#[pyfunction]
fn transfer_class(x_class: &str, f_class: &str) -> PyResult<String> {
    let xc = ledger::SingClass::parse(x_class)
        .ok_or_else(|| PyValueError::new_err(format!("unknown class `{x_class}`")))?;
    let fc = ledger::SingClass::parse(f_class)
        .ok_or_else(|| PyValueError::new_err(format!("unknown class `{f_class}`")))?;
    Ok(ledger::transfer_class_guaranteed(xc, fc)
        .map_err(engine_err)?
        .as_str()
        .to_string())
}

/// Exact discrepancy transfer: returns (num, den).
#[pyfunction]
fn transfer_discrepancy(
    c: (i64, i64),
    b: (i64, i64),
    invariant: bool,
    p: u64,
) -> PyResult<(i64, i64)> {
    if c.1 == 0 || b.1 == 0 {
        return Err(PyValueError::new_err("zero denominator"));
    }
    let a = ledger::transfer_discrepancy(
        ledger::Rational::new(c.0, c.1),
        ledger::Rational::new(b.0, b.1),
        invariant,
        p,
    );
    Ok((*a.numer(), *a.denom()))
}

/// Compare specialized family constants with fiber constants over t = at.
#[pyfunction]
fn family_compare<'py>(
    py: Python<'py>,
    ring: &Ring,
    derivation: &Derivation,
    base: &str,
    at: i64,
    degree: i64,
) -> PyResult<Bound<'py, PyDict>> {
    let base_idx = ring
        .inner
        .var_index(base)
        .ok_or_else(|| PyValueError::new_err(format!("unknown base variable `{base}`")))?;
    let family = fam::FamilyDerivation::new(
        &ring.inner,
        derivation.inner.coeffs().to_vec(),
        base_idx,
    )
    .map_err(engine_err)?;
    let report = fam::fiber_vs_quotient_compare(&family, at, degree).map_err(engine_err)?;
    let d = PyDict::new(py);
    d.set_item("equal", report.equal)?;
    d.set_item("fiber_kernel_dim", report.fiber_kernel_dim)?;
    d.set_item("specialized_rank", report.specialized_family_rank)?;
    d.set_item(
        "missing",
        report
            .missing
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>(),
    )?;
    d.set_item(
        "lifts",
        report
            .lifts
            .iter()
            .map(|(g, l)| (g.to_string(), l.to_string()))
            .collect::<Vec<_>>(),
    )?;
    Ok(d)
}

/// Run the regression corpus; returns one dict per case.
#[pyfunction]
#[pyo3(signature = (filter=None))]
fn run_corpus<'py>(py: Python<'py>, filter: Option<&str>) -> PyResult<Bound<'py, PyList>> {
    let outcomes = folcalc_core::corpus::run_corpus(filter);
    let list = PyList::empty(py);
    for o in outcomes {
        let d = PyDict::new(py);
        d.set_item("group", o.group)?;
        d.set_item("id", o.id)?;
        d.set_item("passed", o.passed)?;
        d.set_item("detail", o.detail)?;
        d.set_item("millis", o.millis as u64)?;
        list.append(d)?;
    }
    Ok(list)
}

#[pymodule]
fn folcalc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Ring>()?;
    m.add_class::<Polynomial>()?;
    m.add_class::<Derivation>()?;
    m.add_function(wrap_pyfunction!(kernel_basis, m)?)?;
    m.add_function(wrap_pyfunction!(toric_generators, m)?)?;
    m.add_function(wrap_pyfunction!(certify_generators, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_pullback, m)?)?;
    m.add_function(wrap_pyfunction!(discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(lc_check, m)?)?;
    m.add_function(wrap_pyfunction!(nonlc_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(fedder_f_pure, m)?)?;
    m.add_function(wrap_pyfunction!(ann_generators, m)?)?;
    m.add_function(wrap_pyfunction!(ann_surface, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_class, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(family_compare, m)?)?;
    m.add_function(wrap_pyfunction!(run_corpus, m)?)?;
    Ok(())
}
