//! Serialization for polynomials, matrices, measures, certificates and
//! reports, plus canonical content digests used to tie certificates to the
//! objects they certify.

use sha2::{Digest, Sha256};
use std::str::FromStr;

use crate::bounds::{BoundCertificate, UNBOUNDED};
use crate::dense::DensePoly;
use crate::error::Error;
use crate::matrices::HermitianMatrix;
use crate::measures::SRMeasure;
use crate::multiaffine::MultiAffinePoly;
use crate::paving::{Paving, PavingBoundReport};
use crate::subset;
use crate::uni::UniPoly;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 over the canonical byte serialization: variable count followed
/// by every coefficient as little-endian IEEE-754 bits in subset order.
pub fn digest_ma(p: &MultiAffinePoly<f64>) -> String {
    let mut h = Sha256::new();
    h.update(b"ma");
    h.update((p.n_vars() as u64).to_le_bytes());
    for c in p.coeffs() {
        h.update(c.to_bits().to_le_bytes());
    }
    hex(&h.finalize())
}

/// SHA-256 over the sorted term list of a dense polynomial.
pub fn digest_dense(p: &DensePoly<f64>) -> String {
    let mut h = Sha256::new();
    h.update(b"dense");
    h.update((p.n_vars() as u64).to_le_bytes());
    h.update(u64::from(p.max_deg()).to_le_bytes());
    for (e, c) in p.terms() {
        for &x in e {
            h.update(u64::from(x).to_le_bytes());
        }
        h.update(c.to_bits().to_le_bytes());
    }
    hex(&h.finalize())
}

/// SHA-256 over the ascending coefficient list of a univariate polynomial.
pub fn digest_uni(p: &UniPoly) -> String {
    let mut h = Sha256::new();
    h.update(b"uni");
    for c in p.coeffs() {
        h.update(c.to_bits().to_le_bytes());
    }
    hex(&h.finalize())
}

fn parse_err(e: &serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), detail: e.to_string() }
}

fn malformed(detail: impl Into<String>) -> Error {
    Error::Malformed { detail: detail.into() }
}

/// One coefficient: a float, or an exact rational as a "p/q" string.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffJson {
    Float(f64),
    Exact(String),
}

impl CoeffJson {
    fn as_f64(&self) -> Result<f64, Error> {
        match self {
            CoeffJson::Float(x) => Ok(*x),
            CoeffJson::Exact(s) => {
                let r = BigRational::from_str(s)
                    .map_err(|_| malformed(format!("bad rational coefficient {s:?}")))?;
                Ok(rational_to_f64(&r))
            }
        }
    }

    fn as_rational(&self) -> Result<BigRational, Error> {
        match self {
            CoeffJson::Float(x) => BigRational::from_float(*x)
                .ok_or_else(|| malformed("non-finite coefficient")),
            CoeffJson::Exact(s) => BigRational::from_str(s)
                .map_err(|_| malformed(format!("bad rational coefficient {s:?}"))),
        }
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// One term: a subset (multiaffine) or an exponent vector (dense).
#[derive(Serialize, Deserialize)]
struct TermJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    subset: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponents: Option<Vec<u32>>,
    coeff: CoeffJson,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    n_vars: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_deg: Option<u32>,
    terms: Vec<TermJson>,
}

fn poly_from_json(text: &str) -> Result<PolyJson, Error> {
    serde_json::from_str(text).map_err(|e| parse_err(&e))
}

fn ma_terms<T, F>(text: &str, coeff: F) -> Result<MultiAffinePoly<T>, Error>
where
    T: crate::scalar::Coeff,
    F: Fn(&CoeffJson) -> Result<T, Error>,
{
    let spec = poly_from_json(text)?;
    let n = spec.n_vars;
    if n > crate::multiaffine::MAX_VARS {
        return Err(Error::TooManyVariables { n_vars: n, max: crate::multiaffine::MAX_VARS });
    }
    let mut coeffs = vec![T::zero(); subset::lattice_size(n)];
    for (k, term) in spec.terms.iter().enumerate() {
        let idx = term
            .subset
            .as_ref()
            .ok_or_else(|| malformed(format!("term {k}: expected a \"subset\" key")))?;
        let mask = subset::from_indices(idx, n)
            .map_err(|e| malformed(format!("term {k}: {e}")))?;
        let c = coeff(&term.coeff).map_err(|e| malformed(format!("term {k}: {e}")))?;
        coeffs[mask as usize] = coeffs[mask as usize].clone() + c;
    }
    MultiAffinePoly::new(n, coeffs)
}

/// Multiaffine polynomial from the term-list JSON schema, float mode.
pub fn ma_from_json(text: &str) -> Result<MultiAffinePoly<f64>, Error> {
    ma_terms(text, CoeffJson::as_f64)
}

/// Multiaffine polynomial in exact-rational mode: floats are converted
/// exactly, "p/q" strings parse as rationals.
pub fn ma_exact_from_json(text: &str) -> Result<MultiAffinePoly<BigRational>, Error> {
    ma_terms(text, CoeffJson::as_rational)
}

/// Dense polynomial from the exponent-vector JSON schema. The per-variable
/// degree cap is `max_deg` when present, otherwise the largest exponent
/// appearing in the terms.
pub fn dense_from_json(text: &str) -> Result<DensePoly<f64>, Error> {
    let spec = poly_from_json(text)?;
    let n = spec.n_vars;
    let mut terms = Vec::with_capacity(spec.terms.len());
    let mut seen_deg = 0u32;
    for (k, term) in spec.terms.iter().enumerate() {
        let expo = term
            .exponents
            .as_ref()
            .ok_or_else(|| malformed(format!("term {k}: expected an \"exponents\" key")))?;
        if expo.len() != n {
            return Err(malformed(format!(
                "term {k}: {} exponents for {n} variables",
                expo.len()
            )));
        }
        seen_deg = seen_deg.max(expo.iter().copied().max().unwrap_or(0));
        let c = term.coeff.as_f64().map_err(|e| malformed(format!("term {k}: {e}")))?;
        terms.push((expo.clone(), c));
    }
    DensePoly::from_terms(n, spec.max_deg.unwrap_or(seen_deg), terms)
}

pub fn ma_to_json(p: &MultiAffinePoly<f64>) -> String {
    let spec = PolyJson {
        n_vars: p.n_vars(),
        max_deg: None,
        terms: p
            .support()
            .into_iter()
            .map(|s| TermJson {
                subset: Some(subset::to_indices(s)),
                exponents: None,
                coeff: CoeffJson::Float(*p.coeff(s)),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&spec).expect("serializable")
}

pub fn ma_exact_to_json(p: &MultiAffinePoly<BigRational>) -> String {
    use num_traits::Zero;
    let spec = PolyJson {
        n_vars: p.n_vars(),
        max_deg: None,
        terms: (0..subset::lattice_size(p.n_vars()))
            .filter(|&s| !p.coeff(s as subset::Subset).is_zero())
            .map(|s| {
                let c = p.coeff(s as subset::Subset);
                TermJson {
                    subset: Some(subset::to_indices(s as subset::Subset)),
                    exponents: None,
                    coeff: CoeffJson::Exact(format!("{}/{}", c.numer(), c.denom())),
                }
            })
            .collect(),
    };
    serde_json::to_string_pretty(&spec).expect("serializable")
}

pub fn dense_to_json(p: &DensePoly<f64>) -> String {
    let spec = PolyJson {
        n_vars: p.n_vars(),
        max_deg: Some(p.max_deg()),
        terms: p
            .terms()
            .map(|(e, &c)| TermJson {
                subset: None,
                exponents: Some(e.clone()),
                coeff: CoeffJson::Float(c),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&spec).expect("serializable")
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    re: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

/// Hermitian matrix from {"n", "re", "im"} JSON; a missing "im" block
/// means a real symmetric matrix.
pub fn matrix_from_json(text: &str) -> Result<HermitianMatrix, Error> {
    let spec: MatrixJson = serde_json::from_str(text).map_err(|e| parse_err(&e))?;
    let n = spec.n;
    let check_rows = |rows: &Vec<Vec<f64>>, what: &str| -> Result<(), Error> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(malformed(format!("{what} block is not {n}x{n}")));
        }
        Ok(())
    };
    check_rows(&spec.re, "re")?;
    if let Some(im) = &spec.im {
        check_rows(im, "im")?;
    }
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    let m = DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(spec.re[i][j], spec.im.as_ref().map_or(0.0, |im| im[i][j]))
    });
    HermitianMatrix::new(m)
}

pub fn matrix_to_json(a: &HermitianMatrix) -> String {
    let n = a.n();
    let spec = MatrixJson {
        n,
        re: (0..n).map(|i| (0..n).map(|j| a.entry(i, j).re).collect()).collect(),
        im: Some((0..n).map(|i| (0..n).map(|j| a.entry(i, j).im).collect()).collect()),
    };
    serde_json::to_string_pretty(&spec).expect("serializable")
}

/// Real symmetric matrix from CSV rows (comma-separated, one row per
/// line).
pub fn matrix_from_csv(text: &str) -> Result<HermitianMatrix, Error> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, cell) in line.split(',').enumerate() {
            let x: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                column: col + 1,
                detail: format!("bad number {:?}", cell.trim()),
            })?;
            row.push(x);
        }
        rows.push(row);
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(malformed("CSV matrix is not square"));
    }
    HermitianMatrix::from_real(&rows)
}

/// CSV of the real part; rejects matrices with imaginary entries since
/// the format cannot carry them.
pub fn matrix_to_csv(a: &HermitianMatrix) -> Result<String, Error> {
    let n = a.n();
    let mut out = String::new();
    for i in 0..n {
        let mut cells = Vec::with_capacity(n);
        for j in 0..n {
            let e = a.entry(i, j);
            if e.im != 0.0 {
                return Err(Error::Domain("CSV output carries only real matrices"));
            }
            cells.push(format!("{:.16e}", e.re));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MeasureJson {
    Partition { n: usize, r: usize },
    EqualPartition { m: usize, r: usize },
    Product { p: Vec<f64> },
    Determinantal { kernel: MatrixJson },
    Explicit { n_vars: usize, coeffs: Vec<f64> },
}

/// Measure from its JSON spec: a named family with parameters, or an
/// explicit coefficient table in subset order.
pub fn measure_from_json(text: &str) -> Result<SRMeasure, Error> {
    let spec: MeasureJson = serde_json::from_str(text).map_err(|e| parse_err(&e))?;
    match spec {
        MeasureJson::Partition { n, r } => crate::measures::partition_measure(n, r),
        MeasureJson::EqualPartition { m, r } => {
            crate::measures::equal_size_partition_measure(m, r)
        }
        MeasureJson::Product { p } => crate::measures::product_measure(&p),
        MeasureJson::Determinantal { kernel } => {
            let text = serde_json::to_string(&kernel).expect("serializable");
            crate::measures::determinantal_measure(&matrix_from_json(&text)?)
        }
        MeasureJson::Explicit { n_vars, coeffs } => {
            if coeffs.len() != subset::lattice_size(n_vars) {
                return Err(malformed(format!(
                    "explicit measure needs 2^{n_vars} coefficients, got {}",
                    coeffs.len()
                )));
            }
            SRMeasure::from_gen(MultiAffinePoly::new(n_vars, coeffs)?, "explicit")
        }
    }
}

/// Measures serialize as the explicit kind with the full table.
pub fn measure_to_json(mu: &SRMeasure) -> String {
    let spec = MeasureJson::Explicit {
        n_vars: mu.n_vars(),
        coeffs: mu.gen().coeffs().to_vec(),
    };
    serde_json::to_string_pretty(&spec).expect("serializable")
}

/// JSON mirror of a certificate. Unbounded coordinates in c serialize as
/// null, since JSON has no -inf.
#[derive(Serialize, Deserialize)]
struct CertificateJson {
    c: Vec<Option<f64>>,
    a: Vec<f64>,
    b: Vec<f64>,
    phis: Vec<f64>,
    target_digest: String,
    verified: bool,
}

pub fn certificate_to_json(cert: &BoundCertificate) -> String {
    let spec = CertificateJson {
        c: cert
            .c
            .iter()
            .map(|&x| if x == UNBOUNDED { None } else { Some(x) })
            .collect(),
        a: cert.a.clone(),
        b: cert.b.clone(),
        phis: cert.phis.clone(),
        target_digest: cert.target_digest.clone(),
        verified: cert.verified,
    };
    serde_json::to_string_pretty(&spec).expect("serializable")
}

pub fn certificate_from_json(text: &str) -> Result<BoundCertificate, Error> {
    let spec: CertificateJson = serde_json::from_str(text).map_err(|e| parse_err(&e))?;
    Ok(BoundCertificate {
        c: spec.c.into_iter().map(|x| x.unwrap_or(UNBOUNDED)).collect(),
        a: spec.a,
        b: spec.b,
        phis: spec.phis,
        target_digest: spec.target_digest,
        verified: spec.verified,
    })
}

#[derive(Serialize, Deserialize)]
struct UniJson {
    coeffs: Vec<f64>,
}

/// Univariate polynomial as {"coeffs": [...]} in ascending order.
pub fn uni_to_json(p: &UniPoly) -> String {
    serde_json::to_string_pretty(&UniJson { coeffs: p.coeffs().to_vec() })
        .expect("serializable")
}

pub fn uni_from_json(text: &str) -> Result<UniPoly, Error> {
    let spec: UniJson = serde_json::from_str(text).map_err(|e| parse_err(&e))?;
    if spec.coeffs.iter().any(|c| !c.is_finite()) {
        return Err(malformed("non-finite coefficient"));
    }
    Ok(UniPoly::new(spec.coeffs))
}

#[derive(Serialize, Deserialize)]
struct PavingJson {
    assignment: Vec<usize>,
    r: usize,
    lambda_max: f64,
}

pub fn paving_to_json(p: &Paving) -> String {
    let spec = PavingJson {
        assignment: p.assignment().to_vec(),
        r: p.r(),
        lambda_max: p.lambda_max(),
    };
    serde_json::to_string_pretty(&spec).expect("serializable")
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    simple_bound: f64,
    gamma_bound: f64,
    best_found: Option<f64>,
    r: usize,
    alpha: f64,
    n: usize,
    simple_trivial: bool,
    gamma_trivial: bool,
}

pub fn report_to_json(rep: &PavingBoundReport) -> String {
    let spec = ReportJson {
        simple_bound: rep.simple_bound,
        gamma_bound: rep.gamma_bound,
        best_found: rep.best_found,
        r: rep.r,
        alpha: rep.alpha,
        n: rep.n,
        simple_trivial: rep.simple_trivial,
        gamma_trivial: rep.gamma_trivial,
    };
    serde_json::to_string_pretty(&spec).expect("serializable")
}

pub fn report_from_json(text: &str) -> Result<PavingBoundReport, Error> {
    let spec: ReportJson = serde_json::from_str(text).map_err(|e| parse_err(&e))?;
    Ok(PavingBoundReport {
        simple_bound: spec.simple_bound,
        gamma_bound: spec.gamma_bound,
        best_found: spec.best_found,
        r: spec.r,
        alpha: spec.alpha,
        n: spec.n,
        simple_trivial: spec.simple_trivial,
        gamma_trivial: spec.gamma_trivial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_distinguish_polynomials() {
        let p = MultiAffinePoly::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let q = MultiAffinePoly::new(2, vec![1.0, 0.0, 0.0, 2.0]).unwrap();
        assert_ne!(digest_ma(&p), digest_ma(&q));
        assert_eq!(digest_ma(&p), digest_ma(&p.clone()));
        assert_eq!(digest_ma(&p).len(), 64);
    }

    #[test]
    fn ma_json_round_trip() {
        let p = MultiAffinePoly::new(3, vec![0.5, 0.0, -1.25, 0.0, 3.0, 0.0, 0.0, 2.0]).unwrap();
        let back = ma_from_json(&ma_to_json(&p)).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn ma_exact_json_round_trip() {
        use num_traits::Zero;
        let mut coeffs = vec![BigRational::zero(); 4];
        coeffs[0] = BigRational::new(1.into(), 3.into());
        coeffs[3] = BigRational::new((-7).into(), 2.into());
        let p = MultiAffinePoly::new(2, coeffs).unwrap();
        let back = ma_exact_from_json(&ma_exact_to_json(&p)).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn exact_reader_accepts_floats_and_integers() {
        let text = r#"{"n_vars":1,"terms":[{"subset":[],"coeff":0.5},{"subset":[0],"coeff":"3"}]}"#;
        let p = ma_exact_from_json(text).unwrap();
        assert_eq!(*p.coeff(0), BigRational::new(1.into(), 2.into()));
        assert_eq!(*p.coeff(1), BigRational::from_integer(3.into()));
    }

    #[test]
    fn dense_json_round_trip() {
        let p = DensePoly::from_terms(
            2,
            3,
            vec![(vec![0, 0], 1.0), (vec![3, 1], -2.0), (vec![1, 2], 0.25)],
        )
        .unwrap();
        let back = dense_from_json(&dense_to_json(&p)).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "{\n  \"n_vars\": 2,\n  \"terms\": [oops]\n}";
        match ma_from_json(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let wrong = r#"{"n_vars":1,"terms":[{"exponents":[1],"coeff":1.0}]}"#;
        assert!(matches!(ma_from_json(wrong), Err(Error::Malformed { .. })));
    }

    #[test]
    fn matrix_json_round_trip() {
        use nalgebra::DMatrix;
        use num_complex::Complex64;
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, -0.25),
                Complex64::new(0.5, 0.25),
                Complex64::new(-2.0, 0.0),
            ],
        );
        let a = HermitianMatrix::new(m).unwrap();
        let back = matrix_from_json(&matrix_to_json(&a)).unwrap();
        assert_eq!(a.matrix(), back.matrix());
        // real matrices omit "im" and round-trip through CSV
        let d = HermitianMatrix::diagonal(&[1.0, -0.5]);
        let csv = matrix_to_csv(&d).unwrap();
        let back = matrix_from_csv(&csv).unwrap();
        assert_eq!(d.matrix(), back.matrix());
        assert!(matrix_to_csv(&a).is_err());
    }

    #[test]
    fn matrix_csv_reports_bad_cells() {
        match matrix_from_csv("1.0,2.0\n2.0,x") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn measure_kinds_parse() {
        let mu = measure_from_json(r#"{"kind":"partition","n":2,"r":2}"#).unwrap();
        assert_eq!(mu.n_vars(), 4);
        let mu = measure_from_json(r#"{"kind":"equal_partition","m":1,"r":2}"#).unwrap();
        assert_eq!(mu.n_vars(), 4);
        let mu = measure_from_json(r#"{"kind":"product","p":[0.25,0.5]}"#).unwrap();
        assert!((mu.prob(0b00) - 0.375).abs() < 1e-12);
        let mu = measure_from_json(
            r#"{"kind":"determinantal","kernel":{"n":2,"re":[[0.5,0.0],[0.0,0.5]]}}"#,
        )
        .unwrap();
        assert!((mu.prob(0b11) - 0.25).abs() < 1e-12);
        let mu =
            measure_from_json(r#"{"kind":"explicit","n_vars":1,"coeffs":[0.4,0.6]}"#).unwrap();
        let back = measure_from_json(&measure_to_json(&mu)).unwrap();
        assert_eq!(mu.gen(), back.gen());
        assert!(measure_from_json(r#"{"kind":"explicit","n_vars":2,"coeffs":[1.0]}"#).is_err());
    }

    #[test]
    fn certificate_round_trip_preserves_unbounded() {
        let cert = BoundCertificate {
            c: vec![1.5, UNBOUNDED],
            a: vec![1.0, 2.0],
            b: vec![0.5, 0.5],
            phis: vec![2.0, 0.0],
            target_digest: "ab".repeat(32),
            verified: true,
        };
        let back = certificate_from_json(&certificate_to_json(&cert)).unwrap();
        assert_eq!(cert.c, back.c);
        assert_eq!(cert.a, back.a);
        assert_eq!(cert.verified, back.verified);
        assert_eq!(cert.target_digest, back.target_digest);
    }

    #[test]
    fn uni_and_report_round_trips() {
        let p = UniPoly::new(vec![2.0, 0.0, -1.0, 3.5]);
        assert_eq!(uni_from_json(&uni_to_json(&p)).unwrap(), p);
        let rep = PavingBoundReport {
            simple_bound: 2.25,
            gamma_bound: 0.9,
            best_found: None,
            r: 16,
            alpha: 0.25,
            n: 4,
            simple_trivial: true,
            gamma_trivial: false,
        };
        assert_eq!(report_from_json(&report_to_json(&rep)).unwrap(), rep);
    }
}
