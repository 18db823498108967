//! Parametrised matrix forms such as `[[a,b],[-b,a]]`.
//!
//! An algebra is rendered from the reduced row echelon form of its basis,
//! flattened row-major: the entry at each pivot is a free parameter
//! (`a`, `b`, … in pivot order) and every other entry is a combination of
//! parameters whose coefficients are snapped to roots of unity when
//! possible. `e(k/M)` stands for `exp(2πik/M)`.

use std::fmt;

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use serde::Serialize;

use crate::algebra::OperatorAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{rref, CMatrix, CVector, Tol};
use crate::torus::TorusExponent;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coef {
    Exact(TorusExponent),
    Numeric(Complex<f64>),
}

impl Coef {
    pub fn to_complex(self) -> Complex<f64> {
        match self {
            Coef::Exact(t) => t.to_complex(),
            Coef::Numeric(z) => z,
        }
    }
}

/// `coef · param`, or a constant when `param` is `None`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub coef: Coef,
    pub param: Option<usize>,
}

/// A square matrix whose entries are sums of terms; an empty sum is `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamForm {
    dim: usize,
    entries: Vec<Vec<Term>>,
}

pub fn param_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("p{i}")
    }
}

fn param_index(name: &str) -> Option<usize> {
    let mut chars = name.chars();
    match (chars.next(), chars.next()) {
        (Some(c @ 'a'..='z'), None) => Some(c as usize - 'a' as usize),
        (Some('p'), Some(_)) => name[1..].parse().ok(),
        _ => None,
    }
}

impl ParamForm {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &[Term] {
        &self.entries[row * self.dim + col]
    }

    pub fn set_entry(&mut self, row: usize, col: usize, terms: Vec<Term>) {
        self.entries[row * self.dim + col] = terms;
    }

    /// Number of distinct parameters (one more than the largest index).
    pub fn param_count(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter_map(|t| t.param)
            .map(|p| p + 1)
            .max()
            .unwrap_or(0)
    }

    /// Reads off the form of an algebra.
    pub fn from_algebra<R: RealField + Copy>(alg: &OperatorAlgebra<R>, modulus: u64, tol: Tol<R>) -> ParamForm {
        let d = alg.matrix_dim();
        let rows: Vec<CVector<R>> = alg
            .basis()
            .iter()
            .map(|b| CVector::from_iterator(d * d, b.transpose().iter().copied()))
            .collect();
        let (rows, _) = rref(&rows, tol.rank.max(nalgebra::convert(1e-7)));
        let snap_tol: R = nalgebra::convert(1e-7);
        let entries = (0..d * d)
            .map(|e| {
                rows.iter()
                    .enumerate()
                    .filter(|(_, r)| r[e].modulus() > snap_tol)
                    .map(|(p, r)| {
                        let z = r[e];
                        let coef = match TorusExponent::snap(z, modulus, snap_tol) {
                            Some(t) => Coef::Exact(t),
                            None => Coef::Numeric(Complex::new(to_f64(z.re), to_f64(z.im))),
                        };
                        Term { coef, param: Some(p) }
                    })
                    .collect()
            })
            .collect();
        ParamForm { dim: d, entries }
    }

    /// Dense matrix with `1` substituted for `param` and `0` for every other
    /// parameter; constant terms are dropped.
    pub fn param_matrix(&self, param: usize) -> CMatrix<f64> {
        let d = self.dim;
        CMatrix::from_fn(d, d, |r, c| {
            self.entry(r, c)
                .iter()
                .filter(|t| t.param == Some(param))
                .map(|t| t.coef.to_complex())
                .sum()
        })
    }

    /// The matrix of a form with no parameters.
    pub fn constant_matrix(&self) -> CMatrix<f64> {
        let d = self.dim;
        CMatrix::from_fn(d, d, |r, c| {
            self.entry(r, c)
                .iter()
                .filter(|t| t.param.is_none())
                .map(|t| t.coef.to_complex())
                .sum()
        })
    }

    /// Exact entries of a parameter-free form with at most one term per
    /// entry.
    pub fn exact_constants(&self) -> Option<Vec<Vec<Option<TorusExponent>>>> {
        (0..self.dim)
            .map(|r| {
                (0..self.dim)
                    .map(|c| match self.entry(r, c) {
                        [] => Some(None),
                        [Term {
                            coef: Coef::Exact(t),
                            param: None,
                        }] => Some(Some(*t)),
                        _ => None,
                    })
                    .collect()
            })
            .collect()
    }

    /// Whether every coefficient is an exact root of unity.
    pub fn is_exact(&self) -> bool {
        self.entries.iter().flatten().all(|t| matches!(t.coef, Coef::Exact(_)))
    }
}

fn to_f64<R: RealField + Copy>(v: R) -> f64 {
    nalgebra::try_convert::<R, f64>(v).unwrap_or(f64::NAN)
}

fn fmt_coef(c: Coef) -> String {
    match c {
        Coef::Exact(t) => t.to_string(),
        Coef::Numeric(z) => format!("({:.6}{:+.6}i)", z.re, z.im),
    }
}

fn fmt_term(t: &Term) -> String {
    match t.param {
        None => fmt_coef(t.coef),
        Some(p) => {
            let name = param_name(p);
            match t.coef {
                Coef::Exact(e) if e.is_one() => name,
                Coef::Exact(e) if e == TorusExponent::root(1, 2) => format!("-{name}"),
                c => format!("{}{name}", fmt_coef(c)),
            }
        }
    }
}

/// `Σ coefs[p]·param_p`, with coefficients snapped to roots of unity.
pub fn linear_form(coefs: &[Complex<f64>], modulus: u64) -> String {
    let terms: Vec<String> = coefs
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 1e-7)
        .map(|(p, &z)| {
            let coef = match TorusExponent::snap(z, modulus, 1e-7) {
                Some(t) => Coef::Exact(t),
                None => Coef::Numeric(z),
            };
            fmt_term(&Term { coef, param: Some(p) })
        })
        .collect();
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = terms[0].clone();
    for t in &terms[1..] {
        if !t.starts_with('-') {
            out.push('+');
        }
        out.push_str(t);
    }
    out
}

impl fmt::Display for ParamForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.dim)
            .map(|r| {
                let cells: Vec<String> = (0..self.dim)
                    .map(|c| match self.entry(r, c) {
                        [] => "0".to_string(),
                        terms => terms.iter().map(fmt_term).collect::<Vec<_>>().join("+"),
                    })
                    .collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

impl Serialize for ParamForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn parse_coef(s: &str) -> Result<TorusExponent> {
    let bad = || Error::Input(format!("unrecognised coefficient {s:?}"));
    match s {
        "" | "1" => Ok(TorusExponent::ONE),
        "-" | "-1" => Ok(TorusExponent::root(1, 2)),
        "i" => Ok(TorusExponent::root(1, 4)),
        "-i" => Ok(TorusExponent::root(3, 4)),
        _ => {
            let inner = s.strip_prefix("e(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
            let (k, m) = inner.split_once('/').ok_or_else(bad)?;
            let k: i64 = k.trim().parse().map_err(|_| bad())?;
            let m: u64 = m.trim().parse().map_err(|_| bad())?;
            TorusExponent::new(k, m)
        }
    }
}

fn parse_term(s: &str) -> Result<Term> {
    if let Some(pos) = s.rfind(|c: char| c.is_ascii_alphabetic()) {
        let tail = &s[pos..];
        let head = &s[..pos];
        // a trailing `i` is the imaginary unit unless something precedes it
        if !(tail == "i" && (head.is_empty() || head == "-")) {
            if let Some(p) = param_index(tail) {
                return Ok(Term {
                    coef: Coef::Exact(parse_coef(head)?),
                    param: Some(p),
                });
            }
        }
    }
    Ok(Term {
        coef: Coef::Exact(parse_coef(s)?),
        param: None,
    })
}

fn parse_entry(s: &str) -> Result<Vec<Term>> {
    if s == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut depth = 0;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' if depth == 0 => {
                terms.push(parse_term(&s[start..i])?);
                start = i + 1;
            }
            _ => {}
        }
    }
    terms.push(parse_term(&s[start..])?);
    Ok(terms)
}

impl std::str::FromStr for ParamForm {
    type Err = Error;

    /// Accepts the rendered syntax, with `−` allowed for `-` and
    /// whitespace ignored.
    fn from_str(s: &str) -> Result<Self> {
        let clean: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| if c == '−' { '-' } else { c })
            .collect();
        let inner = clean
            .strip_prefix("[[")
            .and_then(|r| r.strip_suffix("]]"))
            .ok_or_else(|| Error::Input(format!("matrix form must look like [[..],..]: {s:?}")))?;
        let rows: Vec<&str> = inner.split("],[").collect();
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            let cells: Vec<&str> = row.split(',').collect();
            if cells.len() != dim {
                return Err(Error::Input(format!("matrix form is not square: {s:?}")));
            }
            for cell in cells {
                entries.push(parse_entry(cell)?);
            }
        }
        Ok(ParamForm { dim, entries })
    }
}

/// How a printed form relates to a computed algebra.
#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub printed: String,
    pub computed: String,
    /// Distance of each printed parameter matrix (normalised) from the
    /// computed algebra.
    pub param_residuals: Vec<(String, f64)>,
    /// The printed form spans exactly the computed algebra.
    pub same_algebra: bool,
    /// Single-entry edits of the printed form that make it span the
    /// computed algebra.
    pub fixes: Vec<EntryFix>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryFix {
    pub row: usize,
    pub col: usize,
    pub printed: String,
    pub corrected: String,
}

fn spans(form: &ParamForm, alg: &OperatorAlgebra<f64>, tol: f64) -> (bool, Vec<(String, f64)>) {
    let n = form.param_count();
    let residuals: Vec<(String, f64)> = (0..n)
        .map(|p| {
            let m = form.param_matrix(p);
            let norm = crate::linalg::frobenius(&m);
            let r = if norm > 0.0 {
                alg.residual(&m) / norm
            } else {
                f64::INFINITY
            };
            (param_name(p), r)
        })
        .collect();
    let contained = residuals.iter().all(|(_, r)| *r < tol);
    let independent = crate::algebra::subspace(
        form.dim(),
        &(0..n).map(|p| form.param_matrix(p)).collect::<Vec<_>>(),
        Tol::standard(),
    )
    .dimension();
    (contained && independent == alg.dimension(), residuals)
}

/// Compares a printed form against a computed algebra, searching for
/// single-entry parameter swaps that repair it.
pub fn discrepancy(printed: &ParamForm, alg: &OperatorAlgebra<f64>, modulus: u64, tol: Tol<f64>) -> Discrepancy {
    let computed = ParamForm::from_algebra(alg, modulus, tol);
    let (same, param_residuals) = spans(printed, alg, tol.residual);
    let mut fixes = Vec::new();
    if !same {
        let n = printed.param_count();
        for r in 0..printed.dim() {
            for c in 0..printed.dim() {
                let original = printed.entry(r, c).to_vec();
                if original.len() != 1 {
                    continue;
                }
                for p in 0..n {
                    if original[0].param == Some(p) {
                        continue;
                    }
                    let mut trial = printed.clone();
                    trial.set_entry(
                        r,
                        c,
                        vec![Term {
                            param: Some(p),
                            ..original[0]
                        }],
                    );
                    if spans(&trial, alg, tol.residual).0 {
                        fixes.push(EntryFix {
                            row: r,
                            col: c,
                            printed: fmt_term(&original[0]),
                            corrected: fmt_term(&trial.entry(r, c)[0]),
                        });
                    }
                }
            }
        }
    }
    Discrepancy {
        printed: printed.to_string(),
        computed: computed.to_string(),
        param_residuals,
        same_algebra: same,
        fixes,
    }
}
