//! Verification reports: per-sample LHS/RHS records with residuals and
//! quadrature error estimates, serialized as JSON.
//!
//! Schema (stable):
//!
//! ```json
//! {
//!   "suite": "...",
//!   "params": { "...": "..." },
//!   "points": [
//!     {
//!       "inputs": { "name": {"re": 0.0, "im": 0.0}, ... },
//!       "lhs": {"re": 0.0, "im": 0.0},
//!       "rhs": {"re": 0.0, "im": 0.0},
//!       "abs_err": 0.0,
//!       "rel_err": 0.0,
//!       "quad_err": 0.0,
//!       "error": null
//!     }
//!   ],
//!   "max_rel_err": 0.0,
//!   "pass": true,
//!   "tol": 0.0,
//!   "wall_time_s": 0.0
//! }
//! ```
//!
//! `pass` holds iff `max_rel_err <= tol` and no point carries an `error`.

use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub inputs: BTreeMap<String, Cx>,
    pub lhs: Cx,
    pub rhs: Cx,
    pub abs_err: f64,
    pub rel_err: f64,
    pub quad_err: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PointRecord {
    pub fn new(inputs: BTreeMap<String, Cx>, lhs: Complex64, rhs: Complex64, quad_err: f64) -> Self {
        let abs_err = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm());
        let rel_err = if scale > 0.0 { abs_err / scale } else { abs_err };
        PointRecord {
            inputs,
            lhs: lhs.into(),
            rhs: rhs.into(),
            abs_err,
            rel_err,
            quad_err,
            error: None,
        }
    }

    pub fn failed(inputs: BTreeMap<String, Cx>, error: String) -> Self {
        PointRecord {
            inputs,
            lhs: Cx { re: 0.0, im: 0.0 },
            rhs: Cx { re: 0.0, im: 0.0 },
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            quad_err: f64::NAN,
            error: Some(error),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub points: Vec<PointRecord>,
    pub max_rel_err: f64,
    pub pass: bool,
    pub tol: f64,
    pub wall_time_s: f64,
}

impl VerificationReport {
    pub fn from_points(suite: &str, tol: f64, points: Vec<PointRecord>) -> Self {
        let max_rel_err = points
            .iter()
            .filter(|p| p.error.is_none())
            .map(|p| p.rel_err)
            .fold(0.0f64, f64::max);
        let any_error = points.iter().any(|p| p.error.is_some());
        VerificationReport {
            suite: suite.to_string(),
            params: BTreeMap::new(),
            points,
            max_rel_err,
            pass: !any_error && max_rel_err <= tol,
            tol,
            wall_time_s: 0.0,
        }
    }

    pub fn with_param(mut self, key: &str, value: serde_json::Value) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Flatten per-point records into CSV rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "suite,point,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,quad_err,error\n",
        );
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                self.suite,
                i,
                p.lhs.re,
                p.lhs.im,
                p.rhs.re,
                p.rhs.im,
                p.abs_err,
                p.rel_err,
                p.quad_err,
                p.error.clone().unwrap_or_default()
            ));
        }
        out
    }
}

pub fn inputs_of(pairs: &[(&str, Complex64)]) -> BTreeMap<String, Cx> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), Cx::from(*v)))
        .collect()
}
