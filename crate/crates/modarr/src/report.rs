//! Result documents shared by the text and JSON front ends.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bigint_serde;
use crate::chi::ChiCrossCheck;
use crate::error::Error;
use crate::io::canonical_text;
use crate::lattice::IntersectionLattice;
use crate::matrix::IntMatrix;
use crate::quasi::CharQuasiPolynomial;
use crate::verify::VerifyReport;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub rows: usize,
    pub cols: usize,
    /// SHA-256 of the canonical text form of the matrix.
    pub sha256: String,
}

impl InputDigest {
    pub fn new(path: &str, c: &IntMatrix) -> Self {
        InputDigest {
            path: path.to_string(),
            rows: c.rows(),
            cols: c.cols(),
            sha256: hex::encode(Sha256::digest(canonical_text(c).as_bytes())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    QuasiPolynomial {
        rho0: u64,
        #[serde(with = "bigint_serde::scalar")]
        rho_e: BigInt,
        minimum_period: u64,
        quasi_polynomial: CharQuasiPolynomial,
    },
    Chi {
        /// Ascending, constant term first.
        #[serde(with = "bigint_serde::vec")]
        coefficients: Vec<BigInt>,
        polynomial: String,
        factored: Option<String>,
        cross_check: Option<ChiCrossCheck>,
    },
    Count {
        q: u64,
        #[serde(with = "bigint_serde::scalar")]
        formula: BigInt,
        oracle: Option<u64>,
        agree: Option<bool>,
    },
    Lattice {
        lattice: IntersectionLattice,
        dot_path: Option<String>,
    },
    Verify {
        report: VerifyReport,
    },
    Error {
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub command: String,
    /// Options as given, in a fixed order.
    pub arguments: Vec<(String, String)>,
    pub input: Option<InputDigest>,
    pub payload: Payload,
    pub status: String,
    pub exit_code: i32,
}

impl ResultDocument {
    pub fn new(
        command: &str,
        arguments: Vec<(String, String)>,
        input: Option<InputDigest>,
        payload: Payload,
        exit_code: i32,
    ) -> Self {
        let status = match exit_code {
            0 => "ok",
            1 => "verification_failed",
            3 => "resource_cap",
            _ => "input_error",
        };
        ResultDocument {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            arguments,
            input,
            payload,
            status: status.to_string(),
            exit_code,
        }
    }

    pub fn from_error(
        command: &str,
        arguments: Vec<(String, String)>,
        input: Option<InputDigest>,
        err: &Error,
    ) -> Self {
        Self::new(
            command,
            arguments,
            input,
            Payload::Error {
                message: err.to_string(),
            },
            err.exit_code(),
        )
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    /// Human-readable rendering.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        match &self.payload {
            Payload::QuasiPolynomial {
                rho0,
                rho_e,
                minimum_period,
                quasi_polynomial,
            } => {
                let _ = writeln!(out, "rho0 = {rho0}");
                let _ = writeln!(out, "rhoE = {rho_e}");
                let _ = writeln!(out, "minimum period = {minimum_period}");
                for d in quasi_polynomial.classes() {
                    let p = quasi_polynomial.constituent(d).expect("class exists");
                    let _ = writeln!(out, "gcd(rho0, q) = {d}: {}", p.display("q"));
                }
            }
            Payload::Chi {
                polynomial,
                factored,
                cross_check,
                ..
            } => {
                let _ = writeln!(out, "chi(t) = {polynomial}");
                if let Some(f) = factored {
                    let _ = writeln!(out, "       = {f}");
                }
                if let Some(c) = cross_check {
                    let _ = writeln!(
                        out,
                        "interpolation through q = {:?} (counts {:?}): {}",
                        c.nodes,
                        c.counts,
                        if c.agrees { "agrees" } else { "DISAGREES" }
                    );
                }
            }
            Payload::Count {
                q,
                formula,
                oracle,
                agree,
            } => {
                let _ = writeln!(out, "|M(A_{q})| = {formula}");
                if let (Some(o), Some(a)) = (oracle, agree) {
                    let _ = writeln!(
                        out,
                        "oracle = {o} ({})",
                        if *a { "agree" } else { "DISAGREE" }
                    );
                }
            }
            Payload::Lattice { lattice, dot_path } => {
                let _ = writeln!(out, "q = {}: {} flats", lattice.q, lattice.flats.len());
                for (i, f) in lattice.flats.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "  [{i}] closure {} generator {} |H| = {}",
                        f.closure, f.generator, f.cardinality
                    );
                }
                let covers: Vec<String> = lattice
                    .covers
                    .iter()
                    .map(|(a, b)| format!("{a}<{b}"))
                    .collect();
                let _ = writeln!(out, "covers: {}", covers.join(" "));
                if let Some(p) = dot_path {
                    let _ = writeln!(out, "dot written to {p}");
                }
            }
            Payload::Verify { report } => {
                let _ = writeln!(out, "q_max = {}", report.q_max);
                for c in &report.checks {
                    let tag = match (c.passed, c.skipped) {
                        (_, true) => "SKIP",
                        (true, false) => "PASS",
                        (false, false) => "FAIL",
                    };
                    let _ = writeln!(out, "[{tag}] {}: {}", c.name, c.detail);
                    if let Some(cx) = &c.counterexample {
                        let _ = writeln!(out, "       counterexample: {cx}");
                    }
                }
            }
            Payload::Error { message } => {
                let _ = writeln!(out, "error: {message}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::Arrangement;
    use crate::lattice::build_lattice;
    use crate::quasi::char_quasi_poly;

    fn example() -> Arrangement {
        Arrangement::new(IntMatrix::from_rows(&[[1, 1, -2], [-1, 1, 1]])).unwrap()
    }

    fn round_trip(doc: &ResultDocument) {
        let back: ResultDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(&back, doc);
    }

    #[test]
    fn quasi_polynomial_round_trip() {
        let arr = example();
        let qp = char_quasi_poly(&arr).unwrap();
        let input = InputDigest::new("example.txt", arr.matrix());
        let doc = ResultDocument::new(
            "quasipoly",
            vec![],
            Some(input),
            Payload::QuasiPolynomial {
                rho0: 6,
                rho_e: BigInt::from(6),
                minimum_period: 6,
                quasi_polynomial: qp,
            },
            0,
        );
        round_trip(&doc);
        let text = doc.render_text();
        assert!(text.contains("gcd(rho0, q) = 1: q^2 - 3q + 2"));
        assert!(text.contains("gcd(rho0, q) = 6: q^2 - 3q + 5"));
    }

    #[test]
    fn lattice_round_trip() {
        let lattice = build_lattice(&example(), 12).unwrap();
        let doc = ResultDocument::new(
            "lattice",
            vec![("q".into(), "12".into())],
            None,
            Payload::Lattice {
                lattice,
                dot_path: None,
            },
            0,
        );
        round_trip(&doc);
    }

    #[test]
    fn digest_is_stable() {
        let a = InputDigest::new("x", &IntMatrix::from_rows(&[[1, 1, -2], [-1, 1, 1]]));
        let b = InputDigest::new(
            "x",
            &crate::io::parse_matrix("# c\n2 3\n1  1 -2\n-1 1 1\n").unwrap(),
        );
        assert_eq!(a, b);
        assert_eq!(a.sha256.len(), 64);
    }

    #[test]
    fn error_documents() {
        let doc = ResultDocument::from_error("chi", vec![], None, &Error::ZeroColumn { column: 2 });
        assert_eq!(doc.exit_code, 2);
        assert_eq!(doc.status, "input_error");
        assert_eq!(doc.render_text(), "error: column 2 is zero\n");
        round_trip(&doc);
    }
}
