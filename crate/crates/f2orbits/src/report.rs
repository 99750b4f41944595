//! Verification and graph-job reports.

use std::fmt::Write as _;

use f2orbits_core::classify::{Check, VerifyReport};
use f2orbits_core::lattice::{
    check_vanishing, predict_census_nonspecial, LatticeSpec, VanishingReport,
};
use f2orbits_core::orbits::OrbitCensus;
use serde::Serialize;

use crate::export::CensusDoc;

#[derive(Serialize)]
pub struct CheckDoc<'a> {
    pub name: &'a str,
    pub pass: bool,
    pub expected: &'a str,
    pub observed: &'a str,
}

impl<'a> From<&'a Check> for CheckDoc<'a> {
    fn from(c: &'a Check) -> Self {
        CheckDoc {
            name: &c.name,
            pass: c.pass,
            expected: &c.expected,
            observed: &c.observed,
        }
    }
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    n: usize,
    kind: &'a str,
    mode: &'a str,
    pass: bool,
    checks: Vec<CheckDoc<'a>>,
    census: CensusDoc,
}

pub fn verify_json(report: &VerifyReport) -> String {
    let doc = VerifyDoc {
        n: report.n,
        kind: report.kind.name(),
        mode: report.mode.name(),
        pass: report.passed(),
        checks: report.checks.iter().map(CheckDoc::from).collect(),
        census: CensusDoc::from(&report.census),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Census of a graph lattice together with what can be said about it.
pub struct GraphReport {
    pub census: OrbitCensus,
    pub vanishing: Option<VanishingReport>,
    pub e6: Option<[usize; 6]>,
    /// The nonspecial prediction, or why it was not made.
    pub prediction: Result<OrbitCensus, String>,
    pub checks: Vec<Check>,
}

impl GraphReport {
    pub fn new(spec: &LatticeSpec, census: OrbitCensus) -> Self {
        let vanishing = check_vanishing(spec).ok();
        let e6 = spec.basis_graph().find_e6().map(|idx| idx.map(|i| spec.basis_subset()[i]));
        let prediction = predict_census_nonspecial(spec).map_err(|e| e.to_string());
        let mut checks = Vec::new();
        if let Ok(p) = &prediction {
            checks.push(Check::new(
                "orbit count",
                p.orbit_count().to_string(),
                census.orbit_count().to_string(),
            ));
            checks.push(Check::new(
                "cardinalities",
                format!("{:?}", p.cardinality_multiset()),
                format!("{:?}", census.cardinality_multiset()),
            ));
            let singletons = |c: &OrbitCensus| {
                c.records
                    .iter()
                    .filter(|r| r.cardinality == 1)
                    .map(|r| r.representative.to_hex())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            checks.push(Check::new("kernel singletons", singletons(p), singletons(&census)));
        }
        GraphReport {
            census,
            vanishing,
            e6,
            prediction,
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn text(&self, spec: &LatticeSpec) -> String {
        let mut out = String::new();
        let q = spec.qspace();
        let _ = writeln!(
            out,
            "graph: {} vertices, {} edges, |B| = {}, kernel dim {}",
            spec.dim(),
            spec.graph().edge_count(),
            spec.basis_subset().len(),
            q.kappa()
        );
        match &self.vanishing {
            Some(v) => {
                let _ = writeln!(
                    out,
                    "vanishing lattice: single orbit {}, generates {}, pairing {}",
                    v.orbit_ok, v.generates_ok, v.pair_ok
                );
            }
            None => {
                let _ = writeln!(out, "vanishing lattice: not checked (dimension too large)");
            }
        }
        match self.e6 {
            Some(idx) => {
                let names: Vec<String> = idx.iter().map(|&v| spec.graph().label(v)).collect();
                let _ = writeln!(out, "induced E6: {}", names.join(" "));
            }
            None => {
                let _ = writeln!(out, "induced E6: none");
            }
        }
        match &self.prediction {
            Ok(p) => {
                let _ = writeln!(out, "prediction: {} orbits", p.orbit_count());
                for c in &self.checks {
                    if c.pass {
                        let _ = writeln!(out, "  pass {}", c.name);
                    } else {
                        let _ = writeln!(
                            out,
                            "  FAIL {}: expected {}, observed {}",
                            c.name, c.expected, c.observed
                        );
                    }
                }
            }
            Err(why) => {
                let _ = writeln!(out, "prediction: none ({why})");
            }
        }
        out
    }

    pub fn json(&self, spec: &LatticeSpec) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            vertices: usize,
            edges: usize,
            basis: &'a [usize],
            kernel_dim: usize,
            vanishing: Option<[bool; 3]>,
            e6: Option<[usize; 6]>,
            prediction: Option<CensusDoc>,
            prediction_refusal: Option<&'a str>,
            pass: bool,
            checks: Vec<CheckDoc<'a>>,
            census: CensusDoc,
        }
        let doc = Doc {
            vertices: spec.dim(),
            edges: spec.graph().edge_count(),
            basis: spec.basis_subset(),
            kernel_dim: spec.qspace().kappa(),
            vanishing: self.vanishing.map(|v| [v.orbit_ok, v.generates_ok, v.pair_ok]),
            e6: self.e6,
            prediction: self.prediction.as_ref().ok().map(CensusDoc::from),
            prediction_refusal: self.prediction.as_ref().err().map(String::as_str),
            pass: self.passed(),
            checks: self.checks.iter().map(CheckDoc::from).collect(),
            census: CensusDoc::from(&self.census),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}
