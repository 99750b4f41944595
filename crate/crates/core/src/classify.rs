//! Closed-form orbit censuses, orbit labels and prediction-vs-enumeration
//! reports.
//!
//! With `k = floor(n/2)` and `eps = epsilon(k)` the first action has, per
//! stratum of height `h`:
//!
//! * `n = 2k+1`, `h` symmetric: `2^k` fixed points, one orbit of
//!   `(2^{k^2} - eps) 2^{k^2+k-1}` (type 1) and one of
//!   `(2^{k^2} - eps)(2^{k^2-1} + eps) 2^k` (type 2); otherwise two orbits of
//!   `2^{2k^2+k-1}`.
//! * `n = 2k`, `h` symmetric: `2^k` fixed points and two orbits of
//!   `(2^{2k(k-1)} - 1) 2^{k-1}` (type 3); `h - hbar` symmetric, where `hbar`
//!   starts `1,0,1,0,..` over its first half and vanishes on the second: one
//!   orbit each of `(2^{k(k-1)} -+ 1) 2^{k^2-1}` (types 4 and 5); otherwise two
//!   orbits of `2^{2k^2-k-1}`.
//!
//! The second action has one stratum per height `eta` of length `k`:
//!
//! * `n = 2k+1`: at `eta = 0` a fixed point and orbits of
//!   `(2^{k^2} - eps) 2^{k^2-1}` (type 1) and `(2^{k^2} - eps)(2^{k^2-1} + eps)`
//!   (type 2); every other stratum is one orbit of `2^{2k^2}`.
//! * `n = 2k`: at `eta = 0` a fixed point and one orbit of `2^{2k(k-1)} - 1`
//!   (type 3); at `etabar = (1,..,1,k mod 2)` orbits of
//!   `(2^{k(k-1)} -+ 1) 2^{k(k-1)-1}` (types 4 and 5); every other stratum is
//!   one orbit of `2^{2k(k-1)}`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::actions::{psi_height, ActionKind, ActionSpec, Height};
use crate::error::{Error, Result};
use crate::orbits::{
    action_orbit_of, enumerate, CosetPlan, MaskAction, OrbitCensus, OrbitType, SpecDescriptor,
};
use crate::tri::{self, TriMatrix, TriShape};

/// Smallest order with a closed-form census.
pub const PREDICTION_MIN_ORDER: usize = 5;
/// Largest order whose census sizes fit the integer types used here.
pub const PREDICTION_MAX_ORDER: usize = 15;

/// `-1` if `k = 1 mod 4`, else `1`.
pub fn epsilon(k: usize) -> i128 {
    if k % 4 == 1 {
        -1
    } else {
        1
    }
}

/// Number of orbits of the first action on `T^n`, indexed by `n + 1`.
///
/// # Panics
/// If `n_plus_1 < 2` or the value does not fit in `u128`.
pub fn sharp(n_plus_1: usize) -> u128 {
    match n_plus_1 {
        0 | 1 => panic!("sharp is defined from 2 on"),
        2 => 2,
        3 => 6,
        4 => 20,
        5 => 52,
        m => {
            assert!(m <= 126, "sharp({m}) overflows");
            3u128 << (m - 1)
        }
    }
}

fn p2(e: usize) -> i128 {
    1i128 << e
}

fn positive(v: i128) -> u128 {
    u128::try_from(v).expect("orbit sizes are positive")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PredictedRow {
    pub label: OrbitType,
    pub cardinality: u128,
    pub orbit_count: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StratumEntry {
    pub label: OrbitType,
    pub cardinality: u128,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictedCensus {
    pub n: usize,
    pub kind: ActionKind,
    /// One row per orbit type, in type order.
    pub rows: Vec<PredictedRow>,
    /// Every height, with the orbits of its stratum.
    pub layout: BTreeMap<Height, Vec<StratumEntry>>,
}

fn entry(label: OrbitType, cardinality: i128, count: u64) -> StratumEntry {
    StratumEntry {
        label,
        cardinality: positive(cardinality),
        count,
    }
}

fn check_order(n: usize) -> Result<()> {
    if n < PREDICTION_MIN_ORDER {
        return Err(Error::NoClosedForm { n });
    }
    if n > PREDICTION_MAX_ORDER {
        return Err(Error::OrderTooLarge {
            n,
            max: PREDICTION_MAX_ORDER,
        });
    }
    Ok(())
}

/// `hbar`: `1,0,1,0,..` over the first `n/2` entries, then zeros.
pub fn hbar(n: usize) -> Height {
    let bits: Vec<bool> = (0..n).map(|i| i < n / 2 && i % 2 == 0).collect();
    Height::from_bits(&bits)
}

/// `etabar`: `k-1` ones followed by `k mod 2`.
pub fn etabar(k: usize) -> Height {
    let bits: Vec<bool> = (0..k).map(|i| i + 1 < k || k % 2 == 1).collect();
    Height::from_bits(&bits)
}

fn xor(a: &Height, b: &Height) -> Height {
    let mut v = a.0.clone();
    v.add_assign(&b.0);
    Height(v)
}

/// Closed-form census of the first action, `5 <= n <= 15`.
pub fn predict_first(n: usize) -> Result<PredictedCensus> {
    check_order(n)?;
    let k = n / 2;
    let eps = epsilon(k);
    let hb = hbar(n);
    let layout = Height::all(n)
        .map(|h| {
            let entries = if n % 2 == 1 {
                if h.is_symmetric() {
                    alloc::vec![
                        entry(OrbitType::Trivial, 1, 1 << k),
                        entry(OrbitType::Type1, (p2(k * k) - eps) * p2(k * k + k - 1), 1),
                        entry(
                            OrbitType::Type2,
                            (p2(k * k) - eps) * (p2(k * k - 1) + eps) * p2(k),
                            1,
                        ),
                    ]
                } else {
                    alloc::vec![entry(OrbitType::Standard, p2(2 * k * k + k - 1), 2)]
                }
            } else if h.is_symmetric() {
                alloc::vec![
                    entry(OrbitType::Trivial, 1, 1 << k),
                    entry(OrbitType::Type3, (p2(2 * k * (k - 1)) - 1) * p2(k - 1), 2),
                ]
            } else if xor(&h, &hb).is_symmetric() {
                alloc::vec![
                    entry(OrbitType::Type4, (p2(k * (k - 1)) - 1) * p2(k * k - 1), 1),
                    entry(OrbitType::Type5, (p2(k * (k - 1)) + 1) * p2(k * k - 1), 1),
                ]
            } else {
                alloc::vec![entry(OrbitType::Standard, p2(2 * k * k - k - 1), 2)]
            };
            (h, entries)
        })
        .collect();
    Ok(PredictedCensus::from_layout(n, ActionKind::First, layout))
}

/// Closed-form census of the second action, `5 <= n <= 15`.
pub fn predict_second(n: usize) -> Result<PredictedCensus> {
    check_order(n)?;
    let k = n / 2;
    let eps = epsilon(k);
    let eb = etabar(k);
    let layout = Height::all(k)
        .map(|h| {
            let zero = h.0.is_zero();
            let entries = if n % 2 == 1 {
                if zero {
                    alloc::vec![
                        entry(OrbitType::Trivial, 1, 1),
                        entry(OrbitType::Type1, (p2(k * k) - eps) * p2(k * k - 1), 1),
                        entry(OrbitType::Type2, (p2(k * k) - eps) * (p2(k * k - 1) + eps), 1),
                    ]
                } else {
                    alloc::vec![entry(OrbitType::Standard, p2(2 * k * k), 1)]
                }
            } else if zero {
                alloc::vec![
                    entry(OrbitType::Trivial, 1, 1),
                    entry(OrbitType::Type3, p2(2 * k * (k - 1)) - 1, 1),
                ]
            } else if h == eb {
                let m = k * (k - 1);
                alloc::vec![
                    entry(OrbitType::Type4, (p2(m) - 1) * p2(m - 1), 1),
                    entry(OrbitType::Type5, (p2(m) + 1) * p2(m - 1), 1),
                ]
            } else {
                alloc::vec![entry(OrbitType::Standard, p2(2 * k * (k - 1)), 1)]
            };
            (h, entries)
        })
        .collect();
    Ok(PredictedCensus::from_layout(n, ActionKind::Second, layout))
}

/// Closed-form census for the first or second action.
pub fn predict(n: usize, kind: ActionKind) -> Result<PredictedCensus> {
    match kind {
        ActionKind::First => predict_first(n),
        ActionKind::Second => predict_second(n),
        _ => Err(Error::NoHeights(kind.name())),
    }
}

impl PredictedCensus {
    fn from_layout(
        n: usize,
        kind: ActionKind,
        layout: BTreeMap<Height, Vec<StratumEntry>>,
    ) -> Self {
        let mut agg: BTreeMap<OrbitType, (u128, u128)> = BTreeMap::new();
        for e in layout.values().flatten() {
            let slot = agg.entry(e.label).or_insert((e.cardinality, 0));
            assert_eq!(slot.0, e.cardinality, "one cardinality per orbit type");
            slot.1 += e.count as u128;
        }
        let rows = agg
            .into_iter()
            .map(|(label, (cardinality, orbit_count))| PredictedRow {
                label,
                cardinality,
                orbit_count,
            })
            .collect();
        PredictedCensus {
            n,
            kind,
            rows,
            layout,
        }
    }

    pub fn state_dim(&self) -> usize {
        TriShape::new(self.kind.state_order(self.n)).dim()
    }

    pub fn orbit_total(&self) -> u128 {
        self.rows.iter().map(|r| r.orbit_count).sum()
    }

    pub fn cardinality_total(&self) -> u128 {
        self.rows.iter().map(|r| r.cardinality * r.orbit_count).sum()
    }

    /// The orbit count the census must reach: `sharp(n+1)` for the first
    /// action and `2^k + 2` for the second.
    pub fn claimed_orbit_total(&self) -> u128 {
        match self.kind {
            ActionKind::First => sharp(self.n + 1),
            _ => (1u128 << (self.n / 2)) + 2,
        }
    }

    pub fn row(&self, label: OrbitType) -> Option<&PredictedRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn stratum(&self, h: &Height) -> Option<&[StratumEntry]> {
        self.layout.get(h).map(Vec::as_slice)
    }

    /// Cardinality -> number of orbits.
    pub fn cardinality_multiset(&self) -> BTreeMap<u128, u128> {
        let mut out = BTreeMap::new();
        for r in &self.rows {
            *out.entry(r.cardinality).or_insert(0) += r.orbit_count;
        }
        out
    }

    /// Problems with the census's own arithmetic (empty if consistent).
    pub fn consistency_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let total = 1u128 << self.state_dim();
        if self.cardinality_total() != total {
            out.push(format!(
                "orbit sizes sum to {}, expected 2^{} = {total}",
                self.cardinality_total(),
                self.state_dim()
            ));
        }
        if self.orbit_total() != self.claimed_orbit_total() {
            out.push(format!(
                "{} orbits, expected {}",
                self.orbit_total(),
                self.claimed_orbit_total()
            ));
        }
        let stratum_size = total >> self.layout.keys().next().map_or(0, Height::len);
        for (h, entries) in &self.layout {
            let s: u128 = entries.iter().map(|e| e.cardinality * e.count as u128).sum();
            if s != stratum_size {
                out.push(format!("stratum {h} holds {s} states, expected {stratum_size}"));
            }
        }
        let parity_ok = self.rows.iter().all(|r| r.label.allowed_for(self.n));
        if !parity_ok {
            out.push(String::from("orbit type used for the wrong parity of n"));
        }
        out
    }
}

impl OrbitType {
    /// Types 1 and 2 occur only for odd `n`, types 3 to 5 only for even `n`.
    pub fn allowed_for(self, n: usize) -> bool {
        match self {
            OrbitType::Type1 | OrbitType::Type2 => n % 2 == 1,
            OrbitType::Type3 | OrbitType::Type4 | OrbitType::Type5 => n.is_multiple_of(2),
            _ => true,
        }
    }
}

fn same_action(census: &OrbitCensus, prediction: &PredictedCensus) -> bool {
    census.descriptor
        == SpecDescriptor::Action {
            n: prediction.n,
            kind: prediction.kind,
        }
}

/// Tags every record with the type of the predicted orbit of its stratum
/// that has its cardinality.
pub fn label_orbits(census: &OrbitCensus, prediction: &PredictedCensus) -> Result<OrbitCensus> {
    if !same_action(census, prediction) {
        return Err(Error::SpecMismatch);
    }
    let mut out = census.clone();
    for r in &mut out.records {
        let h = r
            .height
            .as_ref()
            .ok_or_else(|| Error::Labelling(format!("orbit of {} has no height", r.representative)))?;
        let entries = prediction
            .stratum(h)
            .ok_or_else(|| Error::Labelling(format!("no predicted stratum at height {h}")))?;
        let mut labels: Vec<OrbitType> = entries
            .iter()
            .filter(|e| e.cardinality == r.cardinality as u128)
            .map(|e| e.label)
            .collect();
        labels.dedup();
        match labels.as_slice() {
            [label] if label.allowed_for(prediction.n) => r.label = Some(*label),
            [] => {
                return Err(Error::Labelling(format!(
                    "no predicted orbit of size {} at height {h}",
                    r.cardinality
                )))
            }
            _ => {
                return Err(Error::Labelling(format!(
                    "orbit of size {} at height {h} matches several types",
                    r.cardinality
                )))
            }
        }
    }
    Ok(out)
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub expected: String,
    pub observed: String,
}

impl Check {
    pub fn new(name: &str, expected: String, observed: String) -> Self {
        Check {
            name: String::from(name),
            pass: expected == observed,
            expected,
            observed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Compared against a closed-form census.
    Predicted,
    /// No closed form applies; the observed census is reported.
    Observed,
}

impl VerifyMode {
    pub fn name(self) -> &'static str {
        match self {
            VerifyMode::Predicted => "predicted",
            VerifyMode::Observed => "observed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub n: usize,
    pub kind: ActionKind,
    pub mode: VerifyMode,
    pub checks: Vec<Check>,
    /// The enumerated census, labelled when labelling succeeded.
    pub census: OrbitCensus,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "verify {} n={} mode={} orbits={} states={}",
            self.kind,
            self.n,
            self.mode.name(),
            self.census.orbit_count(),
            self.census.total_states
        )?;
        for c in &self.checks {
            if c.pass {
                writeln!(f, "  pass {}: {}", c.name, c.observed)?;
            } else {
                writeln!(
                    f,
                    "  FAIL {}: expected {}, observed {}",
                    c.name, c.expected, c.observed
                )?;
            }
        }
        write!(f, "result: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

fn multiset_string<K: fmt::Display, V: fmt::Display>(m: impl IntoIterator<Item = (K, V)>) -> String {
    let parts: Vec<String> = m.into_iter().map(|(c, k)| format!("{k}x{c}")).collect();
    parts.join(" ")
}

fn partition_check(census: &OrbitCensus) -> Check {
    Check::new(
        "partition",
        format!("{}", census.total_states),
        format!("{}", census.cardinality_sum()),
    )
}

/// Compares an enumerated census with a prediction; returns the checks and
/// the labelled census when labelling succeeds.
pub fn compare(census: &OrbitCensus, prediction: &PredictedCensus) -> (Vec<Check>, Option<OrbitCensus>) {
    let mut checks = Vec::new();
    let problems = prediction.consistency_problems();
    checks.push(Check::new(
        "prediction consistency",
        String::from("consistent"),
        if problems.is_empty() {
            String::from("consistent")
        } else {
            problems.join("; ")
        },
    ));
    checks.push(partition_check(census));
    checks.push(Check::new(
        "orbit count",
        format!("{}", prediction.orbit_total()),
        format!("{}", census.orbit_count()),
    ));
    checks.push(Check::new(
        "cardinalities",
        multiset_string(prediction.cardinality_multiset()),
        multiset_string(census.cardinality_multiset()),
    ));

    let observed = census.by_height();
    let mut stratum_diffs = Vec::new();
    for (h, entries) in &prediction.layout {
        let mut want: BTreeMap<u128, u64> = BTreeMap::new();
        for e in entries {
            *want.entry(e.cardinality).or_insert(0) += e.count;
        }
        let mut got: BTreeMap<u128, u64> = BTreeMap::new();
        for r in observed.get(h).into_iter().flatten() {
            *got.entry(r.cardinality as u128).or_insert(0) += 1;
        }
        if want != got {
            stratum_diffs.push(format!(
                "{h}: expected [{}] observed [{}]",
                multiset_string(want),
                multiset_string(got)
            ));
        }
    }
    let extra = observed
        .keys()
        .filter(|h| !prediction.layout.contains_key(h))
        .count();
    if extra > 0 {
        stratum_diffs.push(format!("{extra} unexpected heights"));
    }
    checks.push(Check::new(
        "strata",
        format!("{} strata as predicted", prediction.layout.len()),
        if stratum_diffs.is_empty() {
            format!("{} strata as predicted", prediction.layout.len())
        } else {
            stratum_diffs.truncate(8);
            stratum_diffs.join("; ")
        },
    ));

    let labelled = label_orbits(census, prediction);
    let expected_types = multiset_string(prediction.rows.iter().map(|r| (r.label, r.orbit_count)));
    let (observed_types, labelled) = match labelled {
        Ok(c) => {
            let mut counts: BTreeMap<OrbitType, u128> = BTreeMap::new();
            for r in &c.records {
                *counts.entry(r.label.expect("labelled")).or_insert(0) += 1;
            }
            (multiset_string(counts), Some(c))
        }
        Err(e) => (format!("{e}"), None),
    };
    checks.push(Check::new("types", expected_types, observed_types));
    (checks, labelled)
}

/// Enumerates `(n, kind)` serially and checks it.
pub fn verify(n: usize, kind: ActionKind) -> Result<VerifyReport> {
    verify_with(n, kind, enumerate)
}

/// As [`verify`], with a caller-supplied enumerator.
///
/// First and second actions with `n >= 5` are compared against the closed
/// forms. Otherwise the observed census is reported, with the orbit count
/// checked against `sharp(n+1)` for the first action and against the count
/// of the unconjugated action for the conjugate kinds.
pub fn verify_with<F>(n: usize, kind: ActionKind, mut enumerate: F) -> Result<VerifyReport>
where
    F: FnMut(&ActionSpec) -> Result<OrbitCensus>,
{
    let spec = ActionSpec::new(n, kind)?;
    let census = enumerate(&spec)?;
    if kind.has_heights() && n >= PREDICTION_MIN_ORDER {
        let prediction = predict(n, kind)?;
        let (checks, labelled) = compare(&census, &prediction);
        return Ok(VerifyReport {
            n,
            kind,
            mode: VerifyMode::Predicted,
            checks,
            census: labelled.unwrap_or(census),
        });
    }
    let mut checks = alloc::vec![partition_check(&census)];
    match kind {
        ActionKind::First => checks.push(Check::new(
            "orbit count",
            format!("{}", sharp(n + 1)),
            format!("{}", census.orbit_count()),
        )),
        ActionKind::FirstConjugate | ActionKind::SecondConjugate => {
            let other = enumerate(&ActionSpec::new(n, kind.conjugate())?)?;
            checks.push(Check::new(
                "orbit count matches the unconjugated action",
                format!("{}", other.orbit_count()),
                format!("{}", census.orbit_count()),
            ));
        }
        ActionKind::Second => {}
    }
    Ok(VerifyReport {
        n,
        kind,
        mode: VerifyMode::Observed,
        checks,
        census,
    })
}

/// For every orbit type and second-action height `eta`: the first-action
/// states of that type over the strata `h` with `psi(h) = eta` number exactly
/// `2^n` times the second-action states of that type at `eta`, since `Psi`
/// is onto with an `n`-dimensional kernel and preserves orbit types.
pub fn covering_coherence(n: usize) -> Result<Check> {
    let first = predict_first(n)?;
    let second = predict_second(n)?;
    let mut lhs: BTreeMap<(Height, OrbitType), u128> = BTreeMap::new();
    for (h, entries) in &first.layout {
        let eta = psi_height(h);
        for e in entries {
            *lhs.entry((eta.clone(), e.label)).or_insert(0) += e.cardinality * e.count as u128;
        }
    }
    let mut rhs: BTreeMap<(Height, OrbitType), u128> = BTreeMap::new();
    for (eta, entries) in &second.layout {
        for e in entries {
            *rhs.entry((eta.clone(), e.label)).or_insert(0) +=
                (e.cardinality * e.count as u128) << n;
        }
    }
    let mismatches: Vec<String> = lhs
        .keys()
        .chain(rhs.keys())
        .collect::<alloc::collections::BTreeSet<_>>()
        .into_iter()
        .filter(|key| lhs.get(key) != rhs.get(key))
        .map(|(eta, label)| format!("{label} at {eta}"))
        .collect();
    let ok = String::from("every type and height agrees");
    Ok(Check::new(
        "covering coherence",
        ok.clone(),
        if mismatches.is_empty() {
            ok
        } else {
            mismatches.join(", ")
        },
    ))
}

/// Sends each labelled first-action orbit through `Psi` and checks that it
/// lands in a second-action orbit with the same label.
pub fn check_label_transport(first: &OrbitCensus, second: &OrbitCensus) -> Result<Check> {
    let (n, n2) = match (&first.descriptor, &second.descriptor) {
        (
            SpecDescriptor::Action {
                n,
                kind: ActionKind::First,
            },
            SpecDescriptor::Action {
                n: n2,
                kind: ActionKind::Second,
            },
        ) => (*n, *n2),
        _ => return Err(Error::SpecMismatch),
    };
    if n != n2 {
        return Err(Error::SpecMismatch);
    }
    let plan = CosetPlan::new(MaskAction::from_action(&ActionSpec::new(n, ActionKind::Second)?)?);
    let mut bad = Vec::new();
    for r in &first.records {
        let m = TriMatrix::from_data(n, r.representative.clone())?;
        let image = tri::psi(&m)?;
        let orbit = action_orbit_of(&plan, image.data())?;
        let target = second
            .find(&orbit.representative)
            .ok_or_else(|| Error::Labelling(format!("no orbit with representative {}", orbit.representative)))?;
        if target.label.is_none() || target.label != r.label {
            bad.push(format!(
                "{} ({:?}) -> {} ({:?})",
                r.representative.to_hex(),
                r.label,
                target.representative.to_hex(),
                target.label
            ));
        }
    }
    let expected = format!("{} orbits keep their type", first.orbit_count());
    Ok(Check::new(
        "label transport",
        expected.clone(),
        if bad.is_empty() {
            expected
        } else {
            bad.truncate(8);
            bad.join("; ")
        },
    ))
}
