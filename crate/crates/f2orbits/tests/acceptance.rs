//! End-to-end acceptance run. Prints one line per criterion and exits nonzero
//! if any of them fails.

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use f2orbits::export::to_json;
use f2orbits::Runner;
use f2orbits_core::actions::{generators, height_first, height_second, psi_height, ActionKind, ActionSpec};
use f2orbits_core::classify::{compare, predict_first, predict_second, PredictedCensus};
use f2orbits_core::f2la::{ArfClass, Echelon, F2Vector, PivotOrder, QuadraticSpace};
use f2orbits_core::lattice::{predict_census_nonspecial, Graph, LatticeSpec};
use f2orbits_core::orbits::OrbitCensus;
use f2orbits_core::tri::{self, TriMatrix, TriShape};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&mut Censuses) -> Outcome);

const BIG_RUN_LIMIT: Duration = Duration::from_secs(600);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ms(d: Duration) -> String {
    let ms = d.as_millis();
    format!("{}.{:03}s", ms / 1000, ms % 1000)
}

struct Censuses {
    runner: Runner,
    cache: HashMap<(usize, ActionKind), (OrbitCensus, Duration)>,
}

impl Censuses {
    fn get(&mut self, n: usize, kind: ActionKind) -> (&OrbitCensus, Duration) {
        let runner = &self.runner;
        let (c, t) = self.cache.entry((n, kind)).or_insert_with(|| {
            let spec = ActionSpec::new(n, kind).expect("valid order");
            let start = Instant::now();
            let census = runner.enumerate(&spec).expect("within guard");
            (census, start.elapsed())
        });
        (c, *t)
    }
}

fn multiset(pairs: &[(u64, usize)]) -> BTreeMap<u64, usize> {
    let mut m = BTreeMap::new();
    for &(card, count) in pairs {
        *m.entry(card).or_insert(0) += count;
    }
    m
}

fn full_match(census: &OrbitCensus, prediction: &PredictedCensus) -> Result<(), String> {
    let (checks, labelled) = compare(census, prediction);
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: expected {} observed {}", c.name, c.expected, c.observed))
        .collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    ensure(labelled.is_some(), || "orbits could not be labelled".into())
}

fn exceptional_counts(cs: &mut Censuses) -> Outcome {
    let start = Instant::now();
    let counts: Vec<usize> = (1..=4)
        .map(|n| cs.get(n, ActionKind::First).0.orbit_count())
        .collect();
    let elapsed = start.elapsed();
    ensure(counts == [2, 6, 20, 52], || format!("counts {counts:?}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {}", ms(elapsed)))?;
    Ok(format!("{counts:?} in {}", ms(elapsed)))
}

fn first_counts(cs: &mut Censuses) -> Outcome {
    let mut notes = Vec::new();
    for (n, expected) in [(5, 96), (6, 192), (7, 384)] {
        let (c, t) = cs.get(n, ActionKind::First);
        ensure(c.orbit_count() == expected, || {
            format!("n={n}: {} orbits, expected {expected}", c.orbit_count())
        })?;
        ensure(c.cardinality_sum() == 1 << c.dim, || format!("n={n}: not a partition"))?;
        ensure(t < BIG_RUN_LIMIT, || format!("n={n} took {}", ms(t)))?;
        notes.push(format!("n={n}: {expected} ({})", ms(t)));
    }
    Ok(notes.join(", "))
}

fn first_table(cs: &mut Censuses) -> Outcome {
    for n in 5..=7 {
        let prediction = predict_first(n).map_err(|e| e.to_string())?;
        full_match(cs.get(n, ActionKind::First).0, &prediction).map_err(|e| format!("n={n}: {e}"))?;
    }
    let n5 = cs.get(5, ActionKind::First).0.cardinality_multiset();
    let expected = multiset(&[(1, 32), (512, 48), (480, 8), (540, 8)]);
    ensure(n5 == expected, || format!("n=5 multiset {n5:?}"))?;
    Ok("n=5,6,7 multisets and strata match; n=5 is 32x1 48x512 8x480 8x540".into())
}

fn second_table(cs: &mut Censuses) -> Outcome {
    let mut t8 = Duration::ZERO;
    for n in 5..=8 {
        let prediction = predict_second(n).map_err(|e| e.to_string())?;
        let (c, t) = cs.get(n, ActionKind::Second);
        full_match(c, &prediction).map_err(|e| format!("n={n}: {e}"))?;
        t8 = t;
    }
    ensure(t8 < BIG_RUN_LIMIT, || format!("n=8 took {}", ms(t8)))?;
    let n5 = cs.get(5, ActionKind::Second).0.cardinality_multiset();
    ensure(n5 == multiset(&[(1, 1), (120, 1), (135, 1), (256, 3)]), || {
        format!("n=5 multiset {n5:?}")
    })?;
    let n6 = cs.get(6, ActionKind::Second).0.cardinality_multiset();
    ensure(
        n6 == multiset(&[(1, 1), (4095, 1), (2016, 1), (2080, 1), (4096, 6)]),
        || format!("n=6 multiset {n6:?}"),
    )?;
    Ok(format!("n=5..8 match (n=8 in {})", ms(t8)))
}

fn hex_space(n: usize) -> Result<QuadraticSpace, String> {
    let hex = tri::hex_graph(n).map_err(|e| e.to_string())?;
    Ok(QuadraticSpace::with_unit_values(hex.form()))
}

fn arf_schedule(_: &mut Censuses) -> Outcome {
    for (n, expected) in [(3, ArfClass::Arf1), (5, ArfClass::Arf0), (7, ArfClass::Arf0)] {
        let got = hex_space(n)?.arf();
        ensure(got == expected, || format!("n={n}: {got}, expected {expected}"))?;
    }
    for n in 2..=7 {
        let q = hex_space(n)?;
        let closed = q.value_counts_closed().map_err(|e| e.to_string())?;
        let brute = q.value_counts_brute().map_err(|e| e.to_string())?;
        ensure(closed == brute, || format!("n={n}: closed {closed:?} brute {brute:?}"))?;
    }
    let q9 = hex_space(9)?;
    let low = q9.arf_in(&q9.symplectic_reduce_with(PivotOrder::LowestFirst));
    let high = q9.arf_in(&q9.symplectic_reduce_with(PivotOrder::HighestFirst));
    ensure(low == ArfClass::Arf0 && high == ArfClass::Arf0, || {
        format!("n=9: {low} / {high}")
    })?;
    Ok(format!("Arf1 Arf0 Arf0; counts agree for n<=7; n=9 dim {} is Arf0", q9.dim()))
}

fn kernel_dimensions(_: &mut Censuses) -> Outcome {
    for n in 3..=9 {
        let form = tri::hex_graph(n).map_err(|e| e.to_string())?.form();
        let kappa = form.kernel_basis().len();
        ensure(kappa == n / 2, || format!("n={n}: kernel dim {kappa}"))?;
        let ps = tri::p_patterns(n).map_err(|e| format!("n={n}: {e}"))?;
        ensure(ps.len() == n / 2, || format!("n={n}: {} P-patterns", ps.len()))?;
        for (i, p) in ps.iter().enumerate() {
            let image = form.apply(p.data()).map_err(|e| e.to_string())?;
            ensure(image.is_zero(), || format!("n={n}: P{} is not in the kernel", i + 1))?;
        }
        let data: Vec<F2Vector> = ps.iter().map(|p| p.data().clone()).collect();
        let rank = Echelon::from_vectors(form.dim(), &data).rank();
        ensure(rank == n / 2, || format!("n={n}: P-patterns have rank {rank}"))?;
        let solved = tri::ptilde_from_heights(n).map_err(|e| e.to_string())?;
        for (i, s) in solved.iter().enumerate() {
            let built = tri::pattern_ptilde(n, i + 1).map_err(|e| e.to_string())?;
            ensure(&built == s, || format!("n={n}: ~P{} disagrees with the height solver", i + 1))?;
        }
    }
    Ok("kernel dim = floor(n/2) and P-patterns certified for n=3..9".into())
}

fn random_matrix(rng: &mut StdRng, n: usize) -> TriMatrix {
    let dim = TriShape::new(n).dim();
    let bits: u64 = rng.gen::<u64>() & ((1u64 << dim) - 1);
    TriMatrix::from_data(n, F2Vector::from_u64(dim, bits).unwrap()).unwrap()
}

fn equivariance(_: &mut Censuses) -> Outcome {
    const SAMPLES: usize = 10_000;
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let err = |e: f2orbits_core::Error| e.to_string();
    for n in 3..=8 {
        let first = ActionSpec::new(n, ActionKind::First).map_err(err)?;
        let conj = ActionSpec::new(n, ActionKind::FirstConjugate).map_err(err)?;
        let second = ActionSpec::new(n, ActionKind::Second).map_err(err)?;
        let gens = generators(n);
        for _ in 0..SAMPLES {
            let m = random_matrix(&mut rng, n);
            let s = random_matrix(&mut rng, n - 1);
            let hm = height_first(&m).map_err(err)?;
            let hs = height_second(&s).map_err(err)?;
            let pm = tri::psi(&m).map_err(err)?;
            let fm = tri::phi(&m).map_err(err)?;
            ensure(height_second(&pm).map_err(err)? == psi_height(&hm), || {
                format!("n={n}: height of psi(M) is not psi of the height for {m:?}")
            })?;
            for &g in &gens {
                let gm = first.apply(g, &m).map_err(err)?;
                ensure(tri::psi(&gm).map_err(err)? == second.apply(g, &pm).map_err(err)?, || {
                    format!("n={n} {g}: psi not equivariant")
                })?;
                ensure(
                    tri::phi(&conj.apply(g, &m).map_err(err)?).map_err(err)?
                        == second.apply(g, &fm).map_err(err)?,
                    || format!("n={n} {g}: phi not equivariant"),
                )?;
                ensure(height_first(&gm).map_err(err)? == hm, || {
                    format!("n={n} {g}: first-action height changed")
                })?;
                ensure(height_second(&second.apply(g, &s).map_err(err)?).map_err(err)? == hs, || {
                    format!("n={n} {g}: second-action height changed")
                })?;
            }
        }
    }
    Ok(format!("{SAMPLES} random states per order, n=3..8"))
}

fn nonspecial_oracle(_: &mut Censuses) -> Outcome {
    let graphs = [
        ("H4", Graph::hex(5).unwrap()),
        ("H5", Graph::hex(6).unwrap()),
        ("E6", Graph::e6()),
    ];
    let mut notes = Vec::new();
    for (name, g) in graphs {
        let spec = LatticeSpec::build_full(g).map_err(|e| e.to_string())?;
        let predicted = predict_census_nonspecial(&spec).map_err(|e| format!("{name}: {e}"))?;
        let observed = Runner::new(Some(1))
            .unwrap()
            .enumerate(&spec)
            .map_err(|e| e.to_string())?;
        let kappa = spec.qspace().kappa();
        ensure(observed.orbit_count() == (1 << kappa) + 2, || {
            format!("{name}: {} orbits, kappa {kappa}", observed.orbit_count())
        })?;
        ensure(predicted.orbit_count() == observed.orbit_count(), || {
            format!("{name}: predicted {} orbits", predicted.orbit_count())
        })?;
        ensure(
            predicted.cardinality_multiset() == observed.cardinality_multiset(),
            || format!("{name}: cardinalities differ"),
        )?;
        let singletons = |c: &OrbitCensus| {
            c.records
                .iter()
                .filter(|r| r.cardinality == 1)
                .map(|r| r.representative.clone())
                .collect::<Vec<_>>()
        };
        ensure(singletons(&predicted) == singletons(&observed), || {
            format!("{name}: kernel singletons differ")
        })?;
        notes.push(format!("{name}: {}", observed.orbit_count()));
    }
    Ok(notes.join(", "))
}

fn conjugate_counts(cs: &mut Censuses) -> Outcome {
    for n in 2..=6 {
        for kind in [ActionKind::First, ActionKind::Second] {
            let a = cs.get(n, kind).0.orbit_count();
            let b = cs.get(n, kind.conjugate()).0.orbit_count();
            ensure(a == b, || format!("{kind} n={n}: {a} vs {b}"))?;
        }
    }
    Ok("all four actions, n=2..6".into())
}

fn determinism(_: &mut Censuses) -> Outcome {
    let spec = ActionSpec::new(6, ActionKind::First).map_err(|e| e.to_string())?;
    let outputs: Vec<String> = [1, 2, 8]
        .iter()
        .map(|&t| to_json(&Runner::new(Some(t)).unwrap().enumerate(&spec).unwrap()))
        .collect();
    ensure(outputs.iter().all(|o| o == &outputs[0]), || "outputs differ".into())?;
    Ok(format!("{} bytes, identical for 1, 2 and 8 workers", outputs[0].len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exceptional counts n=1..4", exceptional_counts),
        ("first-action counts n=5,6,7", first_counts),
        ("first-action census n=5,6,7", first_table),
        ("second-action census n=5..8", second_table),
        ("Arf schedule", arf_schedule),
        ("kernel dimensions and P-patterns", kernel_dimensions),
        ("equivariance and heights", equivariance),
        ("nonspecial lattice oracle", nonspecial_oracle),
        ("conjugate orbit counts", conjugate_counts),
        ("determinism across worker counts", determinism),
    ];
    let mut cs = Censuses {
        runner: Runner::new(None).expect("worker pool"),
        cache: HashMap::new(),
    };
    println!("acceptance: {} workers", cs.runner.threads());
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut cs)))
            .unwrap_or_else(|_| Err("panicked".into()));
        let took = ms(start.elapsed());
        match outcome {
            Ok(detail) => println!("criterion {:>2} pass  {name}: {detail} [{took}]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{took}]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
