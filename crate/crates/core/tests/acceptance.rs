//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cohft_core::chern::{moduli_dimension, ChernEngine};
use cohft_core::fusion::{semisimple_decomposition, validate, FusionDatum};
use cohft_core::graphs::{canonical_form, enumerate, StableGraph};
use cohft_core::lattice::{conformal_dimension, discriminant_group, fusion_datum_from_gram, GramLattice};
use cohft_core::ranks::{rank_semisimple_with, RankQuery, RankTable};
use cohft_core::scalar::{factorial, rational_pow};
use cohft_core::taut::Generator;
use cohft_core::{QClass, Rational};
use common::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

/// Queries collected from criteria 1 to 3 for the semisimple comparison.
#[derive(Default)]
struct Queries(Vec<(usize, u32, Vec<usize>, u64)>);

struct Data {
    /// `[[2]]`, `A_2`, `[[4]]`, `A_4`, `[[6]]`
    lattices: Vec<(&'static str, FusionDatum)>,
}

impl Data {
    fn new() -> Self {
        Self {
            lattices: vec![
                ("[[2]]", z2()),
                ("A2", z3()),
                ("[[4]]", lattice_datum(&[&[4]])),
                ("A4", z5()),
                ("[[6]]", lattice_datum(&[&[6]])),
            ],
        }
    }
}

fn criterion_1(data: &Data, qs: &mut Queries) -> Outcome {
    let start = Instant::now();
    let d = &data.lattices[0].1;
    let t = RankTable::new(d);
    let mut checked = 0;
    for g in 0..=3u32 {
        for p in 0..=6usize {
            for qn in 0..=(6 - p) {
                if 2 * g as i64 - 2 + (p + qn) as i64 <= 0 {
                    continue;
                }
                let mut ms = vec![0; p];
                ms.extend(vec![1; qn]);
                let r = t.rank(g, &ms).map_err(|e| e.to_string())?;
                let expected = if qn % 2 == 0 { 1u64 << g } else { 0 };
                ensure!(r == expected, "g={g} p={p} q={qn}: {r} != {expected}");
                qs.0.push((0, g, ms, r));
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{checked} ranks of [[2]] equal 2^g [q even] ({elapsed:.2?})"))
}

fn criterion_2(data: &Data, qs: &mut Queries) -> Outcome {
    let mut checked = 0;
    for (slot, m) in [(0usize, 2usize), (1, 3), (2, 4), (3, 5)] {
        let (name, d) = &data.lattices[slot];
        ensure!(d.len() == m, "{name} has {} modules", d.len());
        let t = RankTable::new(d);
        for (g, n) in stable_types(2, 5) {
            for ms in multisets(m, n) {
                // module index j is the residue j
                let sum: usize = ms.iter().sum();
                let expected = if sum % m == 0 { (m as u64).pow(g) } else { 0 };
                let r = t.rank(g, &ms).map_err(|e| e.to_string())?;
                ensure!(r == expected, "{name} g={g} {ms:?}: {r} != {expected}");
                qs.0.push((slot, g, ms, r));
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} ranks follow m^g [sum j n_j = 0 mod m] for m = 2, 3, 4, 5"))
}

fn criterion_3(data: &Data, qs: &mut Queries) -> Outcome {
    for slot in [0usize, 2, 4, 1] {
        let (name, d) = &data.lattices[slot];
        let t = RankTable::new(d);
        let r = t.rank(1, &[d.unit()]).map_err(|e| e.to_string())?;
        ensure!(r == d.len() as u64, "{name}: rank_1(V) = {r}, |W| = {}", d.len());
        qs.0.push((slot, 1, vec![d.unit()], r));
        for a in 0..d.len() {
            for b in 0..d.len() {
                let r = t.rank(0, &[a, b, d.unit()]).map_err(|e| e.to_string())?;
                ensure!(r == u64::from(b == d.dual(a)), "{name}: rank_0({a},{b},V) = {r}");
                qs.0.push((slot, 0, vec![a, b, d.unit()], r));
            }
        }
    }
    Ok("rank_1(V) = |W| for [[2]], [[4]], [[6]], A2; three-point delta rule holds".into())
}

fn criterion_4(data: &Data, qs: &Queries) -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_value = 0.0f64;
    for (slot, (name, d)) in data.lattices.iter().enumerate() {
        let ss = semisimple_decomposition::<f64>(d, 1e-9).map_err(|e| e.to_string())?;
        let root = (d.len() as f64).sqrt();
        for v in &ss.values {
            let err = (v.re - root).hypot(v.im);
            worst_value = worst_value.max(err);
            ensure!(err <= 1e-9, "{name}: semisimple value {v} vs sqrt({})", d.len());
        }
        for (_, g, ms, exact) in qs.0.iter().filter(|q| q.0 == slot) {
            let approx = rank_semisimple_with(d, &ss, &RankQuery::new(*g, ms).map_err(|e| e.to_string())?);
            let err = (approx - *exact as f64).abs();
            worst = worst.max(err);
            ensure!(err <= 1e-6, "{name} g={g} {ms:?}: {approx} vs {exact}");
        }
    }
    Ok(format!(
        "{} queries within 1e-6 (worst {worst:.1e}); values sqrt(m) within 1e-9 (worst {worst_value:.1e})",
        qs.0.len()
    ))
}

/// Checks criteria 5 and 7 together since they share the full Chern character.
fn criteria_5_and_7(data: &Data) -> (Outcome, Outcome) {
    let start = Instant::now();
    let holo = FusionDatum::holomorphic(q(8, 1));
    let targets: Vec<(&str, &FusionDatum)> =
        vec![("Z/2", &data.lattices[0].1), ("Z/3", &data.lattices[1].1), ("holomorphic", &holo)];
    let mut configs = 0;
    let mut deg1 = Ok(());
    let mut smooth = Ok(());
    for (name, d) in targets {
        let e = ChernEngine::new(d);
        for (g, n) in stable_types(2, 4) {
            // formal degree 1 where the moduli space is a point
            let depth = moduli_dimension(g, n).max(1);
            for ms in multisets(d.len(), n) {
                let full: QClass = match e.chern_character_formal(g, &ms, depth) {
                    Ok(c) => c,
                    Err(err) => return (Err(err.to_string()), Err("not reached".into())),
                };
                let closed: QClass = match e.first_chern_closed_form(g, &ms) {
                    Ok(c) => c,
                    Err(err) => return (Err(err.to_string()), Err("not reached".into())),
                };
                if deg1.is_ok() && full.degree_part(1) != closed.degree_part(1) {
                    deg1 = Err(format!("{name} g={g} {ms:?}"));
                }
                let expected: QClass = e.chern_smooth_formal(g, &ms, depth).expect("same input");
                if smooth.is_ok() && full.restrict_to_smooth() != expected {
                    smooth = Err(format!("{name} g={g} {ms:?}"));
                }
                configs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let five = deg1.map_err(|w| format!("degree-1 mismatch at {w}")).and_then(|_| {
        if elapsed < Duration::from_secs(300) {
            Ok(format!("degree-1 part equals closed form on {configs} configurations ({elapsed:.2?})"))
        } else {
            Err(format!("took {elapsed:?}"))
        }
    });
    let seven = smooth
        .map(|_| format!("smooth restriction equals rank exp(c/2 lambda + sum a_i psi_i) on {configs} configurations"))
        .map_err(|w| format!("smooth restriction mismatch at {w}"));
    (five, seven)
}

fn exp_lambda(g: u32, n: usize, c: &Rational) -> QClass {
    let d = moduli_dimension(g, n);
    let smooth = StableGraph::smooth(g, n).unwrap();
    let half = c / Rational::from_integer(2.into());
    let mut out = QClass::zero(g, n, d);
    for k in 0..=d {
        let gen = Generator::new(&smooth, k, vec![0; n], vec![]).unwrap();
        out.add_term(gen, rational_pow(&half, k) / factorial(k));
    }
    out
}

fn criterion_6() -> Outcome {
    let e8 = fusion_datum_from_gram(&GramLattice::e8()).map_err(|e| e.to_string())?;
    ensure!(e8.len() == 1 && *e8.central_charge() == q(8, 1), "E8 datum is not holomorphic of c = 8");
    let c24 = FusionDatum::holomorphic(q(24, 1));
    for (name, d) in [("c=8", &e8), ("c=24", &c24)] {
        let e = ChernEngine::new(d);
        for (g, n) in [(1u32, 1usize), (2, 0), (0, 4)] {
            let ms = vec![0; n];
            let full: QClass = e.chern_character(g, &ms, None).map_err(|e| e.to_string())?;
            ensure!(full == exp_lambda(g, n, d.central_charge()), "{name} ({g},{n}): {full:?}");
            ensure!(e.ranks().rank(g, &ms).unwrap() == 1, "{name} ({g},{n}) rank");
            let c1: QClass = e.first_chern_closed_form(g, &ms).map_err(|e| e.to_string())?;
            ensure!(c1 == exp_lambda(g, n, d.central_charge()).degree_part(1), "{name} ({g},{n}) c1");
        }
    }
    Ok("exp(c/2 lambda) for c = 8 (E8) and c = 24 on (1,1), (2,0), (0,4)".into())
}

fn factorial_u64(k: usize) -> u64 {
    (1..=k as u64).product()
}

fn criterion_8() -> Outcome {
    for ((g, n), count) in [((0, 3), 1), ((1, 1), 2), ((0, 4), 4)] {
        let got = enumerate(g, n).map_err(|e| e.to_string())?.len();
        ensure!(got == count, "({g},{n}): {got} graphs, expected {count}");
    }
    let mut orbit_checked = 0;
    for (g, n) in [(0u32, 3usize), (1, 1), (0, 4), (0, 5), (1, 2), (1, 3), (2, 0)] {
        let forms = enumerate(g, n).map_err(|e| e.to_string())?;
        let (classes, _) = multigraph_classes(g, n);
        let mut ours: Vec<_> = forms.iter().map(|f| f.code().clone()).collect();
        let mut theirs: Vec<_> = classes.values().map(|gr| canonical_form(gr).code().clone()).collect();
        ours.sort();
        theirs.sort();
        ensure!(ours == theirs, "({g},{n}): canonical multisets differ");
        let keys: HashSet<_> = forms.iter().map(|f| graph_normalized_key(f.graph())).collect();
        ensure!(keys.len() == forms.len() && classes.keys().all(|k| keys.contains(k)), "({g},{n}): classes differ");

        let labelled = labelled_presentations(g, n);
        ensure!(labelled.len() == forms.len(), "({g},{n}): labelled oracle has {} classes", labelled.len());
        for f in &forms {
            let (v, e) = (f.graph().num_vertices(), f.graph().num_edges());
            let &(_, _, count) = labelled
                .get(&graph_brute_key(f.graph()))
                .ok_or_else(|| format!("({g},{n}): class absent from labelled oracle"))?;
            ensure!(
                count * f.aut_order() == factorial_u64(v) * factorial_u64(2 * e),
                "({g},{n}): orbit-stabilizer fails, |Aut| = {}, orbit = {count}",
                f.aut_order()
            );
            orbit_checked += 1;
        }
    }
    Ok(format!("counts 1, 2, 4; oracle agreement on (0,5), (1,2), (1,3), (2,0); orbit-stabilizer on {orbit_checked} graphs"))
}

fn criterion_9(data: &Data) -> Outcome {
    let grams = random_lattices(20, 24, 0x5eed);
    let mut checked = 0usize;
    for gram in &grams {
        let l = GramLattice::new(gram.clone()).map_err(|e| e.to_string())?;
        let d = fusion_datum_from_gram(&l).map_err(|e| e.to_string())?;
        let report = validate(d.tables());
        ensure!(report.is_valid(), "{gram:?}: {}", report.describe(d.tables()));
        let t = RankTable::new(&d);
        for n in 3..=5 {
            for ms in multisets(d.len(), n) {
                let duals: Vec<usize> = ms.iter().map(|&x| d.dual(x)).collect();
                ensure!(t.rank(0, &ms).unwrap() == t.rank(0, &duals).unwrap(), "{gram:?}: duality at {ms:?}");
                checked += 1;
            }
        }
        for (g, n) in stable_types(2, 3) {
            for ms in multisets(d.len(), n) {
                ensure!(separating_consistent(&t, g, &ms), "{gram:?}: factorization at g={g} {ms:?}");
                let mut with_unit = ms.clone();
                with_unit.push(d.unit());
                ensure!(t.rank(g, &with_unit).unwrap() == t.rank(g, &ms).unwrap(), "{gram:?}: vacua at g={g} {ms:?}");
                checked += 1;
            }
        }
    }

    let z2 = &data.lattices[0].1;
    let e = ChernEngine::new(z2);
    for ms in multisets(2, 4) {
        let base: QClass = e.chern_character(0, &ms, None).map_err(|e| e.to_string())?;
        for sigma in permutations(4) {
            let mut moved = [0usize; 4];
            for i in 0..4 {
                moved[sigma[i]] = ms[i];
            }
            let direct: QClass = e.chern_character(0, &moved, None).map_err(|e| e.to_string())?;
            ensure!(base.permute_legs(&sigma).unwrap() == direct, "S_4 equivariance at {ms:?} {sigma:?}");
        }
    }
    let ranks: Vec<usize> = grams.iter().map(|g| g.len()).collect();
    Ok(format!(
        "{} lattices (ranks {:?}), {checked} rank checks; S_4-equivariance of the (0,4) class for Z/2",
        grams.len(),
        ranks
    ))
}

fn criterion_10() -> Outcome {
    let mut found = Vec::new();
    for (gram, expected) in [(vec![vec![2i64]], q(1, 4)), (vec![vec![2, -1], vec![-1, 2]], q(1, 3))] {
        let l = GramLattice::new(gram.clone()).map_err(|e| e.to_string())?;
        let disc = discriminant_group(&l);
        for rep in &disc.coset_reps[1..] {
            let a = conformal_dimension(&l, rep).map_err(|e| e.to_string())?;
            ensure!(a == expected, "{gram:?}: a = {a}, expected {expected}");
            let oracle = cvp_oracle(&gram, rep);
            ensure!(oracle == a, "{gram:?}: box oracle gives {oracle}");
            found.push(a.to_string());
        }
    }
    Ok(format!("nonzero cosets: [[2]] -> {}, A2 -> {}, {}; box oracle agrees", found[0], found[1], found[2]))
}

fn run(k: usize, f: impl FnOnce() -> Outcome) -> bool {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    report(k, result)
}

fn report(k: usize, result: Outcome) -> bool {
    match result {
        Ok(msg) => {
            println!("PASS criterion {k}: {msg}");
            true
        }
        Err(msg) => {
            println!("FAIL criterion {k}: {msg}");
            false
        }
    }
}

fn main() -> ExitCode {
    let data = Data::new();
    let mut qs = Queries::default();
    let mut ok = true;
    ok &= run(1, || criterion_1(&data, &mut qs));
    ok &= run(2, || criterion_2(&data, &mut qs));
    ok &= run(3, || criterion_3(&data, &mut qs));
    ok &= run(4, || criterion_4(&data, &qs));
    let (five, seven) = catch_unwind(AssertUnwindSafe(|| criteria_5_and_7(&data)))
        .unwrap_or_else(|_| (Err("panicked".into()), Err("panicked".into())));
    ok &= report(5, five);
    ok &= run(6, criterion_6);
    ok &= report(7, seven);
    ok &= run(8, criterion_8);
    ok &= run(9, || criterion_9(&data));
    ok &= run(10, criterion_10);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
