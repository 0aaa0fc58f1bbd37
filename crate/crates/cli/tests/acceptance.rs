//! Runs every acceptance criterion at its stated tolerance and time limit and
//! prints one PASS/FAIL line for each. Exits nonzero if any criterion fails.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use additive_spectrum::basis::{
    check_counting_inequality, dilute_eigenvalue, eigenvalue_report, iterated_sumset,
    synthetic_seed, verify_basis,
};
use additive_spectrum::equidist::{
    impossibility_scan, power_relation, rational_case_witness, verify_relation, PowerRelation,
    ScanConfig,
};
use additive_spectrum::growth::GrowthFunction;
use additive_spectrum::sequences::{asymptotic_verdict, density_estimate, SequencePrefix};
use additive_spectrum::sets::{Complement, SortedSet};
use additive_spectrum::supersequence::{
    adversarial_construction, build_supersequence, select_from_complement, SupersequenceConfig,
    DEFAULT_GAMMA,
};
use additive_spectrum_cli::commands::sorted_noisy_squares;
use num_bigint::BigUint;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
/// Name, time limit in seconds, and the check itself.
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn squares_with_zero(max: u64) -> SequencePrefix {
    SequencePrefix::from_u64s((0..).map(|k: u64| k * k).take_while(|&s| s <= max)).unwrap()
}

fn brute_sumset(members: &[u64], h: u32, x_max: u64) -> BTreeSet<u64> {
    let mut sums = BTreeSet::from([0u64]);
    for _ in 0..h {
        let mut next = BTreeSet::new();
        for &s in &sums {
            for &m in members {
                if s + m <= x_max {
                    next.insert(s + m);
                }
            }
        }
        sums = next;
    }
    sums
}

fn sumset_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..50 {
        let h = 2 + (i % 2) as u32;
        let size = rng.gen_range(1..=300);
        let members: Vec<u64> = (0..size)
            .map(|_| rng.gen_range(0..=2000u64))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let a = SequencePrefix::from_u64s(members.clone()).unwrap();
        let got: BTreeSet<u64> = iterated_sumset(&a, h, 2000)
            .unwrap()
            .iter_ones()
            .map(|x| x as u64)
            .collect();
        ensure(got == brute_sumset(&members, h, 2000), || {
            format!("set {i} (h = {h}, |A| = {}) differs", members.len())
        })?;
    }
    Ok("50 sets agree".into())
}

fn lagrange() -> Check {
    let a = squares_with_zero(1_000_000);
    let four = verify_basis(&a, 4, 1_000_000).unwrap();
    ensure(four.missing_count == 0, || {
        format!("h = 4 misses {}", four.missing_count)
    })?;
    let two = verify_basis(&a, 2, 1_000_000).unwrap();
    ensure(two.missing_count > 100_000, || {
        format!("h = 2 misses only {}", two.missing_count)
    })?;
    Ok(format!("h=4 missing 0, h=2 missing {}", two.missing_count))
}

fn counting_bounds() -> Check {
    let triangular = SequencePrefix::from_u64s(
        (0..)
            .map(|k: u64| k * (k + 1) / 2)
            .take_while(|&t| t <= 100_000),
    )
    .unwrap();
    let cubes = SequencePrefix::from_u64s((0..=25u64).map(|k| k * k * k)).unwrap();
    let residues = |m: u64, x: u64| {
        SequencePrefix::from_u64s((0..m).chain((1..=x / m).map(|j| j * m))).unwrap()
    };
    let corpus: Vec<(&str, SequencePrefix, u32, u64)> = vec![
        ("squares h=4", squares_with_zero(1_000_000), 4, 1_000_000),
        ("squares h=5", squares_with_zero(100_000), 5, 100_000),
        ("triangular h=3", triangular, 3, 100_000),
        ("cubes h=9", cubes, 9, 10_000),
        (
            "naturals h=1",
            SequencePrefix::from_u64s(0..=5000).unwrap(),
            1,
            5000,
        ),
        (
            "naturals h=3",
            SequencePrefix::from_u64s(0..=5000).unwrap(),
            3,
            5000,
        ),
        ("residues m=3 h=2", residues(3, 20_000), 2, 20_000),
        ("residues m=10 h=2", residues(10, 20_000), 2, 20_000),
        ("residues m=50 h=3", residues(50, 50_000), 3, 50_000),
        (
            "{0, 1, 2} h=2",
            SequencePrefix::from_u64s([0, 1, 2]).unwrap(),
            2,
            4,
        ),
        (
            "padded squares h=4",
            synthetic_seed(1.0, 2, 1000, Some(10)).unwrap(),
            4,
            100_000,
        ),
    ];
    let mut bases = 0;
    for (name, a, h, x) in &corpus {
        let r = verify_basis(a, *h, *x).unwrap();
        ensure(r.is_window_basis, || {
            format!("{name} is not a window basis")
        })?;
        let c = check_counting_inequality(a, *h, &r).unwrap();
        ensure(c.holds, || {
            format!("{name}: counting bound fails at {:?}", c.first_failure)
        })?;
        let e = eigenvalue_report(a, *h, &r).unwrap();
        ensure(e.ineq2_ok, || {
            format!(
                "{name}: finite eigenvalue bound fails at n = {:?}",
                e.ineq2_first_failure
            )
        })?;
        bases += 1;
    }
    Ok(format!("{bases} window bases"))
}

fn tauberian() -> Check {
    let g = GrowthFunction::power(1.0, 2.0).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let dev = |n: usize| {
            let sorted = sorted_noisy_squares(n, 0.05, seed);
            asymptotic_verdict(&sorted, &g, 0.12).unwrap().sup_deviation
        };
        let (d3, d4) = (dev(1_000), dev(10_000));
        ensure(d4 <= 0.12, || {
            format!("seed {seed}: deviation {d4} at N = 10^4")
        })?;
        ensure(d4 <= d3 + 0.01, || {
            format!("seed {seed}: deviation grew from {d3} to {d4}")
        })?;
        worst = worst.max(d4);
    }
    Ok(format!("worst deviation {worst:.4}"))
}

fn construction() -> Check {
    let f = GrowthFunction::power(2.0, 2.0).unwrap();
    let g = GrowthFunction::power(1.0, 2.0).unwrap();
    let mut devs = Vec::new();
    for n in [1_000usize, 10_000, 100_000] {
        let k_max = (n as f64 / 2f64.sqrt()) as u64;
        let a = SequencePrefix::from_u64s((1..=k_max).map(|k| 2 * k * k)).unwrap();
        let r = build_supersequence(&a, &f, &g, n, &SupersequenceConfig::default())
            .map_err(|e| format!("N = {n}: {e}"))?;
        ensure(r.b.is_strictly_increasing(), || {
            format!("N = {n}: B not increasing")
        })?;
        for (k, &nk) in r.embedding.iter().enumerate() {
            ensure(r.b.values()[nk - 1] == a.values()[k], || {
                format!("N = {n}: b_(n_{}) != a_{}", k + 1, k + 1)
            })?;
        }
        let distinct: HashSet<&BigUint> = r.b.values().iter().collect();
        ensure(distinct.len() == n, || format!("N = {n}: duplicate values"))?;
        let dev = r.verdict.sup_deviation;
        if n == 100_000 {
            ensure(dev <= 0.05, || format!("sup deviation {dev} at N = 10^5"))?;
        }
        devs.push(dev);
    }
    for w in devs.windows(2) {
        ensure(w[1] <= 1.1 * w[0], || {
            format!("deviations not non-increasing: {devs:?}")
        })?;
    }
    Ok(format!("deviations {devs:.4?}"))
}

fn dilution() -> Check {
    let a = synthetic_seed(2.0, 2, 5000, Some(1)).unwrap();
    let n = (a.len() as f64 * 2f64.sqrt()) as usize;
    let out = dilute_eigenvalue(
        &a,
        2,
        2.0,
        1.0,
        n,
        1_000_000,
        &SupersequenceConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let v = &out.supersequence.verdict;
    ensure(v.holds && v.epsilon == 0.05, || format!("verdict {v:?}"))?;
    ensure(out.sumset_contains, || "hB does not contain hA".into())?;
    let sp = out.mean_spacing;
    ensure((1.41..=1.42).contains(&sp), || format!("mean spacing {sp}"))?;
    Ok(format!(
        "sup deviation {:.4}, mean spacing {sp:.5}",
        v.sup_deviation
    ))
}

fn exact_scan() -> Check {
    let big =
        impossibility_scan(3, 2, 100_000, &ScanConfig::default()).map_err(|e| e.to_string())?;
    ensure(big.first_violation == Some(1), || {
        format!("first violation {:?}", big.first_violation)
    })?;
    let frac = big.hits_middle as f64 / 100_000.0;
    ensure((0.48..=0.52).contains(&frac), || {
        format!("middle fraction {frac}")
    })?;

    let small = impossibility_scan(3, 2, 20, &ScanConfig::default()).map_err(|e| e.to_string())?;
    let three12 = Pow::pow(BigUint::from(3u32), 12u32);
    let two19 = Pow::pow(BigUint::from(2u32), 19u32);
    let num = &three12 - &two19;
    let exact = small
        .min_gap_exact
        .as_ref()
        .ok_or("no exact gap reported")?;
    ensure(
        (small.min_gap_k, small.min_gap_n) == (12, 19)
            && exact.numerator == num.to_string()
            && exact.denominator == three12.to_string(),
        || {
            format!(
                "gap at ({}, {}) = {exact:?}",
                small.min_gap_k, small.min_gap_n
            )
        },
    )?;
    ensure((small.min_relative_gap - 0.01346).abs() < 5e-6, || {
        format!("gap {}", small.min_relative_gap)
    })?;
    Ok(format!(
        "middle fraction {frac:.4}, gap {}/{}",
        exact.numerator, exact.denominator
    ))
}

fn dichotomy() -> Check {
    let brute = |u: u64, v: u64| {
        (1..=7u32).find_map(|s| {
            (1..=7u32).find_map(|r| {
                (Pow::pow(BigUint::from(u), s) == Pow::pow(BigUint::from(v), r)).then_some((r, s))
            })
        })
    };
    let mut counts = [0usize; 3];
    for u in 3..=100u64 {
        for v in 2..u {
            let rel = power_relation(u, v).map_err(|e| e.to_string())?;
            ensure(verify_relation(u, v, rel), || {
                format!("({u}, {v}) {rel:?} unverified")
            })?;
            let expect = match brute(u, v) {
                Some((r, 1)) => PowerRelation::PerfectPower { r },
                Some((r, s)) => PowerRelation::RationalLog { r, s },
                None => PowerRelation::Irrational,
            };
            ensure(rel == expect, || {
                format!("({u}, {v}): {rel:?}, expected {expect:?}")
            })?;
            counts[match rel {
                PowerRelation::PerfectPower { .. } => 0,
                PowerRelation::RationalLog { .. } => 1,
                PowerRelation::Irrational => 2,
            }] += 1;
        }
    }
    for (u, v, expect) in [
        (8, 2, PowerRelation::PerfectPower { r: 3 }),
        (8, 4, PowerRelation::RationalLog { r: 3, s: 2 }),
        (6, 2, PowerRelation::Irrational),
    ] {
        let rel = power_relation(u, v).unwrap();
        ensure(rel == expect, || format!("({u}, {v}) gave {rel:?}"))?;
    }
    // Only nine RationalLog pairs have u ≤ 100, so the witnesses extend to 256.
    let mut witnesses = 0;
    'outer: for u in 3..=256u64 {
        for v in 2..u {
            if let PowerRelation::RationalLog { r, s } = power_relation(u, v).unwrap() {
                let w = rational_case_witness(u, v, r, s, 500).map_err(|e| e.to_string())?;
                ensure(
                    w.verified && w.distance_numerator == 1 && w.distance_denominator == s as u64,
                    || format!("({u}, {v}) witness {w:?}"),
                )?;
                witnesses += 1;
                if witnesses == 10 {
                    break 'outer;
                }
            }
        }
    }
    ensure(witnesses == 10, || format!("only {witnesses} witnesses"))?;
    Ok(format!(
        "{} perfect powers, {} rational logs, {} irrational; 10 witnesses at 1/s",
        counts[0], counts[1], counts[2]
    ))
}

fn adversarial() -> Check {
    let g = GrowthFunction::exponential(2.0).unwrap();
    let m: Vec<u64> = (1..=50).collect();
    let adv = adversarial_construction(&g, &m, DEFAULT_GAMMA).map_err(|e| e.to_string())?;
    let expect = 1.0 - 2f64.powf(-0.5);
    ensure((adv.witness - expect).abs() <= 1e-9, || {
        format!("witness {} vs {expect}", adv.witness)
    })?;

    let dir = std::env::temp_dir().join(format!("addspec-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let (f_path, a_path) = (dir.join("f.json"), dir.join("a.txt"));
    let bin = env!("CARGO_BIN_EXE_addspec");
    let emit = Command::new(bin)
        .args(["adversarial", "--g", "exp:2", "--K", "50", "--emit-f"])
        .arg(&f_path)
        .arg("--emit-A")
        .arg(&a_path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(emit.status.code() == Some(0), || {
        "adversarial run failed".into()
    })?;
    let out = Command::new(bin)
        .args(["supersequence", "--g", "exp:2", "--N", "50", "--f"])
        .arg(format!("@{}", f_path.display()))
        .arg("--A")
        .arg(&a_path)
        .output()
        .map_err(|e| e.to_string())?;
    let _ = fs::remove_dir_all(&dir);
    let code = out.status.code();
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(
        code == Some(2) && report["violation"]["violation"] == "unstable",
        || format!("exit {code:?}, report {report}"),
    )?;
    Ok(format!(
        "witness {:.12}, supersequence exit 2 (unstable)",
        adv.witness
    ))
}

fn density_machinery() -> Check {
    let g = GrowthFunction::power(1.0, 2.0).unwrap();
    let top = 2 * 10_000u64 * 10_000;
    let squares = SortedSet::new(
        (1..)
            .map(|k: u64| k * k)
            .take_while(|&s| s <= top)
            .collect(),
    );
    let sel = select_from_complement(&Complement::new(squares.clone()), &g, 10_000, Some(0.9))
        .map_err(|e| e.to_string())?;
    let mut seen = HashSet::new();
    for (&n, &c) in sel.indices.iter().zip(&sel.values) {
        let (lo, hi) = sel.schedule.interval(&g, n).unwrap();
        ensure(lo <= c && c <= hi, || {
            format!("c_{n} = {c} outside [{lo}, {hi}]")
        })?;
        ensure(squares.members().binary_search(&c).is_err(), || {
            format!("c_{n} = {c} is a square")
        })?;
        ensure(seen.insert(c), || format!("{c} chosen twice"))?;
    }
    let sq = SequencePrefix::from_u64s((1..=1000u64).map(|k| k * k)).unwrap();
    let d = density_estimate(&sq, 1_000_000).unwrap();
    ensure(d.upper <= 0.002, || format!("density upper {}", d.upper))?;
    Ok(format!(
        "{} values in tier, density upper {:.5}",
        sel.values.len(),
        d.upper
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("sumset oracle equivalence", 30, sumset_oracle),
        ("Lagrange desk check", 10, lagrange),
        ("counting bounds on window bases", 60, counting_bounds),
        ("sorted rearrangement of noisy squares", 20, tauberian),
        ("supersequence of doubled squares", 60, construction),
        ("eigenvalue dilution 2 -> 1", 60, dilution),
        ("exact scan of 3 against 2", 30, exact_scan),
        ("power relation dichotomy", 5, dichotomy),
        ("adversarial witness", 5, adversarial),
        ("complement selection and density", 10, density_machinery),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{d}; took longer than {limit} s"))
            }
            r => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} {:>2} {name}: {detail} [{:.2} s / {limit} s]",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
