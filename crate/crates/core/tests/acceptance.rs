//! Acceptance suite. Prints one PASS/FAIL line per criterion, then fails if
//! any criterion failed. Limits and tolerances are pinned below.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use fusion_census::classify::verify::{claim2, unique_gamma};
use fusion_census::classify::{build_m, census_pq2, census_r3a, CensusOptions, Mode, RootPair};
use fusion_census::finab::arith::is_prime;
use fusion_census::finab::{FinAbGroup, GroupHom};
use fusion_census::formsolve::{classify_gamma, decompose};
use fusion_census::fusering::{FusionRing, GroupTable};
use fusion_census::oracle::{
    automorphism_generators, enumerate_orthogonal_group, exhaustive_gamma_solutions, gamma_orbits,
    predicates, Caps,
};
use fusion_census::orthogroup::{EquivMove, OrthElem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{group, random_valid_gamma};

const FAST: Duration = Duration::from_secs(1);
const R3A_ORACLE_LIMIT: Duration = Duration::from_secs(30);
const CLAIM2_LIMIT: Duration = Duration::from_secs(60);
const UNIQUENESS_LIMIT: Duration = Duration::from_secs(60);
const ROUNDTRIP_LIMIT: Duration = Duration::from_secs(60);
const FP_DIM_TOLERANCE: f64 = 1e-6;
const ROUNDTRIP_SAMPLES: usize = 200;
const ROUNDTRIP_SEED: u64 = 0x5eed_0006;
/// The (5, 19) Lagrangian search needs |A ⊕ A*| = 19⁴.
const CLAIM2_PAIR_SPACE: u64 = 200_000;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let o = f();
    (o, start.elapsed())
}

fn opts(mode: Mode, oracle: bool) -> CensusOptions {
    CensusOptions {
        mode,
        oracle,
        caps: Caps::default(),
    }
}

fn cli_count(args: &[&str], field: &str) -> Option<u64> {
    let out = Command::new(env!("CARGO_BIN_EXE_fusion-census"))
        .args(args)
        .output()
        .ok()?;
    if !out.status.success() {
        return None;
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).ok()?;
    v[field].as_u64()
}

fn criterion_1() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (p, q, expected) in [(3u64, 2u64, 3u64), (5, 19, 10)] {
        let (o, t) = timed(|| {
            let r = census_pq2(p, q, &opts(Mode::General, false)).unwrap();
            outcome(
                r.count_general == expected && r.count_general == (p * p - p) / 2,
                r.count_general.to_string(),
            )
        });
        ok &= o.passed && t < FAST;
        notes.push(format!("({p},{q})={} in {t:?}", o.detail));
    }
    let via_cli = cli_count(
        &["census-pq2", "--p", "3", "--q", "2", "--mode", "general"],
        "count_general",
    );
    ok &= via_cli == Some(3);
    notes.push(format!("cli={via_cli:?}"));
    outcome(ok, notes.join(", "))
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (p, q) in [(3u64, 2u64), (5, 19), (7, 13)] {
        let (o, t) = timed(|| {
            let r = census_pq2(p, q, &opts(Mode::Grading, false)).unwrap();
            let classes = r.pair_classes.unwrap();
            outcome(
                classes == (p - 1) * (p - 1) / 4 && r.count_grading == p * classes,
                classes.to_string(),
            )
        });
        ok &= o.passed && t < FAST;
        notes.push(format!("p={p}:{}", o.detail));
    }
    outcome(ok, notes.join(", "))
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (g, expected) in [("2^1:2", 6u64), ("5^1:1", 0), ("1", 3), ("2^1:2+2^2:2", 12)] {
        let r = census_r3a(&group(g), &opts(Mode::General, false)).unwrap();
        ok &= r.count_general == expected;
        notes.push(format!("{g}={}", r.count_general));
    }
    for g in ["2^1:2", "2^2:2"] {
        let a = group(g);
        let (o, t) = timed(|| {
            let sols = exhaustive_gamma_solutions(
                &a,
                &predicates::alternating_condition,
                &Caps::default(),
            )
            .unwrap();
            let orbits = gamma_orbits(sols, &automorphism_generators(&a))
                .unwrap()
                .count() as u64;
            let formula: u64 = a
                .factors()
                .iter()
                .map(|f| u64::from(f.multiplicity) / 2 + 1)
                .product();
            outcome(orbits == formula, format!("{orbits} orbits"))
        });
        ok &= o.passed && t < R3A_ORACLE_LIMIT;
        notes.push(format!("oracle {g}: {} in {t:?}", o.detail));
    }
    let via_cli = cli_count(
        &["census-r3a", "--group", "2^1:2", "--oracle"],
        "count_general",
    );
    ok &= via_cli == Some(6);
    outcome(ok, notes.join(", "))
}

fn criterion_4() -> Outcome {
    let caps = Caps {
        pair_space: CLAIM2_PAIR_SPACE,
        ..Caps::default()
    };
    let (o, t) = timed(|| {
        let mut ok = true;
        let mut notes = Vec::new();
        for (p, q) in [(3u64, 2u64), (3, 5), (5, 19)] {
            let r = claim2(p, q, &caps).unwrap();
            ok &= r.passed;
            notes.push(format!(
                "({p},{q}) {}/{} agree",
                r.witnesses["agree"], r.witnesses["pairs"]
            ));
        }
        outcome(ok, notes.join(", "))
    });
    outcome(
        o.passed && t < CLAIM2_LIMIT,
        format!("{} in {t:?}", o.detail),
    )
}

fn criterion_5() -> Outcome {
    let (o, t) = timed(|| {
        let mut ok = true;
        let mut notes = Vec::new();
        for (q, n, a) in [(2u64, 1u32, 1i64), (2, 2, 1), (5, 1, 1), (7, 1, 1)] {
            let r = unique_gamma(q, n, a, &Caps::default()).unwrap();
            ok &= r.passed;
            notes.push(format!("({q},{n},{a}):{} orbit(s)", r.witnesses["orbits"]));
        }
        outcome(ok, notes.join(", "))
    });
    outcome(
        o.passed && t < UNIQUENESS_LIMIT,
        format!("{} in {t:?}", o.detail),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ROUNDTRIP_SEED);
    let groups: Vec<FinAbGroup> = ["2^1:2", "2^1:4", "5^1:2", "2^2:2"]
        .iter()
        .map(|s| group(s))
        .collect();
    let (o, t) = timed(|| {
        let mut good = 0;
        for i in 0..ROUNDTRIP_SAMPLES {
            let a = &groups[i % groups.len()];
            let (class, gamma) = random_valid_gamma(a, &mut rng);
            let d = decompose(&gamma).unwrap();
            let psi = &d.change_of_basis;
            let transported = psi.dual().compose(&gamma).unwrap().compose(psi).unwrap();
            // Reassemble: γ = (ψ⁻¹)* C ψ⁻¹.
            let inv = psi.inverse().unwrap();
            let reassembled = inv
                .dual()
                .compose(&d.canonical)
                .unwrap()
                .compose(&inv)
                .unwrap();
            let orthogonal = d.blocks.iter().enumerate().all(|(i, bi)| {
                d.blocks
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .all(|(_, bj)| {
                        bi.basis
                            .iter()
                            .all(|u| bj.basis.iter().all(|v| a.pair(&gamma.apply(u), v) == 0))
                    })
            });
            if transported == d.canonical
                && reassembled == gamma
                && orthogonal
                && classify_gamma(&gamma).unwrap() == class
            {
                good += 1;
            }
        }
        outcome(
            good == ROUNDTRIP_SAMPLES,
            format!("{good}/{ROUNDTRIP_SAMPLES} round-trips"),
        )
    });
    outcome(
        o.passed && t < ROUNDTRIP_LIMIT,
        format!("{} in {t:?}", o.detail),
    )
}

fn census_matrices_have_order_p() -> (bool, usize) {
    let mut count = 0;
    for p in [3u64, 5, 7] {
        for q in (2u64..60).filter(|&q| is_prime(q) && q != p && (q * q - 1) % p == 0) {
            for pair in RootPair::admissible(p) {
                let m = build_m(p, q, &pair).unwrap();
                if m.pow(p).unwrap() != OrthElem::identity(m.group()) {
                    return (false, count);
                }
                count += 1;
            }
        }
    }
    (true, count)
}

fn normalisation_is_unique(a: &FinAbGroup) -> (bool, usize) {
    let els = enumerate_orthogonal_group(a, &Caps::default()).unwrap();
    let members: std::collections::HashSet<&OrthElem> = els.iter().collect();
    let alternating: Vec<GroupHom> = GroupHom::all(a, a).filter(|h| h.is_alternating()).collect();
    let mut witnessed = 0;
    for m in els.iter().filter(|m| m.beta().is_isomorphism().unwrap()) {
        let Ok((out, _)) = m.normalize_delta_zero() else {
            return (false, witnessed);
        };
        let killers = alternating
            .iter()
            .filter(|phi| {
                EquivMove::LowerUnipotent((*phi).clone())
                    .apply(m)
                    .unwrap()
                    .delta()
                    .is_zero()
            })
            .count();
        if killers != 1 || !members.contains(&out) || out.beta() != m.beta() {
            return (false, witnessed);
        }
        witnessed += 1;
    }
    (true, witnessed)
}

fn fp_dims_are_square_roots() -> (bool, usize) {
    let mut rings = 0;
    for n in (1..=10usize).map(|k| k * k) {
        let mut tables = vec![GroupTable::from_abelian(
            &FinAbGroup::parse(&cyclic_descriptor(n)).unwrap(),
        )];
        let k = (n as f64).sqrt() as usize;
        if k > 1 {
            tables.push(
                GroupTable::from_abelian(&FinAbGroup::parse(&cyclic_descriptor(k)).unwrap())
                    .product(&GroupTable::from_abelian(
                        &FinAbGroup::parse(&cyclic_descriptor(k)).unwrap(),
                    )),
            );
        }
        if n % 2 == 0 && n >= 6 {
            tables.push(GroupTable::dihedral(n / 2));
        }
        for g in &tables {
            for p in [2usize, 3, 5, 7] {
                let ring = FusionRing::r_pg(p, g).unwrap();
                let dims = ring.fp_dims().unwrap();
                let root = (n as f64).sqrt();
                let ok_group = dims[..n].iter().all(|&d| d == 1.0);
                let ok_x = dims[n..]
                    .iter()
                    .all(|&d| (d - root).abs() <= FP_DIM_TOLERANCE);
                if !(ok_group && ok_x) {
                    return (false, rings);
                }
                rings += 1;
            }
        }
    }
    (true, rings)
}

fn cyclic_descriptor(n: usize) -> String {
    if n == 1 {
        return "1".into();
    }
    fusion_census::finab::arith::factorize(n as u64)
        .iter()
        .map(|(p, e)| format!("{p}^{e}:1"))
        .collect::<Vec<_>>()
        .join("+")
}

fn criterion_7() -> Outcome {
    let (orders_ok, matrices) = census_matrices_have_order_p();
    let mut norm_ok = true;
    let mut witnessed = 0;
    for g in [
        "1",
        "2^1:1",
        "3^1:1",
        "2^2:1",
        "2^1:2",
        "5^1:1",
        "2^1:1+3^1:1",
        "7^1:1",
        "2^3:1",
        "2^1:1+2^2:1",
        "2^1:3",
        "3^2:1",
        "3^1:2",
    ] {
        let (ok, w) = normalisation_is_unique(&group(g));
        norm_ok &= ok;
        witnessed += w;
    }
    let (fp_ok, rings) = fp_dims_are_square_roots();
    outcome(
        orders_ok && norm_ok && fp_ok,
        format!("M^p=Id on {matrices} matrices: {orders_ok}; unique normalisation on {witnessed} elements: {norm_ok}; fp dims on {rings} rings: {fp_ok}"),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("1 general-mode count (p^2-p)/2", criterion_1),
        ("2 grading pair classes (p-1)^2/4", criterion_2),
        ("3 R3A counts and gamma-orbit oracle", criterion_3),
        ("4 Lagrangian criterion for root pairs", criterion_4),
        ("5 uniqueness of the special form", criterion_5),
        ("6 decomposition round-trip", criterion_6),
        ("7 structural checks", criterion_7),
    ];
    let mut failures = Vec::new();
    for (name, f) in criteria {
        let (o, t) = timed(f);
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("[{verdict}] criterion {name} ({t:.2?}): {}", o.detail);
        if !o.passed {
            failures.push(name);
        }
    }
    println!("[N/A ] criterion 8 existence of the categories themselves: out of scope");
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
