//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a non-zero status if any criterion fails. All comparisons are exact.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use k3monodromy::catalog::{build_catalog, DessinRecord};
use k3monodromy::enumerate::brute_force_oracle;
use k3monodromy::hypermap::SymmetryGroup;
use k3monodromy::lifts::totals;
use k3monodromy::report::{
    loop_symmetry_table, stratum_table, symmetric_loopy, tf_counts, StratumRow,
};
use k3monodromy::verify::{verify, VerificationReport, VerifyOptions};
use k3monodromy::{enumerate_classes, rooted_count, EnumerationConstraints};

type Outcome = Result<String, String>;

fn expect_eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn within(what: &str, elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("{what} took {elapsed:?}, limit {limit:?}"))
    }
}

fn widths(s: &str) -> Vec<usize> {
    s.split(',').map(|w| w.parse().unwrap()).collect()
}

fn symmetry_of(r: &DessinRecord) -> SymmetryGroup {
    r.hypermap().unwrap().automorphisms().structure()
}

fn tf_records(catalog: &[DessinRecord], index: usize) -> Vec<&DessinRecord> {
    catalog
        .iter()
        .filter(|r| r.is_torsion_free() && r.index == index)
        .collect()
}

fn row_for<'a>(rows: &'a [StratumRow], partition: &str) -> &'a StratumRow {
    rows.iter()
        .find(|r| r.label.starts_with(&format!("{partition}-")))
        .unwrap_or_else(|| panic!("no row for {partition}"))
}

fn torsion_free_counts(catalog: &[DessinRecord]) -> Outcome {
    let expected = [(6, 2, 4), (12, 6, 32), (18, 26, 336), (24, 191, 4096)];
    let mut timings = Vec::new();
    for (index, classes, rooted) in expected {
        let start = Instant::now();
        let found = enumerate_classes(&EnumerationConstraints::torsion_free_genus_zero(index))
            .map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        expect_eq(&format!("classes at index {index}"), found.len(), classes)?;
        expect_eq(
            &format!("rooted at index {index}"),
            rooted_count(&found),
            rooted,
        )?;
        let limit = if index <= 18 { 10 } else { 900 };
        within(
            &format!("index {index}"),
            elapsed,
            Duration::from_secs(limit),
        )?;
        timings.push(format!("{index}: {elapsed:.2?}"));
    }
    let from_records: Vec<(usize, usize, usize)> = tf_counts(catalog)
        .into_iter()
        .map(|r| (r.index, r.classes, r.rooted))
        .collect();
    expect_eq(
        "counts read from catalog records",
        from_records,
        expected.to_vec(),
    )?;
    Ok(timings.join(", "))
}

fn automorphism_orders(catalog: &[DessinRecord]) -> Outcome {
    let index12: BTreeMap<Vec<usize>, usize> = tf_records(catalog, 12)
        .into_iter()
        .map(|r| (r.cusp_widths.clone(), r.aut_order))
        .collect();
    let want12: BTreeMap<Vec<usize>, usize> = [
        ("3,3,3,3", 12),
        ("4,4,2,2", 4),
        ("5,5,1,1", 2),
        ("6,3,2,1", 1),
        ("8,2,1,1", 2),
        ("9,1,1,1", 3),
    ]
    .into_iter()
    .map(|(p, o)| (widths(p), o))
    .collect();
    expect_eq("index-12 partitions and Aut orders", index12, want12)?;

    let captions = [
        ("14,1,1,1,1", "Z/2"),
        ("13,2,1,1,1", "{1}"),
        ("12,3,1,1,1", "Z/3"),
        ("12,2,2,1,1", "Z/2"),
        ("11,3,2,1,1", "{1}"),
        ("10,5,1,1,1", "{1}"),
        ("10,4,2,1,1", "{1}"),
        ("10,3,2,2,1", "{1}"),
        ("10,3,3,1,1", "Z/2"),
        ("9,6,1,1,1", "{1}"),
        ("9,5,2,1,1", "{1}"),
        ("8,5,2,2,1", "{1}"),
        ("8,4,3,2,1", "{1}"),
        ("8,3,3,2,2", "Z/2"),
        ("7,7,2,1,1", "Z/2"),
        ("7,7,2,1,1", "Z/2"),
        ("7,6,3,1,1", "{1}"),
        ("7,5,3,2,1", "{1}"),
        ("7,4,3,3,1", "{1}"),
        ("6,6,4,1,1", "Z/2"),
        ("6,6,2,2,2", "S3"),
        ("6,5,5,1,1", "Z/2"),
        ("6,5,4,2,1", "{1}"),
        ("6,4,4,2,2", "Z/2"),
        ("5,5,3,3,2", "Z/2"),
        ("4,4,4,3,3", "S3"),
    ];
    let mut want18: Vec<(Vec<usize>, String)> = captions
        .iter()
        .map(|(p, g)| (widths(p), g.to_string()))
        .collect();
    want18.sort();
    let mut got18: Vec<(Vec<usize>, String)> = tf_records(catalog, 18)
        .into_iter()
        .map(|r| (r.cusp_widths.clone(), symmetry_of(r).to_string()))
        .collect();
    got18.sort();
    expect_eq("index-18 partitions and symmetry groups", got18, want18)?;
    Ok("6 index-12 and 26 index-18 classes".into())
}

fn strata_and_tables(catalog: &[DessinRecord]) -> Outcome {
    let mut strata = BTreeMap::new();
    for r in catalog {
        *strata.entry(r.tf_index()).or_insert(0usize) += 1;
    }
    expect_eq(
        "strata",
        strata,
        BTreeMap::from([(6, 6), (12, 28), (18, 232), (24, 2962)]),
    )?;
    expect_eq("catalog size", catalog.len(), 3228)?;

    // Independent route: enumerate every genus-0 class with tf index <= 24
    // directly, without going through the substitution surgery.
    let mut direct = BTreeSet::new();
    for index in 1..=24 {
        let c = EnumerationConstraints {
            index,
            genus: Some(0),
            torsion_free: false,
            max_tf_index: Some(24),
        };
        for h in enumerate_classes(&c).map_err(|e| e.to_string())? {
            direct.insert(h.canonical_code().to_hex());
        }
    }
    let from_catalog: BTreeSet<String> = catalog.iter().map(|r| r.canonical_code.clone()).collect();
    expect_eq("direct enumeration total", direct.len(), 3228)?;
    expect_eq(
        "direct enumeration equals catalog",
        direct == from_catalog,
        true,
    )?;

    let k12 = stratum_table(catalog, 12);
    let cells = |p: &str| {
        let r = row_for(&k12.rows, p);
        (r.tf, r.e2_positive, r.e3_one, r.e3_two, r.e3_three_or_more)
    };
    expect_eq("[3,3,3,3] row", cells("3,3,3,3"), (1, 0, 0, 0, 0))?;
    expect_eq("[4,4,2,2] row", cells("4,4,2,2"), (1, 0, 0, 0, 0))?;
    expect_eq("[5,5,1,1] row", cells("5,5,1,1"), (1, 3, 1, 1, 0))?;
    expect_eq("[6,3,2,1] row", cells("6,3,2,1"), (1, 1, 1, 0, 0))?;
    expect_eq("[8,2,1,1] row", cells("8,2,1,1"), (1, 3, 1, 1, 0))?;
    expect_eq("[9,1,1,1] row", cells("9,1,1,1"), (1, 7, 1, 1, 1))?;
    let t = &k12.total;
    expect_eq(
        "index-12 totals",
        (t.tf, t.e2_positive, t.e3_one, t.e3_two, t.e3_three_or_more),
        (6, 14, 4, 3, 1),
    )?;

    let t = stratum_table(catalog, 18).total;
    expect_eq(
        "index-18 column totals",
        (t.tf, t.e2_positive, t.e3_one, t.e3_two + t.e3_three_or_more),
        (26, 143, 32, 31),
    )?;
    Ok("3228 classes, direct enumeration agrees".into())
}

fn index_24_distribution(catalog: &[DessinRecord]) -> Outcome {
    use SymmetryGroup::*;
    let rows: BTreeSet<(usize, Option<SymmetryGroup>, usize, Option<usize>)> =
        loop_symmetry_table(catalog, 24)
            .into_iter()
            .map(|r| (r.loops, r.symmetry, r.graphs, r.multiplicity))
            .collect();
    let want: BTreeSet<_> = [
        (0, None, 20, Some(1)),
        (1, Some(Trivial), 45, Some(3)),
        (2, Some(Trivial), 53, Some(9)),
        (2, Some(Cyclic(2)), 18, Some(6)),
        (3, Some(Trivial), 39, Some(27)),
        (3, Some(Cyclic(3)), 1, Some(11)),
        (4, Some(Trivial), 9, Some(81)),
        (4, Some(Cyclic(2)), 3, Some(45)),
        (4, Some(Dihedral(2)), 1, Some(27)),
        (4, Some(Cyclic(4)), 1, Some(24)),
        (5, Some(Trivial), 1, Some(243)),
    ]
    .into_iter()
    .collect();
    expect_eq("loop/symmetry rows", rows, want)?;
    let stratum: usize = loop_symmetry_table(catalog, 24)
        .iter()
        .map(|r| r.total)
        .sum();
    expect_eq("index-24 stratum", stratum, 2962)?;

    let sorted = |v: &[&str]| {
        let mut v: Vec<Vec<usize>> = v.iter().map(|p| widths(p)).collect();
        v.sort();
        v
    };
    let want_sym: BTreeMap<(usize, SymmetryGroup), Vec<Vec<usize>>> = BTreeMap::from([
        (
            (2, Cyclic(2)),
            sorted(&[
                "6,6,5,5,1,1",
                "6,6,5,5,1,1",
                "6,6,6,4,1,1",
                "7,7,4,4,1,1",
                "7,7,4,4,1,1",
                "8,8,3,3,1,1",
                "8,8,3,3,1,1",
                "8,8,3,3,1,1",
                "8,8,4,2,1,1",
                "9,9,2,2,1,1",
                "9,9,2,2,1,1",
                "9,9,2,2,1,1",
                "9,9,2,2,1,1",
                "10,5,5,2,1,1",
                "10,5,5,2,1,1",
                "12,4,3,3,1,1",
                "12,6,2,2,1,1",
                "16,2,2,2,1,1",
            ]),
        ),
        (
            (4, Cyclic(2)),
            sorted(&["10,10,1,1,1,1", "10,10,1,1,1,1", "18,2,1,1,1,1"]),
        ),
        ((3, Cyclic(3)), sorted(&["7,7,7,1,1,1"])),
        ((4, Dihedral(2)), sorted(&["10,10,1,1,1,1"])),
        ((4, Cyclic(4)), sorted(&["16,4,1,1,1,1"])),
    ]);
    let got_sym: BTreeMap<(usize, SymmetryGroup), Vec<Vec<usize>>> = symmetric_loopy(catalog, 24)
        .into_iter()
        .map(|r| {
            let parts: Vec<&str> = r.partitions.iter().map(String::as_str).collect();
            ((r.loops, r.symmetry.unwrap()), sorted(&parts))
        })
        .collect();
    expect_eq("symmetric loopy index-24 dessins", got_sym, want_sym)?;
    Ok("11 rows, 24 symmetric loopy dessins".into())
}

fn lift_counts(catalog: &[DessinRecord]) -> Outcome {
    let t = totals(catalog).map_err(|e| e.to_string())?;
    expect_eq(
        "lifts per stratum",
        t.per_stratum.clone(),
        BTreeMap::from([(6, 14), (12, 69), (18, 366), (24, 2962)]),
    )?;
    expect_eq("global lifts", t.total, 3411)?;
    expect_eq(
        "multi-lift classes and their lifts",
        (t.multi_lift_groups, t.multi_lift_lifts),
        (75, 258),
    )?;
    expect_eq("bijective classes", t.bijective, 3153)?;

    let k12 = stratum_table(catalog, 12);
    let lifts = |p: &str| {
        let r = row_for(&k12.rows, p);
        (r.one_to_one, r.two_to_one)
    };
    for (p, want) in [
        ("3,3,3,3", (2, 1)),
        ("4,4,2,2", (4, 1)),
        ("5,5,1,1", (9, 6)),
        ("6,3,2,1", (10, 3)),
        ("8,2,1,1", (9, 6)),
        ("9,1,1,1", (7, 11)),
    ] {
        expect_eq(&format!("[{p}] lifts"), lifts(p), want)?;
    }
    expect_eq(
        "index-12 lift columns",
        (k12.total.one_to_one, k12.total.two_to_one),
        (41, 28),
    )?;
    Ok("3411 lifts, 75 classes carry 258".into())
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut compared = 0;
    for index in 1..=8 {
        for torsion_free in [false, true] {
            let c = EnumerationConstraints {
                index,
                genus: None,
                torsion_free,
                max_tf_index: None,
            };
            let fast: BTreeSet<String> = enumerate_classes(&c)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|h| h.canonical_code().to_hex())
                .collect();
            let slow: BTreeSet<String> = brute_force_oracle(&c)
                .map_err(|e| e.to_string())?
                .iter()
                .map(|h| h.canonical_code().to_hex())
                .collect();
            expect_eq(
                &format!("index {index}, torsion-free {torsion_free}"),
                fast,
                slow,
            )?;
            compared += 1;
        }
    }
    within(
        "oracle comparison",
        start.elapsed(),
        Duration::from_secs(120),
    )?;
    Ok(format!(
        "{compared} constraint sets in {:.2?}",
        start.elapsed()
    ))
}

fn checks(report: &VerificationReport, names: &[&str]) -> Outcome {
    let mut summary = Vec::new();
    for name in names {
        let c = report
            .checks
            .iter()
            .find(|c| c.name == *name)
            .ok_or_else(|| format!("check {name:?} missing"))?;
        if !c.passed() {
            return Err(format!(
                "{name}: {:?}",
                &c.failures[..c.failures.len().min(3)]
            ));
        }
        summary.push(format!("{} x{}", c.name, c.checked));
    }
    Ok(summary.join("; "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let catalog = build_catalog(24).expect("catalog builds");
    let verify_start = Instant::now();
    let report = verify(&catalog, VerifyOptions::default());
    let verify_time = verify_start.elapsed();

    let criteria: Vec<(&str, Outcome)> = vec![
        (
            "torsion-free class and rooted counts",
            torsion_free_counts(&catalog),
        ),
        (
            "automorphism groups at index 12 and 18",
            automorphism_orders(&catalog),
        ),
        (
            "strata sizes and index-12/18 tables",
            strata_and_tables(&catalog),
        ),
        (
            "index-24 loop and symmetry distribution",
            index_24_distribution(&catalog),
        ),
        ("lift totals", lift_counts(&catalog)),
        (
            "fast enumeration equals brute-force oracle",
            oracle_equivalence(),
        ),
        (
            "catalog property suites",
            checks(
                &report,
                &[
                    "unique codes and ids, retractions present",
                    "stored fields match the hypermap",
                    "index arithmetic",
                    "retract after substitute is the identity",
                    "automorphisms act freely on typed white vertices",
                    "exactly one degenerate substitution",
                    "lift invariants",
                ],
            ),
        ),
        (
            "word round trips and coset statistics",
            checks(
                &report,
                &["matrix to word round trips", "coset action statistics"],
            )
            .and_then(|s| {
                within("verification", verify_time, Duration::from_secs(60))?;
                Ok(s)
            }),
        ),
        (
            "Euler number rules",
            checks(&report, &["Euler number rules"]),
        ),
    ];

    let mut failed = 0;
    for (i, (name, outcome)) in criteria.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.2?}",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
