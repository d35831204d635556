//! Consistency checks over a catalog. Each check recomputes a property from
//! the encoded hypermaps and reports every record that violates it.

use std::collections::{HashMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::DessinRecord;
use crate::euler::{corollary, minimal_euler, minimal_euler_tf};
use crate::hypermap::Hypermap;
use crate::slwords::{check_statistics, eval_word, random_matrix, random_word, word_of_matrix};
use crate::torsion::{substitute, tf_retract, Assignment, TorsionError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Random matrices for the word round-trip check.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 0x6b33,
        }
    }
}

/// Runs a per-record predicate in parallel.
fn per_record<F>(name: &'static str, records: &[(DessinRecord, Hypermap)], f: F) -> CheckResult
where
    F: Fn(&DessinRecord, &Hypermap) -> Result<(), String> + Sync,
{
    let failures = records
        .par_iter()
        .filter_map(|(r, h)| f(r, h).err().map(|e| format!("{}: {e}", r.id)))
        .collect();
    CheckResult {
        name,
        checked: records.len(),
        failures,
    }
}

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn fields_match(r: &DessinRecord, h: &Hypermap) -> Result<(), String> {
    let fresh = DessinRecord::from_hypermap(h);
    ensure(fresh.canonical_code == r.canonical_code, || {
        "code is not canonical".into()
    })?;
    let got = (r.index, r.genus, r.h, r.e2, r.e3, r.aut_order, r.loop_count);
    let want = (
        fresh.index,
        fresh.genus,
        fresh.h,
        fresh.e2,
        fresh.e3,
        fresh.aut_order,
        fresh.loop_count,
    );
    ensure(got == want, || {
        format!("stored {got:?}, recomputed {want:?}")
    })?;
    ensure(fresh.cusp_widths == r.cusp_widths, || {
        "cusp widths differ".into()
    })?;
    ensure(fresh.tf_code == r.tf_code, || {
        "tf_code is not the retraction".into()
    })?;
    ensure(fresh.assignment == r.assignment, || {
        "assignment counts differ".into()
    })
}

fn numerology(r: &DessinRecord, _: &Hypermap) -> Result<(), String> {
    let n = r.index;
    let twelve_g = 12 + n as i64 - 3 * r.e2 as i64 - 4 * r.e3 as i64 - 6 * r.h as i64;
    ensure(twelve_g >= 0 && twelve_g % 12 == 0, || {
        format!("12g = {twelve_g}")
    })?;
    ensure(twelve_g / 12 == r.genus as i64, || {
        "genus disagrees with Riemann-Hurwitz".into()
    })?;
    ensure(r.genus == 0, || "catalog rows must have genus 0".into())?;
    ensure(r.cusp_widths.iter().sum::<usize>() == n, || {
        "widths do not sum to index".into()
    })?;
    ensure(r.e2 % 2 == n % 2, || "e2 and index differ in parity".into())?;
    ensure(r.e3 % 3 == n % 3, || "e3 and index differ mod 3".into())?;
    ensure(n + 3 * r.e2 + 2 * r.e3 == r.tf_index(), || {
        "index + 3e2 + 2e3 is not the tf index".into()
    })?;
    let k = r.tf_index() / 6;
    ensure(
        r.tf_index().is_multiple_of(6) && r.e2 + r.e3 <= k + 1,
        || format!("e2 + e3 = {} exceeds k + 1 = {}", r.e2 + r.e3, k + 1),
    )
}

/// Every non-identity automorphism may only fix trivalent white vertices of a
/// type `a|a|a`, and then rotates them, so 3 divides the group order.
fn free_on_typed_vertices(_: &DessinRecord, h: &Hypermap) -> Result<(), String> {
    let aut = h.automorphisms();
    let types = h.white_vertex_types();
    for g in aut.elements.iter().filter(|g| !g.is_identity()) {
        for (cycle, ty) in &types {
            if cycle.contains(&g.apply(cycle[0])) {
                ensure(ty.is_uniform(), || {
                    format!("automorphism fixes a vertex of type {ty}")
                })?;
                ensure(aut.order().is_multiple_of(3), || {
                    "vertex rotation without 3 | |Aut|".into()
                })?;
            }
        }
    }
    Ok(())
}

fn coset_statistics(_: &DessinRecord, h: &Hypermap) -> Result<(), String> {
    check_statistics(h)
}

fn lift_invariants(r: &DessinRecord, _: &Hypermap) -> Result<(), String> {
    let Some(p) = r.lift_profile() else {
        return Ok(());
    };
    ensure(p.two_to_one <= 1, || "more than one 2:1 lift".into())?;
    ensure(r.e2 == 0 || p.one_to_one == 0, || {
        "1:1 lift despite 2-torsion".into()
    })?;
    ensure(p.total() >= 1, || "no lift at all".into())
}

fn euler_rules(r: &DessinRecord, _: &Hypermap) -> Result<(), String> {
    let ty = r.subgroup_type();
    let tf = r.tf_index();
    let min = minimal_euler(&ty).map_err(|e| e.to_string())?;
    let by_rule = if tf.is_multiple_of(12) { tf } else { tf + 6 } as u64;
    ensure(min == by_rule, || {
        format!("minimal Euler number {min}, rule gives {by_rule}")
    })?;
    ensure(
        min == minimal_euler_tf(tf).map_err(|e| e.to_string())?,
        || "differs from tf class".into(),
    )?;
    let from_corollary = (0..=1)
        .map(|stars| corollary(&ty, stars))
        .filter(|e| e % 12 == 0)
        .min();
    ensure(from_corollary == Some(min), || {
        format!("corollary with at most one star gives {from_corollary:?}, expected {min}")
    })
}

/// Substituting any assignment into a torsion-free class and retracting
/// again must give back the class; returns the number of degenerate
/// substitutions together with the records they came from.
fn retraction_round_trips(records: &[(DessinRecord, Hypermap)]) -> (CheckResult, Vec<String>) {
    let results: Vec<(Vec<String>, Vec<String>, usize)> = records
        .par_iter()
        .filter(|(r, _)| r.is_torsion_free())
        .map(|(r, h)| {
            let mut failures = Vec::new();
            let mut degenerate = Vec::new();
            let mut checked = 0;
            for a in Assignment::all(r.loop_count) {
                checked += 1;
                match substitute(h, &a) {
                    Ok(x) => {
                        if !tf_retract(&x).is_isomorphic(h) {
                            failures.push(format!("{}: retraction after {a} differs", r.id));
                        }
                    }
                    Err(TorsionError::DegenerateSubstitution) => {
                        degenerate.push(format!("{} {a}", r.id));
                    }
                    Err(e) => failures.push(format!("{}: {e}", r.id)),
                }
            }
            (failures, degenerate, checked)
        })
        .collect();
    let mut check = CheckResult {
        name: "retract after substitute is the identity",
        checked: 0,
        failures: Vec::new(),
    };
    let mut degenerate = Vec::new();
    for (f, d, c) in results {
        check.failures.extend(f);
        degenerate.extend(d);
        check.checked += c;
    }
    (check, degenerate)
}

fn uniqueness(records: &[DessinRecord]) -> CheckResult {
    let mut failures = Vec::new();
    let mut codes = HashSet::new();
    let mut ids = HashSet::new();
    for r in records {
        if !codes.insert(&r.canonical_code) {
            failures.push(format!("{}: duplicate canonical code", r.id));
        }
        if !ids.insert(&r.id) {
            failures.push(format!("{}: duplicate id", r.id));
        }
    }
    let present: HashMap<&str, &DessinRecord> = records
        .iter()
        .map(|r| (r.canonical_code.as_str(), r))
        .collect();
    for r in records {
        match present.get(r.tf_code.as_str()) {
            Some(tf) if tf.is_torsion_free() => {}
            _ => failures.push(format!(
                "{}: torsion-free retraction missing from catalog",
                r.id
            )),
        }
    }
    CheckResult {
        name: "unique codes and ids, retractions present",
        checked: records.len(),
        failures,
    }
}

fn word_round_trips(opts: VerifyOptions) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut failures = Vec::new();
    for i in 0..opts.samples {
        let m = if i % 2 == 0 {
            random_matrix(&mut rng, 1_000_000)
        } else {
            eval_word(&random_word(&mut rng, 30, 12))
        };
        let (word, sign) = word_of_matrix(&m);
        if eval_word(&word) != sign.apply(&m) {
            failures.push(format!("sample {i}: {m}"));
        }
    }
    CheckResult {
        name: "matrix to word round trips",
        checked: opts.samples,
        failures,
    }
}

pub fn verify(records: &[DessinRecord], opts: VerifyOptions) -> VerificationReport {
    let decoded: Vec<(DessinRecord, Hypermap)> = records
        .par_iter()
        .filter_map(|r| r.hypermap().ok().map(|h| (r.clone(), h)))
        .collect();
    let mut checks = Vec::new();
    if decoded.len() != records.len() {
        checks.push(CheckResult {
            name: "codes decode",
            checked: records.len(),
            failures: vec![format!(
                "{} records do not decode",
                records.len() - decoded.len()
            )],
        });
    }
    checks.push(uniqueness(records));
    checks.push(per_record(
        "stored fields match the hypermap",
        &decoded,
        fields_match,
    ));
    checks.push(per_record("index arithmetic", &decoded, numerology));
    checks.push(per_record(
        "automorphisms act freely on typed white vertices",
        &decoded,
        free_on_typed_vertices,
    ));
    checks.push(per_record(
        "coset action statistics",
        &decoded,
        coset_statistics,
    ));
    checks.push(per_record("lift invariants", &decoded, lift_invariants));
    checks.push(per_record("Euler number rules", &decoded, euler_rules));
    let (round_trips, degenerate) = retraction_round_trips(&decoded);
    checks.push(round_trips);
    let only_four_one_one = degenerate.len() == 1
        && degenerate[0].starts_with("4,1,1-")
        && degenerate[0].ends_with(" BB");
    checks.push(CheckResult {
        name: "exactly one degenerate substitution",
        checked: 1,
        failures: if only_four_one_one {
            Vec::new()
        } else {
            vec![format!("degenerate substitutions: {degenerate:?}")]
        },
    });
    checks.push(word_round_trips(opts));
    VerificationReport { checks }
}
