//! Counting conjugacy classes of `SL(2,Z)` lifts realized on K3 surfaces.
//!
//! A lift either is the full preimage of `Γ̄` in `SL(2,Z)` (2:1) or maps
//! isomorphically onto it (1:1). With `6k` the torsion-free index, 1:1 lifts
//! of a torsion-free class are counted by orbits of star-fibre placements on
//! its faces; the remaining cases follow a fixed table.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::catalog::DessinRecord;
use crate::hypermap::{Hypermap, SubgroupType};
use crate::perm::Permutation;
use crate::torsion::{burnside_count, expand_classes};

/// Largest torsion-free index covered by the rule table.
pub const K3_TF_INDEX: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("class {ty} is outside the K3 range (genus 0, torsion-free index at most 24)")]
    OutOfRange { ty: SubgroupType },
    #[error("index-{index} class with e3 = 1 has {found} face orbits, expected 3")]
    FaceOrbits { index: usize, found: usize },
    #[error("no lift rule for {ty}")]
    NoRule { ty: SubgroupType },
    #[error("record {id} has no lift counts")]
    MissingProfile { id: String },
    #[error("torsion-free class {id} has {found} expansion records, expected {expected}")]
    IncompleteCatalog {
        id: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LiftProfile {
    pub one_to_one: u64,
    pub two_to_one: u64,
}

impl LiftProfile {
    pub fn total(&self) -> u64 {
        self.one_to_one + self.two_to_one
    }
}

/// Number of orbits of face subsets `S` with `|S| ≡ parity (mod 2)` and
/// `|S| ≤ max_size` under the automorphism group.
pub fn star_orbit_count(h: &Hypermap, parity: usize, max_size: usize) -> u64 {
    let aut = h.automorphisms();
    let admissible = |c: crate::torsion::OptionCounts| c.white % 2 == parity && c.white <= max_size;
    burnside_count(&aut.face_action, 2, Some(&admissible))
}

fn orbit_count(action: &[Permutation]) -> usize {
    let fixed: usize = action.iter().map(Permutation::fixed_point_count).sum();
    fixed / action.len()
}

/// True for the classes whose single lift is known to exist but whose kind
/// (1:1 or 2:1) is not determined; they are recorded as 1:1.
pub fn kind_unspecified(ty: &SubgroupType) -> bool {
    ty.tf_index() == K3_TF_INDEX && ty.e2 == 0 && ty.e3 > 0
}

pub fn lift_profile(h: &Hypermap) -> Result<LiftProfile, LiftError> {
    let ty = h.subgroup_type();
    let tf = ty.tf_index();
    if ty.genus != 0 || tf > K3_TF_INDEX {
        return Err(LiftError::OutOfRange { ty });
    }
    let k = tf / 6;
    let profile = |one_to_one| LiftProfile {
        one_to_one,
        two_to_one: 1,
    };
    if ty.e2 > 0 {
        return Ok(LiftProfile {
            one_to_one: 0,
            two_to_one: 1,
        });
    }
    if k == 4 {
        return Ok(LiftProfile {
            one_to_one: 1,
            two_to_one: 0,
        });
    }
    if ty.e3 == 0 {
        return Ok(profile(star_orbit_count(h, k % 2, (K3_TF_INDEX - tf) / 6)));
    }
    let one_to_one = match (k, ty.e3) {
        (1, 1) => 2,
        (1, 2) => 1,
        (2, 1) => {
            let found = orbit_count(&h.automorphisms().face_action);
            if found != 3 {
                return Err(LiftError::FaceOrbits {
                    index: ty.index,
                    found,
                });
            }
            found as u64
        }
        (2, 2) => 1,
        (2, 3) => 0,
        (3, 1) => 1,
        (3, _) => 0,
        _ => return Err(LiftError::NoRule { ty }),
    };
    Ok(profile(one_to_one))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LiftTotals {
    /// Lift classes per torsion-free index.
    pub per_stratum: BTreeMap<usize, u64>,
    pub total: u64,
    pub classes: usize,
    /// Classes with exactly one lift class.
    pub bijective: usize,
    /// Classes with two or more lift classes, and how many lifts they carry.
    pub multi_lift_groups: usize,
    pub multi_lift_lifts: u64,
}

/// Sums the lift counts stored in the records. Every torsion-free record
/// must be accompanied by its full expansion.
pub fn totals(records: &[DessinRecord]) -> Result<LiftTotals, LiftError> {
    let mut children: HashMap<&str, usize> = HashMap::new();
    for r in records {
        *children.entry(r.tf_code.as_str()).or_default() += 1;
    }
    for r in records
        .iter()
        .filter(|r| r.is_torsion_free() && r.tf_index() <= K3_TF_INDEX)
    {
        let h = r.hypermap().expect("validated record decodes");
        let expected = expand_classes(&h).expect("torsion-free").len();
        let found = children
            .get(r.canonical_code.as_str())
            .copied()
            .unwrap_or(0);
        if found != expected {
            return Err(LiftError::IncompleteCatalog {
                id: r.id.clone(),
                expected,
                found,
            });
        }
    }
    let mut t = LiftTotals::default();
    for r in records {
        let p = r
            .lift_profile()
            .ok_or_else(|| LiftError::MissingProfile { id: r.id.clone() })?;
        let n = p.total();
        *t.per_stratum.entry(r.tf_index()).or_default() += n;
        t.total += n;
        t.classes += 1;
        if n == 1 {
            t.bijective += 1;
        } else if n >= 2 {
            t.multi_lift_groups += 1;
            t.multi_lift_lifts += n;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_classes, EnumerationConstraints};
    use crate::hypermap::fixtures::*;

    fn tf_class(index: usize, widths: &[usize]) -> Hypermap {
        enumerate_classes(&EnumerationConstraints::torsion_free_genus_zero(index))
            .unwrap()
            .into_iter()
            .find(|h| h.cusp_widths().0 == widths)
            .unwrap()
    }

    #[test]
    fn star_orbits() {
        assert_eq!(star_orbit_count(&tf_class(12, &[3, 3, 3, 3]), 0, 2), 2);
        assert_eq!(star_orbit_count(&two_two_two(), 1, 3), 2);
        assert_eq!(star_orbit_count(&four_one_one(), 1, 3), 3);
    }

    #[test]
    fn profiles() {
        assert_eq!(
            lift_profile(&four_one_one()).unwrap(),
            LiftProfile {
                one_to_one: 3,
                two_to_one: 1
            }
        );
        assert_eq!(
            lift_profile(&tf_class(12, &[9, 1, 1, 1])).unwrap(),
            LiftProfile {
                one_to_one: 3,
                two_to_one: 1
            }
        );
        assert_eq!(
            lift_profile(&tf_class(12, &[4, 4, 2, 2]))
                .unwrap()
                .one_to_one,
            4
        );
        // Index one: e2 = e3 = 1.
        assert_eq!(
            lift_profile(&Hypermap::trivial()).unwrap(),
            LiftProfile {
                one_to_one: 0,
                two_to_one: 1
            }
        );
        let h1 = enumerate_classes(&EnumerationConstraints::index(4))
            .unwrap()
            .into_iter()
            .find(|h| h.genus() == 0 && h.e2() == 0 && h.e3() == 1)
            .unwrap();
        assert_eq!(
            lift_profile(&h1).unwrap(),
            LiftProfile {
                one_to_one: 2,
                two_to_one: 1
            }
        );
        let h2 = Hypermap::from_images(vec![0, 1], vec![1, 0]).unwrap();
        assert_eq!(
            lift_profile(&h2).unwrap(),
            LiftProfile {
                one_to_one: 1,
                two_to_one: 1
            }
        );
    }

    #[test]
    fn index_24_is_single_lift() {
        let h =
            &enumerate_classes(&EnumerationConstraints::torsion_free_genus_zero(24)).unwrap()[0];
        assert_eq!(lift_profile(h).unwrap().total(), 1);
    }

    #[test]
    fn out_of_range() {
        let torus = EnumerationConstraints {
            genus: Some(1),
            torsion_free: true,
            ..EnumerationConstraints::index(6)
        };
        let h = &enumerate_classes(&torus).unwrap()[0];
        assert!(matches!(lift_profile(h), Err(LiftError::OutOfRange { .. })));
    }
}
