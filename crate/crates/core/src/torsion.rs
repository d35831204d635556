//! Surgeries between torsion-free dessins and dessins with univalent
//! vertices.
//!
//! In a torsion-free dessin a loop is a width-one face: an edge `e` with
//! `σ(α(e)) = e`. Its white vertex is the `σ`-cycle `(e, attach, partner)`
//! with `partner = α(e)`. Removing the loop leaves `attach` as a univalent
//! white vertex (`e₃ += 1`, two edges fewer); removing the loop together with
//! `attach` leaves `α(attach)` as a univalent black vertex (`e₂ += 1`, three
//! edges fewer). The retraction [`tf_retract`] undoes both.

use std::fmt;

use thiserror::Error;

use crate::hypermap::{Hypermap, HypermapError};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorsionError {
    #[error("expected a torsion-free hypermap")]
    NotTorsionFree,
    #[error("assignment has {found} entries but the dessin has {expected} loops")]
    AssignmentLength { expected: usize, found: usize },
    #[error("substitution leaves an empty or disconnected dessin")]
    DegenerateSubstitution,
}

/// Local structure of one loop of a torsion-free dessin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopSite {
    pub fixed_edge: usize,
    pub partner: usize,
    pub attach: usize,
    pub attach_partner: usize,
}

/// All loops, ordered by `fixed_edge`.
pub fn loops(h: &Hypermap) -> Vec<LoopSite> {
    h.loop_edges()
        .into_iter()
        .map(|e| {
            let attach = h.sigma().apply(e);
            LoopSite {
                fixed_edge: e,
                partner: h.alpha().apply(e),
                attach,
                attach_partner: h.alpha().apply(attach),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Choice {
    Keep,
    /// Replace the loop by a univalent white vertex.
    White,
    /// Replace the loop and its attaching edge by a univalent black vertex.
    Black,
}

impl Choice {
    pub const ALL: [Choice; 3] = [Choice::Keep, Choice::White, Choice::Black];
}

/// One choice per loop, in the order returned by [`loops`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<Choice>);

impl Assignment {
    pub fn keep_all(loops: usize) -> Self {
        Self(vec![Choice::Keep; loops])
    }

    pub fn whites(&self) -> usize {
        self.0.iter().filter(|&&c| c == Choice::White).count()
    }

    pub fn blacks(&self) -> usize {
        self.0.iter().filter(|&&c| c == Choice::Black).count()
    }

    /// The assignment moved along a permutation of the loops: loop `i`
    /// receives the choice of loop `action⁻¹(i)`.
    pub fn permuted(&self, action: &Permutation) -> Assignment {
        let mut out = self.0.clone();
        for (i, &c) in self.0.iter().enumerate() {
            out[action.apply(i)] = c;
        }
        Assignment(out)
    }

    /// All `3^L` assignments in lexicographic order.
    pub fn all(loops: usize) -> impl Iterator<Item = Assignment> {
        let total = 3usize.pow(loops as u32);
        (0..total).map(move |mut code| {
            let mut choices = vec![Choice::Keep; loops];
            for slot in choices.iter_mut().rev() {
                *slot = Choice::ALL[code % 3];
                code /= 3;
            }
            Assignment(choices)
        })
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            f.write_str(match c {
                Choice::Keep => "K",
                Choice::White => "W",
                Choice::Black => "B",
            })?;
        }
        Ok(())
    }
}

/// Applies the assignment to a torsion-free dessin. Loops are processed in
/// ascending order; the surviving edges keep their relative order.
pub fn substitute(h_tf: &Hypermap, assignment: &Assignment) -> Result<Hypermap, TorsionError> {
    if !h_tf.is_torsion_free() {
        return Err(TorsionError::NotTorsionFree);
    }
    let sites = loops(h_tf);
    if sites.len() != assignment.0.len() {
        return Err(TorsionError::AssignmentLength {
            expected: sites.len(),
            found: assignment.0.len(),
        });
    }
    let n = h_tf.n();
    let mut sigma = h_tf.sigma().images().to_vec();
    let mut alpha = h_tf.alpha().images().to_vec();
    let mut deleted = vec![false; n];
    for (site, choice) in sites.iter().zip(&assignment.0) {
        match choice {
            Choice::Keep => {}
            Choice::White => {
                deleted[site.fixed_edge] = true;
                deleted[site.partner] = true;
                sigma[site.attach] = site.attach;
            }
            Choice::Black => {
                deleted[site.fixed_edge] = true;
                deleted[site.partner] = true;
                deleted[site.attach] = true;
                alpha[site.attach_partner] = site.attach_partner;
            }
        }
    }
    let survivors: Vec<usize> = (0..n).filter(|&e| !deleted[e]).collect();
    if survivors.is_empty() {
        return Err(TorsionError::DegenerateSubstitution);
    }
    let mut new_label = vec![usize::MAX; n];
    for (i, &e) in survivors.iter().enumerate() {
        new_label[e] = i;
    }
    let remap = |images: &[usize]| -> Vec<usize> {
        survivors.iter().map(|&e| new_label[images[e]]).collect()
    };
    let (sigma, alpha) = (remap(&sigma), remap(&alpha));
    debug_assert!(sigma.iter().chain(&alpha).all(|&x| x != usize::MAX));
    match Hypermap::from_images(sigma, alpha) {
        Ok(h) => Ok(h),
        Err(HypermapError::NotTransitive) => Err(TorsionError::DegenerateSubstitution),
        Err(e) => panic!("substitution produced an invalid hypermap: {e}"),
    }
}

/// Replaces every univalent white vertex by a trivalent vertex carrying a
/// loop and every univalent black vertex by a three-edge gadget ending in a
/// loop. New edges are appended after the existing ones.
pub fn tf_retract(h: &Hypermap) -> Hypermap {
    let mut sigma = h.sigma().images().to_vec();
    let mut alpha = h.alpha().images().to_vec();
    let whites: Vec<usize> = h.sigma().fixed_points().collect();
    let blacks: Vec<usize> = h.alpha().fixed_points().collect();
    for a in whites {
        attach_loop(a, &mut sigma, &mut alpha);
    }
    for x in blacks {
        let attach = push_edge(&mut sigma, &mut alpha);
        alpha[x] = attach;
        alpha[attach] = x;
        attach_loop(attach, &mut sigma, &mut alpha);
    }
    Hypermap::from_images(sigma, alpha).expect("retraction is a valid hypermap")
}

fn push_edge(sigma: &mut Vec<usize>, alpha: &mut Vec<usize>) -> usize {
    sigma.push(usize::MAX);
    alpha.push(usize::MAX);
    sigma.len() - 1
}

/// Gives the edge `attach` (with `σ(attach)` unset) a loop at its white vertex.
fn attach_loop(attach: usize, sigma: &mut Vec<usize>, alpha: &mut Vec<usize>) {
    let e = push_edge(sigma, alpha);
    let p = push_edge(sigma, alpha);
    // σ-cycle (e, attach, p); α swaps e and p, so σ(α(e)) = e.
    sigma[e] = attach;
    sigma[attach] = p;
    sigma[p] = e;
    alpha[e] = p;
    alpha[p] = e;
}

/// One Aut-orbit of valid assignments together with its dessin.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub assignment: Assignment,
    pub hypermap: Hypermap,
}

/// Checks that every non-identity element moves every loop.
fn assert_free_on_loops(loop_action: &[Permutation]) {
    for g in loop_action.iter().filter(|g| !g.is_identity()) {
        assert_eq!(
            g.fixed_point_count(),
            0,
            "automorphism group must act freely on loops"
        );
    }
}

/// The lexicographically smallest assignment in each orbit under the loop
/// action, in ascending order.
pub fn orbit_representatives(loop_count: usize, loop_action: &[Permutation]) -> Vec<Assignment> {
    Assignment::all(loop_count)
        .filter(|a| loop_action.iter().all(|g| a.permuted(g) >= *a))
        .collect()
}

/// Every class over `h_tf`: one representative per Aut-orbit of
/// assignments, the all-`Keep` one first, degenerate results dropped.
pub fn expand_classes(h_tf: &Hypermap) -> Result<Vec<Expansion>, TorsionError> {
    if !h_tf.is_torsion_free() {
        return Err(TorsionError::NotTorsionFree);
    }
    let aut = h_tf.automorphisms();
    assert_free_on_loops(&aut.loop_action);
    let mut out = Vec::new();
    for assignment in orbit_representatives(aut.loop_faces.len(), &aut.loop_action) {
        match substitute(h_tf, &assignment) {
            Ok(hypermap) => out.push(Expansion {
                assignment,
                hypermap,
            }),
            Err(TorsionError::DegenerateSubstitution) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Per-assignment option tallies used by [`burnside_count`] restrictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OptionCounts {
    pub keep: usize,
    pub white: usize,
    pub black: usize,
}

/// Number of orbits of assignments `loops → options` under a permutation
/// action, restricted to assignments whose tallies satisfy `restriction`.
///
/// With `options = 2` the options are `Keep` and `White`; with `3`, `Black`
/// is added. Computed as the average over group elements of the number of
/// admissible assignments constant on each cycle of the element.
pub fn burnside_count(
    loop_action: &[Permutation],
    options: usize,
    restriction: Option<&dyn Fn(OptionCounts) -> bool>,
) -> u64 {
    assert!(
        options == 2 || options == 3,
        "options per loop must be 2 or 3"
    );
    assert!(!loop_action.is_empty(), "group must contain the identity");
    let loops = loop_action[0].degree();
    let mut total: u64 = 0;
    for g in loop_action {
        // fixed[w][b] = number of g-invariant assignments with w whites and
        // b blacks.
        let mut fixed = vec![vec![0u64; loops + 1]; loops + 1];
        fixed[0][0] = 1;
        for cycle in g.cycles() {
            let len = cycle.len();
            let mut next = vec![vec![0u64; loops + 1]; loops + 1];
            for w in 0..=loops {
                for b in 0..=loops {
                    let count = fixed[w][b];
                    if count == 0 {
                        continue;
                    }
                    next[w][b] += count;
                    if w + b + len <= loops {
                        next[w + len][b] += count;
                        if options == 3 {
                            next[w][b + len] += count;
                        }
                    }
                }
            }
            fixed = next;
        }
        for (w, row) in fixed.iter().enumerate() {
            for (b, &count) in row.iter().enumerate().take(loops + 1 - w) {
                let tally = OptionCounts {
                    keep: loops - w - b,
                    white: w,
                    black: b,
                };
                if restriction.is_none_or(|r| r(tally)) {
                    total += count;
                }
            }
        }
    }
    let order = loop_action.len() as u64;
    assert_eq!(
        total % order,
        0,
        "Burnside sum must be divisible by the group order"
    );
    total / order
}

/// The cyclic group generated by `generator`, as a list of its powers.
pub fn cyclic_group(generator: &Permutation) -> Vec<Permutation> {
    let mut out = vec![Permutation::identity(generator.degree())];
    let mut g = generator.clone();
    while !g.is_identity() {
        out.push(g.clone());
        g = generator.compose(&g);
    }
    out
}
