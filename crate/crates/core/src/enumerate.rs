//! Enumeration of conjugacy classes of finite-index subgroups of the modular
//! group as hypermaps.
//!
//! The search builds the joint action of `σ` and `α` one coset at a time, in
//! the style of a low-index-subgroups coset table. Points are labeled in order
//! of first appearance while scanning slots `α(p)`, `σ(p)` for
//! `p = 0, 1, 2, ...`, so every rooted hypermap (equivalently every subgroup)
//! is produced exactly once. Conjugacy classes are then obtained by
//! deduplicating on canonical codes.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::hypermap::{CanonicalCode, Hypermap};

/// Largest index accepted by [`brute_force_oracle`].
pub const ORACLE_MAX_INDEX: usize = 12;

/// Largest index accepted by [`enumerate_classes`].
pub const MAX_INDEX: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("index must be at least 1")]
    ZeroIndex,
    #[error("index {index} exceeds the supported bound {bound}")]
    ResourceBound { index: usize, bound: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnumerationConstraints {
    pub index: usize,
    pub genus: Option<usize>,
    /// Require `e₂ = e₃ = 0`.
    pub torsion_free: bool,
    /// Bound on `n + 3e₂ + 2e₃`, the index of the torsion-free retraction.
    pub max_tf_index: Option<usize>,
}

impl EnumerationConstraints {
    pub fn index(index: usize) -> Self {
        Self {
            index,
            ..Self::default()
        }
    }

    pub fn torsion_free_genus_zero(index: usize) -> Self {
        Self {
            index,
            genus: Some(0),
            torsion_free: true,
            max_tf_index: None,
        }
    }

    fn validate(&self, bound: usize) -> Result<(), EnumerationError> {
        if self.index == 0 {
            return Err(EnumerationError::ZeroIndex);
        }
        if self.index > bound {
            return Err(EnumerationError::ResourceBound {
                index: self.index,
                bound,
            });
        }
        Ok(())
    }

    fn fixed_points_allowed(&self, e2: usize, e3: usize) -> bool {
        if self.torsion_free && (e2 > 0 || e3 > 0) {
            return false;
        }
        match self.max_tf_index {
            Some(bound) => self.index + 3 * e2 + 2 * e3 <= bound,
            None => true,
        }
    }

    /// Whether a complete hypermap satisfies every constraint.
    pub fn accepts(&self, h: &Hypermap) -> bool {
        h.n() == self.index
            && self.fixed_points_allowed(h.e2(), h.e3())
            && self.genus.is_none_or(|g| h.genus() == g)
    }
}

/// Classes found by the search, plus the number of rooted hypermaps
/// (subgroups) visited on the way.
#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Canonical representatives sorted by canonical code.
    pub classes: Vec<(CanonicalCode, Hypermap)>,
    pub rooted: usize,
}

const UNSET: usize = usize::MAX;

#[derive(Clone)]
struct Partial {
    sigma: Vec<usize>,
    alpha: Vec<usize>,
    labeled: usize,
    e2: usize,
    e3: usize,
}

enum Slot {
    Alpha(usize),
    Sigma(usize),
}

impl Partial {
    fn root(n: usize) -> Self {
        Self {
            sigma: vec![UNSET; n],
            alpha: vec![UNSET; n],
            labeled: 1,
            e2: 0,
            e3: 0,
        }
    }

    fn next_slot(&self) -> Option<Slot> {
        (0..self.labeled).find_map(|p| {
            if self.alpha[p] == UNSET {
                Some(Slot::Alpha(p))
            } else if self.sigma[p] == UNSET {
                Some(Slot::Sigma(p))
            } else {
                None
            }
        })
    }

    fn children(&self, c: &EnumerationConstraints, slot: Slot) -> Vec<Partial> {
        let n = c.index;
        let mut out = Vec::new();
        match slot {
            Slot::Alpha(p) => {
                if c.fixed_points_allowed(self.e2 + 1, self.e3) {
                    let mut child = self.clone();
                    child.alpha[p] = p;
                    child.e2 += 1;
                    out.push(child);
                }
                for q in p + 1..self.labeled {
                    if self.alpha[q] == UNSET {
                        let mut child = self.clone();
                        child.alpha[p] = q;
                        child.alpha[q] = p;
                        out.push(child);
                    }
                }
                if self.labeled < n {
                    let q = self.labeled;
                    let mut child = self.clone();
                    child.labeled += 1;
                    child.alpha[p] = q;
                    child.alpha[q] = p;
                    out.push(child);
                }
            }
            Slot::Sigma(p) => {
                if c.fixed_points_allowed(self.e2, self.e3 + 1) {
                    let mut child = self.clone();
                    child.sigma[p] = p;
                    child.e3 += 1;
                    out.push(child);
                }
                // Existing candidates for σ(p), then a fresh point.
                let free: Vec<usize> = (p + 1..self.labeled)
                    .filter(|&q| self.sigma[q] == UNSET)
                    .collect();
                let mut firsts: Vec<(usize, usize)> =
                    free.iter().map(|&q| (q, self.labeled)).collect();
                if self.labeled < n {
                    firsts.push((self.labeled, self.labeled + 1));
                }
                for (q, labeled_after_q) in firsts {
                    let mut seconds: Vec<(usize, usize)> = free
                        .iter()
                        .filter(|&&r| r != q)
                        .map(|&r| (r, labeled_after_q))
                        .collect();
                    if labeled_after_q < n {
                        seconds.push((labeled_after_q, labeled_after_q + 1));
                    }
                    for (r, labeled_after_r) in seconds {
                        let mut child = self.clone();
                        child.labeled = labeled_after_r;
                        child.sigma[p] = q;
                        child.sigma[q] = r;
                        child.sigma[r] = p;
                        out.push(child);
                    }
                }
            }
        }
        out
    }

    fn into_hypermap(self) -> Hypermap {
        Hypermap::from_images(self.sigma, self.alpha)
            .expect("complete coset table is a valid hypermap")
    }
}

#[derive(Default)]
struct Harvest {
    classes: BTreeMap<CanonicalCode, Hypermap>,
    rooted: usize,
}

impl Harvest {
    fn merge(mut self, other: Harvest) -> Harvest {
        self.rooted += other.rooted;
        for (code, h) in other.classes {
            self.classes.entry(code).or_insert(h);
        }
        self
    }
}

enum Step {
    Leaf(Hypermap),
    Dead,
    Branch(Vec<Partial>),
}

fn step(node: Partial, c: &EnumerationConstraints) -> Step {
    match node.next_slot() {
        Some(slot) => Step::Branch(node.children(c, slot)),
        None if node.labeled == c.index => Step::Leaf(node.into_hypermap()),
        None => Step::Dead,
    }
}

fn harvest_leaf(h: Hypermap, c: &EnumerationConstraints, out: &mut Harvest) {
    if let Some(g) = c.genus {
        if h.genus() != g {
            return;
        }
    }
    out.rooted += 1;
    // Only the minimizing root contributes; the representative is the
    // canonical form, so the result does not depend on visiting order.
    let code = h.canonical_code();
    if h.rooted_code(0) == code.as_bytes() {
        out.classes
            .entry(code.clone())
            .or_insert_with(|| code.decode().expect("canonical code decodes"));
    }
}

fn search(node: Partial, c: &EnumerationConstraints, out: &mut Harvest) {
    match step(node, c) {
        Step::Leaf(h) => harvest_leaf(h, c, out),
        Step::Dead => {}
        Step::Branch(children) => {
            for child in children {
                search(child, c, out);
            }
        }
    }
}

const PARALLEL_FRONTIER: usize = 256;

/// Runs the search and returns classes plus the rooted count.
pub fn enumerate(c: &EnumerationConstraints) -> Result<Enumeration, EnumerationError> {
    c.validate(MAX_INDEX)?;
    let mut harvest = Harvest::default();
    let mut frontier = vec![Partial::root(c.index)];
    // Expand breadth-first until there is enough independent work.
    while !frontier.is_empty() && frontier.len() < PARALLEL_FRONTIER {
        let mut next = Vec::new();
        for node in frontier {
            match step(node, c) {
                Step::Leaf(h) => harvest_leaf(h, c, &mut harvest),
                Step::Dead => {}
                Step::Branch(children) => next.extend(children),
            }
        }
        frontier = next;
    }
    let harvest = frontier
        .into_par_iter()
        .map(|node| {
            let mut local = Harvest::default();
            search(node, c, &mut local);
            local
        })
        .reduce(Harvest::default, Harvest::merge)
        .merge(harvest);
    Ok(Enumeration {
        classes: harvest.classes.into_iter().collect(),
        rooted: harvest.rooted,
    })
}

/// One canonical representative per class, sorted by canonical code.
pub fn enumerate_classes(c: &EnumerationConstraints) -> Result<Vec<Hypermap>, EnumerationError> {
    Ok(enumerate(c)?.classes.into_iter().map(|(_, h)| h).collect())
}

/// `Σ n/|Aut|` over the classes: the number of subgroups they represent.
pub fn rooted_count(classes: &[Hypermap]) -> usize {
    classes
        .iter()
        .map(|h| {
            let order = h.automorphisms().order();
            debug_assert_eq!(h.n() % order, 0);
            h.n() / order
        })
        .sum()
}

/// All `x` with `x² = id`, restricted to fixed-point-free ones when asked.
fn involutions(n: usize, fixed_point_free: bool) -> Vec<Vec<usize>> {
    fn rec(images: &mut Vec<usize>, fpf: bool, out: &mut Vec<Vec<usize>>) {
        let Some(p) = images.iter().position(|&x| x == UNSET) else {
            out.push(images.clone());
            return;
        };
        if !fpf {
            images[p] = p;
            rec(images, fpf, out);
        }
        for q in p + 1..images.len() {
            if images[q] == UNSET {
                images[p] = q;
                images[q] = p;
                rec(images, fpf, out);
                images[q] = UNSET;
            }
        }
        images[p] = UNSET;
    }
    let mut out = Vec::new();
    rec(&mut vec![UNSET; n], fixed_point_free, &mut out);
    out
}

/// All `x` with `x³ = id`, restricted to fixed-point-free ones when asked.
fn order_three_elements(n: usize, fixed_point_free: bool) -> Vec<Vec<usize>> {
    fn rec(images: &mut Vec<usize>, fpf: bool, out: &mut Vec<Vec<usize>>) {
        let Some(p) = images.iter().position(|&x| x == UNSET) else {
            out.push(images.clone());
            return;
        };
        if !fpf {
            images[p] = p;
            rec(images, fpf, out);
        }
        let n = images.len();
        for q in p + 1..n {
            for r in p + 1..n {
                if q != r && images[q] == UNSET && images[r] == UNSET {
                    images[p] = q;
                    images[q] = r;
                    images[r] = p;
                    rec(images, fpf, out);
                    images[q] = UNSET;
                    images[r] = UNSET;
                }
            }
        }
        images[p] = UNSET;
    }
    let mut out = Vec::new();
    rec(&mut vec![UNSET; n], fixed_point_free, &mut out);
    out
}

fn joint_orbit_is_everything(sigma: &[usize], alpha: &[usize]) -> bool {
    let n = sigma.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for p in 0..n {
        for q in [sigma[p], alpha[p]] {
            let (a, b) = (find(&mut parent, p), find(&mut parent, q));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
    }
    components == 1
}

/// Exhaustive reference enumeration: every pair `(σ, α)` with `σ³ = α² = id`,
/// filtered for transitivity and the constraints, bucketed by canonical code.
pub fn brute_force_oracle(c: &EnumerationConstraints) -> Result<Vec<Hypermap>, EnumerationError> {
    c.validate(ORACLE_MAX_INDEX)?;
    let n = c.index;
    let alphas = involutions(n, c.torsion_free);
    let sigmas = order_three_elements(n, c.torsion_free);
    let buckets = sigmas
        .par_iter()
        .map(|sigma| {
            let mut local = BTreeMap::new();
            for alpha in &alphas {
                if !joint_orbit_is_everything(sigma, alpha) {
                    continue;
                }
                let h = Hypermap::from_images(sigma.clone(), alpha.clone()).expect("valid pair");
                if c.accepts(&h) {
                    local.entry(h.canonical_code()).or_insert(h);
                }
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                a.entry(k).or_insert(v);
            }
            a
        });
    Ok(buckets
        .into_values()
        .map(|h| h.canonical_form().1)
        .collect())
}
