//! Hypermaps with `σ³ = α² = id`: one per conjugacy class of finite-index
//! subgroups of the modular group.
//!
//! Edges are the points `0..n`. White vertices are the cycles of `σ`, black
//! vertices the cycles of `α`. Faces are the cycles of the face permutation
//! `φ = σ ∘ α` (apply `α`, then `σ`); their lengths are the cusp widths. A loop
//! is a face of width one.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{Permutation, PermutationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Sigma,
    Alpha,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Sigma => f.write_str("sigma"),
            Generator::Alpha => f.write_str("alpha"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypermapError {
    #[error("hypermap must have at least one edge")]
    Empty,
    #[error("sigma has degree {sigma} but alpha has degree {alpha}")]
    DegreeMismatch { sigma: usize, alpha: usize },
    #[error("{0} does not have the required order")]
    OrderViolation(Generator),
    #[error("sigma and alpha do not act transitively")]
    NotTransitive,
    #[error("malformed canonical code: {0}")]
    BadCode(String),
    #[error(transparent)]
    Permutation(#[from] PermutationError),
}

/// `(n; g, h, e₂, e₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubgroupType {
    pub index: usize,
    pub genus: usize,
    pub cusps: usize,
    pub e2: usize,
    pub e3: usize,
}

impl SubgroupType {
    /// Solves `g = 1 + n/12 − e₂/4 − e₃/3 − h/2` for `g`. Returns `None`
    /// unless the genus is a non-negative integer.
    pub fn from_counts(index: usize, cusps: usize, e2: usize, e3: usize) -> Option<Self> {
        let twelve_g = 12 + index as i64 - 3 * e2 as i64 - 4 * e3 as i64 - 6 * cusps as i64;
        if cusps == 0 || twelve_g < 0 || twelve_g % 12 != 0 {
            return None;
        }
        Some(Self {
            index,
            genus: (twelve_g / 12) as usize,
            cusps,
            e2,
            e3,
        })
    }

    pub fn is_torsion_free(&self) -> bool {
        self.e2 == 0 && self.e3 == 0
    }

    /// Index of the torsion-free retraction: `n + 3e₂ + 2e₃`.
    pub fn tf_index(&self) -> usize {
        self.index + 3 * self.e2 + 2 * self.e3
    }
}

impl fmt::Display for SubgroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}; {}, {}, {}, {})",
            self.index, self.genus, self.cusps, self.e2, self.e3
        )
    }
}

/// Cusp widths in descending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CuspWidths(pub Vec<usize>);

impl CuspWidths {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn count(&self) -> usize {
        self.0.len()
    }

    pub fn loops(&self) -> usize {
        self.0.iter().filter(|&&w| w == 1).count()
    }
}

impl fmt::Display for CuspWidths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Relabeling-invariant serialization: byte 0 is `n`, then the `n` images of
/// `σ`, then the `n` images of `α`, under the breadth-first labeling that is
/// lexicographically smallest over all roots.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, HypermapError> {
        let bytes = hex::decode(s).map_err(|e| HypermapError::BadCode(e.to_string()))?;
        let n = *bytes
            .first()
            .ok_or_else(|| HypermapError::BadCode("empty code".into()))? as usize;
        if bytes.len() != 1 + 2 * n {
            return Err(HypermapError::BadCode(format!(
                "expected {} bytes for degree {n}, found {}",
                1 + 2 * n,
                bytes.len()
            )));
        }
        Ok(Self(bytes))
    }

    /// Edge count encoded in the first byte.
    pub fn index(&self) -> usize {
        self.0[0] as usize
    }

    /// Rebuilds the hypermap in its canonical labeling.
    pub fn decode(&self) -> Result<Hypermap, HypermapError> {
        let n = self.index();
        let sigma = self.0[1..1 + n].iter().map(|&b| b as usize).collect();
        let alpha = self.0[1 + n..].iter().map(|&b| b as usize).collect();
        Hypermap::from_images(sigma, alpha)
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", self.to_hex())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypermap {
    sigma: Permutation,
    alpha: Permutation,
}

impl fmt::Debug for Hypermap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Hypermap {{ n: {}, sigma: {}, alpha: {} }}",
            self.n(),
            self.sigma,
            self.alpha
        )
    }
}

impl Hypermap {
    /// Validates `σ³ = α² = id` and transitivity.
    pub fn new(sigma: Permutation, alpha: Permutation) -> Result<Self, HypermapError> {
        let n = sigma.degree();
        if n == 0 {
            return Err(HypermapError::Empty);
        }
        if alpha.degree() != n {
            return Err(HypermapError::DegreeMismatch {
                sigma: n,
                alpha: alpha.degree(),
            });
        }
        if (0..n).any(|e| sigma.apply(sigma.apply(sigma.apply(e))) != e) {
            return Err(HypermapError::OrderViolation(Generator::Sigma));
        }
        if (0..n).any(|e| alpha.apply(alpha.apply(e)) != e) {
            return Err(HypermapError::OrderViolation(Generator::Alpha));
        }
        if !is_transitive(sigma.images(), alpha.images()) {
            return Err(HypermapError::NotTransitive);
        }
        Ok(Self { sigma, alpha })
    }

    pub fn from_images(sigma: Vec<usize>, alpha: Vec<usize>) -> Result<Self, HypermapError> {
        Self::new(
            Permutation::from_images(sigma)?,
            Permutation::from_images(alpha)?,
        )
    }

    /// The single-edge hypermap of the full modular group.
    pub fn trivial() -> Self {
        Self {
            sigma: Permutation::identity(1),
            alpha: Permutation::identity(1),
        }
    }

    pub fn n(&self) -> usize {
        self.sigma.degree()
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn alpha(&self) -> &Permutation {
        &self.alpha
    }

    /// `φ = σ ∘ α`.
    pub fn face_permutation(&self) -> Permutation {
        self.sigma.compose(&self.alpha)
    }

    pub fn e2(&self) -> usize {
        self.alpha.fixed_point_count()
    }

    pub fn e3(&self) -> usize {
        self.sigma.fixed_point_count()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.e2() == 0 && self.e3() == 0
    }

    pub fn subgroup_type(&self) -> SubgroupType {
        let n = self.n();
        let h = self.face_permutation().cycle_count();
        SubgroupType::from_counts(n, h, self.e2(), self.e3())
            .expect("Riemann-Hurwitz genus of a valid hypermap is a non-negative integer")
    }

    pub fn genus(&self) -> usize {
        self.subgroup_type().genus
    }

    pub fn cusp_widths(&self) -> CuspWidths {
        CuspWidths(self.face_permutation().cycle_type())
    }

    /// Faces as cycles of `φ`, each starting at its smallest edge, ordered by
    /// that edge.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        self.face_permutation().cycles()
    }

    /// Face index (into [`Hypermap::faces`]) of every edge.
    pub fn face_of_edge(&self) -> Vec<usize> {
        let mut face_of = vec![0; self.n()];
        for (f, cycle) in self.faces().iter().enumerate() {
            for &e in cycle {
                face_of[e] = f;
            }
        }
        face_of
    }

    /// Edges `e` with `φ(e) = e`, ascending.
    pub fn loop_edges(&self) -> Vec<usize> {
        self.face_permutation().fixed_points().collect()
    }

    /// Image of the hypermap under the edge relabeling `e ↦ relabel(e)`.
    pub fn relabel(&self, relabel: &Permutation) -> Hypermap {
        Hypermap {
            sigma: self.sigma.conjugate_by(relabel),
            alpha: self.alpha.conjugate_by(relabel),
        }
    }

    /// Breadth-first order from `root`, visiting `σ(p)` then `α(p)` for each
    /// dequeued `p`. Returns `order` with `order[new] = old`.
    fn bfs_order(&self, root: usize, label: &mut [usize], order: &mut Vec<usize>) {
        const UNSET: usize = usize::MAX;
        label.fill(UNSET);
        order.clear();
        label[root] = 0;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let p = order[head];
            head += 1;
            for q in [self.sigma.apply(p), self.alpha.apply(p)] {
                if label[q] == UNSET {
                    label[q] = order.len();
                    order.push(q);
                }
            }
        }
    }

    fn code_from_root(
        &self,
        root: usize,
        label: &mut [usize],
        order: &mut Vec<usize>,
        out: &mut Vec<u8>,
    ) {
        let n = self.n();
        self.bfs_order(root, label, order);
        out.clear();
        out.push(n as u8);
        out.extend(order.iter().map(|&old| label[self.sigma.apply(old)] as u8));
        out.extend(order.iter().map(|&old| label[self.alpha.apply(old)] as u8));
    }

    /// Canonical code together with the root achieving it.
    fn canonical_root(&self) -> (CanonicalCode, usize) {
        let n = self.n();
        assert!(
            n <= u8::MAX as usize,
            "canonical codes support at most 255 edges"
        );
        let mut label = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut best = Vec::new();
        let mut best_root = 0;
        let mut candidate = Vec::with_capacity(2 * n + 1);
        for root in 0..n {
            self.code_from_root(root, &mut label, &mut order, &mut candidate);
            if root == 0 || candidate < best {
                std::mem::swap(&mut best, &mut candidate);
                best_root = root;
            }
        }
        (CanonicalCode(best), best_root)
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        self.canonical_root().0
    }

    /// Canonical code plus the hypermap relabeled into its canonical labeling.
    pub fn canonical_form(&self) -> (CanonicalCode, Hypermap) {
        let (code, _) = self.canonical_root();
        let form = code.decode().expect("canonical code decodes");
        (code, form)
    }

    /// The code obtained by rooting at `root`; equal to the canonical code
    /// exactly when `root` is a minimizing root.
    pub fn rooted_code(&self, root: usize) -> Vec<u8> {
        let n = self.n();
        let mut label = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut out = Vec::new();
        self.code_from_root(root, &mut label, &mut order, &mut out);
        out
    }

    pub fn is_isomorphic(&self, other: &Hypermap) -> bool {
        self.n() == other.n() && self.canonical_code() == other.canonical_code()
    }

    /// The automorphism sending edge 0 to `target`, if one exists.
    fn automorphism_sending_zero_to(&self, target: usize) -> Option<Permutation> {
        const UNSET: usize = usize::MAX;
        let n = self.n();
        let mut image = vec![UNSET; n];
        let mut used = vec![false; n];
        image[0] = target;
        used[target] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(p) = queue.pop_front() {
            let q = image[p];
            for (from, to) in [
                (self.sigma.apply(p), self.sigma.apply(q)),
                (self.alpha.apply(p), self.alpha.apply(q)),
            ] {
                if image[from] == UNSET {
                    if used[to] {
                        return None;
                    }
                    image[from] = to;
                    used[to] = true;
                    queue.push_back(from);
                } else if image[from] != to {
                    return None;
                }
            }
        }
        Some(Permutation::from_images_unchecked(image))
    }

    /// All `ψ` with `ψσ = σψ` and `ψα = αψ`, together with their actions on
    /// faces and on loops.
    pub fn automorphisms(&self) -> Automorphisms {
        let elements: Vec<Permutation> = (0..self.n())
            .filter_map(|t| self.automorphism_sending_zero_to(t))
            .collect();
        let faces = self.faces();
        let face_of = self.face_of_edge();
        let face_action: Vec<Permutation> = elements
            .iter()
            .map(|psi| {
                Permutation::from_images_unchecked(
                    faces
                        .iter()
                        .map(|cycle| face_of[psi.apply(cycle[0])])
                        .collect(),
                )
            })
            .collect();
        let loop_faces: Vec<usize> = (0..faces.len()).filter(|&f| faces[f].len() == 1).collect();
        let mut loop_position = vec![usize::MAX; faces.len()];
        for (i, &f) in loop_faces.iter().enumerate() {
            loop_position[f] = i;
        }
        let loop_action = face_action
            .iter()
            .map(|action| {
                Permutation::from_images_unchecked(
                    loop_faces
                        .iter()
                        .map(|&f| loop_position[action.apply(f)])
                        .collect(),
                )
            })
            .collect();
        Automorphisms {
            elements,
            faces,
            face_action,
            loop_faces,
            loop_action,
        }
    }

    /// Types of the trivalent white vertices, keyed by their `σ`-cycle.
    pub fn white_vertex_types(&self) -> Vec<(Vec<usize>, WhiteVertexType)> {
        let face_of = self.face_of_edge();
        let widths: Vec<usize> = self.faces().iter().map(Vec::len).collect();
        self.sigma
            .cycles()
            .into_iter()
            .filter(|c| c.len() == 3)
            .map(|c| {
                let ty = WhiteVertexType::from_cyclic([
                    widths[face_of[c[0]]],
                    widths[face_of[c[1]]],
                    widths[face_of[c[2]]],
                ]);
                (c, ty)
            })
            .collect()
    }
}

fn is_transitive(sigma: &[usize], alpha: &[usize]) -> bool {
    let n = sigma.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut reached = 1;
    while let Some(p) = stack.pop() {
        for q in [sigma[p], alpha[p]] {
            if !seen[q] {
                seen[q] = true;
                reached += 1;
                stack.push(q);
            }
        }
    }
    reached == n
}

/// Widths `a|b|c` of the faces at the three corners of a trivalent white
/// vertex, read in `σ`-order and rotated so that `a ≥ b ≥ c` or `a > c > b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WhiteVertexType(pub [usize; 3]);

impl WhiteVertexType {
    /// Normalizes a cyclic triple to its lexicographically largest rotation.
    pub fn from_cyclic(widths: [usize; 3]) -> Self {
        let rotations = [
            widths,
            [widths[1], widths[2], widths[0]],
            [widths[2], widths[0], widths[1]],
        ];
        Self(*rotations.iter().max().unwrap())
    }

    pub fn is_uniform(&self) -> bool {
        self.0[0] == self.0[1] && self.0[1] == self.0[2]
    }
}

impl fmt::Display for WhiteVertexType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|{}", self.0[0], self.0[1], self.0[2])
    }
}

/// The automorphism group of a hypermap as edge permutations, with induced
/// actions on faces and on loops. The identity is always `elements[0]`.
#[derive(Debug, Clone)]
pub struct Automorphisms {
    pub elements: Vec<Permutation>,
    pub faces: Vec<Vec<usize>>,
    pub face_action: Vec<Permutation>,
    /// Face indices of the width-one faces, ascending.
    pub loop_faces: Vec<usize>,
    pub loop_action: Vec<Permutation>,
}

impl Automorphisms {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn structure(&self) -> SymmetryGroup {
        SymmetryGroup::classify(&self.elements)
    }
}

/// Isomorphism type of a small automorphism group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymmetryGroup {
    Trivial,
    Cyclic(usize),
    /// Dihedral of order `2m`; `m = 2` is the Klein group and `m = 3` is `S₃`.
    Dihedral(usize),
    Alternating4,
    Symmetric4,
    Alternating5,
    Other(usize),
}

impl SymmetryGroup {
    pub fn classify(elements: &[Permutation]) -> Self {
        let order = elements.len();
        let orders: Vec<u64> = elements.iter().map(Permutation::order).collect();
        let count = |k: u64| orders.iter().filter(|&&o| o == k).count();
        let max = orders.iter().copied().max().unwrap_or(1) as usize;
        match order {
            0 | 1 => SymmetryGroup::Trivial,
            _ if max == order => SymmetryGroup::Cyclic(order),
            // m reflections, plus the half turn when m is even
            _ if order.is_multiple_of(2)
                && max == order / 2
                && count(2) == order / 2 + usize::from((order / 2).is_multiple_of(2)) =>
            {
                SymmetryGroup::Dihedral(order / 2)
            }
            12 if count(2) == 3 && count(3) == 8 => SymmetryGroup::Alternating4,
            24 if max == 4 => SymmetryGroup::Symmetric4,
            60 if max == 5 => SymmetryGroup::Alternating5,
            _ => SymmetryGroup::Other(order),
        }
    }

    pub fn order(&self) -> usize {
        match *self {
            SymmetryGroup::Trivial => 1,
            SymmetryGroup::Cyclic(n) | SymmetryGroup::Other(n) => n,
            SymmetryGroup::Dihedral(m) => 2 * m,
            SymmetryGroup::Alternating4 => 12,
            SymmetryGroup::Symmetric4 => 24,
            SymmetryGroup::Alternating5 => 60,
        }
    }
}

impl fmt::Display for SymmetryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SymmetryGroup::Trivial => f.write_str("{1}"),
            SymmetryGroup::Cyclic(n) => write!(f, "Z/{n}"),
            SymmetryGroup::Dihedral(2) => f.write_str("Z/2xZ/2"),
            SymmetryGroup::Dihedral(3) => f.write_str("S3"),
            SymmetryGroup::Dihedral(m) => write!(f, "D{m}"),
            SymmetryGroup::Alternating4 => f.write_str("A4"),
            SymmetryGroup::Symmetric4 => f.write_str("S4"),
            SymmetryGroup::Alternating5 => f.write_str("A5"),
            SymmetryGroup::Other(n) => write!(f, "order {n}"),
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Index-6 dessin `[4,1,1]`: two white vertices `(0 1 2)`, `(3 4 5)` with
    /// loops `0–2` and `3–5`, joined by the edge pair `1–4`.
    pub fn four_one_one() -> Hypermap {
        Hypermap::new(
            Permutation::from_cycles(6, &[&[0, 1, 2], &[3, 4, 5]]).unwrap(),
            Permutation::from_cycles(6, &[&[0, 2], &[1, 4], &[3, 5]]).unwrap(),
        )
        .unwrap()
    }

    /// Index-6 dessin `[2,2,2]`: two white vertices joined three times.
    pub fn two_two_two() -> Hypermap {
        Hypermap::new(
            Permutation::from_cycles(6, &[&[0, 1, 2], &[3, 4, 5]]).unwrap(),
            Permutation::from_cycles(6, &[&[0, 3], &[1, 5], &[2, 4]]).unwrap(),
        )
        .unwrap()
    }
}


#[cfg(test)]
mod proptests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    fn shuffled(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn code_is_relabeling_invariant(r in shuffled(6), which in 0..2usize) {
            let h = if which == 0 { four_one_one() } else { two_two_two() };
            let moved = h.relabel(&r);
            prop_assert_eq!(moved.canonical_code(), h.canonical_code());
            prop_assert_eq!(moved.subgroup_type(), h.subgroup_type());
            prop_assert_eq!(moved.automorphisms().order(), h.automorphisms().order());
        }
    }
}
