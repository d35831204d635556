//! Integer matrices of determinant one, words in `S` and `T`, and the
//! right action of `PSL(2,Z)` on the edges of a hypermap.
//!
//! `S = [[0,-1],[1,0]]`, `T = [[1,1],[0,1]]` and `U = ST`. On edges, `S`
//! acts by `α`, `U` by `σ`, and therefore `T = S⁻¹U` by `p ↦ σ(α(p))`.
//! Points are acted on from the right, so a word is applied letter by letter
//! from left to right.

use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::hypermap::Hypermap;
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlWordsError {
    #[error("determinant is {0}, expected 1")]
    Determinant(BigInt),
    #[error("cannot parse word syllable {0:?}")]
    BadSyllable(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self, SlWordsError> {
        let m = Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        };
        let det = m.det();
        if det.is_one() {
            Ok(m)
        } else {
            Err(SlWordsError::Determinant(det))
        }
    }

    /// For literal matrices known to have determinant one.
    pub(crate) fn lit(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a, b, c, d).expect("literal matrix must have determinant 1")
    }

    pub fn identity() -> Self {
        Self::lit(1, 0, 0, 1)
    }

    pub fn s() -> Self {
        Self::lit(0, -1, 1, 0)
    }

    pub fn t() -> Self {
        Self::lit(1, 1, 0, 1)
    }

    pub fn t_pow(k: &BigInt) -> Self {
        Self {
            a: BigInt::one(),
            b: k.clone(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Smallest `k ≥ 1` with `selfᵏ = I`, if it is at most 12. Elements of
    /// finite order in `SL(2,Z)` have order 1, 2, 3, 4 or 6.
    pub fn finite_order(&self) -> Option<u32> {
        let mut power = self.clone();
        for k in 1..=12 {
            if power.is_identity() {
                return Some(k);
            }
            power = &power * self;
        }
        None
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }
}

impl Neg for &Mat2 {
    type Output = Mat2;

    fn neg(self) -> Mat2 {
        Mat2 {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat2{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Syllable {
    S,
    /// `Tᵏ`; the exponent may be negative and arbitrarily large.
    T(BigInt),
}

/// A word in `S` and powers of `T`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Syllable>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn push_t(&mut self, k: BigInt) {
        if k.is_zero() {
            return;
        }
        if let Some(Syllable::T(prev)) = self.0.last_mut() {
            *prev += k;
            if prev.is_zero() {
                self.0.pop();
            }
        } else {
            self.0.push(Syllable::T(k));
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, syl) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match syl {
                Syllable::S => write!(f, "S")?,
                Syllable::T(k) if k.is_one() => write!(f, "T")?,
                Syllable::T(k) => write!(f, "T^{k}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = SlWordsError;

    /// Whitespace-separated syllables: `S`, `T`, `T^k` (k may be negative).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut word = Word::default();
        for token in s.split_whitespace() {
            let bad = || SlWordsError::BadSyllable(token.to_string());
            match token {
                "S" => word.0.push(Syllable::S),
                "T" => word.0.push(Syllable::T(BigInt::one())),
                _ => {
                    let exp = token.strip_prefix("T^").ok_or_else(bad)?;
                    let k: BigInt = exp.parse().map_err(|_| bad())?;
                    word.0.push(Syllable::T(k));
                }
            }
        }
        Ok(word)
    }
}

/// Product of the syllables from left to right.
pub fn eval_word(word: &Word) -> Mat2 {
    word.0.iter().fold(Mat2::identity(), |acc, syl| match syl {
        Syllable::S => &acc * &Mat2::s(),
        Syllable::T(k) => &acc * &Mat2::t_pow(k),
    })
}

/// `±1`, the sign relating a decomposition to the input matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn apply(self, m: &Mat2) -> Mat2 {
        match self {
            Sign::Plus => m.clone(),
            Sign::Minus => -m,
        }
    }
}

/// Writes `m` as `sign · eval_word(word)`.
///
/// Each step peels off `T^q S` using `a = q·c + a'` (floor division), which
/// leaves a matrix whose lower-left entry is `-a'` with `|a'| < |c|`. Once the
/// lower-left entry vanishes the remainder is `±T^k`. The identity has the
/// empty word with sign `+`, and `-I` the empty word with sign `-`.
pub fn word_of_matrix(m: &Mat2) -> (Word, Sign) {
    let mut word = Word::default();
    let mut cur = m.clone();
    while !cur.c.is_zero() {
        let q = cur.a.div_floor(&cur.c);
        let a1 = &cur.a - &q * &cur.c;
        let b1 = &cur.b - &q * &cur.d;
        word.push_t(q);
        word.0.push(Syllable::S);
        cur = Mat2 {
            a: cur.c,
            b: cur.d,
            c: -a1,
            d: -b1,
        };
    }
    // cur = [[ε, b], [0, ε]] with ε = ±1, so ε·cur = T^{ε·b}.
    let sign = if cur.a.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    };
    let k = match sign {
        Sign::Plus => cur.b,
        Sign::Minus => -cur.b,
    };
    word.push_t(k);
    (word, sign)
}

/// A pseudo-random word with `len` syllables, alternating `S` with `Tᵏ`,
/// `k ∈ [-max_exp, max_exp]`.
pub fn random_word<R: Rng>(rng: &mut R, len: usize, max_exp: i64) -> Word {
    let mut word = Word::default();
    for i in 0..len {
        if i % 2 == 0 {
            word.0.push(Syllable::S);
        } else {
            word.push_t(BigInt::from(rng.gen_range(-max_exp..=max_exp)));
        }
    }
    word
}

/// A pseudo-random element of `SL(2,Z)` with `|c|, |d| ≤ bound`.
pub fn random_matrix<R: Rng>(rng: &mut R, bound: i64) -> Mat2 {
    assert!(bound >= 1);
    loop {
        let c = rng.gen_range(-bound..=bound);
        let d = rng.gen_range(-bound..=bound);
        let g = c.extended_gcd(&d);
        if g.gcd != 1 {
            continue;
        }
        // c·x + d·y = 1, so (a, b) = (y, -x) gives ad - bc = 1.
        let shift = rng.gen_range(-3..=3i64);
        let (a, b) = (g.y + shift * c, -g.x + shift * d);
        return Mat2::new(a, b, c, d).expect("constructed with determinant 1");
    }
}

/// The permutations by which `S`, `U = ST` and `T` act on edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetAction {
    pub perm_s: Permutation,
    pub perm_u: Permutation,
    pub perm_t: Permutation,
}

pub fn coset_action(h: &Hypermap) -> CosetAction {
    let perm_s = h.alpha().clone();
    let perm_u = h.sigma().clone();
    // T = S⁻¹U: first S, then U.
    let perm_t = perm_u.compose(&perm_s);
    CosetAction {
        perm_s,
        perm_u,
        perm_t,
    }
}

impl CosetAction {
    /// The image of `point` under a word, syllables applied left to right.
    pub fn act(&self, point: usize, word: &Word) -> usize {
        let order = BigInt::from(self.perm_t.order());
        word.0.iter().fold(point, |p, syl| match syl {
            Syllable::S => self.perm_s.apply(p),
            Syllable::T(k) => {
                let e = k.mod_floor(&order).to_u64().expect("reduced exponent fits");
                self.perm_t.pow(e).apply(p)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Membership {
    /// Whether `±m` lies in the stabilizer of the root.
    pub member: bool,
    /// Sign from [`word_of_matrix`]; irrelevant in `PSL(2,Z)`.
    pub sign: Sign,
}

pub fn is_member(h: &Hypermap, root: usize, m: &Mat2) -> Membership {
    let (word, sign) = word_of_matrix(m);
    let member = coset_action(h).act(root, &word) == root;
    Membership { member, sign }
}

/// Compares the fixed points and cycles of the coset action with the
/// invariants computed by [`Hypermap`]. Returns a description of the first
/// mismatch.
pub fn check_statistics(h: &Hypermap) -> Result<(), String> {
    let action = coset_action(h);
    let ty = h.subgroup_type();
    let mut widths = h.cusp_widths().0;
    widths.sort_unstable_by(|a, b| b.cmp(a));
    let checks = [
        (
            "fixed points of S vs e2",
            action.perm_s.fixed_point_count(),
            ty.e2,
        ),
        (
            "fixed points of U vs e3",
            action.perm_u.fixed_point_count(),
            ty.e3,
        ),
        (
            "cycles of T vs cusps",
            action.perm_t.cycle_count(),
            ty.cusps,
        ),
    ];
    for (what, got, want) in checks {
        if got != want {
            return Err(format!("{what}: {got} != {want}"));
        }
    }
    if action.perm_t.cycle_type() != widths {
        return Err(format!(
            "cycle type of T {:?} != cusp widths {:?}",
            action.perm_t.cycle_type(),
            widths
        ));
    }
    if !action.perm_s.pow(2).is_identity() || !action.perm_u.pow(3).is_identity() {
        return Err("S or U violates its relation".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypermap::fixtures::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn small_words() {
        assert_eq!(eval_word(&w("")), Mat2::identity());
        assert_eq!(eval_word(&w("S S")), -&Mat2::identity());
        assert_eq!(eval_word(&w("S T S T S T")), -&Mat2::identity());
        assert_eq!(eval_word(&w("T^3 T^-3")), Mat2::identity());
        assert_eq!(w("S T^-2 T").to_string(), "S T^-2 T");
        assert!(matches!(
            "S X".parse::<Word>(),
            Err(SlWordsError::BadSyllable(_))
        ));
    }

    #[test]
    fn decomposition_normal_forms() {
        assert_eq!(word_of_matrix(&Mat2::t()), (w("T"), Sign::Plus));
        assert_eq!(
            word_of_matrix(&Mat2::identity()),
            (Word::default(), Sign::Plus)
        );
        assert_eq!(
            word_of_matrix(&-&Mat2::identity()),
            (Word::default(), Sign::Minus)
        );
        let (word, sign) = word_of_matrix(&Mat2::s());
        assert_eq!(sign.apply(&eval_word(&word)), Mat2::s());
    }

    #[test]
    fn rejects_bad_determinant() {
        assert!(matches!(
            Mat2::new(2, 0, 0, 1),
            Err(SlWordsError::Determinant(_))
        ));
    }

    #[test]
    fn seeded_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let m = random_matrix(&mut rng, 1_000_000);
            let (word, sign) = word_of_matrix(&m);
            assert_eq!(eval_word(&word), sign.apply(&m), "{m}");
            let m = eval_word(&random_word(&mut rng, 40, 9));
            let (word, sign) = word_of_matrix(&m);
            assert_eq!(eval_word(&word), sign.apply(&m), "{m}");
        }
    }

    #[test]
    fn coset_statistics_of_fixtures() {
        for h in [Hypermap::trivial(), four_one_one(), two_two_two()] {
            check_statistics(&h).unwrap();
        }
        assert_eq!(
            coset_action(&two_two_two()).perm_t.cycle_type(),
            vec![2, 2, 2]
        );
        let trivial = coset_action(&Hypermap::trivial());
        assert!(trivial.perm_s.is_identity() && trivial.perm_t.is_identity());
    }

    #[test]
    fn membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, 1000);
            assert!(is_member(&Hypermap::trivial(), 0, &m).member);
        }
        // Index two: σ fixes both edges and α swaps them.
        let h2 = Hypermap::from_images(vec![0, 1], vec![1, 0]).unwrap();
        assert!(!is_member(&h2, 0, &Mat2::s()).member);
        assert!(!is_member(&h2, 0, &Mat2::t()).member);
        assert!(is_member(&h2, 0, &Mat2::lit(1, 2, 0, 1)).member);
        let h = four_one_one();
        let perm_t = coset_action(&h).perm_t;
        for root in 0..h.n() {
            assert_eq!(
                is_member(&h, root, &Mat2::t()).member,
                perm_t.apply(root) == root
            );
        }
    }

    proptest! {
        #[test]
        fn round_trip(exps in proptest::collection::vec(-50i64..=50, 0..30)) {
            let mut word = Word::default();
            for k in exps {
                word.0.push(Syllable::S);
                word.push_t(BigInt::from(k));
            }
            let m = eval_word(&word);
            let (back, sign) = word_of_matrix(&m);
            prop_assert_eq!(eval_word(&back), sign.apply(&m));
        }

        #[test]
        fn membership_is_conjugation_covariant(
            seed in any::<u64>(),
            len in 0usize..12,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = four_one_one();
            let action = coset_action(&h);
            let m = eval_word(&random_word(&mut rng, len, 4));
            let g_word = random_word(&mut rng, len + 1, 4);
            let g = eval_word(&g_word);
            let root = rng.gen_range(0..h.n());
            let moved = action.act(root, &g_word);
            let conj = &(&g.inverse() * &m) * &g;
            prop_assert_eq!(is_member(&h, root, &m).member, is_member(&h, moved, &conj).member);
        }
    }
}
