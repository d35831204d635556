//! Kodaira fibres and Euler numbers of elliptic surfaces with a given
//! modular monodromy group.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::hypermap::SubgroupType;
use crate::slwords::Mat2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EulerError {
    #[error("index {0} is not divisible by 6")]
    NotMultipleOfSix(usize),
}

/// How the `j`-invariant behaves near a fibre, stored as a tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JBehavior {
    /// `j` regular; any value, including the ramified forms over 0 and 1.
    Regular,
    /// Pole of the given order.
    Pole(u32),
    /// `j = s^(3k+r)` for the residue `r`.
    ZeroOrderMod3(u32),
    /// `j = 1 + s^(2k+1)`.
    OddOrderAtOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KodairaFibre {
    /// `I_b`; `I_0` is the smooth fibre.
    I(u32),
    /// `I*_b`.
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaFibre {
    /// A representative list covering every row of the classification, with
    /// `I_b` and `I*_b` shown for `b ≤ max_b`.
    pub fn table(max_b: u32) -> Vec<KodairaFibre> {
        use KodairaFibre::*;
        let mut out: Vec<_> = (0..=max_b).map(I).collect();
        out.extend((0..=max_b).map(IStar));
        out.extend([II, III, IV, IVStar, IIIStar, IIStar]);
        out
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn is_starred(&self) -> bool {
        matches!(
            self,
            KodairaFibre::IStar(_)
                | KodairaFibre::IVStar
                | KodairaFibre::IIIStar
                | KodairaFibre::IIStar
        )
    }

    /// Starred and unstarred fibres come in pairs `F ↔ F*`, where the
    /// partner of `II` is `IV*` and the partner of `IV` is `II*`.
    pub fn partner(&self) -> KodairaFibre {
        use KodairaFibre::*;
        match *self {
            I(b) => IStar(b),
            IStar(b) => I(b),
            II => IVStar,
            IVStar => II,
            III => IIIStar,
            IIIStar => III,
            IV => IIStar,
            IIStar => IV,
        }
    }

    pub fn ade_label(&self) -> Option<String> {
        use KodairaFibre::*;
        Some(match *self {
            I(b) if b >= 2 => format!("A{}", b - 1),
            I(_) | II => return None,
            IStar(b) => format!("D{}", 4 + b),
            III => "A1".into(),
            IV => "A2".into(),
            IVStar => "E6".into(),
            IIIStar => "E7".into(),
            IIStar => "E8".into(),
        })
    }

    pub fn euler_number(&self) -> u32 {
        use KodairaFibre::*;
        match *self {
            I(b) => b,
            IStar(b) => 6 + b,
            II => 2,
            III => 3,
            IV => 4,
            IVStar => 8,
            IIIStar => 9,
            IIStar => 10,
        }
    }

    pub fn j_behavior(&self) -> JBehavior {
        use KodairaFibre::*;
        match *self {
            I(0) | IStar(0) => JBehavior::Regular,
            I(b) | IStar(b) => JBehavior::Pole(b),
            II | IVStar => JBehavior::ZeroOrderMod3(1),
            IV | IIStar => JBehavior::ZeroOrderMod3(2),
            III | IIIStar => JBehavior::OddOrderAtOne,
        }
    }
}

impl fmt::Display for KodairaFibre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use KodairaFibre::*;
        match self {
            I(b) => write!(f, "I{b}"),
            IStar(b) => write!(f, "I*{b}"),
            II => write!(f, "II"),
            III => write!(f, "III"),
            IV => write!(f, "IV"),
            IVStar => write!(f, "IV*"),
            IIIStar => write!(f, "III*"),
            IIStar => write!(f, "II*"),
        }
    }
}

pub fn local_monodromy(fibre: KodairaFibre) -> Mat2 {
    use KodairaFibre::*;
    match fibre {
        I(b) => Mat2::lit(1, b as i64, 0, 1),
        II => Mat2::lit(1, 1, -1, 0),
        III => Mat2::lit(0, 1, -1, 0),
        IV => Mat2::lit(0, 1, -1, -1),
        starred => -&local_monodromy(starred.partner()),
    }
}

/// Data entering the Euler number of a fibration whose functional invariant
/// factors through `j_Γ̄` with a degree-`l` first factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerInput {
    pub star_count: u32,
    pub l: u32,
    pub index: u32,
    /// Ramification data over points above 2-torsion.
    pub r_list: Vec<u32>,
    /// Ramification data over points above 3-torsion.
    pub t_list: Vec<u32>,
}

impl EulerInput {
    /// `l = 1` with every elliptic point unramified.
    pub fn unramified(ty: &SubgroupType, star_count: u32) -> Self {
        Self {
            star_count,
            l: 1,
            index: ty.index as u32,
            r_list: vec![0; ty.e2],
            t_list: vec![0; ty.e3],
        }
    }
}

pub fn euler_number(input: &EulerInput) -> u64 {
    let twos: Ratio<u64> = input
        .r_list
        .iter()
        .map(|&r| Ratio::new(r as u64 + 1, 2).fract())
        .sum();
    let threes: Ratio<u64> = input
        .t_list
        .iter()
        .map(|&t| Ratio::new(t as u64 + 1, 3).fract())
        .sum();
    let torsion = (twos + threes) * 6;
    debug_assert!(torsion.is_integer());
    6 * input.star_count as u64 + input.l as u64 * input.index as u64 + torsion.to_integer()
}

/// Closed form of [`euler_number`] for [`EulerInput::unramified`].
pub fn corollary(ty: &SubgroupType, star_count: u32) -> u64 {
    (6 * star_count as usize + ty.index + 3 * ty.e2 + 2 * ty.e3) as u64
}

pub fn minimal_euler_tf(index: usize) -> Result<u64, EulerError> {
    if !index.is_multiple_of(6) {
        return Err(EulerError::NotMultipleOfSix(index));
    }
    Ok(if index.is_multiple_of(12) {
        index
    } else {
        index + 6
    } as u64)
}

/// The minimal Euler number of any class; it only depends on the
/// torsion-free index.
pub fn minimal_euler(ty: &SubgroupType) -> Result<u64, EulerError> {
    minimal_euler_tf(ty.tf_index())
}

/// Whether some elliptic surface with Euler number `n` has this monodromy.
/// K3 surfaces are the case `n = 24`.
pub fn is_monodromy_at(ty: &SubgroupType, n: usize) -> bool {
    n.is_multiple_of(12) && ty.genus == 0 && ty.tf_index() <= n
}
