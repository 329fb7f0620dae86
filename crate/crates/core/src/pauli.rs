//! Exact symbolic algebra of n-qubit Pauli strings.
//!
//! Products and commutation are decided by table lookup and parity counting,
//! with phases tracked in the four-element group {+1, +i, -1, -i}. No floating
//! point is involved, so identities like "this product of observables equals
//! minus the identity" are exact statements, not approximations. A string can
//! be lowered to a dense matrix for cross-checks against the numeric layer.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{Complex, ComplexMatrix};

/// Most qubits a string may act on (keeps `to_matrix` inside the dense cap).
pub const MAX_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Single-site product as (result, power of i).
    fn times(self, other: Pauli) -> (Pauli, u8) {
        use Pauli::*;
        match (self, other) {
            (I, p) => (p, 0),
            (p, I) => (p, 0),
            (a, b) if a == b => (I, 0),
            (X, Y) => (Z, 1),
            (Y, Z) => (X, 1),
            (Z, X) => (Y, 1),
            (Y, X) => (Z, 3),
            (Z, Y) => (X, 3),
            (X, Z) => (Y, 3),
            _ => unreachable!("all letter pairs are covered"),
        }
    }

    fn matrix(self) -> ComplexMatrix {
        let z = Complex::new(0.0, 0.0);
        let one = Complex::new(1.0, 0.0);
        let i = Complex::new(0.0, 1.0);
        let rows = match self {
            Pauli::I => [[one, z], [z, one]],
            Pauli::X => [[z, one], [one, z]],
            Pauli::Y => [[z, -i], [i, z]],
            Pauli::Z => [[one, z], [z, -one]],
        };
        ComplexMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()])
            .expect("2x2 is a valid dimension")
    }
}

/// Element of the phase group {+1, +i, -1, -i}, stored as the power of i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(k: u8) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn times(self, other: Phase) -> Phase {
        Phase::from_exponent(self.exponent() + other.exponent())
    }

    /// True for +1 and -1, the phases a Hermitian string may carry.
    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }

    pub fn as_complex(self) -> Complex {
        match self {
            Phase::PlusOne => Complex::new(1.0, 0.0),
            Phase::PlusI => Complex::new(0.0, 1.0),
            Phase::MinusOne => Complex::new(-1.0, 0.0),
            Phase::MinusI => Complex::new(0.0, -1.0),
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Phase::PlusOne => "",
            Phase::PlusI => "i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        }
    }
}

/// A phase times a tensor product of single-qubit Pauli letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: Phase,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(phase: Phase, letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() || letters.len() > MAX_QUBITS {
            return Err(Error::TooLarge {
                what: "qubit count",
                size: letters.len(),
                max: MAX_QUBITS,
            });
        }
        Ok(Self { phase, letters })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(Phase::PlusOne, vec![Pauli::I; n])
    }

    /// Parses a word like `XXX`, `-YYX`, or `+IIZ`.
    pub fn from_word(word: &str) -> Result<Self> {
        let bad = || Error::BadPauliWord {
            word: word.to_string(),
        };
        let (phase, body) = match word.strip_prefix('-') {
            Some(rest) => (Phase::MinusOne, rest),
            None => (Phase::PlusOne, word.strip_prefix('+').unwrap_or(word)),
        };
        if body.is_empty() {
            return Err(bad());
        }
        let letters = body
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(phase, letters)
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity_word(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Hermitian strings are exactly those with a real phase.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    fn same_size(&self, other: &Self) -> Result<()> {
        if self.qubits() != other.qubits() {
            return Err(Error::QubitCountMismatch {
                left: self.qubits(),
                right: other.qubits(),
            });
        }
        Ok(())
    }

    /// Exact product `self * other` with the accumulated phase.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.same_size(other)?;
        let mut exponent = self.phase.exponent() + other.phase.exponent();
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (p, k) = a.times(b);
                exponent += k;
                p
            })
            .collect();
        Ok(Self {
            phase: Phase::from_exponent(exponent),
            letters,
        })
    }

    /// Two strings commute iff they anticommute on an even number of sites.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.same_size(other)?;
        let anticommuting_sites = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|&(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        Ok(anticommuting_sites % 2 == 0)
    }

    /// Dense matrix representation, qubit 1 as the leftmost tensor factor.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let mut m = self.letters[0].matrix();
        for p in &self.letters[1..] {
            m = m.tensor(&p.matrix())?;
        }
        Ok(m.scale(self.phase.as_complex()))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase.prefix())?;
        for p in &self.letters {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::commutator_norm;

    fn s(word: &str) -> PauliString {
        PauliString::from_word(word).unwrap()
    }

    #[test]
    fn single_site_relations() {
        assert_eq!(s("X").product(&s("Y")).unwrap(), {
            let mut t = s("Z");
            t.phase = Phase::PlusI;
            t
        });
        assert_eq!(s("Y").product(&s("X")).unwrap().phase(), Phase::MinusI);
        assert_eq!(s("X").product(&s("X")).unwrap(), s("I"));
    }

    #[test]
    fn three_qubit_product_accumulates_phase() {
        // (XXX)(YYX) = (iZ)(iZ)(I) = -ZZI
        let p = s("XXX").product(&s("YYX")).unwrap();
        assert_eq!(p, s("-ZZI"));
        assert_eq!(p.to_string(), "-ZZI");
    }

    #[test]
    fn commutation_is_parity_of_anticommuting_sites() {
        assert!(s("XXX").commutes(&s("YYX")).unwrap());
        assert!(!s("IIX").commutes(&s("IIY")).unwrap());
        assert!(s("YII").commutes(&s("IYI")).unwrap());
        assert!(!s("XI").commutes(&s("YI")).unwrap());
    }

    #[test]
    fn horizontal_mermin_product_is_minus_identity() {
        let product = s("XXX")
            .product(&s("YYX"))
            .unwrap()
            .product(&s("YXY"))
            .unwrap()
            .product(&s("XYY"))
            .unwrap();
        assert_eq!(product, s("-III"));
        assert!(product.is_identity_word());
    }

    #[test]
    fn word_parsing_round_trips_and_rejects_junk() {
        for word in ["XXX", "-YYX", "IIZ", "-i", "+XZ"] {
            match PauliString::from_word(word) {
                Ok(p) => assert_eq!(p.to_string(), word.trim_start_matches('+')),
                Err(Error::BadPauliWord { .. }) => assert_eq!(word, "-i"),
                Err(e) => panic!("unexpected error for {word}: {e}"),
            }
        }
        assert!(PauliString::from_word("").is_err());
        assert!(PauliString::from_word("XQ").is_err());
        assert!(PauliString::from_word("xy").is_err());
    }

    #[test]
    fn qubit_count_limits() {
        assert!(PauliString::from_word("XXXXXXX").is_err());
        assert!(PauliString::new(Phase::PlusOne, vec![]).is_err());
        assert!(matches!(
            s("XX").product(&s("X")),
            Err(Error::QubitCountMismatch { .. })
        ));
    }

    #[test]
    fn matrix_form_agrees_with_symbolic_product() {
        let a = s("XY");
        let b = s("ZZ");
        let symbolic = a.product(&b).unwrap().to_matrix().unwrap();
        let numeric = a.to_matrix().unwrap().mat_mul(&b.to_matrix().unwrap()).unwrap();
        assert!(symbolic.distance(&numeric).unwrap() < 1e-14);
    }

    #[test]
    fn matrix_form_agrees_with_symbolic_commutation() {
        let pairs = [("XI", "IX"), ("XX", "YY"), ("XY", "YX"), ("ZI", "XI")];
        for (wa, wb) in pairs {
            let a = s(wa);
            let b = s(wb);
            let norm =
                commutator_norm(&a.to_matrix().unwrap(), &b.to_matrix().unwrap()).unwrap();
            assert_eq!(a.commutes(&b).unwrap(), norm < 1e-12, "{wa} vs {wb}");
        }
    }

    #[test]
    fn phase_group_is_cyclic_of_order_four() {
        let i = Phase::PlusI;
        assert_eq!(i.times(i), Phase::MinusOne);
        assert_eq!(i.times(i).times(i), Phase::MinusI);
        assert_eq!(i.times(i).times(i).times(i), Phase::PlusOne);
        assert!(Phase::MinusOne.is_real());
        assert!(!Phase::MinusI.is_real());
    }
}
