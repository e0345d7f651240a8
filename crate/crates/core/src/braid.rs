//! Symbolic action of braid words on Majorana operators.
//!
//! An exchange maps each Majorana to plus or minus another one, so a braid
//! word acts as a signed permutation. Strand `n` (one-based) is `gamma_n`.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::schedule::{BraidGenerator, BraidWord};

/// `gamma_a -> sign[a] * gamma_{image[a]}` (zero-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    image: Vec<usize>,
    sign: Vec<i8>,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
            sign: vec![1; n],
        }
    }

    pub fn from_images(images: &[(usize, i8)]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &(b, s) in images {
            if b >= n || seen[b] || (s != 1 && s != -1) {
                return Err(Error::Parameter(format!(
                    "{images:?} is not a signed permutation"
                )));
            }
            seen[b] = true;
        }
        Ok(Self {
            image: images.iter().map(|p| p.0).collect(),
            sign: images.iter().map(|p| p.1).collect(),
        })
    }

    /// Reads a signed permutation matrix; column `a` is the image of `gamma_a`.
    pub fn from_matrix(m: &DMatrix<f64>, tol: f64) -> Result<Self> {
        let n = m.ncols();
        let mut images = Vec::with_capacity(n);
        for a in 0..n {
            let col = m.column(a);
            let b = col.iamax();
            let s = col[b];
            let rest: f64 = col
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != b)
                .map(|(_, x)| x.abs())
                .sum();
            if (s.abs() - 1.0).abs() > tol || rest > tol {
                return Err(Error::Parameter(format!(
                    "column {a} is not a signed unit vector"
                )));
            }
            images.push((b, if s > 0.0 { 1 } else { -1 }));
        }
        Self::from_images(&images)
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn apply(&self, a: usize) -> (usize, i8) {
        (self.image[a], self.sign[a])
    }

    /// `self` after `first`.
    pub fn after(&self, first: &Self) -> Self {
        assert_eq!(self.len(), first.len());
        let (image, sign) = (0..self.len())
            .map(|a| {
                let (b, s) = first.apply(a);
                let (c, t) = self.apply(b);
                (c, s * t)
            })
            .unzip();
        Self { image, sign }
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.len()];
        let mut sign = vec![1; self.len()];
        for a in 0..self.len() {
            image[self.image[a]] = a;
            sign[self.image[a]] = self.sign[a];
        }
        Self { image, sign }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for a in 0..n {
            m[(self.image[a], a)] = self.sign[a] as f64;
        }
        m
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.len())
            .map(|a| {
                let s = if self.sign[a] < 0 { "-" } else { "" };
                format!("g{} -> {s}g{}", a + 1, self.image[a] + 1)
            })
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Action of one physical exchange on the Majorana that follows each strand.
/// The forward exchange of `(n, n+1)` carries `gamma_n` to `gamma_{n+1}` and
/// `gamma_{n+1}` to `-gamma_n`.
pub fn generator_action(generator: BraidGenerator, strands: usize) -> Result<SignedPermutation> {
    let n = generator.index;
    if n == 0 || n >= strands {
        return Err(Error::BraidWord(format!(
            "{generator} needs {} strands",
            n + 1
        )));
    }
    let (a, b) = (n - 1, n);
    let mut images: Vec<(usize, i8)> = (0..strands).map(|k| (k, 1)).collect();
    if generator.inverse {
        images[a] = (b, -1);
        images[b] = (a, 1);
    } else {
        images[a] = (b, 1);
        images[b] = (a, -1);
    }
    SignedPermutation::from_images(&images)
}

/// Composite action of a time-ordered word.
pub fn word_action(word: &BraidWord, strands: usize) -> Result<SignedPermutation> {
    word.generators()
        .iter()
        .try_fold(SignedPermutation::identity(strands), |acc, &g| {
            Ok(generator_action(g, strands)?.after(&acc))
        })
}

/// All words of exactly `len` letters over `sigma_1^±1 .. sigma_{strands-1}^±1`.
pub fn all_words(strands: usize, len: usize) -> Vec<BraidWord> {
    let letters: Vec<BraidGenerator> = (1..strands)
        .flat_map(|n| [BraidGenerator::new(n, false), BraidGenerator::new(n, true)])
        .collect();
    let mut words = vec![Vec::new()];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                letters.iter().map(move |&l| {
                    let mut next = w.clone();
                    next.push(l);
                    next
                })
            })
            .collect();
    }
    words.into_iter().map(BraidWord).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn word(s: &str) -> BraidWord {
        s.parse().unwrap()
    }

    #[test]
    fn generator_and_inverse_cancel() {
        for n in 1..4 {
            let g = BraidGenerator::new(n, false);
            let p = generator_action(g, 4).unwrap();
            let q = generator_action(g.inverted(), 4).unwrap();
            assert_eq!(q.after(&p), SignedPermutation::identity(4));
            assert_eq!(q, p.inverse());
        }
    }

    #[test]
    fn exchange_has_order_four() {
        let p = generator_action(BraidGenerator::new(1, false), 3).unwrap();
        let p2 = p.after(&p);
        assert_ne!(p2, SignedPermutation::identity(3));
        assert_eq!(p2.after(&p2), SignedPermutation::identity(3));
    }

    #[test]
    fn braid_relation() {
        assert_eq!(
            word_action(&word("s1 s2 s1"), 3).unwrap(),
            word_action(&word("s2 s1 s2"), 3).unwrap()
        );
        assert_ne!(
            word_action(&word("s1 s2"), 3).unwrap(),
            word_action(&word("s2 s1"), 3).unwrap()
        );
    }

    #[test]
    fn far_generators_commute() {
        assert_eq!(
            word_action(&word("s1 s3"), 4).unwrap(),
            word_action(&word("s3 s1"), 4).unwrap()
        );
    }

    #[test]
    fn rejects_short_register() {
        assert!(generator_action(BraidGenerator::new(3, false), 3).is_err());
        assert!(SignedPermutation::from_images(&[(0, 1), (0, 1)]).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let p = word_action(&word("s1 s2' s1"), 3).unwrap();
        assert_eq!(
            SignedPermutation::from_matrix(&p.to_matrix(), 1e-12).unwrap(),
            p
        );
    }

    #[test]
    fn enumerates_words() {
        assert_eq!(all_words(3, 2).len(), 16);
        assert_eq!(all_words(3, 0).len(), 1);
    }

    proptest! {
        #[test]
        fn word_then_inverse_is_identity(letters in prop::collection::vec((1usize..4, any::<bool>()), 0..8)) {
            let w = BraidWord(letters.into_iter().map(|(n, i)| BraidGenerator::new(n, i)).collect());
            let p = word_action(&w, 4).unwrap();
            let q = word_action(&w.inverse(), 4).unwrap();
            prop_assert_eq!(q.after(&p), SignedPermutation::identity(4));
        }
    }
}
