//! Parameter space, the affine Weyl group of type D4^(1) acting on it by
//! reflections, and the parameter maps kappa -> a -> theta.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sample::Sampler;
use crate::scalar::{ExactScalar, Scalar, APPROX_ZERO_TOL};

/// Cartan matrix of D4^(1): node 0 is the central node.
pub struct CartanD4;

impl CartanD4 {
    pub const MATRIX: [[i64; 5]; 5] = [
        [2, -1, -1, -1, -1],
        [-1, 2, 0, 0, 0],
        [-1, 0, 2, 0, 0],
        [-1, 0, 0, 2, 0],
        [-1, 0, 0, 0, 2],
    ];

    pub fn entry(i: usize, j: usize) -> i64 {
        Self::MATRIX[i][j]
    }
}

/// `(k0, ..., k4)`, normally subject to `2 k0 + k1 + k2 + k3 + k4 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kappa<S> {
    k: [S; 5],
}

impl<S: Scalar> Kappa<S> {
    /// Checked constructor: fails unless the Fuchs relation holds (exactly
    /// for the exact backend, to 1e-12 otherwise).
    pub fn new(k: [S; 5]) -> Result<Self> {
        let kappa = Kappa { k };
        if kappa.satisfies_fuchs() {
            Ok(kappa)
        } else {
            Err(Error::FuchsRelation {
                defect: kappa.fuchs_defect().to_text(),
            })
        }
    }

    /// Takes `k0..k3` and solves the Fuchs relation for `k4`.
    pub fn from_k0_to_k3(k0: S, k1: S, k2: S, k3: S) -> Self {
        let two = S::from_i64(2);
        let k4 = S::one() - two * k0.clone() - k1.clone() - k2.clone() - k3.clone();
        Kappa {
            k: [k0, k1, k2, k3, k4],
        }
    }

    /// UNCHECKED: accepts any five values. Only for computations that
    /// deliberately treat the entries as independent variables.
    pub fn new_unchecked(k: [S; 5]) -> Self {
        Kappa { k }
    }

    pub fn get(&self, i: usize) -> &S {
        &self.k[i]
    }

    pub fn as_array(&self) -> &[S; 5] {
        &self.k
    }

    pub fn into_array(self) -> [S; 5] {
        self.k
    }

    /// `eta = 2 k0 + k1 + k2 + k3 + k4 - 1`.
    pub fn fuchs_defect(&self) -> S {
        let [k0, k1, k2, k3, k4] = self.k.clone();
        S::from_i64(2) * k0 + k1 + k2 + k3 + k4 - S::one()
    }

    pub fn satisfies_fuchs(&self) -> bool {
        let scale = self
            .k
            .iter()
            .map(|x| x.to_c64().norm())
            .fold(1.0_f64, f64::max);
        self.fuchs_defect().is_negligible(APPROX_ZERO_TOL * scale)
    }

    /// `sigma_i`: `k_j -> k_j - k_i c_ij`.
    pub fn reflect(&self, i: usize) -> Result<Self> {
        if i > 4 {
            return Err(Error::IndexOutOfRange(i));
        }
        let ki = self.k[i].clone();
        let k = std::array::from_fn(|j| {
            self.k[j].clone() - ki.clone() * S::from_i64(CartanD4::entry(i, j))
        });
        Ok(Kappa { k })
    }

    /// Applies the letters of `w` left to right.
    pub fn apply_word(&self, w: &GroupWord) -> Self {
        w.letters().iter().fold(self.clone(), |acc, &i| {
            acc.reflect(i).expect("word letters are validated on construction")
        })
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Kappa<T> {
        Kappa {
            k: std::array::from_fn(|i| f(&self.k[i])),
        }
    }

    pub fn to_c64(&self) -> Kappa<Complex64> {
        self.map(|x| x.to_c64())
    }
}

impl Kappa<ExactScalar> {
    /// Random point of the Fuchs locus with Gaussian rational entries.
    pub fn sample(s: &mut Sampler) -> Self {
        Kappa::from_k0_to_k3(s.exact(), s.exact(), s.exact(), s.exact())
    }

    /// Random point of C^5, ignoring the Fuchs relation.
    pub fn sample_unchecked(s: &mut Sampler) -> Self {
        Kappa::new_unchecked(std::array::from_fn(|_| s.exact()))
    }
}

/// A word in the generators `0..=4`; the empty word is the identity.
impl<S: serde::Serialize> serde::Serialize for Kappa<S> {
    fn serialize<Z: serde::Serializer>(&self, ser: Z) -> std::result::Result<Z::Ok, Z::Error> {
        self.k.serialize(ser)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupWord {
    letters: Vec<usize>,
}

impl GroupWord {
    pub fn new(letters: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&i| i > 4) {
            return Err(Error::IndexOutOfRange(bad));
        }
        Ok(GroupWord { letters })
    }

    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Parses `"0,1,2"` (empty string = identity).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(GroupWord::identity());
        }
        let letters = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("generator `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        GroupWord::new(letters)
    }

    pub fn random(s: &mut Sampler, max_len: usize) -> Self {
        let len = s.index(max_len + 1);
        GroupWord {
            letters: (0..len).map(|_| s.index(5)).collect(),
        }
    }
}

impl std::fmt::Display for GroupWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|i| i.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Traces `a1..a4` of the local monodromy matrices.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LocalTraces<S> {
    pub a: [S; 4],
}

/// Coefficients `th1..th4` of the cubic surface.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ThetaVec<S> {
    pub th: [S; 4],
}

impl ThetaVec<Complex64> {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.th
            .iter()
            .zip(&other.th)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `a_i = 2 cos(pi k_i)` for i = 1, 2, 3 and `a_4 = -2 cos(pi k_4)`.
pub fn local_traces(kappa: &Kappa<Complex64>) -> LocalTraces<Complex64> {
    let pi = std::f64::consts::PI;
    let c = |i: usize| 2.0 * (kappa.get(i) * pi).cos();
    LocalTraces {
        a: [c(1), c(2), c(3), -c(4)],
    }
}

pub fn theta_from_traces<S: Scalar>(traces: &LocalTraces<S>) -> ThetaVec<S> {
    let [a1, a2, a3, a4] = traces.a.clone();
    let th = |ai: &S, aj: &S, ak: &S| ai.clone() * a4.clone() + aj.clone() * ak.clone();
    let th4 = a1.clone() * a2.clone() * a3.clone() * a4.clone()
        + a1.clone() * a1.clone()
        + a2.clone() * a2.clone()
        + a3.clone() * a3.clone()
        + a4.clone() * a4.clone()
        - S::from_i64(4);
    ThetaVec {
        th: [th(&a1, &a2, &a3), th(&a2, &a3, &a1), th(&a3, &a1, &a2), th4],
    }
}

pub fn theta_of_kappa(kappa: &Kappa<Complex64>) -> ThetaVec<Complex64> {
    theta_from_traces(&local_traces(kappa))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ek(v: [(i64, i64); 5]) -> Kappa<ExactScalar> {
        Kappa::new(v.map(|(n, d)| ExactScalar::from_ratio(n, d))).unwrap()
    }

    #[test]
    fn cartan_matrix_shape() {
        let c = CartanD4::MATRIX;
        for i in 0..5 {
            assert_eq!(c[i][i], 2);
            for j in 0..5 {
                assert_eq!(c[i][j], c[j][i]);
                if i != j {
                    let expected = if i == 0 || j == 0 { -1 } else { 0 };
                    assert_eq!(c[i][j], expected);
                }
            }
        }
    }

    #[test]
    fn reflect_central_node() {
        let k = ek([(1, 2), (0, 1), (0, 1), (0, 1), (0, 1)]);
        let r = k.reflect(0).unwrap();
        assert_eq!(r, ek([(-1, 2), (1, 2), (1, 2), (1, 2), (1, 2)]));
    }

    #[test]
    fn reflect_fixes_its_mirror() {
        let k = ek([(1, 3), (0, 1), (1, 5), (1, 7), (-1, 105)]);
        assert_eq!(k.reflect(1).unwrap(), k);
    }

    #[test]
    fn reflect_rejects_bad_index() {
        let k = ek([(1, 2), (0, 1), (0, 1), (0, 1), (0, 1)]);
        assert_eq!(k.reflect(5), Err(Error::IndexOutOfRange(5)));
        assert!(GroupWord::new(vec![0, 7]).is_err());
    }

    #[test]
    fn checked_constructor_enforces_fuchs() {
        let bad = [1, 0, 0, 0, 0].map(ExactScalar::from_i64);
        assert!(matches!(Kappa::new(bad), Err(Error::FuchsRelation { .. })));
        let close = Kappa::new([
            Complex64::new(0.5 + 1e-14, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        assert!(close.is_ok());
    }

    #[test]
    fn word_parsing() {
        assert_eq!(GroupWord::parse("").unwrap(), GroupWord::identity());
        assert_eq!(GroupWord::parse("0, 1,4").unwrap().letters(), &[0, 1, 4]);
        assert!(GroupWord::parse("0,x").is_err());
        assert_eq!(GroupWord::parse("2,3").unwrap().to_string(), "[2,3]");
    }

    #[test]
    fn traces_and_theta_at_special_points() {
        let k = ek([(1, 2), (0, 1), (0, 1), (0, 1), (0, 1)]).to_c64();
        let a = local_traces(&k);
        let expected = [2.0, 2.0, 2.0, -2.0];
        for (x, e) in a.a.iter().zip(expected) {
            assert!((x - e).norm() < 1e-15);
        }
        let th = theta_of_kappa(&k);
        for (x, e) in th.th.iter().zip([0.0, 0.0, 0.0, -4.0]) {
            assert!((x - e).norm() < 1e-14);
        }

        let k = ek([(-1, 2), (1, 2), (1, 2), (1, 2), (1, 2)]).to_c64();
        for x in local_traces(&k).a {
            assert!(x.norm() < 1e-15);
        }
        let th = theta_of_kappa(&k);
        for (x, e) in th.th.iter().zip([0.0, 0.0, 0.0, -4.0]) {
            assert!((x - e).norm() < 1e-14);
        }

        let k = ek([(0, 1), (1, 1), (0, 1), (0, 1), (0, 1)]).to_c64();
        assert!((local_traces(&k).a[0] + 2.0).norm() < 1e-15);
    }

    #[test]
    fn exact_theta_from_traces() {
        let a = LocalTraces {
            a: [2, 2, 2, -2].map(ExactScalar::from_i64),
        };
        let th = theta_from_traces(&a);
        assert_eq!(th.th, [0, 0, 0, -4].map(ExactScalar::from_i64));
    }
}
