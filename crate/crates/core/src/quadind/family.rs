//! Coordinate-function families evaluated at sampled points.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::exactlin::{ModP, Rationals};
use crate::flows::{apply_word, apply_word_mod, random_parameter, random_word, FlowWord};

/// Where a family's functions come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// `g ↦ λ(Ad_g(H_1))` over a Lie algebra.
    Adjoint(String),
    Product(Vec<Provenance>),
    Custom(String),
}

/// `m` functions evaluated together at a random sample point.
///
/// The point is drawn from `rng`; `evaluate` and `evaluate_mod` must consume
/// the generator identically so a seed names the same point in both.
pub trait FunctionFamily: Send + Sync {
    fn dimension(&self) -> usize;

    fn provenance(&self) -> Provenance;

    fn label(&self) -> String {
        match self.provenance() {
            Provenance::Adjoint(name) | Provenance::Custom(name) => name,
            Provenance::Product(parts) => parts.iter().map(provenance_name).collect::<Vec<_>>().join("x"),
        }
    }

    fn evaluate(&self, rng: &mut ChaCha8Rng) -> Result<Vec<BigRational>>;

    fn evaluate_mod(&self, rng: &mut ChaCha8Rng, field: &ModP) -> Result<Vec<u64>> {
        self.evaluate(rng)?.iter().map(|q| field.reduce(q)).collect()
    }
}

fn provenance_name(p: &Provenance) -> String {
    match p {
        Provenance::Adjoint(n) | Provenance::Custom(n) => n.clone(),
        Provenance::Product(parts) => parts.iter().map(provenance_name).collect::<Vec<_>>().join("x"),
    }
}

/// Coefficients of `Ad_g(H_1)` in the Chevalley basis, `g` a random flow
/// word of length `2N`.
#[derive(Debug, Clone)]
pub struct AdjointFamily {
    algebra: Arc<LieAlgebra>,
}

impl AdjointFamily {
    pub fn new(algebra: Arc<LieAlgebra>) -> Self {
        AdjointFamily { algebra }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn word_length(&self) -> usize {
        2 * self.algebra.dim()
    }

    /// The value vector at a given word.
    pub fn row_at(&self, word: &FlowWord) -> Result<Vec<BigRational>> {
        let l = &self.algebra;
        apply_word(l, word, &l.basis_vector(&Rationals, l.h(1)))
    }
}

pub fn adjoint_family(l: Arc<LieAlgebra>) -> AdjointFamily {
    AdjointFamily::new(l)
}

impl FunctionFamily for AdjointFamily {
    fn dimension(&self) -> usize {
        self.algebra.dim()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Adjoint(self.algebra.name())
    }

    fn evaluate(&self, rng: &mut ChaCha8Rng) -> Result<Vec<BigRational>> {
        let w = random_word(&self.algebra, rng, self.word_length());
        self.row_at(&w)
    }

    fn evaluate_mod(&self, rng: &mut ChaCha8Rng, field: &ModP) -> Result<Vec<u64>> {
        let l = &self.algebra;
        let w = random_word(l, rng, self.word_length());
        apply_word_mod(l, &w, field, &l.basis_vector(field, l.h(1)))
    }
}

/// Concatenated value vectors of independent component samples.
///
/// Each component draws its point from its own generator, seeded from the
/// parent in component order.
#[derive(Clone)]
pub struct ProductFamily {
    parts: Vec<Arc<dyn FunctionFamily>>,
}

impl ProductFamily {
    pub fn new(parts: Vec<Arc<dyn FunctionFamily>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Invalid("a product needs at least one factor".into()));
        }
        Ok(ProductFamily { parts })
    }

    pub fn parts(&self) -> &[Arc<dyn FunctionFamily>] {
        &self.parts
    }

    fn child_rngs(&self, rng: &mut ChaCha8Rng) -> Vec<ChaCha8Rng> {
        self.parts.iter().map(|_| ChaCha8Rng::seed_from_u64(rng.gen())).collect()
    }
}

pub fn product_family(parts: Vec<Arc<dyn FunctionFamily>>) -> Result<ProductFamily> {
    ProductFamily::new(parts)
}

impl FunctionFamily for ProductFamily {
    fn dimension(&self) -> usize {
        self.parts.iter().map(|p| p.dimension()).sum()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Product(self.parts.iter().map(|p| p.provenance()).collect())
    }

    fn evaluate(&self, rng: &mut ChaCha8Rng) -> Result<Vec<BigRational>> {
        let mut out = Vec::with_capacity(self.dimension());
        for (part, mut r) in self.parts.iter().zip(self.child_rngs(rng)) {
            out.extend(part.evaluate(&mut r)?);
        }
        Ok(out)
    }

    fn evaluate_mod(&self, rng: &mut ChaCha8Rng, field: &ModP) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(self.dimension());
        for (part, mut r) in self.parts.iter().zip(self.child_rngs(rng)) {
            out.extend(part.evaluate_mod(&mut r, field)?);
        }
        Ok(out)
    }
}

type Evaluator = dyn Fn(&mut ChaCha8Rng) -> Result<Vec<BigRational>> + Send + Sync;

/// A family given by an arbitrary row generator.
#[derive(Clone)]
pub struct CustomFamily {
    name: String,
    dimension: usize,
    eval: Arc<Evaluator>,
}

impl CustomFamily {
    pub fn new<F>(name: &str, dimension: usize, eval: F) -> Self
    where
        F: Fn(&mut ChaCha8Rng) -> Result<Vec<BigRational>> + Send + Sync + 'static,
    {
        CustomFamily { name: name.to_string(), dimension, eval: Arc::new(eval) }
    }

    /// `(1, cos θ, sin θ)` at rational points of the unit circle,
    /// `cos θ = (1-t²)/(1+t²)`, `sin θ = 2t/(1+t²)`.
    pub fn circle() -> Self {
        CustomFamily::new("circle", 3, |rng| {
            let t = random_parameter(rng);
            let one = BigRational::one();
            let d = &one + &t * &t;
            Ok(vec![one.clone(), (&one - &t * &t) / &d, (&t * BigInt::from(2)) / &d])
        })
    }

    /// Two copies of one coordinate, `[x, x]`.
    pub fn duplicate() -> Self {
        CustomFamily::new("duplicate", 2, |rng| {
            let x = random_parameter(rng);
            Ok(vec![x.clone(), x])
        })
    }

    /// Rows `v·M` for a fixed square matrix `M` (a change of basis when
    /// `M` is invertible).
    pub fn transformed(inner: Arc<dyn FunctionFamily>, matrix: Vec<Vec<BigRational>>) -> Result<Self> {
        let m = inner.dimension();
        if matrix.len() != m || matrix.iter().any(|r| r.len() != m) {
            return Err(Error::Invalid(format!("change of basis must be {m}x{m}")));
        }
        let name = format!("{}*M", inner.label());
        Ok(CustomFamily::new(&name, m, move |rng| {
            let v = inner.evaluate(rng)?;
            Ok((0..m)
                .map(|j| v.iter().zip(&matrix).fold(BigRational::zero(), |acc, (x, row)| acc + x * &row[j]))
                .collect())
        }))
    }
}

impl FunctionFamily for CustomFamily {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn provenance(&self) -> Provenance {
        Provenance::Custom(self.name.clone())
    }

    fn evaluate(&self, rng: &mut ChaCha8Rng) -> Result<Vec<BigRational>> {
        let row = (self.eval)(rng)?;
        if row.len() != self.dimension {
            return Err(Error::SamplerExhausted(format!(
                "{} produced {} values, expected {}",
                self.name,
                row.len(),
                self.dimension
            )));
        }
        Ok(row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::Series;
    use crate::flows::Param;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn adjoint_rows_at_fixed_words() {
        let a1 = Arc::new(LieAlgebra::build(Series::A, 1).unwrap());
        let fam = adjoint_family(a1);
        assert_eq!(fam.row_at(&FlowWord::new()).unwrap(), vec![q(1), q(0), q(0)]);

        let a2 = Arc::new(LieAlgebra::build(Series::A, 2).unwrap());
        let fam = adjoint_family(a2.clone());
        let w = FlowWord::new().with(&a2, a2.e(2), Param::Rational(q(1)));
        let mut expected = vec![q(0); 8];
        expected[a2.h(1)] = q(1);
        expected[a2.e(2)] = q(1);
        assert_eq!(fam.row_at(&w).unwrap(), expected);
    }

    #[test]
    fn modular_rows_match_exact_rows() {
        let l = Arc::new(LieAlgebra::build(Series::A, 2).unwrap());
        let fam: Vec<Arc<dyn FunctionFamily>> =
            vec![Arc::new(adjoint_family(l)), Arc::new(CustomFamily::circle())];
        let prod = product_family(fam).unwrap();
        let field = ModP::new(1_000_000_007);
        for s in 0..5 {
            let exact = prod.evaluate(&mut ChaCha8Rng::seed_from_u64(s)).unwrap();
            let modular = prod.evaluate_mod(&mut ChaCha8Rng::seed_from_u64(s), &field).unwrap();
            let reduced: Vec<u64> = exact.iter().map(|x| field.reduce(x).unwrap()).collect();
            assert_eq!(modular, reduced);
        }
    }

    #[test]
    fn circle_points_lie_on_the_circle() {
        let fam = CustomFamily::circle();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let v = fam.evaluate(&mut rng).unwrap();
            assert_eq!(&v[1] * &v[1] + &v[2] * &v[2], q(1));
        }
    }

    #[test]
    fn product_labels_and_dimension() {
        let a1 = Arc::new(LieAlgebra::build(Series::A, 1).unwrap());
        let a2 = Arc::new(LieAlgebra::build(Series::A, 2).unwrap());
        let prod = product_family(vec![Arc::new(adjoint_family(a1)), Arc::new(adjoint_family(a2))]).unwrap();
        assert_eq!(prod.dimension(), 11);
        assert_eq!(prod.label(), "A1xA2");
        assert!(product_family(Vec::new()).is_err());
    }
}
