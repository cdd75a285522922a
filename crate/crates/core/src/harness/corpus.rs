//! Seeded random polynomial corpora.
//!
//! Item `i` of a corpus draws from its own ChaCha stream (`seed`, stream
//! `i`), so corpora are identical whatever the evaluation order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lacunary::LacunaryDecomposition;
use crate::poly::CoeffSeq;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoeffLaw {
    /// Real and imaginary parts independent `N(0, 1/2)`, so `E|a_k|² = 1`.
    ComplexGaussian,
    /// `e^{iθ}` with uniform phase.
    UnitModulus,
    /// Complex Gaussian with probability `density`, zero otherwise.
    Sparse { density: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    /// Degree bound `D`.
    pub degree: usize,
    pub law: CoeffLaw,
    /// Restrict supports to unions of coefficient blocks `n_1 < n_2 < …`
    /// with `n_{j+1} - n_j >= 2`.
    #[serde(default)]
    pub block_aligned: bool,
}

impl CorpusSpec {
    pub fn new(seed: u64, count: usize, degree: usize, law: CoeffLaw) -> CorpusSpec {
        CorpusSpec { seed, count, degree, law, block_aligned: false }
    }

    fn validate(&self) -> Result<()> {
        if self.count == 0 || self.degree == 0 {
            return Err(Error::InvalidParameter("corpus needs count >= 1 and degree >= 1".into()));
        }
        if let CoeffLaw::Sparse { density } = self.law {
            if !(0.0..=1.0).contains(&density) {
                return Err(Error::InvalidParameter(format!("sparse density must lie in [0, 1], got {density}")));
            }
        }
        Ok(())
    }
}

/// The RNG for item `index` of a corpus with the given seed.
pub fn item_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn draw(law: CoeffLaw, rng: &mut ChaCha8Rng) -> Complex64 {
    match law {
        CoeffLaw::ComplexGaussian => gaussian(rng),
        CoeffLaw::UnitModulus => Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU),
        CoeffLaw::Sparse { density } => {
            // always consume the Gaussian so the stream does not depend on the coin
            let z = gaussian(rng);
            if rng.random::<f64>() < density {
                z
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    }
}

/// Polynomials of degree at most `spec.degree` with independent coefficients.
///
/// For block-aligned specs use [`build_block_corpus`].
pub fn build_corpus(spec: &CorpusSpec) -> Result<Vec<CoeffSeq>> {
    spec.validate()?;
    if spec.block_aligned {
        return Err(Error::InvalidParameter("block-aligned corpora need a decomposition".into()));
    }
    Ok((0..spec.count)
        .map(|i| {
            let mut rng = item_rng(spec.seed, i);
            CoeffSeq::new((0..=spec.degree).map(|_| draw(spec.law, &mut rng)).collect())
        })
        .collect())
}

/// A sum `h = Σ_j h_j` whose parts live on separated coefficient blocks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockSum {
    pub blocks: Vec<usize>,
    pub sum: CoeffSeq,
}

impl BlockSum {
    /// The parts `h_j`, one per block.
    pub fn parts(&self, decomp: &LacunaryDecomposition) -> Vec<CoeffSeq> {
        self.blocks
            .iter()
            .map(|&n| {
                let (lo, hi) = decomp.block_range(n);
                self.sum.restrict(lo, hi)
            })
            .collect()
    }
}

/// Block-aligned sums over the blocks whose coefficient range ends at or
/// below `spec.degree`. Each sum starts at block 0 or 1 and advances by 2
/// or 3 blocks at random.
pub fn build_block_corpus(spec: &CorpusSpec, decomp: &LacunaryDecomposition) -> Result<Vec<BlockSum>> {
    spec.validate()?;
    let usable = (0..decomp.blocks()).take_while(|&n| decomp.block_range(n).1 <= spec.degree).count();
    if usable < 3 {
        return Err(Error::InsufficientBlocks { degree: spec.degree, max: decomp.block_coverage() });
    }
    Ok((0..spec.count)
        .map(|i| {
            let mut rng = item_rng(spec.seed, i);
            let mut blocks = Vec::new();
            let mut n = rng.random_range(0..2usize);
            while n < usable {
                blocks.push(n);
                n += rng.random_range(2..4usize);
            }
            let top = decomp.block_range(*blocks.last().unwrap()).1;
            let mut coeffs = vec![Complex64::new(0.0, 0.0); top + 1];
            for &b in &blocks {
                let (lo, hi) = decomp.block_range(b);
                for c in &mut coeffs[lo..=hi] {
                    *c = draw(spec.law, &mut rng);
                }
            }
            BlockSum { blocks, sum: CoeffSeq::new(coeffs) }
        })
        .collect())
}

/// Multipliers `θ` with `|θ_k| <= 1`: uniform modulus in `[0, 1]` and
/// uniform phase.
pub fn random_multiplier(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| {
            let r: f64 = rng.random();
            Complex64::from_polar(r, rng.random::<f64>() * std::f64::consts::TAU)
        })
        .collect()
}
