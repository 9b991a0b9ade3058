#![allow(dead_code)]

use chargebus::nalgebra::DMatrix;
use chargebus::{Complex64 as C64, HermitianOperator, HilbertSpace, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random normalized state supported only where `allowed` holds.
pub fn random_state(rng: &mut ChaCha8Rng, space: HilbertSpace, allowed: impl Fn(usize) -> bool) -> StateVector {
    let amps: Vec<C64> =
        (0..space.dimension()).map(|i| if allowed(i) { complex(rng) } else { C64::new(0.0, 0.0) }).collect();
    StateVector::from_vec(space, amps).unwrap().normalized().unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, space: HilbertSpace) -> HermitianOperator {
    let d = space.dimension();
    let a = DMatrix::from_fn(d, d, |_, _| complex(rng));
    HermitianOperator::new(space, (&a + a.adjoint()) * C64::new(0.5, 0.0)).unwrap()
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
