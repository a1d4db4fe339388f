//! Per-replica random streams.
//!
//! A replica is identified by `(seed, index)`. The stream is ChaCha8 keyed by
//! the seed with the replica index as its stream id, so replica `i` sees the
//! same numbers no matter which thread runs it or in what order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Exponential waiting time with the given rate.
#[inline]
pub fn exp_time<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e / rate
}

/// Equiprobable ±1.
#[inline]
pub fn sign<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}
