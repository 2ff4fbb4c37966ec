//! Counter-based random numbers.
//!
//! Every random draw is a pure function of (seed, stream, counter), so
//! meshes, right-hand sides, and Lanczos start vectors are reproducible
//! bit-for-bit regardless of evaluation order. No global state.

use crate::scalar::Real;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic hash of a (seed, stream, counter) triple.
#[inline]
pub fn mix(seed: u64, stream: u64, counter: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ counter)
}

/// Uniform sample in [-1, 1] keyed by (seed, stream, counter).
#[inline]
pub fn unit<T: Real>(seed: u64, stream: u64, counter: u64) -> T {
    // 53 mantissa bits -> [0, 1), then affine to [-1, 1].
    let bits = mix(seed, stream, counter) >> 11;
    let u01 = bits as f64 / (1u64 << 53) as f64;
    T::from_f64(2.0 * u01 - 1.0).unwrap()
}

/// Sequential stream of uniform [-1, 1] samples.
pub struct CounterRng {
    seed: u64,
    stream: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        CounterRng { seed, stream, counter: 0 }
    }

    pub fn next_unit<T: Real>(&mut self) -> T {
        let v = unit(self.seed, self.stream, self.counter);
        self.counter += 1;
        v
    }

    pub fn fill_unit<T: Real>(&mut self, out: &mut [T]) {
        for x in out.iter_mut() {
            *x = self.next_unit();
        }
    }
}
