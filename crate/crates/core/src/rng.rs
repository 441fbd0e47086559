//! Seeded generators used by the process.
//!
//! A run is keyed by a single 64-bit seed. The SplitMix64 sequence of that
//! seed is cut into blocks of four words; block `m` is the xoshiro256++ state
//! used for step `m`. Any step of any run can therefore be regenerated from
//! `(seed, m)` alone, which is what snapshot restore relies on.

use rand::RngCore;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Salt mixed into the seed for the statistics sampler, so that sampling open
/// edges never shares a stream with edge selection.
const SAMPLER_SALT: u64 = 0x5a17_c0de_d1ce_5eed;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The SplitMix64 generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Positions the generator so that the next output is output number
    /// `index` (0-based) of the sequence seeded with `seed`.
    pub fn at(seed: u64, index: u64) -> Self {
        SplitMix64 {
            state: seed.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }
}

/// The xoshiro256++ generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Xoshiro256pp {
    s: [u64; 4],
}

impl Xoshiro256pp {
    pub fn from_state(s: [u64; 4]) -> Self {
        debug_assert!(s.iter().any(|&w| w != 0));
        Xoshiro256pp { s }
    }

    /// Expands a seed through SplitMix64.
    pub fn from_seed(seed: u64) -> Self {
        Self::from_splitmix(&mut SplitMix64::new(seed))
    }

    fn from_splitmix(sm: &mut SplitMix64) -> Self {
        let s = [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()];
        if s == [0; 4] {
            // Unreachable in practice: SplitMix64 is a bijection on each word.
            return Xoshiro256pp { s: [1, 0, 0, 0] };
        }
        Xoshiro256pp { s }
    }

    /// State for step `m` of the run keyed by `seed`.
    pub fn for_step(seed: u64, m: u64) -> Self {
        Self::from_splitmix(&mut SplitMix64::at(seed, m.wrapping_mul(4)))
    }

    /// State for the statistics sampler at step `m` of the run keyed by `seed`.
    pub fn for_sample(seed: u64, m: u64) -> Self {
        Self::for_step(seed ^ SAMPLER_SALT, m)
    }

    pub fn state(&self) -> [u64; 4] {
        self.s
    }

    #[inline]
    pub fn next(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform index in `[0, bound)`.
    ///
    /// Takes the high 64 bits of the 128-bit product of a draw with `bound`
    /// and rejects draws whose low half falls in the biased zone.
    pub fn index(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let wide = (self.next() as u128) * (bound as u128);
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }
}

impl RngCore for Xoshiro256pp {
    fn next_u32(&mut self) -> u32 {
        (self.next() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.next()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
