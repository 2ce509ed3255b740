//! Keyed random streams.
//!
//! A [`Stream`] is a 64-bit key. Children are derived by hashing the parent key
//! with a label, a replica index or a [`Purpose`] tag, so every generator used
//! by an experiment is a pure function of the master seed and its position in
//! the experiment. Nothing depends on thread scheduling.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Initial = 1,
    Clocks = 2,
    Eta = 3,
    Xi = 4,
    Renewal = 5,
    Walks = 6,
    Field = 7,
    Probe = 8,
    Instance = 9,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Stream {
    key: u64,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl Stream {
    /// Root stream of an experiment.
    pub fn new(master_seed: u64, label: &str) -> Self {
        Stream {
            key: mix(mix(master_seed.wrapping_add(GOLDEN)) ^ fnv1a(label)),
        }
    }

    pub fn key(self) -> u64 {
        self.key
    }

    pub fn child(self, tag: u64) -> Self {
        Stream {
            key: mix(self.key ^ mix(tag.wrapping_add(GOLDEN))),
        }
    }

    pub fn label(self, label: &str) -> Self {
        self.child(fnv1a(label))
    }

    pub fn replica(self, index: u64) -> Self {
        self.child(index.wrapping_mul(2).wrapping_add(1))
    }

    pub fn purpose(self, purpose: Purpose) -> Self {
        self.child((purpose as u64) << 56)
    }

    pub fn rng(self) -> StreamRng {
        StreamRng::seed_from_u64(self.key)
    }
}
