//! Keyed random streams.
//!
//! Every random decision draws from a ChaCha8 stream keyed by the run seed
//! and the decision's coordinates (purpose, patient, day). Streams never
//! depend on what happened earlier in the run, so two runs that diverge in
//! one place still share every other draw. Paired counterfactual runs rely
//! on this.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub(crate) enum Purpose {
    Patients = 1,
    Hcps = 2,
    Spikes = 3,
    Day = 4,
    Stay = 5,
    Messiness = 6,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn stream(seed: u64, purpose: Purpose, a: u64, b: u64) -> ChaCha8Rng {
    let mut key = splitmix64(seed ^ splitmix64(purpose as u64));
    key = splitmix64(key ^ a);
    key = splitmix64(key ^ b.rotate_left(32));
    ChaCha8Rng::seed_from_u64(key)
}
