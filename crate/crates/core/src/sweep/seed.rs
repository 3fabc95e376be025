//! Counter-based seed derivation.

/// Independent random streams derived from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Omega = 1,
    InitialState = 2,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes the master seed with a stream tag and a `(a_index, omega_index)`
/// counter. Pure, so any worker can derive any seed in any order.
pub fn derive_seed(master: u64, stream: Stream, a_index: u64, omega_index: u64) -> u64 {
    let mut h = splitmix64(master);
    for word in [stream as u64, a_index, omega_index] {
        h = splitmix64(h ^ word);
    }
    h
}
