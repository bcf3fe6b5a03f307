//! Seedless 64-bit hashing used wherever a value must stay stable across
//! runs, platforms and toolchains (std's `DefaultHasher` guarantees none of
//! that).

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a followed by the splitmix64 finalizer, which spreads FNV's weak low
/// bits before any modulo reduction.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    mix(h)
}

pub(crate) fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a sub-seed from a root seed and a sequence of labels.
pub fn derive_seed(seed: u64, labels: &[&[u8]]) -> u64 {
    let mut buf = seed.to_le_bytes().to_vec();
    for l in labels {
        buf.extend_from_slice(&(l.len() as u64).to_le_bytes());
        buf.extend_from_slice(l);
    }
    stable_hash(&buf)
}
