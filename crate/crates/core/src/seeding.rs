//! Deterministic derivation of per-stream RNG seeds from a base seed.

/// Derives an independent seed for stream `stream` from `base`.
///
/// Uses the splitmix64 finalizer, so nearby (base, stream) pairs map to
/// well-separated seeds. Used wherever one user-facing seed fans out into
/// several RNG streams (scenes of a corpus, training iterations, shuffles).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9e3779b97f4a7c15)
        .wrapping_add(stream.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
