//! Hierarchical seed derivation.
//!
//! Every random stream in a run is derived from one master seed through a
//! chain of tags (`master -> generation -> purpose -> index`), so that
//! parallel scheduling order can never change which numbers a computation
//! sees.

/// Purpose tags for derived streams. Kept in one place so core and harness
/// never collide.
pub mod tag {
    pub const INIT: u64 = 0x01;
    pub const BREED: u64 = 0x02;
    pub const EVAL: u64 = 0x03;
    pub const TEST_EVAL: u64 = 0x04;
    pub const SITUATIONS: u64 = 0x05;
    pub const TRAIN_INSTANCE: u64 = 0x06;
    pub const TEST_INSTANCE: u64 = 0x07;
    pub const REP: u64 = 0x08;
    pub const QUALITY: u64 = 0x09;
}

/// SplitMix64 step; full-period bijective mixer.
fn splitmix(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a tag path.
pub fn derive(master: u64, tags: &[u64]) -> u64 {
    let mut s = splitmix(master);
    for &t in tags {
        s = splitmix(s ^ t.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    }
    s
}

/// Stable 64-bit FNV-1a hash, used for labels and content digests.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
