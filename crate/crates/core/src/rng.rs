//! Counter-based random numbers: Philox4x32-10 keyed by the experiment seed,
//! with the stream (replicate) index in the upper half of the counter.
//!
//! Any draw of any replicate is a pure function of `(seed, stream, index)`,
//! so replicates can run on any thread in any order.

use rand_core::RngCore;

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = u64::from(a) * u64::from(b);
    ((p >> 32) as u32, p as u32)
}

/// One Philox4x32 block with 10 rounds.
pub fn philox4x32_10(mut ctr: [u32; 4], mut key: [u32; 2]) -> [u32; 4] {
    for round in 0..10 {
        if round > 0 {
            key[0] = key[0].wrapping_add(W0);
            key[1] = key[1].wrapping_add(W1);
        }
        let (hi0, lo0) = mulhilo(M0, ctr[0]);
        let (hi1, lo1) = mulhilo(M1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0];
    }
    ctr
}

/// Stream index for replicate `replicate` of grid point `grid_index`.
pub fn stream_id(grid_index: usize, replicate: usize) -> u64 {
    ((grid_index as u64) << 32) | (replicate as u64 & 0xFFFF_FFFF)
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    key: [u32; 2],
    stream: u64,
    block: u64,
    buf: [u32; 4],
    word: usize,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        CounterRng::at_word(seed, stream, 0)
    }

    /// Positions the generator at 32-bit word `word` of the stream.
    pub fn at_word(seed: u64, stream: u64, word: u64) -> Self {
        let mut rng =
            CounterRng { key: [seed as u32, (seed >> 32) as u32], stream, block: word / 4, buf: [0; 4], word: 0 };
        rng.fill();
        rng.word = (word % 4) as usize;
        rng
    }

    fn fill(&mut self) {
        let ctr = [self.block as u32, (self.block >> 32) as u32, self.stream as u32, (self.stream >> 32) as u32];
        self.buf = philox4x32_10(ctr, self.key);
    }

    /// Uniform on the open interval (0, 1): never returns 0 or 1.
    pub fn open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        if self.word == 4 {
            self.block = self.block.wrapping_add(1);
            self.fill();
            self.word = 0;
        }
        let v = self.buf[self.word];
        self.word += 1;
        v
    }

    fn next_u64(&mut self) -> u64 {
        let lo = u64::from(self.next_u32());
        let hi = u64::from(self.next_u32());
        (hi << 32) | lo
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        rand_core::impls::fill_bytes_via_next(self, dst)
    }
}
