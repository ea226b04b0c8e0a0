//! Deterministic benchmark instances.
//!
//! Bits come from splitmix64 so that the same `(n, density, seed)` gives the
//! same vector in any language: bit `i` is set iff the `i`-th output is below
//! `density * 2^64`.

use rs3::BitVector;

/// The splitmix64 generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` (`bound >= 1`).
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InstanceKind {
    Uniform {
        density: f64,
    },
    /// Uniform flanks around a centred run of `10^d` zeros.
    Gap {
        d: u32,
        density: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SpecError {
    #[error("n must be at least 1")]
    EmptyInstance,
    #[error("density {0} must lie in (0, 1]")]
    BadDensity(f64),
    #[error("a zero run of 10^{d} bits plus its two bounding 1-bits does not fit in n = {n}")]
    GapTooLong { d: u32, n: usize },
}

impl InstanceSpec {
    pub fn uniform(n: usize, density: f64, seed: u64) -> Self {
        Self {
            kind: InstanceKind::Uniform { density },
            n,
            seed,
        }
    }

    pub fn gap(n: usize, d: u32, density: f64, seed: u64) -> Self {
        Self {
            kind: InstanceKind::Gap { d, density },
            n,
            seed,
        }
    }

    pub fn density(&self) -> f64 {
        match self.kind {
            InstanceKind::Uniform { density } | InstanceKind::Gap { density, .. } => density,
        }
    }

    /// Start and length of the forced zero run, if any.
    pub fn gap_range(&self) -> Option<(usize, usize)> {
        match self.kind {
            InstanceKind::Uniform { .. } => None,
            InstanceKind::Gap { d, .. } => {
                let len = 10usize.checked_pow(d)?;
                Some((self.n.checked_sub(len)? / 2, len))
            }
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.n == 0 {
            return Err(SpecError::EmptyInstance);
        }
        let p = self.density();
        if !(p > 0.0 && p <= 1.0) {
            return Err(SpecError::BadDensity(p));
        }
        if let InstanceKind::Gap { d, .. } = self.kind {
            match self.gap_range() {
                Some((start, len)) if start >= 1 && start + len < self.n => {}
                _ => return Err(SpecError::GapTooLong { d, n: self.n }),
            }
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<BitVector, SpecError> {
        self.validate()?;
        let mut v = uniform_bits(self.n, self.density(), self.seed);
        if let Some((start, len)) = self.gap_range() {
            for i in start..start + len {
                v.set(i, false);
            }
            v.set(start - 1, true);
            v.set(start + len, true);
        }
        Ok(v)
    }
}

/// Bit `i` set iff the `i`-th splitmix64 output is below `p * 2^64`.
pub fn uniform_bits(n: usize, p: f64, seed: u64) -> BitVector {
    let threshold: u128 = if p >= 1.0 {
        1 << 64
    } else {
        (p * 18_446_744_073_709_551_616.0) as u128
    };
    let mut rng = SplitMix64::new(seed);
    BitVector::from_fn(n, |_| (rng.next_u64() as u128) < threshold)
}

/// Start and length of the longest run of `value` bits (first one on ties).
pub fn longest_run(v: &BitVector, value: bool) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut start = 0;
    let mut len = 0;
    for (i, b) in v.iter().enumerate() {
        if b == value {
            if len == 0 {
                start = i;
            }
            len += 1;
            if best.map_or(true, |(_, l)| len > l) {
                best = Some((start, len));
            }
        } else {
            len = 0;
        }
    }
    best
}
