//! Seeded gradient noise.
//!
//! Improved Perlin noise over `(x, y, t)`. The permutation table is built
//! from the seed by a Fisher-Yates shuffle of `0..=255` driven by
//! SplitMix64 (`j = next_u64() % (i + 1)` for `i = 255 down to 1`), so the
//! field is reproducible bit-for-bit from its seed.

use crate::rng::SplitMix64;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct NoiseField {
    seed: u64,
    octaves: u32,
    base_frequency: f64,
    perm: Box<[u8; 512]>,
}

impl NoiseField {
    pub fn new(seed: u64, octaves: u32, base_frequency: f64) -> Result<Self> {
        if octaves == 0 {
            return Err(Error::param("octaves", "need at least one octave"));
        }
        if !(base_frequency.is_finite() && base_frequency > 0.0) {
            return Err(Error::param(
                "base_frequency",
                format!("must be finite and > 0, got {base_frequency}"),
            ));
        }
        Ok(NoiseField {
            seed,
            octaves,
            base_frequency,
            perm: permutation(seed),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn octaves(&self) -> u32 {
        self.octaves
    }

    pub fn base_frequency(&self) -> f64 {
        self.base_frequency
    }

    /// Fractal sum of octaves at normalized `(x, y)` and time `t`, in `[-1, 1]`.
    /// Octave `o` runs at `base_frequency * 2^o` with weight `2^-o`; `t` shifts
    /// the third lattice axis.
    pub fn value(&self, x: f64, y: f64, t: f64) -> f64 {
        let mut freq = self.base_frequency;
        let mut amp = 1.0;
        let mut sum = 0.0;
        let mut norm = 0.0;
        for _ in 0..self.octaves {
            sum += amp * self.gradient_noise(x * freq, y * freq, t);
            norm += amp;
            freq *= 2.0;
            amp *= 0.5;
        }
        (sum / norm).clamp(-1.0, 1.0)
    }

    fn gradient_noise(&self, x: f64, y: f64, z: f64) -> f64 {
        let p = &self.perm;
        let (xf, yf, zf) = (x.floor(), y.floor(), z.floor());
        let (xi, yi, zi) = (
            (xf as i64 & 255) as usize,
            (yf as i64 & 255) as usize,
            (zf as i64 & 255) as usize,
        );
        let (x, y, z) = (x - xf, y - yf, z - zf);
        let (u, v, w) = (fade(x), fade(y), fade(z));

        let a = p[xi] as usize + yi;
        let aa = p[a] as usize + zi;
        let ab = p[a + 1] as usize + zi;
        let b = p[xi + 1] as usize + yi;
        let ba = p[b] as usize + zi;
        let bb = p[b + 1] as usize + zi;

        lerp(
            w,
            lerp(
                v,
                lerp(u, grad(p[aa], x, y, z), grad(p[ba], x - 1.0, y, z)),
                lerp(u, grad(p[ab], x, y - 1.0, z), grad(p[bb], x - 1.0, y - 1.0, z)),
            ),
            lerp(
                v,
                lerp(
                    u,
                    grad(p[aa + 1], x, y, z - 1.0),
                    grad(p[ba + 1], x - 1.0, y, z - 1.0),
                ),
                lerp(
                    u,
                    grad(p[ab + 1], x, y - 1.0, z - 1.0),
                    grad(p[bb + 1], x - 1.0, y - 1.0, z - 1.0),
                ),
            ),
        )
    }
}

fn permutation(seed: u64) -> Box<[u8; 512]> {
    let mut base: [u8; 256] = std::array::from_fn(|i| i as u8);
    let mut rng = SplitMix64::new(seed);
    for i in (1..256usize).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        base.swap(i, j);
    }
    let mut perm = Box::new([0u8; 512]);
    for i in 0..512 {
        perm[i] = base[i & 255];
    }
    perm
}

#[inline]
fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

#[inline]
fn lerp(t: f64, a: f64, b: f64) -> f64 {
    a + t * (b - a)
}

#[inline]
fn grad(hash: u8, x: f64, y: f64, z: f64) -> f64 {
    let h = hash & 15;
    let u = if h < 8 { x } else { y };
    let v = if h < 4 {
        y
    } else if h == 12 || h == 14 {
        x
    } else {
        z
    };
    (if h & 1 == 0 { u } else { -u }) + (if h & 2 == 0 { v } else { -v })
}
