use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

const XI_STREAM: u64 = 0;
const ETA_STREAM: u64 = 1;
const BRIDGE_STREAM: u64 = 2;

/// Per-path random streams.
///
/// The ChaCha key is the little-endian concatenation of `(seed, path)`, so
/// distinct pairs give distinct keys. Within a key, the effector noise, the
/// tumor noise and the Brownian-bridge refinement draws use separate ChaCha
/// streams, which keeps them independent and keeps the main increments
/// identical whether or not a step had to be refined.
#[derive(Debug, Clone)]
pub struct NoiseStreams {
    xi: ChaCha8Rng,
    eta: ChaCha8Rng,
    bridge: ChaCha8Rng,
}

impl NoiseStreams {
    pub fn new(seed: u64, path: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&path.to_le_bytes());
        let stream = |id: u64| {
            let mut rng = ChaCha8Rng::from_seed(key);
            rng.set_stream(id);
            rng
        };
        Self {
            xi: stream(XI_STREAM),
            eta: stream(ETA_STREAM),
            bridge: stream(BRIDGE_STREAM),
        }
    }

    /// Next pair of unit normals `(xi, eta)` driving `B1` and `B2`.
    #[inline]
    pub fn next_normals<T: Scalar>(&mut self) -> (T, T) {
        (
            T::standard_normal(&mut self.xi),
            T::standard_normal(&mut self.eta),
        )
    }

    /// Unit normal used only to refine a rejected step.
    #[inline]
    pub fn next_bridge<T: Scalar>(&mut self) -> T {
        T::standard_normal(&mut self.bridge)
    }
}

/// A materialized block of unit normals for both Brownian motions.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianIncrements<T> {
    pub dt: T,
    pub xi: Vec<T>,
    pub eta: Vec<T>,
    pub seed: u64,
}

impl<T: Scalar> BrownianIncrements<T> {
    /// The first `n` draws a path simulated with `seed` would consume.
    pub fn generate(seed: u64, dt: T, n: usize) -> Self {
        let mut streams = NoiseStreams::new(seed, 0);
        let (xi, eta) = (0..n).map(|_| streams.next_normals::<T>()).unzip();
        Self { dt, xi, eta, seed }
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Brownian increments `(dW1, dW2)` of step `k`.
    pub fn increment(&self, k: usize) -> (T, T) {
        let sq = self.dt.sqrt();
        (self.xi[k] * sq, self.eta[k] * sq)
    }
}
