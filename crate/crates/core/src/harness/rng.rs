//! Seeded, portable random streams.
//!
//! Every generated tensor draws from its own ChaCha8 stream of the same
//! seed, so adding a tensor never perturbs the others:
//!
//! | data          | stream | content                      |
//! |---------------|--------|------------------------------|
//! | logistic      | 0      | features `u_i`               |
//! |               | 1      | label noise `ξ_i`            |
//! |               | 2      | support of the true `v`      |
//! | game          | 0      | payoff entries               |
//! | game start    | 16, 17 | initial `x`, `y`             |
//! | Lasso         | 0      | design matrix                |
//! |               | 1      | support of `x_true`          |
//! |               | 2      | signs of `x_true`            |
//! |               | 3      | observation noise            |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
