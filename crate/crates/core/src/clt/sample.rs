use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Clt;
use crate::data::BitMatrix;
use crate::{Error, Result};

/// Draws `n` i.i.d. rows by ancestral sampling; row `r` uses ChaCha stream `r`.
pub fn clt_sample(model: &Clt, n: usize, seed: u64) -> Result<BitMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let v = model.var_count();
    let one_prob: Vec<[f64; 2]> = (0..v)
        .map(|i| {
            let t = model.log_table(i);
            [t[0][1].exp(), t[1][1].exp()]
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0u8; v]; n];
    for (r, x) in rows.iter_mut().enumerate() {
        rng.set_stream(r as u64);
        rng.set_word_pos(0);
        for &i in model.topo_order() {
            let s = model.parent(i).map_or(0, |p| x[p] as usize);
            x[i] = u8::from(rng.random::<f64>() < one_prob[i][s]);
        }
    }
    BitMatrix::from_rows(&rows)
}
