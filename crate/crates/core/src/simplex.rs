//! The layered and Shannon entropies over a grid on the 3-atom simplex.

use serde::Serialize;

use crate::entropy::{layered_entropy, shannon_entropy};
use crate::error::{Error, Result};
use crate::pmf::Pmf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexPoint {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    #[serde(rename = "H")]
    pub shannon: f64,
    #[serde(rename = "Lambda")]
    pub layered: f64,
}

/// Every `(i, j, k)/resolution` with `i + j + k = resolution`, `i` outermost.
pub fn simplex_grid(resolution: usize) -> Result<Vec<SimplexPoint>> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let r = resolution as f64;
    let mut out = Vec::with_capacity((resolution + 1) * (resolution + 2) / 2);
    for i in 0..=resolution {
        for j in 0..=resolution - i {
            let k = resolution - i - j;
            let probs = vec![i as f64 / r, j as f64 / r, k as f64 / r];
            let p = Pmf::normalized(probs.clone())?;
            out.push(SimplexPoint {
                p1: probs[0],
                p2: probs[1],
                p3: probs[2],
                shannon: shannon_entropy(&p),
                layered: layered_entropy(&p.sorted()),
            });
        }
    }
    Ok(out)
}
