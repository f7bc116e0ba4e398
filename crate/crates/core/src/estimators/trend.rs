use serde::{Deserialize, Serialize};

use super::montecarlo::Estimate;
use super::retro_mc::{holevo_retro, RetroMcOptions};
use crate::channels::RetroChannelSpec;
use crate::error::{Error, Result};

pub const MAX_TREND_DIM: usize = 32;

/// `c = d·⌈log₂d⌉³`, so `c(2) = 2`.
pub fn trend_c(d: usize) -> usize {
    let l = (usize::BITS - (d - 1).leading_zeros()) as usize;
    d * l * l * l
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub d: usize,
    pub c: usize,
    pub estimate: Estimate,
}

/// `C_H(R_{c(d),d})` for each `d`, every row with the same seed.
pub fn trend_scan(
    dims: &[usize],
    samples: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<TrendRow>> {
    if dims.is_empty() {
        return Err(Error::domain("no dimensions given"));
    }
    if dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("dimensions must be strictly ascending"));
    }
    if let Some(&d) = dims.iter().find(|&&d| !(2..=MAX_TREND_DIM).contains(&d)) {
        return Err(Error::domain(format!(
            "dimension {d} outside [2, {MAX_TREND_DIM}]"
        )));
    }
    let opts = RetroMcOptions {
        workers,
        ..Default::default()
    };
    dims.iter()
        .map(|&d| {
            let c = trend_c(d);
            let spec = RetroChannelSpec::standard(c, d)?;
            let estimate = holevo_retro(&spec, samples, seed, &opts)?.estimate;
            Ok(TrendRow { d, c, estimate })
        })
        .collect()
}

/// CSV with header `d,c,estimate,stderr`.
pub fn trend_csv(rows: &[TrendRow]) -> String {
    let mut out = String::from("d,c,estimate,stderr\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.d, r.c, r.estimate.mean, r.estimate.stderr
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::holevo_retro_mc;

    #[test]
    fn c_rule() {
        assert_eq!(trend_c(2), 2);
        assert_eq!(trend_c(3), 24);
        assert_eq!(trend_c(4), 32);
        assert_eq!(trend_c(8), 216);
        assert_eq!(trend_c(16), 1024);
    }

    #[test]
    fn first_row_matches_direct_estimate() {
        let rows = trend_scan(&[2, 3], 2000, 17, Some(2)).unwrap();
        assert_eq!(rows[0].estimate, holevo_retro_mc(2, 2, 2000, 17).unwrap());
        for r in &rows {
            assert!(r.estimate.mean >= 0.0 && r.estimate.mean <= (r.d as f64).log2());
        }
        let csv = trend_csv(&rows);
        assert!(csv.starts_with("d,c,estimate,stderr\n2,2,"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn bad_dims() {
        assert!(trend_scan(&[4, 2], 1000, 0, None).is_err());
        assert!(trend_scan(&[2, 64], 1000, 0, None).is_err());
        assert!(trend_scan(&[], 1000, 0, None).is_err());
    }
}
