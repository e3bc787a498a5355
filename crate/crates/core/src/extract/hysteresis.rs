use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::EdgeMap;

/// Probability thresholds for linking thinned edge responses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HysteresisConfig {
    pub low: f64,
    pub high: f64,
}

impl Default for HysteresisConfig {
    fn default() -> Self {
        HysteresisConfig {
            low: 0.85,
            high: 0.9,
        }
    }
}

impl HysteresisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.low && self.low <= self.high && self.high <= 1.0) {
            return Err(Error::Config(format!(
                "hysteresis needs 0 <= low <= high <= 1, got {} / {}",
                self.low, self.high
            )));
        }
        Ok(())
    }
}

/// Two-threshold edge linking: scores `>= high` seed edges, scores `>= low`
/// are kept when 8-connected to a seed through other kept pixels.
pub fn hysteresis(score: &Grid<f64>, low: f64, high: f64) -> Result<EdgeMap> {
    hysteresis_masked(score, None, low, high)
}

/// As [`hysteresis`], but pixels outside `mask` are never edges and do not
/// connect anything.
pub(crate) fn hysteresis_masked(
    score: &Grid<f64>,
    mask: Option<&Grid<bool>>,
    low: f64,
    high: f64,
) -> Result<EdgeMap> {
    if low > high || low.is_nan() || high.is_nan() {
        return Err(Error::Config(format!(
            "hysteresis needs low <= high, got {low} / {high}"
        )));
    }
    if let Some(m) = mask {
        score.same_shape(m)?;
    }
    let (h, w) = score.dims();
    let allowed = |r: usize, c: usize| mask.is_none_or(|m| *m.get(r, c));
    let mut out = Grid::filled(h, w, false);
    let mut queue = VecDeque::new();
    for r in 0..h {
        for c in 0..w {
            if allowed(r, c) && *score.get(r, c) >= high {
                *out.get_mut(r, c) = true;
                queue.push_back((r, c));
            }
        }
    }
    while let Some((r, c)) = queue.pop_front() {
        for dr in -1isize..=1 {
            for dc in -1isize..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (rr, cc) = (r as isize + dr, c as isize + dc);
                if rr < 0 || cc < 0 || rr as usize >= h || cc as usize >= w {
                    continue;
                }
                let (rr, cc) = (rr as usize, cc as usize);
                if !*out.get(rr, cc) && allowed(rr, cc) && *score.get(rr, cc) >= low {
                    *out.get_mut(rr, cc) = true;
                    queue.push_back((rr, cc));
                }
            }
        }
    }
    Ok(EdgeMap::from_mask(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(values: &[f64]) -> Grid<f64> {
        Grid::from_vec(1, values.len(), values.to_vec()).unwrap()
    }

    #[test]
    fn below_low_is_empty() {
        let e = hysteresis(&row(&[0.1, 0.5, 0.84]), 0.85, 0.9).unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn weak_chain_attached_to_seed_is_kept() {
        let e = hysteresis(&row(&[0.86, 0.86, 0.95]), 0.85, 0.9).unwrap();
        assert_eq!(e.pixels(), vec![(0, 0), (0, 1), (0, 2)]);
    }

    #[test]
    fn isolated_weak_pixel_is_dropped() {
        let e = hysteresis(&row(&[0.86, 0.0, 0.95]), 0.85, 0.9).unwrap();
        assert_eq!(e.pixels(), vec![(0, 2)]);
    }

    #[test]
    fn diagonal_connectivity_counts() {
        let g = Grid::from_vec(2, 2, vec![0.95, 0.0, 0.0, 0.86]).unwrap();
        assert_eq!(hysteresis(&g, 0.85, 0.9).unwrap().len(), 2);
    }

    #[test]
    fn zero_thresholds_mark_everything() {
        let g = Grid::from_fn(3, 4, |r, c| (r * c) as f64 * 0.1);
        assert_eq!(hysteresis(&g, 0.0, 0.0).unwrap().len(), 12);
    }

    #[test]
    fn inverted_thresholds_fail() {
        assert!(hysteresis(&row(&[0.5]), 0.9, 0.1).is_err());
    }
}
