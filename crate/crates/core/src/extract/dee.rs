use super::hysteresis::{hysteresis, HysteresisConfig};
use super::nms::nms;
use crate::error::Result;
use crate::grid::Grid;
use crate::model::{EdgeMap, EdgeProbMap};

/// Thins a dense edge-probability map to one-pixel edges: non-maximum
/// suppression across `orient` followed by hysteresis.
pub fn dee_postprocess(
    probs: &EdgeProbMap,
    orient: &Grid<f64>,
    cfg: &HysteresisConfig,
) -> Result<EdgeMap> {
    cfg.validate()?;
    let thinned = nms(probs.probs(), orient)?;
    hysteresis(&thinned, cfg.low, cfg.high)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probs(h: usize, w: usize, f: impl FnMut(usize, usize) -> f64) -> EdgeProbMap {
        EdgeProbMap::new(Grid::from_fn(h, w, f)).unwrap()
    }

    #[test]
    fn zero_map_is_empty() {
        let p = probs(4, 4, |_, _| 0.0);
        let e = dee_postprocess(&p, &Grid::filled(4, 4, 0.0), &HysteresisConfig::default()).unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn gaussian_band_thins_to_peak_column() {
        let profile = [0.2, 0.7, 0.95, 0.7, 0.2];
        let p = probs(6, 5, |_, c| profile[c]);
        let e = dee_postprocess(&p, &Grid::filled(6, 5, 0.0), &HysteresisConfig::default()).unwrap();
        assert_eq!(e.pixels(), (0..6).map(|r| (r, 2)).collect::<Vec<_>>());
    }

    #[test]
    fn saturated_plateau_resolves_by_tie_break() {
        // Every pixel ties with its forward neighbour and loses to the
        // backward one except where the backward sample leaves the frame.
        let p = probs(4, 4, |_, _| 1.0);
        let horizontal =
            dee_postprocess(&p, &Grid::filled(4, 4, 0.0), &HysteresisConfig::default()).unwrap();
        assert_eq!(horizontal.pixels(), vec![(0, 0), (1, 0), (2, 0), (3, 0)]);
        let vertical = dee_postprocess(
            &p,
            &Grid::filled(4, 4, std::f64::consts::FRAC_PI_2),
            &HysteresisConfig::default(),
        )
        .unwrap();
        assert_eq!(vertical.pixels(), vec![(0, 0), (0, 1), (0, 2), (0, 3)]);
    }
}
