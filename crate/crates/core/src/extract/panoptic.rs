use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::EdgeMap;

/// Per-pixel instance (segment) and class labels, plus unordered class
/// pairs whose shared boundaries are not depth edges (e.g. road/sidewalk).
#[derive(Debug, Clone, PartialEq)]
pub struct PanopticMap {
    segment_id: Grid<u32>,
    class_id: Grid<u32>,
    excluded: BTreeSet<(u32, u32)>,
}

fn unordered(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

impl PanopticMap {
    pub fn new(
        segment_id: Grid<u32>,
        class_id: Grid<u32>,
        excluded_class_pairs: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self> {
        segment_id.same_shape(&class_id)?;
        let mut class_of = std::collections::HashMap::new();
        for (&s, &k) in segment_id.as_slice().iter().zip(class_id.as_slice()) {
            if let Some(&prev) = class_of.get(&s) {
                if prev != k {
                    return Err(Error::InvalidInput(format!(
                        "segment {s} carries classes {prev} and {k}"
                    )));
                }
            } else {
                class_of.insert(s, k);
            }
        }
        Ok(PanopticMap {
            segment_id,
            class_id,
            excluded: excluded_class_pairs
                .into_iter()
                .map(|(a, b)| unordered(a, b))
                .collect(),
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.segment_id.dims()
    }

    pub fn segment_id(&self) -> &Grid<u32> {
        &self.segment_id
    }

    pub fn class_id(&self) -> &Grid<u32> {
        &self.class_id
    }

    pub fn is_excluded(&self, a: u32, b: u32) -> bool {
        self.excluded.contains(&unordered(a, b))
    }
}

/// Initial edge proposal from panoptic labels.
///
/// A pixel is an edge iff one of its 4-neighbours belongs to a segment with
/// a smaller id and the two classes are not an excluded pair, so every
/// boundary is drawn once, on the larger-id side.
pub fn gt_from_panoptic(pm: &PanopticMap) -> EdgeMap {
    let (h, w) = pm.dims();
    let seg = &pm.segment_id;
    let cls = &pm.class_id;
    let mask = Grid::from_fn(h, w, |r, c| {
        let (s, k) = (*seg.get(r, c), *cls.get(r, c));
        [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)]
            .iter()
            .any(|&(dr, dc)| {
                let (rr, cc) = (r as isize + dr, c as isize + dc);
                match seg.get_signed(rr, cc) {
                    Some(&ns) if ns < s => {
                        let nk = *cls.get(rr as usize, cc as usize);
                        !pm.is_excluded(k, nk)
                    }
                    _ => false,
                }
            })
    });
    EdgeMap::from_mask(mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn halves(h: usize, w: usize, left: (u32, u32), right: (u32, u32)) -> (Grid<u32>, Grid<u32>) {
        let seg = Grid::from_fn(h, w, |_, c| if c < w / 2 { left.0 } else { right.0 });
        let cls = Grid::from_fn(h, w, |_, c| if c < w / 2 { left.1 } else { right.1 });
        (seg, cls)
    }

    #[test]
    fn single_segment_has_no_edges() {
        let pm = PanopticMap::new(Grid::filled(4, 4, 3), Grid::filled(4, 4, 1), []).unwrap();
        assert!(gt_from_panoptic(&pm).is_empty());
    }

    #[test]
    fn same_class_instances_are_separated_on_larger_id_side() {
        let (seg, cls) = halves(3, 6, (7, 2), (4, 2));
        let e = gt_from_panoptic(&PanopticMap::new(seg, cls, []).unwrap());
        assert_eq!(e.pixels(), vec![(0, 2), (1, 2), (2, 2)]);
    }

    #[test]
    fn excluded_class_pair_is_suppressed() {
        let (road, sidewalk) = (0, 1);
        let (seg, cls) = halves(3, 6, (1, road), (2, sidewalk));
        let e = gt_from_panoptic(&PanopticMap::new(seg, cls, [(sidewalk, road)]).unwrap());
        assert!(e.is_empty());
    }

    #[test]
    fn inconsistent_class_within_segment_is_rejected() {
        let seg = Grid::filled(1, 2, 5);
        let cls = Grid::from_vec(1, 2, vec![1, 2]).unwrap();
        assert!(PanopticMap::new(seg, cls, []).is_err());
    }
}
