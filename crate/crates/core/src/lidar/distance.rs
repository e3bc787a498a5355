use crate::grid::Grid;
use crate::model::EdgeMap;

/// Exact 1D squared-distance transform of a sampled function (lower
/// envelope of parabolas). Infinite entries are not sites.
fn transform_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let sites: Vec<usize> = (0..n).filter(|&i| f[i].is_finite()).collect();
    if sites.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    let mut v: Vec<usize> = Vec::with_capacity(sites.len());
    let mut z: Vec<f64> = Vec::with_capacity(sites.len() + 1);
    let intersect = |p: usize, q: usize| -> f64 {
        let (pf, qf) = (p as f64, q as f64);
        ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf))
    };
    for &q in &sites {
        while let Some(&p) = v.last() {
            let s = intersect(p, q);
            if v.len() > 1 && s <= z[z.len() - 1] {
                v.pop();
                z.pop();
            } else {
                v.push(q);
                z.push(s);
                break;
            }
        }
        if v.is_empty() {
            v.push(q);
        }
    }
    // z[k] is the left boundary of parabola v[k + 1]
    let mut k = 0;
    for (i, o) in out.iter_mut().enumerate() {
        while k < z.len() && z[k] < i as f64 {
            k += 1;
        }
        let p = v[k];
        let d = i as f64 - p as f64;
        *o = d * d + f[p];
    }
}

/// Exact Euclidean distance (pixels) from every pixel to the nearest edge
/// pixel; `+inf` everywhere when there are no edges.
pub fn edge_distance_field(edges: &EdgeMap) -> Grid<f64> {
    let (h, w) = edges.dims();
    let mut sq = edges.mask().map(|&e| if e { 0.0 } else { f64::INFINITY });
    let mut col_in = vec![0.0; h];
    let mut col_out = vec![0.0; h];
    for c in 0..w {
        for (r, v) in col_in.iter_mut().enumerate() {
            *v = *sq.get(r, c);
        }
        transform_1d(&col_in, &mut col_out);
        for (r, &v) in col_out.iter().enumerate() {
            *sq.get_mut(r, c) = v;
        }
    }
    let mut row_out = vec![0.0; w];
    for r in 0..h {
        let row = &sq.as_slice()[r * w..(r + 1) * w].to_vec();
        transform_1d(row, &mut row_out);
        sq.as_mut_slice()[r * w..(r + 1) * w].copy_from_slice(&row_out);
    }
    sq.map(|d| d.sqrt())
}
