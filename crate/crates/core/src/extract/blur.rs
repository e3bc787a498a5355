use crate::grid::Grid;

/// Normalized 1D Gaussian taps, radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return vec![1.0];
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

fn convolve_rows(src: &Grid<f64>, k: &[f64]) -> Grid<f64> {
    let radius = (k.len() / 2) as isize;
    let (h, w) = src.dims();
    Grid::from_fn(h, w, |r, c| {
        let mut acc = 0.0;
        for (j, &kv) in k.iter().enumerate() {
            let cc = c as isize + j as isize - radius;
            if let Some(v) = src.get_signed(r as isize, cc) {
                acc += kv * v;
            }
        }
        acc
    })
}

fn convolve_cols(src: &Grid<f64>, k: &[f64]) -> Grid<f64> {
    let radius = (k.len() / 2) as isize;
    let (h, w) = src.dims();
    Grid::from_fn(h, w, |r, c| {
        let mut acc = 0.0;
        for (j, &kv) in k.iter().enumerate() {
            let rr = r as isize + j as isize - radius;
            if let Some(v) = src.get_signed(rr, c as isize) {
                acc += kv * v;
            }
        }
        acc
    })
}

/// Separable Gaussian blur with zero padding outside the frame.
pub fn blur_zero_padded(src: &Grid<f64>, sigma: f64) -> Grid<f64> {
    if sigma <= 0.0 {
        return src.clone();
    }
    let k = gaussian_kernel(sigma);
    convolve_cols(&convolve_rows(src, &k), &k)
}

/// Normalized convolution: averages only over pixels where `mask` is set.
/// Masked-out pixels keep their input value.
pub fn blur_masked(src: &Grid<f64>, mask: &Grid<bool>, sigma: f64) -> Grid<f64> {
    if sigma <= 0.0 {
        return src.clone();
    }
    let k = gaussian_kernel(sigma);
    let weights = mask.map(|&m| if m { 1.0 } else { 0.0 });
    let weighted = Grid::from_fn(src.height(), src.width(), |r, c| {
        if *mask.get(r, c) {
            *src.get(r, c)
        } else {
            0.0
        }
    });
    let num = convolve_cols(&convolve_rows(&weighted, &k), &k);
    let den = convolve_cols(&convolve_rows(&weights, &k), &k);
    Grid::from_fn(src.height(), src.width(), |r, c| {
        if *mask.get(r, c) && *den.get(r, c) > 0.0 {
            num.get(r, c) / den.get(r, c)
        } else {
            *src.get(r, c)
        }
    })
}
