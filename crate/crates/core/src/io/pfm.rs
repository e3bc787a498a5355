//! Grayscale PFM (`Pf`). Header: magic line, `width height` line and a scale
//! line whose sign selects the byte order (negative = little-endian). Rows are
//! stored bottom-to-top.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::DepthMap;

/// Reads a grayscale PFM as raw `f32` values (top row first).
pub fn read_pfm_grid(bytes: &[u8]) -> Result<Grid<f32>> {
    let mut pos = 0;
    let magic = next_token(bytes, &mut pos)?;
    match magic.as_str() {
        "Pf" => {}
        "PF" => return Err(Error::Format("color PFM (PF) is not supported".into())),
        m => return Err(Error::Format(format!("bad PFM magic {m:?}"))),
    }
    let width: usize = parse(&next_token(bytes, &mut pos)?, "width")?;
    let height: usize = parse(&next_token(bytes, &mut pos)?, "height")?;
    let scale: f64 = parse(&next_token(bytes, &mut pos)?, "scale")?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::Format(format!("bad PFM scale {scale}")));
    }
    // exactly one whitespace byte separates the header from the payload
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Format("truncated PFM header".into()));
    }
    pos += 1;
    let little = scale < 0.0;
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::Format("PFM dimensions overflow".into()))?;
    let payload = &bytes[pos..];
    if payload.len() < need {
        return Err(Error::Format(format!(
            "truncated PFM payload: {} of {need} bytes",
            payload.len()
        )));
    }
    let mut data = vec![0f32; width * height];
    for (i, chunk) in payload[..need].chunks_exact(4).enumerate() {
        let b = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little {
            f32::from_le_bytes(b)
        } else {
            f32::from_be_bytes(b)
        };
        let file_row = i / width;
        let col = i % width;
        data[(height - 1 - file_row) * width + col] = v;
    }
    Grid::from_vec(height, width, data)
}

/// Reads a grayscale PFM depth map. Non-finite and non-positive values are
/// invalid pixels.
pub fn read_pfm(bytes: &[u8]) -> Result<DepthMap> {
    let g = read_pfm_grid(bytes)?;
    let (h, w) = g.dims();
    DepthMap::from_dense(h, w, g.as_slice().iter().map(|&v| v as f64).collect())
}

/// Writes a little-endian grayscale PFM.
pub fn write_pfm_grid(grid: &Grid<f32>) -> Vec<u8> {
    let (h, w) = grid.dims();
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(h * w * 4);
    for r in (0..h).rev() {
        for c in 0..w {
            out.extend_from_slice(&grid.get(r, c).to_le_bytes());
        }
    }
    out
}

/// Writes depth as PFM; invalid pixels are stored as `0.0`.
pub fn write_pfm_depth(depth: &DepthMap) -> Vec<u8> {
    let (h, w) = depth.dims();
    let g = Grid::from_fn(h, w, |r, c| depth.get(r, c).unwrap_or(0.0) as f32);
    write_pfm_grid(&g)
}

fn next_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Format("truncated PFM header".into()));
    }
    String::from_utf8(bytes[start..*pos].to_vec())
        .map_err(|_| Error::Format("non-ASCII PFM header".into()))
}

fn parse<T: std::str::FromStr>(tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::Format(format!("bad PFM {what} {tok:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big_endian(h: usize, w: usize, top_down: &[f32]) -> Vec<u8> {
        let mut out = format!("Pf\n{w} {h}\n1.0\n").into_bytes();
        for r in (0..h).rev() {
            for c in 0..w {
                out.extend_from_slice(&top_down[r * w + c].to_be_bytes());
            }
        }
        out
    }

    #[test]
    fn single_pixel_and_sentinel() {
        let d = read_pfm(&big_endian(1, 1, &[5.0])).unwrap();
        assert_eq!(d.get(0, 0), Some(5.0));
        let d = read_pfm(&big_endian(1, 1, &[-1.0])).unwrap();
        assert_eq!(d.get(0, 0), None);
    }

    #[test]
    fn endianness_twins_agree_and_rows_flip() {
        let vals = [1.5f32, 2.25, 3.0, 4.75];
        let be = read_pfm(&big_endian(2, 2, &vals)).unwrap();
        let grid = Grid::from_vec(2, 2, vals.to_vec()).unwrap();
        let le = read_pfm(&write_pfm_grid(&grid)).unwrap();
        assert_eq!(be, le);
        assert_eq!(be.get(0, 0), Some(1.5));
        assert_eq!(be.get(1, 1), Some(4.75));
    }

    #[test]
    fn rejects_color_and_truncated() {
        let mut color = b"PF\n1 1\n-1.0\n".to_vec();
        color.extend_from_slice(&[0u8; 12]);
        assert!(read_pfm(&color).unwrap_err().to_string().contains("color"));
        let mut short = b"Pf\n2 2\n-1.0\n".to_vec();
        short.extend_from_slice(&[0u8; 10]);
        assert!(read_pfm(&short).unwrap_err().to_string().contains("truncated"));
    }

    #[test]
    fn grid_round_trip_is_value_exact() {
        let g = Grid::from_vec(2, 3, vec![-1.0f32, 0.0, 3.5, f32::MAX, 1e-30, 7.0]).unwrap();
        assert_eq!(read_pfm_grid(&write_pfm_grid(&g)).unwrap(), g);
    }
}
