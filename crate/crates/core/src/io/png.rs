use std::io::Cursor;

use ::png::{BitDepth, ColorType, Compression, Decoder, Encoder, Filter, Transformations};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{DepthMap, EdgeMap, EdgeProbMap};

const DEPTH_SCALE: f64 = 256.0;
const PROB_SCALE: f64 = 65535.0;

struct Decoded {
    height: usize,
    width: usize,
    channels: usize,
    bit_depth: BitDepth,
    data: Vec<u8>,
}

fn decode(bytes: &[u8]) -> Result<Decoded> {
    let mut decoder = Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Format(format!("malformed PNG: {e}")))?;
    let (color, bit_depth) = reader.output_color_type();
    let channels = match color {
        ColorType::Grayscale => 1,
        ColorType::GrayscaleAlpha => 2,
        ColorType::Rgb => 3,
        ColorType::Rgba => 4,
        ColorType::Indexed => {
            return Err(Error::Format("indexed-color PNG is not supported".into()))
        }
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Format("PNG dimensions overflow".into()))?;
    let mut data = vec![0u8; size];
    let info = reader
        .next_frame(&mut data)
        .map_err(|e| Error::Format(format!("malformed PNG: {e}")))?;
    data.truncate(info.buffer_size());
    Ok(Decoded {
        height: info.height as usize,
        width: info.width as usize,
        channels,
        bit_depth,
        data,
    })
}

fn encode(height: usize, width: usize, color: ColorType, depth: BitDepth, data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(color);
        enc.set_depth(depth);
        // Fixed encoder settings so identical inputs give identical bytes.
        enc.set_compression(Compression::Balanced);
        enc.set_filter(Filter::Paeth);
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::Format(format!("PNG encode: {e}")))?;
        writer
            .write_image_data(data)
            .map_err(|e| Error::Format(format!("PNG encode: {e}")))?;
        writer
            .finish()
            .map_err(|e| Error::Format(format!("PNG encode: {e}")))?;
    }
    Ok(out)
}

fn expect_gray16(d: &Decoded, what: &str) -> Result<Vec<u16>> {
    if d.channels != 1 {
        return Err(Error::Format(format!(
            "{what}: expected single-channel PNG, got {} channels",
            d.channels
        )));
    }
    if d.bit_depth != BitDepth::Sixteen {
        return Err(Error::Format(format!(
            "{what}: expected 16-bit PNG, got {}-bit",
            d.bit_depth as u8
        )));
    }
    Ok(d.data
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]))
        .collect())
}

/// Decodes a KITTI-convention depth PNG: `depth = raw / 256`, `raw == 0`
/// marks an invalid pixel.
pub fn read_depth_png16(bytes: &[u8]) -> Result<DepthMap> {
    let d = decode(bytes)?;
    let raw = expect_gray16(&d, "depth PNG")?;
    let values = raw.iter().map(|&v| v as f64 / DEPTH_SCALE).collect();
    DepthMap::from_dense(d.height, d.width, values)
}

/// Encodes depth as `round(depth * 256)` clamped to `1..=65535`; invalid
/// pixels become `0`.
pub fn write_depth_png16(depth: &DepthMap) -> Result<Vec<u8>> {
    let (h, w) = depth.dims();
    let mut data = Vec::with_capacity(h * w * 2);
    for r in 0..h {
        for c in 0..w {
            let raw = match depth.get(r, c) {
                Some(v) => (v * DEPTH_SCALE).round().clamp(1.0, 65535.0) as u16,
                None => 0,
            };
            data.extend_from_slice(&raw.to_be_bytes());
        }
    }
    encode(h, w, ColorType::Grayscale, BitDepth::Sixteen, &data)
}

/// Decodes an 8-bit edge PNG; any nonzero value is an edge pixel.
pub fn read_edges_png8(bytes: &[u8]) -> Result<EdgeMap> {
    let d = decode(bytes)?;
    if d.channels != 1 {
        return Err(Error::Format(format!(
            "edge PNG: expected single-channel PNG, got {} channels",
            d.channels
        )));
    }
    if d.bit_depth != BitDepth::Eight {
        return Err(Error::Format(format!(
            "edge PNG: expected 8-bit PNG, got {}-bit",
            d.bit_depth as u8
        )));
    }
    let mask = Grid::from_vec(d.height, d.width, d.data.iter().map(|&v| v != 0).collect())?;
    Ok(EdgeMap::from_mask(mask))
}

pub fn write_edges_png8(edges: &EdgeMap) -> Result<Vec<u8>> {
    let (h, w) = edges.dims();
    let data: Vec<u8> = edges
        .mask()
        .as_slice()
        .iter()
        .map(|&e| if e { 255 } else { 0 })
        .collect();
    encode(h, w, ColorType::Grayscale, BitDepth::Eight, &data)
}

pub fn read_prob_png16(bytes: &[u8]) -> Result<EdgeProbMap> {
    let d = decode(bytes)?;
    let raw = expect_gray16(&d, "probability PNG")?;
    let probs = raw.iter().map(|&v| v as f64 / PROB_SCALE).collect();
    EdgeProbMap::new(Grid::from_vec(d.height, d.width, probs)?)
}

pub fn write_prob_png16(probs: &EdgeProbMap) -> Result<Vec<u8>> {
    let (h, w) = probs.dims();
    let mut data = Vec::with_capacity(h * w * 2);
    for &p in probs.probs().as_slice() {
        let raw = (p * PROB_SCALE).round() as u16;
        data.extend_from_slice(&raw.to_be_bytes());
    }
    encode(h, w, ColorType::Grayscale, BitDepth::Sixteen, &data)
}

/// Decodes a 16-bit PNG with `channels` interleaved channels (1 = gray,
/// 2 = gray+alpha) into one grid per channel.
pub fn read_u16_channels(bytes: &[u8], channels: usize) -> Result<Vec<Grid<u16>>> {
    let d = decode(bytes)?;
    if d.channels != channels {
        return Err(Error::Format(format!(
            "expected {channels}-channel PNG, got {} channels",
            d.channels
        )));
    }
    if d.bit_depth != BitDepth::Sixteen {
        return Err(Error::Format(format!(
            "expected 16-bit PNG, got {}-bit",
            d.bit_depth as u8
        )));
    }
    let values: Vec<u16> = d
        .data
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]))
        .collect();
    (0..channels)
        .map(|ch| {
            Grid::from_vec(
                d.height,
                d.width,
                values.iter().skip(ch).step_by(channels).copied().collect(),
            )
        })
        .collect()
}

pub fn write_u16_channels(channels: &[Grid<u16>]) -> Result<Vec<u8>> {
    let color = match channels.len() {
        1 => ColorType::Grayscale,
        2 => ColorType::GrayscaleAlpha,
        3 => ColorType::Rgb,
        4 => ColorType::Rgba,
        n => return Err(Error::InvalidInput(format!("{n} channels"))),
    };
    let (h, w) = channels[0].dims();
    for ch in &channels[1..] {
        channels[0].same_shape(ch)?;
    }
    let mut data = Vec::with_capacity(h * w * 2 * channels.len());
    for i in 0..h * w {
        for ch in channels {
            data.extend_from_slice(&ch.as_slice()[i].to_be_bytes());
        }
    }
    encode(h, w, color, BitDepth::Sixteen, &data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw_png16(h: usize, w: usize, raw: &[u16]) -> Vec<u8> {
        let grid = Grid::from_vec(h, w, raw.to_vec()).unwrap();
        write_u16_channels(&[grid]).unwrap()
    }

    #[test]
    fn raw_2560_is_ten_meters() {
        let d = read_depth_png16(&raw_png16(1, 2, &[2560, 0])).unwrap();
        assert_eq!(d.get(0, 0), Some(10.0));
        assert_eq!(d.get(0, 1), None);
    }

    #[test]
    fn depth_png_round_trip_is_byte_identical() {
        let raw: Vec<u16> = (0..16u16).map(|i| if i % 5 == 0 { 0 } else { i * 977 + 13 }).collect();
        let bytes = raw_png16(4, 4, &raw);
        let again = write_depth_png16(&read_depth_png16(&bytes).unwrap()).unwrap();
        assert_eq!(bytes, again);
    }

    #[test]
    fn rejects_multichannel_and_8bit() {
        let g = Grid::filled(2, 2, 7u16);
        let two = write_u16_channels(&[g.clone(), g]).unwrap();
        let err = read_depth_png16(&two).unwrap_err().to_string();
        assert!(err.contains("single-channel"), "{err}");

        let eight = write_edges_png8(&EdgeMap::empty(2, 2)).unwrap();
        let err = read_depth_png16(&eight).unwrap_err().to_string();
        assert!(err.contains("16-bit"), "{err}");

        assert!(matches!(read_depth_png16(b"not a png"), Err(Error::Format(_))));
    }

    #[test]
    fn edges_round_trip() {
        let e = EdgeMap::from_pixels(3, 5, [(0, 0), (2, 4), (1, 2)]).unwrap();
        let back = read_edges_png8(&write_edges_png8(&e).unwrap()).unwrap();
        assert_eq!(e, back);
    }

    #[test]
    fn prob_round_trip_quantizes_to_u16() {
        let p = EdgeProbMap::new(Grid::from_vec(1, 3, vec![0.0, 1.0, 0.5]).unwrap()).unwrap();
        let back = read_prob_png16(&write_prob_png16(&p).unwrap()).unwrap();
        assert_eq!(back.get(0, 0), 0.0);
        assert_eq!(back.get(0, 1), 1.0);
        assert!((back.get(0, 2) - 0.5).abs() < 1.0 / 65535.0);
    }
}
