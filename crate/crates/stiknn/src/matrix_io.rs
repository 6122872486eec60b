//! Matrix CSV and PPM heatmap output.
//!
//! Matrix CSV has no header: `n` rows of `n` comma-separated values, each
//! written with 17 significant digits (`{:.16e}`), which is lossless for
//! `f64`.
//!
//! The heatmap is a binary PPM (`P6`) with one pixel per cell. With
//! `s = max |off-diagonal|` (or 1 if that is zero) and `m = clamp(v / s, -1, 1)`,
//! a cell is white blended towards blue for `m < 0` and towards red for
//! `m > 0`; each fading channel is `round(255 * (1 - |m|))`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use stiknn_core::{InteractionMatrix, MatrixMeta};

use crate::error::{Error, Result};

pub fn matrix_to_csv(matrix: &InteractionMatrix) -> String {
    let n = matrix.n();
    let mut out = String::with_capacity(n * n * 24);
    for i in 0..n {
        for (j, v) in matrix.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{v:.16e}"));
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(matrix: &InteractionMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, matrix_to_csv(matrix)).map_err(|e| Error::io(path, e))
}

/// Parses matrix CSV text. Provenance metadata is not stored in the file,
/// so the result carries default metadata.
pub fn parse_matrix_csv(text: &str, source: &Path) -> Result<InteractionMatrix> {
    let mut values = Vec::new();
    let mut n = None;
    let mut rows = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let before = values.len();
        for cell in line.split(',') {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| Error::format(source, line_no, format!("bad matrix value {cell:?}")))?;
            values.push(v);
        }
        let width = values.len() - before;
        match n {
            None => n = Some(width),
            Some(w) if w != width => {
                return Err(Error::format(source, line_no, format!("expected {w} values, found {width}")))
            }
            _ => {}
        }
        rows += 1;
    }
    let n = n.ok_or_else(|| Error::format(source, 1, "empty matrix file"))?;
    if rows != n {
        return Err(Error::format(source, rows as u64, format!("matrix is {rows}x{n}, not square")));
    }
    Ok(InteractionMatrix::from_values(n, values, MatrixMeta::default())?)
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<InteractionMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_csv(&text, path)
}

/// Largest absolute off-diagonal entry, or 1 when every such entry is zero.
pub fn heatmap_scale(matrix: &InteractionMatrix) -> f64 {
    let n = matrix.n();
    let mut s = 0.0f64;
    for i in 0..n {
        for (j, v) in matrix.row(i).iter().enumerate() {
            if i != j {
                s = s.max(v.abs());
            }
        }
    }
    if s == 0.0 {
        1.0
    } else {
        s
    }
}

pub fn heatmap_color(v: f64, scale: f64) -> [u8; 3] {
    let m = (v / scale).clamp(-1.0, 1.0);
    let fade = (255.0 * (1.0 - m.abs())).round() as u8;
    if m < 0.0 {
        [fade, fade, 255]
    } else if m > 0.0 {
        [255, fade, fade]
    } else {
        [255, 255, 255]
    }
}

pub fn heatmap_ppm(matrix: &InteractionMatrix) -> Vec<u8> {
    let n = matrix.n();
    let scale = heatmap_scale(matrix);
    let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
    out.reserve(n * n * 3);
    for v in matrix.values() {
        out.extend_from_slice(&heatmap_color(*v, scale));
    }
    out
}

pub fn write_heatmap(matrix: &InteractionMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&heatmap_ppm(matrix))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(n: usize, v: Vec<f64>) -> InteractionMatrix {
        InteractionMatrix::from_values(n, v, MatrixMeta::default()).unwrap()
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let m = mat(1, vec![1.0 / 3.0]);
        assert_eq!(matrix_to_csv(&m), "3.3333333333333331e-1\n");
    }

    #[test]
    fn parse_rejects_bad_shapes() {
        let p = Path::new("m.csv");
        assert!(parse_matrix_csv("", p).is_err());
        assert!(parse_matrix_csv("1,2\n3\n", p).is_err());
        assert!(parse_matrix_csv("1,2\n", p).is_err());
        assert!(parse_matrix_csv("1,x\n3,4\n", p).is_err());
    }

    #[test]
    fn heatmap_pixels() {
        // off-diagonal scale is 0.5; diagonal 2.0 clamps to full red
        let m = mat(2, vec![2.0, -0.5, -0.25, 0.0]);
        let ppm = heatmap_ppm(&m);
        let header = b"P6\n2 2\n255\n";
        assert_eq!(&ppm[..header.len()], header);
        let px = &ppm[header.len()..];
        assert_eq!(px, &[255, 0, 0, 0, 0, 255, 128, 128, 255, 255, 255, 255]);
        let zero = mat(2, vec![0.0; 4]);
        assert_eq!(heatmap_scale(&zero), 1.0);
    }
}
