//! Dense 3×3 complex solves for the three-port junction.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

use crate::error::{Result, ScatterError};

pub type Mat3 = [[Complex64; 3]; 3];

/// Product of the row norms, the Hadamard bound on `|det m|`.
pub fn hadamard_scale(m: &Mat3) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .product()
}

pub fn det3(m: &Mat3) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Solves `m x = rhs` for a 3×3 right-hand side by Gaussian elimination with
/// partial pivoting.
///
/// Returns the solution together with `|det m| / hadamard_scale(m)`, which is
/// in `(0, 1]` and shrinks towards zero as `m` approaches singularity. Ratios
/// below `singular_ratio` are reported as [`ScatterError::Singular`].
pub fn solve3(m: &Mat3, rhs: &Mat3, singular_ratio: f64) -> Result<(Mat3, f64)> {
    let scale = hadamard_scale(m);
    let mut a = *m;
    let mut b = *rhs;
    let mut det = Complex64::new(1.0, 0.0);

    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        if a[pivot][col].norm() == 0.0 {
            return Err(ScatterError::Singular { magnitude: 0.0, scale });
        }
        if pivot != col {
            a.swap(pivot, col);
            b.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            for c in col..3 {
                let upper = a[col][c];
                a[row][c] -= factor * upper;
            }
            for c in 0..3 {
                let upper = b[col][c];
                b[row][c] -= factor * upper;
            }
        }
    }

    let ratio = if scale > 0.0 { det.norm() / scale } else { 0.0 };
    if ratio < singular_ratio {
        return Err(ScatterError::Singular {
            magnitude: det.norm(),
            scale,
        });
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut x = [[zero; 3]; 3];
    for c in 0..3 {
        for row in (0..3).rev() {
            let mut acc = b[row][c];
            for k in row + 1..3 {
                acc -= a[row][k] * x[k][c];
            }
            x[row][c] = acc / a[row][row];
        }
    }
    Ok((x, ratio))
}
