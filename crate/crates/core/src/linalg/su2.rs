use num_traits::Float;

use crate::C64;

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

/// `exp(-i tau H)` for a Hermitian 2x2 `H`, in closed form.
pub fn expm2(h: &Mat2, tau: f64) -> Mat2 {
    let a0 = 0.5 * (h[0][0].re + h[1][1].re);
    let az = 0.5 * (h[0][0].re - h[1][1].re);
    let ax = h[0][1].re;
    let ay = -h[0][1].im;
    let r = (ax * ax + ay * ay + az * az).sqrt();
    let theta = tau * r;
    let cos = theta.cos();
    // sin(theta) / r, continuous at r = 0
    let sinc = if theta.abs() < 1e-8 { tau * (1.0 - theta * theta / 6.0) } else { theta.sin() / r };
    let phase = C64::from_polar(1.0, -tau * a0);
    let mi = C64::new(0.0, -sinc);
    let m00 = C64::from(cos) + mi * az;
    let m11 = C64::from(cos) - mi * az;
    let m01 = mi * C64::new(ax, -ay);
    let m10 = mi * C64::new(ax, ay);
    [[phase * m00, phase * m01], [phase * m10, phase * m11]]
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Largest singular value of a 2x2 complex matrix.
pub fn spectral_norm2(m: &Mat2) -> f64 {
    let frob: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm_sqr();
    let disc = (frob * frob - 4.0 * det).max(0.0).sqrt();
    (0.5 * (frob + disc)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pauli_x_rotation() {
        let h = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let t = 0.37;
        let u = expm2(&h, t);
        assert!((u[0][0] - c(t.cos(), 0.0)).norm() < 1e-15);
        assert!((u[0][1] - c(0.0, -t.sin())).norm() < 1e-15);
    }

    #[test]
    fn unitary_for_general_hermitian() {
        let h = [[c(0.3, 0.0), c(0.2, -0.7)], [c(0.2, 0.7), c(-1.1, 0.0)]];
        let u = expm2(&h, 2.3);
        let ud = [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]];
        let p = mul2(&ud, &u);
        assert!((p[0][0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(p[0][1].norm() < 1e-14);
        assert!((spectral_norm2(&u) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = [[c(0.0, 3.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-2.0, 0.0)]];
        assert!((spectral_norm2(&m) - 3.0).abs() < 1e-14);
    }
}
