#![allow(dead_code)]

use ecqkd::CovarianceMatrix;
use nalgebra::Matrix4;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn local(theta: f64, r: f64, mode: usize) -> Matrix4<f64> {
    let (s, c) = theta.sin_cos();
    let rot = nalgebra::Matrix2::new(c, s, -s, c);
    let sq = nalgebra::Matrix2::new(r.exp(), 0.0, 0.0, (-r).exp());
    let block = rot * sq;
    let mut m = Matrix4::identity();
    for i in 0..2 {
        for j in 0..2 {
            m[(2 * mode + i, 2 * mode + j)] = block[(i, j)];
        }
    }
    m
}

fn beam_splitter(tau: f64) -> Matrix4<f64> {
    let (s, c) = tau.sin_cos();
    let mut m = Matrix4::zeros();
    for i in 0..2 {
        m[(i, i)] = c;
        m[(i + 2, i + 2)] = c;
        m[(i, i + 2)] = s;
        m[(i + 2, i)] = -s;
    }
    m
}

fn two_mode_squeezer(r: f64) -> Matrix4<f64> {
    let (ch, sh) = (r.cosh(), r.sinh());
    let mut m = Matrix4::zeros();
    for i in 0..2 {
        let z = if i == 0 { 1.0 } else { -1.0 };
        m[(i, i)] = ch;
        m[(i + 2, i + 2)] = ch;
        m[(i, i + 2)] = z * sh;
        m[(i + 2, i)] = z * sh;
    }
    m
}

/// Random symplectic matrix built from local, passive and two-mode squeezing layers.
pub fn random_symplectic<R: Rng>(rng: &mut R) -> Matrix4<f64> {
    let mut s = Matrix4::identity();
    for _ in 0..2 {
        s = local(rng.gen_range(0.0..6.3), rng.gen_range(-1.0..1.0), 0) * s;
        s = local(rng.gen_range(0.0..6.3), rng.gen_range(-1.0..1.0), 1) * s;
        s = beam_splitter(rng.gen_range(0.0..6.3)) * s;
        s = two_mode_squeezer(rng.gen_range(-1.0..1.0)) * s;
    }
    s
}

/// `S diag(ν1, ν1, ν2, ν2) Sᵀ` with known symplectic eigenvalues `ν1 ≥ ν2 ≥ ¼`.
pub fn random_physical<R: Rng>(rng: &mut R) -> (CovarianceMatrix, f64, f64) {
    let a: f64 = 0.25 + rng.gen_range(0.0..3.0);
    let b: f64 = 0.25 + rng.gen_range(0.0..3.0);
    let (nu1, nu2) = if a >= b { (a, b) } else { (b, a) };
    let s = random_symplectic(rng);
    let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(nu1, nu1, nu2, nu2));
    let v = s * d * s.transpose();
    let v = 0.5 * (v + v.transpose());
    let mut e = [[0.0; 4]; 4];
    for (i, row) in e.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = v[(i, j)];
        }
    }
    (CovarianceMatrix::new(e).expect("symmetric"), nu1, nu2)
}

pub fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-12 {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}
