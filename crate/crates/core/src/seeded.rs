//! Seeded random objects: Haar unitaries, Iwasawa coordinates, symplectic
//! matrices, integral generator words, Gaussian packets. Shared by the test
//! suites and the experiment harness; everything is a pure function of the
//! supplied RNG state.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cmat::CMat;
use crate::fx;
use crate::jacobi::{GammaTildeElem, HeisenbergElem, IntSpMatrix};
use crate::mat::{PosDefMat, RMat, SymMat};
use crate::rng::SeqRng;
use crate::symplectic::{assemble, IwasawaCoords, SpMatrix};
use crate::weil::GaussianPacket;

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn random_unitary(n: usize, rng: &mut SeqRng) -> CMat {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    for _ in 0..n {
        let mut col: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.normal(), rng.normal()))
            .collect();
        for prev in &cols {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..n {
                dot += prev[i].conj() * col[i];
            }
            for i in 0..n {
                col[i] -= dot * prev[i];
            }
        }
        let norm = fx::sqrt(col.iter().map(|z| z.norm_sqr()).sum::<f64>());
        for z in col.iter_mut() {
            *z /= norm;
        }
        cols.push(col);
    }
    CMat::from_fn(n, n, |i, j| cols[j][i])
}

/// Iwasawa coordinates with `X` in the unit box, bounded unipotent part,
/// `log v` uniform in `[-spread, spread]`, and Haar `Q`.
pub fn random_coords(n: usize, rng: &mut SeqRng, spread: f64) -> IwasawaCoords {
    let x = SymMat::symmetrized(&RMat::from_fn(n, n, |_, _| rng.uniform_in(-0.5, 0.5)));
    let mut u = RMat::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            u.set(i, j, rng.uniform_in(-0.6, 0.6));
        }
    }
    let v: Vec<f64> = (0..n)
        .map(|_| fx::exp(rng.uniform_in(-spread, spread)))
        .collect();
    let mut y = RMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += u.get(i, k) * v[k] * u.get(j, k);
            }
            y.set(i, j, s);
        }
    }
    let y = PosDefMat::new(SymMat::symmetrized(&y)).expect("constructed SPD");
    let q = random_unitary(n, rng);
    IwasawaCoords { x, y, q }
}

/// Random symplectic matrix via [`random_coords`] and assembly.
pub fn random_symplectic(n: usize, rng: &mut SeqRng, spread: f64) -> SpMatrix {
    assemble(&random_coords(n, rng, spread))
}

/// A random Heisenberg element with entries in `[-s, s]`.
pub fn random_heisenberg(n: usize, rng: &mut SeqRng, s: f64) -> HeisenbergElem {
    HeisenbergElem {
        x: (0..n).map(|_| rng.uniform_in(-s, s)).collect(),
        y: (0..n).map(|_| rng.uniform_in(-s, s)).collect(),
        t: rng.uniform_in(-s, s),
    }
}

/// Random word of length at most `max_len` in the integral generators.
pub fn random_integral_symplectic(n: usize, rng: &mut SeqRng, max_len: usize) -> IntSpMatrix {
    let gens = crate::jacobi::integral_generators(n);
    let len = rng.below(max_len as u64 + 1) as usize;
    let mut g = IntSpMatrix::identity(n);
    for _ in 0..len {
        let pick = rng.below(gens.len() as u64) as usize;
        match g.mul(&gens[pick]) {
            Ok(next) => g = next,
            Err(_) => break, // entry guard: keep the shorter word
        }
    }
    g
}

/// Random integral Jacobi element with small shifts.
pub fn random_gamma_tilde(n: usize, rng: &mut SeqRng, max_len: usize) -> GammaTildeElem {
    let gamma = random_integral_symplectic(n, rng, max_len);
    let m: Vec<i64> = (0..n).map(|_| rng.below(5) as i64 - 2).collect();
    let n_vec: Vec<i64> = (0..n).map(|_| rng.below(5) as i64 - 2).collect();
    let t = rng.uniform_in(-1.0, 1.0);
    GammaTildeElem::new(m, n_vec, t, gamma).expect("matching dimension")
}

/// Random Gaussian packet: `W` with moderate symmetric real part and
/// imaginary part `G^T G + d I`, linear term and amplitude bounded.
pub fn random_packet(n: usize, rng: &mut SeqRng) -> GaussianPacket {
    let re = SymMat::symmetrized(&RMat::from_fn(n, n, |_, _| rng.uniform_in(-0.8, 0.8)));
    let g = RMat::from_fn(n, n, |_, _| rng.uniform_in(-0.6, 0.6));
    let mut im_raw = g.transpose().mul(&g);
    for i in 0..n {
        let v = im_raw.get(i, i) + rng.uniform_in(0.3, 1.2);
        im_raw.set(i, i, v);
    }
    let im = SymMat::symmetrized(&im_raw);
    let w = CMat::from_parts(re.mat(), im.mat());
    let wvec: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.uniform_in(-0.7, 0.7), rng.uniform_in(-0.4, 0.4)))
        .collect();
    let c = Complex64::new(rng.uniform_in(0.3, 1.5), rng.uniform_in(-0.5, 0.5));
    GaussianPacket::new(w, wvec, c).expect("constructed packet is valid")
}
