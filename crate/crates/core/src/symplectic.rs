//! Elements of `Sp(n, R)`, their Iwasawa coordinates `(X, Y, Q)`, the
//! embedding `k(Q)` of the unitary group as the maximal compact subgroup,
//! and Langlands coordinates for the maximal parabolic subgroups.
//!
//! Conventions: an element acts through its block form
//! `g = [[A, B], [C, D]]` with `g J0 g^T = J0`; the Iwasawa factorization is
//!
//! ```text
//! g = [[I, X], [0, I]] * [[Y^{1/2}, 0], [0, Y^{-T/2}]] * k(Q)
//! ```
//!
//! with `Y^{1/2}` the upper-triangular square root. The coordinate formulas
//! are `Y = (C C^T + D D^T)^{-1}`, `X = (A C^T + B D^T) Y`, and
//! `Q = (Y^{1/2})^T (D + iC)`; the last expression is the triangular factor
//! choice under which assembly and extraction are exact mutual inverses.

use alloc::vec::Vec;



use crate::cmat::CMat;
use crate::error::Error;
use crate::fx;
use crate::mat::{inv_sqrt_upper, sqrt_upper, PosDefMat, RMat, SymMat};

/// A `2n x 2n` real symplectic matrix stored as four named `n x n` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SpMatrix {
    n: usize,
    a: RMat,
    b: RMat,
    c: RMat,
    d: RMat,
}

impl SpMatrix {
    /// Build from blocks, verifying the symplectic identity. The tolerance
    /// scales with the squared entry magnitude so that exactly-constructed
    /// large elements (deep cusp scalings) are not rejected by float noise.
    pub fn from_blocks(a: RMat, b: RMat, c: RMat, d: RMat) -> Result<Self, Error> {
        let n = a.rows();
        for m in [&a, &b, &c, &d] {
            if m.rows() != n || m.cols() != n || !m.is_finite() {
                return Err(Error::DimensionMismatch);
            }
        }
        let g = SpMatrix { n, a, b, c, d };
        let scale = g.max_abs().max(1.0);
        if g.symplectic_defect() > 1e-9 * scale * scale {
            return Err(Error::NotSymplectic);
        }
        Ok(g)
    }

    pub fn identity(n: usize) -> Self {
        SpMatrix {
            n,
            a: RMat::identity(n),
            b: RMat::zeros(n, n),
            c: RMat::zeros(n, n),
            d: RMat::identity(n),
        }
    }

    /// The standard symplectic form `J0 = [[0, -I], [I, 0]]`.
    pub fn j0(n: usize) -> Self {
        SpMatrix {
            n,
            a: RMat::zeros(n, n),
            b: RMat::identity(n).neg(),
            c: RMat::identity(n),
            d: RMat::zeros(n, n),
        }
    }

    /// Upper unipotent `[[I, P], [0, I]]` for symmetric `P`.
    pub fn translation(p: &SymMat) -> Self {
        let n = p.n();
        SpMatrix {
            n,
            a: RMat::identity(n),
            b: p.mat().clone(),
            c: RMat::zeros(n, n),
            d: RMat::identity(n),
        }
    }

    /// Block diagonal `[[A, 0], [0, A^{-T}]]`.
    pub fn gl_embed(a: &RMat) -> Result<Self, Error> {
        let n = a.rows();
        let d = a.inverse()?.transpose();
        Ok(SpMatrix { n, a: a.clone(), b: RMat::zeros(n, n), c: RMat::zeros(n, n), d })
    }

    /// The diagonal flow `diag(e^{-s} I, e^{s} I)`.
    pub fn diag_flow(n: usize, s: f64) -> Self {
        let lo = fx::exp(-s);
        let hi = fx::exp(s);
        SpMatrix {
            n,
            a: RMat::identity(n).scale(lo),
            b: RMat::zeros(n, n),
            c: RMat::zeros(n, n),
            d: RMat::identity(n).scale(hi),
        }
    }

    #[inline(always)]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &RMat {
        &self.a
    }

    pub fn b(&self) -> &RMat {
        &self.b
    }

    pub fn c(&self) -> &RMat {
        &self.c
    }

    pub fn d(&self) -> &RMat {
        &self.d
    }

    pub fn to_full(&self) -> RMat {
        let n = self.n;
        let mut m = RMat::zeros(2 * n, 2 * n);
        m.set_block(0, 0, &self.a);
        m.set_block(0, n, &self.b);
        m.set_block(n, 0, &self.c);
        m.set_block(n, n, &self.d);
        m
    }

    pub fn from_full(m: &RMat) -> Result<Self, Error> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch);
        }
        if m.rows() % 2 != 0 {
            return Err(Error::OddDimension);
        }
        let n = m.rows() / 2;
        SpMatrix::from_blocks(
            m.block(0, n, 0, n),
            m.block(0, n, n, 2 * n),
            m.block(n, 2 * n, 0, n),
            m.block(n, 2 * n, n, 2 * n),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.a
            .max_abs()
            .max(self.b.max_abs())
            .max(self.c.max_abs())
            .max(self.d.max_abs())
    }

    /// Max-entry residual of `g J0 g^T - J0`.
    pub fn symplectic_defect(&self) -> f64 {
        // g J0 g^T = [[B A^T - A B^T, B C^T - A D^T], [D A^T - C B^T, D C^T - C D^T]]
        let n = self.n;
        let ab = self.b.mul(&self.a.transpose()).sub(&self.a.mul(&self.b.transpose()));
        let cd = self.d.mul(&self.c.transpose()).sub(&self.c.mul(&self.d.transpose()));
        let off = self.b.mul(&self.c.transpose()).sub(&self.a.mul(&self.d.transpose()));
        let mut worst = ab.max_abs().max(cd.max_abs());
        let target = RMat::identity(n).neg();
        worst = worst.max(off.max_abs_diff(&target));
        worst
    }

    pub fn mul(&self, other: &SpMatrix) -> SpMatrix {
        assert_eq!(self.n, other.n);
        let a = self.a.mul(&other.a).add(&self.b.mul(&other.c));
        let b = self.a.mul(&other.b).add(&self.b.mul(&other.d));
        let c = self.c.mul(&other.a).add(&self.d.mul(&other.c));
        let d = self.c.mul(&other.b).add(&self.d.mul(&other.d));
        SpMatrix { n: self.n, a, b, c, d }
    }

    /// Exact block-formula inverse `[[D^T, -B^T], [-C^T, A^T]]`.
    pub fn inverse(&self) -> SpMatrix {
        SpMatrix {
            n: self.n,
            a: self.d.transpose(),
            b: self.b.transpose().neg(),
            c: self.c.transpose().neg(),
            d: self.a.transpose(),
        }
    }
}

/// Test whether a square matrix is symplectic to the given max-entry
/// tolerance. Odd dimension is an error.
pub fn is_symplectic(m: &RMat, tol: f64) -> Result<bool, Error> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch);
    }
    if m.rows() % 2 != 0 {
        return Err(Error::OddDimension);
    }
    let n = m.rows() / 2;
    let g = SpMatrix {
        n,
        a: m.block(0, n, 0, n),
        b: m.block(0, n, n, 2 * n),
        c: m.block(n, 2 * n, 0, n),
        d: m.block(n, 2 * n, n, 2 * n),
    };
    Ok(g.symplectic_defect() <= tol)
}

/// Iwasawa coordinates of a symplectic matrix.
#[derive(Debug, Clone)]
pub struct IwasawaCoords {
    pub x: SymMat,
    pub y: PosDefMat,
    pub q: CMat,
}

impl IwasawaCoords {
    pub fn n(&self) -> usize {
        self.x.n()
    }

    /// `det V` of the cached `U V U^T` factorization (equals `det Y`).
    pub fn det_v(&self) -> f64 {
        self.y.det()
    }

    pub fn v(&self) -> &[f64] {
        self.y.uv().v()
    }
}

/// Extract Iwasawa coordinates.
///
/// Everything is read off the lower Cholesky factor of
/// `W = C C^T + D D^T`: the square root of `Y` is `L^{-T}` and
/// `Q = L^{-1} (D + iC)` comes from one triangular solve, so the compact
/// part stays unitary to roughly the square root of the conditioning
/// instead of the conditioning itself.
pub fn iwasawa(g: &SpMatrix) -> Result<IwasawaCoords, Error> {
    let w_raw = g
        .c()
        .mul(&g.c().transpose())
        .add(&g.d().mul(&g.d().transpose()));
    let w_sym = SymMat::symmetrized(&w_raw);
    let l = crate::mat::chol_lower(&w_sym)
        .map_err(|_| Error::NumericalBreakdown("C C^T + D D^T not positive definite"))?;
    let r = crate::mat::inverse_lower_triangular(&l)?.transpose();
    let y = PosDefMat::new(SymMat::symmetrized(&r.mul(&r.transpose())))
        .map_err(|_| Error::NumericalBreakdown("extracted Y not positive definite"))?;
    let acbd = g
        .a()
        .mul(&g.c().transpose())
        .add(&g.b().mul(&g.d().transpose()));
    let x = SymMat::symmetrized(&acbd.mul(y.mat()));
    let q = crate::cmat::solve_lower_real(&l, &CMat::from_parts(g.d(), g.c()))?;
    // Sanity gate only: elements that have drifted off the group by float
    // accumulation (reduction words at extreme scales) still carry usable
    // coordinates; genuine garbage does not. The polish step projects the
    // drift away so downstream unitarity gates see a clean factor.
    if !q.is_unitary(1e-5) {
        return Err(Error::NumericalBreakdown("extracted Q not unitary"));
    }
    Ok(IwasawaCoords { x, y, q: q.unitarize() })
}

/// The embedding `k(Q) = [[Re Q, -Im Q], [Im Q, Re Q]]` of `U(n)` into
/// `Sp(n, R)`; the image is symplectic and orthogonal.
pub fn embed_unitary(q: &CMat) -> Result<SpMatrix, Error> {
    if q.rows() != q.cols() {
        return Err(Error::DimensionMismatch);
    }
    if !q.is_unitary(1e-9) {
        return Err(Error::NotUnitary);
    }
    let re = q.re();
    let im = q.im();
    SpMatrix::from_blocks(re.clone(), im.neg(), im, re)
}

/// Reassemble a symplectic matrix from Iwasawa coordinates.
pub fn assemble(c: &IwasawaCoords) -> SpMatrix {
    let n = c.n();
    let r = sqrt_upper(&c.y);
    let rinv_t = inv_sqrt_upper(&c.y).transpose();
    // [[R, X R^{-T}], [0, R^{-T}]]
    let na = SpMatrix {
        n,
        a: r,
        b: c.x.mat().mul(&rinv_t),
        c: RMat::zeros(n, n),
        d: rinv_t,
    };
    let k = embed_unitary(&c.q).expect("stored Q is unitary");
    na.mul(&k)
}

/// Langlands coordinates of `g` for the maximal parabolic `P_l`.
///
/// The blocks are read off the upper-triangular square root of `Y` and off
/// `X`; reassembly multiplies the four nilpotent/diagonal factors back and
/// applies `k(Q)`.
#[derive(Debug, Clone)]
pub struct LanglandsCoords {
    pub l: usize,
    pub r_l: RMat,
    pub s_l: RMat,
    pub t_l: SymMat,
    pub u_l: RMat,
    pub v_l: Vec<f64>,
    pub x_l: SymMat,
    pub y_l: PosDefMat,
    pub q: CMat,
}

pub fn langlands_coords(g: &SpMatrix, l: usize) -> Result<LanglandsCoords, Error> {
    let n = g.n();
    if l == 0 || l > n {
        return Err(Error::DimensionMismatch);
    }
    let coords = iwasawa(g)?;
    let r = sqrt_upper(&coords.y);
    let k = n - l;
    let r11 = r.block(0, l, 0, l);
    let r12 = r.block(0, l, l, n);
    let r22 = r.block(l, n, l, n);
    let mut v_l = Vec::with_capacity(l);
    let mut u_l = RMat::identity(l);
    for j in 0..l {
        let d = r11.get(j, j);
        v_l.push(d * d);
        for i in 0..j {
            u_l.set(i, j, r11.get(i, j) / d);
        }
    }
    let y_l = if k == 0 {
        PosDefMat::identity(0)
    } else {
        PosDefMat::new(SymMat::symmetrized(&r22.mul(&r22.transpose())))
            .map_err(|_| Error::NumericalBreakdown("trailing block not positive definite"))?
    };
    let r_l = if k == 0 {
        RMat::zeros(l, 0)
    } else {
        r12.mul(&r22.inverse_upper_triangular()?)
    };
    let x11 = coords.x.mat().block(0, l, 0, l);
    let x12 = coords.x.mat().block(0, l, l, n);
    let x22 = coords.x.mat().block(l, n, l, n);
    let x_l = SymMat::symmetrized(&x22);
    let s_l = x12.sub(&r_l.mul(&x22));
    let t_l = SymMat::symmetrized(&x11.sub(&r_l.mul(&x22).mul(&r_l.transpose())));
    Ok(LanglandsCoords {
        l,
        r_l,
        s_l,
        t_l,
        u_l,
        v_l,
        x_l,
        y_l,
        q: coords.q,
    })
}

impl LanglandsCoords {
    /// First factor `[[I, Xt], [0, I]]` with `Xt = [[T_l, S_l], [S_l^T, 0]]`.
    pub fn nilpotent_factor(&self, n: usize) -> SpMatrix {
        let l = self.l;
        let k = n - l;
        let mut xt = RMat::zeros(n, n);
        xt.set_block(0, 0, self.t_l.mat());
        if k > 0 {
            xt.set_block(0, l, &self.s_l);
            xt.set_block(l, 0, &self.s_l.transpose());
        }
        SpMatrix::translation(&SymMat::symmetrized(&xt))
    }

    /// Second factor `[[Ut, 0], [0, Ut^{-T}]]` with `Ut = [[U_l, R_l], [0, I]]`.
    pub fn unipotent_factor(&self, n: usize) -> SpMatrix {
        let l = self.l;
        let k = n - l;
        let mut ut = RMat::identity(n);
        ut.set_block(0, 0, &self.u_l);
        if k > 0 {
            ut.set_block(0, l, &self.r_l);
        }
        SpMatrix::gl_embed(&ut).expect("unipotent is invertible")
    }

    /// The four-factor product together with `k(Q)`.
    pub fn assemble(&self, n: usize) -> SpMatrix {
        let l = self.l;
        let k = n - l;
        let f1 = self.nilpotent_factor(n);
        let f2 = self.unipotent_factor(n);
        // factor 3: [[I, Xh], [0, I]] with Xh = [[0, 0], [0, X_l]]
        let mut xh = RMat::zeros(n, n);
        if k > 0 {
            xh.set_block(l, l, self.x_l.mat());
        }
        let f3 = SpMatrix::translation(&SymMat::symmetrized(&xh));
        // factor 4: [[Ad, 0], [0, Ad^{-T}]] with Ad = diag(V_l^{1/2}, Y_l^{1/2})
        let mut ad = RMat::zeros(n, n);
        for j in 0..l {
            ad.set(j, j, fx::sqrt(self.v_l[j]));
        }
        if k > 0 {
            ad.set_block(l, l, &sqrt_upper(&self.y_l));
        }
        let f4 = SpMatrix::gl_embed(&ad).expect("diagonal blocks are invertible");
        let kq = embed_unitary(&self.q).expect("stored Q is unitary");
        f1.mul(&f2).mul(&f3).mul(&f4).mul(&kq)
    }
}

/// Factor `g = [[I, X], [0, I]] [[A, 0], [0, A^{-T}]] [[I, 0], [T, I]]` on
/// the chart where the `D` block is invertible: `X = B D^{-1}`,
/// `A = D^{-T}`, `T = D^{-1} C`.
pub fn xat_factor(g: &SpMatrix) -> Result<(SymMat, RMat, SymMat), Error> {
    let d = g.d();
    let det = d.det();
    if !(fx::abs(det) > 1e-10) {
        return Err(Error::ChartSingular);
    }
    let d_inv = d.inverse()?;
    let x = SymMat::symmetrized(&g.b().mul(&d_inv));
    let a = d_inv.transpose();
    let t = SymMat::symmetrized(&d_inv.mul(g.c()));
    Ok((x, a, t))
}

/// Build Iwasawa coordinates from raw parts, validating them.
pub fn coords_from_parts(x: SymMat, y: PosDefMat, q: CMat) -> Result<IwasawaCoords, Error> {
    if x.n() != y.n() || q.rows() != x.n() || q.cols() != x.n() {
        return Err(Error::DimensionMismatch);
    }
    if !q.is_unitary(1e-9) {
        return Err(Error::NotUnitary);
    }
    Ok(IwasawaCoords { x, y, q })
}

/// Build the coordinates of `[[I, X], [0, I]] diag(Y^{1/2}, Y^{-T/2})`
/// from `(X, Y)` with `Q = I`.
pub fn coords_from_xy(x: SymMat, y: PosDefMat) -> IwasawaCoords {
    let n = x.n();
    IwasawaCoords { x, y, q: CMat::identity(n) }
}

/// Consistency helper: `det V` from the cached factorization against
/// `det Y` computed directly.
pub fn det_v_consistency(c: &IwasawaCoords) -> f64 {
    let dv = c.det_v();
    let dy = c.y.mat().det();
    fx::abs(dv - dy) / fx::abs(dy).max(f64::MIN_POSITIVE)
}
