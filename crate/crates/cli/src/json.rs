//! JSON wire formats shared by the library surface and the CLI.
//!
//! Real matrices travel as `{"n": int, "rows": [[...]]}`, symplectic
//! elements as named blocks, complex matrices as `{"re": rows, "im": rows}`.

use serde::{Deserialize, Serialize};

use siegel_theta::cmat::CMat;
use siegel_theta::imat::IMat;
use siegel_theta::jacobi::{GammaTildeElem, IntSpMatrix};
use siegel_theta::mat::{RMat, SymMat};
use siegel_theta::symplectic::{IwasawaCoords, SpMatrix};
use siegel_theta::theta::{BoxSpec, ThetaQuery};
use siegel_theta::weil::GaussianPacket;
use siegel_theta::Complex64;

#[derive(Debug, Serialize, Deserialize)]
pub struct MatJson {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl MatJson {
    pub fn from_rmat(m: &RMat) -> Self {
        MatJson {
            n: m.rows(),
            rows: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
                .collect(),
        }
    }

    pub fn to_rmat(&self) -> Result<RMat, String> {
        let r = self.rows.len();
        if r != self.n || self.rows.iter().any(|row| row.len() != self.n) {
            return Err("matrix rows do not match declared n".into());
        }
        Ok(RMat::from_rows(&self.rows))
    }
}

fn rows_of(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

fn rmat_of(rows: &[Vec<f64>]) -> Result<RMat, String> {
    if rows.is_empty() {
        return Err("empty matrix".into());
    }
    let c = rows[0].len();
    if rows.iter().any(|r| r.len() != c) {
        return Err("ragged matrix rows".into());
    }
    Ok(RMat::from_rows(rows))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpJson {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
}

impl SpJson {
    pub fn from_sp(g: &SpMatrix) -> Self {
        SpJson {
            n: g.n(),
            a: rows_of(g.a()),
            b: rows_of(g.b()),
            c: rows_of(g.c()),
            d: rows_of(g.d()),
        }
    }

    pub fn to_sp(&self) -> Result<SpMatrix, String> {
        let a = rmat_of(&self.a)?;
        let b = rmat_of(&self.b)?;
        let c = rmat_of(&self.c)?;
        let d = rmat_of(&self.d)?;
        if a.rows() != self.n {
            return Err("blocks do not match declared n".into());
        }
        SpMatrix::from_blocks(a, b, c, d).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct IntSpJson {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<i64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<i64>>,
}

impl IntSpJson {
    pub fn from_int(g: &IntSpMatrix) -> Self {
        let conv = |m: &IMat| -> Vec<Vec<i64>> {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
                .collect()
        };
        IntSpJson {
            n: g.n(),
            a: conv(g.a()),
            b: conv(g.b()),
            c: conv(g.c()),
            d: conv(g.d()),
        }
    }

    pub fn to_int(&self) -> Result<IntSpMatrix, String> {
        let conv = |rows: &Vec<Vec<i64>>| -> Result<IMat, String> {
            if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
                return Err("integer blocks do not match declared n".into());
            }
            Ok(IMat::from_rows(rows))
        };
        IntSpMatrix::from_blocks(
            conv(&self.a)?,
            conv(&self.b)?,
            conv(&self.c)?,
            conv(&self.d)?,
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexMatJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatJson {
    pub fn from_cmat(m: &CMat) -> Self {
        ComplexMatJson { re: rows_of(&m.re()), im: rows_of(&m.im()) }
    }

    pub fn to_cmat(&self) -> Result<CMat, String> {
        let re = rmat_of(&self.re)?;
        let im = rmat_of(&self.im)?;
        if (re.rows(), re.cols()) != (im.rows(), im.cols()) {
            return Err("re/im shapes differ".into());
        }
        Ok(CMat::from_parts(&re, &im))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexVecJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PacketJson {
    pub n: usize,
    #[serde(rename = "W")]
    pub w: ComplexMatJson,
    #[serde(rename = "w")]
    pub wvec: ComplexVecJson,
    pub c: ComplexJson,
    pub phase_exact: bool,
}

impl PacketJson {
    pub fn from_packet(f: &GaussianPacket) -> Self {
        PacketJson {
            n: f.n(),
            w: ComplexMatJson::from_cmat(f.w()),
            wvec: ComplexVecJson {
                re: f.wvec().iter().map(|z| z.re).collect(),
                im: f.wvec().iter().map(|z| z.im).collect(),
            },
            c: ComplexJson { re: f.c().re, im: f.c().im },
            phase_exact: f.phase_exact(),
        }
    }

    pub fn to_packet(&self) -> Result<GaussianPacket, String> {
        let w = self.w.to_cmat()?;
        if self.wvec.re.len() != self.n || self.wvec.im.len() != self.n {
            return Err("linear term length mismatch".into());
        }
        let wvec: Vec<Complex64> = self
            .wvec
            .re
            .iter()
            .zip(&self.wvec.im)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        GaussianPacket::new(w, wvec, Complex64::new(self.c.re, self.c.im))
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GammaTildeJson {
    pub m: Vec<i64>,
    pub n: Vec<i64>,
    pub t: f64,
    pub gamma: IntSpJson,
}

impl GammaTildeJson {
    pub fn from_elem(e: &GammaTildeElem) -> Self {
        GammaTildeJson {
            m: e.m.clone(),
            n: e.n_vec.clone(),
            t: e.t,
            gamma: IntSpJson::from_int(&e.gamma),
        }
    }

    pub fn to_elem(&self) -> Result<GammaTildeElem, String> {
        GammaTildeElem::new(self.m.clone(), self.n.clone(), self.t, self.gamma.to_int()?)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QueryJson {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "X")]
    pub x_mat: Vec<Vec<f64>>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl QueryJson {
    pub fn to_query(&self) -> Result<ThetaQuery, String> {
        let xm = rmat_of(&self.x_mat)?;
        ThetaQuery::new(
            self.m,
            SymMat::symmetrized(&xm),
            self.x.clone(),
            self.y.clone(),
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ThetaRequest {
    pub query: QueryJson,
    #[serde(default, rename = "box")]
    pub box_edges: Option<Vec<f64>>,
    #[serde(default)]
    pub packet: Option<PacketJson>,
    pub mode: String,
}

impl ThetaRequest {
    pub fn box_spec(&self) -> Option<BoxSpec> {
        self.box_edges.as_ref().map(|b| BoxSpec { b: b.clone() })
    }
}

#[derive(Debug, Serialize)]
pub struct ThetaResponse {
    pub value_re: f64,
    pub value_im: f64,
    pub modulus: f64,
    pub terms_used: usize,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct ReduceResponse {
    pub gamma0: IntSpJson,
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<f64>>,
    #[serde(rename = "detV")]
    pub det_v: f64,
    pub iterations: usize,
}

#[derive(Debug, Serialize)]
pub struct IwasawaResponse {
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub q: ComplexMatJson,
    #[serde(rename = "detV")]
    pub det_v: f64,
}

pub fn iwasawa_response(c: &IwasawaCoords) -> IwasawaResponse {
    IwasawaResponse {
        x: rows_of(c.x.mat()),
        y: rows_of(c.y.mat()),
        q: ComplexMatJson::from_cmat(&c.q),
        det_v: c.det_v(),
    }
}
