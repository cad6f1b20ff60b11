//! Text formats for matrices, spectra and charge trajectories.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), complex cells
//! of dense matrices as `re±imj`, which `numpy.loadtxt(..., dtype=complex)`
//! reads directly.

use std::io::{self, Write};

use crate::classical::ChargeTriple;
use crate::spectra::SpectrumResult;
use crate::{CMatrix, C64};

pub fn real(x: f64) -> String { format!("{x:.16e}") }

pub fn complex(z: C64) -> String { format!("{:.16e}{:+.16e}j", z.re, z.im) }

/// One matrix row per line, comma separated.
pub fn write_dense_csv<W: Write + ?Sized>(out: &mut W, m: &CMatrix) -> io::Result<()> {
    for r in 0..m.nrows() {
        let line: Vec<String> = (0..m.ncols()).map(|c| complex(m[(r, c)])).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// `row,col,re,im` for every non-zero entry, row-major.
pub fn write_triplets<W: Write + ?Sized>(out: &mut W, m: &CMatrix) -> io::Result<()> {
    writeln!(out, "row,col,re,im")?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let v = m[(r, c)];
            if v != C64::new(0.0, 0.0) {
                writeln!(out, "{r},{c},{},{}", real(v.re), real(v.im))?;
            }
        }
    }
    Ok(())
}

pub const SPECTRUM_HEADER: &str = "sector_n,momentum_block,index,eigenvalue,residual";

/// Rows of the spectrum table; `momentum_block` is `all` for an unfiltered
/// sector.
pub fn write_spectrum_rows<W: Write + ?Sized>(out: &mut W, spec: &SpectrumResult) -> io::Result<()> {
    let n = spec.basis().particle_number();
    let block = spec.basis().momentum_filter().map_or("all".to_string(), |k| k.to_string());
    for (i, (e, r)) in spec.eigenvalues().iter().zip(spec.residuals()).enumerate() {
        writeln!(out, "{n},{block},{i},{},{}", real(*e), real(*r))?;
    }
    Ok(())
}

pub const TRAJECTORY_HEADER: &str = "t,re_n,im_n,re_p,im_p,re_h,im_h";

pub fn write_trajectory<W: Write + ?Sized>(out: &mut W, rows: &[ChargeTriple]) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for q in rows {
        let cells = [q.time, q.n[0], q.n[1], q.p[0], q.p[1], q.h[0], q.h[1]].map(real);
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
