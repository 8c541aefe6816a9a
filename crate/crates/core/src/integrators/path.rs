use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::model::State;
use crate::scalar::{to64, Scalar};

/// A coordinate fell below the scalar's underflow floor and was clamped there
/// from `time` on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub coordinate: String,
    pub time: f64,
}

/// The boundary process starts at `times[start_index]` with `z = x` there.
#[derive(Debug, Clone, PartialEq)]
pub struct ZTrack<T> {
    pub start_index: usize,
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord<T> {
    pub times: Vec<T>,
    pub states: Vec<State<T>>,
    pub aux_psi: Option<Vec<T>>,
    pub aux_phi: Option<Vec<T>>,
    pub aux_z: Option<ZTrack<T>>,
    pub truncations: Vec<Truncation>,
    /// Number of step rejections resolved by halving.
    pub halvings: u64,
    pub seed: u64,
}

impl<T: Scalar> PathRecord<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<State<T>> {
        self.states.last().copied()
    }

    pub fn xs(&self) -> impl Iterator<Item = T> + '_ {
        self.states.iter().map(|s| s.x)
    }

    pub fn ys(&self) -> impl Iterator<Item = T> + '_ {
        self.states.iter().map(|s| s.y)
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec!["t", "x", "y"];
        if self.aux_psi.is_some() {
            cols.push("psi");
        }
        if self.aux_phi.is_some() {
            cols.push("phi");
        }
        if self.aux_z.is_some() {
            cols.push("z");
        }
        cols.join(",")
    }

    /// `t,x,y[,psi][,phi][,z]`, one row per grid point, 17 significant digits.
    /// Rows before the boundary process starts leave its field empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.csv_header())?;
        for (i, (t, s)) in self.times.iter().zip(&self.states).enumerate() {
            write!(w, "{:.16e},{:.16e},{:.16e}", to64(*t), to64(s.x), to64(s.y))?;
            if let Some(psi) = &self.aux_psi {
                write!(w, ",{:.16e}", to64(psi[i]))?;
            }
            if let Some(phi) = &self.aux_phi {
                write!(w, ",{:.16e}", to64(phi[i]))?;
            }
            if let Some(z) = &self.aux_z {
                if i >= z.start_index {
                    write!(w, ",{:.16e}", to64(z.values[i - z.start_index]))?;
                } else {
                    write!(w, ",")?;
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}
