//! Reference ladder designs for the three- and eight-element FR3 prototypes.

use crate::ladder::{LadderDesign, Stage};
use crate::mbvd::MbvdParams;

fn res(fs_ghz: f64, k2: f64, c0_ff: f64, rs: f64, ls_nh: f64) -> MbvdParams {
    MbvdParams {
        fs: fs_ghz * 1e9,
        k2,
        q: 80.0,
        c0: c0_ff * 1e-15,
        rs,
        ls: ls_nh * 1e-9,
    }
}

pub fn three_element_series() -> MbvdParams {
    res(21.0, 0.17, 48.0, 3.0, 0.2)
}

pub fn three_element_shunt1() -> MbvdParams {
    res(17.9, 0.425, 168.0, 1.0, 0.1)
}

pub fn three_element_shunt2() -> MbvdParams {
    res(19.1, 0.226, 169.0, 1.0, 0.1)
}

pub fn eight_element_series() -> MbvdParams {
    res(22.13, 0.165, 77.0, 3.5, 0.1)
}

pub fn eight_element_shunt1() -> MbvdParams {
    res(20.5, 0.175, 180.0, 2.5, 0.05)
}

/// One of the four identical Shunt-2 splits (32.5 fF each).
pub fn eight_element_shunt2_split() -> MbvdParams {
    res(20.5, 0.175, 32.5, 2.5, 0.05)
}

/// Shunt1 (port 1) – Series – Shunt2 (port 2), 50 Ω.
pub fn three_element() -> LadderDesign {
    LadderDesign {
        stages: vec![
            Stage::shunt("shunt1", three_element_shunt1()),
            Stage::series("series", three_element_series()),
            Stage::shunt("shunt2", three_element_shunt2()),
        ],
        z0: 50.0,
    }
}

/// Shunt1 – Series – Shunt2 (4 parallel splits) – Series – Shunt1, 50 Ω.
pub fn eight_element() -> LadderDesign {
    LadderDesign {
        stages: vec![
            Stage::shunt("shunt1", eight_element_shunt1()),
            Stage::series("series", eight_element_series()),
            Stage::shunt("shunt2", eight_element_shunt2_split()).with_multiplicity(4),
            Stage::series("series", eight_element_series()),
            Stage::shunt("shunt1", eight_element_shunt1()),
        ],
        z0: 50.0,
    }
}
