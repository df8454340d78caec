//! Linear and quadratic constraints on the f-vector of a Fano fan.

use serde::Serialize;

use crate::error::Result;
use crate::fan::Fan;
use crate::primitive;
use crate::structure::{self, PairKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FVectorReport {
    /// `f[i]` counts the cones of dimension `i + 1`.
    pub f_vector: Vec<usize>,
    pub fano: bool,
    /// The three Dehn-Sommerville equations of a simplicial 4-sphere
    /// (dimension 5 only).
    pub ds5: Option<bool>,
    /// `12 f_{n-3} >= (3n - 4) f_{n-2}` (Fano, `n >= 3`).
    pub batyrev: Option<bool>,
    /// `7 f_1 <= 45 (f_0 - 2)` (Fano, dimension 5).
    pub spade: Option<bool>,
    /// Whether every ray lies in at most two order-2 collections, the two
    /// being `{x, -x}` and `{x, y}` with `-y`, `-x-y` not rays.
    pub manu_hypothesis: Option<bool>,
    /// `C(f_0, 2) - f_1 <= 3/4 f_0`, evaluated when the hypothesis holds.
    pub manu_bound: Option<bool>,
    pub order2_collections: usize,
    pub notes: Vec<String>,
}

impl FVectorReport {
    /// No evaluated check failed.
    pub fn all_pass(&self) -> bool {
        [self.ds5, self.batyrev, self.spade, self.manu_bound]
            .iter()
            .all(|c| *c != Some(false))
    }
}

pub fn fvector_checks(fan: &Fan) -> Result<FVectorReport> {
    fan.require_smooth_complete()?;
    let n = fan.dim();
    let f = fan.f_vector();
    let fano = primitive::is_fano(fan)?;
    let mut notes = Vec::new();
    let fi = |i: usize| f[i] as i64;

    let ds5 = (n == 5).then(|| {
        fi(2) == 4 * fi(1) - 10 * fi(0) + 20
            && fi(3) == 5 * fi(1) - 15 * fi(0) + 30
            && fi(4) == 2 * fi(1) - 6 * fi(0) + 12
    });
    let batyrev = if n < 3 {
        None
    } else if !fano {
        notes.push("not Fano: Batyrev inequality skipped".to_string());
        None
    } else {
        Some(12 * fi(n - 3) >= (3 * n as i64 - 4) * fi(n - 2))
    };
    let spade = if n != 5 {
        None
    } else if !fano {
        notes.push("not Fano: 7 f_1 <= 45 (f_0 - 2) skipped".to_string());
        None
    } else {
        Some(7 * fi(1) <= 45 * (fi(0) - 2))
    };
    let order2 = f[0] * (f[0] - 1) / 2 - f.get(1).copied().unwrap_or(0);
    let (manu_hypothesis, manu_bound) = if !fano {
        notes.push("not Fano: order-2 bound skipped".to_string());
        (None, None)
    } else {
        let hyp = manu_hypothesis_holds(fan)?;
        if hyp {
            (Some(true), Some(4 * order2 <= 3 * f[0]))
        } else {
            notes.push("a ray lies in too many order-2 collections: order-2 bound skipped".to_string());
            (Some(false), None)
        }
    };
    Ok(FVectorReport {
        f_vector: f,
        fano,
        ds5,
        batyrev,
        spade,
        manu_hypothesis,
        manu_bound,
        order2_collections: order2,
        notes,
    })
}

fn manu_hypothesis_holds(fan: &Fan) -> Result<bool> {
    for x in 0..fan.num_rays() {
        let p = structure::order2_profile(fan, x)?;
        match p.pairs.len() {
            0 | 1 => {}
            2 => {
                let zero = p.pairs.iter().filter(|(_, k)| *k == PairKind::SumZero).count();
                let Some(&(y, PairKind::SumRay(v))) = p.pairs.iter().find(|(_, k)| *k != PairKind::SumZero) else {
                    return Ok(false);
                };
                if zero != 1 || structure::opposite(fan, y).is_some() || structure::opposite(fan, v).is_some() {
                    return Ok(false);
                }
            }
            _ => return Ok(false),
        }
    }
    Ok(true)
}
