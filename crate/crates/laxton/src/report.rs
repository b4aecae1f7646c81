//! Persistable per-instance records. One `ReportRecord` serializes to one
//! JSON line with a fixed key order (schema v1:
//! instance, splitting, s, d0, rank, g_order, gstar_order, invariants,
//! predicted, verdict, then the optional timing sidecar), so golden-file
//! comparisons are byte-stable. CSV is a projection of the same columns.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::classify::{StructurePrediction, StructureReport, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct InstanceKey {
    #[serde(rename = "P")]
    pub p_coef: i64,
    #[serde(rename = "Q")]
    pub q_coef: i64,
    #[serde(rename = "p")]
    pub prime: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRecord {
    pub instance: InstanceKey,
    pub splitting: String,
    pub s: u32,
    pub d0: i64,
    pub rank: u64,
    pub g_order: u64,
    pub gstar_order: u64,
    /// Computed invariant factors of K*/G* (the enumerated G*_{F_p}).
    pub invariants: Vec<u64>,
    pub predicted: PredictedView,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

/// The prediction fields that belong in a persisted record.
#[derive(Debug, Clone, Serialize)]
pub struct PredictedView {
    pub kstar_gstar: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion_options: Option<Vec<Vec<u64>>>,
    pub free_rank: u8,
    pub h_equals_k: bool,
    pub g_equals_h: bool,
    pub in_formula_range: bool,
}

impl From<&StructurePrediction> for PredictedView {
    fn from(p: &StructurePrediction) -> Self {
        PredictedView {
            kstar_gstar: p.kstar_over_gstar.clone(),
            torsion_options: p.torsion_options.clone(),
            free_rank: p.free_rank,
            h_equals_k: p.h_equals_k,
            g_equals_h: p.g_equals_h,
            in_formula_range: p.in_formula_range,
        }
    }
}

impl ReportRecord {
    pub fn from_structure(rep: &StructureReport, timing_ms: Option<u64>) -> Self {
        ReportRecord {
            instance: InstanceKey {
                p_coef: rep.params.p().to_i64().unwrap_or(i64::MAX),
                q_coef: rep.params.q().to_i64().unwrap_or(i64::MAX),
                prime: rep.prime.to_u64().unwrap_or(u64::MAX),
            },
            splitting: rep.splitting.as_str().to_string(),
            s: rep.s,
            d0: rep.d0.to_i64().unwrap_or(i64::MAX),
            rank: rep.rank,
            g_order: rep.g_order,
            gstar_order: rep.gstar_order,
            invariants: rep.computed_kstar_gstar.clone(),
            predicted: (&rep.prediction).into(),
            verdict: rep.verdict,
            timing_ms,
        }
    }

    /// One JSON line, stable key order (struct declaration order).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn csv_header(with_timing: bool) -> String {
        let mut s = "P,Q,p,splitting,s,d0,rank,g_order,gstar_order,invariants,predicted,verdict"
            .to_string();
        if with_timing {
            s.push_str(",timing_ms");
        }
        s
    }

    /// CSV projection with the same columns; list-valued fields join with
    /// ';' and the prediction flattens to a compact key=value string.
    pub fn to_csv_line(&self) -> String {
        let inv = join_u64(&self.invariants);
        let pred = format!(
            "kg=[{}] torsion={} free={} h_eq_k={} g_eq_h={} in_range={}",
            join_u64(&self.predicted.kstar_gstar),
            match &self.predicted.torsion_options {
                None => "none".to_string(),
                Some(opts) => opts
                    .iter()
                    .map(|o| format!("[{}]", join_u64(o)))
                    .collect::<Vec<_>>()
                    .join("|"),
            },
            self.predicted.free_rank,
            self.predicted.h_equals_k,
            self.predicted.g_equals_h,
            self.predicted.in_formula_range,
        );
        let mut line = format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.instance.p_coef,
            self.instance.q_coef,
            self.instance.prime,
            self.splitting,
            self.s,
            self.d0,
            self.rank,
            self.g_order,
            self.gstar_order,
            inv,
            pred,
            self.verdict,
        );
        if let Some(t) = self.timing_ms {
            line.push_str(&format!(",{t}"));
        }
        line
    }
}

fn join_u64(xs: &[u64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}
