use std::fmt::Write as _;

use crate::bits::{BitLength, Unexpectedness};
use crate::scalar::Scalar;
use crate::symbol::SymbolId;

pub const CSV_HEADER: &str = "t,symbol,c_stm,c_ltm,u_raw,u_clamped,novelty,change_flag";

/// Per-event output of the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord<S> {
    pub t: u64,
    pub symbol: SymbolId,
    pub c_stm: BitLength<S>,
    pub c_ltm: BitLength<S>,
    /// Absent on novelty events and whenever either cost is infinite.
    pub u: Option<Unexpectedness<S>>,
    pub novelty: bool,
    pub change_flag: bool,
}

impl<S: Scalar> TraceRecord<S> {
    pub fn u_raw(&self) -> Option<S> {
        self.u.map(|u| u.raw())
    }

    pub fn u_clamped(&self) -> Option<S> {
        self.u.map(|u| u.clamped())
    }

    /// One CSV row matching [`CSV_HEADER`], six decimals, `inf` for infinite costs.
    pub fn to_csv_row(&self) -> String {
        let mut out = String::with_capacity(96);
        let _ = write!(out, "{},{},", self.t, csv_field(self.symbol.as_str()));
        push_num(&mut out, Some(self.c_stm.value()), "inf", "");
        out.push(',');
        push_num(&mut out, Some(self.c_ltm.value()), "inf", "");
        out.push(',');
        push_num(&mut out, self.u_raw(), "inf", "");
        out.push(',');
        push_num(&mut out, self.u_clamped(), "inf", "");
        let _ = write!(out, ",{},{}", self.novelty, self.change_flag);
        out
    }

    /// One JSON object (no trailing newline); infinite costs and absent values are `null`.
    pub fn to_json_line(&self) -> String {
        let mut out = String::with_capacity(160);
        let symbol = serde_json::to_string(self.symbol.as_str()).expect("string serialises");
        let _ = write!(out, "{{\"t\":{},\"symbol\":{},\"c_stm\":", self.t, symbol);
        push_num(&mut out, Some(self.c_stm.value()), "null", "null");
        out.push_str(",\"c_ltm\":");
        push_num(&mut out, Some(self.c_ltm.value()), "null", "null");
        out.push_str(",\"u_raw\":");
        push_num(&mut out, self.u_raw(), "null", "null");
        out.push_str(",\"u_clamped\":");
        push_num(&mut out, self.u_clamped(), "null", "null");
        let _ = write!(
            out,
            ",\"novelty\":{},\"change_flag\":{}}}",
            self.novelty, self.change_flag
        );
        out
    }
}

fn push_num<S: Scalar>(out: &mut String, v: Option<S>, infinite: &str, absent: &str) {
    match v {
        None => out.push_str(absent),
        Some(x) if !x.is_finite() => out.push_str(infinite),
        Some(x) => {
            let _ = write!(out, "{x:.6}");
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
