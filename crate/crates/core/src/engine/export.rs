//! CSV traces.

use std::io::Write;

use super::coupled::CoupledRecord;
use super::run::EpochRecord;
use crate::error::{Error, Result};

const POLICY_HEADER: [&str; 8] = ["epoch", "choice", "label", "R", "S", "M", "gammaR", "gammaS"];
const COUPLED_EXTRA: [&str; 5] = ["Delta", "Tn", "An", "Gn", "D"];

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("csv write failed: {e}"))
}

fn policy_fields(r: &EpochRecord) -> [String; 8] {
    [
        r.epoch.to_string(),
        r.choice.as_str().to_string(),
        r.label.to_string(),
        r.r.to_string(),
        r.s.to_string(),
        r.m.to_string(),
        r.gamma_r.to_string(),
        r.gamma_s.to_string(),
    ]
}

/// Writes a single-policy trace.
pub fn write_policy_csv<W: Write>(out: W, records: &[EpochRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(POLICY_HEADER).map_err(io_err)?;
    for r in records {
        w.write_record(policy_fields(r)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Writes the greedy side of a coupled trace together with the coupling
/// diagnostics.
pub fn write_coupled_csv<W: Write>(out: W, records: &[CoupledRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(POLICY_HEADER.iter().chain(&COUPLED_EXTRA))
        .map_err(io_err)?;
    for r in records {
        let extra = [
            r.delta.to_string(),
            r.t_n.to_string(),
            u8::from(r.a_n).to_string(),
            r.g_n.to_string(),
            r.d.to_string(),
        ];
        w.write_record(policy_fields(&r.greedy).iter().chain(&extra))
            .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_coupled, run_policy, PolicySpec, TieBreak};
    use crate::model::SourcePair;

    #[test]
    fn policy_csv_has_header_and_rows() {
        let pair = SourcePair::illustrative();
        let tr = run_policy(&pair, PolicySpec::greedy(), 5, 1).unwrap();
        let mut buf = Vec::new();
        write_policy_csv(&mut buf, &tr.records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "epoch,choice,label,R,S,M,gammaR,gammaS");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("1,R,"));
    }

    #[test]
    fn coupled_csv_has_diagnostics() {
        let pair = SourcePair::illustrative();
        let tr = run_coupled(&pair, 4, 2, TieBreak::PreferR).unwrap();
        let mut buf = Vec::new();
        write_coupled_csv(&mut buf, &tr.records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("epoch,choice,label,R,S,M,gammaR,gammaS,Delta,Tn,An,Gn,D\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
