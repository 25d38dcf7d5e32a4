use std::path::Path;

use super::{ReportError, Table};

/// Renders a table as RFC-4180 CSV with LF line endings.
pub fn csv_string(table: &Table) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.header).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(|c| c.to_string())).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are UTF-8")
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<(), ReportError> {
    std::fs::write(path, csv_string(table)).map_err(|e| ReportError::io(path, e))
}

/// Reads a CSV produced by [`emit_csv`] back into header and string rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), ReportError> {
    let mut r = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| ReportError::Csv(e.to_string()))?;
    let header = r
        .headers()
        .map_err(|e| ReportError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| ReportError::Csv(e.to_string()))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Cell;
    use proptest::prelude::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(["iteration", "level", "mi_input_bits", "mi_label_bits"]);
        assert_eq!(csv_string(&t), "iteration,level,mi_input_bits,mi_label_bits\n");
    }

    #[test]
    fn quoting_and_line_endings() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![Cell::text("x,y"), Cell::Float(0.1)]);
        let s = csv_string(&t);
        assert_eq!(s, "a,b\n\"x,y\",0.1\n");
        assert!(!s.contains('\r'));
    }

    proptest! {
        #[test]
        fn floats_round_trip_bit_exactly(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let mut t = Table::new(["v"]);
            t.push(vec![Cell::Float(x)]);
            let s = csv_string(&t);
            let cell = s.lines().nth(1).unwrap();
            let back: f64 = cell.parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
