use std::fmt::Write as _;

/// Column data plus the `#` metadata written above the header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Plot hint: abscissa is log-spaced.
    pub log_x: bool,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Table {
        Table {
            title: title.to_string(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            log_x: false,
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Table {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Shortest round-trip float formatting keeps the output byte-stable.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}\n", self.title);
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", &["x_m", "y_rad"]);
        t.meta("points", 2);
        t.push(vec![0.0, 0.5]);
        t.push(vec![1e-3, -2.25]);
        assert_eq!(
            t.to_csv(),
            "# demo\n# points = 2\nx_m,y_rad\n0,0.5\n0.001,-2.25\n"
        );
        assert_eq!(t.column("y_rad").unwrap(), vec![0.5, -2.25]);
        assert!(t.column("nope").is_none());
    }
}
