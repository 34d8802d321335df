use std::fmt::Write;

/// CSV document with optional leading `#` comment lines.
///
/// Numbers are written as `{:.8e}` (nine significant digits) so that
/// identical runs produce identical bytes.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(comments: &[String], header: &[&str]) -> Self {
        let mut text = String::new();
        for c in comments {
            text.push_str("# ");
            text.push_str(c);
            text.push('\n');
        }
        text.push_str(&header.join(","));
        text.push('\n');
        Self {
            text,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        self.labelled_row(None, values);
    }

    /// Row whose first column is text.
    pub fn labelled_row(&mut self, label: Option<&str>, values: &[f64]) {
        let width = values.len() + usize::from(label.is_some());
        assert_eq!(width, self.columns, "row width does not match the header");
        let mut fields: Vec<String> = label.into_iter().map(str::to_string).collect();
        fields.extend(values.iter().map(|v| format_number(*v)));
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub(crate) fn format_number(v: f64) -> String {
    let mut s = String::new();
    write!(s, "{v:.8e}").expect("writing to a String");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let mut csv = Csv::new(&["note".into()], &["t", "x"]);
        csv.row(&[0.0, 1.0 / 3.0]);
        csv.row(&[2.5, -1e-20]);
        assert_eq!(
            csv.into_string(),
            "# note\nt,x\n0.00000000e0,3.33333333e-1\n2.50000000e0,-1.00000000e-20\n"
        );
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn width_is_checked() {
        Csv::new(&[], &["a", "b"]).row(&[1.0]);
    }
}
