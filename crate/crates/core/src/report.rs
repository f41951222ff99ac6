//! Pass/fail reports shared by the CLI and the fixture pipeline.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Section {
    pub name: String,
    pub verdicts: Vec<Verdict>,
    /// Informational lines printed before the verdicts.
    pub lines: Vec<String>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section { name: name.into(), ..Default::default() }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) -> bool {
        self.verdicts.push(Verdict { name: name.into(), pass, detail: detail.into() });
        pass
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub title: String,
    pub sections: Vec<Section>,
    pub passed: bool,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), sections: Vec::new(), passed: true }
    }

    pub fn push(&mut self, section: Section) {
        self.passed &= section.passed();
        self.sections.push(section);
    }

    pub fn verdicts(&self) -> impl Iterator<Item = &Verdict> {
        self.sections.iter().flat_map(|s| &s.verdicts)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for s in &self.sections {
            writeln!(f, "\n== {} ==", s.name)?;
            for l in &s.lines {
                writeln!(f, "  {l}")?;
            }
            for v in &s.verdicts {
                let tag = if v.pass { "PASS" } else { "FAIL" };
                if v.detail.is_empty() {
                    writeln!(f, "[{tag}] {}", v.name)?;
                } else {
                    writeln!(f, "[{tag}] {}: {}", v.name, v.detail)?;
                }
            }
        }
        write!(f, "\noverall: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregation_and_rendering() {
        let mut r = Report::new("t");
        let mut s = Section::new("a");
        s.line("info");
        s.check("ok", true, "");
        r.push(s);
        assert!(r.passed);
        let mut s = Section::new("b");
        s.check("bad", false, "1 != 2");
        r.push(s);
        assert!(!r.passed);
        let text = r.to_string();
        assert!(text.contains("[PASS] ok\n"));
        assert!(text.contains("[FAIL] bad: 1 != 2"));
        assert!(text.ends_with("overall: FAIL"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["sections"][1]["verdicts"][0]["pass"], false);
    }
}
