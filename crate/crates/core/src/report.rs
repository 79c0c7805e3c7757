//! Reports: claim lines, each resting on exactly one cited result (or on
//! direct computation), plus free-form blocks and a JSON payload.

use serde_json::{json, Value};

use crate::citation::Citation;
use crate::classify::{Dimension, Verdict, VerdictTag};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub text: String,
    pub citation: Citation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub subject: String,
    pub claims: Vec<Claim>,
    /// Titled text blocks (diagrams, documents, matrices).
    pub blocks: Vec<(String, String)>,
    pub data: Value,
}

impl Report {
    pub fn new(command: impl Into<String>, subject: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            subject: subject.into(),
            claims: Vec::new(),
            blocks: Vec::new(),
            data: json!({}),
        }
    }

    pub fn claim(&mut self, text: impl Into<String>, citation: Citation) -> &mut Self {
        self.claims.push(Claim { text: text.into(), citation });
        self
    }

    pub fn computed(&mut self, text: impl Into<String>) -> &mut Self {
        self.claim(text, Citation::Computed)
    }

    pub fn block(&mut self, title: impl Into<String>, body: impl Into<String>) -> &mut Self {
        self.blocks.push((title.into(), body.into()));
        self
    }

    pub fn set(&mut self, key: &str, value: Value) -> &mut Self {
        self.data.as_object_mut().expect("report data is an object").insert(key.to_string(), value);
        self
    }

    /// Cited results in order of first use, excluding `computed`.
    pub fn citations(&self) -> Vec<Citation> {
        let mut out = Vec::new();
        for c in &self.claims {
            if c.citation != Citation::Computed && !out.contains(&c.citation) {
                out.push(c.citation);
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "subject": self.subject,
            "claims": self.claims.iter().map(|c| json!({"claim": c.text, "citation": c.citation.tag()})).collect::<Vec<_>>(),
            "citations": self.citations().iter().map(|c| json!({"tag": c.tag(), "statement": c.statement()})).collect::<Vec<_>>(),
            "data": self.data,
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("values serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, self.subject);
        for c in &self.claims {
            out.push_str(&format!("  {}  [{}]\n", c.text, c.citation.tag()));
        }
        for (title, body) in &self.blocks {
            out.push_str(&format!("\n{title}:\n"));
            for line in body.lines() {
                out.push_str(&format!("  {line}\n"));
            }
        }
        let cited = self.citations();
        if !cited.is_empty() {
            out.push_str("\ncitations:\n");
            for c in cited {
                out.push_str(&format!("  {}: {}\n", c.tag(), c.statement()));
            }
        }
        out
    }
}

/// The verdict's steps as claims, ending with the verdict line itself.
pub fn add_verdict(report: &mut Report, v: &Verdict) {
    for (text, c) in &v.steps {
        report.claim(text.clone(), *c);
    }
    let last = v.steps.last().map_or(Citation::Computed, |(_, c)| *c);
    report.claim(format!("verdict: {}", v.headline()), last);
    if let Some(w) = v.witness_text() {
        report.block("witness", w);
    }
    report.set("verdict", verdict_json(v));
}

pub fn verdict_json(v: &Verdict) -> Value {
    let dimension = match &v.tag {
        VerdictTag::UniqueIrrepCompacts(Dimension::Finite(d)) => match u64::try_from(*d) {
            Ok(d) => json!(d),
            Err(_) => json!(d.to_string()),
        },
        VerdictTag::UniqueIrrepCompacts(Dimension::CountablyInfinite) => json!("aleph0"),
        _ => Value::Null,
    };
    let mut out = json!({
        "tag": v.tag_name(),
        "headline": v.headline(),
        "dimension": dimension,
        "witness": v.witness_text(),
        "citations": v.citations().iter().map(|c| c.tag()).collect::<Vec<_>>(),
    });
    if let VerdictTag::NotSimple(w) = &v.tag {
        out["ideal"] = json!(w.ideal().map(|i| i.names(&v.graph)));
    }
    if let VerdictTag::UnknownAtDepth(n) = v.tag {
        out["depth"] = json!(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_lines_carry_one_tag_each() {
        let mut r = Report::new("classify", "g1");
        r.computed("2 vertices").claim("acyclic, so AF", Citation::AfIffAcyclic);
        r.block("witness", "sink w");
        let text = r.to_text();
        assert!(text.starts_with("classify: g1\n  2 vertices  [computed]\n  acyclic, so AF  [af-iff-acyclic]\n"));
        assert!(text.contains("\nwitness:\n  sink w\n"));
        assert!(text.contains("\ncitations:\n  af-iff-acyclic: "));
        assert_eq!(r.to_json()["claims"][1]["citation"], "af-iff-acyclic");
    }
}
