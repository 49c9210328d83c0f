use std::fmt::Write as _;

use serde::Serialize;

use super::ClosureVerdict;

/// One rule application: the premise, what it produced, and for branching
/// rules the rendered alternatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleStep {
    pub rule: String,
    pub premise: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub produced: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<Vec<String>>,
}

impl RuleStep {
    pub fn linear(rule: &str, premise: String, produced: Vec<String>) -> Self {
        RuleStep {
            rule: rule.to_string(),
            premise,
            produced,
            alternatives: Vec::new(),
        }
    }

    pub fn branching(rule: &str, premise: String, alternatives: Vec<Vec<String>>) -> Self {
        RuleStep {
            rule: rule.to_string(),
            premise,
            produced: Vec::new(),
            alternatives,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TraceOutcome {
    Closed { verdict: ClosureVerdict, reason: String },
    Open,
    /// Not explored because an earlier sibling was open.
    Pruned,
    Branched,
}

/// A node of the search tree: the steps taken on one branch segment and
/// the subtrees of the branching rule that ended it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceNode {
    pub branch: usize,
    pub steps: Vec<RuleStep>,
    pub outcome: TraceOutcome,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    pub(crate) fn new(branch: usize) -> Self {
        TraceNode {
            branch,
            steps: Vec::new(),
            outcome: TraceOutcome::Branched,
            children: Vec::new(),
        }
    }

    fn write_text(&self, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        let _ = writeln!(out, "{pad}branch {}", self.branch);
        for step in &self.steps {
            let _ = writeln!(out, "{pad}  [{}] {}", step.rule, step.premise);
            for p in &step.produced {
                let _ = writeln!(out, "{pad}      + {p}");
            }
            for (i, alt) in step.alternatives.iter().enumerate() {
                let _ = writeln!(out, "{pad}      | {}: {}", i + 1, alt.join(", "));
            }
        }
        match &self.outcome {
            TraceOutcome::Closed { verdict, reason } => {
                let _ = writeln!(out, "{pad}  closed ({verdict:?}): {reason}");
            }
            TraceOutcome::Open => {
                let _ = writeln!(out, "{pad}  open");
            }
            TraceOutcome::Pruned => {
                let _ = writeln!(out, "{pad}  not explored");
            }
            TraceOutcome::Branched => {}
        }
        for child in &self.children {
            child.write_text(depth + 1, out);
        }
    }

    fn count(&self) -> usize {
        1 + self.children.iter().map(TraceNode::count).sum::<usize>()
    }
}

/// The full search tree of a tableau run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofTrace {
    pub vocabulary: Vec<String>,
    pub root: TraceNode,
}

impl ProofTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vocabulary: {{{}}}", self.vocabulary.join(", "));
        self.root.write_text(0, &mut out);
        out
    }

    pub fn node_count(&self) -> usize {
        self.root.count()
    }
}
