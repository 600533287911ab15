//! Final prompt assembly: role, retrieved knowledge, demonstrations, data
//! description, task, and the answer instruction, rendered in a fixed order.

use crate::gateway::{CompletionProvider, CompletionRequest, GatewayError};
use crate::kb::Demonstration;

/// Marker inserted when the knowledge section is cut to fit the budget.
pub const TRUNCATION_MARKER: &str = "[knowledge truncated to fit budget]";

/// Default character budget for a rendered prompt.
pub const DEFAULT_CHAR_BUDGET: usize = 24_000;

/// Persona text attached to a task, e.g. a cardiologist for heartbeat
/// classification.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleDescription {
    pub task_type: String,
    pub text: String,
}

/// Everything that goes into one prompt. Optional sections are omitted when
/// empty; the instruction section always carries the answer-format line so
/// responses stay parseable.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptBundle {
    pub role: Option<RoleDescription>,
    pub data_description: String,
    pub knowledge: Vec<String>,
    pub demonstrations: Vec<String>,
    pub task_description: String,
    /// Two-step analyze-then-answer instruction; absent when chain of
    /// thought is ablated.
    pub cot_instruction: Option<String>,
    /// Final-line format requirement, e.g. `Answer: <label>`.
    pub answer_format: String,
    pub char_budget: usize,
}

impl PromptBundle {
    pub fn new(data_description: impl Into<String>, task_description: impl Into<String>) -> Self {
        Self {
            role: None,
            data_description: data_description.into(),
            knowledge: Vec::new(),
            demonstrations: Vec::new(),
            task_description: task_description.into(),
            cot_instruction: None,
            answer_format: "End your response with one final line of the exact form: Answer: <value>".into(),
            char_budget: DEFAULT_CHAR_BUDGET,
        }
    }
}

/// Renders a demonstration as the blocks the model should imitate:
/// question, optional analysis, and the final answer line.
pub fn render_demonstration(demo: &Demonstration) -> String {
    let mut out = format!("Question: {}\n", demo.question);
    if let Some(analysis) = &demo.analysis {
        out.push_str(&format!("Analysis: {analysis}\n"));
    }
    out.push_str(&format!("Answer: {}", demo.answer));
    out
}

/// Deterministic rendering with labeled sections in fixed order: Role,
/// Domain Knowledge, Demonstrations, IoT Data Description, Task,
/// Instruction.
///
/// When the rendered prompt exceeds the character budget, knowledge chunks
/// are dropped from the end of the list (lowest-ranked first) and replaced
/// by a truncation marker. Data and task sections are never cut.
pub fn assemble_prompt(bundle: &PromptBundle) -> String {
    let mut keep = bundle.knowledge.len();
    loop {
        let truncated = keep < bundle.knowledge.len();
        let rendered = render(bundle, keep, truncated);
        if rendered.chars().count() <= bundle.char_budget || keep == 0 {
            return rendered;
        }
        keep -= 1;
    }
}

fn render(bundle: &PromptBundle, knowledge_kept: usize, truncated: bool) -> String {
    let mut sections: Vec<String> = Vec::new();

    if let Some(role) = &bundle.role {
        sections.push(format!("## Role\n{}", role.text));
    }

    if knowledge_kept > 0 || truncated {
        let mut body = String::new();
        for (i, chunk) in bundle.knowledge[..knowledge_kept].iter().enumerate() {
            if i > 0 {
                body.push('\n');
            }
            body.push_str(&format!("{}. {}", i + 1, chunk));
        }
        if truncated {
            if !body.is_empty() {
                body.push('\n');
            }
            body.push_str(TRUNCATION_MARKER);
        }
        sections.push(format!("## Domain Knowledge\n{body}"));
    }

    if !bundle.demonstrations.is_empty() {
        sections.push(format!(
            "## Demonstrations\n{}",
            bundle.demonstrations.join("\n\n")
        ));
    }

    sections.push(format!(
        "## IoT Data Description\n{}",
        bundle.data_description
    ));
    sections.push(format!("## Task\n{}", bundle.task_description));

    let mut instruction = String::new();
    if let Some(cot) = &bundle.cot_instruction {
        instruction.push_str(cot);
        instruction.push('\n');
    }
    instruction.push_str(&bundle.answer_format);
    sections.push(format!("## Instruction\n{instruction}"));

    sections.join("\n\n")
}

/// Default two-step chain-of-thought instruction.
pub fn default_cot_instruction() -> String {
    "First, analyze the IoT data description step by step in the context of the task. \
     Then, based on your analysis, give the final answer."
        .to_string()
}

/// One-time role-generation hook: asks a completion provider to draft a
/// persona for a task. Runs stay reproducible by persisting the result in
/// the config rather than regenerating per run.
pub fn generate_role_description(
    provider: &dyn CompletionProvider,
    task_type: &str,
    task_description: &str,
) -> Result<RoleDescription, GatewayError> {
    let prompt = format!(
        "Write one short paragraph, in the second person, describing the ideal expert persona \
         for the following task. Reply with the persona text only.\n\nTask ({task_type}): \
         {task_description}"
    );
    let completion = provider.complete(&CompletionRequest {
        prompt,
        tag: format!("role:{task_type}"),
    })?;
    Ok(RoleDescription {
        task_type: task_type.to_string(),
        text: completion.text.trim().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle() -> PromptBundle {
        PromptBundle::new("Sampling rate: 10 Hz.", "Classify the activity.")
    }

    #[test]
    fn minimal_bundle_renders_four_sections() {
        let prompt = assemble_prompt(&bundle());
        assert!(!prompt.contains("## Role"));
        assert!(!prompt.contains("## Domain Knowledge"));
        assert!(!prompt.contains("## Demonstrations"));
        assert!(prompt.contains("## IoT Data Description"));
        assert!(prompt.contains("## Task"));
        assert_eq!(prompt.matches("## Instruction").count(), 1);
        assert!(prompt.contains("Answer: <value>"));
    }

    #[test]
    fn knowledge_kept_in_retrieval_order() {
        let mut b = bundle();
        b.knowledge = vec!["first".into(), "second".into(), "third".into()];
        let prompt = assemble_prompt(&b);
        let i1 = prompt.find("1. first").unwrap();
        let i2 = prompt.find("2. second").unwrap();
        let i3 = prompt.find("3. third").unwrap();
        assert!(i1 < i2 && i2 < i3);
    }

    #[test]
    fn oversized_knowledge_truncated_with_marker() {
        let mut b = bundle();
        b.char_budget = 600;
        b.knowledge = (0..10).map(|i| format!("chunk {i} {}", "x".repeat(200))).collect();
        let prompt = assemble_prompt(&b);
        assert!(prompt.chars().count() <= 600);
        assert!(prompt.contains(TRUNCATION_MARKER));
        assert!(prompt.contains("## IoT Data Description"));
        assert!(prompt.contains("## Task"));
    }

    #[test]
    fn data_and_task_never_truncated() {
        let mut b = bundle();
        b.data_description = "d".repeat(500);
        b.char_budget = 100;
        let prompt = assemble_prompt(&b);
        assert!(prompt.contains(&b.data_description));
        assert!(prompt.contains("Classify the activity."));
    }

    #[test]
    fn assemble_is_pure() {
        let mut b = bundle();
        b.role = Some(RoleDescription {
            task_type: "har2".into(),
            text: "You are a movement analyst.".into(),
        });
        b.knowledge = vec!["k1".into()];
        b.demonstrations = vec!["Question: q\nAnswer: a".into()];
        b.cot_instruction = Some(default_cot_instruction());
        assert_eq!(assemble_prompt(&b), assemble_prompt(&b));
    }

    #[test]
    fn section_order_is_fixed() {
        let mut b = bundle();
        b.role = Some(RoleDescription {
            task_type: "har2".into(),
            text: "Movement analyst.".into(),
        });
        b.knowledge = vec!["k".into()];
        b.demonstrations = vec!["Question: q\nAnswer: a".into()];
        b.cot_instruction = Some(default_cot_instruction());
        let prompt = assemble_prompt(&b);
        let order = [
            "## Role",
            "## Domain Knowledge",
            "## Demonstrations",
            "## IoT Data Description",
            "## Task",
            "## Instruction",
        ];
        let positions: Vec<usize> = order.iter().map(|s| prompt.find(s).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn demo_rendering_blocks() {
        let with_analysis = Demonstration {
            demo_id: "d1".into(),
            task_type: "har2".into(),
            label: "WALKING".into(),
            question: "What activity?".into(),
            analysis: Some("Oscillation implies gait.".into()),
            answer: "WALKING".into(),
        };
        let rendered = render_demonstration(&with_analysis);
        assert_eq!(rendered.lines().count(), 3);
        assert_eq!(rendered.lines().last().unwrap(), "Answer: WALKING");

        let without = Demonstration {
            analysis: None,
            ..with_analysis
        };
        assert_eq!(render_demonstration(&without).lines().count(), 2);
    }
}
