//! Prompt generation: the five pairwise query templates, declarative
//! statement forms for embedding, causal-chain questions with their
//! variants, chain-of-thought prefixes, and question-bank loading.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("no template with id {0}; templates are numbered 1 to 5")]
    UnknownTemplate(u8),
    #[error("variable names must be nonempty")]
    EmptyName,
    #[error("chain length {0} is out of range; supported lengths are 2 to 10")]
    BadChainLength(usize),
    #[error("question indices {0:?} must be two distinct positions below the chain length")]
    BadQuestion((usize, usize)),
    #[error("chain-of-thought prefix of {requested} pairs requested, bank has {available}")]
    CotOutOfRange { requested: usize, available: usize },
    #[error("question bank item id `{0}` appears more than once")]
    DuplicateBankId(String),
    #[error("question bank item `{0}` is auto-graded but has no gold answer")]
    MissingGold(String),
    #[error("reading bank: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing bank: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("malformed chain-of-thought fixture near `{0}`")]
    BadCotFixture(String),
}

/// Whether a template's wording expects a mere association or a direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateSymmetry {
    Symmetric,
    Asymmetric,
}

/// One of the five built-in pairwise query wordings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryTemplate {
    pub id: u8,
    pub interrogative: &'static str,
    pub symmetry: TemplateSymmetry,
}

const TEMPLATES: [QueryTemplate; 5] = [
    QueryTemplate {
        id: 1,
        interrogative: "Are {x} and {y} causally related?",
        symmetry: TemplateSymmetry::Symmetric,
    },
    QueryTemplate {
        id: 2,
        interrogative: "Is there a causal connection between {x} and {y}?",
        symmetry: TemplateSymmetry::Symmetric,
    },
    QueryTemplate {
        id: 3,
        interrogative: "Is there a causality between {x} and {y}?",
        symmetry: TemplateSymmetry::Symmetric,
    },
    QueryTemplate {
        id: 4,
        interrogative: "Does {x} cause {y}?",
        symmetry: TemplateSymmetry::Asymmetric,
    },
    QueryTemplate {
        id: 5,
        interrogative: "Does {x} influence {y}?",
        symmetry: TemplateSymmetry::Asymmetric,
    },
];

impl QueryTemplate {
    pub fn all() -> &'static [QueryTemplate; 5] {
        &TEMPLATES
    }

    pub fn by_id(id: u8) -> Result<&'static QueryTemplate, PromptError> {
        TEMPLATES
            .iter()
            .find(|t| t.id == id)
            .ok_or(PromptError::UnknownTemplate(id))
    }
}

fn capitalize_first(text: &str) -> String {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

/// Substitutes the cause into the first placeholder and the effect into the
/// second, capitalizing the first character of the result.
pub fn instantiate_pair(
    template: &QueryTemplate,
    cause: &str,
    effect: &str,
) -> Result<String, PromptError> {
    if cause.is_empty() || effect.is_empty() {
        return Err(PromptError::EmptyName);
    }
    let filled = template.interrogative.replace("{x}", cause).replace("{y}", effect);
    Ok(capitalize_first(&filled))
}

/// Crude number agreement for declarative statements: a phrase counts as
/// plural when its last word ends in a single `s` ("floods", "moths") but
/// not a double one ("glass").
fn is_plural(phrase: &str) -> bool {
    let last = phrase.split_whitespace().last().unwrap_or(phrase);
    last.len() >= 2 && last.ends_with('s') && !last.ends_with("ss")
}

/// Declarative counterpart of a template, used for knowledge-base statements
/// ("Rain causes floods.", "Floods cause rain.").
pub fn statement_text(
    template_id: u8,
    cause: &str,
    effect: &str,
) -> Result<String, PromptError> {
    if cause.is_empty() || effect.is_empty() {
        return Err(PromptError::EmptyName);
    }
    let text = match template_id {
        1 => format!("{cause} and {effect} are causally related."),
        2 => format!("There is a causal connection between {cause} and {effect}."),
        3 => format!("There is a causality between {cause} and {effect}."),
        4 => {
            let verb = if is_plural(cause) { "cause" } else { "causes" };
            format!("{cause} {verb} {effect}.")
        }
        5 => {
            let verb = if is_plural(cause) { "influence" } else { "influences" };
            format!("{cause} {verb} {effect}.")
        }
        other => return Err(PromptError::UnknownTemplate(other)),
    };
    Ok(capitalize_first(&text))
}

/// Uppercase letters available for chain variables. The letters used by the
/// chain-of-thought banks (M, V, W, X, Y, Z) are excluded so exemplar
/// prefixes never share names with the actual question.
pub const CHAIN_LETTERS: [char; 20] = [
    'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J', 'K', 'L', 'N', 'O', 'P', 'Q', 'R', 'S',
    'T', 'U',
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainVariant {
    /// Propositions in chain order, alphabetical letters, question anywhere.
    Standard,
    /// Same premise as standard; marks items whose question deliberately
    /// skips the start or end of the chain.
    Subchain,
    /// Propositions in a seeded shuffled order.
    RandomizedOrder { seed: u64 },
    /// Letters drawn without replacement from a seeded shuffle of
    /// [`CHAIN_LETTERS`]; chain order untouched.
    RandomizedNames { seed: u64 },
}

/// One causal-chain question: a premise X1 → X2 → … → Xn and a "does U
/// cause V?" question between two chain positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub length: usize,
    pub variant: ChainVariant,
    /// Chain positions (0-based) the question asks about, in order.
    pub question: (usize, usize),
}

/// A rendered chain question with its gold answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainPrompt {
    pub text: String,
    pub gold: bool,
    /// Variable names by chain position.
    pub names: Vec<String>,
}

/// Renders the premise and question for a chain spec. The gold answer is
/// directed reachability from the question's first position to its second in
/// the premise digraph, so it is independent of proposition order and
/// naming.
pub fn chain_prompt(spec: &ChainSpec) -> Result<ChainPrompt, PromptError> {
    if !(2..=10).contains(&spec.length) {
        return Err(PromptError::BadChainLength(spec.length));
    }
    let (from, to) = spec.question;
    if from >= spec.length || to >= spec.length || from == to {
        return Err(PromptError::BadQuestion(spec.question));
    }

    let names: Vec<String> = match spec.variant {
        ChainVariant::RandomizedNames { seed } => {
            let mut letters = CHAIN_LETTERS.to_vec();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            letters.shuffle(&mut rng);
            letters[..spec.length].iter().map(|c| c.to_string()).collect()
        }
        _ => CHAIN_LETTERS[..spec.length].iter().map(|c| c.to_string()).collect(),
    };

    let mut propositions: Vec<(usize, usize)> =
        (0..spec.length - 1).map(|i| (i, i + 1)).collect();
    if let ChainVariant::RandomizedOrder { seed } = spec.variant {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        propositions.shuffle(&mut rng);
    }

    // Gold by breadth-first reachability over the premise digraph.
    let gold = {
        let mut reached = BTreeSet::from([from]);
        let mut frontier = vec![from];
        while let Some(v) = frontier.pop() {
            for &(a, b) in &propositions {
                if a == v && reached.insert(b) {
                    frontier.push(b);
                }
            }
        }
        from != to && reached.contains(&to)
    };

    let rendered: Vec<String> = propositions
        .iter()
        .map(|&(a, b)| format!("{} causes {}", names[a], names[b]))
        .collect();
    let premise = match rendered.len() {
        1 => rendered[0].clone(),
        _ => {
            let head = rendered[..rendered.len() - 1].join(", ");
            format!("{} and {}", head, rendered[rendered.len() - 1])
        }
    };
    let text = format!("If {}. Does {} cause {}?", premise, names[from], names[to]);
    Ok(ChainPrompt { text, gold, names })
}

/// Which chain-of-thought exemplar list to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CotTask {
    CausalChains,
    NaturalWordChains,
}

/// An ordered list of verbatim question-answer exemplars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CotBank {
    pub task: CotTask,
    pub qa_pairs: Vec<(String, String)>,
}

const CAUSAL_CHAINS_COT: &str = include_str!("../../../data/cot/causal_chains.txt");
const NATURAL_WORD_CHAINS_COT: &str = include_str!("../../../data/cot/natural_word_chains.txt");

impl CotBank {
    /// The built-in bank for a task, parsed from the bundled fixture.
    pub fn builtin(task: CotTask) -> CotBank {
        let text = match task {
            CotTask::CausalChains => CAUSAL_CHAINS_COT,
            CotTask::NaturalWordChains => NATURAL_WORD_CHAINS_COT,
        };
        Self::parse(task, text).expect("bundled fixtures are well-formed")
    }

    /// Parses "Q: …\nA: …" blocks separated by blank lines.
    pub fn parse(task: CotTask, text: &str) -> Result<CotBank, PromptError> {
        let mut qa_pairs = Vec::new();
        for block in text.split("\n\n") {
            let block = block.trim_end_matches('\n');
            if block.trim().is_empty() {
                continue;
            }
            let rest = block
                .strip_prefix("Q: ")
                .ok_or_else(|| PromptError::BadCotFixture(block.chars().take(40).collect()))?;
            let (q, a) = rest
                .split_once("\nA: ")
                .ok_or_else(|| PromptError::BadCotFixture(block.chars().take(40).collect()))?;
            qa_pairs.push((q.to_string(), a.to_string()));
        }
        Ok(CotBank { task, qa_pairs })
    }

    pub fn len(&self) -> usize {
        self.qa_pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qa_pairs.is_empty()
    }

    /// Renders the bank back into the fixture format.
    pub fn render(&self) -> String {
        self.qa_pairs
            .iter()
            .map(|(q, a)| format!("Q: {q}\nA: {a}\n"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// First `k` exemplars as a prompt prefix: each rendered "Q: …\nA: …\n",
/// with one blank line after the block. `k = 0` is plain prompting and
/// yields an empty string.
pub fn cot_prefix(bank: &CotBank, k: usize) -> Result<String, PromptError> {
    if k > bank.len() {
        return Err(PromptError::CotOutOfRange { requested: k, available: bank.len() });
    }
    if k == 0 {
        return Ok(String::new());
    }
    let mut out = String::new();
    for (q, a) in &bank.qa_pairs[..k] {
        out.push_str(&format!("Q: {q}\nA: {a}\n"));
    }
    out.push('\n');
    Ok(out)
}

/// Grading mode of a question-bank item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grading {
    /// Compare a yes/no verdict against the item's gold answer.
    AutoYesNo,
    /// Route the answer to the manual labeling queue.
    Manual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankItem {
    pub id: String,
    pub prompt: String,
    pub grading: Grading,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<bool>,
    /// Optional grouping label, reported per category when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
}

/// Loads a question bank. A whitespace-only file is an empty bank; item ids
/// must be unique and auto-graded items must carry a gold answer.
pub fn load_question_bank(path: impl AsRef<Path>) -> Result<Vec<BankItem>, PromptError> {
    let text = std::fs::read_to_string(path)?;
    parse_question_bank(&text)
}

pub fn parse_question_bank(text: &str) -> Result<Vec<BankItem>, PromptError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let items: Vec<BankItem> = serde_json::from_str(text)?;
    let mut seen = BTreeSet::new();
    for item in &items {
        if !seen.insert(item.id.clone()) {
            return Err(PromptError::DuplicateBankId(item.id.clone()));
        }
        if item.grading == Grading::AutoYesNo && item.gold.is_none() {
            return Err(PromptError::MissingGold(item.id.clone()));
        }
    }
    Ok(items)
}
