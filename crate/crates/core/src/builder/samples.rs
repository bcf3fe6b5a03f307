//! Turning one annotated object into instruction samples.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::{placeholder_regex, ObjectRecord, PartAnnotation, RecordError};
use super::templates::{self, DELETE_BY_NAME_END};
use crate::grammar::{render_tokens, sort_order, QuantBox, RenderError, Token};
use crate::hash::derive_seed;

/// The eleven instruction families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
#[repr(u8)]
pub enum TaskType {
    BoxListing = 0,
    MultiPartCoarse = 1,
    MultiPartFine = 2,
    SinglePartFromName = 3,
    SinglePartFromDescription = 4,
    BoxToName = 5,
    BoxToDescription = 6,
    PartQa = 7,
    Delete = 8,
    Modify = 9,
    Add = 10,
}

impl TaskType {
    pub const ALL: [TaskType; 11] = [
        TaskType::BoxListing,
        TaskType::MultiPartCoarse,
        TaskType::MultiPartFine,
        TaskType::SinglePartFromName,
        TaskType::SinglePartFromDescription,
        TaskType::BoxToName,
        TaskType::BoxToDescription,
        TaskType::PartQa,
        TaskType::Delete,
        TaskType::Modify,
        TaskType::Add,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            TaskType::BoxListing => "Pure box listing",
            TaskType::MultiPartCoarse => "Multi-Part Grounding (Q1)",
            TaskType::MultiPartFine => "Multi-Part Grounding (Q2)",
            TaskType::SinglePartFromName => "Single-Part Grounding (Q1)",
            TaskType::SinglePartFromDescription => "Single-Part Grounding (Q2)",
            TaskType::BoxToName => "Box-to-Text (Q1)",
            TaskType::BoxToDescription => "Box-to-Text (Q2)",
            TaskType::PartQa => "Part QA",
            TaskType::Delete => "Edit: Remove (program)",
            TaskType::Modify => "Edit: Replace (program)",
            TaskType::Add => "Edit: Add (program)",
        }
    }

    fn needs_parts(self) -> bool {
        self != TaskType::PartQa
    }
}

impl From<TaskType> for u8 {
    fn from(t: TaskType) -> u8 {
        t as u8
    }
}

impl TryFrom<u8> for TaskType {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        TaskType::ALL
            .get(usize::from(v))
            .copied()
            .ok_or_else(|| format!("task type {v} is outside 0..=10"))
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", *self as u8)
    }
}

/// One training pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionSample {
    pub object_id: String,
    pub task_type: TaskType,
    pub prompt: String,
    /// Canonical token text.
    pub target: String,
    /// Index into the task's prompt pool; for part QA, the index of the
    /// question in the record.
    pub template_id: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("{object}: {task} needs at least one part")]
    EmptyParts { object: String, task: TaskType },
    #[error("{object}: part QA needs question/answer pairs")]
    MissingQa { object: String },
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("{object}: target does not render: {source}")]
    Render { object: String, source: RenderError },
}

/// Per-(seed, object, task) random stream, so results do not depend on which
/// other objects or tasks are built alongside.
pub fn task_rng(seed: u64, object_id: &str, task: TaskType) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, &[object_id.as_bytes(), &[task as u8]]))
}

struct Prepared<'a> {
    record: &'a ObjectRecord,
    quant: Vec<QuantBox>,
    /// Part indices in canonical `(z_min, y_min, x_min)` order.
    order: Vec<usize>,
}

impl<'a> Prepared<'a> {
    fn new(record: &'a ObjectRecord) -> Self {
        let quant: Vec<QuantBox> = record.parts.iter().map(|p| p.bbox.quantize()).collect();
        let order = sort_order(&quant);
        Self {
            record,
            quant,
            order,
        }
    }

    fn part(&self, i: usize) -> &PartAnnotation {
        &self.record.parts[i]
    }

    fn sorted_parts(&self) -> impl Iterator<Item = (usize, &PartAnnotation)> + '_ {
        self.order.iter().map(move |&i| (i, self.part(i)))
    }

    /// Distinct part names in canonical order of first appearance.
    fn distinct_names(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for (_, p) in self.sorted_parts() {
            if !seen.contains(&p.q1.as_str()) {
                seen.push(p.q1.as_str());
            }
        }
        seen
    }

    fn box_tokens(&self, i: usize) -> [Token; 8] {
        self.quant[i].tokens()
    }

    fn box_text(&self, i: usize) -> String {
        render_tokens(&self.box_tokens(i)).expect("box tokens always render")
    }
}

fn push_words(out: &mut Vec<Token>, text: &str) {
    out.extend(text.split_whitespace().map(Token::word));
}

struct Emitter<'a> {
    object: &'a str,
    task: TaskType,
    rng: ChaCha8Rng,
    pool: Vec<&'static str>,
    out: Vec<InstructionSample>,
}

impl Emitter<'_> {
    fn pick(&mut self, candidates: &[usize]) -> usize {
        *candidates
            .choose(&mut self.rng)
            .expect("non-empty template pool")
    }

    fn pick_any(&mut self) -> usize {
        let all: Vec<usize> = (0..self.pool.len()).collect();
        self.pick(&all)
    }

    fn emit(
        &mut self,
        template_id: usize,
        prompt: String,
        target: &[Token],
    ) -> Result<(), BuildError> {
        let target = render_tokens(target).map_err(|source| BuildError::Render {
            object: self.object.to_string(),
            source,
        })?;
        self.out.push(InstructionSample {
            object_id: self.object.to_string(),
            task_type: self.task,
            prompt,
            target,
            template_id,
        });
        Ok(())
    }
}

/// Builds the samples of the requested task types for one object. Types are
/// emitted in ascending order; within a type, samples follow the canonical
/// part order.
pub fn build_samples(
    record: &ObjectRecord,
    types: &[TaskType],
    seed: u64,
) -> Result<Vec<InstructionSample>, BuildError> {
    record.validate()?;
    let prep = Prepared::new(record);
    let mut wanted: Vec<TaskType> = types.to_vec();
    wanted.sort();
    wanted.dedup();

    let mut out = Vec::new();
    for task in wanted {
        out.extend(build_task(&prep, task, seed)?);
    }
    Ok(out)
}

fn build_task(
    prep: &Prepared<'_>,
    task: TaskType,
    seed: u64,
) -> Result<Vec<InstructionSample>, BuildError> {
    let rec = prep.record;
    if task.needs_parts() && rec.parts.is_empty() {
        return Err(BuildError::EmptyParts {
            object: rec.id.clone(),
            task,
        });
    }
    let mut em = Emitter {
        object: &rec.id,
        task,
        rng: task_rng(seed, &rec.id, task),
        pool: templates::pool(task),
        out: Vec::new(),
    };

    match task {
        TaskType::BoxListing | TaskType::MultiPartCoarse | TaskType::MultiPartFine => {
            let mut target = Vec::new();
            if task == TaskType::MultiPartFine {
                push_words(&mut target, &rec.caption);
            }
            for (i, p) in prep.sorted_parts() {
                target.extend(prep.box_tokens(i));
                match task {
                    TaskType::MultiPartCoarse => push_words(&mut target, &p.q1),
                    TaskType::MultiPartFine => push_words(&mut target, &p.q2),
                    _ => {}
                }
            }
            let id = em.pick_any();
            let prompt = em.pool[id].to_string();
            em.emit(id, prompt, &target)?;
        }
        TaskType::SinglePartFromName => {
            let names = prep.distinct_names();
            let name = *names.choose(&mut em.rng).expect("parts are non-empty");
            let mut target = Vec::new();
            for (i, p) in prep.sorted_parts().filter(|(_, p)| p.q1 == name) {
                target.extend(prep.box_tokens(i));
                push_words(&mut target, &p.q2);
            }
            let id = em.pick_any();
            let prompt = templates::fill(em.pool[id], Some(name), None, None);
            em.emit(id, prompt, &target)?;
        }
        TaskType::SinglePartFromDescription => {
            for (i, p) in prep.sorted_parts() {
                let id = em.pick_any();
                let prompt = templates::fill(em.pool[id], None, Some(&p.q2), None);
                em.emit(id, prompt, &prep.box_tokens(i))?;
            }
        }
        TaskType::BoxToName | TaskType::BoxToDescription => {
            for (i, p) in prep.sorted_parts() {
                let id = em.pick_any();
                let prompt = format!("{} {}", em.pool[id], prep.box_text(i));
                let text = if task == TaskType::BoxToName {
                    &p.q1
                } else {
                    &p.q2
                };
                let mut target = Vec::new();
                push_words(&mut target, text);
                em.emit(id, prompt, &target)?;
            }
        }
        TaskType::PartQa => {
            if rec.qa.is_empty() {
                return Err(BuildError::MissingQa {
                    object: rec.id.clone(),
                });
            }
            for (qi, pair) in rec.qa.iter().enumerate() {
                let target = ground_answer(prep, &pair.answer);
                em.emit(qi, pair.question.clone(), &target)?;
            }
        }
        TaskType::Delete => {
            let by_name: Vec<usize> = (0..DELETE_BY_NAME_END).collect();
            let by_desc: Vec<usize> = (DELETE_BY_NAME_END..em.pool.len()).collect();
            for name in prep.distinct_names() {
                let mut target = vec![Token::DelStart];
                for (i, _) in prep.sorted_parts().filter(|(_, p)| p.q1 == name) {
                    target.extend(prep.box_tokens(i));
                }
                target.push(Token::DelEnd);
                let id = em.pick(&by_name);
                let prompt = templates::fill(em.pool[id], Some(name), None, None);
                em.emit(id, prompt, &target)?;
            }
            for (i, p) in prep.sorted_parts() {
                let mut target = vec![Token::DelStart];
                target.extend(prep.box_tokens(i));
                target.push(Token::DelEnd);
                let id = em.pick(&by_desc);
                let prompt = templates::fill(em.pool[id], None, Some(&p.q2), None);
                em.emit(id, prompt, &target)?;
            }
        }
        TaskType::Modify => {
            for (i, p) in prep.sorted_parts() {
                let new_text = match &p.new_description {
                    Some(d) => d.clone(),
                    None => replacement_description(prep, i, &mut em.rng),
                };
                let mut target = vec![Token::ModStart];
                target.extend(prep.box_tokens(i));
                push_words(&mut target, &new_text);
                target.push(Token::ModEnd);
                let id = em.pick_any();
                let prompt = templates::fill(em.pool[id], Some(&p.q1), None, Some(&new_text));
                em.emit(id, prompt, &target)?;
            }
        }
        TaskType::Add => {
            for (i, p) in prep.sorted_parts() {
                let mut target = vec![Token::AddStart];
                target.extend(prep.box_tokens(i));
                push_words(&mut target, &p.q2);
                target.push(Token::AddEnd);
                let id = em.pick(&templates::add_candidates(&p.q1));
                let prompt = templates::fill(em.pool[id], Some(&p.q1), None, None);
                em.emit(id, prompt, &target)?;
            }
        }
    }
    Ok(em.out)
}

/// Another part's description, preferring ones that differ from this part's
/// own; a lone part keeps its description.
fn replacement_description(prep: &Prepared<'_>, part: usize, rng: &mut ChaCha8Rng) -> String {
    let own = &prep.part(part).q2;
    let mut distinct: BTreeMap<&str, ()> = BTreeMap::new();
    for (i, p) in prep.sorted_parts() {
        if i != part && p.q2 != *own {
            distinct.insert(p.q2.as_str(), ());
        }
    }
    let options: Vec<&str> = distinct.into_keys().collect();
    options
        .choose(rng)
        .map_or_else(|| own.clone(), |s| s.to_string())
}

/// Answer tokens with every `<Part_i>` replaced by part i's box tokens.
fn ground_answer(prep: &Prepared<'_>, answer: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut last = 0;
    for cap in placeholder_regex().captures_iter(answer) {
        let m = cap.get(0).expect("whole match");
        push_words(&mut out, &answer[last..m.start()]);
        // Indices were range-checked by record validation.
        let index: usize = cap[1].parse().expect("validated placeholder");
        out.extend(prep.box_tokens(index));
        last = m.end();
    }
    push_words(&mut out, &answer[last..]);
    out
}
