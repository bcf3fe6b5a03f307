use serde::Serialize;

use super::{InstructionSample, TaskType};

/// One row of the per-task size table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskStats {
    pub task_type: TaskType,
    pub name: &'static str,
    pub raw: usize,
    /// Share of all raw samples, in percent.
    pub share: f64,
    #[serde(rename = "final")]
    pub final_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub tasks: Vec<TaskStats>,
    pub total_raw: usize,
    pub total_final: usize,
}

impl CorpusStats {
    pub fn compute(raw: &[InstructionSample], balanced: &[InstructionSample]) -> Self {
        let mut raw_counts = [0usize; 11];
        let mut final_counts = [0usize; 11];
        for s in raw {
            raw_counts[s.task_type.index()] += 1;
        }
        for s in balanced {
            final_counts[s.task_type.index()] += 1;
        }
        let total_raw = raw.len();
        let tasks = TaskType::ALL
            .iter()
            .map(|&t| TaskStats {
                task_type: t,
                name: t.name(),
                raw: raw_counts[t.index()],
                share: if total_raw == 0 {
                    0.0
                } else {
                    100.0 * raw_counts[t.index()] as f64 / total_raw as f64
                },
                final_count: final_counts[t.index()],
            })
            .collect();
        Self {
            tasks,
            total_raw,
            total_final: balanced.len(),
        }
    }
}
