//! Prompt pools, one per task type, shipped verbatim as data files.

use super::TaskType;

const TYPE_00: &str = include_str!("../../templates/type_00.txt");
const TYPE_01: &str = include_str!("../../templates/type_01.txt");
const TYPE_02: &str = include_str!("../../templates/type_02.txt");
const TYPE_03: &str = include_str!("../../templates/type_03.txt");
const TYPE_04: &str = include_str!("../../templates/type_04.txt");
const TYPE_05: &str = include_str!("../../templates/type_05.txt");
const TYPE_06: &str = include_str!("../../templates/type_06.txt");
const TYPE_08: &str = include_str!("../../templates/type_08.txt");
const TYPE_09: &str = include_str!("../../templates/type_09.txt");
const TYPE_10: &str = include_str!("../../templates/type_10.txt");

/// Deletion pool: entries before this index name the part, the rest
/// describe it.
pub const DELETE_BY_NAME_END: usize = 20;

/// Addition pool: entries from this index on are written for one specific
/// kind of part.
pub const ADD_GENERIC_END: usize = 30;

/// Part-specific addition templates: the keyword a part name must contain
/// and the pool index range of its templates.
pub const ADD_SPECIFIC: [(&str, std::ops::Range<usize>); 6] = [
    ("head", 30..33),
    ("wheel", 33..36),
    ("door", 36..39),
    ("handle", 39..42),
    ("leg", 42..45),
    ("wing", 45..48),
];

/// The prompt pool of a task type. Part QA has no pool (its prompts are the
/// record's own questions), so this is empty for it.
pub fn pool(task: TaskType) -> Vec<&'static str> {
    let raw = match task {
        TaskType::BoxListing => TYPE_00,
        TaskType::MultiPartCoarse => TYPE_01,
        TaskType::MultiPartFine => TYPE_02,
        TaskType::SinglePartFromName => TYPE_03,
        TaskType::SinglePartFromDescription => TYPE_04,
        TaskType::BoxToName => TYPE_05,
        TaskType::BoxToDescription => TYPE_06,
        TaskType::PartQa => "",
        TaskType::Delete => TYPE_08,
        TaskType::Modify => TYPE_09,
        TaskType::Add => TYPE_10,
    };
    raw.lines().filter(|l| !l.is_empty()).collect()
}

/// Indices of the addition templates usable for a part called `name`.
pub fn add_candidates(name: &str) -> Vec<usize> {
    let lower = name.to_lowercase();
    let words: Vec<&str> = lower
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect();
    let mut out: Vec<usize> = (0..ADD_GENERIC_END).collect();
    for (keyword, range) in ADD_SPECIFIC.iter() {
        let plural = format!("{keyword}s");
        if words.iter().any(|w| *w == *keyword || *w == plural) {
            out.extend(range.clone());
        }
    }
    out
}

/// Literal placeholder substitution.
pub fn fill(
    template: &str,
    name: Option<&str>,
    description: Option<&str>,
    new: Option<&str>,
) -> String {
    let mut s = template.to_string();
    if let Some(v) = name {
        s = s.replace("{part_name}", v);
    }
    if let Some(v) = description {
        s = s.replace("{part_description}", v);
    }
    if let Some(v) = new {
        s = s.replace("{new_description}", v);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_sizes() {
        let sizes: Vec<usize> = TaskType::ALL.iter().map(|&t| pool(t).len()).collect();
        assert_eq!(sizes, vec![20, 37, 35, 16, 16, 17, 17, 0, 40, 15, 48]);
    }

    #[test]
    fn placeholders_by_pool() {
        for t in &pool(TaskType::SinglePartFromName) {
            assert!(t.contains("{part_name}"));
        }
        for t in &pool(TaskType::SinglePartFromDescription) {
            assert!(t.contains("{part_description}"));
        }
        let del = pool(TaskType::Delete);
        assert!(del[..DELETE_BY_NAME_END]
            .iter()
            .all(|t| t.contains("{part_name}")));
        assert!(del[DELETE_BY_NAME_END..]
            .iter()
            .all(|t| t.contains("{part_description}")));
        let add = pool(TaskType::Add);
        assert!(add[..ADD_GENERIC_END]
            .iter()
            .all(|t| t.contains("{part_name}")));
        assert!(add[ADD_GENERIC_END..].iter().all(|t| !t.contains('{')));
    }

    #[test]
    fn specific_add_templates_follow_the_name() {
        assert_eq!(add_candidates("seat").len(), 30);
        let legs = add_candidates("Front Legs");
        assert_eq!(legs.len(), 33);
        assert!(legs.contains(&42));
        let add = pool(TaskType::Add);
        for (kw, range) in ADD_SPECIFIC.iter() {
            for i in range.clone() {
                assert!(add[i].to_lowercase().contains(kw), "{kw}: {}", add[i]);
            }
        }
    }

    #[test]
    fn fill_is_literal() {
        assert_eq!(
            fill(
                "Change the {part_name} into {new_description}",
                Some("leg"),
                None,
                Some("a {part_name}")
            ),
            "Change the leg into a {part_name}"
        );
    }
}
