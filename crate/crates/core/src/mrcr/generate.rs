//! Conversation assembly for multi-round co-reference resolution.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pool::WritingPool;
use crate::error::GenError;
use crate::instance::{instance_id, meta, ContextBucket, TaskInstance, TaskKind};
use crate::latent_list::generate::fit_to_target;
use crate::rng::RngStream;
use crate::tokenizer::Tokenizer;

pub const PREFIX_LEN: usize = 10;
const PREFIX_ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
const MAX_CONFOUNDERS: usize = 3;
const DISTINCT_RETRIES: usize = 20;

pub const EXAMPLES_HEADER: &str =
    "Here are some examples of conversations succeeded by a follow-up question answered correctly:";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WritingKey {
    pub topic: String,
    pub format: String,
    pub ordinal: Option<u32>,
}

pub fn ordinal_suffix(n: u32) -> &'static str {
    match (n % 10, n % 100) {
        (_, 11..=13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    }
}

impl fmt::Display for WritingKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.ordinal {
            write!(f, "{n}{} ", ordinal_suffix(n))?;
        }
        write!(f, "{} about {}", self.format, self.topic)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub topic: String,
    pub format: String,
    pub user: String,
    pub response: String,
}

impl Turn {
    fn matches(&self, key: &WritingKey) -> bool {
        self.topic == key.topic && self.format == key.format
    }

    fn overlaps(&self, key: &WritingKey) -> bool {
        self.topic == key.topic || self.format == key.format
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversation {
    pub turns: Vec<Turn>,
    pub needle_indices: Vec<usize>,
    pub key: WritingKey,
    pub random_prefix: String,
}

impl Conversation {
    /// Turn index addressed by `key`, or `None` when the key is missing or ambiguous.
    pub fn resolve(&self, key: &WritingKey) -> Option<usize> {
        resolve_key(&self.turns, key)
    }

    pub fn target(&self) -> Option<&Turn> {
        self.resolve(&self.key).map(|i| &self.turns[i])
    }

    /// Responses of turns sharing the topic or the format of the key.
    pub fn partial_matches(&self) -> impl Iterator<Item = &Turn> {
        self.turns.iter().filter(|t| t.overlaps(&self.key))
    }
}

pub fn resolve_key(turns: &[Turn], key: &WritingKey) -> Option<usize> {
    let hits: Vec<usize> = turns
        .iter()
        .enumerate()
        .filter(|(_, t)| t.matches(key))
        .map(|(i, _)| i)
        .collect();
    match key.ordinal {
        None if hits.len() == 1 => Some(hits[0]),
        None => None,
        Some(n) if hits.len() > 1 => hits.get((n as usize).checked_sub(1)?).copied(),
        Some(_) => None,
    }
}

pub fn user_request(topic: &str, format: &str) -> String {
    let article = match format.chars().next() {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    };
    format!("Write {article} {format} about {topic}.")
}

pub fn query_line(prefix: &str, key: &WritingKey) -> String {
    format!("Add the sentence {prefix} to the {key}.")
}

fn random_prefix(rng: &mut RngStream) -> String {
    (0..PREFIX_LEN)
        .map(|_| *PREFIX_ALPHABET.choose(rng).unwrap() as char)
        .collect()
}

fn push_turns(out: &mut String, turns: &[Turn]) {
    for t in turns {
        out.push_str("User: ");
        out.push_str(&t.user);
        out.push_str("\nModel: ");
        out.push_str(&t.response);
        out.push('\n');
    }
}

/// A fully worked example: two turns, a query and its answer.
#[derive(Debug, Clone)]
struct Example {
    turns: Vec<Turn>,
    key: WritingKey,
    prefix: String,
    answer: String,
}

fn render_prompt(examples: &[Example], conv: &[Turn], key: &WritingKey, prefix: &str) -> String {
    let mut out = String::with_capacity(
        conv.iter()
            .map(|t| t.response.len() + t.user.len() + 16)
            .sum::<usize>()
            + 4096,
    );
    out.push_str(EXAMPLES_HEADER);
    out.push('\n');
    for (k, ex) in examples.iter().enumerate() {
        out.push_str(&format!("======== EXAMPLE {} ========\n", k + 1));
        push_turns(&mut out, &ex.turns);
        out.push_str("User: ");
        out.push_str(&query_line(&ex.prefix, &ex.key));
        out.push_str("\nModel: ");
        out.push_str(&ex.prefix);
        out.push(' ');
        out.push_str(&ex.answer);
        out.push('\n');
    }
    out.push_str(&format!(
        "======== EXAMPLE {} ========\n",
        examples.len() + 1
    ));
    push_turns(&mut out, conv);
    out.push_str("User: ");
    out.push_str(&query_line(prefix, key));
    out.push_str("\nModel:");
    out
}

fn pick_other<'a>(rng: &mut RngStream, items: &'a [String], not: &str) -> &'a String {
    loop {
        let c = items.choose(rng).unwrap();
        if c != not {
            return c;
        }
    }
}

/// Produces texts while keeping every emitted response distinct.
struct DistinctWriter<'a> {
    pool: &'a dyn WritingPool,
    seen: HashSet<String>,
}

impl DistinctWriter<'_> {
    fn produce(&mut self, topic: &str, format: &str, rng: &RngStream) -> Result<String, GenError> {
        for attempt in 0..DISTINCT_RETRIES {
            let mut r = if attempt == 0 {
                rng.clone()
            } else {
                rng.child(&format!("retry{attempt}"))
            };
            let text = self.pool.produce(topic, format, &mut r)?;
            if self.seen.insert(text.clone()) {
                return Ok(text);
            }
        }
        Err(GenError::PoolExhausted(format!(
            "no distinct text for ({topic}, {format}) after {DISTINCT_RETRIES} attempts"
        )))
    }

    fn turn(&mut self, topic: &str, format: &str, rng: &RngStream) -> Result<Turn, GenError> {
        Ok(Turn {
            topic: topic.to_owned(),
            format: format.to_owned(),
            user: user_request(topic, format),
            response: self.produce(topic, format, rng)?,
        })
    }
}

fn sample_examples(
    rng: &RngStream,
    writer: &mut DistinctWriter,
    topics: &[String],
    formats: &[String],
) -> Result<Vec<Example>, GenError> {
    let mut out = Vec::new();
    for k in 0..2 {
        let r = rng.child(&format!("example{k}"));
        let mut pick = r.child("pick");
        let t0 = topics.choose(&mut pick).unwrap().clone();
        let f0 = formats.choose(&mut pick).unwrap().clone();
        let t1 = pick_other(&mut pick, topics, &t0).clone();
        let f1 = pick_other(&mut pick, formats, &f0).clone();
        let turns = vec![
            writer.turn(&t0, &f0, &r.child("turn0"))?,
            writer.turn(&t1, &f1, &r.child("turn1"))?,
        ];
        let which = pick.random_range(0..2);
        let key = WritingKey {
            topic: turns[which].topic.clone(),
            format: turns[which].format.clone(),
            ordinal: None,
        };
        let answer = turns[which].response.clone();
        out.push(Example {
            turns,
            key,
            prefix: random_prefix(&mut pick),
            answer,
        });
    }
    Ok(out)
}

fn config_fingerprint(
    rng: &RngStream,
    pool: &dyn WritingPool,
    complexity: u32,
    bucket: ContextBucket,
    target: usize,
    tok: &dyn Tokenizer,
) -> String {
    format!(
        "mrcr/v1|{}|{}|{}|{}|{}|{}|{}",
        rng.index(),
        rng.label(),
        pool.name(),
        complexity,
        bucket,
        target,
        tok.name()
    )
}

pub fn assemble_mrcr_instance(
    rng: &RngStream,
    pool: &dyn WritingPool,
    complexity: u32,
    bucket: ContextBucket,
    target_tokens: usize,
    tok: &dyn Tokenizer,
) -> Result<TaskInstance, GenError> {
    if !(1..=2).contains(&complexity) {
        return Err(GenError::InvalidConfig(format!(
            "mrcr complexity must be 1 or 2; got {complexity}"
        )));
    }
    if target_tokens == 0 || target_tokens > bucket.max_tokens() {
        return Err(GenError::InvalidConfig(format!(
            "target {target_tokens} outside bucket {bucket}"
        )));
    }
    let topics = pool.topics();
    let formats = pool.formats();
    if topics.len() < 2 || formats.len() < 2 {
        return Err(GenError::PoolExhausted(
            "pool needs at least two topics and two formats".into(),
        ));
    }
    let mut writer = DistinctWriter {
        pool,
        seen: HashSet::new(),
    };

    let mut krng = rng.child("key");
    let topic = topics.choose(&mut krng).unwrap().clone();
    let format = formats.choose(&mut krng).unwrap().clone();
    let ordinal = (complexity == 2).then(|| krng.random_range(1..=2u32));
    let key = WritingKey {
        topic: topic.clone(),
        format: format.clone(),
        ordinal,
    };

    // Needles first, then single-overlap confounders.
    let mut special = Vec::new();
    for i in 0..complexity as usize {
        special.push(writer.turn(&topic, &format, &rng.child(&format!("needle{i}")))?);
    }
    let n_conf = krng.random_range(1..=MAX_CONFOUNDERS);
    let mut conf_keys = HashSet::new();
    while conf_keys.len() < n_conf {
        let pair = if krng.random_bool(0.5) {
            (
                topic.clone(),
                pick_other(&mut krng, &formats, &format).clone(),
            )
        } else {
            (
                pick_other(&mut krng, &topics, &topic).clone(),
                format.clone(),
            )
        };
        if conf_keys.insert(pair.clone()) {
            let r = rng.child(&format!("confounder{}", conf_keys.len() - 1));
            special.push(writer.turn(&pair.0, &pair.1, &r)?);
        }
    }

    let examples = sample_examples(&rng.child("examples"), &mut writer, &topics, &formats)?;

    let mut distractors: Vec<Turn> = Vec::new();
    let mut failure: Option<GenError> = None;
    let placeholder = "#".repeat(PREFIX_LEN);
    let (turns, _, _) = fit_to_target(
        target_tokens,
        tok,
        |n| {
            while distractors.len() < n && failure.is_none() {
                let r = rng.child(&format!("distractor{}", distractors.len()));
                let mut pick = r.child("pick");
                let (t, f) = loop {
                    let t = topics.choose(&mut pick).unwrap();
                    let f = formats.choose(&mut pick).unwrap();
                    if *t != topic || *f != format {
                        break (t.clone(), f.clone());
                    }
                };
                match writer.turn(&t, &f, &r) {
                    Ok(turn) => distractors.push(turn),
                    Err(e) => failure = Some(e),
                }
            }
            let n = n.min(distractors.len());
            let turns = interleave(&mut rng.child("positions"), &distractors[..n], &special);
            let prompt = render_prompt(&examples, &turns, &key, &placeholder);
            (turns, prompt)
        },
        1.0 / 300.0,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }

    let target_idx = resolve_key(&turns, &key)
        .ok_or_else(|| GenError::Internal(format!("key {key} does not resolve uniquely")))?;
    let needles: Vec<usize> = (0..turns.len())
        .filter(|&i| turns[i].matches(&key))
        .collect();
    let confounders: Vec<usize> = (0..turns.len())
        .filter(|&i| turns[i].overlaps(&key) && !turns[i].matches(&key))
        .collect();

    let mut prng = rng.child("prefix");
    let mut prefix = random_prefix(&mut prng);
    let mut prompt = render_prompt(&examples, &turns, &key, &placeholder);
    while prompt.contains(&prefix) || examples.iter().any(|e| e.prefix == prefix) {
        prefix = random_prefix(&mut prng);
    }
    prompt = render_prompt(&examples, &turns, &key, &prefix);
    let tokens = tok.count(&prompt);

    let truth_body = turns[target_idx].response.clone();
    let ground_truth = format!("{prefix} {truth_body}");
    let join = |v: &[usize]| {
        v.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };

    let mut metadata = BTreeMap::new();
    metadata.insert(meta::MRCR_KEY.into(), key.to_string());
    metadata.insert(
        meta::MRCR_KEY_ARITY.into(),
        if ordinal.is_some() { "3" } else { "2" }.into(),
    );
    metadata.insert("topic".into(), topic);
    metadata.insert("format".into(), format);
    metadata.insert(
        "ordinal".into(),
        ordinal.map(|o| o.to_string()).unwrap_or_default(),
    );
    metadata.insert(meta::MRCR_PREFIX.into(), prefix);
    metadata.insert(meta::MRCR_NEEDLES.into(), join(&needles));
    metadata.insert("target_position".into(), target_idx.to_string());
    metadata.insert("confounder_positions".into(), join(&confounders));
    metadata.insert(
        meta::MRCR_CONVERSATION.into(),
        serde_json::to_string(&turns).map_err(|e| GenError::Internal(e.to_string()))?,
    );
    metadata.insert(meta::MRCR_TRUTH_BODY.into(), truth_body);
    metadata.insert(meta::MRCR_COUNTS_EXAMPLES.into(), "true".into());
    metadata.insert("pool".into(), pool.name().to_owned());
    metadata.insert(meta::PROMPT_TOKENS.into(), tokens.to_string());
    metadata.insert(meta::TOKENIZER.into(), tok.name().to_owned());

    let fingerprint = config_fingerprint(rng, pool, complexity, bucket, target_tokens, tok);
    Ok(TaskInstance {
        id: instance_id(TaskKind::Mrcr, rng.seed(), &fingerprint),
        kind: TaskKind::Mrcr,
        seed: rng.seed(),
        complexity,
        bucket,
        target_context_tokens: target_tokens,
        prompt,
        ground_truth,
        metadata,
    })
}

/// Places `special` turns at uniformly random positions among `distractors`.
fn interleave(rng: &mut RngStream, distractors: &[Turn], special: &[Turn]) -> Vec<Turn> {
    let total = distractors.len() + special.len();
    let mut slots: Vec<usize> = index::sample(rng, total, special.len()).into_vec();
    slots.sort_unstable();
    let mut order: Vec<usize> = (0..special.len()).collect();
    order.shuffle(rng);
    let mut out = Vec::with_capacity(total);
    let (mut d, mut s) = (0, 0);
    for pos in 0..total {
        if s < slots.len() && slots[s] == pos {
            out.push(special[order[s]].clone());
            s += 1;
        } else {
            out.push(distractors[d].clone());
            d += 1;
        }
    }
    out
}

/// Reads the conversation back from instance metadata.
pub fn conversation_from_instance(inst: &TaskInstance) -> Result<Conversation, GenError> {
    let missing =
        |k: &str| GenError::InvalidConfig(format!("instance {} lacks `{k}` metadata", inst.id));
    let turns: Vec<Turn> = serde_json::from_str(
        inst.meta(meta::MRCR_CONVERSATION)
            .ok_or_else(|| missing(meta::MRCR_CONVERSATION))?,
    )
    .map_err(|e| GenError::InvalidConfig(format!("instance {}: bad conversation: {e}", inst.id)))?;
    let topic = inst
        .meta("topic")
        .ok_or_else(|| missing("topic"))?
        .to_owned();
    let format = inst
        .meta("format")
        .ok_or_else(|| missing("format"))?
        .to_owned();
    let ordinal = match inst.meta("ordinal") {
        None | Some("") => None,
        Some(s) => Some(s.parse().map_err(|_| {
            GenError::InvalidConfig(format!("instance {}: bad ordinal {s:?}", inst.id))
        })?),
    };
    let key = WritingKey {
        topic,
        format,
        ordinal,
    };
    let needle_indices = (0..turns.len())
        .filter(|&i| turns[i].matches(&key))
        .collect();
    Ok(Conversation {
        turns,
        needle_indices,
        key,
        random_prefix: inst
            .meta(meta::MRCR_PREFIX)
            .ok_or_else(|| missing(meta::MRCR_PREFIX))?
            .to_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrcr::pool::TemplatedPool;
    use crate::rng::derive_rng;
    use crate::tokenizer::HeuristicTokenizer;

    fn gen(seed: u64, complexity: u32, target: usize) -> TaskInstance {
        let rng = derive_rng(seed, 0, "mrcr");
        assemble_mrcr_instance(
            &rng,
            &TemplatedPool::default(),
            complexity,
            ContextBucket::B32K,
            target,
            &HeuristicTokenizer,
        )
        .unwrap()
    }

    #[test]
    fn key_rendering() {
        let k = WritingKey {
            topic: "penguins".into(),
            format: "poem".into(),
            ordinal: Some(2),
        };
        assert_eq!(k.to_string(), "2nd poem about penguins");
        assert_eq!(
            query_line("AKJSs89sal", &k),
            "Add the sentence AKJSs89sal to the 2nd poem about penguins."
        );
        let k = WritingKey { ordinal: None, ..k };
        assert_eq!(k.to_string(), "poem about penguins");
        assert_eq!(
            user_request("foxes", "essay"),
            "Write an essay about foxes."
        );
        assert_eq!(ordinal_suffix(11), "th");
        assert_eq!(ordinal_suffix(23), "rd");
    }

    #[test]
    fn complexity_one_structure() {
        for seed in 0..10 {
            let inst = gen(seed, 1, 16_000);
            let conv = conversation_from_instance(&inst).unwrap();
            assert_eq!(conv.needle_indices.len(), 1);
            assert!(conv.key.ordinal.is_none());
            assert!(!inst.prompt.contains(" 1st ") && !inst.prompt.contains(" 2nd "));
            let target = conv.target().unwrap();
            assert_eq!(
                inst.ground_truth,
                format!("{} {}", conv.random_prefix, target.response)
            );
            let confounders = conv.partial_matches().count() - 1;
            assert!(confounders >= 1);
        }
    }

    #[test]
    fn complexity_two_has_doubly_confounding_pair() {
        for seed in 0..10 {
            let inst = gen(seed, 2, 16_000);
            let conv = conversation_from_instance(&inst).unwrap();
            assert_eq!(conv.needle_indices.len(), 2);
            let ord = conv.key.ordinal.unwrap();
            assert!(inst.prompt.ends_with(&format!("{}.\nModel:", conv.key)));
            assert_eq!(
                conv.resolve(&conv.key),
                Some(conv.needle_indices[ord as usize - 1])
            );

            // Swapping the two needle turns changes the answer.
            let mut swapped = conv.clone();
            let (a, b) = (conv.needle_indices[0], conv.needle_indices[1]);
            swapped.turns.swap(a, b);
            assert_ne!(
                swapped.target().unwrap().response,
                conv.target().unwrap().response
            );
        }
    }

    #[test]
    fn length_prefix_and_template() {
        let inst = gen(3, 1, 30_000);
        let tokens: usize = inst.meta(meta::PROMPT_TOKENS).unwrap().parse().unwrap();
        assert!((tokens as f64 - 30_000.0).abs() <= 3_000.0, "{tokens}");
        let prefix = inst.meta(meta::MRCR_PREFIX).unwrap();
        assert_eq!(prefix.len(), PREFIX_LEN);
        assert!(prefix.chars().all(|c| c.is_ascii_alphanumeric()));
        assert_eq!(inst.prompt.matches(prefix).count(), 1);
        assert!(inst.prompt.starts_with(EXAMPLES_HEADER));
        assert!(inst
            .prompt
            .contains("======== EXAMPLE 1 ========\nUser: Write "));
        assert!(inst.prompt.contains("======== EXAMPLE 3 ========\n"));
        assert!(inst.prompt.ends_with("\nModel:"));
    }

    #[test]
    fn deterministic() {
        assert_eq!(gen(9, 2, 8_000), gen(9, 2, 8_000));
        assert_ne!(gen(9, 2, 8_000).prompt, gen(10, 2, 8_000).prompt);
    }

    #[test]
    fn responses_pairwise_distinct() {
        let conv = conversation_from_instance(&gen(4, 2, 30_000)).unwrap();
        let set: HashSet<&str> = conv.turns.iter().map(|t| t.response.as_str()).collect();
        assert_eq!(set.len(), conv.turns.len());
    }

    #[test]
    fn rejects_bad_config() {
        let rng = derive_rng(0, 0, "mrcr");
        let pool = TemplatedPool::default();
        let tok = HeuristicTokenizer;
        assert!(matches!(
            assemble_mrcr_instance(&rng, &pool, 3, ContextBucket::B32K, 8000, &tok),
            Err(GenError::InvalidConfig(_))
        ));
        assert!(matches!(
            assemble_mrcr_instance(&rng, &pool, 1, ContextBucket::B32K, 100, &tok),
            Err(GenError::TargetTooSmall { .. })
        ));
    }
}
