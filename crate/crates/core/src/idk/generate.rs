//! IDK instance assembly.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::templates::{Category, StoryTemplate, BRANDS, ECHO_FIRST, ENTITY_NAMES, TEMPLATES};
use crate::error::GenError;
use crate::instance::{instance_id, meta, ContextBucket, TaskInstance, TaskKind};
use crate::latent_list::generate::fit_to_target;
use crate::rng::RngStream;
use crate::tokenizer::Tokenizer;

pub const ANSWERABLE_FRACTION: f64 = 0.3;
pub const IDK_CHOICE: &str = "I don't know";
pub const LETTERS: [char; 4] = ['A', 'B', 'C', 'D'];
const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdkOptions {
    /// Prepend two worked examples (one answerable, one not).
    pub few_shot: bool,
}

/// A concrete story with its question and choices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StorySpec {
    pub template: &'static str,
    pub story: String,
    pub question: String,
    /// A, B, C, D; D is always "I don't know".
    pub choices: [String; 4],
    /// `None` when the attribute is withheld.
    pub value: Option<String>,
    pub truth: char,
}

fn fill(text: &str, slots: &[(&str, &str)]) -> String {
    let mut out = text.to_owned();
    for (k, v) in slots {
        out = out.replace(&format!("{{{k}}}"), v);
    }
    out
}

fn draw_story(rng: &mut RngStream, template: &StoryTemplate, answerable: bool) -> StorySpec {
    let name = *ENTITY_NAMES.choose(rng).unwrap();
    let name2 = loop {
        let n = *ENTITY_NAMES.choose(rng).unwrap();
        if n != name {
            break n;
        }
    };
    let brands: Vec<&str> = BRANDS.choose_multiple(rng, 2).copied().collect();
    let num = rng.random_range(2..=12u32).to_string();
    let slots = [
        ("name", name),
        ("name2", name2),
        ("num", num.as_str()),
        ("brand", brands[0]),
        ("brand2", brands[1]),
    ];

    let picks: Vec<String> = if template.category == Category::EchoNames {
        // Echo the story's brand words as surnames, plus one plain name.
        let mut firsts = ECHO_FIRST.choose_multiple(rng, 3);
        let plain = *template.category.values().choose(rng).unwrap();
        let mut v = vec![plain.to_owned()];
        v.push(format!("{} {}", firsts.next().unwrap(), brands[0]));
        v.push(format!("{} {}", firsts.next().unwrap(), brands[1]));
        v
    } else {
        template
            .category
            .values()
            .choose_multiple(rng, 3)
            .map(|s| (*s).to_owned())
            .collect()
    };
    let value = answerable.then(|| picks[0].clone());

    let mut sentences: Vec<String> = template.setup.iter().map(|s| fill(s, &slots)).collect();
    if let Some(v) = &value {
        let mut with_value = slots.to_vec();
        with_value.push(("value", v));
        let at = rng.random_range(1..=sentences.len());
        sentences.insert(at, fill(template.fact, &with_value));
    }
    let mut abc = picks;
    abc.shuffle(rng);
    let truth = match &value {
        Some(v) => LETTERS[abc.iter().position(|c| c == v).unwrap()],
        None => 'D',
    };
    StorySpec {
        template: template.id,
        story: sentences.join(" "),
        question: fill(template.question, &slots),
        choices: [
            abc[0].clone(),
            abc[1].clone(),
            abc[2].clone(),
            IDK_CHOICE.to_owned(),
        ],
        value,
        truth,
    }
}

/// Withholding and presence checks against the full context text.
pub fn story_is_valid(spec: &StorySpec, context: &str) -> bool {
    match &spec.value {
        None => spec.choices[..3]
            .iter()
            .all(|c| !context.contains(c.as_str())),
        Some(v) => {
            context.matches(v.as_str()).count() == 1
                && spec.choices[..3]
                    .iter()
                    .filter(|c| *c != v)
                    .all(|c| !context.contains(c.as_str()))
        }
    }
}

pub fn sample_story(rng: &mut RngStream, answerable: bool) -> Result<StorySpec, GenError> {
    for _ in 0..MAX_ATTEMPTS {
        let template = TEMPLATES.choose(rng).unwrap();
        let spec = draw_story(rng, template, answerable);
        if story_is_valid(&spec, &spec.story) {
            return Ok(spec);
        }
    }
    Err(GenError::GenerationExhausted {
        what: "idk story".into(),
        attempts: MAX_ATTEMPTS,
    })
}

pub fn render_question(spec: &StorySpec) -> String {
    let mut out = format!("Question: {}\nChoices:\n", spec.question);
    for (letter, choice) in LETTERS.iter().zip(&spec.choices) {
        out.push_str(&format!("({letter}) {choice}\n"));
    }
    out.push_str("Answer:");
    out
}

/// Story, two spaces, then `letters` as space-separated capitals ending in a period.
pub fn render_context(spec: &StorySpec, letters: &[u8]) -> String {
    let mut out = String::with_capacity(spec.story.len() + letters.len() * 2 + 4);
    out.push_str(&spec.story);
    if !letters.is_empty() {
        out.push_str("  ");
        for (i, &l) in letters.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push(l as char);
        }
        out.push('.');
    }
    out
}

fn letter_stream(rng: &mut RngStream, n: usize, buf: &mut Vec<u8>) {
    while buf.len() < n {
        buf.push(b'A' + rng.random_range(0..26u8));
    }
}

fn few_shot_block(rng: &RngStream) -> Result<String, GenError> {
    let mut out = String::from("Here are some examples of questions answered correctly:\n\n");
    for (k, answerable) in [(0, false), (1, true)] {
        let mut r = rng.child(&format!("example{k}"));
        let spec = sample_story(&mut r, answerable)?;
        let mut letters = Vec::new();
        letter_stream(&mut r, 40, &mut letters);
        let idx = LETTERS.iter().position(|&l| l == spec.truth).unwrap();
        out.push_str(&render_context(&spec, &letters));
        out.push('\n');
        out.push_str(&render_question(&spec));
        out.push_str(&format!(" ({}) {}\n\n", spec.truth, spec.choices[idx]));
    }
    Ok(out)
}

pub fn assemble_idk_instance(
    rng: &RngStream,
    answerable: bool,
    bucket: ContextBucket,
    target_tokens: usize,
    tok: &dyn Tokenizer,
) -> Result<TaskInstance, GenError> {
    assemble_idk_instance_with(
        rng,
        answerable,
        bucket,
        target_tokens,
        tok,
        &IdkOptions::default(),
    )
}

/// Draws answerability with the default 30% answerable mix.
pub fn sample_answerable(rng: &RngStream) -> bool {
    rng.child("answerable").random_bool(ANSWERABLE_FRACTION)
}

pub fn assemble_idk_instance_with(
    rng: &RngStream,
    answerable: bool,
    bucket: ContextBucket,
    target_tokens: usize,
    tok: &dyn Tokenizer,
    opts: &IdkOptions,
) -> Result<TaskInstance, GenError> {
    if target_tokens == 0 || target_tokens > bucket.max_tokens() {
        return Err(GenError::InvalidConfig(format!(
            "target {target_tokens} outside bucket {bucket}"
        )));
    }
    let spec = sample_story(&mut rng.child("story"), answerable)?;
    let examples = if opts.few_shot {
        few_shot_block(&rng.child("examples"))?
    } else {
        String::new()
    };
    let question = render_question(&spec);

    let mut filler_rng = rng.child("filler");
    let mut letters = Vec::new();
    let (context, prompt, tokens) = fit_to_target(
        target_tokens,
        tok,
        |n| {
            letter_stream(&mut filler_rng, n, &mut letters);
            let context = format!("{examples}{}", render_context(&spec, &letters[..n]));
            let prompt = format!("{context}\n{question}");
            (context, prompt)
        },
        2.0,
    )?;
    if !story_is_valid(&spec, &context) {
        return Err(GenError::Internal(format!(
            "template {} leaks a choice into the context",
            spec.template
        )));
    }

    let mut metadata = BTreeMap::new();
    metadata.insert(meta::IDK_ANSWERABLE.into(), answerable.to_string());
    metadata.insert(
        meta::IDK_CHOICES.into(),
        serde_json::to_string(&spec.choices).map_err(|e| GenError::Internal(e.to_string()))?,
    );
    metadata.insert(meta::IDK_TEMPLATE.into(), spec.template.to_owned());
    metadata.insert("question".into(), spec.question.clone());
    metadata.insert("few_shot".into(), opts.few_shot.to_string());
    if let Some(v) = &spec.value {
        metadata.insert("value".into(), v.clone());
    }
    metadata.insert(meta::PROMPT_TOKENS.into(), tokens.to_string());
    metadata.insert(meta::TOKENIZER.into(), tok.name().to_owned());

    let fingerprint = format!(
        "idk/v1|{}|{}|{}|{}|{}|{}|{}",
        rng.index(),
        rng.label(),
        answerable,
        bucket,
        target_tokens,
        tok.name(),
        opts.few_shot
    );
    Ok(TaskInstance {
        id: instance_id(TaskKind::Idk, rng.seed(), &fingerprint),
        kind: TaskKind::Idk,
        seed: rng.seed(),
        complexity: answerable as u32,
        bucket,
        target_context_tokens: target_tokens,
        prompt,
        ground_truth: spec.truth.to_string(),
        metadata,
    })
}

/// Choice texts A-D stored on an instance.
pub fn choices_from_instance(inst: &TaskInstance) -> Result<[String; 4], GenError> {
    let raw = inst.meta(meta::IDK_CHOICES).ok_or_else(|| {
        GenError::InvalidConfig(format!("instance {} lacks `choices` metadata", inst.id))
    })?;
    serde_json::from_str(raw)
        .map_err(|e| GenError::InvalidConfig(format!("instance {}: bad choices: {e}", inst.id)))
}
