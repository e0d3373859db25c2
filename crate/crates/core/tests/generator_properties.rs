mod common;

use std::time::Instant;

use common::check_latent_list_instance;
use lsq_core::idk::{
    assemble_idk_instance, choices_from_instance, sample_answerable, IdkOptions, IDK_CHOICE,
};
use lsq_core::instance::meta;
use lsq_core::mrcr::{conversation_from_instance, TemplatedPool};
use lsq_core::suite::{generate_one, instance_stream, GenContext};
use lsq_core::{ContextBucket, HeuristicTokenizer, TaskKind, Tokenizer};

fn ctx(pool: &TemplatedPool) -> GenContext<'_> {
    GenContext {
        seed: 11,
        tokenizer: &HeuristicTokenizer,
        pool,
        min_tokens: 8192,
        idk: IdkOptions::default(),
    }
}

#[test]
fn latent_list_filler_and_relevance() {
    let pool = TemplatedPool::default();
    let ctx = ctx(&pool);
    let started = Instant::now();
    for i in 0..1_000 {
        let inst = generate_one(&ctx, TaskKind::LatentList, ContextBucket::B32K, i).unwrap();
        check_latent_list_instance(&inst).unwrap();
        let tokens = inst.prompt_tokens().unwrap();
        assert_eq!(tokens, HeuristicTokenizer.count(&inst.prompt));
        assert!(
            (tokens as f64 - inst.target_context_tokens as f64).abs()
                <= 0.1 * inst.target_context_tokens as f64
        );
        assert!(tokens <= ContextBucket::B32K.max_tokens());
    }
    assert!(started.elapsed().as_secs() < 120);
}

#[test]
fn idk_withholding_and_answerable_fraction() {
    let tok = HeuristicTokenizer;
    let n = 10_000;
    let mut unanswerable = 0;
    for i in 0..n {
        let rng = instance_stream(3, TaskKind::Idk, ContextBucket::B32K, i);
        let answerable = sample_answerable(&rng);
        let inst = assemble_idk_instance(&rng, answerable, ContextBucket::B32K, 600, &tok).unwrap();
        let choices = choices_from_instance(&inst).unwrap();
        assert_eq!(choices.len(), 4);
        assert_eq!(choices[3], IDK_CHOICE);
        let context = &inst.prompt[..inst.prompt.rfind("\nQuestion:").unwrap()];
        if answerable {
            let value = inst.meta("value").unwrap();
            assert_eq!(context.matches(value).count(), 1, "{}", inst.id);
            assert_ne!(inst.ground_truth, "D");
        } else {
            unanswerable += 1;
            for c in &choices[..3] {
                assert!(!context.contains(c.as_str()), "{} leaks {c:?}", inst.id);
            }
            assert_eq!(inst.ground_truth, "D");
            assert_eq!(inst.meta(meta::IDK_ANSWERABLE), Some("false"));
        }
    }
    let p = unanswerable as f64 / n as f64;
    let sigma = (0.7f64 * 0.3 / n as f64).sqrt();
    assert!((p - 0.7).abs() <= 3.0 * sigma, "unanswerable fraction {p}");
}

#[test]
fn mrcr_needle_structure() {
    let pool = TemplatedPool::default();
    let ctx = ctx(&pool);
    for i in 0..100 {
        let inst = generate_one(&ctx, TaskKind::Mrcr, ContextBucket::B32K, i).unwrap();
        let conv = conversation_from_instance(&inst).unwrap();
        let prefix = inst.meta(meta::MRCR_PREFIX).unwrap();
        assert_eq!(prefix.len(), 10);
        assert!(inst.ground_truth.starts_with(prefix));
        let body = inst.meta(meta::MRCR_TRUTH_BODY).unwrap();
        assert_eq!(inst.ground_truth, format!("{prefix} {body}"));
        // The body is the addressed needle's response and nothing else.
        let target = conv.resolve(&conv.key).unwrap();
        assert_eq!(conv.turns[target].response, body);
        let needles = &conv.needle_indices;
        assert!(needles.contains(&target));
        let key = &conv.key;
        for &k in needles {
            assert_eq!(
                (&conv.turns[k].topic, &conv.turns[k].format),
                (&key.topic, &key.format)
            );
        }
        let same_key = conv
            .turns
            .iter()
            .filter(|t| t.topic == key.topic && t.format == key.format)
            .count();
        assert_eq!(same_key, needles.len());
        // The prefix appears once, in the final query turn.
        assert_eq!(inst.prompt.matches(prefix).count(), 1, "{}", inst.id);
        let last_user = &inst.prompt[inst.prompt.rfind("User: ").unwrap()..];
        assert!(last_user.contains(&format!("Add the sentence {prefix} to the {key}.")));
        assert!(inst.prompt.ends_with("\nModel:"));
    }
}
