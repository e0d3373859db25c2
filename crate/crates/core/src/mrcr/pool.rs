//! Writing pools: sources of model responses for a (topic, format) request.

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::GenError;
use crate::harness::{GenParams, GenRequest, ModelClient};
use crate::rng::RngStream;
use crate::tokenizer::{HeuristicTokenizer, Tokenizer};

/// Produces writing for a requested topic and format.
///
/// `Templated` pools are pure functions of the stream state.
pub trait WritingPool: Send + Sync {
    fn name(&self) -> &str;
    fn topics(&self) -> Vec<String>;
    fn formats(&self) -> Vec<String>;
    fn produce(&self, topic: &str, format: &str, rng: &mut RngStream) -> Result<String, GenError>;
}

struct Topic {
    name: &'static str,
    nouns: [&'static str; 6],
    place: &'static str,
}

const fn t(name: &'static str, nouns: [&'static str; 6], place: &'static str) -> Topic {
    Topic { name, nouns, place }
}

const TOPICS: [Topic; 30] = [
    t(
        "penguins",
        ["flipper", "krill", "colony", "ice floe", "chick", "tuxedo"],
        "the Antarctic shelf",
    ),
    t(
        "flamingos",
        ["feather", "lagoon", "shrimp", "flock", "stilt", "sunset"],
        "the salt flats",
    ),
    t(
        "ducks",
        ["pond", "bill", "duckling", "reed", "puddle", "quack"],
        "the village pond",
    ),
    t(
        "basketball",
        ["hoop", "rebound", "court", "dribble", "buzzer", "jersey"],
        "the downtown arena",
    ),
    t(
        "complexity theory",
        [
            "reduction",
            "oracle",
            "polynomial",
            "circuit",
            "proof",
            "lower bound",
        ],
        "the theory seminar",
    ),
    t(
        "Star Wars",
        [
            "lightsaber",
            "droid",
            "starship",
            "rebel",
            "empire",
            "hyperdrive",
        ],
        "a galaxy far away",
    ),
    t(
        "volcanoes",
        [
            "magma",
            "crater",
            "ash cloud",
            "lava flow",
            "caldera",
            "eruption",
        ],
        "the island rim",
    ),
    t(
        "coffee",
        ["espresso", "bean", "roaster", "crema", "mug", "barista"],
        "the corner cafe",
    ),
    t(
        "lighthouses",
        ["beacon", "keeper", "lens", "fog horn", "cliff", "storm"],
        "the rocky coast",
    ),
    t(
        "honeybees",
        ["hive", "nectar", "queen", "comb", "pollen", "swarm"],
        "the clover meadow",
    ),
    t(
        "chess",
        ["bishop", "gambit", "endgame", "pawn", "checkmate", "clock"],
        "the club hall",
    ),
    t(
        "autumn leaves",
        ["maple", "rake", "breeze", "branch", "harvest", "bonfire"],
        "the old orchard",
    ),
    t(
        "trains",
        [
            "locomotive",
            "platform",
            "whistle",
            "caboose",
            "timetable",
            "track",
        ],
        "the central station",
    ),
    t(
        "the ocean",
        ["tide", "wave", "coral", "current", "horizon", "whale"],
        "the open sea",
    ),
    t(
        "robots",
        ["circuit", "servo", "sensor", "algorithm", "battery", "gear"],
        "the research lab",
    ),
    t(
        "gardening",
        [
            "trowel",
            "seedling",
            "compost",
            "tomato",
            "soil",
            "watering can",
        ],
        "the backyard plot",
    ),
    t(
        "thunderstorms",
        [
            "lightning",
            "cloudburst",
            "downpour",
            "gust",
            "rumble",
            "radar",
        ],
        "the wide prairie",
    ),
    t(
        "libraries",
        [
            "bookshelf",
            "librarian",
            "catalog",
            "reading lamp",
            "archive",
            "novel",
        ],
        "the public library",
    ),
    t(
        "mountains",
        [
            "summit",
            "glacier",
            "ridge",
            "switchback",
            "avalanche",
            "peak",
        ],
        "the high range",
    ),
    t(
        "jazz",
        [
            "saxophone",
            "improvisation",
            "bassline",
            "trumpet",
            "swing",
            "solo",
        ],
        "the smoky club",
    ),
    t(
        "owls",
        ["talon", "hoot", "barn", "moonlight", "feather", "midnight"],
        "the pine forest",
    ),
    t(
        "bicycles",
        ["pedal", "chain", "handlebar", "spoke", "saddle", "helmet"],
        "the river path",
    ),
    t(
        "deserts",
        ["dune", "cactus", "mirage", "oasis", "sandstorm", "camel"],
        "the endless sands",
    ),
    t(
        "space exploration",
        [
            "rocket",
            "orbit",
            "astronaut",
            "capsule",
            "launchpad",
            "telescope",
        ],
        "mission control",
    ),
    t(
        "bread baking",
        ["dough", "oven", "crust", "yeast", "flour", "loaf"],
        "the village bakery",
    ),
    t(
        "foxes",
        ["den", "tail", "kit", "burrow", "hedge", "pounce"],
        "the frosty field",
    ),
    t(
        "origami",
        [
            "crane",
            "crease",
            "fold",
            "paper square",
            "valley fold",
            "lantern",
        ],
        "the quiet studio",
    ),
    t(
        "rainforests",
        ["canopy", "vine", "frog", "orchid", "jaguar", "mist"],
        "the Amazon basin",
    ),
    t(
        "snowflakes",
        ["crystal", "frost", "blizzard", "sled", "mitten", "drift"],
        "the silent valley",
    ),
    t(
        "pirates",
        ["treasure", "parrot", "galleon", "compass", "plank", "map"],
        "the Caribbean",
    ),
];

const ADJECTIVES: [&str; 40] = [
    "gentle",
    "restless",
    "silver",
    "ancient",
    "bright",
    "quiet",
    "curious",
    "golden",
    "fearless",
    "humble",
    "wild",
    "patient",
    "shimmering",
    "stubborn",
    "tender",
    "luminous",
    "weathered",
    "playful",
    "solemn",
    "vivid",
    "hidden",
    "proud",
    "dazzling",
    "lonely",
    "steady",
    "whimsical",
    "rugged",
    "faithful",
    "sleepy",
    "radiant",
    "mysterious",
    "brave",
    "graceful",
    "tireless",
    "fragile",
    "bold",
    "wistful",
    "joyful",
    "distant",
    "noble",
];

const VERBS: [&str; 24] = [
    "wander", "gleam", "linger", "rise", "drift", "gather", "whisper", "sparkle", "tremble",
    "endure", "dance", "travel", "glow", "rest", "shine", "return", "hum", "ripple", "soar",
    "wait", "dream", "bloom", "listen", "remember",
];

const NAMES: [&str; 24] = [
    "Alice", "Bernard", "Chloe", "Dmitri", "Elena", "Farah", "Gustav", "Hana", "Ingrid", "Jamal",
    "Keiko", "Lorenzo", "Maya", "Nikolai", "Olivia", "Pedro", "Quinn", "Rosa", "Samir", "Tessa",
    "Umar", "Vera", "Wendell", "Yusuf",
];

struct Format {
    name: &'static str,
    openings: &'static [&'static str],
    body: &'static [&'static str],
    closings: &'static [&'static str],
    /// Sentences per paragraph or stanza.
    group: usize,
    /// Sentences in a group are joined by newlines instead of spaces.
    lines: bool,
}

const FORMATS: [Format; 8] = [
    Format {
        name: "poem",
        openings: &["Ode to {Topic}", "A Song of {Topic}", "{Adj} {Topic}", "Verses for the {n1}"],
        body: &[
            "O {adj} {n1}, you {verb} beneath the sky,",
            "the {n2} remembers what the {n3} forgot,",
            "and {topic} {verb} where {adj} echoes lie,",
            "in {place} the {adj} hours are caught.",
            "I sing of {n1} and of {adj2} {n2},",
            "your {n3} a lantern in the {adj} night,",
            "{Topic}, {topic}, how you {verb} and {verb2},",
            "each {n2} a promise, {adj} and slight.",
            "Warm and {adj}, the {n1} holds its breath,",
            "while over {place} the {n3} turns to gold,",
            "no {adj2} wind could tell of {n2}'s depth,",
            "nor any story that the {n1} has told.",
            "Let {number} {n2}s {verb} upon the shore,",
            "let {topic} {verb2} forevermore.",
        ],
        closings: &["And so, {topic}, I {verb} with you still.", "Farewell, {adj} {n1}, until the dawn."],
        group: 4,
        lines: true,
    },
    Format {
        name: "riddle",
        openings: &["Riddle me this, friend of {topic}:", "Here is a riddle about {topic}:", "Solve this puzzle if you can:"],
        body: &[
            "I have a {n1} but never {verb}.",
            "You will find me near {place}, yet I am never lost.",
            "I am {adj} in the morning and {adj2} by night.",
            "What carries a {n2} and a {n3} but owns neither?",
            "My first clue is a {n1}; my second clue is {number} {n2}s.",
            "I {verb} without moving and {verb2} without a sound.",
            "The more you take of my {n3}, the more you leave behind.",
            "Some call me {adj}, others call me {adj2}.",
            "I live where the {n2} lives, but I am not the {n2}.",
            "Count my {n1}s and you will never reach {number}.",
            "When the {n3} is {adj}, I am nowhere to be seen.",
            "Speak my name and the {n1} will {verb}.",
        ],
        closings: &["What am I? The answer is hidden in {topic}.", "Answer: a {adj} {n1} of {topic}."],
        group: 3,
        lines: true,
    },
    Format {
        name: "essay",
        openings: &["An Essay on {Topic}", "Reflections on {Topic}", "{Topic}: A {Adj} Inquiry"],
        body: &[
            "Few subjects reward careful study as much as {topic}, and the {n1} is a fine place to begin.",
            "Historically, the {n2} has been understood as {adj}, though recent work suggests otherwise.",
            "Consider the {n3}: it is at once {adj} and {adj2}, a paradox worth examining.",
            "Critics argue that {topic} merely {verb}s, yet the evidence from {place} tells a richer story.",
            "In {number} documented cases, the {n1} proved decisive.",
            "This raises a broader question about how we {verb} and how we {verb2}.",
            "One must also weigh the role of the {n2}, which is too often overlooked.",
            "It follows that any account of {topic} must address the {adj} nature of the {n3}.",
            "Moreover, the relationship between the {n1} and the {n2} is far from simple.",
            "Scholars in {place} have long debated this point without consensus.",
            "The {adj} reader will notice how the {n3} shapes every later development.",
            "Ultimately, the study of {topic} teaches us to {verb} with patience.",
        ],
        closings: &["In conclusion, {topic} remains {adj}, and that is precisely its value.", "Thus the {n1} endures as a {adj} subject for inquiry."],
        group: 4,
        lines: false,
    },
    Format {
        name: "email",
        openings: &["Subject: {Adj} news about {topic}\n\nDear {name},", "Subject: Quick update on the {n1}\n\nHi {name},", "Subject: {Topic} plans\n\nHello {name},"],
        body: &[
            "Hope this email finds you well.",
            "I wanted to follow up on our conversation about {topic}.",
            "The {n1} arrived yesterday and it looks {adj}.",
            "Could you confirm whether the {n2} will be ready by Friday?",
            "We counted {number} {n3}s at {place}, which is more than expected.",
            "Let me know if you would like to {verb} together next week.",
            "I have attached a short note about the {adj2} {n2}.",
            "The team thinks we should {verb} before we {verb2}.",
            "Please keep this between us until the {n1} is settled.",
            "Thanks again for your help with the {n3}.",
            "If anything changes at {place}, I will write right away.",
            "{Topic} has been on my mind all week.",
        ],
        closings: &["Best regards,\n{name2}", "Warmly,\n{name2}", "Talk soon,\n{name2}"],
        group: 3,
        lines: false,
    },
    Format {
        name: "play",
        openings: &["[Enter stage right.] Narrator: Long ago, near {place}, there lived {topic}.", "[The curtain rises on {place}.] Narrator: Our tale concerns {topic}."],
        body: &[
            "{NAME}: Look at that {adj} {n1}!",
            "{NAME2}: I see it, but where is the {n2}?",
            "[A {n3} falls from the rafters.]",
            "{NAME}: We must {verb} before nightfall.",
            "{NAME2}: {Topic} will never forgive us.",
            "Narrator: And so the {adj} companions set out for {place}.",
            "{NAME}: Count them, {number} {n2}s in all.",
            "[Thunder. The {n1} glows {adj2}.]",
            "{NAME2}: Do you hear the {n3} {verb}?",
            "{NAME}: Only the {adj} wind, my friend.",
            "Narrator: Nobody in {place} had seen such a {n1}.",
            "[Exit {NAME2}, pursued by a {n2}.]",
        ],
        closings: &["[Curtain falls.]", "Narrator: And that is how {topic} came to {verb}. [Exeunt.]"],
        group: 3,
        lines: true,
    },
    Format {
        name: "story",
        openings: &["Once upon a time, near {place}, {topic} were the talk of every village.", "It began on a {adj} morning, when {name} first noticed the {n1}."],
        body: &[
            "{Name} had always wanted to {verb} beside the {n1}.",
            "Nobody believed that a {adj} {n2} could change anything.",
            "By noon, {number} travelers had gathered at {place}.",
            "The {n3} trembled, and the crowd fell silent.",
            "{Name} whispered a promise to the {adj2} {n1}.",
            "Years later, people would still talk about that day.",
            "The old stories said that {topic} would {verb} when the {n2} returned.",
            "A {adj} stranger arrived carrying a {n3}.",
            "Together they decided to {verb2} until sunrise.",
            "Somewhere in the distance, a {n1} began to {verb}.",
            "It was not the ending anyone expected.",
            "{Name} smiled, for the {n2} was finally home.",
        ],
        closings: &["And they lived, {adj} and unafraid, ever after.", "The end, or perhaps only the beginning."],
        group: 4,
        lines: false,
    },
    Format {
        name: "speech",
        openings: &["Ladies and gentlemen, thank you for coming to talk about {topic}.", "Friends, colleagues, honored guests of {place}, welcome."],
        body: &[
            "We gather today because the {n1} matters.",
            "For {number} years we have watched {topic} {verb} and {verb2}.",
            "Some say the {n2} is {adj}; I say it is our future.",
            "Let us not forget those who stood at {place} before us.",
            "I ask each of you to {verb} with courage.",
            "The {n3} does not belong to one of us; it belongs to all of us.",
            "When history looks back, let it find us {adj} and {adj2}.",
            "We will not rest until every {n1} is honored.",
            "Together, we can make {place} a {adj} home again.",
            "This is our moment, and {topic} is our cause.",
            "Stand with me, and let the {n2} {verb}.",
            "I believe in the {adj} spirit of this community.",
        ],
        closings: &["Thank you, and may {topic} {verb} forever.", "Thank you all. Now let us get to work."],
        group: 4,
        lines: false,
    },
    Format {
        name: "recipe",
        openings: &["{Adj} {Topic} Recipe\n\nIngredients:", "Recipe: {Topic}-Inspired Supper\n\nIngredients:"],
        body: &[
            "- {number} cups of {adj} {n1} crumbs",
            "- one {n2}, finely chopped",
            "- a pinch of {adj2} salt from {place}",
            "Step: Preheat the oven and let the {n3} {verb}.",
            "Step: Whisk the {n1} until it looks {adj}.",
            "Step: Fold in the {n2} gently; do not let it {verb2}.",
            "- {number} tablespoons of {topic} syrup",
            "Step: Bake for {number} minutes, until golden.",
            "Tip: A {adj} {n3} makes a fine garnish.",
            "Step: Rest the dish beside the {n1} before serving.",
            "- a handful of {adj} {n3} leaves",
            "Tip: Serve warm, with a story about {topic}.",
        ],
        closings: &["Serves {number}. Enjoy!", "Bon appetit from {place}!"],
        group: 3,
        lines: true,
    },
];

/// Seeded combinatorial writer over 30 topics and 8 formats.
#[derive(Debug, Clone)]
pub struct TemplatedPool {
    min_tokens: usize,
    max_tokens: usize,
}

impl Default for TemplatedPool {
    fn default() -> Self {
        TemplatedPool {
            min_tokens: 150,
            max_tokens: 450,
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

impl TemplatedPool {
    pub fn with_length(min_tokens: usize, max_tokens: usize) -> Self {
        TemplatedPool {
            min_tokens,
            max_tokens: max_tokens.max(min_tokens),
        }
    }

    fn fill(template: &str, topic: &Topic, rng: &mut RngStream, name: &str, name2: &str) -> String {
        let mut out = String::with_capacity(template.len() + 32);
        let mut rest = template;
        while let Some(open) = rest.find('{') {
            out.push_str(&rest[..open]);
            let close = open + rest[open..].find('}').expect("balanced template");
            let slot = &rest[open + 1..close];
            let value = match slot {
                "topic" => topic.name.to_owned(),
                "Topic" => capitalize(topic.name),
                "n1" | "n2" | "n3" => (*topic.nouns.choose(rng).unwrap()).to_owned(),
                "place" => topic.place.to_owned(),
                "adj" | "adj2" => (*ADJECTIVES.choose(rng).unwrap()).to_owned(),
                "Adj" => capitalize(ADJECTIVES.choose(rng).unwrap()),
                "verb" | "verb2" => (*VERBS.choose(rng).unwrap()).to_owned(),
                "number" => rng.random_range(2..100u32).to_string(),
                "name" | "Name" => name.to_owned(),
                "name2" => name2.to_owned(),
                "NAME" => name.to_uppercase(),
                "NAME2" => name2.to_uppercase(),
                other => panic!("unknown template slot {other}"),
            };
            out.push_str(&value);
            rest = &rest[close + 1..];
        }
        out.push_str(rest);
        out
    }
}

impl WritingPool for TemplatedPool {
    fn name(&self) -> &str {
        "templated"
    }

    fn topics(&self) -> Vec<String> {
        TOPICS.iter().map(|t| t.name.to_owned()).collect()
    }

    fn formats(&self) -> Vec<String> {
        FORMATS.iter().map(|f| f.name.to_owned()).collect()
    }

    fn produce(&self, topic: &str, format: &str, rng: &mut RngStream) -> Result<String, GenError> {
        let topic = TOPICS
            .iter()
            .find(|t| t.name == topic)
            .ok_or_else(|| GenError::PoolExhausted(format!("unknown topic {topic:?}")))?;
        let format = FORMATS
            .iter()
            .find(|f| f.name == format)
            .ok_or_else(|| GenError::PoolExhausted(format!("unknown format {format:?}")))?;
        let tok = HeuristicTokenizer;
        let budget = rng.random_range(self.min_tokens..=self.max_tokens);
        let name = *NAMES.choose(rng).unwrap();
        let name2 = loop {
            let n = *NAMES.choose(rng).unwrap();
            if n != name {
                break n;
            }
        };
        let mut text = Self::fill(
            format.openings.choose(rng).unwrap(),
            topic,
            rng,
            name,
            name2,
        );
        text.push_str("\n\n");
        let closing = Self::fill(
            format.closings.choose(rng).unwrap(),
            topic,
            rng,
            name,
            name2,
        );
        let mut in_group = 0;
        let sep = if format.lines { "\n" } else { " " };
        while tok.count(&text) + tok.count(&closing) < budget {
            if in_group == format.group {
                text.push_str("\n\n");
                in_group = 0;
            } else if in_group > 0 {
                text.push_str(sep);
            }
            text.push_str(&Self::fill(
                format.body.choose(rng).unwrap(),
                topic,
                rng,
                name,
                name2,
            ));
            in_group += 1;
        }
        text.push_str("\n\n");
        text.push_str(&closing);
        Ok(text)
    }
}

/// Shared handle to a pool.
pub type SharedPool = Arc<dyn WritingPool>;

/// Requests each text from a model, as the original data collection did.
pub struct ExternalPool {
    client: Arc<dyn ModelClient>,
    topics: Vec<String>,
    formats: Vec<String>,
    params: GenParams,
}

impl ExternalPool {
    pub fn new(client: Arc<dyn ModelClient>, topics: Vec<String>, formats: Vec<String>) -> Self {
        let params = GenParams {
            max_output_tokens: 512,
            temperature: 1.0,
            stop: Vec::new(),
        };
        ExternalPool {
            client,
            topics,
            formats,
            params,
        }
    }

    /// Uses the templated pool's topic and format lists.
    pub fn with_default_keys(client: Arc<dyn ModelClient>) -> Self {
        let t = TemplatedPool::default();
        Self::new(client, t.topics(), t.formats())
    }
}

impl WritingPool for ExternalPool {
    fn name(&self) -> &str {
        "external"
    }

    fn topics(&self) -> Vec<String> {
        self.topics.clone()
    }

    fn formats(&self) -> Vec<String> {
        self.formats.clone()
    }

    fn produce(&self, topic: &str, format: &str, rng: &mut RngStream) -> Result<String, GenError> {
        // The draft number only nudges sampling apart on retries.
        let draft: u16 = rng.random();
        let prompt = format!(
            "{} Keep it under 400 words. (Draft {draft}.)",
            super::generate::user_request(topic, format)
        );
        let req = GenRequest {
            prompt: &prompt,
            params: &self.params,
            instance: None,
        };
        let text = self.client.generate(&req).map_err(|e| {
            GenError::PoolExhausted(format!("external pool ({}): {e}", self.client.id()))
        })?;
        if text.trim().is_empty() {
            return Err(GenError::PoolExhausted(format!(
                "external pool ({}) returned empty text",
                self.client.id()
            )));
        }
        Ok(text.trim().to_owned())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use std::collections::HashSet;

    #[test]
    fn deterministic_and_in_length() {
        let pool = TemplatedPool::default();
        let tok = HeuristicTokenizer;
        for topic in pool.topics() {
            for format in pool.formats() {
                let a = pool
                    .produce(&topic, &format, &mut derive_rng(1, 0, &topic))
                    .unwrap();
                let b = pool
                    .produce(&topic, &format, &mut derive_rng(1, 0, &topic))
                    .unwrap();
                assert_eq!(a, b);
                let n = tok.count(&a);
                assert!((150..=520).contains(&n), "{topic}/{format}: {n}");
                assert!(!a.contains('{'), "{a}");
            }
        }
    }

    #[test]
    fn same_key_texts_distinct() {
        let pool = TemplatedPool::default();
        let mut seen = HashSet::new();
        for i in 0..200 {
            let text = pool
                .produce("penguins", "poem", &mut derive_rng(2, i, "p"))
                .unwrap();
            assert!(seen.insert(text));
        }
    }

    struct Echo;

    impl ModelClient for Echo {
        fn id(&self) -> &str {
            "echo"
        }

        fn generate(&self, req: &GenRequest<'_>) -> Result<String, crate::harness::ClientError> {
            Ok(format!("  {}  ", req.prompt))
        }
    }

    #[test]
    fn external_pool_forwards_request() {
        let pool = ExternalPool::with_default_keys(Arc::new(Echo));
        let text = pool
            .produce("owls", "essay", &mut derive_rng(0, 0, "x"))
            .unwrap();
        assert!(text.starts_with("Write an essay about owls. Keep it under 400 words."));
        assert_eq!(pool.topics().len(), 30);
    }

    #[test]
    fn unknown_key_is_error() {
        let pool = TemplatedPool::default();
        assert!(pool
            .produce("zeppelins", "poem", &mut derive_rng(0, 0, "x"))
            .is_err());
    }
}
