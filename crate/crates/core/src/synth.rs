//! Seeded synthetic experiment corpora with known ground truth.
//!
//! Every user writes `recipes_per_user` recipes, each on a different topic.
//! A recipe is a bag of words drawn from that topic's vocabulary pool; each
//! revision deletes and inserts a few words. The generator tallies every
//! keystroke it emits, so its [`GroundTruth`] serves as an oracle for the
//! sessionizer, the feature extractor and the event-log builder.
//!
//! [`topic_vectors`] builds a matching word-vector table in which words of a
//! pool cluster around a random topic direction.

use std::collections::BTreeSet;

use chrono::{Duration, NaiveDate, NaiveDateTime, Timelike};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{VectorStore, DEFAULT_DIMENSION};
use crate::features::EditCounts;
use crate::ingest::{Corpus, Gender, Group, Key, KeystrokeEvent, SubmissionEntry, UserProfile};
use crate::procmine::Activity;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid simulation plan: {0}")]
pub struct PlanError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub min: u64,
    pub max: u64,
}

impl IntRange {
    pub const fn new(min: u64, max: u64) -> Self {
        Self { min, max }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        rng.gen_range(self.min..=self.max)
    }

    fn check(&self, what: &str) -> Result<(), PlanError> {
        if self.min > self.max {
            return Err(PlanError(format!(
                "{what}: min {} > max {}",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Number of revisions of one recipe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RevisionDist {
    Uniform {
        min: u64,
        max: u64,
    },
    /// Normal draw, rounded and clamped to `[min, max]`.
    Normal {
        mean: f64,
        sd: f64,
        min: u64,
        max: u64,
    },
}

impl RevisionDist {
    fn sample<R: Rng>(&self, shift: f64, rng: &mut R) -> u64 {
        match *self {
            RevisionDist::Uniform { min, max } => rng.gen_range(min..=max),
            RevisionDist::Normal { mean, sd, min, max } => {
                let draw = Normal::new(mean + shift, sd)
                    .expect("validated")
                    .sample(rng);
                (draw.round().max(0.0) as u64).clamp(min, max)
            }
        }
    }

    fn check(&self, what: &str) -> Result<(), PlanError> {
        match *self {
            RevisionDist::Uniform { min, max } => IntRange::new(min, max).check(what),
            RevisionDist::Normal { mean, sd, min, max } => {
                if !mean.is_finite() || !sd.is_finite() || sd < 0.0 {
                    return Err(PlanError(format!(
                        "{what}: mean and sd must be finite, sd >= 0"
                    )));
                }
                IntRange::new(min, max).check(what)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicPool {
    pub name: String,
    pub words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimPlan {
    pub seed: u64,
    pub users_g1: usize,
    pub users_g2: usize,
    pub recipes_per_user: usize,
    pub topics: Vec<TopicPool>,
    pub words_per_draft: IntRange,
    pub revisions_g1: RevisionDist,
    pub revisions_g2: RevisionDist,
    /// Added to the G1 revision-count mean (normal distributions only).
    pub g1_revision_shift: f64,
    pub inserted_words: IntRange,
    pub deleted_words: IntRange,
    /// Deletions are only made while the text keeps at least this many words.
    pub min_words_kept: usize,
    /// Inter-key gap in milliseconds.
    pub key_gap_ms: IntRange,
    /// Multiplies the gap bounds of female participants (below 1 = faster).
    pub female_gap_factor: f64,
    pub female_fraction: f64,
    /// Probability of a modifier key (ignored by edit counting) before a keystroke.
    pub modifier_rate: f64,
    /// Share of deletions typed with Delete rather than Backspace.
    pub delete_key_rate: f64,
    /// Offset of the first keystroke from the entry start.
    pub first_key_offset_ms: IntRange,
    pub think_time_s: IntRange,
    pub start: NaiveDateTime,
    pub dimension: usize,
    pub topic_center_norm: f64,
    pub word_noise_sd: f64,
}

const DEFAULT_TOPICS: [(&str, &str); 6] = [
    (
        "pasta",
        "pasta spaghetti noodles tomato garlic basil parmesan boil drain simmer sauce olive oregano penne linguine ragu pesto meatballs marinara colander",
    ),
    (
        "cake",
        "chocolate cake flour sugar cocoa butter vanilla frosting batter oven bake whisk sponge icing sprinkles cupcake ganache buttercream layers springform",
    ),
    (
        "salad",
        "lettuce cucumber tomatoes dressing vinaigrette croutons spinach arugula radish feta olives toss chopped greens avocado vinegar lemon kale walnuts cabbage",
    ),
    (
        "soup",
        "broth stock carrots celery onions leek potatoes lentils ladle bowl simmering barley thyme bayleaf chowder bisque minestrone stew dumplings noodlesoup",
    ),
    (
        "curry",
        "curry coconut turmeric cumin coriander chili ginger lemongrass masala garam rice naan chickpeas paneer cardamom tikka korma vindaloo cilantro tamarind",
    ),
    (
        "pancakes",
        "pancakes syrup maple griddle blueberries buttermilk spatula flip stack waffles crepes batterbowl honey berries breakfast fluffy skillet whipped strawberries jam",
    ),
];

impl Default for SimPlan {
    fn default() -> Self {
        Self {
            seed: 42,
            users_g1: 25,
            users_g2: 25,
            recipes_per_user: 3,
            topics: DEFAULT_TOPICS
                .iter()
                .map(|(name, words)| TopicPool {
                    name: name.to_string(),
                    words: words.split_whitespace().map(str::to_string).collect(),
                })
                .collect(),
            words_per_draft: IntRange::new(25, 40),
            revisions_g1: RevisionDist::Uniform { min: 1, max: 4 },
            revisions_g2: RevisionDist::Uniform { min: 1, max: 4 },
            g1_revision_shift: 0.0,
            inserted_words: IntRange::new(1, 5),
            deleted_words: IntRange::new(0, 3),
            min_words_kept: 15,
            key_gap_ms: IntRange::new(80, 600),
            female_gap_factor: 1.0,
            female_fraction: 0.5,
            modifier_rate: 0.02,
            delete_key_rate: 0.2,
            first_key_offset_ms: IntRange::new(0, 3000),
            think_time_s: IntRange::new(30, 600),
            start: NaiveDate::from_ymd_opt(2023, 3, 1)
                .expect("valid date")
                .and_hms_opt(9, 0, 0)
                .expect("valid time"),
            dimension: DEFAULT_DIMENSION,
            topic_center_norm: 4.0,
            word_noise_sd: 0.1,
        }
    }
}

impl SimPlan {
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.recipes_per_user == 0 {
            return Err(PlanError("recipes_per_user must be at least 1".into()));
        }
        if self.topics.len() < self.recipes_per_user.min(2) {
            return Err(PlanError(format!(
                "{} topic pools cannot give consecutive recipes distinct topics",
                self.topics.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for pool in &self.topics {
            if pool.words.is_empty() {
                return Err(PlanError(format!(
                    "topic `{}` has an empty vocabulary pool",
                    pool.name
                )));
            }
            for w in &pool.words {
                if w.is_empty() || !w.chars().all(|c| c.is_alphanumeric() && !c.is_uppercase()) {
                    return Err(PlanError(format!(
                        "topic `{}`: word `{w}` must be lowercase letters/digits",
                        pool.name
                    )));
                }
                if !seen.insert(w.as_str()) {
                    return Err(PlanError(format!(
                        "word `{w}` appears in more than one pool"
                    )));
                }
            }
        }
        self.words_per_draft.check("words_per_draft")?;
        if self.words_per_draft.min == 0 {
            return Err(PlanError("words_per_draft.min must be at least 1".into()));
        }
        self.revisions_g1.check("revisions_g1")?;
        self.revisions_g2.check("revisions_g2")?;
        self.inserted_words.check("inserted_words")?;
        self.deleted_words.check("deleted_words")?;
        self.key_gap_ms.check("key_gap_ms")?;
        self.first_key_offset_ms.check("first_key_offset_ms")?;
        self.think_time_s.check("think_time_s")?;
        if self.key_gap_ms.min == 0 {
            return Err(PlanError("key_gap_ms.min must be at least 1".into()));
        }
        if self.think_time_s.min == 0 {
            return Err(PlanError("think_time_s.min must be at least 1".into()));
        }
        let prob = |x: f64| (0.0..=1.0).contains(&x);
        if !prob(self.female_fraction) || !prob(self.modifier_rate) || !prob(self.delete_key_rate) {
            return Err(PlanError("rates and fractions must lie in [0, 1]".into()));
        }
        if !(self.female_gap_factor.is_finite() && self.female_gap_factor > 0.0) {
            return Err(PlanError("female_gap_factor must be positive".into()));
        }
        if !self.g1_revision_shift.is_finite() {
            return Err(PlanError("g1_revision_shift must be finite".into()));
        }
        if self.dimension == 0
            || self.topic_center_norm.is_nan()
            || self.topic_center_norm <= 0.0
            || self.word_noise_sd.is_nan()
            || self.word_noise_sd < 0.0
        {
            return Err(PlanError("vector parameters must be positive".into()));
        }
        Ok(())
    }
}

/// What the generator knows about one session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionTruth {
    pub recipe_ordinal: usize,
    pub topic: String,
    pub draft_index: usize,
    pub num_revisions: u64,
    pub num_edits: u64,
    pub time_revising_s: f64,
    pub di_ratio: Option<f64>,
    pub efficiency_ins_per_s: Option<f64>,
    pub pause_mean_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserTruth {
    pub user_id: String,
    pub group: Group,
    pub gender: Gender,
    /// Entry indices that start a new recipe (index 0 excluded).
    pub boundaries: Vec<usize>,
    pub entry_edits: Vec<EditCounts>,
    pub sessions: Vec<SessionTruth>,
    pub trace_plan: Vec<Activity>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub users: Vec<UserTruth>,
}

/// SplitMix64 step, used to derive independent per-user seeds.
fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const VECTOR_STREAM: u64 = u64::MAX;

/// Per-entry tallies kept while emitting keystrokes.
#[derive(Debug, Default, Clone, Copy)]
struct EntryTally {
    edits: EditCounts,
    first_ms: Option<u64>,
    last_ms: u64,
    gap_sum_ms: u64,
    gap_count: u64,
}

impl EntryTally {
    fn active_ms(&self) -> u64 {
        self.first_ms.map_or(0, |f| self.last_ms - f)
    }
}

struct Typist<'a, R: Rng> {
    rng: &'a mut R,
    plan: &'a SimPlan,
    gap: (u64, u64),
    now_ms: u64,
    events: Vec<KeystrokeEvent>,
    tally: EntryTally,
}

impl<'a, R: Rng> Typist<'a, R> {
    fn new(rng: &'a mut R, plan: &'a SimPlan, gap: (u64, u64)) -> Self {
        let now_ms = plan.first_key_offset_ms.sample(rng);
        Self {
            rng,
            plan,
            gap,
            now_ms,
            events: Vec::new(),
            tally: EntryTally::default(),
        }
    }

    fn press(&mut self, key: Key) {
        if self.tally.first_ms.is_some() {
            let gap = self.rng.gen_range(self.gap.0..=self.gap.1);
            self.now_ms += gap;
            self.tally.gap_sum_ms += gap;
            self.tally.gap_count += 1;
        } else {
            self.tally.first_ms = Some(self.now_ms);
        }
        self.tally.last_ms = self.now_ms;
        match key {
            Key::Character(_) => self.tally.edits.insertions += 1,
            Key::Backspace | Key::Delete => self.tally.edits.deletions += 1,
            Key::Other(_) => {}
        }
        self.events.push(KeystrokeEvent::new(self.now_ms, key));
    }

    fn maybe_modifier(&mut self) {
        if self.rng.gen_bool(self.plan.modifier_rate) {
            self.press(Key::Other("Shift".into()));
        }
    }

    fn type_str(&mut self, s: &str) {
        for c in s.chars() {
            self.maybe_modifier();
            self.press(Key::Character(c));
        }
    }

    fn delete_chars(&mut self, n: usize) {
        for _ in 0..n {
            let key = if self.rng.gen_bool(self.plan.delete_key_rate) {
                Key::Delete
            } else {
                Key::Backspace
            };
            self.press(key);
        }
    }

    fn finish(self) -> (Vec<KeystrokeEvent>, EntryTally) {
        (self.events, self.tally)
    }
}

fn session_truth(
    recipe_ordinal: usize,
    topic: &str,
    draft_index: usize,
    draft: &EntryTally,
    revisions: &[EntryTally],
) -> SessionTruth {
    let ins: u64 = revisions.iter().map(|t| t.edits.insertions).sum();
    let del: u64 = revisions.iter().map(|t| t.edits.deletions).sum();
    let rev_ms: u64 = revisions.iter().map(EntryTally::active_ms).sum();
    let gap_sum: u64 = revisions.iter().map(|t| t.gap_sum_ms).sum();
    let gap_count: u64 = revisions.iter().map(|t| t.gap_count).sum();
    let all_ins = ins + draft.edits.insertions;
    let all_ms = rev_ms + draft.active_ms();
    SessionTruth {
        recipe_ordinal,
        topic: topic.to_string(),
        draft_index,
        num_revisions: revisions.len() as u64,
        num_edits: ins + del,
        time_revising_s: rev_ms as f64 / 1000.0,
        di_ratio: (ins > 0).then(|| del as f64 / ins as f64),
        efficiency_ins_per_s: (all_ms > 0).then(|| all_ins as f64 / (all_ms as f64 / 1000.0)),
        pause_mean_s: (gap_count > 0).then(|| gap_sum as f64 / gap_count as f64 / 1000.0),
    }
}

fn generate_user(
    plan: &SimPlan,
    index: usize,
    group: Group,
) -> (Vec<SubmissionEntry>, UserProfile, UserTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(plan.seed, index as u64));
    let user_id = format!("user{:03}", index + 1);
    let gender = if rng.gen_bool(plan.female_fraction) {
        Gender::Female
    } else {
        Gender::Male
    };
    let age = rng.gen_range(18..=30);
    let factor = if gender == Gender::Female {
        plan.female_gap_factor
    } else {
        1.0
    };
    let gap = (
        ((plan.key_gap_ms.min as f64 * factor).round() as u64).max(1),
        ((plan.key_gap_ms.max as f64 * factor).round() as u64).max(1),
    );
    let (dist, shift) = match group {
        Group::G1 => (plan.revisions_g1, plan.g1_revision_shift),
        Group::G2 => (plan.revisions_g2, 0.0),
    };

    // Topics: consecutive recipes never share a pool.
    let mut order: Vec<usize> = (0..plan.topics.len()).collect();
    order.shuffle(&mut rng);
    let topics: Vec<usize> = (0..plan.recipes_per_user)
        .map(|k| order[k % order.len()])
        .collect();

    let mut clock =
        plan.start.with_nanosecond(0).expect("zero is valid") + Duration::hours(index as i64);
    let mut entries = Vec::new();
    let mut truth = UserTruth {
        user_id: user_id.clone(),
        group,
        gender,
        boundaries: Vec::new(),
        entry_edits: Vec::new(),
        sessions: Vec::new(),
        trace_plan: vec![Activity::Start],
    };

    let push_entry = |entries: &mut Vec<SubmissionEntry>,
                      clock: &mut NaiveDateTime,
                      rng: &mut ChaCha8Rng,
                      keystrokes: Vec<KeystrokeEvent>,
                      tally: &EntryTally,
                      words: &[String]| {
        let think = plan.think_time_s.sample(rng) as i64;
        // Log timestamps carry whole seconds only.
        let typing_s = tally.last_ms.div_ceil(1000) as i64;
        *clock += Duration::seconds(typing_s + think);
        entries.push(SubmissionEntry {
            user_id: user_id.clone(),
            submitted_at: *clock,
            keystrokes,
            text: words.join(" "),
        });
    };

    for (k, &topic_idx) in topics.iter().enumerate() {
        let pool = &plan.topics[topic_idx];
        let draft_index = entries.len();
        if draft_index > 0 {
            truth.boundaries.push(draft_index);
        }
        truth.trace_plan.push(Activity::WriteRecipe(k + 1));

        let n_words = plan.words_per_draft.sample(&mut rng) as usize;
        let mut words: Vec<String> = (0..n_words)
            .map(|_| pool.words.choose(&mut rng).expect("non-empty pool").clone())
            .collect();
        let mut typist = Typist::new(&mut rng, plan, gap);
        typist.type_str(&words.join(" "));
        let (keys, draft_tally) = typist.finish();
        truth.entry_edits.push(draft_tally.edits);
        push_entry(
            &mut entries,
            &mut clock,
            &mut rng,
            keys,
            &draft_tally,
            &words,
        );

        let n_revisions = dist.sample(shift, &mut rng);
        let mut revision_tallies = Vec::new();
        for _ in 0..n_revisions {
            let mut typist = Typist::new(&mut rng, plan, gap);
            let n_del = typist.plan.deleted_words.sample(typist.rng) as usize;
            for _ in 0..n_del {
                if words.len() <= plan.min_words_kept {
                    break;
                }
                let at = typist.rng.gen_range(0..words.len());
                let removed = words.remove(at);
                typist.delete_chars(removed.chars().count() + 1);
            }
            let n_ins = typist.plan.inserted_words.sample(typist.rng) as usize;
            for _ in 0..n_ins {
                let word = pool
                    .words
                    .choose(typist.rng)
                    .expect("non-empty pool")
                    .clone();
                let at = typist.rng.gen_range(0..=words.len());
                typist.type_str(&format!(" {word}"));
                words.insert(at, word);
            }
            let (keys, tally) = typist.finish();
            truth.entry_edits.push(tally.edits);
            push_entry(&mut entries, &mut clock, &mut rng, keys, &tally, &words);
            revision_tallies.push(tally);
            truth.trace_plan.push(Activity::Revise);
        }
        truth.sessions.push(session_truth(
            k + 1,
            &pool.name,
            draft_index,
            &draft_tally,
            &revision_tallies,
        ));
    }
    truth.trace_plan.push(Activity::End);

    let profile = UserProfile {
        user_id: user_id.clone(),
        group,
        gender,
        age: Some(age),
    };
    (entries, profile, truth)
}

pub fn generate_corpus(plan: &SimPlan) -> Result<(Corpus, GroundTruth), PlanError> {
    plan.validate()?;
    let mut corpus = Corpus::default();
    let mut truth = GroundTruth {
        seed: plan.seed,
        users: Vec::new(),
    };
    let groups = std::iter::repeat_n(Group::G1, plan.users_g1)
        .chain(std::iter::repeat_n(Group::G2, plan.users_g2));
    for (index, group) in groups.enumerate() {
        let (entries, profile, user_truth) = generate_user(plan, index, group);
        corpus.log_rows += entries.len();
        corpus.entries.insert(profile.user_id.clone(), entries);
        corpus.profiles.insert(profile.user_id.clone(), profile);
        truth.users.push(user_truth);
    }
    Ok((corpus, truth))
}

/// Word vectors for the plan's pools: topic center plus Gaussian noise.
pub fn topic_vectors(plan: &SimPlan) -> Result<VectorStore, PlanError> {
    plan.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(plan.seed, VECTOR_STREAM));
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let noise = Normal::new(0.0, plan.word_noise_sd).expect("validated");
    let mut rows = Vec::new();
    for pool in &plan.topics {
        let mut center: Vec<f64> = (0..plan.dimension).map(|_| unit.sample(&mut rng)).collect();
        let norm = center.iter().map(|x| x * x).sum::<f64>().sqrt();
        center
            .iter_mut()
            .for_each(|x| *x *= plan.topic_center_norm / norm);
        for word in &pool.words {
            let v: Vec<f64> = center.iter().map(|c| c + noise.sample(&mut rng)).collect();
            rows.push((word.clone(), v));
        }
    }
    VectorStore::from_rows(plan.dimension, rows).map_err(|e| PlanError(e.to_string()))
}

/// Text rendering of [`topic_vectors`] in the `word c1 ... cd` format, with
/// six decimals per component.
pub fn topic_vectors_text(plan: &SimPlan) -> Result<String, PlanError> {
    let store = topic_vectors(plan)?;
    let mut out = String::new();
    for pool in &plan.topics {
        for word in &pool.words {
            let v = store.get(word).expect("word was inserted");
            out.push_str(word);
            for x in v {
                out.push_str(&format!(" {x:.6}"));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::count_edits;

    fn small_plan() -> SimPlan {
        SimPlan {
            users_g1: 3,
            users_g2: 3,
            ..SimPlan::default()
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let (a, ta) = generate_corpus(&small_plan()).unwrap();
        let (b, tb) = generate_corpus(&small_plan()).unwrap();
        assert_eq!(
            bincode::serialize(&a).unwrap(),
            bincode::serialize(&b).unwrap()
        );
        assert_eq!(
            serde_json::to_string(&ta).unwrap(),
            serde_json::to_string(&tb).unwrap()
        );

        let other = SimPlan {
            seed: 7,
            ..small_plan()
        };
        let (c, _) = generate_corpus(&other).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_revisions_plan() {
        let plan = SimPlan {
            revisions_g1: RevisionDist::Uniform { min: 0, max: 0 },
            revisions_g2: RevisionDist::Uniform { min: 0, max: 0 },
            ..small_plan()
        };
        let (_, truth) = generate_corpus(&plan).unwrap();
        for u in &truth.users {
            assert_eq!(
                u.trace_plan,
                [
                    Activity::Start,
                    Activity::WriteRecipe(1),
                    Activity::WriteRecipe(2),
                    Activity::WriteRecipe(3),
                    Activity::End
                ]
            );
            assert_eq!(u.boundaries, [1, 2]);
        }
    }

    #[test]
    fn tallies_match_keystreams() {
        let (corpus, truth) = generate_corpus(&small_plan()).unwrap();
        for u in &truth.users {
            let entries = &corpus.entries[&u.user_id];
            assert_eq!(entries.len(), u.entry_edits.len());
            for (e, t) in entries.iter().zip(&u.entry_edits) {
                assert_eq!(count_edits(&e.keystrokes), *t);
            }
            assert!(entries
                .windows(2)
                .all(|w| w[0].submitted_at < w[1].submitted_at));
        }
    }

    #[test]
    fn invalid_plans() {
        let mut plan = small_plan();
        plan.topics[1].words.push("pasta".into());
        assert!(generate_corpus(&plan).is_err());

        let mut plan = small_plan();
        plan.topics[0].words.clear();
        assert!(generate_corpus(&plan).is_err());

        let plan = SimPlan {
            key_gap_ms: IntRange::new(10, 5),
            ..small_plan()
        };
        assert!(plan.validate().is_err());
    }

    #[test]
    fn plan_json_defaults() {
        let plan: SimPlan = serde_json::from_str(r#"{"seed": 9, "users_g1": 2}"#).unwrap();
        assert_eq!(plan.seed, 9);
        assert_eq!(plan.users_g2, SimPlan::default().users_g2);
        let plan: SimPlan = serde_json::from_str(
            r#"{"revisions_g1": {"kind": "normal", "mean": 1.0, "sd": 0.8, "min": 0, "max": 8}}"#,
        )
        .unwrap();
        assert!(matches!(plan.revisions_g1, RevisionDist::Normal { .. }));
    }

    #[test]
    fn vector_text_reloads() {
        let plan = small_plan();
        let text = topic_vectors_text(&plan).unwrap();
        let store = VectorStore::read(text.as_bytes(), plan.dimension).unwrap();
        let words: usize = plan.topics.iter().map(|t| t.words.len()).sum();
        assert_eq!(store.len(), words);
    }
}
