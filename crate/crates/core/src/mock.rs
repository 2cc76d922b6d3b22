//! Seeded fixtures: building metadata, "real-world" tweet corpora with a tunable
//! share of generic distractor posts, and distractor pools for noise injection.
//!
//! Used by the CLI `mock` subcommand, by tests and by the FFI examples. Nothing
//! here resembles real data beyond its shape.

use crate::corpus::{join_corpus, BuildingRecord, Corpus, Label, Source, TweetRecord};
use crate::seeding::keyed_rng;
use rand::seq::IndexedRandom;
use rand::Rng;

const CITIES: &[&str] = &[
    "Springfield",
    "Berlin",
    "Munich",
    "Paris",
    "Lyon",
    "London",
    "Madrid",
    "Vienna",
];

const COMMERCIAL_TAGS: &[&str] = &[
    "retail",
    "commercial",
    "restaurant",
    "supermarket",
    "office",
    "hotel",
    "cafe",
];
const RESIDENTIAL_TAGS: &[&str] = &["residential", "apartments", "house", "detached", "terrace", "dormitory"];

const NAME_STEMS: &[&str] = &[
    "Maple",
    "Harbor",
    "Linden",
    "Crescent",
    "Summit",
    "Riverside",
    "Oak",
    "Juniper",
    "Elm",
    "Meridian",
];
const COMMERCIAL_NOUNS: &[&str] = &["Market", "Bistro", "Outlet", "Trading Co", "Plaza", "Grill", "Suites"];
const RESIDENTIAL_NOUNS: &[&str] = &["Residences", "Court", "Gardens", "Lofts", "Villas", "Commons", "Place"];

const LANGUAGES: &[&str] = &["English", "English", "English", "German", "French", "Spanish"];

const COMMERCIAL_WORDS: &[&str] = &[
    "sale",
    "checkout",
    "menu",
    "lunch",
    "discount",
    "receipt",
    "cashier",
    "brunch",
    "deal",
    "customers",
    "queue",
    "espresso",
    "booking",
    "meeting",
    "shopping",
];
const RESIDENTIAL_WORDS: &[&str] = &[
    "home",
    "neighbors",
    "balcony",
    "rent",
    "couch",
    "landlord",
    "laundry",
    "kitchen",
    "roommate",
    "garden",
    "moving",
    "bedroom",
    "hallway",
    "doorstep",
    "sleep",
];
const FILLER: &[&str] = &[
    "today", "again", "finally", "honestly", "so", "really", "this", "week", "love", "the",
];

const DISTRACTOR_TEMPLATES: &[&str] = &[
    "Just posted a photo @ {place}",
    "I'm at {place} in {city}",
    "Just posted a video @ {place}",
    "Happy birthday to my favorite person! #{n}",
    "Good morning {city}!",
    "Can't believe it's already {month}.",
    "Who's watching the game tonight?",
    "Traffic in {city} is unreal right now",
];
const PLACES: &[&str] = &[
    "Union Station",
    "Central Park",
    "the river walk",
    "City Hall",
    "the old bridge",
    "Main Street",
];
const MONTHS: &[&str] = &["March", "June", "September", "December"];

fn pick<'a, R: Rng + ?Sized>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).copied().expect("non-empty table")
}

/// `n` buildings with alternating labels, ids `m00000`, `m00001`, ...
///
/// Tags and names come from label-specific tables. Language lists have one to
/// seven entries, so some exceed the five-tweet cap and exercise cleaning.
pub fn mock_buildings(n: usize, seed: u64) -> Vec<BuildingRecord> {
    (0..n)
        .map(|i| {
            let id = format!("m{i:05}");
            let mut rng = keyed_rng(seed, &format!("building\u{1f}{id}"));
            let label = if i % 2 == 0 {
                Label::Commercial
            } else {
                Label::Residential
            };
            let (tags, nouns) = match label {
                Label::Commercial => (COMMERCIAL_TAGS, COMMERCIAL_NOUNS),
                Label::Residential => (RESIDENTIAL_TAGS, RESIDENTIAL_NOUNS),
            };
            let tag = pick(&mut rng, tags);
            let name = format!("{} {}", pick(&mut rng, NAME_STEMS), pick(&mut rng, nouns));
            let city = pick(&mut rng, CITIES);
            let count = rng.random_range(1..=7);
            let languages = (0..count).map(|_| pick(&mut rng, LANGUAGES).to_string()).collect();
            BuildingRecord::new(id, city, tag, name, label, languages)
        })
        .collect()
}

fn distractor<R: Rng + ?Sized>(rng: &mut R) -> String {
    pick(rng, DISTRACTOR_TEMPLATES)
        .replace("{place}", pick(rng, PLACES))
        .replace("{city}", pick(rng, CITIES))
        .replace("{month}", pick(rng, MONTHS))
        .replace("{n}", &rng.random_range(1..100).to_string())
}

/// `n` generic posts that say nothing about the building they are attached to.
pub fn distractor_pool(n: usize, seed: u64) -> Vec<String> {
    let mut rng = keyed_rng(seed, "distractors");
    (0..n).map(|_| distractor(&mut rng)).collect()
}

fn informative<R: Rng + ?Sized>(rng: &mut R, label: Label) -> String {
    let words = match label {
        Label::Commercial => COMMERCIAL_WORDS,
        Label::Residential => RESIDENTIAL_WORDS,
    };
    let len = rng.random_range(4..=9);
    let mut out: Vec<&str> = Vec::with_capacity(len);
    for _ in 0..len {
        if rng.random_bool(0.4) {
            out.push(pick(rng, words));
        } else {
            out.push(pick(rng, FILLER));
        }
    }
    out.join(" ")
}

/// A "real-world" corpus for the given buildings: one tweet per listed language,
/// each one a generic distractor with probability `distractor_rate` and otherwise
/// a short post mixing filler with label-specific words.
pub fn mock_real_corpus(buildings: &[BuildingRecord], distractor_rate: f64, seed: u64) -> Corpus {
    let rate = distractor_rate.clamp(0.0, 1.0);
    let mut tweets = Vec::new();
    for b in buildings {
        let mut rng = keyed_rng(seed, &format!("real\u{1f}{}", b.building_id));
        for lang in &b.tweet_languages {
            let text = if rng.random_bool(rate) {
                distractor(&mut rng)
            } else {
                informative(&mut rng, b.label)
            };
            tweets.push(TweetRecord::new(&b.building_id, text, lang, Source::Real));
        }
    }
    join_corpus(buildings.to_vec(), tweets)
        .expect("fixture buildings have unique ids")
        .with_provenance(format!("mock-real seed={seed} distractor_rate={rate}"))
}
