//! Writes the synthetic 12-movie corpus used by the end-to-end tests.
//!
//! ```text
//! cargo run -p moviesim-core --example make_minicorpus -- fixtures/minicorpus
//! ```
//!
//! Four themes with three movies each. Theme drives the subtitle vocabulary,
//! cast, genres, tag relevances and audio label mix, so every modality carries
//! some real signal. Output is a pure function of the seed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const SEED: u64 = 20_160_901;

struct Theme {
    words: &'static [&'static str],
    cast: &'static [&'static str],
    directors: &'static [&'static str],
    genres: &'static [&'static str],
    tags: &'static [&'static str],
    events: &'static [(&'static str, u32)],
    music: &'static [(&'static str, u32)],
}

const THEMES: [Theme; 4] = [
    Theme {
        words: &[
            "rocket", "planet", "orbit", "alien", "galaxy", "moon", "engine", "pilot", "station", "signal", "crew",
            "hull", "launch", "oxygen", "comet", "asteroid", "laser", "robot", "captain", "shuttle",
        ],
        cast: &["Ada Vance", "Rex Holloway", "Mina Sato", "Oren Blake", "Tess Kowal"],
        directors: &["Iris Delgado", "Paul Mercer"],
        genres: &["sci-fi", "adventure"],
        tags: &["space", "aliens", "futuristic"],
        events: &[("music", 3), ("env_constant_high", 3), ("env_abrupt", 2), ("speech", 3)],
        music: &[("electronic", 5), ("classical", 3), ("rock", 1)],
    },
    Theme {
        words: &[
            "love",
            "heart",
            "kiss",
            "wedding",
            "dance",
            "flower",
            "letter",
            "promise",
            "marriage",
            "darling",
            "beauty",
            "ring",
            "bride",
            "moonlight",
            "poem",
            "sweetheart",
            "candle",
            "honeymoon",
            "valentine",
            "waltz",
        ],
        cast: &["Clara Dune", "Milo Fenn", "Sofia Reyes", "Jonah Pike", "Lena Ortiz"],
        directors: &["Grace Albany", "Tomas Lind"],
        genres: &["romance", "drama"],
        tags: &["romantic", "love story", "wedding"],
        events: &[("music", 4), ("speech", 5), ("env_background", 1)],
        music: &[("jazz", 4), ("classical", 2), ("country", 2)],
    },
    Theme {
        words: &[
            "police",
            "detective",
            "murder",
            "gun",
            "bank",
            "robbery",
            "witness",
            "prison",
            "judge",
            "lawyer",
            "money",
            "evidence",
            "suspect",
            "alibi",
            "knife",
            "cop",
            "badge",
            "crime",
            "jail",
            "gang",
        ],
        cast: &["Vic Marlow", "Dana Quist", "Sal Romero", "Nora Hale", "Eli Brandt"],
        directors: &["Marco Bassi", "Helen Stark"],
        genres: &["crime", "thriller"],
        tags: &["crime", "police", "heist"],
        events: &[
            ("speech", 4),
            ("gunshots", 3),
            ("screams", 2),
            ("fights", 2),
            ("env_abrupt", 1),
        ],
        music: &[("rap", 4), ("rock", 3), ("blues", 1)],
    },
    Theme {
        words: &[
            "dad", "father", "mom", "son", "school", "teacher", "homework", "birthday", "daughter", "family", "kid",
            "grandma", "puppy", "garden", "cookie", "uncle", "aunt", "baby", "toy", "bicycle",
        ],
        cast: &["Amy Welles", "Ben Carter", "Lucy Moss", "Sam Tully", "Rosa Quinn"],
        directors: &["Hank Ober", "June Avery"],
        genres: &["family", "comedy"],
        tags: &["family", "kids", "coming of age"],
        events: &[("speech", 6), ("music", 2), ("env_background", 3)],
        music: &[("country", 3), ("reggae", 2), ("blues", 2), ("classical", 1)],
    },
];

const COMMON: &[&str] = &[
    "time", "night", "house", "car", "friend", "world", "road", "door", "phone", "city", "morning", "window",
];
const FILLER: &[&str] = &[
    "I think",
    "you know",
    "we have to",
    "don't",
    "please",
    "where is the",
    "look at the",
    "I can't find my",
    "they said the",
    "tell me about the",
    "never again",
    "it was",
];
const GENERAL_TAGS: &[&str] = &["funny", "dark", "violent", "soundtrack"];

const TITLES: [&str; 12] = [
    "Orbit of Ash",
    "The Last Station",
    "Comet Run",
    "Letters in June",
    "A Waltz for Two",
    "The Ring Season",
    "Cold Alibi",
    "Badge of Smoke",
    "The Vault Job",
    "Bicycle Summer",
    "Grandma's Garden",
    "School of Puppies",
];

fn weighted<'a>(rng: &mut ChaCha8Rng, items: &'a [(&'a str, u32)]) -> &'a str {
    let total: u32 = items.iter().map(|(_, w)| w).sum();
    let mut x = rng.random_range(0..total);
    for (label, w) in items {
        if x < *w {
            return label;
        }
        x -= w;
    }
    unreachable!()
}

fn timestamp(ms: u64) -> String {
    format!(
        "{:02}:{:02}:{:02},{:03}",
        ms / 3_600_000,
        ms / 60_000 % 60,
        ms / 1000 % 60,
        ms % 1000
    )
}

fn plural(word: &str) -> String {
    if word.ends_with('y') && !word.ends_with("ey") && !word.ends_with("ay") {
        format!("{}ies", &word[..word.len() - 1])
    } else if word.ends_with('s') || word.ends_with('x') || word.ends_with("ch") || word.ends_with("sh") {
        format!("{word}es")
    } else {
        format!("{word}s")
    }
}

fn subtitle(rng: &mut ChaCha8Rng, theme: &Theme) -> String {
    let mut out = String::new();
    let mut clock = rng.random_range(1000..5000u64);
    let cues = rng.random_range(45..60);
    for index in 1..=cues {
        let start = clock;
        let end = start + rng.random_range(1200..3500);
        clock = end + rng.random_range(200..1500);
        let mut line = String::new();
        let words = rng.random_range(2..5);
        for _ in 0..words {
            let filler = FILLER.choose(rng).unwrap();
            let w = if rng.random_bool(0.8) {
                *theme.words.choose(rng).unwrap()
            } else {
                *COMMON.choose(rng).unwrap()
            };
            let w = if rng.random_bool(0.25) {
                plural(w)
            } else {
                w.to_string()
            };
            let _ = write!(line, "{filler} {w}. ");
        }
        let mut text = line.trim().to_string();
        match rng.random_range(0..10) {
            0 => text = format!("<i>{text}</i>"),
            1 => text = format!("{{\\an8}}{text}"),
            2 => {
                let split = text.find(". ").map_or(text.len(), |i| i + 1);
                let (a, b) = text.split_at(split);
                text = format!("{}\n- {}", a.trim(), b.trim());
            }
            _ => {}
        }
        if index % 17 == 0 {
            // stray block with no timing line; parsers are expected to skip it
            let _ = write!(out, "{index}\nsubtitles by nobody\n\n");
        }
        let _ = write!(out, "{index}\n{} --> {}\n{text}\n\n", timestamp(start), timestamp(end));
    }
    out
}

fn audio_labels(rng: &mut ChaCha8Rng, theme: &Theme) -> String {
    let mut out = String::new();
    for _ in 0..rng.random_range(60..90) {
        let event = weighted(rng, theme.events);
        out.push_str(event);
        out.push('\n');
        if event == "music" || rng.random_bool(0.3) {
            out.push_str(weighted(rng, theme.music));
            out.push('\n');
        }
    }
    out
}

struct AudioSpace {
    genre_means: Vec<[f64; 6]>,
    event_means: Vec<[f64; 6]>,
}

impl AudioSpace {
    // genre classes live in dims 1..=6, event classes in dims 7..=12
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let mut mean = || {
            let mut m = [0.0; 6];
            m.iter_mut().for_each(|x| *x = rng.random_range(-6.0..6.0));
            m
        };
        AudioSpace {
            genre_means: (0..8).map(|_| mean()).collect(),
            event_means: (0..8).map(|_| mean()).collect(),
        }
    }

    fn segment(&self, rng: &mut ChaCha8Rng, genre: usize, event: usize) -> Vec<f64> {
        self.genre_means[genre]
            .iter()
            .chain(self.event_means[event].iter())
            .map(|m| m + rng.random_range(-0.5..0.5))
            .collect()
    }
}

fn feature_csv(rows: &[Vec<f64>]) -> String {
    let mut out = (1..=12).map(|i| format!("f{i}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn main() {
    let out = std::env::args().nth(1).expect("usage: make_minicorpus OUT_DIR");
    let out = Path::new(&out);
    for sub in ["subtitles", "audio", "audio_train/genre", "audio_train/event"] {
        fs::create_dir_all(out.join(sub)).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let space = AudioSpace::new(&mut rng);
    let genre_labels = moviesim_core::audio::GENRE_LABELS;
    let event_labels = moviesim_core::audio::EVENT_LABELS;
    let index = |labels: &[&str], l: &str| labels.iter().position(|x| *x == l).unwrap();

    let mut movies = Vec::new();
    let mut subtitles = serde_json::Map::new();
    let mut audio = serde_json::Map::new();
    let mut tags = String::from("movie_id,tag,relevance\n");
    let all_tags: Vec<&str> = THEMES
        .iter()
        .flat_map(|t| t.tags.iter().copied())
        .chain(GENERAL_TAGS.iter().copied())
        .collect();

    for (i, title) in TITLES.iter().enumerate() {
        let id = format!("m{:02}", i + 1);
        let theme = &THEMES[i / 3];

        let mut cast: Vec<&str> = theme.cast.choose_multiple(&mut rng, 3).copied().collect();
        if rng.random_bool(0.3) {
            let other = &THEMES[rng.random_range(0..4)];
            cast.push(other.cast.choose(&mut rng).unwrap());
        }
        let director = theme.directors.choose(&mut rng).unwrap();
        let mut genres = vec![theme.genres[0]];
        if rng.random_bool(0.6) {
            genres.push(theme.genres[1]);
        }
        movies.push(json!({
            "id": id,
            "title": title,
            "cast": cast,
            "directors": [director],
            "genres": genres,
        }));

        let srt = format!("subtitles/{id}.srt");
        fs::write(out.join(&srt), subtitle(&mut rng, theme)).unwrap();
        subtitles.insert(id.clone(), json!(srt));

        match i {
            // no audio at all: flagged zero histograms
            11 => {}
            // precomputed segment features, classified by the trained SVMs
            3 | 7 => {
                let rows: Vec<Vec<f64>> = (0..rng.random_range(40..60))
                    .map(|_| {
                        let g = index(&genre_labels, weighted(&mut rng, theme.music));
                        let e = index(&event_labels, weighted(&mut rng, theme.events));
                        space.segment(&mut rng, g, e)
                    })
                    .collect();
                let path = format!("audio/{id}.features.csv");
                fs::write(out.join(&path), feature_csv(&rows)).unwrap();
                audio.insert(id.clone(), json!({ "kind": "features", "path": path }));
            }
            _ => {
                let path = format!("audio/{id}.labels.txt");
                fs::write(out.join(&path), audio_labels(&mut rng, theme)).unwrap();
                audio.insert(id.clone(), json!({ "kind": "labels", "path": path }));
            }
        }

        for tag in &all_tags {
            let own = theme.tags.contains(tag);
            let r: f64 = if own {
                rng.random_range(0.7..1.0)
            } else if GENERAL_TAGS.contains(tag) {
                rng.random_range(0.0..0.6)
            } else {
                rng.random_range(0.0..0.2)
            };
            let _ = writeln!(tags, "{id},{tag},{r:.3}");
        }
    }

    for (c, label) in genre_labels.iter().enumerate() {
        let rows: Vec<Vec<f64>> = (0..25)
            .map(|_| {
                let e = rng.random_range(0..8);
                space.segment(&mut rng, c, e)
            })
            .collect();
        fs::write(out.join(format!("audio_train/genre/{label}.csv")), feature_csv(&rows)).unwrap();
    }
    for (c, label) in event_labels.iter().enumerate() {
        let rows: Vec<Vec<f64>> = (0..25)
            .map(|_| {
                let g = rng.random_range(0..8);
                space.segment(&mut rng, g, c)
            })
            .collect();
        fs::write(out.join(format!("audio_train/event/{label}.csv")), feature_csv(&rows)).unwrap();
    }

    fs::write(out.join("tags.csv"), tags).unwrap();
    let manifest = json!({
        "movies": movies,
        "subtitles": subtitles,
        "audio": audio,
        "tags": "tags.csv",
    });
    fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap() + "\n",
    )
    .unwrap();
    let config = json!({
        "manifest": "manifest.json",
        "artifacts": "artifacts",
        "t": 8,
        "iters": 300,
        "seed": 7,
        "k": 8,
        "step": 0.05,
        "audio": {
            "genre_data": "audio_train/genre",
            "event_data": "audio_train/event",
        },
    });
    fs::write(
        out.join("pipeline.json"),
        serde_json::to_string_pretty(&config).unwrap() + "\n",
    )
    .unwrap();
}
