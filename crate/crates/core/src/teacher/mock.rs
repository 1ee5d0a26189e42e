//! Deterministic mock chat backend.
//!
//! Replies are a pure function of (request content, run seed): identical
//! inputs yield byte-identical outputs, which is what makes end-to-end runs
//! reproducible and resumable in tests. The mock dispatches on the system
//! prompt of the incoming request, parses the structured parts of the user
//! prompt, and expands fixed Bengali templates keyed by round, batch index,
//! and draft variant.
//!
//! Marker tokens let tests reach every filter branch: a marker planted in a
//! seed text is propagated by the mock generator into every candidate of the
//! round, and the mock judge reacts to markers it sees in the pair text.

use async_trait::async_trait;

use super::{prompts, ChatRequest, ChatTransport, TransportError};
use crate::types::{Complexity, TaskType};

/// Judge scores grammar 0.5 when present.
pub const MARKER_BAD_GRAMMAR: &str = "ব্যাকরণহীন";
/// Judge scores bias 0.5 when present.
pub const MARKER_BIASED: &str = "পক্ষপাতদুষ্ট";
/// Judge scores coherence 0.5 when present.
pub const MARKER_INCOHERENT: &str = "অসংলগ্ন";
/// Judge sets factual=false when present.
pub const MARKER_NOT_FACTUAL: &str = "অসত্য";
/// Judge sets format_ok=false when present.
pub const MARKER_BAD_FORMAT: &str = "বিন্যাসহীন";
/// Judge sets regional_ok=false when present.
pub const MARKER_REGIONAL: &str = "আঞ্চলিকপক্ষপাত";
/// Judge sets gender_ok=false when present.
pub const MARKER_GENDER: &str = "লিঙ্গপক্ষপাত";
/// Judge sets political_ok=false when present.
pub const MARKER_POLITICAL: &str = "রাজনৈতিকপক্ষপাত";
/// Generator writes drafts of two words, tripping the length check.
pub const MARKER_SHORT: &str = "অতিসংক্ষিপ্ত";
/// Generator emits the same instruction for every candidate.
pub const MARKER_DUPLICATE: &str = "অনুলিপি";
/// Generator leaves every fourth candidate empty.
pub const MARKER_EMPTY: &str = "শূন্যতা";
/// Generator mixes English words into every candidate.
pub const MARKER_ENGLISH: &str = "ইংরেজিমিশ্রণ";

/// Coherence scores the judge assigns to draft variants 1, 2, 3, ...
pub const DRAFT_COHERENCE_CYCLE: [f64; 3] = [0.7, 0.9, 0.8];
/// Coherence for pairs without a draft marker.
pub const DEFAULT_COHERENCE: f64 = 0.85;

const TOPIC_A: [&str; 11] = [
    "পহেলা বৈশাখ",
    "রবীন্দ্রসংগীত",
    "সুন্দরবন",
    "পদ্মা নদী",
    "ঢাকা শহর",
    "গ্রামীণ মেলা",
    "বাংলা ব্যাকরণ",
    "লোকসংগীত",
    "নকশিকাঁথা",
    "ইলিশ মাছ",
    "কক্সবাজার",
];

const TOPIC_B: [&str; 13] = [
    "শিক্ষা ব্যবস্থা",
    "পরিবেশ দূষণ",
    "ডিজিটাল প্রযুক্তি",
    "স্বাস্থ্য সচেতনতা",
    "কৃষি উন্নয়ন",
    "নারীর ক্ষমতায়ন",
    "যুব সমাজ",
    "নগরায়ণ",
    "জলবায়ু পরিবর্তন",
    "খাদ্য নিরাপত্তা",
    "গণপরিবহন",
    "সাহিত্য চর্চা",
    "ক্রীড়া সংস্কৃতি",
];

/// Instruction verbs by batch index mod 3; each induces one task type.
const VERBS: [&str; 3] = [
    "নিয়ে একটি বিস্তারিত রচনা লিখুন।",
    "বিষয়ে আপনার মতামত ব্যাখ্যা করুন।",
    "সম্পর্কিত বক্তব্যটি ইতিবাচক না নেতিবাচক তা শ্রেণিবদ্ধ করুন।",
];

const CATEGORY_PHRASES: [&str; 10] = [
    "বাংলার সংস্কৃতি ও ঐতিহ্যের আলোকে",
    "একাডেমিক লেখার মানদণ্ড অনুসরণ করে",
    "গাণিতিক যুক্তি ব্যবহার করে",
    "প্রোগ্রামিং ধারণা কাজে লাগিয়ে",
    "সৃজনশীল দৃষ্টিভঙ্গি থেকে",
    "বৈজ্ঞানিক ব্যাখ্যার মাধ্যমে",
    "ব্যবসায়িক প্রেক্ষাপট বিবেচনা করে",
    "সামাজিক প্রেক্ষাপট বিশ্লেষণ করে",
    "উপাত্ত বিশ্লেষণের দৃষ্টিতে",
    "ভাষাতাত্ত্বিক দৃষ্টিকোণ থেকে",
];

const RESPONSE_WORDS: [&str; 64] = [
    "মানুষ", "জীবন", "সমাজ", "দেশ", "ভাষা", "সংস্কৃতি", "ইতিহাস", "শিক্ষা", "জ্ঞান",
    "বিজ্ঞান", "প্রকৃতি", "নদী", "আকাশ", "মাটি", "ফসল", "গ্রাম", "শহর", "পরিবার", "সময়",
    "কাজ", "স্বপ্ন", "আশা", "আনন্দ", "শান্তি", "উন্নয়ন", "অগ্রগতি", "চেতনা", "ঐতিহ্য",
    "উৎসব", "মেলা", "গান", "কবিতা", "গল্প", "উপন্যাস", "শিল্প", "চিত্র", "বাজার",
    "অর্থনীতি", "কৃষি", "শিল্পকলা", "প্রযুক্তি", "তথ্য", "গবেষণা", "বিশ্লেষণ", "পদ্ধতি",
    "ফলাফল", "কারণ", "প্রভাব", "সমস্যা", "সমাধান", "প্রশ্ন", "উত্তর", "আলোচনা",
    "পর্যালোচনা", "দৃষ্টিভঙ্গি", "মতামত", "যুক্তি", "প্রমাণ", "উদাহরণ", "ব্যাখ্যা",
    "বর্ণনা", "তুলনা", "সিদ্ধান্ত", "ভবিষ্যৎ",
];

/// Render a number in Bengali digits: 507 → "৫০৭".
pub fn bengali_digits(mut n: u64) -> String {
    const DIGITS: [char; 10] = ['০', '১', '২', '৩', '৪', '৫', '৬', '৭', '৮', '৯'];
    if n == 0 {
        return DIGITS[0].to_string();
    }
    let mut out = Vec::new();
    while n > 0 {
        out.push(DIGITS[(n % 10) as usize]);
        n /= 10;
    }
    out.reverse();
    out.into_iter().collect()
}

fn parse_bengali_number(token: &str) -> Option<u64> {
    let mut value = 0u64;
    let mut any = false;
    for c in token.chars() {
        let digit = match c {
            '০'..='৯' => (c as u32 - '০' as u32) as u64,
            _ => break,
        };
        value = value * 10 + digit;
        any = true;
    }
    any.then_some(value)
}

/// Find the Bengali number following `keyword` in `text`.
fn number_after(text: &str, keyword: &str) -> Option<u64> {
    let mut tokens = text.split_whitespace().peekable();
    while let Some(token) = tokens.next() {
        if token == keyword {
            return tokens.peek().and_then(|t| parse_bengali_number(t));
        }
    }
    None
}

fn fnv1a(text: &str) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Task type a mock instruction induces, by its verb.
pub fn task_type_of(instruction: &str) -> TaskType {
    if instruction.contains("শ্রেণিবদ্ধ") || instruction.contains("শ্রেণীবিভাগ") {
        TaskType::Classification
    } else if instruction.contains("লিখুন")
        || instruction.contains("লেখো")
        || instruction.contains("রচনা")
        || instruction.contains("গল্প")
    {
        TaskType::Generation
    } else {
        TaskType::OpenEnded
    }
}

/// Complexity cycle over batch indices: 40% basic, 40% intermediate,
/// 20% advanced in every block of five.
const COMPLEXITY_CYCLE: [Complexity; 5] = [
    Complexity::Basic,
    Complexity::Intermediate,
    Complexity::Basic,
    Complexity::Intermediate,
    Complexity::Advanced,
];

fn complexity_of(instruction: &str) -> Complexity {
    let key = number_after(instruction, "ক্রম").unwrap_or_else(|| fnv1a(instruction) % 1000);
    COMPLEXITY_CYCLE[(key % 5) as usize]
}

fn line_value<'a>(text: &'a str, prefix: &str) -> Option<&'a str> {
    text.lines()
        .find_map(|line| line.strip_prefix(prefix))
        .map(str::trim)
}

struct ActiveMarkers {
    bad_grammar: bool,
    biased: bool,
    not_factual: bool,
    bad_format: bool,
    regional: bool,
    gender: bool,
    political: bool,
    incoherent: bool,
    short: bool,
    duplicate: bool,
    empty: bool,
    english: bool,
}

impl ActiveMarkers {
    fn in_text(text: &str) -> Self {
        ActiveMarkers {
            bad_grammar: text.contains(MARKER_BAD_GRAMMAR),
            biased: text.contains(MARKER_BIASED),
            not_factual: text.contains(MARKER_NOT_FACTUAL),
            bad_format: text.contains(MARKER_BAD_FORMAT),
            regional: text.contains(MARKER_REGIONAL),
            gender: text.contains(MARKER_GENDER),
            political: text.contains(MARKER_POLITICAL),
            incoherent: text.contains(MARKER_INCOHERENT),
            short: text.contains(MARKER_SHORT),
            duplicate: text.contains(MARKER_DUPLICATE),
            empty: text.contains(MARKER_EMPTY),
            english: text.contains(MARKER_ENGLISH),
        }
    }

    /// Markers the generator copies from seed texts into candidates.
    fn propagated(&self) -> Vec<&'static str> {
        let mut tokens = Vec::new();
        if self.bad_grammar {
            tokens.push(MARKER_BAD_GRAMMAR);
        }
        if self.biased {
            tokens.push(MARKER_BIASED);
        }
        if self.not_factual {
            tokens.push(MARKER_NOT_FACTUAL);
        }
        if self.bad_format {
            tokens.push(MARKER_BAD_FORMAT);
        }
        if self.regional {
            tokens.push(MARKER_REGIONAL);
        }
        if self.gender {
            tokens.push(MARKER_GENDER);
        }
        if self.political {
            tokens.push(MARKER_POLITICAL);
        }
        if self.incoherent {
            tokens.push(MARKER_INCOHERENT);
        }
        if self.short {
            tokens.push(MARKER_SHORT);
        }
        tokens
    }
}

pub struct MockTransport {
    seed: u64,
}

impl MockTransport {
    pub fn new(seed: u64) -> Self {
        MockTransport { seed }
    }

    fn generation_reply(&self, user: &str) -> String {
        let round = line_value(user, "Round:")
            .and_then(|v| v.parse::<u64>().ok())
            .unwrap_or(1);
        let category_index = line_value(user, "Category:")
            .and_then(|v| v.split_whitespace().next())
            .and_then(crate::types::Category::parse)
            .map(|c| crate::types::Category::ALL.iter().position(|x| *x == c).unwrap())
            .unwrap_or(0);
        let count = line_value(user, "Count:")
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(1);
        let seed_text: String = user
            .lines()
            .filter_map(|line| line.strip_prefix("- "))
            .collect::<Vec<_>>()
            .join(" ");
        let markers = ActiveMarkers::in_text(&seed_text);
        let inherited = markers.propagated();

        let mut reply = String::new();
        for index in 0..count {
            let text = if markers.empty && index % 4 == 3 {
                String::new()
            } else if markers.duplicate {
                "অনুলিপি পরীক্ষার জন্য অভিন্ন নির্দেশনা।".to_string()
            } else {
                let i = index as u64;
                let a = ((self.seed + round * 7 + i) % TOPIC_A.len() as u64) as usize;
                let b = ((self.seed + round * 5 + i * 3) % TOPIC_B.len() as u64) as usize;
                let mut text = format!(
                    "রাউন্ড {} ক্রম {}। {} {} এবং {} {}",
                    bengali_digits(round),
                    bengali_digits(i),
                    CATEGORY_PHRASES[category_index],
                    TOPIC_A[a],
                    TOPIC_B[b],
                    VERBS[index % 3],
                );
                if markers.english {
                    text.push_str(" mixed english words here");
                }
                for marker in &inherited {
                    text.push(' ');
                    text.push_str(marker);
                }
                text
            };
            reply.push_str(&format!("{}. {}\n", index + 1, text));
        }
        reply
    }

    fn draft_reply(&self, user: &str) -> String {
        let instruction = user.split("Instruction:\n").nth(1).unwrap_or("");
        let markers = ActiveMarkers::in_text(instruction);
        if markers.short {
            return "অতি ছোট।".to_string();
        }

        let task_type = line_value(user, "Task type:")
            .and_then(TaskType::parse)
            .unwrap_or(TaskType::OpenEnded);
        let category = line_value(user, "Category:").unwrap_or("c1").to_string();
        let variant = line_value(user, "Draft:")
            .and_then(|v| v.split_whitespace().next())
            .and_then(|v| v.parse::<u64>().ok())
            .unwrap_or(1);

        let round = number_after(instruction, "রাউন্ড").unwrap_or(0);
        let index = number_after(instruction, "ক্রম").unwrap_or(fnv1a(instruction) % 1000);
        let g = round * 1000 + index;
        let offset = self.seed + g * 17 + variant * 29;

        let body_words = match task_type {
            TaskType::Generation => 88,
            TaskType::OpenEnded => 56,
            TaskType::Classification => 9,
        };

        let mut response = format!(
            "উত্তর রাউন্ড {} ক্রম {} :",
            bengali_digits(round),
            bengali_digits(index)
        );
        for j in 0..body_words {
            response.push(' ');
            response.push_str(RESPONSE_WORDS[((offset + j) % 64) as usize]);
            if j % 8 == 7 {
                response.push('।');
            }
        }
        response.push_str(&format!(" খসড়া {}", bengali_digits(variant)));
        if category == "c4" {
            response.push_str("\n```\nint main(void) {\n    return 0;\n}\n```");
        }
        response
    }

    fn classify_reply(&self, user: &str) -> String {
        let instruction = user.split("Instruction:\n").nth(1).unwrap_or("");
        task_type_of(instruction).as_str().to_string()
    }

    fn judge_reply(&self, user: &str) -> String {
        let after = user.split("Instruction:\n").nth(1).unwrap_or("");
        let (instruction, response) = match after.split_once("\n\nResponse:\n") {
            Some((i, r)) => (i, r),
            None => (after, ""),
        };
        let combined = format!("{instruction} {response}");
        let markers = ActiveMarkers::in_text(&combined);

        let coherence = if markers.incoherent {
            0.5
        } else if let Some(variant) = number_after(response, "খসড়া") {
            DRAFT_COHERENCE_CYCLE[((variant.max(1) - 1) % 3) as usize]
        } else {
            DEFAULT_COHERENCE
        };

        let verdict = crate::types::JudgeVerdict {
            grammar: if markers.bad_grammar { 0.5 } else { 0.9 },
            bias: if markers.biased { 0.5 } else { 0.0 },
            coherence,
            factual: !markers.not_factual,
            format_ok: !markers.bad_format,
            regional_ok: !markers.regional,
            gender_ok: !markers.gender,
            political_ok: !markers.political,
            task_type: task_type_of(instruction),
            complexity: complexity_of(instruction),
        };
        serde_json::to_string(&verdict).expect("verdict serializes")
    }
}

#[async_trait]
impl ChatTransport for MockTransport {
    async fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        let system = request
            .messages
            .iter()
            .find(|m| m.role == "system")
            .map(|m| m.content.as_str())
            .unwrap_or("");
        let user = request
            .messages
            .iter()
            .find(|m| m.role == "user")
            .map(|m| m.content.as_str())
            .unwrap_or("");

        let reply = if system == prompts::GENERATOR_SYSTEM {
            self.generation_reply(user)
        } else if system == prompts::CLASSIFY_SYSTEM {
            self.classify_reply(user)
        } else if system == prompts::DRAFT_SYSTEM {
            self.draft_reply(user)
        } else if system == prompts::JUDGE_SYSTEM {
            self.judge_reply(user)
        } else {
            // Plain completion (the eval harness sends bare prompts): echo a
            // deterministic acknowledgement of the prompt.
            format!("মক উত্তর {}", bengali_digits(fnv1a(user) % 1_000_000))
        };
        Ok(reply)
    }
}
