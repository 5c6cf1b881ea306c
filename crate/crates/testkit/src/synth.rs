//! A synthetic benchmark dataset with topic-clustered vocabulary usage.
//!
//! Nine topics sized like a real passage-judgement campaign, a 250-term
//! vocabulary split into nine topic branches plus one shared branch, and
//! publications whose terms lean heavily on their topic's branch when
//! relevant. The signal is strong enough that any sane measure classifies
//! well, which is what the determinism and stability tests need.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// (not relevant, possibly relevant, relevant) document counts per topic.
pub type TopicSizes = (usize, usize, usize);

/// Nine topics with judged-document counts matching a real campaign's
/// distribution.
pub fn nine_topic_sizes() -> Vec<TopicSizes> {
    vec![
        (122, 38, 182),
        (125, 60, 138),
        (230, 29, 163),
        (356, 27, 207),
        (269, 94, 72),
        (411, 31, 44),
        (360, 9, 47),
        (280, 21, 22),
        (422, 20, 44),
    ]
}

/// The three input files of a synthetic benchmark run, as text.
pub struct SyntheticBenchmark {
    pub vocab_tsv: String,
    pub corpus_tsv: String,
    pub qrels_tsv: String,
}

const BRANCH_COUNT: usize = 10; // topic branches 0..=8, branch 9 is shared
const MIDS: usize = 6;
const LEAVES_PER_MID: usize = 3;
const TERMS_PER_BRANCH: usize = 1 + MIDS + MIDS * LEAVES_PER_MID;
const QUALIFIERS: [&str; 6] = ["q0", "q1", "q2", "q3", "q4", "q5"];

/// Generates the dataset for the given topic sizes.
pub fn generate(seed: u64, sizes: &[TopicSizes]) -> SyntheticBenchmark {
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x53594e54_48455449);

    let mut vocab_tsv = String::new();
    for b in 0..BRANCH_COUNT {
        writeln!(vocab_tsv, "T{b}\tbranch {b}\tC{b}").unwrap();
        for m in 0..MIDS {
            writeln!(vocab_tsv, "T{b}m{m}\tbranch {b} mid {m}\tC{b}.{}", m + 1).unwrap();
            for l in 0..LEAVES_PER_MID {
                writeln!(
                    vocab_tsv,
                    "T{b}m{m}l{l}\tbranch {b} leaf {m}.{l}\tC{b}.{}.{}",
                    m + 1,
                    l + 1
                )
                .unwrap();
            }
        }
    }

    let mut corpus_tsv = String::new();
    let mut qrels_tsv = String::new();
    for (t, &(n0, n1, n2)) in sizes.iter().enumerate() {
        for (grade, count) in [(0u8, n0), (1, n1), (2, n2)] {
            for k in 0..count {
                let doc_id = format!("t{t:02}g{grade}d{k:04}");
                let entries = random_entries(&mut rng, t, grade);
                writeln!(corpus_tsv, "{doc_id}\t{}", entries.join(";")).unwrap();

                writeln!(qrels_tsv, "t{t:02}\t{doc_id}\t{grade}").unwrap();
                if rng.gen_bool(0.5) {
                    let passage_grade = rng.gen_range(0..=grade);
                    writeln!(qrels_tsv, "t{t:02}\t{doc_id}\t{passage_grade}").unwrap();
                }
            }
        }
    }

    SyntheticBenchmark {
        vocab_tsv,
        corpus_tsv,
        qrels_tsv,
    }
}

fn random_entries(rng: &mut ChaCha12Rng, topic: usize, grade: u8) -> Vec<String> {
    let k = rng.gen_range(5..=12);
    let mut picked: Vec<(usize, usize)> = Vec::new(); // (branch, offset)
    let mut guard = 0;
    while picked.len() < k && guard < 200 {
        guard += 1;
        let own_branch_prob = match grade {
            2 => 0.75,
            1 => 0.40,
            _ => 0.0,
        };
        let branch = if rng.gen_bool(own_branch_prob) {
            topic
        } else if rng.gen_bool(0.25) {
            BRANCH_COUNT - 1 // shared branch
        } else {
            // Any topic branch but this topic's own.
            let mut b = rng.gen_range(0..BRANCH_COUNT - 1);
            if b == topic {
                b = (topic + 1) % (BRANCH_COUNT - 1);
            }
            b
        };
        let offset = rng.gen_range(0..TERMS_PER_BRANCH);
        if !picked.contains(&(branch, offset)) {
            picked.push((branch, offset));
        }
    }
    picked
        .into_iter()
        .map(|(branch, offset)| {
            let mut entry = term_id(branch, offset);
            if rng.gen_bool(0.3) {
                entry.push('*');
            }
            let mut quals: Vec<&str> = Vec::new();
            for q in QUALIFIERS {
                if rng.gen_bool(0.08) {
                    quals.push(q);
                }
            }
            if !quals.is_empty() {
                entry.push('/');
                entry.push_str(&quals.join(","));
            }
            entry
        })
        .collect()
}

fn term_id(branch: usize, offset: usize) -> String {
    if offset == 0 {
        return format!("T{branch}");
    }
    let rest = offset - 1;
    let m = rest / (1 + LEAVES_PER_MID);
    let within = rest % (1 + LEAVES_PER_MID);
    if within == 0 {
        format!("T{branch}m{m}")
    } else {
        format!("T{branch}m{m}l{}", within - 1)
    }
}
