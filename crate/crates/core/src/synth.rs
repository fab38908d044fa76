//! Seeded synthetic corpora for tests, demos and the directional checks.
//!
//! Every researcher gets a lognormal talent draw, multiplied by
//! `male_advantage` for men. Talent drives both the number of publications
//! and their expected citations, so with `male_advantage > 1` the male FSS
//! distribution has the higher mean in every field.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};

use crate::corpus::{
    BylineConvention, BylineSlot, Corpus, CorpusBuilder, Field, Gender, Publication, RankCode,
    Researcher, Window,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub fields: usize,
    pub researchers_per_field: usize,
    /// Fields are assigned round-robin to this many discipline areas.
    pub areas: usize,
    pub female_share: f64,
    /// Multiplier on the talent of male researchers.
    pub male_advantage: f64,
    /// Probability that a researcher publishes nothing in the window.
    pub unproductive_rate: f64,
    /// Mean publications per year of a researcher with unit talent.
    pub publications_per_year: f64,
    /// Mean citations of a publication by a researcher with unit talent.
    pub citations_per_publication: f64,
    pub window: Window,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            fields: 4,
            researchers_per_field: 40,
            areas: 2,
            female_share: 0.5,
            male_advantage: 1.5,
            unproductive_rate: 0.1,
            publications_per_year: 0.8,
            citations_per_publication: 6.0,
            window: Window::default(),
            seed: 42,
        }
    }
}

const RANKS: [(&str, f64); 3] = [
    ("assistant", 38_000.0),
    ("associate", 52_000.0),
    ("full", 74_000.0),
];
const TALENT_SIGMA: f64 = 0.6;

fn check(cfg: &SynthConfig) -> Result<()> {
    let bad = |what: &str| Err(Error::Config(format!("synthetic corpus: {what}")));
    if cfg.fields == 0 || cfg.researchers_per_field == 0 || cfg.areas == 0 {
        return bad("fields, researchers_per_field and areas must be positive");
    }
    if !(0.0..=1.0).contains(&cfg.female_share) || !(0.0..1.0).contains(&cfg.unproductive_rate) {
        return bad("female_share must be in [0, 1] and unproductive_rate in [0, 1)");
    }
    if !(cfg.male_advantage > 0.0
        && cfg.publications_per_year > 0.0
        && cfg.citations_per_publication > 0.0)
    {
        return bad("male_advantage and the publication and citation rates must be positive");
    }
    Ok(())
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as u64
}

/// Builds a validated corpus from `cfg`. The same config always yields the same corpus.
pub fn synthetic_corpus(cfg: &SynthConfig) -> Result<Corpus> {
    check(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let talent_dist = LogNormal::new(0.0, TALENT_SIGMA).expect("valid lognormal");
    let window = cfg.window;
    let window_len = window.len();

    let mut b = CorpusBuilder::new(window);
    for (rank, wage) in RANKS {
        b.add_wage(RankCode::from(rank), wage, None)?;
    }

    let width = cfg.researchers_per_field.to_string().len();
    let mut next_pub = 0usize;
    for f in 0..cfg.fields {
        let code = format!("F{:02}", f + 1);
        let area = format!("A{}", f % cfg.areas + 1);
        let convention = if f % 2 == 0 {
            BylineConvention::ContributionOrdered
        } else {
            BylineConvention::Alphabetical
        };
        b.add_field(
            Field {
                code: code.clone(),
                discipline_area: area,
                byline_convention: convention,
            },
            None,
        )?;
        let categories = [format!("{code}-a"), format!("{code}-b")];

        let n = cfg.researchers_per_field;
        let n_female = (cfg.female_share * n as f64).round() as usize;
        let ids: Vec<String> = (0..n)
            .map(|i| format!("{code}-R{:0width$}", i + 1))
            .collect();

        for (i, id) in ids.iter().enumerate() {
            let gender = if i < n_female { Gender::F } else { Gender::M };
            let rank = RANKS[rng.random_range(0..RANKS.len())].0;
            let years_active = if rng.random_bool(0.8) {
                window_len
            } else {
                rng.random_range(1..=window_len)
            };
            let affiliation = format!("U{}", rng.random_range(1..=12));
            b.add_researcher(
                Researcher {
                    id: id.clone(),
                    gender,
                    rank: RankCode::from(rank),
                    field_code: code.clone(),
                    years_active,
                    affiliation_id: affiliation.clone(),
                },
                None,
            )?;

            let mut talent = talent_dist.sample(&mut rng);
            if gender == Gender::M {
                talent *= cfg.male_advantage;
            }
            if rng.random_bool(cfg.unproductive_rate) {
                continue;
            }
            let expected = cfg.publications_per_year * f64::from(years_active) * talent;
            let count = 1 + poisson(&mut rng, expected);
            let first_year = window.end - years_active as i32 + 1;
            for _ in 0..count {
                next_pub += 1;
                let authors = rng.random_range(1..=6usize);
                let own_slot = rng.random_range(0..authors);
                let colleague_slot = (authors > 1 && rng.random_bool(0.25))
                    .then(|| (own_slot + rng.random_range(1..authors)) % authors);
                let mut byline: Vec<BylineSlot> = (0..authors)
                    .map(|_| {
                        let aff = if rng.random_bool(0.5) {
                            affiliation.clone()
                        } else {
                            format!("X{}", rng.random_range(1..=40))
                        };
                        BylineSlot::external(&aff)
                    })
                    .collect();
                byline[own_slot].researcher_id = Some(id.clone());
                byline[own_slot].affiliation_id = affiliation.clone();
                if let Some(slot) = colleague_slot {
                    let colleague = ids.choose(&mut rng).expect("nonempty field");
                    if colleague != id {
                        byline[slot].researcher_id = Some(colleague.clone());
                    }
                }
                let mut subject_categories = vec![categories[rng.random_range(0..2)].clone()];
                if rng.random_bool(0.1) {
                    subject_categories = categories.to_vec();
                }
                b.add_publication(
                    Publication {
                        id: format!("P{next_pub:06}"),
                        year: rng.random_range(first_year..=window.end),
                        subject_categories,
                        citations: poisson(&mut rng, cfg.citations_per_publication * talent),
                        byline,
                    },
                    None,
                )?;
            }
        }
    }
    b.build()
}
