//! Planted-signal world shared by the integration tests.
//!
//! Each synthetic video shows one short scene described by a template
//! sentence. Frames depict either the whole scene or one of its content
//! concepts, so every content word of a faithful caption has a matching
//! frame while swapped, inserted or garbled words do not.

#![allow(dead_code)]

use std::sync::Arc;

use factvc_core::augment::{
    derive_seed, ing_form, s_form, standard_negatives, standard_positives, triples_for_sentence, Corruption, Family,
    Lexicons, StubTranslator, Transform,
};
use factvc_core::corpus::TripleRecord;
use factvc_core::embedstore::{ConceptSpace, EmbeddingKind, EmbeddingMatrix, EmbeddingStore, SynthTextEncoder};
use factvc_core::scoring::TextFeatures;
use factvc_core::Matrix64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 64;

pub fn small_lexicons() -> Lexicons {
    Lexicons::from_parts(
        &[("man", "woman"), ("boy", "girl"), ("father", "mother"), ("he", "she"), ("king", "queen")],
        &["throw", "kick", "paint", "cut", "wash", "push", "carry", "lift"],
        &["ball", "dart", "box", "cup", "rope", "kite", "drum", "bowl", "hat", "chair"],
        &["red", "blue", "green", "yellow", "black", "white"],
        &["two", "three", "four", "five"],
    )
    .unwrap()
}

pub struct Scene {
    pub person: String,
    pub action: String,
    pub color: String,
    pub object: String,
}

impl Scene {
    pub fn random(rng: &mut ChaCha8Rng, lex: &Lexicons) -> Self {
        let persons = ["man", "woman", "boy", "girl", "father", "mother", "king", "queen"];
        let pick = |rng: &mut ChaCha8Rng, set: &std::collections::BTreeSet<String>| {
            set.iter().collect::<Vec<_>>().choose(rng).unwrap().to_string()
        };
        Self {
            person: persons.choose(rng).unwrap().to_string(),
            action: pick(rng, lex.actions()),
            color: pick(rng, lex.colors()),
            object: pick(rng, lex.objects()),
        }
    }

    pub fn sentence(&self) -> String {
        format!("A {} is {} a {} {}", self.person, ing_form(&self.action), self.color, self.object)
    }

    /// Canned back-translations: German drops the progressive, French
    /// changes the article.
    pub fn round_trips(&self) -> [(String, &'static str, String); 2] {
        let s = self.sentence();
        [
            (s.clone(), "de", format!("A {} {} a {} {}", self.person, s_form(&self.action), self.color, self.object)),
            (s.clone(), "fr", s.replacen("A ", "The ", 1)),
        ]
    }
}

pub struct World {
    pub lexicons: Arc<Lexicons>,
    pub train_scenes: Vec<Scene>,
    pub foil_scenes: Vec<Scene>,
    pub triples: Vec<TripleRecord>,
    pub foil_pairs: Vec<(String, String, usize)>,
    pub encoder: SynthTextEncoder,
    pub space: ConceptSpace,
    /// Frame matrices of the training videos, then the FOIL videos.
    pub frames: Vec<EmbeddingMatrix>,
}

pub fn video_id(i: usize) -> String {
    format!("vid{i:04}")
}

impl World {
    /// Build enough scenes for `n_triples` training triples plus `n_foil`
    /// FOIL pairs, one per fresh video, cycling through the five corruption
    /// families.
    pub fn new(seed: u64, n_triples: usize, n_foil: usize) -> Self {
        let lex = Arc::new(small_lexicons());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let negatives = standard_negatives(lex.clone());
        let mut train_scenes = Vec::new();
        let mut triples = Vec::new();
        while triples.len() < n_triples {
            let scene = Scene::random(&mut rng, &lex);
            let mut stub = StubTranslator::identity();
            for (t, p, out) in scene.round_trips() {
                stub.add_round_trip(&t, p, &out);
            }
            let positives = standard_positives(Arc::new(stub), &["de", "fr"], lex.clone());
            let id = video_id(train_scenes.len());
            let s = derive_seed(seed, &[&id]);
            triples.extend(triples_for_sentence(&id, None, &scene.sentence(), &positives, &negatives, s));
            train_scenes.push(scene);
        }
        let families = [
            Family::PersonSwap,
            Family::ActionSwap,
            Family::ObjectSwap,
            Family::AdjectiveSwap,
            Family::PoorGeneration,
        ];
        let mut foil_scenes = Vec::new();
        let mut foil_pairs = Vec::new();
        while foil_pairs.len() < n_foil {
            let scene = Scene::random(&mut rng, &lex);
            let family = families[foil_pairs.len() % families.len()];
            let t = Corruption::new(family, lex.clone());
            let s = scene.sentence();
            if let Some(neg) = t.apply(&s, rng.gen()).unwrap() {
                foil_pairs.push((s, neg, train_scenes.len() + foil_scenes.len()));
                foil_scenes.push(scene);
            }
        }
        let mut texts: Vec<String> = triples.iter().flat_map(|t| [t.positive.clone(), t.negative.clone()]).collect();
        texts.extend(foil_pairs.iter().flat_map(|(a, b, _)| [a.clone(), b.clone()]));
        let encoder = SynthTextEncoder::fit(&texts, (*lex).clone());
        let mut space = ConceptSpace::new(seed ^ 0x5eed, encoder.n_concepts(), DIM).unwrap();
        let frames = train_scenes
            .iter()
            .chain(&foil_scenes)
            .map(|s| {
                let scene = encoder.content_concepts(&s.sentence()).unwrap();
                let mut rows = vec![scene.clone()];
                rows.extend(scene.iter().map(|&c| vec![c]));
                rows.push(scene);
                space.embed_rows(EmbeddingKind::FramesPre, &rows).unwrap()
            })
            .collect();
        Self { lexicons: lex, train_scenes, foil_scenes, triples, foil_pairs, encoder, space, frames }
    }

    /// First `n` triples.
    pub fn training_triples(&self, n: usize) -> Vec<TripleRecord> {
        self.triples[..n.min(self.triples.len())].to_vec()
    }

    /// Write frames and triple sentence features into an embedding store.
    pub fn write_store(&mut self, store: &EmbeddingStore, triples: &[TripleRecord]) {
        for i in 0..self.train_scenes.len() {
            store.put_frames(&video_id(i), &self.frames[i]).unwrap();
        }
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for t in triples {
            pos.extend_from_slice(self.encoder.encode(&mut self.space, &t.positive).unwrap().0.data());
            neg.extend_from_slice(self.encoder.encode(&mut self.space, &t.negative).unwrap().0.data());
        }
        let write = |data: Vec<f32>, positive: bool| {
            let m = EmbeddingMatrix::new(EmbeddingKind::SentencePre, DIM, data).unwrap();
            factvc_core::embedstore::write_fvce(&m, &store.triples_path(positive)).unwrap();
        };
        write(pos, true);
        write(neg, false);
    }

    pub fn text_features(&mut self, text: &str) -> TextFeatures {
        let (sentence, tokens) = self.encoder.encode(&mut self.space, text).unwrap();
        TextFeatures {
            sentence: sentence.row(0).iter().map(|&x| f64::from(x)).collect(),
            tokens: tokens.to_matrix(),
        }
    }

    pub fn frames_f64(&self, video: usize) -> Matrix64 {
        self.frames[video].to_matrix()
    }
}

