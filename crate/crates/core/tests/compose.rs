use std::fs;
use std::path::Path;

use nordlid::ingest::{compose_training_set, dataset_stats, Composition, CorpusSource, IngestError, SourceFormat};
use nordlid::{LabelSet, Language, Split};

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn fixture(dir: &Path) -> Vec<CorpusSource> {
    let da = write(
        dir,
        "da.conllu",
        "# sent_id = 1\n# text = Hej med dig\n1\tHej\n\n# text_en = ignored\n# text = Vi ses\n1\tVi\n\n",
    );
    let nn = write(dir, "nn.txt", "Eg er her\n\nHo kjem no\nVi ses\n");
    let other: String = (0..20)
        .map(|i| format!("{{\"text\":\"sentence number {i}\",\"labels\":[\"other\"]}}\n"))
        .collect();
    let other = write(dir, "other.jsonl", &other);
    let mixed = write(dir, "mixed.jsonl", "{\"text\":\"Jeg har en plan\",\"labels\":[\"da\",\"nb\"]}\n");
    vec![
        CorpusSource::new(&other, SourceFormat::Jsonl, None),
        CorpusSource::new(&da, SourceFormat::Conllu, Some(LabelSet::single(Language::Da))),
        CorpusSource::new(&nn, SourceFormat::Plaintext, Some(LabelSet::single(Language::Nn))),
        CorpusSource::new(&mixed, SourceFormat::Jsonl, None),
    ]
}

#[test]
fn scandinavian_sources_first_then_sampled_other_in_pool_order() {
    let dir = tempfile::tempdir().unwrap();
    let comp = Composition {
        sources: fixture(dir.path()),
        other_sample: Some(5),
        ..Composition::default()
    };
    let d = compose_training_set(&comp, 1).unwrap();
    let texts: Vec<&str> = d.iter().map(|i| i.text.as_str()).collect();
    assert_eq!(
        &texts[..6],
        ["Hej med dig", "Vi ses", "Eg er her", "Ho kjem no", "Vi ses", "Jeg har en plan"]
    );
    let sampled: Vec<usize> = texts[6..]
        .iter()
        .map(|t| t.rsplit(' ').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(sampled.len(), 5);
    assert!(sampled.windows(2).all(|w| w[0] < w[1]), "{sampled:?}");

    assert_eq!(compose_training_set(&comp, 1).unwrap(), d);
    let other_seeds: Vec<_> = (2..6).map(|s| compose_training_set(&comp, s).unwrap()).collect();
    assert!(other_seeds.iter().any(|o| o != &d));

    let stats = dataset_stats(&d);
    assert_eq!(stats.total, 11);
    assert_eq!(stats.count(Language::Da), 3);
    assert_eq!(stats.count(Language::Nb), 1);
    assert_eq!(stats.count(Language::Nn), 3);
    assert_eq!(stats.count(Language::Other), 5);
    assert_eq!(d.items[0].source.as_deref(), Some("da"));
}

#[test]
fn dedup_keeps_first_occurrence() {
    let dir = tempfile::tempdir().unwrap();
    let comp = Composition {
        sources: fixture(dir.path()),
        dedup: true,
        split: Split::Train,
        ..Composition::default()
    };
    let d = compose_training_set(&comp, 0).unwrap();
    assert_eq!(d.iter().filter(|i| i.text == "Vi ses").count(), 1);
    let kept = d.iter().find(|i| i.text == "Vi ses").unwrap();
    assert_eq!(kept.labels, LabelSet::single(Language::Da));
    assert_eq!(d.len(), 5 + 20);
    assert_eq!(d.split, Split::Train);
}

#[test]
fn composition_errors() {
    let dir = tempfile::tempdir().unwrap();
    let comp = Composition {
        sources: fixture(dir.path()),
        other_sample: Some(21),
        ..Composition::default()
    };
    assert!(matches!(
        compose_training_set(&comp, 0),
        Err(IngestError::NotEnoughOther { requested: 21, available: 20 })
    ));

    let unlabeled = CorpusSource::new(dir.path().join("da.conllu"), SourceFormat::Conllu, None);
    let comp = Composition { sources: vec![unlabeled], ..Composition::default() };
    assert!(matches!(compose_training_set(&comp, 0), Err(IngestError::MissingLabels(_))));

    let missing = CorpusSource::new(dir.path().join("nope.conllu"), SourceFormat::Conllu, Some(LabelSet::OTHER));
    let comp = Composition { sources: vec![missing], ..Composition::default() };
    assert!(matches!(compose_training_set(&comp, 0), Err(IngestError::Io { .. })));
}
