use csapp::corpus::{load_byte_text, Text, TextMode};
use csapp::search::naive_count;
use csapp::Index;
use proptest::prelude::*;

fn scan(text: &[u64], p: &[u64]) -> usize {
    if p.is_empty() {
        return text.len() + 1;
    }
    text.windows(p.len()).filter(|w| *w == p).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn count_matches_scan(
        src in proptest::collection::vec(0u64..6, 0..400),
        pats in proptest::collection::vec(proptest::collection::vec(0u64..7, 0..6), 1..30),
        k in 2usize..20,
        l in 1usize..20,
    ) {
        let text = Text::from_source(TextMode::Token, &src);
        let idx = Index::build(&text, k, l).unwrap();
        for p in &pats {
            prop_assert_eq!(idx.count(p), scan(&src, p));
        }
        let back = Index::read_from(&mut idx.to_bytes().as_slice()).unwrap();
        prop_assert_eq!(back.count_batch(&pats), idx.count_batch_sequential(&pats));
    }

    #[test]
    fn rlz_chunks_cover_stream(
        dict in proptest::collection::vec(b'a'..b'e', 1..200),
        stream in proptest::collection::vec(b'a'..b'g', 0..200),
    ) {
        let rev = load_byte_text(&dict).reversed();
        let idx = Index::build(&rev, 4, 2).unwrap();
        let src: Vec<u64> = stream.iter().map(|&b| b.into()).collect();
        let factors = idx.factorize(&src);
        let fwd = load_byte_text(&dict);
        let mut pos = 0;
        for f in &factors {
            if f.length > 0 {
                let ids: Vec<_> = stream[pos..pos + f.length]
                    .iter()
                    .map(|&b| fwd.alphabet().id_of(b.into()).unwrap())
                    .collect();
                prop_assert!(naive_count(&fwd, &ids) > 0);
            } else {
                prop_assert_eq!(f.literal, Some(u64::from(stream[pos])));
            }
            pos += f.span();
        }
        prop_assert_eq!(pos, stream.len());
    }
}

#[test]
fn k_does_not_change_answers() {
    let raw = b"she sells sea shells by the sea shore; the shells she sells are sea shells";
    let text = load_byte_text(raw);
    let queries: Vec<Vec<u64>> = ["sea", "she", "s", "shells", "shore;", "xx", ""]
        .iter()
        .map(|q| q.bytes().map(u64::from).collect())
        .collect();
    let base = Index::build(&text, 2, 2).unwrap().count_batch(&queries);
    for k in [3, 16, 64, 256] {
        assert_eq!(
            Index::build(&text, k, k).unwrap().count_batch(&queries),
            base
        );
    }
    let src: Vec<u64> = raw.iter().map(|&b| b.into()).collect();
    let want: Vec<usize> = queries.iter().map(|q| scan(&src, q)).collect();
    assert_eq!(base, want);
}
