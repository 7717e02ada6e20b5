mod common;

use proptest::prelude::*;

use stemos::stem::{decode_log, encode_log, read_log, reduce, restore, snapshot, write_log, Event, StemError};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn replay_reproduces_the_generator_state(seed in any::<u64>(), len in 1usize..300) {
        let (events, built) = common::event_script(seed, len);
        let folded = reduce(&common::m0(), &events).unwrap();
        prop_assert_eq!(snapshot(&folded), snapshot(&built));
        prop_assert_eq!(folded.version, len as u64);
    }

    #[test]
    fn snapshot_then_residual_fold_matches_full_fold(seed in any::<u64>(), len in 2usize..300, cut in 0.0f64..1.0) {
        let (events, _) = common::event_script(seed, len);
        let k = ((len as f64) * cut) as usize;
        let full = reduce(&common::m0(), &events).unwrap();
        let head = reduce(&common::m0(), &events[..k]).unwrap();
        let resumed = reduce(&restore(&snapshot(&head)).unwrap(), &events[k..]).unwrap();
        prop_assert_eq!(snapshot(&resumed), snapshot(&full));
    }

    #[test]
    fn log_codec_round_trips(seed in any::<u64>(), len in 1usize..120) {
        let (events, _) = common::event_script(seed, len);
        let text = encode_log(&events);
        prop_assert_eq!(decode_log(&text).unwrap(), events);
    }
}

#[test]
fn persisted_log_replays_byte_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("events.jsonl");
    let (events, built) = common::event_script(99, 1000);
    write_log(&path, &events).unwrap();
    let back = read_log(&path).unwrap();
    assert_eq!(snapshot(&reduce(&common::m0(), &back).unwrap()), snapshot(&built));
}

#[test]
fn gaps_and_reordering_are_rejected() {
    let (mut events, _) = common::event_script(5, 20);
    let skipped: Vec<Event> = events.iter().enumerate().filter(|(i, _)| *i != 7).map(|(_, e)| e.clone()).collect();
    let err = reduce(&common::m0(), &skipped).unwrap_err();
    assert!(matches!(err.root(), StemError::SequenceGap { expected: 8, found: 9 }), "{err}");
    events.swap(3, 4);
    assert!(matches!(reduce(&common::m0(), &events).unwrap_err().root(), StemError::SequenceGap { .. }));
}

#[test]
fn truncated_snapshot_is_corrupt() {
    let (events, _) = common::event_script(11, 50);
    let bytes = snapshot(&reduce(&common::m0(), &events).unwrap());
    assert!(matches!(restore(&bytes[..bytes.len() / 2]), Err(StemError::CorruptSnapshot(_))));
}
