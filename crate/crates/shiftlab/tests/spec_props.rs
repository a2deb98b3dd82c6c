use proptest::prelude::*;
use serde_json::json;
use shiftlab::parse_shift_spec;

fn matrix(dim: usize) -> impl Strategy<Value = Vec<Vec<[f64; 2]>>> {
    prop::collection::vec(prop::collection::vec(prop::array::uniform2(-1e3f64..1e3), dim), dim)
}

fn spec(dim: usize) -> impl Strategy<Value = String> {
    (
        prop::collection::vec(matrix(dim), 1..4),
        prop::collection::vec(matrix(dim), 1..4),
        -5i64..5,
        -3i64..3,
    )
        .prop_map(move |(p, e, lo, k)| {
            json!({
                "dim": dim,
                "shifts": {
                    "P": {"variant": "periodic", "weights": p},
                    "E": {"variant": "eventually_identity", "lo": lo, "weights": e},
                },
                "operators": {"U": {"bands": {k.to_string(): {"variant": "periodic", "weights": p}}}},
                "tasks": [{"op": "decide", "s": "P", "t": "E", "m": k}],
            })
            .to_string()
        })
}

proptest! {
    #[test]
    fn spec_json_round_trips(text in (1usize..4).prop_flat_map(spec)) {
        let model = parse_shift_spec(&text).unwrap();
        let once = model.to_json();
        let again = parse_shift_spec(&once).unwrap();
        prop_assert_eq!(&once, &again.to_json());
        for n in -6..6 {
            prop_assert_eq!(model.shift("P").weight(n), again.shift("P").weight(n));
            prop_assert_eq!(model.shift("E").weight(n), again.shift("E").weight(n));
        }
    }
}
