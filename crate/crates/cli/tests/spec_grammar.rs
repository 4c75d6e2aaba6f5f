use proptest::prelude::*;
use puiseux::families::FamilySpec;
use puiseux::fgmonoid::FgPresentation;
use puiseux::Rat;
use puiseux_cli::MonoidSpec;

fn family() -> impl Strategy<Value = FamilySpec> {
    prop_oneof![
        prop::sample::select(vec![3u64, 5, 7, 11, 13]).prop_map(|p| FamilySpec::PowDenom { p }),
        prop::sample::select(vec![7u64, 11, 13, 17]).prop_map(|p| FamilySpec::NfNotAf { p }),
        (1u32..5).prop_map(|l| FamilySpec::AfNotF { l }),
        (1u32..5).prop_map(|l| FamilySpec::AfNotNf { l }),
        prop::sample::select(FamilySpec::standard()),
    ]
}

fn fg() -> impl Strategy<Value = FgPresentation> {
    prop::collection::vec((1i64..50, 1i64..50), 1..5)
        .prop_map(|gs| FgPresentation::new(gs.into_iter().map(|(a, b)| Rat::frac(a, b))).unwrap())
}

fn spec() -> impl Strategy<Value = MonoidSpec> {
    prop_oneof![family().prop_map(MonoidSpec::Family), fg().prop_map(MonoidSpec::Fg)]
}

proptest! {
    #[test]
    fn print_parse_roundtrip(s in spec()) {
        let text = s.to_string();
        let back: MonoidSpec = text.parse().unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn fuzzed_text_never_panics(body in "\\PC{0,30}", prefix in prop::sample::select(vec!["", "fg:", "family:", "family:af-not-f{"])) {
        let _ = format!("{prefix}{body}").parse::<MonoidSpec>();
    }

    #[test]
    fn parse_errors_point_inside_the_text(body in "[a-z0-9{}=,/:-]{0,20}") {
        let text = format!("family:{body}");
        if let Err(puiseux::Error::Parse { position, .. }) = text.parse::<MonoidSpec>() {
            prop_assert!(position <= text.len());
        }
    }
}

#[test]
fn unicode_pool_key_prints_ascii() {
    let s: MonoidSpec = "family:af-not-nf{ℓ=2}".parse().unwrap();
    assert_eq!(s.to_string(), "family:af-not-nf{l=2}");
}
