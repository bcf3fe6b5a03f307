use partgram::grammar::{
    dequantize_coord, lex, parse_program, parse_program_lenient, quantize_coord, render_tokens,
    sort_parts, QuantBox, Token, NUM_BINS,
};
use partgram::synth;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn token() -> impl Strategy<Value = Token> {
    prop_oneof![
        Just(Token::BoxStart),
        Just(Token::BoxEnd),
        Just(Token::AddStart),
        Just(Token::AddEnd),
        Just(Token::DelStart),
        Just(Token::DelEnd),
        Just(Token::ModStart),
        Just(Token::ModEnd),
        (0u32..140).prop_map(Token::Coord),
        "[a-z0-9,.'()-]{1,6}".prop_map(Token::Word),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn program_roundtrips_through_text(seed in any::<u64>()) {
        let p = synth::program(&mut rng(seed), 8);
        prop_assert_eq!(p.validate(), Ok(()));
        let text = p.render().unwrap();
        prop_assert_eq!(parse_program(&lex(&text)).unwrap(), p.clone());
        prop_assert_eq!(parse_program(&p.to_tokens()).unwrap(), p);
    }

    #[test]
    fn lex_inverts_render(tokens in prop::collection::vec(token(), 0..40)) {
        let text = render_tokens(&tokens).unwrap();
        prop_assert_eq!(lex(&text), tokens);
    }

    #[test]
    fn quantization_error_is_bounded(x in -1.0f64..=1.0) {
        let b = quantize_coord(x).unwrap();
        let back = dequantize_coord(u32::from(b)).unwrap();
        prop_assert!((back - x).abs() <= 1.0 / 127.0);
    }

    #[test]
    fn parse_errors_point_inside_input(tokens in prop::collection::vec(token(), 0..30)) {
        if let Err(e) = parse_program(&tokens) {
            prop_assert!(e.offset() < tokens.len() + 1);
        }
        let (_, errors) = parse_program_lenient(&tokens);
        for e in errors {
            prop_assert!(e.offset() < tokens.len() + 1);
        }
    }

    #[test]
    fn lenient_agrees_with_strict_on_valid_input(seed in any::<u64>()) {
        let p = synth::program(&mut rng(seed), 6);
        let (q, errors) = parse_program_lenient(&p.to_tokens());
        prop_assert!(errors.is_empty());
        prop_assert_eq!(q, p);
    }

    #[test]
    fn sort_parts_is_idempotent_and_order_free(seed in any::<u64>(), n in 0usize..12) {
        let mut r = rng(seed);
        let boxes: Vec<QuantBox> = (0..n).map(|_| synth::quant_box(&mut r)).collect();
        let once = sort_parts(&boxes);
        prop_assert_eq!(sort_parts(&once), once.clone());
        let mut reversed = boxes.clone();
        reversed.reverse();
        let keys = |v: &[QuantBox]| v.iter().map(|b| b.order_key()).collect::<Vec<_>>();
        prop_assert_eq!(keys(&sort_parts(&reversed)), keys(&once));
        // Keys are non-decreasing lexicographically on (z, y, x) minima.
        prop_assert!(once.windows(2).all(|w| w[0].order_key() <= w[1].order_key()));
    }
}

#[test]
fn dequantize_then_quantize_is_identity() {
    for b in 0..NUM_BINS {
        let x = dequantize_coord(b).unwrap();
        assert_eq!(u32::from(quantize_coord(x).unwrap()), b);
    }
}

#[test]
fn dense_grid_error_bound() {
    let worst = (0..=10_000)
        .map(|i| -1.0 + 2.0 * f64::from(i) / 10_000.0)
        .map(|x| (dequantize_coord(u32::from(quantize_coord(x).unwrap())).unwrap() - x).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1.0 / 127.0, "worst error {worst}");
}
