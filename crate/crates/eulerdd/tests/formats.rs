use eulerdd::bf::{parse_formula, parse_function};
use eulerdd::core::boolfun::{BoolFun, Valuation};
use eulerdd::core::pdb::TidDatabase;
use eulerdd::core::Rational;
use eulerdd::ddc;
use eulerdd::tid::{format_rational, parse_database, parse_probability};
use proptest::prelude::*;

proptest! {
    #[test]
    fn parsers_never_panic(text in "[ -~\n]{0,80}") {
        let _ = parse_function(&text);
        let _ = parse_database(&text);
        let db = TidDatabase::full(1, 1, &Rational::new(1.into(), 2.into())).unwrap();
        let _ = ddc::import(&text, &db);
    }

    #[test]
    fn out_of_range_probabilities_are_rejected(p in 2u32..50, q in 1u32..2) {
        let text = format!("R a {p}/{q}\n");
        prop_assert!(parse_database(&text).is_err());
    }

    #[test]
    fn structured_noise_never_panics(lines in proptest::collection::vec("(k|sat|formula|R|S1|T|ddc v1|facts|root|[0-9. |&!()/a-c]){1,6}", 0..8)) {
        let text = lines.join("\n");
        let _ = parse_function(&text);
        let _ = parse_database(&text);
    }

    #[test]
    fn decimals_are_exact(int in 0u32..2, frac in "[0-9]{1,6}") {
        let s = format!("{int}.{frac}");
        let p = parse_probability(&s).unwrap();
        let scale = 10i64.pow(frac.len() as u32);
        let num = i64::from(int) * scale + frac.parse::<i64>().unwrap();
        prop_assert_eq!(&p, &Rational::new(num.into(), scale.into()));
        prop_assert_eq!(parse_probability(&format_rational(&p)).unwrap(), p);
    }

    #[test]
    fn formula_agrees_with_its_clauses(k in 1usize..=3, clauses in proptest::collection::vec(1u8..16, 1..4)) {
        // A CNF over the low variables, written out and evaluated by hand.
        let expr = clauses
            .iter()
            .map(|&c| {
                let vars: Vec<String> = (0..=k).filter(|i| c >> i & 1 == 1).map(|i| i.to_string()).collect();
                if vars.is_empty() { "(0 & !0)".to_string() } else { format!("({})", vars.join(" | ")) }
            })
            .collect::<Vec<_>>()
            .join(" & ");
        let phi = parse_formula(k, &expr).unwrap();
        let expected = BoolFun::from_sat(
            k,
            (0..1u32 << (k + 1)).map(Valuation::from_bits).filter(|nu| {
                clauses.iter().all(|&c| u32::from(c) & ((1 << (k + 1)) - 1) & nu.bits() != 0)
            }),
        )
        .unwrap();
        prop_assert_eq!(phi, expected);
    }
}
