use num_complex::Complex64;
use proptest::prelude::*;

use brownflow::free_moments::{circ_moment_odes, free_word_moment, FreeWord, Letter};
use brownflow::hj_engine::circ_S_at;
use brownflow::free_moments::S_series;

/// Noncrossing pairings of `word` (true = c, false = c*) that pair each c
/// with a c*, counted by brute force.
fn star_pairings(word: &[bool]) -> u64 {
    if word.is_empty() {
        return 1;
    }
    let mut count = 0;
    // Pair position 0 with j; the inside and the outside are paired separately.
    for j in (1..word.len()).step_by(2) {
        if word[0] != word[j] {
            count += star_pairings(&word[1..j]) * star_pairings(&word[j + 1..]);
        }
    }
    count
}

#[test]
fn catalan_oracle_matches_hierarchy() {
    let mv = circ_moment_odes(Complex64::new(0.0, 0.0), 1.0, 7, 1e-13).unwrap();
    for n in 1..=7 {
        let word: Vec<bool> = (0..2 * n).map(|k| k % 2 == 1).collect();
        let brute = star_pairings(&word) as f64;
        assert!((mv.m[n] - brute).abs() < 1e-9 * brute, "n = {n}: {} vs {brute}", mv.m[n]);
    }
}

fn letters(word: &FreeWord) -> String {
    word.blocks()
        .iter()
        .map(|&(l, k)| match l {
            Letter::A => "a".repeat(k as usize),
            Letter::B => "b".repeat(k as usize),
        })
        .collect()
}

fn word_strategy() -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('a'), Just('b')], 1..=6).prop_map(|v| v.into_iter().collect())
}

fn moments() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.5f64..1.5, 6).prop_map(|mut v| {
        v.insert(0, 1.0);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclic_rotation_invariance(w in word_strategy(), ma in moments(), mb in moments(), shift in 0usize..6) {
        let word = FreeWord::parse(&w).unwrap();
        let s = letters(&word);
        let k = shift % s.len();
        let rotated = format!("{}{}", &s[k..], &s[..k]);
        let a = free_word_moment(&word, &ma, &mb).unwrap();
        let b = free_word_moment(&FreeWord::parse(&rotated).unwrap(), &ma, &mb).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{} -> {}: {} vs {}", s, rotated, a, b);
    }

    #[test]
    fn scalar_letter_factors_out(w in word_strategy(), ma in moments(), beta in -1.5f64..1.5) {
        let word = FreeWord::parse(&w).unwrap();
        let mb: Vec<f64> = (0..7).map(|k| beta.powi(k)).collect();
        let got = free_word_moment(&word, &ma, &mb).unwrap();
        let want = ma[word.degree(Letter::A) as usize] * beta.powi(word.degree(Letter::B) as i32);
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
    }

    #[test]
    fn hierarchy_positive_and_hankel_psd(re in -1.5f64..1.5, im in -1.5f64..1.5, t in 0.0f64..2.0) {
        let mv = circ_moment_odes(Complex64::new(re, im), t, 10, 1e-12).unwrap();
        prop_assert!(mv.m.iter().all(|&m| m >= 0.0));
        prop_assert!((mv.m[1] - (re * re + im * im + t)).abs() <= 1e-10 * (1.0 + mv.m[1]));
        // Hankel matrix [m_{i+j}], normalized to unit diagonal, is PSD.
        let k = 6;
        let d: Vec<f64> = (0..k).map(|i| mv.m[2 * i].sqrt()).collect();
        let h: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| mv.m[i + j] / (d[i] * d[j])).collect()).collect();
        prop_assert!(min_eigenvalue(h) >= -1e-8);
    }
}

/// Smallest eigenvalue of a small symmetric matrix by cyclic Jacobi sweeps.
fn min_eigenvalue(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}

#[test]
fn series_agrees_with_characteristics() {
    for (re, im, t, x) in [(0.5, 0.0, 1.0, 10.0), (0.0, 0.3, 0.5, 6.0), (1.0, 1.0, 0.2, 12.0)] {
        let lambda = Complex64::new(re, im);
        let s = S_series(lambda, x, t, 40).unwrap();
        let hj = circ_S_at(t, lambda, x).unwrap();
        assert!((s.value - hj).abs() <= s.truncation_bound.max(1e-6));
    }
}
