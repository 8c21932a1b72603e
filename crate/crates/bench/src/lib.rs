//! Benchmark workloads.

use deontic_core::{parse_problem, AtomId, Formula, Partition, Problem};

const WST: &str = "partition l: A|K\npartition n: 4|7\nobserve c(n,7)\nnorm c(l,A) => O c(n,4)\noption contrapose\n";

const CHISHOLM: &str = "atom s, p\nnorm O ~s\nnorm s\nnorm s -> O p\nnorm O(~s -> ~p)\n";

const SOCIAL: &str = "atom under_21, drink_beer\nobserve under_21\nnorm under_21 => O ~drink_beer\noption contrapose\n";

pub fn wst() -> Problem {
    parse_problem(WST).expect("workload parses")
}

pub fn chisholm() -> Problem {
    parse_problem(CHISHOLM).expect("workload parses")
}

pub fn social_contract() -> Problem {
    parse_problem(SOCIAL).expect("workload parses")
}

/// `n` cards, each a two-valued letter and number partition, with the
/// card rule and its pseudo-contrapositive; card 0 shows 7.
pub fn cards(n: usize) -> Problem {
    let mut p = Problem::new();
    for i in 0..n {
        let letter = Partition::new(format!("l{i}"), ["A", "K"]);
        let number = Partition::new(format!("n{i}"), ["4", "7"]);
        let (a, four) = (letter.atom("A"), number.atom("4"));
        p.add_partition(letter);
        p.add_partition(number);
        p.add_norm(Formula::implies(Formula::Atom(a), Formula::ought(Formula::Atom(four))));
    }
    p.observe(Formula::atom("c(n0,7)"));
    p.apply_contrapose();
    p
}

/// `x0`, and `x_i → □x_{i+1}` for `i < n`: one obligation per link.
pub fn chain(n: usize) -> Problem {
    let mut p = Problem::new();
    let x = |i: usize| Formula::Atom(AtomId::new(format!("x{i}")));
    for i in 0..=n {
        p.atoms.insert(AtomId::new(format!("x{i}")));
    }
    p.observe(x(0));
    for i in 0..n {
        p.add_norm(Formula::implies(x(i), Formula::ought(x(i + 1))));
    }
    p
}

/// `□(x_i → ◇x_{i+1})` nested `n` deep below `x0`: forces a path of fresh
/// worlds in the hypertableau.
pub fn diamonds(n: usize) -> Problem {
    let mut p = Problem::new();
    let x = |i: usize| Formula::Atom(AtomId::new(format!("x{i}")));
    for i in 0..=n {
        p.atoms.insert(AtomId::new(format!("x{i}")));
    }
    let mut f = Formula::Top;
    for i in (0..n).rev() {
        f = Formula::and(Formula::permitted(Formula::and(x(i + 1), Formula::not(x(i)))), Formula::ought(f));
    }
    p.observe(x(0));
    p.add_norm(f);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use deontic_core::analysis::{self, Answer};
    use deontic_core::hypertableau::Config;
    use deontic_core::{Engine, ModalityId};

    #[test]
    fn workloads_have_the_expected_answers() {
        let cfg = Config::default();
        let ok = |p: &Problem| analysis::check_consistency(p, Engine::Hypertableau, &cfg).unwrap().answer;
        assert_eq!(ok(&wst()), Answer::Yes);
        assert_eq!(ok(&chisholm()), Answer::No);
        assert_eq!(ok(&social_contract()), Answer::Yes);
        assert_eq!(ok(&chain(16)), Answer::Yes);
        assert_eq!(ok(&diamonds(8)), Answer::Yes);
        let k = Formula::atom("c(l0,K)");
        let v = analysis::must_check(&cards(3), &k, &ModalityId::ought(), Engine::Both, &cfg).unwrap();
        assert_eq!(v.answer, Answer::Yes);
    }
}
