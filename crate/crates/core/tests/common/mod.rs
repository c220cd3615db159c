//! Random reactive programs in simplified form, and random properties over
//! their states.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use reactive_mc::ast::Formula;
use reactive_mc::parser::{parse_formula, Program};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// The seed from `RMC_SEED`, or the fixed default.
pub fn seed() -> u64 {
    std::env::var("RMC_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(offset: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed().wrapping_add(offset))
}

const BITS: [&str; 2] = ["O", "I"];

fn state(rng: &mut impl Rng) -> String {
    format!("(St {} {})", BITS[rng.gen_range(0..2)], BITS[rng.gen_range(0..2)])
}

pub struct Generated {
    pub source: String,
    pub program: Program,
    pub events: Vec<String>,
}

/// A program with at most `max_funs` functions over at most `max_events`
/// events. Every function dispatches on the next event; a few branches go
/// through a let-bound continuation, which the verifier cannot see through.
pub fn program(rng: &mut impl Rng, max_funs: usize, max_events: usize) -> Generated {
    build(rng, max_funs, max_events, false)
}

/// Like [`program`], but every function is entered with one fixed state and
/// no branch is let-bound, so the program has a transition system.
pub fn lts_program(rng: &mut impl Rng, max_funs: usize, max_events: usize) -> Generated {
    build(rng, max_funs, max_events, true)
}

fn build(rng: &mut impl Rng, max_funs: usize, max_events: usize, fixed: bool) -> Generated {
    let nfun = rng.gen_range(1..=max_funs);
    let nev = rng.gen_range(1..=max_events);
    let events: Vec<String> = (1..=nev).map(|i| format!("E{i}")).collect();
    let mut src = format!("data Event = {}\ndata Bit = O | I\ndata State = St Bit Bit\n\n", events.join(" | "));
    let states: Vec<String> = (0..=nfun).map(|_| state(rng)).collect();
    src.push_str(&format!("Cons {} (g1 es) where\n", states[1]));
    for f in 1..=nfun {
        let mut chosen: Vec<&String> = events.iter().filter(|_| rng.gen_bool(0.5)).collect();
        chosen.shuffle(rng);
        let wildcard = chosen.len() < events.len() || rng.gen_bool(0.1);
        let mut arms: Vec<String> = chosen.iter().map(|e| format!("{e} -> {}", branch(rng, nfun, fixed.then_some(&states)))).collect();
        if wildcard || arms.is_empty() {
            arms.push(format!("_ -> {}", branch(rng, nfun, fixed.then_some(&states))));
        }
        src.push_str(&format!(
            "  g{f} = \\es -> case es of Cons e es -> case e of {}\n",
            arms.join(" | ")
        ));
    }
    let program = Program::parse(&src).unwrap_or_else(|e| panic!("generated program does not parse: {e}\n{src}"));
    Generated { source: src, program, events }
}

fn branch(rng: &mut impl Rng, nfun: usize, fixed: Option<&Vec<String>>) -> String {
    let target = rng.gen_range(1..=nfun);
    let s = match fixed {
        Some(states) => states[target].clone(),
        None => state(rng),
    };
    if fixed.is_none() && rng.gen_bool(0.04) {
        format!("(let k = Cons {s} (g{target} es) in k)")
    } else {
        format!("Cons {s} (g{target} es)")
    }
}

const ATOMS: [&str; 6] = [
    "{ case s of St a b -> case a of I -> True | _ -> False }",
    "{ case s of St a b -> case b of I -> True | _ -> False }",
    "{ case s of St a b -> case a of O -> (case b of O -> True | _ -> False) | _ -> False }",
    "{ case s of St a b -> case b of O -> Undefined | _ -> True }",
    "{ True }",
    "{ False }",
];

/// A formula text with at most `temporal` nested temporal operators.
pub fn formula_text(rng: &mut impl Rng, depth: usize, temporal: usize) -> String {
    let atom_weight = if depth == 0 { 1.0 } else { 0.25 };
    if rng.gen_bool(atom_weight) {
        let i = if rng.gen_bool(0.9) {
            rng.gen_range(0..3)
        } else {
            rng.gen_range(3..ATOMS.len())
        };
        return ATOMS[i].to_string();
    }
    let pick = rng.gen_range(0..7);
    let sub = |rng: &mut _, t| formula_text(rng, depth - 1, t);
    match pick {
        0..=2 if temporal > 0 => {
            let op = ["G", "F", "X"][pick];
            format!("{op} ({})", sub(rng, temporal - 1))
        }
        3 => format!("!({})", sub(rng, temporal)),
        4 => format!("({}) && ({})", sub(rng, temporal), sub(rng, temporal)),
        5 => format!("({}) || ({})", sub(rng, temporal), sub(rng, temporal)),
        _ => format!("({}) => ({})", sub(rng, temporal), sub(rng, temporal)),
    }
}

pub fn formula(rng: &mut impl Rng, program: &Program) -> (String, Formula) {
    let text = formula_text(rng, 3, 2);
    let f = parse_formula(&text, &program.universe).unwrap_or_else(|e| panic!("{text}: {e}"));
    (text, f)
}

/// A random subset of the events, sometimes empty, sometimes all.
pub fn fair_events(rng: &mut impl Rng, events: &[String]) -> Vec<String> {
    match rng.gen_range(0..4) {
        0 => Vec::new(),
        1 => events.to_vec(),
        _ => events.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect(),
    }
}
