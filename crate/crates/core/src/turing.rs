//! Canonical encoding, enumeration and simulation of small Turing machines
//! in the Busy Beaver formalism: one head, blank tape of symbol 0, start in
//! state 1, explicit halt transitions. Dimension 1 runs on a bidirectional
//! tape, dimension 2 on an unbounded grid with 4-way head moves.

use crate::block::Block;
use crate::error::{Error, Result};

/// A `(states, symbols)` rule space of a given dimension.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct RuleSpace {
    states: u8,
    symbols: u8,
    dimension: u8,
}

/// Head movement. `Up`/`Down` only occur in 2-dimensional spaces.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Move {
    Left,
    Right,
    Up,
    Down,
}

/// Transition target: another state or the halt pseudo-state.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Next {
    State(u8),
    Halt,
}

/// One transition-table entry.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Rule {
    pub write: u8,
    pub mv: Move,
    pub next: Next,
}

/// A fully specified machine of some rule space. Rules are stored per table
/// cell `(state, read)` at offset `(state-1)*symbols + read`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TuringMachine {
    space: RuleSpace,
    rules: Vec<Rule>,
}

/// Outcome of running a machine under a step cutoff. `output` is the
/// contents of the minimal contiguous region of cells the head acted on,
/// present exactly when the machine halted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimulationResult {
    pub halted: bool,
    pub steps: u64,
    pub output: Option<Block>,
}

const MOVES_1D: [Move; 2] = [Move::Left, Move::Right];
const MOVES_2D: [Move; 4] = [Move::Left, Move::Right, Move::Up, Move::Down];

impl RuleSpace {
    pub fn new(states: u8, symbols: u8, dimension: u8) -> Result<Self> {
        if states < 1 {
            return Err(Error::InvalidSpace("need at least one state".into()));
        }
        if symbols < 2 {
            return Err(Error::InvalidSpace("need at least two symbols".into()));
        }
        if symbols > 10 {
            return Err(Error::InvalidSpace(
                "symbols are serialized as single digits; at most 10 supported".into(),
            ));
        }
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidSpace("dimension must be 1 or 2".into()));
        }
        Ok(RuleSpace {
            states,
            symbols,
            dimension,
        })
    }

    pub fn states(&self) -> u8 {
        self.states
    }

    pub fn symbols(&self) -> u8 {
        self.symbols
    }

    pub fn dimension(&self) -> u8 {
        self.dimension
    }

    pub fn moves(&self) -> &'static [Move] {
        if self.dimension == 1 {
            &MOVES_1D
        } else {
            &MOVES_2D
        }
    }

    /// Transition-table cells: `states * symbols`.
    pub fn cells(&self) -> usize {
        self.states as usize * self.symbols as usize
    }

    /// Options per table cell: `moves * symbols * (states + 1)`.
    pub fn rules_per_cell(&self) -> u64 {
        self.moves().len() as u64 * self.symbols as u64 * (self.states as u64 + 1)
    }

    /// Total number of machines, `rules_per_cell ^ cells`.
    pub fn machine_count(&self) -> Result<u64> {
        let base = self.rules_per_cell();
        let mut total: u64 = 1;
        for _ in 0..self.cells() {
            total = total
                .checked_mul(base)
                .ok_or_else(|| Error::SpaceTooLarge {
                    space: self.to_string(),
                })?;
        }
        Ok(total)
    }
}

impl std::fmt::Display for RuleSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.states, self.symbols)?;
        if self.dimension == 2 {
            write!(f, "2D")?;
        }
        Ok(())
    }
}

fn decode_rule(space: &RuleSpace, digit: u64) -> Rule {
    let tplus = space.states as u64 + 1;
    let moves = space.moves();
    let write = (digit / (moves.len() as u64 * tplus)) as u8;
    let rem = digit % (moves.len() as u64 * tplus);
    let mv = moves[(rem / tplus) as usize];
    let next_idx = rem % tplus;
    let next = if next_idx == space.states as u64 {
        Next::Halt
    } else {
        Next::State(next_idx as u8 + 1)
    };
    Rule { write, mv, next }
}

fn encode_rule(space: &RuleSpace, rule: &Rule) -> u64 {
    let tplus = space.states as u64 + 1;
    let moves = space.moves();
    let move_idx = moves
        .iter()
        .position(|m| *m == rule.mv)
        .expect("move valid for dimension") as u64;
    let next_idx = match rule.next {
        Next::State(s) => s as u64 - 1,
        Next::Halt => space.states as u64,
    };
    rule.write as u64 * (moves.len() as u64 * tplus) + move_idx * tplus + next_idx
}

/// Decodes machine `idx` of `space`. The encoding is a mixed-radix number:
/// table cell `(state, read)` is digit `(state-1)*symbols + read`, least
/// significant first, and within a cell rules are ordered by
/// `(write, move, next)` with moves `L < R (< U < D)` and halt after the
/// last state.
pub fn machine_from_index(space: RuleSpace, idx: u64) -> Result<TuringMachine> {
    let total = space.machine_count()?;
    if idx >= total {
        return Err(Error::IndexOutOfRange {
            idx,
            space: space.to_string(),
            total,
        });
    }
    let base = space.rules_per_cell();
    let mut rules = Vec::with_capacity(space.cells());
    let mut rest = idx;
    for _ in 0..space.cells() {
        rules.push(decode_rule(&space, rest % base));
        rest /= base;
    }
    Ok(TuringMachine { space, rules })
}

/// Inverse of [`machine_from_index`].
pub fn index_of(machine: &TuringMachine) -> u64 {
    let base = machine.space.rules_per_cell();
    let mut idx = 0u64;
    for rule in machine.rules.iter().rev() {
        idx = idx * base + encode_rule(&machine.space, rule);
    }
    idx
}

impl TuringMachine {
    /// Builds a machine from an explicit rule table (cell order
    /// `(state-1)*symbols + read`).
    pub fn from_rules(space: RuleSpace, rules: Vec<Rule>) -> Result<Self> {
        if rules.len() != space.cells() {
            return Err(Error::Config(format!(
                "rule table must cover all {} cells of {space}",
                space.cells()
            )));
        }
        for rule in &rules {
            if rule.write >= space.symbols {
                return Err(Error::Config(format!(
                    "write symbol {} outside alphabet of {space}",
                    rule.write
                )));
            }
            if !space.moves().contains(&rule.mv) {
                return Err(Error::Config(format!(
                    "move {:?} invalid for dimension {}",
                    rule.mv,
                    space.dimension()
                )));
            }
            if let Next::State(s) = rule.next {
                if s < 1 || s > space.states {
                    return Err(Error::Config(format!("state {s} outside {space}")));
                }
            }
        }
        Ok(TuringMachine { space, rules })
    }

    pub fn space(&self) -> RuleSpace {
        self.space
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, state: u8, read: u8) -> Rule {
        self.rules[(state as usize - 1) * self.space.symbols as usize + read as usize]
    }

    /// The machine with every read and written symbol complemented
    /// (`s -> k-1-s`), moves and targets unchanged.
    pub fn complemented(&self) -> TuringMachine {
        let k = self.space.symbols;
        let mut rules = self.rules.clone();
        for state in 1..=self.space.states {
            for read in 0..k {
                let src = self.rule(state, k - 1 - read);
                rules[(state as usize - 1) * k as usize + read as usize] = Rule {
                    write: k - 1 - src.write,
                    mv: src.mv,
                    next: src.next,
                };
            }
        }
        TuringMachine {
            space: self.space,
            rules,
        }
    }

    /// The machine with every horizontal move reflected (`L <-> R`).
    pub fn mirrored(&self) -> TuringMachine {
        let rules = self
            .rules
            .iter()
            .map(|r| Rule {
                write: r.write,
                mv: match r.mv {
                    Move::Left => Move::Right,
                    Move::Right => Move::Left,
                    other => other,
                },
                next: r.next,
            })
            .collect();
        TuringMachine {
            space: self.space,
            rules,
        }
    }
}

/// Known maximal halting runtimes (Busy Beaver step values) for fully
/// decided 1-dimensional spaces.
fn known_step_bound(space: &RuleSpace) -> Option<u64> {
    if space.dimension != 1 || space.symbols != 2 {
        return None;
    }
    match space.states {
        2 => Some(6),
        3 => Some(21),
        4 => Some(107),
        _ => None,
    }
}

/// Returns `override_cutoff` when given, else the known Busy Beaver step
/// bound for the space, else an error demanding an explicit cutoff.
pub fn halting_cutoff(space: RuleSpace, override_cutoff: Option<u64>) -> Result<u64> {
    if let Some(c) = override_cutoff {
        if c == 0 {
            return Err(Error::Config("cutoff must be at least 1".into()));
        }
        return Ok(c);
    }
    known_step_bound(&space).ok_or_else(|| Error::CutoffRequired {
        space: space.to_string(),
    })
}

/// Reusable simulation scratch for one `(space, cutoff)` pair. Keeps the
/// tape/grid allocation alive across runs so enumeration does not allocate
/// per machine.
pub struct Simulator {
    space: RuleSpace,
    cutoff: u64,
    rules: Vec<Rule>,
    tape: Vec<u8>,
    /// Row stride for dimension 2 (`2*cutoff+1`).
    width: usize,
}

impl Simulator {
    pub fn new(space: RuleSpace, cutoff: u64) -> Self {
        let span = 2 * cutoff as usize + 1;
        let (len, width) = match space.dimension() {
            1 => (span, 0),
            _ => (span * span, span),
        };
        Simulator {
            space,
            cutoff,
            rules: Vec::with_capacity(space.cells()),
            tape: vec![0; len],
            width,
        }
    }

    /// Runs machine `idx`, returning its output when it halts within the
    /// cutoff. The tape is restored to blank before returning.
    pub fn run_index(&mut self, idx: u64) -> Option<Block> {
        let base = self.space.rules_per_cell();
        self.rules.clear();
        let mut rest = idx;
        for _ in 0..self.space.cells() {
            self.rules.push(decode_rule(&self.space, rest % base));
            rest /= base;
        }
        self.run_decoded().map(|(_, out)| out)
    }

    pub fn run_rules(&mut self, rules: &[Rule]) -> (bool, u64, Option<Block>) {
        self.rules.clear();
        self.rules.extend_from_slice(rules);
        match self.run_decoded() {
            Some((steps, out)) => (true, steps, Some(out)),
            None => (false, self.cutoff, None),
        }
    }

    fn run_decoded(&mut self) -> Option<(u64, Block)> {
        match self.space.dimension() {
            1 => self.run_1d(),
            _ => self.run_2d(),
        }
    }

    fn run_1d(&mut self) -> Option<(u64, Block)> {
        let k = self.space.symbols as usize;
        let center = self.cutoff as usize;
        let mut head = center;
        let mut state = 1u8;
        let (mut lo, mut hi) = (head, head);
        let mut outcome = None;
        for step in 1..=self.cutoff {
            let sym = self.tape[head] as usize;
            let rule = self.rules[(state as usize - 1) * k + sym];
            lo = lo.min(head);
            hi = hi.max(head);
            self.tape[head] = rule.write;
            match rule.mv {
                Move::Left => head -= 1,
                Move::Right => head += 1,
                _ => unreachable!("vertical move in 1D space"),
            }
            match rule.next {
                Next::Halt => {
                    let out = Block::string(self.tape[lo..=hi].to_vec())
                        .expect("non-empty visited region");
                    outcome = Some((step, out));
                    break;
                }
                Next::State(s) => state = s,
            }
        }
        self.tape[lo..=hi].fill(0);
        outcome
    }

    fn run_2d(&mut self) -> Option<(u64, Block)> {
        let k = self.space.symbols as usize;
        let w = self.width;
        let center = self.cutoff as usize;
        let (mut row, mut col) = (center, center);
        let mut state = 1u8;
        let (mut lo_r, mut hi_r, mut lo_c, mut hi_c) = (row, row, col, col);
        let mut outcome = None;
        for step in 1..=self.cutoff {
            let sym = self.tape[row * w + col] as usize;
            let rule = self.rules[(state as usize - 1) * k + sym];
            lo_r = lo_r.min(row);
            hi_r = hi_r.max(row);
            lo_c = lo_c.min(col);
            hi_c = hi_c.max(col);
            self.tape[row * w + col] = rule.write;
            match rule.mv {
                Move::Left => col -= 1,
                Move::Right => col += 1,
                Move::Up => row -= 1,
                Move::Down => row += 1,
            }
            match rule.next {
                Next::Halt => {
                    let (rows, cols) = (hi_r - lo_r + 1, hi_c - lo_c + 1);
                    let mut data = Vec::with_capacity(rows * cols);
                    for r in lo_r..=hi_r {
                        data.extend_from_slice(&self.tape[r * w + lo_c..=r * w + hi_c]);
                    }
                    let out = Block::matrix(rows, cols, data).expect("non-empty visited region");
                    outcome = Some((step, out));
                    break;
                }
                Next::State(s) => state = s,
            }
        }
        for r in lo_r..=hi_r {
            self.tape[r * w + lo_c..=r * w + hi_c].fill(0);
        }
        outcome
    }
}

/// Runs `machine` from state 1 on an all-blank tape/grid for at most
/// `cutoff` steps. The transition into halt counts as one step. Output is
/// the contiguous region of cells the head acted on, read left-to-right
/// (row-major in 2D), captured at halt; a machine still running at the
/// cutoff yields `halted: false` and no output.
pub fn run(machine: &TuringMachine, cutoff: u64) -> SimulationResult {
    let mut sim = Simulator::new(machine.space, cutoff);
    let (halted, steps, output) = sim.run_rules(&machine.rules);
    SimulationResult {
        halted,
        steps,
        output,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(t: u8, k: u8) -> RuleSpace {
        RuleSpace::new(t, k, 1).unwrap()
    }

    #[test]
    fn machine_counts() {
        assert_eq!(space(2, 2).machine_count().unwrap(), 20736); // 12^4
        assert_eq!(space(3, 2).machine_count().unwrap(), 16_777_216); // 16^6
        let two_d = RuleSpace::new(2, 2, 2).unwrap();
        assert_eq!(two_d.machine_count().unwrap(), 331_776); // 24^4
    }

    #[test]
    fn first_and_last_machine_of_2_2() {
        let sp = space(2, 2);
        let first = machine_from_index(sp, 0).unwrap();
        for rule in first.rules() {
            assert_eq!(
                *rule,
                Rule {
                    write: 0,
                    mv: Move::Left,
                    next: Next::State(1)
                }
            );
        }
        let last = machine_from_index(sp, 20735).unwrap();
        for rule in last.rules() {
            assert_eq!(
                *rule,
                Rule {
                    write: 1,
                    mv: Move::Right,
                    next: Next::Halt
                }
            );
        }
    }

    #[test]
    fn index_out_of_range_names_total() {
        let err = machine_from_index(space(2, 2), 20736).unwrap_err();
        assert!(err.to_string().contains("20736"), "{err}");
    }

    #[test]
    fn index_round_trip() {
        use rand::{Rng, SeedableRng};
        let sp = space(3, 2);
        let total = sp.machine_count().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let idx = rng.gen_range(0..total);
            let m = machine_from_index(sp, idx).unwrap();
            assert_eq!(index_of(&m), idx);
        }
    }

    #[test]
    fn immediate_halt_writes_one_cell() {
        let sp = space(1, 2);
        let m = TuringMachine::from_rules(
            sp,
            vec![
                Rule {
                    write: 1,
                    mv: Move::Right,
                    next: Next::Halt,
                },
                Rule {
                    write: 0,
                    mv: Move::Left,
                    next: Next::State(1),
                },
            ],
        )
        .unwrap();
        let res = run(&m, 6);
        assert!(res.halted);
        assert_eq!(res.steps, 1);
        assert_eq!(res.output.unwrap().key(), "1");
    }

    #[test]
    fn self_loop_never_halts() {
        let sp = space(1, 2);
        let m = TuringMachine::from_rules(
            sp,
            vec![
                Rule {
                    write: 0,
                    mv: Move::Right,
                    next: Next::State(1),
                },
                Rule {
                    write: 0,
                    mv: Move::Left,
                    next: Next::State(1),
                },
            ],
        )
        .unwrap();
        let res = run(&m, 6);
        assert!(!res.halted);
        assert_eq!(res.steps, 6);
        assert!(res.output.is_none());
    }

    #[test]
    fn busy_beaver_2_2_spans_four_cells() {
        // Champion machine: A0 -> 1RB, A1 -> 1LB, B0 -> 1LA, B1 -> 1RH.
        let sp = space(2, 2);
        let m = TuringMachine::from_rules(
            sp,
            vec![
                Rule {
                    write: 1,
                    mv: Move::Right,
                    next: Next::State(2),
                },
                Rule {
                    write: 1,
                    mv: Move::Left,
                    next: Next::State(2),
                },
                Rule {
                    write: 1,
                    mv: Move::Left,
                    next: Next::State(1),
                },
                Rule {
                    write: 1,
                    mv: Move::Right,
                    next: Next::Halt,
                },
            ],
        )
        .unwrap();
        let res = run(&m, 6);
        assert!(res.halted);
        assert_eq!(res.steps, 6);
        assert_eq!(res.output.unwrap().key(), "1111");
    }

    #[test]
    fn monotone_halting() {
        use rand::{Rng, SeedableRng};
        let sp = space(3, 2);
        let total = sp.machine_count().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let idx = rng.gen_range(0..total);
            let m = machine_from_index(sp, idx).unwrap();
            let short = run(&m, 9);
            let long = run(&m, 21);
            if short.halted {
                assert!(long.halted);
                assert_eq!(short.output, long.output);
                assert_eq!(short.steps, long.steps);
            }
        }
    }

    #[test]
    fn cutoff_rules() {
        assert_eq!(halting_cutoff(space(2, 2), None).unwrap(), 6);
        assert_eq!(halting_cutoff(space(3, 2), None).unwrap(), 21);
        assert_eq!(halting_cutoff(space(4, 2), None).unwrap(), 107);
        assert_eq!(halting_cutoff(space(2, 2), Some(500)).unwrap(), 500);
        assert!(matches!(
            halting_cutoff(space(5, 2), None),
            Err(Error::CutoffRequired { .. })
        ));
        let two_d = RuleSpace::new(4, 2, 2).unwrap();
        assert!(halting_cutoff(two_d, None).is_err());
    }

    #[test]
    fn two_d_simple_walk() {
        // Write 1, move right, then write 1, move down, then halt writing 1:
        // acted cells (0,0) (0,1) (1,1) -> 2x2 box with a blank corner.
        let sp = RuleSpace::new(3, 2, 2).unwrap();
        let mut rules = vec![
            Rule {
                write: 0,
                mv: Move::Left,
                next: Next::State(1)
            };
            6
        ];
        rules[0] = Rule {
            write: 1,
            mv: Move::Right,
            next: Next::State(2),
        };
        rules[2] = Rule {
            write: 1,
            mv: Move::Down,
            next: Next::State(3),
        };
        rules[4] = Rule {
            write: 1,
            mv: Move::Left,
            next: Next::Halt,
        };
        let m = TuringMachine::from_rules(sp, rules).unwrap();
        let res = run(&m, 10);
        assert!(res.halted);
        assert_eq!(res.steps, 3);
        assert_eq!(res.output.unwrap().key(), "2x2:1101");
    }

    #[test]
    fn mirror_reverses_output_exhaustively_on_2_2() {
        let sp = space(2, 2);
        for idx in 0..sp.machine_count().unwrap() {
            let m = machine_from_index(sp, idx).unwrap();
            let rev = m.mirrored();
            let a = run(&m, 6);
            let b = run(&rev, 6);
            assert_eq!(a.halted, b.halted);
            if let (Some(x), Some(y)) = (a.output, b.output) {
                assert_eq!(x.reversed(), y);
            }
        }
    }
}
