//! The compact algorithm-notation grammar.
//!
//! Every algorithm is named by a dotted identifier string:
//!
//! - `Hc.P*` — hill climbing on the classical model with symmetry breaking;
//! - `Ts.D` — tabu search on the alternative model, no symmetry breaking;
//! - `Ga.D*.A4.Gd` — genetic algorithm, alternative model with symmetry
//!   breaking, 4-parent greedy crossover;
//! - `Ma.Hc.P*.A2.Ux` — memetic algorithm embedding hill climbing, 2-parent
//!   uniform crossover;
//! - `Bc5(Ts.D,Ma.Hc.P*.A2.Ux)RD` — five cooperating agents under a
//!   broadcast topology, migration policy R, acceptance policy D. A member
//!   may carry a count prefix (`3Ts.P`); uncounted members share the agent
//!   budget as evenly as possible, surplus to the earlier-listed ones.
//!
//! Heads are case-insensitive on input; [`format_spec`] emits the canonical
//! spelling, and `parse(format(x)) == x` for every valid spec.

use std::fmt;

use crate::encoding::{Model, ModelKind};
use crate::error::{Error, Result};

/// Local search flavour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LsMethod {
    HillClimbing,
    TabuSearch,
}

/// Recombination operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Crossover {
    Uniform,
    Greedy,
}

/// Communication topology of a cooperative team.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    Ring,
    Broadcast,
    Random,
}

/// Migration / acceptance policy letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    Random,
    Diverse,
    Worst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalSearchSpec {
    pub method: LsMethod,
    pub kind: ModelKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneticSpec {
    pub kind: ModelKind,
    pub arity: u32,
    pub crossover: Crossover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MemeticSpec {
    pub ls_method: LsMethod,
    pub kind: ModelKind,
    pub arity: u32,
    pub crossover: Crossover,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CooperativeSpec {
    pub topology: Topology,
    pub n: u32,
    /// Members with their multiplicities, in listed order.
    pub members: Vec<(u32, AlgorithmSpec)>,
    pub migration: Policy,
    pub acceptance: Policy,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AlgorithmSpec {
    LocalSearch(LocalSearchSpec),
    Genetic(GeneticSpec),
    Memetic(MemeticSpec),
    Cooperative(CooperativeSpec),
}

impl AlgorithmSpec {
    pub fn is_cooperative(&self) -> bool {
        matches!(self, AlgorithmSpec::Cooperative(_))
    }

    /// Search-space kind of a non-cooperative spec.
    pub fn kind(&self) -> Option<ModelKind> {
        match self {
            AlgorithmSpec::LocalSearch(s) => Some(s.kind),
            AlgorithmSpec::Genetic(s) => Some(s.kind),
            AlgorithmSpec::Memetic(s) => Some(s.kind),
            AlgorithmSpec::Cooperative(_) => None,
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_spec(self))
    }
}

impl CooperativeSpec {
    /// Total member count listed explicitly (uncounted members count as 1).
    pub fn listed_total(&self) -> u32 {
        self.members.iter().map(|(c, _)| *c).sum()
    }

    /// The worst-migration combinations (WR/WD/WW) parse fine but performed
    /// poorly in preliminary studies; the harness warns on them.
    pub fn uses_discouraged_migration(&self) -> bool {
        self.migration == Policy::Worst
    }
}

/// Expands a cooperative member list into exactly `n` agent specs,
/// preserving listed order. When the listed total falls short of `n`, the
/// remaining copies are distributed as evenly as possible with the surplus
/// going to earlier-listed members.
pub fn expand_members(spec: &CooperativeSpec) -> Result<Vec<AlgorithmSpec>> {
    let listed = spec.listed_total();
    if listed > spec.n {
        return Err(Error::Spec(format!(
            "member counts sum to {listed}, exceeding the {} agents",
            spec.n
        )));
    }
    let extra = spec.n - listed;
    let k = spec.members.len() as u32;
    let mut agents = Vec::with_capacity(spec.n as usize);
    for (idx, (count, member)) in spec.members.iter().enumerate() {
        let bonus = extra / k + u32::from((idx as u32) < extra % k);
        for _ in 0..count + bonus {
            agents.push(member.clone());
        }
    }
    debug_assert_eq!(agents.len(), spec.n as usize);
    Ok(agents)
}

/// Parses the notation grammar. Heads are case-insensitive and whitespace
/// is ignored; syntax errors report the byte position.
pub fn parse_spec(text: &str) -> Result<AlgorithmSpec> {
    let mut s = Scanner::new(text);
    s.skip_ws();
    if s.at_end() {
        return Err(s.error("empty algorithm spec"));
    }
    let spec = s.parse_top()?;
    s.skip_ws();
    if !s.at_end() {
        return Err(s.error("trailing input after algorithm spec"));
    }
    Ok(spec)
}

/// Canonical text for a spec; inverse of [`parse_spec`].
pub fn format_spec(spec: &AlgorithmSpec) -> String {
    fn model(kind: ModelKind) -> String {
        let letter = match kind.model {
            Model::Classical => "P",
            Model::Alternative => "D",
        };
        if kind.symmetry_breaking {
            format!("{letter}*")
        } else {
            letter.to_string()
        }
    }
    fn ls(m: LsMethod) -> &'static str {
        match m {
            LsMethod::HillClimbing => "Hc",
            LsMethod::TabuSearch => "Ts",
        }
    }
    fn xover(x: Crossover) -> &'static str {
        match x {
            Crossover::Uniform => "Ux",
            Crossover::Greedy => "Gd",
        }
    }
    match spec {
        AlgorithmSpec::LocalSearch(l) => format!("{}.{}", ls(l.method), model(l.kind)),
        AlgorithmSpec::Genetic(g) => {
            format!("Ga.{}.A{}.{}", model(g.kind), g.arity, xover(g.crossover))
        }
        AlgorithmSpec::Memetic(m) => format!(
            "Ma.{}.{}.A{}.{}",
            ls(m.ls_method),
            model(m.kind),
            m.arity,
            xover(m.crossover)
        ),
        AlgorithmSpec::Cooperative(c) => {
            let topo = match c.topology {
                Topology::Ring => "Ri",
                Topology::Broadcast => "Bc",
                Topology::Random => "Ra",
            };
            let policy = |p: Policy| match p {
                Policy::Random => "R",
                Policy::Diverse => "D",
                Policy::Worst => "W",
            };
            let members: Vec<String> = c
                .members
                .iter()
                .map(|(count, m)| {
                    if *count == 1 {
                        format_spec(m)
                    } else {
                        format!("{count}{}", format_spec(m))
                    }
                })
                .collect();
            format!(
                "{topo}{}({}){}{}",
                c.n,
                members.join(","),
                policy(c.migration),
                policy(c.acceptance)
            )
        }
    }
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::parse(format!("position {}", self.pos), message.into())
    }

    /// Consumes `kw` case-insensitively if present.
    fn eat(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if rest.len() >= kw.len() && rest[..kw.len()].eq_ignore_ascii_case(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kw: &str, what: &str) -> Result<()> {
        if self.eat(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what} `{kw}`")))
        }
    }

    fn parse_int(&mut self, what: &str) -> Result<u32> {
        self.skip_ws();
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return Err(self.error(format!("expected {what}")));
        }
        self.pos += digits.len();
        digits.parse::<u32>().map_err(|_| self.error(format!("{what} out of range")))
    }

    fn peek_int(&mut self) -> Option<u32> {
        self.skip_ws();
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            None
        } else {
            self.pos += digits.len();
            digits.parse::<u32>().ok()
        }
    }

    fn parse_top(&mut self) -> Result<AlgorithmSpec> {
        for (kw, topo) in
            [("Ri", Topology::Ring), ("Bc", Topology::Broadcast), ("Ra", Topology::Random)]
        {
            if self.eat(kw) {
                return self.parse_cooperative(topo);
            }
        }
        self.parse_member()
    }

    fn parse_member(&mut self) -> Result<AlgorithmSpec> {
        if self.eat("Ma") {
            self.expect(".", "separator")?;
            let method = self.parse_ls_method()?;
            self.expect(".", "separator")?;
            let kind = self.parse_model()?;
            self.expect(".", "separator")?;
            let arity = self.parse_arity()?;
            self.expect(".", "separator")?;
            let crossover = self.parse_crossover()?;
            return Ok(AlgorithmSpec::Memetic(MemeticSpec {
                ls_method: method,
                kind,
                arity,
                crossover,
            }));
        }
        if self.eat("Ga") {
            self.expect(".", "separator")?;
            let kind = self.parse_model()?;
            self.expect(".", "separator")?;
            let arity = self.parse_arity()?;
            self.expect(".", "separator")?;
            let crossover = self.parse_crossover()?;
            return Ok(AlgorithmSpec::Genetic(GeneticSpec { kind, arity, crossover }));
        }
        if self.eat("Hc") {
            self.expect(".", "separator")?;
            let kind = self.parse_model()?;
            return Ok(AlgorithmSpec::LocalSearch(LocalSearchSpec {
                method: LsMethod::HillClimbing,
                kind,
            }));
        }
        if self.eat("Ts") {
            self.expect(".", "separator")?;
            let kind = self.parse_model()?;
            return Ok(AlgorithmSpec::LocalSearch(LocalSearchSpec {
                method: LsMethod::TabuSearch,
                kind,
            }));
        }
        Err(self.error("expected algorithm head (Hc, Ts, Ga, Ma, Ri, Bc or Ra)"))
    }

    fn parse_ls_method(&mut self) -> Result<LsMethod> {
        if self.eat("Hc") {
            Ok(LsMethod::HillClimbing)
        } else if self.eat("Ts") {
            Ok(LsMethod::TabuSearch)
        } else {
            Err(self.error("expected local search method (Hc or Ts)"))
        }
    }

    fn parse_model(&mut self) -> Result<ModelKind> {
        let model = if self.eat("P") {
            Model::Classical
        } else if self.eat("D") {
            Model::Alternative
        } else {
            return Err(self.error("expected model letter (P or D)"));
        };
        let symmetry_breaking = self.eat("*");
        Ok(ModelKind::new(model, symmetry_breaking))
    }

    fn parse_arity(&mut self) -> Result<u32> {
        self.expect("A", "arity marker")?;
        let arity = self.parse_int("arity")?;
        if arity < 2 {
            return Err(Error::Spec(format!("arity must be at least 2, got {arity}")));
        }
        Ok(arity)
    }

    fn parse_crossover(&mut self) -> Result<Crossover> {
        if self.eat("Ux") {
            Ok(Crossover::Uniform)
        } else if self.eat("Gd") {
            Ok(Crossover::Greedy)
        } else {
            Err(self.error("expected crossover (Ux or Gd)"))
        }
    }

    fn parse_policy(&mut self) -> Result<Policy> {
        if self.eat("R") {
            Ok(Policy::Random)
        } else if self.eat("D") {
            Ok(Policy::Diverse)
        } else if self.eat("W") {
            Ok(Policy::Worst)
        } else {
            Err(self.error("expected policy letter (R, D or W)"))
        }
    }

    fn parse_cooperative(&mut self, topology: Topology) -> Result<AlgorithmSpec> {
        let n = self.parse_int("agent count")?;
        if n == 0 {
            return Err(Error::Spec("agent count must be at least 1".into()));
        }
        self.expect("(", "member list opener")?;
        let mut members = Vec::new();
        loop {
            let count = self.peek_int().unwrap_or(1);
            if count == 0 {
                return Err(Error::Spec("member multiplier must be positive".into()));
            }
            let member = self.parse_member()?;
            members.push((count, member));
            self.skip_ws();
            if self.eat(",") {
                continue;
            }
            self.expect(")", "member list closer")?;
            break;
        }
        let migration = self.parse_policy()?;
        let acceptance = self.parse_policy()?;
        let spec = CooperativeSpec { topology, n, members, migration, acceptance };
        if spec.listed_total() > n {
            return Err(Error::Spec(format!(
                "member counts sum to {}, exceeding the {n} agents",
                spec.listed_total()
            )));
        }
        Ok(AlgorithmSpec::Cooperative(spec))
    }
}

/// The full catalogue of basic algorithm names.
pub const BASIC_NAMES: [&str; 24] = [
    "Hc.P", "Hc.P*", "Hc.D", "Hc.D*", "Ts.P", "Ts.P*", "Ts.D", "Ts.D*",
    "Ga.P.A2.Gd", "Ga.P*.A2.Gd", "Ga.P.A2.Ux", "Ga.P*.A2.Ux",
    "Ga.D.A2.Gd", "Ga.D*.A2.Gd", "Ga.D.A2.Ux", "Ga.D*.A2.Ux",
    "Ga.P.A4.Gd", "Ga.P*.A4.Gd", "Ga.P.A4.Ux", "Ga.P*.A4.Ux",
    "Ga.D.A4.Gd", "Ga.D*.A4.Gd", "Ga.D.A4.Ux", "Ga.D*.A4.Ux",
];

/// The full catalogue of memetic algorithm names.
pub const MEMETIC_NAMES: [&str; 32] = [
    "Ma.Hc.P.A2.Gd", "Ma.Hc.P*.A2.Gd", "Ma.Hc.D.A2.Gd", "Ma.Hc.D*.A2.Gd",
    "Ma.Hc.P.A2.Ux", "Ma.Hc.P*.A2.Ux", "Ma.Hc.D.A2.Ux", "Ma.Hc.D*.A2.Ux",
    "Ma.Hc.P.A4.Gd", "Ma.Hc.P*.A4.Gd", "Ma.Hc.D.A4.Gd", "Ma.Hc.D*.A4.Gd",
    "Ma.Hc.P.A4.Ux", "Ma.Hc.P*.A4.Ux", "Ma.Hc.D.A4.Ux", "Ma.Hc.D*.A4.Ux",
    "Ma.Ts.P.A2.Gd", "Ma.Ts.P*.A2.Gd", "Ma.Ts.D.A2.Gd", "Ma.Ts.D*.A2.Gd",
    "Ma.Ts.P.A2.Ux", "Ma.Ts.P*.A2.Ux", "Ma.Ts.D.A2.Ux", "Ma.Ts.D*.A2.Ux",
    "Ma.Ts.P.A4.Gd", "Ma.Ts.P*.A4.Gd", "Ma.Ts.D.A4.Gd", "Ma.Ts.D*.A4.Gd",
    "Ma.Ts.P.A4.Ux", "Ma.Ts.P*.A4.Ux", "Ma.Ts.D.A4.Ux", "Ma.Ts.D*.A4.Ux",
];

/// Cooperative names from the published comparison tables.
pub const COOPERATIVE_NAMES: [&str; 17] = [
    "Ra2(Ts.D,Ga.D*.A4.Gd)DW",
    "Bc5(Ts.D,Ga.D*.A4.Gd)RD",
    "Bc4(Ts.D,Ma.Ts.P.A2.Gd)RD",
    "Ri3(Ts.D,Ma.Hc.P*.A2.Ux)RD",
    "Ri5(Ts.D,Ga.D*.A4.Gd)RD",
    "Ra5(Ts.D,Ma.Ts.P.A2.Gd)RD",
    "Ra5(Ts.D,Ga.D*.A4.Gd)RD",
    "Ra3(Ts.D,Ma.Hc.P*.A2.Ux)RD",
    "Bc4(Ts.D,Ma.Hc.P*.A2.Ux)RD",
    "Bc4(Ts.D,Ga.D*.A4.Gd)RD",
    "Ri5(Ts.D,Ma.Ts.P.A2.Gd)RD",
    "Bc2(Ts.D,Ma.Hc.P*.A2.Ux)RD",
    "Ri5(Ts.D,Ma.Hc.P*.A2.Ux)RD",
    "Bc5(Ts.D,Ma.Ts.P.A2.Gd)RD",
    "Ri3(Ts.D,Ga.D*.A4.Gd)RD",
    "Bc2(Ts.D,Ma.Ts.P.A2.Gd)RD",
    "Bc5(Ts.D,Ma.Hc.P*.A2.Ux)RD",
];

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(method: LsMethod, model: Model, sb: bool) -> AlgorithmSpec {
        AlgorithmSpec::LocalSearch(LocalSearchSpec {
            method,
            kind: ModelKind::new(model, sb),
        })
    }

    #[test]
    fn parses_basic_examples() {
        assert_eq!(
            parse_spec("Hc.P*").unwrap(),
            ls(LsMethod::HillClimbing, Model::Classical, true)
        );
        assert_eq!(
            parse_spec("Ga.D*.A2.Ux").unwrap(),
            AlgorithmSpec::Genetic(GeneticSpec {
                kind: ModelKind::new(Model::Alternative, true),
                arity: 2,
                crossover: Crossover::Uniform,
            })
        );
    }

    #[test]
    fn parses_cooperative_with_multiplier_and_mixed_case() {
        let spec = parse_spec("Bc4(3Ts.P, MA.Ts.D*.A4.Gd)RD").unwrap();
        let AlgorithmSpec::Cooperative(c) = spec else { panic!("expected cooperative") };
        assert_eq!(c.topology, Topology::Broadcast);
        assert_eq!(c.n, 4);
        assert_eq!(c.members.len(), 2);
        assert_eq!(c.members[0].0, 3);
        assert_eq!(c.members[0].1, ls(LsMethod::TabuSearch, Model::Classical, false));
        assert_eq!(
            c.members[1],
            (
                1,
                AlgorithmSpec::Memetic(MemeticSpec {
                    ls_method: LsMethod::TabuSearch,
                    kind: ModelKind::new(Model::Alternative, true),
                    arity: 4,
                    crossover: Crossover::Greedy,
                })
            )
        );
        assert_eq!(c.migration, Policy::Random);
        assert_eq!(c.acceptance, Policy::Diverse);
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(
            format_spec(&ls(LsMethod::TabuSearch, Model::Alternative, false)),
            "Ts.D"
        );
        let spec = parse_spec("ra2(ts.d, ga.d*.a4.gd)dw").unwrap();
        assert_eq!(format_spec(&spec), "Ra2(Ts.D,Ga.D*.A4.Gd)DW");
    }

    #[test]
    fn round_trips_every_published_name() {
        for name in BASIC_NAMES
            .iter()
            .chain(MEMETIC_NAMES.iter())
            .chain(COOPERATIVE_NAMES.iter())
        {
            let parsed = parse_spec(name).expect(name);
            let printed = format_spec(&parsed);
            let reparsed = parse_spec(&printed).expect(&printed);
            assert_eq!(parsed, reparsed, "{name}");
            // Canonical text is a fixed point.
            assert_eq!(printed, format_spec(&reparsed));
        }
    }

    #[test]
    fn canonical_text_matches_table_spelling() {
        for name in COOPERATIVE_NAMES {
            assert_eq!(format_spec(&parse_spec(name).unwrap()), name);
        }
    }

    #[test]
    fn expands_members_with_even_split() {
        let spec = parse_spec("Ri3(Ts.D,Ma.Hc.P*.A2.Ux)RD").unwrap();
        let AlgorithmSpec::Cooperative(c) = spec else { unreachable!() };
        let agents = expand_members(&c).unwrap();
        assert_eq!(agents.len(), 3);
        assert_eq!(agents[0], ls(LsMethod::TabuSearch, Model::Alternative, false));
        assert_eq!(agents[1], agents[0]);
        assert!(matches!(agents[2], AlgorithmSpec::Memetic(_)));

        let spec = parse_spec("Ra5(3Ts.P,2Ma.Ts.P.A2.Gd)DW").unwrap();
        let AlgorithmSpec::Cooperative(c) = spec else { unreachable!() };
        let agents = expand_members(&c).unwrap();
        assert_eq!(agents.len(), 5);
        assert_eq!(
            agents.iter().filter(|a| matches!(a, AlgorithmSpec::LocalSearch(_))).count(),
            3
        );

        let spec = parse_spec("Bc2(Ts.D,Ma.Ts.P.A2.Gd)RD").unwrap();
        let AlgorithmSpec::Cooperative(c) = spec else { unreachable!() };
        assert_eq!(expand_members(&c).unwrap().len(), 2);

        // Five agents over two uncounted members: surplus to the earlier one.
        let spec = parse_spec("Bc5(Ts.D,Ma.Hc.P*.A2.Ux)RD").unwrap();
        let AlgorithmSpec::Cooperative(c) = spec else { unreachable!() };
        let agents = expand_members(&c).unwrap();
        assert_eq!(
            agents.iter().filter(|a| matches!(a, AlgorithmSpec::LocalSearch(_))).count(),
            3
        );
        assert_eq!(
            agents.iter().filter(|a| matches!(a, AlgorithmSpec::Memetic(_))).count(),
            2
        );
    }

    #[test]
    fn rejects_syntax_and_spec_errors() {
        assert!(matches!(parse_spec(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("Xx.P"), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("Hc.P extra"), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("Ga.P.A1.Ux"), Err(Error::Spec(_))));
        assert!(matches!(parse_spec("Bc2(3Ts.P,Ga.P.A2.Ux)RD"), Err(Error::Spec(_))));
        match parse_spec("Hc,P") {
            Err(Error::Parse { at, .. }) => assert!(at.contains('2'), "{at}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn worst_migration_parses_with_warning_flag() {
        let spec = parse_spec("Ri2(Hc.P,Ts.P)WD").unwrap();
        let AlgorithmSpec::Cooperative(c) = spec else { unreachable!() };
        assert!(c.uses_discouraged_migration());
    }
}
