//! Worked examples for `G = Z2` and `G = Z3`, stored exactly as printed.
//!
//! Elements of `Ξ = G × Ĝ` are written `[j, k]` for `(j, φ_k)`. Matrix
//! entries use the pretty-form syntax, so `e(-1/3)` is `exp(-2πi/3)`.
//! The two `Z3` forms under `printed_only` are not used as ground truth;
//! they are compared against the computed algebras and any mismatch is
//! reported.

/// `U_{(shift, φ_character)}` as printed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylFixture {
    pub element: [i64; 2],
    pub matrix: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupFixture {
    pub name: String,
    pub elements: Vec<[i64; 2]>,
}

/// A commutant form together with the Lagrangian it belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormFixture {
    pub subgroup: String,
    pub form: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupFixtures {
    pub order: u64,
    pub weyl: Vec<WeylFixture>,
    pub lagrangians: Vec<SubgroupFixture>,
    pub forms: Vec<FormFixture>,
    pub printed_only: Vec<FormFixture>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixtures {
    pub groups: Vec<GroupFixtures>,
}

fn weyl(element: [i64; 2], matrix: &str) -> WeylFixture {
    WeylFixture {
        element,
        matrix: matrix.into(),
    }
}

fn subgroup(name: &str, elements: &[[i64; 2]]) -> SubgroupFixture {
    SubgroupFixture {
        name: name.into(),
        elements: elements.to_vec(),
    }
}

fn form(subgroup: &str, form: &str) -> FormFixture {
    FormFixture {
        subgroup: subgroup.into(),
        form: form.into(),
    }
}

impl Fixtures {
    pub fn embedded() -> Self {
        let z2 = GroupFixtures {
            order: 2,
            weyl: vec![
                weyl([0, 0], "[[1,0],[0,1]]"),
                weyl([1, 0], "[[0,1],[1,0]]"),
                weyl([0, 1], "[[1,0],[0,-1]]"),
                weyl([1, 1], "[[0,-1],[1,0]]"),
            ],
            lagrangians: vec![
                subgroup("H1", &[[0, 0], [1, 0]]),
                subgroup("H2", &[[0, 0], [0, 1]]),
                subgroup("H3", &[[0, 0], [1, 1]]),
            ],
            forms: vec![
                form("H1", "[[a,b],[b,a]]"),
                form("H2", "[[a,0],[0,b]]"),
                form("H3", "[[a,b],[-b,a]]"),
            ],
            printed_only: Vec::new(),
        };
        let z3 = GroupFixtures {
            order: 3,
            weyl: vec![
                weyl([0, 0], "[[1,0,0],[0,1,0],[0,0,1]]"),
                weyl([1, 0], "[[0,0,1],[1,0,0],[0,1,0]]"),
                weyl([2, 0], "[[0,1,0],[0,0,1],[1,0,0]]"),
                weyl([0, 1], "[[1,0,0],[0,e(1/3),0],[0,0,e(-1/3)]]"),
                weyl([1, 1], "[[0,0,e(-1/3)],[1,0,0],[0,e(1/3),0]]"),
                weyl([2, 1], "[[0,e(1/3),0],[0,0,e(-1/3)],[1,0,0]]"),
                weyl([0, 2], "[[1,0,0],[0,e(-1/3),0],[0,0,e(1/3)]]"),
                weyl([1, 2], "[[0,0,e(1/3)],[1,0,0],[0,e(-1/3),0]]"),
                weyl([2, 2], "[[0,e(-1/3),0],[0,0,e(1/3)],[1,0,0]]"),
            ],
            lagrangians: vec![
                subgroup("H1", &[[0, 0], [1, 0], [2, 0]]),
                subgroup("H2", &[[0, 0], [0, 1], [0, 2]]),
                subgroup("H3", &[[0, 0], [1, 1], [2, 2]]),
                subgroup("H4", &[[0, 0], [1, 2], [2, 1]]),
            ],
            forms: vec![
                form("H1", "[[a,b,c],[c,a,b],[b,c,a]]"),
                form("H2", "[[a,0,0],[0,b,0],[0,0,c]]"),
            ],
            printed_only: vec![
                form("H3", "[[a,e(-1/3)b,e(-1/3)c],[c,a,e(1/3)c],[b,e(1/3)c,a]]"),
                form("H4", "[[a,e(1/3)b,e(1/3)c],[c,a,e(-1/3)b],[b,e(-1/3)c,a]]"),
            ],
        };
        Fixtures { groups: vec![z2, z3] }
    }

    pub fn for_order(&self, n: u64) -> Option<&GroupFixtures> {
        self.groups.iter().find(|g| g.order == n)
    }
}

impl GroupFixtures {
    pub fn lagrangian(&self, name: &str) -> Option<&SubgroupFixture> {
        self.lagrangians.iter().find(|s| s.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pretty::ParamForm;

    #[test]
    fn every_fixture_parses() {
        let f = Fixtures::embedded();
        for g in &f.groups {
            for w in &g.weyl {
                let m: ParamForm = w.matrix.parse().unwrap();
                assert_eq!(m.dim() as u64, g.order);
                assert!(m.exact_constants().is_some());
            }
            for form in g.forms.iter().chain(&g.printed_only) {
                assert!(g.lagrangian(&form.subgroup).is_some());
                assert_eq!(form.form.parse::<ParamForm>().unwrap().param_count() as u64, g.order);
            }
        }
    }
}
