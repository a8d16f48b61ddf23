//! Weighted sets of single-qubit unitaries that Babe draws from.

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quantum::{sample_index, Axis, BellState, StateVector, Unitary2};

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub name: String,
    pub unitary: Unitary2,
    pub weight: f64,
}

/// `{(U_k, λ_k)}` with `Σ λ_k = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFamily {
    members: Vec<FamilyMember>,
}

impl UnitaryFamily {
    pub fn new(members: Vec<FamilyMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidFamily("no members".into()));
        }
        if let Some(m) = members.iter().find(|m| m.weight.is_nan() || m.weight < 0.0) {
            return Err(Error::InvalidFamily(format!("negative weight for {}", m.name)));
        }
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidFamily(format!("weights sum to {total}")));
        }
        if let Some(m) = members.iter().find(|m| m.unitary.unitarity_deviation() > 1e-12) {
            return Err(Error::InvalidFamily(format!("{} is not unitary", m.name)));
        }
        Ok(UnitaryFamily { members })
    }

    /// `{I, R_x, R_y, R_z}` with π/2 rotations, each with weight 1/4.
    pub fn standard() -> Self {
        let members = [
            ("I", Unitary2::identity()),
            ("Rx", Unitary2::quarter_turn(Axis::X)),
            ("Ry", Unitary2::quarter_turn(Axis::Y)),
            ("Rz", Unitary2::quarter_turn(Axis::Z)),
        ]
        .into_iter()
        .map(|(name, unitary)| FamilyMember {
            name: name.into(),
            unitary,
            weight: 0.25,
        })
        .collect();
        UnitaryFamily { members }
    }

    /// A single unitary used with certainty.
    pub fn single(name: &str, unitary: Unitary2) -> Self {
        UnitaryFamily {
            members: vec![FamilyMember {
                name: name.into(),
                unitary,
                weight: 1.0,
            }],
        }
    }

    /// Uniform weights over the given unitaries.
    pub fn uniform(named: Vec<(String, Unitary2)>) -> Result<Self> {
        let w = 1.0 / named.len().max(1) as f64;
        Self::new(
            named
                .into_iter()
                .map(|(name, unitary)| FamilyMember {
                    name,
                    unitary,
                    weight: w,
                })
                .collect(),
        )
    }

    /// Parses `standard` / `identity` / a comma list of `I,Rx,Ry,Rz`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        match spec.trim() {
            "standard" | "default" => return Ok(Self::standard()),
            "identity" => return Ok(Self::single("I", Unitary2::identity())),
            _ => {}
        }
        let std = Self::standard();
        let named = spec
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                std.members
                    .iter()
                    .find(|m| m.name.eq_ignore_ascii_case(tok))
                    .map(|m| (m.name.clone(), m.unitary))
                    .ok_or_else(|| Error::InvalidFamily(format!("unknown member `{tok}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::uniform(named)
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn unitary(&self, k: usize) -> &Unitary2 {
        &self.members[k].unitary
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.members[k].weight
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.weight).collect()
    }

    /// Draws a member index according to the weights.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.weights(), rng)
    }

    /// The modified singlet `(U_k ⊗ I)Ψ⁻` on `(first, second)`.
    pub fn pair_state(&self, k: usize, first: &str, second: &str) -> StateVector {
        BellState::PsiMinus
            .state(first, second)
            .apply_unitary(self.unitary(k), first)
            .expect("label present")
    }

    /// Members reordered by `perm` (a permutation of `0..len`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        for &p in perm {
            if p >= self.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidFamily("not a permutation".into()));
            }
        }
        if perm.len() != self.len() {
            return Err(Error::InvalidFamily("not a permutation".into()));
        }
        Ok(UnitaryFamily {
            members: perm.iter().map(|&p| self.members[p].clone()).collect(),
        })
    }

    pub fn names(&self) -> Vec<&str> {
        self.members.iter().map(|m| m.name.as_str()).collect()
    }
}

impl Default for UnitaryFamily {
    fn default() -> Self {
        Self::standard()
    }
}

impl Serialize for UnitaryFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for m in &self.members {
            seq.serialize_element(&(m.name.as_str(), m.weight))?;
        }
        seq.end()
    }
}
