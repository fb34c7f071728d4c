//! Consensus protocols `ẋᵢ = fᵢ(x)` with polynomial right-hand sides.

use thiserror::Error;

use crate::groebner::Ideal;
use crate::polyring::{Polynomial, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("a protocol needs at least one agent")]
    Empty,
    #[error("{polys} right-hand sides for {vars} variables")]
    LengthMismatch { vars: usize, polys: usize },
    #[error("f{0} is not over the protocol's ring")]
    RingMismatch(usize),
}

/// Ordered tuple `(f₁, …, f_N)` over `N` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protocol {
    ring: Ring,
    polys: Vec<Polynomial>,
}

impl Protocol {
    pub fn new(ring: Ring, polys: Vec<Polynomial>) -> Result<Self, ProtocolError> {
        if ring.nvars() == 0 {
            return Err(ProtocolError::Empty);
        }
        if polys.len() != ring.nvars() {
            return Err(ProtocolError::LengthMismatch {
                vars: ring.nvars(),
                polys: polys.len(),
            });
        }
        if let Some(i) = polys.iter().position(|p| p.ring() != &ring) {
            return Err(ProtocolError::RingMismatch(i + 1));
        }
        Ok(Protocol { ring, polys })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Number of agents `N`.
    pub fn n(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// `I = ⟨fᵢ⟩` with zero right-hand sides dropped.
    pub fn ideal(&self) -> Ideal {
        Ideal::new(&self.ring, self.polys.iter().cloned()).expect("protocol polynomials share its ring")
    }

    /// Copy with every `fᵢ` scaled by `factors[i]`.
    pub fn scaled(&self, factors: &[crate::polyring::Coeff]) -> Protocol {
        Protocol {
            ring: self.ring.clone(),
            polys: self
                .polys
                .iter()
                .zip(factors)
                .map(|(p, c)| p.scale(c))
                .collect(),
        }
    }
}

/// `J = ⟨x₁−x₂, x₂−x₃, …, x_{N−1}−x_N⟩`, whose variety is the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalIdeal(Ideal);

impl DiagonalIdeal {
    pub fn new(ring: &Ring) -> Self {
        let gens = (1..ring.nvars()).map(|i| &ring.var(i - 1) - &ring.var(i));
        DiagonalIdeal(Ideal::new(ring, gens).expect("generators built over ring"))
    }

    pub fn ideal(&self) -> &Ideal {
        &self.0
    }

    pub fn generators(&self) -> &[Polynomial] {
        self.0.generators()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let r = Ring::indexed("x", 2);
        assert_eq!(
            Protocol::new(r.clone(), vec![r.var(0)]),
            Err(ProtocolError::LengthMismatch { vars: 2, polys: 1 })
        );
        assert_eq!(Protocol::new(Ring::new(Vec::<String>::new()), vec![]), Err(ProtocolError::Empty));
        let other = Ring::indexed("y", 2);
        assert_eq!(
            Protocol::new(r.clone(), vec![r.var(0), other.var(0)]),
            Err(ProtocolError::RingMismatch(2))
        );
        assert!(Protocol::new(r.clone(), vec![r.var(0), r.zero()]).is_ok());
    }

    #[test]
    fn diagonal_generators() {
        let r = Ring::indexed("x", 4);
        let j = DiagonalIdeal::new(&r);
        let shown: Vec<String> = j.generators().iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["x1 - x2", "x2 - x3", "x3 - x4"]);
        assert!(DiagonalIdeal::new(&Ring::indexed("x", 1)).ideal().is_zero_ideal());
    }

    #[test]
    fn ideal_drops_zero_rows() {
        let r = Ring::indexed("x", 3);
        let p = Protocol::new(r.clone(), vec![&r.var(1) - &r.var(0), r.zero(), r.zero()]).unwrap();
        assert_eq!(p.ideal().generators().len(), 1);
    }
}
