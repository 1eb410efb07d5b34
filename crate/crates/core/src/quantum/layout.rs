use crate::error::{Error, Result};

/// Ordered named registers. The first-listed register holds the most
/// significant qubits of a basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<(String, usize)>,
}

/// Bit position of one register inside a basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterSpan {
    pub shift: usize,
    pub width: usize,
}

impl RegisterSpan {
    pub fn dim(&self) -> usize {
        1 << self.width
    }

    pub fn mask(&self) -> usize {
        self.dim() - 1
    }

    /// Value this register holds in basis state `index`.
    pub fn value_of(&self, index: usize) -> usize {
        (index >> self.shift) & self.mask()
    }

    /// Basis index with this register cleared, built from the compressed
    /// index `rest` over all other qubits.
    pub fn base_index(&self, rest: usize) -> usize {
        let low = rest & ((1 << self.shift) - 1);
        let high = rest >> self.shift;
        (high << (self.shift + self.width)) | low
    }

    /// Inverse of [`base_index`](Self::base_index) for any index.
    pub fn rest_of(&self, index: usize) -> usize {
        let low = index & ((1 << self.shift) - 1);
        let high = index >> (self.shift + self.width);
        (high << self.shift) | low
    }
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(registers: Vec<(S, usize)>) -> Result<Self> {
        let registers: Vec<(String, usize)> = registers.into_iter().map(|(n, w)| (n.into(), w)).collect();
        if registers.is_empty() {
            return Err(Error::InvalidLayout("layout needs at least one register".into()));
        }
        for (i, (name, width)) in registers.iter().enumerate() {
            if *width == 0 {
                return Err(Error::InvalidLayout(format!("register `{name}` has zero qubits")));
            }
            if registers[..i].iter().any(|(other, _)| other == name) {
                return Err(Error::InvalidLayout(format!("duplicate register `{name}`")));
            }
        }
        Ok(Self { registers })
    }

    pub fn single(name: &str, width: usize) -> Result<Self> {
        Self::new(vec![(name, width)])
    }

    pub fn registers(&self) -> &[(String, usize)] {
        &self.registers
    }

    pub fn total_qubits(&self) -> usize {
        self.registers.iter().map(|(_, w)| w).sum()
    }

    pub fn dim(&self) -> usize {
        1 << self.total_qubits()
    }

    pub fn width(&self, name: &str) -> Result<usize> {
        self.span(name).map(|s| s.width)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|(n, _)| n == name)
    }

    pub fn span(&self, name: &str) -> Result<RegisterSpan> {
        let position = self
            .registers
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))?;
        let shift = self.registers[position + 1..].iter().map(|(_, w)| w).sum();
        Ok(RegisterSpan { shift, width: self.registers[position].1 })
    }

    /// Layout of `self` followed by `other` (tensor product order).
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self> {
        let mut registers = self.registers.clone();
        registers.extend(other.registers.iter().cloned());
        Self::new(registers)
    }

    pub fn without(&self, name: &str) -> Result<Self> {
        self.span(name)?;
        Self::new(self.registers.iter().filter(|(n, _)| n != name).cloned().collect())
    }
}

/// Qubits needed to hold `dim` basis states; at least one.
pub fn qubits_for_dim(dim: usize) -> usize {
    let mut qubits = 1;
    while (1usize << qubits) < dim {
        qubits += 1;
    }
    qubits
}
