use crate::error::{Error, Result};

/// Partition of the material interval `[0, L]` into line elements.
///
/// Degrees of freedom are ordered node-major: the `d` components of node 0,
/// then those of node 1, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    length: f64,
    dim: usize,
    node_coords: Vec<f64>,
    elem_lengths: Vec<f64>,
}

impl Mesh {
    /// Uniform mesh of `n_el` elements in `d` spatial dimensions.
    pub fn uniform(length: f64, n_el: usize, dim: usize) -> Result<Self> {
        check_common(length, n_el, dim)?;
        let spacing = length / n_el as f64;
        let mut node_coords: Vec<f64> = (0..=n_el).map(|i| length * i as f64 / n_el as f64).collect();
        node_coords[n_el] = length;
        Ok(Self {
            length,
            dim,
            node_coords,
            elem_lengths: vec![spacing; n_el],
        })
    }

    /// Mesh from explicit, strictly increasing node coordinates starting at 0.
    pub fn from_nodes(node_coords: Vec<f64>, dim: usize) -> Result<Self> {
        if node_coords.len() < 2 {
            return Err(Error::Config("a mesh needs at least two nodes".into()));
        }
        let length = *node_coords.last().unwrap();
        check_common(length, node_coords.len() - 1, dim)?;
        if node_coords[0] != 0.0 {
            return Err(Error::Config(format!(
                "first node must sit at s = 0, got {}",
                node_coords[0]
            )));
        }
        let elem_lengths: Vec<f64> = node_coords.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(e) = elem_lengths.iter().position(|&l| !(l > 0.0)) {
            return Err(Error::Config(format!(
                "node coordinates must be strictly increasing (element {e})"
            )));
        }
        Ok(Self {
            length,
            dim,
            node_coords,
            elem_lengths,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_elements(&self) -> usize {
        self.elem_lengths.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.node_coords.len()
    }

    /// Number of position (or velocity) degrees of freedom.
    pub fn n_dofs(&self) -> usize {
        self.n_nodes() * self.dim
    }

    pub fn node_coords(&self) -> &[f64] {
        &self.node_coords
    }

    pub fn elem_lengths(&self) -> &[f64] {
        &self.elem_lengths
    }

    pub fn element_length(&self, e: usize) -> f64 {
        self.elem_lengths[e]
    }

    #[inline]
    pub fn dof(&self, node: usize, component: usize) -> usize {
        node * self.dim + component
    }

    /// Position DOFs of element `e`'s left and right node.
    pub fn element_dofs(&self, e: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let d = self.dim;
        (e * d..(e + 1) * d, (e + 1) * d..(e + 2) * d)
    }

    pub fn last_node(&self) -> usize {
        self.n_nodes() - 1
    }
}

fn check_common(length: f64, n_el: usize, dim: usize) -> Result<()> {
    let mut errors = Vec::new();
    if !(length > 0.0 && length.is_finite()) {
        errors.push(format!("string length must be positive, got {length}"));
    }
    if n_el == 0 {
        errors.push("need at least one element".to_string());
    }
    if !(1..=3).contains(&dim) {
        errors.push(format!("spatial dimension must be 1, 2 or 3, got {dim}"));
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(errors.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pendulum_mesh() {
        let mesh = Mesh::uniform(1.0, 30, 2).unwrap();
        assert_eq!(mesh.n_nodes(), 31);
        assert_eq!(mesh.n_dofs(), 62);
        assert_eq!(mesh.node_coords()[0], 0.0);
        assert_eq!(mesh.node_coords()[30], 1.0);
        for w in mesh.node_coords().windows(2) {
            assert!((w[1] - w[0] - 1.0 / 30.0).abs() < 1e-15);
        }
        let total: f64 = mesh.elem_lengths().iter().sum();
        assert!((total - 1.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn single_element_and_uniform_partition() {
        let mesh = Mesh::uniform(1.0, 1, 2).unwrap();
        assert_eq!(mesh.node_coords(), &[0.0, 1.0]);
        let mesh = Mesh::uniform(2.0, 4, 3).unwrap();
        assert!(mesh.elem_lengths().iter().all(|&l| l == 0.5));
        assert_eq!(mesh.dof(2, 1), 7);
    }

    #[test]
    fn invalid_arguments_are_rejected() {
        assert!(Mesh::uniform(0.0, 3, 2).is_err());
        assert!(Mesh::uniform(1.0, 0, 2).is_err());
        assert!(Mesh::uniform(1.0, 3, 4).is_err());
        assert!(Mesh::uniform(1.0, 3, 0).is_err());
        assert!(Mesh::from_nodes(vec![0.0, 0.5, 0.5, 1.0], 2).is_err());
        assert!(Mesh::from_nodes(vec![0.1, 1.0], 2).is_err());
        assert!(Mesh::from_nodes(vec![0.0], 2).is_err());
    }

    #[test]
    fn nonuniform_nodes() {
        let mesh = Mesh::from_nodes(vec![0.0, 0.25, 1.0], 2).unwrap();
        assert_eq!(mesh.elem_lengths(), &[0.25, 0.75]);
        assert_eq!(mesh.length(), 1.0);
    }
}
