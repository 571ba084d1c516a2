//! Dependency graph captured while a flow runs.
//!
//! Nodes are (target path, argument list) pairs; edges record `hbs::AddDep`
//! calls. Insertion order is preserved so DOT output is deterministic.

/// Index into [`DepGraph::nodes`].
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DepNode {
    pub target: String,
    pub argv: Vec<String>,
}

impl DepNode {
    /// Node label: target path plus space-joined argv when non-empty.
    pub fn label(&self) -> String {
        if self.argv.is_empty() {
            self.target.clone()
        } else {
            format!("{} {}", self.target, self.argv.join(" "))
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct DepGraph {
    nodes: Vec<DepNode>,
    edges: Vec<(NodeId, NodeId)>,
    root: Option<NodeId>,
}

impl DepGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Intern a node, returning its id.
    pub fn add_node(&mut self, target: &str, argv: &[String]) -> NodeId {
        if let Some(idx) = self
            .nodes
            .iter()
            .position(|n| n.target == target && n.argv == argv)
        {
            return idx;
        }
        self.nodes.push(DepNode {
            target: target.to_string(),
            argv: argv.to_vec(),
        });
        self.nodes.len() - 1
    }

    pub fn set_root(&mut self, id: NodeId) {
        self.root = Some(id);
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn add_edge(&mut self, from: NodeId, to: NodeId) {
        if !self.edges.contains(&(from, to)) {
            self.edges.push((from, to));
        }
    }

    pub fn nodes(&self) -> &[DepNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> &DepNode {
        &self.nodes[id]
    }
}

/// Render a graph as DOT text: nodes in insertion order, then edges in
/// insertion order. Two calls on the same graph yield identical bytes.
pub fn emit_dot(g: &DepGraph) -> String {
    let mut out = String::from("digraph deps {\n");
    for n in &g.nodes {
        out.push_str(&format!("    \"{}\";\n", escape(&n.label())));
    }
    for (from, to) in &g.edges {
        out.push_str(&format!(
            "    \"{}\" -> \"{}\";\n",
            escape(&g.nodes[*from].label()),
            escape(&g.nodes[*to].label())
        ));
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
