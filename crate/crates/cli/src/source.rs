use std::sync::Arc;

use harmonet::bratteli::BratteliDiagram;
use harmonet::input::{read_diagram_spec, read_network_spec};
use harmonet::models::{fixture_by_name, Fixture, FixtureParams};
use harmonet::{Network, VertexId};

use crate::args::SourceArgs;
use crate::Failure;

pub struct Source {
    pub name: String,
    pub network: Arc<dyn Network>,
    pub diagram: Option<Arc<BratteliDiagram>>,
    pub fixture: Option<Fixture>,
}

impl Source {
    pub fn load(a: &SourceArgs) -> Result<Source, Failure> {
        if let Some(path) = &a.network {
            let l = read_network_spec(path)?;
            return Ok(Source { name: l.name, network: l.network, diagram: l.diagram, fixture: None });
        }
        if let Some(path) = &a.diagram {
            let d = Arc::new(read_diagram_spec(path)?);
            return Ok(Source { name: d.name().to_string(), network: Arc::new(d.network()), diagram: Some(d), fixture: None });
        }
        if let Some(name) = &a.fixture {
            let params = FixtureParams { lambda: a.lambda, depth: a.depth, dim: a.dim, matrix: None };
            let fx = fixture_by_name(name, &params)?;
            return Ok(Source { name: fx.name.clone(), network: fx.network.clone(), diagram: fx.diagram.clone(), fixture: Some(fx) });
        }
        Err(Failure::Usage("one of --network, --diagram or --fixture is required".into()))
    }

    pub fn net(&self) -> &dyn Network {
        self.network.as_ref()
    }

    pub fn origin(&self) -> Result<VertexId, Failure> {
        self.network.origin().ok_or_else(|| Failure::Usage(format!("network {} has no origin; pass a vertex", self.name)))
    }

    /// `root` and `origin` name the designated origin.
    pub fn vertex(&self, text: &str) -> Result<VertexId, Failure> {
        match text.trim() {
            "root" | "origin" => self.origin(),
            t => Ok(t.parse::<VertexId>()?),
        }
    }

    pub fn vertex_or_origin(&self, text: Option<&str>) -> Result<VertexId, Failure> {
        match text {
            Some(t) => self.vertex(t),
            None => self.origin(),
        }
    }

    pub fn diagram(&self) -> Result<&Arc<BratteliDiagram>, Failure> {
        self.diagram.as_ref().ok_or_else(|| Failure::Usage(format!("{} is not a Bratteli diagram", self.name)))
    }

    pub fn fixture(&self) -> Result<&Fixture, Failure> {
        self.fixture.as_ref().ok_or_else(|| Failure::Usage("closed forms need --fixture".into()))
    }
}

pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse::<T>().map_err(|_| Failure::Usage(format!("bad {what} entry {s:?}")))).collect()
}
