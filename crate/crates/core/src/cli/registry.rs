use std::collections::BTreeMap;

use super::scenario::ModelSpec;
use crate::error::{Error, Result};
use crate::model::{GameModel, PrototypeModel, QuarticModel};

type Constructor = Box<dyn Fn(&ModelSpec) -> Result<Box<dyn GameModel>> + Send + Sync>;

/// Maps scenario model ids to constructors.
pub struct ModelRegistry {
    constructors: BTreeMap<String, Constructor>,
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

fn prototype(spec: &ModelSpec) -> Result<PrototypeModel> {
    PrototypeModel::new(spec.constants.clone(), spec.linear.clone(), spec.matrices.clone(), spec.offset.clone())
}

impl ModelRegistry {
    pub fn empty() -> Self {
        Self { constructors: BTreeMap::new() }
    }

    /// `prototype`, and `quartic` (prototype plus `epsilon |v^i|^4`,
    /// `params.epsilon`, default 0.1).
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("prototype", |spec| Ok(Box::new(prototype(spec)?)));
        r.register("quartic", |spec| {
            let epsilon = match spec.params.get("epsilon") {
                None => 0.1,
                Some(v) => v.as_f64().ok_or_else(|| Error::Config("params.epsilon must be a number".into()))?,
            };
            Ok(Box::new(QuarticModel::new(prototype(spec)?, epsilon)?))
        });
        r
    }

    pub fn register<F>(&mut self, name: &str, ctor: F)
    where
        F: Fn(&ModelSpec) -> Result<Box<dyn GameModel>> + Send + Sync + 'static,
    {
        self.constructors.insert(name.to_string(), Box::new(ctor));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.constructors.keys().map(String::as_str)
    }

    pub fn build(&self, spec: &ModelSpec) -> Result<Box<dyn GameModel>> {
        let ctor = self.constructors.get(&spec.id).ok_or_else(|| {
            let known: Vec<&str> = self.names().collect();
            Error::Config(format!("unknown model id {:?} (known: {})", spec.id, known.join(", ")))
        })?;
        ctor(spec).map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(format!("model {:?}: {other}", spec.id)),
        })
    }
}
