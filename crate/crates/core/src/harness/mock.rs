//! Offline clients realizing the oracle and chance-rate random models.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;

use super::client::{ClientError, GenRequest, ModelClient};
use crate::instance::{meta, TaskInstance, TaskKind};
use crate::mrcr::conversation_from_instance;
use crate::rng::derive_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockKind {
    OraclePerfect,
    UniformChoice,
    UniformConversationOutput,
    Silent,
}

impl MockKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MockKind::OraclePerfect => "oracle",
            MockKind::UniformChoice => "choice",
            MockKind::UniformConversationOutput => "conv",
            MockKind::Silent => "silent",
        }
    }
}

impl fmt::Display for MockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MockKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(MockKind::OraclePerfect),
            "choice" => Ok(MockKind::UniformChoice),
            "conv" => Ok(MockKind::UniformConversationOutput),
            "silent" => Ok(MockKind::Silent),
            other => Err(format!(
                "unknown mock {other:?} (expected oracle, choice, conv or silent)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MockClient {
    kind: MockKind,
    id: String,
}

pub fn mock_client(kind: MockKind) -> MockClient {
    MockClient {
        kind,
        id: format!("mock-{kind}"),
    }
}

impl MockClient {
    pub fn kind(&self) -> MockKind {
        self.kind
    }

    fn answer(&self, inst: &TaskInstance) -> Result<String, ClientError> {
        // Keyed by instance so answers do not depend on scheduling order.
        let mut rng = derive_rng(inst.seed, 0, &format!("mock/{}/{}", self.kind, inst.id));
        Ok(match (self.kind, inst.kind) {
            (MockKind::OraclePerfect, _) => inst.ground_truth.clone(),
            (MockKind::UniformChoice, TaskKind::Idk) => {
                format!("({})", ['A', 'B', 'C', 'D'].choose(&mut rng).unwrap())
            }
            (MockKind::UniformConversationOutput, TaskKind::Mrcr) => {
                let conv = conversation_from_instance(inst)
                    .map_err(|e| ClientError::Config(e.to_string()))?;
                let turn = conv
                    .turns
                    .choose(&mut rng)
                    .ok_or_else(|| ClientError::Config("empty conversation".into()))?;
                let prefix = inst.meta(meta::MRCR_PREFIX).unwrap_or_default();
                format!("{prefix} {}", turn.response)
            }
            _ => String::new(),
        })
    }
}

impl ModelClient for MockClient {
    fn id(&self) -> &str {
        &self.id
    }

    fn generate(&self, req: &GenRequest<'_>) -> Result<String, ClientError> {
        match (self.kind, req.instance) {
            (MockKind::Silent, _) => Ok(String::new()),
            (_, Some(inst)) => self.answer(inst),
            (_, None) => Err(ClientError::Config(format!(
                "mock:{} needs the instance side channel",
                self.kind
            ))),
        }
    }
}
