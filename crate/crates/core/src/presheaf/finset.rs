use serde::Serialize;

/// A finite set `{0, .., size-1}`, optionally labelled.
///
/// Equality compares sizes only; labels are presentation.
#[derive(Clone, Debug, Default, Serialize)]
pub struct FinSet {
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl PartialEq for FinSet {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
    }
}

impl Eq for FinSet {}

impl FinSet {
    pub fn new(size: usize) -> Self {
        Self { size, labels: None }
    }

    /// Fails when labels repeat.
    pub fn labelled(labels: Vec<String>) -> Result<Self, String> {
        let mut sorted = labels.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(format!("duplicate element label `{}`", w[0]));
        }
        Ok(Self {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) if i < l.len() => l[i].clone(),
            _ => i.to_string(),
        }
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        match &self.labels {
            Some(l) => l.iter().position(|x| x == label),
            None => label.parse().ok().filter(|&i| i < self.size),
        }
    }
}
