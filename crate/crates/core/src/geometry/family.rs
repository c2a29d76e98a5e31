use std::fmt;

use crate::geometry::GeometryError;
use crate::lattice::Site;

/// A finite set of offsets; a healthy site `x` becomes infected once `x + X` is infected.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct UpdateRule {
    sites: Vec<Site>,
}

impl UpdateRule {
    pub fn new(sites: impl IntoIterator<Item = Site>) -> Result<Self, GeometryError> {
        let mut sites: Vec<Site> = sites.into_iter().collect();
        if sites.is_empty() {
            return Err(GeometryError::EmptyRule);
        }
        if sites.contains(&Site::ORIGIN) {
            return Err(GeometryError::OriginInRule);
        }
        sites.sort();
        sites.dedup();
        Ok(UpdateRule { sites })
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self, GeometryError> {
        Self::new(pairs.iter().map(|&p| Site::from(p)))
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Squared diameter of the rule.
    pub fn diameter_sq(&self) -> i128 {
        let mut best = 0;
        for (i, a) in self.sites.iter().enumerate() {
            for b in &self.sites[i + 1..] {
                best = best.max(a.dist_sq(*b));
            }
        }
        best
    }

    /// Vertices of the convex hull in counterclockwise order, collinear points dropped.
    pub fn convex_hull(&self) -> Vec<Site> {
        let pts = &self.sites;
        if pts.len() < 3 {
            return pts.clone();
        }
        let mut lower: Vec<Site> = Vec::new();
        for &p in pts {
            while lower.len() >= 2 && (lower[lower.len() - 1] - lower[lower.len() - 2]).cross(p - lower[lower.len() - 2]) <= 0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Site> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && (upper[upper.len() - 1] - upper[upper.len() - 2]).cross(p - upper[upper.len() - 2]) <= 0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    }

    pub fn rotate90(&self) -> UpdateRule {
        UpdateRule::new(self.sites.iter().map(|s| s.rot90())).expect("rotation keeps a rule valid")
    }
}

impl fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sites.iter().map(Site::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UpdateFamily {
    rules: Vec<UpdateRule>,
    name: Option<String>,
}

impl UpdateFamily {
    pub fn new(rules: impl IntoIterator<Item = UpdateRule>) -> Result<Self, GeometryError> {
        let mut rules: Vec<UpdateRule> = rules.into_iter().collect();
        if rules.is_empty() {
            return Err(GeometryError::EmptyFamily);
        }
        rules.sort();
        rules.dedup();
        Ok(UpdateFamily { rules, name: None })
    }

    /// Convenience constructor from literal offset lists.
    pub fn from_pairs(rules: &[&[(i64, i64)]]) -> Result<Self, GeometryError> {
        let rules = rules.iter().map(|r| UpdateRule::from_pairs(r)).collect::<Result<Vec<_>, _>>()?;
        Self::new(rules)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn rules(&self) -> &[UpdateRule] {
        &self.rules
    }

    /// Squared range: the largest squared distance between two sites of one rule.
    pub fn range_sq(&self) -> i128 {
        self.rules.iter().map(UpdateRule::diameter_sq).max().unwrap_or(0)
    }

    pub fn range(&self) -> f64 {
        (self.range_sq() as f64).sqrt()
    }

    /// Largest |coordinate| among all offsets.
    pub fn reach(&self) -> i64 {
        self.rules
            .iter()
            .flat_map(|r| r.sites())
            .map(|s| s.x.abs().max(s.y.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn rotate90(&self) -> UpdateFamily {
        let mut rules: Vec<UpdateRule> = self.rules.iter().map(UpdateRule::rotate90).collect();
        rules.sort();
        UpdateFamily { rules, name: self.name.clone() }
    }

    /// The family with one more rule.
    pub fn with_rule(&self, rule: UpdateRule) -> UpdateFamily {
        let mut f = UpdateFamily::new(self.rules.iter().cloned().chain([rule])).expect("non-empty");
        f.name = self.name.clone();
        f
    }

    /// Whether every rule of `self` is also a rule of `other`.
    pub fn is_subfamily_of(&self, other: &UpdateFamily) -> bool {
        self.rules.iter().all(|r| other.rules.contains(r))
    }
}
