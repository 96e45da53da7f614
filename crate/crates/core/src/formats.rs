//! JSON exchange files for groups, towers, coarse structures and trees.
//!
//! Output goes through `serde_json::Value`, whose maps are ordered, so keys
//! come out sorted and repeated runs are byte-identical.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coarse::CoarseStructure;
use crate::error::{Error, Result};
use crate::groups::{Perm, PermGroup, ProfiniteTower};
use crate::stone::BinaryTree;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

impl GroupFile {
    pub fn from_group(g: &PermGroup) -> Self {
        GroupFile {
            name: g.name().to_string(),
            degree: g.degree(),
            generators: g.generators().iter().map(|p| p.images().to_vec()).collect(),
        }
    }

    pub fn build(&self, max_order: usize) -> Result<PermGroup> {
        let gens = self
            .generators
            .iter()
            .map(|im| {
                if im.len() != self.degree {
                    return Err(Error::DegreeMismatch {
                        expected: self.degree,
                        got: im.len(),
                    });
                }
                Perm::from_images(im.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        PermGroup::generate_bounded(self.name.clone(), self.degree, gens, max_order)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub from: usize,
    pub to: usize,
    /// Image index for each element of level `from`, in breadth-first element order.
    pub element_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerFile {
    pub levels: Vec<GroupFile>,
    pub maps: Vec<MapFile>,
}

impl TowerFile {
    pub fn from_tower(t: &ProfiniteTower) -> Self {
        TowerFile {
            levels: t.levels().iter().map(GroupFile::from_group).collect(),
            maps: t
                .maps()
                .iter()
                .enumerate()
                .map(|(k, m)| MapFile {
                    from: k + 1,
                    to: k,
                    element_map: m.clone(),
                })
                .collect(),
        }
    }

    pub fn build(&self, max_order: usize) -> Result<ProfiniteTower> {
        let levels = self
            .levels
            .iter()
            .map(|g| g.build(max_order))
            .collect::<Result<Vec<_>>>()?;
        let mut maps = vec![None; levels.len().saturating_sub(1)];
        for m in &self.maps {
            if m.from != m.to + 1 || m.to >= maps.len() {
                return Err(Error::Invalid(format!(
                    "map {} -> {} does not join adjacent levels",
                    m.from, m.to
                )));
            }
            if maps[m.to].replace(m.element_map.clone()).is_some() {
                return Err(Error::Invalid(format!("two maps into level {}", m.to)));
            }
        }
        let maps = maps
            .into_iter()
            .enumerate()
            .map(|(k, m)| m.ok_or_else(|| Error::Invalid(format!("no map into level {k}"))))
            .collect::<Result<Vec<_>>>()?;
        ProfiniteTower::new(levels, maps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoarseFile {
    pub size: usize,
    pub triples: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl CoarseFile {
    pub fn from_structure(m: &CoarseStructure) -> Self {
        CoarseFile {
            size: m.size(),
            triples: m.triples().map(|(a, b, c)| [a, b, c]).collect(),
            labels: m.labels().map(<[String]>::to_vec),
        }
    }

    pub fn build(&self) -> Result<CoarseStructure> {
        let m = CoarseStructure::from_triples(self.size, self.triples.iter().map(|t| (t[0], t[1], t[2])))?;
        match &self.labels {
            Some(l) => m.with_labels(l.clone()),
            None => Ok(m),
        }
    }
}

/// Any of the input files, told apart by their keys.
#[derive(Debug, Clone)]
pub enum InputFile {
    Group(GroupFile),
    Tower(TowerFile),
    Coarse(CoarseFile),
    Tree(BinaryTree),
}

impl InputFile {
    pub fn kind(&self) -> &'static str {
        match self {
            InputFile::Group(_) => "group",
            InputFile::Tower(_) => "tower",
            InputFile::Coarse(_) => "coarse",
            InputFile::Tree(_) => "tree",
        }
    }
}

pub fn parse_input(text: &str) -> Result<InputFile> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let has = |k: &str| v.get(k).is_some();
    if has("generators") {
        Ok(InputFile::Group(serde_json::from_value(v)?))
    } else if has("levels") {
        Ok(InputFile::Tower(serde_json::from_value(v)?))
    } else if has("triples") {
        Ok(InputFile::Coarse(serde_json::from_value(v)?))
    } else if has("nodes") {
        let t: BinaryTree = serde_json::from_value(v)?;
        t.validate()?;
        Ok(InputFile::Tree(t))
    } else {
        Err(Error::Parse(
            "unrecognised file: expected a group, tower, coarse or tree object".into(),
        ))
    }
}

pub fn read_input(path: &Path) -> Result<InputFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_input(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::catalog;

    #[test]
    fn group_round_trip() {
        let g = catalog::symmetric(3);
        let text = to_sorted_json(&GroupFile::from_group(&g)).unwrap();
        let InputFile::Group(f) = parse_input(&text).unwrap() else {
            panic!()
        };
        assert_eq!(f.build(100).unwrap().order(), 6);
        assert!(text.find("\"degree\"").unwrap() < text.find("\"generators\"").unwrap());
    }

    #[test]
    fn tower_round_trip() {
        let t = ProfiniteTower::cyclic_chain(&[2, 4, 8]).unwrap();
        let text = to_sorted_json(&TowerFile::from_tower(&t)).unwrap();
        let InputFile::Tower(f) = parse_input(&text).unwrap() else {
            panic!()
        };
        let back = f.build(100).unwrap();
        assert_eq!(back.maps(), t.maps());
    }

    #[test]
    fn coarse_round_trip_and_rejects() {
        let m = CoarseStructure::from_triples(1, [(0, 0, 0)]).unwrap();
        let text = to_sorted_json(&CoarseFile::from_structure(&m)).unwrap();
        let InputFile::Coarse(f) = parse_input(&text).unwrap() else {
            panic!()
        };
        assert_eq!(f.build().unwrap().num_triples(), 1);
        assert!(parse_input(r#"{"size":0,"triples":[]}"#)
            .map(|f| match f {
                InputFile::Coarse(c) => c.build().is_err(),
                _ => false,
            })
            .unwrap());
        assert!(matches!(parse_input("{").unwrap_err(), Error::Parse(_)));
        assert!(parse_input(r#"{"what":1}"#).is_err());
    }

    #[test]
    fn bad_generators_are_input_errors() {
        let f = GroupFile {
            name: "x".into(),
            degree: 3,
            generators: vec![vec![0, 0, 1]],
        };
        assert!(f.build(100).unwrap_err().is_input_error());
        let f = GroupFile {
            name: "x".into(),
            degree: 3,
            generators: vec![vec![1, 0]],
        };
        assert!(f.build(100).unwrap_err().is_input_error());
    }
}
