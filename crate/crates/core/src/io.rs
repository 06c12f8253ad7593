//! JSON formats for instances and packings.
//!
//! Instance: `{"boxes":[{"l":"3/5","w":"0.5","h":"0.25"}, ...]}` with an
//! optional `"id"` per box (default: position) and an optional
//! `"meta":{"known_opt":"3"}`. Sizes may be fraction or decimal strings or
//! JSON numbers. Packing: `{"height":H,"placements":[{"id":i,"x":..,"y":..,"z":..}]}`
//! with coordinates written as exact fraction strings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Box3, BoxId, Instance, Packing, Placement};
use crate::rational::{serde_rational, Rational};

#[derive(Debug, Serialize, Deserialize)]
struct BoxRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<BoxId>,
    #[serde(with = "serde_rational")]
    l: Rational,
    #[serde(with = "serde_rational")]
    w: Rational,
    #[serde(with = "serde_rational")]
    h: Rational,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "optional_rational")]
    known_opt: Option<Rational>,
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceRecord {
    boxes: Vec<BoxRecord>,
    #[serde(default, skip_serializing_if = "is_empty_meta")]
    meta: Meta,
}

fn is_empty_meta(m: &Meta) -> bool {
    m.known_opt.is_none()
}

mod optional_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => serde_rational::serialize(r, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        serde_rational::deserialize(d).map(Some)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct PlacementRecord {
    id: BoxId,
    #[serde(with = "serde_rational")]
    x: Rational,
    #[serde(with = "serde_rational")]
    y: Rational,
    #[serde(with = "serde_rational")]
    z: Rational,
}

#[derive(Debug, Serialize, Deserialize)]
struct PackingRecord {
    #[serde(with = "serde_rational")]
    height: Rational,
    placements: Vec<PlacementRecord>,
}

/// An instance read from JSON together with its optional known optimum.
#[derive(Debug, Clone)]
pub struct InstanceFile {
    pub instance: Instance,
    pub known_opt: Option<Rational>,
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let record: InstanceRecord =
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let boxes = record
        .boxes
        .into_iter()
        .enumerate()
        .map(|(pos, b)| Box3::new(b.id.unwrap_or(pos), b.l, b.w, b.h))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(InstanceFile {
        instance: Instance::new(boxes)?,
        known_opt: record.meta.known_opt,
    })
}

pub fn instance_to_json(instance: &Instance, known_opt: Option<&Rational>) -> String {
    let record = InstanceRecord {
        boxes: instance
            .boxes()
            .iter()
            .map(|b| BoxRecord {
                id: Some(b.id),
                l: b.length.clone(),
                w: b.width.clone(),
                h: b.height.clone(),
            })
            .collect(),
        meta: Meta {
            known_opt: known_opt.cloned(),
        },
    };
    serde_json::to_string_pretty(&record).expect("instance serialises")
}

/// Reads a packing; the declared height is kept as-is for validation.
pub fn parse_packing(text: &str) -> Result<Packing> {
    let record: PackingRecord =
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let placements = record
        .placements
        .into_iter()
        .map(|p| Placement::new(p.id, p.x, p.y, p.z))
        .collect();
    Ok(Packing::with_declared_height(placements, record.height))
}

pub fn packing_to_json(packing: &Packing) -> String {
    let record = PackingRecord {
        height: packing.height().clone(),
        placements: packing
            .placements()
            .iter()
            .map(|p| PlacementRecord {
                id: p.box_id,
                x: p.x.clone(),
                y: p.y.clone(),
                z: p.z.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&record).expect("packing serialises")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn parses_the_documented_shape() {
        let f = parse_instance(r#"{"boxes":[{"l":"3/5","w":"0.5","h":"0.25"},{"l":1,"w":0.5,"h":"1"}]}"#)
            .unwrap();
        let b = &f.instance.boxes()[0];
        assert_eq!((b.id, &b.length, &b.width, &b.height), (0, &rat(3, 5), &rat(1, 2), &rat(1, 4)));
        assert_eq!(f.instance.boxes()[1].length, int(1));
        assert!(f.known_opt.is_none());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_instance("{"), Err(Error::Format(_))));
        assert!(matches!(
            parse_instance(r#"{"boxes":[{"l":"0","w":"1","h":"1"}]}"#),
            Err(Error::Model(_))
        ));
        assert!(parse_instance(r#"{"boxes":[{"l":"x","w":"1","h":"1"}]}"#).is_err());
    }

    #[test]
    fn instance_round_trip() {
        let i = Instance::from_dims(vec![
            (rat(1, 3), rat(2, 7), rat(1, 1000)),
            (int(1), rat(1, 2), rat(999, 1000)),
        ])
        .unwrap();
        let text = instance_to_json(&i, Some(&int(3)));
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.instance.boxes(), i.boxes());
        assert_eq!(back.known_opt, Some(int(3)));
    }

    #[test]
    fn packing_round_trip() {
        let i = Instance::from_dims(vec![(rat(1, 2), rat(1, 2), rat(1, 3))]).unwrap();
        let p = Packing::from_placements(&i, vec![Placement::new(0, rat(1, 2), int(0), rat(1, 7))])
            .unwrap();
        let back = parse_packing(&packing_to_json(&p)).unwrap();
        assert_eq!(back, p);
    }
}
