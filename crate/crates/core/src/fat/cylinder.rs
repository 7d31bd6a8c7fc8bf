use alloc::vec::Vec;

use super::{is_chord_diagram, BoundaryCyclePartition, CycleMark, FatError, FatGraph, OrientedEdge};

/// One edge of a boundary cycle laid along the cylinder's circle.
#[derive(Clone, Debug, PartialEq)]
pub struct AttachingSegment {
    pub edge: OrientedEdge,
    pub start: f64,
    pub end: f64,
}

/// Half-infinite cylinder glued along one boundary cycle. Incoming cylinders
/// are parameterized by `(-inf, 0] x S^1`, outgoing ones by `[0, inf) x S^1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cylinder {
    pub cycle: usize,
    pub side: CycleMark,
    pub circumference: f64,
    pub attaching: Vec<AttachingSegment>,
}

impl Cylinder {
    /// The half-line the cylinder's axial coordinate ranges over.
    pub fn axial_range(&self) -> (f64, f64) {
        match self.side {
            CycleMark::Incoming => (f64::NEG_INFINITY, 0.0),
            CycleMark::Outgoing => (0.0, f64::INFINITY),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CylinderComplex {
    pub cylinders: Vec<Cylinder>,
}

/// Builds the mapping-cylinder description of a marked chord diagram.
/// `lengths` is indexed by edge.
pub fn build_mapping_cylinder(
    fg: &FatGraph,
    partition: &BoundaryCyclePartition,
    lengths: &[f64],
) -> Result<CylinderComplex, FatError> {
    let g = fg.graph();
    if lengths.len() != g.edge_count() {
        return Err(FatError::LengthCount {
            got: lengths.len(),
            want: g.edge_count(),
        });
    }
    for (e, &l) in lengths.iter().enumerate() {
        if !(l > 0.0) || !l.is_finite() {
            return Err(FatError::NonpositiveLength(g.edge(e).id.clone()));
        }
    }
    let check = is_chord_diagram(fg, partition)?;
    if !check.is_chord_diagram {
        let names: Vec<_> = check.witnesses.iter().map(|e| e.label(g)).collect();
        return Err(FatError::NotChordDiagram(names.join(",")));
    }
    let cylinders = partition
        .cycles
        .iter()
        .enumerate()
        .map(|(i, cycle)| {
            let mut pos = 0.0;
            let attaching = cycle
                .iter()
                .map(|&edge| {
                    let start = pos;
                    pos += lengths[edge.edge];
                    AttachingSegment {
                        edge,
                        start,
                        end: pos,
                    }
                })
                .collect();
            Cylinder {
                cycle: i,
                side: partition.marks[i].expect("checked by chord test"),
                circumference: pos,
                attaching,
            }
        })
        .collect();
    Ok(CylinderComplex { cylinders })
}
