use std::fmt;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident, $prefix:literal) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl From<u32> for $name {
            fn from(raw: u32) -> Self {
                $name(raw)
            }
        }
    };
}

id_type!(
    /// An irreducible component of the special fiber.
    VertexId,
    "v"
);
id_type!(
    /// A node of the special fiber.
    EdgeId,
    "e"
);
id_type!(
    /// A marking already specialized to the smooth locus of a component.
    LegId,
    "l"
);
id_type!(
    /// A marking specializing into the metric interior of an edge.
    MarkingId,
    "m"
);

/// One end of an edge. Side 0 is the first entry of the edge's `ends`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge {
    pub edge: EdgeId,
    pub side: u8,
}

impl HalfEdge {
    pub fn partner(self) -> HalfEdge {
        HalfEdge { edge: self.edge, side: 1 - self.side }
    }
}
