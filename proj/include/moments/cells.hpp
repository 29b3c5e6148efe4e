#pragma once

#include <vector>

#include "moments/geometry.hpp"
#include "moments/potential.hpp"

namespace moments {

// Closed half-plane n.x >= off.
struct HalfPlane {
    Pt2 n;
    double off;
};

// Region where one atom attains the max: intersection of the bisector
// half-planes against all other atoms. Unbounded cells carry two unit
// recession rays: rays[0] leaves from vertices.front(), rays[1] from
// vertices.back(); the finite chain is ordered counter-clockwise.
struct Cell {
    int atom_index = -1;
    Polygon2 vertices;
    std::vector<Pt2> rays;
    bool bounded = true;
    bool empty = true;
    std::vector<HalfPlane> halfplanes;
};

struct CellDecomposition {
    std::vector<Cell> cells;         // one per atom, same order
    bool degenerate = false;         // a cell swallowed the whole working box
    std::vector<double> masses;      // filled by quadrature
    double total_mass = 0.0;
};

// Geometry of the full decomposition; dimension 2 and a positive
// integrability witness are required.
CellDecomposition build_cells(const PolyhedralPotential& p, int threads = 0);

// Intersection of the cell with the square [-R, R]^2, counter-clockwise.
Polygon2 clip_cell(const Cell& cell, double box_radius);

// Sutherland-Hodgman clip of a convex polygon by one half-plane.
Polygon2 clip_polygon(const Polygon2& poly, const HalfPlane& hp);

}  // namespace moments
