#include "moments/cells.hpp"

#include <algorithm>
#include <cmath>

namespace moments {

namespace {

// Clipping vertex with the ids of the two lines whose intersection it is.
// Constraint ids are >= 0; the initial box edges use -1..-4.
struct TaggedVertex {
    Pt2 p;
    int ida;
    int idb;
};

bool is_artificial(const TaggedVertex& v) { return v.ida < 0 || v.idb < 0; }

int common_id(const TaggedVertex& a, const TaggedVertex& b) {
    if (a.ida == b.ida || a.ida == b.idb) return a.ida;
    if (a.idb == b.ida || a.idb == b.idb) return a.idb;
    return -5;
}

std::vector<TaggedVertex> clip_tagged(const std::vector<TaggedVertex>& poly,
                                      const HalfPlane& hp, int cid) {
    std::vector<TaggedVertex> out;
    const std::size_t n = poly.size();
    out.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const TaggedVertex& v = poly[i];
        const TaggedVertex& w = poly[(i + 1) % n];
        const double sv = dot(hp.n, v.p) - hp.off;
        const double sw = dot(hp.n, w.p) - hp.off;
        if (sv >= 0.0) out.push_back(v);
        if ((sv >= 0.0) != (sw >= 0.0)) {
            const double t = sv / (sv - sw);
            out.push_back({v.p + t * (w.p - v.p), common_id(v, w), cid});
        }
    }
    return out;
}

double potential_scale(const PolyhedralPotential& p) {
    double s = 1.0;
    for (const auto& a : p.atoms)
        for (double c : a) s = std::max(s, std::abs(c));
    for (double v : p.values) s = std::max(s, std::abs(v));
    return s;
}

Cell build_one_cell(const PolyhedralPotential& p, int i, double box) {
    Cell cell;
    cell.atom_index = i;
    const Pt2 yi{p.atoms[i][0], p.atoms[i][1]};
    for (int j = 0; j < p.size(); ++j) {
        if (j == i) continue;
        const Pt2 yj{p.atoms[j][0], p.atoms[j][1]};
        cell.halfplanes.push_back({yi - yj, p.values[i] - p.values[j]});
    }

    std::vector<TaggedVertex> poly = {
        {{-box, -box}, -1, -4}, {{box, -box}, -1, -2},
        {{box, box}, -2, -3},   {{-box, box}, -3, -4}};
    for (std::size_t c = 0; c < cell.halfplanes.size(); ++c) {
        poly = clip_tagged(poly, cell.halfplanes[c], static_cast<int>(c));
        if (poly.size() < 3) {
            cell.empty = true;
            return cell;
        }
    }

    // Merge coincident consecutive vertices.
    const double scale = potential_scale(p);
    std::vector<TaggedVertex> merged;
    for (const auto& v : poly) {
        if (!merged.empty()) {
            const Pt2 d = v.p - merged.back().p;
            const double tol = 1e-10 * scale + 1e-12 * (norm(v.p) + norm(merged.back().p));
            if (norm(d) <= tol) {
                // Prefer keeping real line ids for exact recomputation.
                if (is_artificial(merged.back()) && !is_artificial(v)) merged.back() = v;
                continue;
            }
        }
        merged.push_back(v);
    }
    while (merged.size() > 1) {
        const Pt2 d = merged.front().p - merged.back().p;
        const double tol =
            1e-10 * scale + 1e-12 * (norm(merged.front().p) + norm(merged.back().p));
        if (norm(d) <= tol) {
            if (is_artificial(merged.front()) && !is_artificial(merged.back()))
                merged.front() = merged.back();
            merged.pop_back();
        } else {
            break;
        }
    }
    if (merged.size() < 3) {
        cell.empty = true;
        return cell;
    }

    // Recompute finite vertices exactly from their two defining bisectors.
    for (auto& v : merged) {
        if (is_artificial(v)) continue;
        const HalfPlane& a = cell.halfplanes[static_cast<std::size_t>(v.ida)];
        const HalfPlane& b = cell.halfplanes[static_cast<std::size_t>(v.idb)];
        const double det = cross(a.n, b.n);
        if (std::abs(det) > 1e-14 * (norm(a.n) * norm(b.n) + 1.0)) {
            v.p = {(a.off * b.n.y - b.off * a.n.y) / det,
                   (b.off * a.n.x - a.off * b.n.x) / det};
        }
    }

    const std::size_t m = merged.size();
    std::vector<int> art_runs_start;
    bool all_art = true, any_art = false;
    for (std::size_t k = 0; k < m; ++k) {
        const bool a = is_artificial(merged[k]);
        all_art = all_art && a;
        any_art = any_art || a;
        const bool prev = is_artificial(merged[(k + m - 1) % m]);
        if (a && !prev) art_runs_start.push_back(static_cast<int>(k));
    }

    cell.empty = false;
    if (all_art) {
        // Whole working box: flagged degenerate upstream.
        cell.bounded = false;
        for (const auto& v : merged) cell.vertices.push_back(v.p);
        return cell;
    }
    if (!any_art) {
        cell.bounded = true;
        for (const auto& v : merged) cell.vertices.push_back(v.p);
        return cell;
    }

    // Unbounded: rotate so the finite chain is contiguous and derive the two
    // recession rays from the edges that reach the working box.
    cell.bounded = false;
    const int run_start = art_runs_start.front();
    int run_end = run_start;  // last artificial index of this run
    while (is_artificial(merged[static_cast<std::size_t>((run_end + 1) % m)]))
        run_end = (run_end + 1) % m;

    std::vector<TaggedVertex> chain;
    for (std::size_t k = 0; k < m; ++k) {
        const int idx = (run_end + 1 + static_cast<int>(k)) % static_cast<int>(m);
        if (!is_artificial(merged[static_cast<std::size_t>(idx)]))
            chain.push_back(merged[static_cast<std::size_t>(idx)]);
    }
    for (const auto& v : chain) cell.vertices.push_back(v.p);

    const Pt2 first_art = merged[static_cast<std::size_t>(run_start)].p;
    const Pt2 last_art = merged[static_cast<std::size_t>(run_end)].p;
    Pt2 r_in = last_art - cell.vertices.front();
    Pt2 r_out = first_art - cell.vertices.back();
    const double ni = norm(r_in), no = norm(r_out);
    if (ni > 0.0) r_in = (1.0 / ni) * r_in;
    if (no > 0.0) r_out = (1.0 / no) * r_out;
    cell.rays = {r_in, r_out};
    return cell;
}

}  // namespace

Polygon2 clip_polygon(const Polygon2& poly, const HalfPlane& hp) {
    Polygon2 out;
    const std::size_t n = poly.size();
    out.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const Pt2 v = poly[i];
        const Pt2 w = poly[(i + 1) % n];
        const double sv = dot(hp.n, v) - hp.off;
        const double sw = dot(hp.n, w) - hp.off;
        if (sv >= 0.0) out.push_back(v);
        if ((sv >= 0.0) != (sw >= 0.0)) {
            const double t = sv / (sv - sw);
            out.push_back(v + t * (w - v));
        }
    }
    return out;
}

CellDecomposition build_cells(const PolyhedralPotential& p, int threads) {
    if (p.dim != 2) throw std::invalid_argument("build_cells: dimension must be 2");
    const IntegrabilityWitness w = check_integrability(p);
    if (!w.integrable)
        throw std::invalid_argument("build_cells: e^{-psi} is not integrable");

    const double box = 1e7 * potential_scale(p);
    CellDecomposition decomp;
    decomp.cells.resize(p.size());
    parallel_for(static_cast<std::size_t>(p.size()), threads, [&](std::size_t i) {
        decomp.cells[i] = build_one_cell(p, static_cast<int>(i), box);
    });
    for (const auto& c : decomp.cells)
        if (!c.empty && !c.bounded && c.rays.empty()) decomp.degenerate = true;
    return decomp;
}

Polygon2 clip_cell(const Cell& cell, double box_radius) {
    if (cell.empty) return {};
    const double r = box_radius;
    Polygon2 poly = {{-r, -r}, {r, -r}, {r, r}, {-r, r}};
    for (const auto& hp : cell.halfplanes) {
        poly = clip_polygon(poly, hp);
        if (poly.size() < 3) return {};
    }
    // Drop duplicate consecutive vertices left by tangential clips.
    Polygon2 out;
    for (const auto& v : poly) {
        if (!out.empty() && norm(v - out.back()) <= 1e-13 * (1.0 + r)) continue;
        out.push_back(v);
    }
    while (out.size() > 1 && norm(out.front() - out.back()) <= 1e-13 * (1.0 + r))
        out.pop_back();
    if (out.size() < 3) return {};
    return out;
}

}  // namespace moments
