#include "moments/geometry.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <thread>

namespace moments {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec operator*(double s, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

double polygon_area(const Polygon2& poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Pt2& p = poly[i];
        const Pt2& q = poly[(i + 1) % n];
        a += cross(p, q);
    }
    return 0.5 * a;
}

Polygon2 convex_hull(std::vector<Pt2> pts) {
    std::sort(pts.begin(), pts.end(), [](Pt2 a, Pt2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Pt2 a, Pt2 b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Pt2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

bool point_in_convex_polygon(const Polygon2& poly, Pt2 p, double tol) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Pt2 a = poly[i];
        const Pt2 b = poly[(i + 1) % n];
        if (cross(b - a, p - a) < -tol) return false;
    }
    return true;
}

std::vector<std::array<int, 3>> triangulate_simple_polygon(const Polygon2& poly) {
    const int n = static_cast<int>(poly.size());
    std::vector<std::array<int, 3>> tris;
    if (n < 3) return tris;
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    // Ensure counter-clockwise input.
    if (polygon_area(poly) < 0) std::reverse(idx.begin(), idx.end());

    auto inside_tri = [&](Pt2 a, Pt2 b, Pt2 c, Pt2 p) {
        const double d1 = cross(b - a, p - a);
        const double d2 = cross(c - b, p - b);
        const double d3 = cross(a - c, p - c);
        return d1 > 0 && d2 > 0 && d3 > 0;
    };

    int guard = 0;
    while (idx.size() > 3 && guard < 10 * n * n) {
        ++guard;
        bool clipped = false;
        const int m = static_cast<int>(idx.size());
        for (int i = 0; i < m; ++i) {
            const int i0 = idx[(i + m - 1) % m], i1 = idx[i], i2 = idx[(i + 1) % m];
            const Pt2 a = poly[i0], b = poly[i1], c = poly[i2];
            if (cross(b - a, c - a) <= 0) continue;  // reflex or degenerate
            bool ear = true;
            for (int j : idx) {
                if (j == i0 || j == i1 || j == i2) continue;
                if (inside_tri(a, b, c, poly[j])) {
                    ear = false;
                    break;
                }
            }
            if (!ear) continue;
            tris.push_back({i0, i1, i2});
            idx.erase(idx.begin() + i);
            clipped = true;
            break;
        }
        if (!clipped) break;  // degenerate input; fall through with remaining fan
    }
    if (idx.size() == 3) tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t block) {
    // splitmix64 step over (seed, block)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (block + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    int t = threads > 0 ? threads : default_thread_count();
    t = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), n));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    const std::size_t chunk = (n + static_cast<std::size_t>(t) - 1) / static_cast<std::size_t>(t);
    for (int w = 0; w < t; ++w) {
        const std::size_t lo = static_cast<std::size_t>(w) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

int default_thread_count() {
    if (const char* env = std::getenv("MOMENT_SOLVER_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace moments
