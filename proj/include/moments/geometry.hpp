#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace moments {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm_inf(const Vec& a);
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);

// 2D point for the exact cell/quadrature machinery.
struct Pt2 {
    double x = 0.0;
    double y = 0.0;
};

inline Pt2 operator+(Pt2 a, Pt2 b) { return {a.x + b.x, a.y + b.y}; }
inline Pt2 operator-(Pt2 a, Pt2 b) { return {a.x - b.x, a.y - b.y}; }
inline Pt2 operator*(double s, Pt2 a) { return {s * a.x, s * a.y}; }
inline double dot(Pt2 a, Pt2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Pt2 a, Pt2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Pt2 a) { return std::hypot(a.x, a.y); }

using Polygon2 = std::vector<Pt2>;

// Signed area (positive for counter-clockwise orientation).
double polygon_area(const Polygon2& poly);

// Convex hull, counter-clockwise, no duplicate endpoints (Andrew chain).
Polygon2 convex_hull(std::vector<Pt2> pts);

bool point_in_convex_polygon(const Polygon2& poly, Pt2 p, double tol);

// Ear-clipping triangulation of a simple polygon; returns index triples.
std::vector<std::array<int, 3>> triangulate_simple_polygon(const Polygon2& poly);

// Deterministic random source. All draws go through explicit integer-to-double
// conversions so streams are identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard normal via Marsaglia polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    std::uint64_t next_u64() { return eng_(); }

    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stable per-block seed derivation for seed-split parallel sampling.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t block);

// Static-block parallel loop; results must be written to disjoint slots so the
// outcome is independent of the thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

int default_thread_count();

}  // namespace moments
