#include "cityplan/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace cityplan {

double polyline_length(std::span<const Vec2> line) {
    double total = 0.0;
    for (std::size_t i = 1; i < line.size(); ++i) total += distance(line[i - 1], line[i]);
    return total;
}

double project_on_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return 0.0;
    return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

PolylineProjection project_on_polyline(Vec2 p, std::span<const Vec2> line) {
    if (line.size() < 2) throw std::invalid_argument("polyline needs at least two vertices");
    PolylineProjection best;
    best.distance = std::numeric_limits<double>::infinity();
    double arc_before = 0.0;
    for (std::size_t i = 1; i < line.size(); ++i) {
        const Vec2 a = line[i - 1];
        const Vec2 b = line[i];
        const double seg_len = distance(a, b);
        const double t = project_on_segment(p, a, b);
        const Vec2 q = a + t * (b - a);
        const double d = distance(p, q);
        if (d < best.distance) {
            best.point = q;
            best.arc = arc_before + t * seg_len;
            best.distance = d;
        }
        arc_before += seg_len;
    }
    return best;
}

bool segment_intersects_rect(Vec2 a, Vec2 b, const Rect& r) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    double t0 = 0.0;
    double t1 = 1.0;
    // p_k * t <= q_k for each of the four half-planes
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - r.min.x, r.max.x - a.x, a.y - r.min.y, r.max.y - a.y};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) return false;
            continue;
        }
        const double t = q[k] / p[k];
        if (p[k] < 0.0) {
            t0 = std::max(t0, t);
        } else {
            t1 = std::min(t1, t);
        }
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace cityplan
