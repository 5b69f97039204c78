#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace cityplan {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

/// Closest point on a polyline to a query point.
struct PolylineProjection {
    Vec2 point;
    double arc = 0.0;       // arc length from the first vertex to `point`
    double distance = 0.0;  // |query - point|
};

double polyline_length(std::span<const Vec2> line);

/// Clamped projection of `p` onto segment [a, b]; returns parameter t in [0, 1].
double project_on_segment(Vec2 p, Vec2 a, Vec2 b);

/// Exact point-to-polyline projection. On equal distances the earliest
/// segment wins. Requires at least two vertices.
PolylineProjection project_on_polyline(Vec2 p, std::span<const Vec2> line);

struct Rect {
    Vec2 min;
    Vec2 max;
};

/// True when the closed segment [a, b] touches the closed rectangle.
/// Liang-Barsky parametric clipping.
bool segment_intersects_rect(Vec2 a, Vec2 b, const Rect& r);

}  // namespace cityplan
