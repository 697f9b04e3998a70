#pragma once

// Small fixed-size geometry for the 2-torus [0,2pi)^2: points, displacements,
// 2x2 tangent matrices.  Everything here is closed-form; no external linear
// algebra wanted for 2x2 work.

#include <cmath>

namespace torusflow {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};
inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Mat2 {
    // row-major: [[a, b], [c, d]]
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2& operator+=(const Mat2& o) { a += o.a; b += o.b; c += o.c; d += o.d; return *this; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    double frob2() const { return a * a + b * b + c * c + d * d; }

    // Spectral (operator 2-)norm: largest singular value, closed form.
    double opnorm() const {
        const double f = frob2();
        const double dt = det();
        double disc = f * f - 4.0 * dt * dt;
        if (disc < 0.0) disc = 0.0;   // roundoff guard
        return std::sqrt(0.5 * (f + std::sqrt(disc)));
    }
    // Smallest singular value.
    double sigma_min() const {
        const double f = frob2();
        const double dt = det();
        double disc = f * f - 4.0 * dt * dt;
        if (disc < 0.0) disc = 0.0;
        double s2 = 0.5 * (f - std::sqrt(disc));
        if (s2 < 0.0) s2 = 0.0;
        return std::sqrt(s2);
    }
    Mat2 inverse() const {
        const double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    Mat2 transpose() const { return {a, c, b, d}; }
};
inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

// Wrap a coordinate into [0, 2pi).
inline double wrap_coord(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod can return exactly kTwoPi after the correction when x is a tiny
    // negative number; fold that back to 0.
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

// Wrap a displacement into (-pi, pi].
inline double wrap_delta(double d) {
    double r = std::remainder(d, kTwoPi);  // (-pi, pi], ties to even
    if (r <= -3.14159265358979323847) r += kTwoPi;
    return r;
}

// A point on the torus; coordinates are kept wrapped into [0, 2pi).
struct TorusPoint {
    double x1 = 0.0, x2 = 0.0;
    static TorusPoint wrapped(double x1, double x2) {
        return {wrap_coord(x1), wrap_coord(x2)};
    }
};

// Minimal displacement a - b, each component in (-pi, pi].
inline Vec2 torus_delta(TorusPoint a, TorusPoint b) {
    return {wrap_delta(a.x1 - b.x1), wrap_delta(a.x2 - b.x2)};
}

inline double torus_distance(TorusPoint a, TorusPoint b) {
    return torus_delta(a, b).norm();
}

} // namespace torusflow
