#pragma once

#include <cmath>

namespace gripsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm_sq(const Vec2& a) { return a.x * a.x + a.y * a.y; }
inline double norm(const Vec2& a) { return std::sqrt(norm_sq(a)); }

// 90 degree counter-clockwise rotation.
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

// Unit system used throughout: length mm, mass g, time s, force N.
// 1 N acting on 1 g produces 1e6 mm/s^2.
inline constexpr double kForceToAccel = 1.0e6;   // (N / g) -> mm/s^2
inline constexpr double kEnergyToJoule = 1.0e-9; // g*mm^2/s^2 -> J
inline constexpr double kPi = 3.14159265358979323846;

} // namespace gripsim
