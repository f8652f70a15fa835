#pragma once

// Moebius transformations of the Riemann sphere as 2x2 complex matrices.
// Matrices are never normalized to unit determinant; everything here is
// projectively safe.

#include <complex>
#include <variant>

namespace schottky {

using Complex = std::complex<double>;

/// A point of the extended complex plane. Infinity is an explicit value.
class Point {
public:
    Point() = default;
    Point(Complex z);  // NOLINT(google-explicit-constructor): finite points convert freely
    Point(double x, double y = 0.0) : Point(Complex(x, y)) {}

    static Point infinity() {
        Point p;
        p.infinite_ = true;
        return p;
    }

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }
    /// Finite value; throws InvalidArgument for the point at infinity.
    Complex value() const;

    friend bool operator==(const Point& a, const Point& b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.z_ == b.z_;
    }

private:
    Complex z_{0.0, 0.0};
    bool infinite_ = false;
};

/// Chordal-style distance used for "same point on the sphere" comparisons.
double sphere_distance(const Point& a, const Point& b);

/// Plain 2x2 complex matrix; may be singular (perturbation directions, M(u)).
struct Matrix2 {
    Complex c11{1.0}, c12{0.0}, c21{0.0}, c22{1.0};

    static Matrix2 identity() { return {}; }
    static Matrix2 zero() { return {0.0, 0.0, 0.0, 0.0}; }

    Complex det() const { return c11 * c22 - c12 * c21; }
    Complex trace() const { return c11 + c22; }
    double frobenius_norm() const;
    bool is_finite() const;
    Matrix2 adjugate() const { return {c22, -c12, -c21, c11}; }

    friend Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
        return {a.c11 * b.c11 + a.c12 * b.c21, a.c11 * b.c12 + a.c12 * b.c22,
                a.c21 * b.c11 + a.c22 * b.c21, a.c21 * b.c12 + a.c22 * b.c22};
    }
    friend Matrix2 operator+(const Matrix2& a, const Matrix2& b) {
        return {a.c11 + b.c11, a.c12 + b.c12, a.c21 + b.c21, a.c22 + b.c22};
    }
    friend Matrix2 operator-(const Matrix2& a, const Matrix2& b) {
        return {a.c11 - b.c11, a.c12 - b.c12, a.c21 - b.c21, a.c22 - b.c22};
    }
    friend Matrix2 operator*(Complex s, const Matrix2& a) {
        return {s * a.c11, s * a.c12, s * a.c21, s * a.c22};
    }
    friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

/// Invertible 2x2 matrix acting by u -> (c11 u + c12) / (c21 u + c22).
class MoebiusMap {
public:
    static constexpr double kMinDeterminant = 1e-300;

    MoebiusMap() = default;
    /// Throws InvalidArgument if |det| <= kMinDeterminant or an entry is not finite.
    explicit MoebiusMap(const Matrix2& m);
    MoebiusMap(Complex c11, Complex c12, Complex c21, Complex c22)
        : MoebiusMap(Matrix2{c11, c12, c21, c22}) {}

    static MoebiusMap identity() { return {}; }

    const Matrix2& matrix() const { return m_; }
    /// Tracked multiplicatively through compose(); entry cancellation makes
    /// the recomputed determinant of long contracting words meaningless.
    Complex det() const { return det_; }

    Point apply(const Point& p) const;
    /// Derivative of the action at a finite, non-pole point.
    Complex derivative(Complex u) const;
    /// Preimage of infinity: -c22/c21, or infinity when c21 = 0.
    Point pole() const;

private:
    friend MoebiusMap compose(const MoebiusMap& a, const MoebiusMap& b);
    friend MoebiusMap inverse(const MoebiusMap& m);
    MoebiusMap(const Matrix2& m, Complex det);

    Matrix2 m_{};
    Complex det_{1.0};
};

Point apply(const MoebiusMap& m, const Point& p);
MoebiusMap compose(const MoebiusMap& a, const MoebiusMap& b);
/// True matrix inverse adj(m)/det(m).
MoebiusMap inverse(const MoebiusMap& m);

/// Scale-free comparison: max entry difference after normalizing both
/// matrices by their largest-modulus entry (with phase alignment).
double projective_distance(const Matrix2& a, const Matrix2& b);

enum class MoebiusKind { Loxodromic, Elliptic, Parabolic, Identity };

const char* to_string(MoebiusKind kind);

struct FixedPoints {
    Point attracting;
    Point repelling;
    /// Derivative of the map at the attracting fixed point, |multiplier| <= 1.
    Complex multiplier{1.0};
    MoebiusKind kind = MoebiusKind::Identity;
};

inline constexpr double kMultiplierTieTolerance = 1e-14;

/// Fixed points ordered (attracting, repelling). Parabolic maps report the
/// double fixed point in both slots; identity reports kind Identity.
FixedPoints fixed_points(const MoebiusMap& m);

/// Matrix with prescribed fixed points and multiplier, in the representative
///   c11 = A - B mu, c12 = A B (mu - 1), c21 = 1 - mu, c22 = A mu - B
/// (determinant mu (A - B)^2). Either fixed point may be infinite.
MoebiusMap from_fixed_points(const Point& attracting, const Point& repelling, Complex multiplier);

struct Circle {
    Complex center{0.0};
    double radius = 1.0;

    bool contains(Complex z) const { return std::abs(z - center) < radius; }
};

struct Line {
    Complex point{0.0};
    Complex direction{1.0};
};

struct CircleImage {
    std::variant<Circle, Line> shape;
    /// Whether the open disk bounded by the source circle maps to the open
    /// disk bounded by the image (false: it maps to the exterior, or to one
    /// side of a line).
    bool interior_to_interior = true;

    bool is_line() const { return std::holds_alternative<Line>(shape); }
    const Circle& circle() const { return std::get<Circle>(shape); }
};

CircleImage image_of_circle(const MoebiusMap& m, const Circle& c);

}  // namespace schottky
