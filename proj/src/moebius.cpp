#include "schottky/moebius.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "schottky/error.hpp"

namespace schottky {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::array<Complex, 4> entries(const Matrix2& m) { return {m.c11, m.c12, m.c21, m.c22}; }

}  // namespace

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid argument";
        case ErrorCode::Structure: return "structural error";
        case ErrorCode::Validation: return "validation failure";
        case ErrorCode::PoleProximity: return "pole proximity";
        case ErrorCode::Convergence: return "convergence failure";
        case ErrorCode::PathPlanning: return "path planning failure";
        case ErrorCode::BranchTracking: return "branch tracking failure";
        case ErrorCode::RankDeficient: return "rank deficient";
        case ErrorCode::Normalization: return "normalization failure";
    }
    return "unknown error";
}

Point::Point(Complex z) : z_(z) {
    if (!finite(z)) fail(ErrorCode::InvalidArgument, "Point: non-finite coordinates (use Point::infinity())");
}

Complex Point::value() const {
    if (infinite_) fail(ErrorCode::InvalidArgument, "Point::value() called on the point at infinity");
    return z_;
}

double sphere_distance(const Point& a, const Point& b) {
    if (a.is_infinite() && b.is_infinite()) return 0.0;
    if (a.is_infinite() || b.is_infinite()) {
        const Complex z = a.is_infinite() ? b.value() : a.value();
        return 2.0 / std::sqrt(1.0 + std::norm(z));
    }
    const Complex x = a.value(), y = b.value();
    return 2.0 * std::abs(x - y) / std::sqrt((1.0 + std::norm(x)) * (1.0 + std::norm(y)));
}

double Matrix2::frobenius_norm() const {
    return std::sqrt(std::norm(c11) + std::norm(c12) + std::norm(c21) + std::norm(c22));
}

bool Matrix2::is_finite() const {
    return finite(c11) && finite(c12) && finite(c21) && finite(c22);
}

MoebiusMap::MoebiusMap(const Matrix2& m) : MoebiusMap(m, m.det()) {}

MoebiusMap::MoebiusMap(const Matrix2& m, Complex det) : m_(m), det_(det) {
    if (!m.is_finite()) fail(ErrorCode::InvalidArgument, "MoebiusMap: non-finite matrix entry");
    if (!(std::abs(det) > kMinDeterminant))
        fail(ErrorCode::InvalidArgument, "MoebiusMap: singular matrix (|det| <= 1e-300)");
}

Point MoebiusMap::apply(const Point& p) const {
    if (p.is_infinite()) {
        if (m_.c21 == Complex(0.0)) return Point::infinity();
        return Point(m_.c11 / m_.c21);
    }
    const Complex u = p.value();
    const Complex den = m_.c21 * u + m_.c22;
    if (den == Complex(0.0)) return Point::infinity();
    const Complex w = (m_.c11 * u + m_.c12) / den;
    if (!finite(w)) return Point::infinity();
    return Point(w);
}

Complex MoebiusMap::derivative(Complex u) const {
    const Complex den = m_.c21 * u + m_.c22;
    return det_ / (den * den);
}

Point MoebiusMap::pole() const {
    if (m_.c21 == Complex(0.0)) return Point::infinity();
    return Point(-m_.c22 / m_.c21);
}

Point apply(const MoebiusMap& m, const Point& p) { return m.apply(p); }

MoebiusMap compose(const MoebiusMap& a, const MoebiusMap& b) {
    return MoebiusMap(a.matrix() * b.matrix(), a.det_ * b.det_);
}

MoebiusMap inverse(const MoebiusMap& m) {
    return MoebiusMap((1.0 / m.det_) * m.matrix().adjugate(), 1.0 / m.det_);
}

double projective_distance(const Matrix2& a, const Matrix2& b) {
    const auto ea = entries(a);
    const auto eb = entries(b);
    std::size_t pivot = 0;
    for (std::size_t i = 1; i < 4; ++i)
        if (std::abs(ea[i]) > std::abs(ea[pivot])) pivot = i;
    if (ea[pivot] == Complex(0.0) || eb[pivot] == Complex(0.0)) return HUGE_VAL;
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        worst = std::max(worst, std::abs(ea[i] / ea[pivot] - eb[i] / eb[pivot]));
    return worst;
}

const char* to_string(MoebiusKind kind) {
    switch (kind) {
        case MoebiusKind::Loxodromic: return "loxodromic";
        case MoebiusKind::Elliptic: return "elliptic";
        case MoebiusKind::Parabolic: return "parabolic";
        case MoebiusKind::Identity: return "identity";
    }
    return "unknown";
}

FixedPoints fixed_points(const MoebiusMap& map) {
    const Matrix2& m = map.matrix();
    double scale = 0.0;
    for (const Complex& e : entries(m)) scale = std::max(scale, std::abs(e));

    FixedPoints out;
    const Complex diff = m.c11 - m.c22;
    if (std::abs(m.c12) <= 1e-14 * scale && std::abs(m.c21) <= 1e-14 * scale &&
        std::abs(diff) <= 1e-14 * scale) {
        out.kind = MoebiusKind::Identity;
        out.attracting = out.repelling = Point::infinity();
        return out;
    }

    const Complex tr = m.trace();
    const Complex sq = std::sqrt(diff * diff + 4.0 * m.c12 * m.c21);

    // Fixed point of the eigenvector for eigenvalue lambda, picking the row
    // with the larger pivot.
    auto eigen_point = [&](Complex lambda) -> Point {
        const Complex from_row2_den = m.c21;
        const Complex from_row1_den = lambda - m.c11;
        if (std::abs(from_row2_den) >= std::abs(from_row1_den)) {
            if (from_row2_den == Complex(0.0)) return Point::infinity();
            return Point((lambda - m.c22) / from_row2_den);
        }
        return Point(m.c12 / from_row1_den);
    };

    if (std::abs(sq) <= 1e-12 * scale) {
        out.kind = MoebiusKind::Parabolic;
        out.multiplier = 1.0;
        const Point p = m.c21 == Complex(0.0) ? Point::infinity() : Point(diff / (2.0 * m.c21));
        out.attracting = out.repelling = p;
        return out;
    }

    // Larger eigenvalue first, avoiding cancellation in tr +/- sq.
    const Complex s = std::real(std::conj(tr) * sq) >= 0.0 ? sq : -sq;
    const Complex big = 0.5 * (tr + s);
    const Complex small = m.det() / big;
    out.multiplier = small / big;
    out.attracting = eigen_point(big);
    out.repelling = eigen_point(small);
    out.kind = std::abs(std::abs(out.multiplier) - 1.0) > kMultiplierTieTolerance ? MoebiusKind::Loxodromic
                                                                                  : MoebiusKind::Elliptic;
    return out;
}

MoebiusMap from_fixed_points(const Point& attracting, const Point& repelling, Complex mu) {
    if (!finite(mu) || mu == Complex(0.0))
        fail(ErrorCode::InvalidArgument, "from_fixed_points: multiplier must be finite and nonzero");
    if (attracting.is_infinite() && repelling.is_infinite())
        fail(ErrorCode::InvalidArgument, "from_fixed_points: both fixed points are infinite");
    if (attracting.is_infinite()) {
        const Complex b = repelling.value();
        return MoebiusMap(-1.0, b * (1.0 - mu), 0.0, -mu);
    }
    if (repelling.is_infinite()) {
        const Complex a = attracting.value();
        return MoebiusMap(mu, a * (1.0 - mu), 0.0, 1.0);
    }
    const Complex a = attracting.value(), b = repelling.value();
    if (a == b) fail(ErrorCode::InvalidArgument, "from_fixed_points: coincident fixed points");
    return MoebiusMap(a - b * mu, a * b * (mu - 1.0), 1.0 - mu, a * mu - b);
}

CircleImage image_of_circle(const MoebiusMap& m, const Circle& c) {
    if (!(c.radius > 0.0)) fail(ErrorCode::InvalidArgument, "image_of_circle: radius must be positive");
    const Point pole = m.pole();
    CircleImage out;
    if (pole.is_infinite()) {
        const Matrix2& a = m.matrix();
        out.shape = Circle{m.apply(Point(c.center)).value(), std::abs(a.c11 / a.c22) * c.radius};
        out.interior_to_interior = true;
        return out;
    }

    const Complex p = pole.value();
    const Complex rel = p - c.center;
    const double dist = std::abs(rel);
    const double theta = dist > 0.0 ? std::arg(rel) : 0.0;
    auto on_circle = [&](double phi) { return c.center + std::polar(c.radius, phi); };

    if (std::abs(dist - c.radius) <= 1e-14 * (c.radius + std::abs(c.center))) {
        const Complex w1 = m.apply(Point(on_circle(theta + 2.0 * std::numbers::pi / 3.0))).value();
        const Complex w2 = m.apply(Point(on_circle(theta - 2.0 * std::numbers::pi / 3.0))).value();
        out.shape = Line{w1, (w2 - w1) / std::abs(w2 - w1)};
        out.interior_to_interior = false;
        return out;
    }

    // The image centre is the image of the reflection of the pole in the circle.
    const Point reflected = dist == 0.0 ? Point::infinity()
                                        : Point(c.center + c.radius * c.radius / std::conj(rel));
    const Complex center = m.apply(reflected).value();
    const Complex far = m.apply(Point(on_circle(theta + std::numbers::pi))).value();
    out.shape = Circle{center, std::abs(far - center)};
    out.interior_to_interior = dist > c.radius;
    return out;
}

}  // namespace schottky
