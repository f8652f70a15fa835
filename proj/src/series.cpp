#include "schottky/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "schottky/error.hpp"

namespace schottky {

namespace {

struct LayerWord {
    MoebiusMap matrix;
    int last_code;  // -1 for the identity
};

[[noreturn]] void pole_error() {
    fail(ErrorCode::PoleProximity, "evaluation point within 1e-12 of a pole of the series");
}

// 1/(u - a) without the NaN bookkeeping of std::complex division.
inline Complex reciprocal_difference(Complex u, Complex a) {
    const double x = u.real() - a.real();
    const double y = u.imag() - a.imag();
    const double n = x * x + y * y;
    if (n < kPoleProximity * kPoleProximity) pole_error();
    return {x / n, -y / n};
}

inline Complex term_value(const PolePair& t, Complex u) {
    Complex v{0.0};
    if (!t.a_infinite) v += reciprocal_difference(u, t.a);
    if (!t.b_infinite) v -= reciprocal_difference(u, t.b);
    return v;
}

PolePair image_pair(const MoebiusMap& w, const Point& p, const Point& q) {
    const Point a = w.apply(p);
    const Point b = w.apply(q);
    PolePair t;
    t.a_infinite = a.is_infinite();
    t.b_infinite = b.is_infinite();
    if (!t.a_infinite) t.a = a.value();
    if (!t.b_infinite) t.b = b.value();
    return t;
}

double layer_norm(std::span<const PolePair> layer, Complex scale, std::span<const Complex> probes) {
    double worst = 0.0;
    for (const Complex& u : probes) {
        CompensatedSum s;
        for (const auto& t : layer) s.add(term_value(t, u));
        worst = std::max(worst, std::abs(scale * s.value()));
    }
    return worst;
}

}  // namespace

const char* to_string(DifferentialKind kind) {
    switch (kind) {
        case DifferentialKind::ThirdKind: return "third_kind";
        case DifferentialKind::Holomorphic: return "holomorphic";
        case DifferentialKind::HolomorphicOrbit: return "holomorphic_orbit";
    }
    return "unknown";
}

double geometric_tail(std::span<const double> norms) {
    if (norms.empty()) return 0.0;
    const double last = norms.back();
    if (norms.size() == 1) return last;
    const double prev = norms[norms.size() - 2];
    if (last == 0.0) return 0.0;
    if (prev == 0.0) return std::numeric_limits<double>::infinity();
    const double q = last / prev;
    if (q >= 1.0) return std::numeric_limits<double>::infinity();
    return last * q / (1.0 - q);
}

void Differential::build(const Point& p, const Point& q, const Truncation& trunc, int coset_generator,
                         double norm_scale) {
    group_.require_usable();
    const bool adaptive = trunc.tail_tolerance.has_value();
    if (adaptive && !(*trunc.tail_tolerance > 0.0))
        fail(ErrorCode::InvalidArgument, "tail tolerance must be positive");
    if (!adaptive && trunc.max_word_len < 0)
        fail(ErrorCode::InvalidArgument, "max word length must be nonnegative");
    const int limit = adaptive ? trunc.hard_cap : trunc.max_word_len;

    std::vector<MoebiusMap> letters;
    for (int k = 0; k < group_.genus(); ++k) {
        letters.push_back(group_.generator(k));
        letters.push_back(group_.generator_inverse(k));
    }
    const std::vector<Complex> probes = boundary_probe_points(group_);

    std::vector<LayerWord> layer{{MoebiusMap::identity(), -1}};
    for (int len = 0;; ++len) {
        if (len > 0) {
            std::vector<LayerWord> next;
            next.reserve(layer.size() * (letters.size() - 1));
            for (const auto& w : layer) {
                for (int code = 0; code < static_cast<int>(letters.size()); ++code) {
                    if (w.last_code >= 0 && code == (w.last_code ^ 1)) continue;
                    next.push_back({compose(w.matrix, letters[static_cast<std::size_t>(code)]), code});
                }
            }
            layer = std::move(next);
        }
        for (const auto& w : layer) {
            if (coset_generator >= 0 && w.last_code >= 0 && w.last_code / 2 == coset_generator) continue;
            terms_.push_back(image_pair(w.matrix, p, q));
        }
        layer_offsets_.push_back(terms_.size());
        layer_norms_.push_back(layer_norm(layer_terms(len), norm_scale, probes));
        tail_estimate_ = geometric_tail(layer_norms_);

        if (adaptive) {
            if (len >= 1 && tail_estimate_ < *trunc.tail_tolerance) break;
            if (len >= limit)
                fail(ErrorCode::Convergence, "series tail estimate " + std::to_string(tail_estimate_) +
                                                 " above tolerance at the hard cap of " + std::to_string(limit) +
                                                 " layers");
        } else if (len >= limit) {
            break;
        }
    }
}

Differential Differential::third_kind(const SchottkyGroup& group, const Point& z, const Point& zp,
                                      const Truncation& trunc) {
    Differential d(group, DifferentialKind::ThirdKind);
    group.require_usable();
    for (const Point* p : {&z, &zp}) {
        const auto m = in_fundamental_domain(group, *p);
        if (!m.inside || m.on_boundary)
            fail(ErrorCode::InvalidArgument, "third-kind poles must lie in the interior of the fundamental domain");
    }
    if (z == zp) fail(ErrorCode::InvalidArgument, "third-kind poles must be distinct");
    d.z_ = z;
    d.zp_ = zp;
    d.build(z, zp, trunc, -1, 1.0);
    return d;
}

Differential Differential::holomorphic_orbit(const SchottkyGroup& group, int k, const Truncation& trunc) {
    return orbit_impl(group, k, trunc, 1.0);
}

Differential Differential::orbit_impl(const SchottkyGroup& group, int k, const Truncation& trunc, double norm_scale) {
    Differential d(group, DifferentialKind::HolomorphicOrbit);
    group.require_usable();
    if (k < 0 || k >= group.genus()) fail(ErrorCode::InvalidArgument, "generator index out of range");
    const FixedPoints fp = fixed_points(group.generator(k));
    d.index_ = k;
    d.z_ = fp.attracting;
    d.zp_ = fp.repelling;
    // Stored as (A, B) pairs; the orbit form is the negative of that bracket.
    d.scale_ = -1.0;
    d.build(fp.attracting, fp.repelling, trunc, k, norm_scale);
    return d;
}

Differential Differential::holomorphic(const SchottkyGroup& group, int k, const Truncation& trunc,
                                       int normalization_nodes) {
    // |c| is 1/(2 pi) up to quadrature error, which the adaptive truncation uses.
    constexpr double kExpectedScale = 0.5 / std::numbers::pi;
    Differential d = orbit_impl(group, k, trunc, kExpectedScale);
    d.kind_ = DifferentialKind::Holomorphic;

    // a-period of the bare bracket over dD_k at 2N nodes; the even nodes give
    // the N-node rule.
    const CircleNodes nodes = circle_nodes(group.disk(k).d, 2 * normalization_nodes);
    CompensatedSum coarse_sum, fine_sum;
    for (std::size_t j = 0; j < nodes.points.size(); ++j) {
        CompensatedSum f;
        for (const auto& t : d.terms_) f.add(term_value(t, nodes.points[j]));
        const Complex v = f.value() * nodes.weights[j];
        fine_sum.add(v);
        if (j % 2 == 0) coarse_sum.add(2.0 * v);
    }
    const Complex coarse = coarse_sum.value();
    const Complex fine = fine_sum.value();
    if (std::abs(fine) == 0.0 || std::abs(coarse - fine) > 1e-10 * std::abs(fine))
        fail(ErrorCode::Normalization, "a-period quadrature for the holomorphic basis did not converge");
    d.scale_ = 1.0 / fine;
    for (auto& n : d.layer_norms_) n *= std::abs(d.scale_) / kExpectedScale;
    d.tail_estimate_ = geometric_tail(d.layer_norms_);
    return d;
}

std::span<const PolePair> Differential::layer_terms(int layer) const {
    if (layer < 0 || layer > max_word_len()) fail(ErrorCode::InvalidArgument, "layer index out of range");
    const auto first = layer_offsets_[static_cast<std::size_t>(layer)];
    const auto last = layer_offsets_[static_cast<std::size_t>(layer) + 1];
    return std::span<const PolePair>(terms_).subspan(first, last - first);
}

Complex Differential::eval(const Point& u) const {
    if (u.is_infinite()) return 0.0;
    const Complex z = u.value();
    for (const auto& pair : group_.disks()) {
        for (const Circle* c : {&pair.d, &pair.d_prime}) {
            if (std::abs(z - c->center) < c->radius * (1.0 - 1e-9))
                fail(ErrorCode::InvalidArgument, "evaluation point lies inside a disk of the group");
        }
    }
    return eval_unchecked(z);
}

Complex Differential::eval_unchecked(Complex u) const {
    CompensatedSum s;
    for (const auto& t : terms_) s.add(term_value(t, u));
    return scale_ * s.value();
}

Complex Differential::eval_layer(int layer, Complex u) const {
    CompensatedSum s;
    for (const auto& t : layer_terms(layer)) s.add(term_value(t, u));
    return scale_ * s.value();
}

std::vector<Complex> boundary_probe_points(const SchottkyGroup& group, int per_circle) {
    std::vector<Complex> out;
    for (const auto& pair : group.disks()) {
        for (const Circle* c : {&pair.d, &pair.d_prime}) {
            for (int j = 0; j < per_circle; ++j)
                out.push_back(c->center +
                              std::polar(c->radius, 2.0 * std::numbers::pi * (j + 0.5) / per_circle));
        }
    }
    return out;
}

std::vector<double> layer_norms(const Differential& d, std::span<const Complex> probes) {
    std::vector<double> out;
    for (int l = 0; l <= d.max_word_len(); ++l) out.push_back(layer_norm(d.layer_terms(l), d.scale(), probes));
    return out;
}

double automorphy_residual(const Differential& d, int k, int samples) {
    const SchottkyGroup& g = d.group();
    if (k < 0 || k >= g.genus()) fail(ErrorCode::InvalidArgument, "generator index out of range");
    const MoebiusMap& s = g.generator(k);
    const Circle& c = g.disk(k).d_prime;
    double worst = 0.0;
    for (int j = 0; j < samples; ++j) {
        const Complex u = c.center + std::polar(c.radius, 2.0 * std::numbers::pi * (j + 0.25) / samples);
        const Complex su = s.apply(Point(u)).value();
        worst = std::max(worst, std::abs(d.eval_unchecked(su) * s.derivative(u) - d.eval_unchecked(u)));
    }
    return worst;
}

}  // namespace schottky
