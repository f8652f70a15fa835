#pragma once

// Truncated linear Poincare series for Abelian differentials.
//
// Every differential is stored in the pole-orbit form: a list of pole pairs
// (a, b) = (W p, W q) over enumerated words W, evaluated as
//     scale * sum [1/(u - a) - 1/(u - b)],
// accumulated layer by layer (word length 0, 1, 2, ...), lexicographically
// within a layer, with compensated summation.

#include <optional>
#include <span>
#include <vector>

#include "schottky/group.hpp"
#include "schottky/numerics.hpp"

namespace schottky {

/// Fixed word length, or layers added until the geometric tail estimate
/// drops below a tolerance (hitting hard_cap first is a Convergence error).
struct Truncation {
    int max_word_len = 8;
    std::optional<double> tail_tolerance;
    int hard_cap = 16;

    static Truncation fixed(int len) { return {len, std::nullopt, 16}; }
    static Truncation tolerance(double tol, int cap = 16) { return {0, tol, cap}; }
};

enum class DifferentialKind {
    ThirdKind,        // residues +1 at z, -1 at z'
    Holomorphic,      // a-normalized basis element dzeta_k
    HolomorphicOrbit  // sum_T [1/(u - T B_k) - 1/(u - T A_k)], i.e. dEta_{z, S_k z}
};

const char* to_string(DifferentialKind kind);

struct PolePair {
    Complex a;
    Complex b;
    bool a_infinite = false;
    bool b_infinite = false;
};

/// Poles closer than this to an evaluation point raise PoleProximity.
inline constexpr double kPoleProximity = 1e-12;

class Differential {
public:
    /// dEta_{zz'}: sum over all words of 1/(u - W z) - 1/(u - W z').
    static Differential third_kind(const SchottkyGroup& group, const Point& z, const Point& zp,
                                   const Truncation& trunc);
    /// dzeta_k = c * sum over coset representatives T of 1/(u - T A_k) - 1/(u - T B_k),
    /// with c fixed by quadrature so the a-period over dD_k is 1 in the global
    /// orientation.
    static Differential holomorphic(const SchottkyGroup& group, int k, const Truncation& trunc,
                                    int normalization_nodes = 256);
    /// The residue-normalized orbit differential placing both poles in the
    /// orbit of the fixed points of S_k (not a-normalized).
    static Differential holomorphic_orbit(const SchottkyGroup& group, int k, const Truncation& trunc);

    DifferentialKind kind() const { return kind_; }
    const SchottkyGroup& group() const { return group_; }
    int index() const { return index_; }
    Point pole_z() const { return z_; }
    Point pole_zprime() const { return zp_; }
    Complex scale() const { return scale_; }
    /// True when every a-period is 0 (third kind) or the basis normalization holds.
    bool normalized() const { return kind_ != DifferentialKind::HolomorphicOrbit; }

    int max_word_len() const { return static_cast<int>(layer_offsets_.size()) - 2; }
    std::size_t term_count() const { return terms_.size(); }
    std::span<const PolePair> terms() const { return terms_; }
    std::span<const PolePair> layer_terms(int layer) const;

    /// Per-layer norms measured during construction on boundary probe points.
    const std::vector<double>& construction_layer_norms() const { return layer_norms_; }
    double last_layer_norm() const { return layer_norms_.empty() ? 0.0 : layer_norms_.back(); }
    /// Geometric extrapolation of the last two layer norms.
    double tail_estimate() const { return tail_estimate_; }

    /// dEta/du at u. u must lie in the closed fundamental domain
    /// (InvalidArgument otherwise); 0 at infinity.
    Complex eval(const Point& u) const;
    /// Same sum without the domain check; pole proximity is still enforced.
    Complex eval_unchecked(Complex u) const;
    /// scale * sum over one layer.
    Complex eval_layer(int layer, Complex u) const;

private:
    Differential(const SchottkyGroup& group, DifferentialKind kind) : group_(group), kind_(kind) {}

    static Differential orbit_impl(const SchottkyGroup& group, int k, const Truncation& trunc, double norm_scale);
    void build(const Point& p, const Point& q, const Truncation& trunc, int coset_generator, double norm_scale);

    SchottkyGroup group_;
    DifferentialKind kind_;
    int index_ = -1;
    Point z_, zp_;
    Complex scale_{1.0};
    std::vector<PolePair> terms_;
    std::vector<std::size_t> layer_offsets_{0};
    std::vector<double> layer_norms_;
    double tail_estimate_ = 0.0;
};

/// Points spread over all 2g boundary circles (where layer sums peak on the
/// closed fundamental domain).
std::vector<Complex> boundary_probe_points(const SchottkyGroup& group, int per_circle = 8);

/// Per word-length layer, the max over probes of |layer contribution|.
std::vector<double> layer_norms(const Differential& d, std::span<const Complex> probes);

/// n_L * q / (1 - q), q = n_L / n_{L-1}; infinity when the last ratio is >= 1.
double geometric_tail(std::span<const double> norms);

/// max over samples u on dD'_k of |eval(S_k u) S_k'(u) - eval(u)|.
double automorphy_residual(const Differential& d, int k, int samples = 64);

}  // namespace schottky
