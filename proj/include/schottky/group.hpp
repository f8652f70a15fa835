#pragma once

// Classical Schottky groups: generators, paired disks, validation and
// reduced-word enumeration.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "schottky/moebius.hpp"

namespace schottky {

/// Disk D_k (contains the attracting fixed point) and D'_k (repelling).
/// S_k maps the interior of D'_k onto the exterior of D_k.
struct DiskPair {
    Circle d;
    Circle d_prime;
};

struct FixedPointForm {
    Complex attracting;
    Complex repelling;
    Complex multiplier;
};

/// A generator as authored: raw matrix or (attracting, repelling, multiplier).
using GeneratorSpec = std::variant<Matrix2, FixedPointForm>;

/// Disks |(u-A)/(u-B)| < sqrt|mu| and |(u-A)/(u-B)| > 1/sqrt|mu|, which the
/// generator with these fixed points and multiplier maps onto each other.
DiskPair apollonian_disks(Complex attracting, Complex repelling, Complex multiplier);

/// A boundary-circle check or geometric margin recorded by validate().
struct ValidationCheck {
    std::string name;
    bool passed = false;
    double margin = 0.0;  // positive = satisfied with room to spare
    std::string detail;
};

struct ValidationReport {
    bool structural_ok = true;
    std::string structural_error;
    std::vector<ValidationCheck> checks;
    double min_disk_gap = 0.0;
    double max_boundary_residual = 0.0;

    bool usable() const;
    /// First failing check, if any.
    const ValidationCheck* first_failure() const;
};

inline constexpr double kDiskGapTolerance = 1e-12;
inline constexpr double kBoundaryMapTolerance = 1e-10;

/// Tangent direction in generator space: one matrix dS_l per generator, on
/// the same projective scale as the stored generator matrix S_l. The
/// first-order validity of every variation is O(|t dS|^2).
struct PerturbationDirection {
    std::vector<Matrix2> deltas;

    static PerturbationDirection zero(int genus) {
        return {std::vector<Matrix2>(static_cast<std::size_t>(genus), Matrix2::zero())};
    }
    bool is_zero() const;
    double frobenius_norm() const;
    /// Throws InvalidArgument on non-finite entries.
    void check_finite() const;

    PerturbationDirection& operator+=(const PerturbationDirection& other);
    friend PerturbationDirection operator*(Complex s, PerturbationDirection d) {
        for (auto& m : d.deltas) m = s * m;
        return d;
    }
};

class SchottkyGroup {
public:
    /// Lists are stored as given; mismatched lengths surface in the report.
    SchottkyGroup(std::vector<GeneratorSpec> generators, std::vector<DiskPair> disks);

    int genus() const { return static_cast<int>(generators_.size()); }
    const MoebiusMap& generator(int k) const { return generators_.at(static_cast<std::size_t>(k)); }
    const MoebiusMap& generator_inverse(int k) const { return inverses_.at(static_cast<std::size_t>(k)); }
    const GeneratorSpec& spec(int k) const { return specs_.at(static_cast<std::size_t>(k)); }
    const std::vector<GeneratorSpec>& specs() const { return specs_; }
    const std::vector<DiskPair>& disks() const { return disks_; }
    const DiskPair& disk(int k) const { return disks_.at(static_cast<std::size_t>(k)); }

    const ValidationReport& report() const { return report_; }
    bool usable() const { return report_.usable(); }
    /// Throws Validation (or Structure) with the first failing check.
    void require_usable() const;

    /// Generators S_l + t dS_l as raw matrices; D'_l kept, D_l := S_l(dD'_l).
    SchottkyGroup perturbed(const PerturbationDirection& dir, Complex t) const;
    /// Same disk policy, with replacement generator specs.
    SchottkyGroup with_generators(std::vector<GeneratorSpec> specs) const;
    /// Conjugate every generator by c and map every disk by c. Throws
    /// InvalidArgument if a disk would stop being a finite disk.
    SchottkyGroup conjugated(const MoebiusMap& c) const;

private:
    std::vector<GeneratorSpec> specs_;
    std::vector<MoebiusMap> generators_;
    std::vector<MoebiusMap> inverses_;
    std::vector<DiskPair> disks_;
    ValidationReport report_;
};

ValidationReport validate(const SchottkyGroup& group);

/// Letter: generator index and exponent sign (+1 for S_k, -1 for S_k^-1).
struct Letter {
    int generator = 0;
    int sign = 1;

    int code() const { return 2 * generator + (sign > 0 ? 0 : 1); }
    static Letter from_code(int c) { return {c / 2, (c % 2) == 0 ? 1 : -1}; }
    friend bool operator==(const Letter&, const Letter&) = default;
};

struct GroupWord {
    std::vector<Letter> letters;
    MoebiusMap matrix;

    std::size_t length() const { return letters.size(); }
};

/// Depth-first stream over the prefix tree of reduced words. Each emitted
/// word costs one matrix product. The returned pointer stays valid until the
/// next call to next().
class WordStream {
public:
    enum class Filter { All, CosetRepresentatives };

    WordStream(const SchottkyGroup& group, int max_len, Filter filter = Filter::All, int coset_generator = 0);

    const GroupWord* next();

private:
    bool emit_current() const;

    std::vector<MoebiusMap> letter_maps_;  // code -> matrix
    int max_len_;
    Filter filter_;
    int coset_generator_;
    GroupWord current_;
    std::vector<MoebiusMap> prefix_;       // prefix_[i] = product of first i letters
    std::vector<int> next_code_;           // next child code to try at depth i
    bool started_ = false;
    bool done_ = false;
};

/// Every reduced word of length <= max_len (identity included), exactly once.
WordStream words_up_to(const SchottkyGroup& group, int max_len);

/// One representative per left coset of <S_k> among words of length <= max_len:
/// the reduced words whose last letter is not S_k^{+-1}.
WordStream cosets_mod_cyclic(const SchottkyGroup& group, int k, int max_len);

/// Number of reduced words of length exactly len in a free group of rank g.
std::uint64_t reduced_word_count(int genus, int len);

struct DomainMembership {
    bool inside = false;       // outside-or-on every open disk
    bool on_boundary = false;  // within tolerance of some boundary circle
};

DomainMembership in_fundamental_domain(const SchottkyGroup& group, const Point& p);

}  // namespace schottky
