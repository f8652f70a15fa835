#include "schottky/group.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "schottky/error.hpp"

namespace schottky {

namespace {

MoebiusMap build_generator(const GeneratorSpec& spec) {
    if (const auto* m = std::get_if<Matrix2>(&spec)) return MoebiusMap(*m);
    const auto& f = std::get<FixedPointForm>(spec);
    return from_fixed_points(Point(f.attracting), Point(f.repelling), f.multiplier);
}

std::string disk_name(int k, bool prime) {
    return (prime ? "D'" : "D") + std::to_string(k + 1);
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// D_l := S_l(boundary of D'_l), or the old D_l when the image is not a disk
// (validation then reports the boundary-mapping failure).
Circle mapped_partner(const MoebiusMap& s, const DiskPair& pair) {
    const CircleImage img = image_of_circle(s, pair.d_prime);
    if (img.is_line()) return pair.d;
    return img.circle();
}

}  // namespace

bool PerturbationDirection::is_zero() const {
    return std::all_of(deltas.begin(), deltas.end(), [](const Matrix2& m) { return m == Matrix2::zero(); });
}

double PerturbationDirection::frobenius_norm() const {
    double s = 0.0;
    for (const auto& m : deltas) s += m.frobenius_norm() * m.frobenius_norm();
    return std::sqrt(s);
}

void PerturbationDirection::check_finite() const {
    for (const auto& m : deltas)
        if (!m.is_finite()) fail(ErrorCode::InvalidArgument, "perturbation direction has a non-finite entry");
}

PerturbationDirection& PerturbationDirection::operator+=(const PerturbationDirection& other) {
    if (other.deltas.size() != deltas.size())
        fail(ErrorCode::Structure, "perturbation directions of different genus");
    for (std::size_t i = 0; i < deltas.size(); ++i) deltas[i] = deltas[i] + other.deltas[i];
    return *this;
}

DiskPair apollonian_disks(Complex a, Complex b, Complex mu) {
    const double k2 = std::abs(mu);
    if (!(k2 > 0.0 && k2 < 1.0)) fail(ErrorCode::InvalidArgument, "apollonian_disks: need 0 < |multiplier| < 1");
    if (a == b) fail(ErrorCode::InvalidArgument, "apollonian_disks: coincident fixed points");
    const double k = std::sqrt(k2);
    const double radius = k * std::abs(a - b) / (1.0 - k2);
    return {Circle{(a - k2 * b) / (1.0 - k2), radius}, Circle{(b - k2 * a) / (1.0 - k2), radius}};
}

bool ValidationReport::usable() const {
    return structural_ok && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.passed) return &c;
    return nullptr;
}

SchottkyGroup::SchottkyGroup(std::vector<GeneratorSpec> generators, std::vector<DiskPair> disks)
    : specs_(std::move(generators)), disks_(std::move(disks)) {
    generators_.reserve(specs_.size());
    inverses_.reserve(specs_.size());
    for (const auto& s : specs_) {
        generators_.push_back(build_generator(s));
        inverses_.push_back(inverse(generators_.back()));
    }
    report_ = validate(*this);
}

void SchottkyGroup::require_usable() const {
    if (!report_.structural_ok) fail(ErrorCode::Structure, report_.structural_error);
    if (const auto* f = report_.first_failure())
        fail(ErrorCode::Validation, "group fails validation: " + f->name + " (" + f->detail + ")");
}

SchottkyGroup SchottkyGroup::perturbed(const PerturbationDirection& dir, Complex t) const {
    if (static_cast<int>(dir.deltas.size()) != genus())
        fail(ErrorCode::Structure, "perturbation direction has " + std::to_string(dir.deltas.size()) +
                                       " matrices for genus " + std::to_string(genus()));
    std::vector<GeneratorSpec> specs;
    specs.reserve(specs_.size());
    for (int l = 0; l < genus(); ++l)
        specs.emplace_back(generator(l).matrix() + t * dir.deltas[static_cast<std::size_t>(l)]);
    return with_generators(std::move(specs));
}

SchottkyGroup SchottkyGroup::with_generators(std::vector<GeneratorSpec> specs) const {
    if (specs.size() != specs_.size() || disks_.size() != specs_.size())
        fail(ErrorCode::Structure, "with_generators: generator/disk count mismatch");
    std::vector<DiskPair> disks = disks_;
    for (std::size_t l = 0; l < specs.size(); ++l)
        disks[l].d = mapped_partner(build_generator(specs[l]), disks[l]);
    return SchottkyGroup(std::move(specs), std::move(disks));
}

SchottkyGroup SchottkyGroup::conjugated(const MoebiusMap& c) const {
    const MoebiusMap c_inv = inverse(c);
    auto map_circle = [&](const Circle& circle) {
        const CircleImage img = image_of_circle(c, circle);
        if (img.is_line() || !img.interior_to_interior)
            fail(ErrorCode::InvalidArgument, "conjugation does not keep every disk a finite disk");
        return img.circle();
    };
    std::vector<GeneratorSpec> specs;
    for (int l = 0; l < genus(); ++l) {
        const auto* f = std::get_if<FixedPointForm>(&specs_[static_cast<std::size_t>(l)]);
        if (f != nullptr) {
            const Point a = c.apply(Point(f->attracting));
            const Point b = c.apply(Point(f->repelling));
            if (a.is_finite() && b.is_finite()) {
                specs.emplace_back(FixedPointForm{a.value(), b.value(), f->multiplier});
                continue;
            }
        }
        specs.emplace_back(compose(compose(c, generator(l)), c_inv).matrix());
    }
    std::vector<DiskPair> disks;
    for (const auto& p : disks_) disks.push_back({map_circle(p.d), map_circle(p.d_prime)});
    return SchottkyGroup(std::move(specs), std::move(disks));
}

ValidationReport validate(const SchottkyGroup& group) {
    ValidationReport rep;
    const int g = group.genus();
    if (g < 1) {
        rep.structural_ok = false;
        rep.structural_error = "genus must be at least 1";
        return rep;
    }
    if (group.disks().size() != static_cast<std::size_t>(g)) {
        rep.structural_ok = false;
        rep.structural_error = std::to_string(g) + " generators but " + std::to_string(group.disks().size()) +
                               " disk pairs";
        return rep;
    }

    struct Named {
        Circle c;
        std::string name;
    };
    std::vector<Named> all;
    for (int k = 0; k < g; ++k) {
        all.push_back({group.disk(k).d, disk_name(k, false)});
        all.push_back({group.disk(k).d_prime, disk_name(k, true)});
    }
    for (const auto& n : all) {
        const bool ok = n.c.radius > 0.0 && std::isfinite(n.c.radius);
        rep.checks.push_back({"radius " + n.name, ok, n.c.radius, "radius " + fmt(n.c.radius)});
    }

    rep.min_disk_gap = HUGE_VAL;
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const double gap = std::abs(all[i].c.center - all[j].c.center) - all[i].c.radius - all[j].c.radius;
            rep.min_disk_gap = std::min(rep.min_disk_gap, gap);
            rep.checks.push_back({"disjoint " + all[i].name + "," + all[j].name, gap > kDiskGapTolerance, gap,
                                  gap > kDiskGapTolerance ? "gap " + fmt(gap)
                                                          : "disks " + all[i].name + " and " + all[j].name +
                                                                " overlap (gap " + fmt(gap) + ")"});
        }
    }

    for (int k = 0; k < g; ++k) {
        const std::string s = "S" + std::to_string(k + 1);
        const MoebiusMap& m = group.generator(k);
        const DiskPair& pair = group.disk(k);
        const FixedPoints fp = fixed_points(m);
        const bool lox = fp.kind == MoebiusKind::Loxodromic;
        rep.checks.push_back({s + " loxodromic", lox, std::abs(std::abs(fp.multiplier) - 1.0),
                              std::string(to_string(fp.kind)) + ", |multiplier| " + fmt(std::abs(fp.multiplier))});

        auto containment = [&](const Point& p, const Circle& c, const std::string& what) {
            const double margin = p.is_infinite() ? -HUGE_VAL : c.radius - std::abs(p.value() - c.center);
            rep.checks.push_back({s + " " + what, lox && margin > 0.0, margin, "margin " + fmt(margin)});
        };
        containment(fp.attracting, pair.d, "attracting fixed point in " + disk_name(k, false));
        containment(fp.repelling, pair.d_prime, "repelling fixed point in " + disk_name(k, true));

        const CircleImage img = image_of_circle(m, pair.d_prime);
        const std::string name = s + " maps " + disk_name(k, true) + " onto exterior of " + disk_name(k, false);
        if (img.is_line()) {
            rep.checks.push_back({name, false, -HUGE_VAL, "image of boundary is a line"});
            rep.max_boundary_residual = HUGE_VAL;
            continue;
        }
        const Circle& c = img.circle();
        const double residual = std::abs(c.center - pair.d.center) + std::abs(c.radius - pair.d.radius);
        const double tol = kBoundaryMapTolerance * std::max(1.0, pair.d.radius);
        rep.max_boundary_residual = std::max(rep.max_boundary_residual, residual);
        const bool ok = residual <= tol && !img.interior_to_interior;
        rep.checks.push_back({name, ok, tol - residual,
                              "boundary residual " + fmt(residual) +
                                  (img.interior_to_interior ? ", orientation interior->interior" : "")});
    }
    return rep;
}

WordStream::WordStream(const SchottkyGroup& group, int max_len, Filter filter, int coset_generator)
    : max_len_(max_len), filter_(filter), coset_generator_(coset_generator) {
    group.require_usable();
    if (max_len < 0) fail(ErrorCode::InvalidArgument, "max word length must be nonnegative");
    if (filter == Filter::CosetRepresentatives && (coset_generator < 0 || coset_generator >= group.genus()))
        fail(ErrorCode::InvalidArgument, "coset generator index out of range");
    for (int k = 0; k < group.genus(); ++k) {
        letter_maps_.push_back(group.generator(k));
        letter_maps_.push_back(group.generator_inverse(k));
    }
    prefix_.assign(1, MoebiusMap::identity());
    next_code_.assign(1, 0);
    current_.matrix = MoebiusMap::identity();
}

bool WordStream::emit_current() const {
    if (filter_ == Filter::All || current_.letters.empty()) return true;
    return current_.letters.back().generator != coset_generator_;
}

const GroupWord* WordStream::next() {
    if (done_) return nullptr;
    if (!started_) {
        started_ = true;
        return &current_;
    }
    const int alphabet = static_cast<int>(letter_maps_.size());
    for (;;) {
        const std::size_t depth = current_.letters.size();
        int code = next_code_[depth];
        if (static_cast<int>(depth) < max_len_) {
            const int forbidden = depth == 0 ? -1 : (current_.letters.back().code() ^ 1);
            if (code == forbidden) ++code;
            if (code < alphabet) {
                next_code_[depth] = code + 1;
                current_.letters.push_back(Letter::from_code(code));
                prefix_.resize(depth + 2);
                next_code_.resize(depth + 2);
                prefix_[depth + 1] = compose(prefix_[depth], letter_maps_[static_cast<std::size_t>(code)]);
                next_code_[depth + 1] = 0;
                current_.matrix = prefix_[depth + 1];
                if (emit_current()) return &current_;
                continue;
            }
        }
        if (depth == 0) {
            done_ = true;
            return nullptr;
        }
        current_.letters.pop_back();
    }
}

WordStream words_up_to(const SchottkyGroup& group, int max_len) { return WordStream(group, max_len); }

WordStream cosets_mod_cyclic(const SchottkyGroup& group, int k, int max_len) {
    return WordStream(group, max_len, WordStream::Filter::CosetRepresentatives, k);
}

std::uint64_t reduced_word_count(int genus, int len) {
    if (len == 0) return 1;
    std::uint64_t n = 2 * static_cast<std::uint64_t>(genus);
    for (int i = 1; i < len; ++i) n *= 2 * static_cast<std::uint64_t>(genus) - 1;
    return n;
}

DomainMembership in_fundamental_domain(const SchottkyGroup& group, const Point& p) {
    DomainMembership out{true, false};
    if (p.is_infinite()) return out;
    const Complex z = p.value();
    for (const auto& pair : group.disks()) {
        for (const Circle* c : {&pair.d, &pair.d_prime}) {
            const double d = std::abs(z - c->center) - c->radius;
            const double tol = 1e-12 * std::max(1.0, c->radius);
            if (std::abs(d) <= tol)
                out.on_boundary = true;
            else if (d < 0.0)
                out.inside = false;
        }
    }
    return out;
}

}  // namespace schottky
