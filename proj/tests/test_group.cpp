#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "schottky/error.hpp"
#include "schottky/group.hpp"

using namespace schottky;

namespace {

std::vector<std::vector<Letter>> collect(WordStream s) {
    std::vector<std::vector<Letter>> out;
    while (const GroupWord* w = s.next()) out.push_back(w->letters);
    return out;
}

SchottkyGroup free_group(int g) {
    std::vector<GeneratorSpec> specs;
    std::vector<DiskPair> disks;
    for (int k = 0; k < g; ++k) {
        const FixedPointForm f{Complex(10.0 * k + 1.0, 0.0), Complex(10.0 * k - 1.0, 0.0), 0.01};
        specs.emplace_back(f);
        disks.push_back(apollonian_disks(f.attracting, f.repelling, f.multiplier));
    }
    return {specs, disks};
}

// Reduced free-group form of a letter sequence.
std::vector<Letter> reduce(std::vector<Letter> w) {
    std::vector<Letter> out;
    for (const Letter& l : w) {
        if (!out.empty() && out.back().generator == l.generator && out.back().sign == -l.sign)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

std::vector<Letter> invert(std::vector<Letter> w) {
    std::reverse(w.begin(), w.end());
    for (auto& l : w) l.sign = -l.sign;
    return w;
}

bool is_power_of(const std::vector<Letter>& w, int k) {
    return std::all_of(w.begin(), w.end(), [&](const Letter& l) { return l.generator == k; });
}

}  // namespace

TEST_CASE("genus-1 fixture validates") {
    const SchottkyGroup g = fixtures::genus1();
    CHECK(g.usable());
    CHECK(g.report().max_boundary_residual < 1e-14);
    CHECK(fixtures::genus2().usable());
}

TEST_CASE("overlapping disks fail and name the pair") {
    const SchottkyGroup g = fixtures::genus1();
    DiskPair p = g.disk(0);
    p.d.radius = 1.8;
    const SchottkyGroup bad({g.spec(0)}, {p});
    CHECK_FALSE(bad.usable());
    const ValidationCheck* f = bad.report().first_failure();
    REQUIRE(f != nullptr);
    bool named = false;
    for (const auto& c : bad.report().checks)
        if (!c.passed && c.name.find("D1") != std::string::npos && c.name.find("D'1") != std::string::npos) named = true;
    CHECK(named);
    CHECK_THROWS_AS(bad.require_usable(), Error);
}

TEST_CASE("non-Apollonian radii fail the boundary check") {
    const FixedPointForm f{1.0, -1.0, 0.04};
    const SchottkyGroup g({f}, {DiskPair{Circle{1.0, 0.35}, Circle{-1.0, 0.35}}});
    CHECK_FALSE(g.usable());
}

TEST_CASE("structural errors are reported") {
    const SchottkyGroup g = fixtures::genus2();
    const SchottkyGroup bad(g.specs(), {g.disk(0)});
    CHECK_FALSE(bad.report().structural_ok);
    CHECK_FALSE(bad.usable());
}

TEST_CASE("word counts") {
    CHECK(collect(words_up_to(free_group(2), 1)).size() == 5);
    CHECK(collect(words_up_to(free_group(2), 2)).size() == 17);
    CHECK(collect(words_up_to(free_group(1), 3)).size() == 7);
    CHECK(reduced_word_count(2, 3) == 4 * 3 * 3);
    CHECK(reduced_word_count(3, 0) == 1);
}

TEST_CASE("word streams are reduced and duplicate-free") {
    for (int g = 1; g <= 3; ++g)
        for (int len = 0; len <= (g == 3 ? 5 : 6); ++len) {
            const auto words = collect(words_up_to(free_group(g), len));
            std::set<std::vector<int>> seen;
            std::uint64_t expected = 0;
            for (int l = 0; l <= len; ++l) expected += reduced_word_count(g, l);
            CHECK(words.size() == expected);
            for (const auto& w : words) {
                CHECK(reduce(w) == w);
                std::vector<int> codes;
                for (const auto& l : w) codes.push_back(l.code());
                CHECK(seen.insert(codes).second);
            }
        }
}

TEST_CASE("genus-1 words are powers of the generator") {
    const SchottkyGroup g = fixtures::genus1();
    WordStream s = words_up_to(g, 6);
    while (const GroupWord* w = s.next()) {
        int n = 0;
        for (const auto& l : w->letters) n += l.sign;
        MoebiusMap p = MoebiusMap::identity();
        MoebiusMap base = n >= 0 ? g.generator(0) : g.generator_inverse(0);
        for (int e = std::abs(n); e > 0; e >>= 1) {
            if (e & 1) p = compose(p, base);
            base = compose(base, base);
        }
        CHECK(projective_distance(p.matrix(), w->matrix.matrix()) < 1e-10);
    }
}

TEST_CASE("coset representatives") {
    CHECK(collect(cosets_mod_cyclic(fixtures::genus1(), 0, 5)).size() == 1);
    const auto reps = collect(cosets_mod_cyclic(free_group(2), 0, 1));
    CHECK(reps.size() == 3);

    // Brute force: partition all words of length <= 2 into cosets u<S_1>.
    const SchottkyGroup g2 = free_group(2);
    const auto all = collect(words_up_to(g2, 2));
    const auto reps2 = collect(cosets_mod_cyclic(g2, 0, 2));
    for (std::size_t i = 0; i < reps2.size(); ++i)
        for (std::size_t j = i + 1; j < reps2.size(); ++j) {
            auto q = invert(reps2[i]);
            q.insert(q.end(), reps2[j].begin(), reps2[j].end());
            CHECK_FALSE(is_power_of(reduce(q), 0));
        }
    std::size_t classes = 0;
    std::vector<bool> taken(all.size(), false);
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (taken[i]) continue;
        ++classes;
        for (std::size_t j = i; j < all.size(); ++j) {
            auto q = invert(all[i]);
            q.insert(q.end(), all[j].begin(), all[j].end());
            if (is_power_of(reduce(q), 0)) taken[j] = true;
        }
    }
    CHECK(reps2.size() == classes);
}

TEST_CASE("fundamental domain membership") {
    const SchottkyGroup g = fixtures::genus1();
    CHECK(in_fundamental_domain(g, Point::infinity()).inside);
    CHECK_FALSE(in_fundamental_domain(g, Point(g.disk(0).d.center)).inside);
    const DomainMembership b = in_fundamental_domain(g, Point(g.disk(0).d.center + g.disk(0).d.radius));
    CHECK(b.inside);
    CHECK(b.on_boundary);
    CHECK(in_fundamental_domain(g, Point(Complex(0, 3))).inside);
}

TEST_CASE("validation is conjugation invariant") {
    const MoebiusMap c(Complex(1.0, 0.2), Complex(0.3, 0.0), Complex(0.02, 0.01), Complex(1.0, 0.0));
    CHECK(fixtures::genus2().conjugated(c).usable());

    const SchottkyGroup g = fixtures::genus1();
    DiskPair p = g.disk(0);
    p.d.radius = 1.8;
    const SchottkyGroup bad({g.spec(0)}, {p});
    CHECK_FALSE(bad.conjugated(MoebiusMap(1.0, 0.0, 0.05, 1.0)).usable());
}

TEST_CASE("perturbed groups keep D' and remap D") {
    const SchottkyGroup g = fixtures::genus2();
    std::mt19937_64 rng(5);
    const PerturbationDirection dir = fixtures::random_direction(g, rng);
    const SchottkyGroup p = g.perturbed(dir, 1e-4);
    CHECK(p.usable());
    CHECK(p.disk(1).d_prime.radius == g.disk(1).d_prime.radius);
    CHECK(p.report().max_boundary_residual < 1e-12);
}
