#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <qsubset/qsubset.hpp>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace qsubset;
using helpers::mask_bits;

namespace {

// Enumerates aux completions of an original assignment and returns the
// lowest energy seen.
double min_over_aux(const QuboModel& q, const std::vector<std::uint8_t>& original) {
    std::size_t n_aux = static_cast<std::size_t>(q.num_vars - q.num_original);
    std::vector<std::uint8_t> bits(original);
    bits.resize(static_cast<std::size_t>(q.num_vars), 0);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t am = 0; am < (1u << n_aux); ++am) {
        for (std::size_t k = 0; k < n_aux; ++k)
            bits[static_cast<std::size_t>(q.num_original) + k] = (am >> k) & 1u;
        best = std::min(best, qubo_value(q, bits));
    }
    return best;
}

MultilinearPoly random_poly(Rng& rng, int num_vars, int num_terms) {
    MultilinearPoly p;
    p.num_vars = num_vars;
    p.constant = rng.next_normal();
    for (int t = 0; t < num_terms; ++t) {
        std::vector<int> key;
        auto deg = 1 + rng.next_below(4);
        for (std::uint64_t k = 0; k < deg; ++k)
            key.push_back(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(num_vars))));
        p.add_term(key, rng.next_normal());
    }
    return p;
}

}  // namespace

TEST_CASE("qubo_value basics and naive cross-check", "[qubo]") {
    QuboModel q;
    q.num_vars = 3;
    q.num_original = 3;
    q.offset = 1.5;
    q.linear = {0.5, -1.0, 2.0};
    q.quadratic[{0, 1}] = -0.25;
    q.quadratic[{1, 2}] = 4.0;

    CHECK(qubo_value(q, {0, 0, 0}) == 1.5);
    CHECK(qubo_value(q, {0, 1, 0}) == 0.5);  // offset + linear[1]
    CHECK_THROWS_AS(qubo_value(q, {0, 1}), dimension_error);

    Rng rng(avalanche_mix(501, 0));
    for (std::uint32_t mask = 0; mask < 8; ++mask) {
        auto bits = mask_bits(mask, 3);
        double naive = q.offset;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                double c = i == j ? q.linear[static_cast<std::size_t>(i)]
                                  : (q.quadratic.count({i, j}) ? q.quadratic.at({i, j}) : 0.0);
                naive += c * bits[static_cast<std::size_t>(i)] * bits[static_cast<std::size_t>(j)];
            }
        CHECK(helpers::close_abs(qubo_value(q, bits), naive, 1e-12));
    }
}

TEST_CASE("default penalty exceeds the coefficient mass", "[qubo]") {
    MultilinearPoly p;
    p.num_vars = 3;
    p.constant = 100.0;  // constant must not influence the bound
    p.add_term({0}, 1.5);
    p.add_term({0, 1, 2}, -2.0);
    CHECK(default_penalty(p) == 1.0 + 2.0 * 3.5);
}

TEST_CASE("quadratic input passes through untouched", "[qubo]") {
    MultilinearPoly p;
    p.num_vars = 2;
    p.constant = 0.5;
    p.add_term({0}, -1.0);
    p.add_term({0, 1}, 2.0);
    QuboModel q = quadratize(p);
    CHECK(q.num_vars == 2);
    CHECK(q.num_original == 2);
    CHECK(q.aux_defs.empty());
    CHECK(q.offset == 0.5);
    CHECK(q.linear == std::vector<double>{-1.0, 0.0});
    REQUIRE(q.quadratic.size() == 1);
    CHECK(q.quadratic.at({0, 1}) == 2.0);
}

TEST_CASE("single cubic term reduces with one auxiliary", "[qubo]") {
    MultilinearPoly p;
    p.num_vars = 3;
    p.add_term({0, 1, 2}, 1.0);
    QuboModel q = quadratize(p);

    // pair (0,1) wins the lexicographic tie; gadget penalty M = 1 + 2*1 = 3
    CHECK(q.num_vars == 4);
    CHECK(q.num_original == 3);
    CHECK(q.penalty_m == 3.0);
    REQUIRE(q.aux_defs.size() == 1);
    CHECK(q.aux_defs[0].aux == 3);
    CHECK(q.aux_defs[0].left == 0);
    CHECK(q.aux_defs[0].right == 1);
    CHECK(q.linear == std::vector<double>{0.0, 0.0, 0.0, 9.0});
    CHECK(q.quadratic.at({0, 1}) == 3.0);
    CHECK(q.quadratic.at({0, 3}) == -6.0);
    CHECK(q.quadratic.at({1, 3}) == -6.0);
    CHECK(q.quadratic.at({2, 3}) == 1.0);

    // min over the auxiliary equals the cubic at all 8 original assignments
    for (std::uint32_t mask = 0; mask < 8; ++mask) {
        auto z = mask_bits(mask, 3);
        CHECK(min_over_aux(q, z) == evaluate(p, z));
    }
}

TEST_CASE("reduction is sound on random small polynomials", "[qubo]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(avalanche_mix(502 + seed, 0));
        int d = 3 + static_cast<int>(rng.next_below(3));
        MultilinearPoly p = random_poly(rng, d, 12);
        QuboModel q = quadratize(p);
        CHECK(q.num_original == d);
        for (const auto& a : q.aux_defs) {
            CHECK(a.aux >= q.num_original);
            CHECK(a.left < a.aux);
            CHECK(a.right < a.aux);
        }
        for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
            auto z = mask_bits(mask, d);
            double want = evaluate(p, z);
            double got = min_over_aux(q, z);
            CHECK(helpers::close_abs(got, want, 1e-9 * std::fmax(1.0, std::fabs(want))));
        }
    }
}

TEST_CASE("ground states keep their auxiliaries consistent", "[qubo]") {
    Rng rng(avalanche_mix(515, 0));
    MultilinearPoly p = random_poly(rng, 4, 10);
    QuboModel q = quadratize(p);
    REQUIRE(q.num_vars <= 22);
    auto all_best = enumerate_qubo(q);
    for (const auto& read : all_best.reads) {
        for (const auto& a : q.aux_defs) {
            auto u = read.assignment[static_cast<std::size_t>(a.aux)];
            auto prod = read.assignment[static_cast<std::size_t>(a.left)] &
                        read.assignment[static_cast<std::size_t>(a.right)];
            CHECK(u == prod);
        }
    }
}

TEST_CASE("compiled regression polynomial projects to the quartic argmin", "[qubo]") {
    Rng rng(avalanche_mix(503, 0));
    Matrix x = helpers::random_design(rng, 30, 5);
    auto y = helpers::random_vector(rng, 30);
    auto g = gram_summary(x, y);
    auto poly = compile_objective(g, x, y, 0.05);
    QuboModel q = quadratize(poly);

    // quartic brute force over the 32 original assignments
    double best_val = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < 32; ++mask) {
        auto z = mask_bits(mask, 5);
        best_val = std::min(best_val, evaluate(poly, z));
    }

    auto ground = enumerate_qubo(q);
    std::vector<std::uint8_t> projected(ground.best().assignment.begin(),
                                        ground.best().assignment.begin() + 5);
    double projected_val = evaluate(poly, projected);
    CHECK(helpers::close_abs(projected_val, best_val,
                             1e-9 * std::fmax(1.0, std::fabs(best_val))));
    CHECK(helpers::close_abs(ground.best().energy, best_val,
                             1e-9 * std::fmax(1.0, std::fabs(best_val))));
}

TEST_CASE("explicit penalties are respected and validated", "[qubo]") {
    MultilinearPoly p;
    p.num_vars = 3;
    p.add_term({0, 1, 2}, 1.0);
    QuboModel q = quadratize(p, 50.0);
    CHECK(q.penalty_m == 50.0);
    CHECK(q.quadratic.at({0, 1}) == 50.0);
    CHECK(q.linear[3] == 150.0);

    CHECK_THROWS_AS(quadratize(p, 0.0), invalid_input);
    CHECK_THROWS_AS(quadratize(p, -2.0), invalid_input);

    // a deliberately tiny penalty still quadratizes; soundness is then lost,
    // which is exactly why the default is sized to the coefficient mass
    QuboModel weak = quadratize(p, 0.25);
    CHECK(weak.penalty_m == 0.25);
}

TEST_CASE("ising conversion closed forms", "[qubo]") {
    QuboModel pair;
    pair.num_vars = 2;
    pair.num_original = 2;
    pair.linear = {0.0, 0.0};
    pair.quadratic[{0, 1}] = 1.0;
    IsingModel m = to_ising(pair);
    CHECK(m.num_spins == 2);
    CHECK(m.h == std::vector<double>{0.25, 0.25});
    CHECK(m.j.at({0, 1}) == 0.25);
    CHECK(m.offset == 0.25);

    QuboModel single;
    single.num_vars = 1;
    single.num_original = 1;
    single.linear = {1.0};
    IsingModel s = to_ising(single);
    CHECK(s.h == std::vector<double>{0.5});
    CHECK(s.offset == 0.5);
    CHECK(s.j.empty());
}

TEST_CASE("qubo and ising values agree at every assignment", "[qubo]") {
    Rng rng(avalanche_mix(504, 0));
    QuboModel q;
    q.num_vars = 6;
    q.num_original = 6;
    q.offset = rng.next_normal();
    q.linear.resize(6);
    for (auto& c : q.linear) c = rng.next_normal();
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
            if (rng.next_unit() < 0.7) q.quadratic[{i, j}] = rng.next_normal();

    IsingModel m = to_ising(q);
    for (std::uint32_t mask = 0; mask < 64; ++mask) {
        auto bits = mask_bits(mask, 6);
        std::vector<int> spins(6);
        for (int i = 0; i < 6; ++i) spins[static_cast<std::size_t>(i)] = bits[static_cast<std::size_t>(i)] ? 1 : -1;
        CHECK(helpers::close_abs(qubo_value(q, bits), ising_value(m, spins), 1e-12));
    }
    CHECK_THROWS_AS(ising_value(m, std::vector<int>(6, 0)), invalid_input);
    CHECK_THROWS_AS(ising_value(m, std::vector<int>(5, 1)), dimension_error);
}

TEST_CASE("qubo text emission is frozen", "[qubo]") {
    MultilinearPoly p;
    p.num_vars = 3;
    p.add_term({0, 1, 2}, 1.0);
    QuboModel q = quadratize(p);
    std::string expected =
        "p qubo 4 3\n"
        "offset 0\n"
        "3 3 9\n"
        "0 1 3\n"
        "0 3 -6\n"
        "1 3 -6\n"
        "2 3 1\n"
        "# penalty_m 3\n"
        "# aux 3 = 0*1\n";
    CHECK(qubo_to_string(q) == expected);
}

TEST_CASE("qubo text round-trips bit for bit", "[qubo]") {
    Rng rng(avalanche_mix(505, 0));
    Matrix x = helpers::random_design(rng, 20, 4);
    auto y = helpers::random_vector(rng, 20);
    auto g = gram_summary(x, y);
    QuboModel q = quadratize(compile_objective(g, x, y, 0.01));

    std::string text = qubo_to_string(q);
    QuboModel back = qubo_from_string(text);
    CHECK(back.num_vars == q.num_vars);
    CHECK(back.num_original == q.num_original);
    CHECK(back.offset == q.offset);
    CHECK(back.linear == q.linear);
    CHECK(back.quadratic == q.quadratic);
    CHECK(back.penalty_m == q.penalty_m);
    REQUIRE(back.aux_defs.size() == q.aux_defs.size());
    for (std::size_t i = 0; i < q.aux_defs.size(); ++i) {
        CHECK(back.aux_defs[i].aux == q.aux_defs[i].aux);
        CHECK(back.aux_defs[i].left == q.aux_defs[i].left);
        CHECK(back.aux_defs[i].right == q.aux_defs[i].right);
    }
    CHECK(qubo_to_string(back) == text);
}

TEST_CASE("qubo text parser handles hand-written variants", "[qubo]") {
    // comments anywhere, blank lines, CRLF, repeated coefficient lines adding up
    std::string text =
        "# produced by hand\r\n"
        "p qubo 2 2\r\n"
        "\r\n"
        "offset 1.5\r\n"
        "0 0 2\r\n"
        "0 0 0.5\r\n"
        "1 0 -1\r\n"
        "# trailing note\r\n";
    QuboModel q = qubo_from_string(text);
    CHECK(q.num_vars == 2);
    CHECK(q.offset == 1.5);
    CHECK(q.linear[0] == 2.5);
    CHECK(q.quadratic.at({0, 1}) == -1.0);  // pair stored in sorted order
}

TEST_CASE("qubo text parser rejects damaged input", "[qubo]") {
    CHECK_THROWS_AS(qubo_from_string(""), invalid_input);
    CHECK_THROWS_AS(qubo_from_string("offset 1\n"), invalid_input);  // data before header
    CHECK_THROWS_AS(qubo_from_string("p ising 2 2\n"), invalid_input);
    CHECK_THROWS_AS(qubo_from_string("p qubo 2 3\n"), invalid_input);  // originals exceed total
    CHECK_THROWS_AS(qubo_from_string("p qubo 2 2\noffset x\n"), invalid_input);
    CHECK_THROWS_AS(qubo_from_string("p qubo 2 2\n0 5 1\n"), invalid_input);  // index range
    CHECK_THROWS_AS(qubo_from_string("p qubo 2 2\n0 1\n"), invalid_input);    // short line
    CHECK_THROWS_AS(qubo_from_string("p qubo 2 2\n# aux 9 = 0*1\n"), invalid_input);
}
