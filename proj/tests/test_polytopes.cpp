#include <doctest.h>

#include <set>

#include "countdist/constructors.hpp"
#include "countdist/counts.hpp"
#include "countdist/polytopes.hpp"
#include "countdist/scales.hpp"
#include "test_helpers.hpp"

using namespace countdist;
using namespace countdist::testing;

TEST_SUITE_BEGIN("polytopes");

namespace {

PolytopeDescriptor example_descriptor(PolytopeKind kind) {
    PolytopeDescriptor d;
    d.kind = kind;
    d.n = 3;
    d.lambda = Rational(2);
    d.z = uniform_q(3);
    return d;
}

bool contains(const std::vector<Mat<Rational>>& set, const Mat<Rational>& m) {
    for (const auto& v : set)
        if (v == m) return true;
    return false;
}

}  // namespace

TEST_CASE("worked example vertex counts") {
    CHECK(enumerate_vertices(example_descriptor(PolytopeKind::kRF)).vertices.size() == 78);
    CHECK(enumerate_vertices(example_descriptor(PolytopeKind::kF)).vertices.size() == 36);
    CHECK(enumerate_vertices(example_descriptor(PolytopeKind::kRU)).vertices.size() == 36);
    CHECK(enumerate_vertices(example_descriptor(PolytopeKind::kU)).vertices.size() == 27);
}

TEST_CASE("named representation vertices appear verbatim") {
    const auto rf = enumerate_vertices(example_descriptor(PolytopeKind::kRF)).vertices;
    CHECK(contains(rf, example_b1()));
    CHECK(contains(rf, example_b2()));
    CHECK(contains(rf, example_b3()));

    const auto ru = enumerate_vertices(example_descriptor(PolytopeKind::kRU)).vertices;
    CHECK(contains(ru, example_b4()));
    CHECK(contains(ru, example_b6()));

    const auto f = enumerate_vertices(example_descriptor(PolytopeKind::kF)).vertices;
    CHECK(contains(f, example_t_shared()));

    const auto u = enumerate_vertices(example_descriptor(PolytopeKind::kU)).vertices;
    const auto all_to_zero = mat<Rational>({{q(1), q(0), q(0)},
                                            {q(1), q(0), q(0)},
                                            {q(1), q(0), q(0)}});
    CHECK(contains(u, all_to_zero));
    CHECK_FALSE(contains(u, example_t_nonextreme_u()));
}

TEST_CASE("images of the named dropped vertices are classified non-extreme") {
    const auto psi = example_psi();
    const auto priv = Privacy<Rational>::from_lambda(Rational(2));
    const auto z = uniform_q(3);
    CHECK_FALSE(is_extreme_in_F(matmul(psi, example_b3()), z, priv, Rational(0)));
    CHECK_FALSE(is_extreme_in_U(matmul(psi, example_b6()), priv, Rational(0)));
    CHECK(matmul(psi, example_b6()) == example_t_nonextreme_u());
    CHECK(matmul(psi, example_b1()) == example_t_shared());
    CHECK(matmul(psi, example_b2()) == example_t_shared());
}

TEST_CASE("n = 1 degenerate polytopes") {
    PolytopeDescriptor d;
    d.n = 1;
    d.lambda = Rational(2);
    d.z = uniform_q(1);
    for (auto kind : {PolytopeKind::kF, PolytopeKind::kU}) {
        d.kind = kind;
        const auto v = enumerate_vertices(d).vertices;
        REQUIRE(v.size() == 1);
        CHECK(v[0] == Mat<Rational>::identity(1));
    }
}

TEST_CASE("support pruning loses nothing at n = 3") {
    for (auto kind : {PolytopeKind::kRF, PolytopeKind::kRU}) {
        const auto d = example_descriptor(kind);
        const auto pruned = enumerate_vertices(d).vertices;
        const auto unpruned = enumerate_representation_unpruned(d).vertices;
        CHECK(pruned.size() == unpruned.size());
        for (const auto& v : pruned) CHECK(contains(unpruned, v));
    }
}

TEST_CASE("direct binding-constraint enumeration agrees on F and U") {
    for (auto kind : {PolytopeKind::kF, PolytopeKind::kU}) {
        const auto d = example_descriptor(kind);
        const auto via_representation = enumerate_vertices(d).vertices;
        const auto direct = direct_enumerate_matrix_polytope(d).vertices;
        CHECK(via_representation.size() == direct.size());
        for (const auto& v : direct) CHECK(contains(via_representation, v));
    }
}

TEST_CASE("direct enumeration agrees on a non-uniform fixed point") {
    PolytopeDescriptor d;
    d.kind = PolytopeKind::kF;
    d.n = 3;
    d.lambda = Rational(3);
    d.z = dist<Rational>({q(1, 2), q(1, 3), q(1, 6)});
    const auto via_representation = enumerate_vertices(d).vertices;
    const auto direct = direct_enumerate_matrix_polytope(d).vertices;
    CHECK(via_representation.size() == direct.size());
    for (const auto& v : direct) CHECK(contains(via_representation, v));
    CHECK(via_representation.size() > 0);
}

TEST_CASE("representation vertices satisfy the support-count corollaries") {
    const auto rf = enumerate_vertices(example_descriptor(PolytopeKind::kRF)).vertices;
    const auto z = uniform_q(3);
    const auto psi = example_psi();
    int num_positive_cols = 3;  // |P| for the uniform z
    for (const auto& b : rf) {
        int positives = 0;
        for (const auto& v : b.a)
            if (v > 0) ++positives;
        CHECK(positives >= num_positive_cols);
        CHECK(positives <= num_positive_cols + 3 - 1);
        CHECK(psi_affinely_simplified(b, z, psi));
    }

    const auto ru = enumerate_vertices(example_descriptor(PolytopeKind::kRU)).vertices;
    for (const auto& b : ru) {
        int positives = 0;
        for (int i = 0; i < b.rows; ++i) {
            int row_pos = 0;
            for (int j = 0; j < b.cols; ++j)
                if (b(i, j) > 0) ++row_pos;
            CHECK(row_pos <= 1);
            positives += row_pos;
        }
        CHECK(positives >= 1);
        CHECK(positives <= 3);
        CHECK(psi_linearly_simplified(b, psi));
    }
}

TEST_CASE("all-positive extreme points of U have independent scale-multiple columns") {
    const auto u = enumerate_vertices(example_descriptor(PolytopeKind::kU)).vertices;
    const auto priv = Privacy<Rational>::from_lambda(Rational(2));
    int checked = 0;
    for (const auto& t : u) {
        bool all_positive = true;
        for (const auto& v : t.a)
            if (!(v > 0)) all_positive = false;
        if (!all_positive) continue;
        ++checked;
        // Each column must be a positive multiple of a scale: all adjacent
        // ratios at a privacy bound.
        for (int j = 0; j < 3; ++j) {
            for (int i = 0; i + 1 < 3; ++i) {
                const Rational ratio = t(i, j) / t(i + 1, j);
                CHECK((ratio == 2 || ratio == q(1, 2)));
            }
        }
        Mat<Rational> cols(t);
        CHECK(rank_exact(std::move(cols)) == 3);
    }
    CHECK(checked > 0);
}

TEST_CASE("representation theorem verification passes on the worked example") {
    const auto report_f = verify_representation_theorems(example_descriptor(PolytopeKind::kF));
    CHECK(report_f.every_extreme_covered);
    CHECK(report_f.some_representation_drops);
    CHECK(report_f.some_collision);
    CHECK(report_f.num_representation_vertices == 78);
    CHECK(report_f.num_extreme == 36);

    const auto report_u = verify_representation_theorems(example_descriptor(PolytopeKind::kU));
    CHECK(report_u.every_extreme_covered);
    CHECK(report_u.some_representation_drops);
    CHECK(report_u.some_collision);
    CHECK(report_u.num_representation_vertices == 36);
    CHECK(report_u.num_extreme == 27);
}

TEST_CASE("capacity guards") {
    PolytopeDescriptor d = example_descriptor(PolytopeKind::kRF);
    d.n = 4;
    d.z = uniform_q(4);
    CHECK_THROWS_AS(enumerate_vertices(d), CapacityError);
    d.kind = PolytopeKind::kU;
    d.n = 5;
    d.z = uniform_q(5);
    CHECK_THROWS_AS(enumerate_vertices(d), CapacityError);
}

TEST_CASE("descriptor validation") {
    PolytopeDescriptor d = example_descriptor(PolytopeKind::kF);
    d.z.p[0] = q(1, 2);  // breaks the sum
    CHECK_THROWS_AS(enumerate_vertices(d), InputError);
    d = example_descriptor(PolytopeKind::kF);
    d.lambda = Rational(1);
    CHECK_THROWS_AS(enumerate_vertices(d), InputError);
}

TEST_CASE("lp optimum over F equals the exhaustive vertex minimum") {
    const auto d = example_descriptor(PolytopeKind::kF);
    const auto vertices = enumerate_vertices(d).vertices;
    const auto priv = Privacy<Rational>::from_lambda(Rational(2));
    const auto w = build_weight_matrix(ErrorKind::kEad, d.z);

    Rational best(0);
    bool have = false;
    for (const auto& t : vertices) {
        const Rational err = count_error(w, t);
        if (!have || err < best) {
            best = err;
            have = true;
        }
    }
    const auto t_lp = lp_fixed_point_constructor<Rational>(d.z, priv, w);
    CHECK(count_error(w, t_lp) == best);

    // The heuristic lands on some vertex, so it can never beat the LP.
    for (auto sel : {SelectorKind::kMax, SelectorKind::kMin, SelectorKind::kSandwich}) {
        const auto t_h = heuristic_constructor<Rational>(d.z, priv, sel);
        CHECK(contains(vertices, t_h));
        CHECK(count_error(w, t_h) >= best);
    }
}

TEST_SUITE_END();
