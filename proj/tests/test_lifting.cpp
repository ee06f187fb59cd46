#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "liftid/lifting.hpp"
#include "liftid/plant.hpp"

using namespace liftid::lifting;
using liftid::DimensionMismatch;
using liftid::numerics::Matrix;
using liftid::numerics::Rng;
using liftid::numerics::Vector;

namespace {

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("assemble_datum concatenates in (x, zeta, eta, u) order") {
    const Dims dims{1, 2, 2, 1};
    const Vector xi = assemble_datum(dims, vec({1}), vec({2, 3}), vec({4, 5}), vec({6}));
    CHECK(xi.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK(xi[i] == i + 1);
}

TEST_CASE("assemble_datum degenerate lift is the plain state-space datum") {
    const Dims dims{2, 0, 0, 1};
    const Vector xi = assemble_datum(dims, vec({1, 2}), Vector(0), Vector(0), vec({3}));
    CHECK(xi.size() == 3);
    CHECK(xi[0] == 1);
    CHECK(xi[2] == 3);
}

TEST_CASE("assemble_datum rejects mismatched lengths") {
    const Dims dims{1, 2, 2, 1};
    CHECK_THROWS_AS(assemble_datum(dims, vec({1}), vec({2, 3}), vec({4}), vec({6})),
                    DimensionMismatch);
}

TEST_CASE("assemble_datum is injective for fixed dims") {
    const Dims dims{1, 1, 1, 1};
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector a1 = rng.uniform(-1, 1, 1), a2 = rng.uniform(-1, 1, 1),
                     a3 = rng.uniform(-1, 1, 1), a4 = rng.uniform(-1, 1, 1);
        const Vector b1 = rng.uniform(-1, 1, 1), b2 = rng.uniform(-1, 1, 1),
                     b3 = rng.uniform(-1, 1, 1), b4 = rng.uniform(-1, 1, 1);
        const bool inputs_equal = a1 == b1 && a2 == b2 && a3 == b3 && a4 == b4;
        const bool datums_equal =
            assemble_datum(dims, a1, a2, a3, a4) == assemble_datum(dims, b1, b2, b3, b4);
        CHECK(inputs_equal == datums_equal);
    }
}

TEST_CASE("poly_features evaluates univariate monomials in order") {
    const PolyBasis basis = PolyBasis::graded_lex(1, 3);
    const Vector features = basis.evaluate(vec({2}));
    CHECK(features.size() == 3);
    CHECK(features[0] == 2);
    CHECK(features[1] == 4);
    CHECK(features[2] == 8);
}

TEST_CASE("poly_features at zero are all zero since the constant is excluded") {
    const PolyBasis basis = PolyBasis::graded_lex(3, 10);
    const Vector features = basis.evaluate(Vector::Zero(3));
    CHECK(features.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("graded-lex over three variables truncates to exactly 32 features") {
    const PolyBasis basis = PolyBasis::graded_lex(3, 32);
    CHECK(basis.size() == 32);
    // Degree 1 first: x, y, z.
    CHECK(basis.exponents()[0] == std::vector<int>{1, 0, 0});
    CHECK(basis.exponents()[1] == std::vector<int>{0, 1, 0});
    CHECK(basis.exponents()[2] == std::vector<int>{0, 0, 1});
    // Degree 2 follows, descending lex: x^2, xy, xz, y^2, ...
    CHECK(basis.exponents()[3] == std::vector<int>{2, 0, 0});
    CHECK(basis.exponents()[4] == std::vector<int>{1, 1, 0});
    int degree = 0;
    for (const auto& e : basis.exponents()) {
        int total = 0;
        for (int k : e) total += k;
        CHECK(total >= degree);  // graded order is monotone
        degree = std::max(degree, total);
    }
}

TEST_CASE("min_degree 2 dictionaries skip the linear monomials") {
    const PolyBasis basis = PolyBasis::graded_lex(3, 6, 2);
    for (const auto& e : basis.exponents()) {
        int total = 0;
        for (int k : e) total += k;
        CHECK(total >= 2);
    }
}

namespace {

Dataset tiny_dataset(int traj_count, int samples) {
    const liftid::plant::ToyPlant plant;
    const Rng rng(99);
    Dataset ds;
    for (int i = 0; i < traj_count; ++i) {
        Rng stream = rng.derive(i + 1);
        const Vector u = stream.uniform(-1.0, 1.0, samples);
        ds.trajectories.push_back(liftid::plant::simulate(plant, 0.05 * i, u, 0.05));
        ds.split.push_back(i == 0 ? Split::Validation : Split::Train);
    }
    ds.compute_centering();
    return ds;
}

}  // namespace

TEST_CASE("transition pair extraction counts and boundaries") {
    Dataset single = tiny_dataset(2, 101);
    const auto pairs = transition_pairs(single, Split::Train);
    CHECK(pairs.size() == 100);

    // Never crosses boundaries: sum over trajectories of (len - 1).
    Dataset multi = tiny_dataset(5, 21);
    const auto train_pairs = transition_pairs(multi, Split::Train);
    CHECK(train_pairs.size() == 4 * 20);
    const auto val_pairs = transition_pairs(multi, Split::Validation);
    CHECK(val_pairs.size() == 20);

    // Consecutive-sample identity within each pair.
    const auto& traj = multi.trajectories[1];
    CHECK((train_pairs[0].x_t - traj.states.row(0).transpose()).norm() == 0.0);
    CHECK((train_pairs[0].x_next - traj.states.row(1).transpose()).norm() == 0.0);
}

TEST_CASE("transition pairs on an absent split throw") {
    Dataset ds = tiny_dataset(2, 11);
    ds.split.assign(2, Split::Train);
    CHECK_THROWS_AS(transition_pairs(ds, Split::Validation), std::invalid_argument);
}

TEST_CASE("dataset validation catches mismatched trajectories") {
    Dataset ds = tiny_dataset(3, 11);
    ds.trajectories[1].dt *= 2.0;
    CHECK_THROWS_AS(ds.validate(), DimensionMismatch);
}

TEST_CASE("lifted model block accessors slice the datum convention") {
    LiftedLinearModel model;
    model.dims = Dims{1, 2, 2, 1};
    model.A = Matrix::Zero(3, 6);
    model.H = Matrix::Zero(2, 6);
    model.A(0, 0) = 1.0;  // x block
    model.A(0, 1) = 2.0;  // zeta block
    model.A(0, 3) = 3.0;  // eta block
    model.A(0, 5) = 4.0;  // u block
    CHECK(model.a_x()(0, 0) == 1.0);
    CHECK(model.a_zeta()(0, 0) == 2.0);
    CHECK(model.a_eta()(0, 0) == 3.0);
    CHECK(model.a_u()(0, 0) == 4.0);
    model.validate();
    model.H = Matrix::Zero(2, 5);
    CHECK_THROWS_AS(model.validate(), DimensionMismatch);
}
