#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "tsvf/errors.hpp"
#include "tsvf/qcore.hpp"
#include "tsvf/rng.hpp"

using namespace tsvf;
using testutil::expm_taylor;
using testutil::max_abs_diff;
using testutil::random_hermitian;
using testutil::random_state_vector;

namespace {
const complex_t kI{0.0, 1.0};
const complex_t kR2{0.70710678118654752440, 0.0};
}

TEST_CASE("layout strides, lookup and sublayouts") {
    SubsystemLayout layout({{"x", 2}, {"y", 3}, {"z", 2}});
    CHECK(layout.total_dim() == 12);
    CHECK(layout.size() == 3);
    CHECK(layout.stride_at(0) == 6);
    CHECK(layout.stride_at(1) == 2);
    CHECK(layout.stride_at(2) == 1);
    CHECK(layout.position_of("y") == 1);
    CHECK(layout.contains("z"));
    CHECK(!layout.contains("w"));
    CHECK_THROWS_AS(layout.position_of("w"), std::invalid_argument);
    CHECK(layout.describe() == "x(2) x y(3) x z(2)");

    auto sub = layout.sublayout({"z", "x"});  // result keeps the layout's order
    REQUIRE(sub.size() == 2);
    CHECK(sub.factors()[0].label == "x");
    CHECK(sub.factors()[1].label == "z");
    CHECK_THROWS_AS(layout.sublayout({"x", "x"}), std::invalid_argument);
    CHECK_THROWS_AS(layout.sublayout({"nope"}), std::invalid_argument);

    CHECK_THROWS_AS(SubsystemLayout({{"a", 2}, {"a", 2}}), std::invalid_argument);
    CHECK_THROWS_AS(SubsystemLayout({{"a", 1}}), std::invalid_argument);
    CHECK_THROWS_AS(SubsystemLayout({{"", 2}}), std::invalid_argument);

    auto qs = SubsystemLayout::qubits({"s", "a"});
    CHECK(qs.total_dim() == 4);
    CHECK(qs == SubsystemLayout({{"s", 2}, {"a", 2}}));
    CHECK(qs != layout);
}

TEST_CASE("state vector validation and bookkeeping") {
    auto layout = SubsystemLayout::qubits({"s"});
    Vector good(2);
    good << kR2, kR2;
    StateVector psi(layout, good, 1.5, true);
    CHECK(psi.time() == 1.5);
    CHECK(psi.normalized());
    CHECK(psi.with_time(3.0).normalized());  // flag survives retiming
    CHECK(psi.dim() == 2);
    CHECK(psi.with_time(3.0).time() == 3.0);

    Vector bad(2);
    bad << complex_t{0.9, 0.0}, complex_t{0.0, 0.0};
    CHECK_THROWS_AS(StateVector(layout, bad, 0.0, true), NormalizationError);
    StateVector unnorm(layout, bad);  // unchecked by default
    CHECK(!unnorm.normalized());
    CHECK(unnorm.norm() == doctest::Approx(0.9));

    Vector wrong_size(3);
    wrong_size.setZero();
    wrong_size[0] = 1.0;
    CHECK_THROWS_AS(StateVector(layout, wrong_size), std::invalid_argument);

    Vector nan_vec(2);
    nan_vec << complex_t{std::nan(""), 0.0}, complex_t{0.0, 0.0};
    CHECK_THROWS_AS(StateVector(layout, nan_vec, 0.0, false), std::invalid_argument);
}

TEST_CASE("operator factories check their claims") {
    auto layout = SubsystemLayout::qubits({"s"});
    CHECK(Operator::hermitian(layout, sigma_x()).hermitian_flag());
    CHECK(Operator::unitary(layout, sigma_x()).unitary_flag());

    Matrix skew(2, 2);
    skew << 0.0, 1.0, -1.0, 0.0;  // antisymmetric real, not hermitian
    CHECK_THROWS_AS(Operator::hermitian(layout, skew), std::invalid_argument);

    Matrix shrink = 0.5 * Matrix::Identity(2, 2);
    CHECK_THROWS_AS(Operator::unitary(layout, shrink), std::invalid_argument);

    Operator plain(layout, skew);
    CHECK(!plain.hermitian_flag());
    CHECK(!plain.unitary_flag());

    CHECK_THROWS_AS(Operator(layout, Matrix::Identity(3, 3)), std::invalid_argument);
    Matrix rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS(Operator(layout, rect), std::invalid_argument);
}

TEST_CASE("density matrix admits only positive unit-trace hermitian input") {
    auto layout = SubsystemLayout::qubits({"s"});
    Matrix mixed = 0.5 * Matrix::Identity(2, 2);
    DensityMatrix rho(layout, mixed);
    CHECK(rho.entries()(0, 0).real() == doctest::Approx(0.5));

    Matrix neg(2, 2);
    neg << 1.5, 0.0, 0.0, -0.5;  // trace 1 but indefinite
    CHECK_THROWS_AS(DensityMatrix(layout, neg), std::invalid_argument);

    CHECK_THROWS_AS(DensityMatrix(layout, Matrix::Identity(2, 2)), std::invalid_argument);

    Matrix nonherm(2, 2);
    nonherm << 0.5, 0.3, 0.0, 0.5;
    CHECK_THROWS_AS(DensityMatrix(layout, nonherm), std::invalid_argument);
}

TEST_CASE("kron and tensor products compose layouts and amplitudes") {
    Matrix a(2, 2), b(2, 2);
    a << 1.0, 2.0, 3.0, 4.0;
    b << 0.0, 1.0, 1.0, 0.0;
    Matrix k = kron(a, b);
    REQUIRE(k.rows() == 4);
    CHECK(k(0, 1) == complex_t{1.0, 0.0});
    CHECK(k(0, 0) == complex_t{0.0, 0.0});
    CHECK(k(2, 1) == complex_t{3.0, 0.0});  // a(1,0) * b(0,1)
    CHECK(k(3, 2) == complex_t{4.0, 0.0});

    Vector up(2), plus(2);
    up << 1.0, 0.0;
    plus << kR2, kR2;
    StateVector su(SubsystemLayout::qubits({"s"}), up, 2.0);
    StateVector ap(SubsystemLayout::qubits({"a"}), plus, 2.0);
    StateVector joint = tensor_product(su, ap);
    CHECK(joint.layout().describe() == "s(2) x a(2)");
    CHECK(std::abs(joint.amplitudes()[0] - kR2) < 1e-15);
    CHECK(std::abs(joint.amplitudes()[1] - kR2) < 1e-15);
    CHECK(std::abs(joint.amplitudes()[2]) < 1e-15);
    CHECK(joint.time() == 2.0);

    CHECK_THROWS_AS(tensor_product(su, su), std::invalid_argument);  // label collision
    CHECK_THROWS_AS(tensor_product(su, ap.with_time(7.0)), std::invalid_argument);

    Operator oz = Operator::hermitian(SubsystemLayout::qubits({"s"}), sigma_z());
    Operator ox = Operator::hermitian(SubsystemLayout::qubits({"a"}), sigma_x());
    Operator prod = tensor_product(oz, ox);
    CHECK(prod.layout().total_dim() == 4);
    CHECK(max_abs_diff(prod.entries(), kron(sigma_z(), sigma_x())) == 0.0);
    CHECK(prod.hermitian_flag());
}

TEST_CASE("pauli algebra") {
    CHECK(max_abs_diff(sigma_x() * sigma_y(), kI * sigma_z()) < 1e-15);
    CHECK(max_abs_diff(sigma_y() * sigma_z(), kI * sigma_x()) < 1e-15);
    CHECK(max_abs_diff(sigma_z() * sigma_x(), kI * sigma_y()) < 1e-15);
    CHECK(max_abs_diff(sigma_x() * sigma_x(), Matrix::Identity(2, 2)) == 0.0);
    CHECK(sigma_y()(0, 1) == complex_t{0.0, -1.0});
    CHECK(sigma_z()(1, 1) == complex_t{-1.0, 0.0});
}

TEST_CASE("closed-form qubit rotations match the series exponential") {
    DrawSource d(derive_seed(11, 0));
    for (int trial = 0; trial < 20; ++trial) {
        double c = 8.0 * d.uniform01() - 4.0;
        Matrix y_closed = exp_i_sigma(PauliAxis::y, c);
        Matrix z_closed = exp_i_sigma(PauliAxis::z, c);
        CHECK(max_abs_diff(y_closed, expm_taylor(kI * c * sigma_y())) < 1e-13);
        CHECK(max_abs_diff(z_closed, expm_taylor(kI * c * sigma_z())) < 1e-13);
    }
}

TEST_CASE("partial trace: product states factor and entangled pairs mix") {
    auto layout = SubsystemLayout::qubits({"s", "a"});

    // Bell pair: either marginal is maximally mixed.
    Vector bell(4);
    bell << kR2, 0.0, 0.0, kR2;
    Matrix rho_bell = bell * bell.adjoint();
    DensityMatrix rho(layout, rho_bell);
    DensityMatrix left = partial_trace(rho, {"s"});
    CHECK(left.layout().describe() == "s(2)");
    CHECK(max_abs_diff(left.entries(), 0.5 * Matrix::Identity(2, 2)) < 1e-14);

    // Product state: marginal reproduces the factor.
    DrawSource d(derive_seed(12, 0));
    Vector s_part = random_state_vector(d, 2);
    Vector a_part = random_state_vector(d, 2);
    Vector prod_vec = Vector(4);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) prod_vec[2 * i + j] = s_part[i] * a_part[j];
    DensityMatrix rho_prod(layout, prod_vec * prod_vec.adjoint());
    DensityMatrix right = partial_trace(rho_prod, {"a"});
    CHECK(max_abs_diff(right.entries(), Matrix(a_part * a_part.adjoint())) < 1e-14);

    // Trace is preserved and keep-order follows the layout, not the argument.
    auto big = SubsystemLayout({{"x", 2}, {"y", 3}, {"z", 2}});
    DrawSource d2(derive_seed(12, 1));
    Vector psi = random_state_vector(d2, big.total_dim());
    DensityMatrix full(big, psi * psi.adjoint());
    DensityMatrix kept = partial_trace(full, {"z", "x"});
    CHECK(kept.layout().describe() == "x(2) x z(2)");
    CHECK(std::abs(kept.entries().trace() - complex_t{1.0, 0.0}) < 1e-12);

    CHECK_THROWS_AS(partial_trace(full, {}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(full, {"w"}), std::invalid_argument);
}

TEST_CASE("partial trace against a brute-force index sum") {
    auto layout = SubsystemLayout({{"p", 2}, {"q", 3}, {"r", 2}});
    DrawSource d(derive_seed(13, 0));
    Vector psi = random_state_vector(d, layout.total_dim());
    Matrix full = psi * psi.adjoint();

    // Keep q: sum over p and r explicitly.
    Matrix want = Matrix::Zero(3, 3);
    auto flat = [](Index p, Index q, Index r) { return p * 6 + q * 2 + r; };
    for (Index q1 = 0; q1 < 3; ++q1)
        for (Index q2 = 0; q2 < 3; ++q2)
            for (Index p = 0; p < 2; ++p)
                for (Index r = 0; r < 2; ++r) want(q1, q2) += full(flat(p, q1, r), flat(p, q2, r));

    DensityMatrix got = partial_trace(DensityMatrix(layout, full), {"q"});
    CHECK(max_abs_diff(got.entries(), want) < 1e-14);
}

TEST_CASE("propagator matches an independent series exponential") {
    DrawSource d(derive_seed(14, 0));
    auto layout = SubsystemLayout::qubits({"s", "a"});
    for (int trial = 0; trial < 10; ++trial) {
        Matrix h = random_hermitian(d, 4);
        double dt = 4.0 * d.uniform01() - 2.0;
        Operator u = evolution_operator(Operator::hermitian(layout, h), dt);
        CHECK(u.unitary_flag());
        Matrix want = expm_taylor(-kI * dt * h);
        CHECK(max_abs_diff(u.entries(), want) < 1e-12);
    }
    Matrix skew(2, 2);
    skew << 0.0, 1.0, -1.0, 0.0;
    CHECK_THROWS_AS(evolution_operator(Operator(SubsystemLayout::qubits({"s"}), skew), 1.0),
                    std::invalid_argument);
}

TEST_CASE("evolution is unitary and reversible") {
    DrawSource d(derive_seed(15, 0));
    auto layout = SubsystemLayout::qubits({"s", "a"});
    for (int trial = 0; trial < 10; ++trial) {
        Matrix h = random_hermitian(d, 4);
        Operator gen = Operator::hermitian(layout, h);
        StateVector psi(layout, random_state_vector(d, 4), 0.0);
        double dt = 3.0 * d.uniform01() + 0.1;

        StateVector fwd = evolve(psi, gen, dt);
        CHECK(fwd.time() == doctest::Approx(dt));
        CHECK(fwd.norm() == doctest::Approx(1.0).epsilon(1e-12));

        StateVector back = evolve(fwd, gen, -dt);
        CHECK(max_abs_diff(back.amplitudes(), psi.amplitudes()) < 1e-10);
        CHECK(back.time() == doctest::Approx(0.0));
    }

    StateVector psi(layout, random_state_vector(d, 4));
    Operator small = Operator::hermitian(SubsystemLayout::qubits({"s"}), sigma_z());
    CHECK_THROWS_AS(evolve(psi, small, 0.5), std::invalid_argument);
}

TEST_CASE("schedule evolution equals step-by-step evolution") {
    DrawSource d(derive_seed(16, 0));
    auto layout = SubsystemLayout::qubits({"s"});
    Operator h1 = Operator::hermitian(layout, random_hermitian(d, 2));
    Operator h2 = Operator::hermitian(layout, random_hermitian(d, 2));
    StateVector psi(layout, random_state_vector(d, 2));

    StateVector via_schedule = evolve(psi, Schedule{{h1, 0.7}, {h2, 0.4}});
    StateVector stepped = evolve(evolve(psi, h1, 0.7), h2, 0.4);
    CHECK(max_abs_diff(via_schedule.amplitudes(), stepped.amplitudes()) < 1e-14);
    CHECK(via_schedule.time() == doctest::Approx(1.1));
}

TEST_CASE("embedding acts as identity away from its subsystem") {
    auto target = SubsystemLayout({{"s", 2}, {"m", 3}, {"a", 2}});
    Operator zs = Operator::hermitian(SubsystemLayout::qubits({"s"}), sigma_z());
    Operator big = embed(zs, target);
    REQUIRE(big.layout() == target);

    Matrix want = kron(sigma_z(), Matrix::Identity(6, 6));
    CHECK(max_abs_diff(big.entries(), want) < 1e-15);

    // Embedding on a middle factor: compare action on a random product state.
    DrawSource d(derive_seed(17, 0));
    Matrix hm = random_hermitian(d, 3);
    Operator mid = embed(Operator::hermitian(SubsystemLayout({{"m", 3}}), hm), target);
    Matrix want_mid = kron(Matrix::Identity(2, 2), kron(hm, Matrix::Identity(2, 2)));
    CHECK(max_abs_diff(mid.entries(), want_mid) < 1e-15);

    // Two-factor embed in swapped argument order still lands on layout order.
    Operator za = Operator::hermitian(SubsystemLayout::qubits({"a"}), sigma_x());
    Operator sa = tensor_product(zs, za);
    Operator planted = embed(sa, target);
    Matrix want_sa = kron(sigma_z(), kron(Matrix::Identity(3, 3), sigma_x()));
    CHECK(max_abs_diff(planted.entries(), want_sa) < 1e-15);

    CHECK_THROWS_AS(embed(Operator::hermitian(SubsystemLayout({{"m", 2}}), sigma_z()), target),
                    std::invalid_argument);
    CHECK_THROWS_AS(embed(zs, SubsystemLayout::qubits({"a"})), std::invalid_argument);
}

TEST_CASE("draw source is deterministic and splittable") {
    DrawSource a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        double u = a.uniform01();
        CHECK(u == b.uniform01());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(a.stream_index() == 100);
    CHECK(derive_seed(42, 1) != derive_seed(42, 2));
    CHECK(derive_seed(42, 1) == derive_seed(42, 1));
    CHECK(derive_seed(7, 0) != 7);  // the mix is not the identity
}
