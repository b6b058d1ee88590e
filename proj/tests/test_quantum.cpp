#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bellrv/quantum.hpp"
#include "oracles.hpp"

using namespace bellrv;

namespace {

UnitVector3 to_unit(const std::array<double, 3>& a)
{
    return UnitVector3::normalized(a[0], a[1], a[2]);
}

std::vector<double> sorted_real_eigenvalues(const ComplexMatrix& m)
{
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i).real());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("pauli matrices")
{
    CHECK(pauli(3).isApprox(ComplexMatrix(Eigen::Vector2cd(1.0, -1.0).asDiagonal())));
    CHECK((pauli(1) * pauli(2)).isApprox(Complex(0.0, 1.0) * pauli(3)));
    for (int i = 1; i <= 3; ++i) {
        CHECK(is_hermitian(pauli(i)));
        CHECK(std::abs(pauli(i).trace()) == 0.0);
        CHECK((pauli(i) * pauli(i)).isApprox(identity(2)));
        for (int j = 1; j <= 3; ++j) {
            CHECK(std::abs((pauli(i) * pauli(j)).trace() - (i == j ? 2.0 : 0.0)) < 1e-15);
        }
    }
    CHECK_THROWS_AS(pauli(0), InvalidArgument);
    CHECK_THROWS_AS(pauli(4), InvalidArgument);
}

TEST_CASE("unit vectors reject non-unit input")
{
    CHECK_THROWS_AS(UnitVector3(1.0, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(UnitVector3::normalized(0.0, 0.0, 0.0), InvalidArgument);
    CHECK_NOTHROW(UnitVector3(0.0, 0.0, 1.0));
    CHECK(UnitVector3::planar(std::numbers::pi / 2).x() == doctest::Approx(1.0));
}

TEST_CASE("spin operator")
{
    CHECK(spin_operator({0.0, 0.0, 1.0}).isApprox(pauli(3)));
    CHECK(spin_operator({1.0, 0.0, 0.0}).isApprox(pauli(1)));

    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
        const ComplexMatrix s = spin_operator(to_unit(oracle::random_direction(rng)));
        CHECK(is_hermitian(s));
        CHECK(std::abs(s.trace()) < 1e-12);
        CHECK(std::abs(s.determinant() + 1.0) < 1e-12);
        const auto ev = sorted_real_eigenvalues(s);
        CHECK(std::abs(ev[0] + 1.0) < 1e-12);
        CHECK(std::abs(ev[1] - 1.0) < 1e-12);
    }
}

TEST_CASE("tensor product")
{
    CHECK(tensor(identity(2), identity(2)).isApprox(identity(4)));
    CHECK(tensor(pauli(3), pauli(3)).isApprox(ComplexMatrix(Eigen::Vector4cd(1.0, -1.0, -1.0, 1.0).asDiagonal())));

    std::mt19937_64 rng(12);
    for (int k = 0; k < 50; ++k) {
        const ComplexMatrix a = oracle::random_hermitian(rng, 2);
        const ComplexMatrix b = oracle::random_hermitian(rng, 2);
        const ComplexMatrix c = oracle::random_hermitian(rng, 2);
        const ComplexMatrix d = oracle::random_hermitian(rng, 2);
        CHECK((tensor(a, b) * tensor(c, d)).isApprox(tensor(a * c, b * d), 1e-12));

        const auto ea = sorted_real_eigenvalues(a);
        const auto eb = sorted_real_eigenvalues(b);
        std::vector<double> products;
        for (double x : ea)
            for (double y : eb) products.push_back(x * y);
        std::sort(products.begin(), products.end());
        const auto eab = sorted_real_eigenvalues(tensor(a, b));
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(products[i] - eab[i]) < 1e-10);
    }
}

TEST_CASE("singlet state")
{
    const StateVector psi = singlet();
    CHECK(psi.dim() == 4);
    CHECK(psi[0] == Complex(0.0));
    CHECK(psi[1].real() == 0.7071067811865476);
    CHECK(psi[2].real() == -0.7071067811865476);
    CHECK(psi[3] == Complex(0.0));
    CHECK(std::abs(psi.amplitudes().squaredNorm() - 1.0) < 1e-15);

    std::mt19937_64 rng(13);
    for (int k = 0; k < 200; ++k) {
        const ComplexMatrix s = spin_operator(to_unit(oracle::random_direction(rng)));
        const ComplexVector out = (tensor(s, identity(2)) + tensor(identity(2), s)) * psi.amplitudes();
        CHECK(out.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("state vectors must be normalized")
{
    CHECK_THROWS_AS(StateVector(ComplexVector::Ones(2)), InvalidArgument);
    CHECK(StateVector::normalized(ComplexVector::Ones(2)).amplitudes().norm() == doctest::Approx(1.0));
}

TEST_CASE("quantum correlation matches -a.b")
{
    const UnitVector3 z(0.0, 0.0, 1.0);
    CHECK(quantum_correlation(z, z) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(quantum_correlation({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0})) < 1e-15);

    std::mt19937_64 rng(14);
    for (int k = 0; k < 1000; ++k) {
        const auto a = oracle::random_direction(rng);
        const auto b = oracle::random_direction(rng);
        const double q = quantum_correlation(to_unit(a), to_unit(b));
        CHECK(std::abs(q + oracle::dot(a, b)) < 1e-12);
        CHECK(std::abs(q) <= 1.0);
    }
}

TEST_CASE("quantum correlation is rotation invariant")
{
    std::mt19937_64 rng(15);
    for (int k = 0; k < 200; ++k) {
        const UnitVector3 a = to_unit(oracle::random_direction(rng));
        const UnitVector3 b = to_unit(oracle::random_direction(rng));
        const Eigen::Matrix3d r = oracle::random_rotation(rng);
        const Eigen::Vector3d ra = r * a.vec();
        const Eigen::Vector3d rb = r * b.vec();
        const double rotated = quantum_correlation(UnitVector3::normalized(ra.x(), ra.y(), ra.z()),
                                                   UnitVector3::normalized(rb.x(), rb.y(), rb.z()));
        CHECK(std::abs(rotated - quantum_correlation(a, b)) < 1e-10);
    }
}

TEST_CASE("singlet sandwich is bilinear")
{
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const auto d1 = oracle::random_direction(rng);
        const auto d2 = oracle::random_direction(rng);
        const auto db = oracle::random_direction(rng);
        const Eigen::Vector3d a1(d1[0], d1[1], d1[2]);
        const Eigen::Vector3d a2(d2[0], d2[1], d2[2]);
        const Eigen::Vector3d b(db[0], db[1], db[2]);
        const double alpha = coef(rng);
        const double beta = coef(rng);
        const double lhs = singlet_sandwich(alpha * a1 + beta * a2, b);
        const double rhs = alpha * singlet_sandwich(a1, b) + beta * singlet_sandwich(a2, b);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("simultaneous diagonalization of diagonal inputs")
{
    SUBCASE("single diagonal operator")
    {
        const std::vector<ComplexMatrix> ops{pauli(3)};
        const JointEigenbasis j = simultaneous_diagonalize(ops);
        REQUIRE(j.basis.size() == 2);
        CHECK(j.basis[0].amplitudes().isApprox(Eigen::Vector2cd(1.0, 0.0)));
        CHECK(j.basis[1].amplitudes().isApprox(Eigen::Vector2cd(0.0, 1.0)));
        CHECK(j.eigen_table[0] == std::vector<double>{1.0, -1.0});
    }
    SUBCASE("two commuting spin-z operators")
    {
        const std::vector<ComplexMatrix> ops{tensor(pauli(3), identity(2)), tensor(identity(2), pauli(3))};
        const JointEigenbasis j = simultaneous_diagonalize(ops);
        for (Eigen::Index w = 0; w < 4; ++w) {
            CHECK(j.basis[static_cast<std::size_t>(w)].amplitudes().isApprox(ComplexVector::Unit(4, w)));
        }
        const std::vector<double> row0{1, 1, -1, -1};
        const std::vector<double> row1{1, -1, 1, -1};
        for (std::size_t w = 0; w < 4; ++w) {
            CHECK(std::abs(j.eigen_table[0][w] - row0[w]) < 1e-12);
            CHECK(std::abs(j.eigen_table[1][w] - row1[w]) < 1e-12);
        }
    }
}

TEST_CASE("simultaneous diagonalization of polynomial families")
{
    std::mt19937_64 rng(17);
    for (int k = 0; k < 30; ++k) {
        const Eigen::Index d = 2 + k % 6;
        const ComplexMatrix a = oracle::random_hermitian(rng, d);
        const std::vector<ComplexMatrix> ops{a, a * a};
        const JointEigenbasis j = simultaneous_diagonalize(ops);

        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
        std::vector<double> expected(es.eigenvalues().data(), es.eigenvalues().data() + d);
        std::vector<double> got = j.eigen_table[0];
        std::sort(got.begin(), got.end());
        for (Eigen::Index w = 0; w < d; ++w) {
            CHECK(std::abs(got[static_cast<std::size_t>(w)] - expected[static_cast<std::size_t>(w)]) < 1e-10);
            const auto ws = static_cast<std::size_t>(w);
            CHECK(std::abs(j.eigen_table[1][ws] - j.eigen_table[0][ws] * j.eigen_table[0][ws]) < 1e-10);
            for (std::size_t i = 0; i < ops.size(); ++i) {
                const ComplexVector& v = j.basis[ws].amplitudes();
                CHECK((ops[i] * v - j.eigen_table[i][ws] * v).cwiseAbs().maxCoeff() < 1e-9);
            }
        }
        Eigen::MatrixXcd gram(d, d);
        for (Eigen::Index p = 0; p < d; ++p)
            for (Eigen::Index q = 0; q < d; ++q)
                gram(p, q) = j.basis[static_cast<std::size_t>(p)].amplitudes().dot(
                    j.basis[static_cast<std::size_t>(q)].amplitudes());
        CHECK((gram - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("joint degeneracies fall back to block diagonalization")
{
    // sigma_z (x) I alone has two doubly-degenerate eigenspaces no combination can split.
    const std::vector<ComplexMatrix> single{tensor(pauli(3), identity(2))};
    const JointEigenbasis j = simultaneous_diagonalize(single);
    CHECK(j.eigen_table[0][0] == doctest::Approx(1.0));
    CHECK(j.eigen_table[0][3] == doctest::Approx(-1.0));

    // Projectors onto a degenerate subspace of a 4-dim space.
    ComplexMatrix p = ComplexMatrix::Zero(4, 4);
    p(0, 0) = p(1, 1) = 1.0;
    ComplexMatrix q = ComplexMatrix::Zero(4, 4);
    q(1, 1) = q(2, 2) = 1.0;
    const std::vector<ComplexMatrix> ops{p, q, p * q};
    const JointEigenbasis k = simultaneous_diagonalize(ops);
    for (std::size_t w = 0; w < 4; ++w) {
        for (std::size_t i = 0; i < ops.size(); ++i) {
            const ComplexVector& v = k.basis[w].amplitudes();
            CHECK((ops[i] * v - k.eigen_table[i][w] * v).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("simultaneous diagonalization errors")
{
    const std::vector<ComplexMatrix> noncommuting{pauli(1), pauli(3)};
    CHECK_THROWS_AS(simultaneous_diagonalize(noncommuting), NonCommuting);
    try {
        simultaneous_diagonalize(noncommuting);
    } catch (const NonCommuting& e) {
        CHECK(e.first() == 0);
        CHECK(e.second() == 1);
        CHECK(e.norm() == doctest::Approx(2.0));
    }

    ComplexMatrix upper = ComplexMatrix::Zero(2, 2);
    upper(0, 1) = 1.0;
    const std::vector<ComplexMatrix> nonhermitian{upper};
    CHECK_THROWS_AS(simultaneous_diagonalize(nonhermitian), NonHermitian);

    const std::vector<ComplexMatrix> mixed{pauli(3), identity(4)};
    CHECK_THROWS_AS(simultaneous_diagonalize(mixed), InvalidArgument);
}

TEST_CASE("spectral representation")
{
    SUBCASE("eigenstate")
    {
        const std::vector<ComplexMatrix> ops{pauli(3)};
        const auto space = spectral_representation(ops, StateVector(Eigen::Vector2cd(1.0, 0.0)));
        CHECK(space.weights == std::vector<double>{1.0, 0.0});
        CHECK(space.value_table[0] == std::vector<double>{1.0, -1.0});
        CHECK(space.full_moment() == doctest::Approx(1.0));
    }
    SUBCASE("singlet zz")
    {
        const std::vector<ComplexMatrix> ops{tensor(pauli(3), identity(2)), tensor(identity(2), pauli(3))};
        const StateVector psi = singlet();
        const auto space = spectral_representation(ops, psi);
        const std::vector<double> expected{0.0, 0.5, 0.5, 0.0};
        for (std::size_t w = 0; w < 4; ++w) CHECK(std::abs(space.weights[w] - expected[w]) < 1e-12);
        const double direct = expectation(ops[0] * ops[1], psi).real();
        CHECK(direct == doctest::Approx(-1.0));
        CHECK(std::abs(space.full_moment() - direct) < 1e-10);
    }
    SUBCASE("dimension mismatch")
    {
        const std::vector<ComplexMatrix> ops{pauli(3)};
        CHECK_THROWS_AS(spectral_representation(ops, singlet()), InvalidArgument);
    }
}

TEST_CASE("spectral representation reproduces every subset moment")
{
    std::mt19937_64 rng(18);
    for (int k = 0; k < 25; ++k) {
        const Eigen::Index d = 2 + k % 7;
        const ComplexMatrix a = oracle::random_hermitian(rng, d);
        const std::vector<ComplexMatrix> ops{a, a * a - 0.5 * a, a * a * a};
        const StateVector psi(oracle::random_state(rng, d));
        const auto space = spectral_representation(ops, psi);

        double mass = 0.0;
        for (double p : space.weights) {
            CHECK(p >= 0.0);
            mass += p;
        }
        CHECK(std::abs(mass - 1.0) < 1e-12);

        for (unsigned mask = 0; mask < 8; ++mask) {
            std::vector<std::size_t> subset;
            ComplexMatrix product = ComplexMatrix::Identity(d, d);
            for (std::size_t i = 0; i < 3; ++i) {
                if ((mask >> i) & 1U) {
                    subset.push_back(i);
                    product = product * ops[i];
                }
            }
            const double direct = psi.amplitudes().dot(product * psi.amplitudes()).real();
            CHECK(std::abs(space.moment(subset) - direct) < 1e-10);
        }
    }
}
