#include "bellrv/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

namespace bellrv {

namespace {

constexpr double kEigenGap = 1e-8;
constexpr int kCombinationRetries = 5;
constexpr int kMaxBlockDepth = 32;
constexpr std::uint64_t kCombinationSeed = 0x9e3779b97f4a7c15ULL;

void check_finite(double v, const char* what)
{
    if (!std::isfinite(v)) {
        throw InvalidArgument(std::string(what) + " must be finite");
    }
}

bool is_scalar(const ComplexMatrix& m, double tol)
{
    const Complex mean = m.trace() / static_cast<double>(m.rows());
    ComplexMatrix shifted = m;
    shifted.diagonal().array() -= mean;
    return max_abs_entry(shifted) <= tol;
}

// Orthonormal columns jointly diagonalizing `ops` (all square, same size,
// pairwise commuting, Hermitian). A random real combination separates the
// joint eigenspaces almost surely; residual near-degeneracies are handled by
// projecting onto each cluster and recursing.
ComplexMatrix joint_basis(const std::vector<ComplexMatrix>& ops, std::mt19937_64& rng, double tol,
                          int depth)
{
    const Eigen::Index d = ops.front().rows();
    if (d == 1 || std::all_of(ops.begin(), ops.end(), [&](const ComplexMatrix& m) { return is_scalar(m, tol); })) {
        return ComplexMatrix::Identity(d, d);
    }

    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
    for (int attempt = 0; attempt <= kCombinationRetries; ++attempt) {
        ComplexMatrix combined = ComplexMatrix::Zero(d, d);
        for (const auto& op : ops) {
            combined += coeff(rng) * op;
        }
        combined = 0.5 * (combined + combined.adjoint()).eval();
        solver.compute(combined);
        const auto& evals = solver.eigenvalues();
        double min_gap = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 1; k < d; ++k) {
            min_gap = std::min(min_gap, evals(k) - evals(k - 1));
        }
        if (min_gap > kEigenGap) {
            return solver.eigenvectors();
        }
    }

    ComplexMatrix vectors = solver.eigenvectors();
    if (depth >= kMaxBlockDepth) {
        return vectors;
    }
    const auto& evals = solver.eigenvalues();
    Eigen::Index lo = 0;
    while (lo < d) {
        Eigen::Index hi = lo + 1;
        while (hi < d && evals(hi) - evals(hi - 1) <= kEigenGap) {
            ++hi;
        }
        if (hi - lo > 1) {
            const ComplexMatrix block = vectors.middleCols(lo, hi - lo);
            std::vector<ComplexMatrix> projected;
            projected.reserve(ops.size());
            for (const auto& op : ops) {
                projected.push_back(block.adjoint() * op * block);
            }
            vectors.middleCols(lo, hi - lo) = block * joint_basis(projected, rng, tol, depth + 1);
        }
        lo = hi;
    }
    return vectors;
}

}  // namespace

UnitVector3::UnitVector3(double x, double y, double z) : c_{x, y, z}
{
    check_finite(x, "vector component");
    check_finite(y, "vector component");
    check_finite(z, "vector component");
    const double norm2 = x * x + y * y + z * z;
    if (std::abs(norm2 - 1.0) > kUnitTolerance) {
        throw InvalidArgument("not a unit vector (|v|^2 = " + std::to_string(norm2) + ")");
    }
}

UnitVector3 UnitVector3::normalized(double x, double y, double z)
{
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw InvalidArgument("cannot normalize a zero or non-finite vector");
    }
    return {x / norm, y / norm, z / norm};
}

UnitVector3 UnitVector3::planar(double radians)
{
    check_finite(radians, "angle");
    return normalized(std::sin(radians), 0.0, std::cos(radians));
}

double UnitVector3::angle_to(const UnitVector3& o) const
{
    const Eigen::Vector3d a = vec();
    const Eigen::Vector3d b = o.vec();
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

double UnitVector3::planar_angle() const
{
    if (std::abs(c_[1]) > kUnitTolerance) {
        throw InvalidArgument("vector is not in the x-z plane");
    }
    return std::atan2(c_[0], c_[2]);
}

StateVector::StateVector(ComplexVector amplitudes) : amp_(std::move(amplitudes))
{
    if (amp_.size() == 0) {
        throw InvalidArgument("state vector must have positive dimension");
    }
    if (!amp_.allFinite()) {
        throw InvalidArgument("state amplitudes must be finite");
    }
    if (std::abs(amp_.norm() - 1.0) > kUnitTolerance) {
        throw InvalidArgument("state vector is not normalized");
    }
}

StateVector StateVector::normalized(ComplexVector amplitudes)
{
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw InvalidArgument("cannot normalize a zero or non-finite state");
    }
    return StateVector(amplitudes / norm);
}

double DiscreteProbabilitySpace::moment(std::span<const std::size_t> subset) const
{
    double total = 0.0;
    for (std::size_t w = 0; w < weights.size(); ++w) {
        double term = weights[w];
        for (std::size_t i : subset) {
            if (i >= value_table.size()) {
                throw InvalidArgument("observable index out of range");
            }
            term *= value_table[i][w];
        }
        total += term;
    }
    return total;
}

double DiscreteProbabilitySpace::full_moment() const
{
    std::vector<std::size_t> all(value_table.size());
    std::iota(all.begin(), all.end(), 0);
    return moment(all);
}

double max_abs_entry(const ComplexMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol)
{
    return m.rows() == m.cols() && max_abs_entry(m - m.adjoint()) < tol;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b)
{
    return a * b - b * a;
}

ComplexMatrix identity(std::size_t dim)
{
    const auto d = static_cast<Eigen::Index>(dim);
    return ComplexMatrix::Identity(d, d);
}

ComplexMatrix pauli(int axis)
{
    ComplexMatrix m(2, 2);
    switch (axis) {
    case 1:
        m << 0.0, 1.0, 1.0, 0.0;
        break;
    case 2:
        m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
        break;
    case 3:
        m << 1.0, 0.0, 0.0, -1.0;
        break;
    default:
        throw InvalidArgument("Pauli axis must be 1, 2 or 3 (got " + std::to_string(axis) + ")");
    }
    return m;
}

ComplexMatrix sigma_dot(const Eigen::Vector3d& v)
{
    return v.x() * pauli(1) + v.y() * pauli(2) + v.z() * pauli(3);
}

ComplexMatrix spin_operator(const UnitVector3& a)
{
    return sigma_dot(a.vec());
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

StateVector singlet()
{
    ComplexVector amp = ComplexVector::Zero(4);
    amp(1) = M_SQRT1_2;
    amp(2) = -M_SQRT1_2;
    return StateVector(amp);
}

Complex expectation(const ComplexMatrix& op, const StateVector& psi)
{
    if (op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != psi.dim()) {
        throw InvalidArgument("operator and state dimensions differ");
    }
    return psi.amplitudes().dot(op * psi.amplitudes());
}

double singlet_sandwich(const Eigen::Vector3d& a, const Eigen::Vector3d& b)
{
    static const StateVector psi = singlet();
    const Complex value = expectation(tensor(sigma_dot(a), sigma_dot(b)), psi);
    // The operator is Hermitian, so any imaginary part is rounding noise.
    return value.real();
}

double quantum_correlation(const UnitVector3& a, const UnitVector3& b)
{
    return std::clamp(singlet_sandwich(a.vec(), b.vec()), -1.0, 1.0);
}

JointEigenbasis simultaneous_diagonalize(std::span<const ComplexMatrix> ops, double tol)
{
    if (ops.empty()) {
        throw InvalidArgument("need at least one operator");
    }
    const Eigen::Index d = ops.front().rows();
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].rows() != d || ops[i].cols() != d || d == 0) {
            throw InvalidArgument("operators must be square and of equal dimension");
        }
        if (!ops[i].allFinite()) {
            throw InvalidArgument("operator entries must be finite");
        }
        const double dev = max_abs_entry(ops[i] - ops[i].adjoint());
        if (dev >= tol) {
            throw NonHermitian(i, dev);
        }
    }
    for (std::size_t i = 0; i < ops.size(); ++i) {
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            const double norm = max_abs_entry(commutator(ops[i], ops[j]));
            if (norm >= tol) {
                throw NonCommuting(i, j, norm);
            }
        }
    }

    std::vector<ComplexMatrix> hermitian;
    hermitian.reserve(ops.size());
    for (const auto& op : ops) {
        hermitian.push_back(0.5 * (op + op.adjoint()));
    }
    std::mt19937_64 rng(kCombinationSeed);
    const ComplexMatrix vectors = joint_basis(hermitian, rng, tol, 0);

    struct Column {
        ComplexVector v;
        std::vector<double> eig;
    };
    std::vector<Column> columns;
    columns.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index w = 0; w < d; ++w) {
        Column c{vectors.col(w).normalized(), {}};
        // Fix the phase: leading largest-magnitude component real positive.
        const double peak = c.v.cwiseAbs().maxCoeff();
        for (Eigen::Index k = 0; k < d; ++k) {
            if (std::abs(c.v(k)) >= peak - kUnitTolerance) {
                c.v *= std::conj(c.v(k)) / std::abs(c.v(k));
                c.v(k) = std::abs(c.v(k));
                break;
            }
        }
        for (const auto& op : hermitian) {
            c.eig.push_back(c.v.dot(op * c.v).real());
        }
        columns.push_back(std::move(c));
    }
    std::stable_sort(columns.begin(), columns.end(), [](const Column& l, const Column& r) {
        for (std::size_t i = 0; i < l.eig.size(); ++i) {
            if (l.eig[i] > r.eig[i] + kEigenGap) return true;
            if (l.eig[i] < r.eig[i] - kEigenGap) return false;
        }
        return false;
    });

    JointEigenbasis out;
    out.eigen_table.assign(ops.size(), std::vector<double>(static_cast<std::size_t>(d)));
    for (std::size_t w = 0; w < columns.size(); ++w) {
        out.basis.emplace_back(columns[w].v);
        for (std::size_t i = 0; i < ops.size(); ++i) {
            out.eigen_table[i][w] = columns[w].eig[i];
        }
    }
    return out;
}

DiscreteProbabilitySpace spectral_representation(std::span<const ComplexMatrix> ops, const StateVector& psi,
                                                 double tol)
{
    if (!ops.empty() && static_cast<std::size_t>(ops.front().rows()) != psi.dim()) {
        throw InvalidArgument("state dimension does not match the operators");
    }
    JointEigenbasis joint = simultaneous_diagonalize(ops, tol);

    DiscreteProbabilitySpace space;
    space.weights.reserve(joint.basis.size());
    for (const auto& e : joint.basis) {
        double p = std::norm(e.amplitudes().dot(psi.amplitudes()));
        if (p < 0.0 && p > -1e-15) {
            p = 0.0;
        }
        space.weights.push_back(p);
    }
    space.value_table = std::move(joint.eigen_table);

    const double mass = std::accumulate(space.weights.begin(), space.weights.end(), 0.0);
    if (std::abs(mass - 1.0) > kUnitTolerance) {
        throw Error("spectral weights do not sum to one (got " + std::to_string(mass) + ")");
    }
    return space;
}

}  // namespace bellrv
