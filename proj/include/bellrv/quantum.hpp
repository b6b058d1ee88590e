#pragma once

// Quantum side: Pauli algebra, the two-spin singlet, correlation by explicit
// matrix sandwich, and the spectral representation of commuting observables
// as classical random variables on a finite probability space.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bellrv/errors.hpp"

namespace bellrv {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kUnitTolerance = 1e-12;
inline constexpr double kDefaultOperatorTolerance = 1e-10;

/// Direction in R^3 with |a| = 1 within kUnitTolerance.
class UnitVector3 {
public:
    /// Throws InvalidArgument unless the components form a unit vector.
    UnitVector3(double x, double y, double z);
    explicit UnitVector3(const Eigen::Vector3d& v) : UnitVector3(v.x(), v.y(), v.z()) {}

    /// Rescales an arbitrary nonzero vector onto the sphere.
    static UnitVector3 normalized(double x, double y, double z);
    /// Vector at `radians` from +z towards +x in the x-z plane: (sin t, 0, cos t).
    static UnitVector3 planar(double radians);

    double x() const { return c_[0]; }
    double y() const { return c_[1]; }
    double z() const { return c_[2]; }
    double operator[](std::size_t i) const { return c_[i]; }
    const std::array<double, 3>& components() const { return c_; }
    Eigen::Vector3d vec() const { return {c_[0], c_[1], c_[2]}; }

    double dot(const UnitVector3& o) const { return c_[0] * o.c_[0] + c_[1] * o.c_[1] + c_[2] * o.c_[2]; }
    /// Angle in [0, pi] between two directions, via atan2 for accuracy near 0 and pi.
    double angle_to(const UnitVector3& o) const;
    /// Planar angle atan2(x, z); throws InvalidArgument if |y| > kUnitTolerance.
    double planar_angle() const;

private:
    std::array<double, 3> c_;
};

/// Normalized complex state vector.
class StateVector {
public:
    /// Throws InvalidArgument if the Euclidean norm differs from 1 by more than 1e-12.
    explicit StateVector(ComplexVector amplitudes);
    static StateVector normalized(ComplexVector amplitudes);

    std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }
    const ComplexVector& amplitudes() const { return amp_; }
    Complex operator[](std::size_t i) const { return amp_(static_cast<Eigen::Index>(i)); }

private:
    ComplexVector amp_;
};

/// Finite probability space: Omega = {0..size-1}, weights P(w), and one
/// real function f_i(w) per observable.
struct DiscreteProbabilitySpace {
    std::vector<double> weights;
    std::vector<std::vector<double>> value_table;  // value_table[i][w]

    std::size_t size() const { return weights.size(); }
    /// Sum over w of P(w) * prod_{i in subset} f_i(w). An empty subset gives total mass.
    double moment(std::span<const std::size_t> subset) const;
    /// Moment of the product of all observables.
    double full_moment() const;
};

struct JointEigenbasis {
    std::vector<StateVector> basis;
    std::vector<std::vector<double>> eigen_table;  // eigen_table[i][w]
};

double max_abs_entry(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kUnitTolerance);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix identity(std::size_t dim);
/// Pauli matrix sigma_i for i in {1,2,3}.
ComplexMatrix pauli(int axis);
/// sigma . v for any real 3-vector; linear in v.
ComplexMatrix sigma_dot(const Eigen::Vector3d& v);
ComplexMatrix spin_operator(const UnitVector3& a);
/// Kronecker product A (x) B.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// (|+-> - |-+>)/sqrt(2) in the ordering |++>, |+->, |-+>, |-->.
StateVector singlet();

/// <psi|M|psi>, complex.
Complex expectation(const ComplexMatrix& op, const StateVector& psi);

/// <singlet| sigma.a (x) sigma.b |singlet> for arbitrary real vectors (bilinear).
double singlet_sandwich(const Eigen::Vector3d& a, const Eigen::Vector3d& b);
/// Q(a,b) computed by the full 4x4 sandwich. Equals -a.b.
double quantum_correlation(const UnitVector3& a, const UnitVector3& b);

/// Joint eigenbasis of pairwise-commuting Hermitian matrices. Basis vectors
/// are ordered by their eigenvalue tuples, descending lexicographically, and
/// phased so the leading largest-magnitude component is real positive.
/// Throws NonHermitian or NonCommuting.
JointEigenbasis simultaneous_diagonalize(std::span<const ComplexMatrix> ops,
                                         double tol = kDefaultOperatorTolerance);

/// Classical random variables reproducing every product moment of the
/// commuting observables in state psi: P(w) = |<e_w|psi>|^2, f_i(w) = eigenvalue.
DiscreteProbabilitySpace spectral_representation(std::span<const ComplexMatrix> ops,
                                                 const StateVector& psi,
                                                 double tol = kDefaultOperatorTolerance);

}  // namespace bellrv
