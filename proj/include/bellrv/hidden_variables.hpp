#pragma once

// Classical hidden-variable models of a spin pair.
//
// Three models share one interface: a sample space Omega with probability
// measure P and per-party response functions f1(a, w), f2(b, w) whose product
// expectation is the correlation C(a, b).
//
//   triple       Omega = [0,1], dP = dw. Spin is the triple (xi_1, xi_2, xi_3)
//                of +-1 step functions with identity Gram matrix; party 2 uses
//                -xi. f1(a,w) = xi(w).a, which can exceed 1 in magnitude.
//   cosine       Omega = [0, 2pi), uniform. f(alpha, w) = sqrt(2) cos(alpha - w)
//                for both parties, giving C = cos(alpha - beta) with |f| <= sqrt(2).
//   scalar-sign  Omega = unit sphere, uniform. f1 = sign(a.l), f2 = -sign(b.l);
//                a bounded (|f| <= 1) single-scalar model.
//
// The triple-model factor is an integrand, not a simulated measurement outcome:
// only its expectation carries physical meaning.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bellrv/quantum.hpp"
#include "bellrv/rational.hpp"

namespace bellrv {

/// Step function on [0,1] with dyadic breakpoints and exact rational values.
/// The value at a breakpoint p_k is taken from [p_k, p_{k+1}); w = 1 belongs
/// to the last interval.
class PiecewiseConstantRV {
public:
    PiecewiseConstantRV(std::vector<Dyadic> breakpoints, std::vector<Rational> values);

    const std::vector<Dyadic>& breakpoints() const { return breakpoints_; }
    const std::vector<Rational>& values() const { return values_; }
    std::size_t pieces() const { return values_.size(); }

    Rational value_at(const Rational& omega) const;
    double value_at(double omega) const;
    PiecewiseConstantRV negated() const;

private:
    std::vector<Dyadic> breakpoints_;
    std::vector<Rational> values_;
};

/// Exact integral over [0,1] of u(w) v(w) dw, on the merged partition.
Rational integrate_product(const PiecewiseConstantRV& u, const PiecewiseConstantRV& v);

using RationalMatrix3 = std::array<std::array<Rational, 3>, 3>;

struct TripleSpinModel {
    std::array<PiecewiseConstantRV, 3> xi;

    const PiecewiseConstantRV& party1(std::size_t i) const { return xi.at(i); }
    PiecewiseConstantRV party2(std::size_t i) const { return xi.at(i).negated(); }

    /// integral xi_i xi_j dw; the identity matrix for the built-in model.
    RationalMatrix3 gram() const;
    /// integral xi^(1)_i xi^(2)_j dw; minus the identity for the built-in model.
    RationalMatrix3 cross_gram() const;
};

/// xi_1 = 1; xi_2 = +1 on (1/4,1/2) u (3/4,1), else -1; xi_3 = +1 on (0,1/2), else -1.
TripleSpinModel triple_spin_model();

/// sum_ij a_i b_j integral(xi_i * -xi_j), evaluated from the exact cross Gram matrix.
double triple_correlation(const TripleSpinModel& model, const UnitVector3& a, const UnitVector3& b);

enum class ModelKind { triple, cosine, scalar_sign };

struct LHVModelSpec {
    ModelKind kind = ModelKind::triple;
};

ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(ModelKind kind);

/// A measurement setting: a direction, or a planar angle (radians) in the x-z plane.
class Setting {
public:
    Setting(const UnitVector3& v) : value_(v) {}  // NOLINT(google-explicit-constructor)
    static Setting angle(double radians) { return Setting(radians); }

    bool is_angle() const { return std::holds_alternative<double>(value_); }
    UnitVector3 as_vector() const;
    /// Throws InvalidArgument for directions off the x-z plane.
    double as_angle() const;

private:
    explicit Setting(double radians) : value_(radians) {}
    std::variant<UnitVector3, double> value_;
};

/// A point of the model's sample space: w in [0,1] (triple), w in [0,2pi)
/// (cosine), or a sphere point (scalar-sign).
using SamplePoint = std::variant<double, UnitVector3>;

double factor_value(const LHVModelSpec& model, int party, const Setting& setting, const SamplePoint& omega);

/// cos(alpha - beta), cross-checked against quadrature of 2 int cos(a-w) cos(b-w) dw/2pi.
double cosine_correlation(double alpha, double beta);
/// Composite trapezoid rule on `nodes` equispaced points (exact for trigonometric
/// polynomials of degree < nodes).
double cosine_correlation_quadrature(double alpha, double beta, std::size_t nodes = 1024);

/// -1 + 2 theta / pi with theta the angle between a and b.
double scalar_sign_correlation(const UnitVector3& a, const UnitVector3& b);

/// Closed-form correlation of a model; the reference value for Monte Carlo.
double exact_correlation(const LHVModelSpec& model, const Setting& a, const Setting& b);

/// i.i.d. draw `index` of the model's measure under `seed`.
SamplePoint draw_sample(ModelKind kind, std::uint64_t seed, std::uint64_t index);

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n)
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo estimate of C(a,b). Samples are processed in fixed-size blocks
/// merged in block order, so the result is bit-identical for any `lanes`.
McResult mc_correlation(const LHVModelSpec& model, const Setting& a, const Setting& b, std::uint64_t n,
                        std::uint64_t seed, unsigned lanes = 1);

}  // namespace bellrv
