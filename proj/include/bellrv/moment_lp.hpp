#pragma once

// Finite moment problem: given settings x_1..x_m, y_1..y_n and targets C, is
// there a probability space with response functions |f1|, |f2| <= 1 such that
// integral f1(x_i, w) f2(y_j, w) dP(w) = C[i][j]?
//
// The achievable tables form the convex hull of the outer products u v^T with
// u in [-1,1]^m, v in [-1,1]^n. That map is bilinear, so the extreme points
// are the sign vectors: the deterministic strategies. Feasibility is thus the
// LP "find lambda >= 0 with sum lambda = 1 and sum_s lambda_s u_s v_s^T = C",
// solved here by a dense revised phase-1 simplex with Bland's rule. When the
// phase-1 optimum is positive, its final duals give a Bell inequality B with
// <B, u v^T> <= bound for every strategy and <B, C> > bound.
//
// Only finite setting lists are decided. A continuum of angles is infeasible
// whenever some finite truncation is, which the 2x2 CHSH instance shows.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bellrv/quantum.hpp"

namespace bellrv {

inline constexpr std::size_t kMaxSettings = 24;
inline constexpr double kDefaultFeasibilityTolerance = 1e-9;

/// Settings of one party: planar angles (radians) or unit vectors.
using PartySettings = std::variant<std::vector<double>, std::vector<UnitVector3>>;

std::size_t setting_count(const PartySettings& s);
std::vector<UnitVector3> setting_vectors(const PartySettings& s);

struct MomentInstance {
    PartySettings party1;
    PartySettings party2;
    Eigen::MatrixXd targets;  // m x n

    std::size_t m() const { return static_cast<std::size_t>(targets.rows()); }
    std::size_t n() const { return static_cast<std::size_t>(targets.cols()); }
    /// Shape, range (|C| <= 1 + 1e-12) and cap checks; throws InvalidArgument or CapExceeded.
    void validate() const;
};

struct DeterministicStrategy {
    std::vector<int> u;  // party-1 signs
    std::vector<int> v;  // party-2 signs

    Eigen::MatrixXd correlations() const;
};

/// All 2^(m+n) sign assignments. Bit i of the index (i < m) set means u_i = -1;
/// bit m + j set means v_j = -1.
std::vector<DeterministicStrategy> enumerate_strategies(std::size_t m, std::size_t n);
DeterministicStrategy strategy_at(std::size_t m, std::size_t n, std::uint64_t index);

enum class FeasibilityStatus { feasible, infeasible };

struct BellCertificate {
    Eigen::MatrixXd coefficients;  // B, m x n
    double classical_bound = 0.0;  // max over strategies of <B, E_s>
    double target_value = 0.0;     // <B, C>

    double gap() const { return target_value - classical_bound; }
};

struct FeasibilityResult {
    FeasibilityStatus status = FeasibilityStatus::feasible;
    double phase_one_objective = 0.0;
    std::vector<double> weights;                 // per strategy index, feasible only
    std::optional<BellCertificate> certificate;  // infeasible only
};

/// Status policy: feasible below tol, infeasible when the certificate separates
/// by more than tol, Marginal otherwise. With unit-normalized duals the
/// certificate gap rarely undercuts the objective, so this band is narrow.
FeasibilityStatus classify_outcome(double phase_one_objective, const BellCertificate* certificate, double tol);

/// Throws Marginal when the phase-1 objective exceeds tol but the extracted
/// certificate separates by no more than tol.
FeasibilityResult check_feasibility(const MomentInstance& instance, double tol = kDefaultFeasibilityTolerance);

/// Independent audit: weighted reconstruction for feasible results, brute-force
/// strategy enumeration for certificates.
bool verify_result(const MomentInstance& instance, const FeasibilityResult& result);

/// C[i][j] = Q(x_i, y_j) via the singlet sandwich.
Eigen::MatrixXd quantum_targets(const PartySettings& party1, const PartySettings& party2);

/// Max over the four sign placements of |C00 + C01 + C10 + C11 - 2 C_kl| for a 2x2 table.
double max_chsh_form(const Eigen::MatrixXd& c);

}  // namespace bellrv
