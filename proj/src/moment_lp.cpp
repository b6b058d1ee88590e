#include "bellrv/moment_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bellrv {

namespace {

constexpr double kReducedCostTol = 1e-11;
constexpr double kPivotTol = 1e-11;
constexpr double kRatioTieTol = 1e-12;
constexpr int kRefactorInterval = 50;
constexpr std::size_t kMaxPivots = 1'000'000;
constexpr double kReconstructionTol = 1e-8;
constexpr double kCertificateSlack = 1e-10;

int sign_bit(std::uint64_t index, std::size_t bit)
{
    return ((index >> bit) & 1U) != 0 ? -1 : 1;
}

void check_cap(std::size_t m, std::size_t n)
{
    if (m == 0 || n == 0) {
        throw InvalidArgument("each party needs at least one setting");
    }
    if (m + n > kMaxSettings) {
        throw CapExceeded("m + n = " + std::to_string(m + n) + " exceeds the enumeration cap of " +
                          std::to_string(kMaxSettings));
    }
}

// <W, u v^T> for strategy `index`.
double strategy_pairing(const Eigen::MatrixXd& w, std::uint64_t index)
{
    const auto m = static_cast<std::size_t>(w.rows());
    const auto n = static_cast<std::size_t>(w.cols());
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * sign_bit(index, m + j);
        }
        total += sign_bit(index, i) * row;
    }
    return total;
}

double max_strategy_pairing(const Eigen::MatrixXd& w)
{
    const std::uint64_t count = std::uint64_t{1} << (w.rows() + w.cols());
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < count; ++s) {
        best = std::max(best, strategy_pairing(w, s));
    }
    return best;
}

// Phase-1 simplex over the strategy columns. (u, v) and (-u, -v) give the same
// column, so only strategies with u_0 = +1 (even indices) are kept: canonical
// column c is strategy 2c. Rows are the m*n correlation constraints (row-major)
// followed by the normalization row, each flipped so the right-hand side is
// nonnegative. Column ids: [0, N) strategies, [N, N + rows) artificials.
class PhaseOneSimplex {
public:
    PhaseOneSimplex(const Eigen::MatrixXd& targets)
        : m_(static_cast<std::size_t>(targets.rows())), n_(static_cast<std::size_t>(targets.cols())),
          rows_(static_cast<Eigen::Index>(m_ * n_ + 1)), columns_(std::uint64_t{1} << (m_ + n_ - 1)),
          row_sign_(rows_), rhs_(rows_)
    {
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                const double c = targets(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                const auto r = static_cast<Eigen::Index>(i * n_ + j);
                row_sign_(r) = c < 0.0 ? -1.0 : 1.0;
                rhs_(r) = std::abs(c);
            }
        }
        row_sign_(rows_ - 1) = 1.0;
        rhs_(rows_ - 1) = 1.0;
    }

    void solve()
    {
        basis_.resize(static_cast<std::size_t>(rows_));
        for (Eigen::Index r = 0; r < rows_; ++r) {
            basis_[static_cast<std::size_t>(r)] = columns_ + static_cast<std::uint64_t>(r);
        }
        in_basis_.assign(columns_, 0);
        binv_ = Eigen::MatrixXd::Identity(rows_, rows_);
        xb_ = rhs_;

        int since_refactor = 0;
        for (std::size_t pivots = 0;; ++pivots) {
            if (pivots >= kMaxPivots) {
                throw Error("simplex pivot limit reached");
            }
            const Eigen::VectorXd y = duals();
            const std::optional<std::uint64_t> entering = price(y);
            if (!entering) {
                return;
            }
            const Eigen::VectorXd dir = binv_ * column(*entering);
            const Eigen::Index leave = ratio_test(dir);
            pivot(leave, *entering, dir);
            if (++since_refactor >= kRefactorInterval) {
                refactor();
                since_refactor = 0;
            }
        }
    }

    double objective() const
    {
        double total = 0.0;
        for (Eigen::Index r = 0; r < rows_; ++r) {
            if (is_artificial(basis_[static_cast<std::size_t>(r)])) {
                total += xb_(r);
            }
        }
        return total;
    }

    /// Final duals mapped back to unflipped rows: (W row-major, w0).
    Eigen::VectorXd unflipped_duals() const { return duals().cwiseProduct(row_sign_); }

    std::vector<double> weights() const
    {
        std::vector<double> w(std::size_t{1} << (m_ + n_), 0.0);
        for (Eigen::Index r = 0; r < rows_; ++r) {
            const std::uint64_t id = basis_[static_cast<std::size_t>(r)];
            if (!is_artificial(id)) {
                w[2 * id] = std::max(0.0, xb_(r));
            }
        }
        return w;
    }

private:
    bool is_artificial(std::uint64_t id) const { return id >= columns_; }

    Eigen::VectorXd column(std::uint64_t id) const
    {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(rows_);
        if (is_artificial(id)) {
            col(static_cast<Eigen::Index>(id - columns_)) = 1.0;
            return col;
        }
        const std::uint64_t s = 2 * id;
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                const auto r = static_cast<Eigen::Index>(i * n_ + j);
                col(r) = row_sign_(r) * sign_bit(s, i) * sign_bit(s, m_ + j);
            }
        }
        col(rows_ - 1) = 1.0;
        return col;
    }

    Eigen::VectorXd duals() const
    {
        Eigen::VectorXd cb = Eigen::VectorXd::Zero(rows_);
        for (Eigen::Index r = 0; r < rows_; ++r) {
            if (is_artificial(basis_[static_cast<std::size_t>(r)])) {
                cb(r) = 1.0;
            }
        }
        return binv_.transpose() * cb;
    }

    // Bland's rule: the lowest-numbered column with negative reduced cost.
    std::optional<std::uint64_t> price(const Eigen::VectorXd& y) const
    {
        Eigen::MatrixXd w(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                const auto r = static_cast<Eigen::Index>(i * n_ + j);
                w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = y(r) * row_sign_(r);
            }
        }
        const double w0 = y(rows_ - 1);
        for (std::uint64_t c = 0; c < columns_; ++c) {
            if (in_basis_[c] == 0 && -(strategy_pairing(w, 2 * c) + w0) < -kReducedCostTol) {
                return c;
            }
        }
        for (Eigen::Index r = 0; r < rows_; ++r) {
            const std::uint64_t id = columns_ + static_cast<std::uint64_t>(r);
            if (std::find(basis_.begin(), basis_.end(), id) == basis_.end() && 1.0 - y(r) < -kReducedCostTol) {
                return id;
            }
        }
        return std::nullopt;
    }

    Eigen::Index ratio_test(const Eigen::VectorXd& dir) const
    {
        Eigen::Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index r = 0; r < rows_; ++r) {
            if (dir(r) <= kPivotTol) continue;
            const double ratio = std::max(0.0, xb_(r)) / dir(r);
            if (leave < 0 || ratio < best - kRatioTieTol ||
                (ratio <= best + kRatioTieTol &&
                 basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
                best = std::min(best, ratio);
                leave = r;
            }
        }
        if (leave < 0) {
            throw Error("phase-1 problem reported unbounded");
        }
        return leave;
    }

    void pivot(Eigen::Index leave, std::uint64_t entering, const Eigen::VectorXd& dir)
    {
        const double p = dir(leave);
        binv_.row(leave) /= p;
        xb_(leave) /= p;
        for (Eigen::Index r = 0; r < rows_; ++r) {
            if (r == leave || dir(r) == 0.0) continue;
            binv_.row(r) -= dir(r) * binv_.row(leave);
            xb_(r) -= dir(r) * xb_(leave);
        }
        const std::uint64_t leaving = basis_[static_cast<std::size_t>(leave)];
        if (!is_artificial(leaving)) in_basis_[leaving] = 0;
        if (!is_artificial(entering)) in_basis_[entering] = 1;
        basis_[static_cast<std::size_t>(leave)] = entering;
    }

    void refactor()
    {
        Eigen::MatrixXd b(rows_, rows_);
        for (Eigen::Index r = 0; r < rows_; ++r) {
            b.col(r) = column(basis_[static_cast<std::size_t>(r)]);
        }
        binv_ = b.partialPivLu().inverse();
        xb_ = binv_ * rhs_;
    }

    std::size_t m_;
    std::size_t n_;
    Eigen::Index rows_;
    std::uint64_t columns_;
    Eigen::VectorXd row_sign_;
    Eigen::VectorXd rhs_;
    std::vector<std::uint64_t> basis_;
    std::vector<char> in_basis_;
    Eigen::MatrixXd binv_;
    Eigen::VectorXd xb_;
};

}  // namespace

std::size_t setting_count(const PartySettings& s)
{
    return std::visit([](const auto& v) { return v.size(); }, s);
}

std::vector<UnitVector3> setting_vectors(const PartySettings& s)
{
    if (const auto* vectors = std::get_if<std::vector<UnitVector3>>(&s)) {
        return *vectors;
    }
    std::vector<UnitVector3> out;
    for (double angle : std::get<std::vector<double>>(s)) {
        out.push_back(UnitVector3::planar(angle));
    }
    return out;
}

void MomentInstance::validate() const
{
    check_cap(m(), n());
    if (setting_count(party1) != m() || setting_count(party2) != n()) {
        throw InvalidArgument("setting counts do not match the target matrix shape");
    }
    if (!targets.allFinite()) {
        throw InvalidArgument("targets must be finite");
    }
    if (targets.cwiseAbs().maxCoeff() > 1.0 + 1e-12) {
        throw InvalidArgument("targets must lie in [-1, 1]");
    }
}

Eigen::MatrixXd DeterministicStrategy::correlations() const
{
    Eigen::MatrixXd e(static_cast<Eigen::Index>(u.size()), static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = u[i] * v[j];
        }
    }
    return e;
}

DeterministicStrategy strategy_at(std::size_t m, std::size_t n, std::uint64_t index)
{
    check_cap(m, n);
    DeterministicStrategy s;
    for (std::size_t i = 0; i < m; ++i) s.u.push_back(sign_bit(index, i));
    for (std::size_t j = 0; j < n; ++j) s.v.push_back(sign_bit(index, m + j));
    return s;
}

std::vector<DeterministicStrategy> enumerate_strategies(std::size_t m, std::size_t n)
{
    check_cap(m, n);
    const std::uint64_t count = std::uint64_t{1} << (m + n);
    std::vector<DeterministicStrategy> out;
    out.reserve(count);
    for (std::uint64_t s = 0; s < count; ++s) {
        out.push_back(strategy_at(m, n, s));
    }
    return out;
}

FeasibilityStatus classify_outcome(double phase_one_objective, const BellCertificate* certificate, double tol)
{
    if (phase_one_objective < tol) return FeasibilityStatus::feasible;
    const double gap = certificate ? certificate->gap() : 0.0;
    if (!(gap > tol)) throw Marginal(phase_one_objective, gap);
    return FeasibilityStatus::infeasible;
}

FeasibilityResult check_feasibility(const MomentInstance& instance, double tol)
{
    instance.validate();
    if (!(tol >= 1e-12 && tol <= 1e-6)) {
        throw InvalidArgument("tolerance must lie in [1e-12, 1e-6]");
    }
    const Eigen::MatrixXd targets = instance.targets.cwiseMax(-1.0).cwiseMin(1.0);

    PhaseOneSimplex lp(targets);
    lp.solve();

    FeasibilityResult result;
    result.phase_one_objective = lp.objective();
    if (result.phase_one_objective < tol) {
        result.status = FeasibilityStatus::feasible;
        result.weights = lp.weights();
        return result;
    }

    const auto m = static_cast<Eigen::Index>(instance.m());
    const auto n = static_cast<Eigen::Index>(instance.n());
    const Eigen::VectorXd y = lp.unflipped_duals();
    Eigen::MatrixXd b(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            b(i, j) = y(i * n + j);
        }
    }
    double bound = max_strategy_pairing(b);
    double value = (b.array() * instance.targets.array()).sum();
    const double scale = (m == 2 && n == 2 && bound > 0.0) ? 2.0 / bound : 1.0 / b.cwiseAbs().maxCoeff();
    b *= scale;
    bound *= scale;
    value *= scale;

    BellCertificate cert{b, bound, value};
    result.status = classify_outcome(result.phase_one_objective, &cert, tol);
    result.certificate = std::move(cert);
    return result;
}

bool verify_result(const MomentInstance& instance, const FeasibilityResult& result)
{
    instance.validate();
    const std::size_t m = instance.m();
    const std::size_t n = instance.n();
    const std::uint64_t count = std::uint64_t{1} << (m + n);

    if (result.status == FeasibilityStatus::feasible) {
        if (result.weights.size() != count) {
            throw InvalidArgument("weight vector does not match the instance shape");
        }
        Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
        double mass = 0.0;
        for (std::uint64_t s = 0; s < count; ++s) {
            const double w = result.weights[s];
            if (!(w >= -1e-12)) return false;
            if (w == 0.0) continue;
            mass += w;
            rebuilt += w * strategy_at(m, n, s).correlations();
        }
        return std::abs(mass - 1.0) <= kReconstructionTol &&
               (rebuilt - instance.targets).cwiseAbs().maxCoeff() <= kReconstructionTol;
    }

    if (!result.certificate) return false;
    const BellCertificate& cert = *result.certificate;
    if (cert.coefficients.rows() != static_cast<Eigen::Index>(m) ||
        cert.coefficients.cols() != static_cast<Eigen::Index>(n)) {
        throw InvalidArgument("certificate does not match the instance shape");
    }
    if (!cert.coefficients.allFinite()) return false;
    for (std::uint64_t s = 0; s < count; ++s) {
        if (strategy_pairing(cert.coefficients, s) > cert.classical_bound + kCertificateSlack) return false;
    }
    const double value = (cert.coefficients.array() * instance.targets.array()).sum();
    return std::abs(value - cert.target_value) <= kCertificateSlack &&
           value > cert.classical_bound + kDefaultFeasibilityTolerance;
}

Eigen::MatrixXd quantum_targets(const PartySettings& party1, const PartySettings& party2)
{
    const std::vector<UnitVector3> xs = setting_vectors(party1);
    const std::vector<UnitVector3> ys = setting_vectors(party2);
    Eigen::MatrixXd c(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = quantum_correlation(xs[i], ys[j]);
        }
    }
    return c;
}

double max_chsh_form(const Eigen::MatrixXd& c)
{
    if (c.rows() != 2 || c.cols() != 2) {
        throw InvalidArgument("CHSH forms need a 2x2 table");
    }
    const double total = c.sum();
    double best = 0.0;
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) {
            best = std::max(best, std::abs(total - 2.0 * c(i, j)));
        }
    }
    return best;
}

}  // namespace bellrv
