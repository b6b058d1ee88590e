#include "bellrv/chsh.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

namespace bellrv {

namespace {

constexpr double kMinStep = 1e-9;
constexpr int kMaxMovesPerStep = 10000;

double planar_objective(const CorrelationSource& source, const std::array<double, 4>& t)
{
    return std::abs(chsh_value(source, MeasurementQuad::planar(t[0], t[1], t[2], t[3])));
}

}  // namespace

MeasurementQuad MeasurementQuad::planar(double a, double a_prime, double b, double b_prime)
{
    return {UnitVector3::planar(a), UnitVector3::planar(a_prime), UnitVector3::planar(b),
            UnitVector3::planar(b_prime)};
}

CorrelationSource::CorrelationSource(SourceKind kind) : kind_(kind)
{
    if (kind == SourceKind::table) {
        throw InvalidArgument("table sources must be built with from_table");
    }
}

CorrelationSource CorrelationSource::from_table(const CorrelationTable& table)
{
    for (const auto& row : table) {
        for (double c : row) {
            if (!(std::abs(c) <= 1.0)) {
                throw InvalidArgument("table correlations must lie in [-1, 1]");
            }
        }
    }
    CorrelationSource s(SourceKind::quantum);
    s.kind_ = SourceKind::table;
    s.table_ = table;
    return s;
}

CorrelationSource CorrelationSource::parse(std::string_view name)
{
    if (name == "quantum") return CorrelationSource(SourceKind::quantum);
    if (name == "triple") return CorrelationSource(SourceKind::triple);
    if (name == "cosine-planar") return CorrelationSource(SourceKind::cosine_planar);
    if (name == "scalar-sign") return CorrelationSource(SourceKind::scalar_sign);
    throw InvalidArgument("unknown correlation source '" + std::string(name) + "'");
}

std::string_view to_string(SourceKind kind)
{
    switch (kind) {
    case SourceKind::quantum:
        return "quantum";
    case SourceKind::triple:
        return "triple";
    case SourceKind::cosine_planar:
        return "cosine-planar";
    case SourceKind::scalar_sign:
        return "scalar-sign";
    case SourceKind::table:
        return "table";
    }
    return "unknown";
}

double CorrelationSource::correlation(const UnitVector3& x, const UnitVector3& y) const
{
    switch (kind_) {
    case SourceKind::quantum:
        return quantum_correlation(x, y);
    case SourceKind::triple: {
        static const TripleSpinModel model = triple_spin_model();
        return triple_correlation(model, x, y);
    }
    case SourceKind::cosine_planar:
        return std::cos(x.planar_angle() - y.planar_angle());
    case SourceKind::scalar_sign:
        return scalar_sign_correlation(x, y);
    case SourceKind::table:
        break;
    }
    throw InvalidArgument("table sources have no setting-dependent correlation");
}

double chsh_value(const CorrelationSource& source, const MeasurementQuad& q)
{
    if (source.kind() == SourceKind::table) {
        const auto& t = source.table();
        return t[0][0] - t[0][1] + t[1][0] + t[1][1];
    }
    return source.correlation(q.a, q.b) - source.correlation(q.a, q.b_prime) + source.correlation(q.a_prime, q.b) +
           source.correlation(q.a_prime, q.b_prime);
}

MeasurementQuad tsirelson_quad()
{
    constexpr double s = std::numbers::sqrt2 / 2.0;
    return {UnitVector3(0.0, 0.0, 1.0), UnitVector3(1.0, 0.0, 0.0), UnitVector3(s, 0.0, s), UnitVector3(s, 0.0, -s)};
}

ChshOptimum max_chsh(const CorrelationSource& source, int grid_steps, int refine_iters)
{
    if (grid_steps < 8) {
        throw InvalidArgument("grid_steps must be at least 8");
    }
    if (refine_iters < 0) {
        throw InvalidArgument("refine_iters must be nonnegative");
    }
    const double spacing = 2.0 * std::numbers::pi / grid_steps;

    // Lexicographic scan with strict improvement keeps the smallest angle tuple on ties.
    std::array<double, 4> best{0.0, 0.0, 0.0, 0.0};
    double best_value = -1.0;
    for (int i = 0; i < grid_steps; ++i) {
        for (int j = 0; j < grid_steps; ++j) {
            for (int k = 0; k < grid_steps; ++k) {
                const std::array<double, 4> t{0.0, spacing * i, spacing * j, spacing * k};
                const double v = planar_objective(source, t);
                if (v > best_value) {
                    best_value = v;
                    best = t;
                }
            }
        }
    }

    double h = std::numbers::pi / grid_steps;
    for (int round = 0; round < refine_iters && h >= kMinStep; ++round, h *= 0.5) {
        for (int moves = 0; moves < kMaxMovesPerStep; ++moves) {
            bool improved = false;
            for (std::size_t c = 1; c < 4; ++c) {
                for (double dir : {-1.0, 1.0}) {
                    std::array<double, 4> trial = best;
                    trial[c] += dir * h;
                    const double v = planar_objective(source, trial);
                    if (v > best_value) {
                        best_value = v;
                        best = trial;
                        improved = true;
                    }
                }
            }
            if (!improved) break;
        }
    }

    return {MeasurementQuad::planar(best[0], best[1], best[2], best[3]), best, best_value};
}

std::array<int, 16> deterministic_chsh_values()
{
    std::array<int, 16> out{};
    for (int s = 0; s < 16; ++s) {
        const int ua = (s & 1) ? -1 : 1;
        const int uap = (s & 2) ? -1 : 1;
        const int vb = (s & 4) ? -1 : 1;
        const int vbp = (s & 8) ? -1 : 1;
        out[static_cast<std::size_t>(s)] = ua * vb - ua * vbp + uap * vb + uap * vbp;
    }
    return out;
}

int max_chsh_deterministic()
{
    int best = 0;
    for (int v : deterministic_chsh_values()) {
        best = std::max(best, std::abs(v));
    }
    return best;
}

}  // namespace bellrv
