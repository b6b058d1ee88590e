#pragma once

#include <array>
#include <string_view>

#include "bellrv/hidden_variables.hpp"
#include "bellrv/quantum.hpp"

namespace bellrv {

/// Settings a, a' for party 1 and b, b' for party 2.
struct MeasurementQuad {
    UnitVector3 a;
    UnitVector3 a_prime;
    UnitVector3 b;
    UnitVector3 b_prime;

    /// Coplanar quad from four x-z plane angles (radians).
    static MeasurementQuad planar(double a, double a_prime, double b, double b_prime);
};

enum class SourceKind { quantum, triple, cosine_planar, scalar_sign, table };

/// 2x2 correlations indexed [party-1 setting (a, a')][party-2 setting (b, b')].
using CorrelationTable = std::array<std::array<double, 2>, 2>;

/// Something that yields C(x, y) for a pair of settings.
class CorrelationSource {
public:
    explicit CorrelationSource(SourceKind kind);
    /// Fixed table; every entry must lie in [-1, 1].
    static CorrelationSource from_table(const CorrelationTable& table);
    static CorrelationSource parse(std::string_view name);

    SourceKind kind() const { return kind_; }
    const CorrelationTable& table() const { return table_; }
    /// Not defined for table sources.
    double correlation(const UnitVector3& x, const UnitVector3& y) const;

private:
    SourceKind kind_;
    CorrelationTable table_{};
};

std::string_view to_string(SourceKind kind);

/// C(a,b) - C(a,b') + C(a',b) + C(a',b'), signed.
double chsh_value(const CorrelationSource& source, const MeasurementQuad& quad);

/// Planar angles a = 0, a' = pi/2, b = pi/4, b' = 3pi/4:
/// a.b = a'.b = a'.b' = -a.b' = sqrt(2)/2.
MeasurementQuad tsirelson_quad();

struct ChshOptimum {
    MeasurementQuad quad;
    std::array<double, 4> angles;  // planar angles of a, a', b, b'
    double value;                  // |chsh_value| at quad
};

/// Grid search over coplanar quads with a pinned at angle 0 (grid_steps
/// points per angle on [0, 2pi)), then coordinate descent with step halving
/// from pi/grid_steps to 1e-9 for at most refine_iters step sizes.
ChshOptimum max_chsh(const CorrelationSource& source, int grid_steps = 24, int refine_iters = 60);

/// CHSH value of each of the 16 deterministic +-1 assignments (u_a, u_a', v_b, v_b'),
/// indexed by the bits of the assignment number.
std::array<int, 16> deterministic_chsh_values();
/// Max |CHSH| over deterministic assignments: exactly 2.
int max_chsh_deterministic();

}  // namespace bellrv
