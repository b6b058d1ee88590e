#include "bellrv/hidden_variables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "bellrv/rng.hpp"

namespace bellrv {

namespace {

constexpr std::uint64_t kBlockSize = 4096;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x)
    {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o)
    {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double total = na + nb;
        const double delta = o.mean - mean;
        mean += delta * nb / total;
        m2 += o.m2 + delta * delta * na * nb / total;
        n += o.n;
    }
};

std::size_t locate(const std::vector<Dyadic>& bps, double omega)
{
    // Index k with bps[k] <= omega < bps[k+1], clamping w = 1 into the last piece.
    auto it = std::upper_bound(bps.begin(), bps.end(), omega,
                               [](double w, const Dyadic& p) { return w < p.to_double(); });
    const auto k = static_cast<std::size_t>(std::distance(bps.begin(), it));
    return std::min(k == 0 ? 0 : k - 1, bps.size() - 2);
}

PiecewiseConstantRV step(std::vector<Dyadic> bps, std::vector<Rational> values)
{
    return {std::move(bps), std::move(values)};
}

double sign_of(double x) { return x >= 0.0 ? 1.0 : -1.0; }

}  // namespace

PiecewiseConstantRV::PiecewiseConstantRV(std::vector<Dyadic> breakpoints, std::vector<Rational> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values))
{
    if (breakpoints_.size() < 2) {
        throw InvalidArgument("step function needs at least the breakpoints 0 and 1");
    }
    if (breakpoints_.front() != Dyadic(0, 0) || breakpoints_.back() != Dyadic(1, 0)) {
        throw InvalidArgument("breakpoints must start at 0 and end at 1");
    }
    for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
        if (!(breakpoints_[k - 1] < breakpoints_[k])) {
            throw InvalidArgument("breakpoints must be strictly increasing");
        }
    }
    if (values_.size() + 1 != breakpoints_.size()) {
        throw InvalidArgument("need exactly one value per subinterval");
    }
}

Rational PiecewiseConstantRV::value_at(const Rational& omega) const
{
    if (omega < Rational(0) || omega > Rational(1)) {
        throw InvalidArgument("sample point outside [0,1]");
    }
    std::size_t k = 0;
    while (k + 2 < breakpoints_.size() && breakpoints_[k + 1].to_rational() <= omega) {
        ++k;
    }
    return values_[k];
}

double PiecewiseConstantRV::value_at(double omega) const
{
    if (!(omega >= 0.0 && omega <= 1.0)) {
        throw InvalidArgument("sample point outside [0,1]");
    }
    return values_[locate(breakpoints_, omega)].to_double();
}

PiecewiseConstantRV PiecewiseConstantRV::negated() const
{
    std::vector<Rational> neg;
    neg.reserve(values_.size());
    for (const auto& v : values_) {
        neg.push_back(-v);
    }
    return {breakpoints_, std::move(neg)};
}

Rational integrate_product(const PiecewiseConstantRV& u, const PiecewiseConstantRV& v)
{
    std::vector<Dyadic> merged;
    std::merge(u.breakpoints().begin(), u.breakpoints().end(), v.breakpoints().begin(), v.breakpoints().end(),
               std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    Rational total(0);
    std::size_t iu = 0;
    std::size_t iv = 0;
    for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
        // Advance to the pieces of u and v containing [merged[k], merged[k+1]).
        while (u.breakpoints()[iu + 1] <= merged[k]) ++iu;
        while (v.breakpoints()[iv + 1] <= merged[k]) ++iv;
        const Rational width = merged[k + 1].to_rational() - merged[k].to_rational();
        total += width * u.values()[iu] * v.values()[iv];
    }
    return total;
}

RationalMatrix3 TripleSpinModel::gram() const
{
    RationalMatrix3 g;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            g[i][j] = integrate_product(xi[i], xi[j]);
        }
    }
    return g;
}

RationalMatrix3 TripleSpinModel::cross_gram() const
{
    RationalMatrix3 g;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            g[i][j] = integrate_product(party1(i), party2(j));
        }
    }
    return g;
}

TripleSpinModel triple_spin_model()
{
    const Dyadic zero(0, 0);
    const Dyadic quarter(1, 2);
    const Dyadic half(1, 1);
    const Dyadic three_quarters(3, 2);
    const Dyadic one(1, 0);
    return TripleSpinModel{{
        step({zero, one}, {1}),
        step({zero, quarter, half, three_quarters, one}, {-1, 1, -1, 1}),
        step({zero, half, one}, {1, -1}),
    }};
}

double triple_correlation(const TripleSpinModel& model, const UnitVector3& a, const UnitVector3& b)
{
    const RationalMatrix3 cross = model.cross_gram();
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            if (cross[i][j] != Rational(0)) {
                total += a[i] * b[j] * cross[i][j].to_double();
            }
        }
    }
    return total;
}

ModelKind parse_model_kind(std::string_view name)
{
    if (name == "triple") return ModelKind::triple;
    if (name == "cosine") return ModelKind::cosine;
    if (name == "scalar-sign") return ModelKind::scalar_sign;
    throw InvalidArgument("unknown model kind '" + std::string(name) + "'");
}

std::string_view to_string(ModelKind kind)
{
    switch (kind) {
    case ModelKind::triple:
        return "triple";
    case ModelKind::cosine:
        return "cosine";
    case ModelKind::scalar_sign:
        return "scalar-sign";
    }
    return "unknown";
}

UnitVector3 Setting::as_vector() const
{
    if (const auto* v = std::get_if<UnitVector3>(&value_)) {
        return *v;
    }
    return UnitVector3::planar(std::get<double>(value_));
}

double Setting::as_angle() const
{
    if (const auto* t = std::get_if<double>(&value_)) {
        return *t;
    }
    return std::get<UnitVector3>(value_).planar_angle();
}

double factor_value(const LHVModelSpec& model, int party, const Setting& setting, const SamplePoint& omega)
{
    if (party != 1 && party != 2) {
        throw InvalidArgument("party must be 1 or 2");
    }
    switch (model.kind) {
    case ModelKind::triple: {
        const auto* w = std::get_if<double>(&omega);
        if (w == nullptr || !(*w >= 0.0 && *w <= 1.0)) {
            throw InvalidArgument("triple model sample point must lie in [0,1]");
        }
        static const TripleSpinModel triple = triple_spin_model();
        const UnitVector3 a = setting.as_vector();
        double f = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            f += triple.xi[i].value_at(*w) * a[i];
        }
        return party == 1 ? f : -f;
    }
    case ModelKind::cosine: {
        const auto* w = std::get_if<double>(&omega);
        if (w == nullptr || !(*w >= 0.0 && *w < kTwoPi)) {
            throw InvalidArgument("cosine model sample point must lie in [0, 2pi)");
        }
        return std::numbers::sqrt2 * std::cos(setting.as_angle() - *w);
    }
    case ModelKind::scalar_sign: {
        const auto* lambda = std::get_if<UnitVector3>(&omega);
        if (lambda == nullptr) {
            throw InvalidArgument("scalar-sign model sample point must be a unit vector");
        }
        const double s = sign_of(setting.as_vector().dot(*lambda));
        return party == 1 ? s : -s;
    }
    }
    throw InvalidArgument("unknown model kind");
}

double cosine_correlation_quadrature(double alpha, double beta, std::size_t nodes)
{
    if (nodes == 0) {
        throw InvalidArgument("quadrature needs at least one node");
    }
    double sum = 0.0;
    const double h = kTwoPi / static_cast<double>(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
        const double w = h * static_cast<double>(k);
        sum += std::cos(alpha - w) * std::cos(beta - w);
    }
    return 2.0 * sum / static_cast<double>(nodes);
}

double cosine_correlation(double alpha, double beta)
{
    const double closed = std::cos(alpha - beta);
    const double quad = cosine_correlation_quadrature(alpha, beta);
    if (std::abs(closed - quad) > 1e-10) {
        throw Error("cosine model quadrature disagrees with closed form");
    }
    return closed;
}

double scalar_sign_correlation(const UnitVector3& a, const UnitVector3& b)
{
    return std::clamp(-1.0 + 2.0 * a.angle_to(b) / std::numbers::pi, -1.0, 1.0);
}

double exact_correlation(const LHVModelSpec& model, const Setting& a, const Setting& b)
{
    switch (model.kind) {
    case ModelKind::triple:
        return triple_correlation(triple_spin_model(), a.as_vector(), b.as_vector());
    case ModelKind::cosine:
        return cosine_correlation(a.as_angle(), b.as_angle());
    case ModelKind::scalar_sign:
        return scalar_sign_correlation(a.as_vector(), b.as_vector());
    }
    throw InvalidArgument("unknown model kind");
}

SamplePoint draw_sample(ModelKind kind, std::uint64_t seed, std::uint64_t index)
{
    CounterRng rng(seed, index);
    switch (kind) {
    case ModelKind::triple:
        return rng.uniform();
    case ModelKind::cosine: {
        const double w = kTwoPi * rng.uniform();
        return w < kTwoPi ? w : 0.0;
    }
    case ModelKind::scalar_sign: {
        for (;;) {
            double g0, g1, g2, unused;
            rng.gaussian_pair(g0, g1);
            rng.gaussian_pair(g2, unused);
            const double norm = std::sqrt(g0 * g0 + g1 * g1 + g2 * g2);
            if (norm > 1e-300) {
                return UnitVector3::normalized(g0, g1, g2);
            }
        }
    }
    }
    throw InvalidArgument("unknown model kind");
}

McResult mc_correlation(const LHVModelSpec& model, const Setting& a, const Setting& b, std::uint64_t n,
                        std::uint64_t seed, unsigned lanes)
{
    if (n == 0) {
        throw InvalidArgument("sample count must be at least 1");
    }
    // Validate settings against the model once, up front.
    (void)exact_correlation(model, a, b);

    const std::uint64_t blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<Moments> partial(blocks);
    auto run_block = [&](std::uint64_t blk) {
        Moments m;
        const std::uint64_t end = std::min(n, (blk + 1) * kBlockSize);
        for (std::uint64_t k = blk * kBlockSize; k < end; ++k) {
            const SamplePoint w = draw_sample(model.kind, seed, k);
            m.push(factor_value(model, 1, a, w) * factor_value(model, 2, b, w));
        }
        partial[blk] = m;
    };

    lanes = std::max(1U, std::min<unsigned>(lanes, static_cast<unsigned>(std::min<std::uint64_t>(blocks, 1024))));
    if (lanes == 1) {
        for (std::uint64_t blk = 0; blk < blocks; ++blk) run_block(blk);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(lanes);
        for (unsigned lane = 0; lane < lanes; ++lane) {
            pool.emplace_back([&, lane] {
                for (std::uint64_t blk = lane; blk < blocks; blk += lanes) run_block(blk);
            });
        }
        for (auto& t : pool) t.join();
    }

    Moments total;
    for (const auto& m : partial) total.merge(m);

    McResult r;
    r.estimate = total.mean;
    r.n = n;
    r.seed = seed;
    r.std_error = n > 1 ? std::sqrt(std::max(0.0, total.m2) / static_cast<double>(n - 1)) /
                              std::sqrt(static_cast<double>(n))
                        : 0.0;
    return r;
}

}  // namespace bellrv
