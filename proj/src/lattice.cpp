#include "stablewalk/lattice.hpp"

#include "detail/heavy_tail.hpp"
#include "stablewalk/errors.hpp"
#include "stablewalk/format.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace stablewalk {

struct LatticeDistribution::Node {
    DistKind kind = DistKind::FiniteSupport;
    std::optional<detail::HeavyTail> heavy;
    std::vector<double> masses;
    std::optional<double> repairer_kappa2;
    double q = 0.0;
    std::vector<LatticeDistribution> parts;

    mutable std::once_flag table_once;
    mutable std::unique_ptr<detail::ComplementTable> table;
};

namespace {

using Node = LatticeDistribution::Node;

constexpr double pi = std::numbers::pi;

void require_alpha(double alpha, const char* who)
{
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError(std::string(who) + ": alpha must lie in (0, 2)");
}

LatticeDistribution make_heavy(detail::HeavyTail::Shape shape, double alpha)
{
    auto node = std::make_shared<Node>();
    node->kind = shape == detail::HeavyTail::Shape::LongRange ? DistKind::LongRange : DistKind::ParetoDiff;
    node->heavy.emplace(shape, alpha);
    return LatticeDistribution(std::move(node));
}

double finite_complement(const std::vector<double>& masses, double theta)
{
    double c = 0.0;
    for (std::size_t x = masses.size() - 1; x >= 1; --x) {
        const double s = std::sin(0.5 * theta * static_cast<double>(x));
        c += 4.0 * masses[x] * s * s;
    }
    return c;
}

// pmf of A + B when B has finite support.
double pmf_with_finite(const LatticeDistribution& a, const LatticeDistribution& finite, long long x)
{
    const auto& m = finite.masses();
    const auto radius = static_cast<long long>(m.size()) - 1;
    double s = 0.0;
    for (long long y = -radius; y <= radius; ++y) {
        const double w = m[static_cast<std::size_t>(std::llabs(y))];
        if (w != 0.0)
            s += w * a.pmf(x - y);
    }
    return s;
}

} // namespace

std::string to_string(DistKind kind)
{
    switch (kind) {
    case DistKind::FiniteSupport: return "finite_support";
    case DistKind::LongRange: return "long_range";
    case DistKind::ParetoDiff: return "pareto_diff";
    case DistKind::Convolution: return "convolution";
    case DistKind::Mixture: return "mixture";
    }
    return "unknown";
}

DistKind LatticeDistribution::kind() const { return node_->kind; }

std::optional<double> LatticeDistribution::index() const
{
    switch (node_->kind) {
    case DistKind::FiniteSupport: return std::nullopt;
    case DistKind::LongRange:
    case DistKind::ParetoDiff: return node_->heavy->alpha();
    default: break;
    }
    std::optional<double> best;
    for (const auto& p : node_->parts)
        if (auto a = p.index(); a && (!best || *a < *best))
            best = a;
    return best;
}

double LatticeDistribution::tail_exponent() const
{
    const auto a = index();
    return a ? 1.0 + *a : std::numeric_limits<double>::infinity();
}

double LatticeDistribution::pmf(long long x) const
{
    const Node& n = *node_;
    x = std::llabs(x);
    switch (n.kind) {
    case DistKind::FiniteSupport: {
        const auto ax = static_cast<std::size_t>(std::llabs(x));
        return ax < n.masses.size() ? n.masses[ax] : 0.0;
    }
    case DistKind::LongRange:
    case DistKind::ParetoDiff:
        return x == 0 ? 0.0 : n.heavy->profile(static_cast<double>(std::llabs(x)));
    case DistKind::Mixture:
        return n.q * n.parts[0].pmf(x) + (1.0 - n.q) * n.parts[1].pmf(x);
    case DistKind::Convolution: {
        const auto& a = n.parts[0];
        const auto& b = n.parts[1];
        if (b.kind() == DistKind::FiniteSupport)
            return pmf_with_finite(a, b, x);
        if (a.kind() == DistKind::FiniteSupport)
            return pmf_with_finite(b, a, x);
        QuadratureSpec spec;
        spec.abs_tol = 1e-15;
        spec.rel_tol = 1e-12;
        const auto r = oscillatory_integral([this](double t) { return fast_char_fn(t); },
                                            static_cast<double>(std::llabs(x)), {0.0, pi}, spec);
        return std::max(0.0, r.value / pi);
    }
    }
    return 0.0;
}

double LatticeDistribution::tail_mass_bound(long long radius) const
{
    const Node& n = *node_;
    if (radius < 0)
        return 1.0;
    switch (n.kind) {
    case DistKind::FiniteSupport: {
        double s = 0.0;
        for (std::size_t x = n.masses.size() - 1; x > static_cast<std::size_t>(radius) && x >= 1; --x)
            s += 2.0 * n.masses[x];
        return s;
    }
    case DistKind::LongRange:
    case DistKind::ParetoDiff:
        return n.heavy->tail_mass(radius);
    case DistKind::Mixture:
        return n.q * n.parts[0].tail_mass_bound(radius) + (1.0 - n.q) * n.parts[1].tail_mass_bound(radius);
    case DistKind::Convolution: {
        const long long half = radius / 2;
        return std::min(1.0, n.parts[0].tail_mass_bound(half) + n.parts[1].tail_mass_bound(radius - half));
    }
    }
    return 1.0;
}

double LatticeDistribution::complement(double theta) const
{
    const Node& n = *node_;
    switch (n.kind) {
    case DistKind::FiniteSupport: return finite_complement(n.masses, theta);
    case DistKind::LongRange:
    case DistKind::ParetoDiff: return n.heavy->complement(theta);
    case DistKind::Mixture:
        return n.q * n.parts[0].complement(theta) + (1.0 - n.q) * n.parts[1].complement(theta);
    case DistKind::Convolution: {
        const double a = n.parts[0].complement(theta);
        const double b = n.parts[1].complement(theta);
        return a + b - a * b;
    }
    }
    return 0.0;
}

double LatticeDistribution::fast_complement(double theta) const
{
    const Node& n = *node_;
    switch (n.kind) {
    case DistKind::FiniteSupport: return finite_complement(n.masses, theta);
    case DistKind::LongRange:
    case DistKind::ParetoDiff:
        std::call_once(n.table_once, [&n] {
            const detail::HeavyTail& h = *n.heavy;
            n.table = std::make_unique<detail::ComplementTable>(
                [&h](double t) { return h.complement(t); }, h.alpha());
        });
        return (*n.table)(detail::reduce_angle(theta));
    case DistKind::Mixture:
        return n.q * n.parts[0].fast_complement(theta) + (1.0 - n.q) * n.parts[1].fast_complement(theta);
    case DistKind::Convolution: {
        const double a = n.parts[0].fast_complement(theta);
        const double b = n.parts[1].fast_complement(theta);
        return a + b - a * b;
    }
    }
    return 0.0;
}

double LatticeDistribution::char_fn(double theta) const { return 1.0 - complement(theta); }

double LatticeDistribution::alpha() const
{
    if (!node_->heavy)
        throw DomainError("alpha: only heavy-tailed leaves carry an index");
    return node_->heavy->alpha();
}

double LatticeDistribution::normalizer() const
{
    if (node_->kind != DistKind::LongRange)
        throw DomainError("normalizer: only long-range laws carry c_alpha");
    return node_->heavy->normalizer();
}

const std::vector<double>& LatticeDistribution::masses() const
{
    if (node_->kind != DistKind::FiniteSupport)
        throw DomainError("masses: not a finite-support law");
    return node_->masses;
}

std::optional<double> LatticeDistribution::repairer_kappa2() const { return node_->repairer_kappa2; }

double LatticeDistribution::weight() const
{
    if (node_->kind != DistKind::Mixture)
        throw DomainError("weight: not a mixture");
    return node_->q;
}

const std::vector<LatticeDistribution>& LatticeDistribution::components() const { return node_->parts; }

LatticeDistribution make_long_range(double alpha)
{
    require_alpha(alpha, "make_long_range");
    return make_heavy(detail::HeavyTail::Shape::LongRange, alpha);
}

LatticeDistribution make_pareto_diff(double alpha)
{
    require_alpha(alpha, "make_pareto_diff");
    return make_heavy(detail::HeavyTail::Shape::ParetoDiff, alpha);
}

LatticeDistribution make_finite_support(std::vector<double> masses)
{
    if (masses.empty())
        throw DomainError("make_finite_support: empty mass table");
    double total = masses[0];
    for (std::size_t i = 0; i < masses.size(); ++i) {
        if (!(masses[i] >= 0.0) || !std::isfinite(masses[i]))
            throw DomainError("make_finite_support: masses must be finite and nonnegative");
        if (i > 0)
            total += 2.0 * masses[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw DomainError("make_finite_support: masses sum to " + format_double(total) + ", not 1");
    while (masses.size() > 1 && masses.back() == 0.0)
        masses.pop_back();
    auto node = std::make_shared<Node>();
    node->kind = DistKind::FiniteSupport;
    node->masses = std::move(masses);
    return LatticeDistribution(std::move(node));
}

LatticeDistribution make_point_mass() { return make_finite_support({1.0}); }

LatticeDistribution make_repairer(double kappa2)
{
    if (!(kappa2 > 0.0) || !std::isfinite(kappa2))
        throw DomainError("make_repairer: kappa2 must be positive");
    const auto m = static_cast<std::size_t>(std::ceil(std::sqrt(2.0 * kappa2)));
    std::vector<double> masses(m + 1, 0.0);
    const double mm = static_cast<double>(m * m);
    masses[m] = kappa2 / mm;
    masses[0] = 1.0 - 2.0 * kappa2 / mm;
    auto node = std::make_shared<Node>();
    node->kind = DistKind::FiniteSupport;
    node->masses = std::move(masses);
    node->repairer_kappa2 = kappa2;
    return LatticeDistribution(std::move(node));
}

LatticeDistribution convolve(const LatticeDistribution& d1, const LatticeDistribution& d2)
{
    auto node = std::make_shared<Node>();
    node->kind = DistKind::Convolution;
    node->parts = {d1, d2};
    return LatticeDistribution(std::move(node));
}

LatticeDistribution mix(const LatticeDistribution& d1, const LatticeDistribution& d2, double q)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (!(q > eps && q < 1.0 - eps))
        throw DomainError("mix: weight must lie strictly inside (0, 1)");
    auto node = std::make_shared<Node>();
    node->kind = DistKind::Mixture;
    node->q = q;
    node->parts = {d1, d2};
    return LatticeDistribution(std::move(node));
}

double power_of_char_fn(double complement, long long n)
{
    if (n == 0)
        return 1.0;
    if (complement < 0.5)
        return std::exp(static_cast<double>(n) * std::log1p(-complement));
    return std::pow(1.0 - complement, static_cast<double>(n));
}

nlohmann::json LatticeDistribution::to_json() const
{
    const Node& n = *node_;
    nlohmann::json j;
    switch (n.kind) {
    case DistKind::FiniteSupport:
        if (n.repairer_kappa2) {
            j["kind"] = "repairer";
            j["kappa2"] = *n.repairer_kappa2;
        } else {
            j["kind"] = "finite_support";
            j["masses"] = n.masses;
        }
        break;
    case DistKind::LongRange:
    case DistKind::ParetoDiff:
        j["kind"] = to_string(n.kind);
        j["alpha"] = n.heavy->alpha();
        break;
    case DistKind::Mixture:
        j["kind"] = "mixture";
        j["q"] = n.q;
        j["components"] = {n.parts[0].to_json(), n.parts[1].to_json()};
        break;
    case DistKind::Convolution:
        j["kind"] = "convolution";
        j["components"] = {n.parts[0].to_json(), n.parts[1].to_json()};
        break;
    }
    return j;
}

LatticeDistribution LatticeDistribution::from_json(const nlohmann::json& j)
{
    try {
        if (!j.is_object())
            throw DomainError("distribution descriptor must be a JSON object");
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "long_range")
            return make_long_range(j.at("alpha").get<double>());
        if (kind == "pareto_diff")
            return make_pareto_diff(j.at("alpha").get<double>());
        if (kind == "repairer")
            return make_repairer(j.at("kappa2").get<double>());
        if (kind == "point_mass")
            return make_point_mass();
        if (kind == "finite_support")
            return make_finite_support(j.at("masses").get<std::vector<double>>());
        if (kind == "convolution" || kind == "mixture") {
            const auto& comps = j.at("components");
            if (!comps.is_array() || comps.size() < 2)
                throw DomainError(kind + ": needs at least two components");
            if (kind == "mixture") {
                if (comps.size() != 2)
                    throw DomainError("mixture: exactly two components");
                return mix(from_json(comps[0]), from_json(comps[1]), j.at("q").get<double>());
            }
            LatticeDistribution acc = from_json(comps[0]);
            for (std::size_t i = 1; i < comps.size(); ++i)
                acc = convolve(acc, from_json(comps[i]));
            return acc;
        }
        throw DomainError("unknown distribution kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed distribution descriptor: ") + e.what());
    }
}

} // namespace stablewalk
