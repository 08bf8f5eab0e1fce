#include "output.hpp"
#include "selftest.hpp"

#include "stablewalk/errors.hpp"
#include "stablewalk/expansion.hpp"
#include "stablewalk/format.hpp"
#include "stablewalk/lclt.hpp"
#include "stablewalk/potential.hpp"
#include "stablewalk/stable.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

using namespace stablewalk;

namespace {

struct GlobalOptions {
    double tol = 1e-12;
    std::optional<std::string> out;
    std::optional<std::string> format;
    int threads = 1;
    bool seedless = false;
};

struct LawOptions {
    std::optional<std::string> dist;
    std::optional<double> alpha;
    bool repair = false;
};

QuadratureSpec spec_from(const GlobalOptions& g)
{
    QuadratureSpec s;
    s.abs_tol = g.tol;
    s.rel_tol = std::max(100.0 * g.tol, 1e-15);
    s.validate();
    return s;
}

std::string output_format(const GlobalOptions& g, const std::string& fallback)
{
    const std::string f = g.format.value_or(fallback);
    if (f != "csv" && f != "json")
        throw InputError("--format must be csv or json");
    return f;
}

std::vector<long long> parse_integer_list(const std::string& text, const std::string& flag)
{
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            throw InputError(flag + ": '" + item + "' is not an integer");
        }
        if (used != item.size())
            throw InputError(flag + ": '" + item + "' is not an integer");
        out.push_back(v);
    }
    if (out.empty())
        throw InputError(flag + ": empty list");
    return out;
}

nlohmann::json read_descriptor(const std::string& text)
{
    std::string body = text;
    if (!text.empty() && text.front() == '@') {
        std::ifstream in(text.substr(1));
        if (!in)
            throw InputError("cannot read " + text.substr(1));
        body.assign(std::istreambuf_iterator<char>(in), {});
    }
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("malformed distribution JSON: ") + e.what());
    }
}

ExpansionCoefficients fit_law(const LatticeDistribution& d, double alpha, const FitOptions& options = {})
{
    return fit_expansion([&d](double t) { return d.complement(t); }, alpha, default_candidates(alpha), options);
}

struct Law {
    LatticeDistribution d;
    double alpha;
};

Law resolve_law(const LawOptions& o)
{
    if (!o.dist && !o.alpha)
        throw InputError("give --dist or --alpha");
    const LatticeDistribution base =
        o.dist ? LatticeDistribution::from_json(read_descriptor(*o.dist)) : make_long_range(*o.alpha);
    const auto index = base.index();
    const double alpha = o.alpha ? *o.alpha : index.value_or(0.0);
    if (!index && !o.alpha)
        throw DomainError("finite-support laws need an explicit --alpha");
    if (!o.repair)
        return {base, alpha};
    const double k2 = fit_law(base, alpha).kappa_at(2.0);
    if (!(k2 > 0.0))
        throw CaseError("--repair needs a positive theta^2 coefficient; fitted " + format_double(k2));
    return {convolve(base, make_repairer(k2)), alpha};
}

nlohmann::json law_record(const LawOptions& o)
{
    return {{"dist", o.dist ? nlohmann::json(*o.dist) : nlohmann::json(nullptr)},
            {"alpha", o.alpha ? nlohmann::json(*o.alpha) : nlohmann::json(nullptr)},
            {"repair", o.repair}};
}

nlohmann::json global_record(const GlobalOptions& g)
{
    return {{"tol", g.tol}, {"format", g.format ? nlohmann::json(*g.format) : nlohmann::json(nullptr)},
            {"threads", g.threads}, {"seedless", g.seedless}};
}

// Evaluates f over contiguous chunks of `items` on up to `threads` workers; results keep input order.
template <typename T, typename F>
auto fan_out(const std::vector<T>& items, int threads, F f)
{
    using Row = typename std::invoke_result_t<F, std::vector<T>>::value_type;
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(threads), 1, std::max<std::size_t>(items.size(), 1));
    const std::size_t chunk = (items.size() + workers - 1) / workers;
    std::vector<std::future<std::vector<Row>>> parts;
    for (std::size_t lo = 0; lo < items.size(); lo += chunk) {
        std::vector<T> slice(items.begin() + static_cast<std::ptrdiff_t>(lo),
                             items.begin() + static_cast<std::ptrdiff_t>(std::min(items.size(), lo + chunk)));
        parts.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, f, std::move(slice)));
    }
    std::vector<Row> out;
    for (auto& p : parts) {
        auto rows = p.get();
        out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
}

int run_expand(const GlobalOptions& g, const LawOptions& lo, const std::vector<double>& candidates,
               const FitOptions& fit_options)
{
    const QuadratureSpec spec = spec_from(g);
    const std::string format = output_format(g, "json");
    const Law law = resolve_law(lo);
    const auto coeffs = fit_expansion([&](double t) { return law.d.complement(t); }, law.alpha,
                                      candidates.empty() ? default_candidates(law.alpha) : candidates, fit_options);
    nlohmann::json params = {{"law", law_record(lo)},
                             {"candidates", candidates},
                             {"theta_max", fit_options.theta_max},
                             {"points", fit_options.points},
                             {"global", global_record(g)}};
    cli::RunRecord record("expand", params, spec);
    if (format == "json") {
        record.emit(g.out, coeffs.to_json().dump(2) + "\n");
    } else {
        std::string csv = "exponent,kappa\n" + format_double(coeffs.alpha) + "," + format_double(coeffs.kappa_alpha) + "\n";
        for (const auto& [e, k] : coeffs.kappa)
            csv += format_double(e) + "," + format_double(k) + "\n";
        record.emit(g.out, csv);
    }
    record.finish(g.out);
    return 0;
}

int run_lclt(const GlobalOptions& g, const LawOptions& lo, const std::string& target, const std::optional<std::string>& n_text,
             const std::optional<std::string>& summary_path)
{
    const QuadratureSpec spec = spec_from(g);
    const std::string format = output_format(g, "csv");
    TargetKind kind;
    if (target == "pure")
        kind = TargetKind::PureStable;
    else if (target == "gauss")
        kind = TargetKind::StableGauss;
    else
        throw InputError("--target must be pure or gauss");
    const auto n_list = n_text ? parse_integer_list(*n_text, "--n") : default_n_list();
    const Law law = resolve_law(lo);
    const auto coeffs = fit_law(law.d, law.alpha);
    const auto ex = run_rate_experiment(law.d, coeffs, kind, n_list);
    cli::RunRecord record("lclt", {{"law", law_record(lo)}, {"target", target}, {"n", n_list}, {"global", global_record(g)}},
                          spec);
    const nlohmann::json summary = ex.summary();
    if (format == "csv") {
        record.emit(g.out, ex.csv());
    } else {
        nlohmann::json body = summary;
        body["csv"] = ex.csv();
        record.emit(g.out, body.dump(2) + "\n");
    }
    if (summary_path)
        record.emit(summary_path, summary.dump(2) + "\n");
    else
        std::cerr << summary.dump() << '\n';
    record.finish(g.out ? g.out : summary_path);
    return 0;
}

int run_pk(const GlobalOptions& g, const LawOptions& lo, const std::optional<std::string>& x_text, long long x_max,
           const std::optional<std::string>& summary_path)
{
    const QuadratureSpec spec = spec_from(g);
    const std::string format = output_format(g, "csv");
    std::vector<long long> grid;
    if (x_text) {
        grid = parse_integer_list(*x_text, "--x");
    } else {
        if (x_max < 50)
            throw InputError("--xmax must be at least 50");
        for (long long x = 50; x <= x_max; x *= 2)
            grid.push_back(x);
        if (grid.back() != x_max)
            grid.push_back(x_max);
    }
    const Law law = resolve_law(lo);
    const auto coeffs = fit_law(law.d, law.alpha);
    const auto expansion = potential_expansion(law.d, coeffs, spec);
    const auto rows = fan_out(grid, g.threads, [&](std::vector<long long> xs) {
        return residual_profile(law.d, expansion, xs, spec);
    });
    cli::RunRecord record("pk", {{"law", law_record(lo)}, {"x", grid}, {"global", global_record(g)}}, spec);
    nlohmann::json constants = expansion.to_json();
    constants["fit"] = coeffs.to_json();
    if (format == "csv") {
        record.emit(g.out, residual_csv(rows));
        if (summary_path)
            record.emit(summary_path, constants.dump(2) + "\n");
        else
            std::cerr << constants.dump() << '\n';
    } else {
        nlohmann::json body;
        body["expansion"] = constants;
        body["csv"] = residual_csv(rows);
        record.emit(g.out, body.dump(2) + "\n");
        if (summary_path)
            record.emit(summary_path, constants.dump(2) + "\n");
    }
    record.finish(g.out ? g.out : summary_path);
    return 0;
}

struct StableOptions {
    double alpha = 1.0;
    double kappa = 1.0;
    double gauss_kappa2 = 0.0;
    long long n = 1;
    std::optional<std::string> x_text;
    double x_max = 10.0;
    double step = 1.0;
    std::optional<double> uj;
    bool self_similarity = false;
};

int run_stable(const GlobalOptions& g, const StableOptions& o)
{
    const QuadratureSpec spec = spec_from(g);
    const std::string format = output_format(g, "csv");
    const StableLaw law{o.alpha, o.kappa, o.gauss_kappa2};
    law.validate();
    if (o.n < 1)
        throw InputError("--n must be positive");
    std::vector<double> grid;
    if (o.x_text) {
        for (long long x : parse_integer_list(*o.x_text, "--x"))
            grid.push_back(static_cast<double>(x));
    } else {
        if (!(o.step > 0.0) || !(o.x_max >= 0.0))
            throw InputError("--step must be positive and --xmax nonnegative");
        const auto count = static_cast<long long>(std::floor(o.x_max / o.step + 1e-9));
        for (long long i = 0; i <= count; ++i)
            grid.push_back(static_cast<double>(i) * o.step);
    }
    if (o.uj && !(*o.uj > 0.0))
        throw InputError("--uj must be positive");
    using Row = std::pair<double, double>;
    const auto rows = fan_out(grid, g.threads, [&](std::vector<double> xs) {
        std::vector<Row> out;
        for (double x : xs)
            out.emplace_back(x, o.uj ? u_profile(o.alpha, o.kappa, *o.uj, x, spec)
                                     : stable_nstep_density(law, o.n, x, spec));
        return out;
    });
    std::optional<double> deviation;
    if (o.self_similarity) {
        if (o.uj || o.gauss_kappa2 != 0.0)
            throw InputError("--self-similarity applies to pure stable densities");
        const double scale = std::pow(static_cast<double>(o.n), -1.0 / o.alpha);
        double worst = 0.0;
        for (const auto& [x, v] : rows)
            worst = std::max(worst, std::abs(v - scale * stable_nstep_density(law, 1, x * scale, spec)));
        deviation = worst;
        std::cerr << "self-similarity max deviation " << format_double(worst) << '\n';
    }
    const std::string column = o.uj ? "u_" + format_double(*o.uj) : "density";
    nlohmann::json params = {{"alpha", o.alpha}, {"kappa", o.kappa}, {"gauss_kappa2", o.gauss_kappa2}, {"n", o.n},
                             {"x", grid}, {"uj", o.uj ? nlohmann::json(*o.uj) : nlohmann::json(nullptr)},
                             {"self_similarity", o.self_similarity}, {"global", global_record(g)}};
    cli::RunRecord record("stable", params, spec);
    if (format == "csv") {
        std::string csv = "x," + column + "\n";
        for (const auto& [x, v] : rows)
            csv += format_double(x) + "," + format_double(v) + "\n";
        record.emit(g.out, csv);
    } else {
        nlohmann::json body = params;
        body.erase("global");
        body["column"] = column;
        body["values"] = nlohmann::json::array();
        for (const auto& [x, v] : rows)
            body["values"].push_back(v);
        body["self_similarity_deviation"] = deviation ? nlohmann::json(*deviation) : nlohmann::json(nullptr);
        record.emit(g.out, body.dump(2) + "\n");
    }
    record.finish(g.out);
    return 0;
}

void add_law_options(CLI::App* cmd, LawOptions& lo)
{
    cmd->add_option("--dist", lo.dist, "distribution descriptor as JSON, or @file");
    cmd->add_option("--alpha", lo.alpha, "tail index; alone it selects the long-range walk");
    cmd->add_flag("--repair", lo.repair, "convolve with the repairer of the fitted theta^2 coefficient");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lattice stable-walk expansions, LCLT rates and potential kernels"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.add_option("--tol", g.tol, "absolute quadrature tolerance (relative tolerance is 100x)");
    app.add_option("--out", g.out, "output path; a manifest is written beside it");
    app.add_option("--format", g.format, "csv or json");
    app.add_option("--threads", g.threads, "workers for grid fan-out")->check(CLI::PositiveNumber);
    app.add_flag("--seedless", g.seedless, "assert a randomness-free run (always true)");

    LawOptions lo;
    std::vector<double> candidates;
    FitOptions fit_options;
    auto* expand = app.add_subcommand("expand", "fit the characteristic-function expansion");
    add_law_options(expand, lo);
    expand->add_option("--candidates", candidates, "candidate correction exponents");
    expand->add_option("--theta-max", fit_options.theta_max, "largest grid point");
    expand->add_option("--points", fit_options.points, "grid size");

    std::string target = "pure";
    std::optional<std::string> n_text;
    std::optional<std::string> summary_path;
    auto* lclt = app.add_subcommand("lclt", "sup-norm LCLT errors and their rate");
    add_law_options(lclt, lo);
    lclt->add_option("--target", target, "pure or gauss");
    lclt->add_option("--n", n_text, "comma-separated step counts");
    lclt->add_option("--summary", summary_path, "write the JSON summary here");

    std::optional<std::string> x_text;
    long long x_max = 3200;
    auto* pk = app.add_subcommand("pk", "potential kernel and its asymptotic expansion");
    add_law_options(pk, lo);
    pk->add_option("--x", x_text, "comma-separated x values");
    pk->add_option("--xmax", x_max, "largest x of the grid 50 2^k");
    pk->add_option("--summary", summary_path, "write the constants JSON here");

    StableOptions so;
    auto* stable = app.add_subcommand("stable", "stable densities and u_j profiles");
    stable->add_option("--alpha", so.alpha, "index")->required();
    stable->add_option("--kappa", so.kappa, "scale kappa_alpha");
    stable->add_option("--gauss-kappa2", so.gauss_kappa2, "Gaussian part");
    stable->add_option("--n", so.n, "steps");
    stable->add_option("--x", so.x_text, "comma-separated integer x values");
    stable->add_option("--xmax", so.x_max, "largest x of the uniform grid");
    stable->add_option("--step", so.step, "grid spacing");
    stable->add_option("--uj", so.uj, "emit u_j for this j instead of the density");
    stable->add_flag("--self-similarity", so.self_similarity, "report max |p^n(x) - n^{-1/alpha} p^1(x n^{-1/alpha})|");

    auto* selftest = app.add_subcommand("selftest", "run the quick identity checks");

    cli::RunRecord::set_invocation(std::vector<std::string>(argv, argv + argc));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*expand)
            return run_expand(g, lo, candidates, fit_options);
        if (*lclt)
            return run_lclt(g, lo, target, n_text, summary_path);
        if (*pk)
            return run_pk(g, lo, x_text, x_max, summary_path);
        if (*stable)
            return run_stable(g, so);
        if (*selftest)
            return cli::run_selftest(std::cout) ? 0 : 2;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
