// Command-line front end. Every output embeds the configuration it was run with.
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "oscamp/config.hpp"
#include "oscamp/oscamp.hpp"

using namespace oscamp;
using R = mp_real;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep = ',')
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

/// "a,b,c" or "start:stop:count" (inclusive, evenly spaced).
std::vector<std::string> parse_grid(const std::string& text)
{
    auto parts = split(text, ':');
    if (parts.size() == 3 && text.find(',') == std::string::npos) {
        const R a = from_rational<R>(parse_rational(parts[0]));
        const R b = from_rational<R>(parse_rational(parts[1]));
        const int n = std::stoi(parts[2]);
        if (n < 1) throw invalid_argument_error("grid count must be positive");
        std::vector<std::string> out;
        for (int i = 0; i < n; ++i) out.push_back(full_string(R(n == 1 ? a : a + (b - a) * i / (n - 1))));
        return out;
    }
    auto items = split(text);
    if (items.empty()) throw invalid_argument_error("empty grid");
    return items;
}

R to_real(const std::string& s) { return from_rational<R>(parse_rational(s)); }

/// value +/- err rounded to the digits the error justifies.
std::string display(const R& value, const R& err)
{
    std::ostringstream os;
    const double e = to_double(err);
    const double v = to_double(value);
    int sig = 16;
    if (e > 0 && v != 0) {
        const double mag = std::floor(std::log10(std::fabs(v)));
        const double emag = std::floor(std::log10(e));
        sig = static_cast<int>(std::min(30.0, std::max(2.0, mag - emag + 1)));
    }
    os << std::setprecision(std::min(sig, 30)) << (sig > 16 ? value.str(sig) : [&] {
        std::ostringstream t;
        t << std::setprecision(sig) << v;
        return t.str();
    }()) << " ± " << std::setprecision(2) << e;
    return os.str();
}

json bv(const BoundedValue<R>& b)
{
    return json{{"value", full_string(b.value)}, {"err", full_string(b.err)}, {"certified", b.certified}};
}

json fourier_json(const FourierSummary<R>& f)
{
    json h = json::array();
    for (const auto& x : f.harmonics)
        h.push_back({{"n", x.n},
                     {"c_re", bv(x.c.re)},
                     {"c_im", bv(x.c.im)},
                     {"amplitude", bv(x.amplitude)},
                     {"phase", full_string(x.phase)}});
    return json{{"window_start", full_string(f.start)},
                {"period", full_string(f.period)},
                {"mean", bv(f.mean)},
                {"harmonics", h},
                {"sample_min", full_string(f.sample_min)},
                {"sample_max", full_string(f.sample_max)},
                {"max_pointwise_err", full_string(f.max_pointwise_err)}};
}

json envelope_json(const BoundedSeries<R>& s)
{
    json c = json::array();
    for (const auto& x : s.coeffs) c.push_back(full_string(x));
    json j{{"kind", s.kind == SeriesKind::taylor ? "taylor" : "laurent"},
           {"order", s.order},
           {"coefficients", c},
           {"positive", s.positive()}};
    if (s.envelope) {
        const auto& e = *s.envelope;
        j["envelope"] = {{"C", full_string(e.C)}, {"k", e.k}, {"x0", full_string(e.x0)}};
        if (e.certificate) {
            const auto& q = *e.certificate;
            j["envelope"]["certificate"] = {{"a", full_string(q.a)},         {"eps", full_string(q.eps)},
                                            {"anchor", full_string(q.anchor)}, {"margin", full_string(q.margin)},
                                            {"lhs", full_string(q.lhs)},       {"rhs", full_string(q.rhs)},
                                            {"contraction", full_string(q.contraction)}};
        }
    }
    return j;
}

struct Output
{
    const RunConfig& config;
    json extra;  // subcommand parameters

    json config_json() const
    {
        json c = config;
        for (auto it = extra.begin(); it != extra.end(); ++it) c[it.key()] = it.value();
        return c;
    }

    /// Writes data and returns the stream the summary line belongs on.
    std::ostream& write(const std::string& csv_header, const std::vector<std::vector<std::string>>& rows,
                        const json& result)
    {
        std::ostringstream body;
        if (config.format == "json") {
            json j{{"config", config_json()}, {"result", result}};
            body << j.dump(2) << '\n';
        } else {
            body << "# config: " << config_json().dump() << '\n' << csv_header << '\n';
            for (const auto& r : rows) {
                for (std::size_t i = 0; i < r.size(); ++i) body << (i ? "," : "") << r[i];
                body << '\n';
            }
        }
        if (config.output.empty()) {
            std::cout << body.str();
            std::cout.flush();
            return std::cerr;
        }
        std::ofstream out(config.output);
        if (!out) throw invalid_argument_error("cannot write output file '" + config.output + "'");
        out << body.str();
        return std::cout;
    }
};

int fail(const std::string& code, const std::string& message)
{
    json j{{"error", {{"code", code}, {"message", message}}}};
    std::cerr << j.dump() << std::endl;
    return 2;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Certified oscillatory amplitudes of hierarchical pinning models"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string weights, config_path, format, output;
    unsigned digits = 0;
    int g_order = 0, phi_order = 0, depth_phi = -1, depth_g = -1, samples = 0, harmonics = 0, threads = 0;
    app.add_option("--weights", weights, "offspring law p0,...,pd (decimals or fractions)");
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--digits", digits, "working precision in decimal digits (env OSCAMP_DIGITS)");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output", output, "output file (default stdout)");
    app.add_option("--g-order", g_order, "order of the g series");
    app.add_option("--phi-order", phi_order, "order of the phi series");
    app.add_option("--depth-phi", depth_phi, "backward refinements for phi");
    app.add_option("--depth-g", depth_g, "backward refinements for g^{-1}");
    app.add_option("--samples", samples, "grid points per period");
    app.add_option("--harmonics", harmonics, "number of Fourier harmonics");
    app.add_option("--threads", threads, "worker threads for sampling");

    auto* fe = app.add_subcommand("free-energy", "F(h) on a grid of h");
    std::string h_grid = "0.001,0.01,0.1,1";
    std::string tol_text;
    bool near_critical = false;
    fe->add_option("--h-grid", h_grid, "comma list or start:stop:count");
    fe->add_option("--tol", tol_text, "absolute tolerance (default 1e-(digits-20))");
    fe->add_flag("--near-critical", near_critical, "also evaluate the series route ell(delta(h))");

    auto* se = app.add_subcommand("series", "dump certified series and envelopes");
    bool dump = false;
    se->add_flag("--dump", dump, "print coefficients and envelopes as JSON");

    auto* om = app.add_subcommand("omega", "omega on its window, with mean and harmonics");
    auto* am = app.add_subcommand("amplitude", "Omega over one period: mean, harmonics, oscillation");

    auto* ha = app.add_subcommand("harris", "psi and the Harris function on a grid of s");
    std::string s_grid = "0.5,1,2,3";
    ha->add_option("--s-grid", s_grid, "comma list or start:stop:count");

    auto* si = app.add_subcommand("simulate", "Monte-Carlo Galton-Watson run");
    int gens = 20;
    long mc_samples = 100000;
    std::uint64_t seed = 0;
    std::string mgf_grid = "0.5,1";
    int shards = 64;
    si->add_option("--n", gens, "generations");
    si->add_option("--samples", mc_samples, "number of processes");
    si->add_option("--seed", seed, "seed");
    si->add_option("--s-grid", mgf_grid, "points s for E[exp(s W_n / w^n)]");
    si->add_option("--shards", shards, "independent substreams");

    auto* ju = app.add_subcommand("julia", "Julia-set points");
    std::string method = "boettcher";
    int points = 512, depth = 12, refinements = 3;
    ju->add_option("--method", method, "boettcher or preimage")->check(CLI::IsMember({"boettcher", "preimage"}));
    ju->add_option("--points", points, "number of parameters t in (-1, 1]");
    ju->add_option("--depth", depth, "preimage levels");
    ju->add_option("--refinements", refinements, "inverse-branch pullbacks for the Boettcher method");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail("usage", e.what());
    }

    try {
        RunConfig config;
        config.digits = digits_from_environment();
        if (!config_path.empty()) config = load_config(config_path);
        if (!weights.empty()) config.weights = split(weights);
        if (digits) config.digits = digits;
        if (!format.empty()) config.format = format;
        if (!output.empty()) config.output = output;
        if (g_order) config.g_order = g_order;
        if (phi_order) config.phi_order = phi_order;
        if (depth_phi >= 0) config.depth_phi = depth_phi;
        if (depth_g >= 0) config.depth_g = depth_g;
        if (samples) config.samples = samples;
        if (harmonics) config.harmonics = harmonics;
        if (threads) config.threads = threads;
        if (si->parsed() && si->count("--seed")) config.seed = seed;
        if (config.digits < 20 || config.digits > 2000) throw invalid_argument_error("digits must lie in [20, 2000]");

        precision_scope scope(config.digits);
        const auto map = config.map<R>();
        Output out{config, json::object()};
        auto engine = [&] { return std::make_unique<OscillationEngine<R>>(map, config.engine_options()); };

        if (fe->parsed()) {
            if (tol_text.empty()) tol_text = "1e-" + std::to_string(config.digits - 20);
            const R tol = to_real(tol_text);
            out.extra = {{"subcommand", "free-energy"}, {"h_grid", h_grid}, {"tol", tol_text}, {"near_critical", near_critical}};
            std::unique_ptr<OscillationEngine<R>> eng;
            if (near_critical) eng = engine();
            std::vector<std::vector<std::string>> rows;
            json result = json::array();
            BoundedValue<R> last{};
            for (const auto& h : parse_grid(h_grid)) {
                const R hv = to_real(h);
                auto F = free_energy(map, hv, tol);
                std::vector<std::string> row{h, full_string(F.value), full_string(F.err)};
                json item{{"h", h}, {"F", bv(F)}};
                if (eng) {
                    auto G = eng->free_energy_near_critical(hv);
                    row.push_back(full_string(G.value));
                    row.push_back(full_string(G.err));
                    item["F_near_critical"] = bv(G);
                }
                rows.push_back(row);
                result.push_back(item);
                last = F;
            }
            auto& s = out.write(eng ? "h,value,err,near_critical,near_critical_err" : "h,value,err", rows, result);
            s << "free-energy: " << rows.size() << " points, F(" << rows.back()[0] << ") = " << display(last.value, last.err) << '\n';
        } else if (se->parsed()) {
            (void)dump;
            out.extra = {{"subcommand", "series"}};
            auto eng = engine();
            json result{{"g", envelope_json(eng->g_series())},
                        {"g_inverse", envelope_json(eng->g_inverse_series())},
                        {"phi", envelope_json(eng->phi_series())},
                        {"omega_max_pointwise_err", full_string(eng->max_pointwise_error())}};
            RunConfig jc = config;
            jc.format = "json";
            Output jo{jc, out.extra};
            auto& s = jo.write("", {}, result);
            s << "series: g envelope C = " << to_double(eng->g_series().envelope->C) << ", g^-1 envelope C = "
              << to_double(eng->g_inverse_series().envelope->C)
              << ", phi envelope C = " << to_double(eng->phi_series().envelope->C) << '\n';
        } else if (om->parsed()) {
            out.extra = {{"subcommand", "omega"}};
            auto eng = engine();
            const auto& f = eng->omega_summary();
            auto smp = sample([&](const R& x) { return eng->omega(x); }, eng->window_start(), eng->log2(), config.samples,
                              config.threads);
            std::vector<std::vector<std::string>> rows;
            for (std::size_t i = 0; i < smp.size(); ++i)
                rows.push_back({full_string(smp.x[i]), full_string(smp.values[i].value), full_string(smp.values[i].err)});
            auto& s = out.write("x,value,err", rows, fourier_json(f));
            s << "omega: mean = " << display(f.mean.value, f.mean.err) << ", g1 = "
              << display(f.harmonics.at(0).amplitude.value, f.harmonics.at(0).amplitude.err)
              << ", max pointwise err = " << std::setprecision(3) << to_double(f.max_pointwise_err) << '\n';
        } else if (am->parsed()) {
            out.extra = {{"subcommand", "amplitude"}};
            auto eng = engine();
            const auto a = eng->amplitude(config.samples, config.harmonics);
            json result = fourier_json(a.fourier);
            result["oscillation"] = bv(a.oscillation);
            result["omega"] = fourier_json(eng->omega_summary());
            std::vector<std::vector<std::string>> rows;
            rows.push_back({"mean", full_string(a.fourier.mean.value), full_string(a.fourier.mean.err)});
            for (const auto& h : a.fourier.harmonics)
                rows.push_back({"g" + std::to_string(h.n), full_string(h.amplitude.value), full_string(h.amplitude.err)});
            rows.push_back({"oscillation", full_string(a.oscillation.value), full_string(a.oscillation.err)});
            auto& s = out.write("quantity,value,err", rows, result);
            s << "amplitude: mean = " << display(a.fourier.mean.value, a.fourier.mean.err) << ", g1 = "
              << display(a.fourier.harmonics.at(0).amplitude.value, a.fourier.harmonics.at(0).amplitude.err)
              << ", oscillation = " << display(a.oscillation.value, a.oscillation.err) << '\n';
        } else if (ha->parsed()) {
            out.extra = {{"subcommand", "harris"}, {"s_grid", s_grid}};
            auto eng = engine();
            std::vector<std::vector<std::string>> rows;
            json result = json::array();
            BoundedValue<R> lastL{};
            for (const auto& st : parse_grid(s_grid)) {
                const R s = to_real(st);
                auto pb = psi_boettcher(*eng, s);
                auto pd = psi_direct_converged(map, s, R(1e-30));
                auto L = harris_L(*eng, s);
                auto O = eng->Omega_at(log(s));
                rows.push_back({st, full_string(pb.value), full_string(pb.err), full_string(pd.value), full_string(pd.err),
                                full_string(L.value), full_string(L.err), full_string(O.value), full_string(O.err)});
                result.push_back({{"s", st}, {"psi", bv(pb)}, {"psi_direct", bv(pd)}, {"L", bv(L)}, {"Omega", bv(O)}});
                lastL = L;
            }
            auto& s = out.write("s,psi,psi_err,psi_direct,psi_direct_err,L,L_err,Omega,Omega_err", rows, result);
            s << "harris: " << rows.size() << " points, L(log " << rows.back()[0] << ") = " << display(lastL.value, lastL.err)
              << '\n';
        } else if (si->parsed()) {
            out.extra = {{"subcommand", "simulate"}, {"n", gens}, {"mc_samples", mc_samples}, {"s_grid", mgf_grid},
                         {"shards", shards}};
            std::vector<double> grid;
            for (const auto& x : split(mgf_grid)) grid.push_back(static_cast<double>(parse_rational(x)));
            SimulationOptions so;
            so.shards = shards;
            so.threads = config.threads;
            const auto run = simulate_gw(map, gens, mc_samples, config.seed, grid, so);
            auto fmt = [](double x) {
                std::ostringstream os;
                os << std::setprecision(17) << x;
                return os.str();
            };
            std::vector<std::vector<std::string>> rows;
            rows.push_back({"mean_W", fmt(run.mean_w), fmt(run.se_mean_w)});
            rows.push_back({"extinction", fmt(run.extinction), fmt(run.extinction_se)});
            json mgf = json::array();
            for (const auto& m : run.mgf) {
                rows.push_back({"mgf(" + fmt(m.s) + ")", fmt(m.value), fmt(m.se)});
                mgf.push_back({{"s", m.s}, {"value", m.value}, {"se", m.se}});
            }
            json result{{"mean_W", run.mean_w},      {"var_W", run.var_w},         {"se_mean_W", run.se_mean_w},
                        {"extinction", run.extinction}, {"extinction_se", run.extinction_se}, {"mgf", mgf},
                        {"samples", run.samples}};
            auto& s = out.write("quantity,value,se", rows, result);
            s << "simulate: E[W_n/w^n] = " << fmt(run.mean_w) << " ± " << std::setprecision(2) << run.se_mean_w
              << " (SE), extinction = " << std::setprecision(6) << run.extinction << " ± " << std::setprecision(2)
              << run.extinction_se << " (SE)\n";
        } else if (ju->parsed()) {
            out.extra = {{"subcommand", "julia"}, {"method", method}, {"points", points}, {"depth", depth},
                         {"refinements", refinements}};
            std::vector<std::vector<std::string>> rows;
            json result = json::array();
            auto fmt = [](double x) {
                std::ostringstream os;
                os << std::setprecision(17) << x;
                return os.str();
            };
            JuliaCloud cloud;
            if (method == "preimage") {
                cloud = julia_inverse_iteration(map, depth);
                for (const auto& z : cloud.points) {
                    rows.push_back({fmt(z.real()), fmt(z.imag())});
                    result.push_back({z.real(), z.imag()});
                }
            } else {
                auto eng = engine();
                JuliaOptions jo;
                jo.refinements = refinements;
                cloud = julia_boettcher(*eng, julia_grid(points), jo);
                for (std::size_t i = 0; i < cloud.points.size(); ++i) {
                    rows.push_back({fmt(cloud.t[i]), fmt(cloud.points[i].real()), fmt(cloud.points[i].imag())});
                    result.push_back({cloud.t[i], cloud.points[i].real(), cloud.points[i].imag()});
                }
            }
            auto& s = out.write(method == "preimage" ? "re,im" : "t,re,im", rows, result);
            s << "julia: " << cloud.points.size() << " points (" << method << ", not certified)\n";
        }
    } catch (const oscamp::error& e) {
        return fail(e.code(), e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
