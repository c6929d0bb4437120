#include "scenario.hpp"

#include "wpk/field_io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace wpk::cli {
namespace {

namespace pt = boost::property_tree;

double to_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v))
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": '" + text + "'");
    }
}

long long to_int(const std::string& key, const std::string& text) {
    double v = to_double(key, text);
    if (v != std::floor(v))
        throw ConfigError("expected an integer for " + key + ": '" + text + "'");
    return static_cast<long long>(v);
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(to_double(key, item));
    return out;
}

// "6,6; 8,4"
std::vector<std::pair<double, double>> to_pairs(const std::string& key, const std::string& text) {
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        auto v = to_list(key, item);
        if (v.size() != 2)
            throw ConfigError("expected q,r pairs for " + key + ": '" + text + "'");
        out.emplace_back(v[0], v[1]);
    }
    return out;
}

std::string trim(std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

} // namespace

Potential Scenario::make_potential() const {
    try {
        return builtin(potential, potential_params);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

SearchParams Scenario::search() const {
    SearchParams sp;
    sp.delta0 = delta0;
    sp.lambda_ladder = lambda_ladder;
    sp.t_stride = t_stride;
    sp.evolve = {evolve.dt, 1};
    sp.max_evals = max_evals;
    sp.refine_passes = refine_passes;
    return sp;
}

Scenario load_scenario(const std::filesystem::path& path) {
    Scenario s;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("cannot read config: " + std::string(e.what()));
    }
    const std::set<std::string> sections{"potential", "grid", "evolve", "search", "output"};
    bool has_dx = false;
    for (const auto& [name, section] : tree) {
        if (!sections.count(name))
            throw ConfigError("unknown config section [" + name + "]");
        for (const auto& [k, node] : section) {
            std::string key = name + "." + k;
            std::string v = trim(node.get_value<std::string>());
            if (name == "potential") {
                if (k == "label")
                    s.potential = v;
                else
                    s.potential_params[k] = to_double(key, v);
            } else if (name == "grid") {
                if (k == "n") {
                    auto n = to_int(key, v);
                    if (n < 16)
                        throw ConfigError("grid.n must be at least 16");
                    s.n = static_cast<std::size_t>(n);
                } else if (k == "x_min")
                    s.x_min = to_double(key, v);
                else if (k == "dx") {
                    s.dx = to_double(key, v);
                    has_dx = true;
                } else
                    throw ConfigError("unknown key " + key);
            } else if (name == "evolve") {
                if (k == "dt")
                    s.evolve.dt = to_double(key, v);
                else if (k == "record_stride")
                    s.evolve.record_stride = static_cast<int>(to_int(key, v));
                else if (k == "t_start")
                    s.t_start = to_double(key, v);
                else if (k == "t_end")
                    s.t_end = to_double(key, v);
                else if (k == "norms")
                    s.norm_pairs = to_pairs(key, v);
                else
                    throw ConfigError("unknown key " + key);
            } else if (name == "search") {
                if (k == "delta0")
                    s.delta0 = to_double(key, v);
                else if (k == "lambda_ladder")
                    s.lambda_ladder = to_list(key, v);
                else if (k == "t_stride")
                    s.t_stride = to_double(key, v);
                else if (k == "max_evals")
                    s.max_evals = static_cast<std::size_t>(std::max(0LL, to_int(key, v)));
                else if (k == "refine_passes")
                    s.refine_passes = static_cast<int>(to_int(key, v));
                else if (k == "max_bubbles")
                    s.max_bubbles = static_cast<int>(to_int(key, v));
                else if (k == "stop_threshold")
                    s.stop_threshold = to_double(key, v);
                else if (k == "hls_constant")
                    s.hls_constant = to_double(key, v);
                else
                    throw ConfigError("unknown key " + key);
            } else {
                if (k == "dir")
                    s.out_dir = v;
                else
                    throw ConfigError("unknown key " + key);
            }
        }
    }
    // without dx the box is [x_min, -x_min)
    if (!has_dx)
        s.dx = -2.0 * s.x_min / static_cast<double>(s.n);
    return s;
}

void validate(const Scenario& s) {
    auto p = s.make_potential();
    if (!(s.dx > 0.0))
        throw ConfigError("grid.dx must be positive");
    if (!(s.delta0 > 0.0 && s.delta0 <= 1.0))
        throw ConfigError("search.delta0 must lie in (0, 1]");
    if (s.potential == "harmonic") {
        double omega = p.params().at("omega");
        if (s.delta0 >= std::numbers::pi / (2.0 * std::abs(omega)))
            throw ConfigError("harmonic scenario requires delta0 < pi / (2 omega)");
    }
    if (s.evolve.record_stride < 1)
        throw ConfigError("evolve.record_stride must be at least 1");
    if (!(s.t_end > s.t_start))
        throw ConfigError("evolve.t_end must exceed evolve.t_start");
    for (double l : s.lambda_ladder)
        if (!(l > 0.0 && l <= 1.0))
            throw ConfigError("search.lambda_ladder entries must lie in (0, 1]");
    if (s.max_bubbles < 1)
        throw ConfigError("search.max_bubbles must be at least 1");
}

nlohmann::json to_json(const Scenario& s) {
    nlohmann::json j;
    auto p = s.make_potential();
    j["potential"]["label"] = s.potential;
    j["potential"]["params"] = nlohmann::json::object();
    for (const auto& [k, v] : p.params())
        j["potential"]["params"][k] = v;
    j["grid"] = {{"n", s.n}, {"x_min", s.x_min}, {"dx", s.dx}};
    nlohmann::json norms = nlohmann::json::array();
    for (const auto& [q, r] : s.norm_pairs)
        norms.push_back({q, r});
    j["evolve"] = {{"dt", s.evolve.dt},
                   {"record_stride", s.evolve.record_stride},
                   {"t_start", s.t_start},
                   {"t_end", s.t_end},
                   {"norms", norms}};
    j["search"] = {{"delta0", s.delta0},
                   {"lambda_ladder", s.lambda_ladder.empty() ? default_lambda_ladder(s.grid()) : s.lambda_ladder},
                   {"t_stride", s.t_stride > 0.0 ? s.t_stride : s.delta0 / 64.0},
                   {"max_evals", s.max_evals},
                   {"refine_passes", s.refine_passes},
                   {"max_bubbles", s.max_bubbles},
                   {"stop_threshold", s.stop_threshold},
                   {"hls_constant", s.hls_constant}};
    j["output"] = {{"dir", s.out_dir.string()}};
    j["seed"] = s.seed;
    return j;
}

nlohmann::json report_header(const std::string& command, const Scenario& s) {
    return {{"format_version", kFormatVersion}, {"command", command}, {"scenario", to_json(s)}};
}

ComplexField load_input(const std::filesystem::path& path, const Scenario& s) {
    ComplexField f = [&] {
        try {
            return load_field(path);
        } catch (const FormatError& e) {
            throw ConfigError("cannot load input " + path.string() + ": " + e.what());
        }
    }();
    const auto& g = f.grid();
    auto want = s.grid();
    if (g.n() != want.n() || std::abs(g.x_min() - want.x_min()) > 1e-12 * std::max(1.0, std::abs(want.x_min())) ||
        std::abs(g.dx() - want.dx()) > 1e-12 * want.dx())
        throw ConfigError("input grid does not match the scenario grid");
    return f;
}

void check_boundary(const ComplexField& f, const std::string& what) {
    double b = boundary_amplitude(f);
    if (b > 1e-8) {
        std::ostringstream os;
        os << what << ": boundary amplitude " << b << " exceeds 1e-8";
        throw ValidityError(os.str());
    }
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os)
        throw ConfigError("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

} // namespace wpk::cli
