#include "commands.hpp"

#include "wpk/concentration.hpp"
#include "wpk/field_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace wpk::cli {
namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os)
        throw ConfigError("cannot write " + path.string());
    os << std::setprecision(17);
    return os;
}

std::filesystem::path out_dir(const Scenario& s) {
    std::error_code ec;
    std::filesystem::create_directories(s.out_dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + s.out_dir.string() + ": " + ec.message());
    return s.out_dir;
}

nlohmann::json bubble_json(const Bubble& b) {
    return {{"lambda", b.lambda},
            {"t0", b.t0},
            {"x0", b.x0},
            {"xi0", b.xi0},
            {"correlation_re", b.correlation.real()},
            {"correlation_im", b.correlation.imag()},
            {"abs", b.abs_correlation},
            {"budget_exceeded", b.budget_exceeded},
            {"evaluations", b.evaluations}};
}

} // namespace

void cmd_evolve(const Scenario& s, const std::filesystem::path& input) {
    auto f = load_input(input, s);
    check_boundary(f, "input");
    auto p = s.make_potential();
    auto dir = out_dir(s);

    auto start = s.t_start == 0.0 ? f : evolve(p, f, 0.0, s.t_start, s.evolve);
    auto u = evolve_record(p, start, s.t_start, s.t_end, s.evolve);
    save_spacetime(u, dir / "slices");

    double m0 = mass(f), drift = 0.0, boundary = 0.0;
    auto mc = open_csv(dir / "mass.csv");
    mc << "t,mass,boundary\n";
    for (std::size_t k = 0; k < u.size(); ++k) {
        double m = mass(u.slices()[k]), b = boundary_amplitude(u.slices()[k]);
        drift = std::max(drift, m0 > 0.0 ? std::abs(m - m0) / m0 : 0.0);
        boundary = std::max(boundary, b);
        mc << u.times()[k] << ',' << m << ',' << b << '\n';
    }

    auto nc = open_csv(dir / "norms.csv");
    nc << "q,r,admissible,norm\n";
    nlohmann::json norms = nlohmann::json::array();
    for (const auto& [q, r] : s.norm_pairs) {
        double n = mixed_norm(u, q, r);
        nc << q << ',' << r << ',' << (is_admissible(q, r) ? 1 : 0) << ',' << n << '\n';
        norms.push_back({{"q", q}, {"r", r}, {"admissible", is_admissible(q, r)}, {"norm", n}});
    }

    auto report = report_header("evolve", s);
    report["input"] = input.string();
    report["result"] = {{"slices", u.size()},
                        {"initial_mass", m0},
                        {"max_relative_mass_drift", drift},
                        {"max_boundary_amplitude", boundary},
                        {"norms", norms}};
    write_json(report, dir / "evolve.json");
    if (boundary > 1e-8)
        throw ValidityError("evolution reaches the box edge: boundary amplitude " + std::to_string(boundary));
}

void cmd_detect(const Scenario& s, const std::filesystem::path& input) {
    auto f = load_input(input, s);
    check_boundary(f, "input");
    auto p = s.make_potential();
    auto dir = out_dir(s);
    auto b = detect_bubble(p, f, s.search());
    auto eps = strichartz_check(p, f, -s.delta0, s.delta0, 6.0, 6.0, {s.evolve.dt, 1});
    auto report = report_header("detect", s);
    report["input"] = input.string();
    auto r = bubble_json(b);
    r["epsilon_L6"] = eps.norm;
    r["mass"] = mass(f);
    report["result"] = r;
    write_json(report, dir / "detect.json");
}

void cmd_decompose(const Scenario& s, const std::filesystem::path& input) {
    auto f = load_input(input, s);
    check_boundary(f, "input");
    auto p = s.make_potential();
    auto dir = out_dir(s);
    DecomposeParams dp;
    dp.max_bubbles = s.max_bubbles;
    dp.stop_threshold = s.stop_threshold;
    dp.search = s.search();
    auto d = iterate_decomposition(p, f, dp);

    auto lc = open_csv(dir / "ledger.csv");
    lc << "j,lambda,t0,x0,xi0,abs,g_mass,remainder_mass,decoupling_residual\n";
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t j = 0; j < d.bubbles.size(); ++j) {
        const auto& b = d.bubbles[j];
        lc << j << ',' << b.lambda << ',' << b.t0 << ',' << b.x0 << ',' << b.xi0 << ',' << b.abs_correlation << ','
           << d.g_mass[j] << ',' << d.remainders_mass[j] << ',' << d.decoupling_residuals[j] << '\n';
        auto r = bubble_json(b);
        r["g_mass"] = d.g_mass[j];
        r["remainder_mass"] = d.remainders_mass[j];
        r["decoupling_residual"] = d.decoupling_residuals[j];
        r["profile_norm"] = lp_norm(d.profiles[j], 2.0);
        rows.push_back(r);
    }
    auto report = report_header("decompose", s);
    report["input"] = input.string();
    report["result"] = {{"bubbles", rows},
                        {"initial_mass", d.initial_mass},
                        {"final_remainder_mass", d.remainders_mass.empty() ? d.initial_mass : d.remainders_mass.back()},
                        {"ledger_residual", d.ledger_residual},
                        {"budget_exceeded", d.budget_exceeded}};
    write_json(report, dir / "decompose.json");
}

void cmd_hls(const Scenario& s, const std::filesystem::path& input, double q, double r) {
    if (!(q > 2.0) || !std::isfinite(q))
        throw ConfigError("hls requires 2 < q < inf");
    if (r == 0.0) {
        if (!(q > 4.0))
            throw ConfigError("no admissible r for q <= 4; pass --r");
        r = 2.0 * q / (q - 4.0);
    }
    auto f = load_input(input, s);
    check_boundary(f, "input");
    auto p = s.make_potential();
    auto dir = out_dir(s);
    LocateParams lp;
    lp.delta0 = s.delta0;
    lp.constant = s.hls_constant;
    lp.evolve = {s.evolve.dt, 1};
    auto res = locate_interval(p, f, q, r, lp);
    auto report = report_header("hls", s);
    report["input"] = input.string();
    report["result"] = {{"q", q},
                        {"r", r},
                        {"admissible", res.admissible},
                        {"t_start", res.interval.t_start},
                        {"t_end", res.interval.t_end},
                        {"t_center", res.interval.t_center()},
                        {"half_length", res.interval.half_length()},
                        {"score", res.interval.score},
                        {"epsilon", res.epsilon},
                        {"lhs", res.lhs},
                        {"rhs", res.rhs},
                        {"ratio", res.ratio},
                        {"passed", res.passed}};
    write_json(report, dir / "hls.json");
}

void cmd_kernel(const Scenario& s, const std::filesystem::path& quads) {
    std::ifstream is(quads);
    if (!is)
        throw ConfigError("cannot read quadruple list " + quads.string());
    std::vector<std::array<PhasePoint, 4>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line.rfind("x1", 0) == 0)
            continue;
        std::stringstream ss(line);
        std::vector<double> v;
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                v.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ConfigError("bad number on line " + std::to_string(lineno) + " of " + quads.string());
            }
        }
        if (v.size() != 8)
            throw ConfigError("line " + std::to_string(lineno) + " needs 8 values");
        rows.push_back({PhasePoint{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}});
    }
    auto p = s.make_potential();
    auto dir = out_dir(s);
    KernelParams kp;
    kp.delta0 = s.delta0;
    kp.evolve = {s.evolve.dt, s.evolve.record_stride};
    auto oc = open_csv(dir / "kernel.csv");
    oc << "x1,xi1,x2,xi2,x3,xi3,x4,xi4,K\n";
    nlohmann::json out = nlohmann::json::array();
    for (const auto& z : rows) {
        double k = kernel_K(p, z, s.grid(), kp);
        nlohmann::json zs = nlohmann::json::array();
        for (const auto& zz : z) {
            oc << zz.x << ',' << zz.xi << ',';
            zs.push_back({zz.x, zz.xi});
        }
        oc << k << '\n';
        out.push_back({{"z", zs}, {"K", k}});
    }
    auto report = report_header("kernel", s);
    report["input"] = quads.string();
    report["result"] = out;
    write_json(report, dir / "kernel.json");
}

} // namespace wpk::cli
