#include "qes_spin/qes_spin.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace qes;

/// Bad flag combination found after parsing; exits with status 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string command;
    std::string model;
    std::map<std::string, std::optional<double>> params{
        {"delta", {}}, {"g", {}}, {"a", {}}, {"b", {}}, {"c", {}}, {"chi", {}}};
    int twice_j = -1;
    std::string sector = "all";
    std::string output = "-";
    std::string format;
    Tolerances tol;

    std::string source = "engine";
    bool oracle = false;
    bool x_roots = false;

    std::string param;
    double from = 0.0, to = 0.0;
    int count = 0;
    std::optional<double> coupled_sum, fidelity_delta, step;
    int pairs = 4;
    double degeneracy_tol = 1e-3;
    unsigned threads = 0;

    int extra = 0;
};

const std::map<std::string, std::vector<std::string>> kModelParams{
    {"lmg", {"delta", "g"}}, {"rotor", {"a", "b", "c"}}, {"two-axis", {"chi"}}};

void add_common(CLI::App* sub, Config& cfg) {
    sub->add_option("--model", cfg.model, "lmg, rotor or two-axis")
        ->required()
        ->check(CLI::IsMember({"lmg", "rotor", "two-axis"}));
    sub->add_option("--twice-j", cfg.twice_j, "2j, a non-negative integer")->required()->check(CLI::NonNegativeNumber);
    for (auto& [name, value] : cfg.params) sub->add_option("--" + name, value, "model parameter " + name);
    sub->add_option("--output,-o", cfg.output, "output path, '-' for stdout");
    sub->add_option("--format", cfg.format, "csv or json; default from the output extension")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol-spectrum", cfg.tol.spectrum)->check(CLI::PositiveNumber);
    sub->add_option("--tol-bae", cfg.tol.bae)->check(CLI::PositiveNumber);
    sub->add_option("--tol-collide", cfg.tol.collide)->check(CLI::PositiveNumber);
    sub->add_option("--tol-leading", cfg.tol.leading)->check(CLI::PositiveNumber);
    sub->add_option("--tol-roundtrip", cfg.tol.roundtrip)->check(CLI::PositiveNumber);
}

void add_sector(CLI::App* sub, Config& cfg) {
    sub->add_option("--sector", cfg.sector, "all, even or odd")->check(CLI::IsMember({"all", "even", "odd"}));
}

/// Model from flags; names in `free` are supplied later by a scan.
ModelParams build_model(const Config& cfg, const std::set<std::string>& free = {}) {
    const auto& wanted = kModelParams.at(cfg.model);
    for (const auto& [name, value] : cfg.params) {
        const bool used = std::find(wanted.begin(), wanted.end(), name) != wanted.end();
        if (value && !used) throw ConfigError("--" + name + " does not apply to model " + cfg.model);
        if (!value && used && !free.count(name)) throw ConfigError("model " + cfg.model + " needs --" + name);
    }
    auto get = [&](const char* n) { return cfg.params.at(n).value_or(0.0); };
    if (cfg.model == "lmg") return Lmg{get("delta"), get("g")};
    if (cfg.model == "rotor") return Rotor{get("a"), get("b"), get("c")};
    return TwoAxis{get("chi")};
}

Json model_json(const ModelParams& m) {
    Json j;
    j["name"] = model_name(m);
    if (auto* l = std::get_if<Lmg>(&m)) {
        j["delta"] = json_number(l->delta);
        j["g"] = json_number(l->g);
    } else if (auto* r = std::get_if<Rotor>(&m)) {
        j["a"] = json_number(r->a);
        j["b"] = json_number(r->b);
        j["c"] = json_number(r->c);
    } else {
        j["chi"] = json_number(std::get<TwoAxis>(m).chi);
    }
    return j;
}

Json tolerance_json(const Tolerances& t) {
    Json j;
    j["spectrum"] = json_number(t.spectrum);
    j["bae"] = json_number(t.bae);
    j["collide"] = json_number(t.collide);
    j["leading"] = json_number(t.leading);
    j["roundtrip"] = json_number(t.roundtrip);
    return j;
}

Json base_metadata(const Config& cfg, const ModelParams& m) {
    Json meta = make_metadata(cfg.command);
    Json params;
    params["model"] = model_json(m);
    params["twice_j"] = cfg.twice_j;
    meta["parameters"] = params;
    meta["tolerances"] = tolerance_json(cfg.tol);
    return meta;
}

const char* parity_name(int p) { return p == 0 ? "even" : "odd"; }

bool sector_selected(const Config& cfg, int p) {
    return cfg.sector == "all" || (cfg.sector == "even") == (p == 0);
}

/// Engine levels of all sectors merged in (energy, parity) order.
struct Level {
    const QesSolution* sol;
    const OdeOperator* op;
};

std::vector<Level> merged_levels(const std::vector<SectorSolutions>& all) {
    std::vector<Level> out;
    for (const auto& ss : all)
        for (const auto& lv : ss.levels) out.push_back({&lv, &ss.op});
    std::stable_sort(out.begin(), out.end(), [](const Level& a, const Level& b) {
        if (a.sol->energy.real() != b.sol->energy.real()) return a.sol->energy.real() < b.sol->energy.real();
        return a.sol->sector.p < b.sol->sector.p;
    });
    return out;
}

Table cmd_spectrum(const Config& cfg) {
    const ModelParams m = build_model(cfg);
    const SpinLabel label(cfg.twice_j);
    const std::string source = cfg.oracle ? "oracle" : cfg.source;
    Table t;
    t.metadata = base_metadata(cfg, m);
    t.metadata["parameters"]["source"] = source;
    t.metadata["parameters"]["sector"] = cfg.sector;
    t.columns = {"index", "energy", "parity", "source"};

    auto emit = [&](const std::string& src, std::vector<std::pair<double, int>> levels) {
        std::stable_sort(levels.begin(), levels.end());
        std::int64_t idx = 0;
        for (const auto& [e, p] : levels)
            if (sector_selected(cfg, p)) t.rows.push_back({idx++, e, std::string(parity_name(p)), src});
    };
    if (source == "engine" || source == "all") {
        const auto all = solve_all_sectors(to_spec(m, label), label, cfg.tol);
        std::vector<std::pair<double, int>> lv;
        for (const auto& l : merged_levels(all)) lv.emplace_back(l.sol->energy.real(), l.sol->sector.p);
        emit("engine", lv);
    }
    if (source == "oracle" || source == "all") {
        validate(m);
        const SpectrumResult r = oracle_spectrum(m, label);
        std::vector<std::pair<double, int>> lv;
        for (int i = 0; i < r.energies.size(); ++i)
            lv.emplace_back(r.energies(i), r.parity_tags[i] == Parity::even ? 0 : 1);
        emit("oracle", lv);
    }
    if (source == "recursion" || source == "all") {
        const CriticalZeros cz = critical_zeros(m, label);
        if (cz.complex_zero) throw Error("recursion produced a complex zero for a Hermitian model");
        std::vector<std::pair<double, int>> lv;
        for (const auto& e : cz.even_sector) lv.emplace_back(e.real(), 0);
        for (const auto& e : cz.odd_sector) lv.emplace_back(e.real(), 1);
        emit("recursion", lv);
    }
    return t;
}

Table cmd_roots(const Config& cfg) {
    const ModelParams m = build_model(cfg);
    const SpinLabel label(cfg.twice_j);
    const auto all = solve_all_sectors(to_spec(m, label), label, cfg.tol);
    Table t;
    t.metadata = base_metadata(cfg, m);
    t.metadata["parameters"]["sector"] = cfg.sector;
    t.metadata["bae_relative_scale"] = "sum over terms of |coefficient| |x|^d i! e_{i-1}(|w|)";
    t.columns = {"level", "parity", "energy", "root_index", "root_re", "root_im", "bae_residual", "bae_relative",
                 "bae_applicable"};
    std::int64_t level = 0;
    for (const auto& l : merged_levels(all)) {
        const QesSolution& s = *l.sol;
        if (sector_selected(cfg, s.sector.p)) {
            std::int64_t r = 0;
            for (const auto& x : s.bethe_roots)
                t.rows.push_back({level, std::string(parity_name(s.sector.p)), s.energy.real(), r++, x.real(),
                                  x.imag(), s.bae_residual, s.bae_relative,
                                  std::string(s.bae_applicable ? "true" : "false")});
        }
        ++level;
    }
    return t;
}

Table cmd_sphere(const Config& cfg) {
    const ModelParams m = build_model(cfg);
    const SpinLabel label(cfg.twice_j);
    const auto all = solve_all_sectors(to_spec(m, label), label, cfg.tol);
    Table t;
    t.metadata = base_metadata(cfg, m);
    t.metadata["parameters"]["sector"] = cfg.sector;
    t.metadata["points"] = cfg.x_roots ? "x_roots" : "z_zeros";
    t.metadata["projection"] = "(2 Re z, 2 Im z, |z|^2 - 1) / (|z|^2 + 1), origin at the south pole";
    t.columns = {"level", "parity", "energy", "point_index", "zero_re", "zero_im", "X", "Y", "Z"};
    std::int64_t level = 0;
    for (const auto& l : merged_levels(all)) {
        const QesSolution& s = *l.sol;
        if (sector_selected(cfg, s.sector.p)) {
            const auto& src = cfg.x_roots ? s.bethe_roots : s.z_zeros;
            const auto pts = constellation(s, cfg.x_roots);
            for (std::size_t i = 0; i < pts.size(); ++i)
                t.rows.push_back({level, std::string(parity_name(s.sector.p)), s.energy.real(),
                                  static_cast<std::int64_t>(i), src[i].real(), src[i].imag(), pts[i].x, pts[i].y,
                                  pts[i].z});
        }
        ++level;
    }
    return t;
}

Table cmd_scan(const Config& cfg) {
    std::set<std::string> free{cfg.param};
    if (cfg.coupled_sum) {
        if (cfg.model != "lmg") throw ConfigError("--coupled-sum applies to lmg only");
        free.insert(cfg.param == "g" ? "delta" : "g");
    }
    const auto& names = kModelParams.at(cfg.model);
    if (std::find(names.begin(), names.end(), cfg.param) == names.end())
        throw ConfigError("model " + cfg.model + " has no parameter '" + cfg.param + "'");
    const ModelParams base = build_model(cfg, free);
    const SpinLabel label(cfg.twice_j);
    const ModelFamily fam{base, cfg.param, cfg.coupled_sum};
    const auto grid = linspace(cfg.from, cfg.to, cfg.count);

    ScanOptions opt;
    opt.delta = cfg.fidelity_delta;
    opt.h = cfg.step;
    opt.gap_pairs = cfg.pairs;
    opt.degeneracy_tol = cfg.degeneracy_tol;
    opt.threads = cfg.threads;
    const auto rows = scan(fam, label, grid, opt);

    const double span = grid.back() - grid.front();
    Table t;
    t.metadata = base_metadata(cfg, base);
    Json g;
    g["param"] = cfg.param;
    g["from"] = json_number(cfg.from);
    g["to"] = json_number(cfg.to);
    g["count"] = cfg.count;
    if (cfg.coupled_sum) g["coupled_sum"] = json_number(*cfg.coupled_sum);
    t.metadata["parameters"]["grid"] = g;
    for (const auto& f : free) t.metadata["parameters"]["model"].erase(f);
    t.metadata["fidelity"] = "|<psi0(v - delta)|psi0(v + delta)>|, points clamped to the grid range";
    t.metadata["fidelity_delta"] = json_number(cfg.fidelity_delta.value_or(span / (cfg.count - 1) / 2.0));
    t.metadata["derivative_step"] = json_number(cfg.step.value_or(1e-3 * span));
    t.metadata["ground_state_rule"] =
        "lowest even level when |E0(even) - E0(odd)| <= degeneracy_tol * h_norm, else lowest level";
    t.metadata["degeneracy_tol"] = json_number(cfg.degeneracy_tol);
    t.metadata["gap_pairs"] = cfg.pairs;
    t.columns = {"param", "ground_energy", "fidelity", "d1", "d2", "min_parity_gap", "lowest_parity_gap", "h_norm",
                 "ground_parity"};
    for (const auto& r : rows)
        t.rows.push_back({r.param, r.ground_energy, r.fidelity, r.d1, r.d2, r.min_parity_gap, r.lowest_parity_gap,
                          r.h_norm, std::string(to_string(r.ground_parity))});
    return t;
}

Table cmd_recursion(const Config& cfg) {
    const ModelParams m = build_model(cfg);
    const SpinLabel label(cfg.twice_j);
    const int lmax = label.twice_j + 2 + 2 * cfg.extra;
    const auto polys = generate_polys(m, label, lmax);
    const CriticalZeros cz = critical_zeros(m, label);
    Table t;
    t.metadata = base_metadata(cfg, m);
    t.metadata["parameters"]["l_max"] = lmax;
    t.metadata["coefficient_convention"] = "P_l(E) = exp(log_scale) * sum_power (re + i im) E^power";
    if (cfg.extra > 0) t.metadata["factorization_remainder"] = json_number(factorization_check(m, label, cfg.extra));
    t.metadata["complex_zero"] = cz.complex_zero;
    t.columns = {"record", "index_l", "parity", "power", "re", "im", "log_scale"};
    for (const auto& p : polys)
        for (std::size_t i = 0; i < p.coeffs.size(); ++i)
            t.rows.push_back({std::string("coefficient"), static_cast<std::int64_t>(p.index_l),
                              std::string(to_string(p.parity)), static_cast<std::int64_t>(i), p.coeffs[i].real(),
                              p.coeffs[i].imag(), p.log_scale});
    const auto pair = critical_pair(m, label);
    auto zeros = [&](const std::vector<cplx>& z, const EnergyPolynomial& P, const char* par) {
        for (std::size_t i = 0; i < z.size(); ++i)
            t.rows.push_back({std::string("zero"), static_cast<std::int64_t>(P.index_l), std::string(par),
                              static_cast<std::int64_t>(i), z[i].real(), z[i].imag(), 0.0});
    };
    zeros(cz.even_sector, pair.p_even_sector, "even");
    zeros(cz.odd_sector, pair.p_odd_sector, "odd");
    return t;
}

Table cmd_verify(const Config& cfg, bool& failed) {
    const ModelParams m = build_model(cfg);
    VerifyOptions opt;
    opt.tol = cfg.tol;
    const VerifyReport rep = run_verify(m, SpinLabel(cfg.twice_j), opt);
    failed = !rep.passed();
    Table t;
    t.metadata = base_metadata(cfg, m);
    t.metadata["passed"] = !failed;
    t.columns = {"check", "status", "value", "threshold", "detail"};
    for (const auto& c : rep.checks)
        t.rows.push_back({c.name, std::string(to_string(c.status)), c.value, c.threshold, c.detail});
    return t;
}

} // namespace

int main(int argc, char** argv) {
    Config cfg;
    CLI::App app{"Quasi-exactly solvable spin models: spectra, Bethe roots and scans"};
    app.require_subcommand(1);

    auto* spectrum = app.add_subcommand("spectrum", "energies from the engine, oracle or recursion");
    add_common(spectrum, cfg);
    add_sector(spectrum, cfg);
    spectrum->add_option("--source", cfg.source, "engine, oracle, recursion or all")
        ->check(CLI::IsMember({"engine", "oracle", "recursion", "all"}));
    spectrum->add_flag("--oracle", cfg.oracle, "same as --source oracle");

    auto* roots = app.add_subcommand("roots", "Bethe roots and BAE residuals per level");
    add_common(roots, cfg);
    add_sector(roots, cfg);

    auto* sphere = app.add_subcommand("sphere", "Majorana constellations on the unit sphere");
    add_common(sphere, cfg);
    add_sector(sphere, cfg);
    sphere->add_flag("--x-roots", cfg.x_roots, "project the x-plane Bethe roots instead of the z-plane zeros");

    auto* scanc = app.add_subcommand("scan", "ground-state fidelity, derivatives and parity gaps over a grid");
    add_common(scanc, cfg);
    scanc->add_option("--param", cfg.param, "scanned parameter")->required();
    scanc->add_option("--from", cfg.from)->required();
    scanc->add_option("--to", cfg.to)->required();
    scanc->add_option("--count", cfg.count)->required()->check(CLI::Range(2, 1000000));
    scanc->add_option("--coupled-sum", cfg.coupled_sum, "lmg only: keep delta + g at this value");
    scanc->add_option("--fidelity-delta", cfg.fidelity_delta, "fidelity half-separation")->check(CLI::PositiveNumber);
    scanc->add_option("--step", cfg.step, "finite-difference step")->check(CLI::PositiveNumber);
    scanc->add_option("--pairs", cfg.pairs, "even/odd level pairs in min_parity_gap")->check(CLI::PositiveNumber);
    scanc->add_option("--degeneracy-tol", cfg.degeneracy_tol, "relative even/odd tie threshold")
        ->check(CLI::PositiveNumber);
    scanc->add_option("--threads", cfg.threads, "worker count; default QES_SPIN_THREADS or the core count");

    auto* rec = app.add_subcommand("recursion", "energy polynomials P_l(E) and their critical zeros");
    add_common(rec, cfg);
    rec->add_option("--extra", cfg.extra, "additional steps of 2 past P_{2j+2}")->check(CLI::NonNegativeNumber);

    auto* ver = app.add_subcommand("verify", "cross-oracle invariant suite; exit 3 on any failure");
    add_common(ver, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        if (cfg.sector != "all" && cfg.command != "spectrum" && cfg.command != "roots" && cfg.command != "sphere")
            throw ConfigError("--sector applies to spectrum, roots and sphere");
        const Format fmt = cfg.format.empty() ? format_for_path(cfg.output)
                                              : (cfg.format == "json" ? Format::json : Format::csv);
        bool failed = false;
        Table t;
        if (cfg.command == "spectrum") t = cmd_spectrum(cfg);
        else if (cfg.command == "roots") t = cmd_roots(cfg);
        else if (cfg.command == "sphere") t = cmd_sphere(cfg);
        else if (cfg.command == "scan") t = cmd_scan(cfg);
        else if (cfg.command == "recursion") t = cmd_recursion(cfg);
        else t = cmd_verify(cfg, failed);
        write_table(cfg.output, t, fmt);
        if (failed) {
            std::cerr << "verify: invariant violation\n";
            return 3;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ParamError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const GridError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const Unsupported& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
