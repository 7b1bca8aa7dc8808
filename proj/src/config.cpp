#include "subfourier/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "subfourier/csv.hpp"
#include "subfourier/errors.hpp"

namespace subfourier {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
    throw ConfigError(key + ": expected " + want + ", got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& text) {
    const auto v = trim(text);
    // "pi" and "2pi" keep phases exact in hand-written configs.
    if (v == "pi") return std::numbers::pi;
    if (v == "2pi") return two_pi;
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, text, "a number");
    return out;
}

long long parse_integer(const std::string& key, const std::string& text) {
    const auto v = trim(text);
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, text, "an integer");
    return out;
}

int parse_int(const std::string& key, const std::string& text) {
    const auto v = parse_integer(key, text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        bad_value(key, text, "an int");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
    const auto v = trim(text);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, text, "true or false");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty()) items.push_back(trim(item));
    return items;
}

template <class T, class F>
std::string join(const std::vector<T>& values, F format) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format(values[i]);
    }
    return out;
}

struct Field {
    const char* key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

Field real(const char* key, double RunConfig::*member) {
    return {key, [member](const RunConfig& c) { return format_double(c.*member); },
            [member](RunConfig& c, const std::string& k, const std::string& v) {
                c.*member = parse_double(k, v);
            }};
}

Field real(const char* key, double SimParams::*member) {
    return {key, [member](const RunConfig& c) { return format_double(c.params.*member); },
            [member](RunConfig& c, const std::string& k, const std::string& v) {
                c.params.*member = parse_double(k, v);
            }};
}

Field integer(const char* key, int RunConfig::*member) {
    return {key, [member](const RunConfig& c) { return std::to_string(c.*member); },
            [member](RunConfig& c, const std::string& k, const std::string& v) {
                c.*member = parse_int(k, v);
            }};
}

Field integer(const char* key, int SimParams::*member) {
    return {key, [member](const RunConfig& c) { return std::to_string(c.params.*member); },
            [member](RunConfig& c, const std::string& k, const std::string& v) {
                c.params.*member = parse_int(k, v);
            }};
}

Field flag(const char* key, bool RunConfig::*member) {
    return {key, [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); },
            [member](RunConfig& c, const std::string& k, const std::string& v) {
                c.*member = parse_bool(k, v);
            }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        real("K", &SimParams::K),
        real("hbar_eff", &SimParams::hbar_eff),
        real("r", &SimParams::r),
        real("phi", &SimParams::phi),
        real("tau", &SimParams::tau),
        integer("N1", &SimParams::N1),
        {"N2",
         [](const RunConfig& c) { return c.params.N2 ? std::to_string(*c.params.N2) : std::string("auto"); },
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (trim(v) == "auto")
                 c.params.N2.reset();
             else
                 c.params.N2 = parse_int(k, v);
         }},
        real("A", &SimParams::A),
        real("modulation_phase", &SimParams::modulation_phase),
        {"mode", [](const RunConfig& c) { return to_string(c.params.mode); },
         [](RunConfig& c, const std::string&, const std::string& v) {
             c.params.mode = parse_drive_mode(trim(v));
         }},
        integer("grid_size", &SimParams::grid_size),
        integer("beta_samples", &SimParams::beta_samples),
        real("sigma_P", &SimParams::sigma_P),
        {"seed", [](const RunConfig& c) { return std::to_string(c.params.seed); },
         [](RunConfig& c, const std::string& k, const std::string& v) {
             const auto s = trim(v);
             std::uint64_t out = 0;
             const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
             if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
                 bad_value(k, v, "a non-negative integer");
             c.params.seed = out;
         }},
        real("r_min", &RunConfig::r_min),
        real("r_max", &RunConfig::r_max),
        integer("r_steps", &RunConfig::r_steps),
        flag("adaptive", &RunConfig::adaptive),
        integer("fine_points", &RunConfig::fine_points),
        integer("min_points_in_width", &RunConfig::min_points_in_width),
        integer("max_refinements", &RunConfig::max_refinements),
        real("waist_ratio", &RunConfig::waist_ratio),
        integer("k_nodes", &RunConfig::k_nodes),
        {"N1_list", [](const RunConfig& c) { return join(c.N1_list, [](int n) { return std::to_string(n); }); },
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.N1_list.clear();
             for (const auto& item : split_list(v)) c.N1_list.push_back(parse_int(k, item));
         }},
        {"K_list", [](const RunConfig& c) { return join(c.K_list, format_double); },
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.K_list.clear();
             for (const auto& item : split_list(v)) c.K_list.push_back(parse_double(k, item));
         }},
        real("modulated_K", &RunConfig::modulated_K),
        real("f_min", &RunConfig::f_min),
        real("f_max", &RunConfig::f_max),
        integer("f_steps", &RunConfig::f_steps),
        {"spectrum_r", [](const RunConfig& c) { return join(c.spectrum_r, format_double); },
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.spectrum_r.clear();
             for (const auto& item : split_list(v)) c.spectrum_r.push_back(parse_double(k, item));
         }},
        integer("kicks", &RunConfig::kicks),
        integer("classical_ensemble", &RunConfig::classical_ensemble),
        integer("workers", &RunConfig::workers),
        {"out_dir", [](const RunConfig& c) { return c.out_dir; },
         [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = trim(v); }},
        flag("strict_overlap", &RunConfig::strict_overlap),
        real("window", &RunConfig::window),
        {"pulse", [](const RunConfig& c) { return c.pulse; },
         [](RunConfig& c, const std::string& k, const std::string& v) {
             const auto s = trim(v);
             if (s != "auto" && s != "delta" && s != "square") bad_value(k, v, "auto, delta or square");
             c.pulse = s;
         }},
        integer("substeps", &RunConfig::substeps),
        integer("max_grid", &RunConfig::max_grid),
        real("f1_khz", &RunConfig::f1_khz),
        real("tau_us", &RunConfig::tau_us),
        real("lambda_nm", &RunConfig::lambda_nm),
        real("mass_kg", &RunConfig::mass_kg),
    };
    return table;
}

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) throw ConfigError(std::string(field) + ": " + what);
}

}  // namespace

double hbar_eff_from_lab(double f1_khz, double lambda_nm, double mass_kg) {
    constexpr double hbar = 1.054571817e-34;
    const double k_L = two_pi / (lambda_nm * 1e-9);
    const double T1 = 1.0 / (f1_khz * 1e3);
    return 4.0 * k_L * k_L * T1 * hbar / mass_kg;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
    for (const auto& f : fields())
        if (key == f.key) {
            f.set(config, key, value);
            return;
        }
    throw ConfigError(key + ": unknown key");
}

void apply_config_text(RunConfig& config, const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(number) + ": expected key=value");
        apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_text(config, ss.str(), path.string());
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    if (name == "fig1") {
        c.params.K = 42.0;
        c.params.hbar_eff = 5.76;
        c.params.N1 = 10;
        c.params.phi = std::numbers::pi;  // keeps 3 us pulses from overlapping
        c.params.mode = DriveMode::two_train;
        c.params.grid_size = 512;
        c.params.beta_samples = 256;
        c.f1_khz = 18.0;
        c.tau_us = 3.0;
        c.r_min = 0.995;
        c.r_max = 1.005;
        c.r_steps = 41;
    } else if (name == "fig2") {
        c.params.N1 = 10;
        c.params.phi = 0.0;
        c.f1_khz = 18.0;
        c.spectrum_r = {0.98, 0.93, 0.80};
        c.f_min = 0.7;
        c.f_max = 1.2;
        c.f_steps = 1001;
    } else if (name == "fig3") {
        c.params.hbar_eff = 5.76;
        c.params.phi = std::numbers::pi;
        c.params.mode = DriveMode::two_train;
        c.params.grid_size = 512;
        c.params.beta_samples = 64;
        c.params.A = 1.0;
        c.K_list = {20.0, 42.0, 80.0};
        c.N1_list = {5, 10, 20, 40};
        c.modulated_K = 12.0;
        c.r_min = 0.98;
        c.r_max = 1.02;
    } else {
        throw ConfigError("preset: unknown preset '" + name + "' (fig1, fig2, fig3)");
    }
    return c;
}

std::vector<std::string> resolve_units(RunConfig& c) {
    std::vector<std::string> log;
    if (c.tau_us > 0.0) {
        require(c.f1_khz > 0.0, "tau_us", "needs f1_khz");
        c.params.tau = c.tau_us * c.f1_khz * 1e-3;
        log.push_back("tau = " + format_double(c.tau_us) + " us -> tau*f1 = " +
                      format_double(c.params.tau));
    }
    if (c.lambda_nm > 0.0 || c.mass_kg > 0.0) {
        require(c.f1_khz > 0.0, "lambda_nm", "needs f1_khz");
        const double lambda = c.lambda_nm > 0.0 ? c.lambda_nm : cesium_lambda_nm;
        const double mass = c.mass_kg > 0.0 ? c.mass_kg : cesium_mass_kg;
        c.params.hbar_eff = hbar_eff_from_lab(c.f1_khz, lambda, mass);
        log.push_back("hbar_eff from lab units = " + format_double(c.params.hbar_eff));
    }
    if (c.f1_khz > 0.0)
        log.push_back("f1 = " + format_double(c.f1_khz) + " kHz, hbar_eff = " +
                      format_double(c.params.hbar_eff) + ", tau*f1 = " + format_double(c.params.tau));
    return log;
}

void validate(const RunConfig& c) {
    c.params.validate();
    require(std::isfinite(c.r_min) && std::isfinite(c.r_max) && c.r_min > 0.0 && c.r_min < c.r_max,
            "r_min", "need 0 < r_min < r_max");
    require(c.r_steps >= 5, "r_steps", "must be >= 5");
    require(c.fine_points >= 2, "fine_points", "must be >= 2");
    require(c.min_points_in_width >= 1, "min_points_in_width", "must be >= 1");
    require(c.max_refinements >= 0, "max_refinements", "must be >= 0");
    require(std::isfinite(c.waist_ratio) && c.waist_ratio >= 0.0, "waist_ratio", "must be >= 0");
    require(c.k_nodes >= 1, "k_nodes", "must be >= 1");
    require(!c.N1_list.empty(), "N1_list", "must not be empty");
    for (std::size_t i = 0; i < c.N1_list.size(); ++i) {
        require(c.N1_list[i] >= 1, "N1_list", "entries must be >= 1");
        require(i == 0 || c.N1_list[i] > c.N1_list[i - 1], "N1_list", "must be increasing");
    }
    for (double K : c.K_list) require(std::isfinite(K) && K >= 0.0, "K_list", "entries must be >= 0");
    require(std::isfinite(c.modulated_K) && c.modulated_K >= 0.0, "modulated_K", "must be >= 0");
    require(std::isfinite(c.f_min) && std::isfinite(c.f_max) && c.f_min < c.f_max, "f_min",
            "need f_min < f_max");
    require(c.f_steps >= 2, "f_steps", "must be >= 2");
    for (double r : c.spectrum_r) require(std::isfinite(r) && r > 0.0, "spectrum_r", "entries must be > 0");
    require(c.kicks >= 1, "kicks", "must be >= 1");
    require(c.classical_ensemble >= 1, "classical_ensemble", "must be >= 1");
    require(c.workers >= 0, "workers", "must be >= 0");
    require(!c.out_dir.empty(), "out_dir", "must not be empty");
    require(std::isfinite(c.window) && (c.window <= 0.0 || c.window >= c.params.hbar_eff), "window",
            "must be <= 0 (one ladder spacing) or at least hbar_eff");
    require(c.substeps >= 1, "substeps", "must be >= 1");
    require(c.max_grid >= c.params.grid_size, "max_grid", "must be >= grid_size");
    require(c.f1_khz >= 0.0 && c.tau_us >= 0.0 && c.lambda_nm >= 0.0 && c.mass_kg >= 0.0, "f1_khz",
            "lab-unit fields must be >= 0");
}

std::vector<std::pair<std::string, std::string>> settings(const RunConfig& config) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : fields()) out.emplace_back(f.key, f.get(config));
    return out;
}

std::string manifest_text(const RunConfig& config, const std::string& command) {
    std::string out = "# subfourier " + command + "\n";
    for (const auto& [k, v] : settings(config)) out += k + "=" + v + "\n";
    return out;
}

}  // namespace subfourier
