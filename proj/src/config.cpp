#include "hdtele/config.hpp"

#include "hdtele/csv.hpp"
#include "hdtele/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>

namespace hdtele {

void validate(const OpticalConfig& c) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be positive");
    };
    positive(c.lambda_p, "lambda_p");
    positive(c.lambda_A, "lambda_A");
    positive(c.lambda_B, "lambda_B");
    positive(c.lambda_C, "lambda_C");
    positive(c.w_p, "w_p");
    positive(c.w_D, "w_D");
    positive(c.w_0, "w_0");
    positive(c.gamma_sinc, "gamma_sinc");
    if (!(c.L_p >= 0.0) || !(c.L_D >= 0.0)) throw InvalidArgument("crystal lengths must be non-negative");
    for (double n : {c.n_p, c.n_A, c.n_B, c.n_C})
        if (!(n >= 1.0)) throw InvalidArgument("refractive indices must be >= 1");
    const double mismatch = std::abs(1.0 / c.lambda_p - 1.0 / c.lambda_A - 1.0 / c.lambda_C) * c.lambda_p;
    if (mismatch > 0.005)
        throw InvalidArgument("wavelengths violate energy conservation by " + format_number(100.0 * mismatch) + "%");
}

OpticalConfig with_alpha_beta(OpticalConfig cfg, double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("alpha and beta must be positive");
    cfg.w_0 = cfg.w_p / alpha;
    cfg.w_D = cfg.w_p / beta;
    return cfg;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& key) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("bad number for " + key + ": '" + text + "'");
    return v;
}

}  // namespace

ConfigFile parse_config(std::istream& in) {
    ConfigFile out;
    auto& o = out.optics;
    const std::map<std::string, std::function<void(double)>> setters{
        {"lambda_p_nm", [&](double v) { o.lambda_p = v / 1e9; }},
        {"lambda_a_nm", [&](double v) { o.lambda_A = v / 1e9; }},
        {"lambda_b_nm", [&](double v) { o.lambda_B = v / 1e9; }},
        {"lambda_c_nm", [&](double v) { o.lambda_C = v / 1e9; }},
        {"n_p", [&](double v) { o.n_p = v; }},
        {"n_a", [&](double v) { o.n_A = v; }},
        {"n_b", [&](double v) { o.n_B = v; }},
        {"n_c", [&](double v) { o.n_C = v; }},
        {"l_p_mm", [&](double v) { o.L_p = v / 1e3; }},
        {"l_d_mm", [&](double v) { o.L_D = v / 1e3; }},
        {"poling_um", [&](double v) { o.Lambda_pp = v / 1e6; }},
        {"w_p_um", [&](double v) { o.w_p = v / 1e6; }},
        {"w_d_um", [&](double v) { o.w_D = v / 1e6; }},
        {"w_0_um", [&](double v) { o.w_0 = v / 1e6; }},
        {"gamma_sinc", [&](double v) { o.gamma_sinc = v; }},
        {"grid_n",
         [&](double v) {
             if (v != std::floor(v)) throw ParseError("grid_n must be an integer");
             out.grid_n = static_cast<int>(v);
         }},
        {"grid_qmax", [&](double v) { out.grid_qmax = v; }},
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw ParseError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(to_double(value, key));
    }
    validate(o);
    return out;
}

ConfigFile load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read config file '" + path + "'");
    return parse_config(in);
}

}  // namespace hdtele
