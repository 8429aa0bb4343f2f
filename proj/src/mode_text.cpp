#include "hdtele/mode_text.hpp"

#include "hdtele/csv.hpp"
#include "hdtele/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

namespace hdtele {

namespace {

std::string strip(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

double number(const std::string& text, const std::string& what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("bad number for " + what + ": '" + text + "'");
    return v;
}

int integer(const std::string& text, const std::string& what) {
    const double v = number(text, what);
    if (v != std::floor(v)) throw ParseError(what + " must be an integer, got '" + text + "'");
    return static_cast<int>(v);
}

cplx coefficient(const std::string& s) {
    if (s.empty()) throw ParseError("empty superposition coefficient");
    if (s.back() != 'i') return number(s, "coefficient");
    const std::string body = s.substr(0, s.size() - 1);
    // split a+bi at the last sign that is not part of an exponent
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;)
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    auto imag_part = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return number(t[0] == '+' ? t.substr(1) : t, "coefficient");
    };
    if (split == std::string::npos) return {0.0, imag_part(body)};
    return {number(body.substr(0, split), "coefficient"), imag_part(body.substr(split))};
}

std::map<std::string, std::string> key_values(const std::string& s, const std::string& kind) {
    std::map<std::string, std::string> kv;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        const std::string item = s.substr(pos, comma - pos);
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value in " + kind + " mode: '" + item + "'");
        if (!kv.emplace(item.substr(0, eq), item.substr(eq + 1)).second)
            throw ParseError("duplicate key '" + item.substr(0, eq) + "' in " + kind + " mode");
        pos = comma + 1;
    }
    return kv;
}

struct Args {
    std::map<std::string, std::string> kv;
    std::string kind;

    bool has(const std::string& k) const { return kv.count(k) != 0; }
    int get_int(const std::string& k, int def) const { return has(k) ? integer(kv.at(k), kind + " " + k) : def; }
    double get(const std::string& k, double def) const { return has(k) ? number(kv.at(k), kind + " " + k) : def; }
    void allow(std::initializer_list<const char*> keys) const {
        for (const auto& [k, v] : kv) {
            bool ok = false;
            for (const char* a : keys) ok = ok || k == a;
            if (!ok) throw ParseError("unknown key '" + k + "' for " + kind + " mode");
        }
    }
};

ModeSpec parse_stripped(const std::string& s, double default_waist);

ModeSpec parse_superposition(const std::string& body, double default_waist) {
    std::vector<SuperTerm> terms;
    std::size_t pos = 0;
    while (pos < body.size()) {
        if (body[pos] != '(') throw ParseError("superposition term must start with '('");
        int depth = 0;
        std::size_t end = pos;
        for (; end < body.size(); ++end) {
            if (body[end] == '(') ++depth;
            if (body[end] == ')' && --depth == 0) break;
        }
        if (end >= body.size()) throw ParseError("unbalanced parentheses in superposition");
        const std::string inner = body.substr(pos + 1, end - pos - 1);
        const auto comma = inner.find(',');
        if (comma == std::string::npos) throw ParseError("superposition term needs (coefficient,mode)");
        terms.push_back({coefficient(inner.substr(0, comma)), parse_stripped(inner.substr(comma + 1), default_waist)});
        pos = end + 1;
        if (pos < body.size()) {
            if (body[pos] != '+') throw ParseError("superposition terms are joined with '+'");
            ++pos;
            if (pos == body.size()) throw ParseError("dangling '+' in superposition");
        }
    }
    return make_superposition(std::move(terms));
}

ModeSpec parse_stripped(const std::string& s, double default_waist) {
    const auto colon = s.find(':');
    const std::string kind = s.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : s.substr(colon + 1);
    if (kind == "sup") {
        if (rest.empty()) throw ParseError("empty superposition");
        return parse_superposition(rest, default_waist);
    }
    const Args a{key_values(rest, kind), kind};
    const double w = a.has("w_um") ? a.get("w_um", 0.0) / 1e6 : default_waist;
    ModeSpec out;
    if (kind == "lg") {
        a.allow({"ell", "p", "w_um"});
        out = LG{a.get_int("ell", 0), a.get_int("p", 0), w};
    } else if (kind == "hg") {
        a.allow({"n", "m", "w_um"});
        out = HG{a.get_int("n", 0), a.get_int("m", 0), w};
    } else if (kind == "gauss") {
        a.allow({"w_um"});
        out = Gauss{w};
    } else if (kind == "vortex") {
        a.allow({"ell", "w_um"});
        out = PhaseVortex{a.get_int("ell", 0), w};
    } else if (kind == "frac") {
        a.allow({"M", "offset", "w_um"});
        out = FracOAM{a.get("M", 0.5), a.get("offset", 0.0), w};
    } else {
        throw ParseError("unknown mode kind '" + kind + "'");
    }
    try {
        validate(out);
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("invalid mode '") + s + "': " + e.what());
    }
    return out;
}

std::string coeff_text(cplx c) {
    if (c.imag() == 0.0) return format_number(c.real());
    if (c.real() == 0.0) return format_number(c.imag()) + "i";
    const std::string im = format_number(c.imag());
    return format_number(c.real()) + (c.imag() < 0 ? "" : "+") + im + "i";
}

// w in micrometres, rounded to 15 significant digits so that metres -> text
// -> metres is stable
std::string micrometres(double w) {
    char buf[32];
    const auto end = std::to_chars(buf, buf + sizeof buf, w * 1e6, std::chars_format::general, 15).ptr;
    double v = 0.0;
    std::from_chars(buf, end, v);
    return format_number(v);
}

}  // namespace

ModeSpec parse_mode(const std::string& text, double default_waist) {
    const std::string s = strip(text);
    if (s.empty()) throw ParseError("empty mode string");
    return parse_stripped(s, default_waist);
}

std::string format_mode(const ModeSpec& spec, bool with_waist) {
    auto waist = [&](double w) { return with_waist ? ",w_um=" + micrometres(w) : std::string(); };
    if (const auto* m = std::get_if<LG>(&spec.value))
        return "lg:ell=" + std::to_string(m->ell) + ",p=" + std::to_string(m->p) + waist(m->waist);
    if (const auto* m = std::get_if<HG>(&spec.value))
        return "hg:n=" + std::to_string(m->n) + ",m=" + std::to_string(m->m) + waist(m->waist);
    if (const auto* m = std::get_if<Gauss>(&spec.value))
        return with_waist ? "gauss:w_um=" + micrometres(m->waist) : "gauss";
    if (const auto* m = std::get_if<PhaseVortex>(&spec.value))
        return "vortex:ell=" + std::to_string(m->ell) + waist(m->waist);
    if (const auto* m = std::get_if<FracOAM>(&spec.value))
        return "frac:M=" + format_number(m->M) + ",offset=" + format_number(m->offset) + waist(m->waist);
    const auto& sup = std::get<Superposition>(spec.value);
    std::string out = "sup:";
    for (std::size_t i = 0; i < sup.terms.size(); ++i) {
        if (i) out += "+";
        out += "(" + coeff_text(sup.terms[i].coeff) + "," + format_mode(sup.terms[i].mode, with_waist) + ")";
    }
    return out;
}

cplx parse_complex(const std::string& text) { return coefficient(text); }

}  // namespace hdtele
