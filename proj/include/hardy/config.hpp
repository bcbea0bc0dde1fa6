#pragma once

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hardy/coverings.hpp"
#include "hardy/kernels.hpp"

namespace hardy {

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// name(arg, arg, ...) terms; a leaf is a bare token such as 1.5, half or 1:2x0:3
struct SpecNode {
    std::string name;
    std::vector<SpecNode> args;
    bool call = false;

    double number() const {
        try {
            size_t pos = 0;
            const double v = std::stod(name, &pos);
            if (pos != name.size()) throw std::invalid_argument(name);
            return v;
        } catch (const std::exception&) {
            throw config_error("expected a number, got '" + name + "'");
        }
    }
    int integer() const {
        const double v = number();
        if (v != std::floor(v)) throw config_error("expected an integer, got '" + name + "'");
        return static_cast<int>(v);
    }
    const SpecNode& arg(size_t i) const {
        if (i >= args.size()) throw config_error(name + ": missing argument " + std::to_string(i + 1));
        return args[i];
    }
    std::string str() const {
        if (!call) return name;
        std::string s = name + "(";
        for (size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i].str();
        return s + ")";
    }
};

inline SpecNode parse_spec(const std::string& text) {
    size_t p = 0;
    auto skip = [&] {
        while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    };
    std::function<SpecNode()> term = [&]() -> SpecNode {
        skip();
        SpecNode n;
        while (p < text.size() && text[p] != '(' && text[p] != ')' && text[p] != ',' &&
               !std::isspace(static_cast<unsigned char>(text[p])))
            n.name += text[p++];
        if (n.name.empty()) throw config_error("spec '" + text + "': expected a name at position " + std::to_string(p));
        skip();
        if (p < text.size() && text[p] == '(') {
            n.call = true;
            ++p;
            skip();
            if (p < text.size() && text[p] == ')') {
                ++p;
                return n;
            }
            while (true) {
                n.args.push_back(term());
                skip();
                if (p < text.size() && text[p] == ',') {
                    ++p;
                    continue;
                }
                if (p < text.size() && text[p] == ')') {
                    ++p;
                    break;
                }
                throw config_error("spec '" + text + "': expected ',' or ')'");
            }
        }
        return n;
    };
    SpecNode n = term();
    skip();
    if (p != text.size()) throw config_error("spec '" + text + "': trailing characters");
    return n;
}

// ---------------------------------------------------------------- kernels

// heat[(d)], stable(nu[, d]), bessel(beta), laguerre(alpha), subordinate(base, nu), product(k1, k2, ...),
// schrodinger(zero | harmonic | constant:c[, half_width, points[, richardson]])
inline KernelPtr build_kernel(const SpecNode& n) {
    const std::string& f = n.name;
    if (f == "heat" || f == "euclidean_heat") return make_heat(n.args.empty() ? 1 : n.arg(0).integer());
    if (f == "stable") {
        const double nu = n.arg(0).number();
        if (!(nu > 0.0 && nu < 1.0)) throw config_error("stable: nu must lie in (0, 1)");
        return make_stable(nu, n.args.size() > 1 ? n.arg(1).integer() : 1);
    }
    if (f == "bessel") {
        const double b = n.arg(0).number();
        if (!(b > 0.0)) throw config_error("bessel: beta must be > 0");
        return make_bessel(b);
    }
    if (f == "laguerre") {
        const double a = n.arg(0).number();
        if (!(a > -0.5)) throw config_error("laguerre: alpha must be > -1/2");
        return make_laguerre(a);
    }
    if (f == "subordinate") {
        const double nu = n.arg(1).number();
        if (!(nu > 0.0 && nu < 1.0)) throw config_error("subordinate: nu must lie in (0, 1)");
        return make_subordinate(build_kernel(n.arg(0)), nu);
    }
    if (f == "product") {
        std::vector<KernelPtr> fs;
        for (const auto& a : n.args) fs.push_back(build_kernel(a));
        if (fs.empty()) throw config_error("product: no factors");
        return make_product(std::move(fs));
    }
    if (f == "schrodinger") {
        const double L = n.args.size() > 1 ? n.arg(1).number() : 20.0;
        const int pts = n.args.size() > 2 ? n.arg(2).integer() : 2000;
        bool extrapolate = false;
        if (n.args.size() > 3) {
            if (n.arg(3).name != "richardson") throw config_error("schrodinger: fourth argument must be 'richardson'");
            extrapolate = true;
        }
        return std::const_pointer_cast<SchrodingerKernel>(
            schrodinger_build(Potential::parse(n.arg(0).name), L, pts, extrapolate));
    }
    throw config_error("unknown kernel family '" + f + "'");
}
inline KernelPtr build_kernel(const std::string& s) { return build_kernel(parse_spec(s)); }

// ---------------------------------------------------------------- coverings

namespace detail {

// "a:b" per axis joined by 'x'
inline Box parse_box(const std::string& s) {
    Box b;
    std::stringstream ss(s);
    std::string axis;
    while (std::getline(ss, axis, 'x')) {
        const auto c = axis.find(':');
        if (c == std::string::npos) throw config_error("box '" + s + "': expected lo:hi per axis");
        try {
            b.lo.push_back(std::stod(axis.substr(0, c)));
            b.hi.push_back(std::stod(axis.substr(c + 1)));
        } catch (const std::exception&) {
            throw config_error("box '" + s + "': bad number");
        }
        if (!(b.lo.back() < b.hi.back())) throw config_error("box '" + s + "': empty axis");
    }
    return b;
}

inline DomainSpec parse_domain(const std::string& s, int d) {
    if (s == "real") return DomainSpec::real_line(d);
    if (s == "half") return DomainSpec::half_line(d);
    throw config_error("domain must be 'real' or 'half', got '" + s + "'");
}

}  // namespace detail

// bessel(lo, hi), laguerre(lo, hi), uniform(tau, box), box(c1, c2), strip(d1, A, c),
// list(real | half, box, box, ...) with box = a:b[xc:d...]
inline AdmissibleCovering build_covering(const SpecNode& n, double kappa = 1.05) {
    const std::string& f = n.name;
    if (f == "bessel") return covering_bessel(n.arg(0).integer(), n.arg(1).integer(), kappa);
    if (f == "laguerre") return covering_laguerre(n.arg(0).integer(), n.arg(1).integer(), kappa);
    if (f == "uniform") {
        const Box w = detail::parse_box(n.arg(1).name);
        return covering_uniform(DomainSpec::real_line(w.dim()), n.arg(0).number(), w, kappa);
    }
    if (f == "box") {
        auto c = build_covering(n.arg(0), kappa);
        for (size_t i = 1; i < n.args.size(); ++i) c = box_product(c, build_covering(n.arg(i), kappa));
        return c;
    }
    if (f == "strip") return strip_product(n.arg(0).integer(), n.arg(1).number(), build_covering(n.arg(2), kappa));
    if (f == "list") {
        AdmissibleCovering c;
        std::vector<Box> boxes;
        for (size_t i = 1; i < n.args.size(); ++i) boxes.push_back(detail::parse_box(n.arg(i).name));
        if (boxes.empty()) throw config_error("list: no boxes");
        const int d = boxes.front().dim();
        c.id = n.str();
        c.domain = detail::parse_domain(n.arg(0).name, d);
        c.kappa = kappa;
        Box hull = boxes.front();
        for (const auto& b : boxes) {
            if (b.dim() != d) throw config_error("list: boxes of different dimension");
            c.cuboids.push_back(Cuboid::from_box(b));
            c.tag.push_back(0);
            hull = hull.hull(b);
        }
        c.window = hull;
        // nominal constants are whatever the list achieves; validation measures them
        c.C1 = inf;
        c.C2 = inf;
        return c;
    }
    throw config_error("unknown covering family '" + f + "'");
}
inline AdmissibleCovering build_covering(const std::string& s, double kappa = 1.05) {
    return build_covering(parse_spec(s), kappa);
}

// --family / --window shorthand: bessel, laguerre, uniform, bessel-box, laguerre-box, bessel-laguerre-box, strip
inline std::string covering_shorthand(const std::string& family, const std::string& window) {
    const auto dots = window.find("..");
    if (dots == std::string::npos) throw config_error("window must read lo..hi, got '" + window + "'");
    const std::string lo = window.substr(0, dots), hi = window.substr(dots + 2);
    if (family == "bessel" || family == "laguerre") return family + "(" + lo + "," + hi + ")";
    if (family == "bessel-box") return "box(bessel(" + lo + "," + hi + "),bessel(" + lo + "," + hi + "))";
    if (family == "laguerre-box") return "box(laguerre(" + lo + "," + hi + "),laguerre(" + lo + "," + hi + "))";
    if (family == "bessel-laguerre-box") return "box(bessel(" + lo + "," + hi + "),laguerre(" + lo + "," + hi + "))";
    if (family == "uniform") return "uniform(1," + lo + ":" + hi + ")";
    if (family == "strip") {
        // cube sides 2 d_Q reach 2^{hi+2}; A = 2^{hi+2} is a multiple of all of them
        const double A = std::ldexp(1.0, std::stoi(hi) + 2);
        std::ostringstream o;
        o << "strip(1," << A << ",bessel(" << lo << "," << hi << "))";
        return o.str();
    }
    throw config_error("unknown covering family '" + family + "'");
}

// ---------------------------------------------------------------- INI

// sectioned key = value file; every lookup records the value it used so that outputs can echo them
class Config {
public:
    Config() = default;
    static Config load(const std::string& path) {
        Config c;
        try {
            boost::property_tree::read_ini(path, c.tree_);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw config_error(std::string("config: ") + e.what());
        }
        return c;
    }
    static Config parse(const std::string& text) {
        Config c;
        std::istringstream is(text);
        try {
            boost::property_tree::read_ini(is, c.tree_);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw config_error(std::string("config: ") + e.what());
        }
        return c;
    }

    bool has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }
    void put(const std::string& key, const std::string& v) { tree_.put(key, v); }

    std::string get(const std::string& key, const std::string& def) {
        const auto v = tree_.get<std::string>(key, def);
        note(key, v);
        return v;
    }
    std::string require(const std::string& key) {
        auto v = tree_.get_optional<std::string>(key);
        if (!v) throw config_error("config: missing key '" + key + "'");
        note(key, *v);
        return *v;
    }
    double get(const std::string& key, double def) {
        const auto s = tree_.get_optional<std::string>(key);
        double v = def;
        if (s) {
            try {
                size_t pos = 0;
                v = std::stod(*s, &pos);
                if (pos != s->size()) throw std::invalid_argument(*s);
            } catch (const std::exception&) {
                throw config_error("config: '" + key + "' is not a number: '" + *s + "'");
            }
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        note(key, buf);
        return v;
    }
    int get(const std::string& key, int def) {
        const double v = get(key, static_cast<double>(def));
        if (v != std::floor(v)) throw config_error("config: '" + key + "' must be an integer");
        return static_cast<int>(v);
    }
    // comma separated list
    std::vector<std::string> list(const std::string& key, const std::string& def) {
        std::vector<std::string> out;
        std::stringstream ss(get(key, def));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto a = item.find_first_not_of(" \t"), b = item.find_last_not_of(" \t");
            if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
        }
        return out;
    }

    // effective values in lookup order
    const std::vector<std::pair<std::string, std::string>>& used() const { return used_; }
    void echo(std::ostream& os, const std::string& prefix) const {
        for (const auto& [k, v] : used_) os << prefix << k << " = " << v << "\n";
    }

private:
    void note(const std::string& k, const std::string& v) {
        for (auto& p : used_)
            if (p.first == k) {
                p.second = v;
                return;
            }
        used_.emplace_back(k, v);
    }

    boost::property_tree::ptree tree_;
    std::vector<std::pair<std::string, std::string>> used_;
};

}  // namespace hardy
