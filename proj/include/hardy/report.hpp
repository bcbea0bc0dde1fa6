#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hardy/domain.hpp"

namespace hardy {

struct CuboidEntry {
    size_t index = 0;  // position in the covering (or probe index for point-sampled conditions)
    int tag = 0;
    Cuboid q;
    double constant = 0.0;
    double error = 0.0;
    std::vector<double> y_arg;  // maximising y sample
    bool tail_bounded = true;
    bool failed = false;
    std::string note;
};

struct VerificationReport {
    std::string condition;
    std::string kernel_id;
    std::string covering_id;
    std::vector<CuboidEntry> per_cuboid;
    std::vector<std::pair<std::string, std::string>> params;
    double sup_constant = 0.0;
    double sup_error = 0.0;
    // conditions with a numeric target (rho, sigma) also record whether it was met
    bool has_target = false;
    bool target_met = true;

    void set(const std::string& k, const std::string& v) {
        for (auto& p : params)
            if (p.first == k) {
                p.second = v;
                return;
            }
        params.emplace_back(k, v);
    }
    void set(const std::string& k, double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        set(k, std::string(buf));
    }
    std::string get(const std::string& k) const {
        for (const auto& p : params)
            if (p.first == k) return p.second;
        return {};
    }

    void finalize() {
        sup_constant = 0.0;
        sup_error = 0.0;
        for (const auto& e : per_cuboid) {
            if (e.failed) continue;
            if (e.constant > sup_constant || std::isnan(e.constant)) {
                sup_constant = e.constant;
                sup_error = e.error;
            }
        }
    }
    bool any_failed() const {
        return std::any_of(per_cuboid.begin(), per_cuboid.end(), [](const CuboidEntry& e) { return e.failed; });
    }
    bool finite() const {
        for (const auto& e : per_cuboid)
            if (!e.failed && (!std::isfinite(e.constant) || !e.tail_bounded)) return false;
        return !per_cuboid.empty();
    }
    // every entry's error is at most `rel` of its constant
    bool within_budget(double rel) const {
        for (const auto& e : per_cuboid) {
            if (e.failed) return false;
            if (!(e.error <= rel * std::abs(e.constant))) return false;
        }
        return true;
    }
    // (max - min) / max over entries selected by pred
    template <class P>
    double variation(P&& pred) const {
        double lo = inf, hi = 0.0;
        for (const auto& e : per_cuboid)
            if (!e.failed && pred(e)) {
                lo = std::min(lo, e.constant);
                hi = std::max(hi, e.constant);
            }
        return hi > 0.0 ? (hi - lo) / hi : 0.0;
    }
    double variation() const {
        return variation([](const CuboidEntry&) { return true; });
    }
};

// FNV-1a over "key=value;" pairs in stored order
inline uint64_t params_hash(const std::vector<std::pair<std::string, std::string>>& params) {
    uint64_t h = 1469598103934665603ULL;
    for (const auto& [k, v] : params)
        for (char ch : k + "=" + v + ";") {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ULL;
        }
    return h;
}

inline void write_report_csv_header(std::ostream& os) { os << "condition,cuboid_index,constant,error,params_hash\n"; }

inline void write_report_csv(std::ostream& os, const VerificationReport& r, bool header = true) {
    if (header) write_report_csv_header(os);
    char buf[160];
    const uint64_t h = params_hash(r.params);
    for (const auto& e : r.per_cuboid) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%016llx\n", r.condition.c_str(), e.index, e.constant, e.error,
                      static_cast<unsigned long long>(h));
        os << buf;
    }
}

inline void write_report_text(std::ostream& os, const VerificationReport& r) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto vec = [&](const std::vector<double>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
        return s;
    };
    os << "[report]\n";
    os << "condition = " << r.condition << "\n";
    os << "kernel = " << r.kernel_id << "\n";
    os << "covering = " << r.covering_id << "\n";
    for (const auto& [k, v] : r.params) os << "param." << k << " = " << v << "\n";
    os << "sup_constant = " << num(r.sup_constant) << "\n";
    os << "sup_error = " << num(r.sup_error) << "\n";
    os << "finite = " << (r.finite() ? "true" : "false") << "\n";
    if (r.has_target) os << "target_met = " << (r.target_met ? "true" : "false") << "\n";
    os << "semantics = bounded over the probed window with the stated error; not a proof\n";
    for (const auto& e : r.per_cuboid) {
        os << "\n[entry " << e.index << "]\n";
        os << "tag = " << e.tag << "\n";
        if (!e.q.center.empty()) {
            os << "center = " << vec(e.q.center) << "\n";
            os << "half = " << vec(e.q.half) << "\n";
        }
        os << "constant = " << num(e.constant) << "\n";
        os << "error = " << num(e.error) << "\n";
        if (!e.y_arg.empty()) os << "y_arg = " << vec(e.y_arg) << "\n";
        os << "tail_bounded = " << (e.tail_bounded ? "true" : "false") << "\n";
        if (e.failed) os << "failed = true\n";
        if (!e.note.empty()) os << "note = " << e.note << "\n";
    }
}

}  // namespace hardy
