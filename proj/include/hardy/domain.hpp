#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardy {

inline constexpr double inf = std::numeric_limits<double>::infinity();

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// Product of open intervals (a_j, b_j); endpoints may be infinite.
class DomainSpec {
public:
    DomainSpec() = default;
    explicit DomainSpec(std::vector<Interval> iv) : iv_(std::move(iv)) {
        for (const auto& i : iv_)
            if (!(i.lo < i.hi)) throw std::invalid_argument("DomainSpec: need a_j < b_j");
    }

    static DomainSpec real_line(int d = 1) { return DomainSpec(std::vector<Interval>(d, {-inf, inf})); }
    static DomainSpec half_line(int d = 1) { return DomainSpec(std::vector<Interval>(d, {0.0, inf})); }

    int dim() const { return static_cast<int>(iv_.size()); }
    const Interval& operator[](int j) const { return iv_[j]; }
    const std::vector<Interval>& intervals() const { return iv_; }

    bool contains(const double* x) const {
        for (int j = 0; j < dim(); ++j)
            if (!(x[j] > iv_[j].lo && x[j] < iv_[j].hi)) return false;
        return true;
    }
    // closure test, used for geometry where boundary points are harmless
    bool contains_closed(const double* x) const {
        for (int j = 0; j < dim(); ++j)
            if (x[j] < iv_[j].lo || x[j] > iv_[j].hi) return false;
        return true;
    }

    DomainSpec operator*(const DomainSpec& o) const {
        auto v = iv_;
        v.insert(v.end(), o.iv_.begin(), o.iv_.end());
        return DomainSpec(std::move(v));
    }

    bool operator==(const DomainSpec& o) const {
        if (dim() != o.dim()) return false;
        for (int j = 0; j < dim(); ++j)
            if (iv_[j].lo != o.iv_[j].lo || iv_[j].hi != o.iv_[j].hi) return false;
        return true;
    }

private:
    std::vector<Interval> iv_;
};

// Closed axis-aligned box given by corners.
struct Box {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double volume() const {
        double v = 1.0;
        for (int j = 0; j < dim(); ++j) v *= hi[j] - lo[j];
        return v;
    }
    bool contains(const double* x, double tol = 0.0) const {
        for (int j = 0; j < dim(); ++j)
            if (x[j] < lo[j] - tol || x[j] > hi[j] + tol) return false;
        return true;
    }
    bool intersects(const Box& o) const {
        for (int j = 0; j < dim(); ++j)
            if (hi[j] < o.lo[j] || o.hi[j] < lo[j]) return false;
        return true;
    }
    // measure of the intersection
    double overlap(const Box& o) const {
        double v = 1.0;
        for (int j = 0; j < dim(); ++j) {
            double w = std::min(hi[j], o.hi[j]) - std::max(lo[j], o.lo[j]);
            if (w <= 0) return 0.0;
            v *= w;
        }
        return v;
    }
    bool contains_box(const Box& o, double tol = 0.0) const {
        for (int j = 0; j < dim(); ++j)
            if (o.lo[j] < lo[j] - tol || o.hi[j] > hi[j] + tol) return false;
        return true;
    }
    Box clip(const DomainSpec& X) const {
        Box b = *this;
        for (int j = 0; j < dim(); ++j) {
            b.lo[j] = std::max(lo[j], X[j].lo);
            b.hi[j] = std::min(hi[j], X[j].hi);
        }
        return b;
    }
    Box hull(const Box& o) const {
        Box b = *this;
        for (int j = 0; j < dim(); ++j) {
            b.lo[j] = std::min(lo[j], o.lo[j]);
            b.hi[j] = std::max(hi[j], o.hi[j]);
        }
        return b;
    }
};

// Q(z, r_1..r_d) = {x : |x_i - z_i| <= r_i}; the geometric object is Q intersected with X.
struct Cuboid {
    std::vector<double> center;
    std::vector<double> half;

    int dim() const { return static_cast<int>(center.size()); }
    double diameter() const {
        double s = 0.0;
        for (double r : half) s += r * r;
        return 2.0 * std::sqrt(s);
    }
    double volume() const {
        double v = 1.0;
        for (double r : half) v *= 2.0 * r;
        return v;
    }
    double min_half() const { return *std::min_element(half.begin(), half.end()); }
    double max_half() const { return *std::max_element(half.begin(), half.end()); }
    Box box() const {
        Box b{center, center};
        for (int j = 0; j < dim(); ++j) {
            b.lo[j] -= half[j];
            b.hi[j] += half[j];
        }
        return b;
    }
    Box box(const DomainSpec& X) const { return box().clip(X); }
    Cuboid scaled(double f) const {
        Cuboid q = *this;
        for (double& r : q.half) r *= f;
        return q;
    }

    static Cuboid from_box(const Box& b) {
        Cuboid q;
        for (int j = 0; j < b.dim(); ++j) {
            q.center.push_back(0.5 * (b.lo[j] + b.hi[j]));
            q.half.push_back(0.5 * (b.hi[j] - b.lo[j]));
        }
        return q;
    }
    static Cuboid interval(double a, double b) { return from_box(Box{{a}, {b}}); }
};

// Q*, Q**, Q*** : half-widths scaled by kappa^level. Use .box(X) for the part inside X.
inline Cuboid enlarge(const Cuboid& q, double kappa, int level) {
    if (level < 1 || level > 3) throw std::invalid_argument("enlarge: level must be 1, 2 or 3");
    return q.scaled(std::pow(kappa, level));
}

inline double dist2(const double* x, const double* y, int d) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += (x[j] - y[j]) * (x[j] - y[j]);
    return s;
}

}  // namespace hardy
