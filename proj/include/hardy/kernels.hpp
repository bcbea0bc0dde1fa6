#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <lapacke.h>

#include "hardy/domain.hpp"
#include "hardy/error.hpp"
#include "hardy/quadrature/adaptive.hpp"
#include "hardy/specfun.hpp"
#include "hardy/subordination.hpp"

namespace hardy {

enum class KernelKind { heat, stable, bessel, laguerre, schrodinger, subordinate, product };

class Kernel;
using KernelPtr = std::shared_ptr<const Kernel>;

// int_a^b H_t(x, y) dy for the 1-D Gaussian, accurate in both tails
inline double gauss_interval(double t, double x, double a, double b) {
    const double s = 2.0 * std::sqrt(t);
    const double u = (a - x) / s, v = (b - x) / s;
    if (u >= 0.0) return 0.5 * (std::erfc(u) - std::erfc(v));
    if (v <= 0.0) return 0.5 * (std::erfc(-v) - std::erfc(-u));
    return 1.0 - 0.5 * std::erfc(v) - 0.5 * std::erfc(-u);
}

inline double log_sinh(double u) {
    if (u > 20.0) return u - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * u));
    return std::log(std::sinh(u));
}

class Kernel : public std::enable_shared_from_this<Kernel> {
public:
    explicit Kernel(DomainSpec X) : X_(std::move(X)) {}
    virtual ~Kernel() = default;

    virtual KernelKind kind() const = 0;
    virtual std::string id() const = 0;
    int dim() const { return X_.dim(); }
    const DomainSpec& domain() const { return X_; }

    // T_t(x, y) without argument checks
    virtual double value(double t, const double* x, const double* y) const = 0;
    // H_t or P_{t^nu, nu}
    virtual KernelPtr comparison() const = 0;
    // t -> T_t(x,y) is nonincreasing beyond this time (generous bound)
    virtual double settle_time(const double* x, const double* y) const {
        const double r2 = dist2(x, y, dim());
        return std::max(r2, 1e-300);
    }
    // largest t with validated accuracy
    virtual double t_max() const { return inf; }
    // 1-D factors in coordinate order; a non-product kernel is its own single factor
    virtual std::vector<KernelPtr> factors() const { return {shared_from_this()}; }
    // int_{y in X, |x - y| <= R} T_t(x, y) dy
    virtual double mass(double t, const double* x, double R) const {
        if (dim() != 1) throw std::logic_error("mass: no generic rule for d > 1");
        const double lo = std::max(X_[0].lo, x[0] - R), hi = std::min(X_[0].hi, x[0] + R);
        return integrate_1d(t, x[0], lo, hi);
    }
    // int_a^b T_t(x, y) dy, 1-D only
    virtual double cell_integral(double t, double x, double a, double b) const { return integrate_1d(t, x, a, b); }

protected:
    // finite integration range for y around x that carries all but e^{-40} of the Gaussian part
    virtual double reach(double t, double x) const { return std::sqrt(160.0 * t); }

    double integrate_1d(double t, double x, double a, double b) const {
        a = std::max(a, x - reach(t, x));
        b = std::min(b, x + reach(t, x));
        if (!(b > a)) return 0.0;
        std::vector<double> pts{a, b};
        const double w = std::sqrt(t);
        for (int k = -2; k < 12; ++k) {
            for (double sgn : {-1.0, 1.0}) {
                const double p = x + sgn * w * std::ldexp(1.0, k);
                if (p > a && p < b) pts.push_back(p);
            }
        }
        if (x > a && x < b) pts.push_back(x);
        AdaptiveOptions opt;
        opt.rel_tol = 1e-11;
        opt.abs_tol = 1e-15;
        auto r = integrate_adaptive([&](double y) { return value(t, &x, &y); }, pts, opt);
        return r.value;
    }

    DomainSpec X_;
};

// ---------------------------------------------------------------- Euclidean heat

class HeatKernel final : public Kernel {
public:
    explicit HeatKernel(int d) : Kernel(DomainSpec::real_line(d)) {}
    KernelKind kind() const override { return KernelKind::heat; }
    std::string id() const override { return "heat(d=" + std::to_string(dim()) + ")"; }
    double value(double t, const double* x, const double* y) const override {
        const int d = dim();
        return std::pow(4.0 * std::numbers::pi * t, -0.5 * d) * std::exp(-dist2(x, y, d) / (4.0 * t));
    }
    KernelPtr comparison() const override { return shared_from_this(); }
    double settle_time(const double* x, const double* y) const override {
        return std::max(dist2(x, y, dim()) / (2.0 * dim()), 1e-300);
    }
    std::vector<KernelPtr> factors() const override {
        if (dim() == 1) return {shared_from_this()};
        return std::vector<KernelPtr>(dim(), std::make_shared<HeatKernel>(1));
    }
    double mass(double t, const double* x, double R) const override {
        if (std::isinf(R)) return 1.0;
        if (dim() == 1) return gauss_interval(t, x[0], x[0] - R, x[0] + R);
        return boost::math::gamma_p(0.5 * dim(), R * R / (4.0 * t));
    }
    double cell_integral(double t, double x, double a, double b) const override { return gauss_interval(t, x, a, b); }
};

// ---------------------------------------------------------------- Bessel

class BesselKernel final : public Kernel {
public:
    explicit BesselKernel(double beta) : Kernel(DomainSpec::half_line()), beta_(beta), tau_(beta - 0.5) {
        if (!(beta > 0.0)) throw std::domain_error("bessel kernel: beta must be > 0");
    }
    KernelKind kind() const override { return KernelKind::bessel; }
    std::string id() const override {
        std::ostringstream o;
        o << "bessel(beta=" << beta_ << ")";
        return o.str();
    }
    double beta() const { return beta_; }
    double value(double t, const double* x, const double* y) const override {
        const double xy = x[0] * y[0], z = xy / (2.0 * t), dx = x[0] - y[0];
        return std::sqrt(xy) / (2.0 * t) * bessel_i_scaled(tau_, z) * std::exp(-dx * dx / (4.0 * t));
    }
    KernelPtr comparison() const override { return std::make_shared<HeatKernel>(1); }
    double settle_time(const double* x, const double* y) const override {
        const double dx = x[0] - y[0];
        return 2.0 * std::max(0.5 * dx * dx, (x[0] * x[0] + y[0] * y[0]) / (4.0 * beta_ + 2.0));
    }
    double mass(double t, const double* x, double R) const override {
        const double lo = std::max(0.0, x[0] - R), hi = x[0] + R;
        return cell_integral(t, x[0], lo, hi);
    }
    double cell_integral(double t, double x, double a, double b) const override {
        if (beta_ == 1.0) {
            a = std::max(a, 0.0);
            if (!(b > a)) return 0.0;
            return gauss_interval(t, x, a, b) - gauss_interval(t, -x, a, b);
        }
        return integrate_1d(t, x, std::max(a, 0.0), b);
    }

private:
    double beta_, tau_;
};

// ---------------------------------------------------------------- Laguerre

class LaguerreKernel final : public Kernel {
public:
    explicit LaguerreKernel(double alpha) : Kernel(DomainSpec::half_line()), alpha_(alpha) {
        if (!(alpha > -0.5)) throw std::domain_error("laguerre kernel: alpha must be > -1/2");
    }
    KernelKind kind() const override { return KernelKind::laguerre; }
    std::string id() const override {
        std::ostringstream o;
        o << "laguerre(alpha=" << alpha_ << ")";
        return o.str();
    }
    double alpha() const { return alpha_; }
    double log_value(double t, double x, double y) const {
        const double ls = log_sinh(2.0 * t), lxy = std::log(x * y);
        const double lz = lxy - ls, z = std::exp(lz), dx = x - y;
        // leading series term once z underflows
        const double li = lz < -600.0 ? alpha_ * (lz - std::log(2.0)) - std::lgamma(alpha_ + 1.0)
                                      : log_bessel_i_scaled(alpha_, z);
        return 0.5 * lxy - ls + li - 0.5 * dx * dx * std::exp(-ls) - 0.5 * std::tanh(t) * (x * x + y * y);
    }
    double value(double t, const double* x, const double* y) const override { return std::exp(log_value(t, x[0], y[0])); }
    KernelPtr comparison() const override { return std::make_shared<HeatKernel>(1); }
    double settle_time(const double* x, const double* y) const override {
        const double dx = x[0] - y[0];
        return 2.0 * std::max(0.5 * dx * dx, (x[0] * x[0] + y[0] * y[0]) / (4.0 * alpha_ + 4.0));
    }
    double mass(double t, const double* x, double R) const override {
        return integrate_1d(t, x[0], std::max(0.0, x[0] - R), x[0] + R);
    }

protected:
    double reach(double t, double x) const override {
        const double w = std::sqrt(80.0 * std::exp(log_sinh(2.0 * t)));
        const double th = std::tanh(t);
        return th > 0.0 ? std::min(w, x + std::sqrt(80.0 / th)) : w;
    }

private:
    double alpha_;
};

// ---------------------------------------------------------------- subordinate and stable

// K_{t^nu,nu}(x,y) = int T_{ts}(x,y) g_nu(s) ds; with base = heat this is P_{t^nu,nu}.
class SubordinateKernel : public Kernel {
public:
    SubordinateKernel(KernelPtr base, double nu, bool stable = false)
        : Kernel(base->domain()), base_(std::move(base)), sub_(std::make_shared<Subordinator>(nu)), stable_(stable) {
        if (base_->kind() == KernelKind::subordinate || base_->kind() == KernelKind::stable)
            throw std::invalid_argument("subordinate: base must not itself be subordinated");
        if (std::isfinite(base_->t_max()))
            throw std::invalid_argument("subordinate: base kernel must be valid for all t > 0");
    }
    KernelKind kind() const override { return stable_ ? KernelKind::stable : KernelKind::subordinate; }
    std::string id() const override {
        std::ostringstream o;
        if (stable_)
            o << "stable(nu=" << nu() << ",d=" << dim() << ")";
        else
            o << "subordinate(" << base_->id() << ",nu=" << nu() << ")";
        return o.str();
    }
    double nu() const { return sub_->nu(); }
    const KernelPtr& base() const { return base_; }
    const Subordinator& subordinator() const { return *sub_; }

    QuadResult value_with_error(double t, const double* x, const double* y) const {
        const double settle = base_->settle_time(x, y) / t;
        const double peak = dist2(x, y, dim()) / (2.0 * dim() * t);
        return sub_->integrate([&](double s) { return base_->value(t * s, x, y); }, settle, 1e-10, peak);
    }
    double value(double t, const double* x, const double* y) const override { return value_with_error(t, x, y).value; }
    KernelPtr comparison() const override;
    double settle_time(const double* x, const double* y) const override {
        // K_{t^nu} = int T_{ts} g(s) ds: each T_{ts} settles once ts exceeds the base settling time
        return base_->settle_time(x, y) * 1e3;
    }
    double mass(double t, const double* x, double R) const override {
        auto r = sub_->integrate([&](double s) { return base_->mass(t * s, x, R); }, 1.0, 1e-10);
        return r.value;
    }
    double cell_integral(double t, double x, double a, double b) const override {
        auto r = sub_->integrate([&](double s) { return base_->cell_integral(t * s, x, a, b); }, 1.0, 1e-10);
        return r.value;
    }

private:
    KernelPtr base_;
    std::shared_ptr<const Subordinator> sub_;
    bool stable_;
};

inline KernelPtr make_heat(int d = 1) { return std::make_shared<HeatKernel>(d); }
inline KernelPtr make_stable(double nu, int d = 1) {
    return std::make_shared<SubordinateKernel>(make_heat(d), nu, true);
}

inline KernelPtr SubordinateKernel::comparison() const {
    if (stable_) return shared_from_this();
    return make_stable(nu(), dim());
}

// ---------------------------------------------------------------- product

class ProductKernel final : public Kernel {
public:
    explicit ProductKernel(std::vector<KernelPtr> f) : Kernel(join(f)), f_(std::move(f)) {
        for (const auto& k : f_) {
            if (k->kind() == KernelKind::product) throw std::invalid_argument("product: nested products not supported");
            off_.push_back(off_.empty() ? 0 : off_.back() + f_[off_.size() - 1]->dim());
        }
    }
    KernelKind kind() const override { return KernelKind::product; }
    std::string id() const override {
        std::string s = "product(";
        for (size_t i = 0; i < f_.size(); ++i) s += (i ? "," : "") + f_[i]->id();
        return s + ")";
    }
    double value(double t, const double* x, const double* y) const override {
        double v = 1.0;
        for (size_t i = 0; i < f_.size() && v != 0.0; ++i) v *= f_[i]->value(t, x + off_[i], y + off_[i]);
        return v;
    }
    KernelPtr comparison() const override { return make_heat(dim()); }
    double settle_time(const double* x, const double* y) const override {
        double s = 0.0;
        for (size_t i = 0; i < f_.size(); ++i) s = std::max(s, f_[i]->settle_time(x + off_[i], y + off_[i]));
        return s;
    }
    double t_max() const override {
        double m = inf;
        for (const auto& k : f_) m = std::min(m, k->t_max());
        return m;
    }
    std::vector<KernelPtr> factors() const override { return f_; }
    const std::vector<int>& offsets() const { return off_; }
    double mass(double t, const double* x, double R) const override { return mass_from(0, t, x, R); }

private:
    static DomainSpec join(const std::vector<KernelPtr>& f) {
        if (f.empty()) throw std::invalid_argument("product: no factors");
        DomainSpec X = f[0]->domain();
        for (size_t i = 1; i < f.size(); ++i) X = X * f[i]->domain();
        return X;
    }
    // ball mass, peeling one 1-D factor at a time
    double mass_from(size_t i, double t, const double* x, double R) const {
        const auto& k = f_[i];
        if (i + 1 == f_.size()) return k->mass(t, x + off_[i], R);
        if (std::isinf(R)) return k->mass(t, x + off_[i], R) * mass_from(i + 1, t, x, R);
        if (k->dim() != 1) throw std::logic_error("product mass: finite radius needs 1-D factors");
        const double xi = x[off_[i]];
        const double a = std::max(k->domain()[0].lo, xi - R), b = std::min(k->domain()[0].hi, xi + R);
        if (!(b > a)) return 0.0;
        std::vector<double> pts{a, b};
        if (xi > a && xi < b) pts.push_back(xi);
        const double w = std::sqrt(t);
        for (int j = -2; j < 12; ++j)
            for (double sg : {-1.0, 1.0}) {
                const double p = xi + sg * w * std::ldexp(1.0, j);
                if (p > a && p < b) pts.push_back(p);
            }
        AdaptiveOptions opt;
        opt.rel_tol = 1e-9;
        opt.abs_tol = 1e-14;
        return integrate_adaptive(
                   [&](double y) {
                       const double rr = std::sqrt(std::max(0.0, R * R - (y - xi) * (y - xi)));
                       return k->value(t, &xi, &y) * mass_from(i + 1, t, x, rr);
                   },
                   pts, opt)
            .value;
    }

    std::vector<KernelPtr> f_;
    std::vector<int> off_;
};

// ---------------------------------------------------------------- discretised Schrodinger

struct Potential {
    std::string name;
    std::function<double(double)> v;

    static Potential zero() { return {"zero", [](double) { return 0.0; }}; }
    static Potential constant(double c) {
        std::ostringstream o;
        o << "constant:" << c;
        return {o.str(), [c](double) { return c; }};
    }
    static Potential harmonic() { return {"harmonic", [](double x) { return x * x; }}; }
    static Potential parse(const std::string& s) {
        if (s == "zero") return zero();
        if (s == "harmonic") return harmonic();
        if (s.rfind("constant:", 0) == 0) return constant(std::stod(s.substr(9)));
        throw std::invalid_argument("unknown potential '" + s + "'");
    }
};

// h^{-1} sum_j e^{-t lambda_j} phi_j(x) phi_j(y) for the finite-difference -d^2/dx^2 + V on (-L, L).
// With extrapolate, grid values are (4 K_{h/2} - K_h) / 3 from a second build on 2n+1 nodes.
class SchrodingerKernel final : public Kernel {
public:
    SchrodingerKernel(Potential V, double half_width, int n, bool extrapolate = false)
        : Kernel(DomainSpec({{-half_width, half_width}})), V_(std::move(V)), L_(half_width), n_(n) {
        if (n < 3 || !(half_width > 0.0)) throw std::invalid_argument("schrodinger: bad grid");
        h_ = 2.0 * L_ / (n + 1);
        std::vector<double> diag(n), off(n > 1 ? n - 1 : 0);
        for (int i = 0; i < n; ++i) {
            const double v = V_.v(node(i));
            if (!(v >= 0.0)) throw std::domain_error("schrodinger: potential must be nonnegative on the grid");
            diag[i] = 2.0 / (h_ * h_) + v;
        }
        for (auto& o : off) o = -1.0 / (h_ * h_);
        lambda_.resize(n);
        Z_.resize(static_cast<size_t>(n) * n);
        std::vector<lapack_int> isuppz(2 * n);
        lapack_int m = 0;
        const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'A', n, diag.data(), off.data(), 0.0, 0.0, 0, 0,
                                               0.0, &m, lambda_.data(), Z_.data(), n, isuppz.data());
        if (info != 0 || m != n) throw numerical_failure("schrodinger: tridiagonal eigensolver failed", info);
        // fix eigenvector signs so the build is deterministic
        for (int j = 0; j < n; ++j) {
            double* v = &Z_[static_cast<size_t>(j) * n];
            int imax = 0;
            for (int i = 1; i < n; ++i)
                if (std::abs(v[i]) > std::abs(v[imax]) + 1e-14) imax = i;
            if (v[imax] < 0)
                for (int i = 0; i < n; ++i) v[i] = -v[i];
        }
        S_.assign(n, 0.0);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) S_[j] += Z_[static_cast<size_t>(j) * n + i];
        if (extrapolate) fine_ = std::make_shared<SchrodingerKernel>(V_, L_, 2 * n + 1);
    }

    KernelKind kind() const override { return KernelKind::schrodinger; }
    std::string id() const override {
        std::ostringstream o;
        o << "schrodinger(V=" << V_.name << ",L=" << L_ << ",n=" << n_ << (fine_ ? ",richardson" : "") << ")";
        return o.str();
    }
    const Potential& potential() const { return V_; }
    double step() const { return h_; }
    int points() const { return n_; }
    double half_width() const { return L_; }
    double node(int i) const { return -L_ + (i + 1) * h_; }
    const std::vector<double>& eigenvalues() const { return lambda_; }
    bool extrapolated() const { return fine_ != nullptr; }
    double t_max() const override { return L_ * L_ / 16.0; }
    KernelPtr comparison() const override { return make_heat(1); }
    double settle_time(const double* x, const double* y) const override { return t_max(); }

    // kernel between grid nodes i, k; node i of this grid is node 2i+1 of the fine one
    double grid_value(double t, int i, int k) const {
        if (!fine_) return plain_value(t, i, k);
        return (4.0 * fine_->plain_value(t, 2 * i + 1, 2 * k + 1) - plain_value(t, i, k)) / 3.0;
    }
    double plain_value(double t, int i, int k) const {
        if (i < 0 || k < 0 || i >= n_ || k >= n_) return 0.0;
        const int J = terms(t);
        double s = 0.0;
        for (int j = 0; j < J; ++j) {
            const double* v = &Z_[static_cast<size_t>(j) * n_];
            s += std::exp(-t * lambda_[j]) * v[i] * v[k];
        }
        return s / h_;
    }
    double value(double t, const double* x, const double* y) const override {
        double wx, wy;
        const int ix = locate(x[0], wx), iy = locate(y[0], wy);
        double s = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const double w = (a ? wx : 1.0 - wx) * (b ? wy : 1.0 - wy);
                if (w != 0.0) s += w * grid_value(t, ix + a, iy + b);
            }
        return std::max(0.0, s);
    }
    double mass(double t, const double* x, double R) const override {
        double w;
        const int i = locate(x[0], w);
        if (std::isinf(R)) return (1.0 - w) * full_mass(t, i) + w * full_mass(t, i + 1);
        return integrate_1d(t, x[0], x[0] - R, x[0] + R);
    }
    double cell_integral(double t, double x, double a, double b) const override { return integrate_1d(t, x, a, b); }

private:
    // index i of the grid node at or left of x (may be -1 for the boundary) and weight of node i+1
    int locate(double x, double& w) const {
        const double p = (x + L_) / h_ - 1.0;
        int i = static_cast<int>(std::floor(p));
        i = std::clamp(i, -1, n_ - 1);
        w = std::clamp(p - i, 0.0, 1.0);
        return i;
    }
    int terms(double t) const {
        int J = n_;
        const double cut = lambda_[0] + 41.0 / t;
        while (J > 1 && lambda_[J - 1] > cut) --J;
        return J;
    }
    double full_mass(double t, int i) const {
        if (fine_) return (4.0 * fine_->plain_mass(t, 2 * i + 1) - plain_mass(t, i)) / 3.0;
        return plain_mass(t, i);
    }
    double plain_mass(double t, int i) const {
        if (i < 0 || i >= n_) return 0.0;
        const int J = terms(t);
        double s = 0.0;
        for (int j = 0; j < J; ++j) s += std::exp(-t * lambda_[j]) * Z_[static_cast<size_t>(j) * n_ + i] * S_[j];
        return s;
    }

    Potential V_;
    double L_, h_;
    int n_;
    std::vector<double> lambda_, Z_, S_;
    std::shared_ptr<const SchrodingerKernel> fine_;
};

inline KernelPtr make_bessel(double beta) { return std::make_shared<BesselKernel>(beta); }
inline KernelPtr make_laguerre(double alpha) { return std::make_shared<LaguerreKernel>(alpha); }
inline KernelPtr make_subordinate(KernelPtr base, double nu) {
    return std::make_shared<SubordinateKernel>(std::move(base), nu);
}
inline KernelPtr make_product(std::vector<KernelPtr> f) { return std::make_shared<ProductKernel>(std::move(f)); }
inline std::shared_ptr<const SchrodingerKernel> schrodinger_build(Potential V, double half_width = 20.0, int n_points = 2000,
                                                                   bool extrapolate = false) {
    return std::make_shared<SchrodingerKernel>(std::move(V), half_width, n_points, extrapolate);
}

// ---------------------------------------------------------------- checked front end

namespace detail {
inline void check_args(const Kernel& k, double t, const double* x, const double* y) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::domain_error("kernel: t must be finite and > 0");
    if (t > k.t_max()) throw std::domain_error("kernel: t outside the validated range of " + k.id());
    if (!k.domain().contains(x) || (y && !k.domain().contains(y)))
        throw std::domain_error("kernel: point outside the domain of " + k.id());
}
}  // namespace detail

inline double eval(const Kernel& k, double t, const std::vector<double>& x, const std::vector<double>& y) {
    if (static_cast<int>(x.size()) != k.dim() || static_cast<int>(y.size()) != k.dim())
        throw std::invalid_argument("eval: dimension mismatch");
    detail::check_args(k, t, x.data(), y.data());
    return k.value(t, x.data(), y.data());
}

inline double comparison_eval(const Kernel& k, double t, const std::vector<double>& x, const std::vector<double>& y) {
    if (static_cast<int>(x.size()) != k.dim() || static_cast<int>(y.size()) != k.dim())
        throw std::invalid_argument("comparison_eval: dimension mismatch");
    detail::check_args(k, t, x.data(), y.data());
    return k.comparison()->value(t, x.data(), y.data());
}

inline double mass(const Kernel& k, double t, const std::vector<double>& x, double R) {
    if (!(R > 0.0)) throw std::domain_error("mass: radius must be > 0");
    if (static_cast<int>(x.size()) != k.dim()) throw std::invalid_argument("mass: dimension mismatch");
    detail::check_args(k, t, x.data(), nullptr);
    return k.mass(t, x.data(), R);
}

}  // namespace hardy
