#include "kramers/catalog.hpp"

#include <algorithm>
#include <cmath>

namespace kramers {

namespace {

// C^3 smoothstep on [0,1]: s7(0)=0, s7(1)=1, s7'=140 u^3 (1-u)^3.
double s7(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * u * u * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)));
}
double s7p(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    double a = u * (1.0 - u);
    return 140.0 * a * a * a;
}
double s7pp(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    double a = u * (1.0 - u);
    return 420.0 * a * a * (1.0 - 2.0 * u);
}

class Harmonic1D final : public ScalarField {
  public:
    explicit Harmonic1D(double x0) : x0_(x0) {}
    int dim() const override { return 1; }
    double value(const Pt& x) const override {
        double d = x[0] - x0_;
        return 0.5 * d * d;
    }
    Pt grad(const Pt& x) const override { return {x[0] - x0_, 0.0}; }
    Sym2 hess(const Pt&) const override { return {1.0, 0.0, 0.0}; }
    std::string name() const override { return "harmonic1d"; }

  private:
    double x0_;
};

class DoubleWell1D final : public ScalarField {
  public:
    DoubleWell1D(double barrier, double depth) : b_(barrier), depth_(depth) {}
    int dim() const override { return 1; }
    double value(const Pt& p) const override {
        double x = p[0], q = x * x - 0.25;
        return 16.0 * b_ * q * q - 0.5 * depth_ * std::sin(M_PI * x);
    }
    Pt grad(const Pt& p) const override {
        double x = p[0];
        return {64.0 * b_ * x * (x * x - 0.25) -
                    0.5 * depth_ * M_PI * std::cos(M_PI * x),
                0.0};
    }
    Sym2 hess(const Pt& p) const override {
        double x = p[0];
        return {64.0 * b_ * (3.0 * x * x - 0.25) +
                    0.5 * depth_ * M_PI * M_PI * std::sin(M_PI * x),
                0.0, 0.0};
    }
    std::string name() const override { return "doublewell1d"; }

  private:
    double b_, depth_;
};

class Polynomial1D final : public ScalarField {
  public:
    Polynomial1D(std::vector<double> coeffs, std::string name)
        : c_(std::move(coeffs)), name_(std::move(name)) {
        if (c_.empty()) c_.push_back(0.0);
    }
    int dim() const override { return 1; }
    double value(const Pt& p) const override {
        double v = 0.0;
        for (size_t k = c_.size(); k-- > 0;) v = v * p[0] + c_[k];
        return v;
    }
    Pt grad(const Pt& p) const override {
        double v = 0.0;
        for (size_t k = c_.size(); k-- > 1;) v = v * p[0] + k * c_[k];
        return {v, 0.0};
    }
    Sym2 hess(const Pt& p) const override {
        double v = 0.0;
        for (size_t k = c_.size(); k-- > 2;) v = v * p[0] + k * (k - 1) * c_[k];
        return {v, 0.0, 0.0};
    }
    std::string name() const override { return name_; }

  private:
    std::vector<double> c_;
    std::string name_;
};

// Three asymmetric wells at -0.7, 0, 0.7 with distinct depths and saddles:
// f' = A x (x+0.7)(x+0.33)(x-0.37)(x-0.7), normalized so f(-0.7) = 0.
class ThreeWell1D final : public ScalarField {
  public:
    int dim() const override { return 1; }
    double value(const Pt& p) const override { return kA * (F(p[0]) - F(-0.7)); }
    Pt grad(const Pt& p) const override {
        double x = p[0];
        return {kA * x * (x + 0.7) * (x + 0.33) * (x - 0.37) * (x - 0.7), 0.0};
    }
    Sym2 hess(const Pt& p) const override {
        // derivative of x^5 - 0.04 x^4 - 0.6121 x^3 + 0.0196 x^2 + 0.059829 x
        double x = p[0];
        double d = ((((5.0 * x - 0.16) * x - 1.8363) * x + 0.0392) * x) + 0.059829;
        return {kA * d, 0.0, 0.0};
    }
    std::string name() const override { return "threewell1d"; }

  private:
    static constexpr double kA = 80.63233583102732;
    static double F(double x) {
        return ((((((x / 6.0) - 0.008) * x - 0.153025) * x + 0.0196 / 3.0) * x +
                 0.0299145) *
                x * x);
    }
};

// Flat-bottom well: f = 0 on [a1,b1], rising C^3 to height 1 over width 1.105.
class FlatBottom1D final : public ScalarField {
  public:
    FlatBottom1D(double a1, double b1) : a1_(a1), b1_(b1) {}
    int dim() const override { return 1; }
    double value(const Pt& p) const override {
        double x = p[0];
        if (x > b1_) return s7((x - b1_) / kW);
        if (x < a1_) return s7((a1_ - x) / kW);
        return 0.0;
    }
    Pt grad(const Pt& p) const override {
        double x = p[0];
        if (x > b1_) return {s7p((x - b1_) / kW) / kW, 0.0};
        if (x < a1_) return {-s7p((a1_ - x) / kW) / kW, 0.0};
        return {0.0, 0.0};
    }
    Sym2 hess(const Pt& p) const override {
        double x = p[0];
        if (x > b1_) return {s7pp((x - b1_) / kW) / (kW * kW), 0.0, 0.0};
        if (x < a1_) return {s7pp((a1_ - x) / kW) / (kW * kW), 0.0, 0.0};
        return {0.0, 0.0, 0.0};
    }
    std::string smoothness() const override { return "C3 at plateau edges"; }
    std::string name() const override { return "flatbottom1d"; }

  private:
    static constexpr double kW = 1.105;
    double a1_, b1_;
};

// Five alternating plateaus (three minima, two maxima) joined by C^3 steps;
// outer walls rise to 1.6 over width 0.7.
class FlatMulti1D final : public ScalarField {
  public:
    int dim() const override { return 1; }
    double value(const Pt& p) const override { return eval(p[0], 0); }
    Pt grad(const Pt& p) const override { return {eval(p[0], 1), 0.0}; }
    Sym2 hess(const Pt& p) const override { return {eval(p[0], 2), 0.0, 0.0}; }
    std::string smoothness() const override { return "C3 at plateau edges"; }
    std::string name() const override { return "flatmulti1d"; }

  private:
    static constexpr int kN = 5;
    static constexpr double kA[kN] = {-0.65, -0.4, -0.075, 0.3, 0.5};
    static constexpr double kB[kN] = {-0.5, -0.3, 0.075, 0.4, 0.65};
    static constexpr double kV[kN] = {0.0, 0.5, 0.1, 0.45, 0.04};
    static constexpr double kWall = 1.6, kWallW = 0.7;

    static double step(double u, double v0, double v1, double w, int deriv) {
        if (deriv == 0) return v0 + (v1 - v0) * s7(u);
        if (deriv == 1) return (v1 - v0) * s7p(u) / w;
        return (v1 - v0) * s7pp(u) / (w * w);
    }
    static double eval(double x, int deriv) {
        if (x < kA[0]) {
            double v = step((kA[0] - x) / kWallW, kV[0], kWall, kWallW, deriv);
            return (deriv == 1) ? -v : v;
        }
        if (x > kB[kN - 1])
            return step((x - kB[kN - 1]) / kWallW, kV[kN - 1], kWall, kWallW, deriv);
        for (int k = 0; k < kN; ++k) {
            if (x <= kB[k]) return deriv == 0 ? kV[k] : 0.0;
            if (k + 1 < kN && x < kA[k + 1]) {
                double w = kA[k + 1] - kB[k];
                return step((x - kB[k]) / w, kV[k], kV[k + 1], w, deriv);
            }
        }
        return deriv == 0 ? kV[kN - 1] : 0.0;
    }
};

// Radial 2D base: f(x) = phi(|x|) with phi'(0) = 0.
class RadialField2D : public ScalarField {
  public:
    int dim() const override { return 2; }
    double value(const Pt& x) const override { return phi(norm2(x)); }
    Pt grad(const Pt& x) const override {
        double r = norm2(x);
        if (r < 1e-12) return {0.0, 0.0};
        double s = dphi(r) / r;
        return {s * x[0], s * x[1]};
    }
    Sym2 hess(const Pt& x) const override {
        double r = norm2(x);
        if (r < 1e-8) {
            double c = ddphi(0.0);
            return {c, 0.0, c};
        }
        double a = ddphi(r), b = dphi(r) / r;
        double cx = x[0] / r, cy = x[1] / r;
        return {b + (a - b) * cx * cx, (a - b) * cx * cy, b + (a - b) * cy * cy};
    }
    virtual double phi(double r) const = 0;
    virtual double dphi(double r) const = 0;
    virtual double ddphi(double r) const = 0;
};

// Bump of height e^{-1} at the origin vanishing flat at |x|=1, then flat
// annulus 1<=|x|<=2, then quartic growth (|x|/2-1)^4.
class Radial2D final : public RadialField2D {
  public:
    double phi(double r) const override { return inner(r, 0) + outer(r, 0); }
    double dphi(double r) const override { return inner(r, 1) + outer(r, 1); }
    double ddphi(double r) const override { return inner(r, 2) + outer(r, 2); }
    std::string smoothness() const override { return "C3 at |x|=2"; }
    std::string name() const override { return "radial2d"; }

  private:
    static double inner(double r, int deriv) {
        if (r >= 1.0) return 0.0;
        double t = r * r - 1.0;  // negative
        double e = 1.0 / (t * t);
        if (e > 700.0) return 0.0;
        double E = std::exp(-e);
        double q = 4.0 * r / (t * t * t);
        if (deriv == 0) return E;
        if (deriv == 1) return E * q;
        return E * (q * q + 4.0 / (t * t * t) - 24.0 * r * r / (t * t * t * t));
    }
    static double outer(double r, int deriv) {
        if (r <= 2.0) return 0.0;
        double u = 0.5 * r - 1.0;
        if (deriv == 0) return u * u * u * u;
        if (deriv == 1) return 2.0 * u * u * u;
        return 3.0 * u * u;
    }
};

// Natural cubic spline in the radius, clamped to phi'(0)=0 at the left end.
class RadialSpline2D final : public RadialField2D {
  public:
    RadialSpline2D(std::vector<double> r, std::vector<double> v)
        : r_(std::move(r)), v_(std::move(v)) {
        size_t n = r_.size();
        if (n < 3 || v_.size() != n)
            throw UsageError("radialspline2d needs >= 3 (r, value) knots");
        // Tridiagonal solve for second derivatives M, clamped-left/natural-right.
        std::vector<double> h(n - 1), diag(n), sub(n), sup(n), rhs(n);
        for (size_t i = 0; i + 1 < n; ++i) h[i] = r_[i + 1] - r_[i];
        diag[0] = h[0] / 3.0;
        sup[0] = h[0] / 6.0;
        rhs[0] = (v_[1] - v_[0]) / h[0];  // minus clamped slope 0
        for (size_t i = 1; i + 1 < n; ++i) {
            sub[i] = h[i - 1] / 6.0;
            diag[i] = (h[i - 1] + h[i]) / 3.0;
            sup[i] = h[i] / 6.0;
            rhs[i] = (v_[i + 1] - v_[i]) / h[i] - (v_[i] - v_[i - 1]) / h[i - 1];
        }
        m_.assign(n, 0.0);
        // Thomas algorithm on rows 0..n-2 (M[n-1] = 0 by the natural condition).
        size_t m = n - 1;
        std::vector<double> cp(m), dp(m);
        cp[0] = sup[0] / diag[0];
        dp[0] = rhs[0] / diag[0];
        for (size_t i = 1; i < m; ++i) {
            double den = diag[i] - sub[i] * cp[i - 1];
            cp[i] = sup[i] / den;
            dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / den;
        }
        m_[m - 1] = dp[m - 1];
        for (size_t i = m - 1; i-- > 0;) m_[i] = dp[i] - cp[i] * m_[i + 1];
    }

    double phi(double r) const override { return eval(r, 0); }
    double dphi(double r) const override { return eval(r, 1); }
    double ddphi(double r) const override { return eval(r, 2); }
    std::string smoothness() const override { return "C2"; }
    std::string name() const override { return "radialspline2d"; }

  private:
    std::vector<double> r_, v_, m_;

    double eval(double r, int deriv) const {
        size_t n = r_.size();
        if (r >= r_[n - 1]) {  // linear continuation, C2 by the natural end
            double slope = slope_at_end();
            if (deriv == 0) return v_[n - 1] + slope * (r - r_[n - 1]);
            if (deriv == 1) return slope;
            return 0.0;
        }
        size_t i = std::upper_bound(r_.begin(), r_.end(), r) - r_.begin();
        i = (i == 0) ? 0 : i - 1;
        if (i >= n - 1) i = n - 2;
        double h = r_[i + 1] - r_[i];
        double A = (r_[i + 1] - r) / h, B = (r - r_[i]) / h;
        if (deriv == 0)
            return A * v_[i] + B * v_[i + 1] +
                   ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h /
                       6.0;
        if (deriv == 1)
            return (v_[i + 1] - v_[i]) / h -
                   (3.0 * A * A - 1.0) * h * m_[i] / 6.0 +
                   (3.0 * B * B - 1.0) * h * m_[i + 1] / 6.0;
        return A * m_[i] + B * m_[i + 1];
    }
    double slope_at_end() const {
        size_t n = r_.size();
        double h = r_[n - 1] - r_[n - 2];
        return (v_[n - 1] - v_[n - 2]) / h + h * m_[n - 2] / 6.0;
    }
};

class MultiWell2D final : public ScalarField {
  public:
    MultiWell2D(std::vector<Pt> centers, std::vector<double> radii, double amp) {
        for (size_t k = 0; k < centers.size(); ++k)
            wells_.emplace_back(2, centers[k], radii[k], amp);
    }
    int dim() const override { return 2; }
    double value(const Pt& x) const override {
        double v = 0.5 * dot(x, x);
        for (const auto& w : wells_) v -= w.value(x);
        return v;
    }
    Pt grad(const Pt& x) const override {
        Pt g = x;
        for (const auto& w : wells_) {
            Pt b = w.grad(x);
            g[0] -= b[0];
            g[1] -= b[1];
        }
        return g;
    }
    Sym2 hess(const Pt& x) const override {
        Sym2 h{1.0, 0.0, 1.0};
        for (const auto& w : wells_) {
            Sym2 b = w.hess(x);
            h.xx -= b.xx;
            h.xy -= b.xy;
            h.yy -= b.yy;
        }
        return h;
    }
    std::string name() const override { return "multiwell2d"; }

  private:
    std::vector<BumpField> wells_;
};

}  // namespace

BumpField::BumpField(int dim, Pt center, double radius, double amplitude)
    : dim_(dim), center_(center), radius_(radius), amp_(amplitude) {
    if (radius <= 0.0) throw UsageError("bump radius must be positive");
}

double BumpField::value(const Pt& x) const {
    Pt d = x - center_;
    double s2 = dot(d, d) / (radius_ * radius_);
    if (s2 >= 1.0) return 0.0;
    double t = 1.0 - s2;
    if (1.0 / t > 700.0) return 0.0;
    return amp_ * std::exp(1.0 - 1.0 / t);
}

Pt BumpField::grad(const Pt& x) const {
    Pt d = x - center_;
    double r2 = radius_ * radius_;
    double s2 = dot(d, d) / r2;
    if (s2 >= 1.0) return {0.0, 0.0};
    double t = 1.0 - s2;
    if (1.0 / t > 700.0) return {0.0, 0.0};
    double w = amp_ * std::exp(1.0 - 1.0 / t);
    double c = -2.0 * w / (t * t * r2);
    return {c * d[0], c * d[1]};
}

Sym2 BumpField::hess(const Pt& x) const {
    Pt d = x - center_;
    double r2 = radius_ * radius_;
    double s2 = dot(d, d) / r2;
    if (s2 >= 1.0) return {0.0, 0.0, 0.0};
    double t = 1.0 - s2;
    if (1.0 / t > 700.0) return {0.0, 0.0, 0.0};
    double w = amp_ * std::exp(1.0 - 1.0 / t);
    double wp = -w / (t * t);                       // d/d(s2)
    double wpp = w * (1.0 - 2.0 * t) / (t * t * t * t);
    double a = 4.0 * wpp / (r2 * r2), b = 2.0 * wp / r2;
    Sym2 h;
    h.xx = a * d[0] * d[0] + b;
    h.xy = a * d[0] * d[1];
    h.yy = a * d[1] * d[1] + b;
    if (dim_ == 1) h.xy = h.yy = 0.0;
    return h;
}

SumField::SumField(std::vector<FieldPtr> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw UsageError("SumField needs at least one term");
    for (const auto& t : terms_)
        if (t->dim() != terms_[0]->dim())
            throw DimensionError("SumField terms must share dimension");
}

double SumField::value(const Pt& x) const {
    double v = 0.0;
    for (const auto& t : terms_) v += t->value(x);
    return v;
}

Pt SumField::grad(const Pt& x) const {
    Pt g{0.0, 0.0};
    for (const auto& t : terms_) {
        Pt gi = t->grad(x);
        g[0] += gi[0];
        g[1] += gi[1];
    }
    return g;
}

Sym2 SumField::hess(const Pt& x) const {
    Sym2 h;
    for (const auto& t : terms_) {
        Sym2 hi = t->hess(x);
        h.xx += hi.xx;
        h.xy += hi.xy;
        h.yy += hi.yy;
    }
    return h;
}

std::string SumField::smoothness() const { return terms_[0]->smoothness(); }

std::string SumField::name() const { return terms_[0]->name() + "+bias"; }

FieldPtr make_bump(int dim, Pt center, double radius, double amplitude) {
    return std::make_shared<BumpField>(dim, center, radius, amplitude);
}

FieldPtr make_field(const std::string& name, const FieldParams& p) {
    if (name == "harmonic1d")
        return std::make_shared<Harmonic1D>(p.get("x0", 0.0));
    if (name == "doublewell1d")
        return std::make_shared<DoubleWell1D>(p.get("barrier", 1.0 / 16.0),
                                              p.get("depth", 0.0));
    if (name == "polynomial1d") {
        auto it = p.vec.find("coeffs");
        std::vector<double> c =
            it == p.vec.end() ? std::vector<double>{0.0, 0.0, 0.5} : it->second;
        return std::make_shared<Polynomial1D>(c, "polynomial1d");
    }
    if (name == "threewell1d") return std::make_shared<ThreeWell1D>();
    if (name == "flatbottom1d")
        return std::make_shared<FlatBottom1D>(p.get("a1", -0.15), p.get("b1", 0.15));
    if (name == "flatmulti1d") return std::make_shared<FlatMulti1D>();
    if (name == "fig-ok-1d")
        return std::make_shared<Polynomial1D>(
            std::vector<double>{0.0, 0.165, -1.6375, -1.0 / 3.0, 2.5}, "fig-ok-1d");
    if (name == "fig-notok-1d")
        return std::make_shared<Polynomial1D>(
            std::vector<double>{0.0, 0.44625, -1.1125, -6.5 / 3.0, 2.5},
            "fig-notok-1d");
    if (name == "radial2d") return std::make_shared<Radial2D>();
    if (name == "multiwell2d") {
        std::vector<Pt> centers = {{0.8, 0.0}, {-0.8, 0.0}};
        std::vector<double> radii = {0.45, 0.45};
        auto itc = p.vec.find("centers");
        if (itc != p.vec.end()) {
            centers.clear();
            for (size_t i = 0; i + 1 < itc->second.size(); i += 2)
                centers.push_back({itc->second[i], itc->second[i + 1]});
        }
        auto itr = p.vec.find("radii");
        if (itr != p.vec.end()) radii = itr->second;
        if (radii.size() != centers.size())
            throw UsageError("multiwell2d centers/radii size mismatch");
        return std::make_shared<MultiWell2D>(centers, radii, p.get("amplitude", 1.2));
    }
    if (name == "radialspline2d") {
        std::vector<double> r = {0.0, 0.6, 1.2, 1.8, 2.4};
        std::vector<double> v = {0.5, 0.0, 0.3, 0.8, 1.5};
        auto itr = p.vec.find("knots_r");
        auto itv = p.vec.find("knots_v");
        if (itr != p.vec.end()) r = itr->second;
        if (itv != p.vec.end()) v = itv->second;
        return std::make_shared<RadialSpline2D>(r, v);
    }
    throw UsageError("unknown potential: " + name);
}

std::vector<std::string> catalog_names() {
    return {"harmonic1d",  "doublewell1d", "polynomial1d",   "threewell1d",
            "flatbottom1d", "flatmulti1d",  "fig-ok-1d",      "fig-notok-1d",
            "radial2d",     "multiwell2d",  "radialspline2d"};
}

}  // namespace kramers
