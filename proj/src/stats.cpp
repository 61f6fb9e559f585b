#include "kramers/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kramers {

double kolmogorov_p(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 1.18) {
        // theta-function form, fast for small t
        double y = std::exp(-std::numbers::pi * std::numbers::pi /
                            (8.0 * t * t));
        double cdf = std::sqrt(2.0 * std::numbers::pi) / t *
                     (y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49));
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sum = 0.0, sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        double term = sign * std::exp(-2.0 * k * k * t * t);
        sum += term;
        if (std::abs(term) < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_from_d(double d, double n_eff) {
    double rn = std::sqrt(n_eff);
    return kolmogorov_p((rn + 0.12 + 0.11 / rn) * d);
}

}  // namespace

KsResult ks_exponential(const std::vector<double>& taus, double rate) {
    if (rate <= 0.0) throw UsageError("rate must be positive");
    size_t n = taus.size();
    if (n < 50) throw TooFewSamplesError("KS needs at least 50 samples");
    std::vector<double> xs = taus;
    std::sort(xs.begin(), xs.end());
    if (xs.front() <= 0.0) throw UsageError("samples must be positive");
    double d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double cdf = 1.0 - std::exp(-rate * xs[i]);
        d = std::max(d, std::abs(cdf - (double)i / n));
        d = std::max(d, std::abs((double)(i + 1) / n - cdf));
    }
    KsResult r;
    r.statistic = d;
    r.n_effective = (double)n;
    r.p_value = ks_p_from_d(d, r.n_effective);
    return r;
}

KsResult ks_two_sample(const std::vector<double>& a,
                       const std::vector<double>& b) {
    if (a.size() < 50 || b.size() < 50)
        throw TooFewSamplesError("KS needs at least 50 samples per side");
    std::vector<double> xs = a, ys = b;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    size_t i = 0, j = 0, n1 = xs.size(), n2 = ys.size();
    double d = 0.0;
    while (i < n1 && j < n2) {
        double x = xs[i], y = ys[j];
        if (x <= y) while (i < n1 && xs[i] == x) ++i;
        if (y <= x) while (j < n2 && ys[j] == y) ++j;
        d = std::max(d, std::abs((double)i / n1 - (double)j / n2));
    }
    KsResult r;
    r.statistic = d;
    r.n_effective = (double)n1 * (double)n2 / (double)(n1 + n2);
    r.p_value = ks_p_from_d(d, r.n_effective);
    return r;
}

double regularized_gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw UsageError("gamma_q needs a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by power series, Q = 1 - P
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - gln);
        return std::clamp(1.0 - p, 0.0, 1.0);
    }
    // Lentz continued fraction for Q directly
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, hh = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        hh *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    double q = hh * std::exp(-x + a * std::log(x) - gln);
    return std::clamp(q, 0.0, 1.0);
}

namespace {

// Strictly increasing interior cut points at quantiles k/bins; duplicates
// collapse, so heavily tied data yields fewer effective bins.
std::vector<double> quantile_cuts(std::vector<double> xs, int bins) {
    std::sort(xs.begin(), xs.end());
    std::vector<double> cuts;
    for (int k = 1; k < bins; ++k) {
        size_t at = std::min(xs.size() - 1, k * xs.size() / bins);
        double q = xs[at];
        if (cuts.empty() || q > cuts.back()) cuts.push_back(q);
    }
    return cuts;
}

int bin_of(double x, const std::vector<double>& cuts) {
    return (int)(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
}

}  // namespace

Chi2Result chi2_independence(const std::vector<double>& tau,
                             const std::vector<double>& loc, int tau_bins,
                             int loc_bins) {
    size_t n = tau.size();
    if (n != loc.size()) throw UsageError("length mismatch");
    if (n == 0) throw UsageError("empty sample");
    if (tau_bins < 2) throw UsageError("tau_bins must be at least 2");

    std::vector<double> loc_levels = loc;
    std::sort(loc_levels.begin(), loc_levels.end());
    loc_levels.erase(std::unique(loc_levels.begin(), loc_levels.end()),
                     loc_levels.end());
    bool categorical = loc_bins <= 0 && loc_levels.size() <= 8;
    if (loc_bins <= 0) loc_bins = categorical ? (int)loc_levels.size() : 4;
    if (loc_bins < 2 || (categorical && loc_levels.size() < 2))
        throw SparseTableError("exit locations take a single value");

    for (int tb = tau_bins; tb >= 2; --tb) {
        for (int lb = loc_bins; lb >= 2; --lb) {
            std::vector<double> tcuts = quantile_cuts(tau, tb);
            int rows = (int)tcuts.size() + 1;
            std::vector<double> lcuts;
            int cols;
            if (categorical) {
                if (lb != loc_bins) break;  // categories are not merged
                cols = (int)loc_levels.size();
            } else {
                lcuts = quantile_cuts(loc, lb);
                cols = (int)lcuts.size() + 1;
            }
            if (rows < 2 || cols < 2) continue;

            std::vector<long> table((size_t)rows * cols, 0);
            for (size_t k = 0; k < n; ++k) {
                int r = bin_of(tau[k], tcuts);
                int c;
                if (categorical) {
                    c = (int)(std::lower_bound(loc_levels.begin(),
                                               loc_levels.end(), loc[k]) -
                              loc_levels.begin());
                } else {
                    c = bin_of(loc[k], lcuts);
                }
                ++table[(size_t)r * cols + c];
            }
            std::vector<double> rsum(rows, 0.0), csum(cols, 0.0);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) {
                    rsum[r] += (double)table[(size_t)r * cols + c];
                    csum[c] += (double)table[(size_t)r * cols + c];
                }
            double min_expected = 1e300, stat = 0.0;
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) {
                    double e = rsum[r] * csum[c] / (double)n;
                    min_expected = std::min(min_expected, e);
                    if (e > 0.0) {
                        double o = (double)table[(size_t)r * cols + c];
                        stat += (o - e) * (o - e) / e;
                    }
                }
            if (min_expected < 5.0) continue;

            Chi2Result out;
            out.statistic = stat;
            out.dof = (rows - 1) * (cols - 1);
            out.p_value = chi2_sf(stat, out.dof);
            out.tau_bins = rows;
            out.loc_bins = cols;
            return out;
        }
    }
    throw SparseTableError("no binning reaches 5 expected counts per cell");
}

double tv_histogram(const std::vector<double>& a, const std::vector<double>& b,
                    double lo, double hi, int bins) {
    if (bins < 1 || hi <= lo) throw UsageError("bad histogram layout");
    if (a.empty() || b.empty()) throw UsageError("empty sample");
    auto fill = [&](const std::vector<double>& xs) {
        std::vector<double> h(bins, 0.0);
        for (double x : xs) {
            int k = (int)std::floor((x - lo) / (hi - lo) * bins);
            h[std::clamp(k, 0, bins - 1)] += 1.0 / xs.size();
        }
        return h;
    };
    std::vector<double> pa = fill(a), pb = fill(b);
    double tv = 0.0;
    for (int k = 0; k < bins; ++k) tv += std::abs(pa[k] - pb[k]);
    return 0.5 * tv;
}

}  // namespace kramers
