#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kramers {

using Pt = std::array<double, 2>;

inline Pt pt(double x) { return {x, 0.0}; }
inline Pt pt(double x, double y) { return {x, y}; }

inline double norm2(const Pt& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1]); }
inline Pt operator-(const Pt& a, const Pt& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Pt operator+(const Pt& a, const Pt& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Pt operator*(double s, const Pt& a) { return {s * a[0], s * a[1]}; }
inline double dot(const Pt& a, const Pt& b) { return a[0] * b[0] + a[1] * b[1]; }

// Symmetric 2x2 matrix; 1D fields use only xx.
struct Sym2 {
    double xx = 0, xy = 0, yy = 0;

    double det(int dim) const { return dim == 1 ? xx : xx * yy - xy * xy; }
    double trace(int dim) const { return dim == 1 ? xx : xx + yy; }
    // Eigenvalues ascending. For dim 1 both slots hold xx.
    std::array<double, 2> eigs(int dim) const {
        if (dim == 1) return {xx, xx};
        double m = 0.5 * (xx + yy);
        double d = std::sqrt(0.25 * (xx - yy) * (xx - yy) + xy * xy);
        return {m - d, m + d};
    }
};

struct KramersError : std::runtime_error {
    explicit KramersError(const std::string& w) : std::runtime_error(w) {}
};

#define KRAMERS_ERROR(Name)                                      \
    struct Name : KramersError {                                 \
        explicit Name(const std::string& w) : KramersError(w) {} \
    }

KRAMERS_ERROR(TooCoarseError);
KRAMERS_ERROR(OverflowError);
KRAMERS_ERROR(DimensionError);
KRAMERS_ERROR(NoConvergenceError);
KRAMERS_ERROR(FactorizationError);
KRAMERS_ERROR(InconclusiveError);
KRAMERS_ERROR(SignError);
KRAMERS_ERROR(NegativeMassError);
KRAMERS_ERROR(DegenerateMinimumError);
KRAMERS_ERROR(NegativeNormalDerivativeError);
KRAMERS_ERROR(SupportViolationError);
KRAMERS_ERROR(IllConditionedError);
KRAMERS_ERROR(EmptyCriticalSetError);
KRAMERS_ERROR(EnvelopeBustError);
KRAMERS_ERROR(TooFewSamplesError);
KRAMERS_ERROR(SparseTableError);
KRAMERS_ERROR(UsageError);

#undef KRAMERS_ERROR

inline constexpr const char* kVersion = "kramers 1.0.0";
inline constexpr const char* kSchemaVersion = "1";

}  // namespace kramers
