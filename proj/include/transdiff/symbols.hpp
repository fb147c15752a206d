#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "transdiff/types.hpp"

namespace transdiff::symbols {

using cplx = std::complex<double>;

// Arguments of the scalar symbols u, v, f_i, g: interval length delta, ratio r,
// spectral variable z off the cut (-inf, max(-r,0)].
struct SymbolArgs {
    double delta;
    double r;
    cplx z;

    double r_m() const { return std::max(-r, 0.0); }
};

// Principal square root, Re >= 0; errors on the open negative real axis.
cplx principal_sqrt(cplx z);

// exp(w) - 1 without cancellation for small |w|.
cplx cexpm1(cplx w);

// (1 - e^{-q})/q with the removable singularity filled in.
cplx psi(cplx q);

enum class UV { U, V };

cplx uv_symbol(UV branch, const SymbolArgs& args);
cplx f_symbol(int index, const SymbolArgs& args);
cplx g_symbol(const SymbolArgs& args);

struct BPair {
    cplx b1;
    cplx b2;
};
BPair b_symbols(const Coefficients& coeffs, cplx z);

// Scalar realizations of the interface operators; the P family is continuous in r
// (its r=0 value is the analytic limit), the Q family is the r=0 family.
enum class PQ { P1p, P2p, P3p, P1m, P2m, P3m, Q1m, Q2m, Q3m };
double pq_scalar(PQ which, const Coefficients& coeffs, double c, double d, double x);

// Scalar interface determinant: case 1 (both ratios nonzero) returns f1(x) < 0,
// case 2 (r_plus nonzero, r_minus zero) returns f2(x) > 0 on its stated domain.
double det_symbol(int case_id, const Coefficients& coeffs, double c, double d, double x);

enum class FactorKind { D1p, D1m, D3p, D3m, DetL1, DetL2, UplusV, UtimesV };

// Relative residual |LHS - RHS| / max(|LHS|, |RHS|, 1e-30) of a determinant-block
// factorization identity at x, with LHS assembled from pq_scalar products and RHS
// from the factorized closed form.
double factorization_residual(FactorKind kind, const Coefficients& coeffs, double c,
                              double d, double x);

struct ScanRanges {
    double delta_min = 0.1;
    double delta_max = 10.0;
    double r_abs_min = 0.01;
    double r_abs_max = 5.0;
    double x_span = 100.0;
    // 0 samples both signs of r; +1 or -1 restricts to one sign.
    int r_sign = 0;
    // Start of the x window; defaults to the symbol's domain edge max(-r, 0).
    std::optional<double> x_start;
    // Required by the b2/det1/det2 scans.
    std::optional<Coefficients> coeffs;
    double c = 1.0;
    double d = 1.0;
    std::uint64_t seed = 12345;
};

struct ScanSample {
    double delta;
    double r;
    double x;
    double value;
    bool violation;
};

struct ScanReport {
    std::string symbol;
    int expected_sign = 0;  // +1 or -1
    int samples = 0;
    int violation_count = 0;
    double min_value = 0.0;
    double max_value = 0.0;
    std::uint64_t seed = 0;
    std::vector<ScanSample> violations;  // capped at 100 entries
    std::vector<ScanSample> all;         // filled only when keep_samples
};

// Symbol ids: u, v, f1, f2, f3 (nonzero-r family), f1_0, f2_0, f3_0 (r = 0),
// g, g0, b2, det1, det2. Deterministic for a fixed seed.
ScanReport sign_scan(const std::string& symbol, const ScanRanges& ranges, int samples,
                     bool keep_samples = false);

}  // namespace transdiff::symbols
