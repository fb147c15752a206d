#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "transdiff/expression.hpp"
#include "transdiff/types.hpp"

namespace transdiff {

enum class CaseKind { BothNonzero, RminusZero, RplusZero, BothZero };

struct CaseLabel {
    CaseKind kind = CaseKind::BothZero;
    int sign_plus = 0;   // sign of r_plus when BothNonzero, else 0
    int sign_minus = 0;  // sign of r_minus when BothNonzero, else 0
    std::string str() const;
    bool operator==(const CaseLabel&) const = default;
};

// Case of the admissibility theorem the coefficient set falls into.
// Zero test: |r| < 1e-12 * max(1, |r_plus|, |r_minus|).
CaseLabel classify(const Coefficients& coeffs);

struct SpectrumInfo {
    double lambda_min = 0;  // smallest eigenvalue of the cross-section operator
    double inv_norm = 0;    // resolvent norm bound, 1/lambda_min in the diagonal model

    static SpectrumInfo from_lambda_min(double lambda_min);
    static SpectrumInfo from_geometry(const Geometry& geometry);
};

struct Condition {
    std::string name;
    double value = 0;
    double threshold = 0;
    std::string sense;  // ">=" or "<="
    bool satisfied = false;
};

struct RegimeReport {
    CaseLabel label;
    std::vector<Condition> conditions;
    std::optional<double> t_parameter;  // case with r_minus = 0, r_plus > 0 (or mirror)
    bool spectral_ok = false;
    double lambda_min = 0;
    double spectral_threshold = 0;  // max(-r_plus, -r_minus, 0)
    bool admissible = false;
    std::vector<std::string> notes;

    std::string to_text() const;
    std::vector<std::pair<std::string, std::string>> to_kv() const;
};

// Evaluates every admissibility inequality for the classified case, with the
// optional free parameter t of the one-sided-zero case (grid-searched when
// omitted).  Weak inequalities carry a relative tolerance of 1e-12.
RegimeReport check_theorem1(const Coefficients& coeffs, const SpectrumInfo& spectrum,
                            std::optional<double> t = std::nullopt);

struct ProblemData {
    expr::Expression g_minus;     // forcing on (a,gamma) x (0,ell), variables x,y
    expr::Expression g_plus;      // forcing on (gamma,b) x (0,ell), variables x,y
    expr::Expression phi1_minus;  // trace of u at x=a, variable y
    expr::Expression phi2_minus;  // trace of du/dx at x=a, variable y
    expr::Expression phi1_plus;   // trace of u at x=b, variable y
    expr::Expression phi2_plus;   // trace of du/dx at x=b, variable y
};

struct Problem {
    Coefficients coeffs;
    Geometry geometry;
    ProblemData data;
};

// Reflection x -> a+b-x: swaps the two habitats.  Boundary value traces swap;
// derivative traces swap and flip sign; forcings swap with a reflection
// wrapper.  Applying mirror_problem twice restores the input bit for bit.
Problem mirror_problem(const Problem& p);

}  // namespace transdiff
