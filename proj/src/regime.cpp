#include "transdiff/regime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace transdiff {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool weak_holds(double value, double threshold, const std::string& sense) {
    double tol = 1e-12 * std::max({1.0, std::fabs(value), std::fabs(threshold)});
    if (sense == ">=") return value >= threshold - tol;
    return value <= threshold + tol;
}

Condition make_condition(std::string name, double value, double threshold, std::string sense) {
    Condition c;
    c.name = std::move(name);
    c.value = value;
    c.threshold = threshold;
    c.sense = std::move(sense);
    c.satisfied = weak_holds(c.value, c.threshold, c.sense);
    return c;
}

// Lower bound on the positive nonzero ratio in the one-sided-zero case, as a
// function of the free parameter t; decreasing in t.
double positive_bound(double t, double k_num, double k_den) {
    double root = std::sqrt(t + 1.0) + std::sqrt(t);
    return root * root / (t * t) * (k_num * k_num) / (4.0 * k_den * k_den);
}

// One-sided-zero case: ratio_cond is the k ratio bound, then the sign-specific
// bound on the nonzero r (r_nz).  k_num/k_den follow the case orientation.
void one_sided_conditions(RegimeReport& rep, double r_nz, double k_num, double k_den,
                          const std::string& tag, const SpectrumInfo& spectrum,
                          std::optional<double> t) {
    rep.conditions.push_back(
        make_condition("k" + std::string(tag == "+" ? "-" : "+") + "/k" + tag, k_den / k_num, 2.0, "<="));
    if (r_nz > 0) {
        double t_max = 1.0 / (r_nz * spectrum.inv_norm);
        double t_used;
        if (t) {
            if (!(*t > 0.0 && *t < t_max))
                throw Error("regime", "t parameter " + fmt(*t) + " outside the open interval (0, " +
                                          fmt(t_max) + ")");
            t_used = *t;
        } else {
            double lo = std::log(1e-6), hi = std::log(1.0 - 1e-6);
            t_used = t_max * std::exp(hi);
            double best_margin = r_nz - positive_bound(t_used, k_num, k_den);
            for (int i = 0; i < 64; ++i) {
                double ti = t_max * std::exp(lo + (hi - lo) * i / 63.0);
                double margin = r_nz - positive_bound(ti, k_num, k_den);
                if (margin > best_margin) {
                    best_margin = margin;
                    t_used = ti;
                }
            }
            rep.notes.push_back("t chosen by a 64-point log grid over (0, " + fmt(t_max) + ")");
        }
        rep.t_parameter = t_used;
        rep.conditions.push_back(make_condition("r" + tag + " lower bound at t",
                                                r_nz, positive_bound(t_used, k_num, k_den), ">="));
    } else {
        double threshold = -27.0 * k_num * k_num / (64.0 * k_den * k_den);
        rep.conditions.push_back(make_condition("r" + tag + " upper bound", r_nz, threshold, "<="));
    }
}

}  // namespace

std::string CaseLabel::str() const {
    switch (kind) {
        case CaseKind::BothNonzero: {
            std::string s = "BothNonzero(";
            s += (sign_plus > 0 ? '+' : '-');
            s += ',';
            s += (sign_minus > 0 ? '+' : '-');
            s += ')';
            return s;
        }
        case CaseKind::RminusZero: return "RminusZero";
        case CaseKind::RplusZero: return "RplusZero";
        case CaseKind::BothZero: return "BothZero";
    }
    return "?";
}

CaseLabel classify(const Coefficients& coeffs) {
    coeffs.validate();
    double rp = coeffs.r_plus();
    double rm = coeffs.r_minus();
    double scale = 1e-12 * std::max({1.0, std::fabs(rp), std::fabs(rm)});
    bool plus_zero = std::fabs(rp) < scale;
    bool minus_zero = std::fabs(rm) < scale;
    CaseLabel label;
    if (plus_zero && minus_zero) {
        label.kind = CaseKind::BothZero;
    } else if (minus_zero) {
        label.kind = CaseKind::RminusZero;
    } else if (plus_zero) {
        label.kind = CaseKind::RplusZero;
    } else {
        label.kind = CaseKind::BothNonzero;
        label.sign_plus = rp > 0 ? 1 : -1;
        label.sign_minus = rm > 0 ? 1 : -1;
    }
    return label;
}

SpectrumInfo SpectrumInfo::from_lambda_min(double lambda_min) {
    if (!(lambda_min > 0)) throw Error("regime", "lambda_min must be positive");
    return SpectrumInfo{lambda_min, 1.0 / lambda_min};
}

SpectrumInfo SpectrumInfo::from_geometry(const Geometry& geometry) {
    geometry.validate();
    return from_lambda_min(geometry.lambda(1));
}

RegimeReport check_theorem1(const Coefficients& coeffs, const SpectrumInfo& spectrum,
                            std::optional<double> t) {
    if (!(spectrum.lambda_min > 0)) throw Error("regime", "lambda_min must be positive");
    RegimeReport rep;
    rep.label = classify(coeffs);
    rep.lambda_min = spectrum.lambda_min;
    rep.spectral_threshold = coeffs.r_max();
    rep.spectral_ok = spectrum.lambda_min > rep.spectral_threshold;
    rep.notes.push_back("resolvent norm modeled as 1/lambda_min (diagonal sine model, p = 2)");

    double kp = coeffs.k_plus, km = coeffs.k_minus;
    double lp = coeffs.l_plus, lm = coeffs.l_minus;

    switch (rep.label.kind) {
        case CaseKind::BothNonzero:
            if (rep.label.sign_plus > 0 && rep.label.sign_minus > 0) {
                rep.notes.push_back("both ratios positive: no coefficient inequality required");
            } else if (rep.label.sign_plus < 0 && rep.label.sign_minus < 0) {
                rep.conditions.push_back(
                    make_condition("(l+ - l-)*(k+ - k-)", (lp - lm) * (kp - km), 0.0, ">="));
            } else if (rep.label.sign_plus > 0) {  // (+,-)
                rep.conditions.push_back(
                    make_condition("-6*l-*k+ + l+*k+ + l-*k-", -6.0 * lm * kp + lp * kp + lm * km,
                                   0.0, ">="));
            } else {  // (-,+)
                rep.conditions.push_back(
                    make_condition("-6*l+*k- + l+*k+ + l-*k-", -6.0 * lp * km + lp * kp + lm * km,
                                   0.0, ">="));
            }
            break;
        case CaseKind::RminusZero:
            one_sided_conditions(rep, coeffs.r_plus(), kp, km, "+", spectrum, t);
            break;
        case CaseKind::RplusZero:
            one_sided_conditions(rep, coeffs.r_minus(), km, kp, "-", spectrum, t);
            break;
        case CaseKind::BothZero:
            rep.notes.push_back("not covered by Theorem 1");
            break;
    }

    bool all_ok = true;
    for (const auto& c : rep.conditions) all_ok = all_ok && c.satisfied;
    rep.admissible = all_ok && rep.spectral_ok && rep.label.kind != CaseKind::BothZero;
    return rep;
}

std::string RegimeReport::to_text() const {
    std::ostringstream out;
    out << "case: " << label.str() << "\n";
    out << "lambda_min: " << fmt(lambda_min) << "\n";
    out << "spectral gap: lambda_min > max(-r+, -r-, 0) = " << fmt(spectral_threshold) << " : "
        << (spectral_ok ? "ok" : "VIOLATED") << "\n";
    if (conditions.empty()) {
        out << "conditions: none\n";
    } else {
        out << "conditions:\n";
        for (const auto& c : conditions)
            out << "  " << c.name << " = " << fmt(c.value) << " " << c.sense << " "
                << fmt(c.threshold) << " : " << (c.satisfied ? "satisfied" : "VIOLATED") << "\n";
    }
    if (t_parameter) out << "t: " << fmt(*t_parameter) << "\n";
    out << "admissible: " << (admissible ? "yes" : "no") << "\n";
    for (const auto& n : notes) out << "note: " << n << "\n";
    return out.str();
}

std::vector<std::pair<std::string, std::string>> RegimeReport::to_kv() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("case_label", label.str());
    kv.emplace_back("lambda_min", fmt(lambda_min));
    kv.emplace_back("spectral_threshold", fmt(spectral_threshold));
    kv.emplace_back("spectral_ok", spectral_ok ? "true" : "false");
    for (size_t i = 0; i < conditions.size(); ++i) {
        std::string p = "condition." + std::to_string(i) + ".";
        kv.emplace_back(p + "name", conditions[i].name);
        kv.emplace_back(p + "value", fmt(conditions[i].value));
        kv.emplace_back(p + "threshold", fmt(conditions[i].threshold));
        kv.emplace_back(p + "sense", conditions[i].sense);
        kv.emplace_back(p + "satisfied", conditions[i].satisfied ? "true" : "false");
    }
    if (t_parameter) kv.emplace_back("t_parameter", fmt(*t_parameter));
    kv.emplace_back("admissible", admissible ? "true" : "false");
    for (size_t i = 0; i < notes.size(); ++i)
        kv.emplace_back("note." + std::to_string(i), notes[i]);
    return kv;
}

Problem mirror_problem(const Problem& p) {
    Problem q;
    q.coeffs.k_plus = p.coeffs.k_minus;
    q.coeffs.k_minus = p.coeffs.k_plus;
    q.coeffs.l_plus = p.coeffs.l_minus;
    q.coeffs.l_minus = p.coeffs.l_plus;

    q.geometry = p.geometry;
    double sum = p.geometry.a + p.geometry.b;
    if (p.geometry.has_mirror_preimage) {
        q.geometry.gamma = p.geometry.mirror_preimage;
        q.geometry.has_mirror_preimage = false;
        q.geometry.mirror_preimage = 0;
    } else {
        q.geometry.gamma = sum - p.geometry.gamma;
        q.geometry.has_mirror_preimage = true;
        q.geometry.mirror_preimage = p.geometry.gamma;
    }

    q.data.g_minus = p.data.g_plus.reflected(sum);
    q.data.g_plus = p.data.g_minus.reflected(sum);
    q.data.phi1_minus = p.data.phi1_plus;
    q.data.phi1_plus = p.data.phi1_minus;
    q.data.phi2_minus = p.data.phi2_plus.negated();
    q.data.phi2_plus = p.data.phi2_minus.negated();
    return q;
}

}  // namespace transdiff
