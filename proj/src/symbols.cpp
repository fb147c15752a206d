#include "transdiff/symbols.hpp"

#include <cmath>
#include <random>

namespace transdiff::symbols {

namespace {

constexpr double kTiny = 1e-30;

void check_args(const SymbolArgs& a) {
    if (!(a.delta > 0.0)) throw Error("symbols", "delta must be > 0");
    if (a.z.imag() == 0.0 && a.z.real() <= a.r_m())
        throw Error("symbols", "argument on the branch cut (-inf, r_m]");
}

void guard_factor(const cplx& w, const char* name) {
    if (std::abs(w) < 1e-300)
        throw Error("symbols", std::string("division by vanishing factor ") + name);
}

// Shared evaluation state of the u/v pair and its stable building blocks.
struct Core {
    cplx s, t;    // sqrt(z), sqrt(z+r)
    cplx E, F;    // e^{-delta*s}, e^{-delta*t}
    cplx q;       // delta*(t - s), computed as delta*r/(t+s)
    cplx psi_q;   // (1 - e^{-q})/q
    cplx omEF;    // 1 - E*F, cancellation-free
    cplx W1;      // delta*(t+s)*E*psi(q) = (u-v)/(-2)
    cplx u, v;
};

Core make_core(const SymbolArgs& a) {
    check_args(a);
    Core c;
    c.s = principal_sqrt(a.z);
    c.t = principal_sqrt(a.z + a.r);
    c.E = std::exp(-a.delta * c.s);
    c.F = std::exp(-a.delta * c.t);
    c.omEF = -cexpm1(-a.delta * (c.s + c.t));
    if (a.r == 0.0) {
        c.q = 0.0;
        c.psi_q = 1.0;
        c.W1 = 2.0 * a.delta * c.s * c.E;
        cplx E2 = std::exp(-2.0 * a.delta * c.s);
        c.u = 1.0 - E2 - c.W1;
        c.v = 1.0 - E2 + c.W1;
    } else {
        c.q = a.delta * a.r / (c.t + c.s);
        c.psi_q = psi(c.q);
        c.W1 = a.delta * (c.t + c.s) * c.E * c.psi_q;
        c.u = c.omEF - c.W1;
        c.v = c.omEF + c.W1;
    }
    return c;
}

cplx f_from_core(int index, const SymbolArgs& a, const Core& c, bool zero_family) {
    guard_factor(c.u, "u");
    guard_factor(c.v, "v");
    if (zero_family) {
        cplx omE = -cexpm1(-a.delta * c.s);
        cplx opE = 2.0 - omE;
        cplx omE2 = -cexpm1(-2.0 * a.delta * c.s);
        switch (index) {
            case 1: return (1.0 / c.u + 1.0 / c.v) * omE2;
            case 2: return omE * omE / c.u + opE * opE / c.v;
            case 3: return opE * opE / c.u + omE * omE / c.v;
        }
    } else {
        cplx omE = -cexpm1(-a.delta * c.s);
        cplx opE = 2.0 - omE;
        cplx omF = -cexpm1(-a.delta * c.t);
        cplx opF = 2.0 - omF;
        cplx ts = c.t + c.s;
        switch (index) {
            case 1: return ts * c.t * (opE * opF / c.u + omE * omF / c.v);
            case 2: return -ts * (opE * omF / c.u + omE * opF / c.v);
            case 3: return -ts * (omE * omF / c.u + opE * opF / c.v);
        }
    }
    throw Error("symbols", "f index must be 1, 2 or 3");
}

// The nonzero-r formulas evaluated for any r; continuous at r = 0 where they take
// the limit values 2z*f3_0, -2*sqrt(z)*f1_0, -2*sqrt(z)*f2_0.
cplx f_general(int index, const SymbolArgs& a) {
    Core c = make_core(a);
    return f_from_core(index, a, c, false);
}

cplx f_zero(int index, double delta, cplx z) {
    SymbolArgs a{delta, 0.0, z};
    Core c = make_core(a);
    return f_from_core(index, a, c, true);
}

double g_real(double delta, double r, double x) {
    return g_symbol(SymbolArgs{delta, r, cplx(x)}).real();
}

// Factor 4k^2(t+s)^2 u^-2 v^-2 g_{delta,r}: equals -D1 and +D3 on the plus side.
double g1_component(double k, double delta, double r, double x) {
    SymbolArgs a{delta, r, cplx(x)};
    Core c = make_core(a);
    guard_factor(c.u, "u");
    guard_factor(c.v, "v");
    cplx ts = c.t + c.s;
    cplx val = 4.0 * k * k * ts * ts / (c.u * c.u * c.v * c.v) * g_symbol(a);
    return val.real();
}

// Factor 16k^2 x u^-2 v^-2 g_{delta,0} of the doubled zero-ratio block.
double g3_zero_component(double k, double delta, double x) {
    SymbolArgs a{delta, 0.0, cplx(x)};
    Core c = make_core(a);
    guard_factor(c.u, "u");
    guard_factor(c.v, "v");
    cplx val = 16.0 * k * k * x / (c.u * c.u * c.v * c.v) * g_symbol(a);
    return val.real();
}

double rel_residual(double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), kTiny});
}

}  // namespace

cplx principal_sqrt(cplx z) {
    if (z.imag() == 0.0 && z.real() < 0.0)
        throw Error("symbols", "branch-cut violation: square root of a negative real");
    cplx w = std::sqrt(z);
    if (w.real() < 0.0) w = -w;
    return w;
}

cplx cexpm1(cplx w) {
    if (std::abs(w) > 0.5) return std::exp(w) - 1.0;
    double x = w.real();
    double y = w.imag();
    double sh = std::sin(0.5 * y);
    return cplx(std::expm1(x) * std::cos(y) - 2.0 * sh * sh, std::exp(x) * std::sin(y));
}

cplx psi(cplx q) {
    if (q == 0.0) return 1.0;
    return -cexpm1(-q) / q;
}

cplx uv_symbol(UV branch, const SymbolArgs& args) {
    Core c = make_core(args);
    return branch == UV::U ? c.u : c.v;
}

cplx f_symbol(int index, const SymbolArgs& args) {
    Core c = make_core(args);
    return f_from_core(index, args, c, args.r == 0.0);
}

cplx g_symbol(const SymbolArgs& args) {
    Core c = make_core(args);
    if (args.r == 0.0) {
        cplx E2 = std::exp(-2.0 * args.delta * c.s);
        cplx omE2 = -cexpm1(-2.0 * args.delta * c.s);
        cplx p2 = omE2 * omE2;
        return (1.0 + c.s) * p2 * p2 + 4.0 * p2 * E2 -
               16.0 * args.delta * args.delta * args.z * E2 * E2;
    }
    cplx om2 = -cexpm1(-2.0 * args.delta * (c.s + c.t));  // 1 - (EF)^2
    cplx EmF = c.E * c.q * c.psi_q;                       // E - F
    cplx WEF = c.W1 * (c.E + c.F);
    cplx A = om2 * om2 - WEF * WEF;
    cplx B = c.omEF * c.omEF + c.W1 * EmF;
    return -c.t * A + c.s * B * B;
}

BPair b_symbols(const Coefficients& coeffs, cplx z) {
    coeffs.validate();
    if (z.imag() == 0.0 && z.real() <= coeffs.r_max())
        throw Error("symbols", "argument on the branch cut (-inf, r]");
    cplx s = principal_sqrt(z);
    cplx tp = principal_sqrt(z + coeffs.r_plus());
    cplx tm = principal_sqrt(z + coeffs.r_minus());
    cplx sum = tp + tm + 2.0 * s;
    cplx b2 = 1.0 + coeffs.l_plus / (coeffs.k_minus * (tm + s) * sum) +
              coeffs.l_minus / (coeffs.k_plus * (tp + s) * sum);
    cplx b1 = -4.0 * coeffs.k_plus * coeffs.k_minus * (tp + s) * (tm + s) * sum * b2;
    return {b1, b2};
}

double pq_scalar(PQ which, const Coefficients& coeffs, double c, double d, double x) {
    coeffs.validate();
    if (!(x > coeffs.r_max())) throw Error("symbols", "x must exceed r = max(-r_plus, -r_minus, 0)");
    const double kp = coeffs.k_plus, km = coeffs.k_minus;
    const double rp = coeffs.r_plus(), rm = coeffs.r_minus();
    switch (which) {
        case PQ::P1p: return kp * f_general(2, {d, rp, cplx(x)}).real();
        case PQ::P2p: return kp * f_general(3, {d, rp, cplx(x)}).real();
        case PQ::P3p: return kp * f_general(1, {d, rp, cplx(x)}).real();
        case PQ::P1m: return km * f_general(2, {c, rm, cplx(x)}).real();
        case PQ::P2m: return km * f_general(3, {c, rm, cplx(x)}).real();
        case PQ::P3m: return km * f_general(1, {c, rm, cplx(x)}).real();
        case PQ::Q1m: return km * f_zero(1, c, cplx(x)).real();
        case PQ::Q2m: return km * f_zero(2, c, cplx(x)).real();
        case PQ::Q3m: return km * f_zero(3, c, cplx(x)).real();
    }
    throw Error("symbols", "unknown pq scalar");
}

double det_symbol(int case_id, const Coefficients& coeffs, double c, double d, double x) {
    coeffs.validate();
    if (!(x > coeffs.r_max())) throw Error("symbols", "x must exceed r = max(-r_plus, -r_minus, 0)");
    const double kp = coeffs.k_plus, km = coeffs.k_minus;
    const double rp = coeffs.r_plus(), rm = coeffs.r_minus();
    const double sx = std::sqrt(x);
    if (case_id == 1) {
        if (rp == 0.0 || rm == 0.0)
            throw Error("symbols", "det case 1 requires both ratios nonzero");
        double f1p = f_symbol(1, {d, rp, cplx(x)}).real();
        double f2p = f_symbol(2, {d, rp, cplx(x)}).real();
        double f3p = f_symbol(3, {d, rp, cplx(x)}).real();
        double f1m = f_symbol(1, {c, rm, cplx(x)}).real();
        double f2m = f_symbol(2, {c, rm, cplx(x)}).real();
        double f3m = f_symbol(3, {c, rm, cplx(x)}).real();
        double g2 = kp * f1p * km * f3m + km * f1m * kp * f3p - 2.0 * sx * kp * f2p * km * f2m;
        return g1_component(kp, d, rp, x) + g1_component(km, c, rm, x) + g2;
    }
    if (case_id == 2) {
        if (rp == 0.0 || rm != 0.0)
            throw Error("symbols", "det case 2 requires r_plus nonzero and r_minus zero");
        double f1p = f_symbol(1, {d, rp, cplx(x)}).real();
        double f2p = f_symbol(2, {d, rp, cplx(x)}).real();
        double f3p = f_symbol(3, {d, rp, cplx(x)}).real();
        double f10 = f_zero(1, c, cplx(x)).real();
        double f20 = f_zero(2, c, cplx(x)).real();
        double f30 = f_zero(3, c, cplx(x)).real();
        double g4 = -2.0 * sx * (kp * f3p * km * f20 + kp * f2p * km * f30) +
                    2.0 * x * kp * f1p * km * f10;
        return g1_component(kp, d, rp, x) + g3_zero_component(km, c, x) + g4;
    }
    throw Error("symbols", "det case must be 1 or 2");
}

double factorization_residual(FactorKind kind, const Coefficients& coeffs, double c,
                              double d, double x) {
    coeffs.validate();
    if (!(x > coeffs.r_max())) throw Error("symbols", "x must exceed r = max(-r_plus, -r_minus, 0)");
    const double kp = coeffs.k_plus, km = coeffs.k_minus;
    const double rp = coeffs.r_plus(), rm = coeffs.r_minus();
    const double sx = std::sqrt(x);
    auto P = [&](PQ w) { return pq_scalar(w, coeffs, c, d, x); };

    switch (kind) {
        case FactorKind::D1p: {
            if (rp == 0.0) throw Error("symbols", "D1+ requires r_plus nonzero");
            double lhs = -sx * P(PQ::P1p) * P(PQ::P1p) - P(PQ::P3p) * P(PQ::P2p);
            return rel_residual(lhs, -g1_component(kp, d, rp, x));
        }
        case FactorKind::D1m: {
            if (rm == 0.0) throw Error("symbols", "D1- requires r_minus nonzero");
            double lhs = -sx * P(PQ::P1m) * P(PQ::P1m) - P(PQ::P3m) * P(PQ::P2m);
            return rel_residual(lhs, -g1_component(km, c, rm, x));
        }
        case FactorKind::D3p: {
            if (rp == 0.0) throw Error("symbols", "D3+ requires r_plus nonzero");
            double lhs = P(PQ::P2p) * P(PQ::P3p) + sx * P(PQ::P1p) * P(PQ::P1p);
            return rel_residual(lhs, g1_component(kp, d, rp, x));
        }
        case FactorKind::D3m: {
            double lhs = 4.0 * x * (P(PQ::Q2m) * P(PQ::Q3m) + sx * P(PQ::Q1m) * P(PQ::Q1m));
            return rel_residual(lhs, g3_zero_component(km, c, x));
        }
        case FactorKind::DetL1: {
            if (rp == 0.0 || rm == 0.0)
                throw Error("symbols", "det case 1 identity requires both ratios nonzero");
            double dP1 = P(PQ::P1m) - P(PQ::P1p);
            double lhs = -sx * dP1 * dP1 -
                         (P(PQ::P2p) + P(PQ::P2m)) * (P(PQ::P3p) + P(PQ::P3m));
            return rel_residual(lhs, -det_symbol(1, coeffs, c, d, x));
        }
        case FactorKind::DetL2: {
            if (rp == 0.0) throw Error("symbols", "det case 2 identity requires r_plus nonzero");
            double d3p = P(PQ::P2p) * P(PQ::P3p) + sx * P(PQ::P1p) * P(PQ::P1p);
            double d3m = 4.0 * x * (P(PQ::Q2m) * P(PQ::Q3m) + sx * P(PQ::Q1m) * P(PQ::Q1m));
            double d4 = -2.0 * sx * (P(PQ::P3p) * P(PQ::Q2m) + P(PQ::P2p) * P(PQ::Q3m) -
                                     sx * P(PQ::P1p) * P(PQ::Q1m));
            double f1p = f_general(1, {d, rp, cplx(x)}).real();
            double f2p = f_general(2, {d, rp, cplx(x)}).real();
            double f3p = f_general(3, {d, rp, cplx(x)}).real();
            double f10 = f_zero(1, c, cplx(x)).real();
            double f20 = f_zero(2, c, cplx(x)).real();
            double f30 = f_zero(3, c, cplx(x)).real();
            double g4 = -2.0 * sx * (kp * f1p * km * f20 + kp * f3p * km * f30) +
                        2.0 * x * kp * f2p * km * f10;
            double rhs = g1_component(kp, d, rp, x) + g3_zero_component(km, c, x) + g4;
            return rel_residual(d3p + d3m + d4, rhs);
        }
        case FactorKind::UplusV: {
            double worst = 0.0;
            for (auto [delta, r] : {std::pair{d, rp}, std::pair{c, rm}}) {
                SymbolArgs a{delta, r, cplx(x)};
                Core co = make_core(a);
                double lhs = (co.u + co.v).real();
                double rhs = 2.0 * (-cexpm1(-delta * (co.s + co.t))).real();
                worst = std::max(worst, rel_residual(lhs, rhs));
            }
            return worst;
        }
        case FactorKind::UtimesV: {
            double worst = 0.0;
            for (auto [delta, r] : {std::pair{d, rp}, std::pair{c, rm}}) {
                SymbolArgs a{delta, r, cplx(x)};
                Core co = make_core(a);
                double lhs = (co.u * co.v).real();
                double rhs;
                if (r == 0.0) {
                    double E2 = std::exp(-2.0 * delta * sx);
                    double omE2 = -std::expm1(-2.0 * delta * sx);
                    rhs = omE2 * omE2 - 4.0 * delta * delta * x * E2;
                } else {
                    // literal 1/r^2 form as an independent evaluation path
                    cplx ts = co.t + co.s;
                    cplx raw = (1.0 - co.E * co.F);
                    cplx w = ts * ts * (co.E - co.F) / r;
                    rhs = (raw * raw - w * w).real();
                }
                worst = std::max(worst, rel_residual(lhs, rhs));
            }
            return worst;
        }
    }
    throw Error("symbols", "unknown factorization kind");
}

ScanReport sign_scan(const std::string& symbol, const ScanRanges& ranges, int samples,
                     bool keep_samples) {
    ScanReport rep;
    rep.symbol = symbol;
    rep.samples = samples;
    rep.seed = ranges.seed;

    enum class Fam { UVSym, FNonzero, FZero, GNonzero, GZero, B2, Det1, Det2 };
    Fam fam;
    int index = 0;
    if (symbol == "u" || symbol == "v") {
        fam = Fam::UVSym;
        rep.expected_sign = +1;
    } else if (symbol == "f1" || symbol == "f2" || symbol == "f3") {
        fam = Fam::FNonzero;
        index = symbol[1] - '0';
        rep.expected_sign = (index == 1) ? +1 : -1;
    } else if (symbol == "f1_0" || symbol == "f2_0" || symbol == "f3_0") {
        fam = Fam::FZero;
        index = symbol[1] - '0';
        rep.expected_sign = +1;
    } else if (symbol == "g") {
        fam = Fam::GNonzero;
        rep.expected_sign = -1;
    } else if (symbol == "g0") {
        fam = Fam::GZero;
        rep.expected_sign = +1;
    } else if (symbol == "b2") {
        fam = Fam::B2;
        rep.expected_sign = +1;
    } else if (symbol == "det1") {
        fam = Fam::Det1;
        rep.expected_sign = -1;
    } else if (symbol == "det2") {
        fam = Fam::Det2;
        rep.expected_sign = +1;
    } else {
        throw Error("symbols", "unknown scan symbol id: " + symbol);
    }

    const bool needs_coeffs = (fam == Fam::B2 || fam == Fam::Det1 || fam == Fam::Det2);
    if (needs_coeffs && !ranges.coeffs)
        throw Error("symbols", "scan of " + symbol + " requires a coefficient set");

    std::mt19937_64 rng(ranges.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    bool first = true;
    for (int i = 0; i < samples; ++i) {
        double u1 = uni(rng), u2 = uni(rng), u3 = uni(rng), u4 = uni(rng);
        double delta = ranges.delta_min + u1 * (ranges.delta_max - ranges.delta_min);
        double r = 0.0;
        double rsign = (ranges.r_sign != 0) ? ranges.r_sign : (u2 < 0.5 ? -1.0 : 1.0);
        if (fam == Fam::UVSym) {
            // every tenth sample probes r = 0 exactly
            if (i % 10 != 9) {
                double mag = ranges.r_abs_min + u3 * (ranges.r_abs_max - ranges.r_abs_min);
                r = rsign * mag;
            }
        } else if (fam == Fam::FNonzero || fam == Fam::GNonzero) {
            double mag = ranges.r_abs_min + u3 * (ranges.r_abs_max - ranges.r_abs_min);
            r = rsign * mag;
        }

        double value = 0.0;
        double x = 0.0;
        if (needs_coeffs) {
            const Coefficients& co = *ranges.coeffs;
            double start = ranges.x_start.value_or(co.r_max());
            x = start + (1.0 - u4) * ranges.x_span;
            r = 0.0;
            delta = 0.0;
            if (fam == Fam::B2)
                value = b_symbols(co, cplx(x)).b2.real();
            else
                value = det_symbol(fam == Fam::Det1 ? 1 : 2, co, ranges.c, ranges.d, x);
        } else {
            double start = ranges.x_start.value_or(std::max(-r, 0.0));
            x = start + (1.0 - u4) * ranges.x_span;
            SymbolArgs a{delta, r, cplx(x)};
            switch (fam) {
                case Fam::UVSym:
                    value = uv_symbol(symbol == "u" ? UV::U : UV::V, a).real();
                    break;
                case Fam::FNonzero:
                    value = f_symbol(index, a).real();
                    break;
                case Fam::FZero:
                    value = f_zero(index, delta, cplx(x)).real();
                    break;
                case Fam::GNonzero:
                    value = g_symbol(a).real();
                    break;
                case Fam::GZero:
                    value = g_real(delta, 0.0, x);
                    break;
                default:
                    break;
            }
        }

        bool bad = (rep.expected_sign > 0) ? !(value > 0.0) : !(value < 0.0);
        if (first) {
            rep.min_value = rep.max_value = value;
            first = false;
        } else {
            rep.min_value = std::min(rep.min_value, value);
            rep.max_value = std::max(rep.max_value, value);
        }
        if (bad) {
            ++rep.violation_count;
            if (rep.violations.size() < 100)
                rep.violations.push_back({delta, r, x, value, true});
        }
        if (keep_samples) rep.all.push_back({delta, r, x, value, bad});
    }
    return rep;
}

}  // namespace transdiff::symbols
