#include "transdiff/mode_solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "transdiff/symbols.hpp"

namespace transdiff {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double po2_scale(double s) { return s > 0 ? std::exp2(-std::ilogb(s)) : 1.0; }

}  // namespace

// Newton iteration on the Legendre polynomial.
void gauss_legendre01(int n, std::vector<double>& x01, std::vector<double>& w01) {
    x01.resize(n);
    w01.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 60; ++it) {
            double p0 = 1, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1);
            double step = p1 / dp;
            t -= step;
            if (std::fabs(step) < 1e-15) {
                p0 = 1;
                p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (t * p1 - p0) / (t * t - 1);
                break;
            }
        }
        x01[i] = (t + 1) / 2;
        w01[i] = 1.0 / ((1 - t * t) * dp * dp);
    }
}

Roots characteristic_roots(double lambda, double r) {
    if (!(lambda > 0) || !(lambda + r > 0))
        throw Error("mode_solver", "spectral incompatibility: lambda = " + fmt(lambda) +
                                       " must exceed max(-r, 0) with r = " + fmt(r));
    return {std::sqrt(lambda), std::sqrt(lambda + r)};
}

double BasisFn::deriv(int order, double x) const {
    double q0 = p0, q1 = p1;
    for (int j = 0; j < order; ++j) {
        double n0 = q1 + w * q0;
        q1 = w * q1;
        q0 = n0;
    }
    double s = x - x0;
    return (q0 + q1 * s) * std::exp(w * s);
}

std::array<BasisFn, 4> homogeneous_basis(double lambda, double r, double xl, double xr) {
    auto [m, ell] = characteristic_roots(lambda, r);
    if (std::fabs(m - ell) < 1e-9 * m)
        return {BasisFn{1, 0, -m, xl}, BasisFn{0, 1, -m, xl}, BasisFn{1, 0, m, xr},
                BasisFn{0, -1, m, xr}};
    return {BasisFn{1, 0, -m, xl}, BasisFn{1, 0, m, xr}, BasisFn{1, 0, -ell, xl},
            BasisFn{1, 0, ell, xr}};
}

ParticularSolution::ParticularSolution(double lambda, double r, RealFn f, double xl, double xr,
                                       int panels, int nodes)
    : lambda_(lambda), r_(r), xl_(xl), xr_(xr), f_(std::move(f)), panels_(panels),
      nodes_(nodes) {
    auto roots = characteristic_roots(lambda, r);
    m_ = roots.m;
    ell_ = roots.ell;
    droot_ = ell_ - m_;
    if (!(xr_ > xl_)) throw Error("mode_solver", "empty interval");
    if (!f_) return;
    if (panels_ < 2 || nodes_ < 2) throw Error("mode_solver", "quadrature spec too small");
    gauss_legendre01(nodes_, gl_x_, gl_w_);
    double h = (xr_ - xl_) / panels_;
    node_x_.resize(static_cast<size_t>(panels_) * nodes_);
    node_f_.resize(node_x_.size());
    for (int p = 0; p < panels_; ++p) {
        for (int i = 0; i < nodes_; ++i) {
            double x = xl_ + (p + gl_x_[i]) * h;
            double v = f_(x);
            node_x_[static_cast<size_t>(p) * nodes_ + i] = x;
            node_f_[static_cast<size_t>(p) * nodes_ + i] = v;
            f_scale_ = std::max(f_scale_, std::fabs(v));
        }
    }
    double len = xr_ - xl_;
    for (double frac : {0.3, 0.5, 0.8}) {
        double xp = xl_ + frac * len;
        Derivs full = integrate(xp, panels_, true);
        Derivs half = integrate(xp, panels_ / 2, false);
        for (int j = 0; j <= 4; ++j) {
            double e = std::fabs(full.d[j] - half.d[j]) / std::max(1.0, std::fabs(full.d[j]));
            quad_error_ = std::max(quad_error_, e);
        }
    }
    if (quad_error_ > 1e-5)
        throw Error("mode_solver",
                    "quadrature halving check failed (estimate " + fmt(quad_error_) +
                        "); increase the panel count");
}

double ParticularSolution::kernel(int p, double tau) const {
    double cp, lp;
    switch (p) {
        case -1:
            cp = 1.0 / (m_ * ell_);
            lp = 1.0 / ell_;
            break;
        case 0:
            cp = 0;
            lp = 1;
            break;
        case 1:
            cp = -1;
            lp = ell_;
            break;
        case 2:
            cp = -(ell_ + m_);
            lp = ell_ * ell_;
            break;
        default:
            cp = -(ell_ * ell_ + ell_ * m_ + m_ * m_);
            lp = ell_ * ell_ * ell_;
            break;
    }
    double w = -droot_ * tau;
    double em1r = (w == 0) ? 1.0 : std::expm1(w) / w;
    return std::exp(-m_ * tau) * (cp + lp * tau * em1r) / (2 * (ell_ + m_));
}

ParticularSolution::Derivs ParticularSolution::integrate(double x, int panels,
                                                         bool cached) const {
    static constexpr double left_sign[5] = {1, -1, 1, -1, 1};
    Derivs out{};
    double h = (xr_ - xl_) / panels;
    for (int p = 0; p < panels; ++p) {
        double p0 = xl_ + p * h;
        double p1 = p0 + h;
        if (p1 <= x || p0 >= x) {
            bool left = p1 <= x;
            for (int i = 0; i < nodes_; ++i) {
                double s, fv;
                if (cached) {
                    s = node_x_[static_cast<size_t>(p) * nodes_ + i];
                    fv = node_f_[static_cast<size_t>(p) * nodes_ + i];
                } else {
                    s = p0 + gl_x_[i] * h;
                    fv = f_(s);
                }
                double wq = gl_w_[i] * h * fv;
                double tau = left ? x - s : s - x;
                for (int j = 0; j <= 4; ++j)
                    out.d[j] += (left ? left_sign[j] : 1.0) * kernel(j - 1, tau) * wq;
            }
        } else {
            for (int half = 0; half < 2; ++half) {
                double q0 = half ? x : p0;
                double q1 = half ? p1 : x;
                double hh = q1 - q0;
                if (!(hh > 0)) continue;
                for (int i = 0; i < nodes_; ++i) {
                    double s = q0 + gl_x_[i] * hh;
                    double wq = gl_w_[i] * hh * f_(s);
                    double tau = half ? s - x : x - s;
                    for (int j = 0; j <= 4; ++j)
                        out.d[j] += (half ? 1.0 : left_sign[j]) * kernel(j - 1, tau) * wq;
                }
            }
        }
    }
    return out;
}

double ParticularSolution::deriv(int order, double x) const {
    if (order < 0 || order > 4) throw Error("mode_solver", "derivative order out of range");
    if (!f_) return 0;
    double slack = 1e-12 * (xr_ - xl_);
    if (x < xl_ - slack || x > xr_ + slack)
        throw Error("mode_solver", "evaluation point outside the interval");
    auto it = memo_.find(x);
    if (it == memo_.end()) it = memo_.emplace(x, integrate(x, panels_, true)).first;
    double v = it->second.d[order];
    if (order == 4) v += f_(std::min(std::max(x, xl_), xr_));
    return v;
}

void ModeProblem::validate() const {
    coeffs.validate();
    if (!(a < gamma && gamma < b))
        throw Error("mode_solver", "interval ordering a < gamma < b violated");
    if (!(lambda > coeffs.r_max()))
        throw Error("mode_solver", "spectral incompatibility: lambda = " + fmt(lambda) +
                                       " must exceed max(-r+, -r-, 0) = " + fmt(coeffs.r_max()));
    if (quad_panels < 2 || quad_nodes < 2)
        throw Error("mode_solver", "quadrature spec too small");
}

namespace {

struct Workspace {
    std::array<BasisFn, 4> bm, bp;
    ParticularSolution pm, pp;
};

Workspace build_workspace(const ModeProblem& mp) {
    mp.validate();
    Workspace w;
    w.bm = homogeneous_basis(mp.lambda, mp.coeffs.r_minus(), mp.a, mp.gamma);
    w.bp = homogeneous_basis(mp.lambda, mp.coeffs.r_plus(), mp.gamma, mp.b);
    if (mp.f_minus)
        w.pm = ParticularSolution(mp.lambda, mp.coeffs.r_minus(), mp.f_minus, mp.a, mp.gamma,
                                  mp.quad_panels, mp.quad_nodes);
    if (mp.f_plus)
        w.pp = ParticularSolution(mp.lambda, mp.coeffs.r_plus(), mp.f_plus, mp.gamma, mp.b,
                                  mp.quad_panels, mp.quad_nodes);
    return w;
}

TransmissionSystem assemble_from(const ModeProblem& mp, const Workspace& w) {
    TransmissionSystem sys{};
    double lam = mp.lambda;
    double km = mp.coeffs.k_minus, kp = mp.coeffs.k_plus;
    double lm = mp.coeffs.l_minus, lp = mp.coeffs.l_plus;
    for (int i = 0; i < 4; ++i) {
        sys.matrix[0][i] = w.bm[i].deriv(0, mp.a);
        sys.matrix[1][i] = w.bm[i].deriv(1, mp.a);
        sys.matrix[2][4 + i] = w.bp[i].deriv(0, mp.b);
        sys.matrix[3][4 + i] = w.bp[i].deriv(1, mp.b);
        sys.matrix[4][i] = w.bm[i].deriv(0, mp.gamma);
        sys.matrix[4][4 + i] = -w.bp[i].deriv(0, mp.gamma);
        sys.matrix[5][i] = w.bm[i].deriv(1, mp.gamma);
        sys.matrix[5][4 + i] = -w.bp[i].deriv(1, mp.gamma);
        sys.matrix[6][i] = km * (w.bm[i].deriv(2, mp.gamma) - lam * w.bm[i].deriv(0, mp.gamma));
        sys.matrix[6][4 + i] =
            -kp * (w.bp[i].deriv(2, mp.gamma) - lam * w.bp[i].deriv(0, mp.gamma));
        sys.matrix[7][i] = km * (w.bm[i].deriv(3, mp.gamma) - lam * w.bm[i].deriv(1, mp.gamma)) -
                           lm * w.bm[i].deriv(1, mp.gamma);
        sys.matrix[7][4 + i] =
            -(kp * (w.bp[i].deriv(3, mp.gamma) - lam * w.bp[i].deriv(1, mp.gamma)) -
              lp * w.bp[i].deriv(1, mp.gamma));
    }
    sys.rhs[0] = mp.phi1_minus - w.pm.deriv(0, mp.a);
    sys.rhs[1] = mp.phi2_minus - w.pm.deriv(1, mp.a);
    sys.rhs[2] = mp.phi1_plus - w.pp.deriv(0, mp.b);
    sys.rhs[3] = mp.phi2_plus - w.pp.deriv(1, mp.b);
    sys.rhs[4] = w.pp.deriv(0, mp.gamma) - w.pm.deriv(0, mp.gamma);
    sys.rhs[5] = w.pp.deriv(1, mp.gamma) - w.pm.deriv(1, mp.gamma);
    sys.rhs[6] = kp * (w.pp.deriv(2, mp.gamma) - lam * w.pp.deriv(0, mp.gamma)) -
                 km * (w.pm.deriv(2, mp.gamma) - lam * w.pm.deriv(0, mp.gamma));
    sys.rhs[7] = (kp * (w.pp.deriv(3, mp.gamma) - lam * w.pp.deriv(1, mp.gamma)) -
                  lp * w.pp.deriv(1, mp.gamma)) -
                 (km * (w.pm.deriv(3, mp.gamma) - lam * w.pm.deriv(1, mp.gamma)) -
                  lm * w.pm.deriv(1, mp.gamma));
    return sys;
}

// Equilibrated dense solve shared by the 8x8 and 4x4 systems.
template <int N>
void scaled_solve(Eigen::Matrix<double, N, N> A, Eigen::Matrix<double, N, 1> b,
                  Eigen::Matrix<double, N, 1>& out, double& rcond, const char* what) {
    Eigen::Matrix<double, N, 1> cs;
    for (int i = 0; i < N; ++i) {
        double s = po2_scale(A.row(i).cwiseAbs().maxCoeff());
        A.row(i) *= s;
        b(i) *= s;
    }
    for (int j = 0; j < N; ++j) {
        cs(j) = po2_scale(A.col(j).cwiseAbs().maxCoeff());
        A.col(j) *= cs(j);
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, N, N>> svd(A);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(N - 1);
    rcond = smax > 0 ? smin / smax : 0;
    if (rcond < 1e-13)
        throw Error("mode_solver", std::string(what) + " nearly singular (rcond = " +
                                       fmt(rcond) + ")");
    Eigen::Matrix<double, N, 1> y = Eigen::PartialPivLU<Eigen::Matrix<double, N, N>>(A).solve(b);
    out = cs.cwiseProduct(y);
}

}  // namespace

TransmissionSystem assemble_transmission_system(const ModeProblem& mp) {
    Workspace w = build_workspace(mp);
    return assemble_from(mp, w);
}

double SideSolution::deriv(int order, double x) const {
    double v = particular.deriv(order, x);
    for (int i = 0; i < 4; ++i) v += alpha[i] * basis[i].deriv(order, x);
    return v;
}

double SideSolution::ode_residual(double x) const {
    double v = deriv(4, x) - (2 * lambda + r) * deriv(2, x) +
               (lambda * lambda + r * lambda) * deriv(0, x);
    return v - (f ? f(x) : 0.0);
}

double ModeSolution::eval(int order, double x) const {
    return x < gamma ? minus.deriv(order, x) : plus.deriv(order, x);
}

ModeSolution solve_mode(const ModeProblem& mp) {
    Workspace w = build_workspace(mp);
    TransmissionSystem sys = assemble_from(mp, w);

    Eigen::Matrix<double, 8, 8> A;
    Eigen::Matrix<double, 8, 1> b;
    for (int i = 0; i < 8; ++i) {
        b(i) = sys.rhs[i];
        for (int j = 0; j < 8; ++j) A(i, j) = sys.matrix[i][j];
    }
    Eigen::Matrix<double, 8, 1> alpha;
    double rcond = 0;
    scaled_solve<8>(A, b, alpha, rcond, "transmission system");

    ModeSolution sol;
    sol.lambda = mp.lambda;
    sol.m = std::sqrt(mp.lambda);
    sol.ell_minus = std::sqrt(mp.lambda + mp.coeffs.r_minus());
    sol.ell_plus = std::sqrt(mp.lambda + mp.coeffs.r_plus());
    sol.a = mp.a;
    sol.gamma = mp.gamma;
    sol.b = mp.b;
    sol.rcond = rcond;
    sol.minus = SideSolution{mp.lambda, mp.coeffs.r_minus(), w.bm, {}, w.pm, mp.f_minus};
    sol.plus = SideSolution{mp.lambda, mp.coeffs.r_plus(), w.bp, {}, w.pp, mp.f_plus};
    for (int i = 0; i < 4; ++i) {
        sol.minus.alpha[i] = alpha(i);
        sol.plus.alpha[i] = alpha(4 + i);
    }
    sol.f_scale = std::max({1.0, w.pm.f_scale(), w.pp.f_scale()});

    for (int i = 0; i < 8; ++i) {
        double lhs = 0, rowscale = std::fabs(sys.rhs[i]);
        for (int j = 0; j < 8; ++j) {
            double term = sys.matrix[i][j] * alpha(j);
            lhs += term;
            rowscale = std::max(rowscale, std::fabs(term));
        }
        double res = std::fabs(lhs - sys.rhs[i]) / std::max(1.0, rowscale);
        sol.max_condition_residual = std::max(sol.max_condition_residual, res);
    }

    for (int side = 0; side < 2; ++side) {
        const SideSolution& s = side ? sol.plus : sol.minus;
        double xl = side ? mp.gamma : mp.a;
        double xr = side ? mp.b : mp.gamma;
        for (int i = 0; i <= 64; ++i) {
            double x = xl + (xr - xl) * i / 64.0;
            double res = std::fabs(s.ode_residual(x)) / sol.f_scale;
            sol.max_ode_residual = std::max(sol.max_ode_residual, res);
        }
    }
    return sol;
}

double AuxiliarySolution::deriv(int order, double x) const {
    double v = particular.deriv(order, x);
    for (int i = 0; i < 4; ++i) v += alpha[i] * basis[i].deriv(order, x);
    return v;
}

AuxiliarySolution solve_auxiliary(double lambda, double r, RealFn f, double xl, double xr,
                                  int panels, int nodes) {
    if (!(xr > xl)) throw Error("mode_solver", "empty interval");
    AuxiliarySolution s;
    s.lambda = lambda;
    s.r = r;
    s.basis = homogeneous_basis(lambda, r, xl, xr);
    if (f) s.particular = ParticularSolution(lambda, r, std::move(f), xl, xr, panels, nodes);

    Eigen::Matrix<double, 4, 4> A;
    Eigen::Matrix<double, 4, 1> b;
    for (int i = 0; i < 4; ++i) {
        A(0, i) = s.basis[i].deriv(0, xl);
        A(1, i) = s.basis[i].deriv(0, xr);
        A(2, i) = s.basis[i].deriv(2, xl);
        A(3, i) = s.basis[i].deriv(2, xr);
    }
    b << -s.particular.deriv(0, xl), -s.particular.deriv(0, xr), -s.particular.deriv(2, xl),
        -s.particular.deriv(2, xr);
    Eigen::Matrix<double, 4, 1> alpha;
    scaled_solve<4>(A, b, alpha, s.rcond, "auxiliary Navier system");
    for (int i = 0; i < 4; ++i) s.alpha[i] = alpha(i);
    return s;
}

AuxiliarySolution solve_auxiliary_F(Side side, double lambda, const Coefficients& coeffs,
                                    RealFn f, double xl, double xr, int panels, int nodes) {
    double r = side == Side::plus ? coeffs.r_plus() : coeffs.r_minus();
    return solve_auxiliary(lambda, r, std::move(f), xl, xr, panels, nodes);
}

PsiResult psi_via_paper_route(int case_id, const ModeProblem& mp) {
    mp.validate();
    if (case_id != 1 && case_id != 2)
        throw Error("mode_solver", "case must be 1 or 2");
    double lam = mp.lambda;
    double rp = mp.coeffs.r_plus(), rm = mp.coeffs.r_minus();
    double scale = 1e-12 * std::max({1.0, std::fabs(rp), std::fabs(rm)});
    bool rp_zero = std::fabs(rp) < scale;
    bool rm_zero = std::fabs(rm) < scale;
    if (case_id == 1 && (rp_zero || rm_zero))
        throw Error("mode_solver", "case 1 route requires both ratios nonzero");
    if (case_id == 2 && !(rm_zero && !rp_zero))
        throw Error("mode_solver",
                    "case 2 route requires r_minus = 0 and r_plus nonzero; mirror the "
                    "problem when r_plus = 0");

    double c = mp.c(), d = mp.d();
    double kp = mp.coeffs.k_plus, km = mp.coeffs.k_minus;
    double lp = mp.coeffs.l_plus, lm = mp.coeffs.l_minus;
    double m = std::sqrt(lam);
    double ellp = std::sqrt(lam + rp);
    double Ed = std::exp(-d * m), Fd = std::exp(-d * ellp);
    double Ec = std::exp(-c * m);

    using symbols::SymbolArgs;
    auto fre = [&](int i, double delta, double r) {
        return symbols::f_symbol(i, SymbolArgs{delta, r, lam}).real();
    };
    auto uvre = [&](symbols::UV br, double delta, double r) {
        return symbols::uv_symbol(br, SymbolArgs{delta, r, lam}).real();
    };
    double up = uvre(symbols::UV::U, d, rp), vp = uvre(symbols::UV::V, d, rp);
    double f1p = fre(1, d, rp), f2p = fre(2, d, rp), f3p = fre(3, d, rp);

    AuxiliarySolution Fp =
        solve_auxiliary(lam, rp, mp.f_plus, mp.gamma, mp.b, mp.quad_panels, mp.quad_nodes);
    double Fp1g = Fp.deriv(1, mp.gamma), Fp1b = Fp.deriv(1, mp.b), Fp3g = Fp.deriv(3, mp.gamma);

    double phi1p = mp.phi1_plus, phi2p = mp.phi2_plus;
    double phi1m = mp.phi1_minus, phi2m = mp.phi2_minus;
    double tp1 = ellp * (1 + Fd) * phi1p + (1 - Fd) * (Fp1b + Fp1g - phi2p);
    double tp2 = m * (1 + Ed) * phi1p + (1 - Ed) * (Fp1b + Fp1g - phi2p);
    double tp3 = -ellp * (1 - Fd) * phi1p - (1 + Fd) * (Fp1b - Fp1g - phi2p);
    double tp4 = -m * (1 - Ed) * phi1p - (1 + Ed) * (Fp1b - Fp1g - phi2p);

    double A11, A12, A21, A22, rhs1, rhs2;
    if (case_id == 1) {
        double ellm = std::sqrt(lam + rm);
        double Fc = std::exp(-c * ellm);
        double um = uvre(symbols::UV::U, c, rm), vm = uvre(symbols::UV::V, c, rm);
        double f1m = fre(1, c, rm), f2m = fre(2, c, rm), f3m = fre(3, c, rm);

        AuxiliarySolution Fm =
            solve_auxiliary(lam, rm, mp.f_minus, mp.a, mp.gamma, mp.quad_panels, mp.quad_nodes);
        double Fm1g = Fm.deriv(1, mp.gamma), Fm1a = Fm.deriv(1, mp.a), Fm3g = Fm.deriv(3, mp.gamma);

        double tm1 = ellm * (1 + Fc) * phi1m + (1 - Fc) * (phi2m - Fm1a - Fm1g);
        double tm2 = m * (1 + Ec) * phi1m + (1 - Ec) * (phi2m - Fm1a - Fm1g);
        double tm3 = -ellm * (1 - Fc) * phi1m - (1 + Fc) * (phi2m - Fm1a + Fm1g);
        double tm4 = -m * (1 - Ec) * phi1m - (1 + Ec) * (phi2m - Fm1a + Fm1g);

        double R1 = -kp * Fp3g + kp * lam * Fp1g + lp * Fp1g + km * Fm3g - km * lam * Fm1g -
                    lm * Fm1g;

        rhs1 = -kp * (ellp + m) * ((1 - Fd) * tp2 / up + (1 + Fd) * tp4 / vp) +
               km * (ellm + m) * ((1 - Fc) * tm2 / um + (1 + Fc) * tm4 / vm);
        rhs2 = kp * (ellp + m) * ((1 + Ed) * tp1 / up + (1 - Ed) * tp3 / vp) +
               km * (ellm + m) * ((1 + Ec) * tm1 / um + (1 - Ec) * tm3 / vm) + 2 * R1 / m;

        A11 = -m * (km * f2m - kp * f2p);
        A12 = kp * f3p + km * f3m;
        A21 = kp * f1p + km * f1m;
        A22 = km * f2m - kp * f2p;
    } else {
        double u0 = uvre(symbols::UV::U, c, 0.0), v0 = uvre(symbols::UV::V, c, 0.0);
        double f10 = fre(1, c, 0.0), f20 = fre(2, c, 0.0), f30 = fre(3, c, 0.0);

        AuxiliarySolution Ft =
            solve_auxiliary(lam, 0.0, mp.f_minus, mp.a, mp.gamma, mp.quad_panels, mp.quad_nodes);
        double Ft1g = Ft.deriv(1, mp.gamma), Ft1a = Ft.deriv(1, mp.a), Ft3g = Ft.deriv(3, mp.gamma);

        double tm2 = m * (1 + Ec) * phi1m + (1 - Ec) * (phi2m - Ft1a - Ft1g);
        double tm4 = -m * (1 - Ec) * phi1m - (1 + Ec) * (phi2m - Ft1a + Ft1g);

        double R2 = -km * Ft3g + km * lam * Ft1g + kp * Fp3g - kp * lam * Fp1g - lp * Fp1g;

        rhs1 = -2 * km * m * ((1 - Ec) * tm2 / u0 + (1 + Ec) * tm4 / v0) +
               kp * (ellp + m) * ((1 - Fd) * tp2 / up + (1 + Fd) * tp4 / vp);
        rhs2 = 2 * km * m * ((1 + Ec) * tm2 / u0 + (1 - Ec) * tm4 / v0) +
               kp * (ellp + m) * ((1 + Ed) * tp1 / up + (1 - Ed) * tp3 / vp) - 2 * R2 / m;

        double diag = kp * f2p + 2 * m * km * f10;
        A11 = -m * diag;
        A12 = -kp * f3p + 2 * m * km * f20;
        A21 = kp * f1p + 2 * lam * km * f30;
        A22 = -diag;
    }

    PsiResult out;
    out.matrix_det = A11 * A22 - A12 * A21;
    double det_scale = std::max({1.0, std::fabs(A11 * A22), std::fabs(A12 * A21)});
    if (std::fabs(out.matrix_det) < 1e-13 * det_scale)
        throw Error("mode_solver", "transmission 2x2 determinant vanishes (|det| = " +
                                       fmt(std::fabs(out.matrix_det)) + ")");
    out.psi1 = (rhs1 * A22 - rhs2 * A12) / out.matrix_det;
    out.psi2 = (rhs2 * A11 - rhs1 * A21) / out.matrix_det;
    out.det_value = symbols::det_symbol(case_id, mp.coeffs, c, d, lam);
    return out;
}

}  // namespace transdiff
