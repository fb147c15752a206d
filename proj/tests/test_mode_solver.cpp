#include "transdiff/mode_solver.hpp"

#include <cmath>

#include "doctest.h"

using namespace transdiff;

namespace {

constexpr double kPi = 3.14159265358979323846;

double det4(const std::array<std::array<double, 4>, 4>& in) {
    auto a = in;
    double det = 1;
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        if (a[c][c] == 0) return 0;
        det *= a[c][c];
        for (int r = c + 1; r < 4; ++r) {
            double f = a[r][c] / a[c][c];
            for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

Coefficients make_co(double kp, double km, double lp, double lm) {
    Coefficients c;
    c.k_plus = kp;
    c.k_minus = km;
    c.l_plus = lp;
    c.l_minus = lm;
    return c;
}

// Manufactured pair: u_minus smooth, u_plus = u_minus + A (x-gamma)^2 + B (x-gamma)^3
// with A, B chosen so all four transmission conditions hold by construction.
struct Manufactured {
    Coefficients co;
    double lambda, gamma;
    double A, B;

    Manufactured(Coefficients c, double lam, double g) : co(c), lambda(lam), gamma(g) {
        double um = u_minus(0, g), um1 = u_minus(1, g), um2 = u_minus(2, g), um3 = u_minus(3, g);
        A = (co.k_minus - co.k_plus) * (um2 - lambda * um) / (2 * co.k_plus);
        B = ((co.k_minus - co.k_plus) * (um3 - lambda * um1) +
             (co.l_plus - co.l_minus) * um1) /
            (6 * co.k_plus);
    }

    static double u_minus(int order, double x) {
        switch (order & 3) {
            case 0: return std::cos(x);
            case 1: return -std::sin(x);
            case 2: return -std::cos(x);
            default: return std::sin(x);
        }
    }
    double u_plus(int order, double x) const {
        double s = x - gamma;
        double poly = 0;
        switch (order) {
            case 0: poly = A * s * s + B * s * s * s; break;
            case 1: poly = 2 * A * s + 3 * B * s * s; break;
            case 2: poly = 2 * A + 6 * B * s; break;
            case 3: poly = 6 * B; break;
            default: poly = 0; break;
        }
        return u_minus(order, x) + poly;
    }
    double u_minus4(double x) const { return std::cos(x); }
    double u_plus4(double x) const { return u_minus4(x); }

    double forcing_minus(double x) const {
        double r = co.r_minus();
        return u_minus4(x) - (2 * lambda + r) * u_minus(2, x) +
               (lambda * lambda + r * lambda) * u_minus(0, x);
    }
    double forcing_plus(double x) const {
        double r = co.r_plus();
        return u_plus4(x) - (2 * lambda + r) * u_plus(2, x) +
               (lambda * lambda + r * lambda) * u_plus(0, x);
    }

    ModeProblem problem(double a, double b) const {
        ModeProblem mp;
        mp.lambda = lambda;
        mp.coeffs = co;
        mp.a = a;
        mp.gamma = gamma;
        mp.b = b;
        mp.f_minus = [*this](double x) { return forcing_minus(x); };
        mp.f_plus = [*this](double x) { return forcing_plus(x); };
        mp.phi1_minus = u_minus(0, a);
        mp.phi2_minus = u_minus(1, a);
        mp.phi1_plus = u_plus(0, b);
        mp.phi2_plus = u_plus(1, b);
        return mp;
    }
};

ModeProblem generic_case2_problem() {
    ModeProblem mp;
    mp.lambda = 2.0;
    mp.coeffs = make_co(1.0, 1.0, -0.5, 0.0);
    mp.a = -1.0;
    mp.gamma = 0.25;
    mp.b = 1.0;
    mp.f_minus = [](double x) { return std::sin(2 * x) + 0.3 * x; };
    mp.f_plus = [](double x) { return std::cos(3 * x); };
    mp.phi1_minus = 0.4;
    mp.phi2_minus = -0.2;
    mp.phi1_plus = 0.1;
    mp.phi2_plus = 0.7;
    return mp;
}

ModeProblem generic_case1_problem() {
    ModeProblem mp;
    mp.lambda = 3.0;
    mp.coeffs = make_co(1.4, 0.8, 1.1, 0.9);
    mp.a = -0.8;
    mp.gamma = 0.2;
    mp.b = 1.1;
    mp.f_minus = [](double x) { return std::exp(0.5 * x); };
    mp.f_plus = [](double x) { return x * x - 0.4; };
    mp.phi1_minus = -0.3;
    mp.phi2_minus = 0.5;
    mp.phi1_plus = 0.2;
    mp.phi2_plus = -0.1;
    return mp;
}

}  // namespace

TEST_CASE("characteristic roots") {
    auto r = characteristic_roots(4.0, -3.0);
    CHECK(r.m == 2.0);
    CHECK(r.ell == 1.0);
    auto r0 = characteristic_roots(1.0, 0.0);
    CHECK(r0.m == 1.0);
    CHECK(r0.ell == 1.0);
    CHECK_THROWS_AS(characteristic_roots(1.0, -1.0), Error);   // lambda + r = 0
    CHECK_THROWS_AS(characteristic_roots(0.0, 1.0), Error);    // lambda = 0
    CHECK_THROWS_AS(characteristic_roots(0.5, -0.6), Error);
}

TEST_CASE("homogeneous basis anchors and Wronskian") {
    auto basis = homogeneous_basis(4.0, -3.0, 0.0, 1.0);  // m=2, ell=1
    CHECK(basis[0].value(0.0) == 1.0);
    CHECK(basis[0].deriv(1, 0.0) == -2.0);
    CHECK(basis[1].value(1.0) == 1.0);
    CHECK(basis[1].deriv(1, 1.0) == 2.0);
    CHECK(basis[2].deriv(1, 0.0) == -1.0);
    CHECK(basis[3].deriv(1, 1.0) == 1.0);

    std::array<std::array<double, 4>, 4> wr{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) wr[i][j] = basis[j].deriv(i, 0.5);
    CHECK(std::fabs(det4(wr)) > 1e-3);
}

TEST_CASE("degenerate basis for coinciding roots") {
    auto basis = homogeneous_basis(1.0, 0.0, 0.0, 1.0);
    CHECK(basis[1].value(0.0) == 0.0);   // (x - xl) e^{-m(x-xl)} vanishes at xl
    CHECK(basis[1].deriv(1, 0.0) == 1.0);
    CHECK(basis[3].value(1.0) == 0.0);
    CHECK(basis[3].deriv(1, 1.0) == -1.0);

    std::array<std::array<double, 4>, 4> wr{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) wr[i][j] = basis[j].deriv(i, 0.5);
    CHECK(std::fabs(det4(wr)) > 1e-6);

    // magnitudes stay bounded for stiff roots
    auto stiff = homogeneous_basis(2500.0, 0.0, 0.0, 1.0);
    for (int i = 0; i <= 20; ++i) {
        double x = i / 20.0;
        for (const auto& bfn : stiff) CHECK(std::fabs(bfn.value(x)) <= 1.0);
    }
}

TEST_CASE("particular solution of a constant forcing") {
    ParticularSolution zero;
    CHECK(zero.is_zero());
    CHECK(zero.deriv(0, 0.5) == 0.0);

    ParticularSolution up(4.0, -3.0, [](double) { return 28.0; }, 0.0, 1.0);
    CHECK(up.deriv(0, 0.25) == doctest::Approx(2.1291567227132824).epsilon(1e-12));
    CHECK(up.deriv(0, 0.5) == doctest::Approx(2.1974325387487868).epsilon(1e-12));
    CHECK(up.deriv(2, 0.5) == doctest::Approx(-2.2274113730511170).epsilon(1e-12));
    CHECK(up.quadrature_error() < 1e-9);
    for (double x : {0.1, 0.5, 0.9}) {
        double res = up.deriv(4, x) - 5 * up.deriv(2, x) + 4 * up.deriv(0, x) - 28.0;
        CHECK(std::fabs(res) < 1e-10);
    }
}

TEST_CASE("particular solution of a trigonometric forcing") {
    ParticularSolution up(4.0, -3.0, [](double x) { return std::sin(kPi * x); }, 0.0, 1.0);
    for (double x : {0.2, 0.5, 0.8}) {
        double res = up.deriv(4, x) - 5 * up.deriv(2, x) + 4 * up.deriv(0, x) -
                     std::sin(kPi * x);
        CHECK(std::fabs(res) < 1e-10);
    }
}

TEST_CASE("quadrature halving check trips on under-resolved forcing") {
    CHECK_THROWS_AS(
        ParticularSolution(4.0, -3.0, [](double x) { return std::sin(200.0 * x); }, 0.0, 1.0, 4, 8),
        Error);
}

TEST_CASE("assembled system structure") {
    ModeProblem mp;
    mp.lambda = 4.0;
    mp.coeffs = make_co(1, 1, 2, 2);
    mp.a = -1;
    mp.gamma = 0.3;
    mp.b = 1;
    auto sys = assemble_transmission_system(mp);
    for (double v : sys.rhs) CHECK(v == 0.0);
    for (int j = 0; j < 4; ++j) {
        CHECK(sys.matrix[2][j] == 0.0);
        CHECK(sys.matrix[3][j] == 0.0);
        CHECK(sys.matrix[0][4 + j] == 0.0);
        CHECK(sys.matrix[1][4 + j] == 0.0);
    }
}

TEST_CASE("third order transmission row loses its lower order term when l- is zero") {
    ModeProblem mp = generic_case2_problem();  // l- = 0
    auto sys = assemble_transmission_system(mp);
    auto basis = homogeneous_basis(mp.lambda, 0.0, mp.a, mp.gamma);
    for (int i = 0; i < 4; ++i) {
        double bare = mp.coeffs.k_minus *
                      (basis[i].deriv(3, mp.gamma) - mp.lambda * basis[i].deriv(1, mp.gamma));
        CHECK(sys.matrix[7][i] == bare);
    }
}

TEST_CASE("zero data produces the zero solution") {
    ModeProblem mp;
    mp.lambda = 4.0;
    mp.coeffs = make_co(1.3, 0.7, 0.5, -0.2);
    mp.a = -1;
    mp.gamma = 0.3;
    mp.b = 1;
    auto sol = solve_mode(mp);
    for (double x : {-0.9, -0.3, 0.3, 0.7, 0.99}) CHECK(sol.value(x) == 0.0);
    CHECK(sol.rcond > 1e-13);
}

TEST_CASE("manufactured smooth solution with equal coefficients") {
    Manufactured man(make_co(1, 1, 2, 2), 4.0, 0.3);
    CHECK(man.A == 0.0);
    CHECK(man.B == 0.0);
    auto mp = man.problem(-1.0, 1.0);
    CHECK(mp.f_minus(0.1) == doctest::Approx(35.0 * std::cos(0.1)).epsilon(1e-14));
    auto sol = solve_mode(mp);
    for (int i = 0; i <= 20; ++i) {
        double x = -1.0 + 2.0 * i / 20.0;
        double exact = std::cos(x);
        CHECK(sol.value(x) == doctest::Approx(exact).epsilon(1e-9));
    }
    CHECK(sol.max_ode_residual < 1e-8);
    CHECK(sol.max_condition_residual < 1e-12);
}

TEST_CASE("manufactured solution with jumping coefficients") {
    Manufactured man(make_co(1.4, 0.8, 1.1, 0.9), 3.0, 0.2);
    CHECK(man.A != 0.0);
    auto mp = man.problem(-0.8, 1.1);
    auto sol = solve_mode(mp);
    for (int i = 0; i <= 24; ++i) {
        double x = -0.8 + 1.9 * i / 24.0;
        double exact = x < mp.gamma ? man.u_minus(0, x) : man.u_plus(0, x);
        CHECK(sol.eval(0, x) == doctest::Approx(exact).epsilon(1e-9));
    }
    // one-sided second derivatives at the interface genuinely jump
    double jump = sol.plus.deriv(2, mp.gamma) - sol.minus.deriv(2, mp.gamma);
    CHECK(jump == doctest::Approx(2 * man.A).epsilon(1e-7));
    CHECK(sol.max_ode_residual < 1e-8);
}

TEST_CASE("repeated solves are bitwise identical") {
    auto mp = generic_case1_problem();
    auto s1 = solve_mode(mp);
    auto s2 = solve_mode(mp);
    for (int i = 0; i < 4; ++i) {
        CHECK(s1.minus.alpha[i] == s2.minus.alpha[i]);
        CHECK(s1.plus.alpha[i] == s2.plus.alpha[i]);
    }
}

TEST_CASE("mode level mirror equivariance") {
    auto mp = generic_case1_problem();
    double sum = mp.a + mp.b;
    ModeProblem mirrored;
    mirrored.lambda = mp.lambda;
    mirrored.coeffs = make_co(mp.coeffs.k_minus, mp.coeffs.k_plus, mp.coeffs.l_minus,
                              mp.coeffs.l_plus);
    mirrored.a = mp.a;
    mirrored.gamma = sum - mp.gamma;
    mirrored.b = mp.b;
    auto fm = mp.f_minus, fp = mp.f_plus;
    mirrored.f_minus = [fp, sum](double x) { return fp(sum - x); };
    mirrored.f_plus = [fm, sum](double x) { return fm(sum - x); };
    mirrored.phi1_minus = mp.phi1_plus;
    mirrored.phi2_minus = -mp.phi2_plus;
    mirrored.phi1_plus = mp.phi1_minus;
    mirrored.phi2_plus = -mp.phi2_minus;

    auto sol = solve_mode(mp);
    auto mir = solve_mode(mirrored);
    for (int i = 0; i <= 16; ++i) {
        double x = mp.a + (mp.b - mp.a) * i / 16.0;
        CHECK(mir.value(sum - x) == doctest::Approx(sol.value(x)).epsilon(1e-10));
    }
}

TEST_CASE("spectral and interval validation") {
    ModeProblem mp;
    mp.coeffs = make_co(1, 1, -2, 0);
    mp.lambda = 1.5;  // max(-r+, 0) = 2
    CHECK_THROWS_AS(solve_mode(mp), Error);
    mp.lambda = 4.0;
    mp.gamma = 2.0;  // outside (a, b)
    CHECK_THROWS_AS(solve_mode(mp), Error);
}

TEST_CASE("auxiliary Navier solve: zero and eigenforcing") {
    auto zero = solve_auxiliary(2.0, -0.5, RealFn{}, 0.25, 1.0);
    CHECK(zero.value(0.6) == 0.0);

    // f = sin(pi x) on [0,1] with lambda=4, r=-3: exact solution f/mu
    double mu = (kPi * kPi + 4.0) * (kPi * kPi + 1.0);
    auto F = solve_auxiliary(4.0, -3.0, [](double x) { return std::sin(kPi * x); }, 0.0, 1.0);
    CHECK(F.value(0.5) == doctest::Approx(0.0066331861882916656).epsilon(1e-10));
    CHECK(F.deriv(1, 0.0) == doctest::Approx(kPi / mu).epsilon(1e-9));
    CHECK(F.deriv(3, 0.0) == doctest::Approx(-kPi * kPi * kPi / mu).epsilon(1e-9));
    CHECK(std::fabs(F.value(0.0)) < 1e-12);
    CHECK(std::fabs(F.deriv(2, 1.0)) < 1e-9);

    // second harmonic on a shifted interval
    double g = 0.25, bb = 1.0, d = bb - g;
    double w = 2 * kPi / d;
    double mu2 = (w * w + 2.0) * (w * w + 1.5);
    auto F2 = solve_auxiliary(2.0, -0.5, [=](double x) { return std::sin(w * (x - g)); }, g, bb);
    CHECK(F2.value(g + d / 8) ==
          doctest::Approx(std::sin(w * d / 8) / mu2).epsilon(1e-9));
}

TEST_CASE("auxiliary Navier solve: boundary rows for generic forcing") {
    auto F = solve_auxiliary(3.0, 1.2, [](double x) { return std::exp(x) * std::sin(2 * x); },
                             -0.5, 0.8);
    CHECK(std::fabs(F.value(-0.5)) < 1e-11);
    CHECK(std::fabs(F.value(0.8)) < 1e-11);
    CHECK(std::fabs(F.deriv(2, -0.5)) < 1e-9);
    CHECK(std::fabs(F.deriv(2, 0.8)) < 1e-9);
    double side = Side::plus == Side::plus ? 1.0 : 0.0;
    CHECK(side == 1.0);
    auto Fs = solve_auxiliary_F(Side::plus, 3.0, make_co(1, 1, 1.2, 0.7),
                                [](double x) { return std::exp(x) * std::sin(2 * x); }, -0.5, 0.8);
    CHECK(Fs.value(0.2) == doctest::Approx(F.value(0.2)).epsilon(1e-12));
}

TEST_CASE("scalar route reproduces the interface traces, case 2") {
    auto mp = generic_case2_problem();
    auto sol = solve_mode(mp);
    auto psi = psi_via_paper_route(2, mp);
    double t1 = sol.minus.deriv(0, mp.gamma), t2 = sol.minus.deriv(1, mp.gamma);
    CHECK(std::fabs(psi.psi1 - t1) <= 1e-10 * (1 + std::fabs(t1)));
    CHECK(std::fabs(psi.psi2 - t2) <= 1e-10 * (1 + std::fabs(t2)));
    CHECK(psi.det_value > 0.0);
    CHECK(psi.matrix_det != 0.0);
}

TEST_CASE("scalar route reproduces the interface traces, case 1") {
    auto mp = generic_case1_problem();
    auto sol = solve_mode(mp);
    auto psi = psi_via_paper_route(1, mp);
    double t1 = sol.minus.deriv(0, mp.gamma), t2 = sol.minus.deriv(1, mp.gamma);
    CHECK(std::fabs(psi.psi1 - t1) <= 1e-10 * (1 + std::fabs(t1)));
    CHECK(std::fabs(psi.psi2 - t2) <= 1e-10 * (1 + std::fabs(t2)));
    CHECK(psi.det_value < 0.0);
    // the assembled 2x2 determinant is exactly the negated scalar determinant
    CHECK(psi.matrix_det == doctest::Approx(-psi.det_value).epsilon(1e-12));
}

TEST_CASE("scalar route with zero data") {
    auto mp = generic_case2_problem();
    mp.f_minus = {};
    mp.f_plus = {};
    mp.phi1_minus = mp.phi2_minus = mp.phi1_plus = mp.phi2_plus = 0;
    auto psi = psi_via_paper_route(2, mp);
    CHECK(psi.psi1 == 0.0);
    CHECK(psi.psi2 == 0.0);
    CHECK(psi.det_value > 0.0);
}

TEST_CASE("scalar route case validation") {
    auto c1 = generic_case1_problem();
    auto c2 = generic_case2_problem();
    CHECK_THROWS_AS(psi_via_paper_route(1, c2), Error);
    CHECK_THROWS_AS(psi_via_paper_route(2, c1), Error);
    CHECK_THROWS_AS(psi_via_paper_route(3, c1), Error);

    ModeProblem rplus = c2;
    rplus.coeffs = make_co(1.0, 1.0, 0.0, -0.5);  // r+ = 0, r- nonzero
    CHECK_THROWS_AS(psi_via_paper_route(2, rplus), Error);
}
