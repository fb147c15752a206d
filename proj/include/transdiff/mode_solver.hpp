#pragma once

#include <array>
#include <functional>
#include <map>
#include <vector>

#include "transdiff/types.hpp"

namespace transdiff {

using RealFn = std::function<double(double)>;

struct Roots {
    double m;    // sqrt(lambda)
    double ell;  // sqrt(lambda + r)
};

// Roots of the characteristic quartic chi^4 + (2a - r) chi^2 + (a^2 - r a)
// at a = -lambda; factors as (chi^2 - lambda)(chi^2 - (lambda + r)).
Roots characteristic_roots(double lambda, double r);

// n-point Gauss-Legendre rule mapped to [0, 1].
void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Scaled exponential basis element (p0 + p1 (x - x0)) e^{w (x - x0)}.
struct BasisFn {
    double p0 = 0, p1 = 0, w = 0, x0 = 0;
    double deriv(int order, double x) const;
    double value(double x) const { return deriv(0, x); }
};

// Four decaying homogeneous solutions anchored at the interval ends; switches
// to the polynomial-augmented pair when the roots nearly coincide.
std::array<BasisFn, 4> homogeneous_basis(double lambda, double r, double xl, double xr);

// One particular solution of u'''' - (2 lambda + r) u'' + (lambda^2 + r lambda) u = f
// on [xl, xr], built from the decaying two-sided kernel of the constant
// coefficient operator with composite Gauss-Legendre quadrature.
class ParticularSolution {
public:
    ParticularSolution() = default;  // the zero solution
    ParticularSolution(double lambda, double r, RealFn f, double xl, double xr,
                       int panels = 64, int nodes = 8);

    double deriv(int order, double x) const;  // order 0..4; order 4 includes f(x)
    double value(double x) const { return deriv(0, x); }
    bool is_zero() const { return !f_; }
    double quadrature_error() const { return quad_error_; }  // halving check estimate
    double f_scale() const { return f_scale_; }              // max |f| over quadrature nodes

private:
    struct Derivs {
        std::array<double, 5> d{};
    };
    double kernel(int p, double tau) const;
    Derivs integrate(double x, int panels, bool cached) const;

    double lambda_ = 0, r_ = 0, m_ = 0, ell_ = 0, droot_ = 0, xl_ = 0, xr_ = 1;
    RealFn f_;
    int panels_ = 64, nodes_ = 8;
    std::vector<double> gl_x_, gl_w_;  // reference rule on [0,1]
    std::vector<double> node_x_, node_f_;
    double quad_error_ = 0, f_scale_ = 0;
    mutable std::map<double, Derivs> memo_;
};

struct ModeProblem {
    double lambda = 1;
    Coefficients coeffs;
    double a = -1, gamma = 0, b = 1;
    RealFn f_minus, f_plus;  // forcing g/k per side; empty means zero
    double phi1_minus = 0, phi2_minus = 0, phi1_plus = 0, phi2_plus = 0;
    int quad_panels = 64, quad_nodes = 8;

    double c() const { return gamma - a; }
    double d() const { return b - gamma; }
    void validate() const;
};

struct TransmissionSystem {
    std::array<std::array<double, 8>, 8> matrix{};  // row-major; columns 0-3 minus side
    std::array<double, 8> rhs{};
};

// Rows in order [u-(a), u-'(a), u+(b), u+'(b), TC1, TC1', TC2 second order,
// TC2 third order].
TransmissionSystem assemble_transmission_system(const ModeProblem& mp);

struct SideSolution {
    double lambda = 0, r = 0;
    std::array<BasisFn, 4> basis{};
    std::array<double, 4> alpha{};
    ParticularSolution particular;
    RealFn f;

    double deriv(int order, double x) const;
    double ode_residual(double x) const;  // absolute residual of the mode equation
};

struct ModeSolution {
    double lambda = 0, m = 0, ell_minus = 0, ell_plus = 0;
    double a = 0, gamma = 0, b = 0;
    SideSolution minus, plus;
    double rcond = 0;
    double max_condition_residual = 0;  // relative, over the eight assembled rows
    double max_ode_residual = 0;        // relative to max(1, |f|), collocation grid
    double f_scale = 1;

    // side dispatch: x < gamma evaluates the left solution, x >= gamma the right
    double eval(int order, double x) const;
    double value(double x) const { return eval(0, x); }
};

ModeSolution solve_mode(const ModeProblem& mp);

enum class Side { minus, plus };

// Solution of the one-interval problem with Navier conditions
// u = u'' = 0 at both ends.
struct AuxiliarySolution {
    double lambda = 0, r = 0;
    std::array<BasisFn, 4> basis{};
    std::array<double, 4> alpha{};
    ParticularSolution particular;
    double rcond = 0;

    double deriv(int order, double x) const;
    double value(double x) const { return deriv(0, x); }
};

AuxiliarySolution solve_auxiliary(double lambda, double r, RealFn f, double xl, double xr,
                                  int panels = 64, int nodes = 8);
AuxiliarySolution solve_auxiliary_F(Side side, double lambda, const Coefficients& coeffs,
                                    RealFn f, double xl, double xr, int panels = 64,
                                    int nodes = 8);

struct PsiResult {
    double psi1 = 0;        // interface trace u(gamma)
    double psi2 = 0;        // interface trace u'(gamma)
    double det_value = 0;   // certified scalar determinant for the case
    double matrix_det = 0;  // determinant of the assembled 2x2 system
};

// Scalar 2x2 transmission-system route; case 1 needs both ratios nonzero,
// case 2 needs r_minus = 0.
PsiResult psi_via_paper_route(int case_id, const ModeProblem& mp);

}  // namespace transdiff
