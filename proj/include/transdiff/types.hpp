#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace transdiff {

// Error carrying the module it originated from; the CLI prints "[module] message".
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error("[" + module + "] " + message), module_(std::move(module)) {}
    const std::string& module() const { return module_; }

private:
    std::string module_;
};

// Diffusion/advection coefficients of the two habitats. Requires k_plus*k_minus > 0.
struct Coefficients {
    double k_plus = 1.0;
    double k_minus = 1.0;
    double l_plus = 0.0;
    double l_minus = 0.0;

    double r_plus() const { return l_plus / k_plus; }
    double r_minus() const { return l_minus / k_minus; }
    // Right end of the branch cut / spectral threshold max(-r_plus, -r_minus, 0).
    double r_max() const { return std::max({-r_plus(), -r_minus(), 0.0}); }

    void validate() const {
        if (k_plus == 0.0 || k_minus == 0.0 || k_plus * k_minus <= 0.0)
            throw Error("regime", "coefficients require k_plus*k_minus > 0");
    }
};

// Strip geometry: x in (a, b) with interface at gamma, cross-section y in (0, ell).
struct Geometry {
    double a = -1.0;
    double gamma = 0.0;
    double b = 1.0;
    double ell = 3.14159265358979323846;
    int modes = 16;    // number of sine modes K
    int nx = 65;       // output grid
    int ny = 33;
    // Pre-reflection gamma recorded by mirroring so a second mirror restores it bitwise.
    bool has_mirror_preimage = false;
    double mirror_preimage = 0.0;

    double c() const { return gamma - a; }  // minus interval length
    double d() const { return b - gamma; }  // plus interval length
    double lambda(int k) const {
        double w = k * 3.14159265358979323846 / ell;
        return w * w;
    }

    void validate() const {
        if (!(a < gamma && gamma < b)) throw Error("regime", "geometry requires a < gamma < b");
        if (!(ell > 0.0)) throw Error("regime", "geometry requires ell > 0");
        if (modes < 1) throw Error("regime", "geometry requires modes >= 1");
    }
};

}  // namespace transdiff
