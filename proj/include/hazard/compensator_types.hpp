#pragma once

#include <functional>
#include <vector>

namespace hazard::engine {

// One atom of a point-mass component: probability mass p at offset u.
struct LawAtom {
    double u = 0.0;
    double p = 0.0;
};

// Conditional law of the window length T - S given the frozen time-S
// information, split into a density part and atoms. Every model implemented
// here is (exponential density) + (one atom at the residual deterministic
// observation time v2).
struct WindowLaw {
    std::function<double(double)> density;  // kappa(u)
    std::function<double(double)> survival; // P(T - S >= u)
    std::vector<LawAtom> atoms;

    static WindowLaw truncated_exponential(double rate, double v2);
    static WindowLaw deterministic(double v2);
};

// One observation window (S, T] of a local jumping filtration, with the
// information frozen at S.
struct LocalJumpWindow {
    double S = 0.0;
    double T = 0.0;
    double state = 0.0; // X_S
    int regime = 0;     // regime at S
    double v2 = 0.0;    // next deterministic observation time minus S
    WindowLaw law;      // law of T - S given the time-S information
    double survivor = 1.0; // P(tau > S | F_S), running product

    void validate() const;
    double length() const { return T - S; }
};

// The survival kernel of a window: f(u) = P_x(tau > u | window open at u),
// its u-derivative, and the gap h(u) = f(u-) - P_x(tau > u | window ends at u).
// All three are bound to the frozen (state, v2) of one window.
struct SurvivalKernel {
    std::function<double(double)> f;
    std::function<double(double)> f_u;
    std::function<double(double)> h;

    static SurvivalKernel exponential(double lambda);
    static SurvivalKernel gbm(double eta, double y);
};

struct PathAtom {
    double time = 0.0;
    double mass = 0.0;
};

// A compensator realization: absolutely-continuous density sampled on knots
// plus discrete atoms. value_at integrates the density by the trapezoid rule
// between knots and adds atom masses at or before t.
struct CompensatorPath {
    std::vector<double> knots;   // absolute times, nondecreasing
    std::vector<double> density; // lambda(t) >= 0 at each knot
    std::vector<PathAtom> atoms;
    double skipped_mass = 0.0;      // dA mass dropped at floored Z values
    bool integrity_warning = false; // set when skipped mass exceeds the reporting threshold

    double value_at(double t) const;
    double density_at(double t) const; // linear interpolation between knots
};

// Sampled Azema supermartingale Z with its F-compensator increments on the
// same grid. For continuous nonincreasing Z (the grad-log case) da_density
// equals -Z'.
struct SupermartingalePath {
    std::vector<double> times;
    std::vector<double> z;
    std::vector<double> z_minus;
    std::vector<double> da_density;
    std::vector<PathAtom> da_atoms;

    void validate() const;
};

} // namespace hazard::engine
