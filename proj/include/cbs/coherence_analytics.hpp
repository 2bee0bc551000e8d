#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbs/transport.hpp"

namespace cbs {

/// Motion-induced coherence scales for kv/Gamma, in units Gamma = 1, ell = 1 unless given.
struct CoherenceBudget {
    double kv_over_gamma = 0.0;
    double n_phi = 0.0;          // critical scattering order
    double tau_phi = 0.0;        // phase-breaking time, units of 1/Gamma
    double l_phi = 0.0;          // coherence length, units of ell
    double transport_time = 1.0; // 1/Gamma near resonance
    double diffusion = 0.0;      // ell^2 / (3 tau)
    double b_max = 0.0;          // largest optical thickness in the mesoscopic regime
    long long b_max_floor = 0;
    double ell = 1.0;
};

/// c_N = exp(-N^3 (kv/Gamma)^2 / 12).
double contrast_decay(int order, double kv_over_gamma);

/// Conditions under which contrast_decay is outside its stated validity.
std::vector<std::string> contrast_decay_warnings(int order, double kv_over_gamma,
                                                 std::optional<double> detuning = std::nullopt);

/// N_phi = 3 (3 kv / 2 Gamma)^(-2/3); +infinity for kv = 0.
double critical_order(double kv_over_gamma);

CoherenceBudget coherence_scales(double kv_over_gamma, double ell = 1.0);

/// b_max = (Gamma / kv)^(1/3).
double mesoscopic_bound(double kv_over_gamma);

/// kv/Gamma < 1/b^3, i.e. L_phi > L = b ell.
bool is_mesoscopic(double kv_over_gamma, double b);

struct OrderComparison {
    int order = 0;
    double mc = 0.0;
    double mc_stderr = 0.0;
    double analytic = 0.0;
    double ratio = 0.0;
    double ratio_stderr = 0.0;
    bool within_tolerance = false;
};

struct CrossCheckReport {
    bool binding = true;
    std::vector<std::string> notes;
    std::vector<OrderComparison> orders;
    bool all_within_tolerance() const;
};

/**
 * Compares Monte-Carlo per-order contrasts with contrast_decay. An order is
 * within tolerance when |mc - analytic| <= max(3 stderr, 5% of analytic). The
 * report is non-binding when the run is outside the formula's validity:
 * either kv sqrt(N) is not small against Gamma, or, away from resonance, the
 * detuning is not large against sqrt(N) kv.
 */
CrossCheckReport mc_cross_check(ContrastEstimate const& mc, double kv_over_gamma, double detuning,
                                std::vector<int> const& orders);

}  // namespace cbs
